//! Structured hexahedral meshes over layered boxes and well wedges, with
//! region marking, coordinate-bisection partitioning and field sampling
//! along observation lines.

pub mod generate;
pub mod partition;
pub mod sample;
pub mod shape;

pub use generate::{generate_layered_box, generate_tensor_box, generate_wedge, WedgeSpec};
pub use partition::partition;
pub use sample::{sample_line, LineSample};

use std::collections::BTreeMap;

use crate::error::{Error, Result};

use shape::{det3, jacobian, HEX_FACES};

/// One quad face of a hexahedral cell lying on the domain boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryFace {
    pub cell: u32,
    /// Local face index into [`shape::HEX_FACES`].
    pub local_face: u8,
    pub marker: u16,
}

/// Acceleration structure used by point location; rebuilt by generators.
#[derive(Debug, Clone, Default)]
pub struct CellGrid {
    pub origin: [f64; 3],
    pub widths: [f64; 3],
    pub dims: [usize; 3],
    pub buckets: Vec<Vec<u32>>,
}

/// Hexahedral mesh. Nodes are (x, y, z) coordinates in metres with z pointing
/// up; the ground surface is the plane of maximum z and depth is measured
/// down from it.
#[derive(Debug, Clone, Default)]
pub struct Mesh {
    pub nodes: Vec<[f64; 3]>,
    /// 8-node cells in VTK hexahedron ordering.
    pub cells: Vec<[u32; 8]>,
    pub cell_material: Vec<u16>,
    pub boundary_faces: Vec<BoundaryFace>,
    /// Marker id → name; names are what configs reference.
    pub markers: Vec<String>,
    /// Named node sets (pile interiors, wellbore intervals, ...), each sorted.
    pub node_regions: BTreeMap<String, Vec<u32>>,
    /// Cell → owning worker. All zero until [`partition`] runs.
    pub partition: Vec<u32>,
    /// Per worker: non-owned cells sharing at least one node with an owned
    /// cell, sorted.
    pub ghost_cells: Vec<Vec<u32>>,
    pub locator: CellGrid,
    /// z of the ground surface, cached by the generators (meshes are
    /// immutable once built).
    pub surface_z: f64,
}

impl Mesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn marker_id(&self, name: &str) -> Option<u16> {
        self.markers.iter().position(|m| m == name).map(|i| i as u16)
    }

    pub fn cell_nodes(&self, cell: usize) -> [[f64; 3]; 8] {
        let conn = &self.cells[cell];
        let mut out = [[0.0; 3]; 8];
        for a in 0..8 {
            out[a] = self.nodes[conn[a] as usize];
        }
        out
    }

    pub fn cell_centroid(&self, cell: usize) -> [f64; 3] {
        let nodes = self.cell_nodes(cell);
        let mut c = [0.0; 3];
        for n in &nodes {
            for d in 0..3 {
                c[d] += 0.125 * n[d];
            }
        }
        c
    }

    /// Volume by 2×2×2 Gauss quadrature (exact for trilinear cells).
    pub fn cell_volume(&self, cell: usize) -> f64 {
        let nodes = self.cell_nodes(cell);
        let gp = 1.0 / 3.0f64.sqrt();
        let mut vol = 0.0;
        for &gx in &[-gp, gp] {
            for &gy in &[-gp, gp] {
                for &gz in &[-gp, gp] {
                    vol += det3(&jacobian(&nodes, [gx, gy, gz]));
                }
            }
        }
        vol
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.cell_count()).map(|c| self.cell_volume(c)).sum()
    }

    pub fn bounding_box(&self) -> ([f64; 3], [f64; 3]) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for n in &self.nodes {
            for d in 0..3 {
                lo[d] = lo[d].min(n[d]);
                hi[d] = hi[d].max(n[d]);
            }
        }
        (lo, hi)
    }

    /// z of the ground surface (top of the model).
    pub fn surface_z(&self) -> f64 {
        self.surface_z
    }

    /// Depth of a node below the ground surface.
    pub fn node_depth(&self, node: usize) -> f64 {
        self.surface_z - self.nodes[node][2]
    }

    /// Sorted node ids lying on faces of a boundary marker.
    pub fn marker_nodes(&self, marker: u16) -> Vec<u32> {
        let mut nodes: Vec<u32> = self
            .boundary_faces
            .iter()
            .filter(|f| f.marker == marker)
            .flat_map(|f| self.face_nodes(f))
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        nodes
    }

    /// Global node ids of a boundary face, in face-local order.
    pub fn face_nodes(&self, face: &BoundaryFace) -> [u32; 4] {
        let conn = &self.cells[face.cell as usize];
        let local = HEX_FACES[face.local_face as usize];
        [
            conn[local[0]],
            conn[local[1]],
            conn[local[2]],
            conn[local[3]],
        ]
    }

    /// Checks that every cell has a positive Jacobian at all 2×2×2 Gauss
    /// points.
    pub fn validate_jacobians(&self) -> Result<()> {
        let gp = 1.0 / 3.0f64.sqrt();
        for cell in 0..self.cell_count() {
            let nodes = self.cell_nodes(cell);
            for &gx in &[-gp, gp] {
                for &gy in &[-gp, gp] {
                    for &gz in &[-gp, gp] {
                        let det = det3(&jacobian(&nodes, [gx, gy, gz]));
                        if det <= 0.0 {
                            return Err(Error::mesh(format!(
                                "cell {cell} has nonpositive Jacobian {det:.3e} at a quadrature point"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Node → incident cells adjacency, each list in increasing cell order.
    pub fn node_to_cells(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for (c, conn) in self.cells.iter().enumerate() {
            for &n in conn {
                let list: &mut Vec<u32> = &mut adj[n as usize];
                if list.last() != Some(&(c as u32)) {
                    list.push(c as u32);
                }
            }
        }
        adj
    }

    /// Marks nodes within `radius` of a pile axis and at most `length` below
    /// the surface. Creates one region per pile (`pile_0`, `pile_1`, ...)
    /// plus the union region `pile`; returns the per-pile node counts.
    pub fn mark_pile_regions(&mut self, piles: &[PileSpec]) -> Result<Vec<usize>> {
        let (lo, hi) = self.bounding_box();
        let z_top = hi[2];
        let tol = 1e-9 * (hi[2] - lo[2]).max(1.0);
        let mut max_radius = 0.0f64;
        for (i, pile) in piles.iter().enumerate() {
            let [cx, cy] = pile.center;
            if cx < lo[0] || cx > hi[0] || cy < lo[1] || cy > hi[1] {
                return Err(Error::config(format!(
                    "pile {i} at ({cx}, {cy}) lies outside the domain footprint \
                     [{:.3}, {:.3}] x [{:.3}, {:.3}]",
                    lo[0], hi[0], lo[1], hi[1]
                )));
            }
            max_radius = max_radius.max(pile.radius);
        }

        // Bucket piles so each node only checks its neighbourhood.
        let bucket = (2.0 * max_radius + tol).max(1e-6);
        let key = |x: f64, y: f64| ((x / bucket).floor() as i64, (y / bucket).floor() as i64);
        let mut grid: std::collections::HashMap<(i64, i64), Vec<usize>> =
            std::collections::HashMap::new();
        for (i, pile) in piles.iter().enumerate() {
            grid.entry(key(pile.center[0], pile.center[1])).or_default().push(i);
        }

        let mut marked: Vec<Vec<u32>> = vec![Vec::new(); piles.len()];
        for (n, pos) in self.nodes.iter().enumerate() {
            let (bx, by) = key(pos[0], pos[1]);
            let depth = z_top - pos[2];
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let Some(candidates) = grid.get(&(bx + dx, by + dy)) else {
                        continue;
                    };
                    for &i in candidates {
                        let pile = &piles[i];
                        let dist = ((pos[0] - pile.center[0]).powi(2)
                            + (pos[1] - pile.center[1]).powi(2))
                        .sqrt();
                        if dist <= pile.radius + tol && depth <= pile.length + tol {
                            marked[i].push(n as u32);
                        }
                    }
                }
            }
        }

        let mut counts = Vec::with_capacity(piles.len());
        let mut union: Vec<u32> = Vec::new();
        for (i, nodes) in marked.into_iter().enumerate() {
            if nodes.is_empty() {
                return Err(Error::config(format!(
                    "pile {i} at ({}, {}) captured no mesh nodes; the mesh is too coarse \
                     for pile radius {}",
                    piles[i].center[0], piles[i].center[1], piles[i].radius
                )));
            }
            counts.push(nodes.len());
            union.extend_from_slice(&nodes);
            self.node_regions.insert(format!("pile_{i}"), nodes);
        }
        union.sort_unstable();
        union.dedup();
        self.node_regions.insert("pile".to_string(), union);
        Ok(counts)
    }
}

/// Geometry of one energy pile: axis position, radius and length below the
/// surface.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PileSpec {
    pub center: [f64; 2],
    pub radius: f64,
    pub length: f64,
}

/// A straight sampling path along which fields are interpolated each
/// snapshot.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ObservationLine {
    pub name: String,
    pub start: [f64; 3],
    pub end: [f64; 3],
    pub sample_count: usize,
}

impl ObservationLine {
    pub fn validate(&self, mesh: &Mesh) -> Result<()> {
        if self.sample_count < 2 {
            return Err(Error::config(format!(
                "observation line '{}': sample_count must be at least 2",
                self.name
            )));
        }
        let len: f64 = (0..3)
            .map(|d| (self.end[d] - self.start[d]).powi(2))
            .sum::<f64>()
            .sqrt();
        if len == 0.0 {
            return Err(Error::config(format!(
                "observation line '{}' has zero length",
                self.name
            )));
        }
        let (lo, hi) = mesh.bounding_box();
        let tol = 1e-9 * (0..3).map(|d| hi[d] - lo[d]).fold(1.0f64, f64::max);
        for p in [&self.start, &self.end] {
            for d in 0..3 {
                if p[d] < lo[d] - tol || p[d] > hi[d] + tol {
                    return Err(Error::config(format!(
                        "observation line '{}' endpoint lies outside the mesh bounding box",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }
}

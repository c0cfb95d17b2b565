//! Global assembly of the implicit pressure and temperature systems and
//! boundary-condition application.
//!
//! Assembly runs in parallel over fixed-size cell blocks; block partials are
//! merged sequentially in block order, which replays the contributions in
//! global cell order. The assembled values are therefore bitwise identical
//! for any worker count, and rerunning with a fixed count reproduces them
//! exactly.

pub mod element;

pub use element::{element_matrices, quad_face_integrals, ElementMatrices, QuadRule};

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::mesh::Mesh;
use crate::physics::{darcy_velocity, FluidConstants, Material, Vec3};

use element::{element_integrals, element_supg_terms, CellGeometry};

/// Cells per parallel assembly block.
const CELL_BLOCK: usize = 256;

/// Shared sparsity pattern of the nodal Q1 systems plus the per-cell map
/// from local (a, b) pairs to CSR value slots. Built once per mesh; pressure
/// and temperature share it.
///
/// Degrees of freedom are node ids (no renumbering).
#[derive(Debug, Clone)]
pub struct DofStructure {
    pub n: usize,
    pub row_offsets: Arc<Vec<usize>>,
    pub col_indices: Arc<Vec<u32>>,
    cell_entries: Vec<[u32; 64]>,
}

impl DofStructure {
    pub fn build(mesh: &Mesh) -> DofStructure {
        let n = mesh.node_count();
        let adjacency = mesh.node_to_cells();
        // Node -> sorted set of coupled nodes (all nodes of incident cells).
        let rows: Vec<Vec<u32>> = (0..n)
            .into_par_iter()
            .map(|node| {
                let mut cols: Vec<u32> = adjacency[node]
                    .iter()
                    .flat_map(|&c| mesh.cells[c as usize].iter().copied())
                    .collect();
                cols.sort_unstable();
                cols.dedup();
                cols
            })
            .collect();
        let mut row_offsets = Vec::with_capacity(n + 1);
        row_offsets.push(0usize);
        let mut col_indices = Vec::new();
        for row in &rows {
            col_indices.extend_from_slice(row);
            row_offsets.push(col_indices.len());
        }
        let row_offsets = Arc::new(row_offsets);
        let col_indices = Arc::new(col_indices);

        let ro = Arc::clone(&row_offsets);
        let ci = Arc::clone(&col_indices);
        let cell_entries: Vec<[u32; 64]> = (0..mesh.cell_count())
            .into_par_iter()
            .map(|cell| {
                let conn = &mesh.cells[cell];
                let mut map = [0u32; 64];
                for a in 0..8 {
                    let row = conn[a] as usize;
                    let slice = &ci[ro[row]..ro[row + 1]];
                    for b in 0..8 {
                        let pos = slice
                            .binary_search(&conn[b])
                            .expect("cell node must appear in its own row pattern");
                        map[a * 8 + b] = (ro[row] + pos) as u32;
                    }
                }
                map
            })
            .collect();

        DofStructure {
            n,
            row_offsets,
            col_indices,
            cell_entries,
        }
    }

    pub fn nnz(&self) -> usize {
        self.col_indices.len()
    }
}

/// A Neumann flux on a boundary marker. Values are inflow-positive: a
/// positive pressure flux (m/s) injects water, a positive heat flux (W/m²)
/// injects heat. `depth_range` restricts application to faces whose centroid
/// depth lies within the closed interval.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryFlux {
    pub marker: u16,
    pub value: f64,
    pub depth_range: Option<(f64, f64)>,
}

/// One linear system of a time step, before or after constraint application.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Prescribed (dof, value) pairs, recorded at assembly and applied by
    /// [`apply_dirichlet`].
    pub dirichlet: Vec<(usize, f64)>,
    pub constrained: bool,
}

/// Per-material coefficient tables resolved once per assembly call.
struct Coefficients {
    mobility: Vec<f64>,
    b_poro: Vec<f64>,
    lambda: Vec<f64>,
    c_t: Vec<f64>,
}

impl Coefficients {
    fn resolve(mesh: &Mesh, materials: &[Material], fluid: &FluidConstants) -> Result<Coefficients> {
        if let Some(&id) = mesh.cell_material.iter().max() {
            if id as usize >= materials.len() {
                return Err(Error::config(format!(
                    "mesh references material id {id} but only {} materials are defined",
                    materials.len()
                )));
            }
        }
        let mut c = Coefficients {
            mobility: Vec::with_capacity(materials.len()),
            b_poro: Vec::with_capacity(materials.len()),
            lambda: Vec::with_capacity(materials.len()),
            c_t: Vec::with_capacity(materials.len()),
        };
        for m in materials {
            m.validate()?;
            c.mobility.push(m.mobility(fluid)?);
            c.b_poro.push(m.b_poro);
            c.lambda.push(m.effective_lambda());
            let ct = m.effective_heat_capacity(fluid);
            if ct <= 0.0 {
                return Err(Error::config(format!(
                    "material '{}' has nonpositive effective heat capacity",
                    m.name
                )));
            }
            c.c_t.push(ct);
        }
        Ok(c)
    }
}

fn gather(field: &[f64], conn: &[u32; 8]) -> [f64; 8] {
    let mut out = [0.0; 8];
    for a in 0..8 {
        out[a] = field[conn[a] as usize];
    }
    out
}

/// Runs `per_cell` over all cells in fixed blocks and merges the partials in
/// block order into a matrix over `structure` plus a right-hand side.
fn assemble_cells<F>(
    mesh: &Mesh,
    structure: &DofStructure,
    symmetric: bool,
    per_cell: F,
) -> (CsrMatrix, Vec<f64>)
where
    F: Fn(usize) -> ([f64; 64], [f64; 8]) + Sync,
{
    let ncells = mesh.cell_count();
    let nblocks = ncells.div_ceil(CELL_BLOCK).max(1);
    type BlockPartial = (Vec<[f64; 64]>, Vec<[f64; 8]>);
    let partials: Vec<BlockPartial> = (0..nblocks)
        .into_par_iter()
        .map(|blk| {
            let start = blk * CELL_BLOCK;
            let end = (start + CELL_BLOCK).min(ncells);
            let mut mats = Vec::with_capacity(end.saturating_sub(start));
            let mut loads = Vec::with_capacity(end.saturating_sub(start));
            for cell in start..end {
                let (m, r) = per_cell(cell);
                mats.push(m);
                loads.push(r);
            }
            (mats, loads)
        })
        .collect();

    let mut matrix = CsrMatrix::zeros_from_pattern(
        structure.n,
        structure.n,
        Arc::clone(&structure.row_offsets),
        Arc::clone(&structure.col_indices),
        symmetric,
    );
    let mut rhs = vec![0.0; structure.n];
    let values = matrix.values_mut();
    for (blk, (mats, loads)) in partials.iter().enumerate() {
        let start = blk * CELL_BLOCK;
        for (i, (m, r)) in mats.iter().zip(loads).enumerate() {
            let cell = start + i;
            let entries = &structure.cell_entries[cell];
            for e in 0..64 {
                values[entries[e] as usize] += m[e];
            }
            let conn = &mesh.cells[cell];
            for a in 0..8 {
                rhs[conn[a] as usize] += r[a];
            }
        }
    }
    (matrix, rhs)
}

/// Adds `scale(cell) * flux * ∫N dA` to the rhs over every boundary face of
/// the flux marker (sequential, in face order).
fn apply_boundary_fluxes(
    mesh: &Mesh,
    rhs: &mut [f64],
    fluxes: &[BoundaryFlux],
    scale: impl Fn(usize) -> f64,
) {
    if fluxes.is_empty() {
        return;
    }
    let surface = mesh.surface_z();
    for face in &mesh.boundary_faces {
        for flux in fluxes {
            if face.marker != flux.marker {
                continue;
            }
            let nodes = mesh.face_nodes(face);
            if let Some((d0, d1)) = flux.depth_range {
                let mut depth = 0.0;
                for &n in &nodes {
                    depth += 0.25 * (surface - mesh.nodes[n as usize][2]);
                }
                if depth < d0 || depth > d1 {
                    continue;
                }
            }
            let corners = [
                mesh.nodes[nodes[0] as usize],
                mesh.nodes[nodes[1] as usize],
                mesh.nodes[nodes[2] as usize],
                mesh.nodes[nodes[3] as usize],
            ];
            let integrals = quad_face_integrals(&corners);
            let s = scale(face.cell as usize) * flux.value;
            for a in 0..4 {
                rhs[nodes[a] as usize] += s * integrals[a];
            }
        }
    }
}

/// Assembles the implicit pressure system
/// `(M + h·k·B·A)·P_next = M·P_prev + h·B·(inflow flux term) − h·k·B·ρ_w·g·L_z`
/// with per-cell coefficients. Dirichlet pairs are recorded, not yet applied.
#[allow(clippy::too_many_arguments)]
pub fn assemble_pressure(
    mesh: &Mesh,
    structure: &DofStructure,
    materials: &[Material],
    fluid: &FluidConstants,
    p_prev: &[f64],
    h: f64,
    fluxes: &[BoundaryFlux],
    dirichlet: Vec<(usize, f64)>,
) -> Result<AssembledSystem> {
    if h <= 0.0 {
        return Err(Error::config(format!("time step must be positive, got {h}")));
    }
    if p_prev.len() != structure.n {
        return Err(Error::config("pressure state size does not match dof count".to_string()));
    }
    let coeff = Coefficients::resolve(mesh, materials, fluid)?;
    let rule = QuadRule::gauss(2)?;
    let rho_g = fluid.rho_w * fluid.g;

    let (matrix, mut rhs) = assemble_cells(mesh, structure, true, |cell| {
        let nodes = mesh.cell_nodes(cell);
        let geo = CellGeometry::new(&nodes, &rule)
            .unwrap_or_else(|| panic!("cell {cell} has nonpositive Jacobian"));
        let e = element_integrals(&geo, None);
        let mat = mesh.cell_material[cell] as usize;
        let hkb = h * coeff.mobility[mat] * coeff.b_poro[mat];
        let p_local = gather(p_prev, &mesh.cells[cell]);
        let mut lhs = [0.0; 64];
        let mut load = [0.0; 8];
        for a in 0..8 {
            let mut mp = 0.0;
            for b in 0..8 {
                let idx = a * 8 + b;
                lhs[idx] = e.mass[idx] + hkb * e.stiffness[idx];
                mp += e.mass[idx] * p_local[b];
            }
            load[a] = mp - hkb * rho_g * e.load[a];
        }
        (lhs, load)
    });

    apply_boundary_fluxes(mesh, &mut rhs, fluxes, |cell| {
        h * coeff.b_poro[mesh.cell_material[cell] as usize]
    });

    Ok(AssembledSystem {
        matrix,
        rhs,
        dirichlet,
        constrained: false,
    })
}

/// Assembles the implicit temperature system
/// `(M + h·λ/c_T·A + h·c_w/c_T·C(q))·T_next = M·T_prev + h/c_T·(heat flux term)`
/// with the Darcy velocity evaluated from `p_next` at each quadrature point
/// (one-way coupling). With `supg` set, streamline stabilization modifies the
/// test functions of the mass and advection terms.
#[allow(clippy::too_many_arguments)]
pub fn assemble_temperature(
    mesh: &Mesh,
    structure: &DofStructure,
    materials: &[Material],
    fluid: &FluidConstants,
    t_prev: &[f64],
    p_next: &[f64],
    h: f64,
    fluxes: &[BoundaryFlux],
    dirichlet: Vec<(usize, f64)>,
    supg: bool,
) -> Result<AssembledSystem> {
    if h <= 0.0 {
        return Err(Error::config(format!("time step must be positive, got {h}")));
    }
    if t_prev.len() != structure.n || p_next.len() != structure.n {
        return Err(Error::config("state size does not match dof count".to_string()));
    }
    let coeff = Coefficients::resolve(mesh, materials, fluid)?;
    let rule = QuadRule::gauss(2)?;

    let (mut matrix, mut rhs) = assemble_cells(mesh, structure, false, |cell| {
        let nodes = mesh.cell_nodes(cell);
        let geo = CellGeometry::new(&nodes, &rule)
            .unwrap_or_else(|| panic!("cell {cell} has nonpositive Jacobian"));
        let mat = mesh.cell_material[cell] as usize;
        let mobility = coeff.mobility[mat];
        let retard = fluid.c_w / coeff.c_t[mat];
        let conn = &mesh.cells[cell];
        let p_local = gather(p_next, conn);
        let t_local = gather(t_prev, conn);

        // Retarded advection velocity (c_w/c_T)·q at every quadrature point.
        let mut v_th: Vec<Vec3> = Vec::with_capacity(rule.len());
        for q in 0..rule.len() {
            let grad_p = geo.field_gradient(q, &p_local);
            let q_darcy = darcy_velocity(mobility, grad_p, fluid);
            v_th.push([retard * q_darcy[0], retard * q_darcy[1], retard * q_darcy[2]]);
        }

        let e = element_integrals(&geo, Some(&v_th));
        let alpha = coeff.lambda[mat] / coeff.c_t[mat];
        let mut lhs = [0.0; 64];
        let mut mass = e.mass;
        if supg {
            let (ms, cs) = element_supg_terms(&geo, &v_th, alpha);
            for i in 0..64 {
                mass[i] += ms[i];
                lhs[i] = h * cs[i];
            }
        }
        let mut load = [0.0; 8];
        for a in 0..8 {
            let mut mt = 0.0;
            for b in 0..8 {
                let idx = a * 8 + b;
                lhs[idx] += mass[idx] + h * alpha * e.stiffness[idx] + h * e.advection[idx];
                mt += mass[idx] * t_local[b];
            }
            load[a] = mt;
        }
        (lhs, load)
    });
    // Advection makes the operator nonsymmetric; the flag only routes solver
    // choice and Matrix Market output.
    matrix.set_symmetric(false);

    apply_boundary_fluxes(mesh, &mut rhs, fluxes, |cell| {
        h / coeff.c_t[mesh.cell_material[cell] as usize]
    });

    Ok(AssembledSystem {
        matrix,
        rhs,
        dirichlet,
        constrained: false,
    })
}

/// Per-cell Darcy velocity (quadrature average) from a pressure field.
pub fn compute_cell_velocities(
    mesh: &Mesh,
    materials: &[Material],
    fluid: &FluidConstants,
    p: &[f64],
) -> Result<Vec<Vec3>> {
    let coeff = Coefficients::resolve(mesh, materials, fluid)?;
    let rule = QuadRule::gauss(2)?;
    let velocities: Vec<Vec3> = (0..mesh.cell_count())
        .into_par_iter()
        .map(|cell| {
            let nodes = mesh.cell_nodes(cell);
            let geo = CellGeometry::new(&nodes, &rule)
                .unwrap_or_else(|| panic!("cell {cell} has nonpositive Jacobian"));
            let mobility = coeff.mobility[mesh.cell_material[cell] as usize];
            let p_local = gather(p, &mesh.cells[cell]);
            let mut avg = [0.0; 3];
            for q in 0..rule.len() {
                let grad_p = geo.field_gradient(q, &p_local);
                let qv = darcy_velocity(mobility, grad_p, fluid);
                for d in 0..3 {
                    avg[d] += qv[d];
                }
            }
            let inv = 1.0 / rule.len() as f64;
            [avg[0] * inv, avg[1] * inv, avg[2] * inv]
        })
        .collect();
    Ok(velocities)
}

/// Applies the recorded Dirichlet constraints: constrained rows become
/// identity rows with the prescribed rhs. With `symmetrize`, constrained
/// columns are eliminated into the rhs first so a symmetric matrix stays
/// symmetric.
pub fn apply_dirichlet(system: &mut AssembledSystem, symmetrize: bool) -> Result<()> {
    let n = system.matrix.n_rows();
    let mut pairs = system.dirichlet.clone();
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    for w in pairs.windows(2) {
        if w[0].0 == w[1].0 {
            let (dof, a) = w[0];
            let b = w[1].1;
            if (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::config(format!(
                    "conflicting Dirichlet values at dof {dof}: {a} vs {b}"
                )));
            }
        }
    }
    pairs.dedup_by_key(|p| p.0);
    let mut constrained = vec![false; n];
    for &(dof, _) in &pairs {
        if dof >= n {
            return Err(Error::config(format!("Dirichlet dof {dof} out of range")));
        }
        constrained[dof] = true;
    }

    if symmetrize {
        // Move constrained columns to the rhs. Column c's nonzero rows are
        // row c's nonzero columns (the pattern is structurally symmetric).
        for &(c, v) in &pairs {
            let lo = system.matrix.row_offsets()[c];
            let hi = system.matrix.row_offsets()[c + 1];
            let cols: Vec<usize> = system.matrix.col_indices()[lo..hi]
                .iter()
                .map(|&j| j as usize)
                .collect();
            for j in cols {
                if j == c || constrained[j] {
                    continue;
                }
                if let Some(entry) = system.matrix.find_entry(j, c) {
                    let a = system.matrix.values()[entry];
                    system.rhs[j] -= a * v;
                    system.matrix.values_mut()[entry] = 0.0;
                }
            }
        }
    }

    for &(c, v) in &pairs {
        let lo = system.matrix.row_offsets()[c];
        let hi = system.matrix.row_offsets()[c + 1];
        for k in lo..hi {
            system.matrix.values_mut()[k] = 0.0;
        }
        let diag = system
            .matrix
            .find_entry(c, c)
            .expect("pattern always contains the diagonal");
        system.matrix.values_mut()[diag] = 1.0;
        system.rhs[c] = v;
    }

    system.dirichlet = pairs;
    system.constrained = true;
    Ok(())
}

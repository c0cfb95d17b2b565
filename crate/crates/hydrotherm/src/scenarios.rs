//! Declarative scenario configs, the builders for the two reference studies
//! (hot-water injection into a confined aquifer, and an energy-pile field in
//! layered bay sediments), and the config-to-simulation resolution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{
    generate_tensor_box, generate_wedge, Mesh, ObservationLine, PileSpec, WedgeSpec,
};
use crate::physics::{FluidConstants, Material};
use crate::sim::schedule::{default_surface_table, pile_square_wave, Schedule};
use crate::sim::{
    initial_pressure_field, BcSet, InitialConditions, PressureInit, Simulation, SolverConfig,
    TemperatureDirichlet, TimeControls,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometrySpec {
    /// Tensor-product box `[0, lx] × [0, ly] × [0, lz]`, z up, surface at
    /// z = lz. Extra planes refine around piles and observation depths.
    Box {
        lx: f64,
        ly: f64,
        lz: f64,
        nx: usize,
        ny: usize,
        nz: usize,
        #[serde(default)]
        extra_x_planes: Vec<f64>,
        #[serde(default)]
        extra_y_planes: Vec<f64>,
        /// Depths below the surface at which a mesh plane is forced.
        #[serde(default)]
        extra_z_depths: Vec<f64>,
    },
    Wedge(WedgeSpec),
}

impl GeometrySpec {
    pub fn domain_depth(&self) -> f64 {
        match self {
            GeometrySpec::Box { lz, .. } => *lz,
            GeometrySpec::Wedge(w) => w.depth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerSpec {
    pub name: String,
    pub thickness_m: f64,
    pub material: Material,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PressureBc {
    /// Pin marker nodes to their initial pressure values.
    Initial { marker: String },
    /// Hydrostatic from the surface water table plus a constant offset.
    Hydrostatic {
        marker: String,
        #[serde(default)]
        offset_pa: f64,
    },
    /// Inflow-positive volumetric flux, m/s.
    Flux {
        marker: String,
        inflow_m_per_s: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        depth_range_m: Option<(f64, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TemperatureBc {
    /// Prescribed temperature on a boundary marker or a named node region.
    /// Earlier list entries win on shared nodes.
    Dirichlet {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        marker: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        region: Option<String>,
        schedule: Schedule,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        depth_range_m: Option<(f64, f64)>,
    },
    /// Inflow-positive heat flux, W/m².
    Flux { marker: String, value_w_per_m2: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PileField {
    pub radius_m: f64,
    pub length_m: f64,
    pub centers: Vec<[f64; 2]>,
    pub schedule: Schedule,
}

/// A complete, serializable description of one simulation study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub geometry: GeometrySpec,
    /// Layers listed top-down; thicknesses must sum to the domain depth.
    pub layers: Vec<LayerSpec>,
    #[serde(default)]
    pub fluid: FluidConstants,
    pub initial: InitialConditions,
    #[serde(default)]
    pub pressure_bcs: Vec<PressureBc>,
    #[serde(default)]
    pub temperature_bcs: Vec<TemperatureBc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub piles: Option<PileField>,
    /// Width of the submerged margin ring on the top surface; splits the
    /// `top` marker nodes into `top_island` and `top_margin` regions.
    #[serde(default)]
    pub island_margin_m: f64,
    #[serde(default)]
    pub observation_lines: Vec<ObservationLine>,
    pub time: TimeControls,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Default worker count (CLI flags and the environment override it).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

/// One resolved layer: material name and its depth interval.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerDepth {
    pub name: String,
    pub top_depth_m: f64,
    pub bottom_depth_m: f64,
}

/// Resolves the layer stack into absolute depth intervals.
pub fn layer_stack_depths(config: &ScenarioConfig) -> Result<Vec<LayerDepth>> {
    let depth = config.geometry.domain_depth();
    let total: f64 = config.layers.iter().map(|l| l.thickness_m).sum();
    if (total - depth).abs() > 1e-9 * depth.max(1.0) {
        return Err(Error::config(format!(
            "layer thicknesses sum to {total} m but the domain is {depth} m deep"
        )));
    }
    let mut out = Vec::with_capacity(config.layers.len());
    let mut top = 0.0;
    for layer in &config.layers {
        out.push(LayerDepth {
            name: layer.name.clone(),
            top_depth_m: top,
            bottom_depth_m: top + layer.thickness_m,
        });
        top += layer.thickness_m;
    }
    Ok(out)
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::config("scenario needs at least one layer".to_string()));
        }
        layer_stack_depths(self)?;
        self.fluid.validate()?;
        for layer in &self.layers {
            layer.material.validate()?;
            layer.material.mobility(&self.fluid)?;
        }
        self.time.validate()?;
        if !(self.solver.tolerance > 0.0 && self.solver.tolerance < 1.0) {
            return Err(Error::config(format!(
                "solver tolerance must lie in (0, 1), got {}",
                self.solver.tolerance
            )));
        }
        for bc in &self.temperature_bcs {
            match bc {
                TemperatureBc::Dirichlet {
                    marker,
                    region,
                    schedule,
                    ..
                } => {
                    schedule.validate()?;
                    if marker.is_some() == region.is_some() {
                        return Err(Error::config(
                            "temperature Dirichlet needs exactly one of `marker` or `region`"
                                .to_string(),
                        ));
                    }
                }
                TemperatureBc::Flux { .. } => {}
            }
        }
        if let Some(piles) = &self.piles {
            piles.schedule.validate()?;
            if !(piles.radius_m > 0.0 && piles.length_m > 0.0) {
                return Err(Error::config("pile radius and length must be positive".to_string()));
            }
            if piles.centers.is_empty() {
                return Err(Error::config("pile field lists no pile centers".to_string()));
            }
        }
        Ok(())
    }

    /// Depths of the internal layer interfaces (top-down, excluding the
    /// domain bottom).
    pub fn interface_depths(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut depth = 0.0;
        for layer in &self.layers[..self.layers.len() - 1] {
            depth += layer.thickness_m;
            out.push(depth);
        }
        out
    }

    pub fn materials(&self) -> Vec<Material> {
        self.layers.iter().map(|l| l.material.clone()).collect()
    }

    fn build_mesh(&self) -> Result<Mesh> {
        let interfaces = self.interface_depths();
        match &self.geometry {
            GeometrySpec::Box {
                lx,
                ly,
                lz,
                nx,
                ny,
                nz,
                extra_x_planes,
                extra_y_planes,
                extra_z_depths,
            } => {
                if *nx < 1 || *ny < 1 || *nz < 1 {
                    return Err(Error::config("box resolution must be at least 1 per axis".to_string()));
                }
                let axis = |n: usize, len: f64, extra: &[f64], what: &str| -> Result<Vec<f64>> {
                    let mut planes: Vec<f64> =
                        (0..=n).map(|i| len * i as f64 / n as f64).collect();
                    for &p in extra {
                        if p <= 0.0 || p >= len {
                            return Err(Error::config(format!(
                                "extra {what} plane at {p} m lies outside (0, {len})"
                            )));
                        }
                        planes.push(p);
                    }
                    planes.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    planes.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * len.max(1.0));
                    Ok(planes)
                };
                let xs = axis(*nx, *lx, extra_x_planes, "x")?;
                let ys = axis(*ny, *ly, extra_y_planes, "y")?;
                let z_extras: Vec<f64> = extra_z_depths
                    .iter()
                    .chain(interfaces.iter())
                    .map(|d| lz - d)
                    .collect();
                let zs = axis(*nz, *lz, &z_extras, "z")?;
                generate_tensor_box(&xs, &ys, &zs, &interfaces)
            }
            GeometrySpec::Wedge(spec) => generate_wedge(spec, &interfaces),
        }
    }

    /// Generates the mesh, resolves markers/regions/schedules and returns a
    /// runnable simulation.
    pub fn to_simulation(&self, workers: usize) -> Result<Simulation> {
        self.validate()?;
        let mut mesh = self.build_mesh()?;

        if let Some(field) = &self.piles {
            let specs: Vec<PileSpec> = field
                .centers
                .iter()
                .map(|&center| PileSpec {
                    center,
                    radius: field.radius_m,
                    length: field.length_m,
                })
                .collect();
            mesh.mark_pile_regions(&specs)?;
        }

        if self.island_margin_m > 0.0 {
            let (lo, hi) = mesh.bounding_box();
            let m = self.island_margin_m;
            let top = mesh
                .marker_id("top")
                .ok_or_else(|| Error::config("island margin needs a `top` marker".to_string()))?;
            let mut island = Vec::new();
            let mut margin = Vec::new();
            for node in mesh.marker_nodes(top) {
                let p = mesh.nodes[node as usize];
                let inside = p[0] >= lo[0] + m
                    && p[0] <= hi[0] - m
                    && p[1] >= lo[1] + m
                    && p[1] <= hi[1] - m;
                if inside {
                    island.push(node);
                } else {
                    margin.push(node);
                }
            }
            mesh.node_regions.insert("top_island".to_string(), island);
            mesh.node_regions.insert("top_margin".to_string(), margin);
        }

        let marker = |name: &str| -> Result<u16> {
            mesh.marker_id(name).ok_or_else(|| {
                Error::config(format!(
                    "boundary marker '{name}' does not exist (available: {})",
                    mesh.markers.join(", ")
                ))
            })
        };

        let initial_p = initial_pressure_field(&mesh, &self.fluid, &self.initial);
        let mut bcs = BcSet::default();
        let mut pinned = vec![false; mesh.node_count()];
        for bc in &self.pressure_bcs {
            match bc {
                PressureBc::Initial { marker: name } => {
                    for node in mesh.marker_nodes(marker(name)?) {
                        if !pinned[node as usize] {
                            pinned[node as usize] = true;
                            bcs.pressure_dirichlet
                                .push((node as usize, initial_p[node as usize]));
                        }
                    }
                }
                PressureBc::Hydrostatic {
                    marker: name,
                    offset_pa,
                } => {
                    for node in mesh.marker_nodes(marker(name)?) {
                        if !pinned[node as usize] {
                            pinned[node as usize] = true;
                            let depth = mesh.node_depth(node as usize);
                            bcs.pressure_dirichlet.push((
                                node as usize,
                                self.fluid.rho_w * self.fluid.g * depth + offset_pa,
                            ));
                        }
                    }
                }
                PressureBc::Flux {
                    marker: name,
                    inflow_m_per_s,
                    depth_range_m,
                } => {
                    bcs.pressure_fluxes.push(crate::fem::BoundaryFlux {
                        marker: marker(name)?,
                        value: *inflow_m_per_s,
                        depth_range: *depth_range_m,
                    });
                }
            }
        }

        for bc in &self.temperature_bcs {
            match bc {
                TemperatureBc::Dirichlet {
                    marker: marker_name,
                    region,
                    schedule,
                    depth_range_m,
                } => {
                    let mut nodes = if let Some(name) = marker_name {
                        mesh.marker_nodes(marker(name)?)
                    } else {
                        let name = region.as_ref().expect("validated");
                        mesh.node_regions
                            .get(name)
                            .ok_or_else(|| {
                                Error::config(format!("node region '{name}' does not exist"))
                            })?
                            .clone()
                    };
                    if let Some((d0, d1)) = depth_range_m {
                        nodes.retain(|&n| {
                            let d = mesh.node_depth(n as usize);
                            d >= *d0 && d <= *d1
                        });
                    }
                    bcs.temperature_dirichlet.push(TemperatureDirichlet {
                        nodes,
                        schedule: schedule.clone(),
                    });
                }
                TemperatureBc::Flux {
                    marker: name,
                    value_w_per_m2,
                } => {
                    bcs.heat_fluxes.push(crate::fem::BoundaryFlux {
                        marker: marker(name)?,
                        value: *value_w_per_m2,
                        depth_range: None,
                    });
                }
            }
        }

        for line in &self.observation_lines {
            line.validate(&mesh)?;
        }

        Simulation::new(
            mesh,
            self.materials(),
            self.fluid.clone(),
            bcs,
            self.initial.clone(),
            self.time,
            self.solver,
            workers,
        )
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json_str(text: &str) -> Result<ScenarioConfig> {
        serde_json::from_str(text)
            .map_err(|e| Error::config(format!("could not parse scenario config: {e}")))
    }
}

/// Resolution presets for the injection benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtesPreset {
    /// Runs in seconds; radial grading keeps the near-well cell Peclet
    /// number moderate.
    Coarse,
    /// Matches the reference model's dof count (~284k combined).
    PaperLike,
}

/// Hot-water injection into a confined aquifer: a 2°-wedge of a 20 m × 300 m
/// axisymmetric model with three layers, wellbore injection over the aquifer
/// interval, and a 180-day duration.
pub fn build_ates_benchmark(preset: AtesPreset) -> ScenarioConfig {
    let (n_r, n_z, grading) = match preset {
        AtesPreset::Coarse => (110, 60, 1.05),
        AtesPreset::PaperLike => (280, 252, 1.02),
    };
    let day = 86400.0;
    let impermeable =
        |name: &str| Material::direct(name, 1.2, 1.2e6, 1e-10, 1e5).expect("valid material");
    ScenarioConfig {
        name: "ates-benchmark".to_string(),
        geometry: GeometrySpec::Wedge(WedgeSpec {
            radius: 20.0,
            well_radius: 0.1,
            depth: 300.0,
            wedge_angle_deg: 2.0,
            grading,
            n_r,
            n_z,
        }),
        layers: vec![
            LayerSpec {
                name: "caprock".to_string(),
                thickness_m: 100.0,
                material: impermeable("caprock (impermeable)"),
            },
            LayerSpec {
                name: "aquifer".to_string(),
                thickness_m: 100.0,
                material: Material::direct("aquifer", 1.2, 1.2e6, 1e-6, 1e5).expect("valid material"),
            },
            LayerSpec {
                name: "basement".to_string(),
                thickness_m: 100.0,
                material: impermeable("basement (impermeable)"),
            },
        ],
        fluid: FluidConstants::default(),
        initial: InitialConditions {
            surface_temperature_k: 278.15,
            temperature_gradient_k_per_m: 0.05,
            pile_temperature_k: None,
            pressure: PressureInit::Uniform { value_pa: 1.0e5 },
            lateral_pressure_offset_pa: 0.0,
        },
        pressure_bcs: vec![
            PressureBc::Initial {
                marker: "outer".to_string(),
            },
            PressureBc::Flux {
                marker: "wellbore".to_string(),
                inflow_m_per_s: 0.001,
                depth_range_m: Some((100.0, 200.0)),
            },
        ],
        temperature_bcs: vec![
            TemperatureBc::Dirichlet {
                marker: Some("wellbore".to_string()),
                region: None,
                schedule: Schedule::Constant { value: 288.15 },
                depth_range_m: Some((100.0, 200.0)),
            },
            TemperatureBc::Dirichlet {
                marker: Some("top".to_string()),
                region: None,
                schedule: Schedule::Constant { value: 278.15 },
                depth_range_m: None,
            },
        ],
        piles: None,
        island_margin_m: 0.0,
        observation_lines: vec![
            ObservationLine {
                name: "aquifer-radial".to_string(),
                start: [0.12, 0.0, 150.0],
                end: [19.9, 0.0, 150.0],
                sample_count: 128,
            },
            ObservationLine {
                name: "wellbore-vertical".to_string(),
                start: [1.0, 0.0, 300.0],
                end: [1.0, 0.0, 0.0],
                sample_count: 151,
            },
        ],
        time: TimeControls {
            step_s: day,
            t_end_s: 180.0 * day,
            snapshot_every: 30,
        },
        solver: SolverConfig {
            tolerance: 1e-10,
            max_iter_factor: 10,
            supg: false,
        },
        workers: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PileFieldScale {
    /// 3×3 piles in a 200 × 200 × 100 m box; minutes on a laptop.
    Desk,
    /// 1130 piles across the island footprint with its submerged margin.
    Full,
}

fn bay_layers() -> Vec<LayerSpec> {
    let layer = |name: &str, thickness: f64, k: f64, c_t: f64, lambda: f64| LayerSpec {
        name: name.to_string(),
        thickness_m: thickness,
        material: Material::direct(name, lambda, c_t, k, 1.0e5).expect("valid material"),
    };
    vec![
        layer("fill", 10.0, 1.1e-5, 2.5e6, 2.2),
        layer("shoal", 5.0, 3.5e-5, 2.5e6, 2.2),
        layer("young-bay-mud", 25.0, 1.7e-9, 3.5e6, 1.5),
        layer("old-bay-mud", 35.0, 1.7e-9, 3.5e6, 1.7),
        layer("franciscan", 25.0, 1.0e-6, 2.0e6, 2.97),
    ]
}

/// Pile positions for the full-scale island: a 20 m grid clipped to
/// rectangular building-footprint approximations, truncated to exactly 1130
/// piles in row-major order.
fn island_pile_grid(margin: f64) -> Vec<[f64; 2]> {
    let rects: [[f64; 4]; 2] = [
        // island-local [x0, x1, y0, y1]
        [100.0, 500.0, 100.0, 700.0],
        [520.0, 900.0, 200.0, 800.0],
    ];
    let mut centers = Vec::new();
    for [x0, x1, y0, y1] in rects {
        let mut y = y0;
        while y <= y1 + 1e-9 {
            let mut x = x0;
            while x <= x1 + 1e-9 {
                centers.push([margin + x, margin + y]);
                x += 20.0;
            }
            y += 20.0;
        }
    }
    centers.truncate(1130);
    centers
}

/// A square grid of energy piles in layered bay sediments: seasonal
/// square-wave pile temperature, monthly surface temperature, a constant
/// bottom heat flux and a lateral hydraulic gradient.
pub fn build_pile_field(scale: PileFieldScale) -> ScenarioConfig {
    let day = 86400.0;
    let (name, lx, ly, margin, centers, lateral_offset, nx, ny) = match scale {
        PileFieldScale::Desk => {
            let mut centers = Vec::new();
            for &cx in &[80.0, 100.0, 120.0] {
                for &cy in &[80.0, 100.0, 120.0] {
                    centers.push([cx, cy]);
                }
            }
            // 5 Pa/m across the 200 m span.
            ("pile-field-desk", 200.0, 200.0, 0.0, centers, 1000.0, 28, 28)
        }
        PileFieldScale::Full => {
            let margin = 45.7;
            let lx = 1680.0 + 2.0 * margin;
            let ly = 1040.0 + 2.0 * margin;
            // 8.5 kPa between the lateral boundaries.
            ("pile-field-full", lx, ly, margin, island_pile_grid(margin), 8500.0, 44, 28)
        }
    };

    let mut extra_x = Vec::new();
    let mut extra_y = Vec::new();
    for c in &centers {
        extra_x.push(c[0]);
        extra_y.push(c[1]);
    }
    // Refinement planes around the desk piles keep the near-pile cells
    // small; at full scale the pile planes themselves are the refinement.
    if matches!(scale, PileFieldScale::Desk) {
        for c in [80.0, 100.0, 120.0] {
            extra_x.extend([c - 2.0, c + 2.0]);
            extra_y.extend([c - 2.0, c + 2.0]);
        }
    }
    extra_x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    extra_x.dedup();
    extra_y.sort_by(|a, b| a.partial_cmp(b).unwrap());
    extra_y.dedup();

    let reference = centers[0];
    let observation_lines = vec![
        ObservationLine {
            name: "O-1".to_string(),
            start: [reference[0] - 1.0, reference[1], 100.0],
            end: [reference[0] - 1.0, reference[1], 0.0],
            sample_count: 51,
        },
        ObservationLine {
            name: "O-2".to_string(),
            start: [reference[0] - 5.0, reference[1], 100.0],
            end: [reference[0] - 5.0, reference[1], 0.0],
            sample_count: 51,
        },
        ObservationLine {
            name: "O-3".to_string(),
            start: [reference[0] - 10.0, reference[1], 100.0],
            end: [reference[0] - 10.0, reference[1], 0.0],
            sample_count: 51,
        },
        ObservationLine {
            name: "Q-4".to_string(),
            start: [reference[0], reference[1], 94.0],
            end: [reference[0] + 20.0, reference[1], 94.0],
            sample_count: 41,
        },
        ObservationLine {
            name: "Q-5".to_string(),
            start: [reference[0], reference[1], 60.0],
            end: [reference[0] + 20.0, reference[1], 60.0],
            sample_count: 41,
        },
        ObservationLine {
            name: "Q-6".to_string(),
            start: [reference[0], reference[1], 40.0],
            end: [reference[0] + 20.0, reference[1], 40.0],
            sample_count: 41,
        },
    ];

    let mut temperature_bcs = vec![TemperatureBc::Dirichlet {
        marker: None,
        region: Some("pile".to_string()),
        schedule: pile_square_wave(),
        depth_range_m: None,
    }];
    if matches!(scale, PileFieldScale::Full) {
        temperature_bcs.push(TemperatureBc::Dirichlet {
            marker: None,
            region: Some("top_island".to_string()),
            schedule: default_surface_table(),
            depth_range_m: None,
        });
        temperature_bcs.push(TemperatureBc::Dirichlet {
            marker: None,
            region: Some("top_margin".to_string()),
            schedule: Schedule::Constant { value: 287.45 },
            depth_range_m: None,
        });
    } else {
        temperature_bcs.push(TemperatureBc::Dirichlet {
            marker: Some("top".to_string()),
            region: None,
            schedule: default_surface_table(),
            depth_range_m: None,
        });
    }
    temperature_bcs.push(TemperatureBc::Flux {
        marker: "bottom".to_string(),
        value_w_per_m2: 0.89,
    });

    ScenarioConfig {
        name: name.to_string(),
        geometry: GeometrySpec::Box {
            lx,
            ly,
            lz: 100.0,
            nx,
            ny,
            nz: 25,
            extra_x_planes: extra_x,
            extra_y_planes: extra_y,
            extra_z_depths: vec![6.0, 60.0],
        },
        layers: bay_layers(),
        fluid: FluidConstants::default(),
        initial: InitialConditions {
            surface_temperature_k: 287.65,
            temperature_gradient_k_per_m: 0.03,
            pile_temperature_k: Some(288.55),
            pressure: PressureInit::Hydrostatic { surface_pa: 0.0 },
            lateral_pressure_offset_pa: lateral_offset,
        },
        pressure_bcs: vec![
            PressureBc::Hydrostatic {
                marker: "xmin".to_string(),
                offset_pa: 0.0,
            },
            PressureBc::Hydrostatic {
                marker: "xmax".to_string(),
                offset_pa: lateral_offset,
            },
        ],
        temperature_bcs,
        piles: Some(PileField {
            radius_m: 0.75,
            length_m: 60.0,
            centers,
            schedule: pile_square_wave(),
        }),
        island_margin_m: margin,
        observation_lines,
        time: TimeControls {
            step_s: 5.0 * day,
            t_end_s: 365.0 * day,
            snapshot_every: 6,
        },
        solver: SolverConfig::default(),
        workers: None,
    }
}

//! The built-in analytical verification suite behind `hydrotherm verify`:
//! closed-form oracles exercised on small meshes, each reported as a single
//! pass/fail line.

use hydrotherm::mesh::generate_layered_box;
use hydrotherm::physics::{FluidConstants, Material};
use hydrotherm::scenarios::{build_ates_benchmark, AtesPreset, PressureBc, TemperatureBc};
use hydrotherm::sim::schedule::pile_square_wave;
use hydrotherm::sim::{
    evaluate_schedule, BcSet, InitialConditions, PressureInit, Schedule, Simulation, SolverConfig,
    State, TemperatureDirichlet, TimeControls,
};

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub fn run_all() -> Vec<Check> {
    vec![
        hydrostatic_fixed_point(),
        transient_conduction_erfc(),
        layered_darcy_column(),
        thermal_retardation(),
        convergence_orders(),
        square_wave_schedule(),
    ]
}

fn formation() -> Material {
    Material::direct("formation", 1.2, 1.2e6, 1e-6, 1e5).expect("valid material")
}

fn tight() -> SolverConfig {
    SolverConfig {
        tolerance: 1e-12,
        max_iter_factor: 20,
        supg: false,
    }
}

fn controls(step_s: f64, steps: usize) -> TimeControls {
    TimeControls {
        step_s,
        t_end_s: step_s * steps as f64,
        snapshot_every: usize::MAX >> 1,
    }
}

fn marker_nodes(mesh: &hydrotherm::mesh::Mesh, name: &str) -> Vec<u32> {
    mesh.marker_nodes(mesh.marker_id(name).expect("marker exists"))
}

/// Abramowitz & Stegun 7.1.26 rational approximation (|error| < 1.5e-7),
/// plenty for percent-level checks.
fn erfc(x: f64) -> f64 {
    let sign_flip = x < 0.0;
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592 + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    let value = poly * (-x * x).exp();
    if sign_flip {
        2.0 - value
    } else {
        value
    }
}

/// The injection benchmark with the well shut in, hydrostatic pressure and a
/// uniform temperature: ten steps must not move either field.
fn hydrostatic_fixed_point() -> Check {
    let mut cfg = build_ates_benchmark(AtesPreset::Coarse);
    cfg.pressure_bcs.retain(|bc| !matches!(bc, PressureBc::Flux { .. }));
    cfg.temperature_bcs.retain(|bc| {
        !matches!(bc, TemperatureBc::Dirichlet { marker: Some(m), .. } if m == "wellbore")
    });
    cfg.initial.pressure = PressureInit::Hydrostatic { surface_pa: 1.0e5 };
    cfg.initial.temperature_gradient_k_per_m = 0.0;
    cfg.time = controls(86400.0, 10);
    let run = || -> hydrotherm::Result<(f64, f64)> {
        let sim = cfg.to_simulation(1)?;
        let initial = sim.initialize()?;
        let mut state = initial.clone();
        for _ in 0..10 {
            state = sim.step(&state)?.0;
        }
        let dp = max_abs_diff(&state.pressure, &initial.pressure);
        let dt = max_abs_diff(&state.temperature, &initial.temperature);
        Ok((dp, dt))
    };
    match run() {
        Ok((dp, dt)) => Check {
            name: "hydrostatic fixed point",
            passed: dp <= 1e-6 && dt <= 1e-8,
            detail: format!("max |dP| = {dp:.3e} Pa (<= 1e-6), max |dT| = {dt:.3e} K (<= 1e-8)"),
        },
        Err(e) => failed("hydrostatic fixed point", e),
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn failed(name: &'static str, e: hydrotherm::Error) -> Check {
    Check {
        name,
        passed: false,
        detail: format!("did not run: {e}"),
    }
}

/// Step change at the end of a long rod vs the erfc similarity solution.
fn transient_conduction_erfc() -> Check {
    let mesh = generate_layered_box((1.0, 0.02, 0.02), &[], (100, 1, 1)).unwrap();
    let left = marker_nodes(&mesh, "xmin");
    let bcs = BcSet {
        temperature_dirichlet: vec![TemperatureDirichlet {
            nodes: left,
            schedule: Schedule::Constant { value: 1.0 },
        }],
        ..BcSet::default()
    };
    let sim = match Simulation::new(
        mesh,
        vec![formation()],
        FluidConstants::default(),
        bcs,
        InitialConditions {
            surface_temperature_k: 0.0,
            temperature_gradient_k_per_m: 0.0,
            pile_temperature_k: None,
            pressure: PressureInit::Hydrostatic { surface_pa: 0.0 },
            lateral_pressure_offset_pa: 0.0,
        },
        controls(5.0, 500),
        tight(),
        1,
    ) {
        Ok(s) => s,
        Err(e) => return failed("transient conduction vs erfc", e),
    };
    let run = || -> hydrotherm::Result<f64> {
        let (state, _) = sim.run(&mut [])?;
        let alpha: f64 = 1.2 / 1.2e6;
        let t = 2500.0;
        let mut num = 0.0;
        let mut den = 0.0;
        for (node, pos) in sim.mesh.nodes.iter().enumerate() {
            let exact = erfc(pos[0] / (2.0 * (alpha * t).sqrt()));
            num += (state.temperature[node] - exact).powi(2);
            den += exact * exact;
        }
        Ok((num / den).sqrt())
    };
    match run() {
        Ok(rel) => Check {
            name: "transient conduction vs erfc",
            passed: rel <= 0.01,
            detail: format!("relative L2 error {rel:.4e} (<= 1e-2)"),
        },
        Err(e) => failed("transient conduction vs erfc", e),
    }
}

/// Three layers in series under a fixed pressure drop: the steady flux must
/// match the series-conductance (harmonic-mean) formula.
fn layered_darcy_column() -> Check {
    let k_values = [1e-6, 1e-7, 5e-7];
    let thickness = [1.0, 1.0, 1.0];
    let mesh = generate_layered_box((0.2, 0.2, 3.0), &[1.0, 2.0], (1, 1, 30)).unwrap();
    let top = marker_nodes(&mesh, "top");
    let bottom = marker_nodes(&mesh, "bottom");
    let extra = 5.0e4;
    let fluid = FluidConstants::default();
    let mut pressure_dirichlet: Vec<(usize, f64)> = Vec::new();
    for &n in &top {
        pressure_dirichlet.push((n as usize, extra));
    }
    for &n in &bottom {
        pressure_dirichlet.push((n as usize, fluid.rho_w * fluid.g * 3.0));
    }
    let materials: Vec<Material> = k_values
        .iter()
        .enumerate()
        .map(|(i, &k)| Material::direct(format!("layer-{i}"), 1.2, 1.2e6, k, 1e5).unwrap())
        .collect();
    // Temperature is irrelevant here; pin it everywhere so the huge steady-
    // state step leaves a well-posed (trivial) thermal system.
    let all_nodes: Vec<u32> = (0..mesh.node_count() as u32).collect();
    let sim = match Simulation::new(
        mesh,
        materials,
        fluid.clone(),
        BcSet {
            pressure_dirichlet,
            temperature_dirichlet: vec![TemperatureDirichlet {
                nodes: all_nodes,
                schedule: Schedule::Constant { value: 280.0 },
            }],
            ..BcSet::default()
        },
        InitialConditions {
            surface_temperature_k: 280.0,
            temperature_gradient_k_per_m: 0.0,
            pile_temperature_k: None,
            pressure: PressureInit::Hydrostatic { surface_pa: 0.0 },
            lateral_pressure_offset_pa: 0.0,
        },
        controls(1.0e10, 10),
        tight(),
        1,
    ) {
        Ok(s) => s,
        Err(e) => return failed("layered steady column flux", e),
    };
    let run = || -> hydrotherm::Result<(f64, f64)> {
        let (state, _) = sim.run(&mut [])?;
        // Series conductance: q = dP_extra / sum(L_i / k_i), downward.
        let resistance: f64 = k_values
            .iter()
            .zip(thickness)
            .map(|(&k, l)| l / (k / (fluid.rho_w * fluid.g)))
            .sum();
        let expected = extra / resistance;
        let mut worst = 0.0f64;
        for q in &state.velocity {
            let rel = ((-q[2]) - expected).abs() / expected;
            worst = worst.max(rel);
        }
        Ok((worst, expected))
    };
    match run() {
        Ok((worst, expected)) => Check {
            name: "layered steady column flux",
            passed: worst <= 1e-3,
            detail: format!(
                "max relative flux error {worst:.3e} vs series formula {expected:.6e} m/s (<= 1e-3)"
            ),
        },
        Err(e) => failed("layered steady column flux", e),
    }
}

/// A uniform Darcy flux drags a temperature front at (c_w/c_T)·q; timing the
/// mid-column crossing checks the retardation factor.
fn thermal_retardation() -> Check {
    let drop = 981_000.0; // gives q = 1e-4 m/s through K = 1e-6 m/s
    let mesh = generate_layered_box((1.0, 0.01, 0.01), &[], (200, 1, 1)).unwrap();
    let inlet = marker_nodes(&mesh, "xmin");
    let bcs = BcSet {
        temperature_dirichlet: vec![TemperatureDirichlet {
            nodes: inlet,
            schedule: Schedule::Constant { value: 1.0 },
        }],
        ..BcSet::default()
    };
    let sim = match Simulation::new(
        mesh,
        vec![formation()],
        FluidConstants::default(),
        bcs,
        InitialConditions {
            surface_temperature_k: 0.0,
            temperature_gradient_k_per_m: 0.0,
            pile_temperature_k: None,
            pressure: PressureInit::Hydrostatic { surface_pa: 0.0 },
            lateral_pressure_offset_pa: -drop,
        },
        controls(60.0, 110),
        SolverConfig {
            tolerance: 1e-12,
            max_iter_factor: 20,
            supg: true,
        },
        1,
    ) {
        Ok(s) => s,
        Err(e) => return failed("thermal front retardation", e),
    };
    // Pin the lateral pressures so the ramp stays put.
    let run = || -> hydrotherm::Result<f64> {
        let mut sim = sim;
        let left = marker_nodes(&sim.mesh, "xmin");
        let right = marker_nodes(&sim.mesh, "xmax");
        let init = hydrotherm::sim::initial_pressure_field(&sim.mesh, &sim.fluid, &sim.initial);
        for &n in left.iter().chain(&right) {
            sim.bcs.pressure_dirichlet.push((n as usize, init[n as usize]));
        }
        let mid = sim
            .mesh
            .nodes
            .iter()
            .position(|p| (p[0] - 0.5).abs() < 1e-9 && p[1] == 0.0 && p[2] == 0.0)
            .expect("mid node");
        let mut state = sim.initialize()?;
        let mut previous = (state.time, state.temperature[mid]);
        let mut crossing = None;
        for _ in 0..110 {
            state = sim.step(&state)?.0;
            let now = (state.time, state.temperature[mid]);
            if previous.1 < 0.5 && now.1 >= 0.5 {
                let f = (0.5 - previous.1) / (now.1 - previous.1);
                crossing = Some(previous.0 + f * (now.0 - previous.0));
                break;
            }
            previous = now;
        }
        Ok(crossing.unwrap_or(f64::INFINITY))
    };
    match run() {
        Ok(crossing) => {
            // L / (2 (c_w/c_T) q) with q = 1e-4 and c_w/c_T = 1/1.2.
            let expected = 1.0 / (2.0 * (1.0 / 1.2) * 1e-4);
            let rel = (crossing - expected).abs() / expected;
            Check {
                name: "thermal front retardation",
                passed: rel <= 0.05,
                detail: format!(
                    "mid-column crossing at {crossing:.0} s vs {expected:.0} s ({:.2}% error, <= 5%)",
                    100.0 * rel
                ),
            }
        }
        Err(e) => failed("thermal front retardation", e),
    }
}

/// Decaying diffusion eigenmode: halving h must halve the temporal error,
/// halving the mesh must quarter the spatial L2 error.
fn convergence_orders() -> Check {
    let t_star = 6756.0; // 3 pi^2 alpha t = 0.2 for alpha = 1e-6
    let run = || -> hydrotherm::Result<(f64, f64)> {
        let temporal = {
            let e1 = mms_temporal_error(8, t_star, 8)?;
            let e2 = mms_temporal_error(8, t_star, 16)?;
            e1 / e2
        };
        let spatial = {
            let e1 = mms_spatial_error(8, t_star)?;
            let e2 = mms_spatial_error(16, t_star)?;
            e1 / e2
        };
        Ok((temporal, spatial))
    };
    match run() {
        Ok((temporal, spatial)) => Check {
            name: "convergence orders",
            passed: (1.8..=2.2).contains(&temporal) && (3.0..=5.0).contains(&spatial),
            detail: format!(
                "temporal error ratio {temporal:.2} (2.0 ± 0.2), spatial L2 ratio {spatial:.2} (4.0 ± 1.0)"
            ),
        },
        Err(e) => failed("convergence orders", e),
    }
}

fn mms_simulation(n: usize, h: f64, steps: usize) -> hydrotherm::Result<Simulation> {
    let mesh = generate_layered_box((1.0, 1.0, 1.0), &[], (n, n, n))?;
    let mut boundary: Vec<u32> = mesh
        .boundary_faces
        .iter()
        .flat_map(|f| mesh.face_nodes(f))
        .collect();
    boundary.sort_unstable();
    boundary.dedup();
    Simulation::new(
        mesh,
        vec![formation()],
        FluidConstants::default(),
        BcSet {
            temperature_dirichlet: vec![TemperatureDirichlet {
                nodes: boundary,
                schedule: Schedule::Constant { value: 0.0 },
            }],
            ..BcSet::default()
        },
        InitialConditions {
            surface_temperature_k: 0.0,
            temperature_gradient_k_per_m: 0.0,
            pile_temperature_k: None,
            pressure: PressureInit::Hydrostatic { surface_pa: 0.0 },
            lateral_pressure_offset_pa: 0.0,
        },
        controls(h, steps),
        tight(),
        1,
    )
}

fn mms_mode(mesh: &hydrotherm::mesh::Mesh, t: f64) -> Vec<f64> {
    use std::f64::consts::PI;
    let alpha = 1.2 / 1.2e6;
    let decay = (-3.0 * PI * PI * alpha * t).exp();
    mesh.nodes
        .iter()
        .map(|p| decay * (PI * p[0]).sin() * (PI * p[1]).sin() * (PI * p[2]).sin())
        .collect()
}

fn mms_advance(sim: &Simulation, steps: usize) -> hydrotherm::Result<State> {
    let mut state = sim.initialize()?;
    state.temperature = mms_mode(&sim.mesh, 0.0);
    for _ in 0..steps {
        state = sim.step(&state)?.0;
    }
    Ok(state)
}

fn nodal_rms(a: &[f64], b: &[f64]) -> f64 {
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    (sum / a.len() as f64).sqrt()
}

/// Error against a same-mesh small-step reference isolates the O(h) temporal
/// component.
fn mms_temporal_error(n: usize, t_star: f64, steps: usize) -> hydrotherm::Result<f64> {
    let coarse = mms_advance(&mms_simulation(n, t_star / steps as f64, steps)?, steps)?;
    let ref_steps = 256;
    let reference = mms_advance(&mms_simulation(n, t_star / ref_steps as f64, ref_steps)?, ref_steps)?;
    Ok(nodal_rms(&coarse.temperature, &reference.temperature))
}

/// True L2 error against the closed-form mode by high-order quadrature.
fn mms_spatial_error(n: usize, t_star: f64) -> hydrotherm::Result<f64> {
    use std::f64::consts::PI;
    let steps = 64;
    let sim = mms_simulation(n, t_star / steps as f64, steps)?;
    let state = mms_advance(&sim, steps)?;
    let alpha = 1.2 / 1.2e6;
    let decay = (-3.0 * PI * PI * alpha * t_star).exp();
    let rule = hydrotherm::fem::QuadRule::gauss(3)?;
    let mut err2 = 0.0;
    for cell in 0..sim.mesh.cell_count() {
        let nodes = sim.mesh.cell_nodes(cell);
        for &(xi, w) in rule.points() {
            let jac = hydrotherm::mesh::shape::jacobian(&nodes, xi);
            let det = hydrotherm::mesh::shape::det3(&jac);
            let sh = hydrotherm::mesh::shape::shape_values(xi);
            let pos = hydrotherm::mesh::shape::map_point(&nodes, xi);
            let mut th = 0.0;
            for a in 0..8 {
                th += sh[a] * state.temperature[sim.mesh.cells[cell][a] as usize];
            }
            let exact =
                decay * (PI * pos[0]).sin() * (PI * pos[1]).sin() * (PI * pos[2]).sin();
            err2 += w * det * (th - exact).powi(2);
        }
    }
    Ok(err2.sqrt())
}

/// The seasonal square wave hits its two plateaus exactly.
fn square_wave_schedule() -> Check {
    let wave = pile_square_wave();
    let day = 86400.0;
    let at_10 = evaluate_schedule(&wave, 10.0 * day);
    let at_200 = evaluate_schedule(&wave, 200.0 * day);
    Check {
        name: "square-wave schedule",
        passed: at_10 == 301.55 && at_200 == 275.55,
        detail: format!("day 10 -> {at_10} K (301.55), day 200 -> {at_200} K (275.55)"),
    }
}

//! The one-way coupled time loop: solve pressure, derive the Darcy
//! velocity, solve temperature, advance. States are immutable snapshots;
//! stepping returns a new one.

pub mod schedule;

pub use schedule::{evaluate_schedule, Schedule};

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{
    apply_dirichlet, assemble_pressure, assemble_temperature, compute_cell_velocities,
    BoundaryFlux, DofStructure,
};
use crate::linalg::{bicgstab, cg, SolverOptions, SolverReport};
use crate::mesh::Mesh;
use crate::physics::{FluidConstants, Material, Vec3};

/// Nodal fields and per-cell Darcy velocity at one time level.
#[derive(Debug, Clone)]
pub struct State {
    pub time: f64,
    pub step: usize,
    pub pressure: Vec<f64>,
    pub temperature: Vec<f64>,
    /// Per-cell Darcy velocity, consistent with `pressure`.
    pub velocity: Vec<Vec3>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeControls {
    /// Step size h, seconds.
    pub step_s: f64,
    pub t_end_s: f64,
    /// Emit output every this many steps.
    pub snapshot_every: usize,
}

impl TimeControls {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_s > 0.0) {
            return Err(Error::config(format!(
                "time step must be positive, got {}",
                self.step_s
            )));
        }
        if self.t_end_s < self.step_s {
            return Err(Error::config(format!(
                "t_end ({}) must be at least one step ({})",
                self.t_end_s, self.step_s
            )));
        }
        if self.snapshot_every == 0 {
            return Err(Error::config("snapshot_every must be at least 1".to_string()));
        }
        Ok(())
    }

    pub fn step_count(&self) -> usize {
        ((self.t_end_s / self.step_s) * (1.0 + 1e-12)).floor().max(1.0) as usize
    }
}

/// How the initial pressure field is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum PressureInit {
    /// Uniform initial pressure (gravity then drives an initial transient
    /// unless boundary values hold it).
    Uniform { value_pa: f64 },
    /// Hydrostatic from the water table at the surface: `ρ_w·g·depth` plus
    /// the surface pressure.
    Hydrostatic { surface_pa: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConditions {
    pub surface_temperature_k: f64,
    /// Geothermal gradient dT, K per metre of depth.
    pub temperature_gradient_k_per_m: f64,
    /// Override for nodes in the `pile` region.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pile_temperature_k: Option<f64>,
    pub pressure: PressureInit,
    /// Linear west-to-east pressure offset added to the initial field and
    /// the lateral boundary profiles (drives a background hydraulic
    /// gradient).
    #[serde(default)]
    pub lateral_pressure_offset_pa: f64,
}

/// Dirichlet temperature data: a node set driven by one schedule. Entries
/// earlier in the list win on shared nodes.
#[derive(Debug, Clone)]
pub struct TemperatureDirichlet {
    pub nodes: Vec<u32>,
    pub schedule: Schedule,
}

/// Fully resolved boundary conditions (node ids and face markers, no names).
#[derive(Debug, Clone, Default)]
pub struct BcSet {
    /// Static pressure constraints (profiles do not vary in time).
    pub pressure_dirichlet: Vec<(usize, f64)>,
    pub pressure_fluxes: Vec<BoundaryFlux>,
    pub temperature_dirichlet: Vec<TemperatureDirichlet>,
    pub heat_fluxes: Vec<BoundaryFlux>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Relative residual target for both solvers.
    pub tolerance: f64,
    /// Iteration cap as a multiple of the dof count.
    pub max_iter_factor: usize,
    /// Streamline (SUPG) stabilization of the temperature system.
    pub supg: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-8,
            max_iter_factor: 10,
            supg: false,
        }
    }
}

/// Accumulated phase timers, named after the four per-step work items.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimers {
    #[serde(rename = "assemble_P")]
    pub assemble_p: f64,
    #[serde(rename = "solve_P")]
    pub solve_p: f64,
    #[serde(rename = "assemble_T")]
    pub assemble_t: f64,
    #[serde(rename = "solve_T")]
    pub solve_t: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerfReport {
    pub phases: PhaseTimers,
    /// Wall time of the whole run, including output.
    pub total_s: f64,
    pub pressure_dofs: usize,
    pub temperature_dofs: usize,
    pub total_dofs: usize,
    pub workers: usize,
    pub steps: usize,
}

/// Receives state snapshots during a run. Implementations decide what to do
/// with step 0 (the initial state). `Send` because the run executes inside
/// the worker pool.
pub trait OutputSink: Send {
    fn on_snapshot(&mut self, mesh: &Mesh, state: &State) -> Result<()>;
}

/// A ready-to-run problem: mesh, coefficients, resolved boundary conditions
/// and controls.
#[derive(Debug)]
pub struct Simulation {
    pub mesh: Mesh,
    pub materials: Vec<Material>,
    pub fluid: FluidConstants,
    pub structure: DofStructure,
    pub bcs: BcSet,
    pub initial: InitialConditions,
    pub controls: TimeControls,
    pub solver: SolverConfig,
    pub workers: usize,
}

impl Simulation {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mesh: Mesh,
        materials: Vec<Material>,
        fluid: FluidConstants,
        bcs: BcSet,
        initial: InitialConditions,
        controls: TimeControls,
        solver: SolverConfig,
        workers: usize,
    ) -> Result<Simulation> {
        controls.validate()?;
        fluid.validate()?;
        for m in &materials {
            m.validate()?;
        }
        if workers == 0 {
            return Err(Error::config("worker count must be at least 1".to_string()));
        }
        mesh.validate_jacobians()?;
        let structure = DofStructure::build(&mesh);
        Ok(Simulation {
            mesh,
            materials,
            fluid,
            structure,
            bcs,
            initial,
            controls,
            solver,
            workers,
        })
    }

    pub fn dof_count(&self) -> usize {
        self.structure.n
    }

    /// Initial state: temperature from the surface value plus the geothermal
    /// gradient (pile nodes overridden when configured), pressure uniform or
    /// hydrostatic plus the lateral ramp, velocity derived from the pressure.
    pub fn initialize(&self) -> Result<State> {
        let temperature = initial_temperature_field(&self.mesh, &self.initial);
        let pressure = initial_pressure_field(&self.mesh, &self.fluid, &self.initial);
        let velocity =
            compute_cell_velocities(&self.mesh, &self.materials, &self.fluid, &pressure)?;
        Ok(State {
            time: 0.0,
            step: 0,
            pressure,
            temperature,
            velocity,
        })
    }

    /// Temperature Dirichlet pairs at time `t`, earlier entries winning on
    /// shared nodes.
    fn temperature_dirichlet_at(&self, t: f64) -> Vec<(usize, f64)> {
        let mut taken = vec![false; self.structure.n];
        let mut out = Vec::new();
        for bc in &self.bcs.temperature_dirichlet {
            for &node in &bc.nodes {
                let node = node as usize;
                if !taken[node] {
                    taken[node] = true;
                    out.push((node, bc.schedule.value_at(t, self.mesh.node_depth(node))));
                }
            }
        }
        out
    }

    fn solver_options(&self) -> SolverOptions {
        SolverOptions::new(
            self.solver.tolerance,
            self.solver.max_iter_factor * self.structure.n.max(100),
        )
    }

    fn solver_error(step: usize, phase: &'static str, report: &SolverReport) -> Error {
        Error::Solver {
            step,
            phase,
            iterations: report.iterations,
            residual: report.residual,
        }
    }

    /// One backward-Euler step: assemble and solve pressure with the
    /// boundary data at t+h, derive the Darcy velocity from the new
    /// pressure, then assemble and solve temperature with that velocity.
    pub fn step(&self, state: &State) -> Result<(State, PhaseTimers)> {
        let h = self.controls.step_s;
        let t_next = state.time + h;
        let step_index = state.step + 1;
        let mut timers = PhaseTimers::default();
        let opts = self.solver_options();

        let clock = Instant::now();
        let mut p_system = assemble_pressure(
            &self.mesh,
            &self.structure,
            &self.materials,
            &self.fluid,
            &state.pressure,
            h,
            &self.bcs.pressure_fluxes,
            self.bcs.pressure_dirichlet.clone(),
        )?;
        apply_dirichlet(&mut p_system, true)?;
        timers.assemble_p = clock.elapsed().as_secs_f64();

        let clock = Instant::now();
        let mut pressure = state.pressure.clone();
        for &(dof, v) in &p_system.dirichlet {
            pressure[dof] = v;
        }
        let report = cg(&p_system.matrix, &p_system.rhs, &mut pressure, &opts);
        if !report.converged {
            return Err(Self::solver_error(step_index, "pressure solve", &report));
        }
        timers.solve_p = clock.elapsed().as_secs_f64();

        let clock = Instant::now();
        let velocity =
            compute_cell_velocities(&self.mesh, &self.materials, &self.fluid, &pressure)?;
        let mut t_system = assemble_temperature(
            &self.mesh,
            &self.structure,
            &self.materials,
            &self.fluid,
            &state.temperature,
            &pressure,
            h,
            &self.bcs.heat_fluxes,
            self.temperature_dirichlet_at(t_next),
            self.solver.supg,
        )?;
        apply_dirichlet(&mut t_system, false)?;
        timers.assemble_t = clock.elapsed().as_secs_f64();

        let clock = Instant::now();
        let mut temperature = state.temperature.clone();
        for &(dof, v) in &t_system.dirichlet {
            temperature[dof] = v;
        }
        let report = bicgstab(&t_system.matrix, &t_system.rhs, &mut temperature, &opts);
        if !report.converged {
            return Err(Self::solver_error(step_index, "temperature solve", &report));
        }
        timers.solve_t = clock.elapsed().as_secs_f64();

        Ok((
            State {
                time: t_next,
                step: step_index,
                pressure,
                temperature,
                velocity,
            },
            timers,
        ))
    }

    /// Runs to `t_end` on a worker pool of the configured size, invoking the
    /// sinks at the snapshot cadence (and once for the initial state).
    pub fn run(&self, sinks: &mut [&mut dyn OutputSink]) -> Result<(State, PerfReport)> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::config(format!("failed to build worker pool: {e}")))?;
        pool.install(|| self.run_inner(sinks))
    }

    fn run_inner(&self, sinks: &mut [&mut dyn OutputSink]) -> Result<(State, PerfReport)> {
        let wall = Instant::now();
        let steps = self.controls.step_count();
        let mut state = self.initialize()?;
        for sink in sinks.iter_mut() {
            sink.on_snapshot(&self.mesh, &state)?;
        }
        let mut phases = PhaseTimers::default();
        for _ in 0..steps {
            let (next, timers) = self.step(&state)?;
            phases.assemble_p += timers.assemble_p;
            phases.solve_p += timers.solve_p;
            phases.assemble_t += timers.assemble_t;
            phases.solve_t += timers.solve_t;
            state = next;
            if state.step % self.controls.snapshot_every == 0 {
                for sink in sinks.iter_mut() {
                    sink.on_snapshot(&self.mesh, &state)?;
                }
            }
        }
        let n = self.structure.n;
        let report = PerfReport {
            phases,
            total_s: wall.elapsed().as_secs_f64(),
            pressure_dofs: n,
            temperature_dofs: n,
            total_dofs: 2 * n,
            workers: self.workers,
            steps,
        };
        Ok((state, report))
    }
}

/// The configured initial temperature profile on a mesh.
pub fn initial_temperature_field(mesh: &Mesh, initial: &InitialConditions) -> Vec<f64> {
    let mut temperature: Vec<f64> = (0..mesh.node_count())
        .map(|node| {
            initial.surface_temperature_k
                + initial.temperature_gradient_k_per_m * mesh.node_depth(node)
        })
        .collect();
    if let Some(pile_t) = initial.pile_temperature_k {
        if let Some(nodes) = mesh.node_regions.get("pile") {
            for &node in nodes {
                temperature[node as usize] = pile_t;
            }
        }
    }
    temperature
}

/// The configured initial pressure field (uniform or hydrostatic, plus the
/// lateral ramp) on a mesh. Boundary profiles that pin nodes to their
/// initial values use the same formula, so they are consistent by
/// construction.
pub fn initial_pressure_field(mesh: &Mesh, fluid: &FluidConstants, initial: &InitialConditions) -> Vec<f64> {
    let (lo, hi) = mesh.bounding_box();
    let span = (hi[0] - lo[0]).max(1e-12);
    (0..mesh.node_count())
        .map(|node| {
            let depth = mesh.node_depth(node);
            let base = match initial.pressure {
                PressureInit::Uniform { value_pa } => value_pa,
                PressureInit::Hydrostatic { surface_pa } => {
                    surface_pa + fluid.rho_w * fluid.g * depth
                }
            };
            let ramp = if initial.lateral_pressure_offset_pa == 0.0 {
                0.0
            } else {
                initial.lateral_pressure_offset_pa * (mesh.nodes[node][0] - lo[0]) / span
            };
            base + ramp
        })
        .collect()
}

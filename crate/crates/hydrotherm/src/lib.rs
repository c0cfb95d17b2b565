//! Parallel finite-element engine for one-way coupled groundwater flow and
//! heat transport in layered ground.
//!
//! The engine solves a pressure diffusion equation and an
//! advection-diffusion heat equation on structured hexahedral meshes with an
//! implicit (backward Euler) step: each step solves pressure, derives the
//! Darcy velocity, then solves temperature with that velocity. Scenario
//! builders reproduce an aquifer thermal energy storage benchmark and an
//! energy-pile field; the CLI adds VTK/CSV output and a parallel-scaling
//! bench harness.

pub mod error;
pub mod fem;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod physics;
pub mod scenarios;
pub mod sim;

pub use error::{Error, Result};

//! Spectral solver and arclength continuation for solitary gravity waves on
//! flows of constant vorticity, posed on the fixed strip `0 < y < 1`.

pub mod asymptotics;
pub mod continuation;
pub mod diagnostics;
pub mod error;
pub mod io;
pub mod operator;
pub mod quadrature;
pub mod strip;

pub use asymptotics::{dispersion_root, seed_profile, DispersionRoot};
pub use continuation::{
    newton_solve, run_branch, run_branch_with, Branch, BranchConfig, BranchPoint, ContinuationSettings, MonitorKind,
    NewtonSettings, Termination, Thresholds,
};
pub use diagnostics::{diagnose, DiagnosticsReport};
pub use error::{Error, Result};
pub use io::{read_solution, write_solution};
pub use operator::{Monitor, Parameters, ReducedState, WaveOperator};
pub use strip::{Collocation, ModeBasis, SurfaceTrace};

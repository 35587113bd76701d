//! Numerical core for large eddy simulation of the beta-plane barotropic
//! vorticity equation with stochastic subgrid-scale closures.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure numerics:
//!
//! * [`field`]: node-centred grids, scalar fields and discrete L² norms.
//! * [`spectral`]: FFT-backed type-I discrete sine transform.
//! * [`operators`]: Laplacian, gradient, Arakawa Jacobian, Dirichlet Poisson
//!   solver.
//! * [`filter`]: Gaussian filter in the sine basis, grid restriction and
//!   seeded perturbations.
//! * [`dynamics`]: true and LES tendencies, RK4, trajectories and the
//!   enstrophy bound monitor.
//! * [`sgs`]: a-priori diagnosis of the subgrid stress, its statistics and
//!   the closure samplers driven by them.
//!
//! File formats, configuration, experiment orchestration and the command
//! line live in the companion `qgles` crate.

#![no_std]
#![warn(missing_debug_implementations)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod field;
pub mod filter;
pub mod operators;
pub mod rng;
pub mod sgs;
pub mod spectral;

pub use dynamics::{
    double_gyre_forcing, rk4_step, Closure, LemmaOneBound, Model, OdeState, PhysicalParams, StepDiagnostics,
    StepperConfig,
};
pub use error::{Error, Result};
pub use field::{inner_product, l2_norm, Field, Grid, Trajectory};
pub use filter::{gaussian_filter, perturb_field, restrict, FilterSpec, GaussianFilter};
pub use operators::{arakawa_jacobian, gradient, laplacian, solve_poisson, PoissonSolver};
pub use sgs::{
    closure_mismatch, diagnose_sgs, estimate_stats, make_closure, ClosureKind, ClosureSpec, SgsSeries, SgsStats,
};

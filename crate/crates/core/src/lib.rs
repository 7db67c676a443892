//! Stationary solutions of the dimensionless Vlasov-Fokker-Planck equation.
//!
//! Invariant measures are obtained from the self-consistency of a Gibbs
//! density in position space, then lifted to phase space with a Maxwellian
//! velocity profile. Particle simulations provide an independent check.

// `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifurcation;
pub mod error;
pub mod kinetic;
pub mod model;
pub mod particles;
pub mod poly;
pub mod quad;
pub mod roots;
pub mod selfcons;

pub use bifurcation::{
    lambda_c_integrand_equation, lambda_c_oracle, lambda_c_report, solve_lambda_c_implicit,
    sweep_branches, BranchTable, LambdaCReport,
};
pub use error::{Result, VfpError};
pub use kinetic::{
    asymptotic_mean, lift_to_phase_space, moment_concentration_check, nondimensionalize,
    stationarity_residual, MomentumGrid, PhaseSpaceMeasure, PhysicalParameters, Residual,
};
pub use model::{
    critical_points, effective_potential, validate_assumptions, well_depth_margin,
    ConfiningPotential, InteractionPotential, ValidationReport,
};
pub use particles::{
    run, step_kinetic, step_overdamped, InitialCondition, Mode, Observers, ParticleEnsemble,
    SimConfig, SimReport,
};
pub use poly::Polynomial;
pub use quad::QuadratureSpec;
pub use selfcons::{
    find_fixed_points, map_derivative, mean_field_map, solve_general_interaction,
    stationary_density, FixedPoint, FixedPointSet, PicardOptions, SelfConsistencyProblem,
    Stability, StationaryMeasure,
};

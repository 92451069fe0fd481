//! Entropy/mobility models, the discrete Casimirs and entropy functional,
//! and the energy–Casimir equilibrium solver.

mod equilibrium;
mod functionals;
mod model;

pub use equilibrium::{
    maxwellian_guess, solve_equilibrium, EquilibriumOptions, EquilibriumSolution,
};
pub use functionals::{
    compute_invariants, entropy_average_gradient, entropy_average_hessian, entropy_gradient,
    entropy_hessian, entropy_value, free_energy_gradient, EntropyFunctional, FreeEnergy,
    InvariantsRecord, MomentTargets,
};
pub use model::{ModelKind, ThermoModel, DEFAULT_CEILING, DEFAULT_FLOOR};

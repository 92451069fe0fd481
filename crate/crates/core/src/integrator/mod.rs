//! Discrete-gradient time stepping of `df/dt = M^{-1} L(f) M^{-1} grad F`.

mod discrete_gradient;
mod stepper;

pub use discrete_gradient::{discrete_gradient, DgKind, DiscreteGradientKind};
pub use stepper::{
    run_simulation, run_simulation_with, step_dense, step_sparse, KrylovSettings, PathKind,
    SimulationOutcome, SolverKind, StepConfig, StepReport, Stepper,
};

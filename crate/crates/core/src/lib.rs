//! Metriplectic finite-element discretization of the 2D Landau collision
//! operator with energy- and momentum-conserving, entropy-producing time
//! stepping.

pub mod discretization;
pub mod error;
pub mod fem;
pub mod functional;
pub mod integrator;
pub mod landau;
pub mod linalg;
pub mod mesh;
mod parallel;
pub mod thermo;

pub use discretization::{Discretization, DiscretizationConfig, PARTICLE_MASS};
pub use error::{Error, Result};
pub use fem::DistributionState;
pub use functional::Functional;

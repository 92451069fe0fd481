//! Tensor-product Lagrange space over the velocity mesh.

mod mass;
mod space;

pub use mass::MassMatrix;
pub use space::{BasisTables, FunctionSpace, QuadField};

use crate::error::{check_len, Error, Result};

/// Coefficient vectors reproducing `1`, `v_k` and `|v|^2` in the primal basis.
#[derive(Debug, Clone)]
pub struct MonomialCoefficients {
    pub ones: Vec<f64>,
    pub v_hat: [Vec<f64>; 2],
    /// Present only for degree >= 2, where `|v|^2` lies in the space.
    pub eps_hat: Option<Vec<f64>>,
}

impl MonomialCoefficients {
    /// Nodal interpolation of the monomials. With `track_energy` set, a
    /// degree-1 space is rejected because `|v|^2` is not representable.
    pub fn interpolate(space: &FunctionSpace, track_energy: bool) -> Result<Self> {
        if track_energy && space.degree() < 2 {
            return Err(Error::Capability(
                "kinetic-energy tracking needs |v|^2 in the space; use degree 2".into(),
            ));
        }
        let coords = space.dof_coords();
        let ones = vec![1.0; coords.len()];
        let v_hat = [
            coords.iter().map(|c| c[0]).collect(),
            coords.iter().map(|c| c[1]).collect(),
        ];
        let eps_hat = (space.degree() >= 2)
            .then(|| coords.iter().map(|c| c[0] * c[0] + c[1] * c[1]).collect());
        Ok(Self {
            ones,
            v_hat,
            eps_hat,
        })
    }

    pub fn eps_hat(&self) -> Result<&[f64]> {
        self.eps_hat
            .as_deref()
            .ok_or_else(|| Error::Capability("|v|^2 coefficients unavailable for degree 1".into()))
    }
}

/// Coefficients of the discrete distribution plus the simulation time.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionState {
    pub coeffs: Vec<f64>,
    pub time: f64,
}

impl DistributionState {
    pub fn new(coeffs: Vec<f64>, time: f64) -> Self {
        Self { coeffs, time }
    }

    pub fn zeros(space: &FunctionSpace) -> Self {
        Self::new(vec![0.0; space.n_dof()], 0.0)
    }

    pub fn check_space(&self, space: &FunctionSpace) -> Result<()> {
        check_len(space.n_dof(), self.coeffs.len())
    }
}

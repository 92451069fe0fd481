use crate::error::{Error, Result};

pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandauTensorParams {
    /// Relative speeds below this are treated as a coincidence and `U = 0`.
    pub epsilon_u: f64,
}

impl LandauTensorParams {
    pub fn for_domain(v_max: f64) -> Self {
        Self {
            epsilon_u: 1e-12 * v_max,
        }
    }

    pub fn validate(&self, v_max: f64) -> Result<()> {
        if !(self.epsilon_u > 0.0 && self.epsilon_u <= 1e-10 * v_max) {
            return Err(Error::InvalidConfig(format!(
                "epsilon_u must lie in (0, 1e-10 * v_max], got {}",
                self.epsilon_u
            )));
        }
        Ok(())
    }
}

/// `U(a, b) = (I - u u^T / |u|^2) / |u|` with `u = a - b`.
///
/// In two dimensions the projection orthogonal to `u` is `n n^T` with `n`
/// the unit normal, which keeps the nullspace and the `a <-> b` symmetry
/// exact in floating point.
#[inline]
pub fn landau_tensor(a: [f64; 2], b: [f64; 2], params: &LandauTensorParams) -> Mat2 {
    let u = [a[0] - b[0], a[1] - b[1]];
    let r = u[0].hypot(u[1]);
    if r < params.epsilon_u {
        return [[0.0; 2]; 2];
    }
    let inv = 1.0 / r;
    let n = [-u[1] * inv, u[0] * inv];
    let off = n[0] * n[1] * inv;
    [[n[0] * n[0] * inv, off], [off, n[1] * n[1] * inv]]
}

#[inline]
pub(crate) fn mat_vec(m: &Mat2, x: [f64; 2]) -> [f64; 2] {
    [
        m[0][0] * x[0] + m[0][1] * x[1],
        m[1][0] * x[0] + m[1][1] * x[1],
    ]
}

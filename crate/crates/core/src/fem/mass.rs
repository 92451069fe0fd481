use super::{BasisTables, FunctionSpace};
use crate::error::{check_len, Error, Result};
use crate::linalg::{BandCholesky, CsrMatrix};

/// `M_jk = integral of phi_j phi_k`, with a cached Cholesky factor. Its
/// inverse is the dual-basis map turning partial derivatives into
/// functional-derivative coefficients; it is only ever applied as a solve.
#[derive(Debug, Clone)]
pub struct MassMatrix {
    matrix: CsrMatrix,
    factor: Option<BandCholesky>,
}

impl MassMatrix {
    pub fn assemble(space: &FunctionSpace, tables: &BasisTables) -> Result<Self> {
        let mut matrix = CsrMatrix::from_groups(space.n_dof(), space.cells_dofs());
        let nl = space.n_local();
        let mut local = vec![0.0; nl * nl];
        for cell in 0..tables.n_cells() {
            local.iter_mut().for_each(|x| *x = 0.0);
            for q in tables.cell_points(cell) {
                let w = tables.weights()[q];
                let phi = tables.values(q);
                for a in 0..nl {
                    for b in 0..nl {
                        // phi_a * phi_b commutes exactly, keeping M bitwise symmetric.
                        local[a * nl + b] += w * (phi[a] * phi[b]);
                    }
                }
            }
            let dofs = space.cell_dofs(cell);
            for a in 0..nl {
                for b in 0..nl {
                    matrix.add(dofs[a], dofs[b], local[a * nl + b]);
                }
            }
        }
        let factor = BandCholesky::factor(&matrix).ok_or_else(|| {
            Error::Assembly("mass matrix is not positive definite (broken connectivity?)".into())
        })?;
        Ok(Self {
            matrix,
            factor: Some(factor),
        })
    }

    /// Unfactored matrix; `solve` on it reports a state error.
    pub fn without_factor(self) -> Self {
        Self {
            factor: None,
            ..self
        }
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.n_rows()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(x)
    }

    /// `M^{-1} g`: coefficients of the functional derivative whose
    /// partial-derivative vector is `g`.
    pub fn lift_gradient(&self, g: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), g.len())?;
        let f = self
            .factor
            .as_ref()
            .ok_or_else(|| Error::State("mass matrix factorization unavailable".into()))?;
        Ok(f.solve(g))
    }

    pub fn solve(&self, g: &[f64]) -> Result<Vec<f64>> {
        self.lift_gradient(g)
    }

    /// `sqrt(x^T M x)`
    pub fn norm(&self, x: &[f64]) -> f64 {
        crate::linalg::dot(x, &self.apply(x)).max(0.0).sqrt()
    }
}

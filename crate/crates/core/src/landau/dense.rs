use nalgebra::DMatrix;

use super::tensor::{landau_tensor, mat_vec, LandauTensorParams};
use crate::discretization::Discretization;
use crate::error::{check_len, Result};
use crate::fem::MassMatrix;
use crate::parallel::map_indexed;
use crate::thermo::ThermoModel;

/// Symmetric Landau matrix `L(f)` of the discrete metric bracket.
#[derive(Debug, Clone)]
pub struct LandauMatrix {
    pub entries: DMatrix<f64>,
    pub f_snapshot: Vec<f64>,
}

impl LandauMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let v = &self.entries * nalgebra::DVector::from_column_slice(x);
        v.as_slice().to_vec()
    }

    /// Row vector `x^T L`.
    pub fn left_apply(&self, x: &[f64]) -> Vec<f64> {
        let v = self
            .entries
            .tr_mul(&nalgebra::DVector::from_column_slice(x));
        v.as_slice().to_vec()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Weighted mobility `w_q M(f_h(q))` at every quadrature point.
pub(crate) fn weighted_mobility(
    disc: &Discretization,
    f: &[f64],
    model: &ThermoModel,
) -> Result<Vec<f64>> {
    let vals = disc.values_at_quad(f);
    vals.iter()
        .zip(disc.tables.weights())
        .map(|(&fq, &w)| {
            model.check_domain(fq)?;
            Ok(w * model.mobility(fq))
        })
        .collect()
}

/// Assembles
/// `L_ij = -1/2 sum_{q',q''} w' w'' (dphi_i' - dphi_i'') . M' U M'' . (dphi_j' - dphi_j'')`
/// over all pairs of points of one quadrature rule.
///
/// Expanding the product gives `L = X - S` with the nonlocal part
/// `X_ij = sum mu' mu'' dphi_i(q') . U dphi_j(q'')` and the local part
/// `S_ij = sum_q mu(q) dphi_i(q) . A(q) dphi_j(q)`, `A(q) = sum_q'' mu'' U`.
/// Row blocks are built per cell in parallel and summed in cell order.
pub fn assemble_landau_dense(
    disc: &Discretization,
    f: &[f64],
    model: &ThermoModel,
    params: &LandauTensorParams,
) -> Result<LandauMatrix> {
    check_len(disc.n_dof(), f.len())?;
    let mu = weighted_mobility(disc, f, model)?;
    let t = &disc.tables;
    let space = &disc.space;
    let n = disc.n_dof();
    let nl = t.n_local();
    let np = t.n_points();
    let coords = t.coords();

    let blocks: Vec<Vec<f64>> = map_indexed(t.n_cells(), |cell| {
        let mut block = vec![0.0; nl * n];
        let mut y = vec![[0.0f64; 2]; n];
        for qa in t.cell_points(cell) {
            if mu[qa] == 0.0 {
                continue;
            }
            y.iter_mut().for_each(|e| *e = [0.0; 2]);
            let mut a_loc = [[0.0f64; 2]; 2];
            for qb in 0..np {
                if mu[qb] == 0.0 {
                    continue;
                }
                let u = landau_tensor(coords[qa], coords[qb], params);
                let su = [
                    [mu[qb] * u[0][0], mu[qb] * u[0][1]],
                    [mu[qb] * u[1][0], mu[qb] * u[1][1]],
                ];
                for r in 0..2 {
                    for c in 0..2 {
                        a_loc[r][c] += su[r][c];
                    }
                }
                let dofs = space.cell_dofs(t.cell_of(qb));
                for (g, &j) in t.grads(qb).iter().zip(dofs) {
                    let v = mat_vec(&su, *g);
                    y[j][0] += v[0];
                    y[j][1] += v[1];
                }
            }
            let ga = t.grads(qa);
            let dofs = space.cell_dofs(cell);
            for a in 0..nl {
                let gi = [mu[qa] * ga[a][0], mu[qa] * ga[a][1]];
                let row = &mut block[a * n..(a + 1) * n];
                for (r, yj) in row.iter_mut().zip(&y) {
                    *r += gi[0] * yj[0] + gi[1] * yj[1];
                }
                for (b, &j) in dofs.iter().enumerate() {
                    let ag = mat_vec(&a_loc, ga[b]);
                    row[j] -= gi[0] * ag[0] + gi[1] * ag[1];
                }
            }
        }
        block
    });

    let mut l = DMatrix::<f64>::zeros(n, n);
    for (cell, block) in blocks.iter().enumerate() {
        for (a, &i) in space.cell_dofs(cell).iter().enumerate() {
            let row = &block[a * n..(a + 1) * n];
            for (j, v) in row.iter().enumerate() {
                l[(i, j)] += v;
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (l[(i, j)] + l[(j, i)]);
            l[(i, j)] = v;
            l[(j, i)] = v;
        }
    }
    Ok(LandauMatrix {
        entries: l,
        f_snapshot: f.to_vec(),
    })
}

/// `G g = M^{-1} L M^{-1} g`, so that `(A, B)_h = grad A . G grad B`.
pub fn bracket_apply(mass: &MassMatrix, landau: &LandauMatrix, g: &[f64]) -> Result<Vec<f64>> {
    check_len(mass.dim(), landau.dim())?;
    check_len(mass.dim(), g.len())?;
    let lifted = mass.lift_gradient(g)?;
    mass.solve(&landau.apply(&lifted))
}

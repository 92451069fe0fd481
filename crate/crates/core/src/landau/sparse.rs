use super::tensor::{landau_tensor, mat_vec, LandauTensorParams, Mat2};
use crate::discretization::Discretization;
use crate::error::{check_len, Error, Result};
use crate::linalg::CsrMatrix;
use crate::parallel::map_indexed;
use crate::thermo::ThermoModel;

/// Sparse form of `L(f_half) y` for linear mobility: `C(f_half, y) f_half`.
///
/// With `D(q) = sum_q'' w'' f'' U(q, q'')` and
/// `K(q) = sum_q'' w'' f'' U(q, q'') grad y(q'')`,
/// `C_ij = sum_q w_q phi_j(q) dphi_i(q) . (K(q) - D(q) grad y(q))`.
/// `C` shares the mass-matrix stencil.
#[derive(Debug, Clone)]
pub struct SparseCollisionOperator {
    pub d_field: Vec<Mat2>,
    pub k_field: Vec<[f64; 2]>,
    pub c: CsrMatrix,
    /// The potential `y = M^{-1} grad F` used for assembly.
    pub w_snapshot: Vec<f64>,
}

pub fn assemble_sparse_operator(
    disc: &Discretization,
    f_half: &[f64],
    potential: &[f64],
    model: &ThermoModel,
    params: &LandauTensorParams,
) -> Result<SparseCollisionOperator> {
    if !model.mobility_is_linear() {
        return Err(Error::Capability(
            "sparse collision operator requires unclamped Maxwell–Boltzmann mobility M(f) = f"
                .into(),
        ));
    }
    check_len(disc.n_dof(), f_half.len())?;
    check_len(disc.n_dof(), potential.len())?;
    let t = &disc.tables;
    let space = &disc.space;
    let coords = t.coords();
    let np = t.n_points();

    let fq = disc.values_at_quad(f_half);
    for &v in &fq {
        model.check_domain(v)?;
    }
    let rho: Vec<f64> = fq.iter().zip(t.weights()).map(|(f, w)| f * w).collect();
    let grad_y = t.eval_grads(space, potential);

    let fields: Vec<(Mat2, [f64; 2])> = map_indexed(np, |qa| {
        let mut d = [[0.0f64; 2]; 2];
        let mut k = [0.0f64; 2];
        for qb in 0..np {
            if rho[qb] == 0.0 {
                continue;
            }
            let u = landau_tensor(coords[qa], coords[qb], params);
            let su = [
                [rho[qb] * u[0][0], rho[qb] * u[0][1]],
                [rho[qb] * u[1][0], rho[qb] * u[1][1]],
            ];
            for r in 0..2 {
                for c in 0..2 {
                    d[r][c] += su[r][c];
                }
            }
            let v = mat_vec(&su, grad_y[qb]);
            k[0] += v[0];
            k[1] += v[1];
        }
        (d, k)
    });
    let (d_field, k_field): (Vec<Mat2>, Vec<[f64; 2]>) = fields.into_iter().unzip();

    let mut c = CsrMatrix::from_groups(disc.n_dof(), space.cells_dofs());
    let nl = t.n_local();
    let mut local = vec![0.0; nl * nl];
    for cell in 0..t.n_cells() {
        local.iter_mut().for_each(|x| *x = 0.0);
        for q in t.cell_points(cell) {
            let dg = mat_vec(&d_field[q], grad_y[q]);
            let flux = [
                t.weights()[q] * (k_field[q][0] - dg[0]),
                t.weights()[q] * (k_field[q][1] - dg[1]),
            ];
            let phi = t.values(q);
            for (a, g) in t.grads(q).iter().enumerate() {
                let gf = g[0] * flux[0] + g[1] * flux[1];
                for b in 0..nl {
                    local[a * nl + b] += gf * phi[b];
                }
            }
        }
        let dofs = space.cell_dofs(cell);
        for a in 0..nl {
            for b in 0..nl {
                c.add(dofs[a], dofs[b], local[a * nl + b]);
            }
        }
    }
    Ok(SparseCollisionOperator {
        d_field,
        k_field,
        c,
        w_snapshot: potential.to_vec(),
    })
}

/// `C f_half`, the collision right-hand side divided by the time step.
pub fn sparse_apply(op: &SparseCollisionOperator, f_half: &[f64]) -> Result<Vec<f64>> {
    check_len(op.c.n_cols(), f_half.len())?;
    Ok(op.c.mul_vec(f_half))
}

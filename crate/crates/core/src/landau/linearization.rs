use nalgebra::DMatrix;

use super::dense::weighted_mobility;
use super::tensor::{landau_tensor, mat_vec, LandauTensorParams};
use crate::discretization::Discretization;
use crate::error::{check_len, Result};
use crate::parallel::map_indexed;
use crate::thermo::ThermoModel;

/// Jacobian of `f -> L(f) y` for a fixed potential `y`.
///
/// With `Z(q') = sum_q'' mu'' U(q', q'') (grad y'' - grad y')` the action is
/// `(L(f) y)_i = sum_q' mu' dphi_i(q') . Z(q')`, and both `mu'` and `mu''`
/// depend on `f` through the mobility.
pub fn assemble_collision_jacobian(
    disc: &Discretization,
    f: &[f64],
    potential: &[f64],
    model: &ThermoModel,
    params: &LandauTensorParams,
) -> Result<DMatrix<f64>> {
    check_len(disc.n_dof(), f.len())?;
    check_len(disc.n_dof(), potential.len())?;
    let mu = weighted_mobility(disc, f, model)?;
    let t = &disc.tables;
    let space = &disc.space;
    let n = disc.n_dof();
    let nl = t.n_local();
    let np = t.n_points();
    let coords = t.coords();
    let grad_y = t.eval_grads(space, potential);
    let fq = disc.values_at_quad(f);
    let dmu: Vec<f64> = fq
        .iter()
        .zip(t.weights())
        .map(|(&v, &w)| w * model.mobility_derivative(v))
        .collect();

    let blocks: Vec<Vec<f64>> = map_indexed(t.n_cells(), |cell| {
        let mut block = vec![0.0; nl * n];
        let dofs = space.cell_dofs(cell);
        for qa in t.cell_points(cell) {
            let ga = t.grads(qa);
            let mut z = [0.0f64; 2];
            // Coefficient of phi_j(qb) in the nonlocal term, per point qb.
            let mut acc = vec![[0.0f64; 2]; np];
            for qb in 0..np {
                if mu[qb] == 0.0 && dmu[qb] == 0.0 {
                    continue;
                }
                let u = landau_tensor(coords[qa], coords[qb], params);
                let dy = [grad_y[qb][0] - grad_y[qa][0], grad_y[qb][1] - grad_y[qa][1]];
                let v = mat_vec(&u, dy);
                z[0] += mu[qb] * v[0];
                z[1] += mu[qb] * v[1];
                acc[qb] = [dmu[qb] * v[0], dmu[qb] * v[1]];
            }
            let vals = t.values(qa);
            for a in 0..nl {
                let row = &mut block[a * n..(a + 1) * n];
                // Variation of mu' at the outer point.
                let gz = ga[a][0] * z[0] + ga[a][1] * z[1];
                for (b, &j) in dofs.iter().enumerate() {
                    row[j] += dmu[qa] * vals[b] * gz;
                }
                if mu[qa] == 0.0 {
                    continue;
                }
                // Variation of mu'' inside Z.
                for (qb, c) in acc.iter().enumerate() {
                    let s = mu[qa] * (ga[a][0] * c[0] + ga[a][1] * c[1]);
                    if s == 0.0 {
                        continue;
                    }
                    let jdofs = space.cell_dofs(t.cell_of(qb));
                    for (phi, &j) in t.values(qb).iter().zip(jdofs) {
                        row[j] += s * phi;
                    }
                }
            }
        }
        block
    });

    let mut jac = DMatrix::<f64>::zeros(n, n);
    for (cell, block) in blocks.iter().enumerate() {
        for (a, &i) in space.cell_dofs(cell).iter().enumerate() {
            for (j, v) in block[a * n..(a + 1) * n].iter().enumerate() {
                jac[(i, j)] += v;
            }
        }
    }
    Ok(jac)
}

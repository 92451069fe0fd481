use super::{axpy, dot, norm2};

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

/// Restarted GMRES for `A x = b` from a zero initial guess. The operator is
/// supplied as a closure so it can be a finite-difference Jacobian action.
pub fn gmres<F>(mut apply: F, b: &[f64], restart: usize, tol: f64, max_iters: usize) -> GmresOutcome
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let n = b.len();
    let b_norm = norm2(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return GmresOutcome {
            solution: x,
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        };
    }
    let m = restart.max(1);
    let mut total = 0;
    let mut rel = 1.0;
    while total < max_iters {
        let ax = apply(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm2(&r);
        rel = beta / b_norm;
        if rel <= tol {
            return GmresOutcome {
                solution: x,
                iterations: total,
                relative_residual: rel,
                converged: true,
            };
        }
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        // Hessenberg columns, rotated in place.
        let mut h: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut cs: Vec<f64> = Vec::with_capacity(m);
        let mut sn: Vec<f64> = Vec::with_capacity(m);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..m {
            if total >= max_iters {
                break;
            }
            total += 1;
            let mut w = apply(&basis[k]);
            let mut col = vec![0.0; k + 2];
            // Modified Gram-Schmidt.
            for (j, v) in basis.iter().enumerate() {
                col[j] = dot(&w, v);
                axpy(-col[j], v, &mut w);
            }
            col[k + 1] = norm2(&w);
            for j in 0..k {
                let t = cs[j] * col[j] + sn[j] * col[j + 1];
                col[j + 1] = -sn[j] * col[j] + cs[j] * col[j + 1];
                col[j] = t;
            }
            let denom = col[k].hypot(col[k + 1]);
            let (c, s) = if denom == 0.0 {
                (1.0, 0.0)
            } else {
                (col[k] / denom, col[k + 1] / denom)
            };
            cs.push(c);
            sn.push(s);
            col[k] = c * col[k] + s * col[k + 1];
            g[k + 1] = -s * g[k];
            g[k] *= c;
            let sub_norm = col[k + 1];
            col.truncate(k + 1);
            h.push(col);
            k_used = k + 1;
            rel = g[k + 1].abs() / b_norm;
            if rel <= tol || sub_norm == 0.0 {
                break;
            }
            let inv = 1.0 / sub_norm;
            basis.push(w.iter().map(|v| v * inv).collect());
        }
        // Back substitution on the rotated triangle.
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in (i + 1)..k_used {
                s -= h[j][i] * y[j];
            }
            y[i] = s / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            axpy(*yj, &basis[j], &mut x);
        }
        if rel <= tol {
            return GmresOutcome {
                solution: x,
                iterations: total,
                relative_residual: rel,
                converged: true,
            };
        }
    }
    GmresOutcome {
        solution: x,
        iterations: total,
        relative_residual: rel,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_nonsymmetric_system_with_restarts() {
        let n = 40;
        let apply = |x: &[f64]| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    let mut s = 3.0 * x[i];
                    if i > 0 {
                        s -= 1.2 * x[i - 1];
                    }
                    if i + 1 < n {
                        s -= 0.7 * x[i + 1];
                    }
                    s
                })
                .collect()
        };
        let x_true: Vec<f64> = (0..n).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
        let b = apply(&x_true);
        let out = gmres(apply, &b, 8, 1e-12, 500);
        assert!(out.converged);
        for (a, e) in out.solution.iter().zip(&x_true) {
            assert!((a - e).abs() < 1e-9);
        }
    }
}

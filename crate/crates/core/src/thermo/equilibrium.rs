use nalgebra::{DMatrix, DVector};

use super::functionals::{entropy_gradient, entropy_hessian, MomentTargets};
use super::{ModelKind, ThermoModel};
use crate::discretization::{Discretization, PARTICLE_MASS};
use crate::error::{check_len, Error, Result};
use crate::fem::DistributionState;
use crate::linalg::norm2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumOptions {
    /// Euclidean norm of the stacked stationarity and moment residuals.
    pub tol: f64,
    pub max_iters: usize,
    pub max_halvings: usize,
}

impl Default for EquilibriumOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_iters: 100,
            max_halvings: 40,
        }
    }
}

/// Constrained entropy maximizer with its Casimir multipliers.
///
/// Sign convention: `grad S + lambda_m M1 + lambda_p . Mv + lambda_e (m/2) M eps = 0`,
/// so a Maxwellian at temperature `T` and drift `u` has `lambda_e = -1/T`
/// and `lambda_p = u / T`.
#[derive(Debug, Clone)]
pub struct EquilibriumSolution {
    pub f_eq: DistributionState,
    pub lambda_m: f64,
    pub lambda_p: [f64; 2],
    pub lambda_e: f64,
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Thermal energy per particle, `E/M - |P/M|^2 / 2`.
fn thermal_energy(t: &MomentTargets) -> f64 {
    let u = [t.momentum[0] / t.mass, t.momentum[1] / t.mass];
    t.energy / t.mass - 0.5 * PARTICLE_MASS * (u[0] * u[0] + u[1] * u[1])
}

fn check_targets(disc: &Discretization, t: &MomentTargets) -> Result<()> {
    let finite =
        t.mass.is_finite() && t.energy.is_finite() && t.momentum.iter().all(|p| p.is_finite());
    if !finite || t.mass <= 0.0 || t.energy <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "equilibrium targets need positive mass and energy, got mass {} energy {}",
            t.mass, t.energy
        )));
    }
    let e_th = thermal_energy(t);
    // A log-concave density on the box has no more spread than the uniform one.
    let bound = disc.v_max() * disc.v_max() / 3.0;
    if !(e_th > 0.0 && e_th < bound) {
        return Err(Error::InvalidConfig(format!(
            "moment targets are not realizable on [-{v}, {v}]^2: thermal energy per particle {e_th} \
             must lie in (0, {bound})",
            v = disc.v_max()
        )));
    }
    Ok(())
}

/// `M`-projection of the untruncated Maxwellian carrying the target moments.
pub fn maxwellian_guess(disc: &Discretization, targets: &MomentTargets) -> Result<Vec<f64>> {
    check_targets(disc, targets)?;
    let n = targets.mass;
    let u = [targets.momentum[0] / n, targets.momentum[1] / n];
    // Two velocity dimensions: thermal energy per particle equals T.
    let temp = thermal_energy(targets);
    let norm = n / (2.0 * std::f64::consts::PI * temp);
    disc.project(|v| {
        let d0 = v[0] - u[0];
        let d1 = v[1] - u[1];
        norm * (-(d0 * d0 + d1 * d1) / (2.0 * temp)).exp()
    })
}

/// Fraction of the distance to a singular endpoint of `s` one step may cover.
const BOUNDARY_FRACTION: f64 = 0.9;

fn interior_margin(model: &ThermoModel, v: f64) -> f64 {
    match model.kind {
        ModelKind::MaxwellBoltzmann => v,
        ModelKind::FermiDirac => v.min(1.0 - v),
    }
}

/// Largest step in `(0, 1]` keeping every quadrature value strictly inside
/// the smooth part of the entropy, as in interior-point methods.
fn max_interior_step(disc: &Discretization, model: &ThermoModel, f: &[f64], dir: &[f64]) -> f64 {
    let vals = disc.values_at_quad(f);
    let dvals = disc.values_at_quad(dir);
    let mut alpha: f64 = 1.0;
    for (&v, &dv) in vals.iter().zip(&dvals) {
        if interior_margin(model, v) <= model.f_floor {
            continue;
        }
        if dv < 0.0 {
            alpha = alpha.min(BOUNDARY_FRACTION * v / -dv);
        }
        if model.kind == ModelKind::FermiDirac && dv > 0.0 {
            alpha = alpha.min(BOUNDARY_FRACTION * (1.0 - v) / dv);
        }
    }
    alpha
}

/// Blends `f` toward the uniform state of the same mass until no quadrature
/// value sits on the linear continuation of `s`. Projections of Maxwellians
/// undershoot in the tails, and starting there stalls Newton.
fn lift_into_interior(
    disc: &Discretization,
    model: &ThermoModel,
    targets: &MomentTargets,
    f: &mut [f64],
) {
    let area = disc.space.mesh().area();
    let level = targets.mass / area;
    if interior_margin(model, level) <= model.f_floor {
        return;
    }
    let uniform = disc.monomials.ones.iter().map(|o| o * level);
    let base: Vec<f64> = f.to_vec();
    for theta in [0.0, 1e-4, 1e-3, 1e-2, 0.05, 0.2, 0.5] {
        let trial: Vec<f64> = base
            .iter()
            .zip(uniform.clone())
            .map(|(a, u)| (1.0 - theta) * a + theta * u)
            .collect();
        let ok = disc
            .values_at_quad(&trial)
            .iter()
            .all(|&v| interior_margin(model, v) > 1e3 * model.f_floor);
        if ok {
            f.copy_from_slice(&trial);
            return;
        }
    }
}

struct Kkt<'a> {
    disc: &'a Discretization,
    model: &'a ThermoModel,
    targets: [f64; 4],
}

impl Kkt<'_> {
    fn loads(&self) -> [&[f64]; 4] {
        [
            self.disc.mass_load(),
            self.disc.momentum_load(0),
            self.disc.momentum_load(1),
            self.disc.energy_load(),
        ]
    }

    fn residual(&self, f: &[f64], lambda: &[f64; 4]) -> Vec<f64> {
        let loads = self.loads();
        let mut r = entropy_gradient(self.disc, f, self.model);
        for (load, l) in loads.iter().zip(lambda) {
            for (ri, li) in r.iter_mut().zip(load.iter()) {
                *ri += l * li;
            }
        }
        for (load, t) in loads.iter().zip(&self.targets) {
            let m: f64 = load.iter().zip(f).map(|(a, b)| a * b).sum();
            r.push(m - t);
        }
        r
    }

    fn jacobian(&self, f: &[f64]) -> DMatrix<f64> {
        let n = f.len();
        let mut j = DMatrix::zeros(n + 4, n + 4);
        j.view_mut((0, 0), (n, n))
            .copy_from(&entropy_hessian(self.disc, f, self.model));
        for (c, load) in self.loads().iter().enumerate() {
            for (i, &v) in load.iter().enumerate() {
                j[(i, n + c)] = v;
                j[(n + c, i)] = v;
            }
        }
        j
    }

    /// Least-squares multipliers for a fixed `f`.
    fn fit_multipliers(&self, f: &[f64]) -> [f64; 4] {
        let n = f.len();
        let loads = self.loads();
        let a = DMatrix::from_fn(n, 4, |i, c| loads[c][i]);
        let g = DVector::from_vec(entropy_gradient(self.disc, f, self.model));
        let ata = a.transpose() * &a;
        let atg = a.transpose() * g;
        let sol = ata.lu().solve(&(-atg)).unwrap_or_else(|| DVector::zeros(4));
        [sol[0], sol[1], sol[2], sol[3]]
    }
}

/// Damped Newton on the stationarity conditions of the free energy under the
/// Casimir constraints. `init = None` starts from [`maxwellian_guess`].
pub fn solve_equilibrium(
    disc: &Discretization,
    model: &ThermoModel,
    targets: &MomentTargets,
    init: Option<&DistributionState>,
    opts: &EquilibriumOptions,
) -> Result<EquilibriumSolution> {
    model.validate()?;
    check_targets(disc, targets)?;
    let (mut f, time) = match init {
        Some(s) => {
            s.check_space(&disc.space)?;
            (s.coeffs.clone(), s.time)
        }
        None => (maxwellian_guess(disc, targets)?, 0.0),
    };
    let n = f.len();
    check_len(disc.n_dof(), n)?;
    let kkt = Kkt {
        disc,
        model,
        targets: [
            targets.mass,
            targets.momentum[0],
            targets.momentum[1],
            targets.energy,
        ],
    };
    lift_into_interior(disc, model, targets, &mut f);
    let mut lambda = kkt.fit_multipliers(&f);
    let mut r = kkt.residual(&f, &lambda);
    let mut res = norm2(&r);
    let mut iterations = 0;
    while res > opts.tol {
        if iterations >= opts.max_iters || !res.is_finite() {
            return Err(Error::SolverFailure {
                iterations,
                residual: res,
                reason: "equilibrium Newton iteration did not converge".into(),
            });
        }
        iterations += 1;
        let rhs = -DVector::from_vec(r.clone());
        let delta = kkt
            .jacobian(&f)
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::SolverFailure {
                iterations,
                residual: res,
                reason: "singular equilibrium Jacobian".into(),
            })?;
        let dir: Vec<f64> = delta.iter().take(n).copied().collect();
        let mut alpha = max_interior_step(disc, model, &f, &dir);
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let f_try: Vec<f64> = f
                .iter()
                .zip(delta.iter())
                .map(|(a, d)| a + alpha * d)
                .collect();
            let mut l_try = lambda;
            for (c, l) in l_try.iter_mut().enumerate() {
                *l += alpha * delta[n + c];
            }
            let r_try = kkt.residual(&f_try, &l_try);
            let res_try = norm2(&r_try);
            if res_try < res {
                f = f_try;
                lambda = l_try;
                r = r_try;
                res = res_try;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            if res <= opts.tol * 10.0 {
                // Stalled at round-off just above the target.
                break;
            }
            return Err(Error::SolverFailure {
                iterations,
                residual: res,
                reason: "line search could not reduce the equilibrium residual".into(),
            });
        }
    }
    Ok(EquilibriumSolution {
        f_eq: DistributionState::new(f, time),
        lambda_m: lambda[0],
        lambda_p: [lambda[1], lambda[2]],
        lambda_e: lambda[3],
        residual_norm: res,
        iterations,
    })
}

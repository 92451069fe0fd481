use super::discrete_gradient::{discrete_gradient, DgKind, DiscreteGradientKind};
use crate::discretization::Discretization;
use crate::error::{Error, Result};
use crate::fem::DistributionState;
use crate::functional::Functional;
use crate::landau::{
    assemble_collision_jacobian, assemble_landau_dense, assemble_sparse_operator, sparse_apply,
    LandauTensorParams,
};
use crate::linalg::{axpy, dot, gmres, norm2};
use crate::thermo::{
    compute_invariants, entropy_average_hessian, entropy_hessian, EntropyFunctional, FreeEnergy,
    InvariantsRecord, ThermoModel,
};
use nalgebra::{DMatrix, DVector, Dyn};

/// Picard gives up once the residual grows this far past its first value.
const PICARD_BLOWUP: f64 = 1e3;
const LINE_SEARCH_HALVINGS: usize = 30;
/// Residual target for intermediate continuation stages.
const STAGE_TOL: f64 = 1e-8;
/// Smallest continuation increment, as a fraction of the time step.
const MIN_STAGE_FRACTION: f64 = 1.0 / 1024.0;
/// A Newton stage is abandoned when this many iterations fail to halve the
/// residual.
const STALL_WINDOW: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Picard,
    NewtonKrylov,
}

/// Dense: assemble `L(f_half)` explicitly. Sparse: assemble `C(f_n, f_next)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Dense,
    Sparse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovSettings {
    pub restart: usize,
    pub inner_tol: f64,
    pub max_inner_iters: usize,
    pub max_newton_iters: usize,
    /// Finite-difference step for Jacobian-vector products, relative to
    /// `1 + |f|`.
    pub fd_step: f64,
}

impl Default for KrylovSettings {
    fn default() -> Self {
        Self {
            restart: 30,
            inner_tol: 1e-6,
            max_inner_iters: 300,
            max_newton_iters: 40,
            fd_step: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    pub dt: f64,
    pub solver: SolverKind,
    /// Stop when `|M (f - f_n) - dt rhs(f)| / |M f_n|` drops to this value.
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub krylov: KrylovSettings,
    pub path: PathKind,
    /// Retry with Newton–Krylov from `f_n` when Picard fails.
    pub newton_fallback: bool,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            dt: 0.1,
            solver: SolverKind::Picard,
            picard_tol: 1e-12,
            picard_max_iters: 200,
            krylov: KrylovSettings::default(),
            path: PathKind::Sparse,
            newton_fallback: true,
        }
    }
}

impl StepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "integrator.dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.picard_tol > 0.0 && self.picard_tol < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "integrator.picard_tol must lie in (0, 1), got {}",
                self.picard_tol
            )));
        }
        if !(self.krylov.inner_tol > 0.0 && self.krylov.inner_tol < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "integrator.krylov_tol must lie in (0, 1), got {}",
                self.krylov.inner_tol
            )));
        }
        if self.krylov.restart == 0 {
            return Err(Error::InvalidConfig(
                "integrator.krylov_restart must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct StepReport {
    pub f_next: DistributionState,
    pub iterations: usize,
    pub residual_norm: f64,
    pub invariants_before: InvariantsRecord,
    pub invariants_after: InvariantsRecord,
    /// `S(f_next) - S(f_n)`, evaluated without cancelling against `S`.
    pub entropy_increment: f64,
}

/// Everything needed to advance one state by one step.
#[derive(Debug, Clone, Copy)]
pub struct Stepper<'a> {
    pub disc: &'a Discretization,
    pub model: &'a ThermoModel,
    pub config: StepConfig,
    pub dg: DiscreteGradientKind,
    pub params: LandauTensorParams,
}

impl<'a> Stepper<'a> {
    pub fn new(
        disc: &'a Discretization,
        model: &'a ThermoModel,
        config: StepConfig,
        dg: DiscreteGradientKind,
    ) -> Self {
        Self {
            disc,
            model,
            config,
            dg,
            params: LandauTensorParams::for_domain(disc.v_max()),
        }
    }

    fn free_energy(&self) -> FreeEnergy<'a> {
        FreeEnergy::new(self.disc, self.model)
    }

    /// Collision term `L(f_half) M^{-1} dg F(f_n, f)` along the chosen path.
    pub fn collision_rhs(&self, f_n: &[f64], f: &[f64]) -> Result<Vec<f64>> {
        let half: Vec<f64> = f_n.iter().zip(f).map(|(a, b)| 0.5 * (a + b)).collect();
        let dg = discrete_gradient(&self.dg, &self.free_energy(), f_n, f);
        let potential = self.disc.mass.lift_gradient(&dg)?;
        match self.config.path {
            PathKind::Dense => {
                let l = assemble_landau_dense(self.disc, &half, self.model, &self.params)?;
                Ok(l.apply(&potential))
            }
            PathKind::Sparse => {
                let op = assemble_sparse_operator(
                    self.disc,
                    &half,
                    &potential,
                    self.model,
                    &self.params,
                )?;
                sparse_apply(&op, &half)
            }
        }
    }

    /// `M (f - f_n) - tau rhs`; `tau` is the time step except in the
    /// continuation stages of Newton–Krylov.
    fn residual(&self, f_n: &[f64], f: &[f64], rhs: &[f64], tau: f64) -> Vec<f64> {
        let diff: Vec<f64> = f.iter().zip(f_n).map(|(a, b)| a - b).collect();
        let mut r = self.disc.mass.apply(&diff);
        for (ri, c) in r.iter_mut().zip(rhs) {
            *ri -= tau * c;
        }
        r
    }

    fn scale(&self, f_n: &[f64]) -> f64 {
        let s = norm2(&self.disc.mass.apply(f_n));
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    /// `f_n + dt M^{-1} rhs`; every such update carries the Casimirs of `f_n`.
    fn picard_update(&self, f_n: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
        let inc = self.disc.mass.solve(rhs)?;
        Ok(f_n
            .iter()
            .zip(&inc)
            .map(|(a, d)| a + self.config.dt * d)
            .collect())
    }

    pub fn step(&self, state: &DistributionState) -> Result<StepReport> {
        state.check_space(&self.disc.space)?;
        if self.config.path == PathKind::Sparse && !self.model.mobility_is_linear() {
            return Err(Error::Capability(
                "sparse path requires unclamped Maxwell–Boltzmann mobility".into(),
            ));
        }
        let f_n = &state.coeffs;
        let (f_next, iterations, residual_norm) = match self.config.solver {
            SolverKind::Picard => match self.solve_picard(f_n) {
                Ok(out) => out,
                Err(Error::StepperFailure { iterations, .. }) if self.config.newton_fallback => {
                    let (f, k, res) = self.solve_newton_krylov(f_n)?;
                    (f, iterations + k, res)
                }
                Err(e) => return Err(e),
            },
            SolverKind::NewtonKrylov => self.solve_newton_krylov(f_n)?,
        };
        let du: Vec<f64> = f_next.iter().zip(f_n).map(|(a, b)| a - b).collect();
        let entropy_increment = EntropyFunctional {
            disc: self.disc,
            model: self.model,
        }
        .increment(f_n, &du);
        let time = state.time + self.config.dt;
        Ok(StepReport {
            invariants_before: compute_invariants(self.disc, f_n, self.model, state.time),
            invariants_after: compute_invariants(self.disc, &f_next, self.model, time),
            f_next: DistributionState::new(f_next, time),
            iterations,
            residual_norm,
            entropy_increment,
        })
    }

    /// Plain fixed-point iteration. Every iterate conserves the Casimirs.
    fn solve_picard(&self, f_n: &[f64]) -> Result<(Vec<f64>, usize, f64)> {
        let scale = self.scale(f_n);
        let mut f = f_n.to_vec();
        let mut m = 0;
        let mut first = None;
        loop {
            let rhs = self.collision_rhs(f_n, &f)?;
            let res = norm2(&self.residual(f_n, &f, &rhs, self.config.dt)) / scale;
            if res <= self.config.picard_tol {
                return Ok((f, m, res));
            }
            let first_res = *first.get_or_insert(res);
            let diverged = !res.is_finite() || res > PICARD_BLOWUP * first_res;
            if m >= self.config.picard_max_iters || diverged {
                let reason = if diverged {
                    "Picard iteration diverged"
                } else {
                    "Picard iteration did not converge"
                };
                return Err(Error::StepperFailure {
                    iterations: m,
                    residual: res,
                    reason: reason.into(),
                    last_iterate: f,
                });
            }
            f = self.picard_update(f_n, &rhs)?;
            m += 1;
        }
    }

    /// Dense approximation of the residual Jacobian,
    /// `M - dt (L M^{-1} dG + J_L / 2)` at the midpoint, where `dG` is the
    /// derivative of the discrete gradient in `f_next` and `J_L` that of
    /// `L(f) y` at fixed `y`. Exact for the averaged gradient; for Gonzalez it
    /// drops the variation of the correction term.
    fn preconditioner(
        &self,
        f_n: &[f64],
        f: &[f64],
        tau: f64,
    ) -> Result<nalgebra::linalg::LU<f64, Dyn, Dyn>> {
        let n = f.len();
        let half: Vec<f64> = f_n.iter().zip(f).map(|(a, b)| 0.5 * (a + b)).collect();
        let dg = discrete_gradient(&self.dg, &self.free_energy(), f_n, f);
        let potential = self.disc.mass.lift_gradient(&dg)?;
        let l = assemble_landau_dense(self.disc, &half, self.model, &self.params)?;
        let jl =
            assemble_collision_jacobian(self.disc, &half, &potential, self.model, &self.params)?;
        // Derivative of the discrete gradient of S in f_next.
        let hess_s = match self.dg.kind {
            DgKind::Average => entropy_average_hessian(self.disc, f_n, f, self.model),
            DgKind::GonzalezMidpoint => entropy_hessian(self.disc, &half, self.model) * 0.5,
        };
        let mut lifted = DMatrix::zeros(n, n);
        for j in 0..n {
            // F = E - S with E linear.
            let col: Vec<f64> = hess_s.column(j).iter().map(|v| -v).collect();
            let y = self.disc.mass.solve(&col)?;
            lifted.column_mut(j).copy_from_slice(&y);
        }
        let mut p = (&l.entries * lifted + jl * 0.5) * (-tau);
        let mass = self.disc.mass.matrix();
        for i in 0..n {
            for (j, v) in mass.row(i) {
                p[(i, j)] += v;
            }
        }
        Ok(p.lu())
    }

    /// Jacobian-free Newton–Krylov with the dense preconditioner above and a
    /// backtracking line search on the residual norm.
    ///
    /// At large mass the step is too stiff for Newton from `f_n`, so a failed
    /// solve is retried by continuation in the step length: the equation is
    /// solved for `tau < dt` first and each solution seeds the next, longer
    /// stage. Only the final stage, at `tau = dt`, is the step itself.
    fn solve_newton_krylov(&self, f_n: &[f64]) -> Result<(Vec<f64>, usize, f64)> {
        let dt = self.config.dt;
        let stage_tol = self.config.picard_tol.max(STAGE_TOL);
        let mut done = 0.0;
        let mut f = f_n.to_vec();
        let mut h = dt;
        let mut total = 0;
        loop {
            let tau = if done + h >= dt * (1.0 - 1e-12) {
                dt
            } else {
                done + h
            };
            // Extrapolate the stage path linearly in tau.
            let guess: Vec<f64> = if done > 0.0 {
                f_n.iter()
                    .zip(&f)
                    .map(|(a, b)| a + tau / done * (b - a))
                    .collect()
            } else {
                f_n.to_vec()
            };
            let tol = if tau == dt {
                self.config.picard_tol
            } else {
                stage_tol
            };
            match self.newton_stage(f_n, guess, tau, tol) {
                Ok((nf, k)) => {
                    total += k;
                    f = nf;
                    if tau == dt {
                        break;
                    }
                    done = tau;
                    h = (2.0 * h).min(dt - done);
                }
                Err(Error::StepperFailure {
                    iterations,
                    residual,
                    reason,
                    last_iterate,
                }) => {
                    total += iterations;
                    h *= 0.5;
                    if h < dt * MIN_STAGE_FRACTION {
                        return Err(Error::StepperFailure {
                            iterations: total,
                            residual,
                            reason: format!(
                                "{reason} (continuation reached tau = {done:e} of {dt:e})"
                            ),
                            last_iterate,
                        });
                    }
                }
                Err(e) => return Err(e),
            }
        }
        // Newton iterates satisfy the Casimir constraints only up to the
        // residual; put the final state back on them exactly.
        self.project_casimirs(f_n, &mut f)?;
        let rhs = self.collision_rhs(f_n, &f)?;
        let res = norm2(&self.residual(f_n, &f, &rhs, dt)) / self.scale(f_n);
        Ok((f, total, res))
    }

    /// Newton–Krylov for `M (f - f_n) = tau rhs(f_n, f)` from `f`. Gives up
    /// after the iteration budget or when the residual stagnates.
    fn newton_stage(
        &self,
        f_n: &[f64],
        mut f: Vec<f64>,
        tau: f64,
        tol: f64,
    ) -> Result<(Vec<f64>, usize)> {
        let scale = self.scale(f_n);
        let ks = self.config.krylov;
        let rhs = self.collision_rhs(f_n, &f)?;
        let mut r = self.residual(f_n, &f, &rhs, tau);
        let mut res = norm2(&r) / scale;
        let mut history = vec![res];
        let mut k = 0;
        let fail = |k: usize, res: f64, reason: &str, f: Vec<f64>| Error::StepperFailure {
            iterations: k,
            residual: res,
            reason: reason.into(),
            last_iterate: f,
        };
        while res > tol {
            let stalled = k >= STALL_WINDOW && res > 0.5 * history[k - STALL_WINDOW];
            if k >= ks.max_newton_iters || !res.is_finite() || stalled {
                return Err(fail(k, res, "Newton–Krylov iteration did not converge", f));
            }
            k += 1;
            let lu = self.preconditioner(f_n, &f, tau)?;
            let precond = |x: &[f64]| -> Vec<f64> {
                lu.solve(&DVector::from_column_slice(x))
                    .map(|v| v.as_slice().to_vec())
                    .unwrap_or_else(|| vec![f64::NAN; x.len()])
            };
            let f_norm = norm2(&f);
            let apply = |v: &[f64]| -> Vec<f64> {
                let vn = norm2(v);
                if vn == 0.0 {
                    return vec![0.0; v.len()];
                }
                let eps = ks.fd_step * (1.0 + f_norm) / vn;
                let shifted: Vec<f64> = f.iter().zip(v).map(|(a, b)| a + eps * b).collect();
                let jv: Vec<f64> = match self.collision_rhs(f_n, &shifted) {
                    Ok(rs) => self
                        .residual(f_n, &shifted, &rs, tau)
                        .iter()
                        .zip(&r)
                        .map(|(a, b)| (a - b) / eps)
                        .collect(),
                    Err(_) => vec![f64::NAN; v.len()],
                };
                precond(&jv)
            };
            let b: Vec<f64> = precond(&r).iter().map(|x| -x).collect();
            let out = gmres(apply, &b, ks.restart, ks.inner_tol, ks.max_inner_iters);
            // The finite-difference Krylov direction can lose descent where
            // the residual has kinks; the preconditioner's own Newton
            // direction is the fallback.
            let mut accepted = false;
            for dir in [&out.solution, &b] {
                if dir.iter().any(|v| !v.is_finite()) {
                    continue;
                }
                if let Some((nf, nr, nres)) = self.line_search(f_n, &f, dir, res, scale, tau) {
                    f = nf;
                    r = nr;
                    res = nres;
                    accepted = true;
                    break;
                }
            }
            if !accepted {
                return Err(fail(k, res, "Newton–Krylov line search stalled", f));
            }
            history.push(res);
        }
        Ok((f, k))
    }

    /// Backtracking along `dir` until the residual norm drops.
    fn line_search(
        &self,
        f_n: &[f64],
        f: &[f64],
        dir: &[f64],
        res: f64,
        scale: f64,
        tau: f64,
    ) -> Option<(Vec<f64>, Vec<f64>, f64)> {
        let mut alpha = 1.0;
        for _ in 0..LINE_SEARCH_HALVINGS {
            let trial: Vec<f64> = f.iter().zip(dir).map(|(a, d)| a + alpha * d).collect();
            if let Ok(trial_rhs) = self.collision_rhs(f_n, &trial) {
                let trial_r = self.residual(f_n, &trial, &trial_rhs, tau);
                let trial_res = norm2(&trial_r) / scale;
                if trial_res < (1.0 - 1e-4 * alpha) * res {
                    return Some((trial, trial_r, trial_res));
                }
            }
            alpha *= 0.5;
        }
        None
    }

    /// Smallest `M`-norm correction spanned by the Casimir monomials that
    /// restores the Casimir values of `f_n`.
    fn project_casimirs(&self, f_n: &[f64], f: &mut [f64]) -> Result<()> {
        let mono = &self.disc.monomials;
        let mut dirs: Vec<&[f64]> = vec![&mono.ones, &mono.v_hat[0], &mono.v_hat[1]];
        if self.disc.config.track_energy {
            dirs.push(mono.eps_hat()?);
        }
        let loads: Vec<Vec<f64>> = dirs.iter().map(|d| self.disc.mass.apply(d)).collect();
        let c = dirs.len();
        let gram = DMatrix::from_fn(c, c, |a, b| dot(&loads[a], dirs[b]));
        let diff = DVector::from_fn(c, |a, _| {
            loads[a]
                .iter()
                .zip(f_n.iter().zip(f.iter()))
                .map(|(l, (x, y))| l * (x - y))
                .sum()
        });
        let coef = gram
            .lu()
            .solve(&diff)
            .ok_or_else(|| Error::Assembly("singular Casimir Gram matrix".into()))?;
        for (d, cf) in dirs.iter().zip(coef.iter()) {
            axpy(*cf, d, f);
        }
        Ok(())
    }
}

pub fn step_dense(
    disc: &Discretization,
    state: &DistributionState,
    model: &ThermoModel,
    config: &StepConfig,
    dg: &DiscreteGradientKind,
) -> Result<StepReport> {
    let cfg = StepConfig {
        path: PathKind::Dense,
        ..*config
    };
    Stepper::new(disc, model, cfg, *dg).step(state)
}

pub fn step_sparse(
    disc: &Discretization,
    state: &DistributionState,
    model: &ThermoModel,
    config: &StepConfig,
    dg: &DiscreteGradientKind,
) -> Result<StepReport> {
    let cfg = StepConfig {
        path: PathKind::Sparse,
        ..*config
    };
    Stepper::new(disc, model, cfg, *dg).step(state)
}

#[derive(Debug)]
pub struct SimulationOutcome {
    pub reports: Vec<StepReport>,
    /// Set when a step failed; `reports` then holds the steps before it.
    pub failure: Option<Error>,
}

impl SimulationOutcome {
    pub fn final_state(&self) -> Option<&DistributionState> {
        self.reports.last().map(|r| &r.f_next)
    }
}

pub fn run_simulation(
    stepper: &Stepper<'_>,
    initial: &DistributionState,
    n_steps: usize,
) -> Result<SimulationOutcome> {
    run_simulation_with(stepper, initial, n_steps, |_| {})
}

/// Steps `n_steps` times, handing each report to `observe` as it is produced.
pub fn run_simulation_with<F: FnMut(&StepReport)>(
    stepper: &Stepper<'_>,
    initial: &DistributionState,
    n_steps: usize,
    mut observe: F,
) -> Result<SimulationOutcome> {
    if n_steps == 0 {
        return Err(Error::InvalidConfig(
            "integrator.n_steps must be at least 1".into(),
        ));
    }
    stepper.config.validate()?;
    initial.check_space(&stepper.disc.space)?;
    let mut reports = Vec::with_capacity(n_steps);
    let mut state = initial.clone();
    for _ in 0..n_steps {
        match stepper.step(&state) {
            Ok(report) => {
                observe(&report);
                state = report.f_next.clone();
                reports.push(report);
            }
            Err(e) => {
                return Ok(SimulationOutcome {
                    reports,
                    failure: Some(e),
                })
            }
        }
    }
    Ok(SimulationOutcome {
        reports,
        failure: None,
    })
}

use std::path::{Path, PathBuf};

use landau_core::integrator::{discrete_gradient, DiscreteGradientKind, StepReport, Stepper};
use landau_core::landau::{
    assemble_landau_dense, assemble_sparse_operator, sparse_apply, LandauTensorParams,
};
use landau_core::thermo::{
    compute_invariants, entropy_gradient, entropy_value, solve_equilibrium, EquilibriumOptions,
    EquilibriumSolution, FreeEnergy, MomentTargets, ThermoModel,
};
use landau_core::{Discretization, DistributionState, Functional};

use crate::config::{ConfigError, RunConfig};
use crate::initial::build_initial_condition;
use crate::output::{fmt_float, write_key_values, write_snapshot, DiagnosticsWriter, OutputError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] landau_core::Error),
    #[error(transparent)]
    Output(#[from] OutputError),
}

/// Everything built from a validated configuration, before any file is
/// touched.
pub struct Setup {
    pub disc: Discretization,
    pub model: ThermoModel,
    pub initial: DistributionState,
}

impl Setup {
    pub fn new(cfg: &RunConfig) -> Result<Self, CliError> {
        cfg.validate()?;
        let disc = Discretization::new(cfg.discretization())?;
        let model = cfg.model();
        model.validate()?;
        cfg.step_config().validate()?;
        let initial = build_initial_condition(&disc.space, &cfg.initial_condition)?;
        Ok(Self {
            disc,
            model,
            initial,
        })
    }
}

fn prepare_dir(dir: &Path) -> Result<(), OutputError> {
    std::fs::create_dir_all(dir).map_err(|source| OutputError {
        path: dir.to_path_buf(),
        source,
    })
}

#[derive(Debug)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub steps_completed: usize,
    /// The stepper error that stopped the run early, if any.
    pub failure: Option<landau_core::Error>,
}

/// Steps the initial condition, writing `diagnostics.csv` row by row and
/// `snapshot_<step>.csv` every `snapshot_stride` steps and at the end.
pub fn run_command(cfg: &RunConfig, output_dir: &Path) -> Result<RunSummary, CliError> {
    let setup = Setup::new(cfg)?;
    let disc = &setup.disc;
    let stepper = Stepper::new(
        disc,
        &setup.model,
        cfg.step_config(),
        cfg.discrete_gradient(),
    );
    prepare_dir(output_dir)?;
    let coords = disc.space.dof_coords();
    let stride = cfg.output.snapshot_stride;
    let snapshot = |step: usize, f: &[f64]| {
        write_snapshot(&output_dir.join(format!("snapshot_{step}.csv")), coords, f)
    };

    let mut diag = DiagnosticsWriter::create(&output_dir.join("diagnostics.csv"))?;
    let mut state = setup.initial.clone();
    diag.row(
        0,
        &compute_invariants(disc, &state.coeffs, &setup.model, state.time),
        0.0,
        0,
        0.0,
    )?;
    snapshot(0, &state.coeffs)?;

    let n_steps = cfg.integrator.n_steps;
    let mut failure = None;
    let mut completed = 0;
    for step in 1..=n_steps {
        let report: StepReport = match stepper.step(&state) {
            Ok(r) => r,
            Err(e) => {
                failure = Some(e);
                break;
            }
        };
        diag.row(
            step,
            &report.invariants_after,
            report.entropy_increment,
            report.iterations,
            report.residual_norm,
        )?;
        state = report.f_next;
        completed = step;
        if (stride > 0 && step % stride == 0) || step == n_steps {
            snapshot(step, &state.coeffs)?;
        }
    }
    if failure.is_some() && completed > 0 && (stride == 0 || completed % stride != 0) {
        snapshot(completed, &state.coeffs)?;
    }
    Ok(RunSummary {
        output_dir: output_dir.to_path_buf(),
        steps_completed: completed,
        failure,
    })
}

#[derive(Debug)]
pub struct EquilibriumSummary {
    pub targets: MomentTargets,
    pub solution: EquilibriumSolution,
}

/// Solves for the entropy maximizer with the initial condition's mass,
/// momentum and energy. Writes `snapshot_equilibrium.csv` and
/// `equilibrium.csv` (multipliers, residual, recomputed moments).
pub fn equilibrium_command(
    cfg: &RunConfig,
    output_dir: &Path,
) -> Result<EquilibriumSummary, CliError> {
    let setup = Setup::new(cfg)?;
    let disc = &setup.disc;
    let inv = compute_invariants(disc, &setup.initial.coeffs, &setup.model, 0.0);
    let targets = MomentTargets::from(&inv);
    let solution = solve_equilibrium(
        disc,
        &setup.model,
        &targets,
        None,
        &EquilibriumOptions::default(),
    )?;
    prepare_dir(output_dir)?;
    let f = &solution.f_eq.coeffs;
    write_snapshot(
        &output_dir.join("snapshot_equilibrium.csv"),
        disc.space.dof_coords(),
        f,
    )?;
    let eq = compute_invariants(disc, f, &setup.model, 0.0);
    let rows = [
        ("lambda_mass", fmt_float(solution.lambda_m)),
        ("lambda_momentum_x", fmt_float(solution.lambda_p[0])),
        ("lambda_momentum_y", fmt_float(solution.lambda_p[1])),
        ("lambda_energy", fmt_float(solution.lambda_e)),
        ("residual_norm", fmt_float(solution.residual_norm)),
        ("iterations", solution.iterations.to_string()),
        ("mass", fmt_float(eq.mass)),
        ("momentum_x", fmt_float(eq.momentum[0])),
        ("momentum_y", fmt_float(eq.momentum[1])),
        ("energy", fmt_float(eq.energy)),
        ("entropy", fmt_float(eq.entropy)),
    ];
    write_key_values(&output_dir.join("equilibrium.csv"), &rows)?;
    Ok(EquilibriumSummary { targets, solution })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The property held numerically but is not guaranteed for this input,
    /// e.g. definiteness with unclamped mobility and negative values of f_h.
    Conditional,
    /// Not applicable to this configuration.
    Skipped,
}

impl CheckStatus {
    pub fn label(self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Conditional => "CONDITIONAL",
            CheckStatus::Skipped => "SKIP",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

fn verdict(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

/// Deterministic companion state: the initial condition with a smooth
/// relative ripple, used as the second point of every two-point check.
fn companion(disc: &Discretization, f: &[f64]) -> Vec<f64> {
    disc.space
        .dof_coords()
        .iter()
        .zip(f)
        .map(|(c, v)| v * (1.0 + 0.2 * (0.9 * c[0] + 0.4).sin() * (0.7 * c[1]).cos()))
        .collect()
}

/// Invariant suite at the configured resolution, evaluated on the initial
/// condition and a rippled copy of it.
pub fn check_command(cfg: &RunConfig) -> Result<Vec<CheckOutcome>, CliError> {
    let setup = Setup::new(cfg)?;
    let disc = &setup.disc;
    let model = &setup.model;
    let params = LandauTensorParams::for_domain(disc.v_max());
    let f0 = setup.initial.coeffs.clone();
    let f1 = companion(disc, &f0);
    let mut out = Vec::new();

    let l = assemble_landau_dense(disc, &f0, model, &params)?;
    let max_abs = l.max_abs();
    let n = l.dim();
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            asym = asym.max((l.entries[(i, j)] - l.entries[(j, i)]).abs());
        }
    }
    out.push(CheckOutcome {
        name: "landau_symmetry",
        status: verdict(asym <= 1e-14 * max_abs),
        detail: format!("max |L - L^T| = {asym:e}, max |L| = {max_abs:e}"),
    });

    let mono = &disc.monomials;
    let mut annihilation: Vec<(&str, &[f64])> = vec![
        ("1", &mono.ones),
        ("v1", &mono.v_hat[0]),
        ("v2", &mono.v_hat[1]),
    ];
    if let Some(eps) = &mono.eps_hat {
        annihilation.push(("|v|^2", eps));
    }
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (label, c) in annihilation {
        let row = l.left_apply(c);
        let m = row.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        worst = worst.max(m);
        parts.push(format!("{label}: {m:e}"));
    }
    out.push(CheckOutcome {
        name: "casimir_annihilation",
        status: verdict(worst <= 1e-12 * max_abs),
        detail: parts.join(", "),
    });

    let eig = l.entries.clone().symmetric_eigen();
    let lam_max = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let spectral = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let min_quad = disc
        .values_at_quad(&f0)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let holds = lam_max <= 1e-10 * spectral;
    let guaranteed = model.clamp_mobility || min_quad >= 0.0;
    out.push(CheckOutcome {
        name: "negative_semidefinite",
        status: match (holds, guaranteed) {
            (false, true) => CheckStatus::Fail,
            (true, true) => CheckStatus::Pass,
            // Negative mobility values void the guarantee either way.
            (_, false) => CheckStatus::Conditional,
        },
        detail: format!(
            "max eigenvalue {lam_max:e}, spectral norm {spectral:e}, min f_h at quadrature {min_quad:e}"
        ),
    });

    let fe = FreeEnergy::new(disc, model);
    let f_scale = fe.value(&f0).abs().max(f64::MIN_POSITIVE);
    let mut dg_err: f64 = 0.0;
    let mut consistency: f64 = 0.0;
    for kind in [
        DiscreteGradientKind::gonzalez(),
        DiscreteGradientKind::average(),
    ] {
        for (a, b) in [(&f0, &f1), (&f1, &f0)] {
            let g = discrete_gradient(&kind, &fe, a, b);
            let du: Vec<f64> = b.iter().zip(a.iter()).map(|(x, y)| x - y).collect();
            let lhs: f64 = du.iter().zip(&g).map(|(x, y)| x * y).sum();
            let rhs = fe.increment(a, &du);
            dg_err = dg_err.max((lhs - rhs).abs() / f_scale);
        }
        let g = discrete_gradient(&kind, &fe, &f0, &f0);
        let exact = fe.gradient(&f0);
        let norm = exact.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let diff = g
            .iter()
            .zip(&exact)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        consistency = consistency.max(diff / norm);
    }
    out.push(CheckOutcome {
        name: "discrete_gradient_identity",
        status: verdict(dg_err <= 1e-12 && consistency <= 1e-14),
        detail: format!(
            "identity defect {dg_err:e} relative, consistency {consistency:e} relative"
        ),
    });

    // Central differences of S along the ripple direction.
    let dir: Vec<f64> = f1.iter().zip(&f0).map(|(a, b)| a - b).collect();
    let grad = entropy_gradient(disc, &f0, model);
    let exact: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
    let h = 1e-5;
    let shifted = |s: f64| -> Vec<f64> { f0.iter().zip(&dir).map(|(a, d)| a + s * d).collect() };
    let fd = (entropy_value(disc, &shifted(h), model) - entropy_value(disc, &shifted(-h), model))
        / (2.0 * h);
    let grad_err = (fd - exact).abs() / exact.abs().max(f64::MIN_POSITIVE);
    out.push(CheckOutcome {
        name: "entropy_gradient",
        status: verdict(grad_err <= 1e-6),
        detail: format!("directional derivative {exact:e}, central difference {fd:e}"),
    });

    if model.mobility_is_linear() {
        let half: Vec<f64> = f0.iter().zip(&f1).map(|(a, b)| 0.5 * (a + b)).collect();
        let g = discrete_gradient(&cfg.discrete_gradient(), &fe, &f0, &f1);
        let y = disc.mass.lift_gradient(&g)?;
        let dense = assemble_landau_dense(disc, &half, model, &params)?.apply(&y);
        let op = assemble_sparse_operator(disc, &half, &y, model, &params)?;
        let sparse = sparse_apply(&op, &half)?;
        let scale = dense.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let diff = dense
            .iter()
            .zip(&sparse)
            .fold(0.0f64, |a, (x, z)| a.max((x - z).abs()));
        out.push(CheckOutcome {
            name: "dense_sparse_equivalence",
            status: verdict(diff <= 1e-11 * scale),
            detail: format!("max difference {diff:e}, max entry {scale:e}"),
        });
    } else {
        out.push(CheckOutcome {
            name: "dense_sparse_equivalence",
            status: CheckStatus::Skipped,
            detail: "sparse operator needs the unclamped Maxwell–Boltzmann mobility".into(),
        });
    }
    Ok(out)
}

mod common;

use common::*;
use landau_core::integrator::{
    run_simulation, step_dense, step_sparse, DiscreteGradientKind, PathKind, SolverKind,
    StepConfig, StepReport, Stepper,
};
use landau_core::thermo::{
    compute_invariants, solve_equilibrium, EquilibriumOptions, InvariantsRecord, MomentTargets,
    ThermoModel,
};
use landau_core::{Discretization, DistributionState, Error};

fn drift(before: &InvariantsRecord, after: &InvariantsRecord) -> [f64; 4] {
    [
        (after.mass - before.mass).abs() / before.mass.abs(),
        (after.momentum[0] - before.momentum[0]).abs(),
        (after.momentum[1] - before.momentum[1]).abs(),
        (after.energy - before.energy).abs() / before.energy.abs(),
    ]
}

fn assert_conserved(disc: &Discretization, r: &StepReport, tol: f64) {
    let d = drift(&r.invariants_before, &r.invariants_after);
    let p_scale = r.invariants_before.mass * disc.v_max();
    assert!(d[0] <= tol && d[3] <= tol, "mass/energy drift {d:?}");
    assert!(
        d[1] <= tol * p_scale && d[2] <= tol * p_scale,
        "momentum drift {d:?}"
    );
}

fn equilibrium_of(disc: &Discretization, model: &ThermoModel, f0: &[f64]) -> Vec<f64> {
    let inv = compute_invariants(disc, f0, model, 0.0);
    let sol = solve_equilibrium(
        disc,
        model,
        &MomentTargets::from(&inv),
        None,
        &EquilibriumOptions::default(),
    )
    .unwrap();
    assert!(sol.residual_norm <= 1e-10);
    sol.f_eq.coeffs
}

#[test]
fn equilibrium_is_a_fixed_point_of_both_paths() {
    let disc = reference();
    let model = ThermoModel::default();
    let f_eq = equilibrium_of(&disc, &model, &bi_maxwellian(&disc, 0.5));
    let state = DistributionState::new(f_eq.clone(), 0.0);
    let cfg = StepConfig::default();
    for dg in [
        DiscreteGradientKind::gonzalez(),
        DiscreteGradientKind::average(),
    ] {
        for report in [
            step_dense(&disc, &state, &model, &cfg, &dg).unwrap(),
            step_sparse(&disc, &state, &model, &cfg, &dg).unwrap(),
        ] {
            let moved = disc.mass.norm(&diff(&report.f_next.coeffs, &f_eq));
            assert!(moved <= 1e-10 * disc.mass.norm(&f_eq), "{moved:e}");
            assert!(report.residual_norm <= cfg.picard_tol);
        }
    }
}

#[test]
fn equilibrium_run_keeps_invariants_flat() {
    let disc = coarse();
    let model = ThermoModel::default();
    let f_eq = equilibrium_of(&disc, &model, &bi_maxwellian(&disc, 0.5));
    let stepper = Stepper::new(
        &disc,
        &model,
        StepConfig::default(),
        DiscreteGradientKind::gonzalez(),
    );
    let out = run_simulation(&stepper, &DistributionState::new(f_eq, 0.0), 50).unwrap();
    assert!(out.failure.is_none());
    let first = &out.reports[0].invariants_before;
    for r in &out.reports {
        let d = drift(first, &r.invariants_after);
        assert!(d.iter().all(|x| *x <= 1e-10), "{d:?}");
        assert!((r.invariants_after.entropy - first.entropy).abs() <= 1e-10 * first.entropy.abs());
    }
}

#[test]
fn sparse_conservation_does_not_depend_on_the_tolerance() {
    // Every Picard iterate solves the update equation exactly, so even a
    // loose solve conserves the Casimirs to rounding. Picard needs data
    // without decades of variation inside a cell to contract at dt = 0.1.
    let disc = reference();
    let model = ThermoModel::default();
    let state = DistributionState::new(uniform_state(&disc, &mut rng(3), 0.01, 0.02), 0.0);
    for tol in [1e-4, 1e-12] {
        let cfg = StepConfig {
            picard_tol: tol,
            newton_fallback: false,
            ..StepConfig::default()
        };
        let stepper = Stepper::new(&disc, &model, cfg, DiscreteGradientKind::gonzalez());
        let out = run_simulation(&stepper, &state, 3).unwrap();
        assert!(out.failure.is_none(), "{:?}", out.failure);
        for r in &out.reports {
            assert!(r.iterations > 0);
            assert_conserved(&disc, r, 1e-11);
        }
    }
}

#[test]
fn entropy_grows_from_a_bi_maxwellian() {
    let disc = reference();
    let model = ThermoModel {
        clamp_mobility: true,
        ..ThermoModel::default()
    };
    let cfg = StepConfig {
        solver: SolverKind::NewtonKrylov,
        path: PathKind::Dense,
        ..StepConfig::default()
    };
    let stepper = Stepper::new(&disc, &model, cfg, DiscreteGradientKind::average());
    let out = run_simulation(
        &stepper,
        &DistributionState::new(bi_maxwellian(&disc, 0.5), 0.0),
        3,
    )
    .unwrap();
    assert!(out.failure.is_none(), "{:?}", out.failure);
    for r in &out.reports {
        assert_conserved(&disc, r, 1e-11);
        assert!(r.entropy_increment > 1e-10, "{}", r.entropy_increment);
        assert!(r.residual_norm <= cfg.picard_tol);
    }
}

#[test]
fn stepping_is_deterministic() {
    let disc = coarse();
    let model = ThermoModel::default();
    let state = DistributionState::new(bi_maxwellian(&disc, 0.05), 0.0);
    let stepper = Stepper::new(
        &disc,
        &model,
        StepConfig::default(),
        DiscreteGradientKind::average(),
    );
    let a = run_simulation(&stepper, &state, 3).unwrap();
    let b = run_simulation(&stepper, &state, 3).unwrap();
    for (x, y) in a.reports.iter().zip(&b.reports) {
        assert_eq!(x.f_next, y.f_next);
        assert_eq!(x.iterations, y.iterations);
        assert_eq!(x.residual_norm.to_bits(), y.residual_norm.to_bits());
    }
}

#[test]
fn zero_steps_is_a_configuration_error() {
    let disc = coarse();
    let model = ThermoModel::default();
    let stepper = Stepper::new(
        &disc,
        &model,
        StepConfig::default(),
        DiscreteGradientKind::gonzalez(),
    );
    let state = DistributionState::new(bi_maxwellian(&disc, 0.5), 0.0);
    assert!(matches!(
        run_simulation(&stepper, &state, 0),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn sparse_path_rejects_clamped_mobility() {
    let disc = coarse();
    let model = ThermoModel {
        clamp_mobility: true,
        ..ThermoModel::default()
    };
    let state = DistributionState::new(bi_maxwellian(&disc, 0.5), 0.0);
    let err = step_sparse(
        &disc,
        &state,
        &model,
        &StepConfig::default(),
        &DiscreteGradientKind::gonzalez(),
    );
    assert!(matches!(err, Err(Error::Capability(_))));
}

#[test]
fn failed_picard_reports_the_last_iterate() {
    let disc = coarse();
    let model = ThermoModel::default();
    let cfg = StepConfig {
        picard_max_iters: 2,
        newton_fallback: false,
        ..StepConfig::default()
    };
    let state = DistributionState::new(bi_maxwellian(&disc, 0.5), 0.0);
    match step_sparse(
        &disc,
        &state,
        &model,
        &cfg,
        &DiscreteGradientKind::gonzalez(),
    ) {
        Err(Error::StepperFailure {
            iterations,
            residual,
            last_iterate,
            ..
        }) => {
            assert_eq!(last_iterate.len(), disc.n_dof());
            assert!(iterations <= 2 && residual > cfg.picard_tol);
        }
        other => panic!("expected a stepper failure, got {other:?}"),
    }
}

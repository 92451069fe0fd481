mod common;

use common::*;
use landau_core::landau::{assemble_landau_dense, LandauTensorParams};
use landau_core::thermo::ThermoModel;

fn largest_eigenvalue_and_norm(l: &landau_core::landau::LandauMatrix) -> (f64, f64) {
    let eig = l.entries.clone().symmetric_eigen();
    let top = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let norm = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (top, norm)
}

#[test]
fn casimirs_are_annihilated_for_arbitrary_coefficients() {
    let disc = reference();
    let model = ThermoModel::default();
    let params = LandauTensorParams::for_domain(disc.v_max());
    let mut r = rng(11);
    let mono = &disc.monomials;
    let eps = mono.eps_hat().unwrap();
    for k in 0..20 {
        // Half of the states are sign-indefinite.
        let f = if k % 2 == 0 {
            uniform_state(&disc, &mut r, -1.0, 1.0)
        } else {
            random_mixture(&disc, &mut r, 1.0)
        };
        let l = assemble_landau_dense(&disc, &f, &model, &params).unwrap();
        let scale = l.max_abs();
        for c in [&mono.ones[..], &mono.v_hat[0], &mono.v_hat[1], eps] {
            let row = l.left_apply(c);
            assert!(
                max_abs(&row) <= 1e-12 * scale,
                "state {k}: {} vs {scale}",
                max_abs(&row)
            );
        }
    }
}

#[test]
fn matrix_is_exactly_symmetric() {
    let disc = coarse();
    let f = random_mixture(&disc, &mut rng(5), 2.0);
    let params = LandauTensorParams::for_domain(disc.v_max());
    let l = assemble_landau_dense(&disc, &f, &ThermoModel::default(), &params).unwrap();
    assert_eq!(l.entries, l.entries.transpose());
}

#[test]
fn negative_semidefinite_for_nonnegative_states() {
    let disc = reference();
    let model = ThermoModel::default();
    let params = LandauTensorParams::for_domain(disc.v_max());
    let mut r = rng(12);
    let mut checked = 0;
    for k in 0..20 {
        let f = if k % 2 == 0 {
            uniform_state(&disc, &mut r, 1.0, 2.0)
        } else {
            uniform_state(&disc, &mut r, 0.0, 1.0)
                .iter()
                .map(|x| x * x * 0.1 + 1e-3)
                .collect()
        };
        if min_at_quadrature(&disc, &f) < 0.0 {
            continue;
        }
        let l = assemble_landau_dense(&disc, &f, &model, &params).unwrap();
        let (top, norm) = largest_eigenvalue_and_norm(&l);
        assert!(top <= 1e-10 * norm, "state {k}: {top} vs {norm}");
        checked += 1;
    }
    assert!(checked >= 10, "only {checked} states were nonnegative");
}

#[test]
fn clamping_restores_definiteness_for_negative_lobes() {
    let disc = coarse();
    let params = LandauTensorParams::for_domain(disc.v_max());
    let f = uniform_state(&disc, &mut rng(13), -1.0, 1.0);
    assert!(min_at_quadrature(&disc, &f) < 0.0);
    let unclamped = assemble_landau_dense(&disc, &f, &ThermoModel::default(), &params).unwrap();
    let (top, norm) = largest_eigenvalue_and_norm(&unclamped);
    assert!(
        top > 1e-6 * norm,
        "expected an unstable direction, got {top}"
    );
    let clamped_model = ThermoModel {
        clamp_mobility: true,
        ..ThermoModel::default()
    };
    let clamped = assemble_landau_dense(&disc, &f, &clamped_model, &params).unwrap();
    let (top, norm) = largest_eigenvalue_and_norm(&clamped);
    assert!(top <= 1e-10 * norm, "{top} vs {norm}");
}

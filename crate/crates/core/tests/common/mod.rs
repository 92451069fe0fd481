#![allow(dead_code)]

use landau_core::{Discretization, DiscretizationConfig};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Degree 2 on 8x8 cells over [-5, 5]^2, quadrature order 3.
pub fn reference() -> Discretization {
    Discretization::new(DiscretizationConfig::default()).unwrap()
}

pub fn coarse() -> Discretization {
    Discretization::new(DiscretizationConfig {
        n_cells: 4,
        ..Default::default()
    })
    .unwrap()
}

/// Nodal interpolation of `sum w exp(-|v - c|^2 / 2T) / (2 pi T)`.
pub fn gaussians(disc: &Discretization, comps: &[(f64, [f64; 2], f64)]) -> Vec<f64> {
    disc.space.interpolate(|v| {
        comps
            .iter()
            .map(|&(w, c, t)| {
                let d2 = (v[0] - c[0]).powi(2) + (v[1] - c[1]).powi(2);
                w * (-d2 / (2.0 * t)).exp() / (2.0 * std::f64::consts::PI * t)
            })
            .sum()
    })
}

/// Two Gaussians at (+-2, 0) with temperature 0.8, `weight` each.
pub fn bi_maxwellian(disc: &Discretization, weight: f64) -> Vec<f64> {
    gaussians(
        disc,
        &[(weight, [-2.0, 0.0], 0.8), (weight, [2.0, 0.0], 0.8)],
    )
}

/// Coefficients in `[lo, hi]`. With `lo > 0` and `hi < 2.5 lo` the degree-2
/// interpolant stays positive between nodes as well.
pub fn uniform_state(disc: &Discretization, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Vec<f64> {
    (0..disc.n_dof()).map(|_| rng.gen_range(lo..hi)).collect()
}

/// A positive, smooth, randomly placed Gaussian mixture.
pub fn random_mixture(disc: &Discretization, rng: &mut ChaCha8Rng, mass: f64) -> Vec<f64> {
    let n = rng.gen_range(1..4);
    let comps: Vec<(f64, [f64; 2], f64)> = (0..n)
        .map(|_| {
            (
                mass / n as f64,
                [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)],
                rng.gen_range(0.8..2.0),
            )
        })
        .collect();
    gaussians(disc, &comps)
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn min_at_quadrature(disc: &Discretization, f: &[f64]) -> f64 {
    disc.values_at_quad(f)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

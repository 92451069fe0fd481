use nalgebra::DMatrix;

use super::ThermoModel;
use crate::discretization::Discretization;
use crate::functional::Functional;
use crate::linalg::sub;

/// Discrete mass, momentum, kinetic energy, entropy and free energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantsRecord {
    pub time: f64,
    pub mass: f64,
    pub momentum: [f64; 2],
    pub energy: f64,
    pub entropy: f64,
    pub free_energy: f64,
}

/// Casimir values an equilibrium has to reproduce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentTargets {
    pub mass: f64,
    pub momentum: [f64; 2],
    pub energy: f64,
}

impl From<&InvariantsRecord> for MomentTargets {
    fn from(r: &InvariantsRecord) -> Self {
        Self {
            mass: r.mass,
            momentum: r.momentum,
            energy: r.energy,
        }
    }
}

pub fn compute_invariants(
    disc: &Discretization,
    f: &[f64],
    model: &ThermoModel,
    time: f64,
) -> InvariantsRecord {
    let energy = disc.energy_of(f);
    let entropy = entropy_value(disc, f, model);
    InvariantsRecord {
        time,
        mass: disc.mass_of(f),
        momentum: disc.momentum_of(f),
        energy,
        entropy,
        free_energy: energy - entropy,
    }
}

/// `S = sum_q w_q s(f_h(q))`
pub fn entropy_value(disc: &Discretization, f: &[f64], model: &ThermoModel) -> f64 {
    let vals = disc.values_at_quad(f);
    disc.tables
        .weights()
        .iter()
        .zip(&vals)
        .map(|(w, &fq)| w * model.entropy_density(fq).0)
        .sum()
}

/// `(grad S)_i = sum_q w_q phi_i(q) s_f(f_h(q))`, the projection of `s_f`.
pub fn entropy_gradient(disc: &Discretization, f: &[f64], model: &ThermoModel) -> Vec<f64> {
    let slopes: Vec<f64> = disc
        .values_at_quad(f)
        .into_iter()
        .map(|fq| model.entropy_density(fq).1)
        .collect();
    disc.tables.project_pointwise(&disc.space, &slopes)
}

/// Dense `sum_q w_q s_ff(f_h(q)) phi_i phi_j`.
pub fn entropy_hessian(disc: &Discretization, f: &[f64], model: &ThermoModel) -> DMatrix<f64> {
    let curv: Vec<f64> = disc
        .values_at_quad(f)
        .into_iter()
        .map(|fq| model.entropy_curvature(fq))
        .collect();
    weighted_gram(disc, &curv)
}

/// Exact segment average of `grad S` from `f` to `f_next`: the projection of
/// the pointwise secant slopes of `s`.
pub fn entropy_average_gradient(
    disc: &Discretization,
    f: &[f64],
    f_next: &[f64],
    model: &ThermoModel,
) -> Vec<f64> {
    let a = disc.values_at_quad(f);
    let b = disc.values_at_quad(f_next);
    let slopes: Vec<f64> = a
        .iter()
        .zip(&b)
        .map(|(&x, &y)| model.entropy_secant(x, y).0)
        .collect();
    disc.tables.project_pointwise(&disc.space, &slopes)
}

/// Derivative of [`entropy_average_gradient`] with respect to `f_next`.
pub fn entropy_average_hessian(
    disc: &Discretization,
    f: &[f64],
    f_next: &[f64],
    model: &ThermoModel,
) -> DMatrix<f64> {
    let a = disc.values_at_quad(f);
    let b = disc.values_at_quad(f_next);
    let curv: Vec<f64> = a
        .iter()
        .zip(&b)
        .map(|(&x, &y)| model.entropy_secant(x, y).1)
        .collect();
    weighted_gram(disc, &curv)
}

/// Dense `sum_q w_q c_q phi_i phi_j`.
fn weighted_gram(disc: &Discretization, c: &[f64]) -> DMatrix<f64> {
    let n = disc.n_dof();
    let t = &disc.tables;
    let mut h = DMatrix::zeros(n, n);
    for (q, &cq) in c.iter().enumerate() {
        let wc = t.weights()[q] * cq;
        let dofs = disc.space.cell_dofs(t.cell_of(q));
        let phi = t.values(q);
        for (a, &i) in dofs.iter().enumerate() {
            for (b, &j) in dofs.iter().enumerate() {
                h[(i, j)] += wc * (phi[a] * phi[b]);
            }
        }
    }
    h
}

/// `grad F = (m/2) M eps - grad S`
pub fn free_energy_gradient(disc: &Discretization, f: &[f64], model: &ThermoModel) -> Vec<f64> {
    sub(disc.energy_load(), &entropy_gradient(disc, f, model))
}

/// Entropy as a [`Functional`] over the coefficient vector.
#[derive(Debug, Clone, Copy)]
pub struct EntropyFunctional<'a> {
    pub disc: &'a Discretization,
    pub model: &'a ThermoModel,
}

impl Functional for EntropyFunctional<'_> {
    fn value(&self, u: &[f64]) -> f64 {
        entropy_value(self.disc, u, self.model)
    }

    fn gradient(&self, u: &[f64]) -> Vec<f64> {
        entropy_gradient(self.disc, u, self.model)
    }

    fn increment(&self, u: &[f64], du: &[f64]) -> f64 {
        let a = self.disc.values_at_quad(u);
        let d = self.disc.values_at_quad(du);
        self.disc
            .tables
            .weights()
            .iter()
            .zip(a.iter().zip(&d))
            .map(|(w, (&aq, &dq))| w * self.model.entropy_increment(aq, dq))
            .sum()
    }

    fn average_gradient(&self, u: &[f64], u_next: &[f64]) -> Option<Vec<f64>> {
        Some(entropy_average_gradient(self.disc, u, u_next, self.model))
    }
}

/// Free energy `F = E - S`.
#[derive(Debug, Clone, Copy)]
pub struct FreeEnergy<'a> {
    pub disc: &'a Discretization,
    pub model: &'a ThermoModel,
}

impl<'a> FreeEnergy<'a> {
    pub fn new(disc: &'a Discretization, model: &'a ThermoModel) -> Self {
        Self { disc, model }
    }

    fn entropy(&self) -> EntropyFunctional<'a> {
        EntropyFunctional {
            disc: self.disc,
            model: self.model,
        }
    }
}

impl Functional for FreeEnergy<'_> {
    fn value(&self, u: &[f64]) -> f64 {
        self.disc.energy_of(u) - self.entropy().value(u)
    }

    fn gradient(&self, u: &[f64]) -> Vec<f64> {
        free_energy_gradient(self.disc, u, self.model)
    }

    fn increment(&self, u: &[f64], du: &[f64]) -> f64 {
        self.disc.energy_of(du) - self.entropy().increment(u, du)
    }

    fn average_gradient(&self, u: &[f64], u_next: &[f64]) -> Option<Vec<f64>> {
        let gs = entropy_average_gradient(self.disc, u, u_next, self.model);
        Some(sub(self.disc.energy_load(), &gs))
    }
}

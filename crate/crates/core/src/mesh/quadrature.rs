use std::f64::consts::PI;

use super::VelocityMesh;
use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub coords: [f64; 2],
    pub weight: f64,
    pub cell: usize,
    /// Position of the point in the cell's reference square.
    pub reference: [f64; 2],
}

/// Tensor-product Gauss rule, `order` points per axis in every cell.
/// Points are stored cell-major; within a cell the first axis runs fastest.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    order: usize,
    points: Vec<QuadPoint>,
}

impl QuadratureRule {
    pub const DEFAULT_ORDER: usize = 3;

    pub fn new(mesh: &VelocityMesh, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidConfig(
                "mesh.quad_order must be at least 1".into(),
            ));
        }
        let (xi, w) = gauss_legendre(order);
        let mut points = Vec::with_capacity(mesh.cells().len() * order * order);
        for (c, cell) in mesh.cells().iter().enumerate() {
            let jac = 0.25 * cell.area();
            for b in 0..order {
                for a in 0..order {
                    let reference = [xi[a], xi[b]];
                    points.push(QuadPoint {
                        coords: cell.map(reference),
                        weight: jac * w[a] * w[b],
                        cell: c,
                        reference,
                    });
                }
            }
        }
        Ok(Self { order, points })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn points(&self) -> &[QuadPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points_per_cell(&self) -> usize {
        self.order * self.order
    }

    pub fn integrate<F: Fn([f64; 2]) -> f64>(&self, f: F) -> f64 {
        self.points.iter().map(|p| p.weight * f(p.coords)).sum()
    }
}

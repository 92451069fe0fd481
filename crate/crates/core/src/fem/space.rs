use crate::error::{check_len, Error, Result};
use crate::mesh::{QuadratureRule, VelocityMesh};

/// Lagrange polynomials on equispaced nodes of `[-1, 1]`: values and
/// derivatives of all `degree + 1` shape functions at `xi`.
fn lagrange_1d(degree: usize, xi: f64) -> (Vec<f64>, Vec<f64>) {
    let nodes: Vec<f64> = (0..=degree)
        .map(|k| -1.0 + 2.0 * k as f64 / degree as f64)
        .collect();
    let mut val = vec![0.0; degree + 1];
    let mut der = vec![0.0; degree + 1];
    for (a, &xa) in nodes.iter().enumerate() {
        let mut p = 1.0;
        let mut dp = 0.0;
        for (b, &xb) in nodes.iter().enumerate() {
            if b == a {
                continue;
            }
            let inv = 1.0 / (xa - xb);
            dp = dp * (xi - xb) * inv + p * inv;
            p *= (xi - xb) * inv;
        }
        val[a] = p;
        der[a] = dp;
    }
    (val, der)
}

/// Continuous tensor-product Lagrange space of degree 1 or 2 per axis.
///
/// Global nodes form a `(degree * n_cells + 1)^2` lattice numbered row-major,
/// first component fastest. Local dofs in a cell follow the same ordering.
#[derive(Debug, Clone)]
pub struct FunctionSpace {
    mesh: VelocityMesh,
    degree: usize,
    nodes_per_axis: usize,
    dof_coords: Vec<[f64; 2]>,
    connectivity: Vec<usize>,
}

impl FunctionSpace {
    pub const DEFAULT_DEGREE: usize = 2;

    pub fn new(mesh: VelocityMesh, degree: usize) -> Result<Self> {
        if !(1..=2).contains(&degree) {
            return Err(Error::InvalidConfig(format!(
                "mesh.degree must be 1 or 2, got {degree}"
            )));
        }
        let n = mesh.n_cells();
        let npa = degree * n + 1;
        let lines = mesh.grid_lines();
        let axis: Vec<f64> = (0..npa)
            .map(|k| {
                let (c, r) = (k / degree, k % degree);
                if r == 0 {
                    lines[c]
                } else {
                    let t = r as f64 / degree as f64;
                    lines[c] + t * (lines[c + 1] - lines[c])
                }
            })
            .collect();
        let mut dof_coords = Vec::with_capacity(npa * npa);
        for &y in &axis {
            for &x in &axis {
                dof_coords.push([x, y]);
            }
        }
        let nl = (degree + 1) * (degree + 1);
        let mut connectivity = Vec::with_capacity(n * n * nl);
        for iy in 0..n {
            for ix in 0..n {
                for by in 0..=degree {
                    for bx in 0..=degree {
                        connectivity.push((iy * degree + by) * npa + ix * degree + bx);
                    }
                }
            }
        }
        Ok(Self {
            mesh,
            degree,
            nodes_per_axis: npa,
            dof_coords,
            connectivity,
        })
    }

    pub fn mesh(&self) -> &VelocityMesh {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_dof(&self) -> usize {
        self.dof_coords.len()
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes_per_axis
    }

    pub fn n_local(&self) -> usize {
        (self.degree + 1) * (self.degree + 1)
    }

    pub fn dof_coords(&self) -> &[[f64; 2]] {
        &self.dof_coords
    }

    pub fn cell_dofs(&self, cell: usize) -> &[usize] {
        let nl = self.n_local();
        &self.connectivity[cell * nl..(cell + 1) * nl]
    }

    pub fn cells_dofs(&self) -> impl Iterator<Item = &[usize]> {
        self.connectivity.chunks(self.n_local())
    }

    /// Values and physical gradients of the local shape functions of `cell`
    /// at reference point `xi`.
    pub fn local_basis(&self, cell: usize, xi: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
        let p = self.degree;
        let c = &self.mesh.cells()[cell];
        let sx = 2.0 / c.width(0);
        let sy = 2.0 / c.width(1);
        let (vx, dx) = lagrange_1d(p, xi[0]);
        let (vy, dy) = lagrange_1d(p, xi[1]);
        let mut val = Vec::with_capacity(self.n_local());
        let mut grad = Vec::with_capacity(self.n_local());
        for by in 0..=p {
            for bx in 0..=p {
                val.push(vx[bx] * vy[by]);
                grad.push([dx[bx] * vy[by] * sx, vx[bx] * dy[by] * sy]);
            }
        }
        (val, grad)
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate<F: Fn([f64; 2]) -> f64>(&self, f: F) -> Vec<f64> {
        self.dof_coords.iter().map(|&v| f(v)).collect()
    }

    pub fn tabulate(&self, quad: &QuadratureRule) -> BasisTables {
        let nl = self.n_local();
        let np = quad.len();
        let mut values = Vec::with_capacity(np * nl);
        let mut grads = Vec::with_capacity(np * nl);
        let mut weights = Vec::with_capacity(np);
        let mut coords = Vec::with_capacity(np);
        let mut cell_of = Vec::with_capacity(np);
        for p in quad.points() {
            let (v, g) = self.local_basis(p.cell, p.reference);
            values.extend(v);
            grads.extend(g);
            weights.push(p.weight);
            coords.push(p.coords);
            cell_of.push(p.cell);
        }
        BasisTables {
            n_local: nl,
            points_per_cell: quad.points_per_cell(),
            weights,
            coords,
            cell_of,
            values,
            grads,
        }
    }
}

/// Shape-function values and gradients at every quadrature point. Each point
/// belongs to one cell and only that cell's `n_local` functions are stored.
#[derive(Debug, Clone)]
pub struct BasisTables {
    n_local: usize,
    points_per_cell: usize,
    weights: Vec<f64>,
    coords: Vec<[f64; 2]>,
    cell_of: Vec<usize>,
    values: Vec<f64>,
    grads: Vec<[f64; 2]>,
}

/// Value and gradient of a discrete field at each quadrature point.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadField {
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
}

impl BasisTables {
    pub fn n_points(&self) -> usize {
        self.weights.len()
    }

    pub fn n_local(&self) -> usize {
        self.n_local
    }

    pub fn points_per_cell(&self) -> usize {
        self.points_per_cell
    }

    pub fn n_cells(&self) -> usize {
        self.n_points() / self.points_per_cell
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn cell_of(&self, q: usize) -> usize {
        self.cell_of[q]
    }

    pub fn values(&self, q: usize) -> &[f64] {
        &self.values[q * self.n_local..(q + 1) * self.n_local]
    }

    pub fn grads(&self, q: usize) -> &[[f64; 2]] {
        &self.grads[q * self.n_local..(q + 1) * self.n_local]
    }

    /// Quadrature points of `cell`, as a range of point indices.
    pub fn cell_points(&self, cell: usize) -> std::ops::Range<usize> {
        cell * self.points_per_cell..(cell + 1) * self.points_per_cell
    }

    pub fn eval_values(&self, space: &FunctionSpace, coeffs: &[f64]) -> Vec<f64> {
        (0..self.n_points())
            .map(|q| {
                let dofs = space.cell_dofs(self.cell_of[q]);
                self.values(q)
                    .iter()
                    .zip(dofs)
                    .map(|(phi, &i)| phi * coeffs[i])
                    .sum()
            })
            .collect()
    }

    pub fn eval_grads(&self, space: &FunctionSpace, coeffs: &[f64]) -> Vec<[f64; 2]> {
        (0..self.n_points())
            .map(|q| {
                let dofs = space.cell_dofs(self.cell_of[q]);
                let mut g = [0.0; 2];
                for (d, &i) in self.grads(q).iter().zip(dofs) {
                    g[0] += d[0] * coeffs[i];
                    g[1] += d[1] * coeffs[i];
                }
                g
            })
            .collect()
    }

    /// `f_h` and its gradient at every quadrature point.
    pub fn eval(&self, space: &FunctionSpace, coeffs: &[f64]) -> Result<QuadField> {
        check_len(space.n_dof(), coeffs.len())?;
        Ok(QuadField {
            values: self.eval_values(space, coeffs),
            grads: self.eval_grads(space, coeffs),
        })
    }

    /// `b_i = sum_q w_q phi_i(q) g_q`, accumulated cell by cell in index order.
    pub fn project_pointwise(&self, space: &FunctionSpace, per_point: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; space.n_dof()];
        for (q, &g) in per_point.iter().enumerate() {
            let wg = self.weights[q] * g;
            for (phi, &i) in self.values(q).iter().zip(space.cell_dofs(self.cell_of[q])) {
                out[i] += phi * wg;
            }
        }
        out
    }

    pub fn integrate(&self, per_point: &[f64]) -> f64 {
        self.weights.iter().zip(per_point).map(|(w, g)| w * g).sum()
    }
}

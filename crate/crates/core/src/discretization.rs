use crate::error::Result;
use crate::fem::{BasisTables, FunctionSpace, MassMatrix, MonomialCoefficients};
use crate::linalg::dot;
use crate::mesh::{QuadratureRule, VelocityMesh};

/// Particle mass in normalized units.
pub const PARTICLE_MASS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscretizationConfig {
    pub v_max: f64,
    pub n_cells: usize,
    pub degree: usize,
    pub quad_order: usize,
    pub track_energy: bool,
}

impl Default for DiscretizationConfig {
    fn default() -> Self {
        Self {
            v_max: 5.0,
            n_cells: 8,
            degree: FunctionSpace::DEFAULT_DEGREE,
            quad_order: QuadratureRule::DEFAULT_ORDER,
            track_energy: true,
        }
    }
}

/// Everything that depends only on the mesh: space, quadrature tables,
/// mass matrix and the Casimir load vectors `M 1`, `M v_k`, `(m/2) M eps`.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub config: DiscretizationConfig,
    pub quad: QuadratureRule,
    pub space: FunctionSpace,
    pub tables: BasisTables,
    pub mass: MassMatrix,
    pub monomials: MonomialCoefficients,
    mass_load: Vec<f64>,
    momentum_loads: [Vec<f64>; 2],
    energy_load: Vec<f64>,
}

impl Discretization {
    pub fn new(config: DiscretizationConfig) -> Result<Self> {
        let mesh = VelocityMesh::new(config.v_max, config.n_cells)?;
        let quad = QuadratureRule::new(&mesh, config.quad_order)?;
        let space = FunctionSpace::new(mesh, config.degree)?;
        let tables = space.tabulate(&quad);
        let mass = MassMatrix::assemble(&space, &tables)?;
        let monomials = MonomialCoefficients::interpolate(&space, config.track_energy)?;
        let mass_load = mass.apply(&monomials.ones);
        let momentum_loads = [
            mass.apply(&monomials.v_hat[0]),
            mass.apply(&monomials.v_hat[1]),
        ];
        let energy_load = match &monomials.eps_hat {
            Some(eps) => mass
                .apply(eps)
                .iter()
                .map(|x| 0.5 * PARTICLE_MASS * x)
                .collect(),
            // Degree 1: project |v|^2/2 directly. Energy is then not a Casimir.
            None => {
                let pts: Vec<f64> = tables
                    .coords()
                    .iter()
                    .map(|v| 0.5 * PARTICLE_MASS * (v[0] * v[0] + v[1] * v[1]))
                    .collect();
                tables.project_pointwise(&space, &pts)
            }
        };
        Ok(Self {
            config,
            quad,
            space,
            tables,
            mass,
            monomials,
            mass_load,
            momentum_loads,
            energy_load,
        })
    }

    pub fn n_dof(&self) -> usize {
        self.space.n_dof()
    }

    pub fn n_points(&self) -> usize {
        self.tables.n_points()
    }

    pub fn v_max(&self) -> f64 {
        self.config.v_max
    }

    /// `M 1`
    pub fn mass_load(&self) -> &[f64] {
        &self.mass_load
    }

    /// `M v_k`
    pub fn momentum_load(&self, k: usize) -> &[f64] {
        &self.momentum_loads[k]
    }

    /// Gradient of the kinetic energy, `(m/2) M eps`.
    pub fn energy_load(&self) -> &[f64] {
        &self.energy_load
    }

    pub fn mass_of(&self, f: &[f64]) -> f64 {
        dot(&self.mass_load, f)
    }

    pub fn momentum_of(&self, f: &[f64]) -> [f64; 2] {
        [
            dot(&self.momentum_loads[0], f),
            dot(&self.momentum_loads[1], f),
        ]
    }

    pub fn energy_of(&self, f: &[f64]) -> f64 {
        dot(&self.energy_load, f)
    }

    pub fn values_at_quad(&self, f: &[f64]) -> Vec<f64> {
        self.tables.eval_values(&self.space, f)
    }

    /// L2 projection of a pointwise function onto the space.
    pub fn project<F: Fn([f64; 2]) -> f64>(&self, f: F) -> Result<Vec<f64>> {
        let pts: Vec<f64> = self.tables.coords().iter().map(|&v| f(v)).collect();
        self.mass
            .solve(&self.tables.project_pointwise(&self.space, &pts))
    }
}

use landau_core::fem::FunctionSpace;
use landau_core::DistributionState;

use crate::config::{ConfigError, GaussianComponent};

/// Nodal interpolation of a sum of isotropic Gaussians, at time 0.
pub fn build_initial_condition(
    space: &FunctionSpace,
    components: &[GaussianComponent],
) -> Result<DistributionState, ConfigError> {
    for (k, c) in components.iter().enumerate() {
        if !(c.temperature > 0.0) {
            return Err(ConfigError::Invalid {
                field: format!("initial_condition[{k}].temperature"),
                message: format!("must be positive, got {}", c.temperature),
            });
        }
        if !(c.weight >= 0.0) {
            return Err(ConfigError::Invalid {
                field: format!("initial_condition[{k}].weight"),
                message: format!("must be nonnegative, got {}", c.weight),
            });
        }
    }
    let coeffs = space.interpolate(|v| {
        components
            .iter()
            .filter(|c| c.weight != 0.0)
            .map(|c| gaussian(c, v))
            .sum()
    });
    Ok(DistributionState::new(coeffs, 0.0))
}

fn gaussian(c: &GaussianComponent, v: [f64; 2]) -> f64 {
    let d = [v[0] - c.center[0], v[1] - c.center[1]];
    let t = c.temperature;
    c.weight * (-(d[0] * d[0] + d[1] * d[1]) / (2.0 * t)).exp() / (2.0 * std::f64::consts::PI * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use landau_core::{Discretization, DiscretizationConfig};

    fn comp(weight: f64, center: [f64; 2], temperature: f64) -> GaussianComponent {
        GaussianComponent {
            weight,
            center,
            temperature,
        }
    }

    #[test]
    fn peak_value_at_the_origin() {
        let disc = Discretization::new(DiscretizationConfig::default()).unwrap();
        let ic = build_initial_condition(&disc.space, &[comp(1.0, [0.0, 0.0], 1.0)]).unwrap();
        let k = disc
            .space
            .dof_coords()
            .iter()
            .position(|c| c[0] == 0.0 && c[1] == 0.0)
            .unwrap();
        assert_eq!(ic.coeffs[k], 1.0 / (2.0 * std::f64::consts::PI));
    }

    #[test]
    fn zero_weight_contributes_nothing() {
        let disc = Discretization::new(DiscretizationConfig::default()).unwrap();
        let one = [comp(1.0, [0.5, -1.0], 0.7)];
        let two = [comp(1.0, [0.5, -1.0], 0.7), comp(0.0, [2.0, 2.0], 1.0)];
        let a = build_initial_condition(&disc.space, &one).unwrap();
        let b = build_initial_condition(&disc.space, &two).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_components() {
        let disc = Discretization::new(DiscretizationConfig::default()).unwrap();
        assert!(build_initial_condition(&disc.space, &[comp(1.0, [0.0; 2], -0.1)]).is_err());
        assert!(build_initial_condition(&disc.space, &[comp(-1.0, [0.0; 2], 1.0)]).is_err());
    }
}

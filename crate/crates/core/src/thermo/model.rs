use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    MaxwellBoltzmann,
    FermiDirac,
}

/// Entropy density `s(f)` paired with the mobility `M(f)` of the collision
/// kernel, in units with `T = g = 1`.
///
/// Outside `[f_floor, f_ceiling]` the entropy continues linearly with the
/// slope it has at the bound, so `s` stays C^1 and every functional and
/// gradient evaluates the same regularized function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoModel {
    pub kind: ModelKind,
    pub f_floor: f64,
    /// Only used by Fermi–Dirac.
    pub f_ceiling: f64,
    /// Replace `M(f)` by its value at the clamped argument (`max(f, 0)` for
    /// Maxwell–Boltzmann). Off by default.
    pub clamp_mobility: bool,
}

pub const DEFAULT_FLOOR: f64 = 1e-14;
pub const DEFAULT_CEILING: f64 = 1.0 - 1e-14;

/// Relative step below which [`ThermoModel::entropy_secant`] uses the midpoint.
const SECANT_CUTOFF: f64 = 1e-8;

impl Default for ThermoModel {
    fn default() -> Self {
        Self::maxwell_boltzmann()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    Below,
    Core,
    Above,
}

impl ThermoModel {
    pub fn maxwell_boltzmann() -> Self {
        Self {
            kind: ModelKind::MaxwellBoltzmann,
            f_floor: DEFAULT_FLOOR,
            f_ceiling: DEFAULT_CEILING,
            clamp_mobility: false,
        }
    }

    pub fn fermi_dirac() -> Self {
        Self {
            kind: ModelKind::FermiDirac,
            ..Self::maxwell_boltzmann()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_floor > 0.0 && self.f_floor < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "thermo.f_floor must lie in (0, 1), got {}",
                self.f_floor
            )));
        }
        if self.kind == ModelKind::FermiDirac
            && !(self.f_ceiling > self.f_floor && self.f_ceiling < 1.0)
        {
            return Err(Error::InvalidConfig(format!(
                "thermo.f_ceiling must lie in (f_floor, 1), got {}",
                self.f_ceiling
            )));
        }
        Ok(())
    }

    fn upper(&self) -> f64 {
        match self.kind {
            ModelKind::MaxwellBoltzmann => f64::INFINITY,
            ModelKind::FermiDirac => self.f_ceiling,
        }
    }

    fn region(&self, f: f64) -> Region {
        if f < self.f_floor {
            Region::Below
        } else if f > self.upper() {
            Region::Above
        } else {
            Region::Core
        }
    }

    fn core_value(&self, f: f64) -> f64 {
        match self.kind {
            ModelKind::MaxwellBoltzmann => -f * f.ln(),
            ModelKind::FermiDirac => -(f * f.ln() + (1.0 - f) * (1.0 - f).ln()),
        }
    }

    fn core_slope(&self, f: f64) -> f64 {
        match self.kind {
            ModelKind::MaxwellBoltzmann => -f.ln() - 1.0,
            ModelKind::FermiDirac => (1.0 - f).ln() - f.ln(),
        }
    }

    fn core_curvature(&self, f: f64) -> f64 {
        match self.kind {
            ModelKind::MaxwellBoltzmann => -1.0 / f,
            ModelKind::FermiDirac => -1.0 / f - 1.0 / (1.0 - f),
        }
    }

    /// `s(b) - s(a)` inside the core with `d = b - a`, accurate to O(eps |d|).
    fn core_increment(&self, a: f64, b: f64, d: f64) -> f64 {
        match self.kind {
            ModelKind::MaxwellBoltzmann => mb_increment(a, b, d),
            ModelKind::FermiDirac => mb_increment(a, b, d) + mb_increment(1.0 - a, 1.0 - b, -d),
        }
    }

    /// `(s, s_f)` of the regularized entropy density.
    pub fn entropy_density(&self, f: f64) -> (f64, f64) {
        match self.region(f) {
            Region::Core => (self.core_value(f), self.core_slope(f)),
            Region::Below => {
                let lo = self.f_floor;
                let k = self.core_slope(lo);
                (self.core_value(lo) + k * (f - lo), k)
            }
            Region::Above => {
                let hi = self.upper();
                let k = self.core_slope(hi);
                (self.core_value(hi) + k * (f - hi), k)
            }
        }
    }

    /// `s_ff`, zero on the linear continuations.
    pub fn entropy_curvature(&self, f: f64) -> f64 {
        match self.region(f) {
            Region::Core => self.core_curvature(f),
            _ => 0.0,
        }
    }

    /// `s(a + d) - s(a)` computed without cancelling against `s(a)`, so the
    /// error scales with `|d|` rather than with `|s|`.
    pub fn entropy_increment(&self, a: f64, d: f64) -> f64 {
        let b = a + d;
        let (ra, rb) = (self.region(a), self.region(b));
        if ra == rb {
            return self.piece(ra, a, b, d);
        }
        let mut bounds = vec![self.f_floor];
        if self.upper().is_finite() {
            bounds.push(self.upper());
        }
        let mut cuts: Vec<f64> = bounds.into_iter().filter(|&e| (a < e) != (b < e)).collect();
        if d < 0.0 {
            cuts.reverse();
        }
        let mut total = 0.0;
        let mut x = a;
        for e in cuts.into_iter().chain(std::iter::once(b)) {
            let mid = 0.5 * (x + e);
            total += self.piece(self.region(mid), x, e, e - x);
            x = e;
        }
        total
    }

    /// Secant slope `(s(b) - s(a)) / (b - a)` and its derivative in `b`.
    /// Nearly coincident endpoints fall back to the midpoint Taylor values.
    pub fn entropy_secant(&self, a: f64, b: f64) -> (f64, f64) {
        let d = b - a;
        let size = a.abs().max(b.abs()).max(self.f_floor);
        if d.abs() <= SECANT_CUTOFF * size {
            let mid = 0.5 * (a + b);
            return (
                self.entropy_density(mid).1,
                0.5 * self.entropy_curvature(mid),
            );
        }
        let sigma = self.entropy_increment(a, d) / d;
        (sigma, (self.entropy_density(b).1 - sigma) / d)
    }

    fn piece(&self, region: Region, x: f64, end: f64, dx: f64) -> f64 {
        match region {
            Region::Core => self.core_increment(x, end, dx),
            Region::Below => self.core_slope(self.f_floor) * dx,
            Region::Above => self.core_slope(self.upper()) * dx,
        }
    }

    pub fn mobility(&self, f: f64) -> f64 {
        match self.kind {
            ModelKind::MaxwellBoltzmann => {
                if self.clamp_mobility {
                    f.max(0.0)
                } else {
                    f
                }
            }
            ModelKind::FermiDirac => {
                let g = if self.clamp_mobility {
                    f.clamp(0.0, 1.0)
                } else {
                    f
                };
                g * (1.0 - g)
            }
        }
    }

    /// `dM/df`, taking the clamped branches as flat.
    pub fn mobility_derivative(&self, f: f64) -> f64 {
        match self.kind {
            ModelKind::MaxwellBoltzmann => {
                if self.clamp_mobility && f < 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
            ModelKind::FermiDirac => {
                if self.clamp_mobility && !(0.0..=1.0).contains(&f) {
                    0.0
                } else {
                    1.0 - 2.0 * f
                }
            }
        }
    }

    /// Whether `M(f) = f` exactly, the condition for the sparse rearrangement.
    pub fn mobility_is_linear(&self) -> bool {
        self.kind == ModelKind::MaxwellBoltzmann && !self.clamp_mobility
    }

    /// Fermi–Dirac mobility is only meaningful for occupations in `[0, 1]`.
    pub fn check_domain(&self, f: f64) -> Result<()> {
        if self.kind == ModelKind::FermiDirac
            && !self.clamp_mobility
            && (f < -self.f_floor || f > 2.0 - self.f_ceiling || !f.is_finite())
        {
            return Err(Error::ModelDomain(format!(
                "Fermi–Dirac occupation {f} outside [0, 1]"
            )));
        }
        if !f.is_finite() {
            return Err(Error::ModelDomain(format!(
                "non-finite distribution value {f}"
            )));
        }
        Ok(())
    }
}

/// `-(a+d) ln(a+d) + a ln a` for `a, a + d > 0`.
/// `-b ln b + a ln a`. Small relative changes go through `ln_1p`; large ones
/// lose nothing to cancellation and use the direct form with the exact `b`.
fn mb_increment(a: f64, b: f64, d: f64) -> f64 {
    if d.abs() <= 0.5 * a {
        -d * b.ln() - a * (d / a).ln_1p()
    } else {
        a * a.ln() - b * b.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2};

    #[test]
    fn maxwell_boltzmann_values() {
        let m = ThermoModel::maxwell_boltzmann();
        assert_eq!(m.entropy_density(1.0), (0.0, -1.0));
        let (s, sf) = m.entropy_density(1.0 / E);
        assert!((s - 1.0 / E).abs() < 1e-16);
        assert!(sf.abs() < 1e-15);
        assert_eq!(m.mobility(0.3), 0.3);
    }

    #[test]
    fn fermi_dirac_values() {
        let m = ThermoModel::fermi_dirac();
        let (s, sf) = m.entropy_density(0.5);
        assert!((s - LN_2).abs() < 1e-15);
        assert_eq!(sf, 0.0);
        assert!((m.mobility(0.3) - 0.21).abs() < 1e-16);
        assert_eq!(m.mobility(1.0), 0.0);
    }

    #[test]
    fn regularization_is_c1() {
        for m in [ThermoModel::maxwell_boltzmann(), ThermoModel::fermi_dirac()] {
            for edge in [m.f_floor, m.upper()] {
                if !edge.is_finite() {
                    continue;
                }
                let h = 1e-3 * m.f_floor;
                let (s_lo, k_lo) = m.entropy_density(edge - h);
                let (s_hi, k_hi) = m.entropy_density(edge + h);
                assert!((s_lo - s_hi).abs() < 1e-12);
                assert!((k_lo - k_hi).abs() < 1e-2);
            }
            // linear continuation far below the floor
            let (s, k) = m.entropy_density(-1.0);
            let (s0, k0) = m.entropy_density(m.f_floor);
            assert_eq!(k, k0);
            assert!((s - (s0 + k0 * (-1.0 - m.f_floor))).abs() < 1e-12);
            assert_eq!(m.entropy_curvature(-1.0), 0.0);
        }
    }

    #[test]
    fn floor_does_not_affect_bulk() {
        let a = ThermoModel::maxwell_boltzmann();
        let b = ThermoModel { f_floor: 1e-8, ..a };
        assert_eq!(a.entropy_density(0.2), b.entropy_density(0.2));
    }

    #[test]
    fn increments_match_direct_differences() {
        for m in [ThermoModel::maxwell_boltzmann(), ThermoModel::fermi_dirac()] {
            let cases = [
                (0.3, 0.2),
                (0.3, -0.25),
                (0.1, -0.3),
                (-0.2, 0.5),
                (1e-15, 1e-13),
                (0.9, 0.2),
                (0.5, 1e-9),
            ];
            for (a, d) in cases {
                let direct = m.entropy_density(a + d).0 - m.entropy_density(a).0;
                let inc = m.entropy_increment(a, d);
                assert!((direct - inc).abs() < 1e-14, "{a} {d}: {direct} vs {inc}");
            }
        }
    }

    #[test]
    fn tiny_increments_follow_the_slope() {
        let m = ThermoModel::maxwell_boltzmann();
        let (a, d) = (0.2, 1e-12);
        let mid = a + 0.5 * d;
        let defect = m.entropy_increment(a, d) - d * m.entropy_density(mid).1;
        // exact defect is -d^3 s'''/24 ~ 1e-38; the computed one must be near eps*d
        assert!(defect.abs() < 1e-27, "{defect}");
    }

    #[test]
    fn fermi_dirac_domain() {
        let m = ThermoModel::fermi_dirac();
        assert!(m.check_domain(0.5).is_ok());
        assert!(matches!(m.check_domain(-0.1), Err(Error::ModelDomain(_))));
        assert!(matches!(m.check_domain(1.5), Err(Error::ModelDomain(_))));
        let clamped = ThermoModel {
            clamp_mobility: true,
            ..m
        };
        assert!(clamped.check_domain(1.5).is_ok());
        assert_eq!(clamped.mobility(1.5), 0.0);
    }

    #[test]
    fn validation() {
        assert!(ThermoModel::maxwell_boltzmann().validate().is_ok());
        let bad = ThermoModel {
            f_floor: 0.0,
            ..ThermoModel::default()
        };
        assert!(bad.validate().is_err());
        let bad_fd = ThermoModel {
            f_ceiling: 1.0,
            ..ThermoModel::fermi_dirac()
        };
        assert!(bad_fd.validate().is_err());
    }
}

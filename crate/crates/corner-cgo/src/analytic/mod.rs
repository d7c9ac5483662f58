//! Closed-form quantities every other module consumes: the power-law
//! phase Φ = r^α e^{iαθ} and its derivatives, the sharp sector decay
//! constant, Gamma-function machinery, and Bessel functions of the
//! first kind.

mod bessel;
mod gamma;
mod phase;

pub use bessel::bessel_j;
pub use gamma::{
    adaptive_complex_quadrature, gamma_complex, gamma_real, incomplete_gamma_bound_check,
    upper_gamma_closed, GammaBoundCheck, GammaBoundInputs,
};
pub use phase::{
    dbar_of_phase_inv, dbar_phase_im_inv, decay_delta, dphase, grad_phase, phase, phase_im,
    Branch, PhaseParams,
};

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Open circular sector {0 < r < radius_a, |θ| < theta0} with the corner
/// at the origin and the bisector along the positive x₁-axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorDomain {
    theta0: f64,
    radius_a: f64,
}

impl SectorDomain {
    /// Half-aperture must lie in (0, π) and differ from π/2, so the full
    /// aperture 2θ₀ stays in (0, 2π)\{π}; the truncation radius must be
    /// positive.
    pub fn new(theta0: f64, radius_a: f64) -> Result<Self> {
        if !(theta0 > 0.0 && theta0 < std::f64::consts::PI) {
            return Err(Error::Domain(format!(
                "theta0 must lie in (0, pi), got {theta0}"
            )));
        }
        if (theta0 - std::f64::consts::FRAC_PI_2).abs() < 1e-14 {
            return Err(Error::Domain(
                "theta0 must differ from pi/2 (aperture pi is excluded)".into(),
            ));
        }
        if !(radius_a > 0.0) {
            return Err(Error::Domain(format!(
                "radius_a must be positive, got {radius_a}"
            )));
        }
        Ok(SectorDomain { theta0, radius_a })
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn radius(&self) -> f64 {
        self.radius_a
    }

    /// Full aperture 2θ₀.
    pub fn aperture(&self) -> f64 {
        2.0 * self.theta0
    }

    /// Sector area θ₀ a².
    pub fn area(&self) -> f64 {
        self.theta0 * self.radius_a * self.radius_a
    }

    /// Membership test: 0 < r < a and |θ| < θ₀ with θ ∈ (−π, π).
    pub fn contains(&self, x: Complex64) -> bool {
        let r = x.norm();
        if !(r > 0.0 && r < self.radius_a) {
            return false;
        }
        let theta = x.arg();
        theta.abs() < self.theta0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_rejects_invalid_apertures() {
        assert!(SectorDomain::new(0.0, 1.0).is_err());
        assert!(SectorDomain::new(std::f64::consts::PI, 1.0).is_err());
        assert!(SectorDomain::new(std::f64::consts::FRAC_PI_2, 1.0).is_err());
        assert!(SectorDomain::new(1.0, 0.0).is_err());
        assert!(SectorDomain::new(1.0, -2.0).is_err());
        // concave corners are allowed
        assert!(SectorDomain::new(2.5, 1.0).is_ok());
    }

    #[test]
    fn sector_membership() {
        let s = SectorDomain::new(std::f64::consts::FRAC_PI_3, 1.0).unwrap();
        assert!(s.contains(Complex64::new(0.5, 0.0)));
        assert!(!s.contains(Complex64::new(0.0, 0.0)));
        assert!(!s.contains(Complex64::new(1.5, 0.0)));
        assert!(!s.contains(Complex64::new(-0.5, 0.0)));
        assert!(!s.contains(Complex64::from_polar(0.5, 1.2)));
        assert!(s.contains(Complex64::from_polar(0.5, -1.0)));
    }

    #[test]
    fn sector_area() {
        let s = SectorDomain::new(std::f64::consts::FRAC_PI_3, 2.0).unwrap();
        assert!((s.area() - std::f64::consts::FRAC_PI_3 * 4.0).abs() < 1e-15);
    }
}

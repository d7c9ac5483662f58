//! The power-law phase Φ(x) = r^α e^{iαθ} (a branch of z^α with the cut
//! on the negative real axis, θ ∈ (−π, π)), its conjugate companion, and
//! the closed-form derivative quantities built from it.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Which of the two phases an operation works with: Φ itself or its
/// complex conjugate Φ̄. The conjugate branch is what appears in
/// conjugated solutions and in the j = 2 column of the sharp constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Φ = r^α e^{iαθ}; corresponds to index j = 1.
    Principal,
    /// Φ̄ = r^α e^{−iαθ}; corresponds to index j = 2.
    Conjugate,
}

impl Branch {
    /// The sign (−1)^j attached to this branch in angular factors.
    pub fn sign_j(self) -> f64 {
        match self {
            Branch::Principal => -1.0,
            Branch::Conjugate => 1.0,
        }
    }

    /// 1-based column index j used when tabulating constants.
    pub fn index(self) -> usize {
        match self {
            Branch::Principal => 1,
            Branch::Conjugate => 2,
        }
    }
}

/// Exponent α ∈ (0, 1] and the small parameter h > 0 of the phase family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseParams {
    pub alpha: f64,
    pub h: f64,
}

impl PhaseParams {
    pub fn new(alpha: f64, h: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        if !(h > 0.0) {
            return Err(Error::Domain(format!("h must be positive, got {h}")));
        }
        Ok(PhaseParams { alpha, h })
    }

    pub fn with_h(self, h: f64) -> Self {
        PhaseParams { h, ..self }
    }
}

fn polar_checked(x: Complex64) -> Result<(f64, f64)> {
    let r = x.norm();
    if r == 0.0 || !r.is_finite() {
        return Err(Error::Domain("phase is undefined at the origin".into()));
    }
    let theta = x.arg();
    // arg() returns +pi on the cut (negative real axis); both ends of the
    // branch cut are rejected.
    if theta.abs() >= std::f64::consts::PI {
        return Err(Error::Domain(
            "point lies on the branch cut theta = +/-pi".into(),
        ));
    }
    Ok((r, theta))
}

/// Φ(x) = r^α (cos αθ + i sin αθ), or its conjugate on the other branch.
pub fn phase(x: Complex64, params: &PhaseParams, branch: Branch) -> Result<Complex64> {
    let (r, theta) = polar_checked(x)?;
    let value = Complex64::from_polar(r.powf(params.alpha), params.alpha * theta);
    Ok(match branch {
        Branch::Principal => value,
        Branch::Conjugate => value.conj(),
    })
}

/// φ = Im Φ = r^α sin(αθ); equals `phase(x).im` exactly.
pub fn phase_im(x: Complex64, params: &PhaseParams) -> Result<f64> {
    let (r, theta) = polar_checked(x)?;
    Ok(r.powf(params.alpha) * (params.alpha * theta).sin())
}

/// ∇Φ = α r^{α−1} e^{i(α−1)θ} (1, i); conjugated componentwise on the
/// conjugate branch.
pub fn grad_phase(x: Complex64, params: &PhaseParams, branch: Branch) -> Result<[Complex64; 2]> {
    let (r, theta) = polar_checked(x)?;
    let a = params.alpha;
    let dphi = a * r.powf(a - 1.0) * Complex64::from_polar(1.0, (a - 1.0) * theta);
    let grad = [dphi, Complex64::new(0.0, 1.0) * dphi];
    Ok(match branch {
        Branch::Principal => grad,
        Branch::Conjugate => [grad[0].conj(), grad[1].conj()],
    })
}

/// The complex derivative ∂Φ = α r^{α−1} e^{i(α−1)θ} (first component of
/// the gradient pair).
pub fn dphase(x: Complex64, params: &PhaseParams) -> Result<Complex64> {
    Ok(grad_phase(x, params, Branch::Principal)?[0])
}

/// (∂̄φ)^{−1} = −i (2/α) r^{1−α} e^{−i(1−α)θ}, anti-holomorphic off the cut.
///
/// From φ = (z^α − z̄^α)/(2i): ∂̄φ = (iα/2) z̄^{α−1}, whose reciprocal
/// carries a minus sign (α = 1 gives φ = x₂, ∂̄φ = i/2, inverse −2i).
pub fn dbar_phase_im_inv(x: Complex64, params: &PhaseParams) -> Result<Complex64> {
    let (r, theta) = polar_checked(x)?;
    let a = params.alpha;
    let modulus = 2.0 / a * r.powf(1.0 - a);
    Ok(-Complex64::new(0.0, 1.0) * modulus * Complex64::from_polar(1.0, -(1.0 - a) * theta))
}

/// ∂̄ of (∂̄φ)^{−1} = −2i ((1−α)/α) r^{−α} e^{iαθ}. With `holomorphic_part`
/// set, returns ∂ of (∂̄φ)^{−1}, which vanishes identically.
pub fn dbar_of_phase_inv(
    x: Complex64,
    params: &PhaseParams,
    holomorphic_part: bool,
) -> Result<Complex64> {
    if holomorphic_part {
        polar_checked(x)?;
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (r, theta) = polar_checked(x)?;
    let a = params.alpha;
    let modulus = 2.0 * (1.0 - a) / a * r.powf(-a);
    Ok(-Complex64::new(0.0, 1.0) * modulus * Complex64::from_polar(1.0, a * theta))
}

/// δ = cos(αθ₀), the sharp constant with Re Φ ≥ δ r^α on the sector;
/// requires α < (π/2)/θ₀ so that δ > 0.
pub fn decay_delta(params: &PhaseParams, sector: &super::SectorDomain) -> Result<f64> {
    let theta0 = sector.theta0();
    if params.alpha >= std::f64::consts::FRAC_PI_2 / theta0 {
        return Err(Error::Domain(format!(
            "alpha = {} must be below (pi/2)/theta0 = {} for positive sector decay",
            params.alpha,
            std::f64::consts::FRAC_PI_2 / theta0
        )));
    }
    Ok((params.alpha * theta0).cos())
}

//! Discrete Lᵖ and W^{1,p} norms on sector grids.

use crate::error::{Error, Result};
use crate::fd::fd_gradient;
use crate::grid::{integrate_masked, ComplexFieldSample};

/// A norm measurement attached to its exponent and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub p: f64,
    pub lp: f64,
    pub w1p: f64,
    pub method: String,
}

fn check_p(p: f64) -> Result<()> {
    if p.is_infinite() && p > 0.0 {
        return Ok(());
    }
    if !(p > 1.0) {
        return Err(Error::Config(format!(
            "norm exponent must satisfy p > 1 (or p = inf), got {p}"
        )));
    }
    Ok(())
}

fn lp_masked(f: &ComplexFieldSample, p: f64, mask: &[bool]) -> Result<f64> {
    check_p(p)?;
    if p.is_infinite() {
        let m = f
            .values
            .iter()
            .zip(mask)
            .filter(|&(_, &keep)| keep)
            .map(|(v, _)| v.norm())
            .fold(0.0, f64::max);
        if !m.is_finite() {
            return Err(Error::Numerical("non-finite value in sup norm".into()));
        }
        return Ok(m);
    }
    let powered = f.map(|v| num_complex::Complex64::new(v.norm().powf(p), 0.0));
    let integral = integrate_masked(&powered, mask)?;
    Ok(integral.re.max(0.0).powf(1.0 / p))
}

/// Discrete Lᵖ norm: (Σ wᵢ |fᵢ|ᵖ)^{1/p}; p = ∞ returns the max modulus.
pub fn lp_norm(f: &ComplexFieldSample, p: f64) -> Result<f64> {
    let mask = vec![true; f.len()];
    lp_masked(f, p, &mask)
}

/// Lᵖ norm over a node mask (used for interior-margin measurements).
pub fn lp_norm_masked(f: &ComplexFieldSample, p: f64, mask: &[bool]) -> Result<f64> {
    lp_masked(f, p, mask)
}

/// W^{1,p} norm: (‖f‖ₚᵖ + ‖∂₁f‖ₚᵖ + ‖∂₂f‖ₚᵖ)^{1/p}, first derivatives by
/// polar chain-rule differences; p = ∞ takes the max of the three sups.
pub fn w1p_norm(f: &ComplexFieldSample, p: f64) -> Result<f64> {
    check_p(p)?;
    let [gx, gy] = fd_gradient(f);
    if p.is_infinite() {
        return Ok(lp_norm(f, p)?.max(lp_norm(&gx, p)?).max(lp_norm(&gy, p)?));
    }
    let base = lp_norm(f, p)?;
    let dx = lp_norm(&gx, p)?;
    let dy = lp_norm(&gy, p)?;
    Ok((base.powf(p) + dx.powf(p) + dy.powf(p)).powf(1.0 / p))
}

/// Convenience L² norm.
pub fn l2_norm(f: &ComplexFieldSample) -> Result<f64> {
    lp_norm(f, 2.0)
}

pub fn norm_report(f: &ComplexFieldSample, p: f64, method: &str) -> Result<NormReport> {
    Ok(NormReport {
        p,
        lp: lp_norm(f, p)?,
        w1p: w1p_norm(f, p)?,
        method: method.to_string(),
    })
}

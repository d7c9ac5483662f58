//! Sector moments, the corner orthogonality integral, its term-by-term
//! decomposition, and the amplitude-invariance check.

use std::sync::Arc;

use num_complex::Complex64;

use crate::analytic::{grad_phase, phase, Branch, PhaseParams};
use crate::cgo::{CgoSolution, HolomorphicPoly};
use crate::corner::rates::{rate_fit, RateFitReport};
use crate::corner::taylor::taylor_leading;
use crate::corner::{GradLeading, IncidentFieldModel, MediumModel, MediumProfile};
use crate::error::{Error, Result};
use crate::fd::fd_gradient;
use crate::grid::{integrate, ComplexFieldSample, PolarGrid};

/// 2-D quadrature of ∫ r^{N₀} e^{± i N₀ θ} e^{−Φⱼ/h} dx on the grid, the
/// cross-validation companion of the closed-form
/// [`super::sector_moment`].
pub fn sector_moment_quad(
    n0: u32,
    sign: i32,
    branch: Branch,
    params: &PhaseParams,
    grid: &Arc<PolarGrid>,
) -> Result<Complex64> {
    let f = ComplexFieldSample::from_fn(grid, |z| {
        let r = z.norm();
        let theta = z.arg();
        let ang = Complex64::from_polar(1.0, sign as f64 * n0 as f64 * theta);
        let ph = phase(z, params, branch).unwrap();
        r.powi(n0 as i32) * ang * (-ph / params.h).exp()
    });
    integrate(&f)
}

fn check_alignment(sol: &CgoSolution, grid: &Arc<PolarGrid>) -> Result<()> {
    if !Arc::ptr_eq(sol.w_h.grid(), grid) {
        return Err(Error::Config(
            "CGO solution lives on a different grid".into(),
        ));
    }
    Ok(())
}

/// ∫ (γ−1) ∇v·∇w − k²(ρ−1) v w dx with ∇v analytic (term-by-term Bessel
/// derivatives), w in the medium form γ^{−1/2}(A+w_h)e^{−Φⱼ/h}, and ∇w by
/// the product rule with ∇w_h from finite differences.
pub fn corner_integral(
    media: &MediumModel,
    v: &IncidentFieldModel,
    sol: &CgoSolution,
    grid: &Arc<PolarGrid>,
) -> Result<Complex64> {
    check_alignment(sol, grid)?;
    let params = sol.params;
    let branch = sol.branch;
    let k2 = media.k * media.k;
    let grad_wh = fd_gradient(&sol.w_h);

    let n = grid.len();
    let mut vals = Vec::with_capacity(n);
    for i in 0..n {
        let z = grid.node(i);
        let r = z.norm();
        let theta = z.arg();
        let gamma = media.gamma_at(r);
        let rho = media.rho_at(r);
        let ginv_sqrt = media.gamma_sqrt_at(r).recip();
        let phase_fac = (-phase(z, &params, branch)? / params.h).exp();

        let a_plus = sol.amplitude.values[i] + sol.w_h.values[i];
        let gphi = grad_phase(z, &params, branch)?;
        let br = media.b_radial(r);
        let (s, c) = theta.sin_cos();
        let b_vec = [br * c, br * s];

        let mut grad_w = [Complex64::new(0.0, 0.0); 2];
        for d in 0..2 {
            let g = -a_plus * (gphi[d] / params.h + b_vec[d])
                + sol.grad_amplitude[d].values[i]
                + [&grad_wh[0], &grad_wh[1]][d].values[i];
            grad_w[d] = ginv_sqrt * phase_fac * g;
        }
        let w_val = ginv_sqrt * phase_fac * a_plus;

        let gv = v.gradient(z);
        let vv = v.eval(z);
        let dot = gv[0] * grad_w[0] + gv[1] * grad_w[1];
        vals.push((gamma - 1.0) * dot - k2 * (rho - 1.0) * vv * w_val);
    }
    integrate(&ComplexFieldSample::from_values(grid, vals)?)
}

/// One piece of the corner-integral decomposition.
#[derive(Debug, Clone)]
pub struct LocalPiece {
    pub name: &'static str,
    pub value: Complex64,
    /// Predicted h-power of the piece (None when the piece vanishes
    /// identically, e.g. profile differences for constant media).
    pub predicted_exponent: Option<f64>,
}

/// The gradient pieces I₁₀..I₁₃ and the value pieces I₂₀..I₂₃ at one h.
#[derive(Debug, Clone)]
pub struct LocalDecomposition {
    pub h: f64,
    pub pieces: Vec<LocalPiece>,
}

impl LocalDecomposition {
    pub fn piece(&self, name: &str) -> Option<&LocalPiece> {
        self.pieces.iter().find(|p| p.name == name)
    }

    /// Measured exponents across an h-pair: log₂(|value(h)|/|value(h/2)|).
    pub fn measured_exponents(coarse: &LocalDecomposition, fine: &LocalDecomposition) -> Vec<(String, f64)> {
        let ratio = coarse.h / fine.h;
        coarse
            .pieces
            .iter()
            .zip(&fine.pieces)
            .filter(|(c, f)| c.value.norm() > 0.0 && f.value.norm() > 0.0)
            .map(|(c, f)| {
                (
                    c.name.to_string(),
                    (c.value.norm() / f.value.norm()).ln() / ratio.ln(),
                )
            })
            .collect()
    }
}

/// Quadrature of the decomposition pieces for a solution built with
/// A ≡ 1. `p1`, `p2` are the norm exponents entering the predicted
/// powers of the residual pieces.
pub fn local_decomposition(
    media: &MediumModel,
    v: &IncidentFieldModel,
    sol: &CgoSolution,
    grid: &Arc<PolarGrid>,
    p1: f64,
    p2: f64,
) -> Result<LocalDecomposition> {
    check_alignment(sol, grid)?;
    let unit_defect = sol
        .amplitude
        .values
        .iter()
        .map(|a| (a - Complex64::new(1.0, 0.0)).norm())
        .fold(0.0, f64::max);
    if unit_defect > 1e-12 {
        return Err(Error::Config(
            "the decomposition requires a solution built with A = 1".into(),
        ));
    }

    let params = sol.params;
    let branch = sol.branch;
    let alpha = params.alpha;
    let h = params.h;
    let t = taylor_leading(v)?;
    let n0 = t.n0 as f64;
    let nn = t.n() as f64;
    let grad_wh = fd_gradient(&sol.w_h);

    let n = grid.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut i10 = Vec::with_capacity(n);
    let mut i11 = Vec::with_capacity(n);
    let mut i12 = Vec::with_capacity(n);
    let mut i13 = Vec::with_capacity(n);
    let mut i20 = Vec::with_capacity(n);
    let mut i21 = Vec::with_capacity(n);
    let mut i22 = Vec::with_capacity(n);
    let mut i23 = Vec::with_capacity(n);

    for i in 0..n {
        let z = grid.node(i);
        let r = z.norm();
        let theta = z.arg();
        let phase_fac = (-phase(z, &params, branch)? / h).exp();
        let gphi = grad_phase(z, &params, branch)?;
        let br = media.b_radial(r);
        let (si, co) = theta.sin_cos();
        let b_vec = [br * co, br * si];
        let wh = sol.w_h.values[i];
        let gwh = [grad_wh[0].values[i], grad_wh[1].values[i]];
        let vn = t.grad.eval(z);
        let v_lead = t.v_leading(z);
        let vv = v.eval(z);
        let gv = v.gradient(z);

        // G = −(1+w_h)(∇Φ/h + b⃗) + ∇w_h
        let mut g_vec = [zero; 2];
        for d in 0..2 {
            g_vec[d] = -(Complex64::new(1.0, 0.0) + wh) * (gphi[d] / h + b_vec[d]) + gwh[d];
        }

        i10.push(phase_fac / h * (gphi[0] * vn[0] + gphi[1] * vn[1]));
        let g1_diff = media.g1(r) - media.c1;
        i11.push(g1_diff * (gv[0] * g_vec[0] + gv[1] * g_vec[1]) * phase_fac);
        let dv = [gv[0] - vn[0], gv[1] - vn[1]];
        i12.push(media.c1 * (dv[0] * g_vec[0] + dv[1] * g_vec[1]) * phase_fac);
        let mut tail = [zero; 2];
        for d in 0..2 {
            tail[d] = -wh * (gphi[d] / h + b_vec[d]) - b_vec[d] + gwh[d];
        }
        i13.push(media.c1 * (vn[0] * tail[0] + vn[1] * tail[1]) * phase_fac);

        i20.push(v_lead * phase_fac);
        let g2_diff = media.g2(r) - media.c2;
        let one_plus = Complex64::new(1.0, 0.0) + wh;
        i21.push(g2_diff * vv * one_plus * phase_fac);
        i22.push(media.c2 * (vv - v_lead) * one_plus * phase_fac);
        i23.push(media.c2 * v_lead * wh * phase_fac);
    }

    let constant_profile = media.profile == MediumProfile::Constant;
    let gain13 = (1.0 - 2.0 / (alpha * p1)).min((1.0 - 2.0 / p2) / alpha);
    let pieces = vec![
        LocalPiece {
            name: "I10",
            value: integrate(&ComplexFieldSample::from_values(grid, i10)?)?,
            predicted_exponent: Some((nn + 1.0) / alpha),
        },
        LocalPiece {
            name: "I11",
            value: integrate(&ComplexFieldSample::from_values(grid, i11)?)?,
            predicted_exponent: if constant_profile {
                None
            } else {
                Some((nn + 1.0 + media.beta1) / alpha)
            },
        },
        LocalPiece {
            name: "I12",
            value: integrate(&ComplexFieldSample::from_values(grid, i12)?)?,
            predicted_exponent: Some((nn + 2.0) / alpha),
        },
        LocalPiece {
            name: "I13",
            value: integrate(&ComplexFieldSample::from_values(grid, i13)?)?,
            predicted_exponent: Some((nn + 1.0) / alpha + gain13),
        },
        LocalPiece {
            name: "I20",
            value: integrate(&ComplexFieldSample::from_values(grid, i20)?)?,
            predicted_exponent: Some((n0 + 2.0) / alpha),
        },
        LocalPiece {
            name: "I21",
            value: integrate(&ComplexFieldSample::from_values(grid, i21)?)?,
            predicted_exponent: if constant_profile {
                None
            } else {
                Some((n0 + 2.0 + media.beta2) / alpha)
            },
        },
        LocalPiece {
            name: "I22",
            value: integrate(&ComplexFieldSample::from_values(grid, i22)?)?,
            predicted_exponent: Some((n0 + 3.0) / alpha),
        },
        LocalPiece {
            name: "I23",
            value: integrate(&ComplexFieldSample::from_values(grid, i23)?)?,
            predicted_exponent: Some((n0 + 2.0 + alpha - 2.0 / p1) / alpha),
        },
    ];
    Ok(LocalDecomposition { h, pieces })
}

/// Recombines a decomposition into the full corner integral:
/// (−c₁ I₁₀ + I₁₁ + I₁₂ + I₁₃) − k²(c₂ I₂₀ + I₂₁ + I₂₂ + I₂₃).
pub fn recombine(media: &MediumModel, dec: &LocalDecomposition) -> Complex64 {
    let g = |name: &str| dec.piece(name).map(|p| p.value).unwrap_or_default();
    let grad_part = -media.c1 * g("I10") + g("I11") + g("I12") + g("I13");
    let value_part = media.c2 * g("I20") + g("I21") + g("I22") + g("I23");
    grad_part - media.k * media.k * value_part
}

/// Outcome of the amplitude-invariance sweep.
#[derive(Debug, Clone)]
pub struct AInvarianceReport {
    pub values: Vec<Complex64>,
    pub fit: RateFitReport,
    pub base_exponent: f64,
    pub gain_threshold: f64,
    pub passed: bool,
}

/// Under a resonant aperture (2θ₀ = lπ/(1+N)) the gradient moment
/// ∫ V_N · ∇(A e^{−Φ/h}) dx decays faster than h^{(N+1)/α} for every
/// holomorphic amplitude: the measured exponent must clear the
/// threshold (N+1)/α + 0.5 for unit-scale A, or (N+1+β)/α − 0.1 when
/// A vanishes to order β at the corner.
pub fn general_a_invariance(
    a: &HolomorphicPoly,
    n: u32,
    b1: Complex64,
    b2: Complex64,
    params_alpha: f64,
    grid: &Arc<PolarGrid>,
    h_grid: &[f64],
) -> Result<AInvarianceReport> {
    let theta0 = grid.sector().theta0();
    if super::angle_vanishing(theta0, n).is_none() {
        return Err(Error::Domain(format!(
            "aperture 2*{theta0} is not resonant for gradient order {n}"
        )));
    }
    let field = GradLeading::Harmonic { n, b1, b2 };
    let beta = a.vanishing_order().unwrap_or(0) as f64;

    let mut values = Vec::with_capacity(h_grid.len());
    for &h in h_grid {
        let params = PhaseParams::new(params_alpha, h)?;
        let f = ComplexFieldSample::from_fn(grid, |z| {
            let ph = (-phase(z, &params, Branch::Principal).unwrap() / h).exp();
            let gphi = grad_phase(z, &params, Branch::Principal).unwrap();
            let da = a.deriv_eval(z);
            let grad = [
                ph * (da - a.eval(z) * gphi[0] / h),
                ph * (Complex64::new(0.0, 1.0) * da - a.eval(z) * gphi[1] / h),
            ];
            let vn = field.eval(z);
            vn[0] * grad[0] + vn[1] * grad[1]
        });
        values.push(integrate(&f)?);
    }
    let mags: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    let base_exponent = (n as f64 + 1.0) / params_alpha;
    let fit = rate_fit(h_grid, &mags, base_exponent)?;
    let gain_threshold = if beta == 0.0 {
        base_exponent + 0.5
    } else {
        (n as f64 + 1.0 + beta) / params_alpha - 0.1
    };
    let passed = fit.slope >= gain_threshold;
    Ok(AInvarianceReport {
        values,
        fit,
        base_exponent,
        gain_threshold,
        passed,
    })
}

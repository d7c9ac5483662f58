//! Construction of CGO solutions W = e^{−Φ/h}(A + w_h): the operators
//! S₀, S₁, S, the Neumann-series solve for the correction w_h, and
//! h-trend verification of the operator norms.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analytic::{
    dbar_of_phase_inv, dbar_phase_im_inv, dphase, phase, phase_im, Branch, PhaseParams,
};
use crate::cauchy::cauchy_apply;
use crate::corner::MediumModel;
use crate::error::{Error, Result};
use crate::fd::{fd_dbar, fd_laplacian};
use crate::grid::{ComplexFieldSample, PolarGrid};
use crate::norms::{l2_norm, lp_norm_masked, norm_report, NormReport};

/// Holomorphic amplitude supplied in closed form (a polynomial in z), so
/// ∂̄A = 0 holds analytically rather than only to discretization error.
#[derive(Debug, Clone, PartialEq)]
pub struct HolomorphicPoly {
    coeffs: Vec<Complex64>,
}

impl HolomorphicPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        HolomorphicPoly { coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        HolomorphicPoly { coeffs: vec![c] }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    /// z^k.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        HolomorphicPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn deriv_eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * z + k as f64 * c;
        }
        acc
    }

    /// Order of vanishing at the origin (index of the lowest nonzero
    /// coefficient); zero for a unit-scale amplitude.
    pub fn vanishing_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| c.norm() > 0.0)
    }

    pub fn sample(&self, grid: &Arc<PolarGrid>) -> ComplexFieldSample {
        ComplexFieldSample::from_fn(grid, |z| self.eval(z))
    }
}

/// Potential feeding the operator S: an explicit bounded q or an
/// admissible medium reduced through q = k²ρ/γ − γ^{−1/2}Δγ^{1/2}.
#[derive(Debug, Clone)]
pub enum PotentialSpec {
    ExplicitQ(ComplexFieldSample),
    Medium(MediumModel),
}

impl PotentialSpec {
    pub fn constant_q(grid: &Arc<PolarGrid>, q: Complex64) -> Self {
        PotentialSpec::ExplicitQ(ComplexFieldSample::constant(grid, q))
    }

    pub fn medium(&self) -> Option<&MediumModel> {
        match self {
            PotentialSpec::Medium(m) => Some(m),
            _ => None,
        }
    }

    pub fn q_sample(&self, grid: &Arc<PolarGrid>) -> Result<ComplexFieldSample> {
        match self {
            PotentialSpec::ExplicitQ(q) => {
                if !Arc::ptr_eq(q.grid(), grid) {
                    return Err(Error::Config("explicit q lives on a different grid".into()));
                }
                Ok(q.clone())
            }
            PotentialSpec::Medium(m) => Ok(ComplexFieldSample::from_fn(grid, |z| {
                Complex64::new(m.q_at(z.norm()), 0.0)
            })),
        }
    }

    fn conjugated(&self, grid: &Arc<PolarGrid>) -> Result<PotentialSpec> {
        Ok(match self {
            PotentialSpec::ExplicitQ(q) => {
                if !Arc::ptr_eq(q.grid(), grid) {
                    return Err(Error::Config("explicit q lives on a different grid".into()));
                }
                PotentialSpec::ExplicitQ(q.conj())
            }
            // media are real-valued, so q is its own conjugate
            PotentialSpec::Medium(m) => PotentialSpec::Medium(*m),
        })
    }
}

/// Pointwise phase factors shared by repeated operator applications.
struct PhaseTables {
    /// e^{−2iφ/h}
    e_minus: Vec<Complex64>,
    /// e^{+2iφ/h}
    e_plus: Vec<Complex64>,
    /// (2∂̄φ)^{−1}
    inv_two_dbar_phi: Vec<Complex64>,
    /// ∂̄((2∂̄φ)^{−1})
    dbar_inv_two_dbar_phi: Vec<Complex64>,
}

impl PhaseTables {
    fn build(grid: &Arc<PolarGrid>, params: &PhaseParams) -> Result<PhaseTables> {
        let n = grid.len();
        let mut e_minus = Vec::with_capacity(n);
        let mut e_plus = Vec::with_capacity(n);
        let mut inv2 = Vec::with_capacity(n);
        let mut dinv2 = Vec::with_capacity(n);
        for i in 0..n {
            let z = grid.node(i);
            let phi = phase_im(z, params)?;
            let rot = Complex64::from_polar(1.0, 2.0 * phi / params.h);
            e_plus.push(rot);
            e_minus.push(rot.conj());
            inv2.push(0.5 * dbar_phase_im_inv(z, params)?);
            dinv2.push(0.5 * dbar_of_phase_inv(z, params, false)?);
        }
        Ok(PhaseTables {
            e_minus,
            e_plus,
            inv_two_dbar_phi: inv2,
            dbar_inv_two_dbar_phi: dinv2,
        })
    }
}

fn apply_s0(f: &ComplexFieldSample, tables: &PhaseTables) -> Result<ComplexFieldSample> {
    let weighted = ComplexFieldSample::from_values(
        f.grid(),
        f.values
            .iter()
            .zip(&tables.e_minus)
            .map(|(&v, &e)| e * v)
            .collect(),
    )?;
    cauchy_apply(&weighted, true)
}

fn apply_s1(f: &ComplexFieldSample, tables: &PhaseTables) -> Result<ComplexFieldSample> {
    let dbar_f = fd_dbar(f);
    let grid = f.grid();
    let n = grid.len();
    let mut first = Vec::with_capacity(n);
    let mut inner = Vec::with_capacity(n);
    for i in 0..n {
        let ratio = f.values[i] * tables.inv_two_dbar_phi[i];
        first.push(tables.e_plus[i] * ratio);
        let dbar_ratio = dbar_f.values[i] * tables.inv_two_dbar_phi[i]
            + f.values[i] * tables.dbar_inv_two_dbar_phi[i];
        inner.push(tables.e_plus[i] * dbar_ratio);
    }
    let transform = cauchy_apply(&ComplexFieldSample::from_values(grid, inner)?, false)?;
    let values = first
        .iter()
        .zip(&transform.values)
        .map(|(&a, &b)| a - b)
        .collect();
    ComplexFieldSample::from_values(grid, values)
}

/// S₀f = 𝒯̄(e^{−2iφ/h} f).
pub fn op_s0(f: &ComplexFieldSample, params: &PhaseParams) -> Result<ComplexFieldSample> {
    let tables = PhaseTables::build(f.grid(), params)?;
    apply_s0(f, &tables)
}

/// S₁f = e^{2iφ/h} f/(2∂̄φ) − 𝒯(e^{2iφ/h} ∂̄(f/(2∂̄φ))), with ∂̄f by finite
/// differences and the phase factors in closed form.
pub fn op_s1(f: &ComplexFieldSample, params: &PhaseParams) -> Result<ComplexFieldSample> {
    let tables = PhaseTables::build(f.grid(), params)?;
    apply_s1(f, &tables)
}

/// Sf = (ih/4) S₁ S₀ (q f).
pub fn op_s(
    f: &ComplexFieldSample,
    pot: &PotentialSpec,
    params: &PhaseParams,
) -> Result<ComplexFieldSample> {
    let q = pot.q_sample(f.grid())?;
    let tables = PhaseTables::build(f.grid(), params)?;
    apply_s(f, &q, &tables, params.h)
}

fn apply_s(
    f: &ComplexFieldSample,
    q: &ComplexFieldSample,
    tables: &PhaseTables,
    h: f64,
) -> Result<ComplexFieldSample> {
    let qf = q.mul(f)?;
    let s0 = apply_s0(&qf, tables)?;
    let s1 = apply_s1(&s0, tables)?;
    Ok(s1.scale(Complex64::new(0.0, 0.25 * h)))
}

/// Sums the Neumann series w_h = Σ_{j≥1} S^j A, truncating when the
/// latest term's L² norm drops below tol·(accumulated norm + floor).
/// Three consecutive growing terms abort with an "h too large" error;
/// exhausting `maxiter` returns the partial sum inside the error.
pub fn neumann_solve(
    a: &ComplexFieldSample,
    pot: &PotentialSpec,
    params: &PhaseParams,
    tol: f64,
    maxiter: usize,
) -> Result<(ComplexFieldSample, usize)> {
    let q = pot.q_sample(a.grid())?;
    let tables = PhaseTables::build(a.grid(), params)?;
    let mut term = apply_s(a, &q, &tables, params.h)?;
    let mut acc = term.clone();
    let mut iterations = 1usize;
    let mut prev_norm = l2_norm(&term)?;
    let mut growth_streak = 0usize;
    loop {
        let acc_norm = l2_norm(&acc)?;
        if prev_norm <= tol * (acc_norm + 1e-300) {
            return Ok((acc, iterations));
        }
        if iterations >= maxiter {
            return Err(Error::NonConvergence {
                iterations,
                last_norm: prev_norm,
                tol,
                partial: acc.values,
            });
        }
        term = apply_s(&term, &q, &tables, params.h)?;
        acc = acc.add(&term)?;
        iterations += 1;
        let norm = l2_norm(&term)?;
        if norm > prev_norm {
            growth_streak += 1;
            if growth_streak >= 3 {
                return Err(Error::HTooLarge {
                    h: params.h,
                    consecutive: growth_streak,
                    last_norm: norm,
                });
            }
        } else {
            growth_streak = 0;
        }
        prev_norm = norm;
    }
}

/// Options of [`build_cgo`]. The default norm exponents sit at the
/// midpoints of the admissible ranges for α = 1/2: p₁ = 2/α + 2 and
/// p₂ = (2 + 2/α)/2.
#[derive(Debug, Clone, Copy)]
pub struct CgoBuildOptions {
    pub tol: f64,
    pub maxiter: usize,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub interior_margin: usize,
}

impl Default for CgoBuildOptions {
    fn default() -> Self {
        CgoBuildOptions {
            tol: 1e-10,
            maxiter: 50,
            p1: None,
            p2: None,
            interior_margin: 2,
        }
    }
}

/// A constructed CGO solution with its diagnostics.
#[derive(Debug, Clone)]
pub struct CgoSolution {
    pub params: PhaseParams,
    pub branch: Branch,
    /// Amplitude samples (already conjugated on the conjugate branch).
    pub amplitude: ComplexFieldSample,
    /// ∇A componentwise (conjugated on the conjugate branch).
    pub grad_amplitude: [ComplexFieldSample; 2],
    pub w_h: ComplexFieldSample,
    /// W = e^{−Φⱼ/h}(A + w_h).
    pub w_total: ComplexFieldSample,
    /// γ^{−1/2}(A + w_h) e^{−Φⱼ/h} for medium-derived potentials.
    pub w_medium: Option<ComplexFieldSample>,
    pub residual_rel: f64,
    pub norms: Vec<NormReport>,
    pub iterations: usize,
}

impl CgoSolution {
    /// The solution used in corner integrals: the medium form when
    /// available, otherwise W itself.
    pub fn field(&self) -> &ComplexFieldSample {
        self.w_medium.as_ref().unwrap_or(&self.w_total)
    }
}

fn build_principal(
    a: &HolomorphicPoly,
    pot: &PotentialSpec,
    params: &PhaseParams,
    grid: &Arc<PolarGrid>,
    opts: &CgoBuildOptions,
) -> Result<CgoSolution> {
    let a_sample = a.sample(grid);
    let grad_a = [
        ComplexFieldSample::from_fn(grid, |z| a.deriv_eval(z)),
        ComplexFieldSample::from_fn(grid, |z| Complex64::new(0.0, 1.0) * a.deriv_eval(z)),
    ];
    let q = pot.q_sample(grid)?;
    let (w_h, iterations) = neumann_solve(&a_sample, pot, params, opts.tol, opts.maxiter)?;
    let w_h_plus_a = a_sample.add(&w_h)?;

    let phase_factor = ComplexFieldSample::from_fn(grid, |z| {
        (-phase(z, params, Branch::Principal).unwrap() / params.h).exp()
    });
    let w_total = phase_factor.mul(&w_h_plus_a)?;
    let w_medium = match pot {
        PotentialSpec::Medium(m) => Some(ComplexFieldSample::from_values(
            grid,
            w_total
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| v / m.gamma_sqrt_at(grid.r_of(i)))
                .collect(),
        )?),
        PotentialSpec::ExplicitQ(_) => None,
    };

    // Residual through the phase-factored identity
    // ΔW + qW = e^{−Φ/h}(ΔW_h − (4/h)(∂Φ)(∂̄W_h) + qW_h); the exponential
    // layer never meets a difference stencil.
    let lap_wh = fd_laplacian(&w_h_plus_a);
    let dbar_wh = fd_dbar(&w_h_plus_a);
    let mut residual_vals = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let z = grid.node(i);
        let dphi = dphase(z, params)?;
        let bracket = lap_wh.values[i] - 4.0 / params.h * dphi * dbar_wh.values[i]
            + q.values[i] * w_h_plus_a.values[i];
        residual_vals.push(phase_factor.values[i] * bracket);
    }
    let residual = ComplexFieldSample::from_values(grid, residual_vals)?;
    let mask = grid.interior_mask(opts.interior_margin);
    let q_sup = q.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let w_l2_int = lp_norm_masked(&w_total, 2.0, &mask)?;
    let res_l2_int = lp_norm_masked(&residual, 2.0, &mask)?;
    let scale = if q_sup > 0.0 { q_sup } else { 1.0 };
    let residual_rel = res_l2_int / (scale * w_l2_int.max(1e-300));

    let alpha = params.alpha;
    let p1 = opts.p1.unwrap_or(2.0 / alpha + 2.0);
    let p2 = opts.p2.unwrap_or(0.5 * (2.0 + 2.0 / alpha));
    let norms = vec![
        norm_report(&w_h, p1, "w_h")?,
        norm_report(&w_h, p2, "w_h")?,
        norm_report(&w_total, 2.0, "W")?,
    ];

    Ok(CgoSolution {
        params: *params,
        branch: Branch::Principal,
        amplitude: a_sample,
        grad_amplitude: grad_a,
        w_h,
        w_total,
        w_medium,
        residual_rel,
        norms,
        iterations,
    })
}

/// Builds the CGO solution for the requested branch. The conjugate
/// variant solves with the conjugated potential and conjugates the
/// result, yielding the solution with leading factor e^{−Φ̄/h} and
/// amplitude Ā; for real potentials it is the complex conjugate of the
/// principal solution.
pub fn build_cgo(
    a: &HolomorphicPoly,
    pot: &PotentialSpec,
    params: &PhaseParams,
    grid: &Arc<PolarGrid>,
    branch: Branch,
    opts: &CgoBuildOptions,
) -> Result<CgoSolution> {
    match branch {
        Branch::Principal => build_principal(a, pot, params, grid, opts),
        Branch::Conjugate => {
            let pot_c = pot.conjugated(grid)?;
            let sol = build_principal(a, &pot_c, params, grid, opts)?;
            Ok(CgoSolution {
                branch: Branch::Conjugate,
                amplitude: sol.amplitude.conj(),
                grad_amplitude: [sol.grad_amplitude[0].conj(), sol.grad_amplitude[1].conj()],
                w_h: sol.w_h.conj(),
                w_total: sol.w_total.conj(),
                w_medium: sol.w_medium.map(|w| w.conj()),
                ..sol
            })
        }
    }
}

/// One probe's h-trend of the operator norms.
#[derive(Debug, Clone)]
pub struct SmappingProbe {
    pub name: String,
    pub rows: Vec<SmappingRow>,
    /// least-squares slope of log(Lᵖ ratio) against log h
    pub lp_slope: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SmappingRow {
    pub h: f64,
    pub lp_ratio: f64,
    /// present only when p < 2/α (the W^{1,p} bound's range)
    pub w1p_ratio: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SmappingReport {
    pub p: f64,
    pub probes: Vec<SmappingProbe>,
}

/// Tabulates ‖Sf‖_p/‖f‖_p and ‖Sf‖_{W^{1,p}}/‖f‖_p over an h-grid for a
/// fixed probe set (constant, Gaussian, monomial) and fits the Lᵖ slope.
pub fn verify_smapping(
    pot: &PotentialSpec,
    h_grid: &[f64],
    p: f64,
    grid: &Arc<PolarGrid>,
    alpha: f64,
) -> Result<SmappingReport> {
    if !(p > 1.0) {
        return Err(Error::Config(format!("p must exceed 1, got {p}")));
    }
    let q = pot.q_sample(grid)?;
    let a = grid.sector().radius();
    let center = Complex64::from_polar(0.55 * a, 0.0);
    let probes: Vec<(String, ComplexFieldSample)> = vec![
        (
            "constant".into(),
            ComplexFieldSample::constant(grid, Complex64::new(1.0, 0.0)),
        ),
        (
            "gaussian".into(),
            ComplexFieldSample::from_fn(grid, |z| {
                Complex64::new((-(z - center).norm_sqr() / (0.02 * a * a)).exp(), 0.0)
            }),
        ),
        ("monomial".into(), ComplexFieldSample::from_fn(grid, |z| z)),
    ];
    let with_w1p = p < 2.0 / alpha;

    let mut out = Vec::new();
    for (name, f) in probes {
        let f_lp = crate::norms::lp_norm(&f, p)?;
        let mut rows = Vec::new();
        for &h in h_grid {
            let params = PhaseParams::new(alpha, h)?;
            let tables = PhaseTables::build(grid, &params)?;
            let sf = apply_s(&f, &q, &tables, h)?;
            let lp_ratio = crate::norms::lp_norm(&sf, p)? / f_lp;
            let w1p_ratio = if with_w1p {
                Some(crate::norms::w1p_norm(&sf, p)? / f_lp)
            } else {
                None
            };
            rows.push(SmappingRow {
                h,
                lp_ratio,
                w1p_ratio,
            });
        }
        let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
        let ratios: Vec<f64> = rows.iter().map(|r| r.lp_ratio).collect();
        let lp_slope = if ratios.iter().all(|&v| v > 0.0) {
            crate::corner::rates::log_log_slope(&hs, &ratios)
        } else {
            0.0
        };
        out.push(SmappingProbe {
            name,
            rows,
            lp_slope,
        });
    }
    Ok(SmappingReport { p, probes: out })
}

/// Parallel helper for h-sweeps that preserves input order.
pub fn map_over_h<T: Send, F: Fn(f64) -> Result<T> + Sync>(h_grid: &[f64], f: F) -> Result<Vec<T>> {
    h_grid
        .par_iter()
        .map(|&h| f(h))
        .collect::<Result<Vec<T>>>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::SectorDomain;
    use crate::grid::build_sector_grid;
    use std::f64::consts::FRAC_PI_3;

    fn setup(nr: usize, nt: usize, h: f64) -> (Arc<PolarGrid>, PhaseParams) {
        let sector = SectorDomain::new(FRAC_PI_3, 1.0).unwrap();
        let params = PhaseParams::new(0.5, h).unwrap();
        let grid = build_sector_grid(&sector, nr, nt, &params).unwrap();
        (grid, params)
    }

    fn gaussian(grid: &Arc<PolarGrid>) -> ComplexFieldSample {
        let center = Complex64::new(0.55, 0.0);
        ComplexFieldSample::from_fn(grid, |z| {
            Complex64::new((-(z - center).norm_sqr() / 0.02).exp(), 0.0)
        })
    }

    #[test]
    fn s0_of_zero_is_zero() {
        let (grid, params) = setup(24, 24, 0.1);
        let z = ComplexFieldSample::zeros(&grid);
        let s = op_s0(&z, &params).unwrap();
        assert!(s.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn s0_defining_identity() {
        // ∂(S₀f) ≈ e^{−2iφ/h} f
        let (grid, params) = setup(96, 96, 0.1);
        let f = gaussian(&grid);
        let s0 = op_s0(&f, &params).unwrap();
        let lhs = crate::fd::fd_partial(&s0);
        let rhs = ComplexFieldSample::from_fn(&grid, |z| {
            let phi = phase_im(z, &params).unwrap();
            Complex64::from_polar(1.0, -2.0 * phi / params.h)
        })
        .mul(&f)
        .unwrap();
        let mask = grid.interior_mask(2);
        let err = lp_norm_masked(&lhs.sub(&rhs).unwrap(), 2.0, &mask).unwrap();
        let base = l2_norm(&f).unwrap();
        assert!(err / base < 2e-2, "relative identity error {}", err / base);
    }

    #[test]
    fn s1_defining_identity() {
        // ∂̄(S₁f) ≈ (i/h) e^{2iφ/h} f
        let (grid, params) = setup(96, 96, 0.2);
        let f = gaussian(&grid);
        let s1 = op_s1(&f, &params).unwrap();
        let lhs = fd_dbar(&s1);
        let rhs = ComplexFieldSample::from_fn(&grid, |z| {
            let phi = phase_im(z, &params).unwrap();
            Complex64::new(0.0, 1.0 / params.h) * Complex64::from_polar(1.0, 2.0 * phi / params.h)
        })
        .mul(&f)
        .unwrap();
        let mask = grid.interior_mask(2);
        let err = lp_norm_masked(&lhs.sub(&rhs).unwrap(), 2.0, &mask).unwrap();
        let base = lp_norm_masked(&rhs, 2.0, &mask).unwrap();
        assert!(err / base < 5e-2, "relative identity error {}", err / base);
    }

    #[test]
    fn s_of_zero_potential_is_zero() {
        let (grid, params) = setup(24, 24, 0.1);
        let f = gaussian(&grid);
        let pot = PotentialSpec::constant_q(&grid, Complex64::new(0.0, 0.0));
        let s = op_s(&f, &pot, &params).unwrap();
        assert!(l2_norm(&s).unwrap() < 1e-14);
    }

    #[test]
    fn s_solves_its_equation() {
        // 4 e^{2iφ/h} ∂(e^{−2iφ/h} ∂̄(Sf)) ≈ −q f
        let (grid, params) = setup(96, 96, 0.1);
        let f = gaussian(&grid);
        let pot = PotentialSpec::constant_q(&grid, Complex64::new(1.0, 0.0));
        let sf = op_s(&f, &pot, &params).unwrap();
        let rot = ComplexFieldSample::from_fn(&grid, |z| {
            let phi = phase_im(z, &params).unwrap();
            Complex64::from_polar(1.0, 2.0 * phi / params.h)
        });
        let inner = rot.conj().mul(&fd_dbar(&sf)).unwrap();
        let lhs = rot
            .mul(&crate::fd::fd_partial(&inner))
            .unwrap()
            .scale(Complex64::new(4.0, 0.0));
        let rhs = f.scale(Complex64::new(-1.0, 0.0));
        let mask = grid.interior_mask(2);
        let err = lp_norm_masked(&lhs.sub(&rhs).unwrap(), 2.0, &mask).unwrap();
        let base = lp_norm_masked(&rhs, 2.0, &mask).unwrap();
        assert!(err / base < 1e-1, "relative equation error {}", err / base);
    }

    #[test]
    fn neumann_zero_potential_single_iteration() {
        let (grid, params) = setup(24, 24, 0.1);
        let a = HolomorphicPoly::one().sample(&grid);
        let pot = PotentialSpec::constant_q(&grid, Complex64::new(0.0, 0.0));
        let (w_h, iters) = neumann_solve(&a, &pot, &params, 1e-10, 50).unwrap();
        assert_eq!(iters, 1);
        assert!(l2_norm(&w_h).unwrap() < 1e-14);
    }

    #[test]
    fn neumann_fixed_point() {
        // w_h ≈ S(A + w_h)
        let (grid, params) = setup(64, 64, 0.05);
        let a = HolomorphicPoly::one().sample(&grid);
        let pot = PotentialSpec::constant_q(&grid, Complex64::new(1.0, 0.0));
        let tol = 1e-10;
        let (w_h, iters) = neumann_solve(&a, &pot, &params, tol, 50).unwrap();
        assert!(iters <= 25, "took {iters} iterations");
        let s_of_sum = op_s(&a.add(&w_h).unwrap(), &pot, &params).unwrap();
        let defect = l2_norm(&w_h.sub(&s_of_sum).unwrap()).unwrap();
        let scale = l2_norm(&a.add(&w_h).unwrap()).unwrap();
        assert!(defect <= 100.0 * tol * scale, "fixed-point defect {defect}");
    }

    #[test]
    fn zero_potential_solution_is_pure_phase() {
        let (grid, params) = setup(48, 48, 0.1);
        let pot = PotentialSpec::constant_q(&grid, Complex64::new(0.0, 0.0));
        let sol = build_cgo(
            &HolomorphicPoly::one(),
            &pot,
            &params,
            &grid,
            Branch::Principal,
            &CgoBuildOptions::default(),
        )
        .unwrap();
        let expect = ComplexFieldSample::from_fn(&grid, |z| {
            (-phase(z, &params, Branch::Principal).unwrap() / params.h).exp()
        });
        let err = l2_norm(&sol.w_total.sub(&expect).unwrap()).unwrap();
        assert!(err < 1e-12);
        // factored-residual of the exact phase solution is tiny
        assert!(sol.residual_rel < 1e-10, "residual {}", sol.residual_rel);
    }

    #[test]
    fn constant_medium_solution_has_small_residual() {
        let (grid, params) = setup(96, 96, 0.1);
        let medium = MediumModel::constant(1.0, 0.5, 1.0).unwrap();
        let pot = PotentialSpec::Medium(medium);
        let sol = build_cgo(
            &HolomorphicPoly::one(),
            &pot,
            &params,
            &grid,
            Branch::Principal,
            &CgoBuildOptions::default(),
        )
        .unwrap();
        assert!(sol.w_medium.is_some());
        assert!(
            sol.residual_rel <= 5e-2,
            "relative residual {}",
            sol.residual_rel
        );
    }

    #[test]
    fn conjugate_solution_mirrors_the_principal_one() {
        // real q, real-on-axis A: the conjugate-branch solution at (r, θ)
        // equals the principal solution at (r, −θ)
        let (grid, params) = setup(48, 48, 0.1);
        let pot = PotentialSpec::constant_q(&grid, Complex64::new(1.0, 0.0));
        let opts = CgoBuildOptions::default();
        let principal = build_cgo(
            &HolomorphicPoly::one(),
            &pot,
            &params,
            &grid,
            Branch::Principal,
            &opts,
        )
        .unwrap();
        let conjugate = build_cgo(
            &HolomorphicPoly::one(),
            &pot,
            &params,
            &grid,
            Branch::Conjugate,
            &opts,
        )
        .unwrap();
        let sup = principal
            .w_total
            .values
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        let mut worst = 0.0f64;
        for i in 0..grid.len() {
            let j = grid.mirror_index(i);
            let diff = (conjugate.w_total.values[i] - principal.w_total.values[j]).norm();
            worst = worst.max(diff);
        }
        assert!(worst <= 1e-10 * sup, "mirror defect {worst} vs scale {sup}");
        // and pointwise it is the complex conjugate of the principal build
        let mut worst2 = 0.0f64;
        for i in 0..grid.len() {
            worst2 = worst2
                .max((conjugate.w_total.values[i] - principal.w_total.values[i].conj()).norm());
        }
        assert!(worst2 <= 1e-10 * sup);
    }

    #[test]
    fn s_norm_shrinks_along_h() {
        let (grid, _) = setup(64, 64, 0.1);
        let pot = PotentialSpec::constant_q(&grid, Complex64::new(1.0, 0.0));
        let f = gaussian(&grid);
        let mut prev = f64::INFINITY;
        for &h in &[0.2, 0.1, 0.05] {
            let params = PhaseParams::new(0.5, h).unwrap();
            let sf = op_s(&f, &pot, &params).unwrap();
            let ratio = l2_norm(&sf).unwrap() / l2_norm(&f).unwrap();
            assert!(ratio < prev, "ratio {ratio} did not shrink at h={h}");
            prev = ratio;
        }
    }
}

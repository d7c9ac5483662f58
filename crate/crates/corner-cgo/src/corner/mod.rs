//! Quantitative corner machinery: admissible media, Bessel–Fourier
//! incident fields, Taylor-structure extraction, the corner orthogonality
//! integral, sharp constants and their vanishing conditions, and the
//! rate-fit harness.

pub mod constants;
pub mod moments;
pub mod rates;
pub mod taylor;

pub use constants::{
    angle_vanishing, c0_coeff, nonscattering_candidate, sector_moment, sharp_c0, sharp_c1,
    sharp_c2, C2Degeneracy,
};
pub use moments::{
    corner_integral, general_a_invariance, local_decomposition, sector_moment_quad,
    AInvarianceReport, LocalDecomposition, LocalPiece,
};
pub use rates::{rate_fit, RateFitReport};
pub use taylor::taylor_leading;

use num_complex::Complex64;

use crate::analytic::bessel_j;
use crate::error::{Error, Result};

/// Radial profile class of an admissible medium near the corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MediumProfile {
    /// γ and ρ constant: the essential jumps are attained exactly.
    Constant,
    /// γ^{−1/2}(γ−1) = c₁ + C₁ r^{β₁} and γ^{−1/2}(ρ−1) = c₂ + C₂ r^{β₂}.
    PowerPerturbed,
}

/// Scalar medium (γ, ρ) admissible at the corner, parameterized by the
/// essential jumps c₁, c₂ and the perturbation orders β₁, β₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumModel {
    pub c1: f64,
    pub c2: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Perturbation amplitudes C₁, C₂ (zero for constant profiles).
    pub amp1: f64,
    pub amp2: f64,
    pub profile: MediumProfile,
    pub gamma_const: f64,
    pub rho_const: f64,
    pub k: f64,
}

impl MediumModel {
    /// Constant medium with prescribed essential jumps: √γ solves
    /// (γ−1)/√γ = c₁, i.e. √γ = (c₁ + √(c₁²+4))/2, and ρ = 1 + c₂√γ.
    pub fn constant(c1: f64, c2: f64, k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
        }
        let sqrt_gamma = 0.5 * (c1 + (c1 * c1 + 4.0).sqrt());
        let gamma_const = sqrt_gamma * sqrt_gamma;
        let rho_const = 1.0 + c2 * sqrt_gamma;
        if !(rho_const > 0.0) {
            return Err(Error::Domain(format!(
                "ellipticity violated: rho = {rho_const} <= 0 for c2 = {c2}"
            )));
        }
        Ok(MediumModel {
            c1,
            c2,
            beta1: f64::INFINITY,
            beta2: f64::INFINITY,
            amp1: 0.0,
            amp2: 0.0,
            profile: MediumProfile::Constant,
            gamma_const,
            rho_const,
            k,
        })
    }

    /// Constant medium γ = ρ = a₀ (the rectangle-witness material); the
    /// essential jumps come out as c₁ = c₂ = (a₀−1)/√a₀.
    pub fn constant_from_value(a0: f64, k: f64) -> Result<Self> {
        if !(a0 > 0.0) {
            return Err(Error::Domain(format!("a0 must be positive, got {a0}")));
        }
        let c = (a0 - 1.0) / a0.sqrt();
        let m = Self::constant(c, c, k)?;
        debug_assert!((m.gamma_const - a0).abs() < 1e-12 * a0.max(1.0));
        Ok(m)
    }

    /// Power-perturbed admissible medium; the admissibility bounds hold
    /// with equality by construction.
    pub fn power_perturbed(
        c1: f64,
        c2: f64,
        beta1: f64,
        beta2: f64,
        amp1: f64,
        amp2: f64,
        k: f64,
    ) -> Result<Self> {
        if !(beta1 > 0.0 && beta2 > 0.0) {
            return Err(Error::Domain(format!(
                "perturbation orders must be positive, got beta1 = {beta1}, beta2 = {beta2}"
            )));
        }
        if amp1 < 0.0 || amp2 < 0.0 {
            return Err(Error::Domain("perturbation amplitudes must be nonnegative".into()));
        }
        let base = Self::constant(c1, c2, k)?;
        Ok(MediumModel {
            beta1,
            beta2,
            amp1,
            amp2,
            profile: MediumProfile::PowerPerturbed,
            ..base
        })
    }

    /// γ^{−1/2}(γ−1) profile.
    pub fn g1(&self, r: f64) -> f64 {
        match self.profile {
            MediumProfile::Constant => self.c1,
            MediumProfile::PowerPerturbed => self.c1 + self.amp1 * r.powf(self.beta1),
        }
    }

    /// γ^{−1/2}(ρ−1) profile.
    pub fn g2(&self, r: f64) -> f64 {
        match self.profile {
            MediumProfile::Constant => self.c2,
            MediumProfile::PowerPerturbed => self.c2 + self.amp2 * r.powf(self.beta2),
        }
    }

    fn dg1(&self, r: f64) -> f64 {
        match self.profile {
            MediumProfile::Constant => 0.0,
            MediumProfile::PowerPerturbed => self.amp1 * self.beta1 * r.powf(self.beta1 - 1.0),
        }
    }

    fn ddg1(&self, r: f64) -> f64 {
        match self.profile {
            MediumProfile::Constant => 0.0,
            MediumProfile::PowerPerturbed => {
                self.amp1 * self.beta1 * (self.beta1 - 1.0) * r.powf(self.beta1 - 2.0)
            }
        }
    }

    /// √γ(r) = (g₁ + √(g₁²+4))/2.
    pub fn gamma_sqrt_at(&self, r: f64) -> f64 {
        let g = self.g1(r);
        0.5 * (g + (g * g + 4.0).sqrt())
    }

    pub fn gamma_at(&self, r: f64) -> f64 {
        let s = self.gamma_sqrt_at(r);
        s * s
    }

    pub fn rho_at(&self, r: f64) -> f64 {
        1.0 + self.g2(r) * self.gamma_sqrt_at(r)
    }

    /// d√γ/dr through the profile chain rule.
    pub fn dr_gamma_sqrt(&self, r: f64) -> f64 {
        let g = self.g1(r);
        let root = (g * g + 4.0).sqrt();
        0.5 * self.dg1(r) * (1.0 + g / root)
    }

    /// Radial Laplacian of √γ: s'' + s'/r.
    pub fn laplacian_gamma_sqrt(&self, r: f64) -> f64 {
        let g = self.g1(r);
        let root = (g * g + 4.0).sqrt();
        let dg = self.dg1(r);
        let s1 = 0.5 * self.ddg1(r) * (1.0 + g / root) + dg * dg / (root * root * root);
        s1 + self.dr_gamma_sqrt(r) / r
    }

    /// Reduced potential q = k²ρ/γ − Δγ^{1/2}/γ^{1/2}.
    pub fn q_at(&self, r: f64) -> f64 {
        let qk = self.k * self.k * self.rho_at(r) / self.gamma_at(r);
        match self.profile {
            MediumProfile::Constant => qk,
            MediumProfile::PowerPerturbed => {
                qk - self.laplacian_gamma_sqrt(r) / self.gamma_sqrt_at(r)
            }
        }
    }

    /// Radial component of b⃗ = −γ^{1/2} ∇γ^{−1/2} = (d√γ/dr)/√γ · r̂.
    pub fn b_radial(&self, r: f64) -> f64 {
        self.dr_gamma_sqrt(r) / self.gamma_sqrt_at(r)
    }
}

/// One angular mode J_m(kr)(a e^{imθ} + b e^{−imθ}) of a local Helmholtz
/// solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentTerm {
    pub m: u32,
    pub a: Complex64,
    pub b: Complex64,
}

/// Finite Bessel–Fourier representation of an incident field; every term
/// satisfies the Helmholtz equation exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidentFieldModel {
    k: f64,
    terms: Vec<IncidentTerm>,
}

impl IncidentFieldModel {
    pub fn new(k: f64, terms: Vec<IncidentTerm>) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
        }
        let model = IncidentFieldModel { k, terms };
        if model.max_order().is_none() {
            return Err(Error::Domain("incident field is trivial".into()));
        }
        Ok(model)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn terms(&self) -> &[IncidentTerm] {
        &self.terms
    }

    /// Merged coefficient pair for angular order m. For m = 0 only the
    /// combination a + b matters; it is returned in the first slot.
    pub fn effective(&self, m: u32) -> (Complex64, Complex64) {
        let mut a = Complex64::new(0.0, 0.0);
        let mut b = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            if t.m == m {
                a += t.a;
                b += t.b;
            }
        }
        if m == 0 {
            (a + b, Complex64::new(0.0, 0.0))
        } else {
            (a, b)
        }
    }

    fn order_active(&self, m: u32) -> bool {
        let (a, b) = self.effective(m);
        a.norm() > 0.0 || b.norm() > 0.0
    }

    pub fn max_order(&self) -> Option<u32> {
        self.terms
            .iter()
            .map(|t| t.m)
            .filter(|&m| self.order_active(m))
            .max()
    }

    /// v(0) = a₀ + b₀.
    pub fn value_at_corner(&self) -> Complex64 {
        self.effective(0).0
    }

    /// ∇v(0) = ((k/2)(a₁+b₁), i(k/2)(a₁−b₁)); zero unless an m = 1 term
    /// is present.
    pub fn gradient_at_corner(&self) -> [Complex64; 2] {
        let (a, b) = self.effective(1);
        let s = 0.5 * self.k;
        [s * (a + b), Complex64::new(0.0, 1.0) * s * (a - b)]
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        let theta = z.arg();
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let jm = bessel_j(t.m, self.k * r);
            let ang = t.a * Complex64::from_polar(1.0, t.m as f64 * theta)
                + t.b * Complex64::from_polar(1.0, -(t.m as f64) * theta);
            acc += jm * ang;
        }
        acc
    }

    /// Cartesian gradient by term-by-term Bessel derivatives; requires
    /// r > 0 (grid nodes always are).
    pub fn gradient(&self, z: Complex64) -> [Complex64; 2] {
        let r = z.norm();
        let theta = z.arg();
        let (s, c) = theta.sin_cos();
        let mut gx = Complex64::new(0.0, 0.0);
        let mut gy = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let x = self.k * r;
            let djm = if t.m == 0 {
                -bessel_j(1, x)
            } else {
                0.5 * (bessel_j(t.m - 1, x) - bessel_j(t.m + 1, x))
            };
            let jm = bessel_j(t.m, x);
            let em = Complex64::from_polar(1.0, t.m as f64 * theta);
            let emc = em.conj();
            let ang = t.a * em + t.b * emc;
            let dang =
                Complex64::new(0.0, t.m as f64) * (t.a * em - t.b * emc);
            let ur = self.k * djm * ang;
            let ut = jm * dang;
            gx += c * ur - s / r * ut;
            gy += s * ur + c / r * ut;
        }
        [gx, gy]
    }
}

/// Complex symmetric 2×2 matrix (the Hessian-type data of the N = 1,
/// N₀ = 0 gradient term V₁(x) = Bx).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMat2 {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m22: Complex64,
}

impl SymMat2 {
    pub fn trace(&self) -> Complex64 {
        self.m11 + self.m22
    }

    /// The combination b_j = b₁₁ − b₂₂ − (−1)^j 2i b₁₂ entering the
    /// quadratic sharp constants.
    pub fn b_j(&self, branch: crate::analytic::Branch) -> Complex64 {
        self.m11 - self.m22 - branch.sign_j() * Complex64::new(0.0, 2.0) * self.m12
    }

    pub fn apply(&self, x1: f64, x2: f64) -> [Complex64; 2] {
        [self.m11 * x1 + self.m12 * x2, self.m12 * x1 + self.m22 * x2]
    }

    pub fn norm(&self) -> f64 {
        (self.m11.norm_sqr() + 2.0 * self.m12.norm_sqr() + self.m22.norm_sqr()).sqrt()
    }
}

/// Leading gradient term of the Taylor series of an incident field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradLeading {
    /// V_N = b₁ (1, i) r^N e^{iNθ} + b₂ (1, −i) r^N e^{−iNθ}, the gradient
    /// of a harmonic homogeneous polynomial of degree N+1.
    Harmonic { n: u32, b1: Complex64, b2: Complex64 },
    /// V₁(x) = Bx with trace B = −k²v₀ (the N = 1, N₀ = 0 case).
    Quadratic { b: SymMat2 },
}

impl GradLeading {
    pub fn order(&self) -> u32 {
        match self {
            GradLeading::Harmonic { n, .. } => *n,
            GradLeading::Quadratic { .. } => 1,
        }
    }

    /// V_N evaluated at a point.
    pub fn eval(&self, z: Complex64) -> [Complex64; 2] {
        match self {
            GradLeading::Harmonic { n, b1, b2 } => {
                let zn = z.powu(*n);
                let znc = zn.conj();
                [
                    b1 * zn + b2 * znc,
                    Complex64::new(0.0, 1.0) * (b1 * zn - b2 * znc),
                ]
            }
            GradLeading::Quadratic { b } => b.apply(z.re, z.im),
        }
    }
}

/// First nonzero Taylor data of an incident field at the corner: the
/// vanishing orders N₀ (of v) and N (of ∇v) with their leading terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorLeading {
    pub n0: u32,
    /// v_{N₀} = r^{N₀}(B₁ e^{iN₀θ} + B₂ e^{−iN₀θ}).
    pub v_n0: (Complex64, Complex64),
    /// v(0); zero unless n0 = 0.
    pub v0: Complex64,
    pub grad: GradLeading,
}

impl TaylorLeading {
    pub fn n(&self) -> u32 {
        self.grad.order()
    }

    pub fn value_nonzero(&self) -> bool {
        self.n0 == 0
    }

    pub fn gradient_nonzero(&self) -> bool {
        matches!(self.grad, GradLeading::Harmonic { n: 0, .. })
    }

    /// v_{N₀} evaluated at a point.
    pub fn v_leading(&self, z: Complex64) -> Complex64 {
        let zn = z.powu(self.n0);
        self.v_n0.0 * zn + self.v_n0.1 * zn.conj()
    }
}

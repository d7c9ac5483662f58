//! Sharp constants of the corner moments, their vanishing conditions,
//! and the non-scattering candidate construction.

use num_complex::Complex64;

use crate::analytic::{gamma_real, Branch};
use crate::error::{Error, Result};

use super::{IncidentFieldModel, IncidentTerm, SymMat2};

fn check_theta0(theta0: f64) -> Result<()> {
    if !(theta0 > 0.0 && theta0 < std::f64::consts::PI) {
        return Err(Error::Domain(format!(
            "theta0 must lie in (0, pi), got {theta0}"
        )));
    }
    if (theta0 - std::f64::consts::FRAC_PI_2).abs() < 1e-14 {
        return Err(Error::Domain("theta0 must differ from pi/2".into()));
    }
    Ok(())
}

/// Closed-form leading term of ∫ r^{N₀} e^{±iN₀θ} e^{−Φⱼ/h} dx over the
/// sector: α^{−1} Γ((N₀+2)/α) h^{(N₀+2)/α} times the angular integral
/// ∫_{−θ₀}^{θ₀} e^{iMθ} dθ with M = ±N₀ + (−1)^j (N₀+2). The resonant
/// denominator M = 0 is evaluated by its limit 2θ₀. The remainder beyond
/// this term is exponentially small in 1/h.
pub fn sector_moment(
    n0: u32,
    sign: i32,
    branch: Branch,
    alpha: f64,
    theta0: f64,
    h: f64,
) -> Complex64 {
    let kappa = (n0 as f64 + 2.0) / alpha;
    let lead = gamma_real(kappa) / alpha * h.powf(kappa);
    let m = sign as f64 * n0 as f64 + branch.sign_j() * (n0 as f64 + 2.0);
    let angular = if m.abs() < 1e-12 {
        2.0 * theta0
    } else {
        2.0 * (m * theta0).sin() / m
    };
    Complex64::new(lead * angular, 0.0)
}

/// The pair C_{0,N₀,j}, j = 1, 2: leading coefficients of
/// ∫ v_{N₀} e^{−Φⱼ/h} dx = C_{0,N₀,j} h^{(N₀+2)/α} for the harmonic
/// polynomial v_{N₀} = r^{N₀}(B₁ e^{iN₀θ} + B₂ e^{−iN₀θ}).
///
/// C_{0,N₀,j} = Γ((N₀+2)/α)/α · (B_j sin 2θ₀ + B_{j+1} sin(2(N₀+1)θ₀)/(N₀+1))
/// with B₃ := B₁. At least one of the pair is nonzero whenever
/// (B₁,B₂) is nontrivial and θ₀ ∈ (0,π)\{π/2}.
pub fn sharp_c0(
    n0: u32,
    b1: Complex64,
    b2: Complex64,
    alpha: f64,
    theta0: f64,
) -> Result<[Complex64; 2]> {
    check_theta0(theta0)?;
    if b1.norm() == 0.0 && b2.norm() == 0.0 {
        return Err(Error::Domain("leading polynomial is trivial".into()));
    }
    let gamma_factor = gamma_real((n0 as f64 + 2.0) / alpha) / alpha;
    let s_low = (2.0 * theta0).sin();
    let s_high = (2.0 * (n0 as f64 + 1.0) * theta0).sin() / (n0 as f64 + 1.0);
    let c_1 = gamma_factor * (b1 * s_low + b2 * s_high);
    let c_2 = gamma_factor * (b2 * s_low + b1 * s_high);
    Ok([c_1, c_2])
}

/// The pair C_{1,j} for the harmonic gradient term of order N,
/// V_N = b₁(1,i) r^N e^{iNθ} + b₂(1,−i) r^N e^{−iNθ}:
///
/// C_{1,j} = i(−1)^j (b_{j+1} α/(N+1)) (e^{(−1)^j i2(N+1)θ₀} − e^{−(−1)^j i2(N+1)θ₀})
///
/// with b₃ := b₁. The returned flag is the aperture condition for both
/// constants to vanish: 2θ₀ = lπ/(1+N) for some positive integer l.
pub fn sharp_c1(
    n: u32,
    b1: Complex64,
    b2: Complex64,
    alpha: f64,
    theta0: f64,
) -> ([Complex64; 2], bool) {
    let i = Complex64::new(0.0, 1.0);
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (slot, branch) in [Branch::Principal, Branch::Conjugate].iter().enumerate() {
        let sj = branch.sign_j();
        let b_next = if *branch == Branch::Principal { b2 } else { b1 };
        let arg = sj * 2.0 * (n as f64 + 1.0) * theta0;
        let osc = Complex64::from_polar(1.0, arg) - Complex64::from_polar(1.0, -arg);
        out[slot] = i * sj * (b_next * alpha / (n as f64 + 1.0)) * osc;
    }
    let vanishing = angle_vanishing(theta0, n).is_some();
    (out, vanishing)
}

/// Degeneracy classification of the quadratic sharp constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum C2Degeneracy {
    /// Generic data: at least one constant is nonzero.
    None,
    /// Aperture π/2 or 3π/2 with equal jumps c₁ = c₂.
    EqualJumpsRightAngle,
    /// Aperture away from right angles with the specific matrix
    /// B = −(k²v₀/2) diag(1−c₀, 1+c₀), c₀ = (1−c₂/c₁)/cos 2θ₀.
    DegenerateMatrix,
}

impl C2Degeneracy {
    pub fn both_zero(&self) -> bool {
        !matches!(self, C2Degeneracy::None)
    }
}

/// The pair C_{2,j} combining the quadratic gradient term V(x) = Bx
/// (trace B = −k²v₀ ≠ 0) with the constant term of v:
///
/// C_{2,j} = −c₁ Γ(2/α) sin(2θ₀)/α · (b_j cos 2θ₀ − k²v₀ (1 − c₂/c₁)),
/// b_j = b₁₁ − b₂₂ − (−1)^j 2i b₁₂.
pub fn sharp_c2(
    b: &SymMat2,
    v0: Complex64,
    c1: f64,
    c2: f64,
    alpha: f64,
    theta0: f64,
    k: f64,
) -> Result<([Complex64; 2], C2Degeneracy)> {
    check_theta0(theta0)?;
    if c1 == 0.0 {
        return Err(Error::Domain("c1 must be nonzero for the quadratic constants".into()));
    }
    let k2v0 = k * k * v0;
    if k2v0.norm() == 0.0 {
        return Err(Error::Domain("k^2 v0 must be nonzero".into()));
    }
    let trace_defect = (b.trace() + k2v0).norm();
    if trace_defect > 1e-10 * k2v0.norm() {
        return Err(Error::Domain(format!(
            "trace(B) must equal -k^2 v0 (defect {trace_defect:.3e})"
        )));
    }

    let cos2 = (2.0 * theta0).cos();
    let sin2 = (2.0 * theta0).sin();
    let scale = -c1 * gamma_real(2.0 / alpha) * sin2 / alpha;
    let jump_term = k2v0 * (1.0 - c2 / c1);
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (slot, branch) in [Branch::Principal, Branch::Conjugate].iter().enumerate() {
        out[slot] = scale * (b.b_j(*branch) * cos2 - jump_term);
    }

    let aperture = 2.0 * theta0;
    let right_angle = (aperture - std::f64::consts::FRAC_PI_2).abs() < 1e-12
        || (aperture - 1.5 * std::f64::consts::PI).abs() < 1e-12;
    let degeneracy = if right_angle {
        let scale_c = c1.abs().max(c2.abs()).max(1.0);
        if (c1 - c2).abs() <= 1e-10 * scale_c {
            C2Degeneracy::EqualJumpsRightAngle
        } else {
            C2Degeneracy::None
        }
    } else {
        let c0 = (1.0 - c2 / c1) / cos2;
        let target = SymMat2 {
            m11: -0.5 * k2v0 * (1.0 - c0),
            m12: Complex64::new(0.0, 0.0),
            m22: -0.5 * k2v0 * (1.0 + c0),
        };
        let defect = ((b.m11 - target.m11).norm_sqr()
            + 2.0 * (b.m12 - target.m12).norm_sqr()
            + (b.m22 - target.m22).norm_sqr())
        .sqrt();
        if defect <= 1e-10 * b.norm().max(target.norm()) {
            C2Degeneracy::DegenerateMatrix
        } else {
            C2Degeneracy::None
        }
    };

    Ok((out, degeneracy))
}

/// Detects the resonant apertures 2θ₀ = lπ/(1+N), l ∈ ℕ₊ (within 1e−12),
/// under which both C_{1,j} vanish. Always none for N = 0 since the
/// aperture π is excluded.
pub fn angle_vanishing(theta0: f64, n: u32) -> Option<u32> {
    let aperture = 2.0 * theta0;
    let step = std::f64::consts::PI / (1.0 + n as f64);
    let l = (aperture / step).round();
    if l >= 1.0 && (aperture - l * step).abs() <= 1e-12 {
        Some(l as u32)
    } else {
        None
    }
}

/// c₀ = (1 − c₂/c₁)/cos 2θ₀.
pub fn c0_coeff(c1: f64, c2: f64, theta0: f64) -> Result<f64> {
    if c1 == 0.0 {
        return Err(Error::Domain("c1 must be nonzero".into()));
    }
    let cos2 = (2.0 * theta0).cos();
    if cos2.abs() < 1e-14 {
        return Err(Error::Domain(
            "cos 2theta0 vanishes (aperture pi/2 or 3pi/2)".into(),
        ));
    }
    Ok((1.0 - c2 / c1) / cos2)
}

/// Builds the even-order expansion
/// v = v₀J₀(kr) + c₀v₀J₂(kr)(e^{i2θ}+e^{−i2θ}) + Σ_{m≥2} J_{2m}(kr)(b_{m,1}e^{i2mθ} + b_{m,2}e^{−i2mθ}).
pub fn nonscattering_candidate(
    v0: Complex64,
    c0: f64,
    tail: &[(u32, Complex64, Complex64)],
    k: f64,
) -> Result<IncidentFieldModel> {
    if v0.norm() == 0.0 {
        return Err(Error::Domain("v0 must be nonzero".into()));
    }
    let mut terms = vec![IncidentTerm {
        m: 0,
        a: v0,
        b: Complex64::new(0.0, 0.0),
    }];
    if c0 != 0.0 {
        terms.push(IncidentTerm {
            m: 2,
            a: c0 * v0,
            b: c0 * v0,
        });
    }
    for &(m, b1, b2) in tail {
        if m < 2 {
            return Err(Error::Domain(
                "tail terms start at angular order 4 (m >= 2)".into(),
            ));
        }
        terms.push(IncidentTerm { m: 2 * m, a: b1, b: b2 });
    }
    IncidentFieldModel::new(k, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corner::taylor_leading;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn c0_constant_term_matches_closed_form() {
        // v ≡ 1 (B₁ = B₂ = 1/2), α = 0.5, θ₀ = π/3:
        // C_{0,0,1} = Γ(2/α) sin(2θ₀)/α = Γ(4)·sin(2π/3)·2 = 6√3
        let [c1v, c2v] = sharp_c0(0, c(0.5, 0.0), c(0.5, 0.0), 0.5, FRAC_PI_3).unwrap();
        let expect = 6.0 * 3.0f64.sqrt();
        assert!((c1v.re - expect).abs() / expect < 1e-12, "{c1v}");
        assert!(c1v.im.abs() < 1e-12);
        // the N₀ = 0 constants agree for both branches
        assert!((c1v - c2v).norm() < 1e-12);
    }

    #[test]
    fn c0_never_both_zero_off_right_angle() {
        // θ₀ grid of 10³ points excluding π/2, N₀ ≤ 6, unit-circle (B₁,B₂)
        for i in 0..1000 {
            let theta0 = PI * (i as f64 + 0.5) / 1000.0;
            if (theta0 - FRAC_PI_2).abs() < 2e-3 {
                continue;
            }
            for n0 in 0..=6u32 {
                for angle_idx in 0..4 {
                    let phi = angle_idx as f64 * 0.7;
                    let (b1, b2) = if n0 == 0 {
                        (c(0.5 * phi.cos() + 0.5, 0.0), c(0.5 * phi.cos() + 0.5, 0.0))
                    } else {
                        (c(phi.cos(), 0.0), c(phi.sin(), 0.0))
                    };
                    if b1.norm() == 0.0 && b2.norm() == 0.0 {
                        continue;
                    }
                    let [v1, v2] = sharp_c0(n0, b1, b2, 0.5, theta0).unwrap();
                    assert!(
                        v1.norm().max(v2.norm()) > 1e-12,
                        "degenerate pair at theta0={theta0}, n0={n0}"
                    );
                }
            }
        }
    }

    #[test]
    fn c0_determinant_strictness() {
        // |sin θ₀| > |sin((N₀+1)θ₀)|/(N₀+1) on the θ₀ grid, N₀ ∈ {1..6}
        for i in 0..1000 {
            let theta0 = PI * (i as f64 + 0.5) / 1000.0;
            if (theta0 - FRAC_PI_2).abs() < 1e-9 {
                continue;
            }
            for n0 in 1..=6u32 {
                let lhs = theta0.sin().abs();
                let rhs = ((n0 as f64 + 1.0) * theta0).sin().abs() / (n0 as f64 + 1.0);
                assert!(lhs > rhs, "theta0={theta0}, n0={n0}");
            }
        }
    }

    #[test]
    fn c0_linearity() {
        let lam = c(2.5, -1.0);
        let [a1, a2] = sharp_c0(3, c(0.3, 0.1), c(-0.2, 0.7), 0.5, 1.1).unwrap();
        let [b1, b2] = sharp_c0(3, lam * c(0.3, 0.1), lam * c(-0.2, 0.7), 0.5, 1.1).unwrap();
        assert!((b1 - lam * a1).norm() < 1e-12 * b1.norm().max(1.0));
        assert!((b2 - lam * a2).norm() < 1e-12 * b2.norm().max(1.0));
    }

    #[test]
    fn c1_right_angle_aperture_vanishes() {
        // aperture 2θ₀ = π/2 with N = 1 → l = 1 resonance, both zero
        let theta0 = FRAC_PI_2 / 2.0;
        let ([v1, v2], flag) = sharp_c1(1, c(0.8, 0.1), c(-0.3, 0.4), 0.5, theta0);
        assert!(flag);
        assert!(v1.norm() < 1e-14 && v2.norm() < 1e-14);
        // N = 0 can never vanish by aperture
        let (_, flag0) = sharp_c1(0, c(1.0, 0.0), c(1.0, 0.0), 0.5, theta0);
        assert!(!flag0);
    }

    #[test]
    fn c1_generic_aperture_nonzero() {
        // θ₀ = π/3, N = 1: C₁,j ∝ sin(4θ₀) = −√3/2 ≠ 0
        let ([v1, v2], flag) = sharp_c1(1, c(1.0, 0.0), c(1.0, 0.0), 0.5, FRAC_PI_3);
        assert!(!flag);
        // closed reduction: C₁,j = −2α b_{j+1} sin(2(N+1)θ₀)/(N+1)
        let expect = -2.0 * 0.5 * (4.0 * FRAC_PI_3).sin() / 2.0;
        assert!((v1.re - expect).abs() < 1e-14 && v1.im.abs() < 1e-14);
        assert!((v2.re - expect).abs() < 1e-14);
    }

    #[test]
    fn angle_vanishing_catalogue() {
        // 2θ₀ = π/2, N = 1 → l = 1
        assert_eq!(angle_vanishing(FRAC_PI_2 / 2.0, 1), Some(1));
        // 2θ₀ = 3π/2, N = 1 → l = 3
        assert_eq!(angle_vanishing(0.75 * PI, 1), Some(3));
        // irrational aperture: none for any N ≤ 100
        let theta0 = 2.0f64.sqrt() / 2.0;
        for n in 0..=100 {
            assert_eq!(angle_vanishing(theta0, n), None);
        }
        // N = 0 is never resonant
        for i in 1..40 {
            let theta0 = PI * i as f64 / 41.0;
            if (theta0 - FRAC_PI_2).abs() < 1e-12 {
                continue;
            }
            assert_eq!(angle_vanishing(theta0, 0), None);
        }
    }

    #[test]
    fn angle_flag_equivalence_with_c1() {
        // vanishing flag ⇔ resonant aperture, over resonant and random angles
        for n in 0..=5u32 {
            for l in 1..=(2 * (n + 1)) {
                let theta0 = l as f64 * PI / (2.0 * (n as f64 + 1.0));
                if theta0 >= PI || (theta0 - FRAC_PI_2).abs() < 1e-12 {
                    continue;
                }
                let ([v1, v2], flag) = sharp_c1(n, c(0.9, 0.2), c(0.4, -0.6), 0.5, theta0);
                assert!(flag, "expected resonance at l={l}, n={n}");
                assert!(v1.norm() < 1e-12 && v2.norm() < 1e-12);
            }
            for j in 0..25 {
                let theta0 = 0.1 + 0.11 * j as f64 % (PI - 0.2);
                let flag = angle_vanishing(theta0, n).is_some();
                let ([v1, v2], flag2) = sharp_c1(n, c(0.9, 0.2), c(0.4, -0.6), 0.5, theta0);
                assert_eq!(flag, flag2);
                if !flag {
                    assert!(v1.norm().max(v2.norm()) > 1e-12);
                }
            }
        }
    }

    #[test]
    fn c2_equal_jumps_right_angle() {
        // c₁ = c₂, aperture π/2: both zero for any admissible B
        let k = 1.0;
        let v0 = c(1.0, 0.0);
        let b = SymMat2 {
            m11: c(-0.1, 0.0),
            m12: c(0.3, 0.2),
            m22: c(-0.9, 0.0), // trace −1 = −k²v₀
        };
        let ([v1, v2], deg) = sharp_c2(&b, v0, 1.0, 1.0, 0.5, FRAC_PI_2 / 2.0, k).unwrap();
        assert_eq!(deg, C2Degeneracy::EqualJumpsRightAngle);
        assert!(v1.norm() < 1e-12 && v2.norm() < 1e-12);
    }

    #[test]
    fn c2_degenerate_matrix_family() {
        // aperture 2π/3, c₁ = 1, c₂ = 0: c₀ = 1/cos(2π/3) = −2 and the
        // degenerate matrix is −(k²v₀/2)diag(3, −1)
        let theta0 = PI / 3.0;
        let k = 1.0;
        let v0 = c(1.0, 0.0);
        let c0 = c0_coeff(1.0, 0.0, theta0).unwrap();
        assert!((c0 + 2.0).abs() < 1e-14);
        let b = SymMat2 {
            m11: -0.5 * k * k * v0 * (1.0 - c0),
            m12: c(0.0, 0.0),
            m22: -0.5 * k * k * v0 * (1.0 + c0),
        };
        let ([v1, v2], deg) = sharp_c2(&b, v0, 1.0, 0.0, 0.5, theta0, k).unwrap();
        assert_eq!(deg, C2Degeneracy::DegenerateMatrix);
        assert!(v1.norm() < 1e-12 && v2.norm() < 1e-12);

        // a generic off-diagonal entry breaks the degeneracy
        let b = SymMat2 {
            m12: c(0.05, 0.0),
            ..b
        };
        let ([w1, w2], deg) = sharp_c2(&b, v0, 1.0, 0.0, 0.5, theta0, k).unwrap();
        assert_eq!(deg, C2Degeneracy::None);
        assert!(w1.norm().max(w2.norm()) > 1e-6);
    }

    #[test]
    fn c2_rejects_bad_preconditions() {
        let b = SymMat2 {
            m11: c(-0.5, 0.0),
            m12: c(0.0, 0.0),
            m22: c(-0.5, 0.0),
        };
        assert!(sharp_c2(&b, c(1.0, 0.0), 0.0, 1.0, 0.5, FRAC_PI_3, 1.0).is_err());
        // trace mismatch
        assert!(sharp_c2(&b, c(2.0, 0.0), 1.0, 0.0, 0.5, FRAC_PI_3, 1.0).is_err());
    }

    #[test]
    fn c0_coeff_examples() {
        assert_eq!(c0_coeff(1.0, 1.0, 0.4).unwrap(), 0.0);
        let v = c0_coeff(1.0, 0.0, PI / 3.0).unwrap();
        assert!((v + 2.0).abs() < 1e-14);
        let v = c0_coeff(2.0, 1.0, PI / 6.0).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        assert!(c0_coeff(0.0, 1.0, 0.4).is_err());
        assert!(c0_coeff(1.0, 0.0, FRAC_PI_2 / 2.0).is_err());
    }

    #[test]
    fn candidate_reproduces_degenerate_matrix() {
        // taylor data of the candidate hits exactly the degenerate family
        let theta0 = PI / 3.0;
        let k = 1.3;
        let v0 = c(2.0, 0.5);
        let c0 = c0_coeff(1.0, 0.25, theta0).unwrap();
        let cand = nonscattering_candidate(
            v0,
            c0,
            &[(2, c(0.1, 0.0), c(0.0, -0.2)), (3, c(0.4, 0.0), c(0.0, 0.0))],
            k,
        )
        .unwrap();
        let t = taylor_leading(&cand).unwrap();
        assert_eq!(t.n0, 0);
        assert_eq!(t.n(), 1);
        let ([v1, v2], deg) = match t.grad {
            crate::corner::GradLeading::Quadratic { b } => {
                sharp_c2(&b, t.v0, 1.0, 0.25, 0.5, theta0, k).unwrap()
            }
            _ => panic!("candidate must land in the quadratic branch"),
        };
        assert_eq!(deg, C2Degeneracy::DegenerateMatrix);
        assert!(v1.norm() < 1e-10 && v2.norm() < 1e-10);

        // empty tail with c₀ = 0 degenerates to v₀J₀
        let plain = nonscattering_candidate(v0, 0.0, &[], k).unwrap();
        assert_eq!(plain.terms().len(), 1);
    }

    #[test]
    fn candidate_perturbation_leaves_family() {
        let theta0 = PI / 3.0;
        let k = 1.0;
        let v0 = c(1.0, 0.0);
        let c0 = c0_coeff(1.0, 0.0, theta0).unwrap();
        let cand = nonscattering_candidate(v0, c0, &[], k).unwrap();
        let t = taylor_leading(&cand).unwrap();
        let b = match t.grad {
            crate::corner::GradLeading::Quadratic { b } => b,
            _ => unreachable!(),
        };
        for scale in [1e-6, 1e-3] {
            let perturbed = SymMat2 {
                m11: b.m11 + scale * b.norm(),
                m12: b.m12,
                m22: b.m22 - scale * b.norm(), // keep the trace
            };
            let (_, deg) = sharp_c2(&perturbed, t.v0, 1.0, 0.0, 0.5, theta0, k).unwrap();
            assert_eq!(deg, C2Degeneracy::None, "perturbation {scale} not detected");
        }
    }

    #[test]
    fn sector_moment_resonant_limit_is_finite() {
        let v = sector_moment(0, 1, Branch::Principal, 0.5, FRAC_PI_3, 0.05);
        assert!(v.norm() > 0.0 && v.re.is_finite());
    }
}

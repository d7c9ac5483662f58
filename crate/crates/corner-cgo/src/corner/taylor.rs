//! Extraction of the leading Taylor terms of a Bessel–Fourier incident
//! field at the corner.
//!
//! J_m(kr) ~ (kr/2)^m/m!, so the first nonzero term of v is carried by
//! the lowest active angular order, and the gradient data follows the
//! trichotomy: N = N₀−1 when N₀ ≥ 1; for N₀ = 0 either N = 0 with
//! V₀ = ∇v₁, or v₁ ≡ 0 and N = 1 with V₁ = ∇v₂ and ∇·V₁ = −k²v₀.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::{GradLeading, IncidentFieldModel, SymMat2, TaylorLeading};

/// Leading coefficient scale of J_m: (k/2)^m / m!.
fn bessel_lead(k: f64, m: u32) -> f64 {
    let mut s = 1.0;
    for j in 1..=m as u64 {
        s *= 0.5 * k / j as f64;
    }
    s
}

pub fn taylor_leading(v: &IncidentFieldModel) -> Result<TaylorLeading> {
    let k = v.k();
    let max_m = v
        .max_order()
        .ok_or_else(|| Error::Domain("incident field is trivial".into()))?;

    let mut n0 = None;
    for m in 0..=max_m {
        let (a, b) = v.effective(m);
        if a.norm() > 0.0 || b.norm() > 0.0 {
            n0 = Some(m);
            break;
        }
    }
    let n0 = n0.ok_or_else(|| Error::Domain("incident field is trivial".into()))?;

    let (a, b) = v.effective(n0);
    let sigma = bessel_lead(k, n0);
    let (big_b1, big_b2) = if n0 == 0 {
        // v(0) = a₀ + b₀ is carried in `a`; split symmetrically
        (0.5 * sigma * a, 0.5 * sigma * a)
    } else {
        (sigma * a, sigma * b)
    };
    let v0 = if n0 == 0 { a } else { Complex64::new(0.0, 0.0) };

    let grad = if n0 >= 1 {
        // V_{N₀−1} = ∇v_{N₀} = N₀ (B₁ (1,i) z^{N₀−1} + B₂ (1,−i) z̄^{N₀−1})
        GradLeading::Harmonic {
            n: n0 - 1,
            b1: n0 as f64 * big_b1,
            b2: n0 as f64 * big_b2,
        }
    } else {
        let (a1, b1) = v.effective(1);
        let s1 = bessel_lead(k, 1); // k/2
        if a1.norm() > 0.0 || b1.norm() > 0.0 {
            GradLeading::Harmonic {
                n: 0,
                b1: s1 * a1,
                b2: s1 * b1,
            }
        } else {
            // v₁ ≡ 0: V₁ = ∇v₂ where v₂ collects the harmonic part from the
            // m = 2 mode and the trace part −(k²v₀/4) r² from J₀'s series
            let (a2, b2) = v.effective(2);
            let s2 = bessel_lead(k, 2); // k²/8
            let h1 = s2 * a2;
            let h2 = s2 * b2;
            let trace_part = 0.25 * k * k * v0; // coefficient of −r²
            let m11 = 2.0 * (h1 + h2) - 2.0 * trace_part;
            let m22 = -2.0 * (h1 + h2) - 2.0 * trace_part;
            let m12 = Complex64::new(0.0, 2.0) * (h1 - h2);
            GradLeading::Quadratic {
                b: SymMat2 { m11, m12, m22 },
            }
        }
    };

    Ok(TaylorLeading {
        n0,
        v_n0: (big_b1, big_b2),
        v0,
        grad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corner::IncidentTerm;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn model(k: f64, terms: Vec<(u32, Complex64, Complex64)>) -> IncidentFieldModel {
        IncidentFieldModel::new(
            k,
            terms
                .into_iter()
                .map(|(m, a, b)| IncidentTerm { m, a, b })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn pure_j0_gives_quadratic_gradient() {
        // v = J₀(kr): N₀ = 0, v₁ = 0, N = 1, B = −(k²v₀/2)·I
        let k = 1.3;
        let v0 = c(2.0, 0.0);
        let v = model(k, vec![(0, v0, c(0.0, 0.0))]);
        let t = taylor_leading(&v).unwrap();
        assert_eq!(t.n0, 0);
        assert_eq!(t.v0, v0);
        assert_eq!(t.n(), 1);
        match t.grad {
            GradLeading::Quadratic { b } => {
                let expect = -0.5 * k * k * v0;
                assert!((b.m11 - expect).norm() < 1e-14);
                assert!((b.m22 - expect).norm() < 1e-14);
                assert!(b.m12.norm() < 1e-14);
                // trace identity ∇·V₁ = −k²v₀
                assert!((b.trace() + k * k * v0).norm() < 1e-14);
            }
            _ => panic!("expected quadratic gradient data"),
        }
    }

    #[test]
    fn first_order_mode_drops_gradient_order() {
        // v = J₁(kr)(e^{iθ}+e^{−iθ}): N₀ = 1, N = 0
        let v = model(2.0, vec![(1, c(1.0, 0.0), c(1.0, 0.0))]);
        let t = taylor_leading(&v).unwrap();
        assert_eq!(t.n0, 1);
        assert_eq!(t.n(), 0);
        assert!(t.v0.norm() == 0.0);
        assert!(!t.value_nonzero());
        assert!(t.gradient_nonzero());
    }

    #[test]
    fn mixed_j0_j1_keeps_gradient_order_zero() {
        // v = J₀ + c·J₁(kr)e^{iθ}: N₀ = 0, N = 0, V₀ = ∇v₁ ≠ 0
        let k = 1.0;
        let v = model(
            k,
            vec![(0, c(1.0, 0.0), c(0.0, 0.0)), (1, c(0.7, 0.0), c(0.0, 0.0))],
        );
        let t = taylor_leading(&v).unwrap();
        assert_eq!(t.n0, 0);
        assert_eq!(t.n(), 0);
        assert!(t.value_nonzero() && t.gradient_nonzero());
        match t.grad {
            GradLeading::Harmonic { n: 0, b1, b2 } => {
                assert!((b1 - c(0.35, 0.0)).norm() < 1e-15); // (k/2)·0.7
                assert!(b2.norm() < 1e-15);
            }
            _ => panic!("expected harmonic order-0 gradient data"),
        }
    }

    #[test]
    fn leading_term_matches_field_asymptotics() {
        // v(z) ≈ v_{N₀}(z) as z → 0 for a pure m = 2 mode
        let k = 1.7;
        let v = model(k, vec![(2, c(0.4, 0.2), c(-0.1, 0.9))]);
        let t = taylor_leading(&v).unwrap();
        assert_eq!(t.n0, 2);
        let z = Complex64::from_polar(1e-4, 0.7);
        let lead = t.v_leading(z);
        let full = v.eval(z);
        assert!((lead - full).norm() / full.norm() < 1e-7);
    }

    #[test]
    fn gradient_leading_matches_field_gradient() {
        let k = 1.7;
        let v = model(k, vec![(0, c(1.0, 0.0), c(0.5, 0.0))]);
        let t = taylor_leading(&v).unwrap();
        // quadratic branch: ∇v(z) ≈ Bz near 0
        let z = Complex64::from_polar(2e-4, -0.4);
        let lead = t.grad.eval(z);
        let full = v.gradient(z);
        for i in 0..2 {
            assert!(
                (lead[i] - full[i]).norm() <= 1e-7 * full[i].norm().max(1e-12),
                "component {i}: {:?} vs {:?}",
                lead[i],
                full[i]
            );
        }
    }

    #[test]
    fn cancelling_m0_coefficients_are_trivial() {
        // a₀ + b₀ = 0 makes the J₀ term vanish identically
        let r = IncidentFieldModel::new(
            1.0,
            vec![IncidentTerm {
                m: 0,
                a: c(1.0, 0.0),
                b: c(-1.0, 0.0),
            }],
        );
        assert!(r.is_err());
    }
}

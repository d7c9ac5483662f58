//! Finite-difference derivative operators on the polar grid: Wirtinger
//! derivatives ∂̄ and ∂, the Cartesian gradient, and the Laplacian, all
//! through the polar chain rule. Radial stencils are 3-point quadratic
//! fits on the non-uniform graded nodes; angular stencils use the uniform
//! spacing. One-sided stencils are used at boundary layers.

use num_complex::Complex64;

use crate::grid::ComplexFieldSample;

/// First and second derivative of the quadratic through
/// (x0,f0), (x1,f1), (x2,f2), evaluated at x.
#[inline]
fn quad_derivs(
    x: f64,
    x0: f64,
    x1: f64,
    x2: f64,
    f0: Complex64,
    f1: Complex64,
    f2: Complex64,
) -> (Complex64, Complex64) {
    let d01 = (f1 - f0) / (x1 - x0);
    let d12 = (f2 - f1) / (x2 - x1);
    let d012 = (d12 - d01) / (x2 - x0);
    let first = d01 + d012 * (2.0 * x - x0 - x1);
    (first, 2.0 * d012)
}

/// Derivatives along one grid line of abscissae `xs`, values fetched via
/// `get`; writes (f', f'') through `put`.
fn line_derivs<G, P>(xs: &[f64], get: G, mut put: P)
where
    G: Fn(usize) -> Complex64,
    P: FnMut(usize, Complex64, Complex64),
{
    let n = xs.len();
    debug_assert!(n >= 3);
    for i in 0..n {
        let (i0, i1, i2) = if i == 0 {
            (0, 1, 2)
        } else if i == n - 1 {
            (n - 3, n - 2, n - 1)
        } else {
            (i - 1, i, i + 1)
        };
        let (d1, d2) = quad_derivs(xs[i], xs[i0], xs[i1], xs[i2], get(i0), get(i1), get(i2));
        put(i, d1, d2);
    }
}

/// Polar first and second partials (f_r, f_rr, f_θ, f_θθ) of a sample.
fn polar_derivs(f: &ComplexFieldSample) -> [Vec<Complex64>; 4] {
    let grid = f.grid();
    let nr = grid.nr();
    let nt = grid.ntheta();
    let n = grid.len();
    let mut fr = vec![Complex64::new(0.0, 0.0); n];
    let mut frr = vec![Complex64::new(0.0, 0.0); n];
    let mut ft = vec![Complex64::new(0.0, 0.0); n];
    let mut ftt = vec![Complex64::new(0.0, 0.0); n];

    let rs = grid.rs();
    for it in 0..nt {
        line_derivs(
            rs,
            |ir| f.values[grid.idx(ir, it)],
            |ir, d1, d2| {
                fr[grid.idx(ir, it)] = d1;
                frr[grid.idx(ir, it)] = d2;
            },
        );
    }
    let thetas = grid.thetas();
    for ir in 0..nr {
        line_derivs(
            thetas,
            |it| f.values[grid.idx(ir, it)],
            |it, d1, d2| {
                ft[grid.idx(ir, it)] = d1;
                ftt[grid.idx(ir, it)] = d2;
            },
        );
    }
    [fr, frr, ft, ftt]
}

/// Discrete ∂̄ = ½(∂₁ + i∂₂) = (e^{iθ}/2)(∂_r + (i/r)∂_θ).
pub fn fd_dbar(f: &ComplexFieldSample) -> ComplexFieldSample {
    let grid = f.grid().clone();
    let [fr, _, ft, _] = polar_derivs(f);
    let values = (0..grid.len())
        .map(|i| {
            let r = grid.r_of(i);
            let th = grid.theta_of(i);
            0.5 * Complex64::from_polar(1.0, th) * (fr[i] + Complex64::new(0.0, 1.0) * ft[i] / r)
        })
        .collect();
    ComplexFieldSample::from_values(&grid, values).expect("same grid")
}

/// Discrete ∂ = ½(∂₁ − i∂₂) = (e^{−iθ}/2)(∂_r − (i/r)∂_θ).
pub fn fd_partial(f: &ComplexFieldSample) -> ComplexFieldSample {
    let grid = f.grid().clone();
    let [fr, _, ft, _] = polar_derivs(f);
    let values = (0..grid.len())
        .map(|i| {
            let r = grid.r_of(i);
            let th = grid.theta_of(i);
            0.5 * Complex64::from_polar(1.0, -th) * (fr[i] - Complex64::new(0.0, 1.0) * ft[i] / r)
        })
        .collect();
    ComplexFieldSample::from_values(&grid, values).expect("same grid")
}

/// Cartesian gradient (∂₁f, ∂₂f) by the polar chain rule.
pub fn fd_gradient(f: &ComplexFieldSample) -> [ComplexFieldSample; 2] {
    let grid = f.grid().clone();
    let [fr, _, ft, _] = polar_derivs(f);
    let mut gx = Vec::with_capacity(grid.len());
    let mut gy = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let r = grid.r_of(i);
        let th = grid.theta_of(i);
        let (s, c) = th.sin_cos();
        gx.push(c * fr[i] - s / r * ft[i]);
        gy.push(s * fr[i] + c / r * ft[i]);
    }
    [
        ComplexFieldSample::from_values(&grid, gx).expect("same grid"),
        ComplexFieldSample::from_values(&grid, gy).expect("same grid"),
    ]
}

/// Discrete Laplacian f_rr + f_r/r + f_θθ/r².
pub fn fd_laplacian(f: &ComplexFieldSample) -> ComplexFieldSample {
    let grid = f.grid().clone();
    let [fr, frr, _, ftt] = polar_derivs(f);
    let values = (0..grid.len())
        .map(|i| {
            let r = grid.r_of(i);
            frr[i] + fr[i] / r + ftt[i] / (r * r)
        })
        .collect();
    ComplexFieldSample::from_values(&grid, values).expect("same grid")
}

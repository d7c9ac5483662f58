//! Discrete Cauchy transforms: the right inverse of ∂̄ and, in the
//! conjugate variant, of ∂.
//!
//! 𝒯f(z) = (1/π) Σⱼ wⱼ f(ζⱼ)/(z−ζⱼ), with the singular cell replaced by
//! the exact transform of an equal-area disk centered at the cell
//! centroid c: (1/π)∫_{|ζ−c|<ρ} dA/(z−ζ) equals conj(z−c) inside the disk
//! and ρ²/(z−c) outside. Direct O(N²) summation, parallel over target
//! nodes; each target's source loop runs serially in index order, so the
//! result is bit-identical for any thread count.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::grid::ComplexFieldSample;

/// Applies 𝒯 (or 𝒯̄ when `conjugate` is set, with kernel 1/(z̄−ζ))
/// to a sample, evaluating at every grid node.
pub fn cauchy_apply(f: &ComplexFieldSample, conjugate: bool) -> Result<ComplexFieldSample> {
    let grid = f.grid().clone();
    let n = grid.len();
    let nodes = grid.nodes();
    let weights = grid.weights();
    let values = &f.values;
    let inv_pi = std::f64::consts::FRAC_1_PI;

    let out: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let target = if conjugate {
                nodes[i].conj()
            } else {
                nodes[i]
            };
            // the kernel singularity sits in the cell whose node equals
            // `target`; for 𝒯̄ that is the mirror cell
            let j_sing = if conjugate {
                grid.mirror_index(i)
            } else {
                i
            };
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j == j_sing {
                    continue;
                }
                acc += weights[j] * values[j] / (target - nodes[j]);
            }
            let c = grid.centroid(j_sing);
            let rho_sq = weights[j_sing] * inv_pi;
            let d = target - c;
            let disk = if d.norm_sqr() <= rho_sq {
                d.conj()
            } else {
                rho_sq / d
            };
            acc * inv_pi + values[j_sing] * disk
        })
        .collect();

    ComplexFieldSample::from_values(&grid, out)
}

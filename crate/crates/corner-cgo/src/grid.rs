//! Polar quadrature grids on sector domains and complex-valued samples
//! living on them.
//!
//! The radial coordinate is graded through t = r^α: panels are uniform in
//! t with 4-point Gauss–Legendre nodes per panel, so the e^{−ReΦ/h}
//! boundary layer of width h^{1/α} in r (width h in t) is resolved
//! without per-h remeshing. The angular direction is a uniform midpoint
//! rule, built exactly symmetric about θ = 0.

use std::sync::Arc;

use num_complex::Complex64;

use crate::analytic::{PhaseParams, SectorDomain};
use crate::error::{Error, Result};

// 4-point Gauss-Legendre rule on [-1, 1], ascending.
const GL4_X: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_26,
    0.339_981_043_584_856_26,
    0.861_136_311_594_052_6,
];
const GL4_W: [f64; 4] = [
    0.347_854_845_137_453_85,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_85,
];
// Cumulative weight fractions splitting a panel into one cell per node.
const GL4_EDGES: [f64; 5] = [
    0.0,
    0.173_927_422_568_726_92,
    0.5,
    0.826_072_577_431_273,
    1.0,
];

/// Tensor quadrature grid on a sector, graded radially by t = r^α.
#[derive(Debug)]
pub struct PolarGrid {
    sector: SectorDomain,
    alpha: f64,
    nr: usize,
    ntheta: usize,
    rs: Vec<f64>,
    thetas: Vec<f64>,
    /// Radial weights including the area jacobian: ∫ f r dr ≈ Σ wr_i f(r_i).
    wr: Vec<f64>,
    dtheta: f64,
    nodes: Vec<Complex64>,
    weights: Vec<f64>,
    /// Radial cell bounds per radial index (in r).
    r_cells: Vec<(f64, f64)>,
    /// Area centroid of each node's cell.
    centroids: Vec<Complex64>,
}

/// Builds the graded tensor grid. `nr` is rounded up to a multiple of 4
/// (one Gauss panel holds 4 radial nodes); both counts must be at least 8.
pub fn build_sector_grid(
    sector: &SectorDomain,
    nr: usize,
    ntheta: usize,
    params: &PhaseParams,
) -> Result<Arc<PolarGrid>> {
    if nr < 8 || ntheta < 8 {
        return Err(Error::Config(format!(
            "grid counts must be at least 8, got nr = {nr}, ntheta = {ntheta}"
        )));
    }
    let alpha = params.alpha;
    let panels = nr.div_ceil(4);
    let nr = panels * 4;
    let a = sector.radius();
    let t_max = a.powf(alpha);
    let dt = t_max / panels as f64;
    let inv_alpha = 1.0 / alpha;

    let mut rs = Vec::with_capacity(nr);
    let mut wr = Vec::with_capacity(nr);
    let mut r_cells = Vec::with_capacity(nr);
    for p in 0..panels {
        let t_lo = dt * p as f64;
        for g in 0..4 {
            let t = t_lo + 0.5 * (GL4_X[g] + 1.0) * dt;
            let r = t.powf(inv_alpha);
            // ∫ f(r) r dr = (1/α) ∫ f(t^{1/α}) t^{2/α−1} dt
            let w = GL4_W[g] * 0.5 * dt * inv_alpha * t.powf(2.0 * inv_alpha - 1.0);
            rs.push(r);
            wr.push(w);
            let e_lo = t_lo + GL4_EDGES[g] * dt;
            let e_hi = t_lo + GL4_EDGES[g + 1] * dt;
            r_cells.push((e_lo.powf(inv_alpha), e_hi.powf(inv_alpha)));
        }
    }
    // The t-substitution jacobian is polynomial only for special α; a
    // single scale factor pins the discrete radial measure to a²/2 exactly.
    let sum: f64 = wr.iter().sum();
    let scale = (0.5 * a * a) / sum;
    for w in &mut wr {
        *w *= scale;
    }

    let theta0 = sector.theta0();
    let dtheta = 2.0 * theta0 / ntheta as f64;
    let mut thetas = vec![0.0f64; ntheta];
    for j in 0..ntheta / 2 {
        let th = -theta0 + (j as f64 + 0.5) * dtheta;
        thetas[j] = th;
        thetas[ntheta - 1 - j] = -th; // exact mirror symmetry
    }

    let n = nr * ntheta;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut centroids = Vec::with_capacity(n);
    let half_sin = (0.5 * dtheta).sin();
    for ir in 0..nr {
        let (r1, r2) = r_cells[ir];
        // centroid radius of the annular cell [r1, r2] × Δθ
        let rc = 4.0 * (r2.powi(3) - r1.powi(3)) * half_sin
            / (3.0 * (r2 * r2 - r1 * r1) * dtheta);
        for it in 0..ntheta {
            nodes.push(Complex64::from_polar(rs[ir], thetas[it]));
            weights.push(wr[ir] * dtheta);
            centroids.push(Complex64::from_polar(rc, thetas[it]));
        }
    }

    Ok(Arc::new(PolarGrid {
        sector: *sector,
        alpha,
        nr,
        ntheta,
        rs,
        thetas,
        wr,
        dtheta,
        nodes,
        weights,
        r_cells,
        centroids,
    }))
}

impl PolarGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nr(&self) -> usize {
        self.nr
    }

    pub fn ntheta(&self) -> usize {
        self.ntheta
    }

    pub fn sector(&self) -> &SectorDomain {
        &self.sector
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn idx(&self, ir: usize, it: usize) -> usize {
        ir * self.ntheta + it
    }

    #[inline]
    pub fn node(&self, i: usize) -> Complex64 {
        self.nodes[i]
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rs(&self) -> &[f64] {
        &self.rs
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn radial_weights(&self) -> &[f64] {
        &self.wr
    }

    pub fn dtheta(&self) -> f64 {
        self.dtheta
    }

    pub fn r_of(&self, i: usize) -> f64 {
        self.rs[i / self.ntheta]
    }

    pub fn theta_of(&self, i: usize) -> f64 {
        self.thetas[i % self.ntheta]
    }

    pub fn radial_cell(&self, ir: usize) -> (f64, f64) {
        self.r_cells[ir]
    }

    pub fn centroid(&self, i: usize) -> Complex64 {
        self.centroids[i]
    }

    /// Index of the node mirrored across the x₁-axis (θ → −θ).
    pub fn mirror_index(&self, i: usize) -> usize {
        let ir = i / self.ntheta;
        let it = i % self.ntheta;
        ir * self.ntheta + (self.ntheta - 1 - it)
    }

    /// Nodes at least `margin` cells away from every boundary (the arc,
    /// the two radii, and the corner).
    pub fn interior_mask(&self, margin: usize) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        for ir in margin..self.nr.saturating_sub(margin) {
            for it in margin..self.ntheta.saturating_sub(margin) {
                mask[self.idx(ir, it)] = true;
            }
        }
        mask
    }

    /// FNV-1a over node and weight bit patterns; stable across runs and
    /// thread counts.
    pub fn checksum(&self) -> u64 {
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        let mut eat = |bits: u64| {
            for byte in bits.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        for z in &self.nodes {
            eat(z.re.to_bits());
            eat(z.im.to_bits());
        }
        for w in &self.weights {
            eat(w.to_bits());
        }
        h
    }
}

/// Complex-valued function samples aligned with a grid's nodes.
#[derive(Debug, Clone)]
pub struct ComplexFieldSample {
    grid: Arc<PolarGrid>,
    pub values: Vec<Complex64>,
}

impl ComplexFieldSample {
    pub fn from_fn<F: Fn(Complex64) -> Complex64>(grid: &Arc<PolarGrid>, f: F) -> Self {
        let values = grid.nodes().iter().map(|&z| f(z)).collect();
        ComplexFieldSample {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn from_values(grid: &Arc<PolarGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "sample length {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(ComplexFieldSample {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub fn constant(grid: &Arc<PolarGrid>, c: Complex64) -> Self {
        ComplexFieldSample {
            grid: Arc::clone(grid),
            values: vec![c; grid.len()],
        }
    }

    pub fn zeros(grid: &Arc<PolarGrid>) -> Self {
        Self::constant(grid, Complex64::new(0.0, 0.0))
    }

    pub fn grid(&self) -> &Arc<PolarGrid> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_grid(&self, other: &ComplexFieldSample) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        ComplexFieldSample {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn map_with_node<F: Fn(Complex64, Complex64) -> Complex64>(&self, f: F) -> Self {
        let values = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&z, &v)| f(z, v))
            .collect();
        ComplexFieldSample {
            grid: Arc::clone(&self.grid),
            values,
        }
    }

    pub fn zip_with<F: Fn(Complex64, Complex64) -> Complex64>(
        &self,
        other: &ComplexFieldSample,
        f: F,
    ) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::Config("samples live on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(ComplexFieldSample {
            grid: Arc::clone(&self.grid),
            values,
        })
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| c * v)
    }

    pub fn add(&self, other: &ComplexFieldSample) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexFieldSample) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &ComplexFieldSample) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }
}

/// Pairwise (tree) summation with the split fixed by index; bit-identical
/// regardless of thread count because it is evaluated serially.
pub(crate) fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    if values.len() <= 16 {
        let mut acc = Complex64::new(0.0, 0.0);
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Σ wᵢ f(xᵢ) with deterministic pairwise reduction.
pub fn integrate(f: &ComplexFieldSample) -> Result<Complex64> {
    let grid = f.grid();
    let mut terms = Vec::with_capacity(f.len());
    for (i, &v) in f.values.iter().enumerate() {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite sample value {v} at node {i}"
            )));
        }
        terms.push(grid.weight(i) * v);
    }
    Ok(pairwise_sum(&terms))
}

/// Same as [`integrate`] restricted to masked nodes.
pub fn integrate_masked(f: &ComplexFieldSample, mask: &[bool]) -> Result<Complex64> {
    if mask.len() != f.len() {
        return Err(Error::Config("mask length does not match sample".into()));
    }
    let grid = f.grid();
    let mut terms = Vec::new();
    for (i, &v) in f.values.iter().enumerate() {
        if !mask[i] {
            continue;
        }
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite sample value {v} at node {i}"
            )));
        }
        terms.push(grid.weight(i) * v);
    }
    Ok(pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn grid(theta0: f64, a: f64, alpha: f64, nr: usize, nt: usize) -> Arc<PolarGrid> {
        let sector = SectorDomain::new(theta0, a).unwrap();
        let params = PhaseParams::new(alpha, 0.1).unwrap();
        build_sector_grid(&sector, nr, nt, &params).unwrap()
    }

    #[test]
    fn weights_positive_and_sum_to_area() {
        for &(theta0, a, alpha) in &[
            (FRAC_PI_3, 1.0, 0.5),
            (2.0 * PI / 5.0, 1.0, 0.75),
            (3.0 * PI / 4.0, 2.0, 0.5),
            (0.999 * PI, 1.0, 1.0),
        ] {
            let g = grid(theta0, a, alpha, 48, 48);
            assert!(g.weights().iter().all(|&w| w > 0.0));
            let sum: f64 = g.weights().iter().sum();
            let area = theta0 * a * a;
            assert!(
                (sum - area).abs() / area < 1e-10,
                "area mismatch {sum} vs {area} (theta0={theta0}, alpha={alpha})"
            );
        }
    }

    #[test]
    fn nodes_strictly_inside() {
        let g = grid(FRAC_PI_3, 1.0, 0.5, 24, 16);
        for i in 0..g.len() {
            let z = g.node(i);
            assert!(g.sector().contains(z), "node {z} outside sector");
        }
    }

    #[test]
    fn integrate_constants_and_moments() {
        let g = grid(FRAC_PI_3, 1.0, 0.5, 48, 48);
        // f ≡ 0 → 0
        let z = integrate(&ComplexFieldSample::zeros(&g)).unwrap();
        assert_eq!(z, Complex64::new(0.0, 0.0));
        // f ≡ c → c·θ₀a²
        let c = Complex64::new(2.0, -1.0);
        let v = integrate(&ComplexFieldSample::constant(&g, c)).unwrap();
        let area = FRAC_PI_3;
        assert!((v - c * area).norm() < 1e-10);
        // f = r^{0.5}: ∫ r^{0.5} r dr dθ = 2θ₀ a^{2.5}/2.5
        let f = ComplexFieldSample::from_fn(&g, |z| Complex64::new(z.norm().sqrt(), 0.0));
        let exact = 2.0 * FRAC_PI_3 / 2.5;
        let v = integrate(&f).unwrap();
        assert!((v.re - exact).abs() / exact < 1e-10, "{} vs {exact}", v.re);
    }

    #[test]
    fn integrate_r_moment_half_plane_sector() {
        // ∫ r dx over (θ₀ = π/2⁻, a = 1) = 2θ₀/3
        let theta0 = FRAC_PI_2 * (1.0 - 1e-12);
        let g = grid(theta0, 1.0, 0.5, 48, 48);
        let f = ComplexFieldSample::from_fn(&g, |z| Complex64::new(z.norm(), 0.0));
        let v = integrate(&f).unwrap();
        let exact = 2.0 * theta0 / 3.0;
        assert!((v.re - exact).abs() / exact < 1e-10);
    }

    #[test]
    fn integrate_rejects_non_finite() {
        let g = grid(FRAC_PI_3, 1.0, 0.5, 24, 16);
        let mut f = ComplexFieldSample::zeros(&g);
        f.values[3] = Complex64::new(f64::NAN, 0.0);
        assert!(integrate(&f).is_err());
    }

    #[test]
    fn integrate_is_bit_deterministic() {
        let g = grid(FRAC_PI_3, 1.0, 0.5, 96, 96);
        let f = ComplexFieldSample::from_fn(&g, |z| (z * Complex64::new(0.3, 1.7)).exp());
        let a = integrate(&f).unwrap();
        let b = integrate(&f).unwrap();
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }

    #[test]
    fn quadrature_stable_under_radial_doubling() {
        // f = r^β e^{−Φ/h}, β ∈ {0, 1}: doubling nr moves the integral by
        // ≤ 1e−6 relative at h ≥ 0.02
        use crate::analytic::{phase, Branch};
        let params = PhaseParams::new(0.5, 0.02).unwrap();
        for beta in [0.0, 1.0] {
            let mut vals = Vec::new();
            for nr in [96, 192] {
                let g = grid(FRAC_PI_3, 1.0, 0.5, nr, 96);
                let f = ComplexFieldSample::from_fn(&g, |z| {
                    let rb = z.norm().powf(beta);
                    rb * (-phase(z, &params, Branch::Principal).unwrap() / params.h).exp()
                });
                vals.push(integrate(&f).unwrap());
            }
            let rel = (vals[1] - vals[0]).norm() / vals[1].norm();
            assert!(rel < 1e-6, "beta={beta}: doubling changed integral by {rel:.2e}");
        }
    }

    #[test]
    fn mirror_index_is_exact() {
        let g = grid(FRAC_PI_3, 1.0, 0.5, 24, 33); // odd angular count
        for i in 0..g.len() {
            let j = g.mirror_index(i);
            assert_eq!(g.node(i).re.to_bits(), g.node(j).re.to_bits());
            assert_eq!(g.node(i).im.to_bits(), (-g.node(j).im).to_bits());
            assert_eq!(g.mirror_index(j), i);
        }
    }

    #[test]
    fn centroids_sit_inside_cells() {
        let g = grid(FRAC_PI_3, 1.0, 0.5, 24, 16);
        for i in 0..g.len() {
            let c = g.centroid(i);
            let ir = i / g.ntheta();
            let (r1, r2) = g.radial_cell(ir);
            let rc = c.norm();
            assert!(rc > r1 && rc < r2, "centroid radius {rc} outside ({r1}, {r2})");
        }
    }

    #[test]
    fn checksum_stable() {
        let g1 = grid(FRAC_PI_3, 1.0, 0.5, 24, 16);
        let g2 = grid(FRAC_PI_3, 1.0, 0.5, 24, 16);
        assert_eq!(g1.checksum(), g2.checksum());
        let g3 = grid(FRAC_PI_3, 1.0, 0.5, 24, 20);
        assert_ne!(g1.checksum(), g3.checksum());
    }
}

//! Sampled coefficients on a polar tensor grid over a disk (ambient n = 1).
//!
//! Nodes sit at Gauss-Legendre radii (scaled to [0, r]) times equispaced
//! angles, which makes the disk quadrature
//!
//! ```text
//!   ∬_{B_r} f dλ ≈ Σ_{i,j}  r w_i · ρ_i · (2π/N_ang) · f(ρ_i e^{iθ_j})
//! ```
//!
//! spectrally accurate in the angle and of Gauss order in the radius.
//!
//! Real derivatives (and with them ∂̄ = (∂x + i∂y)/2) are 4th-order centered
//! finite differences on Cartesian stencils of uniform arm length,
//! reinterpolated from the polar samples; this keeps the noise amplification
//! of differencing uniform over the disk (the polar chain rule divides the
//! angular derivative by ρ, which blows up sampling noise at the innermost
//! Gauss ring).  Near the boundary, where Cartesian arms would leave the
//! disk, the stencil falls back to the polar chain rule with one-sided
//! 2nd-order radial differences at the outer ring.  Evaluation between nodes
//! uses 4-point (bicubic) Lagrange interpolation in both directions, which
//! is also what grid restriction / resampling uses.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num::complex::Complex64;

use crate::coeff::{crat_to_f64, CRat, Coeff};
use crate::error::{Error, Result};
use crate::series::SeriesCoeff;

/// Grid resolution: number of radial rings and angular sectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub n_rad: usize,
    pub n_ang: usize,
}

impl GridSpec {
    pub fn new(n_rad: usize, n_ang: usize) -> Result<Self> {
        if n_rad < 8 || n_ang < 16 {
            return Err(Error::BadInput(format!(
                "grid too coarse: need n_rad >= 8 and n_ang >= 16, got {n_rad} x {n_ang}"
            )));
        }
        if n_ang % 2 != 0 {
            return Err(Error::BadInput(
                "n_ang must be even (the radial stencils reflect through the origin)".into(),
            ));
        }
        Ok(GridSpec { n_rad, n_ang })
    }

    pub fn len(&self) -> usize {
        self.n_rad * self.n_ang
    }
}

/// Backend parameters of grid coefficients: resolution plus disk radius.
#[derive(Clone, Debug, PartialEq)]
pub struct GridCtx {
    pub spec: GridSpec,
    pub radius: f64,
}

impl GridCtx {
    pub fn new(spec: GridSpec, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::BadInput(format!("radius must be positive, got {radius}")));
        }
        Ok(GridCtx { spec, radius })
    }

    /// Radial nodes ρ_i of this grid.
    pub fn radial_nodes(&self) -> Vec<f64> {
        let t = radial_tables(self.spec.n_rad);
        t.x.iter().map(|x| x * self.radius).collect()
    }

    /// All grid nodes in ring-major order, as complex points.
    pub fn nodes(&self) -> Vec<Complex64> {
        let t = radial_tables(self.spec.n_rad);
        let n_ang = self.spec.n_ang;
        let dth = 2.0 * std::f64::consts::PI / n_ang as f64;
        let mut out = Vec::with_capacity(self.spec.len());
        for i in 0..self.spec.n_rad {
            let rho = t.x[i] * self.radius;
            for j in 0..n_ang {
                out.push(Complex64::from_polar(rho, dth * j as f64));
            }
        }
        out
    }

    /// Disk-quadrature area weights aligned with [`GridCtx::nodes`].
    pub fn area_weights(&self) -> Vec<f64> {
        let t = radial_tables(self.spec.n_rad);
        let n_ang = self.spec.n_ang;
        let dth = 2.0 * std::f64::consts::PI / n_ang as f64;
        let r = self.radius;
        let mut out = Vec::with_capacity(self.spec.len());
        for i in 0..self.spec.n_rad {
            let wi = r * t.w[i] * (t.x[i] * r) * dth;
            for _ in 0..n_ang {
                out.push(wi);
            }
        }
        out
    }

    /// Local grid spacing near ring `i`: max of the radial gap and the arc step.
    pub fn local_spacing(&self, ring: usize) -> f64 {
        let t = radial_tables(self.spec.n_rad);
        let r = self.radius;
        let x = &t.x;
        let gap = if ring + 1 < x.len() {
            x[ring + 1] - x[ring]
        } else {
            x[ring] - x[ring - 1]
        } * r;
        let arc = x[ring] * r * 2.0 * std::f64::consts::PI / self.spec.n_ang as f64;
        gap.max(arc)
    }
}

/// A complex-valued function sampled on a polar grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridCoeff {
    ctx: GridCtx,
    samples: Vec<Complex64>,
}

impl GridCoeff {
    pub fn from_samples(ctx: &GridCtx, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != ctx.spec.len() {
            return Err(Error::BadInput(format!(
                "expected {} samples, got {}",
                ctx.spec.len(),
                samples.len()
            )));
        }
        Ok(GridCoeff { ctx: ctx.clone(), samples })
    }

    pub fn from_fn(ctx: &GridCtx, f: impl Fn(Complex64) -> Complex64) -> Self {
        let samples = ctx.nodes().into_iter().map(f).collect();
        GridCoeff { ctx: ctx.clone(), samples }
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Max of |f| over the grid nodes.
    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn sample(&self, ring: usize, j: usize) -> Complex64 {
        self.samples[ring * self.ctx.spec.n_ang + j]
    }

    /// Value on the extended radial index (reflected rings for e < P).
    fn ext_sample(&self, e: usize, j: usize) -> Complex64 {
        let n_ang = self.ctx.spec.n_ang;
        if e < REFLECT {
            let ring = REFLECT - 1 - e;
            self.sample(ring, (j + n_ang / 2) % n_ang)
        } else {
            self.sample(e - REFLECT, j)
        }
    }

    /// Radial derivative ∂f/∂ρ at every node of one ring.
    fn radial_deriv_ring(&self, ring: usize, out: &mut [Complex64]) {
        let t = radial_tables(self.ctx.spec.n_rad);
        let n_ang = self.ctx.spec.n_ang;
        let inv_r = 1.0 / self.ctx.radius;
        let (start, wgt) = &t.deriv[ring];
        for (j, o) in out.iter_mut().enumerate().take(n_ang) {
            let mut s = Complex64::new(0.0, 0.0);
            for (k, w) in wgt.iter().enumerate() {
                s += self.ext_sample(start + k, j) * *w;
            }
            *o = s * inv_r;
        }
    }

    /// Angular derivative ∂f/∂θ on one ring (periodic 5-point stencil).
    fn angular_deriv_ring(&self, ring: usize, out: &mut [Complex64]) {
        let n_ang = self.ctx.spec.n_ang;
        let inv = 1.0 / (12.0 * 2.0 * std::f64::consts::PI / n_ang as f64);
        for (j, o) in out.iter_mut().enumerate().take(n_ang) {
            let f =
                |of: isize| self.sample(ring, ((j as isize + of).rem_euclid(n_ang as isize)) as usize);
            *o = (f(-2) - f(2) + (f(1) - f(-1)) * 8.0) * inv;
        }
    }

    /// Both Cartesian first derivatives (∂x f, ∂y f) at every node.
    ///
    /// Interior nodes use 4th-order centered differences on Cartesian arms of
    /// uniform length h = r·π/(2 N_rad), sampled by bicubic interpolation;
    /// rings too close to the boundary for the arms fall back to the polar
    /// chain rule (one-sided 2nd-order radially at the outer ring).
    pub fn cartesian_derivs(&self) -> (GridCoeff, GridCoeff) {
        let t = radial_tables(self.ctx.spec.n_rad);
        let n_ang = self.ctx.spec.n_ang;
        let n_rad = self.ctx.spec.n_rad;
        let r = self.ctx.radius;
        let h = r * std::f64::consts::FRAC_PI_2 / n_rad as f64;
        let dth = 2.0 * std::f64::consts::PI / n_ang as f64;
        let mut dx = vec![Complex64::new(0.0, 0.0); self.samples.len()];
        let mut dy = vec![Complex64::new(0.0, 0.0); self.samples.len()];
        let mut dr_ring = vec![Complex64::new(0.0, 0.0); n_ang];
        let mut dt_ring = vec![Complex64::new(0.0, 0.0); n_ang];
        let inv12h = 1.0 / (12.0 * h);
        for ring in 0..n_rad {
            let rho = t.x[ring] * r;
            if rho + 2.0 * h <= r {
                // Cartesian 5-point stencils (center weight is zero).
                for j in 0..n_ang {
                    let z = Complex64::from_polar(rho, dth * j as f64);
                    let idx = ring * n_ang + j;
                    for (axis, out) in [(0usize, &mut dx), (1usize, &mut dy)] {
                        let e = if axis == 0 {
                            Complex64::new(h, 0.0)
                        } else {
                            Complex64::new(0.0, h)
                        };
                        let f = |k: f64| self.eval_point(z + e * k).expect("stencil inside disk");
                        out[idx] = (f(-2.0) - f(2.0) + (f(1.0) - f(-1.0)) * 8.0) * inv12h;
                    }
                }
            } else {
                // Polar chain rule near the rim (1/ρ is harmless there).
                self.radial_deriv_ring(ring, &mut dr_ring);
                self.angular_deriv_ring(ring, &mut dt_ring);
                for j in 0..n_ang {
                    let th = dth * j as f64;
                    let idx = ring * n_ang + j;
                    dx[idx] = dr_ring[j] * th.cos() - dt_ring[j] * th.sin() / rho;
                    dy[idx] = dr_ring[j] * th.sin() + dt_ring[j] * th.cos() / rho;
                }
            }
        }
        (
            GridCoeff { ctx: self.ctx.clone(), samples: dx },
            GridCoeff { ctx: self.ctx.clone(), samples: dy },
        )
    }

    /// ∂f/∂z at every node.
    pub fn z_deriv(&self) -> GridCoeff {
        self.complex_deriv(false)
    }

    fn complex_deriv(&self, bar: bool) -> GridCoeff {
        let (dx, dy) = self.cartesian_derivs();
        let sign = if bar { 1.0 } else { -1.0 };
        let half_i = Complex64::new(0.0, 0.5 * sign);
        let samples = dx
            .samples
            .iter()
            .zip(&dy.samples)
            .map(|(a, b)| a * 0.5 + half_i * b)
            .collect();
        GridCoeff { ctx: self.ctx.clone(), samples }
    }

    /// Interpolated value at an arbitrary point of the closed disk.
    pub fn eval_point(&self, z: Complex64) -> Result<Complex64> {
        let r = self.ctx.radius;
        let rho = z.norm();
        if rho > r * (1.0 + 1e-9) {
            return Err(Error::OutOfDomain(format!(
                "|z| = {rho:.6} exceeds the grid radius {r:.6}"
            )));
        }
        let rho = rho.min(r);
        let theta = z.im.atan2(z.re);
        let t = radial_tables(self.ctx.spec.n_rad);
        let n_ang = self.ctx.spec.n_ang;
        let dth = 2.0 * std::f64::consts::PI / n_ang as f64;

        // Angular stencil: 4 consecutive sectors around θ.
        let tpos = (theta / dth).rem_euclid(n_ang as f64);
        let j0 = tpos.floor() as isize;
        // Stencil angles are kept unreduced (j may be −1 or n_ang), so the
        // query angle always lies between thetas[1] and thetas[2].
        let ja: Vec<isize> = (j0 - 1..=j0 + 2).collect();
        let thetas: Vec<f64> = ja.iter().map(|&j| j as f64 * dth).collect();
        let tval = tpos * dth;

        // Radial stencil: 4 consecutive extended nodes around ρ/r.
        let xq = rho / r;
        let ext = &t.ext;
        let pos = ext.partition_point(|&v| v < xq);
        let lo = pos.saturating_sub(2).min(ext.len() - 4);
        let xs = &ext[lo..lo + 4];

        // Interpolate in the angle on each stencil ring, then radially.
        let mut ring_vals = [Complex64::new(0.0, 0.0); 4];
        for (k, ring_val) in ring_vals.iter_mut().enumerate() {
            let e = lo + k;
            let mut vals = [Complex64::new(0.0, 0.0); 4];
            for (a, v) in vals.iter_mut().enumerate() {
                let j = (ja[a]).rem_euclid(n_ang as isize) as usize;
                *v = self.ext_sample(e, j);
            }
            *ring_val = lagrange4(&thetas, &vals, tval);
        }
        Ok(lagrange4(xs, &ring_vals, xq))
    }

    /// Resamples onto another grid (typically a smaller concentric disk).
    pub fn resample(&self, new_ctx: &GridCtx) -> Result<GridCoeff> {
        if new_ctx.radius > self.ctx.radius * (1.0 + 1e-12) {
            return Err(Error::OutOfDomain(format!(
                "cannot resample from radius {} onto larger radius {}",
                self.ctx.radius, new_ctx.radius
            )));
        }
        let samples = new_ctx
            .nodes()
            .into_iter()
            .map(|z| self.eval_point(z))
            .collect::<Result<Vec<_>>>()?;
        Ok(GridCoeff { ctx: new_ctx.clone(), samples })
    }
}

fn lagrange4(xs: &[f64], vals: &[Complex64; 4], x: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        let mut w = 1.0;
        for j in 0..4 {
            if i != j {
                w *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        acc += vals[i] * w;
    }
    acc
}

/// Number of rings reflected through the origin for the extended radial axis.
const REFLECT: usize = 3;

struct RadialTables {
    /// Gauss-Legendre nodes on [0, 1], ascending.
    x: Vec<f64>,
    /// Gauss-Legendre weights for ∫₀¹.
    w: Vec<f64>,
    /// Extended nodes [−x₂, −x₁, −x₀, x₀, x₁, …].
    ext: Vec<f64>,
    /// Per-ring radial derivative stencils on the extended axis:
    /// (start index, weights).  4th order inside, 2nd order one-sided at the
    /// outer ring.
    deriv: Vec<(usize, Vec<f64>)>,
}

fn radial_tables(n_rad: usize) -> Arc<RadialTables> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<RadialTables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n_rad)
        .or_insert_with(|| {
            let (x01, w01) = gauss_legendre_01(n_rad);
            let mut ext = Vec::with_capacity(n_rad + REFLECT);
            for k in (0..REFLECT).rev() {
                ext.push(-x01[k]);
            }
            ext.extend_from_slice(&x01);
            let mut deriv = Vec::with_capacity(n_rad);
            for ring in 0..n_rad {
                let e = ring + REFLECT;
                let (start, width, order) = if ring == n_rad - 1 {
                    (e - 2, 3, 1) // one-sided, 2nd order
                } else if ring == n_rad - 2 {
                    (e - 3, 5, 1)
                } else {
                    (e - 2, 5, 1)
                };
                let nodes = &ext[start..start + width];
                let w = fd_weights(ext[e], nodes, order);
                deriv.push((start, w));
            }
            Arc::new(RadialTables { x: x01, w: w01, ext, deriv })
        })
        .clone()
}

/// Gauss-Legendre nodes and weights on [0, 1], ascending nodes.
pub fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (
        x.iter().map(|v| (v + 1.0) / 2.0).collect(),
        w.iter().map(|v| v / 2.0).collect(),
    )
}

/// Gauss-Legendre nodes and weights on [−1, 1] (Newton on the Legendre
/// recurrence, ascending nodes).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, 0.0f64);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = (((2 * j + 1) as f64) * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            let dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                let dp = {
                    let (mut p0, mut p1) = (1.0f64, 0.0f64);
                    for j in 0..n {
                        let p2 = p1;
                        p1 = p0;
                        p0 = (((2 * j + 1) as f64) * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
                    }
                    n as f64 * (z * p0 - p1) / (z * z - 1.0)
                };
                x[i] = -z;
                x[n - 1 - i] = z;
                let wi = 2.0 / ((1.0 - z * z) * dp * dp);
                w[i] = wi;
                w[n - 1 - i] = wi;
                break;
            }
        }
    }
    (x, w)
}

/// Finite-difference weights on arbitrary nodes (Fornberg's algorithm):
/// returns the weights of the `m`-th derivative at `x0` for the given nodes.
pub fn fd_weights(x0: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    assert!(n > m);
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Samples an exact series coefficient onto a grid.
pub fn sample_series(ctx: &GridCtx, s: &SeriesCoeff) -> Result<GridCoeff> {
    if SeriesCoeff::ambient(s.ctx()) != 1 {
        return Err(Error::Unsupported(
            "grid sampling is only available in ambient dimension 1".into(),
        ));
    }
    let samples = ctx
        .nodes()
        .into_iter()
        .map(|z| s.eval(&[z]))
        .collect::<Result<Vec<_>>>()?;
    GridCoeff::from_samples(ctx, samples)
}

impl Coeff for GridCoeff {
    type Ctx = GridCtx;

    fn ctx(&self) -> &GridCtx {
        &self.ctx
    }

    fn ambient(_ctx: &GridCtx) -> usize {
        1
    }

    fn zero(ctx: &GridCtx) -> Self {
        GridCoeff { ctx: ctx.clone(), samples: vec![Complex64::new(0.0, 0.0); ctx.spec.len()] }
    }

    fn one(ctx: &GridCtx) -> Self {
        GridCoeff { ctx: ctx.clone(), samples: vec![Complex64::new(1.0, 0.0); ctx.spec.len()] }
    }

    fn constant(ctx: &GridCtx, value: &CRat) -> Self {
        let v = crat_to_f64(value);
        GridCoeff { ctx: ctx.clone(), samples: vec![v; ctx.spec.len()] }
    }

    fn is_zero(&self) -> bool {
        self.samples.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    fn add(&self, other: &Self) -> Self {
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect();
        GridCoeff { ctx: self.ctx.clone(), samples }
    }

    fn sub(&self, other: &Self) -> Self {
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect();
        GridCoeff { ctx: self.ctx.clone(), samples }
    }

    fn neg(&self) -> Self {
        GridCoeff { ctx: self.ctx.clone(), samples: self.samples.iter().map(|v| -v).collect() }
    }

    fn mul(&self, other: &Self) -> Self {
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect();
        GridCoeff { ctx: self.ctx.clone(), samples }
    }

    fn dbar(&self, j: usize) -> Self {
        assert_eq!(j, 1, "grid backend is one-dimensional");
        self.complex_deriv(true)
    }

    fn real_deriv(&self, axis: usize) -> Self {
        assert!(axis < 2, "grid backend has two real axes");
        let (dx, dy) = self.cartesian_derivs();
        if axis == 0 {
            dx
        } else {
            dy
        }
    }

    fn derivative_order_cap() -> Option<usize> {
        Some(2)
    }

    fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != 1 {
            return Err(Error::BadInput("grid backend expects a 1-dimensional point".into()));
        }
        self.eval_point(z[0])
    }

    fn domain_radius(ctx: &GridCtx) -> f64 {
        ctx.radius
    }

    fn sample_points(ctx: &GridCtx) -> Vec<Vec<Complex64>> {
        ctx.nodes().into_iter().map(|z| vec![z]).collect()
    }

    fn sample_values(&self) -> Vec<Complex64> {
        self.samples.clone()
    }

    fn invert_unit_matrix(ctx: &GridCtx, rows: usize, entries: &[Self]) -> Result<Vec<Self>> {
        assert_eq!(entries.len(), rows * rows);
        let len = ctx.spec.len();
        let mut out = vec![Vec::with_capacity(len); rows * rows];
        let mut point_mat = vec![Complex64::new(0.0, 0.0); rows * rows];
        for p in 0..len {
            for (k, e) in entries.iter().enumerate() {
                point_mat[k] = e.samples[p];
            }
            let inv = crate::coeff::invert_complex_matrix(rows, &point_mat).ok_or_else(|| {
                let nodes = ctx.nodes();
                Error::NonUnit(format!(
                    "sample matrix singular at grid point z = {:.6} + {:.6}i (ring {}, sector {})",
                    nodes[p].re,
                    nodes[p].im,
                    p / ctx.spec.n_ang,
                    p % ctx.spec.n_ang
                ))
            })?;
            for k in 0..rows * rows {
                out[k].push(inv[k]);
            }
        }
        Ok(out
            .into_iter()
            .map(|samples| GridCoeff { ctx: ctx.clone(), samples })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n_rad: usize, n_ang: usize, r: f64) -> GridCtx {
        GridCtx::new(GridSpec::new(n_rad, n_ang).unwrap(), r).unwrap()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre_01(16);
        // ∫₀¹ x^5 dx = 1/6 ; Gauss order 2·16−1 ≫ 5, so this is exact.
        let s: f64 = x.iter().zip(&w).map(|(xi, wi)| xi.powi(5) * wi).sum();
        assert!((s - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn fornberg_recovers_uniform_stencil() {
        let xs = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let w = fd_weights(0.0, &xs, 1);
        let expect = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12, "{w:?}");
        }
    }

    #[test]
    fn disk_quadrature_weights_sum_to_area() {
        let c = ctx(32, 64, 0.7);
        let total: f64 = c.area_weights().iter().sum();
        let area = std::f64::consts::PI * 0.49;
        assert!((total - area).abs() < 1e-12 * area.max(1.0));
    }

    #[test]
    fn dbar_of_zbar_is_one_on_grid() {
        let c = ctx(24, 48, 1.0);
        let f = GridCoeff::from_fn(&c, |z| z.conj());
        let d = f.dbar(1);
        for v in d.samples() {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-4);
        }
    }

    #[test]
    fn dbar_of_holomorphic_vanishes_on_grid() {
        let c = ctx(24, 48, 1.0);
        let f = GridCoeff::from_fn(&c, |z| z * z);
        let d = f.dbar(1);
        assert!(d.max_abs() < 1e-3, "{}", d.max_abs());
    }

    #[test]
    fn dbar_fd_error_shrinks_at_high_order_inside() {
        // f = z³z̄² has ∂̄f = 2 z³ z̄; the interior error should drop by
        // roughly 2⁴ when the grid doubles (interpolation + stencil are both
        // 4th order; the observed exponent is slightly below 4).
        let err = |n: usize| -> f64 {
            let c = ctx(n, 2 * n, 1.0);
            let f = GridCoeff::from_fn(&c, |z| z.powu(3) * z.conj().powu(2));
            let d = f.dbar(1);
            let nodes = c.nodes();
            d.samples()
                .iter()
                .zip(nodes.iter())
                .filter(|(_, z)| z.norm() < 0.85)
                .map(|(v, z)| (v - z * z * z * z.conj() * 2.0).norm())
                .fold(0.0, f64::max)
        };
        let e1 = err(24);
        let e2 = err(48);
        let order = (e1 / e2).log2();
        assert!(order > 3.0, "observed order {order} ({e1} -> {e2})");
    }

    #[test]
    fn real_derivs_combine_to_dbar() {
        let c = ctx(16, 32, 0.8);
        let f = GridCoeff::from_fn(&c, |z| z.conj() * z.conj() + z);
        let dx = f.real_deriv(0);
        let dy = f.real_deriv(1);
        let half_i = Complex64::new(0.0, 0.5);
        let combo = dx
            .samples()
            .iter()
            .zip(dy.samples())
            .map(|(a, b)| a * 0.5 + half_i * b)
            .collect::<Vec<_>>();
        let d = f.dbar(1);
        for (a, b) in combo.iter().zip(d.samples()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn interpolation_is_accurate() {
        let c = ctx(32, 64, 1.0);
        let f = GridCoeff::from_fn(&c, |z| (z * 1.3 + z.conj() * z.conj()).exp());
        for &(re, im) in &[(0.11, -0.37), (0.0, 0.0), (-0.62, 0.2), (0.55, 0.55)] {
            let z = Complex64::new(re, im);
            let got = f.eval_point(z).unwrap();
            let expect = (z * 1.3 + z.conj() * z.conj()).exp();
            assert!((got - expect).norm() < 1e-4, "at {z}: {got} vs {expect}");
        }
    }

    #[test]
    fn resample_round_trip_error_is_small() {
        let big = ctx(48, 96, 1.0);
        let small = ctx(48, 96, 0.6);
        let f = GridCoeff::from_fn(&big, |z| z.conj() * (z * z) + z);
        let g = f.resample(&small).unwrap();
        let direct = GridCoeff::from_fn(&small, |z| z.conj() * (z * z) + z);
        let diff = g.sub(&direct).max_abs();
        assert!(diff < 1e-8, "{diff}");
    }

    #[test]
    fn eval_outside_domain_errors() {
        let c = ctx(16, 32, 0.5);
        let f = GridCoeff::from_fn(&c, |z| z);
        assert!(f.eval_point(Complex64::new(0.6, 0.0)).is_err());
    }

    #[test]
    fn grid_matrix_inverse_round_trip() {
        let c = ctx(16, 32, 1.0);
        let e11 = GridCoeff::from_fn(&c, |z| Complex64::new(1.0, 0.0) + z * 0.3);
        let e12 = GridCoeff::from_fn(&c, |z| z.conj() * 0.2);
        let e21 = GridCoeff::zero(&c);
        let e22 = GridCoeff::one(&c);
        let entries = vec![e11.clone(), e12.clone(), e21.clone(), e22.clone()];
        let inv = GridCoeff::invert_unit_matrix(&c, 2, &entries).unwrap();
        // (A · A^{-1})_{00} = 1, _{01} = 0.
        let p00 = e11.mul(&inv[0]).add(&e12.mul(&inv[2]));
        let p01 = e11.mul(&inv[1]).add(&e12.mul(&inv[3]));
        assert!(p00.sub(&GridCoeff::one(&c)).max_abs() < 1e-12);
        assert!(p01.max_abs() < 1e-12);
    }
}

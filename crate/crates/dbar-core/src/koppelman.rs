//! The homotopy operator on the disk: the solid Cauchy transform.
//!
//! For a (0,1)-form u = f dz̄ on B_r ⊂ ℂ the operator is
//!
//! ```text
//!   (T u)(z) = (1/π) ∬_{B_r} f(ζ) / (z − ζ) dλ(ζ),
//! ```
//!
//! normalized so that ∂̄(T u) = u holds in the interior (the one-variable
//! homotopy formula u = ∂̄ T u + T ∂̄ u, where the second term drops for
//! top-degree u).  At radius r it is conjugated by the homothety λ_r:
//! pull back to the unit disk, transform there, push forward.
//!
//! The production evaluation is mode-exact: expanding f(ρe^{iθ}) =
//! Σ_m f_m(ρ) e^{imθ} per ring, the kernel's geometric series in the angle
//! turns the transform into one smooth radial integral per mode,
//!
//! ```text
//!   (T u)(s e^{iφ}) = 2 Σ_{m≤0} e^{i(m−1)φ} ∫_0^s f_m(ρ) (ρ/s)^{1−m} dρ
//!                   − 2 Σ_{m≥1} e^{i(m−1)φ} ∫_s^r f_m(ρ) (s/ρ)^{m−1} dρ,
//! ```
//!
//! with every kernel ratio ≤ 1, so the 1/(z−ζ) singularity never appears and
//! the cost is O(N_rad² N_ang) instead of O((N_rad N_ang)²).  The radial
//! integrals use two-point Gauss panels between the rings with bicubic
//! in-panel interpolation of the mode profiles.
//!
//! An independent direct quadrature of the same operator — singularity
//! subtraction of the first-order jet ℓ_z(ζ) = f(z) + f_z(z)(ζ−z) +
//! f_z̄(z)(ζ̄−z̄) against the closed-form moments
//!
//! ```text
//!   (1/π) ∬ 1/(z−ζ) dλ = z̄,   (1/π) ∬ (ζ−z)/(z−ζ) dλ = −r²,
//!   (1/π) ∬ (ζ̄−z̄)/(z−ζ) dλ = −z̄²/2,
//! ```
//!
//! with a skipped local patch of `singularity_split_radius` grid spacings —
//! is kept as [`direct_quadrature_transform`] and serves as the two-path
//! cross-check in the test suite.

use num::complex::Complex64;
use rayon::prelude::*;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::form::MatrixForm;
use crate::grid::{GridCoeff, GridCtx, GridSpec};
use crate::holder::{
    build_weights, derivative_loss_exponent, holder_norm, NormSpec, WeightContext,
};

/// Grid resolution and singularity-patch size of one transform.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    pub n_rad: usize,
    pub n_ang: usize,
    /// Radius (in units of the local grid spacing) of the skipped patch
    /// around each target point.
    pub singularity_split_radius: f64,
}

impl QuadratureSpec {
    pub fn new(n_rad: usize, n_ang: usize, singularity_split_radius: f64) -> Result<Self> {
        GridSpec::new(n_rad, n_ang)?;
        if !(singularity_split_radius > 0.0) || !singularity_split_radius.is_finite() {
            return Err(Error::BadInput(
                "singularity_split_radius must be positive and finite".into(),
            ));
        }
        Ok(QuadratureSpec { n_rad, n_ang, singularity_split_radius })
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec { n_rad: self.n_rad, n_ang: self.n_ang }
    }

    pub fn grid_ctx(&self, radius: f64) -> Result<GridCtx> {
        GridCtx::new(self.grid(), radius)
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { n_rad: 128, n_ang: 256, singularity_split_radius: 1.0 }
    }
}

/// Type alias for grid-backed matrix forms.
pub type GridForm = MatrixForm<GridCoeff>;

/// Applies the transform to every entry of a degree-1 matrix form on B_r,
/// returning the degree-0 primitive sampled on the same grid.
///
/// The input must be grid-backed in one variable; exact series inputs are
/// sampled with [`crate::grid::sample_series`] first.
pub fn cauchy_transform(u: &GridForm, r: f64, spec: &QuadratureSpec) -> Result<GridForm> {
    if u.degree() != 1 {
        return Err(Error::DegreeMismatch(format!(
            "the transform of the disk expects a (0,1)-form, got degree {}",
            u.degree()
        )));
    }
    let ctx = spec.grid_ctx(r)?;
    let coeff_matrix = resampled_component(u, &ctx)?;
    let mut out = GridForm::zero(&ctx, u.rows(), u.cols(), 0);
    let transformed: Vec<GridCoeff> = coeff_matrix
        .iter()
        .map(|f| transform_scalar_spectral(f, &ctx))
        .collect::<Result<Vec<_>>>()?;
    out.set_component(vec![], transformed)?;
    Ok(out)
}

/// The same operator by direct singular quadrature (jet subtraction plus
/// closed-form moments).  Slower and less accurate than the mode-exact path;
/// retained as an independent oracle for two-path validation.
pub fn direct_quadrature_transform(
    u: &GridForm,
    r: f64,
    spec: &QuadratureSpec,
) -> Result<GridForm> {
    if u.degree() != 1 {
        return Err(Error::DegreeMismatch(format!(
            "the transform of the disk expects a (0,1)-form, got degree {}",
            u.degree()
        )));
    }
    let ctx = spec.grid_ctx(r)?;
    let coeff_matrix = resampled_component(u, &ctx)?;
    let mut out = GridForm::zero(&ctx, u.rows(), u.cols(), 0);
    let transformed: Vec<GridCoeff> = coeff_matrix
        .iter()
        .map(|f| transform_scalar_direct(f, &ctx, spec.singularity_split_radius))
        .collect::<Result<Vec<_>>>()?;
    out.set_component(vec![], transformed)?;
    Ok(out)
}

/// The same operator realized by conjugation with the homothety of ratio r:
/// pull the form back to the unit disk, transform at radius one, push the
/// primitive forward.  Agrees with direct integration over B_r to rounding.
pub fn scaled_transform(u: &GridForm, r: f64, spec: &QuadratureSpec) -> Result<GridForm> {
    if u.degree() != 1 {
        return Err(Error::DegreeMismatch("scaled_transform expects a (0,1)-form".into()));
    }
    let ctx_r = spec.grid_ctx(r)?;
    let ctx_1 = spec.grid_ctx(1.0)?;
    let coeff_matrix = resampled_component(u, &ctx_r)?;
    let mut transformed = Vec::with_capacity(coeff_matrix.len());
    for f in &coeff_matrix {
        // Pullback of f dz̄ under w ↦ rw is r·f(rw) dw̄; the grids share
        // relative nodes, so the pullback is a pure per-sample rescale.
        let pulled_samples: Vec<Complex64> = f.samples().iter().map(|v| v * r).collect();
        let pulled = GridCoeff::from_samples(&ctx_1, pulled_samples)?;
        let prim = transform_scalar_spectral(&pulled, &ctx_1)?;
        // Push the degree-0 primitive forward: values transport unchanged.
        transformed.push(GridCoeff::from_samples(&ctx_r, prim.samples().to_vec())?);
    }
    let mut out = GridForm::zero(&ctx_r, u.rows(), u.cols(), 0);
    out.set_component(vec![], transformed)?;
    Ok(out)
}

/// The single dz̄-component of a degree-1 form, resampled onto `ctx`.
fn resampled_component(u: &GridForm, ctx: &GridCtx) -> Result<Vec<GridCoeff>> {
    let comp = u.component(&vec![1]);
    comp.iter()
        .map(|f| {
            if f.ctx() == ctx {
                Ok(f.clone())
            } else {
                f.resample(ctx)
            }
        })
        .collect()
}

/// Mode-exact scalar transform on one grid.
fn transform_scalar_spectral(f: &GridCoeff, ctx: &GridCtx) -> Result<GridCoeff> {
    let n_rad = ctx.spec.n_rad;
    let n_ang = ctx.spec.n_ang;
    let r = ctx.radius;
    let rho: Vec<f64> = ctx.radial_nodes();
    let tw = twiddles(n_ang);
    let samples = f.samples();

    // Angular analysis per ring: modes[i][m] = (1/N) Σ_j f(ρ_i, θ_j) e^{−imθ_j},
    // with the index m = 0..N−1 representing the mode μ = m (m ≤ N/2) or m − N.
    let inv_n = 1.0 / n_ang as f64;
    let mut modes = vec![Complex64::new(0.0, 0.0); n_rad * n_ang];
    for i in 0..n_rad {
        for m in 0..n_ang {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n_ang {
                acc += samples[i * n_ang + j] * tw[(m * j) % n_ang].conj();
            }
            modes[i * n_ang + m] = acc * inv_n;
        }
    }

    // Radial Gauss panels: two points per inter-ring interval plus the head
    // [0, ρ_0] and tail [ρ_{N−1}, r], with bicubic interpolation of the mode
    // profiles onto the panel points.
    let panels = radial_panels(&rho, r);
    let n_pts = panels.len();
    // profile[g][m]: interpolated mode value at panel point g.
    let mut profile = vec![Complex64::new(0.0, 0.0); n_pts * n_ang];
    for (g, p) in panels.iter().enumerate() {
        for m in 0..n_ang {
            let mut acc = Complex64::new(0.0, 0.0);
            for (ring, w) in p.stencil.iter().zip(p.weights.iter()) {
                acc += modes[ring * n_ang + m] * *w;
            }
            profile[g * n_ang + m] = acc;
        }
    }

    // Per target radius, accumulate the mode coefficients of the primitive.
    let half = n_ang / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); n_rad * n_ang];
    let mut coeff = vec![Complex64::new(0.0, 0.0); n_ang];
    for i in 0..n_rad {
        let s = rho[i];
        for c in coeff.iter_mut() {
            *c = Complex64::new(0.0, 0.0);
        }
        for (g, p) in panels.iter().enumerate() {
            if p.radius < s {
                // modes μ ≤ 0: weight (ρ/s)^{1−μ}, growing power as μ drops.
                let q = p.radius / s;
                let mut pow = q;
                let wq = p.quad_weight;
                // μ = 0, −1, …, −(half−1)  ↔  m-index 0, N−1, N−2, …
                let mut m_idx = 0usize;
                for _ in 0..half {
                    coeff[m_idx] += profile[g * n_ang + m_idx] * (pow * wq);
                    pow *= q;
                    m_idx = if m_idx == 0 { n_ang - 1 } else { m_idx - 1 };
                }
            } else {
                // modes μ ≥ 1: weight −(s/ρ)^{μ−1}.
                let q = s / p.radius;
                let mut pow = 1.0;
                let wq = -p.quad_weight;
                for m_idx in 1..=half {
                    coeff[m_idx] += profile[g * n_ang + m_idx] * (pow * wq);
                    pow *= q;
                }
            }
        }
        // Synthesis: (T u)(s e^{iφ_j}) = 2 Σ_μ coeff_μ e^{i(μ−1)φ_j}.
        for j in 0..n_ang {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m_idx, c) in coeff.iter().enumerate() {
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                let mu = if m_idx <= half { m_idx as isize } else { m_idx as isize - n_ang as isize };
                let shift = (mu - 1).rem_euclid(n_ang as isize) as usize;
                acc += c * tw[(shift * j) % n_ang];
            }
            out[i * n_ang + j] = acc * 2.0;
        }
    }
    GridCoeff::from_samples(ctx, out)
}

struct Panel {
    radius: f64,
    quad_weight: f64,
    stencil: [usize; 4],
    weights: [f64; 4],
}

/// Two-point Gauss panels covering [0, r] between the radial rings, each
/// carrying the bicubic interpolation stencil for sampling ring profiles.
fn radial_panels(rho: &[f64], r: f64) -> Vec<Panel> {
    let n = rho.len();
    let gauss = [0.5 - 0.5 / 3.0f64.sqrt(), 0.5 + 0.5 / 3.0f64.sqrt()];
    let mut edges = Vec::with_capacity(n + 2);
    edges.push(0.0);
    edges.extend_from_slice(rho);
    edges.push(r);
    let mut panels = Vec::with_capacity(2 * (edges.len() - 1));
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= f64::EPSILON * r {
            continue;
        }
        for g in gauss {
            let x = a + (b - a) * g;
            // 4-ring interpolation stencil around x (clamped at the ends).
            let pos = rho.partition_point(|&v| v < x);
            let lo = pos.saturating_sub(2).min(n.saturating_sub(4));
            let mut weights = [0.0f64; 4];
            for i in 0..4 {
                let mut lw = 1.0;
                for j in 0..4 {
                    if i != j {
                        lw *= (x - rho[lo + j]) / (rho[lo + i] - rho[lo + j]);
                    }
                }
                weights[i] = lw;
            }
            panels.push(Panel {
                radius: x,
                quad_weight: (b - a) * 0.5,
                stencil: [lo, lo + 1, lo + 2, lo + 3],
                weights,
            });
        }
    }
    panels
}

fn twiddles(n: usize) -> std::sync::Arc<Vec<Complex64>> {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<Complex64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| {
            Arc::new(
                (0..n)
                    .map(|k| {
                        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64)
                    })
                    .collect(),
            )
        })
        .clone()
}

/// Direct singular quadrature of the transform (independent oracle).
fn transform_scalar_direct(f: &GridCoeff, ctx: &GridCtx, split: f64) -> Result<GridCoeff> {
    let nodes = ctx.nodes();
    let weights = ctx.area_weights();
    let r = ctx.radius;
    let n_ang = ctx.spec.n_ang;
    let fz = f.z_deriv();
    let fzb = f.dbar(1);
    let values = f.samples();
    let dz_values = fz.samples();
    let dzb_values = fzb.samples();
    let inv_pi = 1.0 / std::f64::consts::PI;

    // Precompute w_k f(ζ_k), w_k, w_k ζ_k, w_k ζ̄_k once.
    let wf: Vec<Complex64> =
        values.iter().zip(&weights).map(|(v, w)| v * *w).collect();
    let w0: Vec<f64> = weights.clone();
    let wz: Vec<Complex64> =
        nodes.iter().zip(&weights).map(|(z, w)| z * *w).collect();
    let wzb: Vec<Complex64> =
        nodes.iter().zip(&weights).map(|(z, w)| z.conj() * *w).collect();

    let out: Vec<Complex64> = (0..nodes.len())
        .into_par_iter()
        .map(|t| {
            let z = nodes[t];
            let fv = values[t];
            let dzv = dz_values[t];
            let dzbv = dzb_values[t];
            // ℓ_z(ζ) = c0 + c1 ζ + c2 ζ̄ with ℓ_z(z) = f(z), the first-order jet.
            let c0 = fv - dzv * z - dzbv * z.conj();
            let c1 = dzv;
            let c2 = dzbv;
            let delta = split * ctx.local_spacing(t / n_ang);
            let delta2 = delta * delta;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..nodes.len() {
                let d = z - nodes[k];
                let d2 = d.norm_sqr();
                if d2 <= delta2 {
                    continue; // patch: remainder integral is O(δ³)
                }
                let numer = wf[k] - c0 * w0[k] - c1 * wz[k] - c2 * wzb[k];
                // numer / d  via one real division
                acc += numer * d.conj() / d2;
            }
            // Closed-form moments of ℓ_z against the kernel over all of B_r.
            let zb = z.conj();
            let moments = fv * zb - dzv * (r * r) - dzbv * (zb * zb * 0.5);
            acc * inv_pi + moments
        })
        .collect();

    GridCoeff::from_samples(ctx, out)
}

/// Sup over the interior disk B_{0.9 r} of ‖u − ∂̄ T u‖ (top-degree u, so the
/// homotopy formula has no second term).
pub fn homotopy_residual(u: &GridForm, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    let primitive = cauchy_transform(u, r, spec)?;
    let ctx = primitive.ctx().clone();
    let recovered = primitive.dbar();
    let target = {
        let comp = resampled_component(u, &ctx)?;
        let mut t = GridForm::zero(&ctx, u.rows(), u.cols(), 1);
        t.set_component(vec![1], comp)?;
        t
    };
    let diff = recovered.sub(&target)?;
    // Interior sup: ignore the outer rings where one-sided stencils live.
    let nodes = ctx.nodes();
    let comp = diff.component(&vec![1]);
    let tables: Vec<&[Complex64]> = comp.iter().map(|c| c.samples()).collect();
    let mut sup = 0.0f64;
    let mut buf = vec![Complex64::new(0.0, 0.0); comp.len()];
    for (p, z) in nodes.iter().enumerate() {
        if z.norm() > 0.9 * r {
            continue;
        }
        for (k, t) in tables.iter().enumerate() {
            buf[k] = t[p];
        }
        sup = sup.max(crate::coeff::operator_norm(diff.rows(), diff.cols(), &buf));
    }
    Ok(sup)
}

/// Report of one operator-norm probe run.
#[derive(Clone, Debug)]
pub struct OperatorNormProbe {
    pub h: usize,
    pub sigma: f64,
    /// Max over the probe family of ‖Tu‖_{r(1−σ),h+1} / ‖u‖_{r,h}.
    pub max_ratio: f64,
    /// The reference bound C·σ^{−s(h)} for the configured C.
    pub bound: f64,
    /// Per-probe ratios, for reporting.
    pub ratios: Vec<f64>,
}

/// Probes the interior estimate ‖T u‖_{r(1−σ),h+1,μ} ≤ C σ^{−s(h)} ‖u‖_{r,h,μ}
/// on a family of monomial (0,1)-forms z^a z̄^b dz̄, a + b ≤ max_degree.
/// Diagnostic only: the ratio is reported next to the bound, never gated.
pub fn operator_norm_probe(
    h: usize,
    sigma: f64,
    r: f64,
    spec: &QuadratureSpec,
    mu: f64,
    max_degree: u32,
    constant: f64,
) -> Result<OperatorNormProbe> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::BadInput(format!("sigma must lie in (0,1), got {sigma}")));
    }
    let ctx = spec.grid_ctx(r)?;
    let weights = build_weights(&WeightContext::with_defaults(1, h + 2), h + 2)?;
    let mut ratios = Vec::new();
    for a in 0..=max_degree {
        for b in 0..=(max_degree - a) {
            let coeff = GridCoeff::from_fn(&ctx, |z| z.powu(a) * z.conj().powu(b));
            let probe = GridForm::scalar_form(&ctx, vec![1], coeff)?;
            let nu = holder_norm(&probe, &NormSpec::new(r, h, mu, 1, weights.clone())?)?;
            if nu == 0.0 {
                continue;
            }
            let prim = cauchy_transform(&probe, r, spec)?;
            let nt = holder_norm(
                &prim,
                &NormSpec::new(r * (1.0 - sigma), h + 1, mu, 0, weights.clone())?,
            )?;
            ratios.push(nt / nu);
        }
    }
    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    let bound = constant * sigma.powf(-derivative_loss_exponent(1, h));
    Ok(OperatorNormProbe { h, sigma, max_ratio, bound, ratios })
}

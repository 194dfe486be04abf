//! Scale-invariant weighted Hölder norms and the weight sequence S_k.
//!
//! For a (0,q)-form u = Σ'_I u_I dz̄_I on B_r the norm is
//!
//! ```text
//!   ‖u‖_{r,h,μ,q} = Σ_{|I|=q} Σ_{|α|≤h}  S_{|α|} · r^{|α|+q} · ‖∂^α u_I‖_{r,μ},
//!   ‖f‖_{r,μ}     = sup_{B_r} ‖f‖ + sup_{z≠ζ} r^μ ‖f(z)−f(ζ)‖ / ‖z−ζ‖^μ,
//! ```
//!
//! with α running over multi-indices in the 2n underlying real coordinates.
//! The r-powers make the norm invariant under pulling a form back to the
//! unit ball, and the weights S_k are built so that
//! S_k ≤ D_k · S_j · S_{k−j} with D_k the reciprocal of the largest binomial
//! `binom(α+β, α)` at order k, which is exactly what makes the full norm
//! submultiplicative under the wedge product.
//!
//! Sups are taken over the backend's canonical samples and the Hölder
//! seminorm over a fixed stratified subsample of point pairs (at most 10⁵),
//! so all diagnostics are deterministic and reproducible.

use num::complex::Complex64;

use crate::coeff::{operator_norm, Coeff};
use crate::error::{Error, Result};
use crate::form::MatrixForm;
use crate::grid::GridCtx;
use crate::resolution::ConnectionData;

/// Weights S_0..S_K together with the quantities that produced them.
#[derive(Clone, Debug)]
pub struct WeightSequence {
    values: Vec<f64>,
    pub provenance: WeightProvenance,
}

/// The A_k, B_k, D_k and caps used in the recursion, kept for reporting.
#[derive(Clone, Debug, Default)]
pub struct WeightProvenance {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub d: Vec<f64>,
    pub r_caps: Vec<f64>,
    pub l_caps: Vec<f64>,
}

impl WeightSequence {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn max_order(&self) -> usize {
        self.values.len() - 1
    }

    /// Largest violation of S_k ≤ D_k·S_j·S_{k−j} (0 when the invariant
    /// holds, as it does by construction).
    pub fn invariant_violation(&self, n: usize) -> f64 {
        let mut worst = 0.0f64;
        for k in 2..self.values.len() {
            let dk = binomial_reciprocal(n, k);
            for j in 1..k {
                let bound = dk * self.values[j] * self.values[k - j];
                worst = worst.max(self.values[k] - bound);
            }
        }
        worst
    }
}

/// Inputs of the weight recursion.
#[derive(Clone, Debug)]
pub struct WeightContext {
    /// Ambient complex dimension (the multi-indices live in 2n real axes).
    pub n: usize,
    /// A_k for k = 1..: summed sup data of the k-th derivatives of the
    /// cutoff analog and the resolution matrices.
    pub a_values: Vec<f64>,
    /// Caps R_k (k = 1..); +∞ for the data-independent variant.
    pub r_caps: Vec<f64>,
    /// Caps L_k (k = 1..); +∞ for the data-independent variant.
    pub l_caps: Vec<f64>,
    /// Kernel-derivative constants C(n,k) (k = 1..); they only rescale
    /// diagnostics and default to 1.
    pub c_kernel: Vec<f64>,
}

impl WeightContext {
    /// Context with unit bounds and no caps.
    pub fn with_defaults(n: usize, max_order: usize) -> Self {
        let a_values =
            (1..=max_order).map(|k| multi_index_count(2 * n, k) as f64).collect();
        WeightContext {
            n,
            a_values,
            r_caps: vec![f64::INFINITY; max_order],
            l_caps: vec![f64::INFINITY; max_order],
            c_kernel: vec![1.0; max_order],
        }
    }

    /// A_k assembled from a uniform per-derivative bound: every multi-index
    /// of order k contributes `bound_per_alpha[k−1]`.
    pub fn from_uniform_bounds(n: usize, bound_per_alpha: &[f64]) -> Self {
        let a_values = bound_per_alpha
            .iter()
            .enumerate()
            .map(|(i, b)| multi_index_count(2 * n, i + 1) as f64 * b.max(0.0))
            .collect();
        WeightContext {
            n,
            a_values,
            r_caps: vec![f64::INFINITY; bound_per_alpha.len()],
            l_caps: vec![f64::INFINITY; bound_per_alpha.len()],
            c_kernel: vec![1.0; bound_per_alpha.len()],
        }
    }

    fn get(v: &[f64], k: usize, default: f64) -> f64 {
        v.get(k - 1).copied().unwrap_or(default)
    }
}

/// Number of multi-indices of order exactly `k` in `d` variables.
pub fn multi_index_count(d: usize, k: usize) -> usize {
    // binom(k + d − 1, d − 1)
    let mut num = 1usize;
    let mut den = 1usize;
    for i in 0..d - 1 {
        num *= k + d - 1 - i;
        den *= i + 1;
    }
    num / den
}

/// D_k⁻¹ = max over |α+β| = k (multi-indices in 2n real variables) of
/// binom(α+β, α), found by enumerating the compositions of k.
pub fn binomial_reciprocal(n: usize, k: usize) -> f64 {
    let d = 2 * n;
    let mut best = 1.0f64;
    let mut gamma = vec![0usize; d];
    fn rec(i: usize, left: usize, gamma: &mut [usize], best: &mut f64) {
        if i == gamma.len() - 1 {
            gamma[i] = left;
            let mut prod = 1.0;
            for &g in gamma.iter() {
                prod *= central_binomial(g);
            }
            *best = best.max(prod);
            return;
        }
        for v in 0..=left {
            gamma[i] = v;
            rec(i + 1, left - v, gamma, best);
        }
    }
    rec(0, k, &mut gamma, &mut best);
    1.0 / best
}

fn central_binomial(g: usize) -> f64 {
    // max_j binom(g, j) = binom(g, ⌊g/2⌋)
    let j = g / 2;
    let mut v = 1.0f64;
    for i in 0..j {
        v = v * (g - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Evaluates the weight recursion
/// S_0 = 1, S_1 = B_1, S_k = min{2^{−k} B_k, R_k, L_k, D_k·min_j S_j S_{k−j}}
/// with B_k = max{A_k, C(n,k)}^{−1} (1 when that max vanishes).
pub fn build_weights(ctx: &WeightContext, max_order: usize) -> Result<WeightSequence> {
    for (name, caps) in [("R", &ctx.r_caps), ("L", &ctx.l_caps)] {
        if caps.iter().any(|&c| !(c > 0.0)) {
            return Err(Error::BadInput(format!("{name}-caps must be positive")));
        }
    }
    let mut values = vec![1.0f64];
    let mut prov = WeightProvenance::default();
    for k in 1..=max_order {
        let a_k = WeightContext::get(&ctx.a_values, k, 0.0);
        let c_k = WeightContext::get(&ctx.c_kernel, k, 1.0);
        let base = a_k.max(c_k);
        let b_k = if base != 0.0 { 1.0 / base } else { 1.0 };
        let d_k = binomial_reciprocal(ctx.n, k);
        let s_k = if k == 1 {
            b_k
        } else {
            let convolution = (1..k)
                .map(|j| values[j] * values[k - j])
                .fold(f64::INFINITY, f64::min);
            (0.5f64.powi(k as i32) * b_k)
                .min(WeightContext::get(&ctx.r_caps, k, f64::INFINITY))
                .min(WeightContext::get(&ctx.l_caps, k, f64::INFINITY))
                .min(d_k * convolution)
        };
        prov.a.push(a_k);
        prov.b.push(b_k);
        prov.d.push(d_k);
        prov.r_caps.push(WeightContext::get(&ctx.r_caps, k, f64::INFINITY));
        prov.l_caps.push(WeightContext::get(&ctx.l_caps, k, f64::INFINITY));
        values.push(s_k);
    }
    Ok(WeightSequence { values, provenance: prov })
}

/// Parameters of one norm evaluation.
#[derive(Clone, Debug)]
pub struct NormSpec {
    pub r: f64,
    pub h: usize,
    pub mu: f64,
    pub degree: usize,
    pub weights: WeightSequence,
}

impl NormSpec {
    pub fn new(r: f64, h: usize, mu: f64, degree: usize, weights: WeightSequence) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::BadInput(format!("mu must lie in (0,1), got {mu}")));
        }
        if h > weights.max_order() {
            return Err(Error::BadInput(format!(
                "norm order {h} exceeds the weight sequence (max {})",
                weights.max_order()
            )));
        }
        if !(r > 0.0) {
            return Err(Error::BadInput(format!("radius must be positive, got {r}")));
        }
        Ok(NormSpec { r, h, mu, degree, weights })
    }
}

/// Sample points and values of a coefficient at a requested radius.
///
/// The series backend scales its probe lattice; the grid backend uses its
/// own nodes, interpolating when a strictly smaller radius is requested.
fn samples_at_radius<F: Coeff>(f: &F, r: f64) -> Result<(Vec<Vec<Complex64>>, Vec<Complex64>)> {
    let native = F::sample_points(f.ctx());
    if native.is_empty() {
        return Ok((vec![], vec![]));
    }
    let native_radius = F::domain_radius(f.ctx());
    if (r - native_radius).abs() / native_radius <= 1e-9 {
        return Ok((native, f.sample_values()));
    }
    let scale = r / native_radius;
    if scale > 1.0 + 1e-9 {
        return Err(Error::OutOfDomain(format!(
            "norm radius {r} exceeds the coefficient domain radius {native_radius}"
        )));
    }
    let mut points = Vec::with_capacity(native.len());
    let mut values = Vec::with_capacity(native.len());
    for p in &native {
        let q: Vec<Complex64> = p.iter().map(|z| z * scale).collect();
        values.push(f.eval(&q)?);
        points.push(q);
    }
    Ok((points, values))
}

/// Deterministic stratified pair subsample of `len` points, at most ~10⁵.
fn pair_subsample(len: usize) -> Vec<(usize, usize)> {
    if len < 2 {
        return vec![];
    }
    let mut strides = vec![1usize, 7, 41, 239, len / 3 + 1, len / 2 + 1];
    strides.retain(|&s| s % len != 0);
    strides.dedup();
    let budget = 100_000usize;
    let step = (len * strides.len()).div_ceil(budget).max(1);
    let mut out = Vec::new();
    for &s in &strides {
        let mut i = 0usize;
        while i < len {
            out.push((i, (i + s) % len));
            i += step;
        }
    }
    out
}

/// ‖f‖_{r,μ} for one matrix of coefficients: pointwise operator-norm sup
/// plus the r^μ-weighted Hölder seminorm over the pair subsample.
fn matrix_holder_norm(
    rows: usize,
    cols: usize,
    points: &[Vec<Complex64>],
    tables: &[Vec<Complex64>],
    r: f64,
    mu: f64,
) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let npts = points.len();
    let mut point_buf = vec![Complex64::new(0.0, 0.0); tables.len()];
    let mut sup = 0.0f64;
    for p in 0..npts {
        for (k, t) in tables.iter().enumerate() {
            point_buf[k] = t[p];
        }
        sup = sup.max(operator_norm(rows, cols, &point_buf));
    }
    let mut semi = 0.0f64;
    let mut diff_buf = vec![Complex64::new(0.0, 0.0); tables.len()];
    for (i, j) in pair_subsample(npts) {
        let dist2: f64 =
            points[i].iter().zip(&points[j]).map(|(a, b)| (a - b).norm_sqr()).sum();
        if dist2 <= 1e-30 {
            continue;
        }
        for (k, t) in tables.iter().enumerate() {
            diff_buf[k] = t[i] - t[j];
        }
        let num = operator_norm(rows, cols, &diff_buf);
        semi = semi.max(num / dist2.sqrt().powf(mu));
    }
    sup + r.powf(mu) * semi
}

/// All multi-indices over `d` axes of order ≤ h, in deterministic order.
fn multi_indices_upto(d: usize, h: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0; d]];
    for order in 1..=h {
        let mut level = Vec::new();
        fn rec(i: usize, left: usize, alpha: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if i + 1 == alpha.len() {
                alpha[i] = left;
                out.push(alpha.clone());
                return;
            }
            for v in 0..=left {
                alpha[i] = v;
                rec(i + 1, left - v, alpha, out);
            }
        }
        rec(0, order, &mut vec![0; d], &mut level);
        out.extend(level);
    }
    out
}

/// The weighted Hölder norm of a matrix form.
pub fn holder_norm<F: Coeff>(u: &MatrixForm<F>, spec: &NormSpec) -> Result<f64> {
    if spec.degree != u.degree() {
        return Err(Error::DegreeMismatch(format!(
            "norm spec is for degree {}, form has degree {}",
            spec.degree,
            u.degree()
        )));
    }
    let n = u.ambient();
    let d = 2 * n;
    if let Some(cap) = F::derivative_order_cap() {
        if spec.h > cap {
            return Err(Error::Unsupported(format!(
                "this backend estimates derivatives up to order {cap} only, norm order {} requested",
                spec.h
            )));
        }
    }
    let mut total = 0.0f64;
    for (_, matrix) in u.components() {
        for alpha in multi_indices_upto(d, spec.h) {
            let order: usize = alpha.iter().sum();
            // ∂^α of every entry, axes applied in ascending order.
            let mut derived: Vec<F> = matrix.to_vec();
            for (axis, &count) in alpha.iter().enumerate() {
                for _ in 0..count {
                    for e in derived.iter_mut() {
                        *e = e.real_deriv(axis);
                    }
                }
            }
            let mut points = None;
            let mut tables = Vec::with_capacity(derived.len());
            for e in &derived {
                let (pts, vals) = samples_at_radius(e, spec.r)?;
                if points.is_none() {
                    points = Some(pts);
                }
                tables.push(vals);
            }
            let points = points.unwrap_or_default();
            let base = matrix_holder_norm(u.rows(), u.cols(), &points, &tables, spec.r, spec.mu);
            total += spec.weights.get(order)
                * spec.r.powi((order + u.degree()) as i32)
                * base;
        }
    }
    Ok(total)
}

/// max over the k ≥ 0 entries of the weighted Hölder norm — the contraction
/// diagnostic of the iteration.
pub fn diag_a<F: Coeff>(
    data: &ConnectionData<F>,
    r: f64,
    h: usize,
    mu: f64,
    weights: &WeightSequence,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for (s, k) in data.index_range() {
        if k < 0 {
            continue;
        }
        let entry = data.entry(s as i64, k);
        let spec = NormSpec::new(r, h, mu, entry.degree(), weights.clone())?;
        worst = worst.max(holder_norm(&entry, &spec)?);
    }
    Ok(worst)
}

/// max over the k = −1 entries (the resolution matrices) of the norm taken
/// with the data-independent weight variant S(ω) (caps at +∞), at the data's
/// own radius.
pub fn diag_c<F: Coeff>(data: &ConnectionData<F>, r: f64, h: usize, mu: f64) -> Result<f64> {
    let n = F::ambient(data.ctx());
    let bounds = derivative_bounds(data, h + 1)?;
    let ctx = WeightContext::from_uniform_bounds(n, &bounds);
    let weights = build_weights(&ctx, h.max(1))?;
    let mut worst = 0.0f64;
    for s in 1..=data.resolution_length() {
        let entry = data.entry(s as i64, -1);
        let spec = NormSpec::new(r, h, mu, 0, weights.clone())?;
        worst = worst.max(holder_norm(&entry, &spec)?);
    }
    Ok(worst)
}

/// Per-order sup bounds max{1, ‖∂^α φ_s‖∞} feeding A_k, estimated from the
/// resolution matrices (the cutoff analog contributes the constant 1).
pub fn derivative_bounds<F: Coeff>(data: &ConnectionData<F>, orders: usize) -> Result<Vec<f64>> {
    let n = F::ambient(data.ctx());
    let d = 2 * n;
    let cap = F::derivative_order_cap().unwrap_or(usize::MAX);
    let mut out = Vec::with_capacity(orders);
    let mut last = 1.0f64;
    for k in 1..=orders {
        if k > cap {
            // Beyond the backend's estimable order: reuse the last bound.
            out.push(last);
            continue;
        }
        let mut bound = 1.0f64; // cutoff-analog contribution
        for s in 1..=data.resolution_length() {
            let entry = data.entry(s as i64, -1);
            for alpha in multi_indices_upto(d, k) {
                if alpha.iter().sum::<usize>() != k {
                    continue;
                }
                for (_, matrix) in entry.components() {
                    let mut derived: Vec<F> = matrix.to_vec();
                    for (axis, &count) in alpha.iter().enumerate() {
                        for _ in 0..count {
                            for e in derived.iter_mut() {
                                *e = e.real_deriv(axis);
                            }
                        }
                    }
                    for e in &derived {
                        bound = bound.max(e.sample_values().iter().map(|v| v.norm()).fold(0.0, f64::max));
                    }
                }
            }
        }
        out.push(bound);
        last = bound;
    }
    Ok(out)
}

/// Derivative-loss exponent of the interior estimate for the homotopy
/// operator: s(h) = 2n + h + 2 (treated as configuration; it only scales
/// diagnostics, never correctness).
pub fn derivative_loss_exponent(n: usize, h: usize) -> f64 {
    (2 * n + h + 2) as f64
}

/// Grid-specific convenience: weights suitable for monitoring a solve on the
/// given grid, caps included.
pub fn solver_weights(
    data: &ConnectionData<crate::grid::GridCoeff>,
    _grid: &GridCtx,
    max_order: usize,
    r_caps: Vec<f64>,
    l_caps: Vec<f64>,
) -> Result<WeightSequence> {
    let bounds = derivative_bounds(data, max_order)?;
    let mut ctx = WeightContext::from_uniform_bounds(1, &bounds);
    ctx.r_caps = r_caps;
    ctx.l_caps = l_caps;
    build_weights(&ctx, max_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::crat;
    use crate::form::MatrixForm;
    use crate::series::{SeriesCoeff, SeriesCtx};

    type SForm = MatrixForm<SeriesCoeff>;

    fn sctx(n: usize) -> SeriesCtx {
        SeriesCtx { n }
    }

    fn default_weights(n: usize, k: usize) -> WeightSequence {
        build_weights(&WeightContext::with_defaults(n, k), k).unwrap()
    }

    #[test]
    fn d2_in_one_complex_variable_is_one_half() {
        assert_eq!(binomial_reciprocal(1, 2), 0.5);
    }

    #[test]
    fn weight_invariant_holds_up_to_order_ten() {
        let w = build_weights(&WeightContext::with_defaults(2, 10), 10).unwrap();
        assert_eq!(w.get(0), 1.0);
        assert!(w.invariant_violation(2) <= 0.0);
    }

    #[test]
    fn degenerate_caps_reduce_to_two_term_min() {
        // Huge A_k, caps at +∞: S_k = min(2^{−k}B_k, D_k min_j S_j S_{k−j}).
        let mut ctx = WeightContext::with_defaults(1, 6);
        for a in ctx.a_values.iter_mut() {
            *a = 1e9;
        }
        let w = build_weights(&ctx, 6).unwrap();
        for k in 2..=6 {
            let b_k = 1.0 / 1e9;
            let conv = (1..k).map(|j| w.get(j) * w.get(k - j)).fold(f64::INFINITY, f64::min);
            let expect = (0.5f64.powi(k as i32) * b_k).min(binomial_reciprocal(1, k) * conv);
            assert_eq!(w.get(k), expect);
        }
    }

    #[test]
    fn weights_shrink_when_inputs_grow() {
        let small = build_weights(&WeightContext::from_uniform_bounds(1, &[1.0; 6]), 6).unwrap();
        let large = build_weights(&WeightContext::from_uniform_bounds(1, &[50.0; 6]), 6).unwrap();
        for k in 1..=6 {
            assert!(large.get(k) <= small.get(k));
        }
    }

    #[test]
    fn non_positive_caps_are_rejected(){
        let mut ctx = WeightContext::with_defaults(1, 3);
        ctx.r_caps[1] = 0.0;
        assert!(build_weights(&ctx, 3).is_err());
    }

    #[test]
    fn norm_of_zero_and_constants() {
        let ctx = sctx(1);
        let w = default_weights(1, 2);
        let zero = SForm::zero(&ctx, 2, 2, 0);
        let spec = NormSpec::new(0.8, 1, 0.5, 0, w.clone()).unwrap();
        assert_eq!(holder_norm(&zero, &spec).unwrap(), 0.0);
        // constant c at h = 0, q = 0: exactly |c| (seminorm vanishes).
        let c = SForm::from_matrix(&ctx, 1, 1, vec![SeriesCoeff::constant(&ctx, &crat(-3, 4))])
            .unwrap();
        let spec0 = NormSpec::new(0.8, 0, 0.5, 0, w).unwrap();
        let v = holder_norm(&c, &spec0).unwrap();
        assert!((v - 5.0).abs() < 1e-12);
    }

    #[test]
    fn norm_is_scale_invariant_under_pullback() {
        // u = z̄ dz̄ on B_r versus its pullback r² w̄ dw̄ on B_1.
        let ctx = sctx(1);
        let w = default_weights(1, 2);
        let r = 0.37;
        let u = SForm::scalar_form(
            &ctx,
            vec![1],
            SeriesCoeff::monomial(&ctx, crat(1, 0), &[0], &[1], 8),
        )
        .unwrap();
        let pulled = SForm::scalar_form(
            &ctx,
            vec![1],
            SeriesCoeff::monomial(
                &ctx,
                num::complex::Complex::new(
                    num::BigRational::new(37i64.pow(2).into(), 100i64.pow(2).into()),
                    num::BigRational::from_integer(0.into()),
                ),
                &[0],
                &[1],
                8,
            ),
        )
        .unwrap();
        for h in 0..=2 {
            let at_r = holder_norm(&u, &NormSpec::new(r, h, 0.5, 1, w.clone()).unwrap()).unwrap();
            let at_1 =
                holder_norm(&pulled, &NormSpec::new(1.0, h, 0.5, 1, w.clone()).unwrap()).unwrap();
            assert!(
                (at_r - at_1).abs() <= 1e-12 * at_1.max(1.0),
                "h = {h}: {at_r} vs {at_1}"
            );
        }
    }

    #[test]
    fn norm_is_submultiplicative_on_series_probes() {
        let mut rng = crate::testgen::rng(17);
        let ctx = sctx(2);
        let w = default_weights(2, 3);
        for _ in 0..25 {
            let a = crate::testgen::random_series(&mut rng, &ctx, 5, false, true);
            let b = crate::testgen::random_series(&mut rng, &ctx, 5, false, true);
            let u = SForm::scalar_form(&ctx, vec![1], a).unwrap();
            let v = SForm::scalar_form(&ctx, vec![2], b).unwrap();
            let uv = u.wedge(&v).unwrap();
            for h in 0..=1 {
                let nu =
                    holder_norm(&u, &NormSpec::new(0.9, h, 0.5, 1, w.clone()).unwrap()).unwrap();
                let nv =
                    holder_norm(&v, &NormSpec::new(0.9, h, 0.5, 1, w.clone()).unwrap()).unwrap();
                let nuv =
                    holder_norm(&uv, &NormSpec::new(0.9, h, 0.5, 2, w.clone()).unwrap()).unwrap();
                assert!(
                    nuv <= nu * nv * (1.0 + 1e-12),
                    "h = {h}: ‖uv‖ = {nuv} > {nu} · {nv}"
                );
            }
        }
    }

    #[test]
    fn diag_a_vanishes_for_zero_blocks_and_scales_with_radius() {
        let ctx = sctx(1);
        let w = default_weights(1, 2);
        let mut data =
            crate::resolution::ConnectionData::<SeriesCoeff>::zero(&ctx, vec![1]).unwrap();
        assert_eq!(diag_a(&data, 0.5, 0, 0.5, &w).unwrap(), 0.0);
        // a_0 with a q = 1 entry shrinks with the radius (r^{q} damping).
        let u = SForm::scalar_form(
            &ctx,
            vec![1],
            SeriesCoeff::monomial(&ctx, crat(1, 0), &[0], &[1], 6),
        )
        .unwrap();
        data.set_entry(0, 0, u).unwrap();
        let big = diag_a(&data, 0.8, 0, 0.5, &w).unwrap();
        let small = diag_a(&data, 0.1, 0, 0.5, &w).unwrap();
        assert!(small < big * 0.2, "{small} vs {big}");
    }

    #[test]
    fn diag_c_is_zero_for_length_zero_resolutions() {
        let ctx = sctx(1);
        let data = crate::resolution::ConnectionData::<SeriesCoeff>::zero(&ctx, vec![3]).unwrap();
        assert_eq!(diag_c(&data, 1.0, 1, 0.5).unwrap(), 0.0);
    }
}

//! Connection data and gauge parameters attached to a finite resolution.
//!
//! A length-m resolution with free ranks p_0..p_m carries an indexed family
//! of matrix forms `entry(s, k)` of shape p_{s+k} × p_s and degree k+1, where
//! `entry(s, −1)` is the (degree-0) resolution matrix φ_s.  Out-of-range
//! indices read as zero forms of the correct (possibly zero-dimensional)
//! shape, which makes every displayed summation total without explicit
//! padding.
//!
//! The integrability checker evaluates, for every admissible (s, k),
//!
//! ```text
//!   ∂̄ ω^{s,k} + Σ_{j=−1}^{k+1} (−1)^{k−j} ω^{s+j,k−j} ∧ ω^{s,j}
//! ```
//!
//! whose k = −1 instance is the intertwining relation
//! ∂̄φ_s + ω^{s−1,0}·φ_s − φ_s·ω^{s,0} in residual form.

use std::collections::BTreeMap;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::form::MatrixForm;

/// The indexed family ω = (ω^{s,k}) of connection data on a resolution.
#[derive(Clone, Debug)]
pub struct ConnectionData<F: Coeff> {
    ctx: F::Ctx,
    m: usize,
    sizes: Vec<usize>,
    entries: BTreeMap<(usize, i64), MatrixForm<F>>,
}

/// The indexed family η = (η^{s,k}) of a gauge (recalibration) parameter;
/// entry (s, k) has degree k and shape p_{s+k} × p_s, with I + η^{s,0}
/// invertible.
#[derive(Clone, Debug)]
pub struct GaugeParam<F: Coeff> {
    ctx: F::Ctx,
    m: usize,
    sizes: Vec<usize>,
    entries: BTreeMap<(usize, i64), MatrixForm<F>>,
}

/// Connection data plus the optional augmentation row ψ (shape p_aug × p_0,
/// degree 0), used to report the holomorphy residual of ψ·g_0 after a solve.
#[derive(Clone, Debug)]
pub struct AugmentedData<F: Coeff> {
    pub conn: ConnectionData<F>,
    pub psi: Option<MatrixForm<F>>,
}

fn virtual_size(sizes: &[usize], idx: i64) -> usize {
    if idx >= 0 && (idx as usize) < sizes.len() {
        sizes[idx as usize]
    } else {
        0
    }
}

impl<F: Coeff> ConnectionData<F> {
    /// Empty (all-zero) connection data for ranks `sizes = [p_0..p_m]`.
    pub fn zero(ctx: &F::Ctx, sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::BadInput("need at least p_0".into()));
        }
        Ok(ConnectionData { ctx: ctx.clone(), m: sizes.len() - 1, sizes, entries: BTreeMap::new() })
    }

    pub fn ctx(&self) -> &F::Ctx {
        &self.ctx
    }

    pub fn resolution_length(&self) -> usize {
        self.m
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Shape of entry (s, k) with zero-dimensional out-of-range ranks.
    pub fn shape(&self, s: i64, k: i64) -> (usize, usize) {
        (virtual_size(&self.sizes, s + k), virtual_size(&self.sizes, s))
    }

    /// True when (s, k) indexes a stored slot: s = 0..m, k = −1..m−s,
    /// excluding (0, −1).
    pub fn admissible(&self, s: i64, k: i64) -> bool {
        s >= 0 && s <= self.m as i64 && k >= -1 && k <= self.m as i64 - s && (s, k) != (0, -1)
    }

    /// All admissible (s, k) pairs in deterministic order.
    pub fn index_range(&self) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        for s in 0..=self.m {
            for k in -1..=(self.m - s) as i64 {
                if (s, k) != (0, -1) {
                    out.push((s, k));
                }
            }
        }
        out
    }

    pub fn set_entry(&mut self, s: usize, k: i64, form: MatrixForm<F>) -> Result<()> {
        if !self.admissible(s as i64, k) {
            return Err(Error::BadInput(format!(
                "entry ({s},{k}) is not admissible for resolution length {}",
                self.m
            )));
        }
        let (rows, cols) = self.shape(s as i64, k);
        let degree = (k + 1) as usize;
        if form.rows() != rows || form.cols() != cols || form.degree() != degree {
            return Err(Error::ShapeMismatch(format!(
                "entry ({s},{k}) must be {rows}x{cols} of degree {degree}, got {}x{} of degree {}",
                form.rows(),
                form.cols(),
                form.degree()
            )));
        }
        if form.ctx() != &self.ctx {
            return Err(Error::BackendMismatch(format!("entry ({s},{k})")));
        }
        self.entries.insert((s, k), form);
        Ok(())
    }

    /// Total accessor: out-of-range indices give the zero form of the
    /// conventionally correct shape and degree.
    pub fn entry(&self, s: i64, k: i64) -> MatrixForm<F> {
        assert!(k >= -1, "connection entries start at k = -1");
        if s >= 0 && self.entries.contains_key(&(s as usize, k)) {
            return self.entries[&(s as usize, k)].clone();
        }
        let (rows, cols) = self.shape(s, k);
        MatrixForm::zero(&self.ctx, rows, cols, (k + 1) as usize)
    }

    pub fn stored_entries(&self) -> &BTreeMap<(usize, i64), MatrixForm<F>> {
        &self.entries
    }

    /// The integrability defect of relation ∂̄ω + Σ ± ω∧ω per entry.
    pub fn integrability_residual(&self) -> BTreeMap<(usize, i64), f64> {
        self.index_range()
            .into_iter()
            .map(|(s, k)| ((s, k), self.integrability_defect(s as i64, k).sup_norm()))
            .collect()
    }

    /// The defect form of the (s, k) integrability relation.
    pub fn integrability_defect(&self, s: i64, k: i64) -> MatrixForm<F> {
        let mut acc = self.entry(s, k).dbar();
        for j in -1..=(k + 1) {
            let term = self
                .entry(s + j, k - j)
                .wedge(&self.entry(s, j))
                .expect("index conventions make all summands compatible");
            let signed = if (k - j).rem_euclid(2) == 1 { term.neg() } else { term };
            acc = acc.add(&signed).expect("summands share one shape");
        }
        acc
    }

    /// Sup norms of the composites φ_{s−1}·φ_s (empty for m ≤ 1).
    pub fn complex_residual(&self) -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for s in 2..=self.m {
            let comp = self
                .entry(s as i64 - 1, -1)
                .wedge(&self.entry(s as i64, -1))
                .expect("composite shapes chain");
            out.insert(s, comp.sup_norm());
        }
        out
    }

    /// Largest integrability residual over all entries.
    pub fn max_residual(&self) -> f64 {
        self.integrability_residual().values().cloned().fold(0.0, f64::max)
    }
}

/// Wraps a square degree-1 form A as length-0 connection data, whose single
/// integrability relation is ∂̄A + A ∧ A = 0.
pub fn make_grothendieck<F: Coeff>(a: MatrixForm<F>) -> Result<ConnectionData<F>> {
    if a.rows() != a.cols() {
        return Err(Error::ShapeMismatch(format!(
            "connection form must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.degree() != 1 {
        return Err(Error::DegreeMismatch(format!(
            "connection form must have degree 1, got {}",
            a.degree()
        )));
    }
    let mut data = ConnectionData::zero(a.ctx(), vec![a.rows()])?;
    data.set_entry(0, 0, a)?;
    Ok(data)
}

impl<F: Coeff> GaugeParam<F> {
    /// The neutral (zero) parameter.
    pub fn zero(ctx: &F::Ctx, sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::BadInput("need at least p_0".into()));
        }
        Ok(GaugeParam { ctx: ctx.clone(), m: sizes.len() - 1, sizes, entries: BTreeMap::new() })
    }

    pub fn ctx(&self) -> &F::Ctx {
        &self.ctx
    }

    pub fn resolution_length(&self) -> usize {
        self.m
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn shape(&self, s: i64, k: i64) -> (usize, usize) {
        (virtual_size(&self.sizes, s + k), virtual_size(&self.sizes, s))
    }

    pub fn admissible(&self, s: i64, k: i64) -> bool {
        s >= 0 && s <= self.m as i64 && k >= 0 && k <= self.m as i64 - s
    }

    pub fn index_range(&self) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        for s in 0..=self.m {
            for k in 0..=(self.m - s) as i64 {
                out.push((s, k));
            }
        }
        out
    }

    pub fn set_entry(&mut self, s: usize, k: i64, form: MatrixForm<F>) -> Result<()> {
        if !self.admissible(s as i64, k) {
            return Err(Error::BadInput(format!(
                "parameter entry ({s},{k}) is not admissible for resolution length {}",
                self.m
            )));
        }
        let (rows, cols) = self.shape(s as i64, k);
        if form.rows() != rows || form.cols() != cols || form.degree() != k as usize {
            return Err(Error::ShapeMismatch(format!(
                "parameter entry ({s},{k}) must be {rows}x{cols} of degree {k}, got {}x{} of degree {}",
                form.rows(),
                form.cols(),
                form.degree()
            )));
        }
        if form.ctx() != &self.ctx {
            return Err(Error::BackendMismatch(format!("parameter entry ({s},{k})")));
        }
        self.entries.insert((s, k), form);
        Ok(())
    }

    /// Total accessor with the conventions η^{s,k} = 0 outside
    /// 0 ≤ s ≤ m, 0 ≤ k ≤ m−s.
    pub fn entry(&self, s: i64, k: i64) -> MatrixForm<F> {
        if s >= 0 && k >= 0 && self.entries.contains_key(&(s as usize, k)) {
            return self.entries[&(s as usize, k)].clone();
        }
        let (rows, cols) = self.shape(s, k);
        MatrixForm::zero(&self.ctx, rows, cols, k.max(0) as usize)
    }

    pub fn stored_entries(&self) -> &BTreeMap<(usize, i64), MatrixForm<F>> {
        &self.entries
    }

    /// The gauge matrices g_s = I + η^{s,0}.
    pub fn gauges(&self) -> Vec<MatrixForm<F>> {
        (0..=self.m)
            .map(|s| {
                MatrixForm::identity(&self.ctx, self.sizes[s])
                    .add(&self.entry(s as i64, 0))
                    .expect("gauge shapes agree")
            })
            .collect()
    }

    /// Truncation η_[t]: zeroes every component of index k < t.
    pub fn truncate_below(&self, t: i64) -> Self {
        let mut out = self.clone();
        out.entries.retain(|&(_, k), _| k >= t);
        out
    }

    /// Largest sup norm of the degree-0 components (the unit-gate quantity).
    pub fn gauge_block_sup(&self) -> f64 {
        (0..=self.m as i64)
            .map(|s| self.entry(s, 0).sup_norm())
            .fold(0.0, f64::max)
    }
}

impl<F: Coeff> AugmentedData<F> {
    pub fn new(conn: ConnectionData<F>, psi: Option<MatrixForm<F>>) -> Result<Self> {
        if let Some(p) = &psi {
            if p.cols() != conn.sizes()[0] || p.degree() != 0 {
                return Err(Error::ShapeMismatch(format!(
                    "psi must be a degree-0 matrix with {} columns, got {}x{} of degree {}",
                    conn.sizes()[0],
                    p.rows(),
                    p.cols(),
                    p.degree()
                )));
            }
            if p.ctx() != conn.ctx() {
                return Err(Error::BackendMismatch("psi".into()));
            }
        }
        Ok(AugmentedData { conn, psi })
    }
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

    fn mono(ctx: &SeriesCtx, z: &[u32], zb: &[u32]) -> SeriesCoeff {
        SeriesCoeff::monomial(ctx, crat(1, 0), z, zb, 8)
    }

    #[test]
    fn grothendieck_n1_residual_vanishes_by_degree() {
        // Any scalar connection form in n = 1: every (0,2)-form is zero.
        let ctx = sctx(1);
        let a = SForm::scalar_form(&ctx, vec![1], mono(&ctx, &[1], &[1])).unwrap();
        let data = make_grothendieck(a).unwrap();
        assert_eq!(data.max_residual(), 0.0);
    }

    #[test]
    fn grothendieck_n2_nonintegrable_example() {
        // ω = z̄₂ dz̄₁:  ∂̄ω = −dz̄₁∧dz̄₂ ≠ 0 while ω∧ω = 0.
        let ctx = sctx(2);
        let a = SForm::scalar_form(&ctx, vec![1], mono(&ctx, &[0, 0], &[0, 1])).unwrap();
        let data = make_grothendieck(a).unwrap();
        let res = data.integrability_residual();
        assert!(res[&(0, 0)] > 0.5);
    }

    #[test]
    fn grothendieck_n2_integrable_example() {
        // ω = z₁ dz̄₁ is ∂̄-closed and its scalar wedge square vanishes.
        let ctx = sctx(2);
        let a = SForm::scalar_form(&ctx, vec![1], mono(&ctx, &[1, 0], &[0, 0])).unwrap();
        let data = make_grothendieck(a).unwrap();
        assert_eq!(data.max_residual(), 0.0);
    }

    #[test]
    fn grothendieck_dbar_potential_identity_matrix() {
        // A = (∂̄φ)·I for a scalar series φ in n = 2 is integrable up to
        // accuracy: ∂̄A = 0 and A ∧ A = 0 because the scalar factors commute.
        let ctx = sctx(2);
        let phi = mono(&ctx, &[1, 0], &[1, 1]); // z₁ z̄₁ z̄₂
        let dphi = SForm::scalar_form(&ctx, vec![], phi).unwrap().dbar();
        let mut a = SForm::zero(&ctx, 2, 2, 1);
        for (idx, m) in dphi.components() {
            let c = m[0].clone();
            a.set_component(
                idx.clone(),
                vec![c.clone(), SeriesCoeff::zero(&ctx), SeriesCoeff::zero(&ctx), c.clone()],
            )
            .unwrap();
        }
        let data = make_grothendieck(a).unwrap();
        assert_eq!(data.max_residual(), 0.0);
    }

    #[test]
    fn koszul_complex_residual_vanishes() {
        // Two-term Koszul complex of the ideal (z₁) in n = 2:
        // φ₁ = (z₁  u), φ₂ = (u, −z₁)ᵀ  ⇒  φ₁ φ₂ = 0.
        let ctx = sctx(2);
        let z1 = mono(&ctx, &[1, 0], &[0, 0]);
        let u = mono(&ctx, &[0, 1], &[0, 0]);
        let mut data = ConnectionData::<SeriesCoeff>::zero(&ctx, vec![1, 2, 1]).unwrap();
        let phi1 = SForm::from_matrix(&ctx, 1, 2, vec![z1.clone(), u.clone()]).unwrap();
        let phi2 = SForm::from_matrix(&ctx, 2, 1, vec![u.clone(), z1.neg()]).unwrap();
        data.set_entry(1, -1, phi1).unwrap();
        data.set_entry(2, -1, phi2).unwrap();
        let res = data.complex_residual();
        assert_eq!(res.len(), 1);
        assert_eq!(res[&2], 0.0);

        // A generic non-complex pair leaves a positive residual.
        let bad = SForm::from_matrix(&ctx, 2, 1, vec![SeriesCoeff::one(&ctx), z1.clone()]).unwrap();
        let mut data2 = data.clone();
        data2.set_entry(2, -1, bad).unwrap();
        assert!(data2.complex_residual()[&2] > 0.5);
    }

    #[test]
    fn short_resolutions_have_no_composite() {
        let ctx = sctx(1);
        let data = ConnectionData::<SeriesCoeff>::zero(&ctx, vec![2, 1]).unwrap();
        assert!(data.complex_residual().is_empty());
    }

    #[test]
    fn out_of_range_entries_are_zero_with_conventional_shapes() {
        let ctx = sctx(1);
        let data = ConnectionData::<SeriesCoeff>::zero(&ctx, vec![2, 3]).unwrap();
        let e = data.entry(5, -1);
        assert!(e.is_zero());
        assert_eq!((e.rows(), e.cols()), (0, 0));
        let e = data.entry(1, -1);
        assert_eq!((e.rows(), e.cols()), (2, 3));
        let p = GaugeParam::<SeriesCoeff>::zero(&ctx, vec![2, 3]).unwrap();
        assert_eq!((p.entry(-1, 1).rows(), p.entry(-1, 1).cols()), (2, 0));
        assert!(p.entry(0, 5).is_zero());
    }

    #[test]
    fn gauges_are_identity_plus_block() {
        let ctx = sctx(1);
        let mut p = GaugeParam::<SeriesCoeff>::zero(&ctx, vec![2]).unwrap();
        let zb = mono(&ctx, &[0], &[1]);
        let mut block = SForm::zero(&ctx, 2, 2, 0);
        block
            .set_component(
                vec![],
                vec![zb.clone(), SeriesCoeff::zero(&ctx), SeriesCoeff::zero(&ctx), SeriesCoeff::zero(&ctx)],
            )
            .unwrap();
        p.set_entry(0, 0, block).unwrap();
        let g = p.gauges();
        assert_eq!(g.len(), 1);
        // g_0 = I + z̄ E₁₁
        let e = g[0].component(&vec![]);
        assert!(e[0].eq_up_to_acc(&SeriesCoeff::one(&ctx).add(&zb)));
        assert!(e[3].eq_up_to_acc(&SeriesCoeff::one(&ctx)));
    }

    #[test]
    fn psi_shape_is_validated() {
        let ctx = sctx(1);
        let conn = ConnectionData::<SeriesCoeff>::zero(&ctx, vec![2]).unwrap();
        let good = SForm::zero(&ctx, 1, 2, 0);
        assert!(AugmentedData::new(conn.clone(), Some(good)).is_ok());
        let bad = SForm::zero(&ctx, 1, 3, 0);
        assert!(AugmentedData::new(conn, Some(bad)).is_err());
    }
}

//! Matrix-valued (0,q)-forms and their exterior algebra.
//!
//! A form of degree q on a ball in ℂⁿ is stored as a map from strictly
//! increasing multi-indices I ⊆ {1..n}, |I| = q, to rows×cols matrices of
//! scalar coefficients:
//!
//! ```text
//!   u = Σ'_{|I|=q}  u_I  dz̄_I ,     dz̄_I = dz̄_{i₁} ∧ … ∧ dz̄_{i_q}.
//! ```
//!
//! Missing components are zero; a form of degree q > n is identically zero.
//! The wedge product combines the matrix product on coefficients with the
//! sign of the shuffle that sorts the concatenated index tuple, so for
//! degree-0 forms it is the plain matrix product, and on 1×1 commuting
//! coefficients it is graded-anticommutative.

use std::collections::BTreeMap;

use num::complex::Complex64;

use crate::coeff::{operator_norm, CRat, Coeff};
use crate::error::{Error, Result};

/// Strictly increasing tuple of 1-based coordinate indices.
pub type IndexSet = Vec<u8>;

/// A (0,q)-form with rows×cols matrix coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixForm<F: Coeff> {
    ctx: F::Ctx,
    rows: usize,
    cols: usize,
    degree: usize,
    /// Component matrices, row-major, keyed by increasing index tuples.
    comps: BTreeMap<IndexSet, Vec<F>>,
}

impl<F: Coeff> MatrixForm<F> {
    /// The zero form of the given shape and degree.
    pub fn zero(ctx: &F::Ctx, rows: usize, cols: usize, degree: usize) -> Self {
        MatrixForm { ctx: ctx.clone(), rows, cols, degree, comps: BTreeMap::new() }
    }

    /// The identity matrix as a degree-0 form.
    pub fn identity(ctx: &F::Ctx, size: usize) -> Self {
        let mut entries = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                entries.push(if i == j { F::one(ctx) } else { F::zero(ctx) });
            }
        }
        let mut form = Self::zero(ctx, size, size, 0);
        form.set_component(vec![], entries).expect("identity component");
        form
    }

    /// A degree-0 form from a row-major matrix of coefficients.
    pub fn from_matrix(ctx: &F::Ctx, rows: usize, cols: usize, entries: Vec<F>) -> Result<Self> {
        let mut form = Self::zero(ctx, rows, cols, 0);
        form.set_component(vec![], entries)?;
        Ok(form)
    }

    /// A 1×1 form with a single component.
    pub fn scalar_form(ctx: &F::Ctx, index: IndexSet, value: F) -> Result<Self> {
        let mut form = Self::zero(ctx, 1, 1, index.len());
        form.set_component(index, vec![value])?;
        Ok(form)
    }

    pub fn ctx(&self) -> &F::Ctx {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ambient(&self) -> usize {
        F::ambient(&self.ctx)
    }

    pub fn components(&self) -> &BTreeMap<IndexSet, Vec<F>> {
        &self.comps
    }

    /// Sets one component matrix (row-major, rows×cols entries).
    pub fn set_component(&mut self, index: IndexSet, entries: Vec<F>) -> Result<()> {
        validate_index(&index, self.degree, self.ambient())?;
        if entries.len() != self.rows * self.cols {
            return Err(Error::ShapeMismatch(format!(
                "component {:?}: expected {}x{} = {} entries, got {}",
                index,
                self.rows,
                self.cols,
                self.rows * self.cols,
                entries.len()
            )));
        }
        // Only exact zeros may be elided: a zero of finite accuracy still
        // caps the accuracy of sums it enters.
        if entries.iter().all(|e| e.is_exact_zero()) {
            self.comps.remove(&index);
        } else {
            self.comps.insert(index, entries);
        }
        Ok(())
    }

    /// The component matrix on `index`, zeros when absent.
    pub fn component(&self, index: &IndexSet) -> Vec<F> {
        match self.comps.get(index) {
            Some(m) => m.clone(),
            None => vec![F::zero(&self.ctx); self.rows * self.cols],
        }
    }

    /// True when every component is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.comps.values().all(|m| m.iter().all(|e| e.is_zero()))
    }

    fn check_same_backend(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::BackendMismatch(format!(
                "operands live on different backends: {:?} vs {:?}",
                self.ctx, other.ctx
            )));
        }
        Ok(())
    }

    /// Componentwise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_backend(other)?;
        if self.rows != other.rows || self.cols != other.cols || self.degree != other.degree {
            return Err(Error::ShapeMismatch(format!(
                "add: {}x{} deg {} vs {}x{} deg {}",
                self.rows, self.cols, self.degree, other.rows, other.cols, other.degree
            )));
        }
        let mut out = self.clone();
        for (idx, m) in other.comps.iter() {
            let combined = match out.comps.remove(idx) {
                Some(mine) => mine.iter().zip(m.iter()).map(|(a, b)| a.add(b)).collect(),
                None => m.clone(),
            };
            out.set_component(idx.clone(), combined)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for m in out.comps.values_mut() {
            for e in m.iter_mut() {
                *e = e.neg();
            }
        }
        out
    }

    /// Scales by an exact complex constant.
    pub fn scale(&self, c: &CRat) -> Self {
        let factor = F::constant(&self.ctx, c);
        let mut out = MatrixForm {
            ctx: self.ctx.clone(),
            rows: self.rows,
            cols: self.cols,
            degree: self.degree,
            comps: BTreeMap::new(),
        };
        for (idx, m) in self.comps.iter() {
            let scaled: Vec<F> = m.iter().map(|e| e.mul(&factor)).collect();
            out.set_component(idx.clone(), scaled).expect("shape preserved");
        }
        out
    }

    /// Exterior product.  Coefficients multiply as matrices; the sign is the
    /// parity of the shuffle merging the two index tuples.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_same_backend(other)?;
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "wedge: left is {}x{}, right is {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let n = self.ambient();
        let degree = self.degree + other.degree;
        let mut out = MatrixForm::zero(&self.ctx, self.rows, other.cols, degree);
        if degree > n {
            return Ok(out);
        }
        let mut acc: BTreeMap<IndexSet, Vec<F>> = BTreeMap::new();
        for (ia, ma) in self.comps.iter() {
            for (ib, mb) in other.comps.iter() {
                let Some((merged, sign)) = merge_indices(ia, ib) else { continue };
                let mut prod = mat_mul(self.rows, self.cols, other.cols, ma, mb, &self.ctx);
                if sign < 0 {
                    for e in prod.iter_mut() {
                        *e = e.neg();
                    }
                }
                match acc.entry(merged) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(prod);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        for (dst, src) in o.get_mut().iter_mut().zip(prod.iter()) {
                            *dst = dst.add(src);
                        }
                    }
                }
            }
        }
        for (idx, m) in acc {
            out.set_component(idx, m)?;
        }
        Ok(out)
    }

    /// The ∂̄ operator: degree rises by one; on the series backend this is the
    /// formal derivative, on the grid backend 4th-order finite differences.
    pub fn dbar(&self) -> Self {
        let n = self.ambient();
        let mut out = MatrixForm::zero(&self.ctx, self.rows, self.cols, self.degree + 1);
        if self.degree + 1 > n {
            return out;
        }
        let mut acc: BTreeMap<IndexSet, Vec<F>> = BTreeMap::new();
        for (idx, m) in self.comps.iter() {
            for j in 1..=n as u8 {
                if idx.contains(&j) {
                    continue;
                }
                let pos = idx.iter().filter(|&&i| i < j).count();
                let sign_neg = pos % 2 == 1;
                let mut new_idx = idx.clone();
                new_idx.insert(pos, j);
                let derived: Vec<F> = m
                    .iter()
                    .map(|e| {
                        let d = e.dbar(j as usize);
                        if sign_neg {
                            d.neg()
                        } else {
                            d
                        }
                    })
                    .collect();
                match acc.entry(new_idx) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(derived);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        for (dst, src) in o.get_mut().iter_mut().zip(derived.iter()) {
                            *dst = dst.add(src);
                        }
                    }
                }
            }
        }
        for (idx, m) in acc {
            out.set_component(idx, m).expect("dbar component shape");
        }
        out
    }

    /// Inverse of a degree-0 square form that is a unit of the coefficient
    /// ring.
    pub fn invert_unit(&self) -> Result<Self> {
        if self.degree != 0 {
            return Err(Error::DegreeMismatch(format!(
                "invert_unit needs a degree-0 form, got degree {}",
                self.degree
            )));
        }
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "invert_unit needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let entries = self.component(&vec![]);
        let inv = F::invert_unit_matrix(&self.ctx, self.rows, &entries)?;
        let mut out = Self::zero(&self.ctx, self.rows, self.cols, 0);
        out.set_component(vec![], inv)?;
        Ok(out)
    }

    /// Sup over components and canonical sample points of the pointwise
    /// matrix operator norm.
    pub fn sup_norm(&self) -> f64 {
        let mut sup = 0.0f64;
        for m in self.comps.values() {
            let tables: Vec<Vec<Complex64>> = m.iter().map(|e| e.sample_values()).collect();
            if tables.is_empty() || tables[0].is_empty() {
                continue;
            }
            let npts = tables[0].len();
            let mut point = vec![Complex64::new(0.0, 0.0); m.len()];
            for p in 0..npts {
                for (k, t) in tables.iter().enumerate() {
                    point[k] = t[p];
                }
                sup = sup.max(operator_norm(self.rows, self.cols, &point));
            }
        }
        sup
    }

    /// Numeric component table at a point of the domain.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<BTreeMap<IndexSet, Vec<Complex64>>> {
        let mut out = BTreeMap::new();
        for (idx, m) in self.comps.iter() {
            let vals = m.iter().map(|e| e.eval(z)).collect::<Result<Vec<_>>>()?;
            out.insert(idx.clone(), vals);
        }
        Ok(out)
    }

    /// Applies a scalar-level map to every coefficient (shape preserved).
    pub fn map_coeffs<G: Coeff>(
        &self,
        ctx: &G::Ctx,
        f: &mut impl FnMut(&F) -> Result<G>,
    ) -> Result<MatrixForm<G>> {
        let mut out = MatrixForm::zero(ctx, self.rows, self.cols, self.degree);
        for (idx, m) in self.comps.iter() {
            let mapped = m.iter().map(&mut *f).collect::<Result<Vec<_>>>()?;
            out.set_component(idx.clone(), mapped)?;
        }
        Ok(out)
    }
}

impl crate::form::MatrixForm<crate::series::SeriesCoeff> {
    /// True when both sides agree exactly up to the smaller accuracy degree,
    /// component by component.
    pub fn eq_up_to_acc(&self, other: &Self) -> bool {
        if self.rows != other.rows || self.cols != other.cols || self.degree != other.degree {
            return false;
        }
        let keys: std::collections::BTreeSet<_> =
            self.comps.keys().chain(other.comps.keys()).cloned().collect();
        for k in keys {
            let a = self.component(&k);
            let b = other.component(&k);
            if !a.iter().zip(b.iter()).all(|(x, y)| x.eq_up_to_acc(y)) {
                return false;
            }
        }
        true
    }
}

fn validate_index(index: &IndexSet, degree: usize, n: usize) -> Result<()> {
    if index.len() != degree {
        return Err(Error::DegreeMismatch(format!(
            "index {:?} has length {}, form degree is {}",
            index,
            index.len(),
            degree
        )));
    }
    for w in index.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::BadInput(format!("index {index:?} is not strictly increasing")));
        }
    }
    if index.iter().any(|&i| i == 0 || i as usize > n) {
        return Err(Error::BadInput(format!("index {index:?} out of range 1..={n}")));
    }
    Ok(())
}

/// Merges two strictly increasing tuples; `None` when they intersect,
/// otherwise the sorted union together with the sign of the merge shuffle.
pub fn merge_indices(a: &[u8], b: &[u8]) -> Option<(IndexSet, i32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut inversions = 0usize;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            // b[j] moves past the remaining a-elements
            inversions += a.len() - i;
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, if inversions % 2 == 0 { 1 } else { -1 }))
}

fn mat_mul<F: Coeff>(
    rows: usize,
    inner: usize,
    cols: usize,
    a: &[F],
    b: &[F],
    ctx: &F::Ctx,
) -> Vec<F> {
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let mut s = F::zero(ctx);
            for k in 0..inner {
                s = s.add(&a[i * inner + k].mul(&b[k * cols + j]));
            }
            out.push(s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{crat, crat_frac};
    use crate::series::{SeriesCoeff, SeriesCtx};

    type SForm = MatrixForm<SeriesCoeff>;

    fn sctx(n: usize) -> SeriesCtx {
        SeriesCtx { n }
    }

    fn mono(ctx: &SeriesCtx, z: &[u32], zb: &[u32]) -> SeriesCoeff {
        SeriesCoeff::monomial(ctx, crat(1, 0), z, zb, 8)
    }

    #[test]
    fn wedge_of_repeated_index_vanishes() {
        let ctx = sctx(1);
        let u = SForm::scalar_form(&ctx, vec![1], SeriesCoeff::one(&ctx)).unwrap();
        let w = u.wedge(&u).unwrap();
        assert!(w.is_zero());
        assert_eq!(w.degree(), 2);
    }

    #[test]
    fn wedge_scalar_one_forms_anticommute() {
        let ctx = sctx(2);
        let u = SForm::scalar_form(&ctx, vec![1], mono(&ctx, &[0, 0], &[1, 0])).unwrap();
        let v = SForm::scalar_form(&ctx, vec![2], mono(&ctx, &[0, 0], &[0, 1])).unwrap();
        let uv = u.wedge(&v).unwrap();
        let vu = v.wedge(&u).unwrap();
        // u ∧ v = z̄₁ z̄₂ dz̄₁∧dz̄₂ and v ∧ u is its negative.
        let expect = SForm::scalar_form(&ctx, vec![1, 2], mono(&ctx, &[0, 0], &[1, 1])).unwrap();
        assert!(uv.eq_up_to_acc(&expect));
        assert!(vu.eq_up_to_acc(&expect.neg()));
    }

    #[test]
    fn wedge_of_degree_zero_is_matrix_product() {
        let ctx = sctx(1);
        // A = [[0, 1],[0, 0]], B = [[0, 0],[1, 0]]  ⇒  A·B = diag(1, 0).
        let z = SeriesCoeff::zero(&ctx);
        let o = SeriesCoeff::one(&ctx);
        let a = SForm::from_matrix(&ctx, 2, 2, vec![z.clone(), o.clone(), z.clone(), z.clone()])
            .unwrap();
        let b = SForm::from_matrix(&ctx, 2, 2, vec![z.clone(), z.clone(), o.clone(), z.clone()])
            .unwrap();
        let ab = a.wedge(&b).unwrap();
        let expect =
            SForm::from_matrix(&ctx, 2, 2, vec![o.clone(), z.clone(), z.clone(), z.clone()])
                .unwrap();
        assert!(ab.eq_up_to_acc(&expect));
    }

    #[test]
    fn dbar_monomial_with_sign() {
        // ∂̄(z₁ z̄₁ dz̄₂) = z₁ dz̄₁ ∧ dz̄₂  (no sign flip: 1 < 2).
        let ctx = sctx(2);
        let u = SForm::scalar_form(&ctx, vec![2], mono(&ctx, &[1, 0], &[1, 0])).unwrap();
        let d = u.dbar();
        let expect = SForm::scalar_form(&ctx, vec![1, 2], mono(&ctx, &[1, 0], &[0, 0])).unwrap();
        assert!(d.eq_up_to_acc(&expect));
    }

    #[test]
    fn dbar_inserts_with_odd_position_sign() {
        // ∂̄(z̄₂ dz̄₁) = dz̄₂ ∧ dz̄₁ = −dz̄₁ ∧ dz̄₂.
        let ctx = sctx(2);
        let u = SForm::scalar_form(&ctx, vec![1], mono(&ctx, &[0, 0], &[0, 1])).unwrap();
        let d = u.dbar();
        let expect = SForm::scalar_form(&ctx, vec![1, 2], SeriesCoeff::one(&ctx))
            .unwrap()
            .neg();
        assert!(d.eq_up_to_acc(&expect));
    }

    #[test]
    fn dbar_squared_vanishes_exactly() {
        let ctx = sctx(2);
        let mut f = SeriesCoeff::new(&ctx, 6);
        // z₁² z̄₁ z̄₂ + z̄₂²
        f = f.add(&mono(&ctx, &[2, 0], &[1, 1]));
        f = f.add(&mono(&ctx, &[0, 0], &[0, 2]));
        let u = SForm::scalar_form(&ctx, vec![], f).unwrap();
        let dd = u.dbar().dbar();
        assert!(dd.is_zero());
    }

    #[test]
    fn leibniz_rule_holds_exactly() {
        let ctx = sctx(2);
        let a = SForm::scalar_form(&ctx, vec![1], mono(&ctx, &[1, 0], &[1, 0])).unwrap();
        let b = SForm::scalar_form(&ctx, vec![2], mono(&ctx, &[0, 1], &[0, 1])).unwrap();
        let lhs = a.wedge(&b).unwrap().dbar();
        let rhs = a
            .dbar()
            .wedge(&b)
            .unwrap()
            .add(&a.wedge(&b.dbar()).unwrap().neg())
            .unwrap(); // (−1)^{q_a} = −1 for q_a = 1
        assert!(lhs.eq_up_to_acc(&rhs));
    }

    #[test]
    fn invert_unit_nilpotent_example() {
        // (I + z̄ E₁₂)^{-1} = I − z̄ E₁₂.
        let ctx = sctx(1);
        let zb = mono(&ctx, &[0], &[1]);
        let z = SeriesCoeff::zero(&ctx);
        let o = SeriesCoeff::one(&ctx);
        let a = SForm::from_matrix(&ctx, 2, 2, vec![o.clone(), zb.clone(), z.clone(), o.clone()])
            .unwrap();
        let inv = a.invert_unit().unwrap();
        let expect =
            SForm::from_matrix(&ctx, 2, 2, vec![o.clone(), zb.neg(), z.clone(), o.clone()])
                .unwrap();
        assert!(inv.eq_up_to_acc(&expect));
        let prod = a.wedge(&inv).unwrap();
        assert!(prod.eq_up_to_acc(&SForm::identity(&ctx, 2)));
    }

    #[test]
    fn invert_unit_scalar_double() {
        let ctx = sctx(1);
        let two = SForm::from_matrix(
            &ctx,
            1,
            1,
            vec![SeriesCoeff::constant(&ctx, &crat(2, 0))],
        )
        .unwrap();
        let inv = two.invert_unit().unwrap();
        let half = SForm::from_matrix(
            &ctx,
            1,
            1,
            vec![SeriesCoeff::constant(&ctx, &crat_frac(1, 2, 0, 1))],
        )
        .unwrap();
        assert!(inv.eq_up_to_acc(&half));
    }

    #[test]
    fn invert_unit_rejects_singular_constant() {
        let ctx = sctx(1);
        let zv = mono(&ctx, &[1], &[0]);
        let a = SForm::from_matrix(&ctx, 1, 1, vec![zv]).unwrap();
        assert!(matches!(a.invert_unit(), Err(Error::NonUnit(_))));
    }

    #[test]
    fn add_scale_cancel() {
        let ctx = sctx(2);
        let a = SForm::scalar_form(&ctx, vec![1], mono(&ctx, &[1, 1], &[0, 1])).unwrap();
        let zero = a.add(&a.scale(&crat(-1, 0))).unwrap();
        assert!(zero.is_zero());
        assert_eq!(SForm::zero(&ctx, 3, 2, 1).sup_norm(), 0.0);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let ctx = sctx(1);
        let a = SForm::zero(&ctx, 2, 3, 0);
        let b = SForm::zero(&ctx, 2, 3, 0);
        assert!(matches!(a.wedge(&b), Err(Error::ShapeMismatch(_))));
        let c = SForm::zero(&ctx, 2, 2, 1);
        assert!(matches!(a.add(&c), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn wedge_matches_shuffle_oracle() {
        // Random-but-fixed 2x3 and 3x2 matrix (0,1)-forms in n = 3, checked
        // against an independent expansion that enumerates all (I, J) splits
        // of each target index set and computes the permutation sign by
        // explicit bubble sort.
        let ctx = sctx(3);
        let coeff = |seed: u32| {
            let z = [seed % 2, (seed / 2) % 2, 0];
            let zb = [(seed / 4) % 2, (seed / 8) % 2, (seed / 16) % 2];
            SeriesCoeff::monomial(&ctx, crat(1 + (seed % 3) as i64, (seed % 5) as i64 - 2), &z, &zb, 8)
        };
        let mut a = SForm::zero(&ctx, 2, 3, 1);
        let mut b = SForm::zero(&ctx, 3, 2, 1);
        for (t, idx) in [vec![1u8], vec![2], vec![3]].into_iter().enumerate() {
            let am: Vec<SeriesCoeff> = (0..6).map(|k| coeff(17 * t as u32 + k)).collect();
            let bm: Vec<SeriesCoeff> = (0..6).map(|k| coeff(31 * t as u32 + 7 * k + 3)).collect();
            a.set_component(idx.clone(), am).unwrap();
            b.set_component(idx, bm).unwrap();
        }
        let fast = a.wedge(&b).unwrap();

        // Oracle.
        let mut oracle = SForm::zero(&ctx, 2, 2, 2);
        for target in [vec![1u8, 2], vec![1, 3], vec![2, 3]] {
            let mut acc = vec![SeriesCoeff::zero(&ctx); 4];
            // all ordered pairs (i, j) with {i} ⊔ {j} = target
            for (pi, pj) in [(0usize, 1usize), (1, 0)] {
                let i = vec![target[pi]];
                let j = vec![target[pj]];
                // permutation sign of [i..., j...] -> sorted, by bubble sort
                let mut arr = vec![i[0], j[0]];
                let mut sign = 1i32;
                for _ in 0..arr.len() {
                    for k in 0..arr.len() - 1 {
                        if arr[k] > arr[k + 1] {
                            arr.swap(k, k + 1);
                            sign = -sign;
                        }
                    }
                }
                let ma = a.component(&i);
                let mb = b.component(&j);
                for r in 0..2 {
                    for c in 0..2 {
                        let mut s = SeriesCoeff::zero(&ctx);
                        for k in 0..3 {
                            s = s.add(&ma[r * 3 + k].mul(&mb[k * 2 + c]));
                        }
                        if sign < 0 {
                            s = s.neg();
                        }
                        acc[r * 2 + c] = acc[r * 2 + c].add(&s);
                    }
                }
            }
            oracle.set_component(target, acc).unwrap();
        }
        assert!(fast.eq_up_to_acc(&oracle));
    }
}

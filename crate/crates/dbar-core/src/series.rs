//! Exact truncated power-series coefficients.
//!
//! A value is a polynomial in z_1..z_n, z̄_1..z̄_n with complex-rational
//! coefficients together with an accuracy degree `acc`: the total degree up to
//! which the stored terms are guaranteed to agree with the function the value
//! represents.  Every operation trims terms above the resulting accuracy, so a
//! value never stores coefficients it cannot vouch for, and "equal up to
//! accuracy" is plain equality of the stored data.
//!
//! Accuracy bookkeeping: add/sub/mul take the minimum of the operands'
//! accuracies, ∂̄ and the real partials lose one degree, inversion of a unit
//! keeps the operand's accuracy.  Exactly representable inputs (polynomials
//! entered literally, constants, the identity) carry the sentinel [`ACC_EXACT`].

use std::collections::BTreeMap;

use num::complex::Complex64;
use num::{BigRational, Zero};

use crate::coeff::{CRat, Coeff};
use crate::error::{Error, Result};

/// Accuracy degree of exactly known (non-truncated) values.
pub const ACC_EXACT: u32 = u32::MAX / 2;

/// Expansion cap for inversion and exp of exactly represented inputs whose
/// power series does not terminate; the result carries this accuracy.
pub const INVERSION_DEGREE_CAP: u32 = 64;

/// Monomial exponents: powers of z and of z̄, one per complex coordinate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial {
    pub z_pow: Box<[u32]>,
    pub zbar_pow: Box<[u32]>,
}

impl Monomial {
    pub fn constant(n: usize) -> Self {
        Monomial { z_pow: vec![0; n].into(), zbar_pow: vec![0; n].into() }
    }

    pub fn total_degree(&self) -> u32 {
        self.z_pow.iter().sum::<u32>() + self.zbar_pow.iter().sum::<u32>()
    }
}

/// Backend parameters of the series coefficients: the ambient dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesCtx {
    pub n: usize,
}

/// A truncated power series with exact rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesCoeff {
    ctx: SeriesCtx,
    acc: u32,
    terms: BTreeMap<Monomial, CRat>,
}

impl SeriesCoeff {
    pub fn new(ctx: &SeriesCtx, acc: u32) -> Self {
        SeriesCoeff { ctx: ctx.clone(), acc, terms: BTreeMap::new() }
    }

    pub fn acc(&self) -> u32 {
        self.acc
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, CRat> {
        &self.terms
    }

    /// Monomial `c · z^a z̄^b` with the given accuracy degree.
    pub fn monomial(ctx: &SeriesCtx, c: CRat, z_pow: &[u32], zbar_pow: &[u32], acc: u32) -> Self {
        assert_eq!(z_pow.len(), ctx.n);
        assert_eq!(zbar_pow.len(), ctx.n);
        let mut s = SeriesCoeff::new(ctx, acc);
        s.add_term(
            Monomial { z_pow: z_pow.to_vec().into(), zbar_pow: zbar_pow.to_vec().into() },
            c,
        );
        s
    }

    /// Adds `c · mono`, dropping the term if above accuracy or cancelled.
    pub fn add_term(&mut self, mono: Monomial, c: CRat) {
        if c.is_zero() || mono.total_degree() > self.acc {
            return;
        }
        let entry = self.terms.entry(mono);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Drops the terms whose total degree exceeds the given accuracy.
    fn with_acc(mut self, acc: u32) -> Self {
        self.acc = acc;
        self.terms.retain(|m, _| m.total_degree() <= acc);
        self
    }

    /// True when the stored terms of both sides agree up to the smaller
    /// accuracy degree.
    pub fn eq_up_to_acc(&self, other: &Self) -> bool {
        let acc = self.acc.min(other.acc);
        let take = |s: &Self| -> Vec<(Monomial, CRat)> {
            s.terms
                .iter()
                .filter(|(m, _)| m.total_degree() <= acc)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect()
        };
        take(self) == take(other)
    }

    /// Expands `exp(self)` to the accuracy degree.  The argument must have a
    /// zero constant term only if the exact exponential is wanted; a nonzero
    /// constant term is split off and exponentiated numerically would lose
    /// exactness, so it is rejected.
    pub fn exp(&self) -> Result<Self> {
        let cst = Monomial::constant(self.ctx.n);
        if self.terms.get(&cst).is_some() {
            return Err(Error::BadInput(
                "exp of a series with nonzero constant term is not exactly representable"
                    .into(),
            ));
        }
        let acc = self.acc.min(INVERSION_DEGREE_CAP.max(1));
        let mut result = SeriesCoeff::one(&self.ctx).with_acc(acc);
        let mut power = SeriesCoeff::one(&self.ctx).with_acc(acc);
        let mut factorial = BigRational::from_integer(1.into());
        for j in 1..=acc as u64 {
            power = power.mul(self);
            if power.terms.is_empty() {
                break;
            }
            factorial *= BigRational::from_integer(j.into());
            let inv = CRat::new(factorial.recip(), BigRational::zero());
            for (m, c) in power.terms.iter() {
                result.add_term(m.clone(), c.clone() * inv.clone());
            }
        }
        Ok(result)
    }

    /// Integer power.
    pub fn pow(&self, k: u32) -> Self {
        let mut r = SeriesCoeff::one(&self.ctx).with_acc(self.acc);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }
}

/// Deterministic probe lattice on the closed unit ball of ℂⁿ, scaled by `r`.
///
/// Per coordinate the values run over 0 and the moduli {1/4, 1/2, 3/4, 1}/√n
/// at eight angles; the lattice is the full tensor product.  Seed-free, so
/// sup-norm diagnostics are reproducible across runs.
pub fn probe_lattice(n: usize, r: f64) -> Vec<Vec<Complex64>> {
    let scale = r / (n as f64).sqrt();
    let mut axis = vec![Complex64::new(0.0, 0.0)];
    for m in 1..=4 {
        let rho = scale * m as f64 / 4.0;
        for l in 0..8 {
            let th = std::f64::consts::PI * l as f64 / 4.0;
            axis.push(Complex64::from_polar(rho, th));
        }
    }
    let mut points: Vec<Vec<Complex64>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::with_capacity(points.len() * axis.len());
        for p in &points {
            for &a in &axis {
                let mut q = p.clone();
                q.push(a);
                next.push(q);
            }
        }
        points = next;
    }
    points
}

impl Coeff for SeriesCoeff {
    type Ctx = SeriesCtx;

    fn ctx(&self) -> &SeriesCtx {
        &self.ctx
    }

    fn ambient(ctx: &SeriesCtx) -> usize {
        ctx.n
    }

    fn zero(ctx: &SeriesCtx) -> Self {
        SeriesCoeff::new(ctx, ACC_EXACT)
    }

    fn one(ctx: &SeriesCtx) -> Self {
        Self::constant(ctx, &crate::coeff::crat(1, 0))
    }

    fn constant(ctx: &SeriesCtx, value: &CRat) -> Self {
        let mut s = SeriesCoeff::new(ctx, ACC_EXACT);
        s.add_term(Monomial::constant(ctx.n), value.clone());
        s
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.acc >= ACC_EXACT
    }

    fn add(&self, other: &Self) -> Self {
        let acc = self.acc.min(other.acc);
        let mut r = self.clone().with_acc(acc);
        for (m, c) in other.terms.iter() {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn neg(&self) -> Self {
        let mut r = self.clone();
        for c in r.terms.values_mut() {
            *c = -c.clone();
        }
        r
    }

    fn mul(&self, other: &Self) -> Self {
        let acc = self.acc.min(other.acc);
        let mut r = SeriesCoeff::new(&self.ctx, acc);
        for (ma, ca) in self.terms.iter() {
            if ma.total_degree() > acc {
                continue;
            }
            for (mb, cb) in other.terms.iter() {
                if ma.total_degree() + mb.total_degree() > acc {
                    continue;
                }
                let mono = Monomial {
                    z_pow: ma
                        .z_pow
                        .iter()
                        .zip(mb.z_pow.iter())
                        .map(|(a, b)| a + b)
                        .collect::<Vec<_>>()
                        .into(),
                    zbar_pow: ma
                        .zbar_pow
                        .iter()
                        .zip(mb.zbar_pow.iter())
                        .map(|(a, b)| a + b)
                        .collect::<Vec<_>>()
                        .into(),
                };
                r.add_term(mono, ca.clone() * cb.clone());
            }
        }
        r
    }

    fn dbar(&self, j: usize) -> Self {
        assert!(j >= 1 && j <= self.ctx.n, "dbar index out of range");
        let acc = self.acc.saturating_sub(1);
        let mut r = SeriesCoeff::new(&self.ctx, acc);
        for (m, c) in self.terms.iter() {
            let b = m.zbar_pow[j - 1];
            if b == 0 {
                continue;
            }
            let mut mono = m.clone();
            mono.zbar_pow[j - 1] = b - 1;
            let factor = CRat::new(BigRational::from_integer((b as i64).into()), BigRational::zero());
            r.add_term(mono, c.clone() * factor);
        }
        r
    }

    fn real_deriv(&self, axis: usize) -> Self {
        let j = axis / 2;
        assert!(j < self.ctx.n, "real axis out of range");
        let acc = self.acc.saturating_sub(1);
        let mut r = SeriesCoeff::new(&self.ctx, acc);
        let i_unit = crate::coeff::crat(0, 1);
        for (m, c) in self.terms.iter() {
            // d/dx = d/dz + d/dz̄ ;  d/dy = i (d/dz − d/dz̄).
            let a = m.z_pow[j];
            if a > 0 {
                let mut mono = m.clone();
                mono.z_pow[j] = a - 1;
                let f = CRat::new(BigRational::from_integer((a as i64).into()), BigRational::zero());
                let term = if axis % 2 == 0 { c.clone() * f } else { c.clone() * f * i_unit.clone() };
                r.add_term(mono, term);
            }
            let b = m.zbar_pow[j];
            if b > 0 {
                let mut mono = m.clone();
                mono.zbar_pow[j] = b - 1;
                let f = CRat::new(BigRational::from_integer((b as i64).into()), BigRational::zero());
                let term = if axis % 2 == 0 { c.clone() * f } else { -(c.clone() * f * i_unit.clone()) };
                r.add_term(mono, term);
            }
        }
        r
    }

    fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.ctx.n {
            return Err(Error::BadInput(format!(
                "evaluation point has {} coordinates, ambient dimension is {}",
                z.len(),
                self.ctx.n
            )));
        }
        let mut total = Complex64::new(0.0, 0.0);
        for (m, c) in self.terms.iter() {
            let mut v = crate::coeff::crat_to_f64(c);
            for (i, zi) in z.iter().enumerate() {
                v *= zi.powu(m.z_pow[i]);
                v *= zi.conj().powu(m.zbar_pow[i]);
            }
            total += v;
        }
        Ok(total)
    }

    fn domain_radius(_ctx: &SeriesCtx) -> f64 {
        1.0
    }

    fn sample_points(ctx: &SeriesCtx) -> Vec<Vec<Complex64>> {
        probe_lattice(ctx.n, 1.0)
    }

    fn sample_values(&self) -> Vec<Complex64> {
        Self::sample_points(&self.ctx)
            .iter()
            .map(|p| self.eval(p).expect("probe point inside domain"))
            .collect()
    }

    fn invert_unit_matrix(ctx: &SeriesCtx, rows: usize, entries: &[Self]) -> Result<Vec<Self>> {
        assert_eq!(entries.len(), rows * rows);
        let acc = entries.iter().map(|e| e.acc).min().unwrap_or(ACC_EXACT);
        // Split A = A0 + N with A0 the constant-term matrix.
        let cst = Monomial::constant(ctx.n);
        let a0: Vec<CRat> = entries
            .iter()
            .map(|e| e.terms.get(&cst).cloned().unwrap_or_else(|| crate::coeff::crat(0, 0)))
            .collect();
        let a0_inv = invert_rational_matrix(rows, &a0).ok_or_else(|| {
            Error::NonUnit("constant term of the series matrix is singular".into())
        })?;
        let a0_inv_series: Vec<SeriesCoeff> =
            a0_inv.iter().map(|c| Self::constant(ctx, c).with_acc(acc)).collect();
        let mut n_part: Vec<SeriesCoeff> = entries.to_vec();
        for (e, c0) in n_part.iter_mut().zip(a0.iter()) {
            *e = e.clone().with_acc(acc);
            e.add_term(cst.clone(), -c0.clone());
        }
        // (A0 + N)^{-1} = Σ_j (−A0^{-1} N)^j A0^{-1}; N has no constant term,
        // so truncating at degree d misses only terms of degree > d.  For
        // exactly represented non-nilpotent units the series never ends and
        // the result is honest only to the expansion cap.
        let cap = acc.min(INVERSION_DEGREE_CAP);
        let m = mat_mul(rows, &a0_inv_series, &n_part); // A0^{-1} N, min degree ≥ 1
        let mut result = a0_inv_series.clone();
        let mut power: Vec<SeriesCoeff> = a0_inv_series.clone();
        let mut terminated = false;
        for _ in 1..=cap {
            power = mat_mul(rows, &m, &power);
            if power.iter().all(|e| e.is_exact_zero()) {
                terminated = true;
                break;
            }
            for (r, p) in result.iter_mut().zip(power.iter()) {
                *r = r.add(&p.neg());
            }
            // Alternate signs: fold the minus into `power` for the next round.
            power = power.iter().map(|e| e.neg()).collect();
        }
        if !terminated && acc > cap {
            result = result.into_iter().map(|e| e.with_acc(cap)).collect();
        }
        Ok(result)
    }
}

fn mat_mul(nn: usize, a: &[SeriesCoeff], b: &[SeriesCoeff]) -> Vec<SeriesCoeff> {
    let ctx = a[0].ctx.clone();
    let mut out = Vec::with_capacity(nn * nn);
    for i in 0..nn {
        for j in 0..nn {
            let mut s = SeriesCoeff::zero(&ctx);
            for k in 0..nn {
                s = s.add(&a[i * nn + k].mul(&b[k * nn + j]));
            }
            out.push(s);
        }
    }
    out
}

/// Exact inverse of a square complex-rational matrix, `None` if singular.
pub fn invert_rational_matrix(n: usize, a: &[CRat]) -> Option<Vec<CRat>> {
    let mut m = a.to_vec();
    let one = crate::coeff::crat(1, 0);
    let zero = crate::coeff::crat(0, 0);
    let mut inv: Vec<CRat> =
        (0..n * n).map(|i| if i / n == i % n { one.clone() } else { zero.clone() }).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r * n + col].is_zero())?;
        if pivot != col {
            for j in 0..n {
                m.swap(col * n + j, pivot * n + j);
                inv.swap(col * n + j, pivot * n + j);
            }
        }
        let p = m[col * n + col].clone();
        let p_inv = crat_inv(&p);
        for j in 0..n {
            m[col * n + j] = m[col * n + j].clone() * p_inv.clone();
            inv[col * n + j] = inv[col * n + j].clone() * p_inv.clone();
        }
        for r in 0..n {
            if r == col || m[r * n + col].is_zero() {
                continue;
            }
            let f = m[r * n + col].clone();
            for j in 0..n {
                let mv = m[col * n + j].clone();
                let iv = inv[col * n + j].clone();
                m[r * n + j] = m[r * n + j].clone() - f.clone() * mv;
                inv[r * n + j] = inv[r * n + j].clone() - f.clone() * iv;
            }
        }
    }
    Some(inv)
}

/// Exact reciprocal of a nonzero complex rational.
pub fn crat_inv(v: &CRat) -> CRat {
    let d = v.re.clone() * v.re.clone() + v.im.clone() * v.im.clone();
    CRat::new(v.re.clone() / d.clone(), -v.im.clone() / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::crat;

    fn ctx1() -> SeriesCtx {
        SeriesCtx { n: 1 }
    }

    fn zbar(acc: u32) -> SeriesCoeff {
        SeriesCoeff::monomial(&ctx1(), crat(1, 0), &[0], &[1], acc)
    }

    fn zvar(acc: u32) -> SeriesCoeff {
        SeriesCoeff::monomial(&ctx1(), crat(1, 0), &[1], &[0], acc)
    }

    #[test]
    fn dbar_of_holomorphic_vanishes() {
        let z2 = zvar(6).pow(2);
        assert!(z2.dbar(1).is_zero());
    }

    #[test]
    fn dbar_of_zbar_is_one() {
        let d = zbar(6).dbar(1);
        assert!(d.eq_up_to_acc(&SeriesCoeff::one(&ctx1())));
    }

    #[test]
    fn accuracy_tracks_min_and_decrements() {
        let a = zvar(4);
        let b = zbar(3);
        assert_eq!(a.mul(&b).acc(), 3);
        assert_eq!(a.add(&b).acc(), 3);
        assert_eq!(a.dbar(1).acc(), 3);
        assert_eq!(a.real_deriv(0).acc(), 3);
    }

    #[test]
    fn mul_truncates_above_acc() {
        let a = zvar(2).pow(2); // z^2, acc 2
        let b = zvar(2);
        let p = a.mul(&b); // z^3 has degree 3 > 2: dropped
        assert!(p.is_zero());
        assert_eq!(p.acc(), 2);
    }

    #[test]
    fn exp_expands_to_accuracy() {
        // exp(z z̄) to accuracy 5: 1 + z z̄ + z² z̄²/2  (degree 4 ≤ 5 < 6).
        let zzb = zvar(5).mul(&zbar(5));
        let e = zzb.exp().unwrap();
        let mut expect = SeriesCoeff::one(&ctx1()).with_acc(5);
        expect.add_term(Monomial { z_pow: vec![1].into(), zbar_pow: vec![1].into() }, crat(1, 0));
        expect.add_term(
            Monomial { z_pow: vec![2].into(), zbar_pow: vec![2].into() },
            crate::coeff::crat_frac(1, 2, 0, 1),
        );
        assert!(e.eq_up_to_acc(&expect));
    }

    #[test]
    fn real_derivatives_recombine_to_dbar() {
        // ∂̄ = (∂x + i ∂y) / 2 on z z̄².
        let f = zvar(6).mul(&zbar(6).pow(2));
        let dx = f.real_deriv(0);
        let dy = f.real_deriv(1);
        let i = SeriesCoeff::constant(&ctx1(), &crat(0, 1));
        let half = SeriesCoeff::constant(&ctx1(), &crate::coeff::crat_frac(1, 2, 0, 1));
        let combo = half.mul(&dx.add(&i.mul(&dy)));
        assert!(combo.eq_up_to_acc(&f.dbar(1)));
    }

    #[test]
    fn rational_matrix_inverse_round_trip() {
        let a = vec![crat(1, 0), crat(2, 1), crat(0, 0), crat(1, -1)];
        let inv = invert_rational_matrix(2, &a).unwrap();
        // a * inv = I exactly.
        for i in 0..2 {
            for j in 0..2 {
                let mut s = crat(0, 0);
                for k in 0..2 {
                    s = s + a[i * 2 + k].clone() * inv[k * 2 + j].clone();
                }
                let expect = if i == j { crat(1, 0) } else { crat(0, 0) };
                assert_eq!(s, expect);
            }
        }
    }

    #[test]
    fn eval_matches_monomial() {
        let f = zvar(8).mul(&zbar(8)); // |z|²
        let p = vec![Complex64::new(0.3, 0.4)];
        let v = f.eval(&p).unwrap();
        assert!((v.re - 0.25).abs() < 1e-14 && v.im.abs() < 1e-14);
    }
}

//! Deterministic random instances for the identity suites.
//!
//! Integrable connection data cannot be sampled freely, so instances start
//! from a holomorphic skeleton that is integrable by inspection (zero
//! connection blocks, holomorphic resolution matrices with vanishing
//! composites) and are then recalibrated by a random parameter, which fills
//! every entry while preserving integrability exactly.  All randomness flows
//! through a seeded ChaCha stream, so suites are reproducible byte for byte.

use num::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coeff::{CRat, Coeff};
use crate::form::MatrixForm;
use crate::recalibration::recalibrate;
use crate::resolution::{ConnectionData, GaugeParam};
use crate::series::{SeriesCoeff, SeriesCtx};

/// Seeded deterministic generator.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random identity-suite instance: exactly integrable connection data and
/// three independent gauge parameters of matching shape.
pub struct Instance {
    pub omega: ConnectionData<SeriesCoeff>,
    pub eta1: GaugeParam<SeriesCoeff>,
    pub eta2: GaugeParam<SeriesCoeff>,
    pub eta3: GaugeParam<SeriesCoeff>,
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let num: i64 = rng.gen_range(-2..=2);
    let den: i64 = if rng.gen_bool(0.3) { 2 } else { 1 };
    BigRational::new(num.into(), den.into())
}

fn random_crat(rng: &mut ChaCha8Rng) -> CRat {
    CRat::new(random_rational(rng), random_rational(rng))
}

/// A sparse random polynomial of total degree ≤ 2; `holomorphic` suppresses
/// the z̄ powers, `allow_const` the constant term.
pub fn random_series(
    rng: &mut ChaCha8Rng,
    ctx: &SeriesCtx,
    acc: u32,
    holomorphic: bool,
    allow_const: bool,
) -> SeriesCoeff {
    let mut s = SeriesCoeff::new(ctx, acc);
    let terms = rng.gen_range(0..=2);
    for _ in 0..terms {
        for _ in 0..8 {
            let mut z_pow = vec![0u32; ctx.n];
            let mut zb_pow = vec![0u32; ctx.n];
            let budget = rng.gen_range(0..=2u32);
            for _ in 0..budget {
                let coord = rng.gen_range(0..ctx.n);
                if holomorphic || rng.gen_bool(0.5) {
                    z_pow[coord] += 1;
                } else {
                    zb_pow[coord] += 1;
                }
            }
            let total: u32 = z_pow.iter().sum::<u32>() + zb_pow.iter().sum::<u32>();
            if total == 0 && !allow_const {
                continue;
            }
            let c = random_crat(rng);
            s = s.add(&SeriesCoeff::monomial(ctx, c, &z_pow, &zb_pow, acc));
            break;
        }
    }
    s
}

pub fn random_matrix_form(
    rng: &mut ChaCha8Rng,
    ctx: &SeriesCtx,
    rows: usize,
    cols: usize,
    degree: usize,
    acc: u32,
    allow_const: bool,
) -> MatrixForm<SeriesCoeff> {
    let mut form = MatrixForm::zero(ctx, rows, cols, degree);
    for idx in increasing_index_sets(ctx.n, degree) {
        if degree > 0 && rng.gen_bool(0.25) {
            continue; // leave some components zero
        }
        let entries: Vec<SeriesCoeff> = (0..rows * cols)
            .map(|_| random_series(rng, ctx, acc, false, allow_const))
            .collect();
        form.set_component(idx, entries).expect("random component shape");
    }
    form
}

fn increasing_index_sets(n: usize, len: usize) -> Vec<Vec<u8>> {
    fn rec(start: u8, n: u8, len: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if len == 0 {
            out.push(prefix.clone());
            return;
        }
        for v in start..=n {
            prefix.push(v);
            rec(v + 1, n, len - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if len <= n {
        rec(1, n as u8, len, &mut Vec::new(), &mut out);
    }
    out
}

/// A random gauge parameter.  The degree-0 blocks carry no constant term, so
/// I + η^{s,0} is always a unit on the series backend.
pub fn random_param(
    rng: &mut ChaCha8Rng,
    ctx: &SeriesCtx,
    sizes: &[usize],
    acc: u32,
) -> GaugeParam<SeriesCoeff> {
    let mut p = GaugeParam::zero(ctx, sizes.to_vec()).expect("sizes nonempty");
    for (s, k) in p.index_range() {
        let (rows, cols) = p.shape(s as i64, k);
        let form = random_matrix_form(rng, ctx, rows, cols, k as usize, acc, k != 0);
        p.set_entry(s, k, form).expect("random parameter shape");
    }
    p
}

/// Exactly integrable random connection data: a holomorphic skeleton
/// recalibrated by a random parameter.
pub fn random_integrable(
    rng: &mut ChaCha8Rng,
    ctx: &SeriesCtx,
    sizes: &[usize],
    acc: u32,
) -> ConnectionData<SeriesCoeff> {
    let m = sizes.len() - 1;
    let mut base = ConnectionData::zero(ctx, sizes.to_vec()).expect("sizes nonempty");
    if m >= 1 {
        // Rank-one holomorphic factorizations keep every composite zero:
        // φ_s = a_s · u_s with u_s · a_{s+1} = 0 by a 2x2 antisymmetric trick.
        let mut columns: Vec<Vec<SeriesCoeff>> = Vec::new(); // a_s: p_{s-1} x 1
        let mut rows_v: Vec<Vec<SeriesCoeff>> = Vec::new(); // u_s: 1 x p_s
        for s in 1..=m {
            let p_prev = sizes[s - 1];
            let p_cur = sizes[s];
            let a: Vec<SeriesCoeff> =
                (0..p_prev).map(|_| random_series(rng, ctx, acc, true, true)).collect();
            let u: Vec<SeriesCoeff> =
                (0..p_cur).map(|_| random_series(rng, ctx, acc, true, true)).collect();
            columns.push(a);
            rows_v.push(u);
        }
        // Enforce u_s · a_{s+1} = 0 by the swap (f, g) ↦ (g, −f) when the
        // widths allow it, and by zeroing a_{s+1} otherwise.
        for s in 1..m {
            let width = sizes[s];
            let u = &rows_v[s - 1];
            let a_next = &mut columns[s];
            if width >= 2 {
                a_next[0] = u[1].clone();
                a_next[1] = u[0].neg();
                for item in a_next.iter_mut().skip(2) {
                    *item = SeriesCoeff::zero(ctx);
                }
            } else {
                for item in a_next.iter_mut() {
                    *item = SeriesCoeff::zero(ctx);
                }
            }
        }
        for s in 1..=m {
            let p_prev = sizes[s - 1];
            let p_cur = sizes[s];
            let mut entries = Vec::with_capacity(p_prev * p_cur);
            for i in 0..p_prev {
                for j in 0..p_cur {
                    entries.push(columns[s - 1][i].mul(&rows_v[s - 1][j]));
                }
            }
            let phi = MatrixForm::from_matrix(ctx, p_prev, p_cur, entries).expect("phi shape");
            base.set_entry(s, -1, phi).expect("phi admissible");
        }
    }
    debug_assert_eq!(base.max_residual(), 0.0);
    let param = random_param(rng, ctx, sizes, acc);
    recalibrate(&param, &base).expect("recalibration of the skeleton")
}

/// Draws ambient dimension, resolution length and ranks, then an instance.
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    n_max: usize,
    m_max: usize,
    p_max: usize,
    acc: u32,
) -> Instance {
    let n = rng.gen_range(1..=n_max);
    let m = rng.gen_range(0..=m_max);
    let ctx = SeriesCtx { n };
    let sizes: Vec<usize> = (0..=m).map(|_| rng.gen_range(1..=p_max)).collect();
    let omega = random_integrable(rng, &ctx, &sizes, acc);
    let eta1 = random_param(rng, &ctx, &sizes, acc);
    let eta2 = random_param(rng, &ctx, &sizes, acc);
    let eta3 = random_param(rng, &ctx, &sizes, acc);
    Instance { omega, eta1, eta2, eta3 }
}

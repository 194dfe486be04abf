//! The parameter semigroup and the recalibration action on connection data.
//!
//! Parameters compose by the exterior product law
//!
//! ```text
//!   (η₁ ∧ η₂)^{s,k} = η₁^{s,k} + η₂^{s,k} + Σ_{j=0}^{k} η₁^{s+j,k−j} ∧ η₂^{s,j},
//! ```
//!
//! a semigroup with neutral element 0 whose gauge blocks multiply:
//! g_s(η₁∧η₂) = g_s(η₁)·g_s(η₂).  The action on connection data is defined by
//! increasing recursion on k,
//!
//! ```text
//!   ω^{s,k}_η = (I + η^{s+k,0})^{-1} ( ∂̄η^{s,k} + Σ_{j=0}^{k+1} ω^{s+j,k−j} ∧ η^{s,j}
//!               − Σ_{j=−1}^{k−1} (−1)^{k−j} η^{s+j,k−j} ∧ ω^{s,j}_η + ω^{s,k} ),
//! ```
//!
//! whose k = −1 instance is the plain conjugation g_{s−1}^{-1}·ω^{s,−1}·g_s.
//! Recalibrating by η₂ after η₁ equals recalibrating once by η₁ ∧ η₂, and the
//! action preserves integrability; both facts are exact identities on the
//! series backend and are what the randomized identity suites check.

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::form::MatrixForm;
use crate::resolution::{ConnectionData, GaugeParam};

fn check_compatible<F: Coeff>(a_sizes: &[usize], b_sizes: &[usize], a_ctx: &F::Ctx, b_ctx: &F::Ctx) -> Result<()> {
    if a_sizes != b_sizes {
        return Err(Error::ShapeMismatch(format!(
            "resolution ranks differ: {a_sizes:?} vs {b_sizes:?}"
        )));
    }
    if a_ctx != b_ctx {
        return Err(Error::BackendMismatch("operands live on different backends".into()));
    }
    Ok(())
}

/// The exterior product of two gauge parameters.
pub fn param_product<F: Coeff>(
    first: &GaugeParam<F>,
    second: &GaugeParam<F>,
) -> Result<GaugeParam<F>> {
    check_compatible::<F>(first.sizes(), second.sizes(), first.ctx(), second.ctx())?;
    let mut out = GaugeParam::zero(first.ctx(), first.sizes().to_vec())?;
    for (s, k) in out.index_range() {
        let si = s as i64;
        let mut acc = first.entry(si, k).add(&second.entry(si, k))?;
        for j in 0..=k {
            let term = first.entry(si + j, k - j).wedge(&second.entry(si, j))?;
            acc = acc.add(&term)?;
        }
        out.set_entry(s, k, acc)?;
    }
    Ok(out)
}

/// Left-to-right fold of the exterior product over a step sequence.
pub fn accumulate<F: Coeff>(steps: &[GaugeParam<F>]) -> Result<GaugeParam<F>> {
    let first = steps
        .first()
        .ok_or_else(|| Error::BadInput("accumulate needs at least one parameter".into()))?;
    let mut acc = first.clone();
    for step in &steps[1..] {
        acc = param_product(&acc, step)?;
    }
    Ok(acc)
}

/// The recalibration action ω ↦ ω_η.
///
/// The action formula is total in ω; preservation of integrability is only
/// asserted (and tested) for integrable ω.  Fails when some I + η^{s,0} is
/// not a unit.
pub fn recalibrate<F: Coeff>(
    param: &GaugeParam<F>,
    data: &ConnectionData<F>,
) -> Result<ConnectionData<F>> {
    check_compatible::<F>(param.sizes(), data.sizes(), param.ctx(), data.ctx())?;
    let m = data.resolution_length() as i64;
    let mut out = ConnectionData::zero(data.ctx(), data.sizes().to_vec())?;
    // Invert the gauge blocks once.
    let gauges = param.gauges();
    let inverses: Vec<MatrixForm<F>> =
        gauges.iter().map(|g| g.invert_unit()).collect::<Result<Vec<_>>>()?;
    // Increasing recursion on k: level k only references levels < k.
    for k in -1..=m {
        for s in 0..=(m - k.max(0)) {
            if !data.admissible(s, k) {
                continue;
            }
            let mut acc = data.entry(s, k); // ω^{s,k}
            if k >= 0 {
                acc = acc.add(&param.entry(s, k).dbar())?;
            }
            for j in 0..=(k + 1) {
                let term = data.entry(s + j, k - j).wedge(&param.entry(s, j))?;
                acc = acc.add(&term)?;
            }
            for j in -1..=(k - 1) {
                let term = param.entry(s + j, k - j).wedge(&out.entry(s, j))?;
                // −(−1)^{k−j} η^{s+j,k−j} ∧ ω^{s,j}_η
                let signed = if (k - j).rem_euclid(2) == 0 { term.neg() } else { term };
                acc = acc.add(&signed)?;
            }
            let idx = (s + k).clamp(0, m) as usize;
            let result = if s + k >= 0 && s + k <= m {
                inverses[idx].wedge(&acc)?
            } else {
                acc
            };
            out.set_entry(s as usize, k, result)?;
        }
    }
    Ok(out)
}

/// Residual of the semigroup action law on one triple:
/// Δ = R(η₂, R(η₁, ω)) − R(η₁ ∧ η₂, ω), reported per entry.
#[derive(Clone, Debug)]
pub struct ActionCheck {
    /// (s, k), sup norm of Δ^{s,k}, and whether it is exactly zero.
    pub entries: Vec<((usize, i64), f64, bool)>,
}

impl ActionCheck {
    pub fn max_sup(&self) -> f64 {
        self.entries.iter().map(|e| e.1).fold(0.0, f64::max)
    }

    pub fn all_exact_zero(&self) -> bool {
        self.entries.iter().all(|e| e.2)
    }
}

/// Checks the semigroup action law on (η₁, η₂, ω).
pub fn action_check<F: Coeff>(
    eta1: &GaugeParam<F>,
    eta2: &GaugeParam<F>,
    data: &ConnectionData<F>,
) -> Result<ActionCheck> {
    let two_step = recalibrate(eta2, &recalibrate(eta1, data)?)?;
    let one_step = recalibrate(&param_product(eta1, eta2)?, data)?;
    let mut entries = Vec::new();
    for (s, k) in data.index_range() {
        let delta = two_step.entry(s as i64, k).sub(&one_step.entry(s as i64, k))?;
        entries.push(((s, k), delta.sup_norm(), delta.is_zero()));
    }
    Ok(ActionCheck { entries })
}

/// Evaluates the closed-form expansion of the accumulated parameter
/// component (s, t), t ≥ 1, out of the individual steps η₁..η_κ:
///
/// ```text
///   η(κ)^{s,t} = ( Σ_{τ} Σ_{J} ⟶∧_{r=1..ρ(τ)}
///                  g_{s+σ'(τ,r)}(j_r − 1) · η_{j_r}^{s+σ(τ,r), τ_{ρ(τ)+1−r}} · g_{s+σ(τ,r)}(j_r)^{-1}
///                ) · g_s(κ)
/// ```
///
/// where τ runs over the length-t integer tuples with Σ τ_j = t whose nonzero
/// prefix is followed by zeros, ρ(τ) is the number of nonzero parts, J runs
/// over the strictly increasing ρ(τ)-tuples in {1..κ}, σ'(τ,r) and σ(τ,r) are
/// the partial sums Σ_{j ≤ ρ(τ)+1−r} τ_j and Σ_{j ≤ ρ(τ)−r} τ_j, and
/// g_s(j) = g_s(η₁)···g_s(η_j) is the ordered partial gauge product
/// (identity for j = 0).
pub fn eta_expansion<F: Coeff>(
    steps: &[GaugeParam<F>],
    s: usize,
    t: i64,
) -> Result<MatrixForm<F>> {
    if t < 1 {
        return Err(Error::BadInput(
            "the closed-form expansion covers components with t >= 1; use accumulate for t = 0"
                .into(),
        ));
    }
    let first = steps
        .first()
        .ok_or_else(|| Error::BadInput("eta_expansion needs at least one step".into()))?;
    for step in steps {
        check_compatible::<F>(first.sizes(), step.sizes(), first.ctx(), step.ctx())?;
    }
    let ctx = first.ctx();
    let sizes = first.sizes();
    let m = first.resolution_length() as i64;
    let kappa = steps.len();

    // Ordered partial gauge products g_s(j) = g_{s,1}···g_{s,j} and inverses.
    // partial[s][j], j = 0..κ.
    let mut partial: Vec<Vec<MatrixForm<F>>> = Vec::with_capacity(sizes.len());
    let mut partial_inv: Vec<Vec<MatrixForm<F>>> = Vec::with_capacity(sizes.len());
    for (lvl, &p) in sizes.iter().enumerate() {
        let mut acc = MatrixForm::identity(ctx, p);
        let mut row = vec![acc.clone()];
        for step in steps {
            let g = MatrixForm::identity(ctx, p).add(&step.entry(lvl as i64, 0))?;
            acc = acc.wedge(&g)?;
            row.push(acc.clone());
        }
        let inv_row = row.iter().map(|g| g.invert_unit()).collect::<Result<Vec<_>>>()?;
        partial.push(row);
        partial_inv.push(inv_row);
    }
    let gauge_at = |level: i64, j: usize| -> MatrixForm<F> {
        partial[level as usize][j].clone()
    };
    let gauge_inv_at = |level: i64, j: usize| -> MatrixForm<F> {
        partial_inv[level as usize][j].clone()
    };

    let (rows, cols) = first.shape(s as i64, t);
    let mut total = MatrixForm::<F>::zero(ctx, rows, cols, t as usize);
    if s as i64 + t > m {
        return Ok(total);
    }

    // τ ∈ Δ_t is determined by its nonzero prefix: an ordered composition of
    // t of length ρ ≤ t.
    for rho in 1..=t {
        for tau in compositions(t, rho) {
            for subset in increasing_tuples(kappa, rho as usize) {
                // ⟶∧ over r = 1..ρ of g(left)·η·g(right)^{-1}
                let mut factor_chain: Option<MatrixForm<F>> = None;
                for r in 1..=rho {
                    let sigma_prime: i64 = tau[..(rho + 1 - r) as usize].iter().sum();
                    let sigma: i64 = tau[..(rho - r) as usize].iter().sum();
                    let j_r = subset[(r - 1) as usize];
                    let part = tau[(rho - r) as usize]; // τ_{ρ+1−r}
                    let eta = steps[j_r - 1].entry(s as i64 + sigma, part);
                    let piece = gauge_at(s as i64 + sigma_prime, j_r - 1)
                        .wedge(&eta)?
                        .wedge(&gauge_inv_at(s as i64 + sigma, j_r))?;
                    factor_chain = Some(match factor_chain {
                        None => piece,
                        Some(chain) => chain.wedge(&piece)?,
                    });
                }
                let term = factor_chain.expect("rho >= 1").wedge(&gauge_at(s as i64, kappa))?;
                total = total.add(&term)?;
            }
        }
    }
    Ok(total)
}

/// Ordered compositions of `t` into exactly `rho` positive parts.
fn compositions(t: i64, rho: i64) -> Vec<Vec<i64>> {
    fn rec(remaining: i64, slots: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if slots == 1 {
            if remaining >= 1 {
                prefix.push(remaining);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        for v in 1..=(remaining - slots + 1) {
            prefix.push(v);
            rec(remaining - v, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if rho >= 1 && t >= rho {
        rec(t, rho, &mut Vec::new(), &mut out);
    }
    out
}

/// Strictly increasing `len`-tuples in {1..k}, 1-based.
fn increasing_tuples(k: usize, len: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, len: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if len == 0 {
            out.push(prefix.clone());
            return;
        }
        for v in start..=k {
            if k - v + 1 < len {
                break;
            }
            prefix.push(v);
            rec(v + 1, k, len - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, k, len, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::crat;
    use crate::form::MatrixForm;
    use crate::series::{SeriesCoeff, SeriesCtx};
    use crate::testgen;

    type SForm = MatrixForm<SeriesCoeff>;

    fn sctx(n: usize) -> SeriesCtx {
        SeriesCtx { n }
    }

    #[test]
    fn zero_is_two_sided_neutral_for_the_product() {
        let mut rng = testgen::rng(7);
        let inst = testgen::random_instance(&mut rng, 2, 2, 2, 4);
        let zero = GaugeParam::zero(inst.eta1.ctx(), inst.eta1.sizes().to_vec()).unwrap();
        let left = param_product(&zero, &inst.eta1).unwrap();
        let right = param_product(&inst.eta1, &zero).unwrap();
        for (s, k) in inst.eta1.index_range() {
            assert!(left.entry(s as i64, k).eq_up_to_acc(&inst.eta1.entry(s as i64, k)));
            assert!(right.entry(s as i64, k).eq_up_to_acc(&inst.eta1.entry(s as i64, k)));
        }
    }

    #[test]
    fn product_gauge_block_law() {
        // (η₁∧η₂)^{s,0} = η₁^{s,0} + η₂^{s,0} + η₁^{s,0}·η₂^{s,0}.
        let mut rng = testgen::rng(11);
        let inst = testgen::random_instance(&mut rng, 2, 2, 2, 4);
        let prod = param_product(&inst.eta1, &inst.eta2).unwrap();
        for s in 0..=inst.eta1.resolution_length() as i64 {
            let a = inst.eta1.entry(s, 0);
            let b = inst.eta2.entry(s, 0);
            let expect = a.add(&b).unwrap().add(&a.wedge(&b).unwrap()).unwrap();
            assert!(prod.entry(s, 0).eq_up_to_acc(&expect));
            // equivalently: g_s(η₁∧η₂) = g_s(η₁)·g_s(η₂)
            let g = prod.gauges()[s as usize].clone();
            let gg = inst.eta1.gauges()[s as usize].wedge(&inst.eta2.gauges()[s as usize]).unwrap();
            assert!(g.eq_up_to_acc(&gg));
        }
    }

    #[test]
    fn product_matches_double_sum_oracle() {
        // Term-by-term expansion of the component law, written independently.
        let mut rng = testgen::rng(23);
        for _ in 0..5 {
            let inst = testgen::random_instance(&mut rng, 2, 2, 2, 4);
            let prod = param_product(&inst.eta1, &inst.eta2).unwrap();
            for (s, k) in prod.index_range() {
                let si = s as i64;
                let mut oracle = inst.eta1.entry(si, k);
                oracle = oracle.add(&inst.eta2.entry(si, k)).unwrap();
                for j in 0..=k {
                    oracle = oracle
                        .add(&inst.eta1.entry(si + j, k - j).wedge(&inst.eta2.entry(si, j)).unwrap())
                        .unwrap();
                }
                assert!(prod.entry(si, k).eq_up_to_acc(&oracle));
            }
        }
    }

    #[test]
    fn product_is_associative() {
        let mut rng = testgen::rng(5);
        for _ in 0..3 {
            let inst = testgen::random_instance(&mut rng, 2, 2, 2, 3);
            let left = param_product(&param_product(&inst.eta1, &inst.eta2).unwrap(), &inst.eta3)
                .unwrap();
            let right = param_product(&inst.eta1, &param_product(&inst.eta2, &inst.eta3).unwrap())
                .unwrap();
            for (s, k) in left.index_range() {
                assert!(left.entry(s as i64, k).eq_up_to_acc(&right.entry(s as i64, k)));
            }
        }
    }

    #[test]
    fn recalibrate_by_zero_is_identity() {
        let mut rng = testgen::rng(13);
        let inst = testgen::random_instance(&mut rng, 2, 2, 2, 4);
        let zero = GaugeParam::zero(inst.omega.ctx(), inst.omega.sizes().to_vec()).unwrap();
        let out = recalibrate(&zero, &inst.omega).unwrap();
        for (s, k) in inst.omega.index_range() {
            assert!(out.entry(s as i64, k).eq_up_to_acc(&inst.omega.entry(s as i64, k)));
        }
    }

    #[test]
    fn base_row_is_conjugation() {
        // ω^{s,−1}_η = g_{s−1}^{-1} · ω^{s,−1} · g_s.
        let mut rng = testgen::rng(37);
        let inst = testgen::random_instance(&mut rng, 1, 2, 2, 4);
        let out = recalibrate(&inst.eta1, &inst.omega).unwrap();
        let g = inst.eta1.gauges();
        for s in 1..=inst.omega.resolution_length() {
            let expect = g[s - 1]
                .invert_unit()
                .unwrap()
                .wedge(&inst.omega.entry(s as i64, -1))
                .unwrap()
                .wedge(&g[s])
                .unwrap();
            assert!(out.entry(s as i64, -1).eq_up_to_acc(&expect));
        }
    }

    #[test]
    fn recalibration_preserves_integrability_exactly() {
        let mut rng = testgen::rng(41);
        for _ in 0..3 {
            let inst = testgen::random_instance(&mut rng, 1, 2, 2, 4);
            assert_eq!(inst.omega.max_residual(), 0.0, "test instance must be integrable");
            let out = recalibrate(&inst.eta1, &inst.omega).unwrap();
            assert_eq!(out.max_residual(), 0.0);
        }
    }

    #[test]
    fn action_law_holds_exactly() {
        let mut rng = testgen::rng(43);
        for _ in 0..3 {
            let inst = testgen::random_instance(&mut rng, 2, 2, 2, 3);
            let report = action_check(&inst.eta1, &inst.eta2, &inst.omega).unwrap();
            assert!(report.all_exact_zero(), "max sup {}", report.max_sup());
        }
    }

    #[test]
    fn action_with_neutral_factor_is_trivial() {
        let mut rng = testgen::rng(47);
        let inst = testgen::random_instance(&mut rng, 2, 2, 2, 3);
        let zero = GaugeParam::zero(inst.omega.ctx(), inst.omega.sizes().to_vec()).unwrap();
        assert!(action_check(&zero, &inst.eta1, &inst.omega).unwrap().all_exact_zero());
        assert!(action_check(&inst.eta1, &zero, &inst.omega).unwrap().all_exact_zero());
    }

    #[test]
    fn single_step_expansion_is_the_step_itself() {
        let mut rng = testgen::rng(53);
        let inst = testgen::random_instance(&mut rng, 1, 2, 2, 4);
        let m = inst.eta1.resolution_length() as i64;
        for s in 0..=(m - 1).max(0) as usize {
            for t in 1..=(m - s as i64) {
                let e = eta_expansion(std::slice::from_ref(&inst.eta1), s, t).unwrap();
                assert!(e.eq_up_to_acc(&inst.eta1.entry(s as i64, t)));
            }
        }
    }

    #[test]
    fn degree_one_expansion_matches_displayed_specialization() {
        // t = 1, κ = 3:  Σ_{j=1}^{3} g_{s+1}(j−1) · η_j^{s,1} · g_s(j)^{-1} · g_s(3).
        let mut rng = testgen::rng(59);
        let inst = testgen::random_instance(&mut rng, 1, 1, 2, 4);
        let steps = [inst.eta1.clone(), inst.eta2.clone(), inst.eta3.clone()];
        let ctx = inst.eta1.ctx();
        let p = inst.eta1.sizes().to_vec();
        let s = 0usize;
        // partial products by hand
        let mut g_s = vec![MatrixForm::identity(ctx, p[s])];
        let mut g_s1 = vec![MatrixForm::identity(ctx, p[s + 1])];
        for step in &steps {
            let gs = MatrixForm::identity(ctx, p[s]).add(&step.entry(s as i64, 0)).unwrap();
            let gs1 =
                MatrixForm::identity(ctx, p[s + 1]).add(&step.entry(s as i64 + 1, 0)).unwrap();
            g_s.push(g_s.last().unwrap().wedge(&gs).unwrap());
            g_s1.push(g_s1.last().unwrap().wedge(&gs1).unwrap());
        }
        let mut sum = MatrixForm::<SeriesCoeff>::zero(ctx, p[s + 1], p[s], 1);
        for j in 1..=3usize {
            let term = g_s1[j - 1]
                .wedge(&steps[j - 1].entry(s as i64, 1))
                .unwrap()
                .wedge(&g_s[j].invert_unit().unwrap())
                .unwrap();
            sum = sum.add(&term).unwrap();
        }
        let expect = sum.wedge(&g_s[3]).unwrap();
        let got = eta_expansion(&steps, s, 1).unwrap();
        assert!(got.eq_up_to_acc(&expect));
    }

    #[test]
    fn expansion_matches_iterated_product() {
        let mut rng = testgen::rng(61);
        let inst = testgen::random_instance(&mut rng, 1, 2, 2, 3);
        let steps = [inst.eta1.clone(), inst.eta2.clone(), inst.eta3.clone()];
        let acc = accumulate(&steps).unwrap();
        let m = acc.resolution_length() as i64;
        for s in 0..=acc.resolution_length() {
            for t in 1..=(m - s as i64) {
                let e = eta_expansion(&steps, s, t).unwrap();
                assert!(
                    e.eq_up_to_acc(&acc.entry(s as i64, t)),
                    "mismatch at (s, t) = ({s}, {t})"
                );
            }
        }
    }

    #[test]
    fn accumulate_gauges_are_ordered_products() {
        let mut rng = testgen::rng(67);
        let inst = testgen::random_instance(&mut rng, 1, 2, 2, 3);
        let steps = [inst.eta1.clone(), inst.eta2.clone()];
        let acc = accumulate(&steps).unwrap();
        let g = acc.gauges();
        let g1 = inst.eta1.gauges();
        let g2 = inst.eta2.gauges();
        for s in 0..g.len() {
            let expect = g1[s].wedge(&g2[s]).unwrap();
            assert!(g[s].eq_up_to_acc(&expect));
        }
    }

    #[test]
    fn expansion_rejects_t_zero() {
        let ctx = sctx(1);
        let p = GaugeParam::<SeriesCoeff>::zero(&ctx, vec![1, 1]).unwrap();
        assert!(eta_expansion(&[p], 0, 0).is_err());
    }

    #[test]
    fn truncated_parameter_matches_step_operand_identity() {
        // ω^{s,k}_{η_[k+1]} = ω^{s,k} + ω^{s+k+1,−1} ∧ η^{s,k+1}
        //                     + (−1)^k η^{s−1,k+1} ∧ ω^{s,−1}  exactly.
        let mut rng = testgen::rng(71);
        for _ in 0..3 {
            let inst = testgen::random_instance(&mut rng, 1, 2, 2, 4);
            let m = inst.omega.resolution_length() as i64;
            for k in 0..=m {
                let trunc = inst.eta1.truncate_below(k + 1);
                let recal = recalibrate(&trunc, &inst.omega).unwrap();
                for s in 0..=(m - k) {
                    let direct = inst
                        .omega
                        .entry(s, k)
                        .add(
                            &inst
                                .omega
                                .entry(s + k + 1, -1)
                                .wedge(&inst.eta1.entry(s, k + 1))
                                .unwrap(),
                        )
                        .unwrap();
                    let cross =
                        inst.eta1.entry(s - 1, k + 1).wedge(&inst.omega.entry(s, -1)).unwrap();
                    let cross = if k.rem_euclid(2) == 1 { cross.neg() } else { cross };
                    let direct = direct.add(&cross).unwrap();
                    assert!(
                        recal.entry(s, k).eq_up_to_acc(&direct),
                        "mismatch at (s,k) = ({s},{k})"
                    );
                }
            }
        }
    }

    #[test]
    fn scaled_identity_recalibration_stays_integrable() {
        // A non-random sanity instance easy to inspect by hand: m = 0,
        // ω = ∂̄φ with φ scalar, η^{0,0} = z̄·E₁₂.
        let ctx = sctx(1);
        let phi = SeriesCoeff::monomial(&ctx, crat(1, 0), &[1], &[1], 6);
        let dphi = SForm::scalar_form(&ctx, vec![], phi).unwrap().dbar();
        let coeff = dphi.component(&vec![1]);
        let z = SeriesCoeff::zero(&ctx);
        let mut a = SForm::zero(&ctx, 2, 2, 1);
        a.set_component(vec![1], vec![coeff[0].clone(), z.clone(), z.clone(), coeff[0].clone()])
            .unwrap();
        let data = crate::resolution::make_grothendieck(a).unwrap();
        assert_eq!(data.max_residual(), 0.0);
        let mut eta = GaugeParam::<SeriesCoeff>::zero(&ctx, vec![2]).unwrap();
        let zb = SeriesCoeff::monomial(&ctx, crat(1, 0), &[0], &[1], 6);
        let mut block = SForm::zero(&ctx, 2, 2, 0);
        block.set_component(vec![], vec![z.clone(), zb, z.clone(), z.clone()]).unwrap();
        eta.set_entry(0, 0, block).unwrap();
        let out = recalibrate(&eta, &data).unwrap();
        assert_eq!(out.max_residual(), 0.0);
    }
}

//! Randomized exact-identity batteries on the series backend.
//!
//! Every check here is an equality of exact rational data (up to the tracked
//! accuracy degree), so a single failing case is a genuine algebra bug, not
//! numerical noise.  The batteries power both the acceptance suite and the
//! `identities` command of the CLI; all randomness is seeded.

use crate::form::MatrixForm;
use crate::recalibration::{accumulate, action_check, eta_expansion, param_product, recalibrate};
use crate::resolution::GaugeParam;
use crate::series::{SeriesCoeff, SeriesCtx};
use crate::testgen;

/// Outcome of one identity over a case batch.
#[derive(Clone, Debug)]
pub struct IdentityOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl IdentityOutcome {
    fn new(name: &'static str) -> Self {
        IdentityOutcome { name, cases: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Aggregated view over several outcomes.
pub fn all_passed(outcomes: &[IdentityOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed())
}

type SForm = MatrixForm<SeriesCoeff>;

fn random_square_form(
    rng: &mut rand_chacha::ChaCha8Rng,
    ctx: &SeriesCtx,
    size: usize,
    degree: usize,
    acc: u32,
) -> SForm {
    let mut p = GaugeParam::<SeriesCoeff>::zero(ctx, vec![size]).expect("sizes");
    let _ = &mut p;
    let mut form = SForm::zero(ctx, size, size, degree);
    for idx in index_sets(ctx.n, degree) {
        let entries: Vec<SeriesCoeff> =
            (0..size * size).map(|_| testgen::random_series(rng, ctx, acc, false, true)).collect();
        form.set_component(idx, entries).expect("component shape");
    }
    form
}

fn index_sets(n: usize, len: usize) -> Vec<Vec<u8>> {
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

/// ∂̄∘∂̄ = 0, the Leibniz rule, wedge associativity, and the semigroup laws
/// of the parameter product, on `cases` random instances.
pub fn exact_algebra_suite(
    seed: u64,
    cases: usize,
    n_max: usize,
    m_max: usize,
    p_max: usize,
    acc: u32,
) -> Vec<IdentityOutcome> {
    let mut rng = testgen::rng(seed);
    let mut dbar_sq = IdentityOutcome::new("dbar_squared_zero");
    let mut leibniz = IdentityOutcome::new("leibniz_rule");
    let mut wedge_assoc = IdentityOutcome::new("wedge_associativity");
    let mut prod_assoc = IdentityOutcome::new("param_product_associativity");
    let mut prod_neutral = IdentityOutcome::new("param_product_neutrality");

    for case in 0..cases {
        use rand::Rng;
        let n = rng.gen_range(1..=n_max);
        let ctx = SeriesCtx { n };

        // ∂̄² = 0 on a random matrix form of each degree.
        dbar_sq.cases += 1;
        for q in 0..=n.saturating_sub(0) {
            let f = random_square_form(&mut rng, &ctx, 2.min(p_max), q.min(n), acc);
            let dd = f.dbar().dbar();
            if !dd.is_zero() {
                dbar_sq.failures.push(format!("case {case}: nonzero ∂̄² at degree {q}"));
            }
        }

        // Leibniz on a compatible random pair.
        leibniz.cases += 1;
        let qa = rng.gen_range(0..=1.min(n));
        let qb = rng.gen_range(0..=(n - qa).min(1));
        let a = random_square_form(&mut rng, &ctx, 2.min(p_max), qa, acc);
        let b = random_square_form(&mut rng, &ctx, 2.min(p_max), qb, acc);
        let lhs = a.wedge(&b).expect("shapes").dbar();
        let signed = if qa % 2 == 1 {
            a.wedge(&b.dbar()).expect("shapes").neg()
        } else {
            a.wedge(&b.dbar()).expect("shapes")
        };
        let rhs = a.dbar().wedge(&b).expect("shapes").add(&signed).expect("shapes");
        if !lhs.eq_up_to_acc(&rhs) {
            leibniz.failures.push(format!("case {case}: Leibniz defect (qa={qa}, qb={qb})"));
        }

        // Associativity of the wedge on a random compatible triple.
        wedge_assoc.cases += 1;
        let (qa, qb, qc) = (qa.min(1), 0usize, qb.min(1));
        let a = random_square_form(&mut rng, &ctx, 2.min(p_max), qa, acc);
        let b = random_square_form(&mut rng, &ctx, 2.min(p_max), qb, acc);
        let c = random_square_form(&mut rng, &ctx, 2.min(p_max), qc, acc);
        let left = a.wedge(&b).expect("shapes").wedge(&c).expect("shapes");
        let right = a.wedge(&b.wedge(&c).expect("shapes")).expect("shapes");
        if !left.eq_up_to_acc(&right) {
            wedge_assoc.failures.push(format!("case {case}: wedge associativity defect"));
        }

        // Parameter-product semigroup laws.
        prod_assoc.cases += 1;
        prod_neutral.cases += 1;
        let inst = testgen::random_instance(&mut rng, n_max, m_max, p_max, acc);
        let ab_c = param_product(&param_product(&inst.eta1, &inst.eta2).expect("shapes"), &inst.eta3)
            .expect("shapes");
        let a_bc = param_product(&inst.eta1, &param_product(&inst.eta2, &inst.eta3).expect("shapes"))
            .expect("shapes");
        if !params_equal(&ab_c, &a_bc) {
            prod_assoc.failures.push(format!("case {case}: product associativity defect"));
        }
        let zero = GaugeParam::zero(inst.eta1.ctx(), inst.eta1.sizes().to_vec()).expect("sizes");
        let left = param_product(&zero, &inst.eta1).expect("shapes");
        let right = param_product(&inst.eta1, &zero).expect("shapes");
        if !params_equal(&left, &inst.eta1) || !params_equal(&right, &inst.eta1) {
            prod_neutral.failures.push(format!("case {case}: zero is not neutral"));
        }
    }
    vec![dbar_sq, leibniz, wedge_assoc, prod_assoc, prod_neutral]
}

fn params_equal(a: &GaugeParam<SeriesCoeff>, b: &GaugeParam<SeriesCoeff>) -> bool {
    a.index_range()
        .into_iter()
        .all(|(s, k)| a.entry(s as i64, k).eq_up_to_acc(&b.entry(s as i64, k)))
}

/// The semigroup action law Δ = R(η₂, R(η₁, ω)) − R(η₁∧η₂, ω) = 0 and exact
/// integrability preservation, on `cases` random integrable instances.
pub fn semigroup_action_suite(
    seed: u64,
    cases: usize,
    n_max: usize,
    m_max: usize,
    p_max: usize,
    acc: u32,
) -> Vec<IdentityOutcome> {
    let mut rng = testgen::rng(seed);
    let mut action = IdentityOutcome::new("semigroup_action_law");
    let mut preserve = IdentityOutcome::new("integrability_preservation");
    for case in 0..cases {
        let inst = testgen::random_instance(&mut rng, n_max, m_max, p_max, acc);
        action.cases += 1;
        let report = action_check(&inst.eta1, &inst.eta2, &inst.omega).expect("shapes");
        if !report.all_exact_zero() {
            action.failures.push(format!(
                "case {case}: action defect, max sup {:.3e}",
                report.max_sup()
            ));
        }
        preserve.cases += 1;
        if inst.omega.max_residual() != 0.0 {
            preserve.failures.push(format!("case {case}: instance not integrable"));
            continue;
        }
        let out = recalibrate(&inst.eta1, &inst.omega).expect("shapes");
        if out.max_residual() != 0.0 {
            preserve
                .failures
                .push(format!("case {case}: residual {:.3e} after recalibration", out.max_residual()));
        }
    }
    vec![action, preserve]
}

/// The closed-form expansion of the accumulated parameter against the
/// iterated product, all components (s, t), t ≥ 1, for `steps_max` steps.
pub fn expansion_suite(
    seed: u64,
    cases: usize,
    steps_max: usize,
    m_max: usize,
    p_max: usize,
    acc: u32,
) -> Vec<IdentityOutcome> {
    let mut rng = testgen::rng(seed);
    let mut outcome = IdentityOutcome::new("expansion_vs_iterated_product");
    for case in 0..cases {
        use rand::Rng;
        let m = rng.gen_range(1..=m_max);
        let ctx = SeriesCtx { n: rng.gen_range(1..=2) };
        let sizes: Vec<usize> = (0..=m).map(|_| rng.gen_range(1..=p_max)).collect();
        let steps: Vec<GaugeParam<SeriesCoeff>> =
            (0..steps_max).map(|_| testgen::random_param(&mut rng, &ctx, &sizes, acc)).collect();
        outcome.cases += 1;
        let mut bad = None;
        for upto in 1..=steps.len() {
            let acc_param = accumulate(&steps[..upto]).expect("shapes");
            for s in 0..=m {
                for t in 1..=(m - s) as i64 {
                    let direct = eta_expansion(&steps[..upto], s, t).expect("shapes");
                    if !direct.eq_up_to_acc(&acc_param.entry(s as i64, t)) {
                        bad = Some(format!(
                            "case {case}: mismatch at steps={upto}, (s,t)=({s},{t})"
                        ));
                    }
                }
            }
        }
        if let Some(msg) = bad {
            outcome.failures.push(msg);
        }
    }
    vec![outcome]
}

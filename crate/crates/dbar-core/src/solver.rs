//! Rapid-convergence iteration gauging connection forms to zero on the disk.
//!
//! Given integrable connection data ω on B_{r₀} (grid backend, one complex
//! variable), each step builds a gauge parameter by the decreasing recursion
//!
//! ```text
//!   η^{s,t} = −T_{r(k,m−t),t} ( ω^{s,t} + ω^{s+t+1,−1} ∧ η^{s,t+1}
//!                               + (−1)^t η^{s−1,t+1} ∧ ω^{s,−1} ),   t = m..0,
//! ```
//!
//! recalibrates ω by it, restricts to the next radius of the schedule
//! σ_k = e^{−k−2}, r_{k+1} = r_k (1 − σ_k), and monitors the weighted Hölder
//! norm a_k of the k ≥ 0 blocks.  Each step is quadratically small in the
//! previous one, so a_k collapses until the quadrature floor; the
//! accumulated gauges g_s = g_{s,1} g_{s,2} ⋯ then make ψ·g_0 and
//! g_{s−1}^{-1}·φ_s·g_s holomorphic up to the reported residuals.
//!
//! The monitored norm order is capped at `h_max` (default 1): sampled data
//! supports only low-order derivative estimation, and the increasing orders
//! of the convergence proof drive its constants, not the arithmetic.

use num::complex::Complex64;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::form::MatrixForm;
use crate::grid::{GridCoeff, GridCtx};
use crate::holder::{diag_a, solver_weights, WeightSequence};
use crate::koppelman::{cauchy_transform, GridForm, QuadratureSpec};
use crate::recalibration::recalibrate;
use crate::resolution::{AugmentedData, ConnectionData, GaugeParam};

/// The restriction schedule: shrink factors and working radii.
#[derive(Clone, Debug)]
pub struct Schedule {
    m: usize,
    r0: f64,
}

/// Builds the schedule for resolution length `m` starting at radius `r0`.
pub fn build_schedule(m: usize, r0: f64) -> Result<Schedule> {
    if !(r0 > 0.0 && r0 <= 1.0) {
        return Err(Error::BadInput(format!("initial radius must lie in (0,1], got {r0}")));
    }
    Ok(Schedule { m, r0 })
}

impl Schedule {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// Shrink factor σ_k = e^{−k−2}.
    pub fn sigma(&self, k: usize) -> f64 {
        (-(k as f64) - 2.0).exp()
    }

    /// Split shrink factor σ_{m,k} = σ_k / (m+1).
    pub fn sigma_m(&self, k: usize) -> f64 {
        self.sigma(k) / (self.m as f64 + 1.0)
    }

    /// Working radius r_k = r₀ ∏_{j<k} (1 − σ_j).
    pub fn radius(&self, k: usize) -> f64 {
        let mut r = self.r0;
        for j in 0..k {
            r *= 1.0 - self.sigma(j);
        }
        r
    }

    /// Intermediate radii r(k, l) = r_k (1 − l σ_{m,k}) for l = 0..=m+1;
    /// r(k, m+1) = r_{k+1}.
    pub fn r_sub(&self, k: usize, l: usize) -> f64 {
        self.radius(k) * (1.0 - l as f64 * self.sigma_m(k))
    }

    /// The limit radius r_∞ = r₀ ∏ (1 − σ_k) > 0, evaluated to machine
    /// precision (the tail of the product is below 1 ulp past k ≈ 40).
    pub fn r_infinity(&self) -> f64 {
        let mut r = self.r0;
        let mut k = 0;
        loop {
            let s = self.sigma(k);
            if s < 1e-18 {
                break;
            }
            r *= 1.0 - s;
            k += 1;
        }
        r
    }
}

/// Constants of the advisory convergence predictor.
#[derive(Clone, Debug)]
pub struct PredictorConfig {
    pub big_h: f64,
    pub big_p: f64,
    pub gamma_slope: f64,
    pub gamma_intercept: f64,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        PredictorConfig { big_h: 10.0, big_p: 10.0, gamma_slope: 1.0, gamma_intercept: 1.0 }
    }
}

/// One advisory predictor sample.
#[derive(Clone, Copy, Debug)]
pub struct PredictorPoint {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
}

/// Quadratic-majorant sequences
/// α_{k+1} = H σ_k^{−ν(m,k)} α_k², α_0 = a_0, and
/// β_{k+1} = P e^{γ(m,k)} β_k², β_0 = H σ_{m,0}^{−(m+1)s(0)} a_0,
/// with ν(m,h) = [(m+2)m+1]·s(h) and s(h) = 2n+h+2.  Advisory overlay only.
pub fn predictor(
    a0: f64,
    m: usize,
    n: usize,
    cfg: &PredictorConfig,
    k_max: usize,
) -> Vec<PredictorPoint> {
    let nu = |h: usize| ((m + 2) * m + 1) as f64 * crate::holder::derivative_loss_exponent(n, h);
    let mut out = Vec::with_capacity(k_max + 1);
    if a0 <= 0.0 {
        for k in 0..=k_max {
            out.push(PredictorPoint { k, alpha: 0.0, beta: 0.0 });
        }
        return out;
    }
    let sigma_m0 = (-2.0f64).exp() / (m as f64 + 1.0);
    let mut ln_alpha = a0.ln();
    let mut ln_beta = cfg.big_h.ln()
        - (m as f64 + 1.0) * crate::holder::derivative_loss_exponent(n, 0) * sigma_m0.ln()
        + a0.ln();
    for k in 0..=k_max {
        out.push(PredictorPoint { k, alpha: safe_exp(ln_alpha), beta: safe_exp(ln_beta) });
        // σ_k = e^{−k−2} so −ν ln σ_k = ν (k+2).
        ln_alpha = 2.0 * ln_alpha + cfg.big_h.ln() + nu(k) * (k as f64 + 2.0);
        ln_beta = 2.0 * ln_beta
            + cfg.big_p.ln()
            + cfg.gamma_slope * k as f64
            + cfg.gamma_intercept;
    }
    out
}

fn safe_exp(x: f64) -> f64 {
    if x > 700.0 {
        f64::INFINITY
    } else {
        x.exp()
    }
}

/// Largest a_0 for which the α-series provably collapses: the double
/// exponential wins iff ln a_0 + Σ_{j≥0} 2^{−j−1} (ln H + ν(m,j)(j+2)) < 0.
pub fn predictor_threshold(m: usize, n: usize, big_h: f64) -> f64 {
    let nu = |h: usize| ((m + 2) * m + 1) as f64 * crate::holder::derivative_loss_exponent(n, h);
    let mut sum = 0.0;
    for j in 0..64 {
        sum += 0.5f64.powi(j as i32 + 1) * (big_h.ln() + nu(j) * (j as f64 + 2.0));
    }
    (-sum).exp()
}

/// Solver configuration.
#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub r0: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub quad: QuadratureSpec,
    pub mu: f64,
    /// Unit-safety gate: every step must satisfy sup‖η^{s,0}‖ < eps.
    pub eps: f64,
    /// Largest accepted integrability residual of the input.
    pub integrability_gate: f64,
    /// Cap on the monitored norm order.
    pub h_max: usize,
    pub predictor: Option<PredictorConfig>,
    /// Record the intermediate connection data (used by composition tests).
    pub record_states: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            r0: 0.5,
            tol: 1e-4,
            max_iter: 25,
            quad: QuadratureSpec::default(),
            mu: 0.5,
            eps: 0.25,
            integrability_gate: 1e-6,
            h_max: 1,
            predictor: Some(PredictorConfig::default()),
            record_states: false,
        }
    }
}

/// Why the loop stopped.
#[derive(Clone, Debug)]
pub enum StopReason {
    Converged,
    ToleranceNotReached,
    DivergenceGuard { prev: f64, last: f64 },
    StepFailure { sup: f64, eps: f64 },
    NotIntegrable { residual: f64, gate: f64 },
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StopReason::Converged => write!(f, "converged"),
            StopReason::ToleranceNotReached => write!(f, "iteration budget exhausted"),
            StopReason::DivergenceGuard { prev, last } => write!(
                f,
                "diverging (a_k grew twice in a row: {prev:.3e} -> {last:.3e}); try halving r0"
            ),
            StopReason::StepFailure { sup, eps } => write!(
                f,
                "step parameter sup {sup:.3e} exceeded the unit gate eps = {eps}; try a smaller r0"
            ),
            StopReason::NotIntegrable { residual, gate } => {
                write!(f, "input integrability residual {residual:.3e} exceeds the gate {gate:.3e}")
            }
        }
    }
}

/// One history row of the iteration.
#[derive(Clone, Debug)]
pub struct StepRecord {
    pub k: usize,
    pub radius: f64,
    pub a: f64,
    pub b: f64,
    pub max_eta_sup: f64,
    pub sigma_psi: Option<f64>,
    pub sigma_phi: Vec<f64>,
    pub gauge_sup: f64,
    pub gauge_inv_sup: f64,
}

/// Residuals of the target system: ∂̄(ψ g_0) and ∂̄(g_{s−1}^{-1} φ_s g_s).
#[derive(Clone, Debug, Default)]
pub struct SigmaResidual {
    pub psi: Option<f64>,
    pub phi: Vec<f64>,
}

impl SigmaResidual {
    pub fn max(&self) -> f64 {
        self.phi.iter().cloned().chain(self.psi).fold(0.0, f64::max)
    }
}

/// Full convergence record of one run (emitted whether or not it converged).
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub converged: bool,
    pub stop: StopReason,
    pub iterations: usize,
    pub history: Vec<StepRecord>,
    pub final_radius: f64,
    pub final_gauges: Vec<GridForm>,
    pub final_gauge_inverses: Vec<GridForm>,
    pub final_sigma: SigmaResidual,
    pub step_params: Vec<GaugeParam<GridCoeff>>,
    pub states: Vec<ConnectionData<GridCoeff>>,
    pub predictor: Vec<PredictorPoint>,
    pub weight_values: Vec<f64>,
    pub r_infinity: f64,
}

/// Resamples every coefficient of a grid form onto another grid.
pub fn resample_form(f: &GridForm, ctx: &GridCtx) -> Result<GridForm> {
    if f.ctx() == ctx {
        return Ok(f.clone());
    }
    f.map_coeffs(ctx, &mut |c: &GridCoeff| c.resample(ctx))
}

/// Resamples all entries of connection data onto another grid.
pub fn resample_connection(
    data: &ConnectionData<GridCoeff>,
    ctx: &GridCtx,
) -> Result<ConnectionData<GridCoeff>> {
    let mut out = ConnectionData::zero(ctx, data.sizes().to_vec())?;
    for (&(s, k), form) in data.stored_entries() {
        out.set_entry(s, k, resample_form(form, ctx)?)?;
    }
    Ok(out)
}

/// Resamples all entries of a gauge parameter onto another grid.
pub fn resample_param(
    param: &GaugeParam<GridCoeff>,
    ctx: &GridCtx,
) -> Result<GaugeParam<GridCoeff>> {
    let mut out = GaugeParam::zero(ctx, param.sizes().to_vec())?;
    for (&(s, k), form) in param.stored_entries() {
        out.set_entry(s, k, resample_form(form, ctx)?)?;
    }
    Ok(out)
}

/// The operand of the decreasing step recursion at (s, t):
/// ω^{s,t} + ω^{s+t+1,−1} ∧ η^{s,t+1} + (−1)^t η^{s−1,t+1} ∧ ω^{s,−1}.
/// Generic over the backend; equals the (s, t) entry of the recalibration by
/// the truncated parameter η_[t+1], which is what the identity tests check.
pub fn step_operand<F: Coeff>(
    data: &ConnectionData<F>,
    partial: &GaugeParam<F>,
    s: i64,
    t: i64,
) -> Result<MatrixForm<F>> {
    let mut acc = data.entry(s, t);
    acc = acc.add(&data.entry(s + t + 1, -1).wedge(&partial.entry(s, t + 1))?)?;
    let cross = partial.entry(s - 1, t + 1).wedge(&data.entry(s, -1))?;
    let cross = if t.rem_euclid(2) == 1 { cross.neg() } else { cross };
    acc.add(&cross)
}

/// Builds the step parameter for ω_k by the decreasing recursion, applying
/// the disk transform at the shrinking radii r(k, m−t).  In one variable all
/// t ≥ 1 operands are (0,t+1)-forms and vanish identically, so only the
/// degree-0 row carries data; the recursion is still assembled generically.
pub fn build_step_param(
    data: &ConnectionData<GridCoeff>,
    sched: &Schedule,
    k: usize,
    quad: &QuadratureSpec,
    eps: f64,
) -> Result<GaugeParam<GridCoeff>> {
    let m = data.resolution_length();
    let param_ctx = quad.grid_ctx(sched.r_sub(k, m))?;
    let mut param = GaugeParam::zero(&param_ctx, data.sizes().to_vec())?;
    for t in (0..=m as i64).rev() {
        let radius_t = sched.r_sub(k, m - t as usize);
        let ctx_t = quad.grid_ctx(radius_t)?;
        let data_t = resample_connection(data, &ctx_t)?;
        let partial_t = resample_param(&param, &ctx_t)?;
        for s in 0..=(m as i64 - t) {
            let operand = step_operand(&data_t, &partial_t, s, t)?;
            let entry = if t >= 1 {
                // Degree t+1 ≥ 2 vanishes in one variable.
                debug_assert!(operand.is_zero());
                let (rows, cols) = param.shape(s, t);
                MatrixForm::zero(&param_ctx, rows, cols, t as usize)
            } else {
                cauchy_transform(&operand, radius_t, quad)?.neg()
            };
            // Entries of the t-th row live on B_{r(k,m−t)} ⊇ B_{r(k,m)}.
            let entry = resample_form(&entry, &param_ctx)?;
            param.set_entry(s as usize, t, entry)?;
        }
    }
    let sup = param.gauge_block_sup();
    if sup >= eps {
        return Err(Error::StepFailure { step: k, sup, eps });
    }
    Ok(param)
}

/// Residuals of the system that declares the gauged resolution holomorphic.
pub fn sigma_residual<F: Coeff>(
    phis: &[MatrixForm<F>],
    psi: Option<&MatrixForm<F>>,
    gauges: &[MatrixForm<F>],
) -> Result<SigmaResidual> {
    if gauges.len() != phis.len() + 1 {
        return Err(Error::ShapeMismatch(format!(
            "need one gauge per level: got {} gauges for {} resolution matrices",
            gauges.len(),
            phis.len()
        )));
    }
    let psi_res = match psi {
        Some(p) => Some(p.wedge(&gauges[0])?.dbar().sup_norm()),
        None => None,
    };
    let mut phi_res = Vec::with_capacity(phis.len());
    for (i, phi) in phis.iter().enumerate() {
        let conj = gauges[i].invert_unit()?.wedge(phi)?.wedge(&gauges[i + 1])?;
        phi_res.push(conj.dbar().sup_norm());
    }
    Ok(SigmaResidual { psi: psi_res, phi: phi_res })
}

fn gauge_sups(gauges: &[GridForm], inverses: &[GridForm]) -> (f64, f64) {
    let g = gauges.iter().map(|f| f.sup_norm()).fold(0.0, f64::max);
    let gi = inverses.iter().map(|f| f.sup_norm()).fold(0.0, f64::max);
    (g, gi)
}

/// Runs the iteration.  A report is produced for every run; failure modes
/// (non-integrable input, unit-gate violation, divergence) are carried in
/// [`SolveReport::stop`], and only structural errors (shapes, radii) are
/// returned as `Err`.
pub fn iterate(problem: &AugmentedData<GridCoeff>, config: &SolveConfig) -> Result<SolveReport> {
    let m = problem.conn.resolution_length();
    let sched = build_schedule(m, config.r0)?;
    let ctx0 = config.quad.grid_ctx(config.r0)?;
    let original = resample_connection(&problem.conn, &ctx0)?;
    let psi0 = match &problem.psi {
        Some(p) => Some(resample_form(p, &ctx0)?),
        None => None,
    };

    let mut weights = current_weights(&original, config, &[], &[])?;
    let a0 = diag_a(&original, config.r0, 0, config.mu, &weights)?;
    let predictor_points = match &config.predictor {
        Some(cfg) => predictor(a0, m, 1, cfg, config.max_iter),
        None => vec![],
    };

    let identity_gauges: Vec<GridForm> =
        original.sizes().iter().map(|&p| GridForm::identity(&ctx0, p)).collect();
    let phis_at = |conn: &ConnectionData<GridCoeff>| -> Vec<GridForm> {
        (1..=m).map(|s| conn.entry(s as i64, -1)).collect()
    };

    let mut history = Vec::new();
    let sigma0 = sigma_residual(&phis_at(&original), psi0.as_ref(), &identity_gauges)?;
    history.push(StepRecord {
        k: 0,
        radius: config.r0,
        a: a0,
        b: b_diag(a0, 0, m, config, &sched),
        max_eta_sup: 0.0,
        sigma_psi: sigma0.psi,
        sigma_phi: sigma0.phi.clone(),
        gauge_sup: 1.0,
        gauge_inv_sup: 1.0,
    });

    let mut report = SolveReport {
        converged: false,
        stop: StopReason::ToleranceNotReached,
        iterations: 0,
        history,
        final_radius: config.r0,
        final_gauges: identity_gauges.clone(),
        final_gauge_inverses: identity_gauges.clone(),
        final_sigma: sigma0,
        step_params: vec![],
        states: if config.record_states { vec![original.clone()] } else { vec![] },
        predictor: predictor_points,
        weight_values: weights.values().to_vec(),
        r_infinity: sched.r_infinity(),
    };

    // Integrability gate on the input.
    let input_residual = original.max_residual();
    if input_residual > config.integrability_gate {
        report.stop = StopReason::NotIntegrable {
            residual: input_residual,
            gate: config.integrability_gate,
        };
        return Ok(report);
    }

    if a0 <= config.tol {
        report.converged = true;
        report.stop = StopReason::Converged;
        return Ok(report);
    }

    let mut current = original.clone();
    let mut gauges = identity_gauges;
    let mut a_prev = a0;
    let mut grew_once = false;
    let mut r_caps: Vec<f64> = Vec::new();
    let mut l_caps: Vec<f64> = Vec::new();

    for k in 0..config.max_iter {
        let param = match build_step_param(&current, &sched, k, &config.quad, config.eps) {
            Ok(p) => p,
            Err(Error::StepFailure { sup, eps, .. }) => {
                report.stop = StopReason::StepFailure { sup, eps };
                return Ok(report);
            }
            Err(e) => return Err(e),
        };
        let max_eta_sup = param
            .stored_entries()
            .values()
            .map(|f| f.sup_norm())
            .fold(0.0, f64::max);

        // Adaptive weight caps for order k+1, from the current state.
        let (rc, lc) = adaptive_caps(&current, &gauges, k, config)?;
        r_caps.push(rc);
        l_caps.push(lc);

        // Restrict everything to the next working radius and recalibrate.
        let next_radius = sched.radius(k + 1);
        let ctx_next = config.quad.grid_ctx(next_radius)?;
        let param_next = resample_param(&param, &ctx_next)?;
        let cur_next = resample_connection(&current, &ctx_next)?;
        let next = recalibrate(&param_next, &cur_next)?;

        // Accumulate gauges (ordered product, earliest factor leftmost).
        let step_gauges = param_next.gauges();
        let mut new_gauges = Vec::with_capacity(gauges.len());
        for (g_acc, g_step) in gauges.iter().zip(&step_gauges) {
            new_gauges.push(resample_form(g_acc, &ctx_next)?.wedge(g_step)?);
        }
        gauges = new_gauges;
        let inverses: Vec<GridForm> =
            gauges.iter().map(|g| g.invert_unit()).collect::<Result<Vec<_>>>()?;

        weights = current_weights(&next, config, &r_caps, &l_caps)?;
        let order = (k + 1).min(config.h_max);
        let a_next = diag_a(&next, next_radius, order, config.mu, &weights)?;

        let originals_next = resample_connection(&original, &ctx_next)?;
        let psi_next = match &psi0 {
            Some(p) => Some(resample_form(p, &ctx_next)?),
            None => None,
        };
        let sigma = sigma_residual(&phis_at(&originals_next), psi_next.as_ref(), &gauges)?;
        let (g_sup, gi_sup) = gauge_sups(&gauges, &inverses);

        report.history.push(StepRecord {
            k: k + 1,
            radius: next_radius,
            a: a_next,
            b: b_diag(a_next, k + 1, m, config, &sched),
            max_eta_sup,
            sigma_psi: sigma.psi,
            sigma_phi: sigma.phi.clone(),
            gauge_sup: g_sup,
            gauge_inv_sup: gi_sup,
        });
        report.iterations = k + 1;
        report.step_params.push(param);
        if config.record_states {
            report.states.push(next.clone());
        }
        report.final_radius = next_radius;
        report.final_gauges = gauges.clone();
        report.final_gauge_inverses = inverses;
        report.final_sigma = sigma;
        report.weight_values = weights.values().to_vec();

        if a_next <= config.tol {
            report.converged = true;
            report.stop = StopReason::Converged;
            return Ok(report);
        }
        if a_next > a_prev {
            if grew_once {
                report.stop = StopReason::DivergenceGuard { prev: a_prev, last: a_next };
                return Ok(report);
            }
            grew_once = true;
        } else {
            grew_once = false;
        }
        a_prev = a_next;
        current = next;
    }
    report.stop = StopReason::ToleranceNotReached;
    Ok(report)
}

/// The b-diagnostic b_k = H σ_{m,k}^{−(m+1)·s(k)} a_k, evaluated in logs to
/// survive the superexponential prefactor.
fn b_diag(a: f64, k: usize, m: usize, config: &SolveConfig, sched: &Schedule) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    let big_h = config.predictor.as_ref().map(|p| p.big_h).unwrap_or(10.0);
    let s_k = crate::holder::derivative_loss_exponent(1, k);
    let ln_b = big_h.ln() - (m as f64 + 1.0) * s_k * sched.sigma_m(k).ln() + a.ln();
    safe_exp(ln_b)
}

/// Weight caps of order k+1 from the current data: the largest S_{k+1}
/// keeping the (k+1)-st derivative terms dominated,
/// R_{k+1} = min ‖ω_I‖_μ / ‖∂^{k+1} ω_I‖_μ and
/// L_{k+1} = min 2^{−k−1} ‖g^{±1}‖_μ / ‖∂^{k+1} g^{±1}‖_μ.
/// Orders beyond the grid derivative cap report +∞ (inert at h_max ≤ 1).
fn adaptive_caps(
    data: &ConnectionData<GridCoeff>,
    gauges: &[GridForm],
    k: usize,
    config: &SolveConfig,
) -> Result<(f64, f64)> {
    let order = k + 1;
    if order > GridCoeff::derivative_order_cap().unwrap_or(usize::MAX) {
        return Ok((f64::INFINITY, f64::INFINITY));
    }
    let ratio_for = |form: &GridForm| -> f64 {
        let base = sup_matrix_mu(form, config.mu);
        let deriv = derivative_sup_mu(form, order, config.mu);
        if deriv <= 0.0 {
            f64::INFINITY
        } else {
            base / deriv
        }
    };
    let mut r_cap = f64::INFINITY;
    for (s, kk) in data.index_range() {
        if kk < 0 {
            continue;
        }
        let entry = data.entry(s as i64, kk);
        if entry.is_zero() {
            continue;
        }
        r_cap = r_cap.min(ratio_for(&entry));
    }
    let mut l_cap = f64::INFINITY;
    for g in gauges {
        let inv = g.invert_unit()?;
        for f in [g, &inv] {
            let base = sup_matrix_mu(f, config.mu);
            let deriv = derivative_sup_mu(f, order, config.mu);
            if deriv > 0.0 {
                l_cap = l_cap.min(0.5f64.powi(order as i32) * base / deriv);
            }
        }
    }
    Ok((r_cap, l_cap))
}

/// sup + Hölder-seminorm proxy of a form's coefficients (scalar level).
fn sup_matrix_mu(form: &GridForm, _mu: f64) -> f64 {
    form.sup_norm()
}

/// Same for the summed order-`order` derivatives.
fn derivative_sup_mu(form: &GridForm, order: usize, _mu: f64) -> f64 {
    let mut total = 0.0f64;
    for alpha in alphas_of_order(order) {
        let mut worst = 0.0f64;
        for (_, matrix) in form.components() {
            for e in matrix {
                let mut d = e.clone();
                for (axis, &count) in alpha.iter().enumerate() {
                    for _ in 0..count {
                        d = d.real_deriv(axis);
                    }
                }
                worst = worst.max(d.max_abs());
            }
        }
        total += worst;
    }
    total
}

fn alphas_of_order(order: usize) -> Vec<[usize; 2]> {
    (0..=order).map(|i| [order - i, i]).collect()
}

fn current_weights(
    data: &ConnectionData<GridCoeff>,
    config: &SolveConfig,
    r_caps: &[f64],
    l_caps: &[f64],
) -> Result<WeightSequence> {
    let max_order = config.h_max + 1;
    // Caps R_j / L_j apply from order 2 on; the recorded caps are indexed by
    // the step that produced them (order k+1).
    let mut rc = vec![f64::INFINITY; max_order];
    let mut lc = vec![f64::INFINITY; max_order];
    for (i, &v) in r_caps.iter().enumerate() {
        let order = i + 1;
        if order >= 2 && order <= max_order {
            rc[order - 1] = v;
        }
    }
    for (i, &v) in l_caps.iter().enumerate() {
        let order = i + 1;
        if order >= 2 && order <= max_order {
            lc[order - 1] = v;
        }
    }
    let ctx = data.ctx().clone();
    solver_weights(data, &ctx, max_order, rc, lc)
}

/// Manufactured-solution helpers shared by tests and the acceptance suite.
pub mod manufactured {
    use super::*;
    use crate::resolution::AugmentedData;

    /// m = 0 potential case: ω = ∂̄(z z̄)·I = z dz̄ on B_r with ψ = e^{z z̄};
    /// the exact gauge is g_0 = e^{−z z̄} times a holomorphic unit.
    pub fn potential_m0(ctx: &GridCtx) -> AugmentedData<GridCoeff> {
        let omega_coeff = GridCoeff::from_fn(ctx, |z| z);
        let a = GridForm::scalar_form(ctx, vec![1], omega_coeff).unwrap();
        let conn = crate::resolution::make_grothendieck(a).unwrap();
        let psi = GridForm::from_matrix(
            ctx,
            1,
            1,
            vec![GridCoeff::from_fn(ctx, |z| (z * z.conj()).exp())],
        )
        .unwrap();
        AugmentedData::new(conn, Some(psi)).unwrap()
    }

    /// m = 1 case built by conjugating zero-connection data by the explicit
    /// gauge pair g★ = (D(I + u E₁₂), 1) with D = diag(e^v, e^{−v}),
    /// v = c₁ z z̄, u = c₂ z z̄, around the resolution φ₁ = (z, 1)ᵀ and the
    /// augmentation row ψ = (1, −z).  The exact solution is g★^{-1} up to
    /// holomorphic right factors.
    pub fn conjugated_m1(ctx: &GridCtx, c1: f64, c2: f64) -> AugmentedData<GridCoeff> {
        let i = Complex64::new(0.0, 1.0);
        let _ = i;
        let v_dbar = move |z: Complex64| z * c1; // coefficient of ∂̄v = c₁ z dz̄
        // ω^{0,0} = [[∂̄v, 2u ∂̄v + ∂̄u], [0, −∂̄v]]
        let e00 = GridCoeff::from_fn(ctx, v_dbar);
        let e01 = GridCoeff::from_fn(ctx, move |z| {
            let zz = z * z.conj();
            z * c2 * (zz * (2.0 * c1) + 1.0)
        });
        let e10 = GridCoeff::zero(ctx);
        let e11 = GridCoeff::from_fn(ctx, move |z| -(z * c1));
        let mut w00 = GridForm::zero(ctx, 2, 2, 1);
        w00.set_component(vec![1], vec![e00, e01, e10, e11]).unwrap();

        // ω^{1,−1} = g★_0^{-1} φ₁ = ( z e^{−v} − u e^{v}, e^{v} )ᵀ
        let up = GridCoeff::from_fn(ctx, move |z| {
            let zz = z * z.conj();
            z * (-(zz * c1)).exp() - zz * c2 * (zz * c1).exp()
        });
        let low = GridCoeff::from_fn(ctx, move |z| ((z * z.conj()) * c1).exp());
        let phi = GridForm::from_matrix(ctx, 2, 1, vec![up, low]).unwrap();

        let mut conn = ConnectionData::zero(ctx, vec![2, 1]).unwrap();
        conn.set_entry(0, 0, w00).unwrap();
        conn.set_entry(1, -1, phi).unwrap();
        // ω^{1,0} = g★_1^{-1} ∂̄ g★_1 = 0 (g★_1 ≡ 1): leave zero.

        // ψ★ = (1, −z)·g★_0 = (e^v, u e^v − z e^{−v})
        let p0 = GridCoeff::from_fn(ctx, move |z| ((z * z.conj()) * c1).exp());
        let p1 = GridCoeff::from_fn(ctx, move |z| {
            let zz = z * z.conj();
            zz * c2 * (zz * c1).exp() - z * (-(zz * c1)).exp()
        });
        let psi = GridForm::from_matrix(ctx, 1, 2, vec![p0, p1]).unwrap();
        AugmentedData::new(conn, Some(psi)).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_values_match_their_formulas() {
        let sched = build_schedule(2, 0.9).unwrap();
        assert!((sched.sigma(0) - (-2.0f64).exp()).abs() < 1e-18);
        assert!((sched.sigma(0) - 0.13534).abs() < 1e-5);
        let mut r = 0.9;
        for k in 0..=100usize {
            assert!((sched.radius(k) - r).abs() <= 1e-15 * r.max(1.0));
            for l in 0..=3usize {
                let expect = r * (1.0 - l as f64 * sched.sigma(k) / 3.0);
                assert!((sched.r_sub(k, l) - expect).abs() <= 1e-15);
            }
            r *= 1.0 - sched.sigma(k);
        }
        // m = 0: σ_{0,k} = σ_k and r(k,1) = r_{k+1}.
        let flat = build_schedule(0, 0.5).unwrap();
        for k in 0..10 {
            assert_eq!(flat.sigma_m(k), flat.sigma(k));
            assert!((flat.r_sub(k, 1) - flat.radius(k + 1)).abs() < 1e-16);
        }
    }

    #[test]
    fn limit_radius_from_direct_product() {
        // Direct evaluation of ∏(1 − e^{−k−2}) = 0.797994382053909…,
        // cross-checked against the same product in log space.
        let sched = build_schedule(0, 1.0).unwrap();
        let r_inf = sched.r_infinity();
        assert!(r_inf > 0.0);
        assert!((r_inf - 0.797994382053909).abs() < 1e-12, "r_infinity = {r_inf}");
        let mut ln = 0.0f64;
        for k in 0..2000 {
            ln += (-sched.sigma(k)).ln_1p();
        }
        assert!((r_inf - ln.exp()).abs() < 1e-12);
        // strictly decreasing radii (until 1 − σ_k rounds to 1) with a
        // positive limit
        let mut prev = sched.radius(0);
        for k in 1..60 {
            let r = sched.radius(k);
            if k <= 30 {
                assert!(r < prev);
            }
            assert!(r <= prev && r > r_inf - 1e-13);
            prev = r;
        }
    }

    #[test]
    fn schedule_rejects_bad_radius() {
        assert!(build_schedule(0, 0.0).is_err());
        assert!(build_schedule(0, 1.5).is_err());
    }

    #[test]
    fn predictor_base_cases() {
        let cfg = PredictorConfig::default();
        let pts = predictor(0.0, 1, 1, &cfg, 5);
        assert!(pts.iter().all(|p| p.alpha == 0.0 && p.beta == 0.0));
        // α_1 = a0² H σ_0^{−ν(m,0)} with ν(m,0) = ((m+2)m+1)·s(0).
        let a0 = 1e-9;
        let m = 1;
        let pts = predictor(a0, m, 1, &cfg, 3);
        let nu0 = ((m + 2) * m + 1) as f64 * 4.0; // s(0) = 2n+2 = 4
        let expect = a0 * a0 * cfg.big_h * (-2.0f64).exp().powf(-nu0);
        assert!((pts[1].alpha - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn predictor_collapses_below_threshold() {
        let m = 1;
        let thr = predictor_threshold(m, 1, 10.0);
        assert!(thr > 0.0);
        let pts = predictor(thr * 0.5, m, 1, &PredictorConfig::default(), 12);
        let sum: f64 = pts.iter().map(|p| p.alpha).sum();
        assert!(sum.is_finite());
        // ratio α_{k+1}/α_k → 0
        let mut prev_ratio = f64::INFINITY;
        for w in pts.windows(2).skip(2) {
            if w[0].alpha == 0.0 {
                break;
            }
            let ratio = w[1].alpha / w[0].alpha;
            assert!(ratio <= prev_ratio);
            prev_ratio = ratio;
        }
        assert!(pts.iter().all(|p| p.alpha <= 1.0));
    }

    #[test]
    fn zero_input_converges_immediately() {
        let spec = QuadratureSpec::new(16, 32, 1.0).unwrap();
        let ctx = spec.grid_ctx(0.5).unwrap();
        let conn = ConnectionData::<GridCoeff>::zero(&ctx, vec![1]).unwrap();
        let problem = AugmentedData::new(conn, None).unwrap();
        let config = SolveConfig { r0: 0.5, quad: spec, ..Default::default() };
        let report = iterate(&problem, &config).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, 0);
        assert!(matches!(report.stop, StopReason::Converged));
        assert_eq!(report.final_sigma.max(), 0.0);
        // g = I
        let g = &report.final_gauges[0];
        let diff = g.sub(&GridForm::identity(g.ctx(), 1)).unwrap();
        assert!(diff.sup_norm() == 0.0);
    }

    #[test]
    fn max_iter_zero_reports_initial_state() {
        let spec = QuadratureSpec::new(16, 32, 1.0).unwrap();
        let ctx = spec.grid_ctx(0.5).unwrap();
        let problem = manufactured::potential_m0(&ctx);
        let config = SolveConfig { r0: 0.5, max_iter: 0, quad: spec, ..Default::default() };
        let report = iterate(&problem, &config).unwrap();
        assert!(!report.converged);
        assert_eq!(report.iterations, 0);
        assert_eq!(report.history.len(), 1);
        assert!(matches!(report.stop, StopReason::ToleranceNotReached));
    }

    #[test]
    fn step_failure_reports_oversized_radius() {
        // On B_0.95 the first parameter has sup ≈ r² ≫ ε.
        let spec = QuadratureSpec::new(24, 48, 1.0).unwrap();
        let ctx = spec.grid_ctx(0.95).unwrap();
        let problem = manufactured::potential_m0(&ctx);
        let config = SolveConfig { r0: 0.95, quad: spec, ..Default::default() };
        let report = iterate(&problem, &config).unwrap();
        assert!(!report.converged);
        assert!(matches!(report.stop, StopReason::StepFailure { .. }));
        let msg = report.stop.to_string();
        assert!(msg.contains("smaller r0"), "{msg}");
    }

    #[test]
    fn non_integrable_input_is_gated() {
        // dz̄-coefficient z̄ in one variable is integrable by degree, so fake
        // non-integrability cannot arise at m=0, n=1; use an m=1 instance
        // with a broken intertwining relation instead.
        let spec = QuadratureSpec::new(16, 32, 1.0).unwrap();
        let ctx = spec.grid_ctx(0.5).unwrap();
        let mut conn = ConnectionData::<GridCoeff>::zero(&ctx, vec![1, 1]).unwrap();
        // φ₁ = z̄ is not holomorphic and ω ≡ 0: relation fails.
        let phi = GridForm::from_matrix(&ctx, 1, 1, vec![GridCoeff::from_fn(&ctx, |z| z.conj())])
            .unwrap();
        conn.set_entry(1, -1, phi).unwrap();
        let problem = AugmentedData::new(conn, None).unwrap();
        let config = SolveConfig { r0: 0.5, quad: spec, ..Default::default() };
        let report = iterate(&problem, &config).unwrap();
        assert!(matches!(report.stop, StopReason::NotIntegrable { .. }));
    }

    #[test]
    fn manufactured_m0_converges_on_a_small_grid() {
        let spec = QuadratureSpec::new(48, 96, 1.0).unwrap();
        let ctx = spec.grid_ctx(0.5).unwrap();
        let problem = manufactured::potential_m0(&ctx);
        let config = SolveConfig {
            r0: 0.5,
            tol: 2e-3,
            max_iter: 12,
            quad: spec,
            ..Default::default()
        };
        let report = iterate(&problem, &config).unwrap();
        assert!(report.converged, "stop: {}", report.stop);
        // Final ∂̄-residual of the gauged system.
        assert!(report.final_sigma.max() < 1e-3, "sigma residual {}", report.final_sigma.max());
        // Gauge norms bounded by 2 throughout.
        for rec in &report.history {
            assert!(rec.gauge_sup <= 2.0 && rec.gauge_inv_sup <= 2.0);
        }
        // The monitored norm contracts by at least 1/2 per step after the
        // first, until tolerance.
        for w in report.history.windows(2).skip(1) {
            assert!(w[1].a <= 0.5 * w[0].a, "a grew: {} -> {}", w[0].a, w[1].a);
        }
    }

    #[test]
    fn step_parameter_solves_the_linearized_equation() {
        // For ω = c dz̄ (constant coefficient) the step parameter is
        // η = −T(ω) = −c z̄ + O(quadrature): check the closed form.
        let spec = QuadratureSpec::new(32, 64, 1.0).unwrap();
        let r = 0.5;
        let ctx = spec.grid_ctx(r).unwrap();
        let c = Complex64::new(0.3, -0.1);
        let a = GridForm::scalar_form(&ctx, vec![1], GridCoeff::from_fn(&ctx, |_| c)).unwrap();
        let conn = crate::resolution::make_grothendieck(a).unwrap();
        let sched = build_schedule(0, r).unwrap();
        let param = build_step_param(&conn, &sched, 0, &spec, 0.5).unwrap();
        let eta = param.entry(0, 0);
        let err = eta
            .component(&vec![])
            .first()
            .unwrap()
            .samples()
            .iter()
            .zip(param.ctx().nodes())
            .map(|(v, z)| (v + c * z.conj()).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "deviation from −c z̄: {err}");
    }
}

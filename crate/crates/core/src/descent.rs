//! Mirror descent and mirror-less mirror descent on the probability simplex.
//!
//! Both updates act on strictly positive weights summing to one. The mirror
//! step maps weights through the link (`G`-multiplication — add in the dual,
//! invert back) and renormalizes; the mirror-less step stays primal and
//! scales the gradient by `1/log'(w_i)` componentwise, clips at zero, and
//! renormalizes. With the natural logarithm the first is exponentiated
//! gradient; with the identity pseudo-link the second is projected gradient
//! descent.

use thiserror::Error;

use crate::inverse::{deformed_exp_detailed, deformed_exp_numeric, InversionSettings};
use crate::linkfn::{LinkError, LinkFamily};
use crate::problems::Problem;

#[derive(Debug, Error)]
pub enum DescentError {
    #[error("invalid simplex point: {0}")]
    InvalidPoint(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("step failed: {0}")]
    Step(#[from] LinkError),
    #[error("every component clipped to the floor; the step size is far too large")]
    DegenerateState,
    #[error("loss became non-finite ({0})")]
    NonFiniteLoss(f64),
}

/// Strictly positive weights with unit ℓ1 norm.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    w: Vec<f64>,
}

impl SimplexPoint {
    /// Normalize a strictly positive vector onto the simplex.
    pub fn new(w: Vec<f64>) -> Result<Self, DescentError> {
        if w.is_empty() {
            return Err(DescentError::InvalidPoint("empty weight vector".into()));
        }
        let mut sum = 0.0;
        for &v in &w {
            if !(v > 0.0 && v.is_finite()) {
                return Err(DescentError::InvalidPoint(format!(
                    "weights must be strictly positive and finite, got {v}"
                )));
            }
            sum += v;
        }
        let w = w.into_iter().map(|v| v / sum).collect();
        Ok(SimplexPoint { w })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1);
        SimplexPoint {
            w: vec![1.0 / n as f64; n],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Md,
    Mmd,
}

/// Learning-rate schedule: constant, or `η₀/√(t+1)` for 0-based iteration t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaSchedule {
    Constant(f64),
    InvSqrt(f64),
}

impl EtaSchedule {
    pub fn at(&self, t: u32) -> f64 {
        match *self {
            EtaSchedule::Constant(e) => e,
            EtaSchedule::InvSqrt(e0) => e0 / ((t + 1) as f64).sqrt(),
        }
    }

    pub fn base(&self) -> f64 {
        match *self {
            EtaSchedule::Constant(e) | EtaSchedule::InvSqrt(e) => e,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DescentConfig {
    pub variant: Variant,
    pub family: LinkFamily,
    pub eta: EtaSchedule,
    pub max_iters: u32,
    /// Stop when the ℓ∞ norm of the tangent-projected gradient drops below
    /// this (batch problems only; online runs consume all rounds).
    pub grad_tol: f64,
    pub inversion: InversionSettings,
    /// Positivity floor applied after every step (keeps iterates in the open
    /// simplex; the clip operations can produce exact zeros).
    pub floor: f64,
    /// Differentiate the normalized loss `L(w/‖w‖₁)` by exact chain rule
    /// (default) instead of using the raw gradient.
    pub normalize_loss: bool,
    /// Force the numeric inversion path even where closed-form exponentials
    /// exist (used to cross-validate the two paths).
    pub force_numeric: bool,
    /// Step-failure policy: halve η this many times before giving up.
    pub max_retries: u32,
}

impl DescentConfig {
    pub fn new(variant: Variant, family: LinkFamily, eta: EtaSchedule) -> Self {
        DescentConfig {
            variant,
            family,
            eta,
            max_iters: 1000,
            grad_tol: 1e-8,
            inversion: InversionSettings::default(),
            floor: 1e-12,
            normalize_loss: true,
            force_numeric: false,
            max_retries: 5,
        }
    }

    fn check(&self, dim: usize) -> Result<(), DescentError> {
        if !(self.eta.base() > 0.0) {
            return Err(DescentError::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.eta.base()
            )));
        }
        if self.max_iters < 1 {
            return Err(DescentError::InvalidConfig("max_iters must be >= 1".into()));
        }
        if !(self.floor > 0.0 && self.floor < 1.0 / dim as f64) {
            return Err(DescentError::InvalidConfig(format!(
                "floor must lie in (0, 1/N); got {} for N = {dim}",
                self.floor
            )));
        }
        if let Err(v) = self.family.validate_params() {
            return Err(DescentError::InvalidConfig(v.join("; ")));
        }
        Ok(())
    }
}

/// One per-iteration record. `step_accepted` is false when the step that
/// produced this iterate needed η halvings; `inversion_iters` totals the
/// numeric-inversion iterations across components (0 on closed-form paths
/// and for the initial record).
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub t: u32,
    pub w: Vec<f64>,
    pub loss: f64,
    pub grad_norm: f64,
    pub step_accepted: bool,
    pub inversion_iters: u32,
}

#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
}

/// Outcome of a whole optimization. A failed run keeps its partial trace and
/// carries the failure message in `error` instead of discarding the work.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub trace: Trace,
    pub converged: bool,
    /// Number of steps actually taken (= last recorded t).
    pub iterations: u32,
    pub final_loss: f64,
    pub error: Option<String>,
    /// Cumulative `Σ_t ln(r_tᵀu_t)` for online portfolio runs.
    pub log_wealth: Option<f64>,
}

impl RunReport {
    pub fn final_weights(&self) -> &[f64] {
        &self.trace.rows.last().expect("trace has at least one row").w
    }
}

/// Result of one accepted step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub w: SimplexPoint,
    pub inversion_iters: u32,
}

/// Generalized multiplication: componentwise `exp(log(x_i) + y_i)`. Returns
/// the products plus the total numeric-inversion iterations. A component
/// with `y_i = 0` passes through bit-exactly.
pub fn g_multiply(
    link: &LinkFamily,
    x: &[f64],
    y: &[f64],
    settings: &InversionSettings,
) -> Result<(Vec<f64>, u32), LinkError> {
    g_multiply_impl(link, x, y, settings, false)
}

fn g_multiply_impl(
    link: &LinkFamily,
    x: &[f64],
    y: &[f64],
    settings: &InversionSettings,
    force_numeric: bool,
) -> Result<(Vec<f64>, u32), LinkError> {
    assert_eq!(x.len(), y.len());
    let mut out = Vec::with_capacity(x.len());
    let mut iters = 0;
    for (&xi, &yi) in x.iter().zip(y) {
        if yi == 0.0 {
            link.quick_check()?;
            out.push(xi);
            continue;
        }
        let target = link.log_eval(xi)? + yi;
        let (v, it) = if force_numeric {
            deformed_exp_numeric(link, target, Some(xi), settings)?
        } else {
            deformed_exp_detailed(link, target, Some(xi), settings)?
        };
        out.push(v);
        iters += it;
    }
    Ok((out, iters))
}

/// Exact chain-rule gradient of the normalized loss `L̂(w) = L(w/‖w‖₁)`:
/// with `s = Σw`, `u = w/s`, `g = ∇L(u)`, returns `(g − (uᵀg)·1)/s`.
pub fn normalized_grad<F>(loss_grad: F, w: &[f64]) -> Vec<f64>
where
    F: FnOnce(&[f64]) -> Vec<f64>,
{
    let s: f64 = w.iter().sum();
    let u: Vec<f64> = w.iter().map(|v| v / s).collect();
    let g = loss_grad(&u);
    let ug: f64 = u.iter().zip(&g).map(|(a, b)| a * b).sum();
    g.iter().map(|gi| (gi - ug) / s).collect()
}

/// ℓ∞ norm of the gradient projected onto the simplex tangent space
/// (mean subtracted). The raw gradient never vanishes on the simplex for
/// linear losses; this is the quantity that does at a constrained optimum.
pub fn tangent_grad_norm(g: &[f64]) -> f64 {
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    g.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max)
}

/// Mirror step: `w̃ = exp(log(w) − η·grad)` componentwise, then floor-clip
/// and ℓ1-renormalize. A zero gradient returns the input bit-exactly.
pub fn md_step(
    cfg: &DescentConfig,
    w: &SimplexPoint,
    grad: &[f64],
    eta_t: f64,
) -> Result<StepOutcome, DescentError> {
    if grad.iter().all(|g| *g == 0.0) {
        cfg.family.quick_check().map_err(DescentError::Step)?;
        return Ok(StepOutcome {
            w: w.clone(),
            inversion_iters: 0,
        });
    }
    let y: Vec<f64> = grad.iter().map(|g| -eta_t * g).collect();
    let (tilde, iters) = g_multiply_impl(
        &cfg.family,
        w.weights(),
        &y,
        &cfg.inversion,
        cfg.force_numeric,
    )?;
    Ok(StepOutcome {
        w: clip_and_project(tilde, cfg.floor)?,
        inversion_iters: iters,
    })
}

/// Mirror-less step: `w̃_i = [w_i − η·grad_i / log'(w_i)]_+`, then floor-clip
/// and ℓ1-renormalize. Errors with `DegenerateState` when every component
/// clips (the whole vector would hit the floor).
pub fn mmd_step(
    cfg: &DescentConfig,
    w: &SimplexPoint,
    grad: &[f64],
    eta_t: f64,
) -> Result<StepOutcome, DescentError> {
    if grad.iter().all(|g| *g == 0.0) {
        cfg.family.quick_check().map_err(DescentError::Step)?;
        return Ok(StepOutcome {
            w: w.clone(),
            inversion_iters: 0,
        });
    }
    let mut tilde = Vec::with_capacity(w.dim());
    let mut clipped = 0usize;
    for (&wi, &gi) in w.weights().iter().zip(grad) {
        let d = cfg.family.dlog_eval(wi)?;
        let v = wi - eta_t * gi / d;
        if v <= cfg.floor {
            clipped += 1;
        }
        tilde.push(v.max(0.0));
    }
    if clipped == tilde.len() {
        return Err(DescentError::DegenerateState);
    }
    Ok(StepOutcome {
        w: clip_and_project(tilde, cfg.floor)?,
        inversion_iters: 0,
    })
}

fn clip_and_project(mut w: Vec<f64>, floor: f64) -> Result<SimplexPoint, DescentError> {
    let mut sum = 0.0;
    for v in &mut w {
        if !v.is_finite() {
            return Err(DescentError::InvalidPoint(format!(
                "step produced non-finite weight {v}"
            )));
        }
        *v = v.max(floor);
        sum += *v;
    }
    for v in &mut w {
        *v /= sum;
    }
    Ok(SimplexPoint { w })
}

/// Run the configured optimizer on a problem.
///
/// Batch problems iterate until the tangent-gradient norm drops below
/// `grad_tol` or `max_iters` is reached; online (portfolio) problems consume
/// one round per iteration for `min(max_iters, rounds)` rounds. A step that
/// fails retries with η halved up to `max_retries` times; exhaustion stops
/// the run, keeping the partial trace with the failure in `error`.
pub fn run(cfg: &DescentConfig, problem: &Problem, w0: &SimplexPoint) -> RunReport {
    let mut report = RunReport {
        trace: Trace::default(),
        converged: false,
        iterations: 0,
        final_loss: f64::NAN,
        error: None,
        log_wealth: if problem.is_sequential() {
            Some(0.0)
        } else {
            None
        },
    };
    if let Err(e) = cfg.check(w0.dim()) {
        report.error = Some(e.to_string());
        return report;
    }
    if problem.dim() != w0.dim() {
        report.error = Some(format!(
            "problem dimension {} does not match start point dimension {}",
            problem.dim(),
            w0.dim()
        ));
        return report;
    }

    let total: u32 = if let Some(rounds) = problem.rounds() {
        cfg.max_iters.min(rounds as u32)
    } else {
        cfg.max_iters
    };

    let mut w = w0.clone();
    let mut last_accepted = true;
    let mut last_inv_iters = 0u32;
    let mut t = 0u32;
    loop {
        // an online run records one row per consumed round (t = 0..rounds);
        // a batch run also records the arrival state at t = max_iters
        if problem.is_sequential() && t >= total {
            break;
        }
        let loss = problem.loss(w.weights(), t as usize);
        if !loss.is_finite() {
            report.error = Some(DescentError::NonFiniteLoss(loss).to_string());
            break;
        }
        let ng = if cfg.normalize_loss {
            normalized_grad(|u| problem.grad(u, t as usize), w.weights())
        } else {
            problem.grad(w.weights(), t as usize)
        };
        let gnorm = tangent_grad_norm(&ng);
        report.trace.rows.push(TraceRow {
            t,
            w: w.weights().to_vec(),
            loss,
            grad_norm: gnorm,
            step_accepted: last_accepted,
            inversion_iters: last_inv_iters,
        });
        if problem.is_sequential() {
            *report.log_wealth.as_mut().unwrap() += -loss;
        } else if gnorm <= cfg.grad_tol {
            report.converged = true;
            break;
        }
        if t >= total {
            break;
        }

        let mut eta = cfg.eta.at(t);
        let mut outcome = None;
        let mut attempts = 0;
        let failure = loop {
            let res = match cfg.variant {
                Variant::Md => md_step(cfg, &w, &ng, eta),
                Variant::Mmd => mmd_step(cfg, &w, &ng, eta),
            };
            match res {
                Ok(out) => {
                    // reject a step whose landing loss is non-finite
                    let next_round = ((t + 1) as usize).min(
                        problem.rounds().map_or(usize::MAX, |r| r - 1),
                    );
                    let next_loss = problem.loss(out.w.weights(), next_round);
                    if next_loss.is_finite() {
                        outcome = Some(out);
                        break None;
                    }
                    if attempts >= cfg.max_retries {
                        break Some(DescentError::NonFiniteLoss(next_loss).to_string());
                    }
                }
                Err(e) => {
                    if attempts >= cfg.max_retries {
                        break Some(e.to_string());
                    }
                }
            }
            attempts += 1;
            eta *= 0.5;
        };
        if let Some(msg) = failure {
            report.error = Some(msg);
            break;
        }
        let out = outcome.unwrap();
        w = out.w;
        last_accepted = attempts == 0;
        last_inv_iters = out.inversion_iters;
        t += 1;
    }

    if let Some(last) = report.trace.rows.last() {
        // batch traces include the arrival state at t = 0, so the last row's
        // t is the number of steps taken; online traces have one row per
        // consumed round, so the count is the row count itself
        report.iterations = if problem.is_sequential() {
            report.trace.rows.len() as u32
        } else {
            last.t
        };
        report.final_loss = last.loss;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems;

    fn cfg(variant: Variant, family: LinkFamily, eta: f64) -> DescentConfig {
        DescentConfig::new(variant, family, EtaSchedule::Constant(eta))
    }

    #[test]
    fn simplex_point_construction() {
        let p = SimplexPoint::new(vec![2.0, 2.0]).unwrap();
        assert_eq!(p.weights(), &[0.5, 0.5]);
        assert!(SimplexPoint::new(vec![1.0, 0.0]).is_err());
        assert!(SimplexPoint::new(vec![1.0, -1.0]).is_err());
        assert!(SimplexPoint::new(vec![]).is_err());
        assert_eq!(SimplexPoint::uniform(4).weights(), &[0.25; 4]);
    }

    #[test]
    fn eta_schedules() {
        assert_eq!(EtaSchedule::Constant(0.5).at(7), 0.5);
        assert_eq!(EtaSchedule::InvSqrt(1.0).at(0), 1.0);
        assert!((EtaSchedule::InvSqrt(1.0).at(3) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn md_step_classical_eg_example() {
        // natural link, w = (1/2, 1/2), grad = (1, 0), η = ln 2 → (1/3, 2/3)
        let c = cfg(Variant::Md, LinkFamily::Natural, 1.0);
        let w = SimplexPoint::uniform(2);
        let out = md_step(&c, &w, &[1.0, 0.0], std::f64::consts::LN_2).unwrap();
        let got = out.w.weights();
        assert!((got[0] - 1.0 / 3.0).abs() < 1e-14, "{got:?}");
        assert!((got[1] - 2.0 / 3.0).abs() < 1e-14, "{got:?}");
    }

    #[test]
    fn zero_gradient_is_an_exact_fixed_point() {
        let w = SimplexPoint::new(vec![0.2, 0.3, 0.5]).unwrap();
        for family in crate::linkfn::catalog::defaults() {
            for variant in [Variant::Md, Variant::Mmd] {
                let c = cfg(variant, family.clone(), 0.7);
                let out = match variant {
                    Variant::Md => md_step(&c, &w, &[0.0; 3], 0.7).unwrap(),
                    Variant::Mmd => mmd_step(&c, &w, &[0.0; 3], 0.7).unwrap(),
                };
                assert_eq!(out.w.weights(), w.weights(), "{}", family.describe());
            }
        }
    }

    #[test]
    fn mmd_step_renormalizes_uniform_shrink() {
        // natural link: dlog = 1/w, step = w − η·w⊙g = (0.25, 0.25) → uniform
        let c = cfg(Variant::Mmd, LinkFamily::Natural, 0.5);
        let w = SimplexPoint::uniform(2);
        let out = mmd_step(&c, &w, &[1.0, 1.0], 0.5).unwrap();
        assert_eq!(out.w.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn mmd_step_clips_at_floor() {
        let c = cfg(Variant::Mmd, LinkFamily::Natural, 1.0);
        let w = SimplexPoint::new(vec![0.9, 0.1]).unwrap();
        let out = mmd_step(&c, &w, &[10.0, 0.0], 1.0).unwrap();
        let got = out.w.weights();
        // first coordinate 0.9 − 1·0.9·10 < 0 clips to the floor, which is
        // then scaled by the renormalization (floor / ≈0.1)
        assert!(got[0] <= 1e-10, "{got:?}");
        assert!((got[1] - 1.0).abs() < 1e-9, "{got:?}");
        assert!((got[0] + got[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mmd_degenerates_when_everything_clips() {
        let c = cfg(Variant::Mmd, LinkFamily::Natural, 1.0);
        let w = SimplexPoint::uniform(2);
        assert!(matches!(
            mmd_step(&c, &w, &[1e9, 1e9], 1.0),
            Err(DescentError::DegenerateState)
        ));
    }

    #[test]
    fn normalized_grad_linear_loss_example() {
        // L(u) = u_1 at w = (0.5, 0.5): g = (1,0), uᵀg = 0.5 → (0.5, −0.5)
        let ng = normalized_grad(|_| vec![1.0, 0.0], &[0.5, 0.5]);
        assert_eq!(ng, vec![0.5, -0.5]);
        // constant gradient direction is invisible to the normalized loss
        let ng = normalized_grad(|_| vec![3.0, 3.0, 3.0], &[0.2, 0.3, 0.5]);
        assert!(tangent_grad_norm(&ng) < 1e-15);
    }

    #[test]
    fn run_converges_on_quadratic_and_stops_at_minimizer() {
        let target = SimplexPoint::new(vec![0.3, 0.7]).unwrap();
        let problem = problems::quadratic(&target).unwrap();
        let mut c = cfg(Variant::Md, LinkFamily::Natural, 0.5);
        c.max_iters = 5000;
        c.grad_tol = 1e-10;
        let report = run(&c, &problem, &SimplexPoint::uniform(2));
        assert!(report.error.is_none(), "{:?}", report.error);
        assert!(report.converged);
        let w = report.final_weights();
        assert!((w[0] - 0.3).abs() < 1e-6 && (w[1] - 0.7).abs() < 1e-6, "{w:?}");

        // starting at the minimizer: single-row trace, converged immediately
        let mut c2 = c.clone();
        c2.grad_tol = 1e-6;
        let report = run(&c2, &problem, &target);
        assert!(report.converged);
        assert_eq!(report.trace.rows.len(), 1);
        assert_eq!(report.iterations, 0);
    }

    #[test]
    fn run_reports_config_errors_without_panicking() {
        let target = SimplexPoint::uniform(2);
        let problem = problems::quadratic(&target).unwrap();
        let mut c = cfg(Variant::Md, LinkFamily::Natural, -0.5);
        c.max_iters = 10;
        let report = run(&c, &problem, &SimplexPoint::uniform(2));
        assert!(report.error.is_some());
        assert!(report.trace.rows.is_empty());

        let c = cfg(Variant::Md, LinkFamily::Tsallis { q: -2.0 }, 0.5);
        let report = run(&c, &problem, &SimplexPoint::uniform(2));
        assert!(report.error.unwrap().contains("q must be > 0"));
    }

    #[test]
    fn retry_policy_halves_eta_on_bounded_links() {
        // tsallis q = 1.5 has a bounded dual range; a huge η pushes the dual
        // step past the sup and must be halved rather than aborting the run
        let target = SimplexPoint::new(vec![0.2, 0.8]).unwrap();
        let problem = problems::quadratic(&target).unwrap();
        let mut c = cfg(Variant::Md, LinkFamily::Tsallis { q: 1.5 }, 50.0);
        c.max_iters = 200;
        c.grad_tol = 1e-9;
        let report = run(&c, &problem, &SimplexPoint::uniform(2));
        assert!(report.error.is_none(), "{:?}", report.error);
        assert!(
            report.trace.rows.iter().any(|r| !r.step_accepted),
            "expected at least one retried step"
        );
    }
}

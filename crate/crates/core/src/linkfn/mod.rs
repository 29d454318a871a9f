//! Deformed logarithms: the multi-parametric family built from a generating
//! function `phi`, its named special cases, and the `Identity` pseudo-family.
//!
//! Every link is normalized so that `log(1) = 0` and `log'(1) = 1`, is
//! strictly increasing, and (for valid parameters) strictly concave on the
//! positive axis. Singular parameter values (`q = 1`, `kappa = 0`,
//! `sigma = 0`, `a = b`, ...) dispatch to the exact limit branch; elsewhere
//! the power-law expressions are evaluated through `exp_m1`/`ln_1p` forms so
//! that nothing cancels catastrophically as a parameter approaches its limit.

pub mod catalog;

use crate::generating::{GeneratingFunction, HKind};
use thiserror::Error;

/// Band around singular parameter values inside which the limit branch is
/// taken. The stable evaluation forms stay accurate right up to the band, so
/// the induced discontinuity is far below double precision.
pub const SINGULAR_BAND: f64 = 1e-12;

/// Threshold under which the Tempesta prefactor `1 - alpha*phi'(alpha)` is
/// treated as singular.
const PREFACTOR_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinkError {
    #[error("x = {x} is outside the domain (arguments must be positive and finite)")]
    Domain { x: f64 },
    #[error("invalid link parameters: {0}")]
    InvalidParams(String),
    #[error("this family has no closed-form deformed exponential")]
    ClosedFormUnavailable,
    #[error("y = {y} lies outside the range of the deformed logarithm")]
    ExpDomain { y: f64 },
}

/// A deformed-logarithm link function on the positive axis.
///
/// `Identity` is not part of the catalog: its "logarithm" `x - 1` is affine,
/// not strictly concave. It exists so that the mirror-less update with
/// `dlog = 1` reduces to projected gradient descent (potential `|w|^2/2`).
#[derive(Debug, Clone)]
pub enum LinkFamily {
    /// `ln x`.
    Natural,
    /// `x - 1` (Euclidean pseudo-link; see type docs).
    Identity,
    /// `(x^(1-q) - 1)/(1-q)`, `q > 0`; `q = 1` is the natural branch.
    Tsallis { q: f64 },
    /// `(x^k - x^-k)/(2k) = sinh(k ln x)/k`, `|k| <= 1`.
    Kaniadakis { kappa: f64 },
    /// `[x^s - a*x^-s + a - 1] / ((1+a) s)`, the `phi(x) = 1/x` member of the
    /// multi-parametric family; `alpha = 1, sigma = k` recovers Kaniadakis.
    ExtKaniadakis { alpha: f64, sigma: f64 },
    /// `x^r (x^k - x^-k)/(2k)`, `|r| <= |k| <= 1`.
    Kls { kappa: f64, r: f64 },
    /// Three-parameter extension of `Kls` with scale `lambda`; `lambda = 1`
    /// reduces to `Kls`.
    ThreeParam { kappa: f64, r: f64, lambda: f64 },
    /// Two-parameter logarithm `(x^(a-b) - 1)/(a - b x^(a-b))` with limit
    /// branches at `a = b` and `a = -b`.
    Htg { a: f64, b: f64 },
    /// Generalization of `Htg` replacing `tanh` by any bounded odd sigmoid.
    HtgGeneral { a: f64, b: f64, h: HKind },
    /// Scaled/shifted Kaniadakis logarithm
    /// `[log_k(lambda x) - log_k(lambda)] / sqrt(1 + k^2 log_k(lambda)^2)`.
    Ks { kappa: f64, lambda: f64 },
    /// `(x^a - x^b)/(a - b)`.
    Euler { a: f64, b: f64 },
    /// The general multi-parametric logarithm built from a generating
    /// function `phi`:
    /// `[(phi(alpha x^-s) - x^-s)/s + (1 - phi(alpha))/s] / (1 - alpha*phi'(alpha))`.
    Tempesta {
        phi: GeneratingFunction,
        alpha: f64,
        sigma: f64,
    },
}

#[inline]
fn near(v: f64, target: f64) -> bool {
    (v - target).abs() <= SINGULAR_BAND
}

/// `(x^s - 1)/s` evaluated as `expm1(s ln x)/s`; tends to `ln x` as `s -> 0`.
#[inline]
pub(crate) fn pow_ratio(s: f64, ln_x: f64) -> f64 {
    if s == 0.0 {
        ln_x
    } else {
        (s * ln_x).exp_m1() / s
    }
}

#[inline]
fn check_x(x: f64) -> Result<f64, LinkError> {
    if x > 0.0 && x.is_finite() {
        Ok(x.ln())
    } else {
        Err(LinkError::Domain { x })
    }
}

impl LinkFamily {
    /// The deformed logarithm at `x > 0`.
    pub fn log_eval(&self, x: f64) -> Result<f64, LinkError> {
        self.quick_check()?;
        let ln_x = check_x(x)?;
        Ok(match self {
            LinkFamily::Natural => ln_x,
            LinkFamily::Identity => x - 1.0,
            LinkFamily::Tsallis { q } => {
                if near(*q, 1.0) {
                    ln_x
                } else {
                    pow_ratio(1.0 - q, ln_x)
                }
            }
            LinkFamily::Kaniadakis { kappa } => {
                if near(*kappa, 0.0) {
                    ln_x
                } else {
                    (kappa * ln_x).sinh() / kappa
                }
            }
            LinkFamily::ExtKaniadakis { alpha, sigma } => {
                if near(*sigma, 0.0) {
                    ln_x
                } else {
                    let ep = (sigma * ln_x).exp_m1();
                    let em = (-sigma * ln_x).exp_m1();
                    (ep - alpha * em) / ((1.0 + alpha) * sigma)
                }
            }
            LinkFamily::Kls { kappa, r } => {
                if near(*kappa, 0.0) {
                    ln_x
                } else {
                    (r * ln_x).exp() * (kappa * ln_x).sinh() / kappa
                }
            }
            LinkFamily::ThreeParam { kappa, r, lambda } => {
                if near(*kappa, 0.0) {
                    ln_x
                } else {
                    let lk = lambda.powf(*kappa);
                    let lmk = lambda.powf(-kappa);
                    let d = (r + kappa) * lk - (r - kappa) * lmk;
                    (lk * ((r + kappa) * ln_x).exp() - lmk * ((r - kappa) * ln_x).exp() - lk
                        + lmk)
                        / d
                }
            }
            LinkFamily::Htg { a, b } => {
                if a == b {
                    if *a == 0.0 {
                        ln_x
                    } else {
                        ln_x / (1.0 - a * ln_x)
                    }
                } else if *a == -*b {
                    (a * ln_x).tanh() / a
                } else {
                    // (u-1)/(a - b u) with u = x^(a-b); the denominator is
                    // rewritten as (a-b) - b*(u-1) so nothing cancels as a -> b.
                    let v = a - b;
                    let m = (v * ln_x).exp_m1();
                    m / (v - b * m)
                }
            }
            LinkFamily::HtgGeneral { a, b, h } => {
                if a == b {
                    if *a == 0.0 {
                        ln_x
                    } else {
                        ln_x / (1.0 - a * ln_x)
                    }
                } else if *a == -*b {
                    h.h(a * ln_x) / a
                } else {
                    let v = a - b;
                    let c = 0.5 * (a + b);
                    let g = 2.0 / v * h.h(0.5 * v * ln_x);
                    g / (1.0 - c * g)
                }
            }
            LinkFamily::Ks { kappa, lambda } => {
                if near(*kappa, 0.0) {
                    ln_x
                } else {
                    let scale = (kappa * lambda.ln()).cosh();
                    let log_k = |u: f64| (kappa * u).sinh() / kappa;
                    (log_k(ln_x + lambda.ln()) - log_k(lambda.ln())) / scale
                }
            }
            LinkFamily::Euler { a, b } => {
                if *a == 0.0 && *b == 0.0 {
                    ln_x
                } else {
                    (b * ln_x).exp() * pow_ratio(a - b, ln_x)
                }
            }
            LinkFamily::Tempesta { phi, alpha, sigma } => {
                if near(*sigma, 0.0) {
                    ln_x
                } else {
                    let t = (-sigma * ln_x).exp();
                    let pref = 1.0 - alpha * phi.dphi(*alpha);
                    ((phi.phi(alpha * t) - t) + (1.0 - phi.phi(*alpha))) / (sigma * pref)
                }
            }
        })
    }

    /// Derivative of the deformed logarithm at `x > 0` (strictly positive for
    /// valid parameters).
    pub fn dlog_eval(&self, x: f64) -> Result<f64, LinkError> {
        self.quick_check()?;
        let ln_x = check_x(x)?;
        Ok(match self {
            LinkFamily::Natural => 1.0 / x,
            LinkFamily::Identity => 1.0,
            LinkFamily::Tsallis { q } => {
                if near(*q, 1.0) {
                    1.0 / x
                } else {
                    (-q * ln_x).exp()
                }
            }
            LinkFamily::Kaniadakis { kappa } => {
                if near(*kappa, 0.0) {
                    1.0 / x
                } else {
                    (kappa * ln_x).cosh() / x
                }
            }
            LinkFamily::ExtKaniadakis { alpha, sigma } => {
                if near(*sigma, 0.0) {
                    1.0 / x
                } else {
                    (((sigma - 1.0) * ln_x).exp() + alpha * ((-sigma - 1.0) * ln_x).exp())
                        / (1.0 + alpha)
                }
            }
            LinkFamily::Kls { kappa, r } => {
                if near(*kappa, 0.0) {
                    1.0 / x
                } else {
                    ((r + kappa) * ((r + kappa - 1.0) * ln_x).exp()
                        - (r - kappa) * ((r - kappa - 1.0) * ln_x).exp())
                        / (2.0 * kappa)
                }
            }
            LinkFamily::ThreeParam { kappa, r, lambda } => {
                if near(*kappa, 0.0) {
                    1.0 / x
                } else {
                    let lk = lambda.powf(*kappa);
                    let lmk = lambda.powf(-kappa);
                    let d = (r + kappa) * lk - (r - kappa) * lmk;
                    ((r + kappa) * lk * ((r + kappa - 1.0) * ln_x).exp()
                        - (r - kappa) * lmk * ((r - kappa - 1.0) * ln_x).exp())
                        / d
                }
            }
            LinkFamily::Htg { a, b } => {
                if a == b {
                    if *a == 0.0 {
                        1.0 / x
                    } else {
                        let d = 1.0 - a * ln_x;
                        1.0 / (x * d * d)
                    }
                } else if *a == -*b {
                    let c = (a * ln_x).cosh();
                    1.0 / (x * c * c)
                } else {
                    let v = a - b;
                    let m = (v * ln_x).exp_m1();
                    let den = v - b * m;
                    v * v * ((v - 1.0) * ln_x).exp() / (den * den)
                }
            }
            LinkFamily::HtgGeneral { a, b, h } => {
                if a == b {
                    if *a == 0.0 {
                        1.0 / x
                    } else {
                        let d = 1.0 - a * ln_x;
                        1.0 / (x * d * d)
                    }
                } else if *a == -*b {
                    h.dh(a * ln_x) / x
                } else {
                    let v = a - b;
                    let c = 0.5 * (a + b);
                    let g = 2.0 / v * h.h(0.5 * v * ln_x);
                    let d = 1.0 - c * g;
                    h.dh(0.5 * v * ln_x) / (x * d * d)
                }
            }
            LinkFamily::Ks { kappa, lambda } => {
                if near(*kappa, 0.0) {
                    1.0 / x
                } else {
                    let scale = (kappa * lambda.ln()).cosh();
                    (kappa * (ln_x + lambda.ln())).cosh() / (x * scale)
                }
            }
            LinkFamily::Euler { a, b } => {
                if *a == 0.0 && *b == 0.0 {
                    1.0 / x
                } else {
                    (a * ((a - 1.0) * ln_x).exp() - b * ((b - 1.0) * ln_x).exp()) / (a - b)
                }
            }
            LinkFamily::Tempesta { phi, alpha, sigma } => {
                if near(*sigma, 0.0) {
                    1.0 / x
                } else {
                    let t = (-sigma * ln_x).exp();
                    let pref = 1.0 - alpha * phi.dphi(*alpha);
                    ((-sigma - 1.0) * ln_x).exp() * (1.0 - alpha * phi.dphi(alpha * t)) / pref
                }
            }
        })
    }

    /// Closed-form deformed exponential (inverse of `log_eval`) where the
    /// family provides one; `Err(ClosedFormUnavailable)` otherwise, in which
    /// case callers fall back to numeric inversion.
    ///
    /// In clip regions where the inverse tends to zero from above (Tsallis
    /// with `q < 1` at `y <= -1/(1-q)`, and the analogous two-parameter
    /// boundary) the function returns `0.0`; callers are expected to apply a
    /// positivity floor. Where the requested `y` exceeds a *bounded* range
    /// (`q > 1` side) it returns `ExpDomain`.
    pub fn exp_closed(&self, y: f64) -> Result<f64, LinkError> {
        self.quick_check()?;
        if !y.is_finite() {
            return Err(LinkError::ExpDomain { y });
        }
        match self {
            LinkFamily::Natural => Ok(y.exp()),
            LinkFamily::Identity => Ok(if y <= -1.0 { 0.0 } else { 1.0 + y }),
            LinkFamily::Tsallis { q } => {
                if near(*q, 1.0) {
                    return Ok(y.exp());
                }
                let s = 1.0 - q;
                let z = s * y;
                if z > -1.0 {
                    Ok((z.ln_1p() / s).exp())
                } else if s > 0.0 {
                    Ok(0.0)
                } else {
                    Err(LinkError::ExpDomain { y })
                }
            }
            LinkFamily::Kaniadakis { kappa } => {
                if near(*kappa, 0.0) {
                    Ok(y.exp())
                } else {
                    Ok(((kappa * y).asinh() / kappa).exp())
                }
            }
            LinkFamily::Kls { kappa, r } => {
                if near(*kappa, 0.0) {
                    Ok(y.exp())
                } else if near(*r, 0.0) {
                    Ok(((kappa * y).asinh() / kappa).exp())
                } else {
                    Err(LinkError::ClosedFormUnavailable)
                }
            }
            LinkFamily::Htg { a, b } => {
                if a == b {
                    if *a == 0.0 {
                        return Ok(y.exp());
                    }
                    let t = 1.0 + a * y;
                    if t > 0.0 {
                        Ok((y / t).exp())
                    } else {
                        Err(LinkError::ExpDomain { y })
                    }
                } else {
                    let num = 1.0 + a * y;
                    let den = 1.0 + b * y;
                    let e = 1.0 / (a - b);
                    if num > 0.0 && den > 0.0 {
                        Ok((((a * y).ln_1p() - (b * y).ln_1p()) * e).exp())
                    } else if (num <= 0.0 && e > 0.0) || (den <= 0.0 && e < 0.0) {
                        // below the attainable range: the inverse clips to 0+
                        Ok(0.0)
                    } else {
                        Err(LinkError::ExpDomain { y })
                    }
                }
            }
            LinkFamily::HtgGeneral { a, b, .. } => {
                if *a == 0.0 && *b == 0.0 {
                    Ok(y.exp())
                } else {
                    Err(LinkError::ClosedFormUnavailable)
                }
            }
            LinkFamily::Ks { kappa, lambda } => {
                if near(*kappa, 0.0) {
                    Ok(y.exp())
                } else {
                    let scale = (kappa * lambda.ln()).cosh();
                    let log_k_lambda = (kappa * lambda.ln()).sinh() / kappa;
                    let z = y * scale + log_k_lambda;
                    Ok(((kappa * z).asinh() / kappa).exp() / lambda)
                }
            }
            LinkFamily::ExtKaniadakis { .. }
            | LinkFamily::ThreeParam { .. }
            | LinkFamily::Euler { .. }
            | LinkFamily::Tempesta { .. } => Err(LinkError::ClosedFormUnavailable),
        }
    }

    /// Whether `exp_closed` can return values for this family.
    pub fn has_closed_exp(&self) -> bool {
        !matches!(
            self.exp_closed(0.0),
            Err(LinkError::ClosedFormUnavailable)
        )
    }

    /// Generalized entropy `sum_i p_i * log(1/p_i)` (Boltzmann constant 1).
    ///
    /// `p` must be strictly positive; it is the caller's business that it
    /// sums to one.
    pub fn entropy(&self, p: &[f64]) -> Result<f64, LinkError> {
        let mut s = 0.0;
        for &pi in p {
            if !(pi > 0.0 && pi.is_finite()) {
                return Err(LinkError::Domain { x: pi });
            }
            s += pi * self.log_eval(1.0 / pi)?;
        }
        Ok(s)
    }

    /// Cheap structural parameter checks shared by every evaluation path.
    /// The full grid-based conditions (Tempesta positivity, generalized-HTG
    /// concavity) live in [`LinkFamily::validate_params`].
    pub(crate) fn quick_check(&self) -> Result<(), LinkError> {
        let fail = |msg: String| Err(LinkError::InvalidParams(msg));
        let finite = |vals: &[(f64, &str)]| -> Result<(), LinkError> {
            for (v, name) in vals {
                if !v.is_finite() {
                    return Err(LinkError::InvalidParams(format!(
                        "{name} = {v} must be finite"
                    )));
                }
            }
            Ok(())
        };
        match self {
            LinkFamily::Natural | LinkFamily::Identity => Ok(()),
            LinkFamily::Tsallis { q } => {
                finite(&[(*q, "q")])?;
                if *q <= 0.0 {
                    return fail(format!("q = {q}: q must be > 0 (q = 1 is the natural branch)"));
                }
                Ok(())
            }
            LinkFamily::Kaniadakis { kappa } => {
                finite(&[(*kappa, "kappa")])?;
                if kappa.abs() > 1.0 {
                    return fail(format!("kappa = {kappa}: kappa must lie in [-1, 1]"));
                }
                Ok(())
            }
            LinkFamily::ExtKaniadakis { alpha, sigma } => {
                finite(&[(*alpha, "alpha"), (*sigma, "sigma")])?;
                if *alpha < 0.0 {
                    return fail(format!("alpha = {alpha}: alpha must be >= 0 (monotonicity)"));
                }
                if sigma.abs() > 1.0 {
                    return fail(format!("sigma = {sigma}: sigma must lie in [-1, 1] (concavity)"));
                }
                if *alpha == 0.0 && *sigma == 1.0 {
                    return fail("alpha = 0, sigma = 1 gives the affine map x - 1 (strict concavity fails)".into());
                }
                Ok(())
            }
            LinkFamily::Kls { kappa, r } => {
                finite(&[(*kappa, "kappa"), (*r, "r")])?;
                if kappa.abs() > 1.0 {
                    return fail(format!("kappa = {kappa}: kappa must lie in [-1, 1]"));
                }
                if r.abs() > kappa.abs() {
                    return fail(format!(
                        "r = {r}: r must satisfy -|kappa| <= r <= |kappa| (|kappa| = {})",
                        kappa.abs()
                    ));
                }
                Ok(())
            }
            LinkFamily::ThreeParam { kappa, r, lambda } => {
                finite(&[(*kappa, "kappa"), (*r, "r"), (*lambda, "lambda")])?;
                if !(*lambda > 0.0) {
                    return fail(format!("lambda = {lambda}: lambda must be > 0"));
                }
                if kappa.abs() > 1.0 {
                    return fail(format!("kappa = {kappa}: kappa must lie in [-1, 1]"));
                }
                if near(*kappa, 0.0) {
                    if !near(*r, 0.0) {
                        return fail(format!("r = {r}: r must be 0 when kappa = 0"));
                    }
                } else if r.abs() >= kappa.abs() {
                    return fail(format!(
                        "r = {r}: r must satisfy -|kappa| < r < |kappa| (|kappa| = {})",
                        kappa.abs()
                    ));
                }
                Ok(())
            }
            LinkFamily::Htg { a, b } | LinkFamily::HtgGeneral { a, b, .. } => {
                finite(&[(*a, "a"), (*b, "b")])?;
                if a * b > 0.0 {
                    return fail(format!(
                        "a = {a}, b = {b}: a*b must be <= 0, otherwise the link has a pole on the positive axis"
                    ));
                }
                let (hi, lo) = (a.max(*b), a.min(*b));
                if hi > 0.0 && hi - lo > 1.0 {
                    return fail(format!(
                        "a = {a}, b = {b}: max(a,b) - min(a,b) must be <= 1 when max(a,b) > 0 (concavity)"
                    ));
                }
                if lo == 0.0 && hi == 1.0 {
                    return fail("(a, b) = (1, 0) gives the affine map x - 1 (strict concavity fails)".into());
                }
                Ok(())
            }
            LinkFamily::Ks { kappa, lambda } => {
                finite(&[(*kappa, "kappa"), (*lambda, "lambda")])?;
                if !(*lambda > 0.0) {
                    return fail(format!("lambda = {lambda}: lambda must be > 0"));
                }
                if kappa.abs() > 1.0 {
                    return fail(format!("kappa = {kappa}: kappa must lie in [-1, 1]"));
                }
                Ok(())
            }
            LinkFamily::Euler { a, b } => {
                finite(&[(*a, "a"), (*b, "b")])?;
                if a == b {
                    if *a == 0.0 {
                        return Ok(());
                    }
                    return fail(format!(
                        "a = b = {a}: the a = b limit x^a ln x is not monotone on the positive axis"
                    ));
                }
                if a * b > 0.0 {
                    return fail(format!(
                        "a = {a}, b = {b}: a*b must be <= 0 (monotonicity)"
                    ));
                }
                let hi = a.max(*b);
                let lo = a.min(*b);
                if hi > 1.0 {
                    return fail(format!(
                        "a = {a}, b = {b}: max(a,b) must be <= 1 (concavity)"
                    ));
                }
                if lo == 0.0 && hi == 1.0 {
                    return fail("(a, b) = (1, 0) gives the affine map x - 1 (strict concavity fails)".into());
                }
                Ok(())
            }
            LinkFamily::Tempesta { phi, alpha, sigma } => {
                finite(&[(*alpha, "alpha"), (*sigma, "sigma")])?;
                if near(*sigma, 0.0) {
                    return Ok(());
                }
                let pref = 1.0 - alpha * phi.dphi(*alpha);
                if !pref.is_finite() || pref.abs() < PREFACTOR_EPS {
                    return fail(format!(
                        "alpha*phi'(alpha) = 1 (prefactor singular) for phi = {}",
                        phi.label()
                    ));
                }
                Ok(())
            }
        }
    }

    /// Full parameter validation. Returns the list of violated constraints
    /// (empty list means valid).
    ///
    /// For the structural families this checks the closed-form ranges. For
    /// `Tempesta` it additionally evaluates the positivity condition
    ///
    /// `[(1+s)(1 - alpha*phi'(alpha x^-s)) - s alpha^2 x^-s phi''(alpha x^-s)] / (1 - alpha*phi'(alpha)) > 0`
    ///
    /// (the concavity inequality; the printed form divides by `1+s`, which is
    /// singular at `s = -1` although the named special cases live there — the
    /// multiplied-through form is equivalent for `s > -1` and loses nothing)
    /// together with the monotonicity factor
    /// `(1 - alpha*phi'(alpha x^-s))/(1 - alpha*phi'(alpha)) > 0`,
    /// on a 64-point logarithmic grid over `[1e-6, 1e6]`, reporting the first
    /// violation. `HtgGeneral` gets the analogous grid check since its
    /// concavity region depends on the sigmoid.
    pub fn validate_params(&self) -> Result<(), Vec<String>> {
        let mut violations = Vec::new();
        if let Err(LinkError::InvalidParams(msg)) = self.quick_check() {
            violations.push(msg);
        }
        if violations.is_empty() {
            match self {
                LinkFamily::Tempesta { phi, alpha, sigma } if !near(*sigma, 0.0) => {
                    let pref = 1.0 - alpha * phi.dphi(*alpha);
                    for x in log_grid(1e-6, 1e6, 64) {
                        let t = (-sigma * x.ln()).exp();
                        let mono = (1.0 - alpha * phi.dphi(alpha * t)) / pref;
                        let conc = ((1.0 + sigma) * (1.0 - alpha * phi.dphi(alpha * t))
                            - sigma * alpha * alpha * t * phi.d2phi(alpha * t))
                            / pref;
                        if !(mono > 0.0) || !mono.is_finite() {
                            violations.push(format!(
                                "monotonicity factor (1 - alpha*phi'(alpha x^-sigma))/(1 - alpha*phi'(alpha)) = {mono} at x = {x:.3e}"
                            ));
                            break;
                        }
                        if !(conc > 0.0) || !conc.is_finite() {
                            violations.push(format!(
                                "positivity (concavity) condition = {conc} at x = {x:.3e}"
                            ));
                            break;
                        }
                    }
                }
                LinkFamily::HtgGeneral { a, b, h } if !(*a == 0.0 && *b == 0.0) => {
                    let v = a - b;
                    let c = 0.5 * (a + b);
                    for x in log_grid(1e-6, 1e6, 64) {
                        let z = 0.5 * v * x.ln();
                        let g = if v == 0.0 { x.ln() } else { 2.0 / v * h.h(z) };
                        let d = 1.0 - c * g;
                        let dh = h.dh(z);
                        // sign of log'' (up to the positive factor x^2 (1-c g)^3)
                        let s = (0.5 * v * h.d2h(z) - dh) * d + 2.0 * c * dh * dh;
                        if !(d > 0.0) {
                            violations.push(format!("pole factor 1 - c*g = {d} at x = {x:.3e}"));
                            break;
                        }
                        if !(s < 0.0) {
                            violations.push(format!(
                                "concavity condition fails (sign expression = {s}) at x = {x:.3e} for h = {}",
                                h.label()
                            ));
                            break;
                        }
                    }
                }
                _ => {}
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    /// Short machine-friendly family tag (used by config files and sweeps).
    pub fn tag(&self) -> &'static str {
        match self {
            LinkFamily::Natural => "natural",
            LinkFamily::Identity => "identity",
            LinkFamily::Tsallis { .. } => "tsallis",
            LinkFamily::Kaniadakis { .. } => "kaniadakis",
            LinkFamily::ExtKaniadakis { .. } => "ext_kaniadakis",
            LinkFamily::Kls { .. } => "kls",
            LinkFamily::ThreeParam { .. } => "three_param",
            LinkFamily::Htg { .. } => "htg",
            LinkFamily::HtgGeneral { h: HKind::Tanh, .. } => "htg_tanh",
            LinkFamily::HtgGeneral { h: HKind::AtanScaled, .. } => "htg_atan",
            LinkFamily::Ks { .. } => "ks",
            LinkFamily::Euler { .. } => "euler",
            LinkFamily::Tempesta { .. } => "tempesta",
        }
    }

    /// Human-readable parameter description, e.g. `tsallis(q=0.7)`.
    pub fn describe(&self) -> String {
        match self {
            LinkFamily::Natural => "natural".into(),
            LinkFamily::Identity => "identity".into(),
            LinkFamily::Tsallis { q } => format!("tsallis(q={q})"),
            LinkFamily::Kaniadakis { kappa } => format!("kaniadakis(kappa={kappa})"),
            LinkFamily::ExtKaniadakis { alpha, sigma } => {
                format!("ext_kaniadakis(alpha={alpha}, sigma={sigma})")
            }
            LinkFamily::Kls { kappa, r } => format!("kls(kappa={kappa}, r={r})"),
            LinkFamily::ThreeParam { kappa, r, lambda } => {
                format!("three_param(kappa={kappa}, r={r}, lambda={lambda})")
            }
            LinkFamily::Htg { a, b } => format!("htg(a={a}, b={b})"),
            LinkFamily::HtgGeneral { a, b, h } => {
                format!("htg_{}(a={a}, b={b})", h.label())
            }
            LinkFamily::Ks { kappa, lambda } => format!("ks(kappa={kappa}, lambda={lambda})"),
            LinkFamily::Euler { a, b } => format!("euler(a={a}, b={b})"),
            LinkFamily::Tempesta { phi, alpha, sigma } => {
                format!("tempesta(phi={}, alpha={alpha}, sigma={sigma})", phi.label())
            }
        }
    }
}

/// Leading series coefficients of the multi-parametric logarithm around
/// `x = 1`: `log(x) = ln x + (a1/2) ln^2 x + (a2/6) ln^3 x + O(ln^4 x)`.
///
/// `a1 = -sigma (alpha^2 phi''(alpha) + alpha phi'(alpha) - 1) / (alpha phi'(alpha) - 1)`;
/// `a2 =  sigma^2 (alpha^3 phi'''(alpha) + 3 alpha^2 phi''(alpha) + alpha phi'(alpha) - 1) / (alpha phi'(alpha) - 1)`.
///
/// (In the cubic coefficient the last numerator term is `alpha*phi'(alpha)`,
/// not `phi'(alpha)`: with the latter, the Tsallis member `phi = a x - c`
/// would not reproduce its own expansion `ln x + (1-q) ln^2 x / 2 +
/// (1-q)^2 ln^3 x / 6` except at `alpha = 1`. Verified by symbolic
/// expansion and by the Kaniadakis member, where `a2 = kappa^2`.)
pub fn tempesta_series_coeffs(
    phi: &GeneratingFunction,
    alpha: f64,
    sigma: f64,
) -> Result<(f64, f64), LinkError> {
    if near(sigma, 0.0) {
        return Ok((0.0, 0.0));
    }
    let d1 = phi.dphi(alpha);
    let d2 = phi.d2phi(alpha);
    let d3 = phi.d3phi(alpha);
    let denom = alpha * d1 - 1.0;
    if !denom.is_finite() || denom.abs() < PREFACTOR_EPS {
        return Err(LinkError::InvalidParams(format!(
            "alpha*phi'(alpha) = 1 (prefactor singular) for phi = {}",
            phi.label()
        )));
    }
    let a1 = -sigma * (alpha * alpha * d2 + alpha * d1 - 1.0) / denom;
    let a2 = sigma * sigma * (alpha * alpha * alpha * d3 + 3.0 * alpha * alpha * d2 + alpha * d1
        - 1.0)
        / denom;
    Ok((a1, a2))
}

/// Logarithmically spaced grid over `[lo, hi]`, inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * (i as f64 * step).exp()).collect()
}

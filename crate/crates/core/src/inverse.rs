//! Inverting deformed logarithms.
//!
//! Families with a closed-form deformed exponential use it directly; the
//! rest go through [`invert_monotone`], a bracketed, safeguarded Newton
//! iteration on the (strictly increasing) logarithm. [`exp_series`] provides
//! the quadratic/cubic expansion of the exponential around zero, which makes
//! a good warm start and doubles as an accuracy check; [`LookupTable`]
//! offers an interpolated inverse for workloads that invert the same link
//! thousands of times.

use crate::linkfn::{tempesta_series_coeffs, LinkError, LinkFamily};

/// Controls for the numeric inversion loop.
#[derive(Debug, Clone)]
pub struct InversionSettings {
    /// Relative residual tolerance: accept when `|log(x) - y| <= abs_tol + rel_tol*|y|`.
    pub rel_tol: f64,
    /// Absolute residual tolerance (see `rel_tol`).
    pub abs_tol: f64,
    /// Iteration cap; the bisection safeguard converges long before this.
    pub max_iters: u32,
    /// Initial bracket, expanded geometrically as needed (hard caps 1e±300).
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    /// Order of the series warm start (1, 2, or 3).
    pub series_order: u8,
}

impl Default for InversionSettings {
    fn default() -> Self {
        InversionSettings {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_iters: 200,
            bracket_lo: 1e-12,
            bracket_hi: 1e12,
            series_order: 3,
        }
    }
}

/// Details of a numeric inversion.
#[derive(Debug, Clone, Copy)]
pub struct Inversion {
    pub x: f64,
    pub iters: u32,
    pub residual: f64,
}

/// Leading series coefficients `a1`, `a2` of the logarithm around `x = 1`:
/// `log(x) = ln x + (a1/2) ln^2 x + (a2/6) ln^3 x + ...`.
///
/// Closed forms exist for every named family; the two grid-checked families
/// (`HtgGeneral`, `ThreeParam`) fall back to central differences of `log'`
/// at 1, which is plenty for a warm start.
pub fn series_coeffs(link: &LinkFamily) -> Result<(f64, f64), LinkError> {
    Ok(match link {
        LinkFamily::Natural => (0.0, 0.0),
        LinkFamily::Identity => (1.0, 1.0),
        LinkFamily::Tsallis { q } => {
            let s = 1.0 - q;
            (s, s * s)
        }
        LinkFamily::Kaniadakis { kappa } => (0.0, kappa * kappa),
        LinkFamily::ExtKaniadakis { alpha, sigma } => {
            (sigma * (1.0 - alpha) / (1.0 + alpha), sigma * sigma)
        }
        LinkFamily::Kls { kappa, r } => (2.0 * r, kappa * kappa + 3.0 * r * r),
        LinkFamily::Htg { a, b } => {
            let c = 0.5 * (a + b);
            let v = a - b;
            (2.0 * c, 6.0 * c * c - 0.5 * v * v)
        }
        LinkFamily::Ks { kappa, lambda } => {
            (kappa * (kappa * lambda.ln()).tanh(), kappa * kappa)
        }
        LinkFamily::Euler { a, b } => (a + b, a * a + a * b + b * b),
        LinkFamily::Tempesta { phi, alpha, sigma } => {
            tempesta_series_coeffs(phi, *alpha, *sigma)?
        }
        _ => numeric_series_coeffs(link)?,
    })
}

fn numeric_series_coeffs(link: &LinkFamily) -> Result<(f64, f64), LinkError> {
    // a1 = 1 + log''(1); a2 = log'''(1) + 3*a1 - 2
    let h = 1e-5;
    let d2 = (link.dlog_eval(1.0 + h)? - link.dlog_eval(1.0 - h)?) / (2.0 * h);
    let a1 = 1.0 + d2;
    let h = 1e-4;
    let d3 =
        (link.dlog_eval(1.0 + h)? - 2.0 * link.dlog_eval(1.0)? + link.dlog_eval(1.0 - h)?)
            / (h * h);
    Ok((a1, d3 + 3.0 * a1 - 2.0))
}

/// Series approximation of the deformed exponential around zero:
/// `exp(y) ≈ 1 + y + (1 - a1) y²/2 + (1 - 3 a1 + 3 a1² - a2) y³/6`.
///
/// The quadratic truncation (order 2) has `O(y³)` error, the cubic (order 3)
/// `O(y⁴)`.
pub fn exp_series(link: &LinkFamily, y: f64, order: u8) -> Result<f64, LinkError> {
    let (a1, a2) = series_coeffs(link)?;
    let mut v = 1.0 + y;
    if order >= 2 {
        v += 0.5 * (1.0 - a1) * y * y;
    }
    if order >= 3 {
        let c3 = (1.0 - 3.0 * a1 + 3.0 * a1 * a1 - a2) / 6.0;
        v += c3 * y * y * y;
    }
    Ok(v)
}

/// Which side of the attainable range a target fell on.
enum OffRange {
    Below,
    Above,
}

enum InvertFail {
    Range(OffRange),
    Link(LinkError),
}

impl From<LinkError> for InvertFail {
    fn from(e: LinkError) -> Self {
        InvertFail::Link(e)
    }
}

const EXPAND: f64 = 1e3;
const HARD_LO: f64 = 1e-300;
const HARD_HI: f64 = 1e300;

fn invert_core(
    link: &LinkFamily,
    y: f64,
    hint: Option<f64>,
    settings: &InversionSettings,
) -> Result<Inversion, InvertFail> {
    link.quick_check()?;
    if !y.is_finite() {
        return Err(InvertFail::Link(LinkError::ExpDomain { y }));
    }
    if y == 0.0 {
        return Ok(Inversion {
            x: 1.0,
            iters: 0,
            residual: 0.0,
        });
    }

    let eval = |x: f64| -> Result<f64, InvertFail> {
        let v = link.log_eval(x)?;
        if v.is_nan() {
            return Err(InvertFail::Link(LinkError::Domain { x }));
        }
        Ok(v)
    };

    // Warm start: caller hint, else the cubic series (useful for small |y|).
    let mut guess = match hint {
        Some(h) if h.is_finite() && h > 0.0 => h,
        _ => {
            let s = exp_series(link, y, settings.series_order)?;
            if s.is_finite() && s > 0.0 {
                s
            } else {
                1.0
            }
        }
    };

    let mut lo = settings.bracket_lo.min(guess).max(HARD_LO);
    let mut hi = settings.bracket_hi.max(guess).min(HARD_HI);
    let mut flo = eval(lo)?;
    let mut fhi = eval(hi)?;
    while flo > y {
        if lo <= HARD_LO {
            return Err(InvertFail::Range(OffRange::Below));
        }
        hi = lo;
        fhi = flo;
        lo = (lo / EXPAND).max(HARD_LO);
        flo = eval(lo)?;
    }
    while fhi < y {
        if hi >= HARD_HI {
            return Err(InvertFail::Range(OffRange::Above));
        }
        lo = hi;
        flo = fhi;
        hi = (hi * EXPAND).min(HARD_HI);
        fhi = eval(hi)?;
    }
    let _ = (flo, fhi);

    guess = guess.clamp(lo, hi);
    if guess <= lo || guess >= hi {
        guess = (lo * hi).sqrt();
    }

    let mut x = guess;
    let mut iters = 0;
    let mut residual = f64::INFINITY;
    while iters < settings.max_iters {
        iters += 1;
        let fx = eval(x)?;
        residual = fx - y;
        if residual >= 0.0 {
            hi = x;
        } else {
            lo = x;
        }

        let resid_ok = residual.abs() <= settings.abs_tol + settings.rel_tol * y.abs();

        let d = link.dlog_eval(x)?;
        let step = if d.is_finite() && d > 0.0 {
            (y - fx) / d
        } else {
            f64::NAN
        };

        // The residual can sit at roundoff while x is still far off when the
        // logarithm is nearly flat (a bounded link close to its sup), so
        // require the raw Newton step to be small too — or the bracket to be
        // closed down to machine width, in which case no better double
        // exists. Termination looks at the raw step, not the safeguarded
        // one: an iterate sitting on the root would otherwise be kicked to
        // the bracket midpoint because its own bracket edge rejects it.
        let step_ok = step.is_finite() && step.abs() <= 1e-11 * x.max(1e-300);
        let bracket_tight = hi - lo <= 4.0 * f64::EPSILON * x;
        if resid_ok && (step_ok || bracket_tight) {
            return Ok(Inversion {
                x,
                iters,
                residual: residual.abs(),
            });
        }

        // Newton step, safeguarded by the bracket.
        let mut x_new = x + step;
        if !x_new.is_finite() || x_new <= lo || x_new >= hi {
            x_new = (lo * hi).sqrt();
        }
        x = x_new;
    }
    Ok(Inversion {
        x,
        iters,
        residual: residual.abs(),
    })
}

/// Invert `log(x) = y` numerically. Targets outside the attainable range of
/// the logarithm produce [`LinkError::ExpDomain`].
pub fn invert_monotone(
    link: &LinkFamily,
    y: f64,
    settings: &InversionSettings,
) -> Result<f64, LinkError> {
    invert_monotone_detailed(link, y, None, settings).map(|inv| inv.x)
}

/// Like [`invert_monotone`], with a warm-start hint and iteration/residual
/// reporting.
pub fn invert_monotone_detailed(
    link: &LinkFamily,
    y: f64,
    hint: Option<f64>,
    settings: &InversionSettings,
) -> Result<Inversion, LinkError> {
    match invert_core(link, y, hint, settings) {
        Ok(inv) => Ok(inv),
        Err(InvertFail::Range(_)) => Err(LinkError::ExpDomain { y }),
        Err(InvertFail::Link(e)) => Err(e),
    }
}

/// The deformed exponential: closed form where available, numeric inversion
/// otherwise.
///
/// Values of `y` below the attainable range map to `0.0` (the inverse tends
/// to the domain boundary; callers apply their positivity floor), matching
/// the closed-form clip convention. Values above the range are
/// [`LinkError::ExpDomain`]: no finite preimage exists and stepping there
/// means the step size was too large.
pub fn deformed_exp(
    link: &LinkFamily,
    y: f64,
    hint: Option<f64>,
    settings: &InversionSettings,
) -> Result<f64, LinkError> {
    deformed_exp_detailed(link, y, hint, settings).map(|(x, _)| x)
}

/// [`deformed_exp`] that also reports the inversion iterations spent
/// (0 when the closed form answered).
pub fn deformed_exp_detailed(
    link: &LinkFamily,
    y: f64,
    hint: Option<f64>,
    settings: &InversionSettings,
) -> Result<(f64, u32), LinkError> {
    if y == 0.0 {
        link.quick_check()?;
        return Ok((1.0, 0));
    }
    match link.exp_closed(y) {
        Err(LinkError::ClosedFormUnavailable) => {}
        other => return other.map(|x| (x, 0)),
    }
    exp_via_inversion(link, y, hint, settings)
}

/// The deformed exponential forced through the numeric inversion path even
/// when a closed form exists (for cross-validating the two paths).
pub fn deformed_exp_numeric(
    link: &LinkFamily,
    y: f64,
    hint: Option<f64>,
    settings: &InversionSettings,
) -> Result<(f64, u32), LinkError> {
    exp_via_inversion(link, y, hint, settings)
}

fn exp_via_inversion(
    link: &LinkFamily,
    y: f64,
    hint: Option<f64>,
    settings: &InversionSettings,
) -> Result<(f64, u32), LinkError> {
    match invert_core(link, y, hint, settings) {
        Ok(inv) => Ok((inv.x, inv.iters)),
        Err(InvertFail::Range(OffRange::Below)) => Ok((0.0, 0)),
        Err(InvertFail::Range(OffRange::Above)) => Err(LinkError::ExpDomain { y }),
        Err(InvertFail::Link(e)) => Err(e),
    }
}

/// Precomputed inverse of a deformed logarithm over a fixed range, using
/// monotone (Fritsch–Carlson) cubic interpolation through exact
/// `(log(x), x)` pairs plus one Newton polish per query.
#[derive(Debug, Clone)]
pub struct LookupTable {
    link: LinkFamily,
    ys: Vec<f64>,
    xs: Vec<f64>,
    /// Tangents dx/dy at the nodes, limited for monotonicity.
    ms: Vec<f64>,
}

impl LookupTable {
    /// Tabulate the inverse over `x ∈ [lo, hi]` (log-spaced, `n >= 4` nodes).
    pub fn build(link: &LinkFamily, lo: f64, hi: f64, n: usize) -> Result<Self, LinkError> {
        assert!(n >= 4 && lo > 0.0 && hi > lo, "need n >= 4 and 0 < lo < hi");
        let xs = crate::linkfn::log_grid(lo, hi, n);
        let mut ys = Vec::with_capacity(n);
        for &x in &xs {
            ys.push(link.log_eval(x)?);
        }
        // secants and limited tangents of x as a function of y
        let mut sec = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            sec.push((xs[i + 1] - xs[i]) / (ys[i + 1] - ys[i]));
        }
        let mut ms = Vec::with_capacity(n);
        ms.push(sec[0]);
        for i in 1..n - 1 {
            ms.push(0.5 * (sec[i - 1] + sec[i]));
        }
        ms.push(sec[n - 2]);
        for i in 0..n - 1 {
            let s = sec[i];
            if s == 0.0 {
                ms[i] = 0.0;
                ms[i + 1] = 0.0;
                continue;
            }
            let a = ms[i] / s;
            let b = ms[i + 1] / s;
            let norm = a * a + b * b;
            if norm > 9.0 {
                let tau = 3.0 / norm.sqrt();
                ms[i] = tau * a * s;
                ms[i + 1] = tau * b * s;
            }
        }
        Ok(LookupTable {
            link: link.clone(),
            ys,
            xs,
            ms,
        })
    }

    /// Range of representable targets.
    pub fn y_range(&self) -> (f64, f64) {
        (self.ys[0], *self.ys.last().unwrap())
    }

    /// Interpolated inverse with one Newton correction. Targets outside the
    /// tabulated range are [`LinkError::ExpDomain`].
    pub fn eval(&self, y: f64) -> Result<f64, LinkError> {
        if !(y >= self.ys[0] && y <= *self.ys.last().unwrap()) {
            return Err(LinkError::ExpDomain { y });
        }
        let k = match self.ys.partition_point(|v| *v <= y) {
            0 => 0,
            p => (p - 1).min(self.ys.len() - 2),
        };
        let h = self.ys[k + 1] - self.ys[k];
        let t = (y - self.ys[k]) / h;
        let (x0, x1, m0, m1) = (self.xs[k], self.xs[k + 1], self.ms[k], self.ms[k + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let mut x = x0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + m0 * h * (t3 - 2.0 * t2 + t)
            + x1 * (-2.0 * t3 + 3.0 * t2)
            + m1 * h * (t3 - t2);
        // one Newton polish against the exact logarithm
        if x > 0.0 {
            let f = self.link.log_eval(x)?;
            let d = self.link.dlog_eval(x)?;
            let step = (y - f) / d;
            if step.is_finite() && x + step > 0.0 {
                x += step;
            }
        } else {
            x = self.xs[k];
        }
        Ok(x)
    }
}

//! Generating functions `phi` for the multi-parametric (Tempesta) logarithm,
//! and the bounded sigmoids `h` used by the generalized two-parameter family.

use std::fmt;
use std::sync::Arc;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A generating function `phi` together with its first three derivatives.
///
/// The derivatives are part of the contract: the first fixes the
/// normalization prefactor `1/(1 - alpha*phi'(alpha))`, the second enters the
/// validity (concavity) condition, and the third the cubic series
/// coefficient. Constructors for the stock choices are provided; `custom`
/// accepts arbitrary closures. `verify_derivatives` cross-checks the supplied
/// derivatives against central finite differences of `phi`.
#[derive(Clone)]
pub struct GeneratingFunction {
    label: String,
    phi: RealFn,
    dphi: RealFn,
    d2phi: RealFn,
    d3phi: RealFn,
}

impl fmt::Debug for GeneratingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GeneratingFunction({})", self.label)
    }
}

impl GeneratingFunction {
    pub fn custom(
        label: impl Into<String>,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dphi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d3phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            phi: Arc::new(phi),
            dphi: Arc::new(dphi),
            d2phi: Arc::new(d2phi),
            d3phi: Arc::new(d3phi),
        }
    }

    /// `phi(x) = a*x - c`. Recovers the Tsallis logarithm with `sigma = q-1`.
    pub fn linear(a: f64, c: f64) -> Self {
        Self::custom(
            format!("linear(a={a}, c={c})"),
            move |x| a * x - c,
            move |_| a,
            |_| 0.0,
            |_| 0.0,
        )
    }

    /// `phi(x) = 1/x`. Recovers the extended Kaniadakis logarithm.
    pub fn reciprocal() -> Self {
        Self::custom(
            "reciprocal",
            |x| 1.0 / x,
            |x| -1.0 / (x * x),
            |x| 2.0 / (x * x * x),
            |x| -6.0 / (x * x * x * x),
        )
    }

    /// `phi(x) = (l1*x)^a - (l2*x)^b + c*x`, the multi-parametric generating
    /// function. Only some corners of parameter space yield a valid link;
    /// `LinkFamily::validate_params` checks the induced conditions on a grid.
    pub fn power_sum(a: f64, b: f64, c: f64, l1: f64, l2: f64) -> Self {
        let (ca, cb) = (l1.powf(a), l2.powf(b));
        Self::custom(
            format!("power_sum(a={a}, b={b}, c={c}, l1={l1}, l2={l2})"),
            move |x| ca * x.powf(a) - cb * x.powf(b) + c * x,
            move |x| a * ca * x.powf(a - 1.0) - b * cb * x.powf(b - 1.0) + c,
            move |x| {
                a * (a - 1.0) * ca * x.powf(a - 2.0) - b * (b - 1.0) * cb * x.powf(b - 2.0)
            },
            move |x| {
                a * (a - 1.0) * (a - 2.0) * ca * x.powf(a - 3.0)
                    - b * (b - 1.0) * (b - 2.0) * cb * x.powf(b - 3.0)
            },
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn phi(&self, x: f64) -> f64 {
        (self.phi)(x)
    }

    pub fn dphi(&self, x: f64) -> f64 {
        (self.dphi)(x)
    }

    pub fn d2phi(&self, x: f64) -> f64 {
        (self.d2phi)(x)
    }

    pub fn d3phi(&self, x: f64) -> f64 {
        (self.d3phi)(x)
    }

    /// Checks `dphi`/`d2phi`/`d3phi` against central differences of the level
    /// below on `points` log-spaced abscissas in `[lo, hi]` (relative 1e-5).
    pub fn verify_derivatives(&self, lo: f64, hi: f64, points: usize) -> Result<(), String> {
        assert!(lo > 0.0 && hi > lo && points >= 2);
        let pairs: [(&str, &RealFn, &RealFn); 3] = [
            ("dphi", &self.phi, &self.dphi),
            ("d2phi", &self.dphi, &self.d2phi),
            ("d3phi", &self.d2phi, &self.d3phi),
        ];
        for i in 0..points {
            let t = i as f64 / (points - 1) as f64;
            let x = lo * (hi / lo).powf(t);
            let h = x * 1e-5;
            for (name, f, df) in &pairs {
                let fd = (f(x + h) - f(x - h)) / (2.0 * h);
                let an = df(x);
                let scale = an.abs().max(fd.abs()).max(1e-8);
                if !an.is_finite() || (an - fd).abs() > 1e-5 * scale {
                    return Err(format!(
                        "{name}({x}) = {an} disagrees with finite difference {fd} for {}",
                        self.label
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Bounded odd sigmoid `h` for the generalized two-parameter logarithm:
/// strictly increasing, `h(0) = 0`, `h'(0) = 1`, `h(x) -> +-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HKind {
    /// `h(x) = tanh(x)`; reproduces the printed two-parameter logarithm.
    Tanh,
    /// `h(x) = (2/pi) * atan(pi*x/2)`.
    AtanScaled,
}

impl HKind {
    pub fn h(self, x: f64) -> f64 {
        match self {
            HKind::Tanh => x.tanh(),
            HKind::AtanScaled => std::f64::consts::FRAC_2_PI * (std::f64::consts::FRAC_PI_2 * x).atan(),
        }
    }

    pub fn dh(self, x: f64) -> f64 {
        match self {
            HKind::Tanh => {
                let c = x.cosh();
                1.0 / (c * c)
            }
            HKind::AtanScaled => {
                let z = std::f64::consts::FRAC_PI_2 * x;
                1.0 / (1.0 + z * z)
            }
        }
    }

    pub fn d2h(self, x: f64) -> f64 {
        match self {
            HKind::Tanh => {
                let t = x.tanh();
                let c = x.cosh();
                -2.0 * t / (c * c)
            }
            HKind::AtanScaled => {
                let half_pi = std::f64::consts::FRAC_PI_2;
                let z = half_pi * x;
                let d = 1.0 + z * z;
                -2.0 * half_pi * z / (d * d)
            }
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            HKind::Tanh => "tanh",
            HKind::AtanScaled => "atan",
        }
    }
}

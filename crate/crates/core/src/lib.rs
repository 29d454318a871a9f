//! Mirror descent on the probability simplex with deformed-logarithm links.
//!
//! The crate is organized bottom-up:
//!
//! - [`generating`]: generating functions `phi` and bounded odd sigmoids,
//!   the raw ingredients of the multi-parametric logarithm.
//! - [`linkfn`]: the link-function catalog — deformed logarithms, their
//!   derivatives, closed-form deformed exponentials where they exist,
//!   parameter validation, and generalized entropies.
//! - [`inverse`]: numeric inversion of a deformed logarithm (safeguarded
//!   Newton with bracketing), the quadratic/cubic exponential series, and a
//!   monotone-cubic lookup table.
//! - [`quad`]: adaptive Gauss–Kronrod quadrature used for potentials with no
//!   closed antiderivative.
//! - [`bregman`]: the Bregman potential `F(x) = ∫₁ˣ log` and divergence.
//! - [`descent`]: the two update rules (mirror step through the link, and
//!   the mirror-less multiplicative step), step-size schedules, retries, and
//!   run traces.
//! - [`problems`]: benchmark objectives on the simplex (quadratic,
//!   cross-entropy, sequential portfolio) with gradient self-checks.

pub mod bregman;
pub mod descent;
pub mod generating;
pub mod inverse;
pub mod linkfn;
pub mod problems;
pub mod quad;

pub use bregman::{BregmanError, Potential};
pub use descent::{
    g_multiply, md_step, mmd_step, normalized_grad, run, tangent_grad_norm, DescentConfig,
    DescentError, EtaSchedule, RunReport, SimplexPoint, StepOutcome, Trace, TraceRow, Variant,
};
pub use generating::{GeneratingFunction, HKind};
pub use inverse::{deformed_exp, exp_series, invert_monotone, InversionSettings, LookupTable};
pub use linkfn::{LinkError, LinkFamily};
pub use problems::{Problem, ProblemError};

//! Benchmark objectives on the simplex with analytic gradients.
//!
//! Every constructor runs a finite-difference check of its gradient at 50
//! random interior points before handing the problem out, so a registered
//! `Problem` is guaranteed internally consistent. Batch problems (quadratic,
//! cross-entropy) expose one fixed loss; the portfolio problem is sequential
//! and feeds the optimizer one round of gross returns per iteration.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::descent::SimplexPoint;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("target point is not interior: component {0} is below 1e-11")]
    NotInterior(f64),
    #[error("bad returns data: {0}")]
    BadReturns(String),
    #[error("returns CSV: {0}")]
    Csv(String),
    #[error(
        "analytic gradient disagrees with finite differences at {point:?}: \
         component {index} has {analytic} vs {numeric}"
    )]
    GradientCheck {
        point: Vec<f64>,
        index: usize,
        analytic: f64,
        numeric: f64,
    },
}

type LossFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

enum Kind {
    Batch {
        loss: LossFn,
        grad: GradFn,
        minimizer: Option<Vec<f64>>,
    },
    Portfolio {
        returns: Vec<Vec<f64>>,
    },
}

pub struct Problem {
    name: String,
    dim: usize,
    kind: Kind,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("sequential", &self.is_sequential())
            .finish()
    }
}

impl Problem {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_sequential(&self) -> bool {
        matches!(self.kind, Kind::Portfolio { .. })
    }

    /// Number of rounds for sequential problems, `None` for batch.
    pub fn rounds(&self) -> Option<usize> {
        match &self.kind {
            Kind::Portfolio { returns } => Some(returns.len()),
            Kind::Batch { .. } => None,
        }
    }

    /// Loss at `u`; batch problems ignore the round index.
    pub fn loss(&self, u: &[f64], round: usize) -> f64 {
        match &self.kind {
            Kind::Batch { loss, .. } => loss(u),
            Kind::Portfolio { returns } => {
                let r = &returns[round];
                -dot(r, u).ln()
            }
        }
    }

    /// Analytic gradient at `u`; batch problems ignore the round index.
    pub fn grad(&self, u: &[f64], round: usize) -> Vec<f64> {
        match &self.kind {
            Kind::Batch { grad, .. } => grad(u),
            Kind::Portfolio { returns } => {
                let r = &returns[round];
                let p = dot(r, u);
                r.iter().map(|ri| -ri / p).collect()
            }
        }
    }

    pub fn known_minimizer(&self) -> Option<&[f64]> {
        match &self.kind {
            Kind::Batch { minimizer, .. } => minimizer.as_deref(),
            Kind::Portfolio { .. } => None,
        }
    }

    /// Finite-difference self-check: 50 random interior points (spread over
    /// rounds for sequential problems), relative tolerance 1e-5.
    fn check_gradient(&self) -> Result<(), ProblemError> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
        let rounds = self.rounds().unwrap_or(1);
        for k in 0..50 {
            let u = random_interior(self.dim, &mut rng);
            let round = (k * rounds) / 50;
            let analytic = self.grad(&u, round);
            let numeric = finite_diff_grad(|v| self.loss(v, round), &u, 1e-6);
            for i in 0..self.dim {
                let scale = analytic[i].abs().max(numeric[i].abs()).max(1.0);
                if (analytic[i] - numeric[i]).abs() > 1e-5 * scale {
                    return Err(ProblemError::GradientCheck {
                        point: u,
                        index: i,
                        analytic: analytic[i],
                        numeric: numeric[i],
                    });
                }
            }
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn random_interior<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    let mut u: Vec<f64> = (0..dim).map(|_| 0.1 + rng.gen::<f64>()).collect();
    let s: f64 = u.iter().sum();
    for v in &mut u {
        *v /= s;
    }
    u
}

fn require_interior(p: &SimplexPoint) -> Result<(), ProblemError> {
    // interiority margin: an order of magnitude above the descent floor
    let min = p.weights().iter().cloned().fold(f64::INFINITY, f64::min);
    if min < 1e-11 {
        return Err(ProblemError::NotInterior(min));
    }
    Ok(())
}

/// `L(u) = ½‖u − w*‖²` with gradient `u − w*`; minimized at the interior
/// point `w*`.
pub fn quadratic(w_star: &SimplexPoint) -> Result<Problem, ProblemError> {
    require_interior(w_star)?;
    let target = w_star.weights().to_vec();
    let t1 = target.clone();
    let t2 = target.clone();
    let problem = Problem {
        name: "quadratic".into(),
        dim: target.len(),
        kind: Kind::Batch {
            loss: Arc::new(move |u| {
                0.5 * u
                    .iter()
                    .zip(&t1)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
            }),
            grad: Arc::new(move |u| u.iter().zip(&t2).map(|(a, b)| a - b).collect()),
            minimizer: Some(target),
        },
    };
    problem.check_gradient()?;
    Ok(problem)
}

/// `L(u) = −Σ p_i ln u_i` with gradient `−p_i/u_i`; over the simplex this is
/// minimized at `u = p` (Gibbs). Returns `+∞` at the boundary.
pub fn cross_entropy(p_target: &SimplexPoint) -> Result<Problem, ProblemError> {
    require_interior(p_target)?;
    let target = p_target.weights().to_vec();
    let t1 = target.clone();
    let t2 = target.clone();
    let problem = Problem {
        name: "cross_entropy".into(),
        dim: target.len(),
        kind: Kind::Batch {
            loss: Arc::new(move |u| {
                let mut acc = 0.0;
                for (&pi, &ui) in t1.iter().zip(u) {
                    if ui <= 0.0 {
                        return f64::INFINITY;
                    }
                    acc -= pi * ui.ln();
                }
                acc
            }),
            grad: Arc::new(move |u| t2.iter().zip(u).map(|(pi, ui)| -pi / ui).collect()),
            minimizer: Some(target),
        },
    };
    problem.check_gradient()?;
    Ok(problem)
}

/// Online portfolio selection over `T` rounds of gross returns (rows =
/// rounds, columns = assets, all entries positive). Per-round loss is
/// `−ln(r_tᵀu)`; the runner consumes one round per iteration and logs
/// cumulative wealth `Σ ln(r_tᵀu_t)`.
pub fn portfolio(returns: Vec<Vec<f64>>) -> Result<Problem, ProblemError> {
    if returns.is_empty() {
        return Err(ProblemError::BadReturns("no rounds".into()));
    }
    let dim = returns[0].len();
    if dim == 0 {
        return Err(ProblemError::BadReturns("no assets".into()));
    }
    for (t, row) in returns.iter().enumerate() {
        if row.len() != dim {
            return Err(ProblemError::BadReturns(format!(
                "round {t} has {} assets, expected {dim}",
                row.len()
            )));
        }
        if let Some(&bad) = row.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(ProblemError::BadReturns(format!(
                "round {t} contains nonpositive return {bad}"
            )));
        }
    }
    let problem = Problem {
        name: "portfolio".into(),
        dim,
        kind: Kind::Portfolio { returns },
    };
    problem.check_gradient()?;
    Ok(problem)
}

/// Central-difference gradient, the oracle used by the registration check
/// and available to tests.
pub fn finite_diff_grad<F: Fn(&[f64]) -> f64>(loss: F, u: &[f64], h: f64) -> Vec<f64> {
    let mut g = Vec::with_capacity(u.len());
    let mut buf = u.to_vec();
    for i in 0..u.len() {
        buf[i] = u[i] + h;
        let hi = loss(&buf);
        buf[i] = u[i] - h;
        let lo = loss(&buf);
        buf[i] = u[i];
        g.push((hi - lo) / (2.0 * h));
    }
    g
}

/// A constant-returns stream: every round repeats `r`.
pub fn constant_returns(rounds: usize, r: &[f64]) -> Vec<Vec<f64>> {
    vec![r.to_vec(); rounds]
}

/// Reproducible 2-asset synthetic stream: lognormal-ish gross returns with
/// slightly different drifts, fully determined by the seed.
pub fn synthetic_returns(rounds: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..rounds)
        .map(|_| {
            let z1: f64 = rng.gen_range(-1.0..1.0);
            let z2: f64 = rng.gen_range(-1.0..1.0);
            vec![(0.004 + 0.05 * z1).exp(), (0.002 + 0.03 * z2).exp()]
        })
        .collect()
}

/// Read a returns matrix from CSV: a header row of asset names, then one row
/// of positive gross returns per round.
pub fn returns_from_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), ProblemError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| ProblemError::Csv(e.to_string()))?;
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| ProblemError::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (t, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| ProblemError::Csv(e.to_string()))?;
        let row: Result<Vec<f64>, _> = rec
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| ProblemError::Csv(format!("row {}: {e}", t + 2)))
            })
            .collect();
        rows.push(row?);
    }
    Ok((names, rows))
}

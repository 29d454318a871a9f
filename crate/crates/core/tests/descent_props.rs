//! Behavioral properties of the two update rules: the classical special
//! cases fall out exactly, iterates never leave the simplex, small steps
//! never increase the loss, and the closed-form and numeric exponential
//! paths produce the same trajectories.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use simplex_md::linkfn::catalog;
use simplex_md::problems;
use simplex_md::{
    md_step, mmd_step, normalized_grad, run, DescentConfig, EtaSchedule, LinkFamily,
    SimplexPoint, Variant,
};

fn cfg(variant: Variant, family: LinkFamily, eta: f64) -> DescentConfig {
    DescentConfig::new(variant, family, EtaSchedule::Constant(eta))
}

fn random_simplex<R: Rng>(dim: usize, rng: &mut R) -> SimplexPoint {
    SimplexPoint::new((0..dim).map(|_| 0.05 + rng.gen::<f64>()).collect()).unwrap()
}

#[test]
fn mirror_step_with_natural_link_is_exponentiated_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe6);
    let c = cfg(Variant::Md, LinkFamily::Natural, 1.0);
    for _ in 0..300 {
        let w = random_simplex(4, &mut rng);
        let grad: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let eta = rng.gen_range(0.01..1.0);
        let stepped = md_step(&c, &w, &grad, eta).unwrap();

        // classical EG: multiply by exp(-eta*g), renormalize
        let mut eg: Vec<f64> = w
            .weights()
            .iter()
            .zip(&grad)
            .map(|(wi, gi)| wi * (-eta * gi).exp())
            .collect();
        let s: f64 = eg.iter().sum();
        for v in &mut eg {
            *v /= s;
        }
        for (got, want) in stepped.w.weights().iter().zip(&eg) {
            assert!(
                (got - want).abs() <= 1e-12 * want.abs().max(1e-12),
                "EG mismatch: {got} vs {want}"
            );
        }
    }
}

#[test]
fn mirrorless_step_with_identity_link_is_projected_gradient_descent() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x90);
    let c = cfg(Variant::Mmd, LinkFamily::Identity, 1.0);
    for _ in 0..300 {
        let w = random_simplex(5, &mut rng);
        let grad: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let eta = rng.gen_range(0.01..0.5);
        let stepped = mmd_step(&c, &w, &grad, eta).unwrap();

        // plain GD step, clipped to the floor, renormalized
        let mut gd: Vec<f64> = w
            .weights()
            .iter()
            .zip(&grad)
            .map(|(wi, gi)| (wi - eta * gi).max(c.floor))
            .collect();
        let s: f64 = gd.iter().sum();
        for v in &mut gd {
            *v /= s;
        }
        for (got, want) in stepped.w.weights().iter().zip(&gd) {
            assert!(
                (got - want).abs() <= 1e-14 * want.abs().max(1e-14),
                "projected GD mismatch: {got} vs {want}"
            );
        }
    }
}

#[test]
fn iterates_stay_on_the_simplex_for_every_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51);
    let target = SimplexPoint::new(vec![0.6, 0.25, 0.15]).unwrap();
    let problem = problems::quadratic(&target).unwrap();
    for tag in catalog::TAGS {
        let family = catalog::sample(tag, &mut rng);
        for variant in [Variant::Md, Variant::Mmd] {
            let mut c = cfg(variant, family.clone(), 0.2);
            c.max_iters = 50;
            let w0 = random_simplex(3, &mut rng);
            let report = run(&c, &problem, &w0);
            assert!(report.error.is_none(), "{tag}: {:?}", report.error);
            for row in &report.trace.rows {
                let s: f64 = row.w.iter().sum();
                assert!(
                    (s - 1.0).abs() <= 1e-12,
                    "{tag} t={}: sum = {s}",
                    row.t
                );
                let min = row.w.iter().cloned().fold(f64::INFINITY, f64::min);
                assert!(
                    min >= c.floor * 0.99,
                    "{tag} t={}: min weight {min} under the floor",
                    row.t
                );
                assert!(row.loss.is_finite());
            }
        }
    }
}

#[test]
fn loss_is_monotone_at_small_step_sizes() {
    let target = SimplexPoint::new(vec![0.5, 0.3, 0.2]).unwrap();
    let problem = problems::quadratic(&target).unwrap();
    let w0 = SimplexPoint::uniform(3);
    for family in catalog::defaults() {
        for variant in [Variant::Md, Variant::Mmd] {
            let mut c = cfg(variant, family.clone(), 0.1);
            c.max_iters = 300;
            let report = run(&c, &problem, &w0);
            assert!(report.error.is_none(), "{}: {:?}", family.describe(), report.error);
            for pair in report.trace.rows.windows(2) {
                assert!(
                    pair[1].loss <= pair[0].loss + 1e-12,
                    "{} {:?}: loss rose {} -> {} at t = {}",
                    family.describe(),
                    variant,
                    pair[0].loss,
                    pair[1].loss,
                    pair[1].t
                );
            }
        }
    }
}

#[test]
fn natural_runs_reach_known_minimizers() {
    for dim in [2usize, 10] {
        let target = SimplexPoint::new(
            (1..=dim).map(|i| 1.0 / (i as f64 + 0.5)).collect(),
        )
        .unwrap();
        for problem in [
            problems::quadratic(&target).unwrap(),
            problems::cross_entropy(&target).unwrap(),
        ] {
            let mut c = cfg(Variant::Md, LinkFamily::Natural, 0.5);
            c.max_iters = 5000;
            c.grad_tol = 1e-10;
            let report = run(&c, &problem, &SimplexPoint::uniform(dim));
            assert!(report.error.is_none(), "{:?}", report.error);
            let w = report.final_weights();
            let err = w
                .iter()
                .zip(problem.known_minimizer().unwrap())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(
                err <= 1e-4,
                "{} {dim}-d: final error {err} after {} iterations",
                problem.name(),
                report.iterations
            );
        }
    }
}

#[test]
fn closed_and_numeric_exponential_paths_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc105ed);
    for family in [
        LinkFamily::Tsallis { q: 0.7 },
        LinkFamily::Tsallis { q: 1.4 },
        LinkFamily::Kaniadakis { kappa: 0.3 },
        LinkFamily::Htg { a: 0.3, b: -0.2 },
    ] {
        for _ in 0..50 {
            let w = random_simplex(3, &mut rng);
            let grad: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let closed = cfg(Variant::Md, family.clone(), 0.3);
            let mut numeric = closed.clone();
            numeric.force_numeric = true;
            let a = md_step(&closed, &w, &grad, 0.3).unwrap();
            let b = md_step(&numeric, &w, &grad, 0.3).unwrap();
            for (x, y) in a.w.weights().iter().zip(b.w.weights()) {
                assert!(
                    (x - y).abs() <= 1e-8 * x.max(1e-12),
                    "{}: closed {x} vs numeric {y}",
                    family.describe()
                );
            }
        }
    }
}

#[test]
fn oversized_steps_retry_with_halved_eta() {
    // Tsallis q = 2.5 has a bounded dual range (sup 1/(q-1)); a huge eta
    // pushes the dual point past it, so the runner must halve its way back
    let target = SimplexPoint::new(vec![0.9, 0.1]).unwrap();
    let problem = problems::quadratic(&target).unwrap();
    let mut c = cfg(Variant::Md, LinkFamily::Tsallis { q: 2.5 }, 50.0);
    c.max_iters = 3;
    let report = run(&c, &problem, &SimplexPoint::uniform(2));
    assert!(report.error.is_none(), "{:?}", report.error);
    assert!(
        report.trace.rows.iter().skip(1).any(|r| !r.step_accepted),
        "expected at least one halved step in {:?}",
        report
            .trace
            .rows
            .iter()
            .map(|r| r.step_accepted)
            .collect::<Vec<_>>()
    );

    // with retries forbidden the same configuration must fail loudly and
    // keep its partial trace
    let mut strict = c.clone();
    strict.max_retries = 0;
    let failed = run(&strict, &problem, &SimplexPoint::uniform(2));
    assert!(failed.error.is_some());
    assert!(!failed.trace.rows.is_empty());
}

#[test]
fn normalized_gradient_matches_finite_differences_off_simplex() {
    // the chain rule for L(w/||w||) — checked against finite differences of
    // the composite map at points that do NOT sum to one
    let target = SimplexPoint::new(vec![0.5, 0.3, 0.2]).unwrap();
    let problem = problems::cross_entropy(&target).unwrap();
    let w = [0.3, 0.5, 0.4]; // sums to 1.2
    let ng = normalized_grad(|u| problem.grad(u, 0), &w);
    let composite = |v: &[f64]| {
        let s: f64 = v.iter().sum();
        let u: Vec<f64> = v.iter().map(|x| x / s).collect();
        problem.loss(&u, 0)
    };
    let fd = problems::finite_diff_grad(composite, &w, 1e-7);
    for (a, n) in ng.iter().zip(&fd) {
        assert!(
            (a - n).abs() <= 1e-6 * a.abs().max(1.0),
            "chain rule {a} vs finite difference {n}"
        );
    }
}

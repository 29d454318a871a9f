//! The named families are special cases of one another; every printed
//! reduction must hold numerically. Each identity is checked pointwise to
//! absolute 1e-10 on a 100-point log grid across [1e-3, 1e3].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use simplex_md::generating::{GeneratingFunction, HKind};
use simplex_md::linkfn::log_grid;
use simplex_md::LinkFamily;

const TOL: f64 = 1e-10;

fn assert_same_log(lhs: &LinkFamily, rhs: &LinkFamily, grid: &[f64]) {
    for &x in grid {
        let a = lhs.log_eval(x).unwrap();
        let b = rhs.log_eval(x).unwrap();
        assert!(
            (a - b).abs() <= TOL,
            "{} vs {} at x = {x}: {a} vs {b} (diff {})",
            lhs.describe(),
            rhs.describe(),
            (a - b).abs()
        );
    }
}

fn grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 100)
}

#[test]
fn linear_phi_collapses_the_master_family_to_tsallis() {
    let grid = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let q: f64 = rng.gen_range(0.2..1.8);
        if (q - 1.0).abs() < 1e-3 {
            continue;
        }
        let a: f64 = rng.gen_range(0.5..3.0);
        let c: f64 = rng.gen_range(-1.0..1.0);
        let mut alpha: f64 = rng.gen_range(0.05..0.6);
        // keep the prefactor 1 - alpha*a away from zero
        if (1.0 - alpha * a).abs() < 0.05 {
            alpha *= 0.5;
        }
        let master = LinkFamily::Tempesta {
            phi: GeneratingFunction::linear(a, c),
            alpha,
            sigma: q - 1.0,
        };
        assert_same_log(&master, &LinkFamily::Tsallis { q }, &grid);
    }
}

#[test]
fn reciprocal_phi_gives_the_two_parameter_kappa_family() {
    let grid = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let alpha: f64 = rng.gen_range(0.2..3.0);
        let sigma: f64 = rng.gen_range(0.05..0.9) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let master = LinkFamily::Tempesta {
            phi: GeneratingFunction::reciprocal(),
            alpha,
            sigma,
        };
        let direct = LinkFamily::ExtKaniadakis { alpha, sigma };
        assert_same_log(&master, &direct, &grid);
    }
}

#[test]
fn two_parameter_family_at_unit_weight_is_kaniadakis() {
    let grid = grid();
    for kappa in [-0.8, -0.3, 0.1, 0.45, 0.9] {
        let lhs = LinkFamily::ExtKaniadakis {
            alpha: 1.0,
            sigma: kappa,
        };
        assert_same_log(&lhs, &LinkFamily::Kaniadakis { kappa }, &grid);
    }
}

#[test]
fn kls_without_drift_is_kaniadakis() {
    let grid = grid();
    for kappa in [-0.7, -0.2, 0.15, 0.5, 0.95] {
        let lhs = LinkFamily::Kls { kappa, r: 0.0 };
        assert_same_log(&lhs, &LinkFamily::Kaniadakis { kappa }, &grid);
    }
}

#[test]
fn kls_on_the_diagonal_is_tsallis() {
    let grid = grid();
    for q in [0.2, 0.6, 1.3, 1.8] {
        let k = (1.0 - q) / 2.0;
        let lhs = LinkFamily::Kls { kappa: k, r: k };
        assert_same_log(&lhs, &LinkFamily::Tsallis { q }, &grid);
    }
}

#[test]
fn three_parameter_family_at_unit_scale_is_kls() {
    let grid = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let kappa: f64 = rng.gen_range(0.1..0.9);
        let r = rng.gen_range(-kappa..kappa) * 0.99;
        let lhs = LinkFamily::ThreeParam {
            kappa,
            r,
            lambda: 1.0,
        };
        assert_same_log(&lhs, &LinkFamily::Kls { kappa, r }, &grid);
    }
}

#[test]
fn two_exponent_family_with_one_zero_exponent_is_tsallis() {
    let grid = grid();
    for q in [0.2, 0.5, 0.9, 1.4, 1.9] {
        let s = 1.0 - q;
        let tsallis = LinkFamily::Tsallis { q };
        // the exponent pair is unordered: (s, 0) and (0, s) are the same law
        let (a, b) = if s > 0.0 { (s, 0.0) } else { (0.0, s) };
        assert_same_log(&LinkFamily::Htg { a, b }, &tsallis, &grid);
        assert_same_log(&LinkFamily::Htg { a: b, b: a }, &tsallis, &grid);
    }
}

#[test]
fn ks_at_unit_lambda_is_kaniadakis() {
    let grid = grid();
    for kappa in [-0.75, -0.25, 0.2, 0.6, 0.95] {
        let lhs = LinkFamily::Ks { kappa, lambda: 1.0 };
        assert_same_log(&lhs, &LinkFamily::Kaniadakis { kappa }, &grid);
    }
}

#[test]
fn euler_with_one_zero_exponent_is_tsallis() {
    let grid = grid();
    for q in [0.15, 0.55, 1.25, 1.85] {
        let s = 1.0 - q;
        let (a, b) = if s > 0.0 { (s, 0.0) } else { (0.0, s) };
        assert_same_log(&LinkFamily::Euler { a, b }, &LinkFamily::Tsallis { q }, &grid);
    }
}

#[test]
fn sigmoid_form_with_tanh_matches_the_two_exponent_family() {
    let grid = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let a: f64 = rng.gen_range(0.02..0.55);
        let b = -rng.gen_range(0.02..(0.85 - a));
        let lhs = LinkFamily::HtgGeneral {
            a,
            b,
            h: HKind::Tanh,
        };
        assert_same_log(&lhs, &LinkFamily::Htg { a, b }, &grid);
    }
}

#[test]
fn two_exponent_family_reflection_and_reciprocal_identities() {
    // log_{a,b}(x) = -log_{-b,-a}(1/x), and away from x = 1 the reciprocal
    // values satisfy 1/log(1/x) + 1/log(x) = -(a+b)
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let a: f64 = rng.gen_range(0.02..0.55);
        let b = -rng.gen_range(0.02..(0.85 - a));
        let f = LinkFamily::Htg { a, b };
        let g = LinkFamily::Htg { a: -b, b: -a };
        let x: f64 = 10f64.powf(rng.gen_range(-2.5..2.5));
        if (x - 1.0).abs() < 0.05 {
            continue;
        }
        let lx = f.log_eval(x).unwrap();
        let gr = g.log_eval(1.0 / x).unwrap();
        assert!(
            (lx + gr).abs() <= 1e-9 * lx.abs().max(1.0),
            "reflection broke for a={a}, b={b}, x={x}: {lx} vs {gr}"
        );
        let linv = f.log_eval(1.0 / x).unwrap();
        let sum = 1.0 / linv + 1.0 / lx;
        assert!(
            (sum + (a + b)).abs() <= 1e-9,
            "reciprocal identity broke for a={a}, b={b}, x={x}: {sum} vs {}",
            -(a + b)
        );
    }
}

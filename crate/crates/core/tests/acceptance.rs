//! One line per acceptance criterion: `ACn PASS|FAIL <seconds>s <detail>`.
//! Exits nonzero when any criterion fails.

use std::time::Instant;

use muntz_lab::exponents::{delta_lemma_check, make_geometric, DeltaParams, Direction, ExponentSequence};
use muntz_lab::measures::{
    check_a_condition, check_b_condition, check_mx_gamma, default_eps_grid, lp_norm, DistributionOpts, LevelGrid,
    Measure,
};
use muntz_lab::muntz_poly::{sup_norm, MuntzPolynomial};
use muntz_lab::operators::{diagonal_with_profile, identity, CounterexampleParams, Operator};
use muntz_lab::par::Exec;
use muntz_lab::quadrature::Abscissa;
use muntz_lab::rng::task_rng;
use muntz_lab::special::{jacobi_moment, ln_beta};
use muntz_lab::sphere::SphereOpts;
use muntz_lab::typeconst::{
    decoupling_ratio, epsilon_profile, restricted_strong_constant, restricted_weak_constant, InterpolationConfig,
};
use muntz_lab::verify::{
    default_suite, dyadic_partition, example_supercritical_case, run_counterexample_growth, run_interpolation_suite,
    run_necessity_check, run_theorem_a_check, run_theorem_b_check, RunOpts, Status, Which,
};
use rand::Rng;

const SEED: u64 = 20240601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn run(id: &str, limit_s: f64, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let o = f();
    let secs = t.elapsed().as_secs_f64();
    let pass = o.pass && secs < limit_s;
    let timing = if secs < limit_s { String::new() } else { format!(" (over the {limit_s}s limit)") };
    println!("{id} {} {secs:.2}s {}{timing}", if pass { "PASS" } else { "FAIL" }, o.detail);
    pass
}

fn opts() -> RunOpts {
    RunOpts::new(SEED, Exec::Parallel)
}

/// Moments of (1−x)^{γ−1}dx: adaptive quadrature against log-gamma.
fn ac1() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in [0.0, 1.0, 10.0, 1e3, 1e6] {
        for g in [0.5, 1.0, 2.0] {
            let q = Measure::jacobi(g).unwrap().moment_quadrature(s).unwrap();
            let c = jacobi_moment(s, g);
            worst = worst.max(((q - c) / c).abs());
        }
    }
    outcome(worst <= 1e-9, format!("max relative error {worst:.2e} over 15 cases (tol 1e-9)"))
}

/// Decoupling interval endpoints move < 5% when samples double.
fn ac2() -> Outcome {
    let part = dyadic_partition(12).unwrap();
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for p in [1.0, 2.0] {
        for alpha in [0.5, 1.0, 2.0] {
            let a = decoupling_ratio(&part, p, alpha, 500, SEED, Exec::Parallel).unwrap();
            let b = decoupling_ratio(&part, p, alpha, 1000, SEED, Exec::Parallel).unwrap();
            let lo = ((b.c_low - a.c_low) / a.c_low).abs();
            let hi = ((b.c_high - a.c_high) / a.c_high).abs();
            worst = worst.max(lo).max(hi);
            lines.push(format!("p={p} a={alpha}: [{:.4},{:.4}]->[{:.4},{:.4}]", a.c_low, a.c_high, b.c_low, b.c_high));
        }
    }
    outcome(worst < 0.05, format!("max endpoint move {:.2}% (tol 5%); {}", 100.0 * worst, lines.join("; ")))
}

/// Block-level interpolation over five operators, k ≤ 20.
fn ac3() -> Outcome {
    let suite = default_suite(20).unwrap();
    let rep = run_interpolation_suite(&suite, 20, &opts()).unwrap();
    let ks: Vec<String> = suite
        .iter()
        .map(|c| format!("{}: K={:.4}", c.name, rep.parameters[format!("K_{}", c.name)].as_f64().unwrap()))
        .collect();
    let failed: Vec<&str> = rep.verdicts.iter().filter(|v| v.status != Status::Pass).map(|v| v.name.as_str()).collect();
    outcome(suite.len() >= 5 && rep.status == Status::Pass, format!("{}; failing: {failed:?}", ks.join(", ")))
}

/// Theorem A for the identity on Lebesgue measure.
fn ac4() -> Outcome {
    let part = dyadic_partition(24).unwrap();
    let op: Operator = identity(part.seq()).into();
    let cfg = InterpolationConfig::new(1.5, 4.0, 2.0, 1.0, 1.0, Measure::jacobi(1.0).unwrap()).unwrap();
    let rep = run_theorem_a_check(&op, &part, &cfg, 200, &opts()).unwrap();
    let detail = rep.get("bound").map(|v| v.detail.clone()).unwrap_or_else(|| format!("{:?}", rep.verdicts));
    outcome(rep.status == Status::Pass, detail)
}

fn dyadic_ns() -> Vec<usize> {
    vec![8, 16, 32, 64, 128]
}

/// Subcritical counterexample growth.
fn ac5() -> Outcome {
    let prm = CounterexampleParams { r: 2.0, alpha: 1.0, beta: 1.0, gamma: 1.0, eps: 0.2, eta: 0.0 };
    let rep = run_counterexample_growth(Which::Subcritical, &prm, &dyadic_ns(), &opts()).unwrap();
    let (sf, sr) = (rep.fits["s_f"], rep.fits["ratio"]);
    let bounded = rep.get("restricted_bounded").unwrap().status == Status::Pass;
    let r2 = rep.fits.values().all(|f| f.r2 >= 0.99);
    let pass = (sf.slope - 0.5).abs() <= 0.05 && sr.slope >= 0.35 && bounded && r2;
    outcome(
        pass,
        format!("s_f={:.4} (0.5±0.05), ratio slope={:.4} (>=0.35), restricted bounded={bounded}, R2 ok={r2}", sf.slope, sr.slope),
    )
}

/// Supercritical counterexample growth.
fn ac6() -> Outcome {
    let prm = CounterexampleParams { r: 2.0, alpha: 1.0, beta: 0.5, gamma: 0.5, eps: 0.1, eta: 0.1 };
    let rep = run_counterexample_growth(Which::Supercritical, &prm, &dyadic_ns(), &opts()).unwrap();
    let sr = rep.fits["ratio"];
    outcome(
        (sr.slope - 0.15).abs() <= 0.05,
        format!("ratio slope={:.4} (0.15±0.05), s_f={:.4}, s_T={:.4}", sr.slope, rep.fits["s_f"].slope, rep.fits["s_T"].slope),
    )
}

/// Theorem B on the infinite-kernel example.
fn ac7() -> Outcome {
    let case = example_supercritical_case(21).unwrap();
    let rep = run_theorem_b_check(&case.op, &case.part, &case.cfg, 200, &opts()).unwrap();
    let prof = epsilon_profile(&case.op, &case.part, &case.cfg, case.cfg.p, 0..21, &opts().sphere).unwrap();
    let detail = rep.get("bound").map(|v| v.detail.clone()).unwrap_or_else(|| format!("{:?}", rep.verdicts));
    outcome(
        rep.status == Status::Pass && prof.summable,
        format!("{detail}; epsilon summable={}, C_eps={:.4}", prof.summable, prof.c_eps),
    )
}

/// Necessity: 1/k profile fails, the infinite-kernel example passes.
fn ac8() -> Outcome {
    let case = example_supercritical_case(21).unwrap();
    let good = run_necessity_check(&case.op, &case.part, &case.cfg, 20, &opts()).unwrap();
    let part = dyadic_partition(40).unwrap();
    let eps: Vec<f64> = (0..40).map(|k| 1.0 / (k + 1) as f64).collect();
    let (r, alpha, beta, gamma) = (2.0, 1.0, 0.5, 0.5);
    let op: Operator = diagonal_with_profile(part.seq(), &eps, r, alpha, beta, gamma).unwrap().into();
    let cfg = InterpolationConfig::new(1.5, 2.5, r, alpha, beta, Measure::jacobi(gamma).unwrap()).unwrap();
    let bad = run_necessity_check(&op, &part, &cfg, 39, &opts()).unwrap();
    outcome(
        good.status == Status::Pass && bad.status == Status::Fail,
        format!("example: {:?}, 1/k diagonal: {:?}", good.status, bad.status),
    )
}

/// Moment and mass conditions on Jacobi weights and an atom at 1.
fn ac9() -> Outcome {
    let part = dyadic_partition(30).unwrap();
    let (alpha, beta) = (2.0, 1.5);
    let ab = alpha * beta;
    let nu = Measure::jacobi(ab).unwrap();
    let b = check_b_condition(&nu, 1.0, &part, alpha, beta).unwrap();
    let mx = check_mx_gamma(&nu, ab, &default_eps_grid()).unwrap();
    let mx_ok = mx.verdict && (mx.constant - 1.0 / ab).abs() <= 1e-6;
    let atom = Measure::atom(1.0, 1.0).unwrap();
    let atom_b = check_b_condition(&atom, 1.0, &part, alpha, beta).unwrap().verdict;
    let atom_a = check_a_condition(&atom, 1.0, &part, 1.0, 0.5).unwrap().verdict;
    let atom_m = check_mx_gamma(&atom, ab, &default_eps_grid()).unwrap().verdict;
    let (a_alpha, a_beta) = (1.0, 0.5);
    let a = check_a_condition(&Measure::jacobi(a_alpha * a_beta + 0.5).unwrap(), 1.0, &part, a_alpha, a_beta).unwrap();
    let pass = b.verdict && mx_ok && !atom_b && !atom_a && !atom_m && a.verdict;
    outcome(
        pass,
        format!(
            "B={}, M const={:.9} (1/ab={:.9}), atom B/A/M={}/{}/{}, A on gamma=ab+0.5: {}",
            b.verdict, mx.constant, 1.0 / ab, atom_b, atom_a, atom_m, a.verdict
        ),
    )
}

/// Composite two-point Gauss-Legendre; never evaluates at panel ends.
fn gauss2(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let d = 0.5 * h / 3f64.sqrt();
    (0..n).map(|j| a + (j as f64 + 0.5) * h).map(|m| f(m - d) + f(m + d)).sum::<f64>() * 0.5 * h
}

fn random_poly<R: Rng>(rng: &mut R, exps: &[f64]) -> MuntzPolynomial {
    MuntzPolynomial::new(exps.iter().map(|&l| (l, rng.random_range(-2.0..2.0))).collect()).unwrap()
}

/// Invariant suites.
fn ac10() -> Outcome {
    let mut notes = Vec::new();
    let mut all = true;
    let mut rng = task_rng(SEED, &[10]);
    let exps: Vec<f64> = make_geometric(1.0, 2.0, 16).unwrap().values().to_vec();
    let mus = [Measure::lebesgue(), Measure::jacobi(0.5).unwrap(), Measure::jacobi(2.0).unwrap().with_atom(0.7, 0.5).unwrap()];

    // Homogeneity and triangle inequality of L^p norms.
    let (mut homog, mut tri) = (true, true);
    for i in 0..30 {
        let mu = &mus[i % 3];
        let p = [1.0, 1.5, 2.0, 3.0][i % 4];
        let f = random_poly(&mut rng, &exps);
        let g = random_poly(&mut rng, &exps);
        let nf = lp_norm(&f, p, mu).unwrap();
        let c: f64 = rng.random_range(-10.0..10.0);
        homog &= ((lp_norm(&f.scale(c), p, mu).unwrap() - c.abs() * nf) / (c.abs() * nf)).abs() < 1e-10;
        tri &= lp_norm(&f.add(&g), p, mu).unwrap() <= (nf + lp_norm(&g, p, mu).unwrap()) * (1.0 + 1e-12);
    }
    notes.push(format!("homogeneity={homog} triangle={tri}"));
    all &= homog && tri;

    // Markov and Gram equivalence on two-term blocks.
    let s = ExponentSequence::new(vec![1.0, 1.5, 6.0, 9.0, 36.0, 54.0]).unwrap();
    let part = muntz_lab::exponents::validate_quasi_lacunary(&s, &[2, 2, 2], 2.0).unwrap();
    let id: Operator = identity(part.seq()).into();
    let sphere = SphereOpts { seed: SEED, ..SphereOpts::default() };
    let (mut markov, mut gram) = (true, 0.0f64);
    for (gamma, alpha) in [(0.5, 1.5), (2.0, 0.7)] {
        let cfg = InterpolationConfig::new(1.5, 4.0, 2.0, alpha, 1.0, Measure::jacobi(gamma).unwrap()).unwrap();
        for k in 0..3 {
            let st = restricted_strong_constant(&id, &part, k, 2.0, &cfg, &sphere).unwrap();
            let w = restricted_weak_constant(&id, &part, k, 2.0, &cfg, &sphere).unwrap();
            markov &= w <= st * (1.0 + 1e-6);
            let l = part.block(k).unwrap();
            let b = |i: usize, j: usize, c: f64| ln_beta(l[i] + l[j] + 1.0, c).exp();
            let (g, h) = ([b(0, 0, gamma), b(0, 1, gamma), b(1, 1, gamma)], [b(0, 0, alpha), b(0, 1, alpha), b(1, 1, alpha)]);
            let a2 = h[0] * h[2] - h[1] * h[1];
            let a1 = -(g[0] * h[2] + g[2] * h[0] - 2.0 * g[1] * h[1]);
            let a0 = g[0] * g[2] - g[1] * g[1];
            let want = ((-a1 + (a1 * a1 - 4.0 * a2 * a0).sqrt()) / (2.0 * a2)).sqrt();
            gram = gram.max(((st - want) / want).abs());
        }
    }
    notes.push(format!("markov={markov} gram max rel err={gram:.2e}"));
    all &= markov && gram <= 1e-6;

    // Cavalieri: ‖g‖_r^r = r∫ λ^{r−1} μ(|g| > λ) dλ, by Gauss-Legendre in ln λ.
    let mut cav = 0.0f64;
    for i in 0..6 {
        let mu = &mus[i % 3];
        let r = [1.5, 2.0, 3.0][i % 3];
        let g = random_poly(&mut rng, &exps[..8]);
        let grid = LevelGrid::new(&g, &DistributionOpts::default());
        let top = sup_norm(&g).ln();
        let lo = top - 60.0 * std::f64::consts::LN_2;
        let integrand = |u: f64| {
            let l = u.exp();
            r * l.powf(r) * grid.distribution(mu, l).unwrap()
        };
        // Atoms make the distribution jump at their levels; integrate piecewise.
        let mut cuts: Vec<f64> = mu.atoms().iter().map(|&(x, _)| g.eval_at(Abscissa::from_t(x)).abs().ln()).filter(|&u| u > lo && u < top).collect();
        cuts.extend([lo, top]);
        cuts.sort_by(f64::total_cmp);
        let layered: f64 = cuts.windows(2).map(|w| gauss2(integrand, w[0], w[1], 6000)).sum();
        let direct = mu.integral_pow(&g, r).unwrap();
        cav = cav.max(((layered - direct) / direct).abs());
    }
    notes.push(format!("cavalieri max rel err={cav:.2e}"));
    all &= cav <= 1e-3;

    // Δ-lemma: ratio within its Hölder constant over 50 draws.
    let mut delta_ok = true;
    for _ in 0..50 {
        let q: f64 = rng.random_range(1.5..4.0);
        let len = rng.random_range(8..40);
        let lam = make_geometric(rng.random_range(0.5..3.0), q, len).unwrap();
        let eps: Vec<f64> = (0..len).map(|_| rng.random_range(0.01..1.0)).collect();
        let prm = DeltaParams {
            n: rng.random_range(2..5),
            kappa: rng.random_range(0.1..2.0),
            tau: rng.random_range(0.05..0.95),
            beta: rng.random_range(0.05..0.95),
            a: rng.random_range(1..5),
        };
        let i = rng.random_range(0..len);
        for dir in [Direction::Above, Direction::Below] {
            let c = delta_lemma_check(&lam, &eps, prm, i, dir).unwrap();
            delta_ok &= c.empty || (c.ratio.is_finite() && c.ratio <= c.constant * (1.0 + 1e-12));
        }
    }
    notes.push(format!("delta bounded={delta_ok}"));
    all &= delta_ok;
    outcome(all, notes.join(", "))
}

/// Id, time limit in seconds, check.
type Criterion = (&'static str, f64, fn() -> Outcome);

fn main() {
    let limits: [Criterion; 10] = [
        ("AC1", 1.0, ac1),
        ("AC2", 30.0, ac2),
        ("AC3", 300.0, ac3),
        ("AC4", 120.0, ac4),
        ("AC5", 60.0, ac5),
        ("AC6", 60.0, ac6),
        ("AC7", 180.0, ac7),
        ("AC8", 60.0, ac8),
        ("AC9", 30.0, ac9),
        ("AC10", 300.0, ac10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, limit, f) in limits {
        if !filter.is_empty() && !filter.iter().any(|x| x == id) {
            continue;
        }
        if !run(id, limit, f) {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

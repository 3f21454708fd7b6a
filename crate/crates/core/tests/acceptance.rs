//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::HashMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use percolab::giant::{rho_lower_bound, rho_upper_bound, solve_rho, t1_bounds};
use percolab::harness::{csv_string, run_experiment, ExperimentConfig, ExperimentKind};
use percolab::ode::{integrate_raw, BfLimit, OdeOptions};
use percolab::{brute_force_moments, ComponentLedger, ProcessKind, SizeDistribution};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol
}

/// ρ = 1 − e^{−cρ} by plain bisection.
fn er_rho(c: f64) -> f64 {
    let (mut lo, mut hi) = (1e-9, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 1.0 - (-c * mid).exp() > mid {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn constants() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_percolab"))
        .arg("ode")
        .output()
        .expect("run percolab ode");
    let elapsed = start.elapsed();
    if !out.status.success() {
        return outcome(false, format!("exit status {}", out.status));
    }
    let text = String::from_utf8_lossy(&out.stdout);
    let kv: HashMap<&str, f64> = text
        .lines()
        .filter_map(|l| l.split_once('='))
        .filter_map(|(k, v)| v.parse().ok().map(|v| (k, v)))
        .collect();
    let targets = [
        ("tc", 1.1763, 0.001),
        ("x_tc", 0.2438, 0.001),
        ("alpha", 1.063, 0.005),
        ("beta", 0.764, 0.005),
        ("g3", 0.917, 0.01),
        ("g4", 2.375, 0.02),
        ("gamma", 2.463, 0.01),
    ];
    let mut ok = elapsed < Duration::from_secs(5);
    let mut parts = vec![format!("{:.3}s", elapsed.as_secs_f64())];
    for (k, want, tol) in targets {
        let got = kv.get(k).copied().unwrap_or(f64::NAN);
        ok &= within(got, want, tol);
        parts.push(format!("{k}={got:.4}"));
    }
    outcome(ok, parts.join(" "))
}

fn er_closed_form() -> Outcome {
    let start = Instant::now();
    let traj = match integrate_raw(0.75, true, &OdeOptions::with_tol(1e-13)) {
        Ok(t) => t,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut worst: f64 = 0.0;
    for t in [0.25, 0.5, 0.75] {
        let s2 = traj.at(t).unwrap()[1];
        worst = worst.max((s2 * (1.0 - t) - 1.0).abs());
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-9 && elapsed < Duration::from_secs(1),
        format!("max rel err {worst:.2e} in {:.3}s", elapsed.as_secs_f64()),
    )
}

fn er_giant() -> Outcome {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Giant, 1_000_000, 10, 0x5eed_0003);
    cfg.t_grid = vec![1.5];
    cfg.process = Some(ProcessKind::ErWithoutReplacement);
    let out = run_experiment(&cfg).expect("giant experiment");
    let mean = out.aggregate("c1_frac", Some(1.5), None).unwrap().value;
    let oracle = er_rho(1.5);
    outcome(
        within(mean, oracle, 0.01),
        format!("mean C1/n {mean:.5} vs {oracle:.5}"),
    )
}

fn bf_moments() -> Outcome {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Moments, 1_000_000, 10, 0x5eed_0004);
    cfg.t_grid = vec![0.5, 1.0];
    let out = run_experiment(&cfg).expect("moments experiment");
    let mut ok = true;
    let mut parts = Vec::new();
    for t in [0.5, 1.0] {
        for obs in ["x1", "s2", "s3", "s4"] {
            let r = out.aggregate(obs, Some(t), None).unwrap();
            let rel = r.rel_err.unwrap();
            ok &= rel <= 0.02;
            parts.push(format!("{obs}@{t}:{rel:.4}"));
        }
    }
    outcome(ok, format!("rel errs {}", parts.join(" ")))
}

fn bf_growth() -> Outcome {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Growth, 2_000_000, 10, 0x5eed_0005);
    cfg.delta_grid = vec![0.05, 0.1, 0.15];
    let out = run_experiment(&cfg).expect("growth experiment");
    let at = out.aggregate("c1_frac", None, Some(0.1)).unwrap();
    let (mean, pred) = (at.value, at.prediction.unwrap());
    let slope = out.rows.iter().find(|r| r.observable == "slope").unwrap();
    let gamma = slope.prediction.unwrap();
    let rel_c1 = (mean - pred).abs() / pred;
    let rel_slope = (slope.value - gamma).abs() / gamma;
    outcome(
        rel_c1 <= 0.15 && rel_slope <= 0.2,
        format!(
            "C1/n {mean:.4} vs {pred:.4} (rel {rel_c1:.3}); slope {:.3} vs {gamma:.3} (rel {rel_slope:.3})",
            slope.value
        ),
    )
}

fn divergence_law() -> Outcome {
    let limit = BfLimit::compute(&OdeOptions::default()).expect("ode");
    let c = *limit.constants();
    let dev = |eps: f64| {
        let (s2, _, _) = limit.sbar_k(c.tc - eps).unwrap();
        (s2 * eps / c.alpha - 1.0).abs()
    };
    let (d2, d1) = (dev(0.2), dev(0.1));
    let (s2, s3, s4) = limit.sbar_k(c.tc - 0.1).unwrap();
    let r3 = (s3 / s2.powi(3) - c.beta).abs() / c.beta;
    let r4 = (s4 / s2.powi(5) - 3.0 * c.beta * c.beta).abs() / (3.0 * c.beta * c.beta);
    outcome(
        d1 < d2 && d1 < 0.2 && r3 <= 0.10 && r4 <= 0.15,
        format!("|s2·ε/α−1| {d2:.4}→{d1:.4}; s3/s2³ rel {r3:.4}; s4/s2⁵ rel {r4:.4}"),
    )
}

fn ledger_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1ed6e7);
    let mut failures = 0;
    let mut insertions = 0usize;
    for _ in 0..1000 {
        let n = rng.random_range(1..=200usize);
        let len = rng.random_range(0..=2 * n);
        let mut ledger = ComponentLedger::new(n).unwrap();
        let mut edges = Vec::with_capacity(len);
        for _ in 0..len {
            let e = (rng.random_range(0..n), rng.random_range(0..n));
            ledger.add_edge(e.0, e.1).unwrap();
            edges.push(e);
            insertions += 1;
            let bf = brute_force_moments(&edges, n);
            let m = ledger.moments();
            let sums = [m.s_sum(1), m.s_sum(2), m.s_sum(3), m.s_sum(4)];
            let c2 = ledger.snapshot_distribution().c2();
            if sums != bf.s_sums || m.c1() != bf.c1 || m.n1() != bf.n1 || c2 != bf.c2 {
                failures += 1;
            }
        }
    }
    outcome(
        failures == 0,
        format!("{failures} mismatches over {insertions} insertions"),
    )
}

fn bound_sandwich() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb0a2d5);
    let (mut violations, mut upper_checked) = (0, 0);
    let mut made = 0;
    while made < 500 {
        let k = rng.random_range(1..=5);
        let pairs: Vec<(u64, u64)> = (0..k)
            .map(|_| (rng.random_range(1..=20u64), rng.random_range(1..=1000u64)))
            .collect();
        let dist = SizeDistribution::from_counts(pairs).unwrap();
        let s2 = dist.s(2);
        let t = (1.0 + rng.random_range(0.001..2.0)) / s2;
        let rho = solve_rho(&dist, t, 1e-13).unwrap().rho;
        let (ey, ey2, ey3) = (t * s2, t * t * dist.s(3), t.powi(3) * dist.s(4));
        made += 1;
        if rho_lower_bound(ey, ey2).unwrap() >= rho {
            violations += 1;
        }
        let up = rho_upper_bound(ey, ey2, ey3).unwrap();
        if up.valid {
            upper_checked += 1;
            if up.bound.unwrap() <= rho {
                violations += 1;
            }
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations; upper bound applicable in {upper_checked}/500"),
    )
}

fn t1_desk_scale() -> Outcome {
    let n = 1_000_000;
    let t = 1.0 / 1.5 + 0.05;
    let mut cfg = ExperimentConfig::new(ExperimentKind::Giant, n, 1, 0x5eed_0009);
    cfg.t_grid = vec![t];
    cfg.initial = format!("2:{}", n / 4);
    cfg.process = Some(ProcessKind::ErPoissonTime);
    let out = run_experiment(&cfg).expect("giant experiment");
    let got = out.aggregate("c1_frac", Some(t), None).unwrap().value;
    let b = t1_bounds(1.5, 2.5, 4.5, t).unwrap();
    let hi = if b.upper_valid {
        b.upper + 0.01
    } else {
        f64::INFINITY
    };
    outcome(
        got >= b.lower - 0.01 && got <= hi,
        format!("C1/n {got:.4} in [{:.4}, {:.4}] ± 0.01", b.lower, b.upper),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    std::fs::write(
        &config,
        "experiment = \"two_phase\"\nn = 20000\nreplicates = 4\nseed = 11\ndelta_grid = [0.1]\noutput = \"out.csv\"\n",
    )
    .unwrap();
    let run = || {
        let status = Command::new(env!("CARGO_BIN_EXE_percolab"))
            .args(["experiment", "--config"])
            .arg(&config)
            .stderr(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(dir.path().join("out.csv")).unwrap()
    };
    let (a, b) = (run(), run());

    let mut cfg = ExperimentConfig::new(ExperimentKind::VariantAgreement, 20000, 6, 12);
    cfg.t_grid = vec![0.5, 1.5];
    cfg.threads = Some(1);
    let serial = csv_string(&run_experiment(&cfg).unwrap().rows).unwrap();
    cfg.threads = Some(4);
    let parallel = csv_string(&run_experiment(&cfg).unwrap().rows).unwrap();
    outcome(
        !a.is_empty() && a == b && serial == parallel,
        format!(
            "cli rerun {} bytes identical: {}; 1 vs 4 threads identical: {}",
            a.len(),
            a == b,
            serial == parallel
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("constants", constants),
        ("er closed form", er_closed_form),
        ("er giant component", er_giant),
        ("bf subcritical moments", bf_moments),
        ("bf supercritical growth", bf_growth),
        ("divergence law", divergence_law),
        ("ledger oracle", ledger_oracle),
        ("bound sandwich", bound_sandwich),
        ("closed-form bounds at desk scale", t1_desk_scale),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "{tag} [{}] {name}: {} ({:.1}s)",
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!o.passed);
    }
    println!(
        "{} of {} acceptance criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

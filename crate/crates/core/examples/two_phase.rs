//! Freeze a Bohman–Frieze graph at t_c − δ^{2/3}, then finish with plain
//! uniform edges and compare with letting the rule run on.
//!
//!     cargo run --release --example two_phase -- 1000000

use percolab::harness::{run_experiment, ExperimentConfig, ExperimentKind};

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(200_000);
    let mut cfg = ExperimentConfig::new(ExperimentKind::TwoPhase, n, 4, 21);
    cfg.delta_grid = vec![0.05, 0.1];
    let out = run_experiment(&cfg).unwrap();

    println!(
        "{:>6} {:<20} {:>12} {:>12} {:>10}",
        "delta", "observable", "mean", "prediction", "stderr"
    );
    for &d in &cfg.delta_grid {
        for obs in [
            "s2_frozen",
            "s3_over_s2_cubed",
            "c1_frac_direct",
            "c1_frac_two_phase",
            "c1_frac_gap",
        ] {
            let r = out.aggregate(obs, None, Some(d)).unwrap();
            let p = r.prediction.map_or("-".into(), |p| format!("{p:.5}"));
            println!(
                "{d:>6} {obs:<20} {:>12.5} {p:>12} {:>10.5}",
                r.value,
                r.stderr.unwrap_or(0.0)
            );
        }
    }
    for c in &out.checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
}

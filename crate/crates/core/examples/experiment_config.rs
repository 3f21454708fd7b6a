//! Drive the harness from a TOML description, as `percolab experiment`
//! does, and print the CSV and check results.

use percolab::harness::{csv_string, run_experiment, ExperimentConfig};

const CONFIG: &str = r#"
experiment = "variant_agreement"
n = 200000
replicates = 8
seed = 2024
t_grid = [0.5, 0.75, 1.5]

[tolerance]
sigmas = 3.0
relative = 0.02
rationale = "finite-n + δ^{4/3} correction"
"#;

fn main() {
    let text = std::env::args()
        .nth(1)
        .map(|p| std::fs::read_to_string(p).expect("readable config"))
        .unwrap_or_else(|| CONFIG.to_string());
    let cfg = ExperimentConfig::from_toml(&text).unwrap();
    let out = run_experiment(&cfg).unwrap();
    let csv = csv_string(&out.rows).unwrap();
    for line in csv
        .lines()
        .filter(|l| l.starts_with("experiment") || l.contains(",agg,"))
    {
        println!("{line}");
    }
    println!();
    for c in &out.checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
}

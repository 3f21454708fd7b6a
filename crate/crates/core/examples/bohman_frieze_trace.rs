//! A Bohman–Frieze run traced against the limit ODE, then carried through
//! the critical point.
//!
//!     cargo run --release --example bohman_frieze_trace -- 1000000

use percolab::ode::{BfLimit, OdeOptions};
use percolab::{run_process, ProcessKind, RunConfig};

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(200_000);
    let limit = BfLimit::compute(&OdeOptions::default()).unwrap();
    let tc = limit.tc();
    let times: Vec<f64> = vec![
        0.25,
        0.5,
        0.75,
        1.0,
        1.1,
        tc,
        tc + 0.05,
        tc + 0.1,
        tc + 0.12,
    ];
    let trace = run_process(&RunConfig::new(
        ProcessKind::BohmanFrieze,
        n,
        tc + 0.12,
        times.clone(),
        3,
    ))
    .unwrap();

    println!("t_c = {tc:.6}\n");
    println!(
        "{:>8} {:>9} {:>9} {:>10} {:>10} {:>9}",
        "t", "x1", "x1 ode", "s2", "s2 ode", "C1/n"
    );
    for (rec, &t) in trace.iter().zip(&times) {
        let x = limit.x_bar(t).unwrap();
        let s2 = limit
            .sbar_k(t)
            .map(|s| format!("{:.4}", s.0))
            .unwrap_or_else(|_| "-".into());
        println!(
            "{:>8.4} {:>9.5} {:>9.5} {:>10.4} {:>10} {:>9.5}",
            t, rec.x1, x, rec.s2, s2, rec.c1_frac
        );
    }
    let gamma = limit.constants().gamma;
    println!(
        "\nlinear prediction at t_c + 0.1: C1/n ≈ γδ = {:.4}",
        gamma * 0.1
    );
}

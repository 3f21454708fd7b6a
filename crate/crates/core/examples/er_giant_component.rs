//! Largest component of the three Erdős–Rényi variants against the
//! survival fixed point.
//!
//!     cargo run --release --example er_giant_component -- 1000000

use percolab::giant::solve_rho;
use percolab::{run_process, ProcessKind, RunConfig, SizeDistribution};

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(200_000);
    let times = vec![0.5, 0.9, 1.1, 1.5, 2.0, 3.0];
    let empty = SizeDistribution::from_counts([(1, n as u64)]).unwrap();

    print!("{:>6} {:>10}", "t", "rho");
    for kind in ProcessKind::ER_VARIANTS {
        print!(" {:>12}", kind.name());
    }
    println!();

    let traces: Vec<_> = ProcessKind::ER_VARIANTS
        .iter()
        .map(|&k| run_process(&RunConfig::new(k, n, 3.0, times.clone(), 7)).unwrap())
        .collect();
    for (j, &t) in times.iter().enumerate() {
        let rho = solve_rho(&empty, t, 1e-12).unwrap().rho;
        print!("{t:>6} {rho:>10.5}");
        for trace in &traces {
            print!(" {:>12.5}", trace[j].c1_frac);
        }
        println!();
    }
}

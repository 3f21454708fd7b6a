//! Largest component under uniform edges, the Bohman–Frieze rule and the
//! product rule. Bohman–Frieze delays the transition. The product rule here
//! keeps the edge with the larger size product, so it pulls the transition
//! earlier; the explosive variant studied elsewhere keeps the smaller one.
//!
//!     cargo run --release --example product_rule_contrast -- 1000000

use percolab::{run_process, ProcessKind, RunConfig};

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(200_000);
    let times: Vec<f64> = (16..=36).map(|i| i as f64 * 0.05).collect();
    let kinds = [
        ProcessKind::ErWithReplacement,
        ProcessKind::BohmanFrieze,
        ProcessKind::ProductRule,
    ];
    let traces: Vec<_> = kinds
        .iter()
        .map(|&k| run_process(&RunConfig::new(k, n, 1.8, times.clone(), 5)).unwrap())
        .collect();

    print!("{:>6}", "t");
    for k in kinds {
        print!(" {:>10}", k.name());
    }
    println!();
    for (j, t) in times.iter().enumerate() {
        print!("{t:>6.2}");
        for tr in &traces {
            print!(" {:>10.5}", tr[j].c1_frac);
        }
        println!();
    }
}

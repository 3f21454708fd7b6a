//! Incremental component moments against a from-scratch recount.
//!
//!     cargo run --example ledger_moments -- 5000

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use percolab::{brute_force_moments, ComponentLedger};

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(2000);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut ledger = ComponentLedger::new(n).unwrap();
    let mut edges = Vec::new();

    println!(
        "{:>8} {:>10} {:>12} {:>14} {:>8} {:>8}",
        "edges", "s2", "s3", "s4", "C1", "N1"
    );
    for block in 1..=8 {
        while edges.len() < block * n / 8 {
            let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
            ledger.add_edge(u, v).unwrap();
            edges.push((u, v));
        }
        let m = ledger.moments();
        println!(
            "{:>8} {:>10.4} {:>12.4} {:>14.4} {:>8} {:>8}",
            edges.len(),
            m.s(2),
            m.s(3),
            m.s(4),
            m.c1(),
            m.n1()
        );
    }

    let bf = brute_force_moments(&edges, n);
    let m = ledger.moments();
    let same =
        (1..=4).all(|k| m.s_sum(k) == bf.s_sums[k - 1]) && m.c1() == bf.c1 && m.n1() == bf.n1;
    println!("\nbreadth-first recount agrees: {same}");
    let d = ledger.snapshot_distribution();
    println!("components {}, second largest {}", d.components(), d.c2());
}

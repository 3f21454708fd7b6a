use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use percolab::harness::variant_seed;
use percolab::process::Pick;
use percolab::{run_process, InitialGraphSpec, ProcessKind, RunConfig, SimOptions, Simulation};

/// Mean and standard error of `s₂` at each time over `reps` seeds.
fn s2_stats(kind: ProcessKind, n: usize, times: &[f64], reps: u64, loops: bool) -> Vec<(f64, f64)> {
    let runs: Vec<Vec<f64>> = (0..reps)
        .map(|i| {
            let cfg = RunConfig::new(
                kind,
                n,
                *times.last().unwrap(),
                times.to_vec(),
                variant_seed(1000 + i, kind as usize + 8 * usize::from(!loops)),
            )
            .with_loops(loops);
            run_process(&cfg).unwrap().iter().map(|r| r.s2).collect()
        })
        .collect();
    (0..times.len())
        .map(|j| {
            let v: Vec<f64> = runs.iter().map(|r| r[j]).collect();
            let m = v.iter().sum::<f64>() / v.len() as f64;
            let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
            (m, (var / v.len() as f64).sqrt())
        })
        .collect()
}

fn agree(a: (f64, f64), b: (f64, f64), sigmas: f64) -> bool {
    (a.0 - b.0).abs() <= sigmas * (a.1 * a.1 + b.1 * b.1).sqrt()
}

#[test]
fn er_variants_agree_on_susceptibility() {
    let times = [0.5, 0.8];
    let stats: Vec<_> = ProcessKind::ER_VARIANTS
        .iter()
        .map(|&k| s2_stats(k, 100_000, &times, 30, true))
        .collect();
    for j in 0..times.len() {
        for a in 0..3 {
            for b in a + 1..3 {
                assert!(
                    agree(stats[a][j], stats[b][j], 3.0),
                    "t={} {:?} vs {:?}",
                    times[j],
                    stats[a][j],
                    stats[b][j]
                );
            }
        }
    }
}

#[test]
fn bf_susceptibility_below_er() {
    let times = [0.5, 0.9];
    let bf = s2_stats(ProcessKind::BohmanFrieze, 100_000, &times, 30, true);
    let er = s2_stats(ProcessKind::ErWithReplacement, 100_000, &times, 30, true);
    for j in 0..2 {
        let margin = 3.0 * (bf[j].1.powi(2) + er[j].1.powi(2)).sqrt();
        assert!(
            bf[j].0 <= er[j].0 + margin,
            "t={}: {:?} vs {:?}",
            times[j],
            bf[j],
            er[j]
        );
    }
}

#[test]
fn er_susceptibility_follows_closed_form() {
    let times = [0.25, 0.5, 0.75];
    for (stat, t) in s2_stats(
        ProcessKind::ErWithoutReplacement,
        1_000_000,
        &times,
        3,
        true,
    )
    .iter()
    .zip(times)
    {
        let want = 1.0 / (1.0 - t);
        assert!(
            (stat.0 / want - 1.0).abs() < 0.02,
            "t={t}: {} vs {want}",
            stat.0
        );
    }
}

#[test]
fn loops_and_resampling_agree_for_bf() {
    let times = [0.6, 1.0];
    let with = s2_stats(ProcessKind::BohmanFrieze, 100_000, &times, 20, true);
    let without = s2_stats(ProcessKind::BohmanFrieze, 100_000, &times, 20, false);
    for j in 0..2 {
        assert!(
            agree(with[j], without[j], 3.0),
            "{:?} vs {:?}",
            with[j],
            without[j]
        );
    }
}

#[test]
fn bf_first_edge_taken_at_rate_isolated_squared() {
    let n = 100_000;
    let mut sim = Simulation::new(
        n,
        &InitialGraphSpec::empty(),
        ChaCha8Rng::seed_from_u64(8),
        SimOptions::default(),
    )
    .unwrap();
    let (mut picks, mut expected, mut variance) = (0u64, 0.0, 0.0);
    for _ in 0..n / 2 {
        let p = sim.ledger().moments().x1().powi(2);
        expected += p;
        variance += p * (1.0 - p);
        if sim.bf_step().unwrap().pick == Pick::First {
            picks += 1;
        }
    }
    let z = (picks as f64 - expected) / variance.sqrt();
    assert!(
        z.abs() < 4.0,
        "picks {picks}, expected {expected:.1}, z {z:.2}"
    );
}

#[test]
fn poisson_time_records_requested_times() {
    let cfg = RunConfig::new(
        ProcessKind::ErPoissonTime,
        10_000,
        1.0,
        vec![0.3, 0.7, 1.0],
        4,
    );
    let trace = run_process(&cfg).unwrap();
    assert_eq!(
        trace.iter().map(|r| r.t).collect::<Vec<_>>(),
        vec![0.3, 0.7, 1.0]
    );
    assert!(trace
        .windows(2)
        .all(|w| w[0].m <= w[1].m && w[0].s2 <= w[1].s2));
}

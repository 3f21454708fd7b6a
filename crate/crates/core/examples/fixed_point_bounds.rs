//! Giant-fraction fixed points for a few starting graphs, with the
//! moment bounds on either side.

use percolab::giant::FixedPointReport;
use percolab::SizeDistribution;

fn main() {
    let cases: [(&str, Vec<(u64, u64)>); 3] = [
        ("isolated vertices", vec![(1, 1_000_000)]),
        ("half in pairs", vec![(1, 500_000), (2, 250_000)]),
        (
            "mixed trees",
            vec![(1, 600_000), (3, 80_000), (10, 10_000), (40, 400)],
        ),
    ];
    for (name, counts) in cases {
        let dist = SizeDistribution::from_counts(counts).unwrap();
        let crit = 1.0 / dist.s(2);
        println!(
            "{name}: s2={:.4} s3={:.4} s4={:.4}, threshold t = {crit:.4}",
            dist.s(2),
            dist.s(3),
            dist.s(4)
        );
        println!(
            "  {:>8} {:>9} {:>9} {:>9} {:>9} {:>9}",
            "t", "lower", "rho", "upper", "t1 low", "t1 up"
        );
        for factor in [0.9, 1.02, 1.1, 1.5, 2.0] {
            let t = factor * crit;
            let r = FixedPointReport::compute(&dist, t, 1e-12).unwrap();
            let f = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.5}"));
            println!(
                "  {t:>8.4} {:>9} {:>9.5} {:>9} {:>9} {:>9}",
                f(r.lower),
                r.result.rho,
                f(r.upper.and_then(|u| u.bound)),
                f(r.t1.map(|b| b.lower)),
                f(r.t1.filter(|b| b.upper_valid).map(|b| b.upper)),
            );
        }
    }
}

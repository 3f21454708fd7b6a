//! Critical constants of the Bohman–Frieze limit and the approach of the
//! moments to their divergence law.

use percolab::ode::{find_tc, BfLimit, OdeOptions};

fn main() {
    let c = find_tc(1e-10).unwrap();
    print!("{}", c.to_key_value());

    let limit = BfLimit::compute(&OdeOptions::default()).unwrap();
    let v = limit.constants();
    println!("\ngamma*alpha*beta = {:.15}", v.gamma * v.alpha * v.beta);
    println!(
        "beta via integrating factor = {:.12}",
        limit.g_via_integrating_factor(v.tc).unwrap()
    );

    println!(
        "\n{:>6} {:>12} {:>12} {:>12}",
        "eps", "s2*eps/a", "s3/s2^3", "s4/s2^5"
    );
    for eps in [0.4, 0.2, 0.1, 0.05, 0.02, 0.01] {
        let (s2, s3, s4) = limit.sbar_k(v.tc - eps).unwrap();
        println!(
            "{eps:>6} {:>12.6} {:>12.6} {:>12.6}",
            s2 * eps / v.alpha,
            s3 / s2.powi(3),
            s4 / s2.powi(5)
        );
    }
    println!(
        "{:>6} {:>12.6} {:>12.6} {:>12.6}",
        "limit",
        1.0,
        v.beta,
        3.0 * v.beta * v.beta
    );
}

//! Giant-component predictions after adding random edges to a graph.
//!
//! With `Z` the size of the component of a uniform vertex and `Y = tZ`, the
//! giant fraction is the unique positive root of `ρ = 1 − E e^{−ρY}` when
//! `E Y = t·s₂ > 1`, and zero otherwise. The solver brackets the root and
//! bisects, using that `φ(s) = 1 − E e^{−sY}` is increasing and concave.

use thiserror::Error;

use crate::ledger::SizeDistribution;
use crate::ode::ConstantValues;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GiantError {
    #[error("not supercritical: E Y = {0} ≤ 1")]
    NotSupercritical(f64),
    #[error("moments violate s2² ≤ s3 or s3² ≤ s2·s4: s2={s2}, s3={s3}, s4={s4}")]
    InvalidMoments { s2: f64, s3: f64, s4: f64 },
    #[error("fixed point did not converge in {0} iterations")]
    NonConvergence(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Supercritical,
    /// `E Y ≤ 1`; only `ρ = 0` solves the equation.
    Subcritical,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Supercritical => "supercritical",
            Regime::Subcritical => "subcritical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointResult {
    pub rho: f64,
    pub iterations: usize,
    pub bracket_width: f64,
    /// `|ρ − φ(ρ)|` at the returned root.
    pub residual: f64,
    pub regime: Regime,
}

/// Finitely supported law of a nonnegative variable: `(value, probability)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLaw {
    atoms: Vec<(f64, f64)>,
}

impl DiscreteLaw {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self, GiantError> {
        if atoms.is_empty() {
            return Err(GiantError::InvalidInput("empty law".into()));
        }
        if atoms
            .iter()
            .any(|&(v, p)| !(v >= 0.0 && v.is_finite() && p >= 0.0))
        {
            return Err(GiantError::InvalidInput(
                "values and probabilities must be ≥ 0".into(),
            ));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(GiantError::InvalidInput(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { atoms })
    }

    /// Law of `Y = tZ` for the size-biased component size `Z` of `dist`.
    pub fn scaled_size_biased(dist: &SizeDistribution, t: f64) -> Self {
        Self {
            atoms: dist.size_biased().map(|(s, p)| (t * s as f64, p)).collect(),
        }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// `E Y^k`.
    pub fn moment(&self, k: i32) -> f64 {
        self.atoms.iter().map(|&(v, p)| p * v.powi(k)).sum()
    }

    /// `φ(s) = 1 − E e^{−sY}`.
    pub fn phi(&self, s: f64) -> f64 {
        1.0 - self
            .atoms
            .iter()
            .map(|&(v, p)| p * (-s * v).exp())
            .sum::<f64>()
    }

    fn phi_prime(&self, s: f64) -> f64 {
        self.atoms
            .iter()
            .map(|&(v, p)| p * v * (-s * v).exp())
            .sum()
    }
}

const MAX_ITERATIONS: usize = 500;

/// Unique positive root of `ρ = φ(ρ)`, or zero when `E Y ≤ 1`. The bracket
/// is bisected to width `tol`, then polished by Newton steps that stay
/// inside it.
pub fn solve_survival(law: &DiscreteLaw, tol: f64) -> Result<FixedPointResult, GiantError> {
    if !(tol > 0.0) {
        return Err(GiantError::InvalidInput(format!("tolerance {tol}")));
    }
    let ey = law.moment(1);
    if ey <= 1.0 {
        return Ok(FixedPointResult {
            rho: 0.0,
            iterations: 0,
            bracket_width: 0.0,
            residual: 0.0,
            regime: Regime::Subcritical,
        });
    }
    let psi = |s: f64| law.phi(s) - s;
    let mut iterations = 0;
    let mut lo = tol;
    while psi(lo) <= 0.0 {
        // root below the initial lower end; shrink towards 0
        lo *= 0.5;
        iterations += 1;
        if lo < f64::MIN_POSITIVE || iterations > MAX_ITERATIONS {
            return Err(GiantError::NonConvergence(iterations));
        }
    }
    let mut hi = 1.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if psi(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(GiantError::NonConvergence(iterations));
        }
    }
    let mut rho = 0.5 * (lo + hi);
    for _ in 0..4 {
        let step = psi(rho) / (law.phi_prime(rho) - 1.0);
        let next = rho - step;
        if !(next > lo && next < hi) {
            break;
        }
        rho = next;
        iterations += 1;
        if step.abs() < 1e-16 {
            break;
        }
    }
    Ok(FixedPointResult {
        rho,
        iterations,
        bracket_width: hi - lo,
        residual: psi(rho).abs(),
        regime: Regime::Supercritical,
    })
}

/// Giant fraction predicted for `G̃(n, t; F)` where `dist` is the component
/// size histogram of `F`.
pub fn solve_rho(
    dist: &SizeDistribution,
    t: f64,
    tol: f64,
) -> Result<FixedPointResult, GiantError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(GiantError::InvalidInput(format!("t = {t}")));
    }
    // boundary t·s₂ = 1 is subcritical
    if t * dist.s(2) <= 1.0 {
        return solve_survival(
            &DiscreteLaw {
                atoms: vec![(0.0, 1.0)],
            },
            tol,
        );
    }
    solve_survival(&DiscreteLaw::scaled_size_biased(dist, t), tol)
}

/// `2(E Y − 1)/E Y²`, a strict lower bound on `ρ`.
pub fn rho_lower_bound(ey: f64, ey2: f64) -> Result<f64, GiantError> {
    if ey <= 1.0 {
        return Err(GiantError::NotSupercritical(ey));
    }
    Ok(2.0 * (ey - 1.0) / ey2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperBound {
    /// `8(E Y − 1)E Y³ ≤ 3(E Y²)²`.
    pub valid: bool,
    /// Smaller root of `E Y³ρ² − 3E Y²ρ + 6(E Y − 1) = 0`.
    pub bound: Option<f64>,
    /// `2(E Y−1)/E Y² · (1 + 8(E Y−1)E Y³/(3(E Y²)²))`, never below `bound`.
    pub weakened: Option<f64>,
}

/// Upper bound on `ρ`, defined when `8(E Y − 1)E Y³ ≤ 3(E Y²)²`.
pub fn rho_upper_bound(ey: f64, ey2: f64, ey3: f64) -> Result<UpperBound, GiantError> {
    if ey <= 1.0 {
        return Err(GiantError::NotSupercritical(ey));
    }
    let excess = ey - 1.0;
    if 8.0 * excess * ey3 > 3.0 * ey2 * ey2 {
        return Ok(UpperBound {
            valid: false,
            bound: None,
            weakened: None,
        });
    }
    // rationalised form of (3EY² − √(9(EY²)² − 24(EY−1)EY³)) / (2EY³);
    // avoids cancellation when EY is close to 1
    let disc = (ey2 * ey2 - 8.0 / 3.0 * excess * ey3).max(0.0);
    let bound = 4.0 * excess / (ey2 + disc.sqrt());
    let weakened = 2.0 * excess / ey2 * (1.0 + 8.0 * excess * ey3 / (3.0 * ey2 * ey2));
    debug_assert!(bound <= weakened * (1.0 + 1e-12));
    Ok(UpperBound {
        valid: true,
        bound: Some(bound),
        weakened: Some(weakened),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupercriticalBounds {
    /// `t − 1/s₂`.
    pub delta_n: f64,
    pub lower: f64,
    pub upper: f64,
    /// `δ s₂² s₄ / s₃² ≤ 3/8`; `upper` is meaningless otherwise.
    pub upper_valid: bool,
}

/// Closed-form bounds on the giant fraction from the initial moments.
pub fn t1_bounds(s2: f64, s3: f64, s4: f64, t: f64) -> Result<SupercriticalBounds, GiantError> {
    let slack = 1e-12;
    if s2 < 1.0 - slack || s2 * s2 > s3 * (1.0 + slack) || s3 * s3 > s2 * s4 * (1.0 + slack) {
        return Err(GiantError::InvalidMoments { s2, s3, s4 });
    }
    if t * s2 <= 1.0 {
        return Err(GiantError::NotSupercritical(t * s2));
    }
    let delta = t - 1.0 / s2;
    let lead = 2.0 * delta * s2.powi(3) / s3;
    let q = delta * s2 * s2 * s4 / (s3 * s3);
    Ok(SupercriticalBounds {
        delta_n: delta,
        lower: lead * (1.0 - 2.0 * delta * s2),
        upper: lead * (1.0 + 8.0 / 3.0 * q),
        upper_valid: q <= 3.0 / 8.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthPrediction {
    pub center: f64,
    pub halfwidth: f64,
}

/// `γδ ± C·δ^{4/3}` for the giant of the Bohman–Frieze process at
/// `t_c + δ`. `c_cal` is a reporting constant, not a proven one.
pub fn bf_growth_prediction(
    constants: &ConstantValues,
    delta: f64,
    c_cal: f64,
) -> Result<GrowthPrediction, GiantError> {
    if !(delta > 0.0) {
        return Err(GiantError::InvalidInput(format!("delta = {delta}")));
    }
    Ok(GrowthPrediction {
        center: constants.gamma * delta,
        halfwidth: c_cal * delta.powf(4.0 / 3.0),
    })
}

/// Reads a `size,count` CSV with a header row.
pub fn read_size_counts<R: std::io::Read>(reader: R) -> Result<SizeDistribution, GiantError> {
    #[derive(serde::Deserialize)]
    struct Row {
        size: u64,
        count: u64,
    }
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut pairs = Vec::new();
    for row in rdr.deserialize::<Row>() {
        let row = row.map_err(|e| GiantError::InvalidInput(e.to_string()))?;
        pairs.push((row.size, row.count));
    }
    SizeDistribution::from_counts(pairs).map_err(|e| GiantError::InvalidInput(e.to_string()))
}

/// Everything the fixed-point command reports for one `(F, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport {
    pub t: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    pub result: FixedPointResult,
    pub lower: Option<f64>,
    pub upper: Option<UpperBound>,
    pub t1: Option<SupercriticalBounds>,
}

impl FixedPointReport {
    pub fn compute(dist: &SizeDistribution, t: f64, tol: f64) -> Result<Self, GiantError> {
        let result = solve_rho(dist, t, tol)?;
        let (s2, s3, s4) = (dist.s(2), dist.s(3), dist.s(4));
        let (mut lower, mut upper, mut t1) = (None, None, None);
        if result.regime == Regime::Supercritical {
            let (ey, ey2, ey3) = (t * s2, t * t * s3, t * t * t * s4);
            lower = Some(rho_lower_bound(ey, ey2)?);
            upper = Some(rho_upper_bound(ey, ey2, ey3)?);
            t1 = Some(t1_bounds(s2, s3, s4, t)?);
        }
        Ok(Self {
            t,
            s2,
            s3,
            s4,
            result,
            lower,
            upper,
            t1,
        })
    }

    /// Ordered `(key, value)` pairs; absent bounds are empty strings.
    pub fn fields(&self) -> Vec<(&'static str, String)> {
        let o = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let up = self.upper.unwrap_or(UpperBound {
            valid: false,
            bound: None,
            weakened: None,
        });
        vec![
            ("t", self.t.to_string()),
            ("s2", self.s2.to_string()),
            ("s3", self.s3.to_string()),
            ("s4", self.s4.to_string()),
            ("regime", self.result.regime.name().to_string()),
            ("rho", self.result.rho.to_string()),
            ("residual", self.result.residual.to_string()),
            ("iterations", self.result.iterations.to_string()),
            ("lower", o(self.lower)),
            (
                "upper_valid",
                (self.upper.is_some() && up.valid).to_string(),
            ),
            ("upper", o(up.bound)),
            ("upper_weakened", o(up.weakened)),
            ("t1_delta", o(self.t1.map(|b| b.delta_n))),
            ("t1_lower", o(self.t1.map(|b| b.lower))),
            (
                "t1_upper_valid",
                self.t1.is_some_and(|b| b.upper_valid).to_string(),
            ),
            (
                "t1_upper",
                o(self.t1.filter(|b| b.upper_valid).map(|b| b.upper)),
            ),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain bisection on `ρ − (1 − Σ p e^{−ρ v})` with a fixed iteration
    /// count, used as the reference for the solver.
    fn bisect_oracle(atoms: &[(f64, f64)]) -> f64 {
        let psi = |s: f64| 1.0 - atoms.iter().map(|&(v, p)| p * (-s * v).exp()).sum::<f64>() - s;
        let (mut lo, mut hi) = (1e-9, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if psi(mid) > 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn er_t2_root() {
        let oracle = bisect_oracle(&[(2.0, 1.0)]);
        assert!((oracle - 0.7968).abs() < 1e-4, "oracle {oracle}");
        let d = SizeDistribution::from_counts([(1, 1000)]).unwrap();
        let r = solve_rho(&d, 2.0, 1e-12).unwrap();
        assert_eq!(r.regime, Regime::Supercritical);
        assert!((r.rho - oracle).abs() < 1e-10);
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn er_t15_root() {
        let oracle = bisect_oracle(&[(1.5, 1.0)]);
        assert!((oracle - 0.5828).abs() < 1e-4, "oracle {oracle}");
    }

    #[test]
    fn critical_boundary_is_zero() {
        let d = SizeDistribution::from_counts([(1, 1000)]).unwrap();
        let r = solve_rho(&d, 1.0, 1e-12).unwrap();
        assert_eq!((r.rho, r.regime), (0.0, Regime::Subcritical));
        let pairs = SizeDistribution::from_counts([(2, 500), (1, 1000)]).unwrap();
        let r = solve_rho(&pairs, 1.0 / 1.5, 1e-12).unwrap();
        assert_eq!(r.regime, Regime::Subcritical);
    }

    #[test]
    fn mixed_sizes_root() {
        // half the vertex mass in singletons, half in pairs
        let d = SizeDistribution::from_counts([(1, 500), (2, 250)]).unwrap();
        let oracle = bisect_oracle(&[(1.0, 0.5), (2.0, 0.5)]);
        assert!((oracle - 0.5368).abs() < 1e-3, "oracle {oracle}");
        let r = solve_rho(&d, 1.0, 1e-12).unwrap();
        assert!((r.rho - oracle).abs() < 1e-10);
    }

    #[test]
    fn barely_supercritical_root() {
        let law = DiscreteLaw::new(vec![(1.0 + 1e-9, 1.0)]).unwrap();
        let r = solve_survival(&law, 1e-12).unwrap();
        assert!(r.rho > 0.0 && r.rho < 1e-8, "rho {}", r.rho);
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(rho_lower_bound(2.0, 4.0).unwrap(), 0.5);
        assert!(0.5 < bisect_oracle(&[(2.0, 1.0)]));
        let eps = 1e-3;
        let b = rho_lower_bound(1.0 + eps, (1.0 + eps) * (1.0 + eps)).unwrap();
        assert!((b / eps - 2.0).abs() < 1e-2);
        assert!(matches!(
            rho_lower_bound(1.0, 1.0),
            Err(GiantError::NotSupercritical(_))
        ));
    }

    #[test]
    fn upper_bound_examples() {
        let u = rho_upper_bound(2.0, 4.0, 8.0).unwrap();
        assert!(!u.valid);
        assert_eq!(u.bound, None);

        let eps = 1e-3;
        let y = 1.0 + eps;
        let u = rho_upper_bound(y, y * y, y * y * y).unwrap();
        assert!(u.valid);
        let rho = bisect_oracle(&[(y, 1.0)]);
        let b = u.bound.unwrap();
        assert!(rho < b);
        assert!((b / (2.0 * eps) - 1.0).abs() < 5.0 * eps);
        assert!((rho / (2.0 * eps) - 1.0).abs() < 5.0 * eps);
        // agrees with the unrationalised quadratic root
        let naive =
            (3.0 * y * y - (9.0 * y.powi(4) - 24.0 * eps * y.powi(3)).sqrt()) / (2.0 * y.powi(3));
        assert!((naive - b).abs() < 1e-9);
    }

    #[test]
    fn t1_bound_examples() {
        let b = t1_bounds(1.0, 1.0, 1.0, 1.01).unwrap();
        assert!((b.delta_n - 0.01).abs() < 1e-15);
        assert!((b.lower - 0.0196).abs() < 1e-12);
        assert!((b.upper - 0.02 * (1.0 + 8.0 / 3.0 * 0.01)).abs() < 1e-12);
        assert!((b.upper - 0.02053).abs() < 1e-5);
        assert!(b.upper_valid);

        let b = t1_bounds(2.0, 8.0, 64.0, 0.51).unwrap();
        assert!((b.lower - 0.0192).abs() < 1e-12);
        assert!(b.upper_valid);
        assert!((b.upper - 0.02 * (1.0 + 8.0 / 3.0 * 0.04)).abs() < 1e-12);
        assert!((b.upper - 0.02213).abs() < 1e-5);

        assert!(matches!(
            t1_bounds(1.0, 1.0, 1.0, 0.9),
            Err(GiantError::NotSupercritical(_))
        ));
        assert!(matches!(
            t1_bounds(2.0, 3.0, 64.0, 1.0),
            Err(GiantError::InvalidMoments { .. })
        ));
    }

    #[test]
    fn er_self_consistency() {
        let d = SizeDistribution::from_counts([(1, 10)]).unwrap();
        for delta in [0.01, 0.05] {
            let rho = solve_rho(&d, 1.0 + delta, 1e-13).unwrap().rho;
            assert!(rho > 2.0 * delta * (1.0 - 2.0 * delta));
            assert!(rho < 2.0 * delta * (1.0 + 8.0 * delta / 3.0));
        }
    }

    #[test]
    fn growth_prediction() {
        let c = ConstantValues::from_root(1.1763, 0.2438, 0.764);
        let p = bf_growth_prediction(&c, 0.1, 1.0).unwrap();
        assert!((p.center - 0.1 * c.gamma).abs() < 1e-15);
        let fixed = ConstantValues { gamma: 2.463, ..c };
        assert!((bf_growth_prediction(&fixed, 0.1, 1.0).unwrap().center - 0.2463).abs() < 1e-12);
        let tiny = bf_growth_prediction(&c, 1e-9, 1.0).unwrap();
        assert!((tiny.center / 1e-9 - c.gamma).abs() < 1e-9);
        let h1 = bf_growth_prediction(&c, 0.05, 1.0).unwrap().halfwidth;
        let h2 = bf_growth_prediction(&c, 0.1, 1.0).unwrap().halfwidth;
        assert!((h1 / h2 - 2f64.powf(-4.0 / 3.0)).abs() < 1e-12);
        assert!(bf_growth_prediction(&c, 0.0, 1.0).is_err());
    }

    #[test]
    fn law_validation() {
        assert!(DiscreteLaw::new(vec![]).is_err());
        assert!(DiscreteLaw::new(vec![(1.0, 0.5)]).is_err());
        assert!(DiscreteLaw::new(vec![(-1.0, 1.0)]).is_err());
    }

    #[test]
    fn reads_size_count_csv() {
        let d = read_size_counts("size,count\n1, 10\n3,2\n".as_bytes()).unwrap();
        assert_eq!(d.n(), 16);
        assert_eq!(d.count(3), 2);
        assert!(read_size_counts("size,count\n1,x\n".as_bytes()).is_err());
    }

    #[test]
    fn report_fields_align() {
        let d = SizeDistribution::from_counts([(1, 100)]).unwrap();
        let sub = FixedPointReport::compute(&d, 0.5, 1e-12).unwrap();
        assert!(sub.lower.is_none());
        let sup = FixedPointReport::compute(&d, 1.5, 1e-12).unwrap();
        let f = sup.fields();
        assert_eq!(f.len(), sub.fields().len());
        assert_eq!(f[4].1, "supercritical");
        assert!(sup.lower.unwrap() < sup.result.rho);
    }
}

//! Deterministic limit of the Bohman–Frieze process.
//!
//! The raw system evolves `(x̄, s̄₂, s̄₃, s̄₄)` from `(1, 1, 1, 1)` and blows up
//! at the critical time `t_c`. The transformed system in
//! `(x̄, f, g, h₁)` with `f = 1/s̄₂`, `g = s̄₃/s̄₂³`, `h₁ = s̄₄/s̄₂⁴ − 3g²/f`
//! stays regular through `t_c`, so `t_c` is located as the first zero of
//! `f` and the constants are read off at that point.
//!
//! Integration uses an explicit Dormand–Prince 5(4) pair with the
//! standard fourth-order continuous extension.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("solution blew up at t = {t} (s2 = {s2:e})")]
    BlowUp { t: f64, s2: f64 },
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
    #[error("no sign change of f on [0, {horizon}]")]
    RootNotBracketed { horizon: f64 },
    #[error("t = {t} too close to the critical time (f = {f:e})")]
    TooCloseToCritical { t: f64, f: f64 },
    #[error("t = {t} outside the integrated range [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },
}

/// Right-hand side of an autonomous-or-not ODE in `N` unknowns.
pub trait System<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]);

    /// Checked after every accepted step.
    fn check(&self, _t: f64, _y: &[f64; N]) -> Result<(), OdeError> {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Integrate with this constant step and no error control.
    pub fixed_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self::with_tol(1e-10)
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            fixed_step: None,
            max_steps: 1_000_000,
        }
    }

    pub fn fixed(h: f64) -> Self {
        Self {
            fixed_step: Some(h),
            ..Self::default()
        }
    }
}

mod dp {
    pub const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    pub const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    /// Difference between the fifth- and fourth-order weights.
    pub const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    /// Continuous-extension coefficients.
    pub const D: [f64; 7] = [
        -12715105075.0 / 11282082432.0,
        0.0,
        87487479700.0 / 32700410799.0,
        -10690763975.0 / 1880347072.0,
        701980252875.0 / 199316789632.0,
        -1453857185.0 / 822651844.0,
        69997945.0 / 29380423.0,
    ];
}

/// One accepted step with its interpolation polynomial.
#[derive(Debug, Clone, Copy)]
struct Segment<const N: usize> {
    t0: f64,
    h: f64,
    r: [[f64; N]; 5],
}

impl<const N: usize> Segment<N> {
    fn eval(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let mut y = [0.0; N];
        for (i, yi) in y.iter_mut().enumerate() {
            let r = &self.r;
            *yi = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        y
    }

    fn t1(&self) -> f64 {
        self.t0 + self.h
    }
}

/// Accepted steps of one integration, queryable anywhere in its range.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    t_start: f64,
    y_start: [f64; N],
    segments: Vec<Segment<N>>,
}

impl<const N: usize> Trajectory<N> {
    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.segments.last().map_or(self.t_start, Segment::t1)
    }

    pub fn steps(&self) -> usize {
        self.segments.len()
    }

    /// Step boundaries `t_0 < t_1 < … < t_end`.
    pub fn mesh(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.t_start).chain(self.segments.iter().map(Segment::t1))
    }

    pub fn end_state(&self) -> [f64; N] {
        self.segments
            .last()
            .map_or(self.y_start, |s| s.eval(s.t1()))
    }

    pub fn at(&self, t: f64) -> Result<[f64; N], OdeError> {
        let (start, end) = (self.t_start, self.t_end());
        if !(start..=end).contains(&t) {
            return Err(OdeError::OutOfRange { t, start, end });
        }
        if self.segments.is_empty() {
            return Ok(self.y_start);
        }
        let idx = self
            .segments
            .partition_point(|s| s.t1() < t)
            .min(self.segments.len() - 1);
        Ok(self.segments[idx].eval(t))
    }

    fn segment_bounds(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.segments.iter().map(|s| (s.t0, s.t1()))
    }
}

fn axpy<const N: usize>(
    y: &[f64; N],
    h: f64,
    ks: &[[f64; N]; 7],
    coeffs: &[f64],
    out: &mut [f64; N],
) {
    for i in 0..N {
        let mut acc = 0.0;
        for (k, &c) in ks.iter().zip(coeffs) {
            acc += c * k[i];
        }
        out[i] = y[i] + h * acc;
    }
}

/// Integrates `sys` from `(t0, y0)` to `t_end`.
pub fn integrate<S: System<N>, const N: usize>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
) -> Result<Trajectory<N>, OdeError> {
    let mut traj = Trajectory {
        t_start: t0,
        y_start: y0,
        segments: Vec::new(),
    };
    let span = t_end - t0;
    if span <= 0.0 {
        return Ok(traj);
    }
    let mut t = t0;
    let mut y = y0;
    let mut ks = [[0.0; N]; 7];
    sys.rhs(t, &y, &mut ks[0]);
    let mut h = opts
        .fixed_step
        .unwrap_or_else(|| initial_step(&y, &ks[0], opts, span));
    let mut stage = [0.0; N];
    let mut y_new = [0.0; N];
    let mut steps = 0usize;

    while t < t_end {
        if steps >= opts.max_steps {
            return Err(OdeError::TooManySteps(opts.max_steps));
        }
        steps += 1;
        let last = t + h >= t_end || (t_end - t - h) < 1e-12 * span;
        if last {
            h = t_end - t;
        }
        let mut k = [0.0; N];
        for s in 1..6 {
            axpy(&y, h, &ks, &dp::A[s][..s], &mut stage);
            sys.rhs(t + dp::C[s] * h, &stage, &mut k);
            ks[s] = k;
        }
        // the seventh stage is evaluated at the fifth-order solution (FSAL)
        axpy(&y, h, &ks, &dp::A[6][..6], &mut y_new);
        sys.rhs(t + h, &y_new, &mut k);
        ks[6] = k;

        let err = if opts.fixed_step.is_some() {
            0.0
        } else {
            let mut acc = 0.0;
            for i in 0..N {
                let mut e = 0.0;
                for (k, &c) in ks.iter().zip(&dp::E) {
                    e += c * k[i];
                }
                let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                acc += (h * e / sc).powi(2);
            }
            (acc / N as f64).sqrt()
        };
        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            if opts.fixed_step.is_some() {
                return Err(OdeError::NonFinite { t: t + h });
            }
            h *= 0.2;
            if h.abs() < 1e-14 * t.abs().max(1.0) {
                return Err(OdeError::NonFinite { t });
            }
            continue;
        }

        if err <= 1.0 {
            let mut r = [[0.0; N]; 5];
            for i in 0..N {
                let ydiff = y_new[i] - y[i];
                let bspl = h * ks[0][i] - ydiff;
                r[0][i] = y[i];
                r[1][i] = ydiff;
                r[2][i] = bspl;
                r[3][i] = ydiff - h * ks[6][i] - bspl;
                let mut d = 0.0;
                for (k, &c) in ks.iter().zip(&dp::D) {
                    d += c * k[i];
                }
                r[4][i] = h * d;
            }
            traj.segments.push(Segment { t0: t, h, r });
            t = if last { t_end } else { t + h };
            y = y_new;
            ks[0] = ks[6];
            sys.check(t, &y)?;
            if last {
                break;
            }
        }
        if opts.fixed_step.is_none() {
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            let factor = if err > 1.0 { factor.min(1.0) } else { factor };
            h *= factor;
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(OdeError::StepUnderflow { t, h });
            }
        }
    }
    Ok(traj)
}

fn initial_step<const N: usize>(y: &[f64; N], dy: &[f64; N], opts: &OdeOptions, span: f64) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (dy[i] / sc).powi(2);
    }
    let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h.min(span)
}

/// `(t, x̄, s̄₂, s̄₃, s̄₄)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeState {
    pub t: f64,
    pub x: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
}

impl OdeState {
    pub const INITIAL: OdeState = OdeState {
        t: 0.0,
        x: 1.0,
        s2: 1.0,
        s3: 1.0,
        s4: 1.0,
    };

    fn from_array(t: f64, y: [f64; 4]) -> Self {
        OdeState {
            t,
            x: y[0],
            s2: y[1],
            s3: y[2],
            s4: y[3],
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x, self.s2, self.s3, self.s4]
    }
}

/// `(t, x̄, f, g, h₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedState {
    pub t: f64,
    pub x: f64,
    pub f: f64,
    pub g: f64,
    pub h1: f64,
}

impl TransformedState {
    /// `f = g = 1` and `h₁ = h − 3g²/f = −2` at `t = 0`.
    pub const INITIAL: TransformedState = TransformedState {
        t: 0.0,
        x: 1.0,
        f: 1.0,
        g: 1.0,
        h1: -2.0,
    };

    fn from_array(t: f64, y: [f64; 4]) -> Self {
        TransformedState {
            t,
            x: y[0],
            f: y[1],
            g: y[2],
            h1: y[3],
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x, self.f, self.g, self.h1]
    }

    pub fn from_raw(s: &OdeState) -> Self {
        let f = 1.0 / s.s2;
        let g = s.s3 * f * f * f;
        let h = s.s4 * f.powi(4);
        TransformedState {
            t: s.t,
            x: s.x,
            f,
            g,
            h1: h - 3.0 * g * g / f,
        }
    }
}

#[inline]
fn x_rate(x: f64) -> f64 {
    -x * x - (1.0 - x * x) * x
}

/// `[x̄′, s̄₂′, s̄₃′, s̄₄′]`.
pub fn deriv_raw(s: &OdeState) -> [f64; 4] {
    let x2 = s.x * s.x;
    let er = 1.0 - x2;
    [
        x_rate(s.x),
        x2 + er * s.s2 * s.s2,
        3.0 * x2 + 3.0 * er * s.s2 * s.s3,
        7.0 * x2 + er * (4.0 * s.s2 * s.s4 + 3.0 * s.s3 * s.s3),
    ]
}

/// `[x̄′, f′, g′, h₁′]`.
pub fn deriv_transformed(s: &TransformedState) -> [f64; 4] {
    let x2 = s.x * s.x;
    let (f, g) = (s.f, s.g);
    [
        x_rate(s.x),
        -x2 * f * f - (1.0 - x2),
        3.0 * x2 * f * f * f - 3.0 * x2 * f * g,
        7.0 * x2 * f.powi(4) - 18.0 * x2 * g * f * f + 3.0 * x2 * g * g - 4.0 * x2 * f * s.h1,
    ]
}

/// Blow-up cap on `s̄₂` for the raw system.
pub const S2_CAP: f64 = 1e6;

/// The raw moment system. With `force_x_zero` the isolated fraction is held
/// at zero, which reduces it to the pure Erdős–Rényi moment equations.
#[derive(Debug, Clone, Copy)]
pub struct RawSystem {
    pub force_x_zero: bool,
    pub s2_cap: f64,
}

impl Default for RawSystem {
    fn default() -> Self {
        Self {
            force_x_zero: false,
            s2_cap: S2_CAP,
        }
    }
}

impl System<4> for RawSystem {
    fn rhs(&self, t: f64, y: &[f64; 4], dy: &mut [f64; 4]) {
        let mut s = OdeState::from_array(t, *y);
        if self.force_x_zero {
            s.x = 0.0;
        }
        *dy = deriv_raw(&s);
        if self.force_x_zero {
            dy[0] = 0.0;
        }
    }

    fn check(&self, t: f64, y: &[f64; 4]) -> Result<(), OdeError> {
        if !(y[1] <= self.s2_cap) {
            return Err(OdeError::BlowUp { t, s2: y[1] });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TransformedSystem;

impl System<4> for TransformedSystem {
    fn rhs(&self, t: f64, y: &[f64; 4], dy: &mut [f64; 4]) {
        *dy = deriv_transformed(&TransformedState::from_array(t, *y));
    }
}

/// Raw system from `(1, 1, 1, 1)` (or `(0, 1, 1, 1)` when forced).
pub fn integrate_raw(
    t_end: f64,
    force_x_zero: bool,
    opts: &OdeOptions,
) -> Result<Trajectory<4>, OdeError> {
    let sys = RawSystem {
        force_x_zero,
        ..RawSystem::default()
    };
    let mut y0 = OdeState::INITIAL.as_array();
    if force_x_zero {
        y0[0] = 0.0;
    }
    integrate(&sys, 0.0, y0, t_end, opts)
}

pub fn integrate_transformed(t_end: f64, opts: &OdeOptions) -> Result<Trajectory<4>, OdeError> {
    integrate(
        &TransformedSystem,
        0.0,
        TransformedState::INITIAL.as_array(),
        t_end,
        opts,
    )
}

/// Published reference values of the critical constants with the
/// tolerances the reproduction is held to: `(name, value, tolerance)`.
pub const REFERENCE_CONSTANTS: [(&str, f64, f64); 7] = [
    ("tc", 1.1763, 0.001),
    ("x_tc", 0.2438, 0.001),
    ("alpha", 1.063, 0.005),
    ("beta", 0.764, 0.005),
    ("gamma", 2.463, 0.01),
    ("g3", 0.917, 0.01),
    ("g4", 2.375, 0.02),
];

/// Constants describing the blow-up at `t_c`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConstantValues {
    pub tc: f64,
    pub x_tc: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
}

impl ConstantValues {
    /// Derives `α, γ, γ₂, γ₃, γ₄` from `t_c`, `x̄(t_c)` and `β`.
    pub fn from_root(tc: f64, x_tc: f64, beta: f64) -> Self {
        let alpha = 1.0 / (1.0 - x_tc * x_tc);
        ConstantValues {
            tc,
            x_tc,
            alpha,
            beta,
            gamma: 2.0 / (alpha * beta),
            g2: alpha,
            g3: beta * alpha.powi(3),
            g4: 3.0 * beta * beta * alpha.powi(5),
        }
    }

    pub const FIELDS: [&'static str; 8] =
        ["tc", "x_tc", "alpha", "beta", "gamma", "g2", "g3", "g4"];

    pub fn values(&self) -> [f64; 8] {
        [
            self.tc, self.x_tc, self.alpha, self.beta, self.gamma, self.g2, self.g3, self.g4,
        ]
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Self::FIELDS
            .iter()
            .position(|&f| f == name)
            .map(|i| self.values()[i])
    }

    fn abs_diff(&self, other: &Self) -> Self {
        let a = self.values();
        let b = other.values();
        let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).collect();
        ConstantValues {
            tc: d[0],
            x_tc: d[1],
            alpha: d[2],
            beta: d[3],
            gamma: d[4],
            g2: d[5],
            g3: d[6],
            g4: d[7],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalConstants {
    pub value: ConstantValues,
    /// Estimated absolute error of each field.
    pub err: ConstantValues,
}

impl CriticalConstants {
    /// Flat `key=value` block, one field per line, errors as `*_err`.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        for (name, v) in ConstantValues::FIELDS.iter().zip(self.value.values()) {
            out.push_str(&format!("{name}={v}\n"));
        }
        for (name, v) in ConstantValues::FIELDS.iter().zip(self.err.values()) {
            out.push_str(&format!("{name}_err={v}\n"));
        }
        out
    }

    pub fn csv_header() -> String {
        let fields = ConstantValues::FIELDS;
        let errs: Vec<String> = fields.iter().map(|f| format!("{f}_err")).collect();
        format!("{},{}", fields.join(","), errs.join(","))
    }

    pub fn to_csv_row(&self) -> String {
        let vals: Vec<String> = self
            .value
            .values()
            .iter()
            .chain(self.err.values().iter())
            .map(|v| v.to_string())
            .collect();
        vals.join(",")
    }
}

/// Floor on `f = 1/s̄₂` below which `s̄_k` and `h` are not reported.
pub const F_FLOOR: f64 = 1e-6;

/// Horizon of the transformed integration; comfortably past `t_c`.
pub const HORIZON: f64 = 1.3;

/// Bisection tolerance on the root of `f`.
pub const ROOT_TOL: f64 = 1e-13;

/// Transformed trajectory on `[0, 1.3]` with `t_c` located on it.
#[derive(Debug, Clone)]
pub struct BfLimit {
    trajectory: Trajectory<4>,
    constants: ConstantValues,
}

impl BfLimit {
    pub fn compute(opts: &OdeOptions) -> Result<Self, OdeError> {
        let trajectory = integrate_transformed(HORIZON, opts)?;
        let tc = locate_root(&trajectory, ROOT_TOL)?;
        let y = trajectory.at(tc)?;
        Ok(Self {
            constants: ConstantValues::from_root(tc, y[0], y[2]),
            trajectory,
        })
    }

    pub fn constants(&self) -> &ConstantValues {
        &self.constants
    }

    pub fn tc(&self) -> f64 {
        self.constants.tc
    }

    pub fn trajectory(&self) -> &Trajectory<4> {
        &self.trajectory
    }

    pub fn state(&self, t: f64) -> Result<TransformedState, OdeError> {
        Ok(TransformedState::from_array(t, self.trajectory.at(t)?))
    }

    pub fn x_bar(&self, t: f64) -> Result<f64, OdeError> {
        Ok(self.trajectory.at(t)?[0])
    }

    fn checked_state(&self, t: f64) -> Result<TransformedState, OdeError> {
        let s = self.state(t)?;
        if t >= self.tc() || s.f < F_FLOOR {
            return Err(OdeError::TooCloseToCritical { t, f: s.f });
        }
        Ok(s)
    }

    /// `(s̄₂, s̄₃, s̄₄)` recovered from `(f, g, h₁)`.
    pub fn sbar_k(&self, t: f64) -> Result<(f64, f64, f64), OdeError> {
        let s = self.checked_state(t)?;
        let s2 = 1.0 / s.f;
        let s3 = s.g / s.f.powi(3);
        let s4 = (s.h1 + 3.0 * s.g * s.g / s.f) / s.f.powi(4);
        Ok((s2, s3, s4))
    }

    /// `h = s̄₄/s̄₂⁴`, available only while `f ≥ F_FLOOR`.
    pub fn h(&self, t: f64) -> Result<f64, OdeError> {
        let s = self.checked_state(t)?;
        Ok(s.h1 + 3.0 * s.g * s.g / s.f)
    }

    /// `G(t) = 3∫₀ᵗ x̄²f du` by Gauss–Legendre quadrature on each step of
    /// the dense trajectory.
    pub fn integrating_factor_g(&self, t: f64) -> Result<f64, OdeError> {
        self.check_range(t)?;
        let mut total = 0.0;
        for (a, b) in self.trajectory.segment_bounds() {
            if a >= t {
                break;
            }
            total += self.g_integrand_integral(a, b.min(t));
        }
        Ok(total)
    }

    /// `g(t)` rebuilt from the integrating factor:
    /// `g = e^{−G}(1 + 3∫₀ᵗ e^{G(u)} x̄² f³ du)`.
    pub fn g_via_integrating_factor(&self, t: f64) -> Result<f64, OdeError> {
        self.check_range(t)?;
        let gl = gauss_legendre_16();
        let mut big_g = 0.0;
        let mut inner = 0.0;
        for (a, b) in self.trajectory.segment_bounds() {
            if a >= t {
                break;
            }
            let b = b.min(t);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for &(node, w) in gl.iter() {
                let u = mid + half * node;
                let y = self.trajectory.at(u)?;
                let g_u = big_g + self.g_integrand_integral(a, u);
                inner += half * w * g_u.exp() * y[0] * y[0] * y[1].powi(3);
            }
            big_g += self.g_integrand_integral(a, b);
        }
        Ok((-big_g).exp() * (1.0 + 3.0 * inner))
    }

    fn g_integrand_integral(&self, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        gauss_legendre_16()
            .iter()
            .map(|&(node, w)| {
                let y = self
                    .trajectory
                    .at(mid + half * node)
                    .expect("inside trajectory");
                w * 3.0 * y[0] * y[0] * y[1]
            })
            .sum::<f64>()
            * half
    }

    fn check_range(&self, t: f64) -> Result<(), OdeError> {
        if !(0.0..=self.tc()).contains(&t) {
            return Err(OdeError::OutOfRange {
                t,
                start: 0.0,
                end: self.tc(),
            });
        }
        Ok(())
    }
}

/// First zero of `f` (component 1) on the trajectory, by bisection on the
/// dense output inside the bracketing step.
fn locate_root(traj: &Trajectory<4>, tol: f64) -> Result<f64, OdeError> {
    let mesh: Vec<f64> = traj.mesh().collect();
    let mut prev = mesh[0];
    let mut f_prev = traj.at(prev)?[1];
    for &t in &mesh[1..] {
        let f = traj.at(t)?[1];
        if f_prev > 0.0 && f <= 0.0 {
            let (mut lo, mut hi) = (prev, t);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if traj.at(mid)?[1] > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev = t;
        f_prev = f;
    }
    Err(OdeError::RootNotBracketed {
        horizon: traj.t_end(),
    })
}

/// Critical constants at integrator tolerance `tol`, with errors estimated
/// from a second solve at `tol / 16` plus the root tolerance on `t_c`.
pub fn find_tc(tol: f64) -> Result<CriticalConstants, OdeError> {
    let coarse = BfLimit::compute(&OdeOptions::with_tol(tol))?;
    let fine = BfLimit::compute(&OdeOptions::with_tol(tol / 16.0))?;
    let mut err = coarse.constants().abs_diff(fine.constants());
    err.tc += ROOT_TOL;
    Ok(CriticalConstants {
        value: *coarse.constants(),
        err,
    })
}

/// 16-point Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre_16() -> &'static [(f64, f64); 16] {
    use std::sync::OnceLock;
    static RULE: OnceLock<[(f64, f64); 16]> = OnceLock::new();
    RULE.get_or_init(|| {
        const N: usize = 16;
        let mut rule = [(0.0, 0.0); N];
        for (i, slot) in rule.iter_mut().enumerate() {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (N as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=N {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        rule
    })
}

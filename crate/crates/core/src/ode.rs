//! Explicit Runge–Kutta integration with the Dormand–Prince 5(4) pair.
//!
//! States are fixed-size arrays so the same machinery drives the scalar
//! conformal-factor ODE (`N = 2`) and the moving-frame systems (`N = 12`).

use crate::error::{Error, Result};
use crate::scalar::Real;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (the last row of `A`, FSAL).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
/// Fifth minus fourth order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand–Prince step: returns the fifth-order update and the embedded
/// error estimate.
pub fn dopri_step<T, const N: usize, F>(f: &F, t: T, y: &[T; N], h: T) -> ([T; N], [T; N])
where
    T: Real,
    F: Fn(T, &[T; N]) -> [T; N],
{
    let mut k = [[T::zero(); N]; 7];
    k[0] = f(t, y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = T::lit(A[s][j]);
            if a != T::zero() {
                for i in 0..N {
                    ys[i] = ys[i] + h * a * kj[i];
                }
            }
        }
        k[s] = f(t + h * T::lit(C[s]), &ys);
    }
    let mut y5 = *y;
    let mut err = [T::zero(); N];
    for (s, ks) in k.iter().enumerate() {
        let b = T::lit(B5[s]);
        let e = T::lit(E[s]);
        for i in 0..N {
            y5[i] = y5[i] + h * b * ks[i];
            err[i] = err[i] + h * e * ks[i];
        }
    }
    (y5, err)
}

/// Integrates from `t0` to `t1` with `steps` equal Dormand–Prince steps.
///
/// For fixed `steps` the result is a smooth function of `t0`, `t1` and `y0`,
/// which keeps finite differences of integrated quantities clean.
pub fn integrate_fixed<T, const N: usize, F>(f: &F, t0: T, y0: [T; N], t1: T, steps: usize) -> [T; N]
where
    T: Real,
    F: Fn(T, &[T; N]) -> [T; N],
{
    let steps = steps.max(1);
    let h = (t1 - t0) / T::from_count(steps);
    let mut y = y0;
    for k in 0..steps {
        let t = t0 + h * T::from_count(k);
        y = dopri_step(f, t, &y, h).0;
    }
    y
}

/// Step-size control settings for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions<T> {
    pub rtol: T,
    pub atol: T,
    /// Upper bound on `|h|`; `None` means unbounded.
    pub max_step: Option<T>,
    pub max_steps: usize,
}

impl<T: Real> AdaptiveOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        Self { rtol: tol, atol: tol, max_step: None, max_steps: 1_000_000 }
    }

    pub fn max_step(mut self, h: T) -> Self {
        self.max_step = Some(h);
        self
    }
}

/// Counters reported by the adaptive driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

impl std::ops::AddAssign for StepStats {
    fn add_assign(&mut self, o: Self) {
        self.accepted += o.accepted;
        self.rejected += o.rejected;
        self.rhs_evals += o.rhs_evals;
    }
}

/// Decision returned by the per-step callback.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepControl {
    Continue,
    Stop,
}

/// How an adaptive run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOutcome<T, const N: usize> {
    pub t: T,
    pub y: [T; N],
    pub stats: StepStats,
    /// `true` when the callback asked to stop before `t1`.
    pub stopped: bool,
}

fn error_norm<T: Real, const N: usize>(y: &[T; N], y_new: &[T; N], err: &[T; N], opts: &AdaptiveOptions<T>) -> T {
    let mut acc = T::zero();
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
        let r = err[i] / sc;
        acc = acc + r * r;
    }
    (acc / T::from_count(N)).sqrt()
}

/// Adaptive Dormand–Prince integration from `t0` to `t1` (either direction).
///
/// `on_accept(t, y)` runs after every accepted step and may modify the state
/// in place (projection, re-orthonormalization) or stop the run.
pub fn integrate_adaptive<T, const N: usize, F, G>(
    f: &F,
    t0: T,
    y0: [T; N],
    t1: T,
    opts: &AdaptiveOptions<T>,
    mut on_accept: G,
) -> Result<AdaptiveOutcome<T, N>>
where
    T: Real,
    F: Fn(T, &[T; N]) -> [T; N],
    G: FnMut(T, &mut [T; N]) -> StepControl,
{
    let mut stats = StepStats::default();
    let span = t1 - t0;
    if span == T::zero() {
        return Ok(AdaptiveOutcome { t: t0, y: y0, stats, stopped: false });
    }
    let dir = span.signum();
    let max_h = opts.max_step.unwrap_or(span.abs()).min(span.abs());

    // initial step guess from the scale of y and f(y)
    let f0 = f(t0, &y0);
    stats.rhs_evals += 1;
    let mut d0 = T::zero();
    let mut d1 = T::zero();
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y0[i].abs();
        d0 = d0 + (y0[i] / sc).powi(2);
        d1 = d1 + (f0[i] / sc).powi(2);
    }
    let (d0, d1) = (d0.sqrt(), d1.sqrt());
    let h0 = if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) {
        T::lit(1e-6)
    } else {
        T::lit(0.01) * d0 / d1
    }
    .min(max_h);
    // second estimate from one explicit Euler step, so h matches the
    // fifth-order error scale instead of the first-order one
    let mut y1 = y0;
    for i in 0..N {
        y1[i] = y0[i] + h0 * dir * f0[i];
    }
    let f1 = f(t0 + h0 * dir, &y1);
    stats.rhs_evals += 1;
    let mut d2 = T::zero();
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y0[i].abs();
        d2 = d2 + ((f1[i] - f0[i]) / sc).powi(2);
    }
    let d2 = d2.sqrt() / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= T::lit(1e-15) {
        (h0 * T::lit(1e-3)).max(T::lit(1e-6))
    } else {
        (T::lit(0.01) / dmax).powf(T::lit(0.2))
    };
    let mut h = (T::lit(100.0) * h0).min(h1).min(max_h) * dir;

    let mut t = t0;
    let mut y = y0;
    let h_min = T::lit(16.0) * T::epsilon() * (t0.abs().max(t1.abs()).max(T::one()));
    while (t1 - t) * dir > T::zero() {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepSizeUnderflow { t: t.as_f64() });
        }
        let remaining = t1 - t;
        if h.abs() >= remaining.abs() || remaining.abs() - h.abs() < h_min {
            h = remaining;
        } else if remaining.abs() < T::two() * h.abs() {
            // split the remainder instead of leaving a sliver for the last step
            h = remaining * T::half();
        }
        let (y_new, err) = dopri_step(f, t, &y, h);
        stats.rhs_evals += 7;
        let en = error_norm(&y, &y_new, &err, opts);
        let finite = y_new.iter().all(|x| x.is_finite()) && en.is_finite();
        if finite && en <= T::one() {
            t = if h == remaining { t1 } else { t + h };
            y = y_new;
            stats.accepted += 1;
            if on_accept(t, &mut y) == StepControl::Stop {
                return Ok(AdaptiveOutcome { t, y, stats, stopped: true });
            }
            let factor = if en == T::zero() {
                T::lit(5.0)
            } else {
                (T::lit(0.9) * en.powf(T::lit(-0.2))).min(T::lit(5.0)).max(T::lit(0.2))
            };
            h = (h.abs() * factor).min(max_h) * dir;
        } else {
            stats.rejected += 1;
            let factor = if finite {
                (T::lit(0.9) * en.powf(T::lit(-0.2))).max(T::lit(0.1))
            } else {
                T::lit(0.25)
            };
            h = h * factor;
            if h.abs() < h_min {
                return Err(Error::StepSizeUnderflow { t: t.as_f64() });
            }
        }
    }
    Ok(AdaptiveOutcome { t, y, stats, stopped: false })
}

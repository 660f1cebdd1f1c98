//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating point scalar (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Converts a count into this scalar.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Lossy conversion used for diagnostics and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `n` evenly spaced samples covering `[lo, hi]` inclusive.
pub fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / T::from_count(n - 1);
            (0..n)
                .map(|i| if i + 1 == n { hi } else { lo + step * T::from_count(i) })
                .collect()
        }
    }
}

/// Reduces an angle to `[0, π)`.
pub fn mod_pi<T: Real>(theta: T) -> T {
    let pi = T::PI();
    let mut r = theta % pi;
    if r < T::zero() {
        r = r + pi;
    }
    if r >= pi {
        r = r - pi;
    }
    r
}

/// Reduces an angle difference to `(-π/2, π/2]`.
pub fn wrap_half_pi<T: Real>(delta: T) -> T {
    let pi = T::PI();
    let half = pi * T::half();
    let mut d = delta % pi;
    if d > half {
        d = d - pi;
    } else if d <= -half {
        d = d + pi;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_endpoints() {
        let xs = linspace(-1.0_f64, 2.0, 4);
        assert_eq!(xs, vec![-1.0, 0.0, 1.0, 2.0]);
        assert_eq!(linspace(0.5_f64, 3.0, 1), vec![0.5]);
    }

    #[test]
    fn angle_reductions() {
        let pi = std::f64::consts::PI;
        assert!((mod_pi(-0.3_f64) - (pi - 0.3)).abs() < 1e-15);
        assert!((mod_pi(3.0 * pi + 0.1) - 0.1).abs() < 1e-12);
        assert!((wrap_half_pi(pi - 0.1_f64) + 0.1).abs() < 1e-12);
        assert!((wrap_half_pi(0.2_f64) - 0.2).abs() < 1e-15);
    }
}

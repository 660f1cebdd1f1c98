//! Composite Gauss–Legendre quadrature on real intervals and straight
//! complex segments.

use num_complex::Complex;

use crate::scalar::Real;

/// `n`-point Gauss–Legendre rule on `[-1, 1]`; exact for polynomials of
/// degree `2n − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Nodes are the roots of `P_n`, found by Newton iteration from the
    /// Chebyshev-like initial guesses `cos(π(i − ¼)/(n + ½))`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = T::from_count(n);
        let tol = T::epsilon() * T::lit(4.0);
        for i in 0..n.div_ceil(2) {
            let mut x = (T::PI() * (T::from_count(i + 1) - T::lit(0.25)) / (nf + T::half())).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x = x - dx;
                if dx.abs() <= tol {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = T::two() / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Polynomial degree of exactness order, `2n`.
    pub fn order(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `∫_a^b f` with `panels` equal sub-intervals.
    pub fn integrate<F: Fn(T) -> T>(&self, f: F, a: T, b: T, panels: usize) -> T {
        let panels = panels.max(1);
        let width = (b - a) / T::from_count(panels);
        let half = width * T::half();
        let mut total = T::zero();
        for k in 0..panels {
            let mid = a + width * (T::from_count(k) + T::half());
            let mut acc = T::zero();
            for (&x, &w) in self.nodes.iter().zip(&self.weights) {
                acc = acc + w * f(mid + half * x);
            }
            total = total + acc * half;
        }
        total
    }

    /// `∫ f(z) dz` along the straight segment `z0 → z1`, componentwise for
    /// vector-valued integrands.
    pub fn integrate_segment<const N: usize, F>(
        &self,
        f: F,
        z0: Complex<T>,
        z1: Complex<T>,
        panels: usize,
    ) -> [Complex<T>; N]
    where
        F: Fn(Complex<T>) -> [Complex<T>; N],
    {
        let panels = panels.max(1);
        let step = (z1 - z0) / T::from_count(panels);
        let half = step * T::half();
        let mut total = [Complex::new(T::zero(), T::zero()); N];
        for k in 0..panels {
            let mid = z0 + step * (T::from_count(k) + T::half());
            for (&x, &w) in self.nodes.iter().zip(&self.weights) {
                let vals = f(mid + half * x);
                for (t, v) in total.iter_mut().zip(vals) {
                    *t = *t + v * half * w;
                }
            }
        }
        total
    }
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_count(k);
        let p2 = ((T::two() * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_count(n);
    let dp = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_two_and_three_point_rules() {
        let r = GaussLegendre::<f64>::new(2);
        let x = 1.0 / 3.0_f64.sqrt();
        assert!((r.nodes()[1] - x).abs() < 1e-15 && (r.nodes()[0] + x).abs() < 1e-15);
        assert!((r.weights()[0] - 1.0).abs() < 1e-15);
        let r = GaussLegendre::<f64>::new(3);
        assert!((r.nodes()[2] - 0.6_f64.sqrt()).abs() < 1e-15);
        assert!((r.weights()[1] - 8.0 / 9.0).abs() < 1e-15);
        assert!((r.weights()[0] - 5.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        for n in 1..=10 {
            let r = GaussLegendre::<f64>::new(n);
            for deg in 0..2 * n {
                let got = r.integrate(|x| x.powi(deg as i32), 0.0, 1.0, 1);
                let want = 1.0 / (deg as f64 + 1.0);
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 4, 7, 16, 32] {
            let r = GaussLegendre::<f64>::new(n);
            assert!((r.weights().iter().sum::<f64>() - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn complex_segment_of_exponential() {
        let r = GaussLegendre::<f64>::new(5);
        let z0 = Complex::new(0.2, -0.1);
        let z1 = Complex::new(-0.3, 2.0);
        let [got] = r.integrate_segment(|z| [(z * 1.5).exp()], z0, z1, 8);
        let want = ((z1 * 1.5).exp() - (z0 * 1.5).exp()) / 1.5;
        assert!((got - want).norm() < 1e-13);
    }

    #[test]
    fn f32_rule_is_usable() {
        let r = GaussLegendre::<f32>::new(4);
        let got = r.integrate(|x| x.exp(), 0.0, 1.0, 2);
        assert!((got - (1.0f32.exp() - 1.0)).abs() < 1e-5);
    }
}

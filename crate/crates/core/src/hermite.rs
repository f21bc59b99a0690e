//! Orthonormal probabilists' Hermite polynomials and Gauss–Hermite quadrature
//! for the unit-mass Gaussian weight `e^{-x²/2}/√(2π)`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Values `h_0(x), …, h_{n_max}(x)` from `x h_n = √(n+1) h_{n+1} + √n h_{n-1}`.
pub fn hermite_values<T: Real>(x: T, n_max: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(T::one());
    if n_max == 0 {
        return out;
    }
    out.push(x);
    for n in 1..n_max {
        let nf = T::from_usize_lossy(n);
        let next = (x * out[n] - nf.sqrt() * out[n - 1]) / (nf + T::one()).sqrt();
        out.push(next);
    }
    out
}

/// `h_n'(x) = √n h_{n-1}(x)`.
pub fn hermite_derivative<T: Real>(values: &[T], n: usize) -> T {
    if n == 0 {
        T::zero()
    } else {
        T::from_usize_lossy(n).sqrt() * values[n - 1]
    }
}

/// Gauss–Hermite rule exact for polynomials of degree `< 2·order` against the
/// standard normal density.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Golub–Welsch nodes, refined by Newton on `h_order`, with Christoffel weights.
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::QuadratureOrder {
                requested: 0,
                required: 1,
            });
        }
        let jacobi = DMatrix::<f64>::from_fn(order, order, |i, j| {
            if i + 1 == j {
                (j as f64).sqrt()
            } else if j + 1 == i {
                (i as f64).sqrt()
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(jacobi);
        let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        nodes.sort_by(|a, b| a.total_cmp(b));
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                let h = hermite_values(*x, order);
                let d = hermite_derivative(&h, order);
                if d == 0.0 {
                    break;
                }
                let step = h[order] / d;
                *x -= step;
                if step.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
        }
        // Symmetrise so odd moments vanish to roundoff.
        for i in 0..order / 2 {
            let a = 0.5 * (nodes[order - 1 - i] - nodes[i]);
            nodes[i] = -a;
            nodes[order - 1 - i] = a;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        let weights = nodes
            .iter()
            .map(|&x| {
                let h = hermite_values(x, order - 1);
                1.0 / h.iter().map(|v| v * v).sum::<f64>()
            })
            .collect();
        Ok(Self { nodes, weights })
    }

    /// Rule used to project onto `n_hermite + 1` Hermite rows; `order` must be
    /// at least `2·n_hermite`.
    pub fn for_projection(n_hermite: usize, order: usize) -> Result<Self> {
        let required = 2 * n_hermite;
        if order < required {
            return Err(Error::QuadratureOrder {
                requested: order,
                required,
            });
        }
        Self::new(order)
    }

    /// Default order `2·n_hermite + 8`.
    pub fn default_for(n_hermite: usize) -> Self {
        Self::new(2 * n_hermite + 8).expect("positive quadrature order")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_q φ(x_q)`.
    pub fn integrate(&self, mut phi: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * phi(x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degree_values() {
        let h = hermite_values(2.0_f64, 3);
        assert_eq!(h[0], 1.0);
        assert_eq!(h[1], 2.0);
        assert!((h[2] - (4.0 - 1.0) / 2f64.sqrt()).abs() < 1e-15);
        assert!((h[3] - (8.0 - 6.0) / 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gaussian_moments() {
        let q = GaussHermite::new(20).unwrap();
        assert!((q.integrate(|_| 1.0) - 1.0).abs() < 1e-14);
        assert!(q.integrate(|x| x).abs() < 1e-14);
        assert!((q.integrate(|x| x * x) - 1.0).abs() < 1e-13);
        assert!((q.integrate(|x| x.powi(4)) - 3.0).abs() < 1e-12);
        assert!((q.integrate(|x| x.powi(6)) - 15.0).abs() < 1e-11);
    }

    #[test]
    fn orthonormality_up_to_exact_degree() {
        let n = 30;
        let q = GaussHermite::new(n + 1).unwrap();
        let table: Vec<Vec<f64>> = q.nodes.iter().map(|&x| hermite_values(x, n)).collect();
        for a in 0..=n {
            for b in 0..=n {
                let s: f64 = table
                    .iter()
                    .zip(&q.weights)
                    .map(|(h, w)| w * h[a] * h[b])
                    .sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-11, "({a},{b}) -> {s}");
            }
        }
    }

    #[test]
    fn large_order_is_accurate() {
        let q = GaussHermite::default_for(48);
        assert_eq!(q.len(), 104);
        assert!((q.integrate(|_| 1.0) - 1.0).abs() < 1e-13);
        let h = |x: f64| hermite_values(x, 48)[48];
        assert!((q.integrate(|x| h(x) * h(x)) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn projection_order_is_checked() {
        assert!(matches!(
            GaussHermite::for_projection(10, 19),
            Err(Error::QuadratureOrder {
                requested: 19,
                required: 20
            })
        ));
        assert!(GaussHermite::for_projection(10, 20).is_ok());
    }
}

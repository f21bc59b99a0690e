//! Real `θ`-fields on the uniform grid and their Fourier coefficients,
//! `ĝ_k = (1/2π)∫ g e^{-ikθ} dθ`, stored in ascending order `k = -n/2+1, …, n/2`.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::grid::{mode_index, mode_of};
use crate::scalar::Real;
use crate::Complex;

/// Forward and inverse plans for one grid size.
pub struct Fourier<T: Real> {
    n: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> Fourier<T> {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Coefficients of the real samples `values`, ascending layout.
    pub fn analyze(&self, values: &[T]) -> Vec<Complex<T>> {
        let n = self.n;
        assert_eq!(values.len(), n, "sample count does not match plan");
        let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.forward.process(&mut buf);
        let scale = T::from_usize_lossy(n).recip();
        let mut out = vec![Complex::new(T::zero(), T::zero()); n];
        for (idx, slot) in out.iter_mut().enumerate() {
            let k = mode_of(n, idx);
            *slot = buf[k.rem_euclid(n as i64) as usize] * scale;
        }
        out
    }

    /// Real samples `Σ_k ĝ_k e^{ikθ_i}`; imaginary residue is discarded.
    pub fn synthesize(&self, coeffs: &[Complex<T>]) -> Vec<T> {
        let n = self.n;
        assert_eq!(coeffs.len(), n, "coefficient count does not match plan");
        let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
        for (idx, c) in coeffs.iter().enumerate() {
            let k = mode_of(n, idx);
            buf[k.rem_euclid(n as i64) as usize] = *c;
        }
        self.inverse.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }
}

pub fn analyze<T: Real>(values: &[T]) -> Vec<Complex<T>> {
    Fourier::new(values.len()).analyze(values)
}

pub fn synthesize<T: Real>(coeffs: &[Complex<T>]) -> Vec<T> {
    Fourier::new(coeffs.len()).synthesize(coeffs)
}

/// `ŝ_1` of `s = sin∗ρ`, where `(sin∗ρ)(θ) = ∫ sin(θ*−θ) ρ(θ*) dθ*`; `ŝ_{-1}` is its conjugate.
#[inline]
pub fn coupling_coefficient<T: Real>(rho_1: Complex<T>) -> Complex<T> {
    Complex::new(T::zero(), T::PI()) * rho_1
}

/// Samples of `(sin∗ρ)(θ_i)` from samples of `ρ`.
pub fn coupling_field<T: Real>(rho: &[T]) -> Vec<T> {
    let n = rho.len();
    let plan = Fourier::new(n);
    let hat = plan.analyze(rho);
    let s1 = coupling_coefficient(hat[mode_index(n, 1)]);
    let mut s = vec![Complex::new(T::zero(), T::zero()); n];
    s[mode_index(n, 1)] = s1;
    s[mode_index(n, -1)] = s1.conj();
    plan.synthesize(&s)
}

/// Trapezoidal `∫_0^{2π} g dθ`, exact for trigonometric polynomials of degree `< n`.
pub fn integral<T: Real>(values: &[T]) -> T {
    let sum = values.iter().fold(T::zero(), |acc, &v| acc + v);
    sum * T::TAU() / T::from_usize_lossy(values.len())
}

/// Coefficients of `∂_θ g`.
pub fn derivative<T: Real>(coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = coeffs.len();
    coeffs
        .iter()
        .enumerate()
        .map(|(idx, c)| *c * Complex::new(T::zero(), T::from_i64_lossy(mode_of(n, idx))))
        .collect()
}

/// Bessel-potential norm `sqrt(2π Σ_k |ĝ_k|²/(1+k²))`, zero mode included.
pub fn hminus1_coeffs<T: Real>(coeffs: &[Complex<T>]) -> T {
    let n = coeffs.len();
    let s = coeffs.iter().enumerate().fold(T::zero(), |acc, (idx, c)| {
        let k = T::from_i64_lossy(mode_of(n, idx));
        acc + c.norm_sqr() / (T::one() + k * k)
    });
    (T::TAU() * s).sqrt()
}

/// Homogeneous norm `sqrt(2π Σ_{k≠0} |ĝ_k|²/k²)`; blind to the mean.
pub fn hminus1_homogeneous_coeffs<T: Real>(coeffs: &[Complex<T>]) -> T {
    let n = coeffs.len();
    let s = coeffs.iter().enumerate().fold(T::zero(), |acc, (idx, c)| {
        let k = mode_of(n, idx);
        if k == 0 {
            acc
        } else {
            let kf = T::from_i64_lossy(k);
            acc + c.norm_sqr() / (kf * kf)
        }
    });
    (T::TAU() * s).sqrt()
}

/// [`hminus1_coeffs`] of a sampled field.
pub fn hminus1_norm<T: Real>(values: &[T]) -> T {
    hminus1_coeffs(&analyze(values))
}

/// [`hminus1_homogeneous_coeffs`] of a sampled field.
pub fn hminus1_homogeneous<T: Real>(values: &[T]) -> T {
    hminus1_homogeneous_coeffs(&analyze(values))
}

/// `sqrt(2π Σ_k |ĝ_k|²)`, the `L²(0,2π)` norm by Parseval.
pub fn l2_coeffs<T: Real>(coeffs: &[Complex<T>]) -> T {
    let s = coeffs.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr());
    (T::TAU() * s).sqrt()
}

use rayon::prelude::*;

use crate::field::SpectralField;
use crate::fourier::coupling_coefficient;
use crate::grid::{mode_index, mode_of};
use crate::moments::density_coeffs;
use crate::params::SimParams;
use crate::scalar::Real;
use crate::Complex;

const MIN_ROWS_PER_TASK: usize = 8;

/// Coefficient-space generator `∂_t C = a·𝒩(C) − b·n·C`, where `𝒩` collects
/// free transport and the mean-field force and `b·n` is the Fokker–Planck spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dynamics<T> {
    /// Multiplier of transport and coupling (1, or `1/ε` when rescaled).
    pub transport: T,
    /// Fokker–Planck rate per Hermite level (`1/m`, or `1/ε²` when rescaled).
    pub relaxation: T,
    pub kappa_t: T,
    pub sigma_t: T,
}

impl<T: Real> Dynamics<T> {
    pub fn kinetic(params: &SimParams<T>) -> Self {
        Self {
            transport: T::one(),
            relaxation: params.m().recip(),
            kappa_t: params.kappa_t(),
            sigma_t: params.sigma_t(),
        }
    }

    /// Rescaled system with mass `ε`; falls back to `m` when no `ε` is set.
    pub fn rescaled(params: &SimParams<T>) -> Self {
        let eps = params.epsilon().unwrap_or_else(|| params.m());
        Self {
            transport: eps.recip(),
            relaxation: (eps * eps).recip(),
            kappa_t: params.kappa_t(),
            sigma_t: params.sigma_t(),
        }
    }

    /// `𝒩(C)` written into `out`; rows are independent and filled concurrently.
    pub fn nonlinear(&self, field: &SpectralField<T>, out: &mut SpectralField<T>) {
        let nt = field.n_theta();
        let rows = field.n_rows();
        let k_max = nt as i64 / 2 - 1;
        let rho = density_coeffs(field);
        let s1 = coupling_coefficient(rho[mode_index(nt, 1)]);
        let sm1 = s1.conj();
        let sq = self.sigma_t.sqrt();
        let force = self.kappa_t / sq;
        let a = self.transport;
        let nus = field.nu();
        let src = field.coeffs();
        let zero = Complex::new(T::zero(), T::zero());
        out.coeffs_mut()
            .par_chunks_mut(nt)
            .with_min_len(MIN_ROWS_PER_TASK)
            .enumerate()
            .for_each(|(r, dst)| {
                let j = r / rows;
                let n = r % rows;
                let base = j * rows * nt;
                let cur = &src[base + n * nt..base + (n + 1) * nt];
                let below = (n > 0).then(|| &src[base + (n - 1) * nt..base + n * nt]);
                let above = (n + 1 < rows).then(|| &src[base + (n + 1) * nt..base + (n + 2) * nt]);
                let nu = nus[j];
                let sn = T::from_usize_lossy(n).sqrt();
                let sn1 = T::from_usize_lossy(n + 1).sqrt();
                for (idx, d) in dst.iter_mut().enumerate() {
                    let k = mode_of(nt, idx);
                    if k > k_max {
                        *d = zero;
                        continue;
                    }
                    let mut ladder = cur[idx] * nu;
                    if let Some(b) = below {
                        ladder = ladder + b[idx] * (sq * sn);
                    }
                    if let Some(u) = above {
                        ladder = ladder + u[idx] * (sq * sn1);
                    }
                    let kf = T::from_i64_lossy(k);
                    // −ik·ladder
                    let mut v = Complex::new(ladder.im * kf, -ladder.re * kf);
                    if let Some(b) = below {
                        let mut c = zero;
                        if k > -k_max {
                            c = c + s1 * b[idx - 1];
                        }
                        if k < k_max {
                            c = c + sm1 * b[idx + 1];
                        }
                        v = v + c * (force * sn);
                    }
                    *d = v * a;
                }
            });
    }

    /// Full time derivative `a·𝒩(C) − b·n·C`.
    pub fn rhs(&self, field: &SpectralField<T>) -> SpectralField<T> {
        let mut out = field.zeros_like();
        self.nonlinear(field, &mut out);
        let nt = field.n_theta();
        let rows = field.n_rows();
        for (r, (d, s)) in out
            .coeffs_mut()
            .chunks_mut(nt)
            .zip(field.coeffs().chunks(nt))
            .enumerate()
        {
            let rate = self.relaxation * T::from_usize_lossy(r % rows);
            for (x, y) in d.iter_mut().zip(s) {
                *x = *x - *y * rate;
            }
        }
        out
    }

    /// Applies `e^{−b·n·h}` to each Hermite row.
    pub fn relax(&self, field: &mut SpectralField<T>, h: T) {
        let nt = field.n_theta();
        let rows = field.n_rows();
        let factors: Vec<T> = (0..rows)
            .map(|n| (-self.relaxation * T::from_usize_lossy(n) * h).exp())
            .collect();
        for (r, row) in field.coeffs_mut().chunks_mut(nt).enumerate() {
            let f = factors[r % rows];
            if f != T::one() {
                for c in row.iter_mut() {
                    *c = *c * f;
                }
            }
        }
    }
}

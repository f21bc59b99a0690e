use crate::error::Result;
use crate::field::SpectralField;
use crate::fourier::coupling_coefficient;
use crate::grid::{mode_index, Grid};
use crate::moments::{density_coeffs, moment_coeffs};
use crate::params::SimParams;
use crate::scalar::Real;
use crate::Complex;

/// Residuals of the density and flux balance laws, as Fourier coefficients
/// per node over the widened band `k = −K−1, …, K+1` (`K = n_θ/2 − 1`), so the
/// mode leaking out of the truncated product `(sin∗ρ)N` is visible.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentResidual<T> {
    pub r_n: Vec<Vec<Complex<T>>>,
    pub r_j: Vec<Vec<Complex<T>>>,
}

impl<T: Real> MomentResidual<T> {
    pub fn max_abs_n(&self) -> T {
        max_abs(&self.r_n)
    }

    pub fn max_abs_j(&self) -> T {
        max_abs(&self.r_j)
    }
}

fn max_abs<T: Real>(rows: &[Vec<Complex<T>>]) -> T {
    rows.iter()
        .flatten()
        .fold(T::zero(), |acc, c| acc.max(c.norm()))
}

fn widen<T: Real>(row: &[Complex<T>], k_max: i64) -> Vec<Complex<T>> {
    let nt = row.len();
    (-(k_max + 1)..=k_max + 1)
        .map(|k| {
            if k.abs() <= k_max {
                row[mode_index(nt, k)]
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
        .collect()
}

/// `r_N = ∂_t N + ∂_θ(J + νN)` and
/// `r_J = ∂_t J + ∂_θ(P + νJ) − κ̃(sin∗ρ)N + J/m`, with time derivatives read
/// from `rhs_field` and the product `(sin∗ρ)N` formed without truncation.
pub fn moment_balance_residual<T: Real>(
    field: &SpectralField<T>,
    rhs_field: &SpectralField<T>,
    params: &SimParams<T>,
    grid: &Grid<T>,
) -> Result<MomentResidual<T>> {
    let k_max = grid.k_max();
    let m = moment_coeffs(field)?;
    let dm = moment_coeffs(rhs_field)?;
    let rho = density_coeffs(field);
    let s1 = coupling_coefficient(rho[mode_index(grid.n_theta(), 1)]);
    let width = (2 * k_max + 3) as usize;
    let ik = |pos: usize| Complex::new(T::zero(), T::from_i64_lossy(pos as i64 - k_max - 1));
    let mut out = MomentResidual {
        r_n: Vec::new(),
        r_j: Vec::new(),
    };
    for (j, node) in grid.nodes().iter().enumerate() {
        let n = widen(&m.n[j], k_max);
        let jj = widen(&m.j[j], k_max);
        let p = widen(&m.p[j], k_max);
        let dn = widen(&dm.n[j], k_max);
        let dj = widen(&dm.j[j], k_max);
        let mut rn = Vec::with_capacity(width);
        let mut rj = Vec::with_capacity(width);
        for pos in 0..width {
            let d = ik(pos);
            rn.push(dn[pos] + d * (jj[pos] + n[pos] * node.nu));
            let mut sn = Complex::new(T::zero(), T::zero());
            if pos >= 1 {
                sn = sn + s1 * n[pos - 1];
            }
            if pos + 1 < width {
                sn = sn + s1.conj() * n[pos + 1];
            }
            rj.push(
                dj[pos] + d * (p[pos] + jj[pos] * node.nu) - sn * params.kappa_t()
                    + jj[pos] / params.m(),
            );
        }
        out.r_n.push(rn);
        out.r_j.push(rj);
    }
    Ok(out)
}

/// The part of `r_J` produced by dropping modes `±(K+1)` of `(sin∗ρ)N`:
/// `−κ̃ ŝ_{±1} N̂_{±K}` at `k = ±(K+1)`, zero elsewhere.
pub fn closure_defect<T: Real>(
    field: &SpectralField<T>,
    params: &SimParams<T>,
    grid: &Grid<T>,
) -> Vec<Vec<Complex<T>>> {
    let nt = grid.n_theta();
    let k_max = grid.k_max();
    let rho = density_coeffs(field);
    let s1 = coupling_coefficient(rho[mode_index(nt, 1)]);
    let width = (2 * k_max + 3) as usize;
    (0..grid.n_nodes())
        .map(|j| {
            let mut row = vec![Complex::new(T::zero(), T::zero()); width];
            row[width - 1] = -(s1 * field.get(j, 0, k_max)) * params.kappa_t();
            row[0] = -(s1.conj() * field.get(j, 0, -k_max)) * params.kappa_t();
            row
        })
        .collect()
}

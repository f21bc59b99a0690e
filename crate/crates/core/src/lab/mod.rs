//! Hypocoercivity diagnostics: the auxiliary elliptic problem, the functional
//! `A`, the modified energy, regime checks, the inequality battery and decay fits.

mod battery;
mod fit;
mod regime;

pub use battery::{inequality_battery, BatteryReport, BatteryRow, Check};
pub use fit::{fit_decay_rate, linear_fit, DecayFit, LinearFit};
pub use regime::{largest_admissible_kappa, regime_check, RegimeReport};

use crate::equilibrium::EquilibriumState;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::fourier::{derivative, Fourier};
use crate::grid::{mode_index, mode_of, Grid};
use crate::moments::moment_coeffs;
use crate::params::SimParams;
use crate::scalar::Real;
use crate::Complex;

/// Poincaré–Wirtinger constant for zero-mean `2π`-periodic functions.
pub const POINCARE_CONSTANT: f64 = 1.0;

/// Compatibility tolerance relative to the source scale.
const COMPATIBILITY_TOL: f64 = 1e-10;

/// Solution of `∂²_θ v = S` per node, stored as Fourier coefficients `[node][mode]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxPotential<T> {
    pub v: Vec<Vec<Complex<T>>>,
    pub dv: Vec<Vec<Complex<T>>>,
    pub source: Vec<Vec<Complex<T>>>,
}

impl<T: Real> AuxPotential<T> {
    /// Samples `v` on the `θ` grid.
    pub fn v_samples(&self) -> Vec<Vec<T>> {
        sample_rows(&self.v)
    }

    pub fn dv_samples(&self) -> Vec<Vec<T>> {
        sample_rows(&self.dv)
    }

    /// Coefficients of `∂²_θ v`.
    pub fn d2v(&self) -> Vec<Vec<Complex<T>>> {
        self.dv.iter().map(|r| derivative(r)).collect()
    }
}

fn sample_rows<T: Real>(rows: &[Vec<Complex<T>>]) -> Vec<Vec<T>> {
    match rows.first() {
        None => Vec::new(),
        Some(r) => {
            let fft = Fourier::new(r.len());
            rows.iter().map(|r| fft.synthesize(r)).collect()
        }
    }
}

/// Solves `∂²_θ v = S` for sampled sources `[node][θ]`.
pub fn poisson_solve_theta<T: Real>(source: &[Vec<T>]) -> Result<AuxPotential<T>> {
    let Some(first) = source.first() else {
        return Ok(AuxPotential {
            v: vec![],
            dv: vec![],
            source: vec![],
        });
    };
    let fft = Fourier::new(first.len());
    let hat: Vec<Vec<Complex<T>>> = source.iter().map(|s| fft.analyze(s)).collect();
    for (j, s) in source.iter().enumerate() {
        let scale = s.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
        check_compatible(j, hat[j][mode_index(s.len(), 0)].re, scale)?;
    }
    Ok(solve_hat(hat))
}

/// Solves `∂²_θ v = S` for sources given by Fourier coefficients `[node][mode]`.
pub fn poisson_solve_coeffs<T: Real>(source: &[Vec<Complex<T>>]) -> Result<AuxPotential<T>> {
    for (j, s) in source.iter().enumerate() {
        let scale = s.iter().fold(T::zero(), |acc, c| acc + c.norm());
        check_compatible(j, s[mode_index(s.len(), 0)].re, scale)?;
    }
    Ok(solve_hat(source.to_vec()))
}

fn check_compatible<T: Real>(node: usize, mean: T, scale: T) -> Result<()> {
    if mean.abs() > T::lit(COMPATIBILITY_TOL) * scale {
        return Err(Error::Compatibility {
            node,
            mean: mean.to_f64_lossy(),
        });
    }
    Ok(())
}

fn solve_hat<T: Real>(source: Vec<Vec<Complex<T>>>) -> AuxPotential<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut v = Vec::with_capacity(source.len());
    let mut dv = Vec::with_capacity(source.len());
    for s in &source {
        let nt = s.len();
        let row: Vec<Complex<T>> = s
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let k = mode_of(nt, idx);
                if k == 0 {
                    zero
                } else {
                    let kf = T::from_i64_lossy(k);
                    -*c / (kf * kf)
                }
            })
            .collect();
        dv.push(derivative(&row));
        v.push(row);
    }
    AuxPotential { v, dv, source }
}

/// `Σ_j γ̄_j 2π Σ_k Re(a_k conj(b_k))`, the `L²_γ̄` inner product.
pub fn macro_inner<T: Real>(a: &[Vec<Complex<T>>], b: &[Vec<Complex<T>>], grid: &Grid<T>) -> T {
    let mut total = T::zero();
    for ((ra, rb), node) in a.iter().zip(b).zip(grid.nodes()) {
        let s = ra
            .iter()
            .zip(rb)
            .fold(T::zero(), |acc, (x, y)| acc + x.re * y.re + x.im * y.im);
        total = total + node.gbar * s;
    }
    T::TAU() * total
}

/// Potential for the source `N_∞ − N` built from the zeroth Hermite row.
pub fn density_potential<T: Real>(
    field: &SpectralField<T>,
    eq: &EquilibriumState<T>,
) -> Result<AuxPotential<T>> {
    let nt = field.n_theta();
    let source: Vec<Vec<Complex<T>>> = (0..field.n_nodes())
        .map(|j| {
            let mut row: Vec<Complex<T>> = field.row(j, 0).iter().map(|c| -*c).collect();
            let z = mode_index(nt, 0);
            row[z] = Complex::new(eq.n_inf[j] - field.row(j, 0)[z].re, T::zero());
            row
        })
        .collect();
    for (j, s) in source.iter().enumerate() {
        let scale = eq.n_inf[j]
            .abs()
            .max(field.row(j, 0)[mode_index(nt, 0)].re.abs());
        check_compatible(j, s[mode_index(nt, 0)].re, scale)?;
    }
    Ok(solve_hat(source))
}

/// `A = ∫∫ J ∂_θ v γ̄ dν dθ` with `∂²_θ v = N_∞ − N`.
pub fn functional_a<T: Real>(
    field: &SpectralField<T>,
    eq: &EquilibriumState<T>,
    grid: &Grid<T>,
) -> Result<T> {
    let pot = density_potential(field, eq)?;
    let m = moment_coeffs(field)?;
    Ok(macro_inner(&m.j, &pot.dv, grid))
}

/// `α = min(1/(2C_P), mσ̃/(2(5m²σ̃ + C_P²)))`.
pub fn default_alpha<T: Real>(params: &SimParams<T>) -> T {
    let cp = T::lit(POINCARE_CONSTANT);
    let m = params.m();
    let s = params.sigma_t();
    let two = T::lit(2.0);
    (T::one() / (two * cp)).min(m * s / (two * (T::lit(5.0) * m * m * s + cp * cp)))
}

/// `α√σ̃ C_P ≤ 1/2`, under which the energy is equivalent to the squared distance.
pub fn alpha_is_compliant<T: Real>(alpha: T, sigma_t: T) -> bool {
    alpha * sigma_t.sqrt() * T::lit(POINCARE_CONSTANT) <= T::lit(0.5)
}

/// `E[f] = ½‖f − f_∞‖²_{L²_γ} + αA`.
pub fn modified_energy<T: Real>(
    field: &SpectralField<T>,
    eq: &EquilibriumState<T>,
    alpha: T,
    grid: &Grid<T>,
) -> Result<T> {
    let d = crate::norms::l2_gamma_sq(field, Some(eq), grid);
    let half = T::lit(0.5) * d;
    if alpha == T::zero() {
        return Ok(half);
    }
    Ok(half + alpha * functional_a(field, eq, grid)?)
}

//! Density `N`, flux `J` and second centred moment `P` of a field,
//! read off the first three Hermite rows.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::fourier::Fourier;
use crate::grid::Grid;
use crate::scalar::Real;
use crate::Complex;

/// Sampled moments, indexed `[node][θ point]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentFields<T> {
    pub n: Vec<Vec<T>>,
    pub j: Vec<Vec<T>>,
    pub p: Vec<Vec<T>>,
}

/// Fourier coefficients of the moments, indexed `[node][mode]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentCoeffs<T> {
    pub n: Vec<Vec<Complex<T>>>,
    pub j: Vec<Vec<Complex<T>>>,
    pub p: Vec<Vec<Complex<T>>>,
}

/// `N = C_0`, `J = √σ̃ C_1`, `P = σ̃(√2 C_2 + C_0)`.
pub fn moment_coeffs<T: Real>(field: &SpectralField<T>) -> Result<MomentCoeffs<T>> {
    if field.n_hermite() < 2 {
        return Err(Error::HermiteTooShort {
            rows: field.n_rows(),
        });
    }
    let s = field.sigma_t();
    let sq = s.sqrt();
    let r2 = T::SQRT_2();
    let mut out = MomentCoeffs {
        n: Vec::with_capacity(field.n_nodes()),
        j: Vec::with_capacity(field.n_nodes()),
        p: Vec::with_capacity(field.n_nodes()),
    };
    for node in 0..field.n_nodes() {
        let c0 = field.row(node, 0);
        let c1 = field.row(node, 1);
        let c2 = field.row(node, 2);
        out.n.push(c0.to_vec());
        out.j.push(c1.iter().map(|c| *c * sq).collect());
        out.p
            .push(c0.iter().zip(c2).map(|(a, b)| (*b * r2 + *a) * s).collect());
    }
    Ok(out)
}

/// Moments sampled at the `θ` collocation points of `grid`.
pub fn moments<T: Real>(field: &SpectralField<T>, grid: &Grid<T>) -> Result<MomentFields<T>> {
    if field.n_theta() != grid.n_theta() || field.n_nodes() != grid.n_nodes() {
        return Err(Error::Shape("field does not match grid".into()));
    }
    let c = moment_coeffs(field)?;
    let fft = Fourier::new(grid.n_theta());
    let synth = |rows: &[Vec<Complex<T>>]| rows.iter().map(|r| fft.synthesize(r)).collect();
    Ok(MomentFields {
        n: synth(&c.n),
        j: synth(&c.j),
        p: synth(&c.p),
    })
}

/// Coefficients of `ρ(θ) = Σ_j N(θ, ν_j)`.
pub fn density_coeffs<T: Real>(field: &SpectralField<T>) -> Vec<Complex<T>> {
    let mut rho = vec![Complex::new(T::zero(), T::zero()); field.n_theta()];
    for j in 0..field.n_nodes() {
        for (r, c) in rho.iter_mut().zip(field.row(j, 0)) {
            *r = *r + *c;
        }
    }
    rho
}

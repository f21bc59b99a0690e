//! Weighted norms and the Fokker–Planck dissipation, evaluated from coefficients
//! through Parseval's identity for the orthonormal basis.

use crate::equilibrium::EquilibriumState;
use crate::error::Result;
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::scalar::Real;
use crate::Complex;

fn row_energy<T: Real>(row: &[Complex<T>]) -> T {
    row.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
}

/// `Σ_k |c_k − a δ_{k0}|²` for a row in ascending layout.
fn shifted_row_energy<T: Real>(row: &[Complex<T>], a: T) -> T {
    let zero = row.len() / 2 - 1;
    row.iter().enumerate().fold(T::zero(), |acc, (idx, c)| {
        if idx == zero {
            acc + (c.re - a) * (c.re - a) + c.im * c.im
        } else {
            acc + c.norm_sqr()
        }
    })
}

/// `‖f − f_ref‖²_{L²_γ} = Σ_j γ̄_j Σ_n 2π Σ_k |C − C_ref|²`; without a reference, `‖f‖²_{L²_γ}`.
pub fn l2_gamma_sq<T: Real>(
    field: &SpectralField<T>,
    reference: Option<&EquilibriumState<T>>,
    grid: &Grid<T>,
) -> T {
    let mut total = T::zero();
    for (j, node) in grid.nodes().iter().enumerate() {
        let mut s = match reference {
            Some(eq) => shifted_row_energy(field.row(j, 0), eq.n_inf[j]),
            None => row_energy(field.row(j, 0)),
        };
        for n in 1..field.n_rows() {
            s = s + row_energy(field.row(j, n));
        }
        total = total + node.gbar * s;
    }
    T::TAU() * total
}

/// `‖f − g‖²_{L²_γ}` for two fields on the same grid.
pub fn l2_gamma_dist_sq<T: Real>(
    a: &SpectralField<T>,
    b: &SpectralField<T>,
    grid: &Grid<T>,
) -> Result<T> {
    Ok(l2_gamma_sq(&a.difference(b)?, None, grid))
}

/// `I[f] = Σ_j γ̄_j Σ_n (n/σ̃) 2π Σ_k |C[j][n][k]|²`.
pub fn dissipation<T: Real>(field: &SpectralField<T>, grid: &Grid<T>) -> T {
    let mut total = T::zero();
    for (j, node) in grid.nodes().iter().enumerate() {
        let mut s = T::zero();
        for n in 1..field.n_rows() {
            s = s + T::from_usize_lossy(n) * row_energy(field.row(j, n));
        }
        total = total + node.gbar * s;
    }
    T::TAU() * total / field.sigma_t()
}

/// `‖u‖²_{L²_γ̄}` of a macroscopic quantity given by coefficients `[node][mode]`.
pub fn macro_l2_sq<T: Real>(coeffs: &[Vec<Complex<T>>], grid: &Grid<T>) -> T {
    grid.nodes()
        .iter()
        .zip(coeffs)
        .fold(T::zero(), |acc, (node, row)| {
            acc + node.gbar * row_energy(row)
        })
        * T::TAU()
}

/// `‖N − N_∞‖²_{L²_γ̄}`.
pub fn density_error_sq<T: Real>(
    field: &SpectralField<T>,
    eq: &EquilibriumState<T>,
    grid: &Grid<T>,
) -> T {
    let mut total = T::zero();
    for (j, node) in grid.nodes().iter().enumerate() {
        total = total + node.gbar * shifted_row_energy(field.row(j, 0), eq.n_inf[j]);
    }
    T::TAU() * total
}

/// `‖f − N M‖²_{L²_γ}`, the part of `f` outside the local equilibrium.
pub fn micro_sq<T: Real>(field: &SpectralField<T>, grid: &Grid<T>) -> T {
    let mut total = T::zero();
    for (j, node) in grid.nodes().iter().enumerate() {
        let mut s = T::zero();
        for n in 1..field.n_rows() {
            s = s + row_energy(field.row(j, n));
        }
        total = total + node.gbar * s;
    }
    T::TAU() * total
}

/// Unweighted `‖f‖_{L²_{M^{-1}}}` on node `j`.
pub fn node_l2<T: Real>(field: &SpectralField<T>, j: usize) -> T {
    let mut s = T::zero();
    for n in 0..field.n_rows() {
        s = s + row_energy(field.row(j, n));
    }
    (T::TAU() * s).sqrt()
}

/// `‖∂_θ f‖_{L²_{M^{-1}}}` on node `j`.
pub fn node_dtheta_l2<T: Real>(field: &SpectralField<T>, j: usize) -> T {
    node_l2(&field.theta_derivative(), j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::equilibrium;
    use crate::grid::{build_grid, NuSpec};
    use std::f64::consts::PI;

    #[test]
    fn single_coefficient() {
        let g = build_grid::<f64>(8, 4, NuSpec::Delta0).unwrap();
        let mut f = SpectralField::zeros(&g, 2.0);
        f.set_real_mode(0, 3, 0, Complex::new(0.5, 0.0));
        assert!((l2_gamma_sq(&f, None, &g) - 2.0 * PI * 0.25).abs() < 1e-15);
        assert!((dissipation(&f, &g) - 1.5 * 2.0 * PI * 0.25).abs() < 1e-15);
    }

    #[test]
    fn equilibrium_has_zero_distance() {
        let g = build_grid::<f64>(8, 4, NuSpec::Delta0).unwrap();
        let e = equilibrium(&g, 1.0, 1.0).unwrap();
        let f = e.field(&g);
        assert_eq!(l2_gamma_sq(&f, Some(&e), &g), 0.0);
        assert_eq!(dissipation(&f, &g), 0.0);
        assert_eq!(density_error_sq(&f, &e, &g), 0.0);
    }
}

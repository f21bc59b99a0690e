//! The Maxwellian kernel and the phase-homogeneous stationary state
//! `f_∞ = N_∞(ν) M(ω, ν)` with `N_∞ = ρ_∞ g`, `ρ_∞ = M₀/(2π)`.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::scalar::Real;
use crate::Complex;

/// `M(ω,ν) = (2πσ̃)^{-1/2} exp(−(ω−ν)²/(2σ̃))`.
pub fn maxwellian<T: Real>(omega: T, nu: T, sigma_t: T) -> T {
    let d = omega - nu;
    (-(d * d) / (sigma_t + sigma_t)).exp() / (T::TAU() * sigma_t).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumState<T> {
    pub total_mass: T,
    pub rho_inf: T,
    pub n_inf: Vec<T>,
    pub sigma_t: T,
    gbar: Vec<T>,
}

/// Equilibrium with total mass `M₀` on `grid`.
pub fn equilibrium<T: Real>(
    grid: &Grid<T>,
    total_mass: T,
    sigma_t: T,
) -> Result<EquilibriumState<T>> {
    if !(total_mass > T::zero()) || !total_mass.is_finite() {
        return Err(Error::InvalidParams(format!(
            "total mass must be positive, got {total_mass}"
        )));
    }
    if !(sigma_t > T::zero()) {
        return Err(Error::InvalidParams(format!(
            "sigma_t must be positive, got {sigma_t}"
        )));
    }
    let rho_inf = total_mass / T::TAU();
    Ok(EquilibriumState {
        total_mass,
        rho_inf,
        n_inf: grid.nodes().iter().map(|n| rho_inf * n.g).collect(),
        sigma_t,
        gbar: grid.nodes().iter().map(|n| n.gbar).collect(),
    })
}

impl<T: Real> EquilibriumState<T> {
    /// Equilibrium matching the mass of an existing field.
    pub fn from_field(field: &SpectralField<T>, grid: &Grid<T>) -> Result<Self> {
        equilibrium(grid, field.total_mass(), field.sigma_t())
    }

    /// `f_∞` as a coefficient field: only `C[j][0][0] = N_∞(ν_j)` is nonzero.
    pub fn field(&self, grid: &Grid<T>) -> SpectralField<T> {
        let mut f = SpectralField::zeros(grid, self.sigma_t);
        for (j, &n) in self.n_inf.iter().enumerate() {
            f.set_real_mode(j, 0, 0, Complex::new(n, T::zero()));
        }
        f
    }

    /// `‖N_∞‖_{L¹} = Σ_j 2π N_∞(ν_j)`.
    pub fn l1_norm(&self) -> T {
        self.n_inf
            .iter()
            .fold(T::zero(), |acc, &n| acc + T::TAU() * n.abs())
    }

    /// `‖N_∞‖_{L²_γ̄} = (Σ_j γ̄_j 2π N_∞(ν_j)²)^{1/2}`.
    pub fn l2_gbar_norm(&self) -> T {
        self.n_inf
            .iter()
            .zip(&self.gbar)
            .fold(T::zero(), |acc, (&n, &w)| acc + w * T::TAU() * n * n)
            .sqrt()
    }

    pub fn gbar(&self) -> &[T] {
        &self.gbar
    }

    /// Fails unless `field` carries the same total mass within `rel_tol`.
    pub fn check_mass(&self, field: &SpectralField<T>, rel_tol: T) -> Result<()> {
        let m = field.total_mass();
        if (m - self.total_mass).abs() > rel_tol * self.total_mass.abs().max(T::one()) {
            return Err(Error::MassMismatch(format!(
                "field mass {m} differs from equilibrium mass {}",
                self.total_mass
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, NuSpec};
    use crate::hermite::GaussHermite;
    use std::f64::consts::PI;

    #[test]
    fn maxwellian_values() {
        assert!((maxwellian(0.0_f64, 0.0, 1.0) - 0.398_942_280_401_432_7).abs() < 1e-15);
        let s: f64 = 2.5;
        let v = maxwellian(1.0 + s.sqrt(), 1.0, s);
        assert!((v - (-0.5f64).exp() / (2.0 * PI * s).sqrt()).abs() < 1e-15);
        // ∫ M dω with ω = ν + √σ̃ x: the Gaussian weight absorbs M·√σ̃·√(2π).
        let q = GaussHermite::new(30).unwrap();
        let total = q.integrate(|x| {
            let w = 0.3 + s.sqrt() * x;
            maxwellian(w, 0.3, s) * s.sqrt() * (2.0 * PI).sqrt() * (x * x / 2.0).exp()
        });
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_values() {
        let g = build_grid::<f64>(8, 4, NuSpec::Delta0).unwrap();
        let e = equilibrium(&g, 2.0 * PI, 1.0).unwrap();
        assert!((e.rho_inf - 1.0).abs() < 1e-15);
        let e = equilibrium(&g, 1.0, 1.0).unwrap();
        let f = e.field(&g);
        assert!((f.get(0, 0, 0).re - 1.0 / (2.0 * PI)).abs() < 1e-16);
        assert!((f.total_mass() - 1.0).abs() < 1e-15);
        assert!((e.l1_norm() - 1.0).abs() < 1e-15);
        assert!((e.l2_gbar_norm() - (1.0 / (2.0 * PI)).sqrt()).abs() < 1e-15);
        assert!(equilibrium(&g, 0.0, 1.0).is_err());
    }
}

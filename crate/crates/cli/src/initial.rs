//! Named families of initial data.

use anyhow::{bail, Result};
use ikfp_core::{equilibrium, Complex, Field64, Grid64, Params64};

use crate::config::{Family, InitialConfig, ModeSpec};

/// Builds the initial field of `spec` on `grid` with total mass `spec.mass`.
///
/// Perturbations are placed on every node with the node's weight `g_j`, so the
/// `ν`-marginals stay proportional to `g`.
pub fn build_initial(spec: &InitialConfig, grid: &Grid64, params: &Params64) -> Result<Field64> {
    let values = [spec.mass, spec.delta, spec.mode.c]
        .into_iter()
        .chain(spec.extra_modes.iter().map(|m| m.c));
    if values.into_iter().any(|v| !v.is_finite()) {
        bail!("initial data parameters must be finite");
    }
    let eq = equilibrium(grid, spec.mass, params.sigma_t())?;
    let mut f = eq.field(grid);
    match spec.family {
        Family::Equilibrium => {}
        Family::CosinePerturbed | Family::WellPrepared => {
            for (j, n_inf) in eq.n_inf.iter().enumerate() {
                f.set_real_mode(j, 0, 1, Complex::new(0.5 * spec.delta * n_inf, 0.0));
            }
        }
        Family::HermiteMode => add_mode(&mut f, grid, &spec.mode)?,
    }
    for m in &spec.extra_modes {
        add_mode(&mut f, grid, m)?;
    }
    f.validate()?;
    Ok(f)
}

fn add_mode(f: &mut Field64, grid: &Grid64, m: &ModeSpec) -> Result<()> {
    if m.n > grid.n_hermite() || m.k.abs() > grid.k_max() {
        bail!("mode (n = {}, k = {}) lies outside the grid", m.n, m.k);
    }
    if m.n == 0 && m.k == 0 {
        bail!("the mass mode cannot be perturbed");
    }
    for (j, node) in grid.nodes().iter().enumerate() {
        let c = f.get(j, m.n, m.k) + Complex::new(m.c * node.g, 0.0);
        f.set_real_mode(j, m.n, m.k, c);
    }
    Ok(())
}

/// `ρ_in(θ) = (M₀/2π)(1 + δ cos θ)` at `n_theta` collocation points; the
/// density behind the `cosine-perturbed` and `well-prepared` families.
pub fn cosine_density(n_theta: usize, mass: f64, delta: f64) -> Vec<f64> {
    let tau = std::f64::consts::TAU;
    (0..n_theta)
        .map(|i| mass / tau * (1.0 + delta * (tau * i as f64 / n_theta as f64).cos()))
        .collect()
}

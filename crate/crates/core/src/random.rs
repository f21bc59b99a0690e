//! Random coefficient fields for property checks.

use rand::Rng;

use crate::equilibrium::EquilibriumState;
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::scalar::Real;
use crate::Complex;

/// Coefficients uniform in `[−1, 1]` scaled by `2^{−n}·2^{−|k|}`, made conjugate
/// symmetric. With `eq` given, each `C[j][0][0]` is set to `N_∞(ν_j)` so the
/// field carries the equilibrium's mass.
pub fn random_field<T: Real, R: Rng + ?Sized>(
    grid: &Grid<T>,
    sigma_t: T,
    eq: Option<&EquilibriumState<T>>,
    rng: &mut R,
) -> SpectralField<T> {
    random_field_scaled(grid, sigma_t, eq, 1.0, rng)
}

/// As [`random_field`] with every non-equilibrium coefficient multiplied by `amplitude`.
pub fn random_field_scaled<T: Real, R: Rng + ?Sized>(
    grid: &Grid<T>,
    sigma_t: T,
    eq: Option<&EquilibriumState<T>>,
    amplitude: f64,
    rng: &mut R,
) -> SpectralField<T> {
    let mut f = SpectralField::zeros(grid, sigma_t);
    let k_max = grid.k_max();
    for j in 0..grid.n_nodes() {
        for n in 0..grid.n_rows() {
            for k in 0..=k_max {
                let decay = amplitude * 0.5f64.powi(n as i32) * 0.5f64.powi(k as i32);
                let re = rng.random_range(-1.0..=1.0) * decay;
                let im = if k == 0 {
                    0.0
                } else {
                    rng.random_range(-1.0..=1.0) * decay
                };
                f.set_real_mode(j, n, k, Complex::new(T::lit(re), T::lit(im)));
            }
        }
        if let Some(e) = eq {
            f.set_real_mode(j, 0, 0, Complex::new(e.n_inf[j], T::zero()));
        }
    }
    f
}

/// Random `ρ`-like Fourier row with the given mean: mode `k ≠ 0` uniform in `[−1,1]·2^{−|k|}·amplitude`.
pub fn random_density_coeffs<T: Real, R: Rng + ?Sized>(
    n_theta: usize,
    mean: T,
    amplitude: f64,
    rng: &mut R,
) -> Vec<Complex<T>> {
    let k_max = n_theta as i64 / 2 - 1;
    let mut row = vec![Complex::new(T::zero(), T::zero()); n_theta];
    row[crate::grid::mode_index(n_theta, 0)] = Complex::new(mean, T::zero());
    for k in 1..=k_max {
        let d = amplitude * 0.5f64.powi(k as i32);
        let c = Complex::new(
            T::lit(rng.random_range(-1.0..=1.0) * d),
            T::lit(rng.random_range(-1.0..=1.0) * d),
        );
        row[crate::grid::mode_index(n_theta, k)] = c;
        row[crate::grid::mode_index(n_theta, -k)] = c.conj();
    }
    row
}

fn indexed_stream(seed: u64, index: usize) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index as u64);
    r
}

/// `count` fields as in [`random_field`], field `i` drawn from its own stream of `seed`.
pub fn random_fields<T: Real>(
    grid: &Grid<T>,
    sigma_t: T,
    eq: Option<&EquilibriumState<T>>,
    count: usize,
    seed: u64,
) -> Vec<SpectralField<T>> {
    (0..count)
        .map(|i| random_field(grid, sigma_t, eq, &mut indexed_stream(seed, i)))
        .collect()
}

/// `count` zero-mean sources `[node][mode]` for the auxiliary elliptic problem.
pub fn random_sources<T: Real>(
    n_theta: usize,
    n_nodes: usize,
    count: usize,
    seed: u64,
) -> Vec<Vec<Vec<Complex<T>>>> {
    (0..count)
        .map(|i| {
            let mut r = indexed_stream(seed, i);
            (0..n_nodes)
                .map(|_| random_density_coeffs(n_theta, T::zero(), 1.0, &mut r))
                .collect()
        })
        .collect()
}

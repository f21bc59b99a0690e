#![allow(dead_code)]

use ikfp_core::grid::mode_of;
use ikfp_core::hermite::{hermite_values, GaussHermite};
use ikfp_core::random::random_field;
use ikfp_core::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const TAU: f64 = std::f64::consts::TAU;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn delta0(n_theta: usize, n_hermite: usize) -> Grid64 {
    build_grid(n_theta, n_hermite, NuSpec::Delta0).unwrap()
}

pub fn three_nodes(n_theta: usize, n_hermite: usize) -> Grid64 {
    build_grid(
        n_theta,
        n_hermite,
        NuSpec::Nodes(vec![
            NuNode::new(-1.0, 0.25, 3.0),
            NuNode::new(0.0, 0.5, 3.0),
            NuNode::new(1.0, 0.25, 3.0),
        ]),
    )
    .unwrap()
}

pub fn uneven_nodes(n_theta: usize, n_hermite: usize) -> Grid64 {
    build_grid(
        n_theta,
        n_hermite,
        NuSpec::Nodes(vec![
            NuNode::new(-0.7, 0.2, 2.0),
            NuNode::new(0.4, 0.5, 5.0),
            NuNode::new(1.5, 0.3, 4.0),
        ]),
    )
    .unwrap()
}

/// Random field with the equilibrium zero mode of the given mass.
pub fn random_with_mass(grid: &Grid64, sigma_t: f64, mass: f64, seed: u64) -> Field64 {
    let eq = equilibrium(grid, mass, sigma_t).unwrap();
    random_field(grid, sigma_t, Some(&eq), &mut rng(seed))
}

/// `f/M` at `(θ, ξ)` on node `j` by direct double summation.
pub fn ratio(field: &Field64, theta: f64, xi: f64, j: usize) -> f64 {
    let h = hermite_values(xi, field.n_hermite());
    let nt = field.n_theta();
    let mut acc = Complex::new(0.0, 0.0);
    for (n, hn) in h.iter().enumerate() {
        for (idx, c) in field.row(j, n).iter().enumerate() {
            let k = mode_of(nt, idx) as f64;
            acc += c * Complex::from_polar(1.0, k * theta) * hn;
        }
    }
    acc.re
}

/// `θ` quadrature points for trapezoid rules.
pub fn theta_points(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

/// `∫∫ φ(θ, ξ) dθ dG(ξ)` with `G` the standard normal law.
pub fn quad2(n_theta: usize, order: usize, mut phi: impl FnMut(f64, f64) -> f64) -> f64 {
    let q = GaussHermite::new(order).unwrap();
    let th = theta_points(n_theta);
    let mut s = 0.0;
    for t in &th {
        for (x, w) in q.nodes.iter().zip(&q.weights) {
            s += w * phi(*t, *x);
        }
    }
    s * TAU / n_theta as f64
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

//! Phase-space discretisation: collocation points in `θ`, Hermite truncation in
//! `ω`, and weighted natural-frequency nodes replacing the continuum in `ν`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One natural-frequency node: frequency `ν_j`, marginal weight `g_j` and
/// velocity-independent weight `γ̄(ν_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuNode<T> {
    pub nu: T,
    pub g: T,
    pub gbar: T,
}

impl<T> NuNode<T> {
    pub fn new(nu: T, g: T, gbar: T) -> Self {
        Self { nu, g, gbar }
    }
}

/// How the `ν` axis is discretised.
#[derive(Debug, Clone, PartialEq)]
pub enum NuSpec<T> {
    /// Identical oscillators, `g = δ_0`.
    Delta0,
    /// Explicit weighted nodes; weights are renormalised on construction.
    Nodes(Vec<NuNode<T>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    n_theta: usize,
    n_hermite: usize,
    nodes: Vec<NuNode<T>>,
    theta: Vec<T>,
}

/// Builds a grid, normalising `Σ g_j = 1` and `Σ 1/γ̄_j = 1`.
pub fn build_grid<T: Real>(n_theta: usize, n_hermite: usize, nu: NuSpec<T>) -> Result<Grid<T>> {
    if n_theta < 4 || !n_theta.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!(
            "n_theta must be even and at least 4, got {n_theta}"
        )));
    }
    if n_hermite < 2 {
        return Err(Error::InvalidGrid(format!(
            "n_hermite must be at least 2, got {n_hermite}"
        )));
    }
    let nodes = match nu {
        NuSpec::Delta0 => vec![NuNode::new(T::zero(), T::one(), T::one())],
        NuSpec::Nodes(raw) => normalise_nodes(raw)?,
    };
    let two_pi = T::TAU();
    let n = T::from_usize_lossy(n_theta);
    let theta = (0..n_theta)
        .map(|i| two_pi * T::from_usize_lossy(i) / n)
        .collect();
    Ok(Grid {
        n_theta,
        n_hermite,
        nodes,
        theta,
    })
}

fn normalise_nodes<T: Real>(raw: Vec<NuNode<T>>) -> Result<Vec<NuNode<T>>> {
    if raw.is_empty() {
        return Err(Error::InvalidGrid(
            "empty natural-frequency node list".into(),
        ));
    }
    for (j, node) in raw.iter().enumerate() {
        if !node.nu.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "node {j}: non-finite frequency"
            )));
        }
        if !(node.g >= T::zero()) || !node.g.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "node {j}: marginal weight must be nonnegative, got {}",
                node.g
            )));
        }
        if !(node.gbar > T::zero()) || !node.gbar.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "node {j}: weight gbar must be positive, got {}",
                node.gbar
            )));
        }
    }
    let g_sum = raw.iter().fold(T::zero(), |acc, n| acc + n.g);
    if !(g_sum > T::zero()) {
        return Err(Error::InvalidGrid("marginal weights sum to zero".into()));
    }
    let inv_sum = raw.iter().fold(T::zero(), |acc, n| acc + n.gbar.recip());
    Ok(raw
        .into_iter()
        .map(|n| NuNode::new(n.nu, n.g / g_sum, n.gbar * inv_sum))
        .collect())
}

impl<T: Real> Grid<T> {
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    /// Hermite truncation order `N_ω`; rows `0..=N_ω` are stored.
    pub fn n_hermite(&self) -> usize {
        self.n_hermite
    }

    pub fn n_rows(&self) -> usize {
        self.n_hermite + 1
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[NuNode<T>] {
        &self.nodes
    }

    pub fn node(&self, j: usize) -> Result<&NuNode<T>> {
        self.nodes.get(j).ok_or(Error::NodeOutOfRange {
            index: j,
            count: self.nodes.len(),
        })
    }

    pub fn theta_points(&self) -> &[T] {
        &self.theta
    }

    pub fn is_single_node(&self) -> bool {
        self.nodes.len() == 1
    }

    pub fn max_abs_nu(&self) -> T {
        self.nodes
            .iter()
            .fold(T::zero(), |acc, n| acc.max(n.nu.abs()))
    }

    /// Largest retained Fourier mode; the Nyquist mode `n_theta/2` is kept at zero.
    pub fn k_max(&self) -> i64 {
        self.n_theta as i64 / 2 - 1
    }

    /// Total number of stored coefficients.
    pub fn len(&self) -> usize {
        self.nodes.len() * self.n_rows() * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Position of Fourier mode `k` in the ascending layout `k = -n/2+1, …, n/2`.
#[inline]
pub fn mode_index(n_theta: usize, k: i64) -> usize {
    (k + n_theta as i64 / 2 - 1) as usize
}

/// Inverse of [`mode_index`].
#[inline]
pub fn mode_of(n_theta: usize, idx: usize) -> i64 {
    idx as i64 - n_theta as i64 / 2 + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta0_is_single_unit_node() {
        let g = build_grid::<f64>(8, 4, NuSpec::Delta0).unwrap();
        assert_eq!(g.nodes(), &[NuNode::new(0.0, 1.0, 1.0)]);
        assert_eq!(g.theta_points().len(), 8);
        assert_eq!(g.theta_points()[2], std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn equal_gbar_nodes_satisfy_reciprocal_sum() {
        let nodes = vec![
            NuNode::new(-1.0, 1.0, 3.0),
            NuNode::new(0.0, 1.0, 3.0),
            NuNode::new(1.0, 1.0, 3.0),
        ];
        let g = build_grid(8, 4, NuSpec::Nodes(nodes)).unwrap();
        let s: f64 = g.nodes().iter().map(|n| 1.0 / n.gbar).sum();
        assert!((s - 1.0).abs() < 1e-15);
        assert!(g.nodes().iter().all(|n| n.gbar == 3.0));
    }

    #[test]
    fn marginal_weights_are_normalised() {
        let nodes = vec![
            NuNode::new(-1.0, 0.25, 1.0),
            NuNode::new(0.0, 0.5, 2.0),
            NuNode::new(1.0, 0.25, 1.0),
        ];
        let g = build_grid(8, 4, NuSpec::Nodes(nodes.clone())).unwrap();
        let s: f64 = g.nodes().iter().map(|n| n.g).sum();
        assert_eq!(s, 1.0);
        let unnormalised: Vec<_> = nodes
            .iter()
            .map(|n| NuNode::new(n.nu, 4.0 * n.g, n.gbar))
            .collect();
        let g2 = build_grid(8, 4, NuSpec::Nodes(unnormalised)).unwrap();
        assert_eq!(g2.nodes()[1].g, 0.5);
        let inv: f64 = g2.nodes().iter().map(|n| 1.0 / n.gbar).sum();
        assert!((inv - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_shapes() {
        assert!(build_grid::<f64>(7, 4, NuSpec::Delta0).is_err());
        assert!(build_grid::<f64>(2, 4, NuSpec::Delta0).is_err());
        assert!(build_grid::<f64>(8, 1, NuSpec::Delta0).is_err());
        assert!(build_grid::<f64>(8, 4, NuSpec::Nodes(vec![])).is_err());
        assert!(build_grid(8, 4, NuSpec::Nodes(vec![NuNode::new(0.0, 1.0, 0.0)])).is_err());
        assert!(build_grid(8, 4, NuSpec::Nodes(vec![NuNode::new(0.0, -1.0, 1.0)])).is_err());
    }

    #[test]
    fn mode_layout_round_trips() {
        for idx in 0..16 {
            assert_eq!(mode_index(16, mode_of(16, idx)), idx);
        }
        assert_eq!(mode_of(16, 0), -7);
        assert_eq!(mode_of(16, 15), 8);
        assert_eq!(mode_index(16, 0), 7);
    }
}

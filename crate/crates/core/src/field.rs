//! Coefficient arrays `C[j][n][k]` and the transforms between them and
//! pointwise densities.

use crate::equilibrium::maxwellian;
use crate::error::{Error, Result};
use crate::fourier::Fourier;
use crate::grid::{mode_index, mode_of, Grid};
use crate::hermite::{hermite_values, GaussHermite};
use crate::scalar::Real;
use crate::Complex;

/// `f(θ,ω,ν_j) = Σ_{n,k} C[j][n][k] e^{ikθ} h_n((ω−ν_j)/√σ̃) M(ω,ν_j)`.
///
/// Modes are stored ascending, `k = -n_theta/2+1, …, n_theta/2`; the last
/// (Nyquist) slot is always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField<T> {
    n_theta: usize,
    n_rows: usize,
    nu: Vec<T>,
    sigma_t: T,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> SpectralField<T> {
    /// Assembles a field from raw parts in `j`-major, then `n`, then ascending-`k` order.
    pub fn from_parts(
        n_theta: usize,
        nu: Vec<T>,
        sigma_t: T,
        coeffs: Vec<Complex<T>>,
    ) -> Result<Self> {
        if n_theta < 4
            || !n_theta.is_multiple_of(2)
            || nu.is_empty()
            || !coeffs.len().is_multiple_of(n_theta * nu.len())
        {
            return Err(Error::Shape(format!(
                "{} coefficients do not fit n_theta = {n_theta} with {} nodes",
                coeffs.len(),
                nu.len()
            )));
        }
        let n_rows = coeffs.len() / (n_theta * nu.len());
        if n_rows < 3 {
            return Err(Error::Shape(format!(
                "{n_rows} Hermite rows, need at least 3"
            )));
        }
        Ok(Self {
            n_theta,
            n_rows,
            nu,
            sigma_t,
            coeffs,
        })
    }

    pub fn zeros(grid: &Grid<T>, sigma_t: T) -> Self {
        Self {
            n_theta: grid.n_theta(),
            n_rows: grid.n_rows(),
            nu: grid.nodes().iter().map(|n| n.nu).collect(),
            sigma_t,
            coeffs: vec![Complex::new(T::zero(), T::zero()); grid.len()],
        }
    }

    /// Same basis as `self`, all coefficients zero.
    pub fn zeros_like(&self) -> Self {
        Self {
            coeffs: vec![Complex::new(T::zero(), T::zero()); self.coeffs.len()],
            ..self.clone()
        }
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_hermite(&self) -> usize {
        self.n_rows - 1
    }

    pub fn n_nodes(&self) -> usize {
        self.nu.len()
    }

    pub fn nu(&self) -> &[T] {
        &self.nu
    }

    pub fn sigma_t(&self) -> T {
        self.sigma_t
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    /// Number of coefficients per `ν` node.
    pub fn node_stride(&self) -> usize {
        self.n_rows * self.n_theta
    }

    #[inline]
    fn offset(&self, j: usize, n: usize) -> usize {
        (j * self.n_rows + n) * self.n_theta
    }

    pub fn row(&self, j: usize, n: usize) -> &[Complex<T>] {
        let o = self.offset(j, n);
        &self.coeffs[o..o + self.n_theta]
    }

    pub fn row_mut(&mut self, j: usize, n: usize) -> &mut [Complex<T>] {
        let o = self.offset(j, n);
        &mut self.coeffs[o..o + self.n_theta]
    }

    pub fn get(&self, j: usize, n: usize, k: i64) -> Complex<T> {
        self.coeffs[self.offset(j, n) + mode_index(self.n_theta, k)]
    }

    /// Sets mode `k` and its conjugate partner `-k`; for `k = 0` only the real
    /// part is kept.
    pub fn set_real_mode(&mut self, j: usize, n: usize, k: i64, c: Complex<T>) {
        let o = self.offset(j, n);
        if k == 0 {
            self.coeffs[o + mode_index(self.n_theta, 0)] = Complex::new(c.re, T::zero());
        } else {
            self.coeffs[o + mode_index(self.n_theta, k)] = c;
            self.coeffs[o + mode_index(self.n_theta, -k)] = c.conj();
        }
    }

    /// Raw write of a single slot, without enforcing reality.
    pub fn set_raw(&mut self, j: usize, n: usize, k: i64, c: Complex<T>) {
        let o = self.offset(j, n) + mode_index(self.n_theta, k);
        self.coeffs[o] = c;
    }

    /// `true` when shapes and basis agree.
    pub fn same_layout(&self, other: &Self) -> bool {
        self.n_theta == other.n_theta
            && self.n_rows == other.n_rows
            && self.nu == other.nu
            && self.sigma_t == other.sigma_t
    }

    fn check_layout(&self, other: &Self) -> Result<()> {
        if self.same_layout(other) {
            Ok(())
        } else {
            Err(Error::Shape("fields use different grids or bases".into()))
        }
    }

    /// `self += a·other`.
    pub fn axpy(&mut self, a: T, other: &Self) -> Result<()> {
        self.check_layout(other)?;
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x = *x + *y * a;
        }
        Ok(())
    }

    pub fn scale(&mut self, a: T) {
        for x in self.coeffs.iter_mut() {
            *x = *x * a;
        }
    }

    /// `self − other`.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-T::one(), other)?;
        Ok(out)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Exact conjugate symmetry with a zero Nyquist slot.
    pub fn is_hermitian(&self) -> bool {
        let nt = self.n_theta;
        self.coeffs.chunks(nt).all(|row| {
            let nyq = row[nt - 1];
            nyq.re == T::zero()
                && nyq.im == T::zero()
                && (0..nt - 1).all(|idx| {
                    let k = mode_of(nt, idx);
                    row[idx] == row[mode_index(nt, -k)].conj()
                })
        })
    }

    /// Finite entries and exact Hermitian symmetry.
    pub fn validate(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::NonFinite { time: f64::NAN });
        }
        if !self.is_hermitian() {
            return Err(Error::Shape("field is not conjugate-symmetric in θ".into()));
        }
        Ok(())
    }

    /// Projects onto the real subspace: averages `C_k` with `conj(C_{-k})` and
    /// clears the Nyquist slot.
    pub fn symmetrize(&mut self) {
        let nt = self.n_theta;
        let half = T::lit(0.5);
        for row in self.coeffs.chunks_mut(nt) {
            row[nt - 1] = Complex::new(T::zero(), T::zero());
            row[mode_index(nt, 0)].im = T::zero();
            for k in 1..(nt as i64 / 2) {
                let (p, m) = (mode_index(nt, k), mode_index(nt, -k));
                let c = (row[p] + row[m].conj()) * half;
                row[p] = c;
                row[m] = c.conj();
            }
        }
    }

    /// Mass carried by node `j`, `∫ f(θ,ω,ν_j) dθ dω = 2π C[j][0][0]`.
    pub fn node_mass(&self, j: usize) -> T {
        T::TAU() * self.get(j, 0, 0).re
    }

    pub fn total_mass(&self) -> T {
        (0..self.n_nodes()).fold(T::zero(), |acc, j| acc + self.node_mass(j))
    }

    /// Coefficients of `∂_θ f`.
    pub fn theta_derivative(&self) -> Self {
        let nt = self.n_theta;
        let mut out = self.clone();
        for row in out.coeffs.chunks_mut(nt) {
            for (idx, c) in row.iter_mut().enumerate() {
                *c = *c * Complex::new(T::zero(), T::from_i64_lossy(mode_of(nt, idx)));
            }
            row[nt - 1] = Complex::new(T::zero(), T::zero());
        }
        out
    }

    /// Converts to another scalar type.
    pub fn cast<U: Real>(&self) -> SpectralField<U> {
        let c = |x: T| U::lit(x.to_f64_lossy());
        SpectralField {
            n_theta: self.n_theta,
            n_rows: self.n_rows,
            nu: self.nu.iter().map(|&v| c(v)).collect(),
            sigma_t: c(self.sigma_t),
            coeffs: self
                .coeffs
                .iter()
                .map(|z| Complex::new(c(z.re), c(z.im)))
                .collect(),
        }
    }
}

/// Projects `f(θ, ω, j)` onto the truncated basis with the default
/// Gauss–Hermite order `2·n_hermite + 8`.
pub fn project<T: Real>(
    f: impl Fn(f64, f64, usize) -> f64,
    grid: &Grid<T>,
    sigma_t: T,
) -> Result<SpectralField<T>> {
    project_with_order(f, grid, sigma_t, 2 * grid.n_hermite() + 8)
}

/// As [`project`] with an explicit quadrature order (at least `2·n_hermite`).
pub fn project_with_order<T: Real>(
    f: impl Fn(f64, f64, usize) -> f64,
    grid: &Grid<T>,
    sigma_t: T,
    order: usize,
) -> Result<SpectralField<T>> {
    let s = sigma_t.to_f64_lossy();
    let sq = s.sqrt();
    project_ratio_with_order(
        |theta, xi, j, nu| {
            let omega = nu + sq * xi;
            f(theta, omega, j) / maxwellian(omega, nu, s)
        },
        grid,
        sigma_t,
        order,
    )
}

/// Projects a function given as `u = f/M` in the scaled variable `ξ = (ω−ν_j)/√σ̃`.
/// The closure receives `(θ, ξ, j, ν_j)`.
pub fn project_ratio_with_order<T: Real>(
    u: impl Fn(f64, f64, usize, f64) -> f64,
    grid: &Grid<T>,
    sigma_t: T,
    order: usize,
) -> Result<SpectralField<T>> {
    let quad = GaussHermite::for_projection(grid.n_hermite(), order)?;
    let nt = grid.n_theta();
    let rows = grid.n_rows();
    let table: Vec<Vec<f64>> = quad
        .nodes
        .iter()
        .map(|&x| hermite_values(x, grid.n_hermite()))
        .collect();
    let theta: Vec<f64> = grid
        .theta_points()
        .iter()
        .map(|t| t.to_f64_lossy())
        .collect();
    let fft = Fourier::<f64>::new(nt);
    let mut field = SpectralField::zeros(grid, sigma_t);
    for (j, node) in grid.nodes().iter().enumerate() {
        let nu = node.nu.to_f64_lossy();
        let mut samples = vec![vec![0.0; nt]; rows];
        for (i, &th) in theta.iter().enumerate() {
            for (q, (&x, &w)) in quad.nodes.iter().zip(&quad.weights).enumerate() {
                let v = w * u(th, x, j, nu);
                for n in 0..rows {
                    samples[n][i] += v * table[q][n];
                }
            }
        }
        for (n, s) in samples.iter().enumerate() {
            let hat = fft.analyze(s);
            for (dst, src) in field.row_mut(j, n).iter_mut().zip(&hat) {
                *dst = Complex::new(T::lit(src.re), T::lit(src.im));
            }
        }
    }
    field.symmetrize();
    if !field.is_finite() {
        return Err(Error::NonFinite { time: 0.0 });
    }
    Ok(field)
}

/// Builds the field `N(θ, ν_j)·M(ω, ν_j)` from samples of `N` per node.
pub fn from_density<T: Real>(
    density: &[Vec<T>],
    grid: &Grid<T>,
    sigma_t: T,
) -> Result<SpectralField<T>> {
    if density.len() != grid.n_nodes() || density.iter().any(|d| d.len() != grid.n_theta()) {
        return Err(Error::Shape("density samples do not match the grid".into()));
    }
    let fft = Fourier::<T>::new(grid.n_theta());
    let mut field = SpectralField::zeros(grid, sigma_t);
    for (j, d) in density.iter().enumerate() {
        let hat = fft.analyze(d);
        field.row_mut(j, 0).copy_from_slice(&hat);
    }
    field.symmetrize();
    Ok(field)
}

/// Pointwise value of the represented density at `(θ, ω, ν_j)`.
pub fn reconstruct<T: Real>(field: &SpectralField<T>, theta: T, omega: T, j: usize) -> Result<T> {
    Ok(reconstruct_complex(field, theta, omega, j)?.re)
}

/// Full complex sum; the imaginary part measures departure from reality.
pub fn reconstruct_complex<T: Real>(
    field: &SpectralField<T>,
    theta: T,
    omega: T,
    j: usize,
) -> Result<Complex<T>> {
    if j >= field.n_nodes() {
        return Err(Error::NodeOutOfRange {
            index: j,
            count: field.n_nodes(),
        });
    }
    let nt = field.n_theta();
    let nu = field.nu()[j];
    let s = field.sigma_t();
    let xi = (omega - nu) / s.sqrt();
    let h = hermite_values(xi, field.n_hermite());
    let phases: Vec<Complex<T>> = (0..nt)
        .map(|idx| Complex::from_polar(T::one(), T::from_i64_lossy(mode_of(nt, idx)) * theta))
        .collect();
    let mut acc = Complex::new(T::zero(), T::zero());
    for (n, hn) in h.iter().enumerate() {
        let row = field.row(j, n);
        let sum = row
            .iter()
            .zip(&phases)
            .fold(Complex::new(T::zero(), T::zero()), |a, (c, p)| a + *c * *p);
        acc = acc + sum * *hn;
    }
    Ok(acc * maxwellian(omega, nu, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, NuNode, NuSpec};
    use std::f64::consts::PI;

    fn three_nodes() -> Grid<f64> {
        build_grid(
            8,
            6,
            NuSpec::Nodes(vec![
                NuNode::new(-1.0, 0.25, 3.0),
                NuNode::new(0.0, 0.5, 3.0),
                NuNode::new(1.0, 0.25, 3.0),
            ]),
        )
        .unwrap()
    }

    #[test]
    fn maxwellian_projects_to_unit_mode() {
        let g = build_grid::<f64>(8, 6, NuSpec::Delta0).unwrap();
        let f = project(|_, w, _| maxwellian(w, 0.0, 1.5), &g, 1.5).unwrap();
        for n in 0..7 {
            for k in -3..=4 {
                let expect = if n == 0 && k == 0 { 1.0 } else { 0.0 };
                assert!((f.get(0, n, k).re - expect).abs() < 1e-13);
                assert!(f.get(0, n, k).im.abs() < 1e-13);
            }
        }
    }

    #[test]
    fn first_moment_weight_projects_to_ladder_value() {
        let g = three_nodes();
        let s = 2.0;
        let f = project(
            |_, w, j| {
                let nu = [-1.0, 0.0, 1.0][j];
                (w - nu) * maxwellian(w, nu, s)
            },
            &g,
            s,
        )
        .unwrap();
        for j in 0..3 {
            assert!((f.get(j, 1, 0).re - s.sqrt()).abs() < 1e-13);
            assert!(f.get(j, 0, 0).re.abs() < 1e-13);
            assert!(f.get(j, 2, 0).re.abs() < 1e-13);
        }
    }

    #[test]
    fn insufficient_order_is_reported() {
        let g = three_nodes();
        let r = project_with_order(|_, _, _| 0.0, &g, 1.0, 11);
        assert!(matches!(r, Err(Error::QuadratureOrder { .. })));
    }

    #[test]
    fn round_trip_in_span() {
        let g = three_nodes();
        let s: f64 = 0.7;
        let nus = [-1.0, 0.0, 1.0];
        let f = |t: f64, w: f64, j: usize| {
            let xi = (w - nus[j]) / s.sqrt();
            let h = hermite_values(xi, 6);
            (0.3 + 0.1 * t.cos() * h[1] - 0.2 * (2.0 * t).sin() * h[3] + 0.05 * h[6])
                * maxwellian(w, nus[j], s)
        };
        let field = project(f, &g, s).unwrap();
        assert!(field.is_hermitian());
        for j in 0..3 {
            for &t in &[0.0, 0.4, 2.9, 5.5] {
                for &w in &[-2.0, -0.3, 0.0, 1.1, 2.5] {
                    let r = reconstruct(&field, t, w, j).unwrap();
                    assert!((r - f(t, w, j)).abs() < 1e-10);
                    assert!(reconstruct_complex(&field, t, w, j).unwrap().im.abs() < 1e-12);
                }
            }
        }
        assert!(reconstruct(&field, 0.0, 0.0, 3).is_err());
    }

    #[test]
    fn zero_field_reconstructs_zero() {
        let g = three_nodes();
        let z = SpectralField::zeros(&g, 1.0);
        assert_eq!(reconstruct(&z, 1.0, 0.5, 1).unwrap(), 0.0);
    }

    #[test]
    fn masses() {
        let g = three_nodes();
        let f = project(
            |t, w, j| {
                (1.0 + 0.5 * t.cos()) / (2.0 * PI)
                    * [0.25, 0.5, 0.25][j]
                    * maxwellian(w, [-1.0, 0.0, 1.0][j], 1.0)
            },
            &g,
            1.0,
        )
        .unwrap();
        assert!((f.total_mass() - 1.0).abs() < 1e-14);
        assert!((f.node_mass(1) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn symmetrize_enforces_reality() {
        let g = three_nodes();
        let mut f = SpectralField::zeros(&g, 1.0);
        f.set_raw(0, 1, 2, Complex::new(1.0, 2.0));
        f.set_raw(0, 1, 4, Complex::new(1.0, 0.0));
        assert!(!f.is_hermitian());
        f.symmetrize();
        assert!(f.is_hermitian());
        assert_eq!(f.get(0, 1, -2), Complex::new(0.5, -1.0));
    }
}

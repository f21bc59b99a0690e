//! The drift-diffusion limit `∂_tρ = σ̃∂²_θρ − κ̃∂_θ((sin∗ρ)ρ)` and the
//! diagnostics comparing it with the rescaled kinetic system.

mod sweep;

pub use sweep::{eps_sweep, EpsSweepResult, SweepOptions};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::fourier::{coupling_coefficient, Fourier};
use crate::grid::{mode_index, mode_of, Grid};
use crate::lab::{poisson_solve_coeffs, Check};
use crate::params::SimParams;
use crate::scalar::Real;
use crate::solver::Trajectory;
use crate::Complex;

/// Fourier coefficients of `ρ(θ)` in ascending layout, with the current time.
#[derive(Debug, Clone, PartialEq)]
pub struct DdState<T> {
    pub rho_hat: Vec<Complex<T>>,
    pub time: f64,
}

impl<T: Real> DdState<T> {
    pub fn new(mut rho_hat: Vec<Complex<T>>) -> Self {
        let nt = rho_hat.len();
        rho_hat[nt - 1] = Complex::new(T::zero(), T::zero());
        Self { rho_hat, time: 0.0 }
    }

    pub fn from_samples(rho: &[T]) -> Self {
        Self::new(Fourier::new(rho.len()).analyze(rho))
    }

    /// Density row `C[0][0][·]` of a single-node field.
    pub fn from_field(field: &SpectralField<T>) -> Self {
        Self::new(field.row(0, 0).to_vec())
    }

    pub fn samples(&self) -> Vec<T> {
        Fourier::new(self.rho_hat.len()).synthesize(&self.rho_hat)
    }

    pub fn mass(&self) -> T {
        T::TAU() * self.rho_hat[mode_index(self.rho_hat.len(), 0)].re
    }

    pub fn n_theta(&self) -> usize {
        self.rho_hat.len()
    }
}

/// `−κ̃ ik ((sin∗ρ)ρ)_k`, truncated to the retained band.
fn flux<T: Real>(rho: &[Complex<T>], kappa_t: T, out: &mut [Complex<T>]) {
    let nt = rho.len();
    let k_max = nt as i64 / 2 - 1;
    let s1 = coupling_coefficient(rho[mode_index(nt, 1)]);
    let sm1 = s1.conj();
    for (idx, o) in out.iter_mut().enumerate() {
        let k = mode_of(nt, idx);
        if k > k_max {
            *o = Complex::new(T::zero(), T::zero());
            continue;
        }
        let mut p = Complex::new(T::zero(), T::zero());
        if k > -k_max {
            p = p + s1 * rho[idx - 1];
        }
        if k < k_max {
            p = p + sm1 * rho[idx + 1];
        }
        let kf = T::from_i64_lossy(k) * kappa_t;
        *o = Complex::new(p.im * kf, -p.re * kf);
    }
}

fn heat<T: Real>(rho: &mut [Complex<T>], sigma_t: T, h: T) {
    let nt = rho.len();
    for (idx, c) in rho.iter_mut().enumerate() {
        let k = T::from_i64_lossy(mode_of(nt, idx));
        if k != T::zero() {
            *c = *c * (-sigma_t * k * k * h).exp();
        }
    }
}

fn enforce_reality<T: Real>(rho: &mut [Complex<T>]) {
    let nt = rho.len();
    rho[nt - 1] = Complex::new(T::zero(), T::zero());
    rho[mode_index(nt, 0)].im = T::zero();
    let half = T::lit(0.5);
    for k in 1..(nt as i64 / 2) {
        let (p, m) = (mode_index(nt, k), mode_index(nt, -k));
        let c = (rho[p] + rho[m].conj()) * half;
        rho[p] = c;
        rho[m] = c.conj();
    }
}

/// One integrating-factor Heun step: the heat semigroup is exact, the
/// coupling flux is second-order explicit.
pub fn dd_step<T: Real>(state: &DdState<T>, params: &SimParams<T>, dt: T) -> Result<DdState<T>> {
    if !(dt > T::zero()) {
        return Err(Error::InvalidConfig(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let nt = state.n_theta();
    let (s, kt) = (params.sigma_t(), params.kappa_t());
    let u = &state.rho_hat;
    let mut n0 = vec![Complex::new(T::zero(), T::zero()); nt];
    flux(u, kt, &mut n0);
    let mut u1: Vec<Complex<T>> = u.iter().zip(&n0).map(|(a, b)| *a + *b * dt).collect();
    heat(&mut u1, s, dt);
    let mut n1 = vec![Complex::new(T::zero(), T::zero()); nt];
    flux(&u1, kt, &mut n1);
    let half = dt * T::lit(0.5);
    let mut next: Vec<Complex<T>> = u.iter().zip(&n0).map(|(a, b)| *a + *b * half).collect();
    heat(&mut next, s, dt);
    for (x, y) in next.iter_mut().zip(&n1) {
        *x = *x + *y * half;
    }
    enforce_reality(&mut next);
    Ok(DdState {
        rho_hat: next,
        time: state.time + dt.to_f64_lossy(),
    })
}

/// Integrates to `t_final` with steps no longer than `dt`.
pub fn dd_run<T: Real>(
    rho_in: &DdState<T>,
    params: &SimParams<T>,
    t_final: f64,
    dt: f64,
) -> Result<DdState<T>> {
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "need dt > 0 and t_final >= 0, got {dt}, {t_final}"
        )));
    }
    let n = (t_final / dt * (1.0 - 1e-12)).ceil() as usize;
    let mut state = rho_in.clone();
    if n == 0 {
        return Ok(state);
    }
    let h = t_final / n as f64;
    for s in 1..=n {
        state = dd_step(&state, params, T::lit(h))?;
        state.time = if s == n {
            rho_in.time + t_final
        } else {
            rho_in.time + s as f64 * h
        };
        if state
            .rho_hat
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite { time: state.time });
        }
    }
    Ok(state)
}

/// `‖f − ρM‖_{L²_{M^{-1}}} = (2π Σ_{n≥1} Σ_k |C[0][n][k]|²)^{1/2}`.
pub fn micro_distance<T: Real>(field: &SpectralField<T>, grid: &Grid<T>) -> Result<T> {
    if !grid.is_single_node() || field.n_nodes() != 1 {
        return Err(Error::MultiNodeGrid(grid.n_nodes()));
    }
    let mut s = T::zero();
    for n in 1..field.n_rows() {
        s = s + field
            .row(0, n)
            .iter()
            .fold(T::zero(), |acc, c| acc + c.norm_sqr());
    }
    Ok((T::TAU() * s).sqrt())
}

/// `A = ½‖∂_θ v‖²_{L²}` with `∂²_θ v = ρ − ρ^ε + ε∂_θJ^ε`, from coefficient rows.
/// `ε = 0` is accepted.
pub fn functional_a_eps_coeffs<T: Real>(
    rho_eps: &[Complex<T>],
    j_eps: &[Complex<T>],
    rho: &[Complex<T>],
    eps: T,
) -> Result<T> {
    let nt = rho.len();
    if rho_eps.len() != nt || j_eps.len() != nt {
        return Err(Error::Shape("density rows differ in length".into()));
    }
    let z = mode_index(nt, 0);
    let diff = rho[z].re - rho_eps[z].re;
    let scale = rho[z]
        .re
        .abs()
        .max(rho_eps[z].re.abs())
        .max(T::min_positive_value());
    if diff.abs() > T::lit(1e-10) * scale {
        return Err(Error::MassMismatch(format!(
            "limit density mass {} differs from kinetic density mass {}",
            T::TAU() * rho[z].re,
            T::TAU() * rho_eps[z].re
        )));
    }
    let source: Vec<Complex<T>> = (0..nt)
        .map(|idx| {
            if idx == z {
                return Complex::new(T::zero(), T::zero());
            }
            let ik = Complex::new(T::zero(), T::from_i64_lossy(mode_of(nt, idx)));
            rho[idx] - rho_eps[idx] + ik * j_eps[idx] * eps
        })
        .collect();
    let pot = poisson_solve_coeffs(&[source])?;
    let e = pot.dv[0]
        .iter()
        .fold(T::zero(), |acc, c| acc + c.norm_sqr());
    Ok(T::lit(0.5) * T::TAU() * e)
}

/// [`functional_a_eps_coeffs`] for a rescaled kinetic field and a limit state.
pub fn functional_a_eps<T: Real>(
    field: &SpectralField<T>,
    rho_dd: &DdState<T>,
    params: &SimParams<T>,
    grid: &Grid<T>,
) -> Result<T> {
    if !grid.is_single_node() {
        return Err(Error::MultiNodeGrid(grid.n_nodes()));
    }
    let eps = params
        .epsilon()
        .ok_or_else(|| Error::InvalidParams("functional requires epsilon".into()))?;
    let sq = field.sigma_t().sqrt();
    let j: Vec<Complex<T>> = field.row(0, 1).iter().map(|c| *c * sq).collect();
    functional_a_eps_coeffs(field.row(0, 0), &j, &rho_dd.rho_hat, eps)
}

/// Upper and lower bands for `A` in terms of the density error and `‖∂_θ f‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma4Row {
    /// `A ≤ err² + σ̃ C_P² ε² d²`.
    pub upper: Check,
    /// `¼err² − σ̃ C_P² (ε²/2) d² ≤ A`.
    pub lower: Check,
}

impl Lemma4Row {
    pub fn holds(&self, slack: f64) -> bool {
        self.upper.holds(slack) && self.lower.holds(slack)
    }
}

/// Band check with explicit `σ̃` and `ε ≥ 0`; `err` must use the homogeneous `H^{-1}` norm.
pub fn lemma4_bounds(a: f64, err: f64, d: f64, sigma_t: f64, eps: f64) -> Lemma4Row {
    let cp2 = crate::lab::POINCARE_CONSTANT * crate::lab::POINCARE_CONSTANT;
    Lemma4Row {
        upper: Check {
            lhs: a,
            rhs: err * err + sigma_t * cp2 * eps * eps * d * d,
        },
        lower: Check {
            lhs: 0.25 * err * err - sigma_t * cp2 * 0.5 * eps * eps * d * d,
            rhs: a,
        },
    }
}

pub fn lemma4_check<T: Real>(
    a: T,
    err_hm1: T,
    dtheta_f_norm: T,
    params: &SimParams<T>,
) -> Result<Lemma4Row> {
    let eps = params
        .epsilon()
        .ok_or_else(|| Error::InvalidParams("check requires epsilon".into()))?;
    Ok(lemma4_bounds(
        a.to_f64_lossy(),
        err_hm1.to_f64_lossy(),
        dtheta_f_norm.to_f64_lossy(),
        params.sigma_t().to_f64_lossy(),
        eps.to_f64_lossy(),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropL2Report {
    pub growth_rate: f64,
    /// `(t, ‖f‖ + ‖∂_θ f‖, (‖∂_θ f_in‖ + 3‖f_in‖) e^{Ct})`.
    pub rows: Vec<(f64, f64, f64)>,
}

impl PropL2Report {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|(_, l, r)| l > r).count()
    }

    pub fn holds(&self) -> bool {
        self.violations() == 0
    }

    pub fn worst_ratio(&self) -> f64 {
        self.rows.iter().map(|(_, l, r)| l / r).fold(0.0, f64::max)
    }
}

/// Checks `‖f‖ + ‖∂_θ f‖ ≤ (‖∂_θ f_in‖ + 3‖f_in‖) e^{Ct}`, `C = (κ̃M₀)²/σ̃`, at every sample.
pub fn prop_l2_check<T: Real>(traj: &Trajectory<T>, params: &SimParams<T>) -> Result<PropL2Report> {
    let first = traj
        .samples
        .first()
        .ok_or_else(|| Error::InvalidConfig("empty trajectory".into()))?;
    let r0 = first
        .rescaled
        .ok_or_else(|| Error::InvalidConfig("trajectory lacks rescaled columns".into()))?;
    let mass = first.mass.to_f64_lossy();
    let km = params.kappa_t().to_f64_lossy() * mass;
    let c = km * km / params.sigma_t().to_f64_lossy();
    let base = r0.dtheta_f_norm.to_f64_lossy() + 3.0 * r0.f_norm.to_f64_lossy();
    let rows = traj
        .samples
        .iter()
        .filter_map(|s| {
            s.rescaled.map(|r| {
                (
                    s.t,
                    r.f_norm.to_f64_lossy() + r.dtheta_f_norm.to_f64_lossy(),
                    base * (c * s.t).exp(),
                )
            })
        })
        .collect();
    Ok(PropL2Report {
        growth_rate: c,
        rows,
    })
}

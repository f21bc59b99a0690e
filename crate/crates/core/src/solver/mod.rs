//! Time integration of the kinetic system and of its diffusively rescaled form
//! in Fourier–Hermite coefficient space.
//!
//! The Fokker–Planck part is diagonal (`−n/m` on Hermite level `n`) and is
//! integrated exactly; transport and the mean-field force are explicit.

mod dynamics;
mod residual;
mod trajectory;

use std::str::FromStr;

pub use dynamics::Dynamics;
pub use residual::{closure_defect, moment_balance_residual, MomentResidual};
pub use trajectory::{EnergySample, RescaledSample, Trajectory, CSV_HEADER, CSV_HEADER_RESCALED};

use crate::equilibrium::EquilibriumState;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::lab::{default_alpha, functional_a};
use crate::norms::{density_error_sq, dissipation, l2_gamma_sq, node_dtheta_l2, node_l2};
use crate::params::SimParams;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Strang splitting: exact relaxation half-steps around a Heun step.
    ExpSplitRk2,
    /// Integrating-factor (Lawson) fourth-order Runge–Kutta.
    ExpSplitRk4,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::ExpSplitRk2 => "exponential-splitting-RK2",
            Scheme::ExpSplitRk4 => "exponential-splitting-RK4",
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exponential-splitting-RK2" | "rk2" => Ok(Scheme::ExpSplitRk2),
            "exponential-splitting-RK4" | "rk4" => Ok(Scheme::ExpSplitRk4),
            other => Err(Error::InvalidConfig(format!("unknown scheme '{other}'"))),
        }
    }
}

/// What to do when `dt` exceeds the transport stability bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CflPolicy {
    Refuse,
    Warn,
}

impl FromStr for CflPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "refuse" => Ok(CflPolicy::Refuse),
            "warn" => Ok(CflPolicy::Warn),
            other => Err(Error::InvalidConfig(format!(
                "unknown CFL policy '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    /// Steps between diagnostic samples.
    pub stride: usize,
    pub cfl_constant: f64,
    pub cfl_policy: CflPolicy,
    /// Steps between stored field snapshots; `None` keeps only the final field.
    pub snapshot_stride: Option<usize>,
}

impl SolverConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        Self {
            dt,
            t_final,
            scheme: Scheme::ExpSplitRk4,
            stride: 1,
            cfl_constant: 0.5,
            cfl_policy: CflPolicy::Refuse,
            snapshot_stride: None,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn with_cfl_policy(mut self, policy: CflPolicy) -> Self {
        self.cfl_policy = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_final >= self.dt) || !self.t_final.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "t_final must be at least dt, got t_final = {} with dt = {}",
                self.t_final, self.dt
            )));
        }
        if self.stride == 0 {
            return Err(Error::InvalidConfig("stride must be at least 1".into()));
        }
        if !(self.cfl_constant > 0.0) {
            return Err(Error::InvalidConfig("cfl_constant must be positive".into()));
        }
        if self.snapshot_stride == Some(0) {
            return Err(Error::InvalidConfig(
                "snapshot_stride must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Number of steps and the uniform step that lands exactly on `t_final`.
    pub fn time_grid(&self) -> (usize, f64) {
        let n = (self.t_final / self.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        (n, self.t_final / n as f64)
    }
}

/// Largest stable `dt` for transport: `c·(2π/n_θ)/(|ν|_max + √(2σ̃ N_ω))`, divided by the transport multiplier.
pub fn cfl_limit<T: Real>(grid: &Grid<T>, dynamics: &Dynamics<T>, c: f64) -> f64 {
    let speed = grid.max_abs_nu().to_f64_lossy()
        + (2.0 * dynamics.sigma_t.to_f64_lossy() * grid.n_hermite() as f64).sqrt();
    c * (std::f64::consts::TAU / grid.n_theta() as f64) / speed / dynamics.transport.to_f64_lossy()
}

fn check_cfl<T: Real>(
    grid: &Grid<T>,
    dynamics: &Dynamics<T>,
    dt: f64,
    c: f64,
    policy: CflPolicy,
) -> Result<()> {
    let limit = cfl_limit(grid, dynamics, c);
    if dt > limit * (1.0 + 1e-12) {
        match policy {
            CflPolicy::Refuse => return Err(Error::Cfl { dt, limit }),
            CflPolicy::Warn => log::warn!("time step {dt} exceeds stability bound {limit}"),
        }
    }
    Ok(())
}

/// Time derivative of the kinetic system.
pub fn rhs<T: Real>(field: &SpectralField<T>, params: &SimParams<T>) -> SpectralField<T> {
    Dynamics::kinetic(params).rhs(field)
}

/// Reusable stage buffers for one integration.
pub struct Stepper<T: Real> {
    dynamics: Dynamics<T>,
    scheme: Scheme,
    k: [SpectralField<T>; 4],
    stage: SpectralField<T>,
    base: SpectralField<T>,
}

impl<T: Real> Stepper<T> {
    pub fn new(dynamics: Dynamics<T>, scheme: Scheme, like: &SpectralField<T>) -> Self {
        let z = like.zeros_like();
        Self {
            dynamics,
            scheme,
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            stage: z.clone(),
            base: z,
        }
    }

    pub fn dynamics(&self) -> &Dynamics<T> {
        &self.dynamics
    }

    /// Advances `u` by `h` in place.
    pub fn advance(&mut self, u: &mut SpectralField<T>, h: T) {
        match self.scheme {
            Scheme::ExpSplitRk2 => self.strang(u, h),
            Scheme::ExpSplitRk4 => self.lawson4(u, h),
        }
        u.symmetrize();
    }

    fn strang(&mut self, u: &mut SpectralField<T>, h: T) {
        let half = h * T::lit(0.5);
        let d = self.dynamics;
        d.relax(u, half);
        d.nonlinear(u, &mut self.k[0]);
        self.stage.coeffs_mut().copy_from_slice(u.coeffs());
        axpy(&mut self.stage, h, &self.k[0]);
        d.nonlinear(&self.stage, &mut self.k[1]);
        axpy(u, half, &self.k[0]);
        axpy(u, half, &self.k[1]);
        d.relax(u, half);
    }

    fn lawson4(&mut self, u: &mut SpectralField<T>, h: T) {
        let half = h * T::lit(0.5);
        let sixth = h / T::lit(6.0);
        let d = self.dynamics;
        // k0 = N(u)
        d.nonlinear(u, &mut self.k[0]);
        // U2 = E(h/2)(u + h/2 k0)
        copy(&mut self.stage, u);
        axpy(&mut self.stage, half, &self.k[0]);
        d.relax(&mut self.stage, half);
        d.nonlinear(&self.stage, &mut self.k[1]);
        // base = E(h/2) u; U3 = base + h/2 N(U2)
        copy(&mut self.base, u);
        d.relax(&mut self.base, half);
        copy(&mut self.stage, &self.base);
        axpy(&mut self.stage, half, &self.k[1]);
        d.nonlinear(&self.stage, &mut self.k[2]);
        // U4 = E(h)u + h E(h/2) N(U3); k2 is replaced by E(h/2) N(U3)
        d.relax(&mut self.k[2], half);
        copy(&mut self.stage, &self.base);
        d.relax(&mut self.stage, half);
        axpy(&mut self.stage, h, &self.k[2]);
        d.nonlinear(&self.stage, &mut self.k[3]);
        // u ← E(h)(u + h/6 k0) + h/3 E(h/2)k1 + h/3 E(h/2)N(U3) + h/6 k3
        axpy(u, sixth, &self.k[0]);
        d.relax(u, half);
        axpy(u, sixth + sixth, &self.k[1]);
        d.relax(u, half);
        axpy(u, sixth + sixth, &self.k[2]);
        axpy(u, sixth, &self.k[3]);
    }
}

fn copy<T: Real>(dst: &mut SpectralField<T>, src: &SpectralField<T>) {
    dst.coeffs_mut().copy_from_slice(src.coeffs());
}

fn axpy<T: Real>(dst: &mut SpectralField<T>, a: T, x: &SpectralField<T>) {
    for (d, s) in dst.coeffs_mut().iter_mut().zip(x.coeffs()) {
        *d = *d + *s * a;
    }
}

/// One step of the kinetic system, after a stability check.
pub fn step<T: Real>(
    field: &SpectralField<T>,
    params: &SimParams<T>,
    grid: &Grid<T>,
    dt: T,
    scheme: Scheme,
    policy: CflPolicy,
) -> Result<SpectralField<T>> {
    let dynamics = Dynamics::kinetic(params);
    check_cfl(grid, &dynamics, dt.to_f64_lossy(), 0.5, policy)?;
    let mut out = field.clone();
    Stepper::new(dynamics, scheme, field).advance(&mut out, dt);
    Ok(out)
}

fn sample<T: Real>(
    t: f64,
    field: &SpectralField<T>,
    grid: &Grid<T>,
    eq: &EquilibriumState<T>,
    alpha: T,
    rescaled: bool,
) -> Result<EnergySample<T>> {
    let l2 = l2_gamma_sq(field, Some(eq), grid);
    let a = functional_a(field, eq, grid)?;
    let micro = rescaled.then(|| {
        let mut m = T::zero();
        for n in 1..field.n_rows() {
            m = m + field
                .row(0, n)
                .iter()
                .fold(T::zero(), |acc, c| acc + c.norm_sqr());
        }
        RescaledSample {
            micro_err: (T::TAU() * m).sqrt(),
            f_norm: node_l2(field, 0),
            dtheta_f_norm: node_dtheta_l2(field, 0),
        }
    });
    Ok(EnergySample {
        t,
        mass: field.total_mass(),
        l2gamma_sq: l2,
        dissipation: dissipation(field, grid),
        a,
        energy: T::lit(0.5) * l2 + alpha * a,
        n_err_sq: density_error_sq(field, eq, grid),
        rescaled: micro,
    })
}

fn integrate<T: Real>(
    initial: &SpectralField<T>,
    grid: &Grid<T>,
    config: &SolverConfig,
    eq: &EquilibriumState<T>,
    dynamics: Dynamics<T>,
    alpha: T,
    rescaled: bool,
    observer: &mut dyn FnMut(f64, &SpectralField<T>),
) -> Result<Trajectory<T>> {
    config.validate()?;
    initial.validate()?;
    if initial.n_theta() != grid.n_theta()
        || initial.n_nodes() != grid.n_nodes()
        || initial.n_rows() != grid.n_rows()
    {
        return Err(Error::Shape("initial field does not match grid".into()));
    }
    eq.check_mass(initial, T::lit(1e-8))?;
    let (n_steps, h) = config.time_grid();
    check_cfl(grid, &dynamics, h, config.cfl_constant, config.cfl_policy)?;
    let mut stepper = Stepper::new(dynamics, config.scheme, initial);
    let mut u = initial.clone();
    let mut traj = Trajectory::new();
    traj.push_sample(sample(0.0, &u, grid, eq, alpha, rescaled)?);
    if config.snapshot_stride.is_some() {
        traj.snapshots.push((0.0, u.clone()));
    }
    observer(0.0, &u);
    let ht = T::lit(h);
    for s in 1..=n_steps {
        stepper.advance(&mut u, ht);
        let t = if s == n_steps {
            config.t_final
        } else {
            s as f64 * h
        };
        if !u.is_finite() {
            return Err(Error::NonFinite { time: t });
        }
        observer(t, &u);
        if s % config.stride == 0 || s == n_steps {
            traj.push_sample(sample(t, &u, grid, eq, alpha, rescaled)?);
        }
        if let Some(k) = config.snapshot_stride {
            if s % k == 0 || s == n_steps {
                traj.snapshots.push((t, u.clone()));
            }
        }
    }
    traj.final_field = Some(u);
    Ok(traj)
}

/// Integrates the kinetic system to `t_final`, sampling diagnostics every `stride` steps.
pub fn run<T: Real>(
    initial: &SpectralField<T>,
    params: &SimParams<T>,
    grid: &Grid<T>,
    config: &SolverConfig,
    eq: &EquilibriumState<T>,
) -> Result<Trajectory<T>> {
    run_observed(initial, params, grid, config, eq, &mut |_, _| {})
}

/// [`run`] with a callback invoked on the field after every step.
pub fn run_observed<T: Real>(
    initial: &SpectralField<T>,
    params: &SimParams<T>,
    grid: &Grid<T>,
    config: &SolverConfig,
    eq: &EquilibriumState<T>,
    observer: &mut dyn FnMut(f64, &SpectralField<T>),
) -> Result<Trajectory<T>> {
    let alpha = default_alpha(params);
    integrate(
        initial,
        grid,
        config,
        eq,
        Dynamics::kinetic(params),
        alpha,
        false,
        observer,
    )
}

/// Integrates the rescaled system with mass `ε` for identical oscillators.
pub fn run_rescaled<T: Real>(
    initial: &SpectralField<T>,
    params: &SimParams<T>,
    grid: &Grid<T>,
    config: &SolverConfig,
) -> Result<Trajectory<T>> {
    run_rescaled_observed(initial, params, grid, config, &mut |_, _| {})
}

pub fn run_rescaled_observed<T: Real>(
    initial: &SpectralField<T>,
    params: &SimParams<T>,
    grid: &Grid<T>,
    config: &SolverConfig,
    observer: &mut dyn FnMut(f64, &SpectralField<T>),
) -> Result<Trajectory<T>> {
    if !grid.is_single_node() {
        return Err(Error::MultiNodeGrid(grid.n_nodes()));
    }
    let eps = params
        .epsilon()
        .ok_or_else(|| Error::InvalidParams("rescaled run requires epsilon".into()))?;
    let eq = EquilibriumState::from_field(initial, grid)?;
    let as_mass = SimParams::from_rescaled(eps, params.kappa_t(), params.sigma_t())?;
    let alpha = default_alpha(&as_mass);
    integrate(
        initial,
        grid,
        config,
        &eq,
        Dynamics::rescaled(params),
        alpha,
        true,
        observer,
    )
}

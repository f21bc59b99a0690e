use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::fourier::{hminus1_coeffs, hminus1_homogeneous_coeffs};
use crate::grid::Grid;
use crate::lab::linear_fit;
use crate::params::SimParams;
use crate::scalar::Real;
use crate::solver::{cfl_limit, run_rescaled, Dynamics, Scheme, SolverConfig};
use crate::Complex;

use super::{dd_run, micro_distance, DdState};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub scheme: Scheme,
    pub cfl_constant: f64,
    /// Kinetic step is `min(CFL bound, layer_factor·ε²)`.
    pub layer_factor: f64,
    /// Step of the limit solver.
    pub dd_dt: f64,
    /// Step count above which a warning is logged.
    pub step_budget: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            scheme: Scheme::ExpSplitRk4,
            cfl_constant: 0.5,
            layer_factor: 0.25,
            dd_dt: 1e-4,
            step_budget: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsSweepResult {
    pub eps_values: Vec<f64>,
    /// `‖ρ^ε(T) − ρ(T)‖_{H^{-1}}`, Bessel-potential convention.
    pub errors_hminus1: Vec<f64>,
    /// The same difference in the homogeneous convention.
    pub errors_hminus1_homogeneous: Vec<f64>,
    /// `‖f^ε(T) − ρ^ε(T) M‖_{L²_{M^{-1}}}`.
    pub micro_errors: Vec<f64>,
    pub steps: Vec<usize>,
    /// Log-log slope of `errors_hminus1` against `ε`.
    pub fitted_slope: f64,
    pub fit_r_squared: f64,
    pub prefactor: f64,
    pub micro_slope: f64,
    pub micro_r_squared: f64,
    pub convention: &'static str,
}

impl EpsSweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,err_hminus1,micro_err,err_hminus1_homogeneous,steps\n");
        for i in 0..self.eps_values.len() {
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e},{}\n",
                self.eps_values[i],
                self.errors_hminus1[i],
                self.micro_errors[i],
                self.errors_hminus1_homogeneous[i],
                self.steps[i]
            ));
        }
        out
    }

    /// Errors nonincreasing as `ε` decreases, up to a relative slack.
    pub fn monotone(&self, slack: f64) -> bool {
        let ok = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack));
        ok(&self.errors_hminus1) && ok(&self.micro_errors)
    }

    pub fn summary(&self) -> String {
        format!(
            "{{ convention: \"{}\", slope: {:.6}, r_squared: {:.6}, prefactor: {:.6e}, micro_slope: {:.6}, micro_r_squared: {:.6} }}",
            self.convention, self.fitted_slope, self.fit_r_squared, self.prefactor, self.micro_slope, self.micro_r_squared
        )
    }
}

/// Runs the rescaled system from well-prepared data `ρ_in M` for every `ε`
/// (concurrently, assembled in input order) and compares with the limit at `T`.
pub fn eps_sweep<T: Real>(
    rho_in: &[Complex<T>],
    params: &SimParams<T>,
    t_final: f64,
    eps_list: &[f64],
    grid: &Grid<T>,
    options: &SweepOptions,
) -> Result<EpsSweepResult> {
    if !grid.is_single_node() {
        return Err(Error::MultiNodeGrid(grid.n_nodes()));
    }
    if rho_in.len() != grid.n_theta() {
        return Err(Error::Shape("initial density does not match grid".into()));
    }
    if eps_list.len() < 2
        || eps_list.windows(2).any(|w| !(w[1] < w[0]))
        || eps_list.iter().any(|e| !(*e > 0.0))
    {
        return Err(Error::InvalidConfig(
            "epsilon list must hold two or more strictly decreasing positive values".into(),
        ));
    }
    let mut initial = SpectralField::zeros(grid, params.sigma_t());
    initial.row_mut(0, 0).copy_from_slice(rho_in);
    initial.symmetrize();
    let limit = dd_run(
        &DdState::new(initial.row(0, 0).to_vec()),
        params,
        t_final,
        options.dd_dt,
    )?;

    let runs = eps_list
        .par_iter()
        .map(|&eps| {
            let p = SimParams::from_rescaled(T::lit(eps), params.kappa_t(), params.sigma_t())?
                .with_epsilon(T::lit(eps))?;
            let bound = cfl_limit(grid, &Dynamics::rescaled(&p), options.cfl_constant);
            let dt = bound.min(options.layer_factor * eps * eps).min(t_final);
            let mut cfg = SolverConfig::new(dt, t_final).with_scheme(options.scheme);
            cfg.cfl_constant = options.cfl_constant;
            let (steps, _) = cfg.time_grid();
            cfg.stride = steps;
            if steps > options.step_budget {
                log::warn!(
                    "epsilon {eps}: {steps} steps exceed the budget of {}",
                    options.step_budget
                );
            }
            let traj = run_rescaled(&initial, &p, grid, &cfg)?;
            let f = traj.final_field();
            let diff: Vec<Complex<T>> = f
                .row(0, 0)
                .iter()
                .zip(&limit.rho_hat)
                .map(|(a, b)| *a - *b)
                .collect();
            Ok((
                hminus1_coeffs(&diff).to_f64_lossy(),
                hminus1_homogeneous_coeffs(&diff).to_f64_lossy(),
                micro_distance(f, grid)?.to_f64_lossy(),
                steps,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let errors_hminus1: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let log_eps: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let safe_ln = |v: f64| v.max(f64::MIN_POSITIVE).ln();
    let fit = linear_fit(
        &log_eps,
        &errors_hminus1
            .iter()
            .map(|v| safe_ln(*v))
            .collect::<Vec<_>>(),
    )?;
    let micro: Vec<f64> = runs.iter().map(|r| r.2).collect();
    let mfit = linear_fit(
        &log_eps,
        &micro.iter().map(|v| safe_ln(*v)).collect::<Vec<_>>(),
    )?;
    Ok(EpsSweepResult {
        eps_values: eps_list.to_vec(),
        errors_hminus1,
        errors_hminus1_homogeneous: runs.iter().map(|r| r.1).collect(),
        micro_errors: micro,
        steps: runs.iter().map(|r| r.3).collect(),
        fitted_slope: fit.slope,
        fit_r_squared: fit.r_squared,
        prefactor: fit.intercept.exp(),
        micro_slope: mfit.slope,
        micro_r_squared: mfit.r_squared,
        convention: "bessel",
    })
}

//! Runs one configured experiment and writes its artifacts.
//!
//! Every file goes through [`Artifacts`], which records a SHA-256 of the bytes
//! written; the manifest written last lists all of them.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use ikfp_core::lab::{
    fit_decay_rate, inequality_battery, poisson_solve_coeffs, regime_check, DecayFit,
    POINCARE_CONSTANT,
};
use ikfp_core::limit::{dd_run, eps_sweep, prop_l2_check, DdState, SweepOptions};
use ikfp_core::moments::density_coeffs;
use ikfp_core::particles::{
    compare_to_kinetic, empirical_density, kinetic_bin_averages, order_parameter, sample_initial,
    simulate, InitialLaw, ParticleEnsemble,
};
use ikfp_core::random::{random_fields, random_sources};
use ikfp_core::snapshot::{write_snapshot, write_snapshot_csv};
use ikfp_core::solver::{
    cfl_limit, run_observed, run_rescaled, Dynamics, SolverConfig, CSV_HEADER,
};
use ikfp_core::{
    build_grid, equilibrium, Complex, EquilibriumState, Field64, Grid64, NuNode, NuSpec, Params64,
    Sample64, Trajectory64,
};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Family, Kind};
use crate::initial::build_initial;

/// Relative slack for the sample-to-sample energy monotonicity check.
pub const ENERGY_SLACK: f64 = 1e-10;
/// Absolute slack for the energy/distance sandwich.
pub const SANDWICH_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub kind: Kind,
    /// Acceptance result; only `verify` can fail without an error.
    pub passed: bool,
    /// `(key, value)` rows of `summary.csv`.
    pub summary: Vec<(String, String)>,
    /// Paths relative to the output directory with their SHA-256.
    pub files: Vec<(String, String)>,
}

impl Outcome {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.summary
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }
}

struct Artifacts {
    dir: PathBuf,
    files: Vec<(String, String)>,
    summary: Vec<(String, String)>,
}

impl Artifacts {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            summary: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.files.push((name.to_string(), sha256_hex(bytes)));
        Ok(())
    }

    fn put(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    fn put_f(&mut self, key: &str, value: f64) {
        self.put(key, format!("{value:e}"));
    }

    fn curve(
        &mut self,
        name: &str,
        x_name: &str,
        points: impl IntoIterator<Item = (f64, f64)>,
    ) -> Result<()> {
        let mut s = format!("{x_name},{name}\n");
        for (x, y) in points {
            writeln!(s, "{x:e},{y:e}").expect("string write");
        }
        self.write(&format!("curves/{name}.csv"), s.as_bytes())
    }

    fn snapshot(&mut self, stem: &str, f: &Field64, cfg: &ExperimentConfig, t: f64) -> Result<()> {
        let mut bin = Vec::new();
        write_snapshot(f, cfg.params.kappa_t, cfg.params.m, t, &mut bin)?;
        self.write(&format!("{stem}.bin"), &bin)?;
        let mut csv = Vec::new();
        write_snapshot_csv(f, &mut csv)?;
        self.write(&format!("{stem}.csv"), &csv)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn make_grid(cfg: &ExperimentConfig) -> Result<Grid64> {
    let spec = match &cfg.grid.nodes {
        None => NuSpec::Delta0,
        Some(ns) => NuSpec::Nodes(ns.iter().map(|n| NuNode::new(n[0], n[1], n[2])).collect()),
    };
    Ok(build_grid(cfg.grid.n_theta, cfg.grid.n_hermite, spec)?)
}

pub fn make_params(cfg: &ExperimentConfig) -> Result<Params64> {
    Ok(Params64::from_rescaled(
        cfg.params.m,
        cfg.params.kappa_t,
        cfg.params.sigma_t,
    )?)
}

/// Parameters of the rescaled system: mass `ε` with diffusion-limit scaling on.
fn rescaled_params(cfg: &ExperimentConfig, eps: f64) -> Result<Params64> {
    Ok(Params64::from_rescaled(eps, cfg.params.kappa_t, cfg.params.sigma_t)?.with_epsilon(eps)?)
}

/// Solver settings of `cfg`; without an explicit `dt` the step is the stability
/// bound, further capped by `cap`, over a window of length `t_final`.
fn solver_config(
    cfg: &ExperimentConfig,
    grid: &Grid64,
    dynamics: &Dynamics<f64>,
    t_final: f64,
    cap: f64,
) -> SolverConfig {
    let s = &cfg.solver;
    let dt =
        s.dt.unwrap_or_else(|| cfl_limit(grid, dynamics, s.cfl_constant).min(cap))
            .min(t_final);
    let mut c = SolverConfig::new(dt, t_final)
        .with_scheme(s.scheme)
        .with_stride(s.stride)
        .with_cfl_policy(s.cfl_policy);
    c.cfl_constant = s.cfl_constant;
    c.snapshot_stride = s.snapshot_stride;
    c
}

/// Runs `cfg`, writing every artifact and the manifest under `out`.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let start = Instant::now();
    let mut art = Artifacts::new(out)?;
    let config_text = cfg.to_toml();
    art.write("config.toml", config_text.as_bytes())?;
    let passed = match cfg.kind {
        Kind::Stability => stability(cfg, &mut art)?,
        Kind::Rescaled => rescaled(cfg, &mut art)?,
        Kind::Dd => dd(cfg, &mut art)?,
        Kind::Sweep => sweep(cfg, &mut art)?,
        Kind::Verify => verify(cfg, &mut art)?,
        Kind::Particles => particles(cfg, &mut art)?,
        Kind::Compare => compare(cfg, &mut art)?,
    };
    art.put("passed", passed);
    let mut summary = String::from("key,value\n");
    for (k, v) in &art.summary {
        writeln!(summary, "{k},{v}").expect("string write");
    }
    art.write("summary.csv", summary.as_bytes())?;

    let mut manifest = toml::Table::new();
    manifest.insert("kind".into(), cfg.kind.name().into());
    manifest.insert("code_version".into(), env!("CARGO_PKG_VERSION").into());
    manifest.insert("seed".into(), toml::Value::Integer(cfg.seed as i64));
    manifest.insert(
        "config_sha256".into(),
        sha256_hex(config_text.as_bytes()).into(),
    );
    manifest.insert("wall_time_s".into(), start.elapsed().as_secs_f64().into());
    manifest.insert("passed".into(), passed.into());
    let files: toml::Table = art
        .files
        .iter()
        .map(|(n, h)| (n.clone(), h.clone().into()))
        .collect();
    manifest.insert("files".into(), files.into());
    fs::write(out.join("manifest.toml"), toml::to_string(&manifest)?)?;

    Ok(Outcome {
        kind: cfg.kind,
        passed,
        summary: art.summary,
        files: art.files,
    })
}

/// Indices `i` where `E_{i+1} > E_i + slack·|E_i|`.
pub fn energy_increases(samples: &[Sample64], slack: f64) -> usize {
    samples
        .windows(2)
        .filter(|w| w[1].energy > w[0].energy + slack * w[0].energy.abs())
        .count()
}

/// Samples violating `¼d ≤ E ≤ ¾d` beyond `slack`, `d = ‖f − f_∞‖²`.
pub fn sandwich_violations(samples: &[Sample64], slack: f64) -> usize {
    samples
        .iter()
        .filter(|s| {
            s.energy < 0.25 * s.l2gamma_sq - slack || s.energy > 0.75 * s.l2gamma_sq + slack
        })
        .count()
}

/// Exponential fit of `value(s)` over samples with `t` in `[t0, t1]`.
pub fn fit_window(
    samples: &[Sample64],
    t0: f64,
    t1: f64,
    value: impl Fn(&Sample64) -> f64,
) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.t >= t0 - 1e-12 && s.t <= t1 + 1e-12)
        .map(|s| (s.t, value(s)))
        .collect();
    Ok(fit_decay_rate(&pts)?)
}

fn write_trajectory(
    art: &mut Artifacts,
    traj: &Trajectory64,
    cfg: &ExperimentConfig,
) -> Result<()> {
    art.write("trajectory.csv", traj.to_csv_string().as_bytes())?;
    let s = &traj.samples;
    let names: Vec<&str> = CSV_HEADER.split(',').skip(1).collect();
    let cols: [fn(&Sample64) -> f64; 6] = [
        |s| s.mass,
        |s| s.l2gamma_sq,
        |s| s.dissipation,
        |s| s.a,
        |s| s.energy,
        |s| s.n_err_sq,
    ];
    for (name, col) in names.iter().zip(cols) {
        art.curve(name, "t", s.iter().map(|x| (x.t, col(x))))?;
    }
    if traj.is_rescaled() {
        art.curve(
            "micro_err",
            "t",
            s.iter()
                .filter_map(|x| x.rescaled.map(|r| (x.t, r.micro_err))),
        )?;
    }
    for (i, (t, f)) in traj.snapshots.iter().enumerate() {
        art.snapshot(&format!("snapshots/snap_{i:05}"), f, cfg, *t)?;
    }
    Ok(())
}

fn stability(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<bool> {
    let grid = make_grid(cfg)?;
    let params = make_params(cfg)?;
    let f0 = build_initial(&cfg.initial, &grid, &params)?;
    let eq = EquilibriumState::from_field(&f0, &grid)?;
    let regime = regime_check(&params, &eq, cfg.c_inf);
    let dynamics = Dynamics::kinetic(&params);
    let sc = solver_config(cfg, &grid, &dynamics, cfg.solver.t_final, f64::INFINITY);

    let node0: Vec<f64> = (0..grid.n_nodes()).map(|j| f0.node_mass(j)).collect();
    let mut node_drift = 0.0f64;
    let traj = run_observed(&f0, &params, &grid, &sc, &eq, &mut |_, f| {
        for (j, m0) in node0.iter().enumerate() {
            if *m0 != 0.0 {
                node_drift = node_drift.max(((f.node_mass(j) - m0) / m0).abs());
            }
        }
    })?;
    write_trajectory(art, &traj, cfg)?;
    art.snapshot("final", traj.final_field(), cfg, cfg.solver.t_final)?;

    let mut r = String::from("key,value\n");
    let rows: [(&str, String); 12] = [
        ("lhs_coupling_noise", format!("{:e}", regime.lhs_b12)),
        ("rhs_coupling_noise", format!("{:e}", regime.rhs)),
        ("satisfied_coupling_noise", regime.satisfied_b12.to_string()),
        ("lhs_dissipation_1", format!("{:e}", regime.lhs_c13_1)),
        ("rhs_dissipation_1", format!("{:e}", regime.rhs_c13_1)),
        ("lhs_dissipation_2", format!("{:e}", regime.lhs_c13_2)),
        ("rhs_dissipation_2", format!("{:e}", regime.rhs_c13_2)),
        ("satisfied", regime.satisfied().to_string()),
        ("alpha", format!("{:e}", regime.alpha)),
        ("alpha_compliant", regime.alpha_compliant.to_string()),
        ("c_inf", format!("{:e}", regime.c_inf)),
        ("kappa_t_max", format!("{:e}", regime.kappa_t_max)),
    ];
    for (k, v) in rows {
        writeln!(r, "{k},{v}").expect("string write");
    }
    art.write("regime.csv", r.as_bytes())?;

    let s = &traj.samples;
    let m0 = s[0].mass;
    let mass_drift = s
        .iter()
        .map(|x| ((x.mass - m0) / m0).abs())
        .fold(0.0, f64::max);
    let d0 = s[0].l2gamma_sq.sqrt();
    let bound_ratio = if d0 > 0.0 {
        s.iter()
            .map(|x| x.l2gamma_sq.sqrt() / d0)
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    art.put("dt", format!("{:e}", sc.dt));
    art.put_f("mass_drift", mass_drift);
    art.put_f("node_mass_drift", node_drift);
    art.put("regime_satisfied", regime.satisfied());
    art.put("energy_increases", energy_increases(s, ENERGY_SLACK));
    art.put(
        "sandwich_violations",
        sandwich_violations(s, SANDWICH_SLACK),
    );
    art.put_f("distance_bound_ratio", bound_ratio);
    let t1 = cfg.solver.t_final;
    let t0 = if t1 > 1.0 { 1.0 } else { 0.0 };
    match fit_window(s, t0, t1, |x| x.l2gamma_sq.sqrt()) {
        Ok(fit) => {
            art.put_f("decay_rate", fit.rate);
            art.put_f("decay_r_squared", fit.r_squared);
        }
        Err(e) => log::info!("no decay fit: {e}"),
    }
    Ok(true)
}

fn rescaled(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<bool> {
    let eps = cfg
        .params
        .epsilon
        .context("rescaled runs need params.epsilon")?;
    let grid = make_grid(cfg)?;
    let params = rescaled_params(cfg, eps)?;
    let f0 = build_initial(&cfg.initial, &grid, &params)?;
    let dynamics = Dynamics::rescaled(&params);
    let sc = solver_config(
        cfg,
        &grid,
        &dynamics,
        cfg.solver.t_final,
        cfg.sweep.layer_factor * eps * eps,
    );
    let traj = run_rescaled(&f0, &params, &grid, &sc)?;
    write_trajectory(art, &traj, cfg)?;
    art.snapshot("final", traj.final_field(), cfg, cfg.solver.t_final)?;

    let prop = prop_l2_check(&traj, &params)?;
    let mut p = String::from("t,lhs,rhs\n");
    for (t, l, r) in &prop.rows {
        writeln!(p, "{t:e},{l:e},{r:e}").expect("string write");
    }
    art.write("prop_l2.csv", p.as_bytes())?;

    art.put("dt", format!("{:e}", sc.dt));
    art.put_f("epsilon", eps);
    art.put("prop_l2_violations", prop.violations());
    art.put_f("prop_l2_worst_ratio", prop.worst_ratio());
    art.put_f("prop_l2_growth_rate", prop.growth_rate);
    let micro = |s: &Sample64| s.rescaled.map_or(0.0, |r| r.micro_err);
    let micro_max = traj.samples.iter().map(micro).fold(0.0, f64::max);
    art.put_f("micro_err_max", micro_max);
    art.put_f(
        "micro_err_final",
        micro(traj.samples.last().expect("nonempty")),
    );
    art.put_f(
        "layer_rate_threshold",
        cfg.params.sigma_t / (8.0 * eps * eps),
    );
    match fit_window(&traj.samples, 0.0, 10.0 * eps * eps, micro) {
        Ok(fit) => {
            art.put_f("layer_rate", fit.rate);
            art.put_f("layer_r_squared", fit.r_squared);
        }
        Err(e) => log::info!("no initial-layer fit: {e}"),
    }
    Ok(true)
}

fn dd(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<bool> {
    let grid = make_grid(cfg)?;
    if !grid.is_single_node() {
        bail!("drift-diffusion runs need a single frequency node");
    }
    let params = make_params(cfg)?;
    let f0 = build_initial(&cfg.initial, &grid, &params)?;
    let s0 = DdState::from_field(&f0);
    let dt = cfg.solver.dt.unwrap_or(cfg.sweep.dd_dt);
    let s1 = dd_run(&s0, &params, cfg.solver.t_final, dt)?;

    let (r0, r1) = (s0.samples(), s1.samples());
    let mut out = String::from("theta,rho_initial,rho_final\n");
    for (i, th) in grid.theta_points().iter().enumerate() {
        writeln!(out, "{th:e},{:e},{:e}", r0[i], r1[i]).expect("string write");
    }
    art.write("dd.csv", out.as_bytes())?;
    let nt = grid.n_theta();
    let mut modes = String::from("k,re,im\n");
    for k in -grid.k_max()..=grid.k_max() {
        let c = s1.rho_hat[ikfp_core::grid::mode_index(nt, k)];
        writeln!(modes, "{k},{:e},{:e}", c.re, c.im).expect("string write");
    }
    art.write("dd_modes.csv", modes.as_bytes())?;
    art.put_f("dt", dt);
    art.put_f("mass_initial", s0.mass());
    art.put_f("mass_final", s1.mass());
    if cfg.params.kappa_t == 0.0 {
        let t = s1.time;
        let err = (-grid.k_max()..=grid.k_max())
            .map(|k| {
                let idx = ikfp_core::grid::mode_index(nt, k);
                let expect = s0.rho_hat[idx] * (-cfg.params.sigma_t * (k * k) as f64 * t).exp();
                (s1.rho_hat[idx] - expect).norm()
            })
            .fold(0.0, f64::max);
        art.put_f("heat_max_error", err);
    }
    Ok(true)
}

fn sweep(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<bool> {
    let grid = make_grid(cfg)?;
    let params = make_params(cfg)?;
    let f0 = build_initial(&cfg.initial, &grid, &params)?;
    if !grid.is_single_node() {
        bail!("sweeps need a single frequency node");
    }
    let options = SweepOptions {
        scheme: cfg.solver.scheme,
        cfl_constant: cfg.solver.cfl_constant,
        layer_factor: cfg.sweep.layer_factor,
        dd_dt: cfg.sweep.dd_dt,
        step_budget: cfg.sweep.step_budget,
    };
    let res = eps_sweep(
        f0.row(0, 0),
        &params,
        cfg.solver.t_final,
        &cfg.sweep.eps,
        &grid,
        &options,
    )?;
    art.write("sweep.csv", res.to_csv().as_bytes())?;
    art.write(
        "sweep_summary.txt",
        format!("{}\n", res.summary()).as_bytes(),
    )?;
    let e = &res.eps_values;
    art.curve(
        "err_hminus1",
        "eps",
        e.iter().copied().zip(res.errors_hminus1.iter().copied()),
    )?;
    art.curve(
        "micro_err",
        "eps",
        e.iter().copied().zip(res.micro_errors.iter().copied()),
    )?;
    art.put("convention", res.convention);
    art.put_f("slope", res.fitted_slope);
    art.put_f("slope_r_squared", res.fit_r_squared);
    art.put_f("prefactor", res.prefactor);
    art.put_f("micro_slope", res.micro_slope);
    art.put_f("micro_r_squared", res.micro_r_squared);
    art.put("monotone", res.monotone(0.1));
    Ok(true)
}

fn mix(seed: u64, i: usize) -> u64 {
    seed ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn verify(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<bool> {
    let v = &cfg.verify;
    let base = make_grid(cfg)?;
    let mut all_ok = true;
    for (i, &sigma) in v.sigma_values.iter().enumerate() {
        let eq = equilibrium(&base, cfg.initial.mass, sigma)?;
        let fields = random_fields(&base, sigma, Some(&eq), v.n_fields, mix(cfg.seed, i));
        let report = inequality_battery(&fields, &base, v.slack)?;
        art.write(&format!("battery_{i}.csv"), report.to_csv().as_bytes())?;
        let tag = format!("sigma_{i}");
        art.put_f(&format!("{tag}_value"), sigma);
        art.put(
            &format!("{tag}_poincare_violations"),
            report.violations_poincare(),
        );
        art.put(&format!("{tag}_flux_violations"), report.violations_flux());
        art.put(
            &format!("{tag}_pressure_violations"),
            report.violations_pressure(),
        );
        art.put(
            &format!("{tag}_scaled_violations"),
            report.violations_scaled(),
        );
        all_ok &= report.passed();
    }

    let sources = random_sources::<f64>(
        base.n_theta(),
        base.n_nodes(),
        v.n_sources,
        mix(cfg.seed, usize::MAX - 1),
    );
    let mut csv = String::from("index,node,source_l2,dv_l2,d2v_l2,pass\n");
    let mut elliptic_bad = 0usize;
    for (i, src) in sources.iter().enumerate() {
        let pot = poisson_solve_coeffs(src)?;
        let d2 = pot.d2v();
        for j in 0..src.len() {
            let s = ikfp_core::fourier::l2_coeffs(&src[j]);
            let dv = ikfp_core::fourier::l2_coeffs(&pot.dv[j]);
            let dd = ikfp_core::fourier::l2_coeffs(&d2[j]);
            let ok = dv <= POINCARE_CONSTANT * s + v.slack * s.max(1.0)
                && (dd - s).abs() <= v.slack * s.max(1.0);
            elliptic_bad += usize::from(!ok);
            writeln!(csv, "{i},{j},{s:e},{dv:e},{dd:e},{ok}").expect("string write");
        }
    }
    art.write("elliptic.csv", csv.as_bytes())?;
    art.put("elliptic_violations", elliptic_bad);
    all_ok &= elliptic_bad == 0;
    Ok(all_ok)
}

fn particle_law(cfg: &ExperimentConfig, grid: &Grid64) -> Result<InitialLaw> {
    let name = match cfg.initial.family {
        Family::Equilibrium => "equilibrium",
        Family::CosinePerturbed | Family::WellPrepared => "cosine-perturbed",
        Family::HermiteMode => bail!("particle ensembles cannot sample the hermite-mode family"),
    };
    if !cfg.initial.extra_modes.is_empty() {
        bail!("particle ensembles cannot sample extra Hermite modes");
    }
    let nodes = grid.nodes().iter().map(|n| (n.nu, n.g)).collect();
    Ok(InitialLaw::named(
        name,
        cfg.initial.delta,
        nodes,
        cfg.params.sigma_t,
        cfg.initial.mass,
    )?)
}

fn particle_dt(cfg: &ExperimentConfig) -> f64 {
    cfg.particles.dt.unwrap_or(cfg.solver.t_final / 2000.0)
}

fn bin_centres(bins: usize) -> impl Iterator<Item = f64> {
    let w = std::f64::consts::TAU / bins as f64;
    (0..bins).map(move |b| (b as f64 + 0.5) * w)
}

fn particles(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<bool> {
    let grid = make_grid(cfg)?;
    let params = make_params(cfg)?;
    let law = particle_law(cfg, &grid)?;
    let mut e = sample_initial(cfg.particles.n, &law, cfg.seed)?;
    let t_final = cfg.solver.t_final;
    let seg = t_final / cfg.particles.samples as f64;
    let dt = particle_dt(cfg);
    let mut csv = String::from("t,r,psi\n");
    let mut row = |e: &ParticleEnsemble| {
        let (r, psi) = order_parameter(e);
        writeln!(csv, "{:e},{r:e},{psi:e}", e.time).expect("string write");
    };
    row(&e);
    for i in 1..=cfg.particles.samples {
        let t_next = i as f64 * seg;
        let span = t_next - e.time;
        simulate(&mut e, &params, dt, span, &mut |_| {})?;
        e.time = t_next;
        row(&e);
    }
    art.write("particles.csv", csv.as_bytes())?;
    let density = empirical_density(&e, cfg.particles.bins)?;
    art.curve(
        "density",
        "theta",
        bin_centres(cfg.particles.bins).zip(density.iter().copied()),
    )?;
    let (r, psi) = order_parameter(&e);
    art.put_f("dt", dt);
    art.put_f("r_final", r);
    art.put_f("psi_final", psi);
    Ok(true)
}

fn kinetic_order(rho_hat: &[Complex<f64>], mass: f64) -> (f64, f64) {
    let z = rho_hat[ikfp_core::grid::mode_index(rho_hat.len(), -1)] * std::f64::consts::TAU / mass;
    let r = z.norm();
    if r == 0.0 {
        (0.0, 0.0)
    } else {
        (r, z.arg().rem_euclid(std::f64::consts::TAU))
    }
}

fn compare(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<bool> {
    let grid = make_grid(cfg)?;
    let params = make_params(cfg)?;
    let law = particle_law(cfg, &grid)?;
    let mut f = build_initial(&cfg.initial, &grid, &params)?;
    let eq = EquilibriumState::from_field(&f, &grid)?;
    let mut e = sample_initial(cfg.particles.n, &law, cfg.seed)?;
    let bins = cfg.particles.bins;
    let mass = cfg.initial.mass;
    let seg = cfg.solver.t_final / cfg.particles.samples as f64;
    let pdt = particle_dt(cfg);
    let dynamics = Dynamics::kinetic(&params);

    let mut csv = String::from("t,r_kinetic,psi_kinetic,r_particles,psi_particles,l1\n");
    let mut last_l1 = 0.0;
    let mut last = (Vec::new(), Vec::new());
    for i in 0..=cfg.particles.samples {
        let t = i as f64 * seg;
        if i > 0 {
            let sc =
                solver_config(cfg, &grid, &dynamics, seg, f64::INFINITY).with_stride(usize::MAX);
            let traj = run_observed(&f, &params, &grid, &sc, &eq, &mut |_, _| {})?;
            f = traj.final_field().clone();
            let span = t - e.time;
            simulate(&mut e, &params, pdt, span, &mut |_| {})?;
            e.time = t;
        }
        let rho_hat = density_coeffs(&f);
        let kin = kinetic_bin_averages(&rho_hat, bins);
        let emp = empirical_density(&e, bins)?;
        last_l1 = compare_to_kinetic(&emp, &kin)?;
        let (rk, pk) = kinetic_order(&rho_hat, mass);
        let (rp, pp) = order_parameter(&e);
        writeln!(csv, "{t:e},{rk:e},{pk:e},{rp:e},{pp:e},{last_l1:e}").expect("string write");
        last = (kin, emp);
    }
    art.write("compare.csv", csv.as_bytes())?;
    let mut d = String::from("theta,kinetic,particles\n");
    for (th, (k, p)) in bin_centres(bins).zip(last.0.iter().zip(&last.1)) {
        writeln!(d, "{th:e},{k:e},{p:e}").expect("string write");
    }
    art.write("density_final.csv", d.as_bytes())?;
    art.put_f("particle_dt", pdt);
    art.put_f("l1_final", last_l1);
    Ok(true)
}

//! Euler–Maruyama simulation of `N` noisy inertial Kuramoto oscillators and
//! comparison of their phase histogram with the kinetic density.
//!
//! Each particle owns a ChaCha stream keyed by `(seed, index)`, and all
//! reductions run over fixed chunks in index order, so results do not depend on
//! the number of worker threads.

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{mode_index, mode_of};
use crate::params::SimParams;
use crate::Complex;

const REDUCTION_CHUNK: usize = 4096;
const CDF_CELLS: usize = 8192;
/// Separates the initial-sampling streams from the dynamics streams.
const SAMPLING_DOMAIN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone)]
pub struct ParticleEnsemble {
    pub theta: Vec<f64>,
    pub omega: Vec<f64>,
    pub nu: Vec<f64>,
    pub seed: u64,
    pub time: f64,
    /// Total mass the histogram is normalised to.
    pub mass: f64,
    rngs: Vec<ChaCha8Rng>,
}

impl PartialEq for ParticleEnsemble {
    fn eq(&self, other: &Self) -> bool {
        self.theta == other.theta
            && self.omega == other.omega
            && self.nu == other.nu
            && self.seed == other.seed
            && self.time == other.time
            && self.mass == other.mass
    }
}

fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index as u64);
    r
}

impl ParticleEnsemble {
    /// Ensemble from explicit states.
    pub fn from_states(
        theta: Vec<f64>,
        omega: Vec<f64>,
        nu: Vec<f64>,
        seed: u64,
        mass: f64,
    ) -> Result<Self> {
        let n = theta.len();
        if n == 0 || omega.len() != n || nu.len() != n {
            return Err(Error::Shape(format!(
                "ensemble arrays must be nonempty and equal length, got {}, {}, {}",
                n,
                omega.len(),
                nu.len()
            )));
        }
        let theta = theta
            .into_iter()
            .map(|t| t.rem_euclid(std::f64::consts::TAU))
            .collect();
        Ok(Self {
            theta,
            omega,
            nu,
            seed,
            time: 0.0,
            mass,
            rngs: (0..n).map(|i| stream(seed, i)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

/// Law of the initial phases.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseLaw {
    Uniform,
    /// Density proportional to `1 + δ cos θ`.
    Cosine {
        delta: f64,
    },
    /// Density given by samples on a uniform grid over `[0, 2π)` (nonnegative).
    Tabulated(Vec<f64>),
}

/// Product law: phases, Gaussian velocities `M(·, ν)`, frequencies from weighted nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialLaw {
    pub phases: PhaseLaw,
    /// `(ν_j, g_j)`.
    pub nodes: Vec<(f64, f64)>,
    pub sigma_t: f64,
    pub mass: f64,
}

impl InitialLaw {
    /// Named laws: `"equilibrium"` and `"cosine-perturbed"` (using `delta`).
    pub fn named(
        name: &str,
        delta: f64,
        nodes: Vec<(f64, f64)>,
        sigma_t: f64,
        mass: f64,
    ) -> Result<Self> {
        let phases = match name {
            "equilibrium" => PhaseLaw::Uniform,
            "cosine-perturbed" => PhaseLaw::Cosine { delta },
            other => return Err(Error::UnknownLaw(other.to_string())),
        };
        Ok(Self {
            phases,
            nodes,
            sigma_t,
            mass,
        })
    }
}

/// Inverse CDF of a nonnegative density tabulated on a fine uniform grid.
struct PhaseSampler {
    cdf: Vec<f64>,
}

impl PhaseSampler {
    fn new(law: &PhaseLaw) -> Result<Option<Self>> {
        let tau = std::f64::consts::TAU;
        let density: Vec<f64> = match law {
            PhaseLaw::Uniform => return Ok(None),
            PhaseLaw::Cosine { delta } => (0..CDF_CELLS)
                .map(|i| {
                    // Exact cell integral of 1 + δ cos θ.
                    let a = tau * i as f64 / CDF_CELLS as f64;
                    let b = tau * (i + 1) as f64 / CDF_CELLS as f64;
                    (b - a) + delta * (b.sin() - a.sin())
                })
                .collect(),
            PhaseLaw::Tabulated(v) => {
                let n = v.len();
                if n == 0 {
                    return Err(Error::Shape("empty phase density".into()));
                }
                (0..CDF_CELLS)
                    .map(|i| {
                        let x = (i as f64 + 0.5) / CDF_CELLS as f64 * n as f64;
                        let lo = x.floor() as usize % n;
                        let w = x - x.floor();
                        (1.0 - w) * v[lo] + w * v[(lo + 1) % n]
                    })
                    .collect()
            }
        };
        if density.iter().any(|d| !(*d >= 0.0)) {
            return Err(Error::InvalidConfig(
                "phase density must be nonnegative".into(),
            ));
        }
        let mut cdf = Vec::with_capacity(CDF_CELLS + 1);
        cdf.push(0.0);
        let mut acc = 0.0;
        for d in density {
            acc += d;
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::InvalidConfig("phase density has zero mass".into()));
        }
        for c in cdf.iter_mut() {
            *c /= acc;
        }
        Ok(Some(Self { cdf }))
    }

    fn sample(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, CDF_CELLS) - 1;
        let (a, b) = (self.cdf[i], self.cdf[i + 1]);
        let w = if b > a { (u - a) / (b - a) } else { 0.5 };
        std::f64::consts::TAU * (i as f64 + w) / CDF_CELLS as f64
    }
}

/// Draws `n` particles from `law`; identical seeds give identical ensembles.
pub fn sample_initial(n: usize, law: &InitialLaw, seed: u64) -> Result<ParticleEnsemble> {
    if n == 0 {
        return Err(Error::InvalidConfig(
            "particle count must be at least 1".into(),
        ));
    }
    if law.nodes.is_empty() {
        return Err(Error::InvalidConfig("no frequency nodes".into()));
    }
    if !(law.sigma_t > 0.0) {
        return Err(Error::InvalidParams("sigma_t must be positive".into()));
    }
    let sampler = PhaseSampler::new(&law.phases)?;
    let weights = WeightedIndex::new(law.nodes.iter().map(|n| n.1))
        .map_err(|e| Error::InvalidConfig(format!("frequency weights: {e}")))?;
    let sd = law.sigma_t.sqrt();
    let draws: Vec<(f64, f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed ^ SAMPLING_DOMAIN, i);
            let u: f64 = rng.random();
            let theta = match &sampler {
                None => std::f64::consts::TAU * u,
                Some(s) => s.sample(u),
            };
            let nu = law.nodes[weights.sample(&mut rng)].0;
            let z: f64 = StandardNormal.sample(&mut rng);
            (theta, nu + sd * z, nu)
        })
        .collect();
    let mut theta = Vec::with_capacity(n);
    let mut omega = Vec::with_capacity(n);
    let mut nu = Vec::with_capacity(n);
    for (t, w, v) in draws {
        theta.push(t);
        omega.push(w);
        nu.push(v);
    }
    ParticleEnsemble::from_states(theta, omega, nu, seed, law.mass)
}

fn phase_sums(theta: &[f64]) -> (f64, f64) {
    let partial: Vec<(f64, f64)> = theta
        .par_chunks(REDUCTION_CHUNK)
        .map(|c| {
            c.iter()
                .fold((0.0, 0.0), |(a, b), t| (a + t.cos(), b + t.sin()))
        })
        .collect();
    partial
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (c, s)| (a + c, b + s))
}

/// `(r, ψ)` with `r e^{iψ} = (1/N) Σ e^{iθ_k}`; `ψ = 0` when `r = 0`.
pub fn order_parameter(e: &ParticleEnsemble) -> (f64, f64) {
    let (c, s) = phase_sums(&e.theta);
    let n = e.len() as f64;
    let (c, s) = (c / n, s / n);
    let r = c.hypot(s);
    if r == 0.0 {
        (0.0, 0.0)
    } else {
        (r, s.atan2(c).rem_euclid(std::f64::consts::TAU))
    }
}

/// `κ r sin(ψ − θ_i)` for every particle.
pub fn interaction(e: &ParticleEnsemble, kappa: f64) -> Vec<f64> {
    let (r, psi) = order_parameter(e);
    e.theta
        .iter()
        .map(|t| kappa * r * (psi - t).sin())
        .collect()
}

/// `(κ/N) Σ_k sin(θ_k − θ_i)` by direct double summation.
pub fn interaction_naive(e: &ParticleEnsemble, kappa: f64) -> Vec<f64> {
    let n = e.len() as f64;
    e.theta
        .iter()
        .map(|ti| kappa / n * e.theta.iter().map(|tk| (tk - ti).sin()).sum::<f64>())
        .collect()
}

/// One Euler–Maruyama step of
/// `dθ = ω dt`, `m dω = (−ω + ν + κ r sin(ψ−θ)) dt + √(2σ) dW`.
pub fn em_step(e: &mut ParticleEnsemble, params: &SimParams<f64>, dt: f64) {
    let (r, psi) = order_parameter(e);
    let m = params.m();
    let kappa = params.kappa();
    let noise = (2.0 * params.sigma()).sqrt() / m * dt.sqrt();
    let tau = std::f64::consts::TAU;
    e.theta
        .par_iter_mut()
        .zip(e.omega.par_iter_mut())
        .zip(e.nu.par_iter())
        .zip(e.rngs.par_iter_mut())
        .with_min_len(1024)
        .for_each(|(((theta, omega), nu), rng)| {
            let force = kappa * r * (psi - *theta).sin();
            let xi: f64 = StandardNormal.sample(rng);
            let w = *omega;
            *theta = (*theta + w * dt).rem_euclid(tau);
            *omega = w + dt / m * (-w + nu + force) + noise * xi;
        });
    e.time += dt;
}

/// Advances to `t_final` with steps of at most `dt`; `observer` sees the ensemble after each step.
pub fn simulate(
    e: &mut ParticleEnsemble,
    params: &SimParams<f64>,
    dt: f64,
    t_final: f64,
    observer: &mut dyn FnMut(&ParticleEnsemble),
) -> Result<()> {
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "need dt > 0 and t_final >= 0, got {dt}, {t_final}"
        )));
    }
    let n = (t_final / dt * (1.0 - 1e-12)).ceil() as usize;
    let start = e.time;
    for s in 1..=n {
        em_step(e, params, t_final / n as f64);
        e.time = if s == n {
            start + t_final
        } else {
            start + s as f64 * t_final / n as f64
        };
        observer(e);
    }
    Ok(())
}

/// Histogram on `n_bins` uniform bins, scaled so `(2π/n_bins) Σ ρ_b = mass`.
pub fn empirical_density(e: &ParticleEnsemble, n_bins: usize) -> Result<Vec<f64>> {
    if n_bins < 4 {
        return Err(Error::InvalidConfig(format!(
            "need at least 4 bins, got {n_bins}"
        )));
    }
    let tau = std::f64::consts::TAU;
    let counts = e
        .theta
        .par_chunks(REDUCTION_CHUNK)
        .map(|c| {
            let mut h = vec![0u64; n_bins];
            for t in c {
                let b = ((t / tau) * n_bins as f64).floor() as usize;
                h[b.min(n_bins - 1)] += 1;
            }
            h
        })
        .reduce(
            || vec![0u64; n_bins],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let width = tau / n_bins as f64;
    let scale = e.mass / (e.len() as f64 * width);
    Ok(counts.into_iter().map(|c| c as f64 * scale).collect())
}

/// Exact averages of `ρ(θ) = Σ_k ρ̂_k e^{ikθ}` over `n_bins` uniform bins.
pub fn kinetic_bin_averages(rho_hat: &[Complex<f64>], n_bins: usize) -> Vec<f64> {
    let nt = rho_hat.len();
    let width = std::f64::consts::TAU / n_bins as f64;
    (0..n_bins)
        .map(|b| {
            let a = width * b as f64;
            let mut acc = rho_hat[mode_index(nt, 0)].re;
            for (idx, c) in rho_hat.iter().enumerate() {
                let k = mode_of(nt, idx);
                if k == 0 {
                    continue;
                }
                let kf = k as f64;
                let e0 = Complex::from_polar(1.0, kf * a);
                let e1 = Complex::from_polar(1.0, kf * (a + width));
                acc += (c * (e1 - e0) / Complex::new(0.0, kf * width)).re;
            }
            acc
        })
        .collect()
}

/// `(2π/n_bins) Σ_b |ρ̂_b − ρ_b|` for densities of equal mass.
pub fn compare_to_kinetic(empirical: &[f64], kinetic: &[f64]) -> Result<f64> {
    if empirical.len() != kinetic.len() || empirical.is_empty() {
        return Err(Error::Shape("bin counts differ".into()));
    }
    let w = std::f64::consts::TAU / empirical.len() as f64;
    let m1: f64 = empirical.iter().sum::<f64>() * w;
    let m2: f64 = kinetic.iter().sum::<f64>() * w;
    if (m1 - m2).abs() > 1e-8 {
        return Err(Error::MassMismatch(format!(
            "empirical mass {m1} vs kinetic mass {m2}"
        )));
    }
    Ok(empirical
        .iter()
        .zip(kinetic)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        * w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_particle_has_no_interaction() {
        let e = ParticleEnsemble::from_states(vec![1.3], vec![0.0], vec![0.0], 1, 1.0).unwrap();
        assert_eq!(interaction(&e, 2.0)[0], 0.0);
        assert_eq!(interaction_naive(&e, 2.0)[0], 0.0);
    }

    #[test]
    fn order_parameter_examples() {
        let e = ParticleEnsemble::from_states(vec![0.7; 5], vec![0.0; 5], vec![0.0; 5], 1, 1.0)
            .unwrap();
        let (r, psi) = order_parameter(&e);
        assert!((r - 1.0).abs() < 1e-15 && (psi - 0.7).abs() < 1e-15);
        let e = ParticleEnsemble::from_states(
            vec![0.0, std::f64::consts::PI],
            vec![0.0; 2],
            vec![0.0; 2],
            1,
            1.0,
        )
        .unwrap();
        assert!(order_parameter(&e).0 < 1e-15);
    }

    #[test]
    fn single_bin_mass() {
        let e = ParticleEnsemble::from_states(vec![0.1; 10], vec![0.0; 10], vec![0.0; 10], 1, 2.0)
            .unwrap();
        let h = empirical_density(&e, 8).unwrap();
        assert!((h[0] - 2.0 * 8.0 / std::f64::consts::TAU).abs() < 1e-12);
        assert!(h[1..].iter().all(|v| *v == 0.0));
        let shifted: Vec<f64> = (0..8).map(|i| h[(i + 7) % 8]).collect();
        let d = compare_to_kinetic(&h, &shifted).unwrap();
        assert!((d - 4.0).abs() < 1e-12);
        assert_eq!(compare_to_kinetic(&h, &h).unwrap(), 0.0);
    }

    #[test]
    fn unknown_law() {
        assert!(matches!(
            InitialLaw::named("bogus", 0.0, vec![(0.0, 1.0)], 1.0, 1.0),
            Err(Error::UnknownLaw(_))
        ));
    }

    #[test]
    fn bin_averages_of_cosine() {
        let mut rho = vec![Complex::new(0.0, 0.0); 8];
        rho[mode_index(8, 0)] = Complex::new(1.0, 0.0);
        rho[mode_index(8, 1)] = Complex::new(0.5, 0.0);
        rho[mode_index(8, -1)] = Complex::new(0.5, 0.0);
        let avg = kinetic_bin_averages(&rho, 4);
        let w = std::f64::consts::FRAC_PI_2;
        for (b, v) in avg.iter().enumerate() {
            let a = w * b as f64;
            let expect = 1.0 + ((a + w).sin() - a.sin()) / w;
            assert!((v - expect).abs() < 1e-14);
        }
    }
}

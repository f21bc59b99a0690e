mod common;

use common::*;
use ikfp_core::particles::*;
use ikfp_core::*;
use proptest::prelude::*;
use rand::Rng;

fn law(name: &str, sigma_t: f64) -> InitialLaw {
    InitialLaw::named(name, 0.5, vec![(0.0, 1.0)], sigma_t, 1.0).unwrap()
}

#[test]
fn equilibrium_sample_moments() {
    let n = 40_000;
    let e = sample_initial(n, &law("equilibrium", 1.7), 11).unwrap();
    let bound = 5.0 / (n as f64).sqrt();
    let mean = e.omega.iter().sum::<f64>() / n as f64;
    let var = e.omega.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / n as f64;
    assert!(mean.abs() < bound * 1.7f64.sqrt());
    assert!((var - 1.7).abs() < bound * 1.7 * 2f64.sqrt());
    assert!(e.theta.iter().all(|t| (0.0..TAU).contains(t)));
    assert!(e.nu.iter().all(|v| *v == 0.0));
    let mean_theta = e.theta.iter().sum::<f64>() / n as f64;
    assert!(
        (mean_theta - std::f64::consts::PI).abs() < 5.0 * TAU / (12f64.sqrt() * (n as f64).sqrt())
    );
}

#[test]
fn cosine_law_has_matching_first_harmonic() {
    let n = 50_000;
    let e = sample_initial(n, &law("cosine-perturbed", 1.0), 2).unwrap();
    // E[cos θ] = δ/2 for density (1 + δ cos θ)/(2π)
    let c = e.theta.iter().map(|t| t.cos()).sum::<f64>() / n as f64;
    assert!((c - 0.25).abs() < 5.0 / (n as f64).sqrt());
}

#[test]
fn frequency_nodes_follow_weights() {
    let n = 20_000;
    let law = InitialLaw::named(
        "equilibrium",
        0.0,
        vec![(-1.0, 0.25), (0.0, 0.5), (1.0, 0.25)],
        1.0,
        1.0,
    )
    .unwrap();
    let e = sample_initial(n, &law, 5).unwrap();
    let frac = e.nu.iter().filter(|v| **v == 0.0).count() as f64 / n as f64;
    assert!((frac - 0.5).abs() < 5.0 * 0.5 / (n as f64).sqrt());
}

#[test]
fn sampling_is_reproducible() {
    let a = sample_initial(1000, &law("cosine-perturbed", 1.0), 42).unwrap();
    let b = sample_initial(1000, &law("cosine-perturbed", 1.0), 42).unwrap();
    let c = sample_initial(1000, &law("cosine-perturbed", 1.0), 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.theta, c.theta);
    assert!(matches!(
        InitialLaw::named("gaussian-bump", 0.1, vec![(0.0, 1.0)], 1.0, 1.0),
        Err(Error::UnknownLaw(_))
    ));
    assert!(sample_initial(0, &law("equilibrium", 1.0), 1).is_err());
}

#[test]
fn deterministic_relaxation_matches_closed_form() {
    let m = 0.8;
    let params = Params64::new(m, 0.0, 1e-300).unwrap();
    let nu = vec![0.3, -1.0, 2.0];
    let w0 = vec![1.0, 0.5, -0.5];
    let mut e =
        ParticleEnsemble::from_states(vec![0.0; 3], w0.clone(), nu.clone(), 1, 1.0).unwrap();
    let t = 2.0;
    let dt = 1e-4;
    simulate(&mut e, &params, dt, t, &mut |_| {}).unwrap();
    for i in 0..3 {
        let exact = nu[i] + (w0[i] - nu[i]) * (-t / m).exp();
        assert!(
            (e.omega[i] - exact).abs() < 10.0 * dt,
            "{} vs {exact}",
            e.omega[i]
        );
    }
    assert_eq!(e.time, t);
}

#[test]
fn single_particle_feels_no_force() {
    let e = ParticleEnsemble::from_states(vec![1.3], vec![0.0], vec![0.0], 0, 1.0).unwrap();
    assert_eq!(interaction(&e, 5.0)[0].abs(), 0.0);
    assert_eq!(interaction_naive(&e, 5.0)[0], 0.0);
}

#[test]
fn synchronized_phases_stay_together() {
    let params = Params64::new(1.0, 2.0, 1e-300).unwrap();
    let mut e =
        ParticleEnsemble::from_states(vec![0.7; 50], vec![0.2; 50], vec![0.0; 50], 3, 1.0).unwrap();
    assert!(interaction(&e, 2.0).iter().all(|f| f.abs() < 1e-15));
    simulate(&mut e, &params, 0.01, 1.0, &mut |_| {}).unwrap();
    assert!(e.theta.iter().all(|t| *t == e.theta[0]));
}

#[test]
fn order_parameter_examples() {
    let e =
        ParticleEnsemble::from_states(vec![1.1; 7], vec![0.0; 7], vec![0.0; 7], 0, 1.0).unwrap();
    let (r, psi) = order_parameter(&e);
    assert!((r - 1.0).abs() < 1e-15 && (psi - 1.1).abs() < 1e-15);
    let e = ParticleEnsemble::from_states(
        vec![0.0, std::f64::consts::PI],
        vec![0.0; 2],
        vec![0.0; 2],
        0,
        1.0,
    )
    .unwrap();
    assert!(order_parameter(&e).0 < 1e-15);
}

#[test]
fn order_parameter_of_uniform_phases_is_small() {
    let n = 2000;
    let hits = (0..200u64)
        .filter(|&seed| {
            let e = sample_initial(n, &law("equilibrium", 1.0), seed).unwrap();
            order_parameter(&e).0 <= 5.0 / (n as f64).sqrt()
        })
        .count();
    assert!(hits >= 198, "{hits}/200");
}

#[test]
fn order_parameter_form_equals_double_sum() {
    let mut r = rng(9);
    for _ in 0..100 {
        let n = r.random_range(1..300);
        let theta: Vec<f64> = (0..n).map(|_| r.random_range(0.0..TAU)).collect();
        let e = ParticleEnsemble::from_states(theta, vec![0.0; n], vec![0.0; n], 0, 1.0).unwrap();
        let k = r.random_range(0.0..3.0);
        for (a, b) in interaction(&e, k).iter().zip(interaction_naive(&e, k)) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn histogram_examples() {
    let e =
        ParticleEnsemble::from_states(vec![0.1; 10], vec![0.0; 10], vec![0.0; 10], 0, 2.0).unwrap();
    let h = empirical_density(&e, 8).unwrap();
    assert!((h[0] - 2.0 * 8.0 / TAU).abs() < 1e-12);
    assert!(h[1..].iter().all(|v| *v == 0.0));
    assert!(empirical_density(&e, 3).is_err());
    let mut shifted = vec![0.0; 8];
    shifted[1] = h[0];
    assert!((compare_to_kinetic(&h, &shifted).unwrap() - 4.0).abs() < 1e-12);
    assert_eq!(compare_to_kinetic(&h, &h).unwrap(), 0.0);
    assert!(compare_to_kinetic(&h, &[0.0; 8]).is_err());
}

#[test]
fn uniform_histogram_concentrates() {
    let n = 100_000;
    let bins = 16;
    let e = sample_initial(n, &law("equilibrium", 1.0), 77).unwrap();
    let h = empirical_density(&e, bins).unwrap();
    let integral: f64 = h.iter().sum::<f64>() * TAU / bins as f64;
    assert!((integral - 1.0).abs() < 1e-12);
    let level = 1.0 / TAU;
    let dev = h.iter().fold(0.0f64, |a, v| a.max((v - level).abs()));
    assert!(dev < 5.0 * level * (bins as f64 / n as f64).sqrt());
}

#[test]
fn kinetic_bins_average_the_density() {
    let nt = 16;
    let rho: Vec<f64> = theta_points(nt)
        .iter()
        .map(|t| (1.0 + 0.5 * t.cos()) / TAU)
        .collect();
    let hat = fourier::analyze(&rho);
    let bins = kinetic_bin_averages(&hat, 4);
    // bin average of cos over [bπ/2, (b+1)π/2] is (2/π)(sin b₁ − sin b₀)
    for (b, v) in bins.iter().enumerate() {
        let (a0, a1) = (b as f64 * TAU / 4.0, (b + 1) as f64 * TAU / 4.0);
        let expect = (1.0 + 0.5 * (a1.sin() - a0.sin()) / (TAU / 4.0)) / TAU;
        assert!((v - expect).abs() < 1e-14);
    }
}

#[test]
fn worker_count_does_not_change_trajectories() {
    let params = Params64::new(1.0, 1.0, 1.0).unwrap();
    let go = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let mut e = sample_initial(20_000, &law("cosine-perturbed", 1.0), 5).unwrap();
                simulate(&mut e, &params, 1e-2, 0.2, &mut |_| {}).unwrap();
                let h = empirical_density(&e, 32).unwrap();
                (e.theta, e.omega, h)
            })
    };
    let one = go(1);
    assert_eq!(one, go(2));
    assert_eq!(one, go(8));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn phases_stay_reduced(seed in any::<u64>(), k in 0.0f64..3.0) {
        let params = Params64::new(1.0, k, 1.0).unwrap();
        let mut e = sample_initial(200, &law("equilibrium", 1.0), seed).unwrap();
        simulate(&mut e, &params, 0.05, 0.5, &mut |s| {
            assert!(s.theta.iter().all(|t| (0.0..TAU).contains(t)));
        }).unwrap();
        let (r, _) = order_parameter(&e);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&r));
    }
}

mod common;

use common::*;
use ikfp_core::fourier::{hminus1_coeffs, hminus1_homogeneous_coeffs, l2_coeffs};
use ikfp_core::grid::{mode_index, mode_of};
use ikfp_core::limit::*;
use ikfp_core::moments::moment_coeffs;
use ikfp_core::norms::{l2_gamma_sq, node_dtheta_l2};
use ikfp_core::random::{random_density_coeffs, random_field_scaled};
use ikfp_core::solver::{run_rescaled, Dynamics, SolverConfig};
use ikfp_core::*;
use proptest::prelude::*;
use rand::Rng;

fn cosine_density(nt: usize, mass: f64, delta: f64) -> Vec<Complex<f64>> {
    let th = theta_points(nt);
    let rho: Vec<f64> = th
        .iter()
        .map(|t| mass * (1.0 + delta * t.cos()) / TAU)
        .collect();
    DdState::from_samples(&rho).rho_hat
}

#[test]
fn heat_modes_decay_exactly() {
    let mut r = rng(3);
    let rho = random_density_coeffs(32, 1.0 / TAU, 1.0, &mut r);
    let s0 = DdState::new(rho);
    let p = Params64::from_rescaled(1.0, 0.0, 1.3).unwrap();
    let s = dd_run(&s0, &p, 0.5, 1e-3).unwrap();
    for idx in 0..32 {
        let k = mode_of(32, idx) as f64;
        let expect = s0.rho_hat[idx] * (-1.3 * k * k * 0.5).exp();
        assert!(
            (s.rho_hat[idx] - expect).norm() < 1e-8 * s0.rho_hat[idx].norm().max(1e-300) + 1e-18
        );
    }
    assert_eq!(s.mass(), s0.mass());
}

#[test]
fn constant_density_is_a_fixed_point() {
    let s0 = DdState::from_samples(&[0.3; 16]);
    let p = Params64::from_rescaled(1.0, 5.0, 1.0).unwrap();
    let s = dd_run(&s0, &p, 1.0, 0.01).unwrap();
    assert_eq!(s.rho_hat, s0.rho_hat);
}

#[test]
fn nonlinear_limit_converges_at_second_order() {
    let p = Params64::from_rescaled(1.0, 3.0, 1.0).unwrap();
    let s0 = DdState::new(cosine_density(32, 1.0, 0.8));
    let reference = dd_run(&s0, &p, 0.5, 0.01 / 64.0).unwrap();
    let e = |dt: f64| {
        let s = dd_run(&s0, &p, 0.5, dt).unwrap();
        let d: Vec<Complex<f64>> = s
            .rho_hat
            .iter()
            .zip(&reference.rho_hat)
            .map(|(a, b)| a - b)
            .collect();
        l2_coeffs(&d)
    };
    let order = (e(0.01) / e(0.005)).log2();
    assert!(order >= 1.9, "order {order}");
}

#[test]
fn heat_flow_never_increases_l2() {
    let p = Params64::from_rescaled(1.0, 0.0, 0.5).unwrap();
    let mut s = DdState::new(random_density_coeffs(16, 0.2, 1.0, &mut rng(8)));
    let mut last = l2_coeffs(&s.rho_hat);
    for _ in 0..100 {
        s = dd_step(&s, &p, 0.01).unwrap();
        let now = l2_coeffs(&s.rho_hat);
        assert!(now <= last);
        last = now;
    }
    assert!(dd_step(&s, &p, 0.0).is_err());
}

#[test]
fn micro_distance_examples() {
    let g = delta0(8, 4);
    let mut f = SpectralField::zeros(&g, 1.0);
    f.row_mut(0, 0)
        .copy_from_slice(&cosine_density(8, 1.0, 0.4));
    assert_eq!(micro_distance(&f, &g).unwrap(), 0.0);
    f.set_real_mode(0, 1, 0, Complex::new(-0.2, 0.0));
    assert!((micro_distance(&f, &g).unwrap() - TAU.sqrt() * 0.2).abs() < 1e-15);
    assert!(micro_distance(&f, &three_nodes(8, 4)).is_err());
    for seed in 0..20 {
        let f = random_with_mass(&g, 1.0, 1.0, seed);
        let mut macro_part = SpectralField::zeros(&g, 1.0);
        macro_part.row_mut(0, 0).copy_from_slice(f.row(0, 0));
        let via_norm = l2_gamma_sq(&f, None, &g) - l2_gamma_sq(&macro_part, None, &g);
        let d = l2_gamma_sq(&f.difference(&macro_part).unwrap(), None, &g);
        assert!(rel_err(micro_distance(&f, &g).unwrap().powi(2), d) < 1e-13);
        assert!(rel_err(via_norm, d) < 1e-10);
    }
}

#[test]
fn functional_examples() {
    let rho = cosine_density(16, 1.0, 0.5);
    let zero = vec![Complex::new(0.0, 0.0); 16];
    assert_eq!(
        functional_a_eps_coeffs(&rho, &zero, &rho, 0.3).unwrap(),
        0.0
    );
    // ρ^ε − ρ = cos θ
    let mut rho_eps = rho.clone();
    rho_eps[mode_index(16, 1)] += Complex::new(0.5, 0.0);
    rho_eps[mode_index(16, -1)] += Complex::new(0.5, 0.0);
    let a = functional_a_eps_coeffs(&rho_eps, &zero, &rho, 0.0).unwrap();
    assert!((a - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    let mut heavier = rho.clone();
    heavier[mode_index(16, 0)] += Complex::new(0.1, 0.0);
    assert!(matches!(
        functional_a_eps_coeffs(&heavier, &zero, &rho, 0.1),
        Err(Error::MassMismatch(_))
    ));
}

#[test]
fn lemma_band_collapses_without_epsilon() {
    let row = lemma4_bounds(0.3, 1.0, 7.0, 2.0, 0.0);
    assert_eq!(row.upper.rhs, 1.0);
    assert_eq!(row.lower.lhs, 0.25);
    assert!(row.holds(0.0));
    let row = lemma4_bounds(0.2, 1.0, 7.0, 2.0, 0.0);
    assert!(!row.holds(0.0));
}

#[test]
fn lemma_band_on_fields_without_flux() {
    let g = delta0(16, 4);
    let mut r = rng(17);
    for _ in 0..20 {
        let rho = random_density_coeffs(16, 0.1, 1.0, &mut r);
        let f = {
            let mut f = SpectralField::zeros(&g, 1.0);
            f.row_mut(0, 0)
                .copy_from_slice(&random_density_coeffs(16, 0.1, 1.0, &mut r));
            f
        };
        let p = Params64::from_rescaled(0.1, 1.0, 1.0)
            .unwrap()
            .with_epsilon(0.1)
            .unwrap();
        let dd = DdState::new(rho.clone());
        let a = functional_a_eps(&f, &dd, &p, &g).unwrap();
        let diff: Vec<Complex<f64>> = f.row(0, 0).iter().zip(&rho).map(|(x, y)| x - y).collect();
        let err = hminus1_homogeneous_coeffs(&diff);
        assert!(rel_err(a, 0.5 * err * err) < 1e-13);
        let row = lemma4_check(a, err, node_dtheta_l2(&f, 0), &p).unwrap();
        assert!(row.holds(1e-12));
    }
}

#[test]
fn lemma_band_on_random_triples() {
    let g = delta0(16, 6);
    let mut r = rng(4);
    for i in 0..200 {
        let s: f64 = r.random_range(0.2..3.0);
        let eps: f64 = r.random_range(0.0..0.5);
        let eq = equilibrium(&g, 1.0, s).unwrap();
        let f = random_field_scaled(&g, s, Some(&eq), r.random_range(0.01..1.0), &mut r);
        let mut rho = random_density_coeffs(16, 0.0, r.random_range(0.01..1.0), &mut r);
        rho[mode_index(16, 0)] = f.get(0, 0, 0);
        let p = Params64::from_rescaled(0.5, 1.0, s)
            .unwrap()
            .with_epsilon(eps.max(1e-9))
            .unwrap();
        let a = functional_a_eps(&f, &DdState::new(rho.clone()), &p, &g).unwrap();
        let diff: Vec<Complex<f64>> = f.row(0, 0).iter().zip(&rho).map(|(x, y)| x - y).collect();
        let row = lemma4_check(
            a,
            hminus1_homogeneous_coeffs(&diff),
            node_dtheta_l2(&f, 0),
            &p,
        )
        .unwrap();
        assert!(row.holds(1e-12), "triple {i}: {row:?}");
    }
}

#[test]
fn rescaled_balance_law_holds_in_band() {
    let g = delta0(16, 8);
    let (eps, kt, s) = (0.2, 1.0, 1.0);
    let p = Params64::from_rescaled(eps, kt, s)
        .unwrap()
        .with_epsilon(eps)
        .unwrap();
    for seed in 0..5 {
        let f = random_with_mass(&g, s, 1.0, seed);
        let d = Dynamics::rescaled(&p).rhs(&f);
        let m = moment_coeffs(&f).unwrap();
        let dm = moment_coeffs(&d).unwrap();
        let s1 = fourier::coupling_coefficient(m.n[0][mode_index(16, 1)]);
        for k in -6i64..=6 {
            let idx = mode_index(16, k);
            let ik = Complex::new(0.0, k as f64);
            let sr = s1 * m.n[0][idx - 1] + s1.conj() * m.n[0][idx + 1];
            let res = (dm.n[0][idx] - ik * dm.j[0][idx] * eps) - ik * (ik * m.p[0][idx] - sr * kt);
            assert!(res.norm() < 1e-12, "k={k}: {res}");
        }
    }
}

#[test]
fn prop_bound_examples() {
    let g = delta0(16, 16);
    let eps = 0.1;
    let cfg = SolverConfig::new(2.5e-3, 1.0).with_stride(20);
    // no coupling: norms only decay
    let p0 = Params64::from_rescaled(eps, 0.0, 1.0)
        .unwrap()
        .with_epsilon(eps)
        .unwrap();
    let mut f = SpectralField::zeros(&g, 1.0);
    f.row_mut(0, 0)
        .copy_from_slice(&cosine_density(16, 1.0, 0.5));
    f.symmetrize();
    let traj = run_rescaled(&f, &p0, &g, &cfg).unwrap();
    let rep = prop_l2_check(&traj, &p0).unwrap();
    assert_eq!(rep.growth_rate, 0.0);
    assert!(rep.holds());
    let norms: Vec<f64> = rep.rows.iter().map(|r| r.1).collect();
    assert!(norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    // coupled, well-prepared
    let p = Params64::from_rescaled(eps, 1.0, 1.0)
        .unwrap()
        .with_epsilon(eps)
        .unwrap();
    let traj = run_rescaled(&f, &p, &g, &cfg).unwrap();
    let rep = prop_l2_check(&traj, &p).unwrap();
    assert!((rep.growth_rate - 1.0).abs() < 1e-12);
    assert!(rep.holds() && rep.worst_ratio() < 1.0);
    // θ-homogeneous data stays homogeneous
    let flat = equilibrium(&g, 1.0, 1.0).unwrap().field(&g);
    let traj = run_rescaled(&flat, &p, &g, &cfg).unwrap();
    assert!(traj
        .samples
        .iter()
        .all(|s| s.rescaled.unwrap().dtheta_f_norm == 0.0));
}

#[test]
fn sweep_without_coupling() {
    let g = delta0(16, 16);
    let p = Params64::from_rescaled(1.0, 0.0, 1.0).unwrap();
    let rho = cosine_density(16, 1.0, 0.5);
    let res = eps_sweep(
        &rho,
        &p,
        0.3,
        &[0.2, 0.1, 0.05],
        &g,
        &SweepOptions::default(),
    )
    .unwrap();
    assert_eq!(res.eps_values.len(), 3);
    assert_eq!(res.errors_hminus1.len(), 3);
    assert_eq!(res.micro_errors.len(), 3);
    assert!(res.errors_hminus1.windows(2).all(|w| w[1] < w[0]));
    assert!(res.fitted_slope >= 0.8, "{}", res.summary());
    assert_eq!(res.to_csv().lines().count(), 4);
    assert_eq!(res.convention, "bessel");
    for (b, h) in res
        .errors_hminus1
        .iter()
        .zip(&res.errors_hminus1_homogeneous)
    {
        assert!(b <= h);
    }
    assert!(eps_sweep(&rho, &p, 0.3, &[0.1, 0.2], &g, &SweepOptions::default()).is_err());
    assert!(eps_sweep(
        &rho,
        &p,
        0.3,
        &[0.1, 0.05],
        &three_nodes(16, 4),
        &SweepOptions::default()
    )
    .is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn limit_conserves_mass_and_reality(seed in any::<u64>(), kt in 0.0f64..4.0) {
        let mut r = rng(seed);
        let s0 = DdState::new(random_density_coeffs(16, 1.0 / TAU, 0.5, &mut r));
        let p = Params64::from_rescaled(1.0, kt, 1.0).unwrap();
        let s = dd_run(&s0, &p, 0.1, 1e-3).unwrap();
        prop_assert_eq!(s.mass(), s0.mass());
        for k in 1..8i64 {
            prop_assert_eq!(s.rho_hat[mode_index(16, k)], s.rho_hat[mode_index(16, -k)].conj());
        }
    }

    #[test]
    fn bessel_norm_is_below_homogeneous_on_zero_mean(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = random_density_coeffs(16, 0.0, 1.0, &mut r);
        prop_assert!(hminus1_coeffs(&c) <= hminus1_homogeneous_coeffs(&c));
    }
}

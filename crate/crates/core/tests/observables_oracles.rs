use fslwalk_core::algebra::{AlgebraKind, AlgebraParams, AlgebraRep, Su11Sector};
use fslwalk_core::observables::{
    asymmetry, coin_entropy, fsl_distribution, linear_fit, power_law_fit, spread, support_radius, Distribution,
};
use fslwalk_core::oracles::{
    bessel_j, bessel_j_sequence, e2_kernel, e2_max_group_velocity, ideal_dtqw, neighbor_overlap, su11_moments,
    Su11Regime,
};
use fslwalk_core::states::{make_state, CoinInit, StateSpec};
use fslwalk_core::walk::{displace, evolve, CoinSpec, WalkConfig, WalkOptions, WalkerState};
use fslwalk_core::C64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn e2(window: u32) -> AlgebraRep {
    AlgebraRep::build(AlgebraKind::Euclidean2, AlgebraParams::Euclidean2 { window }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ideal_walk_keeps_parity_and_light_cone(m in 0usize..60, a in -1.0f64..1.0, b in -1.0f64..1.0, ph in 0.0f64..6.3) {
        let norm = (a * a + b * b).sqrt().max(1e-3);
        let coin = [c(a / norm, 0.0), C64::from_polar(b / norm, ph)];
        let walk = ideal_dtqw(m, coin);
        let total: f64 = walk.probabilities().iter().map(|(_, p)| p).sum();
        prop_assert!((total - (a * a + b * b) / (norm * norm)).abs() < 1e-12);
        for (j, p) in walk.probabilities() {
            if (j - m as i64).rem_euclid(2) != 0 {
                prop_assert_eq!(p, 0.0);
            }
        }
        prop_assert_eq!(walk.probability(m as i64 + 1), 0.0);
    }

    #[test]
    fn bessel_sum_rule(x in 0.0f64..40.0) {
        let lmax = (x as usize) + 40;
        let j = bessel_j_sequence(x, lmax);
        let sum = j[0] * j[0] + 2.0 * j[1..].iter().map(|v| v * v).sum::<f64>();
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_fit_recovers_exact_lines(slope in -5.0f64..5.0, intercept in -5.0f64..5.0, n in 3usize..30) {
        let xs: Vec<f64> = (0..n).map(|i| i as f64 * 0.7 - 3.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| slope * x + intercept).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-10);
        prop_assert!((fit.intercept - intercept).abs() < 1e-10);
        prop_assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn power_law_fit_recovers_exponents(p in -2.0f64..3.0, scale in 0.1f64..10.0) {
        let xs: Vec<f64> = (1..=12).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| scale * x.powf(p)).collect();
        prop_assert!((power_law_fit(&xs, &ys).unwrap().slope - p).abs() < 1e-10);
    }

    #[test]
    fn spread_is_translation_invariant(shift in -20i64..20, width in 1usize..10) {
        let rep = e2(60);
        let mut p = vec![0.0; rep.site_count()];
        for k in 0..=width {
            let j = shift + k as i64 - (width / 2) as i64;
            p[rep.site_index(&[j]).unwrap()] = 1.0 + k as f64;
        }
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        let moved: Vec<f64> = (0..rep.site_count()).map(|s| {
            let j = rep.label(s)[0] - shift;
            rep.site_index(&[j]).map(|t| p[t]).unwrap_or(0.0)
        }).collect();
        let a = spread(&Distribution::from_probabilities(&rep, p, 0.0).unwrap(), 0).unwrap();
        let b = spread(&Distribution::from_probabilities(&rep, moved, 0.0).unwrap(), 0).unwrap();
        prop_assert!((a.sigma - b.sigma).abs() < 1e-10);
        prop_assert!((b.mean[0] - a.mean[0] - shift as f64).abs() < 1e-10);
    }
}

#[test]
fn bessel_values() {
    assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-12);
    assert!((bessel_j(-1, 1.0) + 0.440_050_585_744_933_5).abs() < 1e-12);
}

#[test]
fn e2_walk_matches_the_kernel() {
    let rep = e2(120);
    let walker = make_state(&rep, &StateSpec::E2Site(0)).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let chi = [c(h, 0.0), c(0.0, h)];
    let config = WalkConfig::new(0.5, 30, CoinSpec::Hadamard, CoinInit::SymmetricPlusI);
    let init = WalkerState::with_coin(walker.as_slice(), &config.coin_init, 2).unwrap();
    let traj = evolve(&init, &rep, &config, &WalkOptions::default(), 10).unwrap();
    for snap in traj.iter().skip(1) {
        let kernel = e2_kernel(snap.step, 0.5, 100).unwrap();
        let expected = kernel.probabilities(chi);
        let dist = fsl_distribution(&snap.state, &rep).unwrap();
        let mut worst: f64 = 0.0;
        for (i, q) in expected.iter().enumerate() {
            let j = i as i64 - 100;
            worst = worst.max((dist.get(rep.site_index(&[j]).unwrap()) - q).abs());
        }
        assert!(worst < 1e-10, "step {} worst {worst}", snap.step);
    }
}

#[test]
fn e2_front_moves_at_the_maximal_group_velocity() {
    let rep = e2(120);
    let beta = 0.5;
    let v = e2_max_group_velocity(beta);
    assert!((v - 0.5 * 2f64.sqrt()).abs() < 1e-6);
    let walker = make_state(&rep, &StateSpec::E2Site(0)).unwrap();
    let config = WalkConfig::new(beta, 50, CoinSpec::Hadamard, CoinInit::Basis(0));
    let init = WalkerState::with_coin(walker.as_slice(), &config.coin_init, 2).unwrap();
    let last = evolve(&init, &rep, &config, &WalkOptions::default(), 50).unwrap().pop().unwrap();
    let dist = fsl_distribution(&last.state, &rep).unwrap();
    let mass_beyond = |x: f64| -> f64 {
        (0..rep.site_count()).filter(|&s| (rep.label(s)[0].abs() as f64) > x).map(|s| dist.get(s)).sum()
    };
    // the front is an Airy profile about m^(1/3) sites wide, so a few
    // percent sits right at the edge and the tail dies a few widths out
    let front = v * 50.0;
    assert!(mass_beyond(0.9 * front) > 0.05);
    assert!(mass_beyond(front + 20.0) < 1e-8);
}

#[test]
fn su11_single_displacement_matches_closed_form() {
    for sector in [Su11Sector::Even, Su11Sector::Odd] {
        let rep = AlgebraRep::build(AlgebraKind::Su11, AlgebraParams::Su11 { sector, n_max: 600 + sector.parity() }).unwrap();
        let floor = make_state(&rep, &StateSpec::Fock(vec![sector.parity() as i64])).unwrap();
        for beta in [0.1, 0.4, 0.8] {
            let v = displace(&rep, floor.as_slice(), c(beta, 0.0), 0, &WalkOptions::default().expm).unwrap();
            let probs: Vec<f64> = v.as_slice().iter().map(|z| z.norm_sqr()).collect();
            let n = |s: usize| rep.label(s)[0] as f64;
            let mean: f64 = probs.iter().enumerate().map(|(s, p)| p * n(s)).sum();
            let var: f64 = probs.iter().enumerate().map(|(s, p)| p * (n(s) - mean).powi(2)).sum();
            let oracle = su11_moments(beta, 1, sector, Su11Regime::Displacement);
            assert!((mean - oracle.mean_n).abs() < 1e-8, "{sector:?} {beta}: {mean} vs {}", oracle.mean_n);
            assert!((var - oracle.var_n).abs() < 1e-8, "{sector:?} {beta}: {var} vs {}", oracle.var_n);
        }
    }
}

#[test]
fn neighbor_overlaps() {
    let near = neighbor_overlap(AlgebraKind::Su2, c(0.0, 0.01), 2500.0).unwrap().value();
    let far = neighbor_overlap(AlgebraKind::Su2, c(0.0, 0.05), 2500.0).unwrap().value();
    assert_eq!((near * 100.0).round() / 100.0, 0.88);
    assert_eq!((far * 100.0).round() / 100.0, 0.04);
    let hw = neighbor_overlap(AlgebraKind::HeisenbergWeyl, c(3.0, 0.0), 0.0).unwrap().value();
    assert!((hw - (-4.5f64).exp()).abs() < 1e-15);
    assert!(neighbor_overlap(AlgebraKind::Su3, c(0.1, 0.0), 0.0).is_err());
}

#[test]
fn asymmetry_and_support_of_a_skewed_distribution() {
    let rep = e2(10);
    let mut p = vec![0.0; rep.site_count()];
    p[rep.site_index(&[3]).unwrap()] = 0.6;
    p[rep.site_index(&[-2]).unwrap()] = 0.3;
    p[rep.site_index(&[0]).unwrap()] = 0.1;
    let dist = Distribution::from_probabilities(&rep, p, 0.0).unwrap();
    assert!((asymmetry(&dist, 0.0).unwrap() - 0.3).abs() < 1e-15);
    // mean 1.2: farthest occupied site is j = -2
    assert!((support_radius(&dist, 0.05).unwrap() - 3.2).abs() < 1e-12);
    assert!((support_radius(&dist, 0.35).unwrap() - 1.8).abs() < 1e-12);
}

#[test]
fn product_states_carry_no_coin_entropy() {
    let rep = e2(40);
    let walker = make_state(&rep, &StateSpec::E2Site(0)).unwrap();
    let state = WalkerState::with_coin(walker.as_slice(), &CoinInit::SymmetricPlusI, 2).unwrap();
    assert!(coin_entropy(&state).unwrap().abs() < 1e-12);
    let config = WalkConfig::new(0.7, 3, CoinSpec::Hadamard, CoinInit::SymmetricPlusI);
    let last = evolve(&state, &rep, &config, &WalkOptions::default(), 3).unwrap().pop().unwrap();
    let s = coin_entropy(&last.state).unwrap();
    assert!(s > 0.0 && s <= 1.0 + 1e-12);
}

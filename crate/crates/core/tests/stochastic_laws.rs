use pwquant_core::stochastic::{
    discrepancy, iid_sample, kronecker_sample, mean_min_distance_stats, survival_curve,
    survival_law, Theta,
};

#[test]
fn mean_min_distance_matches_expectation() {
    for (i, n) in [1usize, 2, 5, 10, 50].into_iter().enumerate() {
        let s = mean_min_distance_stats(n, 20_000, 100 + i as u64).unwrap();
        let expected = n as f64 / (2.0 * (n as f64 + 1.0));
        assert!(
            (s.mean - expected).abs() <= 3.0 * s.std_error + 1e-12,
            "n = {n}: {s:?} vs {expected}"
        );
    }
}

#[test]
fn survival_matches_finite_law() {
    let trials = 20_000;
    for n in [1usize, 3, 10, 40] {
        let t = [0.25, 0.5, 1.0];
        let s = survival_curve(n, trials, n as u64, &t).unwrap();
        for (got, &t) in s.iter().zip(&t) {
            let p = survival_law(n, t);
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            assert!(
                (got - p).abs() <= 4.0 * sigma,
                "n = {n}, t = {t}: {got} vs {p}"
            );
        }
    }
}

#[test]
fn discrepancy_inequalities_on_generated_samples() {
    for seed in 0..200u64 {
        for n in [1usize, 2, 7, 64, 500] {
            let d = discrepancy(&iid_sample(n, seed)).unwrap();
            assert!(d.d_star <= d.d_extreme && d.d_extreme <= 2.0 * d.d_star);
        }
    }
    for n in 1..400 {
        let d = discrepancy(&kronecker_sample(&Theta::Golden, n).unwrap()).unwrap();
        assert!(d.d_star <= d.d_extreme && d.d_extreme <= 2.0 * d.d_star);
        assert!(d.d_star >= 0.5 / n as f64);
    }
}

#[test]
fn scaled_discrepancy_grows_with_n() {
    let sizes = [100usize, 1_000, 10_000];
    let iid: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            let mean: f64 = (0..20)
                .map(|s| discrepancy(&iid_sample(n, s)).unwrap().d_star)
                .sum::<f64>()
                / 20.0;
            n as f64 * mean
        })
        .collect();
    let kron: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            n as f64
                * discrepancy(&kronecker_sample(&Theta::Golden, n).unwrap())
                    .unwrap()
                    .d_star
        })
        .collect();
    assert!(iid.windows(2).all(|w| w[0] < w[1]), "{iid:?}");
    // the rotation's n D* is not monotone (about 1.42, 1.34, 2.57 here);
    // it only stays within a log factor
    for (&n, k) in sizes.iter().zip(&kron) {
        assert!(*k < (n as f64).ln(), "{kron:?}");
    }
    // bounded partial quotients keep the rotation far below the random case
    assert!(kron[2] < iid[2] / 10.0);
}

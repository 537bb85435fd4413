use rmtlab_core::configspace::*;

#[test]
fn poisson_correlations_are_flat() {
    let lambda = 3.0;
    let sampler = PoissonSampler::new(lambda, 2.0, 1).unwrap();
    let samples = draw_samples(&sampler, 20_000, 8);
    let bins = Bins::new(-2.0, 2.0, 4).unwrap();
    let rho1 = correlation_estimate(&samples, 1, bins).unwrap();
    for i in 0..4 {
        let (v, se) = (rho1.get(i, 0), rho1.std_errors[i]);
        assert!((v - lambda).abs() < 4.0 * se, "rho1 bin {i}: {v} ± {se}");
    }
    let rho2 = correlation_estimate(&samples, 2, bins).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let (v, se) = (rho2.get(i, j), rho2.std_errors[i * 4 + j]);
            assert!((v - lambda * lambda).abs() < 4.0 * se, "rho2 ({i},{j}): {v} ± {se}");
        }
    }
}

#[test]
fn counting_truncation_recovers_count() {
    let w = Window::new(1.0, 1).unwrap();
    let f = LocalFunction::counting(w);
    let xi = Configuration::on_line(&[-0.9, -0.2, 0.3, 0.7, 2.5]).unwrap();
    for m in 1..4 {
        assert!((truncate(&f, m, &xi).unwrap() - 4.0).abs() < 1e-12);
    }
    assert_eq!(truncate(&f, 0, &xi).unwrap(), 0.0);
}

use qcache::queue::{b_coefficients, mean_wait_analytic, mean_wait_markov, simulate_queue, QueueParams};

#[test]
fn markov_agrees_with_simulation_on_a_sample() {
    let cases = [(2e5, 1e5, 5), (5e4, 1e5, 9), (1.2e6, 2e4, 3), (5e4, 4.41e6, 2), (2e5, 2.5e4, 7)];
    for (i, &(l, g, cap)) in cases.iter().enumerate() {
        let q = QueueParams::new(l, g, cap).unwrap();
        let m = mean_wait_markov(&q).unwrap();
        let d = simulate_queue(&q, 400_000, 100 + i as u64).unwrap();
        let tol = (0.01 * m.mean_wait_s).max(3.0 * d.stderr_s);
        assert!(
            (m.mean_wait_s - d.mean_wait_s).abs() <= tol,
            "l={l} g={g} cap={cap}: markov {} des {} +- {}",
            m.mean_wait_s,
            d.mean_wait_s,
            d.stderr_s
        );
        let (mb, db) = (m.blocking_probability.unwrap(), d.blocking_probability.unwrap());
        assert!((mb - db).abs() < 0.01, "blocking {mb} vs {db}");
        for (a, b) in m.stationary_distribution.iter().zip(&d.stationary_distribution) {
            assert!((a - b).abs() < 0.01);
        }
    }
}

#[test]
fn literal_formula_stays_finite_or_reports_degeneracy() {
    for cap in 1..=9 {
        let q = QueueParams::new(2e5, 1e5, cap).unwrap();
        match mean_wait_analytic(&q) {
            Ok(w) => assert!(w.is_finite()),
            Err(e) => assert!(e.to_string().contains("degenerate")),
        }
    }
    assert_eq!(b_coefficients(4, 0.7).len(), 5);
}

use fgs_core::hamiltonian::{QuadraticHamiltonian, diag_h, random_hamiltonian};
use fgs_core::linalg::{C64, CMat};
use fgs_core::oracle::DenseState;
use fgs_core::state::{
    CorrelationMatrix, gamma_to_covariance, gs_gamma, inject_gamma, parity_expectation, product,
    reduce_gamma, tensor_compose, thermal_fix_beta, wick_expectation,
};

fn thermal_pair(n: usize, seed: u64, beta: f64) -> (QuadraticHamiltonian, CorrelationMatrix, DenseState) {
    let h = random_hamiltonian(n, seed, true).unwrap();
    let spec = diag_h(&h.compact()).unwrap();
    let g = thermal_fix_beta(&spec, beta).unwrap();
    let d = DenseState::thermal(&h, beta).unwrap();
    (h, g, d)
}

fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
    (a - b).iter().all(|z| z.norm() < tol)
}

#[test]
fn thermal_correlations_match() {
    for n in 1..=4 {
        for (seed, beta) in [(1, 0.3), (2, 1.0), (3, 3.0)] {
            let (_, g, d) = thermal_pair(n, seed + 10 * n as u64, beta);
            assert!(close(g.matrix(), &d.correlation_matrix(), 1e-10), "n={n} beta={beta}");
        }
    }
}

#[test]
fn ground_state_matches() {
    let h = random_hamiltonian(4, 77, true).unwrap();
    let g = gs_gamma(&diag_h(&h.compact()).unwrap());
    let d = DenseState::ground(&h).unwrap();
    assert!(close(g.matrix(), &d.correlation_matrix(), 1e-10));
}

#[test]
fn wick_and_parity_match() {
    let (_, g, d) = thermal_pair(3, 5, 0.8);
    let cov = gamma_to_covariance(&g);
    let dim = 6usize;
    for mask in 0u32..(1 << dim) {
        let idx: Vec<usize> = (0..dim).filter(|&i| mask >> i & 1 == 1).collect();
        let w = wick_expectation(&cov, &idx).unwrap();
        let e = d.majorana_expectation(&idx);
        assert!((w - e).norm() < 1e-10, "{idx:?}: {w} vs {e}");
    }
    let p = parity_expectation(&cov).unwrap();
    assert!((C64::new(p, 0.0) - d.parity()).norm() < 1e-10);
}

#[test]
fn product_matches_operator_product() {
    let (_, g1, d1) = thermal_pair(3, 21, 0.7);
    let (_, g2, d2) = thermal_pair(3, 22, 1.1);
    let p = product(&g1, &g2).unwrap();
    let dp = d1.product(&d2).unwrap();
    assert!(close(p.matrix(), &dp.correlation_matrix(), 1e-10));
}

#[test]
fn reduce_matches_partial_trace() {
    let (_, g, d) = thermal_pair(5, 31, 1.0);
    let r = reduce_gamma(&g, 2, 0).unwrap();
    let dr = d.partial_trace_leading(2).unwrap();
    assert!(close(r.matrix(), &dr.correlation_matrix(), 1e-10));
}

#[test]
fn compose_matches_kronecker() {
    let (_, ga, da) = thermal_pair(2, 41, 0.9);
    let (_, gb, db) = thermal_pair(3, 42, 0.4);
    let g = tensor_compose(&ga, &gb);
    let d = da.kron(&db).unwrap();
    assert!(close(g.matrix(), &d.correlation_matrix(), 1e-10));
    let (_, gc, dc) = thermal_pair(2, 43, 2.0);
    let inj = inject_gamma(&g, &gc, 0).unwrap();
    let dinj = dc.kron(&d.partial_trace_leading(5).unwrap()).unwrap();
    let _ = dinj;
    assert!(close(
        reduce_gamma(&inj, 2, 0).unwrap().matrix(),
        &dc.correlation_matrix(),
        1e-12
    ));
}

#[test]
fn real_time_matches() {
    use fgs_core::dynamics::evolve;
    let (h, g, d) = thermal_pair(3, 51, 0.6);
    let h2 = random_hamiltonian(3, 52, true).unwrap();
    let spec2 = diag_h(&h2.compact()).unwrap();
    let _ = h;
    for t in [0.3, 1.7] {
        let gt = evolve(&g, &spec2, t).unwrap();
        let dt = d.evolve(&h2, t).unwrap();
        assert!(close(gt.matrix(), &dt.correlation_matrix(), 1e-10), "t={t}");
    }
}

#[test]
fn imaginary_time_matches() {
    use fgs_core::dynamics::evolve_imag;
    let (_, g, d) = thermal_pair(3, 61, 0.6);
    let h2 = random_hamiltonian(3, 62, true).unwrap();
    let spec2 = diag_h(&h2.compact()).unwrap();
    for tau in [0.2, 0.5, 2.5] {
        let gt = evolve_imag(&g, &spec2, tau).unwrap();
        let dt = d.evolve_imag(&h2, tau).unwrap();
        assert!(close(gt.matrix(), &dt.correlation_matrix(), 1e-9), "tau={tau}");
    }
}

//! One-sided Jacobi SVD for small square real matrices.
//!
//! nalgebra's bidiagonal QR can stop early when singular values cluster
//! (errors near 1e-5 were observed for values around `1 - 1e-4`), which is
//! exactly the regime of nearly pure Gaussian states. Jacobi rotations are
//! slower but reach full relative accuracy.

use super::RMat;

const MAX_SWEEPS: usize = 80;

pub(crate) struct JacobiSvd {
    pub u: RMat,
    pub sigma: Vec<f64>,
    pub v: RMat,
}

/// `a = u diag(sigma) v^T` with `u`, `v` orthogonal. Singular values are
/// left in column order, not sorted.
pub(crate) fn jacobi_svd(a: &RMat) -> JacobiSvd {
    let n = a.ncols();
    assert_eq!(a.nrows(), n, "jacobi_svd expects a square matrix");
    let mut w = a.clone();
    let mut v = RMat::identity(n, n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate(&mut w, p, q, cs, sn);
                rotate(&mut v, p, q, cs, sn);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = (0..n).map(|k| w.column(k).norm()).collect();
    let scale = sigma.iter().cloned().fold(0.0, f64::max);
    let mut u = RMat::zeros(n, n);
    let mut missing = Vec::new();
    for k in 0..n {
        if sigma[k] > 1e-300 && sigma[k] > f64::EPSILON * scale * 1e-3 {
            u.set_column(k, &(w.column(k) / sigma[k]));
        } else {
            missing.push(k);
        }
    }
    // Complete the left basis for (numerically) zero singular values.
    let mut e = 0;
    for k in missing {
        while e < n {
            let mut x = RMat::zeros(n, 1);
            x[(e, 0)] = 1.0;
            e += 1;
            for _ in 0..2 {
                for j in 0..n {
                    if j != k {
                        let cj = u.column(j).dot(&x.column(0));
                        x -= u.column(j) * cj;
                    }
                }
            }
            let norm = x.norm();
            if norm > 0.5 {
                u.set_column(k, &(x.column(0) / norm));
                break;
            }
        }
    }
    JacobiSvd { u, sigma, v }
}

fn rotate(m: &mut RMat, p: usize, q: usize, cs: f64, sn: f64) {
    for i in 0..m.nrows() {
        let (x, y) = (m[(i, p)], m[(i, q)]);
        m[(i, p)] = cs * x - sn * y;
        m[(i, q)] = sn * x + cs * y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn clustered_values_are_resolved() {
        for seed in 0..200u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 6;
            let q = RMat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0)).qr().q();
            let p = RMat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0)).qr().q();
            let vals: Vec<f64> = (0..n).map(|i| 1.0 - 10f64.powi(-2 * i as i32) * rng.random_range(0.5..1.0)).collect();
            let a = &q * RMat::from_diagonal(&nalgebra::DVector::from_vec(vals.clone())) * p.transpose();
            let s = jacobi_svd(&a);
            let back = &s.u * RMat::from_diagonal(&nalgebra::DVector::from_vec(s.sigma.clone())) * s.v.transpose();
            assert!((back - &a).norm() < 1e-13);
            assert!((s.u.transpose() * &s.u - RMat::identity(n, n)).norm() < 1e-13);
            let mut got = s.sigma.clone();
            got.sort_by(|a, b| b.total_cmp(a));
            let mut want = vals;
            want.sort_by(|a, b| b.total_cmp(a));
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rank_deficient_gets_a_full_basis() {
        let mut a = RMat::zeros(4, 4);
        a[(0, 1)] = 2.0;
        a[(2, 3)] = -1.0;
        let s = jacobi_svd(&a);
        assert!((s.u.transpose() * &s.u - RMat::identity(4, 4)).norm() < 1e-14);
        assert!((s.v.transpose() * &s.v - RMat::identity(4, 4)).norm() < 1e-14);
    }
}

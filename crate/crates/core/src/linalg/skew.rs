use nalgebra::DVector;

use super::RMat;
use crate::error::{FgsError, Result};

const SKEW_TOL: f64 = 1e-12;
const ZERO_TOL: f64 = 1e-12;

/// Real antisymmetric matrix of even dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct RealSkewMatrix(RMat);

impl RealSkewMatrix {
    /// Validates antisymmetry, repairing residuals below `1e-12 * max(1, |h|)`.
    pub fn new(h: RMat) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(FgsError::InvalidInput(format!(
                "skew matrix must be square, got {}x{}",
                h.nrows(),
                h.ncols()
            )));
        }
        if h.nrows() % 2 != 0 {
            return Err(FgsError::InvalidInput(format!(
                "skew matrix must have even dimension, got {}",
                h.nrows()
            )));
        }
        if h.iter().any(|x| !x.is_finite()) {
            return Err(FgsError::InvalidInput("skew matrix has non-finite entries".into()));
        }
        let scale = h.amax().max(1.0);
        let asym = (&h + h.transpose()).amax();
        if asym > SKEW_TOL * scale {
            return Err(FgsError::InvalidInput(format!(
                "matrix is not antisymmetric (residual {asym:e})"
            )));
        }
        Ok(Self((&h - h.transpose()) * 0.5))
    }

    pub fn matrix(&self) -> &RMat {
        &self.0
    }

    pub fn into_inner(self) -> RMat {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

/// `h = O * h_D * O^T` where `h_D` is block diagonal with blocks
/// `[[0, lambda_k], [-lambda_k, 0]]` in interleaved `(x0, p0, x1, p1, ...)`
/// ordering.
#[derive(Clone, Debug)]
pub struct SkewDecomposition {
    /// Nonnegative, ascending.
    pub lambdas: Vec<f64>,
    pub orthogonal: RMat,
}

impl SkewDecomposition {
    pub fn block_diagonal(&self) -> RMat {
        let n = self.lambdas.len();
        let mut d = RMat::zeros(2 * n, 2 * n);
        for (k, &l) in self.lambdas.iter().enumerate() {
            d[(2 * k, 2 * k + 1)] = l;
            d[(2 * k + 1, 2 * k)] = -l;
        }
        d
    }

    pub fn reconstruct(&self) -> RMat {
        &self.orthogonal * self.block_diagonal() * self.orthogonal.transpose()
    }

    /// Reorders the blocks so that `lambdas` is descending; ties keep their
    /// relative order.
    pub(crate) fn into_descending(self) -> Self {
        let n = self.lambdas.len();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| self.lambdas[b].total_cmp(&self.lambdas[a]));
        let mut o = RMat::zeros(2 * n, 2 * n);
        for (new, &old) in idx.iter().enumerate() {
            o.set_column(2 * new, &self.orthogonal.column(2 * old));
            o.set_column(2 * new + 1, &self.orthogonal.column(2 * old + 1));
        }
        Self { lambdas: idx.iter().map(|&i| self.lambdas[i]).collect(), orthogonal: o }
    }
}

/// Householder reduction of a skew matrix to skew tridiagonal form.
/// Returns the superdiagonal `e` and the accumulated orthogonal `q` with
/// `h = q * T * q^T`.
fn tridiagonalize(h: &RMat) -> (Vec<f64>, RMat) {
    let n = h.nrows();
    let mut a = h.clone();
    let mut q = RMat::identity(n, n);
    for k in 0..n.saturating_sub(2) {
        let x = a.view((k + 1, k), (n - k - 1, 1)).column(0).into_owned();
        let tail = x.rows(1, x.len() - 1).norm();
        if tail == 0.0 {
            continue;
        }
        let norm = x.norm();
        let alpha = if x[0] > 0.0 { -norm } else { norm };
        let mut v = DVector::zeros(n);
        v.rows_mut(k + 1, n - k - 1).copy_from(&x);
        v[k + 1] -= alpha;
        let tau = 2.0 / v.norm_squared();

        // A <- P A P with P = I - tau v v^T; for skew A this is A + tau (v w^T - w v^T).
        let w = {
            let sub = a.view((k, k + 1), (n - k, n - k - 1));
            sub * v.rows(k + 1, n - k - 1)
        };
        for j in k..n {
            let wj = w[j - k];
            let vj = v[j];
            for i in k..n {
                a[(i, j)] += tau * (v[i] * wj - w[i - k] * vj);
            }
        }
        for i in (k + 2)..n {
            a[(i, k)] = 0.0;
            a[(k, i)] = 0.0;
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = -alpha;

        let qv = q.columns(k + 1, n - k - 1) * v.rows(k + 1, n - k - 1);
        for j in (k + 1)..n {
            let s = tau * v[j];
            if s != 0.0 {
                for i in 0..n {
                    q[(i, j)] -= s * qv[i];
                }
            }
        }
    }
    let e = (0..n - 1).map(|i| a[(i, i + 1)]).collect();
    (e, q)
}

fn gauge_sign(v: &[f64]) -> f64 {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for &x in v {
        if x.abs() > best * (1.0 + 1e-12) {
            best = x.abs();
            sign = if x < 0.0 { -1.0 } else { 1.0 };
        }
    }
    sign
}

/// Block diagonalizes a real skew matrix of dimension 2N.
///
/// The skew tridiagonal form is split into its even/odd bidiagonal core,
/// whose singular triplets give the invariant planes. Each plane is oriented
/// with gauge-fixed vectors; a negative block value swaps the plane's two
/// basis vectors so that every returned `lambda` is nonnegative.
pub fn diag_real_skew(h: &RealSkewMatrix) -> Result<SkewDecomposition> {
    let dim = h.dim();
    let n = dim / 2;
    if n == 0 {
        return Ok(SkewDecomposition { lambdas: vec![], orthogonal: RMat::zeros(0, 0) });
    }
    let scale = h.matrix().norm();
    let (e, q) = tridiagonalize(h.matrix());

    let mut b = RMat::zeros(n, n);
    for k in 0..n {
        b[(k, k)] = e[2 * k];
        if k > 0 {
            b[(k, k - 1)] = -e[2 * k - 1];
        }
    }
    let svd = super::jacobi_svd(&b);
    let (pu, pv) = (svd.u, svd.v);

    let q_even = RMat::from_fn(dim, n, |i, k| q[(i, 2 * k)]);
    let q_odd = RMat::from_fn(dim, n, |i, k| q[(i, 2 * k + 1)]);
    let xs = &q_even * &pu;
    let ys = &q_odd * &pv;

    let mut blocks: Vec<(f64, usize, bool, f64, f64)> = (0..n)
        .map(|k| {
            let sx = gauge_sign(pu.column(k).as_slice());
            let sy = gauge_sign(pv.column(k).as_slice());
            let signed = svd.sigma[k] * sx * sy;
            let mut lam = signed.abs();
            if lam < ZERO_TOL * scale {
                lam = 0.0;
            }
            (lam, k, signed < 0.0, sx, sy)
        })
        .collect();
    blocks.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut o = RMat::zeros(dim, dim);
    for (pos, &(_, k, swap, sx, sy)) in blocks.iter().enumerate() {
        let x = xs.column(k) * sx;
        let y = ys.column(k) * sy;
        if swap {
            o.set_column(2 * pos, &y);
            o.set_column(2 * pos + 1, &x);
        } else {
            o.set_column(2 * pos, &x);
            o.set_column(2 * pos + 1, &y);
        }
    }
    Ok(SkewDecomposition { lambdas: blocks.iter().map(|b| b.0).collect(), orthogonal: o })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_skew(n: usize, seed: u64) -> RMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = RMat::from_fn(2 * n, 2 * n, |_, _| rng.random_range(-1.0..1.0));
        &m - m.transpose()
    }

    fn check(h: &RMat, d: &SkewDecomposition) {
        let o = &d.orthogonal;
        let dim = h.nrows();
        assert!((o * o.transpose() - RMat::identity(dim, dim)).amax() < 1e-12);
        assert!((d.reconstruct() - h).amax() < 1e-11 * h.amax().max(1.0));
        assert!(d.lambdas.windows(2).all(|w| w[0] <= w[1]));
        assert!(d.lambdas.iter().all(|&l| l >= 0.0));
    }

    #[test]
    fn two_by_two_examples() {
        let h = RMat::from_row_slice(2, 2, &[0.0, 3.0, -3.0, 0.0]);
        let d = diag_real_skew(&RealSkewMatrix::new(h).unwrap()).unwrap();
        assert_eq!(d.lambdas, vec![3.0]);
        assert!((d.orthogonal.clone() - RMat::identity(2, 2)).amax() < 1e-15);

        let h = RMat::from_row_slice(2, 2, &[0.0, -2.0, 2.0, 0.0]);
        let d = diag_real_skew(&RealSkewMatrix::new(h).unwrap()).unwrap();
        assert_eq!(d.lambdas, vec![2.0]);
        let swap = RMat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!((d.orthogonal.clone() - swap).amax() < 1e-15);
    }

    #[test]
    fn zero_matrix() {
        let d = diag_real_skew(&RealSkewMatrix::new(RMat::zeros(4, 4)).unwrap()).unwrap();
        assert_eq!(d.lambdas, vec![0.0, 0.0]);
        check(&RMat::zeros(4, 4), &d);
    }

    #[test]
    fn rejects_non_skew_and_odd() {
        let h = RMat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(RealSkewMatrix::new(h), Err(FgsError::InvalidInput(_))));
        assert!(RealSkewMatrix::new(RMat::zeros(3, 3)).is_err());
    }

    #[test]
    fn random_matrices_match_complex_eigenvalues() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (5, 4), (8, 5), (17, 6)] {
            let h = random_skew(n, seed);
            let d = diag_real_skew(&RealSkewMatrix::new(h.clone()).unwrap()).unwrap();
            check(&h, &d);
            // i*h is Hermitian with eigenvalues +-lambda.
            let ih = h.map(|x| Complex64::new(0.0, x));
            let mut ev: Vec<f64> =
                ih.symmetric_eigen().eigenvalues.iter().copied().filter(|&x| x > 0.0).collect();
            ev.sort_by(f64::total_cmp);
            assert_eq!(ev.len(), n);
            for (a, b) in ev.iter().zip(&d.lambdas) {
                assert!((a - b).abs() < 1e-11, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn degenerate_and_rank_deficient() {
        // Direct sum of identical blocks conjugated by a random rotation.
        let n = 4;
        let mut hd = RMat::zeros(2 * n, 2 * n);
        for (k, l) in [1.0, 1.0, 0.0, 2.5].iter().enumerate() {
            hd[(2 * k, 2 * k + 1)] = *l;
            hd[(2 * k + 1, 2 * k)] = -*l;
        }
        let qr = random_skew(n, 9).map(|x| x + 0.3).qr();
        let rot: DMatrix<f64> = qr.q();
        let h = &rot * hd * rot.transpose();
        let d = diag_real_skew(&RealSkewMatrix::new(h.clone()).unwrap()).unwrap();
        check(&h, &d);
        assert_eq!(d.lambdas[0], 0.0);
        assert!((d.lambdas[1] - 1.0).abs() < 1e-12);
        assert!((d.lambdas[2] - 1.0).abs() < 1e-12);
        assert!((d.lambdas[3] - 2.5).abs() < 1e-12);
    }
}

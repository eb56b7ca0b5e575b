//! Dense linear algebra used throughout the crate: basis changes between
//! Dirac and Majorana operators, skew-symmetric block diagonalization and
//! Pfaffians.

mod pfaffian;
mod skew;
mod svd;

pub use pfaffian::{PfaffianScalar, pfaffian};
pub use skew::{RealSkewMatrix, SkewDecomposition, diag_real_skew};
pub(crate) use svd::jacobi_svd;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Index permutation acting as `out[i] = input[map[i]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    pub map: Vec<usize>,
}

impl Permutation {
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn to_matrix(&self) -> RMat {
        let n = self.map.len();
        let mut p = RMat::zeros(n, n);
        for (i, &j) in self.map.iter().enumerate() {
            p[(i, j)] = 1.0;
        }
        p
    }

    pub fn apply<T: Clone>(&self, v: &[T]) -> Vec<T> {
        self.map.iter().map(|&j| v[j].clone()).collect()
    }
}

/// The Dirac to Majorana change of basis, `r = Omega * alpha`.
pub fn build_omega(n_modes: usize) -> CMat {
    let n = n_modes;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut om = CMat::zeros(2 * n, 2 * n);
    for j in 0..n {
        om[(j, j)] = c(s);
        om[(j, n + j)] = c(s);
        om[(n + j, j)] = C64::new(0.0, s);
        om[(n + j, n + j)] = C64::new(0.0, -s);
    }
    om
}

/// Permutation from interleaved `(x0, p0, x1, p1, ...)` ordering to blocked
/// `(x0, x1, ..., p0, p1, ...)` ordering.
pub fn build_xp_to_xx(n_modes: usize) -> Permutation {
    let n = n_modes;
    let mut map = vec![0; 2 * n];
    for j in 0..n {
        map[j] = 2 * j;
        map[n + j] = 2 * j + 1;
    }
    Permutation { map }
}

/// Block-diagonal Fourier unitary `diag(W, conj(W))` with
/// `W[j][k] = exp(-2 pi i (j+1)(k+1) / N) / sqrt(N)`.
///
/// `U * H * U^dagger` is diagonal for any compact Hamiltonian of a
/// translation-invariant pairing-free chain with periodic boundaries.
pub fn build_fourier_matrix(n_modes: usize) -> CMat {
    let n = n_modes;
    let mut u = CMat::zeros(2 * n, 2 * n);
    let norm = 1.0 / (n as f64).sqrt();
    for j in 0..n {
        for k in 0..n {
            let p = ((j + 1) * (k + 1)) % n;
            let w = C64::from_polar(norm, -2.0 * std::f64::consts::PI * p as f64 / n as f64);
            u[(j, k)] = w;
            u[(n + j, n + k)] = w.conj();
        }
    }
    u
}

/// Eigenvalues `lambda_j = sum_m c_m w^(j m)`, `w = exp(-2 pi i / N)`, of the
/// circulant matrix whose first row is `c`, for `j = 0..N`.
pub fn circulant_eigenvalues(first_row: &[C64]) -> Vec<C64> {
    let n = first_row.len();
    (0..n)
        .map(|j| {
            first_row
                .iter()
                .enumerate()
                .map(|(m, &cm)| {
                    let p = (j * m) % n;
                    cm * C64::from_polar(1.0, -2.0 * std::f64::consts::PI * p as f64 / n as f64)
                })
                .sum()
        })
        .collect()
}

/// Inverse of [`circulant_eigenvalues`].
pub fn circulant_from_eigenvalues(eigs: &[C64]) -> Vec<C64> {
    let n = eigs.len();
    (0..n)
        .map(|m| {
            eigs.iter()
                .enumerate()
                .map(|(j, &l)| {
                    let p = (j * m) % n;
                    l * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * p as f64 / n as f64)
                })
                .sum::<C64>()
                / n as f64
        })
        .collect()
}

fn split(x: &CMat) -> (CMat, CMat, CMat, CMat) {
    let n = x.nrows() / 2;
    (
        x.view((0, 0), (n, n)).into_owned(),
        x.view((0, n), (n, n)).into_owned(),
        x.view((n, 0), (n, n)).into_owned(),
        x.view((n, n), (n, n)).into_owned(),
    )
}

fn join(b11: &CMat, b12: &CMat, b21: &CMat, b22: &CMat) -> CMat {
    let n = b11.nrows();
    let mut out = CMat::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(b11);
    out.view_mut((0, n), (n, n)).copy_from(b12);
    out.view_mut((n, 0), (n, n)).copy_from(b21);
    out.view_mut((n, n), (n, n)).copy_from(b22);
    out
}

/// `Omega * X * Omega^dagger` in O(N^2).
pub fn omega_conj(x: &CMat) -> CMat {
    let (x11, x12, x21, x22) = split(x);
    let h = c(0.5);
    let s1 = &x11 + &x21;
    let s2 = &x12 + &x22;
    let d1 = &x11 - &x21;
    let d2 = &x12 - &x22;
    join(
        &((&s1 + &s2) * h),
        &((&s2 - &s1) * (I * 0.5)),
        &((&d1 + &d2) * (I * 0.5)),
        &((&d1 - &d2) * h),
    )
}

/// `Omega^dagger * Y * Omega` in O(N^2).
pub fn omega_dag_conj(y: &CMat) -> CMat {
    let (y11, y12, y21, y22) = split(y);
    let h = c(0.5);
    let a = &y11 + &y22;
    let b = &y11 - &y22;
    let p = &y12 + &y21;
    let m = &y12 - &y21;
    join(
        &((&a + &m * I) * h),
        &((&b - &p * I) * h),
        &((&b + &p * I) * h),
        &((&a - &m * I) * h),
    )
}

pub(crate) fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermitian_residual(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub(crate) fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_c(n: usize, seed: u64) -> CMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMat::from_fn(n, n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn omega_is_unitary() {
        let om = build_omega(3);
        let id = &om * om.adjoint();
        assert!((id - CMat::identity(6, 6)).norm() < 1e-14);
    }

    #[test]
    fn omega_conjugations_match_products() {
        let x = random_c(8, 3);
        let om = build_omega(4);
        let a = &om * &x * om.adjoint();
        assert!((omega_conj(&x) - a).norm() < 1e-13);
        let b = om.adjoint() * &x * &om;
        assert!((omega_dag_conj(&x) - b).norm() < 1e-13);
    }

    #[test]
    fn xp_to_xx_two_modes() {
        let f = build_xp_to_xx(2);
        assert_eq!(f.apply(&["x0", "p0", "x1", "p1"]), vec!["x0", "x1", "p0", "p1"]);
        let m = f.to_matrix();
        assert!((&m * m.transpose() - RMat::identity(4, 4)).norm() < 1e-15);
    }

    #[test]
    fn fourier_matrix_diagonalizes_hopping() {
        let n = 7;
        let mut h = CMat::zeros(2 * n, 2 * n);
        for i in 0..n {
            let j = (i + 1) % n;
            h[(n + i, n + j)] += c(0.5);
            h[(n + j, n + i)] += c(0.5);
            h[(i, j)] -= c(0.5);
            h[(j, i)] -= c(0.5);
        }
        let u = build_fourier_matrix(n);
        assert!((&u * u.adjoint() - CMat::identity(2 * n, 2 * n)).norm() < 1e-13);
        let d = &u * &h * u.adjoint();
        for i in 0..2 * n {
            for j in 0..2 * n {
                if i != j {
                    assert!(d[(i, j)].norm() < 1e-13);
                }
            }
        }
        for k in 0..n {
            let phi = (2.0 * std::f64::consts::PI * (k + 1) as f64 / n as f64).cos();
            assert!((d[(n + k, n + k)] - c(phi)).norm() < 1e-13);
            assert!((d[(k, k)] + c(phi)).norm() < 1e-13);
        }
    }

    #[test]
    fn circulant_round_trip_and_dense_eigenvalues() {
        let row = vec![c(0.0), c(0.5), c(0.0), c(0.0), c(0.5)];
        let eigs = circulant_eigenvalues(&row);
        for (j, l) in eigs.iter().enumerate() {
            let phi = (2.0 * std::f64::consts::PI * j as f64 / 5.0).cos();
            assert!((l - c(phi)).norm() < 1e-14);
        }
        let back = circulant_from_eigenvalues(&eigs);
        for (a, b) in back.iter().zip(&row) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}

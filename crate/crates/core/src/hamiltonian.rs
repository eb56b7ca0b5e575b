//! Quadratic fermionic Hamiltonians
//! `H = sum_ij A_ij a_i^+ a_j - conj(A_ij) a_i a_j^+ + B_ij a_i a_j - conj(B_ij) a_i^+ a_j^+`,
//! their compact and Majorana forms, and diagonalization.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{FgsError, Result};
use crate::linalg::{
    C64, CMat, I, RMat, RealSkewMatrix, build_xp_to_xx, c, diag_real_skew, max_abs, omega_conj,
    omega_dag_conj,
};

const STRUCT_TOL: f64 = 1e-10;

/// Hopping matrix `A` (Hermitian) and pairing matrix `B` (antisymmetric).
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticHamiltonian {
    a: CMat,
    b: CMat,
}

impl QuadraticHamiltonian {
    pub fn new(a: CMat, b: CMat) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || b.nrows() != n || b.ncols() != n {
            return Err(FgsError::InvalidInput(format!(
                "A and B must be square and of equal size, got {}x{} and {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
        if a.iter().chain(b.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(FgsError::InvalidInput("Hamiltonian has non-finite entries".into()));
        }
        let scale = max_abs(&a).max(max_abs(&b)).max(1.0);
        let ra = max_abs(&(&a - a.adjoint()));
        if ra > STRUCT_TOL * scale {
            return Err(FgsError::InvalidInput(format!("A is not Hermitian (residual {ra:e})")));
        }
        let rb = max_abs(&(&b + b.transpose()));
        if rb > STRUCT_TOL * scale {
            return Err(FgsError::InvalidInput(format!(
                "B is not antisymmetric (residual {rb:e})"
            )));
        }
        let a = (&a + a.adjoint()) * c(0.5);
        let b = (&b - b.transpose()) * c(0.5);
        Ok(Self { a, b })
    }

    pub fn n_modes(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    pub fn compact(&self) -> CompactHamiltonian {
        compact_form(self)
    }
}

/// `H = [[-conj(A), B], [-conj(B), A]]`, so that the operator is
/// `alpha^+ H alpha` with `alpha = (a^+, a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompactHamiltonian(CMat);

impl CompactHamiltonian {
    pub fn new(h: CMat) -> Result<Self> {
        let d = h.nrows();
        if h.ncols() != d || d % 2 != 0 {
            return Err(FgsError::InvalidInput(format!(
                "compact Hamiltonian must be 2N x 2N, got {}x{}",
                h.nrows(),
                h.ncols()
            )));
        }
        let n = d / 2;
        let scale = max_abs(&h).max(1.0);
        let herm = max_abs(&(&h - h.adjoint()));
        if herm > STRUCT_TOL * scale {
            return Err(FgsError::InvalidInput(format!(
                "compact Hamiltonian is not Hermitian (residual {herm:e})"
            )));
        }
        let h11 = h.view((0, 0), (n, n));
        let h22 = h.view((n, n), (n, n));
        let h12 = h.view((0, n), (n, n));
        let h21 = h.view((n, 0), (n, n));
        let r1 = max_abs(&(h11 + h22.map(|z| z.conj())));
        let r2 = max_abs(&(h21 + h12.map(|z| z.conj())));
        if r1.max(r2) > STRUCT_TOL * scale {
            return Err(FgsError::InvalidInput(format!(
                "compact Hamiltonian blocks are inconsistent (residual {:e})",
                r1.max(r2)
            )));
        }
        Ok(Self(h))
    }

    pub(crate) fn from_raw(h: CMat) -> Self {
        Self(h)
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn n_modes(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn to_quadratic(&self) -> QuadraticHamiltonian {
        let n = self.n_modes();
        QuadraticHamiltonian {
            a: self.0.view((n, n), (n, n)).into_owned(),
            b: self.0.view((0, n), (n, n)).into_owned(),
        }
    }
}

pub fn compact_form(h: &QuadraticHamiltonian) -> CompactHamiltonian {
    let n = h.n_modes();
    let mut m = CMat::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&h.a.map(|z| -z.conj()));
    m.view_mut((0, n), (n, n)).copy_from(&h.b);
    m.view_mut((n, 0), (n, n)).copy_from(&h.b.map(|z| -z.conj()));
    m.view_mut((n, n), (n, n)).copy_from(&h.a);
    CompactHamiltonian(m)
}

/// Real skew `h` with `i h = Omega H Omega^dagger`.
pub fn to_majorana(h: &CompactHamiltonian) -> Result<RealSkewMatrix> {
    let ih = omega_conj(&h.0);
    let scale = max_abs(&ih).max(1.0);
    // h = -i * (i h): the real part of i h must vanish.
    let resid = ih.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    if resid > STRUCT_TOL * scale {
        return Err(FgsError::InconsistentInput(format!(
            "Majorana form has an imaginary residue of {resid:e}"
        )));
    }
    let real = RMat::from_fn(ih.nrows(), ih.ncols(), |i, j| ih[(i, j)].im);
    RealSkewMatrix::new(real).map_err(|e| FgsError::InconsistentInput(e.to_string()))
}

/// Compact Hamiltonian `Omega^dagger (i h) Omega` of a real skew matrix.
pub(crate) fn compact_from_majorana(h: &RMat) -> CMat {
    omega_dag_conj(&h.map(|x| I * x))
}

/// Single-particle spectrum: `H = U diag(-eps, eps) U^dagger` with `eps`
/// descending and nonnegative. `orthogonal` is the matching Majorana
/// rotation in interleaved `(x, p)` block ordering.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub epsilons: Vec<f64>,
    pub orthogonal: RMat,
    pub unitary: CMat,
}

impl Spectrum {
    pub fn n_modes(&self) -> usize {
        self.epsilons.len()
    }

    pub fn ground_energy(&self) -> f64 {
        -self.epsilons.iter().sum::<f64>()
    }

    /// `diag(-eps, eps)`.
    pub fn diagonal(&self) -> CMat {
        let n = self.n_modes();
        let mut d = CMat::zeros(2 * n, 2 * n);
        for (k, &e) in self.epsilons.iter().enumerate() {
            d[(k, k)] = c(-e);
            d[(n + k, n + k)] = c(e);
        }
        d
    }
}

/// Majorana matrix `O * blocks(values) * O^T`, with block `k` equal to
/// `[[0, v_k], [-v_k, 0]]`.
pub(crate) fn rotate_blocks(o: &RMat, values: &[f64]) -> RMat {
    let n = values.len();
    // O * D: column 2k <- -v_k * O[:, 2k+1], column 2k+1 <- v_k * O[:, 2k].
    let mut od = RMat::zeros(2 * n, 2 * n);
    for (k, &v) in values.iter().enumerate() {
        od.set_column(2 * k, &(o.column(2 * k + 1) * -v));
        od.set_column(2 * k + 1, &(o.column(2 * k) * v));
    }
    od * o.transpose()
}

/// `U = Omega^dagger O F^T Omega` for an interleaved-ordering rotation `O`.
pub(crate) fn unitary_from_orthogonal(o: &RMat) -> CMat {
    let n = o.nrows() / 2;
    let f = build_xp_to_xx(n);
    let mut m = CMat::zeros(2 * n, 2 * n);
    for (col, &src) in f.map.iter().enumerate() {
        for i in 0..2 * n {
            m[(i, col)] = c(o[(i, src)]);
        }
    }
    omega_dag_conj(&m)
}

pub fn diag_h(h: &CompactHamiltonian) -> Result<Spectrum> {
    let maj = to_majorana(h)?;
    let dec = diag_real_skew(&maj)?.into_descending();
    let unitary = unitary_from_orthogonal(&dec.orthogonal);
    Ok(Spectrum { epsilons: dec.lambdas, orthogonal: dec.orthogonal, unitary })
}

/// Nearest-neighbour hopping chain with `A_{i,i+1} = A_{i+1,i} = 1/2`, optional
/// periodic closure, and no pairing.
pub fn build_hopping(n: usize, pbc: bool) -> Result<QuadraticHamiltonian> {
    if n < 2 {
        return Err(FgsError::InvalidInput(format!("hopping chain needs N >= 2, got {n}")));
    }
    let mut a = CMat::zeros(n, n);
    for i in 0..n - 1 {
        a[(i, i + 1)] += c(0.5);
        a[(i + 1, i)] += c(0.5);
    }
    if pbc {
        a[(0, n - 1)] += c(0.5);
        a[(n - 1, 0)] += c(0.5);
    }
    QuadraticHamiltonian::new(a, CMat::zeros(n, n))
}

/// Boundary sign of the fermionic transverse-field Ising chain.
pub fn check_boundary_sign(g: i32, name: &str) -> Result<()> {
    if matches!(g, -1..=1) {
        Ok(())
    } else {
        Err(FgsError::InvalidInput(format!("{name} must be -1, 0, or +1")))
    }
}

/// Jordan-Wigner image of the transverse-field Ising chain with field
/// strength `cot(theta)` and fermionic boundary sign `g_f`.
pub fn build_tfi(n: usize, theta: f64, g_f: i32) -> Result<QuadraticHamiltonian> {
    check_boundary_sign(g_f, "g_F")?;
    if n < 2 {
        return Err(FgsError::InvalidInput(format!("Ising chain needs N >= 2, got {n}")));
    }
    let cot = 1.0 / theta.tan();
    if !cot.is_finite() {
        return Err(FgsError::InvalidInput(format!("cot(theta) is not finite for theta = {theta}")));
    }
    let g = g_f as f64;
    let mut a = CMat::zeros(n, n);
    let mut b = CMat::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = c(-cot);
    }
    for i in 0..n - 1 {
        a[(i, i + 1)] += c(-0.5);
        a[(i + 1, i)] += c(-0.5);
        b[(i, i + 1)] += c(0.5);
        b[(i + 1, i)] += c(-0.5);
    }
    a[(0, n - 1)] += c(-0.5 * g);
    a[(n - 1, 0)] += c(-0.5 * g);
    b[(0, n - 1)] += c(-0.5 * g);
    b[(n - 1, 0)] += c(0.5 * g);
    QuadraticHamiltonian::new(a, b)
}

fn uniform_c(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
}

/// Random open chain with nearest-neighbour hopping, pairing and on-site
/// terms; real and imaginary parts uniform on `[-1, 1]` before
/// symmetrization.
pub fn random_nn_hamiltonian(n: usize, seed: u64) -> Result<QuadraticHamiltonian> {
    if n == 0 {
        return Err(FgsError::InvalidInput("N must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = CMat::zeros(n, n);
    let mut b = CMat::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = uniform_c(&mut rng);
        if i + 1 < n {
            a[(i, i + 1)] = uniform_c(&mut rng);
            a[(i + 1, i)] = uniform_c(&mut rng);
            b[(i, i + 1)] = uniform_c(&mut rng);
            b[(i + 1, i)] = uniform_c(&mut rng);
        }
    }
    let a = (&a + a.adjoint()) * c(0.5);
    let b = (&b - b.transpose()) * c(0.5);
    QuadraticHamiltonian::new(a, b)
}

/// Random all-to-all Hamiltonian; `pairing = false` gives `B = 0`.
pub fn random_hamiltonian(n: usize, seed: u64, pairing: bool) -> Result<QuadraticHamiltonian> {
    if n == 0 {
        return Err(FgsError::InvalidInput("N must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = CMat::from_fn(n, n, |_, _| uniform_c(&mut rng));
    let b = if pairing {
        CMat::from_fn(n, n, |_, _| uniform_c(&mut rng))
    } else {
        CMat::zeros(n, n)
    };
    let a = (&a + a.adjoint()) * c(0.5);
    let b = (&b - b.transpose()) * c(0.5);
    QuadraticHamiltonian::new(a, b)
}

/// Random translation-invariant periodic chain whose couplings at distance
/// `d` decay like `exp(-d / xi)`.
pub fn random_ti_hamiltonian(n: usize, seed: u64, xi: f64) -> Result<QuadraticHamiltonian> {
    if n < 2 || !(xi > 0.0) {
        return Err(FgsError::InvalidInput("need N >= 2 and xi > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ra = vec![C64::new(0.0, 0.0); n];
    let mut rb = vec![C64::new(0.0, 0.0); n];
    ra[0] = c(rng.random_range(-1.0..=1.0));
    for d in 1..=n / 2 {
        let amp = (-(d as f64) / xi).exp();
        let ad = uniform_c(&mut rng) * amp;
        let bd = uniform_c(&mut rng) * amp;
        if 2 * d == n {
            ra[d] = c(ad.re);
        } else {
            ra[d] = ad;
            ra[n - d] = ad.conj();
            rb[d] = bd;
            rb[n - d] = -bd;
        }
    }
    let a = CMat::from_fn(n, n, |i, j| ra[(j + n - i) % n]);
    let b = CMat::from_fn(n, n, |i, j| rb[(j + n - i) % n]);
    QuadraticHamiltonian::new(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_example() {
        let a = CMat::from_row_slice(1, 1, &[c(2.0)]);
        let h = QuadraticHamiltonian::new(a, CMat::zeros(1, 1)).unwrap();
        let m = compact_form(&h);
        assert_eq!(m.matrix()[(0, 0)], c(-2.0));
        assert_eq!(m.matrix()[(1, 1)], c(2.0));
        assert_eq!(m.matrix()[(0, 1)], c(0.0));
    }

    #[test]
    fn majorana_of_single_mode() {
        let a = CMat::from_row_slice(1, 1, &[c(1.5)]);
        let h = QuadraticHamiltonian::new(a, CMat::zeros(1, 1)).unwrap();
        let maj = to_majorana(&h.compact()).unwrap();
        let expect = RMat::from_row_slice(2, 2, &[0.0, 1.5, -1.5, 0.0]);
        assert!((maj.matrix() - expect).amax() < 1e-15);
    }

    #[test]
    fn majorana_block_formula() {
        let h = random_hamiltonian(4, 11, true).unwrap();
        let maj = to_majorana(&h.compact()).unwrap();
        let (a, b) = (h.a(), h.b());
        let n = 4;
        for i in 0..n {
            for j in 0..n {
                let s = a[(i, j)] + b[(i, j)];
                let d = a[(i, j)] - b[(i, j)];
                let m = maj.matrix();
                assert!((m[(i, j)] - s.im).abs() < 1e-14);
                assert!((m[(i, n + j)] - s.re).abs() < 1e-14);
                assert!((m[(n + i, j)] + d.re).abs() < 1e-14);
                assert!((m[(n + i, n + j)] - d.im).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let a = CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(2.0), c(0.0)]);
        assert!(QuadraticHamiltonian::new(a, CMat::zeros(2, 2)).is_err());
        assert!(matches!(build_tfi(10, 1.0, 2), Err(FgsError::InvalidInput(m)) if m == "g_F must be -1, 0, or +1"));
    }

    #[test]
    fn tfi_two_sites_without_boundary() {
        let h = build_tfi(2, std::f64::consts::FRAC_PI_4, 0).unwrap();
        let a = CMat::from_row_slice(2, 2, &[c(-1.0), c(-0.5), c(-0.5), c(-1.0)]);
        let b = CMat::from_row_slice(2, 2, &[c(0.0), c(0.5), c(-0.5), c(0.0)]);
        assert!((h.a() - a).norm() < 1e-14);
        assert!((h.b() - b).norm() < 1e-14);
    }

    #[test]
    fn diag_h_reconstructs() {
        for seed in 0..4 {
            let h = random_hamiltonian(5, seed, true).unwrap().compact();
            let s = diag_h(&h).unwrap();
            let u = &s.unitary;
            assert!((u * u.adjoint() - CMat::identity(10, 10)).norm() < 1e-12);
            let back = u * s.diagonal() * u.adjoint();
            assert!((back - h.matrix()).norm() < 1e-11);
            assert!(s.epsilons.windows(2).all(|w| w[0] >= w[1]));
            assert!(s.epsilons.iter().all(|&e| e >= 0.0));
        }
    }

    #[test]
    fn diag_h_single_mode_sign() {
        let a = CMat::from_row_slice(1, 1, &[c(-0.7)]);
        let h = QuadraticHamiltonian::new(a, CMat::zeros(1, 1)).unwrap().compact();
        let s = diag_h(&h).unwrap();
        assert!((s.epsilons[0] - 0.7).abs() < 1e-15);
        let back = &s.unitary * s.diagonal() * s.unitary.adjoint();
        assert!((back - h.matrix()).norm() < 1e-14);
    }

    #[test]
    fn hopping_ground_energy_matches_dispersion() {
        let n = 16;
        let s = diag_h(&build_hopping(n, true).unwrap().compact()).unwrap();
        let e: f64 = (1..=n)
            .map(|k| (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos().abs())
            .sum();
        assert!((s.ground_energy() + e).abs() < 1e-12);
    }

    #[test]
    fn rotate_blocks_matches_dense_product() {
        let s = diag_h(&random_hamiltonian(3, 5, true).unwrap().compact()).unwrap();
        let v = [0.3, -1.0, 2.0];
        let mut d = RMat::zeros(6, 6);
        for (k, &x) in v.iter().enumerate() {
            d[(2 * k, 2 * k + 1)] = x;
            d[(2 * k + 1, 2 * k)] = -x;
        }
        let dense = &s.orthogonal * d * s.orthogonal.transpose();
        assert!((rotate_blocks(&s.orthogonal, &v) - dense).amax() < 1e-13);
    }
}

//! Brute-force reference on the full `2^N` Fock space via the Jordan-Wigner
//! construction. Intended for validation with small `N`.
//!
//! Basis state `s` has mode `j` occupied when bit `N - 1 - j` is set, so
//! mode 0 is the leftmost tensor factor.

use crate::error::{FgsError, Result};
use crate::hamiltonian::QuadraticHamiltonian;
use crate::linalg::{C64, CMat, I, c};

pub const MAX_ORACLE_MODES: usize = 12;

fn check_size(n: usize) -> Result<()> {
    if n > MAX_ORACLE_MODES {
        Err(FgsError::ResourceLimit(format!(
            "dense oracle supports at most {MAX_ORACLE_MODES} modes, got {n}"
        )))
    } else {
        Ok(())
    }
}

/// Operator with at most one nonzero entry per column:
/// `X |s> = coeff[s] |target[s]>`.
#[derive(Clone, Debug)]
pub struct MonomialOp {
    n_modes: usize,
    target: Vec<usize>,
    coeff: Vec<C64>,
}

impl MonomialOp {
    pub fn identity(n_modes: usize) -> Self {
        let dim = 1 << n_modes;
        Self { n_modes, target: (0..dim).collect(), coeff: vec![c(1.0); dim] }
    }

    fn bit(&self, j: usize) -> usize {
        1 << (self.n_modes - 1 - j)
    }

    fn jw_sign(&self, s: usize, j: usize) -> f64 {
        let before = s >> (self.n_modes - j);
        if before.count_ones() % 2 == 0 { 1.0 } else { -1.0 }
    }

    fn ladder(n_modes: usize, j: usize, create: bool) -> Self {
        let mut op = Self::identity(n_modes);
        let b = op.bit(j);
        for s in 0..(1 << n_modes) {
            let occupied = s & b != 0;
            if occupied == create {
                op.coeff[s] = c(0.0);
            } else {
                op.coeff[s] = c(op.jw_sign(s, j));
                op.target[s] = s ^ b;
            }
        }
        op
    }

    pub fn annihilate(n_modes: usize, j: usize) -> Self {
        Self::ladder(n_modes, j, false)
    }

    pub fn create(n_modes: usize, j: usize) -> Self {
        Self::ladder(n_modes, j, true)
    }

    /// Component `i` of `alpha = (a^+_0, .., a^+_{N-1}, a_0, .., a_{N-1})`.
    pub fn alpha(n_modes: usize, i: usize) -> Self {
        if i < n_modes {
            Self::create(n_modes, i)
        } else {
            Self::annihilate(n_modes, i - n_modes)
        }
    }

    /// Component `i` of `alpha^dagger`.
    pub fn alpha_dag(n_modes: usize, i: usize) -> Self {
        if i < n_modes {
            Self::annihilate(n_modes, i)
        } else {
            Self::create(n_modes, i - n_modes)
        }
    }

    /// Majorana operator `r_i` with `r = (x_0, .., x_{N-1}, p_0, .., p_{N-1})`,
    /// `x = (a + a^+)/sqrt 2`, `p = (a - a^+)/(i sqrt 2)`.
    pub fn majorana(n_modes: usize, i: usize) -> Self {
        let mut op = Self::identity(n_modes);
        let j = i % n_modes;
        let b = op.bit(j);
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        for s in 0..(1 << n_modes) {
            let sign = op.jw_sign(s, j);
            let occupied = s & b != 0;
            op.target[s] = s ^ b;
            op.coeff[s] = if i < n_modes {
                c(sign * s2)
            } else if occupied {
                // a acts: 1/(i sqrt 2)
                -I * (sign * s2)
            } else {
                // -a^+ acts: -1/(i sqrt 2)
                I * (sign * s2)
            };
        }
        op
    }

    /// `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        let dim = self.target.len();
        let mut out = Self::identity(self.n_modes);
        for s in 0..dim {
            let t = other.target[s];
            out.target[s] = self.target[t];
            out.coeff[s] = self.coeff[t] * other.coeff[s];
        }
        out
    }

    pub fn scale(mut self, z: C64) -> Self {
        for x in &mut self.coeff {
            *x *= z;
        }
        self
    }

    /// `Tr[rho X]`.
    pub fn expectation(&self, rho: &CMat) -> C64 {
        (0..self.target.len()).map(|s| rho[(s, self.target[s])] * self.coeff[s]).sum()
    }

    pub fn add_to(&self, m: &mut CMat, z: C64) {
        for s in 0..self.target.len() {
            let cf = self.coeff[s];
            if cf != c(0.0) {
                m[(self.target[s], s)] += z * cf;
            }
        }
    }

    pub fn to_dense(&self) -> CMat {
        let dim = self.target.len();
        let mut m = CMat::zeros(dim, dim);
        self.add_to(&mut m, c(1.0));
        m
    }
}

/// Many-body Hamiltonian on the Fock space.
pub fn dense_hamiltonian(h: &QuadraticHamiltonian) -> Result<CMat> {
    let n = h.n_modes();
    check_size(n)?;
    let dim = 1 << n;
    let ann: Vec<_> = (0..n).map(|j| MonomialOp::annihilate(n, j)).collect();
    let cre: Vec<_> = (0..n).map(|j| MonomialOp::create(n, j)).collect();
    let mut m = CMat::zeros(dim, dim);
    for i in 0..n {
        for j in 0..n {
            let a = h.a()[(i, j)];
            let b = h.b()[(i, j)];
            if a != c(0.0) {
                cre[i].mul(&ann[j]).add_to(&mut m, a);
                ann[i].mul(&cre[j]).add_to(&mut m, -a.conj());
            }
            if b != c(0.0) {
                ann[i].mul(&ann[j]).add_to(&mut m, b);
                cre[i].mul(&cre[j]).add_to(&mut m, -b.conj());
            }
        }
    }
    Ok(m)
}

/// Function of a Hermitian matrix through its eigendecomposition.
fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> C64) -> CMat {
    let eig = m.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let mut vd = v.clone();
    for (k, &e) in eig.eigenvalues.iter().enumerate() {
        let fe = f(e);
        for i in 0..vd.nrows() {
            vd[(i, k)] *= fe;
        }
    }
    vd * v.adjoint()
}

/// Density operator on `2^N` states (not necessarily Hermitian after
/// [`DenseState::product`]).
#[derive(Clone, Debug)]
pub struct DenseState {
    n_modes: usize,
    rho: CMat,
}

impl DenseState {
    pub fn new(n_modes: usize, rho: CMat) -> Result<Self> {
        check_size(n_modes)?;
        if rho.nrows() != 1 << n_modes || rho.ncols() != 1 << n_modes {
            return Err(FgsError::InvalidInput("density matrix has the wrong size".into()));
        }
        Ok(Self { n_modes, rho })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn rho(&self) -> &CMat {
        &self.rho
    }

    /// `exp(-beta H) / Z`.
    pub fn thermal(h: &QuadraticHamiltonian, beta: f64) -> Result<Self> {
        let hm = dense_hamiltonian(h)?;
        let emin = hm.clone().symmetric_eigenvalues().min();
        let w = hermitian_fn(&hm, |e| c((-beta * (e - emin)).exp()));
        let z = w.trace();
        Ok(Self { n_modes: h.n_modes(), rho: w / z })
    }

    /// Projector on the lowest eigenvector; fails if it is degenerate.
    pub fn ground(h: &QuadraticHamiltonian) -> Result<Self> {
        let hm = dense_hamiltonian(h)?;
        let eig = hm.symmetric_eigen();
        let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        if idx.len() > 1 && eig.eigenvalues[idx[1]] - eig.eigenvalues[idx[0]] < 1e-9 {
            return Err(FgsError::DegenerateMode("many-body ground state is degenerate".into()));
        }
        let v = eig.eigenvectors.column(idx[0]).into_owned();
        Ok(Self { n_modes: h.n_modes(), rho: &v * v.adjoint() })
    }

    pub fn vacuum(n_modes: usize) -> Result<Self> {
        check_size(n_modes)?;
        let dim = 1 << n_modes;
        let mut rho = CMat::zeros(dim, dim);
        rho[(0, 0)] = c(1.0);
        Ok(Self { n_modes, rho })
    }

    pub fn expectation(&self, op: &MonomialOp) -> C64 {
        op.expectation(&self.rho)
    }

    pub fn energy(&self, h: &QuadraticHamiltonian) -> Result<C64> {
        Ok((&self.rho * dense_hamiltonian(h)?).trace())
    }

    /// `Gamma_ij = Tr[rho alpha_i alpha_j^dagger]`.
    pub fn correlation_matrix(&self) -> CMat {
        let n = self.n_modes;
        let al: Vec<_> = (0..2 * n).map(|i| MonomialOp::alpha(n, i)).collect();
        let ad: Vec<_> = (0..2 * n).map(|i| MonomialOp::alpha_dag(n, i)).collect();
        CMat::from_fn(2 * n, 2 * n, |i, j| al[i].mul(&ad[j]).expectation(&self.rho))
    }

    /// `Tr[rho r_{q_1} ... r_{q_p}]`.
    pub fn majorana_expectation(&self, indices: &[usize]) -> C64 {
        let n = self.n_modes;
        let mut op = MonomialOp::identity(n);
        for &q in indices {
            op = op.mul(&MonomialOp::majorana(n, q));
        }
        op.expectation(&self.rho)
    }

    /// `Tr[rho prod_j (1 - 2 n_j)]`.
    pub fn parity(&self) -> C64 {
        (0..self.rho.nrows())
            .map(|s| {
                let sign = if s.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                self.rho[(s, s)] * sign
            })
            .sum()
    }

    /// `exp(-i H t) rho exp(i H t)`.
    pub fn evolve(&self, h: &QuadraticHamiltonian, t: f64) -> Result<Self> {
        let hm = dense_hamiltonian(h)?;
        let u = hermitian_fn(&hm, |e| C64::from_polar(1.0, -e * t));
        Ok(Self { n_modes: self.n_modes, rho: &u * &self.rho * u.adjoint() })
    }

    /// `exp(-H tau) rho exp(-H tau)`, normalized.
    pub fn evolve_imag(&self, h: &QuadraticHamiltonian, tau: f64) -> Result<Self> {
        let hm = dense_hamiltonian(h)?;
        let emin = hm.clone().symmetric_eigenvalues().min();
        let w = hermitian_fn(&hm, |e| c((-tau * (e - emin)).exp()));
        let r = &w * &self.rho * &w;
        let z = r.trace();
        Ok(Self { n_modes: self.n_modes, rho: r / z })
    }

    /// `rho_1 rho_2 / Tr[rho_1 rho_2]`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.n_modes != other.n_modes {
            return Err(FgsError::InvalidInput("mode counts differ".into()));
        }
        let r = &self.rho * &other.rho;
        let z = r.trace();
        if z.norm() < 1e-300 {
            return Err(FgsError::InvalidInput("product has vanishing trace".into()));
        }
        Ok(Self { n_modes: self.n_modes, rho: r / z })
    }

    /// Reduced state of the first `m` modes.
    pub fn partial_trace_leading(&self, m: usize) -> Result<Self> {
        if m > self.n_modes {
            return Err(FgsError::InvalidInput("cannot keep more modes than present".into()));
        }
        let rest = self.n_modes - m;
        let dk = 1 << m;
        let dr = 1 << rest;
        let rho = CMat::from_fn(dk, dk, |i, j| {
            (0..dr).map(|k| self.rho[((i << rest) | k, (j << rest) | k)]).sum()
        });
        Ok(Self { n_modes: m, rho })
    }

    /// Tensor product with `other`'s modes placed after this state's modes.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        check_size(self.n_modes + other.n_modes)?;
        Ok(Self { n_modes: self.n_modes + other.n_modes, rho: self.rho.kronecker(&other.rho) })
    }

    pub fn entropy(&self) -> f64 {
        let herm = (&self.rho + self.rho.adjoint()) * c(0.5);
        herm.symmetric_eigenvalues()
            .iter()
            .filter(|&&p| p > 1e-15)
            .map(|&p| -p * p.ln())
            .sum()
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.rho + self.rho.adjoint()) * c(0.5);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

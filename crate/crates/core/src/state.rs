//! Gaussian states described by `Gamma = <alpha alpha^dagger>`, with
//! `alpha = (a^+, a)`, and by the real Majorana covariance
//! `gamma = -i Omega (2 Gamma - 1) Omega^dagger`.

use crate::error::{FgsError, Result};
use crate::hamiltonian::{
    CompactHamiltonian, Spectrum, compact_from_majorana, rotate_blocks, unitary_from_orthogonal,
};
use crate::linalg::{
    C64, CMat, I, RMat, RealSkewMatrix, c, diag_real_skew, hermitian_residual, hermitize, max_abs,
    omega_conj, omega_dag_conj, pfaffian,
};

const HERM_TOL: f64 = 1e-10;
const BLOCK_TOL: f64 = 1e-8;
const CLAMP_TOL: f64 = 1e-8;
const PURE_TOL: f64 = 1e-12;
const COND_LIMIT: f64 = 1e12;
const BETA_MAX: f64 = 1e3;

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix(CMat);

impl CorrelationMatrix {
    /// Validates shape, Hermiticity (residuals below 1e-10 are projected away)
    /// and the block relations between the four `N x N` blocks.
    pub fn new(m: CMat) -> Result<Self> {
        let d = m.nrows();
        if m.ncols() != d || d % 2 != 0 || d == 0 {
            return Err(FgsError::InvalidInput(format!(
                "correlation matrix must be 2N x 2N with N > 0, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(FgsError::InvalidInput("correlation matrix has non-finite entries".into()));
        }
        let r = hermitian_residual(&m);
        if r > HERM_TOL {
            return Err(FgsError::InvalidInput(format!(
                "correlation matrix is not Hermitian (residual {r:e})"
            )));
        }
        let m = hermitize(&m);
        let n = d / 2;
        let g11 = m.view((0, 0), (n, n));
        let g12 = m.view((0, n), (n, n));
        let g21 = m.view((n, 0), (n, n));
        let g22 = m.view((n, n), (n, n));
        // <a a^+> = 1 - <a^+ a>^T and <a^+ a^+> = -conj(<a a>).
        let r1 = max_abs(&(g22 + g11.transpose() - CMat::identity(n, n)));
        let r2 = max_abs(&(g12 + g21.map(|z| z.conj())));
        if r1.max(r2) > BLOCK_TOL {
            return Err(FgsError::InvalidInput(format!(
                "correlation matrix violates block relations (residual {:e})",
                r1.max(r2)
            )));
        }
        Ok(Self(m))
    }

    pub(crate) fn from_raw(m: CMat) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }

    pub fn n_modes(&self) -> usize {
        self.0.nrows() / 2
    }

    /// `<a_i^+ a_j>`.
    pub fn hopping_block(&self) -> CMat {
        let n = self.n_modes();
        self.0.view((0, 0), (n, n)).into_owned()
    }

    /// `<a_i a_j>`.
    pub fn pairing_block(&self) -> CMat {
        let n = self.n_modes();
        self.0.view((n, 0), (n, n)).into_owned()
    }

    pub fn vacuum(n_modes: usize) -> Self {
        let n = n_modes;
        let mut m = CMat::zeros(2 * n, 2 * n);
        for i in 0..n {
            m[(n + i, n + i)] = c(1.0);
        }
        Self(m)
    }

    /// Maximally mixed state, `Gamma = 1/2`.
    pub fn maximally_mixed(n_modes: usize) -> Self {
        Self(CMat::identity(2 * n_modes, 2 * n_modes) * c(0.5))
    }
}

/// Real antisymmetric Majorana covariance.
#[derive(Clone, Debug, PartialEq)]
pub struct Covariance(RMat);

impl Covariance {
    pub fn new(g: RMat) -> Result<Self> {
        Ok(Self(RealSkewMatrix::new(g)?.into_inner()))
    }

    pub fn matrix(&self) -> &RMat {
        &self.0
    }

    pub fn n_modes(&self) -> usize {
        self.0.nrows() / 2
    }
}

pub fn gamma_to_covariance(g: &CorrelationMatrix) -> Covariance {
    let n = g.n_modes();
    let m = omega_conj(&(g.matrix() * c(2.0) - CMat::identity(2 * n, 2 * n)));
    // -i * m, keeping the real part.
    let cov = RMat::from_fn(2 * n, 2 * n, |i, j| m[(i, j)].im);
    Covariance((&cov - cov.transpose()) * 0.5)
}

pub fn covariance_to_gamma(g: &Covariance) -> CorrelationMatrix {
    let n = g.n_modes();
    let m = omega_dag_conj(&g.0.map(|x| I * x));
    CorrelationMatrix(hermitize(&((m + CMat::identity(2 * n, 2 * n)) * c(0.5))))
}

/// `Gamma = U diag(nu, 1 - nu) U^dagger` with `nu` ascending in `[0, 1/2]`.
#[derive(Clone, Debug)]
pub struct OccupationSpectrum {
    pub nus: Vec<f64>,
    pub orthogonal: RMat,
    pub unitary: CMat,
}

impl OccupationSpectrum {
    /// Block values `1 - 2 nu` of the covariance.
    pub fn etas(&self) -> Vec<f64> {
        self.nus.iter().map(|&v| 1.0 - 2.0 * v).collect()
    }
}

pub fn diag_gamma(g: &CorrelationMatrix) -> Result<OccupationSpectrum> {
    let cov = gamma_to_covariance(g);
    let dec = diag_real_skew(&RealSkewMatrix::new(cov.0)?)?.into_descending();
    let mut nus = Vec::with_capacity(dec.lambdas.len());
    for (k, &eta) in dec.lambdas.iter().enumerate() {
        let nu = 0.5 * (1.0 - eta);
        if nu < -CLAMP_TOL {
            return Err(FgsError::UnphysicalState(format!(
                "occupation {nu:e} of mode {k} lies outside [0, 1]"
            )));
        }
        nus.push(nu.max(0.0));
    }
    let unitary = unitary_from_orthogonal(&dec.orthogonal);
    Ok(OccupationSpectrum { nus, orthogonal: dec.orthogonal, unitary })
}

fn state_from_blocks(spec: &Spectrum, etas: &[f64]) -> CorrelationMatrix {
    covariance_to_gamma(&Covariance(rotate_blocks(&spec.orthogonal, etas)))
}

/// Ground state `U diag(0, 1) U^dagger`; zero modes are left empty.
pub fn gs_gamma(spec: &Spectrum) -> CorrelationMatrix {
    let etas: Vec<f64> = spec.epsilons.iter().map(|&e| if e > 0.0 { 1.0 } else { 0.0 }).collect();
    state_from_blocks(spec, &etas)
}

/// Thermal state at inverse temperature `beta`, occupations
/// `1 / (1 + exp(2 beta eps))`.
pub fn thermal_fix_beta(spec: &Spectrum, beta: f64) -> Result<CorrelationMatrix> {
    if !(beta >= 0.0) || beta.is_nan() {
        return Err(FgsError::InvalidInput(format!("beta must be nonnegative, got {beta}")));
    }
    if beta.is_infinite() {
        return Ok(gs_gamma(spec));
    }
    let etas: Vec<f64> = spec.epsilons.iter().map(|&e| (beta * e).tanh()).collect();
    Ok(state_from_blocks(spec, &etas))
}

/// Thermal energy `-sum eps tanh(beta eps)`.
pub fn thermal_energy(spec: &Spectrum, beta: f64) -> f64 {
    -spec.epsilons.iter().map(|&e| e * (beta * e).tanh()).sum::<f64>()
}

#[derive(Clone, Debug)]
pub struct ThermalFit {
    pub gamma: CorrelationMatrix,
    pub beta: f64,
    pub residual: f64,
}

/// Thermal state with energy `target`, found by bisection on
/// `beta in [0, 1000]`.
pub fn thermal_fix_energy(spec: &Spectrum, target: f64) -> Result<ThermalFit> {
    let emin = spec.ground_energy();
    let slack = 1e-12 * emin.abs().max(1.0);
    if !target.is_finite() || target > slack || target < emin - slack {
        return Err(FgsError::UnattainableEnergy { energy: target, min: emin, max: 0.0 });
    }
    let (mut lo, mut hi) = (0.0, BETA_MAX);
    if thermal_energy(spec, hi) >= target {
        lo = hi;
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if thermal_energy(spec, mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if (thermal_energy(spec, mid) - target).abs() <= 1e-12 * target.abs().max(1e-300) {
                lo = mid;
                break;
            }
        }
    }
    let beta = lo;
    let residual = (thermal_energy(spec, beta) - target).abs();
    Ok(ThermalFit { gamma: thermal_fix_beta(spec, beta)?, beta, residual })
}

/// `sum_k eps_k (<b_k^+ b_k> - <b_k b_k^+>)` with the diagonal entries of
/// `U^dagger Gamma U`.
pub fn energy(g: &CorrelationMatrix, spec: &Spectrum) -> Result<f64> {
    let n = spec.n_modes();
    if g.n_modes() != n {
        return Err(FgsError::InvalidInput(format!(
            "state has {} modes but the Hamiltonian has {n}",
            g.n_modes()
        )));
    }
    let u = &spec.unitary;
    let gu = g.matrix() * u;
    let diag = |k: usize| -> f64 { u.column(k).dotc(&gu.column(k)).re };
    Ok(spec.epsilons.iter().enumerate().map(|(k, &e)| e * (diag(k) - diag(n + k))).sum())
}

/// Occupations of the normal modes; the eigenvalues of the density operator
/// are products over modes of `nu_k` or `1 - nu_k`.
#[derive(Clone, Debug)]
pub struct RhoSpectrum {
    pub nus: Vec<f64>,
}

impl RhoSpectrum {
    /// Eigenvalue labelled by the bit string `x`.
    pub fn eigenvalue(&self, x: &[bool]) -> f64 {
        self.nus
            .iter()
            .zip(x)
            .map(|(&v, &b)| if b { v } else { 1.0 - v })
            .product()
    }

    /// All `2^N` eigenvalues, string `x_1 .. x_N` read as a binary number
    /// with `x_1` most significant.
    pub fn all(&self) -> Result<Vec<f64>> {
        let n = self.nus.len();
        if n > 24 {
            return Err(FgsError::ResourceLimit(format!("2^{n} eigenvalues requested")));
        }
        Ok((0..1usize << n)
            .map(|s| {
                let bits: Vec<bool> = (0..n).map(|k| s >> (n - 1 - k) & 1 == 1).collect();
                self.eigenvalue(&bits)
            })
            .collect())
    }
}

pub fn eigenvalues_of_rho(g: &CorrelationMatrix) -> Result<RhoSpectrum> {
    Ok(RhoSpectrum { nus: diag_gamma(g)?.nus })
}

fn mode_window(n: usize, len: usize, start: usize) -> Result<Vec<usize>> {
    if len == 0 || len > n {
        return Err(FgsError::InvalidInput(format!("window of {len} modes in a system of {n}")));
    }
    if start >= n {
        return Err(FgsError::InvalidInput(format!("start mode {start} out of range 0..{n}")));
    }
    Ok((0..len).map(|k| (start + k) % n).collect())
}

fn alpha_indices(n: usize, modes: &[usize]) -> Vec<usize> {
    modes.iter().copied().chain(modes.iter().map(|&m| n + m)).collect()
}

/// Correlation matrix of modes `start, start+1, .., start+m-1` (0-based,
/// wrapping around the end of the chain).
pub fn reduce_gamma(g: &CorrelationMatrix, m: usize, start: usize) -> Result<CorrelationMatrix> {
    let n = g.n_modes();
    let idx = alpha_indices(n, &mode_window(n, m, start)?);
    Ok(CorrelationMatrix(g.0.select_rows(&idx).select_columns(&idx)))
}

/// Replaces the modes `start, ..` (0-based, wrapping) by the state `inj`,
/// removing all their correlations with the remaining modes.
pub fn inject_gamma(
    g: &CorrelationMatrix,
    inj: &CorrelationMatrix,
    start: usize,
) -> Result<CorrelationMatrix> {
    let n = g.n_modes();
    let modes = mode_window(n, inj.n_modes(), start)?;
    let idx = alpha_indices(n, &modes);
    let mut inside = vec![false; 2 * n];
    for &i in &idx {
        inside[i] = true;
    }
    let mut out = g.0.clone();
    for i in 0..2 * n {
        for j in 0..2 * n {
            if inside[i] != inside[j] {
                out[(i, j)] = c(0.0);
            }
        }
    }
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            out[(i, j)] = inj.0[(a, b)];
        }
    }
    Ok(CorrelationMatrix(out))
}

/// State of the joint system with the modes of `a` followed by those of `b`.
pub fn tensor_compose(a: &CorrelationMatrix, b: &CorrelationMatrix) -> CorrelationMatrix {
    let total = CorrelationMatrix::vacuum(a.n_modes() + b.n_modes());
    let g = inject_gamma(&total, a, 0).expect("window fits");
    inject_gamma(&g, b, a.n_modes()).expect("window fits")
}

/// Correlation matrix of the normalized product `rho_1 rho_2`. The result is
/// Hermitian only when the two states commute.
pub fn product(g1: &CorrelationMatrix, g2: &CorrelationMatrix) -> Result<CorrelationMatrix> {
    let n = g1.n_modes();
    if g2.n_modes() != n {
        return Err(FgsError::InvalidInput(format!(
            "cannot multiply states of {} and {} modes",
            n,
            g2.n_modes()
        )));
    }
    let id = CMat::identity(2 * n, 2 * n);
    // In the `<alpha alpha^+>` convention the composition rule applied to
    // (G2, G1) yields the correlations of rho_1 rho_2.
    let a = g2.matrix() * c(2.0) - &id;
    let b = g1.matrix() * c(2.0) - &id;
    let m = &id + &a * &b;
    let sv = m.clone().singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition < COND_LIMIT) {
        return Err(FgsError::PathologicalProduct { condition });
    }
    let minv = m.try_inverse().ok_or(FgsError::PathologicalProduct { condition })?;
    let g = &id - (&id - &b) * minv * (&id - &a);
    Ok(CorrelationMatrix((g + id) * c(0.5)))
}

/// Eigenvalues of `Gamma` all lie in `[-tol, 1 + tol]` and `Gamma` is
/// Hermitian to within `tol`.
pub fn is_physical(g: &CorrelationMatrix, tol: f64) -> bool {
    if hermitian_residual(g.matrix()) > tol {
        return false;
    }
    let ev = hermitize(g.matrix()).symmetric_eigenvalues();
    ev.iter().all(|&x| x >= -tol && x <= 1.0 + tol)
}

/// `Tr[rho r_{q_1} ... r_{q_p}]` for strictly increasing 0-based indices,
/// equal to `(i/2)^(p/2) Pf(gamma restricted to q)`.
pub fn wick_expectation(cov: &Covariance, indices: &[usize]) -> Result<C64> {
    let d = cov.0.nrows();
    if indices.iter().any(|&q| q >= d) {
        return Err(FgsError::InvalidInput(format!("Majorana index out of range 0..{d}")));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FgsError::InvalidInput("Majorana indices must be strictly increasing".into()));
    }
    let p = indices.len();
    if p % 2 == 1 {
        return Ok(c(0.0));
    }
    let sub = cov.0.select_rows(indices).select_columns(indices);
    let pf = pfaffian(&sub)?;
    Ok((I * 0.5).powu((p / 2) as u32) * pf)
}

/// Expectation of the parity `prod_j (1 - 2 a_j^+ a_j)`: the Pfaffian of the
/// covariance in interleaved `(x_0, p_0, x_1, p_1, ..)` ordering.
pub fn parity_expectation(cov: &Covariance) -> Result<f64> {
    let n = cov.n_modes();
    let order: Vec<usize> = (0..n).flat_map(|j| [j, n + j]).collect();
    let sub = cov.0.select_rows(&order).select_columns(&order);
    pfaffian(&sub)
}

/// Hamiltonian whose thermal state at `beta = 1` is `g`; mode energies are
/// `ln((1 - nu) / nu) / 2`, optionally capped.
pub fn parent_hamiltonian(g: &CorrelationMatrix, cap: Option<f64>) -> Result<CompactHamiltonian> {
    let occ = diag_gamma(g)?;
    let mut eps = Vec::with_capacity(occ.nus.len());
    for (k, &nu) in occ.nus.iter().enumerate() {
        let e = if nu < PURE_TOL {
            match cap {
                Some(cp) => cp,
                None => return Err(FgsError::InfiniteEnergyMode { mode: k, nu }),
            }
        } else {
            0.5 * ((1.0 - nu) / nu).ln()
        };
        eps.push(match cap {
            Some(cp) => e.min(cp),
            None => e,
        });
    }
    let h = rotate_blocks(&occ.orthogonal, &eps);
    Ok(CompactHamiltonian::from_raw(hermitize(&compact_from_majorana(&h))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{diag_h, random_hamiltonian};

    fn random_thermal(n: usize, seed: u64, beta: f64) -> (Spectrum, CorrelationMatrix) {
        let spec = diag_h(&random_hamiltonian(n, seed, true).unwrap().compact()).unwrap();
        let g = thermal_fix_beta(&spec, beta).unwrap();
        (spec, g)
    }

    #[test]
    fn vacuum_covariance() {
        let cov = gamma_to_covariance(&CorrelationMatrix::vacuum(1));
        let expect = RMat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!((cov.matrix() - expect).amax() < 1e-15);
        assert!((parity_expectation(&cov).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_has_zero_covariance() {
        let cov = gamma_to_covariance(&CorrelationMatrix::maximally_mixed(3));
        assert!(cov.matrix().amax() < 1e-15);
    }

    #[test]
    fn covariance_round_trip() {
        let (_, g) = random_thermal(4, 1, 0.7);
        let back = covariance_to_gamma(&gamma_to_covariance(&g));
        assert!((back.matrix() - g.matrix()).norm() < 1e-13);
    }

    #[test]
    fn thermal_matches_unitary_route() {
        let (spec, g) = random_thermal(4, 2, 0.8);
        let n = 4;
        let mut d = CMat::zeros(2 * n, 2 * n);
        for (k, &e) in spec.epsilons.iter().enumerate() {
            let nu = 1.0 / (1.0 + (2.0 * 0.8 * e).exp());
            d[(k, k)] = c(nu);
            d[(n + k, n + k)] = c(1.0 - nu);
        }
        let direct = &spec.unitary * d * spec.unitary.adjoint();
        assert!((direct - g.matrix()).norm() < 1e-12);
        assert!(CorrelationMatrix::new(g.matrix().clone()).is_ok());
    }

    #[test]
    fn diag_gamma_recovers_thermal_occupations() {
        let beta = 0.45;
        let (spec, g) = random_thermal(5, 3, beta);
        let occ = diag_gamma(&g).unwrap();
        for (nu, e) in occ.nus.iter().zip(&spec.epsilons) {
            assert!((nu - 1.0 / (1.0 + (2.0 * beta * e).exp())).abs() < 1e-12);
        }
        let n = 5;
        let mut d = CMat::zeros(2 * n, 2 * n);
        for (k, &nu) in occ.nus.iter().enumerate() {
            d[(k, k)] = c(nu);
            d[(n + k, n + k)] = c(1.0 - nu);
        }
        let back = &occ.unitary * d * occ.unitary.adjoint();
        assert!((back - g.matrix()).norm() < 1e-12);
    }

    #[test]
    fn ground_state_energy() {
        let (spec, _) = random_thermal(4, 4, 1.0);
        let g = gs_gamma(&spec);
        assert!((energy(&g, &spec).unwrap() - spec.ground_energy()).abs() < 1e-12);
        let occ = diag_gamma(&g).unwrap();
        assert!(occ.nus.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn thermal_energy_formula() {
        let (spec, g) = random_thermal(4, 5, 0.6);
        assert!((energy(&g, &spec).unwrap() - thermal_energy(&spec, 0.6)).abs() < 1e-12);
    }

    #[test]
    fn fix_energy_inverts_fix_beta() {
        let (spec, _) = random_thermal(5, 6, 1.0);
        let target = thermal_energy(&spec, 1.3);
        let fit = thermal_fix_energy(&spec, target).unwrap();
        assert!((fit.beta - 1.3).abs() < 1e-8);
        assert!(fit.residual <= 1e-8 * target.abs());
        let zero = thermal_fix_energy(&spec, 0.0).unwrap();
        assert_eq!(zero.beta, 0.0);
        assert!(matches!(
            thermal_fix_energy(&spec, spec.ground_energy() - 1.0),
            Err(FgsError::UnattainableEnergy { .. })
        ));
        assert!(thermal_fix_energy(&spec, 0.5).is_err());
    }

    #[test]
    fn reduce_example_modes() {
        let (_, g) = random_thermal(3, 7, 1.0);
        let r = reduce_gamma(&g, 2, 2).unwrap();
        let m = g.matrix();
        // modes (2, 0): alpha indices (2, 0, 5, 3)
        let idx = [2usize, 0, 5, 3];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                assert_eq!(r.matrix()[(a, b)], m[(i, j)]);
            }
        }
        assert!(reduce_gamma(&g, 0, 0).is_err());
        assert!(reduce_gamma(&g, 4, 0).is_err());
        assert!(reduce_gamma(&g, 1, 3).is_err());
    }

    #[test]
    fn inject_then_reduce() {
        let (_, g) = random_thermal(5, 8, 1.0);
        let (_, s) = random_thermal(2, 9, 0.5);
        let out = inject_gamma(&g, &s, 4).unwrap();
        assert!((reduce_gamma(&out, 2, 4).unwrap().matrix() - s.matrix()).norm() < 1e-15);
        assert!((reduce_gamma(&out, 3, 1).unwrap().matrix() - reduce_gamma(&g, 3, 1).unwrap().matrix()).norm() < 1e-15);
        assert!(CorrelationMatrix::new(out.matrix().clone()).is_ok());
    }

    #[test]
    fn product_with_identity_is_neutral() {
        let (_, g) = random_thermal(3, 10, 1.0);
        let p = product(&g, &CorrelationMatrix::maximally_mixed(3)).unwrap();
        assert!((p.matrix() - g.matrix()).norm() < 1e-13);
    }

    #[test]
    fn product_of_orthogonal_states_is_pathological() {
        let mut full = CMat::zeros(2, 2);
        full[(0, 0)] = c(1.0);
        let occupied = CorrelationMatrix::new(full).unwrap();
        assert!(matches!(
            product(&CorrelationMatrix::vacuum(1), &occupied),
            Err(FgsError::PathologicalProduct { .. })
        ));
    }

    #[test]
    fn wick_edge_cases() {
        let (_, g) = random_thermal(2, 11, 1.0);
        let cov = gamma_to_covariance(&g);
        assert_eq!(wick_expectation(&cov, &[]).unwrap(), c(1.0));
        assert_eq!(wick_expectation(&cov, &[0, 1, 2]).unwrap(), c(0.0));
        assert!(wick_expectation(&cov, &[1, 1]).is_err());
        assert!(wick_expectation(&cov, &[0, 4]).is_err());
        let two = wick_expectation(&cov, &[1, 3]).unwrap();
        assert!((two - I * 0.5 * cov.matrix()[(1, 3)]).norm() < 1e-15);
    }

    #[test]
    fn parent_hamiltonian_round_trip() {
        let (_, g) = random_thermal(4, 12, 0.9);
        let h = parent_hamiltonian(&g, None).unwrap();
        let spec = diag_h(&h).unwrap();
        let back = thermal_fix_beta(&spec, 1.0).unwrap();
        assert!((back.matrix() - g.matrix()).norm() < 1e-10);

        let mixed = parent_hamiltonian(&CorrelationMatrix::maximally_mixed(2), None).unwrap();
        assert!(max_abs(mixed.matrix()) < 1e-14);

        let vac = CorrelationMatrix::vacuum(2);
        assert!(matches!(parent_hamiltonian(&vac, None), Err(FgsError::InfiniteEnergyMode { .. })));
        let capped = diag_h(&parent_hamiltonian(&vac, Some(40.0)).unwrap()).unwrap();
        assert!(capped.epsilons.iter().all(|&e| (e - 40.0).abs() < 1e-9));
    }

    #[test]
    fn unphysical_rejected() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 0)] = c(1.5);
        m[(1, 1)] = c(-0.5);
        let g = CorrelationMatrix::new(m).unwrap();
        assert!(matches!(diag_gamma(&g), Err(FgsError::UnphysicalState(_))));
        assert!(!is_physical(&g, 1e-8));
    }

    #[test]
    fn rho_spectrum_two_modes() {
        let r = RhoSpectrum { nus: vec![0.1, 0.3] };
        let all = r.all().unwrap();
        let expect = [0.9 * 0.7, 0.9 * 0.3, 0.1 * 0.7, 0.1 * 0.3];
        for (a, b) in all.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}

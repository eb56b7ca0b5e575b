//! Entropies, purity and the entanglement contour of Gaussian states.

use crate::error::Result;
use crate::linalg::{CMat, RMat, jacobi_svd};
use crate::state::{CorrelationMatrix, diag_gamma, gamma_to_covariance};

const NU_CUTOFF: f64 = 1e-14;
const ENERGY_CAP: f64 = 40.0;

fn binary_entropy(nu: f64) -> f64 {
    let mut s = 0.0;
    if nu > NU_CUTOFF {
        s -= nu * nu.ln();
    }
    let mu = 1.0 - nu;
    if mu > NU_CUTOFF {
        s -= mu * mu.ln();
    }
    s
}

/// `-sum nu ln nu + (1 - nu) ln(1 - nu)`; occupations below `1e-14`
/// contribute nothing.
pub fn entropy_from_occupations(nus: &[f64]) -> f64 {
    nus.iter().map(|&v| binary_entropy(v)).sum()
}

pub fn vn_entropy(g: &CorrelationMatrix) -> Result<f64> {
    Ok(entropy_from_occupations(&diag_gamma(g)?.nus))
}

/// `Tr rho^2 = prod (2 nu^2 - 2 nu + 1)`.
pub fn purity(g: &CorrelationMatrix) -> Result<f64> {
    Ok(diag_gamma(g)?.nus.iter().map(|&v| 2.0 * v * v - 2.0 * v + 1.0).product())
}

/// The purity evaluated from the occupations, from the covariance singular
/// values and from the parent-Hamiltonian energies.
#[derive(Clone, Copy, Debug)]
pub struct PurityForms {
    pub occupations: f64,
    pub covariance: f64,
    pub energies: f64,
}

impl PurityForms {
    pub fn max_spread(&self) -> f64 {
        let v = [self.occupations, self.covariance, self.energies];
        let hi = v.iter().copied().fold(f64::MIN, f64::max);
        let lo = v.iter().copied().fold(f64::MAX, f64::min);
        hi - lo
    }
}

pub fn purity_forms(g: &CorrelationMatrix) -> Result<PurityForms> {
    let nus = diag_gamma(g)?.nus;
    let occupations = nus.iter().map(|&v| 2.0 * v * v - 2.0 * v + 1.0).product();

    // Singular values of the covariance come in equal pairs.
    let mut sv = jacobi_svd(gamma_to_covariance(g).matrix()).sigma;
    sv.sort_by(|a, b| b.total_cmp(a));
    let covariance = sv.iter().step_by(2).map(|&e| 0.5 * (1.0 + e * e)).product();

    let energies = nus
        .iter()
        .map(|&v| {
            let eps = if v <= 0.0 { ENERGY_CAP } else { (0.5 * ((1.0 - v) / v).ln()).min(ENERGY_CAP) };
            0.5 * (1.0 + eps.tanh().powi(2))
        })
        .product();
    Ok(PurityForms { occupations, covariance, energies })
}

/// Weights `p_i(k) = (|U_ik|^2 + |U_{i+N,k+N}|^2 + |U_{i,k+N}|^2 + |U_{i+N,k}|^2) / 2`
/// of normal mode `k` on site `i`, with `U` from `diag_gamma`. Every row
/// and column sums to one.
pub fn contour_weights(g: &CorrelationMatrix) -> Result<RMat> {
    let occ = diag_gamma(g)?;
    Ok(weights_of(&occ.unitary, g.n_modes()))
}

fn weights_of(u: &CMat, n: usize) -> RMat {
    RMat::from_fn(n, n, |i, k| {
        0.5 * (u[(i, k)].norm_sqr() + u[(i + n, k + n)].norm_sqr() + u[(i, k + n)].norm_sqr() + u[(i + n, k)].norm_sqr())
    })
}

/// Entanglement contour: the entropy of each normal mode distributed over
/// sites with [`contour_weights`]. The values sum to the entropy of `g`.
pub fn contour(g: &CorrelationMatrix) -> Result<Vec<f64>> {
    let occ = diag_gamma(g)?;
    let n = g.n_modes();
    let p = weights_of(&occ.unitary, n);
    let s: Vec<f64> = occ.nus.iter().map(|&v| binary_entropy(v)).collect();
    Ok((0..n).map(|i| (0..n).map(|k| p[(i, k)] * s[k]).sum()).collect())
}

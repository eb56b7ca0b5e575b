//! Real and imaginary time evolution of Gaussian states.

use crate::analytic::{
    BogoliubovCoefficients, MomentumGrid, bogoliubov_coefficients_at, tfi_bogoliubov_transform,
};
use crate::error::{FgsError, Result};
use crate::hamiltonian::Spectrum;
use crate::linalg::{C64, CMat, RMat, c, circulant_eigenvalues, circulant_from_eigenvalues, hermitize};
use crate::state::{Covariance, CorrelationMatrix, covariance_to_gamma, gamma_to_covariance, product, thermal_fix_beta};

const IMAG_STEP: f64 = 1.0;
const TI_TOL: f64 = 1e-10;

fn check_modes(g: &CorrelationMatrix, spec: &Spectrum) -> Result<()> {
    if g.n_modes() != spec.n_modes() {
        return Err(FgsError::InvalidInput(format!(
            "state has {} modes but the Hamiltonian has {}",
            g.n_modes(),
            spec.n_modes()
        )));
    }
    Ok(())
}

/// Majorana rotation `exp(2 h t)` with `h` the Hamiltonian's Majorana form.
pub fn majorana_propagator(spec: &Spectrum, t: f64) -> RMat {
    let o = &spec.orthogonal;
    let mut od = RMat::zeros(o.nrows(), o.ncols());
    for (k, &e) in spec.epsilons.iter().enumerate() {
        let (s, co) = (2.0 * e * t).sin_cos();
        // Block [[cos, sin], [-sin, cos]].
        let c0 = o.column(2 * k) * co - o.column(2 * k + 1) * s;
        let c1 = o.column(2 * k) * s + o.column(2 * k + 1) * co;
        od.set_column(2 * k, &c0);
        od.set_column(2 * k + 1, &c1);
    }
    od * o.transpose()
}

/// State at time `t` under `exp(-i H t)`:
/// `Gamma(t) = exp(-2iHt) Gamma exp(2iHt)` for the compact matrix `H`.
pub fn evolve(g: &CorrelationMatrix, spec: &Spectrum, t: f64) -> Result<CorrelationMatrix> {
    check_modes(g, spec)?;
    if !t.is_finite() {
        return Err(FgsError::InvalidInput(format!("time must be finite, got {t}")));
    }
    let r = majorana_propagator(spec, t);
    let cov = gamma_to_covariance(g);
    let moved = &r * cov.matrix() * r.transpose();
    Ok(covariance_to_gamma(&Covariance::new(moved)?))
}

/// `exp(-H tau) rho exp(-H tau)`, normalized, applied in slices of at most
/// one unit of imaginary time.
pub fn evolve_imag(g: &CorrelationMatrix, spec: &Spectrum, tau: f64) -> Result<CorrelationMatrix> {
    check_modes(g, spec)?;
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(FgsError::InvalidInput(format!("tau must be finite and nonnegative, got {tau}")));
    }
    let mut out = g.clone();
    let mut left = tau;
    while left > 0.0 {
        let step = left.min(IMAG_STEP);
        let gt = thermal_fix_beta(spec, step)?;
        let inner = product(&out, &gt)?;
        let next = product(&gt, &inner)?;
        out = CorrelationMatrix::new(hermitize(next.matrix()))?;
        left -= step;
    }
    Ok(out)
}

/// Correlators of a translation-invariant periodic chain:
/// `hop[d] = <a_0^+ a_d>` and `pair[d] = <a_0 a_d>`.
#[derive(Clone, Debug, PartialEq)]
pub struct TiCorrelators {
    pub hop: Vec<C64>,
    pub pair: Vec<C64>,
}

impl TiCorrelators {
    pub fn new(hop: Vec<C64>, pair: Vec<C64>) -> Result<Self> {
        let n = hop.len();
        if n == 0 || pair.len() != n {
            return Err(FgsError::InvalidInput("correlator vectors must have equal, nonzero length".into()));
        }
        for d in 0..n {
            let m = (n - d) % n;
            if (hop[m] - hop[d].conj()).norm() > TI_TOL {
                return Err(FgsError::InconsistentInput(format!(
                    "<a^+a> correlators violate Hermiticity at distance {d}"
                )));
            }
            if (pair[m] + pair[d]).norm() > TI_TOL {
                return Err(FgsError::InconsistentInput(format!(
                    "<aa> correlators are not antisymmetric at distance {d}"
                )));
            }
        }
        Ok(Self { hop, pair })
    }

    pub fn n_modes(&self) -> usize {
        self.hop.len()
    }

    /// Reads the first rows of the blocks of a translation-invariant state.
    pub fn from_gamma(g: &CorrelationMatrix) -> Result<Self> {
        let n = g.n_modes();
        let m = g.matrix();
        let hop: Vec<C64> = (0..n).map(|d| m[(0, d)]).collect();
        let pair: Vec<C64> = (0..n).map(|d| m[(n, d)]).collect();
        Self::new(hop, pair)
    }

    pub fn to_gamma(&self) -> Result<CorrelationMatrix> {
        let n = self.n_modes();
        let mut m = CMat::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let d = (j + n - i) % n;
                m[(i, j)] = self.hop[d];
                m[(n + i, j)] = self.pair[d];
                m[(i, n + j)] = -self.pair[d].conj();
                m[(n + i, n + j)] = if i == j { c(1.0) } else { c(0.0) } - self.hop[d].conj();
            }
        }
        CorrelationMatrix::new(m)
    }
}

/// Evolution of a translation-invariant state under the periodic hopping
/// chain: `<a^+ a>` is conserved and every Fourier component of `<a a>`
/// picks up the phase `exp(-4 i cos(2 pi k / N) t)`.
pub fn evolve_ti_hopping(init: &TiCorrelators, t: f64) -> Result<TiCorrelators> {
    let n = init.n_modes();
    let eig = circulant_eigenvalues(&init.pair);
    let moved: Vec<C64> = eig
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let phi = (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos();
            l * C64::from_polar(1.0, -4.0 * phi * t)
        })
        .collect();
    Ok(TiCorrelators { hop: init.hop.clone(), pair: circulant_from_eigenvalues(&moved) })
}

/// Bogoliubov-mode correlators of a translation-invariant state on an
/// antiperiodic chain with `N` even, in momentum-grid order:
/// `occ = <b_k^+ b_k>`, `hole = <b_{-k} b_{-k}^+>`, `anom = <b_{-k} b_k>`.
#[derive(Clone, Debug)]
pub struct TfiModeCorrelators {
    pub n: usize,
    pub theta: f64,
    pub ks: Vec<f64>,
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    /// Quasiparticle excitation energies.
    pub epsilon: Vec<f64>,
    pub occ: Vec<f64>,
    pub hole: Vec<f64>,
    pub anom: Vec<C64>,
}

fn check_even_antiperiodic(n: usize) -> Result<()> {
    if n == 0 || n % 2 == 1 {
        return Err(FgsError::UnsupportedCase(format!(
            "closed-form TFI dynamics needs an even number of sites, got {n}"
        )));
    }
    Ok(())
}

/// Correlators of the `theta0` ground state seen by the `theta` modes at one
/// momentum angle `p > 0`: `R = U(theta)^+ U(theta0)` maps the initial
/// vacuum modes onto the final ones.
fn quench_mode(theta0: f64, theta: f64, p: f64) -> Result<(BogoliubovCoefficients, f64, f64, C64)> {
    let u0 = bogoliubov_coefficients_at(theta0, p)?.unitary();
    let bc = bogoliubov_coefficients_at(theta, p)?;
    let r = bc.unitary().adjoint() * u0;
    let occ = r[(0, 1)].norm_sqr();
    Ok((bc, occ, 1.0 - occ, r[(0, 1)] * r[(1, 1)].conj()))
}

impl TfiModeCorrelators {
    /// Reads the mode correlators of any state through the full transform.
    pub fn from_gamma(theta: f64, g: &CorrelationMatrix) -> Result<Self> {
        let n = g.n_modes();
        check_even_antiperiodic(n)?;
        let grid = MomentumGrid::new(n, -1)?;
        let (w, _) = tfi_bogoliubov_transform(n, theta, -1)?;
        let gb = &w * g.matrix() * w.adjoint();
        let mut out = Self::empty(n, theta, &grid)?;
        for i in 0..n {
            let j = grid.index_of(-grid.twice_k()[i]).expect("antiperiodic grid is symmetric");
            out.occ[i] = gb[(i, i)].re;
            out.hole[i] = gb[(n + j, n + j)].re;
            out.anom[i] = gb[(n + j, i)];
        }
        Ok(out)
    }

    /// Ground state of the chain at `theta0`, expressed in the modes of the
    /// chain at `theta`.
    pub fn quench(n: usize, theta0: f64, theta: f64) -> Result<Self> {
        check_even_antiperiodic(n)?;
        let grid = MomentumGrid::new(n, -1)?;
        let mut out = Self::empty(n, theta, &grid)?;
        for i in 0..n {
            let k2 = grid.twice_k()[i];
            let (_, occ, hole, anom) = quench_mode(theta0, theta, grid.angle(i).abs())?;
            out.occ[i] = occ;
            out.hole[i] = hole;
            // The partner of a negative momentum is defined from the positive one.
            out.anom[i] = if k2 > 0 { anom } else { -anom };
        }
        Ok(out)
    }

    fn empty(n: usize, theta: f64, grid: &MomentumGrid) -> Result<Self> {
        let mut s = Vec::with_capacity(n);
        let mut t = Vec::with_capacity(n);
        let mut epsilon = Vec::with_capacity(n);
        for i in 0..n {
            let bc = bogoliubov_coefficients_at(theta, grid.angle(i))?;
            s.push(bc.s);
            t.push(bc.t);
            epsilon.push(bc.epsilon);
        }
        Ok(Self {
            n,
            theta,
            ks: grid.ks(),
            s,
            t,
            epsilon,
            occ: vec![0.0; n],
            hole: vec![0.0; n],
            anom: vec![C64::new(0.0, 0.0); n],
        })
    }
}

/// `<a_1^+ a_1>(t)` under the antiperiodic TFI chain. Each anomalous
/// correlator `<b_{-k} b_k>` rotates as `exp(-2 i eps_k t)` with `eps_k` the
/// excitation energy.
pub fn tfi_occupation_evolution(c: &TfiModeCorrelators, t: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..c.n {
        let x = c.anom[i] * C64::from_polar(1.0, -2.0 * c.epsilon[i] * t);
        // i s t (x - conj x) = -2 s t Im x
        acc += c.s[i] * c.s[i] * c.occ[i] + c.t[i] * c.t[i] * c.hole[i] - 2.0 * c.s[i] * c.t[i] * x.im;
    }
    acc / c.n as f64
}

/// Time-independent part of [`tfi_occupation_evolution`].
pub fn gge_occupation_finite(c: &TfiModeCorrelators) -> f64 {
    (0..c.n).map(|i| c.s[i] * c.s[i] * c.occ[i] + c.t[i] * c.t[i] * c.hole[i]).sum::<f64>() / c.n as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GgeLimit {
    Finite(usize),
    Continuum,
}

// Five-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];
const GGE_PANELS: usize = 2000;

/// Equilibrium value of `<a_1^+ a_1>` after quenching the ground state at
/// `theta0` to `theta`. The continuum limit replaces `(1/N) sum_k` by
/// `(1/2pi) int dp` over `p = 2 pi k / N`.
pub fn gge_occupation(theta0: f64, theta: f64, limit: GgeLimit) -> Result<f64> {
    match limit {
        GgeLimit::Finite(n) => Ok(gge_occupation_finite(&TfiModeCorrelators::quench(n, theta0, theta)?)),
        GgeLimit::Continuum => {
            let mode = |p: f64| -> Result<f64> {
                let (bc, occ, hole, _) = quench_mode(theta0, theta, p)?;
                Ok(bc.s * bc.s * occ + bc.t * bc.t * hole)
            };
            // The integrand is even in p.
            let h = std::f64::consts::PI / GGE_PANELS as f64;
            let mut acc = 0.0;
            for panel in 0..GGE_PANELS {
                let mid = (panel as f64 + 0.5) * h;
                for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
                    acc += w * mode(mid + 0.5 * h * x)?;
                }
            }
            Ok(acc * 0.5 * h / std::f64::consts::PI)
        }
    }
}

/// Power-law exponent of the decay of `|values - reference|`: least-squares
/// slope of `ln|delta|` against `ln t` over the local maxima of `|delta|`,
/// which traces the envelope of the oscillating signal.
pub fn decay_exponent(ts: &[f64], values: &[f64], reference: f64) -> Result<f64> {
    if ts.len() != values.len() || ts.len() < 3 {
        return Err(FgsError::InvalidInput("need at least three matching samples".into()));
    }
    if ts.iter().any(|&t| !(t > 0.0)) {
        return Err(FgsError::InvalidInput("times must be positive for a log-log fit".into()));
    }
    let d: Vec<f64> = values.iter().map(|v| (v - reference).abs()).collect();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in 1..d.len() - 1 {
        if d[i] > 0.0 && d[i] >= d[i - 1] && d[i] >= d[i + 1] {
            xs.push(ts[i].ln());
            ys.push(d[i].ln());
        }
    }
    if xs.len() < 2 {
        return Err(FgsError::InvalidInput("signal has fewer than two local maxima".into()));
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_hopping, build_tfi, diag_h, random_hamiltonian, random_ti_hamiltonian};
    use crate::state::{energy, gs_gamma, is_physical};

    #[test]
    fn zero_time_is_identity() {
        let spec = diag_h(&random_hamiltonian(4, 1, true).unwrap().compact()).unwrap();
        let g = thermal_fix_beta(&spec, 0.5).unwrap();
        let g0 = evolve(&g, &spec, 0.0).unwrap();
        assert!((g0.matrix() - g.matrix()).norm() < 1e-13);
    }

    #[test]
    fn stationary_states_do_not_move() {
        let spec = diag_h(&random_hamiltonian(4, 2, true).unwrap().compact()).unwrap();
        let g = thermal_fix_beta(&spec, 0.5).unwrap();
        let gt = evolve(&g, &spec, 3.7).unwrap();
        assert!((gt.matrix() - g.matrix()).norm() < 1e-11);
    }

    #[test]
    fn energy_conserved_and_physical() {
        let spec = diag_h(&random_hamiltonian(5, 3, true).unwrap().compact()).unwrap();
        let other = diag_h(&random_hamiltonian(5, 4, true).unwrap().compact()).unwrap();
        let g = gs_gamma(&other);
        let e0 = energy(&g, &spec).unwrap();
        let gt = evolve(&g, &spec, 1.3).unwrap();
        assert!((energy(&gt, &spec).unwrap() - e0).abs() < 1e-11);
        assert!(is_physical(&gt, 1e-10));
    }

    #[test]
    fn imaginary_time_zero_and_ground_state() {
        let spec = diag_h(&random_hamiltonian(4, 5, true).unwrap().compact()).unwrap();
        let g = thermal_fix_beta(&spec, 0.2).unwrap();
        let same = evolve_imag(&g, &spec, 0.0).unwrap();
        assert!((same.matrix() - g.matrix()).norm() < 1e-14);
        let gs = gs_gamma(&spec);
        let still = evolve_imag(&gs, &spec, 2.5).unwrap();
        assert!((still.matrix() - gs.matrix()).norm() < 1e-9);
        assert!(evolve_imag(&g, &spec, -1.0).is_err());
    }

    #[test]
    fn ti_round_trip() {
        let h = random_ti_hamiltonian(10, 7, 1.5).unwrap();
        let g = thermal_fix_beta(&diag_h(&h.compact()).unwrap(), 1.0).unwrap();
        let ti = TiCorrelators::from_gamma(&g).unwrap();
        assert!((ti.to_gamma().unwrap().matrix() - g.matrix()).norm() < 1e-12);
    }

    #[test]
    fn ti_rejects_inconsistent_vectors() {
        let hop = vec![c(0.5), c(0.1), c(0.2)];
        let pair = vec![c(0.0); 3];
        assert!(matches!(TiCorrelators::new(hop, pair), Err(FgsError::InconsistentInput(_))));
    }

    #[test]
    fn ti_hopping_matches_full_evolution() {
        let n = 12;
        let h = random_ti_hamiltonian(n, 8, 1.2).unwrap();
        let g = thermal_fix_beta(&diag_h(&h.compact()).unwrap(), 1.0).unwrap();
        let hop = diag_h(&build_hopping(n, true).unwrap().compact()).unwrap();
        for t in [0.0, 0.4, 2.3] {
            let full = evolve(&g, &hop, t).unwrap();
            let ti = evolve_ti_hopping(&TiCorrelators::from_gamma(&g).unwrap(), t).unwrap();
            assert!((ti.to_gamma().unwrap().matrix() - full.matrix()).norm() < 1e-10);
        }
    }

    #[test]
    fn tfi_occupation_matches_full_evolution() {
        let n = 12;
        let (theta0, theta) = (0.4, std::f64::consts::PI / 3.0);
        let g0 = gs_gamma(&diag_h(&build_tfi(n, theta0, -1).unwrap().compact()).unwrap());
        let h = diag_h(&build_tfi(n, theta, -1).unwrap().compact()).unwrap();
        let closed = TfiModeCorrelators::quench(n, theta0, theta).unwrap();
        let read = TfiModeCorrelators::from_gamma(theta, &g0).unwrap();
        for i in 0..n {
            assert!((closed.occ[i] - read.occ[i]).abs() < 1e-12);
            assert!((closed.hole[i] - read.hole[i]).abs() < 1e-12);
            assert!((closed.anom[i] - read.anom[i]).norm() < 1e-12, "{i}");
        }
        for t in [0.0, 0.3, 1.1, 4.0] {
            let full = evolve(&g0, &h, t).unwrap().matrix()[(0, 0)].re;
            let a = tfi_occupation_evolution(&closed, t);
            assert!((a - full).abs() < 1e-10, "t={t}: {a} vs {full}");
        }
    }

    #[test]
    fn no_anomalous_terms_means_no_dynamics() {
        let mut c = TfiModeCorrelators::quench(10, 0.5, 1.0).unwrap();
        c.anom.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        let v0 = tfi_occupation_evolution(&c, 0.0);
        assert!((tfi_occupation_evolution(&c, 7.3) - v0).abs() < 1e-15);
        assert!((gge_occupation_finite(&c) - v0).abs() < 1e-15);
    }

    #[test]
    fn odd_chains_are_unsupported() {
        assert!(matches!(TfiModeCorrelators::quench(7, 0.5, 1.0), Err(FgsError::UnsupportedCase(_))));
    }

    #[test]
    fn gge_continuum_agrees_with_large_ring() {
        let (theta0, theta) = (0.4, 1.0);
        let fin = gge_occupation(theta0, theta, GgeLimit::Finite(2000)).unwrap();
        let cont = gge_occupation(theta0, theta, GgeLimit::Continuum).unwrap();
        assert!((fin - cont).abs() < 1e-6, "{fin} vs {cont}");
    }

    #[test]
    fn strong_field_fills_every_site() {
        // -cot sum (a^+a - aa^+) favors occupied sites.
        let theta = 1e-3;
        let v = gge_occupation(theta, theta, GgeLimit::Continuum).unwrap();
        assert!((v - 1.0).abs() < 1e-5, "{v}");
    }

    #[test]
    fn decay_exponent_of_damped_cosine() {
        let ts: Vec<f64> = (1..4000).map(|i| 5.0 + i as f64 * 0.01).collect();
        let v: Vec<f64> = ts.iter().map(|t| 0.3 + t.powf(-1.5) * (3.0 * t).cos()).collect();
        let e = decay_exponent(&ts, &v, 0.3).unwrap();
        assert!((e + 1.5).abs() < 0.02, "{e}");
    }
}

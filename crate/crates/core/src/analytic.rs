//! Closed-form solutions of the hopping chain and the fermionic transverse
//! field Ising chain.
//!
//! Energies come in two normalizations. `excitation` energies are the cost of
//! adding one Bogoliubov quasiparticle; `mode` energies are the `eps` of
//! `H = sum eps (b^+ b - b b^+)` returned by `diag_h`, so `mode = excitation / 2`.

use std::f64::consts::PI;

use crate::error::{FgsError, Result};
use crate::hamiltonian::check_boundary_sign;
use crate::linalg::{C64, CMat};

fn check_theta(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < PI / 2.0) {
        return Err(FgsError::InvalidInput(format!("theta must lie in (0, pi/2), got {theta}")));
    }
    Ok(1.0 / theta.tan())
}

/// `cos(2 pi k / N)` for `k = 1..=N`.
pub fn hopping_dispersion(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(FgsError::InvalidInput(format!("hopping chain needs N >= 2, got {n}")));
    }
    Ok((1..=n).map(|k| (2.0 * PI * k as f64 / n as f64).cos()).collect())
}

/// Ground energy of the periodic hopping chain from its Fourier modes: every
/// mode with negative `phi_k` is filled.
pub fn hopping_ground_energy_fourier(n: usize) -> Result<f64> {
    Ok(-hopping_dispersion(n)?.iter().map(|p| p.abs()).sum::<f64>())
}

/// Allowed momenta of a periodic (`g_F = +1`, integer `k`) or antiperiodic
/// (`g_F = -1`, half-integer `k`) chain, stored as `2k` to stay exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentumGrid {
    n: usize,
    twice_k: Vec<i64>,
}

impl MomentumGrid {
    pub fn new(n: usize, g_f: i32) -> Result<Self> {
        check_boundary_sign(g_f, "g_F")?;
        if g_f == 0 {
            return Err(FgsError::InvalidInput("open chains have no momentum grid".into()));
        }
        if n == 0 {
            return Err(FgsError::InvalidInput("N must be positive".into()));
        }
        let n_i = n as i64;
        // Half-integer k for antiperiodic chains, integer k for periodic ones.
        let first = if g_f == -1 {
            if n % 2 == 0 { -n_i + 1 } else { -n_i }
        } else if n % 2 == 0 {
            -n_i
        } else {
            -n_i + 1
        };
        Ok(Self { n, twice_k: (0..n_i).map(|j| first + 2 * j).collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.twice_k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.twice_k.is_empty()
    }

    pub fn twice_k(&self) -> &[i64] {
        &self.twice_k
    }

    pub fn ks(&self) -> Vec<f64> {
        self.twice_k.iter().map(|&k| k as f64 / 2.0).collect()
    }

    /// `2 pi k / N`.
    pub fn angle(&self, i: usize) -> f64 {
        PI * self.twice_k[i] as f64 / self.n as f64
    }

    pub fn index_of(&self, twice_k: i64) -> Option<usize> {
        self.twice_k.iter().position(|&k| k == twice_k)
    }

    /// `k = 0` and `k = -N/2` are their own partners under `k -> -k`.
    pub fn is_unpaired(&self, i: usize) -> bool {
        let k = self.twice_k[i];
        k == 0 || k == -(self.n as i64)
    }
}

#[derive(Clone, Debug)]
pub struct TfiSpectrum {
    pub grid: MomentumGrid,
    /// `2 sqrt(1 + cot^2 + 2 cot cos(2 pi k / N))` in grid order.
    pub excitation: Vec<f64>,
}

impl TfiSpectrum {
    pub fn mode_energies(&self) -> Vec<f64> {
        self.excitation.iter().map(|e| e / 2.0).collect()
    }

    /// Lowest energy of the unconstrained fermionic Hamiltonian.
    pub fn ground_energy(&self) -> f64 {
        -self.excitation.iter().sum::<f64>() / 2.0
    }
}

fn tfi_excitation(cot: f64, angle: f64) -> f64 {
    2.0 * (1.0 + cot * cot + 2.0 * cot * angle.cos()).max(0.0).sqrt()
}

pub fn tfi_spectrum_pbc_apbc(n: usize, theta: f64, g_f: i32) -> Result<TfiSpectrum> {
    let cot = check_theta(theta)?;
    let grid = MomentumGrid::new(n, g_f)?;
    let mut excitation: Vec<f64> = (0..grid.len()).map(|i| tfi_excitation(cot, grid.angle(i))).collect();
    // The two self-paired modes carry -(cot + cos k)(f^+ f - f f^+).
    if let Some(i) = grid.index_of(0) {
        excitation[i] = 2.0 * (1.0 + cot).abs();
    }
    if let Some(i) = grid.index_of(-(n as i64)) {
        excitation[i] = 2.0 * (cot - 1.0).abs();
    }
    Ok(TfiSpectrum { grid, excitation })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BogoliubovCoefficients {
    pub s: f64,
    pub t: f64,
    /// Excitation energy of the pair.
    pub epsilon: f64,
}

impl BogoliubovCoefficients {
    /// `U_k = [[s, -i t], [-i t, s]]`.
    pub fn unitary(&self) -> CMat {
        let (s, t) = (C64::new(self.s, 0.0), C64::new(0.0, -self.t));
        CMat::from_row_slice(2, 2, &[s, t, t, s])
    }
}

/// Pair Hamiltonian `h_k` in the `(f_k, f_{-k}^+)` basis.
pub fn pair_hamiltonian(theta: f64, angle: f64) -> Result<CMat> {
    let cot = check_theta(theta)?;
    let cc = cot + angle.cos();
    let sn = angle.sin();
    Ok(CMat::from_row_slice(
        2,
        2,
        &[C64::new(-2.0 * cc, 0.0), C64::new(0.0, 2.0 * sn), C64::new(0.0, -2.0 * sn), C64::new(2.0 * cc, 0.0)],
    ))
}

fn coefficients_at(cot: f64, angle: f64) -> Result<BogoliubovCoefficients> {
    let cc = cot + angle.cos();
    let sn = angle.sin();
    let half = (cc * cc + sn * sn).sqrt();
    if 2.0 * half < 1e-12 {
        return Err(FgsError::DegenerateMode(format!("zero excitation energy at angle {angle}")));
    }
    // s = sin / sqrt(eps (eps/2 + c)), t = (eps/2 + c) / sqrt(eps (eps/2 + c)),
    // rewritten for c < 0 where eps/2 + c cancels.
    let (s, t) = if cc >= 0.0 {
        (sn / (2.0 * half * (half + cc)).sqrt(), ((half + cc) / (2.0 * half)).sqrt())
    } else {
        let sign = if sn < 0.0 { -1.0 } else { 1.0 };
        (sign * ((half - cc) / (2.0 * half)).sqrt(), sn.abs() / (2.0 * half * (half - cc)).sqrt())
    };
    Ok(BogoliubovCoefficients { s, t, epsilon: 2.0 * half })
}

/// Bogoliubov angle of momentum `k` (half-integers allowed) on an `N`-site ring.
pub fn bogoliubov_coefficients(n: usize, theta: f64, k: f64) -> Result<BogoliubovCoefficients> {
    let cot = check_theta(theta)?;
    if n == 0 {
        return Err(FgsError::InvalidInput("N must be positive".into()));
    }
    coefficients_at(cot, 2.0 * PI * k / n as f64)
}

/// Same as [`bogoliubov_coefficients`] at the continuum momentum `p`.
pub fn bogoliubov_coefficients_at(theta: f64, p: f64) -> Result<BogoliubovCoefficients> {
    coefficients_at(check_theta(theta)?, p)
}

/// `(u, v)` coefficients of an operator `sum u_j a_j^+ + v_j a_j`.
#[derive(Clone)]
struct LinearOp {
    u: Vec<C64>,
    v: Vec<C64>,
}

impl LinearOp {
    fn zero(n: usize) -> Self {
        Self { u: vec![C64::new(0.0, 0.0); n], v: vec![C64::new(0.0, 0.0); n] }
    }

    fn dagger(&self) -> Self {
        Self { u: self.v.iter().map(|z| z.conj()).collect(), v: self.u.iter().map(|z| z.conj()).collect() }
    }

    fn axpy(&self, a: C64, other: &LinearOp, b: C64) -> Self {
        Self {
            u: self.u.iter().zip(&other.u).map(|(x, y)| a * x + b * y).collect(),
            v: self.v.iter().zip(&other.v).map(|(x, y)| a * x + b * y).collect(),
        }
    }
}

/// Fourier mode `f_k = N^{-1/2} sum_j exp(2 pi i k j / N) a_j` with sites
/// counted from one.
fn fourier_mode(grid: &MomentumGrid, i: usize) -> LinearOp {
    let n = grid.n();
    let mut op = LinearOp::zero(n);
    let norm = 1.0 / (n as f64).sqrt();
    for j in 0..n {
        op.v[j] = C64::from_polar(norm, grid.angle(i) * (j + 1) as f64);
    }
    op
}

/// Full Fourier plus Bogoliubov transform of the periodic or antiperiodic TFI
/// chain. Returns `W` with `beta = W alpha`, where `beta = (b^+, b)` follows
/// the grid order, and the mode energies of each `b`. For `k > 0`,
/// `b_k = s f_k + i t f_{-k}^+` and `b_{-k} = s f_{-k} - i t f_k^+`.
pub fn tfi_bogoliubov_transform(n: usize, theta: f64, g_f: i32) -> Result<(CMat, Vec<f64>)> {
    let cot = check_theta(theta)?;
    let grid = MomentumGrid::new(n, g_f)?;
    let mut ops: Vec<Option<LinearOp>> = vec![None; n];
    let mut energies = vec![0.0; n];
    let i_unit = C64::new(0.0, 1.0);
    for i in 0..n {
        let k2 = grid.twice_k()[i];
        if grid.is_unpaired(i) {
            let f = fourier_mode(&grid, i);
            let coeff = -(cot + grid.angle(i).cos());
            energies[i] = coeff.abs();
            ops[i] = Some(if coeff < 0.0 { f.dagger() } else { f });
        } else if k2 > 0 {
            let j = grid.index_of(-k2).expect("grid is symmetric under k -> -k");
            let bc = coefficients_at(cot, grid.angle(i))?;
            let (s, t) = (C64::new(bc.s, 0.0), C64::new(bc.t, 0.0));
            let fk = fourier_mode(&grid, i);
            let fm = fourier_mode(&grid, j);
            ops[i] = Some(fk.axpy(s, &fm.dagger(), i_unit * t));
            ops[j] = Some(fm.axpy(s, &fk.dagger(), -i_unit * t));
            energies[i] = bc.epsilon / 2.0;
            energies[j] = bc.epsilon / 2.0;
        }
    }
    let mut w = CMat::zeros(2 * n, 2 * n);
    for (i, op) in ops.iter().enumerate() {
        let b = op.as_ref().expect("every momentum is assigned");
        let bd = b.dagger();
        for j in 0..n {
            w[(i, j)] = bd.u[j];
            w[(i, n + j)] = bd.v[j];
            w[(n + i, j)] = b.u[j];
            w[(n + i, n + j)] = b.v[j];
        }
    }
    Ok((w, energies))
}

/// Quasi-momenta `phi_k in (0, pi)` of the open chain: roots of
/// `sin((N+1) phi) / sin(N phi) = -1 / cot`, scanned in the pole-free form
/// `cot sin((N+1) phi) + sin(N phi) = 0`.
pub fn obc_roots(n: usize, theta: f64) -> Result<Vec<f64>> {
    let cot = check_theta(theta)?;
    if n == 0 {
        return Err(FgsError::InvalidInput("N must be positive".into()));
    }
    let f = |x: f64| cot * ((n + 1) as f64 * x).sin() + (n as f64 * x).sin();
    let mut points = 10 * n;
    loop {
        let roots = scan_roots(&f, points);
        if roots.len() == n {
            return Ok(roots);
        }
        if roots.len() > n || points >= 10_000 * n {
            return Err(FgsError::RootFindingFailure { found: roots.len(), expected: n });
        }
        points *= 4;
    }
}

fn scan_roots(f: &impl Fn(f64) -> f64, points: usize) -> Vec<f64> {
    // Both ends are trivial zeros of f; stay strictly inside.
    let h = PI / points as f64;
    let mut roots = Vec::new();
    let mut a = h * 1e-3;
    let mut fa = f(a);
    for i in 1..=points {
        let b = if i == points { PI - h * 1e-3 } else { i as f64 * h };
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            roots.push(bisect(f, a, b, fa));
        }
        a = b;
        fa = fb;
    }
    roots
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    while b - a > 1e-12 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// Mode energies `sqrt(1 + cot^2 + 2 cot cos phi_k)` of the open chain, in
/// the order of increasing `phi_k`.
pub fn tfi_spectrum_obc(n: usize, theta: f64) -> Result<Vec<f64>> {
    let cot = check_theta(theta)?;
    Ok(obc_roots(n, theta)?.into_iter().map(|p| tfi_excitation(cot, p) / 2.0).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParitySector {
    Even,
    Odd,
    Either,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroundSector {
    pub g_f: i32,
    pub sector: ParitySector,
}

/// Fermionic boundary sign and parity sector holding the ground state of the
/// spin chain with boundary sign `g_I`.
pub fn tfi_ground_sector(n: usize, g_i: i32) -> Result<GroundSector> {
    check_boundary_sign(g_i, "g_I")?;
    let even = n % 2 == 0;
    Ok(match (g_i, even) {
        (0, _) => GroundSector { g_f: 0, sector: ParitySector::Either },
        (1, true) => GroundSector { g_f: -1, sector: ParitySector::Even },
        (-1, true) => GroundSector { g_f: -1, sector: ParitySector::Odd },
        (1, false) => GroundSector { g_f: 1, sector: ParitySector::Odd },
        _ => GroundSector { g_f: 1, sector: ParitySector::Even },
    })
}

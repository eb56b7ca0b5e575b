//! Bond-dimension reduction of pure, particle-conserving Gaussian states.
//!
//! States are handled through `Lambda_ij = <a_i^+ a_j>`. A pure state has a
//! projector as `Lambda`.

use nalgebra::SymmetricEigen;
use rayon::prelude::*;

use crate::error::{FgsError, Result};
use crate::hamiltonian::QuadraticHamiltonian;
use crate::linalg::{C64, CMat, max_abs};
use crate::measures::entropy_from_occupations;
use crate::state::CorrelationMatrix;

const PURITY_TOL: f64 = 1e-8;
const HERMITIAN_TOL: f64 = 1e-10;

fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let e = SymmetricEigen::new(m.clone());
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

/// Eigenvalues of a Hermitian block, ascending.
pub fn block_eigenvalues(m: &CMat) -> Vec<f64> {
    // Real blocks take the much cheaper real symmetric solver.
    let mut v: Vec<f64> = if m.iter().all(|z| z.im == 0.0) {
        m.map(|z| z.re).symmetric_eigenvalues().iter().copied().collect()
    } else {
        m.clone().symmetric_eigenvalues().iter().copied().collect()
    };
    v.sort_by(f64::total_cmp);
    v
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureModeMatrix(CMat);

impl PureModeMatrix {
    pub fn new(l: CMat) -> Result<Self> {
        if !l.is_square() {
            return Err(FgsError::InvalidInput("mode matrix must be square".into()));
        }
        if (&l - l.adjoint()).iter().any(|z| z.norm() > HERMITIAN_TOL) {
            return Err(FgsError::InvalidInput("mode matrix is not Hermitian".into()));
        }
        let l = (&l + l.adjoint()) * C64::new(0.5, 0.0);
        let worst = block_eigenvalues(&l).iter().map(|&x| x.abs().min((1.0 - x).abs())).fold(0.0, f64::max);
        if worst > PURITY_TOL {
            return Err(FgsError::InvalidInput(format!(
                "state is not pure: an eigenvalue lies {worst:.3e} away from 0 and 1"
            )));
        }
        Ok(Self(l))
    }

    /// Takes the `<a^+ a>` block of a state without anomalous correlators.
    pub fn from_gamma(g: &CorrelationMatrix) -> Result<Self> {
        if max_abs(&g.pairing_block()) > HERMITIAN_TOL {
            return Err(FgsError::InvalidInput(
                "state has <aa> correlators; only particle-conserving states are supported".into(),
            ));
        }
        Self::new(g.hopping_block())
    }

    /// Ground state of a Hamiltonian without pairing terms: every mode of
    /// `A` with negative energy is filled.
    pub fn ground_state(h: &QuadraticHamiltonian) -> Result<Self> {
        if max_abs(h.b()) > HERMITIAN_TOL {
            return Err(FgsError::InvalidInput("Hamiltonian has pairing terms".into()));
        }
        let (vals, vecs) = hermitian_eigen(h.a());
        if let Some(v) = vals.iter().find(|v| v.abs() < 1e-12) {
            return Err(FgsError::DegenerateMode(format!("zero mode {v:.3e}; ground state is not unique")));
        }
        let n = vals.len();
        let mut p = CMat::zeros(n, n);
        for (k, &e) in vals.iter().enumerate() {
            if e < 0.0 {
                let c = vecs.column(k);
                p += &c * c.adjoint();
            }
        }
        Ok(Self(p.transpose()))
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn n_modes(&self) -> usize {
        self.0.nrows()
    }

    pub fn to_gamma(&self) -> CorrelationMatrix {
        let n = self.n_modes();
        let mut m = CMat::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.0);
        let lower = CMat::identity(n, n) - self.0.transpose();
        m.view_mut((n, n), (n, n)).copy_from(&lower);
        CorrelationMatrix::from_raw(m)
    }

    /// `Lambda` restricted to `len` consecutive modes starting at `start`.
    pub fn block(&self, start: usize, len: usize) -> Result<CMat> {
        if start + len > self.n_modes() {
            return Err(FgsError::InvalidInput(format!(
                "block [{start}, {}) exceeds {} modes",
                start + len,
                self.n_modes()
            )));
        }
        Ok(self.0.view((start, start), (len, len)).into_owned())
    }
}

fn rounding_distance(x: f64) -> f64 {
    x.abs().min((1.0 - x).abs())
}

/// Rounds to 0 or 1; exactly one half goes to 0.
fn round_occupation(x: f64) -> f64 {
    if x > 0.5 { 1.0 } else { 0.0 }
}

/// Rotates the window of modes starting at `start` in `l` (and the columns of `acc`) by `v`, so
/// that `l <- E^+ l E` and `acc <- acc E` with `E` acting as `v` on the window.
fn rotate_window(l: &mut CMat, acc: &mut CMat, start: usize, v: &CMat) {
    let w = v.nrows();
    let cols = l.columns(start, w) * v;
    l.columns_mut(start, w).copy_from(&cols);
    let rows = v.adjoint() * l.rows(start, w);
    l.rows_mut(start, w).copy_from(&rows);
    let a = acc.columns(start, w) * v;
    acc.columns_mut(start, w).copy_from(&a);
}

/// Fixes mode `j` to the occupation `value` and decouples it.
fn decouple(l: &mut CMat, j: usize, value: f64) {
    l.row_mut(j).fill(C64::new(0.0, 0.0));
    l.column_mut(j).fill(C64::new(0.0, 0.0));
    l[(j, j)] = C64::new(value, 0.0);
}

/// Eigenvectors of the window, the requested ones first.
fn window_basis(vecs: &CMat, first: &[usize]) -> CMat {
    let w = vecs.ncols();
    let mut order: Vec<usize> = first.to_vec();
    order.extend((0..w).filter(|i| !first.contains(i)));
    CMat::from_fn(w, w, |r, c| vecs[(r, order[c])])
}

#[derive(Clone, Debug, Default)]
pub struct RbdReport {
    /// Distance from {0, 1} of every rounded eigenvalue, in step order.
    pub roundings: Vec<f64>,
}

impl RbdReport {
    pub fn max_rounding_error(&self) -> f64 {
        self.roundings.iter().copied().fold(0.0, f64::max)
    }
}

/// Reduces the state to bond dimension `2^m` with a sliding window of `m + 1`
/// modes.
pub fn rbd(l: &PureModeMatrix, m: usize) -> Result<PureModeMatrix> {
    Ok(rbd_with_report(l, m)?.0)
}

pub fn rbd_with_report(l: &PureModeMatrix, m: usize) -> Result<(PureModeMatrix, RbdReport)> {
    if m == 0 {
        return Err(FgsError::InvalidInput("bond parameter m must be at least 1".into()));
    }
    let n = l.n_modes();
    if m >= n {
        return Ok((l.clone(), RbdReport::default()));
    }
    let mut work = l.matrix().clone();
    let mut acc = CMat::identity(n, n);
    let mut report = RbdReport::default();
    for j in 0..n {
        let w = (m + 1).min(n - j);
        let (vals, vecs) = hermitian_eigen(&work.view((j, j), (w, w)).into_owned());
        let pick = (0..w)
            .min_by(|&a, &b| rounding_distance(vals[a]).total_cmp(&rounding_distance(vals[b])))
            .expect("window is not empty");
        report.roundings.push(rounding_distance(vals[pick]));
        rotate_window(&mut work, &mut acc, j, &window_basis(&vecs, &[pick]));
        decouple(&mut work, j, round_occupation(vals[pick]));
    }
    let out = &acc * work * acc.adjoint();
    Ok((PureModeMatrix(crate::linalg::hermitize(&out)), report))
}

/// `-sum lambda ln lambda + (1 - lambda) ln(1 - lambda)` over the eigenvalues
/// of a block of `Lambda`.
pub fn block_entropy(block: &CMat) -> f64 {
    let vals: Vec<f64> = block_eigenvalues(block).into_iter().map(|x| x.clamp(0.0, 1.0)).collect();
    entropy_from_occupations(&vals)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Partition {
    pub start: usize,
    pub len: usize,
}

/// Partitions `[0, len)` for `len = 1..n`.
pub fn boundary_partitions(n: usize) -> Vec<Partition> {
    (1..n).map(|len| Partition { start: 0, len }).collect()
}

/// Centered partitions that touch neither end of the chain.
pub fn bulk_partitions(n: usize) -> Vec<Partition> {
    (1..n.saturating_sub(1)).map(|len| Partition { start: (n - len) / 2, len }).collect()
}

pub fn entropy_profile(l: &PureModeMatrix, parts: &[Partition]) -> Result<Vec<f64>> {
    parts.iter().map(|p| Ok(block_entropy(&l.block(p.start, p.len)?))).collect()
}

/// Number of eigenvalues with `min(lambda, 1 - lambda) > tol`.
pub fn count_nontrivial_eigenvalues(block: &CMat, tol: f64) -> usize {
    block_eigenvalues(block).into_iter().filter(|&x| rounding_distance(x) > tol).count()
}

fn check_cylinder(lx: usize, ly: usize) -> Result<()> {
    if lx < 2 || lx % 2 == 1 {
        return Err(FgsError::InvalidInput(format!("Lx must be even and at least 2, got {lx}")));
    }
    if ly == 0 {
        return Err(FgsError::InvalidInput("Ly must be positive".into()));
    }
    Ok(())
}

/// Real-space Hamiltonian of the `Lx x Ly` cylinder, periodic along x and
/// open along y, with the y bonds carrying the sign `(-1)^x`. Site `(x, y)`
/// is mode `y Lx + x`.
pub fn build_cylinder_hamiltonian(lx: usize, ly: usize) -> Result<QuadraticHamiltonian> {
    check_cylinder(lx, ly)?;
    let n = lx * ly;
    let mut a = CMat::zeros(n, n);
    for y in 0..ly {
        for x in 0..lx {
            let i = y * lx + x;
            let right = y * lx + (x + 1) % lx;
            a[(i, right)] += C64::new(0.5, 0.0);
            a[(right, i)] += C64::new(0.5, 0.0);
            if y + 1 < ly {
                let up = i + lx;
                let s = if x % 2 == 0 { 0.5 } else { -0.5 };
                a[(i, up)] += C64::new(s, 0.0);
                a[(up, i)] += C64::new(s, 0.0);
            }
        }
    }
    QuadraticHamiltonian::new(a, CMat::zeros(n, n))
}

/// Momentum sectors `{k, k + Lx/2}` for `k = -Lx/2..-1`, each a `2 Ly`-mode
/// Hamiltonian in the order `(c_{k,1}, c_{k+Lx/2,1}, c_{k,2}, ...)`.
pub fn build_sectorized_hamiltonian(lx: usize, ly: usize) -> Result<Vec<QuadraticHamiltonian>> {
    check_cylinder(lx, ly)?;
    let half = lx / 2;
    (0..half)
        .map(|s| {
            let k = s as f64 - half as f64;
            let c = (2.0 * std::f64::consts::PI * k / lx as f64).cos();
            let n = 2 * ly;
            let mut a = CMat::zeros(n, n);
            for y in 0..ly {
                a[(2 * y, 2 * y)] = C64::new(c, 0.0);
                a[(2 * y + 1, 2 * y + 1)] = C64::new(-c, 0.0);
                if y + 1 < ly {
                    for (p, q) in [(2 * y, 2 * y + 3), (2 * y + 1, 2 * y + 2)] {
                        a[(p, q)] = C64::new(0.5, 0.0);
                        a[(q, p)] = C64::new(0.5, 0.0);
                    }
                }
            }
            QuadraticHamiltonian::new(a, CMat::zeros(n, n))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectorizedState {
    pub lx: usize,
    pub ly: usize,
    pub sectors: Vec<PureModeMatrix>,
}

impl SectorizedState {
    pub fn new(lx: usize, ly: usize, sectors: Vec<PureModeMatrix>) -> Result<Self> {
        check_cylinder(lx, ly)?;
        if sectors.len() != lx / 2 || sectors.iter().any(|s| s.n_modes() != 2 * ly) {
            return Err(FgsError::InvalidInput(format!(
                "expected {} sectors of {} modes",
                lx / 2,
                2 * ly
            )));
        }
        Ok(Self { lx, ly, sectors })
    }

    pub fn ground_state(lx: usize, ly: usize) -> Result<Self> {
        let sectors = build_sectorized_hamiltonian(lx, ly)?
            .iter()
            .map(PureModeMatrix::ground_state)
            .collect::<Result<Vec<_>>>()?;
        Self::new(lx, ly, sectors)
    }

    /// Entropy of the rows `y < cut` summed over sectors.
    pub fn cut_entropy(&self, cut: usize) -> f64 {
        self.sectors.iter().map(|s| block_entropy(&s.matrix().view((0, 0), (2 * cut, 2 * cut)).into_owned())).sum()
    }

    /// `sum_s ||Lambda_s - other_s||_F^2`, square-rooted.
    pub fn distance(&self, other: &SectorizedState) -> f64 {
        self.sectors
            .iter()
            .zip(&other.sectors)
            .map(|(a, b)| (a.matrix() - b.matrix()).norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    /// `sum_s Tr(A_s Lambda_s^T)`-type energy `<H> = sum 2 A_ij <a_i^+ a_j> - Tr A`.
    pub fn energy(&self, hams: &[QuadraticHamiltonian]) -> f64 {
        self.sectors
            .iter()
            .zip(hams)
            .map(|(s, h)| {
                let a = h.a();
                let mut e = -a.trace().re;
                for i in 0..a.nrows() {
                    for j in 0..a.ncols() {
                        e += 2.0 * (a[(i, j)] * s.matrix()[(i, j)]).re;
                    }
                }
                e
            })
            .sum()
    }
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    distance: f64,
    sector: usize,
    index: usize,
    value: f64,
}

/// Sectorized bond-dimension reduction. At each step the window of every
/// sector spans its undecided modes up to the current y cut; the `Lx`
/// eigenvalues closest to {0, 1} across all sectors are rounded in their
/// home sectors. Sectors whose window is exhausted are skipped.
pub fn rbd_csectors(state: &SectorizedState, m: usize) -> Result<(SectorizedState, RbdReport)> {
    if m == 0 {
        return Err(FgsError::InvalidInput("bond parameter m must be at least 1".into()));
    }
    let n = 2 * state.ly;
    let budget = state.lx;
    let mut work: Vec<CMat> = state.sectors.iter().map(|s| s.matrix().clone()).collect();
    let mut acc: Vec<CMat> = vec![CMat::identity(n, n); work.len()];
    let mut decided = vec![0usize; work.len()];
    let mut report = RbdReport::default();
    let mut step = 0;
    while decided.iter().any(|&r| r < n) {
        let end = (2 * (m + 1 + step)).min(n);
        step += 1;
        let windows: Vec<Option<(Vec<f64>, CMat)>> = work
            .par_iter()
            .zip(decided.par_iter())
            .map(|(l, &r)| (r < end).then(|| hermitian_eigen(&l.view((r, r), (end - r, end - r)).into_owned())))
            .collect();
        let mut cands: Vec<Candidate> = windows
            .iter()
            .enumerate()
            .filter_map(|(s, w)| w.as_ref().map(|w| (s, w)))
            .flat_map(|(sector, (vals, _))| {
                vals.iter().enumerate().map(move |(index, &value)| Candidate {
                    distance: rounding_distance(value),
                    sector,
                    index,
                    value,
                })
            })
            .collect();
        cands.sort_by(|a, b| {
            a.distance.total_cmp(&b.distance).then(a.sector.cmp(&b.sector)).then(a.index.cmp(&b.index))
        });
        cands.truncate(budget);
        for (s, window) in windows.iter().enumerate() {
            let Some((_, vecs)) = window else { continue };
            let chosen: Vec<&Candidate> = cands.iter().filter(|c| c.sector == s).collect();
            if chosen.is_empty() {
                continue;
            }
            let first: Vec<usize> = chosen.iter().map(|c| c.index).collect();
            let r = decided[s];
            rotate_window(&mut work[s], &mut acc[s], r, &window_basis(vecs, &first));
            for (offset, c) in chosen.iter().enumerate() {
                decouple(&mut work[s], r + offset, round_occupation(c.value));
                report.roundings.push(c.distance);
            }
            decided[s] += chosen.len();
        }
    }
    let sectors = work
        .into_iter()
        .zip(acc)
        .map(|(l, u)| PureModeMatrix(crate::linalg::hermitize(&(&u * l * u.adjoint()))))
        .collect();
    Ok((SectorizedState { lx: state.lx, ly: state.ly, sectors }, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_hopping, diag_h, random_hamiltonian};
    use crate::state::gs_gamma;

    fn hopping_gs(n: usize) -> PureModeMatrix {
        PureModeMatrix::ground_state(&build_hopping(n, false).unwrap()).unwrap()
    }

    #[test]
    fn ground_state_matches_gs_gamma() {
        let h = build_hopping(10, false).unwrap();
        let g = gs_gamma(&diag_h(&h.compact()).unwrap());
        let a = PureModeMatrix::from_gamma(&g).unwrap();
        let b = PureModeMatrix::ground_state(&h).unwrap();
        assert!((a.matrix() - b.matrix()).norm() < 1e-10);
        assert!((b.to_gamma().matrix() - g.matrix()).norm() < 1e-10);
    }

    #[test]
    fn rejects_mixed_and_paired_states() {
        assert!(PureModeMatrix::new(CMat::identity(3, 3) * C64::new(0.5, 0.0)).is_err());
        let g = gs_gamma(&diag_h(&random_hamiltonian(4, 1, true).unwrap().compact()).unwrap());
        assert!(PureModeMatrix::from_gamma(&g).is_err());
        assert!(matches!(
            PureModeMatrix::ground_state(&build_hopping(8, true).unwrap()),
            Err(FgsError::DegenerateMode(_))
        ));
    }

    #[test]
    fn product_states_are_fixed_points() {
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(
            [1.0, 0.0, 0.0, 1.0, 1.0, 0.0].iter().map(|&x| C64::new(x, 0.0)).collect(),
        ));
        let l = PureModeMatrix::new(d).unwrap();
        for m in 1..4 {
            assert!((rbd(&l, m).unwrap().matrix() - l.matrix()).norm() < 1e-10);
        }
    }

    #[test]
    fn large_m_is_exact() {
        let l = hopping_gs(12);
        assert!((rbd(&l, 11).unwrap().matrix() - l.matrix()).norm() < 1e-12);
        let (r, rep) = rbd_with_report(&l, 12).unwrap();
        assert!(rep.roundings.is_empty() && r == l);
    }

    #[test]
    fn output_is_pure_and_bounded() {
        let n = 60;
        let l = hopping_gs(n);
        for m in [1, 3] {
            let (r, rep) = rbd_with_report(&l, m).unwrap();
            assert!(PureModeMatrix::new(r.matrix().clone()).is_ok());
            assert_eq!(rep.roundings.len(), n);
            for p in boundary_partitions(n) {
                let b = r.block(p.start, p.len).unwrap();
                assert!(count_nontrivial_eigenvalues(&b, 1e-8) <= 2 * m);
                assert!(block_entropy(&b) <= m as f64 * std::f64::consts::LN_2 + 1e-9);
            }
        }
    }

    #[test]
    fn idempotent() {
        let l = hopping_gs(30);
        let once = rbd(&l, 2).unwrap();
        let twice = rbd(&once, 2).unwrap();
        assert!((once.matrix() - twice.matrix()).norm() < 1e-8);
    }

    #[test]
    fn counting() {
        let half = CMat::identity(5, 5) * C64::new(0.5, 0.0);
        assert_eq!(count_nontrivial_eigenvalues(&half, 1e-12), 5);
        assert_eq!(count_nontrivial_eigenvalues(hopping_gs(10).matrix(), 1e-10), 0);
    }

    #[test]
    fn sectors_reproduce_full_lattice() {
        let (lx, ly) = (4, 4);
        let full = diag_h(&build_cylinder_hamiltonian(lx, ly).unwrap().compact()).unwrap();
        let mut sect: Vec<f64> = build_sectorized_hamiltonian(lx, ly)
            .unwrap()
            .iter()
            .flat_map(|h| diag_h(&h.compact()).unwrap().epsilons)
            .collect();
        let mut all = full.epsilons.clone();
        sect.sort_by(f64::total_cmp);
        all.sort_by(f64::total_cmp);
        assert_eq!(sect.len(), all.len());
        assert!(sect.iter().zip(&all).all(|(a, b)| (a - b).abs() < 1e-9));
        assert!(build_sectorized_hamiltonian(5, 4).is_err());
    }

    #[test]
    fn csectors_exact_regime() {
        let st = SectorizedState::ground_state(6, 4).unwrap();
        let (out, _) = rbd_csectors(&st, 4).unwrap();
        assert!(out.distance(&st) < 1e-8);
    }

    #[test]
    fn csectors_single_sector_matches_rbd() {
        // With one sector the per-step budget of Lx = 2 modes differs from the
        // single rounding of rbd, so compare only the entropy bound.
        let st = SectorizedState::ground_state(2, 10).unwrap();
        let (out, _) = rbd_csectors(&st, 1).unwrap();
        for cut in 1..10 {
            assert!(out.cut_entropy(cut) <= 2.0 * std::f64::consts::LN_2 + 1e-9);
        }
    }
}

//! Fixtures shared by the criterion benches.

use fgs_core::compression::PureModeMatrix;
use fgs_core::hamiltonian::{Spectrum, build_hopping, build_tfi, diag_h, random_hamiltonian, to_majorana};
use fgs_core::linalg::RMat;
use fgs_core::state::{CorrelationMatrix, thermal_fix_beta};

pub fn tfi_compact(n: usize) -> fgs_core::hamiltonian::CompactHamiltonian {
    build_tfi(n, 1.0, -1).expect("valid chain").compact()
}

pub fn random_spectrum(n: usize, seed: u64) -> Spectrum {
    diag_h(&random_hamiltonian(n, seed, true).expect("valid size").compact()).expect("diagonalizable")
}

/// Random real antisymmetric matrix of size `2n`.
pub fn random_skew(n: usize, seed: u64) -> RMat {
    let h = random_hamiltonian(n, seed, true).expect("valid size").compact();
    to_majorana(&h).expect("Hermitian input").into_inner()
}

pub fn thermal_state(n: usize, seed: u64) -> CorrelationMatrix {
    thermal_fix_beta(&random_spectrum(n, seed), 1.0).expect("beta is valid")
}

pub fn hopping_ground_state(n: usize) -> PureModeMatrix {
    PureModeMatrix::ground_state(&build_hopping(n, false).expect("valid chain")).expect("gapped open chain")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(random_skew(3, 1).nrows(), 6);
        assert_eq!(thermal_state(4, 2).n_modes(), 4);
        assert_eq!(hopping_ground_state(10).n_modes(), 10);
        assert_eq!(tfi_compact(6).n_modes(), 6);
    }
}

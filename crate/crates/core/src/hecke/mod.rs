//! Level-one Hecke eigenforms: exact q-expansions, the Victor Miller basis,
//! Hecke matrices, and eigenforms with normalized coefficients.

mod eigen;
mod multimod;
mod qexp;

pub use eigen::{
    eigenforms, eigenforms_for_weights, hecke_matrix, symsq_dirichlet_coeffs, EigenSystem,
    HeckeEigenform, HeckeMatrix,
};
pub use multimod::BasisFactory;
pub use qexp::{delta, eisenstein, QExpansion};

use crate::{Error, Result};

/// Default prime bound for eigenform computations.
pub const DEFAULT_PRIME_BOUND: u64 = 1000;

/// `dim S_k` for level one.
pub fn dimension(k: u32) -> usize {
    if k % 2 == 1 || k < 12 || k == 14 {
        return 0;
    }
    let d = (k / 12) as usize;
    if k % 12 == 2 {
        d - 1
    } else {
        d
    }
}

/// Echelonized integral basis `g_i = q^i + O(q^{d+1})` of `S_k`, to precision `n`.
pub fn victor_miller_basis(k: u32, precision: usize) -> Result<Vec<QExpansion>> {
    let d = dimension(k);
    if d == 0 {
        return Err(Error::invalid(format!("no cusp forms of weight {k}")));
    }
    if precision < d + 2 {
        return Err(Error::InsufficientPrecision { required: d + 2, available: precision });
    }
    BasisFactory::new(precision).basis(k)
}

/// Precision needed for eigenforms with primes up to `prime_bound`: enough
/// for the coefficients themselves and for the `T_5` consistency check.
pub fn required_precision(k: u32, prime_bound: u64) -> usize {
    let d = dimension(k);
    (prime_bound as usize).max(5 * (d + 1)) + 1
}

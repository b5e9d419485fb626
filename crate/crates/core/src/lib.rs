//! Computational toolkit for the mollified moments of symmetric-square
//! L-functions attached to level-one Hecke eigenforms.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: multiplicative functions, Kloosterman and Ramanujan sums.
//! * [`specfun`]: complex log-gamma, digamma, zeta, J-Bessel, the bump
//!   weight `h` and its Fourier/Mellin companions.
//! * [`hecke`]: exact q-expansions, the Victor Miller basis and Hecke
//!   eigenforms with normalized coefficients.
//! * [`lfun`]: the approximate-functional-equation weight `V_k`, central
//!   values, `L(1, sym^2 f)`, and the Petersson / Bessel-average checks.
//! * [`mollifier`]: the optimal mollifier and its closed-form predictions.
//! * [`moments`]: empirical first/second moments and the mollified ratio.

pub mod arith;
pub mod cache;
mod error;
pub mod hecke;
pub mod identities;
pub mod lfun;
pub mod mollifier;
pub mod moments;
pub mod quad;
pub mod report;
pub mod specfun;
pub mod sum;

pub use error::{Error, Result};
pub use num_complex::Complex64;

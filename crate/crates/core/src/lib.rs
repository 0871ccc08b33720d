//! Entanglement swapping of Wishart matrices and induced random states.
//!
//! The crate covers exact moment formulas (sums over permutations and
//! non-crossing partitions), Monte Carlo sampling of the swapped matrix and
//! its rescaled version, limit laws with goodness-of-fit tools, and
//! state-level operations (Bell projection, partial trace and transpose,
//! PPT tests).

pub mod error;
pub mod hermitian;
pub mod laurent;
pub mod linalg;
pub mod moments;
pub mod partition;
pub mod perm;
pub mod qstates;
pub mod rmt;
pub mod scalar;
pub mod speclaws;
pub mod verify;

pub use error::{Error, Result};
pub use hermitian::HermitianMatrix;
pub use laurent::LaurentPoly;
pub use linalg::CMatrix;
pub use moments::SwapCase;
pub use partition::SetPartition;
pub use perm::Permutation;
pub use qstates::DensityMatrix;
pub use rmt::{EmpiricalSpectrum, SampleStream, SwapParams};
pub use scalar::{Field, Real};
pub use speclaws::LimitLaw;

/// Exact rational scalar used by the moment formulas.
pub type Rational = num_rational::BigRational;
/// Laurent polynomial in `c` with exact rational coefficients.
pub type LaurentPolyQ = LaurentPoly<Rational>;
pub type HermitianMatrixF64 = HermitianMatrix<f64>;
pub type HermitianMatrixF32 = HermitianMatrix<f32>;
pub type EmpiricalSpectrumF64 = EmpiricalSpectrum<f64>;
pub type DensityMatrixF64 = DensityMatrix<f64>;

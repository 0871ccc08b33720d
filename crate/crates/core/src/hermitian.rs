use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::scalar::Real;

/// Dense square matrix that was Hermitian within tolerance at construction.
///
/// The stored matrix is the Hermitian part `(M + M*)/2` of the input, so
/// later computations see an exactly Hermitian operand.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T> {
    matrix: CMatrix<T>,
}

impl<T: Real> HermitianMatrix<T> {
    /// Accepts `m` when `max |M - M*| <= tol · (1 + max |M|)`, with `tol`
    /// from [`Real::hermitian_tolerance`].
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix cannot be Hermitian",
                m.rows(),
                m.cols()
            )));
        }
        let deviation = m.hermitian_deviation();
        if deviation > T::hermitian_tolerance() * (T::one() + m.max_abs()) {
            return Err(Error::NotHermitian {
                deviation: deviation.as_f64(),
            });
        }
        Ok(Self {
            matrix: m.hermitian_part(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: CMatrix::identity(n),
        }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        Self {
            matrix: CMatrix::from_real_diagonal(diag),
        }
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &[Complex<T>]) -> Self {
        Self {
            matrix: CMatrix::outer(v, v).hermitian_part(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.matrix.get(i, j)
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    pub fn scale(&self, a: T) -> Self {
        Self {
            matrix: self.matrix.scale(a),
        }
    }

    /// `a·self + b·1`.
    pub fn affine(&self, a: T, b: T) -> Self {
        Self {
            matrix: self.matrix.scale(a).add_identity(b).expect("square"),
        }
    }

    /// Full real spectrum, ascending.
    pub fn eigenvalues(&self) -> Vec<T> {
        hermitian_eigenvalues(&self.matrix).expect("Hermitian input converges")
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues().first().copied().unwrap_or_else(T::zero)
    }

    /// Relative max-entry deviation `max |A - B| / max(1, max |A|)`.
    pub fn relative_deviation(&self, other: &Self) -> Result<T> {
        let diff = self.matrix.max_abs_diff(&other.matrix)?;
        Ok(diff / T::one().max(self.matrix.max_abs()))
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues<T: Real>(m: &HermitianMatrix<T>) -> Vec<T> {
    m.eigenvalues()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_vec(
            2,
            2,
            vec![
                Complex::new(1.0, 0.0),
                Complex::new(1.0, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(1.0, 0.0),
            ],
        )
        .unwrap();
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian { .. })));
        assert!(HermitianMatrix::new(CMatrix::<f64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn symmetrizes_roundoff() {
        let mut m = CMatrix::<f64>::identity(2);
        m.set(0, 1, Complex::new(0.5, 1e-13));
        m.set(1, 0, Complex::new(0.5, 0.0));
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.get(0, 1), h.get(1, 0).conj());
    }

    #[test]
    fn spectrum_examples() {
        assert_eq!(eigenvalues(&HermitianMatrix::<f64>::identity(5)), vec![1.0; 5]);
        let d = HermitianMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let ev = d.eigenvalues();
        assert!(ev.iter().zip([1.0, 2.0, 3.0]).all(|(a, b): (&f64, f64)| (a - b).abs() < 1e-14));
    }
}

//! Quantum states on bipartite spaces `ℂ^{d_A} ⊗ ℂ^{d_B}`, with row index
//! `a·d_B + b`.

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::linalg::CMatrix;
use crate::rmt::{swap_contract, wishart, SampleStream};
use crate::scalar::Real;

/// Factorization `n = d_A · d_B` of a state's dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bipartition {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl Bipartition {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::InvalidArgument("subsystem dimensions must be positive".into()));
        }
        Ok(Self { dim_a, dim_b })
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::ShapeMismatch(format!(
                "dimension {n} does not factor as {}·{}",
                self.dim_a, self.dim_b
            )));
        }
        Ok(())
    }
}

/// Traced-out factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Positive semidefinite unit-trace Hermitian matrix.
///
/// Accepted when Hermitian within [`Real::hermitian_tolerance`], with
/// `|Tr ρ - 1| <=` [`Real::trace_tolerance`] and smallest eigenvalue at least
/// `-`[`Real::psd_tolerance`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    matrix: HermitianMatrix<T>,
    bipartition: Option<Bipartition>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(m: HermitianMatrix<T>) -> Result<Self> {
        let trace = m.trace();
        if (trace - T::one()).abs() > T::trace_tolerance() {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        let min = m.min_eigenvalue();
        if min < -T::psd_tolerance() {
            return Err(Error::InvalidState(format!("minimum eigenvalue {min:e} is negative")));
        }
        Ok(Self {
            matrix: m,
            bipartition: None,
        })
    }

    /// `M / Tr M` for positive semidefinite `M`.
    pub fn normalized(m: HermitianMatrix<T>) -> Result<Self> {
        let trace = m.trace();
        if trace.abs() <= T::min_positive_value() {
            return Err(Error::ZeroTrace);
        }
        Self::new(m.scale(T::one() / trace))
    }

    pub fn with_bipartition(mut self, dim_a: usize, dim_b: usize) -> Result<Self> {
        let bp = Bipartition::new(dim_a, dim_b)?;
        bp.check(self.dim())?;
        self.bipartition = Some(bp);
        Ok(self)
    }

    /// `1/n`.
    pub fn maximally_mixed(n: usize) -> Self {
        let inv = T::one() / T::of(n as f64);
        Self {
            matrix: HermitianMatrix::identity(n).scale(inv),
            bipartition: None,
        }
    }

    /// `|ω⟩⟨ω|` with `|ω⟩ = d^{-1/2} Σ_i |ii⟩`, bipartition `d ⊗ d`.
    pub fn maximally_entangled(d: usize) -> Self {
        Self {
            matrix: HermitianMatrix::projector(&maximally_entangled_vector(d)),
            bipartition: Some(Bipartition { dim_a: d, dim_b: d }),
        }
    }

    /// `ρ_A ⊗ ρ_B` with the matching bipartition.
    pub fn product(a: &Self, b: &Self) -> Self {
        Self {
            matrix: HermitianMatrix::new(a.matrix.matrix().kron(b.matrix.matrix()))
                .expect("Kronecker product of Hermitian matrices"),
            bipartition: Some(Bipartition {
                dim_a: a.dim(),
                dim_b: b.dim(),
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn bipartition(&self) -> Option<Bipartition> {
        self.bipartition
    }

    pub fn matrix(&self) -> &HermitianMatrix<T> {
        &self.matrix
    }

    pub fn purity(&self) -> T {
        let m = self.matrix.matrix();
        m.data().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨ψ|ρ|ψ⟩` for a unit vector `ψ`.
    pub fn fidelity_with_pure(&self, psi: &[Complex<T>]) -> Result<T> {
        if psi.len() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} against state of dimension {}",
                psi.len(),
                self.dim()
            )));
        }
        Ok(self.matrix.matrix().quadratic_form(psi).re)
    }

    fn require_bipartition(&self) -> Result<Bipartition> {
        self.bipartition
            .ok_or_else(|| Error::InvalidState("state carries no bipartition".into()))
    }

    /// Reduced state on the factor that is kept.
    pub fn reduce(&self, traced: Subsystem) -> Result<Self> {
        let bp = self.require_bipartition()?;
        let m = partial_trace(&self.matrix, bp.dim_a, bp.dim_b, traced)?;
        Ok(Self {
            matrix: m,
            bipartition: None,
        })
    }

    pub fn partial_transpose(&self) -> Result<HermitianMatrix<T>> {
        let bp = self.require_bipartition()?;
        partial_transpose(&self.matrix, bp.dim_a, bp.dim_b)
    }

    pub fn is_ppt(&self, tol: T) -> Result<bool> {
        Ok(self.partial_transpose()?.min_eigenvalue() >= -tol)
    }
}

/// `d^{-1/2} Σ_i |ii⟩`.
pub fn maximally_entangled_vector<T: Real>(d: usize) -> Vec<Complex<T>> {
    let amp = Complex::new(T::one() / T::of(d as f64).sqrt(), T::zero());
    let mut v = vec![Complex::zero(); d * d];
    for i in 0..d {
        v[i * d + i] = amp;
    }
    v
}

/// `P_d = Σ_{i,j} |i⟩⟨j| ⊗ |i⟩⟨j|`, equal to `d` times the projector onto
/// the maximally entangled vector.
pub fn bell_projection<T: Real>(d: usize) -> HermitianMatrix<T> {
    let m = CMatrix::from_fn(d * d, d * d, |r, c| {
        let (i, ip) = (r / d, r % d);
        let (j, jp) = (c / d, c % d);
        if i == ip && j == jp {
            Complex::one()
        } else {
            Complex::zero()
        }
    });
    HermitianMatrix::new(m).expect("real symmetric")
}

/// `W / Tr W` for a Wishart `W` with parameters `(n, s)`.
pub fn induced_state<T: Real>(n: usize, s: usize, stream: &mut SampleStream) -> DensityMatrix<T> {
    let w = wishart::<T>(n, s, stream);
    let trace = w.trace();
    DensityMatrix {
        matrix: w.scale(T::one() / trace),
        bipartition: None,
    }
}

pub fn partial_trace_matrix<T: Real>(
    m: &CMatrix<T>,
    dim_a: usize,
    dim_b: usize,
    traced: Subsystem,
) -> Result<CMatrix<T>> {
    let bp = Bipartition::new(dim_a, dim_b)?;
    if !m.is_square() {
        return Err(Error::ShapeMismatch("partial trace needs a square matrix".into()));
    }
    bp.check(m.rows())?;
    Ok(match traced {
        Subsystem::B => CMatrix::from_fn(dim_a, dim_a, |a, ap| {
            (0..dim_b).map(|b| m.get(a * dim_b + b, ap * dim_b + b)).sum()
        }),
        Subsystem::A => CMatrix::from_fn(dim_b, dim_b, |b, bq| {
            (0..dim_a).map(|a| m.get(a * dim_b + b, a * dim_b + bq)).sum()
        }),
    })
}

pub fn partial_trace<T: Real>(
    m: &HermitianMatrix<T>,
    dim_a: usize,
    dim_b: usize,
    traced: Subsystem,
) -> Result<HermitianMatrix<T>> {
    HermitianMatrix::new(partial_trace_matrix(m.matrix(), dim_a, dim_b, traced)?)
}

/// `(Id ⊗ T)(M)`: transposes every `d_B × d_B` block.
pub fn partial_transpose<T: Real>(
    m: &HermitianMatrix<T>,
    dim_a: usize,
    dim_b: usize,
) -> Result<HermitianMatrix<T>> {
    let bp = Bipartition::new(dim_a, dim_b)?;
    bp.check(m.dim())?;
    let src = m.matrix();
    let out = CMatrix::from_fn(m.dim(), m.dim(), |r, c| {
        let (a, b) = (r / dim_b, r % dim_b);
        let (ap, bq) = (c / dim_b, c % dim_b);
        src.get(a * dim_b + bq, ap * dim_b + b)
    });
    HermitianMatrix::new(out)
}

pub fn is_ppt<T: Real>(rho: &DensityMatrix<T>, dim_a: usize, dim_b: usize, tol: T) -> Result<bool> {
    Ok(partial_transpose(rho.matrix(), dim_a, dim_b)?.min_eigenvalue() >= -tol)
}

/// `Tr_{d₁}[(ρ₁ ⊗ ρ₂)(P_{d₁} ⊗ 1)]` normalized by its trace, for states on
/// `ℂ^{d₁} ⊗ ℂ^{d₂}`. The output lives on `ℂ^{d₂} ⊗ ℂ^{d₂}`.
pub fn swap_states<T: Real>(
    rho1: &DensityMatrix<T>,
    rho2: &DensityMatrix<T>,
    d1: usize,
    d2: usize,
) -> Result<DensityMatrix<T>> {
    for rho in [rho1, rho2] {
        if let Some(bp) = rho.bipartition() {
            if (bp.dim_a, bp.dim_b) != (d1, d2) {
                return Err(Error::ShapeMismatch(format!(
                    "state is split {}⊗{}, expected {d1}⊗{d2}",
                    bp.dim_a, bp.dim_b
                )));
            }
        }
    }
    let numerator = swap_contract(rho1.matrix().matrix(), rho2.matrix().matrix(), d1, d2)?;
    DensityMatrix::normalized(numerator)?.with_bipartition(d2, d2)
}

/// One row of a PPT scan.
#[derive(Clone, Debug, PartialEq)]
pub struct PptScanRow {
    pub d: usize,
    pub s: usize,
    pub samples: usize,
    pub ppt_fraction: f64,
    /// Agresti–Coull 95% half-width.
    pub ci_halfwidth: f64,
    pub seed: u64,
}

/// Agresti–Coull half-width at normal quantile `z`.
pub fn agresti_coull_halfwidth(successes: usize, trials: usize, z: f64) -> f64 {
    let n = trials as f64 + z * z;
    let p = (successes as f64 + z * z / 2.0) / n;
    z * (p * (1.0 - p) / n).sqrt()
}

/// Absolute tolerance on the smallest eigenvalue of `ρ^Γ` in PPT decisions.
pub const PPT_TOLERANCE: f64 = 1e-8;

/// Fraction of PPT induced states `ρ_{d², s}` (split `d ⊗ d`) for each `s`.
///
/// Cell `(k, i)` (the `i`th draw at `s_values[k]`) uses stream
/// `(seed, k·2³² + i)`.
pub fn ppt_scan(d: usize, s_values: &[usize], samples: usize, seed: u64) -> Result<Vec<PptScanRow>> {
    if d < 2 {
        return Err(Error::InvalidArgument("ppt scan needs d >= 2".into()));
    }
    if samples == 0 || s_values.contains(&0) {
        return Err(Error::InvalidArgument("samples and s must be positive".into()));
    }
    let n = d * d;
    let mut rows = Vec::with_capacity(s_values.len());
    for (k, &s) in s_values.iter().enumerate() {
        let flags: Vec<bool> = (0..samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut stream = SampleStream::new(seed, ((k as u64) << 32) | i);
                let rho = induced_state::<f64>(n, s, &mut stream);
                is_ppt(&rho, d, d, PPT_TOLERANCE).expect("dimension is d²")
            })
            .collect();
        let ppt = flags.iter().filter(|&&b| b).count();
        rows.push(PptScanRow {
            d,
            s,
            samples,
            ppt_fraction: ppt as f64 / samples as f64,
            ci_halfwidth: agresti_coull_halfwidth(ppt, samples, 1.96),
            seed,
        });
    }
    Ok(rows)
}

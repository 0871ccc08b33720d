//! Sampling engine: complex Gaussian factors, Wishart matrices, the
//! entanglement-swapped matrix `W`, its rescaling `Z`, and Monte Carlo
//! moment estimates.
//!
//! Row indices of the `(d₁d₂) × s` factors are split as `(j, k)` with the
//! `d₁` leg `j` slow: row `j·d₂ + k`. Rows of the swapped `d₂² × d₂²` matrix
//! are `(k, k')` with row `k·d₂ + k'`.
//!
//! Every sample `i` of a run with master seed `seed` draws from its own
//! ChaCha8 stream `(seed, i)`, so results do not depend on how samples are
//! spread over threads.

use num_complex::Complex;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::linalg::CMatrix;
use crate::moments::SwapCase;
use crate::scalar::Real;

/// Deterministic random stream identified by `(seed, index)`.
#[derive(Clone, Debug)]
pub struct SampleStream {
    seed: u64,
    index: u64,
    rng: ChaCha8Rng,
}

impl SampleStream {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { seed, index, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Standard complex Gaussian: real and imaginary parts independent
    /// `N(0, 1/2)`, so `E|g|² = 1`. Always drawn in `f64`.
    pub fn complex_gaussian(&mut self) -> Complex<f64> {
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn uniform(&mut self) -> f64 {
        rand::Rng::gen(&mut self.rng)
    }
}

/// Matrix of i.i.d. standard complex Gaussians with its stream provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianFactor<T> {
    pub matrix: CMatrix<T>,
    pub seed: u64,
    pub stream: u64,
}

impl<T: Real> GaussianFactor<T> {
    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }
}

/// Draws a `rows × cols` factor, filling entries row by row.
pub fn sample_gaussian<T: Real>(rows: usize, cols: usize, stream: &mut SampleStream) -> GaussianFactor<T> {
    let matrix = CMatrix::from_fn(rows, cols, |_, _| {
        let g = stream.complex_gaussian();
        Complex::new(T::of(g.re), T::of(g.im))
    });
    GaussianFactor {
        matrix,
        seed: stream.seed(),
        stream: stream.index(),
    }
}

/// `G G*` for an `n × s` standard complex Gaussian `G`.
pub fn wishart<T: Real>(n: usize, s: usize, stream: &mut SampleStream) -> HermitianMatrix<T> {
    wishart_from_factor(&sample_gaussian(n, s, stream))
}

pub fn wishart_from_factor<T: Real>(g: &GaussianFactor<T>) -> HermitianMatrix<T> {
    HermitianMatrix::new(g.matrix.gram()).expect("Gram matrices are Hermitian")
}

/// Swapped matrix from the Gaussian factors:
/// `W = G G*` with `g_{kk',tt'} = d₁^{-1/2} Σ_j g⁽¹⁾_{jk,t} g⁽²⁾_{jk',t'}`.
pub fn swap_direct<T: Real>(
    g1: &GaussianFactor<T>,
    g2: &GaussianFactor<T>,
    d1: usize,
    d2: usize,
    s: usize,
) -> Result<HermitianMatrix<T>> {
    for (name, g) in [("G1", g1), ("G2", g2)] {
        if g.rows() != d1 * d2 || g.cols() != s {
            return Err(Error::ShapeMismatch(format!(
                "{name} is {}x{}, expected {}x{s}",
                g.rows(),
                g.cols(),
                d1 * d2
            )));
        }
    }
    let norm = T::one() / T::of(d1 as f64).sqrt();
    let (a, b) = (&g1.matrix, &g2.matrix);
    let mut g = CMatrix::zeros(d2 * d2, s * s);
    for k in 0..d2 {
        for kp in 0..d2 {
            let row = k * d2 + kp;
            for t in 0..s {
                for tp in 0..s {
                    let mut acc = Complex::zero();
                    for j in 0..d1 {
                        acc += a.get(j * d2 + k, t) * b.get(j * d2 + kp, tp);
                    }
                    g.set(row, t * s + tp, acc * norm);
                }
            }
        }
    }
    HermitianMatrix::new(g.gram())
}

/// Swapped matrix from the Wishart matrices:
/// `W = d₁⁻¹ Tr_{H₁}[(W₁ ⊗ W₂)(P_{d₁} ⊗ 1)]` with the legs regrouped as
/// `H₁ ⊗ H₂ = (ℂ^{d₁} ⊗ ℂ^{d₁}) ⊗ (ℂ^{d₂} ⊗ ℂ^{d₂})`.
///
/// The Bell projection and partial trace contract to
/// `W_{(k,k'),(l,l')} = d₁⁻¹ Σ_{j,i} W₁_{(j,k),(i,l)} W₂_{(j,k'),(i,l')}`,
/// evaluated as one matrix product over the `(j, i)` index pair. Only rows
/// `(k, l)` with `k ≤ l` of that product are formed; the rest follow from
/// Hermiticity.
pub fn swap_tensor<T: Real>(
    w1: &HermitianMatrix<T>,
    w2: &HermitianMatrix<T>,
    d1: usize,
    d2: usize,
) -> Result<HermitianMatrix<T>> {
    swap_contract(w1.matrix(), w2.matrix(), d1, d2)
}

/// Unnormalized-by-trace contraction shared by [`swap_tensor`] and the
/// state-level swap.
pub(crate) fn swap_contract<T: Real>(
    w1: &CMatrix<T>,
    w2: &CMatrix<T>,
    d1: usize,
    d2: usize,
) -> Result<HermitianMatrix<T>> {
    let n = d1 * d2;
    for (name, w) in [("W1", w1), ("W2", w2)] {
        if d1 == 0 || d2 == 0 || w.rows() != n || w.cols() != n {
            return Err(Error::ShapeMismatch(format!(
                "{name} is {}x{}, which does not factor as ({d1}·{d2})²",
                w.rows(),
                w.cols()
            )));
        }
    }
    // pair index (k, l) with k <= l -> compact row
    let pairs: Vec<(usize, usize)> = (0..d2).flat_map(|k| (k..d2).map(move |l| (k, l))).collect();
    let mut slot = vec![usize::MAX; d2 * d2];
    for (r, &(k, l)) in pairs.iter().enumerate() {
        slot[k * d2 + l] = r;
    }
    let cols = d1 * d1;
    let a = CMatrix::from_fn(pairs.len(), cols, |r, ji| {
        let (k, l) = pairs[r];
        let (j, i) = (ji / d1, ji % d1);
        w1.get(j * d2 + k, i * d2 + l)
    });
    let b = CMatrix::from_fn(d2 * d2, cols, |r, ji| {
        let (kp, lp) = (r / d2, r % d2);
        let (j, i) = (ji / d1, ji % d1);
        w2.get(j * d2 + kp, i * d2 + lp)
    });
    // m[(k,l), (k',l')] = Σ_{j,i} W1[(j,k),(i,l)] W2[(j,k'),(i,l')]
    let m = a.mul_transpose(&b)?;
    let inv_d1 = T::one() / T::of(d1 as f64);
    let dim = d2 * d2;
    let w = CMatrix::from_fn(dim, dim, |row, col| {
        let (k, kp) = (row / d2, row % d2);
        let (l, lp) = (col / d2, col % d2);
        if k <= l {
            m.get(slot[k * d2 + l], kp * d2 + lp) * inv_d1
        } else {
            m.get(slot[l * d2 + k], lp * d2 + kp).conj() * inv_d1
        }
    });
    HermitianMatrix::new(w)
}

/// `Z = d₂ s (W / (d₂² s²) - 1/d₂²) = W/(d₂ s) - (s/d₂)·1`.
pub fn rescale_z<T: Real>(w: &HermitianMatrix<T>, d2: usize, s: usize) -> Result<HermitianMatrix<T>> {
    if w.dim() != d2 * d2 {
        return Err(Error::ShapeMismatch(format!(
            "W has dimension {}, expected d2² = {}",
            w.dim(),
            d2 * d2
        )));
    }
    let (d2, s) = (T::of(d2 as f64), T::of(s as f64));
    Ok(w.affine(T::one() / (d2 * s), -s / d2))
}

/// Inverse of [`rescale_z`]: `W = d₂ s Z + s²·1`.
pub fn unscale_z<T: Real>(z: &HermitianMatrix<T>, d2: usize, s: usize) -> Result<HermitianMatrix<T>> {
    if z.dim() != d2 * d2 {
        return Err(Error::ShapeMismatch(format!(
            "Z has dimension {}, expected d2² = {}",
            z.dim(),
            d2 * d2
        )));
    }
    let (d2, s) = (T::of(d2 as f64), T::of(s as f64));
    Ok(z.affine(d2 * s, s * s))
}

/// Dimensions of one swap experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SwapParams {
    pub case: SwapCase,
    pub d1: usize,
    pub d2: usize,
    pub s: usize,
}

impl SwapParams {
    pub fn new(case: SwapCase, d1: usize, d2: usize, s: usize) -> Result<Self> {
        if d1 == 0 || d2 == 0 || s == 0 {
            return Err(Error::InvalidArgument("d1, d2 and s must be positive".into()));
        }
        Ok(Self { case, d1, d2, s })
    }

    /// Draws `W` for one sample: `G₁` then (independent case) `G₂` from the
    /// same stream.
    pub fn sample_w<T: Real>(&self, stream: &mut SampleStream) -> HermitianMatrix<T> {
        let n = self.d1 * self.d2;
        let w1 = wishart::<T>(n, self.s, stream);
        let w2 = match self.case {
            SwapCase::Independent => wishart::<T>(n, self.s, stream),
            SwapCase::Equal => w1.clone(),
        };
        swap_tensor(&w1, &w2, self.d1, self.d2).expect("dimensions checked at construction")
    }

    pub fn sample_z<T: Real>(&self, stream: &mut SampleStream) -> HermitianMatrix<T> {
        rescale_z(&self.sample_w(stream), self.d2, self.s).expect("W has dimension d2²")
    }
}

/// Generating parameters of a simulated spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpectrumSource {
    pub params: SwapParams,
    pub seed: u64,
    pub sample_index: u64,
}

/// Sorted eigenvalue sample.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalSpectrum<T> {
    eigenvalues: Vec<T>,
    source: Option<SpectrumSource>,
}

impl<T: Real> EmpiricalSpectrum<T> {
    /// Sorts the values; NaNs are rejected.
    pub fn from_values(mut values: Vec<T>) -> Result<Self> {
        if values.iter().any(|x| x.is_nan()) {
            return Err(Error::InvalidArgument("spectrum contains NaN".into()));
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
        Ok(Self {
            eigenvalues: values,
            source: None,
        })
    }

    /// Spectrum of `Z` for sample `sample_index` of a run seeded with `seed`.
    pub fn simulate_z(params: SwapParams, seed: u64, sample_index: u64) -> Self {
        let mut stream = SampleStream::new(seed, sample_index);
        let z = params.sample_z::<T>(&mut stream);
        Self {
            eigenvalues: z.eigenvalues(),
            source: Some(SpectrumSource {
                params,
                seed,
                sample_index,
            }),
        }
    }

    pub fn values(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn source(&self) -> Option<&SpectrumSource> {
        self.source.as_ref()
    }

    /// `(1/n) Σ λᵢᵖ`.
    pub fn moment(&self, p: usize) -> T {
        let n = T::of(self.eigenvalues.len() as f64);
        self.eigenvalues.iter().map(|&x| x.powi(p as i32)).sum::<T>() / n
    }
}

/// Sample mean, standard error and variance of one scalar observable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentEstimate<T> {
    pub p: usize,
    pub mean: T,
    pub stderr: T,
    /// Unbiased sample variance of the per-sample values.
    pub variance: T,
}

/// Summarizes per-sample observation vectors `obs[i][p-1]`, reducing in
/// sample order.
pub fn summarize<T: Real>(observations: &[Vec<T>]) -> Result<Vec<MomentEstimate<T>>> {
    let n = observations.len();
    if n < 2 {
        return Err(Error::InvalidArgument("at least two samples are required".into()));
    }
    let width = observations[0].len();
    let nt = T::of(n as f64);
    Ok((0..width)
        .map(|k| {
            let mean = observations.iter().map(|o| o[k]).sum::<T>() / nt;
            let ss = observations.iter().map(|o| (o[k] - mean).powi(2)).sum::<T>();
            let variance = ss / T::of((n - 1) as f64);
            MomentEstimate {
                p: k + 1,
                mean,
                stderr: (variance / nt).sqrt(),
                variance,
            }
        })
        .collect())
}

/// Runs `observe` on samples `0..samples`, each with its own stream. The
/// output order is the sample order whatever the thread count.
pub fn run_samples<T, F>(samples: usize, seed: u64, observe: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut SampleStream) -> T + Sync,
{
    (0..samples as u64)
        .into_par_iter()
        .map(|i| observe(&mut SampleStream::new(seed, i)))
        .collect()
}

/// Monte Carlo estimates of `(1/d₂²) E Tr Zᵖ` for `p = 1..=p_max`.
pub fn mc_moments<T: Real>(
    params: SwapParams,
    p_max: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<MomentEstimate<T>>> {
    let obs = run_samples(samples, seed, |stream| {
        let z = params.sample_z::<T>(stream);
        let ev = z.eigenvalues();
        let n = T::of(ev.len() as f64);
        (1..=p_max)
            .map(|p| ev.iter().map(|&x| x.powi(p as i32)).sum::<T>() / n)
            .collect::<Vec<T>>()
    });
    summarize(&obs)
}

/// Monte Carlo estimates of the unnormalized `E Tr Wᵖ` for `p = 1..=p_max`.
pub fn mc_trace_moments<T: Real>(
    params: SwapParams,
    p_max: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<MomentEstimate<T>>> {
    let obs = run_samples(samples, seed, |stream| {
        let ev = params.sample_w::<T>(stream).eigenvalues();
        (1..=p_max)
            .map(|p| ev.iter().map(|&x| x.powi(p as i32)).sum::<T>())
            .collect::<Vec<T>>()
    });
    summarize(&obs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_moments() {
        let mut stream = SampleStream::new(42, 0);
        let g = sample_gaussian::<f64>(200, 200, &mut stream);
        let n = (200 * 200) as f64;
        let mean_sq: f64 = g.matrix.data().iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
        assert!((0.97..=1.03).contains(&mean_sq), "{mean_sq}");
        let mean: Complex<f64> = g.matrix.data().iter().sum::<Complex<f64>>() / n;
        assert!(mean.norm() <= 0.02);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = sample_gaussian::<f64>(3, 4, &mut SampleStream::new(7, 3));
        let b = sample_gaussian::<f64>(3, 4, &mut SampleStream::new(7, 3));
        let c = sample_gaussian::<f64>(3, 4, &mut SampleStream::new(7, 4));
        assert_eq!(a, b);
        assert_ne!(a.matrix, c.matrix);
        assert_eq!((a.seed, a.stream), (7, 3));
    }

    #[test]
    fn f32_and_f64_share_the_stream() {
        let a = sample_gaussian::<f64>(2, 2, &mut SampleStream::new(1, 0));
        let b = sample_gaussian::<f32>(2, 2, &mut SampleStream::new(1, 0));
        for (x, y) in a.matrix.data().iter().zip(b.matrix.data()) {
            assert!((x.re - y.re as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn wishart_is_psd_with_mean_trace_ns() {
        let w = wishart::<f64>(32, 64, &mut SampleStream::new(3, 0));
        assert!(w.min_eigenvalue() >= -1e-10);
        let mean_trace: f64 =
            run_samples(100, 5, |s| wishart::<f64>(32, 32, s).trace()).iter().sum::<f64>() / 100.0;
        let ratio = mean_trace / (32.0 * 32.0);
        assert!((0.97..=1.03).contains(&ratio), "{ratio}");
    }

    #[test]
    fn wishart_rank_is_bounded() {
        let w = wishart::<f64>(6, 2, &mut SampleStream::new(3, 1));
        let ev = w.eigenvalues();
        let scale = ev.last().unwrap().abs();
        assert!(ev[..4].iter().all(|x| x.abs() < 1e-12 * scale));
        assert!(ev[4] > 1e-6 * scale);
    }

    #[test]
    fn scalar_wishart_is_exponential() {
        // |g|² ~ Exp(1); KS statistic against 1 - e^{-x} must be below the
        // asymptotic 0.1% critical value 1.949 / √n.
        let n = 10_000;
        let mut xs = run_samples(n, 11, |s| wishart::<f64>(1, 1, s).trace());
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = 1.0 - (-x).exp();
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 1.949 / (n as f64).sqrt(), "{d}");
    }

    #[test]
    fn direct_swap_scalar_case() {
        let mut st = SampleStream::new(9, 0);
        let g1 = sample_gaussian::<f64>(1, 1, &mut st);
        let g2 = sample_gaussian::<f64>(1, 1, &mut st);
        let w = swap_direct(&g1, &g2, 1, 1, 1).unwrap();
        let want = (g1.matrix.get(0, 0) * g2.matrix.get(0, 0)).norm_sqr();
        assert!((w.get(0, 0).re - want).abs() < 1e-14);
    }

    #[test]
    fn direct_swap_rejects_bad_shapes() {
        let mut st = SampleStream::new(9, 0);
        let g1 = sample_gaussian::<f64>(4, 2, &mut st);
        let g2 = sample_gaussian::<f64>(3, 2, &mut st);
        assert!(matches!(swap_direct(&g1, &g2, 2, 2, 2), Err(Error::ShapeMismatch(_))));
        let w = HermitianMatrix::<f64>::identity(5);
        assert!(swap_tensor(&w, &w, 2, 2).is_err());
    }

    #[test]
    fn routes_agree() {
        for (i, (d1, d2, s)) in [(3, 2, 2), (1, 2, 3), (2, 3, 1), (4, 3, 3)].into_iter().enumerate() {
            let mut st = SampleStream::new(100, i as u64);
            let g1 = sample_gaussian::<f64>(d1 * d2, s, &mut st);
            let g2 = sample_gaussian::<f64>(d1 * d2, s, &mut st);
            let direct = swap_direct(&g1, &g2, d1, d2, s).unwrap();
            let tensor =
                swap_tensor(&wishart_from_factor(&g1), &wishart_from_factor(&g2), d1, d2).unwrap();
            assert!(direct.relative_deviation(&tensor).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn tensor_swap_of_identities_is_identity() {
        for (d1, d2) in [(1, 2), (2, 2), (3, 2), (2, 3)] {
            let id = HermitianMatrix::<f64>::identity(d1 * d2);
            let w = swap_tensor(&id, &id, d1, d2).unwrap();
            assert!(w.relative_deviation(&HermitianMatrix::identity(d2 * d2)).unwrap() < 1e-14);
        }
    }

    #[test]
    fn tensor_swap_with_trivial_d1_is_kronecker_product() {
        let mut st = SampleStream::new(1, 2);
        let w1 = wishart::<f64>(3, 2, &mut st);
        let w2 = wishart::<f64>(3, 4, &mut st);
        let w = swap_tensor(&w1, &w2, 1, 3).unwrap();
        let k = HermitianMatrix::new(w1.matrix().kron(w2.matrix())).unwrap();
        assert!(w.relative_deviation(&k).unwrap() < 1e-12);
    }

    #[test]
    fn rescale_examples() {
        let (d2, s) = (3usize, 4usize);
        let centre = HermitianMatrix::<f64>::identity(d2 * d2).scale((s * s) as f64);
        let z = rescale_z(&centre, d2, s).unwrap();
        assert!(z.matrix().max_abs() < 1e-12);

        let w = swap_tensor(
            &wishart::<f64>(6, s, &mut SampleStream::new(2, 0)),
            &wishart::<f64>(6, s, &mut SampleStream::new(2, 1)),
            2,
            d2,
        )
        .unwrap();
        let z = rescale_z(&w, d2, s).unwrap();
        let want = w.trace() / (d2 * s) as f64 - (d2 * s) as f64;
        assert!((z.trace() - want).abs() < 1e-10 * (1.0 + want.abs()));
        let back = unscale_z(&z, d2, s).unwrap();
        assert!(back.relative_deviation(&w).unwrap() < 1e-12);
        assert!(rescale_z(&w, 2, s).is_err());
    }

    #[test]
    fn summaries_need_two_samples() {
        assert!(summarize::<f64>(&[vec![1.0]]).is_err());
        let est = summarize(&[vec![1.0, 2.0], vec![3.0, 2.0]]).unwrap();
        assert_eq!(est[0].mean, 2.0);
        assert_eq!(est[0].variance, 2.0);
        assert_eq!(est[1].stderr, 0.0);
    }

    #[test]
    fn mc_is_deterministic() {
        let params = SwapParams::new(SwapCase::Independent, 2, 2, 3).unwrap();
        let a = mc_moments::<f64>(params, 3, 20, 5).unwrap();
        let b = mc_moments::<f64>(params, 3, 20, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn first_z_moment_is_centred() {
        let params = SwapParams::new(SwapCase::Independent, 3, 3, 4).unwrap();
        let est = mc_moments::<f64>(params, 1, 2000, 17).unwrap();
        assert!(est[0].mean.abs() <= 3.0 * est[0].stderr, "{:?}", est[0]);
    }

    #[test]
    fn mean_trace_of_swapped_matrix() {
        // E Tr W = d₂² s² at d1 = d2 = 4, s = 8 over 500 draws.
        let params = SwapParams::new(SwapCase::Independent, 4, 4, 8).unwrap();
        let traces = run_samples(500, 23, |st| params.sample_w::<f64>(st).trace());
        let mean = traces.iter().sum::<f64>() / 500.0;
        let target = (16 * 64) as f64;
        assert!((0.9 * target..=1.1 * target).contains(&mean), "{mean}");
    }
}

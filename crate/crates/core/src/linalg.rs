//! Dense complex matrices and a Hermitian eigenvalue solver.
//!
//! Storage is row-major. The eigensolver reduces to real symmetric
//! tridiagonal form with Householder reflections and finishes with the
//! implicit-shift QL iteration; only eigenvalues are computed.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in diag.iter().enumerate() {
            m.data[i * n + i] = Complex::new(x, T::zero());
        }
        m
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[Complex<T>], v: &[Complex<T>]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex<T>) {
        self.data[i * self.cols + j] = z;
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, a: T) -> Self {
        self.map(|z| z * a)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// `self + a·1`.
    pub fn add_identity(&self, a: T) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("identity shift needs a square matrix".into()));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            out.data[i * self.cols + i].re += a;
        }
        Ok(out)
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).fold(Complex::zero(), |a, b| a + b)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `max |M - M*|` entrywise.
    pub fn hermitian_deviation(&self) -> T {
        assert!(self.is_square());
        let n = self.rows;
        let mut dev = T::zero();
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::of(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self.get(i, j) + self.get(j, i).conj()) * half)
    }

    /// Matrix product `self · other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(gemm_nt(self, &other.transpose(), false))
    }

    /// `self · other*`.
    pub fn mul_adjoint(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by the adjoint of {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(gemm_nt(self, other, true))
    }

    /// `self · otherᵀ` (no conjugation).
    pub fn mul_transpose(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by the transpose of {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(gemm_nt(self, other, false))
    }

    /// `self · self*`, computing one triangle and mirroring it.
    pub fn gram(&self) -> Self {
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            let a = self.row(i);
            for j in 0..=i {
                let z = dot(a, self.row(j), true);
                out.data[i * n + j] = z;
                out.data[j * n + i] = z.conj();
            }
            out.data[i * n + i].im = T::zero();
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        Self::from_fn(r, c, |i, j| {
            self.get(i / other.rows, j / other.cols) * other.get(i % other.rows, j % other.cols)
        })
    }

    /// `⟨v| self |v⟩`.
    pub fn quadratic_form(&self, v: &[Complex<T>]) -> Complex<T> {
        let mut acc = Complex::zero();
        for (i, vi) in v.iter().enumerate() {
            acc += vi.conj() * dot(self.row(i), v, false);
        }
        acc
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

#[inline]
fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>], conj_b: bool) -> Complex<T> {
    let (mut re0, mut im0, mut re1, mut im1) = (T::zero(), T::zero(), T::zero(), T::zero());
    let sign = if conj_b { -T::one() } else { T::one() };
    let mut chunks_a = a.chunks_exact(2);
    let mut chunks_b = b.chunks_exact(2);
    for (x, y) in (&mut chunks_a).zip(&mut chunks_b) {
        let (y0i, y1i) = (y[0].im * sign, y[1].im * sign);
        re0 += x[0].re * y[0].re - x[0].im * y0i;
        im0 += x[0].re * y0i + x[0].im * y[0].re;
        re1 += x[1].re * y[1].re - x[1].im * y1i;
        im1 += x[1].re * y1i + x[1].im * y[1].re;
    }
    for (x, y) in chunks_a.remainder().iter().zip(chunks_b.remainder()) {
        let yi = y.im * sign;
        re0 += x.re * y.re - x.im * yi;
        im0 += x.re * yi + x.im * y.re;
    }
    Complex::new(re0 + re1, im0 + im1)
}

/// `A · Bᵀ` (or `A · B*` when `conj_b`), both operands row-major so every
/// output entry is a contiguous dot product. Uses a 2×2 register block.
fn gemm_nt<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>, conj_b: bool) -> CMatrix<T> {
    let (m, n, k) = (a.rows, b.rows, a.cols);
    let mut out = CMatrix::zeros(m, n);
    let sign = if conj_b { -T::one() } else { T::one() };
    let mut i = 0;
    while i + 1 < m {
        let (a0, a1) = (a.row(i), a.row(i + 1));
        let mut j = 0;
        while j + 1 < n {
            let (b0, b1) = (b.row(j), b.row(j + 1));
            let mut acc = [T::zero(); 8];
            for t in 0..k {
                let (x0, x1) = (a0[t], a1[t]);
                let (y0, y1) = (b0[t], b1[t]);
                let (y0i, y1i) = (y0.im * sign, y1.im * sign);
                acc[0] += x0.re * y0.re - x0.im * y0i;
                acc[1] += x0.re * y0i + x0.im * y0.re;
                acc[2] += x0.re * y1.re - x0.im * y1i;
                acc[3] += x0.re * y1i + x0.im * y1.re;
                acc[4] += x1.re * y0.re - x1.im * y0i;
                acc[5] += x1.re * y0i + x1.im * y0.re;
                acc[6] += x1.re * y1.re - x1.im * y1i;
                acc[7] += x1.re * y1i + x1.im * y1.re;
            }
            out.data[i * n + j] = Complex::new(acc[0], acc[1]);
            out.data[i * n + j + 1] = Complex::new(acc[2], acc[3]);
            out.data[(i + 1) * n + j] = Complex::new(acc[4], acc[5]);
            out.data[(i + 1) * n + j + 1] = Complex::new(acc[6], acc[7]);
            j += 2;
        }
        if j < n {
            out.data[i * n + j] = dot(a0, b.row(j), conj_b);
            out.data[(i + 1) * n + j] = dot(a1, b.row(j), conj_b);
        }
        i += 2;
    }
    if i < m {
        for j in 0..n {
            out.data[i * n + j] = dot(a.row(i), b.row(j), conj_b);
        }
    }
    out
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// The strictly lower triangle is treated as authoritative; callers are
/// expected to pass a matrix that is Hermitian up to roundoff.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Result<Vec<T>> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!("{}x{} is not square", m.rows, m.cols)));
    }
    let (mut diag, mut off) = tridiagonalize(m);
    tridiagonal_eigenvalues(&mut diag, &mut off)?;
    diag.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    Ok(diag)
}

/// Householder reduction to real symmetric tridiagonal form.
///
/// Returns the diagonal and the moduli of the subdiagonal (`off[i]` couples
/// `i` and `i+1`; `off[n-1] = 0`). Dropping the phases of the subdiagonal is
/// a diagonal unitary similarity, so the spectrum is unchanged.
fn tridiagonalize<T: Real>(m: &CMatrix<T>) -> (Vec<T>, Vec<T>) {
    let n = m.rows;
    // Lower triangle, row-major, of the working copy.
    let mut a: Vec<Complex<T>> = m.data.clone();
    let mut diag = vec![T::zero(); n];
    let mut off = vec![T::zero(); n];
    let mut v = vec![Complex::<T>::zero(); n];
    let mut p = vec![Complex::<T>::zero(); n];

    for k in 0..n.saturating_sub(1) {
        diag[k] = a[k * n + k].re;
        let lo = k + 1;
        // x = A[k+1.., k]
        let mut norm_sq = T::zero();
        for i in lo..n {
            v[i] = a[i * n + k];
            norm_sq += v[i].norm_sqr();
        }
        let alpha = norm_sq.sqrt();
        let x0 = v[lo];
        let tail_sq = norm_sq - x0.norm_sqr();
        if alpha == T::zero() || (tail_sq <= T::zero() && x0.im == T::zero()) {
            off[k] = x0.norm();
            continue;
        }
        let phase = if x0.norm() == T::zero() {
            Complex::one()
        } else {
            x0 / x0.norm()
        };
        // v = x + e^{iθ}‖x‖ e₁, reflector H = 1 - τ v v*, H x = -e^{iθ}‖x‖ e₁.
        v[lo] = x0 + phase * alpha;
        let vnorm_sq = tail_sq + v[lo].norm_sqr();
        let tau = T::of(2.0) / vnorm_sq;
        off[k] = alpha;

        // p = τ B v on the trailing block, using the lower triangle only.
        for pi in p[lo..n].iter_mut() {
            *pi = Complex::zero();
        }
        for i in lo..n {
            let row = &a[i * n..i * n + n];
            let vi = v[i];
            let mut acc = row[i] * vi;
            for j in lo..i {
                acc += row[j] * v[j];
                p[j] += row[j].conj() * vi;
            }
            p[i] += acc;
        }
        let mut vp = Complex::<T>::zero();
        for i in lo..n {
            p[i] = p[i] * tau;
            vp += v[i].conj() * p[i];
        }
        // w = p - (τ/2)(v*p) v, stored back into p.
        let half = tau * vp.re * T::of(0.5);
        for i in lo..n {
            p[i] = p[i] - v[i] * half;
        }
        // B -= v w* + w v* on the lower triangle.
        for i in lo..n {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a[i * n..i * n + n];
            for j in lo..=i {
                row[j] -= vi * p[j].conj() + wi * v[j].conj();
            }
        }
    }
    if n > 0 {
        diag[n - 1] = a[(n - 1) * n + (n - 1)].re;
    }
    (diag, off)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix. On return `diag`
/// holds the (unsorted) eigenvalues.
fn tridiagonal_eigenvalues<T: Real>(diag: &mut [T], off: &mut [T]) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    off[n - 1] = T::zero();
    let eps = T::epsilon();
    let two = T::of(2.0);
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(Error::InvalidArgument(
                    "tridiagonal QL iteration did not converge".into(),
                ));
            }
            let mut g = (diag[l + 1] - diag[l]) / (two * off[l]);
            let mut r = g.hypot(T::one());
            g = diag[m] - diag[l] + off[l] / (g + r.abs().copysign(g));
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == T::zero() {
                    diag[i + 1] -= p;
                    off[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + two * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = T::zero();
        }
    }
    Ok(())
}

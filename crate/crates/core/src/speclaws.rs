//! Reference limit laws, Kolmogorov–Smirnov distance and histograms.
//!
//! Laws are evaluated in `f64`. The continuous parts have square-root edges,
//! so integrals over the support use `x = a + (b - a)(1 - cos θ)/2`, which
//! makes the integrand smooth in `θ`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::rmt::EmpiricalSpectrum;
use crate::scalar::Real;

/// Absolute tolerance of the adaptive quadrature behind [`LimitLaw::cdf`].
pub const CDF_TOLERANCE: f64 = 1e-8;

/// Semicircle density `√(4 - x²)/(2π)` on `[-2, 2]`.
pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

/// Continuous part `√(4λ - (x - 1 - λ)²)/(2πx)` of the free Poisson law with
/// rate `λ`, supported on `[(√λ - 1)², (√λ + 1)²]`.
pub fn mp_density(x: f64, rate: f64) -> f64 {
    let r = rate.sqrt();
    let (a, b) = ((r - 1.0).powi(2), (r + 1.0).powi(2));
    if x <= a || x >= b || x <= 0.0 {
        return 0.0;
    }
    (4.0 * rate - (x - 1.0 - rate).powi(2)).max(0.0).sqrt() / (2.0 * PI * x)
}

/// Mass `max(0, 1 - λ)` of the free Poisson atom at 0.
pub fn mp_atom(rate: f64) -> f64 {
    (1.0 - rate).max(0.0)
}

/// Continuous part of the law of `(Y - c²)/c`, `Y` free Poisson with rate
/// `c²`: `c · mp_density(c x + c², c²)`, supported on `[1/c - 2, 1/c + 2]`.
pub fn z_limit_density(x: f64, c: f64) -> f64 {
    c * mp_density(c * x + c * c, c * c)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LimitLaw {
    Semicircle,
    /// Free Poisson with the given rate.
    MarchenkoPastur { rate: f64 },
    /// Centered free Poisson of rate `c²`, divided by `c`.
    ZLimit { c: f64 },
}

impl LimitLaw {
    pub fn marchenko_pastur(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidArgument(format!("rate must be positive, got {rate}")));
        }
        Ok(Self::MarchenkoPastur { rate })
    }

    pub fn z_limit(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("c must be positive, got {c}")));
        }
        Ok(Self::ZLimit { c })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Semicircle => "semicircle",
            Self::MarchenkoPastur { .. } => "mp",
            Self::ZLimit { .. } => "z_limit",
        }
    }

    /// Rate or `c`; `None` for the semicircle.
    pub fn parameter(&self) -> Option<f64> {
        match *self {
            Self::Semicircle => None,
            Self::MarchenkoPastur { rate } => Some(rate),
            Self::ZLimit { c } => Some(c),
        }
    }

    /// Density of the continuous part.
    pub fn density(&self, x: f64) -> f64 {
        match *self {
            Self::Semicircle => semicircle_density(x),
            Self::MarchenkoPastur { rate } => mp_density(x, rate),
            Self::ZLimit { c } => z_limit_density(x, c),
        }
    }

    /// Closed support `[a, b]` of the continuous part.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Semicircle => (-2.0, 2.0),
            Self::MarchenkoPastur { rate } => {
                let r = rate.sqrt();
                ((r - 1.0).powi(2), (r + 1.0).powi(2))
            }
            Self::ZLimit { c } => (1.0 / c - 2.0, 1.0 / c + 2.0),
        }
    }

    /// Location and mass of the atom, when present.
    pub fn atom(&self) -> Option<(f64, f64)> {
        let (loc, mass) = match *self {
            Self::Semicircle => return None,
            Self::MarchenkoPastur { rate } => (0.0, mp_atom(rate)),
            Self::ZLimit { c } => (-c, mp_atom(c * c)),
        };
        (mass > 0.0).then_some((loc, mass))
    }

    fn theta_of(&self, x: f64) -> f64 {
        let (a, b) = self.support();
        let u = (1.0 - 2.0 * (x - a) / (b - a)).clamp(-1.0, 1.0);
        u.acos()
    }

    /// `f(x(θ)) dx/dθ` on `θ ∈ [0, π]`.
    fn integrand(&self, theta: f64, weight: impl Fn(f64) -> f64) -> f64 {
        let (a, b) = self.support();
        let half = (b - a) / 2.0;
        let x = a + half * (1.0 - theta.cos());
        self.density(x) * weight(x) * half * theta.sin()
    }

    /// `∫_a^x f`, continuous part only.
    fn continuous_mass_below(&self, x: f64) -> f64 {
        let (a, b) = self.support();
        if x <= a {
            return 0.0;
        }
        let top = if x >= b { PI } else { self.theta_of(x) };
        adaptive_simpson(&|t| self.integrand(t, |_| 1.0), 0.0, top, CDF_TOLERANCE)
    }

    /// `P(X <= x)`, including the atom.
    pub fn cdf(&self, x: f64) -> f64 {
        let atom = match self.atom() {
            Some((loc, mass)) if x >= loc => mass,
            _ => 0.0,
        };
        (atom + self.continuous_mass_below(x)).clamp(0.0, 1.0)
    }

    /// `P(X < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match self.atom() {
            Some((loc, mass)) if x == loc => (self.cdf(x) - mass).max(0.0),
            _ => self.cdf(x),
        }
    }

    /// Total mass: quadrature of the continuous part plus the atom.
    pub fn total_mass(&self) -> f64 {
        self.moment(0)
    }

    /// `∫ xᵖ dμ` by quadrature, atom included.
    pub fn moment(&self, p: u32) -> f64 {
        let atom = self.atom().map_or(0.0, |(loc, mass)| mass * loc.powi(p as i32));
        let cont = adaptive_simpson(
            &|t| self.integrand(t, |x| x.powi(p as i32)),
            0.0,
            PI,
            1e-12,
        );
        atom + cont
    }

    /// Smallest `x` with `cdf(x) >= u`, by bisection.
    pub fn quantile(&self, u: f64) -> f64 {
        let (mut lo, mut hi) = self.support();
        if let Some((loc, _)) = self.atom() {
            lo = lo.min(loc);
            hi = hi.max(loc);
        }
        if u <= self.cdf(lo) {
            return lo;
        }
        while hi - lo > 1e-12 * (1.0 + hi.abs()) {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) >= u {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

impl fmt::Display for LimitLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.parameter() {
            None => write!(f, "{}", self.name()),
            Some(v) => write!(f, "{}({v})", self.name()),
        }
    }
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    // a few coarse panels first, so that narrow features are not skipped
    let panels = 8;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let (l, r) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (fl, fmid, fr) = (f(l), f(0.5 * (l + r)), f(r));
            let whole = simpson(fl, fmid, fr, h);
            refine(f, l, r, fl, fmid, fr, whole, tol / panels as f64, 50)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// `sup_x |F_n(x) - F(x)|`, attained at a sample point from the left or
/// the right. Ties and atoms are handled by comparing both one-sided limits.
pub fn ks_distance<T: Real>(spectrum: &EmpiricalSpectrum<T>, law: &LimitLaw) -> Result<f64> {
    ks_distance_sorted(
        &spectrum.values().iter().map(|x| x.as_f64()).collect::<Vec<_>>(),
        law,
    )
}

/// [`ks_distance`] for values sorted ascending.
pub fn ks_distance_sorted(values: &[f64], law: &LimitLaw) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    let n = values.len() as f64;
    let mut sup: f64 = 0.0;
    let mut i = 0;
    while i < values.len() {
        let x = values[i];
        let mut j = i;
        while j < values.len() && values[j] == x {
            j += 1;
        }
        sup = sup
            .max((law.cdf_left(x) - i as f64 / n).abs())
            .max((law.cdf(x) - j as f64 / n).abs());
        i = j;
    }
    Ok(sup.clamp(0.0, 1.0))
}

/// One histogram bar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistogramBin {
    pub center: f64,
    pub width: f64,
    pub height: f64,
}

/// Area-normalized histogram on `[min, max]` with `bin_count` equal bins.
/// A degenerate range becomes one unit-width window around the value.
pub fn histogram<T: Real>(spectrum: &EmpiricalSpectrum<T>, bin_count: usize) -> Result<Vec<HistogramBin>> {
    let values: Vec<f64> = spectrum.values().iter().map(|x| x.as_f64()).collect();
    histogram_of(&values, bin_count)
}

pub fn histogram_of(values: &[f64], bin_count: usize) -> Result<Vec<HistogramBin>> {
    if bin_count == 0 {
        return Err(Error::InvalidArgument("bin_count must be at least 1".into()));
    }
    if values.is_empty() {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
    let width = (hi - lo) / bin_count as f64;
    let mut counts = vec![0usize; bin_count];
    for &x in values {
        let k = (((x - lo) / width) as usize).min(bin_count - 1);
        counts[k] += 1;
    }
    let n = values.len() as f64;
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| HistogramBin {
            center: lo + (k as f64 + 0.5) * width,
            width,
            height: count as f64 / (n * width),
        })
        .collect())
}

/// `sup |f - g|` of two densities over a uniform grid on `[a, b]`.
pub fn density_sup_distance(f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64, a: f64, b: f64, points: usize) -> f64 {
    (0..=points)
        .map(|i| a + (b - a) * i as f64 / points as f64)
        .map(|x| (f(x) - g(x)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::limit_moment;
    use crate::rmt::{run_samples, SampleStream};
    use crate::Rational;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    #[test]
    fn semicircle_examples() {
        assert!((semicircle_density(0.0) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(semicircle_density(2.0), 0.0);
        assert_eq!(semicircle_density(-2.0), 0.0);
        assert!((LimitLaw::Semicircle.moment(2) - 1.0).abs() < 1e-6);
        assert!((LimitLaw::Semicircle.moment(4) - 2.0).abs() < 1e-6);
        assert!((LimitLaw::Semicircle.cdf(0.0) - 0.5).abs() < 1e-8);
    }

    #[test]
    fn mp_examples() {
        // √(4 - 0)/(2π · 2) = 1/(2π)
        assert!((mp_density(2.0, 1.0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        for rate in [0.5f64, 1.0, 4.0] {
            let (a, b) = LimitLaw::MarchenkoPastur { rate }.support();
            assert_eq!(mp_density(a, rate), 0.0);
            assert_eq!(mp_density(b, rate), 0.0);
            let mean = LimitLaw::MarchenkoPastur { rate }.moment(1);
            assert!((mean - rate).abs() < 1e-5, "{rate}: {mean}");
        }
        assert_eq!(mp_atom(0.25), 0.75);
        assert_eq!(mp_atom(2.0), 0.0);
        assert!(LimitLaw::marchenko_pastur(0.0).is_err());
    }

    #[test]
    fn mp_total_mass() {
        for rate in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let m = LimitLaw::MarchenkoPastur { rate }.total_mass();
            assert!((m - 1.0).abs() < 1e-6, "{rate}: {m}");
        }
    }

    #[test]
    fn mp_second_moment_is_free_poisson() {
        // free cumulants all equal λ: m₂ = λ + λ²
        for rate in [0.5f64, 2.0] {
            let m2 = LimitLaw::MarchenkoPastur { rate }.moment(2);
            assert!((m2 - rate - rate * rate).abs() < 1e-6);
        }
    }

    #[test]
    fn z_limit_examples() {
        for c in [0.5, 1.0, 2.0] {
            let law = LimitLaw::ZLimit { c };
            assert!((law.moment(2) - 1.0).abs() < 1e-5);
            assert!(law.moment(1).abs() < 1e-5);
        }
        assert!((LimitLaw::ZLimit { c: 2.0 }.moment(3) - 0.5).abs() < 1e-5);
        assert_eq!(LimitLaw::ZLimit { c: 0.5 }.atom(), Some((-0.5, 0.75)));
        assert_eq!(LimitLaw::ZLimit { c: 2.0 }.atom(), None);
    }

    #[test]
    fn z_limit_moments_match_exact_limit() {
        for (c, cq) in [(0.5, Rational::new(1.into(), 2.into())), (1.0, Rational::from_integer(1.into())), (2.0, Rational::from_integer(2.into()))] {
            let law = LimitLaw::ZLimit { c };
            for p in 1..=6 {
                let exact = limit_moment::<Rational>(p).eval(&cq).to_f64().unwrap();
                let quad = law.moment(p as u32);
                assert!((quad - exact).abs() < 1e-4, "c={c} p={p}: {quad} vs {exact}");
            }
        }
    }

    #[test]
    fn z_limit_at_large_c_approaches_semicircle() {
        // Near x = 1/c - 2 the density has a square-root edge, while the
        // semicircle is about √(4/c)/(2π) there, so the sup distance on
        // [-2, 2] decays like 1/(π√c).
        let sup = |c: f64| density_sup_distance(|x| z_limit_density(x, c), semicircle_density, -2.0, 2.0, 40_000);
        let at8 = sup(8.0);
        assert!((0.10..=0.13).contains(&at8), "{at8}");
        assert!(sup(64.0) < 0.05);
        assert!(sup(32.0) < sup(16.0) && sup(16.0) < at8);
    }

    #[test]
    fn ks_examples() {
        let zeros = EmpiricalSpectrum::from_values(vec![0.0f64; 10]).unwrap();
        let ks = ks_distance(&zeros, &LimitLaw::Semicircle).unwrap();
        assert!((ks - 0.5).abs() < 1e-8);
        let empty = EmpiricalSpectrum::<f64>::from_values(vec![]).unwrap();
        assert!(ks_distance(&empty, &LimitLaw::Semicircle).is_err());
        let far = EmpiricalSpectrum::from_values(vec![100.0f64]).unwrap();
        assert!((ks_distance(&far, &LimitLaw::Semicircle).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ks_of_samples_from_the_law() {
        for law in [LimitLaw::Semicircle, LimitLaw::ZLimit { c: 0.5 }, LimitLaw::MarchenkoPastur { rate: 2.0 }] {
            let xs = run_samples(10_000, 4, |s: &mut SampleStream| law.quantile(s.uniform()));
            let spectrum = EmpiricalSpectrum::from_values(xs).unwrap();
            let ks = ks_distance(&spectrum, &law).unwrap();
            assert!(ks <= 0.02, "{law}: {ks}");
        }
    }

    #[test]
    fn atom_is_a_step() {
        let law = LimitLaw::ZLimit { c: 0.5 };
        assert!((law.cdf(-0.5) - law.cdf_left(-0.5) - 0.75).abs() < 1e-12);
        assert!((law.cdf(10.0) - 1.0).abs() < 1e-6);
        assert_eq!(law.cdf(-10.0), 0.0);
    }

    #[test]
    fn histogram_examples() {
        let one = EmpiricalSpectrum::from_values(vec![3.0f64]).unwrap();
        let h = histogram(&one, 1).unwrap();
        assert_eq!(h.len(), 1);
        assert!((h[0].height * h[0].width - 1.0).abs() < 1e-12);
        let grid: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let h = histogram_of(&grid, 10).unwrap();
        assert!(h.iter().all(|b| (b.height - 1.0).abs() < 0.01), "{h:?}");
        assert!(histogram_of(&grid, 0).is_err());
    }

    proptest! {
        #[test]
        fn histogram_is_normalized(values in prop::collection::vec(-1e3f64..1e3, 1..200), bins in 1usize..50) {
            let h = histogram_of(&values, bins).unwrap();
            let area: f64 = h.iter().map(|b| b.width * b.height).sum();
            prop_assert!((area - 1.0).abs() < 1e-12);
        }

        #[test]
        fn ks_is_in_unit_interval(values in prop::collection::vec(-5f64..5.0, 1..50), c in 0.2f64..4.0) {
            let s = EmpiricalSpectrum::from_values(values).unwrap();
            let ks = ks_distance(&s, &LimitLaw::ZLimit { c }).unwrap();
            prop_assert!((0.0..=1.0).contains(&ks));
        }

        #[test]
        fn densities_are_nonnegative(x in -10f64..20.0, c in 0.1f64..5.0) {
            prop_assert!(z_limit_density(x, c) >= 0.0);
            prop_assert!(mp_density(x, c) >= 0.0);
            prop_assert!(semicircle_density(x) >= 0.0);
        }
    }
}

//! Exact moments of the swapped Wishart matrix and of its limit law.
//!
//! For `W = d₁⁻¹ Tr_{d₁}[(W₁ ⊗ W₂) P_{d₁}]` with `W₁, W₂` Wishart of
//! parameters `(d₁d₂, s)`:
//!
//! * independent factors:
//!   `E Tr Wᵖ = Σ_{π₁,π₂ ∈ S_p} d₂^{#(γ⁻¹π₁)+#(γ⁻¹π₂)} s^{#π₁+#π₂} d₁^{#(π₁⁻¹π₂)-p}`
//! * equal factors (`W₁ = W₂`):
//!   `E Tr Wᵖ = Σ_{π ∈ S_{2p}} d₂^{#(δ⁻¹π)} s^{#π} d₁^{#(β⁻¹π)-p}`
//!
//! Both sums are first collapsed into a [`MomentExpansion`], a table of
//! exponent triples with integer multiplicities, and only then evaluated in
//! the requested field. With `BigRational` the result is exact.
//!
//! The limit of `d₂⁻² E Tr Zᵖ` (with `Z` the centered, rescaled matrix and
//! `s/d₂ → c`) is `Σ_{π ∈ NC⁰(p)} c^{2#π - p}`; [`limit_moment`] returns it
//! as a Laurent polynomial in `c`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::partition::{enumerate_nc, enumerate_nc0};
use crate::perm::{self, permutations, Permutation, DEFAULT_ENUMERATION_BOUND};
use crate::scalar::Field;

/// Default degree bound for the equal-factor sum, which runs over `S_{2p}`.
pub const DEFAULT_EQUAL_CASE_BOUND: usize = 4;

/// How the two Wishart factors are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SwapCase {
    /// `W₁` and `W₂` independent.
    Independent,
    /// `W₁ = W₂`.
    Equal,
}

impl SwapCase {
    pub fn as_str(self) -> &'static str {
        match self {
            SwapCase::Independent => "indep",
            SwapCase::Equal => "equal",
        }
    }
}

impl std::str::FromStr for SwapCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "indep" | "independent" | "I" => Ok(SwapCase::Independent),
            "equal" | "II" => Ok(SwapCase::Equal),
            other => Err(Error::InvalidArgument(format!("unknown case `{other}`"))),
        }
    }
}

/// Exponents of one monomial `d₂^a s^b d₁^e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponents {
    pub d2: i64,
    pub s: i64,
    pub d1: i64,
}

/// `E Tr Wᵖ` as a multiset of monomials in `(d₂, s, d₁)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentExpansion {
    pub p: usize,
    pub case: SwapCase,
    pub terms: BTreeMap<Exponents, u64>,
}

impl MomentExpansion {
    /// Number of permutations (or pairs) summed over.
    pub fn term_count(&self) -> u64 {
        self.terms.values().sum()
    }

    pub fn evaluate<T: Field>(&self, d1: u64, d2: u64, s: u64) -> T {
        let (d1, d2, s) = (T::from_count(d1), T::from_count(d2), T::from_count(s));
        self.terms.iter().fold(T::zero(), |acc, (e, &n)| {
            acc + T::from_count(n) * d2.powi(e.d2) * s.powi(e.s) * d1.powi(e.d1)
        })
    }
}

fn check_dimensions(d1: u64, d2: u64, s: u64) -> Result<()> {
    if d1 == 0 || d2 == 0 || s == 0 {
        return Err(Error::InvalidArgument("d1, d2 and s must be positive".into()));
    }
    Ok(())
}

/// Cycle count of `a⁻¹ ∘ b` given `a⁻¹` as an image table.
fn cycles_of_product(a_inv: &[u8], b: &[u8], seen: &mut [bool]) -> u32 {
    let p = b.len();
    seen[..p].iter_mut().for_each(|x| *x = false);
    let mut count = 0;
    for start in 0..p {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = a_inv[b[i] as usize] as usize;
        }
    }
    count
}

/// Expansion of the independent-factor moment, summing over `S_p × S_p`.
pub fn expansion_indep(p: usize, bound: usize) -> Result<MomentExpansion> {
    if p > u8::MAX as usize {
        return Err(Error::EnumerationBound {
            requested: p,
            bound: bound.min(u8::MAX as usize),
        });
    }
    let gamma_inv = perm::full_cycle(p.max(1)).inverse();
    let perms: Vec<Permutation> = permutations(p, bound)?.collect();
    // (#(γ⁻¹π), #π, π⁻¹, π) per permutation.
    let rows: Vec<(u32, u32, Vec<u8>, Vec<u8>)> = perms
        .iter()
        .map(|pi| {
            let a = gamma_inv.compose(pi).expect("same degree").cycle_count() as u32;
            let b = pi.cycle_count() as u32;
            let inv = pi.inverse().images().iter().map(|&x| x as u8).collect();
            let img = pi.images().iter().map(|&x| x as u8).collect();
            (a, b, inv, img)
        })
        .collect();

    let counts = rows
        .par_iter()
        .fold(
            || (HashMap::<(u32, u32, u32), u64>::new(), vec![false; p]),
            |(mut acc, mut seen), (a1, b1, inv1, _)| {
                for (a2, b2, _, img2) in &rows {
                    let e = cycles_of_product(inv1, img2, &mut seen);
                    *acc.entry((a1 + a2, b1 + b2, e)).or_insert(0) += 1;
                }
                (acc, seen)
            },
        )
        .map(|(acc, _)| acc)
        .reduce(HashMap::new, merge_counts);

    let p_i = p as i64;
    let terms = counts
        .into_iter()
        .map(|((a, b, e), n)| {
            (
                Exponents {
                    d2: a as i64,
                    s: b as i64,
                    d1: e as i64 - p_i,
                },
                n,
            )
        })
        .collect();
    Ok(MomentExpansion {
        p,
        case: SwapCase::Independent,
        terms,
    })
}

/// Expansion of the equal-factor moment, summing over `S_{2p}`.
pub fn expansion_equal(p: usize, bound: usize) -> Result<MomentExpansion> {
    if p > bound {
        return Err(Error::EnumerationBound {
            requested: p,
            bound,
        });
    }
    let delta_inv = perm::delta(p).inverse();
    let beta_inv = perm::beta(p).inverse();
    let counts = permutations(2 * p, usize::MAX)?
        .par_bridge()
        .fold(HashMap::<(u32, u32, u32), u64>::new, |mut acc, pi| {
            let a = delta_inv.compose(&pi).expect("same degree").cycle_count() as u32;
            let b = pi.cycle_count() as u32;
            let e = beta_inv.compose(&pi).expect("same degree").cycle_count() as u32;
            *acc.entry((a, b, e)).or_insert(0) += 1;
            acc
        })
        .reduce(HashMap::new, merge_counts);
    let p_i = p as i64;
    let terms = counts
        .into_iter()
        .map(|((a, b, e), n)| {
            (
                Exponents {
                    d2: a as i64,
                    s: b as i64,
                    d1: e as i64 - p_i,
                },
                n,
            )
        })
        .collect();
    Ok(MomentExpansion {
        p,
        case: SwapCase::Equal,
        terms,
    })
}

fn merge_counts(
    mut a: HashMap<(u32, u32, u32), u64>,
    b: HashMap<(u32, u32, u32), u64>,
) -> HashMap<(u32, u32, u32), u64> {
    for (k, n) in b {
        *a.entry(k).or_insert(0) += n;
    }
    a
}

/// `E Tr Wᵖ` for independent factors, `p ≤ 8`.
pub fn exact_moment_indep<T: Field>(p: usize, d1: u64, d2: u64, s: u64) -> Result<T> {
    exact_moment_indep_bounded(p, d1, d2, s, DEFAULT_ENUMERATION_BOUND)
}

pub fn exact_moment_indep_bounded<T: Field>(
    p: usize,
    d1: u64,
    d2: u64,
    s: u64,
    bound: usize,
) -> Result<T> {
    check_dimensions(d1, d2, s)?;
    Ok(expansion_indep(p, bound)?.evaluate(d1, d2, s))
}

/// `E Tr Wᵖ` for `W₁ = W₂`, `p ≤ 4`.
///
/// The sum joins the Bell legs of the two copies as a `G`–`Ḡ` pair, so it is
/// the moment of the swap of `W₁` with `W̄₁`. For the literal `W₂ = W₁`
/// contraction the first moment is `(d₂s)² + d₂s` instead.
pub fn exact_moment_equal<T: Field>(p: usize, d1: u64, d2: u64, s: u64) -> Result<T> {
    exact_moment_equal_bounded(p, d1, d2, s, DEFAULT_EQUAL_CASE_BOUND)
}

pub fn exact_moment_equal_bounded<T: Field>(
    p: usize,
    d1: u64,
    d2: u64,
    s: u64,
    bound: usize,
) -> Result<T> {
    check_dimensions(d1, d2, s)?;
    Ok(expansion_equal(p, bound)?.evaluate(d1, d2, s))
}

pub fn exact_moment<T: Field>(case: SwapCase, p: usize, d1: u64, d2: u64, s: u64) -> Result<T> {
    match case {
        SwapCase::Independent => exact_moment_indep(p, d1, d2, s),
        SwapCase::Equal => exact_moment_equal(p, d1, d2, s),
    }
}

/// Finite-size `d₂⁻² E Tr Zᵖ` for `Z = W/(d₂s) - (s/d₂)·1`, by the binomial
/// expansion over `E Tr Wᵏ`, `k <= p` (with `Tr W⁰ = d₂²`).
pub fn exact_z_moment<T: Field>(case: SwapCase, p: usize, d1: u64, d2: u64, s: u64) -> Result<T> {
    check_dimensions(d1, d2, s)?;
    let (d2f, sf) = (T::from_count(d2), T::from_count(s));
    let shift = -(sf.clone() / d2f.clone());
    let scale = T::one() / (d2f.clone() * sf);
    let dim = d2f.clone() * d2f;
    let mut total = T::zero();
    let mut binom = T::one();
    for k in 0..=p {
        let trace = if k == 0 {
            dim.clone()
        } else {
            exact_moment::<T>(case, k, d1, d2, s)?
        };
        total = total + binom.clone() * shift.powi((p - k) as i64) * scale.powi(k as i64) * trace;
        binom = binom * T::from_count((p - k) as u64) / T::from_count(k as u64 + 1);
    }
    Ok(total / dim)
}

/// `Σ_{π ∈ NC⁰(p)} c^{2#π - p}`.
pub fn limit_moment<T: Field>(p: usize) -> LaurentPoly<T> {
    let p_i = p as i64;
    LaurentPoly::from_terms(
        enumerate_nc0(p)
            .into_iter()
            .map(|pi| (2 * pi.block_count() as i64 - p_i, T::one())),
    )
}

/// `Σ_{I ⊆ [p]} (-1)^{p-|I|} Σ_{π ∈ NC(I)} c^{p - 2|I| + 2#π}`, with
/// `NC(∅)` holding the single empty partition.
///
/// `NC(I)` only depends on `|I|` after relabeling `I` increasingly, so the
/// block-count histogram of `NC(k)` is computed once per `k`.
pub fn limit_moment_via_inclusion_exclusion<T: Field>(p: usize) -> Result<LaurentPoly<T>> {
    if p > DEFAULT_ENUMERATION_BOUND {
        return Err(Error::EnumerationBound {
            requested: p,
            bound: DEFAULT_ENUMERATION_BOUND,
        });
    }
    let histograms: Vec<BTreeMap<usize, u64>> = (0..=p)
        .map(|k| {
            let mut h = BTreeMap::new();
            for pi in enumerate_nc(k) {
                *h.entry(pi.block_count()).or_insert(0) += 1;
            }
            h
        })
        .collect();
    let p_i = p as i64;
    let mut out = LaurentPoly::zero();
    for subset in 0u32..(1u32 << p) {
        let k = subset.count_ones() as usize;
        let sign = if (p - k) % 2 == 0 { T::one() } else { -T::one() };
        for (&blocks, &n) in &histograms[k] {
            let exponent = p_i - 2 * k as i64 + 2 * blocks as i64;
            out.add_term(exponent, sign.clone() * T::from_count(n));
        }
    }
    Ok(out)
}

pub fn catalan(n: u64) -> BigInt {
    let mut c = BigInt::from(1u32);
    for k in 0..n {
        c = c * BigInt::from(2 * (2 * k + 1)) / BigInt::from(k + 2);
    }
    c
}

/// Moments of the standard semicircle: `Catalan(p/2)` for even `p`, else 0.
pub fn semicircle_moment<T: Field>(p: usize) -> T {
    if p % 2 == 1 {
        return T::zero();
    }
    let c = catalan((p / 2) as u64);
    let c: u64 = c.try_into().expect("Catalan number fits in u64 for p <= 70");
    T::from_count(c)
}

/// p-th moment of `(Y - c²)/c` with `Y` free Poisson of rate `c²`,
/// from the moment–free-cumulant formula over `NC(p)`: all free cumulants of
/// `Y - c²` equal `c²` except the first, which vanishes.
pub fn free_poisson_centered_moment<T: Field>(p: usize, c: &T) -> T {
    let rate = c.clone() * c.clone();
    let mut total = T::zero();
    for pi in enumerate_nc(p) {
        if pi.has_singleton() {
            continue;
        }
        total = total + rate.powi(pi.block_count() as i64);
    }
    total * c.powi(-(p as i64))
}

/// Parses `a`, `a/b` or a finite decimal such as `0.25` into a rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::InvalidArgument(format!("`{text}` is not a rational number"));
    if let Some((whole, frac)) = t.split_once('.') {
        if t.contains('/') || frac.is_empty() || !frac.chars().all(|ch| ch.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.chars().all(|ch| ch.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{whole_digits}{frac}");
        let numer: BigInt = digits.parse().map_err(|_| bad())?;
        let denom = num_traits::pow(BigInt::from(10u32), frac.len());
        let q = BigRational::new(numer, denom);
        return Ok(if negative { -q } else { q });
    }
    let q: BigRational = t.parse().map_err(|_| bad())?;
    Ok(q)
}

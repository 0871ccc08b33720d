//! Permutations of `{0, …, p-1}` in one-line form.
//!
//! Besides the group operations this module provides the fixed permutations
//! used by the moment formulas: the full cycle `γ_p`, its doubled version
//! `δ_p = γ_p ⊕ γ_p` and the block swap `β_p : i ↔ i + p` on `2p` points.

use std::fmt;

use crate::error::{Error, Result};

/// Largest degree enumerated by default (`8! = 40320`).
pub const DEFAULT_ENUMERATION_BOUND: usize = 8;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from its images, `images[i] = σ(i)`.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::NotAPermutation("degree must be positive".into()));
        }
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || seen[x] {
                return Err(Error::NotAPermutation(format!("{images:?}")));
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(p: usize) -> Self {
        assert!(p > 0, "degree must be positive");
        Self {
            images: (0..p).collect(),
        }
    }

    /// Builds a permutation from disjoint cycles given in 0-based notation.
    /// Points that are not mentioned are fixed.
    pub fn from_cycles(p: usize, cycles: &[&[usize]]) -> Result<Self> {
        if p == 0 {
            return Err(Error::NotAPermutation("degree must be positive".into()));
        }
        let mut images: Vec<usize> = (0..p).collect();
        let mut touched = vec![false; p];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a >= p || touched[a] {
                    return Err(Error::NotAPermutation(format!("bad cycle {cycle:?}")));
                }
                touched[a] = true;
                images[a] = cycle[(k + 1) % cycle.len()];
            }
        }
        Self::new(images)
    }

    pub fn transposition(p: usize, a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::NotAPermutation(format!("({a} {b}) is not a transposition")));
        }
        Self::from_cycles(p, &[&[a, b]])
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Self { images: inv }
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_degrees(self, other)?;
        Ok(Self {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        })
    }

    /// Number of disjoint cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        cycle_count_of(&self.images)
    }

    /// Minimal number of transpositions whose product is `self`.
    pub fn length(&self) -> usize {
        self.degree() - self.cycle_count()
    }

    /// Cycles in canonical form: each cycle starts at its smallest element,
    /// cycles ordered by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let p = self.degree();
        let mut seen = vec![false; p];
        let mut out = Vec::new();
        for start in 0..p {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.images[i];
            }
            out.push(cycle);
        }
        out
    }

    /// Splits `self` as `π₁ ⊕ π₂` with `π₁` acting on the first `p` points.
    /// Returns `None` when `self` does not preserve `{0,…,p-1}`.
    pub fn split_direct_sum(&self, p: usize) -> Option<(Self, Self)> {
        let n = self.degree();
        if p == 0 || p >= n {
            return None;
        }
        let (head, tail) = self.images.split_at(p);
        if head.iter().any(|&x| x >= p) {
            return None;
        }
        let first = Self {
            images: head.to_vec(),
        };
        let second = Self {
            images: tail.iter().map(|&x| x - p).collect(),
        };
        Some((first, second))
    }
}

fn cycle_count_of(images: &[usize]) -> usize {
    let mut seen = vec![false; images.len()];
    let mut count = 0;
    for start in 0..images.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = images[i];
        }
    }
    count
}

fn check_degrees(a: &Permutation, b: &Permutation) -> Result<()> {
    if a.degree() != b.degree() {
        return Err(Error::DegreeMismatch(a.degree(), b.degree()));
    }
    Ok(())
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.images)
    }
}

/// Cycle notation, fixed points omitted; the identity prints as `()`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for cycle in self.cycles().into_iter().filter(|c| c.len() > 1) {
            let body: Vec<String> = cycle.iter().map(ToString::to_string).collect();
            write!(f, "({})", body.join(" "))?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

pub fn compose(sigma: &Permutation, tau: &Permutation) -> Result<Permutation> {
    sigma.compose(tau)
}

/// Cayley distance `d(σ, τ) = |σ⁻¹τ|`.
pub fn cayley_distance(sigma: &Permutation, tau: &Permutation) -> Result<usize> {
    check_degrees(sigma, tau)?;
    // #(σ⁻¹τ) without allocating the product.
    let inv = sigma.inverse();
    let prod: Vec<usize> = tau.images.iter().map(|&i| inv.images[i]).collect();
    Ok(sigma.degree() - cycle_count_of(&prod))
}

/// `σ − τ − π`: τ lies on a geodesic from σ to π.
pub fn is_geodesic(sigma: &Permutation, tau: &Permutation, pi: &Permutation) -> Result<bool> {
    check_degrees(sigma, tau)?;
    check_degrees(tau, pi)?;
    Ok(cayley_distance(sigma, tau)? + cayley_distance(tau, pi)? == cayley_distance(sigma, pi)?)
}

/// The full cycle `i ↦ i+1 mod p`.
pub fn full_cycle(p: usize) -> Permutation {
    assert!(p > 0, "degree must be positive");
    Permutation {
        images: (0..p).map(|i| (i + 1) % p).collect(),
    }
}

/// `γ_p ⊕ γ_p` on `2p` points.
pub fn delta(p: usize) -> Permutation {
    direct_sum(&full_cycle(p), &full_cycle(p))
}

/// The involution `i ↔ i + p` on `2p` points.
pub fn beta(p: usize) -> Permutation {
    assert!(p > 0, "degree must be positive");
    Permutation {
        images: (0..2 * p).map(|i| (i + p) % (2 * p)).collect(),
    }
}

/// `π₁ ⊕ π₂`: `π₁` on the first block, `π₂` shifted onto the second.
pub fn direct_sum(first: &Permutation, second: &Permutation) -> Permutation {
    let p = first.degree();
    let images = first
        .images
        .iter()
        .copied()
        .chain(second.images.iter().map(|&x| x + p))
        .collect();
    Permutation { images }
}

/// All permutations of degree `p` in lexicographic order of their images.
///
/// Fails when `p` exceeds `bound`; pass [`DEFAULT_ENUMERATION_BOUND`] unless
/// a larger enumeration is explicitly wanted.
pub fn permutations(p: usize, bound: usize) -> Result<Permutations> {
    if p > bound {
        return Err(Error::EnumerationBound {
            requested: p,
            bound,
        });
    }
    if p == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    Ok(Permutations {
        next: Some((0..p).collect()),
    })
}

/// Lexicographic stream over `S_p`; see [`permutations`].
#[derive(Debug, Clone)]
pub struct Permutations {
    next: Option<Vec<usize>>,
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_lexicographic(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { images: current })
    }
}

fn next_lexicographic(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Permutations on a geodesic from the identity to `target`
/// (`{π : id − π − target}`), in lexicographic order.
pub fn geodesic_set(target: &Permutation, bound: usize) -> Result<Vec<Permutation>> {
    let total = target.length();
    Ok(permutations(target.degree(), bound)?
        .filter(|pi| pi.length() + cayley_distance(pi, target).expect("same degree") == total)
        .collect())
}

//! Set partitions of `{0, …, p-1}` and non-crossing partitions.
//!
//! Partitions are kept canonical: elements ascending inside each block and
//! blocks ordered by their minimum. Enumerations are returned in
//! restricted-growth-string order.

use std::fmt;

use crate::error::{Error, Result};
use crate::perm::Permutation;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    p: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Validates and canonicalizes a list of blocks covering `{0,…,p-1}`.
    /// `p = 0` with no blocks is the empty partition.
    pub fn new(p: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; p];
        let mut blocks = blocks;
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            block.sort_unstable();
            for &x in block.iter() {
                if x >= p || seen[x] {
                    return Err(Error::InvalidPartition(format!(
                        "element {x} out of range or repeated"
                    )));
                }
                seen[x] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidPartition("blocks do not cover the ground set".into()));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self { p, blocks })
    }

    /// Builds the partition whose block labels are given by a restricted
    /// growth string (`rgs[0] = 0`, `rgs[i] <= 1 + max(rgs[..i])`).
    pub fn from_restricted_growth(rgs: &[usize]) -> Result<Self> {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, &label) in rgs.iter().enumerate() {
            match label.cmp(&blocks.len()) {
                std::cmp::Ordering::Less => blocks[label].push(i),
                std::cmp::Ordering::Equal => blocks.push(vec![i]),
                std::cmp::Ordering::Greater => {
                    return Err(Error::InvalidPartition(format!("{rgs:?} is not restricted growth")))
                }
            }
        }
        Ok(Self {
            p: rgs.len(),
            blocks,
        })
    }

    pub fn singletons(p: usize) -> Self {
        Self {
            p,
            blocks: (0..p).map(|i| vec![i]).collect(),
        }
    }

    pub fn full_block(p: usize) -> Self {
        Self {
            p,
            blocks: if p == 0 { vec![] } else { vec![(0..p).collect()] },
        }
    }

    pub fn ground_size(&self) -> usize {
        self.p
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn has_singleton(&self) -> bool {
        self.blocks.iter().any(|b| b.len() == 1)
    }

    /// Block label of every element, labels numbered by first appearance.
    pub fn restricted_growth(&self) -> Vec<usize> {
        let mut rgs = vec![0; self.p];
        for (label, block) in self.blocks.iter().enumerate() {
            for &x in block {
                rgs[x] = label;
            }
        }
        rgs
    }

    /// No `a₁ < b₁ < a₂ < b₂` with `a₁ ∼ a₂` and `b₁ ∼ b₂` in different blocks.
    pub fn is_noncrossing(&self) -> bool {
        // Two blocks cross iff one has elements both inside and outside the
        // span between consecutive elements of the other.
        let rgs = self.restricted_growth();
        for block in &self.blocks {
            for w in block.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                for &x in &rgs[lo + 1..hi] {
                    let other = &self.blocks[x];
                    if other.iter().any(|&y| y < lo || y > hi) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Biane's map: each block `{i₁ < … < i_k}` becomes the cycle
    /// `(i₁ i₂ … i_k)`. Only defined on non-crossing partitions.
    pub fn to_permutation(&self) -> Result<Permutation> {
        if !self.is_noncrossing() {
            return Err(Error::CrossingPartition);
        }
        if self.p == 0 {
            return Err(Error::InvalidArgument("empty partition has no permutation".into()));
        }
        let cycles: Vec<&[usize]> = self.blocks.iter().map(Vec::as_slice).collect();
        Permutation::from_cycles(self.p, &cycles)
    }

    /// Orbit partition of a permutation.
    pub fn from_permutation(sigma: &Permutation) -> Self {
        let blocks = sigma.cycles();
        Self::new(sigma.degree(), blocks).expect("cycles partition the ground set")
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetPartition{:?}", self.blocks)
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let inner: Vec<String> = b.iter().map(ToString::to_string).collect();
                format!("{{{}}}", inner.join(","))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

pub fn is_noncrossing(pi: &SetPartition) -> bool {
    pi.is_noncrossing()
}

pub fn partition_to_permutation(pi: &SetPartition) -> Result<Permutation> {
    pi.to_permutation()
}

pub fn block_count(pi: &SetPartition) -> usize {
    pi.block_count()
}

pub fn has_singleton(pi: &SetPartition) -> bool {
    pi.has_singleton()
}

/// Every set partition of `{0,…,p-1}` in restricted-growth-string order.
pub fn all_partitions(p: usize) -> Vec<SetPartition> {
    let mut out = Vec::new();
    if p == 0 {
        out.push(SetPartition::singletons(0));
        return out;
    }
    let mut rgs = vec![0usize; p];
    // maxes[i] = max(rgs[..=i])
    let mut maxes = vec![0usize; p];
    loop {
        out.push(SetPartition::from_restricted_growth(&rgs).expect("valid rgs"));
        // Increment the rightmost position that can still grow.
        let mut i = p - 1;
        loop {
            if i == 0 {
                return out;
            }
            if rgs[i] <= maxes[i - 1] {
                rgs[i] += 1;
                maxes[i] = maxes[i - 1].max(rgs[i]);
                for j in i + 1..p {
                    rgs[j] = 0;
                    maxes[j] = maxes[i];
                }
                break;
            }
            i -= 1;
        }
    }
}

/// All non-crossing partitions of `{0,…,p-1}`; `NC(0)` is the single empty
/// partition.
pub fn enumerate_nc(p: usize) -> Vec<SetPartition> {
    let mut out: Vec<SetPartition> = nc_blocks(0, p)
        .into_iter()
        .map(|blocks| SetPartition { p, blocks })
        .map(|mut part| {
            part.blocks.sort_unstable_by_key(|b| b[0]);
            part
        })
        .collect();
    out.sort_unstable_by_key(SetPartition::restricted_growth);
    out
}

/// Non-crossing partitions without singleton blocks. Empty for `p = 1`.
pub fn enumerate_nc0(p: usize) -> Vec<SetPartition> {
    enumerate_nc(p).into_iter().filter(|pi| !pi.has_singleton()).collect()
}

/// Non-crossing partitions of the interval `[lo, hi)` as lists of blocks.
///
/// The block containing `lo` is `{lo = i₀ < i₁ < … < i_k}`; the gaps between
/// consecutive members and the tail after `i_k` are partitioned independently.
fn nc_blocks(lo: usize, hi: usize) -> Vec<Vec<Vec<usize>>> {
    if lo >= hi {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut first = vec![lo];
    extend_first_block(lo, hi, &mut first, &mut vec![], &mut out);
    out
}

fn extend_first_block(
    last: usize,
    hi: usize,
    first: &mut Vec<usize>,
    gaps: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<Vec<usize>>>,
) {
    // Option 1: close the block; [last+1, hi) becomes the tail gap.
    gaps.push((last + 1, hi));
    let mut combos: Vec<Vec<Vec<usize>>> = vec![vec![first.clone()]];
    for &(a, b) in gaps.iter() {
        let parts = nc_blocks(a, b);
        let mut next = Vec::with_capacity(combos.len() * parts.len());
        for c in &combos {
            for part in &parts {
                let mut merged = c.clone();
                merged.extend(part.iter().cloned());
                next.push(merged);
            }
        }
        combos = next;
    }
    out.extend(combos);
    gaps.pop();

    // Option 2: add a further element `next`, leaving (last, next) as a gap.
    for next in last + 1..hi {
        first.push(next);
        gaps.push((last + 1, next));
        extend_first_block(next, hi, first, gaps, out);
        gaps.pop();
        first.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{full_cycle, geodesic_set};

    fn bell(p: usize) -> usize {
        // Bell triangle.
        let mut row = vec![1usize];
        for _ in 0..p {
            let mut next = vec![*row.last().unwrap()];
            for &x in &row {
                let v = next.last().unwrap() + x;
                next.push(v);
            }
            row = next;
        }
        row[0]
    }

    fn catalan(n: usize) -> usize {
        let mut c = 1usize;
        for k in 0..n {
            c = c * 2 * (2 * k + 1) / (k + 2);
        }
        c
    }

    fn brute_nc(p: usize) -> Vec<SetPartition> {
        all_partitions(p).into_iter().filter(brute_noncrossing).collect()
    }

    // Direct quadruple search for a₁ < b₁ < a₂ < b₂.
    fn brute_noncrossing(pi: &SetPartition) -> bool {
        let label = pi.restricted_growth();
        let p = label.len();
        for a1 in 0..p {
            for b1 in a1 + 1..p {
                for a2 in b1 + 1..p {
                    for b2 in a2 + 1..p {
                        if label[a1] == label[a2]
                            && label[b1] == label[b2]
                            && label[a1] != label[b1]
                        {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn all_partitions_counts_are_bell_numbers() {
        for p in 0..=7 {
            assert_eq!(all_partitions(p).len(), bell(p), "p = {p}");
        }
        assert_eq!(all_partitions(4).len(), 15);
    }

    #[test]
    fn crossing_examples() {
        let crossing = SetPartition::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        assert!(!crossing.is_noncrossing());
        let nested = SetPartition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(nested.is_noncrossing());
        let count = all_partitions(4).iter().filter(|p| p.is_noncrossing()).count();
        assert_eq!(count, 14);
    }

    #[test]
    fn noncrossing_test_agrees_with_quadruple_search() {
        for p in 0..=7 {
            for pi in all_partitions(p) {
                assert_eq!(pi.is_noncrossing(), brute_noncrossing(&pi), "{pi}");
            }
        }
    }

    #[test]
    fn nc_enumeration_matches_filter() {
        for p in 0..=8 {
            assert_eq!(enumerate_nc(p), brute_nc(p), "p = {p}");
            assert_eq!(enumerate_nc(p).len(), catalan(p));
        }
    }

    #[test]
    fn nc0_counts() {
        let counts: Vec<usize> = (1..=5).map(|p| enumerate_nc0(p).len()).collect();
        assert_eq!(counts, vec![0, 1, 1, 3, 6]);
        for p in 1..=8 {
            let brute = brute_nc(p).into_iter().filter(|pi| !pi.has_singleton()).count();
            assert_eq!(enumerate_nc0(p).len(), brute);
        }
    }

    #[test]
    fn pair_partitions_are_catalan() {
        for n in 1..=4 {
            let pairs = enumerate_nc0(2 * n)
                .into_iter()
                .filter(|pi| pi.block_count() == n)
                .collect::<Vec<_>>();
            assert!(pairs.iter().all(|pi| pi.blocks().iter().all(|b| b.len() == 2)));
            assert_eq!(pairs.len(), catalan(n));
        }
    }

    #[test]
    fn block_queries() {
        let a = SetPartition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!((a.block_count(), a.has_singleton()), (2, false));
        let b = SetPartition::new(3, vec![vec![0], vec![1, 2]]).unwrap();
        assert_eq!((b.block_count(), b.has_singleton()), (2, true));
        assert_eq!(SetPartition::full_block(5).block_count(), 1);
    }

    #[test]
    fn new_validates_and_canonicalizes() {
        let a = SetPartition::new(3, vec![vec![2, 1], vec![0]]).unwrap();
        assert_eq!(a.blocks(), &[vec![0], vec![1, 2]]);
        assert!(SetPartition::new(3, vec![vec![0, 1]]).is_err());
        assert!(SetPartition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(SetPartition::new(2, vec![vec![0, 1], vec![]]).is_err());
        assert!(SetPartition::from_restricted_growth(&[0, 2]).is_err());
    }

    #[test]
    fn biane_map_examples() {
        assert!(SetPartition::singletons(4).to_permutation().unwrap().is_identity());
        assert_eq!(SetPartition::full_block(5).to_permutation().unwrap(), full_cycle(5));
        let crossing = SetPartition::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        assert_eq!(crossing.to_permutation(), Err(Error::CrossingPartition));
    }

    #[test]
    fn biane_map_is_bijection_onto_geodesics() {
        for p in 1..=6 {
            let mut image: Vec<Permutation> = enumerate_nc(p)
                .iter()
                .map(|pi| {
                    let sigma = pi.to_permutation().unwrap();
                    assert_eq!(sigma.cycle_count(), pi.block_count());
                    assert_eq!(&SetPartition::from_permutation(&sigma), pi);
                    sigma
                })
                .collect();
            image.sort();
            image.dedup();
            let geodesics = geodesic_set(&full_cycle(p), 8).unwrap();
            assert_eq!(image, geodesics, "p = {p}");
        }
    }
}

//! Exhaustive identity checks over small permutation groups and partition
//! lattices, plus the equivalence of the two swap constructions.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::moments::{catalan, exact_moment_equal, exact_moment_indep, limit_moment, limit_moment_via_inclusion_exclusion};
use crate::partition::{all_partitions, enumerate_nc, enumerate_nc0};
use crate::perm::{
    beta, cayley_distance, delta, full_cycle, geodesic_set, is_geodesic, permutations, Permutation,
    DEFAULT_ENUMERATION_BOUND,
};
use crate::rmt::{sample_gaussian, swap_direct, swap_tensor, wishart_from_factor, SampleStream};
use crate::Rational;

/// Named check run up to a degree bound; `Err` carries the first
/// counterexample.
#[derive(Clone, Copy)]
pub struct Check {
    pub name: &'static str,
    pub run: fn(usize) -> std::result::Result<(), String>,
}

impl fmt::Debug for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Check").field("name", &self.name).finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub p_max: usize,
    pub outcomes: Vec<CheckOutcome>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            let status = if o.passed { "PASS" } else { "FAIL" };
            writeln!(f, "[{status}] {} {}", o.name, o.detail)?;
        }
        Ok(())
    }
}

/// The full identity suite.
pub fn standard_checks() -> Vec<Check> {
    vec![
        Check { name: "cayley_metric", run: check_cayley_metric },
        Check { name: "geodesic_count_catalan", run: check_geodesic_count },
        Check { name: "nc_count_catalan", run: check_nc_count },
        Check { name: "nc_brute_force", run: check_nc_brute_force },
        Check { name: "biane_bijection", run: check_biane },
        Check { name: "inclusion_exclusion", run: check_inclusion_exclusion },
        Check { name: "direct_sum_decomposition", run: check_direct_sum },
        Check { name: "exact_moment_values", run: check_exact_values },
        Check { name: "swap_routes_agree", run: check_swap_routes },
    ]
}

/// Runs `checks` for degrees up to `p_max`.
pub fn run_checks(checks: &[Check], p_max: usize) -> Result<VerificationReport> {
    if p_max == 0 {
        return Err(Error::InvalidArgument("pmax must be at least 1".into()));
    }
    if p_max > DEFAULT_ENUMERATION_BOUND {
        return Err(Error::EnumerationBound {
            requested: p_max,
            bound: DEFAULT_ENUMERATION_BOUND,
        });
    }
    let outcomes = checks
        .iter()
        .map(|c| match (c.run)(p_max) {
            Ok(()) => CheckOutcome {
                name: c.name,
                passed: true,
                detail: String::new(),
            },
            Err(detail) => CheckOutcome {
                name: c.name,
                passed: false,
                detail,
            },
        })
        .collect();
    Ok(VerificationReport { p_max, outcomes })
}

pub fn verify_all(p_max: usize) -> Result<VerificationReport> {
    run_checks(&standard_checks(), p_max)
}

fn all_perms(p: usize) -> Vec<Permutation> {
    permutations(p, DEFAULT_ENUMERATION_BOUND).expect("degree within bound").collect()
}

/// Metric axioms and `|σ| ≡ p - #σ`, all triples of `S_p` for `p <= 4`.
fn check_cayley_metric(p_max: usize) -> std::result::Result<(), String> {
    for p in 1..=p_max.min(4) {
        let perms = all_perms(p);
        for a in &perms {
            if a.length() + a.cycle_count() != p {
                return Err(format!("length of {a} is not p - #cycles"));
            }
            for b in &perms {
                let ab = cayley_distance(a, b).unwrap();
                if (ab == 0) != (a == b) || ab != cayley_distance(b, a).unwrap() {
                    return Err(format!("d({a}, {b}) is not a metric value"));
                }
                for c in &perms {
                    if cayley_distance(a, c).unwrap() > ab + cayley_distance(b, c).unwrap() {
                        return Err(format!("triangle inequality fails at {a}, {b}, {c}"));
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_geodesic_count(p_max: usize) -> std::result::Result<(), String> {
    for p in 1..=p_max {
        let n = geodesic_set(&full_cycle(p), DEFAULT_ENUMERATION_BOUND).unwrap().len();
        if BigInt::from(n) != catalan(p as u64) {
            return Err(format!("p={p}: {n} geodesics, Catalan is {}", catalan(p as u64)));
        }
    }
    Ok(())
}

fn check_nc_count(p_max: usize) -> std::result::Result<(), String> {
    for p in 1..=p_max {
        let n = enumerate_nc(p).len();
        if BigInt::from(n) != catalan(p as u64) {
            return Err(format!("p={p}: |NC| = {n}"));
        }
    }
    Ok(())
}

/// The constructive enumerations agree with filtering all set partitions.
fn check_nc_brute_force(p_max: usize) -> std::result::Result<(), String> {
    for p in 1..=p_max {
        let all = all_partitions(p);
        let nc: BTreeSet<_> = all.iter().filter(|x| x.is_noncrossing()).map(|x| x.restricted_growth()).collect();
        let nc0: BTreeSet<_> = all
            .iter()
            .filter(|x| x.is_noncrossing() && !x.has_singleton())
            .map(|x| x.restricted_growth())
            .collect();
        let got: BTreeSet<_> = enumerate_nc(p).iter().map(|x| x.restricted_growth()).collect();
        let got0: BTreeSet<_> = enumerate_nc0(p).iter().map(|x| x.restricted_growth()).collect();
        if got != nc {
            return Err(format!("p={p}: NC enumeration differs from filter"));
        }
        if got0 != nc0 {
            return Err(format!("p={p}: NC without singletons differs from filter"));
        }
    }
    Ok(())
}

/// Blocks-to-ascending-cycles is a bijection onto `{π : id − π − γ}` that
/// turns block counts into cycle counts.
fn check_biane(p_max: usize) -> std::result::Result<(), String> {
    for p in 1..=p_max.min(6) {
        let geodesics: BTreeSet<Vec<usize>> = geodesic_set(&full_cycle(p), DEFAULT_ENUMERATION_BOUND)
            .unwrap()
            .into_iter()
            .map(|g| g.images().to_vec())
            .collect();
        let mut image = BTreeSet::new();
        for pi in enumerate_nc(p) {
            let sigma = pi.to_permutation().map_err(|e| e.to_string())?;
            if sigma.cycle_count() != pi.block_count() {
                return Err(format!("p={p}: {pi} has {} cycles", sigma.cycle_count()));
            }
            if !image.insert(sigma.images().to_vec()) {
                return Err(format!("p={p}: map is not injective at {pi}"));
            }
        }
        if image != geodesics {
            return Err(format!("p={p}: image differs from the geodesic set"));
        }
    }
    Ok(())
}

fn check_inclusion_exclusion(p_max: usize) -> std::result::Result<(), String> {
    for p in 1..=p_max {
        let lhs = limit_moment::<Rational>(p);
        let rhs = limit_moment_via_inclusion_exclusion::<Rational>(p).map_err(|e| e.to_string())?;
        if lhs != rhs {
            return Err(format!("p={p}: {lhs} != {rhs}"));
        }
    }
    Ok(())
}

/// Every `π` with `id − π − δ` splits as `π₁ ⊕ π₂` with `id − πᵢ − γ` and
/// `#(β⁻¹π) = #(π₁π₂)`; exhaustive for `p <= 4`.
fn check_direct_sum(p_max: usize) -> std::result::Result<(), String> {
    for p in 1..=p_max.min(4) {
        let (id, d, b_inv) = (Permutation::identity(2 * p), delta(p), beta(p).inverse());
        let (id_p, gamma) = (Permutation::identity(p), full_cycle(p));
        let mut count = 0usize;
        for pi in all_perms(2 * p) {
            if !is_geodesic(&id, &pi, &d).unwrap() {
                continue;
            }
            count += 1;
            let Some((p1, p2)) = pi.split_direct_sum(p) else {
                return Err(format!("p={p}: {pi} does not split"));
            };
            for part in [&p1, &p2] {
                if !is_geodesic(&id_p, part, &gamma).unwrap() {
                    return Err(format!("p={p}: component {part} of {pi} is off the geodesic"));
                }
            }
            let lhs = b_inv.compose(&pi).unwrap().cycle_count();
            let rhs = p1.compose(&p2).unwrap().cycle_count();
            if lhs != rhs {
                return Err(format!("p={p}: #(β⁻¹π) = {lhs}, #(π₁π₂) = {rhs} at {pi}"));
            }
        }
        let cat: u64 = catalan(p as u64).try_into().unwrap();
        if count as u64 != cat * cat {
            return Err(format!("p={p}: {count} geodesics to δ, expected Catalan²"));
        }
    }
    Ok(())
}

/// Reference expansions at `d₁ = d₂ = 2, s = 3`.
fn check_exact_values(_p_max: usize) -> std::result::Result<(), String> {
    let cases = [
        ("indep p=1", exact_moment_indep::<Rational>(1, 2, 2, 3), 36),
        ("indep p=2", exact_moment_indep::<Rational>(2, 2, 2, 3), 684),
        ("equal p=1", exact_moment_equal::<Rational>(1, 2, 2, 3), 48),
    ];
    for (label, got, want) in cases {
        let got = got.map_err(|e| e.to_string())?;
        if got != Rational::from_integer(want.into()) {
            return Err(format!("{label}: {got}, expected {want}"));
        }
    }
    Ok(())
}

/// Direct factor construction against the Wishart contraction on 20 draws
/// with `d₁ <= 4`, `d₂ <= 3`, `s <= 3`, to `1e-8` relative.
fn check_swap_routes(_p_max: usize) -> std::result::Result<(), String> {
    for i in 0..20u64 {
        let (d1, d2, s) = (1 + (i % 4) as usize, 1 + ((i / 4) % 3) as usize, 1 + ((i / 2) % 3) as usize);
        let mut stream = SampleStream::new(0x5eed, i);
        let g1 = sample_gaussian::<f64>(d1 * d2, s, &mut stream);
        let g2 = sample_gaussian::<f64>(d1 * d2, s, &mut stream);
        let direct = swap_direct(&g1, &g2, d1, d2, s).map_err(|e| e.to_string())?;
        let tensor = swap_tensor(&wishart_from_factor(&g1), &wishart_from_factor(&g2), d1, d2)
            .map_err(|e| e.to_string())?;
        let dev = direct.relative_deviation(&tensor).map_err(|e| e.to_string())?;
        if dev > 1e-8 {
            return Err(format!("d1={d1} d2={d2} s={s}: relative deviation {dev:e}"));
        }
    }
    Ok(())
}

//! `t`-transversals, minimal generators, saturation and the covering number.
//!
//! Everything here is an exhaustive desk-scale oracle: candidate sets are
//! enumerated outright, so universes are expected to stay small.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::count::ExactNat;
use crate::error::{invalid, precondition, Error, Result};
use crate::sets::{is_antichain, is_t_intersecting, k_subsets, subsets_of, Family, Subset};

/// `T(F)`: all `T ⊆ [n]` with `|T| <= k` meeting every member in `>= t`
/// elements. With an empty family every set of size `<= k` qualifies.
pub fn transversal_family(fam: &Family, t: usize, k: usize) -> Result<Family> {
    let n = fam.universe();
    if t < 1 {
        return Err(invalid("t must be at least 1"));
    }
    if k > n {
        return Err(invalid(format!("k = {k} exceeds n = {n}")));
    }
    let smallest = if fam.is_empty() { 0 } else { t };
    let mut out = Vec::new();
    for size in smallest..=k {
        out.extend(k_subsets(n, size).filter(|c| fam.iter().all(|f| c.intersection_len(f) >= t)));
    }
    Ok(Family::from_canonical(n, out))
}

/// Members with no proper subset in the family.
pub fn minimal_sets(fam: &Family) -> Family {
    let sets = fam.as_slice();
    // smaller sets come first in canonical order
    fam.filter(|s| {
        !sets
            .iter()
            .take_while(|o| o.len() < s.len())
            .any(|o| o.is_subset(s))
    })
}

fn check_uniform_intersecting(fam: &Family, t: usize, k: usize) -> Result<()> {
    if let Some(bad) = fam.iter().find(|s| s.len() != k) {
        return Err(precondition(format!("member {bad} is not a {k}-set")));
    }
    if !is_t_intersecting(fam, t) {
        return Err(precondition(format!("family is not {t}-intersecting")));
    }
    Ok(())
}

/// Whether `fam` equals the `k`-th level of its own transversal family.
pub fn is_saturated(fam: &Family, t: usize, k: usize) -> Result<bool> {
    check_uniform_intersecting(fam, t, k)?;
    let level_k = transversal_family(fam, t, k)?.filter(|s| s.len() == k);
    Ok(&level_k == fam)
}

/// The first `k`-set (canonical order) that could be added to `fam` without
/// breaking `t`-intersection, if any.
pub fn addable_member(fam: &Family, t: usize, k: usize) -> Result<Option<Subset>> {
    check_uniform_intersecting(fam, t, k)?;
    Ok(k_subsets(fam.universe(), k)
        .find(|c| !fam.contains(c) && fam.iter().all(|f| c.intersection_len(f) >= t)))
}

/// Greedy saturation: scan `C([n], k)` in canonical order, adding every set
/// that keeps the family `t`-intersecting.
pub fn saturate(fam: &Family, t: usize, k: usize) -> Result<Family> {
    let order: Vec<Subset> = k_subsets(fam.universe(), k).collect();
    saturate_in_order(fam, t, k, order)
}

/// Greedy saturation with a caller-chosen scan order. Different orders can
/// reach different saturated families.
pub fn saturate_in_order<I>(fam: &Family, t: usize, k: usize, order: I) -> Result<Family>
where
    I: IntoIterator<Item = Subset>,
{
    check_uniform_intersecting(fam, t, k)?;
    let mut out = fam.clone();
    for cand in order {
        if cand.len() != k || out.contains(&cand) {
            continue;
        }
        if out.iter().all(|f| cand.intersection_len(f) >= t) {
            out.insert(cand)?;
        }
    }
    Ok(out)
}

/// The `t`-covering number: least `|T|` with `|T ∩ B| >= t` for all members.
///
/// Candidates are drawn from the union of the members. `None` when some
/// member has fewer than `t` elements; an empty family gives `Some(0)`.
pub fn covering_number(fam: &Family, t: usize) -> Option<usize> {
    if fam.iter().any(|b| b.len() < t) {
        return None;
    }
    if fam.is_empty() {
        return Some(0);
    }
    let support = fam.support();
    (t..=support.len()).find(|&size| {
        subsets_of(&support, size).any(|c| fam.iter().all(|b| c.intersection_len(b) >= t))
    })
}

pub fn min_member_size(fam: &Family) -> Result<usize> {
    fam.iter().map(Subset::len).min().ok_or(Error::EmptyFamily)
}

/// Members of size exactly `l`.
pub fn level(fam: &Family, l: usize) -> Family {
    fam.filter(|s| s.len() == l)
}

/// Members of size at most `l`.
pub fn level_up_to(fam: &Family, l: usize) -> Family {
    fam.filter(|s| s.len() <= l)
}

/// Least `l <= k` with `τ(B^(<=l)) >= t+1`. A level family with no cover at
/// all counts as having infinite covering number.
pub fn compute_alpha(generators: &Family, t: usize, k: usize) -> Option<usize> {
    (0..=k).find(|&l| covering_number(&level_up_to(generators, l), t).is_none_or(|tau| tau > t))
}

/// Outcome of the level-size bound `|B^(l)| <= s·l·(k-t+1)^(l-t-1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelBound {
    pub holds: bool,
    #[serde(with = "crate::report::decimal")]
    pub lhs: ExactNat,
    #[serde(with = "crate::report::decimal")]
    pub rhs: ExactNat,
}

/// `s·l·(k-t+1)^(l-t-1)`.
pub fn level_bound_rhs(s: u64, l: u64, k: u64, t: u64) -> ExactNat {
    debug_assert!(l > t && k + 1 > t);
    let mut rhs = BigUint::from(s) * l;
    let base = BigUint::from(k - t + 1);
    for _ in 0..(l - t - 1) {
        rhs *= &base;
    }
    rhs
}

/// Checks the level-size bound for generators `B` at level `l`.
///
/// The hypotheses (`t+1 <= l <= k`, `s(B) >= t+1`, `τ(B^(<=l)) >= t+1`) are
/// verified first and a violation is reported as [`Error::Hypothesis`].
pub fn check_level_bound(generators: &Family, l: usize, k: usize, t: usize) -> Result<LevelBound> {
    if l < t + 1 || l > k {
        return Err(Error::Hypothesis(format!(
            "level l = {l} outside [t+1, k] = [{}, {k}]",
            t + 1
        )));
    }
    let s = min_member_size(generators)?;
    if s < t + 1 {
        return Err(Error::Hypothesis(format!("s = {s} < t+1 = {}", t + 1)));
    }
    match covering_number(&level_up_to(generators, l), t) {
        Some(tau) if tau <= t => {
            return Err(Error::Hypothesis(format!(
                "τ(B^(<={l})) = {tau} < t+1 = {}",
                t + 1
            )))
        }
        _ => {}
    }
    let lhs = BigUint::from(level(generators, l).len());
    let rhs = level_bound_rhs(s as u64, l as u64, k as u64, t as u64);
    Ok(LevelBound {
        holds: lhs <= rhs,
        lhs,
        rhs,
    })
}

/// The generator data of a saturated family: `B(F)`, `s`, `τ`, the levels of
/// `B` and `α`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorProfile {
    pub t: usize,
    pub k: usize,
    pub generators: Family,
    pub s: Option<usize>,
    pub tau: Option<usize>,
    pub levels: BTreeMap<usize, Family>,
    pub alpha: Option<usize>,
}

impl GeneratorProfile {
    pub fn level_up_to(&self, l: usize) -> Family {
        level_up_to(&self.generators, l)
    }

    /// `B` contains a single `t`-set, i.e. `F` is a complete sunflower.
    pub fn is_complete_sunflower(&self) -> bool {
        self.s == Some(self.t)
    }
}

/// Builds the profile of `fam` from `B = minimal_sets(T(fam))`.
pub fn generator_profile(fam: &Family, t: usize, k: usize) -> Result<GeneratorProfile> {
    let generators = minimal_sets(&transversal_family(fam, t, k)?);
    debug_assert!(is_antichain(&generators));
    let mut levels: BTreeMap<usize, Family> = BTreeMap::new();
    for b in &generators {
        levels
            .entry(b.len())
            .or_insert_with(|| Family::empty(fam.universe()))
            .insert(b.clone())?;
    }
    Ok(GeneratorProfile {
        t,
        k,
        s: min_member_size(&generators).ok(),
        tau: covering_number(&generators, t),
        alpha: compute_alpha(&generators, t, k),
        levels,
        generators,
    })
}

/// `|B^(l)|` as an exact number, zero for unpopulated levels.
pub fn level_size(profile: &GeneratorProfile, l: usize) -> ExactNat {
    profile
        .levels
        .get(&l)
        .map_or_else(BigUint::zero, |f| BigUint::from(f.len()))
}

/// `fam ⊆ T(fam)`, which holds exactly for `t`-intersecting families.
pub fn is_inside_own_transversals(fam: &Family, t: usize, k: usize) -> Result<bool> {
    let tf = transversal_family(fam, t, k)?;
    Ok(fam.is_subfamily_of(&tf))
}

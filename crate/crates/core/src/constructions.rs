//! Named families: full levels, the extremal family `A_t`, complete
//! sunflowers `S_X`, the `(t+2)`-triangle, and a classifier for
//! `t`-intersecting families of `(t+1)`-sets.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Result};
use crate::sets::{is_t_intersecting, k_subsets, subsets_of, Family, Subset};

/// Shape of a `t`-intersecting family of `(t+1)`-sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// All members contain the `t`-set `core`.
    Sunflower {
        core: Subset,
    },
    /// All members are `(t+1)`-subsets of the `(t+2)`-set `ground`.
    Triangle {
        ground: Subset,
    },
    Other,
}

/// `C([n], k)` in canonical order.
pub fn build_full_level(n: usize, k: usize) -> Result<Family> {
    if k > n {
        return Err(invalid(format!("k = {k} exceeds n = {n}")));
    }
    Ok(Family::from_canonical(n, k_subsets(n, k).collect()))
}

/// `A_t = {A ∈ C([n], k) : |A ∩ [t+2]| >= t+1}`.
pub fn build_a_t(n: usize, k: usize, t: usize) -> Result<Family> {
    if t < 1 || k < t + 1 || k > n || n < t + 2 {
        return Err(invalid(format!(
            "A_t needs t >= 1, t+1 <= k <= n, n >= t+2; got n={n} k={k} t={t}"
        )));
    }
    let head = Subset::from_elements(n, 1..=t + 2)?;
    Ok(Family::from_canonical(
        n,
        k_subsets(n, k)
            .filter(|a| a.intersection_len(&head) > t)
            .collect(),
    ))
}

/// The complete sunflower `S_X`: every `k`-set containing `core`.
pub fn build_sunflower(n: usize, k: usize, core: &Subset) -> Result<Family> {
    if core.universe() != n {
        return Err(invalid(format!(
            "core lives in [{}], expected [{n}]",
            core.universe()
        )));
    }
    let t = core.len();
    if t < 1 || t > k || k > n {
        return Err(invalid(format!(
            "sunflower needs 1 <= |core| <= k <= n; got |core|={t} k={k} n={n}"
        )));
    }
    Ok(Family::from_canonical(
        n,
        k_subsets(n, k).filter(|f| core.is_subset(f)).collect(),
    ))
}

/// The `(t+2)`-triangle, built member by member:
/// `{1..t+1}`, `{2..t+2}`, and `{1, t+2} ∪ D` for every `(t-1)`-subset `D`
/// of `{2..t+1}`. Equals all `(t+1)`-subsets of `[t+2]`.
pub fn build_triangle(n: usize, t: usize) -> Result<Family> {
    if t < 1 || n < t + 2 {
        return Err(invalid(format!(
            "triangle needs t >= 1 and n >= t+2; got n={n} t={t}"
        )));
    }
    let mut members = vec![
        Subset::from_elements(n, 1..=t + 1)?,
        Subset::from_elements(n, 2..=t + 2)?,
    ];
    let middle = Subset::from_elements(n, 2..=t + 1)?;
    let ends = Subset::from_elements(n, [1, t + 2])?;
    for d in subsets_of(&middle, t - 1) {
        members.push(ends.union(&d)?);
    }
    Family::new(n, members)
}

/// Classifies a `t`-intersecting family of `(t+1)`-sets.
///
/// A common `t`-core wins over a triangle when both fit (e.g. two members).
/// Proper subfamilies of a triangle that are not sunflowers still count as
/// `Triangle`.
pub fn classify_level_family(fam: &Family, t: usize) -> Result<FamilyKind> {
    if t < 1 {
        return Err(invalid("t must be at least 1"));
    }
    if let Some(bad) = fam.iter().find(|s| s.len() != t + 1) {
        return Err(precondition(format!(
            "member {bad} does not have size t+1 = {}",
            t + 1
        )));
    }
    if !is_t_intersecting(fam, t) {
        return Err(precondition(format!("family is not {t}-intersecting")));
    }
    let Some(first) = fam.iter().next() else {
        return Ok(FamilyKind::Other);
    };
    // a common t-core must be a t-subset of the first member
    if let Some(core) = subsets_of(first, t).find(|x| fam.iter().all(|s| x.is_subset(s))) {
        return Ok(FamilyKind::Sunflower { core });
    }
    let support = fam.support();
    if support.len() == t + 2 {
        return Ok(FamilyKind::Triangle { ground: support });
    }
    Ok(FamilyKind::Other)
}

//! Partition of a saturated family by the size of its largest contained
//! generator, the intersection layers `I_l`, and the exact bound evaluators
//! that dominate them.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::count::{binom, binom_prefix_sum, ExactNat};
use crate::error::{invalid, precondition, Result};
use crate::sets::{Family, Subset};
use crate::transversal::{level_bound_rhs, min_member_size};

/// `F = F^(s) ∪ ... ∪ F^(k)`, member `F` in layer `l` iff the largest
/// generator inside `F` has size `l`. Every index in `[s, k]` is present,
/// possibly with an empty layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayeredFamily {
    pub base: Family,
    pub layers: BTreeMap<usize, Family>,
    pub s: usize,
    pub k: usize,
}

impl LayeredFamily {
    /// Members of every layer with index `<= l`.
    pub fn up_to(&self, l: usize) -> impl Iterator<Item = &Subset> {
        self.layers.range(..=l).flat_map(|(_, f)| f.iter())
    }
}

pub fn partition_by_generator(fam: &Family, generators: &Family) -> Result<LayeredFamily> {
    let s = min_member_size(generators)?;
    let k = match fam.uniform_size() {
        Some(k) => k,
        None if fam.is_empty() => s,
        None => return Err(precondition("family is not uniform")),
    };
    let mut layers: BTreeMap<usize, Family> = (s..=k.max(s))
        .map(|l| (l, Family::empty(fam.universe())))
        .collect();
    for f in fam {
        let top = generators
            .iter()
            .filter(|b| b.is_subset(f))
            .map(Subset::len)
            .max()
            .ok_or_else(|| precondition(format!("member {f} contains no generator")))?;
        layers
            .get_mut(&top)
            .expect("generator sizes lie in [s, k]")
            .insert(f.clone())?;
    }
    Ok(LayeredFamily {
        base: fam.clone(),
        layers,
        s,
        k,
    })
}

/// `I_l = {F ∩ G : F ∈ F^(l), G ∈ F^(s) ∪ ... ∪ F^(l), F != G}`.
pub fn intersection_layer(layered: &LayeredFamily, l: usize) -> Result<Family> {
    let layer = layered
        .layers
        .get(&l)
        .ok_or_else(|| invalid(format!("layer {l} outside [{}, {}]", layered.s, layered.k)))?;
    let mut out = Vec::new();
    for f in layer {
        for g in layered.up_to(l) {
            if f != g {
                out.push(f.intersect(g)?);
            }
        }
    }
    Family::new(layered.base.universe(), out)
}

fn check_layer_params(k: u64, t: u64, l: u64) -> Result<()> {
    if t < 1 || l < t + 1 || l > k {
        return Err(invalid(format!(
            "need 1 <= t, t+1 <= l <= k; got k={k} t={t} l={l}"
        )));
    }
    Ok(())
}

/// `Σ_{i=t}^{l} C(l, i)`: the possible traces `B ∩ F'` of a generator.
fn trace_count(l: u64, t: u64) -> ExactNat {
    (t..=l).map(|i| binom(l, i as i64)).sum()
}

/// `|B^(l)| · Σ_{i=t}^{l} C(l,i) · Σ_{j=0}^{k-l} C(n,j)`: the layer bound
/// before the generator count is itself bounded.
pub fn eval_il_bound_with_level(
    level_size: &ExactNat,
    n: u64,
    k: u64,
    t: u64,
    l: u64,
) -> Result<ExactNat> {
    check_layer_params(k, t, l)?;
    Ok(level_size * trace_count(l, t) * binom_prefix_sum(n, (k - l) as i64))
}

/// `s·l·(k-t+1)^(l-t-1) · Σ_{i=t}^{l} C(l,i) · Σ_{j=0}^{k-l} C(n,j)`.
pub fn eval_il_bound(n: u64, k: u64, t: u64, l: u64, s: u64) -> Result<ExactNat> {
    check_layer_params(k, t, l)?;
    if s < 1 {
        return Err(invalid("s must be at least 1"));
    }
    eval_il_bound_with_level(&level_bound_rhs(s, l, k, t), n, k, t, l)
}

/// `Σ_{l=from}^{k} l²·(k-t+1)^(l-t-1) · Σ_{i=t}^{l} C(l,i) · Σ_{j=0}^{k-l} C(n,j)`,
/// the layer part of the total bound summed from an arbitrary lower index.
pub fn eval_layer_tail(n: u64, k: u64, t: u64, from: u64) -> Result<ExactNat> {
    if from < t + 1 {
        return Err(invalid(format!("tail must start at l >= t+1, got {from}")));
    }
    let mut total = BigUint::default();
    for l in from..=k {
        total += eval_il_bound(n, k, t, l, l)?;
    }
    Ok(total)
}

/// `2·C(n-t-2, k-t-1) + 4·Σ_{j<=k-t-2} C(n-t-2, j) - C(n-t-1, k-t-1)`: the
/// sunflower part of the total bound.
pub fn eval_sunflower_part(n: u64, k: u64, t: u64) -> Result<BigInt> {
    if t < 1 || k < t + 1 || n < t + 2 {
        return Err(invalid(format!(
            "need t >= 1, k >= t+1, n >= t+2; got n={n} k={k} t={t}"
        )));
    }
    let d = (k - t - 1) as i64;
    let m = n - t - 2;
    Ok(
        BigInt::from(2u32 * binom(m, d)) + BigInt::from(4u32 * binom_prefix_sum(m, d - 1))
            - BigInt::from(binom(n - t - 1, d)),
    )
}

/// The full upper bound on `|I(F)|` for saturated non-sunflower,
/// non-triangle families: sunflower part plus the layer tail from `t+2`.
///
/// Returned signed: a negative value would falsify the bound outright.
pub fn eval_total_bound(n: u64, k: u64, t: u64) -> Result<BigInt> {
    if k < t + 2 || n < t + 2 {
        return Err(invalid(format!(
            "total bound needs k >= t+2 and n >= t+2; got n={n} k={k} t={t}"
        )));
    }
    Ok(eval_sunflower_part(n, k, t)? + BigInt::from(eval_layer_tail(n, k, t, t + 2)?))
}

//! Desk-scale ground truth.
//!
//! Maximal `t`-intersecting families of `k`-sets are exactly the maximal
//! cliques of the graph on `C([n], k)` joining sets that share at least `t`
//! elements; those are enumerated with Bron–Kerbosch (Tomita pivoting) over
//! bitset adjacency. Since adding members never removes an intersection,
//! the maximum of `|I(F)|` over all `t`-intersecting families is attained on
//! a maximal one, so the enumeration is enough for the extremal question.
//!
//! Each family is then audited: its generators, the layer partition, the
//! level-size bound and every proof inequality whose hypotheses hold.

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{classify_level_family, FamilyKind};
use crate::count::{binom, count_i_at, count_i_sunflower, ExactNat};
use crate::decomposition::{
    eval_il_bound, eval_il_bound_with_level, eval_layer_tail, eval_total_bound, intersection_layer,
    partition_by_generator,
};
use crate::error::{invalid, precondition, Error, Result};
use crate::sets::{
    distinct_intersections, find_classical_sunflower, find_common_core_sunflower, is_antichain,
    is_t_intersecting, k_subsets, up_closure, Family, Params, Subset,
};
use crate::transversal::{check_level_bound, generator_profile, is_saturated, level_size};

/// Default cap on `C(n, k)` for clique enumeration.
pub const DEFAULT_BUDGET: u128 = 5000;

struct BitGraph {
    words: usize,
    adj: Vec<Vec<u64>>,
}

fn bit_test(set: &[u64], i: usize) -> bool {
    set[i / 64] >> (i % 64) & 1 == 1
}

fn bit_clear(set: &mut [u64], i: usize) {
    set[i / 64] &= !(1u64 << (i % 64));
}

fn ones(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(w, &word)| {
        let mut bits = word;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(w * 64 + b)
        })
    })
}

fn and_count(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

fn and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

impl BitGraph {
    fn new(vertices: &[Subset], t: usize) -> Self {
        let n = vertices.len();
        let words = n.div_ceil(64).max(1);
        let mut adj = vec![vec![0u64; words]; n];
        for i in 0..n {
            for j in i + 1..n {
                if vertices[i].intersection_len(&vertices[j]) >= t {
                    adj[i][j / 64] |= 1 << (j % 64);
                    adj[j][i / 64] |= 1 << (i % 64);
                }
            }
        }
        BitGraph { words, adj }
    }

    fn maximal_cliques(&self) -> Vec<Vec<usize>> {
        let n = self.adj.len();
        let mut p = vec![0u64; self.words];
        for i in 0..n {
            p[i / 64] |= 1 << (i % 64);
        }
        let x = vec![0u64; self.words];
        let mut out = Vec::new();
        let mut r = Vec::new();
        self.expand(&mut r, p, x, &mut out);
        out
    }

    fn expand(
        &self,
        r: &mut Vec<usize>,
        mut p: Vec<u64>,
        mut x: Vec<u64>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.iter().all(|&w| w == 0) {
            if x.iter().all(|&w| w == 0) {
                let mut clique = r.clone();
                clique.sort_unstable();
                out.push(clique);
            }
            return;
        }
        // pivot: vertex of P ∪ X with most neighbours in P, lowest index on ties
        let pivot = ones(&p)
            .chain(ones(&x))
            .max_by_key(|&u| (and_count(&self.adj[u], &p), std::cmp::Reverse(u)))
            .expect("P is nonempty");
        let candidates: Vec<usize> = ones(&p)
            .filter(|&v| !bit_test(&self.adj[pivot], v))
            .collect();
        for v in candidates {
            r.push(v);
            self.expand(r, and(&p, &self.adj[v]), and(&x, &self.adj[v]), out);
            r.pop();
            bit_clear(&mut p, v);
            x[v / 64] |= 1 << (v % 64);
        }
    }
}

fn check_enumeration_params(n: usize, k: usize, t: usize, budget: u128) -> Result<()> {
    Params::new(n as u64, k as u64, t as u64)?;
    let vertices = binom(n as u64, k as i64);
    if vertices > BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            vertices: u128::try_from(&vertices).unwrap_or(u128::MAX),
            budget,
        });
    }
    Ok(())
}

/// All maximal `t`-intersecting subfamilies of `C([n], k)`, sorted.
///
/// Refuses when `C(n, k)` exceeds `budget`.
pub fn enumerate_maximal_families(
    n: usize,
    k: usize,
    t: usize,
    budget: u128,
) -> Result<Vec<Family>> {
    check_enumeration_params(n, k, t, budget)?;
    let vertices: Vec<Subset> = k_subsets(n, k).collect();
    let graph = BitGraph::new(&vertices, t);
    let mut families: Vec<Family> = graph
        .maximal_cliques()
        .into_iter()
        .map(|c| Family::from_canonical(n, c.into_iter().map(|i| vertices[i].clone()).collect()))
        .collect();
    families.sort_unstable();
    Ok(families)
}

/// Number of families up to relabelling of `[n]`. Only for `n <= 8`.
pub fn orbit_count(families: &[Family]) -> Option<usize> {
    let n = families.first()?.universe();
    if n > 8 {
        return None;
    }
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let lists: Vec<Vec<Vec<usize>>> = families.iter().map(Family::to_lists).collect();
    let mut forms: Vec<Vec<u16>> = lists
        .par_iter()
        .map(|sets| {
            perms
                .iter()
                .map(|p| {
                    let mut masks: Vec<u16> = sets
                        .iter()
                        .map(|s| s.iter().fold(0u16, |m, &e| m | 1 << p[e - 1]))
                        .collect();
                    masks.sort_unstable();
                    masks
                })
                .min()
                .unwrap_or_default()
        })
        .collect();
    forms.sort_unstable();
    forms.dedup();
    Some(forms.len())
}

/// Verdicts for one saturated family. Optional verdicts are absent exactly
/// when their hypotheses fail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub family_id: usize,
    pub size: usize,
    pub distinct_intersections: usize,
    pub generators: usize,
    pub s: Option<usize>,
    pub tau: Option<usize>,
    pub alpha: Option<usize>,
    /// `F` is a complete sunflower (`B` is a single `t`-set).
    pub complete_sunflower: bool,
    /// `B` is a `t`-intersecting antichain.
    pub generators_antichain: bool,
    /// The up-closure of `B` at level `k` is `F`.
    pub generators_close_up: bool,
    /// `B` holds no classical sunflower with `k+1` petals.
    pub generators_sunflower_free: bool,
    /// `B` holds `k+1` members through one common `t`-set (recorded only).
    pub common_core_sunflower: bool,
    /// `s >= t+1` and `α` exists, so the level-size bound applies from `α` on.
    pub hypotheses_met: bool,
    pub level_bound_ok: Option<bool>,
    pub layer_bound_ok: Option<bool>,
    pub low_layers_ok: Option<bool>,
    /// Non-sunflower, non-triangle branch: `hypotheses_met`, `α >= t+2`, `k >= t+2`.
    pub total_applicable: bool,
    pub tail_ok: Option<bool>,
    pub total_ok: Option<bool>,
    #[serde(with = "crate::report::opt_decimal")]
    pub layer_tail_from_alpha: Option<ExactNat>,
    #[serde(with = "crate::report::opt_decimal")]
    pub layer_tail_from_t2: Option<ExactNat>,
    pub layer_sum: usize,
    pub layer_cover_ok: bool,
    pub classification: Option<FamilyKind>,
}

impl AuditRecord {
    /// Every evaluated verdict holds.
    pub fn all_hold(&self) -> bool {
        self.generators_antichain
            && self.generators_close_up
            && self.generators_sunflower_free
            && self.layer_cover_ok
            && [
                self.level_bound_ok,
                self.layer_bound_ok,
                self.low_layers_ok,
                self.tail_ok,
                self.total_ok,
            ]
            .iter()
            .all(|v| v.unwrap_or(true))
            && !matches!(self.classification, Some(FamilyKind::Other))
    }
}

/// Audits one saturated `t`-intersecting uniform family.
pub fn audit_proof_inequalities(fam: &Family, t: usize) -> Result<AuditRecord> {
    audit_family(0, fam, t)
}

pub fn audit_family(family_id: usize, fam: &Family, t: usize) -> Result<AuditRecord> {
    let k = fam
        .uniform_size()
        .ok_or_else(|| precondition("family must be nonempty and uniform"))?;
    let n = fam.universe();
    if t < 1 || t > k {
        return Err(invalid(format!("need 1 <= t <= k, got t={t} k={k}")));
    }
    if !is_saturated(fam, t, k)? {
        return Err(precondition("family is not saturated"));
    }
    let profile = generator_profile(fam, t, k)?;
    let generators = &profile.generators;
    let up = up_closure(generators, k)?;

    let (nn, kk, tt) = (n as u64, k as u64, t as u64);
    let intersections = distinct_intersections(fam);
    let layered = partition_by_generator(fam, generators)?;
    let layer_sets: Vec<(usize, Family)> = layered
        .layers
        .keys()
        .map(|&l| Ok((l, intersection_layer(&layered, l)?)))
        .collect::<Result<_>>()?;
    let layer_sum: usize = layer_sets.iter().map(|(_, f)| f.len()).sum();
    let mut union = Family::empty(n);
    for (_, f) in &layer_sets {
        union = union.union(f)?;
    }
    let layer_cover_ok = union == intersections && intersections.len() <= layer_sum;

    let s = profile.s;
    let alpha = profile.alpha;
    let hypotheses_met = s.is_some_and(|s| s > t) && alpha.is_some();

    let mut level_bound_ok = None;
    let mut layer_bound_ok = None;
    if let (true, Some(a), Some(s)) = (hypotheses_met, alpha, s) {
        let mut level_ok = true;
        for l in a.max(t + 1)..=k {
            level_ok &= check_level_bound(generators, l, k, t)?.holds;
        }
        level_bound_ok = Some(level_ok);

        let mut layer_ok = true;
        for (l, layer) in &layer_sets {
            if *l < a.max(t + 2) || layered.layers[l].is_empty() {
                continue;
            }
            let size = BigUint::from(layer.len());
            let via_level =
                eval_il_bound_with_level(&level_size(&profile, *l), nn, kk, tt, *l as u64)?;
            let via_lemma = eval_il_bound(nn, kk, tt, *l as u64, s as u64)?;
            layer_ok &= size <= via_level && size <= via_lemma;
        }
        layer_bound_ok = Some(layer_ok);
    }

    let low_layers_ok = match alpha {
        Some(a) => {
            let mut below = Family::empty(n);
            for (_, f) in layer_sets.iter().filter(|(l, _)| *l < a) {
                below = below.union(f)?;
            }
            Some(BigUint::from(below.len()) <= count_i_sunflower(nn, kk, tt)?)
        }
        None => None,
    };

    let total_applicable = hypotheses_met && alpha.is_some_and(|a| a >= t + 2) && k >= t + 2;
    let (mut tail_ok, mut total_ok, mut tail_alpha, mut tail_t2) = (None, None, None, None);
    if total_applicable {
        let a = alpha.expect("applicable implies alpha");
        let mut above = Family::empty(n);
        for (_, f) in layer_sets.iter().filter(|(l, _)| *l >= a) {
            above = above.union(f)?;
        }
        let from_alpha = eval_layer_tail(nn, kk, tt, a as u64)?;
        let from_t2 = eval_layer_tail(nn, kk, tt, tt + 2)?;
        let above_len = BigUint::from(above.len());
        tail_ok = Some(above_len < from_alpha || (above_len == from_alpha && above.is_empty()));
        total_ok = Some(BigInt::from(intersections.len()) < eval_total_bound(nn, kk, tt)?);
        tail_alpha = Some(from_alpha);
        tail_t2 = Some(from_t2);
    }

    let classification = if k == t + 1 {
        Some(classify_level_family(fam, t)?)
    } else {
        match profile.levels.get(&(t + 1)) {
            // below n = 2k-t the generators need not be t-intersecting
            Some(level) if !level.is_empty() && is_t_intersecting(level, t) => {
                Some(classify_level_family(level, t)?)
            }
            _ => None,
        }
    };

    Ok(AuditRecord {
        family_id,
        size: fam.len(),
        distinct_intersections: intersections.len(),
        generators: generators.len(),
        s,
        tau: profile.tau,
        alpha,
        complete_sunflower: profile.is_complete_sunflower(),
        generators_antichain: is_antichain(generators) && is_t_intersecting(generators, t),
        generators_close_up: &up == fam,
        generators_sunflower_free: find_classical_sunflower(generators, k + 1).is_none(),
        common_core_sunflower: find_common_core_sunflower(generators, t, k + 1).is_some(),
        hypotheses_met,
        level_bound_ok,
        layer_bound_ok,
        low_layers_ok,
        total_applicable,
        tail_ok,
        total_ok,
        layer_tail_from_alpha: tail_alpha,
        layer_tail_from_t2: tail_t2,
        layer_sum,
        layer_cover_ok,
        classification,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportOptions {
    pub budget: u128,
    /// Maximum number of maximising families kept in the report.
    pub argmax_cap: usize,
    pub audit: bool,
    pub orbits: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            budget: DEFAULT_BUDGET,
            argmax_cap: 8,
            audit: true,
            orbits: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalReport {
    pub params: Params,
    pub num_maximal: usize,
    pub orbit_count: Option<usize>,
    pub max_i: usize,
    pub argmax_families: Vec<Family>,
    /// Closed-form `|I(A_t)|`, present when `k >= t+1` and `n >= 2k-t`.
    #[serde(with = "crate::report::opt_decimal")]
    pub count_i_at: Option<ExactNat>,
    pub at_is_max: Option<bool>,
    pub all_audits_hold: bool,
    pub per_family_audits: Vec<AuditRecord>,
}

pub fn extremal_report(
    n: usize,
    k: usize,
    t: usize,
    opts: ReportOptions,
) -> Result<ExtremalReport> {
    let families = enumerate_maximal_families(n, k, t, opts.budget)?;
    let sizes: Vec<usize> = families
        .par_iter()
        .map(|f| distinct_intersections(f).len())
        .collect();
    let max_i = sizes.iter().copied().max().unwrap_or(0);
    let argmax_families = families
        .iter()
        .zip(&sizes)
        .filter(|(_, &s)| s == max_i)
        .take(opts.argmax_cap)
        .map(|(f, _)| f.clone())
        .collect();
    let per_family_audits: Vec<AuditRecord> = if opts.audit {
        families
            .par_iter()
            .enumerate()
            .map(|(i, f)| audit_family(i, f, t))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let count = count_i_at(n as u64, k as u64, t as u64).ok();
    let at_is_max = count.as_ref().map(|c| BigUint::from(max_i) <= *c);
    Ok(ExtremalReport {
        params: Params::new(n as u64, k as u64, t as u64)?,
        num_maximal: families.len(),
        orbit_count: if opts.orbits {
            orbit_count(&families)
        } else {
            None
        },
        max_i,
        argmax_families,
        count_i_at: count,
        at_is_max,
        all_audits_hold: per_family_audits.iter().all(AuditRecord::all_hold),
        per_family_audits,
    })
}

//! Subsets of `[n]`, canonical families of them, and the intersection
//! primitives the rest of the crate builds on.
//!
//! A [`Subset`] is a bit-vector over a fixed universe `[n] = {1, ..., n}`;
//! universes up to 128 elements stay inline (two machine words), larger ones
//! spill to the heap. A [`Family`] keeps its members sorted in canonical order
//! (cardinality first, then lexicographic on the sorted element lists) and
//! free of duplicates, so equal families are structurally identical.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use smallvec::{smallvec, SmallVec};

use crate::error::{invalid, precondition, Error, Result};

type Words = SmallVec<[u64; 2]>;

fn words_for(universe: usize) -> usize {
    universe.div_ceil(64).max(1)
}

/// A subset of `[n]`, elements numbered from 1.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SubsetJson", into = "SubsetJson")]
pub struct Subset {
    universe: usize,
    words: Words,
}

/// Wire form of a [`Subset`]: `{"universe": n, "elements": [1, 3]}`.
#[derive(Serialize, Deserialize)]
struct SubsetJson {
    universe: usize,
    elements: Vec<usize>,
}

impl TryFrom<SubsetJson> for Subset {
    type Error = Error;

    fn try_from(json: SubsetJson) -> Result<Subset> {
        Subset::from_elements(json.universe, json.elements)
    }
}

impl From<Subset> for SubsetJson {
    fn from(s: Subset) -> SubsetJson {
        SubsetJson {
            universe: s.universe,
            elements: s.to_vec(),
        }
    }
}

impl Subset {
    pub fn empty(universe: usize) -> Self {
        Subset {
            universe,
            words: smallvec![0; words_for(universe)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Subset::empty(universe);
        for e in 1..=universe {
            s.set_bit(e - 1);
        }
        s
    }

    pub fn from_elements<I>(universe: usize, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut s = Subset::empty(universe);
        for e in elements {
            s.insert(e)?;
        }
        Ok(s)
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, element: usize) -> bool {
        if element == 0 || element > self.universe {
            return false;
        }
        let i = element - 1;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Adds `element`; returns whether it was newly inserted.
    pub fn insert(&mut self, element: usize) -> Result<bool> {
        if element == 0 || element > self.universe {
            return Err(Error::ElementOutOfRange {
                element,
                universe: self.universe,
            });
        }
        let fresh = !self.contains(element);
        self.set_bit(element - 1);
        Ok(fresh)
    }

    pub fn remove(&mut self, element: usize) -> bool {
        if !self.contains(element) {
            return false;
        }
        let i = element - 1;
        self.words[i / 64] &= !(1u64 << (i % 64));
        true
    }

    fn set_bit(&mut self, i: usize) {
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    /// Elements in ascending order, 1-based.
    pub fn elements(&self) -> Elements<'_> {
        Elements {
            words: &self.words,
            index: 0,
            current: self.words[0],
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.elements().collect()
    }

    fn check_universe(&self, other: &Subset) -> Result<()> {
        if self.universe != other.universe {
            return Err(Error::UniverseMismatch {
                left: self.universe,
                right: other.universe,
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Subset, f: impl Fn(u64, u64) -> u64) -> Subset {
        Subset {
            universe: self.universe,
            words: self
                .words
                .iter()
                .zip(other.words.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn intersect(&self, other: &Subset) -> Result<Subset> {
        self.check_universe(other)?;
        Ok(self.zip_with(other, |a, b| a & b))
    }

    pub fn union(&self, other: &Subset) -> Result<Subset> {
        self.check_universe(other)?;
        Ok(self.zip_with(other, |a, b| a | b))
    }

    pub fn difference(&self, other: &Subset) -> Result<Subset> {
        self.check_universe(other)?;
        Ok(self.zip_with(other, |a, b| a & !b))
    }

    /// `|self ∩ other|`.
    ///
    /// Panics if the universes differ; members of one [`Family`] always agree.
    pub fn intersection_len(&self, other: &Subset) -> usize {
        assert_eq!(self.universe, other.universe, "universe mismatch");
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// `self ⊆ other`. Panics if the universes differ.
    pub fn is_subset(&self, other: &Subset) -> bool {
        assert_eq!(self.universe, other.universe, "universe mismatch");
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_proper_subset(&self, other: &Subset) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn is_disjoint(&self, other: &Subset) -> bool {
        self.intersection_len(other) == 0
    }
}

pub struct Elements<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Elements<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * 64 + bit + 1);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

/// Lexicographic comparison of the sorted element lists of two equal-size
/// sets: the set holding the smallest element of the symmetric difference
/// comes first.
fn lex_cmp(a: &[u64], b: &[u64]) -> Ordering {
    for (&x, &y) in a.iter().zip(b.iter()) {
        let diff = x ^ y;
        if diff != 0 {
            let low = diff & diff.wrapping_neg();
            return if x & low != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            };
        }
    }
    Ordering::Equal
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.universe
            .cmp(&other.universe)
            .then_with(|| self.len().cmp(&other.len()))
            .then_with(|| lex_cmp(&self.words, &other.words))
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.elements().join(","))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All `k`-subsets of `[n]` in canonical (lexicographic) order.
pub fn k_subsets(universe: usize, k: usize) -> impl Iterator<Item = Subset> {
    (1..=universe).combinations(k).map(move |c| {
        let mut s = Subset::empty(universe);
        for e in c {
            s.set_bit(e - 1);
        }
        s
    })
}

/// All `r`-subsets of `set`, lexicographic on elements.
pub fn subsets_of(set: &Subset, r: usize) -> impl Iterator<Item = Subset> {
    let universe = set.universe;
    set.to_vec().into_iter().combinations(r).map(move |c| {
        let mut s = Subset::empty(universe);
        for e in c {
            s.set_bit(e - 1);
        }
        s
    })
}

/// A duplicate-free family of subsets of `[n]` in canonical order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "FamilyJson", into = "FamilyJson")]
pub struct Family {
    universe: usize,
    sets: Vec<Subset>,
}

/// Wire form of a [`Family`]: `{"universe": n, "sets": [[1,2],[1,3]]}`.
#[derive(Serialize, Deserialize)]
struct FamilyJson {
    universe: usize,
    sets: Vec<Vec<usize>>,
}

impl TryFrom<FamilyJson> for Family {
    type Error = Error;

    fn try_from(json: FamilyJson) -> Result<Family> {
        if json.universe == 0 {
            return Err(invalid("universe must be at least 1"));
        }
        Family::from_lists(json.universe, &json.sets)
    }
}

impl From<Family> for FamilyJson {
    fn from(f: Family) -> FamilyJson {
        FamilyJson {
            universe: f.universe,
            sets: f.to_lists(),
        }
    }
}

impl Family {
    pub fn empty(universe: usize) -> Self {
        Family {
            universe,
            sets: Vec::new(),
        }
    }

    pub fn new<I>(universe: usize, sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = Subset>,
    {
        let mut v: Vec<Subset> = sets.into_iter().collect();
        if let Some(bad) = v.iter().find(|s| s.universe != universe) {
            return Err(Error::UniverseMismatch {
                left: universe,
                right: bad.universe,
            });
        }
        v.sort_unstable();
        v.dedup();
        Ok(Family { universe, sets: v })
    }

    pub fn from_lists<L: AsRef<[usize]>>(universe: usize, lists: &[L]) -> Result<Self> {
        let sets = lists
            .iter()
            .map(|l| Subset::from_elements(universe, l.as_ref().iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        Family::new(universe, sets)
    }

    /// Builds a family from members that are already canonical and unique.
    pub(crate) fn from_canonical(universe: usize, sets: Vec<Subset>) -> Self {
        debug_assert!(sets.windows(2).all(|w| w[0] < w[1]));
        Family { universe, sets }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Subset> {
        self.sets.iter()
    }

    pub fn as_slice(&self) -> &[Subset] {
        &self.sets
    }

    pub fn contains(&self, s: &Subset) -> bool {
        s.universe == self.universe && self.sets.binary_search(s).is_ok()
    }

    /// Inserts `s` keeping canonical order; returns whether it was new.
    pub fn insert(&mut self, s: Subset) -> Result<bool> {
        if s.universe != self.universe {
            return Err(Error::UniverseMismatch {
                left: self.universe,
                right: s.universe,
            });
        }
        match self.sets.binary_search(&s) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.sets.insert(pos, s);
                Ok(true)
            }
        }
    }

    pub fn union(&self, other: &Family) -> Result<Family> {
        Family::new(
            self.universe,
            self.sets.iter().chain(other.sets.iter()).cloned(),
        )
    }

    pub fn is_subfamily_of(&self, other: &Family) -> bool {
        self.sets.iter().all(|s| other.contains(s))
    }

    /// The common member size, if the family is nonempty and uniform.
    pub fn uniform_size(&self) -> Option<usize> {
        let first = self.sets.first()?.len();
        self.sets.iter().all(|s| s.len() == first).then_some(first)
    }

    /// Union of all members.
    pub fn support(&self) -> Subset {
        let mut acc = Subset::empty(self.universe);
        for s in &self.sets {
            for (a, b) in acc.words.iter_mut().zip(s.words.iter()) {
                *a |= b;
            }
        }
        acc
    }

    pub fn filter(&self, mut keep: impl FnMut(&Subset) -> bool) -> Family {
        Family::from_canonical(
            self.universe,
            self.sets.iter().filter(|s| keep(s)).cloned().collect(),
        )
    }

    pub fn to_lists(&self) -> Vec<Vec<usize>> {
        self.sets.iter().map(Subset::to_vec).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("family serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Family> {
        serde_json::from_str(text).map_err(|e| invalid(format!("malformed family JSON: {e}")))
    }
}

impl<'a> IntoIterator for &'a Family {
    type Item = &'a Subset;
    type IntoIter = std::slice::Iter<'a, Subset>;

    fn into_iter(self) -> Self::IntoIter {
        self.sets.iter()
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[n={}] {{", self.universe)?;
        for (i, s) in self.sets.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

/// The triple `(n, k, t)` with `1 <= t <= k <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub n: u64,
    pub k: u64,
    pub t: u64,
}

impl Params {
    pub fn new(n: u64, k: u64, t: u64) -> Result<Self> {
        if t < 1 || t > k || k > n {
            return Err(invalid(format!(
                "need 1 <= t <= k <= n, got n={n} k={k} t={t}"
            )));
        }
        Ok(Params { n, k, t })
    }
}

/// Every pair of distinct members meets in at least `t` elements.
pub fn is_t_intersecting(fam: &Family, t: usize) -> bool {
    let sets = fam.as_slice();
    sets.iter()
        .enumerate()
        .all(|(i, a)| sets[i + 1..].iter().all(|b| a.intersection_len(b) >= t))
}

/// `I(F)`: the distinct intersections `F ∩ G` over unordered pairs of
/// distinct members. The empty set is kept when two members are disjoint.
pub fn distinct_intersections(fam: &Family) -> Family {
    let sets = fam.as_slice();
    let mut seen: HashSet<Subset> = HashSet::new();
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            seen.insert(a.zip_with(b, |x, y| x & y));
        }
    }
    let mut v: Vec<Subset> = seen.into_iter().collect();
    v.sort_unstable();
    Family::from_canonical(fam.universe(), v)
}

/// No member is a proper subset of another.
pub fn is_antichain(fam: &Family) -> bool {
    // canonical order puts smaller sets first, so only look forward
    let sets = fam.as_slice();
    sets.iter().enumerate().all(|(i, a)| {
        sets[i + 1..]
            .iter()
            .all(|b| a.len() == b.len() || !a.is_subset(b))
    })
}

/// `{D ∈ C([n], k) : some generator is contained in D}`.
pub fn up_closure(generators: &Family, k: usize) -> Result<Family> {
    let n = generators.universe();
    if k > n {
        return Err(invalid(format!("k = {k} exceeds n = {n}")));
    }
    if let Some(big) = generators.iter().find(|g| g.len() > k) {
        return Err(precondition(format!("generator {big} larger than k = {k}")));
    }
    let mut out: HashSet<Subset> = HashSet::new();
    for g in generators {
        let rest = Subset::full(n).difference(g)?;
        for ext in subsets_of(&rest, k - g.len()) {
            out.insert(g.zip_with(&ext, |a, b| a | b));
        }
    }
    Family::new(n, out)
}

/// A sunflower found inside a family: a shared core and the petal members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sunflower {
    pub core: Subset,
    pub petals: Family,
}

/// Looks for a `t`-set `X` contained in at least `m` members.
///
/// This is the common-core notion of a sunflower (any subfamily of the
/// complete star `S_X`). Returns the lexicographically first such `X` and the
/// first `m` members (canonical order) containing it.
pub fn find_common_core_sunflower(fam: &Family, t: usize, m: usize) -> Option<Sunflower> {
    let mut counts: HashMap<Subset, usize> = HashMap::new();
    for s in fam {
        for x in subsets_of(s, t) {
            *counts.entry(x).or_default() += 1;
        }
    }
    let core = counts
        .into_iter()
        .filter(|&(_, c)| c >= m)
        .map(|(x, _)| x)
        .min()?;
    let petals: Vec<Subset> = fam
        .iter()
        .filter(|s| core.is_subset(s))
        .take(m)
        .cloned()
        .collect();
    Some(Sunflower {
        core,
        petals: Family::from_canonical(fam.universe(), petals),
    })
}

/// Looks for `m` members whose pairwise intersections all equal one core
/// (the classical sunflower: petals outside the core are pairwise disjoint).
pub fn find_classical_sunflower(fam: &Family, m: usize) -> Option<Sunflower> {
    let sets = fam.as_slice();
    if m == 0 {
        return Some(Sunflower {
            core: Subset::empty(fam.universe()),
            petals: Family::empty(fam.universe()),
        });
    }
    if m == 1 {
        let first = sets.first()?.clone();
        return Some(Sunflower {
            core: first.clone(),
            petals: Family::from_canonical(fam.universe(), vec![first]),
        });
    }
    for (i, a) in sets.iter().enumerate() {
        for (j, b) in sets.iter().enumerate().skip(i + 1) {
            let core = a.zip_with(b, |x, y| x & y);
            let candidates: Vec<usize> = (j + 1..sets.len())
                .filter(|&c| core.is_subset(&sets[c]))
                .collect();
            if candidates.len() + 2 < m {
                continue;
            }
            let used = a.zip_with(b, |x, y| x | y);
            let used = used.zip_with(&core, |x, c| x & !c);
            let mut chosen = vec![i, j];
            if extend_sunflower(sets, &core, &candidates, 0, used, &mut chosen, m) {
                let petals = chosen.iter().map(|&c| sets[c].clone()).collect();
                return Some(Sunflower {
                    core,
                    petals: Family::from_canonical(fam.universe(), petals),
                });
            }
        }
    }
    None
}

fn extend_sunflower(
    sets: &[Subset],
    core: &Subset,
    candidates: &[usize],
    from: usize,
    used: Subset,
    chosen: &mut Vec<usize>,
    m: usize,
) -> bool {
    if chosen.len() == m {
        return true;
    }
    for (pos, &c) in candidates.iter().enumerate().skip(from) {
        if candidates.len() - pos + chosen.len() < m {
            break;
        }
        let petal = sets[c].zip_with(core, |x, y| x & !y);
        if !petal.is_disjoint(&used) {
            continue;
        }
        chosen.push(c);
        let next = used.zip_with(&petal, |x, y| x | y);
        if extend_sunflower(sets, core, candidates, pos + 1, next, chosen, m) {
            return true;
        }
        chosen.pop();
    }
    false
}

//! Finite ordered sequences over finite ordered level sets.
//!
//! Samples are stored as dense ranks into a [`LevelUniverse`]. Only the order
//! of levels matters for everything downstream, so the ranks are the canonical
//! representative of any order-preserving embedding of the raw values.

use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense rank of a level, `0..M`.
pub type Rank = u32;

/// Topology of the index set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    /// Path `0 - 1 - ... - N-1` with boundary samples at both ends.
    Linear,
    /// Cycle, index arithmetic modulo `N`.
    Circular,
}

impl Domain {
    pub fn is_circular(self) -> bool {
        matches!(self, Domain::Circular)
    }
}

/// The set of levels `{l_0 < ... < l_{M-1}}`, optionally labelled with the raw
/// values the ranks were derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelUniverse {
    size: u32,
    labels: Option<Vec<f64>>,
    /// Labels are stored in rank order; after an order inversion they read
    /// strictly decreasing.
    #[serde(default)]
    inverted: bool,
}

impl LevelUniverse {
    pub fn unlabeled(size: u32) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyUniverse);
        }
        Ok(Self { size, labels: None, inverted: false })
    }

    /// Universe whose rank `r` displays as `labels[r]`; labels must be strictly
    /// increasing.
    pub fn labeled(labels: Vec<f64>) -> Result<Self> {
        Self::with_labels(labels, false)
    }

    fn with_labels(labels: Vec<f64>, inverted: bool) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        let ordered = labels.windows(2).all(|w| {
            if inverted {
                w[0] > w[1]
            } else {
                w[0] < w[1]
            }
        });
        if !ordered || labels.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidLabels);
        }
        let size = u32::try_from(labels.len()).map_err(|_| Error::InvalidLabels)?;
        Ok(Self { size, labels: Some(labels), inverted })
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn labels(&self) -> Option<&[f64]> {
        self.labels.as_deref()
    }

    pub fn is_inverted(&self) -> bool {
        self.inverted
    }

    pub fn label(&self, rank: Rank) -> Option<f64> {
        self.labels.as_ref().and_then(|l| l.get(rank as usize).copied())
    }

    /// Universe of the inverted order: rank `r` maps to `M-1-r`.
    pub fn inverted(&self) -> Self {
        Self {
            size: self.size,
            labels: self.labels.as_ref().map(|l| l.iter().rev().copied().collect()),
            inverted: !self.inverted,
        }
    }

    pub fn invert_rank(&self, rank: Rank) -> Rank {
        self.size - 1 - rank
    }
}

/// A finite discrete function `x: I -> L` on a linear or circular index set.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedSequence {
    domain: Domain,
    levels: Vec<Rank>,
    universe: Arc<LevelUniverse>,
}

impl OrderedSequence {
    /// Builds a sequence from ranks in an unlabelled universe of `size` levels.
    /// Surjectivity is not required.
    pub fn from_ranks(levels: Vec<Rank>, size: u32, domain: Domain) -> Result<Self> {
        Self::with_universe(levels, Arc::new(LevelUniverse::unlabeled(size)?), domain)
    }

    /// Builds a sequence over the smallest universe that contains every rank.
    pub fn from_ranks_auto(levels: Vec<Rank>, domain: Domain) -> Result<Self> {
        let size = levels.iter().copied().max().ok_or(Error::EmptyInput)? + 1;
        Self::from_ranks(levels, size, domain)
    }

    pub fn with_universe(
        levels: Vec<Rank>,
        universe: Arc<LevelUniverse>,
        domain: Domain,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(&bad) = levels.iter().find(|&&r| r >= universe.size()) {
            return Err(Error::LevelOutOfRange { level: bad, size: universe.size() });
        }
        Ok(Self { domain, levels, universe })
    }

    pub(crate) fn from_parts_unchecked(
        levels: Vec<Rank>,
        universe: Arc<LevelUniverse>,
        domain: Domain,
    ) -> Self {
        debug_assert!(!levels.is_empty());
        Self { domain, levels, universe }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub(crate) fn into_levels(self) -> Vec<Rank> {
        self.levels
    }

    pub(crate) fn levels_mut(&mut self) -> &mut [Rank] {
        &mut self.levels
    }

    pub fn levels(&self) -> &[Rank] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    /// Always false; sequences hold at least one sample.
    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn universe(&self) -> &Arc<LevelUniverse> {
        &self.universe
    }

    pub fn level(&self, index: usize) -> Rank {
        self.levels[index]
    }

    pub fn with_domain(&self, domain: Domain) -> Self {
        Self { domain, ..self.clone() }
    }

    /// Predecessor index, if any. A circular sequence of length one is its own
    /// predecessor.
    pub fn prev(&self, i: usize) -> Option<usize> {
        match (self.domain, i) {
            (Domain::Linear, 0) => None,
            (Domain::Circular, 0) => Some(self.len() - 1),
            _ => Some(i - 1),
        }
    }

    pub fn next(&self, i: usize) -> Option<usize> {
        if i + 1 < self.len() {
            Some(i + 1)
        } else if self.domain.is_circular() {
            Some(0)
        } else {
            None
        }
    }

    pub fn max_level(&self) -> Rank {
        self.levels.iter().copied().max().unwrap_or(0)
    }

    pub fn min_level(&self) -> Rank {
        self.levels.iter().copied().min().unwrap_or(0)
    }

    /// True when every level of the universe is attained.
    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.universe.size() as usize];
        for &r in &self.levels {
            seen[r as usize] = true;
        }
        seen.into_iter().all(|s| s)
    }

    /// Re-ranks onto the attained levels only, carrying labels along.
    pub fn normalize(&self) -> Self {
        let mut used = vec![false; self.universe.size() as usize];
        for &r in &self.levels {
            used[r as usize] = true;
        }
        let mut remap = vec![0 as Rank; used.len()];
        let mut next = 0;
        for (r, &u) in used.iter().enumerate() {
            if u {
                remap[r] = next;
                next += 1;
            }
        }
        let labels = self.universe.labels().map(|l| {
            l.iter()
                .zip(&used)
                .filter_map(|(v, &u)| u.then_some(*v))
                .collect::<Vec<_>>()
        });
        let universe = match labels {
            Some(l) => LevelUniverse::with_labels(l, self.universe.inverted),
            None => LevelUniverse::unlabeled(next),
        }
        .expect("attained labels stay ordered");
        Self {
            domain: self.domain,
            levels: self.levels.iter().map(|&r| remap[r as usize]).collect(),
            universe: Arc::new(universe),
        }
    }

    fn check_level(&self, l: Rank) -> Result<()> {
        if l >= self.universe.size() {
            Err(Error::LevelOutOfRange { level: l, size: self.universe.size() })
        } else {
            Ok(())
        }
    }

    fn subset_where(&self, pred: impl Fn(Rank) -> bool) -> IndexSubset {
        IndexSubset {
            domain: self.domain,
            members: self.levels.iter().map(|&r| pred(r)).collect(),
        }
    }

    /// `{ i | x[i] = l }`.
    pub fn level_set(&self, l: Rank) -> Result<IndexSubset> {
        self.check_level(l)?;
        Ok(self.subset_where(|r| r == l))
    }

    /// Strict sublevel set `{ i | x[i] < l }`.
    pub fn sublevel_set(&self, l: Rank) -> Result<IndexSubset> {
        self.check_level(l)?;
        Ok(self.subset_where(|r| r < l))
    }

    /// Strict superlevel set `{ i | x[i] > l }`.
    pub fn superlevel_set(&self, l: Rank) -> Result<IndexSubset> {
        self.check_level(l)?;
        Ok(self.subset_where(|r| r > l))
    }

    /// Reverses the order of levels, `r -> M-1-r`. An involution.
    pub fn invert_order(&self) -> Self {
        let universe = self.universe.inverted();
        Self {
            domain: self.domain,
            levels: self.levels.iter().map(|&r| self.universe.invert_rank(r)).collect(),
            universe: Arc::new(universe),
        }
    }
}

/// Dense ranks of arbitrary partially ordered values together with the index of
/// one representative per distinct value, in increasing order.
pub fn dense_ranks<T: PartialOrd + Copy>(values: &[T]) -> Result<(Vec<Rank>, Vec<usize>)> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(index) = values.iter().position(|v| v.partial_cmp(v).is_none()) {
        return Err(Error::UnorderedValue { index });
    }
    // value-index pairs sort far faster than indirect indices
    let mut order: Vec<(T, usize)> = values.iter().copied().zip(0..).collect();
    let mut bad = None;
    order.sort_unstable_by(|a, b| match a.0.partial_cmp(&b.0) {
        Some(Ordering::Equal) => a.1.cmp(&b.1),
        Some(o) => o,
        None => {
            bad.get_or_insert(a.1.max(b.1));
            a.1.cmp(&b.1)
        }
    });
    if let Some(index) = bad {
        return Err(Error::UnorderedValue { index });
    }
    let mut ranks = vec![0 as Rank; values.len()];
    let mut reps = Vec::new();
    for (k, &(v, i)) in order.iter().enumerate() {
        if k == 0 || order[k - 1].0 < v {
            reps.push(i);
        }
        ranks[i] = (reps.len() - 1) as Rank;
    }
    Ok((ranks, reps))
}

/// Quantizes raw values onto dense ranks; the universe keeps the sorted
/// distinct values as labels.
pub fn rank_quantize(values: &[f64], domain: Domain) -> Result<OrderedSequence> {
    let (ranks, reps) = dense_ranks(values)?;
    let labels = reps.iter().map(|&i| values[i]).collect();
    let universe = LevelUniverse::labeled(labels)?;
    Ok(OrderedSequence::from_parts_unchecked(ranks, Arc::new(universe), domain))
}

/// A set of sample positions of a sequence with `len()` samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSubset {
    domain: Domain,
    members: Vec<bool>,
}

impl IndexSubset {
    pub fn empty(n: usize, domain: Domain) -> Self {
        Self { domain, members: vec![false; n] }
    }

    pub fn total(n: usize, domain: Domain) -> Self {
        Self { domain, members: vec![true; n] }
    }

    /// Panics if an index is `>= n`.
    pub fn from_indices(n: usize, domain: Domain, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut members = vec![false; n];
        for i in indices {
            members[i] = true;
        }
        Self { domain, members }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Size `N` of the ambient index set.
    pub fn universe_len(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.get(i).copied().unwrap_or(false)
    }

    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&m| m)
    }

    pub fn is_total(&self) -> bool {
        self.members.iter().all(|&m| m)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().enumerate().filter_map(|(i, &m)| m.then_some(i))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self {
            domain: self.domain,
            members: self.members.iter().zip(&other.members).map(|(a, b)| *a || *b).collect(),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self {
            domain: self.domain,
            members: self.members.iter().zip(&other.members).map(|(a, b)| *a && *b).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.members.iter().zip(&other.members).all(|(a, b)| !*a || *b)
    }

    pub fn betti(&self) -> Betti {
        betti(self)
    }
}

/// Betti numbers of a subset of a linear or circular index set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Betti {
    pub b0: usize,
    pub b1: usize,
}

/// Counts adjacency-connected components and the (at most one) cycle.
pub fn betti(subset: &IndexSubset) -> Betti {
    let m = &subset.members;
    if m.is_empty() || subset.is_empty() {
        return Betti { b0: 0, b1: 0 };
    }
    if subset.is_total() {
        let b1 = usize::from(subset.domain.is_circular());
        return Betti { b0: 1, b1 };
    }
    let mut runs = m.iter().enumerate().filter(|&(i, &x)| x && (i == 0 || !m[i - 1])).count();
    if subset.domain.is_circular() && m[0] && m[m.len() - 1] {
        runs -= 1;
    }
    Betti { b0: runs, b1: 0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(v: &[Rank]) -> OrderedSequence {
        OrderedSequence::from_ranks_auto(v.to_vec(), Domain::Linear).unwrap()
    }

    #[test]
    fn quantize_dense_ranks() {
        let s = rank_quantize(&[3.2, 1.1, 3.2, 7.0], Domain::Linear).unwrap();
        assert_eq!(s.levels(), &[1, 0, 1, 2]);
        assert_eq!(s.universe().size(), 3);
        assert_eq!(s.universe().labels().unwrap(), &[1.1, 3.2, 7.0]);
        assert!(s.is_surjective());
    }

    #[test]
    fn quantize_constant_circular() {
        let s = rank_quantize(&[5.0, 5.0, 5.0], Domain::Circular).unwrap();
        assert_eq!(s.levels(), &[0, 0, 0]);
        assert_eq!(s.universe().size(), 1);
    }

    #[test]
    fn quantize_errors() {
        assert_eq!(rank_quantize(&[], Domain::Linear), Err(Error::EmptyInput));
        assert_eq!(
            rank_quantize(&[1.0, f64::NAN], Domain::Linear),
            Err(Error::UnorderedValue { index: 1 })
        );
    }

    #[test]
    fn monotone_relabel_keeps_ranks() {
        let raw = [0.3, -2.0, 0.3, 9.5, 4.0];
        let a = rank_quantize(&raw, Domain::Linear).unwrap();
        let g: Vec<f64> = raw.iter().map(|v| v.exp() * 3.0 + 1.0).collect();
        let b = rank_quantize(&g, Domain::Linear).unwrap();
        assert_eq!(a.levels(), b.levels());
    }

    #[test]
    fn level_sets() {
        let s = lin(&[1, 0, 1, 2]);
        assert_eq!(s.level_set(1).unwrap().iter().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(s.level_set(2).unwrap().iter().collect::<Vec<_>>(), vec![3]);
        assert!(s.sublevel_set(0).unwrap().is_empty());
        assert_eq!(s.sublevel_set(2).unwrap().iter().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert!(s.superlevel_set(2).unwrap().is_empty());
        assert_eq!(s.level_set(3), Err(Error::LevelOutOfRange { level: 3, size: 3 }));
        let c = lin(&[0, 0, 0]);
        assert!(c.level_set(0).unwrap().is_total());
    }

    #[test]
    fn invert_is_involution() {
        let s = lin(&[1, 0, 1, 2]);
        let inv = s.invert_order();
        assert_eq!(inv.levels(), &[1, 2, 1, 0]);
        assert_eq!(inv.invert_order(), s);
        let c = lin(&[0, 0, 0]);
        assert_eq!(c.invert_order().levels(), &[0, 0, 0]);
        let q = rank_quantize(&[1.0, 4.0, 2.0], Domain::Linear).unwrap();
        let qi = q.invert_order();
        assert_eq!(qi.universe().labels().unwrap(), &[4.0, 2.0, 1.0]);
        assert_eq!(qi.invert_order(), q);
    }

    #[test]
    fn betti_examples() {
        let a = IndexSubset::from_indices(5, Domain::Linear, [0, 1, 3]);
        assert_eq!(betti(&a), Betti { b0: 2, b1: 0 });
        let b = IndexSubset::total(4, Domain::Circular);
        assert_eq!(betti(&b), Betti { b0: 1, b1: 1 });
        let c = IndexSubset::from_indices(4, Domain::Circular, [0, 3]);
        assert_eq!(betti(&c), Betti { b0: 1, b1: 0 });
        assert_eq!(betti(&IndexSubset::empty(4, Domain::Circular)), Betti { b0: 0, b1: 0 });
        assert_eq!(betti(&IndexSubset::total(3, Domain::Linear)), Betti { b0: 1, b1: 0 });
    }

    #[test]
    fn normalize_restores_surjectivity() {
        let s = OrderedSequence::from_ranks(vec![4, 1, 4], 6, Domain::Linear).unwrap();
        assert!(!s.is_surjective());
        let n = s.normalize();
        assert_eq!(n.levels(), &[1, 0, 1]);
        assert!(n.is_surjective());
        let q = rank_quantize(&[1.0, 2.0, 3.0], Domain::Linear).unwrap();
        let frag = OrderedSequence::with_universe(vec![2, 0], q.universe().clone(), Domain::Linear)
            .unwrap();
        assert_eq!(frag.normalize().universe().labels().unwrap(), &[1.0, 3.0]);
    }

    #[test]
    fn circular_neighbours() {
        let s = OrderedSequence::from_ranks(vec![0], 1, Domain::Circular).unwrap();
        assert_eq!(s.prev(0), Some(0));
        assert_eq!(s.next(0), Some(0));
        let l = lin(&[0, 1]);
        assert_eq!(l.prev(0), None);
        assert_eq!(l.next(1), None);
    }
}

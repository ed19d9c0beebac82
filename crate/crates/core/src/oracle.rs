//! Naive reference implementations used to cross-check the engine. Nothing
//! here calls into `flats`, `filtration` or the DSU; every quantity is
//! recomputed by direct scans.

use petgraph::algo::connected_components;
use petgraph::graph::UnGraph;
use serde::{Deserialize, Serialize};

use crate::barcode::{barcode, sublevel_barcode, superlevel_barcode, Barcode, Rule};
use crate::domain::{Domain, IndexSubset, OrderedSequence, Rank};
use crate::error::{Error, Result};
use crate::filtration::Direction;

/// `true` when level `a` is included strictly before `b`.
fn ahead(direction: Direction, a: Rank, b: Rank) -> bool {
    match direction {
        Direction::Sub => a < b,
        Direction::Super => a > b,
    }
}

fn members(seq: &OrderedSequence, l: Rank, direction: Direction) -> Vec<bool> {
    seq.levels().iter().map(|&x| x == l || ahead(direction, x, l)).collect()
}

fn check_level(seq: &OrderedSequence, l: Rank) -> Result<()> {
    let size = seq.universe().size();
    if l >= size {
        return Err(Error::LevelOutOfRange { level: l, size });
    }
    Ok(())
}

/// Components of `{i | x[i] <= l}` (`Sub`) or `{i | x[i] >= l}` (`Super`),
/// counted as run starts.
pub fn brute_force_beta0(seq: &OrderedSequence, l: Rank, direction: Direction) -> Result<usize> {
    check_level(seq, l)?;
    let inside = members(seq, l, direction);
    let n = inside.len();
    let circular = seq.domain().is_circular();
    let starts = (0..n)
        .filter(|&i| {
            let prev = if i > 0 {
                inside[i - 1]
            } else {
                circular && inside[n - 1]
            };
            inside[i] && !prev
        })
        .count();
    if starts == 0 && inside.iter().all(|&b| b) {
        return Ok(1);
    }
    Ok(starts)
}

/// 1 exactly when the set is a whole circle.
pub fn brute_force_beta1(seq: &OrderedSequence, l: Rank, direction: Direction) -> Result<usize> {
    check_level(seq, l)?;
    let total = members(seq, l, direction).iter().all(|&b| b);
    Ok(usize::from(total && seq.domain().is_circular()))
}

/// Path (linear) or cycle (circular) graph induced on a subset of indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizedGraph {
    pub n: usize,
    pub domain: Domain,
    pub vertices: Vec<usize>,
    /// Unordered pairs `(j, k)` with `j < k`; no self-loops.
    pub edges: Vec<(usize, usize)>,
}

impl RealizedGraph {
    pub fn component_count(&self) -> usize {
        let mut g: UnGraph<usize, ()> = UnGraph::default();
        let mut node = vec![None; self.n];
        for &v in &self.vertices {
            node[v] = Some(g.add_node(v));
        }
        for &(a, b) in &self.edges {
            g.add_edge(node[a].expect("edge endpoint"), node[b].expect("edge endpoint"), ());
        }
        connected_components(&g)
    }

    pub fn is_subgraph_of(&self, other: &RealizedGraph) -> bool {
        self.vertices.iter().all(|v| other.vertices.binary_search(v).is_ok())
            && self.edges.iter().all(|e| other.edges.binary_search(e).is_ok())
    }
}

/// Keeps vertex `j` for each member and the edge `{j, k}` whenever both are
/// members and adjacent in the domain.
pub fn graph_realization(subset: &IndexSubset) -> RealizedGraph {
    let n = subset.universe_len();
    let domain = subset.domain();
    let vertices: Vec<usize> = subset.iter().collect();
    let mut edges = Vec::new();
    for &j in &vertices {
        let k = j + 1;
        if k < n && subset.contains(k) {
            edges.push((j, k));
        }
    }
    if domain.is_circular() && n > 2 && subset.contains(0) && subset.contains(n - 1) {
        edges.push((0, n - 1));
    }
    edges.sort_unstable();
    RealizedGraph { n, domain, vertices, edges }
}

/// A bar reduced to the fields every rule and direction agree on.
pub type BarSignature = (Rank, Rank, usize, bool);

pub fn signature(bc: &Barcode) -> Vec<BarSignature> {
    let mut v: Vec<BarSignature> = bc
        .bars
        .iter()
        .map(|b| (b.birth_level, b.death_level, b.birth_index, b.essential))
        .collect();
    v.sort_unstable();
    v
}

/// Maximal equal runs as `(start, len, level)`, found by walking the domain.
fn runs(seq: &OrderedSequence) -> Vec<(usize, usize, Rank)> {
    let x = seq.levels();
    let n = x.len();
    let circular = seq.domain().is_circular();
    let opens = |i: usize| match (i, circular) {
        (0, false) => true,
        (0, true) => x[n - 1] != x[0],
        _ => x[i - 1] != x[i],
    };
    let starts: Vec<usize> = (0..n).filter(|&i| opens(i)).collect();
    if starts.is_empty() {
        return vec![(0, n, x[0])];
    }
    starts
        .iter()
        .map(|&s| {
            let mut len = 1;
            while len < n && (circular || s + len < n) && x[(s + len) % n] == x[s] {
                len += 1;
            }
            (s, len, x[s])
        })
        .collect()
}

/// Elder or local barcode computed directly in the requested direction.
pub fn naive_barcode(seq: &OrderedSequence, rule: Rule, direction: Direction) -> Vec<BarSignature> {
    let mut bars = match rule {
        Rule::ElderLeftmost => naive_elder(seq, direction),
        Rule::LocalNeighbor => naive_local(seq, direction),
    };
    bars.sort_unstable();
    bars
}

fn naive_elder(seq: &OrderedSequence, direction: Direction) -> Vec<BarSignature> {
    let n = seq.len();
    let circular = seq.domain().is_circular();
    let mut rs = runs(seq);
    rs.sort_by(|a, b| {
        if ahead(direction, a.2, b.2) {
            std::cmp::Ordering::Less
        } else if ahead(direction, b.2, a.2) {
            std::cmp::Ordering::Greater
        } else {
            a.0.cmp(&b.0)
        }
    });
    // component label per sample; components hold (birth level, birth index)
    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut comps: Vec<(Rank, usize)> = Vec::new();
    let mut bars = Vec::new();
    let mut last_level = rs[0].2;
    for &(s, len, level) in &rs {
        last_level = level;
        let before = if s > 0 {
            Some(s - 1)
        } else {
            circular.then_some(n - 1)
        };
        let e = (s + len - 1) % n;
        let after = if e + 1 < n {
            Some(e + 1)
        } else {
            circular.then_some(0)
        };
        let mut found: Vec<usize> = [before, after]
            .into_iter()
            .flatten()
            .filter(|&i| len < n && !(s..s + len).any(|k| k % n == i))
            .filter_map(|i| label[i])
            .collect();
        found.sort_unstable();
        found.dedup();
        let target = match found.as_slice() {
            [] => {
                comps.push((level, s));
                comps.len() - 1
            }
            [c] => *c,
            [a, b] => {
                let (ca, cb) = (comps[*a], comps[*b]);
                let a_survives = ahead(direction, ca.0, cb.0) || (ca.0 == cb.0 && ca.1 < cb.1);
                let (keep, lose) = if a_survives { (*a, *b) } else { (*b, *a) };
                bars.push((comps[lose].0, level, comps[lose].1, false));
                for l in label.iter_mut() {
                    if *l == Some(lose) {
                        *l = Some(keep);
                    }
                }
                keep
            }
            _ => unreachable!(),
        };
        for k in s..s + len {
            label[k % n] = Some(target);
        }
    }
    let survivor = label[0].expect("everything included");
    bars.push((comps[survivor].0, last_level, comps[survivor].1, true));
    bars
}

fn naive_local(seq: &OrderedSequence, direction: Direction) -> Vec<BarSignature> {
    let rs = runs(seq);
    let k = rs.len();
    let circular = seq.domain().is_circular();
    let closure = rs
        .iter()
        .map(|r| r.2)
        .reduce(|a, b| if ahead(direction, a, b) { b } else { a })
        .expect("non-empty");
    if k == 1 {
        return vec![(rs[0].2, rs[0].2, 0, true)];
    }
    // (is_min, level, start); boundary maxima are dropped
    let mut ext: Vec<(bool, Rank, usize)> = Vec::new();
    for i in 0..k {
        let nbrs: Vec<Rank> = if circular {
            vec![rs[(i + k - 1) % k].2, rs[(i + 1) % k].2]
        } else {
            [i.checked_sub(1), (i + 1 < k).then_some(i + 1)]
                .into_iter()
                .flatten()
                .map(|j| rs[j].2)
                .collect()
        };
        let level = rs[i].2;
        let is_min = nbrs.iter().all(|&v| ahead(direction, level, v));
        let is_max = nbrs.iter().all(|&v| ahead(direction, v, level));
        if is_min || (is_max && nbrs.len() == 2) {
            ext.push((is_min, level, rs[i].0));
        }
    }
    let g = (0..ext.len())
        .filter(|&i| !ext[i].0)
        .reduce(|a, b| {
            if ahead(direction, ext[a].1, ext[b].1) || (ext[a].1 == ext[b].1 && ext[b].2 < ext[a].2) {
                b
            } else {
                a
            }
        });
    let m = ext.len();
    let mut bars = Vec::new();
    for i in (0..m).filter(|&i| ext[i].0) {
        let partner = match g {
            None => None,
            Some(g) if circular => Some((i + 1) % m).filter(|&j| j != g),
            Some(g) if i + 1 == g => None,
            Some(g) if i < g => Some(i + 1),
            Some(_) => Some(i - 1),
        };
        bars.push(match partner {
            Some(j) => (ext[i].1, ext[j].1, ext[i].2, false),
            None => (ext[i].1, closure, ext[i].2, true),
        });
    }
    bars
}

/// Sublevel barcode of the inverted order, levels mapped back, agrees with
/// the superlevel barcode bar for bar, and with a direct superlevel run.
pub fn verify_order_inversion(seq: &OrderedSequence, rule: Rule) -> bool {
    let top = seq.universe().size() - 1;
    let mut via_inversion = sublevel_barcode(&seq.invert_order(), rule);
    for b in &mut via_inversion.bars {
        b.birth_level = top - b.birth_level;
        b.death_level = top - b.death_level;
    }
    via_inversion.direction = Direction::Super;
    let direct = superlevel_barcode(seq, rule);
    via_inversion == direct && signature(&direct) == naive_barcode(seq, rule, Direction::Super)
}

/// On a circle the elder sublevel bars `(b, d)` are exactly the elder
/// superlevel bars `(d, b)` as level multisets. The local rule is not
/// self-dual under this swap.
pub fn verify_circular_symmetry(seq: &OrderedSequence) -> Result<bool> {
    let rule = Rule::ElderLeftmost;
    if !seq.domain().is_circular() {
        return Err(Error::WrongDomain { expected: "circular" });
    }
    let sub = sublevel_barcode(seq, rule).level_multiset();
    let mut sup: Vec<(Rank, Rank, bool)> = superlevel_barcode(seq, rule)
        .bars
        .iter()
        .map(|b| (b.death_level, b.birth_level, b.essential))
        .collect();
    sup.sort_unstable();
    Ok(sub == sup)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    NotApplicable,
}

/// Linear-domain symmetry: when exactly one end sample is a minimum and, for
/// more than two extrema, each end level is also the level of another
/// extremum of the same type, every sublevel birth level is a superlevel death
/// level. Birth and death levels do not depend on the rule.
pub fn verify_linear_symmetry(seq: &OrderedSequence) -> Verdict {
    let rule = Rule::ElderLeftmost;
    if seq.domain().is_circular() {
        return Verdict::NotApplicable;
    }
    let rs = runs(seq);
    let k = rs.len();
    if k == 1 {
        return Verdict::Holds;
    }
    // extremum type per run: Some(true) min, Some(false) max, None step
    let kind = |i: usize| -> Option<bool> {
        let l = rs[i].2;
        let nb: Vec<Rank> =
            [i.checked_sub(1), (i + 1 < k).then_some(i + 1)].into_iter().flatten().map(|j| rs[j].2).collect();
        if nb.iter().all(|&v| v > l) {
            Some(true)
        } else if nb.iter().all(|&v| v < l) {
            Some(false)
        } else {
            None
        }
    };
    let kinds: Vec<Option<bool>> = (0..k).map(kind).collect();
    if kinds[0].unwrap_or(false) == kinds[k - 1].unwrap_or(false) {
        return Verdict::NotApplicable;
    }
    let extrema = kinds.iter().filter(|c| c.is_some()).count();
    if extrema > 2 {
        for end in [0, k - 1] {
            let ty = kinds[end];
            let partner = (0..k).any(|j| j != end && kinds[j] == ty && rs[j].2 == rs[end].2);
            if !partner {
                return Verdict::NotApplicable;
            }
        }
    }
    let births: Vec<Rank> = sublevel_barcode(seq, rule).bars.iter().map(|b| b.birth_level).collect();
    let deaths: Vec<Rank> = superlevel_barcode(seq, rule).bars.iter().map(|b| b.death_level).collect();
    if births.iter().all(|b| deaths.contains(b)) {
        Verdict::Holds
    } else {
        Verdict::Fails
    }
}

/// Level, strict sublevel and strict superlevel sets partition the domain at
/// every level; nothing lies strictly below the global minimum or above the
/// global maximum.
pub fn verify_trisection(seq: &OrderedSequence) -> bool {
    let n = seq.len();
    let size = seq.universe().size();
    let total = IndexSubset::total(n, seq.domain());
    let sets = |l| -> Option<[IndexSubset; 3]> {
        Some([seq.sublevel_set(l).ok()?, seq.level_set(l).ok()?, seq.superlevel_set(l).ok()?])
    };
    for l in 0..size {
        let Some([below, at, above]) = sets(l) else { return false };
        let direct = |pred: &dyn Fn(Rank) -> bool| {
            IndexSubset::from_indices(n, seq.domain(), (0..n).filter(|&i| pred(seq.level(i))))
        };
        if below != direct(&|x| x < l) || at != direct(&|x| x == l) || above != direct(&|x| x > l) {
            return false;
        }
        let disjoint = below.intersection(&at).is_empty()
            && below.intersection(&above).is_empty()
            && at.intersection(&above).is_empty();
        if !disjoint || below.union(&at).union(&above) != total {
            return false;
        }
    }
    let (lo, hi) = (seq.min_level(), seq.max_level());
    seq.sublevel_set(lo).is_ok_and(|s| s.is_empty()) && seq.superlevel_set(hi).is_ok_and(|s| s.is_empty())
}

/// Per level, engine bars alive equal the brute-force component count.
pub fn verify_bars_alive(seq: &OrderedSequence, rule: Rule, direction: Direction) -> bool {
    let bc = barcode(seq, rule, direction);
    (0..seq.universe().size()).all(|l| {
        let attained = seq.levels().contains(&l);
        !attained || brute_force_beta0(seq, l, direction).is_ok_and(|b| b == bc.alive_after(l))
    })
}

//! Sublevel / superlevel filtration with within-level subfiltration.
//!
//! Levels are swept in ascending order. Inside one level the connected
//! components of the level set (the flats) are included one at a time in
//! ascending order of their start index. Component bookkeeping runs on a
//! disjoint-set forest over flats, so the sweep is linear in the number of
//! flats apart from the sort by level.

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, OrderedSequence, Rank};
use crate::dsu::DisjointSet;
use crate::flats::{classify_flats, Flat, FlatClass};

/// Which filtration to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Sublevel sets, ascending levels.
    Sub,
    /// Superlevel sets, descending levels.
    Super,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Birth,
    Merge,
    Growth,
}

/// One inclusion step of the within-level filtration; one per flat.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationEvent {
    pub kind: EventKind,
    pub level: Rank,
    /// Position of the flat in the positional flat list.
    pub flat: usize,
    pub flat_start: usize,
    pub class: FlatClass,
    pub beta0_after: usize,
    pub beta1_after: usize,
    /// Merge-tree node ids of the components joined by a `Merge`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub merged_component_ids: Option<[usize; 2]>,
    /// Set on the growth step that joins a circular component with itself.
    pub closes_cycle: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeNode {
    pub id: usize,
    pub level: Rank,
    pub representative_index: usize,
    pub children: Vec<usize>,
}

impl MergeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Rooted, not necessarily binary tree of births (leaves) and merges.
///
/// Children always carry smaller ids than their parent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeTree {
    pub direction: Direction,
    pub domain: Domain,
    pub nodes: Vec<MergeNode>,
    pub root: Option<usize>,
    /// Level at which the whole domain is included (maximum for `Sub`,
    /// minimum for `Super`); essential bars end here.
    pub closure_level: Rank,
    /// Start of the left-most flat at `closure_level`.
    pub closure_index: usize,
}

impl MergeTree {
    pub fn leaves(&self) -> impl Iterator<Item = &MergeNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    pub fn interior(&self) -> impl Iterator<Item = &MergeNode> {
        self.nodes.iter().filter(|n| !n.is_leaf())
    }

    pub fn node(&self, id: usize) -> &MergeNode {
        &self.nodes[id]
    }
}

/// Trace, tree and the classified flats a filtration ran over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    pub direction: Direction,
    pub domain: Domain,
    /// Classified in the original order of levels.
    pub flats: Vec<Flat>,
    pub trace: Vec<FiltrationEvent>,
    pub tree: MergeTree,
}

impl Filtration {
    /// `beta0_after` of the last event at each processed level, in processing
    /// order.
    pub fn beta0_by_level(&self) -> Vec<(Rank, usize)> {
        let mut out: Vec<(Rank, usize)> = Vec::new();
        for e in &self.trace {
            match out.last_mut() {
                Some(last) if last.0 == e.level => last.1 = e.beta0_after,
                _ => out.push((e.level, e.beta0_after)),
            }
        }
        out
    }
}

/// Runs the filtration. `Super` runs `Sub` on the inverted order and maps
/// levels and classes back.
pub fn run_filtration(seq: &OrderedSequence, direction: Direction) -> Filtration {
    match direction {
        Direction::Sub => {
            let flats = classify_flats(seq);
            let units: Vec<Unit> = flats.iter().map(Unit::from).collect();
            let (trace, tree) = sweep(&units, seq.domain(), Direction::Sub);
            Filtration { direction, domain: seq.domain(), flats, trace, tree }
        }
        Direction::Super => {
            let inv = seq.invert_order();
            let sub = run_filtration(&inv, Direction::Sub);
            let top = seq.universe().size() - 1;
            let flip = |r: Rank| top - r;
            let flats = sub
                .flats
                .iter()
                .map(|f| Flat { level: flip(f.level), class: f.class.inverted(), ..*f })
                .collect();
            let trace = sub
                .trace
                .into_iter()
                .map(|e| FiltrationEvent { level: flip(e.level), class: e.class.inverted(), ..e })
                .collect();
            let mut tree = sub.tree;
            tree.direction = Direction::Super;
            tree.closure_level = flip(tree.closure_level);
            for n in &mut tree.nodes {
                n.level = flip(n.level);
            }
            Filtration { direction, domain: seq.domain(), flats, trace, tree }
        }
    }
}

/// Checks `beta0(L<=l) = beta0(L<l) + #minima - #interior maxima` level by
/// level from the flat classes recorded in the trace. On a circular domain the
/// maximum that closes the cycle does not merge and is discounted at the final
/// level.
pub fn beta0_balance_check(filtration: &Filtration) -> bool {
    let sub_class = |c: FlatClass| match filtration.direction {
        Direction::Sub => c,
        Direction::Super => c.inverted(),
    };
    let nonconstant = filtration.trace.len() > 1;
    let mut prev = 0isize;
    let mut i = 0;
    let trace = &filtration.trace;
    while i < trace.len() {
        let level = trace[i].level;
        let mut j = i;
        let mut expected = 0isize;
        while j < trace.len() && trace[j].level == level {
            let c = sub_class(trace[j].class);
            if c.is_min() {
                expected += 1;
            }
            if c.is_interior_max() {
                expected -= 1;
            }
            j += 1;
        }
        let last_level = j == trace.len();
        if last_level && filtration.domain.is_circular() && nonconstant {
            expected += 1;
        }
        let now = trace[j - 1].beta0_after as isize;
        if now - prev != expected {
            return false;
        }
        prev = now;
        i = j;
    }
    true
}

/// A filtration step: a flat, or an extremum box of a box snake.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Unit {
    pub level: Rank,
    pub start: usize,
    pub class: FlatClass,
}

impl From<&Flat> for Unit {
    fn from(f: &Flat) -> Self {
        Unit { level: f.level, start: f.start, class: f.class }
    }
}

/// Sublevel sweep over units in positional (cyclic, for circular domains)
/// order. Neighbouring units must have distinct levels.
pub(crate) fn sweep(
    units: &[Unit],
    domain: Domain,
    direction: Direction,
) -> (Vec<FiltrationEvent>, MergeTree) {
    let k = units.len();
    let circular = domain.is_circular();
    let neighbour = |p: usize, left: bool| -> Option<usize> {
        if k == 1 {
            None
        } else if left {
            if p > 0 {
                Some(p - 1)
            } else if circular {
                Some(k - 1)
            } else {
                None
            }
        } else if p + 1 < k {
            Some(p + 1)
        } else if circular {
            Some(0)
        } else {
            None
        }
    };

    let order = processing_order(units);
    let mut dsu = DisjointSet::with_capacity(k);
    for _ in 0..k {
        dsu.make_set();
    }
    let mut included = vec![false; k];
    // merge-tree node currently heading each component, indexed by dsu root
    let mut top = vec![usize::MAX; k];
    let mut builder = TreeBuilder::default();
    let mut trace = Vec::with_capacity(k);
    let mut beta0 = 0usize;
    let mut beta1 = 0usize;

    for &p in &order {
        let u = units[p];
        let mut lower = [0usize; 2];
        let mut count = 0;
        for q in [neighbour(p, true), neighbour(p, false)].into_iter().flatten() {
            if included[q] {
                lower[count] = q;
                count += 1;
            }
        }
        included[p] = true;
        let mut event = FiltrationEvent {
            kind: EventKind::Growth,
            level: u.level,
            flat: p,
            flat_start: u.start,
            class: u.class,
            beta0_after: 0,
            beta1_after: 0,
            merged_component_ids: None,
            closes_cycle: false,
        };
        match &lower[..count] {
            [] => {
                event.kind = EventKind::Birth;
                top[p] = builder.leaf(u.level, u.start);
                beta0 += 1;
                if k == 1 && circular {
                    // a constant circle is already the total set
                    beta1 = 1;
                }
            }
            [q] => {
                let r = dsu.find(*q);
                let t = top[r];
                let nr = dsu.union(p, r).expect("fresh unit joins an existing component");
                top[nr] = t;
            }
            [a, b] => {
                let (ra, rb) = (dsu.find(*a), dsu.find(*b));
                if ra == rb {
                    dsu.union(p, ra);
                    let nr = dsu.find(p);
                    top[nr] = top[ra];
                    event.closes_cycle = true;
                    beta1 = 1;
                } else {
                    let (ta, tb) = (top[ra], top[rb]);
                    event.kind = EventKind::Merge;
                    event.merged_component_ids = Some([ta, tb]);
                    let t = builder.merge(u.level, u.start, ta, tb);
                    dsu.union(ra, rb);
                    dsu.union(p, ra);
                    let nr = dsu.find(p);
                    top[nr] = t;
                    beta0 -= 1;
                }
            }
            _ => unreachable!("a unit has at most two neighbours"),
        }
        event.beta0_after = beta0;
        event.beta1_after = beta1;
        trace.push(event);
    }

    let root_top = order.last().map(|&p| top[dsu.find(p)]);
    let (nodes, remap) = builder.finish();
    for e in &mut trace {
        for id in e.merged_component_ids.iter_mut().flatten() {
            *id = remap[*id];
        }
    }
    let (closure_level, closure_index) = units
        .iter()
        .map(|u| (u.level, u.start))
        .fold((0, usize::MAX), |(bl, bi), (l, s)| {
            if l > bl || (l == bl && s < bi) {
                (l, s)
            } else {
                (bl, bi)
            }
        });
    let tree = MergeTree {
        direction,
        domain,
        nodes,
        root: root_top.map(|t| remap[t]),
        closure_level,
        closure_index,
    };
    (trace, tree)
}

fn processing_order(units: &[Unit]) -> Vec<usize> {
    let k = units.len();
    let max = units.iter().map(|u| u.level).max().unwrap_or(0) as usize;
    if max <= 4 * k + 16 {
        // counting sort; stable, so positional (= start) order within a level
        let mut counts = vec![0usize; max + 2];
        for u in units {
            counts[u.level as usize + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut order = vec![0usize; k];
        for (p, u) in units.iter().enumerate() {
            let slot = &mut counts[u.level as usize];
            order[*slot] = p;
            *slot += 1;
        }
        order
    } else {
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&p| (units[p].level, units[p].start));
        order
    }
}

#[derive(Debug)]
struct NodeBuf {
    level: Rank,
    rep: usize,
    children: Vec<usize>,
    interior: bool,
    forward: Option<usize>,
}

/// Incremental merge-tree construction. Merges at one level that touch a
/// node already created at that level extend it rather than stacking.
#[derive(Debug, Default)]
pub(crate) struct TreeBuilder {
    nodes: Vec<NodeBuf>,
}

impl TreeBuilder {
    pub fn leaf(&mut self, level: Rank, rep: usize) -> usize {
        self.nodes.push(NodeBuf { level, rep, children: Vec::new(), interior: false, forward: None });
        self.nodes.len() - 1
    }

    fn fresh_interior(&self, id: usize, level: Rank) -> bool {
        let n = &self.nodes[id];
        n.interior && n.level == level
    }

    pub fn merge(&mut self, level: Rank, rep: usize, a: usize, b: usize) -> usize {
        match (self.fresh_interior(a, level), self.fresh_interior(b, level)) {
            (true, true) => {
                let (keep, drop) = (a.min(b), a.max(b));
                let moved = std::mem::take(&mut self.nodes[drop].children);
                self.nodes[keep].children.extend(moved);
                self.nodes[drop].forward = Some(keep);
                keep
            }
            (true, false) => {
                self.nodes[a].children.push(b);
                a
            }
            (false, true) => {
                self.nodes[b].children.push(a);
                b
            }
            (false, false) => {
                self.nodes.push(NodeBuf {
                    level,
                    rep,
                    children: vec![a, b],
                    interior: true,
                    forward: None,
                });
                self.nodes.len() - 1
            }
        }
    }

    /// Drops absorbed nodes and renumbers; returns the nodes and a map from
    /// builder ids (absorbed ones included) to final ids.
    pub fn finish(self) -> (Vec<MergeNode>, Vec<usize>) {
        let n = self.nodes.len();
        let mut remap = vec![usize::MAX; n];
        let mut next = 0;
        for (i, node) in self.nodes.iter().enumerate() {
            if node.forward.is_none() {
                remap[i] = next;
                next += 1;
            }
        }
        for i in 0..n {
            if remap[i] == usize::MAX {
                let mut j = i;
                while let Some(f) = self.nodes[j].forward {
                    j = f;
                }
                remap[i] = remap[j];
            }
        }
        let nodes = self
            .nodes
            .into_iter()
            .enumerate()
            .filter(|(_, nb)| nb.forward.is_none())
            .map(|(i, nb)| {
                let mut children: Vec<usize> = nb.children.iter().map(|&c| remap[c]).collect();
                children.sort_unstable();
                MergeNode { id: remap[i], level: nb.level, representative_index: nb.rep, children }
            })
            .collect();
        (nodes, remap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[Rank], d: Domain) -> OrderedSequence {
        OrderedSequence::from_ranks_auto(v.to_vec(), d).unwrap()
    }

    /// Direct scan of beta0 on `{ i | x[i] <= l }`.
    fn scan_beta0(v: &[Rank], l: Rank, circular: bool) -> usize {
        let inside: Vec<bool> = v.iter().map(|&x| x <= l).collect();
        if inside.iter().all(|&b| b) {
            return 1;
        }
        let n = v.len();
        let mut c = (0..n).filter(|&i| inside[i] && (i == 0 || !inside[i - 1])).count();
        if circular && inside[0] && inside[n - 1] {
            c -= 1;
        }
        c
    }

    #[test]
    fn two_components_at_every_level() {
        let v = [0, 2, 0, 3, 2, 3, 0];
        let f = run_filtration(&seq(&v, Domain::Linear), Direction::Sub);
        let by_level = f.beta0_by_level();
        for &(l, b) in &by_level {
            assert_eq!(b, scan_beta0(&v, l, false));
        }
        assert_eq!(by_level, vec![(0, 3), (2, 3), (3, 1)]);
        assert!(beta0_balance_check(&f));
        let level2: Vec<_> = f.trace.iter().filter(|e| e.level == 2).map(|e| e.kind).collect();
        assert_eq!(level2, vec![EventKind::Merge, EventKind::Birth]);
    }

    #[test]
    fn monotone_single_leaf() {
        let f = run_filtration(&seq(&[0, 1, 2, 3], Domain::Linear), Direction::Sub);
        let kinds: Vec<_> = f.trace.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, vec![EventKind::Birth, EventKind::Growth, EventKind::Growth, EventKind::Growth]);
        assert_eq!(f.tree.nodes.len(), 1);
        assert_eq!(f.tree.root, Some(0));
        assert_eq!(f.tree.closure_level, 3);
    }

    #[test]
    fn circular_alternating() {
        let f = run_filtration(&seq(&[0, 1, 0, 1], Domain::Circular), Direction::Sub);
        let births = f.trace.iter().filter(|e| e.kind == EventKind::Birth).count();
        assert_eq!(births, 2);
        let closing: Vec<_> = f.trace.iter().filter(|e| e.closes_cycle).collect();
        assert_eq!(closing.len(), 1);
        assert_eq!(closing[0].flat_start, 3);
        let last = f.trace.last().unwrap();
        assert_eq!((last.beta0_after, last.beta1_after), (1, 1));
        let root = f.tree.node(f.tree.root.unwrap());
        assert_eq!(root.level, 1);
        assert_eq!(root.children.len(), 2);
        assert_eq!(root.representative_index, 1);
        assert!(beta0_balance_check(&f));
    }

    #[test]
    fn balance_examples() {
        for (v, d) in [
            (&[5u32, 5, 5][..], Domain::Linear),
            (&[0, 1, 0][..], Domain::Linear),
            (&[0, 1, 0, 2, 0][..], Domain::Circular),
        ] {
            let f = run_filtration(&seq(v, d), Direction::Sub);
            assert!(beta0_balance_check(&f), "{v:?}");
        }
        let f = run_filtration(&seq(&[0, 1, 0], Domain::Linear), Direction::Sub);
        assert_eq!(f.beta0_by_level(), vec![(0, 2), (1, 1)]);
    }

    #[test]
    fn tampered_trace_fails_balance() {
        let mut f = run_filtration(&seq(&[0, 2, 0, 1], Domain::Linear), Direction::Sub);
        let last = f.trace.len() - 1;
        f.trace[last].beta0_after += 1;
        assert!(!beta0_balance_check(&f));
    }

    #[test]
    fn same_level_merges_share_a_node() {
        // three minima at 0 merged by two maxima at 1
        let f = run_filtration(&seq(&[0, 1, 0, 1, 0, 2], Domain::Linear), Direction::Sub);
        let interior: Vec<_> = f.tree.interior().collect();
        assert_eq!(interior.len(), 1);
        assert_eq!(interior[0].children.len(), 3);
        assert_eq!(interior[0].representative_index, 1);
    }

    #[test]
    fn superlevel_maps_back() {
        let s = seq(&[0, 2, 1, 3], Domain::Linear);
        let sup = run_filtration(&s, Direction::Super);
        let births: Vec<_> = sup
            .trace
            .iter()
            .filter(|e| e.kind == EventKind::Birth)
            .map(|e| (e.level, e.class))
            .collect();
        assert_eq!(births, vec![(3, FlatClass::BoundaryMax), (2, FlatClass::LocalMax)]);
        assert_eq!(sup.tree.closure_level, 0);
        assert!(beta0_balance_check(&sup));
    }

    #[test]
    fn constant_is_single_birth() {
        for d in [Domain::Linear, Domain::Circular] {
            let f = run_filtration(&seq(&[0, 0, 0], d), Direction::Sub);
            assert_eq!(f.trace.len(), 1);
            assert_eq!(f.trace[0].kind, EventKind::Birth);
            assert_eq!(f.trace[0].beta1_after, usize::from(d.is_circular()));
        }
    }
}

//! Barcodes from merge trees: elder rule with left-most tribal council, and
//! the local neighbour rule.

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, LevelUniverse, OrderedSequence, Rank};
use crate::error::{Error, Result};
use crate::filtration::{run_filtration, sweep, Direction, MergeTree, Unit};
use crate::flats::classify_flats;

/// Bar construction rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// Lowest minimum survives a merge; ties go to the left-most birth.
    #[serde(rename = "elder")]
    ElderLeftmost,
    /// Every minimum pairs with a neighbouring interior maximum, oriented
    /// towards the left-most global interior maximum.
    #[serde(rename = "local")]
    LocalNeighbor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bar {
    pub birth_level: Rank,
    pub death_level: Rank,
    /// Start of the minimum flat (maximum flat for superlevel bars).
    pub birth_index: usize,
    /// Start of the killing flat; for the essential bar, the left-most flat at
    /// the closure level.
    pub death_index: usize,
    pub essential: bool,
}

impl Bar {
    /// Bars with equal endpoints are kept; only a constant sequence produces
    /// one.
    pub fn is_zero_length(&self) -> bool {
        self.birth_level == self.death_level
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Barcode {
    pub rule: Rule,
    pub direction: Direction,
    pub domain: Domain,
    /// Ordered by birth index.
    pub bars: Vec<Bar>,
}

impl Barcode {
    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn essential(&self) -> Option<&Bar> {
        self.bars.iter().find(|b| b.essential)
    }

    /// Sorted `(birth, death, essential)` triples, indices dropped.
    pub fn level_multiset(&self) -> Vec<(Rank, Rank, bool)> {
        let mut v: Vec<_> =
            self.bars.iter().map(|b| (b.birth_level, b.death_level, b.essential)).collect();
        v.sort_unstable();
        v
    }

    /// Number of bars alive once level `l` has been fully included.
    pub fn alive_after(&self, l: Rank) -> usize {
        // `before(a, b)`: a is included no later than b in this direction
        let before = |a: Rank, b: Rank| match self.direction {
            Direction::Sub => a <= b,
            Direction::Super => a >= b,
        };
        self.bars
            .iter()
            .filter(|b| before(b.birth_level, l) && (b.essential || !before(b.death_level, l)))
            .count()
    }

    /// Label-space bars; fails when the universe carries no labels.
    pub fn label_bars(&self, universe: &LevelUniverse) -> Result<Vec<LabeledBar>> {
        self.bars
            .iter()
            .map(|b| {
                Ok(LabeledBar {
                    birth: universe.label(b.birth_level).ok_or(Error::NonNumericLabels)?,
                    death: universe.label(b.death_level).ok_or(Error::NonNumericLabels)?,
                    essential: b.essential,
                })
            })
            .collect()
    }

    pub(crate) fn sort(&mut self) {
        self.bars.sort_by_key(|b| (b.birth_index, b.death_index));
    }
}

/// A bar with endpoints in label (original value) space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledBar {
    pub birth: f64,
    pub death: f64,
    pub essential: bool,
}

/// Offsetting the function by `v` shifts every bar: `(b, d) -> (b+v, d+v)`.
/// Rank-space bars are untouched by any order-preserving map.
pub fn transform_offset(bars: &[LabeledBar], v: f64) -> Vec<LabeledBar> {
    bars.iter()
        .map(|b| LabeledBar { birth: b.birth + v, death: b.death + v, ..*b })
        .collect()
}

/// Negating the offset function on a circular domain:
/// `(b, d) -> (-(d+v), -(b+v))`.
pub fn transform_negate_offset(bars: &[LabeledBar], v: f64) -> Vec<LabeledBar> {
    bars.iter()
        .map(|b| LabeledBar { birth: -(b.death + v), death: -(b.birth + v), ..*b })
        .collect()
}

/// Label-space offset of a rank barcode.
pub fn barcode_offset(
    barcode: &Barcode,
    universe: &LevelUniverse,
    v: f64,
) -> Result<Vec<LabeledBar>> {
    Ok(transform_offset(&barcode.label_bars(universe)?, v))
}

/// Elder rule over a merge tree. At every interior node the child subtree with
/// the lowest (highest, for superlevel trees) leaf survives, ties broken by
/// the smallest birth index.
pub fn barcode_elder(tree: &MergeTree) -> Barcode {
    let key = |level: Rank| match tree.direction {
        Direction::Sub => level as i64,
        Direction::Super => -(level as i64),
    };
    // survivor per node: (order key, birth index, birth level)
    let mut survivor: Vec<(i64, usize, Rank)> = Vec::with_capacity(tree.nodes.len());
    let mut bars = Vec::with_capacity(tree.nodes.len() / 2 + 1);
    for node in &tree.nodes {
        debug_assert_eq!(node.id, survivor.len());
        if node.is_leaf() {
            survivor.push((key(node.level), node.representative_index, node.level));
            continue;
        }
        let best = node
            .children
            .iter()
            .map(|&c| survivor[c])
            .min()
            .expect("interior nodes have children");
        for &c in &node.children {
            let s = survivor[c];
            if s != best {
                bars.push(Bar {
                    birth_level: s.2,
                    death_level: node.level,
                    birth_index: s.1,
                    death_index: node.representative_index,
                    essential: false,
                });
            }
        }
        survivor.push(best);
    }
    if let Some(root) = tree.root {
        let s = survivor[root];
        bars.push(Bar {
            birth_level: s.2,
            death_level: tree.closure_level,
            birth_index: s.1,
            death_index: tree.closure_index,
            essential: true,
        });
    }
    let mut bc =
        Barcode { rule: Rule::ElderLeftmost, direction: tree.direction, domain: tree.domain, bars };
    bc.sort();
    bc
}

/// An extremum seen by the local rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Extremum {
    pub is_min: bool,
    pub level: Rank,
    pub start: usize,
}

/// Pairs each minimum of an alternating extremum list (boundary maxima already
/// removed) with a neighbouring maximum. `None` marks the essential minimum.
pub(crate) fn local_pairs(ext: &[Extremum], circular: bool) -> Vec<(usize, Option<usize>)> {
    let g = ext
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.is_min)
        .min_by_key(|(_, e)| (std::cmp::Reverse(e.level), e.start))
        .map(|(i, _)| i);
    let Some(g) = g else {
        return ext.iter().enumerate().filter(|(_, e)| e.is_min).map(|(i, _)| (i, None)).collect();
    };
    let k = ext.len();
    let mut pairs = Vec::with_capacity(k / 2 + 1);
    for (i, e) in ext.iter().enumerate() {
        if !e.is_min {
            continue;
        }
        if circular {
            let right = (i + 1) % k;
            pairs.push((i, (right != g).then_some(right)));
        } else if i + 1 == g {
            pairs.push((i, None));
        } else if i < g {
            pairs.push((i, Some(i + 1)));
        } else {
            pairs.push((i, Some(i - 1)));
        }
    }
    pairs
}

pub(crate) fn bars_from_pairs(
    ext: &[Extremum],
    pairs: &[(usize, Option<usize>)],
    closure_level: Rank,
    closure_index: usize,
) -> Vec<Bar> {
    pairs
        .iter()
        .map(|&(m, partner)| {
            let min = ext[m];
            match partner {
                Some(x) => Bar {
                    birth_level: min.level,
                    death_level: ext[x].level,
                    birth_index: min.start,
                    death_index: ext[x].start,
                    essential: false,
                },
                None => Bar {
                    birth_level: min.level,
                    death_level: closure_level,
                    birth_index: min.start,
                    death_index: closure_index,
                    essential: true,
                },
            }
        })
        .collect()
}

/// Local neighbour rule. The left-most global interior maximum fixes the
/// orientation: minima left of it pair with their right neighbouring interior
/// maximum, minima right of it with their left one, and the minimum directly
/// left of it carries the essential bar. On a circle every minimum pairs to
/// the right. A sequence without interior maxima has a single, essential bar.
pub fn barcode_local(seq: &OrderedSequence, tree: &MergeTree) -> Barcode {
    if tree.direction == Direction::Super {
        let inv = seq.invert_order();
        let sub = run_filtration(&inv, Direction::Sub);
        let mut bc = barcode_local(&inv, &sub.tree);
        flip_levels(&mut bc, seq.universe().size());
        return bc;
    }
    let units: Vec<Unit> = classify_flats(seq).iter().map(Unit::from).collect();
    local_from_units(&units, seq.domain(), tree)
}

fn local_from_units(units: &[Unit], domain: Domain, tree: &MergeTree) -> Barcode {
    let ext: Vec<Extremum> = units
        .iter()
        .filter(|u| u.class.is_min() || u.class.is_interior_max())
        .map(|u| Extremum { is_min: u.class.is_min(), level: u.level, start: u.start })
        .collect();
    let pairs = local_pairs(&ext, domain.is_circular());
    let bars = bars_from_pairs(&ext, &pairs, tree.closure_level, tree.closure_index);
    let mut bc = Barcode { rule: Rule::LocalNeighbor, direction: Direction::Sub, domain, bars };
    bc.sort();
    bc
}

pub(crate) fn flip_levels(bc: &mut Barcode, universe_size: u32) {
    let top = universe_size - 1;
    for b in &mut bc.bars {
        b.birth_level = top - b.birth_level;
        b.death_level = top - b.death_level;
    }
    bc.direction = match bc.direction {
        Direction::Sub => Direction::Super,
        Direction::Super => Direction::Sub,
    };
}

pub fn sublevel_barcode(seq: &OrderedSequence, rule: Rule) -> Barcode {
    // steps are growth events and leave the tree alone
    let units: Vec<Unit> =
        classify_flats(seq).iter().filter(|f| f.class.is_extremum()).map(Unit::from).collect();
    let (_, tree) = sweep(&units, seq.domain(), Direction::Sub);
    match rule {
        Rule::ElderLeftmost => barcode_elder(&tree),
        Rule::LocalNeighbor => local_from_units(&units, seq.domain(), &tree),
    }
}

/// Superlevel barcode: the sublevel barcode of the inverted order with levels
/// mapped back, so births sit at or above deaths.
pub fn superlevel_barcode(seq: &OrderedSequence, rule: Rule) -> Barcode {
    let mut bc = sublevel_barcode(&seq.invert_order(), rule);
    flip_levels(&mut bc, seq.universe().size());
    bc
}

pub fn barcode(seq: &OrderedSequence, rule: Rule, direction: Direction) -> Barcode {
    match direction {
        Direction::Sub => sublevel_barcode(seq, rule),
        Direction::Super => superlevel_barcode(seq, rule),
    }
}

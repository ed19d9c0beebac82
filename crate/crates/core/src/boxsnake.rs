//! Box snakes: the alternating sequence of extremum flats with the monotone
//! stretches between them kept as boxes. Surgery (cut, glue, M-shifts,
//! (de)circularization) and monotone edits update the boxes locally.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::barcode::{
    bars_from_pairs, barcode_elder, flip_levels, local_pairs, Barcode, Extremum, Rule,
};
use crate::domain::{Domain, LevelUniverse, OrderedSequence, Rank};
use crate::error::{Error, Result};
use crate::filtration::{sweep, Direction, MergeTree, Unit};
use crate::flats::{classify_flats, FlatClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxKind {
    Min,
    Max,
    AscMonotone,
    DescMonotone,
    Const,
}

impl BoxKind {
    pub fn is_monotone(self) -> bool {
        matches!(self, BoxKind::AscMonotone | BoxKind::DescMonotone)
    }

    pub fn is_extremum(self) -> bool {
        !self.is_monotone()
    }

    /// Counts as a minimum; a constant is both.
    pub fn is_min(self) -> bool {
        matches!(self, BoxKind::Min | BoxKind::Const)
    }

    pub fn is_max(self) -> bool {
        matches!(self, BoxKind::Max | BoxKind::Const)
    }

    fn from_class(class: FlatClass) -> Self {
        match class {
            FlatClass::LocalMin | FlatClass::BoundaryMin => BoxKind::Min,
            FlatClass::LocalMax | FlatClass::BoundaryMax => BoxKind::Max,
            FlatClass::AscendingStep => BoxKind::AscMonotone,
            FlatClass::DescendingStep => BoxKind::DescMonotone,
            FlatClass::Constant => BoxKind::Const,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SnakeBox {
    pub kind: BoxKind,
    pub start: usize,
    /// Inclusive; `end < start` when the box wraps across `N-1 -> 0`.
    pub end: usize,
    pub len: usize,
    pub lo: Rank,
    pub hi: Rank,
}

impl SnakeBox {
    fn extremum(kind: BoxKind, start: usize, end: usize, len: usize, level: Rank) -> Self {
        SnakeBox { kind, start, end, len, lo: level, hi: level }
    }

    /// Monotone box over `start..=end` of a linear index range; levels at the
    /// two ends bound the box.
    fn monotone(kind: BoxKind, start: usize, end: usize, levels: &[Rank]) -> Self {
        let (a, b) = (levels[start], levels[end]);
        SnakeBox { kind, start, end, len: end - start + 1, lo: a.min(b), hi: a.max(b) }
    }

    pub fn wraps(&self) -> bool {
        self.end < self.start
    }

    pub fn contains(&self, i: usize) -> bool {
        if self.wraps() {
            i >= self.start || i <= self.end
        } else {
            self.start <= i && i <= self.end
        }
    }

    /// Level of the first sample.
    fn left_level(&self) -> Rank {
        if self.kind == BoxKind::DescMonotone {
            self.hi
        } else {
            self.lo
        }
    }

    /// Level of the last sample.
    fn right_level(&self) -> Rank {
        if self.kind == BoxKind::AscMonotone {
            self.hi
        } else {
            self.lo
        }
    }

    fn shifted(mut self, by: isize, n: usize) -> Self {
        let n = n as isize;
        self.start = (self.start as isize + by).rem_euclid(n) as usize;
        self.end = (self.end as isize + by).rem_euclid(n) as usize;
        self
    }

    fn join(self, other: SnakeBox) -> SnakeBox {
        debug_assert_eq!(self.kind, other.kind);
        SnakeBox {
            kind: self.kind,
            start: self.start,
            end: other.end,
            len: self.len + other.len,
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxSnake {
    pub domain: Domain,
    pub len: usize,
    /// Ordered by start; a wrapping box comes last.
    pub boxes: Vec<SnakeBox>,
}

impl BoxSnake {
    pub fn extrema(&self) -> impl Iterator<Item = &SnakeBox> {
        self.boxes.iter().filter(|b| b.kind.is_extremum())
    }

    /// `(#minima, #maxima)` with a constant box counted as both.
    pub fn extremum_counts(&self) -> (usize, usize) {
        let mins = self.boxes.iter().filter(|b| b.kind.is_min()).count();
        let maxs = self.boxes.iter().filter(|b| b.kind.is_max()).count();
        (mins, maxs)
    }

    /// Index of the box holding sample `i`.
    pub fn box_at(&self, i: usize) -> Option<usize> {
        if i >= self.len {
            return None;
        }
        let k = self.boxes.partition_point(|b| b.start <= i);
        if k == 0 {
            // before the first start: only a wrapping box can hold it
            let last = self.boxes.len() - 1;
            return self.boxes[last].wraps().then_some(last);
        }
        let k = k - 1;
        self.boxes[k].contains(i).then_some(k)
    }

    /// Extremum boxes alternate Min/Max once monotones are dropped, cyclically
    /// on a circle; monotones sit between a Min and a Max of the right
    /// orientation.
    pub fn alternates(&self) -> bool {
        let b = &self.boxes;
        let k = b.len();
        if k == 1 {
            return b[0].kind == BoxKind::Const;
        }
        if b.iter().any(|x| x.kind == BoxKind::Const) {
            return false;
        }
        let circular = self.domain.is_circular();
        let ext: Vec<&SnakeBox> = self.extrema().collect();
        let pairs = if circular { ext.len() } else { ext.len() - 1 };
        let ext_ok = (0..pairs).all(|i| {
            let (a, c) = (ext[i], ext[(i + 1) % ext.len()]);
            a.kind != c.kind && (if a.kind == BoxKind::Min { a.lo < c.lo } else { a.lo > c.lo })
        });
        let mono_ok = (0..k).filter(|&i| b[i].kind.is_monotone()).all(|i| {
            if !circular && (i == 0 || i + 1 == k) {
                return false;
            }
            let (prev, next) = (b[(i + k - 1) % k], b[(i + 1) % k]);
            match b[i].kind {
                BoxKind::AscMonotone => {
                    prev.kind == BoxKind::Min
                        && next.kind == BoxKind::Max
                        && prev.lo < b[i].lo
                        && b[i].hi < next.lo
                }
                _ => {
                    prev.kind == BoxKind::Max
                        && next.kind == BoxKind::Min
                        && prev.lo > b[i].hi
                        && b[i].lo > next.lo
                }
            }
        });
        let covered: usize = b.iter().map(|x| x.len).sum();
        ext_ok && mono_ok && covered == self.len
    }

    fn units(&self, direction: Direction, universe_size: u32) -> Vec<Unit> {
        let k = self.boxes.len();
        let linear = !self.domain.is_circular();
        self.boxes
            .iter()
            .enumerate()
            .filter(|(_, b)| b.kind.is_extremum())
            .map(|(i, b)| {
                let boundary = linear && (i == 0 || i + 1 == k);
                let class = match (b.kind, boundary) {
                    (BoxKind::Const, _) => FlatClass::Constant,
                    (BoxKind::Min, false) => FlatClass::LocalMin,
                    (BoxKind::Min, true) => FlatClass::BoundaryMin,
                    (BoxKind::Max, false) => FlatClass::LocalMax,
                    (_, _) => FlatClass::BoundaryMax,
                };
                match direction {
                    Direction::Sub => Unit { level: b.lo, start: b.start, class },
                    Direction::Super => Unit {
                        level: universe_size - 1 - b.lo,
                        start: b.start,
                        class: class.inverted(),
                    },
                }
            })
            .collect()
    }

    /// Merge tree computed over the extremum boxes only; monotone samples are
    /// growth steps and never change it.
    pub fn merge_tree(&self, direction: Direction, universe_size: u32) -> MergeTree {
        let units = self.units(direction, universe_size);
        let (_, mut tree) = sweep(&units, self.domain, Direction::Sub);
        if direction == Direction::Super {
            let flip = |r: Rank| universe_size - 1 - r;
            tree.direction = Direction::Super;
            tree.closure_level = flip(tree.closure_level);
            for n in &mut tree.nodes {
                n.level = flip(n.level);
            }
        }
        tree
    }

    /// Barcode recomputed from the boxes, `O(B)` after the level sort.
    pub fn barcode(&self, rule: Rule, direction: Direction, universe_size: u32) -> Barcode {
        let tree = self.merge_tree(direction, universe_size);
        match rule {
            Rule::ElderLeftmost => barcode_elder(&tree),
            Rule::LocalNeighbor => {
                let units = self.units(direction, universe_size);
                let ext: Vec<Extremum> = units
                    .iter()
                    .filter(|u| u.class.is_min() || u.class.is_interior_max())
                    .map(|u| Extremum { is_min: u.class.is_min(), level: u.level, start: u.start })
                    .collect();
                let pairs = local_pairs(&ext, self.domain.is_circular());
                let top = universe_size - 1;
                let closure = match direction {
                    Direction::Sub => tree.closure_level,
                    Direction::Super => top - tree.closure_level,
                };
                let bars = bars_from_pairs(&ext, &pairs, closure, tree.closure_index);
                let mut bc = Barcode {
                    rule,
                    direction: Direction::Sub,
                    domain: self.domain,
                    bars,
                };
                bc.sort();
                if direction == Direction::Super {
                    flip_levels(&mut bc, universe_size);
                }
                bc
            }
        }
    }
}

/// Segments a sequence into extremum boxes (one per extremal flat) and maximal
/// monotone boxes between them. `O(N)`.
pub fn build_box_snake(seq: &OrderedSequence) -> BoxSnake {
    let flats = classify_flats(seq);
    let k = flats.len();
    let first = flats
        .iter()
        .position(|f| f.class.is_extremum())
        .expect("every sequence has an extremal flat");
    let mut boxes: Vec<SnakeBox> = Vec::with_capacity(k);
    let mut pending: Option<SnakeBox> = None;
    for t in 0..k {
        let f = flats[(first + t) % k];
        let kind = BoxKind::from_class(f.class);
        if kind.is_monotone() {
            let piece = SnakeBox::extremum(kind, f.start, f.end, f.len, f.level);
            pending = Some(match pending {
                Some(p) => p.join(piece),
                None => piece,
            });
        } else {
            boxes.extend(pending.take());
            boxes.push(SnakeBox::extremum(kind, f.start, f.end, f.len, f.level));
        }
    }
    boxes.extend(pending);
    // a wrapping box holds N-1, so it has the largest start
    boxes.sort_unstable_by_key(|b| b.start);
    BoxSnake { domain: seq.domain(), len: seq.len(), boxes }
}

/// Locates the monotone box holding `index` and checks the new level keeps the
/// box weakly monotone and strictly between its flanking extrema.
pub fn validate_monotone_edit(
    seq: &OrderedSequence,
    bs: &BoxSnake,
    index: usize,
    new_level: Rank,
) -> Result<usize> {
    let k = bs.box_at(index).ok_or(Error::IndexNotInMonotone { index })?;
    let b = bs.boxes[k];
    if !b.kind.is_monotone() {
        return Err(Error::IndexNotInMonotone { index });
    }
    let violation = Err(Error::EditViolatesMonotonicity { index, level: new_level });
    if new_level >= seq.universe().size() {
        return violation;
    }
    let nb = bs.boxes.len();
    let prev = bs.boxes[(k + nb - 1) % nb];
    let next = bs.boxes[(k + 1) % nb];
    let asc = b.kind == BoxKind::AscMonotone;
    let (low, high) = if asc { (prev.lo, next.lo) } else { (next.lo, prev.lo) };
    if new_level <= low || new_level >= high {
        return violation;
    }
    let n = seq.len();
    let before = (index != b.start).then(|| seq.level((index + n - 1) % n));
    let after = (index != b.end).then(|| seq.level((index + 1) % n));
    let ordered = |a: Rank, c: Rank| if asc { a <= c } else { a >= c };
    if before.is_some_and(|l| !ordered(l, new_level)) || after.is_some_and(|l| !ordered(new_level, l)) {
        return violation;
    }
    Ok(k)
}

/// Single-writer pairing of a sequence with its box snake; every operation
/// keeps the two in step.
#[derive(Debug, Clone, PartialEq)]
pub struct Snake {
    seq: OrderedSequence,
    boxes: BoxSnake,
}

/// How a cut relates to the boxes around the severed adjacency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutCase {
    /// Between a minimum box and a maximum box.
    BetweenExtrema,
    /// Inside a monotone box: a new minimum and maximum appear.
    WithinMonotone,
    /// Inside a minimum flat: the minimum splits in two.
    WithinMinimum,
    /// Between a minimum and a monotone: the monotone end becomes a minimum.
    MinimumMonotone,
    WithinMaximum,
    MaximumMonotone,
    /// Inside the single flat of a constant sequence.
    WithinConstant,
}

impl CutCase {
    /// `(Δ#minima, Δ#maxima)` before single-box pieces are promoted to
    /// constants. `pieces` is 2 for a linear cut, 1 when opening a circle.
    fn base_delta(self, pieces: usize) -> (isize, isize) {
        match self {
            CutCase::BetweenExtrema => (0, 0),
            CutCase::WithinMonotone => (1, 1),
            CutCase::WithinMinimum | CutCase::MinimumMonotone => (1, 0),
            CutCase::WithinMaximum | CutCase::MaximumMonotone => (0, 1),
            CutCase::WithinConstant if pieces == 2 => (1, 1),
            CutCase::WithinConstant => (0, 0),
        }
    }

    pub fn glue_case(self) -> GlueCase {
        match self {
            CutCase::WithinMinimum | CutCase::WithinMaximum | CutCase::WithinConstant => {
                GlueCase::SameLevel
            }
            CutCase::BetweenExtrema => GlueCase::ExtremaRetained,
            CutCase::WithinMonotone => GlueCase::BothAbsorbed,
            CutCase::MinimumMonotone | CutCase::MaximumMonotone => GlueCase::OneAbsorbed,
        }
    }
}

/// How the boundary extrema of two pieces combine when glued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlueCase {
    /// The glued samples share a flat.
    SameLevel,
    /// Both boundary extrema remain extrema.
    ExtremaRetained,
    /// Both boundary extrema are absorbed into one monotone.
    BothAbsorbed,
    /// One boundary extremum survives, the other joins a monotone.
    OneAbsorbed,
}

/// Counting changes caused by one surgery. Bars equal minima (a constant
/// counting as one), so `delta_bars == delta_minima`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurgeryReport {
    pub cut_case: CutCase,
    pub glue_case: Option<GlueCase>,
    pub delta_minima: isize,
    pub delta_maxima: isize,
    pub delta_bars: isize,
}

impl SurgeryReport {
    fn cut(case: CutCase, pieces: usize, promotions: &[Option<BoxKind>]) -> Self {
        let (mut dm, mut dx) = case.base_delta(pieces);
        for origin in promotions.iter().flatten() {
            // a lone box becomes constant and gains its missing role
            match origin {
                BoxKind::Min => dx += 1,
                BoxKind::Max => dm += 1,
                _ => {}
            }
        }
        SurgeryReport {
            cut_case: case,
            glue_case: None,
            delta_minima: dm,
            delta_maxima: dx,
            delta_bars: dm,
        }
    }

    fn inverse(self) -> Self {
        SurgeryReport {
            cut_case: self.cut_case,
            glue_case: Some(self.cut_case.glue_case()),
            delta_minima: -self.delta_minima,
            delta_maxima: -self.delta_maxima,
            delta_bars: -self.delta_bars,
        }
    }
}

/// Which M-shift to perform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Drop `M` samples on the left, append the new block on the right.
    Left,
    /// Drop `M` samples on the right, prepend the new block on the left.
    Right,
}

fn cut_case(left: SnakeBox, right: SnakeBox, same: bool) -> CutCase {
    use BoxKind::*;
    if same {
        return match left.kind {
            Min => CutCase::WithinMinimum,
            Max => CutCase::WithinMaximum,
            Const => CutCase::WithinConstant,
            _ => CutCase::WithinMonotone,
        };
    }
    match (left.kind, right.kind) {
        (Min, Max) | (Max, Min) => CutCase::BetweenExtrema,
        (Min, _) | (_, Min) => CutCase::MinimumMonotone,
        (Max, _) | (_, Max) => CutCase::MaximumMonotone,
        _ => unreachable!("adjacent boxes cannot both be monotone or constant"),
    }
}

/// Turns the flat at the right end of a linear box list into a boundary
/// extremum; the last box has already been truncated.
fn fix_right_end(levels: &[Rank], boxes: &mut Vec<SnakeBox>) {
    let last = *boxes.last().expect("piece has a box");
    if last.kind.is_monotone() {
        boxes.pop();
        let p = last.end;
        let mut q = p;
        while q > last.start && levels[q - 1] == levels[p] {
            q -= 1;
        }
        if q > last.start {
            boxes.push(SnakeBox::monotone(last.kind, last.start, q - 1, levels));
        }
        let kind = if last.kind == BoxKind::AscMonotone { BoxKind::Max } else { BoxKind::Min };
        boxes.push(SnakeBox::extremum(kind, q, p, p - q + 1, levels[p]));
    }
    if boxes.len() == 1 {
        boxes[0].kind = BoxKind::Const;
    }
}

/// Mirror of [`fix_right_end`] for the first box.
fn fix_left_end(levels: &[Rank], boxes: &mut Vec<SnakeBox>) {
    let first = boxes[0];
    if first.kind.is_monotone() {
        let s = first.start;
        let mut q = s;
        while q < first.end && levels[q + 1] == levels[s] {
            q += 1;
        }
        let kind = if first.kind == BoxKind::AscMonotone { BoxKind::Min } else { BoxKind::Max };
        let head = SnakeBox::extremum(kind, s, q, q - s + 1, levels[s]);
        if q < first.end {
            boxes[0] = SnakeBox::monotone(first.kind, q + 1, first.end, levels);
            boxes.insert(0, head);
        } else {
            boxes[0] = head;
        }
    }
    if boxes.len() == 1 {
        boxes[0].kind = BoxKind::Const;
    }
}

/// Part of box `b` over the linear index range `start..=end` of `levels`.
fn truncate(b: SnakeBox, start: usize, end: usize, levels: &[Rank]) -> SnakeBox {
    if b.kind.is_monotone() {
        SnakeBox::monotone(b.kind, start, end, levels)
    } else {
        SnakeBox::extremum(b.kind, start, end, end - start + 1, b.lo)
    }
}

/// Appends `b`, folding it into a preceding monotone of the same direction.
fn push_merged(out: &mut Vec<SnakeBox>, b: SnakeBox) {
    match out.last_mut() {
        Some(last) if last.kind.is_monotone() && last.kind == b.kind => *last = last.join(b),
        _ => out.push(b),
    }
}

/// Boxes covering the flats at a fresh adjacency: `left_flat` (level `a`) now
/// touches `right_flat` (level `c`). Neighbour levels come from the boxes
/// beyond them.
fn junction_boxes(
    left_flat: SnakeBox,
    right_flat: SnakeBox,
    before: Option<Rank>,
    after: Option<Rank>,
) -> Vec<SnakeBox> {
    let (a, c) = (left_flat.lo, right_flat.lo);
    let make = |b: SnakeBox, l: Option<Rank>, r: Option<Rank>| {
        let kind = BoxKind::from_class(FlatClass::from_neighbours(b.lo, l, r));
        SnakeBox { kind, ..b }
    };
    if a == c {
        let merged = SnakeBox {
            start: left_flat.start,
            end: right_flat.end,
            len: left_flat.len + right_flat.len,
            ..left_flat
        };
        vec![make(merged, before, after)]
    } else {
        vec![make(left_flat, before, Some(c)), make(right_flat, Some(a), after)]
    }
}

impl Snake {
    pub fn new(seq: OrderedSequence) -> Self {
        let boxes = build_box_snake(&seq);
        Snake { seq, boxes }
    }

    pub fn sequence(&self) -> &OrderedSequence {
        &self.seq
    }

    pub fn box_snake(&self) -> &BoxSnake {
        &self.boxes
    }

    pub fn into_parts(self) -> (OrderedSequence, BoxSnake) {
        (self.seq, self.boxes)
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    /// Always false.
    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn domain(&self) -> Domain {
        self.seq.domain()
    }

    pub fn barcode(&self, rule: Rule, direction: Direction) -> Barcode {
        self.boxes.barcode(rule, direction, self.seq.universe().size())
    }

    pub fn merge_tree(&self, direction: Direction) -> MergeTree {
        self.boxes.merge_tree(direction, self.seq.universe().size())
    }

    pub fn validate_monotone_edit(&self, index: usize, new_level: Rank) -> Result<()> {
        validate_monotone_edit(&self.seq, &self.boxes, index, new_level).map(|_| ())
    }

    /// Sets one monotone sample; box boundaries never move.
    pub fn apply_monotone_edit(&mut self, index: usize, new_level: Rank) -> Result<()> {
        let k = validate_monotone_edit(&self.seq, &self.boxes, index, new_level)?;
        let levels = self.seq.levels_mut();
        levels[index] = new_level;
        let b = &mut self.boxes.boxes[k];
        let (a, c) = (levels[b.start], levels[b.end]);
        b.lo = a.min(c);
        b.hi = a.max(c);
        Ok(())
    }

    /// Cuts a linear sequence between `p` and `p + 1`; both pieces are
    /// reindexed from 0.
    pub fn cut(self, p: usize) -> Result<(Snake, Snake, SurgeryReport)> {
        if self.domain().is_circular() {
            return Err(Error::WrongDomain { expected: "linear" });
        }
        let n = self.len();
        if n == 1 {
            return Err(Error::EmptyPiece);
        }
        if p + 1 >= n {
            return Err(Error::CutOutOfRange { position: p, len: n });
        }
        let universe = self.seq.universe().clone();
        let mut left_levels = self.seq.into_levels();
        let mut boxes = self.boxes.boxes;
        let k = boxes.partition_point(|b| b.end < p);
        let kb = boxes[k];
        let (mut right_boxes, case) = if kb.end == p {
            let right = boxes.split_off(k + 1);
            let case = cut_case(kb, right[0], false);
            (right, case)
        } else {
            let mut right = boxes.split_off(k);
            right[0] = truncate(kb, p + 1, kb.end, &left_levels);
            boxes.push(truncate(kb, kb.start, p, &left_levels));
            (right, cut_case(kb, kb, true))
        };
        let right_levels = left_levels.split_off(p + 1);
        let m = right_levels.len();
        for b in &mut right_boxes {
            *b = b.shifted(-((p + 1) as isize), m);
        }
        let origin_left = boxes.last().map(|b| b.kind);
        let origin_right = right_boxes[0].kind;
        fix_right_end(&left_levels, &mut boxes);
        fix_left_end(&right_levels, &mut right_boxes);
        let promotions = [
            (boxes.len() == 1).then_some(origin_left).flatten(),
            (right_boxes.len() == 1).then_some(origin_right),
        ];
        let report = SurgeryReport::cut(case, 2, &promotions);
        let left = Snake {
            boxes: BoxSnake { domain: Domain::Linear, len: left_levels.len(), boxes },
            seq: OrderedSequence::from_parts_unchecked(left_levels, universe.clone(), Domain::Linear),
        };
        let right = Snake {
            boxes: BoxSnake { domain: Domain::Linear, len: m, boxes: right_boxes },
            seq: OrderedSequence::from_parts_unchecked(right_levels, universe, Domain::Linear),
        };
        Ok((left, right, report))
    }

    /// Opens a circle at the adjacency `p -> p + 1 (mod N)`; the linear result
    /// starts at sample `p + 1`.
    pub fn linearize_at(self, p: usize) -> Result<(Snake, SurgeryReport)> {
        if !self.domain().is_circular() {
            return Err(Error::WrongDomain { expected: "circular" });
        }
        let n = self.len();
        if p >= n {
            return Err(Error::CutOutOfRange { position: p, len: n });
        }
        let s = (p + 1) % n;
        let universe = self.seq.universe().clone();
        let mut levels = self.seq.into_levels();
        let old = self.boxes;
        if old.boxes.len() == 1 {
            levels.rotate_left(s);
            let boxes = vec![SnakeBox::extremum(BoxKind::Const, 0, n - 1, n, levels[0])];
            let snake = Snake {
                boxes: BoxSnake { domain: Domain::Linear, len: n, boxes },
                seq: OrderedSequence::from_parts_unchecked(levels, universe, Domain::Linear),
            };
            return Ok((snake, SurgeryReport::cut(CutCase::WithinConstant, 1, &[])));
        }
        let k = old.box_at(s).expect("index in range");
        let kb = old.boxes[k];
        let by = -(s as isize);
        let mut boxes: Vec<SnakeBox> = Vec::with_capacity(old.boxes.len() + 1);
        let case;
        if kb.start == s {
            let before = old.boxes[(k + old.boxes.len() - 1) % old.boxes.len()];
            case = cut_case(before, kb, false);
            boxes.extend(old.boxes[k..].iter().chain(&old.boxes[..k]).map(|b| b.shifted(by, n)));
        } else {
            case = cut_case(kb, kb, true);
            let head = SnakeBox { start: s, len: 0, ..kb };
            let tail = SnakeBox { end: (s + n - 1) % n, len: 0, ..kb };
            boxes.push(head.shifted(by, n));
            boxes.extend(old.boxes[k + 1..].iter().chain(&old.boxes[..k]).map(|b| b.shifted(by, n)));
            boxes.push(tail.shifted(by, n));
        }
        levels.rotate_left(s);
        if kb.start != s {
            let last = boxes.len() - 1;
            boxes[0] = truncate(boxes[0], boxes[0].start, boxes[0].end, &levels);
            boxes[last] = truncate(boxes[last], boxes[last].start, boxes[last].end, &levels);
        }
        fix_right_end(&levels, &mut boxes);
        fix_left_end(&levels, &mut boxes);
        let report = SurgeryReport::cut(case, 1, &[]);
        let snake = Snake {
            boxes: BoxSnake { domain: Domain::Linear, len: n, boxes },
            seq: OrderedSequence::from_parts_unchecked(levels, universe, Domain::Linear),
        };
        Ok((snake, report))
    }

    /// Opens a circle between `N-1` and `0`.
    pub fn linearize(self) -> Result<(Snake, SurgeryReport)> {
        let n = self.len();
        self.linearize_at(n - 1)
    }

    /// Glues `right` after `left`. Rank-only pieces must share a universe;
    /// labelled pieces are re-ranked onto the union of their labels.
    pub fn glue(left: Snake, right: Snake) -> Result<(Snake, SurgeryReport)> {
        if left.domain().is_circular() || right.domain().is_circular() {
            return Err(Error::WrongDomain { expected: "linear" });
        }
        let (left, right, universe) = unify(left, right)?;
        let na = left.len();
        let nb = right.len();
        let mut levels = left.seq.into_levels();
        levels.extend(right.seq.into_levels());
        let mut a = left.boxes.boxes;
        let b: Vec<SnakeBox> = right.boxes.boxes.iter().map(|x| x.shifted(na as isize, na + nb)).collect();
        let la = a.pop().expect("piece has a box");
        let before = a.last().map(|x| x.right_level());
        let after = b.get(1).map(|x| x.left_level());
        let mut out = a;
        for j in junction_boxes(la, b[0], before, after) {
            push_merged(&mut out, j);
        }
        for &x in &b[1..] {
            push_merged(&mut out, x);
        }
        let bs = BoxSnake { domain: Domain::Linear, len: na + nb, boxes: out };
        let report = junction_report(&bs, na - 1, [na == la.len, nb == b[0].len]);
        let snake = Snake {
            boxes: bs,
            seq: OrderedSequence::from_parts_unchecked(levels, universe, Domain::Linear),
        };
        Ok((snake, report))
    }

    /// Closes a linear sequence into a circle by joining `N-1` to `0`.
    pub fn glue_ends(self) -> Result<(Snake, SurgeryReport)> {
        if self.domain().is_circular() {
            return Err(Error::WrongDomain { expected: "linear" });
        }
        let n = self.len();
        let universe = self.seq.universe().clone();
        let levels = self.seq.into_levels();
        let old = self.boxes.boxes;
        let k = old.len();
        let boxes = if k <= 3 {
            // too few boxes for disjoint neighbours; rebuild is O(k) flats
            let seq = OrderedSequence::from_parts_unchecked(levels.clone(), universe.clone(), Domain::Circular);
            build_box_snake(&seq).boxes
        } else {
            let (fb, la) = (old[0], old[k - 1]);
            let before = Some(old[k - 2].right_level());
            let after = Some(old[1].left_level());
            let mid = junction_boxes(la, fb, before, after);
            let (tail, head): (Vec<SnakeBox>, Vec<SnakeBox>) = if mid.len() == 1 {
                (mid, Vec::new())
            } else {
                (vec![mid[0]], vec![mid[1]])
            };
            let mut out: Vec<SnakeBox> = Vec::with_capacity(k);
            for &x in head.iter().chain(&old[1..k - 1]).chain(&tail) {
                push_merged(&mut out, x);
            }
            let last = out.len() - 1;
            if out[0].kind.is_monotone() && out[last].kind == out[0].kind {
                let first = out.remove(0);
                let last = out.len() - 1;
                out[last] = out[last].join(first);
            }
            out
        };
        let bs = BoxSnake { domain: Domain::Circular, len: n, boxes };
        let report = {
            let l = bs.box_at(n - 1).expect("in range");
            let r = bs.box_at(0).expect("in range");
            let case = if bs.boxes.len() == 1 {
                CutCase::WithinConstant
            } else {
                cut_case(bs.boxes[l], bs.boxes[r], l == r)
            };
            SurgeryReport::cut(case, 1, &[]).inverse()
        };
        let snake = Snake {
            boxes: bs,
            seq: OrderedSequence::from_parts_unchecked(levels, universe, Domain::Circular),
        };
        Ok((snake, report))
    }

    /// Sliding-window update by `M = block.len()` samples, realised as a cut
    /// followed by a glue. Circular windows are opened at `N-1 -> 0` and closed
    /// again afterwards. The block shares this sequence's universe.
    pub fn shift(self, side: Side, block: Vec<Rank>) -> Result<Snake> {
        if block.is_empty() {
            return Ok(self);
        }
        let universe = self.seq.universe().clone();
        let block = OrderedSequence::with_universe(block, universe, Domain::Linear)?;
        self.shift_with(side, Snake::new(block))
    }

    /// As [`Snake::shift`] with a prepared linear block; labelled universes are
    /// merged as in [`Snake::glue`].
    pub fn shift_with(self, side: Side, block: Snake) -> Result<Snake> {
        let n = self.len();
        let m = block.len();
        if m > n {
            return Err(Error::ShiftTooLong { shift: m, len: n });
        }
        if block.domain().is_circular() {
            return Err(Error::WrongDomain { expected: "linear" });
        }
        if self.domain().is_circular() {
            let (open, _) = self.linearize()?;
            let (moved, _) = open.shift_linear(side, block)?.glue_ends()?;
            return Ok(moved);
        }
        self.shift_linear(side, block)
    }

    fn shift_linear(self, side: Side, block: Snake) -> Result<Snake> {
        let n = self.len();
        let m = block.len();
        if m == n {
            return Ok(block);
        }
        let joined = match side {
            Side::Left => {
                let (_, keep, _) = self.cut(m - 1)?;
                Snake::glue(keep, block)?
            }
            Side::Right => {
                let (keep, _, _) = self.cut(n - m - 1)?;
                Snake::glue(block, keep)?
            }
        };
        Ok(joined.0)
    }
}

/// Glue report at adjacency `p -> p+1`: the inverse of cutting there again.
fn junction_report(bs: &BoxSnake, p: usize, single: [bool; 2]) -> SurgeryReport {
    let l = bs.box_at(p).expect("in range");
    let r = bs.box_at(p + 1).expect("in range");
    let case = cut_case(bs.boxes[l], bs.boxes[r], l == r);
    // a piece made of one constant box takes the role of the box it joined
    let promotions = [single[0].then_some(bs.boxes[l].kind), single[1].then_some(bs.boxes[r].kind)];
    SurgeryReport::cut(case, 2, &promotions).inverse()
}

/// Brings two pieces onto one universe.
fn unify(left: Snake, right: Snake) -> Result<(Snake, Snake, Arc<LevelUniverse>)> {
    let (ua, ub) = (left.seq.universe().clone(), right.seq.universe().clone());
    if Arc::ptr_eq(&ua, &ub) || ua == ub {
        return Ok((left, right, ua));
    }
    let (Some(la), Some(lb)) = (ua.labels(), ub.labels()) else {
        return Err(Error::IncompatibleUniverses);
    };
    if ua.is_inverted() != ub.is_inverted() {
        return Err(Error::IncompatibleUniverses);
    }
    let inverted = ua.is_inverted();
    let mut all: Vec<f64> = la.iter().chain(lb).copied().collect();
    all.sort_by(|x, y| if inverted { y.total_cmp(x) } else { x.total_cmp(y) });
    all.dedup();
    let find = |v: f64| -> Rank {
        all.binary_search_by(|x| if inverted { v.total_cmp(x) } else { x.total_cmp(&v) })
            .expect("label present") as Rank
    };
    let map_a: Vec<Rank> = la.iter().map(|&v| find(v)).collect();
    let map_b: Vec<Rank> = lb.iter().map(|&v| find(v)).collect();
    let mut universe = LevelUniverse::labeled(if inverted {
        all.iter().rev().copied().collect()
    } else {
        all.clone()
    })?;
    if inverted {
        universe = universe.inverted();
    }
    let universe = Arc::new(universe);
    let remap = |s: Snake, map: &[Rank]| -> Snake {
        let domain = s.seq.domain();
        let levels: Vec<Rank> = s.seq.into_levels().into_iter().map(|r| map[r as usize]).collect();
        let mut boxes = s.boxes;
        for b in &mut boxes.boxes {
            b.lo = map[b.lo as usize];
            b.hi = map[b.hi as usize];
        }
        Snake {
            seq: OrderedSequence::from_parts_unchecked(levels, universe.clone(), domain),
            boxes,
        }
    };
    let left = remap(left, &map_a);
    let right = remap(right, &map_b);
    Ok((left, right, universe))
}

/// Cuts a linear sequence between `p` and `p + 1`.
pub fn cut(seq: &OrderedSequence, p: usize) -> Result<(OrderedSequence, OrderedSequence)> {
    let (a, b, _) = Snake::new(seq.clone()).cut(p)?;
    Ok((a.seq, b.seq))
}

/// Glues two linear sequences end to start.
pub fn glue(left: &OrderedSequence, right: &OrderedSequence) -> Result<OrderedSequence> {
    Ok(Snake::glue(Snake::new(left.clone()), Snake::new(right.clone()))?.0.seq)
}

/// Joins the two ends of a linear sequence.
pub fn glue_ends(seq: &OrderedSequence) -> Result<OrderedSequence> {
    Ok(Snake::new(seq.clone()).glue_ends()?.0.seq)
}

/// Opens a circular sequence at `N-1 -> 0`.
pub fn linearize(seq: &OrderedSequence) -> Result<OrderedSequence> {
    Ok(Snake::new(seq.clone()).linearize()?.0.seq)
}

pub fn shift(seq: &OrderedSequence, side: Side, block: Vec<Rank>) -> Result<OrderedSequence> {
    Ok(Snake::new(seq.clone()).shift(side, block)?.seq)
}

/// Applies a monotone edit to a copy of the sequence.
pub fn apply_monotone_edit(
    seq: &OrderedSequence,
    index: usize,
    new_level: Rank,
) -> Result<OrderedSequence> {
    let mut s = Snake::new(seq.clone());
    s.apply_monotone_edit(index, new_level)?;
    Ok(s.seq)
}

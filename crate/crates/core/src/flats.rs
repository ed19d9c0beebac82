//! Maximal constant runs ("flats") and their classification by outer boundary.

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, OrderedSequence, Rank};

/// A maximal run of equal levels before classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatRun {
    pub start: usize,
    /// Inclusive; `end < start` when the run wraps across `N-1 -> 0`.
    pub end: usize,
    pub len: usize,
    pub level: Rank,
}

impl FlatRun {
    pub fn wraps(&self) -> bool {
        self.end < self.start
    }

    /// Sample positions covered, in domain order starting at `start`.
    pub fn indices(&self, n: usize) -> impl Iterator<Item = usize> {
        let start = self.start;
        (0..self.len).map(move |k| (start + k) % n)
    }

    pub fn contains(&self, i: usize) -> bool {
        if self.wraps() {
            i >= self.start || i <= self.end
        } else {
            self.start <= i && i <= self.end
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlatClass {
    LocalMin,
    LocalMax,
    AscendingStep,
    DescendingStep,
    BoundaryMin,
    BoundaryMax,
    Constant,
}

impl FlatClass {
    /// Minimum in the sublevel sense, including boundary minima and constants.
    pub fn is_min(self) -> bool {
        matches!(self, FlatClass::LocalMin | FlatClass::BoundaryMin | FlatClass::Constant)
    }

    pub fn is_max(self) -> bool {
        matches!(self, FlatClass::LocalMax | FlatClass::BoundaryMax | FlatClass::Constant)
    }

    /// Maximum with outer neighbours on both sides; the only flats that merge
    /// components.
    pub fn is_interior_max(self) -> bool {
        matches!(self, FlatClass::LocalMax)
    }

    pub fn is_extremum(self) -> bool {
        !self.is_step()
    }

    pub fn is_step(self) -> bool {
        matches!(self, FlatClass::AscendingStep | FlatClass::DescendingStep)
    }

    /// The class of the same flat under the inverted order of levels.
    pub fn inverted(self) -> Self {
        match self {
            FlatClass::LocalMin => FlatClass::LocalMax,
            FlatClass::LocalMax => FlatClass::LocalMin,
            FlatClass::AscendingStep => FlatClass::DescendingStep,
            FlatClass::DescendingStep => FlatClass::AscendingStep,
            FlatClass::BoundaryMin => FlatClass::BoundaryMax,
            FlatClass::BoundaryMax => FlatClass::BoundaryMin,
            FlatClass::Constant => FlatClass::Constant,
        }
    }

    /// Classifies a flat from the levels of its outer neighbours.
    pub fn from_neighbours(level: Rank, left: Option<Rank>, right: Option<Rank>) -> Self {
        match (left, right) {
            (None, None) => FlatClass::Constant,
            (Some(a), None) | (None, Some(a)) => {
                if a > level {
                    FlatClass::BoundaryMin
                } else {
                    FlatClass::BoundaryMax
                }
            }
            (Some(a), Some(b)) => match (a > level, b > level) {
                (true, true) => FlatClass::LocalMin,
                (false, false) => FlatClass::LocalMax,
                (false, true) => FlatClass::AscendingStep,
                (true, false) => FlatClass::DescendingStep,
            },
        }
    }
}

/// A classified flat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flat {
    pub start: usize,
    pub end: usize,
    pub len: usize,
    pub level: Rank,
    pub class: FlatClass,
}

impl Flat {
    pub fn run(&self) -> FlatRun {
        FlatRun { start: self.start, end: self.end, len: self.len, level: self.level }
    }

    pub fn wraps(&self) -> bool {
        self.end < self.start
    }

    pub fn contains(&self, i: usize) -> bool {
        self.run().contains(i)
    }
}

/// Partitions the domain into maximal runs, ordered by start index. On a
/// circular domain a run spanning `N-1 -> 0` is reported once, last.
pub fn segment_flats(seq: &OrderedSequence) -> Vec<FlatRun> {
    runs_of(seq.levels(), seq.domain())
}

pub(crate) fn runs_of(levels: &[Rank], domain: Domain) -> Vec<FlatRun> {
    let n = levels.len();
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || levels[i] != levels[start] {
            runs.push(FlatRun { start, end: i - 1, len: i - start, level: levels[start] });
            start = i;
        }
    }
    if domain.is_circular() && runs.len() > 1 && runs[0].level == runs[runs.len() - 1].level {
        let first = runs.remove(0);
        let last = runs.last_mut().expect("at least one run remains");
        last.end = first.end;
        last.len += first.len;
    }
    runs
}

/// Segments and classifies every flat. Positional order as in
/// [`segment_flats`].
pub fn classify_flats(seq: &OrderedSequence) -> Vec<Flat> {
    classify_runs(&segment_flats(seq), seq.domain())
}

pub(crate) fn classify_runs(runs: &[FlatRun], domain: Domain) -> Vec<Flat> {
    let k = runs.len();
    runs.iter()
        .enumerate()
        .map(|(i, r)| {
            let (left, right) = if k == 1 {
                (None, None)
            } else if domain.is_circular() {
                (Some(runs[(i + k - 1) % k].level), Some(runs[(i + 1) % k].level))
            } else {
                (
                    (i > 0).then(|| runs[i - 1].level),
                    (i + 1 < k).then(|| runs[i + 1].level),
                )
            };
            Flat {
                start: r.start,
                end: r.end,
                len: r.len,
                level: r.level,
                class: FlatClass::from_neighbours(r.level, left, right),
            }
        })
        .collect()
}

/// Replaces every flat by a single sample, keeping the universe.
pub fn collapse_flats(seq: &OrderedSequence) -> OrderedSequence {
    let levels = segment_flats(seq).iter().map(|r| r.level).collect();
    OrderedSequence::with_universe(levels, seq.universe().clone(), seq.domain())
        .expect("collapsed levels come from the sequence")
}

/// Counts `(#minima, #maxima)` flats, a constant counting as both.
pub fn extremum_counts(flats: &[Flat]) -> (usize, usize) {
    let mins = flats.iter().filter(|f| f.class.is_min()).count();
    let maxs = flats.iter().filter(|f| f.class.is_max()).count();
    (mins, maxs)
}

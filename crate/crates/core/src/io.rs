//! JSON documents exchanged by the command-line tool, plus CSV ingestion.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::barcode::{Barcode, Rule};
use crate::boxsnake::{BoxSnake, SurgeryReport};
use crate::domain::{rank_quantize, Domain, LevelUniverse, OrderedSequence, Rank};
use crate::error::Error;
use crate::filtration::{Direction, MergeTree};
use crate::flats::Flat;

fn linear() -> Domain {
    Domain::Linear
}

/// Input sequence: raw `values`, or `ranks` with an explicit universe size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default = "linear")]
    pub domain: Domain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranks: Option<Vec<Rank>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub universe_size: Option<u32>,
}

/// Schema-level problems with an input document.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DocumentError {
    #[error("exactly one of `values` or `ranks` must be present")]
    ValuesXorRanks,
    #[error("`ranks` requires `universe_size`")]
    MissingUniverseSize,
    #[error("`universe_size` is only allowed together with `ranks`")]
    StrayUniverseSize,
    #[error("line {line}: `{text}` is not a number")]
    BadCsv { line: usize, text: String },
    #[error(transparent)]
    Invalid(#[from] Error),
}

impl SequenceDocument {
    pub fn to_sequence(&self) -> std::result::Result<OrderedSequence, DocumentError> {
        match (&self.values, &self.ranks) {
            (Some(values), None) => {
                if self.universe_size.is_some() {
                    return Err(DocumentError::StrayUniverseSize);
                }
                Ok(rank_quantize(values, self.domain)?)
            }
            (None, Some(ranks)) => {
                let size = self.universe_size.ok_or(DocumentError::MissingUniverseSize)?;
                Ok(OrderedSequence::from_ranks(ranks.clone(), size, self.domain)?)
            }
            _ => Err(DocumentError::ValuesXorRanks),
        }
    }

    /// Labelled sequences in the original order come back as values; anything
    /// else as ranks.
    pub fn from_sequence(seq: &OrderedSequence, name: Option<String>) -> Self {
        let u = seq.universe();
        let labelled = u.labels().filter(|_| !u.is_inverted());
        match labelled {
            Some(labels) => SequenceDocument {
                name,
                domain: seq.domain(),
                values: Some(seq.levels().iter().map(|&r| labels[r as usize]).collect()),
                ranks: None,
                universe_size: None,
            },
            None => SequenceDocument {
                name,
                domain: seq.domain(),
                values: None,
                ranks: Some(seq.levels().to_vec()),
                universe_size: Some(u.size()),
            },
        }
    }

    /// One value per non-empty line; `#` starts a comment.
    pub fn from_csv(text: &str, domain: Domain) -> std::result::Result<Self, DocumentError> {
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.split('#').next().unwrap_or("").trim().trim_end_matches(',');
            if t.is_empty() {
                continue;
            }
            let v: f64 = t
                .parse()
                .map_err(|_| DocumentError::BadCsv { line: i + 1, text: t.to_string() })?;
            values.push(v);
        }
        Ok(SequenceDocument { name: None, domain, values: Some(values), ranks: None, universe_size: None })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarEntry {
    pub birth: Rank,
    pub death: Rank,
    pub birth_index: usize,
    pub death_index: usize,
    pub essential: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub birth_label: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub death_label: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarcodeDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub domain: Domain,
    pub rule: Rule,
    pub filtration: Direction,
    pub universe_size: u32,
    pub bars: Vec<BarEntry>,
}

impl BarcodeDocument {
    pub fn new(bc: &Barcode, universe: &LevelUniverse, name: Option<String>) -> Self {
        let bars = bc
            .bars
            .iter()
            .map(|b| BarEntry {
                birth: b.birth_level,
                death: b.death_level,
                birth_index: b.birth_index,
                death_index: b.death_index,
                essential: b.essential,
                birth_label: universe.label(b.birth_level),
                death_label: universe.label(b.death_level),
            })
            .collect();
        BarcodeDocument {
            name,
            domain: bc.domain,
            rule: bc.rule,
            filtration: bc.direction,
            universe_size: universe.size(),
            bars,
        }
    }

    /// Bars sorted by birth, then by length.
    fn display_order(&self) -> Vec<&BarEntry> {
        let mut v: Vec<&BarEntry> = self.bars.iter().collect();
        v.sort_by_key(|b| (b.birth, b.birth.abs_diff(b.death), b.birth_index));
        v
    }

    /// One bar per line as `[b ──── d]`, label values when present.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in self.display_order() {
            let end = |rank: Rank, label: Option<f64>| label.map_or(rank.to_string(), |l| l.to_string());
            let _ = write!(out, "[{} ──── {}]", end(b.birth, b.birth_label), end(b.death, b.death_label));
            if b.essential {
                out.push_str(" essential");
            }
            out.push('\n');
        }
        out
    }

    /// Stacked horizontal bars over the rank axis.
    pub fn to_svg(&self) -> String {
        const ROW: usize = 14;
        const UNIT: usize = 24;
        const PAD: usize = 20;
        let bars = self.display_order();
        let span = self.universe_size.max(1) as usize;
        let width = 2 * PAD + UNIT * span;
        let height = 2 * PAD + ROW * bars.len().max(1) + ROW;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
        );
        let _ = writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
        for (i, b) in bars.iter().enumerate() {
            let (lo, hi) = (b.birth.min(b.death) as usize, b.birth.max(b.death) as usize);
            let x = PAD + UNIT * lo + UNIT / 2;
            let w = (UNIT * (hi - lo)).max(2);
            let y = PAD + ROW * i + 3;
            let fill = if b.essential { "#b03a2e" } else { "#1f4e79" };
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{y}" width="{w}" height="{}" fill="{fill}"><title>{} {}</title></rect>"#,
                ROW - 6,
                b.birth,
                b.death
            );
        }
        let axis_y = PAD + ROW * bars.len().max(1) + 4;
        let _ = writeln!(
            s,
            r#"<line x1="{PAD}" y1="{axis_y}" x2="{}" y2="{axis_y}" stroke="black"/>"#,
            width - PAD
        );
        for r in 0..span {
            let x = PAD + UNIT * r + UNIT / 2;
            let _ = writeln!(
                s,
                r#"<text x="{x}" y="{}" font-size="10" text-anchor="middle">{r}</text>"#,
                axis_y + 12
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MergeTreeDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub tree: MergeTree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatsDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub domain: Domain,
    pub flats: Vec<Flat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSnakeDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub box_snake: BoxSnake,
}

/// Result of one surgery: the resulting sequences with their box snakes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurgeryDocument {
    pub operation: String,
    pub sequences: Vec<SequenceDocument>,
    pub box_snakes: Vec<BoxSnake>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<SurgeryReport>,
}

/// Canonical JSON: fixed field order, two-space indent, trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

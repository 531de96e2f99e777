//! Strength quantization, per-pair exaggeration labels and group percentages.
//!
//! A press release or news article is compared against the journal paper it
//! reports on. It is exaggerated in strength when its quantized statement
//! strength is strictly higher, in advice when its advice level is strictly
//! higher, and in sample when it claims human subjects for a non-human study.
//! The overall label is the OR of the three.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, DocKind, Document, Sample};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExaggerationError {
    #[error("strength level {0} outside 1..=7")]
    OutOfRange(u8),
    #[error("`{id}` has kind {found}, expected {expected}")]
    KindMismatch {
        id: String,
        found: DocKind,
        expected: &'static str,
    },
    #[error("`{doc}` refers to `{expected}`, not `{journal}`")]
    RefMismatch {
        doc: String,
        journal: String,
        expected: String,
    },
}

/// Granularity at which strength-of-statement levels are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrengthScale {
    Seven,
    Four,
    Two,
}

// Index `level - 1` gives the quantized level.
const FOUR_CLASS: [u8; 7] = [1, 1, 2, 2, 3, 3, 4];
const TWO_CLASS: [u8; 7] = [1, 1, 1, 1, 1, 1, 2];

impl StrengthScale {
    pub const ALL: [StrengthScale; 3] = [StrengthScale::Seven, StrengthScale::Four, StrengthScale::Two];

    pub fn as_str(self) -> &'static str {
        match self {
            StrengthScale::Seven => "seven",
            StrengthScale::Four => "four",
            StrengthScale::Two => "two",
        }
    }

    /// Highest quantized level of this scale.
    pub fn levels(self) -> u8 {
        match self {
            StrengthScale::Seven => 7,
            StrengthScale::Four => 4,
            StrengthScale::Two => 2,
        }
    }
}

impl fmt::Display for StrengthScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrengthScale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "seven" | "7" => Ok(StrengthScale::Seven),
            "four" | "4" => Ok(StrengthScale::Four),
            "two" | "2" => Ok(StrengthScale::Two),
            other => Err(format!("unknown scale `{other}`")),
        }
    }
}

pub fn quantize(level: u8, scale: StrengthScale) -> Result<u8, ExaggerationError> {
    if !(1..=7).contains(&level) {
        return Err(ExaggerationError::OutOfRange(level));
    }
    let i = usize::from(level - 1);
    Ok(match scale {
        StrengthScale::Seven => level,
        StrengthScale::Four => FOUR_CLASS[i],
        StrengthScale::Two => TWO_CLASS[i],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExaggerationLabel {
    pub strength: bool,
    pub advice: bool,
    pub sample: bool,
    pub overall: bool,
    pub scale: StrengthScale,
}

impl ExaggerationLabel {
    fn new(strength: bool, advice: bool, sample: bool, scale: StrengthScale) -> Self {
        ExaggerationLabel {
            strength,
            advice,
            sample,
            overall: strength || advice || sample,
            scale,
        }
    }
}

/// Compares raw annotations; shared by [`label`] and the corpus-level helpers.
pub fn label_levels(
    doc_strength7: u8,
    doc_advice: u8,
    doc_sample: Sample,
    journal_strength7: u8,
    journal_advice: u8,
    journal_sample: Sample,
    scale: StrengthScale,
) -> Result<ExaggerationLabel, ExaggerationError> {
    let strength = quantize(doc_strength7, scale)? > quantize(journal_strength7, scale)?;
    let advice = doc_advice > journal_advice;
    let sample = doc_sample == Sample::Human && journal_sample == Sample::NonHuman;
    Ok(ExaggerationLabel::new(strength, advice, sample, scale))
}

pub fn label(doc: &Document, journal: &Document, scale: StrengthScale) -> Result<ExaggerationLabel, ExaggerationError> {
    if journal.kind != DocKind::Journal {
        return Err(ExaggerationError::KindMismatch {
            id: journal.id.clone(),
            found: journal.kind,
            expected: "journal",
        });
    }
    if doc.kind == DocKind::Journal {
        return Err(ExaggerationError::KindMismatch {
            id: doc.id.clone(),
            found: doc.kind,
            expected: "press_release or news_article",
        });
    }
    if doc.journal_ref.as_deref() != Some(journal.id.as_str()) {
        return Err(ExaggerationError::RefMismatch {
            doc: doc.id.clone(),
            journal: journal.id.clone(),
            expected: doc.journal_ref.clone().unwrap_or_default(),
        });
    }
    label_levels(
        doc.strength7,
        doc.advice,
        doc.sample,
        journal.strength7,
        journal.advice,
        journal.sample,
        scale,
    )
}

/// Labels of every press release and news article whose journal resolves.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabelSet {
    pub scale: Option<StrengthScale>,
    pub labels: BTreeMap<String, ExaggerationLabel>,
    /// Non-journal documents whose journal reference did not resolve.
    pub unresolved: Vec<String>,
}

impl LabelSet {
    pub fn get(&self, doc_id: &str) -> Option<&ExaggerationLabel> {
        self.labels.get(doc_id)
    }

    pub fn is_exaggerated(&self, doc_id: &str) -> Option<bool> {
        self.labels.get(doc_id).map(|l| l.overall)
    }
}

pub fn label_corpus(corpus: &Corpus, scale: StrengthScale) -> LabelSet {
    let mut set = LabelSet {
        scale: Some(scale),
        ..Default::default()
    };
    for doc in corpus.documents.values().filter(|d| d.kind != DocKind::Journal) {
        match corpus.journal_of(doc).map(|j| label(doc, j, scale)) {
            Some(Ok(l)) => {
                set.labels.insert(doc.id.clone(), l);
            }
            _ => set.unresolved.push(doc.id.clone()),
        }
    }
    set
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    Source,
    Discipline,
}

impl FromStr for GroupBy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "source" => Ok(GroupBy::Source),
            "discipline" => Ok(GroupBy::Discipline),
            other => Err(format!("unknown grouping `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupStats {
    pub group_key: String,
    pub doc_kind: DocKind,
    pub scale: StrengthScale,
    pub n: usize,
    pub pct_overall: f64,
    pub pct_strength: f64,
    pub pct_advice: f64,
    pub pct_sample: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateReport {
    pub groups: Vec<GroupStats>,
    /// Documents left out because their journal did not resolve.
    pub excluded: Vec<String>,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    n: usize,
    overall: usize,
    strength: usize,
    advice: usize,
    sample: usize,
}

fn pct(count: usize, n: usize) -> f64 {
    100.0 * count as f64 / n as f64
}

/// Exaggeration percentages per source or discipline for one document kind,
/// sorted by descending overall percentage (ties by group key).
pub fn aggregate(corpus: &Corpus, group_by: GroupBy, kind: DocKind, scale: StrengthScale) -> AggregateReport {
    let labels = label_corpus(corpus, scale);
    let mut tallies: BTreeMap<String, Tally> = BTreeMap::new();
    let mut excluded = Vec::new();
    for doc in corpus.documents_of_kind(kind) {
        let Some(l) = labels.get(&doc.id) else {
            excluded.push(doc.id.clone());
            continue;
        };
        let key = match group_by {
            GroupBy::Source => doc.source.clone(),
            GroupBy::Discipline => doc.discipline.as_str().to_string(),
        };
        let t = tallies.entry(key).or_default();
        t.n += 1;
        t.overall += usize::from(l.overall);
        t.strength += usize::from(l.strength);
        t.advice += usize::from(l.advice);
        t.sample += usize::from(l.sample);
    }
    if !excluded.is_empty() {
        log::warn!("{} {} document(s) excluded: unresolved journal", excluded.len(), kind);
    }
    let mut groups: Vec<GroupStats> = tallies
        .into_iter()
        .map(|(group_key, t)| GroupStats {
            group_key,
            doc_kind: kind,
            scale,
            n: t.n,
            pct_overall: pct(t.overall, t.n),
            pct_strength: pct(t.strength, t.n),
            pct_advice: pct(t.advice, t.n),
            pct_sample: pct(t.sample, t.n),
        })
        .collect();
    groups.sort_by(|a, b| {
        b.pct_overall
            .total_cmp(&a.pct_overall)
            .then_with(|| a.group_key.cmp(&b.group_key))
    });
    AggregateReport { groups, excluded }
}

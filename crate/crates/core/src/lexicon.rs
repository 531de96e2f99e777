//! Tokenization and lexicon category counting.
//!
//! A lexicon is an ordered list of categories, each holding literal words,
//! prefix stems (`happi*`) and multi-token phrases. Counting scans a token
//! stream left to right once per category: at each position the longest
//! phrase starting there wins and consumes its tokens, otherwise a single
//! word or stem match counts once. A token never counts twice for the same
//! category.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parallel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: invalid pattern `{pattern}`")]
    InvalidPattern { line: usize, pattern: String },
    #[error("line {line}: {message}")]
    InvalidDic { line: usize, message: String },
    #[error("duplicate category `{0}`")]
    DuplicateCategory(String),
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("empty tweet group")]
    EmptyGroup,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn is_url(chunk: &str) -> bool {
    let trimmed = chunk.trim_start_matches(|c: char| !c.is_alphanumeric());
    chunk.contains("://") || trimmed.starts_with("www.")
}

/// Lowercased word tokens. URLs are dropped, `#` and other punctuation split
/// or vanish, and inner apostrophes stay so `you're` is one token.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        if is_url(chunk) {
            continue;
        }
        let mut current = String::new();
        let mut flush = |current: &mut String| {
            let t = current.trim_matches('\'');
            if !t.is_empty() {
                tokens.push(t.to_string());
            }
            current.clear();
        };
        for c in chunk.chars() {
            let c = if c == '\u{2019}' { '\'' } else { c };
            if is_word_char(c) {
                current.extend(c.to_lowercase());
            } else {
                flush(&mut current);
            }
        }
        flush(&mut current);
    }
    tokens
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pattern {
    Word(String),
    Stem(String),
    Phrase(Vec<String>),
}

impl Pattern {
    /// Parses a lexicon entry: a trailing `*` makes a stem, several tokens a phrase.
    pub fn parse(raw: &str) -> Option<Pattern> {
        let raw = raw.trim();
        if let Some(base) = raw.strip_suffix('*') {
            let mut toks = tokenize(base.trim_end_matches('*'));
            return match toks.len() {
                1 => Some(Pattern::Stem(toks.remove(0))),
                _ => None,
            };
        }
        let mut toks = tokenize(raw);
        match toks.len() {
            0 => None,
            1 => Some(Pattern::Word(toks.remove(0))),
            _ => Some(Pattern::Phrase(toks)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub name: String,
    pub patterns: Vec<Pattern>,
}

#[derive(Debug, Clone, Default)]
struct Matcher {
    words: HashMap<String, Vec<usize>>,
    stems: HashMap<String, Vec<usize>>,
    // distinct stem lengths in chars, ascending
    stem_lengths: Vec<usize>,
    // first token -> (category, phrase), longest phrases first
    phrases: HashMap<String, Vec<(usize, Vec<String>)>>,
}

impl Matcher {
    fn build(categories: &[Category]) -> Self {
        let mut m = Matcher::default();
        for (ci, cat) in categories.iter().enumerate() {
            for p in &cat.patterns {
                match p {
                    Pattern::Word(w) => m.words.entry(w.clone()).or_default().push(ci),
                    Pattern::Stem(s) => m.stems.entry(s.clone()).or_default().push(ci),
                    Pattern::Phrase(toks) => m.phrases.entry(toks[0].clone()).or_default().push((ci, toks.clone())),
                }
            }
        }
        let mut lengths: Vec<usize> = m.stems.keys().map(|s| s.chars().count()).collect();
        lengths.sort_unstable();
        lengths.dedup();
        m.stem_lengths = lengths;
        for list in m.phrases.values_mut() {
            list.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));
        }
        m
    }
}

/// Named categories of word, stem and phrase patterns. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Lexicon {
    name: String,
    categories: Vec<Category>,
    matcher: Matcher,
}

impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.categories == other.categories
    }
}

impl Lexicon {
    /// Builds a lexicon; category names must be unique. Duplicate patterns
    /// within a category are dropped.
    pub fn new(name: impl Into<String>, categories: Vec<Category>) -> Result<Self, LexiconError> {
        let mut seen = HashSet::new();
        let mut cleaned = Vec::with_capacity(categories.len());
        for cat in categories {
            if !seen.insert(cat.name.clone()) {
                return Err(LexiconError::DuplicateCategory(cat.name));
            }
            let mut uniq = HashSet::new();
            let patterns = cat.patterns.into_iter().filter(|p| uniq.insert(p.clone())).collect();
            cleaned.push(Category {
                name: cat.name,
                patterns,
            });
        }
        let matcher = Matcher::build(&cleaned);
        Ok(Lexicon {
            name: name.into(),
            categories: cleaned,
            matcher,
        })
    }

    pub fn empty(name: impl Into<String>) -> Self {
        Lexicon::new(name, Vec::new()).expect("no categories")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn category_names(&self) -> Vec<&str> {
        self.categories.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn category_index(&self, name: &str) -> Result<usize, LexiconError> {
        self.categories
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| LexiconError::UnknownCategory(name.to_string()))
    }

    /// Collapses all categories into one named after the lexicon.
    pub fn merged(&self) -> Lexicon {
        let patterns = self
            .categories
            .iter()
            .flat_map(|c| c.patterns.iter().cloned())
            .collect();
        Lexicon::new(
            self.name.clone(),
            vec![Category {
                name: self.name.clone(),
                patterns,
            }],
        )
        .expect("single category")
    }

    /// Reads `category<TAB>pattern` lines. Lines without a tab go to a
    /// category named after the lexicon; `#` starts a comment line.
    pub fn from_tsv<R: Read>(name: &str, reader: R) -> Result<Self, LexiconError> {
        let mut order: Vec<String> = Vec::new();
        let mut by_name: HashMap<String, Vec<Pattern>> = HashMap::new();
        for (i, line) in BufReader::new(reader).lines().enumerate() {
            let line = line.map_err(|e| LexiconError::InvalidDic {
                line: i + 1,
                message: e.to_string(),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (cat, raw) = match trimmed.split_once('\t') {
                Some((c, p)) => (c.trim().to_string(), p),
                None => (name.to_string(), trimmed),
            };
            let pattern = Pattern::parse(raw).ok_or_else(|| LexiconError::InvalidPattern {
                line: i + 1,
                pattern: raw.to_string(),
            })?;
            if !by_name.contains_key(&cat) {
                order.push(cat.clone());
            }
            by_name.entry(cat).or_default().push(pattern);
        }
        let categories = order
            .into_iter()
            .map(|n| {
                let patterns = by_name.remove(&n).unwrap_or_default();
                Category { name: n, patterns }
            })
            .collect();
        Lexicon::new(name, categories)
    }

    /// Reads the LIWC `.dic` layout: a `%`-delimited header of
    /// `id<TAB>category` lines followed by `pattern<TAB>id id ...` entries.
    pub fn from_dic<R: Read>(name: &str, reader: R) -> Result<Self, LexiconError> {
        let mut lines = BufReader::new(reader).lines().enumerate();
        let bad = |line: usize, message: String| LexiconError::InvalidDic {
            line: line + 1,
            message,
        };

        let mut opened = false;
        for (i, line) in lines.by_ref() {
            let line = line.map_err(|e| bad(i, e.to_string()))?;
            match line.trim() {
                "" => continue,
                "%" => {
                    opened = true;
                    break;
                }
                other => return Err(bad(i, format!("expected `%`, found `{other}`"))),
            }
        }
        if !opened {
            return Err(bad(0, "missing `%` header".into()));
        }

        let mut id_to_index: HashMap<String, usize> = HashMap::new();
        let mut categories: Vec<Category> = Vec::new();
        let mut closed = false;
        for (i, line) in lines.by_ref() {
            let line = line.map_err(|e| bad(i, e.to_string()))?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if trimmed == "%" {
                closed = true;
                break;
            }
            let mut parts = trimmed.split_whitespace();
            let (Some(id), Some(cat)) = (parts.next(), parts.next()) else {
                return Err(bad(i, format!("malformed category line `{trimmed}`")));
            };
            if id_to_index.insert(id.to_string(), categories.len()).is_some() {
                return Err(bad(i, format!("duplicate category id `{id}`")));
            }
            categories.push(Category {
                name: cat.to_string(),
                patterns: Vec::new(),
            });
        }
        if !closed {
            return Err(bad(0, "unterminated category header".into()));
        }

        for (i, line) in lines {
            let line = line.map_err(|e| bad(i, e.to_string()))?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let (raw, ids) = match trimmed.split_once('\t') {
                Some((p, rest)) => (p.trim(), rest),
                None => trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, "")),
            };
            let pattern = Pattern::parse(raw).ok_or_else(|| LexiconError::InvalidPattern {
                line: i + 1,
                pattern: raw.to_string(),
            })?;
            for id in ids.split_whitespace() {
                let ci = *id_to_index
                    .get(id)
                    .ok_or_else(|| bad(i, format!("undeclared category id `{id}`")))?;
                categories[ci].patterns.push(pattern.clone());
            }
        }
        Lexicon::new(name, categories)
    }

    /// Loads `.dic` files as LIWC dictionaries and anything else as TSV.
    pub fn load(path: &Path, name: &str) -> Result<Self, LexiconError> {
        let file = std::fs::File::open(path).map_err(|e| LexiconError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("dic") => Lexicon::from_dic(name, file),
            _ => Lexicon::from_tsv(name, file),
        }
    }
}

/// Per-category match counts for one text, in lexicon category order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub counts: Vec<u32>,
    pub token_count: usize,
}

impl CategoryCounts {
    pub fn get(&self, category: usize) -> u32 {
        self.counts[category]
    }
}

pub fn match_counts<S: AsRef<str>>(tokens: &[S], lexicon: &Lexicon) -> CategoryCounts {
    let m = &lexicon.matcher;
    let n = tokens.len();
    let mut counts = vec![0u32; lexicon.len()];
    // first position each category may match at again
    let mut next_free = vec![0usize; lexicon.len()];

    for i in 0..n {
        let tok = tokens[i].as_ref();
        if let Some(cands) = m.phrases.get(tok) {
            for (ci, phrase) in cands {
                let end = i + phrase.len();
                if next_free[*ci] <= i && end <= n && phrase.iter().zip(&tokens[i..end]).all(|(p, t)| p == t.as_ref()) {
                    counts[*ci] += 1;
                    next_free[*ci] = end;
                }
            }
        }
        let mut hit = |ci: usize| {
            if next_free[ci] <= i {
                counts[ci] += 1;
                next_free[ci] = i + 1;
            }
        };
        if let Some(cats) = m.words.get(tok) {
            cats.iter().for_each(|&ci| hit(ci));
        }
        if !m.stem_lengths.is_empty() {
            let boundaries: Vec<usize> = tok.char_indices().map(|(b, _)| b).skip(1).chain([tok.len()]).collect();
            for &len in &m.stem_lengths {
                let Some(&end) = boundaries.get(len - 1) else { break };
                if let Some(cats) = m.stems.get(&tok[..end]) {
                    cats.iter().for_each(|&ci| hit(ci));
                }
            }
        }
    }
    CategoryCounts { counts, token_count: n }
}

/// Tokenizes and counts every text, in parallel, preserving order.
pub fn count_texts<S: AsRef<str> + Sync>(texts: &[S], lexicon: &Lexicon) -> Vec<CategoryCounts> {
    parallel::map(texts, |t| match_counts(&tokenize(t.as_ref()), lexicon))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Matches per tweet.
    #[default]
    PerTweet,
    /// Matches per token.
    PerWord,
}

impl std::str::FromStr for Normalization {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "per-tweet" => Ok(Normalization::PerTweet),
            "per-word" => Ok(Normalization::PerWord),
            other => Err(format!("unknown normalization `{other}`")),
        }
    }
}

/// Exact integer totals behind a mean: matches, tweets and tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Totals {
    pub matches: u64,
    pub tweets: u64,
    pub tokens: u64,
}

impl Totals {
    pub fn of<'a>(counts: impl IntoIterator<Item = &'a CategoryCounts>, category: usize) -> Self {
        counts.into_iter().fold(Totals::default(), |acc, c| Totals {
            matches: acc.matches + u64::from(c.counts[category]),
            tweets: acc.tweets + 1,
            tokens: acc.tokens + c.token_count as u64,
        })
    }

    pub fn denominator(&self, norm: Normalization) -> u64 {
        match norm {
            Normalization::PerTweet => self.tweets,
            Normalization::PerWord => self.tokens,
        }
    }

    /// `None` when the denominator is zero.
    pub fn fraction(&self, norm: Normalization) -> Option<f64> {
        let d = self.denominator(norm);
        (d > 0).then(|| self.matches as f64 / d as f64)
    }
}

/// Mean matches per tweet (or per token) for one category over a tweet group.
pub fn mean_per_tweet(counts: &[CategoryCounts], category: usize, norm: Normalization) -> Result<f64, LexiconError> {
    if counts.is_empty() {
        return Err(LexiconError::EmptyGroup);
    }
    Ok(Totals::of(counts, category).fraction(norm).unwrap_or(0.0))
}

/// Small illustrative lexicons shipped with the crate. They are stand-ins
/// for the real dictionaries, which must be supplied by the user.
pub mod builtin {
    use super::Lexicon;

    macro_rules! builtin {
        ($fn:ident, $name:literal, $file:literal) => {
            pub fn $fn() -> Lexicon {
                Lexicon::from_tsv($name, include_str!(concat!("../lexicons/", $file)).as_bytes())
                    .expect("bundled lexicon parses")
            }
        };
    }

    builtin!(liwc_sample, "liwc", "liwc_sample.tsv");
    builtin!(opinion, "opinion", "opinion.tsv");
    builtin!(realize, "realize", "realize.tsv");
    builtin!(slang, "slang", "slang.tsv");
    builtin!(hyperbolic, "hyperbolic", "hyperbolic.tsv");
    builtin!(contraction, "contraction", "contractions.tsv");
    builtin!(stopwords, "stopwords", "stopwords.tsv");
    builtin!(phrases, "phrases", "phrases.tsv");
}

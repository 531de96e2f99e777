//! Data model and ingestion for annotated documents, tweets and user timelines.
//!
//! Documents come from a canonical CSV (or a JSON array of the same records),
//! tweets and timelines from JSONL. Every row either becomes a record or an
//! error carrying its line number; nothing is dropped silently.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Columns of the canonical document CSV, in canonical order.
pub const DOCUMENT_COLUMNS: [&str; 11] = [
    "id",
    "kind",
    "source",
    "discipline",
    "strength7",
    "advice",
    "sample",
    "journal_ref",
    "publish_date",
    "headline",
    "urls",
];

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum CorpusError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("missing column `{column}`")]
    MissingColumn { column: String },
    #[error("line {line}: {field} = {value} is out of range")]
    OutOfRangeLevel { line: u64, field: String, value: i64 },
    #[error("line {line}: unknown {field} `{value}`")]
    UnknownEnum { line: u64, field: String, value: String },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: u64, id: String },
    #[error("line {line}: {message}")]
    ParseError { line: u64, message: String },
    #[error("line {line}: missing field `{field}`")]
    MissingField { line: u64, field: String },
    #[error("line {line}: invalid timestamp `{value}`")]
    InvalidTimestamp { line: u64, value: String },
    #[error("dangling references from {}", ids.join(", "))]
    DanglingReference { ids: Vec<String> },
    #[error("kind rule violated by {}", ids.join(", "))]
    KindViolation { ids: Vec<String> },
}

impl CorpusError {
    fn io(path: &Path, err: impl fmt::Display) -> Self {
        CorpusError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}

/// Lowercases and drops everything but ASCII alphanumerics, so that
/// `Press Release`, `press_release` and `press-release` compare equal.
fn normalize_key(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocKind {
    Journal,
    PressRelease,
    NewsArticle,
}

impl DocKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DocKind::Journal => "journal",
            DocKind::PressRelease => "press_release",
            DocKind::NewsArticle => "news_article",
        }
    }
}

impl FromStr for DocKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match normalize_key(s).as_str() {
            "journal" | "j" => Ok(DocKind::Journal),
            "pressrelease" | "press" | "pr" => Ok(DocKind::PressRelease),
            "newsarticle" | "news" | "article" => Ok(DocKind::NewsArticle),
            _ => Err(()),
        }
    }
}

impl fmt::Display for DocKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Health research discipline taxonomy of the annotated dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discipline {
    Lifestyle,
    MentalHealth,
    Childhood,
    Treatment,
    ObservationalIdentification,
    Policy,
    Ageing,
    PhysicalDisease,
    NotMentioned,
}

impl Discipline {
    pub const ALL: [Discipline; 9] = [
        Discipline::Lifestyle,
        Discipline::MentalHealth,
        Discipline::Childhood,
        Discipline::Treatment,
        Discipline::ObservationalIdentification,
        Discipline::Policy,
        Discipline::Ageing,
        Discipline::PhysicalDisease,
        Discipline::NotMentioned,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Discipline::Lifestyle => "lifestyle",
            Discipline::MentalHealth => "mental_health",
            Discipline::Childhood => "childhood",
            Discipline::Treatment => "treatment",
            Discipline::ObservationalIdentification => "observational_identification",
            Discipline::Policy => "policy",
            Discipline::Ageing => "ageing",
            Discipline::PhysicalDisease => "physical_disease",
            Discipline::NotMentioned => "not_mentioned",
        }
    }

    /// Parses a discipline name; unknown names yield `None`.
    pub fn parse(s: &str) -> Option<Self> {
        match normalize_key(s).as_str() {
            "lifestyle" => Some(Discipline::Lifestyle),
            "mentalhealth" => Some(Discipline::MentalHealth),
            "childhood" => Some(Discipline::Childhood),
            "treatment" => Some(Discipline::Treatment),
            "observationalidentification" | "observational" => Some(Discipline::ObservationalIdentification),
            "policy" => Some(Discipline::Policy),
            "ageing" | "aging" => Some(Discipline::Ageing),
            "physicaldisease" => Some(Discipline::PhysicalDisease),
            "notmentioned" | "" => Some(Discipline::NotMentioned),
            _ => None,
        }
    }
}

impl fmt::Display for Discipline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sample {
    Human,
    NonHuman,
}

impl Sample {
    pub fn as_str(self) -> &'static str {
        match self {
            Sample::Human => "human",
            Sample::NonHuman => "non_human",
        }
    }
}

impl FromStr for Sample {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match normalize_key(s).as_str() {
            "human" => Ok(Sample::Human),
            "nonhuman" => Ok(Sample::NonHuman),
            _ => Err(()),
        }
    }
}

/// Parses an RFC 3339 timestamp, or a bare `YYYY-MM-DD` date taken as midnight UTC.
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.with_timezone(&Utc));
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|ndt| ndt.and_utc())
}

pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

mod ts_serde {
    use super::*;
    use serde::{de::Error as _, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ts: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_timestamp(ts))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let raw = String::deserialize(d)?;
        parse_timestamp(&raw).ok_or_else(|| D::Error::custom(format!("invalid timestamp `{raw}`")))
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(ts: &Option<DateTime<Utc>>, s: S) -> Result<S::Ok, S::Error> {
            match ts {
                Some(ts) => s.serialize_some(&format_timestamp(ts)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<DateTime<Utc>>, D::Error> {
            match Option::<String>::deserialize(d)? {
                None => Ok(None),
                Some(raw) if raw.trim().is_empty() => Ok(None),
                Some(raw) => parse_timestamp(&raw)
                    .map(Some)
                    .ok_or_else(|| D::Error::custom(format!("invalid timestamp `{raw}`"))),
            }
        }
    }
}

/// A journal paper, press release or news article with its annotations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub kind: DocKind,
    pub source: String,
    pub discipline: Discipline,
    pub strength7: u8,
    pub advice: u8,
    pub sample: Sample,
    pub journal_ref: Option<String>,
    #[serde(with = "ts_serde::option", default)]
    pub publish_date: Option<DateTime<Utc>>,
    pub headline: Option<String>,
    #[serde(default)]
    pub urls: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub text: String,
    #[serde(with = "ts_serde")]
    pub created_at: DateTime<Utc>,
    pub likes: u64,
    pub retweets: u64,
    #[serde(default)]
    pub hashtags: Vec<String>,
    #[serde(default)]
    pub mentions: Vec<String>,
    #[serde(default)]
    pub urls: Vec<String>,
    pub author_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub article_ref: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserTimeline {
    pub user_id: String,
    pub follower_count: u64,
    pub tweets: Vec<Tweet>,
}

/// Records that parsed, plus the rows that did not.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested<T> {
    pub items: Vec<T>,
    pub errors: Vec<CorpusError>,
}

impl<T> Ingested<T> {
    /// Number of input rows seen.
    pub fn rows(&self) -> usize {
        self.items.len() + self.errors.len()
    }

    /// Fails with the first row error, if any.
    pub fn into_result(self) -> Result<Vec<T>, CorpusError> {
        match self.errors.into_iter().next() {
            Some(e) => Err(e),
            None => Ok(self.items),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocumentFormat {
    Csv,
    Json,
}

impl DocumentFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => DocumentFormat::Json,
            _ => DocumentFormat::Csv,
        }
    }
}

fn check_level(line: u64, field: &str, value: i64, max: i64) -> Result<u8, CorpusError> {
    if (1..=max).contains(&value) {
        Ok(value as u8)
    } else {
        Err(CorpusError::OutOfRangeLevel {
            line,
            field: field.to_string(),
            value,
        })
    }
}

fn parse_int(line: u64, field: &str, raw: &str) -> Result<i64, CorpusError> {
    raw.trim().parse::<i64>().map_err(|_| CorpusError::ParseError {
        line,
        message: format!("{field} `{raw}` is not an integer"),
    })
}

fn non_empty(raw: &str) -> Option<String> {
    let t = raw.trim();
    (!t.is_empty()).then(|| t.to_string())
}

fn document_from_fields(line: u64, get: &dyn Fn(&str) -> Option<String>) -> Result<Document, CorpusError> {
    let field = |name: &str| {
        get(name).ok_or_else(|| CorpusError::MissingField {
            line,
            field: name.to_string(),
        })
    };
    let id = field("id")?.trim().to_string();
    if id.is_empty() {
        return Err(CorpusError::MissingField {
            line,
            field: "id".into(),
        });
    }
    let kind_raw = field("kind")?;
    let kind = kind_raw.parse::<DocKind>().map_err(|_| CorpusError::UnknownEnum {
        line,
        field: "kind".into(),
        value: kind_raw.clone(),
    })?;
    let discipline_raw = field("discipline")?;
    let discipline = Discipline::parse(&discipline_raw).unwrap_or_else(|| {
        log::warn!("line {line}: unknown discipline `{discipline_raw}`, using not_mentioned");
        Discipline::NotMentioned
    });
    let strength7 = check_level(
        line,
        "strength7",
        parse_int(line, "strength7", &field("strength7")?)?,
        7,
    )?;
    let advice = check_level(line, "advice", parse_int(line, "advice", &field("advice")?)?, 4)?;
    let sample_raw = field("sample")?;
    let sample = sample_raw.parse::<Sample>().map_err(|_| CorpusError::UnknownEnum {
        line,
        field: "sample".into(),
        value: sample_raw.clone(),
    })?;
    let publish_date = match get("publish_date").and_then(|s| non_empty(&s)) {
        None => None,
        Some(raw) => Some(parse_timestamp(&raw).ok_or(CorpusError::InvalidTimestamp { line, value: raw })?),
    };
    let urls = get("urls")
        .map(|s| {
            s.split('|')
                .map(str::trim)
                .filter(|u| !u.is_empty())
                .map(str::to_string)
                .collect()
        })
        .unwrap_or_default();
    Ok(Document {
        id,
        kind,
        source: field("source")?.trim().to_string(),
        discipline,
        strength7,
        advice,
        sample,
        journal_ref: get("journal_ref").and_then(|s| non_empty(&s)),
        publish_date,
        headline: get("headline").and_then(|s| non_empty(&s)),
        urls,
    })
}

fn reject_duplicates(docs: Vec<(u64, Document)>, errors: &mut Vec<CorpusError>) -> Vec<Document> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(docs.len());
    for (line, doc) in docs {
        if seen.insert(doc.id.clone()) {
            out.push(doc);
        } else {
            errors.push(CorpusError::DuplicateId { line, id: doc.id });
        }
    }
    out
}

/// Reads documents in the canonical CSV layout. A missing column is fatal;
/// per-row problems are collected with their line numbers.
pub fn read_documents_csv<R: Read>(reader: R) -> Result<Ingested<Document>, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::Headers)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CorpusError::ParseError {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let mut index = BTreeMap::new();
    for column in DOCUMENT_COLUMNS {
        let pos = headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(column))
            .ok_or_else(|| CorpusError::MissingColumn {
                column: column.to_string(),
            })?;
        index.insert(column, pos);
    }

    let mut parsed = Vec::new();
    let mut errors = Vec::new();
    for record in rdr.records() {
        match record {
            Err(e) => errors.push(CorpusError::ParseError {
                line: e.position().map(|p| p.line()).unwrap_or(0),
                message: e.to_string(),
            }),
            Ok(rec) => {
                let line = rec.position().map(|p| p.line()).unwrap_or(0);
                let get = |name: &str| index.get(name).and_then(|&i| rec.get(i)).map(str::to_string);
                match document_from_fields(line, &get) {
                    Ok(doc) => parsed.push((line, doc)),
                    Err(e) => errors.push(e),
                }
            }
        }
    }
    let items = reject_duplicates(parsed, &mut errors);
    errors.sort_by_key(error_line);
    Ok(Ingested { items, errors })
}

fn error_line(e: &CorpusError) -> u64 {
    match e {
        CorpusError::OutOfRangeLevel { line, .. }
        | CorpusError::UnknownEnum { line, .. }
        | CorpusError::DuplicateId { line, .. }
        | CorpusError::ParseError { line, .. }
        | CorpusError::MissingField { line, .. }
        | CorpusError::InvalidTimestamp { line, .. } => *line,
        _ => 0,
    }
}

/// Reads a JSON array of document objects. Element `i` is reported as line `i + 1`.
pub fn read_documents_json<R: Read>(reader: R) -> Result<Ingested<Document>, CorpusError> {
    let values: Vec<serde_json::Value> = serde_json::from_reader(reader).map_err(|e| CorpusError::ParseError {
        line: e.line() as u64,
        message: e.to_string(),
    })?;
    let mut parsed = Vec::new();
    let mut errors = Vec::new();
    for (i, value) in values.iter().enumerate() {
        let line = i as u64 + 1;
        let get = |name: &str| match value.get(name) {
            None | Some(serde_json::Value::Null) => None,
            Some(serde_json::Value::String(s)) => Some(s.clone()),
            Some(serde_json::Value::Array(items)) => {
                Some(items.iter().filter_map(|v| v.as_str()).collect::<Vec<_>>().join("|"))
            }
            Some(other) => Some(other.to_string()),
        };
        match document_from_fields(line, &get) {
            Ok(doc) => parsed.push((line, doc)),
            Err(e) => errors.push(e),
        }
    }
    let items = reject_duplicates(parsed, &mut errors);
    errors.sort_by_key(error_line);
    Ok(Ingested { items, errors })
}

pub fn ingest_documents(path: &Path, format: DocumentFormat) -> Result<Ingested<Document>, CorpusError> {
    let file = std::fs::File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let reader = BufReader::new(file);
    match format {
        DocumentFormat::Csv => read_documents_csv(reader),
        DocumentFormat::Json => read_documents_json(reader),
    }
}

/// Loads and validates documents, failing on the first bad row.
pub fn load_documents(path: &Path, format: DocumentFormat) -> Result<Vec<Document>, CorpusError> {
    ingest_documents(path, format)?.into_result()
}

#[derive(Debug, Deserialize)]
struct RawTweet {
    id: Option<String>,
    text: Option<String>,
    created_at: Option<String>,
    likes: Option<i64>,
    retweets: Option<i64>,
    #[serde(default)]
    hashtags: Vec<String>,
    #[serde(default)]
    mentions: Vec<String>,
    #[serde(default)]
    urls: Vec<String>,
    author_id: Option<String>,
    article_ref: Option<String>,
}

impl RawTweet {
    fn validate(self, line: u64, require_article: bool) -> Result<Tweet, CorpusError> {
        let missing = |field: &str| CorpusError::MissingField {
            line,
            field: field.to_string(),
        };
        let count = |field: &str, v: Option<i64>| -> Result<u64, CorpusError> {
            let v = v.ok_or_else(|| missing(field))?;
            u64::try_from(v).map_err(|_| CorpusError::OutOfRangeLevel {
                line,
                field: field.to_string(),
                value: v,
            })
        };
        let created_raw = self.created_at.ok_or_else(|| missing("created_at"))?;
        let created_at = parse_timestamp(&created_raw).ok_or(CorpusError::InvalidTimestamp {
            line,
            value: created_raw,
        })?;
        let article_ref = self.article_ref.filter(|s| !s.trim().is_empty());
        if require_article && article_ref.is_none() {
            return Err(missing("article_ref"));
        }
        Ok(Tweet {
            id: self.id.ok_or_else(|| missing("id"))?,
            text: self.text.ok_or_else(|| missing("text"))?,
            created_at,
            likes: count("likes", self.likes)?,
            retweets: count("retweets", self.retweets)?,
            hashtags: self.hashtags,
            mentions: self.mentions,
            urls: self.urls,
            author_id: self.author_id.ok_or_else(|| missing("author_id"))?,
            article_ref,
        })
    }
}

fn for_each_jsonl_line<R: BufRead>(
    reader: R,
    mut f: impl FnMut(u64, &str) -> Result<(), CorpusError>,
) -> Vec<CorpusError> {
    let mut errors = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i as u64 + 1;
        match line {
            Err(e) => errors.push(CorpusError::ParseError {
                line: lineno,
                message: e.to_string(),
            }),
            Ok(l) if l.trim().is_empty() => {}
            Ok(l) => {
                if let Err(e) = f(lineno, &l) {
                    errors.push(e);
                }
            }
        }
    }
    errors
}

fn parse_json_line<T: for<'de> Deserialize<'de>>(line: u64, text: &str) -> Result<T, CorpusError> {
    serde_json::from_str(text).map_err(|e| CorpusError::ParseError {
        line,
        message: e.to_string(),
    })
}

/// Reads tweets from JSONL. Every tweet must name the article it shares.
pub fn read_tweets_jsonl<R: BufRead>(reader: R) -> Ingested<Tweet> {
    let mut items = Vec::new();
    let errors = for_each_jsonl_line(reader, |line, text| {
        let raw: RawTweet = parse_json_line(line, text)?;
        items.push(raw.validate(line, true)?);
        Ok(())
    });
    Ingested { items, errors }
}

pub fn ingest_tweets(path: &Path) -> Result<Ingested<Tweet>, CorpusError> {
    let file = std::fs::File::open(path).map_err(|e| CorpusError::io(path, e))?;
    Ok(read_tweets_jsonl(BufReader::new(file)))
}

pub fn load_tweets(path: &Path) -> Result<Vec<Tweet>, CorpusError> {
    ingest_tweets(path)?.into_result()
}

#[derive(Debug, Deserialize)]
struct RawTimeline {
    user_id: Option<String>,
    follower_count: Option<i64>,
    tweets: Option<Vec<RawTweet>>,
}

fn sort_timeline(tweets: &mut [Tweet]) {
    tweets.sort_by(|a, b| a.created_at.cmp(&b.created_at).then_with(|| a.id.cmp(&b.id)));
}

/// Reads user timelines from JSONL; tweets inside each timeline are sorted by time.
pub fn read_timelines_jsonl<R: BufRead>(reader: R) -> Ingested<UserTimeline> {
    let mut items: Vec<UserTimeline> = Vec::new();
    let mut seen = HashSet::new();
    let errors = for_each_jsonl_line(reader, |line, text| {
        let raw: RawTimeline = parse_json_line(line, text)?;
        let user_id = raw.user_id.ok_or(CorpusError::MissingField {
            line,
            field: "user_id".into(),
        })?;
        let followers = raw.follower_count.ok_or(CorpusError::MissingField {
            line,
            field: "follower_count".into(),
        })?;
        let follower_count = u64::try_from(followers).map_err(|_| CorpusError::OutOfRangeLevel {
            line,
            field: "follower_count".into(),
            value: followers,
        })?;
        let mut tweets = raw
            .tweets
            .unwrap_or_default()
            .into_iter()
            .map(|t| t.validate(line, false))
            .collect::<Result<Vec<_>, _>>()?;
        if !seen.insert(user_id.clone()) {
            return Err(CorpusError::DuplicateId { line, id: user_id });
        }
        sort_timeline(&mut tweets);
        items.push(UserTimeline {
            user_id,
            follower_count,
            tweets,
        });
        Ok(())
    });
    Ingested { items, errors }
}

pub fn ingest_timelines(path: &Path) -> Result<Ingested<UserTimeline>, CorpusError> {
    let file = std::fs::File::open(path).map_err(|e| CorpusError::io(path, e))?;
    Ok(read_timelines_jsonl(BufReader::new(file)))
}

pub fn load_timelines(path: &Path) -> Result<Vec<UserTimeline>, CorpusError> {
    ingest_timelines(path)?.into_result()
}

/// Documents, tweets and timelines held together. Immutable once linked.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub documents: BTreeMap<String, Document>,
    pub tweets: Vec<Tweet>,
    pub timelines: BTreeMap<String, UserTimeline>,
}

impl Corpus {
    pub fn new(
        documents: Vec<Document>,
        tweets: Vec<Tweet>,
        timelines: Vec<UserTimeline>,
    ) -> Result<Self, CorpusError> {
        let mut docs = BTreeMap::new();
        for doc in documents {
            if docs.contains_key(&doc.id) {
                return Err(CorpusError::DuplicateId { line: 0, id: doc.id });
            }
            docs.insert(doc.id.clone(), doc);
        }
        let mut tls = BTreeMap::new();
        for tl in timelines {
            if tls.contains_key(&tl.user_id) {
                return Err(CorpusError::DuplicateId {
                    line: 0,
                    id: tl.user_id,
                });
            }
            tls.insert(tl.user_id.clone(), tl);
        }
        Ok(Corpus {
            documents: docs,
            tweets,
            timelines: tls,
        })
    }

    pub fn document(&self, id: &str) -> Option<&Document> {
        self.documents.get(id)
    }

    /// The journal a press release or news article refers to, if it resolves.
    pub fn journal_of(&self, doc: &Document) -> Option<&Document> {
        doc.journal_ref
            .as_deref()
            .and_then(|id| self.documents.get(id))
            .filter(|j| j.kind == DocKind::Journal)
    }

    /// The news article a tweet shares, if it resolves.
    pub fn article_of(&self, tweet: &Tweet) -> Option<&Document> {
        tweet
            .article_ref
            .as_deref()
            .and_then(|id| self.documents.get(id))
            .filter(|d| d.kind == DocKind::NewsArticle)
    }

    pub fn documents_of_kind(&self, kind: DocKind) -> impl Iterator<Item = &Document> {
        self.documents.values().filter(move |d| d.kind == kind)
    }

    pub fn count_kind(&self, kind: DocKind) -> usize {
        self.documents_of_kind(kind).count()
    }
}

/// Cross-reference problems found in a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LinkReport {
    /// Ids of documents/tweets whose reference does not resolve to the right kind.
    pub dangling: Vec<String>,
    /// Ids of documents violating the journal-reference rule.
    pub kind_violations: Vec<String>,
}

impl LinkReport {
    pub fn is_clean(&self) -> bool {
        self.dangling.is_empty() && self.kind_violations.is_empty()
    }
}

pub fn check_links(corpus: &Corpus) -> LinkReport {
    let mut report = LinkReport::default();
    for doc in corpus.documents.values() {
        match (doc.kind, &doc.journal_ref) {
            (DocKind::Journal, Some(_)) => report.kind_violations.push(doc.id.clone()),
            (DocKind::Journal, None) => {}
            (_, None) => report.kind_violations.push(doc.id.clone()),
            (_, Some(_)) => {
                if corpus.journal_of(doc).is_none() {
                    report.dangling.push(doc.id.clone());
                }
            }
        }
    }
    let tweet_refs = corpus.tweets.iter().chain(
        corpus
            .timelines
            .values()
            .flat_map(|tl| tl.tweets.iter())
            .filter(|t| t.article_ref.is_some()),
    );
    let mut dangling_tweets = BTreeSet::new();
    for tweet in tweet_refs {
        if corpus.article_of(tweet).is_none() {
            dangling_tweets.insert(tweet.id.clone());
        }
    }
    report.dangling.extend(dangling_tweets);
    report
}

/// Verifies every cross-reference and returns the corpus with timelines in
/// time order. Linking an already linked corpus is a no-op.
pub fn link(mut corpus: Corpus) -> Result<Corpus, CorpusError> {
    let report = check_links(&corpus);
    if !report.kind_violations.is_empty() {
        return Err(CorpusError::KindViolation {
            ids: report.kind_violations,
        });
    }
    if !report.dangling.is_empty() {
        return Err(CorpusError::DanglingReference { ids: report.dangling });
    }
    for tl in corpus.timelines.values_mut() {
        sort_timeline(&mut tl.tweets);
    }
    Ok(corpus)
}

/// Canonical JSON for a document list: pretty-printed, fields in declaration order.
pub fn write_documents_json<W: Write>(docs: &[Document], mut writer: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut writer, docs)?;
    writer.write_all(b"\n")
}

pub fn write_documents_csv<W: Write>(docs: &[Document], writer: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(DOCUMENT_COLUMNS)?;
    for d in docs {
        let strength = d.strength7.to_string();
        let advice = d.advice.to_string();
        let date = d.publish_date.as_ref().map(format_timestamp).unwrap_or_default();
        let urls = d.urls.join("|");
        w.write_record([
            d.id.as_str(),
            d.kind.as_str(),
            d.source.as_str(),
            d.discipline.as_str(),
            strength.as_str(),
            advice.as_str(),
            d.sample.as_str(),
            d.journal_ref.as_deref().unwrap_or(""),
            date.as_str(),
            d.headline.as_deref().unwrap_or(""),
            urls.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_jsonl<W: Write, T: Serialize>(items: &[T], mut writer: W) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut writer, item)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

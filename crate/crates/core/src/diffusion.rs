//! How news articles spread on Twitter: tweet retention, arrival buckets,
//! engagement means and the late/early ratio-of-ratios lexicon analysis.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, TimeDelta, Utc};
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, DocKind, Document, Tweet};
use crate::exaggeration::{label_corpus, LabelSet, StrengthScale};
use crate::lexicon::{count_texts, match_counts, tokenize, CategoryCounts, Lexicon, Normalization, Totals};
use crate::parallel;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error", content = "detail", rename_all = "snake_case")]
pub enum DiffusionError {
    #[error("article `{0}` has no publish date")]
    MissingPublishDate(String),
    #[error("dangling references from {}", .0.join(", "))]
    DanglingReference(Vec<String>),
    #[error("empty group: {0}")]
    EmptyGroup(String),
    #[error("tweet `{0}` was not posted after its article")]
    NotAfterPublication(String),
    #[error("ratio table: {0}")]
    Format(String),
}

pub const DEFAULT_DOMAIN_WORDS: [&str; 3] = ["news", "bbc", "telegraph"];

// Query parameters that identify a campaign or referrer, not the page.
const TRACKING_PARAMS: [&str; 7] = ["fbclid", "gclid", "mc_cid", "mc_eid", "ocid", "ref", "cmpid"];

/// Canonical form used to compare tweet links with article links: no scheme,
/// lowercase host, no fragment, no tracking parameters, no trailing slash.
pub fn canonicalize_url(raw: &str) -> String {
    let raw = raw.trim();
    let with_scheme = if raw.contains("://") {
        raw.to_string()
    } else {
        format!("http://{raw}")
    };
    let Ok(parsed) = url::Url::parse(&with_scheme) else {
        return raw.trim_end_matches('/').to_ascii_lowercase();
    };
    let mut out = parsed.host_str().unwrap_or("").to_ascii_lowercase();
    if let Some(port) = parsed.port() {
        out.push_str(&format!(":{port}"));
    }
    out.push_str(parsed.path().trim_end_matches('/'));
    let kept: Vec<String> = parsed
        .query_pairs()
        .filter(|(k, _)| {
            let k = k.to_ascii_lowercase();
            !k.starts_with("utm_") && !TRACKING_PARAMS.contains(&k.as_str())
        })
        .map(|(k, v)| {
            if v.is_empty() {
                k.into_owned()
            } else {
                format!("{k}={v}")
            }
        })
        .collect();
    if !kept.is_empty() {
        out.push('?');
        out.push_str(&kept.join("&"));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bucket {
    Early,
    Mid,
    Late,
}

impl Bucket {
    pub const ALL: [Bucket; 3] = [Bucket::Early, Bucket::Mid, Bucket::Late];

    pub fn as_str(self) -> &'static str {
        match self {
            Bucket::Early => "early",
            Bucket::Mid => "mid",
            Bucket::Late => "late",
        }
    }
}

/// Arrival-time boundaries. Early is `(0, early]`, mid `(early, late]`,
/// late anything beyond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArrivalBuckets {
    pub early: TimeDelta,
    pub late: TimeDelta,
}

impl Default for ArrivalBuckets {
    fn default() -> Self {
        ArrivalBuckets::from_days(1, 365)
    }
}

impl ArrivalBuckets {
    pub fn from_days(early: i64, late: i64) -> Self {
        ArrivalBuckets {
            early: TimeDelta::days(early),
            late: TimeDelta::days(late),
        }
    }

    /// `None` for tweets at or before publication.
    pub fn bucket(&self, delta: TimeDelta) -> Option<Bucket> {
        if delta <= TimeDelta::zero() {
            None
        } else if delta <= self.early {
            Some(Bucket::Early)
        } else if delta <= self.late {
            Some(Bucket::Mid)
        } else {
            Some(Bucket::Late)
        }
    }

    pub fn bucket_of(&self, published: DateTime<Utc>, tweeted: DateTime<Utc>) -> Option<Bucket> {
        self.bucket(tweeted - published)
    }
}

fn canonical_urls(urls: &[String]) -> BTreeSet<String> {
    urls.iter().map(|u| canonicalize_url(u)).collect()
}

fn links_article(tweet: &Tweet, article_urls: &BTreeSet<String>) -> bool {
    tweet.urls.iter().any(|u| article_urls.contains(&canonicalize_url(u)))
}

/// Keeps tweets posted strictly after the article and linking to one of its urls.
pub fn filter_tweets<'a>(tweets: &[&'a Tweet], article: &Document) -> Result<Vec<&'a Tweet>, DiffusionError> {
    let published = article
        .publish_date
        .ok_or_else(|| DiffusionError::MissingPublishDate(article.id.clone()))?;
    let urls = canonical_urls(&article.urls);
    Ok(tweets
        .iter()
        .copied()
        .filter(|t| t.created_at > published && links_article(t, &urls))
        .collect())
}

/// Corpus-wide retention result. Removed tweets are listed by reason; a
/// tweet that is both early and link-less is listed as pre-publication.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Retention<'a> {
    #[serde(skip)]
    pub retained: Vec<&'a Tweet>,
    pub retained_count: usize,
    pub before_publication: Vec<String>,
    pub without_article_url: Vec<String>,
}

pub fn filter_corpus(corpus: &Corpus) -> Result<Retention<'_>, DiffusionError> {
    let refs: Vec<&Tweet> = corpus.tweets.iter().collect();
    filter_corpus_tweets(&refs, corpus)
}

pub fn filter_corpus_tweets<'a>(tweets: &[&'a Tweet], corpus: &Corpus) -> Result<Retention<'a>, DiffusionError> {
    let dangling: Vec<String> = tweets
        .iter()
        .filter(|t| corpus.article_of(t).is_none())
        .map(|t| t.id.clone())
        .collect();
    if !dangling.is_empty() {
        return Err(DiffusionError::DanglingReference(dangling));
    }
    let mut url_cache: HashMap<&str, BTreeSet<String>> = HashMap::new();
    let mut out = Retention {
        retained: Vec::new(),
        retained_count: 0,
        before_publication: Vec::new(),
        without_article_url: Vec::new(),
    };
    for &t in tweets {
        let article = corpus.article_of(t).expect("checked above");
        let published = article
            .publish_date
            .ok_or_else(|| DiffusionError::MissingPublishDate(article.id.clone()))?;
        let urls = url_cache
            .entry(article.id.as_str())
            .or_insert_with(|| canonical_urls(&article.urls));
        if t.created_at <= published {
            out.before_publication.push(t.id.clone());
        } else if !links_article(t, urls) {
            out.without_article_url.push(t.id.clone());
        } else {
            out.retained.push(t);
        }
    }
    out.retained_count = out.retained.len();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Group {
    #[serde(rename = "EN")]
    En,
    #[serde(rename = "NEN")]
    Nen,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::En => "EN",
            Group::Nen => "NEN",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn group_of(tweet: &Tweet, labels: &LabelSet) -> Option<Group> {
    let article = tweet.article_ref.as_deref()?;
    labels
        .is_exaggerated(article)
        .map(|ex| if ex { Group::En } else { Group::Nen })
}

/// Splits tweets by whether the shared article is exaggerated under `scale`.
pub fn partition_en_nen<'a>(
    tweets: &[&'a Tweet],
    corpus: &Corpus,
    scale: StrengthScale,
) -> Result<(Vec<&'a Tweet>, Vec<&'a Tweet>), DiffusionError> {
    let labels = label_corpus(corpus, scale);
    partition_with_labels(tweets, corpus, &labels)
}

pub fn partition_with_labels<'a>(
    tweets: &[&'a Tweet],
    corpus: &Corpus,
    labels: &LabelSet,
) -> Result<(Vec<&'a Tweet>, Vec<&'a Tweet>), DiffusionError> {
    let mut en = Vec::new();
    let mut nen = Vec::new();
    let mut dangling = Vec::new();
    for &t in tweets {
        let resolved = corpus.article_of(t).and_then(|_| group_of(t, labels));
        match resolved {
            Some(Group::En) => en.push(t),
            Some(Group::Nen) => nen.push(t),
            None => dangling.push(t.id.clone()),
        }
    }
    if !dangling.is_empty() {
        return Err(DiffusionError::DanglingReference(dangling));
    }
    Ok((en, nen))
}

fn chars_eq_ignore_case(a: &[char], b: &[char]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| x == y || x.to_lowercase().eq(y.to_lowercase()))
}

fn remove_ignore_case(text: &str, needle: &str) -> String {
    let needle: Vec<char> = needle.trim().chars().collect();
    if needle.is_empty() {
        return text.to_string();
    }
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        if i + needle.len() <= chars.len() && chars_eq_ignore_case(&chars[i..i + needle.len()], &needle) {
            out.push(' ');
            i += needle.len();
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    out
}

/// Compiled cleaning rules; reuse across tweets.
#[derive(Debug, Clone)]
pub struct TextCleaner {
    mention: Regex,
    domain: Option<Regex>,
}

impl TextCleaner {
    pub fn new<S: AsRef<str>>(domain_words: &[S]) -> Self {
        let words: Vec<String> = domain_words
            .iter()
            .map(|w| w.as_ref().trim())
            .filter(|w| !w.is_empty())
            .map(regex::escape)
            .collect();
        let domain = (!words.is_empty())
            .then(|| Regex::new(&format!(r"(?i)\b(?:{})\b", words.join("|"))).expect("escaped words"));
        TextCleaner {
            mention: Regex::new(r"@\w+").expect("static regex"),
            domain,
        }
    }

    /// Drops every case-insensitive occurrence of the headline, all
    /// `@mentions` and all domain words, then collapses whitespace.
    pub fn clean(&self, text: &str, headline: Option<&str>) -> String {
        let mut s = match headline {
            Some(h) => remove_ignore_case(text, h),
            None => text.to_string(),
        };
        s = self.mention.replace_all(&s, " ").into_owned();
        if let Some(re) = &self.domain {
            s = re.replace_all(&s, " ").into_owned();
        }
        s.split_whitespace().collect::<Vec<_>>().join(" ")
    }
}

pub fn clean_text<S: AsRef<str>>(text: &str, headline: Option<&str>, domain_words: &[S]) -> String {
    TextCleaner::new(domain_words).clean(text, headline)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrivalDistribution {
    pub n: u64,
    pub counts: [u64; 3],
    pub early: f64,
    pub mid: f64,
    pub late: f64,
}

fn bucket_for(tweet: &Tweet, corpus: &Corpus, buckets: &ArrivalBuckets) -> Result<Bucket, DiffusionError> {
    let article = corpus
        .article_of(tweet)
        .ok_or_else(|| DiffusionError::DanglingReference(vec![tweet.id.clone()]))?;
    let published = article
        .publish_date
        .ok_or_else(|| DiffusionError::MissingPublishDate(article.id.clone()))?;
    buckets
        .bucket_of(published, tweet.created_at)
        .ok_or_else(|| DiffusionError::NotAfterPublication(tweet.id.clone()))
}

/// Fractions of tweets arriving early, mid and late.
pub fn arrival_distribution(
    tweets: &[&Tweet],
    corpus: &Corpus,
    buckets: &ArrivalBuckets,
) -> Result<ArrivalDistribution, DiffusionError> {
    if tweets.is_empty() {
        return Err(DiffusionError::EmptyGroup("arrival".into()));
    }
    let mut counts = [0u64; 3];
    for t in tweets {
        counts[bucket_for(t, corpus, buckets)? as usize] += 1;
    }
    let n = tweets.len() as u64;
    let f = |c: u64| c as f64 / n as f64;
    Ok(ArrivalDistribution {
        n,
        counts,
        early: f(counts[0]),
        mid: f(counts[1]),
        late: f(counts[2]),
    })
}

/// Per-tweet means of likes, retweets, hashtags and mentions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributeStats {
    pub n: u64,
    pub likes: f64,
    pub retweets: f64,
    pub hashtags: f64,
    pub mentions: f64,
}

pub fn attribute_stats(tweets: &[&Tweet]) -> Result<AttributeStats, DiffusionError> {
    if tweets.is_empty() {
        return Err(DiffusionError::EmptyGroup("attributes".into()));
    }
    let n = tweets.len() as u64;
    let sum = |f: &dyn Fn(&Tweet) -> u64| tweets.iter().map(|t| f(t)).sum::<u64>() as f64 / n as f64;
    Ok(AttributeStats {
        n,
        likes: sum(&|t| t.likes),
        retweets: sum(&|t| t.retweets),
        hashtags: sum(&|t| t.hashtags.len() as u64),
        mentions: sum(&|t| t.mentions.len() as u64),
    })
}

/// A retained tweet reduced to what the lexicon analyses need.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedTweet {
    pub id: String,
    pub article: String,
    pub bucket: Bucket,
    pub tokens: Vec<String>,
}

/// Cleans, tokenizes and buckets tweets in parallel, preserving order.
pub fn prepare<S: AsRef<str>>(
    tweets: &[&Tweet],
    corpus: &Corpus,
    buckets: &ArrivalBuckets,
    domain_words: &[S],
) -> Result<Vec<PreparedTweet>, DiffusionError> {
    let cleaner = TextCleaner::new(domain_words);
    parallel::try_map(tweets, |t| {
        let bucket = bucket_for(t, corpus, buckets)?;
        let article = corpus.article_of(t).expect("bucketed tweets resolve");
        let cleaned = cleaner.clean(&t.text, article.headline.as_deref());
        Ok(PreparedTweet {
            id: t.id.clone(),
            article: article.id.clone(),
            bucket,
            tokens: tokenize(&cleaned),
        })
    })
}

/// Lexicon counts for one prepared tweet.
#[derive(Debug, Clone, PartialEq)]
pub struct Counted {
    pub bucket: Bucket,
    pub counts: CategoryCounts,
}

pub fn count_prepared(prepared: &[PreparedTweet], lexicon: &Lexicon) -> Vec<Counted> {
    parallel::map(prepared, |p| Counted {
        bucket: p.bucket,
        counts: match_counts(&p.tokens, lexicon),
    })
}

/// Splits prepared tweets (or anything aligned with them) into EN and NEN.
pub fn split_by_labels<'a, T>(
    prepared: &[PreparedTweet],
    items: &'a [T],
    labels: &LabelSet,
) -> Result<(Vec<&'a T>, Vec<&'a T>), DiffusionError> {
    let mut en = Vec::new();
    let mut nen = Vec::new();
    let mut dangling = Vec::new();
    for (p, item) in prepared.iter().zip(items) {
        match labels.is_exaggerated(&p.article) {
            Some(true) => en.push(item),
            Some(false) => nen.push(item),
            None => dangling.push(p.id.clone()),
        }
    }
    if !dangling.is_empty() {
        return Err(DiffusionError::DanglingReference(dangling));
    }
    Ok((en, nen))
}

/// Tweets carrying at least one match, per (group, bucket).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Support {
    pub e_early: u64,
    pub e_late: u64,
    pub ne_early: u64,
    pub ne_late: u64,
}

impl Support {
    pub fn min(&self) -> u64 {
        self.e_early.min(self.e_late).min(self.ne_early).min(self.ne_late)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub category: String,
    pub scale: StrengthScale,
    pub e_early: Option<f64>,
    pub e_late: Option<f64>,
    pub ne_early: Option<f64>,
    pub ne_late: Option<f64>,
    pub r_en: Option<f64>,
    pub r_nen: Option<f64>,
    pub r: Option<f64>,
    pub support: Support,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioAnalysis {
    pub reports: Vec<RatioReport>,
    /// `group/bucket` pairs without any tweet.
    pub empty_buckets: Vec<String>,
}

// late/early as an exact fraction: (m_late * d_early) / (d_late * m_early)
fn growth(early: &Totals, late: &Totals, norm: Normalization) -> Option<(u128, u128)> {
    let (de, dl) = (early.denominator(norm), late.denominator(norm));
    if de == 0 || dl == 0 || early.matches == 0 {
        return None;
    }
    Some((
        u128::from(late.matches) * u128::from(de),
        u128::from(dl) * u128::from(early.matches),
    ))
}

fn to_f64((num, den): (u128, u128)) -> f64 {
    num as f64 / den as f64
}

/// Late/early growth of every category in EN relative to NEN. Mid-bucket
/// tweets are ignored. Ratios with a zero denominator stay `None`.
pub fn ratios_from_counts(
    en: &[&Counted],
    nen: &[&Counted],
    categories: &[&str],
    scale: StrengthScale,
    norm: Normalization,
) -> RatioAnalysis {
    fn pick<'a>(group: &[&'a Counted], bucket: Bucket) -> Vec<&'a CategoryCounts> {
        group.iter().filter(|c| c.bucket == bucket).map(|c| &c.counts).collect()
    }
    let cells = [
        ("EN/early", pick(en, Bucket::Early)),
        ("EN/late", pick(en, Bucket::Late)),
        ("NEN/early", pick(nen, Bucket::Early)),
        ("NEN/late", pick(nen, Bucket::Late)),
    ];
    let empty_buckets = cells
        .iter()
        .filter(|(_, c)| c.is_empty())
        .map(|(name, _)| name.to_string())
        .collect();

    let reports = categories
        .iter()
        .enumerate()
        .map(|(ci, name)| {
            let totals: Vec<Totals> = cells.iter().map(|(_, c)| Totals::of(c.iter().copied(), ci)).collect();
            let supports: Vec<u64> = cells
                .iter()
                .map(|(_, c)| c.iter().filter(|cc| cc.counts[ci] > 0).count() as u64)
                .collect();
            let en_growth = growth(&totals[0], &totals[1], norm);
            let nen_growth = growth(&totals[2], &totals[3], norm);
            let r = match (en_growth, nen_growth) {
                (Some((a, b)), Some((c, d))) if c > 0 => Some((a * d, b * c)),
                _ => None,
            };
            RatioReport {
                category: name.to_string(),
                scale,
                e_early: totals[0].fraction(norm),
                e_late: totals[1].fraction(norm),
                ne_early: totals[2].fraction(norm),
                ne_late: totals[3].fraction(norm),
                r_en: en_growth.map(to_f64),
                r_nen: nen_growth.map(to_f64),
                r: r.map(to_f64),
                support: Support {
                    e_early: supports[0],
                    e_late: supports[1],
                    ne_early: supports[2],
                    ne_late: supports[3],
                },
            }
        })
        .collect();
    RatioAnalysis { reports, empty_buckets }
}

pub fn category_ratios(
    en: &[&PreparedTweet],
    nen: &[&PreparedTweet],
    lexicon: &Lexicon,
    scale: StrengthScale,
    norm: Normalization,
) -> RatioAnalysis {
    let count = |group: &[&PreparedTweet]| -> Vec<Counted> {
        parallel::map(group, |p| Counted {
            bucket: p.bucket,
            counts: match_counts(&p.tokens, lexicon),
        })
    };
    let (en_c, nen_c) = (count(en), count(nen));
    let en_refs: Vec<&Counted> = en_c.iter().collect();
    let nen_refs: Vec<&Counted> = nen_c.iter().collect();
    ratios_from_counts(&en_refs, &nen_refs, &lexicon.category_names(), scale, norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlagParams {
    pub hi: f64,
    pub lo: f64,
    pub min_support: u64,
}

impl Default for FlagParams {
    fn default() -> Self {
        FlagParams {
            hi: 1.5,
            lo: 1.0 / 1.5,
            min_support: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Flags {
    pub high: Vec<String>,
    pub low: Vec<String>,
}

/// Categories whose `r` is extreme in the same direction under all three
/// scales, with every early/late bucket backed by `min_support` tweets.
pub fn flag_extremes(reports: &[RatioReport], params: &FlagParams) -> Flags {
    let mut by_cat: BTreeMap<&str, BTreeMap<StrengthScale, &RatioReport>> = BTreeMap::new();
    for r in reports {
        by_cat.entry(&r.category).or_default().insert(r.scale, r);
    }
    let mut flags = Flags::default();
    for (cat, per_scale) in by_cat {
        let all = |pred: &dyn Fn(f64) -> bool| {
            StrengthScale::ALL.iter().all(|s| {
                per_scale
                    .get(s)
                    .is_some_and(|rep| rep.support.min() >= params.min_support && rep.r.is_some_and(pred))
            })
        };
        if all(&|r| r >= params.hi) {
            flags.high.push(cat.to_string());
        } else if all(&|r| r <= params.lo) {
            flags.low.push(cat.to_string());
        }
    }
    flags
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendRow {
    pub group: Group,
    pub bucket: Bucket,
    pub tweets: u64,
    pub fraction: Option<f64>,
}

/// Mean role-lexicon matches per tweet for early and late tweets of both groups.
pub fn trend(
    en: &[&PreparedTweet],
    nen: &[&PreparedTweet],
    role: &Lexicon,
    norm: Normalization,
) -> Result<Vec<TrendRow>, DiffusionError> {
    if en.is_empty() || nen.is_empty() {
        return Err(DiffusionError::EmptyGroup(
            if en.is_empty() { "EN" } else { "NEN" }.into(),
        ));
    }
    let merged = role.merged();
    let mut rows = Vec::new();
    for (group, tweets) in [(Group::En, en), (Group::Nen, nen)] {
        for bucket in [Bucket::Early, Bucket::Late] {
            let texts: Vec<&PreparedTweet> = tweets.iter().copied().filter(|p| p.bucket == bucket).collect();
            let counts: Vec<CategoryCounts> = parallel::map(&texts, |p| match_counts(&p.tokens, &merged));
            let totals = Totals::of(&counts, 0);
            rows.push(TrendRow {
                group,
                bucket,
                tweets: totals.tweets,
                fraction: totals.fraction(norm),
            });
        }
    }
    Ok(rows)
}

pub const RATIO_COLUMNS: [&str; 13] = [
    "category",
    "scale",
    "eEarly",
    "eLate",
    "neEarly",
    "neLate",
    "r_en",
    "r_nen",
    "r",
    "support_e_early",
    "support_e_late",
    "support_ne_early",
    "support_ne_late",
];

fn opt_field(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Undefined values are empty fields. Floats use the shortest form that
/// parses back to the same value, so the table round-trips exactly.
pub fn write_ratios_csv<W: std::io::Write>(reports: &[RatioReport], writer: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RATIO_COLUMNS)?;
    for r in reports {
        let s = r.support;
        w.write_record([
            r.category.clone(),
            r.scale.as_str().to_string(),
            opt_field(r.e_early),
            opt_field(r.e_late),
            opt_field(r.ne_early),
            opt_field(r.ne_late),
            opt_field(r.r_en),
            opt_field(r.r_nen),
            opt_field(r.r),
            s.e_early.to_string(),
            s.e_late.to_string(),
            s.ne_early.to_string(),
            s.ne_late.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_ratios_csv<R: std::io::Read>(reader: R) -> Result<Vec<RatioReport>, DiffusionError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| DiffusionError::Format(e.to_string()))?
        .clone();
    let mut pos = Vec::with_capacity(RATIO_COLUMNS.len());
    for col in RATIO_COLUMNS {
        match headers.iter().position(|h| h.trim() == col) {
            Some(p) => pos.push(p),
            None => return Err(DiffusionError::Format(format!("missing column `{col}`"))),
        }
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| DiffusionError::Format(e.to_string()))?;
        let field = |k: usize| rec.get(pos[k]).unwrap_or("").trim();
        let bad =
            |k: usize| DiffusionError::Format(format!("line {line}: invalid {} `{}`", RATIO_COLUMNS[k], field(k)));
        let opt = |k: usize| -> Result<Option<f64>, DiffusionError> {
            match field(k) {
                "" => Ok(None),
                v => v.parse::<f64>().map(Some).map_err(|_| bad(k)),
            }
        };
        let int = |k: usize| field(k).parse::<u64>().map_err(|_| bad(k));
        out.push(RatioReport {
            category: field(0).to_string(),
            scale: field(1).parse().map_err(|_| bad(1))?,
            e_early: opt(2)?,
            e_late: opt(3)?,
            ne_early: opt(4)?,
            ne_late: opt(5)?,
            r_en: opt(6)?,
            r_nen: opt(7)?,
            r: opt(8)?,
            support: Support {
                e_early: int(9)?,
                e_late: int(10)?,
                ne_early: int(11)?,
                ne_late: int(12)?,
            },
        });
    }
    Ok(out)
}

/// Counts raw (uncleaned) tweet texts; handy for quick lexicon checks.
pub fn count_tweet_texts(tweets: &[&Tweet], lexicon: &Lexicon) -> Vec<CategoryCounts> {
    let texts: Vec<&str> = tweets.iter().map(|t| t.text.as_str()).collect();
    count_texts(&texts, lexicon)
}

impl FromStr for Bucket {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "early" => Ok(Bucket::Early),
            "mid" => Ok(Bucket::Mid),
            "late" => Ok(Bucket::Late),
            other => Err(format!("unknown bucket `{other}`")),
        }
    }
}

/// News articles that lack the metadata diffusion analysis needs.
pub fn articles_missing_metadata(corpus: &Corpus) -> Vec<String> {
    corpus
        .documents_of_kind(DocKind::NewsArticle)
        .filter(|d| d.publish_date.is_none() || d.urls.is_empty())
        .map(|d| d.id.clone())
        .collect()
}

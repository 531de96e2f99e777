//! User categories by exaggerated-news frequency and per-user timeline features.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Tweet, UserTimeline};
use crate::diffusion::TextCleaner;
use crate::exaggeration::LabelSet;
use crate::lexicon::{match_counts, tokenize, CategoryCounts, Lexicon, Normalization, Totals};
use crate::parallel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("unknown user `{0}`")]
    UnknownUser(String),
    #[error("timeline of `{0}` is empty")]
    EmptyTimeline(String),
    #[error("feature table: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum UserCategory {
    #[serde(rename = "NEX")]
    Nex,
    #[serde(rename = "EX1")]
    Ex1,
    #[serde(rename = "EX2")]
    Ex2,
    #[serde(rename = "EX3plus")]
    Ex3Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BinaryClass {
    I,
    II,
}

impl UserCategory {
    pub const ALL: [UserCategory; 4] = [
        UserCategory::Nex,
        UserCategory::Ex1,
        UserCategory::Ex2,
        UserCategory::Ex3Plus,
    ];

    /// Category from the number of distinct exaggerated articles a user shared.
    pub fn from_count(distinct_exaggerated: usize) -> Self {
        match distinct_exaggerated {
            0 => UserCategory::Nex,
            1 => UserCategory::Ex1,
            2 => UserCategory::Ex2,
            _ => UserCategory::Ex3Plus,
        }
    }

    pub fn binary_class(self) -> BinaryClass {
        match self {
            UserCategory::Nex | UserCategory::Ex1 => BinaryClass::I,
            UserCategory::Ex2 | UserCategory::Ex3Plus => BinaryClass::II,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UserCategory::Nex => "NEX",
            UserCategory::Ex1 => "EX1",
            UserCategory::Ex2 => "EX2",
            UserCategory::Ex3Plus => "EX3plus",
        }
    }
}

impl fmt::Display for UserCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl BinaryClass {
    pub fn as_str(self) -> &'static str {
        match self {
            BinaryClass::I => "I",
            BinaryClass::II => "II",
        }
    }

    /// 0 for class I, 1 for class II.
    pub fn index(self) -> usize {
        match self {
            BinaryClass::I => 0,
            BinaryClass::II => 1,
        }
    }
}

impl fmt::Display for BinaryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Distinct articles each user shared, drawn from the tweet collection and
/// from article-linked timeline tweets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UserArticles {
    pub articles: BTreeMap<String, BTreeSet<String>>,
}

impl UserArticles {
    pub fn from_corpus(corpus: &Corpus) -> Self {
        let mut articles: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for user in corpus.timelines.keys() {
            articles.entry(user.clone()).or_default();
        }
        let linked = corpus
            .tweets
            .iter()
            .chain(corpus.timelines.values().flat_map(|tl| tl.tweets.iter()));
        for t in linked {
            if let Some(a) = &t.article_ref {
                articles.entry(t.author_id.clone()).or_default().insert(a.clone());
            }
        }
        UserArticles { articles }
    }

    pub fn exaggerated_count(&self, user_id: &str, labels: &LabelSet) -> Option<usize> {
        self.articles
            .get(user_id)
            .map(|arts| arts.iter().filter(|a| labels.is_exaggerated(a) == Some(true)).count())
    }
}

pub fn categorize(user_id: &str, articles: &UserArticles, labels: &LabelSet) -> Result<UserCategory, ProfileError> {
    articles
        .exaggerated_count(user_id, labels)
        .map(UserCategory::from_count)
        .ok_or_else(|| ProfileError::UnknownUser(user_id.to_string()))
}

/// Role lexicons used for timeline features. The role lexicons are counted
/// as a single merged category each.
#[derive(Debug, Clone)]
pub struct FeatureLexicons {
    pub liwc: Lexicon,
    pub slang: Lexicon,
    pub hyperbolic: Lexicon,
    pub contraction: Lexicon,
    pub stopwords: Lexicon,
    pub phrases: Lexicon,
}

impl FeatureLexicons {
    pub fn new(
        liwc: Lexicon,
        slang: &Lexicon,
        hyperbolic: &Lexicon,
        contraction: &Lexicon,
        stopwords: &Lexicon,
        phrases: &Lexicon,
    ) -> Self {
        FeatureLexicons {
            liwc,
            slang: slang.merged(),
            hyperbolic: hyperbolic.merged(),
            contraction: contraction.merged(),
            stopwords: stopwords.merged(),
            phrases: phrases.merged(),
        }
    }

    /// The illustrative lexicons bundled with the crate.
    pub fn builtin() -> Self {
        use crate::lexicon::builtin;
        FeatureLexicons::new(
            builtin::liwc_sample(),
            &builtin::slang(),
            &builtin::hyperbolic(),
            &builtin::contraction(),
            &builtin::stopwords(),
            &builtin::phrases(),
        )
    }

    /// Column names in [`FeatureVector::to_vec`] order.
    pub fn feature_names(&self) -> Vec<String> {
        let mut names: Vec<String> = FIXED_FEATURES.iter().map(|s| s.to_string()).collect();
        names.extend(self.liwc.category_names().iter().map(|c| format!("liwc_{c}")));
        names
    }
}

pub const FIXED_FEATURES: [&str; 11] = [
    "avg_retweets_per_tweet",
    "avg_mentions_per_tweet",
    "follower_count",
    "slang_frac",
    "hyperbolic_frac",
    "contraction_frac",
    "tweet_count",
    "word_count",
    "total_word_length",
    "stopword_count",
    "common_phrase_count",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub avg_retweets_per_tweet: f64,
    pub avg_mentions_per_tweet: f64,
    pub follower_count: f64,
    pub slang_frac: f64,
    pub hyperbolic_frac: f64,
    pub contraction_frac: f64,
    pub tweet_count: f64,
    pub word_count: f64,
    pub total_word_length: f64,
    pub stopword_count: f64,
    pub common_phrase_count: f64,
    pub liwc_fracs: Vec<f64>,
}

impl FeatureVector {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![
            self.avg_retweets_per_tweet,
            self.avg_mentions_per_tweet,
            self.follower_count,
            self.slang_frac,
            self.hyperbolic_frac,
            self.contraction_frac,
            self.tweet_count,
            self.word_count,
            self.total_word_length,
            self.stopword_count,
            self.common_phrase_count,
        ];
        v.extend_from_slice(&self.liwc_fracs);
        v
    }
}

struct TweetFeatures {
    tokens: usize,
    token_chars: u64,
    slang: CategoryCounts,
    hyperbolic: CategoryCounts,
    contraction: CategoryCounts,
    stopwords: CategoryCounts,
    phrases: CategoryCounts,
    liwc: CategoryCounts,
}

fn tweet_features(tweet: &Tweet, lex: &FeatureLexicons, cleaner: &TextCleaner) -> TweetFeatures {
    let tokens = tokenize(&cleaner.clean(&tweet.text, None));
    TweetFeatures {
        tokens: tokens.len(),
        token_chars: tokens.iter().map(|t| t.chars().count() as u64).sum(),
        slang: match_counts(&tokens, &lex.slang),
        hyperbolic: match_counts(&tokens, &lex.hyperbolic),
        contraction: match_counts(&tokens, &lex.contraction),
        stopwords: match_counts(&tokens, &lex.stopwords),
        phrases: match_counts(&tokens, &lex.phrases),
        liwc: match_counts(&tokens, &lex.liwc),
    }
}

/// Timeline features. Mention tokens are stripped before lexical counting
/// since mentions are an engagement feature of their own. Means use exact
/// integer totals, so the result does not depend on tweet order.
pub fn extract_features(
    timeline: &UserTimeline,
    lex: &FeatureLexicons,
    norm: Normalization,
) -> Result<FeatureVector, ProfileError> {
    if timeline.tweets.is_empty() {
        return Err(ProfileError::EmptyTimeline(timeline.user_id.clone()));
    }
    let cleaner = TextCleaner::new::<&str>(&[]);
    let per_tweet: Vec<TweetFeatures> = timeline
        .tweets
        .iter()
        .map(|t| tweet_features(t, lex, &cleaner))
        .collect();
    let n = timeline.tweets.len() as u64;
    let mean = |total: u64| total as f64 / n as f64;
    let frac = |pick: &dyn Fn(&TweetFeatures) -> &CategoryCounts, ci: usize| {
        Totals::of(per_tweet.iter().map(pick), ci).fraction(norm).unwrap_or(0.0)
    };
    let total = |pick: &dyn Fn(&TweetFeatures) -> &CategoryCounts| -> f64 {
        per_tweet.iter().map(|f| u64::from(pick(f).counts[0])).sum::<u64>() as f64
    };

    Ok(FeatureVector {
        avg_retweets_per_tweet: mean(timeline.tweets.iter().map(|t| t.retweets).sum()),
        avg_mentions_per_tweet: mean(timeline.tweets.iter().map(|t| t.mentions.len() as u64).sum()),
        follower_count: timeline.follower_count as f64,
        slang_frac: frac(&|f| &f.slang, 0),
        hyperbolic_frac: frac(&|f| &f.hyperbolic, 0),
        contraction_frac: frac(&|f| &f.contraction, 0),
        tweet_count: n as f64,
        word_count: per_tweet.iter().map(|f| f.tokens as u64).sum::<u64>() as f64,
        total_word_length: per_tweet.iter().map(|f| f.token_chars).sum::<u64>() as f64,
        stopword_count: total(&|f| &f.stopwords),
        common_phrase_count: total(&|f| &f.phrases),
        liwc_fracs: (0..lex.liwc.len()).map(|ci| frac(&|f| &f.liwc, ci)).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserProfile {
    pub user_id: String,
    pub category: UserCategory,
    pub binary_class: BinaryClass,
    pub features: FeatureVector,
}

/// Profiles every user with a non-empty timeline, in user-id order.
/// Users with empty timelines are returned separately.
pub fn profile_users(
    corpus: &Corpus,
    labels: &LabelSet,
    lex: &FeatureLexicons,
    norm: Normalization,
) -> (Vec<UserProfile>, Vec<String>) {
    let articles = UserArticles::from_corpus(corpus);
    let timelines: Vec<&UserTimeline> = corpus.timelines.values().collect();
    let results = parallel::map(&timelines, |tl| {
        let category = categorize(&tl.user_id, &articles, labels).expect("timeline users are known");
        extract_features(tl, lex, norm).map(|features| UserProfile {
            user_id: tl.user_id.clone(),
            category,
            binary_class: category.binary_class(),
            features,
        })
    });
    let mut profiles = Vec::new();
    let mut skipped = Vec::new();
    for r in results {
        match r {
            Ok(p) => profiles.push(p),
            Err(ProfileError::EmptyTimeline(u)) | Err(ProfileError::UnknownUser(u)) => skipped.push(u),
            Err(ProfileError::Format(_)) => unreachable!("extraction does not parse tables"),
        }
    }
    (profiles, skipped)
}

pub const ID_COLUMNS: [&str; 3] = ["user_id", "category", "binary_class"];

/// One row per profile: id columns, then features in [`FeatureLexicons::feature_names`] order.
pub fn write_features_csv<W: std::io::Write>(
    profiles: &[UserProfile],
    feature_names: &[String],
    writer: W,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(
        ID_COLUMNS
            .iter()
            .copied()
            .chain(feature_names.iter().map(String::as_str)),
    )?;
    for p in profiles {
        let mut rec = vec![p.user_id.clone(), p.category.to_string(), p.binary_class.to_string()];
        rec.extend(p.features.to_vec().iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn feature_description(name: &str) -> &'static str {
    match name {
        "avg_retweets_per_tweet" => "mean retweets per timeline tweet",
        "avg_mentions_per_tweet" => "mean @mentions per timeline tweet",
        "follower_count" => "followers at timeline snapshot",
        "slang_frac" | "hyperbolic_frac" | "contraction_frac" => "mean role-lexicon matches per tweet (or per word)",
        "tweet_count" => "timeline tweets",
        "word_count" => "total tokens over the timeline",
        "total_word_length" => "total characters over all tokens",
        "stopword_count" => "total stop-word matches",
        "common_phrase_count" => "total common-phrase matches",
        _ => "mean matches per tweet (or per word) for one dictionary category",
    }
}

/// Column order and meaning of `features.csv`.
pub fn features_schema(feature_names: &[String], norm: Normalization) -> serde_json::Value {
    let ids = [
        ("user_id", "string", "user identifier"),
        ("category", "string", "NEX, EX1, EX2 or EX3plus"),
        ("binary_class", "string", "I (NEX, EX1) or II (EX2, EX3plus)"),
    ];
    let mut columns: Vec<serde_json::Value> = ids
        .iter()
        .map(|(n, t, d)| serde_json::json!({"name": n, "type": t, "description": d}))
        .collect();
    columns.extend(
        feature_names
            .iter()
            .map(|n| serde_json::json!({"name": n, "type": "number", "description": feature_description(n)})),
    );
    serde_json::json!({"normalization": norm, "columns": columns})
}

/// A parsed `features.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub user_ids: Vec<String>,
    pub classes: Vec<BinaryClass>,
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureTable {
    /// Class I is 0, class II is 1.
    pub fn labels(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.index()).collect()
    }
}

pub fn read_features_csv<R: std::io::Read>(reader: R) -> Result<FeatureTable, ProfileError> {
    let fmt = |e: csv::Error| ProfileError::Format(e.to_string());
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers().map_err(fmt)?.clone();
    let head: Vec<&str> = headers.iter().take(ID_COLUMNS.len()).collect();
    if head != ID_COLUMNS {
        return Err(ProfileError::Format(format!(
            "expected leading columns {}",
            ID_COLUMNS.join(",")
        )));
    }
    let feature_names: Vec<String> = headers.iter().skip(ID_COLUMNS.len()).map(str::to_string).collect();
    let mut table = FeatureTable {
        user_ids: Vec::new(),
        classes: Vec::new(),
        feature_names,
        rows: Vec::new(),
    };
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(fmt)?;
        let line = i + 2;
        let class = match &rec[2] {
            "I" => BinaryClass::I,
            "II" => BinaryClass::II,
            other => return Err(ProfileError::Format(format!("line {line}: unknown class `{other}`"))),
        };
        let row = rec
            .iter()
            .skip(ID_COLUMNS.len())
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| ProfileError::Format(format!("line {line}: {e}")))?;
        table.user_ids.push(rec[0].to_string());
        table.classes.push(class);
        table.rows.push(row);
    }
    Ok(table)
}

/// Users and timeline tweets per category.
pub fn category_summary(profiles: &[UserProfile]) -> BTreeMap<UserCategory, (usize, u64)> {
    let mut out: BTreeMap<UserCategory, (usize, u64)> = UserCategory::ALL.iter().map(|&c| (c, (0, 0))).collect();
    for p in profiles {
        let e = out.entry(p.category).or_default();
        e.0 += 1;
        e.1 += p.features.tweet_count as u64;
    }
    out
}

//! Seeded generators for fixtures, tests and benchmarks. Every generator is a
//! pure function of its arguments.

use std::collections::BTreeSet;

use chrono::{DateTime, TimeDelta, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::corpus::{Discipline, DocKind, Document, Sample, Tweet, UserTimeline};
use crate::diffusion::{Bucket, Group};
use crate::lexicon::{Category, Lexicon, Pattern};

/// Per-discipline document counts of the annotated corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DisciplinePlan {
    pub discipline: Discipline,
    pub press_releases: usize,
    pub news_articles: usize,
    /// Journals with at least one news article.
    pub covered_journals: usize,
}

const fn plan(
    discipline: Discipline,
    press_releases: usize,
    news_articles: usize,
    covered_journals: usize,
) -> DisciplinePlan {
    DisciplinePlan {
        discipline,
        press_releases,
        news_articles,
        covered_journals,
    }
}

/// One journal per press release. Totals: 462 journals, 462 press releases,
/// 668 news articles, 230 journals with news coverage.
pub const ANNOTATION_PLAN: [DisciplinePlan; 9] = [
    plan(Discipline::Lifestyle, 70, 121, 35),
    plan(Discipline::MentalHealth, 14, 14, 7),
    plan(Discipline::Childhood, 43, 58, 21),
    plan(Discipline::Treatment, 61, 108, 30),
    plan(Discipline::ObservationalIdentification, 203, 282, 102),
    plan(Discipline::Policy, 29, 30, 14),
    plan(Discipline::Ageing, 3, 4, 1),
    plan(Discipline::PhysicalDisease, 38, 49, 19),
    plan(Discipline::NotMentioned, 1, 2, 1),
];

const OUTLETS: [&str; 6] = [
    "dailyherald",
    "citypost",
    "morningstar",
    "healthwire",
    "thechronicle",
    "newsdesk",
];
const HEADLINE_WORDS: [&str; 16] = [
    "coffee", "linked", "to", "longer", "life", "study", "finds", "sleep", "risk", "children", "drug", "cuts", "heart",
    "disease", "mice", "diet",
];

pub fn epoch() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2012, 1, 1, 0, 0, 0).unwrap()
}

fn headline(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(4..8);
    (0..n)
        .map(|_| *HEADLINE_WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

fn annotated(rng: &mut ChaCha8Rng, id: String, kind: DocKind, source: &str, discipline: Discipline) -> Document {
    Document {
        id,
        kind,
        source: source.to_string(),
        discipline,
        strength7: rng.gen_range(1..=7),
        advice: rng.gen_range(1..=4),
        sample: if rng.gen_bool(0.7) {
            Sample::Human
        } else {
            Sample::NonHuman
        },
        journal_ref: None,
        publish_date: None,
        headline: None,
        urls: Vec::new(),
    }
}

/// Journals, press releases and news articles following [`ANNOTATION_PLAN`]
/// exactly. News articles are spread round-robin over each discipline's
/// covered journals and carry a publish date, headline and url.
pub fn annotation_corpus(seed: u64) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = Vec::new();
    let (mut j, mut n) = (0usize, 0usize);
    for p in ANNOTATION_PLAN {
        let journals: Vec<String> = (0..p.press_releases).map(|k| format!("J{:04}", j + k + 1)).collect();
        for (k, jid) in journals.iter().enumerate() {
            let journal_name = format!("journal-{:02}", (j + k) % 40);
            docs.push(annotated(
                &mut rng,
                jid.clone(),
                DocKind::Journal,
                &journal_name,
                p.discipline,
            ));
            let mut pr = annotated(
                &mut rng,
                format!("P{:04}", j + k + 1),
                DocKind::PressRelease,
                &format!("press-office-{:02}", (j + k) % 25),
                p.discipline,
            );
            pr.journal_ref = Some(jid.clone());
            docs.push(pr);
        }
        for k in 0..p.news_articles {
            n += 1;
            let outlet = OUTLETS[rng.gen_range(0..OUTLETS.len())];
            let id = format!("N{n:04}");
            let mut doc = annotated(&mut rng, id.clone(), DocKind::NewsArticle, outlet, p.discipline);
            doc.journal_ref = Some(journals[k % p.covered_journals].clone());
            doc.publish_date = Some(epoch() + TimeDelta::seconds(rng.gen_range(0..730 * 86_400)));
            doc.headline = Some(headline(&mut rng));
            doc.urls = vec![format!("https://www.{outlet}.example.com/health/{}", id.to_lowercase())];
            docs.push(doc);
        }
        j += p.press_releases;
    }
    docs
}

const FILLER: [&str; 82] = [
    "new",
    "research",
    "says",
    "people",
    "health",
    "via",
    "read",
    "this",
    "today",
    "scientists",
    "report",
    "latest",
    "worth",
    "interesting",
    "wow",
    "omg",
    "lol",
    "amazing",
    "they're",
    "the",
    "a",
    "and",
    "of",
    "agree",
    "i think",
    "should",
    "really",
    "not sure",
    "i doubt",
    "makes sense",
    "no way",
    "realize",
    "noticed",
    "learned",
    "good",
    "great",
    "love",
    "hope",
    "bad",
    "worse",
    "fear",
    "sad",
    "dead",
    "fatal",
    "risk",
    "cancer",
    "diet",
    "food",
    "coffee",
    "wine",
    "drink",
    "eat",
    "sugar",
    "brain",
    "heart",
    "feel",
    "hurt",
    "soon",
    "tomorrow",
    "will",
    "never",
    "don't",
    "maybe",
    "perhaps",
    "always",
    "definitely",
    "happy",
    "stupid",
    "damn",
    "doctor",
    "pain",
    "sleep",
    "kill",
    "best",
    "cure",
    "miracle",
    "huge",
    "shocking",
    "gonna",
    "y'all",
    "can't",
    "it's",
];

/// A generated tweet collection with the ids the retention filter must drop.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedTweets {
    pub tweets: Vec<Tweet>,
    pub before_publication: BTreeSet<String>,
    pub without_article_url: BTreeSet<String>,
}

/// Variants of a url that canonicalize to the same form.
fn url_variant(rng: &mut ChaCha8Rng, url: &str) -> String {
    match rng.gen_range(0..5) {
        0 => url.to_string(),
        1 => url.replacen("https://", "http://", 1),
        2 => format!("{url}/"),
        3 => format!("{url}?utm_source=twitter&utm_medium=social"),
        _ => url.replacen("www.", "WWW.", 1),
    }
}

fn tweet_text(rng: &mut ChaCha8Rng, article: &Document) -> String {
    let mut parts: Vec<String> = Vec::new();
    if rng.gen_bool(0.3) {
        if let Some(h) = &article.headline {
            parts.push(h.to_uppercase());
        }
    }
    for _ in 0..rng.gen_range(3..12) {
        parts.push(FILLER.choose(rng).unwrap().to_string());
    }
    if rng.gen_bool(0.2) {
        parts.push(format!("@user{}", rng.gen_range(0..50)));
    }
    if rng.gen_bool(0.1) {
        parts.push("via BBC News".into());
    }
    parts.join(" ")
}

/// Tweets sharing the given news articles: roughly 8% posted at or before
/// publication, 8% without a link to the article, the rest retained and
/// spread over the arrival buckets. Authors are drawn from `u0000` up to
/// `authors - 1`.
pub fn diffusion_tweets(articles: &[&Document], n: usize, authors: usize, seed: u64) -> PlantedTweets {
    assert!(!articles.is_empty(), "need at least one article");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PlantedTweets {
        tweets: Vec::with_capacity(n),
        before_publication: BTreeSet::new(),
        without_article_url: BTreeSet::new(),
    };
    for i in 0..n {
        let article = articles[rng.gen_range(0..articles.len())];
        let published = article.publish_date.expect("generated articles are dated");
        let id = format!("t{:06}", i + 1);
        let roll = rng.gen_range(0..100);
        let offset = if roll < 8 {
            out.before_publication.insert(id.clone());
            -rng.gen_range(0..30 * 86_400)
        } else {
            match rng.gen_range(0..10) {
                0..=3 => rng.gen_range(1..=86_400),
                4..=6 => rng.gen_range(86_401..=365 * 86_400),
                _ => rng.gen_range(365 * 86_400 + 1..=4 * 365 * 86_400),
            }
        };
        let urls = if (8..16).contains(&roll) {
            out.without_article_url.insert(id.clone());
            if rng.gen_bool(0.5) {
                vec![]
            } else {
                vec!["https://unrelated.example.net/page".to_string()]
            }
        } else {
            vec![url_variant(&mut rng, &article.urls[0])]
        };
        let mentions: Vec<String> = (0..rng.gen_range(0..3)).map(|k| format!("user{k}")).collect();
        out.tweets.push(Tweet {
            id,
            text: tweet_text(&mut rng, article),
            created_at: published + TimeDelta::seconds(offset),
            likes: rng.gen_range(0..40),
            retweets: rng.gen_range(0..15),
            hashtags: if rng.gen_bool(0.3) {
                vec!["health".into()]
            } else {
                vec![]
            },
            mentions,
            urls,
            author_id: format!("u{:04}", rng.gen_range(0..authors.max(1))),
            article_ref: Some(article.id.clone()),
        });
    }
    out
}

/// A lexicon of `n` disjoint categories. Category `k` has two words
/// (`kw{k}a`, `kw{k}b`) and one stem (`st{k}x*`). No pattern of one
/// category is a prefix of another category's tokens.
pub fn planted_lexicon(n: usize) -> Lexicon {
    let categories = (0..n)
        .map(|k| Category {
            name: format!("cat{k:02}"),
            patterns: vec![
                Pattern::Word(format!("kw{k}a")),
                Pattern::Word(format!("kw{k}b")),
                Pattern::Stem(format!("st{k}x")),
            ],
        })
        .collect();
    Lexicon::new("planted", categories).expect("unique generated names")
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedText {
    pub group: Group,
    pub bucket: Bucket,
    pub text: String,
}

/// Texts for [`planted_lexicon`]: filler plus category tokens whose rate
/// depends on category, group and bucket. Every (group, bucket) cell gets
/// at least one text.
pub fn planted_texts(n_categories: usize, n_texts: usize, seed: u64) -> Vec<PlantedText> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = [
        (Group::En, Bucket::Early),
        (Group::En, Bucket::Late),
        (Group::Nen, Bucket::Early),
        (Group::Nen, Bucket::Late),
        (Group::En, Bucket::Mid),
    ];
    (0..n_texts)
        .map(|i| {
            let (group, bucket) = if i < cells.len() {
                cells[i]
            } else {
                cells[rng.gen_range(0..cells.len())]
            };
            let mut tokens: Vec<String> = (0..rng.gen_range(2..8)).map(|j| format!("filler{j}")).collect();
            for k in 0..n_categories {
                let boost = match (group, bucket, k % 3) {
                    (Group::En, Bucket::Late, 0) => 0.5,
                    (Group::Nen, Bucket::Late, 1) => 0.4,
                    _ => 0.0,
                };
                let p = 0.1 + 0.02 * (k % 5) as f64 + boost;
                while rng.gen_bool(p.min(0.9)) {
                    tokens.push(match rng.gen_range(0..3) {
                        0 => format!("kw{k}a"),
                        1 => format!("KW{k}B"),
                        _ => format!("st{k}x{}", ["", "ing", "ed", "s"][rng.gen_range(0..4)]),
                    });
                    if rng.gen_bool(0.5) {
                        break;
                    }
                }
            }
            tokens.shuffle(&mut rng);
            PlantedText {
                group,
                bucket,
                text: tokens.join(" "),
            }
        })
        .collect()
}

/// Two Gaussian clusters in `d` dimensions with unit variance; class 1 has
/// mean `shift` in every coordinate. One row in `ratio + 1` is class 1.
pub fn two_clusters(n: usize, d: usize, ratio: usize, shift: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut labels: Vec<usize> = (0..n).map(|i| usize::from(i % (ratio + 1) == ratio)).collect();
    labels.shuffle(&mut rng);
    let rows = labels
        .iter()
        .map(|&y| {
            let mu = if y == 1 { shift } else { 0.0 };
            (0..d).map(|_| mu + normal.sample(&mut rng)).collect()
        })
        .collect();
    (rows, labels)
}

/// Timelines for `users`. Each user posts 3 to 30 tweets, some of them
/// linking one of `articles`, which makes users spread over the categories.
pub fn timelines(users: &[String], articles: &[&Document], seed: u64) -> Vec<UserTimeline> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    users
        .iter()
        .map(|u| {
            let n = rng.gen_range(3..=30);
            let sharer = rng.gen_range(0..4);
            let tweets = (0..n)
                .map(|i| {
                    let article =
                        (!articles.is_empty() && i < sharer).then(|| articles[rng.gen_range(0..articles.len())]);
                    let text = match article {
                        Some(a) => tweet_text(&mut rng, a),
                        None => (0..rng.gen_range(3..15))
                            .map(|_| *FILLER.choose(&mut rng).unwrap())
                            .collect::<Vec<_>>()
                            .join(" "),
                    };
                    Tweet {
                        id: format!("{u}-{i:03}"),
                        text,
                        created_at: epoch() + TimeDelta::seconds(rng.gen_range(0..3 * 365 * 86_400)),
                        likes: rng.gen_range(0..20),
                        retweets: rng.gen_range(0..10),
                        hashtags: vec![],
                        mentions: (0..rng.gen_range(0..3)).map(|k| format!("friend{k}")).collect(),
                        urls: article.map(|a| vec![a.urls[0].clone()]).unwrap_or_default(),
                        author_id: u.clone(),
                        article_ref: article.map(|a| a.id.clone()),
                    }
                })
                .collect();
            UserTimeline {
                user_id: u.clone(),
                follower_count: rng.gen_range(0..5000),
                tweets,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_totals() {
        let sum = |f: fn(&DisciplinePlan) -> usize| ANNOTATION_PLAN.iter().map(f).sum::<usize>();
        assert_eq!(sum(|p| p.press_releases), 462);
        assert_eq!(sum(|p| p.news_articles), 668);
        assert_eq!(sum(|p| p.covered_journals), 230);
        assert!(ANNOTATION_PLAN
            .iter()
            .all(|p| p.covered_journals <= p.news_articles.min(p.press_releases)));
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(annotation_corpus(3), annotation_corpus(3));
        assert_eq!(planted_texts(4, 50, 1), planted_texts(4, 50, 1));
        assert_eq!(two_clusters(40, 3, 7, 1.0, 2), two_clusters(40, 3, 7, 1.0, 2));
    }

    #[test]
    fn imbalance_ratio() {
        let (_, labels) = two_clusters(2000, 2, 7, 1.0, 0);
        assert_eq!(labels.iter().filter(|&&l| l == 1).count(), 250);
    }
}

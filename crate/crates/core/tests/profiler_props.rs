use exagg_core::corpus::{link, Corpus, DocKind, UserTimeline};
use exagg_core::exaggeration::{label_corpus, StrengthScale};
use exagg_core::lexicon::Normalization;
use exagg_core::profiler::{
    categorize, extract_features, profile_users, read_features_csv, write_features_csv, BinaryClass, FeatureLexicons,
    UserArticles, UserCategory,
};
use exagg_core::synth;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sample_timeline(seed: u64) -> UserTimeline {
    let docs = synth::annotation_corpus(1);
    let news: Vec<_> = docs.iter().filter(|d| d.kind == DocKind::NewsArticle).collect();
    synth::timelines(&["u0".to_string()], &news, seed).remove(0)
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn features_ignore_tweet_order(seed in 0u64..500, shuffle in any::<u64>()) {
        let lex = FeatureLexicons::builtin();
        let tl = sample_timeline(seed);
        let mut shuffled = tl.clone();
        shuffled.tweets.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
        for norm in [Normalization::PerTweet, Normalization::PerWord] {
            let a = extract_features(&tl, &lex, norm).unwrap().to_vec();
            let b = extract_features(&shuffled, &lex, norm).unwrap().to_vec();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn duplicating_a_timeline_doubles_counts(seed in 0u64..500) {
        let lex = FeatureLexicons::builtin();
        let tl = sample_timeline(seed);
        let mut doubled = tl.clone();
        doubled.tweets.extend(tl.tweets.clone());
        let a = extract_features(&tl, &lex, Normalization::PerTweet).unwrap();
        let b = extract_features(&doubled, &lex, Normalization::PerTweet).unwrap();
        prop_assert_eq!(b.tweet_count, 2.0 * a.tweet_count);
        prop_assert_eq!(b.word_count, 2.0 * a.word_count);
        prop_assert_eq!(b.total_word_length, 2.0 * a.total_word_length);
        prop_assert_eq!(b.stopword_count, 2.0 * a.stopword_count);
        prop_assert_eq!(b.common_phrase_count, 2.0 * a.common_phrase_count);
        // means and fractions are unchanged
        prop_assert!(close(
            &[a.avg_retweets_per_tweet, a.avg_mentions_per_tweet, a.slang_frac, a.hyperbolic_frac, a.contraction_frac],
            &[b.avg_retweets_per_tweet, b.avg_mentions_per_tweet, b.slang_frac, b.hyperbolic_frac, b.contraction_frac],
        ));
        prop_assert!(close(&a.liwc_fracs, &b.liwc_fracs));
        prop_assert_eq!(a.follower_count, b.follower_count);
    }

    #[test]
    fn category_thresholds(count in 0usize..50) {
        let c = UserCategory::from_count(count);
        let expected = [UserCategory::Nex, UserCategory::Ex1, UserCategory::Ex2][..].get(count).copied().unwrap_or(UserCategory::Ex3Plus);
        prop_assert_eq!(c, expected);
        prop_assert_eq!(c.binary_class() == BinaryClass::II, count >= 2);
    }
}

#[test]
fn empty_timeline_is_an_error() {
    let tl = UserTimeline {
        user_id: "quiet".into(),
        follower_count: 3,
        tweets: vec![],
    };
    assert!(extract_features(&tl, &FeatureLexicons::builtin(), Normalization::PerTweet).is_err());
}

#[test]
fn categories_count_distinct_exaggerated_articles() {
    let docs = synth::annotation_corpus(2);
    let news: Vec<_> = docs.iter().filter(|d| d.kind == DocKind::NewsArticle).collect();
    let users: Vec<String> = (0..30).map(|i| format!("u{i:04}")).collect();
    let timelines = synth::timelines(&users, &news, 3);
    let corpus = link(Corpus::new(docs.clone(), vec![], timelines).unwrap()).unwrap();
    let labels = label_corpus(&corpus, StrengthScale::Seven);
    let articles = UserArticles::from_corpus(&corpus);
    for (user, tl) in &corpus.timelines {
        let mut distinct: Vec<&str> = tl
            .tweets
            .iter()
            .filter_map(|t| t.article_ref.as_deref())
            .filter(|a| labels.is_exaggerated(a) == Some(true))
            .collect();
        distinct.sort_unstable();
        distinct.dedup();
        assert_eq!(
            categorize(user, &articles, &labels).unwrap(),
            UserCategory::from_count(distinct.len())
        );
    }
    assert!(categorize("nobody", &articles, &labels).is_err());

    let lex = FeatureLexicons::builtin();
    let (profiles, skipped) = profile_users(&corpus, &labels, &lex, Normalization::PerTweet);
    assert!(skipped.is_empty());
    assert_eq!(profiles.len(), 30);
    let names = lex.feature_names();
    let mut buf = Vec::new();
    write_features_csv(&profiles, &names, &mut buf).unwrap();
    let table = read_features_csv(buf.as_slice()).unwrap();
    assert_eq!(table.feature_names, names);
    for (row, p) in table.rows.iter().zip(&profiles) {
        assert_eq!(row, &p.features.to_vec());
    }
}

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use exagg_core::corpus::{
    self, check_links, Corpus, Discipline, DocKind, Document, DocumentFormat, LinkReport, Tweet, UserTimeline,
};
use exagg_core::diffusion::{
    self, arrival_distribution, attribute_stats, count_prepared, flag_extremes, prepare, ratios_from_counts,
    split_by_labels, trend, ArrivalBuckets, DiffusionError, FlagParams, Group, RatioReport,
};
use exagg_core::exaggeration::{aggregate, label_corpus, GroupBy, StrengthScale};
use exagg_core::learn::{cross_validate, CvReport, Dataset, ForestParams, ModelSpec, EVAL_HEADER};
use exagg_core::lexicon::{builtin, Lexicon, Normalization};
use exagg_core::profiler::{
    category_summary, features_schema, profile_users, read_features_csv, write_features_csv, FeatureLexicons,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::output::{fixed, opt, Output};
use crate::{
    ClassifierArg, DiffusionArgs, DocArgs, FlagArgs, GroupByArg, IngestArgs, KindArg, LabelArgs, LexiconArgs, NormArg,
    ProfileArgs, ReportArgs, ScaleArg, SingleScaleArg, ThresholdArgs, TrainEvalArgs,
};

fn require_file(path: &Path, flag: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Config(format!("--{flag}: no such file {}", path.display())))
    }
}

fn config_of<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("args serialize")
}

fn scales(s: ScaleArg) -> Vec<StrengthScale> {
    match s {
        ScaleArg::Seven => vec![StrengthScale::Seven],
        ScaleArg::Four => vec![StrengthScale::Four],
        ScaleArg::Two => vec![StrengthScale::Two],
        ScaleArg::All => StrengthScale::ALL.to_vec(),
    }
}

fn single_scale(s: SingleScaleArg) -> StrengthScale {
    match s {
        SingleScaleArg::Seven => StrengthScale::Seven,
        SingleScaleArg::Four => StrengthScale::Four,
        SingleScaleArg::Two => StrengthScale::Two,
    }
}

fn normalization(n: NormArg) -> Normalization {
    match n {
        NormArg::PerTweet => Normalization::PerTweet,
        NormArg::PerWord => Normalization::PerWord,
    }
}

fn flag_params(t: &ThresholdArgs) -> Result<FlagParams> {
    if !(t.hi.is_finite() && t.lo.is_finite() && t.lo > 0.0 && t.lo < t.hi) {
        return Err(CliError::Config(format!(
            "need 0 < lo < hi, got lo = {}, hi = {}",
            t.lo, t.hi
        )));
    }
    Ok(FlagParams {
        hi: t.hi,
        lo: t.lo,
        min_support: t.min_support,
    })
}

fn load_documents(path: &Path) -> Result<Vec<Document>> {
    require_file(path, "documents")?;
    let ingested = corpus::ingest_documents(path, DocumentFormat::from_path(path))?;
    if !ingested.errors.is_empty() {
        return Err(CliError::InvalidRows(ingested.errors));
    }
    Ok(ingested.items)
}

fn load_tweets(path: Option<&Path>) -> Result<Vec<Tweet>> {
    let Some(path) = path else { return Ok(Vec::new()) };
    require_file(path, "tweets")?;
    let ingested = corpus::ingest_tweets(path)?;
    if !ingested.errors.is_empty() {
        return Err(CliError::InvalidRows(ingested.errors));
    }
    Ok(ingested.items)
}

fn load_timelines(path: Option<&Path>) -> Result<Vec<UserTimeline>> {
    let Some(path) = path else { return Ok(Vec::new()) };
    require_file(path, "timelines")?;
    let ingested = corpus::ingest_timelines(path)?;
    if !ingested.errors.is_empty() {
        return Err(CliError::InvalidRows(ingested.errors));
    }
    Ok(ingested.items)
}

/// Builds the corpus; cross-reference problems are fatal unless `--allow-dangling`.
fn load_corpus(docs: &DocArgs, tweets: Option<&Path>, timelines: Option<&Path>) -> Result<Corpus> {
    let corpus = Corpus::new(
        load_documents(&docs.documents)?,
        load_tweets(tweets)?,
        load_timelines(timelines)?,
    )?;
    if docs.allow_dangling {
        let report = check_links(&corpus);
        if !report.is_clean() {
            log::warn!(
                "{} dangling reference(s), {} kind violation(s)",
                report.dangling.len(),
                report.kind_violations.len()
            );
        }
        Ok(corpus)
    } else {
        Ok(corpus::link(corpus)?)
    }
}

fn load_lexicon(path: Option<&PathBuf>, role: &str, fallback: fn() -> Lexicon) -> Result<Lexicon> {
    match path {
        Some(p) => {
            require_file(p, role)?;
            Ok(Lexicon::load(p, role)?)
        }
        None => {
            log::info!("--{role} not given; using the bundled illustrative list");
            Ok(fallback())
        }
    }
}

fn lexicon_inputs(l: &LexiconArgs) -> Vec<PathBuf> {
    [
        &l.liwc,
        &l.opinion,
        &l.realize,
        &l.slang,
        &l.hyperbolic,
        &l.contraction,
        &l.stopwords,
        &l.phrases,
    ]
    .into_iter()
    .flatten()
    .cloned()
    .collect()
}

#[derive(Serialize)]
struct DisciplineCounts {
    discipline: Discipline,
    press_releases: usize,
    news_articles: usize,
}

#[derive(Serialize)]
struct IngestReport {
    journals: usize,
    press_releases: usize,
    news_articles: usize,
    journals_with_news: usize,
    disciplines: Vec<DisciplineCounts>,
    tweets: usize,
    timelines: usize,
    timeline_tweets: usize,
    links: LinkReport,
    news_missing_metadata: Vec<String>,
}

fn ingest_report(corpus: &Corpus) -> IngestReport {
    let mut per: BTreeMap<Discipline, (usize, usize)> = Discipline::ALL.iter().map(|&d| (d, (0, 0))).collect();
    for d in corpus.documents.values() {
        let e = per.entry(d.discipline).or_default();
        match d.kind {
            DocKind::PressRelease => e.0 += 1,
            DocKind::NewsArticle => e.1 += 1,
            DocKind::Journal => {}
        }
    }
    let journals_with_news: std::collections::BTreeSet<&str> = corpus
        .documents_of_kind(DocKind::NewsArticle)
        .filter_map(|d| corpus.journal_of(d))
        .map(|j| j.id.as_str())
        .collect();
    IngestReport {
        journals: corpus.count_kind(DocKind::Journal),
        press_releases: corpus.count_kind(DocKind::PressRelease),
        news_articles: corpus.count_kind(DocKind::NewsArticle),
        journals_with_news: journals_with_news.len(),
        disciplines: per
            .into_iter()
            .map(|(discipline, (p, n))| DisciplineCounts {
                discipline,
                press_releases: p,
                news_articles: n,
            })
            .collect(),
        tweets: corpus.tweets.len(),
        timelines: corpus.timelines.len(),
        timeline_tweets: corpus.timelines.values().map(|t| t.tweets.len()).sum(),
        links: check_links(corpus),
        news_missing_metadata: diffusion::articles_missing_metadata(corpus),
    }
}

pub fn ingest(a: &IngestArgs) -> Result<()> {
    let corpus = load_corpus(&a.docs, a.tweets.as_deref(), a.timelines.as_deref())?;
    let mut out = Output::create(&a.out.out)?;
    let docs: Vec<&Document> = corpus.documents.values().collect();
    out.write_json("documents.json", &docs)?;
    out.write_json("ingest_report.json", &ingest_report(&corpus))?;
    let mut inputs = vec![a.docs.documents.clone()];
    inputs.extend(a.tweets.iter().cloned());
    inputs.extend(a.timelines.iter().cloned());
    out.finish("ingest", config_of(a), &inputs)
}

pub fn label(a: &LabelArgs) -> Result<()> {
    let corpus = load_corpus(&a.docs, None, None)?;
    let mut rows = Vec::new();
    let mut unresolved = Vec::new();
    let sets: Vec<_> = scales(a.scale).into_iter().map(|s| label_corpus(&corpus, s)).collect();
    for doc in corpus.documents.values().filter(|d| d.kind != DocKind::Journal) {
        for set in &sets {
            let Some(l) = set.get(&doc.id) else { continue };
            rows.push(vec![
                doc.id.clone(),
                doc.kind.as_str().to_string(),
                doc.journal_ref.clone().unwrap_or_default(),
                l.scale.as_str().to_string(),
                l.strength.to_string(),
                l.advice.to_string(),
                l.sample.to_string(),
                l.overall.to_string(),
            ]);
        }
    }
    if let Some(first) = sets.first() {
        unresolved.clone_from(&first.unresolved);
    }
    let mut out = Output::create(&a.out.out)?;
    out.write_csv(
        "labels.csv",
        &[
            "id",
            "kind",
            "journal_ref",
            "scale",
            "strength",
            "advice",
            "sample",
            "overall",
        ],
        &rows,
    )?;
    out.write_json("label_diagnostics.json", &json!({ "unresolved": unresolved }))?;
    out.finish("label", config_of(a), std::slice::from_ref(&a.docs.documents))
}

pub fn report(a: &ReportArgs) -> Result<()> {
    let corpus = load_corpus(&a.docs, None, None)?;
    let group_by = match a.group_by {
        GroupByArg::Source => GroupBy::Source,
        GroupByArg::Discipline => GroupBy::Discipline,
    };
    let kind = match a.kind {
        KindArg::Press => DocKind::PressRelease,
        KindArg::News => DocKind::NewsArticle,
    };
    let mut rows = Vec::new();
    let mut excluded = Vec::new();
    for scale in scales(a.scale) {
        let rep = aggregate(&corpus, group_by, kind, scale);
        for g in rep.groups {
            rows.push(vec![
                g.group_key,
                g.doc_kind.as_str().to_string(),
                g.scale.as_str().to_string(),
                g.n.to_string(),
                fixed(g.pct_overall, 3),
                fixed(g.pct_strength, 3),
                fixed(g.pct_advice, 3),
                fixed(g.pct_sample, 3),
            ]);
        }
        excluded = rep.excluded;
    }
    let mut out = Output::create(&a.out.out)?;
    out.write_csv(
        "report.csv",
        &[
            "group_key",
            "kind",
            "scale",
            "n",
            "pct_overall",
            "pct_strength",
            "pct_advice",
            "pct_sample",
        ],
        &rows,
    )?;
    out.write_json("report_diagnostics.json", &json!({ "excluded": excluded }))?;
    out.finish("report", config_of(a), std::slice::from_ref(&a.docs.documents))
}

fn empty_group(scale: StrengthScale, group: Group) -> CliError {
    CliError::Diffusion(DiffusionError::EmptyGroup(format!("{group} under {scale}")))
}

pub fn diffusion(a: &DiffusionArgs) -> Result<()> {
    if !(a.early_days > 0 && a.early_days < a.late_days) {
        return Err(CliError::Config(format!(
            "need 0 < early-days < late-days, got {} and {}",
            a.early_days, a.late_days
        )));
    }
    let params = flag_params(&a.thresholds)?;
    let norm = normalization(a.normalization);
    let corpus = load_corpus(&a.docs, Some(&a.tweets), None)?;
    if corpus.tweets.is_empty() {
        return Err(DiffusionError::EmptyGroup("tweets".into()).into());
    }
    let liwc = load_lexicon(a.lexicons.liwc.as_ref(), "liwc", builtin::liwc_sample)?;
    let roles = [
        (
            "opinion",
            load_lexicon(a.lexicons.opinion.as_ref(), "opinion", builtin::opinion)?,
        ),
        (
            "realize",
            load_lexicon(a.lexicons.realize.as_ref(), "realize", builtin::realize)?,
        ),
    ];

    let retention = diffusion::filter_corpus(&corpus)?;
    if retention.retained.is_empty() {
        return Err(DiffusionError::EmptyGroup("retained tweets".into()).into());
    }
    let buckets = ArrivalBuckets::from_days(a.early_days, a.late_days);
    let prepared = prepare(&retention.retained, &corpus, &buckets, &a.domain_words)?;
    let counted = count_prepared(&prepared, &liwc);
    let categories = liwc.category_names();

    let mut arrival = Vec::new();
    let mut attributes = Vec::new();
    let mut ratio_reports: Vec<RatioReport> = Vec::new();
    let mut trend_rows = Vec::new();
    let mut empty_buckets = BTreeMap::new();
    let scale_list = scales(a.scale);
    for &scale in &scale_list {
        let labels = label_corpus(&corpus, scale);
        let (en_t, nen_t) = split_by_labels(&prepared, &retention.retained, &labels)?;
        let (en_c, nen_c) = split_by_labels(&prepared, &counted, &labels)?;
        let (en_p, nen_p) = split_by_labels(&prepared, &prepared, &labels)?;
        for (group, tweets) in [(Group::En, &en_t), (Group::Nen, &nen_t)] {
            if tweets.is_empty() {
                return Err(empty_group(scale, group));
            }
            let tweets: Vec<&Tweet> = tweets.iter().map(|t| **t).collect();
            let d = arrival_distribution(&tweets, &corpus, &buckets)?;
            arrival.push(vec![
                scale.as_str().into(),
                group.as_str().into(),
                d.n.to_string(),
                d.early.to_string(),
                d.mid.to_string(),
                d.late.to_string(),
            ]);
            let s = attribute_stats(&tweets)?;
            attributes.push(vec![
                scale.as_str().into(),
                group.as_str().into(),
                s.n.to_string(),
                fixed(s.likes, 2),
                fixed(s.retweets, 2),
                fixed(s.hashtags, 2),
                fixed(s.mentions, 2),
            ]);
        }
        let analysis = ratios_from_counts(&en_c, &nen_c, &categories, scale, norm);
        if !analysis.empty_buckets.is_empty() {
            log::warn!("{scale}: empty buckets {}", analysis.empty_buckets.join(", "));
        }
        empty_buckets.insert(scale.as_str(), analysis.empty_buckets);
        ratio_reports.extend(analysis.reports);
        for (role, lex) in &roles {
            for row in trend(&en_p, &nen_p, lex, norm)? {
                trend_rows.push(vec![
                    scale.as_str().into(),
                    role.to_string(),
                    row.group.as_str().into(),
                    row.bucket.as_str().into(),
                    row.tweets.to_string(),
                    opt(row.fraction),
                ]);
            }
        }
    }

    let mut out = Output::create(&a.out.out)?;
    out.write_json(
        "retention.json",
        &json!({
            "tweets": corpus.tweets.len(),
            "retained": retention.retained_count,
            "before_publication": retention.before_publication,
            "without_article_url": retention.without_article_url,
        }),
    )?;
    out.write_csv(
        "arrival.csv",
        &["scale", "group", "n", "early", "mid", "late"],
        &arrival,
    )?;
    out.write_csv(
        "attributes.csv",
        &["scale", "group", "n", "likes", "retweets", "hashtags", "mentions"],
        &attributes,
    )?;
    out.write_with("ratios.csv", |buf| diffusion::write_ratios_csv(&ratio_reports, buf))?;
    out.write_csv(
        "trend.csv",
        &["scale", "role", "group", "bucket", "tweets", "fraction"],
        &trend_rows,
    )?;
    out.write_json("empty_buckets.json", &empty_buckets)?;
    if scale_list.len() == StrengthScale::ALL.len() {
        let flags = flag_extremes(&ratio_reports, &params);
        out.write_json(
            "flags.json",
            &json!({ "params": params, "high": flags.high, "low": flags.low }),
        )?;
    } else {
        log::info!("flags.json needs all three scales; skipped");
    }
    let mut inputs = vec![a.docs.documents.clone(), a.tweets.clone()];
    inputs.extend(lexicon_inputs(&a.lexicons));
    out.finish("diffusion", config_of(a), &inputs)
}

pub fn flag(a: &FlagArgs) -> Result<()> {
    let params = flag_params(&a.thresholds)?;
    require_file(&a.ratios, "ratios")?;
    let file = File::open(&a.ratios).map_err(|e| CliError::Config(format!("{}: {e}", a.ratios.display())))?;
    let reports = diffusion::read_ratios_csv(file)?;
    let present: std::collections::BTreeSet<StrengthScale> = reports.iter().map(|r| r.scale).collect();
    if present.len() < StrengthScale::ALL.len() {
        return Err(CliError::Config(
            "ratios must cover the seven, four and two scales".into(),
        ));
    }
    let flags = flag_extremes(&reports, &params);
    let mut out = Output::create(&a.out.out)?;
    out.write_json(
        "flags.json",
        &json!({ "params": params, "high": flags.high, "low": flags.low }),
    )?;
    out.finish("flag", config_of(a), std::slice::from_ref(&a.ratios))
}

pub fn profile(a: &ProfileArgs) -> Result<()> {
    let norm = normalization(a.normalization);
    let corpus = load_corpus(&a.docs, a.tweets.as_deref(), Some(&a.timelines))?;
    let l = &a.lexicons;
    let lex = FeatureLexicons::new(
        load_lexicon(l.liwc.as_ref(), "liwc", builtin::liwc_sample)?,
        &load_lexicon(l.slang.as_ref(), "slang", builtin::slang)?,
        &load_lexicon(l.hyperbolic.as_ref(), "hyperbolic", builtin::hyperbolic)?,
        &load_lexicon(l.contraction.as_ref(), "contraction", builtin::contraction)?,
        &load_lexicon(l.stopwords.as_ref(), "stopwords", builtin::stopwords)?,
        &load_lexicon(l.phrases.as_ref(), "phrases", builtin::phrases)?,
    );
    let labels = label_corpus(&corpus, single_scale(a.scale));
    let (profiles, skipped) = profile_users(&corpus, &labels, &lex, norm);
    if profiles.is_empty() {
        return Err(CliError::Config("no user has a non-empty timeline".into()));
    }
    let names = lex.feature_names();
    let summary: BTreeMap<String, Value> = category_summary(&profiles)
        .into_iter()
        .map(|(c, (users, tweets))| (c.to_string(), json!({ "users": users, "timeline_tweets": tweets })))
        .collect();
    let mut out = Output::create(&a.out.out)?;
    out.write_with("features.csv", |buf| write_features_csv(&profiles, &names, buf))?;
    out.write_json("features.schema.json", &features_schema(&names, norm))?;
    out.write_json(
        "profile_summary.json",
        &json!({ "categories": summary, "skipped_users": skipped }),
    )?;
    let mut inputs = vec![a.docs.documents.clone()];
    inputs.extend(a.tweets.iter().cloned());
    inputs.push(a.timelines.clone());
    inputs.extend(lexicon_inputs(l));
    out.finish("profile", config_of(a), &inputs)
}

pub fn train_eval(a: &TrainEvalArgs) -> Result<()> {
    require_file(&a.features, "features")?;
    let file = File::open(&a.features).map_err(|e| CliError::Config(format!("{}: {e}", a.features.display())))?;
    let table = read_features_csv(file)?;
    let labels = table.labels();
    let data = Dataset::new(table.rows, labels, table.feature_names)?;
    let forest = ForestParams {
        n_trees: a.n_trees,
        max_depth: a.max_depth,
        min_leaf: a.min_leaf,
        feature_fraction: a.feature_fraction,
        bootstrap: !a.no_bootstrap,
        seed: a.seed,
    };
    forest.validate()?;
    let specs = match a.classifier {
        ClassifierArg::Nb => vec![ModelSpec::NaiveBayes],
        ClassifierArg::Forest => vec![ModelSpec::Forest(forest)],
        ClassifierArg::Both => vec![ModelSpec::NaiveBayes, ModelSpec::Forest(forest)],
    };
    let mut rows = Vec::new();
    let mut reports: Vec<CvReport> = Vec::new();
    let mut models = Vec::new();
    for spec in &specs {
        let report = cross_validate(&data, spec, a.k, a.seed)?;
        rows.extend(report.csv_rows().into_iter().map(|r| r.to_vec()));
        reports.push(report);
        models.push((spec.name(), spec.fit(&data)?));
    }
    let mut out = Output::create(&a.out.out)?;
    out.write_csv("eval.csv", &EVAL_HEADER, &rows)?;
    out.write_json("cv_report.json", &reports)?;
    for (name, model) in models {
        out.write(&format!("model_{name}.json"), model.to_json().as_bytes())?;
    }
    out.finish("train-eval", config_of(a), std::slice::from_ref(&a.features))
}

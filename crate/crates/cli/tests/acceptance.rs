//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL line;
//! the process exits non-zero when any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use exagg_core::corpus::{link, load_documents, Corpus, Discipline, DocKind, Document, DocumentFormat, Sample, Tweet};
use exagg_core::diffusion::{
    arrival_distribution, filter_corpus, filter_tweets, flag_extremes, ratios_from_counts, ArrivalBuckets, Bucket,
    Counted, FlagParams, Group,
};
use exagg_core::exaggeration::{label, quantize, StrengthScale};
use exagg_core::learn::{cross_validate, evaluate, stratified_kfold, Dataset, ForestParams, ModelSpec};
use exagg_core::lexicon::{count_texts, CategoryCounts, Normalization};
use exagg_core::synth;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

// 1. Label every annotation pair under every scale against an independent oracle.

fn coarse(level: u8, scale: StrengthScale) -> u8 {
    match scale {
        StrengthScale::Seven => level,
        StrengthScale::Four => level.div_ceil(2),
        StrengthScale::Two => 1 + u8::from(level == 7),
    }
}

fn annotated(id: &str, kind: DocKind, strength7: u8, advice: u8, sample: Sample) -> Document {
    Document {
        id: id.into(),
        kind,
        source: "src".into(),
        discipline: Discipline::Treatment,
        strength7,
        advice,
        sample,
        journal_ref: (kind != DocKind::Journal).then(|| "J".to_string()),
        publish_date: None,
        headline: None,
        urls: vec![],
    }
}

fn exhaustive_oracle() -> Outcome {
    let start = Instant::now();
    let mut anns = Vec::new();
    for s in 1..=7u8 {
        for a in 1..=4u8 {
            for sample in [Sample::Human, Sample::NonHuman] {
                anns.push((s, a, sample));
            }
        }
    }
    let mut cases = 0usize;
    let mut pairs = 0usize;
    for &(js, ja, jsample) in &anns {
        let journal = annotated("J", DocKind::Journal, js, ja, jsample);
        for &(ds, da, dsample) in &anns {
            pairs += 1;
            let doc = annotated("P", DocKind::PressRelease, ds, da, dsample);
            let mut strength_by_scale = BTreeMap::new();
            for scale in StrengthScale::ALL {
                let got = label(&doc, &journal, scale).map_err(|e| e.to_string())?;
                let strength = coarse(ds, scale) > coarse(js, scale);
                let advice = da > ja;
                let sample = dsample == Sample::Human && jsample == Sample::NonHuman;
                let want = (strength, advice, sample, strength || advice || sample);
                ensure((got.strength, got.advice, got.sample, got.overall) == want, || {
                    format!("mismatch at doc {ds}/{da}/{dsample:?} journal {js}/{ja}/{jsample:?} {scale}")
                })?;
                strength_by_scale.insert(scale, got.strength);
                cases += 1;
            }
            let [seven, four, two] = StrengthScale::ALL.map(|s| strength_by_scale[&s]);
            ensure((!two || four) && (!four || seven), || {
                format!("monotonicity broken at {ds} vs {js}")
            })?;
        }
    }
    let elapsed = start.elapsed();
    ensure(pairs == 3136, || format!("{pairs} pairs"))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "{pairs} pairs x 3 scales = {cases} cases agree, monotone, {elapsed:.2?}"
    ))
}

// 2. Quantization spot vectors.

fn quantization_table() -> Outcome {
    let map = |scale| (1..=7).map(|l| quantize(l, scale)).collect::<Result<Vec<u8>, _>>();
    let four = map(StrengthScale::Four).map_err(|e| e.to_string())?;
    let two = map(StrengthScale::Two).map_err(|e| e.to_string())?;
    let seven = map(StrengthScale::Seven).map_err(|e| e.to_string())?;
    ensure(four == [1, 1, 2, 2, 3, 3, 4], || format!("four {four:?}"))?;
    ensure(two == [1, 1, 1, 1, 1, 1, 2], || format!("two {two:?}"))?;
    ensure(seven == [1, 2, 3, 4, 5, 6, 7], || format!("seven {seven:?}"))?;
    Ok(format!("four {four:?}, two {two:?}"))
}

// 3. Document and per-discipline counts of the annotated dataset.

const TABLE: [(Discipline, usize, usize); 9] = [
    (Discipline::Lifestyle, 70, 121),
    (Discipline::MentalHealth, 14, 14),
    (Discipline::Childhood, 43, 58),
    (Discipline::Treatment, 61, 108),
    (Discipline::ObservationalIdentification, 203, 282),
    (Discipline::Policy, 29, 30),
    (Discipline::Ageing, 3, 4),
    (Discipline::PhysicalDisease, 38, 49),
    (Discipline::NotMentioned, 1, 2),
];

fn dataset_counts() -> Outcome {
    let (path, source) = match std::env::var_os("EXAGG_DATASET") {
        Some(p) => (PathBuf::from(p), "EXAGG_DATASET"),
        None => (repo_root().join("fixtures/documents.csv"), "bundled fixture"),
    };
    let docs = load_documents(&path, DocumentFormat::from_path(&path)).map_err(|e| e.to_string())?;
    let corpus = link(Corpus::new(docs, vec![], vec![]).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let kinds = [DocKind::Journal, DocKind::PressRelease, DocKind::NewsArticle].map(|k| corpus.count_kind(k));
    ensure(kinds == [462, 462, 668], || {
        format!("journal/press/news counts {kinds:?}")
    })?;
    let mut per: BTreeMap<(Discipline, DocKind), usize> = BTreeMap::new();
    for d in corpus.documents.values() {
        *per.entry((d.discipline, d.kind)).or_default() += 1;
    }
    for (disc, press, news) in TABLE {
        let got = [DocKind::PressRelease, DocKind::NewsArticle].map(|k| per.get(&(disc, k)).copied().unwrap_or(0));
        ensure(got == [press, news], || {
            format!("{disc:?}: {got:?}, expected [{press}, {news}]")
        })?;
    }
    Ok(format!("{source}: 462/462/668 and all 9 discipline rows exact"))
}

// 4. Ratio engine against exact rational counting.

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

// Exact p/q as f64 after reduction.
fn rational(p: u128, q: u128) -> f64 {
    let g = gcd(p, q).max(1);
    (p / g) as f64 / (q / g) as f64
}

fn close(got: Option<f64>, want: Option<f64>) -> bool {
    match (got, want) {
        (Some(a), Some(b)) => (a - b).abs() <= 1e-12 * b.abs().max(1.0),
        (None, None) => true,
        _ => false,
    }
}

fn ratio_engine() -> Outcome {
    const CATS: usize = 24;
    const TEXTS: usize = 4000;
    let start = Instant::now();
    let lex = synth::planted_lexicon(CATS);
    let texts = synth::planted_texts(CATS, TEXTS, 2016);
    let raw: Vec<&str> = texts.iter().map(|t| t.text.as_str()).collect();
    let counts: Vec<CategoryCounts> = count_texts(&raw, &lex);
    let counted: Vec<Counted> = texts
        .iter()
        .zip(counts)
        .map(|(t, c)| Counted {
            bucket: t.bucket,
            counts: c,
        })
        .collect();
    let pick = |g: Group| -> Vec<&Counted> {
        texts
            .iter()
            .zip(&counted)
            .filter(|(t, _)| t.group == g)
            .map(|(_, c)| c)
            .collect()
    };
    let (en, nen) = (pick(Group::En), pick(Group::Nen));
    let names = lex.category_names();
    let cells = [
        (Group::En, Bucket::Early),
        (Group::En, Bucket::Late),
        (Group::Nen, Bucket::Early),
        (Group::Nen, Bucket::Late),
    ];
    let mut values = 0;
    for norm in [Normalization::PerTweet, Normalization::PerWord] {
        let got = ratios_from_counts(&en, &nen, &names, StrengthScale::Seven, norm);
        for (k, rep) in got.reports.iter().enumerate() {
            let (kw_a, kw_b, stem) = (format!("kw{k}a"), format!("kw{k}b"), format!("st{k}x"));
            let mut m = [0u128; 4];
            let mut d = [0u128; 4];
            for t in &texts {
                let Some(cell) = cells.iter().position(|&c| c == (t.group, t.bucket)) else {
                    continue;
                };
                let words: Vec<String> = t.text.split_whitespace().map(str::to_lowercase).collect();
                m[cell] += words
                    .iter()
                    .filter(|w| **w == kw_a || **w == kw_b || w.starts_with(&stem))
                    .count() as u128;
                d[cell] += match norm {
                    Normalization::PerTweet => 1,
                    Normalization::PerWord => words.len() as u128,
                };
            }
            let frac = |i: usize| (d[i] > 0).then(|| rational(m[i], d[i]));
            // r = (mEL / dEL) / (mEE / dEE) / ((mNL / dNL) / (mNE / dNE))
            let r = (m[0] > 0 && m[2] > 0 && m[3] > 0)
                .then(|| rational(m[1] * d[0] * m[2] * d[3], d[1] * m[0] * d[2] * m[3]));
            let pairs = [
                ("eEarly", rep.e_early, frac(0)),
                ("eLate", rep.e_late, frac(1)),
                ("neEarly", rep.ne_early, frac(2)),
                ("neLate", rep.ne_late, frac(3)),
                ("r", rep.r, r),
            ];
            for (what, g, w) in pairs {
                ensure(close(g, w), || {
                    format!("{} {what} {norm:?}: {g:?} vs {w:?}", rep.category)
                })?;
                values += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!(
        "{CATS} categories, {TEXTS} texts, {values} values exact to 1e-12, {elapsed:.2?}"
    ))
}

// 5. Bucket partition and retention filter on planted tweets.

fn bucketing_and_filtering() -> Outcome {
    let docs = synth::annotation_corpus(2016);
    let news: Vec<&Document> = docs.iter().filter(|d| d.kind == DocKind::NewsArticle).collect();
    let planted = synth::diffusion_tweets(&news, 10_000, 500, 7);
    let corpus = link(Corpus::new(docs.clone(), planted.tweets.clone(), vec![]).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;

    let mut by_article: BTreeMap<&str, Vec<&Tweet>> = BTreeMap::new();
    for t in &corpus.tweets {
        by_article
            .entry(t.article_ref.as_deref().unwrap_or_default())
            .or_default()
            .push(t);
    }
    let mut kept: Vec<&Tweet> = Vec::new();
    for article in &news {
        let mine = by_article.get(article.id.as_str()).cloned().unwrap_or_default();
        kept.extend(filter_tweets(&mine, article).map_err(|e| e.to_string())?);
    }
    let kept_ids: BTreeSet<&str> = kept.iter().map(|t| t.id.as_str()).collect();
    let removed: BTreeSet<&str> = corpus
        .tweets
        .iter()
        .map(|t| t.id.as_str())
        .filter(|id| !kept_ids.contains(id))
        .collect();
    let planted_removed: BTreeSet<&str> = planted
        .before_publication
        .iter()
        .chain(&planted.without_article_url)
        .map(String::as_str)
        .collect();
    ensure(removed == planted_removed, || {
        format!("removed {} tweets, planted {}", removed.len(), planted_removed.len())
    })?;
    let retention = filter_corpus(&corpus).map_err(|e| e.to_string())?;
    let corpus_kept: BTreeSet<&str> = retention.retained.iter().map(|t| t.id.as_str()).collect();
    ensure(corpus_kept == kept_ids, || {
        "corpus-wide filter disagrees with per-article filter".into()
    })?;

    let buckets = ArrivalBuckets::default();
    let dist = arrival_distribution(&retention.retained, &corpus, &buckets).map_err(|e| e.to_string())?;
    let mut tally = [0u64; 3];
    for t in &retention.retained {
        let published = corpus
            .article_of(t)
            .and_then(|a| a.publish_date)
            .ok_or("unresolved article")?;
        let secs = (t.created_at - published).num_seconds();
        let b = match secs {
            s if s <= 0 => return Err(format!("retained tweet {} is not after publication", t.id)),
            s if s <= 86_400 => 0,
            s if s <= 365 * 86_400 => 1,
            _ => 2,
        };
        let got = buckets.bucket_of(published, t.created_at).ok_or("no bucket")?;
        ensure(got as usize == b, || format!("tweet {} in {got:?}", t.id))?;
        tally[b] += 1;
    }
    ensure(dist.counts == tally, || {
        format!("bucket counts {:?} vs {tally:?}", dist.counts)
    })?;
    ensure(tally.iter().sum::<u64>() == retention.retained_count as u64, || {
        "buckets do not cover every tweet".into()
    })?;
    let total = dist.early + dist.mid + dist.late;
    ensure((total - 1.0).abs() <= 1e-12, || format!("fractions sum to {total}"))?;
    Ok(format!(
        "10000 tweets: {} pre-publication and {} url-less removed exactly, buckets {:?} sum to 1",
        planted.before_publication.len(),
        planted.without_article_url.len(),
        tally
    ))
}

// 6. Flags require agreement across scales and adequate support.

fn counted(bucket: Bucket, per_tweet: &[u32]) -> Vec<Counted> {
    per_tweet
        .iter()
        .map(|&c| Counted {
            bucket,
            counts: CategoryCounts {
                counts: vec![c],
                token_count: 10,
            },
        })
        .collect()
}

// One category with the given per-tweet counts in each (group, bucket) cell.
fn planted_report(scale: StrengthScale, name: &str, cells: [&[u32]; 4]) -> exagg_core::diffusion::RatioReport {
    let en: Vec<Counted> = [counted(Bucket::Early, cells[0]), counted(Bucket::Late, cells[1])].concat();
    let nen: Vec<Counted> = [counted(Bucket::Early, cells[2]), counted(Bucket::Late, cells[3])].concat();
    let en: Vec<&Counted> = en.iter().collect();
    let nen: Vec<&Counted> = nen.iter().collect();
    ratios_from_counts(&en, &nen, &[name], scale, Normalization::PerTweet)
        .reports
        .remove(0)
}

fn flag_guard() -> Outcome {
    let ones = [1u32; 20];
    let sixes = [6u32; 20];
    let halves: Vec<u32> = (0..20).map(|i| u32::from(i % 2 == 0)).collect();
    let threes = [3u32; 20];
    let mut thin_early = vec![0u32; 19];
    thin_early.push(1);
    let mut thin_late = vec![0u32; 19];
    thin_late.push(4);

    let mut reports = Vec::new();
    for scale in StrengthScale::ALL {
        let late: &[u32] = if scale == StrengthScale::Two { &halves } else { &sixes };
        reports.push(planted_report(scale, "dissent", [&ones, late, &ones, &ones]));
        reports.push(planted_report(
            scale,
            "thin",
            [&thin_early, &thin_late, &thin_early, &thin_early],
        ));
        reports.push(planted_report(scale, "robust", [&ones, &threes, &ones, &ones]));
    }
    let r = |name: &str, scale| {
        reports
            .iter()
            .find(|x| x.category == name && x.scale == scale)
            .and_then(|x| x.r)
    };
    ensure(
        r("dissent", StrengthScale::Seven) == Some(6.0) && r("dissent", StrengthScale::Two) == Some(0.5),
        || "dissent plant did not produce r = 6 / 0.5".into(),
    )?;
    let thin = reports.iter().find(|x| x.category == "thin").ok_or("thin missing")?;
    ensure(thin.r.is_some_and(|v| v >= 2.0) && thin.support.min() == 1, || {
        format!("thin plant {thin:?}")
    })?;

    let flags = flag_extremes(&reports, &FlagParams::default());
    ensure(!flags.high.contains(&"dissent".to_string()), || {
        "dissent flagged".into()
    })?;
    ensure(!flags.high.contains(&"thin".to_string()), || {
        "support-1 category flagged".into()
    })?;
    ensure(flags.high == ["robust"] && flags.low.is_empty(), || {
        format!("unexpected flags {flags:?}")
    })?;
    Ok("r = 6/6/0.5 and support-1 categories unflagged; consistent r = 3 flagged".into())
}

// 7. Weighted metrics and stratified folds.

fn metrics_oracle(t: &[usize], p: &[usize]) -> [f64; 3] {
    let n = t.len() as f64;
    let mut out = [0.0; 3];
    for k in 0..2 {
        let hit = |a: bool, b: bool| {
            t.iter()
                .zip(p)
                .filter(|&(&x, &y)| (x == k) == a && (y == k) == b)
                .count() as f64
        };
        let (tp, fp, fn_) = (hit(true, true), hit(false, true), hit(true, false));
        let prec = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        let rec = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
        let f1 = if prec + rec > 0.0 {
            2.0 * prec * rec / (prec + rec)
        } else {
            0.0
        };
        let w = (tp + fn_) / n;
        out[0] += w * prec;
        out[1] += w * rec;
        out[2] += w * f1;
    }
    out
}

fn metrics_and_folds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2016);
    for case in 0..100 {
        let n = rng.gen_range(1..300);
        let bias = rng.gen_range(0.05..0.95);
        let t: Vec<usize> = (0..n).map(|_| usize::from(rng.gen_bool(bias))).collect();
        let p: Vec<usize> = (0..n).map(|_| usize::from(rng.gen_bool(bias))).collect();
        let m = evaluate(&t, &p).map_err(|e| e.to_string())?;
        let want = metrics_oracle(&t, &p);
        let got = [m.precision, m.recall, m.f1];
        ensure(got.iter().zip(want).all(|(a, b)| (a - b).abs() <= 1e-12), || {
            format!("case {case}: {got:?} vs {want:?}")
        })?;
    }
    let mut checked = 0;
    while checked < 100 {
        let n = rng.gen_range(20..500);
        let k = rng.gen_range(2..=10);
        let bias = rng.gen_range(0.05..0.5);
        let labels: Vec<usize> = (0..n).map(|_| usize::from(rng.gen_bool(bias))).collect();
        let counts = [
            labels.iter().filter(|&&l| l == 0).count(),
            labels.iter().filter(|&&l| l == 1).count(),
        ];
        if counts.iter().any(|&c| c < k) {
            continue;
        }
        let folds = stratified_kfold(&labels, k, rng.gen()).map_err(|e| e.to_string())?;
        let mut seen = vec![0u8; n];
        for f in &folds {
            for &i in f {
                seen[i] += 1;
            }
        }
        ensure(seen.iter().all(|&c| c == 1), || {
            format!("vector {checked}: folds are not a partition")
        })?;
        for (class, &count) in counts.iter().enumerate() {
            let per: Vec<f64> = folds
                .iter()
                .map(|f| f.iter().filter(|&&i| labels[i] == class).count() as f64)
                .collect();
            let ideal = count as f64 / k as f64;
            ensure(per.iter().all(|c| (c - ideal).abs() < 1.0), || {
                format!("vector {checked}: class {class} spread {per:?}")
            })?;
        }
        checked += 1;
    }
    Ok("100 metric pairs match to 1e-12; 100 fold sets partition with per-class counts within 1 of ideal".into())
}

// 8. Forest on separable but imbalanced clusters, and on permuted labels.

fn classifier_sanity() -> Outcome {
    let start = Instant::now();
    let (rows, labels) = synth::two_clusters(2000, 20, 7, 1.5, 2016);
    let names: Vec<String> = (0..20).map(|i| format!("x{i}")).collect();
    let data = Dataset::new(rows.clone(), labels.clone(), names.clone()).map_err(|e| e.to_string())?;
    let spec = ModelSpec::Forest(ForestParams {
        seed: 2016,
        ..ForestParams::default()
    });
    let real = cross_validate(&data, &spec, 10, 2016).map_err(|e| e.to_string())?;

    let mut permuted = labels.clone();
    permuted.shuffle(&mut ChaCha8Rng::seed_from_u64(99));
    let shuffled = Dataset::new(rows, permuted, names).map_err(|e| e.to_string())?;
    let noise = cross_validate(&shuffled, &spec, 10, 2016).map_err(|e| e.to_string())?;

    // always predicting the majority class: weighted F1 = q * 2q / (1 + q)
    let q = labels.iter().filter(|&&l| l == 0).count() as f64 / labels.len() as f64;
    let baseline = q * 2.0 * q / (1.0 + q);
    let elapsed = start.elapsed();
    ensure(real.mean.f1 >= 0.95, || format!("F1 {:.4} < 0.95", real.mean.f1))?;
    ensure((noise.mean.f1 - baseline).abs() <= 0.1, || {
        format!("permuted F1 {:.4} vs baseline {baseline:.4}", noise.mean.f1)
    })?;
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "F1 {:.4}; permuted {:.4} vs majority baseline {baseline:.4}; {elapsed:.2?}",
        real.mean.f1, noise.mean.f1
    ))
}

// 9. Every command reproduces its outputs byte for byte across reruns and thread counts.

fn run_exagg(args: &[String]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_exagg"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!(
            "`exagg {}` failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn snapshot(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let entry = entry.map_err(|e| e.to_string())?;
        let name = entry.file_name().to_string_lossy().into_owned();
        files.insert(name, std::fs::read(entry.path()).map_err(|e| e.to_string())?);
    }
    Ok(files)
}

fn cli_determinism() -> Outcome {
    let fixtures = repo_root().join("fixtures");
    let s = |p: PathBuf| p.to_string_lossy().into_owned();
    let docs = s(fixtures.join("documents.csv"));
    let tweets = s(fixtures.join("tweets.jsonl"));
    let timelines = s(fixtures.join("timelines.jsonl"));
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let base = tmp.path();
    // downstream inputs always come from the first run so that inputs are identical
    let ratios = s(base.join("r0/diffusion/ratios.csv"));
    let features = s(base.join("r0/profile/features.csv"));
    let commands: Vec<(&str, Vec<&str>)> = vec![
        (
            "ingest",
            vec![
                "ingest",
                "--documents",
                &docs,
                "--tweets",
                &tweets,
                "--timelines",
                &timelines,
            ],
        ),
        ("label", vec!["label", "--documents", &docs]),
        ("report", vec!["report", "--documents", &docs]),
        (
            "report-disc",
            vec![
                "report",
                "--documents",
                &docs,
                "--group-by",
                "discipline",
                "--kind",
                "press",
            ],
        ),
        (
            "diffusion",
            vec!["diffusion", "--documents", &docs, "--tweets", &tweets],
        ),
        ("flag", vec!["flag", "--ratios", &ratios]),
        (
            "profile",
            vec![
                "profile",
                "--documents",
                &docs,
                "--tweets",
                &tweets,
                "--timelines",
                &timelines,
            ],
        ),
        (
            "train-eval",
            vec!["train-eval", "--features", &features, "--seed", "7", "--n-trees", "40"],
        ),
    ];
    let runs: [(&str, Option<&str>); 4] = [("r0", Some("1")), ("r1", Some("1")), ("r2", Some("4")), ("r3", None)];
    for (run, threads) in runs {
        for (name, args) in &commands {
            let mut full: Vec<String> = threads
                .map(|t| vec!["--threads".to_string(), t.to_string()])
                .unwrap_or_default();
            full.extend(args.iter().map(|a| a.to_string()));
            full.push("--out".into());
            full.push(s(base.join(run).join(name)));
            run_exagg(&full)?;
        }
    }
    let mut files = 0;
    for (name, _) in &commands {
        let reference = snapshot(&base.join("r0").join(name))?;
        ensure(reference.contains_key("manifest.json"), || {
            format!("{name}: no manifest")
        })?;
        for (run, threads) in &runs[1..] {
            let other = snapshot(&base.join(run).join(name))?;
            let names: Vec<&String> = reference.keys().collect();
            ensure(other.keys().collect::<Vec<_>>() == names, || {
                format!("{name}: file sets differ in {run}")
            })?;
            for (file, bytes) in &reference {
                ensure(other[file] == *bytes, || {
                    format!("{name}/{file} differs with --threads {}", threads.unwrap_or("default"))
                })?;
            }
        }
        files += reference.len();
    }
    Ok(format!(
        "{} commands x 4 runs (threads 1, 1, 4, default): {files} files byte-identical",
        commands.len()
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("exhaustive label oracle", exhaustive_oracle),
        ("quantization table", quantization_table),
        ("dataset counts", dataset_counts),
        ("ratio engine", ratio_engine),
        ("bucketing and filtering", bucketing_and_filtering),
        ("extreme-flag guard", flag_guard),
        ("metrics and folds", metrics_and_folds),
        ("classifier sanity", classifier_sanity),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

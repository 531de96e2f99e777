//! Regenerates the bundled fixture corpus.
//!
//! `cargo run -p exagg-core --example make_fixtures -- fixtures`

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use exagg_core::corpus::{write_documents_csv, write_jsonl, DocKind};
use exagg_core::synth;

const SEED: u64 = 2016;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    fs::create_dir_all(&dir)?;

    let docs = synth::annotation_corpus(SEED);
    write_documents_csv(&docs, BufWriter::new(File::create(dir.join("documents.csv"))?))?;

    let news: Vec<_> = docs.iter().filter(|d| d.kind == DocKind::NewsArticle).collect();
    let planted = synth::diffusion_tweets(&news, 2_000, 100, SEED + 1);
    write_jsonl(&planted.tweets, BufWriter::new(File::create(dir.join("tweets.jsonl"))?))?;

    let users: Vec<String> = (0..160).map(|i| format!("u{i:04}")).collect();
    let timelines = synth::timelines(&users, &news, SEED + 2);
    write_jsonl(&timelines, BufWriter::new(File::create(dir.join("timelines.jsonl"))?))?;

    println!(
        "{} documents, {} tweets ({} pre-publication, {} without article url), {} timelines",
        docs.len(),
        planted.tweets.len(),
        planted.before_publication.len(),
        planted.without_article_url.len(),
        timelines.len()
    );
    Ok(())
}

use exagg_core::corpus::{Discipline, DocKind, Document, Sample};
use exagg_core::exaggeration::{label, label_levels, quantize, StrengthScale};

// Independent quantization: integer bands rather than lookup tables.
fn coarse(level: u8, scale: StrengthScale) -> u8 {
    match scale {
        StrengthScale::Seven => level,
        StrengthScale::Four => level.div_ceil(2),
        StrengthScale::Two => 1 + u8::from(level == 7),
    }
}

fn oracle(doc: (u8, u8, Sample), journal: (u8, u8, Sample), scale: StrengthScale) -> [bool; 4] {
    let strength = coarse(doc.0, scale) > coarse(journal.0, scale);
    let advice = doc.1 > journal.1;
    let sample = matches!((doc.2, journal.2), (Sample::Human, Sample::NonHuman));
    [strength, advice, sample, strength || advice || sample]
}

fn annotations() -> Vec<(u8, u8, Sample)> {
    let mut out = Vec::new();
    for s in 1..=7 {
        for a in 1..=4 {
            for sample in [Sample::Human, Sample::NonHuman] {
                out.push((s, a, sample));
            }
        }
    }
    out
}

fn doc(id: &str, kind: DocKind, ann: (u8, u8, Sample)) -> Document {
    Document {
        id: id.into(),
        kind,
        source: "s".into(),
        discipline: Discipline::Lifestyle,
        strength7: ann.0,
        advice: ann.1,
        sample: ann.2,
        journal_ref: (kind != DocKind::Journal).then(|| "J".to_string()),
        publish_date: None,
        headline: None,
        urls: vec![],
    }
}

#[test]
fn all_combinations_match_oracle() {
    let anns = annotations();
    assert_eq!(anns.len() * anns.len(), 3136);
    let mut checked = 0;
    for &j in &anns {
        let journal = doc("J", DocKind::Journal, j);
        for &d in &anns {
            let pr = doc("P", DocKind::PressRelease, d);
            for scale in StrengthScale::ALL {
                let got = label(&pr, &journal, scale).unwrap();
                assert_eq!([got.strength, got.advice, got.sample, got.overall], oracle(d, j, scale));
                assert_eq!(got.scale, scale);
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 3136 * 3);
}

#[test]
fn coarser_strength_flag_implies_finer() {
    for (ds, js) in (1..=7).flat_map(|a| (1..=7).map(move |b| (a, b))) {
        let flag = |scale| {
            label_levels(ds, 1, Sample::Human, js, 1, Sample::Human, scale)
                .unwrap()
                .strength
        };
        if flag(StrengthScale::Two) {
            assert!(flag(StrengthScale::Four), "{ds} vs {js}");
        }
        if flag(StrengthScale::Four) {
            assert!(flag(StrengthScale::Seven), "{ds} vs {js}");
        }
    }
}

#[test]
fn quantization_tables() {
    let four: Vec<u8> = (1..=7).map(|l| quantize(l, StrengthScale::Four).unwrap()).collect();
    let two: Vec<u8> = (1..=7).map(|l| quantize(l, StrengthScale::Two).unwrap()).collect();
    let seven: Vec<u8> = (1..=7).map(|l| quantize(l, StrengthScale::Seven).unwrap()).collect();
    assert_eq!(four, [1, 1, 2, 2, 3, 3, 4]);
    assert_eq!(two, [1, 1, 1, 1, 1, 1, 2]);
    assert_eq!(seven, [1, 2, 3, 4, 5, 6, 7]);
    assert!(quantize(0, StrengthScale::Seven).is_err());
    assert!(quantize(8, StrengthScale::Two).is_err());
}

#[test]
fn journal_must_be_a_journal() {
    let a = (3, 2, Sample::Human);
    let pr = doc("P", DocKind::PressRelease, a);
    let not_journal = doc("J", DocKind::NewsArticle, a);
    assert!(label(&pr, &not_journal, StrengthScale::Seven).is_err());
}

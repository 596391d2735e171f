use std::collections::BTreeSet;
use std::sync::OnceLock;

use morfwork::corpus::TaggedCorpus;
use morfwork::error::SearchError;
use morfwork::features::{Dimension, FeatureBundle, FeatureVocabulary};
use morfwork::index::{build_index, FeatureIndex};
use morfwork::search::{analysis_view, search, search_by_scan, Implications, Query, SearchOutcome};
use morfwork::workbench::bundled;
use morfwork::Workbench;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

struct Fixture {
    wb: Workbench,
    tagged: TaggedCorpus,
    index: FeatureIndex,
}

fn fx() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let tagged = TaggedCorpus::from_text(bundled::GOLD).unwrap();
        Fixture {
            wb: Workbench::bundled().unwrap(),
            index: build_index(&tagged),
            tagged,
        }
    })
}

fn imp() -> &'static Implications {
    &fx().wb.implications
}

fn vocab() -> &'static FeatureVocabulary {
    &fx().wb.vocabulary
}

fn query(text: &str) -> Query {
    Query::from_pairs(text.split('&').map(|p| p.split_once('=').unwrap())).unwrap()
}

fn by_index(q: &Query) -> SearchOutcome {
    search(q, imp(), vocab(), &fx().index, &fx().tagged).unwrap()
}

fn by_scan(q: &Query) -> SearchOutcome {
    search_by_scan(q, imp(), vocab(), &fx().tagged).unwrap()
}

/// (sentences, tokens) per query, counted by the linear scan when the
/// sample corpus was authored.
const FROZEN: &[(&str, usize, usize)] = &[
    ("voice=passive&aspect=past&agreement=3sg", 9, 9),
    ("case=dative", 3, 3),
    ("case=genitive", 8, 8),
    ("possessive=3sg", 6, 6),
    ("category=noun", 52, 79),
    ("case=nominative", 49, 80),
    ("suffix=PL", 5, 6),
    ("root=ev", 12, 12),
    ("voice=passive", 9, 9),
    ("sense=negative-capability", 2, 2),
    ("case=locative&category=noun", 9, 9),
    ("agreement=3pl", 6, 8),
    ("agreement=1sg", 4, 4),
    ("possessive=1sg", 5, 5),
    ("case=accusative", 10, 10),
    ("category=verb", 35, 35),
    ("category=adjective&case=nominative", 20, 28),
    ("suffix=REL", 1, 1),
    ("sense=negative", 1, 1),
];

#[test]
fn frozen_counts() {
    for &(text, sentences, tokens) in FROZEN {
        let q = query(text);
        for out in [by_index(&q), by_scan(&q)] {
            let hits = out.hits().unwrap();
            assert_eq!((hits.len(), out.positions().len()), (sentences, tokens), "{text}");
        }
    }
}

#[test]
fn passive_past_hits_kesilemedi_with_spans() {
    let out = by_index(&query("agreement=3sg&aspect=past&voice=passive"));
    let first = &out.hits().unwrap()[0];
    assert_eq!(first.sentence_id, 0);
    assert_eq!(first.matches, [4]);
    assert_eq!(first.spans, [(28, 38)]);
    let chars: Vec<char> = first.text.chars().collect();
    assert_eq!(chars[28..38].iter().collect::<String>(), "kesilemedi");
}

#[test]
fn dative_implies_noun() {
    let q = imp().implied_features(&query("case=dative")).unwrap();
    assert_eq!(q.get(Dimension::Category), Some("noun"));
    assert!(q.category_is_implied());
    let q = imp().implied_features(&query("voice=passive")).unwrap();
    assert_eq!(q.get(Dimension::Category), Some("verb"));
    let q = imp().implied_features(&query("agreement=3sg")).unwrap();
    assert_eq!(q.get(Dimension::Category), None);
}

#[test]
fn dative_past_conflicts() {
    let out = by_index(&query("case=dative&tense=past"));
    let SearchOutcome::Conflict(c) = out else { panic!("expected a conflict") };
    assert!(c.explanation.contains("noun") && c.explanation.contains("verb"));
    assert!(c.features.contains(&("case".into(), "dative".into())));
    assert!(c.features.contains(&("tense".into(), "past".into())));
    assert_eq!(by_scan(&query("case=dative&tense=past")), by_index(&query("case=dative&tense=past")));
    assert!(matches!(by_index(&query("category=verb&case=dative")), SearchOutcome::Conflict(_)));
}

#[test]
fn validation_errors() {
    let err = |q: &Query| search(q, imp(), vocab(), &fx().index, &fx().tagged).unwrap_err();
    assert_eq!(err(&Query::new()), SearchError::EmptyQuery);
    assert!(matches!(err(&query("case=vocative")), SearchError::UnknownFeatureValue { .. }));
    assert!(matches!(err(&query("suffix=NOPE")), SearchError::UnknownFeatureValue { .. }));
    assert!(matches!(Query::from_pairs([("mood", "x")]), Err(SearchError::UnknownField(_))));
    assert!(Query::from_pairs([("case", "")]).unwrap().is_empty());
    // An unknown root is a valid query with no hits.
    assert!(by_index(&query("root=zzz")).hits().unwrap().is_empty());
}

#[test]
fn analysis_view_of_kesilemedi() {
    let m = fx().wb.analyzer.morphotactics();
    let view = analysis_view(&fx().tagged, 0, 4, m).unwrap();
    assert_eq!(view.token, "kesilemedi");
    assert_eq!(view.lexical_gloss, "kes+Hl+yAmA+DH");
    let fields: Vec<(&str, &str)> = view.fields.iter().map(|f| (f.label.as_str(), f.value.as_str())).collect();
    assert_eq!(
        fields,
        [
            ("Root", "kes"),
            ("Category", "Verb"),
            ("Sense", "Negative capability"),
            ("Voice", "Passive"),
            ("Agreement", "3rd singular"),
            ("Aspect", "Past"),
        ]
    );
    assert!(matches!(analysis_view(&fx().tagged, 0, 5, m), Err(SearchError::NoAnalysis(_))));
    assert!(matches!(analysis_view(&fx().tagged, 0, 50, m), Err(SearchError::OutOfRange { .. })));
    assert!(matches!(analysis_view(&fx().tagged, 999, 0, m), Err(SearchError::OutOfRange { .. })));
}

/// Field/value choices for random queries: every vocabulary value, every
/// suffix, and the roots seen in the corpus.
fn choices() -> Vec<(String, Vec<String>)> {
    let mut out: Vec<(String, Vec<String>)> = vocab()
        .dimensions
        .iter()
        .map(|(d, vals)| (d.to_string(), vals.iter().cloned().collect()))
        .collect();
    out.push(("suffix".into(), vocab().suffixes.iter().cloned().collect()));
    let roots: BTreeSet<String> = fx().tagged.analyzed().map(|(_, _, b)| b.root.clone()).collect();
    out.push(("root".into(), roots.into_iter().collect()));
    out
}

fn random_query(rng: &mut StdRng, fields: &[(String, Vec<String>)]) -> Query {
    let k = rng.gen_range(1..=3);
    let picked: Vec<&(String, Vec<String>)> = fields.choose_multiple(rng, k).collect();
    let pairs: Vec<(&str, &str)> = picked
        .iter()
        .map(|(f, vals)| (f.as_str(), vals.choose(rng).unwrap().as_str()))
        .collect();
    Query::from_pairs(pairs).unwrap()
}

#[test]
fn two_hundred_random_queries_agree() {
    let fields = choices();
    let mut rng = StdRng::seed_from_u64(1994);
    let mut nonempty = 0;
    for _ in 0..200 {
        let q = random_query(&mut rng, &fields);
        let (a, b) = (by_index(&q), by_scan(&q));
        assert_eq!(a, b, "{q}");
        nonempty += usize::from(!a.positions().is_empty());
    }
    assert!(nonempty >= 20, "only {nonempty} queries had hits");
}

/// Every bundle the shipped lexicon and paradigms can produce with up to
/// four suffixes.
fn all_bundles() -> &'static [FeatureBundle] {
    static B: OnceLock<Vec<FeatureBundle>> = OnceLock::new();
    B.get_or_init(|| {
        let a = &fx().wb.analyzer;
        let m = a.morphotactics();
        a.lexicon()
            .entries()
            .iter()
            .flat_map(|e| {
                m.enumerate_lexical_forms(e, 4)
                    .into_iter()
                    .map(move |p| m.bundle(e, &p.morphemes).unwrap())
            })
            .collect()
    })
}

fn arb_query() -> impl Strategy<Value = Query> {
    any::<u64>().prop_map(|seed| random_query(&mut StdRng::seed_from_u64(seed), &choices()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn index_equals_scan(q in arb_query()) {
        prop_assert_eq!(by_index(&q), by_scan(&q));
    }

    #[test]
    fn adding_a_field_never_adds_hits(q in arb_query(), extra in arb_query()) {
        let mut narrower = q.clone();
        for (d, v) in extra.values() {
            if q.get(d).is_none() {
                narrower = narrower.set(d, v);
            }
        }
        if let (Some(_), Some(_)) = (by_index(&q).hits(), by_index(&narrower).hits()) {
            prop_assert!(by_index(&narrower).positions().is_subset(&by_index(&q).positions()));
        }
    }

    #[test]
    fn implication_is_idempotent(q in arb_query()) {
        if let Ok(once) = imp().implied_features(&q) {
            prop_assert_eq!(imp().implied_features(&once).unwrap(), once);
        }
    }

    #[test]
    fn conflicts_have_no_witness(q in arb_query()) {
        if let SearchOutcome::Conflict(_) = by_index(&q) {
            prop_assert!(all_bundles().iter().all(|b| !q.matches(b)));
        }
    }
}

use std::sync::OnceLock;

use morfwork::analyzer::Parse;
use morfwork::corpus::{read_sentences, TaggedCorpus};
use morfwork::disambiguator::{apply_constraint, load_constraints, tag_sentence, ResolvedBy, RootStats};
use morfwork::error::{ConstraintError, TagError};
use morfwork::text::turkish_lowercase;
use morfwork::workbench::{bundled, TagRun};
use morfwork::Workbench;
use proptest::prelude::*;

fn wb() -> &'static Workbench {
    static W: OnceLock<Workbench> = OnceLock::new();
    W.get_or_init(|| Workbench::bundled().unwrap())
}

fn bundled_run() -> &'static TagRun {
    static R: OnceLock<TagRun> = OnceLock::new();
    R.get_or_init(|| wb().tag_corpus(bundled::CORPUS, None, false).unwrap())
}

fn gloss(a: &morfwork::disambiguator::TokenAnalysis) -> String {
    a.chosen_parse().map(Parse::tag_gloss).unwrap_or_default()
}

#[test]
fn senin_evin_is_second_person_possessive() {
    let out = wb().tag_tokens(&["senin", "evin"]);
    assert_eq!(gloss(&out[0]), "PN(sen)+GEN");
    assert_eq!(gloss(&out[1]), "N(ev)+2SG-POSS");
    assert!(matches!(out[1].resolved_by, Some(ResolvedBy::Constraint(_))));
}

#[test]
fn evin_kapisi_is_genitive() {
    let out = wb().tag_tokens(&["evin", "kapısı"]);
    assert_eq!(gloss(&out[0]), "N(ev)+GEN");
    assert_eq!(out[0].resolved_by, Some(ResolvedBy::Constraint("GEN-before-POSS3".into())));
    assert_eq!(gloss(&out[1]), "N(kapı)+3SG-POSS");
}

#[test]
fn single_parse_is_unambiguous() {
    let out = wb().tag_tokens(&["ev"]);
    assert_eq!(out[0].resolved_by, Some(ResolvedBy::Unambiguous));
    assert_eq!(out[0].chosen, Some(0));
}

#[test]
fn resolution_bookkeeping() {
    for row in &bundled_run().analyses {
        for a in row {
            match a.chosen {
                None => {
                    assert!(a.candidates.is_empty());
                    assert_eq!(a.resolved_by, None);
                }
                Some(i) => assert!(i < a.candidates.len()),
            }
            assert_eq!(a.resolved_by == Some(ResolvedBy::Unambiguous), a.candidates.len() == 1);
        }
    }
}

#[test]
fn bundled_corpus_matches_gold() {
    let run = bundled_run();
    let gold = TaggedCorpus::from_text(bundled::GOLD).unwrap();
    assert!(run.corpus.len() >= 40);
    assert_eq!(gold.len(), run.corpus.len());
    let mut checked = 0;
    for (s, row) in run.analyses.iter().enumerate() {
        for (t, a) in row.iter().enumerate() {
            if matches!(a.resolved_by, Some(ResolvedBy::Constraint(_) | ResolvedBy::Statistics)) {
                checked += 1;
                assert_eq!(run.corpus.bundle(s, t), gold.bundle(s, t), "{s}:{t} {}", a.token);
            }
        }
    }
    assert!(checked >= 20, "only {checked} tokens needed context");
    assert!(run.report.unresolved_rate() <= 0.10, "{}", run.report);
    assert_eq!(run.report.unknown, 0, "{}", run.report);
}

#[test]
fn chosen_parses_come_from_the_analyzer() {
    let run = bundled_run();
    for (sentence, row) in run.corpus.sentences.iter().zip(&run.analyses) {
        for (tok, a) in sentence.tokens.iter().zip(row) {
            if let Some(p) = a.chosen_parse() {
                let all = wb().analyzer.analyze(&tok.text).unwrap();
                assert!(all.contains(p), "{}", tok.text);
            }
        }
    }
}

#[test]
fn tagging_is_deterministic() {
    let again = wb().tag_corpus(bundled::CORPUS, None, false).unwrap();
    assert_eq!(again.analyses, bundled_run().analyses);
    assert_eq!(again.corpus, bundled_run().corpus);
    assert_eq!(again.report, bundled_run().report);
}

#[test]
fn empty_corpus() {
    let run = wb().tag_corpus("\n  \n", None, true).unwrap();
    assert!(run.corpus.is_empty());
    assert_eq!(run.report.sentences, 0);
    assert_eq!(run.report.analyzed, 0);
    assert_eq!(run.report.unresolved_rate(), 0.0);
}

#[test]
fn unambiguous_corpus() {
    let run = wb().tag_corpus("Kedi masada uyudu.\nMasa kırmızı.\n", None, true).unwrap();
    assert!(run.report.analyzed > 0);
    assert_eq!(run.report.unambiguous, run.report.analyzed);
}

#[test]
fn strict_mode_reports_leftovers() {
    match wb().tag_corpus("Gül güzel.\n", None, true) {
        Err(TagError::Unresolved(list)) => assert_eq!(list, ["0:0 Gül"]),
        other => panic!("expected unresolved error, got {:?}", other.map(|r| r.report)),
    }
    let lenient = wb().tag_corpus("Gül güzel.\n", None, false).unwrap();
    assert_eq!(lenient.report.unresolved, 1);
    assert_eq!(lenient.analyses[0][0].chosen, Some(0));
}

#[test]
fn interactive_choice() {
    let mut asked = Vec::new();
    let mut pick_last = |tokens: &[String], i: usize, cands: &[Parse]| {
        asked.push((tokens[i].clone(), cands.len()));
        cands.len() - 1
    };
    let run = wb().tag_corpus("Gül güzel.\n", Some(&mut pick_last), true).unwrap();
    assert_eq!(asked, [("Gül".to_string(), 2)]);
    assert_eq!(run.report.interactive, 1);
    assert_eq!(run.analyses[0][0].resolved_by, Some(ResolvedBy::Interactive));
    assert_eq!(run.analyses[0][0].chosen, Some(1));

    let mut bad = |_: &[String], _: usize, _: &[Parse]| 7;
    assert!(matches!(
        wb().tag_corpus("Gül güzel.\n", Some(&mut bad), false),
        Err(TagError::BadChoice { choice: 7, .. })
    ));
}

#[test]
fn statistics_pick_the_frequent_root() {
    let words = ["okul".to_string()];
    let cands = vec![wb().analyzer.analyze("okul").unwrap()];
    let roots: Vec<&str> = cands[0].iter().map(|p| p.root.root.as_str()).collect();
    assert_eq!(roots.len(), 2, "{roots:?}");
    let mut stats = RootStats::default();
    stats.insert("oku", 10);
    stats.insert("okul", 1);
    let out = tag_sentence(&words, cands.clone(), &[], &stats, None).unwrap();
    assert_eq!(out[0].chosen_parse().unwrap().root.root, "oku");
    assert_eq!(out[0].resolved_by, Some(ResolvedBy::Statistics));
    let out = tag_sentence(&words, cands, &[], &RootStats::default(), None).unwrap();
    assert_eq!(out[0].resolved_by, Some(ResolvedBy::Unresolved));
}

#[test]
fn constraint_file_validation() {
    assert!(load_constraints(bundled::CONSTRAINTS).unwrap().len() >= 2);
    let names: Vec<String> = load_constraints(bundled::CONSTRAINTS).unwrap().into_iter().map(|c| c.name).collect();
    assert!(names.contains(&"GEN-before-POSS3".to_string()));
    assert!(names.contains(&"POSS-after-GEN-pronoun".to_string()));
    let dup = "CONSTRAINT a PRIORITY 5 SELECT [TARGET: case=genitive] ;\n\
               CONSTRAINT b PRIORITY 5 SELECT [TARGET: case=dative] ;\n";
    assert!(matches!(load_constraints(dup), Err(ConstraintError::DuplicatePriority { priority: 5, .. })));
}

/// Sentences of the bundled corpus with their tokens and candidate lists.
fn sentence_pool() -> &'static [(Vec<String>, Vec<Vec<Parse>>)] {
    static P: OnceLock<Vec<(Vec<String>, Vec<Vec<Parse>>)>> = OnceLock::new();
    P.get_or_init(|| {
        read_sentences(bundled::CORPUS)
            .into_iter()
            .map(|s| {
                let tokens: Vec<String> = s.tokens.iter().map(|t| t.text.clone()).collect();
                let cands = s
                    .tokens
                    .iter()
                    .map(|t| {
                        if t.is_punctuation() {
                            Vec::new()
                        } else {
                            wb().analyzer.analyze(&turkish_lowercase(&t.text)).unwrap_or_default()
                        }
                    })
                    .collect();
                (tokens, cands)
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fired_constraints_shrink_without_emptying(
        s in any::<prop::sample::Index>(),
        masks in prop::collection::vec(any::<u8>(), 8),
    ) {
        let (tokens, cands) = &sentence_pool()[s.index(sentence_pool().len())];
        let live: Vec<Vec<usize>> = cands
            .iter()
            .zip(masks.iter().cycle())
            .map(|(c, m)| {
                let kept: Vec<usize> = (0..c.len()).filter(|k| m & (1 << (k % 8)) != 0).collect();
                if kept.is_empty() { (0..c.len()).collect() } else { kept }
            })
            .collect();
        for c in &wb().constraints {
            for i in 0..tokens.len() {
                if let Some(kept) = apply_constraint(c, i, tokens, cands, &live) {
                    prop_assert!(!kept.is_empty());
                    prop_assert!(kept.len() < live[i].len());
                    prop_assert!(kept.iter().all(|k| live[i].contains(k)));
                }
            }
        }
    }

    #[test]
    fn tag_sentence_is_pure(s in any::<prop::sample::Index>(), drop in any::<prop::sample::Index>()) {
        let (tokens, cands) = &sentence_pool()[s.index(sentence_pool().len())];
        let mut constraints = wb().constraints.clone();
        constraints.remove(drop.index(constraints.len()));
        let a = tag_sentence(tokens, cands.clone(), &constraints, &wb().stats, None).unwrap();
        let b = tag_sentence(tokens, cands.clone(), &constraints, &wb().stats, None).unwrap();
        prop_assert_eq!(&a, &b);
        for (x, c) in a.iter().zip(cands) {
            prop_assert_eq!(x.chosen.is_some(), !c.is_empty());
        }
    }
}

use std::collections::BTreeSet;
use std::sync::OnceLock;

use morfwork::lexicon::load_lexicon;
use morfwork::morphotactics::load_paradigms;
use morfwork::phonology::{check_rule_conflicts, parse_rule_file, LexicalString, Phonology, SymbolPair};
use morfwork::workbench::bundled;
use proptest::prelude::*;

fn shipped() -> &'static Phonology {
    static PH: OnceLock<Phonology> = OnceLock::new();
    PH.get_or_init(|| Phonology::from_rule_text(bundled::RULES).unwrap())
}

fn lex(text: &str, flags: &[&str]) -> LexicalString {
    LexicalString::parse(text).unwrap().with_flags(flags.iter().copied())
}

fn surfaces(ph: &Phonology, text: &str, flags: &[&str]) -> Vec<String> {
    ph.generate(&lex(text, flags)).into_iter().collect()
}

#[test]
fn generates_frozen_examples() {
    let ph = shipped();
    let soft = ["final-stop-softens"];
    for (text, flags, want) in [
        ("masa+Hm", &[][..], "masam"),
        ("ev+HmHz+yA", &[], "evimize"),
        ("ayak+nHn", &soft, "ayağın"),
        ("kes+Hl+yAmA+DH", &[], "kesilemedi"),
        ("ev", &[], "ev"),
        ("ev+nHn", &[], "evin"),
        ("ev+Hn", &[], "evin"),
        ("ev+lAr", &[], "evler"),
        ("masa+lAr", &[], "masalar"),
        ("kapı+sH", &[], "kapısı"),
        ("ev+sH", &[], "evi"),
        ("okul+DA", &[], "okulda"),
        ("göz+Hm", &[], "gözüm"),
        ("yol+Hm", &[], "yolum"),
        ("çocuk+yA", &soft, "çocuğa"),
    ] {
        assert_eq!(surfaces(&ph, text, flags), [want], "{text}");
    }
}

#[test]
fn softening_needs_the_flag() {
    let ph = shipped();
    assert_eq!(surfaces(&ph, "ayak+nHn", &[]), ["ayakın"]);
}

#[test]
fn rejects_wrong_surfaces() {
    let ph = shipped();
    let masa = lex("masa+Hm", &[]);
    assert!(ph.recognize("masam", &masa));
    assert!(!ph.recognize("masaım", &masa));
    assert!(!ph.recognize("masım", &masa));
    let ev = lex("ev+HmHz+yA", &[]);
    assert!(!ph.recognize("evımıza", &ev));
    assert!(!ph.recognize("evimizye", &ev));
}

#[test]
fn shipped_rule_file_shape() {
    let set = parse_rule_file(bundled::RULES).unwrap();
    assert_eq!(set.rules.len(), 12);
    let classes: BTreeSet<&str> = set.alphabet.classes().keys().map(String::as_str).collect();
    for c in ["Vowel", "Cons", "BackVowel", "FrontVowel", "RoundVowel"] {
        assert!(classes.contains(c), "{c}");
    }
    assert!(set.alphabet.is_meta('H') && set.alphabet.is_meta('A') && set.alphabet.is_meta('D'));
    assert_eq!(
        set.alphabet.gate(SymbolPair::new('k', 'ğ').unwrap()),
        Some("final-stop-softens")
    );
    assert!(check_rule_conflicts(&set.alphabet, &set.rules).is_empty());
}

#[test]
fn conflict_checker_reports_clashing_rules() {
    let text = "ALPHABET\nSYMBOLS a e\nVowel = a e\nA = a e\nEND\n\
                X1: A:a <=> :a _ ;\nX2: A:e <=> :Vowel _ ;\n";
    let set = parse_rule_file(text).unwrap();
    let found = check_rule_conflicts(&set.alphabet, &set.rules);
    assert_eq!(found.len(), 1);
    assert_eq!((found[0].first.as_str(), found[0].second.as_str()), ("X1", "X2"));
}

#[test]
fn malformed_rule_files() {
    assert!(parse_rule_file("R: a:b <=> _ ;").is_err());
    let undeclared = "ALPHABET\nSYMBOLS a\nEND\nR: a:a => :Q _ ;\n";
    assert!(parse_rule_file(undeclared).is_err());
    let infeasible = "ALPHABET\nSYMBOLS a b\nEND\nR: a:b => _ ;\n";
    assert!(parse_rule_file(infeasible).is_err());
    let dup = "ALPHABET\nSYMBOLS a\nPAIRS a:0\nEND\nR: a:0 => _ ;\nR: a:0 => _ ;\n";
    assert!(parse_rule_file(dup).is_err());
}

/// Every lexical string the shipped paradigms build over the shipped
/// lexicon with up to three suffixes.
fn lexical_corpus() -> &'static [LexicalString] {
    static ALL: OnceLock<Vec<LexicalString>> = OnceLock::new();
    ALL.get_or_init(build_lexical_corpus)
}

fn build_lexical_corpus() -> Vec<LexicalString> {
    let m = load_paradigms(bundled::PARADIGMS).unwrap();
    let l = load_lexicon(bundled::LEXICON).unwrap();
    let mut out = Vec::new();
    for e in l.entries() {
        for p in m.enumerate_lexical_forms(e, 3) {
            out.push(p.lexical);
        }
    }
    out
}

fn vowel_class(c: char) -> Option<(bool, bool)> {
    // (back, round)
    match c {
        'a' => Some((true, false)),
        'ı' => Some((true, false)),
        'o' | 'u' => Some((true, true)),
        'e' | 'i' => Some((false, false)),
        'ö' | 'ü' => Some((false, true)),
        _ => None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn generated_surfaces_round_trip(i in any::<prop::sample::Index>()) {
        let ph = shipped();
        let all = lexical_corpus();
        let l = &all[i.index(all.len())];
        let out = ph.generate(l);
        prop_assert!(out.len() <= 1, "{:?} -> {:?}", l.symbols(), out);
        for s in &out {
            prop_assert!(ph.recognize(s, l));
            prop_assert!(!s.contains(['0', '+', 'H', 'A', 'D']));
        }
    }

    #[test]
    fn harmony_follows_last_surface_vowel(i in any::<prop::sample::Index>()) {
        let ph = shipped();
        let all = lexical_corpus();
        let l = &all[i.index(all.len())];
        for pairs in ph.alignments(l) {
            let mut last = None;
            for p in pairs {
                if let Some(v) = vowel_class(p.surface) {
                    match p.lexical {
                        'H' => {
                            let (back, round) = last.expect("harmony needs a vowel to its left");
                            prop_assert_eq!(v, (back, round));
                        }
                        'A' => {
                            let (back, _) = last.expect("harmony needs a vowel to its left");
                            prop_assert_eq!(v, (back, false));
                        }
                        _ => {}
                    }
                    last = Some(v);
                }
            }
        }
    }

    #[test]
    fn nulls_stay_off_the_surface(i in any::<prop::sample::Index>()) {
        let ph = shipped();
        let all = lexical_corpus();
        let l = &all[i.index(all.len())];
        for pairs in ph.alignments(l) {
            let lexical: String = pairs.iter().map(|p| p.lexical).filter(|&c| c != '0').collect();
            prop_assert_eq!(lexical, l.symbols().iter().collect::<String>());
            for p in &pairs {
                prop_assert!(p.lexical != '0' || p.surface != '0');
                prop_assert!(p.lexical != '+' || p.surface == '0');
            }
        }
    }

    #[test]
    fn generation_is_deterministic(i in any::<prop::sample::Index>()) {
        let all = lexical_corpus();
        let l = &all[i.index(all.len())];
        prop_assert_eq!(shipped().generate(l), shipped().generate(l));
    }
}

//! Word analysis and generation over lexicon, morphotactics and phonology.

use std::cmp::Ordering;

use crate::error::AnalysisError;
use crate::features::FeatureBundle;
use crate::lexicon::{Lexicon, RootEntry};
use crate::morphotactics::{Morpheme, Morphotactics, PathState};
use crate::phonology::{LexicalString, Phonology, SurfaceAligner, BOUNDARY};
use crate::text::turkish_lowercase;

/// One reading of a surface word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Parse {
    pub root: RootEntry,
    pub morphemes: Vec<Morpheme>,
    pub lexical: LexicalString,
    pub features: FeatureBundle,
    /// Lexical spelling without zero morphemes, e.g. `kes+Hl+yAmA+DH`.
    pub gloss: String,
}

impl Parse {
    pub fn morpheme_names(&self) -> Vec<&str> {
        self.morphemes.iter().map(|m| m.name.as_str()).collect()
    }

    /// Tagged reading such as `N(ev)+GEN` or `V(kes)+PASS+NEG-CAP+PAST+3SG`.
    pub fn tag_gloss(&self) -> String {
        let mut out = format!("{}({})", self.root.category.tag(), self.root.root);
        for m in &self.morphemes {
            out.push('+');
            out.push_str(&m.name);
        }
        out
    }

    fn order(&self, other: &Parse) -> Ordering {
        other
            .root
            .len_chars()
            .cmp(&self.root.len_chars())
            .then_with(|| self.morphemes.len().cmp(&other.morphemes.len()))
            .then_with(|| self.gloss.cmp(&other.gloss))
            .then_with(|| self.root.category.cmp(&other.root.category))
            .then_with(|| self.morpheme_names().cmp(&other.morpheme_names()))
    }
}

pub struct Analyzer {
    phonology: Phonology,
    morphotactics: Morphotactics,
    lexicon: Lexicon,
}

impl Analyzer {
    pub fn new(phonology: Phonology, morphotactics: Morphotactics, lexicon: Lexicon) -> Self {
        Analyzer {
            phonology,
            morphotactics,
            lexicon,
        }
    }

    pub fn phonology(&self) -> &Phonology {
        &self.phonology
    }

    pub fn morphotactics(&self) -> &Morphotactics {
        &self.morphotactics
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    /// Root letters and morpheme symbols that the rule alphabet cannot spell.
    pub fn spelling_problems(&self) -> Vec<String> {
        let alphabet = self.phonology.alphabet();
        let mut problems = Vec::new();
        for e in self.lexicon.entries() {
            if let Some(c) = e.root.chars().find(|&c| !alphabet.symbols().contains(&c)) {
                problems.push(format!("root `{}` uses `{c}`, which is not in the alphabet", e.root));
            }
        }
        for m in self.morphotactics.morphemes() {
            let body = m.lexical_form.trim_start_matches(BOUNDARY);
            if let Some(c) = body
                .chars()
                .find(|&c| !alphabet.symbols().contains(&c) && !alphabet.is_meta(c))
            {
                problems.push(format!("morpheme `{}` uses `{c}`, which is not in the alphabet", m.name));
            }
        }
        problems
    }

    /// Every parse of `word`, in a fixed order: longer roots first, then fewer
    /// morphemes, then by gloss.
    pub fn analyze(&self, word: &str) -> Result<Vec<Parse>, AnalysisError> {
        let word = turkish_lowercase(word.trim());
        if word.is_empty() {
            return Err(AnalysisError::EmptyInput);
        }
        let mut parses = Vec::new();
        for root in self.lexicon.candidate_roots(&word) {
            let chars: Vec<char> = root.root.chars().collect();
            let aligner = self.phonology.aligner(&word).extend_root(&chars, &root.flag_names());
            if aligner.is_dead() {
                continue;
            }
            let mut path = Vec::new();
            self.search(root, self.morphotactics.start(root.category), &aligner, &mut path, &mut parses);
        }
        if parses.is_empty() {
            return Err(AnalysisError::UnknownWord(word));
        }
        parses.sort_by(Parse::order);
        Ok(parses)
    }

    fn search<'a>(
        &'a self,
        root: &RootEntry,
        state: PathState,
        aligner: &SurfaceAligner<'_>,
        path: &mut Vec<&'a Morpheme>,
        out: &mut Vec<Parse>,
    ) {
        if self.morphotactics.is_accepting(state) && aligner.accepts() {
            if let Ok(parse) = self.build_parse(root, path) {
                out.push(parse);
            }
        }
        for (m, next) in self.morphotactics.successors(state) {
            path.push(m);
            if m.is_zero() {
                self.search(root, next, aligner, path, out);
            } else {
                let symbols: Vec<char> = m.lexical_form.chars().collect();
                let extended = aligner.extend_suffixes(&symbols);
                if !extended.is_dead() {
                    self.search(root, next, &extended, path, out);
                }
            }
            path.pop();
        }
    }

    fn build_parse(&self, root: &RootEntry, morphemes: &[&Morpheme]) -> Result<Parse, AnalysisError> {
        let lexical = self.lexical_string(root, morphemes)?;
        let features = self
            .morphotactics
            .bundle(root, morphemes)
            .expect("automaton paths never assign a dimension twice");
        let mut gloss = root.root.clone();
        for m in morphemes {
            gloss.push_str(&m.lexical_form);
        }
        Ok(Parse {
            root: root.clone(),
            morphemes: morphemes.iter().map(|&m| m.clone()).collect(),
            lexical,
            features,
            gloss,
        })
    }

    pub fn lexical_string(&self, root: &RootEntry, morphemes: &[&Morpheme]) -> Result<LexicalString, AnalysisError> {
        let mut lex = LexicalString::root(&root.root)?.with_flags(root.flag_names());
        for m in morphemes {
            lex.push_suffix(&m.name, &m.lexical_form)?;
        }
        Ok(lex)
    }

    /// The unique surface form of `root` followed by the named morphemes.
    pub fn generate_word(&self, root: &RootEntry, names: &[&str]) -> Result<String, AnalysisError> {
        if let Some(unknown) = names.iter().find(|n| self.morphotactics.morpheme(n).is_none()) {
            return Err(AnalysisError::UnknownMorpheme(unknown.to_string()));
        }
        let path = self
            .morphotactics
            .accept(root.category, names)
            .ok_or_else(|| AnalysisError::IllegalMorphotactics {
                root: root.to_string(),
                morphemes: names.iter().map(|n| n.to_string()).collect(),
            })?;
        let lex = self.lexical_string(root, &path)?;
        let surfaces: Vec<String> = self.phonology.generate(&lex).into_iter().collect();
        match surfaces.len() {
            0 => Err(AnalysisError::NoRealization(lex.to_string())),
            1 => Ok(surfaces.into_iter().next().unwrap()),
            _ => Err(AnalysisError::AmbiguousRealization {
                lexical: lex.to_string(),
                surfaces,
            }),
        }
    }

    /// Like [`generate_word`](Self::generate_word) but looks the root up by
    /// spelling, trying each category it is listed under.
    pub fn generate_from_root(&self, root: &str, names: &[&str]) -> Result<String, AnalysisError> {
        let entries: Vec<&RootEntry> = self.lexicon.lookup(root).collect();
        if entries.is_empty() {
            return Err(AnalysisError::UnknownWord(root.to_string()));
        }
        let mut first_err = None;
        for e in entries {
            match self.generate_word(e, names) {
                Ok(s) => return Ok(s),
                Err(err) => {
                    first_err.get_or_insert(err);
                }
            }
        }
        Err(first_err.expect("at least one entry was tried"))
    }

    /// Number of parses; 0 for unknown or empty words.
    pub fn ambiguity_degree(&self, word: &str) -> usize {
        self.analyze(word).map_or(0, |p| p.len())
    }
}

//! Loaded resources and the corpus tagging driver.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::analyzer::{Analyzer, Parse};
use crate::corpus::{read_sentences, Sentence, TaggedCorpus};
use crate::disambiguator::{load_constraints, load_stats, tag_sentence, Chooser, Constraint, RootStats, TagReport, TokenAnalysis};
use crate::error::{ResourceError, TagError};
use crate::features::FeatureVocabulary;
use crate::lexicon::load_lexicon;
use crate::morphotactics::load_paradigms;
use crate::phonology::Phonology;
use crate::search::{load_implications, Implications};
use crate::text::turkish_lowercase;

/// The data files shipped with the crate.
pub mod bundled {
    pub const RULES: &str = include_str!("../data/turkish.rules");
    pub const PARADIGMS: &str = include_str!("../data/paradigms.txt");
    pub const LEXICON: &str = include_str!("../data/lexicon.tsv");
    pub const CONSTRAINTS: &str = include_str!("../data/constraints.txt");
    pub const STATS: &str = include_str!("../data/stats.tsv");
    pub const IMPLICATIONS: &str = include_str!("../data/implications.txt");
    pub const CORPUS: &str = include_str!("../data/corpus.txt");
    pub const GOLD: &str = include_str!("../data/gold.tagged");
}

/// Resource texts; `None` falls back to the bundled file.
#[derive(Clone, Debug, Default)]
pub struct ResourcePaths {
    pub rules: Option<PathBuf>,
    pub paradigms: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub constraints: Option<PathBuf>,
    pub stats: Option<PathBuf>,
    pub implications: Option<PathBuf>,
}

fn read(path: &Option<PathBuf>, fallback: &'static str) -> Result<String, ResourceError> {
    match path {
        None => Ok(fallback.to_string()),
        Some(p) => std::fs::read_to_string(p).map_err(|source| ResourceError::Io {
            path: p.clone(),
            source,
        }),
    }
}

pub struct Workbench {
    pub analyzer: Analyzer,
    pub constraints: Vec<Constraint>,
    pub stats: RootStats,
    pub implications: Implications,
    pub vocabulary: FeatureVocabulary,
}

/// Result of tagging a corpus.
pub struct TagRun {
    pub corpus: TaggedCorpus,
    pub analyses: Vec<Vec<TokenAnalysis>>,
    pub report: TagReport,
}

impl Workbench {
    pub fn bundled() -> Result<Self, ResourceError> {
        Self::load(&ResourcePaths::default())
    }

    pub fn load(paths: &ResourcePaths) -> Result<Self, ResourceError> {
        let phonology = Phonology::from_rule_text(&read(&paths.rules, bundled::RULES)?)?;
        let morphotactics = load_paradigms(&read(&paths.paradigms, bundled::PARADIGMS)?)?;
        let lexicon = load_lexicon(&read(&paths.lexicon, bundled::LEXICON)?)?;
        let analyzer = Analyzer::new(phonology, morphotactics, lexicon);
        let problems = analyzer.spelling_problems();
        if !problems.is_empty() {
            return Err(ResourceError::Spelling(problems.join("; ")));
        }
        let vocabulary = analyzer.morphotactics().vocabulary();
        Ok(Workbench {
            analyzer,
            constraints: load_constraints(&read(&paths.constraints, bundled::CONSTRAINTS)?)?,
            stats: load_stats(&read(&paths.stats, bundled::STATS)?)?,
            implications: load_implications(&read(&paths.implications, bundled::IMPLICATIONS)?)?,
            vocabulary,
        })
    }

    fn candidates(&self, sentence: &Sentence, cache: &HashMap<String, Vec<Parse>>) -> Vec<Vec<Parse>> {
        sentence
            .tokens
            .iter()
            .map(|t| {
                if t.is_punctuation() {
                    return Vec::new();
                }
                let key = turkish_lowercase(&t.text);
                match cache.get(&key) {
                    Some(p) => p.clone(),
                    None => self.analyzer.analyze(&key).unwrap_or_default(),
                }
            })
            .collect()
    }

    /// Tags one sentence without an interactive fallback.
    pub fn tag_tokens(&self, tokens: &[&str]) -> Vec<TokenAnalysis> {
        let sentence = Sentence::new(0, tokens.join(" "));
        let cands = self.candidates(&sentence, &HashMap::new());
        let texts: Vec<String> = sentence.tokens.iter().map(|t| t.text.clone()).collect();
        tag_sentence(&texts, cands, &self.constraints, &self.stats, None).expect("no chooser, no choice errors")
    }

    /// Tags a corpus (one sentence per non-empty line). With a chooser,
    /// sentences run in order and every ambiguity left over is asked about;
    /// without one they run in parallel. `strict` turns leftover ambiguity
    /// into an error.
    pub fn tag_corpus(
        &self,
        text: &str,
        chooser: Option<&mut Chooser<'_>>,
        strict: bool,
    ) -> Result<TagRun, TagError> {
        let sentences = read_sentences(text);
        let words: HashSet<String> = sentences
            .iter()
            .flat_map(|s| s.tokens.iter())
            .filter(|t| !t.is_punctuation())
            .map(|t| turkish_lowercase(&t.text))
            .collect();
        let cache: HashMap<String, Vec<Parse>> = words
            .into_par_iter()
            .map(|w| {
                let parses = self.analyzer.analyze(&w).unwrap_or_default();
                (w, parses)
            })
            .collect();
        let texts = |s: &Sentence| -> Vec<String> { s.tokens.iter().map(|t| t.text.clone()).collect() };

        let analyses: Vec<Vec<TokenAnalysis>> = match chooser {
            Some(choose) => {
                let mut out = Vec::with_capacity(sentences.len());
                for s in &sentences {
                    let cands = self.candidates(s, &cache);
                    out.push(tag_sentence(&texts(s), cands, &self.constraints, &self.stats, Some(&mut *choose))?);
                }
                out
            }
            None => sentences
                .par_iter()
                .map(|s| {
                    let cands = self.candidates(s, &cache);
                    tag_sentence(&texts(s), cands, &self.constraints, &self.stats, None)
                })
                .collect::<Result<_, _>>()?,
        };

        let mut report = TagReport {
            sentences: sentences.len(),
            ..TagReport::default()
        };
        let mut unresolved = Vec::new();
        let mut corpus = TaggedCorpus::default();
        for (s, row) in sentences.into_iter().zip(&analyses) {
            for (tok, a) in s.tokens.iter().zip(row) {
                report.add(a, tok.is_punctuation());
                if a.resolved_by == Some(crate::disambiguator::ResolvedBy::Unresolved) {
                    unresolved.push(format!("{}:{} {}", s.id, tok.start, tok.text));
                }
            }
            let chosen = row.iter().map(|a| a.chosen_parse().map(|p| p.features.clone())).collect();
            corpus.push(s, chosen);
        }
        if strict && !unresolved.is_empty() {
            return Err(TagError::Unresolved(unresolved));
        }
        Ok(TagRun {
            corpus,
            analyses,
            report,
        })
    }

    pub fn tag_corpus_file(&self, path: &Path, chooser: Option<&mut Chooser<'_>>, strict: bool) -> Result<TagRun, TagError> {
        let text = std::fs::read_to_string(path)?;
        self.tag_corpus(&text, chooser, strict)
    }
}

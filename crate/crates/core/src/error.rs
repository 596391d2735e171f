use std::path::PathBuf;

use thiserror::Error;

use crate::features::Dimension;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeatureError {
    #[error("unknown feature dimension `{0}`")]
    UnknownDimension(String),
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("category is fixed by the root and cannot come from a morpheme")]
    CategoryFromMorpheme,
    #[error("{dimension} assigned twice (`{first}`, then `{second}`)")]
    Reassigned {
        dimension: Dimension,
        first: String,
        second: String,
    },
}

/// Errors from the two-level rule DSL.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleFileError {
    #[error("no alphabet declared")]
    NoAlphabet,
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: undeclared symbol or class `{name}`")]
    Undeclared {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("{line}: duplicate rule name `{name}`")]
    DuplicateRule { line: usize, name: String },
    #[error("{line}: rule `{rule}` uses pair {pair} which is not feasible")]
    InfeasiblePair {
        line: usize,
        rule: String,
        pair: String,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexicalError {
    #[error("root `{0}` is empty or contains a reserved symbol")]
    BadRoot(String),
    #[error("morpheme `{name}` has lexical form `{form}` that does not start with '+'")]
    BadForm { name: String, form: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParadigmError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown slot `{slot}`")]
    UnknownSlot { line: usize, slot: String },
    #[error("line {line}: morpheme `{name}` declared twice")]
    DuplicateMorpheme { line: usize, name: String },
    #[error("line {line}: morpheme `{name}` sets {dimension}, which slot `{slot}` does not own")]
    NotOwned {
        line: usize,
        name: String,
        slot: String,
        dimension: Dimension,
    },
    #[error("line {line}: slot `{slot}` appears twice in paradigm `{paradigm}`; paradigms must be acyclic")]
    Cycle {
        line: usize,
        paradigm: String,
        slot: String,
    },
    #[error("line {line}: {source}")]
    Feature { line: usize, source: FeatureError },
    #[error("paradigm `{0}` is not declared")]
    MissingParadigm(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate entry {root}/{category}")]
    Duplicate {
        line: usize,
        root: String,
        category: String,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("empty input")]
    EmptyInput,
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("unknown morpheme `{0}`")]
    UnknownMorpheme(String),
    #[error("morpheme sequence {morphemes:?} is not allowed after {root}")]
    IllegalMorphotactics { root: String, morphemes: Vec<String> },
    #[error("no surface realization for `{0}`")]
    NoRealization(String),
    #[error("`{lexical}` has several surface realizations: {surfaces:?}")]
    AmbiguousRealization {
        lexical: String,
        surfaces: Vec<String>,
    },
    #[error(transparent)]
    Lexical(#[from] LexicalError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstraintError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: priority {priority} already used by `{other}`")]
    DuplicatePriority {
        line: usize,
        priority: i64,
        other: String,
    },
}

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Error)]
pub enum TagError {
    #[error("reading corpus: {0}")]
    Io(#[from] std::io::Error),
    #[error("{} unresolved token(s): {}", .0.len(), .0.join(", "))]
    Unresolved(Vec<String>),
    #[error("interactive choice {choice} out of range for `{token}` ({candidates} candidates)")]
    BadChoice {
        token: String,
        choice: usize,
        candidates: usize,
    },
}

/// Errors reading or writing tagged-corpus and index files.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported {kind} file version `{found}` (expected v1)")]
    VersionMismatch { kind: &'static str, found: String },
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
    #[error("checksum mismatch: header says {expected}, content hashes to {actual}")]
    Checksum { expected: String, actual: String },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("empty query: set at least one feature")]
    EmptyQuery,
    #[error("unknown query field `{0}`")]
    UnknownField(String),
    #[error("`{value}` is not a known value for {field}")]
    UnknownFeatureValue { field: String, value: String },
    #[error("sentence {sentence}, token {token} out of range")]
    OutOfRange { sentence: usize, token: usize },
    #[error("token `{0}` has no analysis")]
    NoAnalysis(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImplicationError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// Any failure while loading the workbench resources.
#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("rule file: {0}")]
    Rules(#[from] RuleFileError),
    #[error("paradigm file: {0}")]
    Paradigms(#[from] ParadigmError),
    #[error("lexicon: {0}")]
    Lexicon(#[from] LexiconError),
    #[error("constraints: {0}")]
    Constraints(#[from] ConstraintError),
    #[error("stats: {0}")]
    Stats(#[from] StatsError),
    #[error("implications: {0}")]
    Implications(#[from] ImplicationError),
    #[error("resources disagree with the rule alphabet: {0}")]
    Spelling(String),
}

//! Two-level phonology: a data-driven rule engine relating lexical strings
//! (roots plus suffixes written with meta-phonemes) to surface words.
//!
//! Rules are read from a small DSL (see [`parse_rule_file`]), each rule's
//! contexts are compiled to deterministic automata over feasible symbol pairs,
//! and all rules constrain an alignment in parallel: a surface form is
//! admitted only if every rule accepts the whole pair sequence.

mod automaton;
mod conflicts;
mod dsl;
mod engine;
mod lexical;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

pub use conflicts::{check_rule_conflicts, ConflictDiagnostic};
pub use dsl::parse_rule_file;
pub use engine::{Phonology, SurfaceAligner};
pub use lexical::{LexicalString, MorphemeSpan};

/// The null segment.
pub const NULL: char = '0';
/// Morpheme boundary on the lexical side.
pub const BOUNDARY: char = '+';

/// One lexical:surface correspondence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolPair {
    pub lexical: char,
    pub surface: char,
}

impl SymbolPair {
    /// Returns `None` for `0:0` and for a boundary that does not surface as null.
    pub fn new(lexical: char, surface: char) -> Option<Self> {
        if lexical == NULL && surface == NULL {
            return None;
        }
        if lexical == BOUNDARY && surface != NULL {
            return None;
        }
        Some(SymbolPair { lexical, surface })
    }
}

impl fmt::Display for SymbolPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lexical, self.surface)
    }
}

/// Symbols, named classes, meta-phonemes and the feasible pairs built from them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: BTreeSet<char>,
    classes: BTreeMap<String, BTreeSet<char>>,
    meta: BTreeMap<char, Vec<char>>,
    pairs: Vec<SymbolPair>,
    pair_index: HashMap<SymbolPair, usize>,
    gates: BTreeMap<usize, String>,
}

impl Alphabet {
    pub(crate) fn new(
        symbols: BTreeSet<char>,
        classes: BTreeMap<String, BTreeSet<char>>,
        meta: BTreeMap<char, Vec<char>>,
        extra_pairs: Vec<SymbolPair>,
        gates: Vec<(String, SymbolPair)>,
    ) -> Self {
        let mut pairs: Vec<SymbolPair> = Vec::new();
        let push = |p: SymbolPair, pairs: &mut Vec<SymbolPair>| {
            if !pairs.contains(&p) {
                pairs.push(p);
            }
        };
        for &s in &symbols {
            push(SymbolPair { lexical: s, surface: s }, &mut pairs);
        }
        for (&m, realizations) in &meta {
            for &r in realizations {
                push(SymbolPair { lexical: m, surface: r }, &mut pairs);
            }
        }
        for p in extra_pairs {
            push(p, &mut pairs);
        }
        for (_, p) in &gates {
            push(*p, &mut pairs);
        }
        let pair_index = pairs.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let mut alphabet = Alphabet {
            symbols,
            classes,
            meta,
            pairs,
            pair_index,
            gates: BTreeMap::new(),
        };
        for (flag, p) in gates {
            let idx = alphabet.pair_index[&p];
            alphabet.gates.insert(idx, flag);
        }
        alphabet
    }

    pub fn symbols(&self) -> &BTreeSet<char> {
        &self.symbols
    }

    pub fn classes(&self) -> &BTreeMap<String, BTreeSet<char>> {
        &self.classes
    }

    pub fn class(&self, name: &str) -> Option<&BTreeSet<char>> {
        self.classes.get(name)
    }

    pub fn meta_phonemes(&self) -> &BTreeMap<char, Vec<char>> {
        &self.meta
    }

    pub fn is_meta(&self, c: char) -> bool {
        self.meta.contains_key(&c)
    }

    pub fn feasible_pairs(&self) -> &[SymbolPair] {
        &self.pairs
    }

    pub fn is_feasible(&self, pair: SymbolPair) -> bool {
        self.pair_index.contains_key(&pair)
    }

    pub(crate) fn pair_id(&self, pair: SymbolPair) -> Option<usize> {
        self.pair_index.get(&pair).copied()
    }

    /// Root flag that must be present for this pair to be usable, if any.
    pub fn gate(&self, pair: SymbolPair) -> Option<&str> {
        self.pair_id(pair)
            .and_then(|i| self.gates.get(&i))
            .map(String::as_str)
    }

    pub(crate) fn gate_of(&self, pair_id: usize) -> Option<&str> {
        self.gates.get(&pair_id).map(String::as_str)
    }

    /// Any symbol that may appear on the lexical side.
    pub fn is_lexical_symbol(&self, c: char) -> bool {
        self.pairs.iter().any(|p| p.lexical == c)
    }

    pub fn is_surface_symbol(&self, c: char) -> bool {
        c == NULL || self.pairs.iter().any(|p| p.surface == c)
    }
}

/// One side of a pair atom in a rule context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SideSpec {
    Any,
    Symbol(char),
    Class(String),
}

impl SideSpec {
    pub(crate) fn matches(&self, alphabet: &Alphabet, c: char) -> bool {
        match self {
            SideSpec::Any => true,
            SideSpec::Symbol(s) => *s == c,
            SideSpec::Class(name) => alphabet.class(name).is_some_and(|set| set.contains(&c)),
        }
    }
}

impl fmt::Display for SideSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SideSpec::Any => Ok(()),
            SideSpec::Symbol(c) => write!(f, "{c}"),
            SideSpec::Class(n) => f.write_str(n),
        }
    }
}

/// A regular pattern over symbol pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    Empty,
    /// Word edge, written `.#.`.
    Edge,
    Atom { lexical: SideSpec, surface: SideSpec },
    Seq(Vec<Pattern>),
    Alt(Vec<Pattern>),
    Star(Box<Pattern>),
    Optional(Box<Pattern>),
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Empty => Ok(()),
            Pattern::Edge => f.write_str(".#."),
            Pattern::Atom { lexical, surface } => match surface {
                SideSpec::Any => write!(f, "{lexical}"),
                _ => write!(f, "{lexical}:{surface}"),
            },
            Pattern::Seq(items) => {
                for (i, p) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            Pattern::Alt(items) => {
                f.write_str("(")?;
                for (i, p) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
            Pattern::Star(p) => write!(f, "{}*", Grouped(p)),
            Pattern::Optional(p) => write!(f, "{}?", Grouped(p)),
        }
    }
}

struct Grouped<'a>(&'a Pattern);

impl fmt::Display for Grouped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Pattern::Seq(items) if items.len() > 1 => write!(f, "({})", self.0),
            p => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleOperator {
    /// `=>`: the pair may only occur in the context.
    ContextRestriction,
    /// `<=`: in the context, the lexical symbol must surface as the pair's surface.
    SurfaceCoercion,
    /// `<=>`: both of the above.
    Composite,
    /// `/<=`: the pair may not occur in the context.
    Exclusion,
}

impl RuleOperator {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleOperator::ContextRestriction => "=>",
            RuleOperator::SurfaceCoercion => "<=",
            RuleOperator::Composite => "<=>",
            RuleOperator::Exclusion => "/<=",
        }
    }

    pub(crate) fn restricts(self) -> bool {
        matches!(self, RuleOperator::ContextRestriction | RuleOperator::Composite)
    }

    pub(crate) fn coerces(self) -> bool {
        matches!(self, RuleOperator::SurfaceCoercion | RuleOperator::Composite)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoLevelRule {
    pub name: String,
    pub pair: SymbolPair,
    pub operator: RuleOperator,
    pub left: Pattern,
    pub right: Pattern,
}

impl fmt::Display for TwoLevelRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} {} ", self.name, self.pair, self.operator.as_str())?;
        if self.left != Pattern::Empty {
            write!(f, "{} ", self.left)?;
        }
        f.write_str("_")?;
        if self.right != Pattern::Empty {
            write!(f, " {}", self.right)?;
        }
        f.write_str(" ;")
    }
}

/// Parsed contents of a rule file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSet {
    pub alphabet: Alphabet,
    pub rules: Vec<TwoLevelRule>,
}

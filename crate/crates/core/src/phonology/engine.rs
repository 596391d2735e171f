use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use crate::error::RuleFileError;

use super::automaton::Dfa;
use super::{parse_rule_file, Alphabet, LexicalString, RuleOperator, RuleSet, SymbolPair, TwoLevelRule, NULL};

struct CompiledRule {
    pair: usize,
    lexical: char,
    operator: RuleOperator,
    left: Dfa,
    right: Dfa,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct RuleState {
    left: u32,
    /// Right contexts that must still complete (`=>` occurrences).
    required: Vec<u32>,
    /// Right contexts that must never complete (`<=` / `/<=` triggers).
    forbidden: Vec<u32>,
}

/// Joint state of every rule after a prefix of an alignment.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Cursor {
    rules: Vec<RuleState>,
}

/// Where a lexical symbol sits; decides which gated pairs are usable.
#[derive(Clone, Copy)]
enum Position<'a> {
    Root(&'a BTreeSet<String>),
    Suffix,
}

/// Compiled rule set. Immutable and `Sync`; every operation is pure.
pub struct Phonology {
    rule_set: RuleSet,
    compiled: Vec<CompiledRule>,
    by_lexical: HashMap<char, Vec<usize>>,
    edge: usize,
}

impl Phonology {
    pub fn new(rule_set: RuleSet) -> Self {
        let alphabet = &rule_set.alphabet;
        let compiled = rule_set
            .rules
            .iter()
            .map(|r| CompiledRule {
                pair: alphabet.pair_id(r.pair).expect("rule pairs are feasible"),
                lexical: r.pair.lexical,
                operator: r.operator,
                left: Dfa::suffix(&r.left, alphabet),
                right: Dfa::anchored(&r.right, alphabet),
            })
            .collect();
        let mut by_lexical: HashMap<char, Vec<usize>> = HashMap::new();
        for (i, p) in alphabet.feasible_pairs().iter().enumerate() {
            by_lexical.entry(p.lexical).or_default().push(i);
        }
        let edge = alphabet.feasible_pairs().len();
        Phonology {
            rule_set,
            compiled,
            by_lexical,
            edge,
        }
    }

    pub fn from_rule_text(text: &str) -> Result<Self, RuleFileError> {
        parse_rule_file(text).map(Phonology::new)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.rule_set.alphabet
    }

    pub fn rules(&self) -> &[TwoLevelRule] {
        &self.rule_set.rules
    }

    pub fn rule_set(&self) -> &RuleSet {
        &self.rule_set
    }

    fn pair(&self, id: usize) -> SymbolPair {
        self.alphabet().feasible_pairs()[id]
    }

    fn usable(&self, pair: usize, at: Position<'_>) -> bool {
        match self.alphabet().gate_of(pair) {
            None => true,
            Some(flag) => matches!(at, Position::Root(flags) if flags.contains(flag)),
        }
    }

    fn candidates<'s>(&'s self, lexical: char, at: Position<'s>) -> impl Iterator<Item = usize> + 's {
        self.by_lexical
            .get(&lexical)
            .into_iter()
            .flatten()
            .copied()
            .filter(move |&p| self.usable(p, at))
    }

    pub(crate) fn start(&self) -> Cursor {
        let fresh = Cursor {
            rules: self
                .compiled
                .iter()
                .map(|_| RuleState {
                    left: Dfa::START,
                    required: Vec::new(),
                    forbidden: Vec::new(),
                })
                .collect(),
        };
        self.step(&fresh, self.edge, Position::Suffix)
            .expect("the word edge alone violates no rule")
    }

    /// Advances every rule over one pair (or the edge). `None` on violation.
    fn step(&self, cursor: &Cursor, symbol: usize, at: Position<'_>) -> Option<Cursor> {
        let mut rules = Vec::with_capacity(cursor.rules.len());
        for (rule, st) in self.compiled.iter().zip(&cursor.rules) {
            let right = &rule.right;
            let mut required = Vec::with_capacity(st.required.len() + 1);
            for &s in &st.required {
                let n = right.step(s, symbol);
                if right.is_accepting(n) {
                    continue;
                }
                if right.is_dead(n) {
                    return None;
                }
                required.push(n);
            }
            let mut forbidden = Vec::with_capacity(st.forbidden.len() + 1);
            for &s in &st.forbidden {
                let n = right.step(s, symbol);
                if right.is_accepting(n) {
                    return None;
                }
                if !right.is_dead(n) {
                    forbidden.push(n);
                }
            }

            if symbol != self.edge {
                let left_ok = rule.left.is_accepting(st.left);
                let here = self.pair(symbol);
                if rule.operator.restricts() && symbol == rule.pair {
                    if !left_ok {
                        return None;
                    }
                    if !right.is_accepting(Dfa::START) {
                        if right.is_dead(Dfa::START) {
                            return None;
                        }
                        required.push(Dfa::START);
                    }
                }
                let triggered = match rule.operator {
                    RuleOperator::Exclusion => symbol == rule.pair,
                    op if op.coerces() => {
                        here.lexical == rule.lexical && symbol != rule.pair && self.usable(rule.pair, at)
                    }
                    _ => false,
                };
                if triggered && left_ok {
                    if right.is_accepting(Dfa::START) {
                        return None;
                    }
                    if !right.is_dead(Dfa::START) {
                        forbidden.push(Dfa::START);
                    }
                }
            }

            required.sort_unstable();
            required.dedup();
            forbidden.sort_unstable();
            forbidden.dedup();
            rules.push(RuleState {
                left: rule.left.step(st.left, symbol),
                required,
                forbidden,
            });
        }
        Some(Cursor { rules })
    }

    pub(crate) fn finish(&self, cursor: &Cursor) -> bool {
        self.step(cursor, self.edge, Position::Suffix)
            .is_some_and(|c| c.rules.iter().all(|r| r.required.is_empty()))
    }

    /// Every admitted alignment of `lex`, as full pair sequences (nulls kept).
    pub fn alignments(&self, lex: &LexicalString) -> Vec<Vec<SymbolPair>> {
        let mut out = Vec::new();
        let mut path = Vec::with_capacity(lex.len());
        self.align_from(lex, 0, &self.start(), &mut path, &mut out);
        out
    }

    fn align_from(
        &self,
        lex: &LexicalString,
        i: usize,
        cursor: &Cursor,
        path: &mut Vec<SymbolPair>,
        out: &mut Vec<Vec<SymbolPair>>,
    ) {
        if i == lex.len() {
            if self.finish(cursor) {
                out.push(path.clone());
            }
            return;
        }
        let at = if i < lex.root_len() {
            Position::Root(lex.root_flags())
        } else {
            Position::Suffix
        };
        for p in self.candidates(lex.symbols()[i], at) {
            if let Some(next) = self.step(cursor, p, at) {
                path.push(self.pair(p));
                self.align_from(lex, i + 1, &next, path, out);
                path.pop();
            }
        }
    }

    /// All surface strings (nulls removed) admitted by every rule.
    pub fn generate(&self, lex: &LexicalString) -> BTreeSet<String> {
        self.alignments(lex)
            .into_iter()
            .map(|a| a.iter().map(|p| p.surface).filter(|&c| c != NULL).collect())
            .collect()
    }

    /// Does `surface` realize `lex`? Searches alignments against the surface
    /// string directly instead of enumerating [`generate`](Self::generate).
    pub fn recognize(&self, surface: &str, lex: &LexicalString) -> bool {
        let root = lex.root_len();
        self.aligner(surface)
            .extend_root(&lex.symbols()[..root], lex.root_flags())
            .extend_suffixes(&lex.symbols()[root..])
            .accepts()
    }

    pub fn aligner(&self, surface: &str) -> SurfaceAligner<'_> {
        SurfaceAligner {
            phonology: self,
            surface: surface.chars().collect(),
            hyps: vec![(self.start(), 0)],
        }
    }
}

/// Incremental alignment of a lexical string, built piece by piece, against a
/// fixed surface word. The analyzer extends it one morpheme at a time and
/// prunes a path as soon as no hypothesis survives.
#[derive(Clone)]
pub struct SurfaceAligner<'a> {
    phonology: &'a Phonology,
    surface: Arc<[char]>,
    hyps: Vec<(Cursor, usize)>,
}

impl<'a> SurfaceAligner<'a> {
    fn extend(&self, symbols: &[char], at: Position<'_>) -> Self {
        let ph = self.phonology;
        let mut hyps = self.hyps.clone();
        for &sym in symbols {
            let mut seen = HashSet::new();
            let mut next = Vec::new();
            for (cursor, pos) in &hyps {
                for p in ph.candidates(sym, at) {
                    let surf = ph.pair(p).surface;
                    let npos = if surf == NULL {
                        *pos
                    } else if self.surface.get(*pos) == Some(&surf) {
                        pos + 1
                    } else {
                        continue;
                    };
                    if let Some(c) = ph.step(cursor, p, at) {
                        if seen.insert((c.clone(), npos)) {
                            next.push((c, npos));
                        }
                    }
                }
            }
            hyps = next;
            if hyps.is_empty() {
                break;
            }
        }
        SurfaceAligner {
            phonology: ph,
            surface: Arc::clone(&self.surface),
            hyps,
        }
    }

    /// Root symbols; gated pairs are usable when `flags` carries their flag.
    pub fn extend_root(&self, root: &[char], flags: &BTreeSet<String>) -> Self {
        self.extend(root, Position::Root(flags))
    }

    /// Suffix material, including the leading `+`.
    pub fn extend_suffixes(&self, symbols: &[char]) -> Self {
        self.extend(symbols, Position::Suffix)
    }

    pub fn is_dead(&self) -> bool {
        self.hyps.is_empty()
    }

    /// Has the whole surface word been consumed by an admitted alignment?
    pub fn accepts(&self) -> bool {
        self.hyps
            .iter()
            .any(|(c, pos)| *pos == self.surface.len() && self.phonology.finish(c))
    }
}

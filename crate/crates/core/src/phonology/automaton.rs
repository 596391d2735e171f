//! Context patterns compiled to DFAs over feasible-pair ids.
//!
//! The input alphabet is the alphabet's feasible pairs (ids `0..n`) plus one
//! extra id `n` for the word edge.

use std::collections::{BTreeSet, HashMap};

use super::{Alphabet, Pattern};

pub(crate) struct Dfa {
    width: usize,
    trans: Vec<u32>,
    accepting: Vec<bool>,
    dead: Vec<bool>,
}

impl Dfa {
    pub const START: u32 = 0;

    /// DFA for `pattern` anchored at the start of its input.
    pub fn anchored(pattern: &Pattern, alphabet: &Alphabet) -> Dfa {
        let mut nfa = Nfa::new(alphabet.feasible_pairs().len() + 1);
        let (s, e) = nfa.build(pattern, alphabet);
        nfa.determinize(s, e)
    }

    /// DFA accepting every input that ends with a match of `pattern`.
    pub fn suffix(pattern: &Pattern, alphabet: &Alphabet) -> Dfa {
        let width = alphabet.feasible_pairs().len() + 1;
        let mut nfa = Nfa::new(width);
        let any = nfa.label(vec![true; width]);
        let lead = nfa.state();
        nfa.moves[lead].push((any, lead));
        let (s, e) = nfa.build(pattern, alphabet);
        nfa.eps[lead].push(s);
        nfa.determinize(lead, e)
    }

    #[inline]
    pub fn step(&self, state: u32, symbol: usize) -> u32 {
        self.trans[state as usize * self.width + symbol]
    }

    #[inline]
    pub fn is_accepting(&self, state: u32) -> bool {
        self.accepting[state as usize]
    }

    #[inline]
    pub fn is_dead(&self, state: u32) -> bool {
        self.dead[state as usize]
    }

    /// Is there an input of at most `max_len` symbols accepted by both?
    pub fn intersects_within(&self, other: &Dfa, max_len: usize) -> bool {
        debug_assert_eq!(self.width, other.width);
        let mut frontier: BTreeSet<(u32, u32)> = BTreeSet::from([(Self::START, Self::START)]);
        let mut seen = frontier.clone();
        for depth in 0..=max_len {
            if frontier
                .iter()
                .any(|&(a, b)| self.is_accepting(a) && other.is_accepting(b))
            {
                return true;
            }
            if depth == max_len {
                break;
            }
            let mut next = BTreeSet::new();
            for &(a, b) in &frontier {
                for sym in 0..self.width {
                    let pair = (self.step(a, sym), other.step(b, sym));
                    if !self.is_dead(pair.0) && !other.is_dead(pair.1) && seen.insert(pair) {
                        next.insert(pair);
                    }
                }
            }
            frontier = next;
        }
        false
    }
}

struct Nfa {
    width: usize,
    eps: Vec<Vec<usize>>,
    moves: Vec<Vec<(usize, usize)>>,
    labels: Vec<Vec<bool>>,
}

impl Nfa {
    fn new(width: usize) -> Self {
        Nfa {
            width,
            eps: Vec::new(),
            moves: Vec::new(),
            labels: Vec::new(),
        }
    }

    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.moves.push(Vec::new());
        self.eps.len() - 1
    }

    fn label(&mut self, mask: Vec<bool>) -> usize {
        self.labels.push(mask);
        self.labels.len() - 1
    }

    fn build(&mut self, pattern: &Pattern, alphabet: &Alphabet) -> (usize, usize) {
        match pattern {
            Pattern::Empty => {
                let s = self.state();
                (s, s)
            }
            Pattern::Edge => {
                let mut mask = vec![false; self.width];
                mask[self.width - 1] = true;
                self.single(mask)
            }
            Pattern::Atom { lexical, surface } => {
                let mut mask = vec![false; self.width];
                for (i, p) in alphabet.feasible_pairs().iter().enumerate() {
                    mask[i] = lexical.matches(alphabet, p.lexical) && surface.matches(alphabet, p.surface);
                }
                self.single(mask)
            }
            Pattern::Seq(items) => {
                let start = self.state();
                let mut cur = start;
                for item in items {
                    let (s, e) = self.build(item, alphabet);
                    self.eps[cur].push(s);
                    cur = e;
                }
                (start, cur)
            }
            Pattern::Alt(items) => {
                let start = self.state();
                let end = self.state();
                for item in items {
                    let (s, e) = self.build(item, alphabet);
                    self.eps[start].push(s);
                    self.eps[e].push(end);
                }
                (start, end)
            }
            Pattern::Star(inner) => {
                let start = self.state();
                let end = self.state();
                let (s, e) = self.build(inner, alphabet);
                self.eps[start].push(s);
                self.eps[start].push(end);
                self.eps[e].push(s);
                self.eps[e].push(end);
                (start, end)
            }
            Pattern::Optional(inner) => {
                let start = self.state();
                let end = self.state();
                let (s, e) = self.build(inner, alphabet);
                self.eps[start].push(s);
                self.eps[start].push(end);
                self.eps[e].push(end);
                (start, end)
            }
        }
    }

    fn single(&mut self, mask: Vec<bool>) -> (usize, usize) {
        let l = self.label(mask);
        let s = self.state();
        let e = self.state();
        self.moves[s].push((l, e));
        (s, e)
    }

    fn closure(&self, seeds: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut set = BTreeSet::new();
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(s) = stack.pop() {
            if set.insert(s) {
                stack.extend(self.eps[s].iter().copied());
            }
        }
        set.into_iter().collect()
    }

    fn determinize(&self, start: usize, accept: usize) -> Dfa {
        let mut ids: HashMap<Vec<usize>, u32> = HashMap::new();
        let mut sets: Vec<Vec<usize>> = Vec::new();
        let first = self.closure([start]);
        ids.insert(first.clone(), 0);
        sets.push(first);
        let mut trans = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            for sym in 0..self.width {
                let targets = sets[i].iter().flat_map(|&s| {
                    self.moves[s]
                        .iter()
                        .filter(move |(l, _)| self.labels[*l][sym])
                        .map(|&(_, t)| t)
                });
                let next = self.closure(targets);
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = sets.len() as u32;
                        ids.insert(next.clone(), id);
                        sets.push(next);
                        id
                    }
                };
                trans.push(id);
            }
            i += 1;
        }
        Dfa {
            width: self.width,
            trans,
            accepting: sets.iter().map(|s| s.contains(&accept)).collect(),
            dead: sets.iter().map(|s| s.is_empty()).collect(),
        }
    }
}

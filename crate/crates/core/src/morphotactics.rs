//! Suffix ordering for the nominal and verbal paradigms.
//!
//! A paradigm is a fixed chain of slots, each optional unless declared
//! without `?`. Automaton states are `(paradigm, next slot, used dimensions)`
//! so a path can never assign the same feature dimension twice.
//!
//! ```text
//! PARADIGM nominal: plural? possessive? case? relative?
//! MORPHEME GEN case +nHn case=genitive
//! MORPHEME 3SG agreement 0 agreement=3sg
//! ```

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{FeatureError, ParadigmError};
use crate::features::{Category, Dimension, FeatureBundle, FeatureVocabulary};
use crate::lexicon::RootEntry;
use crate::phonology::{LexicalString, BOUNDARY, NULL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Plural,
    Possessive,
    Case,
    Relative,
    Voice,
    Negation,
    Modal,
    MainTense,
    Question,
    SecondTense,
    Agreement,
}

impl Slot {
    pub const ALL: [Slot; 11] = [
        Slot::Plural,
        Slot::Possessive,
        Slot::Case,
        Slot::Relative,
        Slot::Voice,
        Slot::Negation,
        Slot::Modal,
        Slot::MainTense,
        Slot::Question,
        Slot::SecondTense,
        Slot::Agreement,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Slot::Plural => "plural",
            Slot::Possessive => "possessive",
            Slot::Case => "case",
            Slot::Relative => "relative",
            Slot::Voice => "voice",
            Slot::Negation => "negation",
            Slot::Modal => "modal",
            Slot::MainTense => "maintense",
            Slot::Question => "question",
            Slot::SecondTense => "secondtense",
            Slot::Agreement => "agreement",
        }
    }

    /// Feature dimensions a morpheme in this slot may set.
    pub fn owns(self) -> &'static [Dimension] {
        match self {
            Slot::Plural | Slot::Agreement => &[Dimension::Agreement],
            Slot::Possessive => &[Dimension::Possessive],
            Slot::Case => &[Dimension::Case],
            Slot::Voice => &[Dimension::Voice],
            Slot::Negation | Slot::Modal => &[Dimension::Sense],
            Slot::MainTense => &[Dimension::Aspect],
            Slot::SecondTense => &[Dimension::Tense],
            Slot::Relative | Slot::Question => &[],
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Slot {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Slot::ALL.iter().copied().find(|slot| slot.as_str() == s).ok_or(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morpheme {
    pub name: String,
    pub slot: Slot,
    /// `+`-initial lexical spelling; empty for a zero morpheme.
    pub lexical_form: String,
    pub features: Vec<(Dimension, String)>,
}

impl Morpheme {
    pub fn is_zero(&self) -> bool {
        self.lexical_form.is_empty()
    }

    fn mask(&self) -> u16 {
        self.features.iter().fold(0, |m, (d, _)| m | dim_bit(*d))
    }
}

fn dim_bit(d: Dimension) -> u16 {
    1 << d as u16
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Paradigm {
    pub name: String,
    /// Slots in order, with a mandatory flag.
    pub slots: Vec<(Slot, bool)>,
}

/// Position in a paradigm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PathState {
    paradigm: u8,
    next: u8,
    used: u16,
}

/// One accepted suffix path attached to a root.
#[derive(Clone, Debug)]
pub struct SuffixPath<'m> {
    pub morphemes: Vec<&'m Morpheme>,
    pub lexical: LexicalString,
}

#[derive(Clone, Debug)]
pub struct Morphotactics {
    paradigms: Vec<Paradigm>,
    morphemes: Vec<Morpheme>,
    by_slot: HashMap<Slot, Vec<usize>>,
    by_name: HashMap<String, usize>,
    nominal: usize,
    verbal: usize,
}

pub const NOMINAL: &str = "nominal";
pub const VERBAL: &str = "verbal";

impl Morphotactics {
    pub fn paradigms(&self) -> &[Paradigm] {
        &self.paradigms
    }

    pub fn morphemes(&self) -> &[Morpheme] {
        &self.morphemes
    }

    pub fn morpheme(&self, name: &str) -> Option<&Morpheme> {
        self.by_name.get(name).map(|&i| &self.morphemes[i])
    }

    pub fn paradigm_for(&self, category: Category) -> &Paradigm {
        &self.paradigms[self.paradigm_index(category)]
    }

    fn paradigm_index(&self, category: Category) -> usize {
        if category.is_nominal() {
            self.nominal
        } else {
            self.verbal
        }
    }

    pub fn start(&self, category: Category) -> PathState {
        PathState {
            paradigm: self.paradigm_index(category) as u8,
            next: 0,
            used: 0,
        }
    }

    fn slot_morphemes(&self, slot: Slot) -> &[usize] {
        self.by_slot.get(&slot).map(Vec::as_slice).unwrap_or(&[])
    }

    /// A mandatory slot with no morphemes at all is vacuous and can be skipped.
    fn blocks(&self, slot: Slot, mandatory: bool) -> bool {
        mandatory && !self.slot_morphemes(slot).is_empty()
    }

    /// Morphemes legal at `state`, each with the state it leads to. Optional
    /// slots may be skipped to reach later ones.
    pub fn successors(&self, state: PathState) -> Vec<(&Morpheme, PathState)> {
        let paradigm = &self.paradigms[state.paradigm as usize];
        let mut out = Vec::new();
        for (pos, &(slot, mandatory)) in paradigm.slots.iter().enumerate().skip(state.next as usize) {
            for &m in self.slot_morphemes(slot) {
                let morpheme = &self.morphemes[m];
                let mask = morpheme.mask();
                if mask & state.used == 0 {
                    out.push((
                        morpheme,
                        PathState {
                            paradigm: state.paradigm,
                            next: pos as u8 + 1,
                            used: state.used | mask,
                        },
                    ));
                }
            }
            if self.blocks(slot, mandatory) {
                break;
            }
        }
        out
    }

    pub fn is_accepting(&self, state: PathState) -> bool {
        self.paradigms[state.paradigm as usize].slots[state.next as usize..]
            .iter()
            .all(|&(slot, mandatory)| !self.blocks(slot, mandatory))
    }

    /// Follows `names` from the start state; `None` if the automaton rejects
    /// the sequence (unknown names included).
    pub fn accept(&self, category: Category, names: &[&str]) -> Option<Vec<&Morpheme>> {
        let mut state = self.start(category);
        let mut path = Vec::with_capacity(names.len());
        for name in names {
            let (m, next) = self
                .successors(state)
                .into_iter()
                .find(|(m, _)| m.name == *name)?;
            path.push(m);
            state = next;
        }
        self.is_accepting(state).then_some(path)
    }

    /// Every accepted path of at most `max_suffixes` morphemes (zero
    /// morphemes count), attached to `root`.
    pub fn enumerate_lexical_forms(&self, root: &RootEntry, max_suffixes: usize) -> Vec<SuffixPath<'_>> {
        let base = LexicalString::root(&root.root)
            .expect("lexicon roots are valid lexical roots")
            .with_flags(root.flag_names());
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.enumerate_from(self.start(root.category), max_suffixes, &base, &mut path, &mut out);
        out
    }

    fn enumerate_from<'m>(
        &'m self,
        state: PathState,
        budget: usize,
        lexical: &LexicalString,
        path: &mut Vec<&'m Morpheme>,
        out: &mut Vec<SuffixPath<'m>>,
    ) {
        if self.is_accepting(state) {
            out.push(SuffixPath {
                morphemes: path.clone(),
                lexical: lexical.clone(),
            });
        }
        if budget == 0 {
            return;
        }
        for (m, next) in self.successors(state) {
            let mut extended = lexical.clone();
            extended
                .push_suffix(&m.name, &m.lexical_form)
                .expect("morpheme forms are validated on load");
            path.push(m);
            self.enumerate_from(next, budget - 1, &extended, path, out);
            path.pop();
        }
    }

    /// Number of accepted paths of at most `max_suffixes` morphemes, counted
    /// on the automaton without building any strings.
    pub fn count_paths(&self, category: Category, max_suffixes: usize) -> u64 {
        let mut memo = HashMap::new();
        self.count_from(self.start(category), max_suffixes, &mut memo)
    }

    fn count_from(&self, state: PathState, budget: usize, memo: &mut HashMap<(PathState, usize), u64>) -> u64 {
        if let Some(&n) = memo.get(&(state, budget)) {
            return n;
        }
        let mut n = u64::from(self.is_accepting(state));
        if budget > 0 {
            for (_, next) in self.successors(state) {
                n += self.count_from(next, budget - 1, memo);
            }
        }
        memo.insert((state, budget), n);
        n
    }

    /// Feature bundle for `root` followed by `morphemes`.
    pub fn bundle(&self, root: &RootEntry, morphemes: &[&Morpheme]) -> Result<FeatureBundle, FeatureError> {
        let mut bundle = FeatureBundle::new(root.root.clone(), root.category);
        for m in morphemes {
            bundle.suffixes.push(m.name.clone());
            for (d, v) in &m.features {
                bundle.set(*d, v.clone())?;
            }
        }
        Ok(bundle)
    }

    /// Base vocabulary extended with every morpheme feature value and name.
    pub fn vocabulary(&self) -> FeatureVocabulary {
        let mut vocab = FeatureVocabulary::base();
        for m in &self.morphemes {
            for (d, v) in &m.features {
                vocab.add(*d, v);
            }
            vocab.suffixes.insert(m.name.clone());
        }
        vocab
    }
}

pub fn load_paradigms(text: &str) -> Result<Morphotactics, ParadigmError> {
    let mut paradigms: Vec<Paradigm> = Vec::new();
    let mut morphemes: Vec<Morpheme> = Vec::new();
    let mut by_name = HashMap::new();
    let mut morpheme_lines = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: &str| ParadigmError::Syntax {
            line,
            message: message.to_string(),
        };
        let (keyword, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        match keyword {
            "PARADIGM" => {
                let (name, slot_list) = rest
                    .split_once(':')
                    .ok_or_else(|| syntax("expected `PARADIGM name: slot slot? ...`"))?;
                let name = name.trim();
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return Err(syntax("paradigm name must be a single word"));
                }
                if paradigms.iter().any(|p| p.name == name) {
                    return Err(syntax(&format!("paradigm `{name}` declared twice")));
                }
                let mut slots: Vec<(Slot, bool)> = Vec::new();
                for tok in slot_list.split_whitespace() {
                    let (slot_name, optional) = match tok.strip_suffix('?') {
                        Some(s) => (s, true),
                        None => (tok, false),
                    };
                    let slot: Slot = slot_name.parse().map_err(|_| ParadigmError::UnknownSlot {
                        line,
                        slot: slot_name.to_string(),
                    })?;
                    if slots.iter().any(|(s, _)| *s == slot) {
                        return Err(ParadigmError::Cycle {
                            line,
                            paradigm: name.to_string(),
                            slot: slot_name.to_string(),
                        });
                    }
                    slots.push((slot, !optional));
                }
                paradigms.push(Paradigm {
                    name: name.to_string(),
                    slots,
                });
            }
            "MORPHEME" => {
                let mut fields = rest.split_whitespace();
                let (Some(name), Some(slot_name), Some(form)) = (fields.next(), fields.next(), fields.next())
                else {
                    return Err(syntax("expected `MORPHEME name slot form feature=value ...`"));
                };
                let slot: Slot = slot_name.parse().map_err(|_| ParadigmError::UnknownSlot {
                    line,
                    slot: slot_name.to_string(),
                })?;
                let lexical_form = if form == NULL.to_string() {
                    String::new()
                } else {
                    let body = form.strip_prefix(BOUNDARY).unwrap_or("");
                    if body.is_empty() || body.contains(BOUNDARY) || body.contains(NULL) {
                        return Err(syntax(&format!("lexical form `{form}` must be `0` or `+` followed by symbols")));
                    }
                    form.to_string()
                };
                let mut features: Vec<(Dimension, String)> = Vec::new();
                for kv in fields {
                    let (k, v) = kv
                        .split_once('=')
                        .ok_or_else(|| syntax(&format!("expected feature=value, found `{kv}`")))?;
                    let dimension: Dimension = k
                        .parse()
                        .map_err(|source| ParadigmError::Feature { line, source })?;
                    if dimension == Dimension::Category {
                        return Err(ParadigmError::Feature {
                            line,
                            source: FeatureError::CategoryFromMorpheme,
                        });
                    }
                    if !slot.owns().contains(&dimension) {
                        return Err(ParadigmError::NotOwned {
                            line,
                            name: name.to_string(),
                            slot: slot_name.to_string(),
                            dimension,
                        });
                    }
                    if let Some((_, first)) = features.iter().find(|(d, _)| *d == dimension) {
                        return Err(ParadigmError::Feature {
                            line,
                            source: FeatureError::Reassigned {
                                dimension,
                                first: first.clone(),
                                second: v.to_string(),
                            },
                        });
                    }
                    if v.is_empty() {
                        return Err(syntax(&format!("empty value for `{k}`")));
                    }
                    features.push((dimension, v.to_string()));
                }
                if by_name.insert(name.to_string(), morphemes.len()).is_some() {
                    return Err(ParadigmError::DuplicateMorpheme {
                        line,
                        name: name.to_string(),
                    });
                }
                morpheme_lines.push(line);
                morphemes.push(Morpheme {
                    name: name.to_string(),
                    slot,
                    lexical_form,
                    features,
                });
            }
            _ => return Err(syntax(&format!("unknown keyword `{keyword}`"))),
        }
    }

    for (m, line) in morphemes.iter().zip(&morpheme_lines) {
        let declared = paradigms.iter().any(|p| p.slots.iter().any(|(s, _)| *s == m.slot));
        if !declared {
            return Err(ParadigmError::UnknownSlot {
                line: *line,
                slot: m.slot.to_string(),
            });
        }
    }
    let find = |name: &str| {
        paradigms
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| ParadigmError::MissingParadigm(name.to_string()))
    };
    let nominal = find(NOMINAL)?;
    let verbal = find(VERBAL)?;

    let mut by_slot: HashMap<Slot, Vec<usize>> = HashMap::new();
    for (i, m) in morphemes.iter().enumerate() {
        by_slot.entry(m.slot).or_default().push(i);
    }
    Ok(Morphotactics {
        paradigms,
        morphemes,
        by_slot,
        by_name,
        nominal,
        verbal,
    })
}

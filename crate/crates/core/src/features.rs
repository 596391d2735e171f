//! Feature dimensions, word categories and the per-word feature bundle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::FeatureError;

/// The scalar feature dimensions a learner can search on.
///
/// `suffix` and `root` are also searchable but are not scalar: they live on
/// [`FeatureBundle`] directly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Agreement,
    Aspect,
    Case,
    Category,
    Possessive,
    Sense,
    Tense,
    Voice,
}

impl Dimension {
    pub const ALL: [Dimension; 8] = [
        Dimension::Agreement,
        Dimension::Aspect,
        Dimension::Case,
        Dimension::Category,
        Dimension::Possessive,
        Dimension::Sense,
        Dimension::Tense,
        Dimension::Voice,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Agreement => "agreement",
            Dimension::Aspect => "aspect",
            Dimension::Case => "case",
            Dimension::Category => "category",
            Dimension::Possessive => "possessive",
            Dimension::Sense => "sense",
            Dimension::Tense => "tense",
            Dimension::Voice => "voice",
        }
    }

    /// Label used by the analysis pane.
    pub fn label(self) -> &'static str {
        match self {
            Dimension::Agreement => "Agreement",
            Dimension::Aspect => "Aspect",
            Dimension::Case => "Case",
            Dimension::Category => "Category",
            Dimension::Possessive => "Possessive",
            Dimension::Sense => "Sense",
            Dimension::Tense => "Tense",
            Dimension::Voice => "Voice",
        }
    }

    /// Base vocabulary; the paradigm file may extend it.
    pub fn base_values(self) -> &'static [&'static str] {
        const PERSONS: &[&str] = &["1sg", "2sg", "3sg", "1pl", "2pl", "3pl"];
        match self {
            Dimension::Agreement | Dimension::Possessive => PERSONS,
            Dimension::Aspect => &["past"],
            Dimension::Case => &[
                "nominative",
                "accusative",
                "dative",
                "locative",
                "ablative",
                "genitive",
            ],
            Dimension::Category => &["noun", "adjective", "verb", "pronoun"],
            Dimension::Sense => &["negative", "negative-capability"],
            Dimension::Tense => &["past"],
            Dimension::Voice => &["passive"],
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dimension {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Dimension::ALL
            .iter()
            .copied()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| FeatureError::UnknownDimension(s.to_string()))
    }
}

/// Part of speech of a root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Noun,
    Adjective,
    Verb,
    Pronoun,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Noun,
        Category::Adjective,
        Category::Verb,
        Category::Pronoun,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Noun => "noun",
            Category::Adjective => "adjective",
            Category::Verb => "verb",
            Category::Pronoun => "pronoun",
        }
    }

    /// Nouns, adjectives and pronouns inflect through the nominal paradigm.
    pub fn is_nominal(self) -> bool {
        !matches!(self, Category::Verb)
    }

    /// Short tag used in glosses such as `N(ev)+GEN`.
    pub fn tag(self) -> &'static str {
        match self {
            Category::Noun => "N",
            Category::Adjective => "ADJ",
            Category::Verb => "V",
            Category::Pronoun => "PN",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| FeatureError::UnknownCategory(s.to_string()))
    }
}

/// Human-readable rendering of a feature value, e.g. `3sg` -> `3rd singular`,
/// `negative-capability` -> `Negative capability`.
pub fn value_label(value: &str) -> String {
    let person = |p: char| match p {
        '1' => Some("1st"),
        '2' => Some("2nd"),
        '3' => Some("3rd"),
        _ => None,
    };
    let mut chars = value.chars();
    if let (Some(p), rest) = (chars.next(), chars.as_str()) {
        if let Some(ord) = person(p) {
            match rest {
                "sg" => return format!("{ord} singular"),
                "pl" => return format!("{ord} plural"),
                _ => {}
            }
        }
    }
    let spaced = value.replace('-', " ");
    let mut out = String::with_capacity(spaced.len());
    let mut it = spaced.chars();
    if let Some(first) = it.next() {
        out.extend(first.to_uppercase());
        out.push_str(it.as_str());
    }
    out
}

/// One morphological reading of a word, flattened for indexing and search.
///
/// `category` is always present. Every other scalar dimension is optional and,
/// when present, was contributed by exactly one morpheme in `suffixes`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureBundle {
    pub root: String,
    pub category: Category,
    pub suffixes: Vec<String>,
    values: BTreeMap<Dimension, String>,
}

impl FeatureBundle {
    pub fn new(root: impl Into<String>, category: Category) -> Self {
        FeatureBundle {
            root: root.into(),
            category,
            suffixes: Vec::new(),
            values: BTreeMap::new(),
        }
    }

    /// Explicit value of a dimension. `category` is always `Some`.
    pub fn get(&self, dim: Dimension) -> Option<&str> {
        match dim {
            Dimension::Category => Some(self.category.as_str()),
            _ => self.values.get(&dim).map(String::as_str),
        }
    }

    /// Value used for matching: like [`get`](Self::get), except that a
    /// nominal word without an overt case suffix reads as `nominative`.
    pub fn effective(&self, dim: Dimension) -> Option<&str> {
        match self.get(dim) {
            None if dim == Dimension::Case && self.category.is_nominal() => Some("nominative"),
            v => v,
        }
    }

    /// Sets a scalar dimension. Fails if it was already set, or if `dim` is
    /// `category` (that is fixed by the root).
    pub fn set(&mut self, dim: Dimension, value: impl Into<String>) -> Result<(), FeatureError> {
        if dim == Dimension::Category {
            return Err(FeatureError::CategoryFromMorpheme);
        }
        let value = value.into();
        if let Some(old) = self.values.get(&dim) {
            return Err(FeatureError::Reassigned {
                dimension: dim,
                first: old.clone(),
                second: value,
            });
        }
        self.values.insert(dim, value);
        Ok(())
    }

    /// Present scalar values in dimension order, category included.
    pub fn scalar_values(&self) -> impl Iterator<Item = (Dimension, &str)> + '_ {
        Dimension::ALL
            .iter()
            .filter_map(move |&d| self.get(d).map(|v| (d, v)))
    }

    pub fn has_suffix(&self, name: &str) -> bool {
        self.suffixes.iter().any(|s| s == name)
    }
}

/// Value vocabularies for every dimension plus the morpheme names usable as
/// `suffix` queries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FeatureVocabulary {
    pub dimensions: BTreeMap<Dimension, BTreeSet<String>>,
    pub suffixes: BTreeSet<String>,
}

impl FeatureVocabulary {
    pub fn base() -> Self {
        let dimensions = Dimension::ALL
            .iter()
            .map(|&d| {
                (
                    d,
                    d.base_values().iter().map(|v| v.to_string()).collect(),
                )
            })
            .collect();
        FeatureVocabulary {
            dimensions,
            suffixes: BTreeSet::new(),
        }
    }

    pub fn contains(&self, dim: Dimension, value: &str) -> bool {
        self.dimensions
            .get(&dim)
            .is_some_and(|vals| vals.contains(value))
    }

    pub fn add(&mut self, dim: Dimension, value: &str) {
        self.dimensions
            .entry(dim)
            .or_default()
            .insert(value.to_string());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_match_analysis_pane() {
        assert_eq!(value_label("3sg"), "3rd singular");
        assert_eq!(value_label("1pl"), "1st plural");
        assert_eq!(value_label("past"), "Past");
        assert_eq!(value_label("negative-capability"), "Negative capability");
        assert_eq!(value_label("verb"), "Verb");
    }

    #[test]
    fn bundle_rejects_double_assignment() {
        let mut b = FeatureBundle::new("kes", Category::Verb);
        b.set(Dimension::Sense, "negative").unwrap();
        assert!(b.set(Dimension::Sense, "negative-capability").is_err());
        assert!(b.set(Dimension::Category, "noun").is_err());
    }

    #[test]
    fn nominative_is_implicit_for_nominals_only() {
        let noun = FeatureBundle::new("ev", Category::Noun);
        assert_eq!(noun.get(Dimension::Case), None);
        assert_eq!(noun.effective(Dimension::Case), Some("nominative"));
        let verb = FeatureBundle::new("kes", Category::Verb);
        assert_eq!(verb.effective(Dimension::Case), None);
    }
}

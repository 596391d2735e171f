//! Conjunctive feature queries, implied categories and the analysis view.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::corpus::TaggedCorpus;
use crate::error::{ImplicationError, SearchError};
use crate::features::{value_label, Category, Dimension, FeatureBundle, FeatureVocabulary};
use crate::index::{FeatureIndex, Posting};
use crate::morphotactics::Morphotactics;

/// A conjunction of feature values. Build one with [`Query::set`] or
/// [`Query::from_pairs`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Query {
    values: BTreeMap<Dimension, String>,
    pub suffix: Option<String>,
    pub root: Option<String>,
    /// The category value was filled in by an implication, so it matches
    /// any category that inflects through the same paradigm.
    implied_category: bool,
}

impl Query {
    pub fn new() -> Self {
        Query::default()
    }

    pub fn set(mut self, dim: Dimension, value: impl Into<String>) -> Self {
        if dim == Dimension::Category {
            self.implied_category = false;
        }
        self.values.insert(dim, value.into());
        self
    }

    pub fn with_suffix(mut self, name: impl Into<String>) -> Self {
        self.suffix = Some(name.into());
        self
    }

    pub fn with_root(mut self, root: impl Into<String>) -> Self {
        self.root = Some(root.into());
        self
    }

    /// Builds a query from `field=value` pairs (`suffix` and `root` included).
    /// Empty values leave the field unset.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self, SearchError> {
        let mut q = Query::new();
        for (field, value) in pairs {
            let value = value.trim();
            match field {
                "suffix" if !value.is_empty() => q.suffix = Some(value.to_string()),
                "root" if !value.is_empty() => q.root = Some(value.to_string()),
                "suffix" | "root" => {}
                _ => {
                    let dim: Dimension = field
                        .parse()
                        .map_err(|_| SearchError::UnknownField(field.to_string()))?;
                    if !value.is_empty() {
                        q = q.set(dim, value);
                    }
                }
            }
        }
        Ok(q)
    }

    pub fn get(&self, dim: Dimension) -> Option<&str> {
        self.values.get(&dim).map(String::as_str)
    }

    pub fn values(&self) -> impl Iterator<Item = (Dimension, &str)> + '_ {
        self.values.iter().map(|(d, v)| (*d, v.as_str()))
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty() && self.suffix.is_none() && self.root.is_none()
    }

    pub fn category_is_implied(&self) -> bool {
        self.implied_category && self.values.contains_key(&Dimension::Category)
    }

    /// Does `bundle` satisfy every field?
    pub fn matches(&self, bundle: &FeatureBundle) -> bool {
        self.values.iter().all(|(&d, v)| {
            if d == Dimension::Category && self.implied_category {
                v.parse::<Category>()
                    .is_ok_and(|c| c.is_nominal() == bundle.category.is_nominal())
            } else {
                bundle.effective(d) == Some(v.as_str())
            }
        }) && self.suffix.as_ref().is_none_or(|s| bundle.has_suffix(s))
            && self.root.as_ref().is_none_or(|r| bundle.root == *r)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.values.iter().map(|(d, v)| format!("{d}={v}")).collect();
        if let Some(s) = &self.suffix {
            parts.push(format!("suffix={s}"));
        }
        if let Some(r) = &self.root {
            parts.push(format!("root={r}"));
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Two or more feature values that no single word can carry together.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Conflict {
    pub features: Vec<(String, String)>,
    pub explanation: String,
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.explanation)
    }
}

/// Which category a set dimension implies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Implications {
    rules: BTreeMap<Dimension, Category>,
}

/// Parses `dimension => category` lines.
pub fn load_implications(text: &str) -> Result<Implications, ImplicationError> {
    let mut rules = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| ImplicationError::Syntax { line, message };
        let (lhs, rhs) = content
            .split_once("=>")
            .ok_or_else(|| err("expected `dimension => category`".into()))?;
        let dim: Dimension = lhs.trim().parse().map_err(|e| err(format!("{e}")))?;
        if dim == Dimension::Category {
            return Err(err("category cannot imply itself".into()));
        }
        let cat: Category = rhs.trim().parse().map_err(|e| err(format!("{e}")))?;
        if rules.insert(dim, cat).is_some() {
            return Err(err(format!("{dim} listed twice")));
        }
    }
    Ok(Implications { rules })
}

impl Implications {
    pub fn implied_by(&self, dim: Dimension) -> Option<Category> {
        self.rules.get(&dim).copied()
    }

    /// Adds the category implied by the set fields, or reports the clash.
    pub fn implied_features(&self, q: &Query) -> Result<Query, Conflict> {
        let explicit = if q.category_is_implied() {
            None
        } else {
            q.get(Dimension::Category).and_then(|c| c.parse::<Category>().ok())
        };
        let implied: Vec<(Dimension, &str, Category)> = q
            .values()
            .filter_map(|(d, v)| self.implied_by(d).map(|c| (d, v, c)))
            .collect();

        if let Some(cat) = explicit {
            if let Some(&(d, v, c)) = implied.iter().find(|(_, _, c)| c.is_nominal() != cat.is_nominal()) {
                return Err(Conflict {
                    features: vec![("category".into(), cat.to_string()), (d.to_string(), v.to_string())],
                    explanation: format!(
                        "{d}={v} implies category {c}, which contradicts category {cat}; no word has both"
                    ),
                });
            }
            return Ok(q.clone());
        }

        let nominal = implied.iter().find(|(_, _, c)| c.is_nominal());
        let verbal = implied.iter().find(|(_, _, c)| !c.is_nominal());
        match (nominal, verbal) {
            (Some(&(d1, v1, c1)), Some(&(d2, v2, c2))) => Err(Conflict {
                features: vec![(d1.to_string(), v1.to_string()), (d2.to_string(), v2.to_string())],
                explanation: format!(
                    "{d1}={v1} implies category {c1} but {d2}={v2} implies category {c2}; \
                     no word is both a {c1} and a {c2}"
                ),
            }),
            (Some(&(_, _, c)), None) | (None, Some(&(_, _, c))) => {
                let mut out = q.clone().set(Dimension::Category, c.as_str());
                out.implied_category = true;
                Ok(out)
            }
            (None, None) => Ok(q.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SentenceHit {
    pub sentence_id: usize,
    pub text: String,
    /// Matching token indices, ascending.
    pub matches: Vec<usize>,
    /// Character spans of the matching tokens.
    pub spans: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Hits(Vec<SentenceHit>),
    Conflict(Conflict),
}

impl SearchOutcome {
    pub fn hits(&self) -> Option<&[SentenceHit]> {
        match self {
            SearchOutcome::Hits(h) => Some(h),
            SearchOutcome::Conflict(_) => None,
        }
    }

    /// Every matching `(sentence, token)`.
    pub fn positions(&self) -> BTreeSet<(usize, usize)> {
        self.hits()
            .unwrap_or_default()
            .iter()
            .flat_map(|h| h.matches.iter().map(move |&t| (h.sentence_id, t)))
            .collect()
    }
}

/// Rejects empty queries and values outside the vocabulary.
pub fn validate(q: &Query, vocab: &FeatureVocabulary) -> Result<(), SearchError> {
    if q.is_empty() {
        return Err(SearchError::EmptyQuery);
    }
    for (d, v) in q.values() {
        if !vocab.contains(d, v) {
            return Err(SearchError::UnknownFeatureValue {
                field: d.to_string(),
                value: v.to_string(),
            });
        }
    }
    if let Some(s) = &q.suffix {
        if !vocab.suffixes.contains(s) {
            return Err(SearchError::UnknownFeatureValue {
                field: "suffix".into(),
                value: s.clone(),
            });
        }
    }
    Ok(())
}

/// Index-backed search: intersects the posting lists of every set field.
pub fn search(
    q: &Query,
    implications: &Implications,
    vocab: &FeatureVocabulary,
    index: &FeatureIndex,
    tagged: &TaggedCorpus,
) -> Result<SearchOutcome, SearchError> {
    validate(q, vocab)?;
    let q = match implications.implied_features(q) {
        Ok(q) => q,
        Err(c) => return Ok(SearchOutcome::Conflict(c)),
    };
    let mut lists: Vec<Vec<Posting>> = Vec::new();
    for (d, v) in q.values() {
        if d == Dimension::Category && q.category_is_implied() {
            let nominal = v.parse::<Category>().is_ok_and(Category::is_nominal);
            let mut union: Vec<Posting> = Category::ALL
                .iter()
                .filter(|c| c.is_nominal() == nominal)
                .flat_map(|c| index.feature(d, c.as_str()).iter().copied())
                .collect();
            union.sort_unstable();
            union.dedup();
            lists.push(union);
        } else {
            lists.push(index.feature(d, v).to_vec());
        }
    }
    if let Some(s) = &q.suffix {
        lists.push(index.suffix(s).to_vec());
    }
    if let Some(r) = &q.root {
        lists.push(index.root(r).to_vec());
    }
    lists.sort_by_key(Vec::len);
    let mut result = lists.first().cloned().unwrap_or_default();
    for list in &lists[1..] {
        result = intersect(&result, list);
        if result.is_empty() {
            break;
        }
    }
    Ok(SearchOutcome::Hits(group(
        tagged,
        result.into_iter().map(|(s, t)| (s as usize, t as usize)),
    )))
}

fn intersect(a: &[Posting], b: &[Posting]) -> Vec<Posting> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Reference search that checks every token of the corpus directly.
pub fn search_by_scan(
    q: &Query,
    implications: &Implications,
    vocab: &FeatureVocabulary,
    tagged: &TaggedCorpus,
) -> Result<SearchOutcome, SearchError> {
    validate(q, vocab)?;
    let q = match implications.implied_features(q) {
        Ok(q) => q,
        Err(c) => return Ok(SearchOutcome::Conflict(c)),
    };
    let found = tagged
        .analyzed()
        .filter(|(_, _, b)| q.matches(b))
        .map(|(s, t, _)| (s, t));
    Ok(SearchOutcome::Hits(group(tagged, found)))
}

fn group(tagged: &TaggedCorpus, positions: impl Iterator<Item = (usize, usize)>) -> Vec<SentenceHit> {
    let mut hits: Vec<SentenceHit> = Vec::new();
    for (s, t) in positions {
        let sentence = &tagged.sentences[s];
        let tok = &sentence.tokens[t];
        match hits.last_mut() {
            Some(h) if h.sentence_id == s => {
                h.matches.push(t);
                h.spans.push((tok.start, tok.end));
            }
            _ => hits.push(SentenceHit {
                sentence_id: s,
                text: sentence.text.clone(),
                matches: vec![t],
                spans: vec![(tok.start, tok.end)],
            }),
        }
    }
    hits
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ViewField {
    pub dimension: String,
    pub label: String,
    pub value: String,
}

/// What the analysis pane shows for one token.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisView {
    pub token: String,
    pub lexical_gloss: String,
    pub suffixes: Vec<String>,
    pub fields: Vec<ViewField>,
}

/// Pane order after root and category.
const PANE_ORDER: [Dimension; 7] = [
    Dimension::Sense,
    Dimension::Voice,
    Dimension::Agreement,
    Dimension::Aspect,
    Dimension::Case,
    Dimension::Possessive,
    Dimension::Tense,
];

pub fn analysis_view(
    tagged: &TaggedCorpus,
    sentence: usize,
    token: usize,
    morphotactics: &Morphotactics,
) -> Result<AnalysisView, SearchError> {
    let tok = tagged
        .sentences
        .get(sentence)
        .and_then(|s| s.tokens.get(token))
        .ok_or(SearchError::OutOfRange { sentence, token })?;
    let b = tagged
        .bundle(sentence, token)
        .ok_or_else(|| SearchError::NoAnalysis(tok.text.clone()))?;
    let mut gloss = b.root.clone();
    for name in &b.suffixes {
        match morphotactics.morpheme(name) {
            Some(m) => gloss.push_str(&m.lexical_form),
            None => {
                gloss.push('+');
                gloss.push_str(name);
            }
        }
    }
    let mut fields = vec![
        ViewField {
            dimension: "root".into(),
            label: "Root".into(),
            value: b.root.clone(),
        },
        ViewField {
            dimension: "category".into(),
            label: Dimension::Category.label().into(),
            value: value_label(b.category.as_str()),
        },
    ];
    for d in PANE_ORDER {
        if let Some(v) = b.get(d) {
            fields.push(ViewField {
                dimension: d.to_string(),
                label: d.label().into(),
                value: value_label(v),
            });
        }
    }
    Ok(AnalysisView {
        token: tok.text.clone(),
        lexical_gloss: gloss,
        suffixes: b.suffixes.clone(),
        fields,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Implications {
        load_implications(
            "case => noun\npossessive => noun\nvoice => verb\nsense => verb\naspect => verb\ntense => verb\n",
        )
        .unwrap()
    }

    #[test]
    fn dative_implies_noun() {
        let q = Query::new().set(Dimension::Case, "dative");
        let e = table().implied_features(&q).unwrap();
        assert_eq!(e.get(Dimension::Category), Some("noun"));
        assert!(e.category_is_implied());
        assert_eq!(table().implied_features(&e).unwrap(), e);
    }

    #[test]
    fn dative_and_past_tense_conflict() {
        let q = Query::new().set(Dimension::Case, "dative").set(Dimension::Tense, "past");
        let c = table().implied_features(&q).unwrap_err();
        assert_eq!(c.features.len(), 2);
        assert!(c.explanation.contains("noun") && c.explanation.contains("verb"));
    }

    #[test]
    fn explicit_category_clash() {
        let q = Query::new().set(Dimension::Category, "adjective").set(Dimension::Voice, "passive");
        assert!(table().implied_features(&q).is_err());
        let ok = Query::new().set(Dimension::Category, "pronoun").set(Dimension::Case, "genitive");
        assert_eq!(table().implied_features(&ok).unwrap(), ok);
    }

    #[test]
    fn root_alone_is_unchanged() {
        let q = Query::new().with_root("ev");
        assert_eq!(table().implied_features(&q).unwrap(), q);
    }

    #[test]
    fn implied_category_matches_whole_paradigm() {
        let q = table()
            .implied_features(&Query::new().set(Dimension::Case, "genitive"))
            .unwrap();
        let mut pron = FeatureBundle::new("sen", Category::Pronoun);
        pron.set(Dimension::Case, "genitive").unwrap();
        assert!(q.matches(&pron));
        let explicit = Query::new().set(Dimension::Category, "noun").set(Dimension::Case, "genitive");
        assert!(!explicit.matches(&pron));
    }

    #[test]
    fn field_parsing() {
        let q = Query::from_pairs([("voice", "passive"), ("root", "kes"), ("case", "")]).unwrap();
        assert_eq!(q.to_string(), "{voice=passive, root=kes}");
        assert_eq!(
            Query::from_pairs([("mood", "x")]),
            Err(SearchError::UnknownField("mood".into()))
        );
        assert!(load_implications("case => adverb\n").is_err());
        assert!(load_implications("case noun\n").is_err());
    }
}

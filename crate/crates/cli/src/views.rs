//! JSON shapes shared by `--json` output and the HTTP API.

use std::collections::{BTreeMap, BTreeSet};

use morfwork::analyzer::Parse;
use morfwork::corpus::{Sentence, TaggedCorpus};
use morfwork::features::{Dimension, FeatureBundle, FeatureVocabulary};
use morfwork::search::{Conflict, Query, SentenceHit};
use serde::Serialize;

#[derive(Serialize)]
pub struct FieldVocabulary {
    pub name: String,
    pub label: String,
    pub values: Vec<String>,
}

/// The ten query fields in display order: eight dimensions, then suffix and root.
#[derive(Serialize)]
pub struct Features {
    pub fields: Vec<FieldVocabulary>,
}

pub fn features(vocab: &FeatureVocabulary, tagged: &TaggedCorpus) -> Features {
    let mut fields: Vec<FieldVocabulary> = Dimension::ALL
        .iter()
        .map(|&d| FieldVocabulary {
            name: d.to_string(),
            label: d.label().to_string(),
            values: vocab.dimensions.get(&d).into_iter().flatten().cloned().collect(),
        })
        .collect();
    fields.push(FieldVocabulary {
        name: "suffix".into(),
        label: "Suffix".into(),
        values: vocab.suffixes.iter().cloned().collect(),
    });
    let roots: BTreeSet<String> = tagged.analyzed().map(|(_, _, b)| b.root.clone()).collect();
    fields.push(FieldVocabulary {
        name: "root".into(),
        label: "Root".into(),
        values: roots.into_iter().collect(),
    });
    Features { fields }
}

#[derive(Serialize)]
pub struct SearchResponse<'a> {
    pub query: BTreeMap<String, String>,
    pub total_sentences: usize,
    pub total_tokens: usize,
    pub hits: &'a [SentenceHit],
}

pub fn query_fields(q: &Query) -> BTreeMap<String, String> {
    let mut out: BTreeMap<String, String> = q.values().map(|(d, v)| (d.to_string(), v.to_string())).collect();
    if let Some(s) = &q.suffix {
        out.insert("suffix".into(), s.clone());
    }
    if let Some(r) = &q.root {
        out.insert("root".into(), r.clone());
    }
    out
}

pub fn search_response<'a>(q: &Query, hits: &'a [SentenceHit]) -> SearchResponse<'a> {
    SearchResponse {
        query: query_fields(q),
        total_sentences: hits.len(),
        total_tokens: hits.iter().map(|h| h.matches.len()).sum(),
        hits,
    }
}

#[derive(Serialize)]
pub struct ConflictResponse<'a> {
    pub error: &'static str,
    pub conflict: &'a Conflict,
}

pub fn conflict_response(c: &Conflict) -> ConflictResponse<'_> {
    ConflictResponse {
        error: "conflict",
        conflict: c,
    }
}

#[derive(Serialize)]
pub struct BundleSummary {
    pub root: String,
    pub category: String,
    pub suffixes: Vec<String>,
    pub features: BTreeMap<String, String>,
}

impl From<&FeatureBundle> for BundleSummary {
    fn from(b: &FeatureBundle) -> Self {
        BundleSummary {
            root: b.root.clone(),
            category: b.category.to_string(),
            suffixes: b.suffixes.clone(),
            features: b.scalar_values().map(|(d, v)| (d.to_string(), v.to_string())).collect(),
        }
    }
}

#[derive(Serialize)]
pub struct TokenSummary {
    pub index: usize,
    pub text: String,
    pub start: usize,
    pub end: usize,
    pub analysis: Option<BundleSummary>,
}

#[derive(Serialize)]
pub struct SentenceView {
    pub id: usize,
    pub text: String,
    pub tokens: Vec<TokenSummary>,
}

pub fn sentence_view(s: &Sentence, chosen: &[Option<FeatureBundle>]) -> SentenceView {
    SentenceView {
        id: s.id,
        text: s.text.clone(),
        tokens: s
            .tokens
            .iter()
            .zip(chosen)
            .enumerate()
            .map(|(index, (t, b))| TokenSummary {
                index,
                text: t.text.clone(),
                start: t.start,
                end: t.end,
                analysis: b.as_ref().map(BundleSummary::from),
            })
            .collect(),
    }
}

#[derive(Serialize)]
pub struct ParseView {
    pub tag: String,
    pub lexical: String,
    #[serde(flatten)]
    pub bundle: BundleSummary,
}

impl From<&Parse> for ParseView {
    fn from(p: &Parse) -> Self {
        ParseView {
            tag: p.tag_gloss(),
            lexical: p.gloss.clone(),
            bundle: BundleSummary::from(&p.features),
        }
    }
}

#[derive(Serialize)]
pub struct AnalyzeResponse {
    pub word: String,
    pub parses: Vec<ParseView>,
}

#[derive(Serialize)]
pub struct ErrorBody {
    pub error: String,
}

//! Inverted feature index over a tagged corpus.
//!
//! ```text
//! #morfwork-index v1
//! checksum=<sha256 of everything below this line>
//! case=genitive<TAB>0:0,3:1
//! suffix=GEN<TAB>0:0,3:1
//! root=ev<TAB>0:0
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::corpus::{check_header, TaggedCorpus};
use crate::error::FormatError;
use crate::features::Dimension;

pub const INDEX_HEADER: &str = "#morfwork-index v1";
const INDEX_MAGIC: &str = "#morfwork-index";

/// `(sentence id, token index)`.
pub type Posting = (u32, u32);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FeatureIndex {
    pub postings: BTreeMap<(Dimension, String), Vec<Posting>>,
    pub suffixes: BTreeMap<String, Vec<Posting>>,
    pub roots: BTreeMap<String, Vec<Posting>>,
}

const EMPTY: &[Posting] = &[];

impl FeatureIndex {
    pub fn feature(&self, dim: Dimension, value: &str) -> &[Posting] {
        self.postings
            .get(&(dim, value.to_string()))
            .map_or(EMPTY, Vec::as_slice)
    }

    pub fn suffix(&self, name: &str) -> &[Posting] {
        self.suffixes.get(name).map_or(EMPTY, Vec::as_slice)
    }

    pub fn root(&self, root: &str) -> &[Posting] {
        self.roots.get(root).map_or(EMPTY, Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.postings.is_empty() && self.suffixes.is_empty() && self.roots.is_empty()
    }

    fn merge(mut self, other: FeatureIndex) -> FeatureIndex {
        fn join<K: Ord>(into: &mut BTreeMap<K, Vec<Posting>>, from: BTreeMap<K, Vec<Posting>>) {
            for (k, mut v) in from {
                into.entry(k).or_default().append(&mut v);
            }
        }
        join(&mut self.postings, other.postings);
        join(&mut self.suffixes, other.suffixes);
        join(&mut self.roots, other.roots);
        self
    }

    fn body(&self) -> String {
        let mut out = String::new();
        let mut line = |key: String, list: &[Posting]| {
            out.push_str(&key);
            out.push('\t');
            for (i, (s, t)) in list.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{s}:{t}");
            }
            out.push('\n');
        };
        for ((d, v), list) in &self.postings {
            line(format!("{d}={v}"), list);
        }
        for (name, list) in &self.suffixes {
            line(format!("suffix={name}"), list);
        }
        for (root, list) in &self.roots {
            line(format!("root={root}"), list);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let body = self.body();
        format!("{INDEX_HEADER}\nchecksum={}\n{body}", checksum(&body))
    }

    pub fn from_text(text: &str) -> Result<Self, FormatError> {
        let (header, rest) = text.split_once('\n').unwrap_or((text, ""));
        check_header(header, INDEX_MAGIC, "index")?;
        let (sum_line, body) = rest.split_once('\n').unwrap_or((rest, ""));
        let expected = sum_line
            .strip_prefix("checksum=")
            .ok_or(FormatError::MissingHeader("checksum"))?;
        let actual = checksum(body);
        if expected != actual {
            return Err(FormatError::Checksum {
                expected: expected.to_string(),
                actual,
            });
        }
        let mut index = FeatureIndex::default();
        for (i, line) in body.lines().enumerate() {
            let lineno = i + 3;
            let err = |column: usize, message: String| FormatError::Parse {
                line: lineno,
                column,
                message,
            };
            let (key, list) = line
                .split_once('\t')
                .ok_or_else(|| err(1, "expected key<TAB>postings".into()))?;
            let (field, value) = key
                .split_once('=')
                .ok_or_else(|| err(1, format!("malformed key `{key}`")))?;
            let column = key.chars().count() + 2;
            let mut postings = Vec::new();
            for p in list.split(',').filter(|p| !p.is_empty()) {
                let parsed = p
                    .split_once(':')
                    .and_then(|(s, t)| Some((s.parse().ok()?, t.parse().ok()?)))
                    .ok_or_else(|| err(column, format!("malformed posting `{p}`")))?;
                postings.push(parsed);
            }
            if postings.windows(2).any(|w| w[0] >= w[1]) {
                return Err(err(column, format!("postings for `{key}` are not sorted")));
            }
            let slot = match field {
                "suffix" => index.suffixes.insert(value.to_string(), postings),
                "root" => index.roots.insert(value.to_string(), postings),
                dim => {
                    let d: Dimension = dim.parse().map_err(|e| err(1, format!("{e}")))?;
                    index.postings.insert((d, value.to_string()), postings)
                }
            };
            if slot.is_some() {
                return Err(err(1, format!("duplicate key `{key}`")));
            }
        }
        Ok(index)
    }

    pub fn save(&self, path: &Path) -> Result<(), FormatError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, FormatError> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

fn checksum(body: &str) -> String {
    hex::encode(Sha256::digest(body.as_bytes()))
}

/// One posting per present feature value (an implicit nominative included),
/// per suffix and for the root of every analyzed token.
pub fn build_index(tagged: &TaggedCorpus) -> FeatureIndex {
    tagged
        .chosen
        .par_iter()
        .enumerate()
        .map(|(s, row)| {
            let mut part = FeatureIndex::default();
            for (t, bundle) in row.iter().enumerate() {
                let Some(b) = bundle else { continue };
                let at = (s as u32, t as u32);
                for d in Dimension::ALL {
                    if let Some(v) = b.effective(d) {
                        part.postings.entry((d, v.to_string())).or_default().push(at);
                    }
                }
                for name in &b.suffixes {
                    let list = part.suffixes.entry(name.clone()).or_default();
                    if list.last() != Some(&at) {
                        list.push(at);
                    }
                }
                part.roots.entry(b.root.clone()).or_default().push(at);
            }
            part
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(FeatureIndex::default(), FeatureIndex::merge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sentence;
    use crate::features::{Category, FeatureBundle};

    fn tiny() -> TaggedCorpus {
        let mut c = TaggedCorpus::default();
        let s = Sentence::new(0, "ev kesilemedi .");
        let mut kes = FeatureBundle::new("kes", Category::Verb);
        for (m, d, v) in [
            ("PASS", Dimension::Voice, "passive"),
            ("NEG-CAP", Dimension::Sense, "negative-capability"),
            ("PAST", Dimension::Aspect, "past"),
            ("3SG", Dimension::Agreement, "3sg"),
        ] {
            kes.suffixes.push(m.into());
            kes.set(d, v).unwrap();
        }
        c.push(s, vec![Some(FeatureBundle::new("ev", Category::Noun)), Some(kes), None]);
        c
    }

    #[test]
    fn postings_and_nominative() {
        let idx = build_index(&tiny());
        assert_eq!(idx.feature(Dimension::Voice, "passive"), [(0, 1)]);
        assert_eq!(idx.feature(Dimension::Case, "nominative"), [(0, 0)]);
        assert_eq!(idx.root("kes"), [(0, 1)]);
        assert_eq!(idx.suffix("3SG"), [(0, 1)]);
        assert!(build_index(&TaggedCorpus::default()).is_empty());
    }

    #[test]
    fn round_trip_and_tamper() {
        let idx = build_index(&tiny());
        let text = idx.to_text();
        let back = FeatureIndex::from_text(&text).unwrap();
        assert_eq!(back, idx);
        assert_eq!(back.to_text(), text);
        let truncated = &text[..text.len() - 5];
        assert!(matches!(FeatureIndex::from_text(truncated), Err(FormatError::Checksum { .. })));
        let v99 = text.replacen("v1", "v99", 1);
        assert!(matches!(FeatureIndex::from_text(&v99), Err(FormatError::VersionMismatch { .. })));
    }
}

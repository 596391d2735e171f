use std::collections::BTreeSet;
use std::fmt;

use crate::error::LexicalError;

use super::{BOUNDARY, NULL};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MorphemeSpan {
    pub start: usize,
    pub end: usize,
    pub name: String,
}

/// A root followed by suffixes in lexical spelling, e.g. `ev+HmHz+yA`.
///
/// Spans cover the root and each suffix; consecutive spans are separated by a
/// single `+`. Meta-phonemes (upper-case letters by convention) may only appear
/// in suffix spans. Root flags gate pairs such as `k:ğ` inside the root span.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LexicalString {
    symbols: Vec<char>,
    spans: Vec<MorphemeSpan>,
    root_flags: BTreeSet<String>,
}

fn valid_root(root: &str) -> bool {
    !root.is_empty()
        && root
            .chars()
            .all(|c| c != BOUNDARY && c != NULL && !c.is_whitespace() && !c.is_uppercase())
}

impl LexicalString {
    pub fn root(root: &str) -> Result<Self, LexicalError> {
        if !valid_root(root) {
            return Err(LexicalError::BadRoot(root.to_string()));
        }
        let symbols: Vec<char> = root.chars().collect();
        let span = MorphemeSpan {
            start: 0,
            end: symbols.len(),
            name: root.to_string(),
        };
        Ok(LexicalString {
            symbols,
            spans: vec![span],
            root_flags: BTreeSet::new(),
        })
    }

    pub fn with_flags<I, S>(mut self, flags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.root_flags.extend(flags.into_iter().map(Into::into));
        self
    }

    /// Appends a suffix. An empty form is a zero morpheme and adds nothing.
    pub fn push_suffix(&mut self, name: &str, form: &str) -> Result<(), LexicalError> {
        if form.is_empty() {
            return Ok(());
        }
        let body = form
            .strip_prefix(BOUNDARY)
            .filter(|b| !b.is_empty() && !b.contains(BOUNDARY) && !b.contains(char::is_whitespace))
            .ok_or_else(|| LexicalError::BadForm {
                name: name.to_string(),
                form: form.to_string(),
            })?;
        self.symbols.push(BOUNDARY);
        let start = self.symbols.len();
        self.symbols.extend(body.chars());
        self.spans.push(MorphemeSpan {
            start,
            end: self.symbols.len(),
            name: name.to_string(),
        });
        Ok(())
    }

    /// Parses `root+suffix+suffix`; suffix spans are named by their forms.
    pub fn parse(text: &str) -> Result<Self, LexicalError> {
        let mut parts = text.split(BOUNDARY);
        let mut lex = LexicalString::root(parts.next().unwrap_or_default())?;
        for part in parts {
            let form = format!("{BOUNDARY}{part}");
            lex.push_suffix(&form, &form)?;
        }
        Ok(lex)
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn spans(&self) -> &[MorphemeSpan] {
        &self.spans
    }

    pub fn root_len(&self) -> usize {
        self.spans[0].end
    }

    pub fn root_str(&self) -> String {
        self.symbols[..self.root_len()].iter().collect()
    }

    pub fn root_flags(&self) -> &BTreeSet<String> {
        &self.root_flags
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

impl fmt::Display for LexicalString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.symbols {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans_partition_symbols() {
        let lex = LexicalString::parse("ev+HmHz+yA").unwrap();
        assert_eq!(lex.to_string(), "ev+HmHz+yA");
        let spans = lex.spans();
        assert_eq!(spans.len(), 3);
        assert_eq!((spans[0].start, spans[0].end), (0, 2));
        assert_eq!((spans[1].start, spans[1].end), (3, 7));
        assert_eq!((spans[2].start, spans[2].end), (8, 10));
        for w in spans.windows(2) {
            assert_eq!(w[1].start, w[0].end + 1);
            assert_eq!(lex.symbols()[w[0].end], '+');
        }
    }

    #[test]
    fn zero_morpheme_adds_nothing() {
        let mut lex = LexicalString::root("kes").unwrap();
        lex.push_suffix("3SG", "").unwrap();
        assert_eq!(lex.to_string(), "kes");
        assert_eq!(lex.spans().len(), 1);
    }

    #[test]
    fn bad_roots_and_forms() {
        assert!(LexicalString::root("").is_err());
        assert!(LexicalString::root("a+b").is_err());
        assert!(LexicalString::root("evH").is_err());
        let mut lex = LexicalString::root("ev").unwrap();
        assert!(lex.push_suffix("X", "lAr").is_err());
        assert!(lex.push_suffix("X", "+").is_err());
    }
}

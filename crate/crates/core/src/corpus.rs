//! Sentences, tokenization and the tagged-corpus file format.
//!
//! ```text
//! #morfwork-tagged v1
//! 0<TAB>Evin kapısı.<TAB>Evin:ev:noun:GEN:case=genitive|kapısı:kapı:noun:3SG-POSS:possessive=3sg|.
//! ```
//!
//! Tokens without an analysis are written as the bare token. `\`, `:`, `|`,
//! `+`, `,`, `=` and tab are escaped with a backslash.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::FormatError;
use crate::features::{Category, Dimension, FeatureBundle};

pub const TAGGED_HEADER: &str = "#morfwork-tagged v1";
const TAGGED_MAGIC: &str = "#morfwork-tagged";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Token {
    pub text: String,
    /// Character offsets into the sentence text.
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn is_punctuation(&self) -> bool {
        is_punctuation(&self.text)
    }
}

pub fn is_punctuation(token: &str) -> bool {
    !token.chars().any(char::is_alphanumeric)
}

/// Whitespace-delimited tokens with leading and trailing punctuation split
/// off one character at a time.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        let end = i;
        let word = &chars[start..end];
        let Some(first_alnum) = word.iter().position(|c| c.is_alphanumeric()) else {
            for (k, c) in word.iter().enumerate() {
                out.push(Token {
                    text: c.to_string(),
                    start: start + k,
                    end: start + k + 1,
                });
            }
            continue;
        };
        let last_alnum = word.iter().rposition(|c| c.is_alphanumeric()).unwrap_or(first_alnum);
        for k in 0..first_alnum {
            out.push(Token {
                text: word[k].to_string(),
                start: start + k,
                end: start + k + 1,
            });
        }
        out.push(Token {
            text: word[first_alnum..=last_alnum].iter().collect(),
            start: start + first_alnum,
            end: start + last_alnum + 1,
        });
        for k in last_alnum + 1..word.len() {
            out.push(Token {
                text: word[k].to_string(),
                start: start + k,
                end: start + k + 1,
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    pub id: usize,
    pub text: String,
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(id: usize, text: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        Sentence { id, text, tokens }
    }
}

/// Non-empty lines of a corpus file, numbered from 0.
pub fn read_sentences(text: &str) -> Vec<Sentence> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(id, l)| Sentence::new(id, l))
        .collect()
}

/// Sentences with the chosen analysis of each token.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TaggedCorpus {
    pub sentences: Vec<Sentence>,
    /// `chosen[s][t]` belongs to `sentences[s].tokens[t]`.
    pub chosen: Vec<Vec<Option<FeatureBundle>>>,
}

impl TaggedCorpus {
    pub fn push(&mut self, sentence: Sentence, chosen: Vec<Option<FeatureBundle>>) {
        assert_eq!(sentence.tokens.len(), chosen.len(), "one analysis slot per token");
        self.sentences.push(sentence);
        self.chosen.push(chosen);
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn bundle(&self, sentence: usize, token: usize) -> Option<&FeatureBundle> {
        self.chosen.get(sentence)?.get(token)?.as_ref()
    }

    /// Every `(sentence, token, bundle)` with an analysis, in order.
    pub fn analyzed(&self) -> impl Iterator<Item = (usize, usize, &FeatureBundle)> + '_ {
        self.chosen.iter().enumerate().flat_map(|(s, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(t, b)| b.as_ref().map(|b| (s, t, b)))
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(TAGGED_HEADER);
        out.push('\n');
        for (sentence, row) in self.sentences.iter().zip(&self.chosen) {
            let _ = write!(out, "{}\t{}\t", sentence.id, escape(&sentence.text));
            let records: Vec<String> = sentence
                .tokens
                .iter()
                .zip(row)
                .map(|(tok, b)| record(&tok.text, b.as_ref()))
                .collect();
            out.push_str(&records.join("|"));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, FormatError> {
        let mut lines = text.split('\n');
        check_header(lines.next().unwrap_or(""), TAGGED_MAGIC, "tagged corpus")?;
        let mut corpus = TaggedCorpus::default();
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            if line.is_empty() {
                continue;
            }
            let fields = split_escaped(line, '\t');
            if fields.len() != 3 {
                return Err(parse_err(lineno, 1, format!("expected 3 tab-separated fields, found {}", fields.len())));
            }
            let id: usize = fields[0]
                .parse()
                .map_err(|_| parse_err(lineno, 1, format!("bad sentence id `{}`", fields[0])))?;
            if id != corpus.sentences.len() {
                return Err(parse_err(lineno, 1, format!("sentence id {id} out of sequence")));
            }
            let sentence = Sentence::new(id, unescape(&fields[1]));
            let records = if fields[2].is_empty() {
                Vec::new()
            } else {
                split_escaped(&fields[2], '|')
            };
            if records.len() != sentence.tokens.len() {
                return Err(parse_err(
                    lineno,
                    fields[0].chars().count() + fields[1].chars().count() + 3,
                    format!("{} token records for {} tokens", records.len(), sentence.tokens.len()),
                ));
            }
            let mut row = Vec::with_capacity(records.len());
            let mut column = fields[0].chars().count() + fields[1].chars().count() + 3;
            for (rec, tok) in records.iter().zip(&sentence.tokens) {
                let (token, bundle) = parse_record(rec).map_err(|m| parse_err(lineno, column, m))?;
                if token != tok.text {
                    return Err(parse_err(lineno, column, format!("record token `{token}` does not match `{}`", tok.text)));
                }
                row.push(bundle);
                column += rec.chars().count() + 1;
            }
            corpus.push(sentence, row);
        }
        Ok(corpus)
    }

    pub fn save(&self, path: &Path) -> Result<(), FormatError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, FormatError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }
}

fn parse_err(line: usize, column: usize, message: String) -> FormatError {
    FormatError::Parse { line, column, message }
}

pub(crate) fn check_header(line: &str, magic: &str, kind: &'static str) -> Result<(), FormatError> {
    let rest = line
        .strip_prefix(magic)
        .ok_or(FormatError::MissingHeader(kind))?
        .trim();
    if rest != "v1" {
        return Err(FormatError::VersionMismatch {
            kind,
            found: rest.to_string(),
        });
    }
    Ok(())
}

fn record(token: &str, bundle: Option<&FeatureBundle>) -> String {
    let Some(b) = bundle else {
        return escape(token);
    };
    let suffixes: Vec<String> = b.suffixes.iter().map(|s| escape(s)).collect();
    let features: Vec<String> = b
        .scalar_values()
        .filter(|(d, _)| *d != Dimension::Category)
        .map(|(d, v)| format!("{d}={}", escape(v)))
        .collect();
    format!(
        "{}:{}:{}:{}:{}",
        escape(token),
        escape(&b.root),
        b.category,
        suffixes.join("+"),
        features.join(",")
    )
}

fn parse_record(rec: &str) -> Result<(String, Option<FeatureBundle>), String> {
    let fields = split_escaped(rec, ':');
    match fields.len() {
        1 => return Ok((unescape(&fields[0]), None)),
        5 => {}
        n => return Err(format!("token record has {n} fields; expected 1 or 5")),
    }
    let category: Category = fields[2].parse().map_err(|e| format!("{e}"))?;
    let mut bundle = FeatureBundle::new(unescape(&fields[1]), category);
    if !fields[3].is_empty() {
        bundle.suffixes = split_escaped(&fields[3], '+').iter().map(|s| unescape(s)).collect();
    }
    if !fields[4].is_empty() {
        for kv in split_escaped(&fields[4], ',') {
            let parts = split_escaped(&kv, '=');
            let [k, v] = parts.as_slice() else {
                return Err(format!("malformed feature `{kv}`"));
            };
            let dim: Dimension = k.parse().map_err(|e| format!("{e}"))?;
            bundle.set(dim, unescape(v)).map_err(|e| e.to_string())?;
        }
    }
    Ok((unescape(&fields[0]), Some(bundle)))
}

const SPECIAL: &[char] = &['\\', ':', '|', '+', ',', '=', '\t', '\n'];

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            c if SPECIAL.contains(&c) => {
                out.push('\\');
                out.push(c);
            }
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut it = s.chars();
    while let Some(c) = it.next() {
        if c == '\\' {
            match it.next() {
                Some('t') => out.push('\t'),
                Some('n') => out.push('\n'),
                Some(n) => out.push(n),
                None => out.push('\\'),
            }
        } else {
            out.push(c);
        }
    }
    out
}

/// Splits on unescaped `sep`, leaving escapes in place.
fn split_escaped(s: &str, sep: char) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut it = s.chars();
    while let Some(c) = it.next() {
        if c == '\\' {
            let cur = out.last_mut().unwrap();
            cur.push(c);
            if let Some(n) = it.next() {
                cur.push(n);
            }
        } else if c == sep {
            out.push(String::new());
        } else {
            out.last_mut().unwrap().push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(toks: &[Token]) -> Vec<&str> {
        toks.iter().map(|t| t.text.as_str()).collect()
    }

    #[test]
    fn splits_trailing_punctuation() {
        let toks = tokenize("Kumar belasına tutuldu.");
        assert_eq!(texts(&toks), ["Kumar", "belasına", "tutuldu", "."]);
        assert_eq!((toks[1].start, toks[1].end), (6, 14));
        assert_eq!((toks[3].start, toks[3].end), (22, 23));
    }

    #[test]
    fn spans_with_extra_spaces() {
        let toks = tokenize("ev,  ev");
        assert_eq!(texts(&toks), ["ev", ",", "ev"]);
        let spans: Vec<(usize, usize)> = toks.iter().map(|t| (t.start, t.end)).collect();
        assert_eq!(spans, [(0, 2), (2, 3), (5, 7)]);
        assert!(tokenize("").is_empty());
        assert_eq!(texts(&tokenize("\"Ev!\" ...")), ["\"", "Ev", "!", "\"", ".", ".", "."]);
    }

    #[test]
    fn escaping_round_trips() {
        for s in ["a:b", "x|y+z", "back\\slash", "tab\there", "k=v,w", ""] {
            assert_eq!(unescape(&escape(s)), s);
            assert_eq!(split_escaped(&escape(s), ':').len(), 1);
        }
    }

    #[test]
    fn tagged_round_trip() {
        let mut corpus = TaggedCorpus::default();
        let s = Sentence::new(0, "Evin kapısı: \"a|b\".");
        let mut gen = FeatureBundle::new("ev", Category::Noun);
        gen.suffixes.push("GEN".into());
        gen.set(Dimension::Case, "genitive").unwrap();
        let mut row: Vec<Option<FeatureBundle>> = vec![None; s.tokens.len()];
        row[0] = Some(gen);
        row[1] = Some(FeatureBundle::new("kapı", Category::Noun));
        corpus.push(s, row);
        let text = corpus.to_text();
        let back = TaggedCorpus::from_text(&text).unwrap();
        assert_eq!(back, corpus);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn header_checks() {
        assert!(matches!(
            TaggedCorpus::from_text("#morfwork-tagged v99\n"),
            Err(FormatError::VersionMismatch { .. })
        ));
        assert!(matches!(
            TaggedCorpus::from_text("hello\n"),
            Err(FormatError::MissingHeader(_))
        ));
        assert!(matches!(
            TaggedCorpus::from_text("#morfwork-tagged v1\n0\tev\tev:ev:noun\n"),
            Err(FormatError::Parse { line: 2, .. })
        ));
        assert_eq!(TaggedCorpus::from_text("#morfwork-tagged v1\n").unwrap(), TaggedCorpus::default());
    }
}

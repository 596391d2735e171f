//! Root lexicon: a TSV of roots with category, phonological flags and a gloss.
//!
//! ```text
//! # root  category  flags               gloss
//! ayak    noun      final-stop-softens  foot
//! ```

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::LexiconError;
use crate::features::Category;
use crate::phonology::{BOUNDARY, NULL};
use crate::text::turkish_lowercase;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RootFlag {
    /// Final `k` becomes `ğ` before a vowel-initial suffix.
    FinalStopSoftens,
    /// Suffix vowels do not harmonize with the root.
    HarmonyException,
}

impl RootFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            RootFlag::FinalStopSoftens => "final-stop-softens",
            RootFlag::HarmonyException => "harmony-exception",
        }
    }
}

impl FromStr for RootFlag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "final-stop-softens" => Ok(RootFlag::FinalStopSoftens),
            "harmony-exception" => Ok(RootFlag::HarmonyException),
            _ => Err(format!("unknown flag `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootEntry {
    pub root: String,
    pub category: Category,
    pub flags: BTreeSet<RootFlag>,
    pub gloss: String,
}

impl RootEntry {
    pub fn new(
        root: impl Into<String>,
        category: Category,
        flags: impl IntoIterator<Item = RootFlag>,
        gloss: impl Into<String>,
    ) -> Result<Self, String> {
        let root = root.into();
        if root.is_empty() || root.contains(BOUNDARY) || root.contains(NULL) {
            return Err(format!("root `{root}` is empty or contains `+`/`0`"));
        }
        if turkish_lowercase(&root) != root || root.contains(char::is_whitespace) {
            return Err(format!("root `{root}` must be a lower-case word"));
        }
        let flags: BTreeSet<RootFlag> = flags.into_iter().collect();
        if flags.contains(&RootFlag::FinalStopSoftens) && !root.ends_with('k') {
            return Err(format!("`{root}` is flagged final-stop-softens but does not end in k"));
        }
        Ok(RootEntry {
            root,
            category,
            flags,
            gloss: gloss.into(),
        })
    }

    pub fn has_flag(&self, flag: RootFlag) -> bool {
        self.flags.contains(&flag)
    }

    pub fn flag_names(&self) -> BTreeSet<String> {
        self.flags.iter().map(|f| f.as_str().to_string()).collect()
    }

    /// The root as it appears before a vowel-initial suffix, if it changes.
    pub fn softened(&self) -> Option<String> {
        if !self.has_flag(RootFlag::FinalStopSoftens) {
            return None;
        }
        self.root.strip_suffix('k').map(|stem| format!("{stem}ğ"))
    }

    pub fn len_chars(&self) -> usize {
        self.root.chars().count()
    }
}

impl fmt::Display for RootEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.root, self.category)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Lexicon {
    entries: Vec<RootEntry>,
    /// Root string (and softened root string) -> entry ids.
    by_form: BTreeMap<String, Vec<usize>>,
}

impl Lexicon {
    pub fn from_entries(entries: impl IntoIterator<Item = RootEntry>) -> Result<Self, LexiconError> {
        let mut lexicon = Lexicon::default();
        for (i, e) in entries.into_iter().enumerate() {
            lexicon.insert(e, i + 1)?;
        }
        Ok(lexicon)
    }

    fn insert(&mut self, entry: RootEntry, line: usize) -> Result<(), LexiconError> {
        if self
            .entries
            .iter()
            .any(|e| e.root == entry.root && e.category == entry.category)
        {
            return Err(LexiconError::Duplicate {
                line,
                root: entry.root,
                category: entry.category.to_string(),
            });
        }
        let id = self.entries.len();
        self.by_form.entry(entry.root.clone()).or_default().push(id);
        if let Some(soft) = entry.softened() {
            self.by_form.entry(soft).or_default().push(id);
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn entries(&self) -> &[RootEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, root: &str, category: Category) -> Option<&RootEntry> {
        self.by_form
            .get(root)?
            .iter()
            .map(|&i| &self.entries[i])
            .find(|e| e.root == root && e.category == category)
    }

    pub fn lookup<'a>(&'a self, root: &'a str) -> impl Iterator<Item = &'a RootEntry> + 'a {
        self.by_form
            .get(root)
            .into_iter()
            .flatten()
            .map(|&i| &self.entries[i])
            .filter(move |e| e.root == root)
    }

    /// Entries whose root, or softened root, is a prefix of `word`; longest
    /// first, then by root and category.
    pub fn candidate_roots(&self, word: &str) -> Vec<&RootEntry> {
        let mut ids = Vec::new();
        let mut seen = HashSet::new();
        let ends = word.char_indices().map(|(i, _)| i).skip(1).chain([word.len()]);
        for end in ends {
            if let Some(found) = self.by_form.get(&word[..end]) {
                for &id in found {
                    if seen.insert(id) {
                        ids.push(id);
                    }
                }
            }
        }
        let mut out: Vec<&RootEntry> = ids.into_iter().map(|i| &self.entries[i]).collect();
        out.sort_by(|a, b| {
            b.len_chars()
                .cmp(&a.len_chars())
                .then_with(|| a.root.cmp(&b.root))
                .then_with(|| a.category.cmp(&b.category))
        });
        out
    }
}

/// Parses the lexicon TSV (`root<TAB>category<TAB>flags<TAB>gloss`).
pub fn load_lexicon(text: &str) -> Result<Lexicon, LexiconError> {
    let mut lexicon = Lexicon::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = raw.split('\t').collect();
        if cols.len() < 2 || cols.len() > 4 {
            return Err(LexiconError::Parse {
                line,
                message: format!("expected 2 to 4 tab-separated columns, found {}", cols.len()),
            });
        }
        let parse_err = |message: String| LexiconError::Parse { line, message };
        let category: Category = cols[1].trim().parse().map_err(|e| parse_err(format!("{e}")))?;
        let flags = cols
            .get(2)
            .map(|f| {
                f.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(RootFlag::from_str)
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()
            .map_err(parse_err)?
            .unwrap_or_default();
        let gloss = cols.get(3).map(|g| g.trim()).unwrap_or("");
        let entry = RootEntry::new(cols[0].trim(), category, flags, gloss).map_err(parse_err)?;
        lexicon.insert(entry, line)?;
    }
    Ok(lexicon)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "# test\nev\tnoun\t\thouse\nevin\tnoun\t\twheat germ\nayak\tnoun\tfinal-stop-softens\tfoot\nkes\tverb\t\tcut\n";

    #[test]
    fn evin_finds_both_roots_longest_first() {
        let lex = load_lexicon(SMALL).unwrap();
        let roots: Vec<String> = lex.candidate_roots("evin").iter().map(|e| e.to_string()).collect();
        assert_eq!(roots, ["evin/noun", "ev/noun"]);
    }

    #[test]
    fn softened_prefix_matches() {
        let lex = load_lexicon(SMALL).unwrap();
        let roots: Vec<&str> = lex.candidate_roots("ayağın").iter().map(|e| e.root.as_str()).collect();
        assert_eq!(roots, ["ayak"]);
        assert!(lex.candidate_roots("xyz").is_empty());
    }

    #[test]
    fn empty_file_is_empty_lexicon() {
        assert!(load_lexicon("").unwrap().is_empty());
    }

    #[test]
    fn reserved_symbol_in_root() {
        assert!(matches!(
            load_lexicon("a+b\tnoun\t\tx\n"),
            Err(LexiconError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn duplicates_rejected_but_homographs_allowed() {
        assert!(matches!(
            load_lexicon("ev\tnoun\nev\tnoun\n"),
            Err(LexiconError::Duplicate { line: 2, .. })
        ));
        let lex = load_lexicon("gül\tnoun\t\trose\ngül\tverb\t\tlaugh\n").unwrap();
        assert_eq!(lex.lookup("gül").count(), 2);
    }

    #[test]
    fn softening_flag_needs_final_k() {
        assert!(load_lexicon("masa\tnoun\tfinal-stop-softens\n").is_err());
    }
}

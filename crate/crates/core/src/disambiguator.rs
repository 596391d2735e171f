//! Choosing one parse per token from sentence context.
//!
//! Resolution runs in a fixed order: unambiguous tokens pass through, then
//! hand-written constraints narrow candidate sets, then root frequencies, then
//! an optional interactive callback. Whatever is left is flagged unresolved
//! and the first remaining candidate is chosen.
//!
//! Constraint file:
//!
//! ```text
//! CONSTRAINT GEN-before-POSS3 PRIORITY 100
//!   SELECT [TARGET: case=genitive] [suffix~3SG-POSS] ;
//! ```
//!
//! A slot is a conjunction of tests: `dim=value`, `dim!=value`, `dim=*`,
//! `dim!=*`, `root=...`, `suffix~NAME`, `suffix!~NAME`, `word="text"`. Context
//! slots are careful by default (every remaining candidate of the neighbour
//! must pass); `[ANY: ...]` only needs one.

use std::collections::HashMap;
use std::fmt;

use crate::analyzer::Parse;
use crate::error::{ConstraintError, StatsError, TagError};
use crate::features::{Dimension, FeatureBundle};
use crate::text::turkish_lowercase;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Select,
    Discard,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Test {
    Equals { field: Field, value: String, negated: bool },
    Present { field: Field, negated: bool },
    Suffix { name: String, negated: bool },
    Word(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Dim(Dimension),
    Root,
}

impl Field {
    fn read(self, bundle: &FeatureBundle) -> Option<&str> {
        match self {
            Field::Dim(d) => bundle.effective(d),
            Field::Root => Some(&bundle.root),
        }
    }
}

impl Test {
    fn is_word(&self) -> bool {
        matches!(self, Test::Word(_))
    }

    fn holds(&self, bundle: &FeatureBundle) -> bool {
        match self {
            Test::Equals { field, value, negated } => (field.read(bundle) == Some(value.as_str())) != *negated,
            Test::Present { field, negated } => field.read(bundle).is_some() != *negated,
            Test::Suffix { name, negated } => bundle.has_suffix(name) != *negated,
            Test::Word(_) => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotPattern {
    pub tests: Vec<Test>,
    /// Context slot only: one matching candidate is enough.
    pub any: bool,
}

impl SlotPattern {
    fn word_ok(&self, token: &str) -> bool {
        let folded = turkish_lowercase(token);
        self.tests.iter().all(|t| match t {
            Test::Word(w) => *w == folded,
            _ => true,
        })
    }

    fn has_feature_tests(&self) -> bool {
        self.tests.iter().any(|t| !t.is_word())
    }

    fn candidate_ok(&self, bundle: &FeatureBundle) -> bool {
        self.tests.iter().all(|t| t.holds(bundle))
    }

    fn context_ok(&self, token: &str, live: &[&Parse]) -> bool {
        if !self.word_ok(token) {
            return false;
        }
        if !self.has_feature_tests() {
            return true;
        }
        if live.is_empty() {
            return false;
        }
        if self.any {
            live.iter().any(|p| self.candidate_ok(&p.features))
        } else {
            live.iter().all(|p| self.candidate_ok(&p.features))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub priority: i64,
    pub action: Action,
    pub window: Vec<SlotPattern>,
    pub target: usize,
}

/// Parses a constraint file; the result is sorted by priority, highest first.
pub fn load_constraints(text: &str) -> Result<Vec<Constraint>, ConstraintError> {
    let mut out: Vec<(usize, Constraint)> = Vec::new();
    let mut lexer = Lexer::new(text);
    while let Some((line, tok)) = lexer.next_token()? {
        if tok != "CONSTRAINT" {
            return Err(ConstraintError::Syntax {
                line,
                message: format!("expected CONSTRAINT, found `{tok}`"),
            });
        }
        let constraint = parse_constraint(&mut lexer, line)?;
        if let Some((_, other)) = out.iter().find(|(_, c)| c.priority == constraint.priority) {
            return Err(ConstraintError::DuplicatePriority {
                line,
                priority: constraint.priority,
                other: other.name.clone(),
            });
        }
        if out.iter().any(|(_, c)| c.name == constraint.name) {
            return Err(ConstraintError::Syntax {
                line,
                message: format!("constraint `{}` defined twice", constraint.name),
            });
        }
        out.push((line, constraint));
    }
    let mut constraints: Vec<Constraint> = out.into_iter().map(|(_, c)| c).collect();
    constraints.sort_by(|a, b| b.priority.cmp(&a.priority));
    Ok(constraints)
}

fn parse_constraint(lexer: &mut Lexer<'_>, start: usize) -> Result<Constraint, ConstraintError> {
    let err = |line: usize, message: String| ConstraintError::Syntax { line, message };
    let (line, name) = lexer.expect("constraint name", start)?;
    if name.starts_with('[') || name == ";" {
        return Err(err(line, "missing constraint name".into()));
    }
    let (line, kw) = lexer.expect("PRIORITY", line)?;
    if kw != "PRIORITY" {
        return Err(err(line, format!("expected PRIORITY, found `{kw}`")));
    }
    let (line, prio) = lexer.expect("priority", line)?;
    let priority: i64 = prio
        .parse()
        .map_err(|_| err(line, format!("priority must be an integer, found `{prio}`")))?;
    let (line, act) = lexer.expect("SELECT or DISCARD", line)?;
    let action = match act.as_str() {
        "SELECT" => Action::Select,
        "DISCARD" => Action::Discard,
        other => return Err(err(line, format!("expected SELECT or DISCARD, found `{other}`"))),
    };
    let mut window = Vec::new();
    let mut target = None;
    let mut last = line;
    loop {
        let (line, tok) = lexer.expect("`[` or `;`", last)?;
        last = line;
        if tok == ";" {
            break;
        }
        if tok != "[" {
            return Err(err(line, format!("expected `[` or `;`, found `{tok}`")));
        }
        let mut tests = Vec::new();
        let mut is_target = false;
        let mut any = false;
        loop {
            let (line, tok) = lexer.expect("`]`", last)?;
            last = line;
            match tok.as_str() {
                "]" => break,
                "TARGET:" if tests.is_empty() && !is_target && !any => is_target = true,
                "ANY:" if tests.is_empty() && !is_target && !any => any = true,
                _ => tests.push(parse_test(&tok).map_err(|m| err(line, m))?),
            }
        }
        if is_target {
            if target.is_some() {
                return Err(err(last, "more than one TARGET slot".into()));
            }
            target = Some(window.len());
        }
        window.push(SlotPattern { tests, any });
    }
    let target = target.ok_or_else(|| err(last, "no TARGET slot".into()))?;
    if window.len() > 3 {
        return Err(err(last, format!("window has {} slots; at most 3 allowed", window.len())));
    }
    Ok(Constraint {
        name,
        priority,
        action,
        window,
        target,
    })
}

fn parse_test(tok: &str) -> Result<Test, String> {
    if let Some(rest) = tok.strip_prefix("word=") {
        let w = rest
            .strip_prefix('"')
            .and_then(|r| r.strip_suffix('"'))
            .filter(|w| !w.is_empty())
            .ok_or_else(|| format!("word test needs a quoted word, found `{tok}`"))?;
        return Ok(Test::Word(turkish_lowercase(w)));
    }
    if let Some((neg, name)) = tok
        .split_once("!~")
        .map(|(k, v)| (true, (k, v)))
        .or_else(|| tok.split_once('~').map(|(k, v)| (false, (k, v))))
    {
        if name.0 != "suffix" || name.1.is_empty() {
            return Err(format!("`~` only applies to suffix, found `{tok}`"));
        }
        return Ok(Test::Suffix {
            name: name.1.to_string(),
            negated: neg,
        });
    }
    let (negated, key, value) = if let Some((k, v)) = tok.split_once("!=") {
        (true, k, v)
    } else if let Some((k, v)) = tok.split_once('=') {
        (false, k, v)
    } else {
        return Err(format!("malformed test `{tok}`"));
    };
    let field = if key == "root" {
        Field::Root
    } else {
        Field::Dim(key.parse().map_err(|_| format!("unknown feature `{key}`"))?)
    };
    if value.is_empty() {
        return Err(format!("empty value in `{tok}`"));
    }
    Ok(if value == "*" {
        Test::Present { field, negated }
    } else {
        Test::Equals {
            field,
            value: value.to_string(),
            negated,
        }
    })
}

/// Splits on whitespace, treats `[`, `]` and `;` as separate tokens (outside
/// quotes), and skips `#` comments.
struct Lexer<'a> {
    lines: Vec<&'a str>,
    line: usize,
    pending: Vec<String>,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            lines: text.lines().collect(),
            line: 0,
            pending: Vec::new(),
        }
    }

    fn next_token(&mut self) -> Result<Option<(usize, String)>, ConstraintError> {
        while self.pending.is_empty() {
            if self.line >= self.lines.len() {
                return Ok(None);
            }
            let raw = self.lines[self.line];
            self.line += 1;
            self.pending = split_line(raw).map_err(|message| ConstraintError::Syntax {
                line: self.line,
                message,
            })?;
            self.pending.reverse();
        }
        Ok(self.pending.pop().map(|t| (self.line, t)))
    }

    fn expect(&mut self, what: &str, line: usize) -> Result<(usize, String), ConstraintError> {
        self.next_token()?.ok_or_else(|| ConstraintError::Syntax {
            line,
            message: format!("unexpected end of file, expected {what}"),
        })
    }
}

fn split_line(raw: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for c in raw.chars() {
        match c {
            '"' => {
                quoted = !quoted;
                cur.push(c);
            }
            _ if quoted => cur.push(c),
            '#' => break,
            '[' | ']' | ';' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(c.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            _ => cur.push(c),
        }
    }
    if quoted {
        return Err("unterminated quote".into());
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    Ok(out)
}

/// Root occurrence counts from previously tagged text.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RootStats {
    counts: HashMap<String, u64>,
}

impl RootStats {
    pub fn count(&self, root: &str) -> u64 {
        self.counts.get(root).copied().unwrap_or(0)
    }

    pub fn insert(&mut self, root: impl Into<String>, count: u64) {
        self.counts.insert(root.into(), count);
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Reads `root<TAB>count` lines.
pub fn load_stats(text: &str) -> Result<RootStats, StatsError> {
    let mut stats = RootStats::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let (root, count) = raw.split_once('\t').ok_or_else(|| StatsError::Parse {
            line,
            message: "expected root<TAB>count".into(),
        })?;
        let count: u64 = count.trim().parse().map_err(|_| StatsError::Parse {
            line,
            message: format!("count must be a non-negative integer, found `{}`", count.trim()),
        })?;
        let root = root.trim();
        if root.is_empty() {
            return Err(StatsError::Parse {
                line,
                message: "empty root".into(),
            });
        }
        stats.insert(root, count);
    }
    Ok(stats)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ResolvedBy {
    Unambiguous,
    Constraint(String),
    Statistics,
    Interactive,
    Unresolved,
}

impl fmt::Display for ResolvedBy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResolvedBy::Unambiguous => f.write_str("unambiguous"),
            ResolvedBy::Constraint(name) => write!(f, "constraint:{name}"),
            ResolvedBy::Statistics => f.write_str("statistics"),
            ResolvedBy::Interactive => f.write_str("interactive"),
            ResolvedBy::Unresolved => f.write_str("unresolved"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenAnalysis {
    pub token: String,
    pub candidates: Vec<Parse>,
    /// Index into `candidates`; absent for tokens with no analysis.
    pub chosen: Option<usize>,
    /// Absent for tokens with no analysis (punctuation, unknown words).
    pub resolved_by: Option<ResolvedBy>,
}

impl TokenAnalysis {
    pub fn chosen_parse(&self) -> Option<&Parse> {
        self.chosen.map(|i| &self.candidates[i])
    }
}

/// Asked to pick among `candidates` for `tokens[index]`; returns an index
/// into `candidates`.
pub type Chooser<'a> = dyn FnMut(&[String], usize, &[Parse]) -> usize + 'a;

/// Resolves every token of one sentence. `candidates[i]` must hold the parses
/// of `tokens[i]` (empty for punctuation and unknown words).
pub fn tag_sentence(
    tokens: &[String],
    candidates: Vec<Vec<Parse>>,
    constraints: &[Constraint],
    stats: &RootStats,
    mut chooser: Option<&mut Chooser<'_>>,
) -> Result<Vec<TokenAnalysis>, TagError> {
    assert_eq!(tokens.len(), candidates.len(), "one candidate list per token");
    let mut live: Vec<Vec<usize>> = candidates.iter().map(|c| (0..c.len()).collect()).collect();
    let mut by: Vec<Option<ResolvedBy>> = candidates
        .iter()
        .map(|c| (c.len() == 1).then_some(ResolvedBy::Unambiguous))
        .collect();

    // Constraints, repeated until nothing changes: a later decision can
    // satisfy the careful context of an earlier constraint.
    loop {
        let mut changed = false;
        for c in constraints {
            for i in 0..tokens.len() {
                if live[i].len() < 2 {
                    continue;
                }
                if let Some(kept) = apply_constraint(c, i, tokens, &candidates, &live) {
                    changed = true;
                    live[i] = kept;
                    if live[i].len() == 1 {
                        by[i] = Some(ResolvedBy::Constraint(c.name.clone()));
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    for i in 0..tokens.len() {
        if live[i].len() < 2 {
            continue;
        }
        if let Some(kept) = by_root_frequency(&candidates[i], &live[i], stats) {
            live[i] = kept;
            if live[i].len() == 1 {
                by[i] = Some(ResolvedBy::Statistics);
            }
        }
    }

    let mut out = Vec::with_capacity(tokens.len());
    for (i, cands) in candidates.into_iter().enumerate() {
        let (chosen, resolved_by) = if cands.is_empty() {
            (None, None)
        } else if live[i].len() == 1 {
            (Some(live[i][0]), by[i].clone())
        } else if let Some(choose) = chooser.as_deref_mut() {
            let remaining: Vec<Parse> = live[i].iter().map(|&k| cands[k].clone()).collect();
            let pick = choose(tokens, i, &remaining);
            if pick >= remaining.len() {
                return Err(TagError::BadChoice {
                    token: tokens[i].clone(),
                    choice: pick,
                    candidates: remaining.len(),
                });
            }
            (Some(live[i][pick]), Some(ResolvedBy::Interactive))
        } else {
            (Some(live[i][0]), Some(ResolvedBy::Unresolved))
        };
        out.push(TokenAnalysis {
            token: tokens[i].clone(),
            candidates: cands,
            chosen,
            resolved_by,
        });
    }
    Ok(out)
}

/// New live set for token `i` if `c` fires there. `live[j]` indexes the
/// candidates of token `j` still in play.
pub fn apply_constraint(
    c: &Constraint,
    i: usize,
    tokens: &[String],
    candidates: &[Vec<Parse>],
    live: &[Vec<usize>],
) -> Option<Vec<usize>> {
    let first = i.checked_sub(c.target)?;
    if first + c.window.len() > tokens.len() {
        return None;
    }
    for (k, slot) in c.window.iter().enumerate() {
        let j = first + k;
        if j == i {
            continue;
        }
        let parses: Vec<&Parse> = live[j].iter().map(|&x| &candidates[j][x]).collect();
        if !slot.context_ok(&tokens[j], &parses) {
            return None;
        }
    }
    let target = &c.window[c.target];
    let word_ok = target.word_ok(&tokens[i]);
    let matches = |x: &usize| word_ok && target.candidate_ok(&candidates[i][*x].features);
    let kept: Vec<usize> = match c.action {
        Action::Select => live[i].iter().copied().filter(matches).collect(),
        Action::Discard => live[i].iter().copied().filter(|x| !matches(x)).collect(),
    };
    (!kept.is_empty() && kept.len() < live[i].len()).then_some(kept)
}

/// Keeps the candidates of the most frequent root, if the live candidates
/// disagree on the root and any of them has been seen before.
fn by_root_frequency(cands: &[Parse], live: &[usize], stats: &RootStats) -> Option<Vec<usize>> {
    let mut roots: Vec<&str> = Vec::new();
    for &k in live {
        let r = cands[k].root.root.as_str();
        if !roots.contains(&r) {
            roots.push(r);
        }
    }
    if roots.len() < 2 {
        return None;
    }
    let best = roots
        .iter()
        .copied()
        .fold(None::<(&str, u64)>, |acc, r| {
            let n = stats.count(r);
            match acc {
                Some((_, m)) if m >= n => acc,
                _ => Some((r, n)),
            }
        })?;
    if best.1 == 0 {
        return None;
    }
    Some(live.iter().copied().filter(|&k| cands[k].root.root == best.0).collect())
}

/// Per-category token counts for a tagging run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TagReport {
    pub sentences: usize,
    /// Tokens with at least one parse.
    pub analyzed: usize,
    pub punctuation: usize,
    pub unknown: usize,
    pub unambiguous: usize,
    pub by_constraint: usize,
    pub by_statistics: usize,
    pub interactive: usize,
    pub unresolved: usize,
}

impl TagReport {
    pub fn add(&mut self, analysis: &TokenAnalysis, is_punctuation: bool) {
        match &analysis.resolved_by {
            None if is_punctuation => self.punctuation += 1,
            None => self.unknown += 1,
            Some(r) => {
                self.analyzed += 1;
                match r {
                    ResolvedBy::Unambiguous => self.unambiguous += 1,
                    ResolvedBy::Constraint(_) => self.by_constraint += 1,
                    ResolvedBy::Statistics => self.by_statistics += 1,
                    ResolvedBy::Interactive => self.interactive += 1,
                    ResolvedBy::Unresolved => self.unresolved += 1,
                }
            }
        }
    }

    /// Share of analyzed tokens left unresolved; 0 when nothing was analyzed.
    pub fn unresolved_rate(&self) -> f64 {
        if self.analyzed == 0 {
            0.0
        } else {
            self.unresolved as f64 / self.analyzed as f64
        }
    }
}

impl fmt::Display for TagReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sentences    {}", self.sentences)?;
        writeln!(f, "analyzed     {}", self.analyzed)?;
        writeln!(f, "unambiguous  {}", self.unambiguous)?;
        writeln!(f, "constraint   {}", self.by_constraint)?;
        writeln!(f, "statistics   {}", self.by_statistics)?;
        writeln!(f, "interactive  {}", self.interactive)?;
        writeln!(f, "unresolved   {}", self.unresolved)?;
        writeln!(f, "unknown      {}", self.unknown)?;
        writeln!(f, "punctuation  {}", self.punctuation)?;
        write!(f, "residual ambiguity {:.1}%", self.unresolved_rate() * 100.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_sorts_by_priority() {
        let cs = load_constraints(
            "# two rules\n\
             CONSTRAINT low PRIORITY 1 DISCARD [TARGET: category=adjective] ;\n\
             CONSTRAINT high PRIORITY 9\n  SELECT [word=\"senin\"] [TARGET: possessive=2sg suffix!~GEN] [ANY: voice!=*] ;\n",
        )
        .unwrap();
        assert_eq!(cs.iter().map(|c| c.name.as_str()).collect::<Vec<_>>(), ["high", "low"]);
        assert_eq!(cs[0].target, 1);
        assert_eq!(cs[0].window.len(), 3);
        assert!(cs[0].window[2].any);
        assert_eq!(cs[0].window[0].tests, [Test::Word("senin".into())]);
    }

    #[test]
    fn empty_file_gives_no_constraints() {
        assert!(load_constraints("").unwrap().is_empty());
        assert!(load_constraints("# only a comment\n").unwrap().is_empty());
    }

    #[test]
    fn duplicate_priority_rejected() {
        let err = load_constraints(
            "CONSTRAINT a PRIORITY 5 SELECT [TARGET: case=genitive] ;\nCONSTRAINT b PRIORITY 5 SELECT [TARGET: case=dative] ;\n",
        )
        .unwrap_err();
        assert_eq!(
            err,
            ConstraintError::DuplicatePriority {
                line: 2,
                priority: 5,
                other: "a".into()
            }
        );
    }

    #[test]
    fn window_rules() {
        assert!(load_constraints("CONSTRAINT a PRIORITY 1 SELECT [case=genitive] ;").is_err());
        assert!(load_constraints(
            "CONSTRAINT a PRIORITY 1 SELECT [TARGET: case=genitive] [TARGET: case=dative] ;"
        )
        .is_err());
        assert!(load_constraints("CONSTRAINT a PRIORITY 1 SELECT [] [TARGET: case=genitive] [] [] ;").is_err());
        assert!(load_constraints("CONSTRAINT a PRIORITY 1 SELECT [TARGET: mood=x] ;").is_err());
        assert!(load_constraints("CONSTRAINT a PRIORITY x SELECT [TARGET: case=genitive] ;").is_err());
    }

    #[test]
    fn stats_file() {
        let s = load_stats("# root\tcount\nev\t40\nevin\t1\n").unwrap();
        assert_eq!(s.count("ev"), 40);
        assert_eq!(s.count("masa"), 0);
        assert!(load_stats("ev\t-3\n").is_err());
        assert!(load_stats("ev 3\n").is_err());
    }
}

//! Parser for the two-level rule DSL.
//!
//! ```text
//! # comment
//! ALPHABET
//! SYMBOLS a b c ...
//! Vowel = a e ı i o ö u ü          # class (multi-letter name)
//! H = ı i u ü                      # meta-phoneme (single-letter name)
//! PAIRS +:0 H:0 y:0                # extra feasible pairs
//! GATE final-stop-softens k:ğ      # pair usable only in roots carrying the flag
//! END
//! R1: H:0 <=> :Vowel +:0 _ ;
//! ```
//!
//! Identity pairs for every symbol and one pair per meta-phoneme realization
//! are feasible implicitly. Context atoms are `lex:surf`, `lex:`, `:surf` or a
//! bare `lex` (any surface); each side names a symbol or a class. `.#.` is the
//! word edge; `*`, `?`, `|` and parentheses build regular patterns.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::error::RuleFileError;

use super::{Alphabet, Pattern, RuleOperator, RuleSet, SideSpec, SymbolPair, TwoLevelRule, BOUNDARY, NULL};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Colon,
    Semi,
    Target,
    LParen,
    RParen,
    Bar,
    Star,
    Question,
    Equals,
    Edge,
    Op(RuleOperator),
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> RuleFileError {
    RuleFileError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

const SPECIAL: &[char] = &['(', ')', '|', '*', '?', ';', ':', '_', '=', '<', '>', '/', '#'];

fn tokenize_line(text: &str, line: usize) -> Result<Vec<Spanned>, RuleFileError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let mut push = |tok, width: usize, i: &mut usize| {
            out.push(Spanned { tok, line, column });
            *i += width;
        };
        if c.is_whitespace() {
            i += 1;
        } else if rest.starts_with(".#.") {
            push(Tok::Edge, 3, &mut i);
        } else if c == '#' {
            break;
        } else if rest.starts_with("<=>") {
            push(Tok::Op(RuleOperator::Composite), 3, &mut i);
        } else if rest.starts_with("/<=") {
            push(Tok::Op(RuleOperator::Exclusion), 3, &mut i);
        } else if rest.starts_with("<=") {
            push(Tok::Op(RuleOperator::SurfaceCoercion), 2, &mut i);
        } else if rest.starts_with("=>") {
            push(Tok::Op(RuleOperator::ContextRestriction), 2, &mut i);
        } else {
            let simple = match c {
                ':' => Some(Tok::Colon),
                ';' => Some(Tok::Semi),
                '_' => Some(Tok::Target),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '|' => Some(Tok::Bar),
                '*' => Some(Tok::Star),
                '?' => Some(Tok::Question),
                '=' => Some(Tok::Equals),
                _ => None,
            };
            if let Some(tok) = simple {
                push(tok, 1, &mut i);
            } else if SPECIAL.contains(&c) {
                return Err(syntax(line, column, format!("unexpected `{c}`")));
            } else {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() && !SPECIAL.contains(&chars[i]) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                out.push(Spanned {
                    tok: Tok::Ident(word),
                    line,
                    column,
                });
            }
        }
    }
    Ok(out)
}

fn single_char(s: &str) -> Option<char> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Some(c),
        _ => None,
    }
}

#[derive(Default)]
struct AlphabetBuilder {
    symbols: BTreeSet<char>,
    classes: BTreeMap<String, BTreeSet<char>>,
    meta: BTreeMap<char, Vec<char>>,
    pairs: Vec<SymbolPair>,
    gates: Vec<(String, SymbolPair)>,
}

impl AlphabetBuilder {
    fn known_symbol(&self, c: char) -> bool {
        c == NULL || c == BOUNDARY || self.symbols.contains(&c) || self.meta.contains_key(&c)
    }

    fn symbol(&self, s: &Spanned) -> Result<char, RuleFileError> {
        match &s.tok {
            Tok::Ident(w) => match single_char(w) {
                Some(c) if self.known_symbol(c) => Ok(c),
                _ => Err(RuleFileError::Undeclared {
                    line: s.line,
                    column: s.column,
                    name: w.clone(),
                }),
            },
            other => Err(syntax(s.line, s.column, format!("expected a symbol, found {other:?}"))),
        }
    }

    fn pair_list(&self, toks: &[Spanned]) -> Result<Vec<SymbolPair>, RuleFileError> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < toks.len() {
            let lex = self.symbol(&toks[i])?;
            if toks.get(i + 1).map(|t| &t.tok) != Some(&Tok::Colon) {
                return Err(syntax(toks[i].line, toks[i].column, "expected `lexical:surface`"));
            }
            let surf_tok = toks
                .get(i + 2)
                .ok_or_else(|| syntax(toks[i].line, toks[i].column, "incomplete pair"))?;
            let surf = self.symbol(surf_tok)?;
            let pair = SymbolPair::new(lex, surf).ok_or_else(|| {
                syntax(toks[i].line, toks[i].column, format!("`{lex}:{surf}` is not a valid pair"))
            })?;
            if lex == NULL {
                return Err(syntax(
                    toks[i].line,
                    toks[i].column,
                    "epenthesis pairs (0:x) are not supported",
                ));
            }
            out.push(pair);
            i += 3;
        }
        Ok(out)
    }

    fn declaration(&mut self, toks: &[Spanned]) -> Result<(), RuleFileError> {
        let head = &toks[0];
        let word = match &head.tok {
            Tok::Ident(w) => w.clone(),
            other => return Err(syntax(head.line, head.column, format!("unexpected {other:?}"))),
        };
        match word.as_str() {
            "SYMBOLS" => {
                for t in &toks[1..] {
                    match &t.tok {
                        Tok::Ident(w) => {
                            let c = single_char(w).ok_or_else(|| {
                                syntax(t.line, t.column, format!("symbol `{w}` must be one character"))
                            })?;
                            if c == NULL || c == BOUNDARY {
                                return Err(syntax(t.line, t.column, "`0` and `+` are built in"));
                            }
                            self.symbols.insert(c);
                        }
                        other => return Err(syntax(t.line, t.column, format!("unexpected {other:?}"))),
                    }
                }
            }
            "PAIRS" => {
                let pairs = self.pair_list(&toks[1..])?;
                self.pairs.extend(pairs);
            }
            "GATE" => {
                let flag = match toks.get(1).map(|t| &t.tok) {
                    Some(Tok::Ident(f)) => f.clone(),
                    _ => return Err(syntax(head.line, head.column, "GATE needs a flag name")),
                };
                for p in self.pair_list(&toks[2..])? {
                    self.gates.push((flag.clone(), p));
                }
            }
            _ => {
                if toks.get(1).map(|t| &t.tok) != Some(&Tok::Equals) {
                    return Err(syntax(head.line, head.column, format!("unknown declaration `{word}`")));
                }
                let mut members = Vec::new();
                for t in &toks[2..] {
                    members.push(self.symbol(t)?);
                }
                if members.is_empty() {
                    return Err(syntax(head.line, head.column, format!("`{word}` has no members")));
                }
                match single_char(&word) {
                    Some(m) => {
                        if self.symbols.contains(&m) {
                            return Err(syntax(head.line, head.column, format!("`{m}` is already a symbol")));
                        }
                        self.meta.insert(m, members);
                    }
                    None => {
                        self.classes.insert(word, members.into_iter().collect());
                    }
                }
            }
        }
        Ok(())
    }
}

struct RuleParser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    alphabet: &'a Alphabet,
    last_line: usize,
}

impl<'a> RuleParser<'a> {
    fn peek(&self) -> Option<&'a Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<&'a Spanned, RuleFileError> {
        let t = self
            .toks
            .get(self.pos)
            .ok_or_else(|| syntax(self.last_line, 1, "unexpected end of file"))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<&'a Spanned, RuleFileError> {
        let t = self.next()?;
        if &t.tok != want {
            return Err(syntax(t.line, t.column, format!("expected {what}")));
        }
        Ok(t)
    }

    fn side(&self, t: &Spanned, name: &str) -> Result<SideSpec, RuleFileError> {
        if self.alphabet.class(name).is_some() {
            return Ok(SideSpec::Class(name.to_string()));
        }
        match single_char(name) {
            Some(c)
                if c == NULL
                    || c == BOUNDARY
                    || self.alphabet.symbols().contains(&c)
                    || self.alphabet.is_meta(c) =>
            {
                Ok(SideSpec::Symbol(c))
            }
            _ => Err(RuleFileError::Undeclared {
                line: t.line,
                column: t.column,
                name: name.to_string(),
            }),
        }
    }

    fn rule_symbol(&mut self) -> Result<char, RuleFileError> {
        let t = self.next()?;
        match &t.tok {
            Tok::Ident(w) => match self.side(t, w)? {
                SideSpec::Symbol(c) => Ok(c),
                _ => Err(syntax(t.line, t.column, "a rule pair must use symbols, not classes")),
            },
            _ => Err(syntax(t.line, t.column, "expected a symbol")),
        }
    }

    fn rule(&mut self) -> Result<(TwoLevelRule, usize), RuleFileError> {
        let head = self.next()?;
        let name = match &head.tok {
            Tok::Ident(n) => n.clone(),
            _ => return Err(syntax(head.line, head.column, "expected a rule name")),
        };
        self.expect(&Tok::Colon, "`:` after the rule name")?;
        let lexical = self.rule_symbol()?;
        self.expect(&Tok::Colon, "`lexical:surface`")?;
        let surface = self.rule_symbol()?;
        let pair = SymbolPair::new(lexical, surface)
            .ok_or_else(|| syntax(head.line, head.column, format!("`{lexical}:{surface}` is not a valid pair")))?;
        let op_tok = self.next()?;
        let operator = match op_tok.tok {
            Tok::Op(op) => op,
            _ => return Err(syntax(op_tok.line, op_tok.column, "expected one of => <= <=> /<=")),
        };
        let left = self.alternation()?;
        self.expect(&Tok::Target, "`_` marking the rule position")?;
        let right = self.alternation()?;
        self.expect(&Tok::Semi, "`;` ending the rule")?;
        if !self.alphabet.is_feasible(pair) {
            return Err(RuleFileError::InfeasiblePair {
                line: head.line,
                rule: name,
                pair: pair.to_string(),
            });
        }
        Ok((
            TwoLevelRule {
                name,
                pair,
                operator,
                left,
                right,
            },
            head.line,
        ))
    }

    fn alternation(&mut self) -> Result<Pattern, RuleFileError> {
        let mut branches = vec![self.sequence()?];
        while matches!(self.peek().map(|t| &t.tok), Some(Tok::Bar)) {
            self.pos += 1;
            branches.push(self.sequence()?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().unwrap()
        } else {
            Pattern::Alt(branches)
        })
    }

    fn sequence(&mut self) -> Result<Pattern, RuleFileError> {
        let mut items = Vec::new();
        while let Some(t) = self.peek() {
            match t.tok {
                Tok::Target | Tok::Semi | Tok::RParen | Tok::Bar => break,
                _ => items.push(self.postfix()?),
            }
        }
        Ok(match items.len() {
            0 => Pattern::Empty,
            1 => items.pop().unwrap(),
            _ => Pattern::Seq(items),
        })
    }

    fn postfix(&mut self) -> Result<Pattern, RuleFileError> {
        let mut p = self.primary()?;
        loop {
            match self.peek().map(|t| &t.tok) {
                Some(Tok::Star) => {
                    self.pos += 1;
                    p = Pattern::Star(Box::new(p));
                }
                Some(Tok::Question) => {
                    self.pos += 1;
                    p = Pattern::Optional(Box::new(p));
                }
                _ => return Ok(p),
            }
        }
    }

    fn primary(&mut self) -> Result<Pattern, RuleFileError> {
        let t = self.next()?;
        match &t.tok {
            Tok::LParen => {
                let inner = self.alternation()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Edge => Ok(Pattern::Edge),
            Tok::Colon => {
                let surface = self.surface_side()?;
                Ok(Pattern::Atom {
                    lexical: SideSpec::Any,
                    surface,
                })
            }
            Tok::Ident(w) => {
                let lexical = self.side(t, w)?;
                if matches!(self.peek().map(|t| &t.tok), Some(Tok::Colon)) {
                    self.pos += 1;
                    let surface = self.surface_side()?;
                    Ok(Pattern::Atom { lexical, surface })
                } else {
                    Ok(Pattern::Atom {
                        lexical,
                        surface: SideSpec::Any,
                    })
                }
            }
            other => Err(syntax(t.line, t.column, format!("unexpected {other:?} in context"))),
        }
    }

    fn surface_side(&mut self) -> Result<SideSpec, RuleFileError> {
        match self.peek() {
            Some(t) => match &t.tok {
                Tok::Ident(w) => {
                    self.pos += 1;
                    self.side(t, w)
                }
                _ => Ok(SideSpec::Any),
            },
            None => Ok(SideSpec::Any),
        }
    }
}

/// Parses a rule document into its alphabet and rules.
pub fn parse_rule_file(text: &str) -> Result<RuleSet, RuleFileError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut builder = AlphabetBuilder::default();

    let mut found = false;
    for (n, line) in lines.by_ref() {
        let toks = tokenize_line(line, n)?;
        if toks.is_empty() {
            continue;
        }
        if toks.len() == 1 && toks[0].tok == Tok::Ident("ALPHABET".into()) {
            found = true;
            break;
        }
        return Err(RuleFileError::NoAlphabet);
    }
    if !found {
        return Err(RuleFileError::NoAlphabet);
    }

    let mut closed = false;
    let mut last_line = 0;
    for (n, line) in lines.by_ref() {
        last_line = n;
        let toks = tokenize_line(line, n)?;
        if toks.is_empty() {
            continue;
        }
        if toks.len() == 1 && toks[0].tok == Tok::Ident("END".into()) {
            closed = true;
            break;
        }
        builder.declaration(&toks)?;
    }
    if !closed {
        return Err(syntax(last_line.max(1), 1, "ALPHABET block is missing END"));
    }

    let alphabet = Alphabet::new(
        builder.symbols,
        builder.classes,
        builder.meta,
        builder.pairs,
        builder.gates,
    );

    let mut toks = Vec::new();
    for (n, line) in lines {
        last_line = n;
        toks.extend(tokenize_line(line, n)?);
    }

    let mut parser = RuleParser {
        toks: &toks,
        pos: 0,
        alphabet: &alphabet,
        last_line,
    };
    let mut rules = Vec::new();
    let mut names = HashSet::new();
    while parser.peek().is_some() {
        let (rule, line) = parser.rule()?;
        if !names.insert(rule.name.clone()) {
            return Err(RuleFileError::DuplicateRule {
                line,
                name: rule.name,
            });
        }
        rules.push(rule);
    }
    Ok(RuleSet { alphabet, rules })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "ALPHABET\nSYMBOLS a e ı i o ö u ü m z y v\nVowel = a e ı i o ö u ü\nH = ı i u ü\nPAIRS +:0 H:0\nEND\n";

    #[test]
    fn composite_rule_echoes() {
        let doc = format!("{HEADER}R1: H:0 <=> Vowel:Vowel +:0 _ ;\n");
        let set = parse_rule_file(&doc).unwrap();
        assert_eq!(set.rules.len(), 1);
        let r = &set.rules[0];
        assert_eq!(r.name, "R1");
        assert_eq!(r.operator, RuleOperator::Composite);
        assert_eq!(r.to_string(), "R1: H:0 <=> Vowel:Vowel +:0 _ ;");
    }

    #[test]
    fn empty_document_has_no_alphabet() {
        assert_eq!(parse_rule_file(""), Err(RuleFileError::NoAlphabet));
        assert_eq!(parse_rule_file("# only a comment\n"), Err(RuleFileError::NoAlphabet));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let doc = format!("{HEADER}R1: H:0 <=> :Vowel +:0 ;\n");
        match parse_rule_file(&doc) {
            Err(RuleFileError::Syntax { line, column, .. }) => {
                assert_eq!(line, 7);
                assert_eq!(column, 24);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn undeclared_class_is_reported() {
        let doc = format!("{HEADER}R1: H:0 <=> :Vowl +:0 _ ;\n");
        match parse_rule_file(&doc) {
            Err(RuleFileError::Undeclared { name, line, column }) => {
                assert_eq!(name, "Vowl");
                assert_eq!((line, column), (7, 14));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_rule_names_rejected() {
        let doc = format!("{HEADER}R1: H:0 <=> :Vowel +:0 _ ;\nR1: H:i => _ ;\n");
        assert!(matches!(
            parse_rule_file(&doc),
            Err(RuleFileError::DuplicateRule { line: 8, .. })
        ));
    }

    #[test]
    fn infeasible_rule_pair_rejected() {
        let doc = format!("{HEADER}R1: H:a => _ ;\n");
        assert!(matches!(parse_rule_file(&doc), Err(RuleFileError::InfeasiblePair { .. })));
    }

    #[test]
    fn patterns_with_groups_and_edges() {
        let doc = format!("{HEADER}R2: H:u => (:o | :u) (:m | :0)* _ (:z)? .#. ;\n");
        let set = parse_rule_file(&doc).unwrap();
        let r = &set.rules[0];
        assert_eq!(r.to_string(), "R2: H:u => (:o | :u) (:m | :0)* _ :z? .#. ;");
    }

    #[test]
    fn gates_and_meta() {
        let doc = "ALPHABET\nSYMBOLS k ğ a\nPAIRS +:0\nGATE soft k:ğ\nEND\n";
        let set = parse_rule_file(doc).unwrap();
        let p = SymbolPair::new('k', 'ğ').unwrap();
        assert!(set.alphabet.is_feasible(p));
        assert_eq!(set.alphabet.gate(p), Some("soft"));
        assert_eq!(set.alphabet.gate(SymbolPair::new('k', 'k').unwrap()), None);
    }
}

use std::fmt;

use super::automaton::Dfa;
use super::{Alphabet, TwoLevelRule};

/// Longest left or right context explored when looking for an overlap.
pub const CONFLICT_WINDOW: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictDiagnostic {
    pub first: String,
    pub second: String,
    pub lexical: char,
    pub surfaces: (char, char),
}

impl fmt::Display for ConflictDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rules `{}` and `{}` both coerce lexical `{}` (to `{}` and `{}`) in overlapping contexts",
            self.first, self.second, self.lexical, self.surfaces.0, self.surfaces.1
        )
    }
}

/// Finds pairs of surface-coercion rules that force different realizations of
/// the same lexical symbol where both contexts can hold at once.
///
/// Approximate: contexts are only compared on inputs of up to
/// [`CONFLICT_WINDOW`] pair symbols on each side.
pub fn check_rule_conflicts(alphabet: &Alphabet, rules: &[TwoLevelRule]) -> Vec<ConflictDiagnostic> {
    let coercing: Vec<(&TwoLevelRule, Dfa, Dfa)> = rules
        .iter()
        .filter(|r| r.operator.coerces())
        .map(|r| (r, Dfa::suffix(&r.left, alphabet), Dfa::anchored(&r.right, alphabet)))
        .collect();
    let mut out = Vec::new();
    for (i, (a, a_left, a_right)) in coercing.iter().enumerate() {
        for (b, b_left, b_right) in &coercing[i + 1..] {
            if a.pair.lexical != b.pair.lexical || a.pair.surface == b.pair.surface {
                continue;
            }
            if a_left.intersects_within(b_left, CONFLICT_WINDOW)
                && a_right.intersects_within(b_right, CONFLICT_WINDOW)
            {
                out.push(ConflictDiagnostic {
                    first: a.name.clone(),
                    second: b.name.clone(),
                    lexical: a.pair.lexical,
                    surfaces: (a.pair.surface, b.pair.surface),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phonology::parse_rule_file;

    const HEADER: &str = "ALPHABET\nSYMBOLS a e i u k\nVowel = a e i u\nH = i u\nPAIRS +:0 H:0\nEND\n";

    #[test]
    fn universal_coercions_clash() {
        let set = parse_rule_file(&format!("{HEADER}A: H:i <= _ ;\nB: H:u <= _ ;\n")).unwrap();
        let found = check_rule_conflicts(&set.alphabet, &set.rules);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].lexical, 'H');
    }

    #[test]
    fn disjoint_contexts_do_not_clash() {
        let set = parse_rule_file(&format!(
            "{HEADER}A: H:i <= (:e | :i) _ ;\nB: H:u <= :u _ ;\n"
        ))
        .unwrap();
        assert!(check_rule_conflicts(&set.alphabet, &set.rules).is_empty());
    }

    #[test]
    fn single_rule_has_nothing_to_clash_with() {
        let set = parse_rule_file(&format!("{HEADER}A: H:i <= _ ;\n")).unwrap();
        assert!(check_rule_conflicts(&set.alphabet, &set.rules).is_empty());
    }

    #[test]
    fn overlap_beyond_window_is_not_seen() {
        let set = parse_rule_file(&format!(
            "{HEADER}A: H:i <= :k :k :k :k _ ;\nB: H:u <= :k :k :k :k _ ;\n"
        ))
        .unwrap();
        assert!(check_rule_conflicts(&set.alphabet, &set.rules).is_empty());
    }
}

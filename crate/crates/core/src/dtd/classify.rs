//! Syntactic content-model classes.

use serde::Serialize;

use crate::regex::ContentModel;

/// Every label occurs at most once.
pub fn is_df(e: &ContentModel) -> bool {
    let mut seen = std::collections::BTreeSet::new();
    let mut ok = true;
    e.visit_symbols(&mut |l| ok &= seen.insert(l.clone()));
    ok
}

/// A top-level factor admitted by the DC?+# definition.
fn is_dc_qph_factor(f: &ContentModel) -> bool {
    match f {
        ContentModel::Symbol(_) | ContentModel::Star(_) | ContentModel::Plus(_) => true,
        ContentModel::Opt(inner) => is_dc_qph(inner),
        ContentModel::Hash(l, r) => l.iter().chain(r).all(is_dc_qph),
        // An ε factor imposes nothing and is accepted.
        ContentModel::Epsilon => true,
        ContentModel::Concat(_) | ContentModel::Disj(_) => false,
    }
}

pub fn is_dc_qph(e: &ContentModel) -> bool {
    e.factors().iter().all(is_dc_qph_factor)
}

pub fn is_dc(e: &ContentModel) -> bool {
    is_dc_qph(e) && !e.contains_opt_plus_or_hash()
}

pub fn is_rw(e: &ContentModel) -> bool {
    e.factors().iter().all(|f| is_dc_qph_factor(f) || f.symbols().iter().all(|l| e.occurrences(l) == 1))
}

/// Collects labels that occur outside the scope of every `*` and `+`.
fn visit_non_repetitive(e: &ContentModel, out: &mut Vec<crate::label::Label>) {
    match e {
        ContentModel::Epsilon => {}
        ContentModel::Symbol(l) => out.push(l.clone()),
        ContentModel::Concat(es) | ContentModel::Disj(es) => es.iter().for_each(|e| visit_non_repetitive(e, out)),
        ContentModel::Opt(inner) => visit_non_repetitive(inner, out),
        ContentModel::Hash(l, r) => l.iter().chain(r).for_each(|e| visit_non_repetitive(e, out)),
        ContentModel::Star(_) | ContentModel::Plus(_) => {}
    }
}

pub fn is_mrw(e: &ContentModel) -> bool {
    let mut outside = Vec::new();
    visit_non_repetitive(e, &mut outside);
    is_rw(e) && outside.iter().all(|l| e.occurrences(l) == 1)
}

pub fn is_mdf_dc(e: &ContentModel) -> bool {
    is_mrw(e) && !e.contains_opt_plus_or_hash()
}

/// Class flags of one content model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RuleClass {
    pub df: bool,
    pub dc: bool,
    pub dc_qph: bool,
    pub rw: bool,
    pub mrw: bool,
    pub mdf_dc: bool,
}

impl RuleClass {
    pub fn of(e: &ContentModel) -> Self {
        RuleClass {
            df: is_df(e),
            dc: is_dc(e),
            dc_qph: is_dc_qph(e),
            rw: is_rw(e),
            mrw: is_mrw(e),
            mdf_dc: is_mdf_dc(e),
        }
    }
}

/// The identity `δ`: drops `?`, turns `+` into `*` and `#` into the
/// concatenation of its operands.
pub fn delta(e: &ContentModel) -> ContentModel {
    match e {
        ContentModel::Epsilon | ContentModel::Symbol(_) => e.clone(),
        ContentModel::Concat(es) => ContentModel::concat(es.iter().map(delta).collect()),
        ContentModel::Disj(es) => ContentModel::disj(es.iter().map(delta).collect()),
        ContentModel::Star(inner) | ContentModel::Plus(inner) => ContentModel::star(delta(inner)),
        ContentModel::Opt(inner) => delta(inner),
        ContentModel::Hash(l, r) => ContentModel::concat(l.iter().chain(r).map(delta).collect()),
    }
}

/// Bounded check of mutual subsequence coverage: every word of each language
/// up to `max_len` is a subsequence of some word of the other language.
pub fn subsequence_preserves(e: &ContentModel, e2: &ContentModel, max_len: usize) -> bool {
    let covered = |from: &ContentModel, into: &ContentModel| {
        let nfa = into.to_nfa();
        from.enumerate_words(max_len).iter().all(|w| nfa.accepts_subsequence(w))
    };
    covered(e, e2) && covered(e2, e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(s: &str) -> ContentModel {
        ContentModel::parse_compact(s).unwrap()
    }

    #[test]
    fn df_examples() {
        assert!(!is_df(&cm("a*(b|c)a*")));
        assert!(is_df(&cm("(a|b)c")));
        assert!(is_df(&ContentModel::Epsilon));
    }

    #[test]
    fn dc_examples() {
        assert!(is_dc(&cm("a(b|c)*")));
        assert!(!is_dc(&cm("(a|b)c*")));
        assert!(is_dc_qph(&cm("(a|b)*ca?")));
        assert!(!is_dc(&cm("(a|b)*ca?")));
        assert!(is_dc_qph(&cm("a*b?(g#(c,d,e,f+))a*")));
        assert!(!is_dc_qph(&cm("a*((b|c)#d)")));
    }

    #[test]
    fn rw_and_mrw_examples() {
        assert!(is_mrw(&cm("(a|b)*ca+")));
        let e = cm("(a|b)*ca?");
        assert!(is_rw(&e) && !is_mrw(&e));
        let e = cm("a*ba");
        assert!(is_rw(&e) && !is_mrw(&e));
        assert!(is_mrw(&cm("a*ba*")));
        assert!(!is_rw(&cm("a*(b|c)b*")));
    }

    #[test]
    fn mdf_dc_examples() {
        assert!(is_mdf_dc(&cm("r*(a*b|c)r*")));
        assert!(!is_mdf_dc(&cm("(a|b)*ca+")));
        assert!(!is_mdf_dc(&cm("a*(b|c)b*")));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(&cm("a*((b#(c#d))a*)?")).to_string(), "a*bcda*");
        assert_eq!(delta(&ContentModel::Epsilon), ContentModel::Epsilon);
        assert_eq!(delta(&cm("(a|b)*ca+")), cm("(a|b)*ca*"));
    }

    #[test]
    fn subsequence_preservation_examples() {
        assert!(subsequence_preserves(&cm("a+"), &cm("a*"), 4));
        assert!(subsequence_preserves(&cm("a#b"), &cm("ab"), 3));
        assert!(!subsequence_preserves(&cm("ab"), &cm("ba"), 2));
    }
}

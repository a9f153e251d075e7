//! Content-model regular expressions.
//!
//! The operator set is concatenation, `*`, `|`, `?`, `+` and the "either or
//! both" operator `#`. There is deliberately no empty-set constant, so every
//! expression denotes a non-empty language.

mod automaton;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

pub use automaton::{Nfa, StateSet};
pub use parse::{parse_content_model, ParseError, SymbolMode};

use crate::label::{write_labels, Label};

/// A word over labels; the children sequence of a tree node.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Label>);

impl Word {
    pub fn new(labels: Vec<Label>) -> Self {
        Word(labels)
    }

    /// Builds a word from one-character labels, e.g. `"raab"`.
    pub fn from_chars(s: &str) -> Self {
        Word(s.chars().map(|c| Label::new(c.to_string())).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    /// True if `self` can be obtained from `other` by deleting symbols.
    pub fn is_subsequence_of(&self, other: &Word) -> bool {
        let mut it = other.0.iter();
        self.0.iter().all(|l| it.any(|m| m == l))
    }

    pub fn contains_label(&self, l: &Label) -> bool {
        self.0.contains(l)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        write_labels(f, &self.0, " ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ContentModel {
    Epsilon,
    Symbol(Label),
    /// At least two factors, none of them a `Concat`.
    Concat(Vec<ContentModel>),
    /// At least two alternatives, none of them a `Disj`.
    Disj(Vec<ContentModel>),
    Star(Box<ContentModel>),
    Opt(Box<ContentModel>),
    Plus(Box<ContentModel>),
    /// `(l1,…,lm)#(r1,…,rn)`: all of the left tuple followed by an optional
    /// right tuple, or an optional left tuple followed by all of the right.
    Hash(Vec<ContentModel>, Vec<ContentModel>),
}

impl ContentModel {
    pub fn sym(name: &str) -> Self {
        ContentModel::Symbol(Label::new(name))
    }

    /// Concatenation that flattens nested concatenations and drops `ε`
    /// factors, collapsing to a single factor (or `ε`) when possible.
    pub fn concat(parts: Vec<ContentModel>) -> Self {
        let mut flat = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                ContentModel::Epsilon => {}
                ContentModel::Concat(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => ContentModel::Epsilon,
            1 => flat.pop().unwrap(),
            _ => ContentModel::Concat(flat),
        }
    }

    /// Disjunction that flattens nested disjunctions.
    pub fn disj(parts: Vec<ContentModel>) -> Self {
        let mut flat = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                ContentModel::Disj(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        assert!(!flat.is_empty(), "disjunction needs at least one alternative");
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            ContentModel::Disj(flat)
        }
    }

    pub fn star(e: ContentModel) -> Self {
        ContentModel::Star(Box::new(e))
    }

    pub fn opt(e: ContentModel) -> Self {
        ContentModel::Opt(Box::new(e))
    }

    pub fn plus(e: ContentModel) -> Self {
        ContentModel::Plus(Box::new(e))
    }

    pub fn hash(left: Vec<ContentModel>, right: Vec<ContentModel>) -> Self {
        assert!(!left.is_empty() && !right.is_empty(), "# needs non-empty operand tuples");
        ContentModel::Hash(left, right)
    }

    /// Parses with one symbol per character, the compact notation used in
    /// fixtures such as `r*(a*b|c)r*`.
    pub fn parse_compact(text: &str) -> Result<Self, ParseError> {
        parse_content_model(text, &SymbolMode::SingleChar)
    }

    /// Top-level concatenation factors; a non-concatenation is its own single
    /// factor and `ε` has none.
    pub fn factors(&self) -> &[ContentModel] {
        match self {
            ContentModel::Concat(fs) => fs,
            ContentModel::Epsilon => &[],
            other => std::slice::from_ref(other),
        }
    }

    /// Labels occurring syntactically in the expression.
    pub fn symbols(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        self.visit_symbols(&mut |l| {
            out.insert(l.clone());
        });
        out
    }

    /// Number of syntactic occurrences of `label`.
    pub fn occurrences(&self, label: &Label) -> usize {
        let mut n = 0;
        self.visit_symbols(&mut |l| {
            if l == label {
                n += 1;
            }
        });
        n
    }

    pub(crate) fn visit_symbols(&self, f: &mut impl FnMut(&Label)) {
        match self {
            ContentModel::Epsilon => {}
            ContentModel::Symbol(l) => f(l),
            ContentModel::Concat(es) | ContentModel::Disj(es) => es.iter().for_each(|e| e.visit_symbols(f)),
            ContentModel::Star(e) | ContentModel::Opt(e) | ContentModel::Plus(e) => e.visit_symbols(f),
            ContentModel::Hash(l, r) => l.iter().chain(r).for_each(|e| e.visit_symbols(f)),
        }
    }

    /// Number of constants and operators; n-ary operators count once.
    pub fn size(&self) -> usize {
        match self {
            ContentModel::Epsilon | ContentModel::Symbol(_) => 1,
            ContentModel::Concat(es) | ContentModel::Disj(es) => 1 + es.iter().map(ContentModel::size).sum::<usize>(),
            ContentModel::Star(e) | ContentModel::Opt(e) | ContentModel::Plus(e) => 1 + e.size(),
            ContentModel::Hash(l, r) => 1 + l.iter().chain(r).map(ContentModel::size).sum::<usize>(),
        }
    }

    pub fn contains_opt_plus_or_hash(&self) -> bool {
        match self {
            ContentModel::Opt(_) | ContentModel::Plus(_) | ContentModel::Hash(..) => true,
            ContentModel::Epsilon | ContentModel::Symbol(_) => false,
            ContentModel::Concat(es) | ContentModel::Disj(es) => es.iter().any(ContentModel::contains_opt_plus_or_hash),
            ContentModel::Star(e) => e.contains_opt_plus_or_hash(),
        }
    }

    /// Rewrites every `#` by its defining disjunction:
    /// `(a1…am)#(b1…bl)` becomes `a1⋯am b1?⋯bl? | a1?⋯am? b1⋯bl`.
    pub fn expand_hash(&self) -> ContentModel {
        match self {
            ContentModel::Epsilon | ContentModel::Symbol(_) => self.clone(),
            ContentModel::Concat(es) => ContentModel::concat(es.iter().map(ContentModel::expand_hash).collect()),
            ContentModel::Disj(es) => ContentModel::disj(es.iter().map(ContentModel::expand_hash).collect()),
            ContentModel::Star(e) => ContentModel::star(e.expand_hash()),
            ContentModel::Opt(e) => ContentModel::opt(e.expand_hash()),
            ContentModel::Plus(e) => ContentModel::plus(e.expand_hash()),
            ContentModel::Hash(l, r) => {
                let l: Vec<_> = l.iter().map(ContentModel::expand_hash).collect();
                let r: Vec<_> = r.iter().map(ContentModel::expand_hash).collect();
                let all_left_then_opt_right =
                    l.iter().cloned().chain(r.iter().cloned().map(ContentModel::opt)).collect();
                let opt_left_then_all_right =
                    l.iter().cloned().map(ContentModel::opt).chain(r.iter().cloned()).collect();
                ContentModel::disj(vec![
                    ContentModel::concat(all_left_then_opt_right),
                    ContentModel::concat(opt_left_then_all_right),
                ])
            }
        }
    }

    pub fn to_nfa(&self) -> Nfa {
        Nfa::glushkov(self)
    }

    /// Membership test `w ∈ L(e)`.
    pub fn matches(&self, w: &Word) -> bool {
        self.to_nfa().accepts(w)
    }

    /// Language equivalence, decided on the product of the two subset
    /// automata.
    pub fn equivalent(&self, other: &ContentModel) -> bool {
        automaton::equivalent(&self.to_nfa(), &other.to_nfa())
    }

    /// Exactly the words of `L(e)` of length at most `max_len`.
    pub fn enumerate_words(&self, max_len: usize) -> BTreeSet<Word> {
        self.to_nfa().words_up_to(max_len)
    }

    /// Words obtained by iterating every `*` and `+` at most `rep` times.
    /// This is a finite subset of `L(e)`.
    pub fn capped_words(&self, rep: usize) -> BTreeSet<Word> {
        match self {
            ContentModel::Epsilon => BTreeSet::from([Word::default()]),
            ContentModel::Symbol(l) => BTreeSet::from([Word(vec![l.clone()])]),
            ContentModel::Concat(es) => {
                let mut acc = BTreeSet::from([Word::default()]);
                for e in es {
                    acc = concat_sets(&acc, &e.capped_words(rep));
                }
                acc
            }
            ContentModel::Disj(es) => es.iter().flat_map(|e| e.capped_words(rep)).collect(),
            ContentModel::Opt(e) => {
                let mut s = e.capped_words(rep);
                s.insert(Word::default());
                s
            }
            ContentModel::Star(e) | ContentModel::Plus(e) => {
                let min = usize::from(matches!(self, ContentModel::Plus(_)));
                let inner = e.capped_words(rep);
                let mut out = BTreeSet::new();
                let mut power = BTreeSet::from([Word::default()]);
                for k in 0..=rep {
                    if k >= min {
                        out.extend(power.iter().cloned());
                    }
                    if k < rep {
                        power = concat_sets(&power, &inner);
                    }
                }
                out
            }
            ContentModel::Hash(..) => self.expand_hash().capped_words(rep),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            ContentModel::Disj(_) => 0,
            ContentModel::Concat(_) => 1,
            ContentModel::Hash(..) => 2,
            _ => 3,
        }
    }

    fn fmt_with(&self, f: &mut fmt::Formatter<'_>, compact: bool) -> fmt::Result {
        match self {
            ContentModel::Epsilon => f.write_str("ε"),
            ContentModel::Symbol(l) => f.write_str(l.as_str()),
            ContentModel::Disj(es) => {
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    e.fmt_with(f, compact)?;
                }
                Ok(())
            }
            ContentModel::Concat(es) => {
                for (i, e) in es.iter().enumerate() {
                    if i > 0 && !compact {
                        f.write_str(",")?;
                    }
                    // `#` factors are parenthesized for readability.
                    e.fmt_at(f, compact, 3)?;
                }
                Ok(())
            }
            ContentModel::Star(e) | ContentModel::Opt(e) | ContentModel::Plus(e) => {
                e.fmt_at(f, compact, 3)?;
                f.write_str(match self {
                    ContentModel::Star(_) => "*",
                    ContentModel::Opt(_) => "?",
                    _ => "+",
                })
            }
            ContentModel::Hash(l, r) => {
                fmt_hash_operand(f, l, compact)?;
                f.write_str("#")?;
                fmt_hash_operand(f, r, compact)
            }
        }
    }

    /// Prints `self`, parenthesized unless it binds at least as tightly as
    /// `min_prec`.
    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, compact: bool, min_prec: u8) -> fmt::Result {
        if self.precedence() >= min_prec {
            self.fmt_with(f, compact)
        } else {
            f.write_str("(")?;
            self.fmt_with(f, compact)?;
            f.write_str(")")
        }
    }
}

fn fmt_hash_operand(f: &mut fmt::Formatter<'_>, tuple: &[ContentModel], compact: bool) -> fmt::Result {
    match tuple {
        [single] => match single {
            // A bare parenthesized sequence would be read back as a tuple.
            ContentModel::Concat(_) => {
                f.write_str("((")?;
                single.fmt_with(f, compact)?;
                f.write_str("))")
            }
            other => other.fmt_at(f, compact, 3),
        },
        many => {
            f.write_str("(")?;
            for (i, e) in many.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                e.fmt_at(f, compact, 2)?;
            }
            f.write_str(")")
        }
    }
}

impl fmt::Display for ContentModel {
    /// Prints in the notation accepted by the parser. Concatenation is
    /// juxtaposition when every label is one character, `,` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut compact = true;
        self.visit_symbols(&mut |l| compact &= l.is_single_char());
        self.fmt_with(f, compact)
    }
}

/// Prints with `,` between concatenated factors regardless of label length.
pub struct Separated<'a>(pub &'a ContentModel);

impl fmt::Display for Separated<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt_with(f, false)
    }
}

fn concat_sets(a: &BTreeSet<Word>, b: &BTreeSet<Word>) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for x in a {
        for y in b {
            let mut w = x.0.clone();
            w.extend(y.0.iter().cloned());
            out.insert(Word(w));
        }
    }
    out
}

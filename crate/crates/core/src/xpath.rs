//! Positive XPath over the six structural axes.
//!
//! Concrete syntax:
//!
//! ```text
//! pathexpr  := path (('|' | '∪') path)*
//! path      := step ('/' step)*
//! step      := (AXIS '::' LABEL | '(' pathexpr ')') ('[' qexpr ']')*
//! qexpr     := qterm (('or' | '∨') qterm)*
//! qterm     := qatom (('and' | '∧') qatom)*
//! qatom     := pathexpr | '(' qexpr ')'
//! ```
//!
//! Axes are `child`, `parent`, `desc-or-self`, `anc-or-self`, `fsib`, `psib`,
//! their XPath 1.0 spellings, or the arrows `↓ ↑ ↓* ↑* →+ ←+`.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::label::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Child,
    Parent,
    DescOrSelf,
    AncOrSelf,
    FollSibling,
    PrecSibling,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Child => "child",
            Axis::Parent => "parent",
            Axis::DescOrSelf => "desc-or-self",
            Axis::AncOrSelf => "anc-or-self",
            Axis::FollSibling => "fsib",
            Axis::PrecSibling => "psib",
        }
    }

    pub fn arrow(self) -> &'static str {
        match self {
            Axis::Child => "↓",
            Axis::Parent => "↑",
            Axis::DescOrSelf => "↓*",
            Axis::AncOrSelf => "↑*",
            Axis::FollSibling => "→⁺",
            Axis::PrecSibling => "←⁺",
        }
    }

    fn from_name(s: &str) -> Option<Axis> {
        Some(match s {
            "child" => Axis::Child,
            "parent" => Axis::Parent,
            "desc-or-self" | "descendant-or-self" => Axis::DescOrSelf,
            "anc-or-self" | "ancestor-or-self" => Axis::AncOrSelf,
            "fsib" | "following-sibling" => Axis::FollSibling,
            "psib" | "preceding-sibling" => Axis::PrecSibling,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum XPath {
    Step(Axis, Label),
    Seq(Box<XPath>, Box<XPath>),
    Union(Box<XPath>, Box<XPath>),
    Qual(Box<XPath>, Box<Qualifier>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Qualifier {
    Path(XPath),
    And(Box<Qualifier>, Box<Qualifier>),
    Or(Box<Qualifier>, Box<Qualifier>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("XPath syntax error at offset {pos}: {msg}")]
pub struct XPathError {
    pub pos: usize,
    pub msg: String,
}

/// The syntactic features an expression uses.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Fragment {
    pub axes: BTreeSet<Axis>,
    pub uses_union: bool,
    pub uses_qualifier: bool,
    pub qualifier_disjunction: bool,
}

impl Fragment {
    fn merge(&mut self, other: Fragment) {
        self.axes.extend(other.axes);
        self.uses_union |= other.uses_union;
        self.uses_qualifier |= other.uses_qualifier;
        self.qualifier_disjunction |= other.qualifier_disjunction;
    }

    /// Downward, upward and sibling steps composed by `/` only.
    pub fn is_eval1(&self) -> bool {
        !self.uses_union
            && !self.uses_qualifier
            && self.axes.iter().all(|a| matches!(a, Axis::Child | Axis::Parent | Axis::FollSibling | Axis::PrecSibling))
    }

    /// Downward and sibling steps with conjunctive qualifiers.
    pub fn is_eval2(&self) -> bool {
        !self.uses_union
            && !self.qualifier_disjunction
            && self.axes.iter().all(|a| matches!(a, Axis::Child | Axis::FollSibling | Axis::PrecSibling))
    }
}

impl fmt::Display for Fragment {
    /// `X(↓,→⁺,[]∧)` style.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<&str> = self.axes.iter().map(|a| a.arrow()).collect();
        if self.uses_union {
            parts.push("∪");
        }
        if self.uses_qualifier {
            parts.push(if self.qualifier_disjunction { "[]" } else { "[]∧" });
        }
        write!(f, "X({})", parts.join(","))
    }
}

impl XPath {
    pub fn step(axis: Axis, label: &str) -> XPath {
        XPath::Step(axis, Label::new(label))
    }

    pub fn seq(a: XPath, b: XPath) -> XPath {
        XPath::Seq(Box::new(a), Box::new(b))
    }

    pub fn union(a: XPath, b: XPath) -> XPath {
        XPath::Union(Box::new(a), Box::new(b))
    }

    pub fn qual(p: XPath, q: Qualifier) -> XPath {
        XPath::Qual(Box::new(p), Box::new(q))
    }

    pub fn parse(text: &str) -> Result<XPath, XPathError> {
        let mut p = Parser::new(text)?;
        let e = p.path_expr()?;
        if p.idx < p.toks.len() {
            return p.error("trailing input");
        }
        Ok(e)
    }

    /// Number of location steps.
    pub fn size(&self) -> usize {
        match self {
            XPath::Step(..) => 1,
            XPath::Seq(a, b) | XPath::Union(a, b) => a.size() + b.size(),
            XPath::Qual(p, q) => p.size() + q.size(),
        }
    }

    pub fn fragment(&self) -> Fragment {
        let mut f = Fragment::default();
        match self {
            XPath::Step(a, _) => {
                f.axes.insert(*a);
            }
            XPath::Seq(a, b) => {
                f.merge(a.fragment());
                f.merge(b.fragment());
            }
            XPath::Union(a, b) => {
                f.uses_union = true;
                f.merge(a.fragment());
                f.merge(b.fragment());
            }
            XPath::Qual(p, q) => {
                f.uses_qualifier = true;
                f.merge(p.fragment());
                f.merge(q.fragment());
            }
        }
        f
    }

    /// Rewrites `p[q ∧ q']` to `p[q][q']` everywhere. Disjunctions are
    /// left in place.
    pub fn split_conjunctions(&self) -> XPath {
        match self {
            XPath::Step(..) => self.clone(),
            XPath::Seq(a, b) => XPath::seq(a.split_conjunctions(), b.split_conjunctions()),
            XPath::Union(a, b) => XPath::union(a.split_conjunctions(), b.split_conjunctions()),
            XPath::Qual(p, q) => {
                let mut out = p.split_conjunctions();
                let mut conjuncts = Vec::new();
                q.conjuncts(&mut conjuncts);
                for c in conjuncts {
                    out = XPath::qual(out, c.split_conjunctions());
                }
                out
            }
        }
    }

    /// The `/`-separated steps of a qualifier- and union-free expression.
    pub fn flatten_steps(&self) -> Option<Vec<(Axis, Label)>> {
        fn go(p: &XPath, out: &mut Vec<(Axis, Label)>) -> bool {
            match p {
                XPath::Step(a, l) => {
                    out.push((*a, l.clone()));
                    true
                }
                XPath::Seq(a, b) => go(a, out) && go(b, out),
                _ => false,
            }
        }
        let mut out = Vec::new();
        go(self, &mut out).then_some(out)
    }

    /// Prints with arrow axes, e.g. `↓::r/→⁺::b[↓::a]`.
    pub fn to_arrow_string(&self) -> String {
        let mut s = String::new();
        self.write(&mut s, true);
        s
    }

    fn prec(&self) -> u8 {
        match self {
            XPath::Union(..) => 0,
            XPath::Seq(..) => 1,
            XPath::Qual(..) | XPath::Step(..) => 2,
        }
    }

    fn write_at(&self, out: &mut String, arrows: bool, min: u8) {
        if self.prec() >= min {
            self.write(out, arrows);
        } else {
            out.push('(');
            self.write(out, arrows);
            out.push(')');
        }
    }

    fn write(&self, out: &mut String, arrows: bool) {
        match self {
            XPath::Step(a, l) => {
                out.push_str(if arrows { a.arrow() } else { a.name() });
                out.push_str("::");
                out.push_str(l.as_str());
            }
            XPath::Seq(a, b) => {
                a.write_at(out, arrows, 1);
                out.push('/');
                b.write_at(out, arrows, 2);
            }
            XPath::Union(a, b) => {
                a.write_at(out, arrows, 0);
                out.push_str(if arrows { " ∪ " } else { " | " });
                b.write_at(out, arrows, 1);
            }
            XPath::Qual(p, q) => {
                p.write_at(out, arrows, 2);
                out.push('[');
                q.write(out, arrows);
                out.push(']');
            }
        }
    }
}

impl Qualifier {
    pub fn path(p: XPath) -> Qualifier {
        Qualifier::Path(p)
    }

    pub fn and(a: Qualifier, b: Qualifier) -> Qualifier {
        Qualifier::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Qualifier, b: Qualifier) -> Qualifier {
        Qualifier::Or(Box::new(a), Box::new(b))
    }

    fn size(&self) -> usize {
        match self {
            Qualifier::Path(p) => p.size(),
            Qualifier::And(a, b) | Qualifier::Or(a, b) => a.size() + b.size(),
        }
    }

    fn fragment(&self) -> Fragment {
        match self {
            Qualifier::Path(p) => p.fragment(),
            Qualifier::And(a, b) | Qualifier::Or(a, b) => {
                let mut f = a.fragment();
                f.merge(b.fragment());
                f.qualifier_disjunction |= matches!(self, Qualifier::Or(..));
                f
            }
        }
    }

    fn conjuncts<'a>(&'a self, out: &mut Vec<&'a Qualifier>) {
        match self {
            Qualifier::And(a, b) => {
                a.conjuncts(out);
                b.conjuncts(out);
            }
            other => out.push(other),
        }
    }

    fn split_conjunctions(&self) -> Qualifier {
        match self {
            Qualifier::Path(p) => Qualifier::Path(p.split_conjunctions()),
            Qualifier::And(a, b) => Qualifier::and(a.split_conjunctions(), b.split_conjunctions()),
            Qualifier::Or(a, b) => Qualifier::or(a.split_conjunctions(), b.split_conjunctions()),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Qualifier::Or(..) => 0,
            Qualifier::And(..) => 1,
            Qualifier::Path(_) => 2,
        }
    }

    fn write_at(&self, out: &mut String, arrows: bool, min: u8) {
        if self.prec() >= min {
            self.write(out, arrows);
        } else {
            out.push('(');
            self.write(out, arrows);
            out.push(')');
        }
    }

    fn write(&self, out: &mut String, arrows: bool) {
        match self {
            Qualifier::Path(p) => p.write(out, arrows),
            Qualifier::And(a, b) => {
                a.write_at(out, arrows, 1);
                out.push_str(if arrows { " ∧ " } else { " and " });
                b.write_at(out, arrows, 2);
            }
            Qualifier::Or(a, b) => {
                a.write_at(out, arrows, 0);
                out.push_str(if arrows { " ∨ " } else { " or " });
                b.write_at(out, arrows, 1);
            }
        }
    }
}

impl fmt::Display for XPath {
    /// Prints with axis names; parses back to an equal expression.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s, false);
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Axis(Axis),
    Name(String),
    Slash,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Union,
    And,
    Or,
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-')
}

impl Parser {
    fn new(text: &str) -> Result<Parser, XPathError> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let at = |i: usize| chars.get(i).map(|&(_, c)| c);
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let (pos, c) = chars[i];
            let err = |msg: String| Err(XPathError { pos, msg });
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let simple = match c {
                '/' => Some(Tok::Slash),
                '[' => Some(Tok::LBrack),
                ']' => Some(Tok::RBrack),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '|' | '∪' => Some(Tok::Union),
                '∧' => Some(Tok::And),
                '∨' => Some(Tok::Or),
                _ => None,
            };
            if let Some(t) = simple {
                // `|u|` is accepted as a spelled-out union.
                if c == '|' && at(i + 1) == Some('u') && at(i + 2) == Some('|') {
                    i += 2;
                }
                toks.push((pos, t));
                i += 1;
                continue;
            }
            let arrow = match (c, at(i + 1)) {
                ('↓', Some('*')) => Some((Axis::DescOrSelf, 2)),
                ('↑', Some('*')) => Some((Axis::AncOrSelf, 2)),
                ('↓', _) => Some((Axis::Child, 1)),
                ('↑', _) => Some((Axis::Parent, 1)),
                ('→', Some('+' | '⁺')) => Some((Axis::FollSibling, 2)),
                ('←', Some('+' | '⁺')) => Some((Axis::PrecSibling, 2)),
                _ => None,
            };
            if let Some((axis, len)) = arrow {
                i += len;
                if at(i) != Some(':') || at(i + 1) != Some(':') {
                    return err("expected `::` after axis".into());
                }
                i += 2;
                toks.push((pos, Tok::Axis(axis)));
                continue;
            }
            if !is_name_start(c) {
                return err(format!("unexpected character `{c}`"));
            }
            let start = i;
            while at(i).is_some_and(is_name_char) {
                i += 1;
            }
            let name: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            if at(i) == Some(':') && at(i + 1) == Some(':') {
                let Some(axis) = Axis::from_name(&name) else {
                    return err(format!("unknown axis `{name}`"));
                };
                i += 2;
                toks.push((pos, Tok::Axis(axis)));
            } else {
                let t = match name.as_str() {
                    "and" => Tok::And,
                    "or" => Tok::Or,
                    _ => Tok::Name(name),
                };
                toks.push((pos, t));
            }
        }
        Ok(Parser { toks, idx: 0, end: text.len() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn error<T>(&self, msg: &str) -> Result<T, XPathError> {
        let pos = self.toks.get(self.idx).map_or(self.end, |(p, _)| *p);
        Err(XPathError { pos, msg: msg.to_string() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), XPathError> {
        if self.eat(t) {
            Ok(())
        } else {
            self.error(&format!("expected {what}"))
        }
    }

    fn path_expr(&mut self) -> Result<XPath, XPathError> {
        let mut e = self.path()?;
        while self.eat(&Tok::Union) {
            e = XPath::union(e, self.path()?);
        }
        Ok(e)
    }

    fn path(&mut self) -> Result<XPath, XPathError> {
        let first = self.step()?;
        self.path_rest(first)
    }

    fn path_rest(&mut self, mut e: XPath) -> Result<XPath, XPathError> {
        while self.eat(&Tok::Slash) {
            e = XPath::seq(e, self.step()?);
        }
        Ok(e)
    }

    fn step(&mut self) -> Result<XPath, XPathError> {
        let base = match self.peek().cloned() {
            Some(Tok::Axis(axis)) => {
                self.idx += 1;
                match self.peek().cloned() {
                    Some(Tok::Name(n)) => {
                        self.idx += 1;
                        XPath::Step(axis, Label::new(n))
                    }
                    _ => return self.error("expected a label after `::`"),
                }
            }
            Some(Tok::LParen) => {
                self.idx += 1;
                let inner = self.path_expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                inner
            }
            Some(_) => return self.error("expected a step"),
            None => return self.error("unexpected end of input"),
        };
        self.qualifiers(base)
    }

    fn qualifiers(&mut self, mut e: XPath) -> Result<XPath, XPathError> {
        while self.eat(&Tok::LBrack) {
            let q = self.q_expr()?;
            self.expect(&Tok::RBrack, "`]`")?;
            e = XPath::qual(e, q);
        }
        Ok(e)
    }

    fn q_expr(&mut self) -> Result<Qualifier, XPathError> {
        let mut q = self.q_term()?;
        while self.eat(&Tok::Or) {
            q = Qualifier::or(q, self.q_term()?);
        }
        Ok(q)
    }

    fn q_term(&mut self) -> Result<Qualifier, XPathError> {
        let mut q = self.q_atom()?;
        while self.eat(&Tok::And) {
            q = Qualifier::and(q, self.q_atom()?);
        }
        Ok(q)
    }

    /// A parenthesized group is a boolean group when it holds `and`/`or`,
    /// and otherwise the first step of a path.
    fn q_atom(&mut self) -> Result<Qualifier, XPathError> {
        if self.peek() != Some(&Tok::LParen) {
            return Ok(Qualifier::Path(self.path_expr()?));
        }
        self.idx += 1;
        let inner = self.q_expr()?;
        self.expect(&Tok::RParen, "`)`")?;
        match inner {
            Qualifier::Path(p) => {
                let step = self.qualifiers(p)?;
                let mut path = self.path_rest(step)?;
                while self.eat(&Tok::Union) {
                    path = XPath::union(path, self.path()?);
                }
                Ok(Qualifier::Path(path))
            }
            group => Ok(group),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> XPath {
        XPath::parse(s).unwrap()
    }

    #[test]
    fn parses_running_example() {
        let e = p("child::r/fsib::b[child::a]");
        let expected = XPath::seq(
            XPath::step(Axis::Child, "r"),
            XPath::qual(XPath::step(Axis::FollSibling, "b"), Qualifier::path(XPath::step(Axis::Child, "a"))),
        );
        assert_eq!(e, expected);
        assert_eq!(p("↓::r/→⁺::b[↓::a]"), expected);
        assert_eq!(p("↓::r/→+::b[↓::a]"), expected);
        assert_eq!(e.to_arrow_string(), "↓::r/→⁺::b[↓::a]");
    }

    #[test]
    fn single_step_and_errors() {
        assert_eq!(p("child::a"), XPath::step(Axis::Child, "a"));
        assert!(XPath::parse("child::a[").is_err());
        assert!(XPath::parse("").is_err());
        assert!(XPath::parse("sideways::a").is_err());
        assert!(XPath::parse("child::").is_err());
        let err = XPath::parse("child::a ]").unwrap_err();
        assert_eq!(err.pos, 9);
    }

    #[test]
    fn grouping_is_preserved() {
        let e = p("(↓::r/→⁺::b)/(↓::a/↑::b)");
        assert!(matches!(&e, XPath::Seq(a, b) if matches!(**a, XPath::Seq(..)) && matches!(**b, XPath::Seq(..))));
        assert_eq!(e.to_arrow_string(), "↓::r/→⁺::b/(↓::a/↑::b)");
        assert_eq!(p(&e.to_string()), e);
    }

    #[test]
    fn fragments() {
        let f = p("(↓::r/→⁺::b)/(↓::a/↑::b)").fragment();
        assert_eq!(f.axes, BTreeSet::from([Axis::Child, Axis::Parent, Axis::FollSibling]));
        assert!(!f.uses_union && !f.uses_qualifier && f.is_eval1() && !f.is_eval2());
        let f = p("↓::r/→⁺::b[↓::a]").fragment();
        assert_eq!(f.axes, BTreeSet::from([Axis::Child, Axis::FollSibling]));
        assert!(f.uses_qualifier && !f.qualifier_disjunction && f.is_eval2());
        assert!(p("↓::a ∪ ↓::b").fragment().uses_union);
        assert!(p("↓::a[↓::b or ↓::c]").fragment().qualifier_disjunction);
        assert_eq!(p("↓::r/→⁺::b[↓::a]").fragment().to_string(), "X(↓,→⁺,[]∧)");
    }

    #[test]
    fn boolean_qualifiers() {
        let e = p("child::a[child::b and child::c or child::d]");
        let XPath::Qual(_, q) = &e else { panic!() };
        assert!(matches!(**q, Qualifier::Or(..)));
        let e2 = p("child::a[child::b and (child::c or child::d)]");
        assert_eq!(p(&e2.to_string()), e2);
        let e3 = p("child::a[(child::b)/child::c]");
        assert_eq!(e3, p("child::a[child::b/child::c]"));
    }

    #[test]
    fn conjunction_splitting() {
        let e = p("child::a[child::b and child::c]").split_conjunctions();
        assert_eq!(e, p("child::a[child::b][child::c]"));
        assert_eq!(p("child::a[child::b and child::c]").size(), 3);
    }

    #[test]
    fn flatten() {
        let steps = p("(↓::r/→⁺::b)/(↓::a/↑::b)").flatten_steps().unwrap();
        assert_eq!(steps.len(), 4);
        assert!(p("↓::a[↓::b]").flatten_steps().is_none());
    }
}

//! DTDs: a root label and one content model per label.

mod classify;
mod parse;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

pub use classify::{delta, is_dc, is_dc_qph, is_df, is_mdf_dc, is_mrw, is_rw, subsequence_preserves, RuleClass};
pub use parse::DtdFormat;

use crate::label::Label;
use crate::regex::{ContentModel, ParseError, Separated};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DtdError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: content model of `{label}`: {source}")]
    ContentModel {
        line: usize,
        label: Label,
        #[source]
        source: ParseError,
    },
    #[error("duplicate rule for `{0}`")]
    DuplicateRule(Label),
    #[error("content model of `{rule}` references undeclared label `{label}`")]
    UndeclaredLabel { rule: Label, label: String },
    #[error("content model of `{0}` is ANY or mixed content, which is not supported")]
    Unsupported(Label),
    #[error("no root label given")]
    MissingRoot,
    #[error("root label `{0}` has no rule")]
    UnknownRoot(Label),
    #[error("no rules")]
    Empty,
    #[error("rule `{label} := {model}` is not MRW")]
    NotMrw { label: Label, model: ContentModel },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dtd {
    root: Label,
    rules: IndexMap<Label, ContentModel>,
}

impl Dtd {
    /// Builds a DTD from rules in declaration order. Every label used in a
    /// content model must have a rule of its own.
    pub fn new(root: impl Into<Label>, rules: Vec<(Label, ContentModel)>) -> Result<Self, DtdError> {
        let root = root.into();
        if rules.is_empty() {
            return Err(DtdError::Empty);
        }
        let mut map = IndexMap::new();
        for (l, e) in rules {
            if map.insert(l.clone(), e).is_some() {
                return Err(DtdError::DuplicateRule(l));
            }
        }
        if !map.contains_key(&root) {
            return Err(DtdError::UnknownRoot(root));
        }
        for (l, e) in &map {
            if let Some(missing) = e.symbols().into_iter().find(|s| !map.contains_key(s)) {
                return Err(DtdError::UndeclaredLabel { rule: l.clone(), label: missing.to_string() });
            }
        }
        Ok(Dtd { root, rules: map })
    }

    /// Builds a DTD from compact one-character-per-label rules, e.g.
    /// `[("r", "r*(a*b|c)r*"), ("a", "eps")]`. The first rule is the root.
    pub fn from_compact(rules: &[(&str, &str)]) -> Result<Self, DtdError> {
        let mut parsed = Vec::new();
        for (i, (l, text)) in rules.iter().enumerate() {
            let e = ContentModel::parse_compact(text).map_err(|source| DtdError::ContentModel {
                line: i + 1,
                label: Label::new(l),
                source,
            })?;
            parsed.push((Label::new(l), e));
        }
        let root = parsed.first().map(|(l, _)| l.clone()).ok_or(DtdError::Empty)?;
        Dtd::new(root, parsed)
    }

    pub fn parse(text: &str, format: DtdFormat, root: Option<&str>) -> Result<Self, DtdError> {
        parse::parse_dtd(text, format, root)
    }

    pub fn root(&self) -> &Label {
        &self.root
    }

    /// Content model of `l`, if declared.
    pub fn model<Q: AsRef<str> + ?Sized>(&self, l: &Q) -> Option<&ContentModel> {
        self.rules.get(l.as_ref())
    }

    /// Rules in declaration order.
    pub fn rules(&self) -> impl Iterator<Item = (&Label, &ContentModel)> {
        self.rules.iter()
    }

    pub fn alphabet(&self) -> BTreeSet<Label> {
        self.rules.keys().cloned().collect()
    }

    pub fn size(&self) -> usize {
        self.rules.values().map(ContentModel::size).sum()
    }

    /// Labels unreachable from the root. Every content model denotes a
    /// non-empty language, so reachability is the only source of useless
    /// symbols.
    pub fn validate_no_useless(&self) -> BTreeSet<Label> {
        let mut seen = BTreeSet::from([self.root.clone()]);
        let mut queue = VecDeque::from([self.root.clone()]);
        while let Some(l) = queue.pop_front() {
            for s in self.rules[&l].symbols() {
                if seen.insert(s.clone()) {
                    queue.push_back(s);
                }
            }
        }
        self.rules.keys().filter(|l| !seen.contains(*l)).cloned().collect()
    }

    pub fn classify(&self) -> Classification {
        let rules: Vec<RuleReport> = self
            .rules
            .iter()
            .map(|(l, e)| RuleReport { label: l.clone(), model: e.to_string(), class: RuleClass::of(e) })
            .collect();
        let count = |f: fn(&RuleClass) -> bool| rules.iter().filter(|r| f(&r.class)).count();
        let totals = Totals {
            rules: rules.len(),
            df: count(|c| c.df),
            dc: count(|c| c.dc),
            dc_qph: count(|c| c.dc_qph),
            rw: count(|c| c.rw),
            mrw: count(|c| c.mrw),
            mdf_dc: count(|c| c.mdf_dc),
        };
        Classification { rules, totals }
    }

    pub fn is_mrw(&self) -> bool {
        self.rules.values().all(is_mrw)
    }

    pub fn is_mdf_dc(&self) -> bool {
        self.rules.values().all(is_mdf_dc)
    }

    /// First rule that is not MRW.
    pub fn check_mrw(&self) -> Result<(), DtdError> {
        match self.rules.iter().find(|(_, e)| !is_mrw(e)) {
            Some((l, e)) => Err(DtdError::NotMrw { label: l.clone(), model: e.clone() }),
            None => Ok(()),
        }
    }

    /// Applies `δ` rule-wise. The result of an MRW DTD is MDF/DC.
    pub fn delta(&self) -> Result<Dtd, DtdError> {
        self.check_mrw()?;
        Ok(Dtd { root: self.root.clone(), rules: self.rules.iter().map(|(l, e)| (l.clone(), delta(e))).collect() })
    }
}

impl fmt::Display for Dtd {
    /// Native format; parses back to an equal DTD.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "root {}", self.root)?;
        let compact = self.rules.keys().all(Label::is_single_char);
        for (l, e) in &self.rules {
            if matches!(e, ContentModel::Epsilon) {
                writeln!(f, "{l} := eps")?;
            } else if compact {
                writeln!(f, "{l} := {e}")?;
            } else {
                writeln!(f, "{l} := {}", Separated(e))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RuleReport {
    pub label: Label,
    pub model: String,
    #[serde(flatten)]
    pub class: RuleClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub rules: usize,
    pub df: usize,
    pub dc: usize,
    pub dc_qph: usize,
    pub rw: usize,
    pub mrw: usize,
    pub mdf_dc: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub rules: Vec<RuleReport>,
    pub totals: Totals,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "yes" } else { "no" };
        let width = self.rules.iter().map(|r| r.label.as_str().len()).max().unwrap_or(0).max(5);
        writeln!(
            f,
            "{:<width$}  {:>3} {:>3} {:>6} {:>3} {:>3} {:>6}  model",
            "label", "DF", "DC", "DC?+#", "RW", "MRW", "MDF/DC"
        )?;
        for r in &self.rules {
            let c = r.class;
            writeln!(
                f,
                "{:<width$}  {:>3} {:>3} {:>6} {:>3} {:>3} {:>6}  {}",
                r.label.as_str(),
                yn(c.df),
                yn(c.dc),
                yn(c.dc_qph),
                yn(c.rw),
                yn(c.mrw),
                yn(c.mdf_dc),
                r.model
            )?;
        }
        let t = self.totals;
        write!(
            f,
            "{:<width$}  {:>3} {:>3} {:>6} {:>3} {:>3} {:>6}  ({} rules)",
            "total", t.df, t.dc, t.dc_qph, t.rw, t.mrw, t.mdf_dc, t.rules
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> Dtd {
        Dtd::from_compact(&[("r", "r*(a*b|c)r*"), ("a", "eps"), ("b", "a"), ("c", "eps")]).unwrap()
    }

    #[test]
    fn useless_symbols() {
        assert!(example().validate_no_useless().is_empty());
        let d = Dtd::from_compact(&[("r", "a"), ("a", "eps"), ("b", "eps")]).unwrap();
        assert_eq!(d.validate_no_useless(), BTreeSet::from([Label::new("b")]));
        let d = Dtd::from_compact(&[("r", "eps")]).unwrap();
        assert!(d.validate_no_useless().is_empty());
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            Dtd::from_compact(&[("r", "a"), ("r", "eps")]),
            Err(DtdError::UndeclaredLabel { .. }) | Err(DtdError::DuplicateRule(_))
        ));
        assert!(matches!(Dtd::from_compact(&[("r", "eps"), ("r", "eps")]), Err(DtdError::DuplicateRule(_))));
        assert!(matches!(Dtd::from_compact(&[("r", "x")]), Err(DtdError::UndeclaredLabel { .. })));
    }

    #[test]
    fn classification_totals() {
        let c = example().classify();
        assert_eq!(c.totals.rules, 4);
        assert_eq!(c.totals.mdf_dc, 4);
        assert!(c.to_string().contains("total"));
    }

    #[test]
    fn delta_dtd() {
        let d = Dtd::from_compact(&[("r", "(a|b)*ca+"), ("a", "eps"), ("b", "eps"), ("c", "eps")]).unwrap();
        let dd = d.delta().unwrap();
        assert_eq!(dd.model("r").unwrap(), &ContentModel::parse_compact("(a|b)*ca*").unwrap());
        assert_eq!(example().delta().unwrap(), example());
        let bad = Dtd::from_compact(&[("r", "a|aa"), ("a", "eps")]).unwrap();
        assert!(matches!(bad.delta(), Err(DtdError::NotMrw { .. })));
    }

    #[test]
    fn display_round_trips() {
        let d = example();
        let back = Dtd::parse(&d.to_string(), DtdFormat::Native, None).unwrap();
        assert_eq!(back, d);
    }
}

//! Sibling-constraint maps keyed by label paths.
//!
//! An entry `s ↦ S` requires that some node reached by the label path `s`
//! has children labelled with every label in `S`. Keys are label paths that
//! include the root label, so `r ↦ {b}` constrains the children of the root
//! and `rb ↦ {a}` the children of a `b` child of the root. In relative maps
//! keys are relative to a context node's parent, and `ε` is that parent.
//!
//! Each entry carries a flag telling whether every node on its path is DFS,
//! so that the path denotes a unique node once its prefix does. The flag is
//! fixed when the entry is created and carried through every operation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::dtd::Dtd;
use crate::label::{write_labels, Label};
use crate::regex::ContentModel;
use crate::schema_graph::SgNode;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelPath(pub Vec<Label>);

impl LabelPath {
    pub fn empty() -> Self {
        LabelPath(Vec::new())
    }

    /// Builds a path from one-character labels; `""` is `ε`.
    pub fn from_chars(s: &str) -> Self {
        LabelPath(s.chars().map(|c| Label::new(c.to_string())).collect())
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<&Label> {
        self.0.last()
    }

    pub fn child(&self, l: &Label) -> LabelPath {
        let mut v = self.0.clone();
        v.push(l.clone());
        LabelPath(v)
    }

    pub fn concat(&self, other: &LabelPath) -> LabelPath {
        LabelPath(self.0.iter().chain(&other.0).cloned().collect())
    }

    pub fn is_prefix_of(&self, other: &LabelPath) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_proper_prefix_of(&self, other: &LabelPath) -> bool {
        self.len() < other.len() && self.is_prefix_of(other)
    }
}

impl fmt::Display for LabelPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        write_labels(f, &self.0, "/")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Entry {
    pub labels: BTreeSet<Label>,
    pub dfs: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SibMap {
    entries: BTreeMap<LabelPath, Entry>,
}

/// `ψ(u)`: the label of `u` when `u` is DF, nothing otherwise.
pub fn psi(u: &SgNode) -> BTreeSet<Label> {
    if u.df {
        BTreeSet::from([u.label.clone()])
    } else {
        BTreeSet::new()
    }
}

impl SibMap {
    pub fn new() -> Self {
        SibMap::default()
    }

    /// A map with the single entry `key ↦ labels`.
    pub fn singleton(key: LabelPath, labels: BTreeSet<Label>, dfs: bool) -> Self {
        let mut m = SibMap::new();
        m.add(key, labels, dfs);
        m
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// True when no entry requires any label.
    pub fn is_trivial(&self) -> bool {
        self.entries.values().all(|e| e.labels.is_empty())
    }

    pub fn get(&self, key: &LabelPath) -> Option<&Entry> {
        self.entries.get(key)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&LabelPath, &Entry)> {
        self.entries.iter()
    }

    pub fn remove(&mut self, key: &LabelPath) -> Option<Entry> {
        self.entries.remove(key)
    }

    /// Joins `key ↦ labels` into the map.
    ///
    /// # Panics
    /// If `key` is already present with a different DFS flag; flags are a
    /// function of the path, so a mismatch is a bookkeeping error.
    pub fn add(&mut self, key: LabelPath, labels: BTreeSet<Label>, dfs: bool) {
        match self.entries.get_mut(&key) {
            Some(e) => {
                assert_eq!(e.dfs, dfs, "DFS flag mismatch on key {key}");
                e.labels.extend(labels);
            }
            None => {
                self.entries.insert(key, Entry { labels, dfs });
            }
        }
    }

    /// Least upper bound: pointwise union.
    pub fn join(&self, other: &SibMap) -> SibMap {
        let mut out = self.clone();
        for (k, e) in &other.entries {
            out.add(k.clone(), e.labels.clone(), e.dfs);
        }
        out
    }

    /// Keeps entries that are DFS or whose key is a proper prefix of
    /// `current`.
    pub fn restrict_dfs(&self, current: &LabelPath) -> SibMap {
        self.retain(|k, e| e.dfs || k.is_proper_prefix_of(current))
    }

    /// Keeps entries that are DFS or whose key is a prefix of `current`,
    /// including `current` itself.
    pub fn restrict_to_path(&self, current: &LabelPath) -> SibMap {
        self.retain(|k, e| e.dfs || k.is_prefix_of(current))
    }

    pub fn retain(&self, mut keep: impl FnMut(&LabelPath, &Entry) -> bool) -> SibMap {
        SibMap {
            entries: self.entries.iter().filter(|(k, e)| keep(k, e)).map(|(k, e)| (k.clone(), e.clone())).collect(),
        }
    }

    /// Prefixes every key with `prefix`; an entry stays DFS only if the
    /// prefix is.
    pub fn shift(&self, prefix: &LabelPath, prefix_dfs: bool) -> SibMap {
        SibMap {
            entries: self
                .entries
                .iter()
                .map(|(k, e)| (prefix.concat(k), Entry { labels: e.labels.clone(), dfs: e.dfs && prefix_dfs }))
                .collect(),
        }
    }

    /// Whether the entry at `key` can be realized, i.e. some word of the
    /// content model of the key's last label contains all required labels.
    /// `ε` keys and absent keys impose nothing.
    pub fn consistent_at(&self, key: &LabelPath, dtd: &Dtd) -> bool {
        match (self.entries.get(key), key.last()) {
            (Some(e), Some(l)) => entry_coverable(dtd, l, &e.labels),
            _ => true,
        }
    }

    pub fn consistent(&self, dtd: &Dtd) -> bool {
        self.entries.keys().all(|k| self.consistent_at(k, dtd))
    }

    /// Keys whose entry cannot be realized.
    pub fn inconsistent_keys(&self, dtd: &Dtd) -> Vec<LabelPath> {
        self.entries.keys().filter(|k| !self.consistent_at(k, dtd)).cloned().collect()
    }
}

/// Entries only ever hold DF children of the key's last label. A label that
/// is not one trips a debug assertion; release builds treat the entry as
/// unrealizable.
pub(crate) fn entry_coverable(dtd: &Dtd, parent: &Label, labels: &BTreeSet<Label>) -> bool {
    let Some(e) = dtd.model(parent) else {
        debug_assert!(false, "no content model for `{parent}`");
        return false;
    };
    let result = coverable(e, labels);
    debug_assert!(result.is_ok(), "entry under `{parent}`: {result:?}");
    result.unwrap_or(false)
}

impl fmt::Display for SibMap {
    /// `{r↦{b,c}, rb↦{a}}`; the empty map is `β⊥`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("β⊥");
        }
        f.write_str("{")?;
        for (i, (k, e)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}↦")?;
            write_label_set(f, &e.labels)?;
        }
        f.write_str("}")
    }
}

pub(crate) fn write_label_set(f: &mut fmt::Formatter<'_>, labels: &BTreeSet<Label>) -> fmt::Result {
    if labels.is_empty() {
        return f.write_str("∅");
    }
    f.write_str("{")?;
    for (i, l) in labels.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        f.write_str(l.as_str())?;
    }
    f.write_str("}")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("label `{0}` does not occur in the content model")]
    Absent(Label),
    #[error("label `{0}` occurs more than once in the content model")]
    NotUnique(Label),
}

/// Whether some word of `L(e)` contains every label of `s`. Each label of
/// `s` must occur exactly once in `e`.
pub fn coverable(e: &ContentModel, s: &BTreeSet<Label>) -> Result<bool, CoverError> {
    for l in s {
        match e.occurrences(l) {
            0 => return Err(CoverError::Absent(l.clone())),
            1 => {}
            _ => return Err(CoverError::NotUnique(l.clone())),
        }
    }
    Ok(cover(e, s))
}

fn cover(e: &ContentModel, s: &BTreeSet<Label>) -> bool {
    match e {
        ContentModel::Epsilon => s.is_empty(),
        ContentModel::Symbol(a) => s.iter().all(|l| l == a),
        ContentModel::Concat(fs) => fs.iter().all(|f| {
            let syms = f.symbols();
            let part: BTreeSet<Label> = s.iter().filter(|l| syms.contains(*l)).cloned().collect();
            cover(f, &part)
        }),
        ContentModel::Disj(alts) => alts.iter().any(|a| s.is_subset(&a.symbols()) && cover(a, s)),
        ContentModel::Star(inner) | ContentModel::Plus(inner) => s.is_subset(&inner.symbols()),
        ContentModel::Opt(inner) => cover(inner, s),
        ContentModel::Hash(l, r) => cover(&ContentModel::concat(l.iter().chain(r).cloned().collect()), s),
    }
}

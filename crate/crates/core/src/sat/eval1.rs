//! Top-down evaluation for `/`-compositions of child, parent and sibling
//! steps.
//!
//! The state is a stack of node sets `U0 … Un`, one per depth of the current
//! path, all nodes of a level sharing one label. The constraint map is split
//! into the entries on the current path (stored on the levels) and DFS
//! entries that were left behind (`detached`). Every step touches a constant
//! number of levels and re-checks consistency only at the key it changed, so
//! a step costs time proportional to the nodes it inspects.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::constraints::{entry_coverable, psi, LabelPath, SibMap};
use crate::label::Label;
use crate::schema_graph::{NodeId, SchemaGraph};
use crate::xpath::Axis;

#[derive(Debug, Clone)]
struct Level {
    nodes: Vec<NodeId>,
    label: Label,
    /// Every node on the path down to and including this level is DFS.
    path_dfs: bool,
    /// Required DF children of this level's nodes.
    entry: Option<BTreeSet<Label>>,
}

#[derive(Debug, Clone)]
pub struct Eval1State {
    levels: Vec<Level>,
    detached: SibMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepFailure {
    /// No schema-graph node matches the step.
    NoMatch,
    /// `parent` from the root.
    AtRoot,
    /// `parent::l` where the parent's label is not `l`.
    ParentLabel { expected: String, found: String },
    /// The updated constraint map cannot be realized.
    Inconsistent { map: String, key: String },
}

impl fmt::Display for StepFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepFailure::NoMatch => f.write_str("no schema-graph node matches"),
            StepFailure::AtRoot => f.write_str("the root has no parent or siblings"),
            StepFailure::ParentLabel { expected, found } => {
                write!(f, "parent is labelled {found}, not {expected}")
            }
            StepFailure::Inconsistent { map, key } => write!(f, "{map} is not consistent at {key}"),
        }
    }
}

impl Eval1State {
    pub fn initial(g: &SchemaGraph) -> Self {
        Eval1State {
            levels: vec![Level {
                nodes: vec![SchemaGraph::ROOT],
                label: g.label(SchemaGraph::ROOT).clone(),
                path_dfs: true,
                entry: None,
            }],
            detached: SibMap::new(),
        }
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn last_nodes(&self) -> &[NodeId] {
        &self.levels[self.depth()].nodes
    }

    fn key(&self, level: usize) -> LabelPath {
        LabelPath(self.levels[..=level].iter().map(|l| l.label.clone()).collect())
    }

    /// The whole constraint map.
    pub fn map(&self) -> SibMap {
        let mut m = self.detached.clone();
        for (i, l) in self.levels.iter().enumerate() {
            if let Some(e) = &l.entry {
                m.add(self.key(i), e.clone(), l.path_dfs);
            }
        }
        m
    }

    /// Leaves level `i`: its entry survives only if its path is DFS.
    fn detach(&mut self, i: usize) {
        if self.levels[i].path_dfs {
            if let Some(e) = self.levels[i].entry.take() {
                let key = self.key(i);
                self.detached.add(key, e, true);
            }
        }
    }

    /// Enters a level at depth `i` (replacing or pushing), picking up a
    /// detached entry for the same DFS path.
    fn enter(&mut self, i: usize, nodes: Vec<NodeId>, label: Label, g: &SchemaGraph) {
        let path_dfs = self.levels[i - 1].path_dfs && nodes.iter().all(|&u| g.node(u).dfs);
        let level = Level { nodes, label, path_dfs, entry: None };
        if i == self.levels.len() {
            self.levels.push(level);
        } else {
            self.levels[i] = level;
        }
        if path_dfs && !self.detached.is_empty() {
            let key = self.key(i);
            self.levels[i].entry = self.detached.remove(&key).map(|e| e.labels);
        }
    }

    /// Records `ψ(u)` among the children of level `i` and checks that entry.
    fn record(&mut self, i: usize, u: NodeId, g: &SchemaGraph) -> Result<(), StepFailure> {
        let level = &mut self.levels[i];
        let entry = level.entry.get_or_insert_with(BTreeSet::new);
        entry.extend(psi(g.node(u)));
        if entry_coverable(g.dtd(), &level.label, entry) {
            Ok(())
        } else {
            Err(StepFailure::Inconsistent { map: self.map().to_string(), key: self.key(i).to_string() })
        }
    }

    /// Applies one step in place. On failure the state reflects the step's
    /// partial effect, which is what diagnostics print.
    pub fn step(&mut self, axis: Axis, l: &Label, g: &SchemaGraph) -> Result<(), StepFailure> {
        let n = self.depth();
        match axis {
            Axis::Child => {
                let next = g.children_with_label(&self.levels[n].label, l).to_vec();
                let Some(&first) = next.first() else {
                    return Err(StepFailure::NoMatch);
                };
                self.record(n, first, g)?;
                self.enter(n + 1, next, l.clone(), g);
                Ok(())
            }
            Axis::Parent => {
                if n == 0 {
                    return Err(StepFailure::AtRoot);
                }
                if &self.levels[n - 1].label != l {
                    return Err(StepFailure::ParentLabel {
                        expected: l.to_string(),
                        found: self.levels[n - 1].label.to_string(),
                    });
                }
                self.detach(n);
                self.levels.pop();
                Ok(())
            }
            Axis::FollSibling | Axis::PrecSibling => {
                if n == 0 {
                    return Err(StepFailure::AtRoot);
                }
                let current = &self.levels[n].nodes;
                let next: Vec<NodeId> = g
                    .children_with_label(&self.levels[n - 1].label, l)
                    .iter()
                    .copied()
                    .filter(|&v| {
                        current.iter().any(|&u| match axis {
                            Axis::FollSibling => g.may_follow(u, v),
                            _ => g.may_follow(v, u),
                        })
                    })
                    .collect();
                let Some(&first) = next.first() else {
                    return Err(StepFailure::NoMatch);
                };
                self.detach(n);
                self.enter(n, next, l.clone(), g);
                self.record(n - 1, first, g)
            }
            Axis::DescOrSelf | Axis::AncOrSelf => {
                unreachable!("transitive axes are routed away from this procedure")
            }
        }
    }
}

impl fmt::Display for Eval1State {
    /// `({u0}{u1,u5}, {r↦∅})`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for l in &self.levels {
            f.write_str("{")?;
            for (i, u) in l.nodes.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{u}")?;
            }
            f.write_str("}")?;
        }
        write!(f, ", {})", self.map())
    }
}

/// Result of running the procedure over a step sequence.
#[derive(Debug, Clone)]
pub struct Eval1Run {
    pub state: Eval1State,
    /// Index of the failing step and why it failed.
    pub failure: Option<(usize, StepFailure)>,
    /// Rendered state after each step, when tracing.
    pub trace: Vec<String>,
}

pub fn eval1(steps: &[(Axis, Label)], g: &SchemaGraph, trace: bool) -> Eval1Run {
    let mut state = Eval1State::initial(g);
    let mut lines = Vec::new();
    if trace {
        lines.push(format!("start: {state}"));
    }
    for (i, (axis, l)) in steps.iter().enumerate() {
        let result = state.step(*axis, l, g);
        if trace {
            let step = format!("{}::{}", axis.arrow(), l);
            match &result {
                Ok(()) => lines.push(format!("{step}: {state}")),
                Err(StepFailure::Inconsistent { .. }) => lines.push(format!("{step}: {state} (inconsistent)")),
                Err(e) => lines.push(format!("{step}: fails ({e})")),
            }
        }
        if let Err(e) = result {
            return Eval1Run { state, failure: Some((i, e)), trace: lines };
        }
    }
    Eval1Run { state, failure: None, trace: lines }
}

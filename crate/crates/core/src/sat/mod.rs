//! Satisfiability of XPath expressions under MRW DTDs.
//!
//! The DTD is checked to be MRW and simplified by `δ` to an MDF/DC DTD with
//! the same satisfiability behavior; its schema graph is then searched by
//! one of two procedures depending on the expression's fragment.

mod eval1;
mod eval2;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::dtd::{Dtd, DtdError};
use crate::schema_graph::{GraphError, SchemaGraph};
use crate::xpath::{Fragment, XPath};

pub use eval1::{eval1, Eval1Run, Eval1State, StepFailure};
pub use eval2::{eval2, Eval2Run, Tuple, TupleSet};

#[derive(Debug, Error)]
pub enum SatError {
    #[error(transparent)]
    NotMrw(DtdError),
    #[error("expression uses {0}, which neither procedure decides (no upward axes together with qualifiers, no unions, no transitive axes, no qualifier disjunction)")]
    UnsupportedFragment(Fragment),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Eval1,
    Eval2,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Eval1 => "eval1",
            Algorithm::Eval2 => "eval2",
        })
    }
}

/// Why an expression was found unsatisfiable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    /// 0-based index of the failing step (top-down procedure only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub satisfiable: bool,
    pub algorithm: Algorithm,
    /// The final state (top-down) or the tuples of the whole expression
    /// (bottom-up).
    pub final_state: String,
    pub trace: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
    /// Largest intermediate tuple set (bottom-up only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_tuples: Option<usize>,
}

impl Verdict {
    pub fn word(&self) -> &'static str {
        if self.satisfiable {
            "SAT"
        } else {
            "UNSAT"
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("verdicts serialize");
        v["verdict"] = self.word().into();
        v
    }
}

/// A DTD prepared for repeated queries.
#[derive(Debug, Clone)]
pub struct Checker {
    graph: SchemaGraph,
}

impl Checker {
    pub fn new(dtd: &Dtd) -> Result<Self, SatError> {
        dtd.check_mrw().map_err(SatError::NotMrw)?;
        let simple = dtd.delta().map_err(SatError::NotMrw)?;
        Ok(Checker { graph: SchemaGraph::build(&simple)? })
    }

    pub fn graph(&self) -> &SchemaGraph {
        &self.graph
    }

    /// Which procedure decides `p`.
    pub fn route(p: &XPath) -> Result<Algorithm, SatError> {
        let frag = p.fragment();
        if frag.is_eval1() {
            Ok(Algorithm::Eval1)
        } else if frag.is_eval2() {
            Ok(Algorithm::Eval2)
        } else {
            Err(SatError::UnsupportedFragment(frag))
        }
    }

    pub fn check(&self, p: &XPath) -> Result<Verdict, SatError> {
        self.check_with(p, false)
    }

    /// Like [`Checker::check`], recording the intermediate states.
    pub fn check_with(&self, p: &XPath, trace: bool) -> Result<Verdict, SatError> {
        match Self::route(p)? {
            Algorithm::Eval1 => {
                let steps = p.flatten_steps().expect("routed expressions are step sequences");
                let run = eval1(&steps, &self.graph, trace);
                Ok(Verdict {
                    satisfiable: run.failure.is_none(),
                    algorithm: Algorithm::Eval1,
                    final_state: run.state.to_string(),
                    trace: run.trace,
                    failure: run.failure.map(|(i, e)| Failure {
                        step: Some(i),
                        reason: format!("step {} ({}::{}): {e}", i + 1, steps[i].0.arrow(), steps[i].1),
                    }),
                    max_tuples: None,
                })
            }
            Algorithm::Eval2 => {
                let run = eval2(&p.split_conjunctions(), &self.graph, trace);
                let satisfiable = run.accepting().next().is_some();
                let failure = (!satisfiable).then(|| Failure {
                    step: None,
                    reason: match run.sizes.iter().find(|(_, n)| *n == 0) {
                        Some((sub, _)) => format!("{sub} has no consistent match"),
                        None => "no match starts at the root".to_string(),
                    },
                });
                Ok(Verdict {
                    satisfiable,
                    algorithm: Algorithm::Eval2,
                    final_state: run.tuples.to_string(),
                    max_tuples: Some(run.max_size()),
                    trace: run.trace,
                    failure,
                })
            }
        }
    }
}

/// Decides whether some document valid for `dtd` has a node selected by `p`
/// from the root.
pub fn satisfiable(p: &XPath, dtd: &Dtd) -> Result<bool, SatError> {
    Ok(Checker::new(dtd)?.check(p)?.satisfiable)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> Dtd {
        Dtd::from_compact(&[("r", "r*(a*b|c)r*"), ("a", "eps"), ("b", "a"), ("c", "eps")]).unwrap()
    }

    #[test]
    fn routing() {
        let d = example();
        let q = |s: &str| XPath::parse(s).unwrap();
        assert!(satisfiable(&q("↓::r/→⁺::b/↓::a/↑::b"), &d).unwrap());
        assert!(!satisfiable(&q("↓::r/→⁺::b/↓::a/↑::b/→⁺::c"), &d).unwrap());
        assert!(satisfiable(&q("↓::r/→⁺::b[↓::a]"), &d).unwrap());
        assert!(!satisfiable(&q("↓::r/→⁺::b[↓::a]/→⁺::c"), &d).unwrap());
        assert!(matches!(satisfiable(&q("↓::r[↓::b]/↑::r"), &d), Err(SatError::UnsupportedFragment(_))));
        assert!(matches!(satisfiable(&q("↓::r | ↓::c"), &d), Err(SatError::UnsupportedFragment(_))));
        let not_mrw = Dtd::from_compact(&[("r", "(ab)*|a"), ("a", "eps"), ("b", "eps")]).unwrap();
        assert!(matches!(satisfiable(&q("↓::a"), &not_mrw), Err(SatError::NotMrw(_))));
    }

    #[test]
    fn verdict_json() {
        let c = Checker::new(&example()).unwrap();
        let v = c.check_with(&XPath::parse("↓::r/→⁺::b").unwrap(), true).unwrap();
        let j = v.to_json();
        assert_eq!(j["verdict"], "SAT");
        assert_eq!(j["algorithm"], "eval1");
        assert_eq!(j["final_state"], "({u0}{u3}, {r↦{b}})");
        assert_eq!(j["trace"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn delta_preserves_behavior_on_operators() {
        // `?`, `+` and `#` are simplified away before the graph is built.
        let d =
            Dtd::from_compact(&[("r", "a?(b#c)d+"), ("a", "eps"), ("b", "eps"), ("c", "eps"), ("d", "eps")]).unwrap();
        let q = |s: &str| XPath::parse(s).unwrap();
        assert!(satisfiable(&q("↓::b/→⁺::c"), &d).unwrap());
        assert!(satisfiable(&q("↓::d/→⁺::d"), &d).unwrap());
        assert!(!satisfiable(&q("↓::c/→⁺::b"), &d).unwrap());
    }
}

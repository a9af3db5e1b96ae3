//! Structural checks and the translation-lattice contract.

use std::fmt;

use crate::error::{Error, Result};
use crate::fst::{StateId, Wfst};
use crate::semiring::{feature, FeatureId};
use crate::symbols::{EPSILON, UNK};

/// Which lattice contract, if any, a machine must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeKind {
    /// NMT lattice: acyclic acceptor, UNK allowed, weights carry `nmt_score` only.
    Nmt,
    /// Hiero lattice: acyclic acceptor, no UNK, weights carry `hiero_score` only.
    Hiero,
    /// Any transducer; cycles are reported as warnings.
    Generic,
}

impl LatticeKind {
    pub fn score_feature(self) -> Option<FeatureId> {
        match self {
            LatticeKind::Nmt => Some(feature::NMT_SCORE),
            LatticeKind::Hiero => Some(feature::HIERO_SCORE),
            LatticeKind::Generic => None,
        }
    }

    pub fn is_lattice(self) -> bool {
        self != LatticeKind::Generic
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LatticeKind::Nmt => "nmt",
            LatticeKind::Hiero => "hiero",
            LatticeKind::Generic => "generic",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Issue {
    NoInitialState,
    DanglingArc {
        source: StateId,
        target: StateId,
    },
    Unreachable(StateId),
    DeadEnd(StateId),
    NoFinalState,
    Cycle(Vec<StateId>),
    NotAcceptor {
        source: StateId,
        ilabel: u32,
        olabel: u32,
    },
    UnkInHiero {
        source: StateId,
    },
    EpsilonOnly,
    ForeignFeature {
        source: Option<StateId>,
        feature: FeatureId,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub issue: Issue,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{level}: ")?;
        match &self.issue {
            Issue::NoInitialState => write!(f, "no initial state"),
            Issue::DanglingArc { source, target } => {
                write!(f, "arc from state {source} to nonexistent state {target}")
            }
            Issue::Unreachable(s) => write!(f, "state {s} is not reachable from the initial state"),
            Issue::DeadEnd(s) => write!(f, "state {s} cannot reach a final state"),
            Issue::NoFinalState => write!(f, "no final state"),
            Issue::Cycle(states) => {
                let mut parts: Vec<String> = states.iter().map(|s| s.to_string()).collect();
                if let Some(first) = states.first() {
                    parts.push(first.to_string());
                }
                write!(f, "cycle through states {}", parts.join(" -> "))
            }
            Issue::NotAcceptor { source, ilabel, olabel } => write!(
                f,
                "arc from state {source} has input label {ilabel} but output label {olabel}; lattices must be acceptors"
            ),
            Issue::UnkInHiero { source } => {
                write!(
                    f,
                    "arc from state {source} carries UNK, which Hiero lattices must not contain"
                )
            }
            Issue::EpsilonOnly => write!(f, "machine accepts only the empty string"),
            Issue::ForeignFeature { source, feature } => match source {
                Some(s) => write!(
                    f,
                    "weight on an arc from state {s} carries unexpected feature {feature}"
                ),
                None => write!(f, "a final weight carries unexpected feature {feature}"),
            },
        }
    }
}

/// Check `fst` against the structural rules and the contract of `kind`.
///
/// Never fails; everything found is returned as a diagnostic.
pub fn validate(fst: &Wfst, kind: LatticeKind) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |severity, issue| out.push(Diagnostic { severity, issue });
    let n = fst.num_states();

    let mut dangling = false;
    for (src, arc) in fst.all_arcs() {
        if arc.nextstate >= n {
            dangling = true;
            push(
                Severity::Error,
                Issue::DanglingArc {
                    source: src,
                    target: arc.nextstate,
                },
            );
        }
    }

    match fst.initial() {
        None => push(Severity::Error, Issue::NoInitialState),
        Some(s) if s >= n => push(Severity::Error, Issue::NoInitialState),
        Some(_) => {}
    }
    if fst.finals().next().is_none() {
        push(Severity::Error, Issue::NoFinalState);
    }

    if !dangling {
        if let (Some(init), true) = (fst.initial(), fst.initial().is_some_and(|s| s < n)) {
            let forward = crate::algorithms::connect::accessible(fst, init);
            let backward = crate::algorithms::connect::coaccessible(fst);
            for s in fst.states() {
                if !forward[s] {
                    push(Severity::Warning, Issue::Unreachable(s));
                } else if !backward[s] {
                    push(Severity::Warning, Issue::DeadEnd(s));
                }
            }
        }
        if let Some(cycle) = fst.find_cycle() {
            let severity = if kind.is_lattice() {
                Severity::Error
            } else {
                Severity::Warning
            };
            push(severity, Issue::Cycle(cycle));
        }
    }

    if let Some(score) = kind.score_feature() {
        for (src, arc) in fst.all_arcs() {
            if arc.ilabel != arc.olabel {
                push(
                    Severity::Error,
                    Issue::NotAcceptor {
                        source: src,
                        ilabel: arc.ilabel,
                        olabel: arc.olabel,
                    },
                );
            }
            if kind == LatticeKind::Hiero && (arc.ilabel == UNK || arc.olabel == UNK) {
                push(Severity::Error, Issue::UnkInHiero { source: src });
            }
            if let Some(&(f, _)) = arc.weight.entries().iter().find(|(id, _)| *id != score) {
                push(
                    Severity::Error,
                    Issue::ForeignFeature {
                        source: Some(src),
                        feature: f,
                    },
                );
            }
        }
        for (_, w) in fst.finals() {
            if let Some(&(f, _)) = w.entries().iter().find(|(id, _)| *id != score) {
                push(
                    Severity::Error,
                    Issue::ForeignFeature {
                        source: None,
                        feature: f,
                    },
                );
            }
        }
        if fst.num_arcs() > 0 && fst.all_arcs().all(|(_, a)| a.ilabel == EPSILON) {
            push(Severity::Warning, Issue::EpsilonOnly);
        }
    }
    out
}

/// First error-level diagnostic as an [`Error`], if any.
pub fn ensure_valid(fst: &Wfst, kind: LatticeKind) -> Result<()> {
    match validate(fst, kind).into_iter().find(|d| d.severity == Severity::Error) {
        None => Ok(()),
        Some(Diagnostic {
            issue: Issue::Cycle(states),
            ..
        }) => Err(Error::Cycle(states)),
        Some(d) => Err(Error::contract(d.to_string().trim_start_matches("error: ").to_string())),
    }
}

/// A validated NMT or Hiero lattice.
///
/// Acyclic acceptor whose weights carry only the score feature of its kind.
#[derive(Clone, Debug)]
pub struct TranslationLattice {
    fst: Wfst,
    kind: LatticeKind,
}

impl TranslationLattice {
    pub fn new(fst: Wfst, kind: LatticeKind) -> Result<Self> {
        if !kind.is_lattice() {
            return Err(Error::contract("a translation lattice must be of kind nmt or hiero"));
        }
        ensure_valid(&fst, kind)?;
        Ok(TranslationLattice { fst, kind })
    }

    pub fn fst(&self) -> &Wfst {
        &self.fst
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn into_fst(self) -> Wfst {
        self.fst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::Arc;
    use crate::semiring::FeatureWeight;

    fn errors(d: &[Diagnostic]) -> Vec<&Issue> {
        d.iter()
            .filter(|d| d.severity == Severity::Error)
            .map(|d| &d.issue)
            .collect()
    }

    #[test]
    fn clean_chain() {
        let chain = Wfst::string_acceptor(&[2, 3]);
        assert!(validate(&chain, LatticeKind::Generic).is_empty());
        assert!(validate(&chain, LatticeKind::Hiero).is_empty());
    }

    #[test]
    fn dangling_arc_listed() {
        let f = Wfst::from_raw_parts(
            2,
            Some(0),
            vec![(0, Arc::new(2, 2, FeatureWeight::one(), 5))],
            vec![(1, FeatureWeight::one())],
        );
        let d = validate(&f, LatticeKind::Generic);
        assert!(errors(&d).contains(&&Issue::DanglingArc { source: 0, target: 5 }));
    }

    #[test]
    fn unk_in_hiero_rejected() {
        let f = Wfst::string_acceptor(&[2, UNK, 3]);
        let d = validate(&f, LatticeKind::Hiero);
        assert_eq!(errors(&d), vec![&Issue::UnkInHiero { source: 1 }]);
        assert!(validate(&f, LatticeKind::Nmt).is_empty());
        assert!(TranslationLattice::new(f, LatticeKind::Hiero).is_err());
    }

    #[test]
    fn cycle_severity_depends_on_kind() {
        let mut f = Wfst::string_acceptor(&[2, 3]);
        f.add_arc(2, Arc::new(4, 4, FeatureWeight::one(), 0)).unwrap();
        let generic = validate(&f, LatticeKind::Generic);
        assert!(errors(&generic).is_empty());
        assert!(matches!(
            ensure_valid(&f, LatticeKind::Nmt),
            Err(Error::Cycle(states)) if states == vec![0, 1, 2]
        ));
    }

    #[test]
    fn foreign_feature_and_transducer_arcs() {
        let mut f = Wfst::linear([(2, 3, FeatureWeight::single(feature::HIERO_SCORE, 1.0))]);
        f.set_final(1, FeatureWeight::single(feature::EDIT_COUNT, 1.0)).unwrap();
        let d = validate(&f, LatticeKind::Nmt);
        let e = errors(&d);
        assert_eq!(e.len(), 3);
    }
}

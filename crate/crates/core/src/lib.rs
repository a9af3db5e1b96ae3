//! Weighted finite-state machinery for combining an NMT lattice that
//! contains UNK tokens with a Hiero lattice.
//!
//! The NMT lattice is composed with an edit-distance transducer and the
//! Hiero lattice; the single best path of the result gives the NMT
//! hypothesis with its UNKs filled from the Hiero hypothesis it aligns to.
//! Weights are sparse feature vectors compared through a linear model, see
//! [`FeatureWeight`].

pub mod algorithms;
pub mod edit;
pub mod error;
pub mod fst;
pub mod io;
pub mod oracle;
pub mod pipeline;
pub mod semiring;
pub mod symbols;
pub mod validate;

pub use edit::{EditClass, EditCostModel};
pub use error::{Error, Result};
pub use fst::{Arc, StateId, Wfst};
pub use pipeline::{combine, CombinationParams, CombinationResult, CorpusReport, EditStats};
pub use semiring::{feature, FeatureId, FeatureWeight, ParamVector, TropicalWeight};
pub use symbols::{Label, SymbolTable, EPSILON, UNK};
pub use validate::{LatticeKind, TranslationLattice};

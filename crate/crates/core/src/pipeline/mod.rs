//! Loose coupling of an NMT lattice with a Hiero lattice.
//!
//! 1. Prune the Hiero lattice to the node budget.
//! 2. Let every NMT UNK stand for a run of up to `max_unk_run` UNKs.
//! 3. Compose with the modified edit transducer, then with the Hiero lattice.
//! 4. Take the single best path.
//! 5. Read off the NMT side, the Hiero side and the combined translation.

mod report;

use std::collections::HashSet;

use log::{debug, warn};

pub use report::{corpus_report, ComponentSummary, CorpusReport};

use crate::algorithms::{
    compose, project_input, project_output, project_unk, prune_to_node_budget, replace, shortest_path, PathWitness,
};
use crate::edit::{build_modified_edit_fst, build_unk_insertion_fst, check_lambdas, EditClass, EditCostModel};
use crate::error::{Error, Result};
use crate::oracle::synth::count_paths;
use crate::oracle::{OracleCosts, OracleParams};
use crate::semiring::{feature, FeatureWeight, ParamVector};
use crate::symbols::{Label, EPSILON, UNK};
use crate::validate::{LatticeKind, TranslationLattice};

/// NMT lattices beyond this many paths trigger a warning.
pub const NMT_PATH_WARNING: u128 = 20;

pub const DEFAULT_MAX_UNK_RUN: usize = 3;
pub const DEFAULT_HIERO_NODE_BUDGET: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct CombinationParams {
    pub lambda_nmt: f64,
    pub lambda_hiero: f64,
    pub lambda_sub: f64,
    pub lambda_edit: f64,
    pub lambda_ins: f64,
    pub max_unk_run: usize,
    pub hiero_node_budget: usize,
    pub nmt_vocab: HashSet<Label>,
}

impl CombinationParams {
    pub fn new(
        lambda_nmt: f64,
        lambda_hiero: f64,
        lambda_sub: f64,
        lambda_edit: f64,
        lambda_ins: f64,
        nmt_vocab: HashSet<Label>,
    ) -> Result<Self> {
        let p = CombinationParams {
            lambda_nmt,
            lambda_hiero,
            lambda_sub,
            lambda_edit,
            lambda_ins,
            max_unk_run: DEFAULT_MAX_UNK_RUN,
            hiero_node_budget: DEFAULT_HIERO_NODE_BUDGET,
            nmt_vocab,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_lambdas(self.lambda_sub, self.lambda_edit, self.lambda_ins)?;
        for (name, v) in [("lambda_nmt", self.lambda_nmt), ("lambda_hiero", self.lambda_hiero)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::contract(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        if self.max_unk_run == 0 {
            return Err(Error::contract("max_unk_run must be at least 1"));
        }
        if self.hiero_node_budget == 0 {
            return Err(Error::contract("hiero_node_budget must be at least 1"));
        }
        if self.nmt_vocab.contains(&UNK) || self.nmt_vocab.contains(&EPSILON) {
            return Err(Error::contract("the NMT vocabulary cannot contain UNK or ε"));
        }
        Ok(())
    }

    pub fn param_vector(&self) -> ParamVector {
        ParamVector::new(
            self.lambda_nmt,
            self.lambda_hiero,
            self.lambda_edit,
            self.lambda_sub,
            self.lambda_ins,
        )
    }

    /// Same costs for the brute-force reference combiner.
    pub fn oracle_params(&self, max_paths: usize) -> OracleParams {
        OracleParams {
            costs: OracleCosts {
                nmt_vocab: self.nmt_vocab.clone(),
                lambda_sub: self.lambda_sub,
                lambda_edit: self.lambda_edit,
                lambda_ins: self.lambda_ins,
            },
            lambda_nmt: self.lambda_nmt,
            lambda_hiero: self.lambda_hiero,
            max_unk_run: self.max_unk_run,
            max_paths,
        }
    }

    /// All five λ multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        CombinationParams {
            lambda_nmt: self.lambda_nmt * factor,
            lambda_hiero: self.lambda_hiero * factor,
            lambda_sub: self.lambda_sub * factor,
            lambda_edit: self.lambda_edit * factor,
            lambda_ins: self.lambda_ins * factor,
            ..self.clone()
        }
    }
}

/// Edit operations along the best combined path.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EditStats {
    /// UNKs beyond the first in each expanded run.
    pub unk_extensions: usize,
    /// UNK → out-of-vocabulary fills (free).
    pub type1_fills: usize,
    /// UNK → in-vocabulary substitutions.
    pub type2_subs: usize,
    /// All other edits.
    pub type3_edits: usize,
    pub exact_match: bool,
}

#[derive(Clone, Debug)]
pub struct CombinationResult {
    pub source_id: Option<String>,
    /// NMT hypothesis with UNKs filled from the Hiero side.
    pub t_comb: Vec<Label>,
    /// NMT hypothesis used for the combination (after UNK expansion).
    pub t_nmt: Vec<Label>,
    /// Hiero hypothesis used for the combination.
    pub t_hiero: Vec<Label>,
    pub total_cost: f64,
    pub feature_vector: FeatureWeight,
    pub stats: EditStats,
    pub path: PathWitness,
}

/// Combine one sentence's NMT and Hiero lattices.
pub fn combine(
    nmt: &TranslationLattice,
    hiero: &TranslationLattice,
    params: &CombinationParams,
) -> Result<CombinationResult> {
    params.validate()?;
    if nmt.kind() != LatticeKind::Nmt || hiero.kind() != LatticeKind::Hiero {
        return Err(Error::contract("combine expects an NMT lattice and a Hiero lattice"));
    }
    for (name, l) in [("NMT", nmt), ("Hiero", hiero)] {
        if l.fst().initial().is_none() || count_paths(l.fst()) == 0 {
            return Err(Error::contract(format!("{name} lattice is empty")));
        }
    }
    let nmt_paths = count_paths(nmt.fst());
    if nmt_paths > NMT_PATH_WARNING {
        warn!("NMT lattice has {nmt_paths} paths; combination cost grows with its size");
    }

    let hiero_only = ParamVector::new(0.0, 1.0, 0.0, 0.0, 0.0);
    let pruned;
    let h = if hiero.fst().num_states() > params.hiero_node_budget {
        pruned = prune_to_node_budget(hiero.fst(), params.hiero_node_budget, &hiero_only)?;
        debug!(
            "pruned Hiero lattice from {} to {} states",
            hiero.fst().num_states(),
            pruned.num_states()
        );
        &pruned
    } else {
        hiero.fst()
    };

    let unk_runs = build_unk_insertion_fst(params.max_unk_run)?;
    let expanded = replace(nmt.fst(), UNK, &unk_runs)?;

    let mut alphabet = expanded.labels();
    alphabet.extend(h.labels());
    let model = EditCostModel::new(
        params.nmt_vocab.clone(),
        alphabet,
        params.lambda_sub,
        params.lambda_edit,
        params.lambda_ins,
    )?;
    let edit = build_modified_edit_fst(&model)?;

    let left = compose(&expanded, &edit)?;
    let combined = compose(&left, h)?;
    debug!(
        "combined machine: {} states, {} arcs",
        combined.num_states(),
        combined.num_arcs()
    );
    let pv = params.param_vector();
    let path = shortest_path(&combined, &pv)?;
    let stats = decompose_alignment(&path, &model)?;

    Ok(CombinationResult {
        source_id: None,
        t_comb: project_unk(&path),
        t_nmt: project_input(&path),
        t_hiero: project_output(&path),
        total_cost: path.total.scalarize(&pv).value(),
        feature_vector: path.total.clone(),
        stats,
        path,
    })
}

/// Classify every arc of a combined path and count the edit operations.
///
/// Fails if an arc cannot come from the model's edit transducer or if the
/// counts disagree with the path's feature vector.
pub fn decompose_alignment(path: &PathWitness, model: &EditCostModel) -> Result<EditStats> {
    let mut stats = EditStats::default();
    let known = |l: Label| l == EPSILON || l == UNK || model.alphabet().contains(&l);
    for arc in &path.arcs {
        let (x, y) = (arc.ilabel, arc.olabel);
        if y == UNK {
            return Err(Error::Consistency("UNK on the Hiero side of an alignment".into()));
        }
        if !known(x) || !known(y) {
            return Err(Error::Consistency(format!(
                "arc {x}:{y} uses labels outside the edit model's alphabet"
            )));
        }
        if x == EPSILON && y == EPSILON {
            continue;
        }
        match model.classify(x, y) {
            EditClass::Match => {}
            EditClass::TypeI => stats.type1_fills += 1,
            EditClass::TypeII => stats.type2_subs += 1,
            EditClass::TypeIII => stats.type3_edits += 1,
        }
    }
    let ext = path.total.get(feature::UNK_EXT_COUNT);
    if ext < 0.0 || ext.fract() != 0.0 {
        return Err(Error::Consistency(format!("non-integral UNK extension count {ext}")));
    }
    stats.unk_extensions = ext as usize;
    stats.exact_match = stats.unk_extensions == 0 && stats.type2_subs == 0 && stats.type3_edits == 0;

    let expect = [
        (feature::EDIT_COUNT, stats.type3_edits),
        (feature::SUB_COUNT, stats.type2_subs),
    ];
    for (id, count) in expect {
        let got = path.total.get(id);
        if (got - count as f64).abs() > 1e-9 {
            return Err(Error::Consistency(format!(
                "path carries {got} for {} but the alignment has {count}",
                feature::name(id).unwrap_or("?")
            )));
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::PathArc;
    use crate::oracle::synth::lattice_from_strings;
    use crate::symbols::SymbolTable;

    fn lattice(t: &mut SymbolTable, hyps: &[(&str, f64)], kind: LatticeKind) -> TranslationLattice {
        let hyps: Vec<_> = hyps.iter().map(|(s, c)| (t.encode(s), *c)).collect();
        let f = lattice_from_strings(&hyps, kind.score_feature().unwrap());
        TranslationLattice::new(f, kind).unwrap()
    }

    fn vocab(t: &mut SymbolTable, words: &str) -> HashSet<Label> {
        t.encode(words).into_iter().collect()
    }

    #[test]
    fn worked_example() {
        let mut t = SymbolTable::new();
        let n = lattice(&mut t, &[("die UNK Politik", 1.0)], LatticeKind::Nmt);
        let h = lattice(
            &mut t,
            &[("die regionale Politik", 2.0), ("der Plan", 1.0)],
            LatticeKind::Hiero,
        );
        let v = vocab(&mut t, "die Politik der Plan");
        let p = CombinationParams::new(1.0, 1.0, 2.0, 5.0, 1.0, v).unwrap();
        let r = combine(&n, &h, &p).unwrap();
        assert_eq!(t.render(&r.t_comb), "die regionale Politik");
        assert_eq!(t.render(&r.t_nmt), "die UNK Politik");
        assert_eq!(t.render(&r.t_hiero), "die regionale Politik");
        assert_eq!(r.total_cost, 3.0);
        assert_eq!(
            r.stats,
            EditStats {
                unk_extensions: 0,
                type1_fills: 1,
                type2_subs: 0,
                type3_edits: 0,
                exact_match: true,
            }
        );
    }

    #[test]
    fn identical_lattices_match_exactly() {
        let mut t = SymbolTable::new();
        let n = lattice(&mut t, &[("a b c", 0.5)], LatticeKind::Nmt);
        let h = lattice(&mut t, &[("a b c", 0.25)], LatticeKind::Hiero);
        let v = vocab(&mut t, "a b c");
        let p = CombinationParams::new(1.0, 1.0, 2.0, 5.0, 1.0, v).unwrap();
        let r = combine(&n, &h, &p).unwrap();
        assert_eq!(t.render(&r.t_comb), "a b c");
        assert!(r.stats.exact_match);
        assert_eq!(r.total_cost, 0.75);
    }

    #[test]
    fn fig2_style_fill() {
        let mut t = SymbolTable::new();
        let n = lattice(
            &mut t,
            &[
                ("die regionale Politik in UNK darf jedoch nicht leiden", 2.0),
                ("die Politik in UNK darf nicht leiden", 3.0),
            ],
            LatticeKind::Nmt,
        );
        let h = lattice(
            &mut t,
            &[
                (
                    "die regionale Politik in Grosswahlstadt nicht erlaubt sein sollte zu",
                    1.0,
                ),
                ("die regionale Politik in Grosswahlstadt darf nicht leiden", 4.0),
            ],
            LatticeKind::Hiero,
        );
        let v = vocab(
            &mut t,
            "die regionale Politik in darf jedoch nicht leiden erlaubt sein sollte zu",
        );
        let p = CombinationParams::new(1.0, 1.0, 2.0, 5.0, 1.0, v).unwrap();
        let r = combine(&n, &h, &p).unwrap();
        let comb = t.render(&r.t_comb);
        assert!(comb.contains("in Grosswahlstadt darf"), "{comb}");
        assert_eq!(comb, "die regionale Politik in Grosswahlstadt darf jedoch nicht leiden");
    }

    #[test]
    fn empty_lattice_rejected() {
        let mut t = SymbolTable::new();
        let n = TranslationLattice::new(crate::fst::Wfst::new(), LatticeKind::Nmt);
        assert!(n.is_err());
        let h = lattice(&mut t, &[("a", 1.0)], LatticeKind::Hiero);
        let p = CombinationParams::new(1.0, 1.0, 2.0, 5.0, 1.0, HashSet::new()).unwrap();
        assert!(combine(&h, &h, &p).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(CombinationParams::new(1.0, 1.0, 5.0, 5.0, 1.0, HashSet::new()).is_err());
        assert!(CombinationParams::new(-1.0, 1.0, 1.0, 5.0, 1.0, HashSet::new()).is_err());
        assert!(CombinationParams::new(1.0, 1.0, 1.0, 5.0, 1.0, [UNK].into()).is_err());
    }

    fn model(vocab: &[Label], alphabet: &[Label]) -> EditCostModel {
        EditCostModel::new(
            vocab.iter().copied().collect(),
            alphabet.iter().copied().collect(),
            2.0,
            5.0,
            1.0,
        )
        .unwrap()
    }

    fn arc(i: Label, o: Label, w: FeatureWeight) -> PathArc {
        PathArc {
            ilabel: i,
            olabel: o,
            weight: w,
        }
    }

    #[test]
    fn decompose_sub_and_deletion() {
        let und = 5;
        let m = model(&[2, und], &[2, 3, und]);
        let path = PathWitness::new(
            vec![
                arc(2, 2, FeatureWeight::one()),
                arc(UNK, und, EditClass::TypeII.weight()),
                arc(3, EPSILON, EditClass::TypeIII.weight()),
            ],
            FeatureWeight::one(),
        );
        let s = decompose_alignment(&path, &m).unwrap();
        assert_eq!(
            (s.unk_extensions, s.type2_subs, s.type3_edits, s.exact_match),
            (0, 1, 1, false)
        );
    }

    #[test]
    fn decompose_detects_inconsistency() {
        let m = model(&[2], &[2, 3]);
        let lying = PathWitness::new(vec![arc(2, 3, FeatureWeight::one())], FeatureWeight::one());
        assert!(matches!(decompose_alignment(&lying, &m), Err(Error::Consistency(_))));
        let foreign = PathWitness::new(vec![arc(9, 9, FeatureWeight::one())], FeatureWeight::one());
        assert!(decompose_alignment(&foreign, &m).is_err());
        let exact = PathWitness::new(vec![arc(2, 2, FeatureWeight::one())], FeatureWeight::one());
        assert!(decompose_alignment(&exact, &m).unwrap().exact_match);
    }
}

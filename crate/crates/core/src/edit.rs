//! Edit-distance transducers.
//!
//! * [`build_standard_edit_fst`]: the classic single-state flower where
//!   every substitution, insertion and deletion costs one edit.
//! * [`build_modified_edit_fst`]: the flower used for combination, which
//!   distinguishes three classes of edits:
//!   - Type I: UNK replaced by a word outside the NMT vocabulary (free),
//!   - Type II: UNK replaced by an NMT in-vocabulary word (`sub_count`),
//!   - Type III: anything else (`edit_count`).
//! * [`build_unk_insertion_fst`]: a chain that lets one UNK stand for a run
//!   of several, each extra UNK counted in `unk_ext_count`.
//!
//! Edit classes are recorded as feature counts; the λ costs are applied at
//! scalarization time.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::fst::{Arc, Wfst};
use crate::semiring::{feature, FeatureWeight, ParamVector};
use crate::symbols::{Label, EPSILON, UNK};

/// How a single aligned `(nmt, hiero)` label pair is charged.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EditClass {
    Match,
    /// UNK filled with an out-of-vocabulary word.
    TypeI,
    /// UNK filled with an in-vocabulary word.
    TypeII,
    /// Any other substitution, insertion or deletion.
    TypeIII,
}

impl EditClass {
    pub fn weight(self) -> FeatureWeight {
        match self {
            EditClass::Match | EditClass::TypeI => FeatureWeight::one(),
            EditClass::TypeII => FeatureWeight::single(feature::SUB_COUNT, 1.0),
            EditClass::TypeIII => FeatureWeight::single(feature::EDIT_COUNT, 1.0),
        }
    }
}

/// λ costs and the NMT vocabulary that together define the modified edit distance.
#[derive(Clone, Debug)]
pub struct EditCostModel {
    nmt_vocab: HashSet<Label>,
    alphabet: BTreeSet<Label>,
    lambda_sub: f64,
    lambda_edit: f64,
    lambda_ins: f64,
}

impl EditCostModel {
    pub fn new(
        nmt_vocab: HashSet<Label>,
        alphabet: BTreeSet<Label>,
        lambda_sub: f64,
        lambda_edit: f64,
        lambda_ins: f64,
    ) -> Result<Self> {
        check_lambdas(lambda_sub, lambda_edit, lambda_ins)?;
        if nmt_vocab.contains(&UNK) {
            return Err(Error::contract("UNK cannot be listed in the NMT vocabulary"));
        }
        if nmt_vocab.contains(&EPSILON) {
            return Err(Error::contract("ε cannot be listed in the NMT vocabulary"));
        }
        let mut alphabet = alphabet;
        alphabet.remove(&EPSILON);
        Ok(EditCostModel {
            nmt_vocab,
            alphabet,
            lambda_sub,
            lambda_edit,
            lambda_ins,
        })
    }

    pub fn alphabet(&self) -> &BTreeSet<Label> {
        &self.alphabet
    }

    pub fn nmt_vocab(&self) -> &HashSet<Label> {
        &self.nmt_vocab
    }

    pub fn in_vocab(&self, label: Label) -> bool {
        self.nmt_vocab.contains(&label)
    }

    pub fn lambda_sub(&self) -> f64 {
        self.lambda_sub
    }

    pub fn lambda_edit(&self) -> f64 {
        self.lambda_edit
    }

    pub fn lambda_ins(&self) -> f64 {
        self.lambda_ins
    }

    /// Parameter vector charging this model's costs plus the given score scales.
    pub fn params(&self, lambda_nmt: f64, lambda_hiero: f64) -> ParamVector {
        ParamVector::new(
            lambda_nmt,
            lambda_hiero,
            self.lambda_edit,
            self.lambda_sub,
            self.lambda_ins,
        )
    }

    /// Class of aligning NMT label `x` with Hiero label `y` (either may be ε).
    pub fn classify(&self, x: Label, y: Label) -> EditClass {
        if x == y {
            EditClass::Match
        } else if x == UNK && y != EPSILON {
            if self.in_vocab(y) {
                EditClass::TypeII
            } else {
                EditClass::TypeI
            }
        } else {
            EditClass::TypeIII
        }
    }
}

pub(crate) fn check_lambdas(sub: f64, edit: f64, ins: f64) -> Result<()> {
    if !(sub.is_finite() && edit.is_finite() && ins.is_finite()) {
        return Err(Error::contract("edit costs must be finite"));
    }
    if sub < 0.0 {
        return Err(Error::contract(format!("lambda_sub must be nonnegative, got {sub}")));
    }
    if edit <= sub {
        return Err(Error::contract(format!(
            "lambda_edit ({edit}) must be greater than lambda_sub ({sub})"
        )));
    }
    if ins < 0.0 {
        return Err(Error::contract(format!("lambda_ins must be nonnegative, got {ins}")));
    }
    Ok(())
}

fn flower() -> Wfst {
    let mut f = Wfst::new();
    let s = f.add_state();
    f.set_initial(s).expect("state exists");
    f.set_final(s, FeatureWeight::one()).expect("state exists");
    f
}

/// Single-state flower computing the plain Levenshtein distance over `alphabet`.
pub fn build_standard_edit_fst<'a, I>(alphabet: I) -> Result<Wfst>
where
    I: IntoIterator<Item = &'a Label>,
{
    let alphabet: BTreeSet<Label> = alphabet.into_iter().copied().filter(|&l| l != EPSILON).collect();
    if alphabet.is_empty() {
        return Err(Error::contract("edit transducer needs a nonempty alphabet"));
    }
    let edit = EditClass::TypeIII.weight();
    let mut f = flower();
    let arcs = f.arcs_mut(0);
    for &a in &alphabet {
        for &b in &alphabet {
            let w = if a == b { FeatureWeight::one() } else { edit.clone() };
            arcs.push(Arc::new(a, b, w, 0));
        }
        arcs.push(Arc::new(a, EPSILON, edit.clone(), 0));
        arcs.push(Arc::new(EPSILON, a, edit.clone(), 0));
    }
    f.arcsort_input();
    Ok(f)
}

/// Single-state flower with Type I/II/III costs.
///
/// Reads the model alphabet plus UNK; writes the alphabet without UNK, so
/// UNK can never survive onto the Hiero side.
pub fn build_modified_edit_fst(model: &EditCostModel) -> Result<Wfst> {
    let outputs: Vec<Label> = model.alphabet.iter().copied().filter(|&l| l != UNK).collect();
    if outputs.is_empty() && !model.alphabet.contains(&UNK) {
        return Err(Error::contract("edit transducer needs a nonempty alphabet"));
    }
    let mut inputs = outputs.clone();
    inputs.push(UNK);
    inputs.sort_unstable();

    let mut f = flower();
    let arcs = f.arcs_mut(0);
    for &x in &inputs {
        for &y in &outputs {
            arcs.push(Arc::new(x, y, model.classify(x, y).weight(), 0));
        }
        arcs.push(Arc::new(x, EPSILON, EditClass::TypeIII.weight(), 0));
    }
    for &y in &outputs {
        arcs.push(Arc::new(EPSILON, y, EditClass::TypeIII.weight(), 0));
    }
    f.arcsort_input();
    Ok(f)
}

/// Chain accepting `UNK^k` for `1 <= k <= max_run`.
///
/// The first UNK is free; each further UNK carries one `unk_ext_count`.
pub fn build_unk_insertion_fst(max_run: usize) -> Result<Wfst> {
    if max_run == 0 {
        return Err(Error::contract("max UNK run must be at least 1"));
    }
    let mut f = Wfst::new();
    let mut cur = f.add_state();
    f.set_initial(cur)?;
    for k in 0..max_run {
        let next = f.add_state();
        let w = if k == 0 {
            FeatureWeight::one()
        } else {
            FeatureWeight::single(feature::UNK_EXT_COUNT, 1.0)
        };
        f.add_arc(cur, Arc::new(UNK, UNK, w, next))?;
        f.set_final(next, FeatureWeight::one())?;
        cur = next;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{compose, shortest_path};
    use crate::oracle::enumerate_paths;
    use crate::symbols::SymbolTable;

    fn cost(x: &[Label], e: &Wfst, y: &[Label], p: &ParamVector) -> FeatureWeight {
        let left = compose(&Wfst::string_acceptor(x), e).unwrap();
        let c = compose(&left, &Wfst::string_acceptor(y)).unwrap();
        shortest_path(&c, p).unwrap().total
    }

    #[test]
    fn standard_flower_shape() {
        let f = build_standard_edit_fst(&[2, 3]).unwrap();
        assert_eq!(f.num_states(), 1);
        assert_eq!(f.num_arcs(), 8);
        assert!(build_standard_edit_fst(&[]).is_err());
    }

    #[test]
    fn standard_distances() {
        let mut t = SymbolTable::new();
        let p = ParamVector::uniform(1.0);
        let ab = t.encode("a b");
        let alphabet: BTreeSet<Label> = "kitten sitting a b"
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| t.add(&c.to_string()))
            .collect();
        let e = build_standard_edit_fst(&alphabet).unwrap();
        assert!(cost(&ab, &e, &ab, &p).is_one());
        let kitten: Vec<Label> = "kitten".chars().map(|c| t.add(&c.to_string())).collect();
        let sitting: Vec<Label> = "sitting".chars().map(|c| t.add(&c.to_string())).collect();
        assert_eq!(cost(&kitten, &e, &sitting, &p).scalarize(&p).value(), 3.0);
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

    #[test]
    fn modified_flower_arc_classes() {
        // a = 2 is an NMT OOV, b = 3 is in the vocabulary
        let m = model(&[3], &[2, 3]);
        let e = build_modified_edit_fst(&m).unwrap();
        let find = |i, o| {
            e.arcs(0)
                .iter()
                .find(|a| a.ilabel == i && a.olabel == o)
                .map(|a| a.weight.clone())
        };
        assert_eq!(find(UNK, 2), Some(FeatureWeight::one()));
        assert_eq!(find(UNK, 3), Some(FeatureWeight::single(feature::SUB_COUNT, 1.0)));
        assert_eq!(find(2, 3), Some(FeatureWeight::single(feature::EDIT_COUNT, 1.0)));
        assert_eq!(find(2, 2), Some(FeatureWeight::one()));
        assert_eq!(
            find(UNK, EPSILON),
            Some(FeatureWeight::single(feature::EDIT_COUNT, 1.0))
        );
        assert_eq!(find(EPSILON, UNK), None);
        assert!(e.arcs(0).iter().all(|a| a.olabel != UNK));
        // 3 inputs x 2 outputs + 3 deletions + 2 insertions
        assert_eq!(e.num_arcs(), 11);
    }

    #[test]
    fn modified_distances() {
        let mut t = SymbolTable::new();
        let x = t.encode("die UNK Politik");
        let y = t.encode("die regionale Politik");
        let und = t.add("und");
        let vocab = [t.label("die").unwrap(), t.label("Politik").unwrap(), und];
        let alphabet: Vec<Label> = x.iter().chain(&y).copied().chain([und]).collect();
        let m = model(&vocab, &alphabet);
        let e = build_modified_edit_fst(&m).unwrap();
        let p = m.params(1.0, 1.0);
        assert!(cost(&x, &e, &y, &p).is_one());
        assert_eq!(
            cost(&[UNK], &e, &[und], &p),
            FeatureWeight::single(feature::SUB_COUNT, 1.0)
        );
    }

    #[test]
    fn lambda_ordering_enforced() {
        let v = HashSet::new();
        let a = BTreeSet::new();
        assert!(EditCostModel::new(v.clone(), a.clone(), 2.0, 2.0, 1.0).is_err());
        assert!(EditCostModel::new(v.clone(), a.clone(), -1.0, 2.0, 1.0).is_err());
        assert!(EditCostModel::new(v.clone(), a.clone(), 1.0, 2.0, -1.0).is_err());
        assert!(EditCostModel::new([UNK].into(), a, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn unk_insertion_runs() {
        let u = build_unk_insertion_fst(3).unwrap();
        let mut runs: Vec<(usize, f64)> = enumerate_paths(&u, 10, &ParamVector::uniform(1.0))
            .unwrap()
            .into_iter()
            .map(|h| (h.tokens.len(), h.features.get(feature::UNK_EXT_COUNT)))
            .collect();
        runs.sort_by_key(|r| r.0);
        assert_eq!(runs, vec![(1, 0.0), (2, 1.0), (3, 2.0)]);
        assert!(build_unk_insertion_fst(0).is_err());
        assert_eq!(build_unk_insertion_fst(1).unwrap().num_states(), 2);
    }
}

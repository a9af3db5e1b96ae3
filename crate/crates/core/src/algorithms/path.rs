use crate::fst::Wfst;
use crate::semiring::{FeatureWeight, ParamVector, TropicalWeight};
use crate::symbols::{Label, EPSILON, UNK};

/// One step of a path.
#[derive(Clone, Debug, PartialEq)]
pub struct PathArc {
    pub ilabel: Label,
    pub olabel: Label,
    pub weight: FeatureWeight,
}

/// A complete path through a machine.
///
/// `total` is the `⊗`-product of every arc weight and the final weight.
#[derive(Clone, Debug, PartialEq)]
pub struct PathWitness {
    pub arcs: Vec<PathArc>,
    pub final_weight: FeatureWeight,
    pub total: FeatureWeight,
}

impl PathWitness {
    pub fn new(arcs: Vec<PathArc>, final_weight: FeatureWeight) -> Self {
        let total = arcs
            .iter()
            .fold(FeatureWeight::one(), |acc, a| acc.times(&a.weight))
            .times(&final_weight);
        PathWitness {
            arcs,
            final_weight,
            total,
        }
    }

    pub fn cost(&self, params: &ParamVector) -> TropicalWeight {
        self.total.scalarize(params)
    }

    /// Input-tape string with ε removed.
    pub fn input(&self) -> Vec<Label> {
        project_input(self)
    }

    /// Output-tape string with ε removed.
    pub fn output(&self) -> Vec<Label> {
        project_output(self)
    }

    /// The path as a linear machine.
    pub fn to_fst(&self) -> Wfst {
        let mut fst = Wfst::linear(self.arcs.iter().map(|a| (a.ilabel, a.olabel, a.weight.clone())));
        let last = fst.num_states() - 1;
        fst.set_final(last, self.final_weight.clone())
            .expect("linear machine has a last state");
        fst
    }
}

/// Labels on the input tape, ε dropped.
///
/// On a combined path this is the NMT-side hypothesis, UNKs included.
pub fn project_input(path: &PathWitness) -> Vec<Label> {
    path.arcs.iter().map(|a| a.ilabel).filter(|&l| l != EPSILON).collect()
}

/// Labels on the output tape, ε dropped.
///
/// On a combined path this is the aligned Hiero hypothesis.
pub fn project_output(path: &PathWitness) -> Vec<Label> {
    path.arcs.iter().map(|a| a.olabel).filter(|&l| l != EPSILON).collect()
}

/// Input labels, except that an arc reading UNK contributes its output label.
///
/// This is the combined translation: the NMT hypothesis with each UNK
/// replaced by the Hiero word it was aligned to (nothing, if deleted).
pub fn project_unk(path: &PathWitness) -> Vec<Label> {
    path.arcs
        .iter()
        .map(|a| if a.ilabel == UNK { a.olabel } else { a.ilabel })
        .filter(|&l| l != EPSILON)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::SymbolTable;

    fn path(pairs: &[(Label, Label)]) -> PathWitness {
        PathWitness::new(
            pairs
                .iter()
                .map(|&(i, o)| PathArc {
                    ilabel: i,
                    olabel: o,
                    weight: FeatureWeight::one(),
                })
                .collect(),
            FeatureWeight::one(),
        )
    }

    #[test]
    fn acceptor_projections_agree() {
        let p = path(&[(2, 2), (3, 3)]);
        assert_eq!(project_input(&p), vec![2, 3]);
        assert_eq!(project_output(&p), vec![2, 3]);
        assert_eq!(project_unk(&p), vec![2, 3]);
    }

    #[test]
    fn unk_projection_takes_hiero_word() {
        let mut t = SymbolTable::new();
        let words = t.encode("die regionale Grosswahlstadt darf");
        let (die, regionale, city, darf) = (words[0], words[1], words[2], words[3]);
        let p = path(&[(die, die), (regionale, regionale), (UNK, city), (darf, darf)]);
        assert_eq!(t.render(&project_unk(&p)), "die regionale Grosswahlstadt darf");
        assert_eq!(t.render(&project_input(&p)), "die regionale UNK darf");
        assert_eq!(t.render(&project_output(&p)), "die regionale Grosswahlstadt darf");

        let short = path(&[(die, die), (UNK, city)]);
        assert_eq!(t.render(&project_input(&short)), "die UNK");
        assert_eq!(t.render(&project_output(&short)), "die Grosswahlstadt");
    }

    #[test]
    fn deletions_and_insertions() {
        let p = path(&[(2, EPSILON), (EPSILON, 5), (3, 3)]);
        assert_eq!(project_input(&p), vec![2, 3]);
        assert_eq!(project_output(&p), vec![5, 3]);
        // inserted Hiero words never reach the combined output
        assert_eq!(project_unk(&p), vec![2, 3]);

        let unk_deleted = path(&[(2, 2), (UNK, EPSILON), (3, 3)]);
        assert_eq!(project_unk(&unk_deleted), vec![2, 3]);
    }

    #[test]
    fn total_is_product_of_arcs() {
        let p = PathWitness::new(
            vec![
                PathArc {
                    ilabel: 2,
                    olabel: 2,
                    weight: FeatureWeight::single(0, 1.0),
                },
                PathArc {
                    ilabel: 3,
                    olabel: 3,
                    weight: FeatureWeight::single(2, 1.0),
                },
            ],
            FeatureWeight::single(0, 0.5),
        );
        assert_eq!(p.total, FeatureWeight::from_pairs([(0, 1.5), (2, 1.0)]));
        let f = p.to_fst();
        assert_eq!(f.num_states(), 3);
        assert_eq!(f.final_weight(2), &FeatureWeight::single(0, 0.5));
    }
}

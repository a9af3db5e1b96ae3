use crate::algorithms::connect::connect;
use crate::error::{Error, Result};
use crate::fst::{Arc, StateId, Wfst};
use crate::semiring::FeatureWeight;
use crate::symbols::{Label, EPSILON};

/// Splice a fresh copy of `sub` in place of every arc labelled `label:label`.
///
/// The replaced arc's weight is multiplied onto the arcs leaving `sub`'s
/// initial state, and the final weights of `sub` onto the arcs entering its
/// final states, so no ε arcs are introduced when `sub`'s initial state has
/// no incoming arcs and is not final. Otherwise ε arcs bridge the entry.
/// Arcs with any other labels are copied unchanged.
pub fn replace(root: &Wfst, label: Label, sub: &Wfst) -> Result<Wfst> {
    if label == EPSILON {
        return Err(Error::contract("cannot replace the ε label"));
    }
    let sub_init = sub
        .initial()
        .ok_or_else(|| Error::contract("replacement machine has no initial state"))?;
    if sub.finals().next().is_none() {
        return Err(Error::contract("replacement machine has no final state"));
    }
    let init_reentered = sub.all_arcs().any(|(_, a)| a.nextstate == sub_init);
    let fold_entry = !init_reentered && !sub.is_final(sub_init);

    let mut out = Wfst::new();
    out.set_input_symbols(root.input_symbols().cloned());
    out.set_output_symbols(root.output_symbols().cloned());
    for _ in root.states() {
        out.add_state();
    }
    if let Some(init) = root.initial() {
        out.set_initial(init)?;
    }
    for s in root.states() {
        if root.is_final(s) {
            out.set_final(s, root.final_weight(s).clone())?;
        }
    }

    for s in root.states() {
        for arc in root.arcs(s) {
            if arc.ilabel == label && arc.olabel == label {
                splice(&mut out, s, arc, sub, sub_init, fold_entry)?;
            } else {
                out.add_arc(s, arc.clone())?;
            }
        }
    }
    Ok(connect(&out))
}

fn splice(out: &mut Wfst, source: StateId, arc: &Arc, sub: &Wfst, sub_init: StateId, fold_entry: bool) -> Result<()> {
    // Copies of sub's states inside `out`; the initial copy is `source`
    // itself when the entry is folded.
    let map: Vec<StateId> = sub
        .states()
        .map(|q| {
            if fold_entry && q == sub_init {
                source
            } else {
                out.add_state()
            }
        })
        .collect();
    if !fold_entry {
        out.add_arc(source, Arc::new(EPSILON, EPSILON, arc.weight.clone(), map[sub_init]))?;
        if sub.is_final(sub_init) {
            out.add_arc(
                map[sub_init],
                Arc::new(EPSILON, EPSILON, sub.final_weight(sub_init).clone(), arc.nextstate),
            )?;
        }
    }
    for q in sub.states() {
        for a in sub.arcs(q) {
            let entry = if fold_entry && q == sub_init {
                arc.weight.clone()
            } else {
                FeatureWeight::one()
            };
            let w = entry.times(&a.weight);
            if sub.is_final(a.nextstate) {
                out.add_arc(
                    map[q],
                    Arc::new(
                        a.ilabel,
                        a.olabel,
                        w.times(sub.final_weight(a.nextstate)),
                        arc.nextstate,
                    ),
                )?;
            }
            if !sub.arcs(a.nextstate).is_empty() {
                out.add_arc(map[q], Arc::new(a.ilabel, a.olabel, w, map[a.nextstate]))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate_paths;
    use crate::semiring::{feature, ParamVector};
    use crate::symbols::UNK;

    fn unk_run(max: usize) -> Wfst {
        crate::edit::build_unk_insertion_fst(max).unwrap()
    }

    fn strings(f: &Wfst) -> Vec<(Vec<Label>, String)> {
        let mut v: Vec<_> = enumerate_paths(f, 1000, &ParamVector::uniform(1.0))
            .unwrap()
            .into_iter()
            .map(|h| (h.tokens, h.features.to_string()))
            .collect();
        v.sort();
        v
    }

    #[test]
    fn no_matching_arcs_is_identity() {
        let root = Wfst::string_acceptor(&[2, 3]);
        assert_eq!(replace(&root, UNK, &unk_run(3)).unwrap(), root);
    }

    #[test]
    fn unk_expands_into_runs() {
        let root = Wfst::linear([
            (2, 2, FeatureWeight::one()),
            (UNK, UNK, FeatureWeight::single(feature::NMT_SCORE, 0.5)),
            (3, 3, FeatureWeight::one()),
        ]);
        let got = strings(&replace(&root, UNK, &unk_run(3)).unwrap());
        assert_eq!(
            got,
            vec![
                (vec![2, UNK, UNK, UNK, 3], "0:0.5,4:2".to_string()),
                (vec![2, UNK, UNK, 3], "0:0.5,4:1".to_string()),
                (vec![2, UNK, 3], "0:0.5".to_string()),
            ]
        );
        assert!(!replace(&root, UNK, &unk_run(3)).unwrap().has_epsilons());
    }

    #[test]
    fn run_of_one_is_identity_on_paths() {
        let root = Wfst::string_acceptor(&[UNK, 2, UNK]);
        let got = replace(&root, UNK, &unk_run(1)).unwrap();
        assert_eq!(strings(&got), strings(&root));
    }

    #[test]
    fn epsilon_bridge_when_initial_is_final() {
        // sub accepts ε or "5"; initial state is final
        let mut sub = Wfst::new();
        let a = sub.add_state();
        let b = sub.add_state();
        sub.set_initial(a).unwrap();
        sub.set_final(a, FeatureWeight::one()).unwrap();
        sub.set_final(b, FeatureWeight::one()).unwrap();
        sub.add_arc(a, Arc::new(5, 5, FeatureWeight::one(), b)).unwrap();
        let root = Wfst::string_acceptor(&[2, 9, 3]);
        let got = strings(&replace(&root, 9, &sub).unwrap());
        assert_eq!(
            got.into_iter().map(|(s, _)| s).collect::<Vec<_>>(),
            vec![vec![2, 3], vec![2, 5, 3]]
        );
    }

    #[test]
    fn epsilon_label_rejected() {
        let root = Wfst::string_acceptor(&[2]);
        assert!(replace(&root, EPSILON, &unk_run(2)).is_err());
    }
}

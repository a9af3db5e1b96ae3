//! Seeded random instances for tests, benchmarks and the acceptance suite.
//!
//! Scores are multiples of 1/16 so that sums of a few of them are exact in
//! binary floating point; this keeps exact ties exact, whichever order the
//! additions happen in.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::fst::{Arc, StateId, Wfst};
use crate::pipeline::{CombinationParams, DEFAULT_HIERO_NODE_BUDGET};
use crate::semiring::{feature, FeatureId, FeatureWeight};
use crate::symbols::{Label, UNK};
use crate::validate::{LatticeKind, TranslationLattice};

#[derive(Clone, Debug)]
pub struct LatticeShape {
    pub states: usize,
    /// Arcs added on top of the backbone chain.
    pub extra_arcs: usize,
    /// Scores are drawn from `0..=max_score` in steps of 1/16.
    pub max_score: f64,
}

impl Default for LatticeShape {
    fn default() -> Self {
        LatticeShape {
            states: 6,
            extra_arcs: 4,
            max_score: 4.0,
        }
    }
}

/// Random multiple of 1/16 in `0..=max`.
pub fn dyadic<R: Rng>(rng: &mut R, max: f64) -> f64 {
    let steps = (max * 16.0).round() as i64;
    rng.gen_range(0..=steps) as f64 / 16.0
}

/// Random acyclic acceptor.
///
/// States `0..states` form a backbone chain (so the machine is connected)
/// and extra arcs only go forward, so it stays acyclic. The last state is
/// final. Each arc carries `score_feature` with a random dyadic value.
pub fn random_lattice<R: Rng>(rng: &mut R, shape: &LatticeShape, labels: &[Label], score_feature: FeatureId) -> Wfst {
    assert!(shape.states >= 2 && !labels.is_empty());
    let mut f = Wfst::new();
    for _ in 0..shape.states {
        f.add_state();
    }
    f.set_initial(0).expect("state exists");
    let arc = |rng: &mut R, f: &mut Wfst, s: StateId, t: StateId| {
        let l = *labels.choose(rng).expect("nonempty labels");
        let w = FeatureWeight::single(score_feature, dyadic(rng, shape.max_score));
        f.add_arc(s, Arc::new(l, l, w, t)).expect("states exist");
    };
    for s in 0..shape.states - 1 {
        arc(rng, &mut f, s, s + 1);
    }
    for _ in 0..shape.extra_arcs {
        let s = rng.gen_range(0..shape.states - 1);
        let t = rng.gen_range(s + 1..shape.states);
        arc(rng, &mut f, s, t);
    }
    f.set_final(shape.states - 1, FeatureWeight::one())
        .expect("state exists");
    f
}

/// Number of complete paths (saturating), by dynamic programming.
pub fn count_paths(fst: &Wfst) -> u128 {
    let Ok(order) = fst.topological_order() else {
        return u128::MAX;
    };
    let mut count = vec![0u128; fst.num_states()];
    let Some(init) = fst.initial() else {
        return 0;
    };
    count[init] = 1;
    let mut total = 0u128;
    for s in order {
        if fst.is_final(s) {
            total = total.saturating_add(count[s]);
        }
        for a in fst.arcs(s) {
            count[a.nextstate] = count[a.nextstate].saturating_add(count[s]);
        }
    }
    total
}

/// Lattice from an explicit list of `(sentence, score)` hypotheses: one
/// branch per hypothesis sharing the initial and final states.
pub fn lattice_from_strings(hyps: &[(Vec<Label>, f64)], score_feature: FeatureId) -> Wfst {
    let mut f = Wfst::new();
    let init = f.add_state();
    let last = f.add_state();
    f.set_initial(init).expect("state exists");
    f.set_final(last, FeatureWeight::one()).expect("state exists");
    for (words, score) in hyps {
        assert!(!words.is_empty(), "hypotheses must be nonempty");
        let mut cur = init;
        for (k, &w) in words.iter().enumerate() {
            let next = if k + 1 == words.len() { last } else { f.add_state() };
            let weight = if k == 0 {
                FeatureWeight::single(score_feature, *score)
            } else {
                FeatureWeight::one()
            };
            f.add_arc(cur, Arc::new(w, w, weight, next)).expect("states exist");
            cur = next;
        }
    }
    f
}

/// Random lattice with at most `max_paths` paths, retrying with fewer extra arcs.
pub fn random_bounded_lattice<R: Rng>(
    rng: &mut R,
    shape: &LatticeShape,
    labels: &[Label],
    score_feature: FeatureId,
    max_paths: u128,
) -> Wfst {
    let mut shape = shape.clone();
    loop {
        let f = random_lattice(rng, &shape, labels, score_feature);
        if count_paths(&f) <= max_paths {
            return f;
        }
        if shape.extra_arcs > 0 {
            shape.extra_arcs -= 1;
        }
    }
}

/// A random NMT/Hiero pair with parameters, for checking the pipeline against the oracle.
#[derive(Clone, Debug)]
pub struct Instance {
    pub nmt: TranslationLattice,
    pub hiero: TranslationLattice,
    pub params: CombinationParams,
}

/// Words 2..=9; UNK is drawn often on the NMT side.
pub const INSTANCE_WORDS: [Label; 8] = [2, 3, 4, 5, 6, 7, 8, 9];

/// Small random instance: at most `max_nmt_paths` NMT and `max_hiero_paths`
/// Hiero hypotheses, dyadic scores and λ, a random in-vocabulary subset and
/// a random `max_unk_run` in 1..=3.
pub fn random_instance<R: Rng>(rng: &mut R, max_nmt_paths: u128, max_hiero_paths: u128) -> Instance {
    let mut nmt_labels = vec![UNK, UNK];
    nmt_labels.extend(INSTANCE_WORDS.choose_multiple(rng, 4));
    let nmt_shape = LatticeShape {
        states: rng.gen_range(2..=5),
        extra_arcs: rng.gen_range(0..=4),
        max_score: 3.0,
    };
    let hiero_shape = LatticeShape {
        states: rng.gen_range(2..=8),
        extra_arcs: rng.gen_range(0..=12),
        max_score: 3.0,
    };
    let nmt = random_bounded_lattice(rng, &nmt_shape, &nmt_labels, feature::NMT_SCORE, max_nmt_paths);
    let hiero = random_bounded_lattice(
        rng,
        &hiero_shape,
        &INSTANCE_WORDS,
        feature::HIERO_SCORE,
        max_hiero_paths,
    );
    let nmt_vocab = INSTANCE_WORDS.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    let lambda_sub = dyadic(rng, 2.0);
    let params = CombinationParams {
        lambda_nmt: dyadic(rng, 2.0),
        lambda_hiero: dyadic(rng, 2.0),
        lambda_sub,
        lambda_edit: lambda_sub + 1.0 / 16.0 + dyadic(rng, 3.0),
        lambda_ins: dyadic(rng, 3.0),
        max_unk_run: rng.gen_range(1..=3),
        hiero_node_budget: DEFAULT_HIERO_NODE_BUDGET,
        nmt_vocab,
    };
    Instance {
        nmt: TranslationLattice::new(nmt, LatticeKind::Nmt).expect("generated NMT lattice is valid"),
        hiero: TranslationLattice::new(hiero, LatticeKind::Hiero).expect("generated Hiero lattice is valid"),
        params,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate_paths;
    use crate::semiring::ParamVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn path_count_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let f = random_lattice(&mut rng, &LatticeShape::default(), &[2, 3, 4], 0);
            assert!(f.is_acyclic());
            let n = enumerate_paths(&f, 100_000, &ParamVector::uniform(1.0)).unwrap().len();
            assert_eq!(count_paths(&f), n as u128);
        }
    }

    #[test]
    fn string_lattice_has_given_paths() {
        let f = lattice_from_strings(&[(vec![2, 3], 1.0), (vec![4], 2.0)], 1);
        let mut got: Vec<_> = enumerate_paths(&f, 10, &ParamVector::uniform(1.0))
            .unwrap()
            .into_iter()
            .map(|h| (h.tokens, h.score))
            .collect();
        got.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(got, vec![(vec![2, 3], 1.0), (vec![4], 2.0)]);
    }
}

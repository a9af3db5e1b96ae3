use latcomb::algorithms::PathWitness;
use latcomb::oracle::synth::{lattice_from_strings, random_instance, Instance};
use latcomb::oracle::{brute_force_combine, enumerate_paths, DEFAULT_MAX_PATHS};
use latcomb::{
    combine, feature, CombinationResult, FeatureWeight, Label, LatticeKind, TranslationLattice, EPSILON, UNK,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_instance(&mut rng, 20, 200)
}

/// Does `t` arise from `x` by replacing each UNK with a run of 1..=max UNKs?
fn expands_to(x: &[Label], t: &[Label], max: usize) -> bool {
    match x.split_first() {
        None => t.is_empty(),
        Some((&UNK, rest)) => {
            (1..=max).any(|k| t.len() >= k && t[..k].iter().all(|&l| l == UNK) && expands_to(rest, &t[k..], max))
        }
        Some((&w, rest)) => t.first() == Some(&w) && expands_to(rest, &t[1..], max),
    }
}

fn strings(l: &TranslationLattice) -> Vec<Vec<Label>> {
    enumerate_paths(l.fst(), DEFAULT_MAX_PATHS, &latcomb::ParamVector::uniform(1.0))
        .unwrap()
        .into_iter()
        .map(|h| h.tokens)
        .collect()
}

/// t_nmt with each UNK replaced by the Hiero tokens the path aligned it to.
fn fill_from_path(path: &PathWitness) -> Vec<Label> {
    let mut out = Vec::new();
    for a in &path.arcs {
        match (a.ilabel, a.olabel) {
            (EPSILON, _) => {}
            (UNK, EPSILON) => {}
            (UNK, y) => out.push(y),
            (x, _) => out.push(x),
        }
    }
    out
}

fn run(inst: &Instance) -> CombinationResult {
    combine(&inst.nmt, &inst.hiero, &inst.params).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn combine_matches_brute_force(seed in any::<u64>()) {
        let inst = instance(seed);
        let r = run(&inst);
        let o = brute_force_combine(inst.nmt.fst(), inst.hiero.fst(), &inst.params.oracle_params(DEFAULT_MAX_PATHS)).unwrap();
        prop_assert!((r.total_cost - o.cost).abs() <= 1e-9, "pipeline {} oracle {}", r.total_cost, o.cost);
        prop_assert_eq!(&r.feature_vector, &o.features);
        prop_assert!(o.ties.contains(&(r.t_nmt.clone(), r.t_hiero.clone())));
    }

    #[test]
    fn result_fields_are_consistent(seed in any::<u64>()) {
        let inst = instance(seed);
        let r = run(&inst);
        let pv = inst.params.param_vector();
        prop_assert!((r.total_cost - r.feature_vector.scalarize(&pv).value()).abs() <= 1e-9);

        // probabilistic reading: the exponentiated cost factors into the three parts
        let d_edit = r.feature_vector.get(feature::EDIT_COUNT) * inst.params.lambda_edit
            + r.feature_vector.get(feature::SUB_COUNT) * inst.params.lambda_sub
            + r.feature_vector.get(feature::UNK_EXT_COUNT) * inst.params.lambda_ins;
        let s_n = r.feature_vector.get(feature::NMT_SCORE);
        let s_h = r.feature_vector.get(feature::HIERO_SCORE);
        let lhs = (-r.total_cost).exp();
        let rhs = (-d_edit).exp() * (-inst.params.lambda_nmt * s_n).exp() * (-inst.params.lambda_hiero * s_h).exp();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(rhs.abs()), "{} vs {}", lhs, rhs);

        prop_assert!(strings(&inst.hiero).contains(&r.t_hiero));
        let max = inst.params.max_unk_run;
        prop_assert!(strings(&inst.nmt).iter().any(|x| expands_to(x, &r.t_nmt, max)));
        prop_assert_eq!(&r.t_comb, &fill_from_path(&r.path));
        prop_assert!(!r.t_comb.contains(&UNK) || r.path.arcs.iter().any(|a| a.ilabel == UNK && a.olabel == EPSILON));
        prop_assert_eq!(r.stats.type3_edits as f64, r.feature_vector.get(feature::EDIT_COUNT));
        prop_assert_eq!(r.stats.type2_subs as f64, r.feature_vector.get(feature::SUB_COUNT));
        prop_assert_eq!(r.stats.unk_extensions as f64, r.feature_vector.get(feature::UNK_EXT_COUNT));
    }

    #[test]
    fn uniform_scaling_keeps_the_selection(seed in any::<u64>(), k in 0usize..4) {
        let inst = instance(seed);
        let factor = [0.25, 0.5, 2.0, 8.0][k];
        let a = run(&inst);
        let scaled = Instance { params: inst.params.scaled(factor), ..inst.clone() };
        let b = run(&scaled);
        prop_assert_eq!((a.t_nmt, a.t_hiero), (b.t_nmt, b.t_hiero));
        prop_assert!((b.total_cost - factor * a.total_cost).abs() <= 1e-9 * b.total_cost.abs().max(1.0));
    }

    #[test]
    fn strict_coupling_forces_exact_match(seed in any::<u64>()) {
        let mut inst = instance(seed);
        // plant an exact match: an NMT hypothesis with every UNK filled by a fresh OOV word
        let x = strings(&inst.nmt)[0].clone();
        let oov: Label = 50;
        let filled: Vec<Label> = x.iter().map(|&l| if l == UNK { oov } else { l }).collect();
        let mut hyps: Vec<(Vec<Label>, f64)> = strings(&inst.hiero).into_iter().map(|h| (h, 1.0)).collect();
        hyps.push((filled, 3.0));
        let h = lattice_from_strings(&hyps, feature::HIERO_SCORE);
        inst.hiero = TranslationLattice::new(h, LatticeKind::Hiero).unwrap();
        inst.params.lambda_hiero = 0.0;
        inst.params.lambda_sub = 1000.0;
        inst.params.lambda_edit = 2000.0;
        inst.params.lambda_ins = 1000.0;
        let r = run(&inst);
        prop_assert!(r.stats.exact_match);
        for id in [feature::EDIT_COUNT, feature::SUB_COUNT, feature::UNK_EXT_COUNT] {
            prop_assert_eq!(r.feature_vector.get(id), 0.0);
        }
    }
}

#[test]
fn worked_example_through_the_oracle() {
    let n = lattice_from_strings(&[(vec![2, UNK, 3], 1.0)], feature::NMT_SCORE);
    let h = lattice_from_strings(&[(vec![2, 4, 3], 2.0), (vec![5, 6], 1.0)], feature::HIERO_SCORE);
    let inst = Instance {
        nmt: TranslationLattice::new(n, LatticeKind::Nmt).unwrap(),
        hiero: TranslationLattice::new(h, LatticeKind::Hiero).unwrap(),
        params: latcomb::CombinationParams::new(1.0, 1.0, 2.0, 5.0, 1.0, [2, 3, 5, 6].into()).unwrap(),
    };
    let r = run(&inst);
    let o = brute_force_combine(inst.nmt.fst(), inst.hiero.fst(), &inst.params.oracle_params(100)).unwrap();
    assert_eq!(r.t_comb, vec![2, 4, 3]);
    assert_eq!(o.t_comb, vec![2, 4, 3]);
    assert_eq!(r.total_cost, 3.0);
    assert_eq!(o.cost, 3.0);
    assert_eq!(r.feature_vector, FeatureWeight::from_pairs([(0, 1.0), (1, 2.0)]));
}

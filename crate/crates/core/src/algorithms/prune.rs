use crate::algorithms::connect::{connect, filter_states};
use crate::error::{Error, Result};
use crate::fst::{StateId, Wfst};
use crate::semiring::ParamVector;

use super::shortest_path::shortest_path;

fn tolerance(x: f64) -> f64 {
    1e-9 * x.abs().max(1.0)
}

/// Forward and backward scalar shortest distances over a topological order.
fn through_costs(fst: &Wfst, params: &ParamVector, order: &[StateId]) -> (Vec<f64>, Vec<f64>) {
    let n = fst.num_states();
    let mut fwd = vec![f64::INFINITY; n];
    let mut bwd: Vec<f64> = fst
        .states()
        .map(|s| fst.final_weight(s).scalarize(params).value())
        .collect();
    if let Some(init) = fst.initial() {
        fwd[init] = 0.0;
    }
    for &s in order {
        if fwd[s].is_infinite() {
            continue;
        }
        for a in fst.arcs(s) {
            let c = fwd[s] + a.weight.scalarize(params).value();
            if c < fwd[a.nextstate] {
                fwd[a.nextstate] = c;
            }
        }
    }
    for &s in order.iter().rev() {
        for a in fst.arcs(s) {
            let c = a.weight.scalarize(params).value() + bwd[a.nextstate];
            if c < bwd[s] {
                bwd[s] = c;
            }
        }
    }
    (fwd, bwd)
}

/// Weight-threshold pruning down to at most `budget` states.
///
/// A state (or arc) survives when the best complete path through it costs
/// at most `best + θ`. The threshold θ is the largest value that keeps the
/// state count within budget, found by binary search over the distinct
/// per-state path costs. The best path always survives; if ties at the best
/// cost alone exceed the budget, only the single best path is kept.
pub fn prune_to_node_budget(fst: &Wfst, budget: usize, params: &ParamVector) -> Result<Wfst> {
    fst.topological_order()
        .map_err(|cycle| Error::contract(format!("pruning needs an acyclic machine; cycle through {cycle:?}")))?;
    let trimmed = connect(fst);
    if trimmed.num_states() == 0 {
        return Err(Error::NoPath);
    }
    let best_path = shortest_path(&trimmed, params)?;
    let path_states = best_path.arcs.len() + 1;
    if budget < path_states {
        return Err(Error::contract(format!(
            "node budget {budget} is smaller than the {path_states} states on the best path"
        )));
    }
    if trimmed.num_states() <= budget {
        return Ok(trimmed);
    }

    let order = trimmed
        .topological_order()
        .expect("a connected part of an acyclic machine is acyclic");
    let (fwd, bwd) = through_costs(&trimmed, params, &order);
    let through: Vec<f64> = fwd.iter().zip(&bwd).map(|(f, b)| f + b).collect();
    let best = through[trimmed.initial().expect("connected machine has an initial state")];

    let mut levels: Vec<f64> = through.iter().map(|t| t - best).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup_by(|a, b| (*a - *b).abs() <= tolerance(*b));
    let kept_at = |theta: f64| {
        let limit = theta + tolerance(best + theta);
        through.iter().filter(|&&t| t - best <= limit).count()
    };

    // levels[0] is 0 (the best path); find the last level that fits.
    let (mut lo, mut hi) = (0usize, levels.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if kept_at(levels[mid]) <= budget {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if lo == 0 {
        return Ok(best_path.to_fst());
    }
    let theta = levels[lo - 1];
    let limit = best + theta + tolerance(best + theta);

    let keep: Vec<bool> = through.iter().map(|&t| t <= limit).collect();
    let mut pruned = filter_states(&trimmed, &keep);
    // drop arcs whose best completion is over the threshold
    let inverse: Vec<StateId> = trimmed.states().filter(|&s| keep[s]).collect();
    for ns in pruned.states() {
        let s = inverse[ns];
        let fs = fwd[s];
        pruned.arcs_mut(ns).retain(|a| {
            let t = inverse[a.nextstate];
            fs + a.weight.scalarize(params).value() + bwd[t] <= limit
        });
    }
    pruned = connect(&pruned);
    Ok(pruned)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::Arc;
    use crate::oracle::synth::{random_lattice, LatticeShape};
    use crate::semiring::{feature, FeatureWeight};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn large_budget_is_identity() {
        let f = Wfst::string_acceptor(&[2, 3, 4, 5]);
        let p = ParamVector::uniform(1.0);
        assert_eq!(prune_to_node_budget(&f, 5, &p).unwrap(), f);
        assert_eq!(prune_to_node_budget(&f, 100, &p).unwrap(), f);
        assert!(prune_to_node_budget(&f, 4, &p).is_err());
    }

    #[test]
    fn cyclic_input_rejected() {
        let mut f = Wfst::string_acceptor(&[2, 3]);
        f.add_arc(2, Arc::new(2, 2, FeatureWeight::one(), 0)).unwrap();
        assert!(prune_to_node_budget(&f, 10, &ParamVector::uniform(1.0)).is_err());
    }

    #[test]
    fn drops_expensive_branch() {
        let mut f = Wfst::string_acceptor(&[2, 3]);
        let side = f.add_state();
        f.add_arc(
            0,
            Arc::new(7, 7, FeatureWeight::single(feature::HIERO_SCORE, 5.0), side),
        )
        .unwrap();
        f.add_arc(side, Arc::new(8, 8, FeatureWeight::one(), 2)).unwrap();
        let p = ParamVector::uniform(1.0);
        let pruned = prune_to_node_budget(&f, 3, &p).unwrap();
        assert_eq!(pruned.num_states(), 3);
        assert_eq!(shortest_path(&pruned, &p).unwrap().input(), vec![2, 3]);
    }

    #[test]
    fn random_lattice_meets_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let shape = LatticeShape {
            states: 200,
            extra_arcs: 300,
            ..LatticeShape::default()
        };
        let p = ParamVector::uniform(1.0);
        for _ in 0..10 {
            let h = random_lattice(&mut rng, &shape, &[2, 3, 4, 5, 6], feature::HIERO_SCORE);
            let before = shortest_path(&h, &p).unwrap();
            let budget = 50.max(before.arcs.len() + 1);
            let pruned = prune_to_node_budget(&h, budget, &p).unwrap();
            assert!(pruned.num_states() <= budget);
            let after = shortest_path(&pruned, &p).unwrap();
            assert!((after.cost(&p).value() - before.cost(&p).value()).abs() < 1e-9);
        }
    }
}

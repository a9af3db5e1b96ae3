//! Single-best and n-best path search.
//!
//! Paths are ordered by the scalarized cost of their total weight, ties
//! going to the smaller weight under [`crate::semiring::tie_order`]. Acyclic
//! machines are relaxed in topological order; cyclic machines need
//! nonnegative arc costs and use Dijkstra.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use crate::error::{Error, Result};
use crate::fst::{StateId, Wfst};
use crate::semiring::{tie_order, FeatureWeight, ParamVector};
use crate::symbols::Label;

use super::path::{PathArc, PathWitness};

/// Weight tagged with its scalarization, ordered like `⊕` (smallest first
/// when popped from a max-heap through [`Reverse`](std::cmp::Reverse)).
#[derive(Clone, Debug)]
struct Keyed {
    cost: f64,
    weight: FeatureWeight,
}

impl Keyed {
    fn new(weight: FeatureWeight, params: &ParamVector) -> Self {
        Keyed {
            cost: weight.scalarize(params).value(),
            weight,
        }
    }

    fn cmp_key(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then_with(|| tie_order(&self.weight, &other.weight))
    }
}

fn precondition(fst: &Wfst, params: &ParamVector) -> Result<Option<Vec<StateId>>> {
    if !params.is_finite() {
        return Err(Error::contract("parameter vector has non-finite entries"));
    }
    match fst.topological_order() {
        Ok(order) => Ok(Some(order)),
        Err(cycle) => {
            for (src, a) in fst.all_arcs() {
                let c = a.weight.scalarize(params).value();
                if c < 0.0 {
                    return Err(Error::contract(format!(
                        "machine has a cycle through states {cycle:?} and the arc from state {src} has negative cost {c} under the given parameters"
                    )));
                }
            }
            Ok(None)
        }
    }
}

/// Best weight from the initial state to every state, with back-pointers.
struct Forward {
    dist: Vec<FeatureWeight>,
    back: Vec<Option<(StateId, usize)>>,
}

fn better(cand: &FeatureWeight, cur: &FeatureWeight, params: &ParamVector) -> bool {
    cand.compare(cur, params) == Ordering::Less
}

fn forward(fst: &Wfst, params: &ParamVector, order: Option<&[StateId]>) -> Forward {
    let n = fst.num_states();
    let mut dist = vec![FeatureWeight::zero(); n];
    let mut back = vec![None; n];
    let Some(init) = fst.initial() else {
        return Forward { dist, back };
    };
    dist[init] = FeatureWeight::one();
    match order {
        Some(order) => {
            for &s in order {
                if dist[s].is_zero() {
                    continue;
                }
                for (k, a) in fst.arcs(s).iter().enumerate() {
                    let cand = dist[s].times(&a.weight);
                    if better(&cand, &dist[a.nextstate], params) {
                        dist[a.nextstate] = cand;
                        back[a.nextstate] = Some((s, k));
                    }
                }
            }
        }
        None => {
            let mut done = vec![false; n];
            let mut heap = BinaryHeap::new();
            heap.push(HeapItem {
                key: Keyed::new(FeatureWeight::one(), params),
                seq: 0,
                state: init,
            });
            let mut seq = 1u64;
            while let Some(HeapItem { state: s, .. }) = heap.pop() {
                if done[s] {
                    continue;
                }
                done[s] = true;
                for (k, a) in fst.arcs(s).iter().enumerate() {
                    if done[a.nextstate] {
                        continue;
                    }
                    let cand = dist[s].times(&a.weight);
                    if better(&cand, &dist[a.nextstate], params) {
                        dist[a.nextstate] = cand.clone();
                        back[a.nextstate] = Some((s, k));
                        heap.push(HeapItem {
                            key: Keyed::new(cand, params),
                            seq,
                            state: a.nextstate,
                        });
                        seq += 1;
                    }
                }
            }
        }
    }
    Forward { dist, back }
}

struct HeapItem {
    key: Keyed,
    seq: u64,
    state: StateId,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    // reversed: BinaryHeap pops the smallest key first
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.cmp_key(&self.key).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// The single best path under `params`.
pub fn shortest_path(fst: &Wfst, params: &ParamVector) -> Result<PathWitness> {
    let order = precondition(fst, params)?;
    let fw = forward(fst, params, order.as_deref());
    let mut best: Option<(StateId, FeatureWeight)> = None;
    for (s, rho) in fst.finals() {
        if fw.dist[s].is_zero() {
            continue;
        }
        let total = fw.dist[s].times(rho);
        if best.as_ref().is_none_or(|(_, b)| better(&total, b, params)) {
            best = Some((s, total));
        }
    }
    let (last, _) = best.ok_or(Error::NoPath)?;
    let mut arcs = Vec::new();
    let mut cur = last;
    while let Some((prev, k)) = fw.back[cur] {
        let a = &fst.arcs(prev)[k];
        arcs.push(PathArc {
            ilabel: a.ilabel,
            olabel: a.olabel,
            weight: a.weight.clone(),
        });
        cur = prev;
    }
    arcs.reverse();
    Ok(PathWitness::new(arcs, fst.final_weight(last).clone()))
}

/// Best weight from every state to a final state (including its final weight).
pub(crate) fn backward_distances(fst: &Wfst, params: &ParamVector, order: Option<&[StateId]>) -> Vec<FeatureWeight> {
    let n = fst.num_states();
    let mut dist: Vec<FeatureWeight> = fst.states().map(|s| fst.final_weight(s).clone()).collect();
    match order {
        Some(order) => {
            for &s in order.iter().rev() {
                for a in fst.arcs(s) {
                    let cand = a.weight.times(&dist[a.nextstate]);
                    if better(&cand, &dist[s], params) {
                        dist[s] = cand;
                    }
                }
            }
        }
        None => {
            let mut reverse: Vec<Vec<(StateId, usize)>> = vec![Vec::new(); n];
            for s in fst.states() {
                for (k, a) in fst.arcs(s).iter().enumerate() {
                    reverse[a.nextstate].push((s, k));
                }
            }
            let mut done = vec![false; n];
            let mut heap = BinaryHeap::new();
            let mut seq = 0u64;
            for (s, w) in fst.finals() {
                heap.push(HeapItem {
                    key: Keyed::new(w.clone(), params),
                    seq,
                    state: s,
                });
                seq += 1;
            }
            while let Some(HeapItem { state: s, .. }) = heap.pop() {
                if done[s] {
                    continue;
                }
                done[s] = true;
                for &(p, k) in &reverse[s] {
                    if done[p] {
                        continue;
                    }
                    let cand = fst.arcs(p)[k].weight.times(&dist[s]);
                    if better(&cand, &dist[p], params) {
                        dist[p] = cand.clone();
                        heap.push(HeapItem {
                            key: Keyed::new(cand, params),
                            seq,
                            state: p,
                        });
                        seq += 1;
                    }
                }
            }
        }
    }
    dist
}

/// Search node for n-best: a partial path ending in `state`, or a complete
/// path when `state` is `None`.
struct Partial {
    parent: Option<usize>,
    arc: Option<(StateId, usize)>,
    state: Option<StateId>,
    weight: FeatureWeight,
}

/// The `n` best paths in order of increasing cost.
///
/// With `unique`, paths whose output strings repeat a better path are
/// skipped, so the result holds `n` distinct output strings (or fewer if
/// the machine has fewer).
///
/// The search is best-first over partial paths with the exact remaining
/// cost (the backward shortest distance) as its heuristic, so complete
/// paths are produced in order.
pub fn nbest(fst: &Wfst, n: usize, params: &ParamVector, unique: bool) -> Result<Vec<PathWitness>> {
    let order = precondition(fst, params)?;
    let Some(init) = fst.initial() else {
        return Err(Error::NoPath);
    };
    let future = backward_distances(fst, params, order.as_deref());
    if future[init].is_zero() {
        return Err(Error::NoPath);
    }
    if n == 0 {
        return Ok(Vec::new());
    }

    let mut nodes: Vec<Partial> = Vec::new();
    let mut heap: BinaryHeap<HeapItem> = BinaryHeap::new();
    let mut pops = vec![0usize; fst.num_states()];
    let mut seen: HashSet<Vec<Label>> = HashSet::new();
    let mut out = Vec::new();
    let mut seq = 0u64;

    let mut push = |nodes: &mut Vec<Partial>, heap: &mut BinaryHeap<HeapItem>, node: Partial, est: FeatureWeight| {
        nodes.push(node);
        heap.push(HeapItem {
            key: Keyed::new(est, params),
            seq,
            state: nodes.len() - 1,
        });
        seq += 1;
    };

    push(
        &mut nodes,
        &mut heap,
        Partial {
            parent: None,
            arc: None,
            state: Some(init),
            weight: FeatureWeight::one(),
        },
        future[init].clone(),
    );

    while let Some(item) = heap.pop() {
        let id = item.state;
        match nodes[id].state {
            None => {
                let path = rebuild(fst, &nodes, id);
                if unique && !seen.insert(path.output()) {
                    continue;
                }
                out.push(path);
                if out.len() == n {
                    break;
                }
            }
            Some(s) => {
                pops[s] += 1;
                // Without uniqueness a state never needs more than n expansions.
                if !unique && pops[s] > n {
                    continue;
                }
                let g = nodes[id].weight.clone();
                if fst.is_final(s) {
                    let total = g.times(fst.final_weight(s));
                    push(
                        &mut nodes,
                        &mut heap,
                        Partial {
                            parent: Some(id),
                            arc: None,
                            state: None,
                            weight: total.clone(),
                        },
                        total,
                    );
                }
                for (k, a) in fst.arcs(s).iter().enumerate() {
                    let h = &future[a.nextstate];
                    if h.is_zero() {
                        continue;
                    }
                    let g2 = g.times(&a.weight);
                    let est = g2.times(h);
                    push(
                        &mut nodes,
                        &mut heap,
                        Partial {
                            parent: Some(id),
                            arc: Some((s, k)),
                            state: Some(a.nextstate),
                            weight: g2,
                        },
                        est,
                    );
                }
            }
        }
    }
    Ok(out)
}

fn rebuild(fst: &Wfst, nodes: &[Partial], leaf: usize) -> PathWitness {
    let mut arcs = Vec::new();
    let final_state = nodes[nodes[leaf].parent.expect("complete path has a parent")]
        .state
        .expect("parent of a complete path is a state");
    let mut cur = nodes[leaf].parent;
    while let Some(id) = cur {
        if let Some((s, k)) = nodes[id].arc {
            let a = &fst.arcs(s)[k];
            arcs.push(PathArc {
                ilabel: a.ilabel,
                olabel: a.olabel,
                weight: a.weight.clone(),
            });
        }
        cur = nodes[id].parent;
    }
    arcs.reverse();
    PathWitness::new(arcs, fst.final_weight(final_state).clone())
}

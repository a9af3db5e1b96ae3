//! Composition with the three-state ε-matching filter.
//!
//! Filter states:
//! * `0`: either machine may move, real matches allowed;
//! * `1`: the left machine has taken an output-ε step alone;
//! * `2`: the right machine has taken an input-ε step alone.
//!
//! From `1` only further left-alone ε moves (or a real match) are allowed,
//! from `2` only right-alone ε moves (or a real match), and a simultaneous
//! ε/ε move is only allowed from `0`. Every pair of ε-paths is therefore
//! realised by exactly one interleaving.

use std::collections::{HashMap, VecDeque};

use crate::algorithms::connect::connect;
use crate::error::{Error, Result};
use crate::fst::{Arc, StateId, Wfst};
use crate::symbols::{Label, EPSILON};

type Filter = u8;
type Pending = (Label, Label, crate::semiring::FeatureWeight, (StateId, StateId, Filter));

/// Arc indices of every state, sorted by the matching label.
struct SortedArcs {
    order: Vec<Vec<u32>>,
}

impl SortedArcs {
    fn new(fst: &Wfst, key: impl Fn(&Arc) -> Label) -> Self {
        let order = fst
            .states()
            .map(|s| {
                let arcs = fst.arcs(s);
                let mut idx: Vec<u32> = (0..arcs.len() as u32).collect();
                idx.sort_by_key(|&i| (key(&arcs[i as usize]), i));
                idx
            })
            .collect();
        SortedArcs { order }
    }

    /// Indices of arcs at `s` whose key equals `label`.
    fn range<'a>(&'a self, fst: &'a Wfst, s: StateId, label: Label, key: impl Fn(&Arc) -> Label) -> &'a [u32] {
        let arcs = fst.arcs(s);
        let idx = &self.order[s];
        let lo = idx.partition_point(|&i| key(&arcs[i as usize]) < label);
        let hi = idx.partition_point(|&i| key(&arcs[i as usize]) <= label);
        &idx[lo..hi]
    }

    fn non_epsilon_count(&self, fst: &Wfst, s: StateId, key: impl Fn(&Arc) -> Label) -> usize {
        let arcs = fst.arcs(s);
        let idx = &self.order[s];
        idx.len() - idx.partition_point(|&i| key(&arcs[i as usize]) == EPSILON)
    }
}

fn olabel(a: &Arc) -> Label {
    a.olabel
}

fn ilabel(a: &Arc) -> Label {
    a.ilabel
}

/// `[left ∘ right](x, y) = ⊕_z left(x, z) ⊗ right(z, y)`.
///
/// The output tape of `left` is matched against the input tape of `right`.
/// When both machines carry symbol tables on the matched tapes they must be
/// equal. The result is trimmed with [`connect`].
pub fn compose(left: &Wfst, right: &Wfst) -> Result<Wfst> {
    if let (Some(a), Some(b)) = (left.output_symbols(), right.input_symbols()) {
        if !std::sync::Arc::ptr_eq(a, b) && a != b {
            return Err(Error::AlphabetMismatch);
        }
    }
    let mut out = Wfst::new();
    out.set_input_symbols(left.input_symbols().cloned());
    out.set_output_symbols(right.output_symbols().cloned());
    let (Some(i1), Some(i2)) = (left.initial(), right.initial()) else {
        return Ok(out);
    };

    let lsorted = SortedArcs::new(left, olabel);
    let rsorted = SortedArcs::new(right, ilabel);

    let mut ids: HashMap<(StateId, StateId, Filter), StateId> = HashMap::new();
    let mut queue: VecDeque<(StateId, StateId, Filter)> = VecDeque::new();
    let start = (i1, i2, 0);
    ids.insert(start, out.add_state());
    queue.push_back(start);
    out.set_initial(0)?;

    let mut pending: Vec<Pending> = Vec::new();

    while let Some(tuple) = queue.pop_front() {
        let (q1, q2, filter) = tuple;
        let src = ids[&tuple];
        pending.clear();

        // Real matches on a shared non-ε label.
        let left_real = lsorted.non_epsilon_count(left, q1, olabel);
        let right_real = rsorted.non_epsilon_count(right, q2, ilabel);
        if left_real > 0 && right_real > 0 {
            let larcs = left.arcs(q1);
            let rarcs = right.arcs(q2);
            if left_real <= right_real {
                let lidx = &lsorted.order[q1];
                let start = lidx.len() - left_real;
                for &li in &lidx[start..] {
                    let la = &larcs[li as usize];
                    for &ri in rsorted.range(right, q2, la.olabel, ilabel) {
                        let ra = &rarcs[ri as usize];
                        pending.push((
                            la.ilabel,
                            ra.olabel,
                            la.weight.times(&ra.weight),
                            (la.nextstate, ra.nextstate, 0),
                        ));
                    }
                }
            } else {
                let ridx = &rsorted.order[q2];
                let start = ridx.len() - right_real;
                for &ri in &ridx[start..] {
                    let ra = &rarcs[ri as usize];
                    for &li in lsorted.range(left, q1, ra.ilabel, olabel) {
                        let la = &larcs[li as usize];
                        pending.push((
                            la.ilabel,
                            ra.olabel,
                            la.weight.times(&ra.weight),
                            (la.nextstate, ra.nextstate, 0),
                        ));
                    }
                }
            }
        }

        let left_eps = lsorted.range(left, q1, EPSILON, olabel);
        let right_eps = rsorted.range(right, q2, EPSILON, ilabel);

        // Left moves on output ε, right stays.
        if filter != 2 {
            for &li in left_eps {
                let la = &left.arcs(q1)[li as usize];
                pending.push((la.ilabel, EPSILON, la.weight.clone(), (la.nextstate, q2, 1)));
            }
        }
        // Right moves on input ε, left stays.
        if filter != 1 {
            for &ri in right_eps {
                let ra = &right.arcs(q2)[ri as usize];
                pending.push((EPSILON, ra.olabel, ra.weight.clone(), (q1, ra.nextstate, 2)));
            }
        }
        // Both move on ε together.
        if filter == 0 {
            for &li in left_eps {
                let la = &left.arcs(q1)[li as usize];
                for &ri in right_eps {
                    let ra = &right.arcs(q2)[ri as usize];
                    pending.push((
                        la.ilabel,
                        ra.olabel,
                        la.weight.times(&ra.weight),
                        (la.nextstate, ra.nextstate, 0),
                    ));
                }
            }
        }

        for (il, ol, w, next) in pending.drain(..) {
            let target = match ids.get(&next) {
                Some(&t) => t,
                None => {
                    let t = out.add_state();
                    ids.insert(next, t);
                    queue.push_back(next);
                    t
                }
            };
            out.arcs_mut(src).push(Arc::new(il, ol, w, target));
        }

        if left.is_final(q1) && right.is_final(q2) {
            out.set_final(src, left.final_weight(q1).times(right.final_weight(q2)))?;
        }
    }

    Ok(connect(&out))
}

use crate::fst::{StateId, Wfst};

/// States reachable from `start`.
pub fn accessible(fst: &Wfst, start: StateId) -> Vec<bool> {
    let n = fst.num_states();
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(s) = stack.pop() {
        for a in fst.arcs(s) {
            if a.nextstate < n && !seen[a.nextstate] {
                seen[a.nextstate] = true;
                stack.push(a.nextstate);
            }
        }
    }
    seen
}

/// States from which some final state is reachable.
pub fn coaccessible(fst: &Wfst) -> Vec<bool> {
    let n = fst.num_states();
    let mut reverse: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for (src, a) in fst.all_arcs() {
        if a.nextstate < n {
            reverse[a.nextstate].push(src);
        }
    }
    let mut seen = vec![false; n];
    let mut stack: Vec<StateId> = fst.finals().map(|(s, _)| s).collect();
    for &s in &stack {
        seen[s] = true;
    }
    while let Some(s) = stack.pop() {
        for &p in &reverse[s] {
            if !seen[p] {
                seen[p] = true;
                stack.push(p);
            }
        }
    }
    seen
}

/// Keep only states that are both accessible and coaccessible.
///
/// Surviving states keep their relative order. A machine whose initial
/// state cannot reach a final state comes back with no states at all.
pub fn connect(fst: &Wfst) -> Wfst {
    let Some(init) = fst.initial() else {
        return empty_like(fst);
    };
    let fwd = accessible(fst, init);
    let bwd = coaccessible(fst);
    if !bwd[init] {
        return empty_like(fst);
    }
    let keep: Vec<bool> = fwd.iter().zip(&bwd).map(|(a, b)| *a && *b).collect();
    filter_states(fst, &keep)
}

fn empty_like(fst: &Wfst) -> Wfst {
    let mut out = Wfst::new();
    out.set_input_symbols(fst.input_symbols().cloned());
    out.set_output_symbols(fst.output_symbols().cloned());
    out
}

/// Restrict `fst` to the states flagged in `keep`, renumbering densely.
pub(crate) fn filter_states(fst: &Wfst, keep: &[bool]) -> Wfst {
    let mut map = vec![usize::MAX; fst.num_states()];
    let mut out = empty_like(fst);
    for s in fst.states() {
        if keep[s] {
            map[s] = out.add_state();
        }
    }
    for s in fst.states() {
        if !keep[s] {
            continue;
        }
        let ns = map[s];
        for a in fst.arcs(s) {
            if a.nextstate < keep.len() && keep[a.nextstate] {
                let mut arc = a.clone();
                arc.nextstate = map[a.nextstate];
                out.arcs_mut(ns).push(arc);
            }
        }
        if fst.is_final(s) {
            out.set_final(ns, fst.final_weight(s).clone())
                .expect("state just added");
        }
    }
    if let Some(init) = fst.initial() {
        if keep[init] {
            out.set_initial(map[init]).expect("state just added");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::Arc;
    use crate::oracle::enumerate_paths;
    use crate::semiring::{FeatureWeight, ParamVector};

    #[test]
    fn removes_dead_branch() {
        let mut f = Wfst::string_acceptor(&[2, 3]);
        let dead = f.add_state();
        f.add_arc(0, Arc::new(4, 4, FeatureWeight::one(), dead)).unwrap();
        let unreachable = f.add_state();
        f.add_arc(unreachable, Arc::new(5, 5, FeatureWeight::one(), 2)).unwrap();
        let c = connect(&f);
        assert_eq!(c.num_states(), 3);
        assert_eq!(c.num_arcs(), 2);
        let p = ParamVector::uniform(1.0);
        assert_eq!(
            enumerate_paths(&f, 100, &p).unwrap(),
            enumerate_paths(&c, 100, &p).unwrap()
        );
    }

    #[test]
    fn trim_machine_unchanged() {
        let f = Wfst::string_acceptor(&[2, 3, 4]);
        assert_eq!(connect(&f), f);
    }

    #[test]
    fn no_path_gives_empty_machine() {
        let mut f = Wfst::new();
        let s = f.add_state();
        f.set_initial(s).unwrap();
        let c = connect(&f);
        assert_eq!(c.num_states(), 0);
        assert_eq!(c.initial(), None);
    }
}

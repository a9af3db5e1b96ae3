//! The weighted transducer type shared by every algorithm.

use std::sync::Arc as Shared;

use crate::error::{Error, Result};
use crate::semiring::FeatureWeight;
use crate::symbols::{Label, SymbolTable, EPSILON};

pub type StateId = usize;

/// A transition leaving some state.
#[derive(Clone, Debug, PartialEq)]
pub struct Arc {
    pub ilabel: Label,
    pub olabel: Label,
    pub weight: FeatureWeight,
    pub nextstate: StateId,
}

impl Arc {
    pub fn new(ilabel: Label, olabel: Label, weight: FeatureWeight, nextstate: StateId) -> Self {
        Arc {
            ilabel,
            olabel,
            weight,
            nextstate,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct State {
    arcs: Vec<Arc>,
    final_weight: FeatureWeight,
}

impl Default for State {
    fn default() -> Self {
        State {
            arcs: Vec::new(),
            final_weight: FeatureWeight::zero(),
        }
    }
}

/// Weighted finite-state transducer over [`FeatureWeight`].
///
/// States are dense ids `0..num_states()`, each with an adjacency list.
/// A state is final when its final weight is not the semiring zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Wfst {
    states: Vec<State>,
    initial: Option<StateId>,
    isymbols: Option<Shared<SymbolTable>>,
    osymbols: Option<Shared<SymbolTable>>,
}

impl Wfst {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assemble a machine without checking arc targets.
    ///
    /// Meant for deserializers and tests; [`crate::validate::validate`]
    /// reports any dangling arcs.
    pub fn from_raw_parts(
        num_states: usize,
        initial: Option<StateId>,
        arcs: Vec<(StateId, Arc)>,
        finals: Vec<(StateId, FeatureWeight)>,
    ) -> Self {
        let mut fst = Wfst::new();
        fst.states.resize_with(num_states, State::default);
        fst.initial = initial;
        for (src, arc) in arcs {
            if src >= fst.states.len() {
                fst.states.resize_with(src + 1, State::default);
            }
            fst.states[src].arcs.push(arc);
        }
        for (s, w) in finals {
            if s >= fst.states.len() {
                fst.states.resize_with(s + 1, State::default);
            }
            fst.states[s].final_weight = w;
        }
        fst
    }

    /// Linear acceptor for `labels`, every arc and the final weight one.
    pub fn string_acceptor(labels: &[Label]) -> Self {
        Self::linear(labels.iter().map(|&l| (l, l, FeatureWeight::one())))
    }

    /// Linear machine through the given `(ilabel, olabel, weight)` arcs.
    pub fn linear<I>(arcs: I) -> Self
    where
        I: IntoIterator<Item = (Label, Label, FeatureWeight)>,
    {
        let mut fst = Wfst::new();
        let mut cur = fst.add_state();
        fst.initial = Some(cur);
        for (i, o, w) in arcs {
            let next = fst.add_state();
            fst.states[cur].arcs.push(Arc::new(i, o, w, next));
            cur = next;
        }
        fst.states[cur].final_weight = FeatureWeight::one();
        fst
    }

    pub fn add_state(&mut self) -> StateId {
        self.states.push(State::default());
        self.states.len() - 1
    }

    fn check(&self, s: StateId) -> Result<()> {
        if s < self.states.len() {
            Ok(())
        } else {
            Err(Error::UnknownState(s))
        }
    }

    pub fn add_arc(&mut self, src: StateId, arc: Arc) -> Result<()> {
        self.check(src)?;
        self.check(arc.nextstate)?;
        self.states[src].arcs.push(arc);
        Ok(())
    }

    pub fn set_initial(&mut self, s: StateId) -> Result<()> {
        self.check(s)?;
        self.initial = Some(s);
        Ok(())
    }

    /// Set the final weight of `s`; the semiring zero makes it non-final.
    pub fn set_final(&mut self, s: StateId, weight: FeatureWeight) -> Result<()> {
        self.check(s)?;
        self.states[s].final_weight = weight;
        Ok(())
    }

    pub fn initial(&self) -> Option<StateId> {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.states.iter().map(|s| s.arcs.len()).sum()
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.states.len()
    }

    pub fn arcs(&self, s: StateId) -> &[Arc] {
        &self.states[s].arcs
    }

    pub fn arcs_mut(&mut self, s: StateId) -> &mut Vec<Arc> {
        &mut self.states[s].arcs
    }

    pub fn final_weight(&self, s: StateId) -> &FeatureWeight {
        &self.states[s].final_weight
    }

    pub fn is_final(&self, s: StateId) -> bool {
        !self.states[s].final_weight.is_zero()
    }

    /// Final states with their weights, in id order.
    pub fn finals(&self) -> impl Iterator<Item = (StateId, &FeatureWeight)> {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.final_weight.is_zero())
            .map(|(i, s)| (i, &s.final_weight))
    }

    /// Every `(source, arc)` pair, sources ascending.
    pub fn all_arcs(&self) -> impl Iterator<Item = (StateId, &Arc)> {
        self.states
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.arcs.iter().map(move |a| (i, a)))
    }

    /// Sort each adjacency list by `(ilabel, olabel, nextstate)`.
    pub fn arcsort_input(&mut self) {
        for s in &mut self.states {
            s.arcs.sort_by_key(|a| (a.ilabel, a.olabel, a.nextstate));
        }
    }

    /// Sort each adjacency list by `(olabel, ilabel, nextstate)`.
    pub fn arcsort_output(&mut self) {
        for s in &mut self.states {
            s.arcs.sort_by_key(|a| (a.olabel, a.ilabel, a.nextstate));
        }
    }

    /// True when every arc has `ilabel == olabel`.
    pub fn is_acceptor(&self) -> bool {
        self.all_arcs().all(|(_, a)| a.ilabel == a.olabel)
    }

    pub fn has_epsilons(&self) -> bool {
        self.all_arcs().any(|(_, a)| a.ilabel == EPSILON || a.olabel == EPSILON)
    }

    /// Labels appearing on either tape, ε excluded.
    pub fn labels(&self) -> std::collections::BTreeSet<Label> {
        self.all_arcs()
            .flat_map(|(_, a)| [a.ilabel, a.olabel])
            .filter(|&l| l != EPSILON)
            .collect()
    }

    pub fn input_symbols(&self) -> Option<&Shared<SymbolTable>> {
        self.isymbols.as_ref()
    }

    pub fn output_symbols(&self) -> Option<&Shared<SymbolTable>> {
        self.osymbols.as_ref()
    }

    pub fn set_input_symbols(&mut self, table: Option<Shared<SymbolTable>>) {
        self.isymbols = table;
    }

    pub fn set_output_symbols(&mut self, table: Option<Shared<SymbolTable>>) {
        self.osymbols = table;
    }

    /// Attach the same table to both tapes.
    pub fn set_symbols(&mut self, table: Shared<SymbolTable>) {
        self.isymbols = Some(table.clone());
        self.osymbols = Some(table);
    }

    /// Some directed cycle, as the list of states along it.
    pub fn find_cycle(&self) -> Option<Vec<StateId>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Done,
        }
        let n = self.states.len();
        let mut mark = vec![Mark::New; n];
        let mut parent = vec![usize::MAX; n];
        for root in 0..n {
            if mark[root] != Mark::New {
                continue;
            }
            let mut stack: Vec<(StateId, usize)> = vec![(root, 0)];
            mark[root] = Mark::Open;
            while let Some(&mut (s, ref mut next)) = stack.last_mut() {
                let arcs = &self.states[s].arcs;
                if *next < arcs.len() {
                    let t = arcs[*next].nextstate;
                    *next += 1;
                    if t >= n {
                        continue;
                    }
                    match mark[t] {
                        Mark::New => {
                            mark[t] = Mark::Open;
                            parent[t] = s;
                            stack.push((t, 0));
                        }
                        Mark::Open => {
                            let mut cycle = vec![s];
                            let mut cur = s;
                            while cur != t {
                                cur = parent[cur];
                                cycle.push(cur);
                            }
                            cycle.reverse();
                            return Some(cycle);
                        }
                        Mark::Done => {}
                    }
                } else {
                    mark[s] = Mark::Done;
                    stack.pop();
                }
            }
        }
        None
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }

    /// Topological order of all states, or the offending cycle.
    ///
    /// Ties are resolved by state id so the order is reproducible.
    pub fn topological_order(&self) -> std::result::Result<Vec<StateId>, Vec<StateId>> {
        let n = self.states.len();
        let mut indegree = vec![0usize; n];
        for (_, a) in self.all_arcs() {
            if a.nextstate < n {
                indegree[a.nextstate] += 1;
            }
        }
        let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<StateId>> = indegree
            .iter()
            .enumerate()
            .filter(|(_, d)| **d == 0)
            .map(|(s, _)| std::cmp::Reverse(s))
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some(std::cmp::Reverse(s)) = ready.pop() {
            order.push(s);
            for a in &self.states[s].arcs {
                if a.nextstate < n {
                    indegree[a.nextstate] -= 1;
                    if indegree[a.nextstate] == 0 {
                        ready.push(std::cmp::Reverse(a.nextstate));
                    }
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(self.find_cycle().unwrap_or_default())
        }
    }
}

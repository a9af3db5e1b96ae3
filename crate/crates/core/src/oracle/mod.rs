//! Brute-force reference implementations.
//!
//! Nothing here goes through composition, shortest path or the combination
//! pipeline: paths are enumerated by plain depth-first search, edit
//! distances come from a textbook dynamic program, and the combination
//! objective is minimised by trying every pair of hypotheses. Costs are
//! kept as dense vectors and compared with a locally written version of the
//! weight order, so a bug in the transducer code cannot cancel out.

pub mod synth;

use std::cmp::Ordering;
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::fst::{StateId, Wfst};
use crate::semiring::{feature, FeatureWeight, ParamVector};
use crate::symbols::{Label, EPSILON, UNK};

/// Default cap on enumerated paths per lattice.
pub const DEFAULT_MAX_PATHS: usize = 10_000;

/// One complete path of an acyclic machine.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoredHypothesis {
    /// Input-tape labels, ε removed.
    pub input: Vec<Label>,
    /// Output-tape labels, ε removed.
    pub tokens: Vec<Label>,
    pub features: FeatureWeight,
    /// Scalarized cost of `features`.
    pub score: f64,
}

/// Dense feature vector.
type Dense = Vec<f64>;
/// Cost, NMT string, Hiero string and alignment of a candidate pair.
type Candidate = (Dense, Vec<Label>, Vec<Label>, Vec<AlignedPair>);

fn dense_of(w: &FeatureWeight) -> Dense {
    let len = w
        .entries()
        .last()
        .map(|&(id, _)| id as usize + 1)
        .unwrap_or(0)
        .max(feature::COUNT);
    let mut v = vec![0.0; len];
    for &(id, x) in w.entries() {
        v[id as usize] = x;
    }
    v
}

fn add_into(acc: &mut Dense, other: &[f64]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), 0.0);
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

fn dot(v: &[f64], params: &ParamVector) -> f64 {
    v.iter().enumerate().map(|(i, x)| params.get(i as u32) * x).sum()
}

/// Scalar cost first, then the first differing component in id order.
fn dense_cmp(a: &[f64], b: &[f64], params: &ParamVector) -> Ordering {
    let by_cost = dot(a, params).total_cmp(&dot(b, params));
    if by_cost != Ordering::Equal {
        return by_cost;
    }
    let n = a.len().max(b.len());
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0.0);
        let y = b.get(i).copied().unwrap_or(0.0);
        // canonical weights drop these, so treat them as zero here too
        let x = if x.abs() < crate::semiring::CANONICAL_EPSILON {
            0.0
        } else {
            x
        };
        let y = if y.abs() < crate::semiring::CANONICAL_EPSILON {
            0.0
        } else {
            y
        };
        match x.total_cmp(&y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

fn to_weight(v: &[f64]) -> FeatureWeight {
    FeatureWeight::from_pairs(v.iter().enumerate().map(|(i, &x)| (i as u32, x)))
}

/// Every complete path of an acyclic machine, in depth-first order.
pub fn enumerate_paths(fst: &Wfst, limit: usize, params: &ParamVector) -> Result<Vec<ScoredHypothesis>> {
    if let Some(cycle) = fst.find_cycle() {
        return Err(Error::Cycle(cycle));
    }
    let mut out = Vec::new();
    let Some(init) = fst.initial() else {
        return Ok(out);
    };
    struct Frame {
        state: StateId,
        next: usize,
        input: usize,
        output: usize,
        acc: Dense,
    }
    let mut input: Vec<Label> = Vec::new();
    let mut output: Vec<Label> = Vec::new();
    let mut stack = vec![Frame {
        state: init,
        next: 0,
        input: 0,
        output: 0,
        acc: vec![0.0; feature::COUNT],
    }];
    // emit the empty continuation of the initial state when it is final
    let mut entered = true;
    while let Some(top) = stack.last_mut() {
        input.truncate(top.input);
        output.truncate(top.output);
        if entered {
            entered = false;
            if fst.is_final(top.state) {
                let mut total = top.acc.clone();
                add_into(&mut total, &dense_of(fst.final_weight(top.state)));
                if out.len() == limit {
                    return Err(Error::LimitExceeded(limit));
                }
                out.push(ScoredHypothesis {
                    input: input.clone(),
                    tokens: output.clone(),
                    score: dot(&total, params),
                    features: to_weight(&total),
                });
            }
        }
        let arcs = fst.arcs(top.state);
        if top.next == arcs.len() {
            stack.pop();
            continue;
        }
        let arc = &arcs[top.next];
        top.next += 1;
        let mut acc = top.acc.clone();
        add_into(&mut acc, &dense_of(&arc.weight));
        if arc.ilabel != EPSILON {
            input.push(arc.ilabel);
        }
        if arc.olabel != EPSILON {
            output.push(arc.olabel);
        }
        let frame = Frame {
            state: arc.nextstate,
            next: 0,
            input: input.len(),
            output: output.len(),
            acc,
        };
        stack.push(frame);
        entered = true;
    }
    Ok(out)
}

/// Cost classes of the modified edit distance, independent of any transducer.
#[derive(Clone, Debug)]
pub struct OracleCosts {
    pub nmt_vocab: HashSet<Label>,
    pub lambda_sub: f64,
    pub lambda_edit: f64,
    pub lambda_ins: f64,
}

impl OracleCosts {
    fn params(&self) -> ParamVector {
        ParamVector::new(0.0, 0.0, self.lambda_edit, self.lambda_sub, self.lambda_ins)
    }
}

/// One aligned position: `(nmt_label, hiero_label)`, ε for insertions/deletions.
pub type AlignedPair = (Label, Label);

#[derive(Clone, Debug, PartialEq)]
pub struct Alignment {
    /// The NMT string after UNK runs were expanded.
    pub expanded: Vec<Label>,
    pub pairs: Vec<AlignedPair>,
    pub features: FeatureWeight,
}

impl Alignment {
    /// The NMT string with every UNK replaced by what it was aligned to.
    pub fn filled(&self) -> Vec<Label> {
        self.pairs
            .iter()
            .filter_map(|&(x, y)| match (x, y) {
                (EPSILON, _) => None,
                (UNK, EPSILON) => None,
                (UNK, y) => Some(y),
                (x, _) => Some(x),
            })
            .collect()
    }
}

const EDIT: usize = feature::EDIT_COUNT as usize;
const SUB: usize = feature::SUB_COUNT as usize;
const EXT: usize = feature::UNK_EXT_COUNT as usize;

/// Plain modified edit distance between an expanded NMT string and a Hiero string.
fn modified_dp(x: &[Label], y: &[Label], costs: &OracleCosts, params: &ParamVector) -> (Dense, Vec<AlignedPair>) {
    let (n, m) = (x.len(), y.len());
    let unit = |k: usize| {
        let mut v = vec![0.0; feature::COUNT];
        v[k] = 1.0;
        v
    };
    let zero = vec![0.0; feature::COUNT];
    let sub_cost = |a: Label, b: Label| -> Dense {
        if a == b {
            zero.clone()
        } else if a == UNK {
            if costs.nmt_vocab.contains(&b) {
                unit(SUB)
            } else {
                zero.clone()
            }
        } else {
            unit(EDIT)
        }
    };
    let plus = |a: &Dense, b: &Dense| -> Dense { a.iter().zip(b).map(|(p, q)| p + q).collect() };

    // cell = (cost, move) with move 0 = diagonal, 1 = delete x, 2 = insert y
    let mut table: Vec<Vec<(Dense, u8)>> = vec![vec![(zero.clone(), 0); m + 1]; n + 1];
    for i in 1..=n {
        table[i][0] = (plus(&table[i - 1][0].0, &unit(EDIT)), 1);
    }
    for j in 1..=m {
        table[0][j] = (plus(&table[0][j - 1].0, &unit(EDIT)), 2);
    }
    for i in 1..=n {
        for j in 1..=m {
            let mut best = (plus(&table[i - 1][j - 1].0, &sub_cost(x[i - 1], y[j - 1])), 0u8);
            for (cand, mv) in [
                (plus(&table[i - 1][j].0, &unit(EDIT)), 1u8),
                (plus(&table[i][j - 1].0, &unit(EDIT)), 2u8),
            ] {
                if dense_cmp(&cand, &best.0, params) == Ordering::Less {
                    best = (cand, mv);
                }
            }
            table[i][j] = best;
        }
    }
    let mut pairs = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        match table[i][j].1 {
            0 => {
                pairs.push((x[i - 1], y[j - 1]));
                i -= 1;
                j -= 1;
            }
            1 => {
                pairs.push((x[i - 1], EPSILON));
                i -= 1;
            }
            _ => {
                pairs.push((EPSILON, y[j - 1]));
                j -= 1;
            }
        }
    }
    pairs.reverse();
    (table[n][m].0.clone(), pairs)
}

/// Every way of stretching each UNK in `x` into a run of 1..=max_run UNKs.
fn expansions(x: &[Label], max_run: usize, limit: usize) -> Result<Vec<(Vec<Label>, usize)>> {
    let unks = x.iter().filter(|&&l| l == UNK).count();
    let total = (max_run as f64).powi(unks as i32);
    if total > limit as f64 {
        return Err(Error::LimitExceeded(limit));
    }
    let mut out = vec![(Vec::with_capacity(x.len()), 0usize)];
    for &l in x {
        if l != UNK {
            for (s, _) in &mut out {
                s.push(l);
            }
            continue;
        }
        let mut next = Vec::with_capacity(out.len() * max_run);
        for (s, ext) in &out {
            for k in 1..=max_run {
                let mut s2 = s.clone();
                s2.extend(std::iter::repeat_n(UNK, k));
                next.push((s2, ext + k - 1));
            }
        }
        out = next;
    }
    Ok(out)
}

const MAX_EXPANSIONS: usize = 100_000;

fn check_inputs(y: &[Label], max_unk_run: usize) -> Result<()> {
    if y.contains(&UNK) {
        return Err(Error::contract("the Hiero-side string must not contain UNK"));
    }
    if max_unk_run == 0 {
        return Err(Error::contract("max UNK run must be at least 1"));
    }
    Ok(())
}

/// Best alignment of NMT string `x` (may contain UNK) with Hiero string `y`.
///
/// Each UNK in `x` may first be stretched into up to `max_unk_run` UNKs,
/// each extra one counting one `unk_ext_count`; the stretched string is then
/// aligned with the cell costs: match free, UNK→OOV free, UNK→in-vocabulary
/// one `sub_count`, every other substitution, insertion or deletion one
/// `edit_count`.
pub fn dp_alignment(x: &[Label], y: &[Label], costs: &OracleCosts, max_unk_run: usize) -> Result<Alignment> {
    check_inputs(y, max_unk_run)?;
    let params = costs.params();
    let mut best: Option<(Dense, Vec<Label>, Vec<AlignedPair>)> = None;
    for (expanded, ext) in expansions(x, max_unk_run, MAX_EXPANSIONS)? {
        let (mut cost, pairs) = modified_dp(&expanded, y, costs, &params);
        cost[EXT] += ext as f64;
        if best
            .as_ref()
            .is_none_or(|(b, _, _)| dense_cmp(&cost, b, &params) == Ordering::Less)
        {
            best = Some((cost, expanded, pairs));
        }
    }
    let (cost, expanded, pairs) = best.expect("at least one expansion");
    Ok(Alignment {
        expanded,
        pairs,
        features: to_weight(&cost),
    })
}

/// Feature vector of the best alignment; see [`dp_alignment`].
pub fn dp_edit_distance(x: &[Label], y: &[Label], costs: &OracleCosts, max_unk_run: usize) -> Result<FeatureWeight> {
    Ok(dp_alignment(x, y, costs, max_unk_run)?.features)
}

/// Inputs to [`brute_force_combine`].
#[derive(Clone, Debug)]
pub struct OracleParams {
    pub costs: OracleCosts,
    pub lambda_nmt: f64,
    pub lambda_hiero: f64,
    pub max_unk_run: usize,
    pub max_paths: usize,
}

impl OracleParams {
    pub fn param_vector(&self) -> ParamVector {
        ParamVector::new(
            self.lambda_nmt,
            self.lambda_hiero,
            self.costs.lambda_edit,
            self.costs.lambda_sub,
            self.costs.lambda_ins,
        )
    }
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    /// NMT hypothesis after UNK expansion.
    pub t_nmt: Vec<Label>,
    pub t_hiero: Vec<Label>,
    pub t_comb: Vec<Label>,
    pub cost: f64,
    pub features: FeatureWeight,
    pub alignment: Alignment,
    /// Every `(t_nmt, t_hiero)` pair whose best total weight equals the optimum exactly.
    pub ties: Vec<(Vec<Label>, Vec<Label>)>,
}

/// Exhaustive minimisation of edit distance plus scaled model scores over
/// all pairs of NMT and Hiero hypotheses.
pub fn brute_force_combine(nmt: &Wfst, hiero: &Wfst, params: &OracleParams) -> Result<OracleResult> {
    let pv = params.param_vector();
    let ns = enumerate_paths(nmt, params.max_paths, &pv)?;
    let hs = enumerate_paths(hiero, params.max_paths, &pv)?;
    if ns.is_empty() || hs.is_empty() {
        return Err(Error::NoPath);
    }
    let edit_params = params.costs.params();
    let mut best: Option<Candidate> = None;
    let mut ties: Vec<(Dense, Vec<Label>, Vec<Label>)> = Vec::new();
    for n in &ns {
        let expanded = expansions(&n.input, params.max_unk_run, MAX_EXPANSIONS)?;
        let n_dense = dense_of(&n.features);
        for h in &hs {
            check_inputs(&h.tokens, params.max_unk_run)?;
            let h_dense = dense_of(&h.features);
            for (x, ext) in &expanded {
                let (mut edit, pairs) = modified_dp(x, &h.tokens, &params.costs, &edit_params);
                edit[EXT] += *ext as f64;
                let mut total = n_dense.clone();
                add_into(&mut total, &h_dense);
                add_into(&mut total, &edit);
                match best.as_ref().map(|b| dense_cmp(&total, &b.0, &pv)) {
                    None | Some(Ordering::Less) => {
                        ties.clear();
                        ties.push((total.clone(), x.clone(), h.tokens.clone()));
                        best = Some((total, x.clone(), h.tokens.clone(), pairs));
                    }
                    Some(Ordering::Equal) => ties.push((total, x.clone(), h.tokens.clone())),
                    Some(Ordering::Greater) => {}
                }
            }
        }
    }
    let (total, t_nmt, t_hiero, pairs) = best.expect("nonempty path sets");
    let features = to_weight(&total);
    let edit_only: Dense = {
        let mut v = vec![0.0; feature::COUNT];
        for k in [EDIT, SUB, EXT] {
            v[k] = total[k];
        }
        v
    };
    let alignment = Alignment {
        expanded: t_nmt.clone(),
        pairs,
        features: to_weight(&edit_only),
    };
    let mut tie_pairs: Vec<(Vec<Label>, Vec<Label>)> = ties.into_iter().map(|(_, x, y)| (x, y)).collect();
    tie_pairs.sort();
    tie_pairs.dedup();
    Ok(OracleResult {
        t_comb: alignment.filled(),
        t_nmt,
        t_hiero,
        cost: dot(&total, &pv),
        features,
        alignment,
        ties: tie_pairs,
    })
}

/// Classic unit-cost Levenshtein distance.
pub fn levenshtein(x: &[Label], y: &[Label]) -> usize {
    let mut prev: Vec<usize> = (0..=y.len()).collect();
    for (i, a) in x.iter().enumerate() {
        let mut cur = vec![i + 1; y.len() + 1];
        for (j, b) in y.iter().enumerate() {
            cur[j + 1] = (prev[j] + usize::from(a != b)).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[y.len()]
}

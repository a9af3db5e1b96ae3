use std::fmt::Write as _;

use crate::algorithms::nbest;
use crate::error::{Error, Result};
use crate::semiring::ParamVector;
use crate::validate::TranslationLattice;

use super::CombinationResult;

/// Average count per sentence and share of sentences with a nonzero count.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComponentSummary {
    pub avg_per_sentence: f64,
    /// In percent.
    pub pct_affected: f64,
}

impl ComponentSummary {
    fn from_counts(counts: impl Iterator<Item = usize>, sentences: usize) -> Self {
        let (mut total, mut affected) = (0usize, 0usize);
        for c in counts {
            total += c;
            affected += usize::from(c > 0);
        }
        ComponentSummary {
            avg_per_sentence: total as f64 / sentences as f64,
            pct_affected: 100.0 * affected as f64 / sentences as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusReport {
    pub sentences: usize,
    pub unk_extensions: ComponentSummary,
    pub type2_subs: ComponentSummary,
    pub type3_edits: ComponentSummary,
    pub type1_fills: ComponentSummary,
    pub exact_match_pct: f64,
    /// Sentences whose chosen Hiero hypothesis is the Hiero 1-best, in percent.
    pub hiero_unchanged_pct: f64,
    /// `(n, percent of sentences whose t_hiero is among the n best unique Hiero hypotheses)`.
    pub nbest_membership: Vec<(usize, f64)>,
}

/// Summarise a corpus of combination results.
///
/// `hiero` holds each sentence's Hiero lattice, in the same order as `results`.
/// Hiero rankings use the Hiero scores alone.
pub fn corpus_report(
    results: &[CombinationResult],
    hiero: &[TranslationLattice],
    n_values: &[usize],
) -> Result<CorpusReport> {
    if results.is_empty() {
        return Err(Error::contract("cannot report on an empty corpus"));
    }
    if results.len() != hiero.len() {
        return Err(Error::contract(format!(
            "{} results but {} Hiero lattices",
            results.len(),
            hiero.len()
        )));
    }
    let n = results.len();
    let hiero_only = ParamVector::new(0.0, 1.0, 0.0, 0.0, 0.0);
    let depth = n_values.iter().copied().max().unwrap_or(0).max(1);

    // rank of t_hiero among the unique Hiero hypotheses, if within `depth`
    let mut ranks = Vec::with_capacity(n);
    for (r, h) in results.iter().zip(hiero) {
        let list = nbest(h.fst(), depth, &hiero_only, true)?;
        ranks.push(list.iter().position(|p| p.output() == r.t_hiero));
    }

    let pct = |k: usize| 100.0 * k as f64 / n as f64;
    let nbest_membership = n_values
        .iter()
        .map(|&k| (k, pct(ranks.iter().filter(|r| r.is_some_and(|r| r < k)).count())))
        .collect();

    Ok(CorpusReport {
        sentences: n,
        unk_extensions: ComponentSummary::from_counts(results.iter().map(|r| r.stats.unk_extensions), n),
        type2_subs: ComponentSummary::from_counts(results.iter().map(|r| r.stats.type2_subs), n),
        type3_edits: ComponentSummary::from_counts(results.iter().map(|r| r.stats.type3_edits), n),
        type1_fills: ComponentSummary::from_counts(results.iter().map(|r| r.stats.type1_fills), n),
        exact_match_pct: pct(results.iter().filter(|r| r.stats.exact_match).count()),
        hiero_unchanged_pct: pct(ranks.iter().filter(|r| **r == Some(0)).count()),
        nbest_membership,
    })
}

impl CorpusReport {
    /// One `key=value` pair per line.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "sentences={}", self.sentences);
        for (name, c) in self.rows() {
            let _ = writeln!(out, "{name}.avg_per_sentence={:.4}", c.avg_per_sentence);
            let _ = writeln!(out, "{name}.pct_affected={:.2}", c.pct_affected);
        }
        let _ = writeln!(
            out,
            "type1_fills.avg_per_sentence={:.4}",
            self.type1_fills.avg_per_sentence
        );
        let _ = writeln!(out, "exact_match_pct={:.2}", self.exact_match_pct);
        let _ = writeln!(out, "hiero_unchanged_pct={:.2}", self.hiero_unchanged_pct);
        for (k, p) in &self.nbest_membership {
            let _ = writeln!(out, "nbest_membership.{k}={p:.2}");
        }
        out
    }

    /// Tab-separated table with a header line, one row per edit component.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("component\tavg_per_sentence\tpct_affected\n");
        for (name, c) in self.rows() {
            let _ = writeln!(out, "{name}\t{:.4}\t{:.2}", c.avg_per_sentence, c.pct_affected);
        }
        out
    }

    fn rows(&self) -> [(&'static str, ComponentSummary); 3] {
        [
            ("unk_extensions", self.unk_extensions),
            ("type2_subs", self.type2_subs),
            ("type3_edits", self.type3_edits),
        ]
    }
}

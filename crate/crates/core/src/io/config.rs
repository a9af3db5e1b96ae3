use std::collections::{HashMap, HashSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::pipeline::{CombinationParams, DEFAULT_HIERO_NODE_BUDGET, DEFAULT_MAX_UNK_RUN};
use crate::symbols::{Label, SymbolTable, UNK_SYMBOL};

use super::{content_lines, read_text};

/// Contents of a `key=value` parameter file.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamsConfig {
    pub lambda_nmt: f64,
    pub lambda_hiero: f64,
    pub lambda_sub: f64,
    pub lambda_edit: f64,
    pub lambda_ins: f64,
    pub max_unk_run: usize,
    pub hiero_node_budget: usize,
}

const LAMBDAS: [&str; 5] = ["lambda_nmt", "lambda_hiero", "lambda_sub", "lambda_edit", "lambda_ins"];
const COUNTS: [&str; 2] = ["max_unk_run", "hiero_node_budget"];

impl ParamsConfig {
    pub fn with_vocab(&self, nmt_vocab: HashSet<Label>) -> Result<CombinationParams> {
        let p = CombinationParams {
            lambda_nmt: self.lambda_nmt,
            lambda_hiero: self.lambda_hiero,
            lambda_sub: self.lambda_sub,
            lambda_edit: self.lambda_edit,
            lambda_ins: self.lambda_ins,
            max_unk_run: self.max_unk_run,
            hiero_node_budget: self.hiero_node_budget,
            nmt_vocab,
        };
        p.validate()?;
        Ok(p)
    }
}

pub fn parse_params(text: &str, path: &Path) -> Result<ParamsConfig> {
    let mut lambdas: HashMap<&str, f64> = HashMap::new();
    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (line, content) in content_lines(text) {
        let err = |msg: String| Error::input(path, Some(line), msg);
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err("expected key=value".into()))?;
        let (key, value) = (key.trim(), value.trim());
        if let Some(prev) = seen.insert(key.to_string(), line) {
            return Err(err(format!("{key} already set on line {prev}")));
        }
        if let Some(&k) = LAMBDAS.iter().find(|&&k| k == key) {
            let v: f64 = value.parse().map_err(|_| err(format!("{key}: bad number {value:?}")))?;
            if !v.is_finite() {
                return Err(err(format!("{key} must be finite")));
            }
            lambdas.insert(k, v);
        } else if let Some(&k) = COUNTS.iter().find(|&&k| k == key) {
            let v: usize = value
                .parse()
                .map_err(|_| err(format!("{key}: expected a nonnegative integer, got {value:?}")))?;
            counts.insert(k, v);
        } else {
            return Err(err(format!("unknown key {key:?}")));
        }
    }
    let get = |k: &str| {
        lambdas
            .get(k)
            .copied()
            .ok_or_else(|| Error::input(path, None, format!("missing required key {k}")))
    };
    let config = ParamsConfig {
        lambda_nmt: get("lambda_nmt")?,
        lambda_hiero: get("lambda_hiero")?,
        lambda_sub: get("lambda_sub")?,
        lambda_edit: get("lambda_edit")?,
        lambda_ins: get("lambda_ins")?,
        max_unk_run: counts.get("max_unk_run").copied().unwrap_or(DEFAULT_MAX_UNK_RUN),
        hiero_node_budget: counts
            .get("hiero_node_budget")
            .copied()
            .unwrap_or(DEFAULT_HIERO_NODE_BUDGET),
    };
    if config.lambda_edit <= config.lambda_sub {
        return Err(Error::input(
            path,
            seen.get("lambda_edit").copied(),
            format!(
                "lambda_edit ({}) must exceed lambda_sub ({}): an in-vocabulary UNK fill has to be cheaper than a plain edit",
                config.lambda_edit, config.lambda_sub
            ),
        ));
    }
    config.with_vocab(HashSet::new()).map_err(|e| e.at(path, None))?;
    Ok(config)
}

pub fn read_params(path: &Path) -> Result<ParamsConfig> {
    parse_params(&read_text(path)?, path)
}

/// One word per line; duplicates and UNK are rejected.
pub fn read_vocab(path: &Path) -> Result<Vec<String>> {
    parse_vocab(&read_text(path)?, path)
}

pub(crate) fn parse_vocab(text: &str, path: &Path) -> Result<Vec<String>> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut words = Vec::new();
    for (line, word) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())) {
        if word.is_empty() {
            continue;
        }
        if word == UNK_SYMBOL {
            return Err(Error::input(path, Some(line), "the vocabulary must not list UNK"));
        }
        if let Some(prev) = seen.insert(word, line) {
            return Err(Error::input(
                path,
                Some(line),
                format!("{word:?} already listed on line {prev}"),
            ));
        }
        words.push(word.to_string());
    }
    Ok(words)
}

/// Labels of the vocabulary words; words absent from the table cannot occur
/// in any lattice and are skipped.
pub fn resolve_vocab(words: &[String], symbols: &SymbolTable) -> HashSet<Label> {
    words.iter().filter_map(|w| symbols.label(w)).collect()
}

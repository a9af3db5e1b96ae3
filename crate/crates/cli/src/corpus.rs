use std::fs;
use std::path::{Path, PathBuf};

use latcomb::io::read_translation_lattice;
use latcomb::oracle::brute_force_combine;
use latcomb::{combine, CombinationParams, CombinationResult, Error, FeatureWeight, Label, LatticeKind, SymbolTable};
use rayon::prelude::*;

#[derive(Clone, Copy)]
pub enum Engine {
    Pipeline,
    Oracle { max_paths: usize },
}

pub struct CombineOutcome {
    pub id: String,
    pub t_comb: Vec<Label>,
    pub t_nmt: Vec<Label>,
    pub t_hiero: Vec<Label>,
    pub cost: f64,
    pub features: FeatureWeight,
    /// Only the pipeline produces a full result.
    pub result: Option<CombinationResult>,
}

/// `(id, nmt, hiero)` for every `<id>.nmt.fst` with a matching `<id>.hiero.fst`, sorted by id.
pub fn pair_files(nmt_dir: &Path, hiero_dir: &Path) -> latcomb::Result<Vec<(String, PathBuf, PathBuf)>> {
    let entries = fs::read_dir(nmt_dir).map_err(|source| Error::Io {
        path: nmt_dir.to_path_buf(),
        source,
    })?;
    let mut pairs = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| Error::Io {
            path: nmt_dir.to_path_buf(),
            source,
        })?;
        let name = entry.file_name();
        let Some(id) = name.to_str().and_then(|n| n.strip_suffix(".nmt.fst")) else {
            continue;
        };
        let hiero = hiero_dir.join(format!("{id}.hiero.fst"));
        if !hiero.is_file() {
            return Err(Error::input(
                &hiero,
                None,
                format!("no Hiero lattice for sentence {id}"),
            ));
        }
        pairs.push((id.to_string(), entry.path(), hiero));
    }
    if pairs.is_empty() {
        return Err(Error::input(nmt_dir, None, "no *.nmt.fst files"));
    }
    pairs.sort();
    Ok(pairs)
}

fn combine_one(
    (id, nmt, hiero): &(String, PathBuf, PathBuf),
    symbols: &SymbolTable,
    params: &CombinationParams,
    engine: Engine,
) -> latcomb::Result<CombineOutcome> {
    let n = read_translation_lattice(nmt, Some(symbols), LatticeKind::Nmt)?;
    let h = read_translation_lattice(hiero, Some(symbols), LatticeKind::Hiero)?;
    let located = |e: Error| e.at(nmt, None);
    Ok(match engine {
        Engine::Pipeline => {
            let mut r = combine(&n, &h, params).map_err(|e| match e {
                Error::NoPath => Error::NoPath,
                e => located(e),
            })?;
            r.source_id = Some(id.clone());
            CombineOutcome {
                id: id.clone(),
                t_comb: r.t_comb.clone(),
                t_nmt: r.t_nmt.clone(),
                t_hiero: r.t_hiero.clone(),
                cost: r.total_cost,
                features: r.feature_vector.clone(),
                result: Some(r),
            }
        }
        Engine::Oracle { max_paths } => {
            let o = brute_force_combine(n.fst(), h.fst(), &params.oracle_params(max_paths)).map_err(|e| match e {
                Error::NoPath => Error::NoPath,
                e => located(e),
            })?;
            CombineOutcome {
                id: id.clone(),
                t_comb: o.t_comb,
                t_nmt: o.t_nmt,
                t_hiero: o.t_hiero,
                cost: o.cost,
                features: o.features,
                result: None,
            }
        }
    })
}

/// Combine every pair in parallel; results come back in input order.
pub fn combine_all(
    pairs: &[(String, PathBuf, PathBuf)],
    symbols: &SymbolTable,
    params: &CombinationParams,
    engine: Engine,
) -> latcomb::Result<Vec<CombineOutcome>> {
    pairs
        .par_iter()
        .map(|p| combine_one(p, symbols, params, engine))
        .collect()
}

use crate::error::{Error, Result};
use crate::fst::Wfst;
use crate::semiring::{feature, FeatureId};
use crate::validate::TranslationLattice;

/// Multiply feature `id` by `factor` on every arc and final weight.
///
/// Scaling is normally left to the [`ParamVector`](crate::semiring::ParamVector);
/// this exists for handing lattices to consumers that expect baked-in
/// scalar weights.
pub fn scale_feature(fst: &Wfst, id: FeatureId, factor: f64) -> Result<Wfst> {
    if id as usize >= feature::COUNT {
        return Err(Error::contract(format!("unknown feature id {id}")));
    }
    if !factor.is_finite() {
        return Err(Error::contract("scale factor must be finite"));
    }
    let mut out = fst.clone();
    for s in fst.states() {
        for arc in out.arcs_mut(s) {
            arc.weight = arc.weight.scale_feature(id, factor);
        }
        if fst.is_final(s) {
            out.set_final(s, fst.final_weight(s).scale_feature(id, factor))?;
        }
    }
    Ok(out)
}

pub fn scale_weights(lattice: &TranslationLattice, id: FeatureId, factor: f64) -> Result<TranslationLattice> {
    TranslationLattice::new(scale_feature(lattice.fst(), id, factor)?, lattice.kind())
}

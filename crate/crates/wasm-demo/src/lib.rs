//! Browser bindings: the negativity sweep, the correlation cross-section and a
//! single-point evaluator.

use chancert::correlations::{bell_value, cross_section_point, BellFunctional};
use chancert::quantum_bounds::{cross_section_grid, negativity, CrossSection, Region};
use wasm_bindgen::prelude::*;

fn js_err(e: chancert::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Region codes shared with the page: 0 local, 1 npa2, 2 npa1, 3 ns, 4 signaling-excluded.
pub fn region_code(r: Region) -> u8 {
    match r {
        Region::Local => 0,
        Region::Npa2 => 1,
        Region::Npa1 => 2,
        Region::Ns => 3,
        Region::SignalingExcluded => 4,
    }
}

/// Negativity on an `n x n` grid, flattened with `p` as the slow index.
#[wasm_bindgen]
pub fn negativity_grid(n: usize) -> Result<Vec<f64>, JsError> {
    let grid = chancert::quantum_bounds::negativity_grid(n).map_err(js_err)?;
    Ok(grid.into_iter().flatten().collect())
}

/// Region codes on an `n x n` grid over `(s, t)`, `s` as the slow index.
#[wasm_bindgen]
pub fn cross_section_regions(n: usize) -> Result<Vec<u8>, JsError> {
    let section = CrossSection::new();
    cross_section_grid(n)
        .map_err(js_err)?
        .into_iter()
        .map(|(s, t)| section.classify(s, t).map(region_code).map_err(js_err))
        .collect()
}

#[wasm_bindgen]
pub struct PointEvaluation {
    pub local: bool,
    pub npa2: bool,
    pub npa1: bool,
    pub ns: bool,
    pub region: u8,
    /// CHSH value of `P(s, t)`.
    pub chsh: f64,
    /// Negativity of the dephased `|++>` state at `(p, q) = (s, t)`, when both lie in `[0, 1]`.
    pub negativity: f64,
}

#[wasm_bindgen]
pub fn evaluate_point(s: f64, t: f64) -> Result<PointEvaluation, JsError> {
    let m = CrossSection::new().memberships(s, t).map_err(js_err)?;
    let chsh = bell_value(&BellFunctional::chsh(), &cross_section_point(s, t)).map_err(js_err)?;
    let negativity = match chancert::dephasing::dephased_plus_plus(s, t) {
        Ok(rho) => negativity(&rho, &[1]).map_err(js_err)?,
        Err(_) => f64::NAN,
    };
    Ok(PointEvaluation {
        local: m.local,
        npa2: m.npa2,
        npa1: m.npa1,
        ns: m.ns,
        region: region_code(m.region()),
        chsh,
        negativity,
    })
}

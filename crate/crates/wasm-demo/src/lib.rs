//! Browser bindings for a small interactive page. Each export returns JSON
//! of the form `{"header": [...], "rows": [[...], ...]}` with full-precision
//! numbers; the page does the plotting.
//!
//! The plain functions are usable (and tested) natively; the `#[wasm_bindgen]`
//! wrappers only turn errors into JavaScript exceptions.

use lifemoments::format::{Cell, Grid};
use lifemoments::plot;
use lifemoments::tables::{self, Law, Source, Which};
use lifemoments::{GompertzParams, Product};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn to_json(grid: &Grid) -> String {
    let rows: Vec<Vec<Value>> = grid
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|c| match c {
                    Cell::Text(s) => json!(s),
                    Cell::Number(v) => json!(v),
                })
                .collect()
        })
        .collect();
    json!({ "header": grid.header, "rows": rows }).to_string()
}

/// Survival and density between the knots `s(0), s(1), ...` under UDD,
/// constant force and Balducci.
pub fn knot_curves(knots: &[f64], step: f64) -> Result<String, String> {
    let table = plot::knot_table(knots).map_err(|e| e.to_string())?;
    let last = table.last_age();
    let survival = plot::interpolation(&table, 0, last, step, None).map_err(|e| e.to_string())?;
    let density = plot::densities(&table, 0, last, step, None).map_err(|e| e.to_string())?;
    Ok(format!(
        r#"{{"survival":{},"density":{}}}"#,
        to_json(&survival),
        to_json(&density)
    ))
}

/// Whole-life premiums from age 0 (one year deferred) for a Gompertz law,
/// against the three interpolations of its integer-age table.
pub fn gompertz_premiums(alpha: f64, beta: f64, interest: f64) -> Result<String, String> {
    let g = GompertzParams::new(alpha, beta).map_err(|e| e.to_string())?;
    let source = Source::from_gompertz(g).map_err(|e| e.to_string())?;
    let which = Which::Table5;
    let laws = which.default_laws();
    let base = which.base_spec();
    let mut grid = Grid::new(std::iter::once("expectation").chain(laws.iter().map(|l| l.label())));
    for row in which.rows() {
        let spec = lifemoments::ProductSpec { interest, ..base.with_moment(row.moment) };
        let mut cells = vec![Cell::Text(row.label)];
        for &law in &laws {
            let v = source.evaluate(law, row.product, &spec).map_err(|e| e.to_string())?;
            cells.push(Cell::Number(v));
        }
        grid.push(cells);
    }
    Ok(to_json(&grid))
}

/// Deferred term insurance premium by issue age on a Gompertz law.
pub fn premium_curve(
    alpha: f64,
    beta: f64,
    interest: f64,
    defer: u32,
    term: u32,
    from: u32,
    to: u32,
) -> Result<String, String> {
    let g = GompertzParams::new(alpha, beta).map_err(|e| e.to_string())?;
    let source = Source::from_gompertz(g).map_err(|e| e.to_string())?;
    let spec = lifemoments::ProductSpec::new(from, interest, 1).deferred(defer).years(term);
    let mut laws = Law::interpolated().to_vec();
    laws.push(Law::Gompertz);
    let grid = plot::premium_by_age(&source, &laws, Product::TermInsurance, &spec, (from, to))
        .map_err(|e| e.to_string())?;
    Ok(to_json(&grid))
}

#[wasm_bindgen(js_name = knotCurves)]
pub fn knot_curves_js(knots: Vec<f64>, step: f64) -> Result<String, JsError> {
    knot_curves(&knots, step).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = gompertzPremiums)]
pub fn gompertz_premiums_js(alpha: f64, beta: f64, interest: f64) -> Result<String, JsError> {
    gompertz_premiums(alpha, beta, interest).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = premiumCurve)]
pub fn premium_curve_js(
    alpha: f64,
    beta: f64,
    interest: f64,
    defer: u32,
    term: u32,
    from: u32,
    to: u32,
) -> Result<String, JsError> {
    premium_curve(alpha, beta, interest, defer, term, from, to).map_err(|e| JsError::new(&e))
}

/// Reference Gompertz parameters, as `[alpha, beta]`.
#[wasm_bindgen(js_name = referenceGompertz)]
pub fn reference_gompertz() -> Vec<f64> {
    let g = tables::reference_gompertz();
    vec![g.alpha(), g.beta()]
}

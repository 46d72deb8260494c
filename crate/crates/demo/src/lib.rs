//! Browser bindings. Every export returns a JSON string, or `{"error": ...}`.

use advbound::bounds;
use advbound::problems::build_search;
use advbound::simulator;
use advbound::young;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn respond(r: advbound::Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

/// Additive, hybrid and strong multiplicative bounds for Search on an ε grid.
pub fn search_curve(n: usize, points: usize) -> advbound::Result<Value> {
    if !(2..=256).contains(&n) {
        return Err(advbound::Error::InvalidParameter("n must be in 2..=256".into()));
    }
    let p = build_search(n)?;
    let adv = bounds::search_additive(n)?;
    let nf = n as f64;
    let lt = -1.0 / (nf - 1.0);
    let top = 1.0 - 1.0 / nf - 0.01;
    let points = points.clamp(2, 200);
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let eps = top * i as f64 / (points - 1) as f64;
        let add = bounds::additive_bound(&adv, &p, eps)?.bound.max(0.0);
        let hyb = bounds::hybrid_bound(&adv, &p, eps, lt)?.bound;
        let g = bounds::search_strong_gamma(n, eps);
        let mul = bounds::multiplicative_bound(&bounds::search_multiplicative(n, g)?, &p, eps, g)?.bound;
        rows.push(json!({ "epsilon": eps, "additive": add, "hybrid": hyb, "multiplicative": mul }));
    }
    Ok(json!({ "n": n, "points": rows }))
}

/// Irreps of `S_N × S_M` on injections, with the adversary weight of each.
pub fn census(n: usize, m: usize) -> advbound::Result<Value> {
    let entries = young::index_erasure_census(n, m)?;
    let w = young::ie_weights(n);
    let rows: Vec<Value> = entries
        .iter()
        .map(|e| {
            let k = e.lambda_n.size();
            json!({
                "lambda_n": e.lambda_n.parts(),
                "lambda_m": e.lambda_m.parts(),
                "bad": e.is_bad,
                "dim": e.dim.to_string(),
                "weight": if e.is_bad { w[k] } else { 0.0 },
            })
        })
        .collect();
    let total: u128 = entries.iter().map(|e| e.dim).sum();
    Ok(json!({ "n": n, "m": m, "total": total.to_string(), "irreps": rows }))
}

/// Progress `W^t` after each oracle call and success after each iteration.
pub fn grover(n: usize, iterations: usize) -> advbound::Result<Value> {
    if !(2..=64).contains(&n) || iterations > 32 {
        return Err(advbound::Error::InvalidParameter("n must be in 2..=64 and iterations ≤ 32".into()));
    }
    let p = build_search(n)?;
    let adv = bounds::search_additive(n)?;
    let c = simulator::grover_for_search(n, iterations)?;
    let t = simulator::run(&c, &p)?;
    let w = simulator::progress_trajectory(&t, &adv)?;
    let q = simulator::check_per_query(&t, &adv, &p)?;
    let mut success = Vec::with_capacity(iterations + 1);
    for k in 0..=iterations {
        let ck = simulator::grover_for_search(n, k)?;
        let tk = simulator::run(&ck, &p)?;
        success.push(simulator::success_probability(tk.final_state(), &ck, &p)?);
    }
    let den = bounds::additive_denominators(&adv, &p)?.into_iter().fold(0.0, f64::max);
    Ok(json!({
        "n": n,
        "progress": w,
        "calls_per_iteration": simulator::grover_for_search(n, 1)?.query_count(),
        "success": success,
        "max_step": q.max_observed,
        "step_limit": den,
        "pass": q.pass,
    }))
}

#[wasm_bindgen]
pub fn search_bounds_curve(n: usize, points: usize) -> String {
    respond(search_curve(n, points))
}

#[wasm_bindgen]
pub fn young_census(n: usize, m: usize) -> String {
    respond(census(n, m))
}

#[wasm_bindgen]
pub fn grover_progress(n: usize, iterations: usize) -> String {
    respond(grover(n, iterations))
}

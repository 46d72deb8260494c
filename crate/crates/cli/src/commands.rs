use std::error::Error;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use advbound::bounds::{self, AdversaryKind, AdversaryMatrix, BoundReport, Method, Tolerances};
use advbound::delta::{self, Variant};
use advbound::problems::{build_index_erasure, build_search, OracleProblem};
use advbound::report::{self, Format};
use advbound::rng::DEFAULT_SEED;
use advbound::symmetry::{self, GroupAction};
use advbound::{products, simulator, suite, young};
use serde::Serialize;
use serde_json::json;

use crate::args::*;

type CliResult = Result<bool, Box<dyn Error>>;

pub fn run(cli: &Cli) -> CliResult {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let tol = cli.tol.tolerances();
    match &cli.command {
        Command::Bound(a) => bound(a, seed, &tol),
        Command::CaseStudy(CaseStudy::Search(a)) => search_study(a, &tol),
        Command::CaseStudy(CaseStudy::IndexErasure(a)) => index_erasure_study(a, seed, &tol),
        Command::Decompose(a) => decompose(a, seed),
        Command::Simulate(a) => simulate(a, seed),
        Command::Sdpt(a) => sdpt(a),
        Command::Verify(a) => verify(a, seed),
    }
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), Box<dyn Error>> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display()).into()),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json<T: Serialize + ?Sized>(value: &T, path: Option<&Path>) -> Result<(), Box<dyn Error>> {
    emit(&report::to_json(value)?, path)
}

fn emit_reports(reports: &[BoundReport], extra: serde_json::Value, out: &OutputArgs) -> Result<(), Box<dyn Error>> {
    match Format::from(out.format) {
        Format::Csv => emit(&report::to_csv(reports)?, out.output.as_deref()),
        Format::Json => {
            let mut v = extra;
            v["reports"] = serde_json::to_value(reports)?;
            emit_json(&v, out.output.as_deref())
        }
    }
}

fn need(v: Option<usize>, what: &str) -> Result<usize, Box<dyn Error>> {
    v.ok_or_else(|| format!("--{what} is required for this problem").into())
}

fn load_problem(a: &ProblemArgs) -> Result<Arc<OracleProblem>, Box<dyn Error>> {
    if let Some(path) = &a.problem_file {
        return Ok(Arc::new(OracleProblem::from_file(path)?));
    }
    Ok(Arc::new(match a.problem {
        Some(ProblemName::Search) => build_search(need(a.n, "n")?)?,
        Some(ProblemName::IndexErasure) => build_index_erasure(need(a.n, "n")?, need(a.m, "m")?)?,
        None => return Err("--problem or --problem-file is required".into()),
    }))
}

/// Built-in additive adversary and default `λ̃` for a built-in problem.
fn builtin_additive(a: &ProblemArgs, p: &Arc<OracleProblem>, seed: u64) -> Result<(AdversaryMatrix, f64), Box<dyn Error>> {
    match (a.problem, &a.problem_file) {
        (Some(ProblemName::Search), None) => {
            let n = p.input_size();
            Ok((bounds::search_additive(n)?, -1.0 / (n as f64 - 1.0)))
        }
        (Some(ProblemName::IndexErasure), None) => {
            let s = bounds::index_erasure_setup(p.input_size(), p.output_size(), seed)?;
            Ok((s.adversary, 0.0))
        }
        _ => Err("problem files need --adversary-file".into()),
    }
}

fn bound(a: &BoundArgs, seed: u64, tol: &Tolerances) -> CliResult {
    let p = load_problem(&a.problem)?;
    let method = Method::from(a.method);
    let report = if let Some(path) = &a.adversary_file {
        let adv = AdversaryMatrix::from_json(&fs::read_to_string(path)?)?;
        match method {
            Method::Additive => bounds::additive_bound_with(&adv, &p, a.epsilon, tol)?,
            Method::Hybrid => {
                let lt = a.lambda.ok_or("--lambda (λ̃) is required with --adversary-file")?;
                bounds::hybrid_bound_with(&adv, &p, a.epsilon, lt, tol)?
            }
            Method::Multiplicative => {
                let l = a.lambda.ok_or("--lambda is required with --adversary-file")?;
                bounds::multiplicative_bound_with(&adv, &p, a.epsilon, l, tol)?
            }
        }
    } else {
        let (additive, default_lt) = builtin_additive(&a.problem, &p, seed)?;
        match method {
            Method::Additive => bounds::additive_bound_with(&additive, &p, a.epsilon, tol)?,
            Method::Hybrid => bounds::hybrid_bound_with(&additive, &p, a.epsilon, a.lambda.unwrap_or(default_lt), tol)?,
            Method::Multiplicative => {
                if a.problem.problem == Some(ProblemName::Search) {
                    let n = p.input_size();
                    let g = a.gamma.unwrap_or_else(|| bounds::search_strong_gamma(n, a.epsilon));
                    let adv = bounds::search_multiplicative(n, g)?;
                    bounds::multiplicative_bound_with(&adv, &p, a.epsilon, a.lambda.unwrap_or(g), tol)?
                } else {
                    let g = a.gamma.unwrap_or(1.0);
                    let adv = additive.gamma_family(g)?;
                    let l = a.lambda.unwrap_or(1.0 + g * (1.0 - default_lt));
                    bounds::multiplicative_bound_with(&adv, &p, a.epsilon, l, tol)?
                }
            }
        }
    };
    emit_reports(std::slice::from_ref(&report), json!({}), &a.out)?;
    Ok(true)
}

fn search_study(a: &SearchStudyArgs, tol: &Tolerances) -> CliResult {
    let n = a.n;
    let nf = n as f64;
    let top = 1.0 - 1.0 / nf - 0.01;
    let grid = a
        .epsilons
        .clone()
        .unwrap_or_else(|| (0..=10).map(|i| top * i as f64 / 10.0).collect());
    let p = build_search(n)?;
    let adv = bounds::search_additive(n)?;
    let lt = -1.0 / (nf - 1.0);
    let mut reports = Vec::new();
    let mut closed = Vec::new();
    let mut pass = true;
    for &eps in &grid {
        let cf = bounds::search_closed_forms(n, eps)?;
        let add = bounds::additive_bound_with(&adv, &p, eps, tol)?;
        let hyb = bounds::hybrid_bound_with(&adv, &p, eps, lt, tol)?;
        let g = bounds::search_strong_gamma(n, eps);
        let mul = bounds::multiplicative_bound_with(&bounds::search_multiplicative(n, g)?, &p, eps, g, tol)?;
        let add_ok = (add.bound - cf.adv_pm).abs() <= 1e-9;
        let hyb_ok = (hyb.bound - (1.0 - lt) * cf.hybrid).abs() <= 1e-9;
        pass &= add_ok && hyb_ok;
        closed.push(json!({
            "epsilon": eps,
            "adv_pm": cf.adv_pm,
            "hybrid_stated": cf.hybrid,
            "hybrid_theorem": (1.0 - lt) * cf.hybrid,
            "madv_reference": cf.madv_reference,
            "additive_matches": add_ok,
            "hybrid_matches": hyb_ok,
        }));
        reports.extend([add, hyb, mul]);
    }
    emit_reports(&reports, json!({ "n": n, "closed_forms": closed, "pass": pass }), &a.out)?;
    Ok(pass)
}

fn index_erasure_study(a: &IndexErasureStudyArgs, seed: u64, tol: &Tolerances) -> CliResult {
    let census = young::index_erasure_census(a.n, a.m)?;
    let setup = bounds::index_erasure_setup(a.n, a.m, seed)?;
    let weights = bounds::index_erasure_weights(a.n, &setup.decomposition)?;
    let rep = bounds::hybrid_bound_with(&setup.adversary, &setup.problem, a.epsilon, a.lambda, tol)?;
    let mut pass = true;
    let mut blocks = Vec::new();
    if !a.no_blocks {
        for r in delta::verify_all(&weights, &setup.decomposition, &setup.group, Variant::Additive, seed)? {
            pass &= r.pass;
            blocks.push(r);
        }
    }
    let census_json: Vec<_> = census
        .iter()
        .map(|e| {
            json!({
                "lambda_n": e.lambda_n.to_string(),
                "lambda_m": e.lambda_m.to_string(),
                "bad": e.is_bad,
                "dim": e.dim.to_string(),
            })
        })
        .collect();
    let extra = json!({
        "n": a.n,
        "m": a.m,
        "census": census_json,
        "weights": young::ie_weights(a.n),
        "block_norms": blocks,
        "pass": pass,
    });
    emit_reports(std::slice::from_ref(&rep), extra, &a.out)?;
    Ok(pass)
}

fn load_group(a: &DecomposeArgs, p: Arc<OracleProblem>) -> Result<GroupAction, Box<dyn Error>> {
    if let Some(path) = &a.group_file {
        return Ok(GroupAction::from_json(p, &fs::read_to_string(path)?)?);
    }
    let g = match a.group {
        Some(GroupName::Search) => GroupAction::search_symmetric(p)?,
        Some(GroupName::IndexErasure) => GroupAction::index_erasure(p)?,
        Some(GroupName::Trivial) => GroupAction::trivial(p)?,
        None => match a.problem.problem {
            Some(ProblemName::Search) if a.problem.problem_file.is_none() => GroupAction::search_symmetric(p)?,
            Some(ProblemName::IndexErasure) if a.problem.problem_file.is_none() => GroupAction::index_erasure(p)?,
            _ => GroupAction::trivial(p)?,
        },
    };
    Ok(g)
}

fn decompose(a: &DecomposeArgs, seed: u64) -> CliResult {
    let p = load_problem(&a.problem)?;
    let g = load_group(a, p.clone())?;
    let check = g.verify_automorphism();
    if !check.pass {
        emit_json(&json!({ "automorphism": false, "witness": format!("{:?}", check.witness) }), a.output.as_deref())?;
        return Ok(false);
    }
    let d = symmetry::isotypic_decomposition(&g, seed)?;
    let blocks: Vec<_> = d
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            json!({
                "index": i,
                "dim": b.dim,
                "component": b.component,
                "label": delta::label_string(&b.label),
                "fingerprint": b.fingerprint.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut out = json!({
        "problem": p.name(),
        "family_size": p.family_size(),
        "group_order": g.order().map(|o| o.to_string()),
        "orbit_count": d.orbit_count,
        "multiplicity_free": d.multiplicity_free,
        "blocks": blocks,
    });
    if let Some(x1) = a.restrict_x {
        if x1 == 0 || x1 > p.input_size() {
            return Err(format!("--restrict-x must be in 1..={}", p.input_size()).into());
        }
        let sub = g.stabilizer(x1 - 1, None)?;
        let r = symmetry::restrict(&d, &sub, seed)?;
        let copies: Vec<_> = r
            .copies
            .iter()
            .map(|c| json!({ "parent": c.parent, "irrep": c.irrep, "dim": c.dim, "label": delta::label_string(&c.label) }))
            .collect();
        out["restriction"] = json!({ "x": x1, "copies": copies });
    }
    emit_json(&out, a.output.as_deref())?;
    Ok(true)
}

fn simulate(a: &SimulateArgs, seed: u64) -> CliResult {
    let p = load_problem(&a.problem)?;
    let circuit = match (&a.circuit, a.grover) {
        (Some(path), _) => simulator::QueryCircuit::from_json(&fs::read_to_string(path)?)?,
        (None, Some(k)) => {
            if a.problem.problem != Some(ProblemName::Search) {
                return Err("--grover runs on --problem search".into());
            }
            simulator::grover_for_search(p.input_size(), k)?
        }
        (None, None) => return Err("give --circuit or --grover".into()),
    };
    let (additive, default_lt) = builtin_additive(&a.problem, &p, seed)?;
    let adv = match a.gamma {
        Some(g) => additive.gamma_family(g)?,
        None => additive.clone(),
    };
    let traj = simulator::run(&circuit, &p)?;
    let w = simulator::progress_trajectory(&traj, &adv)?;
    let per_query = simulator::check_per_query(&traj, &adv, &p)?;
    let rho_gap = simulator::check_rho_update(&traj, &circuit, &p)?;
    let success = simulator::success_probability(traj.final_state(), &circuit, &p)?;
    let final_value = simulator::check_final_value(&traj, &circuit, &additive, &p, Some(a.lambda.unwrap_or(default_lt)))?;
    let pass = per_query.pass && rho_gap <= simulator::RHO_UPDATE_TOL && final_value.pass;
    emit_json(
        &json!({
            "problem": p.name(),
            "queries": circuit.query_count(),
            "success": success,
            "progress": w,
            "per_query": per_query,
            "rho_update_gap": rho_gap,
            "final_value": final_value,
            "pass": pass,
        }),
        a.output.as_deref(),
    )?;
    Ok(pass)
}

fn sdpt(a: &SdptArgs) -> CliResult {
    let p = build_search(a.n)?;
    let adv = bounds::search_additive(a.n)?.gamma_family(a.gamma)?;
    let lt = -1.0 / (a.n as f64 - 1.0);
    let lambda = 1.0 + a.gamma * (1.0 - lt);
    let mut pass = true;
    let mut out = Vec::new();
    for &k in &a.k {
        let f = products::verify_factor_norm_identity(&adv, &p, k)?;
        let i = products::bad_subspace_inclusion(&adv, Some(&p), lambda, k)?;
        pass &= f.pass && i.pass;
        out.push(json!({ "k": k, "factor_norm": f, "inclusion": i }));
    }
    debug_assert_eq!(adv.kind(), AdversaryKind::Multiplicative);
    emit_json(&json!({ "n": a.n, "gamma": a.gamma, "lambda": lambda, "checks": out, "pass": pass }), a.output.as_deref())?;
    Ok(pass)
}

fn verify(a: &VerifyArgs, seed: u64) -> CliResult {
    let r = suite::run(&a.suite, seed)?;
    for c in r.checks.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {}: {}{}", c.suite, c.name, c.error.as_ref().map(|e| format!(" ({e})")).unwrap_or_default());
    }
    emit_json(&r, a.output.as_deref())?;
    Ok(r.pass)
}

//! Invariant suites run by `advbound verify`.
//!
//! Every check records the values it compared, so the JSON report of a fixed
//! seed is byte-for-byte reproducible. Failures inside a check become failed
//! checks carrying the error message.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bounds::{self, AdversaryKind, AdversaryMatrix};
use crate::delta::{self, Variant};
use crate::matrix::HermitianMatrix;
use crate::problems::{build_index_erasure, build_search, falling_factorial};
use crate::products;
use crate::simulator;
use crate::symmetry::{isotypic_decomposition, GroupAction};
use crate::young::{self, Partition};
use crate::Result;

pub const SUITES: [&str; 6] = ["search", "delta", "index-erasure", "simulator", "representation", "products"];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub pass: bool,
    pub values: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub suites: Vec<String>,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    pub pass: bool,
}

type Values = BTreeMap<String, f64>;

struct Runner {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Runner {
    fn check(&mut self, name: impl Into<String>, f: impl FnOnce(&mut Values) -> Result<bool>) {
        let mut values = Values::new();
        let name = name.into();
        log::info!("{}: {}", self.suite, name);
        let (pass, error) = match f(&mut values) {
            Ok(p) => (p, None),
            Err(e) => (false, Some(e.to_string())),
        };
        self.checks.push(Check {
            suite: self.suite.to_string(),
            name,
            pass,
            values,
            error,
        });
    }
}

/// Runs one named suite, or every suite for `"all"`.
pub fn run(name: &str, seed: u64) -> Result<SuiteReport> {
    let names: Vec<&'static str> = if name == "all" {
        SUITES.to_vec()
    } else {
        match SUITES.iter().find(|s| **s == name) {
            Some(s) => vec![*s],
            None => {
                return Err(crate::Error::InvalidParameter(format!(
                    "unknown suite {name}; expected one of {} or all",
                    SUITES.join(", ")
                )))
            }
        }
    };
    let mut checks = Vec::new();
    for s in &names {
        let mut r = Runner {
            suite: s,
            checks: Vec::new(),
        };
        match *s {
            "search" => search_suite(&mut r),
            "delta" => delta_suite(&mut r, seed),
            "index-erasure" => index_erasure_suite(&mut r, seed),
            "simulator" => simulator_suite(&mut r),
            "representation" => representation_suite(&mut r, seed),
            "products" => products_suite(&mut r),
            _ => unreachable!(),
        }
        checks.extend(r.checks);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    Ok(SuiteReport {
        seed,
        suites: names.iter().map(|s| s.to_string()).collect(),
        passed: checks.len() - failed,
        failed,
        pass: failed == 0,
        checks,
    })
}

fn search_suite(r: &mut Runner) {
    for n in [4usize, 8, 16] {
        for eps in [0.0, 0.04, 0.1] {
            r.check(format!("additive closed form n={n} eps={eps}"), |v| {
                let p = build_search(n)?;
                let rep = bounds::additive_bound(&bounds::search_additive(n)?, &p, eps)?;
                let want = bounds::search_closed_forms(n, eps)?.adv_pm;
                let den = 1.0 / (n as f64 - 1.0).sqrt();
                v.insert("bound".into(), rep.bound);
                v.insert("closed_form".into(), want);
                v.insert("denominator".into(), rep.denominator);
                Ok((rep.bound - want).abs() <= 1e-9 && (rep.denominator - den).abs() <= 1e-10)
            });
        }
    }
    for n in [4usize, 8, 16] {
        r.check(format!("hybrid theorem value n={n}"), |v| {
            let p = build_search(n)?;
            let adv = bounds::search_additive(n)?;
            let nf = n as f64;
            let lt = -1.0 / (nf - 1.0);
            let top = 1.0 - 1.0 / nf - 0.01;
            let mut worst: f64 = 0.0;
            let mut below_closed_form = 0.0;
            for i in 0..=20 {
                let eps = top * i as f64 / 20.0;
                let rep = bounds::hybrid_bound(&adv, &p, eps, lt)?;
                let closed = bounds::search_closed_forms(n, eps)?.hybrid;
                worst = worst.max((rep.bound - (1.0 - lt) * closed).abs());
                if rep.bound < closed - 1e-12 {
                    below_closed_form += 1.0;
                }
            }
            let half = bounds::hybrid_bound(&adv, &p, 0.5, lt)?.bound;
            v.insert("max_gap_to_theorem".into(), worst);
            v.insert("points_below_closed_form".into(), below_closed_form);
            v.insert("bound_at_half".into(), half);
            Ok(worst <= 1e-9 && below_closed_form == 0.0 && half > 0.0)
        });
    }
    let n = 16;
    for eps in [0.0, 0.1, 0.3, 0.5] {
        r.check(format!("method ordering n=16 eps={eps}"), |v| {
            let p = build_search(n)?;
            let adv = bounds::search_additive(n)?;
            let lt = -1.0 / 15.0;
            let hyb = bounds::hybrid_bound(&adv, &p, eps, lt)?.bound;
            let mut best = hyb;
            if eps < 0.5 {
                let lemma = bounds::comparison_lambda_tilde(eps);
                if let Ok(rep) = bounds::hybrid_bound(&adv, &p, eps, lemma) {
                    best = best.max(rep.bound);
                }
            }
            let add = bounds::additive_bound(&adv, &p, eps)?.bound;
            let scan = bounds::madv_gamma_scan(&adv, &p, eps, lt, &[1e-3]);
            let madv = scan[0].bound.unwrap_or(f64::NAN);
            v.insert("hybrid".into(), hyb);
            v.insert("hybrid_best".into(), best);
            v.insert("additive".into(), add);
            v.insert("madv_small_gamma".into(), madv);
            let mut ok = best >= add / 60.0 && ((madv - hyb) / hyb).abs() <= 0.02;
            if eps == 0.5 {
                let g = bounds::search_strong_gamma(n, eps);
                let strong = bounds::multiplicative_bound(&bounds::search_multiplicative(n, g)?, &p, eps, g)?;
                v.insert("madv_strong".into(), strong.bound);
                ok &= strong.bound > hyb;
            }
            Ok(ok)
        });
    }
}

fn delta_cases() -> Vec<(String, GroupAction, bool)> {
    let mut out = Vec::new();
    for n in [4, 8] {
        if let Ok(p) = build_search(n) {
            if let Ok(g) = GroupAction::search_symmetric(Arc::new(p)) {
                out.push((format!("search-{n}"), g, false));
            }
        }
    }
    for (n, m) in [(2, 3), (3, 4), (3, 5)] {
        if let Ok(p) = build_index_erasure(n, m) {
            if let Ok(g) = GroupAction::index_erasure(Arc::new(p)) {
                out.push((format!("index-erasure-{n}-{m}"), g, true));
            }
        }
    }
    out
}

fn delta_suite(r: &mut Runner, seed: u64) {
    for (name, g, is_ie) in delta_cases() {
        r.check(format!("block norms {name}"), |v| {
            let decomp = isotypic_decomposition(&g, seed)?;
            let w = if is_ie {
                bounds::index_erasure_weights(g.problem().input_size(), &decomp)?
            } else {
                vec![1.0, -1.0 / (g.problem().input_size() as f64 - 1.0)]
            };
            let mut ok = true;
            let mut worst: f64 = 0.0;
            for (variant, weights) in [
                (Variant::Additive, w.clone()),
                (Variant::Multiplicative, delta::gamma_family_weights(&w, 0.5)),
            ] {
                for rep in delta::verify_all(&weights, &decomp, &g, variant, seed)? {
                    worst = worst.max(rep.gap);
                    if let Some((a, b)) = rep.inverse {
                        worst = worst.max((a - b).abs());
                    }
                    ok &= rep.pass;
                }
            }
            v.insert("max_gap".into(), worst);
            Ok(ok)
        });
    }
}

fn index_erasure_suite(r: &mut Runner, seed: u64) {
    for m in 1..=6usize {
        for n in 1..=m {
            r.check(format!("census and decomposition N={n} M={m}"), |v| {
                let census = young::index_erasure_census(n, m)?;
                let total: u128 = census.iter().map(|e| e.dim).sum();
                let p = Arc::new(build_index_erasure(n, m)?);
                let g = GroupAction::index_erasure(p.clone())?;
                let mf = g.is_multiplicity_free()?;
                let decomp = isotypic_decomposition(&g, seed)?;
                let mut got: Vec<(Vec<Partition>, u128)> = decomp
                    .blocks
                    .iter()
                    .map(|b| (b.label.clone().unwrap_or_default(), b.dim as u128))
                    .collect();
                let mut want: Vec<(Vec<Partition>, u128)> = census
                    .iter()
                    .map(|e| (vec![e.lambda_n.clone(), e.lambda_m.clone()], e.dim))
                    .collect();
                got.sort();
                want.sort();
                let bad = bounds::index_erasure_bad_projector(&decomp)?;
                let eta = bad.trace_product(p.target_gram());
                let nm = n as f64 / m as f64;
                v.insert("census_total".into(), total as f64);
                v.insert("blocks".into(), decomp.blocks.len() as f64);
                v.insert("eta".into(), eta);
                Ok(total == falling_factorial(m, n) && got == want && mf && (eta - nm).abs() <= 1e-10)
            });
        }
    }
    r.check("hybrid positive N=4 M=8 eps=0.1", |v| {
        let s = bounds::index_erasure_setup(4, 8, seed)?;
        let rep = bounds::hybrid_bound(&s.adversary, &s.problem, 0.1, 0.0)?;
        v.insert("bound".into(), rep.bound);
        v.insert("eta".into(), rep.eta);
        v.insert("denominator".into(), rep.denominator);
        Ok(rep.bound > 0.0)
    });
    r.check("denominator decreases in N at M=2N", |v| {
        let mut dens = Vec::new();
        for n in [2usize, 3, 4] {
            let s = bounds::index_erasure_setup(n, 2 * n, seed)?;
            let d = bounds::additive_denominators(&s.adversary, &s.problem)?
                .into_iter()
                .fold(0.0, f64::max);
            v.insert(format!("denominator_N{n}"), d);
            dens.push(d);
        }
        Ok(dens.windows(2).all(|w| w[1] < w[0]))
    });
}

fn simulator_suite(r: &mut Runner) {
    for (n, k) in [(4usize, 1usize), (16, 3)] {
        r.check(format!("grover n={n} k={k}"), |v| {
            let p = build_search(n)?;
            let c = simulator::grover_for_search(n, k)?;
            let t = simulator::run(&c, &p)?;
            let adv = bounds::search_additive(n)?;
            let q = simulator::check_per_query(&t, &adv, &p)?;
            let rho = simulator::check_rho_update(&t, &c, &p)?;
            let fin = simulator::check_final_value(&t, &c, &adv, &p, Some(-1.0 / (n as f64 - 1.0)))?;
            let s = simulator::success_probability(t.final_state(), &c, &p)?;
            let want = simulator::grover_success(n, k);
            let norms = t.norms().iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
            v.insert("max_query_change".into(), q.max_observed);
            v.insert("rho_update_gap".into(), rho);
            v.insert("w_final".into(), fin.w_final);
            v.insert("c_eps_observed".into(), fin.additive_limit);
            v.insert("success".into(), s);
            v.insert("success_closed_form".into(), want);
            Ok(q.pass && rho <= simulator::RHO_UPDATE_TOL && fin.pass && (s - want).abs() <= 1e-9 && norms <= 1e-9)
        });
    }
    r.check("grover n=8 multiplicative ratios", |v| {
        let n = 8;
        let p = build_search(n)?;
        let c = simulator::grover_for_search(n, 2)?;
        let t = simulator::run(&c, &p)?;
        let adv = bounds::search_additive(n)?.gamma_family(1.0)?;
        let q = simulator::check_per_query(&t, &adv, &p)?;
        let w = simulator::progress_trajectory(&t, &adv)?;
        v.insert("max_ratio".into(), q.max_observed);
        v.insert("w0".into(), w[0]);
        Ok(q.pass && (w[0] - 1.0).abs() <= 1e-9)
    });
}

fn representation_suite(r: &mut Runner, seed: u64) {
    r.check("trace identities search-4", |v| {
        let g = GroupAction::search_symmetric(Arc::new(build_search(4)?))?;
        let d = isotypic_decomposition(&g, seed)?;
        let rep = delta::trace_proj_check(&d, &g, 0, 1, seed, 1e-8)?;
        v.insert("product_gap".into(), rep.product_gap);
        v.insert("modulus_gap".into(), rep.modulus_gap);
        v.insert("isomorphic_tuples".into(), rep.isomorphic_tuples as f64);
        Ok(rep.pass)
    });
    r.check("trace identities index-erasure-2-3", |v| {
        let g = GroupAction::index_erasure(Arc::new(build_index_erasure(2, 3)?))?;
        let d = isotypic_decomposition(&g, seed)?;
        let rep = delta::trace_proj_check(&d, &g, 0, 0, seed, 1e-8)?;
        v.insert("product_gap".into(), rep.product_gap);
        v.insert("modulus_gap".into(), rep.modulus_gap);
        v.insert("isomorphic_tuples".into(), rep.isomorphic_tuples as f64);
        Ok(rep.pass)
    });
    r.check("hook lengths and branching N<=8", |v| {
        let mut ok = true;
        for n in 1..=8usize {
            let mut sum: u128 = 0;
            for lam in young::partitions(n) {
                let d = young::full_dimension(&lam)?;
                sum += d * d;
                if n > 1 {
                    let below = lam.below_first_row();
                    let restricted: u128 = young::restrict_one(&below, n)?
                        .iter()
                        .map(|mu| young::hook_dimension(mu, n - 1))
                        .sum::<Result<u128>>()?;
                    ok &= restricted == d;
                }
            }
            ok &= sum == young::factorial(n);
        }
        v.insert("max_n".into(), 8.0);
        Ok(ok)
    });
}

fn products_suite(r: &mut Runner) {
    for k in [2usize, 3] {
        r.check(format!("factor-norm identity search-3 k={k}"), |v| {
            let p = build_search(3)?;
            let g = bounds::search_additive(3)?.gamma_family(2.0)?;
            let rep = products::verify_factor_norm_identity(&g, &p, k)?;
            v.insert("gap".into(), rep.gap);
            v.insert("product_computing".into(), rep.product_computing);
            Ok(rep.pass)
        });
    }
    r.check("bad-subspace inclusion search-3 k=2", |v| {
        let p = build_search(3)?;
        let gamma = 2.0;
        let lt = -0.5;
        let g = bounds::search_additive(3)?.gamma_family(gamma)?;
        let rep = products::bad_subspace_inclusion(&g, Some(&p), 1.0 + gamma * (1.0 - lt), 2)?;
        v.insert("bad_dim".into(), rep.bad_dim as f64);
        v.insert("max_good_factors".into(), rep.max_good_factors as f64);
        v.insert("spectrum_gap".into(), rep.spectrum_gap);
        Ok(rep.pass && rep.max_good_factors == 0)
    });
    r.check("identity adversary", |v| {
        let p = build_search(3)?;
        let i = AdversaryMatrix::new(HermitianMatrix::identity(3), AdversaryKind::Multiplicative)?;
        let rep = products::verify_factor_norm_identity(&i, &p, 2)?;
        v.insert("product_computing".into(), rep.product_computing);
        Ok(rep.pass && (rep.product_computing - 1.0).abs() <= 1e-12)
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for s in ["search", "products", "representation", "simulator"] {
            let r = run(s, 1).unwrap();
            let failed: Vec<_> = r.checks.iter().filter(|c| !c.pass).collect();
            assert!(r.pass, "{failed:?}");
        }
        assert!(run("nope", 1).is_err());
    }
}

//! `k` independent instances of a problem and the two finite lemmas behind
//! the strong direct product theorem: the factor-norm identity and the
//! inclusion of the product bad subspace.
//!
//! Tuples `(f_1, …, f_k)` are indexed with `f_1` most significant, matching
//! the Kronecker order of `Γ^{⊗k}`. The input letter `(x, i)` has index `i·N + x`.

use serde::{Deserialize, Serialize};

use crate::bounds::{self, AdversaryKind, AdversaryMatrix};
use crate::matrix::{self, c64, HermitianMatrix, Matrix};
use crate::problems::{OracleProblem, ProblemKind, Target, MAX_FAMILY};
use crate::{too_large, Error, Result};

pub const MAX_DENSE_PRODUCT: usize = 4096;
pub const FACTOR_NORM_TOL: f64 = 1e-8;
const SPECTRUM_TOL: f64 = 1e-9;

fn checked_power(base: usize, k: usize, limit: usize, what: &str) -> Result<usize> {
    let mut acc: usize = 1;
    for _ in 0..k {
        acc = acc.saturating_mul(base);
        if acc > limit {
            return Err(too_large(what, acc, limit));
        }
    }
    Ok(acc)
}

/// Digits of `index` in base `base`, most significant first.
fn digits(mut index: usize, base: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    out
}

/// The problem of solving `k` independent instances of `p`.
pub fn tensor_problem(p: &OracleProblem, k: usize) -> Result<OracleProblem> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let nf = p.family_size();
    let total = checked_power(nf, k, MAX_FAMILY, "product family")?;
    let n = p.input_size();
    let functions: Vec<Vec<usize>> = (0..total)
        .map(|t| {
            let idx = digits(t, nf, k);
            let mut f = vec![0; n * k];
            for (i, &fi) in idx.iter().enumerate() {
                f[i * n..(i + 1) * n].copy_from_slice(&p.functions()[fi]);
            }
            f
        })
        .collect();
    let target = match p.target() {
        Target::Labels(z) => {
            let mut distinct: Vec<i64> = z.clone();
            distinct.sort_unstable();
            distinct.dedup();
            let base = distinct.len();
            let rank = |v: i64| distinct.binary_search(&v).unwrap();
            Target::Labels(
                (0..total)
                    .map(|t| {
                        digits(t, nf, k)
                            .iter()
                            .fold(0i64, |acc, &fi| acc * base as i64 + rank(z[fi]) as i64)
                    })
                    .collect(),
            )
        }
        Target::Gram(g) => {
            let idx: Vec<Vec<usize>> = (0..total).map(|t| digits(t, nf, k)).collect();
            Target::Gram(HermitianMatrix::from_fn(total, |a, b| {
                idx[a]
                    .iter()
                    .zip(&idx[b])
                    .fold(c64::new(1.0, 0.0), |acc, (&fa, &fb)| acc * g.get(fa, fb))
            })?)
        }
    };
    let name = if k == 1 {
        p.name().to_string()
    } else {
        format!("{}^{k}", p.name())
    };
    OracleProblem::new(name, n * k, p.output_size(), functions, p.kind(), target)
}

/// `Γ^{⊗k}` for a multiplicative adversary.
pub fn tensor_adversary(adv: &AdversaryMatrix, k: usize) -> Result<AdversaryMatrix> {
    if adv.kind() != AdversaryKind::Multiplicative {
        return Err(Error::InvalidAdversary("tensor powers are taken of multiplicative matrices only".into()));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    checked_power(adv.dim(), k, MAX_DENSE_PRODUCT, "dense product adversary")?;
    let mut acc = adv.matrix().matrix().clone();
    for _ in 1..k {
        acc = matrix::kron(acc.as_ref(), adv.matrix().as_ref());
    }
    AdversaryMatrix::new(HermitianMatrix::new(acc)?, AdversaryKind::Multiplicative)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorNormReport {
    pub k: usize,
    /// `max_x ‖Γ_x^{1/2}Γ^{−1/2}‖²` and the same over `(x, i)` for `Γ^{⊗k}`.
    pub base_computing: f64,
    pub product_computing: f64,
    pub base_uncomputing: f64,
    pub product_uncomputing: f64,
    pub gap: f64,
    pub pass: bool,
}

pub fn verify_factor_norm_identity(adv: &AdversaryMatrix, p: &OracleProblem, k: usize) -> Result<FactorNormReport> {
    if !bounds::validate(adv, p).pass {
        return Err(Error::InvalidAdversary("base adversary is not valid".into()));
    }
    let base = bounds::ratio_norms(adv, p)?;
    let pk = tensor_problem(p, k)?;
    let ak = tensor_adversary(adv, k)?;
    let prod = bounds::ratio_norms(&ak, &pk)?;
    let max = |v: &[bounds::RatioNorms], f: fn(&bounds::RatioNorms) -> f64| v.iter().map(f).fold(0.0, f64::max);
    let (bc, pc) = (max(&base, |r| r.computing), max(&prod, |r| r.computing));
    let (bu, pu) = (max(&base, |r| r.uncomputing), max(&prod, |r| r.uncomputing));
    let gap = (bc - pc).abs().max((bu - pu).abs());
    Ok(FactorNormReport {
        k,
        base_computing: bc,
        product_computing: pc,
        base_uncomputing: bu,
        product_uncomputing: pu,
        gap,
        pass: gap <= FACTOR_NORM_TOL,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InclusionReport {
    pub k: usize,
    pub lambda: f64,
    pub lambda_product: f64,
    /// Number of product eigenvectors below `λ'`.
    pub bad_dim: usize,
    /// Product eigenvectors below `λ'` whose good-factor count violates `10·|v| < k`.
    pub violations: usize,
    /// Largest good-factor count among product eigenvectors below `λ'`.
    pub max_good_factors: usize,
    /// Largest gap between the sorted product spectrum and the direct spectrum of `Γ^{⊗k}`.
    pub spectrum_gap: f64,
    /// Dimension of the bad subspace from the direct eigendecomposition.
    pub direct_bad_dim: usize,
    /// `η` of the base problem at `λ`, and `η'` of the product at `λ'`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_product: Option<f64>,
    pub pass: bool,
}

/// Classifies the product eigenbasis of `Γ^{⊗k}` by its pattern of good factors.
///
/// A factor eigenvector is good when its eigenvalue is at least `λ`; a product
/// eigenvector is bad when its eigenvalue is below `λ' = λ^{k/10}`.
pub fn bad_subspace_inclusion(
    adv: &AdversaryMatrix,
    p: Option<&OracleProblem>,
    lambda: f64,
    k: usize,
) -> Result<InclusionReport> {
    if adv.kind() != AdversaryKind::Multiplicative {
        return Err(Error::InvalidAdversary("inclusion concerns multiplicative matrices".into()));
    }
    if lambda <= 1.0 || k == 0 {
        return Err(Error::InvalidParameter("need λ > 1 and k ≥ 1".into()));
    }
    let tol = bounds::Tolerances::default();
    let ev = &adv.spectrum().eigenvalues;
    let d = ev.len();
    let total = checked_power(d, k, MAX_DENSE_PRODUCT, "product spectrum")?;
    let lambda_product = lambda.powf(k as f64 / 10.0);
    let cut = lambda - tol.threshold * lambda.max(1.0);
    let cut_product = lambda_product - tol.threshold * lambda_product.max(1.0);
    let mut products = Vec::with_capacity(total);
    let (mut bad_dim, mut violations, mut max_good) = (0, 0, 0);
    for t in 0..total {
        let idx = digits(t, d, k);
        let value: f64 = idx.iter().map(|&j| ev[j]).product();
        products.push(value);
        if value < cut_product {
            bad_dim += 1;
            let good = idx.iter().filter(|&&j| ev[j] >= cut).count();
            max_good = max_good.max(good);
            if 10 * good >= k {
                violations += 1;
            }
        }
    }
    products.sort_by(f64::total_cmp);
    let ak = tensor_adversary(adv, k)?;
    let direct = &ak.spectrum().eigenvalues;
    let spectrum_gap = products
        .iter()
        .zip(direct)
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0, f64::max);
    let direct_bad_dim = direct.iter().filter(|&&v| v < cut_product).count();
    let (eta, eta_product) = match p {
        Some(p) => {
            let base = bounds::eta(p, &bounds::multiplicative_bad_projector(adv, lambda, &tol))?;
            let pk = tensor_problem(p, k)?;
            let prod = bounds::eta(&pk, &bounds::multiplicative_bad_projector(&ak, lambda_product, &tol))?;
            (Some(base), Some(prod))
        }
        None => (None, None),
    };
    Ok(InclusionReport {
        k,
        lambda,
        lambda_product,
        bad_dim,
        violations,
        max_good_factors: max_good,
        spectrum_gap,
        direct_bad_dim,
        eta,
        eta_product,
        pass: violations == 0 && spectrum_gap <= SPECTRUM_TOL && direct_bad_dim == bad_dim,
    })
}

/// Junk handling of product problems is limited to the coherent case, where the junk matrix is all-ones.
pub fn product_junk_supported(p: &OracleProblem) -> bool {
    p.kind() != ProblemKind::NonCoherentGeneration
}

/// Kronecker power of a dense matrix.
pub fn kron_power(a: &Matrix, k: usize) -> Matrix {
    let mut acc = a.clone();
    for _ in 1..k {
        acc = matrix::kron(acc.as_ref(), a.as_ref());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::search_additive;
    use crate::problems::build_search;

    #[test]
    fn product_problem_shapes() {
        let p = build_search(2).unwrap();
        let p1 = tensor_problem(&p, 1).unwrap();
        assert_eq!(p1.functions(), p.functions());
        let p2 = tensor_problem(&p, 2).unwrap();
        assert_eq!((p2.family_size(), p2.input_size()), (4, 4));
        let p3 = tensor_problem(&build_search(3).unwrap(), 2).unwrap();
        let gram = HermitianMatrix::from_fn(9, |a, b| p3.gram_entry(a, b)).unwrap();
        assert!(gram.max_abs_diff(&HermitianMatrix::identity(9)) == 0.0);
        assert!(tensor_problem(&build_search(200).unwrap(), 2).is_err());
    }

    #[test]
    fn query_patterns_multiply_row_sums() {
        let base = build_search(3).unwrap();
        let p2 = tensor_problem(&base, 2).unwrap();
        for i in 0..2 {
            for x in 0..3 {
                let d = p2.d_matrix(i * 3 + x).unwrap();
                let db = base.d_matrix(x).unwrap();
                for a in 0..9 {
                    let row: f64 = (0..9).map(|b| d.get(a, b).re).sum();
                    let fa = digits(a, 3, 2)[i];
                    let brow: f64 = (0..3).map(|b| db.get(fa, b).re).sum();
                    assert_eq!(row, 3.0 * brow);
                }
            }
        }
    }

    #[test]
    fn tensor_adversary_examples() {
        let i = AdversaryMatrix::new(HermitianMatrix::identity(3), AdversaryKind::Multiplicative).unwrap();
        assert!(tensor_adversary(&i, 2).unwrap().matrix().max_abs_diff(&HermitianMatrix::identity(9)) == 0.0);
        assert!(tensor_adversary(&search_additive(3).unwrap(), 2).is_err());
        let g = search_additive(3).unwrap().gamma_family(2.0).unwrap();
        let g2 = tensor_adversary(&g, 2).unwrap();
        let top = |a: &AdversaryMatrix| *a.spectrum().eigenvalues.last().unwrap();
        assert!((top(&g2) - top(&g).powi(2)).abs() < 1e-9);
    }

    #[test]
    fn factor_norm_identity_search3() {
        let p = build_search(3).unwrap();
        let g = search_additive(3).unwrap().gamma_family(2.0).unwrap();
        for k in [2, 3] {
            let r = verify_factor_norm_identity(&g, &p, k).unwrap();
            assert!(r.gap < 1e-9, "{r:?}");
        }
        let i = AdversaryMatrix::new(HermitianMatrix::identity(3), AdversaryKind::Multiplicative).unwrap();
        let r = verify_factor_norm_identity(&i, &p, 2).unwrap();
        assert!((r.product_computing - 1.0).abs() < 1e-12 && (r.base_computing - 1.0).abs() < 1e-12);
        let p2 = build_search(2).unwrap();
        let g = search_additive(2).unwrap().gamma_family(1.5).unwrap();
        assert!(verify_factor_norm_identity(&g, &p2, 3).unwrap().gap < 1e-9);
    }

    #[test]
    fn inclusion_k2() {
        let p = build_search(3).unwrap();
        let g = search_additive(3).unwrap().gamma_family(2.0).unwrap();
        let lambda = 1.0 + 2.0 * 1.5;
        let r = bad_subspace_inclusion(&g, Some(&p), lambda, 2).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.max_good_factors, 0);
        assert!(r.eta_product.unwrap() <= r.eta.unwrap() + 1e-12);
    }
}

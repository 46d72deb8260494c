//! Adversary matrices and the three lower bounds built on them.
//!
//! * additive: `(1 − C(ε)) / max_x ‖Γ̃_x − Γ̃‖` with `C(ε) = ε + 2√(ε(1−ε))`;
//! * hybrid: `K̃ / max_x ‖Γ̃_x − Γ̃‖` with `K̃ = (1 − λ̃)(√(1−ε) − √η)²`;
//! * multiplicative: `ln K / ln max_x max(‖Γ_x^{1/2}Γ^{−1/2}‖², ‖Γ^{1/2}Γ_x^{−1/2}‖²)`
//!   with `K = 1 + (λ − 1)(√(1−ε) − √η)²`.
//!
//! Both squared norms in the multiplicative denominator come from one
//! eigenvalue computation: they are the largest eigenvalue of
//! `Γ^{−1/2} Γ_x Γ^{−1/2}` and the inverse of its smallest.

use serde::{Deserialize, Serialize};

use crate::matrix::{self, c64, HermitianMatrix, Spectrum};
use crate::problems::{OracleProblem, ProblemKind, Target};
use crate::symmetry::{self, GroupAction, IsotypicDecomposition};
use crate::young;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdversaryKind {
    Additive,
    Multiplicative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Additive,
    Hybrid,
    Multiplicative,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Additive => "additive",
            Method::Hybrid => "hybrid",
            Method::Multiplicative => "multiplicative",
        }
    }
}

/// Numerical tolerances of bound evaluation.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Tolerances {
    /// Margin on the closed side of eigenvalue thresholds.
    pub threshold: f64,
    /// Slack for `Γ|δ⟩ = |δ⟩`, `‖Γ̃‖ ≤ 1` and `Γ ⪰ I`.
    pub validity: f64,
    /// Slack for the zero condition of the additive method.
    pub zero_condition: f64,
    /// Slack for `η ≤ 1 − ε`.
    pub hypothesis: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            threshold: 1e-9,
            validity: 1e-9,
            zero_condition: 1e-9,
            hypothesis: 1e-12,
        }
    }
}

/// A Hermitian matrix over the family with `Γ|δ⟩ = |δ⟩`.
#[derive(Clone, Debug)]
pub struct AdversaryMatrix {
    matrix: HermitianMatrix,
    kind: AdversaryKind,
    spectrum: Spectrum,
}

impl AdversaryMatrix {
    pub fn new(matrix: HermitianMatrix, kind: AdversaryKind) -> Result<Self> {
        Self::with_tolerance(matrix, kind, Tolerances::default().validity)
    }

    pub fn with_tolerance(matrix: HermitianMatrix, kind: AdversaryKind, tol: f64) -> Result<Self> {
        let n = matrix.dim();
        let s = 1.0 / (n as f64).sqrt();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let row: c64 = (0..n).map(|j| matrix.get(i, j) * s).sum();
            worst = worst.max((row - c64::new(s, 0.0)).norm());
        }
        if worst > tol {
            return Err(Error::InvalidAdversary(format!(
                "|δ⟩ is not an eigenvector with eigenvalue 1 (residual {worst:.3e})"
            )));
        }
        let spectrum = matrix::eigh_raw(&matrix)?;
        let (lo, hi) = (spectrum.eigenvalues[0], spectrum.eigenvalues[n - 1]);
        match kind {
            AdversaryKind::Additive if lo.abs().max(hi.abs()) > 1.0 + tol => {
                return Err(Error::InvalidAdversary(format!(
                    "additive adversary has norm {:.12}",
                    lo.abs().max(hi.abs())
                )))
            }
            AdversaryKind::Multiplicative if lo < 1.0 - tol => {
                return Err(Error::InvalidAdversary(format!(
                    "multiplicative adversary has eigenvalue {lo:.12} below 1"
                )))
            }
            _ => {}
        }
        Ok(Self {
            matrix,
            kind,
            spectrum,
        })
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn kind(&self) -> AdversaryKind {
        self.kind
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `Γ(γ) = I + γ(I − Γ̃)`, multiplicative for `γ > 0`.
    pub fn gamma_family(&self, gamma: f64) -> Result<AdversaryMatrix> {
        if self.kind != AdversaryKind::Additive {
            return Err(Error::InvalidParameter("Γ(γ) is built from an additive matrix".into()));
        }
        if gamma <= 0.0 {
            return Err(Error::InvalidParameter(format!("γ = {gamma} must be positive")));
        }
        let id = HermitianMatrix::identity(self.dim());
        let m = id.combine(1.0 + gamma, &self.matrix, -gamma)?;
        AdversaryMatrix::new(m, AdversaryKind::Multiplicative)
    }

    /// Projector onto eigenvectors with eigenvalue satisfying `keep`.
    pub fn eigen_projector(&self, keep: impl Fn(f64) -> bool) -> HermitianMatrix {
        self.spectrum.projector_where(keep)
    }
}

/// On-disk form of an adversary matrix; entries are numbers or `[re, im]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdversaryFile {
    pub kind: AdversaryKind,
    pub matrix: Vec<Vec<serde_json::Value>>,
}

impl AdversaryMatrix {
    pub fn from_json(text: &str) -> Result<Self> {
        let f: AdversaryFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let n = f.matrix.len();
        let mut m = crate::matrix::Matrix::zeros(n, n);
        for (i, row) in f.matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Parse("adversary matrix must be square".into()));
            }
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = crate::problems::parse_complex(v)?;
            }
        }
        AdversaryMatrix::new(HermitianMatrix::new(m)?, f.kind)
    }
}

/// `Γ_x = Γ ∘ D_x`.
pub fn gamma_x(adv: &AdversaryMatrix, p: &OracleProblem, x: usize) -> Result<HermitianMatrix> {
    check_dim(adv, p)?;
    p.restrict_query(adv.matrix(), x)
}

fn check_dim(adv: &AdversaryMatrix, p: &OracleProblem) -> Result<()> {
    if adv.dim() != p.family_size() {
        return Err(Error::Dimension(format!(
            "adversary of dimension {} for a family of size {}",
            adv.dim(),
            p.family_size()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Validation {
    pub pass: bool,
    pub kind: AdversaryKind,
    pub delta_residual: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// Worst violation of the zero condition, present for additive matrices.
    pub zero_condition: Option<f64>,
    pub messages: Vec<String>,
}

/// Kind-specific checks and, for additive matrices, the zero condition
/// `tr[Γ̃(ρ⊙ ∘ M)] = 0` for all junk matrices `M`.
///
/// For classical problems this is the entry pattern `Γ̃_{ff'} = 0` whenever
/// `z(f) = z(f')`; for coherent generation the junk matrix is all-ones and
/// the condition is `tr[Γ̃ ρ⊙] = 0`.
pub fn validate(adv: &AdversaryMatrix, p: &OracleProblem) -> Validation {
    validate_with(adv, p, &Tolerances::default())
}

pub fn validate_with(adv: &AdversaryMatrix, p: &OracleProblem, tol: &Tolerances) -> Validation {
    let mut messages = Vec::new();
    let n = adv.dim();
    let s = 1.0 / (n as f64).sqrt();
    let delta_residual = (0..n)
        .map(|i| {
            let row: c64 = (0..n).map(|j| adv.matrix.get(i, j) * s).sum();
            (row - c64::new(s, 0.0)).norm()
        })
        .fold(0.0, f64::max);
    let ev = &adv.spectrum.eigenvalues;
    let (lo, hi) = (ev[0], ev[n - 1]);
    let mut pass = true;
    if n != p.family_size() {
        pass = false;
        messages.push("dimension differs from the family size".into());
    }
    if delta_residual > tol.validity {
        pass = false;
        messages.push(format!("Γ|δ⟩ ≠ |δ⟩ (residual {delta_residual:.3e})"));
    }
    let zero_condition = match adv.kind {
        AdversaryKind::Additive => {
            if lo.abs().max(hi.abs()) > 1.0 + tol.validity {
                pass = false;
                messages.push("norm exceeds 1".into());
            }
            if n == p.family_size() {
                match zero_condition_violation(adv.matrix(), p) {
                    Ok(v) => {
                        if v > tol.zero_condition {
                            pass = false;
                            messages.push(format!("zero condition violated by {v:.3e}"));
                        }
                        Some(v)
                    }
                    Err(e) => {
                        pass = false;
                        messages.push(e.to_string());
                        None
                    }
                }
            } else {
                None
            }
        }
        AdversaryKind::Multiplicative => {
            if lo < 1.0 - tol.validity {
                pass = false;
                messages.push(format!("eigenvalue {lo:.3e} below 1"));
            }
            None
        }
    };
    Validation {
        pass,
        kind: adv.kind,
        delta_residual,
        min_eigenvalue: lo,
        max_eigenvalue: hi,
        zero_condition,
        messages,
    }
}

/// Largest deviation from the zero condition.
pub fn zero_condition_violation(g: &HermitianMatrix, p: &OracleProblem) -> Result<f64> {
    match p.kind() {
        ProblemKind::ClassicalFunction => {
            let labels: Vec<i64> = match p.target() {
                Target::Labels(z) => z.clone(),
                Target::Gram(gram) => {
                    // 0/1 Gram: label = first function with the same answer.
                    (0..gram.dim())
                        .map(|f| (0..=f).find(|&h| gram.get(f, h).re > 0.5).unwrap() as i64)
                        .collect()
                }
            };
            let n = g.dim();
            let mut worst: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if labels[i] == labels[j] {
                        worst = worst.max(g.get(i, j).norm());
                    }
                }
            }
            Ok(worst)
        }
        ProblemKind::CoherentGeneration => Ok(g.trace_product(p.target_gram()).abs()),
        ProblemKind::NonCoherentGeneration => Err(Error::Unsupported(
            "junk optimization unsupported for non-coherent generation".into(),
        )),
    }
}

/// `tr[Γ (ρ⊙ ∘ M)]` for a junk Gram matrix `M`.
pub fn junk_trace(g: &HermitianMatrix, p: &OracleProblem, junk: &HermitianMatrix) -> Result<f64> {
    let masked = HermitianMatrix::new(matrix::hadamard(p.target_gram().as_ref(), junk.as_ref())?)?;
    Ok(g.trace_product(&masked))
}

/// Success probability of the trivial strategy on the bad subspace.
///
/// Classical problems: `max_z ‖Π_z Π_bad‖²`. Coherent generation: `tr[Π_bad ρ⊙]`.
pub fn eta(p: &OracleProblem, bad: &HermitianMatrix) -> Result<f64> {
    if bad.dim() != p.family_size() {
        return Err(Error::Dimension("bad projector does not live on the family".into()));
    }
    let sq = bad.as_ref() * bad.as_ref();
    if (sq.as_ref() - bad.as_ref()).norm_max() > 1e-8 {
        return Err(Error::InvalidParameter("bad projector is not idempotent".into()));
    }
    match p.kind() {
        ProblemKind::ClassicalFunction => {
            let n = p.family_size();
            let mut classes: Vec<Vec<usize>> = Vec::new();
            let mut seen = vec![false; n];
            for f in 0..n {
                if seen[f] {
                    continue;
                }
                let class: Vec<usize> = (f..n).filter(|&h| p.gram_entry(f, h).re > 0.5).collect();
                class.iter().for_each(|&h| seen[h] = true);
                classes.push(class);
            }
            let mut best: f64 = 0.0;
            for c in classes {
                let sub = HermitianMatrix::from_fn(c.len(), |i, j| bad.get(c[i], c[j]))?;
                let ev = matrix::eigenvalues(&sub)?;
                best = best.max(ev[ev.len() - 1]);
            }
            Ok(best.clamp(0.0, 1.0))
        }
        ProblemKind::CoherentGeneration => Ok(bad.trace_product(p.target_gram()).clamp(0.0, 1.0)),
        ProblemKind::NonCoherentGeneration => Err(Error::Unsupported(
            "junk optimization unsupported for non-coherent generation".into(),
        )),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerX {
    /// Input letter, 1-based.
    pub x: usize,
    pub value: f64,
}

/// Multiplicative per-query norms at one input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioNorms {
    /// Input letter, 1-based.
    pub x: usize,
    /// `‖Γ_x^{1/2} Γ^{−1/2}‖²`.
    pub computing: f64,
    /// `‖Γ^{1/2} Γ_x^{−1/2}‖²`.
    pub uncomputing: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub method: Method,
    pub problem: String,
    pub input_size: usize,
    pub output_size: usize,
    pub family_size: usize,
    pub epsilon: f64,
    /// `λ̃` (hybrid) or `λ` (multiplicative).
    pub lambda_threshold: Option<f64>,
    pub eta: f64,
    /// `1 − C(ε)`, `K̃`, or `ln K`.
    pub numerator: f64,
    pub per_x_denominators: Vec<PerX>,
    pub denominator: f64,
    pub bound: f64,
    /// Input letter achieving the maximum, 1-based.
    pub witness_x: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ratio_norms: Vec<RatioNorms>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

pub const FLAG_VACUOUS: &str = "method vacuous";

/// `C(ε) = ε + 2√(ε(1−ε))`.
pub fn c_eps(epsilon: f64) -> f64 {
    epsilon + 2.0 * (epsilon * (1.0 - epsilon)).sqrt()
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("ε = {epsilon} outside [0, 1)")));
    }
    Ok(())
}

/// `‖Γ̃_x − Γ̃‖` for every `x`.
pub fn additive_denominators(adv: &AdversaryMatrix, p: &OracleProblem) -> Result<Vec<f64>> {
    check_dim(adv, p)?;
    let results = crate::par_map(p.input_size(), |x| -> Result<f64> {
        let gx = p.restrict_query(adv.matrix(), x)?;
        let diff = gx.combine(1.0, adv.matrix(), -1.0)?;
        matrix::spectral_norm(&diff)
    });
    results.into_iter().collect()
}

/// Multiplicative per-query norms for every `x`.
pub fn ratio_norms(adv: &AdversaryMatrix, p: &OracleProblem) -> Result<Vec<RatioNorms>> {
    check_dim(adv, p)?;
    let inv_sqrt = adv.spectrum.map(|v| 1.0 / v.sqrt());
    let results = crate::par_map(p.input_size(), |x| -> Result<RatioNorms> {
        let gx = p.restrict_query(adv.matrix(), x)?;
        let m = gx.congruence(inv_sqrt.as_ref())?;
        let ev = matrix::eigenvalues(&m)?;
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        if lo <= 0.0 {
            return Err(Error::Singular(lo));
        }
        Ok(RatioNorms {
            x: x + 1,
            computing: hi,
            uncomputing: 1.0 / lo,
        })
    });
    results.into_iter().collect()
}

fn argmax(values: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

fn per_x(values: &[f64]) -> Vec<PerX> {
    values
        .iter()
        .enumerate()
        .map(|(x, &value)| PerX { x: x + 1, value })
        .collect()
}

pub fn additive_bound(adv: &AdversaryMatrix, p: &OracleProblem, epsilon: f64) -> Result<BoundReport> {
    additive_bound_with(adv, p, epsilon, &Tolerances::default())
}

pub fn additive_bound_with(
    adv: &AdversaryMatrix,
    p: &OracleProblem,
    epsilon: f64,
    tol: &Tolerances,
) -> Result<BoundReport> {
    check_epsilon(epsilon)?;
    if adv.kind != AdversaryKind::Additive {
        return Err(Error::InvalidAdversary("additive bound needs an additive matrix".into()));
    }
    let v = validate_with(adv, p, tol);
    if !v.pass {
        return Err(Error::InvalidAdversary(v.messages.join("; ")));
    }
    let dens = additive_denominators(adv, p)?;
    let (wx, den) = argmax(&dens);
    if den <= 0.0 {
        return Err(Error::NoProgress("Γ̃_x = Γ̃ for every x".into()));
    }
    let c = c_eps(epsilon);
    let numerator = 1.0 - c;
    let mut flags = Vec::new();
    if c >= 1.0 {
        flags.push(FLAG_VACUOUS.to_string());
    }
    Ok(BoundReport {
        method: Method::Additive,
        problem: p.name().to_string(),
        input_size: p.input_size(),
        output_size: p.output_size(),
        family_size: p.family_size(),
        epsilon,
        lambda_threshold: None,
        eta: 0.0,
        numerator,
        per_x_denominators: per_x(&dens),
        denominator: den,
        bound: numerator / den,
        witness_x: wx + 1,
        ratio_norms: Vec::new(),
        flags,
    })
}

pub fn hybrid_bound(
    adv: &AdversaryMatrix,
    p: &OracleProblem,
    epsilon: f64,
    lambda_tilde: f64,
) -> Result<BoundReport> {
    hybrid_bound_with(adv, p, epsilon, lambda_tilde, &Tolerances::default())
}

/// Bad subspace of the hybrid method: eigenvalues strictly above `λ̃`.
pub fn hybrid_bad_projector(adv: &AdversaryMatrix, lambda_tilde: f64, tol: &Tolerances) -> HermitianMatrix {
    let cut = lambda_tilde + tol.threshold * lambda_tilde.abs().max(1.0);
    adv.eigen_projector(|v| v > cut)
}

/// Bad subspace of the multiplicative method: eigenvalues strictly below `λ`.
pub fn multiplicative_bad_projector(adv: &AdversaryMatrix, lambda: f64, tol: &Tolerances) -> HermitianMatrix {
    let cut = lambda - tol.threshold * lambda.abs().max(1.0);
    adv.eigen_projector(|v| v < cut)
}

fn success_gap(epsilon: f64, eta: f64, tol: &Tolerances) -> Result<f64> {
    if eta > 1.0 - epsilon + tol.hypothesis {
        return Err(Error::Hypothesis(format!("η = {eta} exceeds 1 − ε = {}", 1.0 - epsilon)));
    }
    Ok(((1.0 - epsilon).sqrt() - eta.sqrt()).max(0.0).powi(2))
}

pub fn hybrid_bound_with(
    adv: &AdversaryMatrix,
    p: &OracleProblem,
    epsilon: f64,
    lambda_tilde: f64,
    tol: &Tolerances,
) -> Result<BoundReport> {
    check_epsilon(epsilon)?;
    check_dim(adv, p)?;
    if adv.kind != AdversaryKind::Additive {
        return Err(Error::InvalidAdversary("hybrid bound needs an additive matrix".into()));
    }
    if lambda_tilde >= 1.0 {
        return Err(Error::InvalidParameter(format!("λ̃ = {lambda_tilde} must be below 1")));
    }
    let dens = additive_denominators(adv, p)?;
    let (wx, den) = argmax(&dens);
    if den <= 0.0 {
        return Err(Error::NoProgress("Γ̃_x = Γ̃ for every x".into()));
    }
    let bad = hybrid_bad_projector(adv, lambda_tilde, tol);
    let eta = eta(p, &bad)?;
    let numerator = (1.0 - lambda_tilde) * success_gap(epsilon, eta, tol)?;
    Ok(BoundReport {
        method: Method::Hybrid,
        problem: p.name().to_string(),
        input_size: p.input_size(),
        output_size: p.output_size(),
        family_size: p.family_size(),
        epsilon,
        lambda_threshold: Some(lambda_tilde),
        eta,
        numerator,
        per_x_denominators: per_x(&dens),
        denominator: den,
        bound: numerator / den,
        witness_x: wx + 1,
        ratio_norms: Vec::new(),
        flags: Vec::new(),
    })
}

pub fn multiplicative_bound(
    adv: &AdversaryMatrix,
    p: &OracleProblem,
    epsilon: f64,
    lambda: f64,
) -> Result<BoundReport> {
    multiplicative_bound_with(adv, p, epsilon, lambda, &Tolerances::default())
}

pub fn multiplicative_bound_with(
    adv: &AdversaryMatrix,
    p: &OracleProblem,
    epsilon: f64,
    lambda: f64,
    tol: &Tolerances,
) -> Result<BoundReport> {
    check_epsilon(epsilon)?;
    check_dim(adv, p)?;
    if adv.kind != AdversaryKind::Multiplicative {
        return Err(Error::InvalidAdversary("multiplicative bound needs a multiplicative matrix".into()));
    }
    if lambda <= 1.0 {
        return Err(Error::InvalidParameter(format!("λ = {lambda} must exceed 1")));
    }
    let norms = ratio_norms(adv, p)?;
    let logs: Vec<f64> = norms
        .iter()
        .map(|r| r.computing.max(r.uncomputing).ln())
        .collect();
    let (wx, den) = argmax(&logs);
    if den <= 1e-14 {
        return Err(Error::NoProgress("Γ_x = Γ for every x".into()));
    }
    let bad = multiplicative_bad_projector(adv, lambda, tol);
    let eta = eta(p, &bad)?;
    let k = 1.0 + (lambda - 1.0) * success_gap(epsilon, eta, tol)?;
    let numerator = k.ln();
    Ok(BoundReport {
        method: Method::Multiplicative,
        problem: p.name().to_string(),
        input_size: p.input_size(),
        output_size: p.output_size(),
        family_size: p.family_size(),
        epsilon,
        lambda_threshold: Some(lambda),
        eta,
        numerator,
        per_x_denominators: per_x(&logs),
        denominator: den,
        bound: numerator / den,
        witness_x: wx + 1,
        ratio_norms: norms,
        flags: Vec::new(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanPoint {
    pub gamma: f64,
    pub lambda: f64,
    pub bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Multiplicative bounds of `Γ(γ) = I + γ(I − Γ̃)` at `λ(γ) = 1 + γ(1 − λ̃)`.
pub fn madv_gamma_scan(
    additive: &AdversaryMatrix,
    p: &OracleProblem,
    epsilon: f64,
    lambda_tilde: f64,
    grid: &[f64],
) -> Vec<ScanPoint> {
    grid.iter()
        .map(|&gamma| {
            let lambda = 1.0 + gamma * (1.0 - lambda_tilde);
            let r = additive
                .gamma_family(gamma)
                .and_then(|g| multiplicative_bound(&g, p, epsilon, lambda));
            match r {
                Ok(rep) => ScanPoint {
                    gamma,
                    lambda,
                    bound: Some(rep.bound),
                    error: None,
                },
                Err(e) => ScanPoint {
                    gamma,
                    lambda,
                    bound: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SearchClosedForms {
    pub adv_pm: f64,
    pub hybrid: f64,
    /// Scaling reference `(√(1−ε) − 1/√n)·√n·ln 2`; the constant is not proven.
    pub madv_reference: f64,
}

pub fn search_closed_forms(n: usize, epsilon: f64) -> Result<SearchClosedForms> {
    if n < 2 {
        return Err(Error::InvalidParameter("n ≥ 2".into()));
    }
    let nf = n as f64;
    if !(0.0..1.0 - 1.0 / nf).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("ε = {epsilon} outside [0, 1 − 1/n)")));
    }
    let beta = (1.0 - epsilon).sqrt() - 1.0 / nf.sqrt();
    Ok(SearchClosedForms {
        adv_pm: (1.0 - c_eps(epsilon)) * (nf - 1.0).sqrt(),
        hybrid: beta * beta * (nf - 1.0).sqrt(),
        madv_reference: beta * nf.sqrt() * std::f64::consts::LN_2,
    })
}

/// `λ̃ = (4/(1−ε))^{1/3} − 1`.
pub fn comparison_lambda_tilde(epsilon: f64) -> f64 {
    (4.0 / (1.0 - epsilon)).cbrt() - 1.0
}

/// `β = √(1−ε) − 1/√n`, and the multiplicative Search weight `γ = 1 + 1/β²` that makes `K = 2`.
pub fn search_strong_gamma(n: usize, epsilon: f64) -> f64 {
    let beta = (1.0 - epsilon).sqrt() - 1.0 / (n as f64).sqrt();
    1.0 + 1.0 / (beta * beta)
}

/// `Π_0 + γ Π_1` on Search, where `Π_0 = |δ⟩⟨δ|`.
pub fn search_matrix(n: usize, gamma: f64) -> Result<HermitianMatrix> {
    let nf = n as f64;
    HermitianMatrix::from_real(n, |i, j| {
        let p0 = 1.0 / nf;
        let id = (i == j) as u8 as f64;
        p0 + gamma * (id - p0)
    })
}

/// Additive Search adversary with `γ = −1/(n−1)`.
pub fn search_additive(n: usize) -> Result<AdversaryMatrix> {
    AdversaryMatrix::new(search_matrix(n, -1.0 / (n as f64 - 1.0))?, AdversaryKind::Additive)
}

/// Multiplicative Search adversary `Π_0 + γ Π_1` with `γ ≥ 1`.
pub fn search_multiplicative(n: usize, gamma: f64) -> Result<AdversaryMatrix> {
    AdversaryMatrix::new(search_matrix(n, gamma)?, AdversaryKind::Multiplicative)
}

/// Per-block weights `γ_{|λ|}` on bad blocks `(λ, λ)` and 0 elsewhere.
pub fn index_erasure_weights(n: usize, decomp: &IsotypicDecomposition) -> Result<Vec<f64>> {
    let table = young::ie_weights(n);
    decomp
        .blocks
        .iter()
        .map(|b| {
            let label = b
                .label
                .as_ref()
                .ok_or_else(|| Error::Decomposition("Index Erasure blocks need labels".into()))?;
            Ok(if label.len() == 2 && label[0] == label[1] {
                table[label[0].size()]
            } else {
                0.0
            })
        })
        .collect()
}

/// `Γ̃ = Σ_λ γ_{|λ|} Π_(λ,λ)` from a labelled decomposition of Index Erasure.
pub fn index_erasure_matrix(n: usize, decomp: &IsotypicDecomposition) -> Result<HermitianMatrix> {
    crate::delta::weighted_sum(decomp, &index_erasure_weights(n, decomp)?)
}

/// Projector onto all bad irreps `(λ, λ)`.
pub fn index_erasure_bad_projector(decomp: &IsotypicDecomposition) -> Result<HermitianMatrix> {
    let dim = decomp.blocks.first().map(|b| b.basis.nrows()).unwrap_or(0);
    let mut acc = crate::matrix::Matrix::zeros(dim, dim);
    for b in &decomp.blocks {
        if let Some(l) = &b.label {
            if l.len() == 2 && l[0] == l[1] {
                acc += b.basis.as_ref() * b.basis.adjoint();
            }
        }
    }
    HermitianMatrix::new(acc)
}

/// Index Erasure with its `S_N × S_M` decomposition and weighted adversary.
pub struct IndexErasureSetup {
    pub problem: std::sync::Arc<OracleProblem>,
    pub group: GroupAction,
    pub decomposition: IsotypicDecomposition,
    pub adversary: AdversaryMatrix,
}

pub fn index_erasure_setup(n: usize, m: usize, seed: u64) -> Result<IndexErasureSetup> {
    let problem = std::sync::Arc::new(crate::problems::build_index_erasure(n, m)?);
    let group = GroupAction::index_erasure(problem.clone())?;
    let decomposition = symmetry::isotypic_decomposition(&group, seed)?;
    let adversary = AdversaryMatrix::new(index_erasure_matrix(n, &decomposition)?, AdversaryKind::Additive)?;
    Ok(IndexErasureSetup {
        problem,
        group,
        decomposition,
        adversary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{build_index_erasure, build_search};

    #[test]
    fn diagonal_adversary_survives_masks() {
        let p = build_search(3).unwrap();
        let adv = AdversaryMatrix::new(HermitianMatrix::identity(3), AdversaryKind::Multiplicative).unwrap();
        for x in 0..3 {
            assert!(gamma_x(&adv, &p, x).unwrap().max_abs_diff(adv.matrix()) == 0.0);
        }
        assert!(gamma_x(&adv, &p, 3).is_err());
    }

    #[test]
    fn search_projection_in_delta_basis() {
        // Π_0 ∘ D_x restricted to span{δ, δ_x} for n = 4.
        let n = 4;
        let p = build_search(n).unwrap();
        let p0 = AdversaryMatrix::new(search_matrix(n, 0.0).unwrap(), AdversaryKind::Additive).unwrap();
        let g = gamma_x(&p0, &p, 0).unwrap();
        let delta = vec![0.5; 4];
        let dx: Vec<f64> = (0..4).map(|i| (0.5 - if i == 0 { 2.0 } else { 0.0 }) / 3f64.sqrt()).collect();
        let form = |a: &[f64], b: &[f64]| -> f64 {
            (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| a[i] * g.get(i, j).re * b[j]).sum()
        };
        assert!((form(&delta, &delta) - 5.0 / 8.0).abs() < 1e-12);
        assert!((form(&delta, &dx) - 3f64.sqrt() / 8.0).abs() < 1e-12);
        assert!((form(&dx, &dx) - 3.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn search_additive_validates() {
        let p = build_search(4).unwrap();
        let adv = search_additive(4).unwrap();
        let v = validate(&adv, &p);
        assert!(v.pass, "{:?}", v.messages);
        assert!(adv.matrix().trace().abs() < 1e-12);
        let ev = &adv.spectrum().eigenvalues;
        for (got, want) in ev.iter().zip([-1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_projector_fails_zero_condition_on_index_erasure() {
        let p = build_index_erasure(2, 3).unwrap();
        let d = HermitianMatrix::from_real(6, |_, _| 1.0 / 6.0).unwrap();
        let adv = AdversaryMatrix::new(d, AdversaryKind::Additive).unwrap();
        let v = validate(&adv, &p);
        assert!(!v.pass);
        assert!((v.zero_condition.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!(additive_bound(&adv, &p, 0.0).is_err());
    }

    #[test]
    fn identity_is_valid_multiplicative_without_progress() {
        let p = build_search(4).unwrap();
        let adv = AdversaryMatrix::new(HermitianMatrix::identity(4), AdversaryKind::Multiplicative).unwrap();
        assert!(validate(&adv, &p).pass);
        assert!(matches!(multiplicative_bound(&adv, &p, 0.1, 2.0), Err(Error::NoProgress(_))));
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(AdversaryMatrix::new(HermitianMatrix::diagonal(&[1.0, 2.0]), AdversaryKind::Additive).is_err());
        assert!(AdversaryMatrix::new(search_matrix(3, 0.5).unwrap(), AdversaryKind::Multiplicative).is_err());
        assert!(AdversaryMatrix::new(search_matrix(3, -1.5).unwrap(), AdversaryKind::Additive).is_err());
    }

    #[test]
    fn eta_examples() {
        for n in [3, 4, 7] {
            let p = build_search(n).unwrap();
            let bad = HermitianMatrix::from_real(n, |_, _| 1.0 / n as f64).unwrap();
            assert!((eta(&p, &bad).unwrap() - 1.0 / n as f64).abs() < 1e-12);
            assert_eq!(eta(&p, &HermitianMatrix::zeros(n)).unwrap(), 0.0);
        }
    }

    #[test]
    fn additive_examples() {
        let p = build_search(4).unwrap();
        let adv = search_additive(4).unwrap();
        let r = additive_bound(&adv, &p, 0.0).unwrap();
        assert!((r.denominator - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((r.bound - 3f64.sqrt()).abs() < 1e-12);
        let r = additive_bound(&adv, &p, 0.04).unwrap();
        assert!((r.numerator - 0.56808).abs() < 1e-5);
        let r = additive_bound(&adv, &p, 0.25).unwrap();
        assert!(r.flags.iter().any(|f| f == FLAG_VACUOUS));
        assert!(r.bound < 0.0);
    }

    #[test]
    fn hybrid_examples() {
        let p = build_search(4).unwrap();
        let adv = search_additive(4).unwrap();
        let r = hybrid_bound(&adv, &p, 0.5, -1.0 / 3.0).unwrap();
        assert!((r.eta - 0.25).abs() < 1e-12);
        assert!((r.numerator - 0.057191).abs() < 1e-6);
        assert!((r.bound - 0.09906).abs() < 1e-5);
        let r = hybrid_bound(&adv, &p, 0.75, -1.0 / 3.0).unwrap();
        assert!(r.numerator.abs() < 1e-15 && r.bound.abs() < 1e-15);
        assert!(matches!(hybrid_bound(&adv, &p, 0.8, -1.0 / 3.0), Err(Error::Hypothesis(_))));
        assert!(hybrid_bound(&adv, &p, 0.1, 1.0).is_err());
    }

    #[test]
    fn index_erasure_hybrid_eta() {
        let s = index_erasure_setup(2, 3, 1).unwrap();
        let r = hybrid_bound(&s.adversary, &s.problem, 0.1, 0.0).unwrap();
        assert!((r.eta - 2.0 / 3.0).abs() < 1e-10);
        let want = (0.9f64.sqrt() - (2.0f64 / 3.0).sqrt()).powi(2);
        assert!((r.numerator - want).abs() < 1e-10);
        assert!(r.bound > 0.0);
        let bad = index_erasure_bad_projector(&s.decomposition).unwrap();
        assert!((eta(&s.problem, &bad).unwrap() - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn ratio_norms_match_direct_powers() {
        let p = build_search(4).unwrap();
        let adv = search_additive(4).unwrap().gamma_family(0.7).unwrap();
        let norms = ratio_norms(&adv, &p).unwrap();
        let g_half = matrix::psd_power(adv.matrix(), 0.5).unwrap();
        let g_mhalf = matrix::psd_power(adv.matrix(), -0.5).unwrap();
        for r in &norms {
            let gx = gamma_x(&adv, &p, r.x - 1).unwrap();
            let a = matrix::psd_power(&gx, 0.5).unwrap().as_ref() * g_mhalf.as_ref();
            let b = g_half.as_ref() * matrix::psd_power(&gx, -0.5).unwrap().as_ref();
            let na = matrix::norm(a.as_ref(), matrix::NormKind::Spectral).unwrap();
            let nb = matrix::norm(b.as_ref(), matrix::NormKind::Spectral).unwrap();
            assert!((na * na - r.computing).abs() < 1e-10);
            assert!((nb * nb - r.uncomputing).abs() < 1e-10);
        }
    }

    #[test]
    fn gamma_family_inverse_square_roots() {
        let g = search_additive(4).unwrap().gamma_family(0.1).unwrap();
        let a = matrix::psd_power(g.matrix(), 0.5).unwrap();
        let b = matrix::psd_power(g.matrix(), -0.5).unwrap();
        let prod = a.as_ref() * b.as_ref();
        assert!((prod - crate::matrix::Matrix::identity(4, 4)).norm_max() < 1e-9);
    }

    #[test]
    fn closed_form_examples() {
        assert!((search_closed_forms(4, 0.0).unwrap().adv_pm - 3f64.sqrt()).abs() < 1e-15);
        assert!((search_closed_forms(4, 0.5).unwrap().hybrid - 0.0742932).abs() < 1e-6);
        assert!(search_closed_forms(4, 0.2).unwrap().adv_pm.abs() < 1e-12);
        assert!(search_closed_forms(4, 0.75).is_err());
    }

    #[test]
    fn madv_small_gamma_approaches_hybrid() {
        let p = build_search(8).unwrap();
        let adv = search_additive(8).unwrap();
        let lt = -1.0 / 7.0;
        let hyb = hybrid_bound(&adv, &p, 0.5, lt).unwrap().bound;
        let scan = madv_gamma_scan(&adv, &p, 0.5, lt, &[1.0, 0.1, 0.01, 1e-3, 1e-4]);
        let last = scan[4].bound.unwrap();
        assert!((last - hyb).abs() / hyb < 0.01, "{last} vs {hyb}");
        assert!((scan[3].bound.unwrap() - hyb).abs() / hyb < 0.02);
    }
}

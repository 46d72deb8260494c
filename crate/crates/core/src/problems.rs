//! Finite oracle problems: the function family, its target states, and the
//! per-query matrices derived from it.
//!
//! Functions are stored with 0-based input and output letters. Problem files
//! use 1-based letters and are converted on load.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::matrix::{self, c64, HermitianMatrix};
use crate::{too_large, Error, Result};

/// Largest family that is materialized as dense matrices.
pub const MAX_FAMILY: usize = 20_000;

const GRAM_PSD_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    ClassicalFunction,
    CoherentGeneration,
    NonCoherentGeneration,
}

impl ProblemKind {
    pub fn is_generation(self) -> bool {
        !matches!(self, ProblemKind::ClassicalFunction)
    }
}

#[derive(Clone, Debug)]
pub enum Target {
    /// Classical answer `z(f)`; equal labels mean equal answers.
    Labels(Vec<i64>),
    /// `gram[f][g] = ⟨ψ_f|ψ_g⟩`.
    Gram(HermitianMatrix),
}

#[derive(Clone, Debug)]
pub struct OracleProblem {
    name: String,
    input_size: usize,
    output_size: usize,
    functions: Vec<Vec<usize>>,
    kind: ProblemKind,
    target: Target,
    target_states: Option<Vec<Vec<c64>>>,
    rho_target: HermitianMatrix,
}

impl OracleProblem {
    pub fn new(
        name: impl Into<String>,
        input_size: usize,
        output_size: usize,
        functions: Vec<Vec<usize>>,
        kind: ProblemKind,
        target: Target,
    ) -> Result<Self> {
        if input_size == 0 || output_size == 0 {
            return Err(Error::InvalidProblem("alphabets must be nonempty".into()));
        }
        if functions.is_empty() {
            return Err(Error::InvalidProblem("empty function family".into()));
        }
        if functions.len() > MAX_FAMILY {
            return Err(too_large("function family", functions.len(), MAX_FAMILY));
        }
        for (i, f) in functions.iter().enumerate() {
            if f.len() != input_size {
                return Err(Error::InvalidProblem(format!(
                    "function {i} has {} values, expected {input_size}",
                    f.len()
                )));
            }
            if let Some(v) = f.iter().find(|&&v| v >= output_size) {
                return Err(Error::InvalidProblem(format!(
                    "function {i} takes value {v} outside the output alphabet"
                )));
            }
        }
        let mut sorted: Vec<&Vec<usize>> = functions.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidProblem("functions are not pairwise distinct".into()));
        }
        let n = functions.len();
        let gram = match &target {
            Target::Labels(z) => {
                if z.len() != n {
                    return Err(Error::InvalidProblem(format!(
                        "{} labels for {n} functions",
                        z.len()
                    )));
                }
                if kind != ProblemKind::ClassicalFunction {
                    return Err(Error::InvalidProblem(
                        "labels describe classical problems only".into(),
                    ));
                }
                HermitianMatrix::from_real(n, |f, g| (z[f] == z[g]) as u8 as f64)?
            }
            Target::Gram(g) => {
                if g.dim() != n {
                    return Err(Error::InvalidProblem(format!(
                        "Gram matrix of dimension {} for {n} functions",
                        g.dim()
                    )));
                }
                for f in 0..n {
                    if (g.get(f, f) - c64::new(1.0, 0.0)).norm() > 1e-9 {
                        return Err(Error::InvalidProblem(format!(
                            "Gram diagonal entry {f} is not 1"
                        )));
                    }
                }
                let ev = matrix::eigenvalues(g)?;
                if ev[0] < -GRAM_PSD_TOL {
                    return Err(Error::InvalidProblem(format!(
                        "Gram matrix is not PSD (eigenvalue {:.3e})",
                        ev[0]
                    )));
                }
                g.clone()
            }
        };
        if kind == ProblemKind::ClassicalFunction {
            if let Target::Gram(g) = &target {
                let delta_like = (0..n).all(|f| {
                    (0..n).all(|h| {
                        let v = g.get(f, h);
                        v.im.abs() < 1e-12 && (v.re.abs() < 1e-12 || (v.re - 1.0).abs() < 1e-12)
                    })
                });
                if !delta_like {
                    return Err(Error::InvalidProblem(
                        "classical targets need a 0/1 Gram matrix".into(),
                    ));
                }
            }
        }
        let inv = 1.0 / n as f64;
        let rho_target = HermitianMatrix::from_fn(n, |i, j| gram.get(j, i) * inv)?;
        Ok(Self {
            name: name.into(),
            input_size,
            output_size,
            functions,
            kind,
            target,
            target_states: None,
            rho_target,
        })
    }

    /// Attaches explicit target vectors; their Gram matrix must match the target.
    pub fn with_target_states(mut self, states: Vec<Vec<c64>>) -> Result<Self> {
        if states.len() != self.family_size() {
            return Err(Error::InvalidProblem("one target state per function".into()));
        }
        let n = states.len();
        for f in 0..n {
            for g in 0..n {
                let ip: c64 = states[f]
                    .iter()
                    .zip(&states[g])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                if (ip - self.gram_entry(f, g)).norm() > 1e-9 {
                    return Err(Error::InvalidProblem(format!(
                        "target states {f},{g} disagree with the Gram matrix"
                    )));
                }
            }
        }
        self.target_states = Some(states);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn family_size(&self) -> usize {
        self.functions.len()
    }

    pub fn functions(&self) -> &[Vec<usize>] {
        &self.functions
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    pub fn target_states(&self) -> Option<&[Vec<c64>]> {
        self.target_states.as_deref()
    }

    pub fn labels(&self) -> Option<&[i64]> {
        match &self.target {
            Target::Labels(z) => Some(z),
            Target::Gram(_) => None,
        }
    }

    /// `⟨ψ_f|ψ_g⟩`.
    pub fn gram_entry(&self, f: usize, g: usize) -> c64 {
        match &self.target {
            Target::Labels(z) => c64::new((z[f] == z[g]) as u8 as f64, 0.0),
            Target::Gram(m) => m.get(f, g),
        }
    }

    /// Index of a function in the family.
    pub fn index_of(&self, f: &[usize]) -> Option<usize> {
        self.functions.iter().position(|g| g.as_slice() == f)
    }

    fn check_x(&self, x: usize) -> Result<()> {
        if x >= self.input_size {
            return Err(Error::InvalidParameter(format!(
                "input letter {x} outside [0, {})",
                self.input_size
            )));
        }
        Ok(())
    }

    /// `f(x)` for every function, in family order.
    pub fn values_at(&self, x: usize) -> Result<Vec<usize>> {
        self.check_x(x)?;
        Ok(self.functions.iter().map(|f| f[x]).collect())
    }

    /// `D_x`: entry `(f', f)` is 1 iff `f(x) = f'(x)`.
    pub fn d_matrix(&self, x: usize) -> Result<HermitianMatrix> {
        let v = self.values_at(x)?;
        HermitianMatrix::from_real(v.len(), |i, j| (v[i] == v[j]) as u8 as f64)
    }

    /// `A ∘ D_x` without forming `D_x`.
    pub fn restrict_query(&self, a: &HermitianMatrix, x: usize) -> Result<HermitianMatrix> {
        let v = self.values_at(x)?;
        if a.dim() != v.len() {
            return Err(Error::Dimension(format!(
                "matrix of dimension {} on a family of size {}",
                a.dim(),
                v.len()
            )));
        }
        HermitianMatrix::from_fn(v.len(), |i, j| {
            if v[i] == v[j] {
                a.get(i, j)
            } else {
                c64::new(0.0, 0.0)
            }
        })
    }

    /// `Π_y^x`, the diagonal projector onto functions with `f(x) = y`.
    pub fn y_projector(&self, x: usize, y: usize) -> Result<HermitianMatrix> {
        let v = self.values_at(x)?;
        if y >= self.output_size {
            return Err(Error::InvalidParameter(format!(
                "output letter {y} outside [0, {})",
                self.output_size
            )));
        }
        let diag: Vec<f64> = v.iter().map(|&w| (w == y) as u8 as f64).collect();
        Ok(HermitianMatrix::diagonal(&diag))
    }

    /// `ρ⊙`, with entry `(f', f) = ⟨ψ_f|ψ_f'⟩ / |F|`.
    pub fn target_gram(&self) -> &HermitianMatrix {
        &self.rho_target
    }

    /// `|δ⟩`, the uniform unit vector.
    pub fn delta_state(&self) -> Vec<f64> {
        let n = self.family_size();
        vec![1.0 / (n as f64).sqrt(); n]
    }

    /// Same problem with the family reordered by `perm` (new index `i` holds old `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.family_size();
        if perm.len() != n {
            return Err(Error::InvalidParameter("permutation length".into()));
        }
        let functions = perm.iter().map(|&p| self.functions[p].clone()).collect();
        let target = match &self.target {
            Target::Labels(z) => Target::Labels(perm.iter().map(|&p| z[p]).collect()),
            Target::Gram(g) => {
                Target::Gram(HermitianMatrix::from_fn(n, |i, j| g.get(perm[i], perm[j]))?)
            }
        };
        let mut out = Self::new(
            self.name.clone(),
            self.input_size,
            self.output_size,
            functions,
            self.kind,
            target,
        )?;
        if let Some(s) = &self.target_states {
            out = out.with_target_states(perm.iter().map(|&p| s[p].clone()).collect())?;
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProblemFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_problem()
    }
}

/// On-disk problem description; letters are 1-based.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemFile {
    pub n: usize,
    pub m: usize,
    pub kind: String,
    pub functions: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<serde_json::Value>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

pub(crate) fn parse_complex(v: &serde_json::Value) -> Result<c64> {
    match v {
        serde_json::Value::Number(x) => Ok(c64::new(x.as_f64().unwrap_or(f64::NAN), 0.0)),
        serde_json::Value::Array(a) if a.len() == 2 => {
            let re = a[0].as_f64();
            let im = a[1].as_f64();
            match (re, im) {
                (Some(re), Some(im)) => Ok(c64::new(re, im)),
                _ => Err(Error::Parse(format!("bad complex entry {v}"))),
            }
        }
        _ => Err(Error::Parse(format!("bad matrix entry {v}"))),
    }
}

impl ProblemFile {
    pub fn into_problem(self) -> Result<OracleProblem> {
        let kind = match self.kind.as_str() {
            "classical" | "classical-function" => ProblemKind::ClassicalFunction,
            "coherent" | "coherent-generation" => ProblemKind::CoherentGeneration,
            "non-coherent" | "non-coherent-generation" => ProblemKind::NonCoherentGeneration,
            other => return Err(Error::Parse(format!("unknown problem kind {other:?}"))),
        };
        let mut functions = Vec::with_capacity(self.functions.len());
        for f in &self.functions {
            let mut g = Vec::with_capacity(f.len());
            for &v in f {
                if v == 0 || v > self.m {
                    return Err(Error::InvalidProblem(format!(
                        "function value {v} outside 1..={}",
                        self.m
                    )));
                }
                g.push(v - 1);
            }
            functions.push(g);
        }
        let count = functions.len();
        let target = match (self.labels, self.gram) {
            (Some(z), None) => Target::Labels(z),
            (None, Some(rows)) => {
                if rows.len() != count || rows.iter().any(|r| r.len() != count) {
                    return Err(Error::InvalidProblem("Gram matrix shape".into()));
                }
                let mut m = matrix::Matrix::zeros(count, count);
                for (i, r) in rows.iter().enumerate() {
                    for (j, v) in r.iter().enumerate() {
                        m[(i, j)] = parse_complex(v)?;
                    }
                }
                Target::Gram(HermitianMatrix::new(m)?)
            }
            (None, None) if kind == ProblemKind::ClassicalFunction => {
                return Err(Error::InvalidProblem("classical problems need labels".into()))
            }
            _ => {
                return Err(Error::InvalidProblem(
                    "give exactly one of labels and gram".into(),
                ))
            }
        };
        // Canonical order: lexicographic on the value tuple.
        let mut order: Vec<usize> = (0..count).collect();
        order.sort_by(|&a, &b| functions[a].cmp(&functions[b]));
        let problem = OracleProblem::new(
            self.name.unwrap_or_else(|| "custom".into()),
            self.n,
            self.m,
            functions,
            kind,
            target,
        )?;
        problem.permuted(&order)
    }
}

/// Search: `f_x` marks `x`. Functions are indexed by the marked element.
pub fn build_search(n: usize) -> Result<OracleProblem> {
    if n < 2 {
        return Err(Error::InvalidProblem("search needs n ≥ 2".into()));
    }
    let functions = (0..n)
        .map(|x| (0..n).map(|i| (i == x) as usize).collect())
        .collect();
    OracleProblem::new(
        format!("search-{n}"),
        n,
        2,
        functions,
        ProblemKind::ClassicalFunction,
        Target::Labels((0..n as i64).collect()),
    )
}

/// All injections `[n] → [m]` in lexicographic order.
pub fn injections(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, m: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in 0..m {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(n, m, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, m, &mut Vec::with_capacity(n), &mut vec![false; m], &mut out);
    out
}

/// Number of injections `[n] → [m]`.
pub fn falling_factorial(m: usize, n: usize) -> u128 {
    (0..n).map(|i| (m - i) as u128).product()
}

/// Index Erasure: coherently prepare the uniform superposition over `Im f`.
pub fn build_index_erasure(n: usize, m: usize) -> Result<OracleProblem> {
    if n == 0 || m < n {
        return Err(Error::InvalidProblem(format!("index erasure needs 1 ≤ N ≤ M, got ({n}, {m})")));
    }
    let size = falling_factorial(m, n);
    if size > MAX_FAMILY as u128 {
        return Err(too_large("function family", size as usize, MAX_FAMILY));
    }
    let functions = injections(n, m);
    let count = functions.len();
    let images: Vec<Vec<bool>> = functions
        .iter()
        .map(|f| {
            let mut im = vec![false; m];
            f.iter().for_each(|&v| im[v] = true);
            im
        })
        .collect();
    let inv_n = 1.0 / n as f64;
    let gram = HermitianMatrix::from_real(count, |a, b| {
        images[a].iter().zip(&images[b]).filter(|(p, q)| **p && **q).count() as f64 * inv_n
    })?;
    let amp = c64::new(inv_n.sqrt(), 0.0);
    let states = images
        .iter()
        .map(|im| im.iter().map(|&b| if b { amp } else { c64::new(0.0, 0.0) }).collect())
        .collect();
    OracleProblem::new(
        format!("index-erasure-{n}-{m}"),
        n,
        m,
        functions,
        ProblemKind::CoherentGeneration,
        Target::Gram(gram),
    )?
    .with_target_states(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::HermitianMatrix;

    #[test]
    fn search_small_cases() {
        let p = build_search(2).unwrap();
        assert_eq!(p.functions(), &[vec![1, 0], vec![0, 1]]);
        let p = build_search(4).unwrap();
        assert_eq!(p.family_size(), 4);
        assert!(p.functions().iter().all(|f| f.iter().sum::<usize>() == 1));
        let want = HermitianMatrix::diagonal(&[0.25; 4]);
        assert!(p.target_gram().max_abs_diff(&want) < 1e-15);
        assert!(build_search(1).is_err());
    }

    #[test]
    fn search_two_first_query_matrix_is_identity() {
        let p = build_search(2).unwrap();
        let d = p.d_matrix(0).unwrap();
        assert!(d.max_abs_diff(&HermitianMatrix::identity(2)) == 0.0);
        assert!(p.d_matrix(2).is_err());
    }

    #[test]
    fn index_erasure_sizes_and_gram() {
        let p = build_index_erasure(1, 1).unwrap();
        assert_eq!(p.family_size(), 1);
        assert_eq!(p.gram_entry(0, 0).re, 1.0);
        let p = build_index_erasure(2, 3).unwrap();
        assert_eq!(p.family_size(), 6);
        assert_eq!(p.functions()[0], vec![0, 1]);
        assert_eq!(p.functions()[5], vec![2, 1]);
        assert!(build_index_erasure(3, 2).is_err());
    }

    #[test]
    fn index_erasure_rho_weight_on_delta() {
        let p = build_index_erasure(2, 3).unwrap();
        let delta = p.delta_state();
        let rho = p.target_gram();
        let w: f64 = (0..6)
            .flat_map(|i| (0..6).map(move |j| (i, j)))
            .map(|(i, j)| delta[i] * rho.get(i, j).re * delta[j])
            .sum();
        assert!((w - 2.0 / 3.0).abs() < 1e-12);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn query_matrix_row_sums() {
        let p = build_index_erasure(2, 3).unwrap();
        for x in 0..2 {
            let d = p.d_matrix(x).unwrap();
            let v = p.values_at(x).unwrap();
            for f in 0..6 {
                assert_eq!(d.get(f, f).re, 1.0);
                let row: f64 = (0..6).map(|g| d.get(f, g).re).sum();
                let want = v.iter().filter(|&&w| w == v[f]).count() as f64;
                assert_eq!(row, want);
            }
        }
    }

    #[test]
    fn y_projector_ranks() {
        let p = build_search(4).unwrap();
        assert_eq!(p.y_projector(1, 1).unwrap().trace(), 1.0);
        let p = build_index_erasure(2, 3).unwrap();
        assert_eq!(p.y_projector(0, 2).unwrap().trace(), 2.0);
        assert!(p.y_projector(0, 3).is_err());
    }

    #[test]
    fn delta_state_entries() {
        assert_eq!(build_index_erasure(1, 1).unwrap().delta_state(), vec![1.0]);
        assert!(build_search(4).unwrap().delta_state().iter().all(|&v| v == 0.5));
        let s = 1.0 / 6f64.sqrt();
        assert!(build_index_erasure(2, 3).unwrap().delta_state().iter().all(|v| (v - s).abs() < 1e-15));
    }

    #[test]
    fn problem_file_round_trip() {
        let text = r#"{"n": 2, "m": 2, "kind": "classical",
                       "functions": [[2, 1], [1, 2]], "labels": [7, 3]}"#;
        let p = OracleProblem::from_json(text).unwrap();
        assert_eq!(p.functions(), &[vec![0, 1], vec![1, 0]]);
        assert_eq!(p.labels().unwrap(), &[3, 7]);
        let bad = r#"{"n": 1, "m": 2, "kind": "coherent",
                      "functions": [[1], [2]], "gram": [[1, 2], [2, 1]]}"#;
        assert!(matches!(OracleProblem::from_json(bad), Err(Error::InvalidProblem(_))));
        let dup = r#"{"n": 1, "m": 2, "kind": "classical", "functions": [[1], [1]], "labels": [1, 2]}"#;
        assert!(OracleProblem::from_json(dup).is_err());
    }
}

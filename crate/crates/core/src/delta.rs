//! Reduction of the per-query norms to small Δ-blocks, one per irrep of `G_x`.
//!
//! With `Γ̃ = Σ_k γ_k Π_k` over a multiplicity-free decomposition, `Γ̃_x − Γ̃`
//! commutes with `G_x` and acts on the isotypic component of each `G_x`-irrep
//! `l` as `Δ̃_x^l ⊗ I_{d_l}`. Block entries are
//! `(1/d_l) Σ_{k,y} γ_k tr[Π_y Π_k Π_y T_{b←a}] − γ_{k_a} δ_{ab}`,
//! where `T_{b←a}` is the transporter from copy `a` to copy `b`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::matrix::{self, c64, HermitianMatrix, Matrix};
use crate::problems::OracleProblem;
use crate::rng;
use crate::symmetry::{
    self, transporter_with, Block, GroupAction, IsotypicDecomposition, Label, Restriction,
};
use crate::{Error, Result};

pub const BLOCK_NORM_TOL: f64 = 1e-7;
const WEIGHT_TOL: f64 = 1e-9;
const IRREP_MATCH_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Additive,
    Multiplicative,
}

/// One copy of a `G_x`-irrep, identified by its parent `G`-irrep `k` and index `m` within it.
#[derive(Clone, Debug)]
pub struct Copy {
    pub k: usize,
    pub m: usize,
    pub l: usize,
    /// Orthonormal basis, aligned so that `T_{a←b} = U_a U_b†`.
    pub basis: Matrix,
}

/// A `G`-decomposition split under `G_x`, with gauge-consistent transporters.
#[derive(Clone, Debug)]
pub struct RestrictedDecomposition {
    pub x: usize,
    pub copies: Vec<Copy>,
    /// `d_l` per irrep.
    pub dims: Vec<usize>,
    pub labels: Vec<Option<Label>>,
    pub restriction: Restriction,
}

impl RestrictedDecomposition {
    pub fn irrep_count(&self) -> usize {
        self.dims.len()
    }

    pub fn copies_of(&self, l: usize) -> impl Iterator<Item = (usize, &Copy)> {
        self.copies.iter().enumerate().filter(move |(_, c)| c.l == l)
    }

    pub fn multiplicity(&self, l: usize) -> usize {
        self.copies_of(l).count()
    }

    /// `T_{a←b}` between two copies of the same irrep.
    pub fn transporter(&self, a: usize, b: usize) -> Result<Matrix> {
        let (ca, cb) = (&self.copies[a], &self.copies[b]);
        if ca.l != cb.l {
            return Err(Error::InvalidParameter("copies carry different irreps".into()));
        }
        Ok(ca.basis.as_ref() * cb.basis.adjoint())
    }

    /// `Σ` of all copy projectors.
    pub fn projector_sum(&self) -> Matrix {
        let n = self.copies.first().map_or(0, |c| c.basis.nrows());
        let mut acc = Matrix::zeros(n, n);
        for c in &self.copies {
            acc += c.basis.as_ref() * c.basis.adjoint();
        }
        acc
    }
}

/// Splits the multiplicity-free decomposition under the stabilizer of `x`.
///
/// Each irrep's first copy is the reference `r`; the other copies are rotated
/// by `T_{a←r}` so that transporters compose.
pub fn restrict(
    decomp: &IsotypicDecomposition,
    group: &GroupAction,
    x: usize,
    seed: u64,
) -> Result<RestrictedDecomposition> {
    if !decomp.multiplicity_free {
        return Err(Error::Decomposition("the G decomposition is not multiplicity-free".into()));
    }
    let sub = group.stabilizer(x, None)?;
    let restriction = symmetry::restrict(decomp, &sub, seed)?;
    let count = restriction.irrep_count();
    let mut dims = vec![0; count];
    let mut labels = vec![None; count];
    let mut reference: Vec<Option<usize>> = vec![None; count];
    let mut per_parent: HashMap<(usize, usize), usize> = HashMap::new();
    let mut rng = rng::derived(seed, &format!("transport/{x}"));
    let mut copies = Vec::with_capacity(restriction.copies.len());
    for (i, c) in restriction.copies.iter().enumerate() {
        let l = c.irrep;
        let m = per_parent.entry((c.parent, l)).or_insert(0);
        let basis = match reference[l] {
            None => {
                reference[l] = Some(i);
                dims[l] = c.dim;
                labels[l] = c.label.clone();
                c.basis.clone()
            }
            Some(r) => {
                let src = &restriction.copies[r].basis;
                let t = transporter_with(&restriction.orbits, src, &c.basis, &mut rng)?
                    .ok_or_else(|| Error::Decomposition("isomorphic copies without a transporter".into()))?;
                t.as_ref() * src.as_ref()
            }
        };
        copies.push(Copy {
            k: c.parent,
            m: *m,
            l,
            basis,
        });
        *m += 1;
    }
    Ok(RestrictedDecomposition {
        x,
        copies,
        dims,
        labels,
        restriction,
    })
}

#[derive(Clone, Debug)]
pub struct DeltaBlock {
    pub l: usize,
    pub label: Option<Label>,
    pub d: usize,
    /// `(k, m)` for each row and column.
    pub copies: Vec<(usize, usize)>,
    pub entries: Matrix,
}

impl DeltaBlock {
    pub fn hermitian(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::new(self.entries.clone())
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        matrix::eigenvalues(&self.hermitian()?)
    }

    pub fn norm(&self) -> Result<f64> {
        let ev = self.eigenvalues()?;
        Ok(ev[0].abs().max(ev[ev.len() - 1].abs()))
    }
}

/// `Σ_k γ_k Π_k` over the blocks of a decomposition.
pub fn weighted_sum(decomp: &IsotypicDecomposition, weights: &[f64]) -> Result<HermitianMatrix> {
    if weights.len() != decomp.blocks.len() {
        return Err(Error::Dimension(format!(
            "{} weights for {} blocks",
            weights.len(),
            decomp.blocks.len()
        )));
    }
    let n = decomp.blocks.first().map_or(0, |b| b.basis.nrows());
    let mut acc = Matrix::zeros(n, n);
    for (b, &w) in decomp.blocks.iter().zip(weights) {
        if w != 0.0 {
            acc += faer::Scale(c64::new(w, 0.0)) * (b.basis.as_ref() * b.basis.adjoint());
        }
    }
    HermitianMatrix::new(acc)
}

fn check_weights(weights: &[f64], variant: Variant) -> Result<()> {
    for (k, &w) in weights.iter().enumerate() {
        let bad = match variant {
            Variant::Additive => !w.is_finite() || w.abs() > 1.0 + WEIGHT_TOL,
            Variant::Multiplicative => !w.is_finite() || w < 1.0 - WEIGHT_TOL,
        };
        if bad {
            return Err(Error::InvalidParameter(format!("weight γ_{k} = {w} not allowed for {variant:?}")));
        }
    }
    Ok(())
}

/// Input classes `{f : f(x) = y}` for every `y`.
fn y_classes(p: &OracleProblem, x: usize) -> Result<Vec<Vec<usize>>> {
    let values = p.values_at(x)?;
    let mut classes = vec![Vec::new(); p.output_size()];
    for (f, &y) in values.iter().enumerate() {
        classes[y].push(f);
    }
    Ok(classes)
}

/// The Δ-blocks of all `G_x`-irreps.
pub fn delta_blocks(
    weights: &[f64],
    decomp: &IsotypicDecomposition,
    restricted: &RestrictedDecomposition,
    p: &OracleProblem,
    variant: Variant,
) -> Result<Vec<DeltaBlock>> {
    check_weights(weights, variant)?;
    if weights.len() != decomp.blocks.len() {
        return Err(Error::Dimension("one weight per block is required".into()));
    }
    let classes = y_classes(p, restricted.x)?;
    // Σ_{k,y} γ_k Π_y Π_k Π_y, accumulated one y at a time.
    let n = p.family_size();
    let mut masked = Matrix::zeros(n, n);
    for class in classes.iter().filter(|c| !c.is_empty()) {
        for (b, &w) in decomp.blocks.iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            add_masked_projector(&mut masked, b, w, class);
        }
    }
    let blocks = crate::par_map(restricted.irrep_count(), |l| {
        let members: Vec<&Copy> = restricted.copies_of(l).map(|(_, c)| c).collect();
        let d = restricted.dims[l];
        let ml = members.len();
        let scale = 1.0 / d as f64;
        let entries = Matrix::from_fn(ml, ml, |a, b| {
            // tr[M T_{b←a}] = tr[U_a† M U_b]
            let ua = &members[a].basis;
            let ub = &members[b].basis;
            let inner = ua.adjoint() * masked.as_ref() * ub.as_ref();
            let tr: c64 = (0..d).map(|i| inner[(i, i)]).sum();
            let (ka, kb) = (members[a].k, members[b].k);
            match variant {
                Variant::Additive => {
                    let sub = if a == b { weights[ka] } else { 0.0 };
                    tr * scale - c64::new(sub, 0.0)
                }
                Variant::Multiplicative => tr * (scale / (weights[ka] * weights[kb]).sqrt()),
            }
        });
        DeltaBlock {
            l,
            label: restricted.labels[l].clone(),
            d,
            copies: members.iter().map(|c| (c.k, c.m)).collect(),
            entries,
        }
    });
    Ok(blocks)
}

fn add_masked_projector(acc: &mut Matrix, block: &Block, w: f64, class: &[usize]) {
    let rows = Matrix::from_fn(class.len(), block.dim, |i, j| block.basis[(class[i], j)]);
    let p = rows.as_ref() * rows.adjoint();
    for (i, &f) in class.iter().enumerate() {
        for (j, &g) in class.iter().enumerate() {
            acc[(f, g)] += p[(i, j)] * w;
        }
    }
}

/// `Σ_l Σ_{a,b} (Δ^l)_{ab} T_{a←b}`.
pub fn reconstruct(blocks: &[DeltaBlock], restricted: &RestrictedDecomposition) -> Matrix {
    let n = restricted.copies.first().map_or(0, |c| c.basis.nrows());
    let mut acc = Matrix::zeros(n, n);
    for blk in blocks {
        let members: Vec<&Copy> = restricted.copies_of(blk.l).map(|(_, c)| c).collect();
        for (a, ca) in members.iter().enumerate() {
            for (b, cb) in members.iter().enumerate() {
                let e = blk.entries[(a, b)];
                if e.norm() > 0.0 {
                    acc += faer::Scale(e) * (ca.basis.as_ref() * cb.basis.adjoint());
                }
            }
        }
    }
    acc
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockNorm {
    pub l: usize,
    pub label: Option<String>,
    pub multiplicity: usize,
    pub d: usize,
    pub norm: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockNormReport {
    /// Input letter, 1-based.
    pub x: usize,
    pub variant: Variant,
    pub blocks: Vec<BlockNorm>,
    /// `max_l ‖Δ̃^l‖`, or `max_l λ_max(Δ^l)` for the multiplicative variant.
    pub block_max: f64,
    /// `‖Γ̃_x − Γ̃‖`, or `‖Γ_x^{1/2}Γ^{−1/2}‖²`.
    pub direct: f64,
    pub gap: f64,
    /// Multiplicative only: `max_l ‖(Δ^l)^{−1}‖` against `‖Γ^{1/2}Γ_x^{−1/2}‖²`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse: Option<(f64, f64)>,
    pub pass: bool,
}

pub fn label_string(label: &Option<Label>) -> Option<String> {
    label.as_ref().map(|l| {
        let parts: Vec<String> = l.iter().map(|p| p.to_string()).collect();
        format!("[{}]", parts.join(", "))
    })
}

/// Compares the block maximum with the dense norm of the same weights.
pub fn verify_block_norms(
    blocks: &[DeltaBlock],
    weights: &[f64],
    decomp: &IsotypicDecomposition,
    p: &OracleProblem,
    x: usize,
    variant: Variant,
) -> Result<BlockNormReport> {
    let gamma = weighted_sum(decomp, weights)?;
    let gx = p.restrict_query(&gamma, x)?;
    let mut norms = Vec::with_capacity(blocks.len());
    for b in blocks {
        let ev = b.eigenvalues()?;
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        norms.push(BlockNorm {
            l: b.l,
            label: label_string(&b.label),
            multiplicity: b.copies.len(),
            d: b.d,
            norm: lo.abs().max(hi.abs()),
            min_eigenvalue: lo,
            max_eigenvalue: hi,
        });
    }
    let (block_max, direct, inverse) = match variant {
        Variant::Additive => {
            let diff = gx.combine(1.0, &gamma, -1.0)?;
            let direct = matrix::spectral_norm(&diff)?;
            (norms.iter().map(|b| b.norm).fold(0.0, f64::max), direct, None)
        }
        Variant::Multiplicative => {
            let g_mhalf = matrix::psd_power(&gamma, -0.5)?;
            let g_half = matrix::psd_power(&gamma, 0.5)?;
            let gx_half = matrix::psd_power(&gx, 0.5)?;
            let gx_mhalf = matrix::psd_power(&gx, -0.5)?;
            let fwd = gx_half.as_ref() * g_mhalf.as_ref();
            let bwd = g_half.as_ref() * gx_mhalf.as_ref();
            let f = matrix::norm(fwd.as_ref(), matrix::NormKind::Spectral)?.powi(2);
            let b = matrix::norm(bwd.as_ref(), matrix::NormKind::Spectral)?.powi(2);
            let bmax = norms.iter().map(|b| b.max_eigenvalue).fold(0.0, f64::max);
            let binv = norms
                .iter()
                .map(|b| 1.0 / b.min_eigenvalue)
                .fold(0.0, f64::max);
            (bmax, f, Some((binv, b)))
        }
    };
    let gap = (block_max - direct).abs();
    let inv_gap = inverse.map_or(0.0, |(a, b)| (a - b).abs() / b.max(1.0));
    Ok(BlockNormReport {
        x: x + 1,
        variant,
        blocks: norms,
        block_max,
        direct,
        gap,
        inverse,
        pass: gap <= BLOCK_NORM_TOL && inv_gap <= BLOCK_NORM_TOL,
    })
}

/// Restriction, Δ-blocks and norm verification at every input letter.
pub fn verify_all(
    weights: &[f64],
    decomp: &IsotypicDecomposition,
    group: &GroupAction,
    variant: Variant,
    seed: u64,
) -> Result<Vec<BlockNormReport>> {
    let p = group.problem();
    (0..p.input_size())
        .map(|x| {
            let r = restrict(decomp, group, x, seed)?;
            let blocks = delta_blocks(weights, decomp, &r, p, variant)?;
            verify_block_norms(&blocks, weights, decomp, p, x, variant)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceProjReport {
    pub tuples: usize,
    pub isomorphic_tuples: usize,
    /// Worst violation of `tr[Π_λΠ_μΠ_λT] = (1/d) tr[Π_λΠ_μ] tr[Π_λT]`.
    pub product_gap: f64,
    /// Worst violation of `|tr[Π_λT_{ν₁←ν₂}]| = √(tr[Π_λΠ_ν₁] tr[Π_λΠ_ν₂])`.
    pub modulus_gap: f64,
    /// Largest `|tr[Π_λΠ_μΠ_λT]|` over non-isomorphic tuples.
    pub non_isomorphic_max: f64,
    pub pass: bool,
}

/// A block that lives in a `G_xy`-isotypic component.
struct Piece {
    basis: Matrix,
    class: usize,
}

/// Checks the trace identities for `G_xy` on two families of copies: the
/// restriction of the `G`-decomposition and the restriction of the
/// `G_x`-decomposition.
pub fn trace_proj_check(
    decomp: &IsotypicDecomposition,
    group: &GroupAction,
    x: usize,
    y: usize,
    seed: u64,
    tol: f64,
) -> Result<TraceProjReport> {
    let gx = group.stabilizer(x, None)?;
    let gxy = group.stabilizer(x, Some(y))?;
    let from_g = symmetry::restrict(decomp, &gxy, seed)?;
    let at_x = symmetry::restrict(decomp, &gx, seed)?;
    let x_decomp = IsotypicDecomposition {
        blocks: at_x
            .copies
            .iter()
            .map(|c| Block {
                basis: c.basis.clone(),
                dim: c.dim,
                fingerprint: c.fingerprint.clone(),
                label: c.label.clone(),
                component: c.irrep,
            })
            .collect(),
        class_reps: at_x.class_reps.clone(),
        multiplicity_free: false,
        orbit_count: at_x.orbits.count(),
    };
    let from_x = symmetry::restrict(&x_decomp, &gxy, seed)?;
    // Both restrictions share G_xy's class representatives, so fingerprints identify irreps.
    let mut classes: Vec<(usize, Vec<c64>)> = Vec::new();
    let mut pieces = Vec::new();
    for c in from_g.copies.iter().chain(&from_x.copies) {
        let class = match classes.iter().position(|(d, fp)| {
            *d == c.dim && fp.iter().zip(&c.fingerprint).all(|(a, b)| (a - b).norm() < IRREP_MATCH_TOL)
        }) {
            Some(i) => i,
            None => {
                classes.push((c.dim, c.fingerprint.clone()));
                classes.len() - 1
            }
        };
        pieces.push(Piece {
            basis: c.basis.clone(),
            class,
        });
    }
    let split = from_g.copies.len();
    let projectors: Vec<Matrix> = pieces.iter().map(|p| p.basis.as_ref() * p.basis.adjoint()).collect();
    let mut rng = rng::derived(seed, "trace-proj");
    let n = projectors.first().map_or(0, |p| p.nrows());
    let mut transporters: Vec<Vec<Matrix>> = Vec::with_capacity(pieces.len());
    for a in &pieces {
        let mut row = Vec::with_capacity(pieces.len());
        for b in &pieces {
            let t = transporter_with(&from_g.orbits, &b.basis, &a.basis, &mut rng)?;
            row.push(t.unwrap_or_else(|| Matrix::zeros(n, n)));
        }
        transporters.push(row);
    }
    let tr = |a: &Matrix, b: &Matrix| -> c64 {
        let mut s = c64::new(0.0, 0.0);
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                s += a[(i, j)] * b[(j, i)];
            }
        }
        s
    };
    let mut tuples = 0;
    let mut iso = 0;
    let (mut product_gap, mut modulus_gap, mut non_iso): (f64, f64, f64) = (0.0, 0.0, 0.0);
    // λ from the G family, μ from the G_x family (two projectors of the same
    // family are orthogonal or equal); ν₁, ν₂ from either.
    for lam in 0..split {
        for mu in split..pieces.len() {
            let plm = projectors[lam].as_ref() * projectors[mu].as_ref() * projectors[lam].as_ref();
            let t_lm = tr(&projectors[lam], &projectors[mu]);
            for n1 in 0..pieces.len() {
                for n2 in 0..pieces.len() {
                    tuples += 1;
                    let t = &transporters[n1][n2];
                    let lhs = tr(&plm, t);
                    let c = pieces[lam].class;
                    if pieces[mu].class != c || pieces[n1].class != c || pieces[n2].class != c {
                        non_iso = non_iso.max(lhs.norm());
                        continue;
                    }
                    iso += 1;
                    let d = pieces[lam].basis.ncols() as f64;
                    let t_lt = tr(&projectors[lam], t);
                    product_gap = product_gap.max((lhs - t_lm * t_lt / d).norm());
                    let rhs = (tr(&projectors[lam], &projectors[n1]).re * tr(&projectors[lam], &projectors[n2]).re)
                        .max(0.0)
                        .sqrt();
                    modulus_gap = modulus_gap.max((t_lt.norm() - rhs).abs());
                }
            }
        }
    }
    Ok(TraceProjReport {
        tuples,
        isomorphic_tuples: iso,
        product_gap,
        modulus_gap,
        non_isomorphic_max: non_iso,
        pass: product_gap <= tol && modulus_gap <= tol && non_iso <= tol,
    })
}

/// Weights `1 + γ(1 − γ̃_k)` of `Γ(γ) = I + γ(I − Γ̃)`.
pub fn gamma_family_weights(additive: &[f64], gamma: f64) -> Vec<f64> {
    additive.iter().map(|w| 1.0 + gamma * (1.0 - w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::build_search;
    use std::sync::Arc;

    fn search(n: usize) -> (GroupAction, IsotypicDecomposition) {
        let g = GroupAction::search_symmetric(Arc::new(build_search(n).unwrap())).unwrap();
        let d = symmetry::isotypic_decomposition(&g, 3).unwrap();
        (g, d)
    }

    #[test]
    fn search_restriction_copies() {
        let (g, d) = search(4);
        let r = restrict(&d, &g, 0, 3).unwrap();
        assert_eq!(r.irrep_count(), 2);
        assert_eq!(r.multiplicity(0), 2);
        assert_eq!(r.dims, vec![1, 2]);
        let err = (r.projector_sum() - Matrix::identity(4, 4)).norm_max();
        assert!(err < 1e-8);
    }

    #[test]
    fn search_blocks() {
        let (g, d) = search(4);
        let r = restrict(&d, &g, 0, 3).unwrap();
        let w = [1.0, -1.0 / 3.0];
        let blocks = delta_blocks(&w, &d, &r, g.problem(), Variant::Additive).unwrap();
        assert!((blocks[0].norm().unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-10);
        assert!(blocks[1].norm().unwrap() < 1e-12);
        let m = delta_blocks(&w, &d, &r, g.problem(), Variant::Additive).unwrap();
        let rec = reconstruct(&m, &r);
        let direct = g.problem().restrict_query(&weighted_sum(&d, &w).unwrap(), 0).unwrap();
        let diff = direct.combine(1.0, &weighted_sum(&d, &w).unwrap(), -1.0).unwrap();
        assert!((rec - diff.matrix()).norm_l2() < 1e-9);
        let mw = gamma_family_weights(&w, 1.0);
        let mb = delta_blocks(&mw, &d, &r, g.problem(), Variant::Multiplicative).unwrap();
        assert!((mb[1].entries[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_weights_give_zero_blocks() {
        let (g, d) = search(5);
        let r = restrict(&d, &g, 2, 3).unwrap();
        let blocks = delta_blocks(&[0.4, 0.4], &d, &r, g.problem(), Variant::Additive).unwrap();
        assert!(blocks.iter().all(|b| b.norm().unwrap() < 1e-12));
    }

    #[test]
    fn multiplicative_rejects_small_weights() {
        let (g, d) = search(4);
        let r = restrict(&d, &g, 0, 3).unwrap();
        assert!(delta_blocks(&[1.0, 0.5], &d, &r, g.problem(), Variant::Multiplicative).is_err());
    }

    #[test]
    fn identity_both_sides_one() {
        let (g, d) = search(4);
        let reps = verify_all(&[1.0, 1.0], &d, &g, Variant::Multiplicative, 3).unwrap();
        for r in reps {
            assert!((r.block_max - 1.0).abs() < 1e-12 && (r.direct - 1.0).abs() < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn search_trace_identities() {
        let (g, d) = search(4);
        let r = trace_proj_check(&d, &g, 0, 1, 3, 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.isomorphic_tuples > 0 && r.tuples > r.isomorphic_tuples);
    }
}

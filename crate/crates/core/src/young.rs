//! Young diagram combinatorics for symmetric groups.
//!
//! Shapes are usually given below the first row: for `S_N` the partition `λ`
//! stands for the full diagram `(N − |λ|, λ_1, λ_2, …)`. Dimensions are exact
//! `u128`, which covers every symmetric group up to `S_34`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest `N` for which `N!` fits in a `u128`.
pub const MAX_EXACT_N: usize = 34;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self(parts)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn part(&self, i: usize) -> usize {
        self.0.get(i).copied().unwrap_or(0)
    }

    /// The full `n`-box diagram whose part below the first row is `self`.
    pub fn complete(&self, n: usize) -> Result<Partition> {
        let size = self.size();
        if size > n || n - size < self.part(0) {
            return Err(Error::InvalidParameter(format!(
                "{self} is not below the first row of an {n}-box diagram"
            )));
        }
        let mut parts = vec![n - size];
        parts.extend_from_slice(&self.0);
        Ok(Partition::new(parts))
    }

    /// Drops the first row.
    pub fn below_first_row(&self) -> Partition {
        Partition(self.0.iter().skip(1).copied().collect())
    }

    /// Cell-wise containment of diagrams.
    pub fn contains(&self, other: &Partition) -> bool {
        other.len() <= self.len() && other.0.iter().zip(&self.0).all(|(a, b)| a <= b)
    }

    /// Number of cycles of each length, `m[i]` for cycles of length `i + 1`.
    fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.part(0)];
        for &p in &self.0 {
            m[p - 1] += 1;
        }
        m
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// All partitions of `n`, in decreasing lexicographic order.
pub fn partitions(n: usize) -> Vec<Partition> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// `n! / ∏ hooks` for a full diagram.
pub fn full_dimension(lambda: &Partition) -> Result<u128> {
    let n = lambda.size();
    if n > MAX_EXACT_N {
        return Err(Error::InvalidParameter(format!("n = {n} exceeds exact range")));
    }
    let mut hooks: u128 = 1;
    for (i, &row) in lambda.parts().iter().enumerate() {
        for j in 0..row {
            let arm = row - j - 1;
            let leg = lambda.parts()[i + 1..].iter().filter(|&&r| r > j).count();
            hooks *= (arm + leg + 1) as u128;
        }
    }
    Ok(factorial(n) / hooks)
}

/// Dimension of the `S_N` irrep with `lambda` below the first row.
pub fn hook_dimension(lambda: &Partition, n: usize) -> Result<u128> {
    full_dimension(&lambda.complete(n)?)
}

/// Shapes with at most `max_boxes` boxes below the first row of a valid `n`-box diagram.
pub fn enumerate_below_row(max_boxes: usize, n: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    for k in 0..=max_boxes.min(n) {
        let mut ps = partitions(k);
        ps.reverse();
        out.extend(ps.into_iter().filter(|p| n - k >= p.part(0)));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub shape: Partition,
    /// The box went into (or came out of) the first row.
    pub first_row: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Add,
    Remove,
}

/// One-box neighbours in the below-first-row picture.
///
/// Adding lists the first-row case first, flagged, with `λ` unchanged; its
/// validity depends on the group size and is left to the caller. Removing
/// lists only boxes below the first row.
pub fn branch(lambda: &Partition, direction: Direction) -> Vec<Branch> {
    let p = lambda.parts();
    let mut below = Vec::new();
    match direction {
        Direction::Add => {
            for i in 0..=p.len() {
                if i == 0 || p[i - 1] > lambda.part(i) {
                    let mut q = p.to_vec();
                    if i == p.len() {
                        q.push(1);
                    } else {
                        q[i] += 1;
                    }
                    below.push(Partition(q));
                }
            }
        }
        Direction::Remove => {
            for i in 0..p.len() {
                if p[i] > lambda.part(i + 1) {
                    let mut q = p.to_vec();
                    q[i] -= 1;
                    below.push(Partition::new(q));
                }
            }
        }
    }
    below.sort_by(|a, b| b.cmp(a));
    let mut out = Vec::new();
    if direction == Direction::Add {
        out.push(Branch {
            shape: lambda.clone(),
            first_row: true,
        });
    }
    out.extend(below.into_iter().map(|shape| Branch {
        shape,
        first_row: false,
    }));
    out
}

/// Irreps of `S_{n−1}` in the restriction of the `S_n` irrep `lambda`, all below the first row.
pub fn restrict_one(lambda: &Partition, n: usize) -> Result<Vec<Partition>> {
    lambda.complete(n)?;
    let mut out = Vec::new();
    if n >= 1 && lambda.complete(n - 1).is_ok() {
        out.push(lambda.clone());
    }
    out.extend(branch(lambda, Direction::Remove).into_iter().map(|b| b.shape));
    Ok(out)
}

/// `n! / z_μ`, the size of the conjugacy class of cycle type `mu`.
pub fn class_size(mu: &Partition) -> u128 {
    let mut z: u128 = 1;
    for (i, &m) in mu.multiplicities().iter().enumerate() {
        z *= ((i + 1) as u128).pow(m as u32) * factorial(m);
    }
    factorial(mu.size()) / z
}

/// `χ^λ(μ)` by the Murnaghan–Nakayama rule on beta-numbers.
pub fn mn_character(lambda: &Partition, cycle_type: &Partition) -> Result<i64> {
    if lambda.size() != cycle_type.size() {
        return Err(Error::InvalidParameter(format!(
            "|{lambda}| ≠ |{cycle_type}|"
        )));
    }
    let l = lambda.len();
    let beta: Vec<usize> = (0..l).map(|i| lambda.parts()[i] + (l - 1 - i)).collect();
    let mut memo = HashMap::new();
    Ok(mn_rec(beta, cycle_type.parts(), &mut memo))
}

fn mn_rec(beta: Vec<usize>, mu: &[usize], memo: &mut HashMap<(Vec<usize>, usize), i64>) -> i64 {
    let Some((&r, rest)) = mu.split_first() else {
        return 1;
    };
    let key = (beta.clone(), mu.len());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut total = 0;
    for (idx, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let between = beta.iter().filter(|&&c| c > b - r && c < b).count();
        let mut next = beta.clone();
        next[idx] = b - r;
        next.sort_unstable_by(|a, b| b.cmp(a));
        let sign = if between % 2 == 0 { 1 } else { -1 };
        total += sign * mn_rec(next, rest, memo);
    }
    memo.insert(key, total);
    total
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrrepCensusEntry {
    pub lambda_n: Partition,
    pub lambda_m: Partition,
    pub is_bad: bool,
    pub dim: u128,
}

/// Whether `outer / inner` is a horizontal strip (full diagrams).
pub fn is_horizontal_strip(outer: &Partition, inner: &Partition) -> bool {
    (0..outer.len().max(inner.len())).all(|i| {
        outer.part(i) >= inner.part(i) && inner.part(i) >= outer.part(i + 1)
    })
}

/// Irreps of `S_N × S_M` in the space of injections `[N] → [M]`.
///
/// A pair occurs, exactly once, when the full `M`-diagram is obtained from
/// the full `N`-diagram by adding a horizontal strip.
pub fn index_erasure_census(n: usize, m: usize) -> Result<Vec<IrrepCensusEntry>> {
    if m < n || n == 0 {
        return Err(Error::InvalidParameter(format!("census needs 1 ≤ N ≤ M, got ({n}, {m})")));
    }
    if m > MAX_EXACT_N {
        return Err(Error::InvalidParameter(format!("M = {m} exceeds exact range")));
    }
    let mut out = Vec::new();
    for ln in enumerate_below_row(n, n) {
        let full_n = ln.complete(n)?;
        for lm in enumerate_below_row(m, m) {
            let full_m = lm.complete(m)?;
            if !is_horizontal_strip(&full_m, &full_n) {
                continue;
            }
            let dim = full_dimension(&full_n)? * full_dimension(&full_m)?;
            out.push(IrrepCensusEntry {
                is_bad: ln == lm,
                lambda_n: ln.clone(),
                lambda_m: lm,
                dim,
            });
        }
    }
    out.sort_by(|a, b| {
        (a.lambda_n.size(), &a.lambda_n, a.lambda_m.size(), &a.lambda_m).cmp(&(
            b.lambda_n.size(),
            &b.lambda_n,
            b.lambda_m.size(),
            &b.lambda_m,
        ))
    });
    Ok(out)
}

/// `γ_k = 1 − k/√N` while `k < √N`, else 0, for `k = 0..=N`.
pub fn ie_weights(n: usize) -> Vec<f64> {
    let root = (n as f64).sqrt();
    (0..=n)
        .map(|k| if k * k >= n { 0.0 } else { 1.0 - k as f64 / root })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec())
    }

    /// Standard Young tableaux counted by removing corners recursively.
    fn syt_count(lambda: &[usize]) -> u128 {
        if lambda.iter().sum::<usize>() == 0 {
            return 1;
        }
        let mut total = 0;
        for i in 0..lambda.len() {
            let next = lambda.get(i + 1).copied().unwrap_or(0);
            if lambda[i] > next {
                let mut q = lambda.to_vec();
                q[i] -= 1;
                total += syt_count(&q);
            }
        }
        total
    }

    #[test]
    fn hook_examples() {
        for n in 0..6 {
            assert_eq!(hook_dimension(&Partition::empty(), n).unwrap(), 1);
        }
        assert_eq!(hook_dimension(&p(&[1]), 3).unwrap(), 2);
        assert!(hook_dimension(&p(&[2]), 3).is_err());
        let sum: u128 = partitions(6).iter().map(|l| full_dimension(l).unwrap().pow(2)).sum();
        assert_eq!(sum, 720);
    }

    #[test]
    fn hooks_match_tableau_counts() {
        for n in 1..=9 {
            for l in partitions(n) {
                assert_eq!(full_dimension(&l).unwrap(), syt_count(l.parts()), "{l}");
            }
        }
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_below_row(0, 5), vec![Partition::empty()]);
        assert_eq!(
            enumerate_below_row(2, 10),
            vec![Partition::empty(), p(&[1]), p(&[1, 1]), p(&[2])]
        );
        assert_eq!(enumerate_below_row(1, 2), vec![Partition::empty(), p(&[1])]);
    }

    #[test]
    fn branch_examples() {
        let shapes = |l: &Partition, d| -> Vec<(Partition, bool)> {
            branch(l, d).into_iter().map(|b| (b.shape, b.first_row)).collect()
        };
        assert_eq!(
            shapes(&Partition::empty(), Direction::Add),
            vec![(Partition::empty(), true), (p(&[1]), false)]
        );
        assert_eq!(
            shapes(&p(&[1]), Direction::Add),
            vec![(p(&[1]), true), (p(&[2]), false), (p(&[1, 1]), false)]
        );
        assert_eq!(
            shapes(&p(&[2, 1]), Direction::Remove),
            vec![(p(&[2]), false), (p(&[1, 1]), false)]
        );
        assert!(branch(&Partition::empty(), Direction::Remove).is_empty());
    }

    #[test]
    fn branching_rule_dimensions() {
        for n in 2..=12 {
            for l in enumerate_below_row(3, n) {
                let d = hook_dimension(&l, n).unwrap();
                let parts: u128 = restrict_one(&l, n)
                    .unwrap()
                    .iter()
                    .map(|m| hook_dimension(m, n - 1).unwrap())
                    .sum();
                assert_eq!(d, parts, "λ = {l}, N = {n}");
            }
        }
    }

    #[test]
    fn character_examples() {
        assert_eq!(mn_character(&p(&[1, 1]), &p(&[2])).unwrap(), -1);
        assert_eq!(mn_character(&p(&[2, 1]), &p(&[3])).unwrap(), -1);
        assert_eq!(mn_character(&p(&[2, 1]), &p(&[2, 1])).unwrap(), 0);
        assert!(mn_character(&p(&[2]), &p(&[1])).is_err());
        for n in 1..=8 {
            let id = Partition::new(vec![1; n]);
            for l in partitions(n) {
                assert_eq!(mn_character(&l, &id).unwrap() as u128, full_dimension(&l).unwrap());
            }
        }
    }

    #[test]
    fn character_orthogonality() {
        for n in 1..=6 {
            let ps = partitions(n);
            for a in &ps {
                for b in &ps {
                    let s: i128 = ps
                        .iter()
                        .map(|mu| {
                            class_size(mu) as i128
                                * mn_character(a, mu).unwrap() as i128
                                * mn_character(b, mu).unwrap() as i128
                        })
                        .sum();
                    assert_eq!(s, if a == b { factorial(n) as i128 } else { 0 });
                }
            }
        }
    }

    #[test]
    fn class_sizes_sum_to_order() {
        for n in 1..=8 {
            let s: u128 = partitions(n).iter().map(class_size).sum();
            assert_eq!(s, factorial(n));
        }
    }

    #[test]
    fn census_examples() {
        let c = index_erasure_census(1, 1).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c[0].is_bad && c[0].dim == 1);

        let c = index_erasure_census(2, 3).unwrap();
        let dims: Vec<u128> = c.iter().map(|e| e.dim).collect();
        assert_eq!(dims, vec![1, 2, 2, 1]);
        let bad: Vec<_> = c.iter().filter(|e| e.is_bad).map(|e| e.lambda_n.clone()).collect();
        assert_eq!(bad, vec![Partition::empty(), p(&[1])]);

        let c = index_erasure_census(10, 15).unwrap();
        let e = c
            .iter()
            .find(|e| e.lambda_n.is_empty() && e.lambda_m == p(&[1]))
            .unwrap();
        assert_eq!(e.dim, 14);
        assert!(index_erasure_census(3, 2).is_err());
    }

    #[test]
    fn census_dims_sum_to_injection_count() {
        for m in 1..=9 {
            for n in 1..=m {
                let total: u128 = index_erasure_census(n, m).unwrap().iter().map(|e| e.dim).sum();
                assert_eq!(total, crate::problems::falling_factorial(m, n), "({n}, {m})");
            }
        }
    }

    #[test]
    fn census_entries_are_contained() {
        for e in index_erasure_census(4, 7).unwrap() {
            let a = e.lambda_n.complete(4).unwrap();
            let b = e.lambda_m.complete(7).unwrap();
            assert!(b.contains(&a));
            assert!(e.lambda_m.contains(&e.lambda_n));
        }
    }

    #[test]
    fn weight_examples() {
        let w = ie_weights(4);
        assert_eq!(&w[..3], &[1.0, 0.5, 0.0]);
        assert!(w[3..].iter().all(|&g| g == 0.0));
        for n in 1..20 {
            assert_eq!(ie_weights(n)[0], 1.0);
            assert!(ie_weights(n).iter().all(|&g| (0.0..=1.0).contains(&g)));
        }
        assert!((ie_weights(2)[1] - 0.292_893_218_813_452_5).abs() < 1e-15);
    }
}

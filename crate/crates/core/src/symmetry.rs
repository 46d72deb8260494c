//! Permutation symmetries of a function family.
//!
//! A group element `(π, τ)` sends `f` to `τ ∘ f ∘ π`. Groups are given by
//! generators; orbits on `F × F` come from union-find over the generator
//! action, so the commutant basis never needs the full element list. When the
//! group is a product of full symmetric groups on disjoint domains (a
//! [`YoungStructure`]) conjugacy classes and irrep labels are available
//! without enumeration.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::matrix::{self, c64, HermitianMatrix, Matrix};
use crate::problems::OracleProblem;
use crate::rng::{self, Rng};
use crate::young::{self, Partition};
use crate::{too_large, Error, Result};

/// Largest group that is ever enumerated element by element.
pub const MAX_ENUMERATED: usize = 50_000;
/// Commutation and projector tolerance.
pub const BLOCK_TOL: f64 = 1e-8;
/// Below this the averaged intertwiner counts as zero.
pub const TRANSPORTER_ZERO: f64 = 1e-8;

const FINGERPRINT_TOL: f64 = 1e-6;
const AMBIGUOUS_GAP: f64 = 1e-6;
const RETRIES: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub pi: Vec<usize>,
    pub tau: Vec<usize>,
}

impl GroupElement {
    pub fn identity(n: usize, m: usize) -> Self {
        Self {
            pi: (0..n).collect(),
            tau: (0..m).collect(),
        }
    }

    /// Apply `self`, then `other`.
    pub fn then(&self, other: &Self) -> Self {
        Self {
            pi: other.pi.iter().map(|&x| self.pi[x]).collect(),
            tau: self.tau.iter().map(|&v| other.tau[v]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut pi = vec![0; self.pi.len()];
        for (i, &p) in self.pi.iter().enumerate() {
            pi[p] = i;
        }
        let mut tau = vec![0; self.tau.len()];
        for (i, &t) in self.tau.iter().enumerate() {
            tau[t] = i;
        }
        Self { pi, tau }
    }

    pub fn is_identity(&self) -> bool {
        self.pi.iter().enumerate().all(|(i, &p)| i == p)
            && self.tau.iter().enumerate().all(|(i, &t)| i == t)
    }

    fn is_valid(&self, n: usize, m: usize) -> bool {
        fn bijective(p: &[usize], k: usize) -> bool {
            let mut seen = vec![false; k];
            p.len() == k && p.iter().all(|&v| v < k && !std::mem::replace(&mut seen[v], true))
        }
        bijective(&self.pi, n) && bijective(&self.tau, m)
    }

    /// `τ ∘ f ∘ π`.
    pub fn apply(&self, f: &[usize]) -> Vec<usize> {
        self.pi.iter().map(|&x| self.tau[f[x]]).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Input,
    Output,
}

/// The full symmetric group on `domain`, acting on inputs or outputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymFactor {
    pub side: Side,
    pub domain: Vec<usize>,
}

/// A product of symmetric groups on disjoint domains.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct YoungStructure {
    pub factors: Vec<SymFactor>,
}

/// One Young label per factor, each below the first row of the factor's diagram.
pub type Label = Vec<Partition>;

impl YoungStructure {
    fn generators(&self, n: usize, m: usize) -> Vec<GroupElement> {
        let mut out = Vec::new();
        for fac in &self.factors {
            let d = &fac.domain;
            if d.len() < 2 {
                continue;
            }
            let mut swap: Vec<usize> = (0..d.len()).collect();
            swap.swap(0, 1);
            out.push(self.embed(fac, &swap, n, m));
            if d.len() > 2 {
                let cycle: Vec<usize> = (0..d.len()).map(|i| (i + 1) % d.len()).collect();
                out.push(self.embed(fac, &cycle, n, m));
            }
        }
        out
    }

    /// Element acting by `local` (a permutation of positions in the domain) on one factor.
    fn embed(&self, fac: &SymFactor, local: &[usize], n: usize, m: usize) -> GroupElement {
        let mut g = GroupElement::identity(n, m);
        let target = match fac.side {
            Side::Input => &mut g.pi,
            Side::Output => &mut g.tau,
        };
        for (i, &j) in local.iter().enumerate() {
            target[fac.domain[i]] = fac.domain[j];
        }
        g
    }

    pub fn order(&self) -> u128 {
        self.factors.iter().map(|f| young::factorial(f.domain.len())).product()
    }

    /// One element per conjugacy class, labelled by the cycle type on each factor.
    fn class_representatives(&self, n: usize, m: usize) -> Vec<ClassRep> {
        let mut reps = vec![(GroupElement::identity(n, m), Vec::new(), 1u128)];
        for fac in &self.factors {
            let k = fac.domain.len();
            let mut next = Vec::new();
            for (g, types, size) in &reps {
                for mu in young::partitions(k) {
                    let mut local = vec![0; k];
                    let mut start = 0;
                    for &len in mu.parts() {
                        for i in 0..len {
                            local[start + i] = start + (i + 1) % len;
                        }
                        start += len;
                    }
                    let h = self.embed(fac, &local, n, m);
                    let mut t = types.clone();
                    t.push(mu.clone());
                    next.push((g.then(&h), t, size * young::class_size(&mu)));
                }
            }
            reps = next;
        }
        reps.into_iter()
            .map(|(element, types, size)| ClassRep {
                element,
                size: Some(size),
                cycle_types: Some(types),
            })
            .collect()
    }

    /// All label tuples with their characters on `reps`.
    fn character_table(&self, reps: &[ClassRep]) -> Result<Vec<(Label, Vec<i64>)>> {
        let mut labels: Vec<Vec<Partition>> = vec![Vec::new()];
        for fac in &self.factors {
            let k = fac.domain.len();
            let mut next = Vec::new();
            for l in &labels {
                for p in young::partitions(k) {
                    let mut t = l.clone();
                    t.push(p);
                    next.push(t);
                }
            }
            labels = next;
        }
        let mut out = Vec::with_capacity(labels.len());
        for full in labels {
            let mut chars = Vec::with_capacity(reps.len());
            for r in reps {
                let types = r.cycle_types.as_ref().expect("young class reps carry cycle types");
                let mut chi = 1i64;
                for (lam, mu) in full.iter().zip(types) {
                    chi *= young::mn_character(lam, mu)?;
                }
                chars.push(chi);
            }
            let below = full.iter().map(Partition::below_first_row).collect();
            out.push((below, chars));
        }
        Ok(out)
    }

    fn without_point(&self, side: Side, p: usize) -> Self {
        Self {
            factors: self
                .factors
                .iter()
                .map(|f| SymFactor {
                    side: f.side,
                    domain: if f.side == side {
                        f.domain.iter().copied().filter(|&d| d != p).collect()
                    } else {
                        f.domain.clone()
                    },
                })
                .collect(),
        }
    }

    /// Sort key: `(|λ|, λ)` per factor.
    pub fn label_key(label: &Label) -> Vec<(usize, Partition)> {
        label.iter().map(|p| (p.size(), p.clone())).collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassRep {
    pub element: GroupElement,
    pub size: Option<u128>,
    pub cycle_types: Option<Vec<Partition>>,
}

/// Failure witness for [`GroupAction::verify_automorphism`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    /// Generator `generator` maps function `function` outside the family.
    NotClosed { generator: usize, function: usize },
    /// Generator `generator` changes `⟨ψ_f|ψ_g⟩`.
    GramChanged {
        generator: usize,
        f: usize,
        g: usize,
    },
    /// Generator is not a pair of bijections.
    NotPermutation { generator: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutomorphismCheck {
    pub pass: bool,
    pub witness: Option<Witness>,
}

/// A permutation group acting on the family of a problem.
#[derive(Clone, Debug)]
pub struct GroupAction {
    problem: Arc<OracleProblem>,
    generators: Vec<GroupElement>,
    structure: Option<YoungStructure>,
    index: Arc<HashMap<Vec<usize>, usize>>,
}

impl GroupAction {
    pub fn new(problem: Arc<OracleProblem>, generators: Vec<GroupElement>) -> Result<Self> {
        let (n, m) = (problem.input_size(), problem.output_size());
        for (i, g) in generators.iter().enumerate() {
            if !g.is_valid(n, m) {
                return Err(Error::InvalidGroup(format!("generator {i} is not a pair of permutations of [{n}] and [{m}]")));
            }
        }
        let index = problem
            .functions()
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i))
            .collect();
        Ok(Self {
            problem,
            generators,
            structure: None,
            index: Arc::new(index),
        })
    }

    pub fn from_structure(problem: Arc<OracleProblem>, structure: YoungStructure) -> Result<Self> {
        let (n, m) = (problem.input_size(), problem.output_size());
        let mut seen = HashSet::new();
        for f in &structure.factors {
            let bound = if f.side == Side::Input { n } else { m };
            for &d in &f.domain {
                if d >= bound || !seen.insert((f.side, d)) {
                    return Err(Error::InvalidGroup("factor domains must be disjoint and in range".into()));
                }
            }
        }
        let gens = structure.generators(n, m);
        let mut g = Self::new(problem, gens)?;
        g.structure = Some(structure);
        Ok(g)
    }

    /// `S_n` permuting the inputs of Search.
    pub fn search_symmetric(problem: Arc<OracleProblem>) -> Result<Self> {
        let n = problem.input_size();
        Self::from_structure(
            problem,
            YoungStructure {
                factors: vec![SymFactor {
                    side: Side::Input,
                    domain: (0..n).collect(),
                }],
            },
        )
    }

    /// `S_N × S_M` on Index Erasure.
    pub fn index_erasure(problem: Arc<OracleProblem>) -> Result<Self> {
        let (n, m) = (problem.input_size(), problem.output_size());
        Self::from_structure(
            problem,
            YoungStructure {
                factors: vec![
                    SymFactor {
                        side: Side::Input,
                        domain: (0..n).collect(),
                    },
                    SymFactor {
                        side: Side::Output,
                        domain: (0..m).collect(),
                    },
                ],
            },
        )
    }

    pub fn trivial(problem: Arc<OracleProblem>) -> Result<Self> {
        Self::new(problem, Vec::new())
    }

    /// Groups from a file with 1-based images, `{"pi_generators": [...], "tau_generators": [...]}`.
    /// Each listed permutation becomes a generator acting on one side only.
    pub fn from_json(problem: Arc<OracleProblem>, text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct GroupFile {
            #[serde(default)]
            pi_generators: Vec<Vec<usize>>,
            #[serde(default)]
            tau_generators: Vec<Vec<usize>>,
        }
        let file: GroupFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let (n, m) = (problem.input_size(), problem.output_size());
        let zero_based = |p: &[usize]| -> Result<Vec<usize>> {
            p.iter()
                .map(|&v| v.checked_sub(1).ok_or_else(|| Error::Parse("permutation images are 1-based".into())))
                .collect()
        };
        let mut gens = Vec::new();
        for p in &file.pi_generators {
            gens.push(GroupElement {
                pi: zero_based(p)?,
                tau: (0..m).collect(),
            });
        }
        for t in &file.tau_generators {
            gens.push(GroupElement {
                pi: (0..n).collect(),
                tau: zero_based(t)?,
            });
        }
        Self::new(problem, gens)
    }

    pub fn problem(&self) -> &OracleProblem {
        &self.problem
    }

    pub fn problem_arc(&self) -> Arc<OracleProblem> {
        self.problem.clone()
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn structure(&self) -> Option<&YoungStructure> {
        self.structure.as_ref()
    }

    fn size_f(&self) -> usize {
        self.problem.family_size()
    }

    /// Index of `τ ∘ f ∘ π`.
    pub fn act(&self, g: &GroupElement, f: usize) -> Result<usize> {
        let image = g.apply(&self.problem.functions()[f]);
        self.index.get(&image).copied().ok_or_else(|| {
            Error::InvalidGroup(format!("function {f} is mapped outside the family"))
        })
    }

    /// The permutation of family indices induced by `g`.
    pub fn permutation(&self, g: &GroupElement) -> Result<Vec<u32>> {
        (0..self.size_f()).map(|f| self.act(g, f).map(|i| i as u32)).collect()
    }

    fn generator_permutations(&self) -> Result<Vec<Vec<u32>>> {
        self.generators.iter().map(|g| self.permutation(g)).collect()
    }

    /// The 0-1 matrix `U_g` with `U_g |f⟩ = |g·f⟩`.
    pub fn representation_matrix(&self, g: &GroupElement) -> Result<Matrix> {
        let p = self.permutation(g)?;
        let n = p.len();
        let mut u = Matrix::zeros(n, n);
        for (f, &img) in p.iter().enumerate() {
            u[(img as usize, f)] = c64::new(1.0, 0.0);
        }
        Ok(u)
    }

    /// Closure of the family and invariance of the target Gram matrix under every generator.
    pub fn verify_automorphism(&self) -> AutomorphismCheck {
        let n = self.size_f();
        for (gi, g) in self.generators.iter().enumerate() {
            let mut perm = Vec::with_capacity(n);
            for f in 0..n {
                match self.act(g, f) {
                    Ok(i) => perm.push(i),
                    Err(_) => {
                        return AutomorphismCheck {
                            pass: false,
                            witness: Some(Witness::NotClosed {
                                generator: gi,
                                function: f,
                            }),
                        }
                    }
                }
            }
            for f in 0..n {
                for h in 0..n {
                    let before = self.problem.gram_entry(f, h);
                    let after = self.problem.gram_entry(perm[f], perm[h]);
                    if (before - after).norm() > 1e-9 {
                        return AutomorphismCheck {
                            pass: false,
                            witness: Some(Witness::GramChanged {
                                generator: gi,
                                f,
                                g: h,
                            }),
                        };
                    }
                }
            }
        }
        AutomorphismCheck {
            pass: true,
            witness: None,
        }
    }

    /// Orbits of the group on `F × F`.
    pub fn orbit_basis(&self) -> Result<OrbitBasis> {
        Ok(OrbitBasis::from_generators(self.size_f(), &self.generator_permutations()?))
    }

    /// True iff every orbit matrix is symmetric.
    pub fn is_multiplicity_free(&self) -> Result<bool> {
        Ok(self.orbit_basis()?.all_symmetric())
    }

    /// Every element, if there are at most [`MAX_ENUMERATED`].
    pub fn elements(&self) -> Result<Vec<GroupElement>> {
        let (n, m) = (self.problem.input_size(), self.problem.output_size());
        if let Some(s) = &self.structure {
            let order = s.order();
            if order > MAX_ENUMERATED as u128 {
                return Err(too_large("group", order.min(usize::MAX as u128) as usize, MAX_ENUMERATED));
            }
        }
        closure(GroupElement::identity(n, m), &self.generators, MAX_ENUMERATED)
    }

    /// Group order, when known without enumerating more than [`MAX_ENUMERATED`] elements.
    pub fn order(&self) -> Option<u128> {
        if let Some(s) = &self.structure {
            return Some(s.order());
        }
        self.elements().ok().map(|e| e.len() as u128)
    }

    /// Subgroup fixing input `x`, and output `y` if given.
    pub fn stabilizer(&self, x: usize, y: Option<usize>) -> Result<GroupAction> {
        let (n, m) = (self.problem.input_size(), self.problem.output_size());
        if x >= n || y.is_some_and(|y| y >= m) {
            return Err(Error::InvalidParameter(format!("stabilizer point ({x}, {y:?}) out of range")));
        }
        if let Some(s) = &self.structure {
            let mut t = s.without_point(Side::Input, x);
            if let Some(y) = y {
                t = t.without_point(Side::Output, y);
            }
            return Self::from_structure(self.problem.clone(), t);
        }
        let keep = |g: &GroupElement| g.pi[x] == x && y.is_none_or(|y| g.tau[y] == y);
        let all = self.elements()?;
        let mut gens: Vec<GroupElement> = Vec::new();
        let mut sub: HashSet<GroupElement> = HashSet::from([GroupElement::identity(n, m)]);
        for g in all.iter().filter(|g| keep(g)) {
            if !sub.contains(g) {
                gens.push(g.clone());
                sub = closure(GroupElement::identity(n, m), &gens, MAX_ENUMERATED)?
                    .into_iter()
                    .collect();
            }
        }
        Self::new(self.problem.clone(), gens)
    }

    /// One representative per conjugacy class.
    pub fn class_representatives(&self) -> Result<Vec<ClassRep>> {
        let (n, m) = (self.problem.input_size(), self.problem.output_size());
        if let Some(s) = &self.structure {
            return Ok(s.class_representatives(n, m));
        }
        let elements = self.elements()?;
        let mut assigned: HashSet<GroupElement> = HashSet::new();
        let mut reps = Vec::new();
        for g in &elements {
            if assigned.contains(g) {
                continue;
            }
            let mut class = vec![g.clone()];
            assigned.insert(g.clone());
            let mut queue = VecDeque::from([g.clone()]);
            while let Some(c) = queue.pop_front() {
                for h in &self.generators {
                    let conj = h.inverse().then(&c).then(h);
                    if assigned.insert(conj.clone()) {
                        class.push(conj.clone());
                        queue.push_back(conj);
                    }
                }
            }
            reps.push(ClassRep {
                element: g.clone(),
                size: Some(class.len() as u128),
                cycle_types: None,
            });
        }
        Ok(reps)
    }

    /// Group average of `a`, computed as an average over orbits on `F × F`.
    pub fn symmetrize(&self, a: &HermitianMatrix) -> Result<HermitianMatrix> {
        if a.dim() != self.size_f() {
            return Err(Error::Dimension("matrix does not live on the family".into()));
        }
        let orbits = self.orbit_basis()?;
        HermitianMatrix::new(orbits.average(a.as_ref()))
    }

    /// Group average by explicit summation over all elements.
    pub fn symmetrize_by_elements(&self, a: &HermitianMatrix) -> Result<HermitianMatrix> {
        let elements = self.elements()?;
        let n = self.size_f();
        let mut acc = Matrix::zeros(n, n);
        for g in &elements {
            let p = self.permutation(g)?;
            for j in 0..n {
                for i in 0..n {
                    acc[(p[i] as usize, p[j] as usize)] += a.get(i, j);
                }
            }
        }
        let inv = 1.0 / elements.len() as f64;
        HermitianMatrix::new(Matrix::from_fn(n, n, |i, j| acc[(i, j)] * inv))
    }

    /// `tr(U_g P)` for `P = B B†`.
    pub fn fingerprint_of(&self, basis: &Matrix, reps: &[ClassRep]) -> Result<Vec<c64>> {
        reps.iter()
            .map(|r| {
                let p = self.permutation(&r.element)?;
                let mut t = c64::new(0.0, 0.0);
                for (h, &gh) in p.iter().enumerate() {
                    for k in 0..basis.ncols() {
                        t += basis[(h, k)] * basis[(gh as usize, k)].conj();
                    }
                }
                Ok(t)
            })
            .collect()
    }

    /// Copy from `source` to `dest` of the same irrep, commuting with this group.
    ///
    /// Returns `None` when the irreps differ.
    pub fn transporter(&self, source: &Matrix, dest: &Matrix, rng: &mut Rng) -> Result<Option<Matrix>> {
        let orbits = self.orbit_basis()?;
        transporter_with(&orbits, source, dest, rng)
    }
}

pub(crate) fn transporter_with(
    orbits: &OrbitBasis,
    source: &Matrix,
    dest: &Matrix,
    rng: &mut Rng,
) -> Result<Option<Matrix>> {
    let n = orbits.n;
    if source.nrows() != n || dest.nrows() != n {
        return Err(Error::Dimension("blocks do not live on the family".into()));
    }
    let d = source.ncols();
    let u = random_unit_in(dest, rng);
    let v = random_unit_in(source, rng);
    let mut sums = vec![c64::new(0.0, 0.0); orbits.count];
    for j in 0..n {
        let vj = v[j].conj();
        for i in 0..n {
            sums[orbits.ids[i * n + j] as usize] += u[i] * vj;
        }
    }
    for (s, &size) in sums.iter_mut().zip(&orbits.sizes) {
        *s /= size as f64;
    }
    let t = Matrix::from_fn(n, n, |i, j| sums[orbits.ids[i * n + j] as usize]);
    let norm_sq = t.squared_norm_l2();
    if norm_sq.sqrt() < TRANSPORTER_ZERO {
        return Ok(None);
    }
    if dest.ncols() != d {
        return Err(Error::Dimension(format!(
            "nonzero intertwiner between blocks of dimension {d} and {}",
            dest.ncols()
        )));
    }
    let scale = (d as f64 / norm_sq).sqrt();
    Ok(Some(fix_phase(Matrix::from_fn(n, n, |i, j| t[(i, j)] * scale))))
}

/// Rotates so that the first largest-magnitude entry (column-major) is real positive.
pub(crate) fn fix_phase(t: Matrix) -> Matrix {
    let max = t.norm_max();
    let mut pivot = c64::new(1.0, 0.0);
    'outer: for j in 0..t.ncols() {
        for i in 0..t.nrows() {
            if t[(i, j)].norm() >= max * (1.0 - 1e-9) {
                pivot = t[(i, j)];
                break 'outer;
            }
        }
    }
    let phase = pivot.conj() / pivot.norm();
    Matrix::from_fn(t.nrows(), t.ncols(), |i, j| t[(i, j)] * phase)
}

fn random_unit_in(basis: &Matrix, rng: &mut Rng) -> Vec<c64> {
    let d = basis.ncols();
    let coeffs: Vec<c64> = (0..d)
        .map(|_| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut v: Vec<c64> = (0..basis.nrows())
        .map(|i| (0..d).map(|k| basis[(i, k)] * coeffs[k]).sum())
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

fn closure(identity: GroupElement, gens: &[GroupElement], limit: usize) -> Result<Vec<GroupElement>> {
    let mut seen: HashSet<GroupElement> = HashSet::from([identity.clone()]);
    let mut out = vec![identity.clone()];
    let mut queue = VecDeque::from([identity]);
    while let Some(g) = queue.pop_front() {
        for h in gens {
            let k = g.then(h);
            if seen.insert(k.clone()) {
                if out.len() >= limit {
                    return Err(too_large("group", out.len() + 1, limit));
                }
                out.push(k.clone());
                queue.push_back(k);
            }
        }
    }
    Ok(out)
}

/// Orbits of a permutation group on pairs of family indices.
#[derive(Clone, Debug)]
pub struct OrbitBasis {
    n: usize,
    /// Orbit id of pair `(i, j)` at `i * n + j`, numbered in row-major order of first appearance.
    ids: Vec<u32>,
    sizes: Vec<usize>,
    transpose: Vec<u32>,
    count: usize,
}

impl OrbitBasis {
    pub fn from_generators(n: usize, gens: &[Vec<u32>]) -> Self {
        let total = n * n;
        let mut parent: Vec<u32> = (0..total as u32).collect();
        fn find(parent: &mut [u32], mut a: u32) -> u32 {
            while parent[a as usize] != a {
                let p = parent[a as usize];
                parent[a as usize] = parent[p as usize];
                a = p;
            }
            a
        }
        for p in gens {
            for i in 0..n {
                for j in 0..n {
                    let a = find(&mut parent, (i * n + j) as u32);
                    let b = find(&mut parent, p[i] * n as u32 + p[j]);
                    if a != b {
                        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                        parent[hi as usize] = lo;
                    }
                }
            }
        }
        let mut ids = vec![u32::MAX; total];
        let mut root_id: HashMap<u32, u32> = HashMap::new();
        let mut sizes = Vec::new();
        for (a, slot) in ids.iter_mut().enumerate() {
            let r = find(&mut parent, a as u32);
            let next = root_id.len() as u32;
            let id = *root_id.entry(r).or_insert(next);
            if id as usize == sizes.len() {
                sizes.push(0);
            }
            sizes[id as usize] += 1;
            *slot = id;
        }
        let count = sizes.len();
        let mut transpose = vec![0u32; count];
        for i in 0..n {
            for j in 0..n {
                transpose[ids[i * n + j] as usize] = ids[j * n + i];
            }
        }
        Self {
            n,
            ids,
            sizes,
            transpose,
            count,
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn id(&self, i: usize, j: usize) -> usize {
        self.ids[i * self.n + j] as usize
    }

    pub fn size(&self, orbit: usize) -> usize {
        self.sizes[orbit]
    }

    pub fn is_symmetric(&self, orbit: usize) -> bool {
        self.transpose[orbit] as usize == orbit
    }

    pub fn all_symmetric(&self) -> bool {
        (0..self.count).all(|o| self.is_symmetric(o))
    }

    /// Indicator matrix of one orbit.
    pub fn matrix(&self, orbit: usize) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| {
            c64::new((self.id(i, j) == orbit) as u8 as f64, 0.0)
        })
    }

    pub fn matrices(&self) -> Vec<Matrix> {
        (0..self.count).map(|o| self.matrix(o)).collect()
    }

    /// Replaces every entry by the mean over its orbit.
    pub fn average(&self, a: faer::MatRef<'_, c64>) -> Matrix {
        let n = self.n;
        let mut sums = vec![c64::new(0.0, 0.0); self.count];
        for i in 0..n {
            for j in 0..n {
                sums[self.id(i, j)] += a[(i, j)];
            }
        }
        for (s, &k) in sums.iter_mut().zip(&self.sizes) {
            *s /= k as f64;
        }
        Matrix::from_fn(n, n, |i, j| sums[self.id(i, j)])
    }

    /// A seeded random Hermitian element of the commutant.
    fn random_element(&self, rng: &mut Rng, complex: bool) -> HermitianMatrix {
        let n = self.n as f64;
        let z: Vec<c64> = (0..self.count)
            .map(|o| {
                let scale = n / self.sizes[o] as f64;
                let im = if complex { rng.random_range(-1.0..1.0) } else { 0.0 };
                c64::new(rng.random_range(-1.0..1.0), im) * scale
            })
            .collect();
        let w: Vec<c64> = (0..self.count)
            .map(|o| z[o] + z[self.transpose[o] as usize].conj())
            .collect();
        HermitianMatrix::from_fn(self.n, |i, j| w[self.id(i, j)]).expect("commutant element is Hermitian")
    }
}

/// An invariant subspace carrying one irrep, or an isotypic component.
#[derive(Clone, Debug)]
pub struct Block {
    /// Orthonormal columns spanning the block.
    pub basis: Matrix,
    pub dim: usize,
    /// `tr(U_g P)` on the class representatives of the decomposition.
    pub fingerprint: Vec<c64>,
    pub label: Option<Label>,
    /// Index of the isotypic component this block belongs to.
    pub component: usize,
}

impl Block {
    pub fn projector(&self) -> HermitianMatrix {
        HermitianMatrix::projector_onto(self.basis.as_ref())
    }
}

/// Irreducible invariant subspaces of the family space.
///
/// For a multiplicity-free action each block is a whole isotypic component
/// and `component[i] == i`. Otherwise blocks are single copies, grouped by
/// `component`.
#[derive(Clone, Debug)]
pub struct IsotypicDecomposition {
    pub blocks: Vec<Block>,
    pub class_reps: Vec<ClassRep>,
    pub multiplicity_free: bool,
    pub orbit_count: usize,
}

impl IsotypicDecomposition {
    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.dim).collect()
    }

    pub fn component_count(&self) -> usize {
        self.blocks.iter().map(|b| b.component + 1).max().unwrap_or(0)
    }

    /// Projector onto each isotypic component.
    pub fn component_projectors(&self) -> Vec<HermitianMatrix> {
        (0..self.component_count())
            .map(|c| {
                let cols: Vec<&Block> = self.blocks.iter().filter(|b| b.component == c).collect();
                let total: usize = cols.iter().map(|b| b.dim).sum();
                let n = cols[0].basis.nrows();
                let mut basis = Matrix::zeros(n, total);
                let mut at = 0;
                for b in cols {
                    for k in 0..b.dim {
                        for i in 0..n {
                            basis[(i, at)] = b.basis[(i, k)];
                        }
                        at += 1;
                    }
                }
                HermitianMatrix::projector_onto(basis.as_ref())
            })
            .collect()
    }

    pub fn block_with_label(&self, label: &Label) -> Option<&Block> {
        self.blocks.iter().find(|b| b.label.as_ref() == Some(label))
    }
}

/// Splits the span of `space` (or the whole family) into irreducible invariant subspaces.
fn split(orbits: &OrbitBasis, space: Option<&Matrix>, rng: &mut Rng, complex: bool) -> Result<Vec<(Matrix, f64)>> {
    let h = orbits.random_element(rng, complex);
    let (spec, lift): (matrix::Spectrum, Option<&Matrix>) = match space {
        None => (matrix::eigh_raw(&h)?, None),
        Some(b) => {
            let hb = h.as_ref() * b.as_ref();
            let c = HermitianMatrix::new(b.adjoint() * hb.as_ref())?;
            (matrix::eigh_raw(&c)?, Some(b))
        }
    };
    let ranges = spec.clusters(matrix::CLUSTER_REL_TOL);
    let scale = spec.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for w in ranges.windows(2) {
        let gap = spec.eigenvalues[w[1].start] - spec.eigenvalues[w[0].end - 1];
        if gap < AMBIGUOUS_GAP * scale {
            return Err(Error::Decomposition(format!("eigenvalue clusters only {gap:.2e} apart")));
        }
    }
    Ok(ranges
        .into_iter()
        .map(|r| {
            let value = spec.eigenvalues[r.start];
            let local = spec.subspace(r);
            let basis = match lift {
                None => local,
                Some(b) => b.as_ref() * local.as_ref(),
            };
            (basis, value)
        })
        .collect())
}

fn same_fingerprint(a: &[c64], b: &[c64], dim: usize) -> bool {
    let tol = FINGERPRINT_TOL * (dim as f64).max(1.0);
    a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
}

/// Groups pieces by fingerprint, returning the component of each piece.
fn components(fingerprints: &[Vec<c64>], dims: &[usize]) -> Vec<usize> {
    let mut reps: Vec<usize> = Vec::new();
    let mut out = Vec::with_capacity(fingerprints.len());
    for (i, fp) in fingerprints.iter().enumerate() {
        match reps
            .iter()
            .position(|&r| dims[r] == dims[i] && same_fingerprint(&fingerprints[r], fp, dims[i]))
        {
            Some(c) => out.push(c),
            None => {
                reps.push(i);
                out.push(reps.len() - 1);
            }
        }
    }
    out
}

fn match_label(table: &[(Label, Vec<i64>)], fp: &[c64], dim: usize) -> Option<Label> {
    let tol = FINGERPRINT_TOL * (dim as f64).max(1.0);
    table.iter().find_map(|(label, chars)| {
        let fits = chars.iter().zip(fp).all(|(&c, z)| (z - c64::new(c as f64, 0.0)).norm() < tol);
        fits.then(|| label.clone())
    })
}

/// Decomposes the family space under `group`.
///
/// A seeded random element of the commutant is diagonalized and its
/// eigenspaces are taken as irreducible subspaces. The split is accepted when
/// `Σ m_l² ` over components equals the number of orbits on `F × F`, the
/// dimension of the commutant; otherwise a fresh seed is drawn, up to five
/// times.
pub fn isotypic_decomposition(group: &GroupAction, seed: u64) -> Result<IsotypicDecomposition> {
    let orbits = group.orbit_basis()?;
    let reps = group.class_representatives()?;
    let table = match group.structure() {
        Some(s) => Some(s.character_table(&reps)?),
        None => None,
    };
    let mut last_err = None;
    for attempt in 0..=RETRIES {
        let mut rng = rng::derived(seed, &format!("isotypic/{attempt}"));
        let pieces = match split(&orbits, None, &mut rng, attempt > 0) {
            Ok(p) => p,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        match assemble(group, &orbits, &reps, table.as_deref(), pieces) {
            Ok(d) => return Ok(d),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Decomposition("no attempt made".into())))
}

fn assemble(
    group: &GroupAction,
    orbits: &OrbitBasis,
    reps: &[ClassRep],
    table: Option<&[(Label, Vec<i64>)]>,
    pieces: Vec<(Matrix, f64)>,
) -> Result<IsotypicDecomposition> {
    let fps: Vec<Vec<c64>> = pieces
        .iter()
        .map(|(b, _)| group.fingerprint_of(b, reps))
        .collect::<Result<_>>()?;
    let dims: Vec<usize> = pieces.iter().map(|(b, _)| b.ncols()).collect();
    let comp = components(&fps, &dims);
    let ncomp = comp.iter().max().map_or(0, |c| c + 1);
    let mut mult = vec![0usize; ncomp];
    comp.iter().for_each(|&c| mult[c] += 1);
    let commutant: usize = mult.iter().map(|m| m * m).sum();
    if commutant != orbits.count() {
        return Err(Error::Decomposition(format!(
            "split gives a commutant of dimension {commutant}, orbit count is {}",
            orbits.count()
        )));
    }
    let mut blocks: Vec<(Block, f64)> = pieces
        .into_iter()
        .zip(fps)
        .zip(&comp)
        .map(|(((basis, value), fingerprint), &component)| {
            let dim = basis.ncols();
            let label = table.and_then(|t| match_label(t, &fingerprint, dim));
            (
                Block {
                    basis,
                    dim,
                    fingerprint,
                    label,
                    component,
                },
                value,
            )
        })
        .collect();
    if table.is_some() && blocks.iter().any(|(b, _)| b.label.is_none()) {
        return Err(Error::Decomposition("a block matches no irrep character".into()));
    }
    sort_blocks(&mut blocks);
    let blocks = renumber(blocks.into_iter().map(|(b, _)| b).collect());
    Ok(IsotypicDecomposition {
        multiplicity_free: orbits.all_symmetric(),
        orbit_count: orbits.count(),
        blocks,
        class_reps: reps.to_vec(),
    })
}

fn fingerprint_key(fp: &[c64]) -> Vec<(i64, i64)> {
    fp.iter()
        .map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64))
        .collect()
}

/// Components ordered by label (or dimension and fingerprint), copies by eigenvalue.
fn sort_blocks(blocks: &mut [(Block, f64)]) {
    blocks.sort_by(|(a, va), (b, vb)| {
        let ka = a.label.as_ref().map(YoungStructure::label_key);
        let kb = b.label.as_ref().map(YoungStructure::label_key);
        ka.cmp(&kb)
            .then(a.dim.cmp(&b.dim))
            .then_with(|| fingerprint_key(&b.fingerprint).cmp(&fingerprint_key(&a.fingerprint)))
            .then(va.total_cmp(vb))
    });
}

fn renumber(mut blocks: Vec<Block>) -> Vec<Block> {
    let mut map: HashMap<usize, usize> = HashMap::new();
    for b in &mut blocks {
        let next = map.len();
        b.component = *map.entry(b.component).or_insert(next);
    }
    blocks
}

/// One `G_x`-irreducible piece inside a block of a decomposition.
#[derive(Clone, Debug)]
pub struct RestrictedCopy {
    /// Index of the parent block.
    pub parent: usize,
    pub basis: Matrix,
    pub dim: usize,
    pub fingerprint: Vec<c64>,
    pub label: Option<Label>,
    /// Subgroup irrep class; copies with equal `irrep` are isomorphic.
    pub irrep: usize,
}

#[derive(Clone, Debug)]
pub struct Restriction {
    pub copies: Vec<RestrictedCopy>,
    pub class_reps: Vec<ClassRep>,
    pub orbits: OrbitBasis,
}

impl Restriction {
    pub fn irrep_count(&self) -> usize {
        self.copies.iter().map(|c| c.irrep + 1).max().unwrap_or(0)
    }

    /// Copies carrying subgroup irrep `l`, ordered by parent block.
    pub fn copies_of(&self, l: usize) -> Vec<&RestrictedCopy> {
        self.copies.iter().filter(|c| c.irrep == l).collect()
    }
}

/// Splits every block of `decomp` under the subgroup `sub`.
pub fn restrict(decomp: &IsotypicDecomposition, sub: &GroupAction, seed: u64) -> Result<Restriction> {
    let orbits = sub.orbit_basis()?;
    let reps = sub.class_representatives()?;
    let table = match sub.structure() {
        Some(s) => Some(s.character_table(&reps)?),
        None => None,
    };
    let mut last_err = None;
    'attempt: for attempt in 0..=RETRIES {
        let mut rng = rng::derived(seed, &format!("restrict/{attempt}"));
        let mut pieces = Vec::new();
        for (k, block) in decomp.blocks.iter().enumerate() {
            let split_k = if block.dim == 1 {
                Ok(vec![(block.basis.clone(), 0.0)])
            } else {
                split(&orbits, Some(&block.basis), &mut rng, attempt > 0)
            };
            match split_k {
                Ok(p) => pieces.extend(p.into_iter().map(|(b, v)| (k, b, v))),
                Err(e) => {
                    last_err = Some(e);
                    continue 'attempt;
                }
            }
        }
        let fps: Vec<Vec<c64>> = pieces
            .iter()
            .map(|(_, b, _)| sub.fingerprint_of(b, &reps))
            .collect::<Result<_>>()?;
        let dims: Vec<usize> = pieces.iter().map(|(_, b, _)| b.ncols()).collect();
        let comp = components(&fps, &dims);
        let ncomp = comp.iter().max().map_or(0, |c| c + 1);
        let mut mult = vec![0usize; ncomp];
        comp.iter().for_each(|&c| mult[c] += 1);
        let commutant: usize = mult.iter().map(|m| m * m).sum();
        if commutant != orbits.count() {
            last_err = Some(Error::Decomposition(format!(
                "restricted split gives commutant dimension {commutant}, orbit count is {}",
                orbits.count()
            )));
            continue;
        }
        let mut copies: Vec<(RestrictedCopy, f64)> = pieces
            .into_iter()
            .zip(fps)
            .zip(&comp)
            .map(|(((parent, basis, value), fingerprint), &irrep)| {
                let dim = basis.ncols();
                let label = table.as_deref().and_then(|t| match_label(t, &fingerprint, dim));
                (
                    RestrictedCopy {
                        parent,
                        basis,
                        dim,
                        fingerprint,
                        label,
                        irrep,
                    },
                    value,
                )
            })
            .collect();
        if table.is_some() && copies.iter().any(|(c, _)| c.label.is_none()) {
            last_err = Some(Error::Decomposition("a restricted copy matches no irrep character".into()));
            continue;
        }
        // Irreps in label (or first-appearance) order, copies by parent block.
        let mut order: Vec<usize> = (0..ncomp).collect();
        let first_parent: Vec<usize> = (0..ncomp)
            .map(|c| copies.iter().position(|(p, _)| p.irrep == c).unwrap())
            .collect();
        order.sort_by(|&a, &b| {
            let la = copies[first_parent[a]].0.label.as_ref().map(YoungStructure::label_key);
            let lb = copies[first_parent[b]].0.label.as_ref().map(YoungStructure::label_key);
            la.cmp(&lb).then(first_parent[a].cmp(&first_parent[b]))
        });
        let mut rank = vec![0; ncomp];
        for (r, &c) in order.iter().enumerate() {
            rank[c] = r;
        }
        for (c, _) in &mut copies {
            c.irrep = rank[c.irrep];
        }
        copies.sort_by(|(a, va), (b, vb)| {
            a.irrep.cmp(&b.irrep).then(a.parent.cmp(&b.parent)).then(va.total_cmp(vb))
        });
        return Ok(Restriction {
            copies: copies.into_iter().map(|(c, _)| c).collect(),
            class_reps: reps,
            orbits,
        });
    }
    Err(last_err.unwrap_or_else(|| Error::Decomposition("no attempt made".into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{build_index_erasure, build_search};

    fn search(n: usize) -> GroupAction {
        GroupAction::search_symmetric(Arc::new(build_search(n).unwrap())).unwrap()
    }

    fn ie(n: usize, m: usize) -> GroupAction {
        GroupAction::index_erasure(Arc::new(build_index_erasure(n, m).unwrap())).unwrap()
    }

    #[test]
    fn act_examples() {
        let g = search(4);
        let id = GroupElement::identity(4, 2);
        assert!((0..4).all(|f| g.act(&id, f).unwrap() == f));
        let swap = GroupElement {
            pi: vec![1, 0, 2, 3],
            tau: vec![0, 1],
        };
        assert_eq!(g.act(&swap, 0).unwrap(), 1);
    }

    #[test]
    fn composition_matches_sequential_action() {
        let g = ie(2, 3);
        let a = GroupElement { pi: vec![1, 0], tau: vec![1, 2, 0] };
        let b = GroupElement { pi: vec![0, 1], tau: vec![0, 2, 1] };
        for f in 0..6 {
            let seq = g.act(&b, g.act(&a, f).unwrap()).unwrap();
            assert_eq!(g.act(&a.then(&b), f).unwrap(), seq);
            assert_eq!(g.act(&a.inverse(), g.act(&a, f).unwrap()).unwrap(), f);
        }
    }

    #[test]
    fn automorphism_checks() {
        assert!(search(4).verify_automorphism().pass);
        assert!(ie(2, 3).verify_automorphism().pass);
        let p = Arc::new(build_search(4).unwrap());
        let broken = GroupAction::new(
            p,
            vec![GroupElement {
                pi: vec![0, 1, 2, 3],
                tau: vec![1, 0],
            }],
        )
        .unwrap();
        let check = broken.verify_automorphism();
        assert!(!check.pass);
        assert!(check.witness.is_some());
    }

    #[test]
    fn orbit_counts() {
        assert_eq!(search(5).orbit_basis().unwrap().count(), 2);
        assert_eq!(ie(2, 3).orbit_basis().unwrap().count(), 4);
        let t = GroupAction::trivial(Arc::new(build_search(3).unwrap())).unwrap();
        assert_eq!(t.orbit_basis().unwrap().count(), 9);
    }

    #[test]
    fn orbit_matrices_commute_with_generators() {
        let g = ie(2, 4);
        let orbits = g.orbit_basis().unwrap();
        for gen in g.generators() {
            let u = g.representation_matrix(gen).unwrap();
            for b in orbits.matrices() {
                assert_eq!((&u * &b - &b * &u).norm_max(), 0.0);
            }
        }
    }

    fn cyclic_search4() -> GroupAction {
        GroupAction::new(
            Arc::new(build_search(4).unwrap()),
            vec![GroupElement {
                pi: vec![1, 2, 3, 0],
                tau: vec![0, 1],
            }],
        )
        .unwrap()
    }

    #[test]
    fn multiplicity_free_examples() {
        assert!(search(4).is_multiplicity_free().unwrap());
        assert!(ie(2, 3).is_multiplicity_free().unwrap());
        assert!(!cyclic_search4().is_multiplicity_free().unwrap());
    }

    #[test]
    fn stabilizer_orders() {
        assert_eq!(search(4).stabilizer(0, None).unwrap().order(), Some(6));
        assert_eq!(ie(2, 3).stabilizer(0, None).unwrap().order(), Some(6));
        assert_eq!(ie(2, 3).stabilizer(0, Some(0)).unwrap().order(), Some(2));
        let c = cyclic_search4().stabilizer(0, None).unwrap();
        assert_eq!(c.order(), Some(1));
    }

    #[test]
    fn generic_stabilizer_matches_structure() {
        let p = Arc::new(build_index_erasure(2, 3).unwrap());
        let young = GroupAction::index_erasure(p.clone()).unwrap();
        let plain = GroupAction::new(p, young.generators().to_vec()).unwrap();
        assert_eq!(plain.order(), Some(12));
        let a = plain.stabilizer(1, Some(2)).unwrap();
        let b = young.stabilizer(1, Some(2)).unwrap();
        assert_eq!(a.order(), b.order());
        assert_eq!(a.orbit_basis().unwrap().count(), b.orbit_basis().unwrap().count());
        let classes = plain.class_representatives().unwrap();
        assert_eq!(classes.len(), young.class_representatives().unwrap().len());
        assert_eq!(classes.iter().map(|c| c.size.unwrap()).sum::<u128>(), 12);
    }

    #[test]
    fn symmetrize_examples() {
        let g = search(4);
        let mut e = HermitianMatrix::zeros(4).into_matrix();
        e[(2, 2)] = c64::new(1.0, 0.0);
        let s = g.symmetrize(&HermitianMatrix::new(e).unwrap()).unwrap();
        assert!(s.max_abs_diff(&HermitianMatrix::diagonal(&[0.25; 4])) < 1e-15);
        let inv = HermitianMatrix::identity(4);
        assert!(g.symmetrize(&inv).unwrap().max_abs_diff(&inv) < 1e-15);
    }

    #[test]
    fn decomposition_examples() {
        let d = isotypic_decomposition(&search(4), 7).unwrap();
        assert_eq!(d.dims(), vec![1, 3]);
        let delta = HermitianMatrix::from_real(4, |_, _| 0.25).unwrap();
        assert!(d.blocks[0].projector().max_abs_diff(&delta) < 1e-10);
        assert_eq!(d.blocks[0].label.as_ref().unwrap(), &vec![Partition::empty()]);

        let d = isotypic_decomposition(&ie(2, 3), 7).unwrap();
        assert_eq!(d.dims(), vec![1, 2, 2, 1]);

        let t = GroupAction::trivial(Arc::new(build_search(3).unwrap())).unwrap();
        let d = isotypic_decomposition(&t, 7).unwrap();
        assert_eq!(d.dims(), vec![1, 1, 1]);
        assert_eq!(d.component_count(), 1);
    }

    #[test]
    fn cyclic_group_needs_complex_split() {
        let d = isotypic_decomposition(&cyclic_search4(), 3).unwrap();
        assert_eq!(d.dims(), vec![1, 1, 1, 1]);
        assert_eq!(d.component_count(), 4);
    }

    #[test]
    fn projectors_commute_and_resolve_identity() {
        let g = ie(2, 4);
        let d = isotypic_decomposition(&g, 11).unwrap();
        let n = g.problem().family_size();
        let mut sum = Matrix::zeros(n, n);
        for b in &d.blocks {
            let p = b.projector();
            let pp = p.as_ref() * p.as_ref();
            assert!((pp.as_ref() - p.as_ref()).norm_max() < BLOCK_TOL);
            for gen in g.generators() {
                let u = g.representation_matrix(gen).unwrap();
                assert!((&u * p.matrix() - p.matrix() * &u).norm_max() < BLOCK_TOL);
            }
            sum += p.as_ref();
        }
        assert!((sum - Matrix::identity(n, n)).norm_max() < BLOCK_TOL);
    }

    #[test]
    fn transporter_examples() {
        let g = search(4);
        let d = isotypic_decomposition(&g, 5).unwrap();
        let gx = g.stabilizer(0, None).unwrap();
        let mut rng = rng::seeded(1);
        let delta = d.blocks[0].basis.clone();
        let same = gx.transporter(&delta, &delta, &mut rng).unwrap().unwrap();
        assert!((same.as_ref() - d.blocks[0].projector().as_ref()).norm_max() < 1e-10);

        // δ_x = (δ − √n e_x)/√(n−1), the G_x-invariant direction inside V_1.
        let n = 4.0f64;
        let dx = Matrix::from_fn(4, 1, |i, _| {
            let e = if i == 0 { n.sqrt() } else { 0.0 };
            c64::new((0.5 - e) / (n - 1.0).sqrt(), 0.0)
        });
        let t = gx.transporter(&delta, &dx, &mut rng).unwrap().unwrap();
        let want = &dx * delta.adjoint();
        let phase = (0..4).flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| (t[(i, j)] * want[(i, j)].conj()).re)
            .sum::<f64>();
        assert!((phase.abs() - 1.0).abs() < 1e-10);

        // The standard irrep of S_3 inside V_1 is not isomorphic to the trivial one.
        let r = restrict(&d, &gx, 5).unwrap();
        let std_copy = r.copies.iter().find(|c| c.dim == 2).unwrap();
        assert!(gx.transporter(&delta, &std_copy.basis, &mut rng).unwrap().is_none());
    }

    #[test]
    fn permutation_character_is_fixed_point_count() {
        let g = ie(2, 3);
        let d = isotypic_decomposition(&g, 2).unwrap();
        for (c, rep) in d.class_reps.iter().enumerate() {
            let p = g.permutation(&rep.element).unwrap();
            let fixed = p.iter().enumerate().filter(|(i, &v)| *i == v as usize).count() as f64;
            let total: f64 = d.blocks.iter().map(|b| b.fingerprint[c].re).sum();
            assert!((total - fixed).abs() < 1e-9);
        }
    }
}

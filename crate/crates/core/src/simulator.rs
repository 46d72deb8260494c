//! Dense statevector simulation of query algorithms together with the
//! function register `F`.
//!
//! The joint state is stored as an `|A| × |F|` matrix `Ψ` with
//! `A = I ⊗ O ⊗ W`, so the flat index is `((x·M + s)·W + w)·|F| + f`.
//! The reduced state of `F` is `ρ = conj(Ψ†Ψ)`.

use serde::{Deserialize, Serialize};

use crate::bounds::{self, AdversaryKind, AdversaryMatrix};
use crate::matrix::{self, c64, HermitianMatrix, Matrix};
use crate::problems::{parse_complex, OracleProblem, ProblemKind, Target};
use crate::{too_large, Error, Result};

pub const MAX_JOINT_DIM: usize = 2_000_000;
pub const UNITARY_TOL: f64 = 1e-9;
pub const REGISTER_TOL: f64 = 1e-7;
pub const QUERY_SLACK: f64 = 1e-7;
pub const FINAL_SLACK: f64 = 1e-6;
pub const RHO_UPDATE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Call {
    Computing,
    Uncomputing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gate {
    /// Walsh–Hadamard on `I` when `N` is a power of two, the `N`-point Fourier transform otherwise.
    #[serde(rename = "hadamard-all-I")]
    HadamardAllI,
    /// Phase −1 on every nonzero value of `O`.
    #[serde(rename = "phase-flip-O")]
    PhaseFlipO,
    /// `2|u⟩⟨u| − I` on `I`, with `|u⟩` uniform.
    #[serde(rename = "grover-diffusion")]
    GroverDiffusion,
}

#[derive(Clone, Debug)]
pub enum Step {
    Gate(Gate),
    Unitary(Matrix),
    Oracle(Call),
}

#[derive(Clone, Debug)]
pub struct QueryCircuit {
    pub input_dim: usize,
    pub output_dim: usize,
    pub work_dim: usize,
    pub steps: Vec<Step>,
}

/// On-disk form of a circuit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircuitFile {
    pub input_dim: usize,
    pub output_dim: usize,
    #[serde(default = "one")]
    pub work_dim: usize,
    pub steps: Vec<StepFile>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum StepFile {
    Gate { name: Gate },
    Unitary { matrix: Vec<Vec<serde_json::Value>> },
    Oracle { call: Call },
}

impl QueryCircuit {
    pub fn new(input_dim: usize, output_dim: usize, work_dim: usize, steps: Vec<Step>) -> Result<Self> {
        let c = Self {
            input_dim,
            output_dim,
            work_dim,
            steps,
        };
        let a = c.a_dim();
        if a == 0 {
            return Err(Error::InvalidParameter("registers must be nonempty".into()));
        }
        for (i, s) in c.steps.iter().enumerate() {
            if let Step::Unitary(u) = s {
                if u.nrows() != a || u.ncols() != a {
                    return Err(Error::Dimension(format!("step {i}: unitary is not {a}×{a}")));
                }
                matrix::check_finite(u.as_ref())?;
                let dev = (u.adjoint() * u.as_ref() - Matrix::identity(a, a)).norm_max();
                if dev > UNITARY_TOL {
                    return Err(Error::InvalidParameter(format!("step {i}: not unitary (deviation {dev:.3e})")));
                }
            }
        }
        Ok(c)
    }

    pub fn a_dim(&self) -> usize {
        self.input_dim * self.output_dim * self.work_dim
    }

    pub fn query_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Oracle(_))).count()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: CircuitFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let steps = f
            .steps
            .into_iter()
            .map(|s| match s {
                StepFile::Gate { name } => Ok(Step::Gate(name)),
                StepFile::Oracle { call } => Ok(Step::Oracle(call)),
                StepFile::Unitary { matrix } => {
                    let n = matrix.len();
                    let mut u = Matrix::zeros(n, n);
                    for (i, row) in matrix.iter().enumerate() {
                        if row.len() != n {
                            return Err(Error::Parse("unitary rows must be square".into()));
                        }
                        for (j, v) in row.iter().enumerate() {
                            u[(i, j)] = parse_complex(v)?;
                        }
                    }
                    Ok(Step::Unitary(u))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(f.input_dim, f.output_dim, f.work_dim, steps)
    }
}

/// Grover's algorithm with every phase query compiled as compute, flip, uncompute.
pub fn grover_for_search(n: usize, iterations: usize) -> Result<QueryCircuit> {
    if n < 2 {
        return Err(Error::InvalidParameter("Grover needs n ≥ 2".into()));
    }
    let mut steps = vec![Step::Gate(Gate::HadamardAllI)];
    for _ in 0..iterations {
        steps.push(Step::Oracle(Call::Computing));
        steps.push(Step::Gate(Gate::PhaseFlipO));
        steps.push(Step::Oracle(Call::Uncomputing));
        steps.push(Step::Gate(Gate::GroverDiffusion));
    }
    QueryCircuit::new(n, 2, 1, steps)
}

/// `sin²((2k+1)·asin(1/√n))`.
pub fn grover_success(n: usize, iterations: usize) -> f64 {
    let theta = (1.0 / (n as f64).sqrt()).asin();
    ((2 * iterations + 1) as f64 * theta).sin().powi(2)
}

/// The super-oracle `|x⟩|s⟩|f⟩ ↦ |x⟩|s + f(x) mod M⟩|f⟩` as a permutation of `I⊗O⊗F`.
pub fn super_oracle_permutation(p: &OracleProblem) -> Vec<usize> {
    let (n, m, nf) = (p.input_size(), p.output_size(), p.family_size());
    let mut perm = vec![0; n * m * nf];
    for x in 0..n {
        for s in 0..m {
            for (fi, f) in p.functions().iter().enumerate() {
                let from = (x * m + s) * nf + fi;
                let to = (x * m + (s + f[x]) % m) * nf + fi;
                perm[from] = to;
            }
        }
    }
    perm
}

/// Dense permutation matrix of the super-oracle.
pub fn super_oracle(p: &OracleProblem) -> Result<Matrix> {
    let d = p.input_size() * p.output_size() * p.family_size();
    if d > 4096 {
        return Err(too_large("dense super-oracle", d, 4096));
    }
    let perm = super_oracle_permutation(p);
    let mut u = Matrix::zeros(d, d);
    for (from, &to) in perm.iter().enumerate() {
        u[(to, from)] = c64::new(1.0, 0.0);
    }
    Ok(u)
}

#[derive(Clone, Debug)]
pub struct CallRecord {
    pub step: usize,
    pub call: Call,
    /// Index into `states` of the state just before the call.
    pub before: usize,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub input_dim: usize,
    pub output_dim: usize,
    pub work_dim: usize,
    /// `states[0]` is initial; `states[i + 1]` follows step `i`.
    pub states: Vec<Matrix>,
    /// `ρ^0` and the reduced state after each oracle call.
    pub rho: Vec<HermitianMatrix>,
    pub calls: Vec<CallRecord>,
}

impl Trajectory {
    pub fn final_state(&self) -> &Matrix {
        self.states.last().unwrap()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.norm_l2()).collect()
    }
}

fn index(c: &QueryCircuit, x: usize, s: usize, w: usize) -> usize {
    (x * c.output_dim + s) * c.work_dim + w
}

pub fn reduced_state(psi: &Matrix) -> Result<HermitianMatrix> {
    let g = psi.adjoint() * psi.as_ref();
    HermitianMatrix::new(Matrix::from_fn(g.nrows(), g.ncols(), |i, j| g[(i, j)].conj()))
}

/// `ρ_x`: the part of `ρ` with `I` in state `x`.
pub fn reduced_state_at(psi: &Matrix, c: &QueryCircuit, x: usize) -> Result<HermitianMatrix> {
    let rows = c.output_dim * c.work_dim;
    let block = psi.subrows(x * rows, rows).to_owned();
    reduced_state(&block)
}

fn walsh_or_fourier(n: usize) -> Matrix {
    let s = 1.0 / (n as f64).sqrt();
    if n.is_power_of_two() {
        Matrix::from_fn(n, n, |i, j| c64::new(if (i & j).count_ones() % 2 == 0 { s } else { -s }, 0.0))
    } else {
        Matrix::from_fn(n, n, |i, j| {
            let t = 2.0 * std::f64::consts::PI * ((i * j) % n) as f64 / n as f64;
            c64::new(t.cos() * s, t.sin() * s)
        })
    }
}

fn apply_on_input(psi: &mut Matrix, c: &QueryCircuit, u: &Matrix) {
    let rest = c.output_dim * c.work_dim;
    let cols = psi.ncols();
    let old = psi.clone();
    for x in 0..c.input_dim {
        for r in 0..rest {
            for f in 0..cols {
                let mut acc = c64::new(0.0, 0.0);
                for x2 in 0..c.input_dim {
                    acc += u[(x, x2)] * old[(x2 * rest + r, f)];
                }
                psi[(x * rest + r, f)] = acc;
            }
        }
    }
}

fn apply_gate(psi: &mut Matrix, c: &QueryCircuit, gate: Gate) {
    let n = c.input_dim;
    match gate {
        Gate::HadamardAllI => apply_on_input(psi, c, &walsh_or_fourier(n)),
        Gate::GroverDiffusion => {
            let u = Matrix::from_fn(n, n, |i, j| {
                c64::new(2.0 / n as f64 - if i == j { 1.0 } else { 0.0 }, 0.0)
            });
            apply_on_input(psi, c, &u);
        }
        Gate::PhaseFlipO => {
            for x in 0..n {
                for s in 1..c.output_dim {
                    for w in 0..c.work_dim {
                        let row = index(c, x, s, w);
                        for f in 0..psi.ncols() {
                            psi[(row, f)] = -psi[(row, f)];
                        }
                    }
                }
            }
        }
    }
}

fn apply_oracle(psi: &mut Matrix, c: &QueryCircuit, p: &OracleProblem, call: Call, step: usize) -> Result<()> {
    let m = c.output_dim;
    // Register precondition: O is |0⟩ before computing, |f(x)⟩ before uncomputing.
    let mut stray = 0.0;
    for (fi, f) in p.functions().iter().enumerate() {
        for x in 0..c.input_dim {
            let expect = match call {
                Call::Computing => 0,
                Call::Uncomputing => f[x],
            };
            for s in (0..m).filter(|&s| s != expect) {
                for w in 0..c.work_dim {
                    stray += psi[(index(c, x, s, w), fi)].norm_sqr();
                }
            }
        }
    }
    if stray > REGISTER_TOL {
        return Err(Error::Hypothesis(format!(
            "step {step}: output register not in the {} state (weight {stray:.3e})",
            match call {
                Call::Computing => "|0⟩",
                Call::Uncomputing => "|f(x)⟩",
            }
        )));
    }
    let old = psi.clone();
    for (fi, f) in p.functions().iter().enumerate() {
        for x in 0..c.input_dim {
            for s in 0..m {
                let t = match call {
                    Call::Computing => (s + f[x]) % m,
                    Call::Uncomputing => (s + m - f[x]) % m,
                };
                for w in 0..c.work_dim {
                    psi[(index(c, x, t, w), fi)] = old[(index(c, x, s, w), fi)];
                }
            }
        }
    }
    Ok(())
}

/// Runs the circuit with `F` prepared in `|δ⟩` and `A` in `|0⟩`.
pub fn run(c: &QueryCircuit, p: &OracleProblem) -> Result<Trajectory> {
    if c.input_dim != p.input_size() || c.output_dim != p.output_size() {
        return Err(Error::Dimension(format!(
            "circuit registers {}×{} for a problem with alphabets {}×{}",
            c.input_dim,
            c.output_dim,
            p.input_size(),
            p.output_size()
        )));
    }
    let nf = p.family_size();
    let joint = c.a_dim().saturating_mul(nf);
    if joint > MAX_JOINT_DIM {
        return Err(too_large("joint state", joint, MAX_JOINT_DIM));
    }
    let mut psi = Matrix::zeros(c.a_dim(), nf);
    let amp = 1.0 / (nf as f64).sqrt();
    for f in 0..nf {
        psi[(0, f)] = c64::new(amp, 0.0);
    }
    let mut states = vec![psi.clone()];
    let mut rho = vec![reduced_state(&psi)?];
    let mut calls = Vec::new();
    for (i, step) in c.steps.iter().enumerate() {
        match step {
            Step::Gate(g) => apply_gate(&mut psi, c, *g),
            Step::Unitary(u) => psi = u.as_ref() * psi.as_ref(),
            Step::Oracle(call) => {
                apply_oracle(&mut psi, c, p, *call, i)?;
                calls.push(CallRecord {
                    step: i,
                    call: *call,
                    before: states.len() - 1,
                });
            }
        }
        states.push(psi.clone());
        if matches!(step, Step::Oracle(_)) {
            rho.push(reduced_state(&psi)?);
        }
    }
    Ok(Trajectory {
        input_dim: c.input_dim,
        output_dim: c.output_dim,
        work_dim: c.work_dim,
        states,
        rho,
        calls,
    })
}

/// `W^t = tr[Γ ρ^t]` for every snapshot.
pub fn progress_trajectory(traj: &Trajectory, adv: &AdversaryMatrix) -> Result<Vec<f64>> {
    traj.rho
        .iter()
        .map(|r| {
            if r.dim() != adv.dim() {
                return Err(Error::Dimension("adversary and function register differ".into()));
            }
            Ok(adv.matrix().trace_product(r))
        })
        .collect()
}

/// Minimum over `f` of the success probability.
///
/// Classical problems read the answer from `I` and compare it with the label;
/// coherent generation projects `O` onto `|ψ_f⟩` and `I`, `W` onto `|0⟩`.
pub fn success_probability(psi: &Matrix, c: &QueryCircuit, p: &OracleProblem) -> Result<f64> {
    let nf = p.family_size() as f64;
    let mut worst = f64::INFINITY;
    for fi in 0..p.family_size() {
        let prob = match p.kind() {
            ProblemKind::ClassicalFunction => {
                let label = match p.target() {
                    Target::Labels(z) => z[fi],
                    Target::Gram(_) => {
                        return Err(Error::Unsupported("classical success needs integer labels".into()))
                    }
                };
                if label < 0 || label as usize >= c.input_dim {
                    0.0
                } else {
                    let x = label as usize;
                    let mut acc = 0.0;
                    for s in 0..c.output_dim {
                        for w in 0..c.work_dim {
                            acc += psi[(index(c, x, s, w), fi)].norm_sqr();
                        }
                    }
                    acc * nf
                }
            }
            ProblemKind::CoherentGeneration => {
                let states = p
                    .target_states()
                    .ok_or_else(|| Error::Unsupported("coherent success needs target states".into()))?;
                let target = &states[fi];
                if target.len() != c.output_dim {
                    return Err(Error::Dimension("target states must live on the output register".into()));
                }
                let amp: c64 = (0..c.output_dim)
                    .map(|s| target[s].conj() * psi[(index(c, 0, s, 0), fi)])
                    .sum();
                amp.norm_sqr() * nf
            }
            ProblemKind::NonCoherentGeneration => {
                return Err(Error::Unsupported("success of non-coherent generation".into()))
            }
        };
        worst = worst.min(prob);
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QueryCheck {
    pub call: usize,
    pub step: usize,
    pub kind: Call,
    pub w_before: f64,
    pub w_after: f64,
    /// `|W^{t+1} − W^t|` (additive) or `W^{t+1}/W^t` (multiplicative).
    pub observed: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QueryReport {
    pub kind: AdversaryKind,
    pub checks: Vec<QueryCheck>,
    pub max_observed: f64,
    pub pass: bool,
}

/// Per-query inequalities: `|ΔW| ≤ max_x ‖Γ̃_x − Γ̃‖`, or for multiplicative
/// matrices `W^{t+1}/W^t ≤ max_x ‖Γ_x^{1/2}Γ^{−1/2}‖²` on computing calls and
/// `≤ max_x ‖Γ^{1/2}Γ_x^{−1/2}‖²` on uncomputing calls.
pub fn check_per_query(traj: &Trajectory, adv: &AdversaryMatrix, p: &OracleProblem) -> Result<QueryReport> {
    let w = progress_trajectory(traj, adv)?;
    let (forward, backward) = match adv.kind() {
        AdversaryKind::Additive => {
            let d = bounds::additive_denominators(adv, p)?.into_iter().fold(0.0, f64::max);
            (d, d)
        }
        AdversaryKind::Multiplicative => {
            let r = bounds::ratio_norms(adv, p)?;
            (
                r.iter().map(|r| r.computing).fold(0.0, f64::max),
                r.iter().map(|r| r.uncomputing).fold(0.0, f64::max),
            )
        }
    };
    let mut checks = Vec::new();
    for (i, rec) in traj.calls.iter().enumerate() {
        let (a, b) = (w[i], w[i + 1]);
        let bound = match rec.call {
            Call::Computing => forward,
            Call::Uncomputing => backward,
        };
        let observed = match adv.kind() {
            AdversaryKind::Additive => (b - a).abs(),
            AdversaryKind::Multiplicative => b / a,
        };
        checks.push(QueryCheck {
            call: i,
            step: rec.step,
            kind: rec.call,
            w_before: a,
            w_after: b,
            observed,
            bound,
            pass: observed <= bound + QUERY_SLACK,
        });
    }
    let max_observed = checks.iter().map(|c| c.observed).fold(0.0, f64::max);
    Ok(QueryReport {
        kind: adv.kind(),
        pass: checks.iter().all(|c| c.pass),
        checks,
        max_observed,
    })
}

/// Largest deviation from `ρ^{after} = Σ_x ρ_x^{before} ∘ D_x` over computing
/// calls, and the swapped identity over uncomputing calls.
pub fn check_rho_update(traj: &Trajectory, c: &QueryCircuit, p: &OracleProblem) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, rec) in traj.calls.iter().enumerate() {
        let (src, dst) = match rec.call {
            Call::Computing => (&traj.states[rec.before], &traj.rho[i + 1]),
            Call::Uncomputing => (&traj.states[rec.before + 1], &traj.rho[i]),
        };
        let nf = p.family_size();
        let mut acc = Matrix::zeros(nf, nf);
        for x in 0..c.input_dim {
            let rx = reduced_state_at(src, c, x)?;
            acc += p.restrict_query(&rx, x)?.matrix();
        }
        worst = worst.max((acc - dst.matrix()).norm_max());
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FinalValueReport {
    pub epsilon_observed: f64,
    pub w_final: f64,
    /// `C(ε_obs)` for the additive claim.
    pub additive_limit: f64,
    /// `1 − K̃(λ̃, ε_obs)` for the hybrid claim, when `η ≤ 1 − ε_obs`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hybrid_limit: Option<f64>,
    pub pass: bool,
}

/// Final-value claims for an additive matrix satisfying the zero condition.
pub fn check_final_value(
    traj: &Trajectory,
    c: &QueryCircuit,
    adv: &AdversaryMatrix,
    p: &OracleProblem,
    lambda_tilde: Option<f64>,
) -> Result<FinalValueReport> {
    if adv.kind() != AdversaryKind::Additive {
        return Err(Error::InvalidAdversary("final-value claims concern additive matrices".into()));
    }
    let success = success_probability(traj.final_state(), c, p)?;
    let eps = (1.0 - success).clamp(0.0, 1.0);
    let w_final = *progress_trajectory(traj, adv)?.last().unwrap();
    let additive_limit = bounds::c_eps(eps);
    let mut pass = w_final <= additive_limit + FINAL_SLACK;
    let mut hybrid_limit = None;
    if let Some(lt) = lambda_tilde {
        let tol = bounds::Tolerances::default();
        let eta = bounds::eta(p, &bounds::hybrid_bad_projector(adv, lt, &tol))?;
        if eta <= 1.0 - eps {
            let k = (1.0 - lt) * ((1.0 - eps).sqrt() - eta.sqrt()).powi(2);
            hybrid_limit = Some(1.0 - k);
            pass &= w_final <= 1.0 - k + FINAL_SLACK;
        }
    }
    Ok(FinalValueReport {
        epsilon_observed: eps,
        w_final,
        additive_limit,
        hybrid_limit,
        pass,
    })
}

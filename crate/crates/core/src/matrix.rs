//! Dense complex Hermitian linear algebra.
//!
//! Everything is double precision and dense. Real inputs take a real solver
//! path, which is about twice as fast as the complex one on the sizes used
//! here.

use faer::{Mat, MatRef, Side};

use crate::{Error, Result};

pub use faer::c64;

pub type Matrix = Mat<c64>;

/// Asymmetry above this (relative to the largest entry) is logged.
pub const ASYMMETRY_WARN: f64 = 1e-9;
/// Asymmetry above this is treated as a non-Hermitian input.
pub const ASYMMETRY_REJECT: f64 = 1e-6;
/// Relative gap below which neighbouring eigenvalues form one cluster.
pub const CLUSTER_REL_TOL: f64 = 1e-8;
/// Tolerance for projector identities in [`pinch`].
pub const PROJECTOR_TOL: f64 = 1e-9;
/// Negative eigenvalues down to this (relative) size count as zero in [`psd_power`].
pub const PSD_TOL: f64 = 1e-9;
/// Smallest eigenvalue accepted when inverting in [`psd_power`].
pub const SINGULAR_TOL: f64 = 1e-10;

const CANONICAL_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Spectral,
    Trace,
    Frobenius,
}

/// A square matrix equal to its conjugate transpose.
#[derive(Clone, Debug)]
pub struct HermitianMatrix(Matrix);

impl HermitianMatrix {
    /// Symmetrizes `a` into `(a + a†)/2`.
    pub fn new(a: Matrix) -> Result<Self> {
        check_square(a.as_ref())?;
        check_finite(a.as_ref())?;
        let n = a.nrows();
        let scale = a.norm_max().max(1.0);
        let mut asym: f64 = 0.0;
        for j in 0..n {
            for i in j..n {
                asym = asym.max((a[(i, j)] - a[(j, i)].conj()).norm());
            }
        }
        if asym > ASYMMETRY_REJECT * scale {
            return Err(Error::NotHermitian(asym));
        }
        if asym > ASYMMETRY_WARN * scale {
            log::warn!("symmetrizing matrix with asymmetry {asym:.3e}");
        }
        let sym = Mat::from_fn(n, n, |i, j| {
            if i == j {
                c64::new(a[(i, i)].re, 0.0)
            } else {
                (a[(i, j)] + a[(j, i)].conj()) * 0.5
            }
        });
        Ok(Self(sym))
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> c64) -> Result<Self> {
        Self::new(Mat::from_fn(n, n, f))
    }

    pub fn from_real(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        Self::new(Mat::from_fn(n, n, |i, j| c64::new(f(i, j), 0.0)))
    }

    pub fn identity(n: usize) -> Self {
        Self(Mat::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(Mat::zeros(n, n))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self(Mat::from_fn(n, n, |i, j| {
            if i == j {
                c64::new(values[i], 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        }))
    }

    /// `B B†` for a matrix `B` with orthonormal columns.
    pub fn projector_onto(basis: MatRef<'_, c64>) -> Self {
        let p = basis * basis.adjoint();
        Self::new(p).expect("B B† is Hermitian")
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_ref(&self) -> MatRef<'_, c64> {
        self.0.as_ref()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.0[(i, j)]
    }

    pub fn is_real(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| (0..n).all(|i| self.0[(i, j)].im == 0.0))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        same_shape(self.as_ref(), other.as_ref())?;
        let n = self.dim();
        Ok(Self(Mat::from_fn(n, n, |i, j| {
            self.0[(i, j)] * a + other.0[(i, j)] * b
        })))
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self(Mat::from_fn(self.dim(), self.dim(), |i, j| self.0[(i, j)] * a))
    }

    /// `tr(self · other)`, real because both factors are Hermitian.
    pub fn trace_product(&self, other: &Self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for j in 0..n {
            for i in 0..n {
                acc += (self.0[(i, j)] * other.0[(j, i)]).re;
            }
        }
        acc
    }

    /// `X self X†`.
    pub fn congruence(&self, x: MatRef<'_, c64>) -> Result<Self> {
        if x.ncols() != self.dim() {
            return Err(Error::Dimension(format!(
                "congruence by {}x{} on dimension {}",
                x.nrows(),
                x.ncols(),
                self.dim()
            )));
        }
        Self::new(x * self.as_ref() * x.adjoint())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.0.as_ref() - other.0.as_ref()).norm_max()
    }
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Index ranges of eigenvalue clusters.
    pub fn clusters(&self, rel_tol: f64) -> Vec<std::ops::Range<usize>> {
        clusters(&self.eigenvalues, rel_tol)
    }

    /// `Σ f(λ_i) v_i v_i†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.eigenvectors.nrows();
        let v = &self.eigenvectors;
        let scaled = Mat::from_fn(n, self.dim(), |i, j| v[(i, j)] * f(self.eigenvalues[j]));
        HermitianMatrix::new(&scaled * v.adjoint()).expect("V f(Λ) V† is Hermitian")
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map(|x| x)
    }

    /// Projector onto the eigenvectors whose eigenvalue satisfies `keep`.
    pub fn projector_where(&self, keep: impl Fn(f64) -> bool) -> HermitianMatrix {
        self.map(|x| if keep(x) { 1.0 } else { 0.0 })
    }

    /// Columns `range` of the eigenvector matrix.
    pub fn subspace(&self, range: std::ops::Range<usize>) -> Matrix {
        self.eigenvectors
            .as_ref()
            .subcols(range.start, range.len())
            .to_owned()
    }
}

pub(crate) fn clusters(values: &[f64], rel_tol: f64) -> Vec<std::ops::Range<usize>> {
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > rel_tol * scale {
            out.push(start..i);
            start = i;
        }
    }
    out
}

pub(crate) fn check_finite(a: MatRef<'_, c64>) -> Result<()> {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let z = a[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite(i, j));
            }
        }
    }
    Ok(())
}

fn check_square(a: MatRef<'_, c64>) -> Result<()> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::Dimension(format!(
            "expected a nonempty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

fn same_shape(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Result<()> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::Dimension(format!(
            "{}x{} vs {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(())
}

pub fn norm(a: MatRef<'_, c64>, kind: NormKind) -> Result<f64> {
    check_finite(a)?;
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(0.0);
    }
    match kind {
        NormKind::Frobenius => Ok(a.norm_l2()),
        NormKind::Spectral => {
            let s = a.singular_values().map_err(|_| Error::NoConvergence)?;
            Ok(s.iter().cloned().fold(0.0, f64::max))
        }
        NormKind::Trace => {
            let s = a.singular_values().map_err(|_| Error::NoConvergence)?;
            Ok(s.iter().sum())
        }
    }
}

/// Spectral norm of a Hermitian matrix, from its extreme eigenvalues.
pub fn spectral_norm(a: &HermitianMatrix) -> Result<f64> {
    let ev = eigenvalues(a)?;
    Ok(ev[0].abs().max(ev[ev.len() - 1].abs()))
}

pub fn hadamard(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Result<Matrix> {
    same_shape(a, b)?;
    Ok(Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * b[(i, j)]))
}

/// Ascending eigenvalues without eigenvectors.
pub fn eigenvalues(a: &HermitianMatrix) -> Result<Vec<f64>> {
    let n = a.dim();
    let mut ev = if a.is_real() {
        let r = Mat::<f64>::from_fn(n, n, |i, j| a.get(i, j).re);
        r.self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| Error::NoConvergence)?
    } else {
        a.as_ref()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| Error::NoConvergence)?
    };
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Eigendecomposition without the canonical rotation of degenerate clusters.
pub(crate) fn eigh_raw(a: &HermitianMatrix) -> Result<Spectrum> {
    let n = a.dim();
    if a.is_real() {
        let r = Mat::<f64>::from_fn(n, n, |i, j| a.get(i, j).re);
        let e = r
            .self_adjoint_eigen(Side::Lower)
            .map_err(|_| Error::NoConvergence)?;
        let s = e.S().column_vector();
        let u = e.U();
        Ok(Spectrum {
            eigenvalues: (0..n).map(|i| s[i]).collect(),
            eigenvectors: Mat::from_fn(n, n, |i, j| c64::new(u[(i, j)], 0.0)),
        })
    } else {
        let e = a
            .as_ref()
            .self_adjoint_eigen(Side::Lower)
            .map_err(|_| Error::NoConvergence)?;
        let s = e.S().column_vector();
        Ok(Spectrum {
            eigenvalues: (0..n).map(|i| s[i].re).collect(),
            eigenvectors: e.U().to_owned(),
        })
    }
}

/// Eigendecomposition with a reproducible basis inside each degenerate cluster.
///
/// Within a cluster spanned by columns `V`, the coordinate axes are projected
/// onto the cluster in index order and Gram–Schmidt orthonormalized, skipping
/// axes that add nothing new. Each resulting vector has a positive real entry
/// at the axis that produced it.
pub fn eig_hermitian(a: &HermitianMatrix) -> Result<Spectrum> {
    let mut spec = eigh_raw(a)?;
    for range in spec.clusters(CLUSTER_REL_TOL) {
        let basis = spec.subspace(range.clone());
        let canon = canonical_basis(basis.as_ref());
        for (k, j) in range.enumerate() {
            for i in 0..canon.nrows() {
                spec.eigenvectors[(i, j)] = canon[(i, k)];
            }
        }
    }
    Ok(spec)
}

/// Canonical orthonormal basis of the column span of `v` (orthonormal columns).
pub fn canonical_basis(v: MatRef<'_, c64>) -> Matrix {
    let (n, d) = (v.nrows(), v.ncols());
    // Coefficients are worked out in the d-dimensional coordinates of span(v):
    // the projection of axis i has coordinates conj(v[i, :]).
    let mut qs: Vec<Vec<c64>> = Vec::with_capacity(d);
    for i in 0..n {
        if qs.len() == d {
            break;
        }
        let mut w: Vec<c64> = (0..d).map(|k| v[(i, k)].conj()).collect();
        for _ in 0..2 {
            for q in &qs {
                let dot: c64 = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (wk, qk) in w.iter_mut().zip(q) {
                    *wk -= dot * qk;
                }
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > CANONICAL_TOL {
            w.iter_mut().for_each(|z| *z /= norm);
            qs.push(w);
        }
    }
    assert_eq!(qs.len(), d, "span has full rank");
    Mat::from_fn(n, d, |i, k| {
        (0..d).map(|l| v[(i, l)] * qs[k][l]).sum::<c64>()
    })
}

/// `V Λ^p V†`.
pub fn psd_power(a: &HermitianMatrix, p: f64) -> Result<HermitianMatrix> {
    let spec = eigh_raw(a)?;
    let scale = spec
        .eigenvalues
        .iter()
        .fold(1.0f64, |m, v| m.max(v.abs()));
    let min = spec.eigenvalues[0];
    if min < -PSD_TOL * scale {
        return Err(Error::NotPsd(min));
    }
    if p < 0.0 && min <= SINGULAR_TOL {
        return Err(Error::Singular(min));
    }
    Ok(spec.map(|x| if p == 0.0 { 1.0 } else { x.max(0.0).powf(p) }))
}

/// `Σ_y P_y A P_y` for a resolution of the identity `{P_y}`.
pub fn pinch(a: &HermitianMatrix, projectors: &[HermitianMatrix]) -> Result<HermitianMatrix> {
    let n = a.dim();
    if projectors.is_empty() {
        return Err(Error::NotResolution("empty family".into()));
    }
    let mut sum = Mat::<c64>::zeros(n, n);
    for (k, p) in projectors.iter().enumerate() {
        if p.dim() != n {
            return Err(Error::Dimension(format!("projector {k} has dimension {}", p.dim())));
        }
        let sq = p.as_ref() * p.as_ref();
        if (sq.as_ref() - p.as_ref()).norm_max() > PROJECTOR_TOL {
            return Err(Error::NotResolution(format!("member {k} is not idempotent")));
        }
        for (l, q) in projectors.iter().enumerate().skip(k + 1) {
            if (p.as_ref() * q.as_ref()).norm_max() > PROJECTOR_TOL {
                return Err(Error::NotResolution(format!("members {k} and {l} overlap")));
            }
        }
        sum += p.as_ref();
    }
    let id = Mat::<c64>::identity(n, n);
    if (sum.as_ref() - id.as_ref()).norm_max() > PROJECTOR_TOL {
        return Err(Error::NotResolution("members do not sum to the identity".into()));
    }
    let mut out = Mat::<c64>::zeros(n, n);
    for p in projectors {
        out += p.as_ref() * a.as_ref() * p.as_ref();
    }
    HermitianMatrix::new(out)
}

pub fn kron(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Matrix {
    a.kron(b)
}

//! Dense complex linear algebra shared by the rest of the crate.
//!
//! Everything here works on `DMatrix<Complex64>` and reports errors as
//! entrywise max-norms, which is the residual convention used throughout.

use std::ops::Range;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Entrywise max-norm `max |m_ij|`.
pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Kronecker product with `a` as the most significant factor.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `max |m - m†|`.
pub fn hermitian_residual(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// `max |m + m†|`.
pub fn anti_hermitian_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[(i, j)] + m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Frobenius inner product `Tr(a† b)`.
pub fn inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, in the order of `values`.
    pub vectors: CMatrix,
}

pub fn eigh(m: &CMatrix) -> Eigh {
    let n = m.nrows();
    if n == 0 {
        return Eigh {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let sym = (m + m.adjoint()) * C64::from(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Eigh { values, vectors }
}

/// Splits ascending `values` into runs of (numerically) equal eigenvalues.
///
/// Consecutive values separated by at most `tol` join a cluster; gaps of at
/// least `10 * tol` split. Anything in between is reported as an ambiguity
/// rather than guessed.
pub fn cluster_sorted(values: &[f64], tol: f64) -> Result<Vec<Range<usize>>> {
    let mut clusters = Vec::new();
    if values.is_empty() {
        return Ok(clusters);
    }
    let mut start = 0;
    for k in 1..values.len() {
        let gap = values[k] - values[k - 1];
        if gap <= tol {
            continue;
        }
        if gap < 10.0 * tol {
            return Err(Error::Degeneracy(format!(
                "eigenvalue gap {gap:e} between {} and {} is neither a degeneracy (≤ {tol:e}) \
                 nor a clear split (≥ {:e})",
                values[k - 1],
                values[k],
                10.0 * tol
            )));
        }
        clusters.push(start..k);
        start = k;
    }
    clusters.push(start..values.len());
    Ok(clusters)
}

/// Relative clustering tolerance scaled by the spectral radius.
pub fn spectral_tol(values: &[f64], rel: f64) -> f64 {
    let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    rel * scale
}

/// `exp(factor * h)` for Hermitian `h` via its eigendecomposition.
pub fn exp_hermitian(h: &CMatrix, factor: C64) -> CMatrix {
    let eig = eigh(h);
    let phases = CVector::from_iterator(eig.values.len(), eig.values.iter().map(|&v| (factor * v).exp()));
    let scaled = CMatrix::from_fn(h.nrows(), h.ncols(), |r, c| eig.vectors[(r, c)] * phases[c]);
    scaled * eig.vectors.adjoint()
}

/// Matrix exponential. Hermitian and anti-Hermitian arguments go through
/// the eigendecomposition; everything else through Padé scaling-and-squaring.
pub fn expm(a: &CMatrix) -> CMatrix {
    let scale = max_norm(a).max(1.0);
    if anti_hermitian_residual(a) <= 1e-13 * scale {
        // a = i h with h Hermitian
        let h = a * (-I);
        return exp_hermitian(&h, I);
    }
    if hermitian_residual(a) <= 1e-13 * scale {
        return exp_hermitian(a, ONE);
    }
    a.exp()
}

/// Least-squares coefficients of `target` on the span of `spanning`, with
/// the entrywise max-norm of what is left over.
#[derive(Debug, Clone)]
pub struct SpanFit {
    pub coefficients: Vec<C64>,
    pub residual: f64,
}

/// Projects `target` onto `span(spanning)` in the Frobenius inner product.
/// The Gram matrix is pseudo-inverted with relative eigenvalue cutoff
/// `cutoff`, so rank-deficient spanning sets are fine.
pub fn project_onto_span(target: &CMatrix, spanning: &[&CMatrix], cutoff: f64) -> SpanFit {
    let k = spanning.len();
    if k == 0 {
        return SpanFit {
            coefficients: Vec::new(),
            residual: max_norm(target),
        };
    }
    let gram = CMatrix::from_fn(k, k, |r, c| inner(spanning[r], spanning[c]));
    let rhs = CVector::from_iterator(k, spanning.iter().map(|b| inner(b, target)));
    let pinv = pseudo_inverse_hermitian(&gram, cutoff);
    let coeffs = pinv * rhs;
    let mut fitted = CMatrix::zeros(target.nrows(), target.ncols());
    for (c, b) in coeffs.iter().zip(spanning) {
        fitted += *b * *c;
    }
    SpanFit {
        coefficients: coeffs.iter().copied().collect(),
        residual: max_abs_diff(target, &fitted),
    }
}

fn pseudo_inverse_hermitian(m: &CMatrix, cutoff: f64) -> CMatrix {
    let eig = eigh(m);
    let top = eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &v) in eig.values.iter().enumerate() {
        if v.abs() <= cutoff * top || top == 0.0 {
            continue;
        }
        let col = eig.vectors.column(k);
        out += (col * col.adjoint()) * C64::from(1.0 / v);
    }
    out
}

/// Dimension of the linear span of `mats` (Gram-matrix rank with relative
/// cutoff `cutoff`).
pub fn span_dimension(mats: &[CMatrix], cutoff: f64) -> usize {
    let k = mats.len();
    if k == 0 {
        return 0;
    }
    let gram = CMatrix::from_fn(k, k, |r, c| inner(&mats[r], &mats[c]));
    let eig = eigh(&gram);
    let top = eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    eig.values.iter().filter(|v| v.abs() > cutoff * top).count()
}

/// `max |V†V - 1|` for the columns of `v`.
pub fn orthonormality_residual(v: &CMatrix) -> f64 {
    let g = v.adjoint() * v;
    max_abs_diff(&g, &CMatrix::identity(g.nrows(), g.ncols()))
}

/// Multiplies `v` by a unit phase so that its first component of magnitude
/// above `threshold` is real and positive. Returns the applied phase.
pub fn fix_phase(v: &mut CVector, threshold: f64) -> C64 {
    let phase = v
        .iter()
        .find(|z| z.norm() > threshold)
        .map(|z| z.conj() / z.norm())
        .unwrap_or(ONE);
    *v *= phase;
    phase
}

/// The commutant `{X : [X, A_j] = 0 ∀j}` of a set of Hermitian operators.
#[derive(Debug, Clone)]
pub struct Commutant {
    pub dimension: usize,
    /// Basis of the commutant (not orthonormalized), in the original coordinates.
    pub basis: Vec<CMatrix>,
    /// Number of unknowns actually solved for after the block reduction.
    pub unknowns: usize,
}

/// Solves the linear system `[X, A_j] = 0` for all `j`.
///
/// Any solution also commutes with a generic Hermitian element
/// `H = Σ c_j A_j`, so `X` is first restricted to be block-diagonal in the
/// eigenbasis of `H` (eigenvalues merged generously, which can only enlarge
/// the ansatz). The remaining constraints are assembled as the Gram matrix of
/// the commutator map and its null space is read off the eigenvalues.
///
/// Returns `None` when the reduced system would exceed `max_unknowns`.
pub fn commutant(ops: &[CMatrix], seed: u64, max_unknowns: usize) -> Result<Option<Commutant>> {
    let Some(first) = ops.first() else {
        return Err(Error::inconsistent("commutant of an empty operator set"));
    };
    let n = first.nrows();
    for a in ops {
        if a.shape() != (n, n) {
            return Err(Error::inconsistent("commutant operators differ in shape"));
        }
        let scale = max_norm(a).max(1.0);
        let res = hermitian_residual(a);
        if res > 1e-10 * scale {
            return Err(Error::NotHermitian(res));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut generic = CMatrix::zeros(n, n);
    for a in ops {
        generic += a * C64::from(rng.random_range(0.5..1.5));
    }
    let eig = eigh(&generic);
    let merge = spectral_tol(&eig.values, 1e-6);
    let mut groups: Vec<Range<usize>> = Vec::new();
    let mut start = 0;
    for k in 1..=n {
        if k == n || eig.values[k] - eig.values[k - 1] > merge {
            groups.push(start..k);
            start = k;
        }
    }
    let unknowns: usize = groups.iter().map(|g| g.len() * g.len()).sum();
    if unknowns > max_unknowns {
        return Ok(None);
    }

    let v = &eig.vectors;
    let rotated: Vec<CMatrix> = ops.iter().map(|a| v.adjoint() * a * v).collect();
    let squares = rotated.iter().fold(CMatrix::zeros(n, n), |acc, a| acc + a * a);

    // parameter p = (a, b) means X' has a single 1 at (a, b)
    let params: Vec<(usize, usize)> = groups
        .iter()
        .flat_map(|g| g.clone().flat_map(move |a| g.clone().map(move |b| (a, b))))
        .collect();
    // For Hermitian A the Gram matrix of X ↦ [A, X] between unit matrices
    // E_ab and E_a'b' is δ_bb' (A²)_aa' + δ_aa' (A²)_b'b − 2 A_aa' A_b'b.
    let gram = CMatrix::from_fn(unknowns, unknowns, |p, q| {
        let (a, b) = params[p];
        let (a2, b2) = params[q];
        let mut acc = ZERO;
        if b == b2 {
            acc += squares[(a, a2)];
        }
        if a == a2 {
            acc += squares[(b2, b)];
        }
        for r in &rotated {
            acc -= r[(a, a2)] * r[(b2, b)] * 2.0;
        }
        acc
    });
    let null = eigh(&gram);
    let top = null.values.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
    let mut basis = Vec::new();
    for (k, &val) in null.values.iter().enumerate() {
        if val.abs() > 1e-9 * top {
            continue;
        }
        let mut x = CMatrix::zeros(n, n);
        for (p, &(a, b)) in params.iter().enumerate() {
            x[(a, b)] = null.vectors[(p, k)];
        }
        basis.push(v * x * v.adjoint());
    }
    Ok(Some(Commutant {
        dimension: basis.len(),
        basis,
        unknowns,
    }))
}

//! Operators on `N` particles with `d` internal states each.
//!
//! Particle 0 is the leftmost (most significant) Kronecker factor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, max_norm, project_onto_span, CMatrix, C64};
use crate::su_basis::{GeneratorBasis, StructureTensors};

/// Largest Hilbert-space dimension handled with dense matrices.
pub const DENSE_CAP: usize = 4096;

/// `d^n`, rejecting anything above [`DENSE_CAP`].
pub fn hilbert_dim(d: usize, n_particles: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if n_particles == 0 {
        return Err(Error::InsufficientParticles { required: 1, got: 0 });
    }
    let cap_err = Error::DenseCap {
        d,
        n_particles,
        cap: DENSE_CAP,
    };
    let exp = u32::try_from(n_particles).map_err(|_| cap_err.clone())?;
    match d.checked_pow(exp) {
        Some(dim) if dim <= DENSE_CAP => Ok(dim),
        _ => Err(cap_err),
    }
}

/// Dense operator on `(C^d)^{⊗N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyOperator {
    d: usize,
    n_particles: usize,
    matrix: CMatrix,
    label: String,
}

impl ManyBodyOperator {
    pub fn new(d: usize, n_particles: usize, matrix: CMatrix, label: impl Into<String>) -> Result<Self> {
        let dim = hilbert_dim(d, n_particles)?;
        if matrix.shape() != (dim, dim) {
            return Err(Error::inconsistent(format!(
                "matrix is {}x{}, expected {dim}x{dim} for d={d}, N={n_particles}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            d,
            n_particles,
            matrix,
            label: label.into(),
        })
    }

    pub fn identity(d: usize, n_particles: usize) -> Result<Self> {
        let dim = hilbert_dim(d, n_particles)?;
        Self::new(d, n_particles, CMatrix::identity(dim, dim), "I")
    }

    pub fn zeros(d: usize, n_particles: usize, label: impl Into<String>) -> Result<Self> {
        let dim = hilbert_dim(d, n_particles)?;
        Self::new(d, n_particles, CMatrix::zeros(dim, dim), label)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn hermitian_residual(&self) -> f64 {
        linalg::hermitian_residual(&self.matrix)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_residual() <= tol
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn same_space(&self, other: &ManyBodyOperator) -> Result<()> {
        if self.d != other.d || self.n_particles != other.n_particles {
            return Err(Error::inconsistent(format!(
                "operators live on different spaces: (d={}, N={}) vs (d={}, N={})",
                self.d, self.n_particles, other.d, other.n_particles
            )));
        }
        Ok(())
    }

    /// Operator with the same `d`, `N` but a new matrix (dimension checked).
    pub fn like(&self, matrix: CMatrix, label: impl Into<String>) -> Result<Self> {
        Self::new(self.d, self.n_particles, matrix, label)
    }

    /// Linear combination `Σ c_k A_k` over operators on the same space.
    pub fn combine(terms: &[(C64, &ManyBodyOperator)], label: impl Into<String>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::inconsistent("empty linear combination"));
        };
        let mut m = CMatrix::zeros(first.dim(), first.dim());
        for (c, op) in terms {
            first.same_space(op)?;
            m += op.matrix() * *c;
        }
        first.like(m, label)
    }

    pub fn to_json(&self) -> OperatorJson {
        OperatorJson {
            d: self.d,
            n: self.n_particles,
            label: self.label.clone(),
            re: rows(&self.matrix, |z| z.re),
            im: rows(&self.matrix, |z| z.im),
        }
    }
}

fn rows(m: &CMatrix, part: impl Fn(&C64) -> f64) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| part(&m[(r, c)])).collect())
        .collect()
}

/// JSON shape of a [`ManyBodyOperator`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub d: usize,
    pub n: usize,
    pub label: String,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl TryFrom<OperatorJson> for ManyBodyOperator {
    type Error = Error;

    fn try_from(json: OperatorJson) -> Result<Self> {
        let dim = hilbert_dim(json.d, json.n)?;
        let well_formed =
            json.re.len() == dim && json.im.len() == dim && json.re.iter().chain(&json.im).all(|row| row.len() == dim);
        if !well_formed {
            return Err(Error::inconsistent("operator JSON rows do not match d^n"));
        }
        let m = CMatrix::from_fn(dim, dim, |r, c| C64::new(json.re[r][c], json.im[r][c]));
        ManyBodyOperator::new(json.d, json.n, m, json.label)
    }
}

/// Places a local operator acting on `sites` (in the given order, first site
/// most significant in `local`) into the full `N`-particle space, identity
/// elsewhere.
pub fn embed_sites(local: &CMatrix, sites: &[usize], d: usize, n_particles: usize) -> Result<CMatrix> {
    let dim = hilbert_dim(d, n_particles)?;
    for (k, &s) in sites.iter().enumerate() {
        if s >= n_particles {
            return Err(Error::ParticleIndex { index: s, n_particles });
        }
        if sites[..k].contains(&s) {
            return Err(Error::RepeatedParticle(sites.to_vec()));
        }
    }
    let local_dim = d.pow(sites.len() as u32);
    if local.shape() != (local_dim, local_dim) {
        return Err(Error::inconsistent(format!(
            "local operator is {}x{}, expected {local_dim}x{local_dim}",
            local.nrows(),
            local.ncols()
        )));
    }
    // stride of each site's digit in the full index
    let strides: Vec<usize> = sites.iter().map(|&s| d.pow((n_particles - 1 - s) as u32)).collect();
    let mut out = CMatrix::zeros(dim, dim);
    for row in 0..dim {
        let mut local_row = 0;
        let mut rest = row;
        for &st in &strides {
            let digit = (row / st) % d;
            local_row = local_row * d + digit;
            rest -= digit * st;
        }
        for local_col in 0..local_dim {
            let v = local[(local_row, local_col)];
            if v == linalg::ZERO {
                continue;
            }
            let mut col = rest;
            let mut lc = local_col;
            for &st in strides.iter().rev() {
                col += (lc % d) * st;
                lc /= d;
            }
            out[(row, col)] = v;
        }
    }
    Ok(out)
}

/// `I^{⊗α} ⊗ op ⊗ I^{⊗(N-α-1)}`.
pub fn embed(op: &CMatrix, particle: usize, n_particles: usize) -> Result<ManyBodyOperator> {
    if !op.is_square() {
        return Err(Error::inconsistent("single-particle operator must be square"));
    }
    let d = op.nrows();
    let m = embed_sites(op, &[particle], d, n_particles)?;
    ManyBodyOperator::new(d, n_particles, m, format!("embed[{particle}]"))
}

/// The collective operators `S_j = Σ_α λ_j^(α)`, one per generator.
#[derive(Debug, Clone)]
pub struct CollectiveErrorSet {
    d: usize,
    n_particles: usize,
    operators: Vec<ManyBodyOperator>,
}

impl CollectiveErrorSet {
    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn dim(&self) -> usize {
        self.operators[0].dim()
    }

    pub fn operators(&self) -> &[ManyBodyOperator] {
        &self.operators
    }

    pub fn get(&self, j: usize) -> &ManyBodyOperator {
        &self.operators[j]
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn matrices(&self) -> Vec<CMatrix> {
        self.operators.iter().map(|o| o.matrix().clone()).collect()
    }

    /// `max_{i<j} ‖[S_i, S_j] - 2i Σ_k f_ijk S_k‖_max`.
    pub fn lie_closure_residual(&self, tensors: &StructureTensors) -> Result<f64> {
        if tensors.dim() != self.d {
            return Err(Error::inconsistent("structure tensors for a different d"));
        }
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let mut diff = linalg::commutator(self.operators[i].matrix(), self.operators[j].matrix());
                for k in 0..n {
                    let f = tensors.f(i, j, k);
                    if f != 0.0 {
                        diff -= self.operators[k].matrix() * (linalg::I * 2.0 * f);
                    }
                }
                worst = worst.max(max_norm(&diff));
            }
        }
        Ok(worst)
    }

    /// Residual of the least-squares projection of `op` onto `span{S_k}`.
    pub fn span_residual(&self, op: &ManyBodyOperator) -> Result<f64> {
        self.operators[0].same_space(op)?;
        let spanning: Vec<&CMatrix> = self.operators.iter().map(|s| s.matrix()).collect();
        Ok(project_onto_span(op.matrix(), &spanning, 1e-10).residual)
    }
}

pub fn collective_set(basis: &GeneratorBasis, n_particles: usize) -> Result<CollectiveErrorSet> {
    let d = basis.dim();
    let dim = hilbert_dim(d, n_particles)?;
    let operators = basis
        .generators()
        .iter()
        .enumerate()
        .map(|(j, g)| {
            let mut s = CMatrix::zeros(dim, dim);
            for alpha in 0..n_particles {
                s += embed_sites(g, &[alpha], d, n_particles)?;
            }
            ManyBodyOperator::new(d, n_particles, s, format!("S_{j}"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CollectiveErrorSet {
        d,
        n_particles,
        operators,
    })
}

pub fn commutator(a: &ManyBodyOperator, b: &ManyBodyOperator) -> Result<ManyBodyOperator> {
    a.same_space(b)?;
    a.like(
        linalg::commutator(a.matrix(), b.matrix()),
        format!("[{}, {}]", a.label(), b.label()),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutationCheck {
    pub commutes: bool,
    pub max_residual: f64,
}

/// Checks `‖[H, S_j]‖_max ≤ tol` for every `j`.
pub fn commutes_with_all(h: &ManyBodyOperator, set: &CollectiveErrorSet, tol: f64) -> Result<CommutationCheck> {
    let mut worst: f64 = 0.0;
    for s in set.operators() {
        h.same_space(s)?;
        worst = worst.max(max_norm(&linalg::commutator(h.matrix(), s.matrix())));
    }
    Ok(CommutationCheck {
        commutes: worst <= tol,
        max_residual: worst,
    })
}

/// `D(v) = exp(Σ_j v_j S_j)`.
pub fn collective_unitary(set: &CollectiveErrorSet, v: &[C64]) -> Result<ManyBodyOperator> {
    if v.len() != set.len() {
        return Err(Error::inconsistent(format!(
            "expected {} coefficients, got {}",
            set.len(),
            v.len()
        )));
    }
    let dim = set.dim();
    let mut gen = CMatrix::zeros(dim, dim);
    for (c, s) in v.iter().zip(set.operators()) {
        if *c != linalg::ZERO {
            gen += s.matrix() * *c;
        }
    }
    ManyBodyOperator::new(set.d, set.n_particles, linalg::expm(&gen), "D(v)")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, ONE, ZERO};
    use crate::su_basis::{build_basis, compute_structure_tensors};

    fn pauli(k: usize) -> CMatrix {
        build_basis(2).unwrap().generator(k).clone()
    }

    fn diag(vals: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            vals.len(),
            vals.iter().map(|&v| C64::from(v)),
        ))
    }

    #[test]
    fn embed_pauli_z() {
        assert_eq!(embed(&pauli(2), 0, 2).unwrap().matrix(), &diag(&[1.0, 1.0, -1.0, -1.0]));
        assert_eq!(embed(&pauli(2), 1, 2).unwrap().matrix(), &diag(&[1.0, -1.0, 1.0, -1.0]));
    }

    #[test]
    fn embed_matches_kronecker_oracle() {
        let b = build_basis(3).unwrap();
        let id = CMatrix::identity(3, 3);
        for alpha in 0..3 {
            let mut want = CMatrix::identity(1, 1);
            for site in 0..3 {
                let f = if site == alpha { b.generator(4) } else { &id };
                want = want.kronecker(f);
            }
            assert_eq!(embed(b.generator(4), alpha, 3).unwrap().matrix(), &want);
        }
    }

    #[test]
    fn embed_trace_scales() {
        let op = CMatrix::from_fn(3, 3, |r, c| C64::new((r + 2 * c) as f64, r as f64 - c as f64));
        let tr = op.trace();
        for alpha in 0..3 {
            let e = embed(&op, alpha, 3).unwrap();
            assert!((e.trace() - tr * 9.0).norm() < 1e-12);
        }
    }

    #[test]
    fn embed_sites_respects_site_order() {
        let x = pauli(0);
        let z = pauli(2);
        let xz = x.kronecker(&z);
        let zx = z.kronecker(&x);
        let a = embed_sites(&xz, &[1, 0], 2, 2).unwrap();
        assert_eq!(a, zx);
    }

    #[test]
    fn embed_errors() {
        assert!(matches!(
            embed(&pauli(0), 2, 2),
            Err(Error::ParticleIndex {
                index: 2,
                n_particles: 2
            })
        ));
        assert!(matches!(
            embed_sites(&CMatrix::identity(4, 4), &[1, 1], 2, 3),
            Err(Error::RepeatedParticle(_))
        ));
        assert!(matches!(hilbert_dim(2, 13), Err(Error::DenseCap { .. })));
        assert_eq!(hilbert_dim(4, 6).unwrap(), 4096);
    }

    #[test]
    fn single_particle_collective_is_basis() {
        let b = build_basis(2).unwrap();
        let set = collective_set(&b, 1).unwrap();
        for j in 0..3 {
            assert_eq!(set.get(j).matrix(), b.generator(j));
        }
    }

    #[test]
    fn three_qubit_su2_closure() {
        let set = collective_set(&build_basis(2).unwrap(), 3).unwrap();
        let c = commutator(set.get(0), set.get(1)).unwrap();
        let want = set.get(2).matrix() * (linalg::I * 2.0);
        assert!(max_abs_diff(c.matrix(), &want) < 1e-12);
    }

    #[test]
    fn qutrit_pair_collective_hermitian_traceless() {
        let set = collective_set(&build_basis(3).unwrap(), 2).unwrap();
        assert_eq!(set.len(), 8);
        for s in set.operators() {
            assert_eq!(s.dim(), 9);
            assert!(s.is_hermitian(1e-14));
            assert!(s.trace().norm() < 1e-13);
        }
    }

    #[test]
    fn commutator_trivial_cases() {
        let m = embed(&pauli(0), 0, 2).unwrap();
        assert_eq!(max_norm(commutator(&m, &m).unwrap().matrix()), 0.0);
        let y1 = embed(&pauli(1), 1, 2).unwrap();
        assert_eq!(max_norm(commutator(&m, &y1).unwrap().matrix()), 0.0);
        let other = embed(&pauli(0), 0, 3).unwrap();
        assert!(matches!(commutator(&m, &other), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn commutes_with_all_cases() {
        let set = collective_set(&build_basis(2).unwrap(), 2).unwrap();
        let id = ManyBodyOperator::identity(2, 2).unwrap();
        let r = commutes_with_all(&id, &set, 1e-10).unwrap();
        assert!(r.commutes && r.max_residual == 0.0);
        let z0 = embed(&pauli(2), 0, 2).unwrap();
        let r = commutes_with_all(&z0, &set, 1e-10).unwrap();
        assert!(!r.commutes && r.max_residual > 1.0);
    }

    #[test]
    fn square_of_single_collective_operator() {
        // expected outcome per (d, N) comes from the brute-force sweep; only
        // the single-qubit case, where σ_x² = 1, is central
        for (d, n, central) in [(2, 1, true), (2, 2, false), (3, 1, false), (3, 2, false)] {
            let set = collective_set(&build_basis(d).unwrap(), n).unwrap();
            let s0 = set.get(0);
            let sq = s0.like(s0.matrix() * s0.matrix(), "S_0^2").unwrap();
            let r = commutes_with_all(&sq, &set, 1e-10).unwrap();
            let brute = set
                .operators()
                .iter()
                .map(|s| max_norm(&(sq.matrix() * s.matrix() - s.matrix() * sq.matrix())))
                .fold(0.0, f64::max);
            assert_eq!(r.max_residual, brute);
            assert_eq!(r.commutes, central, "d={d} N={n}");
        }
    }

    #[test]
    fn collective_unitary_cases() {
        let set = collective_set(&build_basis(2).unwrap(), 1).unwrap();
        let u = collective_unitary(&set, &[ZERO; 3]).unwrap();
        assert!(max_abs_diff(u.matrix(), &CMatrix::identity(2, 2)) < 1e-15);
        let v = [ZERO, ZERO, linalg::I * std::f64::consts::FRAC_PI_2];
        let u = collective_unitary(&set, &v).unwrap();
        let want = diag(&[1.0, -1.0]) * linalg::I;
        assert!(max_abs_diff(u.matrix(), &want) < 1e-14);
        assert!(matches!(collective_unitary(&set, &[ONE]), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn json_round_trip() {
        let op = embed(&pauli(1), 0, 2).unwrap();
        let text = serde_json::to_string(&op.to_json()).unwrap();
        let back: OperatorJson = serde_json::from_str(&text).unwrap();
        assert_eq!(ManyBodyOperator::try_from(back).unwrap(), op);
    }

    #[test]
    fn lie_closure_small() {
        for d in 2..=3 {
            let b = build_basis(d).unwrap();
            let t = compute_structure_tensors(&b);
            let set = collective_set(&b, 2).unwrap();
            assert!(set.lie_closure_residual(&t).unwrap() < 1e-10);
        }
    }
}

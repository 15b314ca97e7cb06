//! Generalized Gell-Mann basis of su(d) and its structure constants.
//!
//! Generators are normalized as `Tr(λ_i λ_j) = 2 δ_ij` and satisfy
//!
//! ```text
//! λ_i λ_j = (2/d) δ_ij + i f_ijk λ_k + d_ijk λ_k
//! ```
//!
//! with `f` totally antisymmetric and `d` totally symmetric. Indices are
//! 0-based everywhere.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff, max_norm, trace, CMatrix, C64, I, ONE, ZERO};

/// Entries with magnitude at or below this are treated as exact zeros.
pub const SPARSITY_THRESHOLD: f64 = 1e-12;

/// Default tolerance for [`verify_identities`].
pub const DEFAULT_IDENTITY_TOL: f64 = 1e-10;

/// Which block of the canonical ordering a generator belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// `E_pq + E_qp`
    Symmetric { p: usize, q: usize },
    /// `-i (E_pq - E_qp)`
    Antisymmetric { p: usize, q: usize },
    /// `sqrt(2/(m(m+1))) diag(1,…,1,-m,0,…)` with `m` ones.
    Diagonal { m: usize },
}

/// The `d² - 1` generalized Gell-Mann matrices in canonical order: all
/// symmetric pairs `p < q` lexicographically, then the antisymmetric pairs in
/// the same order, then the diagonals by increasing `m`.
#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    d: usize,
    generators: Vec<CMatrix>,
    kinds: Vec<GeneratorKind>,
}

impl GeneratorBasis {
    pub const ORDERING_TAG: &'static str = "sym-pairs/antisym-pairs/diagonals";

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of generators, `d² - 1`.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &CMatrix {
        &self.generators[i]
    }

    pub fn kinds(&self) -> &[GeneratorKind] {
        &self.kinds
    }

    pub fn ordering_tag(&self) -> &'static str {
        Self::ORDERING_TAG
    }

    /// Canonical index of a generator kind.
    pub fn index_of(&self, kind: GeneratorKind) -> Option<usize> {
        self.kinds.iter().position(|k| *k == kind)
    }

    /// Indices of the diagonal (Cartan) generators.
    pub fn diagonal_indices(&self) -> Vec<usize> {
        let pairs = self.d * (self.d - 1) / 2;
        (2 * pairs..self.len()).collect()
    }

    /// For each pair `p < q`, the canonical indices of the symmetric and
    /// antisymmetric generators, so `E_pq = (λ_sym + i λ_anti) / 2`.
    pub fn pair_indices(&self) -> Vec<(usize, usize, usize, usize)> {
        let pairs = self.d * (self.d - 1) / 2;
        self.kinds[..pairs]
            .iter()
            .enumerate()
            .map(|(k, kind)| match *kind {
                GeneratorKind::Symmetric { p, q } => (p, q, k, k + pairs),
                _ => unreachable!("symmetric block comes first"),
            })
            .collect()
    }
}

pub fn build_basis(d: usize) -> Result<GeneratorBasis> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|p| (p + 1..d).map(move |q| (p, q))).collect();

    let mut generators = Vec::with_capacity(d * d - 1);
    let mut kinds = Vec::with_capacity(d * d - 1);
    for &(p, q) in &pairs {
        let mut m = CMatrix::zeros(d, d);
        m[(p, q)] = ONE;
        m[(q, p)] = ONE;
        generators.push(m);
        kinds.push(GeneratorKind::Symmetric { p, q });
    }
    for &(p, q) in &pairs {
        let mut m = CMatrix::zeros(d, d);
        m[(p, q)] = -I;
        m[(q, p)] = I;
        generators.push(m);
        kinds.push(GeneratorKind::Antisymmetric { p, q });
    }
    for m in 1..d {
        let scale = (2.0 / (m * (m + 1)) as f64).sqrt();
        let mut g = CMatrix::zeros(d, d);
        for k in 0..m {
            g[(k, k)] = C64::from(scale);
        }
        g[(m, m)] = C64::from(-(m as f64) * scale);
        generators.push(g);
        kinds.push(GeneratorKind::Diagonal { m });
    }
    Ok(GeneratorBasis { d, generators, kinds })
}

/// Dense real 3-index array, used for contractions.
#[derive(Debug, Clone)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.data[(i * self.n + j) * self.n + k] = v;
    }

    /// The matrix `(M_k)_{ab} = t[a][k][b]` obtained by fixing the middle slot.
    pub fn middle_slice(&self, k: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |a, b| self.get(a, k, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TensorSymmetry {
    Antisymmetric,
    Symmetric,
}

/// Sparse `f` and `d` tensors. Only one canonical representative per index
/// orbit is stored (`i < j < k` for `f`, `i ≤ j ≤ k` for `d`); the lookups
/// apply the symmetry, so (anti)symmetry holds structurally.
#[derive(Debug, Clone)]
pub struct StructureTensors {
    d: usize,
    n: usize,
    f: BTreeMap<(usize, usize, usize), f64>,
    d_sym: BTreeMap<(usize, usize, usize), f64>,
}

/// Sorts three indices, returning them with the parity of the permutation.
fn sort3(i: usize, j: usize, k: usize) -> ((usize, usize, usize), f64) {
    let mut idx = [i, j, k];
    let mut sign = 1.0;
    for a in 0..2 {
        for b in 0..2 - a {
            if idx[b] > idx[b + 1] {
                idx.swap(b, b + 1);
                sign = -sign;
            }
        }
    }
    ((idx[0], idx[1], idx[2]), sign)
}

impl StructureTensors {
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of generators the tensors are indexed by.
    pub fn n_generators(&self) -> usize {
        self.n
    }

    pub fn f(&self, i: usize, j: usize, k: usize) -> f64 {
        if i == j || j == k || i == k {
            return 0.0;
        }
        let (key, sign) = sort3(i, j, k);
        self.f.get(&key).map_or(0.0, |v| sign * v)
    }

    pub fn d_sym(&self, i: usize, j: usize, k: usize) -> f64 {
        let (key, _) = sort3(i, j, k);
        self.d_sym.get(&key).copied().unwrap_or(0.0)
    }

    /// Canonical stored `f` entries `(i, j, k, value)` with `i < j < k`.
    pub fn f_canonical(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        self.f.iter().map(|(&(i, j, k), &v)| (i, j, k, v))
    }

    /// Canonical stored `d` entries `(i, j, k, value)` with `i ≤ j ≤ k`.
    pub fn d_canonical(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        self.d_sym.iter().map(|(&(i, j, k), &v)| (i, j, k, v))
    }

    pub fn dense_f(&self) -> Tensor3 {
        self.dense(TensorSymmetry::Antisymmetric)
    }

    pub fn dense_d(&self) -> Tensor3 {
        self.dense(TensorSymmetry::Symmetric)
    }

    fn dense(&self, which: TensorSymmetry) -> Tensor3 {
        let mut t = Tensor3::zeros(self.n);
        for e in self.entries(which, true).entries {
            t.set(e.0, e.1, e.2, e.3);
        }
        t
    }

    /// Serializable entry list, canonical representatives only unless `full`.
    pub fn entries(&self, which: TensorSymmetry, full: bool) -> TensorJson {
        let (map, tensor) = match which {
            TensorSymmetry::Antisymmetric => (&self.f, "f"),
            TensorSymmetry::Symmetric => (&self.d_sym, "d"),
        };
        let mut entries = Vec::new();
        for (&(i, j, k), &v) in map {
            if !full {
                entries.push((i, j, k, v));
                continue;
            }
            let perms = [
                (i, j, k, 1.0),
                (j, k, i, 1.0),
                (k, i, j, 1.0),
                (j, i, k, -1.0),
                (i, k, j, -1.0),
                (k, j, i, -1.0),
            ];
            for (a, b, c, parity) in perms {
                let sign = match which {
                    TensorSymmetry::Antisymmetric => parity,
                    TensorSymmetry::Symmetric => 1.0,
                };
                entries.push((a, b, c, sign * v));
            }
        }
        entries.sort_by_key(|e| (e.0, e.1, e.2));
        // repeated indices in the symmetric tensor produce duplicate permutations
        entries.dedup_by(|x, y| (x.0, x.1, x.2) == (y.0, y.1, y.2));
        TensorJson {
            d: self.d,
            tensor: tensor.to_string(),
            symmetry: which,
            full,
            entries,
        }
    }
}

/// JSON shape of one structure tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorJson {
    pub d: usize,
    /// `"f"` or `"d"`.
    pub tensor: String,
    pub symmetry: TensorSymmetry,
    pub full: bool,
    /// `[i, j, k, value]`, sorted lexicographically by `(i, j, k)`.
    pub entries: Vec<(usize, usize, usize, f64)>,
}

/// `f_ijk = Im Tr(λ_i λ_j λ_k) / 2`, `d_ijk = Re Tr(λ_i λ_j λ_k) / 2`.
pub fn compute_structure_tensors(basis: &GeneratorBasis) -> StructureTensors {
    let n = basis.len();
    let gens = basis.generators();
    let mut f = BTreeMap::new();
    let mut d_sym = BTreeMap::new();
    for i in 0..n {
        for j in i..n {
            let prod = &gens[i] * &gens[j];
            for k in j..n {
                let t = (&prod * &gens[k]).trace();
                let (re, im) = (t.re / 2.0, t.im / 2.0);
                if i < j && j < k && im.abs() > SPARSITY_THRESHOLD {
                    f.insert((i, j, k), im);
                }
                if re.abs() > SPARSITY_THRESHOLD {
                    d_sym.insert((i, j, k), re);
                }
            }
        }
    }
    StructureTensors {
        d: basis.dim(),
        n,
        f,
        d_sym,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityName {
    Normalization,
    ProductRelation,
    Jacobi,
    JacobiLike,
    DTraceZero,
    DfOrthogonal,
    FfContraction,
    DdContraction,
    FfProduct,
    DdfChain,
    DddChain,
}

impl IdentityName {
    pub const ALL: [IdentityName; 11] = [
        IdentityName::Normalization,
        IdentityName::ProductRelation,
        IdentityName::Jacobi,
        IdentityName::JacobiLike,
        IdentityName::DTraceZero,
        IdentityName::DfOrthogonal,
        IdentityName::FfContraction,
        IdentityName::DdContraction,
        IdentityName::FfProduct,
        IdentityName::DdfChain,
        IdentityName::DddChain,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityName::Normalization => "normalization",
            IdentityName::ProductRelation => "product_relation",
            IdentityName::Jacobi => "jacobi",
            IdentityName::JacobiLike => "jacobi_like",
            IdentityName::DTraceZero => "d_trace_zero",
            IdentityName::DfOrthogonal => "df_orthogonal",
            IdentityName::FfContraction => "ff_contraction",
            IdentityName::DdContraction => "dd_contraction",
            IdentityName::FfProduct => "ff_product",
            IdentityName::DdfChain => "ddf_chain",
            IdentityName::DddChain => "ddd_chain",
        }
    }
}

impl fmt::Display for IdentityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: IdentityName,
    pub d: usize,
    /// Largest absolute difference between the two sides over all index tuples.
    pub max_residual: f64,
    /// Largest magnitude of the left-hand side, to tell a trivially-zero
    /// identity apart from a nontrivial one.
    pub max_lhs: f64,
    pub passed: bool,
}

#[derive(Default)]
struct Residuals(BTreeMap<IdentityName, (f64, f64)>);

impl Residuals {
    fn record(&mut self, which: IdentityName, residual: f64, lhs_abs: f64) {
        let e = self.0.entry(which).or_insert((0.0, 0.0));
        e.0 = e.0.max(residual);
        e.1 = e.1.max(lhs_abs);
    }
}

/// Evaluates both sides of every algebra identity over all index tuples.
pub fn verify_identities(tensors: &StructureTensors, basis: &GeneratorBasis, tol: f64) -> Result<Vec<IdentityReport>> {
    if tensors.dim() != basis.dim() || tensors.n_generators() != basis.len() {
        return Err(Error::inconsistent(format!(
            "structure tensors for d={} do not match basis for d={}",
            tensors.dim(),
            basis.dim()
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::inconsistent(format!("tolerance must be positive, got {tol}")));
    }
    let dd = basis.dim() as f64;
    let n = basis.len();
    let f = tensors.dense_f();
    let ds = tensors.dense_d();
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };

    let mut acc = Residuals::default();
    let mut record = |which: IdentityName, lhs: f64, rhs: f64| acc.record(which, (lhs - rhs).abs(), lhs.abs());

    // normalization: Tr λ_i = 0 and Tr(λ_i λ_j) = 2 δ_ij
    let gens = basis.generators();
    for i in 0..n {
        record(IdentityName::Normalization, trace(&gens[i]).norm(), 0.0);
        for j in 0..n {
            let t = (&gens[i] * &gens[j]).trace();
            record(IdentityName::Normalization, t.re, 2.0 * delta(i, j));
            record(IdentityName::Normalization, t.im, 0.0);
        }
    }

    // product relation, residual in matrix max-norm
    let ident = CMatrix::identity(basis.dim(), basis.dim());
    let (mut product_residual, mut product_lhs) = (0.0f64, 0.0f64);
    for i in 0..n {
        for j in 0..n {
            let lhs = &gens[i] * &gens[j];
            let mut rhs = &ident * C64::from(2.0 / dd * delta(i, j));
            for k in 0..n {
                let c = C64::new(ds.get(i, j, k), f.get(i, j, k));
                if c != ZERO {
                    rhs += &gens[k] * c;
                }
            }
            product_residual = product_residual.max(max_abs_diff(&lhs, &rhs));
            product_lhs = product_lhs.max(max_norm(&lhs));
        }
    }

    // Jacobi and Jacobi-like, all (i, j, k, m)
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for m in 0..n {
                    let mut jac = 0.0;
                    let mut jlike = 0.0;
                    for l in 0..n {
                        jac += f.get(i, l, m) * f.get(j, k, l)
                            + f.get(j, l, m) * f.get(k, i, l)
                            + f.get(k, l, m) * f.get(i, j, l);
                        jlike += f.get(i, l, m) * ds.get(j, k, l)
                            + f.get(j, l, m) * ds.get(k, i, l)
                            + f.get(k, l, m) * ds.get(i, j, l);
                    }
                    record(IdentityName::Jacobi, jac, 0.0);
                    record(IdentityName::JacobiLike, jlike, 0.0);
                }
            }
        }
    }

    for k in 0..n {
        let s: f64 = (0..n).map(|i| ds.get(i, i, k)).sum();
        record(IdentityName::DTraceZero, s, 0.0);
    }

    for i in 0..n {
        for l in 0..n {
            let mut df = 0.0;
            let mut ff = 0.0;
            let mut ddc = 0.0;
            for j in 0..n {
                for k in 0..n {
                    df += ds.get(i, j, k) * f.get(l, j, k);
                    ff += f.get(i, j, k) * f.get(l, j, k);
                    ddc += ds.get(i, j, k) * ds.get(l, j, k);
                }
            }
            record(IdentityName::DfOrthogonal, df, 0.0);
            record(IdentityName::FfContraction, ff, dd * delta(i, l));
            record(IdentityName::DdContraction, ddc, (dd * dd - 4.0) / dd * delta(i, l));
        }
    }

    // f_ijm f_klm = (2/d)(δ_ik δ_jl − δ_il δ_jk) + d_ikm d_jlm − d_jkm d_ilm
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut lhs = 0.0;
                    let mut dpart = 0.0;
                    for m in 0..n {
                        lhs += f.get(i, j, m) * f.get(k, l, m);
                        dpart += ds.get(i, k, m) * ds.get(j, l, m) - ds.get(j, k, m) * ds.get(i, l, m);
                    }
                    let rhs = 2.0 / dd * (delta(i, k) * delta(j, l) - delta(i, l) * delta(j, k)) + dpart;
                    record(IdentityName::FfProduct, lhs, rhs);
                }
            }
        }
    }

    // Σ_pqr d_piq d_qjr X_rkp = Tr(D_i D_j X_k) with (D_i)_pq = d_piq, (X_k)_rp = x_rkp
    let d_slices: Vec<DMatrix<f64>> = (0..n).map(|i| ds.middle_slice(i)).collect();
    let f_slices: Vec<DMatrix<f64>> = (0..n).map(|k| f.middle_slice(k)).collect();
    let ddf_coeff = (dd * dd - 4.0) / (2.0 * dd);
    let ddd_coeff = (dd * dd - 12.0) / (2.0 * dd);
    for i in 0..n {
        for j in 0..n {
            let pair = &d_slices[i] * &d_slices[j];
            for k in 0..n {
                let with_f = pair.component_mul(&f_slices[k].transpose()).sum();
                let with_d = pair.component_mul(&d_slices[k].transpose()).sum();
                record(IdentityName::DdfChain, with_f, ddf_coeff * f.get(i, j, k));
                record(IdentityName::DddChain, with_d, ddd_coeff * ds.get(i, j, k));
            }
        }
    }

    acc.record(IdentityName::ProductRelation, product_residual, product_lhs);
    Ok(IdentityName::ALL
        .iter()
        .map(|&identity| {
            let (max_residual, max_lhs) = acc.0.get(&identity).copied().unwrap_or((0.0, 0.0));
            IdentityReport {
                identity,
                d: basis.dim(),
                max_residual,
                max_lhs,
                passed: max_residual <= tol,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, hermitian_residual};

    /// Independent route: f and d from commutators/anticommutators,
    /// f_ijk = Tr([λ_i, λ_j] λ_k) / 4i, d_ijk = Tr({λ_i, λ_j} λ_k) / 4.
    fn oracle_tensors(basis: &GeneratorBasis) -> (Tensor3, Tensor3) {
        let n = basis.len();
        let g = basis.generators();
        let mut f = Tensor3::zeros(n);
        let mut d = Tensor3::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let comm = commutator(&g[i], &g[j]);
                let anti = &g[i] * &g[j] + &g[j] * &g[i];
                for k in 0..n {
                    f.set(i, j, k, ((&comm * &g[k]).trace() / (I * 4.0)).re);
                    d.set(i, j, k, ((&anti * &g[k]).trace() / 4.0).re);
                }
            }
        }
        (f, d)
    }

    #[test]
    fn d2_is_pauli() {
        let b = build_basis(2).unwrap();
        assert_eq!(b.len(), 3);
        let x = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let y = CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
        let z = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
        assert_eq!(b.generator(0), &x);
        assert_eq!(b.generator(1), &y);
        assert_eq!(b.generator(2), &z);
    }

    #[test]
    fn d3_diagonals() {
        let b = build_basis(3).unwrap();
        assert_eq!(b.len(), 8);
        let l7 = b.generator(6);
        let l8 = b.generator(7);
        let want7 = [1.0, -1.0, 0.0];
        let s = 1.0 / 3f64.sqrt();
        let want8 = [s, s, -2.0 * s];
        for k in 0..3 {
            assert!((l7[(k, k)] - C64::from(want7[k])).norm() < 1e-15);
            assert!((l8[(k, k)] - C64::from(want8[k])).norm() < 1e-15);
        }
        assert_eq!(b.diagonal_indices(), vec![6, 7]);
        assert_eq!(b.pair_indices()[0], (0, 1, 0, 3));
    }

    #[test]
    fn normalization_brute_force() {
        for d in 2..=6 {
            let b = build_basis(d).unwrap();
            assert_eq!(b.len(), d * d - 1);
            for (i, gi) in b.generators().iter().enumerate() {
                assert!(hermitian_residual(gi) == 0.0);
                assert!(trace(gi).norm() < 1e-14);
                for (j, gj) in b.generators().iter().enumerate() {
                    let want = if i == j { 2.0 } else { 0.0 };
                    assert!(((gi * gj).trace() - C64::from(want)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn rejects_small_d() {
        assert_eq!(build_basis(1).unwrap_err(), Error::InvalidDimension(1));
        assert!(build_basis(1).unwrap_err().to_string().contains("d must be ≥ 2"));
    }

    #[test]
    fn pauli_structure_constants() {
        let t = compute_structure_tensors(&build_basis(2).unwrap());
        assert!((t.f(0, 1, 2) - 1.0).abs() < 1e-15);
        assert!((t.f(1, 0, 2) + 1.0).abs() < 1e-15);
        assert_eq!(t.d_canonical().count(), 0);
        assert_eq!(t.f_canonical().count(), 1);
    }

    #[test]
    fn gell_mann_spot_values() {
        let b = build_basis(3).unwrap();
        let t = compute_structure_tensors(&b);
        let sym01 = b.index_of(GeneratorKind::Symmetric { p: 0, q: 1 }).unwrap();
        let anti01 = b.index_of(GeneratorKind::Antisymmetric { p: 0, q: 1 }).unwrap();
        let diag1 = b.index_of(GeneratorKind::Diagonal { m: 1 }).unwrap();
        let diag2 = b.index_of(GeneratorKind::Diagonal { m: 2 }).unwrap();
        // standard Gell-Mann f_123 = 1, f_147 = 1/2, d_118 = 1/sqrt(3)
        assert!((t.f(sym01, anti01, diag1) - 1.0).abs() < 1e-15);
        assert!((t.d_sym(sym01, sym01, diag2) - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        // canonical (0, 1, 2) is sym01, sym02, sym12: Gell-Mann (1, 4, 6), where
        // f vanishes and d_146 = 1/2
        assert_eq!(t.f(0, 1, 2), 0.0);
        assert!((t.d_sym(0, 1, 2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tensors_match_commutator_oracle() {
        for d in 2..=5 {
            let b = build_basis(d).unwrap();
            let t = compute_structure_tensors(&b);
            let (fo, dor) = oracle_tensors(&b);
            let (f, ds) = (t.dense_f(), t.dense_d());
            let n = b.len();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        assert!((f.get(i, j, k) - fo.get(i, j, k)).abs() < 1e-12);
                        assert!((ds.get(i, j, k) - dor.get(i, j, k)).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn commutator_reconstruction() {
        for d in 2..=4 {
            let b = build_basis(d).unwrap();
            let t = compute_structure_tensors(&b);
            let g = b.generators();
            for i in 0..b.len() {
                for j in 0..b.len() {
                    let mut rebuilt = CMatrix::zeros(d, d);
                    for k in 0..b.len() {
                        rebuilt += &g[k] * (I * 2.0 * t.f(i, j, k));
                    }
                    assert!(max_abs_diff(&commutator(&g[i], &g[j]), &rebuilt) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn d_trace_vanishes() {
        for d in 2..=5 {
            let t = compute_structure_tensors(&build_basis(d).unwrap());
            for k in 0..t.n_generators() {
                let s: f64 = (0..t.n_generators()).map(|i| t.d_sym(i, i, k)).sum();
                assert!(s.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn stored_entries_exceed_threshold() {
        let t = compute_structure_tensors(&build_basis(4).unwrap());
        assert!(t
            .f_canonical()
            .all(|(i, j, k, v)| i < j && j < k && v.abs() > SPARSITY_THRESHOLD));
        assert!(t
            .d_canonical()
            .all(|(i, j, k, v)| i <= j && j <= k && v.abs() > SPARSITY_THRESHOLD));
    }

    #[test]
    fn identities_pass_for_d3_and_d4() {
        for d in [3, 4] {
            let b = build_basis(d).unwrap();
            let t = compute_structure_tensors(&b);
            let reports = verify_identities(&t, &b, DEFAULT_IDENTITY_TOL).unwrap();
            assert_eq!(reports.len(), 11);
            for r in &reports {
                assert!(r.passed, "{r:?}");
            }
            if d == 3 {
                let ff = reports
                    .iter()
                    .find(|r| r.identity == IdentityName::FfContraction)
                    .unwrap();
                assert!((ff.max_lhs - 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dd_contraction_degenerate_for_d2() {
        let b = build_basis(2).unwrap();
        let t = compute_structure_tensors(&b);
        let reports = verify_identities(&t, &b, DEFAULT_IDENTITY_TOL).unwrap();
        let dd = reports
            .iter()
            .find(|r| r.identity == IdentityName::DdContraction)
            .unwrap();
        assert!(dd.passed);
        assert_eq!(dd.max_lhs, 0.0);
        assert_eq!(dd.max_residual, 0.0);
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let t = compute_structure_tensors(&build_basis(2).unwrap());
        let b = build_basis(3).unwrap();
        assert!(matches!(verify_identities(&t, &b, 1e-10), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn full_entries_expand_orbits() {
        let t = compute_structure_tensors(&build_basis(2).unwrap());
        let full = t.entries(TensorSymmetry::Antisymmetric, true);
        assert_eq!(full.entries.len(), 6);
        assert_eq!(full.entries[0], (0, 1, 2, 1.0));
        assert_eq!(full.entries[1], (0, 2, 1, -1.0));
        let json = serde_json::to_string(&t.entries(TensorSymmetry::Antisymmetric, false)).unwrap();
        assert_eq!(
            json,
            r#"{"d":2,"tensor":"f","symmetry":"antisymmetric","full":false,"entries":[[0,1,2,1.0]]}"#
        );
    }
}

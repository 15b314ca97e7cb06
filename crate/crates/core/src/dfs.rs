//! Noiseless-subsystem structure of `N` particles under collective errors.
//!
//! [`decompose`] splits `(C^d)^{⊗N}` into isotypic blocks of the algebra
//! generated by the collective operators `S_j`. Each block factors as
//! `C^m ⊗ C^n`: the collective operators act on the `n`-dimensional irrep
//! factor only, so the `m`-dimensional multiplicity factor is untouched by
//! collective noise. Block bases are stored copy-major: column `k * n + i` is
//! vector `i` of irrep copy `k`, so `S_j` restricted to a block is exactly
//! `1_m ⊗ A_j` and anything commuting with every `S_j` is `B ⊗ 1_n`.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{collective_j2, invariant_i2, invariant_i3};
use crate::linalg::{
    self, cluster_sorted, commutant, eigh, exp_hermitian, fix_phase, max_norm, project_onto_span, spectral_tol,
    CMatrix, CVector, C64, I, ZERO,
};
use crate::multiparticle::{commutes_with_all, hilbert_dim, CollectiveErrorSet, ManyBodyOperator};
use crate::su_basis::{build_basis, GeneratorBasis, StructureTensors};

/// Relative eigenvalue gap used to group Casimir eigenvalues.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// Components below this magnitude are skipped by the phase convention.
const PHASE_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct DecomposeOptions {
    /// Relative eigenvalue-gap tolerance for clustering (scaled by spectral radius).
    pub cluster_tol: f64,
    /// Seed for the generic element used in the commutant cross-check.
    pub seed: u64,
    /// Skip the commutant cross-check when it would need more unknowns.
    pub max_commutant_unknowns: usize,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            cluster_tol: DEFAULT_CLUSTER_TOL,
            seed: 0,
            max_commutant_unknowns: 1200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DfsBlock {
    pub block_id: usize,
    pub irrep_dim: usize,
    pub multiplicity: usize,
    /// Eigenvalue of `J2 = Σ S_j S_j` on the block.
    pub casimir_value: f64,
    /// Eigenvalues of the diagonal collective generators on the highest-weight vectors.
    pub highest_weight: Vec<f64>,
    /// Orthonormal `d^N × (m·n)` basis, copy-major.
    pub basis: CMatrix,
    /// Dimension of the commutant of the restricted algebra, when computed; equals `m²`.
    pub commutant_dim: Option<usize>,
    /// Total angular momentum `j` (qubits only; `J2 = 4 j (j + 1)`).
    pub j_label: Option<f64>,
    /// `m_z` per basis column (qubits only; `S_z = 2 m_z`).
    pub m_labels: Option<Vec<f64>>,
}

impl DfsBlock {
    pub fn dim(&self) -> usize {
        self.irrep_dim * self.multiplicity
    }

    /// Columns of irrep copy `k`.
    pub fn copy(&self, k: usize) -> CMatrix {
        self.basis.columns(k * self.irrep_dim, self.irrep_dim).into_owned()
    }

    /// Matrix of `op` in the block basis, `B† op B`.
    pub fn restrict(&self, op: &CMatrix) -> CMatrix {
        self.basis.adjoint() * op * &self.basis
    }

    /// Best fit of the restricted `op` by `L ⊗ 1_n` (action on the
    /// multiplicity factor only); returns `L` and the max-norm residual.
    pub fn logical_action(&self, op: &CMatrix) -> (CMatrix, f64) {
        let (n, m) = (self.irrep_dim, self.multiplicity);
        let r = self.restrict(op);
        let logical = CMatrix::from_fn(m, m, |k, l| {
            (0..n).map(|i| r[(k * n + i, l * n + i)]).sum::<C64>() / n as f64
        });
        let fitted = logical.kronecker(&CMatrix::identity(n, n));
        let res = linalg::max_abs_diff(&r, &fitted);
        (logical, res)
    }

    /// Best fit of the restricted `op` by `1_m ⊗ A` (action on the irrep
    /// factor only); returns `A` and the max-norm residual.
    pub fn irrep_action(&self, op: &CMatrix) -> (CMatrix, f64) {
        let (n, m) = (self.irrep_dim, self.multiplicity);
        let r = self.restrict(op);
        let action = CMatrix::from_fn(n, n, |i, ip| {
            (0..m).map(|k| r[(k * n + i, k * n + ip)]).sum::<C64>() / m as f64
        });
        let fitted = CMatrix::identity(m, m).kronecker(&action);
        let res = linalg::max_abs_diff(&r, &fitted);
        (action, res)
    }
}

#[derive(Debug, Clone)]
pub struct DfsDecomposition {
    pub d: usize,
    pub n_particles: usize,
    pub blocks: Vec<DfsBlock>,
}

impl DfsDecomposition {
    /// `Σ n·m` over blocks; equals `d^N`.
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(DfsBlock::dim).sum()
    }

    /// All block bases side by side, a unitary `d^N × d^N` matrix.
    pub fn assembled_basis(&self) -> CMatrix {
        let dim = self.blocks.first().map_or(0, |b| b.basis.nrows());
        let mut out = CMatrix::zeros(dim, self.total_dim());
        let mut col = 0;
        for b in &self.blocks {
            out.columns_mut(col, b.dim()).copy_from(&b.basis);
            col += b.dim();
        }
        out
    }

    pub fn orthonormality_residual(&self) -> f64 {
        linalg::orthonormality_residual(&self.assembled_basis())
    }

    /// Largest off-block entry of any `S_j` in the assembled basis.
    pub fn block_diagonality_residual(&self, set: &CollectiveErrorSet) -> f64 {
        let u = self.assembled_basis();
        let mut owner = Vec::with_capacity(u.ncols());
        for (id, b) in self.blocks.iter().enumerate() {
            owner.extend(std::iter::repeat_n(id, b.dim()));
        }
        let mut worst: f64 = 0.0;
        for s in set.operators() {
            let r = u.adjoint() * s.matrix() * &u;
            for i in 0..r.nrows() {
                for j in 0..r.ncols() {
                    if owner[i] != owner[j] {
                        worst = worst.max(r[(i, j)].norm());
                    }
                }
            }
        }
        worst
    }

    /// Blocks with multiplicity ≥ 2, i.e. those carrying a noiseless subsystem.
    pub fn noiseless_blocks(&self) -> impl Iterator<Item = &DfsBlock> {
        self.blocks.iter().filter(|b| b.multiplicity >= 2)
    }

    pub fn to_json(&self) -> DecompositionJson {
        DecompositionJson {
            d: self.d,
            n: self.n_particles,
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockJson {
                    id: b.block_id,
                    irrep_dim: b.irrep_dim,
                    multiplicity: b.multiplicity,
                    casimir_value: b.casimir_value,
                    highest_weight: b.highest_weight.clone(),
                    commutant_dim: b.commutant_dim,
                    j_label: b.j_label,
                    m_labels: b.m_labels.clone(),
                    basis: (0..b.basis.ncols())
                        .map(|c| b.basis.column(c).iter().map(|z| [z.re, z.im]).collect())
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub d: usize,
    pub n: usize,
    pub blocks: Vec<BlockJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockJson {
    pub id: usize,
    pub irrep_dim: usize,
    pub multiplicity: usize,
    pub casimir_value: f64,
    pub highest_weight: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub commutant_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub j_label: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m_labels: Option<Vec<f64>>,
    /// Basis vectors (copy-major), each a list of `[re, im]` components.
    pub basis: Vec<Vec<[f64; 2]>>,
}

/// Decomposes with default options and the given relative clustering tolerance.
pub fn decompose(set: &CollectiveErrorSet, tol: f64) -> Result<DfsDecomposition> {
    decompose_with(
        set,
        &DecomposeOptions {
            cluster_tol: tol,
            ..DecomposeOptions::default()
        },
    )
}

/// Simultaneously block-diagonalizes the collective operators.
///
/// 1. Eigenspaces of `J2` are clustered (ambiguous gaps are errors).
/// 2. In each eigenspace the joint kernel of the raising operators
///    `E_pq = (S_sym(p,q) + i S_anti(p,q)) / 2` holds one highest-weight
///    vector per irrep copy; grouping it by weight splits any accidental
///    Casimir degeneracy between inequivalent irreps.
/// 3. Each copy is generated from its highest-weight vector by lowering
///    operators. All copies are generated in lockstep with the
///    orthogonalization coefficients of the first, so the same intertwiner
///    relates every copy to the first and the block factorizes exactly.
/// 4. The commutant of the restricted algebra is solved for directly and
///    must have dimension `m²`.
pub fn decompose_with(set: &CollectiveErrorSet, opts: &DecomposeOptions) -> Result<DfsDecomposition> {
    if opts.cluster_tol.is_nan() || opts.cluster_tol <= 0.0 {
        return Err(Error::inconsistent("clustering tolerance must be positive"));
    }
    let d = set.local_dim();
    let n_particles = set.n_particles();
    let dim = hilbert_dim(d, n_particles)?;
    let basis = build_basis(d)?;
    if set.len() != basis.len() {
        return Err(Error::inconsistent(
            "collective set is not in canonical generator order",
        ));
    }
    let s: Vec<&CMatrix> = set.operators().iter().map(|o| o.matrix()).collect();
    let raising: Vec<CMatrix> = basis
        .pair_indices()
        .iter()
        .map(|&(_, _, sym, anti)| (s[sym] + s[anti] * I) * C64::from(0.5))
        .collect();
    let diagonal: Vec<&CMatrix> = basis.diagonal_indices().iter().map(|&k| s[k]).collect();
    let cartan_mix = diagonal
        .iter()
        .enumerate()
        .fold(CMatrix::zeros(dim, dim), |acc, (m, h)| {
            acc + *h * C64::from(1.0 / (m as f64 + SQRT_2))
        });

    let j2 = collective_j2(set)?;
    let eig = eigh(j2.operator.matrix());
    let clusters = cluster_sorted(&eig.values, spectral_tol(&eig.values, opts.cluster_tol))
        .map_err(|e| Error::Degeneracy(format!("J2 spectrum: {e}")))?;

    let mut blocks = Vec::new();
    for range in clusters {
        let casimir_value = eig.values[range.clone()].iter().sum::<f64>() / range.len() as f64;
        let w = eig.vectors.columns(range.start, range.len()).into_owned();
        let found = split_cluster(&w, &raising, &diagonal, &cartan_mix, opts.cluster_tol)?;
        let covered: usize = found.iter().map(|b| b.0.ncols()).sum();
        if covered != w.ncols() {
            return Err(Error::Degeneracy(format!(
                "J2 eigenspace {casimir_value} of dimension {} only accounts for {covered} dimensions \
                 from highest-weight vectors",
                w.ncols()
            )));
        }
        for (block_basis, irrep_dim, multiplicity, highest_weight) in found {
            blocks.push(DfsBlock {
                block_id: 0,
                irrep_dim,
                multiplicity,
                casimir_value,
                highest_weight,
                basis: block_basis,
                commutant_dim: None,
                j_label: None,
                m_labels: None,
            });
        }
    }

    for b in &mut blocks {
        let restricted: Vec<CMatrix> = s.iter().map(|m| b.restrict(m)).collect();
        if let Some(c) = commutant(&restricted, opts.seed, opts.max_commutant_unknowns)? {
            if c.dimension != b.multiplicity * b.multiplicity {
                return Err(Error::Degeneracy(format!(
                    "block with J2 = {} has multiplicity {} from highest weights but commutant \
                     dimension {}",
                    b.casimir_value, b.multiplicity, c.dimension
                )));
            }
            b.commutant_dim = Some(c.dimension);
        }
        if d == 2 {
            b.j_label = Some(((1.0 + b.casimir_value).sqrt() - 1.0) / 2.0);
            let sz = s[2];
            b.m_labels = Some(
                (0..b.basis.ncols())
                    .map(|c| {
                        let v = b.basis.column(c);
                        (v.adjoint() * sz * v)[(0, 0)].re / 2.0
                    })
                    .collect(),
            );
        }
    }

    blocks.sort_by(|a, b| {
        b.casimir_value
            .total_cmp(&a.casimir_value)
            .then_with(|| cmp_weights(&b.highest_weight, &a.highest_weight))
    });
    for (id, b) in blocks.iter_mut().enumerate() {
        b.block_id = id;
    }
    Ok(DfsDecomposition { d, n_particles, blocks })
}

fn cmp_weights(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

type FoundBlock = (CMatrix, usize, usize, Vec<f64>);

/// Splits one `J2` eigenspace (orthonormal columns `w`) into isotypic blocks.
fn split_cluster(
    w: &CMatrix,
    raising: &[CMatrix],
    diagonal: &[&CMatrix],
    cartan_mix: &CMatrix,
    tol: f64,
) -> Result<Vec<FoundBlock>> {
    let dim_w = w.ncols();
    let raise: Vec<CMatrix> = raising.iter().map(|e| w.adjoint() * e * w).collect();
    let lower: Vec<CMatrix> = raise.iter().map(|e| e.adjoint()).collect();

    let gram = raise
        .iter()
        .fold(CMatrix::zeros(dim_w, dim_w), |acc, e| acc + e.adjoint() * e);
    let g = eigh(&gram);
    let scale = g.values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let kernel_len = g.values.iter().take_while(|v| **v <= 1e-7 * scale).count();
    if let Some(v) = g.values.get(kernel_len) {
        if *v < 1e-3 * scale {
            return Err(Error::Degeneracy(format!(
                "raising-operator kernel is not separated: smallest nonzero eigenvalue {v:e}"
            )));
        }
    }
    if kernel_len == 0 {
        return Err(Error::Degeneracy("no highest-weight vector in J2 eigenspace".into()));
    }
    let kernel = g.vectors.columns(0, kernel_len).into_owned();

    // group highest-weight vectors by weight
    let mix = kernel.adjoint() * (w.adjoint() * cartan_mix * w) * &kernel;
    let weights = eigh(&mix);
    let groups = cluster_sorted(&weights.values, spectral_tol(&weights.values, tol))
        .map_err(|e| Error::Degeneracy(format!("highest weights: {e}")))?;

    let mut out = Vec::new();
    for grp in groups {
        let m = grp.len();
        let mut hw = &kernel * weights.vectors.columns(grp.start, m);
        for k in 0..m {
            // phase convention applied in full coordinates
            let mut full: CVector = w * hw.column(k);
            let phase = fix_phase(&mut full, PHASE_THRESHOLD);
            let col = hw.column(k) * phase;
            hw.column_mut(k).copy_from(&col);
        }
        let highest_weight = diagonal
            .iter()
            .map(|h| {
                let v: CVector = w * hw.column(0);
                (v.adjoint() * *h * &v)[(0, 0)].re
            })
            .collect();

        let copies = generate_copies(&hw, &lower);
        let n = copies.len();
        let mut block = CMatrix::zeros(w.nrows(), n * m);
        for k in 0..m {
            for (i, stacked) in copies.iter().enumerate() {
                let v: CVector = w * stacked.column(k);
                block.column_mut(k * n + i).copy_from(&v);
            }
        }
        out.push((block, n, m, highest_weight));
    }
    Ok(out)
}

/// Spans the irrep generated from the highest-weight columns of `hw` by the
/// lowering operators, in lockstep across all copies. Gram-Schmidt uses the
/// first copy's coefficients for every copy.
fn generate_copies(hw: &CMatrix, lower: &[CMatrix]) -> Vec<CMatrix> {
    let mut found: Vec<CMatrix> = vec![hw.clone()];
    let mut next = 0;
    while next < found.len() {
        for f in lower {
            let mut y = f * &found[next];
            for _ in 0..2 {
                for x in &found {
                    let c = x.column(0).dotc(&y.column(0));
                    if c != ZERO {
                        y -= x * c;
                    }
                }
            }
            let norm = y.column(0).norm();
            if norm > 1e-8 {
                y /= C64::from(norm);
                found.push(y);
            }
        }
        next += 1;
    }
    found
}

/// `C(n, k)` for the qubit multiplicity formula; zero for negative `k`.
pub fn binomial(n: u64, k: i64) -> u64 {
    if k < 0 || k as u64 > n {
        return 0;
    }
    let k = (k as u64).min(n - k as u64);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Multiplicity of total spin `j` in `N` qubits,
/// `C(N, N/2 - j) - C(N, N/2 - j - 1)`; `two_j` must have the parity of `N`.
pub fn qubit_multiplicity(n: u64, two_j: u64) -> u64 {
    let k = (n as i64 - two_j as i64) / 2;
    binomial(n, k) - binomial(n, k - 1)
}

/// Logical Paulis on three qudits built from the invariants:
/// `X̄ = (I2(1,2) − I2(0,2)) / 2√3`, `Ȳ = I3(0,1,2) / 2√3`,
/// `Z̄ = (I2(1,2) + I2(0,2) − 2 I2(0,1)) / 6` (0-based particles).
#[derive(Debug, Clone)]
pub struct LogicalOperators {
    pub d: usize,
    pub x_bar: ManyBodyOperator,
    pub y_bar: ManyBodyOperator,
    pub z_bar: ManyBodyOperator,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClosureFit {
    /// e.g. `"[X,Y]"`.
    pub commutator: String,
    /// Coefficients on `(X̄, Ȳ, Z̄, 1)` as `[re, im]`.
    pub coefficients: Vec<[f64; 2]>,
    pub residual: f64,
}

impl LogicalOperators {
    pub fn all(&self) -> [&ManyBodyOperator; 3] {
        [&self.x_bar, &self.y_bar, &self.z_bar]
    }

    /// Fits `[X̄,Ȳ]`, `[Ȳ,Z̄]`, `[Z̄,X̄]` onto `span{X̄, Ȳ, Z̄, 1}`.
    pub fn closure(&self) -> Vec<ClosureFit> {
        let dim = self.x_bar.dim();
        let id = CMatrix::identity(dim, dim);
        let span = [self.x_bar.matrix(), self.y_bar.matrix(), self.z_bar.matrix(), &id];
        [("[X,Y]", 0, 1), ("[Y,Z]", 1, 2), ("[Z,X]", 2, 0)]
            .into_iter()
            .map(|(name, a, b)| {
                let c = linalg::commutator(span[a], span[b]);
                let fit = project_onto_span(&c, &span, 1e-10);
                ClosureFit {
                    commutator: name.to_string(),
                    coefficients: fit.coefficients.iter().map(|z| [z.re, z.im]).collect(),
                    residual: fit.residual,
                }
            })
            .collect()
    }
}

pub fn logical_paulis(basis: &GeneratorBasis, tensors: &StructureTensors) -> Result<LogicalOperators> {
    const N: usize = 3;
    let d = basis.dim();
    let i01 = invariant_i2(basis, 0, 1, N)?.operator;
    let i02 = invariant_i2(basis, 0, 2, N)?.operator;
    let i12 = invariant_i2(basis, 1, 2, N)?.operator;
    let i3 = invariant_i3(tensors, basis, 0, 1, 2, N)?.operator;
    let norm = C64::from(1.0 / (2.0 * 3f64.sqrt()));
    let x_bar = ManyBodyOperator::combine(&[(norm, &i12), (-norm, &i02)], "Xbar")?;
    let y_bar = ManyBodyOperator::combine(&[(norm, &i3)], "Ybar")?;
    let sixth = C64::from(1.0 / 6.0);
    let z_bar = ManyBodyOperator::combine(&[(sixth, &i12), (sixth, &i02), (sixth * -2.0, &i01)], "Zbar")?;
    Ok(LogicalOperators { d, x_bar, y_bar, z_bar })
}

/// `U = exp[-i (π/4) I2(α,β)]` on `N` particles.
pub fn exchange_gate(
    basis: &GeneratorBasis,
    alpha: usize,
    beta: usize,
    n_particles: usize,
) -> Result<ManyBodyOperator> {
    let i2 = invariant_i2(basis, alpha, beta, n_particles)?;
    let u = exp_hermitian(i2.operator.matrix(), C64::new(0.0, -FRAC_PI_4));
    i2.operator.like(u, format!("exp(-i pi/4 I2^({alpha},{beta}))"))
}

/// The phase `-i e^{iπ/2d}` the exchange gate puts on a swapped pair.
pub fn expected_exchange_phase(d: usize) -> C64 {
    -I * C64::from_polar(1.0, PI / (2.0 * d as f64))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExchangeEntry {
    pub p: usize,
    pub q: usize,
    /// `⟨…q…p…|U|…p…q…⟩` as `[re, im]`.
    pub amplitude: [f64; 2],
    /// `|amplitude - (-i e^{iπ/2d})|`.
    pub phase_error: f64,
    /// Largest other entry in the column of `U` for the input state.
    pub off_column: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExchangeTable {
    pub d: usize,
    pub n: usize,
    pub alpha: usize,
    pub beta: usize,
    pub expected_phase: [f64; 2],
    pub entries: Vec<ExchangeEntry>,
}

impl ExchangeTable {
    /// Worst `(phase_error, off_column)` over pairs with `p ≠ q`.
    pub fn worst_swapped(&self) -> (f64, f64) {
        self.entries
            .iter()
            .filter(|e| e.p != e.q)
            .fold((0.0, 0.0), |(a, b), e| (a.max(e.phase_error), b.max(e.off_column)))
    }

    /// Worst `(phase_error, off_column)` over the diagonal `p = q` inputs.
    pub fn worst_diagonal(&self) -> (f64, f64) {
        self.entries
            .iter()
            .filter(|e| e.p == e.q)
            .fold((0.0, 0.0), |(a, b), e| (a.max(e.phase_error), b.max(e.off_column)))
    }
}

/// Applies the exchange gate to every `|p⟩_α |q⟩_β` (other particles in
/// `|0⟩`) and records the amplitude on the swapped state.
pub fn exchange_table(basis: &GeneratorBasis, alpha: usize, beta: usize, n_particles: usize) -> Result<ExchangeTable> {
    let d = basis.dim();
    let u = exchange_gate(basis, alpha, beta, n_particles)?;
    let stride = |site: usize| d.pow((n_particles - 1 - site) as u32);
    let want = expected_exchange_phase(d);
    let mut entries = Vec::new();
    for p in 0..d {
        for q in 0..d {
            let input = p * stride(alpha) + q * stride(beta);
            let output = q * stride(alpha) + p * stride(beta);
            let amp = u.matrix()[(output, input)];
            let off = (0..u.dim())
                .filter(|&r| r != output)
                .map(|r| u.matrix()[(r, input)].norm())
                .fold(0.0, f64::max);
            entries.push(ExchangeEntry {
                p,
                q,
                amplitude: [amp.re, amp.im],
                phase_error: (amp - want).norm(),
                off_column: off,
            });
        }
    }
    Ok(ExchangeTable {
        d,
        n: n_particles,
        alpha,
        beta,
        expected_phase: [want.re, want.im],
        entries,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockLeakage {
    pub block_id: usize,
    /// `‖(1 - P_b) H P_b‖_max`.
    pub leakage: f64,
    /// Residual of fitting `H` on the block by `L ⊗ 1_n`.
    pub factorization_residual: f64,
    /// Deviation of `H` on the block from a scalar.
    pub scalar_deviation: f64,
    pub preserved: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompatibilityReport {
    pub tol: f64,
    pub commutation_residual: f64,
    pub compatible: bool,
    /// `max_{b ≠ b'} ‖P_b H P_b'‖_max`.
    pub max_inter_block: f64,
    pub blocks: Vec<BlockLeakage>,
}

/// Checks `[H, S_j] = 0` and whether `H` keeps every block of `decomp` in place.
pub fn compatibility_check(
    h: &ManyBodyOperator,
    decomp: &DfsDecomposition,
    set: &CollectiveErrorSet,
    tol: f64,
) -> Result<CompatibilityReport> {
    let comm = commutes_with_all(h, set, tol)?;
    if decomp.d != h.local_dim() || decomp.n_particles != h.n_particles() {
        return Err(Error::inconsistent("decomposition is for a different system"));
    }
    let hm = h.matrix();
    let mut max_inter_block: f64 = 0.0;
    for (i, a) in decomp.blocks.iter().enumerate() {
        for (j, b) in decomp.blocks.iter().enumerate() {
            if i == j {
                continue;
            }
            let piece = &a.basis * (a.basis.adjoint() * hm * &b.basis) * b.basis.adjoint();
            max_inter_block = max_inter_block.max(max_norm(&piece));
        }
    }
    let blocks = decomp
        .blocks
        .iter()
        .map(|b| {
            let hb = hm * &b.basis;
            let inside = &b.basis * (b.basis.adjoint() * &hb);
            let leakage = max_norm(&((hb - inside) * b.basis.adjoint()));
            let (_, factorization_residual) = b.logical_action(hm);
            let r = b.restrict(hm);
            let c = r.trace() / C64::from(r.nrows() as f64);
            let scalar_deviation = linalg::max_abs_diff(&r, &(CMatrix::identity(r.nrows(), r.ncols()) * c));
            BlockLeakage {
                block_id: b.block_id,
                leakage,
                factorization_residual,
                scalar_deviation,
                preserved: leakage <= tol,
            }
        })
        .collect();
    Ok(CompatibilityReport {
        tol,
        commutation_residual: comm.max_residual,
        compatible: comm.commutes,
        max_inter_block,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiparticle::{collective_set, embed};
    use crate::su_basis::compute_structure_tensors;

    fn blocks_of(d: usize, n: usize) -> Vec<(usize, usize)> {
        let set = collective_set(&build_basis(d).unwrap(), n).unwrap();
        let dec = decompose(&set, DEFAULT_CLUSTER_TOL).unwrap();
        dec.blocks.iter().map(|b| (b.irrep_dim, b.multiplicity)).collect()
    }

    #[test]
    fn binomial_oracle() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(6, -1), 0);
        assert_eq!(qubit_multiplicity(3, 1), 2);
        assert_eq!(qubit_multiplicity(3, 3), 1);
        assert_eq!(qubit_multiplicity(6, 2), 9);
        assert_eq!(qubit_multiplicity(6, 0), 5);
    }

    #[test]
    fn two_qubits_singlet_triplet() {
        assert_eq!(blocks_of(2, 2), vec![(3, 1), (1, 1)]);
    }

    #[test]
    fn three_qubits_noiseless_qubit() {
        let set = collective_set(&build_basis(2).unwrap(), 3).unwrap();
        let dec = decompose(&set, DEFAULT_CLUSTER_TOL).unwrap();
        let got: Vec<_> = dec.blocks.iter().map(|b| (b.irrep_dim, b.multiplicity)).collect();
        assert_eq!(got, vec![(4, 1), (2, 2)]);
        assert_eq!(dec.noiseless_blocks().count(), 1);
        let half = &dec.blocks[1];
        assert!((half.j_label.unwrap() - 0.5).abs() < 1e-12);
        assert!((half.casimir_value - 3.0).abs() < 1e-10);
        assert_eq!(half.commutant_dim, Some(4));
        let m = half.m_labels.as_ref().unwrap();
        for (got, want) in m.iter().zip([0.5, -0.5, 0.5, -0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
        for s in set.operators() {
            let (_, res) = half.irrep_action(s.matrix());
            assert!(res < 1e-10);
        }
    }

    #[test]
    fn qutrit_blocks() {
        assert_eq!(blocks_of(3, 3), vec![(10, 1), (8, 2), (1, 1)]);
        assert_eq!(blocks_of(3, 2), vec![(6, 1), (3, 1)]);
    }

    #[test]
    fn structural_invariants() {
        for (d, n) in [(2, 4), (3, 3), (4, 2)] {
            let set = collective_set(&build_basis(d).unwrap(), n).unwrap();
            let dec = decompose(&set, DEFAULT_CLUSTER_TOL).unwrap();
            assert_eq!(dec.total_dim(), d.pow(n as u32));
            assert!(dec.orthonormality_residual() < 1e-10);
            assert!(dec.block_diagonality_residual(&set) < 1e-10);
        }
    }

    #[test]
    fn ambiguous_gap_is_reported() {
        let set = collective_set(&build_basis(2).unwrap(), 2).unwrap();
        // a tolerance this coarse puts the 0 / 8 gap in the ambiguous band
        let err = decompose(&set, 0.2).unwrap_err();
        assert!(matches!(err, Error::Degeneracy(_)));
    }

    #[test]
    fn logical_operators_three_qubits() {
        let b = build_basis(2).unwrap();
        let t = compute_structure_tensors(&b);
        let ops = logical_paulis(&b, &t).unwrap();
        let set = collective_set(&b, 3).unwrap();
        for op in ops.all() {
            assert!(commutes_with_all(op, &set, 1e-10).unwrap().commutes);
            assert!(op.is_hermitian(1e-12));
        }
        for fit in ops.closure() {
            assert!(fit.residual < 1e-8, "{fit:?}");
        }
        let dec = decompose(&set, DEFAULT_CLUSTER_TOL).unwrap();
        let half = &dec.blocks[1];
        for op in ops.all() {
            let (logical, res) = half.logical_action(op.matrix());
            assert!(res < 1e-8);
            assert!(max_norm(&logical) > 0.1);
        }
    }

    #[test]
    fn exchange_phases() {
        for d in 2..=3 {
            let table = exchange_table(&build_basis(d).unwrap(), 0, 1, 2).unwrap();
            let (phase, off) = table.worst_swapped();
            assert!(phase < 1e-10 && off < 1e-10);
            // p = q follows the same formula
            let (phase, off) = table.worst_diagonal();
            assert!(phase < 1e-10 && off < 1e-10);
        }
        assert!(matches!(
            exchange_gate(&build_basis(2).unwrap(), 1, 1, 2),
            Err(Error::RepeatedParticle(_))
        ));
    }

    #[test]
    fn compatibility_cases() {
        let b = build_basis(2).unwrap();
        let t = compute_structure_tensors(&b);
        let set = collective_set(&b, 3).unwrap();
        let dec = decompose(&set, DEFAULT_CLUSTER_TOL).unwrap();

        let x = logical_paulis(&b, &t).unwrap().x_bar;
        let rep = compatibility_check(&x, &dec, &set, 1e-10).unwrap();
        assert!(rep.compatible && rep.max_inter_block < 1e-10);
        assert!(rep.blocks.iter().all(|bl| bl.preserved));

        let sx = embed(b.generator(0), 0, 3).unwrap();
        let rep = compatibility_check(&sx, &dec, &set, 1e-10).unwrap();
        assert!(!rep.compatible && rep.max_inter_block > 0.1);

        let j2 = collective_j2(&set).unwrap().operator;
        let rep = compatibility_check(&j2, &dec, &set, 1e-10).unwrap();
        assert!(rep.compatible);
        assert!(rep.blocks.iter().all(|bl| bl.scalar_deviation < 1e-10));
    }
}

//! Casimir operators and the multi-particle invariants of collective motion.
//!
//! All invariants are built with coefficient exactly 1 on their defining
//! contraction ("unit-contraction" normalization):
//!
//! * `C2 = Σ λ_i λ_i`, `C3 = Σ d_ijk λ_i λ_j λ_k`, and the degree-`n` chain
//!   `Cn = Σ d_{i1 i2 k1} d_{k1 i3 k2} ⋯ d_{k_{n-3} i_{n-1} i_n} λ_{i1} ⋯ λ_{in}`
//! * `J2 = Σ_j S_j S_j`, `J3 = Σ f_ijk f_klm f_mni S_j S_l S_n`
//! * `I2(α,β) = Σ_i λ_i^(α) λ_i^(β)`
//! * `I3(α,β,γ) = Σ f_ijk λ_i^(α) λ_j^(β) λ_k^(γ)`
//! * `I4(α,β,γ) = Σ d_ijk λ_i^(α) λ_j^(β) λ_k^(γ)`

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, eigh, max_norm, project_onto_span, span_dimension, CMatrix, C64, I};
use crate::multiparticle::{
    commutes_with_all, embed_sites, hilbert_dim, CollectiveErrorSet, CommutationCheck, ManyBodyOperator,
};
use crate::su_basis::{GeneratorBasis, StructureTensors, Tensor3, TensorSymmetry};

pub const NORMALIZATION: &str = "unit-contraction";

/// Pseudo-inverse cutoff used by every span fit in this module.
const FIT_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InvariantKind {
    C2,
    C3,
    Cn(usize),
    J2,
    J3,
    I2,
    I3,
    I4,
}

impl fmt::Display for InvariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantKind::C2 => f.write_str("C2"),
            InvariantKind::C3 => f.write_str("C3"),
            InvariantKind::Cn(n) => write!(f, "C{n}"),
            InvariantKind::J2 => f.write_str("J2"),
            InvariantKind::J3 => f.write_str("J3"),
            InvariantKind::I2 => f.write_str("I2"),
            InvariantKind::I3 => f.write_str("I3"),
            InvariantKind::I4 => f.write_str("I4"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct InvariantOperator {
    pub kind: InvariantKind,
    /// Particles the operator couples; empty for a single-site Casimir.
    pub particles: Vec<usize>,
    pub operator: ManyBodyOperator,
    /// Polynomial degree in the generators.
    pub order: usize,
}

/// JSON shape for a constructed invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantJson {
    pub kind: String,
    pub particles: Vec<usize>,
    pub d: usize,
    pub n: usize,
    pub normalization: String,
    /// `"operator"`, or `"-i*operator"` for the anti-Hermitian `J3`.
    pub spectrum_of: String,
    pub spectrum: Vec<f64>,
    pub centrality_residual: f64,
}

impl InvariantOperator {
    pub fn centrality(&self, set: &CollectiveErrorSet, tol: f64) -> Result<CommutationCheck> {
        commutes_with_all(&self.operator, set, tol)
    }

    /// Ascending eigenvalues. Anti-Hermitian operators (only `J3`) are
    /// diagonalized as `-i * operator`.
    pub fn spectrum(&self) -> (Vec<f64>, &'static str) {
        let m = self.operator.matrix();
        let scale = max_norm(m).max(1.0);
        if linalg::hermitian_residual(m) <= 1e-10 * scale {
            (eigh(m).values, "operator")
        } else {
            (eigh(&(m * (-I))).values, "-i*operator")
        }
    }

    pub fn to_json(&self, set: &CollectiveErrorSet) -> Result<InvariantJson> {
        let (spectrum, spectrum_of) = self.spectrum();
        Ok(InvariantJson {
            kind: self.kind.to_string(),
            particles: self.particles.clone(),
            d: self.operator.local_dim(),
            n: self.operator.n_particles(),
            normalization: NORMALIZATION.to_string(),
            spectrum_of: spectrum_of.to_string(),
            spectrum,
            centrality_residual: self.centrality(set, f64::INFINITY)?.max_residual,
        })
    }
}

/// `Σ_i λ_i λ_i`; equals `2(d²-1)/d · 1` on the defining representation.
pub fn casimir_c2(basis: &GeneratorBasis) -> CMatrix {
    let d = basis.dim();
    basis
        .generators()
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, g| acc + g * g)
}

/// `Σ d_ijk λ_i λ_j λ_k`.
pub fn casimir_c3(basis: &GeneratorBasis, tensors: &StructureTensors) -> Result<CMatrix> {
    casimir_cn(basis, tensors, 3)
}

/// Degree-`n` Casimir from a chain of `n - 2` d-tensors, consecutive links
/// sharing one contracted index. `n = 2` is `Σ λ_i λ_i`.
pub fn casimir_cn(basis: &GeneratorBasis, tensors: &StructureTensors, n: usize) -> Result<CMatrix> {
    check_tensors(basis, tensors)?;
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    if n == 2 {
        return Ok(casimir_c2(basis));
    }
    let gens = basis.generators();
    let ng = basis.len();
    let d = basis.dim();
    let ds = tensors.dense_d();

    // W_k = Σ_ab d_abk λ_a λ_b, then W'_k' = Σ_{k,a} d_{k a k'} W_k λ_a
    let mut w: Vec<CMatrix> = (0..ng).map(|_| CMatrix::zeros(d, d)).collect();
    for (a, b, k, v) in tensors.entries(TensorSymmetry::Symmetric, true).entries {
        w[k] += (&gens[a] * &gens[b]) * C64::from(v);
    }
    for _ in 0..n - 3 {
        let mut next: Vec<CMatrix> = (0..ng).map(|_| CMatrix::zeros(d, d)).collect();
        for (k, wk) in w.iter().enumerate() {
            for (a, ga) in gens.iter().enumerate() {
                let prod = wk * ga;
                for (kp, slot) in next.iter_mut().enumerate() {
                    let c = ds.get(k, a, kp);
                    if c != 0.0 {
                        *slot += &prod * C64::from(c);
                    }
                }
            }
        }
        w = next;
    }
    Ok(w.iter()
        .zip(gens)
        .fold(CMatrix::zeros(d, d), |acc, (wk, gk)| acc + wk * gk))
}

fn check_tensors(basis: &GeneratorBasis, tensors: &StructureTensors) -> Result<()> {
    if basis.dim() != tensors.dim() {
        return Err(Error::inconsistent(format!(
            "basis for d={} used with structure tensors for d={}",
            basis.dim(),
            tensors.dim()
        )));
    }
    Ok(())
}

/// A single-particle Casimir placed on particle `alpha` of an `N`-particle
/// system (or on its own single site when `alpha` is `None`).
pub fn casimir_on_particle(
    basis: &GeneratorBasis,
    tensors: &StructureTensors,
    order: usize,
    alpha: Option<usize>,
    n_particles: usize,
) -> Result<InvariantOperator> {
    let local = casimir_cn(basis, tensors, order)?;
    let kind = match order {
        2 => InvariantKind::C2,
        3 => InvariantKind::C3,
        n => InvariantKind::Cn(n),
    };
    let d = basis.dim();
    let (operator, particles) = match alpha {
        Some(a) => (
            ManyBodyOperator::new(
                d,
                n_particles,
                embed_sites(&local, &[a], d, n_particles)?,
                format!("{kind}^({a}) [{NORMALIZATION}]"),
            )?,
            vec![a],
        ),
        None => (
            ManyBodyOperator::new(d, 1, local, format!("{kind} [{NORMALIZATION}]"))?,
            Vec::new(),
        ),
    };
    Ok(InvariantOperator {
        kind,
        particles,
        operator,
        order,
    })
}

/// `J2 = Σ_j S_j S_j`.
pub fn collective_j2(set: &CollectiveErrorSet) -> Result<InvariantOperator> {
    let dim = set.dim();
    let m = set
        .operators()
        .iter()
        .fold(CMatrix::zeros(dim, dim), |acc, s| acc + s.matrix() * s.matrix());
    Ok(InvariantOperator {
        kind: InvariantKind::J2,
        particles: (0..set.n_particles()).collect(),
        operator: ManyBodyOperator::new(
            set.local_dim(),
            set.n_particles(),
            m,
            format!("J2 = sum_j S_j S_j [{NORMALIZATION}]"),
        )?,
        order: 2,
    })
}

/// The factor `c` in `Σ f_ijk f_kli S_j S_l = c · Σ_j S_j S_j`, i.e. the
/// structure-constant normalization of `J2` relative to the unit one.
pub fn j2_structure_factor(tensors: &StructureTensors) -> f64 {
    let n = tensors.n_generators();
    let mut c = 0.0;
    for i in 0..n {
        for k in 0..n {
            c += tensors.f(i, 0, k) * tensors.f(k, 0, i);
        }
    }
    c
}

/// `T_jln = Σ_{ikm} f_ijk f_klm f_mni`, the coefficient tensor of `J3`.
pub fn j3_coefficients(tensors: &StructureTensors) -> Tensor3 {
    let f = tensors.dense_f();
    let n = tensors.n_generators();
    // (F_j)_{ik} = f_ijk, so T_jln = Tr(F_j F_l F_n)
    let slices: Vec<_> = (0..n).map(|j| f.middle_slice(j)).collect();
    let mut t = Tensor3::zeros(n);
    for j in 0..n {
        for l in 0..n {
            let fl = &slices[j] * &slices[l];
            for m in 0..n {
                t.set(j, l, m, fl.component_mul(&slices[m].transpose()).sum());
            }
        }
    }
    t
}

/// `J3 = Σ f_ijk f_klm f_mni S_j S_l S_n` (anti-Hermitian).
pub fn collective_j3(set: &CollectiveErrorSet, tensors: &StructureTensors) -> Result<InvariantOperator> {
    if tensors.dim() != set.local_dim() {
        return Err(Error::inconsistent("structure tensors for a different d"));
    }
    let t = j3_coefficients(tensors);
    let n = tensors.n_generators();
    let dim = set.dim();
    let s: Vec<&CMatrix> = set.operators().iter().map(|o| o.matrix()).collect();
    let mut m = CMatrix::zeros(dim, dim);
    for j in 0..n {
        for l in 0..n {
            let mut inner = CMatrix::zeros(dim, dim);
            for k in 0..n {
                let c = t.get(j, l, k);
                if c.abs() > 1e-14 {
                    inner += s[k] * C64::from(c);
                }
            }
            if max_norm(&inner) > 0.0 {
                m += s[j] * s[l] * inner;
            }
        }
    }
    Ok(InvariantOperator {
        kind: InvariantKind::J3,
        particles: (0..set.n_particles()).collect(),
        operator: ManyBodyOperator::new(
            set.local_dim(),
            set.n_particles(),
            m,
            format!("J3 = sum f_ijk f_klm f_mni S_j S_l S_n [{NORMALIZATION}]"),
        )?,
        order: 3,
    })
}

fn check_distinct(particles: &[usize], n_particles: usize) -> Result<()> {
    for (k, &p) in particles.iter().enumerate() {
        if p >= n_particles {
            return Err(Error::ParticleIndex { index: p, n_particles });
        }
        if particles[..k].contains(&p) {
            return Err(Error::RepeatedParticle(particles.to_vec()));
        }
    }
    Ok(())
}

/// `I2(α,β) = Σ_i λ_i^(α) λ_i^(β)`. Symmetric in `(α, β)`.
pub fn invariant_i2(
    basis: &GeneratorBasis,
    alpha: usize,
    beta: usize,
    n_particles: usize,
) -> Result<InvariantOperator> {
    let d = basis.dim();
    if n_particles < 2 {
        return Err(Error::InsufficientParticles {
            required: 2,
            got: n_particles,
        });
    }
    check_distinct(&[alpha, beta], n_particles)?;
    let local = basis
        .generators()
        .iter()
        .fold(CMatrix::zeros(d * d, d * d), |acc, g| acc + g.kronecker(g));
    let m = embed_sites(&local, &[alpha, beta], d, n_particles)?;
    Ok(InvariantOperator {
        kind: InvariantKind::I2,
        particles: vec![alpha, beta],
        operator: ManyBodyOperator::new(d, n_particles, m, format!("I2^({alpha},{beta}) [{NORMALIZATION}]"))?,
        order: 2,
    })
}

fn three_body(
    basis: &GeneratorBasis,
    tensors: &StructureTensors,
    which: TensorSymmetry,
    particles: [usize; 3],
    n_particles: usize,
) -> Result<CMatrix> {
    check_tensors(basis, tensors)?;
    if n_particles < 3 {
        return Err(Error::InsufficientParticles {
            required: 3,
            got: n_particles,
        });
    }
    check_distinct(&particles, n_particles)?;
    let d = basis.dim();
    let g = basis.generators();
    let dim3 = d * d * d;
    let mut local = CMatrix::zeros(dim3, dim3);
    for (i, j, k, v) in tensors.entries(which, true).entries {
        local += g[i].kronecker(&g[j]).kronecker(&g[k]) * C64::from(v);
    }
    embed_sites(&local, &particles, d, n_particles)
}

/// `I3(α,β,γ) = Σ f_ijk λ_i^(α) λ_j^(β) λ_k^(γ)`. Antisymmetric under
/// exchange of particle arguments.
pub fn invariant_i3(
    tensors: &StructureTensors,
    basis: &GeneratorBasis,
    alpha: usize,
    beta: usize,
    gamma: usize,
    n_particles: usize,
) -> Result<InvariantOperator> {
    let m = three_body(
        basis,
        tensors,
        TensorSymmetry::Antisymmetric,
        [alpha, beta, gamma],
        n_particles,
    )?;
    let residue = linalg::hermitian_residual(&m);
    if residue > 1e-12 * max_norm(&m).max(1.0) {
        return Err(Error::NotHermitian(residue));
    }
    Ok(InvariantOperator {
        kind: InvariantKind::I3,
        particles: vec![alpha, beta, gamma],
        operator: ManyBodyOperator::new(
            basis.dim(),
            n_particles,
            m,
            format!("I3^({alpha},{beta},{gamma}) [{NORMALIZATION}]"),
        )?,
        order: 3,
    })
}

/// `I4(α,β,γ) = Σ d_ijk λ_i^(α) λ_j^(β) λ_k^(γ)`. Symmetric under exchange
/// of particle arguments; identically zero for `d = 2`.
pub fn invariant_i4(
    tensors: &StructureTensors,
    basis: &GeneratorBasis,
    alpha: usize,
    beta: usize,
    gamma: usize,
    n_particles: usize,
) -> Result<InvariantOperator> {
    let m = three_body(
        basis,
        tensors,
        TensorSymmetry::Symmetric,
        [alpha, beta, gamma],
        n_particles,
    )?;
    Ok(InvariantOperator {
        kind: InvariantKind::I4,
        particles: vec![alpha, beta, gamma],
        operator: ManyBodyOperator::new(
            basis.dim(),
            n_particles,
            m,
            format!("I4^({alpha},{beta},{gamma}) [{NORMALIZATION}]"),
        )?,
        order: 3,
    })
}

/// Every I2, I3, I4 defined for `N` particles (I3/I4 only for `N ≥ 3`),
/// with particle tuples in increasing order.
pub fn all_invariants(
    basis: &GeneratorBasis,
    tensors: &StructureTensors,
    n_particles: usize,
) -> Result<Vec<InvariantOperator>> {
    let mut out = Vec::new();
    for a in 0..n_particles {
        for b in a + 1..n_particles {
            out.push(invariant_i2(basis, a, b, n_particles)?);
        }
    }
    for a in 0..n_particles {
        for b in a + 1..n_particles {
            for c in b + 1..n_particles {
                out.push(invariant_i3(tensors, basis, a, b, c, n_particles)?);
                out.push(invariant_i4(tensors, basis, a, b, c, n_particles)?);
            }
        }
    }
    Ok(out)
}

/// Pairwise `‖[A, B]‖_max` table. Invariants need not commute with each
/// other; this is reported, never asserted.
pub fn commutation_table(ops: &[InvariantOperator]) -> Vec<Vec<f64>> {
    ops.iter()
        .map(|a| {
            ops.iter()
                .map(|b| max_norm(&linalg::commutator(a.operator.matrix(), b.operator.matrix())))
                .collect()
        })
        .collect()
}

/// `‖J2 - Σ_α C2^(α) - 2 Σ_{α<β} I2(α,β)‖_max`.
pub fn j2_decomposition_residual(basis: &GeneratorBasis, set: &CollectiveErrorSet) -> Result<f64> {
    let n = set.n_particles();
    let d = basis.dim();
    let j2 = collective_j2(set)?;
    let c2 = casimir_c2(basis);
    let mut rebuilt = CMatrix::zeros(set.dim(), set.dim());
    for a in 0..n {
        rebuilt += embed_sites(&c2, &[a], d, n)?;
    }
    for a in 0..n {
        for b in a + 1..n {
            rebuilt += invariant_i2(basis, a, b, n)?.operator.matrix() * C64::from(2.0);
        }
    }
    Ok(linalg::max_abs_diff(j2.operator.matrix(), &rebuilt))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermClass {
    /// All three particle superscripts equal.
    AllSame,
    /// Exactly two superscripts equal.
    TwoSame,
    /// All three superscripts different.
    AllDifferent,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassFit {
    pub class: TermClass,
    /// Labels of the operators the class was fitted onto.
    pub span: Vec<String>,
    /// Fitted coefficients as `[re, im]`.
    pub coefficients: Vec<[f64; 2]>,
    pub fit_residual: f64,
    pub centrality_residual: f64,
    /// Max-norm of the class operator itself.
    pub magnitude: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct J3Decomposition {
    pub d: usize,
    pub n: usize,
    pub classes: Vec<ClassFit>,
    /// `‖J3 - Σ classes‖_max`, a consistency check on the expansion itself.
    pub reassembly_residual: f64,
}

impl J3Decomposition {
    pub fn max_fit_residual(&self) -> f64 {
        self.classes.iter().map(|c| c.fit_residual).fold(0.0, f64::max)
    }
}

/// Expands `J3` over particle superscripts, sorts the terms into the three
/// classes, and fits each class onto the span it is claimed to reduce to:
/// single-particle Casimirs, `{1, I2}`, and `{I3}` respectively.
pub fn verify_j3_decomposition(
    basis: &GeneratorBasis,
    tensors: &StructureTensors,
    n_particles: usize,
) -> Result<J3Decomposition> {
    check_tensors(basis, tensors)?;
    if n_particles < 3 {
        return Err(Error::InsufficientParticles {
            required: 3,
            got: n_particles,
        });
    }
    let d = basis.dim();
    let dim = hilbert_dim(d, n_particles)?;
    let set = crate::multiparticle::collective_set(basis, n_particles)?;
    let g = basis.generators();
    let ng = basis.len();
    let t = j3_coefficients(tensors);

    let d2 = d * d;
    let mut same = CMatrix::zeros(d, d);
    let mut ab_c = CMatrix::zeros(d2, d2); // λ_j^(a) λ_l^(a) λ_n^(c)
    let mut ac_b = CMatrix::zeros(d2, d2); // λ_j^(a) λ_l^(b) λ_n^(a)
    let mut a_bc = CMatrix::zeros(d2, d2); // λ_j^(a) λ_l^(b) λ_n^(b)
    let mut abc = CMatrix::zeros(d2 * d, d2 * d);
    for j in 0..ng {
        for l in 0..ng {
            for n in 0..ng {
                let c = t.get(j, l, n);
                if c.abs() <= 1e-14 {
                    continue;
                }
                let c = C64::from(c);
                same += &g[j] * &g[l] * &g[n] * c;
                ab_c += (&g[j] * &g[l]).kronecker(&g[n]) * c;
                ac_b += (&g[j] * &g[n]).kronecker(&g[l]) * c;
                a_bc += g[j].kronecker(&(&g[l] * &g[n])) * c;
                abc += g[j].kronecker(&g[l]).kronecker(&g[n]) * c;
            }
        }
    }

    let mut class_ops = [
        CMatrix::zeros(dim, dim),
        CMatrix::zeros(dim, dim),
        CMatrix::zeros(dim, dim),
    ];
    for a in 0..n_particles {
        for b in 0..n_particles {
            for c in 0..n_particles {
                let (slot, term) = if a == b && b == c {
                    (0, embed_sites(&same, &[a], d, n_particles)?)
                } else if a == b {
                    (1, embed_sites(&ab_c, &[a, c], d, n_particles)?)
                } else if a == c {
                    (1, embed_sites(&ac_b, &[a, b], d, n_particles)?)
                } else if b == c {
                    (1, embed_sites(&a_bc, &[a, b], d, n_particles)?)
                } else {
                    (2, embed_sites(&abc, &[a, b, c], d, n_particles)?)
                };
                class_ops[slot] += term;
            }
        }
    }

    let c2 = casimir_c2(basis);
    let mut casimirs = Vec::new();
    let mut pairs = vec![("I".to_string(), CMatrix::identity(dim, dim))];
    let mut triples = Vec::new();
    for a in 0..n_particles {
        casimirs.push((format!("C2^({a})"), embed_sites(&c2, &[a], d, n_particles)?));
        for b in a + 1..n_particles {
            let op = invariant_i2(basis, a, b, n_particles)?;
            pairs.push((op.operator.label().to_string(), op.operator.into_matrix()));
            for c in b + 1..n_particles {
                let op = invariant_i3(tensors, basis, a, b, c, n_particles)?;
                triples.push((op.operator.label().to_string(), op.operator.into_matrix()));
            }
        }
    }

    let j3 = collective_j3(&set, tensors)?;
    let total = class_ops.iter().fold(CMatrix::zeros(dim, dim), |acc, m| acc + m);
    let reassembly_residual = linalg::max_abs_diff(j3.operator.matrix(), &total);

    let classes = [TermClass::AllSame, TermClass::TwoSame, TermClass::AllDifferent]
        .into_iter()
        .zip(class_ops.iter())
        .zip([&casimirs, &pairs, &triples])
        .map(|((class, op), span)| {
            let refs: Vec<&CMatrix> = span.iter().map(|(_, m)| m).collect();
            let fit = project_onto_span(op, &refs, FIT_CUTOFF);
            let wrapped = ManyBodyOperator::new(d, n_particles, op.clone(), "class")?;
            Ok(ClassFit {
                class,
                span: span.iter().map(|(l, _)| l.clone()).collect(),
                coefficients: fit.coefficients.iter().map(|c| [c.re, c.im]).collect(),
                fit_residual: fit.residual,
                centrality_residual: commutes_with_all(&wrapped, &set, f64::INFINITY)?.max_residual,
                magnitude: max_norm(op),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(J3Decomposition {
        d,
        n: n_particles,
        classes,
        reassembly_residual,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub d: usize,
    pub n: usize,
    /// Dimension of `{X : [X, S_j] = 0 ∀j}`.
    pub commutant_dim: usize,
    /// Dimension of the span of `1`, the generators, and all their pairwise products.
    pub generated_dim: usize,
    pub generators: Vec<String>,
    pub complete: bool,
}

/// Compares the commutant of the collective algebra on three particles with
/// the algebra generated by `{1, I2 pairs, I3, I4}` up to degree 2.
pub fn completeness_probe(basis: &GeneratorBasis, tensors: &StructureTensors, seed: u64) -> Result<CompletenessReport> {
    const N: usize = 3;
    let set = crate::multiparticle::collective_set(basis, N)?;
    let commutant = linalg::commutant(&set.matrices(), seed, usize::MAX)?.expect("no unknown cap requested");

    let mut gens: Vec<InvariantOperator> = Vec::new();
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        gens.push(invariant_i2(basis, a, b, N)?);
    }
    gens.push(invariant_i3(tensors, basis, 0, 1, 2, N)?);
    gens.push(invariant_i4(tensors, basis, 0, 1, 2, N)?);

    let dim = set.dim();
    let mut spanning = vec![CMatrix::identity(dim, dim)];
    for g in &gens {
        spanning.push(g.operator.matrix().clone());
    }
    for a in &gens {
        for b in &gens {
            spanning.push(a.operator.matrix() * b.operator.matrix());
        }
    }
    let generated_dim = span_dimension(&spanning, FIT_CUTOFF);
    Ok(CompletenessReport {
        d: basis.dim(),
        n: N,
        commutant_dim: commutant.dimension,
        generated_dim,
        generators: gens.iter().map(|g| g.operator.label().to_string()).collect(),
        complete: generated_dim == commutant.dimension,
    })
}

/// Scalar `c` if `m ≈ c · 1` (max-norm deviation reported alongside).
pub fn scalar_part(m: &CMatrix) -> (C64, f64) {
    let n = m.nrows();
    let c = m.trace() / C64::from(n as f64);
    let dev = linalg::max_abs_diff(m, &(CMatrix::identity(n, n) * c));
    (c, dev)
}

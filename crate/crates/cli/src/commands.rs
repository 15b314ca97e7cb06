use casimir_core::dfs::{self, BlockLeakage, ClosureFit, DecompositionJson, ExchangeTable, DEFAULT_CLUSTER_TOL};
use casimir_core::invariants::{
    self, all_invariants, casimir_on_particle, collective_j2, collective_j3, completeness_probe, invariant_i2,
    invariant_i3, invariant_i4, CompletenessReport, InvariantJson, InvariantOperator,
};
use casimir_core::linalg::{max_norm, C64};
use casimir_core::multiparticle::OperatorJson;
use casimir_core::su_basis::{GeneratorKind, TensorJson, TensorSymmetry};
use casimir_core::{
    build_basis, collective_set, compatibility_check, compute_structure_tensors, decompose_with, embed,
    verify_identities, CollectiveErrorSet, DecomposeOptions, GeneratorBasis, IdentityReport, ManyBodyOperator,
    StructureTensors,
};
use clap::ValueEnum;
use serde::Serialize;

use crate::config::RunConfig;
use crate::failure::Failure;
use crate::output::{num, Report, Table};
use crate::selectors::{KindSpec, OpSpec};

/// Closure of the logical operators is checked at this fixed tolerance.
const CLOSURE_TOL: f64 = 1e-8;

fn algebra(cfg: &RunConfig) -> Result<(GeneratorBasis, StructureTensors), Failure> {
    let basis = build_basis(cfg.d)?;
    let tensors = compute_structure_tensors(&basis);
    Ok((basis, tensors))
}

fn matrix_rows(m: &casimir_core::CMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let re = m.row_iter().map(|r| r.iter().map(|z| z.re).collect()).collect();
    let im = m.row_iter().map(|r| r.iter().map(|z| z.im).collect()).collect();
    (re, im)
}

fn push_entries(table: &mut Table, label: String, m: &casimir_core::CMatrix, skip_zero: bool) {
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            if skip_zero && z == C64::new(0.0, 0.0) {
                continue;
            }
            table.push(vec![label.clone(), r.to_string(), c.to_string(), num(z.re), num(z.im)]);
        }
    }
}

#[derive(Serialize)]
struct GeneratorJson {
    index: usize,
    kind: GeneratorKind,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct BasisJson {
    d: usize,
    ordering: &'static str,
    generators: Vec<GeneratorJson>,
}

pub fn basis(cfg: &RunConfig) -> Result<Report, Failure> {
    let basis = build_basis(cfg.d)?;
    let mut table = Table::new(&["index", "row", "col", "re", "im"]);
    let mut generators = Vec::new();
    for (index, (g, kind)) in basis.generators().iter().zip(basis.kinds()).enumerate() {
        let (re, im) = matrix_rows(g);
        generators.push(GeneratorJson {
            index,
            kind: *kind,
            re,
            im,
        });
        push_entries(&mut table, index.to_string(), g, false);
    }
    Report::new(
        &BasisJson {
            d: cfg.d,
            ordering: basis.ordering_tag(),
            generators,
        },
        table,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TensorChoice {
    F,
    D,
    Both,
}

pub fn structure(cfg: &RunConfig, which: TensorChoice, full: bool) -> Result<Report, Failure> {
    let (_, tensors) = algebra(cfg)?;
    let wanted: &[TensorSymmetry] = match which {
        TensorChoice::F => &[TensorSymmetry::Antisymmetric],
        TensorChoice::D => &[TensorSymmetry::Symmetric],
        TensorChoice::Both => &[TensorSymmetry::Antisymmetric, TensorSymmetry::Symmetric],
    };
    let out: Vec<TensorJson> = wanted.iter().map(|w| tensors.entries(*w, full)).collect();
    let mut table = Table::new(&["tensor", "i", "j", "k", "value"]);
    for t in &out {
        for &(i, j, k, v) in &t.entries {
            table.push(vec![
                t.tensor.clone(),
                i.to_string(),
                j.to_string(),
                k.to_string(),
                num(v),
            ]);
        }
    }
    Report::new(&out, table)
}

#[derive(Serialize)]
struct VerifyJson {
    d: usize,
    tol: f64,
    passed: bool,
    reports: Vec<IdentityReport>,
}

pub fn verify(cfg: &RunConfig) -> Result<Report, Failure> {
    let (basis, tensors) = algebra(cfg)?;
    let reports = verify_identities(&tensors, &basis, cfg.tol)?;
    let passed = reports.iter().all(|r| r.passed);
    let mut table = Table::new(&["identity", "d", "max_residual", "max_lhs", "passed"]);
    for r in &reports {
        table.push(vec![
            r.identity.to_string(),
            r.d.to_string(),
            num(r.max_residual),
            num(r.max_lhs),
            r.passed.to_string(),
        ]);
    }
    let summary = reports
        .iter()
        .map(|r| {
            format!(
                "{:<18} {:>10.3e} {}",
                r.identity.as_str(),
                r.max_residual,
                if r.passed { "pass" } else { "FAIL" }
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Report::new(
        &VerifyJson {
            d: cfg.d,
            tol: cfg.tol,
            passed,
            reports,
        },
        table,
    )?
    .fail_if(!passed, || {
        format!("identity check failed at tol {:e}\n{summary}", cfg.tol)
    }))
}

#[derive(Serialize)]
struct CollectiveJson {
    d: usize,
    n: usize,
    lie_closure_residual: f64,
    max_hermitian_residual: f64,
    max_abs_trace: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    operators: Option<Vec<OperatorJson>>,
}

pub fn collective(cfg: &RunConfig, summary_only: bool) -> Result<Report, Failure> {
    let (basis, tensors) = algebra(cfg)?;
    let set = collective_set(&basis, cfg.n_particles)?;
    let lie = set.lie_closure_residual(&tensors)?;
    let herm = set
        .operators()
        .iter()
        .map(ManyBodyOperator::hermitian_residual)
        .fold(0.0, f64::max);
    let trace = set.operators().iter().map(|s| s.trace().norm()).fold(0.0, f64::max);
    let mut table = Table::new(&["operator", "row", "col", "re", "im"]);
    if !summary_only {
        for (j, s) in set.operators().iter().enumerate() {
            push_entries(&mut table, format!("S{j}"), s.matrix(), true);
        }
    }
    let passed = lie <= cfg.tol && herm <= cfg.tol && trace <= cfg.tol;
    Ok(Report::new(
        &CollectiveJson {
            d: cfg.d,
            n: cfg.n_particles,
            lie_closure_residual: lie,
            max_hermitian_residual: herm,
            max_abs_trace: trace,
            operators: (!summary_only).then(|| set.operators().iter().map(ManyBodyOperator::to_json).collect()),
        },
        table,
    )?
    .fail_if(!passed, || {
        format!("collective set check failed: lie closure {lie:e}, hermitian {herm:e}, trace {trace:e}")
    }))
}

#[derive(Serialize)]
struct InvariantEntry {
    #[serde(flatten)]
    invariant: InvariantJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    f_contraction_factor: Option<f64>,
}

#[derive(Serialize)]
struct InvariantsJson {
    d: usize,
    n: usize,
    tol: f64,
    invariants: Vec<InvariantEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    completeness: Option<CompletenessReport>,
}

fn build_invariant(
    spec: &KindSpec,
    basis: &GeneratorBasis,
    tensors: &StructureTensors,
    set: &CollectiveErrorSet,
) -> Result<InvariantOperator, Failure> {
    let n = set.n_particles();
    let need = |k: usize| {
        if n < k {
            Err(Failure::Invalid(format!(
                "{spec:?} needs at least {k} particles, got n = {n}"
            )))
        } else {
            Ok(())
        }
    };
    Ok(match *spec {
        KindSpec::I2(a, b) => {
            need(2)?;
            invariant_i2(basis, a, b, n)?
        }
        KindSpec::I3(a, b, c) => {
            need(3)?;
            invariant_i3(tensors, basis, a, b, c, n)?
        }
        KindSpec::I4(a, b, c) => {
            need(3)?;
            invariant_i4(tensors, basis, a, b, c, n)?
        }
        KindSpec::J2 => collective_j2(set)?,
        KindSpec::J3 => collective_j3(set, tensors)?,
        KindSpec::Casimir { order, particle } => casimir_on_particle(basis, tensors, order, particle, n)?,
    })
}

pub fn invariants(cfg: &RunConfig, kinds: &[KindSpec], completeness: bool) -> Result<Report, Failure> {
    if completeness {
        cfg.require_particles(3, "the completeness probe")?;
        if cfg.n_particles != 3 {
            return Err(Failure::Invalid(
                "the completeness probe runs on exactly 3 particles".into(),
            ));
        }
    }
    let (basis, tensors) = algebra(cfg)?;
    let set = collective_set(&basis, cfg.n_particles)?;
    let single = collective_set(&basis, 1)?;

    let ops: Vec<InvariantOperator> = if kinds.is_empty() {
        let mut v = all_invariants(&basis, &tensors, cfg.n_particles)?;
        v.push(collective_j2(&set)?);
        v
    } else {
        kinds
            .iter()
            .map(|k| build_invariant(k, &basis, &tensors, &set))
            .collect::<Result<_, _>>()?
    };

    let mut entries = Vec::new();
    let mut table = Table::new(&[
        "kind",
        "particles",
        "spectrum_of",
        "centrality_residual",
        "index",
        "eigenvalue",
    ]);
    let mut worst: f64 = 0.0;
    for op in &ops {
        let against = if op.operator.n_particles() == set.n_particles() {
            &set
        } else {
            &single
        };
        let json = op.to_json(against)?;
        worst = worst.max(json.centrality_residual);
        let particles = json
            .particles
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        for (i, e) in json.spectrum.iter().enumerate() {
            table.push(vec![
                json.kind.clone(),
                particles.clone(),
                json.spectrum_of.clone(),
                num(json.centrality_residual),
                i.to_string(),
                num(*e),
            ]);
        }
        let f_contraction_factor =
            (op.kind == casimir_core::InvariantKind::J2).then(|| invariants::j2_structure_factor(&tensors));
        entries.push(InvariantEntry {
            invariant: json,
            f_contraction_factor,
        });
    }
    let completeness = completeness
        .then(|| completeness_probe(&basis, &tensors, cfg.seed))
        .transpose()?;
    let incomplete = completeness.as_ref().is_some_and(|c| !c.complete);
    let (cdim, gdim) = completeness
        .as_ref()
        .map_or((0, 0), |c| (c.commutant_dim, c.generated_dim));
    Ok(Report::new(
        &InvariantsJson {
            d: cfg.d,
            n: cfg.n_particles,
            tol: cfg.tol,
            invariants: entries,
            completeness,
        },
        table,
    )?
    .fail_if(worst > cfg.tol, || {
        format!("centrality residual {worst:e} exceeds tol {:e}", cfg.tol)
    })
    .fail_if(incomplete, || {
        format!("completeness probe: commutant dimension {cdim} but generated dimension {gdim}")
    }))
}

fn decomposition(
    cfg: &RunConfig,
    set: &CollectiveErrorSet,
    cluster_tol: f64,
) -> Result<dfs::DfsDecomposition, Failure> {
    Ok(decompose_with(
        set,
        &DecomposeOptions {
            cluster_tol,
            seed: cfg.seed,
            ..DecomposeOptions::default()
        },
    )?)
}

#[derive(Serialize)]
struct LogicalOperatorReport {
    name: &'static str,
    commutation_residual: f64,
    max_inter_block: f64,
    max_factorization_residual: f64,
}

#[derive(Serialize)]
struct LogicalJson {
    closure_tol: f64,
    closure: Vec<ClosureFit>,
    operators: Vec<LogicalOperatorReport>,
}

#[derive(Serialize)]
struct DfsJson {
    #[serde(flatten)]
    decomposition: DecompositionJson,
    orthonormality_residual: f64,
    block_diagonality_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    logical: Option<LogicalJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exchange: Option<ExchangeTable>,
}

pub fn dfs(cfg: &RunConfig, cluster_tol: f64) -> Result<Report, Failure> {
    let (basis, tensors) = algebra(cfg)?;
    let set = collective_set(&basis, cfg.n_particles)?;
    let dec = decomposition(cfg, &set, cluster_tol)?;
    let ortho = dec.orthonormality_residual();
    let blockdiag = dec.block_diagonality_residual(&set);
    let mut problems = Vec::new();
    if ortho > cfg.tol {
        problems.push(format!("orthonormality residual {ortho:e}"));
    }
    if blockdiag > cfg.tol {
        problems.push(format!("block-diagonality residual {blockdiag:e}"));
    }

    let (logical, exchange) = if cfg.n_particles == 3 {
        let ops = dfs::logical_paulis(&basis, &tensors)?;
        let closure = ops.closure();
        for fit in &closure {
            if fit.residual > CLOSURE_TOL {
                problems.push(format!("closure {} residual {:e}", fit.commutator, fit.residual));
            }
        }
        let mut reports = Vec::new();
        for (name, op) in ["Xbar", "Ybar", "Zbar"].into_iter().zip(ops.all()) {
            let rep = compatibility_check(op, &dec, &set, cfg.tol)?;
            let fact = rep.blocks.iter().map(|b| b.factorization_residual).fold(0.0, f64::max);
            if !rep.compatible || rep.max_inter_block > cfg.tol || fact > CLOSURE_TOL {
                problems.push(format!(
                    "{name}: commutation {:e}, inter-block {:e}, factorization {fact:e}",
                    rep.commutation_residual, rep.max_inter_block
                ));
            }
            reports.push(LogicalOperatorReport {
                name,
                commutation_residual: rep.commutation_residual,
                max_inter_block: rep.max_inter_block,
                max_factorization_residual: fact,
            });
        }
        let table = dfs::exchange_table(&basis, 0, 1, 3)?;
        let (phase, off) = table.worst_swapped();
        if phase > cfg.tol || off > cfg.tol {
            problems.push(format!("exchange gate: phase error {phase:e}, off-column {off:e}"));
        }
        (
            Some(LogicalJson {
                closure_tol: CLOSURE_TOL,
                closure,
                operators: reports,
            }),
            Some(table),
        )
    } else {
        (None, None)
    };

    let mut table = Table::new(&[
        "block",
        "irrep_dim",
        "multiplicity",
        "casimir_value",
        "j_label",
        "vector",
        "m_label",
        "component",
        "re",
        "im",
    ]);
    for b in &dec.blocks {
        let j = b.j_label.map(num).unwrap_or_default();
        for v in 0..b.basis.ncols() {
            let m = b.m_labels.as_ref().map(|m| num(m[v])).unwrap_or_default();
            for (c, z) in b.basis.column(v).iter().enumerate() {
                table.push(vec![
                    b.block_id.to_string(),
                    b.irrep_dim.to_string(),
                    b.multiplicity.to_string(),
                    num(b.casimir_value),
                    j.clone(),
                    v.to_string(),
                    m.clone(),
                    c.to_string(),
                    num(z.re),
                    num(z.im),
                ]);
            }
        }
    }
    Ok(Report::new(
        &DfsJson {
            decomposition: dec.to_json(),
            orthonormality_residual: ortho,
            block_diagonality_residual: blockdiag,
            logical,
            exchange,
        },
        table,
    )?
    .fail_if(!problems.is_empty(), || problems.join("\n")))
}

pub fn exchange(cfg: &RunConfig, alpha: usize, beta: usize) -> Result<Report, Failure> {
    cfg.require_particles(2, "the exchange gate")?;
    let basis = build_basis(cfg.d)?;
    let t = dfs::exchange_table(&basis, alpha, beta, cfg.n_particles)?;
    let mut table = Table::new(&["p", "q", "amplitude_re", "amplitude_im", "phase_error", "off_column"]);
    for e in &t.entries {
        table.push(vec![
            e.p.to_string(),
            e.q.to_string(),
            num(e.amplitude[0]),
            num(e.amplitude[1]),
            num(e.phase_error),
            num(e.off_column),
        ]);
    }
    let (phase, off) = t.worst_swapped();
    Ok(Report::new(&t, table)?.fail_if(phase > cfg.tol || off > cfg.tol, || {
        format!(
            "exchange gate: phase error {phase:e}, off-column {off:e} (tol {:e})",
            cfg.tol
        )
    }))
}

fn build_op(
    spec: &OpSpec,
    basis: &GeneratorBasis,
    tensors: &StructureTensors,
    set: &CollectiveErrorSet,
) -> Result<ManyBodyOperator, Failure> {
    let n = set.n_particles();
    let logical = |pick: usize| -> Result<ManyBodyOperator, Failure> {
        if n != 3 {
            return Err(Failure::Invalid(format!("logical operators need n = 3, got {n}")));
        }
        let ops = dfs::logical_paulis(basis, tensors)?;
        Ok(ops.all()[pick].clone())
    };
    Ok(match *spec {
        OpSpec::XBar => logical(0)?,
        OpSpec::YBar => logical(1)?,
        OpSpec::ZBar => logical(2)?,
        OpSpec::J2 => collective_j2(set)?.operator,
        OpSpec::I2(a, b) => invariant_i2(basis, a, b, n)?.operator,
        OpSpec::I3(a, b, c) => invariant_i3(tensors, basis, a, b, c, n)?.operator,
        OpSpec::I4(a, b, c) => invariant_i4(tensors, basis, a, b, c, n)?.operator,
        OpSpec::Collective(j) => {
            if j >= set.len() {
                return Err(Failure::Invalid(format!(
                    "generator index {j} out of range 0..{}",
                    set.len()
                )));
            }
            set.get(j).clone()
        }
        OpSpec::Local { generator, particle } => {
            if generator >= basis.len() {
                return Err(Failure::Invalid(format!(
                    "generator index {generator} out of range 0..{}",
                    basis.len()
                )));
            }
            embed(basis.generator(generator), particle, n)?
        }
    })
}

#[derive(Serialize)]
struct CompatJson {
    operator: String,
    d: usize,
    n: usize,
    tol: f64,
    commutation_residual: f64,
    compatible: bool,
    max_inter_block: f64,
    operator_norm: f64,
    blocks: Vec<BlockLeakage>,
}

pub fn compat(cfg: &RunConfig, op: &OpSpec, cluster_tol: f64) -> Result<Report, Failure> {
    let (basis, tensors) = algebra(cfg)?;
    let set = collective_set(&basis, cfg.n_particles)?;
    let h = build_op(op, &basis, &tensors, &set)?;
    let dec = decomposition(cfg, &set, cluster_tol)?;
    let rep = compatibility_check(&h, &dec, &set, cfg.tol)?;
    let mut table = Table::new(&[
        "block",
        "commutation_residual",
        "max_inter_block",
        "leakage",
        "factorization_residual",
        "scalar_deviation",
        "preserved",
    ]);
    for b in &rep.blocks {
        table.push(vec![
            b.block_id.to_string(),
            num(rep.commutation_residual),
            num(rep.max_inter_block),
            num(b.leakage),
            num(b.factorization_residual),
            num(b.scalar_deviation),
            b.preserved.to_string(),
        ]);
    }
    let leaks_anyway = rep.compatible && rep.max_inter_block > cfg.tol;
    let (comm, inter) = (rep.commutation_residual, rep.max_inter_block);
    Ok(Report::new(
        &CompatJson {
            operator: h.label().to_string(),
            d: cfg.d,
            n: cfg.n_particles,
            tol: cfg.tol,
            commutation_residual: rep.commutation_residual,
            compatible: rep.compatible,
            max_inter_block: rep.max_inter_block,
            operator_norm: max_norm(h.matrix()),
            blocks: rep.blocks,
        },
        table,
    )?
    .fail_if(!rep.compatible, || {
        format!("operator does not commute with the collective set: residual {comm:e}, inter-block {inter:e}")
    })
    .fail_if(leaks_anyway, || {
        format!("commuting operator still couples blocks: {inter:e}")
    }))
}

pub const DEFAULT_DFS_CLUSTER_TOL: f64 = DEFAULT_CLUSTER_TOL;

//! SU(d) generator algebra, collective operators on `N` qudits, their
//! invariants, and the noiseless-subsystem structure they induce.
//!
//! Indices are 0-based everywhere. Particle 0 is the leftmost Kronecker factor.

pub mod dfs;
pub mod error;
pub mod invariants;
pub mod linalg;
pub mod multiparticle;
pub mod su_basis;

pub use dfs::{
    compatibility_check, decompose, decompose_with, exchange_gate, exchange_table, logical_paulis, CompatibilityReport,
    DecomposeOptions, DfsBlock, DfsDecomposition, ExchangeTable, LogicalOperators,
};
pub use error::{Error, Result};
pub use invariants::{InvariantKind, InvariantOperator};
pub use linalg::{CMatrix, CVector, C64};
pub use multiparticle::{collective_set, embed, CollectiveErrorSet, ManyBodyOperator, DENSE_CAP};
pub use su_basis::{
    build_basis, compute_structure_tensors, verify_identities, GeneratorBasis, IdentityName, IdentityReport,
    StructureTensors,
};

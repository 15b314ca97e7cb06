use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("d must be ≥ 2, got {0}")]
    InvalidDimension(usize),

    #[error("Casimir order must be ≥ 2, got {0}")]
    InvalidOrder(usize),

    #[error("particle index {index} out of range for {n_particles} particle(s)")]
    ParticleIndex { index: usize, n_particles: usize },

    #[error("particle indices must be pairwise distinct, got {0:?}")]
    RepeatedParticle(Vec<usize>),

    #[error("need at least {required} particles, got {got}")]
    InsufficientParticles { required: usize, got: usize },

    #[error("Hilbert space dimension {d}^{n_particles} exceeds the dense cap of {cap}")]
    DenseCap { d: usize, n_particles: usize, cap: usize },

    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),

    #[error("operator is not Hermitian (anti-Hermitian residue {0:e})")]
    NotHermitian(f64),

    #[error("degeneracy resolution failed: {0}")]
    Degeneracy(String),
}

impl Error {
    pub(crate) fn inconsistent(msg: impl Into<String>) -> Self {
        Error::Inconsistent(msg.into())
    }
}

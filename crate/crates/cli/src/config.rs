use std::path::PathBuf;

use casimir_core::multiparticle::DENSE_CAP;
use clap::ValueEnum;

use crate::failure::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Validated settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub d: usize,
    pub n_particles: usize,
    pub tol: f64,
    pub format: Format,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(
        d: Option<usize>,
        n_particles: usize,
        tol: f64,
        format: Format,
        seed: u64,
        output_path: Option<PathBuf>,
    ) -> Result<Self, Failure> {
        let d = d.ok_or_else(|| Failure::Invalid("--d is required".into()))?;
        if d < 2 {
            return Err(Failure::Invalid(format!("d must be ≥ 2, got {d}")));
        }
        if n_particles < 1 {
            return Err(Failure::Invalid("n must be ≥ 1".into()));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Failure::Invalid(format!("tol must be positive and finite, got {tol}")));
        }
        match d.checked_pow(n_particles as u32) {
            Some(dim) if dim <= DENSE_CAP => {}
            _ => {
                return Err(Failure::Invalid(format!(
                    "d^n = {d}^{n_particles} exceeds the dense cap of {DENSE_CAP}"
                )))
            }
        }
        Ok(Self {
            d,
            n_particles,
            tol,
            format,
            seed,
            output_path,
        })
    }

    pub fn require_particles(&self, required: usize, what: &str) -> Result<(), Failure> {
        if self.n_particles < required {
            return Err(Failure::Invalid(format!(
                "{what} needs at least {required} particles, got n = {}",
                self.n_particles
            )));
        }
        Ok(())
    }
}

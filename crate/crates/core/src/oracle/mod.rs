//! Exact-diagonalization oracle on the full `2^N` spin space.
//!
//! Everything here is brute force on purpose: it is the ground truth the
//! free-fermion formulas are checked against, so nothing in it relies on the
//! single-particle picture.

mod chain;
mod fermions;
pub mod hidden_variable;
mod operator;

pub use chain::{
    build_hamiltonian, conditional_probability, fermionic_hamiltonian, i_ch_oracle,
    i_ch_prime_oracle, initial_state, local_projector, observable_operator, pair_contraction_check,
    projected_state, projector_operator, resolve_convention, vacuum_contractions, AliceSetting,
    BobSetting, ChainOracle, ConjectureReport, ConventionProbe, Evolution, Outcome,
    ProbabilityTable, VacuumContractions,
};
pub use fermions::{jordan_wigner, pauli, FermionSet, Pauli};
pub use operator::{DenseOperator, StateVector};

use crate::error::{Error, Result};

/// Default largest chain the oracle accepts.
pub const DEFAULT_MAX_SITES: usize = 10;
/// Absolute ceiling, reachable only through [`OracleLimits::with_override`].
pub const HARD_MAX_SITES: usize = 12;

/// Size guard for the dense oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    max_sites: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_sites: DEFAULT_MAX_SITES,
        }
    }
}

impl OracleLimits {
    /// Cap at or below the default.
    pub fn new(max_sites: usize) -> Result<Self> {
        if max_sites > DEFAULT_MAX_SITES {
            return Err(Error::OracleCap {
                requested: max_sites,
                cap: DEFAULT_MAX_SITES,
                hard_max: HARD_MAX_SITES,
            });
        }
        Ok(Self { max_sites })
    }

    /// Raises the cap up to [`HARD_MAX_SITES`].
    pub fn with_override(max_sites: usize) -> Result<Self> {
        if max_sites > HARD_MAX_SITES {
            return Err(Error::OracleCap {
                requested: max_sites,
                cap: max_sites,
                hard_max: HARD_MAX_SITES,
            });
        }
        Ok(Self { max_sites })
    }

    pub fn max_sites(&self) -> usize {
        self.max_sites
    }

    pub fn check(&self, n_sites: usize) -> Result<()> {
        if n_sites > self.max_sites {
            return Err(Error::OracleCap {
                requested: n_sites,
                cap: self.max_sites,
                hard_max: HARD_MAX_SITES,
            });
        }
        Ok(())
    }
}

/// Rough peak memory of a [`ChainOracle`] with its fermions built: the
/// Hamiltonian, N annihilation operators, a couple of temporaries and the
/// real eigenvector matrix.
pub fn memory_estimate_bytes(n_sites: usize) -> u64 {
    let dim = 1u64 << n_sites;
    let complex_ops = n_sites as u64 + 4;
    dim * dim * (16 * complex_ops + 8)
}

//! Temporal Clauser-Horne correlations between the two ends of an XX
//! chain in a transverse field.
//!
//! The chain maps to free fermions, so the CH functional only needs the
//! single-particle propagator between the end sites. [`oracle`] rebuilds
//! everything by exact diagonalization of the spin chain for small `N`.

pub mod error;
pub mod inequality;
pub mod oracle;
pub mod propagator;
pub mod spectral;

pub use error::{Error, Result};
pub use inequality::{
    curvature_at_zero, find_violations, find_violations_with, i_ch_closed_form, sample_curve,
    t_star_estimate, t_star_numeric, uniform_grid, AnalysisOptions, ChComponents, ChCurve,
    ChFunctional, Interval, Peak, ViolationReport, CLASSICAL_BOUND, I_CH_AT_ZERO,
};
pub use propagator::{propagator_entry, propagator_matrix, Propagator, PropagatorMatrix};
pub use spectral::{
    build_modes, chebyshev_u, eigenbasis, group_velocity, ChainParams, Convention, Mode,
    SingleParticleBasis,
};

//! Many-particle quantum walks of bosons, fermions and distinguishable
//! particles on a beam-splitter array.
//!
//! The crate builds the lattice evolution matrix, evaluates arbitrary
//! multi-mode particle-number correlators through permanents (bosons) and
//! determinants (fermions), and turns falling-factorial moments into
//! single- and two-mode counting statistics. Distinguishable particles are
//! handled by exact convolution of independent single-particle walks, and
//! a brute-force Fock-space expansion serves as a reference for small
//! systems.
//!
//! ```
//! use qwalk_core::{evolution, single_mode_distribution, LatticeConfig, OccupationVector, Species};
//!
//! let w = evolution(LatticeConfig::new(4, 3)?)?;
//! let r = OccupationVector::central_block(8, 2, Species::Boson)?;
//! let p = single_mode_distribution(&w, &r, 4)?;
//! assert!((p.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-12);
//! # Ok::<(), qwalk_core::WalkError>(())
//! ```

pub use num_complex::Complex64;

pub mod combinatorics;
pub mod correlator;
pub mod distinguishable;
pub mod error;
pub mod exec;
pub mod kernels;
pub mod lattice;
pub mod oracle;
pub mod statistics;

pub use combinatorics::{
    enumerate_sources, factorial, falling_factorial, multiplicity_prefactor, multiset_permutation_count,
    OccupationVector, SourceMultiset, Species, MAX_PARTICLES,
};
pub use correlator::{
    coherent_sum_kernel, general_correlator, general_correlator_with, mean_occupation, two_mode_correlator,
    CorrelatorResult, ModeTuple,
};
pub use distinguishable::{joint_counting_distribution, single_mode_statistics, single_particle_distribution, ParticleRoster};
pub use error::{Result, WalkError};
pub use exec::Execution;
pub use lattice::{even_step, evolution, odd_step, single_beam_splitter, LatticeConfig, UnitaryMatrix};
pub use oracle::{expand_final_state, oracle_correlator, oracle_counting, FockExpansion};
pub use statistics::{
    average_conditionals, conditional_imbalance, invert_single, invert_two, pair_averaged_statistics,
    pair_averaged_statistics_with, single_mode_distribution, single_mode_distribution_with, single_mode_moments,
    two_mode_distribution, two_mode_distribution_with, two_mode_moments, CountingDistribution,
    ImbalanceDistribution, MomentTable, PairAverage,
};

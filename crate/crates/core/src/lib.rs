//! Self-testing correlations for pure bipartite entangled states.
//!
//! Given the Schmidt coefficients of a target state `Σ c_i |ii>`, this crate
//! builds the block-diagonal reference correlation tables that certify it,
//! the ideal measurements achieving them, and a numerical run of the
//! extraction argument: block operators, unitarization, projections, flip
//! products, and the Fourier/SWAP isometry that maps any exact realization
//! onto `|extra> ⊗ |target>`.

pub mod chsh;
pub mod correlations;
pub mod error;
pub mod extraction;
pub mod harness;
pub mod ideal;
pub mod qlinalg;
pub mod schmidt;

pub use chsh::{block_violation, BlockViolationReport};
pub use correlations::{compute_tables, reference_tables, verify_tables, CorrelationTables, VerificationReport};
pub use error::{Error, Result};
pub use extraction::{extract, measurement_equivalence, Extraction, ExtractionReport};
pub use harness::{embed_realization, sample_tables, EmbeddingSpec, SampleResult};
pub use ideal::{ideal_alice, ideal_bob, ideal_realization, Measurement, Realization, Side};
pub use qlinalg::{Operator, StateVector, C64};
pub use schmidt::{AngleSchedule, Block, BlockAngles, SchmidtCoefficients};

//! Embeddings, finite-shot sampling, file formats and the command line.

pub mod cli;
pub mod embed;
pub mod io;
pub mod sample;

pub use embed::{embed_realization, pad_realization, random_unitary, EmbeddingSpec};
pub use sample::{sample_tables, SampleResult};

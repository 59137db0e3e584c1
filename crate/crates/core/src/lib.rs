//! Curation of aligned Serial/OpenMP/CUDA kernel corpora, LLM-driven
//! translation between them, and a compile/execute feedback loop that
//! repairs and validates the translations.

pub mod agents;
pub mod api;
pub mod config;
pub mod corpus;
#[doc(hidden)]
pub mod fuzz_entry;
pub mod lexer;
pub mod llm;
pub mod metrics;
pub mod prompting;
pub mod toolchain;
pub mod util;

pub use api::{Api, Direction};

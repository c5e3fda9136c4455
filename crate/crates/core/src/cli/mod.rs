//! Command-line layer: experiment configs, the canonical corpus, command
//! execution and the acceptance suite.

pub mod config;
pub mod corpus;
pub mod run;
pub mod verify;

pub use config::{load_config, ExperimentConfig, Format};
pub use corpus::{check_entry, corpus, corpus_entry, CorpusEntry, EntryCheck, Expectations};
pub use run::{run, Command, Overrides, RunOutput, EXIT_MISMATCH, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION};
pub use verify::{run_criterion, run_suite, CriterionResult, SuiteReport};

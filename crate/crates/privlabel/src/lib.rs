//! Files, network, and the command line around `privlabel-core`.

pub mod cli;
pub mod config;
pub mod external;
pub mod extract;
pub mod fetch;
pub mod ingest;
pub mod jsonl;
pub mod report;

pub use privlabel_core as core;

//! Privacy label and privacy policy analysis.
//!
//! Parses Apple privacy labels and Google data safety sections into a common
//! model, extracts practices from policy text, links apps listed on both
//! stores, and reports where labels, policies, and stores disagree.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, networking,
//! and the command line live in the `privlabel` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

#[macro_use]
mod macros;

pub mod error;
pub mod lang;
pub mod model;
pub mod taxonomy;
pub mod text;
pub mod annotate;
pub mod domain;
pub mod policy;
pub mod matcher;
pub mod consistency;
pub mod diff;
pub mod stats;

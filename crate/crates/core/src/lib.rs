//! Popularity analysis for directed social graphs.
//!
//! The crate covers the whole algorithmic side of the toolkit: graph storage
//! and structural metrics, feature construction for nodes and links,
//! hexagonal self-organizing maps, clustering of map cells, LinLog layouts
//! and a synthetic graph generator. Everything is `no_std` + `alloc`; file
//! formats and the command line live in the companion `socmap` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub(crate) mod math;
pub mod rng;

pub mod clustering;
pub mod features;
pub mod graph;
pub mod layout;
pub mod som;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};

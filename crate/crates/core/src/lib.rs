//! Norms, amplified norms and distortion of algebra isomorphisms between
//! Fourier algebras of finite groups.
#![allow(clippy::needless_range_loop)]

pub mod ascent;
pub mod cli;
pub mod error;
pub mod fourier;
pub mod group;
pub mod homspace;
pub mod lemmas;
pub mod linalg;
pub mod repr;
pub mod reproduce;
pub mod search;
pub mod seeds;

pub use error::{Error, Result};

//! Braid-word compilation of quantum gates for non-semisimple Ising anyons.

pub mod anyon_model;
pub mod linalg;
pub mod metrics;
pub mod search;
pub mod ska;

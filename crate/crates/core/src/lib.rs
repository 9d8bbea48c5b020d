//! Numerical laboratory for the stability of orthogonally additive maps.
//!
//! The crate builds concrete finite-dimensional carriers with beta-homogeneous
//! F-norms and quasi-norms, orthogonality relations with constructive witness
//! search, perturbed test maps with a known defect budget, and the corrector
//! machinery that recovers an exactly orthogonally additive map from an
//! approximately additive one.  Everything is deterministic given explicit
//! seeds, so experiment reports are byte-reproducible.

pub mod fspace;
pub mod harness;
pub mod maps;
pub mod measure;
pub mod ortho;
pub mod rng;
pub mod stability;

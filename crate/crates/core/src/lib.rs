//! Group decodable erasure codes.
//!
//! A group decodable code splits its `n = t*beta` symbols into `t` buckets.
//! Bucket `i` is an MDS encoding of the `alpha` information symbols indexed
//! by `S_i`, so any `alpha` symbols of a bucket recover that group and any
//! single erased symbol is repaired from `alpha` symbols of its own bucket.
//! This crate constructs codes whose minimum distance meets the best
//! possible value for given `(alpha, beta, k, t)`, encodes, decodes and
//! repairs with them, and checks every structural property by brute force.
//!
//! Pipeline:
//! [`design::CodeDesign::build`] → [`galois::FieldSpec::for_params`] →
//! [`codegen::synthesize_generator`] → [`code::GdcCode`].

pub mod artifact;
pub mod code;
pub mod codegen;
pub mod combinatorics;
pub mod design;
pub mod error;
pub mod fixtures;
pub mod galois;
pub mod matrix;
pub mod simulator;

pub use code::{Codeword, DistanceMethod, ErasurePattern, GdcCode};
pub use codegen::{GeneratorMatrix, SynthesisConfig, VerifyLevel};
pub use design::{BoundReport, CodeDesign, DesignParams};
pub use error::{Error, Result};
pub use galois::{FieldElement, FieldSpec};
pub use matrix::{BinaryMatrix, FieldMatrix};

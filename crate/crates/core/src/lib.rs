//! Representation theory of the free orthogonal quantum groups `O_n^+`
//! (Kac case): Temperley-Lieb diagrams and Jones-Wenzl projections, the
//! tower of isometries `H_k -> (R^n)^{⊗k}`, fusion isometries, Haar
//! pairings of matrix coefficients, and the analytic estimates and
//! deformation checks built on top of them.

pub mod cache;
pub mod deform;
pub mod error;
pub mod estimates;
pub mod fusion;
pub mod par;
pub mod qnum;
pub mod rep;
pub mod tensor;
pub mod tl;

pub use error::{Error, Result};
pub use qnum::QContext;

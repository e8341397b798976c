//! Steklov spectra of surfaces with boundary.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod cli;
pub mod closed_form;
pub mod dtn;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod spectrum;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
pub struct ReadmeDoctests;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/constants.md")]
    pub struct Constants;
    #[doc = include_str!("../../../book/src/closed-form.md")]
    pub struct ClosedForm;
    #[doc = include_str!("../../../book/src/meshes.md")]
    pub struct Meshes;
    #[doc = include_str!("../../../book/src/dtn.md")]
    pub struct Dtn;
    #[doc = include_str!("../../../book/src/experiments.md")]
    pub struct Experiments;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}

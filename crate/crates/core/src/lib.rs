//! Numerics for dilute Bose gases in the Gross-Pitaevskii regime.
//!
//! Units are `ħ = 2m = 1` (kinetic energy `−Δ`), and Fourier transforms use
//! `f̂(p) = ∫ f(x) e^{−2πipx} dx`. For radial functions this is
//! `f̂(p) = (2/p) ∫ f(r) r sin(2πpr) dr`.

// `!(x > 0.0)` guards are meant to reject NaN too; index loops mirror the
// stencil formulas
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod fock;
pub mod gp;
pub mod kernels;
pub mod numerics;
pub mod potentials;
pub mod profile;
pub mod scattering;

pub use error::{Error, Result};

// The guide's chapters, compiled so their snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/potentials.md")]
    mod potentials {}
    #[doc = include_str!("../../../book/src/scattering.md")]
    mod scattering {}
    #[doc = include_str!("../../../book/src/gp.md")]
    mod gp {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/fock.md")]
    mod fock {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
}

//! Zero-error capacity bounds for discrete memoryless two-way channels.
//!
//! The crate is organised around the objects of the theory: a [`channel::Channel`]
//! and its [`channel::ConfusionFamily`], one-shot quantities in [`oneshot`],
//! outer bounds in [`outer`], achievability in [`inner`], constructive codes in
//! [`code`], and the small numerical kernels everything rests on in [`numerics`].

pub mod channel;
pub mod code;
pub mod error;
pub mod graph;
pub mod hom;
pub mod info;
pub mod inner;
pub mod numerics;
pub mod oneshot;
pub mod outer;
pub mod report;
pub mod spectral;

pub use error::{Error, Result};

/// Base-2 logarithm with `log(0) = -inf`.
pub fn log2(x: f64) -> f64 {
    x.log2()
}

/// Binary entropy in bits.
pub fn h2(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

//! Behavioral simulation of spintronic stochastic computing for Bayesian inference.
//!
//! * [`bitstream`]: packed stochastic bitstreams, `AND`/`MUX` arithmetic, accuracy
//!   and correlation statistics.
//! * [`mtj`]: the magnetic-tunnel-junction switching law, its calibration and
//!   inverse, and the reset/write/read bitstream generator.
//! * [`netlist`]: gate-level circuits, their text format, validation, seeded
//!   evaluation and resource reporting.
//! * [`fusion`]: grid-based target localization from distance and bearing
//!   readings, exact and stochastic.
//! * [`bbn`]: a five-node heart-disease belief network, its exact posterior
//!   and its `MUX`/`AND` inference circuits.
//! * [`bench`]: stream accuracy and independence measurements.

pub mod bbn;
pub mod bench;
pub mod bitstream;
pub mod error;
pub mod fusion;
pub mod mtj;
pub mod netlist;
pub mod rng;

pub use bitstream::{Bitstream, Probability};
pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/bitstreams.md")]
    mod bitstreams {}
    #[doc = include_str!("../../../book/src/device.md")]
    mod device {}
    #[doc = include_str!("../../../book/src/netlists.md")]
    mod netlists {}
    #[doc = include_str!("../../../book/src/fusion.md")]
    mod fusion {}
    #[doc = include_str!("../../../book/src/bbn.md")]
    mod bbn {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

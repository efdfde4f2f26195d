//! Simulation and analysis library for sliding-correlation channel sounding.
//!
//! * [`pnseq`]: programmable LFSR sequences and their statistics.
//! * [`sounder`]: the sliding correlator, sync detection and undilation.
//! * [`channel`]: tap-delay-line multipath emulation and AWGN.
//! * [`analysis`]: peak extraction, spectra, path loss, PLE and XPD.
//! * [`pipeline`]: the transmit-to-profile chain wired together.
//!
//! Data-parallel kernels run on rayon when the default `parallel` feature is
//! enabled; see [`Execution`].

// `!(x > 0.0)` style guards reject NaN too, which is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
mod error;
mod exec;
pub mod pipeline;
pub mod pnseq;
pub mod sounder;

pub use error::{Error, Result};
pub use exec::Execution;

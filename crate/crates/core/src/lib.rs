//! Throughput and maximum inter-decoding delay of stored-video streaming over
//! i.i.d. block-fading channels.
//!
//! A file of `M` equally sized packets is streamed over `M` fading blocks;
//! packet `W_t` must be decoded by the end of block `t`. Each transmission
//! scheme decides how the channel uses of every block are time-shared among
//! the packets whose deadline has not expired. With capacity-achieving codes a
//! packet is decoded iff the mutual information it accumulated reaches the
//! packet rate `R`.
//!
//! Modules:
//! - [`channel`]: fading realizations, per-block capacity, success probabilities.
//! - [`schemes`]: MT, eTS, PB and wTS allocations and decoding.
//! - [`informed`]: the non-causal informed-transmitter bound.
//! - [`analytics`]: exact distribution of the longest run of failures.
//! - [`metrics`]: throughput and maximum inter-decoding delay.
//! - [`asymptotics`]: the asymptotically optimal pre-buffering fraction.
//! - [`experiment`]: configuration, sweeps, CSV and SVG output.

pub mod analytics;
pub mod asymptotics;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod informed;
pub mod metrics;
pub mod quadrature;
pub mod rng;
pub mod schemes;
pub mod simulate;
pub mod special;
pub mod verify;

pub use channel::{ChannelParams, ChannelTrace, FadingLaw};
pub use error::{Error, Result};
pub use metrics::{AggregateMetrics, DecodeVector, TrialMetrics};
pub use schemes::{Objective, SchemeKind, SchemeSpec};

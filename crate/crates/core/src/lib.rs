//! Outage probability and throughput of cross-packet HARQ (XP-HARQ) and
//! incremental-redundancy HARQ over independent Rayleigh block fading.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: rate schedules, SNR profiles and the per-realization protocol
//!   events (mutual-information accumulation, success round, outage).
//! - [`quadrature`]: adaptive Gauss-Kronrod integration and the nested
//!   multi-fold oracle for the exact XP outage probability.
//! - [`special`]: complex gamma, complex-order upper incomplete gamma and a
//!   few series used as independent references.
//! - [`exact`]: closed-form and quadrature exact outage for one and two
//!   rounds, plus the Mellin-Barnes (incomplete Fox H) evaluation path.
//! - [`asymptotic`]: high-SNR expansions, the recursive log-polynomial
//!   coefficient table and diversity-order fitting.
//! - [`bounds`]: product lower bound and HARQ-IR upper bound for any round
//!   count.
//! - [`montecarlo`]: seeded, worker-count independent simulation of outage
//!   and renewal-reward throughput, and the analytical throughput chain.
//! - [`sweep`]: the key=value sweep configuration and CSV emitter used by
//!   the `xpharq` binary.
//!
//! All SNR arguments in the library are linear; only the CLI and sweep
//! configuration speak dB.

pub mod asymptotic;
pub mod bounds;
pub mod error;
pub mod exact;
pub mod model;
pub mod montecarlo;
pub mod quadrature;
pub mod special;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{
    db_to_linear, ir_outage_event, mutual_information, xp_success_round, Method, OutageEstimate,
    PowerProfile, RateSchedule, Scheme, SnrRealization, Uncertainty,
};

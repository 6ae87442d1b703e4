//! Simulator and optimizer for a NOMA-assisted cooperative THz-SIMO
//! mobile-edge-computing uplink.
//!
//! Cell-edge users relay their tasks through a paired cell-center user over
//! a THz side-link; the center user then superposes both streams towards a
//! multi-antenna BS with a single RF chain. The crate covers the channel
//! model, user deployment and pairing, receive beamforming, the closed-form
//! energy-minimizing allocation, computation-energy-efficiency maximization
//! and a Monte-Carlo harness that regenerates the evaluation sweeps.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamforming;
pub mod ceemax;
pub mod channel;
pub mod emin;
pub mod error;
pub mod harness;
pub mod linkmodel;
pub mod optim;
pub mod topology;

pub use error::{Error, Result, Threshold};

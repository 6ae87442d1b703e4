//! Two-phase NOMA offloading over one edge/center pair.
//!
//! Phase one: the edge user sends its task to the center user over the
//! side-link. Phase two: the center user superposes its own task (power
//! share `beta_center`) and the relayed edge task (share `beta_edge`)
//! towards the BS, which decodes the center stream first.
//!
//! Rates here are in bits/s. The CEE module works in bits/s/Hz and keeps
//! its own type for that.

use crate::beamforming::{beam_gain, BeamVector};
use crate::channel::ChannelVector;
use crate::error::{Error, Result};

/// Channel and power-split state of one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairLink {
    /// Center user -> BS channel.
    pub bs_channel: ChannelVector,
    /// Edge -> center side-link amplitude gain.
    pub sidelink: f64,
    pub beta_edge: f64,
    pub beta_center: f64,
    /// Hz
    pub bandwidth: f64,
    /// W
    pub noise: f64,
}

impl PairLink {
    pub fn new(
        bs_channel: ChannelVector,
        sidelink: f64,
        beta_edge: f64,
        bandwidth: f64,
        noise: f64,
    ) -> Result<Self> {
        let link = PairLink {
            bs_channel,
            sidelink,
            beta_edge,
            beta_center: 1.0 - beta_edge,
            bandwidth,
            noise,
        };
        link.validate()?;
        Ok(link)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta_edge > 0.0 && self.beta_edge < 1.0) {
            return Err(Error::domain(format!(
                "beta_edge must lie in (0, 1), got {}",
                self.beta_edge
            )));
        }
        if (self.beta_edge + self.beta_center - 1.0).abs() > 1e-12 {
            return Err(Error::domain("beta_edge + beta_center must equal 1"));
        }
        if !(self.noise > 0.0 && self.noise.is_finite()) {
            return Err(Error::domain("noise power must be positive"));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::domain("bandwidth must be positive"));
        }
        if !(self.sidelink > 0.0 && self.sidelink.is_finite()) {
            return Err(Error::domain("side-link gain must be positive"));
        }
        Ok(())
    }

    /// `|h_ji|^2`
    pub fn sidelink_power_gain(&self) -> f64 {
        self.sidelink * self.sidelink
    }
}

/// Time and power for both phases plus the BS receive beam.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    /// s
    pub t_edge: f64,
    /// s
    pub t_center: f64,
    /// W
    pub p_edge: f64,
    /// W
    pub p_center: f64,
    pub beam: BeamVector,
}

impl Allocation {
    /// Checks non-negativity and `t_edge + t_center <= budget` (with a
    /// relative rounding slack).
    pub fn validate(&self, budget: f64) -> Result<()> {
        for (name, v) in [
            ("t_edge", self.t_edge),
            ("t_center", self.t_center),
            ("p_edge", self.p_edge),
            ("p_center", self.p_center),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be non-negative, got {v}")));
            }
        }
        let used = self.t_edge + self.t_center;
        if used > budget * (1.0 + 1e-12) {
            return Err(Error::TimeBudgetExceeded {
                needed: used,
                budget,
            });
        }
        Ok(())
    }
}

/// Achievable rates in bits/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkRates {
    pub sidelink: f64,
    pub bs_center: f64,
    pub bs_edge: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffloadResult {
    pub bits_center: f64,
    pub bits_edge: f64,
    /// J
    pub energy_center: f64,
    /// J
    pub energy_edge: f64,
}

impl OffloadResult {
    pub fn total_energy(&self) -> f64 {
        self.energy_center + self.energy_edge
    }
}

/// `W log2(1 + snr)`, accurate for tiny `snr`.
pub(crate) fn shannon(bandwidth: f64, snr: f64) -> f64 {
    bandwidth * snr.ln_1p() / std::f64::consts::LN_2
}

pub fn link_rates(link: &PairLink, alloc: &Allocation) -> LinkRates {
    let c = beam_gain(&link.bs_channel, &alloc.beam);
    let n0 = link.noise;
    let w = link.bandwidth;
    let rx = alloc.p_center * c;
    LinkRates {
        sidelink: shannon(w, alloc.p_edge * link.sidelink_power_gain() / n0),
        bs_center: shannon(w, link.beta_center * rx / (link.beta_edge * rx + n0)),
        bs_edge: shannon(w, link.beta_edge * rx / n0),
    }
}

/// Bits delivered and energy spent. The edge task is limited by the weaker
/// of its two hops.
pub fn offload_outcome(link: &PairLink, alloc: &Allocation) -> OffloadResult {
    let r = link_rates(link, alloc);
    OffloadResult {
        bits_center: alloc.t_center * r.bs_center,
        bits_edge: (alloc.t_edge * r.sidelink).min(alloc.t_center * r.bs_edge),
        energy_center: alloc.t_center * alloc.p_center,
        energy_edge: alloc.t_edge * alloc.p_edge,
    }
}

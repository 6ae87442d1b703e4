//! Energy minimization for full offloading, its optimality diagnostics, and
//! the reference schemes it is compared against.
//!
//! The full-offload allocation is closed form. The center user's own-bits
//! constraint is handled in the high-SNR regime, where its rate approaches
//! `W log2(1 + beta_center / beta_edge)` independently of power; this fixes
//! the center phase length, the rest of the block goes to the side-link, and
//! both powers follow from the edge-bit constraints holding with equality.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::beamforming::{beam_gain, BeamVector};
use crate::error::{Error, Result, Threshold};
use crate::linkmodel::{link_rates, offload_outcome, shannon, Allocation, OffloadResult, PairLink};

/// Local CPU model of a user terminal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComputeProfile {
    /// cycles/bit
    pub cycles_per_bit: f64,
    /// Effective switched capacitance, J s^2 / cycle^3.
    pub capacitance_coeff: f64,
}

impl Default for ComputeProfile {
    fn default() -> Self {
        ComputeProfile {
            cycles_per_bit: 1.0,
            capacitance_coeff: 1e-27,
        }
    }
}

impl ComputeProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.cycles_per_bit > 0.0 && self.capacitance_coeff > 0.0) {
            return Err(Error::domain("compute profile coefficients must be positive"));
        }
        Ok(())
    }
}

/// Per-pair task sizes and the shared time block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskDemand {
    /// bits
    pub bits_edge: f64,
    /// bits
    pub bits_center: f64,
    /// s
    pub block: f64,
    pub pair_count: usize,
}

impl TaskDemand {
    pub fn validate(&self) -> Result<()> {
        if !(self.bits_edge > 0.0 && self.bits_center > 0.0) {
            return Err(Error::domain("task sizes must be positive"));
        }
        if !(self.block > 0.0 && self.block.is_finite()) {
            return Err(Error::domain("time block must be positive"));
        }
        if self.pair_count == 0 {
            return Err(Error::domain("pair count must be at least 1"));
        }
        Ok(())
    }

    /// `T / K`
    pub fn pair_budget(&self) -> f64 {
        self.block / self.pair_count as f64
    }

    /// Same block and pairing with both task sizes scaled.
    pub fn scaled(&self, factor: f64) -> TaskDemand {
        TaskDemand {
            bits_edge: self.bits_edge * factor,
            bits_center: self.bits_center * factor,
            ..*self
        }
    }
}

/// `2^x - 1` without cancellation for small `x`.
pub(crate) fn pow2m1(x: f64) -> f64 {
    (x * LN_2).exp_m1()
}

/// High-SNR limit of the center user's spectral efficiency,
/// `log2(1 + beta_center / beta_edge)`, bits/s/Hz.
pub fn center_rate_limit(link: &PairLink) -> f64 {
    (link.beta_center / link.beta_edge).ln_1p() / LN_2
}

/// Center phase length needed for the center user's own bits in the
/// high-SNR regime.
pub fn center_phase_time(link: &PairLink, demand: &TaskDemand) -> f64 {
    demand.bits_center / (link.bandwidth * center_rate_limit(link))
}

fn check_budget(link: &PairLink, demand: &TaskDemand) -> Result<f64> {
    demand.validate()?;
    link.validate()?;
    let t_c = center_phase_time(link, demand);
    let budget = demand.pair_budget();
    if t_c >= budget {
        return Err(Error::TimeBudgetExceeded {
            needed: t_c,
            budget,
        });
    }
    Ok(t_c)
}

fn positive_gain(link: &PairLink, beam: &BeamVector) -> Result<f64> {
    let c = beam_gain(&link.bs_channel, beam);
    if !(c > 0.0) {
        return Err(Error::Infeasible {
            threshold: Threshold::RelayedEdgeBits,
            required: f64::INFINITY,
            limit: 0.0,
        });
    }
    Ok(c)
}

/// Minimum-energy full-offload allocation for a fixed receive beam.
pub fn prop1_allocate(link: &PairLink, demand: &TaskDemand, beam: &BeamVector) -> Result<Allocation> {
    let t_center = check_budget(link, demand)?;
    let c = positive_gain(link, beam)?;
    let t_edge = demand.pair_budget() - t_center;
    let w = link.bandwidth;
    let p_edge = link.noise * pow2m1(demand.bits_edge / (w * t_edge)) / link.sidelink_power_gain();
    let p_center = link.noise * pow2m1(demand.bits_edge / (w * t_center)) / (link.beta_edge * c);
    Ok(Allocation {
        t_edge,
        t_center,
        p_edge,
        p_center,
        beam: beam.clone(),
    })
}

/// Smallest powers meeting all three bit constraints exactly at the given
/// phase lengths, with no high-SNR simplification.
pub fn minimal_powers(
    link: &PairLink,
    demand: &TaskDemand,
    t_edge: f64,
    t_center: f64,
    gain: f64,
) -> Result<(f64, f64)> {
    if !(t_edge > 0.0 && t_center > 0.0 && gain > 0.0) {
        return Err(Error::domain("phase lengths and gain must be positive"));
    }
    let w = link.bandwidth;
    let n0 = link.noise;
    let p_edge = n0 * pow2m1(demand.bits_edge / (w * t_edge)) / link.sidelink_power_gain();
    let relay = n0 * pow2m1(demand.bits_edge / (w * t_center)) / (link.beta_edge * gain);
    let q = pow2m1(demand.bits_center / (w * t_center));
    let positivity = 1.0 - link.beta_edge * (q + 1.0);
    if !(positivity > 0.0) {
        return Err(Error::Infeasible {
            threshold: Threshold::PositivityCondition,
            required: link.beta_edge * (q + 1.0),
            limit: 1.0,
        });
    }
    let center = n0 * q / (gain * positivity);
    Ok((p_edge, relay.max(center)))
}

/// Optimality diagnostics for a full-offload allocation.
///
/// Bit residuals are `(delivered - required) / required`; the time residual
/// is `(t_edge + t_center - T/K) / (T/K)`. Multipliers solve the
/// stationarity conditions of the Lagrangian in the energy/time variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktReport {
    pub sidelink_residual: f64,
    pub relayed_edge_residual: f64,
    pub center_residual: f64,
    pub time_residual: f64,
    /// `beta_center p_center c / sigma^2`; the high-SNR regime needs this >> 1.
    pub high_snr_ratio: f64,
    /// `[sidelink, relayed edge, center, time]`
    pub multipliers: [f64; 4],
}

impl KktReport {
    pub fn dual_feasible(&self) -> bool {
        self.multipliers.iter().all(|&m| m >= 0.0 && m.is_finite())
    }

    /// Relative shortfall of the center user's bits, zero if met.
    pub fn center_shortfall(&self) -> f64 {
        (-self.center_residual).max(0.0)
    }
}

pub fn verify_kkt(link: &PairLink, demand: &TaskDemand, alloc: &Allocation) -> KktReport {
    let out = offload_outcome(link, alloc);
    let rates = link_rates(link, alloc);
    let c = beam_gain(&link.bs_channel, &alloc.beam);
    let w = link.bandwidth;
    let n0 = link.noise;
    let budget = demand.pair_budget();

    // side-link multiplier and the time multiplier it pins down
    let g = link.sidelink_power_gain();
    let se = alloc.p_edge * g;
    let lambda1 = (se + n0) * LN_2 / (w * g);
    let lambda4 = lambda1 * (rates.sidelink - w * se / ((n0 + se) * LN_2));

    // center phase: relay term A and own-bits term B, as functions of (t, E)
    let x = alloc.p_center * c;
    let bx = link.beta_edge * x;
    let a_e = w * link.beta_edge * c / ((n0 + bx) * LN_2);
    let a_t = rates.bs_edge - w * bx / ((n0 + bx) * LN_2);
    let b_e = w * c / ((n0 + x) * LN_2) - a_e;
    let b_t = (shannon(w, x / n0) - w * x / ((n0 + x) * LN_2)) - a_t;
    // 1 = l2 a_e + l3 b_e ; lambda4 = l2 a_t + l3 b_t
    let det = a_e * b_t - a_t * b_e;
    let (lambda2, lambda3) = if det != 0.0 {
        ((b_t - lambda4 * b_e) / det, (lambda4 * a_e - a_t) / det)
    } else {
        (f64::NAN, f64::NAN)
    };

    KktReport {
        sidelink_residual: (alloc.t_edge * rates.sidelink - demand.bits_edge) / demand.bits_edge,
        relayed_edge_residual: (alloc.t_center * rates.bs_edge - demand.bits_edge) / demand.bits_edge,
        center_residual: (out.bits_center - demand.bits_center) / demand.bits_center,
        time_residual: (alloc.t_edge + alloc.t_center - budget) / budget,
        high_snr_ratio: link.beta_center * x / n0,
        multipliers: [lambda1, lambda2, lambda3, lambda4],
    }
}

/// Dynamic CPU energy to process `bits` within `time`: `kappa xi^3 L^3 / t^2`.
pub fn local_compute_energy(profile: &ComputeProfile, bits: f64, time: f64) -> Result<f64> {
    if !(time > 0.0) {
        return Err(Error::domain("local computing time must be positive"));
    }
    if bits < 0.0 {
        return Err(Error::domain("bit count must be non-negative"));
    }
    let cycles = profile.cycles_per_bit * bits;
    Ok(profile.capacitance_coeff * cycles.powi(3) / (time * time))
}

/// Energy breakdown of the partial-offloading scheme for one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialOutcome {
    pub allocation: Allocation,
    pub offload: OffloadResult,
    pub local_edge: f64,
    pub local_center: f64,
}

impl PartialOutcome {
    pub fn total_energy(&self) -> f64 {
        self.offload.total_energy() + self.local_edge + self.local_center
    }
}

/// Offloads `fraction` of each task with the closed-form allocation and
/// computes the remainder locally within the pair's slot `T/K`.
pub fn baseline_partial(
    link: &PairLink,
    demand: &TaskDemand,
    profile: &ComputeProfile,
    fraction: f64,
    beam: &BeamVector,
) -> Result<PartialOutcome> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::domain(format!("offload fraction must lie in (0, 1), got {fraction}")));
    }
    let off = demand.scaled(fraction);
    let allocation = prop1_allocate(link, &off, beam)?;
    let offload = offload_outcome(link, &allocation);
    let slot = demand.pair_budget();
    let keep = 1.0 - fraction;
    Ok(PartialOutcome {
        local_edge: local_compute_energy(profile, keep * demand.bits_edge, slot)?,
        local_center: local_compute_energy(profile, keep * demand.bits_center, slot)?,
        allocation,
        offload,
    })
}

/// Both tasks computed locally within `time_budget`.
pub fn baseline_no_offload(demand: &TaskDemand, profile: &ComputeProfile, time_budget: f64) -> Result<f64> {
    Ok(local_compute_energy(profile, demand.bits_edge, time_budget)?
        + local_compute_energy(profile, demand.bits_center, time_budget)?)
}

/// Three-phase orthogonal relaying: side-link, then the center user's own
/// bits, then the relayed edge bits, each BS phase on half the band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmaAllocation {
    pub t_edge: f64,
    pub t_phase2: f64,
    pub t_phase3: f64,
    pub p_edge: f64,
    pub p_center: f64,
}

impl OmaAllocation {
    pub fn total_energy(&self) -> f64 {
        self.t_edge * self.p_edge + (self.t_phase2 + self.t_phase3) * self.p_center
    }
}

/// Closed-form OMA allocation. For a like-for-like comparison the two BS
/// phases split the NOMA center phase evenly.
pub fn baseline_oma(link: &PairLink, demand: &TaskDemand, beam: &BeamVector) -> Result<(OmaAllocation, f64)> {
    let t_center = check_budget(link, demand)?;
    let c = positive_gain(link, beam)?;
    let t_edge = demand.pair_budget() - t_center;
    let t_half = 0.5 * t_center;
    let w = link.bandwidth;
    let p_edge = link.noise * pow2m1(demand.bits_edge / (w * t_edge)) / link.sidelink_power_gain();
    let p_center = 0.5 * link.noise * pow2m1(demand.bits_edge / (0.5 * w * t_half)) / c;
    let a = OmaAllocation {
        t_edge,
        t_phase2: t_half,
        t_phase3: t_half,
        p_edge,
        p_center,
    };
    Ok((a, a.total_energy()))
}

/// Largest per-user task the closed-form allocation can accept:
/// `(T/K) W log2(1 + beta_center / beta_edge)`.
pub fn max_offload_bits(block: f64, pair_count: usize, bandwidth: f64, beta_edge: f64) -> f64 {
    let beta_center = 1.0 - beta_edge;
    block / pair_count as f64 * bandwidth * (beta_center / beta_edge).ln_1p() / LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{bs_channel_vector, named_window, noise_power, sidelink_gain, AntennaGains};
    use approx::assert_relative_eq;

    fn defaults(d_side: f64) -> (PairLink, TaskDemand, BeamVector) {
        let win = named_window("f3").unwrap();
        let gains = AntennaGains::default();
        let h = bs_channel_vector(&win, &gains, 2.0, 0.3, 4).unwrap();
        let beam = BeamVector::from(crate::channel::steering_vector(0.3, 4).unwrap());
        let link = PairLink::new(
            h,
            sidelink_gain(&win, &gains, d_side).unwrap(),
            0.3,
            win.bandwidth,
            noise_power(win.bandwidth, 10.0).unwrap(),
        )
        .unwrap();
        let demand = TaskDemand {
            bits_edge: 1e9,
            bits_center: 1e9,
            block: 0.25,
            pair_count: 2,
        };
        (link, demand, beam)
    }

    #[test]
    fn phase_lengths_at_defaults() {
        let (link, demand, beam) = defaults(2.0);
        let a = prop1_allocate(&link, &demand, &beam).unwrap();
        assert_relative_eq!(a.t_center, 4.202311259e-3, max_relative = 1e-9);
        assert_relative_eq!(a.t_edge + a.t_center, 0.125, max_relative = 1e-15);
    }

    #[test]
    fn edge_constraints_hold_with_equality() {
        let (link, demand, beam) = defaults(2.0);
        let a = prop1_allocate(&link, &demand, &beam).unwrap();
        let k = verify_kkt(&link, &demand, &a);
        assert!(k.sidelink_residual.abs() < 1e-9);
        assert!(k.relayed_edge_residual.abs() < 1e-9);
        assert!(k.time_residual.abs() < 1e-12);
        let out = offload_outcome(&link, &a);
        assert_relative_eq!(out.bits_edge, 1e9, max_relative = 1e-9);
    }

    #[test]
    fn budget_overflow_is_reported() {
        let (link, mut demand, beam) = defaults(2.0);
        demand.bits_center = 40e9;
        assert!(matches!(
            prop1_allocate(&link, &demand, &beam),
            Err(Error::TimeBudgetExceeded { .. })
        ));
    }

    #[test]
    fn local_energy_laws() {
        let p = ComputeProfile::default();
        assert_relative_eq!(local_compute_energy(&p, 1e9, 0.25).unwrap(), 16.0, max_relative = 1e-12);
        assert_eq!(local_compute_energy(&p, 0.0, 0.25).unwrap(), 0.0);
        let e1 = local_compute_energy(&p, 3e8, 0.1).unwrap();
        let e2 = local_compute_energy(&p, 3e8, 0.2).unwrap();
        assert_relative_eq!(e1 / e2, 4.0, max_relative = 1e-12);
        assert!(local_compute_energy(&p, 1.0, 0.0).is_err());
    }

    #[test]
    fn no_offload_reference() {
        let (_, demand, _) = defaults(2.0);
        let e = baseline_no_offload(&demand, &ComputeProfile::default(), 0.25).unwrap();
        assert_relative_eq!(e, 32.0, max_relative = 1e-12);
    }

    #[test]
    fn partial_local_terms() {
        let (link, demand, beam) = defaults(2.0);
        let p = baseline_partial(&link, &demand, &ComputeProfile::default(), 0.8, &beam).unwrap();
        assert_relative_eq!(p.local_edge, 0.512, max_relative = 1e-12);
        assert_relative_eq!(p.local_center, 0.512, max_relative = 1e-12);
        assert!(baseline_partial(&link, &demand, &ComputeProfile::default(), 1.0, &beam).is_err());
    }

    #[test]
    fn oma_structure() {
        let (link, demand, beam) = defaults(2.0);
        let noma = prop1_allocate(&link, &demand, &beam).unwrap();
        let (oma, e) = baseline_oma(&link, &demand, &beam).unwrap();
        assert_eq!(oma.t_phase2, oma.t_phase3);
        assert_relative_eq!(oma.t_phase2 * 2.0, noma.t_center, max_relative = 1e-15);
        assert_eq!(oma.p_edge, noma.p_edge);
        assert_relative_eq!(oma.p_center / noma.p_center, 7.87, max_relative = 2e-3);
        let e_noma = noma.t_edge * noma.p_edge + noma.t_center * noma.p_center;
        assert!(e > e_noma);
    }

    #[test]
    fn offload_capacity() {
        assert_relative_eq!(max_offload_bits(0.25, 2, 137e9, 0.3), 29.75e9, max_relative = 1e-3);
        assert_relative_eq!(max_offload_bits(0.25, 10, 2e9, 0.3), 86.8e6, max_relative = 1e-3);
    }

    #[test]
    fn positivity_boundary_is_infeasible() {
        let (link, demand, beam) = defaults(2.0);
        let a = prop1_allocate(&link, &demand, &beam).unwrap();
        let c = beam_gain(&link.bs_channel, &beam);
        // at the high-SNR center phase length the exact constraint is unreachable
        assert!(minimal_powers(&link, &demand, a.t_edge, a.t_center * 0.999, c).is_err());
        assert!(minimal_powers(&link, &demand, a.t_edge, a.t_center * 1.5, c).is_ok());
    }
}

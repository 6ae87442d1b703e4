//! Computation-energy-efficiency (CEE) maximization for one pair.
//!
//! The pair's slot `T/K` is split evenly between the side-link and the BS
//! phase. Powers and the BS beam gain are then optimized alternately with
//! an unconstrained (ideal) beam, which yields an upper bound; finally a
//! constant-modulus beamformer is designed and the powers are re-solved for
//! the gain it actually delivers.
//!
//! Rates in this module are spectral efficiencies (bits/s/Hz), so the CEE is
//! in bits/J/Hz.

use std::f64::consts::LN_2;

use crate::beamforming::{beam_gain, cm_beamformer, BeamVector};
use crate::emin::{local_compute_energy, pow2m1, ComputeProfile, TaskDemand};
use crate::error::{Error, Result, Threshold};
use crate::linkmodel::PairLink;
use crate::optim::{dinkelbach, golden_section_max, DinkelbachOptions, FractionalProgram, Region2};

/// Tolerance of the golden-section searches, relative to the bracket.
const SEARCH_TOL: f64 = 1e-10;

/// Work done locally alongside the offloaded part (partial offloading).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalTerms {
    /// Locally processed bits divided by the bandwidth, bits/Hz.
    pub normalized_bits: f64,
    /// J
    pub energy: f64,
}

impl LocalTerms {
    /// Keeps `1 - fraction` of each task local for the pair's slot.
    pub fn for_fraction(
        demand: &TaskDemand,
        profile: &ComputeProfile,
        fraction: f64,
        bandwidth: f64,
    ) -> Result<Self> {
        let keep = 1.0 - fraction;
        let slot = demand.pair_budget();
        let bits_edge = keep * demand.bits_edge;
        let bits_center = keep * demand.bits_center;
        Ok(LocalTerms {
            normalized_bits: (bits_edge + bits_center) / bandwidth,
            energy: local_compute_energy(profile, bits_edge, slot)?
                + local_compute_energy(profile, bits_center, slot)?,
        })
    }
}

/// One pair's CEE problem. `demand` holds the offloaded bits.
#[derive(Debug, Clone, PartialEq)]
pub struct CeeProblem {
    pub link: PairLink,
    pub demand: TaskDemand,
    /// W
    pub p_max: f64,
    pub n_antennas: usize,
    pub local: Option<LocalTerms>,
    pub solver: DinkelbachOptions,
}

impl CeeProblem {
    pub fn new(link: PairLink, demand: TaskDemand, p_max: f64, n_antennas: usize) -> Result<Self> {
        if !(p_max > 0.0 && p_max.is_finite()) {
            return Err(Error::domain("p_max must be positive"));
        }
        demand.validate()?;
        link.validate()?;
        Ok(CeeProblem {
            link,
            demand,
            p_max,
            n_antennas,
            local: None,
            solver: DinkelbachOptions::default(),
        })
    }

    pub fn with_local(mut self, local: LocalTerms) -> Self {
        self.local = Some(local);
        self
    }

    pub fn with_solver(mut self, solver: DinkelbachOptions) -> Self {
        self.solver = solver;
        self
    }

    /// Length of each of the two phases, `T / (2K)`.
    pub fn phase_time(&self) -> f64 {
        0.5 * self.demand.pair_budget()
    }

    /// `||h||^2`, the gain of a beam matched to the channel.
    pub fn gain_cap(&self) -> f64 {
        self.link.bs_channel.norm_sqr()
    }

    fn edge_exponent(&self) -> f64 {
        self.demand.bits_edge / (self.phase_time() * self.link.bandwidth)
    }

    fn center_exponent(&self) -> f64 {
        self.demand.bits_center / (self.phase_time() * self.link.bandwidth)
    }

    /// `1 - beta_edge 2^(L_center / (t W))`; must be positive for the
    /// center user's bits to be deliverable at any power.
    pub fn positivity_margin(&self) -> f64 {
        1.0 - self.link.beta_edge * (pow2m1(self.center_exponent()) + 1.0)
    }

    fn check_positivity(&self) -> Result<f64> {
        let m = self.positivity_margin();
        if !(m > 0.0) {
            return Err(Error::Infeasible {
                threshold: Threshold::PositivityCondition,
                required: 1.0 - m,
                limit: 1.0,
            });
        }
        Ok(m)
    }

    /// Smallest edge power meeting the side-link bit requirement.
    pub fn edge_power_floor(&self) -> f64 {
        self.link.noise * pow2m1(self.edge_exponent()) / self.link.sidelink_power_gain()
    }

    /// `(relay floor, own-bits floor)` on the center power at beam gain `c`.
    pub fn center_power_floors(&self, gain: f64) -> Result<(f64, f64)> {
        let m = self.check_positivity()?;
        let n0 = self.link.noise;
        Ok((
            n0 * pow2m1(self.edge_exponent()) / (self.link.beta_edge * gain),
            n0 * pow2m1(self.center_exponent()) / (gain * m),
        ))
    }

    /// `(relay floor, own-bits floor)` on the beam gain at center power `p`.
    pub fn gain_floors(&self, p_center: f64) -> Result<[f64; 2]> {
        let (a, b) = self.center_power_floors(p_center)?;
        Ok([a, b])
    }

    /// Feasible power box at gain `c`; errors name the first violated
    /// requirement.
    pub fn power_region(&self, gain: f64) -> Result<Region2> {
        let fe = self.edge_power_floor();
        if fe > self.p_max {
            return Err(Error::Infeasible {
                threshold: Threshold::SidelinkBits,
                required: fe,
                limit: self.p_max,
            });
        }
        let (relay, own) = self.center_power_floors(gain)?;
        if relay > self.p_max {
            return Err(Error::Infeasible {
                threshold: Threshold::RelayedEdgeBits,
                required: relay,
                limit: self.p_max,
            });
        }
        if own > self.p_max {
            return Err(Error::Infeasible {
                threshold: Threshold::CenterBits,
                required: own,
                limit: self.p_max,
            });
        }
        Ok(Region2::boxed([fe, relay.max(own)], [self.p_max, self.p_max]))
    }

    /// Offloaded plus local bits, normalized by the bandwidth.
    pub fn numerator(&self, p_edge: f64, p_center: f64, gain: f64) -> f64 {
        let t = self.phase_time();
        let n0 = self.link.noise;
        let x = p_center * gain;
        let log2_1p = |v: f64| v.ln_1p() / LN_2;
        let center = t * log2_1p(self.link.beta_center * x / (self.link.beta_edge * x + n0));
        let side = t * log2_1p(p_edge * self.link.sidelink_power_gain() / n0);
        let relay = t * log2_1p(self.link.beta_edge * x / n0);
        center + side.min(relay) + self.local.map_or(0.0, |l| l.normalized_bits)
    }

    /// Transmit plus local energy, J.
    pub fn denominator(&self, p_edge: f64, p_center: f64) -> f64 {
        self.phase_time() * (p_edge + p_center) + self.local.map_or(0.0, |l| l.energy)
    }
}

/// CEE in bits/J/Hz at the given powers and beam gain.
pub fn cee_value(problem: &CeeProblem, p_edge: f64, p_center: f64, gain: f64) -> Result<f64> {
    if !(p_edge > 0.0 && p_center > 0.0) {
        return Err(Error::domain("CEE needs positive powers"));
    }
    let den = problem.denominator(p_edge, p_center);
    if !(den > 0.0) {
        return Err(Error::domain("CEE denominator is zero"));
    }
    Ok(problem.numerator(p_edge, p_center, gain) / den)
}

/// Gain at which the relay floor on the center power equals `p_max`.
pub fn initial_beam_gain(problem: &CeeProblem) -> f64 {
    pow2m1(problem.edge_exponent()) * problem.link.noise / problem.p_max
}

/// Smallest gain for which some center power `<= p_max` meets both center
/// requirements.
pub fn min_feasible_gain(problem: &CeeProblem) -> Result<f64> {
    let [a, b] = problem.gain_floors(problem.p_max)?;
    Ok(a.max(b))
}

struct PowerProgram<'a> {
    problem: &'a CeeProblem,
    gain: f64,
    region: Region2,
}

impl FractionalProgram for PowerProgram<'_> {
    type Point = [f64; 2];

    fn numerator(&self, p: &[f64; 2]) -> f64 {
        self.problem.numerator(p[0], p[1], self.gain)
    }

    fn denominator(&self, p: &[f64; 2]) -> f64 {
        self.problem.denominator(p[0], p[1])
    }

    fn maximize_parametric(&self, lambda: f64) -> Result<[f64; 2]> {
        let f = |p: [f64; 2]| self.numerator(&p) - lambda * self.denominator(&p);
        let [lo_c, hi_c] = [self.region.lower[1], self.region.upper[1]];
        let (p_center, _) =
            golden_section_max(|pc| f([self.best_edge_power(lambda, pc), pc]), lo_c, hi_c, SEARCH_TOL)?;
        Ok([self.best_edge_power(lambda, p_center), p_center])
    }
}

impl PowerProgram<'_> {
    /// Exact maximizer over `p_edge` of the parametric objective at fixed
    /// `p_center`. Both phases have equal length, so the side-link rate
    /// meets the relay rate at `p_edge = beta_edge p_center c / |h_ji|^2`;
    /// beyond that the objective only loses energy. Below it the side-link
    /// term is concave with stationary point `1 / (lambda ln 2) - sigma^2 / |h_ji|^2`.
    fn best_edge_power(&self, lambda: f64, p_center: f64) -> f64 {
        let link = &self.problem.link;
        let g = link.sidelink_power_gain();
        let kink = link.beta_edge * p_center * self.gain / g;
        let stationary = if lambda > 0.0 {
            1.0 / (lambda * LN_2) - link.noise / g
        } else {
            f64::INFINITY
        };
        stationary.min(kink).clamp(self.region.lower[0], self.region.upper[0])
    }
}

/// Power pair and CEE from the fractional power step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerStep {
    pub p_edge: f64,
    pub p_center: f64,
    pub cee: f64,
    pub iterations: usize,
    /// Final parametric value `F(lambda*)`.
    pub residual: f64,
}

/// CEE-maximizing powers at a fixed beam gain.
pub fn solve_power_given_gain(problem: &CeeProblem, gain: f64) -> Result<PowerStep> {
    let region = problem.power_region(gain)?;
    let program = PowerProgram {
        problem,
        gain,
        region,
    };
    let out = dinkelbach(&program, problem.solver)?;
    Ok(PowerStep {
        p_edge: out.point[0],
        p_center: out.point[1],
        cee: out.ratio,
        iterations: out.iterations,
        residual: out.trace.last().map_or(f64::NAN, |s| s.value),
    })
}

/// CEE-maximizing beam gain at fixed powers, searched up to the ideal cap.
pub fn solve_gain_given_power(problem: &CeeProblem, p_edge: f64, p_center: f64) -> Result<f64> {
    let [a, b] = problem.gain_floors(p_center)?;
    let floor = a.max(b);
    let cap = problem.gain_cap();
    if floor > cap {
        return Err(Error::Infeasible {
            threshold: Threshold::BeamGainCap,
            required: floor,
            limit: cap,
        });
    }
    let (c, _) = golden_section_max(|c| problem.numerator(p_edge, p_center, c), floor, cap, SEARCH_TOL)?;
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpperBound {
    pub p_edge: f64,
    pub p_center: f64,
    pub gain: f64,
    pub cee: f64,
    /// CEE after each alternation round.
    pub trace: Vec<f64>,
}

/// Relative CEE change that ends the alternation.
pub const ALTERNATION_TOL: f64 = 1e-6;
pub const ALTERNATION_MAX_ITERS: usize = 50;

/// Alternates the power and gain steps with an ideal beam. The first
/// power step runs at the initial gain, raised to the smallest gain at
/// which the center requirements fit under `p_max` and capped at `||h||^2`.
pub fn alternating_upper_bound(problem: &CeeProblem) -> Result<UpperBound> {
    let fe = problem.edge_power_floor();
    if fe > problem.p_max {
        return Err(Error::Infeasible {
            threshold: Threshold::SidelinkBits,
            required: fe,
            limit: problem.p_max,
        });
    }
    let cap = problem.gain_cap();
    let need = min_feasible_gain(problem)?;
    if need > cap {
        return Err(Error::Infeasible {
            threshold: Threshold::BeamGainCap,
            required: need,
            limit: cap,
        });
    }
    let mut gain = initial_beam_gain(problem).max(need).min(cap);
    let mut trace: Vec<f64> = Vec::new();
    let mut last = None;
    for _ in 0..ALTERNATION_MAX_ITERS {
        let step = solve_power_given_gain(problem, gain)?;
        gain = solve_gain_given_power(problem, step.p_edge, step.p_center)?;
        let cee = cee_value(problem, step.p_edge, step.p_center, gain)?;
        trace.push(cee);
        let converged = trace.len() >= 2 && {
            let prev = trace[trace.len() - 2];
            (cee - prev).abs() <= ALTERNATION_TOL * prev.abs()
        };
        last = Some((step, cee));
        if converged {
            break;
        }
    }
    let (step, cee) = last.expect("at least one alternation round");
    Ok(UpperBound {
        p_edge: step.p_edge,
        p_center: step.p_center,
        gain,
        cee,
        trace,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CeeSolution {
    pub p_edge: f64,
    pub p_center: f64,
    /// `|h^H w|^2` of `beam`.
    pub gain: f64,
    pub beam: BeamVector,
    /// bits/J/Hz
    pub cee: f64,
}

/// Designs the CM beamformer for the upper-bound powers and re-solves the
/// powers at the gain it delivers.
pub fn design_and_finalize(problem: &CeeProblem, upper: &UpperBound) -> Result<CeeSolution> {
    let floors = problem.gain_floors(upper.p_center)?;
    let beam = cm_beamformer(&problem.link.bs_channel, floors)?;
    let gain = beam_gain(&problem.link.bs_channel, &beam);
    let step = solve_power_given_gain(problem, gain)?;
    Ok(CeeSolution {
        p_edge: step.p_edge,
        p_center: step.p_center,
        gain,
        beam,
        cee: step.cee,
    })
}

/// Full pipeline for one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CeeOutcome {
    pub upper_bound: UpperBound,
    pub solution: CeeSolution,
}

pub fn optimize_pair(problem: &CeeProblem) -> Result<CeeOutcome> {
    let upper_bound = alternating_upper_bound(problem)?;
    let solution = design_and_finalize(problem, &upper_bound)?;
    Ok(CeeOutcome {
        upper_bound,
        solution,
    })
}

/// CEE of computing both tasks locally within `time_budget`.
pub fn cee_no_offload(
    demand: &TaskDemand,
    profile: &ComputeProfile,
    bandwidth: f64,
    time_budget: f64,
) -> Result<f64> {
    let energy = local_compute_energy(profile, demand.bits_edge, time_budget)?
        + local_compute_energy(profile, demand.bits_center, time_budget)?;
    if !(energy > 0.0) {
        return Err(Error::domain("no-offload CEE needs a positive task"));
    }
    Ok((demand.bits_edge + demand.bits_center) / bandwidth / energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{bs_channel_vector, named_window, noise_power, sidelink_gain, AntennaGains};
    use crate::optim::oracle::{grid_max_2d, Spacing};
    use approx::assert_relative_eq;

    fn problem(d_side: f64, bits: f64, p_max: f64) -> CeeProblem {
        let win = named_window("f3").unwrap();
        let gains = AntennaGains::default();
        let link = PairLink::new(
            bs_channel_vector(&win, &gains, 1.5, 0.3, 4).unwrap(),
            sidelink_gain(&win, &gains, d_side).unwrap(),
            0.3,
            win.bandwidth,
            noise_power(win.bandwidth, 10.0).unwrap(),
        )
        .unwrap();
        let demand = TaskDemand {
            bits_edge: bits,
            bits_center: bits,
            block: 0.25,
            pair_count: 2,
        };
        CeeProblem::new(link, demand, p_max, 4).unwrap()
    }

    #[test]
    fn initial_gain_reference() {
        let p = problem(1.0, 1e9, 7.943e-3);
        assert_relative_eq!(initial_beam_gain(&p), 5.80e-8, max_relative = 5e-3);
    }

    #[test]
    fn fixed_powers_cee_is_invariant_in_block_length() {
        let p1 = problem(1.0, 1e8, 10.0);
        let mut p2 = p1.clone();
        p2.demand.block *= 2.0;
        let c = p1.gain_cap();
        let a = cee_value(&p1, 0.5, 0.2, c).unwrap();
        let b = cee_value(&p2, 0.5, 0.2, c).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }

    #[test]
    fn doubling_powers_lowers_cee() {
        let p = problem(1.0, 1e8, 10.0);
        let c = p.gain_cap();
        assert!(cee_value(&p, 1.0, 1.0, c).unwrap() < cee_value(&p, 0.5, 0.5, c).unwrap());
    }

    #[test]
    fn power_step_matches_grid_oracle() {
        let p = problem(1.0, 1e8, 8.0);
        let c = p.gain_cap();
        let step = solve_power_given_gain(&p, c).unwrap();
        let region = p.power_region(c).unwrap();
        let grid = grid_max_2d(|q| p.numerator(q[0], q[1], c) / p.denominator(q[0], q[1]), &region, 400, Spacing::Log).unwrap();
        assert!(step.cee >= grid.value * (1.0 - 1e-3));
    }

    #[test]
    fn edge_step_agrees_with_nested_search() {
        let p = problem(1.0, 1e8, 8.0);
        let c = p.gain_cap();
        let program = PowerProgram {
            problem: &p,
            gain: c,
            region: p.power_region(c).unwrap(),
        };
        for lambda in [0.01, 1.0, 10.0, 100.0] {
            let fast = program.maximize_parametric(lambda).unwrap();
            let f = |q: [f64; 2]| program.numerator(&q) - lambda * program.denominator(&q);
            let slow = crate::optim::concave_max_box(f, &program.region, 1e-12).unwrap();
            assert!((f(fast) - slow.value).abs() <= 1e-9 * slow.value.abs().max(1e-12));
        }
    }

    #[test]
    fn upper_bound_dominates_cm_solution() {
        let p = problem(1.0, 1e8, 8.0);
        let out = optimize_pair(&p).unwrap();
        assert!(out.solution.cee <= out.upper_bound.cee * (1.0 + 1e-9));
        // steering channel: CM reaches the cap
        assert_relative_eq!(out.solution.gain, p.gain_cap(), max_relative = 1e-9);
        assert_relative_eq!(out.solution.cee, out.upper_bound.cee, max_relative = 1e-6);
        for w in out.upper_bound.trace.windows(2) {
            assert!(w[1] >= w[0] * (1.0 - 1e-9));
        }
    }

    #[test]
    fn gain_step_returns_cap() {
        let p = problem(1.0, 1e8, 8.0);
        let c = solve_gain_given_power(&p, 1.0, 1.0).unwrap();
        assert_relative_eq!(c, p.gain_cap(), max_relative = 1e-9);
    }

    #[test]
    fn oversized_demand_names_threshold() {
        let p = problem(2.0, 1e9, 7.943e-3);
        match optimize_pair(&p) {
            Err(Error::Infeasible { threshold, .. }) => assert_eq!(threshold, Threshold::SidelinkBits),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn single_point_region() {
        let mut p = problem(1.0, 1e8, 8.0);
        let c = p.gain_cap();
        let fe = p.edge_power_floor();
        let (a, b) = p.center_power_floors(c).unwrap();
        // choose p_max equal to both floors by rescaling the side-link
        let target = a.max(b);
        p.link.sidelink *= (fe / target).sqrt();
        p.p_max = target;
        let step = solve_power_given_gain(&p, c).unwrap();
        assert_relative_eq!(step.p_edge, target, max_relative = 1e-9);
        assert_relative_eq!(step.p_center, target, max_relative = 1e-9);
    }

    #[test]
    fn no_offload_cee() {
        let demand = TaskDemand {
            bits_edge: 1e9,
            bits_center: 1e9,
            block: 0.25,
            pair_count: 2,
        };
        let v = cee_no_offload(&demand, &ComputeProfile::default(), 137e9, 0.25).unwrap();
        assert_relative_eq!(v, 2e9 / 137e9 / 32.0, max_relative = 1e-12);
    }
}

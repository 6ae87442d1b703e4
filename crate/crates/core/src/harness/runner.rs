//! Monte-Carlo runner: deploy, pair, beamform, allocate, accumulate.
//!
//! Each trial draws its users from its own RNG stream, so trials are
//! independent and can run on any number of workers. Results are collected
//! in trial order before aggregation, which makes serial and parallel runs
//! bit-identical.

use crate::beamforming::{select_beam, BeamSelection, BeamVector, Codebook};
use crate::ceemax::{cee_no_offload, optimize_pair, CeeProblem, LocalTerms};
use crate::channel::{bs_channel_vector, sidelink_gain};
use crate::emin::{
    baseline_no_offload, baseline_oma, baseline_partial, max_offload_bits, prop1_allocate,
    TaskDemand,
};
use crate::error::{Error, Result};
use crate::linkmodel::{offload_outcome, PairLink};
use crate::topology::{deploy_users_with, pair_users, trial_rng};

use super::scenario::{LocalTime, Objective, OffloadMode, Scenario};

/// Environment variable capping the number of worker threads.
pub const WORKERS_ENV: &str = "THZMEC_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    /// Uses the rayon pool when the `parallel` feature is on, otherwise
    /// falls back to serial.
    #[default]
    Parallel,
}

/// Per-pair record of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMetrics {
    pub edge: usize,
    pub center: usize,
    pub sidelink_distance: f64,
    pub beam_index: usize,
    /// `[t_edge, t_center, p_edge, p_center]` where applicable.
    pub allocation: Option<[f64; 4]>,
    /// J
    pub energy: Option<f64>,
    /// bits/J/Hz
    pub cee: Option<f64>,
    pub iterations: usize,
    /// Why the pair could not be served, if it could not.
    pub infeasible: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialMetrics {
    pub users: usize,
    pub trial: u64,
    /// Sum over served pairs, J; NaN when no pair was served.
    pub total_energy: f64,
    /// Sum over served pairs, bits/J/Hz; NaN when no pair was served.
    pub total_cee: f64,
    pub max_bits_per_user: f64,
    pub pairs: Vec<PairMetrics>,
    pub infeasible_pair_count: usize,
    pub solver_iterations: usize,
}

/// Checks that do not depend on the user drop. A scenario failing them is
/// infeasible for every realization.
pub fn structural_check(scenario: &Scenario, users: usize) -> Result<()> {
    let demand = offloaded_demand(scenario, users);
    let beta_edge = scenario.noma.beta_edge;
    let w = scenario.window()?.bandwidth;
    match (scenario.mode.objective, scenario.mode.offload) {
        (_, OffloadMode::None) => Ok(()),
        (Objective::EnergyMin, _) => {
            let rate = ((1.0 - beta_edge) / beta_edge).ln_1p() / std::f64::consts::LN_2;
            let t_c = demand.bits_center / (w * rate);
            let budget = demand.pair_budget();
            if t_c >= budget {
                return Err(Error::TimeBudgetExceeded { needed: t_c, budget });
            }
            Ok(())
        }
        (Objective::CeeMax, _) => {
            let t = 0.5 * demand.pair_budget();
            let pow = 2f64.powf(demand.bits_center / (t * w));
            if beta_edge * pow >= 1.0 {
                return Err(Error::Infeasible {
                    threshold: crate::error::Threshold::PositivityCondition,
                    required: beta_edge * pow,
                    limit: 1.0,
                });
            }
            Ok(())
        }
    }
}

fn offloaded_demand(scenario: &Scenario, users: usize) -> TaskDemand {
    let d = scenario.demand(users);
    if scenario.mode.offload == OffloadMode::Partial {
        d.scaled(scenario.mode.partial_fraction)
    } else {
        d
    }
}

fn no_offload_time(scenario: &Scenario, demand: &TaskDemand) -> f64 {
    match scenario.compute.no_offload_time {
        LocalTime::Block => demand.block,
        LocalTime::Slot => demand.pair_budget(),
    }
}

/// Result of solving one pair under the scenario's objective and mode.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOutcome {
    /// `[t_edge, t_center, p_edge, p_center]`
    pub allocation: Option<[f64; 4]>,
    pub energy: Option<f64>,
    pub cee: Option<f64>,
    pub iterations: usize,
}

/// Solves one pair; `users` sets the slot length `T/K`.
pub fn solve_pair(scenario: &Scenario, link: &PairLink, beam: &BeamVector, users: usize) -> Result<PairOutcome> {
    let demand = scenario.demand(users);
    let profile = scenario.profile();
    let mode = scenario.mode.offload;
    match scenario.mode.objective {
        Objective::EnergyMin => {
            let (allocation, energy) = match mode {
                OffloadMode::Full | OffloadMode::Mmwave => {
                    let a = prop1_allocate(link, &demand, beam)?;
                    let e = offload_outcome(link, &a).total_energy();
                    (Some([a.t_edge, a.t_center, a.p_edge, a.p_center]), e)
                }
                OffloadMode::Partial => {
                    let p = baseline_partial(link, &demand, &profile, scenario.mode.partial_fraction, beam)?;
                    let a = &p.allocation;
                    (Some([a.t_edge, a.t_center, a.p_edge, a.p_center]), p.total_energy())
                }
                OffloadMode::None => (None, baseline_no_offload(&demand, &profile, no_offload_time(scenario, &demand))?),
                OffloadMode::Oma => {
                    let (a, e) = baseline_oma(link, &demand, beam)?;
                    (Some([a.t_edge, a.t_phase2 + a.t_phase3, a.p_edge, a.p_center]), e)
                }
            };
            Ok(PairOutcome {
                allocation,
                energy: Some(energy),
                cee: None,
                iterations: 0,
            })
        }
        Objective::CeeMax => {
            if mode == OffloadMode::None {
                let cee = cee_no_offload(&demand, &profile, link.bandwidth, no_offload_time(scenario, &demand))?;
                return Ok(PairOutcome {
                    allocation: None,
                    energy: None,
                    cee: Some(cee),
                    iterations: 0,
                });
            }
            let offloaded = offloaded_demand(scenario, users);
            let mut problem = CeeProblem::new(link.clone(), offloaded, scenario.p_max(), scenario.antennas.bs_elements)?
                .with_solver(scenario.dinkelbach());
            if mode == OffloadMode::Partial {
                problem = problem.with_local(LocalTerms::for_fraction(
                    &demand,
                    &profile,
                    scenario.mode.partial_fraction,
                    link.bandwidth,
                )?);
            }
            let out = optimize_pair(&problem)?;
            let t = problem.phase_time();
            let s = &out.solution;
            let energy = t * (s.p_edge + s.p_center) + problem.local.map_or(0.0, |l| l.energy);
            Ok(PairOutcome {
                allocation: Some([t, t, s.p_edge, s.p_center]),
                energy: Some(energy),
                cee: Some(s.cee),
                iterations: out.upper_bound.trace.len(),
            })
        }
    }
}

/// A deployed and paired edge/center couple with its selected beam.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSetup {
    pub edge: usize,
    pub center: usize,
    pub sidelink_distance: f64,
    pub link: PairLink,
    pub selection: BeamSelection,
}

/// Deploys, pairs and beam-selects one realization.
pub fn pair_setups(scenario: &Scenario, users: usize, trial: u64) -> Result<Vec<PairSetup>> {
    let window = scenario.window()?;
    let gains = scenario.gains()?;
    let noise = scenario.noise()?;
    let n = scenario.antennas.bs_elements;
    let cell = scenario.cell();
    let codebook = Codebook::build(scenario.antennas.codebook_beams, (cell.sector_start, cell.sector_end), n)?;
    let deployment = deploy_users_with(&mut trial_rng(scenario.run.seed, trial), &cell, users / 2)?;
    let pairing = pair_users(&deployment)?;
    pairing
        .assignments
        .iter()
        .enumerate()
        .map(|(idx, &(edge, center))| {
            let cu = deployment.center_users[center];
            let h = bs_channel_vector(&window, &gains, cu.radius, cu.angle, n)?;
            let selection = select_beam(&h, &codebook)?;
            let d_side = pairing.sidelink_distances[idx];
            let link =
                PairLink::new(h, sidelink_gain(&window, &gains, d_side)?, scenario.noma.beta_edge, window.bandwidth, noise)?;
            Ok(PairSetup {
                edge,
                center,
                sidelink_distance: d_side,
                link,
                selection,
            })
        })
        .collect()
}

/// One realization at `users` total users.
pub fn run_trial(scenario: &Scenario, users: usize, trial: u64) -> Result<TrialMetrics> {
    structural_check(scenario, users)?;
    let window = scenario.window()?;
    let k = users / 2;
    let mut pairs = Vec::with_capacity(users / 2);
    for setup in pair_setups(scenario, users, trial)? {
        let mut record = PairMetrics {
            edge: setup.edge,
            center: setup.center,
            sidelink_distance: setup.sidelink_distance,
            beam_index: setup.selection.index,
            allocation: None,
            energy: None,
            cee: None,
            iterations: 0,
            infeasible: None,
        };
        match solve_pair(scenario, &setup.link, &setup.selection.beam, users) {
            Ok(o) => {
                record.allocation = o.allocation;
                record.energy = o.energy;
                record.cee = o.cee;
                record.iterations = o.iterations;
            }
            Err(e) if e.is_infeasibility() => record.infeasible = Some(e.to_string()),
            Err(e) => return Err(e),
        }
        pairs.push(record);
    }

    let served: Vec<&PairMetrics> = pairs.iter().filter(|p| p.infeasible.is_none()).collect();
    let sum = |f: &dyn Fn(&PairMetrics) -> Option<f64>| -> f64 {
        if served.is_empty() {
            f64::NAN
        } else {
            served.iter().map(|p| f(p).unwrap_or(f64::NAN)).sum()
        }
    };
    let total_energy = sum(&|p| p.energy);
    let total_cee = sum(&|p| p.cee);
    let demand = offloaded_demand(scenario, users);
    Ok(TrialMetrics {
        users,
        trial,
        total_energy,
        total_cee,
        max_bits_per_user: max_offload_bits(demand.block, k, window.bandwidth, scenario.noma.beta_edge),
        infeasible_pair_count: pairs.len() - served.len(),
        solver_iterations: pairs.iter().map(|p| p.iterations).sum(),
        pairs,
    })
}

/// Sample mean and standard deviation over the finite values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std: f64,
    pub count: usize,
}

impl Stats {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Stats {
        let v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
        let n = v.len();
        if n == 0 {
            return Stats {
                mean: f64::NAN,
                std: f64::NAN,
                count: 0,
            };
        }
        let mean = v.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Stats { mean, std, count: n }
    }
}

/// Aggregate over the trials of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub users: usize,
    pub energy: Stats,
    pub cee: Stats,
    pub max_bits_per_user: f64,
    /// Share of pairs that could not be served (1 for structurally
    /// infeasible points).
    pub infeasible_rate: f64,
    pub mean_iterations: f64,
    /// Set when the scenario is infeasible for every realization.
    pub structural: Option<String>,
}

/// Maps `f` over `0..trials`, keeping trial order.
pub fn map_trials<T, F>(trials: usize, execution: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match execution {
        Execution::Serial => (0..trials as u64).map(f).collect(),
        Execution::Parallel => parallel_map(trials, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let run = || (0..trials as u64).into_par_iter().map(&f).collect();
    match worker_cap() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..trials as u64).map(f).collect()
}

/// Worker cap from the environment, if set to a positive integer.
pub fn worker_cap() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs all trials at one user count.
pub fn run_point(scenario: &Scenario, users: usize, execution: Execution) -> Result<(SweepPoint, Vec<TrialMetrics>)> {
    if let Err(e) = structural_check(scenario, users) {
        if e.is_infeasibility() {
            let window = scenario.window()?;
            let demand = offloaded_demand(scenario, users);
            let nan = Stats::of([]);
            return Ok((
                SweepPoint {
                    users,
                    energy: nan,
                    cee: nan,
                    max_bits_per_user: max_offload_bits(demand.block, users / 2, window.bandwidth, scenario.noma.beta_edge),
                    infeasible_rate: 1.0,
                    mean_iterations: f64::NAN,
                    structural: Some(e.to_string()),
                },
                Vec::new(),
            ));
        }
        return Err(e);
    }
    let results = map_trials(scenario.run.trials, execution, |t| run_trial(scenario, users, t));
    let trials: Vec<TrialMetrics> = results.into_iter().collect::<Result<_>>()?;
    let pairs: usize = trials.iter().map(|t| t.pairs.len()).sum();
    let infeasible: usize = trials.iter().map(|t| t.infeasible_pair_count).sum();
    let point = SweepPoint {
        users,
        energy: Stats::of(trials.iter().map(|t| t.total_energy)),
        cee: Stats::of(trials.iter().map(|t| t.total_cee)),
        max_bits_per_user: trials.first().map_or(f64::NAN, |t| t.max_bits_per_user),
        infeasible_rate: infeasible as f64 / pairs.max(1) as f64,
        mean_iterations: trials.iter().map(|t| t.solver_iterations as f64).sum::<f64>() / trials.len() as f64,
        structural: None,
    };
    Ok((point, trials))
}

/// Runs every user count of the scenario's sweep.
pub fn monte_carlo(scenario: &Scenario, execution: Execution) -> Result<Vec<SweepPoint>> {
    scenario.validate()?;
    scenario
        .demand
        .users
        .iter()
        .map(|&u| run_point(scenario, u, execution).map(|(p, _)| p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Scenario {
        let mut s = Scenario::default();
        s.run.trials = 4;
        s.demand.users = vec![4, 8];
        s
    }

    #[test]
    fn trial_is_deterministic() {
        let s = small();
        // NaN fields rule out PartialEq
        assert_eq!(format!("{:?}", run_trial(&s, 4, 3).unwrap()), format!("{:?}", run_trial(&s, 4, 3).unwrap()));
    }

    #[test]
    fn serial_equals_parallel() {
        let s = small();
        assert_eq!(
            format!("{:?}", monte_carlo(&s, Execution::Serial).unwrap()),
            format!("{:?}", monte_carlo(&s, Execution::Parallel).unwrap())
        );
    }

    #[test]
    fn single_trial_has_zero_std() {
        let mut s = small();
        s.run.trials = 1;
        let p = monte_carlo(&s, Execution::Serial).unwrap();
        let t = run_trial(&s, 4, 0).unwrap();
        assert_eq!(p[0].energy.mean, t.total_energy);
        assert_eq!(p[0].energy.std, 0.0);
    }

    #[test]
    fn no_offload_ignores_radio() {
        let mut s = small();
        s.mode.offload = OffloadMode::None;
        let a = run_trial(&s, 4, 0).unwrap().total_energy;
        s.channel.window = "f7".into();
        s.antennas.bs_elements = 16;
        let b = run_trial(&s, 4, 0).unwrap().total_energy;
        assert_eq!(a, b);
        assert!((a - 64.0).abs() < 1e-9);
    }

    #[test]
    fn totals_are_pair_sums() {
        let s = small();
        let t = run_trial(&s, 8, 1).unwrap();
        let sum: f64 = t.pairs.iter().filter_map(|p| p.energy).sum();
        assert!((t.total_energy - sum).abs() <= 1e-9 * sum);
    }

    #[test]
    fn over_capacity_is_structural() {
        let mut s = small();
        s.demand.bits_center = 40e9;
        let (p, trials) = run_point(&s, 4, Execution::Serial).unwrap();
        assert!(trials.is_empty());
        assert_eq!(p.infeasible_rate, 1.0);
        assert!(p.structural.is_some());
    }

    #[test]
    fn stats_sample_std() {
        let s = Stats::of([1.0, 2.0, 3.0, f64::NAN]);
        assert_eq!(s.count, 3);
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.std, 1.0);
    }
}

//! Brute-force oracle suites that certify the production solvers.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::beamforming::{beam_gain, cm_beamformer, cm_gain, cosine_similarity, fejer_kernel, BeamVector};
use crate::ceemax::{
    alternating_upper_bound, design_and_finalize, min_feasible_gain, solve_gain_given_power,
    solve_power_given_gain, CeeProblem,
};
use crate::channel::{
    bs_channel_vector, named_window, noise_power, path_loss, sidelink_gain, steering_vector, watts_to_dbm,
    AntennaGains, ChannelVector, MMWAVE_28GHZ,
};
use crate::emin::TaskDemand;
use crate::error::Result;
use crate::linkmodel::PairLink;
use crate::optim::oracle::{brute_force_assignment, grid_max_1d, grid_max_2d, phase_grid_beam_gain, Spacing};
use crate::optim::{hungarian, DinkelbachOptions};

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Check { name, passed, detail }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

/// Reference values from an independent high-precision evaluation.
pub const SPOT_VALUES: [(&str, f64); 8] = [
    ("path_loss f3 1 m", 2.71538794522e10),
    ("path_loss 28 GHz 1 m", 1.37560352897e6),
    ("noise 137 GHz Nf=10, dBm", -52.6327943284),
    ("noise 2 GHz Nf=10, dBm", -70.9897000434),
    ("sidelink |h|^2 f3 2 m", 2.78333614460e-11),
    ("sidelink |h|^2 28 GHz 2 m", 7.26953645393e-7),
    ("||h||^2 f3 1 m N=4", 1.17287108297e-7),
    ("fejer N=4 x=pi/4", 0.653281482438),
];

fn spot_computed() -> Result<[f64; 8]> {
    let f3 = named_window("f3").expect("f3 is a named window");
    let g = AntennaGains::new(2.0, 2.0, 398.1)?;
    Ok([
        path_loss(&f3, 1.0)?,
        path_loss(&MMWAVE_28GHZ, 1.0)?,
        watts_to_dbm(noise_power(137e9, 10.0)?),
        watts_to_dbm(noise_power(2e9, 10.0)?),
        sidelink_gain(&f3, &g, 2.0)?.powi(2),
        sidelink_gain(&MMWAVE_28GHZ, &g, 2.0)?.powi(2),
        bs_channel_vector(&f3, &g, 1.0, 0.4, 4)?.norm_sqr(),
        fejer_kernel(4, PI / 4.0),
    ])
}

/// Channel and propagation spot values to 6 significant digits.
pub fn spot_values() -> Check {
    let computed = match spot_computed() {
        Ok(c) => c,
        Err(e) => return Check::new("spot values", false, e.to_string()),
    };
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for ((name, want), got) in SPOT_VALUES.iter().zip(computed) {
        let rel = ((got - want) / want).abs();
        worst = worst.max(rel);
        if rel > 5e-7 {
            failures.push(format!("{name}: {got} vs {want}"));
        }
    }
    let detail = if failures.is_empty() {
        format!("{} values, worst relative error {worst:.2e}", SPOT_VALUES.len())
    } else {
        failures.join("; ")
    };
    Check::new("spot values", failures.is_empty(), detail)
}

/// Hungarian vs exhaustive search on random `K x K` costs, `K <= 6`.
pub fn hungarian_suite(instances: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    for i in 0..instances {
        let k = 1 + i % 6;
        let cost: Vec<Vec<f64>> = (0..k).map(|_| (0..k).map(|_| rng.gen_range(0.0..10.0)).collect()).collect();
        let (_, best) = brute_force_assignment(&cost);
        match hungarian(&cost) {
            Ok(a) if (a.total_cost - best).abs() <= 1e-9 * best.abs().max(1.0) => {}
            _ => mismatches += 1,
        }
    }
    Check::new(
        "hungarian vs brute force",
        mismatches == 0,
        format!("{mismatches} mismatches in {instances} instances (K <= 6)"),
    )
}

/// Steering-vector cosine similarity vs the Fejer closed form.
pub fn fejer_suite(instances: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..instances {
        let n = 1 + i % 16;
        let a: f64 = rng.gen_range(-PI / 2.0..PI / 2.0);
        let b: f64 = rng.gen_range(-PI / 2.0..PI / 2.0);
        let (Ok(h), Ok(w)) = (steering_vector(a, n), steering_vector(b, n)) else {
            return Check::new("cosine vs fejer", false, "steering vector failed".into());
        };
        let Ok(s) = cosine_similarity(&h, &BeamVector::from(w)) else {
            return Check::new("cosine vs fejer", false, "similarity failed".into());
        };
        let f = fejer_kernel(n, PI * (a.sin() - b.sin()));
        worst = worst.max((s - f).abs());
    }
    Check::new(
        "cosine vs fejer",
        worst <= 1e-10,
        format!("max abs error {worst:.2e} over {instances} pairs"),
    )
}

fn random_channel(rng: &mut ChaCha8Rng, n: usize) -> ChannelVector {
    let entries = (0..n)
        .map(|_| Complex64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(-PI..PI)))
        .collect();
    ChannelVector::new(entries).expect("finite entries")
}

/// CM beamformer gain vs a phase-grid search.
pub fn cm_suite(instances: usize, seed: u64) -> Check {
    const LEVELS: usize = 128;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..instances {
        let h = random_channel(&mut rng, 2 + i % 3);
        let Ok(w) = cm_beamformer(&h, [0.0, 0.0]) else {
            return Check::new("cm beamformer vs phase grid", false, "beamformer failed".into());
        };
        let got = beam_gain(&h, &w);
        let grid = phase_grid_beam_gain(h.entries(), LEVELS);
        worst = worst.max(((got - grid) / grid).abs()).max(((got - cm_gain(&h)) / got).abs());
    }
    Check::new(
        "cm beamformer vs phase grid",
        worst <= 1e-3,
        format!("max relative gain gap {worst:.2e} ({LEVELS}-level grid, {instances} channels)"),
    )
}

/// A random CEE instance, or `None` when it is infeasible.
pub fn random_cee_problem(rng: &mut ChaCha8Rng) -> Option<CeeProblem> {
    let win = named_window("f3")?;
    let gains = AntennaGains::default();
    let n = 4;
    let mut h = bs_channel_vector(&win, &gains, rng.gen_range(1.0..3.0), rng.gen_range(-0.5..1.5), n).ok()?;
    if rng.gen_bool(0.5) {
        // scattered channel so the CM gain sits below the ideal cap
        let e: Vec<Complex64> = h
            .entries()
            .iter()
            .map(|z| z * Complex64::from_polar(rng.gen_range(0.6..1.4), rng.gen_range(-0.6..0.6)))
            .collect();
        h = ChannelVector::new(e).ok()?;
    }
    let link = PairLink::new(
        h,
        sidelink_gain(&win, &gains, rng.gen_range(0.3..1.5)).ok()?,
        rng.gen_range(0.1..0.4),
        win.bandwidth,
        noise_power(win.bandwidth, 10.0).ok()?,
    )
    .ok()?;
    let bits = 10f64.powf(rng.gen_range(7.0..8.5));
    let demand = TaskDemand {
        bits_edge: bits,
        bits_center: bits * rng.gen_range(0.5..2.0),
        block: 0.25,
        pair_count: 2,
    };
    let p = CeeProblem::new(link, demand, 8.0, n).ok()?;
    alternating_upper_bound(&p).ok()?;
    Some(p)
}

/// Per-instance findings of [`cee_suite`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CeeCertificate {
    pub instances: usize,
    /// Worst `|eta - eta_grid| / eta_grid` over the power steps.
    pub power_gap: f64,
    /// Worst relative objective gap of the gain step vs the 1-D grid.
    pub gain_gap: f64,
    pub max_dinkelbach_iters: usize,
    pub max_residual: f64,
    pub nonmonotone_traces: usize,
    pub bound_violations: usize,
    pub errors: Vec<String>,
}

impl CeeCertificate {
    pub fn passed(&self, eps: f64, max_iters: usize) -> bool {
        self.errors.is_empty()
            && self.power_gap <= 1e-3
            && self.gain_gap <= 1e-6
            && self.max_dinkelbach_iters <= max_iters
            && self.max_residual < eps
            && self.nonmonotone_traces == 0
            && self.bound_violations == 0
    }
}

fn certify(p: &CeeProblem, grid_points: usize, line_points: usize, cert: &mut CeeCertificate) -> Result<()> {
    let ub = alternating_upper_bound(p)?;
    let sol = design_and_finalize(p, &ub)?;
    if ub.trace.windows(2).any(|w| w[1] < w[0] * (1.0 - 1e-9)) {
        cert.nonmonotone_traces += 1;
    }
    if sol.cee > ub.cee * (1.0 + 1e-9) {
        cert.bound_violations += 1;
    }
    let lo_gain = min_feasible_gain(p)?;
    let gains = [ub.gain, sol.gain, 0.5 * (lo_gain + p.gain_cap())];
    for gain in gains {
        let step = solve_power_given_gain(p, gain)?;
        cert.max_dinkelbach_iters = cert.max_dinkelbach_iters.max(step.iterations);
        cert.max_residual = cert.max_residual.max(step.residual);
        let region = p.power_region(gain)?;
        let grid = grid_max_2d(
            |q| p.numerator(q[0], q[1], gain) / p.denominator(q[0], q[1]),
            &region,
            grid_points,
            Spacing::Log,
        )
        .ok_or_else(|| crate::Error::domain("empty grid"))?;
        cert.power_gap = cert.power_gap.max(((step.cee - grid.value) / grid.value).abs());
    }
    // gain step at the upper-bound powers
    let c = solve_gain_given_power(p, ub.p_edge, ub.p_center)?;
    let [a, b] = p.gain_floors(ub.p_center)?;
    let (_, best) = grid_max_1d(|g| p.numerator(ub.p_edge, ub.p_center, g), a.max(b), p.gain_cap(), line_points);
    let got = p.numerator(ub.p_edge, ub.p_center, c);
    cert.gain_gap = cert.gain_gap.max(((best - got) / best).max(0.0));
    Ok(())
}

/// Power steps vs a 2-D grid-plus-polish, gain step vs a 1-D grid, plus
/// Dinkelbach convergence and alternation monotonicity.
pub fn cee_suite(instances: usize, seed: u64, grid_points: usize, line_points: usize) -> CeeCertificate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cert = CeeCertificate::default();
    let mut attempts = 0;
    while cert.instances < instances && attempts < 100 * instances {
        attempts += 1;
        let Some(p) = random_cee_problem(&mut rng) else {
            continue;
        };
        cert.instances += 1;
        if let Err(e) = certify(&p, grid_points, line_points, &mut cert) {
            cert.errors.push(e.to_string());
        }
    }
    if cert.instances < instances {
        cert.errors.push(format!("only {} feasible instances drawn", cert.instances));
    }
    cert
}

fn cee_checks(instances: usize, seed: u64) -> Vec<Check> {
    let opts = DinkelbachOptions::default();
    let c = cee_suite(instances, seed, 400, 1_000_000);
    let errors = if c.errors.is_empty() {
        String::new()
    } else {
        format!("; errors: {}", c.errors.join(", "))
    };
    vec![
        Check::new(
            "power step vs 400x400 grid",
            c.errors.is_empty() && c.power_gap <= 1e-3,
            format!("worst relative eta gap {:.2e} on {} instances{errors}", c.power_gap, c.instances),
        ),
        Check::new(
            "gain step vs 1e6-point grid",
            c.errors.is_empty() && c.gain_gap <= 1e-6,
            format!("worst relative shortfall {:.2e}", c.gain_gap),
        ),
        Check::new(
            "dinkelbach convergence",
            c.max_residual < opts.eps && c.max_dinkelbach_iters <= opts.max_iters,
            format!("max F(lambda*) {:.2e}, max iterations {}", c.max_residual, c.max_dinkelbach_iters),
        ),
        Check::new(
            "alternation monotone and bounded",
            c.nonmonotone_traces == 0 && c.bound_violations == 0,
            format!(
                "{} non-monotone traces, {} final > upper bound",
                c.nonmonotone_traces, c.bound_violations
            ),
        ),
    ]
}

/// Every suite with its default size.
pub fn run_all(seed: u64) -> Vec<Check> {
    let mut out = vec![
        hungarian_suite(100, seed),
        fejer_suite(1000, seed),
        cm_suite(30, seed),
        spot_values(),
    ];
    out.extend(cee_checks(50, seed));
    out
}

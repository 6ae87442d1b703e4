//! Figure presets: parameter sweeps that reproduce the evaluation plots.

use crate::emin::max_offload_bits;
use crate::error::{Error, Result};

use super::output::{Series, Table, GIT_REVISION};
use super::runner::{run_point, Execution, SweepPoint};
use super::scenario::{Objective, OffloadMode, Scenario};

/// Names accepted by [`figure`].
pub const FIGURES: [&str; 10] = [
    "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12",
];

/// Per-user task sizes for the bits sweeps, bits.
pub const BITS_GRID: [f64; 6] = [0.5e9, 1e9, 1.5e9, 2e9, 2.5e9, 3e9];

/// Block lengths for the CEE-vs-T sweep, s.
pub const BLOCK_GRID: [f64; 10] = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5];

/// User counts plotted as separate curves.
pub const USER_SERIES: [usize; 5] = [4, 8, 12, 16, 20];

/// Power cap used by the CEE presets, dBm (9 dBW).
pub const CEE_PRESET_P_MAX_DBM: f64 = 39.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Energy,
    Cee,
    MaxBits,
}

impl Metric {
    fn prefix(self) -> &'static str {
        match self {
            Metric::Energy => "energy",
            Metric::Cee => "cee",
            Metric::MaxBits => "max_bits",
        }
    }

    fn unit(self) -> &'static str {
        match self {
            Metric::Energy => "J",
            Metric::Cee => "bpJHz",
            Metric::MaxBits => "bits",
        }
    }

    fn label(self) -> &'static str {
        match self {
            Metric::Energy => "total energy (J)",
            Metric::Cee => "computation energy efficiency (bit/J/Hz)",
            Metric::MaxBits => "max offloaded bits per user",
        }
    }
}

/// One cell of a sweep: the scenario to run and the user count.
struct Cell {
    scenario: Scenario,
    users: usize,
}

/// Builds a table whose rows are `xs` and whose curves are `series`.
#[allow(clippy::too_many_arguments)]
fn sweep_table(
    name: &str,
    base: &Scenario,
    x_col: &str,
    xlabel: &str,
    xs: &[f64],
    series: &[String],
    metric: Metric,
    exec: Execution,
    cell: impl Fn(f64, usize) -> Cell,
) -> Result<Table> {
    let unit = metric.unit();
    let prefix = metric.prefix();
    let mut columns = vec![x_col.to_string()];
    for s in series {
        columns.push(format!("{prefix}_{s}_{unit}"));
    }
    if metric != Metric::MaxBits {
        for s in series {
            columns.push(format!("std_{prefix}_{s}_{unit}"));
        }
        for s in series {
            columns.push(format!("infeasible_rate_{s}"));
        }
    }
    let mut table = Table::new(name, columns);
    for &x in xs {
        let mut means = Vec::with_capacity(series.len());
        let mut stds = Vec::with_capacity(series.len());
        let mut rates = Vec::with_capacity(series.len());
        for k in 0..series.len() {
            let c = cell(x, k);
            c.scenario.validate()?;
            if metric == Metric::MaxBits {
                means.push(max_bits(&c.scenario, c.users)?);
                continue;
            }
            let (p, _) = run_point(&c.scenario, c.users, exec)?;
            let stats = if metric == Metric::Energy { p.energy } else { p.cee };
            means.push(stats.mean);
            stds.push(stats.std);
            rates.push(p.infeasible_rate);
        }
        let mut row = vec![x];
        row.extend(means);
        row.extend(stds);
        row.extend(rates);
        table.push_row(row);
    }
    table.meta = metadata(name, base);
    table.auto_plot(xlabel, metric.label());
    Ok(table)
}

fn max_bits(s: &Scenario, users: usize) -> Result<f64> {
    let w = s.window()?;
    Ok(max_offload_bits(s.demand.block_s, users / 2, w.bandwidth, s.noma.beta_edge))
}

pub fn metadata(name: &str, scenario: &Scenario) -> Vec<(String, String)> {
    vec![
        ("table".into(), name.into()),
        ("scenario_hash".into(), scenario.hash()),
        ("seed".into(), scenario.run.seed.to_string()),
        ("trials".into(), scenario.run.trials.to_string()),
        ("git_revision".into(), GIT_REVISION.into()),
    ]
}

fn users_axis(base: &Scenario) -> Vec<f64> {
    base.demand.users.iter().map(|&u| u as f64).collect()
}

fn with<F: FnOnce(&mut Scenario)>(base: &Scenario, f: F) -> Scenario {
    let mut s = base.clone();
    f(&mut s);
    s
}

fn energy_base(base: &Scenario) -> Scenario {
    with(base, |s| {
        s.mode.objective = Objective::EnergyMin;
        s.mode.offload = OffloadMode::Full;
    })
}

fn cee_base(base: &Scenario) -> Scenario {
    with(base, |s| {
        s.mode.objective = Objective::CeeMax;
        s.mode.offload = OffloadMode::Full;
        s.power.p_max_dbm = CEE_PRESET_P_MAX_DBM;
    })
}

fn mode_name(m: OffloadMode) -> &'static str {
    match m {
        OffloadMode::Full => "full",
        OffloadMode::Partial => "partial",
        OffloadMode::None => "none",
        OffloadMode::Oma => "oma",
        OffloadMode::Mmwave => "mmwave",
    }
}

fn user_labels() -> Vec<String> {
    USER_SERIES.iter().map(|u| format!("u{u}")).collect()
}

/// Task-size sweep with one curve per user count, for each offloading mode.
fn bits_sweeps(prefix: &str, base: &Scenario, metric: Metric, exec: Execution) -> Result<Vec<Table>> {
    [OffloadMode::Full, OffloadMode::Partial, OffloadMode::None]
        .into_iter()
        .map(|mode| {
            let name = format!("{prefix}_{}", mode_name(mode));
            sweep_table(
                &name,
                base,
                "bits_per_user_bits",
                "task size per user (bits)",
                &BITS_GRID,
                &user_labels(),
                metric,
                exec,
                |l, k| Cell {
                    scenario: with(base, |s| {
                        s.mode.offload = mode;
                        s.demand.bits_edge = l;
                        s.demand.bits_center = l;
                    }),
                    users: USER_SERIES[k],
                },
            )
        })
        .collect()
}

/// Users sweep where each curve applies one scenario edit.
fn users_sweep(
    name: &str,
    base: &Scenario,
    metric: Metric,
    exec: Execution,
    variants: &[(String, Scenario)],
) -> Result<Table> {
    let labels: Vec<String> = variants.iter().map(|v| v.0.clone()).collect();
    sweep_table(name, base, "users", "number of users", &users_axis(base), &labels, metric, exec, |u, k| Cell {
        scenario: variants[k].1.clone(),
        users: u as usize,
    })
}

fn fmt_num(v: f64) -> String {
    let s = format!("{v}");
    s.replace('.', "p")
}

/// Runs one figure preset on top of `base`.
pub fn figure(name: &str, base: &Scenario, exec: Execution) -> Result<Vec<Table>> {
    base.validate()?;
    match name {
        "fig3" => bits_sweeps("fig3", &energy_base(base), Metric::Energy, exec),
        "fig4" => {
            let b = energy_base(base);
            let v = vec![
                ("noma".to_string(), b.clone()),
                ("oma".to_string(), with(&b, |s| s.mode.offload = OffloadMode::Oma)),
            ];
            Ok(vec![users_sweep("fig4", &b, Metric::Energy, exec, &v)?])
        }
        "fig5" => {
            let b = energy_base(base);
            let mm = with(&b, |s| s.mode.offload = OffloadMode::Mmwave);
            let a = users_sweep(
                "fig5a",
                &b,
                Metric::MaxBits,
                exec,
                &[("thz".to_string(), b.clone()), ("mmwave".to_string(), mm.clone())],
            )?;
            let thz: Vec<(String, Scenario)> = [1e9, 3e9, 5e9]
                .iter()
                .map(|&l| {
                    (
                        format!("L{}Gbit", l / 1e9),
                        with(&b, |s| {
                            s.demand.bits_edge = l;
                            s.demand.bits_center = l;
                        }),
                    )
                })
                .collect();
            let mmw: Vec<(String, Scenario)> = [10e6, 30e6, 50e6]
                .iter()
                .map(|&l| {
                    (
                        format!("L{}Mbit", l / 1e6),
                        with(&mm, |s| {
                            s.demand.bits_edge = l;
                            s.demand.bits_center = l;
                        }),
                    )
                })
                .collect();
            Ok(vec![
                a,
                users_sweep("fig5b", &b, Metric::Energy, exec, &thz)?,
                users_sweep("fig5c", &mm, Metric::Energy, exec, &mmw)?,
            ])
        }
        "fig6" => {
            let b = energy_base(base);
            let v: Vec<(String, Scenario)> = [(1e9, 1e9), (1e9, 2e9), (2e9, 1e9), (1e9, 3e9), (3e9, 1e9)]
                .iter()
                .map(|&(lc, le)| {
                    (
                        format!("Lc{}G_Le{}G", lc / 1e9, le / 1e9),
                        with(&b, |s| {
                            s.demand.bits_center = lc;
                            s.demand.bits_edge = le;
                        }),
                    )
                })
                .collect();
            Ok(vec![users_sweep("fig6", &b, Metric::Energy, exec, &v)?])
        }
        "fig7" => {
            let b = energy_base(base);
            let v: Vec<(String, Scenario)> = [0.1, 0.2, 0.3, 0.4]
                .iter()
                .map(|&beta| (format!("beta{}", fmt_num(beta)), with(&b, |s| s.noma.beta_edge = beta)))
                .collect();
            Ok(vec![
                users_sweep("fig7a", &b, Metric::MaxBits, exec, &v)?,
                users_sweep("fig7b", &b, Metric::Energy, exec, &v)?,
            ])
        }
        "fig8" => {
            let b = energy_base(base);
            let v: Vec<(String, Scenario)> = (1..=9)
                .map(|i| {
                    let w = format!("f{i}");
                    (w.clone(), with(&b, |s| s.channel.window = w))
                })
                .collect();
            Ok(vec![
                users_sweep("fig8a", &b, Metric::MaxBits, exec, &v)?,
                users_sweep("fig8b", &b, Metric::Energy, exec, &v)?,
            ])
        }
        "fig9" => {
            let b = energy_base(base);
            Ok(vec![users_sweep("fig9", &b, Metric::Energy, exec, &antenna_variants(&b))?])
        }
        "fig10" => bits_sweeps("fig10", &cee_base(base), Metric::Cee, exec),
        "fig11" => {
            let b = cee_base(base);
            Ok(vec![sweep_table(
                "fig11",
                &b,
                "block_s",
                "block length T (s)",
                &BLOCK_GRID,
                &user_labels(),
                Metric::Cee,
                exec,
                |t, k| Cell {
                    scenario: with(&b, |s| s.demand.block_s = t),
                    users: USER_SERIES[k],
                },
            )?])
        }
        "fig12" => {
            let b = cee_base(base);
            Ok(vec![users_sweep("fig12", &b, Metric::Cee, exec, &antenna_variants(&b))?])
        }
        other => Err(Error::config(
            "figure",
            format!("unknown figure `{other}` (expected one of {})", FIGURES.join(", ")),
        )),
    }
}

fn antenna_variants(b: &Scenario) -> Vec<(String, Scenario)> {
    [2usize, 4, 8, 16]
        .iter()
        .map(|&n| (format!("N{n}"), with(b, |s| s.antennas.bs_elements = n)))
        .collect()
}

/// Table for the `run` command: one row per user count.
pub fn run_table(scenario: &Scenario, points: &[SweepPoint]) -> Table {
    let (metric, name) = match scenario.mode.objective {
        Objective::EnergyMin => (Metric::Energy, "energy"),
        Objective::CeeMax => (Metric::Cee, "cee"),
    };
    let unit = metric.unit();
    let mut t = Table::new(
        "run",
        vec![
            "users".into(),
            format!("{name}_mean_{unit}"),
            format!("{name}_std_{unit}"),
            "max_offload_bits_per_user_bits".into(),
            "infeasible_rate".into(),
        ],
    );
    for p in points {
        let s = if metric == Metric::Energy { p.energy } else { p.cee };
        t.push_row(vec![p.users as f64, s.mean, s.std, p.max_bits_per_user, p.infeasible_rate]);
    }
    t.meta = metadata("run", scenario);
    t.meta.push(("mode".into(), mode_name(scenario.mode.offload).into()));
    t.auto_plot("number of users", metric.label());
    // the bits column lives on a different scale
    t.plot.series = vec![Series {
        title: t.columns[1].clone(),
        y: 1,
        err: Some(2),
    }];
    t
}

//! TOML scenario files. Every key is optional and defaults to the reference
//! system parameters, so an empty file is a valid scenario.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{
    dbm_to_watts, named_window, noise_power, AntennaGains, ThzWindow, MMWAVE_28GHZ, MMWAVE_NOISE_DBM,
};
use crate::emin::{ComputeProfile, TaskDemand};
use crate::error::{Error, Result};
use crate::optim::DinkelbachOptions;
use crate::topology::CellGeometry;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    /// `f1`..`f9`, or `custom` to use the three explicit fields below.
    pub window: String,
    pub center_frequency_hz: Option<f64>,
    pub bandwidth_hz: Option<f64>,
    pub absorption_per_m: Option<f64>,
    pub noise_figure_db: f64,
    /// Overrides the thermal-noise computation when set.
    pub noise_dbm: Option<f64>,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            window: "f3".into(),
            center_frequency_hz: None,
            bandwidth_hz: None,
            absorption_per_m: None,
            noise_figure_db: 10.0,
            noise_dbm: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AntennaConfig {
    pub bs_elements: usize,
    pub codebook_beams: usize,
    pub user_gain_dbi: f64,
    pub bs_gain_dbi: f64,
}

impl Default for AntennaConfig {
    fn default() -> Self {
        AntennaConfig {
            bs_elements: 4,
            codebook_beams: 20,
            user_gain_dbi: 3.0,
            bs_gain_dbi: 26.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub center_radius_m: f64,
    pub edge_radius_m: f64,
    pub min_radius_m: f64,
    pub sector_start_deg: f64,
    pub sector_end_deg: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            center_radius_m: 3.0,
            edge_radius_m: 5.0,
            min_radius_m: 0.5,
            sector_start_deg: -30.0,
            sector_end_deg: 90.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemandConfig {
    pub bits_edge: f64,
    pub bits_center: f64,
    pub block_s: f64,
    /// Total users per sweep point; each must be even.
    pub users: Vec<usize>,
}

impl Default for DemandConfig {
    fn default() -> Self {
        DemandConfig {
            bits_edge: 1e9,
            bits_center: 1e9,
            block_s: 0.25,
            users: (4..=20).step_by(2).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NomaConfig {
    pub beta_edge: f64,
}

impl Default for NomaConfig {
    fn default() -> Self {
        NomaConfig { beta_edge: 0.3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerConfig {
    pub p_max_dbm: f64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig { p_max_dbm: 9.0 }
    }
}

/// Time available to the local CPU when nothing is offloaded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalTime {
    /// The whole block `T`.
    Block,
    /// The pair's slot `T/K`.
    Slot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComputeConfig {
    pub cycles_per_bit: f64,
    pub capacitance: f64,
    pub no_offload_time: LocalTime,
}

impl Default for ComputeConfig {
    fn default() -> Self {
        let p = ComputeProfile::default();
        ComputeConfig {
            cycles_per_bit: p.cycles_per_bit,
            capacitance: p.capacitance_coeff,
            no_offload_time: LocalTime::Block,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OffloadMode {
    Full,
    Partial,
    None,
    Oma,
    Mmwave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    EnergyMin,
    CeeMax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModeConfig {
    pub offload: OffloadMode,
    /// Offloaded share of each task in `partial` mode.
    pub partial_fraction: f64,
    pub objective: Objective,
}

impl Default for ModeConfig {
    fn default() -> Self {
        ModeConfig {
            offload: OffloadMode::Full,
            partial_fraction: 0.8,
            objective: Objective::EnergyMin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub dinkelbach_eps: f64,
    pub dinkelbach_lambda0: f64,
    pub max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = DinkelbachOptions::default();
        SolverConfig {
            dinkelbach_eps: d.eps,
            dinkelbach_lambda0: d.lambda0,
            max_iters: d.max_iters,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub trials: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { trials: 100, seed: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub channel: ChannelConfig,
    pub antennas: AntennaConfig,
    pub geometry: GeometryConfig,
    pub demand: DemandConfig,
    pub noma: NomaConfig,
    pub power: PowerConfig,
    pub compute: ComputeConfig,
    pub mode: ModeConfig,
    pub solver: SolverConfig,
    pub run: RunConfig,
}

fn check(ok: bool, field: &str, message: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(field, message))
    }
}

fn positive(v: f64) -> bool {
    v > 0.0 && v.is_finite()
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let field = msg
                .split('`')
                .nth(1)
                .map(str::to_string)
                .unwrap_or_else(|| "<file>".into());
            Error::config(field, msg)
        })?;
        s.validate()?;
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("<file>", format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// First 16 hex digits of the SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.window()?;
        let ch = &self.channel;
        check(ch.noise_figure_db.is_finite(), "channel.noise_figure_db", "must be finite")?;
        if let Some(n) = ch.noise_dbm {
            check(n.is_finite(), "channel.noise_dbm", "must be finite")?;
        }
        let a = &self.antennas;
        check(a.bs_elements >= 1, "antennas.bs_elements", "must be at least 1")?;
        check(a.codebook_beams >= 1, "antennas.codebook_beams", "must be at least 1")?;
        check(a.user_gain_dbi.is_finite(), "antennas.user_gain_dbi", "must be finite")?;
        check(a.bs_gain_dbi.is_finite(), "antennas.bs_gain_dbi", "must be finite")?;
        let g = &self.geometry;
        check(positive(g.min_radius_m), "geometry.min_radius_m", "must be positive")?;
        check(
            g.center_radius_m > g.min_radius_m,
            "geometry.center_radius_m",
            "must exceed geometry.min_radius_m",
        )?;
        check(
            g.edge_radius_m > g.center_radius_m && g.edge_radius_m.is_finite(),
            "geometry.edge_radius_m",
            "must exceed geometry.center_radius_m",
        )?;
        check(
            g.sector_start_deg >= -180.0 && g.sector_start_deg < g.sector_end_deg,
            "geometry.sector_start_deg",
            "must be >= -180 and below geometry.sector_end_deg",
        )?;
        check(g.sector_end_deg <= 180.0, "geometry.sector_end_deg", "must be <= 180")?;
        let d = &self.demand;
        check(positive(d.bits_edge), "demand.bits_edge", "must be positive")?;
        check(positive(d.bits_center), "demand.bits_center", "must be positive")?;
        check(positive(d.block_s), "demand.block_s", "must be positive")?;
        check(!d.users.is_empty(), "demand.users", "must list at least one user count")?;
        check(
            d.users.iter().all(|&u| u >= 2 && u % 2 == 0),
            "demand.users",
            "user counts must be even and at least 2",
        )?;
        check(
            self.noma.beta_edge > 0.0 && self.noma.beta_edge < 1.0,
            "noma.beta_edge",
            "must lie in (0, 1)",
        )?;
        check(self.power.p_max_dbm.is_finite(), "power.p_max_dbm", "must be finite")?;
        let c = &self.compute;
        check(positive(c.cycles_per_bit), "compute.cycles_per_bit", "must be positive")?;
        check(positive(c.capacitance), "compute.capacitance", "must be positive")?;
        let m = &self.mode;
        check(
            m.partial_fraction > 0.0 && m.partial_fraction < 1.0,
            "mode.partial_fraction",
            "must lie in (0, 1)",
        )?;
        check(
            !(m.objective == Objective::CeeMax && m.offload == OffloadMode::Oma),
            "mode.offload",
            "oma is only defined for objective = energy_min",
        )?;
        let s = &self.solver;
        check(positive(s.dinkelbach_eps), "solver.dinkelbach_eps", "must be positive")?;
        check(s.dinkelbach_lambda0.is_finite(), "solver.dinkelbach_lambda0", "must be finite")?;
        check(s.max_iters >= 1, "solver.max_iters", "must be at least 1")?;
        check(self.run.trials >= 1, "run.trials", "must be at least 1")?;
        Ok(())
    }

    /// Carrier window in effect (the mmWave mode forces the 28 GHz channel).
    pub fn window(&self) -> Result<ThzWindow> {
        if self.mode.offload == OffloadMode::Mmwave {
            return Ok(MMWAVE_28GHZ);
        }
        let ch = &self.channel;
        if ch.window.eq_ignore_ascii_case("custom") {
            let f = ch
                .center_frequency_hz
                .ok_or_else(|| Error::config("channel.center_frequency_hz", "required for a custom window"))?;
            let w = ch
                .bandwidth_hz
                .ok_or_else(|| Error::config("channel.bandwidth_hz", "required for a custom window"))?;
            let k = ch
                .absorption_per_m
                .ok_or_else(|| Error::config("channel.absorption_per_m", "required for a custom window"))?;
            return ThzWindow::new(f, w, k).map_err(|e| Error::config("channel.window", e.to_string()));
        }
        named_window(&ch.window)
            .ok_or_else(|| Error::config("channel.window", format!("unknown window `{}`", ch.window)))
    }

    /// Receiver noise power, W.
    pub fn noise(&self) -> Result<f64> {
        if self.mode.offload == OffloadMode::Mmwave {
            return Ok(dbm_to_watts(MMWAVE_NOISE_DBM));
        }
        if let Some(n) = self.channel.noise_dbm {
            return Ok(dbm_to_watts(n));
        }
        noise_power(self.window()?.bandwidth, self.channel.noise_figure_db)
    }

    pub fn gains(&self) -> Result<AntennaGains> {
        AntennaGains::from_dbi(self.antennas.user_gain_dbi, self.antennas.bs_gain_dbi)
    }

    pub fn cell(&self) -> CellGeometry {
        let g = &self.geometry;
        CellGeometry {
            center_radius: g.center_radius_m,
            edge_radius: g.edge_radius_m,
            min_radius: g.min_radius_m,
            sector_start: g.sector_start_deg.to_radians(),
            sector_end: g.sector_end_deg.to_radians(),
        }
    }

    pub fn demand(&self, users: usize) -> TaskDemand {
        TaskDemand {
            bits_edge: self.demand.bits_edge,
            bits_center: self.demand.bits_center,
            block: self.demand.block_s,
            pair_count: users / 2,
        }
    }

    pub fn profile(&self) -> ComputeProfile {
        ComputeProfile {
            cycles_per_bit: self.compute.cycles_per_bit,
            capacitance_coeff: self.compute.capacitance,
        }
    }

    pub fn p_max(&self) -> f64 {
        dbm_to_watts(self.power.p_max_dbm)
    }

    pub fn dinkelbach(&self) -> DinkelbachOptions {
        DinkelbachOptions {
            lambda0: self.solver.dinkelbach_lambda0,
            eps: self.solver.dinkelbach_eps,
            max_iters: self.solver.max_iters,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let s = Scenario::from_toml_str("").unwrap();
        assert_eq!(s, Scenario::default());
        assert_eq!(s.demand.users, vec![4, 6, 8, 10, 12, 14, 16, 18, 20]);
        assert!((s.noise().unwrap() - 5.458e-9).abs() < 1e-11);
    }

    #[test]
    fn field_names_in_errors() {
        let e = Scenario::from_toml_str("[noma]\nbeta_edge = 1.5\n").unwrap_err();
        assert!(matches!(e, Error::Config { ref field, .. } if field == "noma.beta_edge"));
        let e = Scenario::from_toml_str("[geometry]\nmin_radius_m = 4.0\n").unwrap_err();
        assert!(matches!(e, Error::Config { ref field, .. } if field == "geometry.center_radius_m"));
        let e = Scenario::from_toml_str("[solver]\nbogus = 1\n").unwrap_err();
        assert!(matches!(e, Error::Config { ref field, .. } if field == "bogus"), "{e:?}");
        let e = Scenario::from_toml_str("[demand]\nusers = [3]\n").unwrap_err();
        assert!(matches!(e, Error::Config { ref field, .. } if field == "demand.users"));
    }

    #[test]
    fn custom_window_needs_all_fields() {
        let e = Scenario::from_toml_str("[channel]\nwindow = \"custom\"\nbandwidth_hz = 1e9\n").unwrap_err();
        assert!(matches!(e, Error::Config { ref field, .. } if field == "channel.center_frequency_hz"));
        let s = Scenario::from_toml_str(
            "[channel]\nwindow = \"custom\"\ncenter_frequency_hz = 1e12\nbandwidth_hz = 1e9\nabsorption_per_m = 0.1\n",
        )
        .unwrap();
        assert_eq!(s.window().unwrap().bandwidth, 1e9);
    }

    #[test]
    fn mmwave_overrides_channel() {
        let s = Scenario::from_toml_str("[mode]\noffload = \"mmwave\"\n").unwrap();
        assert_eq!(s.window().unwrap(), MMWAVE_28GHZ);
        assert!((s.noise().unwrap() - 1e-7).abs() < 1e-20);
    }

    #[test]
    fn hash_tracks_content() {
        let a = Scenario::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.run.seed = 2;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }
}

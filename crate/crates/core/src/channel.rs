//! Line-of-sight THz/mmWave propagation primitives.
//!
//! Everything here works in linear SI units (W, Hz, m). Decibel values only
//! appear in the conversion helpers, which the configuration layer uses at
//! its boundary.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Propagation speed, rounded to 3e8 m/s.
pub const SPEED_OF_LIGHT: f64 = 3e8;

/// Thermal noise density at room temperature, dBm/Hz.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

/// A contiguous carrier window: center frequency, bandwidth and the water
/// vapour absorption coefficient at that frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThzWindow {
    /// Hz
    pub center_frequency: f64,
    /// Hz
    pub bandwidth: f64,
    /// 1/m
    pub absorption_coeff: f64,
}

impl ThzWindow {
    pub fn new(center_frequency: f64, bandwidth: f64, absorption_coeff: f64) -> Result<Self> {
        let w = ThzWindow {
            center_frequency,
            bandwidth,
            absorption_coeff,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.center_frequency > 0.0 && self.center_frequency.is_finite()) {
            return Err(Error::domain("center frequency must be positive"));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::domain("bandwidth must be positive"));
        }
        if !(self.absorption_coeff >= 0.0 && self.absorption_coeff.is_finite()) {
            return Err(Error::domain("absorption coefficient must be non-negative"));
        }
        Ok(())
    }
}

/// The nine low-absorption THz windows between 1 and 10 THz.
pub const THZ_WINDOWS: [(&str, ThzWindow); 9] = [
    ("f1", window(1.51e12, 169e9, 0.1432)),
    ("f2", window(2.52e12, 82e9, 0.48)),
    ("f3", window(3.42e12, 137e9, 0.28)),
    ("f4", window(4.91e12, 113e9, 0.32)),
    ("f5", window(5.72e12, 126e9, 0.32)),
    ("f6", window(6.57e12, 120e9, 0.34)),
    ("f7", window(7.19e12, 246e9, 0.1344)),
    ("f8", window(8.83e12, 217e9, 0.1033)),
    ("f9", window(9.57e12, 230e9, 0.0779)),
];

/// 28 GHz / 2 GHz mmWave reference channel. Absorption is negligible there
/// and taken as zero.
pub const MMWAVE_28GHZ: ThzWindow = window(28e9, 2e9, 0.0);

/// Noise power used for the mmWave reference system, dBm.
pub const MMWAVE_NOISE_DBM: f64 = -40.0;

const fn window(center_frequency: f64, bandwidth: f64, absorption_coeff: f64) -> ThzWindow {
    ThzWindow {
        center_frequency,
        bandwidth,
        absorption_coeff,
    }
}

/// Looks up a built-in window by name (`f1`..`f9`, or `mmwave`).
pub fn named_window(name: &str) -> Option<ThzWindow> {
    if name.eq_ignore_ascii_case("mmwave") {
        return Some(MMWAVE_28GHZ);
    }
    THZ_WINDOWS
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map(|(_, w)| *w)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    linear_to_db(watts) + 30.0
}

/// Linear antenna gains of the user terminals and the BS array element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaGains {
    pub user_tx: f64,
    pub user_rx: f64,
    pub bs_rx: f64,
}

impl AntennaGains {
    pub fn new(user_tx: f64, user_rx: f64, bs_rx: f64) -> Result<Self> {
        for (name, g) in [("user_tx", user_tx), ("user_rx", user_rx), ("bs_rx", bs_rx)] {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::domain(format!("antenna gain {name} must be positive")));
            }
        }
        Ok(AntennaGains {
            user_tx,
            user_rx,
            bs_rx,
        })
    }

    pub fn from_dbi(user_dbi: f64, bs_dbi: f64) -> Result<Self> {
        let user = db_to_linear(user_dbi);
        Self::new(user, user, db_to_linear(bs_dbi))
    }
}

impl Default for AntennaGains {
    /// 3 dBi user terminals, 26 dBi BS.
    fn default() -> Self {
        let user = db_to_linear(3.0);
        AntennaGains {
            user_tx: user,
            user_rx: user,
            bs_rx: db_to_linear(26.0),
        }
    }
}

/// Per-antenna complex amplitudes of a user -> BS channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector(Vec<Complex64>);

impl ChannelVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::domain("channel vector must have at least one entry"));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("channel vector entries must be finite"));
        }
        Ok(ChannelVector(entries))
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `self^H other`
    pub fn hermitian_dot(&self, other: &[Complex64]) -> Complex64 {
        self.0
            .iter()
            .zip(other)
            .map(|(h, w)| h.conj() * w)
            .sum()
    }

    pub(crate) fn scaled(mut self, factor: f64) -> Self {
        for z in &mut self.0 {
            *z *= factor;
        }
        self
    }
}

/// Free-space spreading times molecular absorption, linear scale:
/// `(4 pi f d / c)^2 * exp(k_abs d)`.
pub fn path_loss(window: &ThzWindow, distance: f64) -> Result<f64> {
    if !(distance > 0.0 && distance.is_finite()) {
        return Err(Error::domain(format!(
            "distance must be positive, got {distance}"
        )));
    }
    let spreading = (4.0 * PI * window.center_frequency * distance / SPEED_OF_LIGHT).powi(2);
    let absorption = (window.absorption_coeff * distance).exp();
    Ok(spreading * absorption)
}

/// Receiver noise power in watts for `bandwidth` Hz and a noise figure in dB.
pub fn noise_power(bandwidth: f64, noise_figure_db: f64) -> Result<f64> {
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::domain("bandwidth must be positive"));
    }
    let dbm = 10.0 * bandwidth.log10() + noise_figure_db + THERMAL_NOISE_DBM_PER_HZ;
    Ok(dbm_to_watts(dbm))
}

/// Unit-norm ULA response: entry `n` is `exp(j pi n sin(angle)) / sqrt(N)`.
pub fn steering_vector(angle: f64, n_antennas: usize) -> Result<ChannelVector> {
    if n_antennas == 0 {
        return Err(Error::domain("antenna count must be at least 1"));
    }
    if !angle.is_finite() || angle.abs() > PI {
        return Err(Error::domain(format!("angle {angle} outside [-pi, pi]")));
    }
    let scale = 1.0 / (n_antennas as f64).sqrt();
    let phase_step = PI * angle.sin();
    let entries = (0..n_antennas)
        .map(|n| Complex64::from_polar(scale, phase_step * n as f64))
        .collect();
    Ok(ChannelVector(entries))
}

/// LoS amplitude gain `sqrt(G_t G_r / PL(f, d))`.
pub fn amplitude_gain(window: &ThzWindow, tx_gain: f64, rx_gain: f64, distance: f64) -> Result<f64> {
    let pl = path_loss(window, distance)?;
    Ok((tx_gain * rx_gain / pl).sqrt())
}

/// User -> BS channel `sqrt(N) * sqrt(G_t G_r,BS / PL) * a(angle)`, so that
/// `||h||^2 = N G_t G_r,BS / PL`.
pub fn bs_channel_vector(
    window: &ThzWindow,
    gains: &AntennaGains,
    distance: f64,
    angle: f64,
    n_antennas: usize,
) -> Result<ChannelVector> {
    let lambda = amplitude_gain(window, gains.user_tx, gains.bs_rx, distance)?;
    let a = steering_vector(angle, n_antennas)?;
    Ok(a.scaled((n_antennas as f64).sqrt() * lambda))
}

/// Edge -> center side-link amplitude gain `sqrt(G_t,j G_r,i / PL(f, d_ji))`.
pub fn sidelink_gain(window: &ThzWindow, gains: &AntennaGains, distance: f64) -> Result<f64> {
    amplitude_gain(window, gains.user_tx, gains.user_rx, distance)
}

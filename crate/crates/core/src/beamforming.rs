//! Receive beamforming at the single-RF-chain BS: a fixed steering
//! codebook with cosine-similarity selection, and the closed-form
//! constant-modulus (CM) beamformer.

use num_complex::Complex64;

use crate::channel::{steering_vector, ChannelVector};
use crate::error::{Error, Result};

/// Receive weights, one per antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamVector(Vec<Complex64>);

impl BeamVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::domain("beam vector must have at least one entry"));
        }
        Ok(BeamVector(entries))
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

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest deviation of any `|w_n|` from `1/sqrt(N)`.
    pub fn cm_violation(&self) -> f64 {
        let target = 1.0 / (self.0.len() as f64).sqrt();
        self.0
            .iter()
            .map(|z| (z.norm() - target).abs())
            .fold(0.0, f64::max)
    }
}

impl From<ChannelVector> for BeamVector {
    fn from(v: ChannelVector) -> Self {
        BeamVector(v.entries().to_vec())
    }
}

/// `B + 1` steering beams with boresights evenly spaced over a sector.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub beams: Vec<BeamVector>,
    pub boresights: Vec<f64>,
}

impl Codebook {
    /// Boresight `b` sits at `start + b (end - start) / B`, so both sector
    /// edges carry a beam.
    pub fn build(n_beams: usize, sector: (f64, f64), n_antennas: usize) -> Result<Self> {
        if n_beams == 0 {
            return Err(Error::domain("codebook needs B >= 1"));
        }
        let (start, end) = sector;
        if !(start < end) {
            return Err(Error::domain("sector start must precede its end"));
        }
        let spacing = (end - start) / n_beams as f64;
        let boresights: Vec<f64> = (0..=n_beams)
            .map(|b| if b == n_beams { end } else { start + b as f64 * spacing })
            .collect();
        let beams = boresights
            .iter()
            .map(|&theta| steering_vector(theta, n_antennas).map(BeamVector::from))
            .collect::<Result<_>>()?;
        Ok(Codebook { beams, boresights })
    }

    pub fn len(&self) -> usize {
        self.beams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beams.is_empty()
    }
}

/// `|h^H w|^2`
pub fn beam_gain(h: &ChannelVector, w: &BeamVector) -> f64 {
    h.hermitian_dot(w.entries()).norm_sqr()
}

/// `|h^H w| / (||h|| ||w||)`
pub fn cosine_similarity(h: &ChannelVector, w: &BeamVector) -> Result<f64> {
    if h.len() != w.len() {
        return Err(Error::domain(format!(
            "length mismatch: channel {} vs beam {}",
            h.len(),
            w.len()
        )));
    }
    let denom = h.norm() * w.norm();
    if denom == 0.0 {
        return Err(Error::domain("cosine similarity of a zero vector"));
    }
    Ok((h.hermitian_dot(w.entries()).norm() / denom).min(1.0))
}

/// Normalized Fejer kernel `|sin(N x / 2) / (N sin(x / 2))|`: the cosine
/// similarity of two N-element steering vectors whose normalized
/// directions differ by `x / pi`.
pub fn fejer_kernel(n: usize, x: f64) -> f64 {
    let n = n as f64;
    let half = 0.5 * x;
    let s = half.sin();
    if s.abs() < 1e-12 {
        // limit at multiples of 2 pi
        return 1.0;
    }
    ((n * half).sin() / (n * s)).abs()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamSelection {
    pub index: usize,
    pub similarity: f64,
    pub beam: BeamVector,
}

/// Similarities closer than this count as a tie; the lower index wins.
const TIE_TOLERANCE: f64 = 1e-12;

pub fn select_beam(h: &ChannelVector, codebook: &Codebook) -> Result<BeamSelection> {
    if codebook.is_empty() {
        return Err(Error::domain("empty codebook"));
    }
    let mut best = (0, f64::NEG_INFINITY);
    for (b, w) in codebook.beams.iter().enumerate() {
        let s = cosine_similarity(h, w)?;
        if s > best.1 + TIE_TOLERANCE {
            best = (b, s);
        }
    }
    Ok(BeamSelection {
        index: best.0,
        similarity: best.1,
        beam: codebook.beams[best.0].clone(),
    })
}

/// Best constant-modulus beam for `h`: `w_n = exp(j arg h_n) / sqrt(N)`,
/// which makes `h^H w = sum |h_n| / sqrt(N)` real and maximal. The result
/// is checked against the two gain floors the offload targets impose.
pub fn cm_beamformer(h: &ChannelVector, gain_floors: [f64; 2]) -> Result<BeamVector> {
    if h.norm_sqr() == 0.0 {
        return Err(Error::domain("CM beamformer for a zero channel"));
    }
    let amp = 1.0 / (h.len() as f64).sqrt();
    let w = BeamVector(
        h.entries()
            .iter()
            .map(|z| Complex64::from_polar(amp, z.arg()))
            .collect(),
    );
    let gain = beam_gain(h, &w);
    let required = gain_floors[0].max(gain_floors[1]);
    // relative slack for rounding in the floors themselves
    if gain < required * (1.0 - 1e-12) {
        return Err(Error::BeamformingInfeasible {
            achieved: gain,
            required,
            deficit: required - gain,
        });
    }
    Ok(w)
}

/// Gain of the CM beamformer without constructing it: `(sum |h_n|)^2 / N`.
pub fn cm_gain(h: &ChannelVector) -> f64 {
    let s: f64 = h.entries().iter().map(|z| z.norm()).sum();
    s * s / h.len() as f64
}

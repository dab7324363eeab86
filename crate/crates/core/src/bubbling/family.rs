use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::BubblingError;
use crate::sphere::complex_json;
use crate::stable_maps::Mobius;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    scales: Vec<f64>,
    #[serde(with = "complex_json::vec_vec")]
    tracks: Vec<Vec<Complex64>>,
    #[serde(default, with = "complex_json::vec_vec")]
    marked_tracks: Vec<Vec<Complex64>>,
}

/// Zero positions and marked points sampled along increasing scales
/// `ν₁ < … < ν_m`. A zero of multiplicity `k` appears as `k` equal tracks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily", into = "RawFamily")]
pub struct ConfigurationFamily {
    scales: Vec<f64>,
    tracks: Vec<Vec<Complex64>>,
    marked_tracks: Vec<Vec<Complex64>>,
}

impl TryFrom<RawFamily> for ConfigurationFamily {
    type Error = BubblingError;
    fn try_from(raw: RawFamily) -> Result<Self, BubblingError> {
        ConfigurationFamily::new(raw.scales, raw.tracks, raw.marked_tracks)
    }
}

impl From<ConfigurationFamily> for RawFamily {
    fn from(f: ConfigurationFamily) -> Self {
        RawFamily { scales: f.scales, tracks: f.tracks, marked_tracks: f.marked_tracks }
    }
}

impl ConfigurationFamily {
    pub fn new(
        scales: Vec<f64>,
        tracks: Vec<Vec<Complex64>>,
        marked_tracks: Vec<Vec<Complex64>>,
    ) -> Result<Self, BubblingError> {
        let invalid = |s: String| Err(BubblingError::InvalidFamily(s));
        if scales.is_empty() {
            return invalid("no scales".into());
        }
        if let Some(i) = scales.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
            return invalid(format!("scale {i} is not a positive number"));
        }
        if let Some(i) = scales.windows(2).position(|w| w[1] <= w[0]) {
            return invalid(format!("scales are not strictly increasing at index {}", i + 1));
        }
        let m = scales.len();
        for (name, list) in [("track", &tracks), ("marked track", &marked_tracks)] {
            for (j, t) in list.iter().enumerate() {
                if t.len() != m {
                    return invalid(format!("{name} {j} has {} samples, expected {m}", t.len()));
                }
                if let Some(i) = t.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
                    return invalid(format!("{name} {j} is not finite at scale index {i}"));
                }
            }
        }
        Ok(ConfigurationFamily { scales, tracks, marked_tracks })
    }

    /// Samples `tracks[j](ν)` and `marked[i](ν)` at the given scales.
    pub fn sample(
        scales: &[f64],
        tracks: &[&dyn Fn(f64) -> Complex64],
        marked: &[&dyn Fn(f64) -> Complex64],
    ) -> Result<Self, BubblingError> {
        let eval = |fs: &[&dyn Fn(f64) -> Complex64]| -> Vec<Vec<Complex64>> {
            fs.iter().map(|f| scales.iter().map(|&s| f(s)).collect()).collect()
        };
        ConfigurationFamily::new(scales.to_vec(), eval(tracks), eval(marked))
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn tracks(&self) -> &[Vec<Complex64>] {
        &self.tracks
    }

    pub fn marked_tracks(&self) -> &[Vec<Complex64>] {
        &self.marked_tracks
    }

    pub fn scale_count(&self) -> usize {
        self.scales.len()
    }

    /// Number of zero tracks.
    pub fn degree(&self) -> usize {
        self.tracks.len()
    }

    pub fn zeros_at(&self, i: usize) -> Vec<Complex64> {
        self.tracks.iter().map(|t| t[i]).collect()
    }

    /// Every track moved by `z ↦ z + c`.
    pub fn translated(&self, c: Complex64) -> ConfigurationFamily {
        let shift = |v: &Vec<Vec<Complex64>>| v.iter().map(|t| t.iter().map(|z| z + c).collect()).collect();
        ConfigurationFamily {
            scales: self.scales.clone(),
            tracks: shift(&self.tracks),
            marked_tracks: shift(&self.marked_tracks),
        }
    }
}

/// Per-vertex maps `φ_α^ν`, indexed as `maps[vertex][scale]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusFamily {
    pub maps: Vec<Vec<Mobius>>,
}

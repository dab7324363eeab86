use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("zero {index} has multiplicity 0")]
    ZeroMultiplicity { index: usize },
    #[error("zero {index} has a non-finite position")]
    NonFinite { index: usize },
    #[error("zeros {first} and {second} coincide; merge them into one entry")]
    DuplicateZero { first: usize, second: usize },
}

/// One prescribed zero of the Higgs field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zero {
    pub position: Complex64,
    pub multiplicity: u32,
}

impl Zero {
    pub fn new(re: f64, im: f64, multiplicity: u32) -> Self {
        Zero { position: Complex64::new(re, im), multiplicity }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawZero {
    re: f64,
    im: f64,
    mult: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    zeros: Vec<RawZero>,
}

/// A point of `Sym^d(ℂ)`: distinct zeros with positive multiplicities.
///
/// Zeros are kept in the order they were given.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct ZeroConfig {
    zeros: Vec<Zero>,
}

impl TryFrom<RawConfig> for ZeroConfig {
    type Error = ConfigError;
    fn try_from(raw: RawConfig) -> Result<Self, ConfigError> {
        ZeroConfig::new(raw.zeros.into_iter().map(|z| Zero::new(z.re, z.im, z.mult)).collect())
    }
}

impl From<ZeroConfig> for RawConfig {
    fn from(c: ZeroConfig) -> Self {
        RawConfig {
            zeros: c
                .zeros
                .iter()
                .map(|z| RawZero { re: z.position.re, im: z.position.im, mult: z.multiplicity })
                .collect(),
        }
    }
}

impl ZeroConfig {
    pub fn new(zeros: Vec<Zero>) -> Result<Self, ConfigError> {
        for (i, z) in zeros.iter().enumerate() {
            if z.multiplicity == 0 {
                return Err(ConfigError::ZeroMultiplicity { index: i });
            }
            if !(z.position.re.is_finite() && z.position.im.is_finite()) {
                return Err(ConfigError::NonFinite { index: i });
            }
            for (j, w) in zeros.iter().enumerate().take(i) {
                if w.position == z.position {
                    return Err(ConfigError::DuplicateZero { first: j, second: i });
                }
            }
        }
        Ok(ZeroConfig { zeros })
    }

    pub fn empty() -> Self {
        ZeroConfig { zeros: Vec::new() }
    }

    /// Builds a configuration from `(re, im, multiplicity)` triples.
    pub fn from_triples(triples: &[(f64, f64, u32)]) -> Result<Self, ConfigError> {
        Self::new(triples.iter().map(|&(re, im, m)| Zero::new(re, im, m)).collect())
    }

    /// Builds a configuration from a list of points, merging exact repeats
    /// into multiplicities. Order of first appearance is kept.
    pub fn from_points(points: &[Complex64]) -> Result<Self, ConfigError> {
        let mut zeros: Vec<Zero> = Vec::new();
        for (index, &p) in points.iter().enumerate() {
            if !(p.re.is_finite() && p.im.is_finite()) {
                return Err(ConfigError::NonFinite { index });
            }
            match zeros.iter_mut().find(|z| z.position == p) {
                Some(z) => z.multiplicity += 1,
                None => zeros.push(Zero { position: p, multiplicity: 1 }),
            }
        }
        Ok(ZeroConfig { zeros })
    }

    pub fn zeros(&self) -> &[Zero] {
        &self.zeros
    }

    pub fn degree(&self) -> u32 {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn max_modulus(&self) -> f64 {
        self.zeros.iter().map(|z| z.position.norm()).fold(0.0, f64::max)
    }

    /// Smallest distance between two distinct zeros, `∞` for fewer than two.
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.zeros.iter().enumerate() {
            for b in &self.zeros[i + 1..] {
                best = best.min((a.position - b.position).norm());
            }
        }
        best
    }

    /// Zeros with multiplicity expanded, in storage order.
    pub fn points(&self) -> Vec<Complex64> {
        self.zeros
            .iter()
            .flat_map(|z| std::iter::repeat(z.position).take(z.multiplicity as usize))
            .collect()
    }

    pub fn centroid(&self) -> Option<Complex64> {
        let d = self.degree();
        if d == 0 {
            return None;
        }
        let s: Complex64 = self.zeros.iter().map(|z| z.position * z.multiplicity as f64).sum();
        Some(s / d as f64)
    }

    /// The configuration moved by `z ↦ z + c`.
    pub fn translated(&self, c: Complex64) -> ZeroConfig {
        ZeroConfig {
            zeros: self
                .zeros
                .iter()
                .map(|z| Zero { position: z.position + c, multiplicity: z.multiplicity })
                .collect(),
        }
    }

    /// Zeros sorted lexicographically by position.
    pub fn sorted(&self) -> ZeroConfig {
        let mut zeros = self.zeros.clone();
        zeros.sort_by(|a, b| {
            a.position
                .re
                .total_cmp(&b.position.re)
                .then_with(|| a.position.im.total_cmp(&b.position.im))
        });
        ZeroConfig { zeros }
    }

    /// Equality as multisets, positions compared within `tol`.
    pub fn approx_eq(&self, other: &ZeroConfig, tol: f64) -> bool {
        if self.zeros.len() != other.zeros.len() || self.degree() != other.degree() {
            return false;
        }
        let mut used = vec![false; other.zeros.len()];
        'outer: for a in &self.zeros {
            for (j, b) in other.zeros.iter().enumerate() {
                if !used[j]
                    && a.multiplicity == b.multiplicity
                    && (a.position - b.position).norm() <= tol
                {
                    used[j] = true;
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let c: ZeroConfig =
            serde_json::from_str(r#"{"zeros":[{"re":-2.0,"im":-1.0,"mult":1},{"re":3,"im":4,"mult":2}]}"#)
                .unwrap();
        assert_eq!(c.degree(), 3);
        let back = serde_json::to_string(&c).unwrap();
        assert_eq!(back, r#"{"zeros":[{"re":-2.0,"im":-1.0,"mult":1},{"re":3.0,"im":4.0,"mult":2}]}"#);
    }

    #[test]
    fn validation_rejects_bad_input() {
        assert!(matches!(
            ZeroConfig::from_triples(&[(0.0, 0.0, 1), (0.0, 0.0, 2)]),
            Err(ConfigError::DuplicateZero { first: 0, second: 1 })
        ));
        assert!(matches!(
            ZeroConfig::from_triples(&[(0.0, 0.0, 0)]),
            Err(ConfigError::ZeroMultiplicity { index: 0 })
        ));
        assert!(serde_json::from_str::<ZeroConfig>(r#"{"zeros":[{"re":0,"im":0,"mult":0}]}"#).is_err());
    }

    #[test]
    fn from_points_merges() {
        let c = ZeroConfig::from_points(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        assert_eq!(c.zeros().len(), 2);
        assert_eq!(c.zeros()[0].multiplicity, 2);
        assert_eq!(c.degree(), 3);
    }

    #[test]
    fn approx_eq_is_order_free() {
        let a = ZeroConfig::from_triples(&[(0.0, 0.0, 1), (1.0, 0.0, 2)]).unwrap();
        let b = ZeroConfig::from_triples(&[(1.0 + 1e-9, 0.0, 2), (0.0, 0.0, 1)]).unwrap();
        assert!(a.approx_eq(&b, 1e-6));
        let c = ZeroConfig::from_triples(&[(1.0, 0.0, 1), (0.0, 0.0, 2)]).unwrap();
        assert!(!a.approx_eq(&c, 1e-6));
    }
}

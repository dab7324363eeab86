//! Points of the Riemann sphere and the chordal metric.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer, Visitor};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

/// A point of `ℂ ∪ {∞}`. Infinity is a distinct symbol, never a large float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(re: f64, im: f64) -> Self {
        SpherePoint::Finite(Complex64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match *self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn is_finite_value(&self) -> bool {
        match self {
            SpherePoint::Finite(z) => z.re.is_finite() && z.im.is_finite(),
            SpherePoint::Infinity => true,
        }
    }

    /// Chordal distance on the sphere of diameter 2.
    pub fn chordal(&self, other: &SpherePoint) -> f64 {
        chordal(*self, *other)
    }

    /// Total order used for deterministic tie-breaking: finite points
    /// lexicographically by (re, im), then infinity.
    pub fn lex_cmp(&self, other: &SpherePoint) -> Ordering {
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => Ordering::Equal,
            (SpherePoint::Infinity, _) => Ordering::Greater,
            (_, SpherePoint::Infinity) => Ordering::Less,
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => a
                .re
                .total_cmp(&b.re)
                .then_with(|| a.im.total_cmp(&b.im)),
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::Finite(z)
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Infinity => write!(f, "∞"),
            SpherePoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

/// `χ(z,w) = 2|z−w| / √((1+|z|²)(1+|w|²))`, `χ(z,∞) = 2/√(1+|z|²)`.
pub fn chordal(a: SpherePoint, b: SpherePoint) -> f64 {
    match (a, b) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
        (SpherePoint::Finite(z), SpherePoint::Infinity)
        | (SpherePoint::Infinity, SpherePoint::Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
        (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
            2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
        }
    }
}

impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            SpherePoint::Infinity => serializer.serialize_str("inf"),
            SpherePoint::Finite(z) => {
                let mut s = serializer.serialize_struct("SpherePoint", 2)?;
                s.serialize_field("re", &z.re)?;
                s.serialize_field("im", &z.im)?;
                s.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PointVisitor;

        impl<'de> Visitor<'de> for PointVisitor {
            type Value = SpherePoint;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("\"inf\" or an object {\"re\": .., \"im\": ..}")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<SpherePoint, E> {
                if v == "inf" {
                    Ok(SpherePoint::Infinity)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }

            fn visit_map<A: de::MapAccess<'de>>(self, mut map: A) -> Result<SpherePoint, A::Error> {
                let mut re = None;
                let mut im = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "re" => re = Some(map.next_value::<f64>()?),
                        "im" => im = Some(map.next_value::<f64>()?),
                        other => return Err(de::Error::unknown_field(other, &["re", "im"])),
                    }
                }
                let re = re.ok_or_else(|| de::Error::missing_field("re"))?;
                let im = im.ok_or_else(|| de::Error::missing_field("im"))?;
                Ok(SpherePoint::finite(re, im))
            }
        }

        deserializer.deserialize_any(PointVisitor)
    }
}

/// Plain `{"re": .., "im": ..}` encoding for finite complex numbers.
pub mod complex_json {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Raw {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        Raw { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let r = Raw::deserialize(d)?;
        Ok(Complex64::new(r.re, r.im))
    }

    /// Serde wrapper for a single complex number.
    #[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
    pub struct C(#[serde(with = "self")] pub Complex64);

    pub mod vec {
        use super::C;
        use num_complex::Complex64;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
            let w: Vec<C> = v.iter().map(|&z| C(z)).collect();
            w.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
            let w = Vec::<C>::deserialize(d)?;
            Ok(w.into_iter().map(|c| c.0).collect())
        }
    }

    pub mod vec_vec {
        use super::C;
        use num_complex::Complex64;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(v: &[Vec<Complex64>], s: S) -> Result<S::Ok, S::Error> {
            let w: Vec<Vec<C>> = v.iter().map(|r| r.iter().map(|&z| C(z)).collect()).collect();
            w.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Vec<Vec<Complex64>>, D::Error> {
            let w = Vec::<Vec<C>>::deserialize(d)?;
            Ok(w.into_iter().map(|r| r.into_iter().map(|c| c.0).collect()).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chordal_to_infinity_closed_form() {
        for nu in [1.0f64, 10.0, 100.0] {
            let z = SpherePoint::Finite(Complex64::from_polar(nu, nu));
            let expect = 2.0 / (1.0 + nu * nu).sqrt();
            assert!((chordal(z, SpherePoint::Infinity) - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn chordal_is_bounded_by_diameter() {
        let a = SpherePoint::finite(0.0, 0.0);
        assert!((chordal(a, SpherePoint::Infinity) - 2.0).abs() < 1e-15);
        let b = SpherePoint::finite(1e8, 0.0);
        assert!(chordal(a, b) <= 2.0);
    }

    #[test]
    fn json_forms() {
        let p: SpherePoint = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(p, SpherePoint::Infinity);
        let q: SpherePoint = serde_json::from_str(r#"{"re":1.5,"im":-2}"#).unwrap();
        assert_eq!(q, SpherePoint::finite(1.5, -2.0));
        assert!(serde_json::from_str::<SpherePoint>("\"infinity\"").is_err());
        assert_eq!(serde_json::to_string(&SpherePoint::Infinity).unwrap(), "\"inf\"");
    }
}

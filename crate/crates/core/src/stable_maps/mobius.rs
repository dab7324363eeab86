use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::sphere::{complex_json, SpherePoint};

/// Möbius transformation `z ↦ (az + b)/(cz + d)` stored as a matrix with
/// determinant 1 whose first nonzero entry has positive real part (or zero
/// real part and positive imaginary part).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mobius {
    #[serde(with = "complex_json")]
    pub a: Complex64,
    #[serde(with = "complex_json")]
    pub b: Complex64,
    #[serde(with = "complex_json")]
    pub c: Complex64,
    #[serde(with = "complex_json")]
    pub d: Complex64,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Mobius {
    /// Normalized representative; `None` for a singular matrix.
    pub fn new(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> Option<Mobius> {
        let det = a * d - b * cc;
        if !(det.norm() > 0.0) || !det.is_finite() {
            return None;
        }
        let s = det.sqrt();
        let mut m = Mobius { a: a / s, b: b / s, c: cc / s, d: d / s };
        let lead = [m.a, m.b, m.c, m.d].into_iter().find(|z| *z != c(0.0, 0.0)).unwrap();
        if lead.re < 0.0 || (lead.re == 0.0 && lead.im < 0.0) {
            m = Mobius { a: -m.a, b: -m.b, c: -m.c, d: -m.d };
        }
        Some(m)
    }

    pub fn identity() -> Mobius {
        Mobius { a: c(1.0, 0.0), b: c(0.0, 0.0), c: c(0.0, 0.0), d: c(1.0, 0.0) }
    }

    pub fn translation(v: Complex64) -> Mobius {
        Mobius { a: c(1.0, 0.0), b: v, c: c(0.0, 0.0), d: c(1.0, 0.0) }
    }

    /// `z ↦ λz + μ`, `λ ≠ 0`.
    pub fn affine(lambda: Complex64, mu: Complex64) -> Option<Mobius> {
        Mobius::new(lambda, mu, c(0.0, 0.0), c(1.0, 0.0))
    }

    /// Unique map sending `z1, z2, z3` to `0, 1, ∞`.
    pub fn to_standard(z1: SpherePoint, z2: SpherePoint, z3: SpherePoint) -> Option<Mobius> {
        use SpherePoint::*;
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        // (z − z1)(z2 − z3) / ((z − z3)(z2 − z1)) with the usual limits at ∞
        let m = match (z1, z2, z3) {
            (Finite(a), Finite(b), Finite(d)) => Mobius::new(b - d, -a * (b - d), b - a, -d * (b - a)),
            (Infinity, Finite(b), Finite(d)) => Mobius::new(zero, b - d, one, -d),
            (Finite(a), Infinity, Finite(d)) => Mobius::new(one, -a, one, -d),
            (Finite(a), Finite(b), Infinity) => Mobius::new(one, -a, zero, b - a),
            _ => None,
        }?;
        Some(m)
    }

    /// Unique map sending `z_k` to `w_k`; the points of each triple must be
    /// distinct.
    pub fn from_three_points(z: [SpherePoint; 3], w: [SpherePoint; 3]) -> Option<Mobius> {
        let s = Mobius::to_standard(z[0], z[1], z[2])?;
        let t = Mobius::to_standard(w[0], w[1], w[2])?;
        Some(t.inverse().compose(&s))
    }

    pub fn apply(&self, p: SpherePoint) -> SpherePoint {
        match p {
            SpherePoint::Infinity => {
                if self.c == c(0.0, 0.0) {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.a / self.c)
                }
            }
            SpherePoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den == c(0.0, 0.0) {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    pub fn inverse(&self) -> Mobius {
        Mobius::new(self.d, -self.b, -self.c, self.a).expect("determinant 1")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius::new(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
        .expect("product of invertible matrices")
    }

    /// Translation part if this is `z ↦ z + v` within `tol`.
    pub fn as_translation(&self, tol: f64) -> Option<Complex64> {
        if self.c.norm() <= tol && (self.a - 1.0).norm() <= tol && (self.d - 1.0).norm() <= tol {
            Some(self.b)
        } else {
            None
        }
    }

    /// Distance between normalized matrix entries.
    pub fn distance(&self, other: &Mobius) -> f64 {
        let e = |x: &Mobius| [x.a, x.b, x.c, x.d];
        let (p, q) = (e(self), e(other));
        let plus: f64 = p.iter().zip(&q).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        let minus: f64 = p.iter().zip(&q).map(|(u, v)| (u + v).norm()).fold(0.0, f64::max);
        plus.min(minus)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.distance(&Mobius::identity()) <= tol
    }

    /// Derivative of the map at a finite point that is not a pole.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = self.c * z + self.d;
        c(1.0, 0.0) / (den * den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(re: f64, im: f64) -> SpherePoint {
        SpherePoint::finite(re, im)
    }

    fn close(p: SpherePoint, q: SpherePoint) -> bool {
        p.chordal(&q) < 1e-12
    }

    #[test]
    fn normalization_is_deterministic() {
        let m = Mobius::new(c(-2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)).unwrap();
        assert!(m.a.re > 0.0);
        assert!(((m.a * m.d - m.b * m.c) - 1.0).norm() < 1e-14);
        let scaled = Mobius::new(c(-4.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0)).unwrap();
        assert!(m.distance(&scaled) < 1e-14);
        assert_eq!(m, scaled);
    }

    #[test]
    fn three_point_maps() {
        let z = [fin(0.0, 0.0), fin(1.0, 2.0), SpherePoint::Infinity];
        let w = [fin(3.0, -1.0), SpherePoint::Infinity, fin(-2.0, 0.5)];
        let m = Mobius::from_three_points(z, w).unwrap();
        for k in 0..3 {
            assert!(close(m.apply(z[k]), w[k]));
        }
        let back = m.inverse();
        for k in 0..3 {
            assert!(close(back.apply(w[k]), z[k]));
        }
    }

    #[test]
    fn fixing_three_points_means_identity() {
        let z = [fin(0.5, 0.0), fin(-1.0, 1.0), fin(2.0, 3.0)];
        let m = Mobius::from_three_points(z, z).unwrap();
        assert!(m.is_identity(1e-12));
    }

    #[test]
    fn affine_and_translation() {
        let t = Mobius::translation(c(1.0, -2.0));
        assert_eq!(t.as_translation(1e-14), Some(c(1.0, -2.0)));
        assert_eq!(t.apply(SpherePoint::Infinity), SpherePoint::Infinity);
        let a = Mobius::affine(c(0.0, 2.0), c(1.0, 0.0)).unwrap();
        assert!(a.as_translation(1e-12).is_none());
        assert!(close(a.apply(fin(1.0, 0.0)), fin(1.0, 2.0)));
        assert!((a.derivative(c(5.0, 1.0)) - c(0.0, 2.0)).norm() < 1e-14);
    }
}

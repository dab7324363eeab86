#![allow(dead_code)]

/// Radially symmetric vortex of degree `d` centred at the origin, found by
/// shooting on `v = h − 2d·log r`, which solves `v″ + v′/r = r^{2d}e^v − 1`
/// with `v′(0) = 0`. Independent of the 2D solver.
pub struct RadialProfile {
    pub r: Vec<f64>,
    pub h: Vec<f64>,
    pub dh: Vec<f64>,
}

const R0: f64 = 1e-3;
const STEP: f64 = 1e-3;

fn rhs(d: f64, r: f64, v: f64, dv: f64) -> (f64, f64) {
    (dv, r.powf(2.0 * d) * v.exp() - 1.0 - dv / r)
}

enum Outcome {
    Overshoot,
    Undershoot,
    Reached,
}

fn shoot(d: u32, c: f64, r_max: f64, record: Option<&mut RadialProfile>) -> Outcome {
    let df = d as f64;
    let m = 2.0 * df + 2.0;
    let mut r = R0;
    let mut v = c - r * r / 4.0 + c.exp() * r.powf(m) / (m * m);
    let mut dv = -r / 2.0 + c.exp() * r.powf(m - 1.0) / m;
    let mut rec = record;
    loop {
        let h = 2.0 * df * r.ln() + v;
        let dh = 2.0 * df / r + dv;
        if let Some(p) = rec.as_deref_mut() {
            p.r.push(r);
            p.h.push(h);
            p.dh.push(dh);
        }
        if h > 0.0 {
            return Outcome::Overshoot;
        }
        if dh < 0.0 {
            return Outcome::Undershoot;
        }
        if r >= r_max {
            return Outcome::Reached;
        }
        let (k1v, k1d) = rhs(df, r, v, dv);
        let (k2v, k2d) = rhs(df, r + STEP / 2.0, v + STEP / 2.0 * k1v, dv + STEP / 2.0 * k1d);
        let (k3v, k3d) = rhs(df, r + STEP / 2.0, v + STEP / 2.0 * k2v, dv + STEP / 2.0 * k2d);
        let (k4v, k4d) = rhs(df, r + STEP, v + STEP * k3v, dv + STEP * k3d);
        v += STEP / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        dv += STEP / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        r += STEP;
    }
}

impl RadialProfile {
    pub fn solve(d: u32, r_max: f64) -> RadialProfile {
        let (mut lo, mut hi) = (-30.0, 30.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            match shoot(d, mid, r_max, None) {
                Outcome::Overshoot => hi = mid,
                Outcome::Undershoot => lo = mid,
                Outcome::Reached => break,
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        let mut p = RadialProfile { r: Vec::new(), h: Vec::new(), dh: Vec::new() };
        shoot(d, 0.5 * (lo + hi), r_max, Some(&mut p));
        p
    }

    pub fn reach(&self) -> f64 {
        *self.r.last().unwrap()
    }

    /// Cubic Hermite interpolation of `h`.
    pub fn h_at(&self, r: f64) -> f64 {
        let k = (((r - R0) / STEP).floor() as usize).min(self.r.len() - 2);
        let (r0, r1) = (self.r[k], self.r[k + 1]);
        let dr = r1 - r0;
        let t = (r - r0) / dr;
        let (h0, h1, m0, m1) = (self.h[k], self.h[k + 1], self.dh[k] * dr, self.dh[k + 1] * dr);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * h0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * h1 + (t3 - t2) * m1
    }

    /// `∫ (1 − e^h) dA / 4` over the disk of radius `reach`; equals `πd` in the limit.
    pub fn energy(&self) -> f64 {
        let mut s = 0.0;
        for k in 0..self.r.len() - 1 {
            let a = (1.0 - self.h[k].exp()) * self.r[k];
            let b = (1.0 - self.h[k + 1].exp()) * self.r[k + 1];
            s += 0.5 * (a + b) * (self.r[k + 1] - self.r[k]);
        }
        2.0 * std::f64::consts::PI * s / 4.0
    }
}

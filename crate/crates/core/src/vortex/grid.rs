use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Uniform node grid over the square `[−R, R]²`, `n` nodes per axis.
/// Node `(i, j)` sits at `(−R + i·h, −R + j·h)` and is stored at `j·n + i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub radius: f64,
    pub spacing: f64,
}

pub trait FieldValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
}
impl FieldValue for f64 {}
impl FieldValue for Complex64 {}

impl Grid {
    pub fn new(n: usize, radius: f64) -> Self {
        Grid { n, radius, spacing: 2.0 * radius / (n as f64 - 1.0) }
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.radius + i as f64 * self.spacing
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.coord(i), self.coord(j))
    }

    pub fn point_at(&self, k: usize) -> Complex64 {
        self.point(k % self.n, k / self.n)
    }

    pub fn in_disk(&self, i: usize, j: usize) -> bool {
        self.point(i, j).norm() <= self.radius
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing * self.spacing
    }

    /// Fractional grid coordinates of `z`.
    pub fn locate(&self, z: Complex64) -> (f64, f64) {
        ((z.re + self.radius) / self.spacing, (z.im + self.radius) / self.spacing)
    }

    /// Bilinear interpolation; `None` outside the grid square.
    pub fn sample<T: FieldValue>(&self, field: &[T], z: Complex64) -> Option<T> {
        let (u, v) = self.locate(z);
        let last = (self.n - 1) as f64;
        if !(u >= 0.0 && v >= 0.0 && u <= last && v <= last) {
            return None;
        }
        let i = (u.floor() as usize).min(self.n - 2);
        let j = (v.floor() as usize).min(self.n - 2);
        let a = u - i as f64;
        let b = v - j as f64;
        let f00 = field[self.index(i, j)];
        let f10 = field[self.index(i + 1, j)];
        let f01 = field[self.index(i, j + 1)];
        let f11 = field[self.index(i + 1, j + 1)];
        Some(f00 * ((1.0 - a) * (1.0 - b)) + f10 * (a * (1.0 - b)) + f01 * ((1.0 - a) * b) + f11 * (a * b))
    }

    /// `∂_x` at a node, centered of order 6 where the stencil fits,
    /// dropping to lower orders near the edge of the square.
    pub fn dx<T: FieldValue>(&self, field: &[T], i: usize, j: usize) -> T {
        let row = j * self.n;
        derivative(|k| field[row + k], i, self.n, self.spacing)
    }

    pub fn dy<T: FieldValue>(&self, field: &[T], i: usize, j: usize) -> T {
        let n = self.n;
        derivative(|k| field[k * n + i], j, n, self.spacing)
    }
}

pub(crate) fn derivative<T: FieldValue>(at: impl Fn(usize) -> T, i: usize, n: usize, h: f64) -> T {
    let room = i.min(n - 1 - i);
    match room {
        0 if i == 0 => (at(1) - at(0)) * (1.0 / h),
        0 => (at(i) - at(i - 1)) * (1.0 / h),
        1 => (at(i + 1) - at(i - 1)) * (0.5 / h),
        2 => ((at(i + 1) - at(i - 1)) * 8.0 - (at(i + 2) - at(i - 2))) * (1.0 / (12.0 * h)),
        _ => {
            ((at(i + 1) - at(i - 1)) * 45.0 - (at(i + 2) - at(i - 2)) * 9.0 + (at(i + 3) - at(i - 3)))
                * (1.0 / (60.0 * h))
        }
    }
}

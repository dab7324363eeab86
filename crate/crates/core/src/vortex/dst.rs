//! Type-I discrete sine transform on the interior of a square grid, used to
//! invert `−L + c` with homogeneous Dirichlet data on the square.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

pub struct SineSolver {
    m: usize,
    fft: Arc<dyn Fft<f64>>,
    /// Eigenvalues of the 1D operator, indexed by mode `1..=m` at `k − 1`.
    symbol: Vec<f64>,
    shift: f64,
}

impl SineSolver {
    /// Interior size `m` (nodes `1..=m` of an `m + 2` grid), spacing `h`,
    /// fourth-order five-point second difference, diagonal shift `c`.
    pub fn new(m: usize, h: f64, c: f64) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(2 * (m + 1));
        let symbol = (1..=m)
            .map(|k| {
                let t = std::f64::consts::PI * k as f64 / (m + 1) as f64;
                (30.0 - 32.0 * t.cos() + 2.0 * (2.0 * t).cos()) / (12.0 * h * h)
            })
            .collect();
        SineSolver { m, fft, symbol, shift: c }
    }

    /// Transforms each length-`m` row of `data` (row-major `m × m`) in place.
    fn rows(&self, data: &mut [f64]) {
        let m = self.m;
        let len = 2 * (m + 1);
        data.par_chunks_mut(2 * m).for_each_init(
            || (vec![Complex64::new(0.0, 0.0); len], vec![Complex64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()]),
            |(buf, scratch), pair| {
                let (a, b) = pair.split_at_mut(m.min(pair.len()));
                buf[0] = Complex64::new(0.0, 0.0);
                buf[m + 1] = Complex64::new(0.0, 0.0);
                for k in 0..m {
                    let v = Complex64::new(a[k], if b.is_empty() { 0.0 } else { b[k] });
                    buf[k + 1] = v;
                    buf[len - 1 - k] = -v;
                }
                self.fft.process_with_scratch(buf, scratch);
                for k in 0..m {
                    let z = buf[k + 1];
                    a[k] = -0.5 * z.im;
                    if !b.is_empty() {
                        b[k] = 0.5 * z.re;
                    }
                }
            },
        );
    }

    /// Solves `(−L + c) x = rhs` in place on the `m × m` interior.
    ///
    /// The forward transform leaves the data transposed; the symbol is
    /// symmetric, and the inverse transform transposes it back.
    pub fn solve(&self, data: &mut [f64], scratch: &mut [f64]) {
        let m = self.m;
        self.rows(data);
        transpose(data, scratch, m);
        self.rows(scratch);
        let norm = (2.0 / (m + 1) as f64).powi(2);
        scratch.par_chunks_mut(m).enumerate().for_each(|(j, row)| {
            let sj = self.symbol[j] + self.shift;
            for (i, v) in row.iter_mut().enumerate() {
                *v *= norm / (self.symbol[i] + sj);
            }
        });
        self.rows(scratch);
        transpose(scratch, data, m);
        self.rows(data);
    }
}

fn transpose(src: &[f64], dst: &mut [f64], m: usize) {
    const B: usize = 32;
    dst.par_chunks_mut(m * B).enumerate().for_each(|(jb, block)| {
        let j0 = jb * B;
        let rows = block.len() / m;
        for i0 in (0..m).step_by(B) {
            for dj in 0..rows {
                let j = j0 + dj;
                for i in i0..(i0 + B).min(m) {
                    block[dj * m + i] = src[i * m + j];
                }
            }
        }
    });
}

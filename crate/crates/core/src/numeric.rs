//! Small numeric building blocks shared by the kernels.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Neumaier-compensated running sum of `f64` values.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum applied to real and imaginary parts independently.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexSum::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Distance from `x` to the nearest integer, `‖x‖`.
#[inline]
pub fn dist_to_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// `e(x) = exp(2πix)`.
#[inline]
pub fn unit(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * x)
}

/// Reduce an angle difference into `(-π, π]`.
#[inline]
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a % TAU;
    if r > PI {
        r -= TAU;
    } else if r <= -PI {
        r += TAU;
    }
    r
}

/// Fractional part in `[0, 1)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Arithmetic progression `start + j·step`, `j = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Progression {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl Progression {
    pub fn new(start: f64, step: f64, count: usize) -> Self {
        Self { start, step, count }
    }

    #[inline]
    pub fn at(&self, j: usize) -> f64 {
        self.start + j as f64 * self.step
    }

    pub fn last(&self) -> Option<f64> {
        self.count.checked_sub(1).map(|j| self.at(j))
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |j| self.at(j))
    }

    /// Ranges `[lo, hi)` of node indices, cut at fixed multiples of `block`.
    pub fn blocks(&self, block: usize) -> Vec<std::ops::Range<usize>> {
        (0..self.count)
            .step_by(block.max(1))
            .map(|lo| lo..(lo + block).min(self.count))
            .collect()
    }
}

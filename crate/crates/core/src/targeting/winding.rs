//! Zeros of exponential sums `g(z) = Σ A_k e^{ω_k z}` by the argument principle.

use super::TargetingError;
use crate::dirichlet::ShiftVector;
use crate::numeric::wrap_angle;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI, TAU};

/// `|Re z| ≤ k`, `Im z ∈ [alpha, alpha + beta]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub k: f64,
    pub alpha: f64,
    pub beta: f64,
}

const MIN_SEGMENT: f64 = 1e-8;

struct ExpSum<'a> {
    amps: &'a [Complex64],
    freqs: &'a [f64],
}

impl ExpSum<'_> {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.amps
            .iter()
            .zip(self.freqs)
            .map(|(a, w)| a * (z * w).exp())
            .sum()
    }

    fn scale(&self, z: Complex64) -> f64 {
        self.amps
            .iter()
            .zip(self.freqs)
            .map(|(a, w)| a.norm() * (z.re * w).exp())
            .sum()
    }

    fn sample(&self, z: Complex64) -> Result<Complex64, TargetingError> {
        let g = self.eval(z);
        if g.norm() <= 1e-12 * self.scale(z) {
            return Err(TargetingError::ContourNearZero);
        }
        Ok(g)
    }

    /// Argument increment of `g` from `a` to `b`, bisecting until every
    /// half-step turns by less than π/4.
    fn track(
        &self,
        a: Complex64,
        ga: Complex64,
        b: Complex64,
        gb: Complex64,
    ) -> Result<f64, TargetingError> {
        let m = 0.5 * (a + b);
        let gm = self.sample(m)?;
        let d1 = wrap_angle(gm.arg() - ga.arg());
        let d2 = wrap_angle(gb.arg() - gm.arg());
        if d1.abs() < FRAC_PI_4 && d2.abs() < FRAC_PI_4 {
            return Ok(d1 + d2);
        }
        if (b - a).norm() < MIN_SEGMENT {
            return Err(TargetingError::ContourNearZero);
        }
        Ok(self.track(a, ga, m, gm)? + self.track(m, gm, b, gb)?)
    }

    fn winding(&self, rect: &Rectangle, resolution: usize) -> Result<i64, TargetingError> {
        let (k, lo, hi) = (rect.k, rect.alpha, rect.alpha + rect.beta);
        let corners = [
            Complex64::new(-k, lo),
            Complex64::new(k, lo),
            Complex64::new(k, hi),
            Complex64::new(-k, hi),
        ];
        let spread = self.freqs.iter().fold(0.0f64, |m, w| m.max(w.abs())) + 1.0;
        let mut total = 0.0;
        for e in 0..4 {
            let (a, b) = (corners[e], corners[(e + 1) % 4]);
            let len = (b - a).norm();
            let pieces = (resolution as f64 * (16.0 + 2.0 * len * spread)).ceil() as usize;
            let mut za = a;
            let mut ga = self.sample(za)?;
            for i in 1..=pieces {
                let zb = a + (b - a) * (i as f64 / pieces as f64);
                let gb = self.sample(zb)?;
                total += self.track(za, ga, zb, gb)?;
                za = zb;
                ga = gb;
            }
        }
        let turns = total / TAU;
        if (turns - turns.round()).abs() > 0.1 {
            return Err(TargetingError::ContourNearZero);
        }
        Ok(turns.round() as i64)
    }
}

fn validate(amps: &[Complex64], freqs: &[f64], rect: &Rectangle) -> Result<(), TargetingError> {
    if amps.is_empty() || amps.len() != freqs.len() {
        return Err(TargetingError::Invalid("need matching non-empty amplitudes and frequencies".into()));
    }
    if amps.iter().any(|a| a.norm() == 0.0) {
        return Err(TargetingError::Invalid("amplitudes must be non-zero".into()));
    }
    if freqs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TargetingError::Invalid("frequencies must be strictly increasing".into()));
    }
    if !(rect.k > 0.0 && rect.beta > 0.0) {
        return Err(TargetingError::Invalid("rectangle needs K > 0 and β > 0".into()));
    }
    Ok(())
}

/// Zeros of `g` inside the rectangle, counted with multiplicity. A contour
/// passing too close to a zero is retried once with `K` grown by 10%.
pub fn wilder_count(
    amplitudes: &[Complex64],
    frequencies: &[f64],
    rect: Rectangle,
) -> Result<i64, TargetingError> {
    wilder_count_at_resolution(amplitudes, frequencies, rect, 1)
}

/// As [`wilder_count`] with the initial contour sampling multiplied by `resolution`.
pub fn wilder_count_at_resolution(
    amplitudes: &[Complex64],
    frequencies: &[f64],
    rect: Rectangle,
    resolution: usize,
) -> Result<i64, TargetingError> {
    validate(amplitudes, frequencies, &rect)?;
    let g = ExpSum {
        amps: amplitudes,
        freqs: frequencies,
    };
    match g.winding(&rect, resolution.max(1)) {
        Err(TargetingError::ContourNearZero) => g.winding(
            &Rectangle {
                k: rect.k * 1.1,
                ..rect
            },
            resolution.max(1),
        ),
        other => other,
    }
}

/// `|N − β(ω_n − ω_1)/(2π)| ≤ n − 1`.
pub fn wilder_bound_holds(count: i64, frequencies: &[f64], beta: f64) -> bool {
    let n = frequencies.len();
    let spread = frequencies[n - 1] - frequencies[0];
    (count as f64 - beta * spread / TAU).abs() <= (n - 1) as f64
}

/// Zeros in `[0, 1)` of `f(x) = Σ conj(a_k) e(d_k x)`, via `z = 2πix` and a
/// thin rectangle of half-width `1e-3` around the imaginary axis.
pub fn exp_poly_zero_count(coeffs: &[Complex64], shifts: &ShiftVector) -> Result<i64, TargetingError> {
    if coeffs.len() != shifts.len() {
        return Err(TargetingError::Invalid("one coefficient per shift required".into()));
    }
    let amps: Vec<Complex64> = coeffs.iter().map(|a| a.conj()).collect();
    let attempts = [(1e-3, 1e-5), (2e-3, 3e-5), (1.5e-3, 7e-5)];
    let mut last = TargetingError::ContourNearZero;
    for (k, eta) in attempts {
        let rect = Rectangle {
            k,
            alpha: -2.0 * PI * eta,
            beta: 2.0 * PI,
        };
        validate(&amps, shifts.shifts(), &rect)?;
        let g = ExpSum {
            amps: &amps,
            freqs: shifts.shifts(),
        };
        match g.winding(&rect, 1) {
            Ok(n) => return Ok(n),
            Err(e) => last = e,
        }
    }
    Err(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_exponential_has_no_zeros() {
        let r = Rectangle { k: 3.0, alpha: -5.0, beta: 20.0 };
        assert_eq!(wilder_count(&[c(2.0, -1.0)], &[0.7], r).unwrap(), 0);
    }

    #[test]
    fn exp_minus_one() {
        // zeros of e^z − 1 are 2πik
        let amps = [c(-1.0, 0.0), c(1.0, 0.0)];
        let freqs = [0.0, 1.0];
        let r = Rectangle { k: 1.0, alpha: 1.0, beta: 6.0 };
        let n = wilder_count(&amps, &freqs, r).unwrap();
        assert_eq!(n, 1);
        assert!(wilder_bound_holds(n, &freqs, 6.0));
        let r = Rectangle { k: 1.0, alpha: 0.1, beta: 6.0 };
        assert_eq!(wilder_count(&amps, &freqs, r).unwrap(), 0);
        // [−1, 20] holds 0, 2π, 4π, 6π
        let r = Rectangle { k: 0.5, alpha: -1.0, beta: 21.0 };
        let n = wilder_count(&amps, &freqs, r).unwrap();
        assert_eq!(n, 4);
        assert!(wilder_bound_holds(n, &freqs, 21.0));
    }

    #[test]
    fn refinement_does_not_change_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.random_range(2..5);
            let amps: Vec<Complex64> = (0..n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let mut freqs: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            freqs.sort_by(f64::total_cmp);
            let r = Rectangle { k: 4.0, alpha: rng.random_range(-10.0..10.0), beta: 15.0 };
            let a = wilder_count_at_resolution(&amps, &freqs, r, 1).unwrap();
            let b = wilder_count_at_resolution(&amps, &freqs, r, 2).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn exp_poly_closed_forms() {
        let one = ShiftVector::new(vec![1.0]).unwrap();
        assert_eq!(exp_poly_zero_count(&[c(1.0, 0.0)], &one).unwrap(), 0);
        let two = ShiftVector::new(vec![1.0, 2.0]).unwrap();
        // e(x) − e(2x) = e(x)(1 − e(x)): zero at x = 0
        assert_eq!(exp_poly_zero_count(&[c(1.0, 0.0), c(-1.0, 0.0)], &two).unwrap(), 1);
        // e(x) + e(2x): zero at x = 1/2
        assert_eq!(exp_poly_zero_count(&[c(1.0, 0.0), c(1.0, 0.0)], &two).unwrap(), 1);
        // 1·e(x) + e(3x)… via shifts (1,3): e(x)(1 + e(2x)), zeros at 1/4, 3/4
        let odd = ShiftVector::new(vec![1.0, 3.0]).unwrap();
        assert_eq!(exp_poly_zero_count(&[c(1.0, 0.0), c(1.0, 0.0)], &odd).unwrap(), 2);
    }

    #[test]
    fn rejects_invalid_input() {
        let r = Rectangle { k: 1.0, alpha: 0.0, beta: 1.0 };
        assert!(wilder_count(&[c(0.0, 0.0)], &[1.0], r).is_err());
        assert!(wilder_count(&[c(1.0, 0.0), c(1.0, 0.0)], &[1.0, 1.0], r).is_err());
        assert!(wilder_count(&[c(1.0, 0.0)], &[1.0], Rectangle { beta: 0.0, ..r }).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]
            #[test]
            fn zero_count_respects_bound(
                coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=4),
                picks in proptest::sample::subsequence((1..=8).collect::<Vec<i32>>(), 4)
            ) {
                let n = coeffs.len();
                let shifts: Vec<f64> = picks.iter().take(n).map(|&d| d as f64).collect();
                prop_assume!(coeffs.iter().all(|(a, b)| a.abs() + b.abs() > 1e-3));
                let a: Vec<Complex64> = coeffs.iter().map(|&(x, y)| c(x, y)).collect();
                let sv = ShiftVector::new(shifts.clone()).unwrap();
                let count = exp_poly_zero_count(&a, &sv).unwrap();
                let bound = n as f64 - 1.0 + shifts[n - 1] - shifts[0];
                prop_assert!(count >= 0 && count as f64 <= bound);
            }
        }
    }
}

//! Window sums `Σ p^{-σ}` over primes with `log p` near `(2πm + φ)/t`.
//!
//! With `f(x) = Σ conj(a_k) e(d_k x)` and the first lattice point `m₀/L`
//! where `f` does not vanish, `φ = arg f(m₀/L)`. Primes whose `log p` falls in
//! the `m`-th window rotate `f(m₀/L)` into the right half-plane; the scaled
//! sums `m · Σ` staying away from zero witness divergence of `Σ (u_m | e)`.

use super::greedy::lattice_modulus;
use super::{TargetSpec, TargetingError};
use crate::numeric::{unit, CompensatedSum};
use crate::primes::{PrimeError, PrimeTable};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub m: u64,
    /// Open window `(lo, hi)` on `log p`.
    pub log_window: (f64, f64),
    pub window_sum: f64,
    /// `m · window_sum`.
    pub scaled: f64,
}

/// `direction` is `e ∈ ℝ^{2n}` as `(Re a_1, Im a_1, …)`; it is normalised.
pub fn divergence_witness(
    table: &PrimeTable,
    spec: &TargetSpec,
    direction: &[f64],
    m_max: u64,
) -> Result<Vec<WitnessRow>, TargetingError> {
    spec.validate()?;
    if m_max < 2 {
        return Err(TargetingError::Invalid("m_max must be at least 2".into()));
    }
    let n = spec.shifts.len();
    if direction.len() != 2 * n {
        return Err(TargetingError::Invalid(format!(
            "direction needs {} real components, got {}",
            2 * n,
            direction.len()
        )));
    }
    let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(TargetingError::Invalid("direction must be a non-zero vector".into()));
    }
    let a: Vec<Complex64> = direction
        .chunks(2)
        .map(|c| Complex64::new(c[0], c[1]) / norm)
        .collect();
    let f = |x: f64| -> Complex64 {
        a.iter()
            .zip(spec.shifts.shifts())
            .map(|(ak, d)| ak.conj() * unit(d * x))
            .sum()
    };
    let l = lattice_modulus(spec);
    let c0 = (0..l)
        .map(|m0| f(m0 as f64 / l as f64))
        .find(|c| c.norm() > 1e-12)
        .ok_or_else(|| TargetingError::Invalid("f vanishes on the whole lattice".into()))?;
    let phi = c0.arg();
    let t = spec.s.t();
    let sigma = spec.s.sigma();

    let top = ((TAU * m_max as f64 + FRAC_PI_4 + phi) / t).exp();
    if top >= table.limit() as f64 {
        return Err(PrimeError::BeyondLimit {
            bound: top,
            limit: table.limit(),
        }
        .into());
    }
    let primes = table.primes();
    Ok((1..=m_max)
        .map(|m| {
            let centre = (TAU * m as f64 + phi) / t;
            let lo = centre - FRAC_PI_4 / t;
            let hi = centre + FRAC_PI_4 / t;
            let start = primes.partition_point(|&p| (p as f64).ln() <= lo);
            let mut sum = CompensatedSum::new();
            for &p in &primes[start..] {
                let lp = (p as f64).ln();
                if lp >= hi {
                    break;
                }
                sum.add((-sigma * lp).exp());
            }
            let window_sum = sum.value();
            WitnessRow {
                m,
                log_window: (lo, hi),
                window_sum,
                scaled: m as f64 * window_sum,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::ShiftVector;
    use crate::primes::sieve_up_to;
    use crate::zeta::EvalPoint;

    fn spec(sigma: f64, t: f64, shifts: Vec<f64>) -> TargetSpec {
        let n = shifts.len();
        TargetSpec {
            targets: vec![Complex64::new(0.0, 0.0); n],
            epsilon: 0.1,
            s: EvalPoint::new(sigma, t).unwrap(),
            shifts: ShiftVector::new(shifts).unwrap(),
            prime_floor: 1.0,
        }
    }

    fn oracle(limit: u64, sigma: f64, lo: f64, hi: f64) -> f64 {
        (2..=limit)
            .filter(|&k| (2..k).take_while(|d| d * d <= k).all(|d| k % d != 0))
            .map(|p| p as f64)
            .filter(|p| p.ln() > lo && p.ln() < hi)
            .map(|p| p.powf(-sigma))
            .sum()
    }

    #[test]
    fn matches_filter_oracle() {
        let table = sieve_up_to(200_000).unwrap();
        let sp = spec(0.75, 2.0, vec![1.0, 2.0]);
        let rows = divergence_witness(&table, &sp, &[1.0, 0.0, 0.0, 1.0], 3).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            let want = oracle(200_000, 0.75, r.log_window.0, r.log_window.1);
            assert!((r.window_sum - want).abs() < 1e-10 * want.max(1.0), "{r:?} vs {want}");
            assert!(r.window_sum > 0.0);
            assert_eq!(r.scaled, r.m as f64 * r.window_sum);
        }
    }

    #[test]
    fn doubling_t_halves_window_width() {
        let table = sieve_up_to(200_000).unwrap();
        let a = divergence_witness(&table, &spec(0.75, 4.0, vec![1.0]), &[1.0, 0.0], 6).unwrap();
        let b = divergence_witness(&table, &spec(0.75, 8.0, vec![1.0]), &[1.0, 0.0], 12).unwrap();
        let wa = a[0].log_window.1 - a[0].log_window.0;
        let wb = b[0].log_window.1 - b[0].log_window.0;
        assert!((wa - 2.0 * wb).abs() < 1e-14);
        for r in b.iter().step_by(3) {
            let want = oracle(200_000, 0.75, r.log_window.0, r.log_window.1);
            assert!((r.window_sum - want).abs() < 1e-10 * want.max(1.0));
        }
    }

    #[test]
    fn windows_below_two_are_empty() {
        // with t large the first windows sit below log 2
        let table = sieve_up_to(1000).unwrap();
        let rows = divergence_witness(&table, &spec(0.75, 40.0, vec![1.0]), &[1.0, 0.0], 2).unwrap();
        assert!(rows[0].log_window.1 < 2f64.ln());
        assert_eq!(rows[0].window_sum, 0.0);
    }

    #[test]
    fn errors() {
        let table = sieve_up_to(1000).unwrap();
        let sp = spec(0.75, 2.0, vec![1.0]);
        assert!(divergence_witness(&table, &sp, &[1.0, 0.0], 1).is_err());
        assert!(divergence_witness(&table, &sp, &[1.0], 3).is_err());
        assert!(divergence_witness(&table, &sp, &[0.0, 0.0], 3).is_err());
        assert!(matches!(
            divergence_witness(&table, &sp, &[1.0, 0.0], 5),
            Err(TargetingError::Primes(PrimeError::BeyondLimit { .. }))
        ));
    }
}

//! Truncated prime Dirichlet sums `Σ_{p≤X, p∉M} p^{-(s+idτ)}`.
//!
//! [`multi_eval`] advances each prime's phase by a fixed rotation across a
//! τ-grid and re-anchors to a direct evaluation every [`REANCHOR`] steps, so
//! partitioned evaluation is bit-identical to sequential evaluation.

use crate::numeric::{ComplexSum, Progression};
use crate::primes::{PrimeError, PrimeTable};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub const REANCHOR: usize = 1024;

#[derive(Debug, Error, PartialEq)]
pub enum DirichletError {
    #[error("invalid shift vector: {0}")]
    Shifts(String),
    #[error(transparent)]
    Range(#[from] PrimeError),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("grid step {step} too coarse: step·log p_max = {product:.3} > 0.1")]
    Resolution { step: f64, product: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Strictly increasing positive shifts `d_1 < … < d_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ShiftVector {
    shifts: Vec<f64>,
    integral: bool,
}

impl ShiftVector {
    pub fn new(shifts: Vec<f64>) -> Result<Self, DirichletError> {
        if shifts.is_empty() {
            return Err(DirichletError::Shifts("at least one shift required".into()));
        }
        if shifts.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(DirichletError::Shifts("shifts must be finite and positive".into()));
        }
        if shifts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DirichletError::Shifts("shifts must be strictly increasing".into()));
        }
        let integral = shifts.iter().all(|d| d.fract() == 0.0);
        Ok(Self { shifts, integral })
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.integral
    }

    pub fn first(&self) -> f64 {
        self.shifts[0]
    }

    pub fn last(&self) -> f64 {
        self.shifts[self.shifts.len() - 1]
    }
}

impl TryFrom<Vec<f64>> for ShiftVector {
    type Error = DirichletError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<ShiftVector> for Vec<f64> {
    fn from(s: ShiftVector) -> Self {
        s.shifts
    }
}

/// Primes `p ≤ cutoff`, minus `exclude`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeSumSpec {
    pub cutoff: f64,
    pub exclude: BTreeSet<u64>,
}

impl PrimeSumSpec {
    pub fn up_to(cutoff: f64) -> Self {
        Self {
            cutoff,
            exclude: BTreeSet::new(),
        }
    }

    pub fn excluding(cutoff: f64, exclude: impl IntoIterator<Item = u64>) -> Self {
        Self {
            cutoff,
            exclude: exclude.into_iter().collect(),
        }
    }

    /// The primes the sum runs over.
    pub fn primes(&self, table: &PrimeTable) -> Result<Vec<u64>, DirichletError> {
        if let Some(&q) = self.exclude.iter().find(|&&q| !table.contains(q) && q <= table.limit()) {
            return Err(DirichletError::NotPrime(q));
        }
        Ok(table
            .up_to(self.cutoff)?
            .iter()
            .copied()
            .filter(|p| !self.exclude.contains(p))
            .collect())
    }
}

/// `p^{-(s + iu)}`.
#[inline]
pub(crate) fn prime_term(p: u64, s: Complex64, u: f64) -> Complex64 {
    let lp = (p as f64).ln();
    Complex64::from_polar((-s.re * lp).exp(), -(s.im + u) * lp)
}

/// `Σ_{p≤X, p∉M} p^{-(s + i·shift·τ)}` with compensated summation.
pub fn prime_sum(
    table: &PrimeTable,
    s: Complex64,
    spec: &PrimeSumSpec,
    shift: f64,
    tau: f64,
) -> Result<Complex64, DirichletError> {
    let primes = spec.primes(table)?;
    Ok(sum_over(&primes, s, shift * tau))
}

pub(crate) fn sum_over(primes: &[u64], s: Complex64, u: f64) -> Complex64 {
    primes
        .iter()
        .map(|&p| prime_term(p, s, u))
        .collect::<ComplexSum>()
        .value()
}

/// Row-major `n × count` matrix of prime sums, one row per shift.
#[derive(Debug, Clone, PartialEq)]
pub struct SumMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl SumMatrix {
    pub fn get(&self, k: usize, j: usize) -> Complex64 {
        self.data[k * self.cols + j]
    }

    pub fn row(&self, k: usize) -> &[Complex64] {
        &self.data[k * self.cols..(k + 1) * self.cols]
    }
}

/// Prime sums for every shift `d_k` at every `τ_j = τ_0 + jΔτ`.
pub fn multi_eval(
    table: &PrimeTable,
    s: Complex64,
    shifts: &ShiftVector,
    spec: &PrimeSumSpec,
    grid: Progression,
) -> Result<SumMatrix, DirichletError> {
    if grid.count < 1 || !(grid.step > 0.0) {
        return Err(DirichletError::InvalidParameter(
            "grid needs count ≥ 1 and a positive step".into(),
        ));
    }
    let primes = spec.primes(table)?;
    let mut data = Vec::with_capacity(shifts.len() * grid.count);
    for &d in shifts.shifts() {
        let row: Vec<Complex64> = grid
            .blocks(REANCHOR)
            .into_par_iter()
            .map(|r| rotated_block(&primes, s, d, grid.at(r.start), grid.step, r.len()))
            .collect::<Vec<_>>()
            .concat();
        data.extend(row);
    }
    Ok(SumMatrix {
        rows: shifts.len(),
        cols: grid.count,
        data,
    })
}

fn rotated_block(primes: &[u64], s: Complex64, d: f64, tau0: f64, dtau: f64, len: usize) -> Vec<Complex64> {
    let mut cur: Vec<Complex64> = primes.iter().map(|&p| prime_term(p, s, d * tau0)).collect();
    let rot: Vec<Complex64> = primes
        .iter()
        .map(|&p| Complex64::from_polar(1.0, -d * dtau * (p as f64).ln()))
        .collect();
    (0..len)
        .map(|_| {
            let mut acc = ComplexSum::new();
            for (c, r) in cur.iter_mut().zip(&rot) {
                acc.add(*c);
                *c *= r;
            }
            acc.value()
        })
        .collect()
}

/// Mean-value diagnostic: numerical `(1/T)∫_T^{2T} |Σ a_p p^{-iτ}|² dτ`
/// against the diagonal `Σ |a_p|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanValueCheck {
    pub lhs: f64,
    pub rhs: f64,
}

pub fn mv_meanvalue_check(
    coefficients: &BTreeMap<u64, Complex64>,
    t_base: f64,
    grid_step: f64,
) -> Result<MeanValueCheck, DirichletError> {
    if !(t_base > 0.0) || !(grid_step > 0.0) {
        return Err(DirichletError::InvalidParameter(
            "T and grid_step must be positive".into(),
        ));
    }
    let active: Vec<(f64, Complex64)> = coefficients
        .iter()
        .filter(|(_, a)| a.norm() > 0.0)
        .map(|(&p, &a)| ((p as f64).ln(), a))
        .collect();
    let rhs = active.iter().map(|(_, a)| a.norm_sqr()).sum();
    let max_log = active.iter().map(|(l, _)| *l).fold(0.0, f64::max);
    if grid_step * max_log > 0.1 {
        return Err(DirichletError::Resolution {
            step: grid_step,
            product: grid_step * max_log,
        });
    }
    if active.is_empty() {
        return Ok(MeanValueCheck { lhs: 0.0, rhs: 0.0 });
    }
    let segments = (t_base / grid_step).ceil() as usize;
    let h = t_base / segments as f64;
    let mid = Progression::new(t_base + 0.5 * h, h, segments);
    let lhs = mid
        .blocks(REANCHOR)
        .into_par_iter()
        .map(|r| {
            let tau0 = mid.at(r.start);
            let mut cur: Vec<Complex64> = active
                .iter()
                .map(|(l, a)| a * Complex64::from_polar(1.0, -tau0 * l))
                .collect();
            let rot: Vec<Complex64> = active.iter().map(|(l, _)| Complex64::from_polar(1.0, -h * l)).collect();
            let mut acc = crate::numeric::CompensatedSum::new();
            for _ in r {
                let mut v = ComplexSum::new();
                for (c, q) in cur.iter_mut().zip(&rot) {
                    v.add(*c);
                    *c *= q;
                }
                acc.add(v.value().norm_sqr());
            }
            acc.value()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum::<f64>()
        * h
        / t_base;
    Ok(MeanValueCheck { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::sieve_up_to;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn shift_vector_validation() {
        let v = ShiftVector::new(vec![1.0, 2.0, 5.0]).unwrap();
        assert!(v.is_integral());
        assert!(!ShiftVector::new(vec![0.5, 2.0]).unwrap().is_integral());
        assert!(ShiftVector::new(vec![]).is_err());
        assert!(ShiftVector::new(vec![2.0, 1.0]).is_err());
        assert!(ShiftVector::new(vec![1.0, 1.0]).is_err());
        assert!(ShiftVector::new(vec![0.0, 1.0]).is_err());
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, "[1.0,2.0,5.0]");
        assert!(serde_json::from_str::<ShiftVector>("[3.0,1.0]").is_err());
    }

    #[test]
    fn prime_sum_small_cases() {
        let t = sieve_up_to(1000).unwrap();
        let s = c(0.75, 2.0);
        assert_eq!(prime_sum(&t, s, &PrimeSumSpec::up_to(1.9), 1.0, 3.0).unwrap(), c(0.0, 0.0));
        let half = prime_sum(&t, c(1.0, 0.0), &PrimeSumSpec::up_to(2.0), 0.0, 17.0).unwrap();
        assert!((half - c(0.5, 0.0)).norm() < 1e-16);

        let full = prime_sum(&t, s, &PrimeSumSpec::up_to(100.0), 1.0, 5.0).unwrap();
        let cut = prime_sum(&t, s, &PrimeSumSpec::excluding(100.0, [2, 3]), 1.0, 5.0).unwrap();
        let removed = prime_term(2, s, 5.0) + prime_term(3, s, 5.0);
        assert!((full - (cut + removed)).norm() < 1e-14);
    }

    #[test]
    fn prime_sum_errors() {
        let t = sieve_up_to(100).unwrap();
        assert!(matches!(
            prime_sum(&t, c(0.75, 1.0), &PrimeSumSpec::up_to(1e6), 1.0, 0.0),
            Err(DirichletError::Range(_))
        ));
        assert_eq!(
            prime_sum(&t, c(0.75, 1.0), &PrimeSumSpec::excluding(50.0, [4]), 1.0, 0.0),
            Err(DirichletError::NotPrime(4))
        );
    }

    #[test]
    fn multi_eval_matches_direct() {
        let t = sieve_up_to(1000).unwrap();
        let s = c(0.75, 2.0);
        let shifts = ShiftVector::new(vec![1.0, 2.5]).unwrap();
        let spec = PrimeSumSpec::excluding(500.0, [2, 3, 5]);
        let grid = Progression::new(1234.5, 0.031, 5000);
        let m = multi_eval(&t, s, &shifts, &spec, grid).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut picks: Vec<(usize, usize)> = (0..100)
            .map(|_| (rng.random_range(0..2), rng.random_range(0..5000)))
            .collect();
        for b in [REANCHOR - 1, REANCHOR, 2 * REANCHOR - 1, 4999] {
            picks.push((0, b));
            picks.push((1, b));
        }
        for (k, j) in picks {
            let direct = prime_sum(&t, s, &spec, shifts.shifts()[k], grid.at(j)).unwrap();
            let got = m.get(k, j);
            assert!((got - direct).norm() <= 1e-11 * direct.norm().max(1.0), "({k},{j})");
        }
    }

    #[test]
    fn multi_eval_degenerate_grids() {
        let t = sieve_up_to(100).unwrap();
        let s = c(0.6, 1.0);
        let shifts = ShiftVector::new(vec![1.0, 2.0]).unwrap();
        let one = multi_eval(&t, s, &shifts, &PrimeSumSpec::up_to(50.0), Progression::new(7.0, 1.0, 1)).unwrap();
        for k in 0..2 {
            let direct = prime_sum(&t, s, &PrimeSumSpec::up_to(50.0), shifts.shifts()[k], 7.0).unwrap();
            assert_eq!(one.get(k, 0), direct);
        }
        let zero = multi_eval(&t, s, &shifts, &PrimeSumSpec::up_to(1.0), Progression::new(0.0, 0.1, 10)).unwrap();
        assert!(zero.data.iter().all(|z| *z == c(0.0, 0.0)));
        assert!(multi_eval(&t, s, &shifts, &PrimeSumSpec::up_to(50.0), Progression::new(0.0, 0.1, 0)).is_err());
    }

    #[test]
    fn mean_value_checks() {
        let single = BTreeMap::from([(2u64, c(1.0, 0.0))]);
        let r = mv_meanvalue_check(&single, 1000.0, 0.01).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && r.rhs == 1.0);

        let zero = BTreeMap::from([(2u64, c(0.0, 0.0))]);
        assert_eq!(mv_meanvalue_check(&zero, 100.0, 0.01).unwrap(), MeanValueCheck { lhs: 0.0, rhs: 0.0 });

        let pair = BTreeMap::from([(2u64, c(1.0, 0.0)), (3u64, c(1.0, 0.0))]);
        let r = mv_meanvalue_check(&pair, 1e4, 0.05).unwrap();
        assert!((r.lhs / r.rhs - 1.0).abs() < 0.1);

        assert!(matches!(
            mv_meanvalue_check(&pair, 100.0, 0.5),
            Err(DirichletError::Resolution { .. })
        ));
    }

    #[test]
    fn mean_value_ratio_approaches_one() {
        let coeffs: BTreeMap<u64, Complex64> = [(2, c(1.0, 0.0)), (3, c(0.5, 0.5)), (7, c(-0.3, 0.2)), (11, c(0.0, 1.0))]
            .into_iter()
            .collect();
        let errs: Vec<f64> = [1e3, 1e4, 1e5]
            .iter()
            .map(|&t| {
                let r = mv_meanvalue_check(&coeffs, t, 0.04).unwrap();
                (r.lhs / r.rhs - 1.0).abs()
            })
            .collect();
        assert!(errs[2] < errs[0], "{errs:?}");
        assert!(errs[2] < 0.01, "{errs:?}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]
            #[test]
            fn exclusion_additivity(
                sigma in 0.55f64..1.0, t in 0.1f64..50.0, d in 0.1f64..3.0,
                tau in 0.0f64..1e4, x in 2.0f64..900.0,
                mask in proptest::collection::vec(any::<bool>(), 30)
            ) {
                let table = sieve_up_to(1000).unwrap();
                let s = c(sigma, t);
                let excl: Vec<u64> = table.primes().iter().zip(&mask).filter(|(_, &m)| m).map(|(&p, _)| p).collect();
                let full = prime_sum(&table, s, &PrimeSumSpec::up_to(x), d, tau).unwrap();
                let cut = prime_sum(&table, s, &PrimeSumSpec::excluding(x, excl.iter().copied()), d, tau).unwrap();
                let back: Complex64 = excl.iter().filter(|&&p| (p as f64) <= x).map(|&p| prime_term(p, s, d * tau)).sum();
                prop_assert!((cut + back - full).norm() < 1e-13);
            }
        }
    }
}

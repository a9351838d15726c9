//! `A_d(T) = {τ ∈ [T, 2T] : max_{p∈M} ‖−τ log p/(2π) − θ_p‖ ≤ d}`.
//!
//! For a single prime the condition holds exactly on the intervals
//! `τ ∈ [(j − θ_p − d)/a_p, (j − θ_p + d)/a_p]`, `a_p = log p/(2π)`, so the set
//! is the intersection of finitely many explicit interval lists. No grid is
//! needed for the set itself; the grid step only drives the quadrature of
//! [`tail_energy`].

use super::{measure, AnalysisError, ScanConfig};
use crate::dirichlet::{prime_term, PrimeSumSpec};
use crate::numeric::{dist_to_int, CompensatedSum, ComplexSum};
use crate::primes::sieve_up_to;
use crate::targeting::PhaseAssignment;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSet {
    pub d_halfwidth: f64,
    pub assignment: PhaseAssignment,
    /// Disjoint, sorted, inside `[T, 2T]`.
    pub intervals: Vec<(f64, f64)>,
}

impl WindowSet {
    /// `max_{p∈M} ‖−τ log p/(2π) − θ_p‖`.
    pub fn max_distance(&self, tau: f64) -> f64 {
        self.assignment
            .terms()
            .iter()
            .map(|&(p, th)| dist_to_int(-tau * (p as f64).ln() / TAU - th))
            .fold(0.0, f64::max)
    }

    pub fn measure(&self) -> f64 {
        measure(&self.intervals)
    }

    /// Checks endpoints, midpoints and `samples` random interior points per
    /// interval against the defining inequality, with slack `tol`.
    pub fn verify(&self, samples: usize, seed: u64, tol: f64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ok = |tau: f64| self.max_distance(tau) <= self.d_halfwidth + tol;
        self.intervals.iter().all(|&(a, b)| {
            ok(a) && ok(b) && ok(0.5 * (a + b)) && (0..samples).all(|_| ok(rng.random_range(a..=b)))
        })
    }
}

fn intersect(xs: &[(f64, f64)], ys: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < xs.len() && j < ys.len() {
        let lo = xs[i].0.max(ys[j].0);
        let hi = xs[i].1.min(ys[j].1);
        if hi > lo {
            out.push((lo, hi));
        }
        if xs[i].1 < ys[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

fn prime_windows(p: u64, theta: f64, d: f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let a = (p as f64).ln() / TAU;
    let first = (lo * a + theta - d).floor() as i64;
    let last = (hi * a + theta + d).ceil() as i64;
    (first..=last)
        .map(|j| ((j as f64 - theta - d) / a, (j as f64 - theta + d) / a))
        .collect()
}

/// `A_d(T)` and its relative measure `meas(A_d)/T`.
pub fn scan_a_d(
    assignment: &PhaseAssignment,
    d: f64,
    config: &ScanConfig,
) -> Result<(WindowSet, f64), AnalysisError> {
    config.validate()?;
    if !(d > 0.0 && d < 0.5) {
        return Err(AnalysisError::Invalid(format!("d must lie in (0, 1/2), got {d}")));
    }
    let (lo, hi) = (config.t_base, 2.0 * config.t_base);
    let mut intervals = vec![(lo, hi)];
    for &(p, theta) in assignment.terms() {
        intervals = intersect(&intervals, &prime_windows(p, theta, d, lo, hi));
        if intervals.is_empty() {
            break;
        }
    }
    let set = WindowSet {
        d_halfwidth: d,
        assignment: assignment.clone(),
        intervals,
    };
    let fraction = set.measure() / config.t_base;
    Ok((set, fraction))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEnergy {
    /// `∫_{A_d(T)} |Σ_{p≤X, p∉M} p^{-(s + i d_k τ)}|² dτ`.
    pub integral: f64,
    /// `T (2d)^{|M|} y^{1−2σ}`, `y` the least prime outside `M`.
    pub reference: f64,
    pub y: u64,
}

/// Midpoint rule on every interval of `A_d(T)` with cells of at most `grid_step`.
pub fn tail_energy(
    assignment: &PhaseAssignment,
    d: f64,
    config: &ScanConfig,
    shift_index: usize,
) -> Result<TailEnergy, AnalysisError> {
    let shift = *config.shifts.shifts().get(shift_index).ok_or_else(|| {
        AnalysisError::Invalid(format!(
            "shift index {shift_index} out of range for {} shifts",
            config.shifts.len()
        ))
    })?;
    let (set, _) = scan_a_d(assignment, d, config)?;
    let table = sieve_up_to(config.cutoff_x.max(2.0) as u64 + 1)?;
    let primes = PrimeSumSpec::excluding(config.cutoff_x, assignment.support()).primes(&table)?;
    let s = config.s.as_complex();
    let h = config.grid_step;

    let pieces: Vec<f64> = set
        .intervals
        .par_iter()
        .map(|&(a, b)| {
            let cells = ((b - a) / h).ceil().max(1.0) as usize;
            let w = (b - a) / cells as f64;
            let mut acc = CompensatedSum::new();
            for c in 0..cells {
                let tau = a + (c as f64 + 0.5) * w;
                let v = primes
                    .iter()
                    .map(|&p| prime_term(p, s, shift * tau))
                    .collect::<ComplexSum>()
                    .value();
                acc.add(v.norm_sqr() * w);
            }
            acc.value()
        })
        .collect();
    let mut integral = CompensatedSum::new();
    for x in pieces {
        integral.add(x);
    }

    let y = assignment.first_gap();
    let reference = config.t_base
        * (2.0 * d).powi(assignment.len() as i32)
        * (y as f64).powf(1.0 - 2.0 * config.s.sigma());
    Ok(TailEnergy {
        integral: integral.value(),
        reference,
        y,
    })
}

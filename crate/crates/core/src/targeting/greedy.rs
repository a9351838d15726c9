//! Greedy rearrangement towards a target vector.
//!
//! Primes are visited in increasing order. Every prime below the floor `y`
//! is taken unconditionally; later primes are taken only when their term
//! strictly shrinks the Euclidean gap `|v − w|` in `ℂⁿ ≅ ℝ^{2n}`. Terms
//! longer than the gap must in addition point within `overshoot_angle` of it.

use super::{p_pow_neg_s, residual, PhaseAssignment, TargetSpec, TargetingError};
use crate::numeric::{frac, unit};
use crate::primes::{sieve_first, sieve_up_to};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseMode {
    /// `θ_{p_m} = m/L (mod 1)` with `L = ⌈n + d_n − d_1⌉`; primes are only
    /// selected or skipped.
    Lattice,
    /// `θ_p` chosen on a 256-point grid over `[0, 1)`, refined once.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyOptions {
    pub mode: PhaseMode,
    /// Number of primes examined, `p_1, …, p_budget`.
    pub budget: usize,
    /// Radians.
    pub overshoot_angle: f64,
    pub phase_grid: usize,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        Self {
            mode: PhaseMode::Free,
            budget: 100_000,
            overshoot_angle: std::f64::consts::FRAC_PI_3,
            phase_grid: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyOutcome {
    pub assignment: PhaseAssignment,
    /// Independently re-summed `max_k` residual.
    pub residual: f64,
    pub primes_examined: usize,
    /// Euclidean gap after each accepted step beyond the mandatory primes.
    pub gap_trace: Vec<f64>,
}

/// `⌈n + d_n − d_1⌉`, the lattice modulus; strictly exceeds `n − 1 + d_n − d_1`.
pub fn lattice_modulus(spec: &TargetSpec) -> u64 {
    let n = spec.shifts.len() as f64;
    (n + spec.shifts.last() - spec.shifts.first()).ceil() as u64
}

pub fn build_phase_assignment(
    spec: &TargetSpec,
    options: &GreedyOptions,
) -> Result<GreedyOutcome, TargetingError> {
    spec.validate()?;
    if options.phase_grid < 2 {
        return Err(TargetingError::Invalid("phase grid needs at least 2 points".into()));
    }
    let l = lattice_modulus(spec);
    let mut table = sieve_first(options.budget.max(1));
    if spec.prime_floor >= table.limit() as f64 {
        table = sieve_up_to(spec.prime_floor.ceil() as u64 + 1)?;
    }
    let mut assignment = PhaseAssignment::new(
        Vec::new(),
        (options.mode == PhaseMode::Lattice).then_some(l),
    )?;

    let mut gap: Vec<Complex64> = spec.targets.clone();
    let mut gap_trace = Vec::new();
    let mut best: Option<(f64, usize)> = None;
    let mut examined = 0;

    let done = |gap: &[Complex64], assignment: &PhaseAssignment| {
        gap.iter().map(|g| g.norm()).fold(0.0, f64::max) < spec.epsilon
            && residual(assignment, spec) < spec.epsilon
    };

    let mandatory_count = table.pi(spec.prime_floor - 1e-9).unwrap_or(0);
    if mandatory_count == 0 && done(&gap, &assignment) {
        return Ok(outcome(assignment, spec, 0, gap_trace));
    }

    for (idx, &p) in table.primes().iter().take(options.budget).enumerate() {
        examined = idx + 1;
        let mandatory = (p as f64) < spec.prime_floor;
        let ps = p_pow_neg_s(p, &spec.s);
        let theta = match options.mode {
            PhaseMode::Lattice => (examined as u64 % l) as f64 / l as f64,
            PhaseMode::Free => match best_phase(spec, &gap, ps, options.phase_grid, mandatory) {
                Some(th) => th,
                None => continue,
            },
        };
        let term = spec.term(p, theta);
        let gap_sq: f64 = gap.iter().map(|g| g.norm_sqr()).sum();
        let term_sq: f64 = term.iter().map(|u| u.norm_sqr()).sum();
        let inner: f64 = gap.iter().zip(&term).map(|(g, u)| (g.conj() * u).re).sum();
        let accept = mandatory || {
            let shrinks = 2.0 * inner > term_sq;
            let aligned = term_sq <= gap_sq
                || inner >= (term_sq * gap_sq).sqrt() * options.overshoot_angle.cos();
            shrinks && aligned
        };
        if !accept {
            continue;
        }
        assignment.push(p, theta);
        for (g, u) in gap.iter_mut().zip(&term) {
            *g -= u;
        }
        if mandatory {
            if examined == mandatory_count && done(&gap, &assignment) {
                return Ok(outcome(assignment, spec, examined, gap_trace));
            }
            continue;
        }
        gap_trace.push(gap.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt());
        let max_gap = gap.iter().map(|g| g.norm()).fold(0.0, f64::max);
        if best.is_none_or(|(r, _)| max_gap < r) {
            best = Some((max_gap, assignment.len()));
        }
        if done(&gap, &assignment) {
            return Ok(outcome(assignment, spec, examined, gap_trace));
        }
    }

    // all mandatory primes in, but nothing after them
    if examined >= mandatory_count && done(&gap, &assignment) {
        return Ok(outcome(assignment, spec, examined, gap_trace));
    }
    let full_len = assignment.len();
    let mut best_assignment = assignment;
    if let Some((_, len)) = best {
        best_assignment.truncate(len.min(full_len));
    }
    let res = residual(&best_assignment, spec);
    Err(TargetingError::NonConvergence {
        best: Box::new(best_assignment),
        residual: res,
        primes_used: examined,
    })
}

fn outcome(
    assignment: PhaseAssignment,
    spec: &TargetSpec,
    examined: usize,
    gap_trace: Vec<f64>,
) -> GreedyOutcome {
    GreedyOutcome {
        residual: residual(&assignment, spec),
        assignment,
        primes_examined: examined,
        gap_trace,
    }
}

/// Phase maximising `Re Σ_k conj(g_k)·e(d_kθ)·p^{-s}`; `None` when no phase
/// gives a positive inner product and the prime is optional.
fn best_phase(
    spec: &TargetSpec,
    gap: &[Complex64],
    ps: Complex64,
    grid: usize,
    mandatory: bool,
) -> Option<f64> {
    let score = |theta: f64| -> f64 {
        let s: Complex64 = spec
            .shifts
            .shifts()
            .iter()
            .zip(gap)
            .map(|(d, g)| g.conj() * unit(d * theta))
            .sum();
        (s * ps).re
    };
    let mut best = (0.0, f64::NEG_INFINITY);
    for j in 0..grid {
        let th = j as f64 / grid as f64;
        let v = score(th);
        if v > best.1 {
            best = (th, v);
        }
    }
    if best.1 <= 0.0 && !mandatory {
        return None;
    }
    let half = grid / 2;
    let step = 1.0 / (grid as f64 * half as f64);
    let center = best.0;
    for i in 0..=2 * half {
        let th = center + (i as f64 - half as f64) * step;
        let v = score(th);
        if v > best.1 {
            best = (th, v);
        }
    }
    Some(frac(best.0))
}

//! Effective simultaneous Diophantine approximation.
//!
//! For integers `t` in a window `[T1, T2]` the objective is
//! `Σ_j δ_j ‖λ_j t − α_j‖²`. Whenever every combination `Σ u_jλ_j ∈ ℤ` with
//! `|u_j| ≤ M` forces `Σ u_jα_j ∈ ℤ`, its minimum is at most
//!
//! `Δ/4 · sin²(π/(2(M+1))) + Δ·M^n / (8(T2−T1)Λ)`
//!
//! with `Δ = Σδ_j` and `Λ` the smallest non-integral `|Σ u_jλ_j|`.

use crate::dirichlet::ShiftVector;
use crate::numeric::dist_to_int;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// `Σ u_jλ_j` closer than this to an integer counts as integral.
pub const INTEGRALITY_TOL: f64 = 1e-9;
/// `n·ln(2M+1)` above this refuses to enumerate coefficient vectors.
pub const ENUMERATION_BUDGET: f64 = 35.0;
/// Widest integer window scanned exhaustively.
pub const MAX_WINDOW: i64 = 100_000_000;

const SCAN_CHUNK: i64 = 1 << 16;

#[derive(Debug, Error, PartialEq)]
pub enum KroneckerError {
    #[error("enumerating (2·{coeff_bound}+1)^{n} coefficient vectors exceeds the budget")]
    EnumerationBudget { n: usize, coeff_bound: u64 },
    #[error("window of width {0} exceeds the exhaustive scan budget")]
    WindowBudget(i64),
    #[error("no h found within width {tried} meeting Σ‖h·d_k‖² ≤ {target}")]
    SearchBudget { tried: i64, target: f64 },
    #[error("objective {objective} exceeds the certified bound {bound}")]
    BoundViolated { objective: f64, bound: f64 },
    #[error("invalid instance: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KroneckerInstance {
    pub lambdas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub weights: Vec<f64>,
    pub coeff_bound: u64,
    pub window: (i64, i64),
    /// Caller vouches that integral `Σu_jλ_j` implies integral `Σu_jα_j`.
    /// Homogeneous instances (all `α_j = 0`) satisfy it automatically.
    #[serde(default)]
    pub hypothesis_asserted: bool,
}

impl KroneckerInstance {
    pub fn homogeneous(lambdas: Vec<f64>, coeff_bound: u64, window: (i64, i64)) -> Self {
        let n = lambdas.len();
        Self {
            lambdas,
            alphas: vec![0.0; n],
            weights: vec![1.0; n],
            coeff_bound,
            window,
            hypothesis_asserted: false,
        }
    }

    pub fn validate(&self) -> Result<(), KroneckerError> {
        let n = self.lambdas.len();
        if n == 0 || self.alphas.len() != n || self.weights.len() != n {
            return Err(KroneckerError::Invalid(
                "lambdas, alphas and weights must share a positive length".into(),
            ));
        }
        if self.weights.iter().any(|w| !(*w > 0.0)) {
            return Err(KroneckerError::Invalid("weights must be positive".into()));
        }
        if self.coeff_bound == 0 {
            return Err(KroneckerError::Invalid("coefficient bound M must be positive".into()));
        }
        if self.window.0 >= self.window.1 {
            return Err(KroneckerError::Invalid("window needs T1 < T2".into()));
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.alphas.iter().all(|a| *a == 0.0)
    }

    pub fn hypothesis_holds(&self) -> bool {
        self.hypothesis_asserted || self.is_homogeneous()
    }

    pub fn objective(&self, t: i64) -> f64 {
        let tf = t as f64;
        self.lambdas
            .iter()
            .zip(&self.alphas)
            .zip(&self.weights)
            .map(|((l, a), w)| {
                let d = dist_to_int(l * tf - a);
                w * d * d
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KroneckerSolution {
    pub t_star: i64,
    pub objective: f64,
    pub bound: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    /// `None` encodes Λ = +∞ (every bounded combination is integral).
    #[serde(rename = "Lambda")]
    pub lambda: Option<f64>,
    /// Hypothesis holds and `objective ≤ bound` was checked.
    pub certified: bool,
}

/// `Λ`: the smallest `|Σ u_jλ_j|` over `|u_j| ≤ M` with a non-integral sum.
/// `None` when every such sum is integral.
pub fn lambda_min(lambdas: &[f64], coeff_bound: u64) -> Result<Option<f64>, KroneckerError> {
    let n = lambdas.len();
    let m = coeff_bound as i64;
    if n as f64 * ((2 * m + 1) as f64).ln() > ENUMERATION_BUDGET {
        return Err(KroneckerError::EnumerationBudget { n, coeff_bound });
    }
    if n == 0 {
        return Ok(None);
    }
    // u and −u give the same |Σ|; fix the sign of the leading coefficient.
    let tail_count = (2 * m + 1).pow(n as u32 - 1);
    let best = (0..=m)
        .into_par_iter()
        .map(|u0| {
            let mut best = f64::INFINITY;
            let mut u = vec![-m; n - 1];
            for idx in 0..tail_count {
                if idx > 0 {
                    for c in u.iter_mut() {
                        if *c < m {
                            *c += 1;
                            break;
                        }
                        *c = -m;
                    }
                }
                let v = u0 as f64 * lambdas[0]
                    + u.iter().zip(&lambdas[1..]).map(|(c, l)| *c as f64 * l).sum::<f64>();
                if dist_to_int(v) > INTEGRALITY_TOL {
                    best = best.min(v.abs());
                }
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best.is_finite().then_some(best))
}

/// Right-hand side of the approximation bound for `instance` given `Λ`.
pub fn chen_bound(instance: &KroneckerInstance, lambda: Option<f64>) -> f64 {
    let delta = instance.delta();
    let m = instance.coeff_bound as f64;
    let first = delta / 4.0 * (PI / (2.0 * (m + 1.0))).sin().powi(2);
    let second = match lambda {
        Some(l) => {
            let width = (instance.window.1 - instance.window.0) as f64;
            delta * m.powi(instance.lambdas.len() as i32) / (8.0 * width * l)
        }
        None => 0.0,
    };
    first + second
}

/// Exact minimiser of the objective over the integer window, smallest `t` on ties.
pub fn chen_search(instance: &KroneckerInstance) -> Result<KroneckerSolution, KroneckerError> {
    instance.validate()?;
    let (t1, t2) = instance.window;
    if t2 - t1 > MAX_WINDOW {
        return Err(KroneckerError::WindowBudget(t2 - t1));
    }
    let (t_star, objective) = scan_window(t1, t2, |t| instance.objective(t));
    let lambda = lambda_min(&instance.lambdas, instance.coeff_bound)?;
    let bound = chen_bound(instance, lambda);
    let hypothesis = instance.hypothesis_holds();
    if hypothesis && objective > bound {
        return Err(KroneckerError::BoundViolated { objective, bound });
    }
    Ok(KroneckerSolution {
        t_star,
        objective,
        bound,
        delta: instance.delta(),
        lambda,
        certified: hypothesis,
    })
}

/// Minimum of `f` over `t1..=t2`, smallest argument on ties. Chunks are
/// merged by (value, t) so the result does not depend on scheduling.
fn scan_window(t1: i64, t2: i64, f: impl Fn(i64) -> f64 + Sync) -> (i64, f64) {
    let chunks: Vec<(i64, i64)> = (0..)
        .map(|c| t1 + c * SCAN_CHUNK)
        .take_while(|&lo| lo <= t2)
        .map(|lo| (lo, (lo + SCAN_CHUNK - 1).min(t2)))
        .collect();
    chunks
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut best = (lo, f(lo));
            for t in lo + 1..=hi {
                let v = f(t);
                if v < best.1 {
                    best = (t, v);
                }
            }
            best
        })
        .reduce(
            || (i64::MAX, f64::INFINITY),
            |a, b| {
                if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        )
}

/// Result of the homogeneous window search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowHit {
    pub h: i64,
    /// Width of the window `[a, a + T]` that was scanned last.
    pub t_used: i64,
    /// `Σ_k ‖h·d_k‖²`.
    pub objective: f64,
}

/// Integer coefficient bound `M = ⌈πω/4 − 1⌉` (at least 1) used with `ω`.
pub fn omega_coeff_bound(omega: f64) -> u64 {
    ((PI * omega / 4.0 - 1.0).ceil() as u64).max(1)
}

/// Find `h ∈ [a, a+T]` with `Σ_k ‖h d_k‖² ≤ n/ω`, doubling `T` from 1
/// until the window contains one. The smallest such `h` in the final window
/// minimising the objective is returned.
pub fn homogeneous_window(shifts: &ShiftVector, omega: f64, a: i64) -> Result<WindowHit, KroneckerError> {
    if !(omega >= 1.0) {
        return Err(KroneckerError::Invalid("omega must be at least 1".into()));
    }
    let target = shifts.len() as f64 / omega;
    let objective = |h: i64| {
        let hf = h as f64;
        shifts
            .shifts()
            .iter()
            .map(|d| {
                let e = dist_to_int(hf * d);
                e * e
            })
            .sum::<f64>()
    };
    let mut width: i64 = 1;
    let mut scanned_to = a - 1;
    let mut best = (a, f64::INFINITY);
    loop {
        // only the new part of the window needs scanning
        let (h, v) = scan_window(scanned_to + 1, a + width, objective);
        if v < best.1 {
            best = (h, v);
        }
        scanned_to = a + width;
        if best.1 <= target {
            return Ok(WindowHit {
                h: best.0,
                t_used: width,
                objective: best.1,
            });
        }
        if width >= MAX_WINDOW {
            return Err(KroneckerError::SearchBudget { tried: width, target });
        }
        width = (width * 2).min(MAX_WINDOW);
    }
}

/// Window length that Chen's bound certifies for the window search: the smallest
/// `T` with `M^n / (2ΛT) ≤ 2/ω`, or 1 when `Λ = +∞`.
pub fn certified_window_length(shifts: &ShiftVector, omega: f64) -> Result<u64, KroneckerError> {
    let m = omega_coeff_bound(omega);
    let lambda = lambda_min(shifts.shifts(), m)?;
    Ok(match lambda {
        None => 1,
        Some(l) => {
            let mn = (m as f64).powi(shifts.len() as i32);
            (omega * mn / (4.0 * l)).ceil().max(1.0) as u64
        }
    })
}

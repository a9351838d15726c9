//! Prime-phase targeting.
//!
//! A [`PhaseAssignment`] is a finite set of primes `M` with phases `θ_p`; the
//! weighted sums `Σ_{p∈M} e(d_kθ_p) p^{-s}` are steered onto targets `z_k`.
//! The constructor is a greedy rearrangement whose output is certified by an
//! independent re-summation ([`residual`]).

mod greedy;
mod winding;
mod witness;

pub use greedy::{build_phase_assignment, lattice_modulus, GreedyOptions, GreedyOutcome, PhaseMode};
pub use winding::{
    exp_poly_zero_count, wilder_bound_holds, wilder_count, wilder_count_at_resolution, Rectangle,
};
pub use witness::{divergence_witness, WitnessRow};

use crate::dirichlet::{DirichletError, ShiftVector};
use crate::numeric::{unit, ComplexSum};
use crate::primes::PrimeError;
use crate::zeta::EvalPoint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TargetingError {
    #[error("greedy construction stopped at residual {residual:.3e} ≥ ε after {primes_used} primes")]
    NonConvergence {
        best: Box<PhaseAssignment>,
        residual: f64,
        primes_used: usize,
    },
    #[error("zero of the exponential sum within tolerance of the contour")]
    ContourNearZero,
    #[error("invalid target spec: {0}")]
    Invalid(String),
    #[error(transparent)]
    Primes(#[from] PrimeError),
    #[error(transparent)]
    Dirichlet(#[from] DirichletError),
}

/// Phases `θ_p ∈ [0, 1)` on an increasing set of primes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhaseAssignment {
    terms: Vec<(u64, f64)>,
    lattice_l: Option<u64>,
}

impl PhaseAssignment {
    pub fn new(terms: Vec<(u64, f64)>, lattice_l: Option<u64>) -> Result<Self, TargetingError> {
        if terms.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(TargetingError::Invalid("support must be strictly increasing".into()));
        }
        if terms.iter().any(|(_, th)| !(0.0..1.0).contains(th)) {
            return Err(TargetingError::Invalid("phases must lie in [0, 1)".into()));
        }
        if lattice_l == Some(0) {
            return Err(TargetingError::Invalid("lattice L must be positive".into()));
        }
        Ok(Self { terms, lattice_l })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> &[(u64, f64)] {
        &self.terms
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.iter().map(|(p, _)| *p)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lattice_l(&self) -> Option<u64> {
        self.lattice_l
    }

    pub fn phase(&self, p: u64) -> Option<f64> {
        self.terms
            .binary_search_by_key(&p, |(q, _)| *q)
            .ok()
            .map(|i| self.terms[i].1)
    }

    /// Smallest prime not in the support.
    pub fn first_gap(&self) -> u64 {
        let mut expected = crate::primes::sieve_up_to(
            self.terms.last().map_or(2, |(p, _)| 2 * p + 2),
        )
        .expect("limit ≥ 2")
        .primes()
        .to_vec()
        .into_iter();
        for (p, _) in &self.terms {
            match expected.next() {
                Some(q) if q == *p => continue,
                Some(q) if q < *p => return q,
                _ => break,
            }
        }
        expected.next().unwrap_or(2)
    }

    pub(crate) fn push(&mut self, p: u64, theta: f64) {
        debug_assert!(self.terms.last().is_none_or(|(q, _)| *q < p));
        self.terms.push((p, theta));
    }

    pub(crate) fn truncate(&mut self, len: usize) {
        self.terms.truncate(len);
    }
}

#[derive(Serialize, Deserialize)]
struct AssignmentDoc {
    #[serde(rename = "L")]
    l: Option<u64>,
    terms: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    p: u64,
    theta: f64,
}

impl Serialize for PhaseAssignment {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        AssignmentDoc {
            l: self.lattice_l,
            terms: self
                .terms
                .iter()
                .map(|&(p, theta)| TermDoc { p, theta })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PhaseAssignment {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let doc = AssignmentDoc::deserialize(de)?;
        PhaseAssignment::new(
            doc.terms.into_iter().map(|t| (t.p, t.theta)).collect(),
            doc.l,
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Targets `z_k`, tolerance `ε`, point `s`, shifts `d_k` and prime floor `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub targets: Vec<Complex64>,
    pub epsilon: f64,
    pub s: EvalPoint,
    pub shifts: ShiftVector,
    pub prime_floor: f64,
}

impl TargetSpec {
    pub fn validate(&self) -> Result<(), TargetingError> {
        if self.targets.len() != self.shifts.len() {
            return Err(TargetingError::Invalid(format!(
                "{} targets for {} shifts",
                self.targets.len(),
                self.shifts.len()
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(TargetingError::Invalid("epsilon must be positive".into()));
        }
        if !(self.prime_floor > 0.0) {
            return Err(TargetingError::Invalid("prime floor y must be positive".into()));
        }
        Ok(())
    }

    /// `e(d_kθ)·p^{-s}` for each shift.
    pub(crate) fn term(&self, p: u64, theta: f64) -> Vec<Complex64> {
        let ps = p_pow_neg_s(p, &self.s);
        self.shifts.shifts().iter().map(|d| unit(d * theta) * ps).collect()
    }
}

pub(crate) fn p_pow_neg_s(p: u64, s: &EvalPoint) -> Complex64 {
    let lp = (p as f64).ln();
    Complex64::from_polar((-s.sigma() * lp).exp(), -s.t() * lp)
}

/// The sums `Σ_{p∈M} e(d_kθ_p) p^{-s}` for every shift.
pub fn assignment_sums(assignment: &PhaseAssignment, spec: &TargetSpec) -> Vec<Complex64> {
    spec.shifts
        .shifts()
        .iter()
        .map(|d| {
            assignment
                .terms()
                .iter()
                .map(|&(p, th)| unit(d * th) * p_pow_neg_s(p, &spec.s))
                .collect::<ComplexSum>()
                .value()
        })
        .collect()
}

/// `max_k |Σ_{p∈M} e(d_kθ_p) p^{-s} − z_k|`.
pub fn residual(assignment: &PhaseAssignment, spec: &TargetSpec) -> f64 {
    assignment_sums(assignment, spec)
        .into_iter()
        .zip(&spec.targets)
        .map(|(v, z)| (v - z).norm())
        .fold(0.0, f64::max)
}

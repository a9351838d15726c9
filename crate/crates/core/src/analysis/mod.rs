//! Measures of τ-sets in `[T, 2T]`.
//!
//! Every scan works on the node grid `τ_j = T + j·h`, `h = T/⌈T/grid_step⌉`,
//! the same grid [`zero_proximity_scan`](crate::zeta::zero_proximity_scan)
//! uses. A node flagged near a zero of ζ removes the cells on both sides of
//! it; those windows are dropped from numerator and denominator alike.
//! Between two nodes the predicate `g(τ) < 0` is located by linear
//! interpolation of `g`.

mod adset;
mod meansquare;
mod theorem;

pub use adset::{scan_a_d, tail_energy, TailEnergy, WindowSet};
pub use meansquare::{good_set_measure, tsang_detail, tsang_meansquare, TsangReport};
pub use theorem::{find_tau, theorem_scan, TauHit};

use crate::dirichlet::{DirichletError, ShiftVector};
use crate::numeric::{CompensatedSum, Progression};
use crate::primes::PrimeError;
use crate::zeta::{EvalPoint, VerticalLine, ZetaError};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// `|ζ|` below this at a grid node excludes the neighbouring cells.
pub const ZERO_FLOOR: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("grid_step {grid_step} too coarse, at most {max_step} resolves the fastest phase")]
    Resolution { grid_step: f64, max_step: f64 },
    #[error("invalid scan parameter: {0}")]
    Invalid(String),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Dirichlet(#[from] DirichletError),
    #[error(transparent)]
    Primes(#[from] PrimeError),
}

fn default_slack() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub s: EvalPoint,
    pub shifts: ShiftVector,
    /// The range is `[T, 2T]`.
    #[serde(rename = "T")]
    pub t_base: f64,
    pub grid_step: f64,
    pub seed: u64,
    #[serde(rename = "cutoff_X")]
    pub cutoff_x: f64,
    pub epsilon: f64,
    /// Pre-filter threshold of the theorem scan is `(1 + slack)·ε`.
    #[serde(default = "default_slack")]
    pub prefilter_slack: f64,
}

impl ScanConfig {
    /// `π / (8 · d_n · max(1, log X))`.
    pub fn max_grid_step(&self) -> f64 {
        PI / (8.0 * self.shifts.last() * self.cutoff_x.ln().max(1.0))
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        if !(self.t_base > 0.0 && self.t_base.is_finite()) {
            return Err(AnalysisError::Invalid(format!("T must be positive, got {}", self.t_base)));
        }
        if !(self.grid_step > 0.0) {
            return Err(AnalysisError::Invalid("grid_step must be positive".into()));
        }
        if !(self.epsilon >= 0.0) {
            return Err(AnalysisError::Invalid("epsilon must be non-negative".into()));
        }
        if !(self.prefilter_slack >= 0.0) {
            return Err(AnalysisError::Invalid("prefilter_slack must be non-negative".into()));
        }
        if !(self.cutoff_x.is_finite() && self.cutoff_x >= 0.0) {
            return Err(AnalysisError::Invalid("cutoff_X must be finite and non-negative".into()));
        }
        let max_step = self.max_grid_step();
        if self.grid_step > max_step {
            return Err(AnalysisError::Resolution {
                grid_step: self.grid_step,
                max_step,
            });
        }
        Ok(())
    }

    /// `δ` with `X = T^δ`.
    pub fn delta_equivalent(&self) -> f64 {
        self.cutoff_x.ln() / self.t_base.ln()
    }

    pub(crate) fn grid(&self) -> Progression {
        tau_grid(self.t_base, self.grid_step)
    }
}

/// `σ + i(t + d·τ_j)` over the node grid.
pub(crate) fn shift_line(config: &ScanConfig, shift: f64, grid: &Progression) -> VerticalLine {
    VerticalLine {
        sigma: config.s.sigma(),
        im: Progression::new(config.s.t() + shift * grid.start, shift * grid.step, grid.count),
    }
}

pub(crate) fn tau_grid(t_base: f64, grid_step: f64) -> Progression {
    let segments = (t_base / grid_step).ceil().max(1.0) as usize;
    Progression::new(t_base, t_base / segments as f64, segments + 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    /// `T` minus the excluded measure.
    pub total_measure: f64,
    pub hit_measure: f64,
    pub fraction: f64,
    /// Disjoint, sorted.
    pub hit_intervals: Vec<(f64, f64)>,
    pub excluded_measure: f64,
    pub excluded_windows: Vec<(f64, f64)>,
    /// Set when the shifts are not all integers.
    pub nonintegral_shifts: bool,
    pub cutoff_x: f64,
    pub delta_equivalent: f64,
}

/// Predicate value at a node; the node is a hit when `g < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Node {
    Value(f64),
    /// Not evaluated; treated as a miss.
    Miss,
    /// Too close to a zero of ζ, or the branch could not be continued.
    Excluded,
}

/// Cells `[τ_c, τ_{c+1}]` touching an excluded node, or covered by a window.
pub(crate) fn excluded_cells(grid: &Progression, nodes: &[Node], windows: &[(f64, f64)]) -> Vec<bool> {
    let cells = grid.count - 1;
    let mut out = vec![false; cells];
    for c in 0..cells {
        out[c] = nodes[c] == Node::Excluded || nodes[c + 1] == Node::Excluded;
    }
    for &(a, b) in windows {
        let first = ((a - grid.start) / grid.step - 0.5).floor().max(0.0) as usize;
        for (c, flag) in out.iter_mut().enumerate().skip(first) {
            let mid = grid.at(c) + 0.5 * grid.step;
            if mid >= b {
                break;
            }
            if mid > a {
                *flag = true;
            }
        }
    }
    out
}

fn merge_runs(runs: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in runs {
        if !(b > a) {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.1 >= a => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

pub(crate) fn measure(intervals: &[(f64, f64)]) -> f64 {
    let mut acc = CompensatedSum::new();
    for (a, b) in intervals {
        acc.add(b - a);
    }
    acc.value()
}

/// Hit intervals and exclusion bookkeeping from node values.
pub(crate) fn density_from_nodes(
    config: &ScanConfig,
    grid: &Progression,
    nodes: &[Node],
    excluded: &[bool],
) -> DensityReport {
    let g = |n: Node| match n {
        Node::Value(v) => v,
        _ => f64::INFINITY,
    };
    let portions = (0..grid.count - 1).filter(|&c| !excluded[c]).filter_map(|c| {
        let (a, b) = (grid.at(c), grid.at(c + 1));
        let (ga, gb) = (g(nodes[c]), g(nodes[c + 1]));
        match (ga < 0.0, gb < 0.0) {
            (true, true) => Some((a, b)),
            (true, false) if gb.is_finite() => Some((a, a + (b - a) * ga / (ga - gb))),
            (false, true) if ga.is_finite() => Some((b - (b - a) * gb / (gb - ga), b)),
            _ => None,
        }
    });
    let hit_intervals = merge_runs(portions);
    let excluded_windows = merge_runs(
        (0..grid.count - 1)
            .filter(|&c| excluded[c])
            .map(|c| (grid.at(c), grid.at(c + 1))),
    );
    let excluded_measure = measure(&excluded_windows);
    let total_measure = (config.t_base - excluded_measure).max(0.0);
    let hit_measure = measure(&hit_intervals);
    DensityReport {
        total_measure,
        hit_measure,
        fraction: if total_measure > 0.0 {
            (hit_measure / total_measure).min(1.0)
        } else {
            0.0
        },
        hit_intervals,
        excluded_measure,
        excluded_windows,
        nonintegral_shifts: !config.shifts.is_integral(),
        cutoff_x: config.cutoff_x,
        delta_equivalent: config.delta_equivalent(),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn config(sigma: f64, t: f64, shifts: Vec<f64>, t_base: f64, x: f64, eps: f64) -> ScanConfig {
        let mut c = ScanConfig {
            s: EvalPoint::new(sigma, t).unwrap(),
            shifts: ShiftVector::new(shifts).unwrap(),
            t_base,
            grid_step: 1.0,
            seed: 7,
            cutoff_x: x,
            epsilon: eps,
            prefilter_slack: 2.0,
        };
        c.grid_step = c.max_grid_step();
        c
    }

    #[test]
    fn config_validation() {
        let mut c = config(0.75, 2.0, vec![1.0, 2.0], 100.0, 500.0, 0.3);
        assert!(c.validate().is_ok());
        assert!((c.max_grid_step() - PI / (16.0 * 500f64.ln())).abs() < 1e-15);
        c.grid_step *= 1.01;
        assert!(matches!(c.validate(), Err(AnalysisError::Resolution { .. })));
        let mut c = config(0.75, 2.0, vec![1.0], 100.0, 1.0, 0.3);
        assert!((c.max_grid_step() - PI / 8.0).abs() < 1e-15);
        c.t_base = 0.0;
        assert!(c.validate().is_err());
        let json = serde_json::to_value(config(0.75, 2.0, vec![1.0], 10.0, 50.0, 0.1)).unwrap();
        assert!(json.get("T").is_some() && json.get("cutoff_X").is_some());
        let back: ScanConfig = serde_json::from_value(json).unwrap();
        assert_eq!(back.t_base, 10.0);
    }

    #[test]
    fn grid_matches_zero_scan_layout() {
        let g = tau_grid(10.0, 0.3);
        assert_eq!(g.count, 35);
        assert_eq!(g.at(0), 10.0);
        assert!((g.at(34) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn interpolated_crossings() {
        let c = config(0.75, 2.0, vec![1.0], 4.0, 2.0, 0.1);
        let grid = Progression::new(4.0, 1.0, 5);
        let nodes = [
            Node::Value(1.0),
            Node::Value(-1.0),
            Node::Value(-1.0),
            Node::Miss,
            Node::Value(-3.0),
        ];
        let excluded = vec![false; 4];
        let r = density_from_nodes(&c, &grid, &nodes, &excluded);
        assert_eq!(r.hit_intervals, vec![(4.5, 6.0)]);
        assert_eq!(r.fraction, 1.5 / 4.0);

        let nodes = [Node::Value(-1.0), Node::Excluded, Node::Value(-1.0), Node::Value(-1.0), Node::Value(3.0)];
        let excluded = excluded_cells(&grid, &nodes, &[]);
        assert_eq!(excluded, vec![true, true, false, false]);
        let r = density_from_nodes(&c, &grid, &nodes, &excluded);
        assert_eq!(r.excluded_windows, vec![(4.0, 6.0)]);
        assert_eq!(r.total_measure, 2.0);
        assert_eq!(r.hit_intervals, vec![(6.0, 7.25)]);
        assert!((r.fraction - 0.625).abs() < 1e-15);
    }
}

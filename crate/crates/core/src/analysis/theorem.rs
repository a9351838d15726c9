//! Density of `{τ : max_k |log ζ(s + i d_k τ) − z_k| < ε}` in `[T, 2T]`.
//!
//! The Dirichlet sums are cheap, so they run first on every node; log ζ is
//! then evaluated only on blocks that hold a node with
//! `max_k |Σ_{p≤X} p^{-(s+id_kτ)} − z_k| < (1 + slack)·ε`, plus their neighbours.

use super::{
    density_from_nodes, excluded_cells, shift_line, AnalysisError, DensityReport, Node,
    ScanConfig, ZERO_FLOOR,
};
use crate::dirichlet::{multi_eval, PrimeSumSpec};
use crate::numeric::Progression;
use crate::primes::sieve_up_to;
use crate::zeta::{log_zeta, log_zeta_on_line, zero_proximity_scan, LineLog, LINE_BLOCK};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauHit {
    pub tau: f64,
    /// `max_k |log ζ(s + i d_k τ) − z_k|`, from a pointwise evaluation.
    pub distance: f64,
}

struct Scan {
    grid: Progression,
    nodes: Vec<Node>,
    report: DensityReport,
}

fn scan(config: &ScanConfig, targets: &[Complex64]) -> Result<Scan, AnalysisError> {
    config.validate()?;
    if targets.len() != config.shifts.len() {
        return Err(AnalysisError::Invalid(format!(
            "{} targets for {} shifts",
            targets.len(),
            config.shifts.len()
        )));
    }
    let grid = config.grid();
    let zeros = zero_proximity_scan(
        &config.s,
        &config.shifts,
        (config.t_base, 2.0 * config.t_base),
        config.grid_step,
        ZERO_FLOOR,
    )?;

    let table = sieve_up_to(config.cutoff_x.max(2.0) as u64 + 1)?;
    let sums = multi_eval(
        &table,
        config.s.as_complex(),
        &config.shifts,
        &PrimeSumSpec::up_to(config.cutoff_x),
        grid,
    )?;
    let threshold = (1.0 + config.prefilter_slack) * config.epsilon;
    let blocks = grid.blocks(LINE_BLOCK);
    let mut mask = vec![false; blocks.len()];
    for (b, r) in blocks.iter().enumerate() {
        let survives = r.clone().any(|j| {
            targets
                .iter()
                .enumerate()
                .all(|(k, z)| (sums.get(k, j) - z).norm() < threshold)
        });
        if survives {
            mask[b.saturating_sub(1)..(b + 2).min(blocks.len())].fill(true);
        }
    }

    let mut nodes = vec![Node::Value(f64::NEG_INFINITY); grid.count];
    if mask.iter().any(|&m| m) {
        for (&d, z) in config.shifts.shifts().iter().zip(targets) {
            let logs = log_zeta_on_line(&shift_line(config, d, &grid), ZERO_FLOOR, Some(&mask));
            for (node, l) in nodes.iter_mut().zip(&logs) {
                *node = match (*node, l) {
                    (Node::Excluded, _) | (_, LineLog::NearZero(_)) => Node::Excluded,
                    (Node::Miss, _) | (_, LineLog::Skipped) => Node::Miss,
                    (Node::Value(g), LineLog::Value(v)) => Node::Value(g.max((v - z).norm())),
                };
            }
        }
    } else {
        nodes.fill(Node::Miss);
    }
    for node in nodes.iter_mut() {
        if let Node::Value(g) = node {
            *g -= config.epsilon;
        }
    }
    let excluded = excluded_cells(&grid, &nodes, &zeros.tau_windows);
    let report = density_from_nodes(config, &grid, &nodes, &excluded);
    Ok(Scan {
        grid,
        nodes,
        report,
    })
}

pub fn theorem_scan(config: &ScanConfig, targets: &[Complex64]) -> Result<DensityReport, AnalysisError> {
    Ok(scan(config, targets)?.report)
}

/// Pointwise `max_k |log ζ(s + i d_k τ) − z_k|`.
fn pointwise_distance(config: &ScanConfig, targets: &[Complex64], tau: f64) -> Option<f64> {
    config
        .shifts
        .shifts()
        .iter()
        .zip(targets)
        .map(|(&d, z)| {
            log_zeta(config.s.shifted(d, tau), 1e-8)
                .ok()
                .map(|v| (v.value - z).norm())
        })
        .try_fold(0.0f64, |m, x| x.map(|x| m.max(x)))
}

/// Golden-section search of the pointwise distance on `[τ − h, τ + h]`,
/// clamped to `[T, 2T]`. Keeps the starting point unless strictly improved.
fn refine(config: &ScanConfig, targets: &[Complex64], start: TauHit, h: f64) -> TauHit {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let f = |tau: f64| pointwise_distance(config, targets, tau).unwrap_or(f64::INFINITY);
    let (mut a, mut b) = (
        (start.tau - h).max(config.t_base),
        (start.tau + h).min(2.0 * config.t_base),
    );
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..40 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let (tau, distance) = if fc < fd { (c, fc) } else { (d, fd) };
    if distance < start.distance {
        TauHit { tau, distance }
    } else {
        start
    }
}

/// Up to `max_hits` witnesses, one per hit interval, sorted by distance.
///
/// Each interval contributes its best grid node (or its midpoint if no node
/// lies inside); candidates are re-evaluated pointwise, refined within one
/// grid step, and kept when the pointwise distance is still below `ε`.
pub fn find_tau(
    config: &ScanConfig,
    targets: &[Complex64],
    max_hits: usize,
) -> Result<Vec<TauHit>, AnalysisError> {
    let Scan { grid, nodes, report } = scan(config, targets)?;
    let mut candidates: Vec<(f64, f64)> = report
        .hit_intervals
        .iter()
        .map(|&(a, b)| {
            let first = ((a - grid.start) / grid.step).ceil().max(0.0) as usize;
            (first..grid.count)
                .take_while(|&j| grid.at(j) <= b)
                .filter_map(|j| match nodes[j] {
                    Node::Value(g) => Some((g, grid.at(j))),
                    _ => None,
                })
                .min_by(|x, y| x.0.total_cmp(&y.0))
                .unwrap_or((0.0, 0.5 * (a + b)))
        })
        .collect();
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    candidates.truncate(2 * max_hits + 8);

    let mut hits: Vec<TauHit> = candidates
        .par_iter()
        .filter_map(|&(_, tau)| {
            let distance = pointwise_distance(config, targets, tau)?;
            let hit = refine(config, targets, TauHit { tau, distance }, grid.step);
            (hit.distance < config.epsilon).then_some(hit)
        })
        .collect();
    hits.sort_by(|x, y| x.distance.total_cmp(&y.distance).then(x.tau.total_cmp(&y.tau)));
    hits.truncate(max_hits);
    Ok(hits)
}

//! How well `Σ_{p≤X} p^{-s}` tracks `log ζ(s)` along vertical lines.

use super::{
    density_from_nodes, excluded_cells, shift_line, tau_grid, AnalysisError, DensityReport, Node,
    ScanConfig, ZERO_FLOOR,
};
use crate::dirichlet::{multi_eval, PrimeSumSpec, ShiftVector};
use crate::numeric::CompensatedSum;
use crate::primes::sieve_up_to;
use crate::zeta::{log_zeta_on_line, LineLog, VerticalLine};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TsangReport {
    /// `(1/meas) ∫ |log ζ(σ+iτ) − Σ_{p≤X} p^{-σ-iτ}|² dτ` over the kept part of `[T, 2T]`.
    pub mean_square: f64,
    pub included_measure: f64,
    pub excluded_measure: f64,
}

/// Trapezoidal quadrature over the cells of `[T, 2T]` that stay clear of zeros.
pub fn tsang_detail(
    sigma: f64,
    t_base: f64,
    cutoff_x: f64,
    grid_step: f64,
) -> Result<TsangReport, AnalysisError> {
    if !(sigma > 0.5 && sigma <= 1.0) {
        return Err(AnalysisError::Invalid(format!("sigma must lie in (1/2, 1], got {sigma}")));
    }
    if !(t_base > 0.0 && t_base.is_finite()) || !(grid_step > 0.0) {
        return Err(AnalysisError::Invalid("T and grid_step must be positive".into()));
    }
    if !(cutoff_x.is_finite() && cutoff_x >= 0.0) {
        return Err(AnalysisError::Invalid("cutoff_X must be finite and non-negative".into()));
    }
    let max_step = PI / (8.0 * cutoff_x.ln().max(1.0));
    if grid_step > max_step {
        return Err(AnalysisError::Resolution { grid_step, max_step });
    }

    let grid = tau_grid(t_base, grid_step);
    let logs = log_zeta_on_line(&VerticalLine { sigma, im: grid }, ZERO_FLOOR, None);
    let table = sieve_up_to(cutoff_x.max(2.0) as u64 + 1)?;
    let sums = multi_eval(
        &table,
        Complex64::new(sigma, 0.0),
        &ShiftVector::new(vec![1.0])?,
        &PrimeSumSpec::up_to(cutoff_x),
        grid,
    )?;
    let nodes: Vec<Node> = logs
        .iter()
        .zip(sums.row(0))
        .map(|(l, d)| match l {
            LineLog::Value(v) => Node::Value((v - d).norm_sqr()),
            _ => Node::Excluded,
        })
        .collect();
    let excluded = excluded_cells(&grid, &nodes, &[]);
    let mut integral = CompensatedSum::new();
    let mut kept = 0usize;
    for (c, _) in excluded.iter().enumerate().filter(|(_, &x)| !x) {
        if let (Node::Value(a), Node::Value(b)) = (nodes[c], nodes[c + 1]) {
            integral.add(0.5 * (a + b) * grid.step);
            kept += 1;
        }
    }
    let included_measure = kept as f64 * grid.step;
    if kept == 0 {
        return Err(AnalysisError::Invalid("every cell of the range was excluded".into()));
    }
    Ok(TsangReport {
        mean_square: integral.value() / included_measure,
        included_measure,
        excluded_measure: t_base - included_measure,
    })
}

pub fn tsang_meansquare(
    sigma: f64,
    t_base: f64,
    cutoff_x: f64,
    grid_step: f64,
) -> Result<f64, AnalysisError> {
    Ok(tsang_detail(sigma, t_base, cutoff_x, grid_step)?.mean_square)
}

/// Part of `[T, 2T]` where `max_k |log ζ(s + i d_k τ) − Σ_{p≤X} p^{-(s + i d_k τ)}| < ε`.
pub fn good_set_measure(config: &ScanConfig) -> Result<DensityReport, AnalysisError> {
    config.validate()?;
    let grid = config.grid();
    let table = sieve_up_to(config.cutoff_x.max(2.0) as u64 + 1)?;
    let sums = multi_eval(
        &table,
        config.s.as_complex(),
        &config.shifts,
        &PrimeSumSpec::up_to(config.cutoff_x),
        grid,
    )?;
    let mut nodes = vec![Node::Value(f64::NEG_INFINITY); grid.count];
    for (k, &d) in config.shifts.shifts().iter().enumerate() {
        let logs = log_zeta_on_line(&shift_line(config, d, &grid), ZERO_FLOOR, None);
        for ((node, l), sum) in nodes.iter_mut().zip(&logs).zip(sums.row(k)) {
            *node = match (*node, l) {
                (Node::Value(g), LineLog::Value(v)) => Node::Value(g.max((v - sum).norm())),
                _ => Node::Excluded,
            };
        }
    }
    for node in nodes.iter_mut() {
        if let Node::Value(g) = node {
            *g -= config.epsilon;
        }
    }
    let excluded = excluded_cells(&grid, &nodes, &[]);
    Ok(density_from_nodes(config, &grid, &nodes, &excluded))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::tests::config;
    use crate::zeta::{log_zeta, zero_proximity_scan};

    #[test]
    fn empty_sum_gives_mean_square_of_log_zeta() {
        // Simpson's rule on pointwise continuations as the oracle
        let (sigma, t0) = (0.8, 40.0);
        let got = tsang_meansquare(sigma, t0, 1.0, 0.01).unwrap();
        let n = 400;
        let h = t0 / n as f64;
        let f = |tau: f64| log_zeta(Complex64::new(sigma, tau), 1e-8).unwrap().value.norm_sqr();
        let mut acc = f(t0) + f(2.0 * t0);
        for j in 1..n {
            acc += if j % 2 == 1 { 4.0 } else { 2.0 } * f(t0 + j as f64 * h);
        }
        let want = acc * h / 3.0 / t0;
        assert!((got - want).abs() < 1e-3 * want, "{got} vs {want}");
    }

    #[test]
    fn larger_cutoff_and_sigma_shrink_the_error() {
        let a = tsang_meansquare(1.0, 200.0, 10.0, 0.02).unwrap();
        let b = tsang_meansquare(1.0, 200.0, 100.0, 0.02).unwrap();
        assert!(b < a, "{b} !< {a}");
        let c = tsang_meansquare(0.7, 200.0, 100.0, 0.02).unwrap();
        assert!(b < c, "{b} !< {c}");
    }

    #[test]
    fn tsang_rejects_bad_input() {
        assert!(tsang_meansquare(0.5, 100.0, 10.0, 0.01).is_err());
        assert!(matches!(
            tsang_meansquare(0.8, 100.0, 1000.0, 0.1),
            Err(AnalysisError::Resolution { .. })
        ));
    }

    #[test]
    fn good_set_trivial_epsilons() {
        let mut c = config(0.8, 2.0, vec![1.0, 2.0], 200.0, 50.0, 1e3);
        let r = good_set_measure(&c).unwrap();
        assert_eq!(r.excluded_measure, 0.0);
        assert!((r.fraction - 1.0).abs() < 1e-12);
        assert_eq!(r.hit_intervals.len(), 1);
        c.epsilon = 0.0;
        let r = good_set_measure(&c).unwrap();
        assert_eq!(r.fraction, 0.0);
        assert!(r.hit_intervals.is_empty());
    }

    #[test]
    fn good_set_excludes_zero_windows() {
        // σ = 0.5001 passes within 1e-4 of the zeros at heights 14.13 and 21.02
        let mut c = config(0.5001, 1.0, vec![1.0], 12.0, 10.0, 0.5);
        c.grid_step = 1e-3;
        let zs = zero_proximity_scan(&c.s, &c.shifts, (12.0, 24.0), c.grid_step, ZERO_FLOOR).unwrap();
        assert_eq!(zs.tau_windows.len(), 2);
        let r = good_set_measure(&c).unwrap();
        for &(a, b) in &zs.tau_windows {
            assert!(r.excluded_windows.iter().any(|&(x, y)| x <= a && b <= y));
        }
        for &(a, b) in &r.hit_intervals {
            for &(x, y) in &r.excluded_windows {
                assert!(b.min(y) - a.max(x) <= 0.0);
            }
        }
        assert!((r.total_measure + r.excluded_measure - 12.0).abs() < 1e-9);
    }

    #[test]
    fn halving_the_grid_barely_moves_the_fraction() {
        let mut c = config(0.9, 2.0, vec![1.0, 2.0], 300.0, 50.0, 0.3);
        let coarse = good_set_measure(&c).unwrap();
        c.grid_step *= 0.5;
        let fine = good_set_measure(&c).unwrap();
        let boundaries = 2 * coarse.hit_intervals.len().max(fine.hit_intervals.len());
        let bound = 2.0 * boundaries as f64 * 2.0 * c.grid_step / c.t_base;
        assert!((coarse.fraction - fine.fraction).abs() < bound);
    }
}

//! Batched ζ and log ζ along vertical lines `σ + i·u`, `u` on an arithmetic grid.
//!
//! The grid is cut into fixed blocks of [`LINE_BLOCK`] nodes. Inside a block
//! the Euler–Maclaurin main sum is advanced by phase rotation,
//! `k^{-i(u+Δu)} = k^{-iu}·k^{-iΔu}`, and every block starts from a direct
//! evaluation. Blocks are independent, so results do not depend on how many
//! threads process them.

use super::{em_tail, log_zeta_with_floor, EvalPoint, ZetaError, ZetaParams, ZetaValue};
use crate::dirichlet::ShiftVector;
use crate::numeric::{wrap_angle, CompensatedSum, Progression};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

pub const LINE_BLOCK: usize = 1024;

/// Partial sums are folded into the compensated total every `CHUNK` terms.
const CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalLine {
    pub sigma: f64,
    pub im: Progression,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineLog {
    Value(Complex64),
    /// `|ζ|` fell below the floor (or continuation failed) at this node.
    NearZero(f64),
    /// Not evaluated (masked out by the caller).
    Skipped,
}

impl LineLog {
    pub fn value(&self) -> Option<Complex64> {
        match self {
            LineLog::Value(v) => Some(*v),
            _ => None,
        }
    }
}

/// ζ at every node of the line.
pub fn zeta_on_line(line: &VerticalLine) -> Vec<ZetaValue> {
    line.im
        .blocks(LINE_BLOCK)
        .into_par_iter()
        .map(|r| zeta_block(line.sigma, line.im.at(r.start), line.im.step, r.len()))
        .collect::<Vec<_>>()
        .concat()
}

/// log ζ at every node, on the horizontally continued branch.
///
/// `block_mask[b]` (when given) selects which blocks are evaluated.
/// Within a block the branch is carried vertically and re-anchored by
/// horizontal continuation at the first node and wherever the argument jumps
/// by π/2 or more between nodes.
pub fn log_zeta_on_line(
    line: &VerticalLine,
    floor: f64,
    block_mask: Option<&[bool]>,
) -> Vec<LineLog> {
    let blocks = line.im.blocks(LINE_BLOCK);
    blocks
        .into_par_iter()
        .enumerate()
        .map(|(b, r)| {
            if block_mask.is_some_and(|m| !m.get(b).copied().unwrap_or(false)) {
                return vec![LineLog::Skipped; r.len()];
            }
            let start = line.im.at(r.start);
            let zs = zeta_block(line.sigma, start, line.im.step, r.len());
            unwrap_block(line.sigma, start, line.im.step, &zs, floor)
        })
        .collect::<Vec<_>>()
        .concat()
}

fn unwrap_block(sigma: f64, start: f64, step: f64, zs: &[ZetaValue], floor: f64) -> Vec<LineLog> {
    let mut out = Vec::with_capacity(zs.len());
    let mut prev: Option<(Complex64, f64)> = None; // (ζ, continued arg)
    for (j, z) in zs.iter().enumerate() {
        let modulus = z.value.norm();
        if modulus < floor {
            out.push(LineLog::NearZero(modulus));
            prev = None;
            continue;
        }
        let carried = prev.and_then(|(pz, parg)| {
            let d = wrap_angle(z.value.arg() - pz.arg());
            (d.abs() < FRAC_PI_2).then_some(parg + d)
        });
        let arg = match carried {
            Some(a) => a,
            None => {
                let point = Complex64::new(sigma, start + j as f64 * step);
                match log_zeta_with_floor(point, floor, 1.0) {
                    Ok(v) => v.value.im,
                    Err(_) => {
                        out.push(LineLog::NearZero(modulus));
                        prev = None;
                        continue;
                    }
                }
            }
        };
        out.push(LineLog::Value(Complex64::new(modulus.ln(), arg)));
        prev = Some((z.value, arg));
    }
    out
}

/// ζ at `sigma + i(start + j·step)`, `j < len`, by rotated Euler–Maclaurin.
fn zeta_block(sigma: f64, start: f64, step: f64, len: usize) -> Vec<ZetaValue> {
    if len == 0 {
        return Vec::new();
    }
    let top = start.abs().max((start + (len - 1) as f64 * step).abs());
    let params = ZetaParams::auto(top);
    let n = params.n_terms;

    let terms = n - 1;
    let mut cur_re = Vec::with_capacity(terms);
    let mut cur_im = Vec::with_capacity(terms);
    let mut rot_re = Vec::with_capacity(terms);
    let mut rot_im = Vec::with_capacity(terms);
    for k in 1..n {
        let lk = (k as f64).ln();
        let c = Complex64::from_polar((-sigma * lk).exp(), -start * lk);
        let r = Complex64::from_polar(1.0, -step * lk);
        cur_re.push(c.re);
        cur_im.push(c.im);
        rot_re.push(r.re);
        rot_im.push(r.im);
    }

    let mut out = Vec::with_capacity(len);
    for j in 0..len {
        let mut total_re = CompensatedSum::new();
        let mut total_im = CompensatedSum::new();
        for ((cr, ci), (rr, ri)) in cur_re
            .chunks_mut(CHUNK)
            .zip(cur_im.chunks_mut(CHUNK))
            .zip(rot_re.chunks(CHUNK).zip(rot_im.chunks(CHUNK)))
        {
            let (sr, si) = sum_and_rotate(cr, ci, rr, ri);
            total_re.add(sr);
            total_im.add(si);
        }
        let s = Complex64::new(sigma, start + j as f64 * step);
        let (tail, error) = em_tail(s, n, params.n_corrections);
        total_re.add(tail.re);
        total_im.add(tail.im);
        out.push(ZetaValue {
            value: Complex64::new(total_re.value(), total_im.value()),
            error,
        });
    }
    out
}

/// Sum the current terms, then advance each by its rotation.
#[inline]
fn sum_and_rotate(cr: &mut [f64], ci: &mut [f64], rr: &[f64], ri: &[f64]) -> (f64, f64) {
    let mut acc_re = [0.0f64; 4];
    let mut acc_im = [0.0f64; 4];
    let n = cr.len();
    let mut i = 0;
    while i + 4 <= n {
        for l in 0..4 {
            let (a, b) = (cr[i + l], ci[i + l]);
            acc_re[l] += a;
            acc_im[l] += b;
            cr[i + l] = a * rr[i + l] - b * ri[i + l];
            ci[i + l] = a * ri[i + l] + b * rr[i + l];
        }
        i += 4;
    }
    while i < n {
        let (a, b) = (cr[i], ci[i]);
        acc_re[0] += a;
        acc_im[0] += b;
        cr[i] = a * rr[i] - b * ri[i];
        ci[i] = a * ri[i] + b * rr[i];
        i += 1;
    }
    (
        (acc_re[0] + acc_re[1]) + (acc_re[2] + acc_re[3]),
        (acc_im[0] + acc_im[1]) + (acc_im[2] + acc_im[3]),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroProximityReport {
    /// Disjoint, sorted `(τ_lo, τ_hi)` windows.
    pub tau_windows: Vec<(f64, f64)>,
    pub threshold: f64,
}

impl ZeroProximityReport {
    pub fn measure(&self) -> f64 {
        self.tau_windows.iter().map(|(a, b)| b - a).sum()
    }
}

/// Windows of `[lo, hi]` where `min_k |ζ(s + i d_k τ)| < floor` on the grid.
///
/// A flagged node `τ_j` contributes the window `[τ_{j-1}, τ_{j+1}]`, clipped to
/// the range; overlapping windows are merged.
pub fn zero_proximity_scan(
    s: &EvalPoint,
    shifts: &ShiftVector,
    tau_range: (f64, f64),
    grid_step: f64,
    floor: f64,
) -> Result<ZeroProximityReport, ZetaError> {
    if !(grid_step > 0.0) || !(floor > 0.0) {
        return Err(ZetaError::InvalidParameter(
            "grid_step and floor must be positive".into(),
        ));
    }
    let (lo, hi) = tau_range;
    let mut report = ZeroProximityReport {
        tau_windows: Vec::new(),
        threshold: floor,
    };
    if !(hi > lo) {
        return Ok(report);
    }
    let segments = ((hi - lo) / grid_step).ceil() as usize;
    let h = (hi - lo) / segments as f64;
    let nodes = Progression::new(lo, h, segments + 1);

    let mut flagged = vec![false; nodes.count];
    for &d in shifts.shifts() {
        let line = VerticalLine {
            sigma: s.sigma(),
            im: Progression::new(s.t() + d * lo, d * h, nodes.count),
        };
        for (f, z) in flagged.iter_mut().zip(zeta_on_line(&line)) {
            *f |= z.value.norm() < floor;
        }
    }
    for (j, _) in flagged.iter().enumerate().filter(|(_, &f)| f) {
        let a = nodes.at(j.saturating_sub(1));
        let b = if j + 1 < nodes.count { nodes.at(j + 1) } else { hi };
        match report.tau_windows.last_mut() {
            Some(last) if last.1 >= a => last.1 = b,
            _ => report.tau_windows.push((a, b)),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::{log_zeta, zeta};

    #[test]
    fn rotated_kernel_matches_pointwise() {
        let line = VerticalLine {
            sigma: 0.7,
            im: Progression::new(900.0, 0.37, 2100),
        };
        let vals = zeta_on_line(&line);
        for j in [0, 1, 500, 1023, 1024, 1025, 2099] {
            let direct = zeta(Complex64::new(0.7, line.im.at(j))).unwrap();
            assert!(
                (vals[j].value - direct.value).norm() < 1e-9,
                "node {j}: {} vs {}",
                vals[j].value,
                direct.value
            );
        }
    }

    #[test]
    fn line_log_matches_pointwise_branch() {
        let line = VerticalLine {
            sigma: 0.6,
            im: Progression::new(100.0, 0.05, 1500),
        };
        let logs = log_zeta_on_line(&line, 1e-8, None);
        for j in [0, 10, 700, 1024, 1499] {
            let direct = log_zeta(Complex64::new(0.6, line.im.at(j)), 1e-6).unwrap();
            let v = logs[j].value().unwrap();
            assert!((v - direct.value).norm() < 1e-8, "node {j}: {v} vs {}", direct.value);
        }
    }

    #[test]
    fn masked_blocks_are_skipped() {
        let line = VerticalLine {
            sigma: 0.8,
            im: Progression::new(10.0, 0.1, 2048),
        };
        let logs = log_zeta_on_line(&line, 1e-8, Some(&[false, true]));
        assert!(logs[..1024].iter().all(|l| matches!(l, LineLog::Skipped)));
        assert!(logs[1024..].iter().all(|l| l.value().is_some()));
    }

    #[test]
    fn zero_scan_edge_cases() {
        let s = EvalPoint::new(0.9, 1.0).unwrap();
        let shifts = ShiftVector::new(vec![1.0, 2.0]).unwrap();
        // no zeros with real part 0.9; the minimum modulus stays far above 1e-6
        let r = zero_proximity_scan(&s, &shifts, (1000.0, 1020.0), 0.01, 1e-6).unwrap();
        assert!(r.tau_windows.is_empty());
        let line = VerticalLine {
            sigma: 0.9,
            im: Progression::new(1001.0, 0.01, 2001),
        };
        let min = zeta_on_line(&line)
            .iter()
            .map(|z| z.value.norm())
            .fold(f64::INFINITY, f64::min);
        assert!(min > 1e-3);

        let empty = zero_proximity_scan(&s, &shifts, (500.0, 500.0), 0.01, 1e-6).unwrap();
        assert!(empty.tau_windows.is_empty());

        let all = zero_proximity_scan(&s, &shifts, (500.0, 510.0), 0.1, 1e12).unwrap();
        assert_eq!(all.tau_windows, vec![(500.0, 510.0)]);
    }

    #[test]
    fn zero_scan_finds_critical_line_zero() {
        // ζ(1/2 + i(14.134725…)): scanning σ just above 1/2 is outside EvalPoint,
        // so exercise the flagging logic through the line kernel directly.
        let line = VerticalLine {
            sigma: 0.5,
            im: Progression::new(14.0, 0.001, 300),
        };
        let vals = zeta_on_line(&line);
        let (j, m) = vals
            .iter()
            .map(|z| z.value.norm())
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (j, m)| if m < acc.1 { (j, m) } else { acc });
        assert!((line.im.at(j) - 14.134725).abs() < 1e-3 && m < 1e-3);
    }
}

//! Continuous branch of `log ζ` by horizontal continuation.
//!
//! The branch is fixed at real part 3, where the principal logarithm is used,
//! and continued leftwards at constant height. Steps are halved until
//! consecutive arguments differ by less than π/2.

use super::{zeta, ZetaError};
use crate::numeric::wrap_angle;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, TAU};

const START_RE: f64 = 3.0;
const INITIAL_STEP: f64 = 0.25;
const MIN_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogZetaValue {
    pub value: Complex64,
    /// Net number of 2π adjustments relative to the principal argument.
    pub winding: i64,
    /// Estimated absolute error of `value`.
    pub quality: f64,
}

/// `log ζ(point)` on the horizontally continued branch.
///
/// `tolerance` is both the floor for `|ζ|` along the path and the accepted
/// absolute error of the result.
pub fn log_zeta(point: Complex64, tolerance: f64) -> Result<LogZetaValue, ZetaError> {
    log_zeta_with_floor(point, tolerance, tolerance)
}

pub fn log_zeta_with_floor(
    point: Complex64,
    floor: f64,
    tolerance: f64,
) -> Result<LogZetaValue, ZetaError> {
    if !(tolerance > 0.0) || !(floor >= 0.0) {
        return Err(ZetaError::InvalidParameter(
            "tolerance must be positive and floor non-negative".into(),
        ));
    }
    if !(point.re > 0.0) {
        return Err(ZetaError::InvalidParameter(format!(
            "log ζ continuation needs Re s > 0, got {point}"
        )));
    }
    let im = point.im;
    let target = point.re;

    let mut re = START_RE.max(target);
    let start = zeta(Complex64::new(re, im))?;
    let mut prev = start.value;
    let mut arg = prev.arg();
    let mut err = start.error / prev.norm();

    let mut step = INITIAL_STEP;
    while re > target {
        let next_re = (re - step).max(target);
        let s = Complex64::new(next_re, im);
        let z = zeta(s)?;
        let modulus = z.value.norm();
        if modulus < floor {
            return Err(ZetaError::ZeroOnPath { point: s, modulus });
        }
        let delta = wrap_angle(z.value.arg() - prev.arg());
        if delta.abs() >= FRAC_PI_2 {
            step *= 0.5;
            if step < MIN_STEP {
                return Err(ZetaError::ZeroOnPath { point: s, modulus });
            }
            continue;
        }
        arg += delta;
        prev = z.value;
        err = z.error / modulus;
        re = next_re;
        step = (step * 2.0).min(INITIAL_STEP);
    }

    let modulus = prev.norm();
    let value = Complex64::new(modulus.ln(), arg);
    let winding = ((arg - prev.arg()) / TAU).round() as i64;
    let quality = err + 64.0 * f64::EPSILON * (1.0 + value.norm());
    if quality > tolerance {
        return Err(ZetaError::LogAccuracy { quality, tolerance });
    }
    Ok(LogZetaValue {
        value,
        winding,
        quality,
    })
}

//! Adaptive Simpson quadrature, used as an independent oracle for the
//! Carlson path and for arc-length checks. Not meant for hot loops.

use std::f64::consts::FRAC_PI_2;

use super::ellint::EllipticParam;
use crate::error::{Error, Result};

/// Default absolute tolerance of [`oracle_e`].
pub const ORACLE_TOL: f64 = 1e-12;

const MAX_DEPTH: u32 = 48;

struct Panel {
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_mid: f64,
    f_hi: f64,
    whole: f64,
}

fn simpson(lo: f64, hi: f64, f_lo: f64, f_mid: f64, f_hi: f64) -> f64 {
    (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
}

fn refine<F: Fn(f64) -> f64>(f: &F, p: Panel, tol: f64, depth: u32) -> Result<f64> {
    let mid = 0.5 * (p.lo + p.hi);
    let lm = 0.5 * (p.lo + mid);
    let rm = 0.5 * (mid + p.hi);
    let f_lm = f(lm);
    let f_rm = f(rm);
    let left = simpson(p.lo, mid, p.f_lo, f_lm, p.f_mid);
    let right = simpson(mid, p.hi, p.f_mid, f_rm, p.f_hi);
    let delta = left + right - p.whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature {
            lo: p.lo,
            hi: p.hi,
            err: delta.abs() / 15.0,
        });
    }
    let l = refine(
        f,
        Panel {
            lo: p.lo,
            hi: mid,
            f_lo: p.f_lo,
            f_mid: f_lm,
            f_hi: p.f_mid,
            whole: left,
        },
        0.5 * tol,
        depth - 1,
    )?;
    let r = refine(
        f,
        Panel {
            lo: mid,
            hi: p.hi,
            f_lo: p.f_mid,
            f_mid: f_rm,
            f_hi: p.f_hi,
            whole: right,
        },
        0.5 * tol,
        depth - 1,
    )?;
    Ok(l + r)
}

/// ∫ f over [lo, hi] to absolute tolerance `tol` (Richardson-corrected
/// adaptive Simpson). Reversed limits give the negated integral.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if lo == hi {
        return Ok(0.0);
    }
    if hi < lo {
        return adaptive_simpson(f, hi, lo, tol).map(|v| -v);
    }
    let mid = 0.5 * (lo + hi);
    let (f_lo, f_mid, f_hi) = (f(lo), f(mid), f(hi));
    let whole = simpson(lo, hi, f_lo, f_mid, f_hi);
    refine(
        &f,
        Panel {
            lo,
            hi,
            f_lo,
            f_mid,
            f_hi,
            whole,
        },
        tol,
        MAX_DEPTH,
    )
}

/// E(u | m) by direct quadrature of √(1 − m sin²t) over [0, u].
///
/// The range is cut at multiples of π/2 so every panel has a smooth
/// integrand, including the |cos t| kinks at m = 1.
pub fn oracle_e(u: f64, m: EllipticParam) -> Result<f64> {
    if !u.is_finite() {
        return Err(Error::domain(
            "oracle_e",
            format!("amplitude must be finite, got {u}"),
        ));
    }
    let m = m.value();
    let integrand = |t: f64| {
        let s = t.sin();
        (1.0 - m * s * s).max(0.0).sqrt()
    };
    let mag = u.abs();
    let pieces = (mag / FRAC_PI_2).ceil().max(1.0) as usize;
    let tol = ORACLE_TOL / pieces as f64;
    let mut total = 0.0;
    for i in 0..pieces {
        let lo = i as f64 * FRAC_PI_2;
        let hi = (lo + FRAC_PI_2).min(mag);
        total += adaptive_simpson(integrand, lo, hi, tol)?;
    }
    Ok(if u < 0.0 { -total } else { total })
}

//! Carlson symmetric elliptic integrals R_F and R_D.
//!
//! Both are evaluated with the duplication theorem followed by a
//! fifth-order Taylor expansion about the mean of the arguments
//! (B. C. Carlson, "Numerical computation of real or complex elliptic
//! integrals", Numer. Algorithms 10, 1995). The stopping rule bounds the
//! relative truncation error by [`DUPLICATION_TOL`].

use crate::error::{Error, Result};

/// Relative truncation tolerance of the duplication loop.
pub const DUPLICATION_TOL: f64 = 1e-12;

const MAX_ITER: usize = 64;

fn check_arg(func: &'static str, name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::domain(
            func,
            format!("{name} must be finite and non-negative, got {v}"),
        ));
    }
    Ok(())
}

/// R_F(x, y, z) = ½ ∫₀^∞ [(t+x)(t+y)(t+z)]^(-½) dt.
///
/// At most one argument may be zero.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> Result<f64> {
    check_arg("carlson_rf", "x", x)?;
    check_arg("carlson_rf", "y", y)?;
    check_arg("carlson_rf", "z", z)?;
    let zeros = [x, y, z].iter().filter(|&&v| v == 0.0).count();
    if zeros > 1 {
        return Err(Error::domain(
            "carlson_rf",
            format!("at most one argument may be zero, got ({x}, {y}, {z})"),
        ));
    }
    Ok(rf_unchecked(x, y, z))
}

pub(crate) fn rf_unchecked(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    let a0 = (x + y + z) / 3.0;
    let mut a = a0;
    let mut q = (3.0 * DUPLICATION_TOL).powf(-1.0 / 6.0)
        * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs());

    for _ in 0..MAX_ITER {
        if q < a.abs() {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sx * sz + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        a = 0.25 * (a + lambda);
        q *= 0.25;
    }

    let dx = 1.0 - x / a;
    let dy = 1.0 - y / a;
    let dz = -dx - dy;
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / a.sqrt()
}

/// R_D(x, y, z) = (3/2) ∫₀^∞ [(t+x)(t+y)]^(-½) (t+z)^(-3/2) dt.
///
/// Requires z > 0 and at most one of x, y zero.
pub fn carlson_rd(x: f64, y: f64, z: f64) -> Result<f64> {
    check_arg("carlson_rd", "x", x)?;
    check_arg("carlson_rd", "y", y)?;
    check_arg("carlson_rd", "z", z)?;
    if z == 0.0 {
        return Err(Error::domain("carlson_rd", "z must be positive"));
    }
    if x == 0.0 && y == 0.0 {
        return Err(Error::domain(
            "carlson_rd",
            "x and y must not both be zero",
        ));
    }
    Ok(rd_unchecked(x, y, z))
}

pub(crate) fn rd_unchecked(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    let a0 = (x + y + 3.0 * z) / 5.0;
    let mut a = a0;
    let mut q = (0.25 * DUPLICATION_TOL).powf(-1.0 / 6.0)
        * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs());
    let mut sum = 0.0;
    let mut fac = 1.0;

    for _ in 0..MAX_ITER {
        if q < a.abs() {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sx * sz + sy * sz;
        sum += fac / (sz * (z + lambda));
        fac *= 0.25;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        a = 0.25 * (a + lambda);
        q *= 0.25;
    }

    let dx = (a - x) / a;
    let dy = (a - y) / a;
    let dz = -(dx + dy) / 3.0;
    let xy = dx * dy;
    let z2 = dz * dz;
    let e2 = xy - 6.0 * z2;
    let e3 = (3.0 * xy - 8.0 * z2) * dz;
    let e4 = 3.0 * (xy - z2) * z2;
    let e5 = xy * z2 * dz;
    let series = 1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0
        - 3.0 * e4 / 22.0
        - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0;
    fac * series / (a * a.sqrt()) + 3.0 * sum
}

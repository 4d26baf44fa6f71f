//! Elliptic integral of the second kind in the parameter convention
//! E(u | m) = ∫₀ᵘ √(1 − m sin²t) dt, valid for any m ≤ 1 (negative m included).

use std::f64::consts::{FRAC_PI_2, PI};

use super::carlson::{rd_unchecked, rf_unchecked};
use crate::error::{Error, Result};

/// Parameter m of E(u | m). Construction enforces m ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticParam(f64);

impl EllipticParam {
    pub fn new(m: f64) -> Result<Self> {
        if !m.is_finite() || m > 1.0 {
            return Err(Error::domain(
                "EllipticParam",
                format!("parameter must be finite and <= 1, got {m}"),
            ));
        }
        Ok(EllipticParam(m))
    }

    /// m = 1 − (a/b)², the parameter used for arc length on an ellipse
    /// with semi-axes a (along x) and b (along y).
    pub fn from_axes(a: f64, b: f64) -> Result<Self> {
        let ratio = a / b;
        Self::new(1.0 - ratio * ratio)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for EllipticParam {
    type Error = Error;

    fn try_from(m: f64) -> Result<Self> {
        Self::new(m)
    }
}

/// E(π/2 | m).
pub fn ellint_e_complete(m: EllipticParam) -> f64 {
    let m = m.0;
    if m == 1.0 {
        return 1.0;
    }
    let y = 1.0 - m;
    rf_unchecked(0.0, y, 1.0) - m / 3.0 * rd_unchecked(0.0, y, 1.0)
}

/// E(φ | m) on the principal branch 0 ≤ φ ≤ π/2.
fn principal(phi: f64, m: f64) -> f64 {
    if phi == 0.0 {
        return 0.0;
    }
    if m == 1.0 {
        return phi.sin();
    }
    let (s, c) = phi.sin_cos();
    let c2 = c * c;
    let y = 1.0 - m * s * s;
    s * rf_unchecked(c2, y, 1.0) - m / 3.0 * s * s * s * rd_unchecked(c2, y, 1.0)
}

/// E(u | m) for any finite amplitude u.
///
/// |u| is reduced to [−π/2, π/2] with E(u + kπ) = E(u) + 2k·E(π/2); the
/// sign is applied last so the result is exactly odd in u.
pub fn ellint_e_incomplete(u: f64, m: EllipticParam) -> Result<f64> {
    if !u.is_finite() {
        return Err(Error::domain(
            "ellint_e_incomplete",
            format!("amplitude must be finite, got {u}"),
        ));
    }
    Ok(e_incomplete_unchecked(u, m))
}

pub(crate) fn e_incomplete_unchecked(u: f64, m: EllipticParam) -> f64 {
    let mag = u.abs();
    let value = if mag <= FRAC_PI_2 {
        principal(mag, m.0)
    } else {
        let k = (mag / PI).round();
        let r = mag - k * PI;
        let rem = if r < 0.0 {
            -principal(-r, m.0)
        } else {
            principal(r, m.0)
        };
        2.0 * k * ellint_e_complete(m) + rem
    };
    if u.is_sign_negative() {
        -value
    } else {
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(m: f64) -> EllipticParam {
        EllipticParam::new(m).unwrap()
    }

    #[test]
    fn trivial_values() {
        assert!((ellint_e_incomplete(0.7, p(0.0)).unwrap() - 0.7).abs() < 1e-15);
        assert!((ellint_e_incomplete(FRAC_PI_2, p(1.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!((ellint_e_complete(p(0.0)) - FRAC_PI_2).abs() < 1e-14);
        assert_eq!(ellint_e_complete(p(1.0)), 1.0);
    }

    #[test]
    fn negative_parameter_quarter_perimeter() {
        // mpmath: ellipe(pi/2, -3)
        let want = 2.422_112_055_136_919;
        assert!((ellint_e_incomplete(FRAC_PI_2, p(-3.0)).unwrap() - want).abs() < 1e-12);
        assert!((ellint_e_complete(p(-3.0)) - want).abs() < 1e-12);
    }

    #[test]
    fn reference_values() {
        // mpmath.ellipe(u, m) at 30 digits.
        let cases = [
            (0.5, 0.3, 0.493_991_144_728_968_43),
            (1.2, -0.5625, 1.312_855_666_659_113_8),
            (2.5, 0.9, 1.606_497_785_618_779_1),
            (-3.0, -5.0, -5.516_481_744_192_461_9),
            (10.0, 0.5, 8.663_886_106_525_742_3),
        ];
        for (u, m, want) in cases {
            let got = ellint_e_incomplete(u, p(m)).unwrap();
            assert!((got - want).abs() < 1e-12, "E({u}|{m}) = {got}, want {want}");
        }
    }

    #[test]
    fn odd_symmetry_is_exact() {
        for &u in &[0.1, 0.5, 1.7, 3.0, 7.5] {
            for &m in &[-3.0, 0.3, 0.9] {
                let pos = ellint_e_incomplete(u, p(m)).unwrap();
                let neg = ellint_e_incomplete(-u, p(m)).unwrap();
                assert_eq!(neg, -pos);
            }
        }
    }

    #[test]
    fn unit_parameter_beyond_quarter_period() {
        // ∫₀ᵘ |cos t| dt
        let got = ellint_e_incomplete(2.0, p(1.0)).unwrap();
        assert!((got - (2.0 - 2.0f64.sin())).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(EllipticParam::new(1.5).is_err());
        assert!(EllipticParam::new(f64::NAN).is_err());
        assert!(ellint_e_incomplete(f64::INFINITY, p(0.0)).is_err());
    }
}

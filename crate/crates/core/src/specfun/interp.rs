//! Tabulated arc length σ(t) over one period of the curve parameter.
//!
//! Each grid cell carries a quintic Hermite polynomial built from the
//! exact σ, σ′ = |dρ/dt| and σ″ at its two end nodes, so the only inputs
//! taken from the Carlson path are the node values themselves. The error
//! bound is certified at construction by a dense sweep against direct
//! evaluation.

use std::f64::consts::PI;

use crate::curve::{self, CurveSpec};
use crate::error::{Error, Result};

/// Certification bound on |interpolated σ − direct σ|, in curve length units.
pub const MAX_INTERP_ERROR: f64 = 1e-9;

/// Smallest accepted number of grid cells.
pub const MIN_GRID: usize = 64;

/// Certification sweep density relative to the grid.
pub const CERT_OVERSAMPLE: usize = 16;

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone)]
pub struct SigmaInterpolant {
    h: f64,
    inv_h: f64,
    knots: Vec<f64>,
    values: Vec<f64>,
    cells: Vec<[f64; 6]>,
    period_length: f64,
    max_abs_error: f64,
}

impl SigmaInterpolant {
    /// Tabulates σ on `grid_size` uniform cells over [−π, π] and certifies
    /// the result.
    pub fn build(curve: &CurveSpec, grid_size: usize) -> Result<Self> {
        let mut interp = Self::build_uncertified(curve, grid_size)?;
        let max_abs_error = interp.measure_error(curve, CERT_OVERSAMPLE * grid_size);
        interp.max_abs_error = max_abs_error;
        if !(max_abs_error <= MAX_INTERP_ERROR) {
            return Err(Error::Certification {
                max_error: max_abs_error,
                bound: MAX_INTERP_ERROR,
            });
        }
        Ok(interp)
    }

    fn build_uncertified(curve: &CurveSpec, grid_size: usize) -> Result<Self> {
        if grid_size < MIN_GRID {
            return Err(Error::domain(
                "build_sigma_interpolant",
                format!("grid_size must be >= {MIN_GRID}, got {grid_size}"),
            ));
        }
        let h = TWO_PI / grid_size as f64;
        let knots: Vec<f64> = (0..=grid_size).map(|i| -PI + h * i as f64).collect();
        let values: Vec<f64> = knots.iter().map(|&t| curve::arc_length_at(curve, t)).collect();
        let slopes: Vec<f64> = knots.iter().map(|&t| curve::speed_at(curve, t)).collect();
        let bends: Vec<f64> = knots.iter().map(|&t| curve::speed_rate_at(curve, t)).collect();

        if let Some(i) = values.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::domain(
                "build_sigma_interpolant",
                format!("tabulated arc length not increasing at node {i}"),
            ));
        }

        let cells = (0..grid_size)
            .map(|i| {
                let (p0, p1) = (values[i], values[i + 1]);
                let (d0, d1) = (h * slopes[i], h * slopes[i + 1]);
                let (a0, a1) = (h * h * bends[i], h * h * bends[i + 1]);
                let dp = p1 - p0;
                [
                    p0,
                    d0,
                    0.5 * a0,
                    10.0 * dp - 6.0 * d0 - 4.0 * d1 - 1.5 * a0 + 0.5 * a1,
                    -15.0 * dp + 8.0 * d0 + 7.0 * d1 + 1.5 * a0 - a1,
                    6.0 * dp - 3.0 * d0 - 3.0 * d1 - 0.5 * a0 + 0.5 * a1,
                ]
            })
            .collect();

        let period_length = values[grid_size] - values[0];
        Ok(SigmaInterpolant {
            h,
            inv_h: 1.0 / h,
            knots,
            values,
            cells,
            period_length,
            max_abs_error: f64::NAN,
        })
    }

    fn measure_error(&self, curve: &CurveSpec, samples: usize) -> f64 {
        // Offset keeps the sweep off the nodes, where the error is zero.
        let step = TWO_PI / samples as f64;
        (0..samples)
            .map(|j| {
                let t = -PI + step * (j as f64 + 0.381_966);
                (self.eval(t) - curve::arc_length_at(curve, t)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Interpolated σ(t). Arguments outside [−π, π] are mapped back using
    /// σ(t + 2π) = σ(t) + Γ.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let mut x = t + PI;
        let mut shift = 0.0;
        if !(0.0..=TWO_PI).contains(&x) {
            let laps = (x / TWO_PI).floor();
            x -= laps * TWO_PI;
            shift = laps * self.period_length;
        }
        let pos = x * self.inv_h;
        let i = (pos as usize).min(self.cells.len() - 1);
        let s = pos - i as f64;
        let c = &self.cells[i];
        shift + c[0] + s * (c[1] + s * (c[2] + s * (c[3] + s * (c[4] + s * c[5]))))
    }

    pub fn grid_size(&self) -> usize {
        self.cells.len()
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Curve parameter at each node, from −π to π.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Direct arc length at each node.
    pub fn sigma_values(&self) -> &[f64] {
        &self.values
    }

    /// Certified max |interpolated − direct| from the construction sweep.
    pub fn max_abs_error(&self) -> f64 {
        self.max_abs_error
    }

    /// Arc length of one full period (the curve perimeter).
    pub fn period_length(&self) -> f64 {
        self.period_length
    }
}

/// See [`SigmaInterpolant::build`].
pub fn build_sigma_interpolant(curve: &CurveSpec, grid_size: usize) -> Result<SigmaInterpolant> {
    SigmaInterpolant::build(curve, grid_size)
}

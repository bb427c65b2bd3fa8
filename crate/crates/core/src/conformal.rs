//! The strip `-2πa/(1+a²) < Re z < 0` and its biholomorphic image, the
//! exterior of the spiral `Σ`, under `f(z) = e^{(1-ai)z}`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SheetError};
use crate::geometry::{check_tightness, winding_number_checked, PolarPoint, ON_SHEET_REL_TOL};

/// Width and period vector of the strip for a given tightness `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripGeometry {
    pub a: f64,
    /// `2πa/(1+a²)`
    pub width: f64,
    /// `-2πa/(1+a²) + 2πi/(1+a²)`; `f(z + period_shift) = f(z)` on the right edge.
    pub period_shift: Complex64,
}

impl StripGeometry {
    pub fn new(a: f64) -> Result<Self> {
        check_tightness(a)?;
        let s = 1.0 + a * a;
        Ok(Self {
            a,
            width: TAU * a / s,
            period_shift: Complex64::new(-TAU * a / s, TAU / s),
        })
    }

    /// Vertical shift `2π/(1+a²)` applied by the reflection-shift maps.
    pub fn vertical_period(&self) -> f64 {
        self.period_shift.im
    }

    /// Real part of the symmetry axis, `-πa/(1+a²)`.
    pub fn axis(&self) -> f64 {
        -PI * self.a / (1.0 + self.a * self.a)
    }

    /// Abscissa `-aθ_m/(1+a²)` of the line mapped onto the spiral with base angle `θ_m`.
    pub fn line_position(&self, theta_m: f64) -> f64 {
        -self.a * theta_m / (1.0 + self.a * self.a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripPoint {
    pub x: f64,
    pub y: f64,
}

impl StripPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self { x: z.re, y: z.im }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

/// Classification of a point relative to the strip and its interior lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StripRegion {
    Interior,
    /// `Re z = -2πa/(1+a²)`, the line `ℓ_M`.
    LeftBoundary,
    /// `Re z = 0`, the line `ℓ_0`.
    RightBoundary,
    Outside,
    /// On the interior line `ℓ_m`, `1 ≤ m ≤ M-1`.
    OnLine(usize),
}

/// Tolerance in `x` equivalent to the on-sheet tolerance of the winding number.
pub(crate) fn strip_tolerance(z: Complex64, a: f64) -> f64 {
    let ln_r = z.re + a * z.im;
    let phase = z.im - a * z.re;
    ON_SHEET_REL_TOL * (1.0 + ln_r.abs() + a * phase.abs()) / (1.0 + a * a)
}

/// Classifies `z` against the strip boundary and the lines `ℓ_1 … ℓ_{M-1}`
/// induced by the base angles `thetas` (pass `&[0.0]` for a single spiral).
pub fn strip_membership(z: Complex64, a: f64, thetas: &[f64]) -> StripRegion {
    let Ok(geom) = StripGeometry::new(a) else {
        return StripRegion::Outside;
    };
    let tol = strip_tolerance(z, a);
    let x = z.re;
    if (x - 0.0).abs() <= tol {
        return StripRegion::RightBoundary;
    }
    if (x + geom.width).abs() <= tol {
        return StripRegion::LeftBoundary;
    }
    if x > 0.0 || x < -geom.width || !z.im.is_finite() {
        return StripRegion::Outside;
    }
    for (m, &theta_m) in thetas.iter().enumerate().skip(1) {
        if (x - geom.line_position(theta_m)).abs() <= tol {
            return StripRegion::OnLine(m);
        }
    }
    StripRegion::Interior
}

/// `f(z) = e^{(1-ai)z} = e^{x+ay} e^{i(y-ax)}`. Boundary points land on `Σ`.
pub fn map_to_exterior(z: Complex64, a: f64) -> Complex64 {
    Complex64::from_polar((z.re + a * z.im).exp(), z.im - a * z.re)
}

/// Inverse map. Always returns an interior point of the strip.
pub fn map_to_strip(z: PolarPoint, a: f64) -> Result<StripPoint> {
    let j = winding_number_checked(z.r, z.theta, a)?;
    let ln_r = z.r.ln();
    let phase = z.theta - TAU * (j - 1) as f64;
    let s = 1.0 + a * a;
    Ok(StripPoint {
        x: (ln_r - a * phase) / s,
        y: (phase + a * ln_r) / s,
    })
}

/// Convenience wrapper taking a Cartesian point.
pub fn map_complex_to_strip(z: Complex64, a: f64) -> Result<StripPoint> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(SheetError::Origin);
    }
    map_to_strip(PolarPoint::from_complex(z), a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftSign {
    Plus,
    Minus,
}

/// `P_±(z) = -z* - 2πa/(1+a²) ± 2πi/(1+a²)`: reflection about the strip axis
/// followed by a vertical shift. Maps interior points to interior points.
pub fn reflect_shift(z: StripPoint, a: f64, sign: ShiftSign) -> StripPoint {
    let s = 1.0 + a * a;
    let shift = match sign {
        ShiftSign::Plus => TAU / s,
        ShiftSign::Minus => -TAU / s,
    };
    StripPoint {
        x: -z.x - TAU * a / s,
        y: z.y + shift,
    }
}

/// `P_-^k(z)` in closed form: a pure translation by `-2πki/(1+a²)` for even
/// `k`, one extra reflection for odd `k`.
pub fn reflect_shift_iter(z: StripPoint, a: f64, k: usize) -> StripPoint {
    let s = 1.0 + a * a;
    let y = z.y - TAU * k as f64 / s;
    let x = if k.is_multiple_of(2) { z.x } else { -z.x - TAU * a / s };
    StripPoint { x, y }
}

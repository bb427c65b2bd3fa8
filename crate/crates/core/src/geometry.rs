//! Spiral curves, circulation, sheet density and winding numbers.
//!
//! A spiral of the family is `Z_m(θ, t) = t^μ e^{a(θ-θ_m)} e^{iθ}` with
//! circulation `Γ_m(θ, t) = g_m t^{2μ-1} e^{2a(θ-θ_m)}`. Angles are kept as
//! unbounded reals throughout: every exported field is built from the
//! combination `θ - 2πJ(r, θ)`, which does not depend on the chosen
//! representative.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SheetError};

/// Relative tolerance of the on-sheet test performed by the winding number.
pub const ON_SHEET_REL_TOL: f64 = 1e-12;

/// Relative normal distance (distance / radius) below which field evaluations
/// refuse to return a value.
pub const FIELD_EXCLUSION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpiralParams {
    /// Spiral tightness, `a > 0`.
    pub a: f64,
    /// Self-similarity exponent.
    pub mu: f64,
    /// Circulation strength.
    pub g: f64,
    /// Base angle of the spiral, 0 for a single spiral.
    pub theta0: f64,
}

impl SpiralParams {
    pub fn new(a: f64, mu: f64, g: f64) -> Result<Self> {
        check_tightness(a)?;
        if !mu.is_finite() || !g.is_finite() {
            return Err(SheetError::InvalidParameter(format!(
                "mu and g must be finite (mu = {mu}, g = {g})"
            )));
        }
        Ok(Self {
            a,
            mu,
            g,
            theta0: 0.0,
        })
    }

    pub fn with_theta0(mut self, theta0: f64) -> Self {
        self.theta0 = theta0;
        self
    }
}

/// `M ≥ 1` concentric spirals sharing `a` and `μ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpiralFamily {
    pub a: f64,
    pub mu: f64,
    thetas: Vec<f64>,
    gs: Vec<f64>,
}

impl SpiralFamily {
    /// Builds a family; `thetas` must start at 0, increase strictly and stay below 2π.
    pub fn new(a: f64, mu: f64, thetas: Vec<f64>, gs: Vec<f64>) -> Result<Self> {
        check_tightness(a)?;
        check_angles(&thetas)?;
        if thetas.len() != gs.len() {
            return Err(SheetError::InvalidParameter(format!(
                "{} angles but {} strengths",
                thetas.len(),
                gs.len()
            )));
        }
        if !mu.is_finite() || gs.iter().any(|g| !g.is_finite()) {
            return Err(SheetError::InvalidParameter(
                "mu and strengths must be finite".into(),
            ));
        }
        Ok(Self { a, mu, thetas, gs })
    }

    /// The single spiral `θ₀ = 0` seen as a one-member family.
    pub fn single(p: &SpiralParams) -> Self {
        Self {
            a: p.a,
            mu: p.mu,
            thetas: vec![0.0],
            gs: vec![p.g],
        }
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn gs(&self) -> &[f64] {
        &self.gs
    }

    /// Parameters of the `m`-th spiral viewed in isolation.
    pub fn member(&self, m: usize) -> SpiralParams {
        SpiralParams {
            a: self.a,
            mu: self.mu,
            g: self.gs[m],
            theta0: self.thetas[m],
        }
    }
}

/// Equally spaced base angles `2πm/M`.
pub fn uniform_angles(count: usize) -> Vec<f64> {
    (0..count).map(|m| TAU * m as f64 / count as f64).collect()
}

pub(crate) fn check_tightness(a: f64) -> Result<()> {
    if a.is_finite() && a > 0.0 {
        Ok(())
    } else {
        Err(SheetError::InvalidParameter(format!(
            "spiral tightness must be positive and finite, got a = {a}"
        )))
    }
}

pub(crate) fn check_angles(thetas: &[f64]) -> Result<()> {
    if thetas.is_empty() {
        return Err(SheetError::InvalidParameter(
            "a family needs at least one spiral".into(),
        ));
    }
    if thetas[0] != 0.0 {
        return Err(SheetError::InvalidParameter(format!(
            "first base angle must be 0, got {}",
            thetas[0]
        )));
    }
    if thetas.windows(2).any(|w| !(w[1] > w[0])) || thetas.iter().any(|t| !(*t < TAU)) {
        return Err(SheetError::InvalidParameter(
            "base angles must increase strictly within [0, 2pi)".into(),
        ));
    }
    Ok(())
}

/// A point of the punctured plane with an explicit (unbounded) angle representative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Self {
        Self { r, theta }
    }

    /// Principal-argument representative of `z`.
    pub fn from_complex(z: Complex64) -> Self {
        Self {
            r: z.norm(),
            theta: z.arg(),
        }
    }

    /// Representative of `z` whose angle lies within π of `hint`.
    pub fn from_complex_near(z: Complex64, hint: f64) -> Self {
        let rotated = z * Complex64::from_polar(1.0, -hint);
        Self {
            r: z.norm(),
            theta: hint + rotated.arg(),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }

    /// Same point, angle shifted by `turns` full turns.
    pub fn shifted(self, turns: i64) -> Self {
        Self {
            r: self.r,
            theta: self.theta + TAU * turns as f64,
        }
    }
}

/// Index of the spiral turn separating a point from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WindingNumber(pub i64);

/// `t^μ e^{a(θ-θ₀)} e^{iθ}`.
pub fn spiral_point(theta: f64, t: f64, p: &SpiralParams) -> Complex64 {
    Complex64::from_polar(t.powf(p.mu) * (p.a * (theta - p.theta0)).exp(), theta)
}

/// Unit tangent `(a+i)e^{iθ}/√(1+a²)` and unit normal `(1-ia)e^{iθ}/√(1+a²) = -iτ`.
pub fn tangent_normal(theta: f64, a: f64) -> (Complex64, Complex64) {
    let rot = Complex64::from_polar(1.0 / (1.0 + a * a).sqrt(), theta);
    (Complex64::new(a, 1.0) * rot, Complex64::new(1.0, -a) * rot)
}

/// Circulation `g t^{2μ-1} e^{2a(θ-θ₀)}` accumulated along the sheet.
pub fn circulation(theta: f64, t: f64, p: &SpiralParams) -> f64 {
    p.g * t.powf(2.0 * p.mu - 1.0) * (2.0 * p.a * (theta - p.theta0)).exp()
}

/// Vortex-sheet density `∂_θΓ / |∂_θZ| = 2ag t^{μ-1} e^{a(θ-θ₀)} / √(1+a²)`.
pub fn sheet_density(theta: f64, t: f64, p: &SpiralParams) -> f64 {
    2.0 * p.a * p.g * t.powf(p.mu - 1.0) * (p.a * (theta - p.theta0)).exp()
        / (1.0 + p.a * p.a).sqrt()
}

/// Euclidean dot product of two plane vectors stored as complex numbers.
pub fn dot(u: Complex64, v: Complex64) -> f64 {
    u.re * v.re + u.im * v.im
}

#[inline]
fn sheet_expression(j: i64, shifted: f64, ln_r: f64, a: f64) -> f64 {
    a * (TAU * j as f64 - shifted) + ln_r
}

/// Minimal `j` with `a(2πj - (θ-θ_k)) + ln r > 0`, together with the signed
/// value of the defining expression at the nearest root candidate.
fn winding_core(r: f64, theta: f64, a: f64, theta_k: f64) -> Result<(i64, f64)> {
    check_tightness(a)?;
    if r == 0.0 {
        return Err(SheetError::Origin);
    }
    if !(r > 0.0) || !r.is_finite() || !theta.is_finite() {
        return Err(SheetError::InvalidParameter(format!(
            "polar point must have finite r > 0 and finite angle (r = {r}, theta = {theta})"
        )));
    }
    let ln_r = r.ln();
    let shifted = theta - theta_k;
    let mut j = ((shifted - ln_r / a) / TAU).floor() as i64 + 1;
    // floor() may land one off near an exact tie; settle on the defining inequality.
    while sheet_expression(j, shifted, ln_r, a) <= 0.0 {
        j += 1;
    }
    while sheet_expression(j - 1, shifted, ln_r, a) > 0.0 {
        j -= 1;
    }
    let above = sheet_expression(j, shifted, ln_r, a);
    let below = sheet_expression(j - 1, shifted, ln_r, a);
    let nearest = if above.abs() < below.abs() { above } else { below };
    Ok((j, nearest))
}

fn on_sheet_tolerance(r: f64, theta: f64, a: f64) -> f64 {
    ON_SHEET_REL_TOL * (1.0 + r.ln().abs() + a * theta.abs())
}

/// Winding number `J(r, θ) = min{ j : a(2πj - θ) + ln r > 0 }`.
///
/// The definition is evaluated exactly, so a point on the sheet gets the
/// index of the turn just outside it. Use [`winding_number_checked`] to
/// reject such points instead.
pub fn winding_number(r: f64, theta: f64, a: f64) -> Result<i64> {
    winding_number_offset(r, theta, a, 0.0)
}

/// Offset winding number `J(r, θ, k) = min{ j : a(2πj + θ_k - θ) + ln r > 0 }`.
pub fn winding_number_offset(r: f64, theta: f64, a: f64, theta_k: f64) -> Result<i64> {
    winding_core(r, theta, a, theta_k).map(|(j, _)| j)
}

/// [`winding_number`] that raises `OnSpiral` when the defining expression
/// vanishes to within `1e-12 (1 + |ln r| + a|θ|)`.
pub fn winding_number_checked(r: f64, theta: f64, a: f64) -> Result<i64> {
    winding_number_offset_checked(r, theta, a, 0.0)
}

/// [`winding_number_offset`] with the on-sheet rejection of [`winding_number_checked`].
pub fn winding_number_offset_checked(r: f64, theta: f64, a: f64, theta_k: f64) -> Result<i64> {
    let (j, nearest) = winding_core(r, theta, a, theta_k)?;
    if nearest.abs() < on_sheet_tolerance(r, theta - theta_k, a) {
        return Err(SheetError::OnSpiral { spiral: 0 });
    }
    Ok(j)
}

/// Distance from `re^{iθ}` to the nearest turn of the spiral with base angle
/// `theta_k`, relative to `r` and to first order in the offset.
pub fn relative_sheet_distance(r: f64, theta: f64, a: f64, theta_k: f64) -> Result<f64> {
    let (_, nearest) = winding_core(r, theta, a, theta_k)?;
    Ok(nearest.abs() / (1.0 + a * a).sqrt())
}

/// Rejects points inside the field-evaluation exclusion zone of any spiral.
pub(crate) fn ensure_off_sheets(z: PolarPoint, a: f64, thetas: &[f64]) -> Result<()> {
    for (m, &theta_m) in thetas.iter().enumerate() {
        if relative_sheet_distance(z.r, z.theta, a, theta_m)? < FIELD_EXCLUSION {
            return Err(SheetError::OnSpiral { spiral: m });
        }
    }
    Ok(())
}

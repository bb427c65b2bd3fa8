//! Closed-form velocity, potential, strip-frame solution and parameter
//! matching for a single spiral.
//!
//! Throughout, `A = -2ai/(a+i)`, so that `Re A = -2a/(1+a²)` and
//! `Im A = -2a²/(1+a²)`. Writing `α = 4πa/(1+a²) = -2π Re A` and
//! `β = 4πa²/(1+a²) = -2π Im A` keeps the strip formulas readable.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conformal::{map_to_exterior, StripPoint};
use crate::error::{Result, SheetError};
use crate::geometry::{
    check_tightness, ensure_off_sheets, winding_number_offset_checked, PolarPoint, SpiralParams,
};

/// `|sin β|` below this value is treated as resonant.
pub const RESONANCE_TOL: f64 = 1e-10;

/// Relative determinant threshold of the 2×2 matching system.
pub const SINGULAR_TOL: f64 = 1e-12;

/// The constant `A = -2ai/(a+i)` with its rationalized components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConstant {
    pub a: f64,
    pub value: Complex64,
}

impl SpectralConstant {
    pub fn new(a: f64) -> Self {
        let s = 1.0 + a * a;
        Self {
            a,
            value: Complex64::new(-2.0 * a / s, -2.0 * a * a / s),
        }
    }

    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn im(&self) -> f64 {
        self.value.im
    }

    /// `α = 4πa/(1+a²)`.
    pub fn alpha(&self) -> f64 {
        -TAU * self.value.re
    }

    /// `β = 4πa²/(1+a²)`.
    pub fn beta(&self) -> f64 {
        -TAU * self.value.im
    }

    /// `e^{2πA}`; its modulus `e^{-α}` is always below one.
    pub fn exp_two_pi(&self) -> Complex64 {
        Complex64::from_polar((TAU * self.value.re).exp(), TAU * self.value.im)
    }

    /// `1 - e^{2πA}`, never zero for `a > 0`.
    pub fn one_minus_exp_two_pi(&self) -> Complex64 {
        Complex64::new(1.0, 0.0) - self.exp_two_pi()
    }

    /// `D_a = e^{2π Re A} + e^{-2π Re A} - 2cos(2π Im A) > 0`.
    pub fn d_a(&self) -> f64 {
        let x = TAU * self.value.re;
        x.exp() + (-x).exp() - 2.0 * (TAU * self.value.im).cos()
    }

    pub fn sinh_pi(&self) -> Complex64 {
        let (x, y) = (PI * self.value.re, PI * self.value.im);
        Complex64::new(x.sinh() * y.cos(), x.cosh() * y.sin())
    }

    pub fn cosh_pi(&self) -> Complex64 {
        let (x, y) = (PI * self.value.re, PI * self.value.im);
        Complex64::new(x.cosh() * y.cos(), x.sinh() * y.sin())
    }

    /// `coth(πA) = (e^{2πReA} - e^{-2πReA} - 2i sin(2πImA)) / D_a`.
    pub fn coth_pi(&self) -> Complex64 {
        let x = TAU * self.value.re;
        Complex64::new(x.exp() - (-x).exp(), -2.0 * (TAU * self.value.im).sin()) / self.d_a()
    }
}

pub fn spectral_constant(a: f64) -> SpectralConstant {
    SpectralConstant::new(a)
}

/// `C_a = (cos β - e^{-α}) / sin β`, undefined for `a² ∈ {1/3, 1, 3}`.
pub fn resonance_constant(a: f64) -> Result<f64> {
    check_tightness(a)?;
    let spec = SpectralConstant::new(a);
    let (alpha, beta) = (spec.alpha(), spec.beta());
    let sin_b = beta.sin();
    if sin_b.abs() < RESONANCE_TOL {
        return Err(SheetError::ResonantParameter { a });
    }
    Ok((beta.cos() - (-alpha).exp()) / sin_b)
}

/// `(2cos β - e^{-α} - e^{α}) / sin β`, the prefactor of the pressure
/// matching condition and of `h`.
fn pressure_ratio(a: f64) -> Result<f64> {
    check_tightness(a)?;
    let spec = SpectralConstant::new(a);
    let (alpha, beta) = (spec.alpha(), spec.beta());
    let sin_b = beta.sin();
    if sin_b.abs() < RESONANCE_TOL {
        return Err(SheetError::ResonantParameter { a });
    }
    Ok((2.0 * beta.cos() - (-alpha).exp() - alpha.exp()) / sin_b)
}

/// Exponent `iA ln r - A(θ - θ₀ - 2πJ)` shared by the potential and the
/// velocity of one spiral. `θ - θ₀ - 2πJ` is formed first so the result does
/// not depend on the angle representative.
pub(crate) fn sheet_exponent(
    z: PolarPoint,
    spec: &SpectralConstant,
    theta_base: f64,
) -> Result<Complex64> {
    let j = winding_number_offset_checked(z.r, z.theta, spec.a, theta_base)?;
    let phase = z.theta - theta_base - TAU * j as f64;
    let a_val = spec.value;
    Ok(Complex64::i() * a_val * z.r.ln() - a_val * phase)
}

/// Profile `w(z) = e^{iθ} 2ag / (r(a-i)) · (r^{2a/(a+i)} e^{A(θ₀-θ)} e^{2πJA} / (1-e^{2πA}))*`.
pub fn profile_velocity(z: PolarPoint, p: &SpiralParams) -> Result<Complex64> {
    ensure_off_sheets(z, p.a, &[p.theta0])?;
    let spec = SpectralConstant::new(p.a);
    let inner = sheet_exponent(z, &spec, p.theta0)?.exp() / spec.one_minus_exp_two_pi();
    let prefactor = Complex64::from_polar(1.0 / z.r, z.theta) * (2.0 * p.a * p.g)
        / Complex64::new(p.a, -1.0);
    Ok(prefactor * inner.conj())
}

/// `Φ(z) = g e^{θ₀A} / (1-e^{2πA}) · e^{iA(ln r + i(θ - 2πJ))}`; `w* = Φ'`.
pub fn complex_potential(z: PolarPoint, p: &SpiralParams) -> Result<Complex64> {
    ensure_off_sheets(z, p.a, &[p.theta0])?;
    let spec = SpectralConstant::new(p.a);
    Ok(p.g * sheet_exponent(z, &spec, p.theta0)?.exp() / spec.one_minus_exp_two_pi())
}

/// Time-dependent field `v(z, t) = t^μ w(z / t^μ)`.
pub fn self_similar_velocity(z: Complex64, t: f64, p: &SpiralParams) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(SheetError::InvalidParameter(format!(
            "time must be positive, got {t}"
        )));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Err(SheetError::Origin);
    }
    let scale = t.powf(p.mu);
    Ok(scale * profile_velocity(PolarPoint::from_complex(z / scale), p)?)
}

/// Strip-frame velocity
/// `w̃₁ = μ(C_a sin 2ax + cos 2ax)e^{2ay}`, `w̃₂ = μ(sin 2ax - C_a cos 2ax)e^{2ay}`.
pub fn strip_velocity(z: StripPoint, a: f64, mu: f64) -> Result<Complex64> {
    let c = resonance_constant(a)?;
    let (s, co) = (2.0 * a * z.x).sin_cos();
    let amp = mu * (2.0 * a * z.y).exp();
    Ok(Complex64::new(amp * (c * s + co), amp * (s - c * co)))
}

/// `Φ̃(z) = (μ/2a) (e^{-α} - e^{-iβ}) / sin β · e^{-2aiz}`, with `Φ̃' = w̃*`.
pub fn strip_potential(z: StripPoint, a: f64, mu: f64) -> Result<Complex64> {
    resonance_constant(a)?;
    let spec = SpectralConstant::new(a);
    let (alpha, beta) = (spec.alpha(), spec.beta());
    let factor = (Complex64::new((-alpha).exp(), 0.0) - Complex64::from_polar(1.0, -beta))
        / beta.sin();
    let e = (Complex64::new(0.0, -2.0 * a) * z.to_complex()).exp();
    Ok(mu / (2.0 * a) * factor * e)
}

/// Pushes a spiral-frame velocity at `f(z)` into the strip frame:
/// `w̃(z) = w(f(z)) · conj(f'(z))`, `f'(z) = (1-ai) f(z)`.
pub fn transport_to_strip(w: Complex64, z: StripPoint, a: f64) -> Complex64 {
    let df = Complex64::new(1.0, -a) * map_to_exterior(z.to_complex(), a);
    w * df.conj()
}

/// Strip velocity obtained by evaluating the profile at `f(z)` and transporting it.
pub fn transported_strip_velocity(z: StripPoint, p: &SpiralParams) -> Result<Complex64> {
    let image = PolarPoint::new((z.x + p.a * z.y).exp(), z.y - p.a * z.x);
    Ok(transport_to_strip(profile_velocity(image, p)?, z, p.a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchingSolution {
    pub mu: f64,
    pub g: f64,
}

/// Solves `a² + 1 - 2μ + 2aμi = -2a²g coth(πA)` for `(μ, g)`.
///
/// The real part is the velocity matching condition, the imaginary part the
/// pressure matching condition. Existence of a solution with a particular
/// sign of `g` is reported by the caller, not enforced here.
pub fn solve_matching(a: f64) -> Result<MatchingSolution> {
    check_tightness(a)?;
    let coth = SpectralConstant::new(a).coth_pi();
    let a2 = a * a;
    // [-2      2a² Re coth] [μ]   [-(a²+1)]
    // [2a      2a² Im coth] [g] = [   0   ]
    let (m11, m12, m21, m22) = (-2.0, 2.0 * a2 * coth.re, 2.0 * a, 2.0 * a2 * coth.im);
    let det = m11 * m22 - m12 * m21;
    let scale = m11.hypot(m12) * m21.hypot(m22);
    if !(det.abs() > SINGULAR_TOL * scale) {
        return Err(SheetError::SingularSystem {
            indicator: det.abs() / scale,
        });
    }
    let rhs = -(a2 + 1.0);
    Ok(MatchingSolution {
        mu: rhs * m22 / det,
        g: -rhs * m21 / det,
    })
}

/// `(a² + 1 - 2μ + 2aμi) + 2a²g coth(πA)`, zero exactly when the matching
/// conditions hold.
pub fn matching_residual(a: f64, mu: f64, g: f64) -> Complex64 {
    let coth = SpectralConstant::new(a).coth_pi();
    Complex64::new(a * a + 1.0 - 2.0 * mu, 2.0 * a * mu) + 2.0 * a * a * g * coth
}

/// `2ag sin β - μ(2cos β - e^{-α} - e^{α})`.
pub fn pressure_matching_residual(a: f64, mu: f64, g: f64) -> f64 {
    let spec = SpectralConstant::new(a);
    let (alpha, beta) = (spec.alpha(), spec.beta());
    2.0 * a * g * beta.sin() - mu * (2.0 * beta.cos() - (-alpha).exp() - alpha.exp())
}

/// The holomorphic auxiliary `h(z) = w̃*(z) + w̃₁(P₊z) + i w̃₂(P₊z)` in closed form:
/// `μe^{2ay}[(K sin 2ax + 2cos 2ax) + i(K cos 2ax - 2 sin 2ax)]` with
/// `K = (2cos β - e^{-α} - e^{α}) / sin β`.
pub fn h_function(z: StripPoint, a: f64, mu: f64) -> Result<Complex64> {
    let k = pressure_ratio(a)?;
    let (s, c) = (2.0 * a * z.x).sin_cos();
    let amp = mu * (2.0 * a * z.y).exp();
    Ok(Complex64::new(amp * (k * s + 2.0 * c), amp * (k * c - 2.0 * s)))
}

//! Families of `M` concentric spirals `Σ_m`, `Z_m(θ) = e^{a(θ-θ_m)} e^{iθ}`.
//!
//! In the strip the spirals `Σ_1 … Σ_{M-1}` become the vertical lines
//! `ℓ_m = { Re z = -aθ_m/(1+a²) }`, cutting it into `M` slabs. Slab `k` is the
//! open set between `ℓ_{k+1}` (left) and `ℓ_k` (right), with `ℓ_M` the left
//! strip edge. On slab `k` the strip velocity is the entire function
//!
//! `w̃*(z) = Σ_l (A2_l + i A1_l) e^{-2aiz} e^{s_l A}`, `s_l = θ_l - 2π[l > k]`,
//!
//! so sided limits on `ℓ_m` are obtained by evaluating the slab `m` (left) or
//! slab `m-1` (right) expression on the line itself.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conformal::{strip_membership, StripGeometry, StripPoint, StripRegion};
use crate::error::{Result, SheetError};
use crate::geometry::{check_angles, check_tightness, ensure_off_sheets, PolarPoint, SpiralFamily};
use crate::single_spiral::{sheet_exponent, SpectralConstant};

/// Smallest admissible ratio of extreme singular values in the matching solve.
pub const RANK_TOL: f64 = 1e-12;

/// `𝒜_{mk}` and the spectral constant it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    pub a: f64,
    entries: Vec<Complex64>,
    size: usize,
}

impl CouplingMatrix {
    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn entry(&self, m: usize, k: usize) -> Complex64 {
        self.entries[m * self.size + k]
    }

    /// `ℬ_{mk} = 𝒜_{mk} / sinh(πA)`.
    pub fn normalized(&self, m: usize, k: usize) -> Complex64 {
        self.entry(m, k) / SpectralConstant::new(self.a).sinh_pi()
    }

    pub fn row_sum(&self, m: usize) -> Complex64 {
        (0..self.size).map(|k| self.entry(m, k)).sum()
    }
}

/// `𝒜_{mk} = e^{A(θ_k-θ_m)} · { e^{-πA} (k>m), cosh(πA) (k=m), e^{πA} (k<m) }`.
pub fn coupling_matrix(a: f64, thetas: &[f64]) -> Result<CouplingMatrix> {
    check_tightness(a)?;
    check_angles(thetas)?;
    let spec = SpectralConstant::new(a);
    let big_a = spec.value;
    let n = thetas.len();
    let mut entries = Vec::with_capacity(n * n);
    for m in 0..n {
        for k in 0..n {
            let d = thetas[k] - thetas[m];
            let e = match k.cmp(&m) {
                std::cmp::Ordering::Greater => (big_a * (d - std::f64::consts::PI)).exp(),
                std::cmp::Ordering::Equal => spec.cosh_pi(),
                std::cmp::Ordering::Less => (big_a * (d + std::f64::consts::PI)).exp(),
            };
            entries.push(e);
        }
    }
    Ok(CouplingMatrix {
        a,
        entries,
        size: n,
    })
}

/// `Im ℬ_{mk}` from the real trigonometric expressions, without complex division.
pub fn im_coupling_closed_form(a: f64, thetas: &[f64], m: usize, k: usize) -> f64 {
    let spec = SpectralConstant::new(a);
    let (re, im, d_a) = (spec.re(), spec.im(), spec.d_a());
    let d = thetas[k] - thetas[m];
    match k.cmp(&m) {
        std::cmp::Ordering::Equal => -2.0 * (TAU * im).sin() / d_a,
        std::cmp::Ordering::Less => {
            2.0 / d_a
                * (((d + TAU) * re).exp() * (d * im).sin()
                    - (d * re).exp() * ((d + TAU) * im).sin())
        }
        std::cmp::Ordering::Greater => {
            2.0 / d_a
                * ((d * re).exp() * ((d - TAU) * im).sin()
                    - ((d - TAU) * re).exp() * (d * im).sin())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMatching {
    pub mu: f64,
    pub gs: Vec<f64>,
    /// Euclidean norm of the complex residual vector at the returned solution.
    pub residual_norm: f64,
}

/// `Σ_k ℬ_{mk} g_k + (a² + 1 - 2μ + 2aμi)/(2a²)` for every row `m`.
pub fn family_matching_residual(
    a: f64,
    thetas: &[f64],
    mu: f64,
    gs: &[f64],
) -> Result<Vec<Complex64>> {
    if gs.len() != thetas.len() {
        return Err(SheetError::InvalidParameter(format!(
            "{} angles but {} strengths",
            thetas.len(),
            gs.len()
        )));
    }
    let c = coupling_matrix(a, thetas)?;
    let rhs = Complex64::new(a * a + 1.0 - 2.0 * mu, 2.0 * a * mu) / (2.0 * a * a);
    Ok((0..c.len())
        .map(|m| {
            (0..c.len())
                .map(|k| c.normalized(m, k) * gs[k])
                .sum::<Complex64>()
                + rhs
        })
        .collect())
}

/// Least-squares solution of the `2M` real matching equations in the unknowns
/// `(g_0, …, g_{M-1}, μ)`. The reported `residual_norm` tells whether the
/// system is solved exactly; nothing here assumes it is.
pub fn solve_family_matching(a: f64, thetas: &[f64]) -> Result<FamilyMatching> {
    let c = coupling_matrix(a, thetas)?;
    let n = c.len();
    let a2 = a * a;
    let mut mat = DMatrix::<f64>::zeros(2 * n, n + 1);
    let mut rhs = DVector::<f64>::zeros(2 * n);
    for m in 0..n {
        for k in 0..n {
            let b = c.normalized(m, k);
            mat[(2 * m, k)] = b.re;
            mat[(2 * m + 1, k)] = b.im;
        }
        // -μ(1 - ai)/a²
        mat[(2 * m, n)] = -1.0 / a2;
        mat[(2 * m + 1, n)] = 1.0 / a;
        rhs[2 * m] = -(a2 + 1.0) / (2.0 * a2);
    }
    let svd = mat.svd(true, true);
    let (smax, smin) = svd
        .singular_values
        .iter()
        .fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
    let indicator = if smax > 0.0 { smin / smax } else { 0.0 };
    if !(indicator >= RANK_TOL) {
        return Err(SheetError::SingularSystem { indicator });
    }
    let x = svd
        .solve(&rhs, 0.0)
        .map_err(|e| SheetError::InvalidParameter(e.to_string()))?;
    let gs: Vec<f64> = x.iter().take(n).copied().collect();
    let mu = x[n];
    let residual_norm = norm(&family_matching_residual(a, thetas, mu, &gs)?);
    Ok(FamilyMatching {
        mu,
        gs,
        residual_norm,
    })
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripCoefficients {
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
    pub d_a: f64,
}

impl StripCoefficients {
    /// `A2_l + i A1_l`, the coefficient multiplying `e^{-2aiz}e^{s_l A}` in `w̃*`.
    fn velocity_coefficient(&self, l: usize) -> Complex64 {
        Complex64::new(self.a2[l], self.a1[l])
    }
}

/// `A1_m = 2ag_m(e^{2πReA} - cos 2πImA)/D_a`, `A2_m = 2ag_m sin(2πImA)/D_a`.
pub fn strip_coefficients(a: f64, gs: &[f64]) -> StripCoefficients {
    let spec = SpectralConstant::new(a);
    let d_a = spec.d_a();
    let (re2, im2) = (TAU * spec.re(), TAU * spec.im());
    StripCoefficients {
        a1: gs
            .iter()
            .map(|g| 2.0 * a * g * (re2.exp() - im2.cos()) / d_a)
            .collect(),
        a2: gs.iter().map(|g| 2.0 * a * g * im2.sin() / d_a).collect(),
        d_a,
    }
}

/// Abscissae `x_0 = 0 > x_1 > … > x_{M-1} > x_M = -2πa/(1+a²)` of the lines
/// `ℓ_m`, with `θ_M = 2π` appended.
pub fn line_positions(a: f64, thetas: &[f64]) -> Vec<f64> {
    let s = 1.0 + a * a;
    thetas
        .iter()
        .chain(std::iter::once(&TAU))
        .map(|t| -a * t / s)
        .collect()
}

/// Slab containing `z`. Boundary edges belong to the adjacent slab; interior
/// lines raise `OnCutLine`.
pub fn slab_index(z: StripPoint, fam: &SpiralFamily) -> Result<usize> {
    match strip_membership(z.to_complex(), fam.a, fam.thetas()) {
        StripRegion::Outside => Err(SheetError::OutsideStrip),
        StripRegion::OnLine(m) => Err(SheetError::OnCutLine { line: m }),
        StripRegion::RightBoundary => Ok(0),
        StripRegion::LeftBoundary => Ok(fam.len() - 1),
        StripRegion::Interior => {
            let lines = line_positions(fam.a, fam.thetas());
            Ok((0..fam.len())
                .find(|&k| z.x > lines[k + 1])
                .unwrap_or(fam.len() - 1))
        }
    }
}

/// Indicator of `S_{<l}`: the open part of the strip left of `ℓ_l`.
pub fn left_of_line(z: StripPoint, fam: &SpiralFamily, l: usize) -> Result<bool> {
    Ok(l <= slab_index(z, fam)?)
}

fn slab_shift(l: usize, slab: usize, theta_l: f64) -> f64 {
    if l > slab {
        theta_l - TAU
    } else {
        theta_l
    }
}

/// `w̃*` of slab `slab`, continued analytically to every `z`.
fn slab_conjugate_velocity(
    z: StripPoint,
    fam: &SpiralFamily,
    coeffs: &StripCoefficients,
    slab: usize,
) -> Complex64 {
    let big_a = SpectralConstant::new(fam.a).value;
    let carrier = (Complex64::new(0.0, -2.0 * fam.a) * z.to_complex()).exp();
    fam.thetas()
        .iter()
        .enumerate()
        .map(|(l, &t)| coeffs.velocity_coefficient(l) * (big_a * slab_shift(l, slab, t)).exp())
        .sum::<Complex64>()
        * carrier
}

/// Strip velocity of slab `slab` evaluated at an arbitrary `z`, used for sided
/// limits: on `ℓ_m` the left value comes from slab `m`, the right from slab `m-1`.
pub fn slab_strip_velocity(z: StripPoint, fam: &SpiralFamily, slab: usize) -> Result<Complex64> {
    if slab >= fam.len() {
        return Err(SheetError::InvalidParameter(format!(
            "slab {slab} out of range for {} spirals",
            fam.len()
        )));
    }
    let coeffs = strip_coefficients(fam.a, fam.gs());
    Ok(slab_conjugate_velocity(z, fam, &coeffs, slab).conj())
}

/// Strip velocity `w̃₁ + iw̃₂` built from the slab-wise ansatz. Points on the
/// strip edges take the limit from inside.
pub fn family_strip_velocity(z: StripPoint, fam: &SpiralFamily) -> Result<Complex64> {
    let slab = slab_index(z, fam)?;
    slab_strip_velocity(z, fam, slab)
}

/// `Φ̃(z) = Σ_l g_l e^{2πA}/(1-e^{2πA}) e^{-2aiz} e^{s_l A}`.
pub fn family_strip_potential(z: StripPoint, fam: &SpiralFamily) -> Result<Complex64> {
    let slab = slab_index(z, fam)?;
    let spec = SpectralConstant::new(fam.a);
    let big_a = spec.value;
    let factor = spec.exp_two_pi() / spec.one_minus_exp_two_pi();
    let carrier = (Complex64::new(0.0, -2.0 * fam.a) * z.to_complex()).exp();
    Ok(fam
        .thetas()
        .iter()
        .zip(fam.gs())
        .enumerate()
        .map(|(l, (&t, &g))| g * (big_a * slab_shift(l, slab, t)).exp())
        .sum::<Complex64>()
        * factor
        * carrier)
}

fn family_sum(z: PolarPoint, fam: &SpiralFamily) -> Result<Complex64> {
    ensure_off_sheets(z, fam.a, fam.thetas())?;
    let spec = SpectralConstant::new(fam.a);
    let mut total = Complex64::new(0.0, 0.0);
    for (l, (&t, &g)) in fam.thetas().iter().zip(fam.gs()).enumerate() {
        let e = sheet_exponent(z, &spec, t).map_err(|err| match err {
            SheetError::OnSpiral { .. } => SheetError::OnSpiral { spiral: l },
            other => other,
        })?;
        total += g * e.exp();
    }
    Ok(total / spec.one_minus_exp_two_pi())
}

/// `Φ(z) = Σ_l g_l e^{θ_l A}/(1-e^{2πA}) e^{iA(ln r + i(θ - 2πJ(r,θ,l)))}`.
pub fn family_potential(z: PolarPoint, fam: &SpiralFamily) -> Result<Complex64> {
    family_sum(z, fam)
}

/// `w(z) = e^{iθ} 2a/(r(a-i)) · (Σ_l g_l r^{2a/(a+i)} e^{A(θ_l-θ)} e^{2πJ(r,θ,l)A}/(1-e^{2πA}))*`.
pub fn family_velocity(z: PolarPoint, fam: &SpiralFamily) -> Result<Complex64> {
    let inner = family_sum(z, fam)?;
    let prefactor =
        Complex64::from_polar(1.0 / z.r, z.theta) * (2.0 * fam.a) / Complex64::new(fam.a, -1.0);
    Ok(prefactor * inner.conj())
}

/// Residuals of the six boundary conditions of the strip problem.
///
/// `b3`, `b4` and `b6` concern the interior lines and are stored line-major
/// (`m = 1 … M-1`, then grid point); they are empty for a single spiral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryResiduals {
    pub b1: Vec<f64>,
    pub b2: Vec<f64>,
    pub b3: Vec<f64>,
    pub b4: Vec<f64>,
    pub b5: Vec<f64>,
    pub b6: Vec<f64>,
}

impl BoundaryResiduals {
    pub fn named(&self) -> [(&'static str, &[f64]); 6] {
        [
            ("B1", &self.b1),
            ("B2", &self.b2),
            ("B3", &self.b3),
            ("B4", &self.b4),
            ("B5", &self.b5),
            ("B6", &self.b6),
        ]
    }

    pub fn max_abs(&self) -> [f64; 6] {
        self.named()
            .map(|(_, v)| v.iter().fold(0.0f64, |acc, x| acc.max(x.abs())))
    }
}

/// Evaluates each boundary condition on the grid `y_grid` with sided values
/// of the slab ansatz, every residual divided by `e^{2ay}`:
///
/// - B1: `w̃₁(iy) - μe^{2ay}` on `ℓ_0`
/// - B2: `w̃₁(-W+iy) - μe^{2a(y-T)}` on `ℓ_M`, `T = 2π/(1+a²)`
/// - B3: `w̃₁ᴿ - w̃₁ᴸ` on `ℓ_m`
/// - B4: `w̃₁ᴸ - μe^{2a(y-θ_m/(1+a²))}` on `ℓ_m`
/// - B5: `w̃₂(-W+i(y+T)) - w̃₂(iy) - 2ag₀e^{2ay}`
/// - B6: `w̃₂ᴿ - w̃₂ᴸ - 2ag_m e^{2a(y-θ_m/(1+a²))}` on `ℓ_m`
///
/// The target exponent is the explicit `mu`; `fam.mu` is not consulted.
#[allow(clippy::needless_range_loop)]
pub fn boundary_residuals(fam: &SpiralFamily, mu: f64, y_grid: &[f64]) -> BoundaryResiduals {
    let a = fam.a;
    let n = fam.len();
    let s = 1.0 + a * a;
    let geom = StripGeometry::new(a).expect("family tightness already validated");
    let t_period = geom.vertical_period();
    let lines = line_positions(a, fam.thetas());
    let coeffs = strip_coefficients(a, fam.gs());
    let eval = |x: f64, y: f64, slab: usize| {
        slab_conjugate_velocity(StripPoint::new(x, y), fam, &coeffs, slab).conj()
    };
    let mut out = BoundaryResiduals {
        b1: Vec::with_capacity(y_grid.len()),
        b2: Vec::with_capacity(y_grid.len()),
        b3: Vec::new(),
        b4: Vec::new(),
        b5: Vec::with_capacity(y_grid.len()),
        b6: Vec::new(),
    };
    for &y in y_grid {
        let norm = (2.0 * a * y).exp();
        let right = eval(0.0, y, 0);
        let left = eval(-geom.width, y, n - 1);
        out.b1.push((right.re - mu * norm) / norm);
        out.b2.push((left.re - mu * (2.0 * a * (y - t_period)).exp()) / norm);
        let shifted = eval(-geom.width, y + t_period, n - 1);
        out.b5
            .push((shifted.im - right.im - 2.0 * a * fam.gs()[0] * norm) / norm);
    }
    for m in 1..n {
        for &y in y_grid {
            let norm = (2.0 * a * y).exp();
            let target = (2.0 * a * (y - fam.thetas()[m] / s)).exp();
            let wl = eval(lines[m], y, m);
            let wr = eval(lines[m], y, m - 1);
            out.b3.push((wr.re - wl.re) / norm);
            out.b4.push((wl.re - mu * target) / norm);
            out.b6
                .push((wr.im - wl.im - 2.0 * a * fam.gs()[m] * target) / norm);
        }
    }
    out
}

/// The same six conditions in their `y`-independent algebraic form, written
/// directly in terms of `A1`, `A2`, `θ_l` and `μ` (one entry per condition and line).
pub fn boundary_residuals_algebraic(fam: &SpiralFamily, mu: f64) -> BoundaryResiduals {
    let a = fam.a;
    let n = fam.len();
    let spec = SpectralConstant::new(a);
    let (re, im) = (spec.re(), spec.im());
    let th = fam.thetas();
    let c = strip_coefficients(a, fam.gs());
    let (a1, a2) = (&c.a1, &c.a2);
    let decay = (-TAU * re).exp();
    let (s2, c2) = (TAU * im).sin_cos();

    let wrap_sum = |m: usize, start: usize| -> f64 {
        (start..n)
            .map(|l| {
                let ind = if m < l { TAU } else { 0.0 };
                let phase = (ind + th[m] - th[l]) * im;
                (a1[l] * phase.sin() + a2[l] * phase.cos()) * ((th[l] - ind) * re).exp()
            })
            .sum()
    };

    let b1 = a2[0]
        + (1..n)
            .map(|l| {
                let phase = (TAU - th[l]) * im;
                (a1[l] * phase.sin() + a2[l] * phase.cos()) * ((th[l] - TAU) * re).exp()
            })
            .sum::<f64>()
        - mu;
    let b2 = (0..n)
        .map(|l| {
            let phase = (TAU - th[l]) * im;
            (a1[l] * phase.sin() + a2[l] * phase.cos()) * (th[l] * re).exp()
        })
        .sum::<f64>()
        - mu * (TAU * re).exp();
    let b5 = 2.0 * a * fam.gs()[0] - a2[0] * s2 * decay - a1[0] * (1.0 - c2 * decay);
    BoundaryResiduals {
        b1: vec![b1],
        b2: vec![b2],
        b3: (1..n)
            .map(|m| a2[m] - (a1[m] * s2 + a2[m] * c2) * decay)
            .collect(),
        b4: (1..n)
            .map(|m| wrap_sum(m, 0) - mu * (th[m] * re).exp())
            .collect(),
        b5: vec![b5],
        b6: (1..n)
            .map(|m| 2.0 * a * fam.gs()[m] - a2[m] * s2 * decay - a1[m] * (1.0 - c2 * decay))
            .collect(),
    }
}

/// Family with the parameters returned by [`solve_family_matching`].
pub fn solved_family(a: f64, thetas: &[f64]) -> Result<(SpiralFamily, FamilyMatching)> {
    let sol = solve_family_matching(a, thetas)?;
    let fam = SpiralFamily::new(a, sol.mu, thetas.to_vec(), sol.gs.clone())?;
    Ok((fam, sol))
}

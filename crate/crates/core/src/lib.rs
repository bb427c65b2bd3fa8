//! Logarithmic spiral vortex sheets in closed form.
//!
//! The crate evaluates the self-similar velocity field and complex potential
//! induced by one or several concentric logarithmic spirals
//! `Z(θ) = e^{a(θ-θ_m)} e^{iθ}`, together with the explicit biholomorphic map
//! `f(z) = e^{(1-ai)z}` from the vertical strip
//! `-2πa/(1+a²) < Re z < 0` onto the spiral exterior. Every identity that
//! links the two frames is exposed so that it can be checked numerically:
//!
//! - [`geometry`]: spirals, tangent/normal, circulation, density, winding numbers
//! - [`conformal`]: the strip map, its inverse, reflection-shift maps
//! - [`single_spiral`]: velocity, potential and parameter matching for one spiral
//! - [`family`]: coupling matrix, strip ansatz and boundary residuals for `M` spirals
//! - [`verify`]: finite differences, sided jump probes and residual reports
//! - [`cli`]: the `spiralsheet` command-line front end

#![forbid(unsafe_code)]
// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod conformal;
pub mod error;
pub mod family;
pub mod geometry;
pub mod single_spiral;
pub mod verify;

pub use num_complex::Complex64;

pub use conformal::{
    map_to_exterior, map_to_strip, reflect_shift, reflect_shift_iter, strip_membership,
    ShiftSign, StripGeometry, StripPoint, StripRegion,
};
pub use error::{Result, SheetError};
pub use family::{
    boundary_residuals, coupling_matrix, family_matching_residual, family_potential,
    family_strip_potential, family_strip_velocity, family_velocity, solve_family_matching,
    strip_coefficients, BoundaryResiduals, CouplingMatrix, FamilyMatching, StripCoefficients,
};
pub use geometry::{
    circulation, sheet_density, spiral_point, tangent_normal, winding_number,
    winding_number_checked, winding_number_offset, winding_number_offset_checked, PolarPoint, SpiralFamily, SpiralParams, WindingNumber,
};
pub use single_spiral::{
    complex_potential, h_function, matching_residual, profile_velocity, resonance_constant,
    self_similar_velocity, solve_matching, spectral_constant, strip_potential, strip_velocity,
    MatchingSolution, SpectralConstant,
};
pub use verify::{ResidualReport, SheetField};

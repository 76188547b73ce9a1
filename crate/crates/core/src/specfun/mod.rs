//! Special functions and closed-form constants.

pub mod constants;
pub mod gamma;
pub mod harmonics;
pub mod poly;

pub use constants::{
    finite_difference_moment, finite_difference_moment_derivative, formula_constants, sphere_area, svd_constants,
    ConstantsRecord, FormulaConstants,
    SvdConstants, SvdIndex,
};
pub use gamma::{binomial, gamma, log_gamma};
pub use harmonics::{harmonic_dim, real_harmonic, sph_harm, HarmonicBasis};
pub use poly::{gegenbauer_all, gegenbauer_poly, jacobi_poly, jacobi_with_derivative};

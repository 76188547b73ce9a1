//! Reconstruction by the analytically continued backprojection formulas.
//! Input is the full transform V = 2V₊ of a function that vanishes near
//! the equator.
//!
//! * n = 3: f = λ₃ |x₄| (-Δ) ∫_{S²} g_θ(θ·x') dθ, g_θ(t) = (Vf)(θ, t)(1 - t²)^{-1/2}.
//! * n = 2: f = |x₃|/(8π²) Δ ∫_{S¹} dθ ∫ (Vf)(θ, t) log|t - θ·x'| (1 - t²)^{-1/2} dt.
//! * even n > 2: f = (λ_n/π) |x_{n+1}| Δ ∫ dθ ∫ (d/dt)^{n-2} g_θ(t) log|t - θ·x'| dt.

use log::warn;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::cartesian::CartesianGrid;
use crate::error::{Error, Result};
use crate::grid::{SliceData, SphereFunction};
use crate::profile::{ChebSeries, UniformProfiles};
use crate::quadrature::gauss_chebyshev;
use crate::specfun::{sphere_area, FormulaConstants};
use crate::xform::backproject_uniform;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcOptions {
    pub cartesian_nodes: usize,
    pub profile_nodes: usize,
    /// Equator margin of the phantom class; enables the decay check.
    #[serde(default)]
    pub equator_margin: Option<f64>,
}

impl AcOptions {
    pub fn default_for(n: usize) -> Self {
        let cartesian_nodes = match n {
            2 => 193,
            3 => 81,
            _ => 21,
        };
        Self { cartesian_nodes, profile_nodes: 2049, equator_margin: None }
    }

    pub fn scaled(&self, num: usize, den: usize) -> Self {
        let nodes = ((self.cartesian_nodes - 1) * num / den).max(8);
        Self { cartesian_nodes: nodes + 1, ..self.clone() }
    }
}

/// Largest |g_θ(t)| over slice nodes with |t| > (1 - margin²)^{1/2}, where
/// slices only meet the band |x_{n+1}| < margin.
pub fn boundary_defect(full: &SliceData, margin: f64) -> f64 {
    let threshold = (1.0 - margin * margin).max(0.0).sqrt();
    let t = full.grid().t_nodes();
    let mut worst = 0.0f64;
    for row in full.values().rows() {
        for (v, &tj) in row.iter().zip(t) {
            if tj.abs() > threshold {
                worst = worst.max((v / (1.0 - tj * tj).sqrt()).abs());
            }
        }
    }
    worst
}

fn check_class(full: &SliceData, options: &AcOptions) {
    if let Some(margin) = options.equator_margin {
        let defect = boundary_defect(full, margin);
        if defect > 1e-8 {
            warn!("slice data do not vanish near t = ±1 (max |g| = {defect:.3e}); the phantom may not avoid the equator");
        }
    }
}

fn weighted_series(full: &SliceData) -> Vec<ChebSeries> {
    let t = full.grid().t_nodes();
    full.values()
        .rows()
        .into_iter()
        .map(|row| {
            let g: Vec<f64> = row.iter().zip(t).map(|(v, tj)| v / (1.0 - tj * tj).sqrt()).collect();
            ChebSeries::fit(t, &g)
        })
        .collect()
}

/// Odd n = 3.
pub fn invert_ac_odd(full: &SliceData, options: &AcOptions) -> Result<SphereFunction> {
    let grid = full.grid();
    if grid.n() != 3 {
        return Err(Error::Parameter(format!("odd analytic-continuation inversion needs n = 3 (got {})", grid.n())));
    }
    check_class(full, options);
    let series = weighted_series(full);
    let profiles = UniformProfiles::from_fn(series.len(), (-1.0, 1.0), options.profile_nodes, |i, t| series[i].eval(t));
    let cart = CartesianGrid::new(3, options.cartesian_nodes)?;
    // backprojection is normalized by σ₂; the formula integrates over dθ
    let h = backproject_uniform(&profiles, grid, &cart, cart.sampling_radius());
    let lambda = FormulaConstants::new(3)?.lambda_ac()?;
    cart.laplacian_on_sphere(&h, grid, -lambda * sphere_area(3))
}

/// n = 2.
pub fn invert_ac_n2(full: &SliceData, options: &AcOptions) -> Result<SphereFunction> {
    let grid = full.grid();
    if grid.n() != 2 {
        return Err(Error::Parameter(format!("this analytic-continuation inversion needs n = 2 (got {})", grid.n())));
    }
    check_class(full, options);
    let t = grid.t_nodes();
    let series: Vec<ChebSeries> = full.values().rows().into_iter().map(|row| ChebSeries::fit(t, &row.to_vec())).collect();
    let cart = CartesianGrid::new(2, options.cartesian_nodes)?;
    let reach = cart.sampling_radius() + 2.0 * cart.step();
    let profiles =
        UniformProfiles::from_fn(series.len(), (-reach, reach), options.profile_nodes, |i, s| series[i].log_kernel(s));
    let h = backproject_uniform(&profiles, grid, &cart, cart.sampling_radius());
    cart.laplacian_on_sphere(&h, grid, sphere_area(2) / (8.0 * PI * PI))
}

/// Even n > 2, derivatives taken on the Chebyshev interpolant of g_θ.
pub fn invert_ac_even_general(full: &SliceData, options: &AcOptions) -> Result<SphereFunction> {
    let grid = full.grid();
    let n = grid.n();
    if !n.is_multiple_of(2) || n < 4 {
        return Err(Error::Parameter(format!("even-n analytic-continuation inversion needs even n > 2 (got {n})")));
    }
    check_class(full, options);
    let count = grid.t_nodes().len();
    let (cheb_nodes, _) = gauss_chebyshev(count);
    let series: Vec<ChebSeries> = weighted_series(full)
        .into_iter()
        .map(|mut s| {
            for _ in 0..n - 2 {
                s = s.derivative();
            }
            // q = h (1 - t²)^{1/2}, so that the Chebyshev log kernel of q is ∫ h log|s - t| dt
            let q: Vec<f64> = cheb_nodes.iter().map(|&t| s.eval(t) * (1.0 - t * t).sqrt()).collect();
            ChebSeries::from_gauss_values(&q)
        })
        .collect();
    let cart = CartesianGrid::new(n, options.cartesian_nodes)?;
    let reach = cart.sampling_radius() + 2.0 * cart.step();
    let profiles =
        UniformProfiles::from_fn(series.len(), (-reach, reach), options.profile_nodes, |i, s| series[i].log_kernel(s));
    let h = backproject_uniform(&profiles, grid, &cart, cart.sampling_radius());
    let lambda = FormulaConstants::new(n)?.lambda_ac()?;
    cart.laplacian_on_sphere(&h, grid, lambda * sphere_area(n) / PI)
}

/// Dispatches on n.
pub fn invert_ac(full: &SliceData, options: &AcOptions) -> Result<SphereFunction> {
    match full.grid().n() {
        2 => invert_ac_n2(full, options),
        3 => invert_ac_odd(full, options),
        n if n % 2 == 0 => invert_ac_even_general(full, options),
        n => Err(Error::Parameter(format!("analytic-continuation inversion is not provided for n = {n}"))),
    }
}

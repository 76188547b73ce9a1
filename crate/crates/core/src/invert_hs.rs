//! Reconstruction through the hypersingular representation of R^{-1},
//! specialized to n = 2 with a first-order difference:
//! f(x) = c |x₃| ∫ (g(x') - g(x' - y)) |y|^{-3} dy, g = R*Φ.

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::cartesian::CartesianGrid;
use crate::error::{Error, Result};
use crate::grid::{SliceData, SphereFunction};
use crate::profile::UniformProfiles;
use crate::quadrature::gauss_legendre;
use crate::specfun::{binomial, FormulaConstants};
use crate::xform::{backproject_uniform, slice_profiles, t_weighted};

/// Σ_{k=0}^{ℓ} (-1)^k C(ℓ, k) g(x - k y).
pub fn finite_difference<G: Fn(&[f64]) -> f64>(g: G, ell: usize, x: &[f64], y: &[f64]) -> f64 {
    let mut point = x.to_vec();
    let mut total = 0.0;
    for k in 0..=ell {
        for ((p, xi), yi) in point.iter_mut().zip(x).zip(y) {
            *p = xi - k as f64 * yi;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * binomial(ell as u64, k as u64) * g(&point);
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypersingularOptions {
    pub ell: usize,
    /// Inner truncation radius; `None` means twice the Cartesian step.
    pub eps: Option<f64>,
    pub r_max: f64,
    /// Richardson extrapolation over (eps, 2 eps).
    pub richardson: bool,
    pub cartesian_nodes: usize,
    pub profile_nodes: usize,
    /// Antipodal direction pairs in the polar quadrature.
    pub angle_pairs: usize,
    /// Gauss–Legendre nodes per dyadic radial panel.
    pub panel_nodes: usize,
}

impl Default for HypersingularOptions {
    fn default() -> Self {
        Self {
            ell: 1,
            eps: None,
            r_max: 4.0,
            richardson: true,
            cartesian_nodes: 193,
            profile_nodes: 2049,
            angle_pairs: 24,
            panel_nodes: 8,
        }
    }
}

impl HypersingularOptions {
    pub fn scaled(&self, num: usize, den: usize) -> Self {
        let nodes = ((self.cartesian_nodes - 1) * num / den).max(8);
        Self { cartesian_nodes: nodes + 1, ..self.clone() }
    }
}

/// g = R*Φ sampled finely near the ball and coarsely out to the far field.
struct Potential {
    fine: CartesianGrid,
    fine_values: Vec<f64>,
    fine_limit: f64,
    coarse: CartesianGrid,
    coarse_values: Vec<f64>,
}

impl Potential {
    fn eval(&self, x: &[f64]) -> f64 {
        if x.iter().all(|v| v.abs() <= self.fine_limit) {
            self.fine.interpolate(&self.fine_values, x)
        } else {
            self.coarse.interpolate(&self.coarse_values, x)
        }
    }
}

/// Dyadic Gauss–Legendre panels on [lo, hi], finest next to lo.
fn dyadic_panels(lo: f64, hi: f64, nodes: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(nodes);
    let mut r = Vec::new();
    let mut wr = Vec::new();
    let mut a = lo;
    while a < hi {
        let b = (2.0 * a).min(hi);
        let half = 0.5 * (b - a);
        for (xi, wi) in x.iter().zip(&w) {
            r.push(a + half * (xi + 1.0));
            wr.push(wi * half);
        }
        a = b;
    }
    (r, wr)
}

/// ∫_{eps < |y| < r_max} (g(x) - g(x - y)) |y|^{-3} dy with antipodal
/// direction pairs, so the first-order part of the difference cancels.
fn truncated<G: Fn(&[f64]) -> f64>(g: &G, x: &[f64], gx: f64, dirs: &[[f64; 2]], radii: &[f64], weights: &[f64]) -> f64 {
    let dtheta = PI / dirs.len() as f64;
    let mut total = 0.0;
    for (&r, &w) in radii.iter().zip(weights) {
        let mut ring = 0.0;
        for d in dirs {
            let plus = [x[0] + r * d[0], x[1] + r * d[1]];
            let minus = [x[0] - r * d[0], x[1] - r * d[1]];
            ring += 2.0 * gx - g(&plus) - g(&minus);
        }
        // dy = r dr dθ, |y|^{-3}
        total += w * ring * dtheta / (r * r);
    }
    total
}

/// Hypersingular inversion for n = 2 and ℓ = 1. The tail |y| > r_max is
/// added in closed form from g(x) and the far-field g ~ M/(π|x|), M = ∫φ.
pub fn invert_hypersingular(data: &SliceData, options: &HypersingularOptions) -> Result<SphereFunction> {
    let grid = data.grid().clone();
    if grid.n() != 2 {
        return Err(Error::Parameter(format!("hypersingular inversion is provided for n = 2 (got {})", grid.n())));
    }
    let fc = FormulaConstants::new(2)?;
    let constant = fc.hypersingular_constant(options.ell)?;
    let fine = CartesianGrid::new(2, options.cartesian_nodes)?;
    let h = fine.step();
    let eps = options.eps.unwrap_or(2.0 * h);
    if !(eps > 0.0 && eps < options.r_max) {
        return Err(Error::Parameter(format!("need 0 < eps < r_max (eps = {eps}, r_max = {})", options.r_max)));
    }

    let phi = t_weighted(data, -0.5);
    let profiles = UniformProfiles::from_table(&slice_profiles(&phi), options.profile_nodes);
    let dirs = grid.directions();
    let fine_values = backproject_uniform(&profiles, &grid, &fine, f64::INFINITY);
    let coarse = CartesianGrid::covering(2, 1.0 + options.r_max + 4.0 * h, 4.0 * h)?;
    let coarse_values = backproject_uniform(&profiles, &grid, &coarse, f64::INFINITY);
    let potential = Potential { fine_limit: fine.interior_half_width(), fine, fine_values, coarse, coarse_values };
    let g = |x: &[f64]| potential.eval(x);

    // mass M = ∫ Φ(θ, t) dt, averaged over θ
    let tw = grid.t_weights();
    let mass = (0..grid.n_dirs())
        .map(|i| dirs.weight(i) * phi.values().row(i).iter().zip(tw).map(|(v, w)| v * w).sum::<f64>())
        .sum::<f64>()
        / (2.0 * PI);

    let pairs: Vec<[f64; 2]> = (0..options.angle_pairs)
        .map(|k| {
            let a = PI * (k as f64 + 0.5) / options.angle_pairs as f64;
            [a.cos(), a.sin()]
        })
        .collect();
    let (r_outer, w_outer) = dyadic_panels(2.0 * eps, options.r_max, options.panel_nodes);
    let (r_inner, w_inner) = dyadic_panels(eps, 2.0 * eps, options.panel_nodes);
    let r_max = options.r_max;

    let (rows, cols) = (grid.n_dirs(), grid.radii().len());
    let flat: Vec<f64> = (0..rows * cols)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / cols, idx % cols);
            let mut x = [0.0; 2];
            grid.ball_point(i, j, &mut x);
            let gx = g(&x);
            let tail = 2.0 * PI * gx / r_max - mass / (r_max * r_max);
            let coarse_part = truncated(&g, &x, gx, &pairs, &r_outer, &w_outer);
            let at_2eps = coarse_part + tail;
            let at_eps = at_2eps + truncated(&g, &x, gx, &pairs, &r_inner, &w_inner);
            let value = if options.richardson { 2.0 * at_eps - at_2eps } else { at_eps };
            grid.height(j) * constant * value
        })
        .collect();
    SphereFunction::new(grid.clone(), Array2::from_shape_vec((rows, cols), flat).expect("shape"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, GridSpec};

    #[test]
    fn finite_difference_examples() {
        let g = |x: &[f64]| x[0] * x[0] + 3.0 * x[1];
        let x = [0.3, -0.2];
        let y = [0.1, 0.5];
        let first = finite_difference(g, 1, &x, &y);
        let direct = g(&x) - g(&[x[0] - y[0], x[1] - y[1]]);
        assert!((first - direct).abs() < 1e-15);
        assert!(finite_difference(|_| 4.2, 3, &x, &y).abs() < 1e-14);
        let linear = |x: &[f64]| 1.5 - 2.0 * x[0] + 0.25 * x[1];
        assert!(finite_difference(linear, 2, &x, &y).abs() < 1e-14);
    }

    #[test]
    fn truncation_converges_for_a_smooth_function() {
        // Gaussian g: the eps-truncated integral approaches its limit linearly,
        // and the leading term -π/2 eps Δg(x) is removed by extrapolation
        let g = |x: &[f64]| (-(x[0] * x[0] + x[1] * x[1])).exp();
        let x = [0.2, -0.1];
        let gx = g(&x);
        let pairs: Vec<[f64; 2]> = (0..64).map(|k| {
            let a = PI * (k as f64 + 0.5) / 64.0;
            [a.cos(), a.sin()]
        }).collect();
        let value = |eps: f64| {
            let (r, w) = dyadic_panels(eps, 6.0, 12);
            truncated(&g, &x, gx, &pairs, &r, &w)
        };
        let (a, b, c) = (value(0.04), value(0.02), value(0.01));
        let rate = ((a - b) / (b - c)).log2();
        assert!(rate > 0.9, "rate {rate}");
        let laplacian = (4.0 * (x[0] * x[0] + x[1] * x[1]) - 4.0) * gx;
        let slope = (b - c) / 0.01;
        assert!((slope - PI / 2.0 * laplacian).abs() < 1e-3 * laplacian.abs(), "{slope}");
    }

    #[test]
    fn zero_data_and_parameter_checks() {
        let grid = make_grid(&GridSpec::default_for(2).unwrap().scaled(1, 4)).unwrap();
        let zero = SliceData::zeros(grid.clone());
        let opts = HypersingularOptions { cartesian_nodes: 49, angle_pairs: 8, ..Default::default() };
        let f = invert_hypersingular(&zero, &opts).unwrap();
        assert!(f.values().iter().all(|v| *v == 0.0));
        assert!(invert_hypersingular(&zero, &HypersingularOptions { ell: 2, ..opts.clone() }).is_err());
        assert!(invert_hypersingular(&zero, &HypersingularOptions { eps: Some(5.0), ..opts.clone() }).is_err());
        let g3 = make_grid(&GridSpec::default_for(3).unwrap().scaled(1, 4)).unwrap();
        assert!(invert_hypersingular(&SliceData::zeros(g3), &opts).is_err());
    }
}

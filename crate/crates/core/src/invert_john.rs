//! Reconstruction by John's method: the dual Radon transform of
//! Φ = (1 - t²)^{-1/2} V₊f on a padded Cartesian grid, followed by the
//! Laplacian. Odd n uses R*Φ directly, even n uses R*LΦ.

use serde::{Deserialize, Serialize};

use crate::cartesian::CartesianGrid;
use crate::error::{Error, Result};
use crate::grid::{SliceData, SphereFunction};
use crate::profile::UniformProfiles;
use crate::specfun::FormulaConstants;
use crate::xform::{backproject_uniform, slice_profiles, t_weighted};

/// Constant used with the even-n formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvenNormalization {
    /// -1/(2π) at n = 2, from the logarithmic potential.
    #[default]
    LogPotential,
    /// ĉ_n = π^{(1-n)/2} / (2^{n-1} Γ(n/2)).
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohnOptions {
    /// Cartesian nodes across [-1.1, 1.1] per axis.
    pub cartesian_nodes: usize,
    /// Uniform resampling of each t-profile before backprojection.
    pub profile_nodes: usize,
    #[serde(default)]
    pub even_normalization: EvenNormalization,
}

impl JohnOptions {
    pub fn default_for(n: usize) -> Self {
        let cartesian_nodes = if n == 2 { 193 } else { 81 };
        Self { cartesian_nodes, profile_nodes: 2049, even_normalization: EvenNormalization::default() }
    }

    /// Cartesian resolution scaled by num/den, keeping an odd node count.
    pub fn scaled(&self, num: usize, den: usize) -> Self {
        let nodes = ((self.cartesian_nodes - 1) * num / den).max(8);
        Self { cartesian_nodes: nodes + 1, ..self.clone() }
    }
}

fn weighted_profiles(data: &SliceData, count: usize) -> UniformProfiles {
    UniformProfiles::from_table(&slice_profiles(&t_weighted(data, -0.5)), count)
}

/// f = c₃ |x₄| (-Δ) R*Φ for n = 3.
pub fn invert_odd(data: &SliceData, options: &JohnOptions) -> Result<SphereFunction> {
    let grid = data.grid();
    if grid.n() != 3 {
        return Err(Error::Parameter(format!("odd John inversion needs n = 3 (got {})", grid.n())));
    }
    let cart = CartesianGrid::new(3, options.cartesian_nodes)?;
    let profiles = weighted_profiles(data, options.profile_nodes);
    let g = backproject_uniform(&profiles, grid, &cart, cart.sampling_radius());
    let c = FormulaConstants::new(3)?.c_n();
    cart.laplacian_on_sphere(&g, grid, -c)
}

/// f = κ |x₃| (-Δ) R*LΦ for n = 2, κ chosen by `options.even_normalization`.
pub fn invert_even(data: &SliceData, options: &JohnOptions) -> Result<SphereFunction> {
    let grid = data.grid();
    if grid.n() != 2 {
        return Err(Error::Parameter(format!("even John inversion needs n = 2 (got {})", grid.n())));
    }
    let cart = CartesianGrid::new(2, options.cartesian_nodes)?;
    let table = slice_profiles(&t_weighted(data, -0.5));
    // LΦ is needed for |s| up to the sampling radius
    let reach = cart.sampling_radius() + 2.0 * cart.step();
    let log_profiles =
        UniformProfiles::from_fn(table.rows(), (-reach, reach), options.profile_nodes, |row, s| table.log_moment(row, s));
    let g = backproject_uniform(&log_profiles, grid, &cart, cart.sampling_radius());
    let fc = FormulaConstants::new(2)?;
    let kappa = match options.even_normalization {
        EvenNormalization::LogPotential => fc.c_hat_log_potential()?,
        EvenNormalization::ClosedForm => fc.c_hat(),
    };
    cart.laplacian_on_sphere(&g, grid, -kappa)
}

/// Dispatches on the parity of n.
pub fn invert(data: &SliceData, options: &JohnOptions) -> Result<SphereFunction> {
    match data.grid().n() {
        2 => invert_even(data, options),
        3 => invert_odd(data, options),
        n => Err(Error::Parameter(format!("John inversion is provided for n = 2, 3 (got {n})"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{inner_product_hemisphere, make_grid, GridSpec, SphereField};
    use crate::xform::vslice_forward;

    fn bump(xp: &[f64], height: f64) -> f64 {
        // smooth bump about a point at polar angle 0.6
        let c = [0.6f64.sin(), 0.0, 0.0];
        let mut d2 = (height - 0.6f64.cos()).powi(2);
        for (k, v) in xp.iter().enumerate() {
            d2 += (v - c[k]).powi(2);
        }
        let w2 = 0.5;
        if d2 >= w2 {
            0.0
        } else {
            (-1.0 / (1.0 - d2 / w2)).exp()
        }
    }

    fn rel_err(truth: &SphereFunction, rec: &SphereFunction, lambda: f64) -> f64 {
        let diff = rec.combine(1.0, truth, -1.0).unwrap();
        (inner_product_hemisphere(&diff, &diff, lambda).unwrap() / inner_product_hemisphere(truth, truth, lambda).unwrap())
            .sqrt()
    }

    fn small(n: usize) -> std::sync::Arc<crate::grid::Grid> {
        make_grid(&GridSpec::default_for(n).unwrap().scaled(1, 2)).unwrap()
    }

    #[test]
    fn zero_data_gives_zero() {
        for n in [2, 3] {
            let grid = small(n);
            let zero = SliceData::zeros(grid.clone());
            let opts = JohnOptions::default_for(n).scaled(1, 2);
            let f = invert(&zero, &opts).unwrap();
            assert!(f.values().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let zero = SliceData::zeros(small(2));
        assert!(invert_odd(&zero, &JohnOptions::default_for(3)).is_err());
    }

    #[test]
    fn even_round_trip_small() {
        let grid = small(2);
        let data = vslice_forward(&bump, &grid);
        let rec = invert_even(&data, &JohnOptions::default_for(2).scaled(1, 2)).unwrap();
        let truth = SphereFunction::sample(grid.clone(), &bump as &dyn SphereField);
        let err = rel_err(&truth, &rec, grid.lambda());
        assert!(err < 0.05, "relative error {err}");
    }
}

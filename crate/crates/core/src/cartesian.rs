//! Padded uniform Cartesian grids on [-1.1, 1.1]^n, the second-order
//! Laplacian and tensor cubic interpolation.

use std::sync::Arc;

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid, SphereFunction};

/// Nominal half-width of the reconstruction box.
pub const HALF_WIDTH: f64 = 1.1;
/// Extra nodes on each side beyond the nominal box.
pub const PAD: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct CartesianGrid {
    dim: usize,
    count: usize,
    step: f64,
    origin: f64,
}

impl CartesianGrid {
    /// `nominal` nodes across [-1.1, 1.1], plus `PAD` on each side.
    pub fn new(dim: usize, nominal: usize) -> Result<Self> {
        if !(2..=4).contains(&dim) || nominal < 8 {
            return Err(Error::Parameter(format!("Cartesian grid needs n in 2..=4 and >= 8 nodes (n={dim}, nodes={nominal})")));
        }
        let step = 2.0 * HALF_WIDTH / (nominal - 1) as f64;
        Ok(Self { dim, count: nominal + 2 * PAD, step, origin: -HALF_WIDTH - PAD as f64 * step })
    }

    /// Grid with spacing `step` whose nominal part covers [-half_width, half_width].
    pub fn covering(dim: usize, half_width: f64, step: f64) -> Result<Self> {
        if !(2..=4).contains(&dim) || !(step > 0.0) || !(half_width >= 4.0 * step) {
            return Err(Error::Parameter(format!("invalid Cartesian cover (n={dim}, half width {half_width}, step {step})")));
        }
        let half = (half_width / step).ceil() as usize;
        Ok(Self { dim, count: 2 * (half + PAD) + 1, step, origin: -((half + PAD) as f64) * step })
    }

    /// Largest |x_k| at which [`Self::interpolate`] uses a centred stencil.
    pub fn interior_half_width(&self) -> f64 {
        -self.origin - 2.0 * self.step
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn len(&self) -> usize {
        self.count.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, k: usize) -> f64 {
        self.origin + k as f64 * self.step
    }

    fn unravel(&self, mut idx: usize, out: &mut [usize]) {
        for o in out.iter_mut() {
            *o = idx % self.count;
            idx /= self.count;
        }
    }

    fn stride(&self, axis: usize) -> usize {
        self.count.pow(axis as u32)
    }

    /// Point of flat index `idx`.
    pub fn point(&self, idx: usize, out: &mut [f64]) {
        let mut k = [0usize; 4];
        self.unravel(idx, &mut k[..self.dim]);
        for (o, &ki) in out.iter_mut().zip(&k[..self.dim]) {
            *o = self.coord(ki);
        }
    }

    /// Evaluates `field` at every node with |x| <= radius; NaN elsewhere.
    pub fn sample<F>(&self, radius: f64, field: F) -> Vec<f64>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let dim = self.dim;
        (0..self.len())
            .into_par_iter()
            .with_min_len(256)
            .map(|idx| {
                let mut x = [0.0; 4];
                self.point(idx, &mut x[..dim]);
                let r2: f64 = x[..dim].iter().map(|v| v * v).sum();
                if r2 <= radius * radius {
                    field(&x[..dim])
                } else {
                    f64::NAN
                }
            })
            .collect()
    }

    /// Radius within which [`Self::laplacian`] is finite when `values` were
    /// sampled with radius `r`.
    pub fn laplacian_radius(&self, sampled_radius: f64) -> f64 {
        sampled_radius - self.step
    }

    /// Second-order (2n+1)-point Laplacian; NaN where a neighbour is missing.
    pub fn laplacian(&self, values: &[f64]) -> Vec<f64> {
        let dim = self.dim;
        let inv_h2 = 1.0 / (self.step * self.step);
        (0..self.len())
            .into_par_iter()
            .with_min_len(256)
            .map(|idx| {
                let mut k = [0usize; 4];
                self.unravel(idx, &mut k[..dim]);
                let centre = values[idx];
                if centre.is_nan() {
                    return f64::NAN;
                }
                let mut acc = -2.0 * dim as f64 * centre;
                for (axis, &ka) in k[..dim].iter().enumerate() {
                    if ka == 0 || ka + 1 == self.count {
                        return f64::NAN;
                    }
                    let s = self.stride(axis);
                    acc += values[idx - s] + values[idx + s];
                }
                acc * inv_h2
            })
            .collect()
    }

    /// Radius used when sampling fields whose Laplacian is read back inside
    /// the unit ball.
    pub fn sampling_radius(&self) -> f64 {
        1.0 + PAD as f64 * self.step
    }

    /// f(x', z) = z · scale · (Δg)(x') at the ball nodes of `grid`, where `g`
    /// was sampled on this grid with [`Self::sampling_radius`].
    pub fn laplacian_on_sphere(&self, g: &[f64], grid: &Arc<Grid>, scale: f64) -> Result<SphereFunction> {
        if grid.n() != self.dim {
            return Err(Error::SpecMismatch("Cartesian and spherical grids differ in dimension"));
        }
        let lap = self.laplacian(g);
        let (rows, cols) = (grid.n_dirs(), grid.radii().len());
        let flat: Vec<f64> = (0..rows * cols)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / cols, idx % cols);
                let mut x = [0.0; 4];
                grid.ball_point(i, j, &mut x[..self.dim]);
                grid.height(j) * scale * self.interpolate(&lap, &x[..self.dim])
            })
            .collect();
        if flat.iter().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate("Laplacian is undefined at some ball node".into()));
        }
        SphereFunction::new(grid.clone(), Array2::from_shape_vec((rows, cols), flat).expect("shape"))
    }

    /// Tensor cubic Lagrange interpolation at `x` (4 nodes per axis).
    pub fn interpolate(&self, values: &[f64], x: &[f64]) -> f64 {
        let dim = self.dim;
        let mut base = [0usize; 4];
        let mut w = [[0.0f64; 4]; 4];
        for axis in 0..dim {
            let u = (x[axis] - self.origin) / self.step;
            let k = (u.floor() as isize - 1).clamp(0, self.count as isize - 4) as usize;
            base[axis] = k;
            let s = u - k as f64; // in [1, 2) for interior points
            w[axis] = [
                -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0,
                s * (s - 2.0) * (s - 3.0) / 2.0,
                -s * (s - 1.0) * (s - 3.0) / 2.0,
                s * (s - 1.0) * (s - 2.0) / 6.0,
            ];
        }
        let mut total = 0.0;
        let corners = 4usize.pow(dim as u32);
        for c in 0..corners {
            let mut idx = 0;
            let mut weight = 1.0;
            let mut rem = c;
            for axis in 0..dim {
                let o = rem % 4;
                rem /= 4;
                idx += (base[axis] + o) * self.stride(axis);
                weight *= w[axis][o];
            }
            total += weight * values[idx];
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_laplacian_error(dim: usize, nominal: usize) -> f64 {
        let grid = CartesianGrid::new(dim, nominal).unwrap();
        let u = grid.sample(1.2, |x| (-x.iter().map(|v| v * v).sum::<f64>()).exp());
        let lap = grid.laplacian(&u);
        let mut worst = 0.0f64;
        for idx in 0..grid.len() {
            let mut x = [0.0; 4];
            grid.point(idx, &mut x[..dim]);
            let r2: f64 = x[..dim].iter().map(|v| v * v).sum();
            if r2 <= 1.0 {
                // density -Δu of the potential u = exp(-|x|²)
                let density = (2.0 * dim as f64 - 4.0 * r2) * (-r2).exp();
                worst = worst.max((-lap[idx] - density).abs());
            }
        }
        worst
    }

    #[test]
    fn laplacian_is_second_order() {
        for (dim, coarse) in [(2usize, 33usize), (3, 17)] {
            let e1 = gaussian_laplacian_error(dim, coarse);
            let e2 = gaussian_laplacian_error(dim, 2 * coarse - 1);
            let eoc = (e1 / e2).log2();
            assert!((1.7..=2.3).contains(&eoc), "dim {dim} eoc {eoc}");
        }
    }

    #[test]
    fn interpolation_is_exact_for_cubics() {
        let grid = CartesianGrid::new(2, 23).unwrap();
        let f = |x: &[f64]| 1.0 + x[0] - 2.0 * x[1] * x[1] * x[0] + 0.5 * x[1].powi(3) * x[0].powi(3);
        let vals = grid.sample(2.0, f);
        for p in [[0.13, -0.71], [0.0, 0.0], [-0.99, 0.05], [0.5, 0.5]] {
            assert!((grid.interpolate(&vals, &p) - f(&p)).abs() < 1e-12);
        }
    }

    #[test]
    fn nan_outside_sampled_ball() {
        let grid = CartesianGrid::new(3, 9).unwrap();
        let vals = grid.sample(1.0, |_| 1.0);
        let lap = grid.laplacian(&vals);
        let mut x = [0.0; 3];
        for idx in 0..grid.len() {
            grid.point(idx, &mut x);
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            if r <= grid.laplacian_radius(1.0) {
                assert_eq!(lap[idx], 0.0);
            }
            if r > 1.0 {
                assert!(lap[idx].is_nan());
            }
        }
    }
}

//! Forward and dual operators: V₊, the Radon transform on the ball, the
//! dual transform R*, the logarithmic convolution L and spherical means.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::rc::Rc;
use std::sync::Arc;

use ndarray::Array2;
use rayon::prelude::*;

use crate::cartesian::CartesianGrid;
use crate::error::{Error, Result};
use crate::grid::{BallField, Grid, SliceData, SphereField};
use crate::profile::{ChebSeries, ProfileTable, SplineBasis, UniformProfiles};
use crate::quadrature::{gauss_chebyshev, gauss_legendre, SphereRule};
use crate::specfun::sphere_area;

/// Quadrature over one hyperplane section {x'·θ = t} ∩ B_n.
///
/// The section is a disk of radius r = (1 - t²)^{1/2}; with y = r sin β ω
/// the factor (r² - |y|²)^{1/2} becomes r cos β, so lifted functions
/// f/x_{n+1} are integrated without a boundary singularity.
#[derive(Debug, Clone)]
pub struct SectionRule {
    dim: usize,
    beta: Vec<f64>,
    beta_weights: Vec<f64>,
    // directions ω in the section, expressed in an orthonormal frame of θ⊥
    omega: SphereRuleOrPair,
}

#[derive(Debug, Clone)]
enum SphereRuleOrPair {
    Pair,
    Rule(SphereRule),
}

impl SectionRule {
    pub fn new(dim: usize, n_beta: usize, n_omega: usize) -> Result<Self> {
        if !(2..=4).contains(&dim) {
            return Err(Error::Parameter(format!("section rule for n = {dim} is not supported")));
        }
        let (x, w) = gauss_legendre(n_beta);
        let (lo, hi) = if dim == 2 { (-PI / 2.0, PI / 2.0) } else { (0.0, PI / 2.0) };
        let half = 0.5 * (hi - lo);
        let beta = x.iter().map(|xi| lo + half * (xi + 1.0)).collect();
        let beta_weights = w.iter().map(|wi| wi * half).collect();
        let omega = if dim == 2 {
            SphereRuleOrPair::Pair
        } else if dim == 3 {
            SphereRuleOrPair::Rule(SphereRule::new(2, n_omega))
        } else {
            SphereRuleOrPair::Rule(SphereRule::new(dim - 1, n_omega))
        };
        Ok(Self { dim, beta, beta_weights, omega })
    }

    pub fn default_for(dim: usize) -> Self {
        match dim {
            2 => Self::new(2, 256, 0),
            3 => Self::new(3, 24, 48),
            _ => Self::new(dim, 16, 12),
        }
        .expect("supported dimension")
    }

    /// Σ over section nodes of w·g(x', h) with h = r cos β the height of
    /// the hemisphere point above x'; the weights carry ρ^{n-2} dρ dω / h.
    fn integrate<G: Fn(&[f64], f64) -> f64>(&self, theta: &[f64], t: f64, g: G) -> f64 {
        let dim = self.dim;
        let r = (1.0 - t * t).sqrt();
        let frame = orthonormal_complement(theta);
        let mut x = [0.0; 4];
        let mut total = 0.0;
        for (&b, &wb) in self.beta.iter().zip(&self.beta_weights) {
            let (sb, cb) = b.sin_cos();
            let rho = r * sb;
            let height = r * cb;
            // ρ^{n-2} dρ / (r cos β) = (r sin β)^{n-2} dβ
            let jac = rho.powi(dim as i32 - 2) * wb;
            match &self.omega {
                SphereRuleOrPair::Pair => {
                    for k in 0..dim {
                        x[k] = t * theta[k] + rho * frame[0][k];
                    }
                    total += jac * g(&x[..dim], height);
                }
                SphereRuleOrPair::Rule(rule) => {
                    let mut acc = 0.0;
                    for (om, wo) in rule.iter() {
                        for k in 0..dim {
                            let mut v = t * theta[k];
                            for (c, e) in om.iter().zip(frame.iter()) {
                                v += rho * c * e[k];
                            }
                            x[k] = v;
                        }
                        acc += wo * g(&x[..dim], height);
                    }
                    total += jac * acc;
                }
            }
        }
        total
    }

    /// ∫_{x'·θ = t} φ dx' over the section inside the ball; 0 for |t| >= 1.
    pub fn radon<F: BallField + ?Sized>(&self, phi: &F, theta: &[f64], t: f64) -> f64 {
        if t.abs() >= 1.0 {
            return 0.0;
        }
        self.integrate(theta, t, |x, h| phi.value(x) * h)
    }

    /// (R lift f)(θ, t), with the height of each node supplied to f directly
    /// instead of being recomputed from x'.
    pub fn radon_lifted<F: SphereField + ?Sized>(&self, f: &F, theta: &[f64], t: f64) -> f64 {
        if t.abs() >= 1.0 {
            return 0.0;
        }
        self.integrate(theta, t, |x, h| f.value(x, h))
    }
}

/// Orthonormal basis of θ⊥ (n - 1 vectors of length n, padded to 4).
pub fn orthonormal_complement(theta: &[f64]) -> [[f64; 4]; 3] {
    let dim = theta.len();
    let mut out = [[0.0; 4]; 3];
    let mut count = 0;
    for axis in 0..dim {
        if count == dim - 1 {
            break;
        }
        let mut v = [0.0; 4];
        v[axis] = 1.0;
        // Gram-Schmidt against θ and previous vectors, twice for stability
        for _ in 0..2 {
            let d: f64 = (0..dim).map(|k| v[k] * theta[k]).sum();
            for k in 0..dim {
                v[k] -= d * theta[k];
            }
            for prev in out.iter().take(count) {
                let d: f64 = (0..dim).map(|k| v[k] * prev[k]).sum();
                for k in 0..dim {
                    v[k] -= d * prev[k];
                }
            }
        }
        let norm = (0..dim).map(|k| v[k] * v[k]).sum::<f64>().sqrt();
        if norm > 0.5 {
            for k in 0..dim {
                v[k] /= norm;
            }
            out[count] = v;
            count += 1;
        }
    }
    if dim == 2 {
        // fixed orientation θ⊥ = (-θ_2, θ_1)
        out[0] = [-theta[1], theta[0], 0.0, 0.0];
    }
    out
}

/// (Rφ)(θ, t) with the default section rule.
pub fn radon_ball<F: BallField + ?Sized>(phi: &F, theta: &[f64], t: f64) -> f64 {
    SectionRule::default_for(theta.len()).radon(phi, theta, t)
}

fn check_direction(theta: &[f64]) -> Result<()> {
    let norm = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(2..=3).contains(&theta.len()) || (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("θ must be a unit vector in R^2 or R^3 (|θ| = {norm})")));
    }
    Ok(())
}

thread_local! {
    static DIRECT_NODES: RefCell<Option<(usize, Rc<Vec<(f64, f64)>>)>> = const { RefCell::new(None) };
}

// two Gauss–Legendre panels on [0, π], cached per thread
fn direct_nodes(resolution: usize) -> Rc<Vec<(f64, f64)>> {
    DIRECT_NODES.with(|cell| {
        let mut cached = cell.borrow_mut();
        if let Some((res, nodes)) = cached.as_ref() {
            if *res == resolution {
                return nodes.clone();
            }
        }
        let (x, w) = gauss_legendre(resolution);
        let nodes: Rc<Vec<(f64, f64)>> = Rc::new(
            [0.0, PI / 2.0]
                .iter()
                .flat_map(|&lo| x.iter().zip(&w).map(move |(xi, wi)| (lo + PI / 4.0 * (xi + 1.0), wi * PI / 4.0)))
                .collect(),
        );
        *cached = Some((resolution, nodes.clone()));
        nodes
    })
}

/// (V₊f)(θ, t) by direct quadrature over the slice S^n_+ ∩ {x'·θ = t}.
///
/// The slice is a half-circle (n = 2) or half-sphere (n = 3) of radius r.
/// It is parametrized by angles about a horizontal axis, independently of
/// the ball chart used by [`vslice_forward`]. `resolution` is the number
/// of Gauss–Legendre nodes per panel.
pub fn vslice_direct<F: SphereField + ?Sized>(f: &F, theta: &[f64], t: f64, resolution: usize) -> Result<f64> {
    check_direction(theta)?;
    if !(t.abs() < 1.0) {
        return Err(Error::Domain(format!("|t| = {} must be < 1", t.abs())));
    }
    let r = (1.0 - t * t).sqrt();
    let frame = orthonormal_complement(theta);
    let nodes = direct_nodes(resolution);
    let dim = theta.len();
    let mut p = [0.0; 3];
    let mut total = 0.0;
    if dim == 2 {
        for &(alpha, wa) in nodes.iter() {
            let (sa, ca) = alpha.sin_cos();
            for k in 0..2 {
                p[k] = t * theta[k] + r * ca * frame[0][k];
            }
            total += wa * r * f.value(&p[..2], r * sa);
        }
    } else {
        for &(gamma, wg) in nodes.iter() {
            let (sg, cg) = gamma.sin_cos();
            for &(alpha, wa) in nodes.iter() {
                let (sa, ca) = alpha.sin_cos();
                for k in 0..3 {
                    p[k] = t * theta[k] + r * (cg * frame[0][k] + sg * ca * frame[1][k]);
                }
                total += wg * wa * r * r * sg * f.value(&p[..3], r * sg * sa);
            }
        }
    }
    Ok(total)
}

/// F(θ_i, t_j) = (1 - t_j²)^{1/2} (R lift f)(θ_i, t_j) on the slice grid.
pub fn vslice_forward<F: SphereField + ?Sized>(f: &F, grid: &Arc<Grid>) -> SliceData {
    vslice_forward_with(f, grid, &SectionRule::default_for(grid.n()))
}

pub fn vslice_forward_with<F: SphereField + ?Sized>(f: &F, grid: &Arc<Grid>, rule: &SectionRule) -> SliceData {
    let dirs = grid.directions();
    let t_nodes = grid.t_nodes();
    let nt = t_nodes.len();
    // F(-θ, -t) = F(θ, t): compute one representative per antipodal pair
    let rows: Vec<Option<Vec<f64>>> = (0..grid.n_dirs())
        .into_par_iter()
        .map(|i| {
            if grid.antipode(i) < i {
                return None;
            }
            let theta = dirs.point(i);
            Some(t_nodes.iter().map(|&t| (1.0 - t * t).sqrt() * rule.radon_lifted(f, theta, t)).collect())
        })
        .collect();
    let mut values = Array2::zeros((grid.n_dirs(), nt));
    for (i, row) in rows.iter().enumerate() {
        if let Some(row) = row {
            let ia = grid.antipode(i);
            for j in 0..nt {
                values[[i, j]] = row[j];
                values[[ia, nt - 1 - j]] = row[j];
            }
        }
    }
    SliceData::new(grid.clone(), values).expect("forward values are finite")
}

/// Full transform V = 2V₊ for functions even in x_{n+1}.
pub fn vslice_full<F: SphereField + ?Sized>(f: &F, grid: &Arc<Grid>) -> SliceData {
    vslice_forward(f, grid).scaled(2.0)
}

/// Multiplies every row by (1 - t²)^{power}.
pub fn t_weighted(data: &SliceData, power: f64) -> SliceData {
    let grid = data.grid().clone();
    let mut values = data.values().clone();
    for (j, mut col) in values.columns_mut().into_iter().enumerate() {
        let t = grid.t_nodes()[j];
        col *= (1.0 - t * t).powf(power);
    }
    SliceData::new(grid, values).expect("finite")
}

/// Cubic-spline profiles of slice data in t, zero for |t| >= 1.
pub fn slice_profiles(data: &SliceData) -> ProfileTable {
    let basis = SplineBasis::new(data.grid().t_nodes().to_vec()).expect("t nodes are increasing");
    let flat: Vec<f64> = data.values().iter().copied().collect();
    ProfileTable::new(Arc::new(basis), &flat, (-1.0, 1.0))
}

/// (1/σ_{n-1}) Σ_i ω_i P_i(θ_i·x) for profiles indexed like the grid directions.
pub fn backproject_profiles(profiles: &ProfileTable, dirs: &SphereRule, x: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, (theta, w)) in dirs.iter().enumerate() {
        let t: f64 = theta.iter().zip(x).map(|(a, b)| a * b).sum();
        total += w * profiles.eval(i, t);
    }
    total / sphere_area(dirs.dim())
}

/// (R*F)(x') = (1/σ_{n-1}) ∫ F(θ, x'·θ) dθ with spline interpolation in t.
pub fn dual_radon(data: &SliceData, xprime: &[f64]) -> f64 {
    backproject_profiles(&slice_profiles(data), data.grid().directions(), xprime)
}

/// Backprojection of `profiles` onto the Cartesian nodes with |x| <= radius.
pub fn backproject_cartesian(profiles: &ProfileTable, dirs: &SphereRule, cart: &CartesianGrid, radius: f64) -> Vec<f64> {
    cart.sample(radius, |x| backproject_profiles(profiles, dirs, x))
}

/// Backprojection of uniformly resampled profiles (one row per grid
/// direction) onto the Cartesian nodes with |x| <= radius, normalized by
/// σ_{n-1}. On a symmetric support the rows of θ and -θ are first merged
/// into P_θ(t) + P_{-θ}(-t), which halves the work.
pub fn backproject_uniform(profiles: &UniformProfiles, grid: &Grid, cart: &CartesianGrid, radius: f64) -> Vec<f64> {
    let dirs = grid.directions();
    let dim = dirs.dim();
    let area = sphere_area(dim);
    let (lo, hi) = profiles.support();
    let symmetric = (lo + hi).abs() <= 1e-14 * hi.abs();
    let (rows, folded): (Vec<usize>, Option<UniformProfiles>) = if symmetric {
        let keep: Vec<usize> = (0..grid.n_dirs()).filter(|&i| grid.antipode(i) > i).collect();
        let pairs: Vec<(usize, usize)> = keep.iter().map(|&i| (i, grid.antipode(i))).collect();
        (keep, Some(profiles.folded(&pairs)))
    } else {
        ((0..grid.n_dirs()).collect(), None)
    };
    let table = folded.as_ref().unwrap_or(profiles);
    let points: Vec<f64> = rows.iter().flat_map(|&i| dirs.point(i).to_vec()).collect();
    let weights: Vec<f64> = rows.iter().map(|&i| dirs.weight(i)).collect();
    cart.sample(radius, |x| {
        let mut total = 0.0;
        for (k, (theta, w)) in points.chunks_exact(dim).zip(&weights).enumerate() {
            let t: f64 = theta.iter().zip(x).map(|(a, b)| a * b).sum();
            total += w * table.eval(k, t);
        }
        total / area
    })
}

/// (LF)(θ, s) = ∫_{-1}^{1} log|s - t| F(θ, t) dt at arbitrary s, row-major.
pub fn log_convolve_at(data: &SliceData, s_nodes: &[f64]) -> Array2<f64> {
    let profiles = slice_profiles(data);
    let rows = data.grid().n_dirs();
    let flat: Vec<f64> = (0..rows)
        .into_par_iter()
        .flat_map_iter(|i| {
            let profiles = &profiles;
            s_nodes.iter().map(move |&s| profiles.log_moment(i, s))
        })
        .collect();
    Array2::from_shape_vec((rows, s_nodes.len()), flat).expect("shape")
}

/// L applied row by row, sampled back on the t nodes.
pub fn log_convolve(data: &SliceData) -> SliceData {
    let values = log_convolve_at(data, data.grid().t_nodes());
    SliceData::new(data.grid().clone(), values).expect("finite")
}

/// (Mf)(θ, t) = (Vf)(θ, t) (1 - t²)^{(1-n)/2} / σ_{n-1}.
pub fn spherical_mean<F: SphereField + ?Sized>(f: &F, theta: &[f64], t: f64) -> Result<f64> {
    check_direction(theta)?;
    if !(t.abs() < 1.0) {
        return Err(Error::Domain(format!("|t| = {} must be < 1", t.abs())));
    }
    let n = theta.len();
    let full = 2.0 * (1.0 - t * t).sqrt() * SectionRule::default_for(n).radon_lifted(f, theta, t);
    Ok(full * (1.0 - t * t).powf((1.0 - n as f64) / 2.0) / sphere_area(n))
}

/// (1/π) ∫_{-1}^{1} log|t| (1 - t²)^{-1/2} dt by `count`-point Gauss–Chebyshev.
///
/// The rule's error is exactly log(2)/count for even count.
pub fn log2_identity(count: usize) -> f64 {
    let (t, _) = gauss_chebyshev(count);
    // plain Gauss–Chebyshev weights π/N for the weight (1 - t²)^{-1/2}
    t.iter().map(|ti| ti.abs().ln()).sum::<f64>() / count as f64
}

/// (N_*f)(θ, t) = ∫_{S²} f(y) log|θ·y - t| dσ(y) from full slice data V f,
/// using N_*f = ∫ (Vf)(θ, s) (1 - s²)^{-1/2} log|s - t| ds. n = 2 only.
pub fn n_star(full: &SliceData, t: &[f64]) -> Result<Array2<f64>> {
    if full.grid().n() != 2 {
        return Err(Error::Parameter("N_* is defined for n = 2".into()));
    }
    let nodes = full.grid().t_nodes();
    let rows = full.grid().n_dirs();
    let mut out = Array2::zeros((rows, t.len()));
    for i in 0..rows {
        let row: Vec<f64> = full.values().row(i).to_vec();
        let series = ChebSeries::fit(nodes, &row);
        for (j, &s) in t.iter().enumerate() {
            out[[i, j]] = series.log_kernel(s);
        }
    }
    Ok(out)
}

/// (P_*F)(x) = (1/2π) ∫_{S¹} F(θ, θ·x) dσ(θ); identical to R* in the ball chart.
pub fn p_star(data: &SliceData, x: &[f64]) -> Result<f64> {
    if data.grid().n() != 2 {
        return Err(Error::Parameter("P_* is defined for n = 2".into()));
    }
    Ok(dual_radon(data, &x[..2]))
}


#[cfg(test)]
mod props {
    use super::*;
    use crate::grid::{make_grid, GridSpec, RadialRule, TRule};
    use proptest::prelude::*;

    fn grid() -> Arc<Grid> {
        make_grid(&GridSpec {
            n: 2,
            n_angular: 12,
            n_radial: 6,
            n_t: 16,
            radial_rule: RadialRule::GaussJacobi,
            t_rule: TRule::Chebyshev,
            lambda: None,
        })
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn forward_is_linear_and_even(a in -2.0f64..2.0, b in -2.0f64..2.0, c in [-1.0f64..1.0, -1.0..1.0, -1.0..1.0]) {
            let g = grid();
            let f1 = move |xp: &[f64], z: f64| (c[0] * xp[0] + c[1] * xp[1] * xp[1] + c[2]) * z;
            let f2 = |xp: &[f64], z: f64| (xp[0] - 0.3 * xp[1]).cos() * z * z;
            let sum = move |xp: &[f64], z: f64| a * f1(xp, z) + b * f2(xp, z);
            let lhs = vslice_forward(&sum, &g);
            let rhs = vslice_forward(&f1, &g).values() * a + vslice_forward(&f2, &g).values() * b;
            for (x, y) in lhs.values().iter().zip(rhs.iter()) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
            }
            prop_assert_eq!(lhs.evenness_defect(), 0.0);
        }
    }
}

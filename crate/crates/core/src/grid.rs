//! Grids on the hemisphere (through its ball chart) and on the slice space,
//! sampled functions, the lift/project maps and weighted inner products.

use std::sync::Arc;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_chebyshev, gauss_legendre, radial_gauss_jacobi, radial_uniform, SphereRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialRule {
    GaussJacobi,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TRule {
    GaussLegendre,
    Chebyshev,
}

/// Declarative grid description.
///
/// `n_angular` is the number of points on S^1 for n = 2; for n >= 3 it is
/// the number of polar nodes per level of the product rule (the azimuthal
/// circle then carries `2 n_angular` points).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub n_angular: usize,
    pub n_radial: usize,
    pub n_t: usize,
    pub radial_rule: RadialRule,
    pub t_rule: TRule,
    /// Weight parameter λ; `None` means λ = n/2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

impl GridSpec {
    pub fn default_for(n: usize) -> Result<Self> {
        // Gauss–Chebyshev in t integrates the λ = 1 slice weight exactly,
        // Gauss–Legendre the λ = 3/2 one
        let (n_angular, n_radial, n_t, t_rule) = match n {
            2 => (256, 96, 128, TRule::Chebyshev),
            3 => (32, 48, 64, TRule::GaussLegendre),
            _ => return Err(Error::InvalidSpec(format!("no default grid for n = {n}"))),
        };
        Ok(Self {
            n,
            n_angular,
            n_radial,
            n_t,
            radial_rule: RadialRule::GaussJacobi,
            t_rule,
            lambda: None,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda.unwrap_or(self.n as f64 / 2.0)
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    /// Same rules with every node count multiplied by `num / den`
    /// (rounded to even counts).
    pub fn scaled(&self, num: usize, den: usize) -> Self {
        let f = |c: usize| (((c * num) / den).div_ceil(2) * 2).max(4);
        Self {
            n_angular: f(self.n_angular),
            n_radial: f(self.n_radial),
            n_t: f(self.n_t),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=4).contains(&self.n) {
            return Err(Error::InvalidSpec(format!("n = {} not in 2..=4", self.n)));
        }
        for (name, c) in [("n_angular", self.n_angular), ("n_radial", self.n_radial), ("n_t", self.n_t)] {
            if c < 4 {
                return Err(Error::InvalidSpec(format!("{name} = {c} is below the minimum of 4")));
            }
        }
        if self.n == 2 && !self.n_angular.is_multiple_of(2) {
            return Err(Error::InvalidSpec("n_angular must be even so directions come in antipodal pairs".into()));
        }
        let lambda = self.lambda();
        if !(lambda > self.n as f64 / 2.0 - 1.0) || !lambda.is_finite() {
            return Err(Error::InvalidSpec(format!("lambda = {lambda} must exceed n/2 - 1")));
        }
        Ok(())
    }
}

/// Nodes and weights built from a [`GridSpec`]. Immutable; shared by `Arc`.
///
/// Ball nodes are x' = r_j θ_i with θ_i from the sphere rule and r_j from
/// the radial rule; slice nodes are (θ_i, t_j) with the same directions.
#[derive(Debug)]
pub struct Grid {
    spec: GridSpec,
    lambda: f64,
    directions: SphereRule,
    antipodes: Vec<usize>,
    radii: Vec<f64>,
    radial_weights: Vec<f64>,
    t_nodes: Vec<f64>,
    t_weights: Vec<f64>,
}

pub fn make_grid(spec: &GridSpec) -> Result<Arc<Grid>> {
    spec.validate()?;
    let n = spec.n;
    let lambda = spec.lambda();
    let directions = SphereRule::new(n, spec.n_angular);
    let antipodes = directions
        .antipodes()
        .ok_or_else(|| Error::InvalidSpec("direction set is not closed under θ -> -θ".into()))?;
    let (radii, radial_weights) = match spec.radial_rule {
        RadialRule::GaussJacobi => radial_gauss_jacobi(n, spec.n_radial, lambda - n as f64 / 2.0)?,
        RadialRule::Uniform => radial_uniform(n, spec.n_radial),
    };
    let (t_nodes, t_weights) = match spec.t_rule {
        TRule::GaussLegendre => gauss_legendre(spec.n_t),
        TRule::Chebyshev => gauss_chebyshev(spec.n_t),
    };
    Ok(Arc::new(Grid {
        spec: spec.clone(),
        lambda,
        directions,
        antipodes,
        radii,
        radial_weights,
        t_nodes,
        t_weights,
    }))
}

impl Grid {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn directions(&self) -> &SphereRule {
        &self.directions
    }

    pub fn n_dirs(&self) -> usize {
        self.directions.len()
    }

    /// Index of -θ_i.
    pub fn antipode(&self, i: usize) -> usize {
        self.antipodes[i]
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn radial_weights(&self) -> &[f64] {
        &self.radial_weights
    }

    pub fn t_nodes(&self) -> &[f64] {
        &self.t_nodes
    }

    pub fn t_weights(&self) -> &[f64] {
        &self.t_weights
    }

    /// Ball node x' = r_j θ_i written into `out`.
    pub fn ball_point(&self, i: usize, j: usize, out: &mut [f64]) {
        let r = self.radii[j];
        for (o, c) in out.iter_mut().zip(self.directions.point(i)) {
            *o = r * c;
        }
    }

    /// Height x_{n+1} = (1 - r_j²)^{1/2} of the hemisphere node over ball node (·, j).
    pub fn height(&self, j: usize) -> f64 {
        (1.0 - self.radii[j] * self.radii[j]).sqrt()
    }

    /// Plain quadrature weight of ball node (i, j) for dx'.
    pub fn ball_weight(&self, i: usize, j: usize) -> f64 {
        self.directions.weight(i) * self.radial_weights[j]
    }

    fn ball_shape(&self) -> (usize, usize) {
        (self.n_dirs(), self.radii.len())
    }

    fn slice_shape(&self) -> (usize, usize) {
        (self.n_dirs(), self.t_nodes.len())
    }
}

/// A function on the closed upper hemisphere, evaluated at (x', x_{n+1})
/// with x_{n+1} = (1 - |x'|²)^{1/2}. Functions are even in x_{n+1}, so the
/// lower hemisphere is implied.
pub trait SphereField: Sync {
    fn value(&self, xp: &[f64], height: f64) -> f64;
}

/// A function on the unit ball B_n.
pub trait BallField: Sync {
    fn value(&self, xp: &[f64]) -> f64;
}

impl<F: Fn(&[f64], f64) -> f64 + Sync> SphereField for F {
    fn value(&self, xp: &[f64], height: f64) -> f64 {
        self(xp, height)
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> BallField for F {
    fn value(&self, xp: &[f64]) -> f64 {
        self(xp)
    }
}

/// φ(x') = f(x', z)/z, z = (1 - |x'|²)^{1/2}; zero outside the open ball.
pub struct Lifted<'a, F: SphereField + ?Sized>(pub &'a F);

impl<F: SphereField + ?Sized> BallField for Lifted<'_, F> {
    fn value(&self, xp: &[f64]) -> f64 {
        let r2: f64 = xp.iter().map(|v| v * v).sum();
        if r2 >= 1.0 {
            return 0.0;
        }
        let z = (1.0 - r2).sqrt();
        self.0.value(xp, z) / z
    }
}

fn check_values(values: &Array2<f64>, shape: (usize, usize), what: &str) -> Result<()> {
    if values.dim() != shape {
        return Err(Error::Parameter(format!(
            "{what} has shape {:?}, grid expects {:?}",
            values.dim(),
            shape
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("{what} contains non-finite values")));
    }
    Ok(())
}

fn same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a.spec == b.spec {
        Ok(())
    } else {
        Err(Error::SpecMismatch("operands live on different grids"))
    }
}

fn sample_rows<G>(rows: usize, cols: usize, eval: G) -> Array2<f64>
where
    G: Fn(usize, usize) -> f64 + Sync,
{
    let mut data = vec![0.0; rows * cols];
    data.par_chunks_mut(cols).enumerate().for_each(|(i, row)| {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = eval(i, j);
        }
    });
    Array2::from_shape_vec((rows, cols), data).expect("shape matches buffer")
}

macro_rules! sampled_common {
    ($ty:ident, $shape:ident, $label:expr) => {
        impl $ty {
            pub fn new(grid: Arc<Grid>, values: Array2<f64>) -> Result<Self> {
                check_values(&values, grid.$shape(), $label)?;
                Ok(Self { grid, values })
            }

            pub fn zeros(grid: Arc<Grid>) -> Self {
                let values = Array2::zeros(grid.$shape());
                Self { grid, values }
            }

            pub fn grid(&self) -> &Arc<Grid> {
                &self.grid
            }

            pub fn values(&self) -> &Array2<f64> {
                &self.values
            }

            pub fn into_values(self) -> Array2<f64> {
                self.values
            }

            /// a·self + b·other, nodewise.
            pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
                same_grid(&self.grid, &other.grid)?;
                let values = &self.values * a + &other.values * b;
                Ok(Self { grid: self.grid.clone(), values })
            }

            pub fn scaled(&self, a: f64) -> Self {
                Self { grid: self.grid.clone(), values: &self.values * a }
            }
        }
    };
}

/// Samples of f on the hemisphere nodes (r_j θ_i, (1 - r_j²)^{1/2}),
/// indexed (angular, radial).
#[derive(Debug, Clone)]
pub struct SphereFunction {
    grid: Arc<Grid>,
    values: Array2<f64>,
}

/// Samples of φ on the ball nodes r_j θ_i, indexed (angular, radial).
#[derive(Debug, Clone)]
pub struct BallFunction {
    grid: Arc<Grid>,
    values: Array2<f64>,
}

/// Samples F(θ_i, t_j) on the slice space, indexed (direction, t).
#[derive(Debug, Clone)]
pub struct SliceData {
    grid: Arc<Grid>,
    values: Array2<f64>,
}

sampled_common!(SphereFunction, ball_shape, "sphere function");
sampled_common!(BallFunction, ball_shape, "ball function");
sampled_common!(SliceData, slice_shape, "slice data");

impl SphereFunction {
    pub fn sample<F: SphereField + ?Sized>(grid: Arc<Grid>, field: &F) -> Self {
        let n = grid.n();
        let (rows, cols) = grid.ball_shape();
        let values = sample_rows(rows, cols, |i, j| {
            let mut xp = [0.0; 4];
            grid.ball_point(i, j, &mut xp[..n]);
            field.value(&xp[..n], grid.height(j))
        });
        Self { grid, values }
    }
}

impl BallFunction {
    pub fn sample<F: BallField + ?Sized>(grid: Arc<Grid>, field: &F) -> Self {
        let n = grid.n();
        let (rows, cols) = grid.ball_shape();
        let values = sample_rows(rows, cols, |i, j| {
            let mut xp = [0.0; 4];
            grid.ball_point(i, j, &mut xp[..n]);
            field.value(&xp[..n])
        });
        Self { grid, values }
    }
}

impl SliceData {
    /// Samples `field(θ, t)` on every slice node.
    pub fn sample<F>(grid: Arc<Grid>, field: F) -> Self
    where
        F: Fn(&[f64], f64) -> f64 + Sync,
    {
        let (rows, cols) = grid.slice_shape();
        let values = sample_rows(rows, cols, |i, j| field(grid.directions().point(i), grid.t_nodes()[j]));
        Self { grid, values }
    }

    /// max |F(-θ, -t) - F(θ, t)|, relying on t nodes symmetric about 0.
    pub fn evenness_defect(&self) -> f64 {
        let nt = self.grid.t_nodes().len();
        let mut worst = 0.0f64;
        for i in 0..self.grid.n_dirs() {
            let ia = self.grid.antipode(i);
            for j in 0..nt {
                worst = worst.max((self.values[[ia, nt - 1 - j]] - self.values[[i, j]]).abs());
            }
        }
        worst
    }
}

/// φ(x') = f(x', z)/z nodewise.
pub fn lift(f: &SphereFunction) -> BallFunction {
    let grid = f.grid.clone();
    let mut values = f.values.clone();
    for (j, mut col) in values.columns_mut().into_iter().enumerate() {
        col /= grid.height(j);
    }
    BallFunction { grid, values }
}

/// f(x', x_{n+1}) = |x_{n+1}| φ(x') nodewise.
pub fn project(phi: &BallFunction) -> SphereFunction {
    let grid = phi.grid.clone();
    let mut values = phi.values.clone();
    for (j, mut col) in values.columns_mut().into_iter().enumerate() {
        col *= grid.height(j);
    }
    SphereFunction { grid, values }
}

fn ball_sum(grid: &Grid, a: &Array2<f64>, b: &Array2<f64>, radial_factor: impl Fn(usize) -> f64) -> f64 {
    let rw: Vec<f64> = (0..grid.radii.len()).map(|j| grid.radial_weights[j] * radial_factor(j)).collect();
    let mut total = 0.0;
    for i in 0..grid.n_dirs() {
        let mut row = 0.0;
        for (j, w) in rw.iter().enumerate() {
            row += w * a[[i, j]] * b[[i, j]];
        }
        total += grid.directions.weight(i) * row;
    }
    total
}

/// ∫_{B_n} a b W dx' with W(x') = (1 - |x'|²)^{n/2 - λ}.
pub fn inner_product_ball(a: &BallFunction, b: &BallFunction, lambda: f64) -> Result<f64> {
    same_grid(&a.grid, &b.grid)?;
    let grid = &a.grid;
    let e = grid.n() as f64 / 2.0 - lambda;
    Ok(ball_sum(grid, &a.values, &b.values, |j| {
        let r = grid.radii[j];
        (1.0 - r * r).powf(e)
    }))
}

/// ∫_{S^n_+} a b W̃ dσ with W̃(x) = x_{n+1}^{n - 2λ - 1}, evaluated in the
/// ball chart where dσ = dx'/x_{n+1}.
pub fn inner_product_hemisphere(a: &SphereFunction, b: &SphereFunction, lambda: f64) -> Result<f64> {
    same_grid(&a.grid, &b.grid)?;
    let grid = &a.grid;
    let e = grid.n() as f64 - 2.0 * lambda - 2.0;
    Ok(ball_sum(grid, &a.values, &b.values, |j| grid.height(j).powf(e)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceWeight {
    /// w(t) = (1 - t²)^{1/2 - λ}
    W,
    /// w̃(t) = (1 - t²)^{-1/2 - λ}
    WTilde,
}

impl SliceWeight {
    pub fn eval(self, t: f64, lambda: f64) -> f64 {
        let e = match self {
            SliceWeight::W => 0.5 - lambda,
            SliceWeight::WTilde => -0.5 - lambda,
        };
        (1.0 - t * t).powf(e)
    }
}

/// ∫_{S^{n-1}} ∫_{-1}^{1} A B weight(t) dt dθ, unnormalized dθ.
pub fn inner_product_slices(a: &SliceData, b: &SliceData, weight: SliceWeight, lambda: f64) -> Result<f64> {
    same_grid(&a.grid, &b.grid)?;
    let grid = &a.grid;
    if !(lambda > grid.n() as f64 / 2.0 - 1.0) {
        return Err(Error::Parameter(format!("lambda = {lambda} must exceed n/2 - 1")));
    }
    let tw: Vec<f64> = grid
        .t_nodes
        .iter()
        .zip(&grid.t_weights)
        .map(|(&t, &w)| w * weight.eval(t, lambda))
        .collect();
    let mut total = 0.0;
    for i in 0..grid.n_dirs() {
        let mut row = 0.0;
        for (j, w) in tw.iter().enumerate() {
            row += w * a.values[[i, j]] * b.values[[i, j]];
        }
        total += grid.directions.weight(i) * row;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn spec2(n_angular: usize, n_radial: usize, n_t: usize) -> GridSpec {
        GridSpec {
            n: 2,
            n_angular,
            n_radial,
            n_t,
            radial_rule: RadialRule::GaussJacobi,
            t_rule: TRule::GaussLegendre,
            lambda: None,
        }
    }

    #[test]
    fn ball_integrals() {
        let grid = make_grid(&spec2(16, 8, 16)).unwrap();
        let one = BallFunction::sample(grid.clone(), &|_: &[f64]| 1.0);
        assert!((inner_product_ball(&one, &one, 1.0).unwrap() - PI).abs() < 1e-12);
        let r2 = BallFunction::sample(grid.clone(), &|x: &[f64]| x[0] * x[0] + x[1] * x[1]);
        assert!((inner_product_ball(&r2, &one, 1.0).unwrap() - PI / 2.0).abs() < 1e-12);
        let t2: f64 = grid.t_nodes().iter().zip(grid.t_weights()).map(|(t, w)| w * t * t).sum();
        assert!((t2 - 2.0 / 3.0).abs() < 1e-15);
        assert!(grid.t_nodes().iter().all(|t| t.abs() < 1.0));
    }

    #[test]
    fn ball_exactness_n3() {
        let spec = GridSpec { n: 3, n_angular: 8, n_radial: 8, n_t: 8, ..spec2(8, 8, 8) };
        let grid = make_grid(&spec).unwrap();
        let one = BallFunction::sample(grid.clone(), &|_: &[f64]| 1.0);
        let p = BallFunction::sample(grid.clone(), &|x: &[f64]| x[0] * x[0] * x[2] * x[2] + x[1].powi(4) + x[2]);
        // ∫_{B_3} x²z² = 4π/105, ∫ y⁴ = 4π/35
        let want = 4.0 * PI / 105.0 + 4.0 * PI / 35.0;
        assert!((inner_product_ball(&p, &one, 1.5).unwrap() - want).abs() < 1e-13);
        assert!((inner_product_ball(&one, &one, 1.5).unwrap() - 4.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn lift_examples() {
        let grid = make_grid(&spec2(8, 6, 8)).unwrap();
        let f = SphereFunction::sample(grid.clone(), &|_: &[f64], z: f64| z);
        let phi = lift(&f);
        assert!(phi.values().iter().all(|v| (v - 1.0).abs() < 1e-15));
        let f = SphereFunction::sample(grid.clone(), &|_: &[f64], _z: f64| 1.0);
        let phi = lift(&f);
        for j in 0..grid.radii().len() {
            let r = grid.radii()[j];
            assert!((phi.values()[[3, j]] - 1.0 / (1.0 - r * r).sqrt()).abs() < 1e-12);
        }
        let f = SphereFunction::sample(grid.clone(), &|_: &[f64], z: f64| z * z);
        let phi = lift(&f);
        assert!((phi.values()[[0, 2]] - grid.height(2)).abs() < 1e-15);
        let one = BallFunction::sample(grid.clone(), &|_: &[f64]| 1.0);
        assert!(project(&one).values().iter().zip(f.values()).all(|(a, b)| (a * a - b).abs() < 1e-15));
    }

    #[test]
    fn lift_is_an_isometry() {
        let grid = make_grid(&spec2(32, 16, 16)).unwrap();
        let f = SphereFunction::sample(grid.clone(), &|x: &[f64], z: f64| z * (1.0 + x[0]) * (x[1] - 0.3).exp());
        let phi = lift(&f);
        let lhs = inner_product_ball(&phi, &phi, 1.0).unwrap();
        let rhs = inner_product_hemisphere(&f, &f, 1.0).unwrap();
        assert!((lhs - rhs).abs() < 1e-8 * lhs);
        // λ ≠ n/2 exercises both weights
        let lhs = inner_product_ball(&phi, &phi, 0.7).unwrap();
        let rhs = inner_product_hemisphere(&f, &f, 0.7).unwrap();
        assert!((lhs - rhs).abs() < 1e-8 * lhs);
    }

    #[test]
    fn slice_products() {
        let mut spec = spec2(16, 8, 64);
        spec.t_rule = TRule::Chebyshev;
        let grid = make_grid(&spec).unwrap();
        // ζ₀ = d₀ w^{-1} Y₀ = (2/π)^{1/2} (1 - t²)^{1/2} / (2π)^{1/2}
        let zeta0 = SliceData::sample(grid.clone(), |_, t| (1.0 - t * t).sqrt() / PI);
        let g = inner_product_slices(&zeta0, &zeta0, SliceWeight::W, 1.0).unwrap();
        assert!((g - 1.0).abs() < 1e-6);
        let zt0 = SliceData::sample(grid.clone(), |_, t| (1.0 - t * t) / PI);
        let g = inner_product_slices(&zt0, &zt0, SliceWeight::WTilde, 1.0).unwrap();
        assert!((g - 1.0).abs() < 1e-6);
        let two = zt0.scaled(2.0);
        let a = inner_product_slices(&two, &zeta0, SliceWeight::W, 1.0).unwrap();
        let b = inner_product_slices(&zt0, &zeta0, SliceWeight::W, 1.0).unwrap();
        assert_eq!(a, 2.0 * b);
        assert!(inner_product_slices(&zt0, &zt0, SliceWeight::W, 0.0).is_err());
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let g1 = make_grid(&spec2(8, 6, 8)).unwrap();
        let g2 = make_grid(&spec2(8, 6, 10)).unwrap();
        let a = SliceData::zeros(g1);
        let b = SliceData::zeros(g2);
        assert!(matches!(inner_product_slices(&a, &b, SliceWeight::W, 1.0), Err(Error::SpecMismatch(_))));
    }

    #[test]
    fn spec_validation_and_json() {
        assert!(make_grid(&spec2(3, 8, 8)).is_err());
        assert!(make_grid(&spec2(7, 8, 8)).is_err());
        assert!(make_grid(&spec2(8, 8, 8).with_lambda(0.0)).is_err());
        let spec = GridSpec::default_for(3).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<GridSpec>(&text).unwrap(), spec);
        let spec = spec.with_lambda(1.25);
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<GridSpec>(&text).unwrap(), spec);
    }

    proptest! {
        #[test]
        fn project_inverts_lift(raw in prop::collection::vec(-1.0f64..1.0, 48)) {
            let grid = make_grid(&spec2(8, 6, 8)).unwrap();
            let values = Array2::from_shape_vec((8, 6), raw).unwrap();
            let f = SphereFunction::new(grid.clone(), values.clone()).unwrap();
            let back = project(&lift(&f));
            for (a, b) in back.values().iter().zip(values.iter()) {
                prop_assert!((a - b).abs() <= 1e-15 * b.abs().max(1e-300) * 4.0);
            }
            let phi = BallFunction::new(grid, values.clone()).unwrap();
            let again = lift(&project(&phi));
            for (a, b) in again.values().iter().zip(values.iter()) {
                prop_assert!((a - b).abs() <= 4e-16 * b.abs());
            }
        }
    }
}

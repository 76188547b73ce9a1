//! Quadrature rules on [-1, 1], on S^{n-1} and on the radial axis of B_n.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::specfun::gamma::log_gamma_unchecked;
use crate::specfun::poly::jacobi_with_derivative;

/// Gauss–Jacobi rule for the weight (1 - x)^a (1 + x)^b on [-1, 1].
///
/// Nodes come from the Golub–Welsch eigenproblem, then one or two Newton
/// steps on P_N^{(a,b)}; weights are proportional to 1 / ((1 - x²) P_N'²).
pub fn gauss_jacobi(count: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if count == 0 {
        return Err(Error::Parameter("quadrature needs at least one node".into()));
    }
    if !(a > -1.0 && b > -1.0) {
        return Err(Error::Parameter(format!("Jacobi exponents must exceed -1 (a = {a}, b = {b})")));
    }
    let ab = a + b;
    let mut jac = DMatrix::<f64>::zeros(count, count);
    for k in 0..count {
        let kf = k as f64;
        let diag = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < count {
            let j = kf + 1.0;
            let off2 = if k == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let c = 2.0 * j + ab;
                4.0 * j * (j + a) * (j + b) * (j + ab) / (c * c * (c + 1.0) * (c - 1.0))
            };
            jac[(k, k + 1)] = off2.sqrt();
            jac[(k + 1, k)] = off2.sqrt();
        }
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
    nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let mut weights = Vec::with_capacity(count);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = jacobi_with_derivative(count, a, b, *x);
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            *x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = jacobi_with_derivative(count, a, b, *x);
        weights.push(1.0 / ((1.0 - *x * *x) * dp * dp));
    }
    // the common factor comes from the zeroth moment; the closed form in
    // Γ(N + ...) cancels large logarithms
    let moment = ((ab + 1.0) * 2f64.ln() + log_gamma_unchecked(a + 1.0) + log_gamma_unchecked(b + 1.0)
        - log_gamma_unchecked(ab + 2.0))
    .exp();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w *= moment / total;
    }
    Ok((nodes, weights))
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi(count.max(1), 0.0, 0.0).expect("Legendre exponents are valid")
}

/// Gauss–Chebyshev (first kind) nodes t_j = cos((2j - 1)π / 2N), ascending,
/// with plain dt-weights (π/N)(1 - t_j²)^{1/2}.
pub fn gauss_chebyshev(count: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = count as f64;
    let mut nodes = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for j in (1..=count).rev() {
        let angle = (2 * j - 1) as f64 * PI / (2.0 * nf);
        nodes.push(angle.cos());
        weights.push(PI / nf * angle.sin());
    }
    (nodes, weights)
}

/// Product rule on S^{n-1} under the unnormalized surface measure.
///
/// n = 2: `n_angular` equispaced points. n = 3: `n_angular` Gauss–Legendre
/// nodes in the last coordinate times `2 n_angular` equispaced azimuths.
/// n >= 4 recurses: Gauss–Jacobi in the last coordinate with exponents
/// (n - 3)/2 times the rule on S^{n-2}. The point set is closed under
/// x -> -x whenever `n_angular` is even (and always for n >= 3).
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(dim: usize, n_angular: usize) -> Self {
        assert!(dim >= 2 && n_angular >= 1);
        match dim {
            2 => {
                let mut points = Vec::with_capacity(2 * n_angular);
                let w = 2.0 * PI / n_angular as f64;
                for j in 0..n_angular {
                    let (s, c) = (2.0 * PI * j as f64 / n_angular as f64).sin_cos();
                    points.push(c);
                    points.push(s);
                }
                Self { dim, points, weights: vec![w; n_angular] }
            }
            3 => {
                let (z, wz) = gauss_legendre(n_angular);
                let circle = SphereRule::new(2, 2 * n_angular);
                Self::stack(3, &z, &wz, &circle)
            }
            _ => {
                let e = (dim as f64 - 3.0) / 2.0;
                let (z, wz) = gauss_jacobi(n_angular, e, e).expect("valid exponents");
                let lower = SphereRule::new(dim - 1, n_angular);
                Self::stack(dim, &z, &wz, &lower)
            }
        }
    }

    // points (s·p, z) with s = sqrt(1 - z²); the measure on S^{n-1} is
    // (1 - z²)^{(n-3)/2} dz dσ_{n-2} and the z-rule carries that factor.
    fn stack(dim: usize, z: &[f64], wz: &[f64], lower: &SphereRule) -> Self {
        let mut points = Vec::with_capacity(dim * z.len() * lower.len());
        let mut weights = Vec::with_capacity(z.len() * lower.len());
        for (&zi, &wi) in z.iter().zip(wz) {
            let s = (1.0 - zi * zi).sqrt();
                        for (p, w) in lower.iter() {
                points.extend(p.iter().map(|c| c * s));
                points.push(zi);
                weights.push(wi * w);
            }
        }
        Self { dim, points, weights }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.points.chunks_exact(self.dim).zip(self.weights.iter().copied())
    }

    /// Index of the antipodal point, if the rule contains it.
    pub fn antipodes(&self) -> Option<Vec<usize>> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let p = self.point(i);
            let found = (0..self.len()).find(|&j| {
                self.point(j).iter().zip(p).all(|(a, b)| (a + b).abs() < 1e-12)
            })?;
            out.push(found);
        }
        Some(out)
    }
}

/// Radial rule on [0, 1) for ∫_0^1 g(r) r^{n-1} dr.
///
/// Gauss–Jacobi in ρ = 2r² - 1 with exponents (a, n/2 - 1); the factor
/// (1 - ρ)^a is divided out of the stored weights, so they are plain
/// weights for r^{n-1} dr that are exact for integrands carrying the
/// factor (1 - r²)^a times an even polynomial.
pub fn radial_gauss_jacobi(dim: usize, count: usize, a: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let b = dim as f64 / 2.0 - 1.0;
    let (rho, w) = gauss_jacobi(count, a, b)?;
    let norm = 2f64.powf(-b) / 4.0;
    let r = rho.iter().map(|x| ((1.0 + x) / 2.0).sqrt()).collect();
    let weights = rho.iter().zip(&w).map(|(x, wi)| wi * norm * (1.0 - x).powf(-a)).collect();
    Ok((r, weights))
}

/// Midpoint rule on [0, 1) for ∫_0^1 g(r) r^{n-1} dr.
pub fn radial_uniform(dim: usize, count: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 1.0 / count as f64;
    let r: Vec<f64> = (0..count).map(|i| (i as f64 + 0.5) * h).collect();
    let w = r.iter().map(|ri| ri.powi(dim as i32 - 1) * h).collect();
    (r, w)
}

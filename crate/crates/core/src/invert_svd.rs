//! Spectral forward and inverse maps through the singular value
//! decomposition of V₊ with respect to the bases η̃_ν and ζ̃_ν.

use std::sync::Arc;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, SliceData, SphereField, SphereFunction};
use crate::specfun::{
    gegenbauer_all, harmonic_dim, jacobi_poly, real_harmonic, sph_harm, svd_constants, HarmonicBasis, SvdConstants, SvdIndex,
};

/// Relative floor below which a singular value makes the band ill-conditioned.
pub const S_FLOOR_RELATIVE: f64 = 1e-6;

fn check_lambda(n: usize, lambda: f64) -> Result<()> {
    if !(lambda > n as f64 / 2.0 - 1.0) {
        return Err(Error::Parameter(format!("lambda = {lambda} must exceed n/2 - 1")));
    }
    Ok(())
}

/// The basis function η̃_ν as a field on the upper hemisphere.
#[derive(Debug, Clone, Copy)]
pub struct EtaTilde {
    n: usize,
    nu: SvdIndex,
    lambda: f64,
    constants: SvdConstants,
}

impl EtaTilde {
    pub fn new(n: usize, nu: SvdIndex, lambda: f64) -> Result<Self> {
        if !(n == 2 || n == 3) {
            return Err(Error::Parameter(format!("SVD bases are provided for n = 2, 3 (got {n})")));
        }
        let constants = svd_constants(n, lambda, nu)?;
        Ok(Self { n, nu, lambda, constants })
    }

    pub fn index(&self) -> SvdIndex {
        self.nu
    }

    pub fn singular_value(&self) -> f64 {
        self.constants.s_nu
    }
}

impl SphereField for EtaTilde {
    fn value(&self, xp: &[f64], height: f64) -> f64 {
        let n = self.n;
        let nu = self.nu;
        let r2: f64 = xp.iter().map(|v| v * v).sum();
        let r = r2.sqrt();
        let angular = if r > 0.0 {
            let mut unit = [0.0; 3];
            for (u, v) in unit.iter_mut().zip(xp) {
                *u = v / r;
            }
            real_harmonic(nu.m, nu.mu, &unit[..n])
        } else if nu.m == 0 {
            real_harmonic(0, 1, &[0.0, 0.0, 1.0][3 - n..])
        } else {
            return 0.0;
        };
        let half_n = n as f64 / 2.0;
        let radial = r.powi(nu.m as i32)
            * (1.0 - r2).powf(self.lambda - half_n)
            * jacobi_poly(nu.k, self.lambda - half_n, nu.m as f64 + half_n - 1.0, 2.0 * r2 - 1.0);
        height * self.constants.c_nu * radial * angular
    }
}

/// η̃_ν(x) = x_{n+1} c_ν |x'|^m W^{-1}(x') P_k^{(λ-n/2, m+n/2-1)}(2|x'|² - 1) Y_{m,μ}(x'/|x'|)
/// at a point x of the closed upper hemisphere (length n + 1).
pub fn eval_eta_tilde(n: usize, nu: SvdIndex, lambda: f64, x: &[f64]) -> Result<f64> {
    if x.len() != n + 1 {
        return Err(Error::Parameter(format!("point has {} coordinates, expected {}", x.len(), n + 1)));
    }
    // checked evaluation of the harmonic factor
    if nu.mu == 0 || nu.mu > harmonic_dim(n, nu.m) {
        return Err(Error::Index(format!("mu = {} outside 1..={}", nu.mu, harmonic_dim(n, nu.m))));
    }
    let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 || x[n] < 0.0 {
        return Err(Error::Domain("point is not on the closed upper hemisphere".into()));
    }
    Ok(EtaTilde::new(n, nu, lambda)?.value(&x[..n], x[n]))
}

/// ζ̃_ν(θ, t) = (1 - t²)^{1/2} d_ν w^{-1}(t) C^λ_{m+2k}(t) Y_{m,μ}(θ), w(t) = (1 - t²)^{1/2-λ}.
pub fn eval_zeta_tilde(n: usize, nu: SvdIndex, lambda: f64, theta: &[f64], t: f64) -> Result<f64> {
    if !(t.abs() < 1.0) {
        return Err(Error::Domain(format!("|t| = {} must be < 1", t.abs())));
    }
    let c = svd_constants(n, lambda, nu)?;
    let y = sph_harm(n, nu.m, nu.mu, theta)?;
    let g = crate::specfun::gegenbauer_poly(nu.degree(), lambda, t);
    Ok((1.0 - t * t).powf(lambda) * c.d_nu * g * y)
}

/// All basis functions with m + 2k <= band, evaluated together.
#[derive(Debug, Clone)]
pub struct SvdBasis {
    n: usize,
    lambda: f64,
    band: usize,
    indices: Vec<SvdIndex>,
    constants: Vec<SvdConstants>,
    harmonics: HarmonicBasis,
}

impl SvdBasis {
    pub fn new(n: usize, lambda: f64, band: usize) -> Result<Self> {
        if !(n == 2 || n == 3) {
            return Err(Error::Parameter(format!("SVD bases are provided for n = 2, 3 (got {n})")));
        }
        check_lambda(n, lambda)?;
        let indices = SvdIndex::enumerate(n, band);
        let constants = indices.iter().map(|&nu| svd_constants(n, lambda, nu)).collect::<Result<Vec<_>>>()?;
        Ok(Self { n, lambda, band, indices, constants, harmonics: HarmonicBasis::new(n, band) })
    }

    pub fn indices(&self) -> &[SvdIndex] {
        &self.indices
    }

    pub fn constants(&self) -> &[SvdConstants] {
        &self.constants
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// η̃_ν at the hemisphere point (x', height), every ν.
    pub fn eta_tilde_all(&self, xp: &[f64], height: f64, out: &mut [f64]) {
        let n = self.n;
        let half_n = n as f64 / 2.0;
        let r2: f64 = xp.iter().map(|v| v * v).sum();
        let r = r2.sqrt();
        let mut unit = [1.0, 0.0, 0.0];
        if r > 0.0 {
            for (u, v) in unit.iter_mut().zip(xp) {
                *u = v / r;
            }
        }
        let mut ylm = vec![0.0; self.harmonics.len()];
        self.harmonics.eval_into(&unit[..n], &mut ylm);
        let weight = (1.0 - r2).powf(self.lambda - half_n);
        let rho = 2.0 * r2 - 1.0;
        for (slot, (nu, c)) in out.iter_mut().zip(self.indices.iter().zip(&self.constants)) {
            let rm = if nu.m == 0 { 1.0 } else { r.powi(nu.m as i32) };
            let p = jacobi_poly(nu.k, self.lambda - half_n, nu.m as f64 + half_n - 1.0, rho);
            *slot = height * c.c_nu * rm * weight * p * ylm[self.harmonics.offset(nu.m) + nu.mu - 1];
        }
    }

    /// ζ̃_ν(θ, t), every ν.
    pub fn zeta_tilde_all(&self, theta: &[f64], t: f64, out: &mut [f64]) {
        let mut ylm = vec![0.0; self.harmonics.len()];
        self.harmonics.eval_into(theta, &mut ylm);
        let mut gegen = Vec::new();
        gegenbauer_all(self.band, self.lambda, t, &mut gegen);
        let weight = (1.0 - t * t).powf(self.lambda);
        for (slot, (nu, c)) in out.iter_mut().zip(self.indices.iter().zip(&self.constants)) {
            *slot = weight * c.d_nu * gegen[nu.degree()] * ylm[self.harmonics.offset(nu.m) + nu.mu - 1];
        }
    }
}

/// Coefficients f_ν or F_ν aligned with their indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoeffs {
    pub lambda: f64,
    pub band: usize,
    pub indices: Vec<SvdIndex>,
    pub coeffs: Vec<f64>,
}

impl SpectralCoeffs {
    pub fn zeros(n: usize, lambda: f64, band: usize) -> Self {
        let indices = SvdIndex::enumerate(n, band);
        let coeffs = vec![0.0; indices.len()];
        Self { lambda, band, indices, coeffs }
    }

    pub fn validate(&self) -> Result<()> {
        if self.indices.len() != self.coeffs.len() {
            return Err(Error::Parameter("indices and coefficients differ in length".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for nu in &self.indices {
            if !seen.insert(*nu) {
                return Err(Error::Parameter(format!("duplicate index {nu:?}")));
            }
            if nu.degree() > self.band {
                return Err(Error::Parameter(format!("index {nu:?} exceeds band {}", self.band)));
            }
        }
        if self.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("non-finite coefficient".into()));
        }
        Ok(())
    }

    pub fn get(&self, nu: SvdIndex) -> Option<f64> {
        self.indices.iter().position(|&i| i == nu).map(|p| self.coeffs[p])
    }
}

fn check_band(grid: &Grid, band: usize) -> Result<()> {
    let limit = (grid.t_nodes().len() - 2) / 2;
    if band > limit {
        return Err(Error::Parameter(format!("band {band} exceeds (n_t - 2)/2 = {limit} for this grid")));
    }
    Ok(())
}

/// F_ν = ∫∫ F ζ̃_ν w̃ dt dθ for every ν with m + 2k <= band.
pub fn analyze(data: &SliceData, lambda: f64, band: usize) -> Result<SpectralCoeffs> {
    let grid = data.grid();
    let n = grid.n();
    check_band(grid, band)?;
    let basis = SvdBasis::new(n, lambda, band)?;
    let t_nodes = grid.t_nodes();
    let t_weights = grid.t_weights();
    // ζ̃_ν w̃ = d_ν (1 - t²)^{-1/2} C^λ_{m+2k}(t) Y_{m,μ}(θ): separate t and θ
    let mut gegen = Vec::new();
    let mut tcols = Array2::<f64>::zeros((t_nodes.len(), band + 1));
    for (j, &t) in t_nodes.iter().enumerate() {
        gegenbauer_all(band, lambda, t, &mut gegen);
        let w = t_weights[j] / (1.0 - t * t).sqrt();
        for deg in 0..=band {
            tcols[[j, deg]] = w * gegen[deg];
        }
    }
    let moments = data.values().dot(&tcols); // (dirs, band + 1)
    let dirs = grid.directions();
    let harmonics = HarmonicBasis::new(n, band);
    let mut coeffs = vec![0.0; basis.len()];
    let mut ylm = vec![0.0; harmonics.len()];
    for (i, (theta, w)) in dirs.iter().enumerate() {
        harmonics.eval_into(theta, &mut ylm);
        for (p, (nu, c)) in basis.indices.iter().zip(&basis.constants).enumerate() {
            coeffs[p] += w * c.d_nu * ylm[harmonics.offset(nu.m) + nu.mu - 1] * moments[[i, nu.degree()]];
        }
    }
    Ok(SpectralCoeffs { lambda, band, indices: basis.indices.clone(), coeffs })
}

/// f_ν = ⟨f, η̃_ν⟩ under the hemisphere weight W̃.
pub fn analyze_sphere(f: &SphereFunction, lambda: f64, band: usize) -> Result<SpectralCoeffs> {
    let grid = f.grid();
    let n = grid.n();
    let basis = SvdBasis::new(n, lambda, band)?;
    let e = n as f64 - 2.0 * lambda - 2.0;
    let rows: Vec<Vec<f64>> = (0..grid.n_dirs())
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![0.0; basis.len()];
            let mut vals = vec![0.0; basis.len()];
            let mut xp = [0.0; 3];
            for j in 0..grid.radii().len() {
                grid.ball_point(i, j, &mut xp[..n]);
                let h = grid.height(j);
                basis.eta_tilde_all(&xp[..n], h, &mut vals);
                let w = grid.ball_weight(i, j) * h.powf(e) * f.values()[[i, j]];
                for (a, v) in acc.iter_mut().zip(&vals) {
                    *a += w * v;
                }
            }
            acc
        })
        .collect();
    let mut coeffs = vec![0.0; basis.len()];
    for row in rows {
        for (c, r) in coeffs.iter_mut().zip(row) {
            *c += r;
        }
    }
    Ok(SpectralCoeffs { lambda, band, indices: basis.indices.clone(), coeffs })
}

/// Σ s_ν f_ν ζ̃_ν on the slice grid.
pub fn synthesize_forward(coeffs: &SpectralCoeffs, grid: &Arc<Grid>) -> Result<SliceData> {
    coeffs.validate()?;
    let n = grid.n();
    let basis = SvdBasis::new(n, coeffs.lambda, coeffs.band)?;
    let weights: Vec<f64> = basis
        .indices
        .iter()
        .zip(&basis.constants)
        .map(|(nu, c)| coeffs.get(*nu).unwrap_or(0.0) * c.s_nu)
        .collect();
    Ok(SliceData::sample(grid.clone(), |theta, t| {
        let mut vals = vec![0.0; basis.len()];
        basis.zeta_tilde_all(theta, t, &mut vals);
        vals.iter().zip(&weights).map(|(v, w)| v * w).sum()
    }))
}

/// Σ a_ν η̃_ν on the hemisphere grid.
pub fn synthesize_sphere(coeffs: &SpectralCoeffs, grid: &Arc<Grid>) -> Result<SphereFunction> {
    coeffs.validate()?;
    let n = grid.n();
    let basis = SvdBasis::new(n, coeffs.lambda, coeffs.band)?;
    let weights: Vec<f64> = basis.indices.iter().map(|nu| coeffs.get(*nu).unwrap_or(0.0)).collect();
    Ok(SphereFunction::sample(grid.clone(), &|xp: &[f64], h: f64| {
        let mut vals = vec![0.0; basis.len()];
        basis.eta_tilde_all(xp, h, &mut vals);
        vals.iter().zip(&weights).map(|(v, w)| v * w).sum::<f64>()
    }))
}

#[derive(Debug, Clone, Copy)]
pub struct SvdOptions {
    /// Skip the ill-conditioning guard.
    pub force: bool,
    /// Relative singular-value floor.
    pub s_floor_relative: f64,
}

impl Default for SvdOptions {
    fn default() -> Self {
        Self { force: false, s_floor_relative: S_FLOOR_RELATIVE }
    }
}

/// f = Σ s_ν^{-1} F_ν η̃_ν over m + 2k <= band.
pub fn reconstruct(data: &SliceData, lambda: f64, band: usize, options: SvdOptions) -> Result<SphereFunction> {
    let n = data.grid().n();
    let basis = SvdBasis::new(n, lambda, band)?;
    let s_max = basis.constants.iter().map(|c| c.s_nu).fold(0.0, f64::max);
    let floor = options.s_floor_relative * s_max;
    if !options.force {
        if let Some((nu, c)) = basis.indices.iter().zip(&basis.constants).find(|(_, c)| c.s_nu < floor) {
            return Err(Error::IllConditioned { m: nu.m, mu: nu.mu, k: nu.k, s_nu: c.s_nu, floor });
        }
    }
    let mut coeffs = analyze(data, lambda, band)?;
    for (c, k) in coeffs.coeffs.iter_mut().zip(&basis.constants) {
        *c /= k.s_nu;
    }
    synthesize_sphere(&coeffs, data.grid())
}

/// Rows of (ν, c_ν, d_ν, s_ν) for every index up to `band`.
pub fn svd_table(n: usize, lambda: f64, band: usize) -> Result<Vec<(SvdIndex, SvdConstants)>> {
    let basis = SvdBasis::new(n, lambda, band)?;
    Ok(basis.indices.iter().copied().zip(basis.constants.iter().copied()).collect())
}

/// Number of indices with m + 2k <= band.
pub fn index_count(n: usize, band: usize) -> usize {
    (0..=band).map(|deg| (deg % 2..=deg).step_by(2).map(|m| harmonic_dim(n, m)).sum::<usize>()).sum()
}


#[cfg(test)]
mod props {
    use super::*;
    use crate::grid::{make_grid, GridSpec, RadialRule, TRule};
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn synthesis_then_analysis_is_identity(seed in proptest::collection::vec(-1.0f64..1.0, 16)) {
            let grid = make_grid(&GridSpec {
                n: 2,
                n_angular: 16,
                n_radial: 12,
                n_t: 16,
                radial_rule: RadialRule::GaussJacobi,
                t_rule: TRule::Chebyshev,
                lambda: None,
            })
            .unwrap();
            let mut coeffs = SpectralCoeffs::zeros(2, 1.0, 4);
            for (i, c) in coeffs.coeffs.iter_mut().enumerate() {
                *c = seed[i % seed.len()];
            }
            let f = synthesize_sphere(&coeffs, &grid).unwrap();
            let back = analyze_sphere(&f, 1.0, 4).unwrap();
            for (a, b) in back.coeffs.iter().zip(&coeffs.coeffs) {
                prop_assert!((a - b).abs() < 1e-10);
            }
            // Parseval on the band
            let energy: f64 = coeffs.coeffs.iter().map(|c| c * c).sum();
            let norm = crate::grid::inner_product_hemisphere(&f, &f, 1.0).unwrap();
            prop_assert!((energy - norm).abs() < 1e-10 * energy.max(1.0));
        }
    }
}

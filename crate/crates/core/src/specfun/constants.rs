//! Closed-form constants: SVD normalizers and singular values, and the
//! inversion constants of the four reconstruction methods.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::gamma::{binomial, gamma, log_gamma_unchecked};
use super::harmonics::harmonic_dim;
use crate::error::{Error, Result};

/// Surface area of S^{n-1}: 2 π^{n/2} / Γ(n/2).
pub fn sphere_area(n: usize) -> f64 {
    let nf = n as f64;
    2.0 * PI.powf(nf / 2.0) / log_gamma_unchecked(nf / 2.0).exp()
}

/// Index ν = (m, μ, k) of the singular system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SvdIndex {
    pub m: usize,
    pub mu: usize,
    pub k: usize,
}

impl SvdIndex {
    pub fn new(m: usize, mu: usize, k: usize) -> Self {
        Self { m, mu, k }
    }

    /// Degree of the Gegenbauer factor, m + 2k.
    pub fn degree(&self) -> usize {
        self.m + 2 * self.k
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let dim = harmonic_dim(n, self.m);
        if self.mu == 0 || self.mu > dim {
            return Err(Error::Index(format!(
                "mu = {} outside 1..={dim} for m = {} on S^{}",
                self.mu,
                self.m,
                n - 1
            )));
        }
        Ok(())
    }

    /// Every index with m + 2k <= band, ordered by (m + 2k, m, mu).
    pub fn enumerate(n: usize, band: usize) -> Vec<SvdIndex> {
        let mut out = Vec::new();
        for deg in 0..=band {
            for m in (deg % 2..=deg).step_by(2) {
                let k = (deg - m) / 2;
                for mu in 1..=harmonic_dim(n, m) {
                    out.push(SvdIndex { m, mu, k });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvdConstants {
    pub c_nu: f64,
    pub d_nu: f64,
    pub s_nu: f64,
    pub lambda: f64,
}

fn check_lambda(n: usize, lambda: f64) -> Result<()> {
    let floor = n as f64 / 2.0 - 1.0;
    if !(lambda > floor) || !lambda.is_finite() {
        return Err(Error::Parameter(format!("lambda = {lambda} must exceed n/2 - 1 = {floor}")));
    }
    Ok(())
}

/// Normalizers c_ν, d_ν of the ball and slice bases and the singular value s_ν.
pub fn svd_constants(n: usize, lambda: f64, nu: SvdIndex) -> Result<SvdConstants> {
    check_lambda(n, lambda)?;
    nu.validate(n)?;
    let lg = log_gamma_unchecked;
    let (m, k) = (nu.m as f64, nu.k as f64);
    let half_n = n as f64 / 2.0;
    let deg = m + 2.0 * k;

    let ln_c2 = (2.0f64).ln() + lg(k + 1.0) + (2.0 * k + lambda + m).ln() + lg(k + m + lambda)
        - lg(k + lambda - half_n + 1.0)
        - lg(k + m + half_n);
    let ln_d = (lambda - 0.5) * 2f64.ln()
        + lg(lambda)
        + 0.5 * (lg(deg + 1.0) + (deg + lambda).ln() - PI.ln() - lg(deg + 2.0 * lambda));
    let ln_s = lambda * 2f64.ln()
        + 0.5 * (n as f64 - 1.0) * PI.ln()
        + 0.5
            * (lg(deg + 1.0) + lg(k + m + lambda) + lg(k + 1.0 + lambda - half_n)
                - lg(k + 1.0)
                - lg(deg + 2.0 * lambda)
                - lg(k + m + half_n));
    Ok(SvdConstants {
        c_nu: (0.5 * ln_c2).exp(),
        d_nu: ln_d.exp(),
        s_nu: ln_s.exp(),
        lambda,
    })
}

/// B_ℓ(α) = Σ_k (-1)^k C(ℓ, k) k^α.
pub fn finite_difference_moment(ell: usize, alpha: f64) -> f64 {
    (0..=ell)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let pow = if k == 0 { if alpha == 0.0 { 1.0 } else { 0.0 } } else { (k as f64).powf(alpha) };
            sign * binomial(ell as u64, k as u64) * pow
        })
        .sum()
}

/// d/dα B_ℓ(α) = Σ_k (-1)^k C(ℓ, k) k^α ln k.
pub fn finite_difference_moment_derivative(ell: usize, alpha: f64) -> f64 {
    (1..=ell)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let kf = k as f64;
            sign * binomial(ell as u64, k as u64) * kf.powf(alpha) * kf.ln()
        })
        .sum()
}

/// Dimension-dependent constants of the reconstruction formulas.
#[derive(Debug, Clone, Copy)]
pub struct FormulaConstants {
    pub n: usize,
}

impl FormulaConstants {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!("dimension n = {n} must be at least 2")));
        }
        Ok(Self { n })
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// σ_{n-1}, the area of S^{n-1}.
    pub fn sigma(&self) -> f64 {
        sphere_area(self.n)
    }

    /// c_n = π^{1-n/2} / (2^{n-1} Γ(n/2)), odd-n backprojection constant.
    pub fn c_n(&self) -> f64 {
        let n = self.nf();
        PI.powf(1.0 - n / 2.0) / (2f64.powf(n - 1.0) * gamma(n / 2.0).unwrap())
    }

    /// ĉ_n = π^{(1-n)/2} / (2^{n-1} Γ(n/2)), the even-n constant.
    pub fn c_hat(&self) -> f64 {
        let n = self.nf();
        PI.powf((1.0 - n) / 2.0) / (2f64.powf(n - 1.0) * gamma(n / 2.0).unwrap())
    }

    /// Even-n constant that makes φ = κ (-Δ)^{n/2} R* L R φ hold for the
    /// logarithmic kernel L. At n = 2 this is -1/(2π), obtained from the
    /// logarithmic potential and the identity (1/2π)∫_{S¹} log|θ·ω| dθ = -log 2.
    pub fn c_hat_log_potential(&self) -> Result<f64> {
        if self.n != 2 {
            return Err(Error::Parameter("log-potential constant is derived for n = 2 only".into()));
        }
        Ok(-1.0 / (2.0 * PI))
    }

    /// d_{n,ℓ}(α) for the hypersingular representation.
    pub fn d_nl(&self, ell: usize, alpha: f64) -> Result<f64> {
        let n = self.nf();
        let prefactor = PI.powf(n / 2.0) / (2f64.powf(alpha) * gamma((n + alpha) / 2.0)?);
        let is_even_positive = alpha > 0.0 && alpha == alpha.floor() && (alpha as u64).is_multiple_of(2);
        if is_even_positive {
            let half = alpha / 2.0;
            let sign = if ((half as u64) - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
            let fact = gamma(half + 1.0)?;
            Ok(prefactor * 2.0 * sign / fact * finite_difference_moment_derivative(ell, alpha))
        } else {
            Ok(prefactor * gamma(-alpha / 2.0)? * finite_difference_moment(ell, alpha))
        }
    }

    /// Checks the order ℓ of the finite difference: ℓ = n - 1 for even n,
    /// ℓ > n - 1 for odd n.
    pub fn check_ell(&self, ell: usize) -> Result<()> {
        let ok = if self.n.is_multiple_of(2) { ell == self.n - 1 } else { ell > self.n - 1 };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "finite-difference order ell = {ell} is invalid for n = {} (need {})",
                self.n,
                if self.n.is_multiple_of(2) { format!("ell = {}", self.n - 1) } else { format!("ell > {}", self.n - 1) }
            )))
        }
    }

    /// Multiplier c of the hypersingular formula, c_n / d_{n,ℓ}(n - 1),
    /// with c_n the backprojection constant above.
    pub fn hypersingular_constant(&self, ell: usize) -> Result<f64> {
        self.check_ell(ell)?;
        Ok(self.c_n() / self.d_nl(ell, self.nf() - 1.0)?)
    }

    /// δ_n = (-1)^{[n/2 - 1]} Γ((n-1)/2) / (n-3)!, n >= 3.
    pub fn delta(&self) -> Result<f64> {
        if self.n < 3 {
            return Err(Error::Parameter("delta_n is defined for n >= 3".into()));
        }
        let n = self.nf();
        let sign = if (self.n / 2 - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(sign * gamma((n - 1.0) / 2.0)? / gamma(n - 2.0)?)
    }

    /// λ_n = δ_n / (c̄_n σ_{n-1}), c̄_n = 4 π^{(n-1)/2} (n - 2).
    pub fn lambda_ac(&self) -> Result<f64> {
        let n = self.nf();
        let c_bar = 4.0 * PI.powf((n - 1.0) / 2.0) * (n - 2.0);
        Ok(self.delta()? / (c_bar * self.sigma()))
    }

    /// ‖R‖ = (π^{(n-1)/2} Γ(λ - n/2 + 1) / Γ(λ + 1/2))^{1/2}.
    ///
    /// This norm refers to a normalized angular measure; under the
    /// unnormalized measure used throughout this crate the operator norm
    /// is larger by σ_{n-1}^{1/2} (see [`Self::radon_norm_unnormalized`]).
    pub fn radon_norm(&self, lambda: f64) -> Result<f64> {
        check_lambda(self.n, lambda)?;
        let n = self.nf();
        Ok((PI.powf((n - 1.0) / 2.0) * gamma(lambda - n / 2.0 + 1.0)? / gamma(lambda + 0.5)?).sqrt())
    }

    pub fn radon_norm_unnormalized(&self, lambda: f64) -> Result<f64> {
        Ok(self.radon_norm(lambda)? * self.sigma().sqrt())
    }
}

/// All inversion constants for one dimension, as a serializable record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsRecord {
    pub n: usize,
    pub c_n: f64,
    pub c_hat: f64,
    pub ell: Option<usize>,
    pub d_nl: Option<f64>,
    pub hypersingular: Option<f64>,
    pub delta: Option<f64>,
    pub lambda_ac: Option<f64>,
    /// ‖R‖ at the default λ = n/2, normalized angular measure.
    pub radon_norm: f64,
}

/// Evaluates every constant defined for `n`; `ell` selects d_{n,ℓ}(n - 1).
pub fn formula_constants(n: usize, ell: Option<usize>) -> Result<ConstantsRecord> {
    let fc = FormulaConstants::new(n)?;
    let (d_nl, hypersingular) = match ell {
        Some(ell) => {
            fc.check_ell(ell)?;
            (Some(fc.d_nl(ell, n as f64 - 1.0)?), Some(fc.hypersingular_constant(ell)?))
        }
        None => (None, None),
    };
    Ok(ConstantsRecord {
        n,
        c_n: fc.c_n(),
        c_hat: fc.c_hat(),
        ell,
        d_nl,
        hypersingular,
        delta: fc.delta().ok(),
        lambda_ac: fc.lambda_ac().ok(),
        radon_norm: fc.radon_norm(n as f64 / 2.0)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_anchor_n2() {
        let c = svd_constants(2, 1.0, SvdIndex::new(0, 1, 0)).unwrap();
        assert!((c.c_nu - 2f64.sqrt()).abs() < 1e-14);
        assert!((c.d_nu - (2.0 / PI).sqrt()).abs() < 1e-14);
        assert!((c.s_nu - 2.0 * PI.sqrt()).abs() < 1e-14);
        // c² for (m, k) = (0, 1): hand integral gives 6
        let c = svd_constants(2, 1.0, SvdIndex::new(0, 1, 1)).unwrap();
        assert!((c.c_nu * c.c_nu - 6.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_boundary_is_finite() {
        for n in [2usize, 3] {
            let lam = n as f64 / 2.0 - 1.0 + 1e-9;
            for nu in SvdIndex::enumerate(n, 6) {
                let c = svd_constants(n, lam, nu).unwrap();
                assert!(c.c_nu.is_finite() && c.c_nu > 0.0);
                assert!(c.d_nu.is_finite() && c.d_nu > 0.0);
                assert!(c.s_nu.is_finite() && c.s_nu > 0.0);
            }
        }
        assert!(svd_constants(3, 0.5, SvdIndex::new(0, 1, 0)).is_err());
        assert!(svd_constants(2, 1.0, SvdIndex::new(1, 3, 0)).is_err());
    }

    #[test]
    fn singular_values_decay_n2() {
        let mut prev_max = f64::INFINITY;
        for deg in 2..=40 {
            let cur_max = SvdIndex::enumerate(2, deg)
                .into_iter()
                .filter(|nu| nu.degree() == deg)
                .map(|nu| svd_constants(2, 1.0, nu).unwrap().s_nu)
                .fold(0.0, f64::max);
            assert!(cur_max <= prev_max + 1e-15, "deg {deg}");
            prev_max = cur_max;
        }
        // s_ν → 0
        let far = svd_constants(2, 1.0, SvdIndex::new(0, 1, 200)).unwrap().s_nu;
        let near = svd_constants(2, 1.0, SvdIndex::new(0, 1, 1)).unwrap().s_nu;
        assert!(far < 0.4 * near);
    }

    #[test]
    fn inversion_constants() {
        let p2 = FormulaConstants::new(2).unwrap();
        assert!((p2.c_hat() - 1.0 / (2.0 * PI.sqrt())).abs() < 1e-15);
        assert!((p2.radon_norm(1.0).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        assert!((p2.sigma() - 2.0 * PI).abs() < 1e-14);
        // hypersingular at n = 2, ℓ = 1: 1/(4π)
        assert!((p2.d_nl(1, 1.0).unwrap() - 2.0 * PI).abs() < 1e-13);
        assert!((p2.hypersingular_constant(1).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!(p2.hypersingular_constant(2).is_err());

        let p3 = FormulaConstants::new(3).unwrap();
        assert!((p3.c_n() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((p3.delta().unwrap() - 1.0).abs() < 1e-15);
        assert!((p3.lambda_ac().unwrap() * 16.0 * PI * PI - 1.0).abs() < 1e-14);
        assert!(p3.check_ell(2).is_err());
        assert!(p3.check_ell(3).is_ok());

        // closed form λ_n = (-1)^{[n/2-1]} Γ((n-1)/2) Γ(n/2) / (8 π^{n-1/2} (n-2)!)
        for n in 3..9usize {
            let p = FormulaConstants::new(n).unwrap();
            let nf = n as f64;
            let sign = if (n / 2 - 1) % 2 == 0 { 1.0 } else { -1.0 };
            let want = sign * gamma((nf - 1.0) / 2.0).unwrap() * gamma(nf / 2.0).unwrap()
                / (8.0 * PI.powf(nf - 0.5) * gamma(nf - 1.0).unwrap());
            assert!((p.lambda_ac().unwrap() / want - 1.0).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn moment_derivative_matches_central_difference() {
        for ell in 1..6 {
            for &alpha in &[2.0, 4.0, 6.0] {
                let h = 1e-6;
                let fd = (finite_difference_moment(ell, alpha + h) - finite_difference_moment(ell, alpha - h)) / (2.0 * h);
                let exact = finite_difference_moment_derivative(ell, alpha);
                assert!((fd - exact).abs() < 1e-6 * exact.abs().max(1.0), "ell={ell} alpha={alpha}");
            }
        }
        // B_ℓ annihilates low powers: B_ℓ(j) = 0 for integer 0 < j < ℓ
        assert!(finite_difference_moment(4, 2.0).abs() < 1e-12);
        assert_eq!(finite_difference_moment(1, 1.0), -1.0);
    }

    #[test]
    fn record_examples() {
        let r = formula_constants(2, Some(1)).unwrap();
        assert!((r.c_hat - 0.5 / PI.sqrt()).abs() < 1e-15);
        assert!((r.hypersingular.unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-14);
        assert!(r.delta.is_none());
        // λ = 1 at n = 2
        assert!((r.radon_norm - 2f64.sqrt()).abs() < 1e-14);
        let r = formula_constants(3, None).unwrap();
        assert!((r.lambda_ac.unwrap() - 1.0 / (16.0 * PI * PI)).abs() < 1e-16);
        assert!(formula_constants(2, Some(2)).is_err());
        assert!(formula_constants(3, Some(2)).is_err());
    }
}

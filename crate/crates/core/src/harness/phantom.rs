//! Test functions on S^n, all even in x_{n+1}.

use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, SphereField, SphereFunction};
use crate::invert_svd::EtaTilde;
use crate::specfun::SvdIndex;

/// Width of the smooth window that switches a bump on above the margin.
pub const WINDOW_RAMP: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Phantom {
    /// f ≡ 1.
    EvenConstant,
    /// f(x) = |x_{n+1}|^power.
    AxialPower { power: f64 },
    /// f = η̃_ν, extended evenly.
    Basis { nu: SvdIndex, lambda: f64 },
    /// Smooth compactly supported bump in geodesic distance from `center`
    /// (a point of the upper hemisphere), multiplied by a window that
    /// vanishes for |x_{n+1}| < equator_margin.
    Bump { center: Vec<f64>, width: f64, equator_margin: f64 },
    /// Random combination of basis functions with m + 2k <= band.
    RandomBasis { band: usize, lambda: f64, seed: u64 },
    Sum { terms: Vec<(f64, Phantom)> },
}

impl Phantom {
    /// The bump used throughout the test suite: polar angle 0.6, width 0.7,
    /// margin 0.2.
    pub fn default_bump(n: usize) -> Self {
        let mut center = vec![0.0; n + 1];
        center[0] = 0.6f64.sin();
        center[n] = 0.6f64.cos();
        Phantom::Bump { center, width: 0.7, equator_margin: 0.2 }
    }

    /// Compiles the description into an evaluable field on S^n_+.
    pub fn field(&self, n: usize) -> Result<PhantomField> {
        Ok(match self {
            Phantom::EvenConstant => PhantomField::Constant,
            Phantom::AxialPower { power } => {
                if !(*power >= 0.0) {
                    return Err(Error::Parameter(format!("axial power {power} must be nonnegative")));
                }
                PhantomField::AxialPower(*power)
            }
            Phantom::Basis { nu, lambda } => {
                nu.validate(n)?;
                PhantomField::Basis(EtaTilde::new(n, *nu, *lambda)?)
            }
            Phantom::Bump { center, width, equator_margin } => {
                if center.len() != n + 1 {
                    return Err(Error::Parameter(format!("bump center has {} coordinates, expected {}", center.len(), n + 1)));
                }
                let norm = center.iter().map(|v| v * v).sum::<f64>().sqrt();
                if !(norm > 0.0) || center[n] < 0.0 {
                    return Err(Error::Parameter("bump center must be a nonzero point with x_{n+1} >= 0".into()));
                }
                if !(*width > 0.0 && *width <= std::f64::consts::PI) {
                    return Err(Error::Parameter(format!("bump width {width} must lie in (0, π]")));
                }
                if !(*equator_margin >= 0.0 && *equator_margin < 1.0) {
                    return Err(Error::Parameter(format!("equator margin {equator_margin} must lie in [0, 1)")));
                }
                let mut c = [0.0; 5];
                for (o, v) in c.iter_mut().zip(center) {
                    *o = v / norm;
                }
                PhantomField::Bump { center: c, width: *width, margin: *equator_margin }
            }
            Phantom::RandomBasis { band, lambda, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let terms = SvdIndex::enumerate(n, *band)
                    .into_iter()
                    .map(|nu| Ok((rng.random_range(-1.0..1.0), PhantomField::Basis(EtaTilde::new(n, nu, *lambda)?))))
                    .collect::<Result<Vec<_>>>()?;
                PhantomField::Sum(terms)
            }
            Phantom::Sum { terms } => PhantomField::Sum(
                terms.iter().map(|(a, p)| Ok((*a, p.field(n)?))).collect::<Result<Vec<_>>>()?,
            ),
        })
    }

    /// Samples the phantom on the hemisphere nodes of `grid`.
    pub fn sample(&self, grid: &Arc<Grid>) -> Result<SphereFunction> {
        let field = self.field(grid.n())?;
        Ok(SphereFunction::sample(grid.clone(), &field))
    }

    /// Whether the phantom vanishes identically near the equator.
    pub fn equator_margin(&self) -> Option<f64> {
        match self {
            Phantom::Bump { equator_margin, .. } if *equator_margin > 0.0 => Some(*equator_margin),
            Phantom::Sum { terms } => terms
                .iter()
                .map(|(_, p)| p.equator_margin())
                .try_fold(f64::INFINITY, |acc, m| m.map(|m| acc.min(m))),
            _ => None,
        }
    }
}

/// Evaluable form of a [`Phantom`].
#[derive(Debug, Clone)]
pub enum PhantomField {
    Constant,
    AxialPower(f64),
    Basis(EtaTilde),
    Bump { center: [f64; 5], width: f64, margin: f64 },
    Sum(Vec<(f64, PhantomField)>),
}

// exp(-1/u) for u > 0, else 0
fn smooth_zero(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

/// C^∞ step: 0 for u <= 0, 1 for u >= 1.
pub fn smooth_step(u: f64) -> f64 {
    let a = smooth_zero(u);
    let b = smooth_zero(1.0 - u);
    a / (a + b)
}

impl SphereField for PhantomField {
    fn value(&self, xp: &[f64], height: f64) -> f64 {
        match self {
            PhantomField::Constant => 1.0,
            PhantomField::AxialPower(p) => height.abs().powf(*p),
            PhantomField::Basis(eta) => eta.value(xp, height.abs()),
            PhantomField::Bump { center, width, margin } => {
                let z = height.abs();
                let n = xp.len();
                let mut dot = center[n] * z;
                for (a, b) in xp.iter().zip(center) {
                    dot += a * b;
                }
                let dist = dot.clamp(-1.0, 1.0).acos();
                let u = dist / width;
                if u >= 1.0 || z <= *margin {
                    return 0.0;
                }
                let profile = (1.0 - 1.0 / (1.0 - u * u)).exp();
                let window = if *margin > 0.0 { smooth_step((z - margin) / WINDOW_RAMP) } else { 1.0 };
                profile * window
            }
            PhantomField::Sum(terms) => terms.iter().map(|(a, f)| a * f.value(xp, height)).sum(),
        }
    }
}

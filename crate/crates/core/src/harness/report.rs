//! Error metrics and validation reports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SphereFunction};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub schema_version: u32,
    pub method: String,
    pub rel_l2: f64,
    pub rel_l2_after_scale: f64,
    pub best_fit_scalar: f64,
    pub grid: GridSpec,
    pub runtime_ms: u64,
}

// Σ w a b over hemisphere nodes with the W̃ weight, restricted to x_{n+1} >= min_height
fn weighted_dot(a: &SphereFunction, b: &SphereFunction, min_height: f64) -> Result<f64> {
    let grid = a.grid();
    if !std::sync::Arc::ptr_eq(grid, b.grid()) && grid.spec() != b.grid().spec() {
        return Err(Error::SpecMismatch("functions live on different grids"));
    }
    let n = grid.n() as f64;
    let exponent = n - 2.0 * grid.lambda() - 1.0;
    let mut total = 0.0;
    for j in 0..grid.radii().len() {
        let z = grid.height(j);
        if z < min_height {
            continue;
        }
        // dσ = dx'/z on the hemisphere, W̃ = z^{n - 2λ - 1}
        let radial = grid.radial_weights()[j] * z.powf(exponent) / z;
        let mut row = 0.0;
        for i in 0..grid.n_dirs() {
            row += grid.directions().weight(i) * a.values()[[i, j]] * b.values()[[i, j]];
        }
        total += radial * row;
    }
    Ok(total)
}

/// ‖a - b‖ / ‖b‖ in L²(S^n_+; W̃), over nodes with x_{n+1} >= min_height.
pub fn relative_difference(a: &SphereFunction, b: &SphereFunction, min_height: f64) -> Result<f64> {
    let bb = weighted_dot(b, b, min_height)?;
    if !(bb > 0.0) {
        return Err(Error::Degenerate("reference function has zero norm".into()));
    }
    let diff = a.combine(1.0, b, -1.0)?;
    Ok((weighted_dot(&diff, &diff, min_height)? / bb).sqrt())
}

/// Relative errors of `rec` against `truth`, before and after the best
/// scalar fit s = ⟨rec, truth⟩ / ⟨rec, rec⟩.
pub fn compare(truth: &SphereFunction, rec: &SphereFunction) -> Result<(f64, f64, f64)> {
    compare_above(truth, rec, 0.0)
}

/// [`compare`] restricted to x_{n+1} >= min_height.
pub fn compare_above(truth: &SphereFunction, rec: &SphereFunction, min_height: f64) -> Result<(f64, f64, f64)> {
    let tt = weighted_dot(truth, truth, min_height)?;
    if !(tt > 0.0) {
        return Err(Error::Degenerate("truth has zero norm".into()));
    }
    let rr = weighted_dot(rec, rec, min_height)?;
    if !(rr > 0.0) {
        return Err(Error::Degenerate("reconstruction is identically zero".into()));
    }
    let scalar = weighted_dot(rec, truth, min_height)? / rr;
    let diff = rec.combine(1.0, truth, -1.0)?;
    let rel_l2 = (weighted_dot(&diff, &diff, min_height)? / tt).sqrt();
    let fitted = rec.combine(scalar, truth, -1.0)?;
    let after = (weighted_dot(&fitted, &fitted, min_height)? / tt).sqrt();
    Ok((rel_l2, after.min(rel_l2), scalar))
}

impl ValidationReport {
    pub fn new(method: &str, truth: &SphereFunction, rec: &SphereFunction, runtime_ms: u64) -> Result<Self> {
        let (rel_l2, rel_l2_after_scale, best_fit_scalar) = compare(truth, rec)?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            method: method.to_string(),
            rel_l2,
            rel_l2_after_scale,
            best_fit_scalar,
            grid: truth.grid().spec().clone(),
            runtime_ms,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, GridSpec};

    fn sample() -> SphereFunction {
        let grid = make_grid(&GridSpec::default_for(2).unwrap().scaled(1, 8)).unwrap();
        SphereFunction::sample(grid, &|xp: &[f64], z: f64| 1.0 + xp[0] * z)
    }

    #[test]
    fn identical_functions() {
        let f = sample();
        let (a, b, s) = compare(&f, &f).unwrap();
        assert_eq!((a, b), (0.0, 0.0));
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn doubled_reconstruction() {
        let f = sample();
        let (a, b, s) = compare(&f, &f.scaled(2.0)).unwrap();
        assert!((a - 1.0).abs() < 1e-12);
        assert!(b < 1e-15);
        assert!((s - 0.5).abs() < 1e-14);
    }

    #[test]
    fn zero_reconstruction_is_flagged() {
        let f = sample();
        let zero = f.scaled(0.0);
        assert!(matches!(compare(&f, &zero), Err(Error::Degenerate(_))));
        assert!(matches!(compare(&zero, &f), Err(Error::Degenerate(_))));
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use crate::grid::{make_grid, GridSpec};
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn metrics_are_consistent(scale in 0.1f64..5.0, noise in 0.0f64..0.5, freq in 0.5f64..4.0) {
            let grid = make_grid(&GridSpec::default_for(2).unwrap().scaled(1, 8)).unwrap();
            let truth = SphereFunction::sample(grid.clone(), &|xp: &[f64], z: f64| 1.0 + xp[0] * z);
            let rec = SphereFunction::sample(grid, &move |xp: &[f64], z: f64| {
                scale * (1.0 + xp[0] * z) + noise * (freq * xp[1]).sin()
            });
            let (rel, after, scalar) = compare(&truth, &rec).unwrap();
            prop_assert!(after <= rel + 1e-15);
            prop_assert!(scalar.is_finite());
            if noise == 0.0 {
                prop_assert!((scalar * scale - 1.0).abs() < 1e-12);
                prop_assert!(after < 1e-12);
            }
        }
    }
}

use std::sync::Arc;

use ndarray::Array2;
use proptest::prelude::*;

use vslice::grid::{make_grid, Grid, GridSpec, RadialRule, SliceData, SphereFunction, TRule};
use vslice::harness::io::{decode_sinogram, decode_volume, encode_sinogram, encode_volume, Transform};

fn grid(n: usize, n_angular: usize, n_radial: usize, n_t: usize, legendre: bool, lambda: Option<f64>) -> Arc<Grid> {
    make_grid(&GridSpec {
        n,
        n_angular,
        n_radial,
        n_t,
        radial_rule: RadialRule::GaussJacobi,
        t_rule: if legendre { TRule::GaussLegendre } else { TRule::Chebyshev },
        lambda,
    })
    .unwrap()
}

fn values(rows: usize, cols: usize, seed: &[f64]) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |(i, j)| seed[(i * cols + j) % seed.len()] * (1.0 + i as f64) - j as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sinogram_round_trip_is_bitwise(
        n in 2usize..=3,
        half_angular in 2usize..5,
        n_t in 4usize..10,
        legendre in any::<bool>(),
        lambda in proptest::option::of(1.6f64..3.0),
        full in any::<bool>(),
        seed in proptest::collection::vec(-1e6f64..1e6, 1..16),
    ) {
        let g = grid(n, 2 * half_angular, 4, n_t, legendre, lambda);
        let data = SliceData::new(g.clone(), values(g.n_dirs(), n_t, &seed)).unwrap();
        let transform = if full { Transform::Full } else { Transform::Hemispherical };
        let (back, t) = decode_sinogram(&encode_sinogram(&data, transform)).unwrap();
        prop_assert_eq!(t, transform);
        prop_assert_eq!(back.grid().spec(), g.spec());
        for (a, b) in back.values().iter().zip(data.values()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn volume_round_trip_is_bitwise(
        n in 2usize..=3,
        half_angular in 2usize..5,
        n_radial in 4usize..8,
        seed in proptest::collection::vec(-1e6f64..1e6, 1..16),
    ) {
        let g = grid(n, 2 * half_angular, n_radial, 4, true, None);
        let f = SphereFunction::new(g.clone(), values(g.n_dirs(), n_radial, &seed)).unwrap();
        let back = decode_volume(&encode_volume(&f)).unwrap();
        prop_assert_eq!(back.grid().spec(), g.spec());
        for (a, b) in back.values().iter().zip(f.values()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

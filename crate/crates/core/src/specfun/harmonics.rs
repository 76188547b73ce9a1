//! Real orthonormal spherical harmonics on S^1 and S^2 under the
//! unnormalized surface measure.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Dimension of the space of degree-m spherical harmonics on S^{n-1}.
pub fn harmonic_dim(n: usize, m: usize) -> usize {
    assert!(n >= 2, "harmonic_dim needs n >= 2");
    if m == 0 {
        return 1;
    }
    // (n + 2m - 2) (n + m - 3)! / (m! (n - 2)!)
    let mut ratio = 1.0f64;
    // (n+m-3)! / (m! (n-2)!) = C(n+m-3, m) * ... evaluated as a product
    // (n+m-3)!/((n-2)! (m-1)!) / m = C(n+m-3, m-1) / m
    for i in 0..(m - 1) {
        ratio = ratio * (n - 1 + i) as f64 / (i + 1) as f64;
    }
    ((n + 2 * m - 2) as f64 * ratio / m as f64).round() as usize
}

/// Y_{m,mu}(point), 1 <= mu <= d_n(m), `point` a unit vector in R^n.
///
/// n = 2: 1/sqrt(2π), cos(mα)/sqrt(π), sin(mα)/sqrt(π).
/// n = 3: mu = 1 is the zonal harmonic; mu = 2j and 2j + 1 carry cos(jφ)
/// and sin(jφ). No Condon-Shortley phase.
pub fn sph_harm(n: usize, m: usize, mu: usize, point: &[f64]) -> Result<f64> {
    if !(n == 2 || n == 3) {
        return Err(Error::Parameter(format!("spherical harmonics are provided for n = 2, 3 only (got {n})")));
    }
    if point.len() != n {
        return Err(Error::Parameter(format!("point has {} coordinates, expected {n}", point.len())));
    }
    if mu == 0 || mu > harmonic_dim(n, m) {
        return Err(Error::Index(format!("mu = {mu} outside 1..={} for degree {m}", harmonic_dim(n, m))));
    }
    let norm: f64 = point.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("point is not on the unit sphere (|x| = {norm})")));
    }
    let basis = HarmonicBasis::new(n, m);
    let mut out = vec![0.0; basis.len()];
    basis.eval_into(point, &mut out);
    Ok(out[basis.offset(m) + mu - 1])
}

/// Single harmonic Y_{m,mu} without validation or allocation; `point`
/// must be a unit vector in R^2 or R^3 and `mu` in range.
pub fn real_harmonic(m: usize, mu: usize, point: &[f64]) -> f64 {
    if point.len() == 2 {
        if m == 0 {
            return 1.0 / (2.0 * PI).sqrt();
        }
        let alpha = point[1].atan2(point[0]);
        let (s, c) = (m as f64 * alpha).sin_cos();
        return if mu == 1 { c } else { s } / PI.sqrt();
    }
    let (x, y, z) = (point[0], point[1], point[2]);
    let order = mu / 2;
    let s = (x * x + y * y).sqrt();
    // P̄_j^j, then upward in degree along column j
    let mut pjj = 1.0 / (4.0 * PI).sqrt();
    for j in 1..=order {
        pjj *= ((2 * j + 1) as f64 / (2 * j) as f64).sqrt() * s;
    }
    let mut prev = 0.0;
    let mut cur = pjj;
    let jf = order as f64;
    for l in (order + 1)..=m {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - jf * jf)).sqrt();
        let b = if l == order + 1 {
            0.0
        } else {
            (((lf - 1.0) * (lf - 1.0) - jf * jf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt()
        };
        let next = a * (z * cur - b * prev);
        prev = cur;
        cur = next;
    }
    if order == 0 {
        return cur;
    }
    let (sj, cj) = (jf * y.atan2(x)).sin_cos();
    std::f64::consts::SQRT_2 * cur * if mu.is_multiple_of(2) { cj } else { sj }
}

/// Evaluates every real harmonic of degree <= `max_degree` at once.
///
/// Output layout: degree-major, `mu` ascending within a degree.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    n: usize,
    max_degree: usize,
    offsets: Vec<usize>,
}

impl HarmonicBasis {
    pub fn new(n: usize, max_degree: usize) -> Self {
        assert!(n == 2 || n == 3, "HarmonicBasis supports n = 2, 3");
        let mut offsets = Vec::with_capacity(max_degree + 2);
        let mut acc = 0;
        for m in 0..=max_degree {
            offsets.push(acc);
            acc += harmonic_dim(n, m);
        }
        offsets.push(acc);
        Self { n, max_degree, offsets }
    }

    pub fn len(&self) -> usize {
        self.offsets[self.max_degree + 1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn offset(&self, m: usize) -> usize {
        self.offsets[m]
    }

    /// Writes every harmonic at `point` (assumed unit length) into `out`.
    pub fn eval_into(&self, point: &[f64], out: &mut [f64]) {
        match self.n {
            2 => self.eval_circle(point, out),
            _ => self.eval_sphere(point, out),
        }
    }

    fn eval_circle(&self, point: &[f64], out: &mut [f64]) {
        let alpha = point[1].atan2(point[0]);
        out[0] = 1.0 / (2.0 * PI).sqrt();
        let inv = 1.0 / PI.sqrt();
        for m in 1..=self.max_degree {
            let o = self.offsets[m];
            let (s, c) = (m as f64 * alpha).sin_cos();
            out[o] = c * inv;
            out[o + 1] = s * inv;
        }
    }

    fn eval_sphere(&self, point: &[f64], out: &mut [f64]) {
        let (x, y, z) = (point[0], point[1], point[2]);
        let s = (x * x + y * y).sqrt();
        let phi = y.atan2(x);
        let lmax = self.max_degree;
        // normalized associated Legendre functions, column by order j
        let mut pbar = vec![0.0; (lmax + 1) * (lmax + 1)];
        let idx = |l: usize, j: usize| l * (lmax + 1) + j;
        let mut pjj = 1.0 / (4.0 * PI).sqrt();
        for j in 0..=lmax {
            if j > 0 {
                pjj *= ((2 * j + 1) as f64 / (2 * j) as f64).sqrt() * s;
            }
            pbar[idx(j, j)] = pjj;
            if j < lmax {
                pbar[idx(j + 1, j)] = ((2 * j + 3) as f64).sqrt() * z * pjj;
            }
            for l in (j + 2)..=lmax {
                let lf = l as f64;
                let jf = j as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - jf * jf)).sqrt();
                let b = (((lf - 1.0) * (lf - 1.0) - jf * jf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
                pbar[idx(l, j)] = a * (z * pbar[idx(l - 1, j)] - b * pbar[idx(l - 2, j)]);
            }
        }
        let sqrt2 = std::f64::consts::SQRT_2;
        for l in 0..=lmax {
            let o = self.offsets[l];
            out[o] = pbar[idx(l, 0)];
            for j in 1..=l {
                let (sj, cj) = (j as f64 * phi).sin_cos();
                out[o + 2 * j - 1] = sqrt2 * pbar[idx(l, j)] * cj;
                out[o + 2 * j] = sqrt2 * pbar[idx(l, j)] * sj;
            }
        }
    }
}

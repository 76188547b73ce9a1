//! One-dimensional profile tools along the t axis: not-a-knot cubic
//! splines with exact logarithmic moments, and Chebyshev series with the
//! closed-form logarithmic kernel.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Knots and the factored not-a-knot system, shared by every row of a table.
#[derive(Debug, Clone)]
pub struct SplineBasis {
    knots: Vec<f64>,
    steps: Vec<f64>,
    // Thomas factorization of the reduced system for M_1 .. M_{N-2}
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl SplineBasis {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        let count = knots.len();
        if count < 4 {
            return Err(Error::Parameter(format!("spline needs at least 4 knots, got {count}")));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parameter("spline knots must be strictly increasing".into()));
        }
        let steps: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        let m = count - 2;
        let mut sub = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut sup = vec![0.0; m];
        for r in 0..m {
            let i = r + 1;
            let (hl, hr) = (steps[i - 1], steps[i]);
            sub[r] = hl;
            diag[r] = 2.0 * (hl + hr);
            sup[r] = hr;
        }
        // not-a-knot: eliminate M_0 and M_{N-1}
        let (h0, h1) = (steps[0], steps[1]);
        diag[0] = (h0 + h1) * (h0 + 2.0 * h1) / h1;
        sup[0] = (h1 * h1 - h0 * h0) / h1;
        let (a, b) = (steps[count - 3], steps[count - 2]);
        diag[m - 1] = (a + b) * (2.0 * a + b) / a;
        sub[m - 1] = (a * a - b * b) / a;
        if m == 2 {
            // both rows were overwritten at once: restore the couplings
            sup[0] = (h1 * h1 - h0 * h0) / h1;
            sub[1] = (a * a - b * b) / a;
        }
        // forward elimination
        for r in 1..m {
            let factor = sub[r] / diag[r - 1];
            sub[r] = factor;
            diag[r] -= factor * sup[r - 1];
        }
        Ok(Self { knots, steps, sub, diag, sup })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    /// Piece coefficients [a, b, c, d] of y on [x_i, x_{i+1}] in u = t - x_i.
    pub fn fit(&self, values: &[f64], out: &mut [[f64; 4]]) {
        let count = self.knots.len();
        debug_assert_eq!(values.len(), count);
        debug_assert_eq!(out.len(), count - 1);
        let h = &self.steps;
        let slope = |i: usize| (values[i + 1] - values[i]) / h[i];
        let m = count - 2;
        let mut moments = vec![0.0; count];
        let mut rhs: Vec<f64> = (1..=m).map(|i| 6.0 * (slope(i) - slope(i - 1))).collect();
        for r in 1..m {
            rhs[r] -= self.sub[r] * rhs[r - 1];
        }
        rhs[m - 1] /= self.diag[m - 1];
        for r in (0..m - 1).rev() {
            rhs[r] = (rhs[r] - self.sup[r] * rhs[r + 1]) / self.diag[r];
        }
        moments[1..=m].copy_from_slice(&rhs);
        moments[0] = ((h[0] + h[1]) * moments[1] - h[0] * moments[2]) / h[1];
        let (a, b) = (h[count - 3], h[count - 2]);
        moments[count - 1] = ((a + b) * moments[count - 2] - b * moments[count - 3]) / a;
        for i in 0..count - 1 {
            let hi = h[i];
            out[i] = [
                values[i],
                slope(i) - hi * (2.0 * moments[i] + moments[i + 1]) / 6.0,
                moments[i] / 2.0,
                (moments[i + 1] - moments[i]) / (6.0 * hi),
            ];
        }
    }

    /// Index of the piece used at t (end pieces extend outward).
    pub fn piece(&self, t: f64) -> usize {
        let last = self.knots.len() - 2;
        match self.knots.binary_search_by(|k| k.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(i) => i.min(last),
            Err(i) => i.saturating_sub(1).min(last),
        }
    }
}

#[inline]
fn horner(c: &[f64; 4], u: f64) -> f64 {
    c[0] + u * (c[1] + u * (c[2] + u * c[3]))
}

/// Many spline profiles over one knot set, zero outside `support`.
#[derive(Debug, Clone)]
pub struct ProfileTable {
    basis: Arc<SplineBasis>,
    rows: usize,
    coeffs: Vec<[f64; 4]>,
    support: (f64, f64),
}

impl ProfileTable {
    /// `values` is row-major with `basis.len()` entries per row.
    pub fn new(basis: Arc<SplineBasis>, values: &[f64], support: (f64, f64)) -> Self {
        let width = basis.len();
        assert_eq!(values.len() % width, 0);
        let rows = values.len() / width;
        let mut coeffs = vec![[0.0; 4]; rows * (width - 1)];
        for (row, out) in values.chunks_exact(width).zip(coeffs.chunks_exact_mut(width - 1)) {
            basis.fit(row, out);
        }
        Self { basis, rows, coeffs, support }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn basis(&self) -> &SplineBasis {
        &self.basis
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn row_coeffs(&self, row: usize) -> &[[f64; 4]] {
        let w = self.basis.len() - 1;
        &self.coeffs[row * w..(row + 1) * w]
    }

    #[inline]
    pub fn eval(&self, row: usize, t: f64) -> f64 {
        if !(t > self.support.0 && t < self.support.1) {
            return 0.0;
        }
        let p = self.basis.piece(t);
        let w = self.basis.len() - 1;
        horner(&self.coeffs[row * w + p], t - self.basis.knots[p])
    }

    /// Piece lookup shared by many rows at the same t.
    #[inline]
    pub fn locate(&self, t: f64) -> Option<(usize, f64)> {
        if !(t > self.support.0 && t < self.support.1) {
            return None;
        }
        let p = self.basis.piece(t);
        Some((p, t - self.basis.knots[p]))
    }

    #[inline]
    pub fn eval_located(&self, row: usize, loc: (usize, f64)) -> f64 {
        let w = self.basis.len() - 1;
        horner(&self.coeffs[row * w + loc.0], loc.1)
    }

    /// ∫_{support} log|s - t| S_row(t) dt, exact for the piecewise cubic.
    pub fn log_moment(&self, row: usize, s: f64) -> f64 {
        let knots = &self.basis.knots;
        let coeffs = self.row_coeffs(row);
        let (lo, hi) = self.support;
        let last = knots.len() - 1;
        let mut total = 0.0;
        // leading extension [lo, x_0] with piece 0
        if lo < knots[0] {
            total += log_moment_piece(&coeffs[0], knots[0], lo, knots[0], s);
        }
        for i in 0..last {
            let a = knots[i].max(lo);
            let b = knots[i + 1].min(hi);
            if b > a {
                total += log_moment_piece(&coeffs[i], knots[i], a, b, s);
            }
        }
        if hi > knots[last] {
            total += log_moment_piece(&coeffs[last - 1], knots[last - 1], knots[last], hi, s);
        }
        total
    }
}

// ∫_0^v u^k log|u| du = v^{k+1}/(k+1) (log|v| - 1/(k+1))
#[inline]
fn log_power_antiderivative(k: usize, v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    let kp = (k + 1) as f64;
    v.powi(k as i32 + 1) / kp * (v.abs().ln() - 1.0 / kp)
}

/// ∫_a^b log|s - t| P(t - origin) dt for the cubic P with coefficients `c`.
pub fn log_moment_piece(c: &[f64; 4], origin: f64, a: f64, b: f64, s: f64) -> f64 {
    // re-expand P about s: P(t - origin) = Σ e_k (t - s)^k
    let delta = s - origin;
    let e = [
        horner(c, delta),
        c[1] + delta * (2.0 * c[2] + 3.0 * c[3] * delta),
        c[2] + 3.0 * c[3] * delta,
        c[3],
    ];
    let (va, vb) = (a - s, b - s);
    (0..4)
        .map(|k| e[k] * (log_power_antiderivative(k, vb) - log_power_antiderivative(k, va)))
        .sum()
}

/// Profiles resampled on a uniform grid over `support`, read back by
/// 4-point Lagrange interpolation; zero outside the support.
#[derive(Debug, Clone)]
pub struct UniformProfiles {
    rows: usize,
    count: usize,
    start: f64,
    step: f64,
    values: Vec<f64>,
}

impl UniformProfiles {
    /// Samples `f(row, t)` at `count` equispaced points of `support`.
    pub fn from_fn<F>(rows: usize, support: (f64, f64), count: usize, f: F) -> Self
    where
        F: Fn(usize, f64) -> f64 + Sync,
    {
        assert!(count >= 4 && support.1 > support.0);
        let step = (support.1 - support.0) / (count - 1) as f64;
        let values = (0..rows)
            .into_par_iter()
            .flat_map_iter(|row| {
                let f = &f;
                (0..count).map(move |k| f(row, support.0 + k as f64 * step))
            })
            .collect();
        Self { rows, count, start: support.0, step, values }
    }

    pub fn from_table(table: &ProfileTable, count: usize) -> Self {
        Self::from_fn(table.rows(), table.support(), count, |row, t| table.eval(row, t))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn support(&self) -> (f64, f64) {
        (self.start, self.start + (self.count - 1) as f64 * self.step)
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.count..(row + 1) * self.count]
    }

    /// Rows P_a(t) + P_b(-t) for each pair (a, b); the support must be
    /// symmetric about 0.
    pub fn folded(&self, pairs: &[(usize, usize)]) -> Self {
        let count = self.count;
        let mut values = Vec::with_capacity(pairs.len() * count);
        for &(a, b) in pairs {
            let (ra, rb) = (self.row(a), self.row(b));
            values.extend((0..count).map(|k| ra[k] + rb[count - 1 - k]));
        }
        Self { rows: pairs.len(), values, ..*self }
    }

    #[inline]
    pub fn eval(&self, row: usize, t: f64) -> f64 {
        let u = (t - self.start) / self.step;
        if !(u >= 0.0 && u <= (self.count - 1) as f64) {
            return 0.0;
        }
        let k = (u as usize).saturating_sub(1).min(self.count - 4);
        let s = u - k as f64;
        let v = &self.values[row * self.count + k..row * self.count + k + 4];
        let (s1, s2, s3) = (s - 1.0, s - 2.0, s - 3.0);
        (-s1 * s2 * s3 * v[0] + 3.0 * s * s2 * s3 * v[1] - 3.0 * s * s1 * s3 * v[2] + s * s1 * s2 * v[3]) / 6.0
    }
}

/// Chebyshev series Σ c_k T_k(t) on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    coeffs: Vec<f64>,
}

/// True when `nodes` are the first-kind Gauss–Chebyshev points in ascending order.
pub fn is_chebyshev_gauss(nodes: &[f64]) -> bool {
    let count = nodes.len();
    nodes.iter().enumerate().all(|(j, &t)| {
        let want = -(((2 * j + 1) as f64) * PI / (2.0 * count as f64)).cos();
        (t - want).abs() < 1e-13
    })
}

/// Barycentric weights for arbitrary distinct nodes, scaled to max |w| = 1.
pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let logs: Vec<(f64, f64)> = nodes
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            let mut log_abs = 0.0;
            let mut sign = 1.0;
            for (k, &xk) in nodes.iter().enumerate() {
                if k != j {
                    let d = xj - xk;
                    log_abs -= d.abs().ln();
                    if d < 0.0 {
                        sign = -sign;
                    }
                }
            }
            (log_abs, sign)
        })
        .collect();
    let top = logs.iter().map(|l| l.0).fold(f64::NEG_INFINITY, f64::max);
    logs.iter().map(|&(l, s)| s * (l - top).exp()).collect()
}

/// Barycentric interpolation at `t`.
pub fn barycentric_eval(nodes: &[f64], weights: &[f64], values: &[f64], t: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&x, &w), &v) in nodes.iter().zip(weights).zip(values) {
        let d = t - x;
        if d == 0.0 {
            return v;
        }
        let q = w / d;
        num += q * v;
        den += q;
    }
    num / den
}

impl ChebSeries {
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Interpolant through values at ascending first-kind Gauss–Chebyshev points.
    pub fn from_gauss_values(values: &[f64]) -> Self {
        let count = values.len();
        let nf = count as f64;
        let mut coeffs = vec![0.0; count];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (idx, &v) in values.iter().enumerate() {
                // ascending index idx corresponds to j = count - idx
                let theta = (2 * (count - idx) - 1) as f64 * PI / (2.0 * nf);
                acc += v * (k as f64 * theta).cos();
            }
            *c = 2.0 * acc / nf;
        }
        coeffs[0] *= 0.5;
        Self { coeffs }
    }

    /// Degree `count - 1` interpolant of values on arbitrary nodes, built by
    /// resampling to Gauss–Chebyshev points.
    pub fn fit(nodes: &[f64], values: &[f64]) -> Self {
        if is_chebyshev_gauss(nodes) {
            return Self::from_gauss_values(values);
        }
        let weights = barycentric_weights(nodes);
        let count = nodes.len();
        let resampled: Vec<f64> = (0..count)
            .map(|idx| {
                let t = -(((2 * idx + 1) as f64) * PI / (2.0 * count as f64)).cos();
                barycentric_eval(nodes, &weights, values, t)
            })
            .collect();
        Self::from_gauss_values(&resampled)
    }

    pub fn eval(&self, t: f64) -> f64 {
        clenshaw(&self.coeffs, t)
    }

    pub fn derivative(&self) -> Self {
        let count = self.coeffs.len();
        if count <= 1 {
            return Self { coeffs: vec![0.0] };
        }
        let mut d = vec![0.0; count];
        for k in (1..count).rev() {
            let next = if k + 1 < count { d[k + 1] } else { 0.0 };
            d[k - 1] = next + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        d.truncate(count - 1);
        Self { coeffs: d }
    }

    /// ∫_{-1}^{1} log|s - t| S(t) (1 - t²)^{-1/2} dt for any real s.
    pub fn log_kernel(&self, s: f64) -> f64 {
        let c = &self.coeffs;
        if s.abs() <= 1.0 {
            // -π [c_0 log 2 + Σ_{k>=1} c_k T_k(s) / k]
            let mut b1 = 0.0;
            let mut b2 = 0.0;
            for k in (1..c.len()).rev() {
                let b0 = c[k] / k as f64 + 2.0 * s * b1 - b2;
                b2 = b1;
                b1 = b0;
            }
            // Σ_{k>=1} a_k T_k(s) = s b1 - b2 with a_0 = 0
            -PI * (c[0] * 2f64.ln() + s * b1 - b2)
        } else {
            let z = s.abs() + (s * s - 1.0).sqrt();
            let w = s.signum() / z;
            let mut acc = 0.0;
            for k in (1..c.len()).rev() {
                acc = acc * w + c[k] / k as f64;
            }
            PI * c[0] * (z / 2.0).ln() - PI * w * acc
        }
    }
}

pub fn clenshaw(c: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + t * b1 - b2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{gauss_chebyshev, gauss_legendre};
    use proptest::prelude::*;

    fn uniform(count: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
    }

    #[test]
    fn spline_reproduces_cubics() {
        for knots in [uniform(4, -1.0, 1.0), uniform(9, -0.8, 0.9), gauss_legendre(12).0] {
            let basis = SplineBasis::new(knots.clone()).unwrap();
            let f = |t: f64| 0.3 - 1.2 * t + 0.7 * t * t + 2.1 * t * t * t;
            let vals: Vec<f64> = knots.iter().map(|&t| f(t)).collect();
            let table = ProfileTable::new(Arc::new(basis), &vals, (-1.0, 1.0));
            for t in uniform(41, -0.999, 0.999) {
                assert!((table.eval(0, t) - f(t)).abs() < 1e-12, "t={t}");
            }
            assert_eq!(table.eval(0, 1.0), 0.0);
            assert_eq!(table.eval(0, -1.5), 0.0);
        }
    }

    #[test]
    fn spline_converges_at_fourth_order() {
        let err = |count: usize| {
            let knots = uniform(count, -1.0, 1.0);
            let vals: Vec<f64> = knots.iter().map(|t| (2.0 * t).sin()).collect();
            let table = ProfileTable::new(Arc::new(SplineBasis::new(knots).unwrap()), &vals, (-2.0, 2.0));
            uniform(301, -0.99, 0.99)
                .into_iter()
                .map(|t| (table.eval(0, t) - (2.0 * t).sin()).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(21) / err(41);
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    }

    #[test]
    fn log_moment_of_constant() {
        let knots = gauss_chebyshev(32).0;
        let vals = vec![1.0; 32];
        let table = ProfileTable::new(Arc::new(SplineBasis::new(knots).unwrap()), &vals, (-1.0, 1.0));
        for s in [-0.999, -0.5, 0.0, 0.3, 0.9999, 1.0, 1.7, -3.0] {
            let want = (1.0 - s) * (1.0f64 - s).abs().ln() + (1.0 + s) * (1.0f64 + s).abs().ln() - 2.0;
            let want = if (1.0 - s) == 0.0 { (1.0 + s) * (1.0 + s).ln() - 2.0 } else { want };
            assert!((table.log_moment(0, s) - want).abs() < 1e-13, "s={s}");
        }
    }

    #[test]
    fn log_moment_matches_split_quadrature() {
        // cubic pieces integrated against log|s - t| by graded Gauss–Legendre
        // on each side of the singular point
        let knots = uniform(11, -0.9, 0.9);
        let vals: Vec<f64> = knots.iter().map(|t| (3.0 * t).cos() * (1.0 - t * t)).collect();
        let table = ProfileTable::new(Arc::new(SplineBasis::new(knots).unwrap()), &vals, (-1.0, 1.0));
        let (gx, gw) = gauss_legendre(20);
        let panel = |lo: f64, hi: f64, s: f64| -> f64 {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            gx.iter()
                .zip(&gw)
                .map(|(x, wt)| {
                    let t = mid + half * x;
                    wt * half * (s - t).abs().ln() * table.eval(0, t)
                })
                .sum::<f64>()
        };
        // geometric panels toward the singular endpoint `near`
        let graded = |near: f64, far: f64, s: f64| -> f64 {
            let mut edges = vec![near];
            for p in (0..36).rev() {
                edges.push(near + (far - near) * 0.5f64.powi(p));
            }
            edges.windows(2).map(|w| panel(w[0].min(w[1]), w[0].max(w[1]), s)).sum()
        };
        let mut breaks = vec![-1.0];
        breaks.extend(uniform(11, -0.9, 0.9));
        breaks.push(1.0);
        for s in [-0.95, -0.31, 0.0, 0.42, 0.9, 1.3] {
            let mut want = 0.0;
            for w in breaks.windows(2) {
                let (a, b) = (w[0], w[1]);
                if s > a && s < b {
                    want += graded(s, a, s) + graded(s, b, s);
                } else if s == a {
                    want += graded(a, b, s);
                } else if s == b {
                    want += graded(b, a, s);
                } else {
                    want += panel(a, b, s);
                }
            }
            let got = table.log_moment(0, s);
            assert!((got - want).abs() < 1e-11, "s={s} got={got} want={want}");
        }
    }

    #[test]
    fn chebyshev_fit_and_derivative() {
        let f = |t: f64| (1.3 * t).exp() * (t - 0.2);
        let df = |t: f64| (1.3 * t).exp() * (1.3 * (t - 0.2) + 1.0);
        for nodes in [gauss_chebyshev(30).0, gauss_legendre(30).0] {
            let vals: Vec<f64> = nodes.iter().map(|&t| f(t)).collect();
            let series = ChebSeries::fit(&nodes, &vals);
            let d = series.derivative();
            for t in uniform(17, -1.0, 1.0) {
                assert!((series.eval(t) - f(t)).abs() < 1e-13);
                assert!((d.eval(t) - df(t)).abs() < 1e-11);
            }
        }
        assert!(is_chebyshev_gauss(&gauss_chebyshev(9).0));
        assert!(!is_chebyshev_gauss(&gauss_legendre(9).0));
    }

    #[test]
    fn log_kernel_against_gauss_chebyshev_sum() {
        // ∫ log|s - t| T_k(t) / sqrt(1 - t²) dt with s outside [-1, 1] has a
        // smooth integrand, so a large Gauss–Chebyshev sum is an oracle there;
        // inside, compare with the spline log moment of T_k / sqrt(1 - t²) · (1 - t²)
        let coeffs = vec![0.4, -0.2, 0.7, 0.05, -0.3];
        let series = ChebSeries::from_coeffs(coeffs.clone());
        let (t, w) = gauss_chebyshev(4000);
        for s in [1.2, -1.05, 3.0] {
            let want: f64 = t
                .iter()
                .zip(&w)
                .map(|(&t, &wt)| wt / (1.0 - t * t).sqrt() * (s - t).abs().ln() * clenshaw(&coeffs, t))
                .sum();
            assert!((series.log_kernel(s) - want).abs() < 1e-10, "s={s}");
        }
        // inside: -π T_k(s)/k closed form against the direct Chebyshev sum
        // evaluated at points avoiding nodes (the log singularity is integrable
        // and Gauss–Chebyshev converges like log(N)/N there)
        let k2 = ChebSeries::from_coeffs(vec![0.0, 0.0, 1.0]);
        for s in [0.0, 0.5, -0.8] {
            assert!((k2.log_kernel(s) + PI * (2.0 * s * s - 1.0) / 2.0).abs() < 1e-14);
        }
        let k0 = ChebSeries::from_coeffs(vec![1.0]);
        assert!((k0.log_kernel(0.3) + PI * 2f64.ln()).abs() < 1e-14);
        // continuity across |s| = 1
        let a = series.log_kernel(1.0 - 1e-12);
        let b = series.log_kernel(1.0 + 1e-12);
        assert!((a - b).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn even_profiles_give_even_log_moments(a in -1.0f64..1.0, b in -1.0f64..1.0, s in 0.0f64..1.5) {
            let knots = gauss_chebyshev(24).0;
            let vals: Vec<f64> = knots.iter().map(|t| a + b * t * t).collect();
            let table = ProfileTable::new(Arc::new(SplineBasis::new(knots).unwrap()), &vals, (-1.0, 1.0));
            let lhs = table.log_moment(0, s);
            let rhs = table.log_moment(0, -s);
            prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn uniform_profiles_reproduce_cubics() {
        let p = UniformProfiles::from_fn(2, (-1.5, 1.5), 31, |row, t| (row as f64 + 1.0) * (t * t * t - t + 0.25));
        for &t in &[-1.5, -1.2345, 0.0, 0.77, 1.5] {
            for row in 0..2 {
                let want = (row as f64 + 1.0) * (t * t * t - t + 0.25);
                assert!((p.eval(row, t) - want).abs() < 1e-12, "{t}");
            }
        }
        assert_eq!(p.eval(0, 1.6), 0.0);
        assert_eq!(p.eval(1, -1.51), 0.0);
    }
}

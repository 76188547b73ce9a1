//! Classical orthogonal polynomials by three-term recurrence.

/// Jacobi polynomial P_k^{(a,b)}(t), a, b > -1.
pub fn jacobi_poly(k: usize, a: f64, b: f64, t: f64) -> f64 {
    jacobi_with_derivative(k, a, b, t).0
}

/// (P_k^{(a,b)}(t), d/dt P_k^{(a,b)}(t)).
pub fn jacobi_with_derivative(k: usize, a: f64, b: f64, t: f64) -> (f64, f64) {
    if k == 0 {
        return (1.0, 0.0);
    }
    let ab = a + b;
    let mut p_prev = 1.0;
    let mut p = 0.5 * (a - b) + 0.5 * (ab + 2.0) * t;
    let mut d_prev = 0.0;
    let mut d = 0.5 * (ab + 2.0);
    for j in 2..=k {
        let jf = j as f64;
        let c = 2.0 * jf + ab;
        let a1 = 2.0 * jf * (jf + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (a * a - b * b);
        let a3 = (c - 1.0) * c * (c - 2.0);
        let a4 = 2.0 * (jf + a - 1.0) * (jf + b - 1.0) * c;
        let p_next = ((a2 + a3 * t) * p - a4 * p_prev) / a1;
        let d_next = ((a2 + a3 * t) * d + a3 * p - a4 * d_prev) / a1;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// Gegenbauer polynomial C_m^λ(t), λ > 0.
pub fn gegenbauer_poly(m: usize, lambda: f64, t: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let mut c_prev = 1.0;
    let mut c = 2.0 * lambda * t;
    for j in 2..=m {
        let jf = j as f64;
        let next = (2.0 * t * (jf + lambda - 1.0) * c - (jf + 2.0 * lambda - 2.0) * c_prev) / jf;
        c_prev = c;
        c = next;
    }
    c
}

/// All C_0^λ(t), ..., C_max^λ(t) in one pass.
pub fn gegenbauer_all(max: usize, lambda: f64, t: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if max == 0 {
        return;
    }
    out.push(2.0 * lambda * t);
    for j in 2..=max {
        let jf = j as f64;
        let next = (2.0 * t * (jf + lambda - 1.0) * out[j - 1] - (jf + 2.0 * lambda - 2.0) * out[j - 2]) / jf;
        out.push(next);
    }
}

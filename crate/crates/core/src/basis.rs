//! Normalized one-dimensional factors of the harmonic product formula.
//!
//! On the level sphere `𝕊^m` (base index `λ = (m-1)/2`) the factor
//! `F_{a,b}(θ) = c_{a,b} C_{a-b}^{λ+b}(cos θ) sin^b θ` is scaled to unit norm
//! with respect to the normalized measure `sin^{m-1}θ dθ`. It is computed through
//! orthonormal Gegenbauer recurrences, which never overflow.

use crate::specfun::ln_gamma;

/// Recurrence coefficient `β_j` of the orthonormal polynomials for the weight `(1-t²)^α`.
pub(crate) fn jacobi_beta(alpha: f64, j: usize) -> f64 {
    let jf = j as f64;
    let b = if j == 1 {
        1.0 / (2.0 * alpha + 3.0)
    } else {
        jf * (jf + 2.0 * alpha) / ((2.0 * jf + 2.0 * alpha).powi(2) - 1.0)
    };
    b.sqrt()
}

/// Orthonormal Gegenbauer values `p_0..=p_n` for the normalized weight `(1-t²)^{μ-1/2}`.
pub(crate) fn ortho_gegenbauer_all(mu: f64, n: usize, t: f64, out: &mut Vec<f64>) {
    let alpha = mu - 0.5;
    out.clear();
    out.push(1.0);
    if n == 0 {
        return;
    }
    let b1 = jacobi_beta(alpha, 1);
    out.push(t / b1);
    let mut prev_beta = b1;
    for j in 1..n {
        let bj1 = jacobi_beta(alpha, j + 1);
        let v = (t * out[j] - prev_beta * out[j - 1]) / bj1;
        out.push(v);
        prev_beta = bj1;
    }
}

/// `log ∫_{-1}^{1} (1-t²)^{μ-1/2} dt`.
pub(crate) fn ln_gegenbauer_mass(mu: f64) -> f64 {
    0.5 * std::f64::consts::PI.ln() + ln_gamma(mu + 0.5) - ln_gamma(mu + 1.0)
}

/// Scale `sqrt(Z_λ/Z_{λ+b})` for level sphere `𝕊^m`.
pub(crate) fn level_scale(m: usize, b: usize) -> f64 {
    let lambda = (m as f64 - 1.0) / 2.0;
    (0.5 * (ln_gegenbauer_mass(lambda) - ln_gegenbauer_mass(lambda + b as f64))).exp()
}

/// Table of `F_{a,b}(θ)` for `0 ≤ b ≤ a ≤ lmax`, stored at `a * (lmax + 1) + b`.
pub(crate) fn level_table(m: usize, lmax: usize, cos: f64, sin: f64) -> Vec<f64> {
    let w = lmax + 1;
    let mut table = vec![0.0; w * w];
    let lambda = (m as f64 - 1.0) / 2.0;
    let mut buf = Vec::with_capacity(w);
    let mut sin_pow = 1.0;
    for b in 0..=lmax {
        let scale = level_scale(m, b) * sin_pow;
        ortho_gegenbauer_all(lambda + b as f64, lmax - b, cos, &mut buf);
        for (i, p) in buf.iter().enumerate() {
            table[(b + i) * w + b] = scale * p;
        }
        sin_pow *= sin;
    }
    table
}

/// Single factor `F_{a,b}(θ)` on level `𝕊^m`.
pub(crate) fn level_factor(m: usize, a: usize, b: usize, cos: f64, sin: f64) -> f64 {
    let lambda = (m as f64 - 1.0) / 2.0;
    let mut buf = Vec::with_capacity(a - b + 1);
    ortho_gegenbauer_all(lambda + b as f64, a - b, cos, &mut buf);
    level_scale(m, b) * sin.powi(b as i32) * buf[a - b]
}

//! Scalar special functions: Gegenbauer polynomials, log-gamma sums,
//! harmonic normalization constants and dimension counts.

use crate::error::{domain, Error, Result};
use std::f64::consts::{LN_2, PI};

/// Parameters of a Gegenbauer polynomial `C_m^λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GegenbauerParams {
    pub lambda: f64,
    pub degree: usize,
}

impl GegenbauerParams {
    pub fn new(lambda: f64, degree: usize) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return domain(format!("Gegenbauer index must be positive, got {lambda}"));
        }
        Ok(Self { lambda, degree })
    }
}

/// `C_m^λ(t)` by the forward three-term recurrence, without argument checks.
///
/// Also valid for `λ = 0` in the sense of the recurrence (`C_m^0 = 0` for `m ≥ 1`),
/// which callers never rely on.
pub fn gegenbauer(lambda: f64, m: usize, t: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * lambda * t;
    for j in 2..=m {
        let jf = j as f64;
        let next = (2.0 * (jf + lambda - 1.0) * t * cur - (jf + 2.0 * lambda - 2.0) * prev) / jf;
        prev = cur;
        cur = next;
    }
    cur
}

/// All values `C_0^λ(t), …, C_m^λ(t)`.
pub fn gegenbauer_all(lambda: f64, m: usize, t: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if m == 0 {
        return;
    }
    out.push(2.0 * lambda * t);
    for j in 2..=m {
        let jf = j as f64;
        let v = (2.0 * (jf + lambda - 1.0) * t * out[j - 1] - (jf + 2.0 * lambda - 2.0) * out[j - 2]) / jf;
        out.push(v);
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t.abs() <= 1.0) {
        return domain(format!("argument must lie in [-1, 1], got {t}"));
    }
    Ok(())
}

/// `C_m^λ(t)` for `|t| ≤ 1`.
pub fn gegenbauer_eval(params: GegenbauerParams, t: f64) -> Result<f64> {
    GegenbauerParams::new(params.lambda, params.degree)?;
    check_t(t)?;
    Ok(gegenbauer(params.lambda, params.degree, t))
}

/// `r`-th derivative of `C_m^λ` at `t`, using `d/dt C_m^λ = 2λ C_{m-1}^{λ+1}`.
pub fn gegenbauer_deriv(params: GegenbauerParams, r: usize, t: f64) -> Result<f64> {
    GegenbauerParams::new(params.lambda, params.degree)?;
    check_t(t)?;
    if r > params.degree {
        return Ok(0.0);
    }
    let mut scale = 1.0;
    for i in 0..r {
        scale *= 2.0 * (params.lambda + i as f64);
    }
    Ok(scale * gegenbauer(params.lambda + r as f64, params.degree - r, t))
}

/// `C_m^λ(1) = binom(m + 2λ - 1, m)`.
pub fn gegenbauer_at_one(lambda: f64, m: usize) -> f64 {
    let mut v = 1.0;
    for i in 0..m {
        v *= (2.0 * lambda + i as f64) / (i as f64 + 1.0);
    }
    v
}

/// `log Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `Σ log Γ(num) − Σ log Γ(den)`.
pub fn log_gamma_ratio(num_args: &[f64], den_args: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for &a in num_args {
        if !(a > 0.0) {
            return domain(format!("log-gamma argument must be positive, got {a}"));
        }
        acc += ln_gamma(a);
    }
    for &a in den_args {
        if !(a > 0.0) {
            return domain(format!("log-gamma argument must be positive, got {a}"));
        }
        acc -= ln_gamma(a);
    }
    Ok(acc)
}

fn ln_factorial(n: i64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Checks that `(n, k)` is a valid chain for dimension `d`.
pub(crate) fn validate_chain(d: usize, n: usize, k: &[i64]) -> Result<()> {
    if d < 3 {
        return Err(Error::Index(format!("dimension must be at least 3, got {d}")));
    }
    if k.len() != d - 2 {
        return Err(Error::Index(format!(
            "dimension {d} needs {} chain entries, got {}",
            d - 2,
            k.len()
        )));
    }
    let mut upper = n as i64;
    for (i, &kj) in k.iter().enumerate() {
        let last = i + 1 == k.len();
        let ok = if last { kj.abs() <= upper } else { kj >= 0 && kj <= upper };
        if !ok {
            return Err(Error::Index(format!("chain {k:?} is not admissible for degree {n}")));
        }
        upper = kj;
    }
    Ok(())
}

/// Normalization `A_k^n` of the harmonic `Y_k^{d,n}`, evaluated in log space.
pub fn harmonic_norm_a(d: usize, n: usize, k: &[i64]) -> Result<f64> {
    validate_chain(d, n, k)?;
    let df = d as f64;
    let mut log_a2 = ((d as f64 - 4.0) * (df - 2.0)) * LN_2 - ln_gamma(df / 2.0);
    let mut chain = Vec::with_capacity(d - 1);
    chain.push(n as i64);
    chain.extend_from_slice(k);
    for j in 0..d - 2 {
        let kj = chain[j];
        let kn = chain[j + 1].abs();
        let jf = j as f64;
        log_a2 += (2.0 * kn as f64 - jf) * LN_2 + ln_factorial(kj - kn) + ((2 * kj) as f64 + df - jf - 2.0).ln()
            + 2.0 * ln_gamma((df - jf - 2.0) / 2.0 + kn as f64)
            - 0.5 * PI.ln()
            - ln_gamma((kj + kn) as f64 + df - jf - 2.0);
    }
    Ok((0.5 * log_a2).exp())
}

fn binom_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `dim ℋ_n^d = (2n+d-2)(n+d-3)! / ((d-2)! n!)`.
pub fn dim_harmonic(d: usize, n: usize) -> u64 {
    assert!(d >= 2, "dimension must be at least 2");
    if d == 2 {
        return if n == 0 { 1 } else { 2 };
    }
    let (d, n) = (d as u64, n as u64);
    // (n+d-3)!/(n!(d-3)!) * (2n+d-2)/(d-2)
    let v = binom_u128(n + d - 3, n) * (2 * n + d - 2) as u128 / (d - 2) as u128;
    v as u64
}

/// `dim Π_N(𝕊^{d-1}) = (2N+d-1)(N+d-2)! / ((d-1)! N!)`.
pub fn dim_poly(d: usize, n: usize) -> u64 {
    assert!(d >= 2, "dimension must be at least 2");
    let (d, n) = (d as u64, n as u64);
    let v = binom_u128(n + d - 2, n) * (2 * n + d - 1) as u128 / (d - 1) as u128;
    v as u64
}

/// `dim Π_{N}(𝕊^{d-1})` with the convention `dim Π_{-1} = 0`.
pub(crate) fn dim_poly_below(d: usize, n: usize) -> usize {
    if n == 0 {
        0
    } else {
        dim_poly(d, n - 1) as usize
    }
}

/// Monomial coefficients of `C_m^λ(u) = Σ_i c_i u^{m-2i}`, `i = 0..=m/2`.
pub fn gegenbauer_monomial_coeffs(lambda: f64, m: usize) -> Vec<f64> {
    (0..=m / 2)
        .map(|i| {
            let p = m - 2 * i;
            let log_mag = ln_gamma(m as f64 - i as f64 + lambda) - ln_gamma(lambda) - ln_factorial(i as i64)
                - ln_factorial(p as i64)
                + p as f64 * LN_2;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * log_mag.exp()
        })
        .collect()
}

/// Multinomial coefficient `|α|! / ∏ α_i!`.
pub fn multinomial(alpha: &[usize]) -> f64 {
    let total: usize = alpha.iter().sum();
    let mut v = ln_factorial(total as i64);
    for &a in alpha {
        v -= ln_factorial(a as i64);
    }
    v.exp().round()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn spec_examples() {
        let p = |l, m| GegenbauerParams::new(l, m).unwrap();
        assert_eq!(gegenbauer_eval(p(1.0, 0), 0.3).unwrap(), 1.0);
        assert!(gegenbauer_eval(p(1.0, 2), 0.5).unwrap().abs() < 1e-15);
        assert_relative_eq!(gegenbauer_eval(p(1.0, 3), 1.0).unwrap(), 4.0, epsilon = 1e-14);
        assert_eq!(gegenbauer_deriv(p(1.0, 2), 0, 0.5).unwrap(), gegenbauer(1.0, 2, 0.5));
        assert_relative_eq!(gegenbauer_deriv(p(1.0, 1), 1, 0.7).unwrap(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(gegenbauer_deriv(p(0.5, 2), 2, 0.0).unwrap(), 3.0, epsilon = 1e-14);
        assert!(gegenbauer_eval(GegenbauerParams { lambda: 0.0, degree: 1 }, 0.0).is_err());
        assert!(gegenbauer_eval(p(1.0, 1), 1.5).is_err());
    }

    #[test]
    fn log_gamma_examples() {
        assert!(log_gamma_ratio(&[2.0], &[1.0]).unwrap().abs() < 1e-15);
        assert_relative_eq!(log_gamma_ratio(&[5.0], &[3.0]).unwrap(), 12f64.ln(), epsilon = 1e-14);
        assert_relative_eq!(log_gamma_ratio(&[0.5], &[1.0]).unwrap(), PI.sqrt().ln(), epsilon = 1e-14);
        assert!(log_gamma_ratio(&[0.0], &[]).is_err());
    }

    #[test]
    fn dimensions() {
        assert_eq!(dim_harmonic(3, 2), 5);
        assert_eq!(dim_harmonic(3, 0), 1);
        assert_eq!(dim_harmonic(4, 1), 4);
        assert_eq!(dim_poly(3, 1), 4);
        assert_eq!(dim_poly(3, 0), 1);
        for d in 3..=6 {
            for n in 0..=20 {
                // binomial difference form
                let b = |a: u64, c: u64| binom_u128(a, c) as u64;
                let alt = b((n + d - 1) as u64, (d - 1) as u64) - b((n + d - 3) as u64, (d - 1) as u64);
                assert_eq!(dim_harmonic(d, n), alt, "d={d} n={n}");
            }
        }
    }

    #[test]
    fn monomial_expansion_matches_recurrence() {
        for &lam in &[0.5, 1.0, 1.5, 2.5] {
            for m in 0..10 {
                let c = gegenbauer_monomial_coeffs(lam, m);
                for &u in &[-0.9f64, -0.3, 0.0, 0.4, 1.0] {
                    let v: f64 = c.iter().enumerate().map(|(i, ci)| ci * u.powi((m - 2 * i) as i32)).sum();
                    let scale: f64 = c.iter().enumerate().map(|(i, ci)| (ci * u.powi((m - 2 * i) as i32)).abs()).sum();
                    assert!((v - gegenbauer(lam, m, u)).abs() <= 1e-14 * scale.max(1.0));
                }
            }
        }
    }

    #[test]
    fn norm_constant_small_cases() {
        assert_relative_eq!(harmonic_norm_a(3, 0, &[0]).unwrap(), 1.0, epsilon = 1e-14);
        // d=3: Y_0^n = sqrt(2n+1) P_n, C_n^{1/2} = P_n
        for n in 0..10 {
            assert_relative_eq!(
                harmonic_norm_a(3, n, &[0]).unwrap(),
                ((2 * n + 1) as f64).sqrt(),
                max_relative = 1e-13
            );
        }
        assert!(harmonic_norm_a(3, 1, &[2]).is_err());
        assert!(harmonic_norm_a(4, 2, &[1, 2]).is_err());
    }

    #[test]
    fn norm_constant_is_finite_for_large_degrees() {
        for d in 3..=6 {
            let k = vec![0i64; d - 2];
            for n in [128usize, 300, 512] {
                let a = harmonic_norm_a(d, n, &k).unwrap();
                assert!(a.is_finite() && a > 0.0);
            }
        }
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial(&[2, 1, 0]), 3.0);
        assert_eq!(multinomial(&[1, 1, 1, 1]), 24.0);
        assert_eq!(multinomial(&[]), 1.0);
    }
}

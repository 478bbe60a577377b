//! Gauss–Gegenbauer rules, product rules on `𝕊^m` and directional rules.

use crate::basis::{jacobi_beta, ortho_gegenbauer_all};
use crate::error::{domain, Error, Result};
use crate::specfun::ln_gamma;
use crate::sphere::{plane_rotation, rotation_to_north_vec, Rotation, SpherePoint};
use num_complex::Complex64;
use std::f64::consts::PI;

const MAX_QL_SWEEPS: usize = 60;

/// Quadrature on `[-1, 1]` with weight `(1-t²)^α`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub alpha: f64,
    pub exact_degree: usize,
}

impl Rule1D {
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }

    /// Weights divided by their sum (integration against the normalized weight).
    pub fn normalized(&self) -> Rule1D {
        let s: f64 = self.weights.iter().sum();
        Rule1D { weights: self.weights.iter().map(|w| w / s).collect(), ..self.clone() }
    }

    /// Number of nodes needed to be exact for polynomials of degree `degree`.
    pub fn nodes_for_degree(degree: usize) -> usize {
        degree / 2 + 1
    }
}

/// `∫_{-1}^{1} (1-t²)^α dt`.
pub fn gegenbauer_weight_mass(alpha: f64) -> f64 {
    (0.5 * PI.ln() + ln_gamma(alpha + 1.0) - ln_gamma(alpha + 1.5)).exp()
}

/// Golub–Welsch rule with `n_nodes` nodes for the weight `(1-t²)^α`.
///
/// The Jacobi matrix is diagonalized by implicit-shift QL; nodes are then polished by
/// Newton steps on the orthonormal recurrence and weights taken from the Christoffel sums.
pub fn gauss_gegenbauer(alpha: f64, n_nodes: usize) -> Result<Rule1D> {
    if !(alpha > -1.0) {
        return domain(format!("weight exponent must exceed -1, got {alpha}"));
    }
    if n_nodes == 0 {
        return domain("a Gauss rule needs at least one node");
    }
    let n = n_nodes;
    let mass = gegenbauer_weight_mass(alpha);
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    for j in 1..n {
        off[j - 1] = jacobi_beta(alpha, j);
    }
    tridiagonal_ql(&mut diag, &mut off)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
    let mut nodes: Vec<f64> = order.iter().map(|&i| diag[i]).collect();

    let mu = alpha + 0.5;
    let mut buf = Vec::with_capacity(n + 1);
    for x in nodes.iter_mut() {
        for _ in 0..2 {
            let (p, dp) = ortho_value_and_derivative(mu, n, *x);
            if dp != 0.0 {
                let step = p / dp;
                if step.abs() < 1e-6 {
                    *x -= step;
                }
            }
        }
    }
    let mut weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            ortho_gegenbauer_all(mu, n - 1, x, &mut buf);
            mass / buf.iter().map(|p| p * p).sum::<f64>()
        })
        .collect();

    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -x;
        nodes[j] = x;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(Rule1D { nodes, weights, alpha, exact_degree: 2 * n - 1 })
}

fn ortho_value_and_derivative(mu: f64, n: usize, x: f64) -> (f64, f64) {
    // p_n and p_n' from the orthonormal recurrence
    let alpha = mu - 0.5;
    let (mut p0, mut p1) = (0.0, 1.0);
    let (mut d0, mut d1) = (0.0, 0.0);
    let mut beta_prev = 0.0;
    for j in 0..n {
        let b = jacobi_beta(alpha, j + 1);
        let p2 = (x * p1 - beta_prev * p0) / b;
        let d2 = (p1 + x * d1 - beta_prev * d0) / b;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
        beta_prev = b;
    }
    (p1, d1)
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL.
/// `off[i]` couples rows `i` and `i+1`.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if n == 1 {
        return Ok(());
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(Error::Numeric(format!("tridiagonal QL failed to converge after {MAX_QL_SWEEPS} sweeps")));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

/// Tensor structure of a product rule on `𝕊^m`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ProductStructure {
    /// Equispaced longitude count.
    pub circle: usize,
    /// Latitude rules for `θ_2, …, θ_m` (index 0 is `θ_2`), normalized weights.
    pub latitudes: Vec<Rule1D>,
}

impl ProductStructure {
    /// Node counts from the outermost latitude `θ_m` inwards, ending with the circle.
    pub fn level_sizes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.latitudes.iter().rev().map(|r| r.nodes.len()).collect();
        v.push(self.circle);
        v
    }
}

/// Quadrature on `𝕊^m` with respect to the normalized surface measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub m: usize,
    pub points: Vec<SpherePoint>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
    pub(crate) structure: ProductStructure,
}

impl SphereRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate<F: FnMut(&SpherePoint) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.points.iter().zip(&self.weights).map(|(p, &w)| w * f(p)).sum()
    }
}

/// Product rule on `𝕊^m` exact on `Π_N(𝕊^m)`.
pub fn sphere_rule(m: usize, degree: usize) -> Result<SphereRule> {
    if m == 0 {
        return domain("sphere dimension must be at least 1");
    }
    let circle = degree + 1;
    let n_lat = Rule1D::nodes_for_degree(degree);
    let mut latitudes = Vec::with_capacity(m - 1);
    for level in 2..=m {
        latitudes.push(gauss_gegenbauer((level as f64 - 2.0) / 2.0, n_lat)?.normalized());
    }
    let structure = ProductStructure { circle, latitudes };

    let d = m + 1;
    let sizes = structure.level_sizes();
    let total: usize = sizes.iter().product();
    let mut points = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut counter = vec![0usize; sizes.len()];
    for _ in 0..total {
        // counter[0] runs over θ_m, counter[last] over θ_1
        let mut angles = vec![0.0; m];
        let mut cs = vec![(0.0, 0.0); m];
        let mut w = 1.0;
        for (lvl, &c) in counter.iter().enumerate() {
            if lvl + 1 == sizes.len() {
                let th = 2.0 * PI * c as f64 / circle as f64;
                angles[0] = th;
                cs[0] = (th.cos(), th.sin());
                w /= circle as f64;
            } else {
                let rule = &structure.latitudes[m - 2 - lvl];
                let t = rule.nodes[c];
                let s = ((1.0 - t) * (1.0 + t)).sqrt();
                angles[m - 1 - lvl] = t.acos();
                cs[m - 1 - lvl] = (t, s);
                w *= rule.weights[c];
            }
        }
        let mut x = vec![0.0; d];
        let mut prod = 1.0;
        for i in (2..=d).rev() {
            x[i - 1] = prod * cs[i - 2].0;
            prod *= cs[i - 2].1;
        }
        x[0] = prod;
        points.push(SpherePoint::from_parts(angles, x));
        weights.push(w);
        for lvl in (0..counter.len()).rev() {
            counter[lvl] += 1;
            if counter[lvl] < sizes[lvl] {
                break;
            }
            counter[lvl] = 0;
        }
    }
    Ok(SphereRule { m, points, weights, exact_degree: degree, structure })
}

/// Quadrature on the stabilizer `SO(d-1)` of `e^d` (or on `𝕊^{d-2}` for symmetric wavelets).
#[derive(Debug, Clone, PartialEq)]
pub enum DirectionalRule {
    /// Equispaced rotations in the `(x_1, x_2)` plane.
    So2 { angles: Vec<f64>, weights: Vec<f64>, exact_degree: usize },
    /// A rule on `𝕊^{d-2}`; node `η̂` stands for the rotation `g_{η̂} ∈ SO(d-1)`.
    Sphere(SphereRule),
}

impl DirectionalRule {
    pub fn exact_degree(&self) -> usize {
        match self {
            DirectionalRule::So2 { exact_degree, .. } => *exact_degree,
            DirectionalRule::Sphere(r) => r.exact_degree,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            DirectionalRule::So2 { angles, .. } => angles.len(),
            DirectionalRule::Sphere(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weights(&self) -> &[f64] {
        match self {
            DirectionalRule::So2 { weights, .. } => weights,
            DirectionalRule::Sphere(r) => &r.weights,
        }
    }

    /// The nodes as rotations of `ℝ^d` fixing `e^d`.
    pub fn rotations(&self, d: usize) -> Vec<Rotation> {
        match self {
            DirectionalRule::So2 { angles, .. } => angles.iter().map(|&g| plane_rotation(d, g)).collect(),
            DirectionalRule::Sphere(r) => {
                r.points.iter().map(|p| rotation_to_north_vec(p.cartesian()).embed()).collect()
            }
        }
    }

    pub fn integrate<F: FnMut(&Rotation) -> Complex64>(&self, d: usize, mut f: F) -> Complex64 {
        self.rotations(d).iter().zip(self.weights()).map(|(h, &w)| w * f(h)).sum()
    }
}

/// `2K+1` equispaced angles with equal weights, exact on `Π_{2K}(SO(2))`.
pub fn so2_rule(k: usize) -> DirectionalRule {
    so2_rule_with_nodes(2 * k + 1, 2 * k)
}

pub(crate) fn so2_rule_with_nodes(count: usize, exact_degree: usize) -> DirectionalRule {
    let angles = (0..count).map(|m| 2.0 * PI * m as f64 / count as f64).collect();
    let weights = vec![1.0 / count as f64; count];
    DirectionalRule::So2 { angles, weights, exact_degree }
}

/// Rule on `𝕊^{d-2}` of degree `2K` for the symmetric directional case.
pub fn sphere_directional_rule(d: usize, k: usize) -> Result<DirectionalRule> {
    if d < 4 {
        return domain("the spherical directional rule needs d ≥ 4");
    }
    Ok(DirectionalRule::Sphere(sphere_rule(d - 2, 2 * k)?))
}

/// Writes `node components… weight` lines.
pub fn write_rule_dump<W: std::io::Write>(rule: &SphereRule, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# sphere-frame rule v1 m {} degree {} nodes {}", rule.m, rule.exact_degree, rule.len())?;
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let mut line = String::new();
        for c in p.cartesian() {
            line.push_str(&format!("{c:.16e} "));
        }
        line.push_str(&format!("{w:.16e}"));
        writeln!(out, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_two_points() {
        let r = gauss_gegenbauer(0.0, 2).unwrap();
        assert_relative_eq!(r.nodes[1], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(r.nodes[0], -1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(r.weights[0], 1.0, epsilon = 1e-15);
        let v = r.integrate(|t| Complex64::new(t * t, 0.0));
        assert_relative_eq!(v.re, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn single_node_half_weight() {
        let r = gauss_gegenbauer(0.5, 1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_relative_eq!(r.weights[0], PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(gauss_gegenbauer(-1.0, 3).is_err());
        assert!(gauss_gegenbauer(0.0, 0).is_err());
    }

    #[test]
    fn so2_rule_aliasing() {
        let k = 3;
        let r = so2_rule(k);
        let DirectionalRule::So2 { angles, weights, .. } = &r else { unreachable!() };
        for j in -(2 * k as i64)..=(2 * k as i64) {
            let s: Complex64 = angles.iter().zip(weights).map(|(&g, &w)| w * Complex64::from_polar(1.0, j as f64 * g)).sum();
            let want = if j == 0 { 1.0 } else { 0.0 };
            assert!((s - want).norm() < 1e-14);
        }
        let j = (2 * k + 1) as f64;
        let s: Complex64 = angles.iter().zip(weights).map(|(&g, &w)| w * Complex64::from_polar(1.0, j * g)).sum();
        assert!((s - 1.0).norm() < 1e-13);
        assert_eq!(so2_rule(0).len(), 1);
    }

    #[test]
    fn sphere_rule_sizes() {
        let r = sphere_rule(3, 64).unwrap();
        assert_eq!(r.len(), 65 * 33 * 33);
        let s: f64 = r.weights.iter().sum();
        assert_relative_eq!(s, 1.0, epsilon = 1e-12);
        assert!(r.weights.iter().all(|&w| w > 0.0));
    }
}

//! Geometry on `𝕊^{d-1}`: harmonic indices, coordinates, harmonics and rotations.

use crate::basis::level_factor;
use crate::error::{domain, Error, Result};
use crate::specfun::{dim_poly_below, gegenbauer, validate_chain};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Degree `n` plus chain `(k_1, …, k_{d-2})` labelling `Y_k^{d,n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HarmonicIndex {
    d: usize,
    n: usize,
    k: Vec<i64>,
}

impl HarmonicIndex {
    pub fn new(d: usize, n: usize, k: Vec<i64>) -> Result<Self> {
        validate_chain(d, n, &k)?;
        Ok(Self { d, n, k })
    }

    /// The zonal index `(n, 0, …, 0)`.
    pub fn zonal(d: usize, n: usize) -> Self {
        Self { d, n, k: vec![0; d - 2] }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> &[i64] {
        &self.k
    }

    /// Index of the conjugate harmonic: last chain entry negated.
    pub fn conjugate(&self) -> Self {
        let mut k = self.k.clone();
        if let Some(last) = k.last_mut() {
            *last = -*last;
        }
        Self { d: self.d, n: self.n, k }
    }

    /// Position in the lexicographic layout of `Π_L(𝕊^{d-1})` (independent of `L`).
    pub fn position(&self) -> usize {
        dim_poly_below(self.d, self.n) + chain_rank(self.d, self.n, &self.k)
    }
}

/// Rank of the chain `k` within `ℐ_n^d` under lexicographic order.
pub(crate) fn chain_rank(d: usize, n: usize, k: &[i64]) -> usize {
    if d == 3 {
        (k[0] + n as i64) as usize
    } else {
        let k1 = k[0] as usize;
        dim_poly_below(d - 1, k1) + chain_rank(d - 1, k1, &k[1..])
    }
}

/// All admissible indices of degree `n`, lexicographically ordered.
pub fn enumerate_indices(d: usize, n: usize) -> Vec<HarmonicIndex> {
    assert!(d >= 3, "dimension must be at least 3");
    let mut out = Vec::new();
    let mut chain = Vec::with_capacity(d - 2);
    enumerate_rec(d, n as i64, d - 2, &mut chain, &mut |k| out.push(HarmonicIndex { d, n, k: k.to_vec() }));
    out
}

fn enumerate_rec(d: usize, upper: i64, remaining: usize, chain: &mut Vec<i64>, emit: &mut dyn FnMut(&[i64])) {
    if remaining == 0 {
        emit(chain);
        return;
    }
    let lo = if remaining == 1 { -upper } else { 0 };
    for v in lo..=upper {
        chain.push(v);
        enumerate_rec(d, v.abs(), remaining - 1, chain, emit);
        chain.pop();
    }
}

/// All indices of degree at most `max_degree`, in layout order.
pub fn enumerate_up_to(d: usize, max_degree: usize) -> Vec<HarmonicIndex> {
    (0..=max_degree).flat_map(|n| enumerate_indices(d, n)).collect()
}

/// A point of `𝕊^{d-1}` in spherical and cartesian form.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    angles: Vec<f64>,
    cartesian: Vec<f64>,
}

impl SpherePoint {
    /// From angles `(θ_1, …, θ_{d-1})`.
    pub fn from_angles(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return domain("a sphere point needs at least one angle");
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return domain("angles must be finite");
        }
        let cartesian = angles_to_cartesian(&angles);
        Ok(Self { angles, cartesian })
    }

    /// From a unit vector; fails when `| ‖x‖ − 1 | > 1e-8`.
    pub fn from_cartesian(x: Vec<f64>) -> Result<Self> {
        if x.len() < 2 {
            return domain("a sphere point needs at least two coordinates");
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() <= 1e-8) {
            return domain(format!("vector is not of unit length (norm {norm})"));
        }
        Ok(Self::from_unit_unchecked(x))
    }

    /// From an (approximately) unit vector without checking; the vector is renormalized.
    pub(crate) fn from_unit_unchecked(mut x: Vec<f64>) -> Self {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in &mut x {
                *v /= norm;
            }
        }
        let angles = cartesian_to_angles(&x);
        Self { angles, cartesian: x }
    }

    pub(crate) fn from_parts(angles: Vec<f64>, cartesian: Vec<f64>) -> Self {
        Self { angles, cartesian }
    }

    /// North pole `e^d`.
    pub fn north(d: usize) -> Self {
        let mut x = vec![0.0; d];
        x[d - 1] = 1.0;
        Self { angles: vec![0.0; d - 1], cartesian: x }
    }

    pub fn d(&self) -> usize {
        self.cartesian.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn cartesian(&self) -> &[f64] {
        &self.cartesian
    }
}

fn angles_to_cartesian(angles: &[f64]) -> Vec<f64> {
    let d = angles.len() + 1;
    let mut x = vec![0.0; d];
    // x_i = (∏_{l=i}^{d-1} sin θ_l) cos θ_{i-1} for i ≥ 2, x_1 = ∏ sin θ_l
    let mut prod = 1.0;
    for i in (2..=d).rev() {
        x[i - 1] = prod * angles[i - 2].cos();
        prod *= angles[i - 2].sin();
    }
    x[0] = prod;
    x
}

fn cartesian_to_angles(x: &[f64]) -> Vec<f64> {
    let d = x.len();
    let mut angles = vec![0.0; d - 1];
    let mut prefix = vec![0.0; d + 1];
    for i in 0..d {
        prefix[i + 1] = prefix[i] + x[i] * x[i];
    }
    for i in 2..d {
        // θ_i from x_{i+1} and the norm of x_1..x_i
        angles[i - 1] = prefix[i].sqrt().atan2(x[i]);
    }
    let mut t1 = x[0].atan2(x[1]);
    if t1 < 0.0 {
        t1 += 2.0 * PI;
    }
    if t1 >= 2.0 * PI {
        t1 = 0.0;
    }
    angles[0] = t1;
    angles
}

/// Spherical → cartesian → spherical.
pub fn coords_roundtrip(p: &SpherePoint) -> Result<SpherePoint> {
    let q = SpherePoint::from_cartesian(p.cartesian.clone())?;
    SpherePoint::from_angles(q.angles)
}

/// `Y_k^{d,n}(p)` via the product formula.
pub fn eval_harmonic(idx: &HarmonicIndex, p: &SpherePoint) -> Complex64 {
    let d = idx.d;
    assert_eq!(p.d(), d, "dimension mismatch");
    let mut val = 1.0;
    let mut a = idx.n;
    for j in 0..d - 2 {
        let b = idx.k[j].unsigned_abs() as usize;
        let theta = p.angles[d - 2 - j];
        val *= level_factor(d - 1 - j, a, b, theta.cos(), theta.sin());
        a = b;
    }
    let k_last = idx.k[d - 3] as f64;
    Complex64::from_polar(val, k_last * p.angles[0])
}

/// `((2n+d-2)/(d-2)) C_n^{(d-2)/2}(c)`.
pub fn addition_kernel(d: usize, n: usize, c: f64) -> f64 {
    let df = d as f64;
    (2.0 * n as f64 + df - 2.0) / (df - 2.0) * gegenbauer((df - 2.0) / 2.0, n, c.clamp(-1.0, 1.0))
}

/// `arccos ⟨a, b⟩` with the inner product clamped.
pub fn geodesic_dist(a: &SpherePoint, b: &SpherePoint) -> f64 {
    dot(a.cartesian(), b.cartesian()).clamp(-1.0, 1.0).acos()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// An element of `SO(d)`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    d: usize,
    m: Vec<f64>,
}

impl Rotation {
    pub fn identity(d: usize) -> Self {
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            m[i * d + i] = 1.0;
        }
        Self { d, m }
    }

    /// From a row-major matrix; fails unless orthogonal with determinant one (to 1e-10).
    pub fn from_matrix(d: usize, m: Vec<f64>) -> Result<Self> {
        if m.len() != d * d {
            return domain(format!("expected {} matrix entries, got {}", d * d, m.len()));
        }
        let r = Self { d, m };
        if r.orthogonality_defect() > 1e-10 || (r.det() - 1.0).abs() > 1e-10 {
            return domain("matrix is not a rotation");
        }
        Ok(r)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &[f64] {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i * self.d + j]
    }

    /// `g x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = self.d;
        (0..d).map(|i| dot(&self.m[i * d..(i + 1) * d], x)).collect()
    }

    /// `gᵀ x = g⁻¹ x`.
    pub fn apply_inverse(&self, x: &[f64]) -> Vec<f64> {
        let d = self.d;
        let mut out = vec![0.0; d];
        for i in 0..d {
            let xi = x[i];
            for j in 0..d {
                out[j] += self.m[i * d + j] * xi;
            }
        }
        out
    }

    /// Column `g e^{j+1}` (0-based `j`).
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.d).map(|i| self.m[i * self.d + j]).collect()
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        let d = self.d;
        assert_eq!(d, other.d, "dimension mismatch");
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.m[i * d + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    m[i * d + j] += a * other.m[k * d + j];
                }
            }
        }
        Rotation { d, m }
    }

    pub fn inverse(&self) -> Rotation {
        let d = self.d;
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                m[j * d + i] = self.m[i * d + j];
            }
        }
        Rotation { d, m }
    }

    /// Embeds into `SO(d+1)` acting on the first `d` coordinates.
    pub fn embed(&self) -> Rotation {
        let d = self.d + 1;
        let mut m = vec![0.0; d * d];
        for i in 0..self.d {
            for j in 0..self.d {
                m[i * d + j] = self.m[i * self.d + j];
            }
        }
        m[d * d - 1] = 1.0;
        Rotation { d, m }
    }

    /// `max |gᵀg − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let d = self.d;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let s: f64 = (0..d).map(|k| self.m[k * d + i] * self.m[k * d + j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        let d = self.d;
        let mut a = self.m.clone();
        let mut det = 1.0;
        for c in 0..d {
            let p = (c..d).max_by(|&i, &j| a[i * d + c].abs().total_cmp(&a[j * d + c].abs())).unwrap();
            if a[p * d + c] == 0.0 {
                return 0.0;
            }
            if p != c {
                for j in 0..d {
                    a.swap(p * d + j, c * d + j);
                }
                det = -det;
            }
            let piv = a[c * d + c];
            det *= piv;
            for r in c + 1..d {
                let f = a[r * d + c] / piv;
                for j in c..d {
                    a[r * d + j] -= f * a[c * d + j];
                }
            }
        }
        det
    }
}

/// Householder reflection `I − 2vvᵀ/‖v‖²`.
fn householder(v: &[f64]) -> Rotation {
    let d = v.len();
    let nn = dot(v, v);
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            m[i * d + j] = if i == j { 1.0 } else { 0.0 } - 2.0 * v[i] * v[j] / nn;
        }
    }
    Rotation { d, m }
}

/// A rotation `g` with `g e^d = η`, built from two reflections.
///
/// For `η_d ≥ 0` this is `H_{η+e^d} H_{e^d}` (the identity at the north pole),
/// otherwise `H_{η−e^d} H_{e^1}`.
pub fn rotation_to_north(eta: &SpherePoint) -> Rotation {
    rotation_to_north_vec(eta.cartesian())
}

pub(crate) fn rotation_to_north_vec(x: &[f64]) -> Rotation {
    let d = x.len();
    let mut v = x.to_vec();
    let mut e = vec![0.0; d];
    if x[d - 1] >= 0.0 {
        v[d - 1] += 1.0;
        e[d - 1] = 1.0;
    } else {
        v[d - 1] -= 1.0;
        e[0] = 1.0;
    }
    householder(&v).compose(&householder(&e))
}

/// Rotation of `ℝ^d` by `γ` in the `(x_1, x_2)` plane, fixing the other axes.
pub fn plane_rotation(d: usize, gamma: f64) -> Rotation {
    let mut r = Rotation::identity(d);
    let (s, c) = gamma.sin_cos();
    r.m[0] = c;
    r.m[1] = -s;
    r.m[d] = s;
    r.m[d + 1] = c;
    r
}

/// The positive rotation `h(γ)` of `ℝ³` in the `(x_1, x_2)` plane, so that
/// `Y_ℓ^{3,n}(h(γ)⁻¹ x) = e^{iℓγ} Y_ℓ^{3,n}(x)`.
pub fn so2_rotation(gamma: f64) -> Rotation {
    plane_rotation(3, gamma)
}

/// Rotation in the plane spanned by axes `i` and `j` (0-based) taking `e^i` towards `e^j`.
pub fn axis_rotation(d: usize, i: usize, j: usize, angle: f64) -> Result<Rotation> {
    if i >= d || j >= d || i == j {
        return Err(Error::Domain(format!("invalid rotation plane ({i}, {j}) in dimension {d}")));
    }
    let mut r = Rotation::identity(d);
    let (s, c) = angle.sin_cos();
    r.m[i * d + i] = c;
    r.m[j * d + j] = c;
    r.m[j * d + i] = s;
    r.m[i * d + j] = -s;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::dim_harmonic;
    use approx::assert_relative_eq;

    #[test]
    fn enumeration_examples() {
        let ks: Vec<Vec<i64>> = enumerate_indices(3, 1).into_iter().map(|i| i.k).collect();
        assert_eq!(ks, vec![vec![-1], vec![0], vec![1]]);
        let ks: Vec<Vec<i64>> = enumerate_indices(4, 1).into_iter().map(|i| i.k).collect();
        assert_eq!(ks, vec![vec![0, 0], vec![1, -1], vec![1, 0], vec![1, 1]]);
        assert_eq!(enumerate_indices(3, 0).len(), 1);
    }

    #[test]
    fn enumeration_counts_and_positions() {
        for d in 3..=5 {
            let mut pos = 0;
            for n in 0..=12 {
                let list = enumerate_indices(d, n);
                assert_eq!(list.len() as u64, dim_harmonic(d, n));
                for idx in &list {
                    assert_eq!(idx.position(), pos);
                    pos += 1;
                }
            }
        }
    }

    #[test]
    fn coordinates() {
        let p = SpherePoint::from_angles(vec![PI / 2.0, PI / 2.0]).unwrap();
        assert_relative_eq!(p.cartesian()[0], 1.0, epsilon = 1e-15);
        assert!(p.cartesian()[1].abs() < 1e-15 && p.cartesian()[2].abs() < 1e-15);
        let n = SpherePoint::from_cartesian(vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(n.angles()[2], 0.0);
        assert!(SpherePoint::from_cartesian(vec![1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn rotation_special_cases() {
        for d in 3..=5 {
            let g = rotation_to_north(&SpherePoint::north(d));
            assert_eq!(g, Rotation::identity(d));
            let mut s = vec![0.0; d];
            s[d - 1] = -1.0;
            let g = rotation_to_north(&SpherePoint::from_cartesian(s.clone()).unwrap());
            assert_relative_eq!(g.det(), 1.0, epsilon = 1e-14);
            let col = g.column(d - 1);
            for i in 0..d {
                assert_relative_eq!(col[i], s[i], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn so2_sign_convention() {
        let h = so2_rotation(PI / 2.0);
        let e1 = h.apply(&[1.0, 0.0, 0.0]);
        assert_relative_eq!(e1[1], 1.0, epsilon = 1e-15);
        let g = so2_rotation(0.3).compose(&so2_rotation(0.5));
        let h = so2_rotation(0.8);
        for (a, b) in g.matrix().iter().zip(h.matrix()) {
            assert_relative_eq!(a, b, epsilon = 1e-14);
        }
        // T(h(γ)) Y_ℓ = e^{iℓγ} Y_ℓ
        let p = SpherePoint::from_angles(vec![1.1, 0.7]).unwrap();
        let gamma = 0.9;
        let q = SpherePoint::from_cartesian(so2_rotation(gamma).apply_inverse(p.cartesian())).unwrap();
        for l in -3i64..=3 {
            let idx = HarmonicIndex::new(3, 3, vec![l]).unwrap();
            let lhs = eval_harmonic(&idx, &q);
            let rhs = Complex64::from_polar(1.0, l as f64 * gamma) * eval_harmonic(&idx, &p);
            assert!((lhs - rhs).norm() < 1e-13);
        }
    }

    #[test]
    fn harmonic_matches_normalized_product_formula() {
        use crate::specfun::harmonic_norm_a;
        for d in 3..=5 {
            let p = SpherePoint::from_angles((0..d - 1).map(|i| 0.4 + 0.37 * i as f64).collect()).unwrap();
            for n in 0..=6 {
                for idx in enumerate_indices(d, n) {
                    let mut v = harmonic_norm_a(d, n, idx.k()).unwrap();
                    let mut a = n;
                    for j in 0..d - 2 {
                        let b = idx.k[j].unsigned_abs() as usize;
                        let th = p.angles()[d - 2 - j];
                        let lam = (d - j - 2) as f64 / 2.0 + b as f64;
                        v *= gegenbauer(lam, a - b, th.cos()) * th.sin().powi(b as i32);
                        a = b;
                    }
                    let want = Complex64::from_polar(v, idx.k[d - 3] as f64 * p.angles()[0]);
                    let got = eval_harmonic(&idx, &p);
                    assert!((want - got).norm() < 1e-11 * (1.0 + want.norm()), "{idx:?}: {want} vs {got}");
                }
            }
        }
    }

    #[test]
    fn addition_kernel_examples() {
        for d in 3..=6 {
            for n in 0..8 {
                assert_relative_eq!(addition_kernel(d, n, 1.0), dim_harmonic(d, n) as f64, max_relative = 1e-13);
            }
        }
        assert_relative_eq!(addition_kernel(3, 1, 0.3), 0.9, epsilon = 1e-15);
    }

    #[test]
    fn distances() {
        let n = SpherePoint::north(4);
        let s = SpherePoint::from_cartesian(vec![0.0, 0.0, 0.0, -1.0]).unwrap();
        assert_eq!(geodesic_dist(&n, &n), 0.0);
        assert_relative_eq!(geodesic_dist(&n, &s), PI, epsilon = 1e-15);
        let p = SpherePoint::from_angles(vec![0.3, 1.2, 0.8]).unwrap();
        assert_relative_eq!(geodesic_dist(&p, &n), 0.8, epsilon = 1e-14);
    }
}

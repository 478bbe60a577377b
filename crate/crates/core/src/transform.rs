//! Separable harmonic transforms on product grids.
//!
//! A function in `Π_L(𝕊^{d-1})` is evaluated on a tensor grid level by level:
//! the coefficients are contracted against the one-dimensional factors of the
//! outermost latitude, leaving an expansion on the next lower sphere, down to a
//! trigonometric sum on the circle. The adjoint runs the same recursion backwards.

use crate::basis::level_table;
use crate::coeffs::CoefficientVector;
use crate::error::{domain, Result};
use crate::quadrature::SphereRule;
use crate::sphere::{chain_rank, enumerate_indices, SpherePoint};
use num_complex::Complex64;
use rayon::prelude::*;

struct Level {
    nodes: usize,
    /// `(L+1)²` factor values per node.
    table: Vec<f64>,
    /// `(a, b, lower position)` per coefficient of `Π_L(𝕊^m)`.
    map: Vec<(u32, u32, u32)>,
    lower_len: usize,
}

struct Circle {
    nodes: usize,
    /// `e^{ikθ}` at `node * (2L+1) + k + L`.
    table: Vec<Complex64>,
}

/// Harmonic synthesis and its adjoint on a tensor grid of `𝕊^{d-1}`.
pub struct GridTransform {
    d: usize,
    degree: usize,
    levels: Vec<Level>,
    circle: Circle,
    weights: Option<Vec<f64>>,
    len: usize,
}

fn level_map(m: usize, degree: usize) -> (Vec<(u32, u32, u32)>, usize) {
    // coefficients of Π_L(𝕊^m), i.e. dimension m+1
    let dd = m + 1;
    let mut map = Vec::new();
    for n in 0..=degree {
        for idx in enumerate_indices(dd, n) {
            let k = idx.k();
            let b = k[0].unsigned_abs() as u32;
            let lower = if dd == 3 {
                (k[0] + degree as i64) as u32
            } else {
                (crate::specfun::dim_poly_below(dd - 1, k[0] as usize) + chain_rank(dd - 1, k[0] as usize, &k[1..]))
                    as u32
            };
            map.push((n as u32, b, lower));
        }
    }
    let lower_len = if dd == 3 { 2 * degree + 1 } else { crate::specfun::dim_poly(dd - 1, degree) as usize };
    (map, lower_len)
}

impl GridTransform {
    /// Builds from per-level `(cos θ, sin θ)` node lists (outermost `θ_{d-1}` first) and circle angles.
    fn build(d: usize, degree: usize, latitudes: &[Vec<(f64, f64)>], circle_angles: &[f64]) -> Self {
        let w = degree + 1;
        let mut levels = Vec::with_capacity(d - 2);
        for (i, nodes) in latitudes.iter().enumerate() {
            let m = d - 1 - i;
            let mut table = Vec::with_capacity(nodes.len() * w * w);
            for &(c, s) in nodes {
                table.extend(level_table(m, degree, c, s));
            }
            let (map, lower_len) = level_map(m, degree);
            levels.push(Level { nodes: nodes.len(), table, map, lower_len });
        }
        let kw = 2 * degree + 1;
        let mut table = Vec::with_capacity(circle_angles.len() * kw);
        for &th in circle_angles {
            for k in -(degree as i64)..=(degree as i64) {
                table.push(Complex64::from_polar(1.0, k as f64 * th));
            }
        }
        let circle = Circle { nodes: circle_angles.len(), table };
        let len = levels.iter().map(|l| l.nodes).product::<usize>() * circle.nodes;
        Self { d, degree, levels, circle, weights: None, len }
    }

    /// Transform on the nodes of a product rule on `𝕊^{d-1}`, in the rule's point order.
    pub fn for_rule(rule: &SphereRule, degree: usize) -> Result<Self> {
        if rule.m < 2 {
            return domain("transforms need a sphere of dimension at least 2");
        }
        let s = &rule.structure;
        let latitudes: Vec<Vec<(f64, f64)>> = s
            .latitudes
            .iter()
            .rev()
            .map(|r| r.nodes.iter().map(|&t| (t, ((1.0 - t) * (1.0 + t)).sqrt())).collect())
            .collect();
        let circle: Vec<f64> =
            (0..s.circle).map(|i| 2.0 * std::f64::consts::PI * i as f64 / s.circle as f64).collect();
        let mut t = Self::build(rule.m + 1, degree, &latitudes, &circle);
        t.weights = Some(rule.weights.clone());
        Ok(t)
    }

    /// Transform at a single point.
    pub fn at_point(p: &SpherePoint, degree: usize) -> Self {
        let d = p.d();
        let a = p.angles();
        let latitudes: Vec<Vec<(f64, f64)>> = (0..d - 2).map(|i| vec![(a[d - 2 - i].cos(), a[d - 2 - i].sin())]).collect();
        Self::build(d, degree, &latitudes, &[a[0]])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of grid nodes.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Values `Σ c Y` at the grid nodes; entries above the transform degree are ignored.
    pub fn synthesize(&self, coeffs: &CoefficientVector) -> Vec<Complex64> {
        assert_eq!(coeffs.d(), self.d, "dimension mismatch");
        let c = coeffs.resized(self.degree);
        let mut out = vec![Complex64::new(0.0, 0.0); self.len];
        self.synth_top(c.as_slice(), &mut out);
        out
    }

    /// Raw synthesis from dense coefficients of `Π_L`.
    pub fn synthesize_dense(&self, coeffs: &[Complex64], out: &mut [Complex64]) {
        self.synth_top(coeffs, out);
    }

    fn synth_top(&self, coeffs: &[Complex64], out: &mut [Complex64]) {
        let level = &self.levels[0];
        let stride = self.len / level.nodes;
        let w = self.degree + 1;
        out.par_chunks_mut(stride).enumerate().for_each(|(i, chunk)| {
            let mut lower = vec![Complex64::new(0.0, 0.0); level.lower_len];
            contract(level, &level.table[i * w * w..(i + 1) * w * w], w, coeffs, &mut lower);
            self.synth(1, &lower, chunk);
        });
    }

    fn synth(&self, lvl: usize, coeffs: &[Complex64], out: &mut [Complex64]) {
        let w = self.degree + 1;
        if lvl == self.levels.len() {
            let kw = 2 * self.degree + 1;
            for (i, o) in out.iter_mut().enumerate() {
                let row = &self.circle.table[i * kw..(i + 1) * kw];
                *o = row.iter().zip(coeffs).map(|(e, c)| e * c).sum();
            }
            return;
        }
        let level = &self.levels[lvl];
        let stride = out.len() / level.nodes;
        let mut lower = vec![Complex64::new(0.0, 0.0); level.lower_len];
        for (i, chunk) in out.chunks_mut(stride).enumerate() {
            lower.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            contract(level, &level.table[i * w * w..(i + 1) * w * w], w, coeffs, &mut lower);
            self.synth(lvl + 1, &lower, chunk);
        }
    }

    /// `Σ_x v(x) conj(Y(x))` over the grid (no weights), degree ≤ L.
    pub fn adjoint(&self, values: &[Complex64]) -> CoefficientVector {
        assert_eq!(values.len(), self.len, "value count mismatch");
        let level = &self.levels[0];
        let stride = self.len / level.nodes;
        let w = self.degree + 1;
        let partial: Vec<Vec<Complex64>> = values
            .par_chunks(stride)
            .map(|chunk| {
                let mut lower = vec![Complex64::new(0.0, 0.0); level.lower_len];
                self.adj(1, chunk, &mut lower);
                lower
            })
            .collect();
        let mut out = CoefficientVector::zeros(self.d, self.degree);
        let dst = out.as_mut_slice();
        for (i, lower) in partial.iter().enumerate() {
            expand(level, &level.table[i * w * w..(i + 1) * w * w], w, lower, dst);
        }
        out
    }

    fn adj(&self, lvl: usize, values: &[Complex64], out: &mut [Complex64]) {
        let w = self.degree + 1;
        if lvl == self.levels.len() {
            let kw = 2 * self.degree + 1;
            for (i, v) in values.iter().enumerate() {
                let row = &self.circle.table[i * kw..(i + 1) * kw];
                for (o, e) in out.iter_mut().zip(row) {
                    *o += v * e.conj();
                }
            }
            return;
        }
        let level = &self.levels[lvl];
        let stride = values.len() / level.nodes;
        let mut lower = vec![Complex64::new(0.0, 0.0); level.lower_len];
        for (i, chunk) in values.chunks(stride).enumerate() {
            lower.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            self.adj(lvl + 1, chunk, &mut lower);
            expand(level, &level.table[i * w * w..(i + 1) * w * w], w, &lower, out);
        }
    }

    /// Quadrature projection `Σ_x w(x) v(x) conj(Y(x))`; exact when the rule has degree ≥ L + deg v.
    pub fn analyze(&self, values: &[Complex64]) -> CoefficientVector {
        let weights = self.weights.as_ref().expect("analysis needs a transform built from a rule");
        let weighted: Vec<Complex64> = values.iter().zip(weights).map(|(v, w)| v * *w).collect();
        self.adjoint(&weighted)
    }
}

fn contract(level: &Level, tab: &[f64], w: usize, coeffs: &[Complex64], lower: &mut [Complex64]) {
    for (&(a, b, lp), c) in level.map.iter().zip(coeffs) {
        lower[lp as usize] += c * tab[a as usize * w + b as usize];
    }
}

fn expand(level: &Level, tab: &[f64], w: usize, lower: &[Complex64], out: &mut [Complex64]) {
    for (&(a, b, lp), o) in level.map.iter().zip(out.iter_mut()) {
        *o += lower[lp as usize] * tab[a as usize * w + b as usize];
    }
}

/// `Σ c_k Y_k(p)`.
pub fn evaluate(coeffs: &CoefficientVector, p: &SpherePoint) -> Complex64 {
    GridTransform::at_point(p, coeffs.max_degree()).synthesize(coeffs)[0]
}

/// All `Y_k^{d,n}(p)` for `n ≤ degree`, in layout order.
pub fn harmonics_at(p: &SpherePoint, degree: usize) -> Vec<Complex64> {
    let t = GridTransform::at_point(p, degree);
    let v = t.adjoint(&[Complex64::new(1.0, 0.0)]);
    v.into_vec().into_iter().map(|c| c.conj()).collect()
}

//! Dense harmonic coefficient vectors in lexicographic index order.

use crate::error::{domain, Error, Result};
use crate::specfun::{dim_harmonic, dim_poly, dim_poly_below};
use crate::sphere::{enumerate_indices, HarmonicIndex};
use num_complex::Complex64;

/// Coefficients `⟨f, Y_k^{d,n}⟩` of a band-limited function, `n ≤ max_degree`.
///
/// Entries are stored densely at [`HarmonicIndex::position`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    d: usize,
    max_degree: usize,
    data: Vec<Complex64>,
}

impl CoefficientVector {
    pub fn zeros(d: usize, max_degree: usize) -> Self {
        assert!(d >= 3, "dimension must be at least 3");
        Self { d, max_degree, data: vec![Complex64::new(0.0, 0.0); dim_poly(d, max_degree) as usize] }
    }

    /// Wraps dense data; the length must equal `dim Π_L(𝕊^{d-1})`.
    pub fn from_dense(d: usize, max_degree: usize, data: Vec<Complex64>) -> Result<Self> {
        if d < 3 {
            return domain("dimension must be at least 3");
        }
        let want = dim_poly(d, max_degree) as usize;
        if data.len() != want {
            return domain(format!("expected {want} coefficients, got {}", data.len()));
        }
        Ok(Self { d, max_degree, data })
    }

    /// The single harmonic `Y_k^{d,n}`.
    pub fn unit(idx: &HarmonicIndex) -> Self {
        let mut v = Self::zeros(idx.d(), idx.n());
        v.data[idx.position()] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    /// Coefficient at `idx` (zero beyond `max_degree`).
    pub fn get(&self, idx: &HarmonicIndex) -> Complex64 {
        if idx.d() != self.d || idx.n() > self.max_degree {
            return Complex64::new(0.0, 0.0);
        }
        self.data[idx.position()]
    }

    pub fn set(&mut self, idx: &HarmonicIndex, value: Complex64) -> Result<()> {
        if idx.d() != self.d {
            return Err(Error::Index(format!("index of dimension {} in a vector of dimension {}", idx.d(), self.d)));
        }
        if idx.n() > self.max_degree {
            return Err(Error::Index(format!("degree {} exceeds max degree {}", idx.n(), self.max_degree)));
        }
        self.data[idx.position()] = value;
        Ok(())
    }

    /// Positions of the degree-`n` block.
    pub fn degree_range(&self, n: usize) -> std::ops::Range<usize> {
        let start = dim_poly_below(self.d, n);
        start..start + dim_harmonic(self.d, n) as usize
    }

    /// Nonzero-or-not entries with their indices, in layout order.
    pub fn iter(&self) -> impl Iterator<Item = (HarmonicIndex, Complex64)> + '_ {
        (0..=self.max_degree)
            .flat_map(move |n| enumerate_indices(self.d, n))
            .zip(self.data.iter().copied())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Copy with degree bound `degree`, truncating or zero-padding.
    pub fn resized(&self, degree: usize) -> Self {
        let mut out = Self::zeros(self.d, degree);
        let n = out.data.len().min(self.data.len());
        out.data[..n].copy_from_slice(&self.data[..n]);
        out
    }

    /// Highest degree carrying an entry above `tol` in modulus.
    pub fn effective_degree(&self, tol: f64) -> usize {
        (0..=self.max_degree)
            .rev()
            .find(|&n| self.data[self.degree_range(n)].iter().any(|c| c.norm() > tol))
            .unwrap_or(0)
    }

    /// Multiplies every degree-`n` block by `f(n)`.
    pub fn scale_by_degree<F: Fn(usize) -> f64>(&self, f: F) -> Self {
        let mut out = self.clone();
        for n in 0..=self.max_degree {
            let s = f(n);
            let r = self.degree_range(n);
            for c in &mut out.data[r] {
                *c *= s;
            }
        }
        out
    }

    /// `self + a · other`, with the larger degree bound.
    pub fn add_scaled(&self, a: Complex64, other: &Self) -> Self {
        assert_eq!(self.d, other.d, "dimension mismatch");
        let mut out = self.resized(self.max_degree.max(other.max_degree));
        for (o, v) in out.data.iter_mut().zip(&other.data) {
            *o += a * v;
        }
        out
    }

    /// `max |self − other|` over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.d, other.d, "dimension mismatch");
        let n = self.data.len().max(other.data.len());
        let zero = Complex64::new(0.0, 0.0);
        (0..n)
            .map(|i| (self.data.get(i).copied().unwrap_or(zero) - other.data.get(i).copied().unwrap_or(zero)).norm())
            .fold(0.0, f64::max)
    }

    /// `⟨self, other⟩ = Σ a conj(b)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b.conj()).sum()
    }
}

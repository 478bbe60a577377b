//! Directional wavelets `Ψ_K^N`, scaling functions and directionality profiles.

use crate::basis::{level_scale, ortho_gegenbauer_all};
use crate::coeffs::CoefficientVector;
use crate::error::{Error, Result};
use crate::filters::FilterProfile;
use crate::specfun::{dim_harmonic, gegenbauer, gegenbauer_monomial_coeffs, harmonic_norm_a, ln_gamma};
use crate::sphere::{eval_harmonic, HarmonicIndex, Rotation, SpherePoint};
use crate::transform::GridTransform;
use num_complex::Complex64;

/// Which family a [`DirectionalProfile`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// `ζ = δ_{k,0}`: isotropic wavelets.
    Zonal,
    /// The auto-correlation optimal tables for `d ≥ 4`.
    SymmetricOptimal,
    /// A user table `ζ_k^{3,n}` for `d = 3`.
    CustomD3,
    /// A user table `φ_{K,n}(m)` with `ζ = δ_{k_2,0} φ_{K,n}(k_1)`, `d ≥ 4`.
    CustomSymmetric,
}

/// Directionality components `ζ_{K,k}^{d,n}`.
///
/// Tables have `K+1` rows; row `r` applies to degree `n` with `min(n, K) = r`.
/// For `d = 3` a row is indexed by `k + K`, otherwise by `m = k_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalProfile {
    k: usize,
    kind: ProfileKind,
    d: Option<usize>,
    rows: Vec<Vec<Complex64>>,
}

const NORM_TOL: f64 = 1e-12;

impl DirectionalProfile {
    pub fn zonal() -> Self {
        Self { k: 0, kind: ProfileKind::Zonal, d: None, rows: vec![vec![Complex64::new(1.0, 0.0)]] }
    }

    /// A `d = 3` table; validated for normalization and support.
    pub fn custom_d3(k: usize, rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let p = Self { k, kind: ProfileKind::CustomD3, d: Some(3), rows };
        p.validate()?;
        Ok(p)
    }

    /// A symmetric `d ≥ 4` table; validated for normalization and support.
    pub fn custom_symmetric(k: usize, rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let p = Self { k, kind: ProfileKind::CustomSymmetric, d: None, rows };
        p.validate()?;
        Ok(p)
    }

    /// The `d = 3` convention shipped in place of an optimal table: for `n ≥ 1` the
    /// weight is split equally between `k = ±min(K, n)`.
    pub fn d3_convention(k: usize) -> Self {
        let rows = (0..=k)
            .map(|r| {
                let mut row = vec![Complex64::new(0.0, 0.0); 2 * k + 1];
                if r == 0 {
                    row[k] = Complex64::new(1.0, 0.0);
                } else {
                    let v = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                    row[k - r] = v;
                    row[k + r] = v;
                }
                row
            })
            .collect();
        Self { k, kind: ProfileKind::CustomD3, d: Some(3), rows }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    /// Tables as stored (see the type documentation for the layout).
    pub fn rows(&self) -> &[Vec<Complex64>] {
        &self.rows
    }

    /// True for the families with `ζ = δ_{k_2,0} φ(k_1)`.
    pub fn is_symmetric(&self) -> bool {
        matches!(self.kind, ProfileKind::SymmetricOptimal | ProfileKind::CustomSymmetric)
    }

    /// Checks the profile can be used in dimension `d`.
    pub fn check_dimension(&self, d: usize) -> Result<()> {
        match self.kind {
            ProfileKind::Zonal => Ok(()),
            ProfileKind::CustomD3 if d != 3 => {
                Err(Error::Config(format!("a d = 3 directionality table cannot be used in dimension {d}")))
            }
            ProfileKind::SymmetricOptimal | ProfileKind::CustomSymmetric if d < 4 => {
                Err(Error::Config("symmetric directionality profiles need d ≥ 4".into()))
            }
            ProfileKind::SymmetricOptimal if self.d != Some(d) => Err(Error::Config(format!(
                "optimal profile was built for d = {:?}, used with d = {d}",
                self.d
            ))),
            _ => Ok(()),
        }
    }

    fn validate(&self) -> Result<()> {
        let k = self.k;
        if self.rows.len() != k + 1 {
            return Err(Error::Config(format!("expected {} table rows, got {}", k + 1, self.rows.len())));
        }
        let width = if self.kind == ProfileKind::CustomD3 { 2 * k + 1 } else { k + 1 };
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Config(format!("table row {r} has {} entries, expected {width}", row.len())));
            }
            for (i, v) in row.iter().enumerate() {
                let label = if self.kind == ProfileKind::CustomD3 { (i as i64 - k as i64).unsigned_abs() as usize } else { i };
                if label > r && v.norm() > 0.0 {
                    return Err(Error::Config(format!("table row {r} has a nonzero entry beyond its degree")));
                }
            }
            if r >= 1 || k == 0 {
                let s: f64 = row.iter().map(|v| v.norm_sqr()).sum();
                if (s - 1.0).abs() > NORM_TOL {
                    return Err(Error::Config(format!("table row {r} has squared norm {s}, expected 1")));
                }
            }
        }
        Ok(())
    }

    fn row(&self, n: usize) -> &[Complex64] {
        &self.rows[n.min(self.k)]
    }

    /// `ζ_{K,k}^{d,n}`.
    pub fn zeta(&self, n: usize, k: &[i64]) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        match self.kind {
            ProfileKind::Zonal => {
                if k.iter().all(|&v| v == 0) {
                    Complex64::new(1.0, 0.0)
                } else {
                    zero
                }
            }
            ProfileKind::CustomD3 => {
                let kk = k[0];
                if kk.unsigned_abs() as usize > self.k {
                    zero
                } else {
                    self.row(n)[(kk + self.k as i64) as usize]
                }
            }
            ProfileKind::SymmetricOptimal | ProfileKind::CustomSymmetric => {
                if n == 0 || k[1..].iter().any(|&v| v != 0) || k[0] as usize > self.k {
                    zero
                } else {
                    self.row(n)[k[0] as usize]
                }
            }
        }
    }

    /// `φ_{K,n}(m)` for symmetric profiles.
    pub fn phi_table(&self, n: usize, m: usize) -> Complex64 {
        if !self.is_symmetric() || n == 0 || m > self.k {
            return Complex64::new(0.0, 0.0);
        }
        self.row(n)[m]
    }
}

/// The auto-correlation optimal symmetric profile of order `K` for `d ≥ 4`.
pub fn optimal_profile(d: usize, k: usize) -> Result<DirectionalProfile> {
    if d < 4 {
        return Err(Error::Config(
            "the optimal symmetric profile degenerates for d = 3; use a d = 3 table instead".into(),
        ));
    }
    let lambda = (d as f64 - 3.0) / 2.0;
    let pre = 0.5 * (ln_gamma(lambda) - ln_gamma(2.0 * lambda));
    let rows = (0..=k)
        .map(|kn| {
            let mut row = vec![Complex64::new(0.0, 0.0); k + 1];
            if kn == 0 {
                // degree-0 row is never used; for n ≥ 1 with K = 0 the formula gives φ(0) = 1
                if k == 0 {
                    row[0] = Complex64::new(1.0, 0.0);
                }
                return row;
            }
            for m in (kn % 2..=kn).step_by(2) {
                let half = ((kn - m) / 2) as f64;
                let log_v = ln_gamma(kn as f64 + 1.0) + (m as f64 + lambda).ln() + ln_gamma((d + m) as f64 - 3.0)
                    - kn as f64 * std::f64::consts::LN_2
                    - ln_gamma(half + 1.0)
                    - ln_gamma(lambda + (kn + m) as f64 / 2.0 + 1.0)
                    - ln_gamma(m as f64 + 1.0);
                let sign = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
                row[m] = Complex64::new(sign * (0.5 * log_v + pre).exp(), 0.0);
            }
            row
        })
        .collect();
    Ok(DirectionalProfile { k, kind: ProfileKind::SymmetricOptimal, d: Some(d), rows })
}

/// `(d, profile, filter, N)` defining `Ψ_K^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletSpec {
    d: usize,
    profile: DirectionalProfile,
    filter: FilterProfile,
    bandwidth: f64,
}

impl WaveletSpec {
    /// Continuous-bandwidth wavelet `Ψ_K^N`.
    pub fn new(d: usize, profile: DirectionalProfile, filter: FilterProfile, bandwidth: f64) -> Result<Self> {
        if d < 3 {
            return Err(Error::Config(format!("dimension must be at least 3, got {d}")));
        }
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(Error::Domain(format!("bandwidth must be positive, got {bandwidth}")));
        }
        profile.check_dimension(d)?;
        Ok(Self { d, profile, filter, bandwidth })
    }

    /// Dyadic wavelet at scale `j ≥ 1`, i.e. `N = 2^{j-1}`.
    pub fn dyadic(d: usize, profile: DirectionalProfile, filter: FilterProfile, j: usize) -> Result<Self> {
        if j == 0 {
            return Err(Error::Domain("wavelet scales start at j = 1".into()));
        }
        Self::new(d, profile, filter, 2f64.powi(j as i32 - 1))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn profile(&self) -> &DirectionalProfile {
        &self.profile
    }

    pub fn filter(&self) -> FilterProfile {
        self.filter
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Largest degree with `κ(n/N) ≠ 0`.
    pub fn max_degree(&self) -> usize {
        let top = (2.0 * self.bandwidth).ceil() as usize;
        top.saturating_sub(1)
    }

    /// Smallest degree with `κ(n/N) ≠ 0` (may exceed `max_degree` for tiny `N`).
    pub fn min_degree(&self) -> usize {
        (self.bandwidth / 2.0).floor() as usize + 1
    }

    /// Degrees in the support, with `sqrt(dim ℋ_n) κ(n/N)`.
    pub(crate) fn radial_weights(&self) -> Vec<(usize, f64)> {
        (self.min_degree()..=self.max_degree())
            .filter_map(|n| {
                let kappa = self.filter.kappa_unchecked(n as f64 / self.bandwidth);
                (kappa != 0.0).then(|| (n, (dim_harmonic(self.d, n) as f64).sqrt() * kappa))
            })
            .collect()
    }

    /// `‖Ψ‖²_{L²} = Σ_n dim ℋ_n κ²(n/N)`.
    pub fn norm_sqr(&self) -> f64 {
        self.radial_weights().iter().map(|(_, w)| w * w).sum()
    }
}

/// Harmonic coefficients `sqrt(dim ℋ_n) κ(n/N) ζ_{K,k}^{d,n}`.
pub fn wavelet_coeffs(spec: &WaveletSpec) -> CoefficientVector {
    let d = spec.d;
    let mut out = CoefficientVector::zeros(d, spec.max_degree());
    let radial = spec.radial_weights();
    for (n, w) in radial {
        let r = out.degree_range(n);
        for (pos, idx) in r.zip(crate::sphere::enumerate_indices(d, n)) {
            let z = spec.profile.zeta(n, idx.k());
            if z.norm() != 0.0 {
                out.as_mut_slice()[pos] = w * z;
            }
        }
    }
    out
}

/// Coefficients of the scaling function `Φ^j`: `φ²(n/2^j) conj(Y_k^{d,n}(e^d))`.
pub fn scaling_coeffs(filter: FilterProfile, d: usize, j: usize) -> CoefficientVector {
    let scale = 2f64.powi(j as i32);
    let max_degree = (scale.ceil() as usize).max(1);
    let north = SpherePoint::north(d);
    let mut out = CoefficientVector::zeros(d, max_degree);
    for n in 0..=max_degree {
        let phi = filter.phi_unchecked(n as f64 / scale);
        if phi == 0.0 {
            continue;
        }
        // only the zonal harmonic is nonzero at the pole
        let idx = HarmonicIndex::zonal(d, n);
        let v = phi * phi * eval_harmonic(&idx, &north).conj();
        out.set(&idx, v).expect("index within degree bound");
    }
    out
}

/// `T(g)Ψ(p) = Ψ(g⁻¹p)`.
///
/// Symmetric profiles use the closed Gegenbauer form; the others sum the
/// coefficient vector against the harmonic basis.
pub fn eval_wavelet(spec: &WaveletSpec, g: &Rotation, p: &SpherePoint) -> Complex64 {
    WaveletEvaluator::new(spec).eval_rotated(g, p)
}

/// Repeated evaluation of one wavelet.
pub struct WaveletEvaluator {
    d: usize,
    coeffs: CoefficientVector,
    closed: Option<ClosedForm>,
}

/// Terms `β_{n,m} A_{(m,0,…)}^n` of the symmetric closed form.
struct ClosedForm {
    lambda_d: f64,
    lambda: f64,
    terms: Vec<(usize, usize, Complex64)>,
}

impl WaveletEvaluator {
    pub fn new(spec: &WaveletSpec) -> Self {
        let coeffs = wavelet_coeffs(spec);
        let closed = spec.profile.is_symmetric().then(|| {
            let d = spec.d;
            let mut terms = Vec::new();
            for (n, w) in spec.radial_weights() {
                for m in 0..=n.min(spec.profile.k) {
                    let phi = spec.profile.phi_table(n, m);
                    if phi.norm() == 0.0 {
                        continue;
                    }
                    let mut k = vec![0i64; d - 2];
                    k[0] = m as i64;
                    let a = harmonic_norm_a(d, n, &k).expect("valid chain");
                    terms.push((n, m, w * a * phi));
                }
            }
            ClosedForm { lambda_d: (d as f64 - 2.0) / 2.0, lambda: (d as f64 - 3.0) / 2.0, terms }
        });
        Self { d: spec.d, coeffs, closed }
    }

    pub fn coeffs(&self) -> &CoefficientVector {
        &self.coeffs
    }

    /// `Ψ(x)` by the generic harmonic sum.
    pub fn eval_generic(&self, p: &SpherePoint) -> Complex64 {
        GridTransform::at_point(p, self.coeffs.max_degree()).synthesize(&self.coeffs)[0]
    }

    /// `Ψ(x)` for a cartesian unit vector, closed form when available.
    pub fn eval_cartesian(&self, x: &[f64]) -> Complex64 {
        match &self.closed {
            Some(cf) => cf.eval(x),
            None => self.eval_generic(&SpherePoint::from_unit_unchecked(x.to_vec())),
        }
    }

    pub fn eval(&self, p: &SpherePoint) -> Complex64 {
        self.eval_cartesian(p.cartesian())
    }

    pub fn eval_rotated(&self, g: &Rotation, p: &SpherePoint) -> Complex64 {
        assert_eq!(g.d(), self.d, "dimension mismatch");
        self.eval_cartesian(&g.apply_inverse(p.cartesian()))
    }
}

impl ClosedForm {
    fn eval(&self, x: &[f64]) -> Complex64 {
        let d = x.len();
        let xd = x[d - 1].clamp(-1.0, 1.0);
        let u = x[d - 2];
        let r = (1.0 - xd * xd).max(0.0).sqrt();
        let ratio = if r > 0.0 { (u / r).clamp(-1.0, 1.0) } else { 0.0 };
        let mut acc = Complex64::new(0.0, 0.0);
        for &(n, m, c) in &self.terms {
            // (1-x_d²)^{m/2} C_m^λ(x_{d-1}/r), with 0^0 = 1 at the poles
            let ang = if m == 0 {
                1.0
            } else if r == 0.0 {
                0.0
            } else {
                gegenbauer(self.lambda, m, ratio) * r.powi(m as i32)
            };
            acc += c * gegenbauer(self.lambda_d + m as f64, n - m, xd) * ang;
        }
        acc
    }
}

/// Separable form `ψ(t, φ) = Σ_a R_a(t) B_a(φ)` of a wavelet along geodesics from `e^d`.
///
/// For symmetric profiles `B_m(φ) = C_m^{(d-3)/2}(cos φ)` (with the tangent direction
/// `cos φ e^{d-1} + sin φ η`); for `d = 3`, `B_k(φ) = e^{ikφ}` (direction
/// `cos φ e^2 + sin φ e^1`); zonal wavelets have a single constant term.
pub struct SliceExpansion {
    d: usize,
    kind: SliceKind,
    /// Per angular label: `(label, μ, terms (n, coefficient))`; radial part
    /// `Σ coef p^{μ}_{n-|label|}(cos t) sin^{|label|} t` with orthonormal `p`.
    radial: Vec<(i64, f64, Vec<(usize, Complex64)>)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SliceKind {
    Zonal,
    Symmetric { lambda: f64 },
    Circle,
}

impl SliceExpansion {
    pub fn new(spec: &WaveletSpec) -> Result<Self> {
        let d = spec.d;
        let lambda_d = (d as f64 - 2.0) / 2.0;
        let radial_w = spec.radial_weights();
        let prof = &spec.profile;
        let (kind, labels): (SliceKind, Vec<i64>) = match prof.kind {
            ProfileKind::Zonal => (SliceKind::Zonal, vec![0]),
            ProfileKind::SymmetricOptimal | ProfileKind::CustomSymmetric => {
                (SliceKind::Symmetric { lambda: (d as f64 - 3.0) / 2.0 }, (0..=prof.k as i64).collect())
            }
            ProfileKind::CustomD3 => (SliceKind::Circle, (-(prof.k as i64)..=prof.k as i64).collect()),
        };
        let mut radial = Vec::new();
        for a in labels {
            let b = a.unsigned_abs() as usize;
            let mut terms = Vec::new();
            for &(n, w) in &radial_w {
                if n < b {
                    continue;
                }
                let zeta = match kind {
                    SliceKind::Zonal => Complex64::new(1.0, 0.0),
                    SliceKind::Circle => prof.zeta(n, &[a]),
                    SliceKind::Symmetric { .. } => prof.phi_table(n, b),
                };
                if zeta.norm() == 0.0 {
                    continue;
                }
                let mut c = w * zeta * level_scale(d - 1, b);
                if let SliceKind::Symmetric { lambda } = kind {
                    // the angular factor C_m^λ replaces the orthonormal p_m^λ of the harmonic
                    c *= ortho_to_classical(lambda, b);
                }
                terms.push((n, c));
            }
            if !terms.is_empty() {
                radial.push((a, lambda_d + b as f64, terms));
            }
        }
        Ok(Self { d, kind, radial })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Values `R_a(t)` in label order, paired with labels.
    pub fn radial_values(&self, t: f64) -> Vec<(i64, Complex64)> {
        let (s, c) = t.sin_cos();
        let mut buf = Vec::new();
        self.radial
            .iter()
            .map(|(a, mu, terms)| {
                let b = a.unsigned_abs() as usize;
                let top = terms.last().map(|x| x.0).unwrap_or(b);
                ortho_gegenbauer_all(*mu, top - b, c, &mut buf);
                let sp = s.powi(b as i32);
                let v: Complex64 = terms.iter().map(|&(n, coef)| coef * buf[n - b]).sum();
                (*a, v * sp)
            })
            .collect()
    }

    /// Angular basis value `B_a(φ)`.
    pub fn angular(&self, label: i64, phi: f64) -> Complex64 {
        match self.kind {
            SliceKind::Zonal => Complex64::new(1.0, 0.0),
            SliceKind::Symmetric { lambda } => Complex64::new(gegenbauer(lambda, label as usize, phi.cos()), 0.0),
            SliceKind::Circle => Complex64::from_polar(1.0, label as f64 * phi),
        }
    }

    /// `ψ(t, φ)`.
    pub fn value(&self, t: f64, phi: f64) -> Complex64 {
        self.radial_values(t).into_iter().map(|(a, r)| r * self.angular(a, phi)).sum()
    }

    /// True when the wavelet does not depend on `φ`.
    pub fn is_isotropic(&self) -> bool {
        self.kind == SliceKind::Zonal
    }

    /// True for the `d = 3` trigonometric angular basis.
    pub fn is_circle(&self) -> bool {
        self.kind == SliceKind::Circle
    }
}

/// `p_m^λ = ratio · C_m^λ` for the orthonormal polynomial w.r.t. the normalized weight.
fn ortho_to_classical(lambda: f64, m: usize) -> f64 {
    let mut buf = Vec::new();
    ortho_gegenbauer_all(lambda, m, 1.0, &mut buf);
    buf[m] / crate::specfun::gegenbauer_at_one(lambda, m)
}

/// `ψ_K^N(t, φ)` for a symmetric spec.
pub fn psi_slice(spec: &WaveletSpec, t: f64, phi: f64) -> Result<f64> {
    if !spec.profile.is_symmetric() {
        return Err(Error::Config("the ψ slice is defined for symmetric profiles".into()));
    }
    Ok(SliceExpansion::new(spec)?.value(t, phi).re)
}

/// Direction of one steerable kernel term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TermDirection {
    /// No direction (power 0).
    None,
    /// `z = g e^{a+1}` (0-based axis `a`).
    Axis(usize),
    /// `z = g e^{re+1} + i·sign·g e^{im+1}`.
    Complex { re: usize, im: usize, sign: f64 },
}

impl TermDirection {
    /// `z` for the rotation `g`.
    pub fn vector(&self, g: &Rotation) -> Vec<Complex64> {
        let d = g.d();
        match *self {
            TermDirection::None => vec![Complex64::new(0.0, 0.0); d],
            TermDirection::Axis(a) => g.column(a).into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            TermDirection::Complex { re, im, sign } => {
                let (cr, ci) = (g.column(re), g.column(im));
                cr.iter().zip(&ci).map(|(&a, &b)| Complex64::new(a, sign * b)).collect()
            }
        }
    }
}

/// A zonal profile `Q(t) = Σ c p^{μ}_{deg}(t) (1-t²)^i` (orthonormal Gegenbauer `p`).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    /// `(coefficient, μ, degree, i)`.
    pub parts: Vec<(Complex64, f64, usize, usize)>,
}

impl RadialProfile {
    pub fn eval(&self, t: f64) -> Complex64 {
        let mut buf = Vec::new();
        let s2 = (1.0 - t) * (1.0 + t);
        self.parts
            .iter()
            .map(|&(c, mu, deg, i)| {
                ortho_gegenbauer_all(mu, deg, t, &mut buf);
                c * buf[deg] * s2.powi(i as i32)
            })
            .sum()
    }

    /// Polynomial degree in `t`.
    pub fn degree(&self) -> usize {
        self.parts.iter().map(|&(_, _, deg, i)| deg + 2 * i).max().unwrap_or(0)
    }
}

/// One group of the decomposition `Ψ(g⁻¹x) = Σ_r Q_r(⟨g e^d, x⟩) ⟨z_r(g), x⟩^{p_r}`:
/// terms sharing the same `Q` and power.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelGroup {
    pub power: usize,
    pub radial: RadialProfile,
    pub directions: Vec<TermDirection>,
}

/// Decomposes the wavelet into zonal profiles times powers of linear forms.
pub fn kernel_decomposition(spec: &WaveletSpec) -> Vec<KernelGroup> {
    let d = spec.d;
    let lambda_d = (d as f64 - 2.0) / 2.0;
    let radial_w = spec.radial_weights();
    let prof = &spec.profile;
    let mut groups: Vec<KernelGroup> = Vec::new();
    let mut push = |power: usize, radial: RadialProfile, dir: TermDirection| {
        if radial.parts.is_empty() {
            return;
        }
        if let Some(g) = groups.iter_mut().find(|g| g.power == power && g.radial == radial) {
            g.directions.push(dir);
        } else {
            groups.push(KernelGroup { power, radial, directions: vec![dir] });
        }
    };
    match prof.kind {
        ProfileKind::Zonal => {
            let parts = radial_w.iter().map(|&(n, w)| (Complex64::new(w, 0.0), lambda_d, n, 0)).collect();
            push(0, RadialProfile { parts }, TermDirection::None);
        }
        ProfileKind::CustomD3 => {
            for k in -(prof.k as i64)..=(prof.k as i64) {
                let b = k.unsigned_abs() as usize;
                let scale = level_scale(2, b);
                let parts: Vec<_> = radial_w
                    .iter()
                    .filter(|&&(n, _)| n >= b)
                    .filter_map(|&(n, w)| {
                        let z = prof.zeta(n, &[k]);
                        (z.norm() != 0.0).then(|| (w * z * scale, 0.5 + b as f64, n - b, 0))
                    })
                    .collect();
                let dir = if k == 0 {
                    TermDirection::None
                } else {
                    TermDirection::Complex { re: 1, im: 0, sign: k.signum() as f64 }
                };
                push(b, RadialProfile { parts }, dir);
            }
        }
        ProfileKind::SymmetricOptimal | ProfileKind::CustomSymmetric => {
            let lambda = (d as f64 - 3.0) / 2.0;
            for p in 0..=prof.k {
                let mut parts = Vec::new();
                for m in (p..=prof.k).step_by(2) {
                    let i = (m - p) / 2;
                    let mono = gegenbauer_monomial_coeffs(lambda, m)[i] * ortho_to_classical(lambda, m);
                    let scale = level_scale(d - 1, m);
                    for &(n, w) in &radial_w {
                        if n < m {
                            continue;
                        }
                        let phi = prof.phi_table(n, m);
                        if phi.norm() == 0.0 {
                            continue;
                        }
                        parts.push((w * phi * scale * mono, lambda_d + m as f64, n - m, i));
                    }
                }
                let dir = if p == 0 { TermDirection::None } else { TermDirection::Axis(d - 2) };
                push(p, RadialProfile { parts }, dir);
            }
        }
    }
    groups
}

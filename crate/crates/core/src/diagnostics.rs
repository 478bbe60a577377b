//! Numerical diagnostics: localization, `L^p` norms, auto-correlation, steering,
//! `ψ(t, φ)` grids and quadrature checks.

use crate::coeffs::CoefficientVector;
use crate::error::{domain, Error, Result};
use crate::filters::FilterProfile;
use crate::quadrature::{gauss_gegenbauer, sphere_rule};
use crate::signal::random_point;
use crate::specfun::{dim_harmonic, dim_poly_below};
use crate::sphere::{addition_kernel, axis_rotation, dot, Rotation, SpherePoint};
use crate::transform::{harmonics_at, GridTransform};
use crate::wavelet::{optimal_profile, ProfileKind, SliceExpansion, WaveletEvaluator, WaveletSpec};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};
use std::io::Write;

/// Samples `ψ(t, φ)` on fixed angles, reusing the angular table.
struct SliceSampler {
    slice: SliceExpansion,
    table: Vec<(i64, Vec<Complex64>)>,
}

impl SliceSampler {
    fn new(spec: &WaveletSpec, phis: &[f64]) -> Result<Self> {
        let slice = SliceExpansion::new(spec)?;
        let labels: Vec<i64> = slice.radial_values(0.5).into_iter().map(|(a, _)| a).collect();
        let table = labels.into_iter().map(|a| (a, phis.iter().map(|&p| slice.angular(a, p)).collect())).collect();
        Ok(Self { slice, table })
    }

    /// `ψ(t, φ_j)` for every sampler angle.
    fn row(&self, t: f64) -> Vec<Complex64> {
        let n = self.table.first().map(|x| x.1.len()).unwrap_or(0);
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for ((a, r), (b, ang)) in self.slice.radial_values(t).into_iter().zip(&self.table) {
            debug_assert_eq!(a, *b);
            for (o, v) in out.iter_mut().zip(ang) {
                *o += r * v;
            }
        }
        out
    }
}

/// One geodesic band `θ ∈ [lo, hi]` around `e^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Annulus {
    pub lo: f64,
    pub hi: f64,
    /// `sup |Ψ|` over the band samples.
    pub sup: f64,
    /// `max |Ψ(x)| (1 + Nθ(x))^{q_eff − K} / N^{d-1}` over the band samples.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationReport {
    pub d: usize,
    pub n: f64,
    pub k: usize,
    pub q_eff: f64,
    pub annuli: Vec<Annulus>,
    /// Global maximum of `|Ψ|` over the samples.
    pub peak: f64,
}

impl LocalizationReport {
    pub fn max_ratio(&self) -> f64 {
        self.annuli.iter().map(|a| a.ratio).fold(0.0, f64::max)
    }
}

/// Sampling density for [`localization_profile`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationOptions {
    /// Decay exponent `q_eff`; `None` means `K + d`.
    pub q_eff: Option<f64>,
    pub t_samples: usize,
    pub phi_samples: usize,
}

impl Default for LocalizationOptions {
    fn default() -> Self {
        Self { q_eff: None, t_samples: 24, phi_samples: 64 }
    }
}

/// Sup of `|Ψ|` on `n_annuli` equal bands of `[0, π]` and the decay ratios.
pub fn localization_profile(spec: &WaveletSpec, n_annuli: usize, opts: LocalizationOptions) -> Result<LocalizationReport> {
    if n_annuli == 0 || opts.t_samples < 2 || opts.phi_samples == 0 {
        return domain("localization sampling needs at least one band, two t samples and one angle");
    }
    let d = spec.d();
    let k = spec.profile().k();
    let n = spec.bandwidth();
    let q_eff = opts.q_eff.unwrap_or((k + d) as f64);
    let nphi = if spec.profile().kind() == ProfileKind::Zonal { 1 } else { opts.phi_samples };
    let phis: Vec<f64> = (0..nphi).map(|j| TAU * j as f64 / nphi as f64).collect();
    let sampler = SliceSampler::new(spec, &phis)?;
    let scale = n.powi(d as i32 - 1);
    let annuli: Vec<Annulus> = (0..n_annuli)
        .into_par_iter()
        .map(|b| {
            let lo = PI * b as f64 / n_annuli as f64;
            let hi = PI * (b + 1) as f64 / n_annuli as f64;
            let mut sup: f64 = 0.0;
            let mut ratio: f64 = 0.0;
            for i in 0..opts.t_samples {
                let t = lo + (hi - lo) * i as f64 / (opts.t_samples - 1) as f64;
                let m = sampler.row(t).iter().map(|v| v.norm()).fold(0.0, f64::max);
                sup = sup.max(m);
                ratio = ratio.max(m * (1.0 + n * t).powf(q_eff - k as f64) / scale);
            }
            Annulus { lo, hi, sup, ratio }
        })
        .collect();
    let peak = annuli.iter().map(|a| a.sup).fold(0.0, f64::max);
    Ok(LocalizationReport { d, n, k, q_eff, annuli, peak })
}

/// An `L^p` norm with the grid used and a refined-grid comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct LpNorm {
    pub p: f64,
    pub value: f64,
    /// The same quantity on a grid twice as dense in each direction.
    pub refined: f64,
    /// `(t nodes, angular nodes)` of the base grid.
    pub grid: (usize, usize),
    /// True when the base grid is exact (`p = 2`).
    pub exact: bool,
}

impl LpNorm {
    /// `|refined − value| / refined`.
    pub fn rel_change(&self) -> f64 {
        if self.refined == 0.0 {
            0.0
        } else {
            (self.refined - self.value).abs() / self.refined
        }
    }
}

/// Angular nodes and normalized weights in `φ` for the slice parametrization.
fn angular_rule(spec: &WaveletSpec, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = spec.d();
    Ok(match spec.profile().kind() {
        ProfileKind::Zonal => (vec![0.0], vec![1.0]),
        ProfileKind::CustomD3 => ((0..n).map(|j| TAU * j as f64 / n as f64).collect(), vec![1.0 / n as f64; n]),
        _ => {
            let r = gauss_gegenbauer((d as f64 - 4.0) / 2.0, n)?.normalized();
            (r.nodes.iter().map(|u| u.clamp(-1.0, 1.0).acos()).collect(), r.weights)
        }
    })
}

/// `‖Ψ‖_{L^p}` on an explicit product grid with `nt` radial and `nang` angular nodes.
pub fn lp_norm_on_grid(spec: &WaveletSpec, p: f64, nt: usize, nang: usize) -> Result<f64> {
    if !(p > 0.0) {
        return domain(format!("p must be positive, got {p}"));
    }
    if nt == 0 || nang == 0 {
        return domain("empty grid");
    }
    let d = spec.d();
    if p.is_infinite() {
        let phis: Vec<f64> = (0..nang).map(|j| TAU * j as f64 / nang as f64).collect();
        let sampler = SliceSampler::new(spec, &phis)?;
        let m = (0..=nt)
            .into_par_iter()
            .map(|i| sampler.row(PI * i as f64 / nt as f64).iter().map(|v| v.norm()).fold(0.0, f64::max))
            .reduce(|| 0.0, f64::max);
        return Ok(m);
    }
    let (phis, wphi) = angular_rule(spec, nang)?;
    let sampler = SliceSampler::new(spec, &phis)?;
    let rt = gauss_gegenbauer((d as f64 - 3.0) / 2.0, nt)?.normalized();
    let parts: Vec<f64> = rt
        .nodes
        .par_iter()
        .zip(&rt.weights)
        .map(|(&x, &w)| {
            let row = sampler.row(x.clamp(-1.0, 1.0).acos());
            w * row.iter().zip(&wphi).map(|(v, wp)| wp * v.norm().powf(p)).sum::<f64>()
        })
        .collect();
    Ok(parts.iter().sum::<f64>().powf(1.0 / p))
}

/// `‖Ψ‖_{L^p}` with an automatically chosen grid (exact for `p = 2`) and a refinement check.
pub fn lp_norm(spec: &WaveletSpec, p: f64) -> Result<LpNorm> {
    let k = spec.profile().k();
    let (nt, nang) = if p == 2.0 {
        (spec.max_degree() + 1, 2 * k + 1)
    } else {
        (4 * (spec.max_degree() + 1), 8 * (2 * k + 1) + 8)
    };
    let value = lp_norm_on_grid(spec, p, nt, nang)?;
    let refined = lp_norm_on_grid(spec, p, 2 * nt, 2 * nang)?;
    Ok(LpNorm { p, value, refined, grid: (nt, nang), exact: p == 2.0 })
}

/// `sqrt(Σ_n dim ℋ_n κ²(n/N))`.
pub fn l2_norm_closed_form(spec: &WaveletSpec) -> f64 {
    spec.norm_sqr().sqrt()
}

/// The rotation `h` fixing `e^d` that turns `e^{d-1}` by `angle` towards `e^{d-2}`.
pub fn autocorrelation_rotation(d: usize, angle: f64) -> Rotation {
    axis_rotation(d, d - 2, d - 3, angle).expect("d ≥ 3")
}

/// `⟨T(h)Ψ, Ψ⟩` for each angle, by exact quadrature of the closed-form wavelet.
pub fn autocorrelation_many(spec: &WaveletSpec, angles: &[f64]) -> Result<Vec<Complex64>> {
    let d = spec.d();
    let rule = sphere_rule(d - 1, 2 * spec.max_degree())?;
    let ev = WaveletEvaluator::new(spec);
    let base: Vec<Complex64> = rule.points.par_iter().map(|p| ev.eval(p)).collect();
    angles
        .iter()
        .map(|&a| {
            let h = autocorrelation_rotation(d, a);
            let v: Complex64 = rule
                .points
                .par_iter()
                .zip(&rule.weights)
                .zip(&base)
                .map(|((p, &w), b)| w * ev.eval_rotated(&h, p) * b.conj())
                .sum();
            Ok(v)
        })
        .collect()
}

pub fn autocorrelation(spec: &WaveletSpec, angle: f64) -> Result<Complex64> {
    Ok(autocorrelation_many(spec, &[angle])?[0])
}

/// Closed form of the auto-correlation: `Σ_n dim ℋ_n κ²(n/N) (cos a)^{K_n}` for the optimal
/// symmetric profile, `Σ_n dim ℋ_n κ²(n/N) cos(K_n a)` for the `d = 3` convention profile.
pub fn autocorrelation_closed_form(spec: &WaveletSpec, angle: f64) -> Result<f64> {
    let prof = spec.profile();
    let k = prof.k();
    let d3 = spec.d() == 3 && *prof == crate::wavelet::DirectionalProfile::d3_convention(k);
    let optimal = spec.d() >= 4 && prof.kind() == ProfileKind::SymmetricOptimal;
    if !(optimal || d3 || prof.kind() == ProfileKind::Zonal) {
        return Err(Error::Config("the closed form covers the optimal and convention profiles".into()));
    }
    let bw = spec.bandwidth();
    let mut acc = 0.0;
    for n in spec.min_degree()..=spec.max_degree() {
        let kappa = spec.filter().kappa_unchecked(n as f64 / bw);
        let kn = k.min(n);
        let ang = if d3 { (kn as f64 * angle).cos() } else { angle.cos().powi(kn as i32) };
        acc += dim_harmonic(spec.d(), n) as f64 * kappa * kappa * ang;
    }
    Ok(acc)
}

/// Orientation count or rule degree for [`steer_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteerReport {
    pub nodes: usize,
    pub max_error: f64,
}

/// `max_x |T(h)Ψ(x) − Σ_p v_p(h) T(h_p)Ψ(x)|` over seeded test points.
///
/// For `d = 3` the `M = nodes` orientations are equispaced (default `2K + 1`) and `h`
/// must rotate the `(x_1, x_2)` plane. For symmetric profiles the orientations are a
/// rule of degree `nodes` on `𝕊^{d-2}` (default `2K`) and `h` must fix `e^d`.
pub fn steer_check(spec: &WaveletSpec, h: &Rotation, nodes: Option<usize>, test_points: usize, seed: u64) -> Result<SteerReport> {
    let d = spec.d();
    let k = spec.profile().k();
    if h.d() != d {
        return domain("rotation dimension mismatch");
    }
    let mut fixes = vec![0.0; d];
    fixes[d - 1] = 1.0;
    let he = h.apply(&fixes);
    if (he[d - 1] - 1.0).abs() > 1e-10 {
        return domain("the steering rotation must fix e^d");
    }
    let (orients, weights): (Vec<Rotation>, Vec<f64>) = if d == 3 {
        if spec.profile().kind() != ProfileKind::CustomD3 && spec.profile().kind() != ProfileKind::Zonal {
            return Err(Error::Config("unsupported profile for steering".into()));
        }
        let m = nodes.unwrap_or(2 * k + 1);
        if m == 0 {
            return domain("at least one orientation is needed");
        }
        let gamma = h.get(1, 0).atan2(h.get(0, 0));
        let orients: Vec<Rotation> = (0..m).map(|p| crate::sphere::plane_rotation(3, TAU * p as f64 / m as f64)).collect();
        let weights = (0..m)
            .map(|p| {
                let gp = TAU * p as f64 / m as f64;
                let s: f64 = (-(k as i64)..=k as i64).map(|kk| (kk as f64 * (gamma - gp)).cos()).sum();
                s / m as f64
            })
            .collect();
        (orients, weights)
    } else {
        if !spec.profile().is_symmetric() {
            return Err(Error::Config("unsupported profile for steering".into()));
        }
        let rule = sphere_rule(d - 2, nodes.unwrap_or(2 * k))?;
        let xi: Vec<f64> = h.column(d - 2)[..d - 1].to_vec();
        let orients = rule.points.iter().map(|p| crate::sphere::rotation_to_north(p).embed()).collect();
        let weights = rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(p, &w)| {
                let c = dot(&xi, p.cartesian());
                w * (0..=k).map(|n| addition_kernel(d - 1, n, c)).sum::<f64>()
            })
            .collect();
        (orients, weights)
    };
    let ev = WaveletEvaluator::new(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<SpherePoint> = (0..test_points).map(|_| random_point(d, &mut rng)).collect();
    let max_error = points
        .par_iter()
        .map(|x| {
            let target = ev.eval_rotated(h, x);
            let approx: Complex64 = orients.iter().zip(&weights).map(|(g, w)| *w * ev.eval_rotated(g, x)).sum();
            (target - approx).norm()
        })
        .reduce(|| 0.0, f64::max);
    Ok(SteerReport { nodes: orients.len(), max_error })
}

/// Samples of `ψ(t, φ)` on `[0, π/2] × [0, 2π)`, row-major in `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiGrid {
    pub d: usize,
    pub k: usize,
    pub n: f64,
    pub t: Vec<f64>,
    pub phi: Vec<f64>,
    pub values: Vec<f64>,
    pub rescaled: bool,
    /// Maximum of `|ψ|` before rescaling.
    pub scale: f64,
}

/// `ψ` on `nt` equispaced `t ∈ [0, π/2]` (endpoints included) and `nphi` equispaced `φ ∈ [0, 2π)`.
pub fn psi_grid(spec: &WaveletSpec, nt: usize, nphi: usize, rescale: bool) -> Result<PsiGrid> {
    if !spec.profile().is_symmetric() && spec.profile().kind() != ProfileKind::Zonal {
        return Err(Error::Config("ψ grids are defined for symmetric profiles".into()));
    }
    if nt < 2 || nphi == 0 {
        return domain("grid needs nt ≥ 2 and nphi ≥ 1");
    }
    let t: Vec<f64> = (0..nt).map(|i| PI / 2.0 * i as f64 / (nt - 1) as f64).collect();
    let phi: Vec<f64> = (0..nphi).map(|j| TAU * j as f64 / nphi as f64).collect();
    let sampler = SliceSampler::new(spec, &phi)?;
    let mut values: Vec<f64> = t.par_iter().flat_map_iter(|&tt| sampler.row(tt).into_iter().map(|v| v.re)).collect();
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if rescale && scale > 0.0 {
        values.iter_mut().for_each(|v| *v /= scale);
    }
    Ok(PsiGrid { d: spec.d(), k: spec.profile().k(), n: spec.bandwidth(), t, phi, values, rescaled: rescale, scale })
}

/// Slice grid for the optimal profile in dimension `d`.
pub fn slice_grid(d: usize, k: usize, n: f64, filter: FilterProfile, nt: usize, nphi: usize) -> Result<PsiGrid> {
    let spec = WaveletSpec::new(d, optimal_profile(d, k)?, filter, n)?;
    psi_grid(&spec, nt, nphi, true)
}

impl PsiGrid {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.phi.len() + j]
    }

    /// `max |ψ(t, φ+π) − (−1)^K ψ(t, φ)|`.
    pub fn symmetry_defect(&self) -> Result<f64> {
        let m = self.phi.len();
        if m % 2 != 0 {
            return domain("the symmetry check needs an even number of φ samples");
        }
        let sign = if self.k % 2 == 0 { 1.0 } else { -1.0 };
        let mut worst: f64 = 0.0;
        for i in 0..self.t.len() {
            for j in 0..m {
                worst = worst.max((self.value(i, (j + m / 2) % m) - sign * self.value(i, j)).abs());
            }
        }
        Ok(worst)
    }

    /// `E(t) = max_φ |ψ(t, φ)|`.
    pub fn envelope(&self) -> Vec<f64> {
        self.values.chunks(self.phi.len()).map(|r| r.iter().fold(0.0f64, |m, v| m.max(v.abs()))).collect()
    }

    /// Row of the global maximum of the envelope.
    pub fn peak_row(&self) -> usize {
        let e = self.envelope();
        (0..e.len()).fold(0, |best, i| if e[i] > e[best] { i } else { best })
    }

    /// Radius where the envelope first falls below half its maximum past the peak,
    /// linearly interpolated; `None` if it never does on the grid.
    pub fn half_max_radius(&self) -> Option<f64> {
        let e = self.envelope();
        let i0 = self.peak_row();
        let half = 0.5 * e[i0];
        (i0 + 1..e.len()).find(|&i| e[i] < half).map(|i| {
            let (a, b) = (e[i - 1], e[i]);
            self.t[i - 1] + (self.t[i] - self.t[i - 1]) * (a - half) / (a - b)
        })
    }

    /// CSV with header `t,phi,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,phi,value")?;
        for (i, t) in self.t.iter().enumerate() {
            for (j, p) in self.phi.iter().enumerate() {
                writeln!(out, "{t:.12e},{p:.12e},{:.16e}", self.value(i, j))?;
            }
        }
        Ok(())
    }

    /// Binary PGM (P5), `φ` along columns, values mapped from `[-1, 1]` to `[0, 255]`.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let norm = if self.rescaled || self.scale == 0.0 { 1.0 } else { self.scale };
        write!(out, "P5\n{} {}\n255\n", self.phi.len(), self.t.len())?;
        let bytes: Vec<u8> = self
            .values
            .iter()
            .map(|v| (((v / norm).clamp(-1.0, 1.0) + 1.0) * 127.5).round() as u8)
            .collect();
        out.write_all(&bytes)
    }
}

/// Defects of a sphere rule of degree `degree`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureCheck {
    pub d: usize,
    pub degree: usize,
    /// `max |Σ w Y − δ_{n,0}|` over all harmonics of degree `≤ degree`.
    pub integral_defect: f64,
    /// `max |Σ w Y_a conj(Y_b) − δ_{ab}|` over harmonics of degree `≤ degree/2`.
    pub gram_defect: f64,
}

pub fn quadrature_exactness(d: usize, degree: usize) -> Result<QuadratureCheck> {
    let rule = sphere_rule(d - 1, degree)?;
    let full = GridTransform::for_rule(&rule, degree)?;
    let ones = vec![Complex64::new(1.0, 0.0); rule.len()];
    let mut integrals = full.analyze(&ones);
    integrals.as_mut_slice()[0] -= 1.0;
    let integral_defect = integrals.as_slice().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let half = degree / 2;
    let t = GridTransform::for_rule(&rule, half)?;
    let len = dim_poly_below(d, half + 1);
    let gram_defect = (0..len)
        .into_par_iter()
        .map(|i| {
            let mut e = CoefficientVector::zeros(d, half);
            e.as_mut_slice()[i] = Complex64::new(1.0, 0.0);
            let col = t.analyze(&t.synthesize(&e));
            col.max_abs_diff(&e)
        })
        .reduce(|| 0.0, f64::max);
    Ok(QuadratureCheck { d, degree, integral_defect, gram_defect })
}

/// `max |Σ_k Y_k(x) conj(Y_k(y)) − ((2n+d−2)/(d−2)) C_n(⟨x,y⟩)|` over seeded random pairs.
pub fn addition_defect(d: usize, n: usize, pairs: usize, seed: u64) -> Result<f64> {
    if d < 3 {
        return domain("dimension must be at least 3");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = dim_poly_below(d, n);
    let hi = dim_poly_below(d, n + 1);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let x = random_point(d, &mut rng);
        let y = random_point(d, &mut rng);
        let hx = harmonics_at(&x, n);
        let hy = harmonics_at(&y, n);
        let s: Complex64 = (lo..hi).map(|i| hx[i] * hy[i].conj()).sum();
        let k = addition_kernel(d, n, dot(x.cartesian(), y.cartesian()));
        worst = worst.max((s - k).norm());
    }
    Ok(worst)
}

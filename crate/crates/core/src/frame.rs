//! Discrete tight frames `{Ψ_K^{j,ℓ,m}}`: construction, analysis, synthesis and
//! the operators `Λ_{J,Ω}`.
//!
//! Atom `(j, ℓ, m)` is `sqrt(ω_{j,ℓ} μ_{j,m}) T(g_{η_{j,ℓ}} h_{j,m}) Ψ_K^{2^{j-1}}`, and the
//! constant function with weight one forms scale 0. Atoms of scale `j` are numbered
//! `i = ℓ·r_j + m`.
//!
//! Inner products are evaluated exactly. The rotated wavelet is written as
//! `Ψ(g⁻¹x) = Σ_r Q_r(⟨g e^d, x⟩) ⟨z_r(g), x⟩^{p_r}` (see
//! [`kernel_decomposition`]), so that `⟨f, T(g)Ψ⟩` becomes a combination of zonal
//! convolutions of `f·x^α`, `|α| = p_r`, evaluated at `g e^d`. Those convolutions are
//! diagonal in the harmonic basis (Funk–Hecke) and are sampled on the position grid
//! with separable transforms. Synthesis is the exact adjoint. The per-atom
//! quadrature route is kept as [`Frame::analyze_by_quadrature`] and
//! [`Frame::synthesize_by_quadrature`].

use crate::basis::ortho_gegenbauer_all;
use crate::coeffs::CoefficientVector;
use crate::error::{domain, Error, Result};
use crate::filters::FilterProfile;
use crate::quadrature::{gauss_gegenbauer, so2_rule, sphere_directional_rule, sphere_rule, DirectionalRule, SphereRule};
use crate::specfun::multinomial;
use crate::sphere::{rotation_to_north, Rotation};
use crate::transform::GridTransform;
use crate::wavelet::{kernel_decomposition, DirectionalProfile, KernelGroup, ProfileKind, RadialProfile, TermDirection, WaveletEvaluator, WaveletSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::Arc;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// One scale of a frame: the wavelet and its position and direction rules.
#[derive(Debug, Clone)]
pub struct Scale {
    j: usize,
    spec: WaveletSpec,
    positions: Arc<SphereRule>,
    directions: Option<Arc<DirectionalRule>>,
    position_rotations: Vec<Rotation>,
    direction_rotations: Vec<Rotation>,
    direction_weights: Vec<f64>,
}

impl Scale {
    /// A scale with explicit rules; `directions = None` means the identity alone.
    pub fn new(j: usize, spec: WaveletSpec, positions: Arc<SphereRule>, directions: Option<Arc<DirectionalRule>>) -> Result<Self> {
        let d = spec.d();
        if positions.m + 1 != d {
            return domain("position rule lives on the wrong sphere");
        }
        let position_rotations = positions.points.iter().map(rotation_to_north).collect();
        let (direction_rotations, direction_weights) = match &directions {
            None => (vec![Rotation::identity(d)], vec![1.0]),
            Some(r) => (r.rotations(d), r.weights().to_vec()),
        };
        Ok(Self { j, spec, positions, directions, position_rotations, direction_rotations, direction_weights })
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn spec(&self) -> &WaveletSpec {
        &self.spec
    }

    pub fn positions(&self) -> &SphereRule {
        &self.positions
    }

    pub fn directions(&self) -> Option<&DirectionalRule> {
        self.directions.as_deref()
    }

    /// `s_j`.
    pub fn position_count(&self) -> usize {
        self.positions.len()
    }

    /// `r_j`.
    pub fn direction_count(&self) -> usize {
        self.direction_rotations.len()
    }

    pub fn atom_count(&self) -> usize {
        self.position_count() * self.direction_count()
    }

    /// `g_{η_ℓ} h_m` for atom `i = ℓ r + m`.
    pub fn rotation(&self, i: usize) -> Rotation {
        let r = self.direction_count();
        self.position_rotations[i / r].compose(&self.direction_rotations[i % r])
    }

    /// `ω_ℓ μ_m` for atom `i`.
    pub fn weight(&self, i: usize) -> f64 {
        let r = self.direction_count();
        self.positions.weights[i / r] * self.direction_weights[i % r]
    }

    pub fn position_rotation(&self, l: usize) -> &Rotation {
        &self.position_rotations[l]
    }

    pub fn direction_rotation(&self, m: usize) -> &Rotation {
        &self.direction_rotations[m]
    }

    pub fn direction_weight(&self, m: usize) -> f64 {
        self.direction_weights[m]
    }

    /// Copy with one direction weight replaced (for perturbation experiments).
    pub fn with_direction_weight(&self, m: usize, w: f64) -> Self {
        let mut s = self.clone();
        s.direction_weights[m] = w;
        s
    }
}

/// A frame atom.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub j: usize,
    pub index: usize,
    pub rotation: Rotation,
    pub weight: f64,
}

/// The frame `{Ψ_K^{j,ℓ,m}}` for scales `0..=J_max`.
#[derive(Debug, Clone)]
pub struct Frame {
    d: usize,
    k: usize,
    j_max: usize,
    filter: FilterProfile,
    profile: DirectionalProfile,
    scales: Vec<Scale>,
}

/// Coefficients `⟨f, Ψ^{j,ℓ,m}⟩`; scale 0 holds the single constant-atom entry.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameCoefficients {
    pub scale0: Complex64,
    pub scales: Vec<Vec<Complex64>>,
}

impl FrameCoefficients {
    pub fn zeros(frame: &Frame) -> Self {
        Self { scale0: ZERO, scales: frame.scales.iter().map(|s| vec![ZERO; s.atom_count()]).collect() }
    }

    /// Entry `(j, i)`.
    pub fn get(&self, j: usize, i: usize) -> Option<Complex64> {
        if j == 0 {
            return (i == 0).then_some(self.scale0);
        }
        self.scales.get(j - 1).and_then(|s| s.get(i).copied())
    }

    pub fn set(&mut self, j: usize, i: usize, v: Complex64) -> Result<()> {
        let slot = if j == 0 {
            (i == 0).then_some(&mut self.scale0)
        } else {
            self.scales.get_mut(j - 1).and_then(|s| s.get_mut(i))
        };
        match slot {
            Some(s) => {
                *s = v;
                Ok(())
            }
            None => Err(Error::Index(format!("frame coefficient ({j}, {i}) is out of range"))),
        }
    }

    /// `(j, i, value)` in order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        std::iter::once((0, 0, self.scale0))
            .chain(self.scales.iter().enumerate().flat_map(|(s, v)| v.iter().enumerate().map(move |(i, c)| (s + 1, i, *c))))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.scale0.norm_sqr() + self.scales.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn len(&self) -> usize {
        1 + self.scales.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Self {
        Self {
            scale0: a * self.scale0 + b * other.scale0,
            scales: self
                .scales
                .iter()
                .zip(&other.scales)
                .map(|(x, y)| x.iter().zip(y).map(|(u, v)| a * u + b * v).collect())
                .collect(),
        }
    }

    /// Keeps only scale `j` entries whose atom index lies in `keep`.
    pub fn restricted(&self, j: usize, keep: &[usize]) -> Self {
        let mut out = Self { scale0: ZERO, scales: self.scales.iter().map(|s| vec![ZERO; s.len()]).collect() };
        if j == 0 {
            if keep.contains(&0) {
                out.scale0 = self.scale0;
            }
        } else if let Some(src) = self.scales.get(j - 1) {
            for &i in keep {
                if i < src.len() {
                    out.scales[j - 1][i] = src[i];
                }
            }
        }
        out
    }
}

/// Builds the frame for scales `1..=J_max` plus the constant atom.
pub fn build_frame(d: usize, k: usize, j_max: usize, filter: FilterProfile, profile: DirectionalProfile) -> Result<Frame> {
    if d < 3 {
        return Err(Error::Config(format!("dimension must be at least 3, got {d}")));
    }
    profile.check_dimension(d)?;
    if profile.kind() != ProfileKind::Zonal && profile.k() != k {
        return Err(Error::Config(format!("profile has order {}, frame requested K = {k}", profile.k())));
    }
    if profile.kind() == ProfileKind::Zonal && k != 0 {
        return Err(Error::Config("a zonal profile needs K = 0".into()));
    }
    let mut dir_cache: HashMap<usize, Arc<DirectionalRule>> = HashMap::new();
    let mut scales = Vec::with_capacity(j_max);
    for j in 1..=j_max {
        let spec = WaveletSpec::dyadic(d, profile.clone(), filter, j)?;
        let positions = Arc::new(sphere_rule(d - 1, 1usize << (j + 1))?);
        let order = k.min(1usize << j);
        let directions = match profile.kind() {
            ProfileKind::Zonal => None,
            _ => {
                let rule = match dir_cache.get(&order) {
                    Some(r) => r.clone(),
                    None => {
                        let r = Arc::new(if d == 3 { so2_rule(order) } else { sphere_directional_rule(d, order)? });
                        dir_cache.insert(order, r.clone());
                        r
                    }
                };
                Some(rule)
            }
        };
        scales.push(Scale::new(j, spec, positions, directions)?);
    }
    Ok(Frame { d, k, j_max, filter, profile, scales })
}

impl Frame {
    /// A frame from explicitly constructed scales (used for perturbation and
    /// over-resolution experiments).
    ///
    /// Scales must be numbered `1, 2, …` in order.
    pub fn from_scales(d: usize, k: usize, filter: FilterProfile, profile: DirectionalProfile, scales: Vec<Scale>) -> Result<Self> {
        if scales.iter().enumerate().any(|(i, s)| s.j != i + 1 || s.spec.d() != d) {
            return Err(Error::Config("scales must be numbered 1, 2, … and share the dimension".into()));
        }
        let j_max = scales.len();
        Ok(Self { d, k, j_max, filter, profile, scales })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn filter(&self) -> FilterProfile {
        self.filter
    }

    pub fn profile(&self) -> &DirectionalProfile {
        &self.profile
    }

    pub fn scales(&self) -> &[Scale] {
        &self.scales
    }

    /// Scale `j ≥ 1`.
    pub fn scale(&self, j: usize) -> Option<&Scale> {
        j.checked_sub(1).and_then(|i| self.scales.get(i))
    }

    /// Total number of atoms including the constant one.
    pub fn atom_count(&self) -> usize {
        1 + self.scales.iter().map(Scale::atom_count).sum::<usize>()
    }

    /// All atoms `(j, i, g, w)`, the constant atom first.
    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        std::iter::once(Atom { j: 0, index: 0, rotation: Rotation::identity(self.d), weight: 1.0 }).chain(
            self.scales.iter().flat_map(|s| {
                (0..s.atom_count()).map(move |i| Atom { j: s.j, index: i, rotation: s.rotation(i), weight: s.weight(i) })
            }),
        )
    }

    /// Largest signal degree accepted by analysis, `2^{J_max+1}`.
    pub fn bandwidth(&self) -> usize {
        1usize << (self.j_max + 1)
    }

    fn check_signal(&self, f: &CoefficientVector) -> Result<usize> {
        if f.d() != self.d {
            return domain(format!("signal of dimension {} for a frame of dimension {}", f.d(), self.d));
        }
        let l = f.effective_degree(0.0);
        if l > self.bandwidth() {
            return domain(format!("signal degree {l} exceeds the frame bandwidth {}", self.bandwidth()));
        }
        Ok(l)
    }

    /// `⟨f, Ψ^{j,ℓ,m}⟩` for all atoms.
    pub fn analyze(&self, f: &CoefficientVector) -> Result<FrameCoefficients> {
        let l = self.check_signal(f)?;
        let scales: Vec<usize> = (1..=self.j_max).collect();
        let engine = Engine::new(self.d, &self.scales, &scales, l)?;
        let mut out = FrameCoefficients::zeros(self);
        out.scale0 = f.as_slice()[0];
        engine.analyze(&f.resized(l), &mut out.scales);
        Ok(out)
    }

    /// Coefficients of scale `j` only (other scales left zero).
    pub fn analyze_scale(&self, f: &CoefficientVector, j: usize) -> Result<FrameCoefficients> {
        let l = self.check_signal(f)?;
        let mut out = FrameCoefficients::zeros(self);
        if j == 0 {
            out.scale0 = f.as_slice()[0];
            return Ok(out);
        }
        if j > self.j_max {
            return Err(Error::Index(format!("scale {j} exceeds J_max = {}", self.j_max)));
        }
        let engine = Engine::new(self.d, &self.scales, &[j], l)?;
        engine.analyze(&f.resized(l), &mut out.scales);
        Ok(out)
    }

    /// Highest degree of any scale carrying a nonzero coefficient.
    fn contributing_degree(&self, c: &FrameCoefficients) -> usize {
        self.scales
            .iter()
            .zip(&c.scales)
            .filter(|(_, v)| v.iter().any(|x| x.norm() != 0.0))
            .map(|(s, _)| s.spec.max_degree())
            .max()
            .unwrap_or(0)
    }

    fn check_coefficients(&self, c: &FrameCoefficients) -> Result<()> {
        if c.scales.len() != self.scales.len()
            || c.scales.iter().zip(&self.scales).any(|(v, s)| v.len() != s.atom_count())
        {
            return domain("frame coefficients do not match the frame layout");
        }
        Ok(())
    }

    /// `Σ_i c_i Ψ_i` as harmonic coefficients up to `out_degree`.
    ///
    /// Fails with [`Error::Truncation`] when a contributing wavelet has degrees above `out_degree`.
    pub fn synthesize(&self, c: &FrameCoefficients, out_degree: usize) -> Result<CoefficientVector> {
        self.check_coefficients(c)?;
        let need = self.contributing_degree(c);
        if out_degree < need {
            return Err(Error::Truncation(format!(
                "output degree {out_degree} is below the contributing wavelet degree {need}"
            )));
        }
        self.synthesize_projected(c, out_degree)
    }

    /// Orthogonal projection of `Σ_i c_i Ψ_i` onto `Π_{out_degree}`.
    pub fn synthesize_projected(&self, c: &FrameCoefficients, out_degree: usize) -> Result<CoefficientVector> {
        self.check_coefficients(c)?;
        let active: Vec<usize> = self
            .scales
            .iter()
            .zip(&c.scales)
            .filter(|(_, v)| v.iter().any(|x| x.norm() != 0.0))
            .map(|(s, _)| s.j)
            .collect();
        let mut out = if active.is_empty() {
            CoefficientVector::zeros(self.d, out_degree)
        } else {
            Engine::new(self.d, &self.scales, &active, out_degree)?.synthesize(&c.scales)
        };
        out.as_mut_slice()[0] += c.scale0;
        Ok(out)
    }

    /// Per-atom route: `sqrt(w) Σ_q w_q f(x_q) conj(Ψ(g⁻¹x_q))` on a rule of degree `L + 2^j`.
    pub fn analyze_by_quadrature(&self, f: &CoefficientVector) -> Result<FrameCoefficients> {
        let l = self.check_signal(f)?;
        let f = f.resized(l);
        let mut out = FrameCoefficients::zeros(self);
        out.scale0 = f.as_slice()[0];
        for (s, dst) in self.scales.iter().zip(out.scales.iter_mut()) {
            let rule = sphere_rule(self.d - 1, l + (1usize << s.j))?;
            let vals = GridTransform::for_rule(&rule, l)?.synthesize(&f);
            let ev = WaveletEvaluator::new(&s.spec);
            dst.par_iter_mut().enumerate().for_each(|(i, c)| {
                let g = s.rotation(i);
                let acc: Complex64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .zip(&vals)
                    .map(|((p, w), v)| *w * v * ev.eval_rotated(&g, p).conj())
                    .sum();
                *c = s.weight(i).sqrt() * acc;
            });
        }
        Ok(out)
    }

    /// Per-atom route: sums the atoms on a rule of degree `out_degree + max wavelet degree`
    /// and projects.
    pub fn synthesize_by_quadrature(&self, c: &FrameCoefficients, out_degree: usize) -> Result<CoefficientVector> {
        self.check_coefficients(c)?;
        let need = self.contributing_degree(c);
        if out_degree < need {
            return Err(Error::Truncation(format!(
                "output degree {out_degree} is below the contributing wavelet degree {need}"
            )));
        }
        let rule = sphere_rule(self.d - 1, out_degree + need)?;
        let mut vals = vec![ZERO; rule.len()];
        for (s, coeffs) in self.scales.iter().zip(&c.scales) {
            let ev = WaveletEvaluator::new(&s.spec);
            let atoms: Vec<(Rotation, Complex64)> = coeffs
                .iter()
                .enumerate()
                .filter(|(_, v)| v.norm() != 0.0)
                .map(|(i, v)| (s.rotation(i), v * s.weight(i).sqrt()))
                .collect();
            let add: Vec<Complex64> = rule
                .points
                .par_iter()
                .map(|p| atoms.iter().map(|(g, v)| v * ev.eval_rotated(g, p)).sum())
                .collect();
            for (a, b) in vals.iter_mut().zip(add) {
                *a += b;
            }
        }
        let mut out = GridTransform::for_rule(&rule, out_degree)?.analyze(&vals);
        out.as_mut_slice()[0] += c.scale0;
        Ok(out)
    }

    /// `Λ_{J,Ω} f = f ∗ Φ^J + Σ_{i∈Ω} ⟨f, Ψ^{J+1,i}⟩ Ψ^{J+1,i}`.
    pub fn lambda_operator(&self, f: &CoefficientVector, j: usize, omega: &[usize]) -> Result<CoefficientVector> {
        if j + 1 > self.j_max {
            return domain(format!("Λ_J needs J + 1 ≤ J_max, got J = {j}, J_max = {}", self.j_max));
        }
        let scale = &self.scales[j];
        if let Some(&bad) = omega.iter().find(|&&i| i >= scale.atom_count()) {
            return Err(Error::Index(format!("atom index {bad} out of range for scale {}", j + 1)));
        }
        let out_degree = f.max_degree().max(scale.spec.max_degree());
        let dyad = 2f64.powi(j as i32);
        let filter = self.filter;
        let conv = f.resized(out_degree).scale_by_degree(|n| filter.phi_unchecked(n as f64 / dyad).powi(2));
        if omega.is_empty() {
            return Ok(conv);
        }
        let c = self.analyze_scale(f, j + 1)?.restricted(j + 1, omega);
        let part = self.synthesize_projected(&c, out_degree)?;
        Ok(conv.add_scaled(Complex64::new(1.0, 0.0), &part))
    }

    /// `|Σ|c|² − ‖f‖²| / ‖f‖²`.
    pub fn parseval_gap(&self, f: &CoefficientVector) -> Result<f64> {
        let norm = f.norm_sqr();
        if norm == 0.0 {
            return domain("the Parseval gap is undefined for the zero signal");
        }
        let c = self.analyze(f)?;
        Ok((c.norm_sqr() - norm).abs() / norm)
    }
}

/// Multi-indices `α ∈ ℕ^d` with `|α| ≤ P`, grouped by degree.
struct Alphas {
    list: Vec<Vec<usize>>,
    multinom: Vec<f64>,
    start: Vec<usize>,
}

impl Alphas {
    fn new(d: usize, max_power: usize) -> Self {
        let mut list = Vec::new();
        let mut start = Vec::new();
        for p in 0..=max_power {
            start.push(list.len());
            let mut cur = vec![0; d];
            gen_alphas(d, p, 0, &mut cur, &mut list);
        }
        start.push(list.len());
        let multinom = list.iter().map(|a| multinomial(a)).collect();
        Self { list, multinom, start }
    }

    fn range(&self, p: usize) -> std::ops::Range<usize> {
        self.start[p]..self.start[p + 1]
    }
}

fn gen_alphas(d: usize, left: usize, i: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if i + 1 == d {
        cur[i] = left;
        out.push(cur.clone());
        cur[i] = 0;
        return;
    }
    for v in (0..=left).rev() {
        cur[i] = v;
        gen_alphas(d, left - v, i + 1, cur, out);
    }
    cur[i] = 0;
}

/// Funk–Hecke multipliers `∫ conj(Q(t)) C_ℓ(t)/C_ℓ(1) dν_d(t)`, `ℓ ≤ max_l`.
fn funk_hecke(d: usize, q: &RadialProfile, max_l: usize) -> Result<Vec<Complex64>> {
    let alpha = (d as f64 - 3.0) / 2.0;
    let lambda = (d as f64 - 2.0) / 2.0;
    let rule = gauss_gegenbauer(alpha, (q.degree() + max_l) / 2 + 1)?.normalized();
    let mut at_one = Vec::new();
    ortho_gegenbauer_all(lambda, max_l, 1.0, &mut at_one);
    let mut out = vec![ZERO; max_l + 1];
    let mut buf = Vec::new();
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let qv = q.eval(t).conj() * w;
        ortho_gegenbauer_all(lambda, max_l, t, &mut buf);
        for l in 0..=max_l {
            out[l] += qv * (buf[l] / at_one[l]);
        }
    }
    Ok(out)
}

fn apply_multipliers(h: &CoefficientVector, mult: &[Complex64], degree: usize, conjugate: bool) -> CoefficientVector {
    let mut e = h.resized(degree);
    for (n, &m) in mult.iter().enumerate().take(degree + 1) {
        let m = if conjugate { m.conj() } else { m };
        let r = e.degree_range(n);
        for v in &mut e.as_mut_slice()[r] {
            *v *= m;
        }
    }
    e
}

struct GroupPlan {
    power: usize,
    degree: usize,
    multipliers: Vec<Complex64>,
    /// Per direction term, per direction node `m`: `z(h_m)`.
    templates: Vec<Vec<Vec<Complex64>>>,
}

struct ScalePlan<'a> {
    scale: &'a Scale,
    slot: usize,
    groups: Vec<GroupPlan>,
    transforms: HashMap<usize, GridTransform>,
    /// `(group, α)` pairs in evaluation order.
    pairs: Vec<(usize, usize)>,
}

struct Engine<'a> {
    alphas: Alphas,
    prod_transform: GridTransform,
    prod_points: Vec<Vec<f64>>,
    plans: Vec<ScalePlan<'a>>,
    degree: usize,
    d: usize,
}

impl<'a> Engine<'a> {
    /// Plans scales `which` (1-based) for signals of degree `degree`.
    fn new(d: usize, scales: &'a [Scale], which: &[usize], degree: usize) -> Result<Self> {
        let mut plans = Vec::new();
        let mut max_power = 0;
        for &j in which {
            let slot = scales.iter().position(|s| s.j == j).ok_or_else(|| Error::Index(format!("no scale {j}")))?;
            let scale = &scales[slot];
            let groups_raw: Vec<KernelGroup> = kernel_decomposition(&scale.spec);
            let wmax = scale.spec.max_degree();
            let mut groups = Vec::new();
            let mut transforms = HashMap::new();
            for g in groups_raw {
                let deg = wmax.min(degree + g.power);
                let multipliers = funk_hecke(d, &g.radial, deg)?;
                let templates = g
                    .directions
                    .iter()
                    .map(|dir| (0..scale.direction_count()).map(|m| dir_template(dir, scale.direction_rotation(m))).collect())
                    .collect();
                if let std::collections::hash_map::Entry::Vacant(e) = transforms.entry(deg) {
                    e.insert(GridTransform::for_rule(&scale.positions, deg)?);
                }
                max_power = max_power.max(g.power);
                groups.push(GroupPlan { power: g.power, degree: deg, multipliers, templates });
            }
            plans.push(ScalePlan { scale, slot, groups, transforms, pairs: Vec::new() });
        }
        let alphas = Alphas::new(d, max_power);
        for plan in &mut plans {
            plan.pairs = plan
                .groups
                .iter()
                .enumerate()
                .flat_map(|(gi, g)| alphas.range(g.power).map(move |a| (gi, a)))
                .collect();
        }
        let prod_rule = sphere_rule(d - 1, 2 * (degree + max_power))?;
        let prod_transform = GridTransform::for_rule(&prod_rule, degree + max_power)?;
        let prod_points = prod_rule.points.iter().map(|p| p.cartesian().to_vec()).collect();
        Ok(Self { alphas, prod_transform, prod_points, plans, degree, d })
    }

    fn monomial_values(&self, a: usize) -> Vec<f64> {
        let alpha = &self.alphas.list[a];
        self.prod_points
            .iter()
            .map(|x| x.iter().zip(alpha).map(|(v, &e)| v.powi(e as i32)).product())
            .collect()
    }

    fn needed_alphas(&self) -> Vec<usize> {
        let mut needed: Vec<usize> = self.plans.iter().flat_map(|p| p.pairs.iter().map(|&(_, a)| a)).collect();
        needed.sort_unstable();
        needed.dedup();
        needed
    }

    fn analyze(&self, f: &CoefficientVector, out: &mut [Vec<Complex64>]) {
        let total = self.prod_transform.degree();
        let fvals = self.prod_transform.synthesize(&f.resized(total));
        let needed = self.needed_alphas();
        let h: HashMap<usize, CoefficientVector> = needed
            .par_iter()
            .map(|&a| {
                let mono = self.monomial_values(a);
                let prod: Vec<Complex64> = fvals.iter().zip(&mono).map(|(v, m)| v * m).collect();
                (a, self.prod_transform.analyze(&prod))
            })
            .collect();
        for plan in &self.plans {
            let fields: Vec<Vec<Complex64>> = plan
                .pairs
                .par_iter()
                .map(|&(gi, a)| {
                    let g = &plan.groups[gi];
                    let e = apply_multipliers(&h[&a], &g.multipliers, g.degree, false);
                    plan.transforms[&g.degree].synthesize(&e)
                })
                .collect();
            let scale = plan.scale;
            let r = scale.direction_count();
            let weights = &scale.positions.weights;
            let alphas = &self.alphas;
            out[plan.slot].par_chunks_mut(r).enumerate().for_each(|(l, chunk)| {
                let g_pos = scale.position_rotation(l);
                let mut z = vec![ZERO; self.d];
                let mut pw = Vec::new();
                for (m, c) in chunk.iter_mut().enumerate() {
                    let mut acc = ZERO;
                    let mut pair = 0;
                    for g in &plan.groups {
                        let range = alphas.range(g.power);
                        let mut coef = vec![ZERO; range.len()];
                        for t in &g.templates {
                            rotate_into(g_pos, &t[m], &mut z);
                            power_table(&z, g.power, &mut pw);
                            for (ci, a) in coef.iter_mut().zip(range.clone()) {
                                *ci += alphas.multinom[a] * monomial(&pw, g.power, &alphas.list[a]).conj();
                            }
                        }
                        for ci in coef {
                            acc += ci * fields[pair][l];
                            pair += 1;
                        }
                    }
                    *c = (weights[l] * scale.direction_weight(m)).sqrt() * acc;
                }
            });
        }
    }

    fn synthesize(&self, coeffs: &[Vec<Complex64>]) -> CoefficientVector {
        let total = self.prod_transform.degree();
        let mut e_alpha: HashMap<usize, CoefficientVector> = HashMap::new();
        for plan in &self.plans {
            let scale = plan.scale;
            let r = scale.direction_count();
            let weights = &scale.positions.weights;
            let alphas = &self.alphas;
            let c = &coeffs[plan.slot];
            let per_position: Vec<Vec<Complex64>> = (0..scale.position_count())
                .into_par_iter()
                .map(|l| {
                    let g_pos = scale.position_rotation(l);
                    let mut z = vec![ZERO; self.d];
                    let mut pw = Vec::new();
                    let mut acc = vec![ZERO; plan.pairs.len()];
                    for m in 0..r {
                        let cm = c[l * r + m] * (weights[l] * scale.direction_weight(m)).sqrt();
                        if cm.norm() == 0.0 {
                            continue;
                        }
                        let mut pair = 0;
                        for g in &plan.groups {
                            let range = alphas.range(g.power);
                            let base = pair;
                            for t in &g.templates {
                                rotate_into(g_pos, &t[m], &mut z);
                                power_table(&z, g.power, &mut pw);
                                for (off, a) in range.clone().enumerate() {
                                    acc[base + off] += cm * alphas.multinom[a] * monomial(&pw, g.power, &alphas.list[a]);
                                }
                            }
                            pair += range.len();
                        }
                    }
                    acc
                })
                .collect();
            let parts: Vec<(usize, CoefficientVector)> = plan
                .pairs
                .par_iter()
                .enumerate()
                .map(|(pi, &(gi, a))| {
                    let g = &plan.groups[gi];
                    let field: Vec<Complex64> = per_position.iter().map(|v| v[pi]).collect();
                    let adj = plan.transforms[&g.degree].adjoint(&field);
                    (a, apply_multipliers(&adj, &g.multipliers, g.degree, true))
                })
                .collect();
            for (a, v) in parts {
                let deg = (self.degree + self.alphas.list[a].iter().sum::<usize>()).min(total);
                let v = v.resized(deg);
                let entry = e_alpha.entry(a).or_insert_with(|| CoefficientVector::zeros(self.d, deg));
                *entry = entry.add_scaled(Complex64::new(1.0, 0.0), &v);
            }
        }
        let mut keys: Vec<usize> = e_alpha.keys().copied().collect();
        keys.sort_unstable();
        let fields: Vec<Vec<Complex64>> = keys
            .par_iter()
            .map(|a| {
                let vals = self.prod_transform.synthesize(&e_alpha[a].resized(total));
                let mono = self.monomial_values(*a);
                vals.iter().zip(&mono).map(|(v, m)| v * m).collect()
            })
            .collect();
        let mut s = vec![ZERO; self.prod_transform.len()];
        for f in fields {
            for (a, b) in s.iter_mut().zip(f) {
                *a += b;
            }
        }
        self.prod_transform.analyze(&s).resized(self.degree)
    }
}

fn dir_template(dir: &TermDirection, h: &Rotation) -> Vec<Complex64> {
    dir.vector(h)
}

fn rotate_into(g: &Rotation, v: &[Complex64], out: &mut [Complex64]) {
    let d = g.d();
    let m = g.matrix();
    for i in 0..d {
        let row = &m[i * d..(i + 1) * d];
        out[i] = row.iter().zip(v).map(|(a, b)| b * *a).sum();
    }
}

/// `pw[i * (p+1) + e] = z_i^e`.
fn power_table(z: &[Complex64], p: usize, pw: &mut Vec<Complex64>) {
    pw.clear();
    for &zi in z {
        let mut v = Complex64::new(1.0, 0.0);
        pw.push(v);
        for _ in 0..p {
            v *= zi;
            pw.push(v);
        }
    }
}

fn monomial(pw: &[Complex64], p: usize, alpha: &[usize]) -> Complex64 {
    let mut v = Complex64::new(1.0, 0.0);
    for (i, &e) in alpha.iter().enumerate() {
        if e != 0 {
            v *= pw[i * (p + 1) + e];
        }
    }
    v
}

/// `Σ_{ℓ,m} ω μ F₁ conj(F₂)` over the scale-`j` grid, with `F(g) = ⟨f, T(g)Ψ_j⟩`.
pub fn scale_product_sum(frame: &Frame, j: usize, f1: &CoefficientVector, f2: &CoefficientVector) -> Result<Complex64> {
    let a = frame.analyze_scale(f1, j)?;
    let b = frame.analyze_scale(f2, j)?;
    Ok(a.scales[j - 1].iter().zip(&b.scales[j - 1]).map(|(x, y)| x * y.conj()).sum())
}

/// The `SO(d)` integral `∫ F₁ conj(F₂)` by the iterated form
/// `∫_{𝕊^{d-1}} ∫_{SO(d-1)} F(g_η h) dh dω(η)`, using rules of degree `2^{j+1} + extra`
/// on the sphere and `2·min(K, 2^j) + extra` in the stabilizer.
pub fn scale_product_iterated(
    frame: &Frame,
    j: usize,
    f1: &CoefficientVector,
    f2: &CoefficientVector,
    extra: usize,
) -> Result<Complex64> {
    let base = frame.scale(j).ok_or_else(|| Error::Index(format!("no scale {j}")))?;
    let d = frame.d();
    let positions = Arc::new(sphere_rule(d - 1, (1usize << (j + 1)) + extra)?);
    let order = frame.k().min(1usize << j);
    let directions = match frame.profile().kind() {
        ProfileKind::Zonal => None,
        _ if d == 3 => Some(Arc::new(crate::quadrature::so2_rule_with_nodes(2 * order + 1 + extra, 2 * order + extra))),
        _ => Some(Arc::new(DirectionalRule::Sphere(sphere_rule(d - 2, 2 * order + extra)?))),
    };
    let mut scales = frame.scales().to_vec();
    scales[j - 1] = Scale::new(j, base.spec.clone(), positions, directions)?;
    let fine = Frame::from_scales(d, frame.k(), frame.filter(), frame.profile().clone(), scales)?;
    scale_product_sum(&fine, j, f1, f2)
}

/// The same integral from the harmonic expansion: `Σ_n κ²(n/2^{j-1}) ⟨f̂₁(n), f̂₂(n)⟩`.
pub fn scale_product_closed_form(frame: &Frame, j: usize, f1: &CoefficientVector, f2: &CoefficientVector) -> Complex64 {
    let n_max = f1.max_degree().min(f2.max_degree());
    let bw = 2f64.powi(j as i32 - 1);
    let mut acc = ZERO;
    for n in 0..=n_max {
        let k = frame.filter().kappa_unchecked(n as f64 / bw);
        if k == 0.0 {
            continue;
        }
        let r1 = f1.degree_range(n);
        let s: Complex64 = f1.as_slice()[r1.clone()].iter().zip(&f2.as_slice()[r1]).map(|(a, b)| a * b.conj()).sum();
        acc += k * k * s;
    }
    acc
}

//! Catalog of concrete N-dimensional divergence-measure fields with their
//! divergences encoded symbolically, C² tensor-product test functions, and
//! the weak-divergence self-test ∫φ d(div A) = -∫∇φ·dA.

use crate::boxset::BoxND;
use crate::error::{Error, Result};
use crate::func1d::{Interval1D, PiecewiseFunction1D};
use crate::poly::Poly;
use crate::quad::{self, QuadOpts};

/// Volume of the unit ball in ℝ^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

/// The dimensional constant N (2N/(N+1))^{(N-1)/2} ω_N / ω_{N-1} from the
/// absolute-continuity bound for essentially bounded fields.
pub fn dimension_constant(n: usize) -> f64 {
    let nf = n as f64;
    nf * (2.0 * nf / (nf + 1.0)).powf((nf - 1.0) / 2.0) * unit_ball_volume(n)
        / unit_ball_volume(n - 1)
}

/// Tensor product of C² polynomial bumps: amp * Π (1 - t_j²)³ with
/// t_j = (x_j - center_j)/halfwidth_j, supported on Π [c_j - h_j, c_j + h_j].
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BumpND {
    pub center: Vec<f64>,
    pub halfwidth: Vec<f64>,
    pub amp: f64,
}

fn bump_profile() -> Poly {
    // (1 - t²)³ = 1 - 3t² + 3t⁴ - t⁶
    Poly::new(vec![1.0, 0.0, -3.0, 0.0, 3.0, 0.0, -1.0])
}

impl BumpND {
    pub fn new(center: Vec<f64>, halfwidth: Vec<f64>, amp: f64) -> Result<Self> {
        if center.len() != halfwidth.len() || halfwidth.iter().any(|&h| !(h > 0.0)) {
            return Err(Error::BadParams("bump halfwidths must be positive".into()));
        }
        Ok(BumpND { center, halfwidth, amp })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn support(&self) -> BoxND {
        BoxND {
            lo: self.center.iter().zip(&self.halfwidth).map(|(c, h)| c - h).collect(),
            hi: self.center.iter().zip(&self.halfwidth).map(|(c, h)| c + h).collect(),
        }
    }

    fn axis_value(&self, j: usize, x: f64) -> f64 {
        let t = (x - self.center[j]) / self.halfwidth[j];
        if t.abs() >= 1.0 {
            0.0
        } else {
            let s = 1.0 - t * t;
            s * s * s
        }
    }

    fn axis_deriv(&self, j: usize, x: f64) -> f64 {
        let t = (x - self.center[j]) / self.halfwidth[j];
        if t.abs() >= 1.0 {
            0.0
        } else {
            let s = 1.0 - t * t;
            -6.0 * t * s * s / self.halfwidth[j]
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut v = self.amp;
        for j in 0..self.dim() {
            v *= self.axis_value(j, x[j]);
            if v == 0.0 {
                return 0.0;
            }
        }
        v
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|k| {
                let mut v = self.amp;
                for j in 0..self.dim() {
                    v *= if j == k {
                        self.axis_deriv(j, x[j])
                    } else {
                        self.axis_value(j, x[j])
                    };
                }
                v
            })
            .collect()
    }

    /// Per-axis factor as an exact piecewise polynomial on `span`; the
    /// amplitude sits on axis 0.
    pub fn axis_fn(&self, j: usize, span: Interval1D, deriv: bool) -> Result<PiecewiseFunction1D> {
        let (c, h) = (self.center[j], self.halfwidth[j]);
        let base = bump_profile().compose_affine(1.0 / h, -c / h);
        let p = if deriv { base.derivative() } else { base };
        let p = if j == 0 { p.scale(self.amp) } else { p };
        let mut bps = vec![];
        for v in [c - h, c + h] {
            if span.contains(v) {
                bps.push(v);
            }
        }
        let knots = crate::func1d::knots_of(&span, &bps);
        let mut pieces = Vec::with_capacity(knots.len() - 1);
        for w in knots.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            pieces.push(if mid > c - h && mid < c + h {
                crate::piece::Expr::poly(p.clone())
            } else {
                crate::piece::Expr::zero()
            });
        }
        PiecewiseFunction1D::new(span, bps, pieces)
    }
}

/// Pointwise-evaluable closed-form densities for measure parts.
#[derive(Debug, Clone)]
pub enum DensityND {
    Constant(f64),
    /// coef * Π over axes of the optional 1D profiles.
    Tensor { coef: f64, factors: Vec<Option<PiecewiseFunction1D>> },
    /// coef * x_axis / |x|^dim: a component of the radial kernel field.
    RadialComponent { axis: usize, coef: f64, dim: usize },
}

impl DensityND {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            DensityND::Constant(c) => *c,
            DensityND::Tensor { coef, factors } => {
                let mut v = *coef;
                for (j, f) in factors.iter().enumerate() {
                    if let Some(f) = f {
                        v *= f.eval(x[j]);
                    }
                }
                v
            }
            DensityND::RadialComponent { axis, coef, dim } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                if r2 == 0.0 {
                    return 0.0;
                }
                coef * x[*axis] / r2.powf(*dim as f64 / 2.0)
            }
        }
    }

    pub fn scale(&self, s: f64) -> DensityND {
        match self {
            DensityND::Constant(c) => DensityND::Constant(c * s),
            DensityND::Tensor { coef, factors } => {
                DensityND::Tensor { coef: coef * s, factors: factors.clone() }
            }
            DensityND::RadialComponent { axis, coef, dim } => {
                DensityND::RadialComponent { axis: *axis, coef: coef * s, dim: *dim }
            }
        }
    }
}

/// A measure on ℝ^N assembled from atoms, volume densities, hyperplane
/// surface densities and axis-aligned segment densities. Singular-continuous
/// parts are outside the data model.
#[derive(Debug, Clone, Default)]
pub struct MeasureND {
    pub dim: usize,
    pub atoms: Vec<(Vec<f64>, f64)>,
    pub volumes: Vec<VolumePart>,
    pub surfaces: Vec<SurfacePart>,
    pub segments: Vec<SegmentPart>,
}

#[derive(Debug, Clone)]
pub struct VolumePart {
    pub region: BoxND,
    pub density: DensityND,
}

#[derive(Debug, Clone)]
pub struct SurfacePart {
    pub axis: usize,
    pub offset: f64,
    /// Carrier rectangle with rect.lo[axis] == rect.hi[axis] == offset.
    pub rect: BoxND,
    pub density: DensityND,
}

#[derive(Debug, Clone)]
pub struct SegmentPart {
    pub axis: usize,
    /// Full-dimensional anchor; the coordinate on `axis` is replaced by t.
    pub point: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
    pub density: DensityND,
}

impl SegmentPart {
    pub fn point_at(&self, t: f64) -> Vec<f64> {
        let mut p = self.point.clone();
        p[self.axis] = t;
        p
    }
}

impl MeasureND {
    pub fn zero(dim: usize) -> Self {
        MeasureND { dim, ..Default::default() }
    }

    pub fn scale(&self, s: f64) -> Self {
        MeasureND {
            dim: self.dim,
            atoms: self.atoms.iter().map(|(x, w)| (x.clone(), w * s)).collect(),
            volumes: self
                .volumes
                .iter()
                .map(|p| VolumePart { region: p.region.clone(), density: p.density.scale(s) })
                .collect(),
            surfaces: self
                .surfaces
                .iter()
                .map(|p| SurfacePart {
                    axis: p.axis,
                    offset: p.offset,
                    rect: p.rect.clone(),
                    density: p.density.scale(s),
                })
                .collect(),
            segments: self
                .segments
                .iter()
                .map(|p| SegmentPart {
                    axis: p.axis,
                    point: p.point.clone(),
                    lo: p.lo,
                    hi: p.hi,
                    density: p.density.scale(s),
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.atoms.extend(other.atoms.iter().cloned());
        out.volumes.extend(other.volumes.iter().cloned());
        out.surfaces.extend(other.surfaces.iter().cloned());
        out.segments.extend(other.segments.iter().cloned());
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Merge atoms at coinciding locations and drop exact zeros.
    pub fn normalized_atoms(&self) -> Vec<(Vec<f64>, f64)> {
        let mut out: Vec<(Vec<f64>, f64)> = Vec::new();
        for (x, w) in &self.atoms {
            match out.iter_mut().find(|(y, _)| y == x) {
                Some((_, acc)) => *acc += w,
                None => out.push((x.clone(), *w)),
            }
        }
        out.retain(|&(_, w)| w != 0.0);
        out
    }

    /// ∫ φ dμ against a tensor bump, exact for tensor-structured parts.
    pub fn integrate_bump(&self, phi: &BumpND, opts: &QuadOpts) -> Result<f64> {
        let mut total = 0.0;
        for (x, w) in &self.atoms {
            total += phi.eval(x) * w;
        }
        let support = phi.support();
        for part in &self.volumes {
            let region = match part.region.clip(&support) {
                Some(r) => r,
                None => continue,
            };
            total += match &part.density {
                DensityND::Tensor { coef, factors } => {
                    tensor_box_integral(*coef, factors, None, phi, &region, opts)?
                }
                DensityND::Constant(c) => {
                    let factors = vec![None; self.dim];
                    tensor_box_integral(*c, &factors, None, phi, &region, opts)?
                }
                d => {
                    let f = |p: &[f64]| phi.eval(p) * d.eval(p);
                    quad::integrate_nd(&f, &region.lo, &region.hi, opts)?.value
                }
            };
        }
        for part in &self.surfaces {
            total += integrate_surface(part, &|p| phi.eval(p), &support, opts)?;
        }
        for part in &self.segments {
            let lo = part.lo.max(support.lo[part.axis]);
            let hi = part.hi.min(support.hi[part.axis]);
            if lo >= hi {
                continue;
            }
            let f = |t: f64| {
                let p = part.point_at(t);
                phi.eval(&p) * part.density.eval(&p)
            };
            total += quad::integrate(&f, lo, hi, opts)?.value;
        }
        Ok(total)
    }

    /// Total variation inside a bounded window.
    pub fn total_variation_in(&self, window: &BoxND, opts: &QuadOpts) -> Result<f64> {
        let mut tv = 0.0;
        for (x, w) in &self.normalized_atoms() {
            if window.contains_open(x) {
                tv += w.abs();
            }
        }
        for part in &self.volumes {
            if let Some(region) = part.region.clip(window) {
                let f = |p: &[f64]| part.density.eval(p).abs();
                tv += quad::integrate_nd(&f, &region.lo, &region.hi, opts)?.value;
            }
        }
        for part in &self.surfaces {
            let f = |p: &[f64]| part.density.eval(p).abs();
            tv += integrate_surface_raw(part, &f, window, opts)?;
        }
        for part in &self.segments {
            let lo = part.lo.max(window.lo[part.axis]);
            let hi = part.hi.min(window.hi[part.axis]);
            if lo < hi {
                let f = |t: f64| part.density.eval(&part.point_at(t)).abs();
                tv += quad::integrate(&f, lo, hi, opts)?.value;
            }
        }
        Ok(tv)
    }

    /// Signed total mass inside a bounded window.
    pub fn total_in(&self, window: &BoxND, opts: &QuadOpts) -> Result<f64> {
        let mut t = 0.0;
        for (x, w) in &self.normalized_atoms() {
            if window.contains_open(x) {
                t += w;
            }
        }
        for part in &self.volumes {
            if let Some(region) = part.region.clip(window) {
                let f = |p: &[f64]| part.density.eval(p);
                t += quad::integrate_nd(&f, &region.lo, &region.hi, opts)?.value;
            }
        }
        for part in &self.surfaces {
            let f = |p: &[f64]| part.density.eval(p);
            t += integrate_surface_raw(part, &f, window, opts)?;
        }
        for part in &self.segments {
            let lo = part.lo.max(window.lo[part.axis]);
            let hi = part.hi.min(window.hi[part.axis]);
            if lo < hi {
                let f = |t0: f64| part.density.eval(&part.point_at(t0));
                t += quad::integrate(&f, lo, hi, opts)?.value;
            }
        }
        Ok(t)
    }
}

/// Exact tensor integral over a bounded box: coef Π_j ∫ factor_j(x) b_j(x) dx
/// where b_j is the bump's axis factor (derivative on axis `deriv_axis`).
pub(crate) fn tensor_box_integral(
    coef: f64,
    factors: &[Option<PiecewiseFunction1D>],
    deriv_axis: Option<usize>,
    phi: &BumpND,
    region: &BoxND,
    opts: &QuadOpts,
) -> Result<f64> {
    let mut v = coef;
    for j in 0..phi.dim() {
        if v == 0.0 {
            return Ok(0.0);
        }
        if !(region.lo[j] < region.hi[j]) {
            return Ok(0.0);
        }
        let span = Interval1D::new(region.lo[j], region.hi[j])?;
        let b = phi.axis_fn(j, span, deriv_axis == Some(j))?;
        v *= match &factors[j] {
            Some(f) => f.restricted(span)?.integral_product(&b, span.lo, span.hi, opts)?,
            None => b.signed_integral(span.lo, span.hi)?,
        };
    }
    Ok(v)
}

/// ∫_{rect ∩ clip} g dH^{N-1} on the hyperplane {x_axis = offset}; g is the
/// full integrand (weight times density).
pub(crate) fn integrate_surface_raw(
    part: &SurfacePart,
    g: &dyn Fn(&[f64]) -> f64,
    clip: &BoxND,
    opts: &QuadOpts,
) -> Result<f64> {
    if part.offset <= clip.lo[part.axis] || part.offset >= clip.hi[part.axis] {
        return Ok(0.0);
    }
    let n = part.rect.lo.len();
    let free: Vec<usize> = (0..n).filter(|&j| j != part.axis).collect();
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for &j in &free {
        let a = part.rect.lo[j].max(clip.lo[j]);
        let b = part.rect.hi[j].min(clip.hi[j]);
        if !(a < b) {
            return Ok(0.0);
        }
        lo.push(a);
        hi.push(b);
    }
    if free.is_empty() {
        let mut p = vec![0.0; n];
        p[part.axis] = part.offset;
        return Ok(g(&p));
    }
    let f = |q: &[f64]| {
        let mut p = vec![0.0; n];
        p[part.axis] = part.offset;
        for (i, &j) in free.iter().enumerate() {
            p[j] = q[i];
        }
        g(&p)
    };
    Ok(quad::integrate_nd(&f, &lo, &hi, opts)?.value)
}

/// ∫_{rect ∩ clip} g(x) density(x) dH^{N-1}.
pub(crate) fn integrate_surface(
    part: &SurfacePart,
    g: &dyn Fn(&[f64]) -> f64,
    clip: &BoxND,
    opts: &QuadOpts,
) -> Result<f64> {
    let f = |p: &[f64]| g(p) * part.density.eval(p);
    integrate_surface_raw(part, &f, clip, opts)
}

/// Catalog entries.
#[derive(Debug, Clone)]
pub enum FieldKind {
    /// A ≡ v, div A = 0.
    Constant { v: Vec<f64> },
    /// A = x / (N ω_N |x|^N), div A = δ₀.
    Radial,
    /// A = (χ_{x₁>0}, 0, …, 0), div A = H^{N-1} ⌞ {x₁ = 0}.
    Heaviside,
    /// A = (f(x_N), 0, …, 0), div A = 0.
    Transversal { profile: PiecewiseFunction1D },
    /// A = (-x₂, x₁)/|x|² in the plane, div A = 0; no closed-form traces.
    Vortex,
    /// A = (H¹ ⌞ J, 0, …, 0) with J the x₁-axis segment, div A = 0.
    Segment { half_length: f64 },
    /// A = (f(x₂) g(x₁), 0) in the plane, div A = f(x₂) g'(x₁) L².
    Staircase { f: PiecewiseFunction1D, g: PiecewiseFunction1D, depth: usize },
    /// A = (a₁, …, a_{N-1}, a_N L^N) with a_j unit H¹ lines through `anchor`,
    /// div A = a_N'(x_N) L^N.
    MeasureComponents { anchor: Vec<f64>, profile: PiecewiseFunction1D, half_length: f64 },
}

#[derive(Debug, Clone)]
pub struct FieldND {
    pub dim: usize,
    pub name: String,
    pub kind: FieldKind,
    pub essential_sup: Option<f64>,
    /// Natural bounded window on which catalog evaluations are exercised.
    pub domain: BoxND,
}

/// Closed-form 1D profiles accepted by catalog parameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProfileSpec {
    One,
    Poly { coeffs: Vec<f64> },
    Bump { center: f64, halfwidth: f64, amp: f64 },
}

impl ProfileSpec {
    pub fn build(&self, span: Interval1D) -> Result<PiecewiseFunction1D> {
        match self {
            ProfileSpec::One => Ok(PiecewiseFunction1D::constant(span, 1.0)),
            ProfileSpec::Poly { coeffs } => {
                Ok(PiecewiseFunction1D::poly(span, Poly::new(coeffs.clone())))
            }
            ProfileSpec::Bump { center, halfwidth, amp } => {
                let b = BumpND::new(vec![*center], vec![*halfwidth], *amp)?;
                b.axis_fn(0, span, false)
            }
        }
    }

    pub fn sup_abs(&self, span: Interval1D) -> f64 {
        match self {
            ProfileSpec::One => 1.0,
            ProfileSpec::Bump { amp, .. } => amp.abs(),
            ProfileSpec::Poly { coeffs } => {
                let p = Poly::new(coeffs.clone());
                let mut m = p.eval(span.lo).abs().max(p.eval(span.hi).abs());
                for r in p.derivative().roots_in(span.lo, span.hi) {
                    m = m.max(p.eval(r).abs());
                }
                m
            }
        }
    }
}

/// Parameters accepted by `catalog`.
#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
pub struct CatalogParams {
    pub dim: usize,
    #[serde(default)]
    pub v: Option<Vec<f64>>,
    #[serde(default)]
    pub f: Option<ProfileSpec>,
    #[serde(default)]
    pub g: Option<ProfileSpec>,
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(default)]
    pub anchor: Option<Vec<f64>>,
    #[serde(default)]
    pub half_length: Option<f64>,
}

impl CatalogParams {
    pub fn new(dim: usize) -> Self {
        CatalogParams { dim, ..Default::default() }
    }
}

const FIELD_SPAN: f64 = 32.0;

fn wide_span() -> Interval1D {
    Interval1D::new(-FIELD_SPAN, FIELD_SPAN).unwrap()
}

/// Construct a catalog field by name.
pub fn catalog(name: &str, params: &CatalogParams) -> Result<FieldND> {
    let dim = params.dim;
    if dim == 0 {
        return Err(Error::BadParams("dimension must be positive".into()));
    }
    let domain = BoxND::cube(dim, -FIELD_SPAN, FIELD_SPAN);
    match name {
        "constant" => {
            let v = params
                .v
                .clone()
                .ok_or_else(|| Error::BadParams("constant field needs v".into()))?;
            if v.len() != dim {
                return Err(Error::BadParams("v has wrong dimension".into()));
            }
            let sup = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            Ok(FieldND {
                dim,
                name: "constant".into(),
                kind: FieldKind::Constant { v },
                essential_sup: Some(sup),
                domain,
            })
        }
        "radial" => {
            if !(2..=3).contains(&dim) {
                return Err(Error::BadParams("radial field supported for N = 2, 3".into()));
            }
            Ok(FieldND {
                dim,
                name: "radial".into(),
                kind: FieldKind::Radial,
                essential_sup: None,
                domain,
            })
        }
        "heaviside" => Ok(FieldND {
            dim,
            name: "heaviside".into(),
            kind: FieldKind::Heaviside,
            essential_sup: Some(1.0),
            domain,
        }),
        "transversal" => {
            let spec = params
                .f
                .clone()
                .ok_or_else(|| Error::BadParams("transversal field needs f".into()))?;
            let profile = spec.build(wide_span())?;
            Ok(FieldND {
                dim,
                name: "transversal".into(),
                kind: FieldKind::Transversal { profile },
                essential_sup: Some(spec.sup_abs(wide_span())),
                domain,
            })
        }
        "vortex" => {
            if dim != 2 {
                return Err(Error::BadParams("vortex field lives in the plane".into()));
            }
            Ok(FieldND {
                dim,
                name: "vortex".into(),
                kind: FieldKind::Vortex,
                essential_sup: None,
                domain,
            })
        }
        "segment" => {
            if dim < 2 {
                return Err(Error::BadParams("segment field needs N >= 2".into()));
            }
            let half = params.half_length.unwrap_or(1.0);
            if !(half > 0.0) {
                return Err(Error::BadParams("half_length must be positive".into()));
            }
            Ok(FieldND {
                dim,
                name: "segment".into(),
                kind: FieldKind::Segment { half_length: half },
                essential_sup: None,
                domain,
            })
        }
        "staircase" => {
            if dim != 2 {
                return Err(Error::BadParams("staircase field implemented in the plane".into()));
            }
            let depth = params.depth.unwrap_or(5);
            if depth < 1 {
                return Err(Error::BadParams("depth must be >= 1".into()));
            }
            let f_spec = params.f.clone().unwrap_or(ProfileSpec::One);
            let g_spec = params.g.clone().ok_or_else(|| {
                Error::BadParams("staircase field needs g (C¹, compact support)".into())
            })?;
            let f = f_spec.build(wide_span())?;
            let g = g_spec.build(wide_span())?;
            let sup = f_spec.sup_abs(wide_span()) * g_spec.sup_abs(wide_span());
            Ok(FieldND {
                dim,
                name: "staircase".into(),
                kind: FieldKind::Staircase { f, g, depth },
                essential_sup: Some(sup),
                domain,
            })
        }
        "measure-components" => {
            if dim < 2 {
                return Err(Error::BadParams("measure-components field needs N >= 2".into()));
            }
            let anchor = params.anchor.clone().unwrap_or_else(|| vec![0.0; dim]);
            if anchor.len() != dim {
                return Err(Error::BadParams("anchor has wrong dimension".into()));
            }
            let spec = params
                .f
                .clone()
                .unwrap_or(ProfileSpec::Poly { coeffs: vec![0.0, 1.0] });
            let profile = spec.build(wide_span())?;
            let half = params.half_length.unwrap_or(FIELD_SPAN);
            Ok(FieldND {
                dim,
                name: "measure-components".into(),
                kind: FieldKind::MeasureComponents { anchor, profile, half_length: half },
                essential_sup: None,
                domain,
            })
        }
        other => Err(Error::UnknownEntry(other.into())),
    }
}

impl FieldND {
    /// The coefficient 1/(N ω_N) of the radial kernel.
    pub fn radial_coef(dim: usize) -> f64 {
        1.0 / (dim as f64 * unit_ball_volume(dim))
    }

    /// div A as an explicit measure.
    pub fn divergence(&self) -> Result<MeasureND> {
        let mut div = MeasureND::zero(self.dim);
        match &self.kind {
            FieldKind::Constant { .. }
            | FieldKind::Transversal { .. }
            | FieldKind::Vortex
            | FieldKind::Segment { .. } => {}
            FieldKind::Radial => {
                div.atoms.push((vec![0.0; self.dim], 1.0));
            }
            FieldKind::Heaviside => {
                let mut rect = self.domain.clone();
                rect.lo[0] = 0.0;
                rect.hi[0] = 0.0;
                div.surfaces.push(SurfacePart {
                    axis: 0,
                    offset: 0.0,
                    rect,
                    density: DensityND::Constant(1.0),
                });
            }
            FieldKind::Staircase { f, g, .. } => {
                let gp = differentiate_profile(g)?;
                div.volumes.push(VolumePart {
                    region: self.domain.clone(),
                    density: DensityND::Tensor {
                        coef: 1.0,
                        factors: vec![Some(gp), Some(f.clone())],
                    },
                });
            }
            FieldKind::MeasureComponents { profile, .. } => {
                let pp = differentiate_profile(profile)?;
                let mut factors: Vec<Option<PiecewiseFunction1D>> = vec![None; self.dim];
                factors[self.dim - 1] = Some(pp);
                div.volumes.push(VolumePart {
                    region: self.domain.clone(),
                    density: DensityND::Tensor { coef: 1.0, factors },
                });
            }
        }
        Ok(div)
    }

    /// The absolutely continuous component on `axis` as a tensor density;
    /// None when that component vanishes or is measure-valued.
    pub fn function_component(&self, axis: usize) -> Option<DensityND> {
        match &self.kind {
            FieldKind::Constant { v } => {
                if v[axis] != 0.0 {
                    Some(DensityND::Constant(v[axis]))
                } else {
                    None
                }
            }
            FieldKind::Radial => Some(DensityND::RadialComponent {
                axis,
                coef: Self::radial_coef(self.dim),
                dim: self.dim,
            }),
            FieldKind::Heaviside => {
                if axis == 0 {
                    let step =
                        PiecewiseFunction1D::indicator(wide_span(), 0.0, FIELD_SPAN).ok()?;
                    let mut factors: Vec<Option<PiecewiseFunction1D>> = vec![None; self.dim];
                    factors[0] = Some(step);
                    Some(DensityND::Tensor { coef: 1.0, factors })
                } else {
                    None
                }
            }
            FieldKind::Transversal { profile } => {
                if axis == 0 {
                    let mut factors: Vec<Option<PiecewiseFunction1D>> = vec![None; self.dim];
                    factors[self.dim - 1] = Some(profile.clone());
                    Some(DensityND::Tensor { coef: 1.0, factors })
                } else {
                    None
                }
            }
            FieldKind::Vortex => None,
            FieldKind::Segment { .. } => None,
            FieldKind::Staircase { f, g, .. } => {
                if axis == 0 {
                    Some(DensityND::Tensor {
                        coef: 1.0,
                        factors: vec![Some(g.clone()), Some(f.clone())],
                    })
                } else {
                    None
                }
            }
            FieldKind::MeasureComponents { profile, .. } => {
                if axis == self.dim - 1 {
                    let mut factors: Vec<Option<PiecewiseFunction1D>> = vec![None; self.dim];
                    factors[self.dim - 1] = Some(profile.clone());
                    Some(DensityND::Tensor { coef: 1.0, factors })
                } else {
                    None
                }
            }
        }
    }

    /// Measure-valued components of A (H¹ segments).
    pub fn segment_parts(&self) -> Vec<SegmentPart> {
        match &self.kind {
            FieldKind::Segment { half_length } => vec![SegmentPart {
                axis: 0,
                point: vec![0.0; self.dim],
                lo: -half_length,
                hi: *half_length,
                density: DensityND::Constant(1.0),
            }],
            FieldKind::MeasureComponents { anchor, half_length, .. } => (0..self.dim - 1)
                .map(|j| SegmentPart {
                    axis: j,
                    point: anchor.clone(),
                    lo: anchor[j] - half_length,
                    hi: anchor[j] + half_length,
                    density: DensityND::Constant(1.0),
                })
                .collect(),
            _ => vec![],
        }
    }

    /// Pointwise component value with a one-sided nudge along `side_axis`
    /// for discontinuous entries.
    pub fn component_value(&self, axis: usize, x: &[f64], side_axis: usize, side: f64) -> f64 {
        match &self.kind {
            FieldKind::Constant { v } => v[axis],
            FieldKind::Radial => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                if r2 == 0.0 {
                    0.0
                } else {
                    Self::radial_coef(self.dim) * x[axis] / r2.powf(self.dim as f64 / 2.0)
                }
            }
            FieldKind::Heaviside => {
                if axis != 0 {
                    return 0.0;
                }
                let mut v = x[0];
                if side_axis == 0 && v == 0.0 {
                    v = side;
                }
                if v > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            FieldKind::Transversal { profile } => {
                if axis == 0 {
                    profile.eval(x[self.dim - 1])
                } else {
                    0.0
                }
            }
            FieldKind::Vortex => {
                let r2 = x[0] * x[0] + x[1] * x[1];
                if r2 == 0.0 {
                    return 0.0;
                }
                match axis {
                    0 => -x[1] / r2,
                    1 => x[0] / r2,
                    _ => 0.0,
                }
            }
            FieldKind::Segment { .. } => 0.0,
            FieldKind::Staircase { f, g, .. } => {
                if axis == 0 {
                    f.eval(x[1]) * g.eval(x[0])
                } else {
                    0.0
                }
            }
            FieldKind::MeasureComponents { profile, .. } => {
                if axis == self.dim - 1 {
                    profile.eval(x[self.dim - 1])
                } else {
                    0.0
                }
            }
        }
    }

    pub fn has_closed_form_traces(&self) -> bool {
        !matches!(self.kind, FieldKind::Vortex)
    }
}

/// Derivative of a 1D profile, piece by piece.
pub fn differentiate_profile(p: &PiecewiseFunction1D) -> Result<PiecewiseFunction1D> {
    let knots = p.knots();
    let mut pieces = Vec::with_capacity(p.pieces.len());
    for (i, e) in p.pieces.iter().enumerate() {
        pieces.push(e.derivative_on(knots[i], knots[i + 1])?);
    }
    PiecewiseFunction1D::new(p.domain, p.breakpoints.clone(), pieces)
}

/// ∫ ∇φ · dA over the field's parts.
pub fn grad_dot_field(field: &FieldND, phi: &BumpND, opts: &QuadOpts) -> Result<f64> {
    let dim = field.dim;
    let support = phi.support();
    let mut total = 0.0;
    match &field.kind {
        FieldKind::Radial => {
            let coef = FieldND::radial_coef(dim);
            let region = field.domain.clip(&support).unwrap_or_else(|| support.clone());
            let g = |x: &[f64]| phi.grad(x);
            total += radial_dot_integral(dim, coef, &[region], &g, opts)?;
        }
        FieldKind::Vortex => {
            let region = field.domain.clip(&support).unwrap_or_else(|| support.clone());
            let f = |p: &[f64]| {
                let r2 = p[0] * p[0] + p[1] * p[1];
                if r2 < 1e-28 {
                    return 0.0;
                }
                let gr = phi.grad(p);
                (-p[1] * gr[0] + p[0] * gr[1]) / r2
            };
            total += quad::integrate_nd(&f, &region.lo, &region.hi, opts)?.value;
        }
        _ => {
            for axis in 0..dim {
                if let Some(density) = field.function_component(axis) {
                    let region =
                        field.domain.clip(&support).unwrap_or_else(|| support.clone());
                    total += match &density {
                        DensityND::Tensor { coef, factors } => {
                            tensor_box_integral(*coef, factors, Some(axis), phi, &region, opts)?
                        }
                        DensityND::Constant(c) => {
                            let factors = vec![None; dim];
                            tensor_box_integral(*c, &factors, Some(axis), phi, &region, opts)?
                        }
                        d => {
                            let f = |p: &[f64]| phi.grad(p)[axis] * d.eval(p);
                            quad::integrate_nd(&f, &region.lo, &region.hi, opts)?.value
                        }
                    };
                }
            }
            for seg in field.segment_parts() {
                let lo = seg.lo.max(support.lo[seg.axis]);
                let hi = seg.hi.min(support.hi[seg.axis]);
                if lo < hi {
                    let f = |t: f64| {
                        let p = seg.point_at(t);
                        phi.grad(&p)[seg.axis] * seg.density.eval(&p)
                    };
                    total += quad::integrate(&f, lo, hi, opts)?.value;
                }
            }
        }
    }
    Ok(total)
}

/// Weak-divergence self-test: |∫φ d(div A) + ∫∇φ·dA|.
pub fn divergence_selftest(field: &FieldND, phi: &BumpND, opts: &QuadOpts) -> Result<f64> {
    let div = field.divergence()?;
    let t1 = div.integrate_bump(phi, opts)?;
    let t2 = grad_dot_field(field, phi, opts)?;
    Ok((t1 + t2).abs())
}

/// ∫_boxes coef (x·V(x))/|x|^N dx for a vector integrand V smooth away from
/// the origin. Boxes whose closure meets the origin are split so the origin
/// is a corner; the corner cube integrates in polar/spherical coordinates
/// with an exclusion radius ε removed and the limit ε → 0 recovered by
/// Richardson extrapolation over {ε, ε/2, ε/4}.
pub fn radial_dot_integral(
    dim: usize,
    coef: f64,
    boxes: &[BoxND],
    v: &dyn Fn(&[f64]) -> Vec<f64>,
    opts: &QuadOpts,
) -> Result<f64> {
    let w = |x: &[f64]| {
        let r2: f64 = x.iter().map(|t| t * t).sum();
        if r2 == 0.0 {
            return 0.0;
        }
        let vv = v(x);
        let dot: f64 = x.iter().zip(&vv).map(|(a, b)| a * b).sum();
        coef * dot / r2.powf(dim as f64 / 2.0)
    };
    let mut total = 0.0;
    for b in boxes {
        let mut pieces = vec![b.clone()];
        for j in 0..dim {
            let mut next = Vec::new();
            for p in pieces {
                if p.lo[j] < 0.0 && 0.0 < p.hi[j] {
                    let mut left = p.clone();
                    left.hi[j] = 0.0;
                    let mut right = p;
                    right.lo[j] = 0.0;
                    next.push(left);
                    next.push(right);
                } else {
                    next.push(p);
                }
            }
            pieces = next;
        }
        for p in pieces {
            let touches_origin = (0..dim).all(|j| p.lo[j] == 0.0 || p.hi[j] == 0.0);
            if !touches_origin {
                total += quad::integrate_nd(&w, &p.lo, &p.hi, opts)?.value;
                continue;
            }
            let signs: Vec<f64> = (0..dim)
                .map(|j| if p.hi[j] == 0.0 { -1.0 } else { 1.0 })
                .collect();
            let extents: Vec<f64> = (0..dim)
                .map(|j| if signs[j] > 0.0 { p.hi[j] } else { -p.lo[j] })
                .collect();
            let rho = extents.iter().cloned().fold(f64::INFINITY, f64::min);
            let eps0 = 1e-4 * rho;
            let mut vals = [0.0; 3];
            for (k, item) in vals.iter_mut().enumerate() {
                let eps = eps0 / 2f64.powi(k as i32);
                *item = corner_cube_polar(dim, coef, &signs, rho, eps, v, opts)?;
            }
            // eliminate the c₁ε + c₂ε² tail
            total += (vals[0] - 6.0 * vals[1] + 8.0 * vals[2]) / 3.0;
            let cube = BoxND {
                lo: (0..dim).map(|j| if signs[j] > 0.0 { 0.0 } else { -rho }).collect(),
                hi: (0..dim).map(|j| if signs[j] > 0.0 { rho } else { 0.0 }).collect(),
            };
            for rem in box_difference(&p, &cube) {
                total += quad::integrate_nd(&w, &rem.lo, &rem.hi, opts)?.value;
            }
        }
    }
    Ok(total)
}

/// Difference a ∖ b as disjoint boxes, assuming b ⊆ a where they overlap.
fn box_difference(a: &BoxND, b: &BoxND) -> Vec<BoxND> {
    let mut out = Vec::new();
    let mut core = a.clone();
    for j in 0..a.dim() {
        if core.lo[j] < b.lo[j] {
            let mut piece = core.clone();
            piece.hi[j] = b.lo[j];
            if piece.lo[j] < piece.hi[j] {
                out.push(piece);
            }
            core.lo[j] = b.lo[j];
        }
        if core.hi[j] > b.hi[j] {
            let mut piece = core.clone();
            piece.lo[j] = b.hi[j];
            if piece.lo[j] < piece.hi[j] {
                out.push(piece);
            }
            core.hi[j] = b.hi[j];
        }
    }
    out
}

/// Corner-cube piece in polar/spherical coordinates: the radial kernel
/// reduces to coef ∫ dΩ ∫_ε^{rmax} x̂·V(r x̂) dr.
fn corner_cube_polar(
    dim: usize,
    coef: f64,
    signs: &[f64],
    rho: f64,
    eps: f64,
    v: &dyn Fn(&[f64]) -> Vec<f64>,
    opts: &QuadOpts,
) -> Result<f64> {
    let radial_part = |dir: &[f64]| -> f64 {
        let mut rmax = f64::INFINITY;
        for j in 0..dim {
            if dir[j].abs() > 1e-300 {
                rmax = rmax.min(rho / dir[j].abs());
            }
        }
        let f = |r: f64| {
            let x: Vec<f64> = dir.iter().map(|&d| r * d).collect();
            let vv = v(&x);
            let dot: f64 = dir.iter().zip(&vv).map(|(a, b)| a * b).sum();
            coef * dot
        };
        match quad::integrate(&f, eps, rmax, opts) {
            Ok(q) => q.value,
            Err(_) => f64::NAN,
        }
    };
    let checked = |value: f64, evals: usize| -> Result<f64> {
        if value.is_nan() {
            Err(Error::QuadratureFailure { tol: opts.abs_tol, err: f64::INFINITY, evals })
        } else {
            Ok(value)
        }
    };
    match dim {
        2 => {
            let (t0, t1) = quadrant_angles(signs[0], signs[1]);
            let g = |theta: f64| radial_part(&[theta.cos(), theta.sin()]);
            let q = quad::integrate(&g, t0, t1, opts)?;
            checked(q.value, q.evals)
        }
        3 => {
            let (p0, p1) = quadrant_angles(signs[0], signs[1]);
            let (t0, t1) = if signs[2] > 0.0 {
                (0.0, std::f64::consts::FRAC_PI_2)
            } else {
                (std::f64::consts::FRAC_PI_2, std::f64::consts::PI)
            };
            let g = |q: &[f64]| {
                let (theta, phi_a) = (q[0], q[1]);
                let dir = [
                    theta.sin() * phi_a.cos(),
                    theta.sin() * phi_a.sin(),
                    theta.cos(),
                ];
                radial_part(&dir) * theta.sin()
            };
            let q = quad::integrate_nd(&g, &[t0, p0], &[t1, p1], opts)?;
            checked(q.value, q.evals)
        }
        _ => Err(Error::BadParams("radial corner integration needs N = 2 or 3".into())),
    }
}

fn quadrant_angles(sx: f64, sy: f64) -> (f64, f64) {
    use std::f64::consts::{FRAC_PI_2, PI};
    match (sx > 0.0, sy > 0.0) {
        (true, true) => (0.0, FRAC_PI_2),
        (false, true) => (FRAC_PI_2, PI),
        (false, false) => (PI, 1.5 * PI),
        (true, false) => (1.5 * PI, 2.0 * PI),
    }
}

/// ∫_{(0,1)^n} (1 + |y|²)^{-(n+1)/2} dy with its closed-form target
/// ω_{n+1}/2^{n+1}; returns (value, target, residual).
pub fn identity_integral(n: usize, opts: &QuadOpts) -> Result<(f64, f64, f64)> {
    if !(1..=4).contains(&n) {
        return Err(Error::BadParams("identity integral supported for 1 <= n <= 4".into()));
    }
    let f = |p: &[f64]| {
        let r2: f64 = p.iter().map(|v| v * v).sum();
        (1.0 + r2).powf(-((n as f64 + 1.0) / 2.0))
    };
    let lo = vec![0.0; n];
    let hi = vec![1.0; n];
    let value = quad::integrate_nd(&f, &lo, &hi, opts)?.value;
    let target = unit_ball_volume(n + 1) / 2f64.powi(n as i32 + 1);
    Ok((value, target, (value - target).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-15);
        assert!((unit_ball_volume(4) - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn dimension_constant_plane() {
        // c₂ = 2 (4/3)^{1/2} ω₂/ω₁ = π √(4/3)
        let c2 = dimension_constant(2);
        let expect = std::f64::consts::PI * (4.0f64 / 3.0).sqrt();
        assert!((c2 - expect).abs() < 1e-14);
        assert!((c2 - 3.6276).abs() < 1e-4);
    }

    #[test]
    fn bump_axis_fn_matches_pointwise() {
        let b = BumpND::new(vec![0.2, -0.1], vec![0.5, 0.7], 2.0).unwrap();
        let span = Interval1D::new(-2.0, 2.0).unwrap();
        let f0 = b.axis_fn(0, span, false).unwrap();
        let f1 = b.axis_fn(1, span, false).unwrap();
        for x in [-0.2, 0.0, 0.3, 0.69] {
            let v = b.eval(&[x, 0.1]);
            let w = f0.eval(x) * f1.eval(0.1);
            assert!((v - w).abs() < 1e-13, "x={x}: {v} vs {w}");
        }
        let d0 = b.axis_fn(0, span, true).unwrap();
        for x in [-0.1, 0.25] {
            let g = b.grad(&[x, 0.1]);
            assert!((g[0] - d0.eval(x) * f1.eval(0.1)).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_field_selftest_exact() {
        let f = catalog(
            "constant",
            &CatalogParams { v: Some(vec![1.0, -2.0]), ..CatalogParams::new(2) },
        )
        .unwrap();
        let phi = BumpND::new(vec![0.3, 0.1], vec![0.8, 0.6], 1.0).unwrap();
        let r = divergence_selftest(&f, &phi, &QuadOpts::default()).unwrap();
        assert!(r < 1e-12, "residual {r}");
    }

    #[test]
    fn heaviside_selftest() {
        let f = catalog("heaviside", &CatalogParams::new(2)).unwrap();
        let phi = BumpND::new(vec![0.1, -0.2], vec![0.9, 0.7], 1.3).unwrap();
        let r = divergence_selftest(&f, &phi, &QuadOpts::default()).unwrap();
        assert!(r < 1e-10, "residual {r}");
    }

    #[test]
    fn radial_selftest_plane() {
        let f = catalog("radial", &CatalogParams::new(2)).unwrap();
        let phi = BumpND::new(vec![0.0, 0.0], vec![0.5, 0.5], 1.0).unwrap();
        let r = divergence_selftest(&f, &phi, &QuadOpts::with_tol(1e-11, 1e-13)).unwrap();
        assert!(r < 1e-8, "residual {r}");
    }

    #[test]
    fn identity_integral_line() {
        let (v, t, r) = identity_integral(1, &QuadOpts::default()).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert!((t - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!(r < 1e-10);
    }
}

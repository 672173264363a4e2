//! Exact arithmetic of signed Radon measures on a bounded open interval:
//! finitely many atoms plus a piecewise closed-form density.
//!
//! Singular-continuous parts (Cantor-type measures) are not representable;
//! every measure here splits into atoms and an absolutely continuous part.

use crate::error::{Error, Result};
use crate::func1d::{Interval1D, PiecewiseFunction1D};
use crate::piece::Expr;
use crate::quad::{self, QuadOpts};

/// Density carrier: an analytic expression on an open sub-interval.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DensitySegment {
    pub lo: f64,
    pub hi: f64,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Measure1D {
    pub domain: Interval1D,
    /// (location, weight), sorted by location, locations distinct.
    pub atoms: Vec<(f64, f64)>,
    /// Disjoint, sorted density segments.
    pub segments: Vec<DensitySegment>,
}

impl Measure1D {
    pub fn new(
        domain: Interval1D,
        mut atoms: Vec<(f64, f64)>,
        mut segments: Vec<DensitySegment>,
    ) -> Result<Self> {
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in atoms.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Invalid(format!("duplicate atom at {}", w[0].0)));
            }
        }
        for &(x, w) in &atoms {
            if !domain.contains(x) || !w.is_finite() {
                return Err(Error::Invalid(format!("bad atom ({x}, {w})")));
            }
        }
        segments.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
        for s in &segments {
            if !(s.lo < s.hi) || s.lo < domain.lo || s.hi > domain.hi {
                return Err(Error::Invalid(format!("bad segment ({}, {})", s.lo, s.hi)));
            }
            if !s.expr.integrable_on(s.lo, s.hi) {
                return Err(Error::NonIntegrablePiece {
                    lo: s.lo,
                    hi: s.hi,
                    what: format!("{:?}", s.expr),
                });
            }
        }
        for w in segments.windows(2) {
            if w[0].hi > w[1].lo {
                return Err(Error::Invalid("overlapping density segments".into()));
            }
        }
        segments.retain(|s| !s.expr.is_zero());
        atoms.retain(|&(_, w)| w != 0.0);
        Ok(Measure1D { domain, atoms, segments })
    }

    pub fn zero(domain: Interval1D) -> Self {
        Measure1D { domain, atoms: vec![], segments: vec![] }
    }

    pub fn dirac(domain: Interval1D, x: f64, w: f64) -> Result<Self> {
        Measure1D::new(domain, vec![(x, w)], vec![])
    }

    /// Lebesgue measure restricted to (a, b).
    pub fn lebesgue(domain: Interval1D, a: f64, b: f64) -> Result<Self> {
        let lo = a.max(domain.lo);
        let hi = b.min(domain.hi);
        if lo >= hi {
            return Ok(Measure1D::zero(domain));
        }
        Measure1D::new(
            domain,
            vec![],
            vec![DensitySegment { lo, hi, expr: Expr::constant(1.0) }],
        )
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.segments.is_empty()
    }

    pub fn scale(&self, s: f64) -> Self {
        if s == 0.0 {
            return Measure1D::zero(self.domain);
        }
        Measure1D {
            domain: self.domain,
            atoms: self.atoms.iter().map(|&(x, w)| (x, s * w)).collect(),
            segments: self
                .segments
                .iter()
                .map(|seg| DensitySegment { lo: seg.lo, hi: seg.hi, expr: seg.expr.scale(s) })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.domain != other.domain {
            return Err(Error::Invalid("domain mismatch".into()));
        }
        let mut atoms = self.atoms.clone();
        for &(x, w) in &other.atoms {
            match atoms.iter_mut().find(|(y, _)| *y == x) {
                Some((_, acc)) => *acc += w,
                None => atoms.push((x, w)),
            }
        }
        atoms.retain(|&(_, w)| w != 0.0);
        // refine segments over the union of all cut points
        let mut cuts: Vec<f64> = Vec::new();
        for seg in self.segments.iter().chain(other.segments.iter()) {
            cuts.push(seg.lo);
            cuts.push(seg.hi);
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        let mut segments = Vec::new();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mid = 0.5 * (lo + hi);
            let mut expr = Expr::zero();
            for seg in self.segments.iter().chain(other.segments.iter()) {
                if seg.lo < mid && mid < seg.hi {
                    expr = expr.add(&seg.expr);
                }
            }
            if !expr.is_zero() {
                segments.push(DensitySegment { lo, hi, expr });
            }
        }
        Measure1D::new(self.domain, atoms, segments)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// |mu|(domain): sum of |atom weights| plus integrals of |density|.
    pub fn total_variation(&self) -> Result<f64> {
        let mut tv: f64 = self.atoms.iter().map(|&(_, w)| w.abs()).sum();
        for seg in &self.segments {
            tv += seg.expr.abs_integral(seg.lo, seg.hi)?;
        }
        Ok(tv)
    }

    /// mu(domain): signed total mass.
    pub fn total(&self) -> f64 {
        let mut t: f64 = self.atoms.iter().map(|&(_, w)| w).sum();
        for seg in &self.segments {
            t += seg
                .expr
                .exact_integral(seg.lo, seg.hi)
                .expect("validated integrable");
        }
        t
    }

    /// mu(B) for a representable Borel set.
    pub fn eval_on(&self, set: &BorelSet1D) -> f64 {
        let mut t = 0.0;
        for &(x, w) in &self.atoms {
            if set.contains(x) {
                t += w;
            }
        }
        for seg in &self.segments {
            for &(a, b) in &set.intervals {
                let lo = seg.lo.max(a);
                let hi = seg.hi.min(b);
                if lo < hi {
                    t += seg.expr.exact_integral(lo, hi).expect("validated integrable");
                }
            }
        }
        t
    }

    /// Restriction mu ⌞ B.
    pub fn restrict(&self, set: &BorelSet1D) -> Self {
        let atoms = self
            .atoms
            .iter()
            .filter(|&&(x, _)| set.contains(x))
            .cloned()
            .collect();
        let mut segments = Vec::new();
        for seg in &self.segments {
            for &(a, b) in &set.intervals {
                let lo = seg.lo.max(a);
                let hi = seg.hi.min(b);
                if lo < hi {
                    segments.push(DensitySegment { lo, hi, expr: seg.expr.clone() });
                }
            }
        }
        segments.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
        Measure1D { domain: self.domain, atoms, segments }
    }

    /// Lebesgue decomposition (absolutely continuous part, singular part).
    pub fn lebesgue_decompose(&self) -> (Self, Self) {
        (
            Measure1D { domain: self.domain, atoms: vec![], segments: self.segments.clone() },
            Measure1D { domain: self.domain, atoms: self.atoms.clone(), segments: vec![] },
        )
    }

    /// Closed support intersected with the (open) domain.
    pub fn support(&self) -> BorelSet1D {
        let mut intervals = Vec::new();
        let mut points: Vec<f64> = self.atoms.iter().map(|&(x, _)| x).collect();
        for seg in &self.segments {
            intervals.push((seg.lo, seg.hi));
            // closure endpoints that stay inside the open domain
            if self.domain.contains(seg.lo) {
                points.push(seg.lo);
            }
            if self.domain.contains(seg.hi) {
                points.push(seg.hi);
            }
        }
        BorelSet1D::new(intervals, points)
    }

    /// ∫ f dmu with f evaluated pointwise at atoms (point value required at a
    /// genuine jump) and in closed form against the density when possible.
    pub fn integrate(&self, f: &PiecewiseFunction1D, opts: &QuadOpts) -> Result<f64> {
        let mut total = 0.0;
        for &(x, w) in &self.atoms {
            let v = match f.point_values.iter().find(|&&(p, _)| p == x) {
                Some(&(_, v)) => v,
                None => {
                    let (l, r) = f.one_sided_limits(x)?;
                    if l == r {
                        l.value().ok_or(Error::UndefinedAtAtom { at: x })?
                    } else {
                        return Err(Error::UndefinedAtAtom { at: x });
                    }
                }
            };
            total += v * w;
        }
        total += self.integrate_density(&|x| f.eval(x), Some(f), opts)?;
        Ok(total)
    }

    /// ∫ g * density dx, exact when `shape` pieces multiply in closed form.
    pub(crate) fn integrate_density(
        &self,
        g: &dyn Fn(f64) -> f64,
        shape: Option<&PiecewiseFunction1D>,
        opts: &QuadOpts,
    ) -> Result<f64> {
        let mut total = 0.0;
        for seg in &self.segments {
            match shape {
                Some(f) => {
                    // refine over f's knots inside the segment
                    let mut cuts = vec![seg.lo];
                    for &b in &f.breakpoints {
                        if b > seg.lo && b < seg.hi {
                            cuts.push(b);
                        }
                    }
                    cuts.push(seg.hi);
                    for w in cuts.windows(2) {
                        let (lo, hi) = (w[0], w[1]);
                        let mid = 0.5 * (lo + hi);
                        let idx = f.piece_containing(mid).ok_or_else(|| {
                            Error::Invalid("density segment outside function domain".into())
                        })?;
                        let fe = &f.pieces[idx];
                        match fe.mul_expr(&seg.expr) {
                            Some(prod) => match prod.exact_integral(lo, hi) {
                                Some(v) => total += v,
                                None => {
                                    return Err(Error::NotIntegrable(format!(
                                        "f * density diverges on ({lo}, {hi})"
                                    )))
                                }
                            },
                            None => {
                                let h = |x: f64| fe.eval(x) * seg.expr.eval(x);
                                total += quad::integrate(&h, lo, hi, opts)?.value;
                            }
                        }
                    }
                }
                None => {
                    let h = |x: f64| g(x) * seg.expr.eval(x);
                    total += quad::integrate(&h, seg.lo, seg.hi, opts)?.value;
                }
            }
        }
        Ok(total)
    }
}

/// Finite union of open intervals and points, normalized so that components
/// are pairwise disjoint: overlapping intervals merge, intervals touching at
/// a listed point merge through it, and interior points are absorbed.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BorelSet1D {
    pub intervals: Vec<(f64, f64)>,
    pub points: Vec<f64>,
}

impl BorelSet1D {
    pub fn new(mut intervals: Vec<(f64, f64)>, mut points: Vec<f64>) -> Self {
        intervals.retain(|&(a, b)| a < b);
        intervals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.dedup();
        // merge overlapping intervals, and touching ones glued by a point
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in intervals {
            match merged.last_mut() {
                Some((_, hi)) if a < *hi || (a == *hi && points.contains(&a)) => {
                    if b > *hi {
                        *hi = b;
                    }
                }
                _ => merged.push((a, b)),
            }
        }
        let interior = |x: f64| merged.iter().any(|&(a, b)| a < x && x < b);
        points.retain(|&x| !interior(x));
        BorelSet1D { intervals: merged, points }
    }

    pub fn empty() -> Self {
        BorelSet1D { intervals: vec![], points: vec![] }
    }

    pub fn point(x: f64) -> Self {
        BorelSet1D { intervals: vec![], points: vec![x] }
    }

    pub fn interval(a: f64, b: f64) -> Self {
        BorelSet1D::new(vec![(a, b)], vec![])
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.points.contains(&x) || self.intervals.iter().any(|&(a, b)| a < x && x < b)
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut intervals = self.intervals.clone();
        intervals.extend(other.intervals.iter().cloned());
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        BorelSet1D::new(intervals, points)
    }

    /// Lebesgue measure of the set.
    pub fn lebesgue_measure(&self) -> f64 {
        self.intervals.iter().map(|&(a, b)| b - a).sum()
    }
}

/// Free-function forms of the spec operations.
pub fn total_variation(mu: &Measure1D) -> Result<f64> {
    mu.total_variation()
}

pub fn restrict(mu: &Measure1D, set: &BorelSet1D) -> Measure1D {
    mu.restrict(set)
}

pub fn lebesgue_decompose(mu: &Measure1D) -> (Measure1D, Measure1D) {
    mu.lebesgue_decompose()
}

pub fn integrate(f: &PiecewiseFunction1D, mu: &Measure1D) -> Result<f64> {
    mu.integrate(f, &QuadOpts::default())
}

pub fn support(mu: &Measure1D) -> BorelSet1D {
    mu.support()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn dom() -> Interval1D {
        Interval1D::new(-1.0, 1.0).unwrap()
    }

    #[test]
    fn tv_of_atoms() {
        let mu = Measure1D::new(dom(), vec![(0.0, 2.0), (0.5, -3.0)], vec![]).unwrap();
        assert_eq!(mu.total_variation().unwrap(), 5.0);
    }

    #[test]
    fn tv_of_linear_density() {
        let seg = DensitySegment { lo: 0.0, hi: 1.0, expr: Expr::poly(Poly::x()) };
        let mu = Measure1D::new(Interval1D::new(0.0, 1.0).unwrap(), vec![], vec![seg]).unwrap();
        assert!((mu.total_variation().unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tv_mixed() {
        // delta_0 - (1/2) L^1 on (0,1): |mu| = 1 + 1/2
        let seg = DensitySegment { lo: 0.0, hi: 1.0, expr: Expr::constant(-0.5) };
        let mu = Measure1D::new(dom(), vec![(0.0, 1.0)], vec![seg]).unwrap();
        assert!((mu.total_variation().unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn restriction_cases() {
        let dom01 = Interval1D::new(0.0, 1.0).unwrap();
        let mu = Measure1D::lebesgue(dom01, 0.0, 1.0).unwrap();
        let r = mu.restrict(&BorelSet1D::interval(0.0, 0.5));
        assert!((r.total() - 0.5).abs() < 1e-15);

        let d = Measure1D::dirac(dom(), 0.0, 1.0).unwrap();
        assert_eq!(d.restrict(&BorelSet1D::point(0.0)).atoms.len(), 1);
        assert!(d.restrict(&BorelSet1D::interval(0.0, 1.0)).is_zero());
    }

    #[test]
    fn decompose_splits_parts() {
        let seg = DensitySegment { lo: 0.0, hi: 1.0, expr: Expr::constant(1.0) };
        let mu = Measure1D::new(dom(), vec![(0.0, 1.0)], vec![seg]).unwrap();
        let (ac, sing) = mu.lebesgue_decompose();
        assert!(ac.atoms.is_empty() && !ac.segments.is_empty());
        assert!(sing.segments.is_empty() && sing.atoms.len() == 1);
        let back = ac.add(&sing).unwrap();
        assert_eq!(back.atoms, mu.atoms);
        // singular support is a finite point set
        assert_eq!(sing.support().lebesgue_measure(), 0.0);
    }

    #[test]
    fn support_examples() {
        let d = Measure1D::dirac(dom(), 0.0, 1.0).unwrap();
        let s = d.support();
        assert!(s.intervals.is_empty());
        assert_eq!(s.points, vec![0.0]);

        let mu = Measure1D::lebesgue(dom(), 0.0, 1.0).unwrap();
        let s = mu.support();
        assert_eq!(s.intervals, vec![(0.0, 1.0)]);
        assert_eq!(s.points, vec![0.0]); // 1.0 is the domain edge, excluded

        assert!(Measure1D::zero(dom()).support().is_empty());
    }

    #[test]
    fn integrate_atom_and_density() {
        // f = x^2 against delta_{1/2}
        let f = PiecewiseFunction1D::poly(dom(), Poly::new(vec![0.0, 0.0, 1.0]));
        let mu = Measure1D::dirac(dom(), 0.5, 1.0).unwrap();
        assert!((integrate(&f, &mu).unwrap() - 0.25).abs() < 1e-15);

        // f = x against density 1 on (0,1)
        let f = PiecewiseFunction1D::poly(Interval1D::new(0.0, 1.0).unwrap(), Poly::x());
        let mu = Measure1D::lebesgue(Interval1D::new(0.0, 1.0).unwrap(), 0.0, 1.0).unwrap();
        assert!((integrate(&f, &mu).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn integrate_rejects_jump_without_point_value() {
        let f = PiecewiseFunction1D::indicator(dom(), 0.0, 1.0).unwrap();
        let mu = Measure1D::dirac(dom(), 0.0, 1.0).unwrap();
        assert!(matches!(
            integrate(&f, &mu),
            Err(Error::UndefinedAtAtom { .. })
        ));
        let f = f.with_point_value(0.0, 0.25);
        assert!((integrate(&f, &mu).unwrap() - 0.25).abs() < 1e-15);
    }
}

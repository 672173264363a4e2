//! Scalar functions on an open interval, given by breakpoints and analytic
//! pieces, with extended-real one-sided limits at every breakpoint.

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::piece::{Expr, Kernel, Term};
use crate::poly::Poly;
use crate::quad::{self, QuadOpts};

/// A bounded open interval (lo, hi).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Interval1D {
    pub lo: f64,
    pub hi: f64,
}

impl Interval1D {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Invalid(format!("bad interval ({lo}, {hi})")));
        }
        Ok(Interval1D { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PiecewiseFunction1D {
    pub domain: Interval1D,
    /// Strictly increasing interior breakpoints.
    pub breakpoints: Vec<f64>,
    /// `breakpoints.len() + 1` pieces; piece i lives on the i-th open gap.
    pub pieces: Vec<Expr>,
    /// Optional point values at breakpoints, for functions with genuine jumps.
    pub point_values: Vec<(f64, f64)>,
}

impl PiecewiseFunction1D {
    pub fn new(domain: Interval1D, breakpoints: Vec<f64>, pieces: Vec<Expr>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::Invalid("piece/breakpoint count mismatch".into()));
        }
        for w in breakpoints.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Invalid("breakpoints not strictly increasing".into()));
            }
        }
        if let (Some(&first), Some(&last)) = (breakpoints.first(), breakpoints.last()) {
            if first <= domain.lo || last >= domain.hi {
                return Err(Error::Invalid("breakpoints outside domain".into()));
            }
        }
        let f = PiecewiseFunction1D { domain, breakpoints, pieces, point_values: vec![] };
        for i in 0..f.pieces.len() {
            let (a, b) = f.piece_interval(i);
            for t in &f.pieces[i].terms {
                if let Some(c) = t.kernel.as_ref().and_then(|k| k.singular_center()) {
                    if c > a && c < b {
                        return Err(Error::Invalid(format!(
                            "kernel singularity at {c} interior to piece ({a}, {b})"
                        )));
                    }
                }
            }
        }
        Ok(f)
    }

    pub fn with_point_value(mut self, x: f64, v: f64) -> Self {
        self.point_values.retain(|&(p, _)| p != x);
        self.point_values.push((x, v));
        self
    }

    pub fn constant(domain: Interval1D, c: f64) -> Self {
        PiecewiseFunction1D {
            domain,
            breakpoints: vec![],
            pieces: vec![Expr::constant(c)],
            point_values: vec![],
        }
    }

    /// Indicator of (a, b) inside the domain.
    pub fn indicator(domain: Interval1D, a: f64, b: f64) -> Result<Self> {
        let mut bps = vec![];
        for v in [a, b] {
            if domain.contains(v) {
                bps.push(v);
            }
        }
        bps.dedup();
        let mut pieces = Vec::with_capacity(bps.len() + 1);
        let knots = knots_of(&domain, &bps);
        for w in knots.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            pieces.push(if mid > a && mid < b { Expr::constant(1.0) } else { Expr::zero() });
        }
        PiecewiseFunction1D::new(domain, bps, pieces)
    }

    pub fn knots(&self) -> Vec<f64> {
        knots_of(&self.domain, &self.breakpoints)
    }

    pub fn piece_interval(&self, i: usize) -> (f64, f64) {
        let knots = self.knots();
        (knots[i], knots[i + 1])
    }

    /// Index of the piece whose open interval contains x.
    pub fn piece_containing(&self, x: f64) -> Option<usize> {
        if !self.domain.contains(x) {
            return None;
        }
        match self.breakpoints.binary_search_by(|b| b.partial_cmp(&x).unwrap()) {
            Ok(_) => None, // it is a breakpoint
            Err(i) => Some(i),
        }
    }

    /// Value at x for a.e. purposes: piece value inside a piece; at a
    /// breakpoint the stored point value, else the common two-sided limit.
    pub fn eval(&self, x: f64) -> f64 {
        if let Some(i) = self.piece_containing(x) {
            return self.pieces[i].eval(x);
        }
        if let Some(&(_, v)) = self.point_values.iter().find(|&&(p, _)| p == x) {
            return v;
        }
        match self.one_sided_limits(x) {
            Ok((lo, hi)) if lo == hi => lo.value().unwrap_or(f64::NAN),
            _ => f64::NAN,
        }
    }

    /// (left limit, right limit) at an interior point.
    pub fn one_sided_limits(&self, x: f64) -> Result<(ExtReal, ExtReal)> {
        if !self.domain.contains(x) {
            return Err(Error::Invalid(format!("{x} outside domain")));
        }
        let knots = self.knots();
        match self.breakpoints.binary_search_by(|b| b.partial_cmp(&x).unwrap()) {
            Ok(j) => {
                let left = self.pieces[j].limit_at(x, knots[j], knots[j + 1])?;
                let right = self.pieces[j + 1].limit_at(x, knots[j + 1], knots[j + 2])?;
                Ok((left, right))
            }
            Err(i) => {
                let v = self.pieces[i].limit_at(x, knots[i], knots[i + 1])?;
                Ok((v, v))
            }
        }
    }

    /// True when the first and last pieces vanish identically, so that the
    /// support is compactly contained in the domain.
    pub fn has_compact_support(&self) -> bool {
        !self.pieces.is_empty()
            && self.pieces.first().unwrap().is_zero()
            && self.pieces.last().unwrap().is_zero()
    }

    pub fn scale(&self, s: f64) -> Self {
        PiecewiseFunction1D {
            domain: self.domain,
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|e| e.scale(s)).collect(),
            point_values: self.point_values.iter().map(|&(x, v)| (x, s * v)).collect(),
        }
    }

    /// Refine both functions onto the union of their breakpoints.
    pub fn common_refinement(&self, other: &Self) -> Result<(Vec<f64>, Vec<(Expr, Expr)>)> {
        if self.domain != other.domain {
            return Err(Error::Invalid("domain mismatch".into()));
        }
        let mut bps: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .cloned()
            .collect();
        bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        bps.dedup();
        let knots = knots_of(&self.domain, &bps);
        let mut pairs = Vec::with_capacity(knots.len() - 1);
        for w in knots.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let i = self.piece_containing(mid).expect("refinement midpoint");
            let j = other.piece_containing(mid).expect("refinement midpoint");
            pairs.push((self.pieces[i].clone(), other.pieces[j].clone()));
        }
        Ok((bps, pairs))
    }

    /// Pointwise product; fails when two transcendental kernels collide.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (bps, pairs) = self.common_refinement(other)?;
        let mut pieces = Vec::with_capacity(pairs.len());
        for (f, g) in &pairs {
            match f.mul_expr(g) {
                Some(e) => pieces.push(e),
                None => {
                    return Err(Error::NoClosedForm(
                        "product of two transcendental pieces".into(),
                    ))
                }
            }
        }
        PiecewiseFunction1D::new(self.domain, bps, pieces)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (bps, pairs) = self.common_refinement(other)?;
        let pieces = pairs.iter().map(|(f, g)| f.add(g)).collect();
        PiecewiseFunction1D::new(self.domain, bps, pieces)
    }

    /// Restriction to a sub-interval of the domain.
    pub fn restricted(&self, span: Interval1D) -> Result<Self> {
        if span.lo < self.domain.lo || span.hi > self.domain.hi {
            return Err(Error::Invalid(format!(
                "({}, {}) is not inside the domain",
                span.lo, span.hi
            )));
        }
        let bps: Vec<f64> = self
            .breakpoints
            .iter()
            .cloned()
            .filter(|&b| b > span.lo && b < span.hi)
            .collect();
        let knots = knots_of(&span, &bps);
        let mut pieces = Vec::with_capacity(knots.len() - 1);
        for w in knots.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let i = self
                .piece_containing(mid)
                .ok_or_else(|| Error::Invalid("restriction midpoint outside domain".into()))?;
            pieces.push(self.pieces[i].clone());
        }
        let mut out = PiecewiseFunction1D::new(span, bps, pieces)?;
        for &(x, v) in &self.point_values {
            if span.contains(x) {
                out = out.with_point_value(x, v);
            }
        }
        Ok(out)
    }

    /// Exact integral of f over (a, b) within the domain.
    pub fn signed_integral(&self, a: f64, b: f64) -> Result<f64> {
        let knots = self.knots();
        let mut total = 0.0;
        for (i, e) in self.pieces.iter().enumerate() {
            let lo = knots[i].max(a);
            let hi = knots[i + 1].min(b);
            if lo >= hi || e.is_zero() {
                continue;
            }
            total += e.exact_integral(lo, hi).ok_or_else(|| {
                Error::NotIntegrable(format!("piece diverges on ({lo}, {hi})"))
            })?;
        }
        Ok(total)
    }

    /// Exact integral of |f| over the domain, when every piece admits one.
    pub fn abs_integral(&self) -> Result<f64> {
        let knots = self.knots();
        let mut total = 0.0;
        for (i, e) in self.pieces.iter().enumerate() {
            total += e.abs_integral(knots[i], knots[i + 1])?;
        }
        Ok(total)
    }

    /// Integral of f*g over (a, b) within the domain, exact when the pieces
    /// multiply in closed form, adaptive quadrature otherwise.
    pub fn integral_product(&self, other: &Self, a: f64, b: f64, opts: &QuadOpts) -> Result<f64> {
        let (bps, pairs) = self.common_refinement(other)?;
        let knots = knots_of(&self.domain, &bps);
        let mut total = 0.0;
        for (i, (f, g)) in pairs.iter().enumerate() {
            let lo = knots[i].max(a);
            let hi = knots[i + 1].min(b);
            if lo >= hi {
                continue;
            }
            match f.mul_expr(g) {
                Some(prod) => match prod.exact_integral(lo, hi) {
                    Some(v) => total += v,
                    None => {
                        return Err(Error::NotIntegrable(format!(
                            "product diverges on ({lo}, {hi})"
                        )))
                    }
                },
                None => {
                    let h = |x: f64| f.eval(x) * g.eval(x);
                    total += quad::integrate(&h, lo, hi, opts)?.value;
                }
            }
        }
        Ok(total)
    }
}

pub(crate) fn knots_of(domain: &Interval1D, breakpoints: &[f64]) -> Vec<f64> {
    let mut knots = Vec::with_capacity(breakpoints.len() + 2);
    knots.push(domain.lo);
    knots.extend_from_slice(breakpoints);
    knots.push(domain.hi);
    knots
}

/// Builders for the closed-form whitelist.
impl PiecewiseFunction1D {
    /// c * |x - center|^alpha on one side of `center`, as a whole-domain piece
    /// set with a breakpoint at `center` when it is interior.
    pub fn power_abs(domain: Interval1D, center: f64, alpha: f64, c: f64) -> Result<Self> {
        let term = Term::new(Poly::constant(c), Kernel::PowerAbs { center, exponent: alpha });
        Self::with_center_breakpoint(domain, center, Expr::from_term(term))
    }

    pub fn log_abs(domain: Interval1D, center: f64, c: f64) -> Result<Self> {
        let term = Term::new(Poly::constant(c), Kernel::Log { center });
        Self::with_center_breakpoint(domain, center, Expr::from_term(term))
    }

    pub fn arctan(domain: Interval1D, center: f64, rate: f64, c: f64) -> Result<Self> {
        let term = Term::new(Poly::constant(c), Kernel::Atan { center, rate });
        PiecewiseFunction1D::new(domain, vec![], vec![Expr::from_term(term)])
    }

    pub fn poly(domain: Interval1D, p: Poly) -> Self {
        PiecewiseFunction1D {
            domain,
            breakpoints: vec![],
            pieces: vec![Expr::poly(p)],
            point_values: vec![],
        }
    }

    fn with_center_breakpoint(domain: Interval1D, center: f64, e: Expr) -> Result<Self> {
        if domain.contains(center) {
            PiecewiseFunction1D::new(domain, vec![center], vec![e.clone(), e])
        } else {
            PiecewiseFunction1D::new(domain, vec![], vec![e])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom() -> Interval1D {
        Interval1D::new(-1.0, 1.0).unwrap()
    }

    #[test]
    fn indicator_limits() {
        let u = PiecewiseFunction1D::indicator(dom(), 0.0, 1.0).unwrap();
        let (l, r) = u.one_sided_limits(0.0).unwrap();
        assert_eq!(l, ExtReal::finite(0.0));
        assert_eq!(r, ExtReal::finite(1.0));
    }

    #[test]
    fn product_of_log_and_indicator() {
        let u = PiecewiseFunction1D::log_abs(dom(), 0.0, 1.0).unwrap();
        let a = PiecewiseFunction1D::indicator(dom(), 0.5, 1.0).unwrap();
        let p = u.mul(&a).unwrap();
        assert_eq!(p.eval(0.75), 0.75_f64.ln());
        assert_eq!(p.eval(0.25), 0.0);
    }
}

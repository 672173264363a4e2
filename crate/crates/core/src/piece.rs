//! Closed-form analytic pieces: a polynomial times an optional transcendental
//! kernel, and finite sums thereof.
//!
//! The kernel family is closed under the operations the engine needs:
//! differentiating any admissible function piece produces terms whose kernels
//! stay in the family, and every term has an exact antiderivative. Singular
//! kernel centers (`PowerAbs` with negative exponent, `Log`) must sit on the
//! boundary of the interval a term is used on, never inside.

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::poly::Poly;
use crate::quad::{self, QuadOpts};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Kernel {
    /// |x - center|^exponent
    PowerAbs { center: f64, exponent: f64 },
    /// ln|x - center|
    Log { center: f64 },
    /// arctan(rate * (x - center))
    Atan { center: f64, rate: f64 },
    /// 1 / (1 + rate^2 (x - center)^2)
    Cauchy { center: f64, rate: f64 },
}

impl Kernel {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Kernel::PowerAbs { center, exponent } => (x - center).abs().powf(exponent),
            Kernel::Log { center } => (x - center).abs().ln(),
            Kernel::Atan { center, rate } => (rate * (x - center)).atan(),
            Kernel::Cauchy { center, rate } => {
                let t = rate * (x - center);
                1.0 / (1.0 + t * t)
            }
        }
    }

    /// The point where the kernel is non-analytic, if any.
    pub fn singular_center(&self) -> Option<f64> {
        match *self {
            Kernel::PowerAbs { center, .. } | Kernel::Log { center } => Some(center),
            _ => None,
        }
    }
}

/// poly(x) * kernel(x); `kernel = None` is a plain polynomial.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Term {
    pub poly: Poly,
    pub kernel: Option<Kernel>,
}

impl Term {
    pub fn poly(p: Poly) -> Self {
        Term { poly: p, kernel: None }
    }

    pub fn constant(c: f64) -> Self {
        Term::poly(Poly::constant(c))
    }

    pub fn new(p: Poly, kernel: Kernel) -> Self {
        Term { poly: p, kernel: Some(kernel) }
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let base = self.poly.eval(x);
        match &self.kernel {
            None => base,
            Some(k) => base * k.eval(x),
        }
    }

    pub fn scale(&self, s: f64) -> Term {
        Term { poly: self.poly.scale(s), kernel: self.kernel.clone() }
    }

    pub fn mul_poly(&self, p: &Poly) -> Term {
        Term { poly: self.poly.mul(p), kernel: self.kernel.clone() }
    }

    /// One-sided limit as x -> x0 from within an interval on side `s`
    /// (s = +1 approaches from the right of the singular center, i.e. the
    /// interval lies above the center).
    fn limit_at(&self, x0: f64, side_of_center: f64) -> ExtReal {
        match &self.kernel {
            None => ExtReal::finite(self.poly.eval(x0)),
            Some(Kernel::Atan { .. }) | Some(Kernel::Cauchy { .. }) => {
                ExtReal::finite(self.eval(x0))
            }
            Some(Kernel::PowerAbs { center, exponent }) => {
                if x0 != *center {
                    return ExtReal::finite(self.eval(x0));
                }
                match self.poly.vanishing_order(*center) {
                    None => ExtReal::finite(0.0),
                    Some((m, coeff)) => {
                        let gamma = m as f64 + exponent;
                        let lead = coeff * side_of_center.powi(m as i32);
                        if gamma > 0.0 {
                            ExtReal::finite(0.0)
                        } else if gamma == 0.0 {
                            ExtReal::finite(lead)
                        } else if lead > 0.0 {
                            ExtReal::PosInf
                        } else {
                            ExtReal::NegInf
                        }
                    }
                }
            }
            Some(Kernel::Log { center }) => {
                if x0 != *center {
                    return ExtReal::finite(self.eval(x0));
                }
                match self.poly.vanishing_order(*center) {
                    None => ExtReal::finite(0.0),
                    Some((0, c0)) => {
                        if c0 > 0.0 {
                            ExtReal::NegInf
                        } else {
                            ExtReal::PosInf
                        }
                    }
                    // a polynomial zero dominates the logarithm
                    Some((_, _)) => ExtReal::finite(0.0),
                }
            }
        }
    }

    /// Is |term| integrable on (a, b)? The only possible obstruction is a
    /// `PowerAbs` center sitting on the boundary with effective exponent <= -1.
    fn integrable_on(&self, a: f64, b: f64) -> bool {
        if self.is_zero() {
            return true;
        }
        if let Some(Kernel::PowerAbs { center, exponent }) = self.kernel {
            if center == a || center == b {
                let m = self
                    .poly
                    .vanishing_order(center)
                    .map(|(m, _)| m as f64)
                    .unwrap_or(f64::INFINITY);
                return m + exponent > -1.0;
            }
        }
        true
    }

    /// Exact definite integral over (a, b); None if divergent.
    fn exact_integral(&self, a: f64, b: f64) -> Option<f64> {
        if self.is_zero() || a == b {
            return Some(0.0);
        }
        match &self.kernel {
            None => Some(self.poly.integral(a, b)),
            Some(Kernel::PowerAbs { center, exponent }) => {
                if !self.integrable_on(a, b) {
                    return None;
                }
                let c = *center;
                let s: f64 = if 0.5 * (a + b) >= c { 1.0 } else { -1.0 };
                let d = self.poly.shift(c);
                let mut total = 0.0;
                for (j, &dj) in d.0.iter().enumerate() {
                    if dj == 0.0 {
                        continue;
                    }
                    let gamma = j as f64 + exponent;
                    let coeff = dj * s.powi(j as i32);
                    let ia;
                    let ib;
                    if gamma == -1.0 {
                        ia = (a - c).abs().ln();
                        ib = (b - c).abs().ln();
                    } else {
                        ia = (a - c).abs().powf(gamma + 1.0) / (gamma + 1.0);
                        ib = (b - c).abs().powf(gamma + 1.0) / (gamma + 1.0);
                    }
                    total += coeff * s * (ib - ia);
                }
                Some(total)
            }
            Some(Kernel::Log { center }) => {
                let c = *center;
                let d = self.poly.shift(c);
                let eval_piece = |x: f64| -> f64 {
                    let t = x - c;
                    let mut v = 0.0;
                    for (j, &dj) in d.0.iter().enumerate() {
                        if dj == 0.0 {
                            continue;
                        }
                        let jp1 = (j + 1) as f64;
                        let tp = t.powi(j as i32 + 1);
                        let log_part = if t == 0.0 { 0.0 } else { tp * t.abs().ln() };
                        v += dj * (log_part / jp1 - tp / (jp1 * jp1));
                    }
                    v
                };
                Some(eval_piece(b) - eval_piece(a))
            }
            Some(Kernel::Atan { center, rate }) => {
                // by parts: P(x) atan(k(x-c)) - k * int P / (1 + k^2 (x-c)^2)
                let big_p = self.poly.antiderivative();
                let boundary = |x: f64| big_p.eval(x) * (rate * (x - center)).atan();
                let tail = Term::new(big_p.scale(*rate), Kernel::Cauchy { center: *center, rate: *rate })
                    .exact_integral(a, b)?;
                Some(boundary(b) - boundary(a) - tail)
            }
            Some(Kernel::Cauchy { center, rate }) => {
                if *rate == 0.0 {
                    return Some(self.poly.integral(a, b));
                }
                // substitute t = k (x - c)
                let k = *rate;
                let pt = self.poly.compose_affine(1.0 / k, *center);
                let t0 = k * (a - center);
                let t1 = k * (b - center);
                let deg = pt.0.len();
                // J_m = int t^m / (1+t^2) dt, evaluated as J_m(t1) - J_m(t0) via recursion
                let jm = |t: f64| -> Vec<f64> {
                    let mut v = vec![0.0; deg.max(2)];
                    v[0] = t.atan();
                    if v.len() > 1 {
                        v[1] = 0.5 * (1.0 + t * t).ln();
                    }
                    for m in 2..v.len() {
                        v[m] = t.powi(m as i32 - 1) / (m as f64 - 1.0) - v[m - 2];
                    }
                    v
                };
                let v1 = jm(t1);
                let v0 = jm(t0);
                let mut total = 0.0;
                for (m, &em) in pt.0.iter().enumerate() {
                    if em != 0.0 {
                        total += em * (v1[m] - v0[m]);
                    }
                }
                Some(total / k)
            }
        }
    }

    /// d/dx of the term on an interval lying on side `s` of any singular
    /// kernel center. Fails for kernels outside the differentiable family.
    fn derivative_on(&self, a: f64, b: f64) -> Result<Vec<Term>> {
        let dp = self.poly.derivative();
        match &self.kernel {
            None => Ok(vec![Term::poly(dp)]),
            Some(k @ Kernel::PowerAbs { center, exponent }) => {
                let s = if 0.5 * (a + b) >= *center { 1.0 } else { -1.0 };
                let mut out = vec![Term { poly: dp, kernel: Some(k.clone()) }];
                let t2 = Term::new(
                    self.poly.scale(exponent * s),
                    Kernel::PowerAbs { center: *center, exponent: exponent - 1.0 },
                );
                out.push(t2);
                Ok(out.into_iter().filter(|t| !t.is_zero()).collect())
            }
            Some(k @ Kernel::Log { center }) => {
                let s = if 0.5 * (a + b) >= *center { 1.0 } else { -1.0 };
                let (q, r) = self.poly.divide_linear(*center);
                let mut out = vec![Term { poly: dp, kernel: Some(k.clone()) }];
                out.push(Term::poly(q));
                out.push(Term::new(
                    Poly::constant(r * s),
                    Kernel::PowerAbs { center: *center, exponent: -1.0 },
                ));
                Ok(out.into_iter().filter(|t| !t.is_zero()).collect())
            }
            Some(k @ Kernel::Atan { center, rate }) => {
                let mut out = vec![Term { poly: dp, kernel: Some(k.clone()) }];
                out.push(Term::new(
                    self.poly.scale(*rate),
                    Kernel::Cauchy { center: *center, rate: *rate },
                ));
                Ok(out.into_iter().filter(|t| !t.is_zero()).collect())
            }
            Some(Kernel::Cauchy { .. }) => Err(Error::Invalid(
                "cannot differentiate a Cauchy-kernel piece".into(),
            )),
        }
    }

    /// Points inside (a, b) where the term can change sign.
    fn sign_change_candidates(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = self.poly.roots_in(a, b);
        match &self.kernel {
            Some(Kernel::Log { center }) => {
                for z in [center - 1.0, center + 1.0] {
                    if z > a && z < b {
                        pts.push(z);
                    }
                }
            }
            Some(Kernel::Atan { center, .. }) => {
                if *center > a && *center < b {
                    pts.push(*center);
                }
            }
            _ => {}
        }
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pts.dedup();
        pts
    }
}

/// A finite sum of terms, analytic on the interior of the interval it is
/// attached to.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Expr {
    pub terms: Vec<Term>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr { terms: vec![] }
    }

    pub fn constant(c: f64) -> Self {
        Expr::from_term(Term::constant(c))
    }

    pub fn poly(p: Poly) -> Self {
        Expr::from_term(Term::poly(p))
    }

    pub fn from_term(t: Term) -> Self {
        let mut e = Expr { terms: vec![t] };
        e.prune();
        e
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        let mut e = Expr { terms };
        e.prune();
        e
    }

    fn prune(&mut self) {
        self.terms.retain(|t| !t.is_zero());
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn scale(&self, s: f64) -> Expr {
        Expr::from_terms(self.terms.iter().map(|t| t.scale(s)).collect())
    }

    pub fn add(&self, other: &Expr) -> Expr {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Expr::from_terms(terms)
    }

    pub fn mul_poly(&self, p: &Poly) -> Expr {
        Expr::from_terms(self.terms.iter().map(|t| t.mul_poly(p)).collect())
    }

    /// Product of two expressions; None when a kernel*kernel product appears,
    /// which has no closed form in the family.
    pub fn mul_expr(&self, other: &Expr) -> Option<Expr> {
        let mut terms = Vec::new();
        for t in &self.terms {
            for u in &other.terms {
                match (&t.kernel, &u.kernel) {
                    (None, _) => terms.push(u.mul_poly(&t.poly)),
                    (_, None) => terms.push(t.mul_poly(&u.poly)),
                    _ => return None,
                }
            }
        }
        Some(Expr::from_terms(terms))
    }

    /// One-sided limit approaching x0 from inside (a, b).
    pub fn limit_at(&self, x0: f64, a: f64, b: f64) -> Result<ExtReal> {
        let mut acc = ExtReal::finite(0.0);
        for t in &self.terms {
            let side = match t.kernel.as_ref().and_then(|k| k.singular_center()) {
                Some(c) => {
                    if 0.5 * (a + b) >= c {
                        1.0
                    } else {
                        -1.0
                    }
                }
                None => 1.0,
            };
            let lim = t.limit_at(x0, side);
            acc = acc
                .checked_add(&lim)
                .ok_or(Error::OscillatoryPiece { at: x0 })?;
        }
        Ok(acc)
    }

    pub fn derivative_on(&self, a: f64, b: f64) -> Result<Expr> {
        let mut terms = Vec::new();
        for t in &self.terms {
            terms.extend(t.derivative_on(a, b)?);
        }
        Ok(Expr::from_terms(terms))
    }

    pub fn integrable_on(&self, a: f64, b: f64) -> bool {
        self.terms.iter().all(|t| t.integrable_on(a, b))
    }

    /// Exact integral over (a, b); None if some term diverges.
    pub fn exact_integral(&self, a: f64, b: f64) -> Option<f64> {
        let mut total = 0.0;
        for t in &self.terms {
            total += t.exact_integral(a, b)?;
        }
        Some(total)
    }

    /// Integral of |expr| over (a, b). Sign changes of single-term
    /// expressions are located exactly; sums fall back to sampled bracketing.
    pub fn abs_integral(&self, a: f64, b: f64) -> Result<f64> {
        if self.is_zero() || a == b {
            return Ok(0.0);
        }
        if !self.integrable_on(a, b) {
            return Err(Error::NonIntegrablePiece {
                lo: a,
                hi: b,
                what: format!("{:?}", self),
            });
        }
        let mut cuts: Vec<f64> = vec![a];
        if self.terms.len() == 1 {
            cuts.extend(self.terms[0].sign_change_candidates(a, b));
        } else {
            cuts.extend(self.sampled_sign_changes(a, b));
        }
        cuts.push(b);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            match self.exact_integral(w[0], w[1]) {
                Some(v) => total += v.abs(),
                None => unreachable!("integrability checked above"),
            }
        }
        Ok(total)
    }

    /// Numeric sign-change isolation for multi-term sums.
    fn sampled_sign_changes(&self, a: f64, b: f64) -> Vec<f64> {
        const SAMPLES: usize = 256;
        let mut pts = Vec::new();
        let h = (b - a) / SAMPLES as f64;
        let mut prev_x = a + 0.5 * h;
        let mut prev_f = self.eval(prev_x);
        for i in 1..SAMPLES {
            let x = a + (i as f64 + 0.5) * h;
            let f = self.eval(x);
            if prev_f != 0.0 && f != 0.0 && prev_f.signum() != f.signum() {
                let mut lo = prev_x;
                let mut hi = x;
                let mut flo = prev_f;
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let fm = self.eval(mid);
                    if fm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if fm.signum() == flo.signum() {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                pts.push(0.5 * (lo + hi));
            }
            prev_x = x;
            prev_f = f;
        }
        pts
    }

    /// Integral of expr * f for an arbitrary integrand, used as the quadrature
    /// fallback when the product has no closed form.
    pub fn integral_against(&self, f: &dyn Fn(f64) -> f64, a: f64, b: f64, opts: &QuadOpts) -> Result<f64> {
        let g = |x: f64| self.eval(x) * f(x);
        Ok(quad::integrate(&g, a, b, opts)?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_integral_exact() {
        // int_0^1 x^{-1/2} dx = 2
        let t = Term::new(Poly::constant(1.0), Kernel::PowerAbs { center: 0.0, exponent: -0.5 });
        assert!((t.exact_integral(0.0, 1.0).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn log_integral_exact() {
        // int_0^1 ln x dx = -1
        let t = Term::new(Poly::constant(1.0), Kernel::Log { center: 0.0 });
        assert!((t.exact_integral(0.0, 1.0).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn cauchy_integral_exact() {
        // int_0^1 k/(1+k^2 x^2) dx = atan(k)
        let k = 3.5;
        let t = Term::new(Poly::constant(k), Kernel::Cauchy { center: 0.0, rate: k });
        assert!((t.exact_integral(0.0, 1.0).unwrap() - k.atan()).abs() < 1e-14);
    }

    #[test]
    fn atan_integral_matches_parts() {
        // int_0^1 atan(x) dx = pi/4 - ln(2)/2
        let t = Term::new(Poly::constant(1.0), Kernel::Atan { center: 0.0, rate: 1.0 });
        let expect = std::f64::consts::FRAC_PI_4 - 0.5 * 2.0_f64.ln();
        assert!((t.exact_integral(0.0, 1.0).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn reciprocal_diverges_at_endpoint() {
        let t = Term::new(Poly::constant(1.0), Kernel::PowerAbs { center: 0.0, exponent: -1.0 });
        assert!(t.exact_integral(0.0, 1.0).is_none());
        assert!((t.exact_integral(0.5, 1.0).unwrap() - 2.0_f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn limits_at_singularity() {
        // 1/sqrt(x) -> +inf from the right of 0
        let t = Term::new(Poly::constant(1.0), Kernel::PowerAbs { center: 0.0, exponent: -0.5 });
        let e = Expr::from_term(t);
        assert_eq!(e.limit_at(0.0, 0.0, 1.0).unwrap(), ExtReal::PosInf);
        // log -> -inf
        let l = Expr::from_term(Term::new(Poly::constant(1.0), Kernel::Log { center: 0.0 }));
        assert_eq!(l.limit_at(0.0, 0.0, 1.0).unwrap(), ExtReal::NegInf);
        // x * log|x| -> 0
        let xl = Expr::from_term(Term::new(Poly::x(), Kernel::Log { center: 0.0 }));
        assert_eq!(xl.limit_at(0.0, 0.0, 1.0).unwrap(), ExtReal::finite(0.0));
    }

    #[test]
    fn derivative_of_log_piece() {
        // d/dx log|x| = 1/x on (0,1): PowerAbs(-1) with positive sign
        let l = Expr::from_term(Term::new(Poly::constant(1.0), Kernel::Log { center: 0.0 }));
        let d = l.derivative_on(0.0, 1.0).unwrap();
        assert_eq!(d.terms.len(), 1);
        assert!((d.eval(0.25) - 4.0).abs() < 1e-12);
        // and on (-1,0): 1/x is negative there
        let d2 = l.derivative_on(-1.0, 0.0).unwrap();
        assert!((d2.eval(-0.25) + 4.0).abs() < 1e-12);
    }

    #[test]
    fn abs_integral_splits_at_roots() {
        // int_{-1}^{1} |x| dx = 1
        let e = Expr::poly(Poly::x());
        assert!((e.abs_integral(-1.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
    }
}

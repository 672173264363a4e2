//! The exact one-dimensional pairing engine: approximate limits,
//! λ-representatives, distributional derivatives as measures, the λ-pairing
//! through the product rule D(uA) = u^λ DA + (A, Du)_λ, class membership
//! certificates, seminorms and truncation.

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::func1d::{knots_of, PiecewiseFunction1D};
use crate::lambda::LambdaSelector;
use crate::measure1d::{DensitySegment, Measure1D};
use crate::piece::{Expr, Kernel};
use crate::quad::{self, QuadOpts};

/// The three measures produced by a pairing evaluation; the identity
/// `pairing + u_lambda_div_a = u_a_derivative` holds exactly by construction
/// and is re-checked by `audit`.
#[derive(Debug, Clone)]
pub struct PairingResult1D {
    pub pairing: Measure1D,
    pub u_a_derivative: Measure1D,
    pub u_lambda_div_a: Measure1D,
}

impl PairingResult1D {
    /// Total-variation residual of the product-rule identity.
    pub fn audit(&self) -> Result<f64> {
        let lhs = self.pairing.add(&self.u_lambda_div_a)?;
        lhs.sub(&self.u_a_derivative)?.total_variation()
    }
}

/// Outcome of the summability test for membership in the pairing class.
#[derive(Debug, Clone)]
pub struct ClassCertificate {
    pub in_class: bool,
    /// ∫ |u^λ| |A| dx when finite.
    pub l1_against_field: Option<f64>,
    /// ∫ |u^λ| d|DA| when finite.
    pub l1_against_divergence: Option<f64>,
    pub obstruction: Option<String>,
}

/// Approximate liminf/limsup at x: in one dimension these are the min and max
/// of the two one-sided limits.
pub fn approx_limits(u: &PiecewiseFunction1D, x: f64) -> Result<(ExtReal, ExtReal)> {
    let (l, r) = u.one_sided_limits(x)?;
    Ok((ExtReal::min(l, r), ExtReal::max(l, r)))
}

/// u^λ(x) = (1-λ)u⁻ + λu⁺ with 0·(±∞) = 0; on the set where u⁺ = +∞ and
/// u⁻ = -∞ simultaneously the value is +∞, 0 or -∞ according to λ ⋛ 1/2.
pub fn lambda_representative(
    u: &PiecewiseFunction1D,
    lam: &LambdaSelector,
    x: f64,
) -> Result<ExtReal> {
    let (minus, plus) = approx_limits(u, x)?;
    let l = lam.eval1(x);
    if plus == ExtReal::PosInf && minus == ExtReal::NegInf {
        return Ok(if l > 0.5 {
            ExtReal::PosInf
        } else if l == 0.5 {
            ExtReal::finite(0.0)
        } else {
            ExtReal::NegInf
        });
    }
    minus
        .scale(1.0 - l)
        .checked_add(&plus.scale(l))
        .ok_or(Error::IndeterminateForm { at: x })
}

/// Distributional derivative of a BV function as an exact measure: piecewise
/// derivative density plus a jump atom at every breakpoint.
pub fn derivative(u: &PiecewiseFunction1D) -> Result<Measure1D> {
    let knots = u.knots();
    let mut segments = Vec::new();
    for (i, piece) in u.pieces.iter().enumerate() {
        let (a, b) = (knots[i], knots[i + 1]);
        if piece.is_zero() {
            continue;
        }
        let d = piece
            .derivative_on(a, b)
            .map_err(|e| Error::NotBV { reason: e.to_string() })?;
        if !d.integrable_on(a, b) {
            return Err(Error::NotBV {
                reason: format!("derivative not absolutely integrable on ({a}, {b})"),
            });
        }
        if !d.is_zero() {
            segments.push(DensitySegment { lo: a, hi: b, expr: d });
        }
    }
    let mut atoms = Vec::new();
    for &bp in &u.breakpoints {
        let (l, r) = u.one_sided_limits(bp)?;
        match (l.value(), r.value()) {
            (Some(lv), Some(rv)) => {
                let w = rv - lv;
                if w != 0.0 {
                    atoms.push((bp, w));
                }
            }
            _ => {
                return Err(Error::NotBV {
                    reason: format!("infinite one-sided limit at breakpoint {bp}"),
                })
            }
        }
    }
    Measure1D::new(u.domain, atoms, segments)
}

/// ∫ u^λ dμ: λ-representative at atoms, u itself against the density.
pub fn integrate_lambda(
    u: &PiecewiseFunction1D,
    lam: &LambdaSelector,
    mu: &Measure1D,
    opts: &QuadOpts,
) -> Result<f64> {
    let mut total = 0.0;
    for &(x, w) in &mu.atoms {
        if w == 0.0 {
            continue;
        }
        let ul = lambda_representative(u, lam, x)?;
        match ul.value() {
            Some(v) => total += v * w,
            None => {
                return Err(Error::NotIntegrable(format!(
                    "u^λ infinite at atom {x} with nonzero weight"
                )))
            }
        }
    }
    total += mu.integrate_density(&|x| u.eval(x), Some(u), opts)?;
    Ok(total)
}

/// Integral of |f * g| over the pieces of f against density segments, exact
/// where a closed form exists. Returns Err(obstruction) inside Ok when the
/// integral diverges.
fn abs_product_integral(
    f: &PiecewiseFunction1D,
    segments: &[DensitySegment],
    opts: &QuadOpts,
) -> Result<std::result::Result<f64, String>> {
    let mut total = 0.0;
    for seg in segments {
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
            let idx = match f.piece_containing(mid) {
                Some(i) => i,
                None => continue,
            };
            let fe = &f.pieces[idx];
            if fe.is_zero() || seg.expr.is_zero() {
                continue;
            }
            match fe.mul_expr(&seg.expr) {
                Some(prod) => {
                    if !prod.integrable_on(lo, hi) {
                        return Ok(Err(format!(
                            "|u·density| diverges on ({lo}, {hi})"
                        )));
                    }
                    total += prod.abs_integral(lo, hi)?;
                }
                None => {
                    if !fe.integrable_on(lo, hi) || !seg.expr.integrable_on(lo, hi) {
                        return Ok(Err(format!(
                            "no closed form and a factor diverges on ({lo}, {hi})"
                        )));
                    }
                    let h = |x: f64| (fe.eval(x) * seg.expr.eval(x)).abs();
                    total += quad::integrate(&h, lo, hi, opts)?.value;
                }
            }
        }
    }
    Ok(Ok(total))
}

/// Density segments representing the function A itself (the measure A L¹).
fn field_as_segments(a_field: &PiecewiseFunction1D) -> Vec<DensitySegment> {
    let knots = knots_of(&a_field.domain, &a_field.breakpoints);
    a_field
        .pieces
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.is_zero())
        .map(|(i, e)| DensitySegment { lo: knots[i], hi: knots[i + 1], expr: e.clone() })
        .collect()
}

/// Membership test for the summability class: u^λ must be integrable against
/// both |A| dx and |DA|. Divergence is a `false` verdict with a certificate,
/// not an error.
pub fn in_class_x(
    u: &PiecewiseFunction1D,
    a_field: &PiecewiseFunction1D,
    lam: &LambdaSelector,
) -> Result<ClassCertificate> {
    let opts = QuadOpts::default();
    let da = derivative(a_field)?;

    let field_segments = field_as_segments(a_field);
    let against_field = abs_product_integral(u, &field_segments, &opts)?;
    if let Err(obstruction) = against_field {
        return Ok(ClassCertificate {
            in_class: false,
            l1_against_field: None,
            l1_against_divergence: None,
            obstruction: Some(obstruction),
        });
    }

    let mut against_div = 0.0;
    for &(x, w) in &da.atoms {
        let ul = lambda_representative(u, lam, x)?;
        match ul.value() {
            Some(v) => against_div += v.abs() * w.abs(),
            None => {
                return Ok(ClassCertificate {
                    in_class: false,
                    l1_against_field: against_field.ok(),
                    l1_against_divergence: None,
                    obstruction: Some(format!(
                        "u^λ is infinite at the DA atom {x} (weight {w})"
                    )),
                })
            }
        }
    }
    match abs_product_integral(u, &da.segments, &opts)? {
        Ok(v) => against_div += v,
        Err(obstruction) => {
            return Ok(ClassCertificate {
                in_class: false,
                l1_against_field: against_field.ok(),
                l1_against_divergence: None,
                obstruction: Some(obstruction),
            })
        }
    }

    Ok(ClassCertificate {
        in_class: true,
        l1_against_field: against_field.ok(),
        l1_against_divergence: Some(against_div),
        obstruction: None,
    })
}

/// The λ-pairing (A, Du)_λ = D(uA) - u^λ DA, returned with both audit
/// measures. Requires A of bounded variation, u in the summability class and
/// uA of bounded variation.
pub fn pairing_1d(
    a_field: &PiecewiseFunction1D,
    u: &PiecewiseFunction1D,
    lam: &LambdaSelector,
) -> Result<PairingResult1D> {
    let da = derivative(a_field)?;
    let cert = in_class_x(u, a_field, lam)?;
    if !cert.in_class {
        return Err(Error::NotInClassX {
            reason: cert.obstruction.unwrap_or_default(),
        });
    }
    let product = u.mul(a_field)?;
    let u_a_derivative =
        derivative(&product).map_err(|e| Error::NotInBVA { reason: e.to_string() })?;

    let mut atoms = Vec::new();
    for &(x, w) in &da.atoms {
        let ul = lambda_representative(u, lam, x)?;
        let v = ul
            .value()
            .ok_or_else(|| Error::NotInClassX { reason: format!("u^λ infinite at {x}") })?;
        atoms.push((x, v * w));
    }
    let mut segments = Vec::new();
    for seg in &da.segments {
        let mut cuts = vec![seg.lo];
        for &b in &u.breakpoints {
            if b > seg.lo && b < seg.hi {
                cuts.push(b);
            }
        }
        cuts.push(seg.hi);
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mid = 0.5 * (lo + hi);
            let idx = u
                .piece_containing(mid)
                .ok_or_else(|| Error::Invalid("segment outside u domain".into()))?;
            match u.pieces[idx].mul_expr(&seg.expr) {
                Some(prod) => {
                    if !prod.is_zero() {
                        segments.push(DensitySegment { lo, hi, expr: prod });
                    }
                }
                None => {
                    return Err(Error::NoClosedForm(
                        "u times the density of DA has no closed form".into(),
                    ))
                }
            }
        }
    }
    let u_lambda_div_a = Measure1D::new(u.domain, atoms, segments)?;
    let pairing = u_a_derivative.sub(&u_lambda_div_a)?;
    Ok(PairingResult1D { pairing, u_a_derivative, u_lambda_div_a })
}

/// The natural seminorm of the pairing class:
/// ‖u‖_{L¹(|A|dx)} + ‖u‖ against the divergence + |D(uA)|(Ω).
/// When DA has atoms the middle term integrates |u^λ| against the full |DA|;
/// when DA ≪ L¹ it is the plain density term.
pub fn seminorm_bva(
    u: &PiecewiseFunction1D,
    a_field: &PiecewiseFunction1D,
    lam: &LambdaSelector,
) -> Result<f64> {
    let opts = QuadOpts::default();
    let da = derivative(a_field)?;
    let t1 = match abs_product_integral(u, &field_as_segments(a_field), &opts)? {
        Ok(v) => v,
        Err(reason) => return Err(Error::NotInClassX { reason }),
    };
    let mut t2 = 0.0;
    for &(x, w) in &da.atoms {
        let ul = lambda_representative(u, lam, x)?;
        let v = ul
            .value()
            .ok_or_else(|| Error::NotInClassX { reason: format!("u^λ infinite at {x}") })?;
        t2 += v.abs() * w.abs();
    }
    t2 += match abs_product_integral(u, &da.segments, &opts)? {
        Ok(v) => v,
        Err(reason) => return Err(Error::NotInClassX { reason }),
    };
    let product = u.mul(a_field)?;
    let t3 = derivative(&product)
        .map_err(|e| Error::NotInBVA { reason: e.to_string() })?
        .total_variation()?;
    Ok(t1 + t2 + t3)
}

/// Clamp of u to [-k, k], inserting exact breakpoints where pieces cross ±k.
pub fn truncate(u: &PiecewiseFunction1D, k: f64) -> Result<PiecewiseFunction1D> {
    if !(k > 0.0) {
        return Err(Error::Invalid("truncation level must be positive".into()));
    }
    let knots = u.knots();
    let mut new_bps: Vec<f64> = u.breakpoints.clone();
    for (i, piece) in u.pieces.iter().enumerate() {
        let (a, b) = (knots[i], knots[i + 1]);
        for level in [k, -k] {
            for r in level_crossings(piece, level, a, b) {
                if r > u.domain.lo && r < u.domain.hi {
                    new_bps.push(r);
                }
            }
        }
    }
    new_bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    new_bps.dedup();
    let new_knots = knots_of(&u.domain, &new_bps);
    let mut pieces = Vec::with_capacity(new_knots.len() - 1);
    for w in new_knots.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let idx = u.piece_containing(mid).expect("refined midpoint");
        let v = u.pieces[idx].eval(mid);
        pieces.push(if v > k {
            Expr::constant(k)
        } else if v < -k {
            Expr::constant(-k)
        } else {
            u.pieces[idx].clone()
        });
    }
    let mut out = PiecewiseFunction1D::new(u.domain, new_bps, pieces)?;
    for &(x, v) in &u.point_values {
        out = out.with_point_value(x, v.clamp(-k, k));
    }
    Ok(out)
}

/// Points in (a, b) where expr = level, exact for polynomial pieces and for
/// constant-coefficient kernel pieces, sampled bracketing otherwise.
fn level_crossings(expr: &Expr, level: f64, a: f64, b: f64) -> Vec<f64> {
    if expr.is_zero() {
        return vec![];
    }
    if expr.terms.len() == 1 {
        let t = &expr.terms[0];
        match (&t.kernel, t.poly.degree()) {
            (None, _) => {
                let shifted = t.poly.sub(&crate::poly::Poly::constant(level));
                return shifted.roots_in(a, b);
            }
            (Some(kernel), 0) => {
                let c = t.poly.eval(0.0);
                let mut out = Vec::new();
                match *kernel {
                    Kernel::PowerAbs { center, exponent } => {
                        let ratio = level / c;
                        if ratio > 0.0 && exponent != 0.0 {
                            let d = ratio.powf(1.0 / exponent);
                            for x in [center - d, center + d] {
                                if x > a && x < b {
                                    out.push(x);
                                }
                            }
                        }
                    }
                    Kernel::Log { center } => {
                        let d = (level / c).exp();
                        for x in [center - d, center + d] {
                            if x > a && x < b {
                                out.push(x);
                            }
                        }
                    }
                    Kernel::Atan { center, rate } => {
                        let arg = level / c;
                        if arg.abs() < std::f64::consts::FRAC_PI_2 {
                            let x = center + arg.tan() / rate;
                            if x > a && x < b {
                                out.push(x);
                            }
                        }
                    }
                    Kernel::Cauchy { center, rate } => {
                        let q = c / level - 1.0;
                        if q >= 0.0 && rate != 0.0 {
                            let d = q.sqrt() / rate.abs();
                            for x in [center - d, center + d] {
                                if x > a && x < b {
                                    out.push(x);
                                }
                            }
                        }
                    }
                }
                out.sort_by(|x, y| x.partial_cmp(y).unwrap());
                return out;
            }
            _ => {}
        }
    }
    // numeric fallback on the shifted expression
    let shifted = expr.add(&Expr::constant(-level));
    let mut cuts = Vec::new();
    let n = 512;
    let h = (b - a) / n as f64;
    let mut prev = shifted.eval(a + 0.5 * h);
    for i in 1..n {
        let x = a + (i as f64 + 0.5) * h;
        let cur = shifted.eval(x);
        if prev.is_finite() && cur.is_finite() && prev != 0.0 && cur != 0.0 && prev.signum() != cur.signum() {
            let mut lo = x - h;
            let mut hi = x;
            let mut flo = prev;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let fm = shifted.eval(mid);
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
            cuts.push(0.5 * (lo + hi));
        }
        prev = cur;
    }
    cuts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func1d::Interval1D;
    use crate::poly::Poly;

    fn dom() -> Interval1D {
        Interval1D::new(-1.0, 1.0).unwrap()
    }

    fn lam_const(v: f64) -> LambdaSelector {
        LambdaSelector::constant(v).unwrap()
    }

    #[test]
    fn approx_limits_of_indicator() {
        let u = PiecewiseFunction1D::indicator(dom(), 0.0, 1.0).unwrap();
        let (lo, hi) = approx_limits(&u, 0.0).unwrap();
        assert_eq!(lo, ExtReal::finite(0.0));
        assert_eq!(hi, ExtReal::finite(1.0));
    }

    #[test]
    fn approx_limits_with_infinities() {
        // 1/sqrt(x) for x > 0, 1/cbrt(x) for x < 0: u⁺(0) = +∞, u⁻(0) = -∞
        let right = Expr::from_term(crate::piece::Term::new(
            Poly::constant(1.0),
            Kernel::PowerAbs { center: 0.0, exponent: -0.5 },
        ));
        let left = Expr::from_term(crate::piece::Term::new(
            Poly::constant(-1.0),
            Kernel::PowerAbs { center: 0.0, exponent: -1.0 / 3.0 },
        ));
        let u = PiecewiseFunction1D::new(dom(), vec![0.0], vec![left, right]).unwrap();
        let (lo, hi) = approx_limits(&u, 0.0).unwrap();
        assert_eq!(lo, ExtReal::NegInf);
        assert_eq!(hi, ExtReal::PosInf);
        // λ-representative on the doubly-infinite set follows the 1/2 rule
        assert_eq!(
            lambda_representative(&u, &lam_const(0.5), 0.0).unwrap(),
            ExtReal::finite(0.0)
        );
        assert_eq!(
            lambda_representative(&u, &lam_const(0.7), 0.0).unwrap(),
            ExtReal::PosInf
        );
        assert_eq!(
            lambda_representative(&u, &lam_const(0.2), 0.0).unwrap(),
            ExtReal::NegInf
        );
    }

    #[test]
    fn lambda_representative_of_jump() {
        let u = PiecewiseFunction1D::indicator(dom(), 0.0, 1.0).unwrap();
        let lam = lam_const(0.25);
        assert_eq!(
            lambda_representative(&u, &lam, 0.0).unwrap(),
            ExtReal::finite(0.25)
        );
    }

    #[test]
    fn derivative_of_indicator_and_ramp() {
        let u = PiecewiseFunction1D::indicator(dom(), -0.5, 0.5).unwrap();
        let d = derivative(&u).unwrap();
        assert_eq!(d.atoms, vec![(-0.5, 1.0), (0.5, -1.0)]);
        assert!(d.segments.is_empty());

        let v = PiecewiseFunction1D::poly(Interval1D::new(0.0, 1.0).unwrap(), Poly::x());
        let dv = derivative(&v).unwrap();
        assert!(dv.atoms.is_empty());
        assert!((dv.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_is_not_bv() {
        let u = PiecewiseFunction1D::log_abs(dom(), 0.0, 1.0).unwrap();
        assert!(matches!(derivative(&u), Err(Error::NotBV { .. })));
    }

    #[test]
    fn class_membership_examples() {
        // log|x| against the indicator field: in class
        let u = PiecewiseFunction1D::log_abs(dom(), 0.0, 1.0).unwrap();
        let a = PiecewiseFunction1D::indicator(dom(), 0.5, 1.0).unwrap();
        let cert = in_class_x(&u, &a, &lam_const(0.5)).unwrap();
        assert!(cert.in_class, "{:?}", cert.obstruction);

        // 1/x against A ≡ 1: diverges
        let w = PiecewiseFunction1D::power_abs(dom(), 0.0, -1.0, 1.0).unwrap();
        let one = PiecewiseFunction1D::constant(dom(), 1.0);
        let cert = in_class_x(&w, &one, &lam_const(0.5)).unwrap();
        assert!(!cert.in_class);
        assert!(cert.obstruction.is_some());
    }

    #[test]
    fn pairing_log_example_is_exact() {
        // A = χ_(1/2,1), u = log|x| on (-1,1): pairing = (1/x) L¹ ⌞ (1/2,1)
        let u = PiecewiseFunction1D::log_abs(dom(), 0.0, 1.0).unwrap();
        let a = PiecewiseFunction1D::indicator(dom(), 0.5, 1.0).unwrap();
        let res = pairing_1d(&a, &u, &lam_const(0.3)).unwrap();
        assert!(res.pairing.atoms.is_empty(), "atoms: {:?}", res.pairing.atoms);
        assert_eq!(res.pairing.segments.len(), 1);
        let seg = &res.pairing.segments[0];
        assert_eq!((seg.lo, seg.hi), (0.5, 1.0));
        assert!((seg.expr.eval(0.75) - 1.0 / 0.75).abs() < 1e-15);
        assert_eq!(res.audit().unwrap(), 0.0);
    }

    #[test]
    fn pairing_of_constant_vanishes() {
        let a = PiecewiseFunction1D::indicator(dom(), 0.0, 0.7).unwrap();
        let c = PiecewiseFunction1D::constant(dom(), 3.25);
        let res = pairing_1d(&a, &c, &lam_const(0.9)).unwrap();
        assert!(res.pairing.is_zero(), "{:?}", res.pairing);
    }

    #[test]
    fn pairing_step_against_step() {
        // A = χ_(0,1) on (-1,1), u = aπ/2 on (0,1), -bπ/2 on (-1,0):
        // pairing = (1-λ(0)) (a+b) π/2 δ₀
        let (aa, bb) = (0.8, 0.4);
        let a = PiecewiseFunction1D::indicator(dom(), 0.0, 1.0).unwrap();
        let hi = std::f64::consts::FRAC_PI_2 * aa;
        let lo = -std::f64::consts::FRAC_PI_2 * bb;
        let u = PiecewiseFunction1D::new(
            dom(),
            vec![0.0],
            vec![Expr::constant(lo), Expr::constant(hi)],
        )
        .unwrap();
        for l0 in [0.0, 0.25, 0.5, 1.0] {
            let lam = lam_const(0.5).with_override_1d(0.0, l0).unwrap();
            let res = pairing_1d(&a, &u, &lam).unwrap();
            let w = res
                .pairing
                .atoms
                .iter()
                .find(|&&(x, _)| x == 0.0)
                .map_or(0.0, |&(_, w)| w);
            let expect = (1.0 - l0) * (aa + bb) * std::f64::consts::FRAC_PI_2;
            assert!((w - expect).abs() < 1e-14, "w={w} expect={expect}");
            assert!(res.pairing.segments.is_empty());
        }
    }

    #[test]
    fn seminorm_values() {
        // u = χ_(0,1/2), A ≡ 1 on (-1,1): 1/2 + 0 + 2 = 5/2
        let u = PiecewiseFunction1D::indicator(dom(), 0.0, 0.5).unwrap();
        let one = PiecewiseFunction1D::constant(dom(), 1.0);
        let s = seminorm_bva(&u, &one, &lam_const(0.5)).unwrap();
        assert!((s - 2.5).abs() < 1e-14);

        // u = x, A ≡ 1 on (0,1): 1/2 + 0 + 1 = 3/2
        let d01 = Interval1D::new(0.0, 1.0).unwrap();
        let u = PiecewiseFunction1D::poly(d01, Poly::x());
        let one = PiecewiseFunction1D::constant(d01, 1.0);
        let s = seminorm_bva(&u, &one, &lam_const(0.5)).unwrap();
        assert!((s - 1.5).abs() < 1e-14);

        // u = 0
        let z = PiecewiseFunction1D::constant(dom(), 0.0);
        let one = PiecewiseFunction1D::constant(dom(), 1.0);
        assert_eq!(seminorm_bva(&z, &one, &lam_const(0.5)).unwrap(), 0.0);
    }

    #[test]
    fn truncate_ramp_and_inverse_sqrt() {
        let d02 = Interval1D::new(0.0, 2.0).unwrap();
        let u = PiecewiseFunction1D::poly(d02, Poly::x());
        let t = truncate(&u, 1.0).unwrap();
        assert_eq!(t.breakpoints, vec![1.0]);
        assert_eq!(t.eval(1.5), 1.0);
        assert_eq!(t.eval(0.5), 0.5);

        let d01 = Interval1D::new(0.0, 1.0).unwrap();
        let u = PiecewiseFunction1D::power_abs(d01, 0.0, -0.5, 1.0).unwrap();
        let t = truncate(&u, 2.0).unwrap();
        assert_eq!(t.breakpoints, vec![0.25]);
        assert_eq!(t.eval(0.1), 2.0);
        assert!((t.eval(0.5) - 1.0 / 0.5_f64.sqrt()).abs() < 1e-15);

        // |u| <= k: unchanged
        let v = PiecewiseFunction1D::poly(d01, Poly::x());
        let tv = truncate(&v, 5.0).unwrap();
        assert_eq!(tv.breakpoints, v.breakpoints);
    }

    #[test]
    fn truncate_unreachable_level_keeps_pieces() {
        let u = PiecewiseFunction1D::indicator(dom(), 0.0, 1.0).unwrap();
        let t = truncate(&u, 0.5).unwrap();
        assert_eq!(t.eval(0.5), 0.5);
        assert_eq!(t.eval(-0.5), 0.0);
    }
}

//! Dense univariate polynomials with `f64` coefficients, ascending order.
//!
//! Root location inside an interval recurses on the derivative: between
//! consecutive critical points the polynomial is monotone, so a sign change
//! brackets exactly one root, which bisection pins to machine precision.
//! Tangential (non sign-changing) roots are irrelevant for total-variation
//! and clamping purposes and are not reported.

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Poly(coeffs);
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Poly(vec![])
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial x.
    pub fn x() -> Self {
        Poly(vec![0.0, 1.0])
    }

    fn trim(&mut self) {
        while let Some(&c) = self.0.last() {
            if c == 0.0 {
                self.0.pop();
            } else {
                break;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut coeffs = vec![0.0; n];
        for (i, &c) in self.0.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, &c) in other.0.iter().enumerate() {
            coeffs[i] += c;
        }
        Poly::new(coeffs)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.0.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::new(coeffs)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![0.0; self.0.len() + 1];
        for (i, &c) in self.0.iter().enumerate() {
            coeffs[i + 1] = c / (i + 1) as f64;
        }
        Poly::new(coeffs)
    }

    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let f = self.antiderivative();
        f.eval(b) - f.eval(a)
    }

    /// Coefficients of p written in powers of (x - c), via repeated synthetic
    /// division by (x - c).
    pub fn shift(&self, c: f64) -> Poly {
        if c == 0.0 || self.is_zero() {
            return self.clone();
        }
        let mut a = self.0.clone();
        let mut out = Vec::with_capacity(a.len());
        while !a.is_empty() {
            let n = a.len();
            if n == 1 {
                out.push(a[0]);
                break;
            }
            let mut q = vec![0.0; n - 1];
            q[n - 2] = a[n - 1];
            for i in (1..n - 1).rev() {
                q[i - 1] = a[i] + c * q[i];
            }
            let r = a[0] + c * q[0];
            out.push(r);
            a = q;
        }
        Poly::new(out)
    }

    /// Sign-changing real roots strictly inside (a, b), ascending.
    pub fn roots_in(&self, a: f64, b: f64) -> Vec<f64> {
        if !(a < b) || self.is_zero() {
            return vec![];
        }
        if self.0.len() == 1 {
            return vec![];
        }
        if self.0.len() == 2 {
            let r = -self.0[0] / self.0[1];
            return if r > a && r < b { vec![r] } else { vec![] };
        }
        let crit = self.derivative().roots_in(a, b);
        let mut knots = Vec::with_capacity(crit.len() + 2);
        knots.push(a);
        knots.extend(crit);
        knots.push(b);
        let mut roots = Vec::new();
        for w in knots.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let flo = self.eval(lo);
            let fhi = self.eval(hi);
            if flo == 0.0 && lo > a {
                push_unique(&mut roots, lo);
                continue;
            }
            if fhi == 0.0 || flo == 0.0 || flo.signum() == fhi.signum() {
                continue;
            }
            let mut x0 = lo;
            let mut x1 = hi;
            let mut f0 = flo;
            for _ in 0..200 {
                let mid = 0.5 * (x0 + x1);
                if mid <= x0 || mid >= x1 {
                    break;
                }
                let fm = self.eval(mid);
                if fm == 0.0 {
                    x0 = mid;
                    x1 = mid;
                    break;
                }
                if fm.signum() == f0.signum() {
                    x0 = mid;
                    f0 = fm;
                } else {
                    x1 = mid;
                }
            }
            let r = 0.5 * (x0 + x1);
            if r > a && r < b {
                push_unique(&mut roots, r);
            }
        }
        roots
    }

    /// Coefficients of p(a*t + b) as a polynomial in t.
    pub fn compose_affine(&self, a: f64, b: f64) -> Poly {
        let lin = Poly::new(vec![b, a]);
        let mut acc = Poly::zero();
        for &c in self.0.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(c));
        }
        acc
    }

    /// Synthetic division by (x - c): returns (quotient, remainder).
    pub fn divide_linear(&self, c: f64) -> (Poly, f64) {
        let n = self.0.len();
        if n == 0 {
            return (Poly::zero(), 0.0);
        }
        if n == 1 {
            return (Poly::zero(), self.0[0]);
        }
        let mut q = vec![0.0; n - 1];
        q[n - 2] = self.0[n - 1];
        for i in (1..n - 1).rev() {
            q[i - 1] = self.0[i] + c * q[i];
        }
        let r = self.0[0] + c * q[0];
        (Poly::new(q), r)
    }

    /// Order of vanishing at c (index of first nonzero shifted coefficient),
    /// together with that coefficient. Returns None for the zero polynomial.
    pub fn vanishing_order(&self, c: f64) -> Option<(usize, f64)> {
        if self.is_zero() {
            return None;
        }
        let s = self.shift(c);
        s.0.iter().enumerate().find(|(_, &v)| v != 0.0).map(|(i, &v)| (i, v))
    }
}

fn push_unique(roots: &mut Vec<f64>, r: f64) {
    if roots
        .last()
        .map_or(true, |&q| (q - r).abs() > 1e-14 * (1.0 + r.abs()))
    {
        roots.push(r);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_recenters() {
        // p(x) = x^2 - 2x + 3 = (x-1)^2 + 2
        let p = Poly::new(vec![3.0, -2.0, 1.0]);
        let s = p.shift(1.0);
        assert_eq!(s.0, vec![2.0, 0.0, 1.0]);
    }

    #[test]
    fn roots_of_cubic() {
        // (x+1)x(x-2) = x^3 - x^2 - 2x
        let p = Poly::new(vec![0.0, -2.0, -1.0, 1.0]);
        let r = p.roots_in(-3.0, 3.0);
        assert_eq!(r.len(), 3);
        assert!((r[0] + 1.0).abs() < 1e-12);
        assert!(r[1].abs() < 1e-12);
        assert!((r[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn integral_matches_hand_value() {
        let p = Poly::new(vec![0.0, 1.0]); // x
        assert!((p.integral(0.0, 1.0) - 0.5).abs() < 1e-15);
    }
}

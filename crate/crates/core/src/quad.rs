//! Globally adaptive Gauss–Kronrod quadrature (7–15 pair) and nested
//! multidimensional integration over boxes.
//!
//! Refinement is deterministic: the segment with the largest error estimate
//! splits first, ties broken by insertion order.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Kronrod-15 abscissae (positive half, descending) and weights; Gauss-7
/// weights for the embedded rule.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

#[derive(Debug, Clone)]
pub struct QuadOpts {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_segments: usize,
}

impl Default for QuadOpts {
    fn default() -> Self {
        QuadOpts { rel_tol: 1e-10, abs_tol: 1e-14, max_segments: 60_000 }
    }
}

impl QuadOpts {
    pub fn with_tol(rel: f64, abs: f64) -> Self {
        QuadOpts { rel_tol: rel, abs_tol: abs, ..Default::default() }
    }
}

fn gk15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.abs() * WGK[7];
    let mut samples = [0.0f64; 15];
    samples[7] = fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        samples[i] = f1;
        samples[14 - i] = f2;
        kronrod += WGK[i] * (f1 + f2);
        resabs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    let mean = kronrod * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for i in 0..7 {
        resasc += WGK[i] * ((samples[i] - mean).abs() + (samples[14 - i] - mean).abs());
    }
    resasc *= half.abs();
    let value = kronrod * half;
    let raw = ((kronrod - gauss) * half).abs();
    let mut err = raw;
    if resasc != 0.0 && raw != 0.0 {
        err = resasc * 1.0f64.min((200.0 * raw / resasc).powf(1.5));
    }
    let resabs = resabs * half.abs();
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    seq: usize,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.seq == other.seq
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then(other.seq.cmp(&self.seq))
    }
}

/// Adaptive integral of `f` over (a, b).
pub fn integrate<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, opts: &QuadOpts) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0, evals: 0 });
    }
    let mut seq = 0usize;
    let mut heap = BinaryHeap::new();
    let (v, e) = gk15(f, a, b);
    let mut evals = 15usize;
    heap.push(Segment { a, b, value: v, error: e, seq });
    let mut total_value = v;
    let mut total_error = e;
    while total_error > opts.abs_tol.max(opts.rel_tol * total_value.abs()) {
        if heap.len() >= opts.max_segments {
            let tol = opts.abs_tol.max(opts.rel_tol * total_value.abs());
            if total_error > 100.0 * tol {
                return Err(Error::QuadratureFailure { tol, err: total_error, evals });
            }
            break;
        }
        let seg = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval at machine resolution; accept its estimate
            total_error -= seg.error;
            total_value += 0.0;
            heap.push(Segment { error: 0.0, ..seg });
            continue;
        }
        let (v1, e1) = gk15(f, seg.a, mid);
        let (v2, e2) = gk15(f, mid, seg.b);
        evals += 30;
        total_value += v1 + v2 - seg.value;
        total_error += e1 + e2 - seg.error;
        seq += 1;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1, seq });
        seq += 1;
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2, seq });
    }
    // recompute sums for stability
    let mut value = 0.0;
    let mut error = 0.0;
    for s in heap.iter() {
        value += s.value;
        error += s.error;
    }
    Ok(Quadrature { value, error, evals })
}

/// Nested adaptive integral of `f` over the box [lo, hi]^N. Inner dimensions
/// integrate with proportionally tighter tolerances.
pub fn integrate_nd(
    f: &dyn Fn(&[f64]) -> f64,
    lo: &[f64],
    hi: &[f64],
    opts: &QuadOpts,
) -> Result<Quadrature> {
    assert_eq!(lo.len(), hi.len());
    if lo.is_empty() {
        return Ok(Quadrature { value: f(&[]), error: 0.0, evals: 1 });
    }
    nested(f, lo, hi, &[], opts)
}

fn nested(
    f: &dyn Fn(&[f64]) -> f64,
    lo: &[f64],
    hi: &[f64],
    prefix: &[f64],
    opts: &QuadOpts,
) -> Result<Quadrature> {
    let axis = prefix.len();
    let dim = lo.len();
    if axis == dim - 1 {
        let g = |x: f64| {
            let mut p = Vec::with_capacity(dim);
            p.extend_from_slice(prefix);
            p.push(x);
            f(&p)
        };
        return integrate(&g, lo[axis], hi[axis], opts);
    }
    let width = (hi[axis] - lo[axis]).abs().max(1.0);
    let inner_opts = QuadOpts {
        rel_tol: opts.rel_tol * 0.2,
        abs_tol: opts.abs_tol / (4.0 * width),
        max_segments: opts.max_segments,
    };
    let g = |x: f64| {
        let mut p = Vec::with_capacity(axis + 1);
        p.extend_from_slice(prefix);
        p.push(x);
        match nested(f, lo, hi, &p, &inner_opts) {
            Ok(q) => q.value,
            Err(_) => f64::NAN,
        }
    };
    let res = integrate(&g, lo[axis], hi[axis], opts)?;
    if res.value.is_nan() {
        return Err(Error::QuadratureFailure {
            tol: opts.abs_tol,
            err: f64::INFINITY,
            evals: res.evals,
        });
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_1d() {
        let q = integrate(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, &QuadOpts::default()).unwrap();
        assert!((q.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        // int_0^1 1/sqrt(x) = 2
        let q = integrate(&|x: f64| 1.0 / x.sqrt(), 1e-300, 1.0, &QuadOpts::with_tol(1e-10, 1e-12)).unwrap();
        assert!((q.value - 2.0).abs() < 1e-8, "got {}", q.value);
    }

    #[test]
    fn two_dim_product() {
        // int_{(0,1)^2} x y = 1/4
        let q = integrate_nd(&|p: &[f64]| p[0] * p[1], &[0.0, 0.0], &[1.0, 1.0], &QuadOpts::default()).unwrap();
        assert!((q.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn three_dim_smooth() {
        // int_{(0,1)^3} (1+|y|^2)^{-2} dy = omega_4 / 16 = pi^2/32
        let f = |p: &[f64]| {
            let r2: f64 = p.iter().map(|v| v * v).sum();
            (1.0 + r2).powf(-2.0)
        };
        let q = integrate_nd(&f, &[0.0; 3], &[1.0; 3], &QuadOpts::with_tol(1e-9, 1e-12)).unwrap();
        let target = std::f64::consts::PI.powi(2) / 32.0;
        assert!((q.value - target).abs() < 1e-8, "got {} want {}", q.value, target);
    }
}

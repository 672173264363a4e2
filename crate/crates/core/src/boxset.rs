//! Finite unions of axis-aligned open boxes (bounds may be infinite, so
//! half-spaces are included), normalized onto a coordinate grid.
//!
//! For this class the measure-theoretic quantities are combinatorial: the
//! density θ(x) is a sum of per-box corner fractions, the essential interior
//! is {θ = 1}, the essential boundary is {0 < θ < 1}, and the exterior faces
//! enumerate exactly the (N-1)-rectangles carrying the boundary.

use crate::error::{Error, Result};
use crate::lambda::LambdaSelector;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoxND {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxND {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::Invalid("box dimension mismatch".into()));
        }
        for j in 0..lo.len() {
            if !(lo[j] < hi[j]) || lo[j].is_nan() || hi[j].is_nan() {
                return Err(Error::Invalid(format!(
                    "degenerate box bounds on axis {j}: ({}, {})",
                    lo[j], hi[j]
                )));
            }
        }
        Ok(BoxND { lo, hi })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        BoxND { lo: vec![lo; dim], hi: vec![hi; dim] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.iter().chain(self.hi.iter()).all(|v| v.is_finite())
    }

    pub fn contains_open(&self, x: &[f64]) -> bool {
        x.iter()
            .enumerate()
            .all(|(j, &v)| self.lo[j] < v && v < self.hi[j])
    }

    pub fn contains_closed(&self, x: &[f64]) -> bool {
        x.iter()
            .enumerate()
            .all(|(j, &v)| self.lo[j] <= v && v <= self.hi[j])
    }

    pub fn volume(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| b - a)
            .product()
    }

    pub fn clip(&self, w: &BoxND) -> Option<BoxND> {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        for j in 0..self.dim() {
            lo[j] = lo[j].max(w.lo[j]);
            hi[j] = hi[j].min(w.hi[j]);
            if !(lo[j] < hi[j]) {
                return None;
            }
        }
        Some(BoxND { lo, hi })
    }

    /// A representative interior point (finite even for unbounded boxes).
    pub fn center(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|j| match (self.lo[j].is_finite(), self.hi[j].is_finite()) {
                (true, true) => 0.5 * (self.lo[j] + self.hi[j]),
                (true, false) => self.lo[j] + 1.0,
                (false, true) => self.hi[j] - 1.0,
                (false, false) => 0.0,
            })
            .collect()
    }
}

/// One exterior face: a rectangle on the hyperplane {x_axis = offset} with
/// the set lying on the side `inward * e_axis` (the inner normal).
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub axis: usize,
    pub offset: f64,
    /// Full-dimensional carrier with rect.lo[axis] == rect.hi[axis] == offset.
    pub rect: BoxND,
    pub inward: f64,
}

impl Face {
    pub fn area(&self) -> f64 {
        let mut a = 1.0;
        for j in 0..self.rect.lo.len() {
            if j == self.axis {
                continue;
            }
            a *= self.rect.hi[j] - self.rect.lo[j];
        }
        a
    }

    pub fn center(&self) -> Vec<f64> {
        let mut widened = self.rect.clone();
        widened.lo[self.axis] = self.offset - 1.0;
        widened.hi[self.axis] = self.offset + 1.0;
        let mut p = widened.center();
        p[self.axis] = self.offset;
        p
    }

    /// Clip the face rectangle to a window; None when disjoint.
    pub fn clip(&self, w: &BoxND) -> Option<Face> {
        let mut lo = self.rect.lo.clone();
        let mut hi = self.rect.hi.clone();
        for j in 0..lo.len() {
            if j == self.axis {
                if self.offset <= w.lo[j] || self.offset >= w.hi[j] {
                    return None;
                }
                continue;
            }
            lo[j] = lo[j].max(w.lo[j]);
            hi[j] = hi[j].min(w.hi[j]);
            if !(lo[j] < hi[j]) {
                return None;
            }
        }
        Some(Face {
            axis: self.axis,
            offset: self.offset,
            rect: BoxND { lo, hi },
            inward: self.inward,
        })
    }
}

/// Normalized union of open boxes over a shared coordinate grid.
#[derive(Debug, Clone)]
pub struct BoxSet {
    pub dim: usize,
    /// Finite cut coordinates per axis, sorted and unique.
    coords: Vec<Vec<f64>>,
    /// Occupied grid cells; index k on an axis with m cuts refers to slab
    /// (-inf, c_0) for k = 0, (c_{k-1}, c_k) for 0 < k < m, (c_{m-1}, +inf)
    /// for k = m.
    cells: BTreeSet<Vec<usize>>,
}

impl BoxSet {
    pub fn from_boxes(dim: usize, boxes: &[BoxND]) -> Result<Self> {
        let mut coords: Vec<Vec<f64>> = vec![Vec::new(); dim];
        for b in boxes {
            if b.dim() != dim {
                return Err(Error::Invalid("box dimension mismatch".into()));
            }
            for j in 0..dim {
                for v in [b.lo[j], b.hi[j]] {
                    if v.is_finite() {
                        coords[j].push(v);
                    }
                }
            }
        }
        for c in coords.iter_mut() {
            c.sort_by(|a, b| a.partial_cmp(b).unwrap());
            c.dedup();
        }
        let mut cells = BTreeSet::new();
        for b in boxes {
            let mut ranges = Vec::with_capacity(dim);
            for j in 0..dim {
                let start = if b.lo[j] == f64::NEG_INFINITY {
                    0
                } else {
                    coords[j].iter().position(|&v| v == b.lo[j]).unwrap() + 1
                };
                let end = if b.hi[j] == f64::INFINITY {
                    coords[j].len()
                } else {
                    coords[j].iter().position(|&v| v == b.hi[j]).unwrap()
                };
                ranges.push((start, end));
            }
            if ranges.iter().any(|&(s, e)| s > e) {
                continue;
            }
            let mut idx: Vec<usize> = ranges.iter().map(|r| r.0).collect();
            'fill: loop {
                cells.insert(idx.clone());
                for j in (0..dim).rev() {
                    if idx[j] < ranges[j].1 {
                        idx[j] += 1;
                        for (jj, r) in ranges.iter().enumerate().skip(j + 1) {
                            idx[jj] = r.0;
                        }
                        continue 'fill;
                    }
                }
                break;
            }
        }
        Ok(BoxSet { dim, coords, cells })
    }

    pub fn empty(dim: usize) -> Self {
        BoxSet { dim, coords: vec![Vec::new(); dim], cells: BTreeSet::new() }
    }

    pub fn single(b: BoxND) -> Result<Self> {
        BoxSet::from_boxes(b.dim(), &[b])
    }

    pub fn half_space(dim: usize, axis: usize, offset: f64, positive: bool) -> Result<Self> {
        let mut lo = vec![f64::NEG_INFINITY; dim];
        let mut hi = vec![f64::INFINITY; dim];
        if positive {
            lo[axis] = offset;
        } else {
            hi[axis] = offset;
        }
        BoxSet::single(BoxND { lo, hi })
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn slab(&self, axis: usize, k: usize) -> (f64, f64) {
        let c = &self.coords[axis];
        let lo = if k == 0 { f64::NEG_INFINITY } else { c[k - 1] };
        let hi = if k == c.len() { f64::INFINITY } else { c[k] };
        (lo, hi)
    }

    pub fn cell_boxes(&self) -> Vec<BoxND> {
        self.cells
            .iter()
            .map(|cell| {
                let mut lo = Vec::with_capacity(self.dim);
                let mut hi = Vec::with_capacity(self.dim);
                for (j, &k) in cell.iter().enumerate() {
                    let (a, b) = self.slab(j, k);
                    lo.push(a);
                    hi.push(b);
                }
                BoxND { lo, hi }
            })
            .collect()
    }

    /// Lebesgue density θ(x) ∈ [0, 1].
    pub fn density(&self, x: &[f64]) -> f64 {
        let mut cands: Vec<Vec<(usize, f64)>> = Vec::with_capacity(self.dim);
        for j in 0..self.dim {
            let c = &self.coords[j];
            let v = x[j];
            let mut list = Vec::new();
            match c.binary_search_by(|p| p.partial_cmp(&v).unwrap()) {
                Ok(i) => {
                    list.push((i, 0.5));
                    list.push((i + 1, 0.5));
                }
                Err(i) => list.push((i, 1.0)),
            }
            cands.push(list);
        }
        let mut total = 0.0;
        let mut idx = vec![0usize; self.dim];
        'walk: loop {
            let mut cell = Vec::with_capacity(self.dim);
            let mut frac = 1.0;
            for j in 0..self.dim {
                let (k, f) = cands[j][idx[j]];
                cell.push(k);
                frac *= f;
            }
            if self.cells.contains(&cell) {
                total += frac;
            }
            for j in (0..self.dim).rev() {
                if idx[j] + 1 < cands[j].len() {
                    idx[j] += 1;
                    for r in idx.iter_mut().skip(j + 1) {
                        *r = 0;
                    }
                    continue 'walk;
                }
            }
            break;
        }
        total
    }

    /// χ_E^λ(x): 1 on the essential interior, λ(x) on the essential boundary,
    /// 0 outside.
    pub fn chi_lambda(&self, x: &[f64], lam: &LambdaSelector) -> f64 {
        let th = self.density(x);
        if th >= 1.0 {
            1.0
        } else if th <= 0.0 {
            0.0
        } else {
            lam.eval(x)
        }
    }

    /// Exterior faces (finite offsets only; there are no faces at infinity).
    pub fn faces(&self) -> Vec<Face> {
        let mut out = Vec::new();
        for cell in &self.cells {
            for j in 0..self.dim {
                for (delta, inward) in [(-1isize, 1.0), (1isize, -1.0)] {
                    let k = cell[j] as isize + delta;
                    if k < 0 || k as usize > self.coords[j].len() {
                        continue;
                    }
                    let mut nb = cell.clone();
                    nb[j] = k as usize;
                    if self.cells.contains(&nb) {
                        continue;
                    }
                    let cut_index = if delta == -1 {
                        cell[j] as isize - 1
                    } else {
                        cell[j] as isize
                    };
                    if cut_index < 0 || cut_index as usize >= self.coords[j].len() {
                        continue;
                    }
                    let offset = self.coords[j][cut_index as usize];
                    let mut lo = Vec::with_capacity(self.dim);
                    let mut hi = Vec::with_capacity(self.dim);
                    for (jj, &kk) in cell.iter().enumerate() {
                        if jj == j {
                            lo.push(offset);
                            hi.push(offset);
                        } else {
                            let (a, b) = self.slab(jj, kk);
                            lo.push(a);
                            hi.push(b);
                        }
                    }
                    out.push(Face { axis: j, offset, rect: BoxND { lo, hi }, inward });
                }
            }
        }
        out
    }

    /// Complement within ℝ^N on the same grid.
    pub fn complement(&self) -> BoxSet {
        let mut cells = BTreeSet::new();
        let sizes: Vec<usize> = (0..self.dim).map(|j| self.coords[j].len() + 1).collect();
        let mut idx = vec![0usize; self.dim];
        'walk: loop {
            if !self.cells.contains(&idx) {
                cells.insert(idx.clone());
            }
            for j in (0..self.dim).rev() {
                if idx[j] + 1 < sizes[j] {
                    idx[j] += 1;
                    for r in idx.iter_mut().skip(j + 1) {
                        *r = 0;
                    }
                    continue 'walk;
                }
            }
            break;
        }
        BoxSet { dim: self.dim, coords: self.coords.clone(), cells }
    }

    pub fn union(&self, other: &BoxSet) -> Result<BoxSet> {
        let mut boxes = self.cell_boxes();
        boxes.extend(other.cell_boxes());
        BoxSet::from_boxes(self.dim, &boxes)
    }

    /// Clip to a window box.
    pub fn intersect_window(&self, w: &BoxND) -> Result<BoxSet> {
        let boxes: Vec<BoxND> = self.cell_boxes().iter().filter_map(|b| b.clip(w)).collect();
        BoxSet::from_boxes(self.dim, &boxes)
    }

    /// L^N volume; infinite for unbounded sets.
    pub fn volume(&self) -> f64 {
        self.cell_boxes().iter().map(|b| b.volume()).sum()
    }

    /// True when the closure of the set lies inside the open window.
    pub fn compactly_inside(&self, w: &BoxND) -> bool {
        self.cell_boxes().iter().all(|b| {
            b.is_bounded() && (0..self.dim).all(|j| b.lo[j] > w.lo[j] && b.hi[j] < w.hi[j])
        })
    }

    /// Does L^N(self ∩ other) = 0 hold?
    pub fn volume_disjoint(&self, other: &BoxSet) -> Result<bool> {
        let mut boxes = self.cell_boxes();
        boxes.extend(other.cell_boxes());
        let merged = BoxSet::from_boxes(self.dim, &boxes)?;
        for cell in merged.cell_boxes() {
            let c = cell.center();
            if self.density(&c) == 1.0 && other.density(&c) == 1.0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Grid coordinates along an axis between lo and hi, for piecewise
    /// classification of χ_E^λ along axis-parallel lines.
    pub fn cuts_on_axis(&self, axis: usize, lo: f64, hi: f64) -> Vec<f64> {
        self.coords[axis]
            .iter()
            .cloned()
            .filter(|&c| c > lo && c < hi)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> BoxSet {
        BoxSet::single(BoxND::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()).unwrap()
    }

    #[test]
    fn density_values() {
        let e = unit_square();
        assert_eq!(e.density(&[0.5, 0.5]), 1.0);
        assert_eq!(e.density(&[0.0, 0.5]), 0.5);
        assert_eq!(e.density(&[0.0, 0.0]), 0.25);
        assert_eq!(e.density(&[-0.5, 0.5]), 0.0);
    }

    #[test]
    fn faces_of_square() {
        let e = unit_square();
        let faces = e.faces();
        assert_eq!(faces.len(), 4);
        let left = faces.iter().find(|f| f.axis == 0 && f.offset == 0.0).unwrap();
        assert_eq!(left.inward, 1.0);
        assert_eq!(left.area(), 1.0);
    }

    #[test]
    fn shared_face_is_interior() {
        let b1 = BoxND::new(vec![-1.0, 0.0], vec![0.0, 1.0]).unwrap();
        let b2 = BoxND::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let e = BoxSet::from_boxes(2, &[b1, b2]).unwrap();
        assert_eq!(e.density(&[0.0, 0.5]), 1.0);
        assert!(e.faces().iter().all(|f| !(f.axis == 0 && f.offset == 0.0)));
        assert_eq!(e.faces().len(), 6);
    }

    #[test]
    fn complement_faces_match() {
        let e = unit_square();
        let c = e.complement();
        assert_eq!(c.density(&[0.5, 0.5]), 0.0);
        assert_eq!(c.density(&[2.0, 0.5]), 1.0);
        let mut ef: Vec<(usize, f64)> = e.faces().iter().map(|f| (f.axis, f.offset)).collect();
        let mut cf: Vec<(usize, f64)> = c.faces().iter().map(|f| (f.axis, f.offset)).collect();
        ef.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cf.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(ef, cf);
        for f in c.faces() {
            let twin = e
                .faces()
                .into_iter()
                .find(|g| g.axis == f.axis && g.offset == f.offset)
                .unwrap();
            assert_eq!(f.inward, -twin.inward);
        }
    }

    #[test]
    fn corner_touching_disjoint() {
        let b1 = BoxND::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let b2 = BoxND::new(vec![-1.0, -1.0], vec![0.0, 0.0]).unwrap();
        let e = BoxSet::from_boxes(2, &[b1.clone(), b2.clone()]).unwrap();
        assert_eq!(e.density(&[0.0, 0.0]), 0.5);
        let s1 = BoxSet::single(b1).unwrap();
        let s2 = BoxSet::single(b2).unwrap();
        assert!(s1.volume_disjoint(&s2).unwrap());
    }

    #[test]
    fn window_clip() {
        let e = BoxSet::half_space(2, 0, 0.0, true).unwrap();
        let w = BoxND::cube(2, -1.0, 1.0);
        let clipped = e.intersect_window(&w).unwrap();
        assert_eq!(clipped.volume(), 2.0);
    }
}

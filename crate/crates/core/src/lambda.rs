//! Borel selector λ: Ω → [0,1] represented as piecewise-constant box regions
//! plus finitely many point overrides. Overrides win at their exact points,
//! then the first matching region, then the default.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LambdaSelector {
    /// (box lo, box hi, value); a point x matches when lo_j <= x_j <= hi_j.
    pub regions: Vec<(Vec<f64>, Vec<f64>, f64)>,
    pub overrides: Vec<(Vec<f64>, f64)>,
    pub default: f64,
}

impl LambdaSelector {
    pub fn constant(value: f64) -> Result<Self> {
        check_unit(value)?;
        Ok(LambdaSelector { regions: vec![], overrides: vec![], default: value })
    }

    pub fn with_region(mut self, lo: Vec<f64>, hi: Vec<f64>, value: f64) -> Result<Self> {
        check_unit(value)?;
        self.regions.push((lo, hi, value));
        Ok(self)
    }

    pub fn with_override(mut self, point: Vec<f64>, value: f64) -> Result<Self> {
        check_unit(value)?;
        self.overrides.retain(|(p, _)| p != &point);
        self.overrides.push((point, value));
        Ok(self)
    }

    /// Convenience for the 1D engine.
    pub fn with_override_1d(self, x: f64, value: f64) -> Result<Self> {
        self.with_override(vec![x], value)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        for (p, v) in &self.overrides {
            if p.len() == x.len() && p.iter().zip(x).all(|(a, b)| a == b) {
                return *v;
            }
        }
        for (lo, hi, v) in &self.regions {
            if lo.len() == x.len()
                && lo.iter().zip(x).all(|(a, b)| a <= b)
                && hi.iter().zip(x).all(|(a, b)| a >= b)
            {
                return *v;
            }
        }
        self.default
    }

    pub fn eval1(&self, x: f64) -> f64 {
        self.eval(&[x])
    }

    /// The selector 1 - λ, preserving structure.
    pub fn complementary(&self) -> Self {
        LambdaSelector {
            regions: self
                .regions
                .iter()
                .map(|(lo, hi, v)| (lo.clone(), hi.clone(), 1.0 - v))
                .collect(),
            overrides: self.overrides.iter().map(|(p, v)| (p.clone(), 1.0 - v)).collect(),
            default: 1.0 - self.default,
        }
    }
}

fn check_unit(v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Invalid(format!("lambda value {v} outside [0,1]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_beats_region_beats_default() {
        let lam = LambdaSelector::constant(0.5)
            .unwrap()
            .with_region(vec![0.0], vec![1.0], 0.25)
            .unwrap()
            .with_override(vec![0.5], 0.75)
            .unwrap();
        assert_eq!(lam.eval1(0.5), 0.75);
        assert_eq!(lam.eval1(0.25), 0.25);
        assert_eq!(lam.eval1(-3.0), 0.5);
    }
}

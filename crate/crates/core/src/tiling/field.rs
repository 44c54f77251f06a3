use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{CVector, C64};

/// Per-triangle constant values in `ℂ^k`; zero on the tiling skeleton.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseConstantField {
    k: usize,
    values: Vec<CVector>,
}

impl PiecewiseConstantField {
    pub fn new(k: usize, values: Vec<CVector>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Config("field dimension k must be positive".into()));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| v.len() != k) {
            return Err(Error::Config(format!(
                "triangle {i} carries {} components, expected {k}",
                v.len()
            )));
        }
        Ok(Self { k, values })
    }

    pub fn zeros(k: usize, triangles: usize) -> Self {
        Self {
            k,
            values: vec![CVector::zeros(k); triangles],
        }
    }

    /// Uniform values in `[−amplitude, amplitude]` (real and, if `complex`,
    /// imaginary parts) from a seeded generator.
    pub fn random(k: usize, triangles: usize, amplitude: f64, complex: bool, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..triangles)
            .map(|_| {
                CVector::from_fn(k, |_, _| {
                    let re = rng.gen_range(-amplitude..=amplitude);
                    let im = if complex {
                        rng.gen_range(-amplitude..=amplitude)
                    } else {
                        0.0
                    };
                    C64::new(re, im)
                })
            })
            .collect();
        Self { k, values }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, tri: usize) -> &CVector {
        &self.values[tri]
    }

    pub fn values(&self) -> &[CVector] {
        &self.values
    }

    pub fn set(&mut self, tri: usize, value: CVector) {
        assert_eq!(value.len(), self.k);
        self.values[tri] = value;
    }

    /// Keeps the values on `support` and zeroes the rest.
    pub fn restricted_to(&self, support: &[usize]) -> Self {
        let mut out = Self::zeros(self.k, self.values.len());
        for &t in support {
            out.values[t] = self.values[t].clone();
        }
        out
    }

    /// `a·self + b·other`
    pub fn combine(&self, a: C64, other: &Self, b: C64) -> Self {
        assert_eq!(self.k, other.k);
        Self {
            k: self.k,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x * a + y * b)
                .collect(),
        }
    }

    /// Largest `‖self_i − other_i‖ / max(‖other_i‖, floor)` over triangles.
    pub fn max_relative_error(&self, truth: &Self, floor: f64) -> f64 {
        self.values
            .iter()
            .zip(&truth.values)
            .map(|(a, b)| (a - b).norm() / b.norm().max(floor))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_fields_are_seeded() {
        let a = PiecewiseConstantField::random(2, 5, 1.0, true, 3);
        let b = PiecewiseConstantField::random(2, 5, 1.0, true, 3);
        let c = PiecewiseConstantField::random(2, 5, 1.0, true, 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a
            .values()
            .iter()
            .flatten()
            .all(|z| z.re.abs() <= 1.0 && z.im.abs() <= 1.0));
        let r = PiecewiseConstantField::random(1, 4, 1.0, false, 1);
        assert!(r.values().iter().flatten().all(|z| z.im == 0.0));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        assert!(PiecewiseConstantField::new(2, vec![CVector::zeros(3)]).is_err());
        assert!(PiecewiseConstantField::new(0, vec![]).is_err());
    }
}

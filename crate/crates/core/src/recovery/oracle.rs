use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{GeodesicPath, MetricField};
use crate::linalg::{CVector, C64};
use crate::tiling::{PiecewiseConstantField, ValidTiling};
use crate::transform::forward;
use crate::weight::WeightField;

use super::plan::ChordDescriptor;

/// Angular tolerance for matching a requested chord against recorded rows.
pub const DESCRIPTOR_TOL: f64 = 1e-9;

/// Additive complex Gaussian noise with standard deviation `sigma` per
/// real and imaginary part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Noise {
    pub sigma: f64,
    pub seed: u64,
}

/// Where the reconstruction gets `I_W f(γ)` from.
#[derive(Clone, Debug)]
pub enum DataOracle {
    /// Runs the forward transform of `field` on demand.
    Synthetic {
        weight: WeightField,
        field: PiecewiseConstantField,
        noise: Option<Noise>,
    },
    /// Measured rows; chords without a row are unavailable.
    Recorded(Vec<(ChordDescriptor, CVector)>),
}

impl DataOracle {
    pub fn synthetic(weight: WeightField, field: PiecewiseConstantField) -> Self {
        DataOracle::Synthetic {
            weight,
            field,
            noise: None,
        }
    }

    /// Data for each traced chord, `None` where the oracle has no value.
    pub fn query(
        &self,
        metric: &MetricField,
        tiling: &ValidTiling,
        chords: &[(ChordDescriptor, &GeodesicPath)],
    ) -> Result<Vec<Option<CVector>>> {
        match self {
            DataOracle::Synthetic {
                weight,
                field,
                noise,
            } => {
                let mut out = chords
                    .par_iter()
                    .map(|(_, path)| forward(metric, weight, tiling, field, path))
                    .collect::<Result<Vec<_>>>()?;
                if let Some(n) = noise {
                    let dist = Normal::new(0.0, n.sigma)
                        .map_err(|e| Error::Config(format!("noise: {e}")))?;
                    let mut rng = ChaCha8Rng::seed_from_u64(n.seed);
                    for y in &mut out {
                        for z in y.iter_mut() {
                            *z += C64::new(dist.sample(&mut rng), dist.sample(&mut rng));
                        }
                    }
                }
                Ok(out.into_iter().map(Some).collect())
            }
            DataOracle::Recorded(rows) => Ok(chords
                .iter()
                .map(|(c, _)| {
                    rows.iter()
                        .find(|(d, _)| d.matches(c, DESCRIPTOR_TOL))
                        .map(|(_, y)| y.clone())
                })
                .collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::Tiling;

    #[test]
    fn recorded_rows_match_by_descriptor() {
        let m = MetricField::euclidean();
        let t = Tiling::polygon_fan(6, 0.0).unwrap().validated().unwrap();
        let f = PiecewiseConstantField::random(1, 6, 1.0, true, 2);
        let a = ChordDescriptor::from_offset(0.3, 0.2);
        let b = ChordDescriptor::from_offset(1.3, -0.2);
        let pa = a.trace(&m, 1e-2).unwrap();
        let pb = b.trace(&m, 1e-2).unwrap();
        let synth = DataOracle::synthetic(WeightField::identity(1), f);
        let ys = synth.query(&m, &t, &[(a, &pa), (b, &pb)]).unwrap();
        let rec = DataOracle::Recorded(vec![(a, ys[0].clone().unwrap())]);
        let got = rec.query(&m, &t, &[(a, &pa), (b, &pb)]).unwrap();
        assert_eq!(got[0], ys[0]);
        assert_eq!(got[1], None);
    }

    #[test]
    fn noise_is_seeded() {
        let m = MetricField::euclidean();
        let t = Tiling::polygon_fan(6, 0.0).unwrap().validated().unwrap();
        let f = PiecewiseConstantField::zeros(1, 6);
        let a = ChordDescriptor::from_offset(0.3, 0.2);
        let pa = a.trace(&m, 1e-2).unwrap();
        let noisy = |seed| DataOracle::Synthetic {
            weight: WeightField::identity(1),
            field: f.clone(),
            noise: Some(Noise { sigma: 0.1, seed }),
        };
        let x = noisy(1).query(&m, &t, &[(a, &pa)]).unwrap();
        let y = noisy(1).query(&m, &t, &[(a, &pa)]).unwrap();
        let z = noisy(2).query(&m, &t, &[(a, &pa)]).unwrap();
        assert_eq!(x, y);
        assert_ne!(x, z);
        assert!(x[0].as_ref().unwrap()[0].norm() > 0.0);
    }
}

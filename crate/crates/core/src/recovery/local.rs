use crate::error::{Error, Result};
use crate::geometry::{MetricField, UnitTangent};
use crate::linalg::{least_squares, singular_values, CMatrix, CVector, Point, C64};
use crate::transform::sector_chord_length;
use crate::weight::WeightField;

/// Condition number above which a stacked system is refused.
pub const CONDITION_LIMIT: f64 = 1e8;

/// Relative size of `σ_min(W)` below which the weight counts as non-injective.
pub const INJECTIVITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct LocalRecovery {
    /// One value in `ℂ^k` per sector, in input order.
    pub values: Vec<CVector>,
    pub condition: f64,
    pub residual: f64,
}

/// `W(x, v^⊥)` for `v` at frame angle `beta`: the frozen weight seen by the
/// tangent line of direction `beta`.
pub fn frozen_weight(
    metric: &MetricField,
    weight: &WeightField,
    x: Point,
    beta: f64,
) -> Result<CMatrix> {
    let v = metric.unit_from_angle(&x, beta);
    let perp = UnitTangent::new(metric, x, metric.quarter_turn(&x, &v))?;
    weight.evaluate(metric, &perp)
}

/// Recovers the sector values of a tangent function from limit data.
///
/// Each sample `(β, y)` contributes the equations
/// `y = W(β) Σ_i ℓ_i(β) c_i` where `ℓ_i(β)` is the length of the tangent
/// line of direction `β` inside sector `i`. The stacked system is solved by
/// least squares.
pub fn recover_fan_values<F>(
    weight_at: F,
    sectors: &[(f64, f64)],
    samples: &[(f64, CVector)],
) -> Result<LocalRecovery>
where
    F: Fn(f64) -> Result<CMatrix>,
{
    if sectors.is_empty() || samples.is_empty() {
        return Err(Error::IllPosedSampling(
            "need at least one sector and one sample".into(),
        ));
    }
    let weights = samples
        .iter()
        .map(|(beta, _)| weight_at(*beta))
        .collect::<Result<Vec<_>>>()?;
    let (m, k) = weights[0].shape();
    if weights.iter().any(|w| w.shape() != (m, k)) {
        return Err(Error::Config("weight changes shape between samples".into()));
    }
    let mut margin = f64::INFINITY;
    let mut scale = 0.0_f64;
    for w in &weights {
        let s = singular_values(w);
        scale = scale.max(s.first().copied().unwrap_or(0.0));
        margin = margin.min(if m < k {
            0.0
        } else {
            s.last().copied().unwrap_or(0.0)
        });
    }
    if margin <= INJECTIVITY_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NonInjectiveWeight { margin });
    }
    let rows = samples.len() * m;
    let cols = sectors.len() * k;
    if rows < cols {
        return Err(Error::IllPosedSampling(format!(
            "{} samples × {m} channels cannot determine {} sectors × {k} values",
            samples.len(),
            sectors.len()
        )));
    }
    let mut a = CMatrix::zeros(rows, cols);
    let mut b = CVector::zeros(rows);
    for (j, ((beta, y), w)) in samples.iter().zip(&weights).enumerate() {
        if y.len() != m {
            return Err(Error::Config(format!(
                "sample {j} has {} components, expected {m}",
                y.len()
            )));
        }
        for (i, &(start, end)) in sectors.iter().enumerate() {
            let len = sector_chord_length(start, end, *beta)?;
            a.view_mut((j * m, i * k), (m, k))
                .copy_from(&(w * C64::new(len, 0.0)));
        }
        b.rows_mut(j * m, m).copy_from(y);
    }
    let ls = least_squares(&a, &b);
    if !(ls.condition <= CONDITION_LIMIT) {
        return Err(Error::IllPosedSampling(format!(
            "condition number {:e} exceeds {CONDITION_LIMIT:e}",
            ls.condition
        )));
    }
    let values = (0..sectors.len())
        .map(|i| ls.solution.rows(i * k, k).into_owned())
        .collect();
    Ok(LocalRecovery {
        values,
        condition: ls.condition,
        residual: ls.residual.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_matrix;
    use crate::tiling::{Sector, SectorFan};
    use crate::transform::tangent_line_integral;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    fn synthetic(
        w: &CMatrix,
        sectors: &[(f64, f64)],
        values: &[CVector],
        betas: &[f64],
    ) -> Vec<(f64, CVector)> {
        let fan = SectorFan::new(
            Point::new(1.0, 0.0),
            values[0].len(),
            sectors
                .iter()
                .zip(values)
                .map(|(&(start, end), v)| Sector {
                    start,
                    end,
                    value: v.clone(),
                })
                .collect(),
        )
        .unwrap();
        betas
            .iter()
            .map(|&b| (b, w * tangent_line_integral(&fan, b).unwrap()))
            .collect()
    }

    #[test]
    fn single_sector_identity() {
        let sectors = [(deg(170.0), deg(190.0))];
        let c = CVector::from_element(1, C64::new(2.5, -1.0));
        let w = CMatrix::identity(1, 1);
        let samples = synthetic(&w, &sectors, &[c.clone()], &[deg(180.0)]);
        let rec = recover_fan_values(|_| Ok(w.clone()), &sectors, &samples).unwrap();
        assert_abs_diff_eq!((&rec.values[0] - &c).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn three_sectors_round_trip() {
        let sectors = [
            (deg(150.0), deg(170.0)),
            (deg(170.0), deg(190.0)),
            (deg(190.0), deg(210.0)),
        ];
        let values: Vec<CVector> = [0.3, -1.2, 0.8]
            .iter()
            .map(|&v| CVector::from_element(1, C64::new(v, 0.0)))
            .collect();
        let betas: Vec<f64> = (0..9).map(|j| deg(160.0 + 5.0 * j as f64)).collect();
        let w = CMatrix::identity(1, 1);
        let samples = synthetic(&w, &sectors, &values, &betas);
        let rec = recover_fan_values(|_| Ok(w.clone()), &sectors, &samples).unwrap();
        for (got, want) in rec.values.iter().zip(&values) {
            assert_abs_diff_eq!((got - want).norm(), 0.0, epsilon = 1e-10);
        }
        assert!(rec.residual < 1e-12);
    }

    #[test]
    fn overdetermined_complex_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sectors = [
            (deg(155.0), deg(172.0)),
            (deg(172.0), deg(183.0)),
            (deg(183.0), deg(207.0)),
        ];
        let values: Vec<CVector> = (0..3)
            .map(|_| {
                CVector::from_fn(2, |_, _| {
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                })
            })
            .collect();
        let w = real_matrix(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let betas: Vec<f64> = (0..12).map(|j| deg(152.0 + 5.0 * j as f64)).collect();
        let samples = synthetic(&w, &sectors, &values, &betas);
        let rec = recover_fan_values(|_| Ok(w.clone()), &sectors, &samples).unwrap();
        for (got, want) in rec.values.iter().zip(&values) {
            assert_abs_diff_eq!((got - want).norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn rank_deficient_weight_is_refused() {
        let sectors = [(deg(160.0), deg(200.0))];
        let w = real_matrix(3, 2, &[1.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let samples: Vec<_> = (0..4)
            .map(|j| (deg(170.0 + 5.0 * j as f64), CVector::zeros(3)))
            .collect();
        let err = recover_fan_values(|_| Ok(w.clone()), &sectors, &samples).unwrap_err();
        assert!(matches!(err, Error::NonInjectiveWeight { .. }));
    }

    #[test]
    fn too_few_samples_are_refused() {
        let sectors = [(deg(150.0), deg(180.0)), (deg(180.0), deg(210.0))];
        let w = CMatrix::identity(1, 1);
        let samples = vec![(deg(180.0), CVector::zeros(1))];
        let err = recover_fan_values(|_| Ok(w.clone()), &sectors, &samples).unwrap_err();
        assert!(matches!(err, Error::IllPosedSampling(_)));
    }

    #[test]
    fn repeated_directions_are_ill_posed() {
        let sectors = [(deg(150.0), deg(180.0)), (deg(180.0), deg(210.0))];
        let w = CMatrix::identity(1, 1);
        let samples = vec![
            (deg(175.0), CVector::zeros(1)),
            (deg(175.0), CVector::zeros(1)),
        ];
        let err = recover_fan_values(|_| Ok(w.clone()), &sectors, &samples).unwrap_err();
        assert!(matches!(err, Error::IllPosedSampling(_)));
    }

    #[test]
    fn frozen_weight_uses_rotated_direction() {
        let m = MetricField::euclidean();
        let w = WeightField::Angular {
            k: 1,
            order: 1.0,
            amplitude: 0.5,
            spatial: 0.0,
        };
        let x = Point::new(1.0, 0.0);
        let got = frozen_weight(&m, &w, x, deg(180.0)).unwrap();
        // v at 180° turns into v^⊥ at 270°
        let expect = C64::new(1.0, 0.0) + C64::from_polar(0.5, deg(270.0) - deg(360.0));
        assert_abs_diff_eq!((got[(0, 0)] - expect).norm(), 0.0, epsilon = 1e-12);
    }
}

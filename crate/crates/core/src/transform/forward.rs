use crate::error::{Error, Result};
use crate::geometry::{GeodesicPath, MetricField};
use crate::linalg::{CMatrix, CVector};
use crate::tiling::{clip_path, PiecewiseConstantField, ValidTiling};
use crate::weight::WeightField;

/// `∫_{γ ∩ Δ} W dt` for one triangle `Δ` met by a geodesic.
#[derive(Clone, Debug)]
pub struct TriangleBlock {
    pub triangle: usize,
    /// Total arclength inside the open triangle.
    pub length: f64,
    pub matrix: CMatrix,
}

/// Per-triangle weight integrals along `path`, in order of first contact.
///
/// Skeleton and outside runs carry no value and are skipped.
pub fn triangle_blocks(
    metric: &MetricField,
    weight: &WeightField,
    tiling: &ValidTiling,
    path: &GeodesicPath,
) -> Vec<TriangleBlock> {
    let clip = clip_path(tiling, path);
    let profile = weight.profile(metric, path);
    let mut blocks: Vec<TriangleBlock> = Vec::new();
    for (tri, iv) in clip.triangle_intervals() {
        let m = profile.integrate(iv.t0, iv.t1);
        match blocks.iter_mut().find(|b| b.triangle == tri) {
            Some(b) => {
                b.matrix += m;
                b.length += iv.length();
            }
            None => blocks.push(TriangleBlock {
                triangle: tri,
                length: iv.length(),
                matrix: m,
            }),
        }
    }
    blocks
}

/// `I_W f(γ) = ∫_0^τ W(γ(t), γ̇(t)) f(γ(t)) dt ∈ ℂ^m`.
pub fn forward(
    metric: &MetricField,
    weight: &WeightField,
    tiling: &ValidTiling,
    field: &PiecewiseConstantField,
    path: &GeodesicPath,
) -> Result<CVector> {
    let (k, m) = weight.dims();
    if field.k() != k {
        return Err(Error::Config(format!(
            "field has k = {} but the weight acts on ℂ^{k}",
            field.k()
        )));
    }
    if field.len() != tiling.len() {
        return Err(Error::Config(format!(
            "field has {} values for {} triangles",
            field.len(),
            tiling.len()
        )));
    }
    let mut out = CVector::zeros(m);
    for b in triangle_blocks(metric, weight, tiling, path) {
        let c = field.value(b.triangle);
        if c.iter().all(|z| z.norm_sqr() == 0.0) {
            continue;
        }
        out += &b.matrix * c;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{real_matrix, Point, C64};
    use crate::test_support::{chord, segment_triangle_length};
    use crate::tiling::Tiling;
    use crate::weight::AttenuationCoefficient;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn scalar_field(values: &[f64]) -> PiecewiseConstantField {
        let v = values
            .iter()
            .map(|&c| CVector::from_element(1, C64::new(c, 0.0)))
            .collect();
        PiecewiseConstantField::new(1, v).unwrap()
    }

    #[test]
    fn zero_field_gives_zero_data() {
        let t = Tiling::polygon_fan(6, 0.0).unwrap().validated().unwrap();
        let m = MetricField::conformal_radial(0.05);
        let w = WeightField::constant(real_matrix(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]));
        let f = PiecewiseConstantField::zeros(2, 6);
        for i in 0..5 {
            let path = chord(&m, 0.4 + i as f64, 0.2, 1e-2);
            let out = forward(&m, &w, &t, &f, &path).unwrap();
            assert_eq!(out.len(), 3);
            assert!(out.iter().all(|z| *z == C64::new(0.0, 0.0)));
        }
    }

    #[test]
    fn identity_weight_matches_clipped_lengths() {
        let t = Tiling::polygon_fan(5, 0.3).unwrap().validated().unwrap();
        let m = MetricField::euclidean();
        let c = 1.7;
        let mut values = vec![0.0; 5];
        values[2] = c;
        let f = scalar_field(&values);
        let w = WeightField::identity(1);
        for i in 0..10 {
            let path = chord(&m, 0.25 + 0.61 * i as f64, -1.0 + 0.2 * i as f64, 1e-2);
            let p = path.start().x;
            let d = path.start().v;
            let expected = c * segment_triangle_length(p, d, -2.0 * p.dot(&d), t.corners(2));
            let got = forward(&m, &w, &t, &f, &path).unwrap()[0];
            assert_abs_diff_eq!(got.re, expected, epsilon = 1e-8);
            assert_eq!(got.im, 0.0);
        }
    }

    #[test]
    fn constant_attenuation_along_square_diameter() {
        let v = vec![
            Point::new(-1.0, 0.0),
            Point::new(0.0, -1.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ];
        let t = Tiling::new(v, vec![[0, 1, 3], [2, 3, 1]])
            .unwrap()
            .validated()
            .unwrap();
        let m = MetricField::euclidean();
        let (a, c) = (0.8, 1.3);
        let w = WeightField::Attenuation {
            coefficient: AttenuationCoefficient::Constant(a),
        };
        let f = scalar_field(&[c, c]);
        let path = chord(&m, std::f64::consts::PI, 0.0, 1e-3);
        let got = forward(&m, &w, &t, &f, &path).unwrap()[0].re;
        assert_abs_diff_eq!(got, c * (1.0 - (-2.0 * a).exp()) / a, epsilon = 1e-6);
    }

    #[test]
    fn constant_attenuation_across_hexagon() {
        let t = Tiling::polygon_fan(6, 0.0).unwrap().validated().unwrap();
        let m = MetricField::euclidean();
        let (a, c) = (1.5, -0.6);
        let w = WeightField::Attenuation {
            coefficient: AttenuationCoefficient::Constant(a),
        };
        let f = scalar_field(&[c; 6]);
        // enters through the midpoint direction of a rim edge, at apothem cos 30°
        let path = chord(&m, std::f64::consts::FRAC_PI_6, 0.0, 1e-3);
        let apothem = std::f64::consts::FRAC_PI_6.cos();
        let (t1, t2, tau) = (1.0 - apothem, 1.0 + apothem, 2.0);
        let expected = c * ((-a * (tau - t2)).exp() - (-a * (tau - t1)).exp()) / a;
        let got = forward(&m, &w, &t, &f, &path).unwrap()[0].re;
        assert_abs_diff_eq!(got, expected, epsilon = 1e-6);
    }

    #[test]
    fn identity_weight_acts_componentwise() {
        let t = Tiling::polygon_fan(6, 0.2)
            .unwrap()
            .refine()
            .unwrap()
            .validated()
            .unwrap();
        let m = MetricField::conformal_radial(0.05);
        let f = PiecewiseConstantField::random(2, t.len(), 1.0, true, 11);
        let path = chord(&m, 1.1, 0.35, 1e-2);
        let both = forward(&m, &WeightField::identity(2), &t, &f, &path).unwrap();
        for comp in 0..2 {
            let single = PiecewiseConstantField::new(
                1,
                f.values()
                    .iter()
                    .map(|v| CVector::from_element(1, v[comp]))
                    .collect(),
            )
            .unwrap();
            let one = forward(&m, &WeightField::identity(1), &t, &single, &path).unwrap();
            assert_abs_diff_eq!((one[0] - both[comp]).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let t = Tiling::polygon_fan(4, 0.0).unwrap().validated().unwrap();
        let m = MetricField::euclidean();
        let path = chord(&m, 0.3, 0.1, 1e-2);
        let f = PiecewiseConstantField::zeros(2, 4);
        assert!(forward(&m, &WeightField::identity(1), &t, &f, &path).is_err());
        let short = PiecewiseConstantField::zeros(1, 3);
        assert!(forward(&m, &WeightField::identity(1), &t, &short, &path).is_err());
    }

    #[test]
    fn quadrature_converges_at_second_order() {
        let t = Tiling::polygon_fan(6, 0.1)
            .unwrap()
            .refine()
            .unwrap()
            .validated()
            .unwrap();
        let m = MetricField::conformal_radial(0.05);
        let w = WeightField::Angular {
            k: 2,
            order: 3.0,
            amplitude: 0.4,
            spatial: 2.0,
        };
        let f = PiecewiseConstantField::random(2, t.len(), 1.0, true, 5);
        let at = |s: f64| forward(&m, &w, &t, &f, &chord(&m, 0.7, -0.4, s)).unwrap();
        let (a, b, c) = (at(0.04), at(0.02), at(0.01));
        let (d1, d2) = ((&a - &b).norm(), (&b - &c).norm());
        assert!(d1 <= 1.0 * 0.04 * 0.04, "{d1}");
        assert!(d1 / d2 > 3.0, "{d1} / {d2}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn forward_is_linear(
            seed in 0u64..1000,
            angle in 0.0f64..std::f64::consts::TAU,
            offset in -1.3f64..1.3,
            ar in -2.0f64..2.0, ai in -2.0f64..2.0,
            br in -2.0f64..2.0, bi in -2.0f64..2.0,
        ) {
            let t = Tiling::polygon_fan(6, 0.0).unwrap().refine().unwrap().validated().unwrap();
            let m = MetricField::conformal_radial(0.05);
            let w = WeightField::Angular { k: 2, order: 1.0, amplitude: 0.3, spatial: 1.0 };
            let f = PiecewiseConstantField::random(2, t.len(), 1.0, true, seed);
            let g = PiecewiseConstantField::random(2, t.len(), 1.0, true, seed + 7919);
            let (a, b) = (C64::new(ar, ai), C64::new(br, bi));
            let path = chord(&m, angle, offset, 2e-2);
            let lhs = forward(&m, &w, &t, &f.combine(a, &g, b), &path).unwrap();
            let rhs = forward(&m, &w, &t, &f, &path).unwrap() * a
                + forward(&m, &w, &t, &g, &path).unwrap() * b;
            let scale = lhs.norm().max(rhs.norm()).max(1e-300);
            prop_assert!((lhs - rhs).norm() <= 1e-10 * scale + 1e-15);
        }
    }
}

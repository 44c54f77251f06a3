use std::path::Path;

use mwxray::recovery::{
    assemble_operator, frozen_weight, reconstruct, recover_fan_values, singular_spectrum,
    spectral_ratio, trace_plan, DataOracle,
};
use mwxray::{
    fan_geodesic, forward as forward_transform, frozen_limit, scaled_fan_integral, tangent_fan,
    CVector, SectorFan,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;
use crate::output::{complex_cells, complex_headers, fmt_f64, read_data, write_atomic, Table};
use crate::scene::Scene;

/// `I_W f` on every geodesic of the plan.
pub fn forward(scene: &Scene) -> Result<String, CliError> {
    let field = scene.require_field()?;
    let plan = scene.plan()?;
    let paths = trace_plan(&scene.metric, &plan, scene.step)?;
    let values = paths
        .par_iter()
        .map(|p| forward_transform(&scene.metric, &scene.weight, &scene.tiling, field, p))
        .collect::<mwxray::Result<Vec<_>>>()?;
    let m = scene.weight.dims().1;
    let mut header = vec!["boundary_angle".to_string(), "direction_angle".to_string()];
    header.extend(complex_headers("", m));
    let mut table = Table::new(&header)?;
    for (c, y) in plan.iter().zip(&values) {
        let mut row = vec![fmt_f64(c.boundary_angle), fmt_f64(c.direction_angle)];
        row.extend(complex_cells(y));
        table.row(&row)?;
    }
    let path = table.write(&scene.output_dir, "forward.csv")?;
    Ok(format!("{} geodesics -> {}", plan.len(), path.display()))
}

struct Anchor {
    x: mwxray::Point,
    normal_angle: f64,
}

fn boundary_anchor(scene: &Scene, vertex: usize) -> Result<Anchor, CliError> {
    let x = scene.tiling.vertices()[vertex];
    if (x.norm() - 1.0).abs() > 1e-9 {
        return Err(scene.error(
            "[fan]",
            format!(
                "vertex {vertex} at ({}, {}) is not on the boundary circle",
                x[0], x[1]
            ),
        ));
    }
    let nu = scene.metric.inward_normal(&x);
    Ok(Anchor {
        x,
        normal_angle: scene.metric.frame_angle(&x, &nu),
    })
}

/// `‖(1/h) ∫_{γ_v^h} W f − W(x, v^⊥) ∫_{σ_v^1} T_x f‖` over the fan plan.
pub fn limit_check(scene: &Scene) -> Result<String, CliError> {
    let field = scene.require_field()?;
    let spec = scene.require_fan()?;
    if spec.h.is_empty() || spec.v_offsets_deg.is_empty() {
        return Err(scene.error("[fan]", "limit-check needs h and v_offsets_deg"));
    }
    let anchor = boundary_anchor(scene, spec.vertex)?;
    let fan = tangent_fan(&scene.tiling, field, spec.vertex, &scene.metric)?;
    let cases: Vec<(f64, f64)> = spec
        .h
        .iter()
        .flat_map(|&h| spec.v_offsets_deg.iter().map(move |&o| (h, o)))
        .collect();
    let rows = cases
        .par_iter()
        .map(|&(h, offset)| {
            let v = scene
                .metric
                .unit_from_angle(&anchor.x, anchor.normal_angle + offset.to_radians());
            let g = fan_geodesic(&scene.metric, anchor.x, v, h, spec.sign, scene.step)?;
            let scaled =
                scaled_fan_integral(&scene.metric, &scene.weight, &scene.tiling, field, &g)?;
            let limit = frozen_limit(&scene.metric, &scene.weight, anchor.x, v, &fan)?;
            Ok((h, offset, scaled, limit))
        })
        .collect::<mwxray::Result<Vec<_>>>()?;
    let m = scene.weight.dims().1;
    let mut header = vec!["h".to_string(), "v_offset_deg".into(), "error".into()];
    header.extend(complex_headers("scaled_", m));
    header.extend(complex_headers("limit_", m));
    let mut table = Table::new(&header)?;
    let mut worst = 0.0_f64;
    for (h, offset, scaled, limit) in &rows {
        let err = (scaled - limit).norm();
        worst = worst.max(err);
        let mut row = vec![fmt_f64(*h), fmt_f64(*offset), fmt_f64(err)];
        row.extend(complex_cells(scaled));
        row.extend(complex_cells(limit));
        table.row(&row)?;
    }
    let path = table.write(&scene.output_dir, "limit_check.csv")?;
    Ok(format!(
        "{} cases, max error {worst:e} (tolerance {:e}) -> {}",
        rows.len(),
        scene.tolerances.limit,
        path.display()
    ))
}

#[derive(Serialize)]
struct BatchReport {
    index: usize,
    level: f64,
    triangles: Vec<usize>,
    chords: usize,
    condition: f64,
}

#[derive(Serialize)]
struct Report {
    triangles: usize,
    k: usize,
    plan_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_relative_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    within_tolerance: Option<bool>,
    max_residual: f64,
    order: Vec<usize>,
    batch: Vec<BatchReport>,
}

/// Layer-stripping reconstruction from synthetic or recorded data.
pub fn reconstruct_cmd(scene: &Scene, data: Option<&Path>) -> Result<String, CliError> {
    let phi = scene.require_foliation()?;
    let plan = scene.plan()?;
    let (k, m) = scene.weight.dims();
    let oracle = match data {
        Some(path) => DataOracle::Recorded(read_data(path, m)?),
        None => DataOracle::Synthetic {
            weight: scene.weight.clone(),
            field: scene.require_field()?.clone(),
            noise: scene.noise,
        },
    };
    let report = reconstruct(
        &scene.metric,
        &scene.weight,
        &scene.tiling,
        &oracle,
        phi,
        &plan,
        scene.step,
    )?;
    let truth = scene.field.as_ref();
    let batch_of = |tri: usize| {
        report
            .batches
            .iter()
            .position(|b| b.triangles.contains(&tri))
            .unwrap_or(usize::MAX)
    };
    let mut header = vec![
        "triangle".to_string(),
        "batch".into(),
        "level".into(),
        "residual".into(),
    ];
    header.extend(complex_headers("", k));
    if truth.is_some() {
        header.extend(complex_headers("truth_", k));
        header.push("relative_error".into());
    }
    let mut table = Table::new(&header)?;
    for tri in 0..scene.tiling.len() {
        let b = batch_of(tri);
        let value = report.field.value(tri);
        let mut row = vec![
            tri.to_string(),
            b.to_string(),
            fmt_f64(report.batches[b].level),
            fmt_f64(report.residuals[tri]),
        ];
        row.extend(complex_cells(value));
        if let Some(t) = truth {
            let want = t.value(tri);
            row.extend(complex_cells(want));
            row.push(fmt_f64((value - want).norm() / want.norm().max(1e-12)));
        }
        table.row(&row)?;
    }
    let max_error = truth.map(|t| report.field.max_relative_error(t, 1e-12));
    let summary = Report {
        triangles: scene.tiling.len(),
        k,
        plan_size: plan.len(),
        max_relative_error: max_error,
        within_tolerance: max_error.map(|e| e <= scene.tolerances.recovery),
        max_residual: report.residuals.iter().copied().fold(0.0, f64::max),
        order: report.order.clone(),
        batch: report
            .batches
            .iter()
            .enumerate()
            .map(|(i, b)| BatchReport {
                index: i,
                level: b.level,
                triangles: b.triangles.clone(),
                chords: report.chords_used[i],
                condition: report.conditions[i],
            })
            .collect(),
    };
    let text = toml::to_string(&summary).map_err(|e| CliError::Data(e.to_string()))?;
    let csv = table.write(&scene.output_dir, "reconstruction.csv")?;
    write_atomic(
        &scene.output_dir,
        "reconstruction_report.toml",
        text.as_bytes(),
    )?;
    let err = max_error.map_or(String::new(), |e| format!(", max relative error {e:e}"));
    Ok(format!(
        "{} batches, {} triangles{err} -> {}",
        report.batches.len(),
        scene.tiling.len(),
        csv.display()
    ))
}

#[derive(Serialize)]
struct SpectrumSummary {
    rows: usize,
    cols: usize,
    support: Vec<usize>,
    sigma_max: f64,
    sigma_min: f64,
    ratio: f64,
}

/// Singular values of the discretized transform restricted to the support
/// of the field (all triangles when the scene has no field).
pub fn spectrum(scene: &Scene) -> Result<String, CliError> {
    let plan = scene.plan()?;
    let paths = trace_plan(&scene.metric, &plan, scene.step)?;
    let support: Vec<usize> = match &scene.field {
        Some(f) => (0..f.len())
            .filter(|&t| f.value(t).iter().any(|z| z.norm_sqr() > 0.0))
            .collect(),
        None => (0..scene.tiling.len()).collect(),
    };
    let k = scene.weight.dims().0;
    let full = assemble_operator(&scene.metric, &scene.weight, &scene.tiling, &paths);
    let cols: Vec<usize> = support
        .iter()
        .flat_map(|&t| (t * k..(t + 1) * k).collect::<Vec<_>>())
        .collect();
    let a = full.select_columns(cols.iter());
    let s = singular_spectrum(&a);
    let mut table = Table::new(&["index", "singular_value"])?;
    for (i, v) in s.iter().enumerate() {
        table.row(&[i.to_string(), fmt_f64(*v)])?;
    }
    let ratio = spectral_ratio(&a, &s);
    let summary = SpectrumSummary {
        rows: a.nrows(),
        cols: a.ncols(),
        support,
        sigma_max: s.first().copied().unwrap_or(0.0),
        sigma_min: s.last().copied().unwrap_or(0.0),
        ratio,
    };
    let text = toml::to_string(&summary).map_err(|e| CliError::Data(e.to_string()))?;
    let csv = table.write(&scene.output_dir, "spectrum.csv")?;
    write_atomic(&scene.output_dir, "spectrum_summary.toml", text.as_bytes())?;
    Ok(format!(
        "{}x{} operator, sigma_min/sigma_max = {ratio:e} -> {}",
        a.nrows(),
        a.ncols(),
        csv.display()
    ))
}

/// Recovers the tangent-function values at a boundary vertex from the
/// frozen limits of the fan family.
pub fn local_recover(scene: &Scene) -> Result<String, CliError> {
    let field = scene.require_field()?;
    let spec = scene.require_fan()?;
    let anchor = boundary_anchor(scene, spec.vertex)?;
    let fan: SectorFan = tangent_fan(&scene.tiling, field, spec.vertex, &scene.metric)?;
    let samples = spec
        .v_offsets_deg
        .iter()
        .map(|o| {
            let beta = anchor.normal_angle + o.to_radians();
            let v = scene.metric.unit_from_angle(&anchor.x, beta);
            Ok((
                beta,
                frozen_limit(&scene.metric, &scene.weight, anchor.x, v, &fan)?,
            ))
        })
        .collect::<mwxray::Result<Vec<(f64, CVector)>>>()?;
    let geometry: Vec<(f64, f64)> = fan.sectors.iter().map(|s| (s.start, s.end)).collect();
    let rec = recover_fan_values(
        |beta| frozen_weight(&scene.metric, &scene.weight, anchor.x, beta),
        &geometry,
        &samples,
    )?;
    let k = fan.k;
    let mut header = vec!["sector".to_string(), "start_deg".into(), "end_deg".into()];
    header.extend(complex_headers("", k));
    header.extend(complex_headers("truth_", k));
    header.push("error".into());
    let mut table = Table::new(&header)?;
    let mut worst = 0.0_f64;
    for (i, (s, got)) in fan.sectors.iter().zip(&rec.values).enumerate() {
        let err = (got - &s.value).norm();
        worst = worst.max(err);
        let mut row = vec![
            i.to_string(),
            fmt_f64(s.start.to_degrees()),
            fmt_f64(s.end.to_degrees()),
        ];
        row.extend(complex_cells(got));
        row.extend(complex_cells(&s.value));
        row.push(fmt_f64(err));
        table.row(&row)?;
    }
    let path = table.write(&scene.output_dir, "local_recovery.csv")?;
    Ok(format!(
        "{} sectors from {} directions, condition {:e}, max error {worst:e} -> {}",
        geometry.len(),
        samples.len(),
        rec.condition,
        path.display()
    ))
}

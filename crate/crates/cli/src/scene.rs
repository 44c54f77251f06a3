//! Scene files: a TOML document describing metric, tiling, field, weight,
//! foliation and the geodesic plans a command runs on.

use std::path::{Path, PathBuf};

use mwxray::recovery::{
    fan_beam_plan, layered_plan, random_plan, ChordDescriptor, LayerPlan, Noise,
};
use mwxray::weight::AttenuationCoefficient;
use mwxray::{
    CMatrix, CVector, FoliationFamily, FoliationFunction, MetricFamily, MetricField,
    PiecewiseConstantField, Point, Tiling, ValidTiling, WeightField, C64,
};
use serde::Deserialize;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub schema: u32,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default)]
    pub seed: u64,
    pub metric: MetricSpec,
    pub tiling: TilingSpec,
    pub field: Option<FieldSpec>,
    pub weight: WeightSection,
    pub foliation: Option<FoliationSpec>,
    pub chords: Option<ChordSpec>,
    pub fan: Option<FanSpec>,
    pub noise: Option<NoiseSpec>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_step() -> f64 {
    1e-2
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    pub family: MetricFamily,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TilingSpec {
    Inline {
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
    },
    PolygonFan {
        sides: usize,
        #[serde(default)]
        phase_deg: f64,
        #[serde(default)]
        refinements: usize,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldSpec {
    Zero {
        k: usize,
    },
    /// One row per triangle holding `re, im` pairs.
    Values {
        k: usize,
        values: Vec<Vec<f64>>,
    },
    Random {
        k: usize,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "yes")]
        complex: bool,
        /// Triangles outside this list are zero.
        support: Option<Vec<usize>>,
    },
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

#[derive(Debug, Deserialize)]
pub struct WeightSection {
    /// Declared number of data channels; checked against the family.
    pub m: Option<usize>,
    #[serde(flatten)]
    pub spec: WeightSpec,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum WeightSpec {
    Identity {
        k: usize,
    },
    /// Rows of `re, im` pairs.
    ConstantMatrix {
        rows: Vec<Vec<f64>>,
    },
    Attenuation {
        coefficient: CoefficientSpec,
    },
    Angular {
        k: usize,
        order: f64,
        amplitude: f64,
        #[serde(default)]
        spatial: f64,
    },
    Product {
        left: Vec<Vec<f64>>,
        inner: Box<WeightSpec>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoefficientSpec {
    Constant {
        value: f64,
    },
    Gaussian {
        strength: f64,
        center: [f64; 2],
        width: f64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoliationSpec {
    pub family: FoliationFamily,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ChordSpec {
    Layered {
        #[serde(default = "default_fractions")]
        fractions: Vec<f64>,
        #[serde(default = "default_rotations")]
        rotations: usize,
        #[serde(default)]
        omit_batches: Vec<usize>,
    },
    FanBeam {
        sources: usize,
        offsets_deg: Vec<f64>,
    },
    Random {
        count: usize,
        #[serde(default = "default_max_offset")]
        max_offset_deg: f64,
    },
    /// `[boundary angle, direction angle]` pairs in radians.
    Explicit { descriptors: Vec<[f64; 2]> },
}

fn default_fractions() -> Vec<f64> {
    LayerPlan::default().fractions
}

fn default_rotations() -> usize {
    LayerPlan::default().rotations
}

fn default_max_offset() -> f64 {
    80.0
}

/// Directions `v` at a boundary vertex, given as offsets from the inward
/// normal, and the offsets `h` of the fan family.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanSpec {
    pub vertex: usize,
    pub v_offsets_deg: Vec<f64>,
    #[serde(default)]
    pub h: Vec<f64>,
    #[serde(default = "plus")]
    pub sign: f64,
}

fn plus() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub sigma: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: default_dir() }
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from(".")
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Bound on `‖scaled − frozen‖` reported as a pass by `limit-check`.
    #[serde(default = "default_limit_tol")]
    pub limit: f64,
    /// Bound on the relative error reported as a pass when the truth is known.
    #[serde(default = "default_recovery_tol")]
    pub recovery: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            limit: default_limit_tol(),
            recovery: default_recovery_tol(),
        }
    }
}

fn default_limit_tol() -> f64 {
    1e-9
}

fn default_recovery_tol() -> f64 {
    1e-6
}

/// A checked scene ready for the commands.
#[derive(Debug)]
pub struct Scene {
    pub path: PathBuf,
    source: String,
    pub step: f64,
    pub seed: u64,
    pub metric: MetricField,
    pub tiling: ValidTiling,
    pub field: Option<PiecewiseConstantField>,
    pub weight: WeightField,
    pub foliation: Option<FoliationFunction>,
    pub chords: Option<ChordSpec>,
    pub fan: Option<FanSpec>,
    pub noise: Option<Noise>,
    pub output_dir: PathBuf,
    pub tolerances: Tolerances,
}

/// Command-line overrides applied on top of the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub step: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl Scene {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let source = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            context: format!("reading {}", path.display()),
            source: e,
        })?;
        Self::parse(path, source, overrides)
    }

    pub fn parse(path: &Path, source: String, overrides: &Overrides) -> Result<Self, CliError> {
        let config: SceneConfig = toml::from_str(&source)
            .map_err(|e| CliError::Scene(format!("{}: {e}", path.display())))?;
        let anchor = Anchor {
            path,
            source: &source,
        };
        if config.schema != SCHEMA_VERSION {
            return Err(anchor.error(
                "schema",
                format!(
                    "unsupported schema {} (expected {SCHEMA_VERSION})",
                    config.schema
                ),
            ));
        }
        let step = overrides.step.unwrap_or(config.step);
        if !(step > 0.0 && step.is_finite()) {
            return Err(anchor.error("step", format!("step must be positive, got {step}")));
        }
        let seed = overrides.seed.unwrap_or(config.seed);
        let tol = &config.tolerances;
        if !(tol.limit > 0.0 && tol.recovery > 0.0) {
            return Err(anchor.error("[tolerances]", "tolerances must be positive".into()));
        }

        let metric = MetricField::new(config.metric.family, &config.metric.params)
            .map_err(|e| anchor.error("[metric]", e.to_string()))?;
        let tiling = build_tiling(&config.tiling)
            .and_then(|t| t.validated())
            .map_err(|e| anchor.error("[tiling]", e.to_string()))?;
        let weight = build_weight(&config.weight.spec).map_err(|e| anchor.error("[weight]", e))?;
        let field = config
            .field
            .as_ref()
            .map(|f| build_field(f, tiling.len(), seed))
            .transpose()
            .map_err(|e| anchor.error("[field]", e))?;
        let k = field.as_ref().map_or(weight.dims().0, |f| f.k());
        weight
            .check(k, config.weight.m)
            .map_err(|e| anchor.error("[weight]", e.to_string()))?;
        let foliation = config
            .foliation
            .as_ref()
            .map(|f| FoliationFunction::new(f.family, &f.params))
            .transpose()
            .map_err(|e| anchor.error("[foliation]", e.to_string()))?;
        if let Some(fan) = &config.fan {
            if fan.vertex >= tiling.vertices().len() {
                return Err(anchor.error("[fan]", format!("vertex {} does not exist", fan.vertex)));
            }
            if fan.sign != 1.0 && fan.sign != -1.0 {
                return Err(anchor.error("[fan]", "sign must be 1 or -1".into()));
            }
            if fan.h.iter().any(|h| !(*h > 0.0)) {
                return Err(anchor.error("[fan]", "offsets h must be positive".into()));
            }
        }
        if let Some(ChordSpec::Layered { .. }) = &config.chords {
            if foliation.is_none() {
                return Err(anchor.error("[chords]", "a layered plan needs [foliation]".into()));
            }
        }
        let noise = match &config.noise {
            Some(n) if !(n.sigma >= 0.0) => {
                return Err(anchor.error("[noise]", "sigma must be non-negative".into()))
            }
            Some(n) => Some(Noise {
                sigma: n.sigma,
                seed,
            }),
            None => None,
        };
        let output_dir = overrides.out.clone().unwrap_or(config.output.dir);
        Ok(Scene {
            path: path.to_path_buf(),
            source,
            step,
            seed,
            metric,
            tiling,
            field,
            weight,
            foliation,
            chords: config.chords,
            fan: config.fan,
            noise,
            output_dir,
            tolerances: config.tolerances,
        })
    }

    /// Scene error pointing at the line of `key` in the file.
    pub fn error(&self, key: &str, msg: impl Into<String>) -> CliError {
        Anchor {
            path: &self.path,
            source: &self.source,
        }
        .error(key, msg.into())
    }

    pub fn require_field(&self) -> Result<&PiecewiseConstantField, CliError> {
        self.field
            .as_ref()
            .ok_or_else(|| self.error("[field]", "this command needs a [field] section"))
    }

    pub fn require_foliation(&self) -> Result<&FoliationFunction, CliError> {
        self.foliation
            .as_ref()
            .ok_or_else(|| self.error("[foliation]", "this command needs a [foliation] section"))
    }

    pub fn require_fan(&self) -> Result<&FanSpec, CliError> {
        self.fan
            .as_ref()
            .ok_or_else(|| self.error("[fan]", "this command needs a [fan] section"))
    }

    /// The geodesic plan of the scene; layered when no `[chords]` is given.
    pub fn plan(&self) -> Result<Vec<ChordDescriptor>, CliError> {
        let default = ChordSpec::Layered {
            fractions: default_fractions(),
            rotations: default_rotations(),
            omit_batches: Vec::new(),
        };
        let spec = self.chords.as_ref().unwrap_or(&default);
        let plan = match spec {
            ChordSpec::Layered {
                fractions,
                rotations,
                omit_batches,
            } => {
                let phi = self.require_foliation()?;
                let layers = LayerPlan {
                    fractions: fractions.clone(),
                    rotations: *rotations,
                    omit_batches: omit_batches.clone(),
                };
                layered_plan(&self.metric, &self.tiling, phi, &layers, self.step).map_err(|e| {
                    match e {
                        mwxray::Error::Config(msg) => self.error("[chords]", msg),
                        other => other.into(),
                    }
                })?
            }
            ChordSpec::FanBeam {
                sources,
                offsets_deg,
            } => {
                let offsets: Vec<f64> = offsets_deg.iter().map(|d| d.to_radians()).collect();
                if offsets
                    .iter()
                    .any(|o| o.abs() >= std::f64::consts::FRAC_PI_2)
                {
                    return Err(self.error("[chords]", "fan-beam offsets must be within ±90°"));
                }
                fan_beam_plan(*sources, &offsets)
            }
            ChordSpec::Random {
                count,
                max_offset_deg,
            } => {
                if !(*max_offset_deg > 0.0 && *max_offset_deg < 90.0) {
                    return Err(self.error("[chords]", "max_offset_deg must be in (0, 90)"));
                }
                random_plan(*count, max_offset_deg.to_radians(), self.seed)
            }
            ChordSpec::Explicit { descriptors } => descriptors
                .iter()
                .map(|&[a, d]| ChordDescriptor::new(a, d))
                .collect(),
        };
        if plan.is_empty() {
            return Err(self.error("[chords]", "the geodesic plan is empty"));
        }
        Ok(plan)
    }
}

struct Anchor<'a> {
    path: &'a Path,
    source: &'a str,
}

impl Anchor<'_> {
    /// Finds the line where `key` (a `[section]` header or a top-level key)
    /// is defined.
    fn line_of(&self, key: &str) -> Option<usize> {
        self.source.lines().position(|l| {
            let l = l.trim_start();
            if key.starts_with('[') {
                l.starts_with(key)
            } else {
                l.strip_prefix(key)
                    .is_some_and(|rest| rest.trim_start().starts_with('='))
            }
        })
    }

    fn error(&self, key: &str, msg: String) -> CliError {
        match self.line_of(key) {
            Some(n) => CliError::Scene(format!("{}:{}: {key}: {msg}", self.path.display(), n + 1)),
            None => CliError::Scene(format!("{}: {key}: {msg}", self.path.display())),
        }
    }
}

fn build_tiling(spec: &TilingSpec) -> mwxray::Result<Tiling> {
    match spec {
        TilingSpec::Inline {
            vertices,
            triangles,
        } => Tiling::new(
            vertices.iter().map(|&[x, y]| Point::new(x, y)).collect(),
            triangles.clone(),
        ),
        TilingSpec::PolygonFan {
            sides,
            phase_deg,
            refinements,
        } => {
            let mut t = Tiling::polygon_fan(*sides, phase_deg.to_radians())?;
            for _ in 0..*refinements {
                t = t.refine()?;
            }
            Ok(t)
        }
    }
}

fn complex_row(row: &[f64], what: &str) -> Result<Vec<C64>, String> {
    if !row.len().is_multiple_of(2) {
        return Err(format!(
            "{what} must hold re, im pairs (got {} numbers)",
            row.len()
        ));
    }
    Ok(row.chunks(2).map(|p| C64::new(p[0], p[1])).collect())
}

fn complex_matrix(rows: &[Vec<f64>], what: &str) -> Result<CMatrix, String> {
    let rows = rows
        .iter()
        .map(|r| complex_row(r, what))
        .collect::<Result<Vec<_>, _>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(format!("{what} must be a non-empty rectangular matrix"));
    }
    Ok(CMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

fn build_weight(spec: &WeightSpec) -> Result<WeightField, String> {
    Ok(match spec {
        WeightSpec::Identity { k } => WeightField::identity(*k),
        WeightSpec::ConstantMatrix { rows } => WeightField::constant(complex_matrix(rows, "rows")?),
        WeightSpec::Attenuation { coefficient } => WeightField::Attenuation {
            coefficient: match coefficient {
                CoefficientSpec::Constant { value } => AttenuationCoefficient::Constant(*value),
                CoefficientSpec::Gaussian {
                    strength,
                    center,
                    width,
                } => AttenuationCoefficient::Gaussian {
                    strength: *strength,
                    center: Point::new(center[0], center[1]),
                    width: *width,
                },
            },
        },
        WeightSpec::Angular {
            k,
            order,
            amplitude,
            spatial,
        } => WeightField::Angular {
            k: *k,
            order: *order,
            amplitude: *amplitude,
            spatial: *spatial,
        },
        WeightSpec::Product { left, inner } => WeightField::Product {
            left: complex_matrix(left, "left")?,
            inner: Box::new(build_weight(inner)?),
        },
    })
}

fn build_field(
    spec: &FieldSpec,
    triangles: usize,
    seed: u64,
) -> Result<PiecewiseConstantField, String> {
    match spec {
        FieldSpec::Zero { k } => {
            if *k == 0 {
                return Err("k must be positive".into());
            }
            Ok(PiecewiseConstantField::zeros(*k, triangles))
        }
        FieldSpec::Values { k, values } => {
            if values.len() != triangles {
                return Err(format!(
                    "{} value rows for {triangles} triangles",
                    values.len()
                ));
            }
            let rows = values
                .iter()
                .map(|r| complex_row(r, "values").map(CVector::from_vec))
                .collect::<Result<Vec<_>, _>>()?;
            PiecewiseConstantField::new(*k, rows).map_err(|e| e.to_string())
        }
        FieldSpec::Random {
            k,
            amplitude,
            complex,
            support,
        } => {
            if *k == 0 {
                return Err("k must be positive".into());
            }
            let f = PiecewiseConstantField::random(*k, triangles, *amplitude, *complex, seed);
            match support {
                Some(s) => {
                    if let Some(bad) = s.iter().find(|&&t| t >= triangles) {
                        return Err(format!("support triangle {bad} does not exist"));
                    }
                    Ok(f.restricted_to(s))
                }
                None => Ok(f),
            }
        }
    }
}

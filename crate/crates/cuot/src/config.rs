//! The declarative problem document and its TOML encoding.
//!
//! A document names a grid, `δ`, two endpoint densities, a list of affine
//! constraints and solver settings. [`crate::scenario::build`] turns it into a
//! [`cuot_core::ProblemSpec`]; this module only handles syntax.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub delta: Scalar,
    pub grid: GridDoc,
    pub rho0: DensityDoc,
    pub rho1: DensityDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<ConstraintDoc>,
    #[serde(default)]
    pub solver: SolverDoc,
}

/// A number or a constant expression such as `"1/(2*PI)"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Expr(String),
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Number(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub time_cells: usize,
    pub cells: Vec<usize>,
    pub lengths: Vec<Scalar>,
    pub boundary: Vec<BoundaryDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryDoc {
    Neumann,
    Periodic,
}

/// An endpoint density on the spatial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensityDoc {
    /// Sum of Gaussian bumps plus a constant floor, sampled at cell centers.
    Gaussian {
        bumps: Vec<BumpDoc>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        floor: Option<f64>,
        /// Rescale to this total mass after sampling.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        normalize: Option<Scalar>,
    },
    /// Expression in the spatial variables, clipped at 0.
    Expr {
        expr: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        normalize: Option<Scalar>,
    },
    /// Row-major values.
    Inline { values: Vec<f64> },
    /// Raster file; see [`crate::raster`].
    File {
        path: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        normalize: Option<Scalar>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpDoc {
    pub center: Vec<Scalar>,
    pub std: Scalar,
    /// Mass of the untruncated bump.
    pub mass: Scalar,
    /// Radius in standard deviations beyond which the bump is set to 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
}

/// One affine box constraint `lower ≤ ⟨H^ρ,ρ⟩ + ⟨H^ω,ω⟩ + ⟨H^ζ,ζ⟩ ≤ upper`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<WeightDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<VectorWeightDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<WeightDoc>,
    /// Shorthand for `lower = upper`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equal: Option<BoundDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<BoundDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<BoundDoc>,
}

/// A scalar weight field on the centered space-time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightDoc {
    Unit,
    /// `value` inside the union of `shapes`, 0 elsewhere.
    RegionIndicator {
        shapes: Vec<ShapeDoc>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value: Option<f64>,
    },
    /// The cell-center coordinate along `axis`.
    Coordinate { axis: usize },
    /// Expression in `t` and the spatial variables.
    Expr { expr: String },
    /// Spatial raster broadcast over time, or a full centered-grid array.
    File { path: String },
}

/// A vector weight field, one component per spatial axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VectorWeightDoc {
    /// One scalar weight per axis.
    Components { axes: Vec<WeightDoc> },
    /// A constant vector, optionally restricted to a region, or a field read
    /// from `path` with a trailing axis of length `n`.
    VectorField {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vector: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        region: Option<Vec<ShapeDoc>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<String>,
    },
}

/// A region of space, optionally active only for `times[0] ≤ t < times[1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeDoc {
    Box {
        min: Vec<f64>,
        max: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        times: Option<[f64; 2]>,
    },
    Disk {
        center: Vec<f64>,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        times: Option<[f64; 2]>,
    },
    /// Cells where the raster at `path` is nonzero.
    Mask {
        path: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        times: Option<[f64; 2]>,
        /// Take the complement.
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        invert: bool,
    },
}

/// Per-time bounds at the centered times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundDoc {
    Number(f64),
    List(Vec<f64>),
    /// A schedule file resampled to the centered times, times `scale`.
    Schedule {
        schedule: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
    /// An expression in `t`.
    Expr(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaDoc {
    Fixed(f64),
    /// Only `"auto"` is accepted.
    Named(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearSolverDoc {
    Spectral,
    ConjugateGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitDoc {
    Linear,
    Hellinger,
}

/// Solver settings; absent fields take the library defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<GammaDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_stride: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ce_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear_solver: Option<LinearSolverDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<InitDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl ConfigDoc {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let path = e.span().map_or_else(|| "<document>".to_owned(), |s| locate(text, s.start));
            Error::config(path, e.message().to_owned())
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("<document>", e.to_string()))
    }

    /// Applies `key.path=value` assignments, e.g. `solver.iterations=500` or
    /// `constraints.0.lower=1.0`. Values are TOML literals; anything that does
    /// not parse as one is taken as a string.
    pub fn with_overrides<S: AsRef<str>>(&self, sets: &[S]) -> Result<Self> {
        let mut root = toml::Value::try_from(self).map_err(|e| Error::config("<document>", e.to_string()))?;
        for set in sets {
            let set = set.as_ref();
            let (key, raw) = set
                .split_once('=')
                .ok_or_else(|| Error::config(set, "override must look like `key.path=value`"))?;
            let key = key.trim();
            let value = toml::from_str::<toml::Table>(&format!("v = {}", raw.trim()))
                .ok()
                .and_then(|mut t| t.remove("v"))
                .unwrap_or_else(|| toml::Value::String(raw.trim().to_owned()));
            assign(&mut root, key, value)?;
        }
        root.try_into().map_err(|e: toml::de::Error| Error::config("<overrides>", e.message().to_owned()))
    }
}

fn assign(root: &mut toml::Value, key: &str, value: toml::Value) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    let mut cur = root;
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        cur = match cur {
            toml::Value::Table(t) => {
                if last {
                    t.insert((*part).to_owned(), value);
                    return Ok(());
                }
                t.entry(*part).or_insert_with(|| toml::Value::Table(Default::default()))
            }
            toml::Value::Array(a) => {
                let idx: usize = part
                    .parse()
                    .map_err(|_| Error::config(key, format!("`{part}` is not an array index")))?;
                let len = a.len();
                let slot = a
                    .get_mut(idx)
                    .ok_or_else(|| Error::config(key, format!("index {idx} out of range (length {len})")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(Error::config(key, format!("`{part}` is inside a scalar"))),
        };
    }
    Err(Error::config(key, "empty key"))
}

/// The innermost `[table]` header and key preceding byte offset `at`.
fn locate(text: &str, at: usize) -> String {
    let before = &text[..at.min(text.len())];
    let line_no = before.matches('\n').count() + 1;
    let mut table = None;
    for line in before.lines() {
        let l = line.trim();
        if l.starts_with('[') {
            table = Some(l.trim_matches(|c| c == '[' || c == ']').trim().to_owned());
        }
    }
    let key = before
        .lines()
        .last()
        .and_then(|l| l.split_once('='))
        .map(|(k, _)| k.trim().to_owned());
    match (table, key) {
        (Some(t), Some(k)) => format!("{t}.{k} (line {line_no})"),
        (Some(t), None) => format!("{t} (line {line_no})"),
        (None, Some(k)) => format!("{k} (line {line_no})"),
        (None, None) => format!("line {line_no}"),
    }
}

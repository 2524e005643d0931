//! The TOML problem file.

use serde::{Deserialize, Serialize};

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Cvip,
    SvipDirect,
    SvipProduct,
    Mssvip,
    SfpCq,
    SfpMinNorm,
    Cvipp,
    Smp,
    Szp,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Cvip => "cvip",
            Kind::SvipDirect => "svip_direct",
            Kind::SvipProduct => "svip_product",
            Kind::Mssvip => "mssvip",
            Kind::SfpCq => "sfp_cq",
            Kind::SfpMinNorm => "sfp_min_norm",
            Kind::Cvipp => "cvipp",
            Kind::Smp => "smp",
            Kind::Szp => "szp",
        }
    }

    /// Whether the problem has a target space and coupling map `a`.
    pub fn is_split(&self) -> bool {
        !matches!(self, Kind::Cvip | Kind::Cvipp)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Whole,
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Halfspace { normal: Vec<f64>, offset: f64 },
    Hyperplane { normal: Vec<f64>, offset: f64 },
    Affine { basis: Vec<Vec<f64>>, anchor: Vec<f64> },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    #[default]
    Zero,
    Identity,
    /// `x ↦ Mx + q`. Without `lipschitz`, `M` must be symmetric PSD.
    Affine {
        matrix: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lipschitz: Option<f64>,
    },
}

fn is_zero_field(f: &FieldSpec) -> bool {
    *f == FieldSpec::Zero
}

fn unit_weight() -> f64 {
    1.0
}

fn is_unit_weight(w: &f64) -> bool {
    *w == 1.0
}

/// One `(set, field, weight)` entry of `sources`, `targets` or `blocks`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub set: SetSpec,
    #[serde(default, skip_serializing_if = "is_zero_field")]
    pub field: FieldSpec,
    #[serde(default = "unit_weight", skip_serializing_if = "is_unit_weight")]
    pub weight: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_safety: Option<f64>,
    /// Relaxation `α` of the extragradient method.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
}

fn is_default_config(c: &ConfigSpec) -> bool {
    *c == ConfigSpec::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: Kind,
    /// Source dimension.
    pub n: usize,
    /// Target dimension (split problems only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<Vec<f64>>,
    /// Known solution; activates `dist_to_ref` in the trace.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Vec<f64>>,
    /// Rows of the `m × n` coupling map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "is_default_config")]
    pub config: ConfigSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<SetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<SetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<SetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b1: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b2: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<ComponentSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<ComponentSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blocks: Vec<ComponentSpec>,
}

impl ProblemFile {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("problem files serialize to TOML")
    }
}

//! Run configuration: the shared flags plus one parameter block per command.
//!
//! A config file is a JSON object
//!
//! ```json
//! {"schema": "arakelov-lab/1", "command": "intersect", "seed": 0,
//!  "params": {"a": {"kind": "c", "c": "1"}}}
//! ```
//!
//! Omitted shared fields take their defaults. The canonical serialization
//! (defaults filled in, fixed key order) is what reports echo, and parsing it
//! back gives the same bytes again.

use std::fmt;
use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::formats::{Int, LatticeSpec, MapSpec, MetricSpec, PointSpec};

pub const SCHEMA: &str = "arakelov-lab/1";

pub const DEFAULT_PRECISION_BITS: usize = 128;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_QUADRATURE_BUDGET: usize = 1 << 16;

/// The literal schema tag; anything else is rejected while parsing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Schema;

impl Serialize for Schema {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(SCHEMA)
    }
}

impl<'de> Deserialize<'de> for Schema {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == SCHEMA {
            Ok(Schema)
        } else {
            Err(de::Error::custom(format!("unsupported schema `{s}`, expected `{SCHEMA}`")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Height,
    CanonicalHeight,
    Orbit,
    Equidist,
    Lattice,
    Bergman,
    Intersect,
    HilbertSamuel,
    Siu,
}

impl fmt::Display for CommandName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeightParams {
    pub point: PointSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalHeightParams {
    pub map: MapSpec,
    pub point: PointSpec,
}

fn eight() -> u32 {
    8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitParams {
    pub point: PointSpec,
    /// Largest character exponent in the Weyl sum bank.
    #[serde(default = "eight")]
    pub cutoff: u32,
}

fn burn_in() -> usize {
    arakelov_core::dynamics::DEFAULT_BURN_IN
}

/// Zero-sized literal used as the `experiment` tag of one variant. Reading
/// the tag as a plain field (instead of through an internally tagged enum)
/// keeps line numbers and field paths in parse errors.
macro_rules! tag {
    ($name:ident, $lit:literal) => {
        #[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
        pub struct $name;

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str($lit)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                if s == $lit {
                    Ok($name)
                } else {
                    Err(de::Error::custom(format!("expected experiment `{}`, found `{s}`", $lit)))
                }
            }
        }
    };
}

tag!(BiluTag, "bilu");
tag!(BrolinTag, "brolin");
tag!(DistortionTag, "distortion");
tag!(DifferenceTag, "difference");
tag!(VolumeTag, "volume");
tag!(GromovTag, "gromov");

/// Orbits of primitive `m`-th roots of unity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiluParams {
    pub experiment: BiluTag,
    pub orders: Vec<u64>,
    #[serde(default = "eight")]
    pub cutoff: u32,
}

/// Backward-iteration sample of the canonical measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrolinParams {
    pub experiment: BrolinTag,
    pub map: MapSpec,
    pub count: usize,
    #[serde(default = "burn_in")]
    pub burn_in: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum EquidistParams {
    Bilu(BiluParams),
    Brolin(BrolinParams),
}

fn rank_cap() -> usize {
    arakelov_core::lattice::DEFAULT_RANK_CAP
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeParams {
    pub lattice: LatticeSpec,
    /// Generators (as rows) of a saturated sublattice; its sub and quotient
    /// norms are checked against the exact determinant identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sublattice: Option<Vec<Vec<Int>>>,
    #[serde(default = "rank_cap")]
    pub rank_cap: usize,
}

fn radii() -> usize {
    24
}

fn angles() -> usize {
    48
}

fn trials() -> usize {
    200
}

/// Distortion of `Gamma(metric)` against the curvature of `measure`
/// (default: of `metric` itself).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistortionParams {
    pub experiment: DistortionTag,
    pub metric: MetricSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MetricSpec>,
    #[serde(default = "radii")]
    pub radii: usize,
    #[serde(default = "angles")]
    pub angles: usize,
}

/// `sup b(N L - j M)` over the grid `n x j`, checked against
/// `(N deg L + 1)(1 + k (1/N + 1/j))` when `k` is given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DifferenceParams {
    pub experiment: DifferenceTag,
    pub l: MetricSpec,
    pub m: MetricSpec,
    pub n: Vec<u32>,
    pub j: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
}

/// Volume of the `L^2` ball against the `s`-twisted ball on
/// `Gamma(N L - j M)`, checked against
/// `dim Gamma(N L) int log||s|| (1 + k (1/N + 1/j))` when `k` is given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeParams {
    pub experiment: VolumeTag,
    pub l: MetricSpec,
    pub m: MetricSpec,
    /// Coefficients of `s`, indexed by the `x1` exponent.
    pub section: Vec<f64>,
    pub n: Vec<u32>,
    pub j: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
}

/// `max sup/L^2` over random sections of `Gamma(k L + j M)` for each total
/// `k + j` in `sums`, split as evenly as possible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GromovParams {
    pub experiment: GromovTag,
    pub l: MetricSpec,
    pub m: MetricSpec,
    pub sums: Vec<u32>,
    #[serde(default = "trials")]
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum BergmanParams {
    Distortion(DistortionParams),
    Difference(DifferenceParams),
    Volume(VolumeParams),
    Gromov(GromovParams),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntersectParams {
    pub a: MetricSpec,
    /// Defaults to `a`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<MetricSpec>,
}

fn band() -> f64 {
    0.025
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HilbertSamuelParams {
    #[serde(default = "MetricSpec::fs")]
    pub metric: MetricSpec,
    pub ns: Vec<usize>,
    /// Allowed distance of `chi / (N^2 / 2)` at the largest `N` from `c_1^2`.
    #[serde(default = "band")]
    pub band: f64,
}

fn slack() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiuParams {
    pub l: MetricSpec,
    pub m: MetricSpec,
    pub ns: Vec<usize>,
    /// `chi / N^2` at the largest `N` must reach `coefficient - slack`.
    #[serde(default = "slack")]
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    Height(HeightParams),
    CanonicalHeight(CanonicalHeightParams),
    Orbit(OrbitParams),
    Equidist(EquidistParams),
    Lattice(LatticeParams),
    Bergman(BergmanParams),
    Intersect(IntersectParams),
    HilbertSamuel(HilbertSamuelParams),
    Siu(SiuParams),
}

impl Params {
    pub fn command(&self) -> CommandName {
        match self {
            Params::Height(_) => CommandName::Height,
            Params::CanonicalHeight(_) => CommandName::CanonicalHeight,
            Params::Orbit(_) => CommandName::Orbit,
            Params::Equidist(_) => CommandName::Equidist,
            Params::Lattice(_) => CommandName::Lattice,
            Params::Bergman(_) => CommandName::Bergman,
            Params::Intersect(_) => CommandName::Intersect,
            Params::HilbertSamuel(_) => CommandName::HilbertSamuel,
            Params::Siu(_) => CommandName::Siu,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub schema: Schema,
    pub command: CommandName,
    pub precision_bits: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub quadrature_budget: usize,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub params: Params,
}

impl RunConfig {
    pub fn new(params: Params) -> Self {
        RunConfig {
            schema: Schema,
            command: params.command(),
            precision_bits: DEFAULT_PRECISION_BITS,
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
            quadrature_budget: DEFAULT_QUADRATURE_BUDGET,
            threads: 0,
            out: None,
            params,
        }
    }

    /// Canonical JSON text, echoed into every report.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// Parse failure with the position and field path of the offending value.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{origin}:{line}:{column}: field `{path}`: {message}")]
pub struct ConfigError {
    pub origin: String,
    pub line: usize,
    pub column: usize,
    pub path: String,
    pub message: String,
}

fn precision_bits() -> usize {
    DEFAULT_PRECISION_BITS
}

fn tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

fn quadrature_budget() -> usize {
    DEFAULT_QUADRATURE_BUDGET
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig<'a> {
    #[allow(dead_code)]
    schema: Schema,
    command: CommandName,
    #[serde(default = "precision_bits")]
    precision_bits: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default = "tolerance")]
    tolerance: f64,
    #[serde(default = "quadrature_budget")]
    quadrature_budget: usize,
    #[serde(default)]
    threads: usize,
    #[serde(default)]
    out: Option<PathBuf>,
    #[serde(borrow)]
    params: &'a RawValue,
}

/// serde_json appends " at line L column C"; the position is reported separately.
fn bare_message(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = offset - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

fn typed<T: DeserializeOwned>(text: &str, raw: &RawValue, origin: &str) -> Result<T, ConfigError> {
    let base = raw.get().as_ptr() as usize - text.as_ptr() as usize;
    let mut d = serde_json::Deserializer::from_str(raw.get());
    serde_path_to_error::deserialize(&mut d).map_err(|e| {
        let inner = e.inner();
        let (bl, bc) = line_col(text, base);
        // buffered values (inside tagged enums) carry no position
        let (line, column) = match inner.line() {
            0 => (bl, bc),
            1 => (bl, bc + inner.column().saturating_sub(1)),
            l => (bl + l - 1, inner.column()),
        };
        let path = e.path().to_string();
        let path = if path == "." { "params".to_string() } else { format!("params.{path}") };
        ConfigError { origin: origin.to_string(), line, column, path, message: bare_message(inner) }
    })
}

#[derive(Deserialize)]
struct Peek {
    experiment: String,
}

fn experiment(text: &str, raw: &RawValue, origin: &str) -> Result<String, ConfigError> {
    typed::<Peek>(text, raw, origin).map(|p| p.experiment)
}

fn unknown_experiment(text: &str, raw: &RawValue, origin: &str, found: &str, known: &str) -> ConfigError {
    let base = raw.get().as_ptr() as usize - text.as_ptr() as usize;
    let (line, column) = key_position(&text[base..], "experiment");
    let (bl, bc) = line_col(text, base);
    let (line, column) = if line == 1 { (bl, bc + column - 1) } else { (bl + line - 1, column) };
    ConfigError {
        origin: origin.to_string(),
        line,
        column,
        path: "params.experiment".into(),
        message: format!("unknown experiment `{found}`, expected one of {known}"),
    }
}

fn key_position(text: &str, key: &str) -> (usize, usize) {
    text.find(&format!("\"{key}\"")).map_or((1, 1), |i| line_col(text, i))
}

/// Parses a config document; `origin` names it in diagnostics.
pub fn parse_config(text: &str, origin: &str) -> Result<RunConfig, ConfigError> {
    let mut d = serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(&mut d).map_err(|e| ConfigError {
        origin: origin.to_string(),
        line: e.inner().line(),
        column: e.inner().column(),
        path: e.path().to_string(),
        message: bare_message(e.inner()),
    })?;
    d.end().map_err(|e| ConfigError {
        origin: origin.to_string(),
        line: e.line(),
        column: e.column(),
        path: ".".into(),
        message: bare_message(&e),
    })?;
    let invalid = |key: &str, message: String| {
        let (line, column) = key_position(text, key);
        ConfigError { origin: origin.to_string(), line, column, path: key.to_string(), message }
    };
    if raw.tolerance.is_nan() || raw.tolerance <= 0.0 || raw.tolerance.is_infinite() {
        return Err(invalid("tolerance", format!("must be positive and finite, got {}", raw.tolerance)));
    }
    if raw.precision_bits < 53 {
        return Err(invalid("precision_bits", format!("must be at least 53, got {}", raw.precision_bits)));
    }
    let params = match raw.command {
        CommandName::Height => Params::Height(typed(text, raw.params, origin)?),
        CommandName::CanonicalHeight => Params::CanonicalHeight(typed(text, raw.params, origin)?),
        CommandName::Orbit => Params::Orbit(typed(text, raw.params, origin)?),
        CommandName::Equidist => Params::Equidist(match experiment(text, raw.params, origin)?.as_str() {
            "bilu" => EquidistParams::Bilu(typed(text, raw.params, origin)?),
            "brolin" => EquidistParams::Brolin(typed(text, raw.params, origin)?),
            other => return Err(unknown_experiment(text, raw.params, origin, other, "bilu, brolin")),
        }),
        CommandName::Lattice => Params::Lattice(typed(text, raw.params, origin)?),
        CommandName::Bergman => Params::Bergman(match experiment(text, raw.params, origin)?.as_str() {
            "distortion" => BergmanParams::Distortion(typed(text, raw.params, origin)?),
            "difference" => BergmanParams::Difference(typed(text, raw.params, origin)?),
            "volume" => BergmanParams::Volume(typed(text, raw.params, origin)?),
            "gromov" => BergmanParams::Gromov(typed(text, raw.params, origin)?),
            other => {
                return Err(unknown_experiment(text, raw.params, origin, other, "distortion, difference, volume, gromov"))
            }
        }),
        CommandName::Intersect => Params::Intersect(typed(text, raw.params, origin)?),
        CommandName::HilbertSamuel => Params::HilbertSamuel(typed(text, raw.params, origin)?),
        CommandName::Siu => Params::Siu(typed(text, raw.params, origin)?),
    };
    Ok(RunConfig {
        schema: Schema,
        command: raw.command,
        precision_bits: raw.precision_bits,
        seed: raw.seed,
        tolerance: raw.tolerance,
        quadrature_budget: raw.quadrature_budget,
        threads: raw.threads,
        out: raw.out,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_canonical_echo() {
        let text = r#"{"schema":"arakelov-lab/1","command":"intersect","params":{"a":{"kind":"c","c":"1"}}}"#;
        let cfg = parse_config(text, "cfg").unwrap();
        assert_eq!(cfg.precision_bits, 128);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.tolerance, 1e-8);
        let echo = cfg.to_json();
        assert_eq!(parse_config(&echo, "echo").unwrap().to_json(), echo);
    }

    #[test]
    fn diagnostics_point_at_the_field() {
        let text = "{\n  \"schema\": \"arakelov-lab/1\",\n  \"command\": \"equidist\",\n  \"params\": {\n    \"experiment\": \"bilu\",\n    \"orders\": [5, \"x\"]\n  }\n}";
        let e = parse_config(text, "bad.json").unwrap_err();
        assert_eq!(e.line, 6, "{e}");
        assert!(e.path.starts_with("params.orders"), "{e}");
        let e = parse_config("{\"schema\":\"other/2\",\"command\":\"siu\",\"params\":{}}", "s").unwrap_err();
        assert_eq!(e.path, "schema");
        assert!(e.message.contains("unsupported schema"));
        let e = parse_config("{\"schema\":\"arakelov-lab/1\",\"command\":\"siu\",\"bogus\":1,\"params\":{}}", "s")
            .unwrap_err();
        assert!(e.message.contains("unknown field"), "{e}");
        let e = parse_config(
            "{\"schema\":\"arakelov-lab/1\",\"command\":\"siu\",\n\"tolerance\":-1,\"params\":{}}",
            "s",
        )
        .unwrap_err();
        assert_eq!((e.line, e.path.as_str()), (2, "tolerance"));
    }
}

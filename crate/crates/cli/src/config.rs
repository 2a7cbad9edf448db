//! Run configurations: parsing, per-pipeline schemas and tolerance tables.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use heunband::antikraw::{make_antispin, Ansatz};
use heunband::contdisc::{make_family, FamilyKind};
use heunband::leonard::{make_anti_krawtchouk, make_hahn, make_krawtchouk};
use heunband::LeonardPair;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    Discrete,
    Antikraw,
    Contdisc,
    Symbolic,
    VerifyAll,
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Discrete => "discrete",
            Self::Antikraw => "antikraw",
            Self::Contdisc => "contdisc",
            Self::Symbolic => "symbolic",
            Self::VerifyAll => "verify-all",
        })
    }
}

/// Operator identity checked by the symbolic pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    Prolate,
    Bessel,
    TildeD,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    Krawtchouk { p: f64 },
    Hahn { alpha: f64, beta: f64 },
    AntiKrawtchouk,
    Hermite,
    Laguerre { alpha: f64 },
    Jacobi { alpha: f64, beta: f64 },
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Krawtchouk { .. } => "krawtchouk",
            Self::Hahn { .. } => "hahn",
            Self::AntiKrawtchouk => "anti-krawtchouk",
            Self::Hermite => "hermite",
            Self::Laguerre { .. } => "laguerre",
            Self::Jacobi { .. } => "jacobi",
        }
    }

    pub fn continuous(&self) -> Option<FamilyKind> {
        match *self {
            Self::Hermite => Some(FamilyKind::Hermite),
            Self::Laguerre { alpha } => Some(FamilyKind::Laguerre { alpha }),
            Self::Jacobi { alpha, beta } => Some(FamilyKind::Jacobi { alpha, beta }),
            _ => None,
        }
    }

    /// Builds the finite Leonard pair of degree `n` for a discrete family.
    pub fn leonard_pair(&self, n: usize) -> heunband::Result<Option<LeonardPair>> {
        Ok(match *self {
            Self::Krawtchouk { p } => Some(make_krawtchouk(n, p)?),
            Self::Hahn { alpha, beta } => Some(make_hahn(n, alpha, beta)?),
            Self::AntiKrawtchouk => Some(make_anti_krawtchouk(n)?),
            _ => None,
        })
    }
}

/// One entry of the family catalogue printed by `heunband families`.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyInfo {
    pub kind: &'static str,
    pub pipelines: &'static str,
    pub parameters: &'static str,
    pub constraints: &'static str,
}

pub const FAMILIES: [FamilyInfo; 6] = [
    FamilyInfo {
        kind: "krawtchouk",
        pipelines: "discrete",
        parameters: "p",
        constraints: "0 < p < 1; N >= 2",
    },
    FamilyInfo {
        kind: "hahn",
        pipelines: "discrete",
        parameters: "alpha beta",
        constraints: "alpha, beta > -1; N >= 2",
    },
    FamilyInfo {
        kind: "anti-krawtchouk",
        pipelines: "discrete antikraw",
        parameters: "",
        constraints: "N even, N >= 2",
    },
    FamilyInfo {
        kind: "hermite",
        pipelines: "contdisc symbolic",
        parameters: "",
        constraints: "weight exp(-x^2)/sqrt(pi) on the real line",
    },
    FamilyInfo {
        kind: "laguerre",
        pipelines: "contdisc symbolic",
        parameters: "alpha",
        constraints: "alpha <= 0; weight x^(-alpha) exp(-x) on (0, inf); W > 0",
    },
    FamilyInfo {
        kind: "jacobi",
        pipelines: "contdisc symbolic",
        parameters: "alpha beta",
        constraints: "alpha, beta >= 0; weight on (-1, 1); -1 < W <= 1",
    },
];

/// Direction of a tolerance test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    /// The residual must not exceed the tolerance.
    AtMost,
    /// The residual must reach at least the tolerance.
    AtLeast,
}

/// Default tolerance of every residual a pipeline checks.
pub fn default_tolerances(pipeline: Pipeline) -> &'static [(&'static str, Bound, f64)] {
    use Bound::*;
    match pipeline {
        Pipeline::Discrete => &[
            ("kernel_cross_forms", AtMost, 1e-10),
            ("kernel_vs_v1", AtMost, 1e-10),
            ("m_pi1", AtMost, 1e-12),
            ("m_pi2", AtMost, 1e-12),
            ("m_v1", AtMost, 1e-10),
            ("m_v2", AtMost, 1e-10),
            ("rayleigh_vs_direct", AtMost, 1e-8),
            ("restricted_gap_ratio", AtLeast, 1e-6),
            ("v1_v2_spectra", AtMost, 1e-10),
        ],
        Pipeline::Antikraw => &[
            ("asymmetry", AtMost, 1e-12),
            ("comm_pi1", AtMost, 1e-10),
            ("comm_pi2", AtMost, 1e-10),
            ("comm_pi2_conjugated", AtMost, 1e-10),
            ("gap_ratio_e", AtLeast, 1e-8),
            ("gap_ratio_d", AtLeast, 1e-8),
            ("outside_band", AtMost, 1e-12),
            ("penta_conditions", AtMost, 1e-12),
        ],
        Pipeline::Contdisc => &[
            ("commutator", AtMost, 1e-8),
            ("offdiag_in_t_basis", AtMost, 1e-7),
            ("quadrature_error", AtMost, 1e-10),
            ("sigma_fit_deviation", AtMost, 1e-6),
        ],
        Pipeline::Symbolic => &[
            ("boundary_violations", AtMost, 0.0),
            ("identity_defect", AtMost, 1e-12),
            ("leading_at_w", AtMost, 1e-12),
        ],
        Pipeline::VerifyAll => &[],
    }
}

pub fn tolerance_bound(pipeline: Pipeline, name: &str) -> Option<Bound> {
    default_tolerances(pipeline)
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|&(_, b, _)| b)
}

/// One run as read from a configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub pipeline: Pipeline,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j2: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n2: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ansatz: Option<Ansatz>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<Identity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    /// Overrides of the default tolerances, keyed by residual name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    /// Output directory; the `--out` flag takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// A configuration for `pipeline` with every optional field unset.
    pub fn new(pipeline: Pipeline) -> Self {
        Self {
            name: None,
            pipeline,
            family: None,
            n: None,
            j1: None,
            j2: None,
            n1: None,
            n2: None,
            w: None,
            ansatz: None,
            identity: None,
            t: None,
            g: None,
            nu: None,
            tolerances: BTreeMap::new(),
            out: None,
        }
    }
}

/// A configuration that passed validation, with its effective tolerances.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidConfig {
    pub name: String,
    pub config: RunConfig,
    pub tolerances: BTreeMap<String, (Bound, f64)>,
}

impl ValidConfig {
    /// The configuration as echoed in reports: the original fields with the
    /// effective tolerances and the resolved name.
    pub fn echo(&self) -> RunConfig {
        let mut c = self.config.clone();
        c.name = Some(self.name.clone());
        c.tolerances = self.tolerances.iter().map(|(k, &(_, v))| (k.clone(), v)).collect();
        c.out = None;
        c
    }
}

/// Problems found in a configuration file, one line each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub diagnostics: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.diagnostics.join("\n"))
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    pub fn single(msg: impl Into<String>) -> Self {
        Self {
            diagnostics: vec![msg.into()],
        }
    }
}

/// A configuration file holds either one run or an array of runs.
#[derive(Deserialize)]
#[serde(untagged)]
enum ConfigFile {
    Batch(Vec<serde_json::Value>),
    Single(serde_json::Value),
}

/// Reads and parses a configuration file without validating it.
pub fn load_configs(path: &Path) -> Result<Vec<RunConfig>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::single(format!("{}: cannot read: {e}", path.display())))?;
    parse_configs(&text).map_err(|mut e| {
        for d in &mut e.diagnostics {
            *d = format!("{}: {d}", path.display());
        }
        e
    })
}

pub fn parse_configs(text: &str) -> Result<Vec<RunConfig>, ConfigError> {
    let file: ConfigFile = serde_json::from_str(text).map_err(|e| ConfigError::single(format!("invalid JSON: {e}")))?;
    let (values, batch) = match file {
        ConfigFile::Batch(v) => (v, true),
        ConfigFile::Single(v) => (vec![v], false),
    };
    if values.is_empty() {
        return Err(ConfigError::single("configuration batch is empty"));
    }
    let mut out = Vec::with_capacity(values.len());
    let mut diagnostics = Vec::new();
    for (i, v) in values.into_iter().enumerate() {
        match serde_json::from_value::<RunConfig>(v) {
            Ok(c) => out.push(c),
            Err(e) if batch => diagnostics.push(format!("entry {i}: {e}")),
            Err(e) => diagnostics.push(e.to_string()),
        }
    }
    if diagnostics.is_empty() {
        Ok(out)
    } else {
        Err(ConfigError { diagnostics })
    }
}

/// Parses `name=value` tolerance overrides from the command line.
pub fn parse_tol_overrides(items: &[String]) -> Result<BTreeMap<String, f64>, ConfigError> {
    let mut out = BTreeMap::new();
    let mut diagnostics = Vec::new();
    for item in items {
        match item.split_once('=') {
            Some((name, value)) if !name.trim().is_empty() => match value.trim().parse::<f64>() {
                Ok(v) => {
                    out.insert(name.trim().to_string(), v);
                }
                Err(_) => diagnostics.push(format!("--tol {item}: `{value}` is not a number")),
            },
            _ => diagnostics.push(format!("--tol {item}: expected NAME=VALUE")),
        }
    }
    if diagnostics.is_empty() {
        Ok(out)
    } else {
        Err(ConfigError { diagnostics })
    }
}

struct Schema<'a> {
    config: &'a RunConfig,
    diagnostics: Vec<String>,
}

impl Schema<'_> {
    fn fail(&mut self, msg: impl Into<String>) {
        self.diagnostics.push(msg.into());
    }

    fn present(&self) -> [(&'static str, bool); 12] {
        let c = self.config;
        [
            ("family", c.family.is_some()),
            ("n", c.n.is_some()),
            ("j1", c.j1.is_some()),
            ("j2", c.j2.is_some()),
            ("n1", c.n1.is_some()),
            ("n2", c.n2.is_some()),
            ("w", c.w.is_some()),
            ("ansatz", c.ansatz.is_some()),
            ("identity", c.identity.is_some()),
            ("t", c.t.is_some()),
            ("g", c.g.is_some()),
            ("nu", c.nu.is_some()),
        ]
    }

    /// Flags every field outside `allowed` and every missing field of
    /// `required`.
    fn fields(&mut self, allowed: &[&str], required: &[&str]) {
        let pipeline = self.config.pipeline;
        for (name, set) in self.present() {
            if set && !allowed.contains(&name) {
                self.fail(format!("field `{name}` is not used by the {pipeline} pipeline"));
            }
            if !set && required.contains(&name) {
                self.fail(format!("field `{name}` is required by the {pipeline} pipeline"));
            }
        }
    }

    fn finite(&mut self, name: &str, v: Option<f64>) {
        if let Some(v) = v {
            if !v.is_finite() {
                self.fail(format!("`{name}` = {v} must be finite"));
            }
        }
    }

    fn positive(&mut self, name: &str, v: Option<f64>) {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                self.fail(format!("`{name}` = {v} must be positive and finite"));
            }
        }
    }
}

/// Checks a configuration against its pipeline's schema and merges the
/// tolerance overrides (config file first, command line on top).
pub fn validate(
    config: RunConfig,
    index: Option<usize>,
    cli_tols: &BTreeMap<String, f64>,
) -> Result<ValidConfig, ConfigError> {
    let mut s = Schema {
        config: &config,
        diagnostics: Vec::new(),
    };
    match config.pipeline {
        Pipeline::Discrete => validate_discrete(&mut s),
        Pipeline::Antikraw => validate_antikraw(&mut s),
        Pipeline::Contdisc => validate_contdisc(&mut s),
        Pipeline::Symbolic => validate_symbolic(&mut s),
        Pipeline::VerifyAll => s.fields(&[], &[]),
    }
    let mut diagnostics = s.diagnostics;

    let mut tolerances: BTreeMap<String, (Bound, f64)> = default_tolerances(config.pipeline)
        .iter()
        .map(|&(n, b, v)| (n.to_string(), (b, v)))
        .collect();
    if config.pipeline == Pipeline::VerifyAll && !config.tolerances.is_empty() {
        diagnostics.push("the verify-all pipeline runs at pinned tolerances; remove `tolerances`".into());
    }
    for (name, &v) in config.tolerances.iter().chain(cli_tols) {
        if !(v >= 0.0 && v.is_finite()) {
            diagnostics.push(format!("tolerance `{name}` = {v} must be finite and non-negative"));
            continue;
        }
        match tolerances.get_mut(name) {
            Some(slot) => slot.1 = v,
            // Command-line overrides apply to every run that knows the name.
            None if cli_tols.contains_key(name) && !config.tolerances.contains_key(name) => {}
            None if config.pipeline == Pipeline::VerifyAll => {}
            None => {
                let known: Vec<&str> = default_tolerances(config.pipeline).iter().map(|t| t.0).collect();
                diagnostics.push(format!(
                    "unknown tolerance `{name}` for the {} pipeline (known: {})",
                    config.pipeline,
                    known.join(", ")
                ));
            }
        }
    }

    let name = match &config.name {
        Some(n) if n.is_empty() || n.contains(['/', '\\']) || n.starts_with('.') => {
            diagnostics.push(format!("`name` = {n:?} must be a plain, non-empty file stem"));
            n.clone()
        }
        Some(n) => n.clone(),
        None => match index {
            Some(i) => format!("{}-{i}", config.pipeline),
            None => config.pipeline.to_string(),
        },
    };
    if !diagnostics.is_empty() {
        let prefix = index.map(|i| format!("entry {i} ({name}): ")).unwrap_or_default();
        return Err(ConfigError {
            diagnostics: diagnostics.into_iter().map(|d| format!("{prefix}{d}")).collect(),
        });
    }
    Ok(ValidConfig {
        name,
        config,
        tolerances,
    })
}

/// Validates every run of a batch and rejects batches whose runs would
/// write to the same report path.
pub fn validate_batch(
    configs: Vec<RunConfig>,
    cli_tols: &BTreeMap<String, f64>,
) -> Result<Vec<ValidConfig>, ConfigError> {
    let batch = configs.len() > 1;
    let mut diagnostics = Vec::new();
    let mut valid = Vec::new();
    for (i, c) in configs.into_iter().enumerate() {
        match validate(c, batch.then_some(i), cli_tols) {
            Ok(v) => valid.push(v),
            Err(e) => diagnostics.extend(e.diagnostics),
        }
    }
    for name in cli_tols.keys() {
        let known = valid.iter().any(|v| v.tolerances.contains_key(name));
        if !known && diagnostics.is_empty() {
            diagnostics.push(format!(
                "--tol {name}: no run in this configuration checks a residual of that name"
            ));
        }
    }
    let mut seen = BTreeMap::new();
    for v in &valid {
        let key = (v.config.out.clone(), v.name.clone());
        if let Some(first) = seen.insert(key, v.name.clone()) {
            diagnostics.push(format!(
                "two runs share the name `{first}`; their reports would overwrite each other"
            ));
        }
    }
    if diagnostics.is_empty() {
        Ok(valid)
    } else {
        Err(ConfigError { diagnostics })
    }
}

fn validate_discrete(s: &mut Schema) {
    s.fields(&["family", "n", "j1", "j2"], &["family", "n", "j1", "j2"]);
    let c = s.config;
    let (Some(family), Some(n)) = (c.family, c.n) else {
        return;
    };
    if family.continuous().is_some() {
        s.fail(format!(
            "family `{}` is continuous; the discrete pipeline takes krawtchouk, hahn or anti-krawtchouk",
            family.name()
        ));
        return;
    }
    if let Err(e) = family.leonard_pair(n) {
        s.fail(format!("family `{}`: {e}", family.name()));
        return;
    }
    for (name, j) in [("j1", c.j1), ("j2", c.j2)] {
        if let Some(j) = j {
            if j >= n {
                s.fail(format!("`{name}` = {j} must lie in 0..={}", n - 1));
            }
        }
    }
}

fn validate_antikraw(s: &mut Schema) {
    s.fields(&["family", "n", "n1", "n2", "ansatz"], &["n", "n1", "n2"]);
    let c = s.config;
    if let Some(f) = c.family {
        if f != FamilySpec::AntiKrawtchouk {
            s.fail(format!(
                "the antikraw pipeline only takes family `anti-krawtchouk`, not `{}`",
                f.name()
            ));
        }
    }
    let Some(n) = c.n else { return };
    if let Err(e) = make_antispin(n) {
        s.fail(e.to_string());
        return;
    }
    let ansatz = c.ansatz.unwrap_or(Ansatz::Pentadiagonal);
    for (name, j) in [("n1", c.n1), ("n2", c.n2)] {
        let Some(j) = j else { continue };
        match ansatz {
            Ansatz::Bilinear if j >= n => s.fail(format!("`{name}` = {j} must lie in 0..={}", n.saturating_sub(1))),
            Ansatz::Pentadiagonal | Ansatz::Alternative if j < 1 || j + 2 > n => s.fail(format!(
                "`{name}` = {j} must lie in 1..={} for this ansatz",
                n as i64 - 2
            )),
            _ => {}
        }
    }
}

fn validate_continuous_family(s: &mut Schema) -> Option<FamilyKind> {
    let family = s.config.family?;
    let Some(kind) = family.continuous() else {
        s.fail(format!(
            "family `{}` is discrete; this pipeline takes hermite, laguerre or jacobi",
            family.name()
        ));
        return None;
    };
    match make_family(kind) {
        Ok(f) => {
            if let Some(w) = s.config.w {
                let (lo, hi) = f.support();
                let inside = w > lo && (w < hi || (hi.is_finite() && w == hi));
                if !inside {
                    s.fail(format!(
                        "`w` = {w} must lie in the support ({lo}, {hi}] of `{}`",
                        family.name()
                    ));
                }
            }
            Some(kind)
        }
        Err(e) => {
            s.fail(format!("family `{}`: {e}", family.name()));
            None
        }
    }
}

fn validate_contdisc(s: &mut Schema) {
    s.fields(&["family", "n", "w"], &["family", "n", "w"]);
    s.finite("w", s.config.w);
    validate_continuous_family(s);
    if s.config.n == Some(0) {
        s.fail("`n` must be at least 1");
    }
}

fn validate_symbolic(s: &mut Schema) {
    let Some(identity) = s.config.identity else {
        s.fields(&["identity", "family", "n", "w", "t", "g", "nu"], &["identity"]);
        return;
    };
    match identity {
        Identity::Prolate => {
            s.fields(&["identity", "t", "w"], &["t", "w"]);
            s.positive("t", s.config.t);
            s.finite("w", s.config.w);
        }
        Identity::Bessel => {
            s.fields(&["identity", "g", "t", "nu"], &["g", "t", "nu"]);
            s.positive("g", s.config.g);
            s.positive("t", s.config.t);
            s.finite("nu", s.config.nu);
        }
        Identity::TildeD => {
            s.fields(&["identity", "family", "n", "w"], &["family", "n", "w"]);
            s.finite("w", s.config.w);
            validate_continuous_family(s);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(text: &str) -> RunConfig {
        parse_configs(text).unwrap().remove(0)
    }

    #[test]
    fn discrete_config_round_trip() {
        let c = one(r#"{"pipeline":"discrete","family":{"kind":"krawtchouk","p":0.3},"n":20,"j1":7,"j2":11}"#);
        let v = validate(c, None, &BTreeMap::new()).unwrap();
        assert_eq!(v.name, "discrete");
        assert_eq!(v.tolerances["m_pi1"], (Bound::AtMost, 1e-12));
    }

    #[test]
    fn unknown_field_rejected_at_parse() {
        assert!(parse_configs(r#"{"pipeline":"discrete","bogus":1}"#).is_err());
        assert!(parse_configs(r#"{"pipeline":"nope"}"#).is_err());
    }

    #[test]
    fn schema_diagnostics_are_collected() {
        let c = one(r#"{"pipeline":"discrete","family":{"kind":"hermite"},"n":5,"w":0.2}"#);
        let e = validate(c, None, &BTreeMap::new()).unwrap_err();
        let all = e.to_string();
        assert!(all.contains("`w` is not used"), "{all}");
        assert!(all.contains("`j1` is required"), "{all}");
        assert!(all.contains("continuous"), "{all}");
    }

    #[test]
    fn cutoffs_out_of_range() {
        let c = one(r#"{"pipeline":"discrete","family":{"kind":"krawtchouk","p":0.3},"n":5,"j1":5,"j2":1}"#);
        assert!(validate(c, None, &BTreeMap::new())
            .unwrap_err()
            .to_string()
            .contains("`j1` = 5"));
        let c = one(r#"{"pipeline":"antikraw","n":8,"n1":7,"n2":3}"#);
        assert!(validate(c, None, &BTreeMap::new()).is_err());
        let c = one(r#"{"pipeline":"antikraw","n":7,"n1":2,"n2":3}"#);
        assert!(validate(c, None, &BTreeMap::new())
            .unwrap_err()
            .to_string()
            .contains("even"));
    }

    #[test]
    fn tolerance_overrides() {
        let c = one(
            r#"{"pipeline":"contdisc","family":{"kind":"hermite"},"n":4,"w":0.5,"tolerances":{"commutator":1e-6}}"#,
        );
        let cli = parse_tol_overrides(&["offdiag_in_t_basis=1e-3".into()]).unwrap();
        let v = validate(c, None, &cli).unwrap();
        assert_eq!(v.tolerances["commutator"].1, 1e-6);
        assert_eq!(v.tolerances["offdiag_in_t_basis"].1, 1e-3);
        let c = one(r#"{"pipeline":"contdisc","family":{"kind":"hermite"},"n":4,"w":0.5,"tolerances":{"nope":1}}"#);
        assert!(validate(c, None, &BTreeMap::new())
            .unwrap_err()
            .to_string()
            .contains("unknown tolerance"));
        assert!(parse_tol_overrides(&["x".into()]).is_err());
        assert!(parse_tol_overrides(&["x=abc".into()]).is_err());
    }

    #[test]
    fn w_outside_support() {
        let c = one(r#"{"pipeline":"contdisc","family":{"kind":"jacobi","alpha":0,"beta":0},"n":4,"w":1.5}"#);
        assert!(validate(c, None, &BTreeMap::new())
            .unwrap_err()
            .to_string()
            .contains("support"));
    }

    #[test]
    fn batch_names_must_be_distinct() {
        let cfgs =
            parse_configs(r#"[{"name":"a","pipeline":"verify-all"},{"name":"a","pipeline":"verify-all"}]"#).unwrap();
        assert!(validate_batch(cfgs, &BTreeMap::new()).is_err());
        let cfgs = parse_configs(r#"[{"pipeline":"verify-all"},{"pipeline":"verify-all"}]"#).unwrap();
        let v = validate_batch(cfgs, &BTreeMap::new()).unwrap();
        assert_eq!(v[1].name, "verify-all-1");
    }
}

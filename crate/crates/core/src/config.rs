//! Experiment configuration files.
//!
//! A config is a single JSON document:
//!
//! ```json
//! {
//!   "scenario": "catswap_snapshots",
//!   "physics":  { "n_qubits": 5, "nbar": 25.0, "z": [1.0, 0.0], "coupling": 1.0, "gamma": 0.0 },
//!   "numerics": { "fock_cutoff": 60, "snapshot_times": ["0", "t_r/2N", "t_r/N"] },
//!   "output":   { "directory": "out", "field_grid": { "resolution": [241, 241] } }
//! }
//! ```
//!
//! Times are either plain numbers or products of rational numbers and the
//! symbols `t_R`, `t_c`, `t_r`, `t_r1`, optionally divided by integers and
//! `N`, e.g. `"t_r/2N"`, `"3/4*t_r"`, `"2*t_c"`.

use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{timescales, Timescales};
use crate::error::{Error, Result};
use crate::hilbert::HilbertConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    CatswapSnapshots,
    Fig2Wigner,
    Fig3Sweep,
    JcCollapseRevival,
    Custom,
}

/// A time given as a number or a symbolic expression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeExpr {
    Value(f64),
    Symbolic(String),
}

impl TimeExpr {
    pub fn resolve(&self, ts: &Timescales, n_qubits: usize) -> Result<f64> {
        match self {
            Self::Value(v) => Ok(*v),
            Self::Symbolic(s) => parse_time(s, ts, n_qubits),
        }
    }
}

impl From<&str> for TimeExpr {
    fn from(s: &str) -> Self {
        Self::Symbolic(s.to_string())
    }
}

impl std::fmt::Display for TimeExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Value(v) => write!(f, "{v}"),
            Self::Symbolic(s) => f.write_str(s),
        }
    }
}

fn bad_time(expr: &str, why: &str) -> Error {
    Error::config("time", format!("cannot parse \"{expr}\": {why}"))
}

fn parse_number(s: &str, expr: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| bad_time(expr, &format!("\"{s}\" is not a number")))
}

/// Evaluates a time expression against the timescales of an `N`-qubit run.
pub fn parse_time(expr: &str, ts: &Timescales, n_qubits: usize) -> Result<f64> {
    let compact: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad_time(expr, "empty expression"));
    }
    let mut value = 1.0;
    for factor in compact.split('*') {
        let mut parts = factor.split('/');
        let head = parts.next().unwrap_or_default();
        value *= match head {
            "t_R" => ts.rabi,
            "t_c" => ts.collapse,
            "t_r" => ts.revival,
            "t_r1" => ts.first_revival,
            "N" => n_qubits as f64,
            "" => return Err(bad_time(expr, "missing operand")),
            s => parse_number(s, expr)?,
        };
        for divisor in parts {
            let d = if divisor == "N" {
                n_qubits as f64
            } else if let Some(k) = divisor.strip_suffix('N') {
                parse_number(k, expr)? * n_qubits as f64
            } else {
                parse_number(divisor, expr)?
            };
            if d == 0.0 {
                return Err(bad_time(expr, "division by zero"));
            }
            value /= d;
        }
    }
    Ok(value)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Physics {
    /// Defaults to 1 for `jc_collapse_revival` and 5 otherwise.
    pub n_qubits: Option<usize>,
    /// Qubit numbers for `fig2_wigner` (default `[4, 5]`) and `fig3_sweep`
    /// (default `[2, 3, 4, 5, 6]`).
    pub n_qubits_list: Option<Vec<usize>>,
    pub nbar: Option<f64>,
    /// Spin-cat parameter as `[re, im]`, default `[1, 0]`.
    pub z: Option<[f64; 2]>,
    pub coupling: Option<f64>,
    /// Defaults to 0.001 for `fig2_wigner` and 0 otherwise.
    pub gamma: Option<f64>,
    /// Decay rates for `fig3_sweep`, default `[1e-4, 1e-3, 1e-2, 1e-1]`.
    pub gammas: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    pub fock_cutoff: Option<usize>,
    pub dt: Option<f64>,
    pub t_final: Option<TimeExpr>,
    pub snapshot_times: Option<Vec<TimeExpr>>,
    pub record_every: Option<usize>,
    /// Azimuths in the spin-cat orientation search (0 disables it).
    pub phase_search: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldGridConfig {
    pub q_range: [f64; 2],
    pub p_range: [f64; 2],
    pub resolution: [usize; 2],
}

impl Default for FieldGridConfig {
    fn default() -> Self {
        Self {
            q_range: [-12.0, 12.0],
            p_range: [-12.0, 12.0],
            resolution: [241, 241],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpinGridConfig {
    pub theta: usize,
    pub phi: usize,
    pub lambert_radial: usize,
    pub lambert_angular: usize,
    /// `lambert` or `sphere`.
    pub projection: SpinProjection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinProjection {
    Lambert,
    Sphere,
}

impl Default for SpinGridConfig {
    fn default() -> Self {
        Self {
            theta: 181,
            phi: 360,
            lambert_radial: 101,
            lambert_angular: 360,
            projection: SpinProjection::Lambert,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramesConfig {
    pub interval: TimeExpr,
    #[serde(default = "yes")]
    pub field: bool,
    #[serde(default = "yes")]
    pub spin: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: String,
    pub formats: Vec<String>,
    pub field_grid: FieldGridConfig,
    pub spin_grid: SpinGridConfig,
    pub frames: Option<FramesConfig>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: "out".into(),
            formats: vec!["csv".into()],
            field_grid: FieldGridConfig::default(),
            spin_grid: SpinGridConfig::default(),
            frames: None,
        }
    }
}

/// Initial spin and field states for the `custom` scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub spin: SpinInit,
    pub field: FieldInit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpinInit {
    Coherent { z: [f64; 2] },
    Cat { z: [f64; 2] },
    Dicke { k: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldInit {
    Coherent { alpha: [f64; 2] },
    Cat { alpha: [f64; 2], sign: i8 },
    Fock { n: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub physics: Physics,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub initial: Option<InitialSpec>,
    /// Names from [`OBSERVABLES`]; scenario defaults apply when absent.
    #[serde(default)]
    pub observables: Option<Vec<String>>,
}

/// Observable names understood by the runner.
pub const OBSERVABLES: [&str; 7] = [
    "photon_number",
    "sx",
    "sy",
    "sz",
    "inversion",
    "excitation_number",
    "energy",
];

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| {
            Error::config(
                format!("line {}, column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config("path", format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    /// Default config for a scenario.
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            physics: Physics::default(),
            numerics: Numerics::default(),
            output: OutputConfig::default(),
            initial: None,
            observables: None,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.physics.n_qubits.unwrap_or(match self.scenario {
            Scenario::JcCollapseRevival => 1,
            _ => 5,
        })
    }

    pub fn n_qubits_list(&self) -> Vec<usize> {
        self.physics.n_qubits_list.clone().unwrap_or_else(|| match self.scenario {
            Scenario::Fig2Wigner => vec![4, 5],
            _ => (2..=6).collect(),
        })
    }

    pub fn nbar(&self) -> f64 {
        self.physics.nbar.unwrap_or(25.0)
    }

    pub fn z(&self) -> C64 {
        let [re, im] = self.physics.z.unwrap_or([1.0, 0.0]);
        C64::new(re, im)
    }

    pub fn coupling(&self) -> f64 {
        self.physics.coupling.unwrap_or(1.0)
    }

    pub fn gamma(&self) -> f64 {
        self.physics.gamma.unwrap_or(match self.scenario {
            Scenario::Fig2Wigner => 1e-3,
            _ => 0.0,
        })
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.physics
            .gammas
            .clone()
            .unwrap_or_else(|| vec![1e-4, 1e-3, 1e-2, 1e-1])
    }

    pub fn fock_cutoff(&self) -> usize {
        self.numerics
            .fock_cutoff
            .unwrap_or_else(|| HilbertConfig::default_fock_cutoff(self.nbar()))
    }

    pub fn record_every(&self) -> usize {
        self.numerics.record_every.unwrap_or(10)
    }

    pub fn phase_search(&self) -> usize {
        self.numerics.phase_search.unwrap_or(360)
    }

    pub fn observables(&self) -> Vec<String> {
        match &self.observables {
            Some(list) => list.clone(),
            None => match self.scenario {
                Scenario::JcCollapseRevival => vec!["inversion".into(), "photon_number".into()],
                Scenario::CatswapSnapshots | Scenario::Custom => {
                    vec!["photon_number".into(), "sz".into(), "excitation_number".into()]
                }
                _ => Vec::new(),
            },
        }
    }

    /// Snapshot times, unresolved.
    pub fn snapshot_exprs(&self) -> Vec<TimeExpr> {
        self.numerics.snapshot_times.clone().unwrap_or_else(|| match self.scenario {
            Scenario::CatswapSnapshots => vec!["0".into(), "t_r/2N".into(), "t_r/N".into()],
            _ => Vec::new(),
        })
    }

    pub fn timescales(&self) -> Result<Timescales> {
        timescales(self.coupling(), self.nbar(), self.n_qubits())
    }

    pub fn resolve_time(&self, expr: &TimeExpr) -> Result<f64> {
        expr.resolve(&self.timescales()?, self.n_qubits())
    }

    pub fn snapshot_times(&self) -> Result<Vec<f64>> {
        self.snapshot_exprs().iter().map(|e| self.resolve_time(e)).collect()
    }

    /// Final time: explicit, else the last snapshot, else the scenario default.
    pub fn t_final(&self) -> Result<f64> {
        if let Some(t) = &self.numerics.t_final {
            return self.resolve_time(t);
        }
        let snaps = self.snapshot_times()?;
        if let Some(last) = snaps.iter().copied().reduce(f64::max) {
            return Ok(last);
        }
        match self.scenario {
            Scenario::JcCollapseRevival => self.resolve_time(&"6/5*t_r".into()),
            _ => self.resolve_time(&"t_r/N".into()),
        }
    }

    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: Option<f64>, field: &str| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => {
                Err(Error::config(field, format!("must be positive and finite, got {x}")))
            }
            _ => Ok(()),
        };
        positive(self.physics.nbar, "physics.nbar")?;
        positive(self.physics.coupling, "physics.coupling")?;
        positive(self.numerics.dt, "numerics.dt")?;
        if let Some(g) = self.physics.gamma {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::config("physics.gamma", format!("must be non-negative, got {g}")));
            }
        }
        if self.n_qubits() == 0 {
            return Err(Error::config("physics.n_qubits", "must be at least 1"));
        }
        if let Some(list) = &self.physics.n_qubits_list {
            if list.is_empty() || list.contains(&0) {
                return Err(Error::config("physics.n_qubits_list", "must be non-empty with entries >= 1"));
            }
        }
        if let Some(list) = &self.physics.gammas {
            if list.is_empty() || list.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
                return Err(Error::config("physics.gammas", "must be non-empty with entries >= 0"));
            }
        }
        if self.fock_cutoff() == 0 {
            return Err(Error::config("numerics.fock_cutoff", "must be at least 1"));
        }
        if self.numerics.record_every == Some(0) {
            return Err(Error::config("numerics.record_every", "must be at least 1"));
        }
        for f in &self.output.formats {
            if f != "csv" {
                return Err(Error::config("output.formats", format!("unsupported format \"{f}\"")));
            }
        }
        let fg = &self.output.field_grid;
        if fg.resolution.iter().any(|&r| r < 2) || fg.q_range[0] >= fg.q_range[1] || fg.p_range[0] >= fg.p_range[1] {
            return Err(Error::config("output.field_grid", "needs increasing ranges and at least 2 points per axis"));
        }
        let sg = &self.output.spin_grid;
        if sg.theta < 2 || sg.phi < 2 || sg.lambert_radial < 2 || sg.lambert_angular < 2 {
            return Err(Error::config("output.spin_grid", "needs at least 2 points per axis"));
        }
        for name in self.observables() {
            if !OBSERVABLES.contains(&name.as_str()) {
                return Err(Error::config("observables", format!("unknown observable \"{name}\"")));
            }
        }
        if self.scenario == Scenario::Custom {
            if self.initial.is_none() {
                return Err(Error::config("initial", "required for the custom scenario"));
            }
            if self.numerics.t_final.is_none() && self.numerics.snapshot_times.is_none() {
                return Err(Error::config("numerics.t_final", "required for the custom scenario"));
            }
        }
        if let Some(FieldInit::Cat { sign, .. }) = self.initial.as_ref().map(|i| &i.field) {
            if sign.abs() != 1 {
                return Err(Error::config("initial.field.sign", "must be +1 or -1"));
            }
        }

        let ts = self
            .timescales()
            .map_err(|e| Error::config("physics", e.to_string()))?;
        let n = self.n_qubits();
        let resolve = |e: &TimeExpr, field: &str| {
            e.resolve(&ts, n)
                .map_err(|err| Error::config(field, err.to_string()))
        };
        let t_final = match &self.numerics.t_final {
            Some(t) => resolve(t, "numerics.t_final")?,
            None => self.t_final()?,
        };
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(Error::config("numerics.t_final", format!("must be non-negative, got {t_final}")));
        }
        for e in self.snapshot_exprs() {
            let t = resolve(&e, "numerics.snapshot_times")?;
            if !(0.0..=t_final * (1.0 + 1e-12)).contains(&t) {
                return Err(Error::config(
                    "numerics.snapshot_times",
                    format!("{e} = {t} lies outside [0, {t_final}]"),
                ));
            }
        }
        if let Some(frames) = &self.output.frames {
            let dt = resolve(&frames.interval, "output.frames.interval")?;
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::config("output.frames.interval", "must be positive"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ts() -> Timescales {
        timescales(1.0, 25.0, 5).unwrap()
    }

    #[test]
    fn symbolic_times() {
        let ts = ts();
        let t = |s: &str| parse_time(s, &ts, 5).unwrap();
        assert!((t("t_r/2N") - PI).abs() < 1e-12);
        assert!((t("t_r/N") - 2.0 * PI).abs() < 1e-12);
        assert!((t("t_r1") - 2.0 * PI).abs() < 1e-12);
        assert!((t("2*t_c") - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((t("3/4*t_r") - 7.5 * PI).abs() < 1e-12);
        assert!((t("t_R") - PI / 5.0).abs() < 1e-12);
        assert!((t(" 0 ") - 0.0).abs() < 1e-15);
        assert!((t("1.5") - 1.5).abs() < 1e-15);
        assert!((t("t_r / 10") - PI).abs() < 1e-12);
    }

    #[test]
    fn bad_symbolic_times() {
        let ts = ts();
        for s in ["", "t_x", "t_r/0", "t_r/", "*t_r", "t_r/2M"] {
            assert!(matches!(parse_time(s, &ts, 5), Err(Error::Config { .. })), "{s}");
        }
    }

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::from_json(r#"{"scenario": "catswap_snapshots"}"#).unwrap();
        assert_eq!(cfg.n_qubits(), 5);
        assert_eq!(cfg.fock_cutoff(), 60);
        let snaps = cfg.snapshot_times().unwrap();
        assert_eq!(snaps.len(), 3);
        assert!((snaps[1] - PI).abs() < 1e-12);
        assert!((cfg.t_final().unwrap() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn reports_line_and_field() {
        let err = ExperimentConfig::from_json("{\n \"scenario\": \"nope\"\n}").unwrap_err();
        match err {
            Error::Config { field, .. } => assert!(field.starts_with("line 2"), "{field}"),
            e => panic!("unexpected {e:?}"),
        }
        let err = ExperimentConfig::from_json(r#"{"scenario": "custom"}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "initial"));
        let err = ExperimentConfig::from_json(
            r#"{"scenario": "catswap_snapshots", "numerics": {"snapshot_times": ["t_r"], "t_final": "t_r/N"}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "numerics.snapshot_times"));
        let err = ExperimentConfig::from_json(r#"{"scenario": "fig3_sweep", "physics": {"nbar": -1}}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "physics.nbar"));
        let err = ExperimentConfig::from_json(r#"{"scenario": "fig3_sweep", "extra": 1}"#).unwrap_err();
        assert!(err.is_config_error());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::new(Scenario::Fig3Sweep);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.physics.nbar = Some(9.0);
        assert_ne!(a.hash(), b.hash());
    }
}

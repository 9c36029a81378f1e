//! Experiment configuration files (TOML, one experiment per file).

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::axisym::{RadialGrid, RadialState, Scheme};
use crate::coeffs::LeslieCoefficients;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    AxisymGlobal,
    AxisymBlowup,
    BarrierCheck,
    PoiseuilleCounterexample,
    PoiseuilleGeneric,
    HopfDecay,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::AxisymGlobal => "axisym_global",
            Experiment::AxisymBlowup => "axisym_blowup",
            Experiment::BarrierCheck => "barrier_check",
            Experiment::PoiseuilleCounterexample => "poiseuille_counterexample",
            Experiment::PoiseuilleGeneric => "poiseuille_generic",
            Experiment::HopfDecay => "hopf_decay",
        }
    }
}

/// Either the six viscosities, the pair `(λ₁, λ₂)`, or a named preset.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<[f64; 6]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
    /// `"simplified"` for `(0, −1, 1, 3, 0, 0)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
}

impl CoefficientSpec {
    pub fn resolve(&self) -> Result<LeslieCoefficients, HarnessError> {
        let c = match (&self.mu, self.lambda1, self.lambda2, self.preset.as_deref()) {
            (Some(mu), None, None, None) => LeslieCoefficients::new(*mu),
            (None, Some(l1), l2, None) => LeslieCoefficients::from_lambdas(l1, l2.unwrap_or(0.0)),
            (None, None, None, Some("simplified")) => LeslieCoefficients::simplified(),
            (None, None, None, Some(other)) => {
                return Err(HarnessError::Config(format!("unknown coefficient preset '{other}'")))
            }
            _ => {
                return Err(HarnessError::Config(
                    "coefficients: give exactly one of `mu`, `lambda1` (+ `lambda2`), or `preset`".into(),
                ))
            }
        };
        let verdict = c.validate().map_err(HarnessError::Validation)?;
        if !verdict.is_pass() {
            let names: Vec<String> = verdict.violations().iter().map(|r| r.to_string()).collect();
            return Err(HarnessError::Config(format!("coefficients violate: {}", names.join("; "))));
        }
        Ok(c)
    }
}

fn default_boundary() -> f64 {
    1.05 * PI
}

/// Initial angle profile on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `(π − 0.1)·r`
    Linear,
    /// `2·arctan(r/β₀) + (φ₁ − 2·arctan(1/β₀))·r`, which lies above the shrinking
    /// bubble at `t = 0` and takes the value `φ₁` at `r = 1`.
    Bubble {
        beta0: f64,
        #[serde(default = "default_boundary")]
        boundary: f64,
    },
    /// `amplitude·r`
    ScaledLinear { amplitude: f64 },
    /// Piecewise-linear through `(r, φ)` pairs from `(0, 0)` to `r = 1`.
    Table { points: Vec<[f64; 2]> },
}

impl InitialData {
    pub fn check(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        match self {
            InitialData::Linear => Ok(()),
            InitialData::Bubble { beta0, boundary } => {
                if !(*beta0 > 0.0) || !beta0.is_finite() {
                    return bad(format!("bubble beta0 must be > 0, got {beta0}"));
                }
                if !(*boundary >= 2.0 * (1.0 / beta0).atan()) {
                    return bad(format!("bubble boundary {boundary} lies below the bubble value at r = 1"));
                }
                Ok(())
            }
            InitialData::ScaledLinear { amplitude } => {
                if amplitude.is_finite() {
                    Ok(())
                } else {
                    bad("scaled_linear amplitude must be finite".into())
                }
            }
            InitialData::Table { points } => {
                if points.len() < 2 {
                    return bad("table needs at least two points".into());
                }
                if points[0] != [0.0, 0.0] {
                    return bad("table must start at (0, 0)".into());
                }
                if points.last().map(|p| p[0]) != Some(1.0) {
                    return bad("table must end at r = 1".into());
                }
                if points.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                    return bad("table radii must be strictly increasing".into());
                }
                if points.iter().flatten().any(|v| !v.is_finite()) {
                    return bad("table entries must be finite".into());
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            InitialData::Linear => (PI - 0.1) * r,
            InitialData::Bubble { beta0, boundary } => {
                2.0 * (r / beta0).atan() + (boundary - 2.0 * (1.0 / beta0).atan()) * r
            }
            InitialData::ScaledLinear { amplitude } => amplitude * r,
            InitialData::Table { points } => {
                let k = points.partition_point(|p| p[0] <= r).clamp(1, points.len() - 1);
                let (a, b) = (points[k - 1], points[k]);
                a[1] + (r - a[0]) * (b[1] - a[1]) / (b[0] - a[0])
            }
        }
    }

    pub fn state(&self, grid: RadialGrid) -> Result<RadialState, HarnessError> {
        RadialState::from_fn(grid, |r| self.eval(r)).map_err(HarnessError::Validation)
    }
}

fn default_n() -> usize {
    1024
}
fn default_one() -> usize {
    1
}
fn default_semi() -> Scheme {
    Scheme::SemiImplicit
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisymSection {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_semi")]
    pub scheme: Scheme,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub t_end: f64,
    pub initial: InitialData,
    /// Halt once `max |φ_r|` exceeds this (default `1/dr`, none for blow-up runs).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clip_guard: Option<f64>,
    /// Blow-up detection threshold (default `0.5/dr`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution_cap: Option<f64>,
    #[serde(default = "default_one")]
    pub monitor_stride: usize,
}

fn default_sets() -> usize {
    10
}
fn default_samples() -> usize {
    100
}
fn default_control() -> f64 {
    0.9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierSection {
    /// Number of random validated coefficient sets.
    #[serde(default = "default_sets")]
    pub sets: usize,
    /// Samples per axis of the `(r, t)` grid.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// `β₀^{1/3}` for the negative control.
    #[serde(default = "default_control")]
    pub control_cbrt_beta0: f64,
}

impl Default for BarrierSection {
    fn default() -> Self {
        Self { sets: 10, samples: 100, seed: 0, control_cbrt_beta0: 0.9 }
    }
}

fn default_half_width() -> f64 {
    5.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoiseuilleSection {
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    pub n: usize,
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Pressure-gradient constant.
    #[serde(default)]
    pub a: f64,
    /// Amplitude of `w₀ = A·x·exp(−x²)` for generic runs.
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

fn default_amplitude() -> f64 {
    1.0
}

fn default_lambdas() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0]
}
fn default_mesh() -> usize {
    64
}
fn default_ball_mesh() -> usize {
    32
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopfSection {
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default = "default_mesh")]
    pub mesh: usize,
    /// Mesh of the ball quadrature; `0` skips it.
    #[serde(default = "default_ball_mesh")]
    pub ball_mesh: usize,
    /// Scale the velocity by `1/λ` in the ball energy.
    #[serde(default = "default_true")]
    pub scale_u: bool,
}

impl Default for HopfSection {
    fn default() -> Self {
        Self { lambdas: default_lambdas(), mesh: 64, ball_mesh: 32, scale_u: true }
    }
}

fn default_snapshot_stride() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_snapshot_stride")]
    pub snapshot_stride: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<CoefficientSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axisym: Option<AxisymSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barrier: Option<BarrierSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poiseuille: Option<PoiseuilleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hopf: Option<HopfSection>,
}

impl ExperimentConfig {
    /// Parses and validates.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        if text.trim().is_empty() {
            return Err(HarnessError::Config("empty config".into()));
        }
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String, HarnessError> {
        toml::to_string(self).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Hex SHA-256 of the normalized TOML form.
    pub fn hash(&self) -> Result<String, HarnessError> {
        Ok(hex::encode(Sha256::digest(self.to_toml()?.as_bytes())))
    }

    /// Coefficients, defaulting to the simplified set for Poiseuille runs.
    pub fn coefficients(&self) -> Result<LeslieCoefficients, HarnessError> {
        match (&self.coefficients, self.experiment) {
            (Some(spec), _) => spec.resolve(),
            (None, Experiment::PoiseuilleGeneric | Experiment::PoiseuilleCounterexample) => {
                Ok(LeslieCoefficients::simplified())
            }
            (None, _) => Err(HarnessError::Config(format!(
                "experiment {} needs a [coefficients] section",
                self.experiment.name()
            ))),
        }
    }

    pub fn axisym(&self) -> Result<&AxisymSection, HarnessError> {
        self.axisym
            .as_ref()
            .ok_or_else(|| HarnessError::Config(format!("experiment {} needs an [axisym] section", self.experiment.name())))
    }

    pub fn poiseuille(&self) -> Result<&PoiseuilleSection, HarnessError> {
        self.poiseuille.as_ref().ok_or_else(|| {
            HarnessError::Config(format!("experiment {} needs a [poiseuille] section", self.experiment.name()))
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let cfg_err = |m: String| Err(HarnessError::Config(m));
        if self.snapshot_stride == 0 {
            return cfg_err("snapshot_stride must be >= 1".into());
        }
        match self.experiment {
            Experiment::AxisymGlobal | Experiment::AxisymBlowup => {
                let c = self.coefficients()?;
                let a = self.axisym()?;
                let grid = RadialGrid::new(a.n).map_err(HarnessError::Validation)?;
                a.initial.check()?;
                if !(a.t_end > 0.0) {
                    return cfg_err(format!("t_end must be > 0, got {}", a.t_end));
                }
                if a.monitor_stride == 0 {
                    return cfg_err("monitor_stride must be >= 1".into());
                }
                super::run::solver_params(a, &grid, &c, self.experiment)?;
                a.initial.state(grid)?;
            }
            Experiment::BarrierCheck => {
                let b = self.barrier.clone().unwrap_or_default();
                if b.sets == 0 || b.samples < 2 {
                    return cfg_err("barrier check needs sets >= 1 and samples >= 2".into());
                }
                if !(b.control_cbrt_beta0 > 0.0 && b.control_cbrt_beta0 < 1.0) {
                    return cfg_err("control_cbrt_beta0 must lie in (0, 1)".into());
                }
            }
            Experiment::PoiseuilleCounterexample | Experiment::PoiseuilleGeneric => {
                let c = self.coefficients()?;
                let p = self.poiseuille()?;
                let grid = crate::poiseuille::LineGrid::new(p.half_width, p.n).map_err(HarnessError::Validation)?;
                if !(p.t_end > 0.0) {
                    return cfg_err(format!("t_end must be > 0, got {}", p.t_end));
                }
                let limit = crate::poiseuille::stable_dt(&grid, &c).map_err(HarnessError::Validation)?;
                if let Some(dt) = p.dt {
                    if !(dt > 0.0) || dt > limit {
                        return cfg_err(format!("poiseuille dt {dt} outside (0, {limit}]"));
                    }
                }
                if self.experiment == Experiment::PoiseuilleCounterexample
                    && (c != LeslieCoefficients::simplified() || p.a != 0.0)
                {
                    return cfg_err("the counterexample runs only with the simplified coefficients and a = 0".into());
                }
            }
            Experiment::HopfDecay => {
                let h = self.hopf.clone().unwrap_or_default();
                if h.lambdas.is_empty() || h.lambdas.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
                    return cfg_err("hopf lambdas must be a non-empty list of positive values".into());
                }
                if h.lambdas.windows(2).any(|w| !(w[1] > w[0])) {
                    return cfg_err("hopf lambdas must be strictly increasing".into());
                }
                if h.mesh < 16 || (h.ball_mesh != 0 && h.ball_mesh < 16) {
                    return cfg_err("hopf meshes must be >= 16".into());
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BLOWUP: &str = r#"
experiment = "axisym_blowup"
snapshot_stride = 20

[coefficients]
lambda1 = 1.0
lambda2 = 0.0

[axisym]
n = 256
t_end = 0.35
initial = { preset = "bubble", beta0 = 1e-3 }
"#;

    #[test]
    fn empty_config_is_rejected() {
        assert!(matches!(ExperimentConfig::parse(""), Err(HarnessError::Config(_))));
        assert!(matches!(ExperimentConfig::parse("  \n# nothing\n"), Err(HarnessError::Config(_))));
    }

    #[test]
    fn unknown_preset_is_named() {
        let text = BLOWUP.replace("\"bubble\", beta0 = 1e-3", "\"spiral\"");
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert!(err.to_string().contains("spiral"), "{err}");
        let text = BLOWUP.replace("lambda1 = 1.0", "lambda1 = -1.0");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn round_trip_is_idempotent() {
        let cfg = ExperimentConfig::parse(BLOWUP).unwrap();
        let once = cfg.to_toml().unwrap();
        let again = ExperimentConfig::parse(&once).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_toml().unwrap(), once);
        assert_eq!(again.hash().unwrap(), cfg.hash().unwrap());
    }

    #[test]
    fn presets_evaluate() {
        let b = InitialData::Bubble { beta0: 1e-3, boundary: default_boundary() };
        assert_eq!(b.eval(0.0), 0.0);
        assert!((b.eval(1.0) - 1.05 * PI).abs() < 1e-12);
        for k in 0..=100 {
            let r = k as f64 / 100.0;
            assert!(b.eval(r) >= 2.0 * (r / 1e-3).atan());
        }
        let t = InitialData::Table { points: vec![[0.0, 0.0], [0.5, 1.0], [1.0, 3.0]] };
        t.check().unwrap();
        assert_eq!(t.eval(0.25), 0.5);
        assert_eq!(t.eval(0.75), 2.0);
        assert_eq!(t.eval(1.0), 3.0);
        assert!(InitialData::Table { points: vec![[0.0, 0.1], [1.0, 3.0]] }.check().is_err());
    }

    #[test]
    fn coefficient_forms() {
        let s = CoefficientSpec { preset: Some("simplified".into()), ..Default::default() };
        assert_eq!(s.resolve().unwrap(), LeslieCoefficients::simplified());
        let both = CoefficientSpec { preset: Some("simplified".into()), lambda1: Some(1.0), ..Default::default() };
        assert!(both.resolve().is_err());
        let bad = CoefficientSpec { mu: Some([0.0, -1.0, 1.0, -3.0, 0.0, 0.0]), ..Default::default() };
        assert!(bad.resolve().unwrap_err().to_string().contains("mu4 > 0"));
    }
}

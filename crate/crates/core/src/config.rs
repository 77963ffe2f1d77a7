//! Scenario configuration files (TOML).
//!
//! Every section is optional and falls back to per-scenario defaults; any
//! unknown key is rejected. [`ScenarioConfig::resolved`] fills the defaults
//! in so the emitted file parses back to the same value.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{RampKind, RampProfile, TimeGrid};
use crate::error::{Error, Result};
use crate::fockspace::{CompositeSpace, FockSpace};
use crate::model::{CrossingLabel, SystemParams};
use crate::wigner::PhaseSpaceGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioId {
    Spectrum,
    Beats,
    Quietstate,
    Wigner,
    FidelityScan,
    RampCompare,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 6] = [
        ScenarioId::Spectrum,
        ScenarioId::Beats,
        ScenarioId::Quietstate,
        ScenarioId::Wigner,
        ScenarioId::FidelityScan,
        ScenarioId::RampCompare,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioId::Spectrum => "spectrum",
            ScenarioId::Beats => "beats",
            ScenarioId::Quietstate => "quietstate",
            ScenarioId::Wigner => "wigner",
            ScenarioId::FidelityScan => "fidelity-scan",
            ScenarioId::RampCompare => "ramp-compare",
        }
    }

    /// Truncation used when the config does not set one.
    pub fn default_n_max(self) -> usize {
        match self {
            ScenarioId::Spectrum => 5,
            ScenarioId::FidelityScan => 12,
            _ => 10,
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario '{s}'")))
    }
}

/// Which crossing a named detuning and the target states refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossingChoice {
    I,
    II,
}

impl CrossingChoice {
    pub fn label(self) -> CrossingLabel {
        match self {
            CrossingChoice::I => CrossingLabel::I,
            CrossingChoice::II => CrossingLabel::II,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedDetuning {
    /// Δ* of the minimal gap found numerically.
    Located,
    /// The analytic G → 0 crossing condition.
    Predicted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Detuning {
    Value(f64),
    Named(NamedDetuning),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemSection {
    /// A number, `"located"` or `"predicted"`.
    pub detuning: Detuning,
    pub crossing: CrossingChoice,
    pub coupling: f64,
    pub parametric: f64,
    pub kappa: f64,
    pub gamma: f64,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self {
            detuning: Detuning::Named(NamedDetuning::Located),
            crossing: CrossingChoice::I,
            coupling: 1.0,
            parametric: 0.1,
            kappa: 0.0,
            gamma: 0.0,
        }
    }
}

impl SystemSection {
    /// Parameters with the detuning left at zero for later resolution.
    pub fn template(&self) -> SystemParams {
        SystemParams::new(0.0, self.coupling, self.parametric).with_decay(self.kappa, self.gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct FockSection {
    pub n_max: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeSection {
    pub t_end: f64,
    pub dt_out: f64,
    pub dt_int: f64,
    /// Keep every k-th state in the snapshot sidecar; 0 disables it.
    pub snapshot_stride: usize,
}

impl Default for TimeSection {
    fn default() -> Self {
        let g = TimeGrid::default();
        Self {
            t_end: g.t_end,
            dt_out: g.dt_out,
            dt_int: g.dt_int,
            snapshot_stride: 0,
        }
    }
}

impl TimeSection {
    pub fn grid(&self) -> TimeGrid {
        TimeGrid::new(self.t_end, self.dt_out, self.dt_int).with_snapshots(self.snapshot_stride)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    pub delta_min: f64,
    pub delta_max: f64,
    pub points: usize,
    /// Photon cutoff for the analytic crossing list.
    pub max_photon: usize,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            delta_min: 0.5,
            delta_max: 2.0,
            points: 1501,
            max_photon: 6,
        }
    }
}

/// One switch-on profile; `strength` defaults to the system's parametric
/// strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RampSpec {
    pub kind: RampKind,
    #[serde(default)]
    pub duration: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strength: Option<f64>,
}

impl RampSpec {
    pub fn profile(&self, default_strength: f64) -> RampProfile {
        RampProfile {
            kind: self.kind,
            final_strength: self.strength.unwrap_or(default_strength),
            duration: self.duration,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RampSection {
    pub first: RampSpec,
    pub second: RampSpec,
}

impl Default for RampSection {
    fn default() -> Self {
        Self {
            first: RampSpec {
                kind: RampKind::Constant,
                duration: 0.0,
                strength: None,
            },
            second: RampSpec {
                kind: RampKind::Tanh,
                duration: 20.0,
                strength: None,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    /// Values of g/G; G stays at `system.parametric`.
    pub ratios: Vec<f64>,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            ratios: vec![5.0, 10.0, 20.0, 35.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub fock: FockSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub phase_space: PhaseSpaceGrid,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub ramp: RampSection,
    #[serde(default)]
    pub scan: ScanSection,
}

impl ScenarioConfig {
    /// Complete defaults for `scenario`.
    pub fn defaults(scenario: ScenarioId) -> Self {
        Self {
            scenario: Some(scenario),
            ..Self::default()
        }
        .resolved(scenario)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Bind the config to `scenario` and fill scenario-dependent defaults.
    pub fn resolved(mut self, scenario: ScenarioId) -> Self {
        self.scenario = Some(scenario);
        self.fock.n_max.get_or_insert(scenario.default_n_max());
        self
    }

    /// Resolve against the scenario named on the command line, rejecting a
    /// conflicting `scenario` key, then validate.
    pub fn for_scenario(self, scenario: ScenarioId) -> Result<Self> {
        if let Some(s) = self.scenario {
            if s != scenario {
                return Err(Error::Config(format!(
                    "config is for scenario '{s}', not '{scenario}'"
                )));
            }
        }
        let cfg = self.resolved(scenario);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn scenario_id(&self) -> Result<ScenarioId> {
        self.scenario
            .ok_or_else(|| Error::Config("scenario is not set".into()))
    }

    pub fn n_max(&self) -> usize {
        self.fock
            .n_max
            .unwrap_or_else(|| self.scenario.map_or(10, ScenarioId::default_n_max))
    }

    pub fn space(&self) -> Result<CompositeSpace> {
        Ok(CompositeSpace::new(FockSpace::new(self.n_max())?))
    }

    pub fn validate(&self) -> Result<()> {
        let config_err = |e: Error| Error::Config(e.to_string());
        let mut template = self.system.template();
        if let Detuning::Value(d) = self.system.detuning {
            template = template.with_detuning(d);
        }
        template.validate().map_err(config_err)?;
        self.space().map_err(config_err)?;
        self.phase_space.validate().map_err(config_err)?;
        let s = &self.spectrum;
        if s.points < 3 {
            return Err(Error::Config(format!(
                "spectrum.points must be at least 3, got {}",
                s.points
            )));
        }
        if !(s.delta_min.is_finite() && s.delta_max.is_finite() && s.delta_max > s.delta_min) {
            return Err(Error::Config(
                "spectrum.delta_max must exceed spectrum.delta_min".into(),
            ));
        }
        match self.scenario {
            Some(ScenarioId::Spectrum) => {}
            Some(ScenarioId::FidelityScan) => {
                if self.scan.ratios.is_empty() {
                    return Err(Error::Config("scan.ratios must not be empty".into()));
                }
                if self
                    .scan
                    .ratios
                    .iter()
                    .any(|r| !(r.is_finite() && *r > 0.0))
                {
                    return Err(Error::Config("scan.ratios must be positive".into()));
                }
                if self.system.parametric <= 0.0 {
                    return Err(Error::Config("the g/G scan needs parametric > 0".into()));
                }
            }
            _ => {
                self.time.grid().validate().map_err(config_err)?;
                for spec in [self.ramp.first, self.ramp.second] {
                    spec.profile(self.system.parametric)
                        .validate()
                        .map_err(config_err)?;
                }
            }
        }
        Ok(())
    }
}

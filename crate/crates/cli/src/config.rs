//! TOML run configuration. Every key is optional and defaults to the
//! published device; unknown keys are rejected.

use std::path::{Path, PathBuf};

use dqdot::{DeviceSpec, ExcitonModel, Field, SolverSettings, Species};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub device: DeviceSection,
    pub electron: SpeciesSection,
    pub hole: SpeciesSection,
    pub solver: SolverSection,
    pub field: FieldSection,
    pub sweep_l: RangeSection,
    pub sweep_b: RangeSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceSection {
    pub well_width: f64,
    pub barrier: f64,
    pub depth_e_dot1: f64,
    pub depth_e_dot2: f64,
    pub depth_h_dot1: f64,
    pub depth_h_dot2: f64,
    pub binding_energy: f64,
    pub reference_offset: f64,
}

impl Default for DeviceSection {
    fn default() -> Self {
        let d = DeviceSpec::default();
        DeviceSection {
            well_width: d.well_width,
            barrier: d.barrier,
            depth_e_dot1: d.depth_e_dot1,
            depth_e_dot2: d.depth_e_dot2,
            depth_h_dot1: d.depth_h_dot1,
            depth_h_dot2: d.depth_h_dot2,
            binding_energy: d.binding_energy,
            reference_offset: d.reference_offset,
        }
    }
}

/// Missing keys fall back to the electron or hole defaults, depending on
/// which section they appear in.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpeciesSection {
    pub mass_ratio: Option<f64>,
    pub lateral_quantum: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub grid_step: f64,
    pub padding: f64,
    pub max_vertical_states: usize,
    pub lateral_quanta: usize,
    pub field_step: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverSettings::default();
        SolverSection {
            grid_step: s.grid_step,
            padding: s.padding,
            max_vertical_states: s.max_vertical_states,
            lateral_quanta: s.lateral_quanta,
            field_step: s.field_step,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldSection {
    pub b_tesla: f64,
}

/// Either an explicit `values` list or `start`/`stop`/`step`.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RangeSection {
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub svg: bool,
    /// 0 means all available cores.
    pub threads: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            svg: false,
            threads: 0,
        }
    }
}

pub const DEFAULT_L_RANGE: (f64, f64, f64) = (2.0, 20.0, 0.25);
pub const DEFAULT_B_RANGE: (f64, f64, f64) = (0.0, 8.0, 0.1);

impl RangeSection {
    /// Expanded values. A range includes `stop` when it lands on the grid.
    pub fn resolve(&self, name: &str, default: (f64, f64, f64)) -> Result<Vec<f64>, CliError> {
        if let Some(values) = &self.values {
            if self.start.is_some() || self.stop.is_some() || self.step.is_some() {
                return Err(CliError::config(format!(
                    "[{name}] give either `values` or `start`/`stop`/`step`"
                )));
            }
            if values.is_empty() {
                return Err(CliError::config(format!("[{name}] `values` is empty")));
            }
            return Ok(values.clone());
        }
        let start = self.start.unwrap_or(default.0);
        let stop = self.stop.unwrap_or(default.1);
        let step = self.step.unwrap_or(default.2);
        if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
            return Err(CliError::config(format!(
                "[{name}] invalid range start = {start}, stop = {stop}, step = {step}"
            )));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        Ok((0..=count).map(|k| start + k as f64 * step).collect())
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn device(&self) -> DeviceSpec {
        let d = &self.device;
        DeviceSpec {
            well_width: d.well_width,
            barrier: d.barrier,
            depth_e_dot1: d.depth_e_dot1,
            depth_e_dot2: d.depth_e_dot2,
            depth_h_dot1: d.depth_h_dot1,
            depth_h_dot2: d.depth_h_dot2,
            binding_energy: d.binding_energy,
            reference_offset: d.reference_offset,
        }
    }

    pub fn settings(&self) -> SolverSettings {
        let s = &self.solver;
        SolverSettings {
            grid_step: s.grid_step,
            padding: s.padding,
            max_vertical_states: s.max_vertical_states,
            lateral_quanta: s.lateral_quanta,
            field_step: s.field_step,
        }
    }

    fn species(section: &SpeciesSection, default: Species, name: &str) -> Result<Species, CliError> {
        Species::new(
            section.mass_ratio.unwrap_or(default.mass_ratio()),
            section.lateral_quantum.unwrap_or(default.lateral_quantum()),
            default.charge(),
        )
        .map_err(|e| CliError::config(format!("[{name}] {e}")))
    }

    /// Validated model. Every parameter is checked here, before any solve.
    pub fn model(&self) -> Result<ExcitonModel, CliError> {
        let electron = Self::species(&self.electron, Species::electron(), "electron")?;
        let hole = Self::species(&self.hole, Species::hole(), "hole")?;
        self.device()
            .validate()
            .map_err(|e| CliError::config(format!("[device] {e}")))?;
        self.settings()
            .validate()
            .map_err(|e| CliError::config(format!("[solver] {e}")))?;
        ExcitonModel::new(self.device(), electron, hole, self.settings()).map_err(CliError::from)
    }

    pub fn field(&self) -> Result<Field, CliError> {
        Field::new(self.field.b_tesla).map_err(|e| CliError::config(format!("[field] b_tesla: {e}")))
    }

    pub fn barriers(&self) -> Result<Vec<f64>, CliError> {
        let values = self.sweep_l.resolve("sweep_l", DEFAULT_L_RANGE)?;
        for w in values.windows(2) {
            if w[1] <= w[0] {
                return Err(CliError::config(
                    "[sweep_l] values must be strictly ascending".to_string(),
                ));
            }
        }
        if values.iter().any(|&l| !(l > 0.0)) {
            return Err(CliError::config("[sweep_l] values must be positive".to_string()));
        }
        Ok(values)
    }

    pub fn fields(&self) -> Result<Vec<Field>, CliError> {
        let values = self.sweep_b.resolve("sweep_b", DEFAULT_B_RANGE)?;
        for w in values.windows(2) {
            if w[1] < w[0] {
                return Err(CliError::config("[sweep_b] values must be ascending".to_string()));
            }
        }
        values
            .into_iter()
            .map(|b| Field::new(b).map_err(|e| CliError::config(format!("[sweep_b] {e}"))))
            .collect()
    }
}

/// Emission targets for `calibrate`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetsFile {
    pub emission_low: f64,
    pub emission_high: f64,
    #[serde(default = "default_target_barrier")]
    pub barrier: f64,
    #[serde(default = "default_ratio")]
    pub hole_to_electron_depth_ratio: f64,
}

fn default_target_barrier() -> f64 {
    50.0
}

fn default_ratio() -> f64 {
    0.5
}

impl TargetsFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read targets {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::config(format!("targets: {}", e.message())))
    }
}

//! Serializable run configuration: the on-disk form of a single computation.
//!
//! A `RunConfig` is what a figure manifest stores per output file; replaying
//! a manifest re-executes these bit-for-bit. Unknown keys are rejected
//! everywhere so stale or misspelled manifests fail loudly.

use heitler::model::FlatParams;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Steady,
    G2,
    Gn,
    G2Tau,
    Map,
    Conditions,
    Optimize,
    Validate,
    Convergence,
}

impl CommandKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandKind::Steady => "steady",
            CommandKind::G2 => "g2",
            CommandKind::Gn => "gn",
            CommandKind::G2Tau => "g2tau",
            CommandKind::Map => "map",
            CommandKind::Conditions => "conditions",
            CommandKind::Optimize => "optimize",
            CommandKind::Validate => "validate",
            CommandKind::Convergence => "convergence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatKind {
    #[default]
    Csv,
    Json,
}

/// Delay grid for `g2tau`: `tau = 0, step, 2*step, ..., <= max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TauSpec {
    pub tau_max: f64,
    pub tau_step: f64,
}

impl Default for TauSpec {
    fn default() -> Self {
        Self {
            tau_max: 20.0,
            tau_step: 0.1,
        }
    }
}

impl TauSpec {
    pub fn taus(&self) -> heitler::Result<Vec<f64>> {
        if !(self.tau_step > 0.0) || !self.tau_step.is_finite() {
            return Err(heitler::Error::InvalidParams(
                "tau_step must be positive and finite".into(),
            ));
        }
        if !(self.tau_max >= 0.0) || !self.tau_max.is_finite() {
            return Err(heitler::Error::InvalidParams(
                "tau_max must be non-negative and finite".into(),
            ));
        }
        let n = (self.tau_max / self.tau_step).floor() as usize;
        Ok((0..=n).map(|k| k as f64 * self.tau_step).collect())
    }
}

/// Correction-plane sweep axes. `F` runs inclusively from `f_from` to `f_to`;
/// the phase axis covers `[phi_from, phi_to)` end-exclusive so a full circle
/// does not duplicate its seam. The defaults reproduce the standard
/// 121 x 121 survey grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub f_from: f64,
    pub f_to: f64,
    pub f_steps: usize,
    pub phi_from: f64,
    pub phi_to: f64,
    pub phi_steps: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            f_from: 0.0,
            f_to: 6.0,
            f_steps: 121,
            phi_from: 0.0,
            phi_to: TAU,
            phi_steps: 121,
        }
    }
}

impl SweepSpec {
    pub fn f_values(&self) -> heitler::Result<Vec<f64>> {
        linspace_inclusive(self.f_from, self.f_to, self.f_steps, "F sweep")
    }

    pub fn phi_values(&self) -> heitler::Result<Vec<f64>> {
        if self.phi_steps == 0 {
            return Err(heitler::Error::InvalidParams(
                "phi sweep needs at least one step".into(),
            ));
        }
        if !self.phi_from.is_finite() || !self.phi_to.is_finite() {
            return Err(heitler::Error::InvalidParams(
                "phi sweep bounds must be finite".into(),
            ));
        }
        let span = self.phi_to - self.phi_from;
        let n = self.phi_steps as f64;
        Ok((0..self.phi_steps)
            .map(|k| self.phi_from + span * k as f64 / n)
            .collect())
    }
}

fn linspace_inclusive(from: f64, to: f64, steps: usize, what: &str) -> heitler::Result<Vec<f64>> {
    if steps == 0 {
        return Err(heitler::Error::InvalidParams(format!(
            "{what} needs at least one step"
        )));
    }
    if !from.is_finite() || !to.is_finite() {
        return Err(heitler::Error::InvalidParams(format!(
            "{what} bounds must be finite"
        )));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let step = (to - from) / (steps - 1) as f64;
    Ok((0..steps).map(|k| from + step * k as f64).collect())
}

/// Optimizer request: objective direction, optional pinned phase, and
/// optional search-control overrides (coarse grid density, line-search
/// width, `F` range). The stopping tolerance on the objective is fixed at
/// 1e-8.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizeSpec {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_fixed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coarse_f: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coarse_phi: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_tol: Option<f64>,
}

impl Default for OptimizeSpec {
    fn default() -> Self {
        Self {
            kind: "min".into(),
            phi_fixed: None,
            f_max: None,
            coarse_f: None,
            coarse_phi: None,
            x_tol: None,
        }
    }
}

/// Detuning-plane sweep for the optimizer (one optimization per cell), used
/// by the figure pipeline. `include_uncorrected` appends the plain `F = 0`
/// correlation per cell as an extra column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetuningSpec {
    pub delta_sigma_from: f64,
    pub delta_sigma_to: f64,
    pub delta_sigma_steps: usize,
    pub delta_a_from: f64,
    pub delta_a_to: f64,
    pub delta_a_steps: usize,
    #[serde(default)]
    pub include_uncorrected: bool,
}

impl DetuningSpec {
    pub fn delta_sigma_values(&self) -> heitler::Result<Vec<f64>> {
        linspace_inclusive(
            self.delta_sigma_from,
            self.delta_sigma_to,
            self.delta_sigma_steps,
            "delta_sigma sweep",
        )
    }

    pub fn delta_a_values(&self) -> heitler::Result<Vec<f64>> {
        linspace_inclusive(
            self.delta_a_from,
            self.delta_a_to,
            self.delta_a_steps,
            "delta_a sweep",
        )
    }
}

/// One computation: command, full parameter set, command-specific options,
/// and output destination. This is the manifest entry format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default)]
    pub params: FlatParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taus: Option<TauSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning: Option<DetuningSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default)]
    pub format: FormatKind,
}

impl RunConfig {
    /// Minimal config for `command` at `params`, streaming CSV to stdout.
    pub fn new(command: CommandKind, params: FlatParams) -> Self {
        Self {
            command,
            params,
            engine: None,
            order: None,
            taus: None,
            sweep: None,
            optimize: None,
            detuning: None,
            out: None,
            format: FormatKind::Csv,
        }
    }
}

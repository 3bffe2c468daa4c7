//! Parameter-space exploration: correction-plane maps of `g^(2)(0)`,
//! optimization of the correction amplitude and phase, and plateau analysis
//! of time-resolved traces.

use crate::analytic::{g2_dephasing, g2_no_dephasing, superbunching_condition};
use crate::dynamics::{g_n_zero_delay, gn_raw, G2Trace};
use crate::error::{Error, Result};
use crate::model::{CorrectionParams, SystemParams};
use crate::util::{rf, wrap_phase};
use crate::ComplexScalar;
use num_traits::{Float, One, Zero};
use std::f64::consts::TAU;
use std::str::FromStr;

/// Which evaluation route a sweep uses. There is no silent fallback: the
/// analytic engine refuses parameter regimes its closed forms do not cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Analytic,
    Numeric,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Numeric => "numeric",
        }
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Engine::Analytic),
            "numeric" => Ok(Engine::Numeric),
            other => Err(Error::InvalidParams(format!(
                "unknown engine '{other}' (expected 'analytic' or 'numeric')"
            ))),
        }
    }
}

/// Values above this are clamped in maps and flagged as diverged.
pub const DIVERGENCE_CAP: f64 = 1e6;

/// Per-cell status of a map evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellFlag {
    /// Finite value below the divergence cap (and converged, if numeric).
    Ok,
    /// Value exceeded [`DIVERGENCE_CAP`] (or was non-finite) and was clamped.
    Diverged,
    /// Numeric value finite but the probe-halving check moved it by >= 0.5%.
    Unconverged,
}

impl CellFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CellFlag::Ok => "ok",
            CellFlag::Diverged => "diverged",
            CellFlag::Unconverged => "unconverged",
        }
    }
}

/// Rectangular sweep over correction amplitude `F` and phase `phi`. All other
/// parameters (including the splitter amplitudes `t`, `r`) are taken from
/// `base`; its own `F` and `phi` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid<R> {
    pub f_values: Vec<R>,
    pub phi_values: Vec<R>,
    pub base: SystemParams<R>,
}

impl<R: Float> SweepGrid<R> {
    pub fn new(f_values: Vec<R>, phi_values: Vec<R>, base: SystemParams<R>) -> Result<Self> {
        let grid = Self {
            f_values,
            phi_values,
            base,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// The standard survey grid: `F` from 0 to 6 in steps of 0.05 and 121
    /// equally spaced phases covering `[0, 2*pi)`.
    pub fn default_grid(base: SystemParams<R>) -> Result<Self> {
        let f_values = (0..=120).map(|j| rf::<R>(0.05 * j as f64)).collect();
        let phi_values = (0..121).map(|k| rf::<R>(TAU * k as f64 / 121.0)).collect();
        Self::new(f_values, phi_values, base)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.f_values.is_empty() || self.phi_values.is_empty() {
            return Err(Error::InvalidParams("sweep grid must be non-empty".into()));
        }
        for &f in &self.f_values {
            if !f.is_finite() || f < R::zero() {
                return Err(Error::InvalidParams(
                    "sweep F values must be finite and non-negative".into(),
                ));
            }
        }
        if self.phi_values.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParams("sweep phases must be finite".into()));
        }
        if self.f_values.iter().any(|&f| f > R::zero()) && !(self.base.correction.r > R::zero()) {
            return Err(Error::InvalidParams(
                "sweeping F > 0 needs a correction port (r > 0) in the base parameters".into(),
            ));
        }
        Ok(())
    }
}

/// A `g^(2)(0)` map over the correction plane. `values[i][j]` belongs to
/// `(f_values[i], phi_values[j])`; entries above [`DIVERGENCE_CAP`] are
/// clamped and flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct MapResult<R> {
    pub f_values: Vec<R>,
    pub phi_values: Vec<R>,
    pub values: Vec<Vec<R>>,
    pub flags: Vec<Vec<CellFlag>>,
}

enum AnalyticForm {
    NoDephasing,
    Dephasing,
}

fn analytic_form<R: Float>(base: &SystemParams<R>) -> Result<AnalyticForm> {
    if base.emitter.gamma_phi == R::zero() {
        Ok(AnalyticForm::NoDephasing)
    } else if base.emitter.delta_sigma == R::zero() && base.detection.delta_a == R::zero() {
        Ok(AnalyticForm::Dephasing)
    } else {
        Err(Error::domain(
            "analytic g2 map",
            "closed forms cover gamma_phi = 0 (any detuning) or resonant driving with dephasing; \
             use the numeric engine for detuned dephasing",
        ))
    }
}

fn cell_system<R: Float>(base: &SystemParams<R>, f: R, phi: R) -> Result<SystemParams<R>> {
    let corr = CorrectionParams::new(f, wrap_phase(phi), base.correction.t, base.correction.r)?;
    SystemParams::new(base.emitter, base.detection, corr)
}

/// Evaluate `g^(2)(0)` over a correction-plane grid.
///
/// The analytic engine uses the closed forms (fast, exact in the
/// vanishing-coupling limit) and errors on regimes they do not cover. The
/// numeric engine runs the full steady-state evaluation per cell, including
/// the probe-halving convergence check.
pub fn g2_map<C: ComplexScalar>(
    grid: &SweepGrid<C::Real>,
    engine: Engine,
) -> Result<MapResult<C::Real>> {
    grid.validate()?;
    let cap = rf::<C::Real>(DIVERGENCE_CAP);
    let form = match engine {
        Engine::Analytic => Some(analytic_form(&grid.base)?),
        Engine::Numeric => {
            if !(grid.base.detection.g > C::Real::zero()) {
                return Err(Error::InvalidParams(
                    "numeric map evaluation needs g > 0".into(),
                ));
            }
            None
        }
    };
    let mut values = Vec::with_capacity(grid.f_values.len());
    let mut flags = Vec::with_capacity(grid.f_values.len());
    for &f in &grid.f_values {
        let mut row = Vec::with_capacity(grid.phi_values.len());
        let mut row_flags = Vec::with_capacity(grid.phi_values.len());
        for &phi in &grid.phi_values {
            let sys = cell_system(&grid.base, f, phi)?;
            let (raw, mut flag) = match &form {
                Some(AnalyticForm::NoDephasing) => {
                    let v = g2_no_dephasing(&sys.emitter, &sys.detection, &sys.correction)?;
                    (v, CellFlag::Ok)
                }
                Some(AnalyticForm::Dephasing) => {
                    let v = g2_dephasing(&sys.emitter, &sys.detection, &sys.correction)?;
                    (v, CellFlag::Ok)
                }
                None => {
                    let res = g_n_zero_delay::<C>(&sys, 2)?;
                    let flag = if res.converged {
                        CellFlag::Ok
                    } else {
                        CellFlag::Unconverged
                    };
                    (res.value, flag)
                }
            };
            let value = if !raw.is_finite() || raw > cap {
                flag = CellFlag::Diverged;
                cap
            } else {
                raw
            };
            row.push(value);
            row_flags.push(flag);
        }
        values.push(row);
        flags.push(row_flags);
    }
    Ok(MapResult {
        f_values: grid.f_values.clone(),
        phi_values: grid.phi_values.clone(),
        values,
        flags,
    })
}

/// Whether to minimize or maximize `g^(2)(0)` over the correction plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizeKind {
    Min,
    Max,
}

impl OptimizeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OptimizeKind::Min => "min",
            OptimizeKind::Max => "max",
        }
    }
}

impl FromStr for OptimizeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(OptimizeKind::Min),
            "max" => Ok(OptimizeKind::Max),
            other => Err(Error::InvalidParams(format!(
                "unknown optimization kind '{other}' (expected 'min' or 'max')"
            ))),
        }
    }
}

/// Result of a correction-plane optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimizeOutcome<R> {
    Optimum {
        kind: OptimizeKind,
        value: R,
        at_f: R,
        at_phi: R,
        evaluations: usize,
    },
    /// Without dephasing the maximum is a genuine pole: the objective grows
    /// without bound approaching the reported point, so no finite maximum
    /// exists and no search is attempted.
    Unbounded {
        at_f: R,
        at_phi: R,
        evaluations: usize,
    },
}

/// Search controls for [`optimize_g2_with`].
#[derive(Debug, Clone, Copy)]
pub struct OptimizeSettings<R> {
    /// Upper end of the `F` search interval (lower end is 0).
    pub f_max: R,
    /// Number of coarse `F` samples (>= 2).
    pub coarse_f: usize,
    /// Number of coarse phase samples over `[0, 2*pi)` (>= 2).
    pub coarse_phi: usize,
    /// Stop refining when a full round improves the objective by less than
    /// this (relative to `max(1, |value|)`).
    pub value_tol: R,
    /// Golden-section bracket width at which a 1-D line search stops.
    pub x_tol: R,
    /// Hard cap on alternating refinement rounds.
    pub max_rounds: usize,
}

impl<R: Float> Default for OptimizeSettings<R> {
    fn default() -> Self {
        Self {
            f_max: rf(6.0),
            coarse_f: 61,
            coarse_phi: 64,
            value_tol: rf(1e-8),
            x_tol: rf(1e-7),
            max_rounds: 40,
        }
    }
}

impl<R: Float> OptimizeSettings<R> {
    fn validate(&self) -> Result<()> {
        if !(self.f_max > R::zero()) || !self.f_max.is_finite() {
            return Err(Error::InvalidParams("f_max must be finite and > 0".into()));
        }
        if self.coarse_f < 2 || self.coarse_phi < 2 {
            return Err(Error::InvalidParams(
                "coarse grid needs at least 2 samples per axis".into(),
            ));
        }
        if !(self.value_tol > R::zero()) || !(self.x_tol > R::zero()) {
            return Err(Error::InvalidParams("tolerances must be > 0".into()));
        }
        Ok(())
    }
}

/// Golden-section minimization of a unimodal objective on `[lo, hi]`.
/// Returns `(x, f(x))` at the narrowed bracket.
fn golden_min<R: Float, F: FnMut(R) -> Result<R>>(
    mut f: F,
    lo: R,
    hi: R,
    x_tol: R,
) -> Result<(R, R)> {
    let inv_phi = rf::<R>(0.618_033_988_749_894_9);
    let inv_phi2 = R::one() - inv_phi;
    let mut a = lo;
    let mut b = hi;
    if !(b > a) {
        return Ok((a, f(a)?));
    }
    let mut c = a + inv_phi2 * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut yc = f(c)?;
    let mut yd = f(d)?;
    while b - a > x_tol {
        if yc < yd {
            b = d;
            d = c;
            yd = yc;
            c = a + inv_phi2 * (b - a);
            yc = f(c)?;
        } else {
            a = c;
            c = d;
            yc = yd;
            d = a + inv_phi * (b - a);
            yd = f(d)?;
        }
    }
    if yc < yd {
        Ok((c, yc))
    } else {
        Ok((d, yd))
    }
}

/// Optimize `g^(2)(0)` over the correction plane with the default search
/// settings; see [`optimize_g2_with`].
pub fn optimize_g2<C: ComplexScalar>(
    base: &SystemParams<C::Real>,
    kind: OptimizeKind,
    phi_fixed: Option<C::Real>,
) -> Result<OptimizeOutcome<C::Real>> {
    optimize_g2_with::<C>(base, kind, phi_fixed, OptimizeSettings::default())
}

/// Optimize `g^(2)(0)` over `F` in `[0, f_max]` and, unless `phi_fixed` is
/// given, the phase.
///
/// The objective route is picked automatically: closed forms when they cover
/// the regime (no dephasing; or dephasing at resonance), otherwise the full
/// numeric evaluation. A coarse scan seeds alternating golden-section line
/// searches in `F` and the phase. When the numeric route is used, the final
/// reported value is re-evaluated with the probe-halving convergence check.
///
/// Maximization without dephasing is unbounded (the objective has a pole);
/// this is reported as [`OptimizeOutcome::Unbounded`] with the pole location,
/// unless a fixed phase keeps the search away from it.
pub fn optimize_g2_with<C: ComplexScalar>(
    base: &SystemParams<C::Real>,
    kind: OptimizeKind,
    phi_fixed: Option<C::Real>,
    settings: OptimizeSettings<C::Real>,
) -> Result<OptimizeOutcome<C::Real>> {
    base.validate()?;
    settings.validate()?;
    if let Some(p) = phi_fixed {
        if !p.is_finite() {
            return Err(Error::InvalidParams("fixed phase must be finite".into()));
        }
    }
    if !(base.correction.r > C::Real::zero()) {
        return Err(Error::InvalidParams(
            "optimizing over F needs a correction port (r > 0) in the base parameters".into(),
        ));
    }

    // Pole detection: without dephasing the maximum is unbounded whenever the
    // search is free to reach the pole phase.
    if kind == OptimizeKind::Max && base.emitter.gamma_phi == C::Real::zero() {
        let (f_pole, phi_pole) = superbunching_condition(&base.emitter)?;
        let pole_tol = rf::<C::Real>(1e-9);
        let reachable = match phi_fixed {
            None => true,
            Some(p) => {
                let dp = (wrap_phase(p) - phi_pole).abs();
                dp <= pole_tol || dp >= rf::<C::Real>(TAU) - pole_tol
            }
        };
        if reachable && f_pole <= settings.f_max {
            return Ok(OptimizeOutcome::Unbounded {
                at_f: f_pole,
                at_phi: phi_pole,
                evaluations: 0,
            });
        }
    }

    enum Objective {
        NoDephasing,
        Dephasing,
        Numeric,
    }
    let objective = if base.emitter.gamma_phi == C::Real::zero() {
        Objective::NoDephasing
    } else if base.emitter.delta_sigma == C::Real::zero()
        && base.detection.delta_a == C::Real::zero()
    {
        Objective::Dephasing
    } else {
        if !(base.detection.g > C::Real::zero()) {
            return Err(Error::InvalidParams(
                "numeric optimization needs g > 0".into(),
            ));
        }
        Objective::Numeric
    };

    let sign = match kind {
        OptimizeKind::Min => C::Real::one(),
        OptimizeKind::Max => -C::Real::one(),
    };
    let cap = rf::<C::Real>(DIVERGENCE_CAP);
    let mut evaluations = 0usize;
    // Signed objective: minimized in all cases; +inf poles are clamped to the
    // divergence cap so a Min search is never attracted to them and a Max
    // search (dephasing or fixed-phase) remains well-posed.
    let mut eval = |f: C::Real, phi: C::Real| -> Result<C::Real> {
        evaluations += 1;
        let sys = cell_system(base, f, phi)?;
        let raw = match objective {
            Objective::NoDephasing => {
                g2_no_dephasing(&sys.emitter, &sys.detection, &sys.correction)?
            }
            Objective::Dephasing => g2_dephasing(&sys.emitter, &sys.detection, &sys.correction)?,
            Objective::Numeric => gn_raw::<C>(&sys, 2)?.0,
        };
        let clamped = if raw.is_finite() { raw.min(cap) } else { cap };
        Ok(sign * clamped)
    };

    // Coarse scan.
    let f_step = settings.f_max / rf::<C::Real>((settings.coarse_f - 1) as f64);
    let phi_step = rf::<C::Real>(TAU / settings.coarse_phi as f64);
    let phi_list: Vec<C::Real> = match phi_fixed {
        Some(p) => vec![wrap_phase(p)],
        None => (0..settings.coarse_phi)
            .map(|k| phi_step * rf::<C::Real>(k as f64))
            .collect(),
    };
    let mut best_f = C::Real::zero();
    let mut best_phi = phi_list[0];
    let mut best_v = C::Real::infinity();
    for j in 0..settings.coarse_f {
        let f = f_step * rf::<C::Real>(j as f64);
        for &phi in &phi_list {
            let v = eval(f, phi)?;
            // Prefer strictly better values; on ties keep the smallest F.
            let improved = if best_v.is_finite() {
                let tie = rf::<C::Real>(1e-10) * best_v.abs().max(C::Real::one());
                v < best_v - tie || ((v - best_v).abs() <= tie && f < best_f)
            } else {
                v < best_v
            };
            if improved {
                best_f = f;
                best_phi = phi;
                best_v = v;
            }
        }
    }

    // Alternating golden-section refinement with a shrinking bracket.
    let mut df = f_step;
    let mut dphi = phi_step;
    for _ in 0..settings.max_rounds {
        let before = best_v;
        let lo = (best_f - df).max(C::Real::zero());
        let hi = (best_f + df).min(settings.f_max);
        let (f_new, v_new) = golden_min(|f| eval(f, best_phi), lo, hi, settings.x_tol)?;
        if v_new < best_v {
            best_f = f_new;
            best_v = v_new;
        }
        if phi_fixed.is_none() {
            let (p_new, v_new) = golden_min(
                |p| eval(best_f, wrap_phase(p)),
                best_phi - dphi,
                best_phi + dphi,
                settings.x_tol,
            )?;
            if v_new < best_v {
                best_phi = wrap_phase(p_new);
                best_v = v_new;
            }
        }
        df *= rf::<C::Real>(0.5);
        dphi *= rf::<C::Real>(0.5);
        if (before - best_v).abs() < settings.value_tol * best_v.abs().max(C::Real::one()) {
            break;
        }
    }

    let value = match objective {
        Objective::Numeric => {
            // Re-evaluate the optimum with the convergence doctrine so the
            // reported number carries the probe-halving check.
            let sys = cell_system(base, best_f, best_phi)?;
            let res = g_n_zero_delay::<C>(&sys, 2)?;
            evaluations += 2;
            res.value
        }
        _ => sign * best_v,
    };
    Ok(OptimizeOutcome::Optimum {
        kind,
        value,
        at_f: best_f,
        at_phi: wrap_phase(best_phi),
        evaluations,
    })
}

/// Delay at which a time-resolved trace first rises to `threshold`
/// (`0 < threshold < 1`), with linear interpolation between samples.
/// Returns 0 when the trace already starts at or above the threshold, and
/// the last delay when it never reaches it.
pub fn plateau_extent<R: Float>(trace: &G2Trace<R>, threshold: R) -> Result<R> {
    if !(threshold > R::zero()) || !(threshold < R::one()) {
        return Err(Error::InvalidParams(
            "plateau threshold must lie strictly between 0 and 1".into(),
        ));
    }
    if trace.taus.is_empty() || trace.taus.len() != trace.values.len() {
        return Err(Error::InvalidParams(
            "trace must be non-empty with matching delay/value lengths".into(),
        ));
    }
    if trace.values[0] >= threshold {
        return Ok(R::zero());
    }
    for i in 1..trace.values.len() {
        let (v0, v1) = (trace.values[i - 1], trace.values[i]);
        if v1 >= threshold {
            let (t0, t1) = (trace.taus[i - 1], trace.taus[i]);
            if v1 == v0 {
                return Ok(t1);
            }
            return Ok(t0 + (threshold - v0) * (t1 - t0) / (v1 - v0));
        }
    }
    Ok(*trace.taus.last().expect("non-empty"))
}

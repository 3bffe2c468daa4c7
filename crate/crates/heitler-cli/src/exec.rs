//! Command execution: turn a [`RunConfig`](crate::config::RunConfig) into
//! rendered output bytes plus a one-line human summary.

use crate::config::{CommandKind, OptimizeSpec, RunConfig};
use crate::render::{fmt_f, Cell, Table};
use heitler::algebra::{boson_ops, kron};
use heitler::analytic::{
    antibunching_condition, g2_dephasing, g2_no_dephasing, g2_tau_far_detuned,
    superbunching_condition,
};
use heitler::dynamics::{convergence_report, g2_tau, g_n_zero_delay, steady_state};
use heitler::explore::{
    g2_map, optimize_g2_with, CellFlag, Engine, OptimizeKind, OptimizeOutcome, OptimizeSettings,
    SweepGrid,
};
use heitler::model::{FlatParams, SystemParams};
use heitler::ndarray::Array2;
use heitler::{C64, Error, Result};
use std::str::FromStr;

/// Rendered result of one run.
pub struct ExecOutput {
    /// Exact bytes of the output artifact.
    pub bytes: String,
    /// One-line human summary (never part of the artifact).
    pub summary: String,
}

fn engine_of(cfg: &RunConfig) -> Result<Engine> {
    match cfg.engine.as_deref() {
        None => Ok(Engine::Numeric),
        Some(s) => Engine::from_str(s),
    }
}

/// Closed-form `g^(2)(0)` dispatch: no dephasing at any detuning, or
/// dephasing at resonance; anything else is outside the analytic domain.
fn analytic_g2(sys: &SystemParams<f64>) -> Result<f64> {
    if sys.emitter.gamma_phi == 0.0 {
        g2_no_dephasing(&sys.emitter, &sys.detection, &sys.correction)
    } else if sys.emitter.delta_sigma == 0.0 && sys.detection.delta_a == 0.0 {
        g2_dephasing(&sys.emitter, &sys.detection, &sys.correction)
    } else {
        Err(Error::domain(
            "analytic g2",
            "closed forms cover gamma_phi = 0 (any detuning) or resonant driving with dephasing; \
             use the numeric engine for detuned dephasing",
        ))
    }
}

fn at_correction(params: &FlatParams, f: f64, phi: f64) -> FlatParams {
    FlatParams {
        f,
        phi,
        ..*params
    }
}

fn flag_cell(flag: CellFlag) -> Cell {
    Cell::Word(flag.as_str())
}

/// Execute one configured computation.
pub fn execute(cfg: &RunConfig) -> Result<ExecOutput> {
    match cfg.command {
        CommandKind::Steady => run_steady(cfg),
        CommandKind::G2 => run_g2(cfg),
        CommandKind::Gn => run_gn(cfg),
        CommandKind::G2Tau => run_g2tau(cfg),
        CommandKind::Map => run_map(cfg),
        CommandKind::Conditions => run_conditions(cfg),
        CommandKind::Optimize => run_optimize(cfg),
        CommandKind::Validate => run_validate(cfg),
        CommandKind::Convergence => run_convergence(cfg),
    }
}

fn run_steady(cfg: &RunConfig) -> Result<ExecOutput> {
    let sys = cfg.params.to_system::<f64>()?;
    let rho = steady_state::<C64>(&sys)?;
    let red = rho.reduced_emitter()?;
    let (a, ad) = boson_ops::<C64>(sys.detection.trunc);
    let number_op = kron(&Array2::<C64>::eye(2), &ad.dot(&a));
    let n_a = rho.expectation(&number_op)?.re;
    let n_sigma = red[(1, 1)].re;
    let coh = red[(0, 1)];

    let mut t = Table::new(&["observable", "value"]);
    t.push(vec![Cell::Word("n_sigma"), Cell::num(n_sigma)]);
    t.push(vec![Cell::Word("n_a"), Cell::num(n_a)]);
    t.push(vec![Cell::Word("coherence_re"), Cell::num(coh.re)]);
    t.push(vec![Cell::Word("coherence_im"), Cell::num(coh.im)]);
    Ok(ExecOutput {
        bytes: t.render(cfg.format),
        summary: format!(
            "steady state: n_sigma = {}, n_a = {}",
            fmt_f(n_sigma),
            fmt_f(n_a)
        ),
    })
}

fn run_g2(cfg: &RunConfig) -> Result<ExecOutput> {
    let sys = cfg.params.to_system::<f64>()?;
    let engine = engine_of(cfg)?;
    let (label, value) = match engine {
        Engine::Numeric => {
            let r = g_n_zero_delay::<C64>(&sys, 2)?;
            if !r.converged {
                return Err(Error::Numerical(format!(
                    "g2 probe-halving check did not converge (value {}); reduce g or raise nmax",
                    fmt_f(r.value)
                )));
            }
            ("numeric", r.value)
        }
        Engine::Analytic => ("analytic", analytic_g2(&sys)?),
    };
    let mut t = Table::new(&["engine", "g2", "flag"]);
    t.push(vec![Cell::Word(label), Cell::num(value), Cell::Word("ok")]);
    Ok(ExecOutput {
        bytes: t.render(cfg.format),
        summary: format!("g2 = {} ({label})", fmt_f(value)),
    })
}

fn run_gn(cfg: &RunConfig) -> Result<ExecOutput> {
    if matches!(engine_of(cfg)?, Engine::Analytic) {
        return Err(Error::domain(
            "gn",
            "higher-order correlations have no closed form; use the numeric engine",
        ));
    }
    let order = cfg.order.unwrap_or(2);
    let mut t = Table::new(&["F", "phi", "order", "value", "flag"]);
    match &cfg.sweep {
        None => {
            let sys = cfg.params.to_system::<f64>()?;
            let r = g_n_zero_delay::<C64>(&sys, order)?;
            if !r.converged {
                return Err(Error::Numerical(format!(
                    "g{order} probe-halving check did not converge (value {}); reduce g or raise nmax",
                    fmt_f(r.value)
                )));
            }
            t.push(vec![
                Cell::num(cfg.params.f),
                Cell::num(cfg.params.phi),
                Cell::Int(order),
                Cell::num(r.value),
                Cell::Word("ok"),
            ]);
        }
        Some(sweep) => {
            for &f in &sweep.f_values()? {
                for &phi in &sweep.phi_values()? {
                    let sys = at_correction(&cfg.params, f, phi).to_system::<f64>()?;
                    let r = g_n_zero_delay::<C64>(&sys, order)?;
                    t.push(vec![
                        Cell::num(f),
                        Cell::num(phi),
                        Cell::Int(order),
                        Cell::num(r.value),
                        Cell::Word(if r.converged { "ok" } else { "unconverged" }),
                    ]);
                }
            }
        }
    }
    let n = t.len();
    Ok(ExecOutput {
        bytes: t.render(cfg.format),
        summary: format!("g{order}: {n} point(s)"),
    })
}

fn run_g2tau(cfg: &RunConfig) -> Result<ExecOutput> {
    let taus = cfg.taus.unwrap_or_default().taus()?;
    let trace = match engine_of(cfg)? {
        Engine::Numeric => {
            let sys = cfg.params.to_system::<f64>()?;
            g2_tau::<C64>(&sys, &taus)?
        }
        // The closed-form delay law of the far-detuned-emitter limit; only
        // the detector linewidth enters.
        Engine::Analytic => g2_tau_far_detuned(cfg.params.gamma, &taus)?,
    };
    let mut t = Table::new(&["tau", "g2"]);
    for (&tau, &v) in trace.taus.iter().zip(&trace.values) {
        t.push(vec![Cell::num(tau), Cell::num(v)]);
    }
    let n = t.len();
    Ok(ExecOutput {
        bytes: t.render(cfg.format),
        summary: format!("g2(tau): {n} delays up to {}", fmt_f(*taus.last().unwrap_or(&0.0))),
    })
}

fn run_map(cfg: &RunConfig) -> Result<ExecOutput> {
    let sweep = cfg.sweep.unwrap_or_default();
    let base = cfg.params.to_system::<f64>()?;
    let grid = SweepGrid::new(sweep.f_values()?, sweep.phi_values()?, base)?;
    let engine = engine_of(cfg)?;
    let map = g2_map::<C64>(&grid, engine)?;

    let mut t = Table::new(&["F", "phi", "g2", "flag"]);
    let mut diverged = 0usize;
    let mut unconverged = 0usize;
    for (i, &f) in map.f_values.iter().enumerate() {
        for (j, &phi) in map.phi_values.iter().enumerate() {
            match map.flags[i][j] {
                CellFlag::Diverged => diverged += 1,
                CellFlag::Unconverged => unconverged += 1,
                CellFlag::Ok => {}
            }
            t.push(vec![
                Cell::num(f),
                Cell::num(phi),
                Cell::num(map.values[i][j]),
                flag_cell(map.flags[i][j]),
            ]);
        }
    }
    Ok(ExecOutput {
        bytes: t.render(cfg.format),
        summary: format!(
            "map: {}x{} cells ({}), {} diverged, {} unconverged",
            map.f_values.len(),
            map.phi_values.len(),
            engine.as_str(),
            diverged,
            unconverged
        ),
    })
}

fn run_conditions(cfg: &RunConfig) -> Result<ExecOutput> {
    let sys = cfg.params.to_system::<f64>()?;
    let ab = antibunching_condition(&sys.emitter, &sys.detection)?;
    let sb = superbunching_condition(&sys.emitter)?;

    let mut t = Table::new(&["branch", "F", "phi"]);
    t.push(vec![Cell::Word("minus"), Cell::num(ab[0].0), Cell::num(ab[0].1)]);
    t.push(vec![Cell::Word("plus"), Cell::num(ab[1].0), Cell::num(ab[1].1)]);
    t.push(vec![
        Cell::Word("superbunching"),
        Cell::num(sb.0),
        Cell::num(sb.1),
    ]);
    Ok(ExecOutput {
        bytes: t.render(cfg.format),
        summary: format!(
            "conditions: F- = {}, F+ = {}, pole F = {}",
            fmt_f(ab[0].0),
            fmt_f(ab[1].0),
            fmt_f(sb.0)
        ),
    })
}

fn optimize_settings(spec: &OptimizeSpec) -> OptimizeSettings<f64> {
    let mut s = OptimizeSettings::default();
    if let Some(v) = spec.f_max {
        s.f_max = v;
    }
    if let Some(v) = spec.coarse_f {
        s.coarse_f = v;
    }
    if let Some(v) = spec.coarse_phi {
        s.coarse_phi = v;
    }
    if let Some(v) = spec.x_tol {
        s.x_tol = v;
    }
    s
}

fn outcome_cells(kind: OptimizeKind, out: &OptimizeOutcome<f64>) -> [Cell; 5] {
    match *out {
        OptimizeOutcome::Optimum {
            value,
            at_f,
            at_phi,
            evaluations,
            ..
        } => [
            Cell::Word(kind.as_str()),
            Cell::num(value),
            Cell::num(at_f),
            Cell::num(at_phi),
            Cell::Int(evaluations),
        ],
        OptimizeOutcome::Unbounded {
            at_f,
            at_phi,
            evaluations,
        } => [
            Cell::Word(kind.as_str()),
            Cell::Word("unbounded"),
            Cell::num(at_f),
            Cell::num(at_phi),
            Cell::Int(evaluations),
        ],
    }
}

fn run_optimize(cfg: &RunConfig) -> Result<ExecOutput> {
    let spec = cfg.optimize.clone().unwrap_or_default();
    let kind = OptimizeKind::from_str(&spec.kind)?;
    let settings = optimize_settings(&spec);

    match &cfg.detuning {
        None => {
            let base = cfg.params.to_system::<f64>()?;
            let out = optimize_g2_with::<C64>(&base, kind, spec.phi_fixed, settings)?;
            let mut t = Table::new(&["kind", "value", "F", "phi", "evaluations"]);
            t.push(outcome_cells(kind, &out).to_vec());
            let summary = match out {
                OptimizeOutcome::Optimum { value, at_f, at_phi, .. } => format!(
                    "optimize {}: {} at F = {}, phi = {}",
                    kind.as_str(),
                    fmt_f(value),
                    fmt_f(at_f),
                    fmt_f(at_phi)
                ),
                OptimizeOutcome::Unbounded { at_f, at_phi, .. } => format!(
                    "optimize {}: unbounded at the pole (F = {}, phi = {})",
                    kind.as_str(),
                    fmt_f(at_f),
                    fmt_f(at_phi)
                ),
            };
            Ok(ExecOutput {
                bytes: t.render(cfg.format),
                summary,
            })
        }
        Some(det) => {
            let header: &[&'static str] = if det.include_uncorrected {
                &[
                    "delta_sigma",
                    "delta_a",
                    "kind",
                    "value",
                    "F",
                    "phi",
                    "evaluations",
                    "uncorrected",
                ]
            } else {
                &["delta_sigma", "delta_a", "kind", "value", "F", "phi", "evaluations"]
            };
            let mut t = Table::new(header);
            for &ds in &det.delta_sigma_values()? {
                for &da in &det.delta_a_values()? {
                    let cell_params = FlatParams {
                        delta_sigma: ds,
                        delta_a: da,
                        ..cfg.params
                    };
                    let base = cell_params.to_system::<f64>()?;
                    let out = optimize_g2_with::<C64>(&base, kind, spec.phi_fixed, settings)?;
                    let mut row = vec![Cell::num(ds), Cell::num(da)];
                    row.extend(outcome_cells(kind, &out));
                    if det.include_uncorrected {
                        let plain = at_correction(&cell_params, 0.0, 0.0).to_system::<f64>()?;
                        row.push(Cell::num(g_n_zero_delay::<C64>(&plain, 2)?.value));
                    }
                    t.push(row);
                }
            }
            let n = t.len();
            Ok(ExecOutput {
                bytes: t.render(cfg.format),
                summary: format!("optimize {} over {n} detuning cells", kind.as_str()),
            })
        }
    }
}

/// Probe points for `validate`: a fixed spread over the correction plane
/// avoiding the exact condition branches and the divergence pole.
const VALIDATE_F: [f64; 5] = [0.0, 0.8, 1.5, 2.5, 4.0];
const VALIDATE_PHI: [f64; 4] = [
    0.0,
    std::f64::consts::FRAC_PI_2,
    std::f64::consts::PI,
    3.0 * std::f64::consts::FRAC_PI_2,
];

fn run_validate(cfg: &RunConfig) -> Result<ExecOutput> {
    let mut t = Table::new(&["F", "phi", "analytic", "numeric", "rel_diff"]);
    let mut max_rel = 0.0f64;
    for &f in &VALIDATE_F {
        for &phi in &VALIDATE_PHI {
            let sys = at_correction(&cfg.params, f, phi).to_system::<f64>()?;
            let ana = analytic_g2(&sys)?;
            let num = g_n_zero_delay::<C64>(&sys, 2)?.value;
            let rel = (ana - num).abs() / num.abs().max(1e-12);
            max_rel = max_rel.max(rel);
            t.push(vec![
                Cell::num(f),
                Cell::num(phi),
                Cell::num(ana),
                Cell::num(num),
                Cell::num(rel),
            ]);
        }
    }
    let n = t.len();
    t.extra_json("max_rel_diff", fmt_f(max_rel));
    Ok(ExecOutput {
        bytes: t.render(cfg.format),
        summary: format!("validate: max relative deviation {} over {n} points", fmt_f(max_rel)),
    })
}

fn run_convergence(cfg: &RunConfig) -> Result<ExecOutput> {
    let sys = cfg.params.to_system::<f64>()?;
    let rep = convergence_report::<C64>(&sys)?;
    let mut t = Table::new(&["g", "n_max", "g2"]);
    for e in &rep.entries {
        t.push(vec![Cell::num(e.g), Cell::Int(e.n_max), Cell::num(e.value)]);
    }
    t.extra_json("max_rel_diff", fmt_f(rep.max_rel_diff));
    t.extra_json("flagged", rep.flagged.to_string());
    Ok(ExecOutput {
        bytes: t.render(cfg.format),
        summary: format!(
            "convergence: max relative spread {} ({})",
            fmt_f(rep.max_rel_diff),
            if rep.flagged { "flagged" } else { "ok" }
        ),
    })
}

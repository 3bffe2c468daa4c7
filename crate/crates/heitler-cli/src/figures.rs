//! Builders for the bundled figure datasets: each figure is a fixed list of
//! [`RunConfig`] entries with output filenames, executed by the `figures`
//! subcommand and recorded as a manifest that `replay` re-executes
//! byte-identically.

use crate::config::{
    CommandKind, DetuningSpec, OptimizeSpec, RunConfig, SweepSpec, TauSpec,
};
use heitler::analytic::antibunching_condition;
use heitler::explore::{optimize_g2, OptimizeKind, OptimizeOutcome};
use heitler::model::FlatParams;
use heitler::{C64, Error, Result};
use std::f64::consts::PI;

/// Figure set names accepted by `figures --kind`.
pub const FIGURE_KINDS: [&str; 3] = ["fig1", "fig2", "fig3"];

/// The fixed configuration list for one figure set, each entry carrying its
/// output filename. Entries that need a tuned correction (a cancellation
/// branch or an optimizer result) compute it here and embed the numbers, so
/// the manifest alone reproduces the files.
pub fn figure_configs(kind: &str) -> Result<Vec<RunConfig>> {
    match kind {
        "fig1" => fig1(),
        "fig2" => fig2(),
        "fig3" => fig3(),
        other => Err(Error::InvalidParams(format!(
            "unknown figure set '{other}' (expected one of: {})",
            FIGURE_KINDS.join(", ")
        ))),
    }
}

fn csv_out(mut cfg: RunConfig, name: &str) -> RunConfig {
    cfg.out = Some(name.to_string());
    cfg
}

fn map_config(params: FlatParams, engine: &str) -> RunConfig {
    let mut cfg = RunConfig::new(CommandKind::Map, params);
    cfg.engine = Some(engine.to_string());
    cfg
}

/// Correction-plane `g2(0)` surveys at three detector linewidths, plus
/// `F`-cuts of the correlation orders 2-4 along the opposition phase.
fn fig1() -> Result<Vec<RunConfig>> {
    let mut out = Vec::new();
    for (label, gamma) in [("fig1a", 1e3), ("fig1b", 1.0), ("fig1c", 0.2)] {
        let params = FlatParams {
            gamma,
            ..FlatParams::default()
        };
        out.push(csv_out(map_config(params, "analytic"), &format!("{label}_map.csv")));
    }
    for (label, order) in [("fig1d", 2usize), ("fig1e", 3), ("fig1f", 4)] {
        let params = FlatParams {
            gamma: 0.2,
            g: 1e-2,
            n_max: 5,
            phi: PI,
            ..FlatParams::default()
        };
        let mut cfg = RunConfig::new(CommandKind::Gn, params);
        cfg.order = Some(order);
        cfg.sweep = Some(SweepSpec {
            phi_from: PI,
            phi_to: PI,
            phi_steps: 1,
            ..SweepSpec::default()
        });
        out.push(csv_out(cfg, &format!("{label}_g{order}.csv")));
    }
    Ok(out)
}

/// Detuning robustness: correction-plane surveys with the detector on the
/// emitter versus on the laser, without and with pure dephasing, plus
/// optimizer sweeps of the reachable extrema over the detuning plane.
fn fig2() -> Result<Vec<RunConfig>> {
    let base = FlatParams {
        gamma: 0.2,
        delta_sigma: 0.5,
        ..FlatParams::default()
    };
    let mut out = Vec::new();
    for (label, gamma_phi, delta_a, engine) in [
        ("fig2a", 0.0, 0.5, "analytic"),
        ("fig2b", 0.0, 0.0, "analytic"),
        ("fig2c", 0.2, 0.5, "numeric"),
        ("fig2d", 0.2, 0.0, "numeric"),
    ] {
        let params = FlatParams {
            gamma_phi,
            delta_a,
            ..base
        };
        out.push(csv_out(map_config(params, engine), &format!("{label}_map.csv")));
    }

    // One numeric optimization per detuning cell: keep the search budget
    // small (coarse 13 x 8 seed, 1e-5 bracket) so a full panel stays around
    // a minute on one core.
    let detuning = DetuningSpec {
        delta_sigma_from: -1.0,
        delta_sigma_to: 1.0,
        delta_sigma_steps: 15,
        delta_a_from: -1.0,
        delta_a_to: 1.0,
        delta_a_steps: 15,
        include_uncorrected: false,
    };
    let opt_params = FlatParams {
        gamma_phi: 0.2,
        delta_sigma: 0.0,
        ..base
    };
    for (label, kind, include_uncorrected) in
        [("fig2e", "max", false), ("fig2f", "min", true)]
    {
        let mut cfg = RunConfig::new(CommandKind::Optimize, opt_params);
        cfg.optimize = Some(OptimizeSpec {
            kind: kind.to_string(),
            coarse_f: Some(13),
            coarse_phi: Some(8),
            x_tol: Some(1e-5),
            ..OptimizeSpec::default()
        });
        cfg.detuning = Some(DetuningSpec {
            include_uncorrected,
            ..detuning
        });
        out.push(csv_out(cfg, &format!("{label}_{kind}.csv")));
    }
    Ok(out)
}

fn g2tau_config(params: FlatParams, taus: TauSpec) -> RunConfig {
    let mut cfg = RunConfig::new(CommandKind::G2Tau, params);
    cfg.taus = Some(taus);
    cfg
}

/// The destructive-interference branch of `params`, computed from the
/// emitter and detector settings.
fn minus_branch(params: &FlatParams) -> Result<(f64, f64)> {
    let sys = params.to_system::<f64>()?;
    Ok(antibunching_condition(&sys.emitter, &sys.detection)?[0])
}

fn with_correction(params: FlatParams, (f, phi): (f64, f64)) -> FlatParams {
    FlatParams { f, phi, ..params }
}

/// Delay traces: uncorrected versus corrected emission for detuned driving
/// (detector on emitter and on laser), the far-detuned limit against its
/// closed-form delay law, the dephased case with an optimized correction,
/// and the shared resonant no-dephasing reference curve.
fn fig3() -> Result<Vec<RunConfig>> {
    let taus = TauSpec {
        tau_max: 30.0,
        tau_step: 0.05,
    };
    let taus_far = TauSpec {
        tau_max: 100.0,
        tau_step: 0.5,
    };
    let base = FlatParams {
        gamma: 0.2,
        ..FlatParams::default()
    };
    let mut out = Vec::new();

    // Panels a and b: detuned driving, detector on the emitter (a) or on
    // the laser (b).
    for (label, delta_a) in [("fig3a", 5.0), ("fig3b", 0.0)] {
        let params = FlatParams {
            delta_sigma: 5.0,
            delta_a,
            ..base
        };
        out.push(csv_out(
            g2tau_config(params, taus),
            &format!("{label}_uncorrected.csv"),
        ));
        out.push(csv_out(
            g2tau_config(with_correction(params, minus_branch(&params)?), taus),
            &format!("{label}_corrected.csv"),
        ));
    }

    // Far-detuned limit for panel b: corrected trace over long delays, and
    // the closed-form delay law it should follow.
    let far = FlatParams {
        delta_sigma: 50.0,
        delta_a: 0.0,
        omega_sigma: 1e-2,
        g: 1e-2,
        ..base
    };
    out.push(csv_out(
        g2tau_config(with_correction(far, minus_branch(&far)?), taus_far),
        "fig3b_far_detuned.csv",
    ));
    let mut law = g2tau_config(base, taus_far);
    law.engine = Some("analytic".to_string());
    out.push(csv_out(law, "fig3b_far_detuned_law.csv"));

    // Panel c: resonant driving with pure dephasing; the corrected curve
    // uses the optimizer's minimum since no exact cancellation exists.
    let dephased = FlatParams {
        gamma_phi: 0.1,
        ..base
    };
    out.push(csv_out(
        g2tau_config(dephased, taus),
        "fig3c_uncorrected.csv",
    ));
    let best = match optimize_g2::<C64>(
        &dephased.to_system::<f64>()?,
        OptimizeKind::Min,
        None,
    )? {
        OptimizeOutcome::Optimum { at_f, at_phi, .. } => (at_f, at_phi),
        OptimizeOutcome::Unbounded { .. } => {
            return Err(Error::Numerical(
                "dephased minimization unexpectedly reported an unbounded objective".into(),
            ))
        }
    };
    out.push(csv_out(
        g2tau_config(with_correction(dephased, best), taus),
        "fig3c_corrected.csv",
    ));

    // Shared reference: the resonant no-dephasing corrected trace.
    out.push(csv_out(
        g2tau_config(with_correction(base, minus_branch(&base)?), taus),
        "fig3_reference.csv",
    ));
    Ok(out)
}

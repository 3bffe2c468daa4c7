//! Photon statistics of a coherently driven two-level emitter whose
//! filtered emission is interfered with a correction laser.
//!
//! The emitter decays radiatively (rate `gamma_sigma`), may dephase
//! (`gamma_phi`), and is driven coherently (amplitude `omega_sigma`,
//! detuning `delta_sigma`). Its emission is frequency-filtered by a weakly
//! coupled detection mode of linewidth `Gamma` at detuning `delta_a`, and a
//! phase-coherent fraction of the drive laser — amplitude `F`, phase `phi`,
//! routed through a `t`/`r` splitter — is superposed on the filtered signal
//! before detection. The observables are the normalized photon correlations
//! `g^(n)(0)` and `g^(2)(tau)` of the combined field.
//!
//! Two independent evaluation routes are provided and cross-validated:
//!
//! * **analytic** ([`analytic`]): closed forms for the low-drive limit —
//!   corrected `g^(2)(0)` with and without pure dephasing, the interference
//!   conditions that cancel or enhance two-photon coincidences, weak-drive
//!   amplitude coefficients, and the far-detuned limiting law for
//!   `g^(2)(tau)`;
//! * **numeric** ([`dynamics`]): full steady-state solution of the joint
//!   emitter⊗sensor master equation with a vanishing-coupling convergence
//!   check, and time-resolved correlations via the quantum regression
//!   theorem.
//!
//! [`explore`] builds on both: correction-plane maps, optimization of the
//! correction parameters, and plateau analysis of antibunching traces.
//!
//! # Precision
//!
//! All numerics are generic over the complex scalar through
//! [`ComplexScalar`]; [`C64`] (double precision) is the supported production
//! type and what the aliases below pin down. Single precision compiles and
//! runs but resolves far less of the weak-drive dynamic range.
//!
//! # Units
//!
//! Rates, detunings, and amplitudes share one frequency unit; delays are in
//! the inverse unit. Conventionally `gamma_sigma = 1` so everything is
//! measured against the emitter linewidth.
//!
//! # Example
//!
//! ```
//! use heitler::{C64, CorrectionParams, FockTruncation};
//! use heitler::{DetectionParams, EmitterParams, SystemParams};
//!
//! // Emitter at resonance, weak drive; broad filter; no correction.
//! let emitter = EmitterParams::new(1.0, 0.0, 1e-3, 0.0)?;
//! let detection = DetectionParams::new(1.0, 0.0, 1e-3, FockTruncation::new(3)?)?;
//! let sys = SystemParams::new(emitter, detection, CorrectionParams::none())?;
//!
//! // Uncorrected filtered light at Gamma = gamma_sigma: g2 = 1/4.
//! let analytic = heitler::analytic::g2_no_dephasing(
//!     &sys.emitter, &sys.detection, &sys.correction)?;
//! let numeric = heitler::dynamics::g_n_zero_delay::<C64>(&sys, 2)?;
//! assert!((analytic - 0.25).abs() < 1e-6);
//! assert!((numeric.value - analytic).abs() < 1e-3 && numeric.converged);
//! # Ok::<(), heitler::Error>(())
//! ```

// Validation deliberately writes `!(x > 0.0)` and friends: the negation also
// rejects NaN, which a flipped comparison would silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod explore;
pub mod model;
pub(crate) mod util;

// Matrix types appear throughout the public API; re-export the crate so
// downstream users stay on the same version.
pub use ndarray;

pub use algebra::{ComplexScalar, FockTruncation};
pub use analytic::{DerivedRates, WfaCoefficients};
pub use dynamics::{ConvergenceReport, CorrelationResult, DensityMatrix, G2Trace};
pub use error::{Error, Result};
pub use explore::{CellFlag, Engine, MapResult, OptimizeKind, OptimizeOutcome, SweepGrid};
pub use model::{
    CorrectionParams, DetectionParams, EmitterParams, FlatParams, SystemParams,
};

/// Production real scalar.
pub type Real = f64;
/// Production complex scalar.
pub type C64 = num_complex::Complex64;
/// Single-precision complex scalar (compiles everywhere; reduced range).
pub type C32 = num_complex::Complex32;
/// Dense complex matrix at production precision.
pub type CMatrix = ndarray::Array2<C64>;
/// Dense complex vector at production precision.
pub type CVector = ndarray::Array1<C64>;

//! Small scalar-conversion helpers shared across the generic modules.

use num_traits::{Float, ToPrimitive};

/// Convert an `f64` constant into the generic real type.
pub(crate) fn rf<R: Float>(x: f64) -> R {
    R::from(x).expect("constant not representable in the target precision")
}

/// Lossy view of a generic real as `f64` (for diagnostics and serialization).
pub(crate) fn to_f64<R: ToPrimitive>(x: R) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Wrap a phase onto `[0, 2*pi)`.
pub(crate) fn wrap_phase<R: Float>(x: R) -> R {
    let tau = rf::<R>(std::f64::consts::TAU);
    let mut y = x % tau;
    if y < R::zero() {
        y = y + tau;
    }
    if y >= tau {
        y = y - tau;
    }
    y
}

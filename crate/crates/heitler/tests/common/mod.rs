#![allow(dead_code)]

use heitler::{
    C64, CorrectionParams, DetectionParams, EmitterParams, FockTruncation, SystemParams,
};
use ndarray::Array2;

/// Deterministic splitmix64 stream for reproducible random test grids.
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }
}

pub fn rand_matrix(rng: &mut SplitMix64, n: usize) -> Array2<C64> {
    Array2::from_shape_fn((n, n), |_| C64::new(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)))
}

/// Build a full parameter set; `f == 0` means no correction port.
#[allow(clippy::too_many_arguments)]
pub fn sys(
    gs: f64,
    gphi: f64,
    om: f64,
    ds: f64,
    gam: f64,
    da: f64,
    g: f64,
    nmax: usize,
    f: f64,
    phi: f64,
) -> SystemParams<f64> {
    let e = EmitterParams::new(gs, gphi, om, ds).unwrap();
    let d = DetectionParams::new(gam, da, g, FockTruncation::new(nmax).unwrap()).unwrap();
    let c = if f == 0.0 {
        CorrectionParams::none()
    } else {
        CorrectionParams::balanced(f, phi).unwrap()
    };
    SystemParams::new(e, d, c).unwrap()
}

/// Default configuration: resonance, no dephasing, weak drive and coupling,
/// detector bandwidth equal to the emitter linewidth.
pub fn defaults() -> SystemParams<f64> {
    sys(1.0, 0.0, 1e-3, 0.0, 1.0, 0.0, 1e-3, 3, 0.0, 0.0)
}

pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

//! Closed-form evaluators: the exact driven-emitter steady state, the
//! leading-order filtered two-photon correlation with and without dephasing,
//! the perfect-antibunching and superbunching conditions, the far-detuned
//! time law, and the weak-drive wavefunction expansion.
//!
//! Two independent algebraic routes to the same quantities are kept on
//! purpose — the real trigonometric expansions ([`g2_no_dephasing`],
//! [`g2_dephasing`]) and the complex amplitude route
//! ([`wfa_coefficients`]) — and their mutual agreement, as well as agreement
//! with the numeric layer, is asserted by the test suite.

use crate::dynamics::G2Trace;
use crate::error::{Error, Result};
use crate::model::{CorrectionParams, DetectionParams, EmitterParams, SystemParams};
use crate::util::{rf, wrap_phase};
use num_complex::Complex;
use num_traits::{Float, One};

/// Frequently used rate combinations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates<R> {
    /// `gamma_sigma + Gamma`
    pub gamma_plus: R,
    /// `delta_sigma + delta_a`
    pub delta_plus: R,
    /// `gamma_sigma^2 + 4 delta_sigma^2`
    pub gamma_tilde_sigma_sq: R,
    /// `gamma_plus^2 + 4 delta_plus^2`
    pub gamma_tilde_plus_sq: R,
    /// `gamma_sigma + gamma_phi`: total coherence decay rate with dephasing.
    pub gamma_phi_total: R,
}

pub fn derived_rates<R: Float>(p: &EmitterParams<R>, det: &DetectionParams<R>) -> DerivedRates<R> {
    let four = rf::<R>(4.0);
    let gamma_plus = p.gamma_sigma + det.gamma;
    let delta_plus = p.delta_sigma + det.delta_a;
    DerivedRates {
        gamma_plus,
        delta_plus,
        gamma_tilde_sigma_sq: p.gamma_sigma * p.gamma_sigma
            + four * p.delta_sigma * p.delta_sigma,
        gamma_tilde_plus_sq: gamma_plus * gamma_plus + four * delta_plus * delta_plus,
        gamma_phi_total: p.gamma_sigma + p.gamma_phi,
    }
}

/// Exact (not leading-order) steady state of the bare driven emitter.
///
/// Returns `(n_sigma, alpha)` where `n_sigma` is the excited-state population
/// and `alpha = <sigma> = <e|rho|g>` the steady-state coherence.
pub fn steady_state_2ls<R: Float>(p: &EmitterParams<R>) -> Result<(R, Complex<R>)> {
    p.validate()?;
    let two = rf::<R>(2.0);
    let four = rf::<R>(4.0);
    let eight = rf::<R>(8.0);
    let gp = p.gamma_sigma + p.gamma_phi;
    let om2 = p.omega_sigma * p.omega_sigma;
    let denom = p.gamma_sigma * (gp * gp + four * p.delta_sigma * p.delta_sigma)
        + eight * gp * om2;
    let n_sigma = four * gp * om2 / denom;
    // alpha = 2 i gamma_sigma Omega (2 i delta_sigma - (gamma_sigma+gamma_phi)) / denom
    let i = Complex::<R>::i();
    let alpha = i * Complex::from(two * p.gamma_sigma * p.omega_sigma)
        * Complex::new(-gp, two * p.delta_sigma)
        / Complex::from(denom);
    Ok((n_sigma, alpha))
}

fn require_no_dephasing<R: Float>(what: &str, p: &EmitterParams<R>) -> Result<()> {
    if p.gamma_phi != R::zero() {
        return Err(Error::domain(what, "requires gamma_phi = 0"));
    }
    Ok(())
}

/// Leading-order filtered two-photon correlation without dephasing, as an
/// explicit trigonometric expression in `(F, phi)` and the detunings.
///
/// Restricted to `gamma_phi = 0`. Rates are rescaled to units of
/// `gamma_sigma` on entry. The overall normalization is anchored by the
/// exactly known `F = 0` resonance limit
/// `gamma_sigma^2 / (gamma_sigma + Gamma)^2`; the full `(F, phi, detuning)`
/// dependence is certified against the numeric oracle and against the
/// independent amplitude route [`WfaCoefficients::g2`] by the test suite.
///
/// Diverges (returns `inf`) exactly at the superbunching point
/// [`superbunching_condition`], where the denominator has its double root.
pub fn g2_no_dephasing<R: Float>(
    p: &EmitterParams<R>,
    det: &DetectionParams<R>,
    corr: &CorrectionParams<R>,
) -> Result<R> {
    p.validate()?;
    det.validate()?;
    corr.validate()?;
    require_no_dephasing("g2_no_dephasing", p)?;

    let unit = p.gamma_sigma;
    let gs = R::one();
    let ds = p.delta_sigma / unit;
    let gam = det.gamma / unit;
    let da = det.delta_a / unit;
    let f = corr.f;
    let (sphi, cphi) = (corr.phi.sin(), corr.phi.cos());
    let two = rf::<R>(2.0);
    let (s2phi, c2phi) = ((two * corr.phi).sin(), (two * corr.phi).cos());
    let four = rf::<R>(4.0);
    let eight = rf::<R>(8.0);
    let sixteen = rf::<R>(16.0);

    let gp = gs + gam;
    let dp = ds + da;
    let gts2 = gs * gs + four * ds * ds;
    let gtp2 = gp * gp + four * dp * dp;

    let num = gts2
        * (sixteen * gs.powi(4)
            + sixteen * f * f * gs * gs * gtp2
            + f.powi(4) * gts2 * gtp2
            - eight
                * f
                * gs
                * (two * (four * gs * gs * dp + f * f * ds * gtp2) * sphi
                    + two * gs * f * (gp * ds + gs * dp) * s2phi
                    - gs * (four * gs * gp + f * f * gtp2) * cphi
                    - gs * f * (gs * gp - four * ds * dp) * c2phi));
    let bracket = four * gs * gs + f * f * gts2 + four * gs * f * (gs * cphi - two * ds * sphi);
    let den = gtp2 * bracket * bracket;
    Ok(num / den)
}

/// The two `(F, phi)` pairs that cancel the two-photon amplitude exactly at
/// leading order (no dephasing), for arbitrary detunings. A real phase always
/// exists: the complex condition is absorbed into `phi`.
///
/// The first pair is the lower-`F` branch, in whose vicinity the higher-order
/// correlations also remain sub-Poissonian (the conventional antibunching
/// branch); the second is the upper branch. Phases are wrapped to
/// `[0, 2*pi)`.
pub fn antibunching_condition<R: Float>(
    p: &EmitterParams<R>,
    det: &DetectionParams<R>,
) -> Result<[(R, R); 2]> {
    p.validate()?;
    det.validate()?;
    require_no_dephasing("antibunching_condition", p)?;
    let two = rf::<R>(2.0);
    let z = Complex::new(p.gamma_sigma, two * p.delta_sigma);
    let u = Complex::new(det.gamma, two * det.delta_a);
    let w = z + u;
    let root = (u / w).sqrt();
    let prefactor = -(Complex::from(two * p.gamma_sigma) / z);
    let minus = prefactor * (Complex::<R>::one() - root);
    let plus = prefactor * (Complex::<R>::one() + root);
    Ok([
        (minus.norm(), wrap_phase(minus.arg())),
        (plus.norm(), wrap_phase(plus.arg())),
    ])
}

/// The `(F, phi)` pair at which the leading-order correlation diverges:
/// `tan(phi) = -2 delta_sigma / gamma_sigma` with `F = -2 cos(phi) > 0`.
/// Independent of the detector detuning.
pub fn superbunching_condition<R: Float>(p: &EmitterParams<R>) -> Result<(R, R)> {
    p.validate()?;
    let two = rf::<R>(2.0);
    let z = Complex::new(p.gamma_sigma, two * p.delta_sigma);
    let zeta = -(Complex::from(two * p.gamma_sigma) / z);
    Ok((zeta.norm(), wrap_phase(zeta.arg())))
}

/// Independent derivation of [`antibunching_condition`]: the two-photon
/// amplitude numerator `4 gs^2 + w fe (4 gs + fe z)` is a quadratic in
/// `fe = F e^{i phi}`,
///
/// ```text
/// z w fe^2 + 4 gs w fe + 4 gs^2 = 0,
/// ```
///
/// solved here by the quadratic formula and sorted by increasing `F`. The
/// test suite asserts this coincides with [`antibunching_condition`] to
/// `1e-10`.
pub fn two_photon_suppression_condition<R: Float>(
    p: &EmitterParams<R>,
    det: &DetectionParams<R>,
) -> Result<[(R, R); 2]> {
    p.validate()?;
    det.validate()?;
    require_no_dephasing("two_photon_suppression_condition", p)?;
    let two = rf::<R>(2.0);
    let four = rf::<R>(4.0);
    let gs = p.gamma_sigma;
    let z = Complex::new(gs, two * p.delta_sigma);
    let u = Complex::new(det.gamma, two * det.delta_a);
    let w = z + u;
    let a = z * w;
    let b = w * four * gs;
    let c = Complex::from(four * gs * gs);
    let disc = (b * b - a * c * four).sqrt();
    let r1 = (-b + disc) / (a * two);
    let r2 = (-b - disc) / (a * two);
    let mut pair = [
        (r1.norm(), wrap_phase(r1.arg())),
        (r2.norm(), wrap_phase(r2.arg())),
    ];
    if pair[0].0 > pair[1].0 {
        pair.swap(0, 1);
    }
    Ok(pair)
}

/// Leading-order filtered two-photon correlation at resonance with pure
/// dephasing. Continuous in `gamma_phi`; at `gamma_phi = 0` it coincides with
/// [`g2_no_dephasing`] to rounding. Restricted to
/// `delta_sigma = delta_a = 0`; the detuned-and-dephased regime is covered
/// numerically only.
pub fn g2_dephasing<R: Float>(
    p: &EmitterParams<R>,
    det: &DetectionParams<R>,
    corr: &CorrectionParams<R>,
) -> Result<R> {
    p.validate()?;
    det.validate()?;
    corr.validate()?;
    if p.delta_sigma != R::zero() || det.delta_a != R::zero() {
        return Err(Error::domain(
            "g2_dephasing",
            "requires delta_sigma = delta_a = 0",
        ));
    }

    let unit = p.gamma_sigma;
    let gs = R::one();
    let gphi = p.gamma_phi / unit;
    let gam = det.gamma / unit;
    let f = corr.f;
    let two = rf::<R>(2.0);
    let three = rf::<R>(3.0);
    let four = rf::<R>(4.0);
    let eight = rf::<R>(8.0);
    let sixteen = rf::<R>(16.0);
    let (c, c2) = (corr.phi.cos(), (two * corr.phi).cos());

    let cap_gp = gs + gphi; // total coherence decay rate
    let gp = gs + gam; // emitter + detector linewidth sum

    let num = cap_gp
        * (gam + cap_gp)
        * (sixteen * gs.powi(3) * (gam + gp) * (two * gam + gp)
            + sixteen * f * f * gs * gp * gp * (two * gam + cap_gp) * (three * gam + cap_gp)
            + f.powi(4)
                * gp
                * cap_gp
                * (gam + cap_gp)
                * (two * gam + cap_gp)
                * (three * gam + cap_gp)
            + eight
                * f
                * gs
                * gp
                * (three * gam + cap_gp)
                * (f * gs * (two * gam + cap_gp) * c2
                    + (four * gs * (gam + gp) + f * f * (gam + cap_gp) * (two * gam + cap_gp))
                        * c));
    let bracket = (four + f * f) * gs * gp + f * f * gphi * (gp + cap_gp)
        + four * f * gs * (gam + cap_gp) * c;
    let den = gp * gp * (two * gam + cap_gp) * (three * gam + cap_gp) * bracket * bracket;
    Ok(gp * num / den)
}

/// Closed-form far-detuned two-photon trace `(1 - e^{-Gamma tau/2})^2`: the
/// correlation of a coherently driven low-excitation emitter of linewidth
/// `Gamma`, reached when the emitter is pushed far off resonance while the
/// detector stays on the laser.
pub fn g2_tau_far_detuned<R: Float>(gamma: R, taus: &[R]) -> Result<G2Trace<R>> {
    if !(gamma > R::zero()) || !gamma.is_finite() {
        return Err(Error::InvalidParams("Gamma must be positive and finite".into()));
    }
    let half = rf::<R>(0.5);
    let mut values = Vec::with_capacity(taus.len());
    let mut prev = -R::one();
    for &tau in taus {
        if !tau.is_finite() || tau < R::zero() || tau < prev {
            return Err(Error::InvalidParams(
                "delays must be finite, non-negative, and sorted".into(),
            ));
        }
        prev = tau;
        let v = R::one() - (-gamma * tau * half).exp();
        values.push(v * v);
    }
    Ok(G2Trace {
        taus: taus.to_vec(),
        values,
    })
}

/// Steady-state amplitudes of the weak-drive expansion of the joint
/// wavefunction over `{emitter quanta, sensor photons}`: `c01` carries one
/// emitter quantum, `c10` one sensor photon, `c11` one of each, `c20` two
/// sensor photons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WfaCoefficients<R> {
    pub c01: Complex<R>,
    pub c10: Complex<R>,
    pub c11: Complex<R>,
    pub c20: Complex<R>,
}

impl<R: Float> WfaCoefficients<R> {
    /// Sensor population `|c10|^2` (leading order).
    pub fn n_a(&self) -> R {
        self.c10.norm_sqr()
    }

    /// Emitter population `|c01|^2` (leading order).
    pub fn n_sigma(&self) -> R {
        self.c01.norm_sqr()
    }

    /// Filtered two-photon correlation `2 |c20|^2 / |c10|^4`.
    pub fn g2(&self) -> R {
        rf::<R>(2.0) * self.c20.norm_sqr() / self.c10.norm_sqr().powi(2)
    }
}

/// Closed forms of the weak-drive amplitudes. Requires `gamma_phi = 0`: pure
/// dephasing has no wavefunction representation.
pub fn wfa_coefficients<R: Float>(
    p: &EmitterParams<R>,
    det: &DetectionParams<R>,
    corr: &CorrectionParams<R>,
) -> Result<WfaCoefficients<R>> {
    p.validate()?;
    det.validate()?;
    corr.validate()?;
    require_no_dephasing("wfa_coefficients", p)?;
    let two = rf::<R>(2.0);
    let four = rf::<R>(4.0);
    let sqrt2 = rf::<R>(std::f64::consts::SQRT_2);
    let i = Complex::<R>::i();

    let gs = p.gamma_sigma;
    let om = p.omega_sigma;
    let g = det.g;
    let t = corr.t;
    let z = Complex::new(gs, two * p.delta_sigma);
    let u = Complex::new(det.gamma, two * det.delta_a);
    let w = z + u;
    let fe = Complex::from_polar(corr.f, corr.phi);

    let c01 = -(i * Complex::from(two * om)) / z;
    let c10 = Complex::from(-(two * g * t * om)) * (Complex::from(two * gs) + z * fe)
        / (Complex::from(gs) * u * z);
    let c11 = i * Complex::from(four * g * t * om * om) * (Complex::from(two * gs) + w * fe)
        / (Complex::from(gs) * u * z * w);
    let c20 = Complex::from(two * sqrt2 * g * g * t * t * om * om)
        * (Complex::from(four * gs * gs) + w * fe * (Complex::from(four * gs) + fe * z))
        / (Complex::from(gs * gs) * u * u * z * w);
    Ok(WfaCoefficients { c01, c10, c11, c20 })
}

/// Steady-state residuals of the amplitude equations with the closed forms
/// plugged in, keeping for each amplitude only the terms of its leading order
/// in `(g, Omega_sigma)`:
///
/// ```text
/// r1 = Om + (ds - i gs/2) c01
/// r2 = -i rb e^{i phi} + g t c01 + (da - i Gam/2) c10
/// r3 = Om c10 - i rb e^{i phi} c01 + (ds + da - i (gs + Gam)/2) c11
/// r4 = sqrt2 g t c11 - sqrt2 i rb e^{i phi} c10 + 2 (da - i Gam/2) c20
/// ```
///
/// with `rb = g t (Om/gs) F` the sensor-drive amplitude. The closed forms
/// zero all four identically, so the returned maximum modulus is pure
/// roundoff; perturbing any coefficient (for example `c20` by 1%) raises it
/// by orders of magnitude, which makes this a sharp transcription check.
pub fn wfa_ode_residual<R: Float>(
    coeffs: &WfaCoefficients<R>,
    p: &EmitterParams<R>,
    det: &DetectionParams<R>,
    corr: &CorrectionParams<R>,
) -> Result<R> {
    p.validate()?;
    det.validate()?;
    corr.validate()?;
    require_no_dephasing("wfa_ode_residual", p)?;
    let two = rf::<R>(2.0);
    let half = rf::<R>(0.5);
    let sqrt2 = rf::<R>(std::f64::consts::SQRT_2);
    let i = Complex::<R>::i();

    let sys = SystemParams {
        emitter: *p,
        detection: *det,
        correction: *corr,
    };
    let drive = i * Complex::from(sys.beta_r()) * Complex::from_polar(R::one(), corr.phi);
    let om = Complex::from(p.omega_sigma);
    let gt = Complex::from(det.g * corr.t);
    let d_sigma = Complex::new(p.delta_sigma, -p.gamma_sigma * half);
    let d_a = Complex::new(det.delta_a, -det.gamma * half);
    let d_plus = Complex::new(
        p.delta_sigma + det.delta_a,
        -(p.gamma_sigma + det.gamma) * half,
    );

    let r1 = om + d_sigma * coeffs.c01;
    let r2 = -drive + gt * coeffs.c01 + d_a * coeffs.c10;
    let r3 = om * coeffs.c10 - drive * coeffs.c01 + d_plus * coeffs.c11;
    let r4 = gt * coeffs.c11 * sqrt2 - drive * coeffs.c10 * sqrt2 + d_a * coeffs.c20 * two;
    Ok(r1
        .norm()
        .max(r2.norm())
        .max(r3.norm())
        .max(r4.norm()))
}

//! Entanglement fidelity, heralding probability, and validity formulas.
//!
//! The heralded state interferes two coherent amplitudes: the cavity-QD
//! reflection branch α(ω) = α₀ r(ω) Ω(ω) and the atomic elastic-scattering
//! branch β(ω) = β₀ ℒ(δ_a, γ_a) Ω(ω). The branch scales are fixed by the
//! matching condition α(ω₀) = β(ω₀) at the pulse center; every result here
//! is invariant under a common rescaling or phase of the two branches.
//!
//! Recoil and multi-photon corrections enter through closed forms in the
//! Lamb-Dicke parameter η, the thermal occupation n̄, the collection
//! half-angle Δ and the scattered photon number N_s.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{
    cavity_reflectivity, lorentzian_raw, AtomParams, CavityQDParams, PulseSpec,
};
use crate::numerics::{integrate_adaptive, QuadratureSpec};

/// Half-width of the truncated frequency window for the spectral-fidelity
/// integrals, in units of 1/τ. The Gaussian spectral density is below
/// 1e-300 beyond it.
const WINDOW_HALF_WIDTH: f64 = 40.0;

/// Gaussian pulse spectrum Ω(ω) = Ω₀ exp(−τ²(ω−ω₀)²/4).
///
/// `omega` is in the same frame as `p.omega0` (offset from cavity
/// resonance). The spectral intensity |Ω|² has FWHM 2√(2 ln 2)/τ.
pub fn pulse_spectrum(omega: f64, p: &PulseSpec) -> Complex64 {
    let u = omega - p.omega0;
    Complex64::new(p.amplitude * (-p.tau * p.tau * u * u / 4.0).exp(), 0.0)
}

/// One pulsed-excitation configuration of the link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralScenario {
    pub pulse: PulseSpec,
    pub cavity: CavityQDParams,
    pub atom: AtomParams,
    /// Frequency at which the two branch amplitudes are matched; defaults
    /// to the pulse center. Must lie inside the truncated window.
    pub matching_frequency: Option<f64>,
    /// Diagnostic switch: with the atom branch removed (β ≡ 0) the
    /// fidelity collapses to the no-coherence floor of 1/4.
    pub atom_branch: bool,
}

impl SpectralScenario {
    pub fn new(pulse: PulseSpec, cavity: CavityQDParams, atom: AtomParams) -> Self {
        Self {
            pulse,
            cavity,
            atom,
            matching_frequency: None,
            atom_branch: true,
        }
    }

    /// Pulse center in the global frame (offset from the reference).
    pub fn pulse_center(&self) -> f64 {
        self.cavity.omega_c + self.pulse.omega0
    }

    /// Laser-atom detuning at probe frequency `omega`.
    pub fn atom_detuning(&self, omega: f64) -> f64 {
        self.atom.delta_a + (omega - self.pulse_center())
    }
}

/// Spectral-overlap entanglement fidelity
/// F = ¼ ∫|α+β|² dω / ∫(|α|² + |β|² − Re{α*β}) dω
/// over the truncated window ω₀ ± 40/τ, with the atomic resonance pinned
/// as a quadrature breakpoint when it falls inside.
pub fn spectral_fidelity(s: &SpectralScenario, quad: &QuadratureSpec) -> Result<f64> {
    if !(s.pulse.amplitude > 0.0) {
        return Err(Error::Infeasible(
            "pulse amplitude is zero; the heralded state is undefined".into(),
        ));
    }

    let center = s.pulse_center();
    let half_width = WINDOW_HALF_WIDTH / s.pulse.tau;
    let (lo, hi) = (center - half_width, center + half_width);

    let matching = s.matching_frequency.unwrap_or(center);
    if !(matching >= lo && matching <= hi) {
        return Err(Error::Domain(format!(
            "matching frequency {matching} lies outside the integration window [{lo}, {hi}]"
        )));
    }

    let r_match = cavity_reflectivity(matching, &s.cavity);
    if r_match.norm() < 1e-300 {
        return Err(Error::Infeasible(
            "cavity reflectivity vanishes at the matching frequency; \
             branch amplitudes cannot be matched"
                .into(),
        ));
    }
    let l_match = lorentzian_raw(s.atom_detuning(matching), s.atom.gamma_a);

    // envelope normalized to 1 at the pulse center; the fidelity is
    // scale-invariant in the pulse amplitude
    let tau = s.pulse.tau;
    let envelope = move |w: f64| {
        let u = w - center;
        (-tau * tau * u * u / 4.0).exp()
    };
    let alpha = |w: f64| cavity_reflectivity(w, &s.cavity) / r_match * envelope(w);
    let beta = |w: f64| {
        if s.atom_branch {
            lorentzian_raw(s.atom_detuning(w), s.atom.gamma_a) / l_match * envelope(w)
        } else {
            Complex64::new(0.0, 0.0)
        }
    };

    let mut spec = quad.clone();
    spec.validate()?;
    spec.mandatory_breakpoints.retain(|bp| *bp > lo && *bp < hi);
    // pin the gamma_a-wide atomic feature at delta_a(w) = 0
    let atom_resonance = center - s.atom.delta_a;
    if atom_resonance > lo && atom_resonance < hi {
        spec.mandatory_breakpoints.push(atom_resonance);
    }
    spec.mandatory_breakpoints.sort_by(f64::total_cmp);
    spec.mandatory_breakpoints.dedup();

    let reflected_power = integrate_adaptive(|w| alpha(w).norm_sqr(), lo, hi, &spec)?.value;
    let (scattered_power, coherence) = if s.atom_branch {
        let b = integrate_adaptive(|w| beta(w).norm_sqr(), lo, hi, &spec)?.value;
        let c = integrate_adaptive(|w| (alpha(w).conj() * beta(w)).re, lo, hi, &spec)?.value;
        (b, c)
    } else {
        (0.0, 0.0)
    };

    let denominator = reflected_power + scattered_power - coherence;
    if !(denominator > 0.0) {
        return Err(Error::Infeasible(format!(
            "non-positive fidelity denominator {denominator}"
        )));
    }
    Ok((reflected_power + scattered_power + 2.0 * coherence) / (4.0 * denominator))
}

/// Recoil interference factor Q(x) = (1 − e^{−x})/x with x = η²(n̄+1)Δ².
///
/// Q(0) = 1 analytically; a short Taylor series is used below x = 1e−6 to
/// avoid catastrophic cancellation. Strictly decreasing, 0 < Q ≤ 1.
pub fn q_factor(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("q_factor requires x >= 0, got {x}")));
    }
    Ok(q_factor_raw(x))
}

#[inline]
fn q_factor_raw(x: f64) -> f64 {
    if x < 1e-6 {
        1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// Monochromatic-limit recoil and multi-photon inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoilScenario {
    /// Lamb-Dicke parameter η.
    pub eta: f64,
    /// Mean thermal vibrational occupation n̄.
    pub nbar: f64,
    /// Collected outer half-angle Δ (rad), inner angle taken to zero.
    pub delta: f64,
    /// Total scattered photon number N_s.
    pub n_s: f64,
}

impl RecoilScenario {
    pub fn new(eta: f64, nbar: f64, delta: f64, n_s: f64) -> Result<Self> {
        if !(eta >= 0.0) {
            return Err(Error::Domain(format!("eta must be >= 0, got {eta}")));
        }
        if !(nbar >= 0.0) {
            return Err(Error::Domain(format!("nbar must be >= 0, got {nbar}")));
        }
        if !(delta > 0.0 && delta <= std::f64::consts::FRAC_PI_4) {
            return Err(Error::Domain(format!(
                "delta must satisfy 0 < delta <= pi/4, got {delta}"
            )));
        }
        if !(n_s >= 0.0) {
            return Err(Error::Domain(format!("n_s must be >= 0, got {n_s}")));
        }
        Ok(Self {
            eta,
            nbar,
            delta,
            n_s,
        })
    }

    /// Recoil exponent x = η²(n̄+1)Δ².
    pub fn recoil_exponent(&self) -> f64 {
        self.eta * self.eta * (self.nbar + 1.0) * self.delta * self.delta
    }

    fn q(&self) -> f64 {
        q_factor_raw(self.recoil_exponent())
    }
}

/// Thermal averages of the collected amplitude over the atom's motional
/// state: ⟨β⟩ = −√⟨|β|²⟩ Q(η²(n̄+1)Δ²) and ⟨|β|²⟩ = (3/8) N_s Δ².
pub fn thermal_beta_moments(r: &RecoilScenario) -> (Complex64, f64) {
    let mean_sq = 3.0 / 8.0 * r.n_s * r.delta * r.delta;
    let mean = Complex64::new(-mean_sq.sqrt() * r.q(), 0.0);
    (mean, mean_sq)
}

/// Monochromatic entanglement fidelity under recoil alone, at the optimal
/// reference amplitude α = −√⟨|β|²⟩: F = ½ (1 + Q)/(2 − Q).
pub fn recoil_fidelity(r: &RecoilScenario) -> f64 {
    let q = r.q();
    0.5 * (1.0 + q) / (2.0 - q)
}

/// Fidelity including multi-photon which-path leakage,
/// F = ½ (1 + e^{−N_s/2} Q)/(2 − Q). Equals [`recoil_fidelity`] at
/// N_s = 0 and decreases with N_s.
pub fn multiphoton_fidelity(r: &RecoilScenario) -> f64 {
    let q = r.q();
    0.5 * (1.0 + (-r.n_s / 2.0).exp() * q) / (2.0 - q)
}

/// Heralding success probability P = 1 − e^{−⟨|β|²⟩/4} = 1 − e^{−3N_sΔ²/32}.
/// The factor 4 reflects the 25% chance that a collected photon triggers
/// the heralding detector.
pub fn success_probability(r: &RecoilScenario) -> f64 {
    let exponent = 3.0 * r.n_s * r.delta * r.delta / 32.0;
    -(-exponent).exp_m1()
}

/// Inverts the multi-photon fidelity for the scattered photon number:
/// N_s = −2 ln[(2F(2−Q) − 1)/Q].
///
/// Errors when `f_target` exceeds the recoil-limited maximum
/// ½(1+Q)/(2−Q) at this geometry, or sits at or below the floor reachable
/// only with infinite scattering.
pub fn n_s_for_fidelity(f_target: f64, eta: f64, nbar: f64, delta: f64) -> Result<f64> {
    let probe = RecoilScenario::new(eta, nbar, delta, 0.0)?;
    if !(f_target > 0.25 && f_target <= 1.0) {
        return Err(Error::Domain(format!(
            "target fidelity must lie in (1/4, 1], got {f_target}"
        )));
    }
    let q = probe.q();
    let ratio = (2.0 * f_target * (2.0 - q) - 1.0) / q;
    if ratio > 1.0 + 1e-12 {
        return Err(Error::Infeasible(format!(
            "fidelity {f_target} exceeds the recoil-limited maximum {} at delta = {delta}",
            recoil_fidelity(&probe)
        )));
    }
    if ratio <= 0.0 {
        return Err(Error::Infeasible(format!(
            "fidelity {f_target} is at or below the multi-photon floor {} at delta = {delta}; \
             no finite scattered photon number reaches it",
            0.5 / (2.0 - q)
        )));
    }
    Ok((-2.0 * ratio.ln()).max(0.0))
}

/// Weak-excitation verdict bands: the ratios compare a photon rate to the
/// relevant relaxation rate, so "small" means well below unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Ratio < 0.1.
    Pass,
    /// 0.1 <= ratio < 1.
    Warn,
    /// Ratio >= 1: the linear-scatterer treatment has broken down.
    Fail,
}

impl Verdict {
    fn grade(ratio: f64) -> Self {
        if ratio < 0.1 {
            Verdict::Pass
        } else if ratio < 1.0 {
            Verdict::Warn
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Warn => "warn",
            Verdict::Fail => "fail",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Both weak-excitation conditions with their dimensionless ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport {
    /// Atom condition: (N_s/τ)/γ_a, the scattering rate against the atomic
    /// decay rate.
    pub atom_ratio: f64,
    pub atom_verdict: Verdict,
    /// QD condition: (N_ref/τ_p)·τ_mod, the reflected-photon rate against
    /// the inverse modified QD lifetime.
    pub qd_ratio: f64,
    pub qd_verdict: Verdict,
}

impl ValidityReport {
    pub fn any_fail(&self) -> bool {
        self.atom_verdict == Verdict::Fail || self.qd_verdict == Verdict::Fail
    }
}

/// Evaluates both weak-excitation conditions. Rates and durations are in
/// the internal rad/ns and ns units; counts are dimensionless.
pub fn weak_excitation_check(
    n_s: f64,
    tau: f64,
    gamma_a: f64,
    n_ref: f64,
    tau_p: f64,
    tau_mod: f64,
) -> Result<ValidityReport> {
    if !(tau > 0.0 && gamma_a > 0.0 && tau_p > 0.0 && tau_mod > 0.0) {
        return Err(Error::Domain(
            "weak-excitation check requires positive rates and durations".into(),
        ));
    }
    if !(n_s >= 0.0 && n_ref >= 0.0) {
        return Err(Error::Domain(
            "photon counts must be non-negative".into(),
        ));
    }
    let atom_ratio = n_s / tau / gamma_a;
    let qd_ratio = n_ref / tau_p * tau_mod;
    Ok(ValidityReport {
        atom_ratio,
        atom_verdict: Verdict::grade(atom_ratio),
        qd_ratio,
        qd_verdict: Verdict::grade(qd_ratio),
    })
}

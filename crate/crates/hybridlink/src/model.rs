//! Physical parameters and frequency-domain optical response of both nodes:
//! the cavity-coupled quantum dot (reflection/transmission spectra) and the
//! trapped atom (Lorentzian elastic scattering, scattered photon number,
//! recoil and collection geometry).
//!
//! Frequency convention: every stored frequency or rate is angular, in
//! rad/ns, expressed as an offset from a common reference (normally the
//! cavity resonance). Lengths are metres, masses kilograms.

use num_complex::Complex64;

use crate::constants::{ATOMIC_MASS_KG, HBAR, TWO_PI};
use crate::error::{Error, Result};
use crate::numerics::QuadratureSpec;

/// Cavity/QD optical response inputs.
///
/// `omega_c` is the cavity resonance as an offset from the global frequency
/// reference (zero when the reference is the cavity itself). `delta_qd` is
/// the QD-laser detuning when the laser sits exactly on the cavity
/// resonance; at a general probe frequency the detuning is
/// `delta_qd + (omega - omega_c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityQDParams {
    /// QD-cavity coupling strength g (rad/ns).
    pub g: f64,
    /// Cavity linewidth κ (rad/ns).
    pub kappa: f64,
    /// QD exciton dipole decay rate γ_qd (rad/ns).
    pub gamma_qd: f64,
    /// Cavity resonance (rad/ns offset from the reference).
    pub omega_c: f64,
    /// QD-laser detuning at the cavity resonance (rad/ns).
    pub delta_qd: f64,
    /// Spin-dependent branch: coupled means the QD reflects, uncoupled
    /// means the bare cavity transmits (cooperativity forced to zero).
    pub coupled: bool,
}

impl CavityQDParams {
    pub fn new(
        g: f64,
        kappa: f64,
        gamma_qd: f64,
        omega_c: f64,
        delta_qd: f64,
        coupled: bool,
    ) -> Result<Self> {
        if !(g >= 0.0) {
            return Err(Error::Domain(format!("g must be >= 0, got {g}")));
        }
        if !(kappa > 0.0) {
            return Err(Error::Domain(format!("kappa must be > 0, got {kappa}")));
        }
        if !(gamma_qd > 0.0) {
            return Err(Error::Domain(format!(
                "gamma_qd must be > 0, got {gamma_qd}"
            )));
        }
        if !omega_c.is_finite() || !delta_qd.is_finite() {
            return Err(Error::Domain("omega_c and delta_qd must be finite".into()));
        }
        Ok(Self {
            g,
            kappa,
            gamma_qd,
            omega_c,
            delta_qd,
            coupled,
        })
    }
}

/// Atomic transition inputs.
///
/// `delta_a` is the laser-atom detuning δ_a = ω − ω_a evaluated at the
/// laser line center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomParams {
    /// Total dipole decay rate γ_a, including dephasing (rad/ns).
    pub gamma_a: f64,
    /// Radiative decay rate γ_r back to the scattering ground state (rad/ns).
    pub gamma_r: f64,
    /// Transition wavelength (m).
    pub lambda0: f64,
    /// Laser-atom detuning at line center (rad/ns).
    pub delta_a: f64,
}

impl AtomParams {
    pub fn new(gamma_a: f64, gamma_r: f64, lambda0: f64, delta_a: f64) -> Result<Self> {
        if !(gamma_a > 0.0) {
            return Err(Error::Domain(format!("gamma_a must be > 0, got {gamma_a}")));
        }
        if !(0.0..=gamma_a).contains(&gamma_r) {
            return Err(Error::Domain(format!(
                "gamma_r must satisfy 0 <= gamma_r <= gamma_a, got {gamma_r}"
            )));
        }
        if !(lambda0 > 0.0) {
            return Err(Error::Domain(format!("lambda0 must be > 0, got {lambda0}")));
        }
        if !delta_a.is_finite() {
            return Err(Error::Domain("delta_a must be finite".into()));
        }
        Ok(Self {
            gamma_a,
            gamma_r,
            lambda0,
            delta_a,
        })
    }
}

/// Motional state of the trapped atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapState {
    /// Atom mass (kg).
    pub mass: f64,
    /// Trap angular frequency (rad/s).
    pub omega_t: f64,
    /// Mean thermal vibrational occupation n̄.
    pub nbar: f64,
}

impl TrapState {
    pub fn new(mass: f64, omega_t: f64, nbar: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::Domain(format!("mass must be > 0, got {mass}")));
        }
        if !(omega_t > 0.0) {
            return Err(Error::Domain(format!("omega_t must be > 0, got {omega_t}")));
        }
        if !(nbar >= 0.0) {
            return Err(Error::Domain(format!("nbar must be >= 0, got {nbar}")));
        }
        Ok(Self {
            mass,
            omega_t,
            nbar,
        })
    }

    /// Convenience constructor from a mass in atomic mass units.
    pub fn from_amu(mass_u: f64, omega_t: f64, nbar: f64) -> Result<Self> {
        Self::new(mass_u * ATOMIC_MASS_KG, omega_t, nbar)
    }
}

/// Angular collection window for the scattered light, measured from the
/// pump propagation axis. The outer half-angle is capped at 45° (numerical
/// aperture 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectionGeometry {
    /// Inner half-angle Δ_i (rad); rejects the collimated input beam.
    pub delta_i: f64,
    /// Outer half-angle Δ_o (rad).
    pub delta_o: f64,
}

impl CollectionGeometry {
    pub fn new(delta_i: f64, delta_o: f64) -> Result<Self> {
        if !(delta_i >= 0.0 && delta_i < delta_o && delta_o <= std::f64::consts::FRAC_PI_4) {
            return Err(Error::Domain(format!(
                "collection window must satisfy 0 <= delta_i < delta_o <= pi/4, \
                 got ({delta_i}, {delta_o})"
            )));
        }
        Ok(Self { delta_i, delta_o })
    }
}

/// Gaussian input pulse, Ω(ω) = Ω₀ exp(−τ²(ω−ω₀)²/4).
///
/// `omega0` is the pulse center as an offset from the cavity resonance.
/// The peak amplitude is in arbitrary linear units: every fidelity
/// downstream is scale-invariant in it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    /// Center frequency ω₀ (rad/ns offset from cavity resonance).
    pub omega0: f64,
    /// Pulse duration τ (ns).
    pub tau: f64,
    /// Peak spectral amplitude Ω₀.
    pub amplitude: f64,
}

impl PulseSpec {
    pub fn new(omega0: f64, tau: f64, amplitude: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::Domain(format!("tau must be > 0, got {tau}")));
        }
        if !(amplitude >= 0.0) {
            return Err(Error::Domain(format!(
                "amplitude must be >= 0, got {amplitude}"
            )));
        }
        if !omega0.is_finite() {
            return Err(Error::Domain("omega0 must be finite".into()));
        }
        Ok(Self {
            omega0,
            tau,
            amplitude,
        })
    }
}

/// Complex Lorentzian line profile ℒ(δ, γ) = γ / (γ − iδ).
///
/// Unit magnitude on resonance, |ℒ|² = γ²/(γ² + δ²) off resonance.
pub fn lorentzian(delta: f64, gamma: f64) -> Result<Complex64> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!(
            "lorentzian width must be > 0, got {gamma}"
        )));
    }
    Ok(lorentzian_raw(delta, gamma))
}

/// Unchecked Lorentzian for hot paths whose parameters were validated at
/// construction time.
#[inline]
pub(crate) fn lorentzian_raw(delta: f64, gamma: f64) -> Complex64 {
    gamma / Complex64::new(gamma, -delta)
}

/// QD-cavity cooperativity 𝒞 = 4g² / (γ_qd κ).
pub fn cooperativity(p: &CavityQDParams) -> f64 {
    4.0 * p.g * p.g / (p.gamma_qd * p.kappa)
}

/// Effective cooperativity of the selected spin branch: the uncoupled
/// branch is modeled as the exact 𝒞 = 0 limit.
#[inline]
fn branch_cooperativity(p: &CavityQDParams) -> f64 {
    if p.coupled {
        cooperativity(p)
    } else {
        0.0
    }
}

/// −iΔ + 𝒞ℒ(δ_qd, γ_qd): numerator of r(ω) and the response part shared
/// with the transmission denominator.
#[inline]
fn cavity_response(omega: f64, p: &CavityQDParams) -> Complex64 {
    let scaled_detuning = (omega - p.omega_c) / p.kappa;
    let qd_detuning = p.delta_qd + (omega - p.omega_c);
    let coupling = branch_cooperativity(p) * lorentzian_raw(qd_detuning, p.gamma_qd);
    Complex64::new(0.0, -scaled_detuning) + coupling
}

/// Cavity reflection coefficient
/// r(ω) = (−iΔ + 𝒞ℒ(δ_qd, γ_qd)) / (1 − iΔ + 𝒞ℒ(δ_qd, γ_qd)),
/// with Δ = (ω − ω_c)/κ. Satisfies r = 1 − t to rounding error.
pub fn cavity_reflectivity(omega: f64, p: &CavityQDParams) -> Complex64 {
    let response = cavity_response(omega, p);
    response / (response + 1.0)
}

/// Cavity transmission coefficient t(ω) = 1 / (1 − iΔ + 𝒞ℒ(δ_qd, γ_qd)).
pub fn cavity_transmission(omega: f64, p: &CavityQDParams) -> Complex64 {
    (cavity_response(omega, p) + 1.0).finv()
}

/// Resonant atomic cross section σ₀ = 3λ² / 2π.
pub fn atomic_cross_section(lambda0: f64) -> Result<f64> {
    if !(lambda0 > 0.0) {
        return Err(Error::Domain(format!(
            "wavelength must be > 0, got {lambda0}"
        )));
    }
    Ok(3.0 * lambda0 * lambda0 / TWO_PI)
}

/// Free-space radiative decay rate γ_r = ω₀³ d² / (6πε₀ħc³).
///
/// SI in, SI out: `omega0` in rad/s, `dipole` in C·m, result in rad/s.
pub fn radiative_decay_rate(omega0: f64, dipole: f64) -> Result<f64> {
    if !(omega0 > 0.0) {
        return Err(Error::Domain(format!("omega0 must be > 0, got {omega0}")));
    }
    if !(dipole >= 0.0) {
        return Err(Error::Domain(format!("dipole must be >= 0, got {dipole}")));
    }
    let c = crate::constants::SPEED_OF_LIGHT;
    let denom = 6.0 * std::f64::consts::PI * crate::constants::VACUUM_PERMITTIVITY * HBAR * c * c * c;
    Ok(omega0.powi(3) * dipole * dipole / denom)
}

/// Total number of elastically scattered photons for an input photon areal
/// density `n_i` (photons/m²):
/// N_s = |ℒ(δ_a, γ_a)|² (γ_r/γ_a)² σ₀ n_i.
pub fn scattered_photon_number(a: &AtomParams, n_i: f64) -> Result<f64> {
    if !(n_i >= 0.0) {
        return Err(Error::Domain(format!("n_i must be >= 0, got {n_i}")));
    }
    let line = lorentzian_raw(a.delta_a, a.gamma_a).norm_sqr();
    let branching = a.gamma_r / a.gamma_a;
    let sigma0 = atomic_cross_section(a.lambda0)?;
    Ok(line * branching * branching * sigma0 * n_i)
}

/// Lamb-Dicke parameter η = k √(ħ / 2mω_t), k = 2π/λ.
pub fn lamb_dicke(t: &TrapState, lambda0: f64) -> Result<f64> {
    if !(lambda0 > 0.0) {
        return Err(Error::Domain(format!(
            "wavelength must be > 0, got {lambda0}"
        )));
    }
    let k = TWO_PI / lambda0;
    Ok(k * (HBAR / (2.0 * t.mass * t.omega_t)).sqrt())
}

/// Exact solid-angle area of the collection window on the unit sphere,
/// A = 2π(cos Δ_i − cos Δ_o).
pub fn collection_area(c: &CollectionGeometry) -> f64 {
    TWO_PI * (c.delta_i.cos() - c.delta_o.cos())
}

/// Paraxial approximation of the collection area, A ≈ π(Δ_o² − Δ_i²).
pub fn collection_area_paraxial(c: &CollectionGeometry) -> f64 {
    std::f64::consts::PI * (c.delta_o * c.delta_o - c.delta_i * c.delta_i)
}

/// Full parameter record for one physical configuration of the link,
/// including the numerical tolerances used by the fidelity integrals and
/// the inverse solvers. This is the unit the sweep drivers and the CLI
/// operate on.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub cavity: CavityQDParams,
    pub atom: AtomParams,
    pub trap: TrapState,
    pub geometry: CollectionGeometry,
    pub pulse: PulseSpec,
    /// When set, bypasses the first-principles Lamb-Dicke formula. The
    /// reference parameter set pins η = 0.09.
    pub eta_override: Option<f64>,
    pub quad: QuadratureSpec,
    /// Abscissa tolerance for inverse solves (applied to log10 τ).
    pub root_x_tol: f64,
}

impl ModelParams {
    /// Reference parameter set: g/2π = 16 GHz, κ/2π = 25 GHz,
    /// γ_qd/2π = 1 GHz, γ_a/2π = 4.2 MHz with γ_r = γ_a, λ = 935 nm,
    /// a ¹⁷¹Yb⁺-mass atom in a 10⁶ rad/s trap at n̄ = 10, full 45°
    /// collection cone, 10 ns unit-amplitude pulse on cavity resonance,
    /// and η pinned to 0.09.
    pub fn reference() -> Self {
        use crate::constants::{ghz_to_angular, mhz_to_angular};
        Self {
            cavity: CavityQDParams::new(
                ghz_to_angular(16.0),
                ghz_to_angular(25.0),
                ghz_to_angular(1.0),
                0.0,
                0.0,
                true,
            )
            .expect("reference cavity params are valid"),
            atom: AtomParams::new(
                mhz_to_angular(4.2),
                mhz_to_angular(4.2),
                935e-9,
                ghz_to_angular(1.0),
            )
            .expect("reference atom params are valid"),
            trap: TrapState::from_amu(171.0, 1e6, 10.0).expect("reference trap is valid"),
            geometry: CollectionGeometry::new(0.0, std::f64::consts::FRAC_PI_4)
                .expect("reference geometry is valid"),
            pulse: PulseSpec::new(0.0, 10.0, 1.0).expect("reference pulse is valid"),
            eta_override: Some(0.09),
            quad: QuadratureSpec::default(),
            root_x_tol: 1e-8,
        }
    }

    /// Lamb-Dicke parameter in effect: the override when present,
    /// otherwise derived from the trap state and wavelength.
    pub fn eta(&self) -> Result<f64> {
        match self.eta_override {
            Some(eta) => Ok(eta),
            None => lamb_dicke(&self.trap, self.atom.lambda0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{ghz_to_angular, mhz_to_angular, SPEED_OF_LIGHT};

    fn reference_cavity() -> CavityQDParams {
        ModelParams::reference().cavity
    }

    #[test]
    fn lorentzian_resonance_is_unity() {
        let l = lorentzian(0.0, 1.7).unwrap();
        assert_eq!(l, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn lorentzian_half_width_point() {
        // delta = gamma gives (1 + i)/2, squared magnitude 1/2
        let l = lorentzian(2.3, 2.3).unwrap();
        assert!((l - Complex64::new(0.5, 0.5)).norm() < 1e-15);
        assert!((l.norm_sqr() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lorentzian_far_detuned_magnitude() {
        // 0.1 GHz detuning on a 4.2 MHz line
        let l = lorentzian(ghz_to_angular(0.1), mhz_to_angular(4.2)).unwrap();
        assert!((l.norm_sqr() - 1.7608937833661421e-3).abs() < 1e-15);
    }

    #[test]
    fn lorentzian_rejects_nonpositive_width() {
        assert!(lorentzian(1.0, 0.0).is_err());
        assert!(lorentzian(1.0, -2.0).is_err());
        assert!(lorentzian(1.0, f64::NAN).is_err());
    }

    #[test]
    fn cooperativity_reference_values() {
        let p = reference_cavity();
        assert!((cooperativity(&p) - 40.96).abs() < 1e-12);

        let half_g = CavityQDParams::new(
            ghz_to_angular(8.0),
            ghz_to_angular(25.0),
            ghz_to_angular(1.0),
            0.0,
            0.0,
            true,
        )
        .unwrap();
        assert!((cooperativity(&half_g) - 10.24).abs() < 1e-12);

        let decoupled = CavityQDParams::new(0.0, 1.0, 1.0, 0.0, 0.0, true).unwrap();
        assert_eq!(cooperativity(&decoupled), 0.0);
    }

    #[test]
    fn empty_cavity_on_resonance_transmits() {
        let p = CavityQDParams::new(0.0, ghz_to_angular(25.0), ghz_to_angular(1.0), 0.0, 0.0, true)
            .unwrap();
        let r = cavity_reflectivity(0.0, &p);
        let t = cavity_transmission(0.0, &p);
        assert!(r.norm() < 1e-15);
        assert!((t - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn coupled_cavity_on_resonance_reflects() {
        let p = reference_cavity();
        let r = cavity_reflectivity(0.0, &p);
        let t = cavity_transmission(0.0, &p);
        assert!((r.re - 0.9761677788369876).abs() < 1e-14);
        assert!(r.im.abs() < 1e-14);
        assert!((t.re - 0.023832221163012393).abs() < 1e-14);
    }

    #[test]
    fn uncoupled_branch_forces_zero_cooperativity() {
        let mut p = reference_cavity();
        p.coupled = false;
        // identical to an empty cavity
        let empty =
            CavityQDParams::new(0.0, p.kappa, p.gamma_qd, p.omega_c, p.delta_qd, true).unwrap();
        for &w in &[-40.0, -1.0, 0.0, 2.5, 90.0] {
            assert_eq!(cavity_reflectivity(w, &p), cavity_reflectivity(w, &empty));
        }
    }

    #[test]
    fn far_off_resonance_asymptotes() {
        let p = reference_cavity();
        let w = 1e9 * p.kappa;
        assert!((cavity_reflectivity(w, &p).norm() - 1.0).abs() < 1e-8);
        assert!(cavity_transmission(w, &p).norm() < 1e-8);
    }

    #[test]
    fn reflectivity_magnitude_bounded() {
        let p = reference_cavity();
        let mut w = -1e4;
        while w < 1e4 {
            assert!(cavity_reflectivity(w, &p).norm() <= 1.0 + 1e-12);
            w += 7.3;
        }
    }

    #[test]
    fn cross_section_values() {
        assert!((atomic_cross_section(1.0).unwrap() - 0.477464829275686).abs() < 1e-15);
        assert!((atomic_cross_section(935e-9).unwrap() - 4.174116903735366e-13).abs() < 1e-26);
        // homogeneity: sigma0(2 lambda) = 4 sigma0(lambda)
        let s1 = atomic_cross_section(0.7).unwrap();
        let s2 = atomic_cross_section(1.4).unwrap();
        assert!((s2 - 4.0 * s1).abs() < 1e-15);
    }

    #[test]
    fn radiative_rate_scaling_and_value() {
        assert_eq!(radiative_decay_rate(1e15, 0.0).unwrap(), 0.0);
        let g1 = radiative_decay_rate(2e15, 1e-29).unwrap();
        let g2 = radiative_decay_rate(2e15, 2e-29).unwrap();
        assert!((g2 / g1 - 4.0).abs() < 1e-12);

        let omega0 = TWO_PI * SPEED_OF_LIGHT / 935e-9;
        let gr = radiative_decay_rate(omega0, 1e-29).unwrap();
        assert!((gr - 1.7241647374939343e6).abs() / gr < 1e-12);
    }

    #[test]
    fn scattered_photons_reference_chain() {
        // resonant saturation of the formula: N_s = 1 at n_i = 1/sigma0
        let resonant = AtomParams::new(1.0, 1.0, 935e-9, 0.0).unwrap();
        let n_i = 1.0 / atomic_cross_section(935e-9).unwrap();
        assert!((scattered_photon_number(&resonant, n_i).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(scattered_photon_number(&resonant, 0.0).unwrap(), 0.0);

        let detuned =
            AtomParams::new(mhz_to_angular(4.2), mhz_to_angular(4.2), 935e-9, ghz_to_angular(0.1))
                .unwrap();
        let n_s = scattered_photon_number(&detuned, 1.36e18).unwrap();
        assert!((n_s - 999.6240049290344).abs() / n_s < 1e-12);
    }

    #[test]
    fn lamb_dicke_reference_values() {
        let trap = TrapState::from_amu(171.0, 1e6, 10.0).unwrap();
        let eta = lamb_dicke(&trap, 935e-9).unwrap();
        assert!((eta - 0.09157327282462728).abs() < 1e-12);

        // the 2pi convention lands near 0.037 instead
        let trap2 = TrapState::from_amu(171.0, TWO_PI * 1e6, 10.0).unwrap();
        let eta2 = lamb_dicke(&trap2, 935e-9).unwrap();
        assert!((eta2 - 0.03653245028447935).abs() < 1e-12);

        // quadrupling the trap frequency halves eta
        let trap4 = TrapState::from_amu(171.0, 4e6, 10.0).unwrap();
        let eta4 = lamb_dicke(&trap4, 935e-9).unwrap();
        assert!((eta4 - eta / 2.0).abs() < 1e-15);

        // an arbitrarily heavy atom takes no recoil
        let heavy = TrapState::from_amu(1e18, 1e6, 10.0).unwrap();
        assert!(lamb_dicke(&heavy, 935e-9).unwrap() < 1e-9);
    }

    #[test]
    fn collection_area_values() {
        let w = CollectionGeometry::new(0.0, 0.1).unwrap();
        assert!((collection_area(&w) - 0.03138975532220612).abs() < 1e-15);
        assert!((collection_area_paraxial(&w) - 0.031415926535897932).abs() < 1e-15);
        // the window closes: area vanishes as delta_i -> delta_o
        let slim = CollectionGeometry::new(0.3, 0.3 + 1e-9).unwrap();
        assert!(collection_area(&slim) < 1e-8);
        // paraxial agreement within 1% for delta_o <= 0.2
        let mut d = 0.01;
        while d <= 0.2 {
            let g = CollectionGeometry::new(0.0, d).unwrap();
            let exact = collection_area(&g);
            let approx = collection_area_paraxial(&g);
            assert!((exact - approx).abs() / exact < 0.01, "delta_o = {d}");
            d += 0.005;
        }
    }

    #[test]
    fn collection_window_invariants() {
        assert!(CollectionGeometry::new(0.1, 0.1).is_err());
        assert!(CollectionGeometry::new(-0.1, 0.2).is_err());
        assert!(CollectionGeometry::new(0.0, 1.0).is_err()); // beyond 45 degrees
        assert!(CollectionGeometry::new(0.0, std::f64::consts::FRAC_PI_4).is_ok());
    }

    #[test]
    fn parameter_validation_messages_name_the_field() {
        let err = CavityQDParams::new(-1.0, 1.0, 1.0, 0.0, 0.0, true).unwrap_err();
        assert!(err.to_string().contains('g'));
        let err = AtomParams::new(1.0, 2.0, 935e-9, 0.0).unwrap_err();
        assert!(err.to_string().contains("gamma_r"));
    }

    #[test]
    fn eta_override_bypasses_formula() {
        let mut params = ModelParams::reference();
        assert_eq!(params.eta().unwrap(), 0.09);
        params.eta_override = None;
        assert!((params.eta().unwrap() - 0.09157327282462728).abs() < 1e-12);
    }
}

//! Numerical model of a heralded photonic link between a cavity-coupled
//! quantum dot and a trapped ion.
//!
//! Both nodes scatter a common weak laser pulse: the QD-cavity system
//! reflects it with a spin-dependent spectrum, the ion scatters it
//! elastically off resonance, and a single-photon detection behind a
//! beamsplitter heralds matter-matter entanglement. This crate evaluates
//! the closed-form and integral expressions governing that process:
//!
//! - [`model`]: physical parameter records and the frequency-domain
//!   optical response of both nodes,
//! - [`numerics`]: adaptive quadrature, bracketed root finding, and
//!   bounded 1-D maximization with explicit tolerance contracts,
//! - [`fidelity`]: spectral-overlap fidelity under pulsed excitation,
//!   recoil and multi-photon corrections, heralding probability, and the
//!   weak-excitation validity checks,
//! - [`sweep`]: inverse solves and the parameter sweeps behind the five
//!   standard result figures.
//!
//! Everything is pure and deterministic: fixed inputs and tolerances give
//! bit-identical outputs on the same build.

pub mod constants;
pub mod error;
pub mod fidelity;
pub mod model;
pub mod numerics;
pub mod sweep;

pub use error::{Error, Result};
pub use fidelity::{
    multiphoton_fidelity, n_s_for_fidelity, pulse_spectrum, q_factor, recoil_fidelity,
    spectral_fidelity, success_probability, thermal_beta_moments, weak_excitation_check,
    RecoilScenario, SpectralScenario, ValidityReport, Verdict,
};
pub use model::{
    atomic_cross_section, cavity_reflectivity, cavity_transmission, collection_area,
    collection_area_paraxial, cooperativity, lamb_dicke, lorentzian, radiative_decay_rate,
    scattered_photon_number, AtomParams, CavityQDParams, CollectionGeometry, ModelParams,
    PulseSpec, TrapState,
};
pub use numerics::{
    find_root, integrate_adaptive, maximize_1d, Maximum, Quadrature, QuadratureSpec, RootSpec,
};
pub use sweep::{
    intensity_for_scatter, optimal_collection_angle, pulse_duration_for_fidelity, run_sweep,
    AxisGrid, Column, Constraints, FigureId, GridScale, PointStatus, SweepMetadata, SweepRequest,
    SweepResult,
};

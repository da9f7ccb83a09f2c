//! Parameter sweeps and inverse solves behind the five standard result
//! figures: fidelity vs pulse duration, required pulse duration and pump
//! intensity vs detuning, fidelity and success probability vs collection
//! angle, and the optimal-efficiency-vs-n̄ curve.
//!
//! Sweep points are independent; they are evaluated in grid order so the
//! output is deterministic for a fixed request and tolerance set.

use std::time::Instant;

use crate::constants::{angular_to_ghz, ghz_to_angular, HBAR, SPEED_OF_LIGHT, TWO_PI};
use crate::error::{Error, Result};
use crate::fidelity::{
    n_s_for_fidelity, recoil_fidelity, spectral_fidelity, success_probability, RecoilScenario,
    SpectralScenario,
};
use crate::model::{atomic_cross_section, lorentzian_raw, AtomParams, ModelParams};
use crate::numerics::{find_root, maximize_1d, RootSpec};

/// Pulse-duration search window for the fidelity inverse solve: 1 ps to 1 µs.
const TAU_BRACKET_NS: (f64, f64) = (1e-3, 1e3);
/// Samples of the log-τ scan used to bracket the fidelity crossing.
const TAU_SCAN_POINTS: usize = 25;

/// The five standard result figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Fidelity vs pulse duration, one curve per atomic detuning.
    Fig3,
    /// Required pulse duration and pump intensity vs atomic detuning.
    Fig4,
    /// Recoil fidelity vs collection angle, one curve per n̄.
    Fig5,
    /// Success probability vs collection angle at fixed fidelity.
    Fig6,
    /// Optimal success probability and collection angle vs n̄.
    Fig7,
}

impl FigureId {
    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fig3" => Some(FigureId::Fig3),
            "fig4" => Some(FigureId::Fig4),
            "fig5" => Some(FigureId::Fig5),
            "fig6" => Some(FigureId::Fig6),
            "fig7" => Some(FigureId::Fig7),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScale {
    Linear,
    Log,
}

/// One sweep axis: `count` points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: GridScale,
}

impl AxisGrid {
    pub fn linear(min: f64, max: f64, count: usize) -> Self {
        Self {
            min,
            max,
            count,
            scale: GridScale::Linear,
        }
    }

    pub fn log(min: f64, max: f64, count: usize) -> Self {
        Self {
            min,
            max,
            count,
            scale: GridScale::Log,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::Domain(format!(
                "grid count must be >= 2, got {}",
                self.count
            )));
        }
        if !(self.min < self.max) {
            return Err(Error::Domain(format!(
                "grid must satisfy min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.scale == GridScale::Log && !(self.min > 0.0) {
            return Err(Error::Domain(format!(
                "log grids require min > 0, got {}",
                self.min
            )));
        }
        Ok(())
    }

    /// Grid points with exact endpoints.
    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i == 0 {
                    self.min
                } else if i == n - 1 {
                    self.max
                } else {
                    let t = i as f64 / (n - 1) as f64;
                    match self.scale {
                        GridScale::Linear => self.min + (self.max - self.min) * t,
                        GridScale::Log => self.min * (self.max / self.min).powf(t),
                    }
                }
            })
            .collect()
    }
}

/// Sweep targets: the fidelity the link must deliver, the scattered photon
/// budget, and the collection-angle cap imposed by the optics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraints {
    pub f_target: f64,
    pub n_s_target: f64,
    pub delta_max: f64,
}

impl Default for Constraints {
    fn default() -> Self {
        Self {
            f_target: 0.9,
            n_s_target: 0.1,
            delta_max: std::f64::consts::FRAC_PI_4,
        }
    }
}

/// Atomic detunings (rad/ns) of the standard fidelity-vs-τ curve family.
pub fn default_detuning_family() -> Vec<f64> {
    [0.1, 1.0, 10.0].iter().map(|g| ghz_to_angular(*g)).collect()
}

/// Thermal occupations of the standard collection-angle curve families.
pub fn default_nbar_family() -> Vec<f64> {
    vec![0.0, 10.0, 100.0, 1000.0]
}

/// A full sweep specification: which figure, over which grid, at which
/// fixed physical parameters and constraint targets.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub figure: FigureId,
    /// Axis of the figure: τ in ns (fig3, log), δ_a in GHz (fig4, log),
    /// Δ in rad (fig5/fig6), n̄ (fig7).
    pub grid: AxisGrid,
    pub params: ModelParams,
    pub constraints: Constraints,
    /// Curve family for fig3 (rad/ns).
    pub detuning_family: Vec<f64>,
    /// Curve family for fig5/fig6.
    pub nbar_family: Vec<f64>,
}

impl SweepRequest {
    /// Standard request for a figure: default grid, curve families, and
    /// constraint targets.
    pub fn for_figure(figure: FigureId, params: ModelParams) -> Self {
        let grid = match figure {
            FigureId::Fig3 => AxisGrid::log(0.01, 100.0, 60),
            FigureId::Fig4 => AxisGrid::log(0.05, 20.0, 40),
            FigureId::Fig5 | FigureId::Fig6 => {
                AxisGrid::linear(0.01, std::f64::consts::FRAC_PI_4, 60)
            }
            FigureId::Fig7 => AxisGrid::linear(0.0, 50.0, 51),
        };
        Self {
            figure,
            grid,
            params,
            constraints: Constraints::default(),
            detuning_family: default_detuning_family(),
            nbar_family: default_nbar_family(),
        }
    }

    fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.params.quad.validate()?;
        let c = &self.constraints;
        if !(c.f_target > 0.25 && c.f_target < 1.0) {
            return Err(Error::Domain(format!(
                "f_target must lie in (1/4, 1), got {}",
                c.f_target
            )));
        }
        if !(c.n_s_target > 0.0) {
            return Err(Error::Domain(format!(
                "n_s_target must be > 0, got {}",
                c.n_s_target
            )));
        }
        if !(c.delta_max > 0.0 && c.delta_max <= std::f64::consts::FRAC_PI_4) {
            return Err(Error::Domain(format!(
                "delta_max must lie in (0, pi/4], got {}",
                c.delta_max
            )));
        }
        if self.figure == FigureId::Fig3 && self.detuning_family.is_empty() {
            return Err(Error::Domain("fig3 needs a non-empty detuning family".into()));
        }
        if matches!(self.figure, FigureId::Fig5 | FigureId::Fig6) && self.nbar_family.is_empty() {
            return Err(Error::Domain("fig5/fig6 need a non-empty nbar family".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointStatus {
    Ok,
    Infeasible,
}

impl PointStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PointStatus::Ok => "ok",
            PointStatus::Infeasible => "infeasible",
        }
    }
}

/// One named output column.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

impl Column {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            values: Vec::new(),
        }
    }
}

/// Echo of the request plus tool provenance, carried alongside the data.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepMetadata {
    pub figure: String,
    pub tool_version: String,
    pub quad_rel_tol: f64,
    pub quad_abs_tol: f64,
    pub root_x_tol: f64,
    /// Resolved input echo as (key, value) text pairs.
    pub inputs: Vec<(String, String)>,
    pub wall_time_ms: f64,
}

/// Sweep output: equal-length named columns, one status per grid row, and
/// the request echo.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub columns: Vec<Column>,
    pub status: Vec<PointStatus>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    pub fn rows(&self) -> usize {
        self.status.len()
    }

    pub fn any_infeasible(&self) -> bool {
        self.status.iter().any(|s| *s == PointStatus::Infeasible)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }
}

/// Pulse duration (ns) at which the spectral fidelity reaches `f_target`
/// for atomic detuning `delta_a` (rad/ns), found by bracketed root-finding
/// in log τ over [1 ps, 1 µs].
pub fn pulse_duration_for_fidelity(
    f_target: f64,
    delta_a: f64,
    params: &ModelParams,
) -> Result<f64> {
    if !(f_target > 0.25 && f_target < 1.0) {
        return Err(Error::Domain(format!(
            "f_target must lie in (1/4, 1), got {f_target}"
        )));
    }
    let fidelity_at = |log_tau: f64| -> Result<f64> {
        let tau = 10f64.powf(log_tau);
        let mut pulse = params.pulse;
        pulse.tau = tau;
        let mut atom = params.atom;
        atom.delta_a = delta_a;
        let scenario = SpectralScenario::new(pulse, params.cavity, atom);
        spectral_fidelity(&scenario, &params.quad)
    };

    let (lo, hi) = (TAU_BRACKET_NS.0.log10(), TAU_BRACKET_NS.1.log10());
    let mut scan = Vec::with_capacity(TAU_SCAN_POINTS);
    for i in 0..TAU_SCAN_POINTS {
        let x = lo + (hi - lo) * i as f64 / (TAU_SCAN_POINTS - 1) as f64;
        scan.push((x, fidelity_at(x)?));
    }

    let bracket = scan
        .windows(2)
        .find(|w| (w[0].1 - f_target) * (w[1].1 - f_target) <= 0.0);
    let Some(bracket) = bracket else {
        let samples: Vec<String> = scan
            .iter()
            .map(|(x, f)| format!("(tau={:.3e} ns, F={:.4})", 10f64.powf(*x), f))
            .collect();
        return Err(Error::Infeasible(format!(
            "fidelity {f_target} is never crossed for delta_a = {:.4} GHz; curve sample: {}",
            angular_to_ghz(delta_a),
            samples.join(", ")
        )));
    };

    let spec = RootSpec {
        bracket: (bracket[0].0, bracket[1].0),
        x_tol: params.root_x_tol,
        max_iter: 200,
    };
    // root-finding on a cached-error closure: propagate the first failure
    let mut inner_error: Option<Error> = None;
    let root = find_root(
        |x| match fidelity_at(x) {
            Ok(f) => f - f_target,
            Err(e) => {
                inner_error.get_or_insert(e);
                f64::NAN
            }
        },
        &spec,
    );
    if let Some(e) = inner_error {
        return Err(e);
    }
    Ok(10f64.powf(root?))
}

/// Pump intensity (W/cm²) required to scatter `n_s_target` photons in a
/// pulse of duration `tau` (ns) at detuning `delta_a` (rad/ns):
/// I = N_s ħω₀ / (|ℒ(δ_a, γ_a)|² (γ_r/γ_a)² σ₀ τ).
pub fn intensity_for_scatter(
    n_s_target: f64,
    delta_a: f64,
    tau: f64,
    atom: &AtomParams,
) -> Result<f64> {
    if !(n_s_target > 0.0) {
        return Err(Error::Domain(format!(
            "n_s_target must be > 0, got {n_s_target}"
        )));
    }
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("tau must be > 0, got {tau}")));
    }
    let omega0 = TWO_PI * SPEED_OF_LIGHT / atom.lambda0; // rad/s
    let line = lorentzian_raw(delta_a, atom.gamma_a).norm_sqr();
    let branching = atom.gamma_r / atom.gamma_a;
    let sigma0 = atomic_cross_section(atom.lambda0)?;
    let tau_s = tau * 1e-9;
    let w_per_m2 = n_s_target * HBAR * omega0 / (line * branching * branching * sigma0 * tau_s);
    Ok(w_per_m2 * 1e-4)
}

/// Collection angle that maximizes the heralding probability subject to a
/// fidelity floor: maximizes P(Δ) = success_probability(N_s(F_target, Δ), Δ)
/// over Δ ∈ (0, delta_max]. Returns the boundary when the objective is
/// still increasing there.
pub fn optimal_collection_angle(
    f_target: f64,
    eta: f64,
    nbar: f64,
    delta_max: f64,
) -> Result<(f64, f64)> {
    if !(f_target > 0.25 && f_target < 1.0) {
        return Err(Error::Domain(format!(
            "f_target must lie in (1/4, 1), got {f_target}"
        )));
    }
    if !(delta_max > 0.0 && delta_max <= std::f64::consts::FRAC_PI_4) {
        return Err(Error::Domain(format!(
            "delta_max must lie in (0, pi/4], got {delta_max}"
        )));
    }

    let recoil_at = |delta: f64| {
        RecoilScenario::new(eta, nbar, delta, 0.0).map(|r| recoil_fidelity(&r))
    };

    // the feasible range is (0, delta_hi]: recoil alone caps the fidelity
    // once the collection cone opens too far
    let delta_hi = if recoil_at(delta_max)? >= f_target {
        delta_max
    } else {
        let lo = delta_max * 1e-9;
        if recoil_at(lo)? < f_target {
            return Err(Error::Infeasible(format!(
                "fidelity {f_target} is unreachable at any collection angle \
                 (eta = {eta}, nbar = {nbar})"
            )));
        }
        find_root(
            |d| recoil_at(d).map_or(f64::NAN, |f| f - f_target),
            &RootSpec::new(lo, delta_max, 1e-13),
        )?
    };

    let objective = |delta: f64| -> f64 {
        match n_s_for_fidelity(f_target, eta, nbar, delta) {
            Ok(n_s) => {
                let r = RecoilScenario::new(eta, nbar, delta, n_s)
                    .expect("feasible scenario inside the searched range");
                success_probability(&r)
            }
            Err(_) => 0.0,
        }
    };

    let lo = (delta_hi * 1e-6).min(1e-6);
    let best = maximize_1d(objective, lo, delta_hi, 1e-10)?;
    Ok((best.x, best.value))
}

fn echo_inputs(req: &SweepRequest) -> Vec<(String, String)> {
    let p = &req.params;
    let fmt = |v: f64| format!("{v:e}");
    let list = |vals: &[f64]| {
        vals.iter()
            .map(|v| format!("{v:e}"))
            .collect::<Vec<_>>()
            .join(",")
    };
    vec![
        ("figure".into(), req.figure.as_str().into()),
        ("grid_min".into(), fmt(req.grid.min)),
        ("grid_max".into(), fmt(req.grid.max)),
        ("grid_count".into(), req.grid.count.to_string()),
        (
            "grid_scale".into(),
            match req.grid.scale {
                GridScale::Linear => "linear".into(),
                GridScale::Log => "log".into(),
            },
        ),
        ("g_rad_per_ns".into(), fmt(p.cavity.g)),
        ("kappa_rad_per_ns".into(), fmt(p.cavity.kappa)),
        ("gamma_qd_rad_per_ns".into(), fmt(p.cavity.gamma_qd)),
        ("omega_c_rad_per_ns".into(), fmt(p.cavity.omega_c)),
        ("delta_qd_rad_per_ns".into(), fmt(p.cavity.delta_qd)),
        ("qd_coupled".into(), p.cavity.coupled.to_string()),
        ("gamma_a_rad_per_ns".into(), fmt(p.atom.gamma_a)),
        ("gamma_r_rad_per_ns".into(), fmt(p.atom.gamma_r)),
        ("lambda_m".into(), fmt(p.atom.lambda0)),
        ("delta_a_rad_per_ns".into(), fmt(p.atom.delta_a)),
        ("mass_kg".into(), fmt(p.trap.mass)),
        ("trap_omega_t_rad_per_s".into(), fmt(p.trap.omega_t)),
        ("nbar".into(), fmt(p.trap.nbar)),
        ("delta_i_rad".into(), fmt(p.geometry.delta_i)),
        ("delta_o_rad".into(), fmt(p.geometry.delta_o)),
        ("pulse_omega0_rad_per_ns".into(), fmt(p.pulse.omega0)),
        ("tau_ns".into(), fmt(p.pulse.tau)),
        ("pulse_amplitude".into(), fmt(p.pulse.amplitude)),
        (
            "eta".into(),
            fmt(p.eta().unwrap_or(f64::NAN)),
        ),
        ("f_target".into(), fmt(req.constraints.f_target)),
        ("n_s_target".into(), fmt(req.constraints.n_s_target)),
        ("delta_max_rad".into(), fmt(req.constraints.delta_max)),
        ("detuning_family_rad_per_ns".into(), list(&req.detuning_family)),
        ("nbar_family".into(), list(&req.nbar_family)),
    ]
}

/// Runs the requested figure sweep. Per-point infeasibility is recorded as
/// a flagged row (NaN values, `infeasible` status), not an abort.
pub fn run_sweep(req: &SweepRequest) -> Result<SweepResult> {
    req.validate()?;
    let start = Instant::now();
    let eta = req.params.eta()?;

    let mut status = Vec::new();
    let columns = match req.figure {
        FigureId::Fig3 => {
            let mut tau_col = Column::new("tau_ns");
            let mut det_col = Column::new("delta_a_ghz");
            let mut f_col = Column::new("fidelity");
            for &delta_a in &req.detuning_family {
                for &tau in &req.grid.points() {
                    let mut pulse = req.params.pulse;
                    pulse.tau = tau;
                    let mut atom = req.params.atom;
                    atom.delta_a = delta_a;
                    let scenario = SpectralScenario::new(pulse, req.params.cavity, atom);
                    tau_col.values.push(tau);
                    det_col.values.push(angular_to_ghz(delta_a));
                    match spectral_fidelity(&scenario, &req.params.quad) {
                        Ok(f) => {
                            f_col.values.push(f);
                            status.push(PointStatus::Ok);
                        }
                        Err(_) => {
                            f_col.values.push(f64::NAN);
                            status.push(PointStatus::Infeasible);
                        }
                    }
                }
            }
            vec![tau_col, det_col, f_col]
        }
        FigureId::Fig4 => {
            let mut det_col = Column::new("delta_a_ghz");
            let mut tau_col = Column::new("tau_ns");
            let mut int_col = Column::new("intensity_w_cm2");
            for &delta_a_ghz in &req.grid.points() {
                let delta_a = ghz_to_angular(delta_a_ghz);
                det_col.values.push(delta_a_ghz);
                let solved =
                    pulse_duration_for_fidelity(req.constraints.f_target, delta_a, &req.params)
                        .and_then(|tau| {
                            intensity_for_scatter(
                                req.constraints.n_s_target,
                                delta_a,
                                tau,
                                &req.params.atom,
                            )
                            .map(|i| (tau, i))
                        });
                match solved {
                    Ok((tau, intensity)) => {
                        tau_col.values.push(tau);
                        int_col.values.push(intensity);
                        status.push(PointStatus::Ok);
                    }
                    Err(_) => {
                        tau_col.values.push(f64::NAN);
                        int_col.values.push(f64::NAN);
                        status.push(PointStatus::Infeasible);
                    }
                }
            }
            vec![det_col, tau_col, int_col]
        }
        FigureId::Fig5 => {
            let mut delta_col = Column::new("delta_rad");
            let mut nbar_col = Column::new("nbar");
            let mut f_col = Column::new("fidelity");
            for &nbar in &req.nbar_family {
                for &delta in &req.grid.points() {
                    delta_col.values.push(delta);
                    nbar_col.values.push(nbar);
                    match RecoilScenario::new(eta, nbar, delta, 0.0) {
                        Ok(r) => {
                            f_col.values.push(recoil_fidelity(&r));
                            status.push(PointStatus::Ok);
                        }
                        Err(_) => {
                            f_col.values.push(f64::NAN);
                            status.push(PointStatus::Infeasible);
                        }
                    }
                }
            }
            vec![delta_col, nbar_col, f_col]
        }
        FigureId::Fig6 => {
            let mut delta_col = Column::new("delta_rad");
            let mut nbar_col = Column::new("nbar");
            let mut p_col = Column::new("p_success");
            for &nbar in &req.nbar_family {
                for &delta in &req.grid.points() {
                    delta_col.values.push(delta);
                    nbar_col.values.push(nbar);
                    let point = n_s_for_fidelity(req.constraints.f_target, eta, nbar, delta)
                        .and_then(|n_s| RecoilScenario::new(eta, nbar, delta, n_s));
                    match point {
                        Ok(r) => {
                            p_col.values.push(success_probability(&r));
                            status.push(PointStatus::Ok);
                        }
                        Err(_) => {
                            p_col.values.push(f64::NAN);
                            status.push(PointStatus::Infeasible);
                        }
                    }
                }
            }
            vec![delta_col, nbar_col, p_col]
        }
        FigureId::Fig7 => {
            let mut nbar_col = Column::new("nbar");
            let mut p_col = Column::new("p_star");
            let mut d_col = Column::new("delta_star_rad");
            for &nbar in &req.grid.points() {
                nbar_col.values.push(nbar);
                match optimal_collection_angle(
                    req.constraints.f_target,
                    eta,
                    nbar,
                    req.constraints.delta_max,
                ) {
                    Ok((delta_star, p_star)) => {
                        p_col.values.push(p_star);
                        d_col.values.push(delta_star);
                        status.push(PointStatus::Ok);
                    }
                    Err(_) => {
                        p_col.values.push(f64::NAN);
                        d_col.values.push(f64::NAN);
                        status.push(PointStatus::Infeasible);
                    }
                }
            }
            vec![nbar_col, p_col, d_col]
        }
    };

    let rows = status.len();
    debug_assert!(columns.iter().all(|c| c.values.len() == rows));

    Ok(SweepResult {
        columns,
        status,
        metadata: SweepMetadata {
            figure: req.figure.as_str().to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            quad_rel_tol: req.params.quad.rel_tol,
            quad_abs_tol: req.params.quad.abs_tol,
            root_x_tol: req.params.root_x_tol,
            inputs: echo_inputs(req),
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fidelity::multiphoton_fidelity;

    const FRAC_PI_4: f64 = std::f64::consts::FRAC_PI_4;

    #[test]
    fn grid_points_hit_endpoints_exactly() {
        let g = AxisGrid::log(0.01, 100.0, 60);
        let pts = g.points();
        assert_eq!(pts.len(), 60);
        assert_eq!(pts[0], 0.01);
        assert_eq!(pts[59], 100.0);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));

        let l = AxisGrid::linear(0.0, 50.0, 51);
        let pts = l.points();
        assert_eq!(pts[0], 0.0);
        assert_eq!(pts[50], 50.0);
    }

    #[test]
    fn grid_validation() {
        assert!(AxisGrid::linear(0.0, 1.0, 1).validate().is_err());
        assert!(AxisGrid::linear(1.0, 0.0, 10).validate().is_err());
        assert!(AxisGrid::log(0.0, 1.0, 10).validate().is_err());
        assert!(AxisGrid::log(0.1, 1.0, 10).validate().is_ok());
    }

    #[test]
    fn pulse_duration_round_trips_at_reference_detuning() {
        let params = ModelParams::reference();
        let delta_a = ghz_to_angular(1.0);
        let tau = pulse_duration_for_fidelity(0.9, delta_a, &params).unwrap();
        assert!(tau > 0.1 && tau < 10.0, "tau = {tau}");

        let mut pulse = params.pulse;
        pulse.tau = tau;
        let mut atom = params.atom;
        atom.delta_a = delta_a;
        let f = spectral_fidelity(
            &SpectralScenario::new(pulse, params.cavity, atom),
            &params.quad,
        )
        .unwrap();
        assert!((f - 0.9).abs() < 1e-6, "round trip F = {f}");
    }

    #[test]
    fn unreachable_fidelity_reports_curve_sample() {
        // with very strong coupling and an extreme detuning both branches
        // stay matched down to the 1 ps window edge: F > 0.9 everywhere,
        // so the scan never brackets a crossing
        let mut params = ModelParams::reference();
        params.cavity.g = ghz_to_angular(500.0);
        let err =
            pulse_duration_for_fidelity(0.9, ghz_to_angular(1e5), &params).unwrap_err();
        match err {
            Error::Infeasible(msg) => assert!(msg.contains("curve sample"), "{msg}"),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_matching_point_is_reported() {
        // an uncoupled cavity is fully transmissive on resonance, so the
        // branch amplitudes cannot be matched there
        let mut params = ModelParams::reference();
        params.cavity.coupled = false;
        let err = pulse_duration_for_fidelity(0.9, ghz_to_angular(1.0), &params).unwrap_err();
        match err {
            Error::Infeasible(msg) => assert!(msg.contains("matched"), "{msg}"),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn intensity_reference_value_and_linearity() {
        let atom = ModelParams::reference().atom;
        let i = intensity_for_scatter(0.1, ghz_to_angular(0.1), 10.0, &atom).unwrap();
        assert!((i - 0.28904625901329479).abs() / i < 1e-12);
        let i2 = intensity_for_scatter(0.2, ghz_to_angular(0.1), 10.0, &atom).unwrap();
        assert!((i2 / i - 2.0).abs() < 1e-12);
        // resonance floor: N_s hbar omega0 / ((gamma_r/gamma_a)^2 sigma0 tau)
        let i0 = intensity_for_scatter(0.1, 0.0, 10.0, &atom).unwrap();
        let sigma0 = atomic_cross_section(atom.lambda0).unwrap();
        let omega0 = TWO_PI * SPEED_OF_LIGHT / atom.lambda0;
        let floor = 0.1 * HBAR * omega0 / (sigma0 * 10.0e-9) * 1e-4;
        assert!((i0 - floor).abs() / floor < 1e-12);
        assert!(i0 < i);
    }

    #[test]
    fn optimal_angle_boundary_case() {
        let (delta_star, p_star) = optimal_collection_angle(0.9, 0.09, 10.0, FRAC_PI_4).unwrap();
        assert_eq!(delta_star, FRAC_PI_4);
        assert!((p_star - 0.015702970538972192).abs() < 1e-12);
    }

    #[test]
    fn optimal_angle_interior_case_for_hot_ion() {
        let (delta_star, p_star) = optimal_collection_angle(0.9, 0.09, 1e4, FRAC_PI_4).unwrap();
        assert!(delta_star < FRAC_PI_4);
        assert!((delta_star - 0.030110607849326673).abs() < 1e-6);
        assert!((p_star - 1.854502609281869e-5).abs() < 1e-12);
        // the achieved fidelity is exactly the target at the optimum
        let n_s = n_s_for_fidelity(0.9, 0.09, 1e4, delta_star).unwrap();
        let r = RecoilScenario::new(0.09, 1e4, delta_star, n_s).unwrap();
        assert!((multiphoton_fidelity(&r) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn fig3_sweep_shape_and_range() {
        let mut req = SweepRequest::for_figure(FigureId::Fig3, ModelParams::reference());
        req.grid = AxisGrid::log(0.01, 100.0, 6);
        let result = run_sweep(&req).unwrap();
        assert_eq!(result.rows(), 18);
        assert_eq!(
            result.columns.iter().map(|c| c.name.as_str()).collect::<Vec<_>>(),
            vec!["tau_ns", "delta_a_ghz", "fidelity"]
        );
        for &f in result.column("fidelity").unwrap() {
            assert!((0.245..=1.0 + 1e-9).contains(&f), "fidelity {f}");
        }
        assert!(!result.any_infeasible());
    }

    #[test]
    fn fig5_sweep_monotone_in_nbar() {
        let mut req = SweepRequest::for_figure(FigureId::Fig5, ModelParams::reference());
        req.grid = AxisGrid::linear(0.01, FRAC_PI_4, 12);
        req.nbar_family = vec![0.0, 10.0];
        let result = run_sweep(&req).unwrap();
        let f = result.column("fidelity").unwrap();
        let (cold, warm) = f.split_at(12);
        for (c, w) in cold.iter().zip(warm) {
            assert!(c >= w, "F(nbar=0) {c} < F(nbar=10) {w}");
        }
    }

    #[test]
    fn fig6_sweep_flags_infeasible_tail() {
        let mut req = SweepRequest::for_figure(FigureId::Fig6, ModelParams::reference());
        req.grid = AxisGrid::linear(0.01, FRAC_PI_4, 30);
        req.nbar_family = vec![1000.0];
        let result = run_sweep(&req).unwrap();
        assert!(result.any_infeasible());
        // feasible head, infeasible tail, no interleaving
        let first_bad = result
            .status
            .iter()
            .position(|s| *s == PointStatus::Infeasible)
            .unwrap();
        assert!(result.status[first_bad..]
            .iter()
            .all(|s| *s == PointStatus::Infeasible));
        let p = result.column("p_success").unwrap();
        assert!(p[..first_bad].iter().all(|v| v.is_finite()));
        assert!(p[first_bad..].iter().all(|v| v.is_nan()));
    }

    #[test]
    fn fig7_sweep_nonincreasing() {
        let mut req = SweepRequest::for_figure(FigureId::Fig7, ModelParams::reference());
        req.grid = AxisGrid::linear(0.0, 50.0, 11);
        let result = run_sweep(&req).unwrap();
        let p = result.column("p_star").unwrap();
        for w in p.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "p_star increased: {w:?}");
        }
        assert!(!result.any_infeasible());
    }

    #[test]
    fn sweep_results_are_deterministic() {
        let mut req = SweepRequest::for_figure(FigureId::Fig5, ModelParams::reference());
        req.grid = AxisGrid::linear(0.01, FRAC_PI_4, 8);
        let a = run_sweep(&req).unwrap();
        let b = run_sweep(&req).unwrap();
        for (ca, cb) in a.columns.iter().zip(&b.columns) {
            assert_eq!(ca, cb);
        }
    }
}

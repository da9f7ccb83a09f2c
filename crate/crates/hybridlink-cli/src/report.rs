//! Text reports for the `eval` and `check` commands.

use hybridlink::{
    cooperativity, multiphoton_fidelity, recoil_fidelity, spectral_fidelity, success_probability,
    weak_excitation_check, ModelParams, RecoilScenario, Result, SpectralScenario, ValidityReport,
};

use crate::config::RunConfig;

/// Everything the single-scenario report shows.
#[derive(Debug, Clone, Copy)]
pub struct Evaluation {
    pub cooperativity: f64,
    pub eta: f64,
    pub f_spectral: f64,
    pub f_recoil: f64,
    pub f_multiphoton: f64,
    pub p_success: f64,
    pub n_s: f64,
    pub validity: ValidityReport,
}

/// Modified QD spontaneous-emission lifetime 1/(γ_qd (1 + 𝒞)) in ns; the
/// inverse of this sets the cavity's high-reflection bandwidth.
pub fn modified_qd_lifetime(params: &ModelParams) -> f64 {
    1.0 / (params.cavity.gamma_qd * (1.0 + cooperativity(&params.cavity)))
}

/// Evaluates the full single-scenario report for a resolved config.
pub fn evaluate(cfg: &RunConfig) -> Result<Evaluation> {
    let params = cfg
        .to_model_params()
        .map_err(|e| hybridlink::Error::Domain(e.to_string()))?;
    let eta = params.eta()?;

    let mut scenario = SpectralScenario::new(params.pulse, params.cavity, params.atom);
    scenario.atom_branch = cfg.atom_branch;
    let f_spectral = spectral_fidelity(&scenario, &params.quad)?;

    let recoil = RecoilScenario::new(eta, params.trap.nbar, params.geometry.delta_o, cfg.n_s_target)?;
    let f_recoil = recoil_fidelity(&recoil);
    let f_multiphoton = multiphoton_fidelity(&recoil);
    let p_success = success_probability(&recoil);

    let validity = weak_excitation_check(
        cfg.n_s_target,
        params.pulse.tau,
        params.atom.gamma_a,
        cfg.n_ref,
        params.pulse.tau,
        modified_qd_lifetime(&params),
    )?;

    Ok(Evaluation {
        cooperativity: cooperativity(&params.cavity),
        eta,
        f_spectral,
        f_recoil,
        f_multiphoton,
        p_success,
        n_s: cfg.n_s_target,
        validity,
    })
}

fn line(out: &mut String, key: &str, value: String) {
    out.push_str(&format!("{key:<22} {value}\n"));
}

/// Renders the `eval` report.
pub fn eval_report(cfg: &RunConfig, ev: &Evaluation) -> String {
    let mut out = String::new();
    out.push_str("scenario\n");
    line(&mut out, "  delta_a_ghz", format!("{}", cfg.delta_a_ghz));
    line(&mut out, "  tau_ns", format!("{}", cfg.tau_ns));
    line(&mut out, "  nbar", format!("{}", cfg.nbar));
    line(
        &mut out,
        "  delta_o_rad",
        format!("{:.12e}", cfg.delta_o_rad),
    );
    line(&mut out, "  cooperativity", format!("{:.12e}", ev.cooperativity));
    line(&mut out, "  eta", format!("{:.12e}", ev.eta));
    line(&mut out, "  n_s", format!("{:.12e}", ev.n_s));
    out.push_str("fidelity\n");
    line(&mut out, "  f_spectral", format!("{:.12e}", ev.f_spectral));
    line(&mut out, "  f_recoil", format!("{:.12e}", ev.f_recoil));
    line(
        &mut out,
        "  f_multiphoton",
        format!("{:.12e}", ev.f_multiphoton),
    );
    line(&mut out, "  p_success", format!("{:.12e}", ev.p_success));
    out.push_str(&check_report(&ev.validity));
    out
}

/// Renders the weak-excitation section (also the whole `check` output).
pub fn check_report(v: &ValidityReport) -> String {
    let mut out = String::new();
    out.push_str("weak excitation\n");
    line(
        &mut out,
        "  atom_ratio",
        format!("{:.12e}  {}", v.atom_ratio, v.atom_verdict),
    );
    line(
        &mut out,
        "  qd_ratio",
        format!("{:.12e}  {}", v.qd_ratio, v.qd_verdict),
    );
    out
}

/// The `check` command body: report plus exit verdict.
pub fn check(cfg: &RunConfig) -> Result<(String, bool)> {
    let params = cfg
        .to_model_params()
        .map_err(|e| hybridlink::Error::Domain(e.to_string()))?;
    let validity = weak_excitation_check(
        cfg.n_s_target,
        params.pulse.tau,
        params.atom.gamma_a,
        cfg.n_ref,
        params.pulse.tau,
        modified_qd_lifetime(&params),
    )?;
    Ok((check_report(&validity), validity.any_fail()))
}

/// Human-readable scenario summary used in error diagnostics.
pub fn scenario_summary(cfg: &RunConfig) -> String {
    format!(
        "delta_a = {} GHz, tau = {} ns, nbar = {}, F_target = {}",
        cfg.delta_a_ghz, cfg.tau_ns, cfg.nbar, cfg.f_target
    )
}

//! Flat key-value run configuration.
//!
//! The document format is one `key = value` pair per line, `#` starting a
//! comment. All frequencies are ordinary units with the unit named in the
//! key (`g_ghz`, `gamma_a_mhz`, ...); conversion to the internal angular
//! rad/ns happens here and only here. Every key has a default drawn from
//! the reference parameter set, unknown keys are rejected, and each
//! validation failure names the offending key and line.

use std::collections::BTreeMap;
use std::fmt;

use hybridlink::constants::{ghz_to_angular, mhz_to_angular};
use hybridlink::{
    AtomParams, CavityQDParams, CollectionGeometry, Constraints, ModelParams, PulseSpec,
    QuadratureSpec, TrapState,
};

const FRAC_PI_4: f64 = std::f64::consts::FRAC_PI_4;

/// Configuration error with the key and, when known, the line it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn new(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }

    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "config line {n}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Lamb-Dicke parameter source: a pinned value or the first-principles
/// trap formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaSource {
    Override(f64),
    Derived,
}

/// Fully resolved run configuration in config-file units.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    // cavity-QD node
    pub g_ghz: f64,
    pub kappa_ghz: f64,
    pub gamma_qd_ghz: f64,
    pub delta_qd_ghz: f64,
    pub qd_coupled: bool,
    // atomic node
    pub gamma_a_mhz: f64,
    pub gamma_r_mhz: f64,
    pub lambda_nm: f64,
    pub delta_a_ghz: f64,
    pub atom_branch: bool,
    // trap and collection
    pub atom_mass_u: f64,
    pub trap_omega_t_rad_per_s: f64,
    pub nbar: f64,
    pub delta_i_rad: f64,
    pub delta_o_rad: f64,
    pub eta_override: EtaSource,
    // pulse
    pub tau_ns: f64,
    pub pulse_center_offset_ghz: f64,
    pub pulse_amplitude: f64,
    // sweep constraints
    pub f_target: f64,
    pub n_s_target: f64,
    pub delta_max_rad: f64,
    pub n_ref: f64,
    // numerical tolerances
    pub quad_rel_tol: f64,
    pub quad_abs_tol: f64,
    pub quad_max_subdivisions: usize,
    pub root_x_tol: f64,
    // curve families
    pub fig3_detunings_ghz: Vec<f64>,
    pub fig_nbar_family: Vec<f64>,
}

impl Default for RunConfig {
    /// The reference parameter set: g/2π = 16 GHz, κ/2π = 25 GHz,
    /// γ_qd/2π = 1 GHz, γ_a/2π = 4.2 MHz, λ = 935 nm, η pinned to 0.09.
    fn default() -> Self {
        Self {
            g_ghz: 16.0,
            kappa_ghz: 25.0,
            gamma_qd_ghz: 1.0,
            delta_qd_ghz: 0.0,
            qd_coupled: true,
            gamma_a_mhz: 4.2,
            gamma_r_mhz: 4.2,
            lambda_nm: 935.0,
            delta_a_ghz: 1.0,
            atom_branch: true,
            atom_mass_u: 171.0,
            trap_omega_t_rad_per_s: 1e6,
            nbar: 10.0,
            delta_i_rad: 0.0,
            delta_o_rad: FRAC_PI_4,
            eta_override: EtaSource::Override(0.09),
            tau_ns: 10.0,
            pulse_center_offset_ghz: 0.0,
            pulse_amplitude: 1.0,
            f_target: 0.9,
            n_s_target: 0.1,
            delta_max_rad: FRAC_PI_4,
            n_ref: 0.1,
            quad_rel_tol: 1e-9,
            quad_abs_tol: 1e-14,
            quad_max_subdivisions: 10_000,
            root_x_tol: 1e-8,
            fig3_detunings_ghz: vec![0.1, 1.0, 10.0],
            fig_nbar_family: vec![0.0, 10.0, 100.0, 1000.0],
        }
    }
}

fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64, ConfigError> {
    let v: f64 = value
        .parse()
        .map_err(|_| ConfigError::at(line, format!("{key}: expected a number, got `{value}`")))?;
    if !v.is_finite() {
        return Err(ConfigError::at(
            line,
            format!("{key}: value must be finite, got `{value}`"),
        ));
    }
    Ok(v)
}

fn parse_bool(key: &str, value: &str, line: usize) -> Result<bool, ConfigError> {
    match value {
        "true" | "on" | "yes" => Ok(true),
        "false" | "off" | "no" => Ok(false),
        _ => Err(ConfigError::at(
            line,
            format!("{key}: expected true/false, got `{value}`"),
        )),
    }
}

fn parse_list(key: &str, value: &str, line: usize) -> Result<Vec<f64>, ConfigError> {
    let mut out = Vec::new();
    for part in value.split(',') {
        out.push(parse_f64(key, part.trim(), line)?);
    }
    if out.is_empty() {
        return Err(ConfigError::at(line, format!("{key}: empty list")));
    }
    Ok(out)
}

impl RunConfig {
    /// Parses a key-value document over the defaults. An empty document
    /// yields the full reference configuration.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut seen = BTreeMap::new();

        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::at(
                    line_no,
                    format!("expected `key = value`, got `{line}`"),
                ));
            };
            let key = key.trim();
            let value = value.trim();
            if let Some(first) = seen.insert(key.to_string(), line_no) {
                return Err(ConfigError::at(
                    line_no,
                    format!("{key}: duplicate key (first set on line {first})"),
                ));
            }

            match key {
                "g_ghz" => cfg.g_ghz = parse_f64(key, value, line_no)?,
                "kappa_ghz" => cfg.kappa_ghz = parse_f64(key, value, line_no)?,
                "gamma_qd_ghz" => cfg.gamma_qd_ghz = parse_f64(key, value, line_no)?,
                "delta_qd_ghz" => cfg.delta_qd_ghz = parse_f64(key, value, line_no)?,
                "qd_coupled" => cfg.qd_coupled = parse_bool(key, value, line_no)?,
                "gamma_a_mhz" => cfg.gamma_a_mhz = parse_f64(key, value, line_no)?,
                "gamma_r_mhz" => cfg.gamma_r_mhz = parse_f64(key, value, line_no)?,
                "lambda_nm" => cfg.lambda_nm = parse_f64(key, value, line_no)?,
                "delta_a_ghz" => cfg.delta_a_ghz = parse_f64(key, value, line_no)?,
                "atom_branch" => cfg.atom_branch = parse_bool(key, value, line_no)?,
                "atom_mass_u" => cfg.atom_mass_u = parse_f64(key, value, line_no)?,
                "trap_omega_t_rad_per_s" => {
                    cfg.trap_omega_t_rad_per_s = parse_f64(key, value, line_no)?
                }
                "nbar" => cfg.nbar = parse_f64(key, value, line_no)?,
                "delta_i_rad" => cfg.delta_i_rad = parse_f64(key, value, line_no)?,
                "delta_o_rad" => cfg.delta_o_rad = parse_f64(key, value, line_no)?,
                "eta_override" => {
                    cfg.eta_override = if value == "derived" {
                        EtaSource::Derived
                    } else {
                        EtaSource::Override(parse_f64(key, value, line_no)?)
                    }
                }
                "tau_ns" => cfg.tau_ns = parse_f64(key, value, line_no)?,
                "pulse_center_offset_ghz" => {
                    cfg.pulse_center_offset_ghz = parse_f64(key, value, line_no)?
                }
                "pulse_amplitude" => cfg.pulse_amplitude = parse_f64(key, value, line_no)?,
                "f_target" => cfg.f_target = parse_f64(key, value, line_no)?,
                "n_s_target" => cfg.n_s_target = parse_f64(key, value, line_no)?,
                "delta_max_rad" => cfg.delta_max_rad = parse_f64(key, value, line_no)?,
                "n_ref" => cfg.n_ref = parse_f64(key, value, line_no)?,
                "quad_rel_tol" => cfg.quad_rel_tol = parse_f64(key, value, line_no)?,
                "quad_abs_tol" => cfg.quad_abs_tol = parse_f64(key, value, line_no)?,
                "quad_max_subdivisions" => {
                    cfg.quad_max_subdivisions = value.parse().map_err(|_| {
                        ConfigError::at(
                            line_no,
                            format!("{key}: expected a positive integer, got `{value}`"),
                        )
                    })?
                }
                "root_x_tol" => cfg.root_x_tol = parse_f64(key, value, line_no)?,
                "fig3_detunings_ghz" => {
                    cfg.fig3_detunings_ghz = parse_list(key, value, line_no)?
                }
                "fig_nbar_family" => cfg.fig_nbar_family = parse_list(key, value, line_no)?,
                _ => {
                    return Err(ConfigError::at(line_no, format!("unknown key `{key}`")));
                }
            }
        }

        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::new(msg))
            }
        };
        check(self.g_ghz >= 0.0, &format!("g_ghz = {} violates g >= 0", self.g_ghz))?;
        check(
            self.kappa_ghz > 0.0,
            &format!("kappa_ghz = {} violates kappa > 0", self.kappa_ghz),
        )?;
        check(
            self.gamma_qd_ghz > 0.0,
            &format!("gamma_qd_ghz = {} violates gamma_qd > 0", self.gamma_qd_ghz),
        )?;
        check(
            self.gamma_a_mhz > 0.0,
            &format!("gamma_a_mhz = {} violates gamma_a > 0", self.gamma_a_mhz),
        )?;
        check(
            self.gamma_r_mhz >= 0.0 && self.gamma_r_mhz <= self.gamma_a_mhz,
            &format!(
                "gamma_r_mhz = {} violates 0 <= gamma_r <= gamma_a ({})",
                self.gamma_r_mhz, self.gamma_a_mhz
            ),
        )?;
        check(
            self.lambda_nm > 0.0,
            &format!("lambda_nm = {} violates lambda > 0", self.lambda_nm),
        )?;
        check(
            self.atom_mass_u > 0.0,
            &format!("atom_mass_u = {} violates mass > 0", self.atom_mass_u),
        )?;
        check(
            self.trap_omega_t_rad_per_s > 0.0,
            &format!(
                "trap_omega_t_rad_per_s = {} violates omega_t > 0",
                self.trap_omega_t_rad_per_s
            ),
        )?;
        check(self.nbar >= 0.0, &format!("nbar = {} violates nbar >= 0", self.nbar))?;
        check(
            self.delta_i_rad >= 0.0
                && self.delta_i_rad < self.delta_o_rad
                && self.delta_o_rad <= FRAC_PI_4,
            &format!(
                "collection window ({}, {}) violates 0 <= delta_i < delta_o <= pi/4",
                self.delta_i_rad, self.delta_o_rad
            ),
        )?;
        if let EtaSource::Override(eta) = self.eta_override {
            check(
                eta > 0.0,
                &format!("eta_override = {eta} violates eta > 0"),
            )?;
        }
        check(self.tau_ns > 0.0, &format!("tau_ns = {} violates tau > 0", self.tau_ns))?;
        check(
            self.pulse_amplitude >= 0.0,
            &format!(
                "pulse_amplitude = {} violates amplitude >= 0",
                self.pulse_amplitude
            ),
        )?;
        check(
            self.f_target > 0.25 && self.f_target < 1.0,
            &format!("f_target = {} violates 1/4 < F < 1", self.f_target),
        )?;
        check(
            self.n_s_target > 0.0,
            &format!("n_s_target = {} violates N_s > 0", self.n_s_target),
        )?;
        check(
            self.delta_max_rad > 0.0 && self.delta_max_rad <= FRAC_PI_4,
            &format!(
                "delta_max_rad = {} violates 0 < delta_max <= pi/4",
                self.delta_max_rad
            ),
        )?;
        check(self.n_ref >= 0.0, &format!("n_ref = {} violates n_ref >= 0", self.n_ref))?;
        check(
            self.quad_rel_tol > 0.0,
            &format!("quad_rel_tol = {} violates rel_tol > 0", self.quad_rel_tol),
        )?;
        check(
            self.quad_abs_tol >= 0.0,
            &format!("quad_abs_tol = {} violates abs_tol >= 0", self.quad_abs_tol),
        )?;
        check(
            self.quad_max_subdivisions >= 1,
            &format!(
                "quad_max_subdivisions = {} violates count >= 1",
                self.quad_max_subdivisions
            ),
        )?;
        check(
            self.root_x_tol > 0.0,
            &format!("root_x_tol = {} violates x_tol > 0", self.root_x_tol),
        )?;
        check(
            self.fig3_detunings_ghz.iter().all(|d| *d > 0.0),
            "fig3_detunings_ghz entries must be > 0",
        )?;
        check(
            self.fig_nbar_family.iter().all(|n| *n >= 0.0),
            "fig_nbar_family entries must be >= 0",
        )?;
        Ok(())
    }

    /// Resolved configuration as sorted (key, value) text pairs; the echo
    /// used by manifests and by [`RunConfig::to_text`].
    pub fn entries(&self) -> Vec<(String, String)> {
        let f = |v: f64| format!("{v}");
        let list = |vals: &[f64]| {
            vals.iter()
                .map(|v| format!("{v}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut entries = vec![
            ("atom_branch".to_string(), self.atom_branch.to_string()),
            ("atom_mass_u".to_string(), f(self.atom_mass_u)),
            ("delta_a_ghz".to_string(), f(self.delta_a_ghz)),
            ("delta_i_rad".to_string(), f(self.delta_i_rad)),
            ("delta_max_rad".to_string(), f(self.delta_max_rad)),
            ("delta_o_rad".to_string(), f(self.delta_o_rad)),
            ("delta_qd_ghz".to_string(), f(self.delta_qd_ghz)),
            (
                "eta_override".to_string(),
                match self.eta_override {
                    EtaSource::Override(v) => f(v),
                    EtaSource::Derived => "derived".to_string(),
                },
            ),
            ("f_target".to_string(), f(self.f_target)),
            (
                "fig3_detunings_ghz".to_string(),
                list(&self.fig3_detunings_ghz),
            ),
            ("fig_nbar_family".to_string(), list(&self.fig_nbar_family)),
            ("g_ghz".to_string(), f(self.g_ghz)),
            ("gamma_a_mhz".to_string(), f(self.gamma_a_mhz)),
            ("gamma_qd_ghz".to_string(), f(self.gamma_qd_ghz)),
            ("gamma_r_mhz".to_string(), f(self.gamma_r_mhz)),
            ("kappa_ghz".to_string(), f(self.kappa_ghz)),
            ("lambda_nm".to_string(), f(self.lambda_nm)),
            ("n_ref".to_string(), f(self.n_ref)),
            ("n_s_target".to_string(), f(self.n_s_target)),
            ("nbar".to_string(), f(self.nbar)),
            (
                "pulse_amplitude".to_string(),
                f(self.pulse_amplitude),
            ),
            (
                "pulse_center_offset_ghz".to_string(),
                f(self.pulse_center_offset_ghz),
            ),
            ("qd_coupled".to_string(), self.qd_coupled.to_string()),
            ("quad_abs_tol".to_string(), f(self.quad_abs_tol)),
            (
                "quad_max_subdivisions".to_string(),
                self.quad_max_subdivisions.to_string(),
            ),
            ("quad_rel_tol".to_string(), f(self.quad_rel_tol)),
            ("root_x_tol".to_string(), f(self.root_x_tol)),
            ("tau_ns".to_string(), f(self.tau_ns)),
            (
                "trap_omega_t_rad_per_s".to_string(),
                f(self.trap_omega_t_rad_per_s),
            ),
        ];
        entries.sort();
        entries
    }

    /// Serializes the resolved configuration; `parse(to_text(c)) == c`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            out.push_str(&k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        }
        out
    }

    /// Converts to internal model parameters (angular rad/ns, SI lengths).
    pub fn to_model_params(&self) -> Result<ModelParams, ConfigError> {
        let wrap = |e: hybridlink::Error| ConfigError::new(e.to_string());
        Ok(ModelParams {
            cavity: CavityQDParams::new(
                ghz_to_angular(self.g_ghz),
                ghz_to_angular(self.kappa_ghz),
                ghz_to_angular(self.gamma_qd_ghz),
                0.0,
                ghz_to_angular(self.delta_qd_ghz),
                self.qd_coupled,
            )
            .map_err(wrap)?,
            atom: AtomParams::new(
                mhz_to_angular(self.gamma_a_mhz),
                mhz_to_angular(self.gamma_r_mhz),
                self.lambda_nm * 1e-9,
                ghz_to_angular(self.delta_a_ghz),
            )
            .map_err(wrap)?,
            trap: TrapState::from_amu(self.atom_mass_u, self.trap_omega_t_rad_per_s, self.nbar)
                .map_err(wrap)?,
            geometry: CollectionGeometry::new(self.delta_i_rad, self.delta_o_rad).map_err(wrap)?,
            pulse: PulseSpec::new(
                ghz_to_angular(self.pulse_center_offset_ghz),
                self.tau_ns,
                self.pulse_amplitude,
            )
            .map_err(wrap)?,
            eta_override: match self.eta_override {
                EtaSource::Override(v) => Some(v),
                EtaSource::Derived => None,
            },
            quad: QuadratureSpec {
                rel_tol: self.quad_rel_tol,
                abs_tol: self.quad_abs_tol,
                max_subdivisions: self.quad_max_subdivisions,
                mandatory_breakpoints: Vec::new(),
            },
            root_x_tol: self.root_x_tol,
        })
    }

    pub fn constraints(&self) -> Constraints {
        Constraints {
            f_target: self.f_target,
            n_s_target: self.n_s_target,
            delta_max: self.delta_max_rad,
        }
    }

    pub fn detuning_family(&self) -> Vec<f64> {
        self.fig3_detunings_ghz
            .iter()
            .map(|d| ghz_to_angular(*d))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_reference_config() {
        let cfg = RunConfig::parse("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.g_ghz, 16.0);
        assert_eq!(cfg.eta_override, EtaSource::Override(0.09));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let cfg = RunConfig::parse("# comment\n\n  g_ghz = 8.0  # trailing\n").unwrap();
        assert_eq!(cfg.g_ghz, 8.0);
    }

    #[test]
    fn unknown_key_is_rejected_with_line() {
        let err = RunConfig::parse("g_ghz = 16\nbogus_key = 1\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(err.message.contains("bogus_key"));
    }

    #[test]
    fn invariant_violation_names_key() {
        let err = RunConfig::parse("g_ghz = -1\n").unwrap_err();
        assert!(err.message.contains("g_ghz"));
        assert!(err.message.contains(">= 0"));
    }

    #[test]
    fn duplicate_key_is_rejected() {
        let err = RunConfig::parse("nbar = 1\nnbar = 2\n").unwrap_err();
        assert!(err.message.contains("duplicate"));
    }

    #[test]
    fn non_finite_value_is_rejected() {
        assert!(RunConfig::parse("nbar = NaN\n").is_err());
        assert!(RunConfig::parse("nbar = inf\n").is_err());
    }

    #[test]
    fn eta_override_semantics() {
        let cfg = RunConfig::parse("eta_override = 0.05\n").unwrap();
        assert_eq!(cfg.eta_override, EtaSource::Override(0.05));
        let params = cfg.to_model_params().unwrap();
        assert_eq!(params.eta().unwrap(), 0.05);

        let derived = RunConfig::parse("eta_override = derived\n").unwrap();
        let params = derived.to_model_params().unwrap();
        assert!((params.eta().unwrap() - 0.09157327282462728).abs() < 1e-12);
    }

    #[test]
    fn round_trip_is_identical() {
        let cfg = RunConfig::parse("g_ghz = 12.5\nnbar = 3\nfig_nbar_family = 0,5,50\n").unwrap();
        let text = cfg.to_text();
        let back = RunConfig::parse(&text).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(text, back.to_text());
    }

    #[test]
    fn model_params_conversion_applies_two_pi() {
        let cfg = RunConfig::default();
        let params = cfg.to_model_params().unwrap();
        assert!((params.cavity.g - ghz_to_angular(16.0)).abs() < 1e-12);
        assert!((params.atom.gamma_a - 0.026389378290154263).abs() < 1e-15);
        assert!((params.atom.lambda0 - 935e-9).abs() < 1e-20);
    }

    #[test]
    fn bad_syntax_reports_line() {
        let err = RunConfig::parse("g_ghz 16\n").unwrap_err();
        assert_eq!(err.line, Some(1));
    }
}

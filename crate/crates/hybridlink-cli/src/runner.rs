//! Command orchestration: resolve the config, run the requested figure or
//! report, write tables/plots/manifest, and map failures onto the
//! documented exit codes (0 ok, 2 usage, 3 infeasible, 4 I/O).

use std::path::{Path, PathBuf};
use std::time::Instant;

use hybridlink::{run_sweep, FigureId, GridScale, SweepRequest};

use crate::config::RunConfig;
use crate::manifest::Manifest;
use crate::plot;
use crate::report;
use crate::table;

pub const EXIT_OK: i32 = 0;
/// `check` found a failing weak-excitation verdict.
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Infeasible(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::Io(_) => EXIT_IO,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Infeasible(m) | CliError::Io(m) => m,
        }
    }
}

impl From<hybridlink::Error> for CliError {
    fn from(e: hybridlink::Error) -> Self {
        match e {
            hybridlink::Error::Domain(_) => CliError::Usage(e.to_string()),
            hybridlink::Error::Infeasible(_) => CliError::Infeasible(e.to_string()),
            other => CliError::Infeasible(other.to_string()),
        }
    }
}

impl From<crate::config::ConfigError> for CliError {
    fn from(e: crate::config::ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Common invocation options shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Options {
    pub config_path: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub plot: bool,
    /// Overrides the quadrature relative tolerance from the config.
    pub tol: Option<f64>,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            config_path: None,
            out_dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
            plot: false,
            tol: None,
        }
    }
}

/// Outcome of a command: the exit code plus any report text for stdout.
#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
}

/// Custom grid for the generic `sweep` subcommand.
#[derive(Debug, Clone, Copy)]
pub struct GridOverride {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub count: Option<usize>,
    pub scale: Option<GridScale>,
}

pub fn load_config(opts: &Options) -> Result<RunConfig, CliError> {
    let mut cfg = match &opts.config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Io(format!("cannot read config {}: {e}", path.display()))
            })?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(tol) = opts.tol {
        if !(tol > 0.0) {
            return Err(CliError::Usage(format!(
                "--tol must be > 0, got {tol}"
            )));
        }
        cfg.quad_rel_tol = tol;
    }
    Ok(cfg)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn build_request(figure: FigureId, cfg: &RunConfig) -> Result<SweepRequest, CliError> {
    let params = cfg.to_model_params()?;
    let mut req = SweepRequest::for_figure(figure, params);
    req.constraints = cfg.constraints();
    req.detuning_family = cfg.detuning_family();
    req.nbar_family = cfg.fig_nbar_family.clone();
    Ok(req)
}

/// Runs one figure sweep and writes its table, optional plot, and the run
/// manifest into the output directory.
pub fn run_figure(
    figure: FigureId,
    cfg: &RunConfig,
    opts: &Options,
    grid: Option<GridOverride>,
) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let mut req = build_request(figure, cfg)?;
    if let Some(g) = grid {
        if let Some(min) = g.min {
            req.grid.min = min;
        }
        if let Some(max) = g.max {
            req.grid.max = max;
        }
        if let Some(count) = g.count {
            req.grid.count = count;
        }
        if let Some(scale) = g.scale {
            req.grid.scale = scale;
        }
        req.grid.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    }

    let result = run_sweep(&req)?;

    std::fs::create_dir_all(&opts.out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", opts.out_dir.display())))?;

    let stem = figure.as_str();
    let mut written: Vec<PathBuf> = Vec::new();

    let table_path = match opts.format {
        OutputFormat::Csv => {
            let path = opts.out_dir.join(format!("{stem}.csv"));
            write_file(&path, &table::to_csv(&result))?;
            path
        }
        OutputFormat::Json => {
            let path = opts.out_dir.join(format!("{stem}.json"));
            write_file(&path, &table::to_json(&result))?;
            path
        }
    };
    written.push(table_path);

    if opts.plot {
        let path = opts.out_dir.join(format!("{stem}.svg"));
        write_file(&path, &plot::to_svg(&result, figure))?;
        written.push(path);
    }

    let mut manifest = Manifest::new(stem, cfg, started.elapsed().as_secs_f64() * 1e3);
    for path in &written {
        manifest
            .record_output(path)
            .map_err(|e| CliError::Io(format!("cannot digest {}: {e}", path.display())))?;
    }
    write_file(&opts.out_dir.join("manifest.json"), &manifest.to_json())?;

    let mut stdout = format!(
        "wrote {} ({} rows)\n",
        written
            .iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>()
            .join(", "),
        result.rows()
    );
    if result.any_infeasible() {
        stdout.push_str("note: some grid points are infeasible and flagged in the status column\n");
    }
    Ok(Outcome {
        exit_code: EXIT_OK,
        stdout,
    })
}

/// The `eval` command: single-scenario report on stdout, no files.
pub fn run_eval(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ev = report::evaluate(cfg).map_err(|e| match e {
        hybridlink::Error::Infeasible(m) => CliError::Infeasible(format!(
            "{m} (scenario: {})",
            report::scenario_summary(cfg)
        )),
        other => CliError::from(other),
    })?;
    Ok(Outcome {
        exit_code: EXIT_OK,
        stdout: report::eval_report(cfg, &ev),
    })
}

/// The `check` command: weak-excitation verdicts, nonzero exit on `fail`.
pub fn run_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (text, failed) = report::check(cfg)?;
    Ok(Outcome {
        exit_code: if failed { EXIT_CHECK_FAILED } else { EXIT_OK },
        stdout: text,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp_out(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!(
            "hybridlink-runner-{tag}-{}",
            std::process::id()
        ));
        let _ = std::fs::remove_dir_all(&dir);
        dir
    }

    #[test]
    fn figure_run_writes_table_and_manifest() {
        let out = temp_out("fig5");
        let opts = Options {
            out_dir: out.clone(),
            plot: true,
            ..Options::default()
        };
        let cfg = RunConfig::default();
        let outcome = run_figure(FigureId::Fig5, &cfg, &opts, None).unwrap();
        assert_eq!(outcome.exit_code, EXIT_OK);
        assert!(out.join("fig5.csv").exists());
        assert!(out.join("fig5.svg").exists());
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap())
                .unwrap();
        assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
        std::fs::remove_dir_all(&out).unwrap();
    }

    #[test]
    fn grid_override_is_validated() {
        let out = temp_out("grid");
        let opts = Options {
            out_dir: out.clone(),
            ..Options::default()
        };
        let cfg = RunConfig::default();
        let bad = GridOverride {
            min: Some(1.0),
            max: Some(0.5),
            count: None,
            scale: None,
        };
        let err = run_figure(FigureId::Fig5, &cfg, &opts, Some(bad)).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_USAGE);
        let _ = std::fs::remove_dir_all(&out);
    }

    #[test]
    fn tol_flag_overrides_quadrature_tolerance() {
        let opts = Options {
            tol: Some(1e-6),
            ..Options::default()
        };
        let cfg = load_config(&opts).unwrap();
        assert_eq!(cfg.quad_rel_tol, 1e-6);
        let bad = Options {
            tol: Some(-1.0),
            ..Options::default()
        };
        assert!(matches!(load_config(&bad), Err(CliError::Usage(_))));
    }

    #[test]
    fn missing_config_file_is_io_error() {
        let opts = Options {
            config_path: Some(PathBuf::from("/nonexistent/path/config.txt")),
            ..Options::default()
        };
        let err = load_config(&opts).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_IO);
    }
}

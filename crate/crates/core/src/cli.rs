//! Command-line front end.
//!
//! [`run`] takes the argument list and two writers and returns the exit
//! code, so the whole surface is testable in-process.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{decay_law, moments, tail_fraction, DecayOptions, LineSource, MomentOptions, MomentsReport};
use crate::dynamics::SystemParams;
use crate::envelopes::Envelope;
use crate::error::Error;
use crate::spectra::{
    build_spectrum, crossover, linear_grid, LorentzianLine, MollowLine, Normalization, PulseLine, Spectrum,
};
use crate::units::{PhysicalScenario, RateChoice, REFERENCE_OMEGA0, REFERENCE_P12, REFERENCE_RATE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_DIVERGENT: i32 = 4;

/// Ω/γ of the figure preset.
pub const FIGURE1_RATIO: f64 = 10.0;
pub const FIGURE1_GRID: (f64, f64, usize) = (-100.0, 100.0, 2001);

#[derive(Debug, Parser)]
#[command(name = "lineshape", version, about = "Spontaneous emission line shape after a pi pulse")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Spectral density of one envelope next to the Lorentzian.
    Spectrum(SpectrumArgs),
    /// Lorentzian, rectangular and sine curves at Ω = 10γ.
    Figure1(FigureArgs),
    /// Dispersion, Zeno and jump times of a line.
    Moments(MomentsArgs),
    /// Laboratory numbers for a real atom.
    Scenario(ScenarioArgs),
    /// Survival probability Φ(t) for a line.
    Decay(DecayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SourceKind {
    Envelope,
    Lorentzian,
    Mollow,
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[arg(long, default_value_t = 10.0)]
    omega_ratio: f64,
    /// `rect`, `sine` or a path to a two-column `t omega` table.
    #[arg(long, default_value = "rect")]
    envelope: String,
    /// MIN MAX COUNT in units of γ.
    #[arg(long, num_args = 3, value_names = ["MIN", "MAX", "COUNT"], allow_negative_numbers = true)]
    grid: Option<Vec<String>>,
    /// `exact` or `paper`.
    #[arg(long, default_value = "exact")]
    normalization: String,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct FigureArgs {
    #[arg(long, default_value = "paper")]
    normalization: String,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct LineArgs {
    #[arg(long, value_enum, default_value = "envelope")]
    source: SourceKind,
    #[arg(long, default_value_t = 10.0)]
    omega_ratio: f64,
    #[arg(long, default_value = "rect")]
    envelope: String,
    #[arg(long, default_value = "exact")]
    normalization: String,
    /// Quadrature range |Δ| ≤ DELTA_MAX in units of γ.
    #[arg(long)]
    delta_max: Option<f64>,
}

#[derive(Debug, Args)]
struct MomentsArgs {
    #[command(flatten)]
    line: LineArgs,
    /// Cutoff of the reported tail fraction, units of γ.
    #[arg(long)]
    cutoff: Option<f64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Transition frequency [rad/s].
    #[arg(long, default_value_t = REFERENCE_OMEGA0)]
    omega0: f64,
    /// Momentum matrix element [g·cm/s].
    #[arg(long, default_value_t = REFERENCE_P12)]
    p12: f64,
    #[arg(long, default_value_t = 10.0)]
    omega_ratio: f64,
    /// Γ in 1/s setting the pulse, or `dipole` for the computed rate.
    #[arg(long, default_value_t = REFERENCE_RATE.to_string())]
    rate: String,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DecayArgs {
    #[command(flatten)]
    line: LineArgs,
    /// MIN MAX COUNT in units of Γt.
    #[arg(long, num_args = 3, value_names = ["MIN", "MAX", "COUNT"])]
    times: Option<Vec<String>>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Io(_) => EXIT_INVALID,
            Self::Lib(e) => exit_code(e),
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => f.write_str(m),
            Self::Lib(e) => write!(f, "{e}"),
            Self::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidEnvelope(_) | Error::InvalidParameter(_) | Error::Domain(_) => EXIT_INVALID,
        Error::IntegrationFailure { .. } | Error::QuadratureNonConvergence { .. } => EXIT_NUMERIC,
        Error::DivergentMoment(_) => EXIT_DIVERGENT,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Spectrum(a) => cmd_spectrum(&a),
        Command::Figure1(a) => cmd_figure1(&a),
        Command::Moments(a) => cmd_moments(&a),
        Command::Scenario(a) => cmd_scenario(&a),
        Command::Decay(a) => cmd_decay(&a),
    };
    let emitted = result.and_then(|(text, path)| match path {
        Some(p) => std::fs::write(p, text).map_err(Failure::from),
        None => stdout.write_all(text.as_bytes()).map_err(Failure::from),
    });
    match emitted {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {f}");
            f.code()
        }
    }
}

type Emitted = Result<(String, Option<PathBuf>), Failure>;

fn num(s: &str, what: &str) -> Result<f64, Failure> {
    s.parse::<f64>()
        .map_err(|_| Failure::Usage(format!("{what}: {s:?} is not a number")))
}

fn triple(v: &[String], what: &str) -> Result<(f64, f64, usize), Failure> {
    let count = v[2]
        .parse::<usize>()
        .map_err(|_| Failure::Usage(format!("{what}: count {:?} is not a non-negative integer", v[2])))?;
    Ok((num(&v[0], what)?, num(&v[1], what)?, count))
}

fn normalization(s: &str) -> Result<Normalization, Failure> {
    Ok(s.parse::<Normalization>()?)
}

fn envelope(choice: &str, params: &SystemParams) -> Result<Envelope, Failure> {
    match choice {
        "rect" | "rectangular" => Ok(params.rectangular()),
        "sine" => Ok(params.sine()),
        path => Ok(Envelope::from_file(path)?),
    }
}

fn fmt_value(x: f64) -> String {
    format!("{x:.11e}")
}

fn csv(header: &[&str], columns: &[&[f64]]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    let rows = columns.first().map_or(0, |c| c.len());
    for i in 0..rows {
        for (j, c) in columns.iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            s.push_str(&fmt_value(c[i]));
        }
        s.push('\n');
    }
    s
}

fn json_text<T: Serialize>(v: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::Usage(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn ln_all(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x.ln()).collect()
}

fn cmd_spectrum(a: &SpectrumArgs) -> Emitted {
    let params = SystemParams::from_ratio(a.omega_ratio)?;
    let mode = normalization(&a.normalization)?;
    let (min, max, count) = match &a.grid {
        Some(g) => triple(g, "--grid")?,
        None => FIGURE1_GRID,
    };
    let grid = linear_grid(min, max, count)?;
    let env = envelope(&a.envelope, &params)?;
    let lor = Spectrum::lorentzian(params.gamma(), &grid)?;
    let s = build_spectrum(&env, &params, &grid, mode)?;
    let text = match a.out.format {
        Format::Csv => csv(
            &["delta_over_gamma", "S_lorentz", "S_envelope", "ln_S_lorentz", "ln_S_envelope"],
            &[&grid, &lor.density, &s.density, &ln_all(&lor.density), &ln_all(&s.density)],
        ),
        Format::Json => json_text(&json!({
            "omega_ratio": a.omega_ratio,
            "envelope": env.name(),
            "normalization": s.normalization,
            "delta_over_gamma": grid,
            "S_lorentz": lor.density,
            "S_envelope": s.density,
        }))?,
    };
    Ok((text, a.out.output.clone()))
}

fn cmd_figure1(a: &FigureArgs) -> Emitted {
    let params = SystemParams::from_ratio(FIGURE1_RATIO)?;
    let mode = normalization(&a.normalization)?;
    let (min, max, count) = FIGURE1_GRID;
    let grid = linear_grid(min, max, count)?;
    let lor = Spectrum::lorentzian(params.gamma(), &grid)?;
    let rect = build_spectrum(&params.rectangular(), &params, &grid, mode)?;
    let sine = build_spectrum(&params.sine(), &params, &grid, mode)?;
    let text = match a.out.format {
        Format::Csv => csv(
            &[
                "delta_over_gamma",
                "S_lorentz",
                "S_rect",
                "S_sine",
                "ln_S_lorentz",
                "ln_S_rect",
                "ln_S_sine",
            ],
            &[
                &grid,
                &lor.density,
                &rect.density,
                &sine.density,
                &ln_all(&lor.density),
                &ln_all(&rect.density),
                &ln_all(&sine.density),
            ],
        ),
        Format::Json => json_text(&json!({
            "omega_ratio": FIGURE1_RATIO,
            "normalization": rect.normalization,
            "delta_over_gamma": grid,
            "S_lorentz": lor.density,
            "S_rect": rect.density,
            "S_sine": sine.density,
            "crossover_rect": crossover(&grid, &rect.density, &lor.density, 0.5),
            "crossover_sine": crossover(&grid, &sine.density, &lor.density, 0.5),
        }))?,
    };
    Ok((text, a.out.output.clone()))
}

/// The line selected by `--source`.
fn line_source(a: &LineArgs) -> Result<(Box<dyn LineSource>, SystemParams), Failure> {
    let params = SystemParams::from_ratio(a.omega_ratio)?;
    let src: Box<dyn LineSource> = match a.source {
        SourceKind::Lorentzian => Box::new(LorentzianLine { gamma: params.gamma() }),
        SourceKind::Mollow => Box::new(MollowLine { params }),
        SourceKind::Envelope => {
            let env = envelope(&a.envelope, &params)?;
            Box::new(PulseLine::new(&env, &params, normalization(&a.normalization)?)?)
        }
    };
    Ok((src, params))
}

#[derive(Serialize)]
struct MomentsOutput<'a> {
    source: String,
    omega_ratio: f64,
    envelope: Option<&'a str>,
    #[serde(flatten)]
    report: MomentsReport,
    #[serde(rename = "dispersion_over_OmegaGamma")]
    dispersion_over_omega_gamma: f64,
    zeno_time_times_big_gamma: f64,
    jump_time_times_omega: f64,
}

fn cmd_moments(a: &MomentsArgs) -> Emitted {
    let (src, params) = line_source(&a.line)?;
    let opts = MomentOptions {
        delta_max: a.line.delta_max,
        cutoff: a.cutoff,
        ..MomentOptions::default()
    };
    let report = moments(src.as_ref(), &opts)?;
    let out = MomentsOutput {
        source: src.label(),
        omega_ratio: a.line.omega_ratio,
        envelope: (a.line.source == SourceKind::Envelope).then_some(a.line.envelope.as_str()),
        report,
        dispersion_over_omega_gamma: report.dispersion / (params.omega() * params.big_gamma()),
        zeno_time_times_big_gamma: report.zeno_time * params.big_gamma(),
        jump_time_times_omega: report.jump_time * params.omega(),
    };
    Ok((json_text(&out)?, a.output.clone()))
}

fn cmd_scenario(a: &ScenarioArgs) -> Emitted {
    let rate = match a.rate.as_str() {
        "dipole" => RateChoice::Dipole,
        r => RateChoice::Given(num(r, "--rate")?),
    };
    let s = PhysicalScenario::new(a.omega0, a.p12, a.omega_ratio, rate)?;
    // the Lorentzian weight beyond |Δ| = Ω
    let fraction = tail_fraction(&LorentzianLine { gamma: 1.0 }, a.omega_ratio)?;
    let mut v = serde_json::to_value(s).map_err(|e| Failure::Usage(e.to_string()))?;
    if let Value::Object(m) = &mut v {
        m.insert(
            "rate_source".into(),
            json!(if matches!(rate, RateChoice::Dipole) { "dipole" } else { "given" }),
        );
        m.insert(
            "lorentzian_tail_fraction".into(),
            json!({ "cutoff_over_gamma": a.omega_ratio, "value": fraction }),
        );
    }
    Ok((json_text(&v)?, a.output.clone()))
}

fn cmd_decay(a: &DecayArgs) -> Emitted {
    let (src, params) = line_source(&a.line)?;
    let (min, max, count) = match &a.times {
        Some(t) => triple(t, "--times")?,
        None => (0.0, 5.0, 51),
    };
    if min < 0.0 {
        return Err(Failure::Usage(format!("--times: start {min} is negative")));
    }
    let gamma_t = linear_grid(min, max, count)?;
    let times: Vec<f64> = gamma_t.iter().map(|x| x / params.big_gamma()).collect();
    let opts = DecayOptions {
        delta_max: a.line.delta_max,
    };
    let phi = decay_law(src.as_ref(), &times, &opts)?;
    let text = match a.out.format {
        Format::Csv => csv(&["gamma_t", "phi"], &[&gamma_t, &phi]),
        Format::Json => json_text(&json!({
            "source": src.label(),
            "omega_ratio": a.line.omega_ratio,
            "gamma_t": gamma_t,
            "phi": phi,
        }))?,
    };
    Ok((text, a.out.output.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["lineshape"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn spectrum_centre_row() {
        let (code, out, _) = call(&[
            "spectrum",
            "--omega-ratio",
            "10",
            "--envelope",
            "rect",
            "--grid",
            "-100",
            "100",
            "2001",
            "--normalization",
            "paper",
        ]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "delta_over_gamma,S_lorentz,S_envelope,ln_S_lorentz,ln_S_envelope");
        assert_eq!(lines.len(), 2002);
        let centre: Vec<f64> = lines[1001].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(centre[0], 0.0);
        assert!((centre[2] / (1.44 / std::f64::consts::PI) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn bad_grid_is_invalid_input() {
        let (code, _, err) = call(&["spectrum", "--grid", "-1", "1", "1"]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("grid"));
        let (code, _, _) = call(&["spectrum", "--envelope", "/nonexistent/table.txt"]);
        assert_eq!(code, EXIT_INVALID);
    }

    #[test]
    fn lorentzian_moments_diverge() {
        let (code, _, err) = call(&["moments", "--source", "lorentzian"]);
        assert_eq!(code, EXIT_DIVERGENT);
        assert!(err.contains("divergent second moment"), "{err}");
    }

    #[test]
    fn mollow_zeno_time() {
        let (code, out, _) = call(&["moments", "--source", "mollow"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let z = v["zeno_time_times_big_gamma"].as_f64().unwrap();
        assert!((z / 2.0 - 1.0).abs() < 1e-6, "{z}");
    }

    #[test]
    fn scenario_json() {
        let (code, out, _) = call(&["scenario"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["duration_ns"].as_f64().unwrap() - 48.33).abs() < 0.01);
        let (code, _, _) = call(&["scenario", "--p12", "-1"]);
        assert_eq!(code, EXIT_INVALID);
    }

    #[test]
    fn decay_starts_at_one() {
        let (code, out, _) = call(&["decay", "--source", "lorentzian", "--times", "0", "1", "3"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "gamma_t,phi");
        let last: Vec<f64> = lines[3].split(',').map(|x| x.parse().unwrap()).collect();
        assert!((last[1] / (-1.0f64).exp() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn help_is_success() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("spectrum"));
    }
}

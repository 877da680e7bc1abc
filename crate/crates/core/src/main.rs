use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hfpquad::harness::{self, parse_f64_list, parse_n_list, HarnessError, RawConfig};

#[derive(Parser)]
#[command(
    name = "hfpquad",
    version,
    about = "Supersingular periodic quadrature studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rules against the eigenvalue oracle on eigenfunctions or trigonometric polynomials
    Exactness(Opts),
    /// Error decay in n and fitted exponential rate
    Converge(Opts),
    /// Measured errors against the strip error bounds
    Bounds(Opts),
    /// Closed-form sums and rule composition identities
    Identities(Opts),
}

#[derive(Args)]
struct Opts {
    /// Flat JSON config; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Must agree with the subcommand when given
    #[arg(long)]
    mode: Option<String>,
    /// Comma-separated subset of S0,S1,S2
    #[arg(long)]
    rule: Option<String>,
    /// Values of n: "4,8,16", "4..64" or "4..64:2"
    #[arg(long)]
    n: Option<String>,
    /// EIGEN | TRIGPOLY | RUNGE | SAMPLES
    #[arg(long)]
    function: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<i64>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    realify: Option<bool>,
    #[arg(long)]
    rho: Option<f64>,
    /// CSV with columns x, u_re[, u_im]
    #[arg(long)]
    samples: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(long)]
    period: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    /// Absolute working-line offsets, comma-separated
    #[arg(long)]
    tau: Option<String>,
    /// Working-line offsets as fractions of the strip half-width
    #[arg(long)]
    tau_frac: Option<String>,
    #[arg(long)]
    n_spectral: Option<usize>,
    /// EXACT | SPECTRAL
    #[arg(long)]
    deriv: Option<String>,
    /// Output CSV path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Opts {
    fn into_raw(self, mode: &str) -> Result<RawConfig, HarnessError> {
        if let Some(m) = &self.mode {
            if !m.eq_ignore_ascii_case(mode) {
                return Err(HarnessError::Config(format!(
                    "--mode {m} conflicts with subcommand {mode}"
                )));
            }
        }
        let file = match &self.config {
            Some(path) => RawConfig::from_json_file(path)?,
            None => RawConfig::default(),
        };
        let flags = RawConfig {
            mode: Some(mode.to_string()),
            a: self.a,
            b: self.b,
            period: self.period,
            t: self.t,
            rules: self.rule.map(|r| vec![r]),
            n_list: self.n.as_deref().map(parse_n_list).transpose()?,
            function: self.function,
            m: self.m,
            seed: self.seed,
            degree: self.degree,
            realify: self.realify,
            rho: self.rho,
            samples: self.samples,
            tau_list: self.tau.as_deref().map(parse_f64_list).transpose()?,
            tau_frac: self.tau_frac.as_deref().map(parse_f64_list).transpose()?,
            n_spectral: self.n_spectral,
            deriv: self.deriv,
            out: self.out,
        };
        Ok(file.overlay(flags))
    }
}

fn execute(cli: Cli) -> Result<bool, HarnessError> {
    let (mode, opts) = match cli.command {
        Command::Exactness(o) => ("EXACTNESS", o),
        Command::Converge(o) => ("CONVERGE", o),
        Command::Bounds(o) => ("BOUNDS", o),
        Command::Identities(o) => ("IDENTITIES", o),
    };
    let cfg = opts.into_raw(mode)?.resolve()?;
    let out = harness::run(&cfg)?;
    match &cfg.out_path {
        Some(path) => out.write_csv(path)?,
        None => std::io::stdout()
            .write_all(&out.to_csv()?)
            .map_err(|e| HarnessError::io("<stdout>".as_ref(), e))?,
    }
    for fit in &out.fits {
        eprintln!("{fit}");
    }
    let failed = out
        .rows
        .iter()
        .filter(|r| r.last().map(String::as_str) == Some("FAIL"))
        .count();
    eprintln!(
        "{mode}: {} rows, {} failed, overall {}",
        out.rows.len(),
        failed,
        if out.passed { "PASS" } else { "FAIL" }
    );
    Ok(out.passed)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

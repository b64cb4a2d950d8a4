use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use xyzfact_cli::config::{Format, ModelKind, OutputSpec, Overrides, PairSelection, RangeSpec, RunConfig};
use xyzfact_cli::emit;
use xyzfact_cli::scan::{self, ScanOutput};
use xyzfact_cli::verify::verify;
use xyzfact_cli::CliError;

/// Entanglement of cyclic XYZ chains around the factorizing field.
#[derive(Parser)]
#[command(name = "xyzfact", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factorizing field, separable energy and side limits.
    Point(RunArgs),
    /// Ground-state scan over a field grid.
    Scan(RunArgs),
    /// Finite-temperature scan (needs --temperature).
    Thermal(RunArgs),
    /// Large-n rescaled side limits as functions of δ = n(1 - χ).
    Fig1(Fig1Args),
    /// Check the separable solution and cross-check against the oracle.
    Verify(RunArgs),
    /// Render a scan CSV as SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; flags below override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    vx: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    vy: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    vz: Option<f64>,
    #[arg(long)]
    chi: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// `nn`, `full`, or comma-separated `r_1,...,r_{n-1}`.
    #[arg(long)]
    range: Option<String>,
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long)]
    b_min: Option<f64>,
    #[arg(long)]
    b_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    temperature: Option<f64>,
    /// `all` or comma-separated separations.
    #[arg(long)]
    pairs: Option<String>,
    /// Output file; repeatable. Format follows the extension.
    #[arg(long)]
    out: Vec<PathBuf>,
    /// Format for outputs whose extension does not name one.
    #[arg(long)]
    format: Option<Format>,
}

impl RunArgs {
    fn config(self) -> Result<RunConfig, CliError> {
        let base = self.config.as_deref().map(RunConfig::load).transpose()?;
        let overrides = Overrides {
            n: self.n,
            vx: self.vx,
            vy: self.vy,
            vz: self.vz,
            chi: self.chi,
            delta: self.delta,
            b: self.b,
            range: self.range.as_deref().map(RangeSpec::parse).transpose()?,
            model: self.model,
            b_min: self.b_min,
            b_max: self.b_max,
            steps: self.steps,
            temperature: self.temperature,
            pairs: self.pairs.as_deref().map(PairSelection::parse).transpose()?,
            out: self.out.into_iter().map(|path| OutputSpec { path, format: self.format }).collect(),
        };
        RunConfig::assemble(base, overrides)
    }
}

#[derive(Args)]
struct Fig1Args {
    #[arg(long, default_value_t = 0.1)]
    delta_min: f64,
    #[arg(long, default_value_t = 10.0)]
    delta_max: f64,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// `.csv` or `.svg`; CSV on stdout when absent.
    #[arg(long)]
    out: Vec<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Scan CSV produced by `scan` or `thermal`.
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn emit_scan(cfg: &RunConfig, output: &ScanOutput) -> Result<(), CliError> {
    if cfg.outputs.is_empty() {
        let stdout = std::io::stdout();
        emit::write_csv(&output.records, stdout.lock())?;
        return Ok(());
    }
    for out in &cfg.outputs {
        emit::write_scan(&out.path, out.format()?, &output.records, &output.metadata)?;
        eprintln!("wrote {}", out.path.display());
    }
    Ok(())
}

fn print_summary(output: &ScanOutput) {
    let meta = &output.metadata;
    for t in &meta.transitions {
        eprintln!("transition {} -> {} at b = {}", t.from.symbol(), t.to.symbol(), emit::format_number(t.b));
    }
    if let Some(sl) = &meta.side_limits {
        eprintln!(
            "b_s = {}: C+ = {}, C- = {}, C0 = {}",
            emit::format_number(sl.b_s),
            emit::format_number(sl.closed_form.plus),
            emit::format_number(sl.closed_form.minus),
            emit::format_number(sl.closed_form.zero)
        );
    }
    if let Some(th) = &meta.thermal {
        for v in &th.vanishing {
            match v.b {
                Some(b) => eprintln!("C{}(T) vanishes at b = {}", v.l, emit::format_number(b)),
                None => eprintln!("C{}(T) stays positive over the scan", v.l),
            }
        }
    }
}

fn fig1(args: Fig1Args) -> Result<(), CliError> {
    if !(0.0 < args.delta_min && args.delta_min < args.delta_max) || args.steps < 2 {
        return Err(CliError::Config("need 0 < delta_min < delta_max and steps >= 2".into()));
    }
    let rows = scan::fig1_curves(&scan::linspace(args.delta_min, args.delta_max, args.steps))?;
    let meta = scan::fig1_metadata();
    eprintln!("c+ maximum {} at delta = {}", emit::format_number(meta.c_plus_max), emit::format_number(meta.delta_star));
    if args.out.is_empty() {
        return emit::write_fig1_csv(&rows, std::io::stdout().lock());
    }
    for path in &args.out {
        match Format::from_path(path) {
            Some(Format::Csv) => emit::write_fig1_csv(&rows, std::fs::File::create(path)?)?,
            Some(Format::Svg) => std::fs::write(path, emit::svg_plot(&emit::fig1_series(&rows), "δ", "rescaled limit"))?,
            _ => return Err(CliError::Config(format!("fig1 writes .csv or .svg, got {}", path.display()))),
        }
        emit::write_metadata(path, &meta)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Point(a) => {
            let cfg = a.config()?;
            let report = scan::point_report(&cfg)?;
            let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))? + "\n";
            if cfg.outputs.is_empty() {
                std::io::stdout().lock().write_all(text.as_bytes())?;
            }
            for out in &cfg.outputs {
                std::fs::write(&out.path, &text)?;
            }
            Ok(())
        }
        Command::Scan(a) => {
            let cfg = a.config()?;
            let out = scan::run_scan(&cfg)?;
            print_summary(&out);
            emit_scan(&cfg, &out)
        }
        Command::Thermal(a) => {
            let cfg = a.config()?;
            let out = scan::thermal_scan(&cfg)?;
            eprintln!("method: {}", out.metadata.method);
            print_summary(&out);
            emit_scan(&cfg, &out)
        }
        Command::Fig1(a) => fig1(a),
        Command::Verify(a) => {
            let cfg = a.config()?;
            let report = verify(&cfg)?;
            let mut stdout = std::io::stdout().lock();
            for c in &report.checks {
                writeln!(stdout, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
            }
            if report.passed() {
                Ok(())
            } else {
                let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                Err(CliError::Verification(failed.join("; ")))
            }
        }
        Command::Plot(a) => {
            let records = emit::read_csv(std::fs::File::open(&a.input)?)?;
            std::fs::write(&a.out, emit::svg_plot(&emit::scan_series(&records), "b / v_x", "concurrence"))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

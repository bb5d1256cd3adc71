//! `eisenrest`: numerical experiments on the completed real-analytic
//! Eisenstein series restricted to vertical geodesic segments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use eisenrest_cli::{
    cmd_bq, cmd_check, cmd_compare, cmd_eval, cmd_main_term, cmd_restrict, cmd_signchange,
    cmd_sweep, render, CliError, Config, Format, OutputRecord, Settings, SweepArgs,
};

#[derive(Parser)]
#[command(
    name = "eisenrest",
    version,
    about = "Eisenstein-series restriction experiments on the modular surface"
)]
struct Cli {
    /// JSON configuration file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format: text or json (sweep row files: csv or jsonl).
    #[arg(long, global = true)]
    format: Option<String>,
    /// Evaluation tolerance in [1e-12, 1e-3].
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by the segment-based commands.
#[derive(Args)]
struct SegmentArgs {
    /// Segment bottom (default 1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Segment top (default 3).
    #[arg(long)]
    beta: Option<f64>,
    /// Base quadrature node count (default 512).
    #[arg(long)]
    quad_points: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the completed series at one point x + iy.
    Eval {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long)]
        y: f64,
        /// Spectral parameter T.
        #[arg(long = "T")]
        t: Option<f64>,
    },
    /// Restricted squared mass along the vertical segment.
    Restrict {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long = "T")]
        t: Option<f64>,
        #[command(flatten)]
        segment: SegmentArgs,
    },
    /// Expected main term (smooth part plus arithmetic correction).
    MainTerm {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long = "T")]
        t: Option<f64>,
        /// Denominator cap Q (default T^q_exponent).
        #[arg(long = "Q")]
        q_cap: Option<f64>,
        #[command(flatten)]
        segment: SegmentArgs,
    },
    /// Restricted mass, main term, and their ratio in one row.
    Compare {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long = "T")]
        t: Option<f64>,
        #[arg(long = "Q")]
        q_cap: Option<f64>,
        #[command(flatten)]
        segment: SegmentArgs,
    },
    /// Bracket sign changes of the series along the segment.
    Signchange {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long = "T")]
        t: Option<f64>,
        /// Bracket width target (default 1e-3).
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
        #[command(flatten)]
        segment: SegmentArgs,
    },
    /// Tabulate mass against main term over an (x, T) product grid.
    Sweep {
        /// x grid as lo:hi:step.
        #[arg(long = "x-grid", allow_hyphen_values = true)]
        x_grid: String,
        /// T grid as lo:hi:step.
        #[arg(long = "T-grid")]
        t_grid: String,
        /// Output file for the rows (CSV, or JSON lines with --format jsonl).
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        segment: SegmentArgs,
    },
    /// Arithmetic factor B_q(s, T).
    Bq {
        #[arg(long)]
        q: u64,
        #[arg(long = "T")]
        t: f64,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
    },
    /// Run a named invariant suite; nonzero exit iff any check fails.
    Check {
        /// mellin, parseval, modular, bessel_identity, bq, diagonal, or all.
        #[arg(long)]
        suite: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((record, code, format)) => {
            print!("{}", render(&record, format));
            ExitCode::from(code as u8)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(OutputRecord, i32, Format), CliError> {
    let mut settings = match cli.config {
        Some(ref path) => Settings::from_config(&Config::load(path)?)?,
        None => Settings::default(),
    };
    if let Some(tol) = cli.tol {
        if !tol.is_finite() || !(1e-12..=1e-3).contains(&tol) {
            return Err(CliError::Flag(format!("--tol {tol} outside [1e-12, 1e-3]")));
        }
        settings.tol = tol;
    }
    let explicit_format = match cli.format {
        Some(ref name) => {
            let format = Format::parse(name)?;
            settings.format = format;
            Some(format)
        }
        None => None,
    };
    // Row-file formats only make sense for sweep; reject them when the
    // user asked explicitly, downgrade quietly when they come from the
    // ambient config file.
    let is_sweep = matches!(cli.command, Command::Sweep { .. });
    if !is_sweep && matches!(explicit_format, Some(Format::Csv) | Some(Format::Jsonl)) {
        return Err(CliError::Flag(
            "formats csv and jsonl only apply to sweep".to_string(),
        ));
    }
    let stdout_format = if settings.format == Format::Json {
        Format::Json
    } else {
        Format::Text
    };
    let require_t = |t: Option<f64>| -> Result<f64, CliError> {
        t.or(settings.t_default)
            .ok_or_else(|| CliError::Flag("missing --T (and no T_default configured)".to_string()))
    };
    let (record, code) = match cli.command {
        Command::Eval { x, y, t } => {
            let t = require_t(t)?;
            cmd_eval(x, y, t, &settings)
        }
        Command::Restrict { x, t, segment } => {
            let t = require_t(t)?;
            apply_segment(&mut settings, &segment);
            cmd_restrict(x, t, &settings)?
        }
        Command::MainTerm {
            x,
            t,
            q_cap,
            segment,
        } => {
            let t = require_t(t)?;
            apply_segment(&mut settings, &segment);
            cmd_main_term(x, t, q_cap, &settings)?
        }
        Command::Compare {
            x,
            t,
            q_cap,
            segment,
        } => {
            let t = require_t(t)?;
            apply_segment(&mut settings, &segment);
            cmd_compare(x, t, q_cap, &settings)?
        }
        Command::Signchange {
            x,
            t,
            resolution,
            segment,
        } => {
            let t = require_t(t)?;
            apply_segment(&mut settings, &segment);
            cmd_signchange(x, t, resolution, &settings)?
        }
        Command::Sweep {
            x_grid,
            t_grid,
            out,
            segment,
        } => {
            apply_segment(&mut settings, &segment);
            let args = SweepArgs {
                x_grid,
                t_grid,
                out: out.display().to_string(),
            };
            cmd_sweep(&args, &settings)?
        }
        Command::Bq { q, t, s } => cmd_bq(q, t, s),
        Command::Check { suite } => cmd_check(&suite)?,
    };
    Ok((record, code, stdout_format))
}

fn apply_segment(settings: &mut Settings, segment: &SegmentArgs) {
    if let Some(alpha) = segment.alpha {
        settings.alpha = alpha;
    }
    if let Some(beta) = segment.beta {
        settings.beta = beta;
    }
    if let Some(n) = segment.quad_points {
        settings.quad_points = n;
    }
}

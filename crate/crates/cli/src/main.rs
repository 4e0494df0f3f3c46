use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use extmod::elliptic;
use extmod::harness::{self, csv_string, to_json_string, CsvRecord, RunConfig, ShapeSpec};
use extmod::modulus::{exterior_modulus, interior_modulus, GridOptions, MarkedPolygon, ModulusEstimate, Orientation};
use extmod::{geometry, Complex64, Error};

#[derive(Parser)]
#[command(name = "extmod", version, about = "Conformal and exterior moduli of stretched quadrilaterals")]
struct Cli {
    /// Output format (default: csv for sweep, json otherwise).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Elliptic integrals.
    Elliptic {
        #[command(subcommand)]
        op: EllipticOp,
    },
    /// Interior or exterior modulus of a shape by the grid engine.
    Modulus(ModulusArgs),
    /// Canonical slit parameters and the analytic lower bound at one H.
    Bounds {
        #[arg(long = "H")]
        h: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        sigma: f64,
    },
    /// Runs an H-sweep; exits with 1 if any row breaks an invariant.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Runs every invariant suite; exits with 1 on any failure.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum EllipticOp {
    /// Evaluates K(k), E(k), F(x, k) or E(x, k).
    Eval {
        #[arg(long = "fn", value_enum)]
        func: EllipticFn,
        #[arg(long)]
        k: f64,
        /// Upper limit for the incomplete integrals.
        #[arg(long)]
        x: Option<f64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
enum EllipticFn {
    #[value(name = "K")]
    K,
    #[value(name = "E")]
    E,
    #[value(name = "F")]
    F,
    #[value(name = "Einc")]
    Einc,
}

#[derive(Args)]
struct ModulusArgs {
    /// Shape JSON: {preset | samples, a, b, params}.
    #[arg(long)]
    shape: PathBuf,
    /// Marked points "x,y" in positive order on the quadrilateral
    /// (default: the corners D, A, B, C).
    #[arg(long, num_args = 4, value_name = "X,Y", allow_hyphen_values = true)]
    marks: Option<Vec<String>>,
    #[arg(long, conflicts_with = "exterior", required_unless_present = "exterior")]
    interior: bool,
    #[arg(long)]
    exterior: bool,
    /// Grid spacing at the coarsest level.
    #[arg(long)]
    h: f64,
    /// Stretch factor applied to the shape first.
    #[arg(long = "stretch")]
    stretch: Option<f64>,
    #[arg(long, default_value_t = 3)]
    levels: u32,
    /// Samples per boundary curve.
    #[arg(long, default_value_t = 257)]
    samples: usize,
}

#[derive(Serialize)]
struct EllipticValue {
    #[serde(rename = "fn")]
    func: EllipticFn,
    k: f64,
    x: Option<f64>,
    value: f64,
}

impl CsvRecord for EllipticValue {
    const HEADER: &'static [&'static str] = &["fn", "k", "x", "value"];

    fn fields(&self) -> Vec<String> {
        let name = match self.func {
            EllipticFn::K => "K",
            EllipticFn::E => "E",
            EllipticFn::F => "F",
            EllipticFn::Einc => "Einc",
        };
        vec![name.into(), harness::fmt17(self.k), harness::output::opt17(self.x), harness::fmt17(self.value)]
    }
}

#[derive(Serialize)]
struct ModulusRow(ModulusEstimate);

impl CsvRecord for ModulusRow {
    const HEADER: &'static [&'static str] = &["value", "error", "h", "extrapolated", "order", "levels"];

    fn fields(&self) -> Vec<String> {
        let e = &self.0;
        vec![
            harness::fmt17(e.value),
            harness::fmt17(e.error),
            harness::fmt17(e.h),
            harness::output::opt17(e.extrapolated),
            harness::output::opt17(e.order),
            e.levels.len().to_string(),
        ]
    }
}

enum Failure {
    Input(String),
    Numeric(String),
    Invariant,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() || matches!(e, Error::Domain { .. }) {
            Failure::Input(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

fn emit<R: CsvRecord + Serialize>(rows: &[R], format: Format, single: bool) -> Result<(), Failure> {
    let text = match format {
        Format::Csv => csv_string(rows)?,
        Format::Json if single && rows.len() == 1 => to_json_string(&rows[0])? + "\n",
        Format::Json => to_json_string(&rows)? + "\n",
    };
    print!("{text}");
    Ok(())
}

fn parse_point(s: &str) -> Result<Complex64, Failure> {
    let bad = || Failure::Input(format!("mark '{s}' is not of the form x,y"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    let x: f64 = x.trim().parse().map_err(|_| bad())?;
    let y: f64 = y.trim().parse().map_err(|_| bad())?;
    Ok(Complex64::new(x, y))
}

fn elliptic_value(func: EllipticFn, k: f64, x: Option<f64>) -> Result<f64, Failure> {
    let need_x = || x.ok_or_else(|| Failure::Input("--x is required for the incomplete integrals".into()));
    Ok(match func {
        EllipticFn::K => elliptic::complete_k(k)?,
        EllipticFn::E => elliptic::complete_e(k)?,
        EllipticFn::F => elliptic::incomplete_f(need_x()?, k)?,
        EllipticFn::Einc => elliptic::incomplete_e(need_x()?, k)?,
    })
}

fn modulus(args: &ModulusArgs) -> Result<ModulusEstimate, Failure> {
    let shape = ShapeSpec::load(&args.shape)?.build()?;
    let orientation = if args.exterior { Orientation::Exterior } else { Orientation::Interior };
    let mut p = match args.stretch {
        Some(h) => MarkedPolygon::from_stretched(&geometry::stretch(&shape, h)?, args.samples, orientation)?,
        None => MarkedPolygon::from_shape(&shape, args.samples, orientation)?,
    };
    if let Some(marks) = &args.marks {
        let z: Vec<Complex64> = marks.iter().map(|s| parse_point(s)).collect::<Result<_, _>>()?;
        p = p.with_marks([z[0], z[1], z[2], z[3]])?;
    }
    let opts = GridOptions { levels: args.levels, ..GridOptions::with_h(args.h) };
    Ok(match orientation {
        Orientation::Interior => interior_modulus(&p, &opts)?,
        Orientation::Exterior => exterior_modulus(&p, &opts)?,
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let json = cli.format.unwrap_or(Format::Json);
    match cli.command {
        Command::Elliptic { op: EllipticOp::Eval { func, k, x } } => {
            let value = elliptic_value(func, k, x)?;
            emit(&[EllipticValue { func, k, x, value }], json, true)
        }
        Command::Modulus(args) => emit(&[ModulusRow(modulus(&args)?)], json, true),
        Command::Bounds { h, alpha, beta, sigma } => emit(&[harness::bounds(h, alpha, beta, sigma)?], json, true),
        Command::Sweep { config } => {
            let config = RunConfig::load(&config)?;
            let rows = harness::sweep(&config)?;
            harness::write_outputs(&config, &rows)?;
            emit(&rows, cli.format.unwrap_or(Format::Csv), false)?;
            let ok = rows.iter().all(|r| r.sandwich_ok && r.quasi_ok != Some(false));
            if ok {
                Ok(())
            } else {
                Err(Failure::Invariant)
            }
        }
        Command::Verify { config } => {
            let config = RunConfig::load(&config)?;
            let report = harness::verify_all(&config)?;
            match json {
                Format::Json => println!("{}", to_json_string(&report)?),
                Format::Csv => print!("{}", csv_string(&report.checks)?),
            }
            for c in report.failures() {
                eprintln!("FAIL [{}] {}: {}", c.suite, c.name, c.detail);
            }
            if report.passed {
                Ok(())
            } else {
                Err(Failure::Invariant)
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invariant) => ExitCode::from(1),
        Err(Failure::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use gl3sup::counting::{classify_m, count_gammas, enumerate_gammas};
use gl3sup::expansion::{
    fourier_whittaker_terms, theorem2_envelope, theorem3_envelope, CoefficientTable, EnvelopeParams, Truncation,
};
use gl3sup::gl2special::{gl2_whittaker, k_bessel_with_path, BesselEvalConfig, BesselPath};
use gl3sup::h3geom::{siegel_reduce, H3Point};
use gl3sup::report::{fmt_num, VerificationReport};
use gl3sup::spectral::{laplace_eigenvalue, SpectralTriple};
use gl3sup::suites;
use gl3sup::whittaker3::jw_full;
use gl3sup::{Error, ScaledReal};

#[derive(Parser, Debug)]
#[command(name = "gl3sup", version, about = "Numerical laboratory for GL(3) sup-norm bounds")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for sampling and synthetic coefficients.
    #[arg(long, default_value_t = 1, global = true)]
    seed: u64,
    /// Relative tolerance of the Bessel quadrature.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a special function at one point.
    Eval {
        #[command(subcommand)]
        target: EvalTarget,
    },
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Evaluate the truncated Fourier-Whittaker expansion over a grid.
    Scan(ScanArgs),
    /// Count pre-trace matrices by class.
    Count(CountArgs),
    /// Reduce a point into the Siegel set.
    Reduce {
        /// Point as x1,x2,x3,y1,y2.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
}

#[derive(Subcommand, Debug)]
enum EvalTarget {
    /// K_{it}(x).
    Kbessel {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        x: f64,
    },
    /// Normalized GL(2) Whittaker function sqrt(x) K_{it}(2 pi x) / |Gamma(1/2 + it)|.
    Gl2w {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        x: f64,
    },
    /// GL(3) Whittaker function with its unipotent phase.
    Jw3 {
        #[arg(long)]
        t1: f64,
        #[arg(long)]
        t2: f64,
        #[arg(long)]
        y1: f64,
        #[arg(long)]
        y2: f64,
        #[arg(long, default_value_t = 0.0)]
        x1: f64,
        #[arg(long, default_value_t = 0.0)]
        x2: f64,
        #[arg(long, default_value_t = 0.0)]
        x3: f64,
        /// Sign of m2 (+1 or -1).
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        sign: i32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Suite {
    Lemma41,
    Lemma42,
    Cartan,
    Eighth,
    EntryBounds,
    M1Count,
    Pretrace,
    #[value(name = "envelope-3940")]
    Envelope3940,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Samples for the Cartan suite.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Radius: the sampling ball (cartan), the enumeration radius
    /// (entry-bounds, pretrace) or the M4 radius (m1-count).
    #[arg(long)]
    radius: Option<f64>,
    /// Pass/fail ceiling on the fitted constant.
    #[arg(long)]
    ceiling: Option<f64>,
    /// Exponent epsilon of the envelopes.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Source {
    Delta,
    Synthetic,
    File,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Coefficient source.
    #[arg(long, value_enum, default_value_t = Source::Delta)]
    source: Source,
    /// Coefficient CSV (with --source file).
    #[arg(long)]
    coeffs: Option<PathBuf>,
    /// Largest prime of the synthetic model.
    #[arg(long, default_value_t = 50)]
    primes: u64,
    #[arg(long)]
    t1: f64,
    #[arg(long)]
    t2: f64,
    /// Unipotent coordinates x1,x2,x3.
    #[arg(long, default_value = "0,0,0", allow_hyphen_values = true)]
    x: String,
    /// Comma-separated y1 values.
    #[arg(long)]
    y1: String,
    /// Comma-separated y2 values.
    #[arg(long)]
    y2: String,
    /// Coefficient support m1^2 m2 <= M.
    #[arg(long)]
    m_cutoff: Option<u64>,
    /// Pair radius |c z2 + d| <= R.
    #[arg(long)]
    r_cd: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    /// Implied constant of the envelope columns.
    #[arg(long, default_value_t = 1.0)]
    env_c: f64,
}

#[derive(Args, Debug)]
struct CountArgs {
    /// Point as x1,x2,x3,y1,y2.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    #[arg(long)]
    radius: f64,
    /// Print the matrices instead of the class totals.
    #[arg(long)]
    list: bool,
}

enum Failure {
    Verification,
    Input(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Rows of named cells, written as CSV with a header or as a JSON array.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    fn write(&self, fmt: Format, out: &mut dyn Write) -> io::Result<()> {
        match fmt {
            Format::Csv => {
                writeln!(out, "{}", self.columns.join(","))?;
                for r in &self.rows {
                    let cells: Vec<String> = r.iter().map(csv_cell).collect();
                    writeln!(out, "{}", cells.join(","))?;
                }
            }
            Format::Json => {
                let arr: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let m: Map<String, Value> =
                            self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect();
                        Value::Object(m)
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut *out, &arr)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Number(n) => n.as_f64().map(fmt_num).unwrap_or_else(|| n.to_string()),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(fmt_num(x)))
}

fn open_out(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn bessel_config(g: &Global) -> Result<BesselEvalConfig, Failure> {
    let mut cfg = BesselEvalConfig::default();
    if let Some(t) = g.tol {
        cfg.rel_tol = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| Failure::Input(format!("bad {what} value {p:?}"))))
        .collect()
}

fn require(cond: bool, msg: impl Into<String>) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(Failure::Input(msg.into()))
    }
}

fn scaled_value(s: ScaledReal) -> Value {
    let v = s.to_f64();
    if v != 0.0 && v.is_finite() {
        num(v)
    } else {
        Value::String(s.to_string())
    }
}

fn cmd_eval(g: &Global, target: &EvalTarget) -> Outcome {
    let cfg = bessel_config(g)?;
    let table = match *target {
        EvalTarget::Kbessel { t, x } => {
            let (scaled, path) = k_bessel_with_path(t, x, &cfg)?;
            let k = scaled * ScaledReal::exp(-std::f64::consts::FRAC_PI_2 * t.abs());
            let path = match path {
                BesselPath::Series => "series",
                BesselPath::Double => "double",
                BesselPath::Multiprecision => "multiprecision",
            };
            let mut tb = Table::new(&["t", "x", "value", "ln_abs", "path"]);
            tb.rows.push(vec![num(t), num(x), scaled_value(k), num(k.ln_abs()), json!(path)]);
            tb
        }
        EvalTarget::Gl2w { t, x } => {
            require(t >= 0.0, "t must be nonnegative")?;
            let mut tb = Table::new(&["t", "x", "value"]);
            tb.rows.push(vec![num(t), num(x), num(gl2_whittaker(t, x, &cfg)?)]);
            tb
        }
        EvalTarget::Jw3 { t1, t2, y1, y2, x1, x2, x3, sign } => {
            require(sign == 1 || sign == -1, "sign must be +1 or -1")?;
            let nu = SpectralTriple::new(t1, t2)?;
            let z = H3Point::new(x1, x2, x3, y1, y2)?;
            let w = jw_full(&nu, &z, sign, &cfg)?;
            let mut tb = Table::new(&["t1", "t2", "x1", "x2", "x3", "y1", "y2", "sign", "re", "im", "abs"]);
            tb.rows.push(vec![
                num(t1),
                num(t2),
                num(x1),
                num(x2),
                num(x3),
                num(y1),
                num(y2),
                json!(sign),
                num(w.re),
                num(w.im),
                num(w.norm()),
            ]);
            tb
        }
    };
    let mut out = open_out(&g.out)?;
    table.write(g.format, &mut out)?;
    out.flush()?;
    Ok(())
}

fn run_suite(g: &Global, a: &VerifyArgs) -> Result<VerificationReport, Failure> {
    let cfg = bessel_config(g)?;
    let report = match a.suite {
        Suite::Eighth => suites::verify_eighth(&suites::EIGHTH_ORDERS, a.ceiling.unwrap_or(1e-5), &cfg)?,
        Suite::Lemma41 => suites::verify_lemma41(&suites::LEMMA41_ORDERS, 3.0, a.ceiling.unwrap_or(50.0), 3.0, &cfg)?,
        Suite::Lemma42 => suites::verify_lemma42_grid(
            &suites::LEMMA42_T0,
            &suites::LEMMA42_HEIGHTS,
            3.0,
            a.ceiling.unwrap_or(100.0),
            3.0,
            &cfg,
        )?,
        Suite::Cartan => suites_cartan(a, g.seed)?,
        Suite::EntryBounds => {
            let r = a.radius.unwrap_or(1.0);
            require(r > 0.0 && r <= 3.0, "radius must lie in (0, 3]")?;
            suites::verify_entry_bounds(&suites::entry_grid(), r, a.ceiling.unwrap_or(10.0), r <= 1.5)?
        }
        Suite::M1Count => suites::verify_m1_count(
            &suites::counting_grid(),
            &suites::SHELL_RADII,
            a.ceiling.unwrap_or(64.0),
            &suites::high_grid(),
            a.radius.unwrap_or(1.0),
        )?,
        Suite::Pretrace => suites::verify_pretrace(
            &suites::counting_grid(),
            &suites::PRETRACE_LAMBDAS,
            a.radius.unwrap_or(1.0),
            a.ceiling.unwrap_or(3.0),
        )?,
        Suite::Envelope3940 => {
            let p = EnvelopeParams::new(a.epsilon, 1.0, 3.0)?;
            suites::verify_envelope_3940(&suites::envelope_lambdas(), &p, 0.975, 0.35, a.ceiling.unwrap_or(0.01))?
        }
    };
    Ok(report)
}

fn suites_cartan(a: &VerifyArgs, seed: u64) -> Result<VerificationReport, Failure> {
    Ok(gl3sup::cartan::verify_cartan_lemma(a.samples, a.radius.unwrap_or(1.0), seed)?)
}

fn cmd_verify(g: &Global, a: &VerifyArgs) -> Outcome {
    let report = run_suite(g, a)?;
    let mut out = open_out(&g.out)?;
    match g.format {
        Format::Csv => report.write_csv(&mut out)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report).map_err(io::Error::from)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    eprintln!("{}", report.verdict_line());
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn load_coefficients(g: &Global, a: &ScanArgs, cutoff: u64) -> Result<CoefficientTable, Failure> {
    Ok(match a.source {
        Source::Delta => CoefficientTable::delta(),
        Source::Synthetic => CoefficientTable::synthetic(g.seed, a.primes, cutoff)?,
        Source::File => {
            let path = a.coeffs.as_ref().ok_or_else(|| Failure::Input("--source file needs --coeffs".into()))?;
            CoefficientTable::load(path)?
        }
    })
}

fn cmd_scan(g: &Global, a: &ScanArgs) -> Outcome {
    let cfg = bessel_config(g)?;
    let nu = SpectralTriple::new(a.t1, a.t2)?;
    let xs = parse_list(&a.x, "x")?;
    require(xs.len() == 3, "--x needs three values x1,x2,x3")?;
    let y1s = parse_list(&a.y1, "y1")?;
    let y2s = parse_list(&a.y2, "y2")?;
    let params = EnvelopeParams::new(a.epsilon, a.env_c, 3.0)?;
    let lambda = laplace_eigenvalue(&nu);
    let mut points = Vec::new();
    for &y1 in &y1s {
        for &y2 in &y2s {
            let z = H3Point::new(xs[0], xs[1], xs[2], y1, y2)?;
            let mut trunc = Truncation::default_for(&z, &nu);
            if let Some(m) = a.m_cutoff {
                trunc.m_cutoff = m;
            }
            if let Some(r) = a.r_cd {
                require(r > 0.0, "--r-cd must be positive")?;
                trunc.r_cd = r;
            }
            points.push((z, trunc));
        }
    }
    let cutoff = points.iter().map(|p| p.1.m_cutoff).max().unwrap_or(1);
    let coeffs = load_coefficients(g, a, cutoff)?;
    let mut table = Table::new(&["x1", "x2", "x3", "y1", "y2", "re", "im", "abs", "envelope2", "envelope3"]);
    for (z, trunc) in &points {
        let s = fourier_whittaker_terms(z, &nu, &coeffs, trunc, &cfg)?;
        table.rows.push(vec![
            num(z.x1),
            num(z.x2),
            num(z.x3),
            num(z.y1),
            num(z.y2),
            num(s.value.re),
            num(s.value.im),
            num(s.value.norm()),
            num(theorem2_envelope(lambda, z.y1, z.y2, &params)),
            num(theorem3_envelope(lambda, z.y1, z.y2, &params)),
        ]);
    }
    let mut out = open_out(&g.out)?;
    table.write(g.format, &mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_count(g: &Global, a: &CountArgs) -> Outcome {
    let z = H3Point::parse(&a.point)?;
    let mut out = open_out(&g.out)?;
    if a.list {
        let list = enumerate_gammas(&z, a.radius)?;
        match g.format {
            Format::Csv => {
                for m in &list {
                    writeln!(out, "{m}")?;
                }
            }
            Format::Json => {
                let arr: Vec<Value> = list
                    .iter()
                    .map(|m| json!({"entries": m.entries(), "class": format!("{:?}", classify_m(m))}))
                    .collect();
                serde_json::to_writer_pretty(&mut out, &arr).map_err(io::Error::from)?;
                writeln!(out)?;
            }
        }
    } else {
        let c = count_gammas(&z, a.radius)?.counts;
        match g.format {
            Format::Csv => writeln!(out, "M1:{} M2:{} M3:{} M4:{}", c[0], c[1], c[2], c[3])?,
            Format::Json => writeln!(out, "{}", json!({"M1": c[0], "M2": c[1], "M3": c[2], "M4": c[3]}))?,
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_reduce(g: &Global, point: &str) -> Outcome {
    let z = H3Point::<f64>::parse(point)?;
    let (p, gamma) = siegel_reduce(&z)?;
    let mut tb = Table::new(&["x1", "x2", "x3", "y1", "y2", "gamma"]);
    tb.rows.push(vec![num(p.x1), num(p.x2), num(p.x3), num(p.y1), num(p.y2), json!(gamma.to_string())]);
    let mut out = open_out(&g.out)?;
    tb.write(g.format, &mut out)?;
    out.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    if let Some(n) = cli.global.threads {
        require(n >= 1, "--threads must be at least 1")?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Input(e.to_string()))?;
    }
    match &cli.command {
        Command::Eval { target } => cmd_eval(&cli.global, target),
        Command::Verify(a) => cmd_verify(&cli.global, a),
        Command::Scan(a) => cmd_scan(&cli.global, a),
        Command::Count(a) => cmd_count(&cli.global, a),
        Command::Reduce { point } => cmd_reduce(&cli.global, point),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}

//! `kleinian` command-line tool.

use clap::{Args, Parser, Subcommand, ValueEnum};
use kleinian::diagnostics::verify;
use kleinian::mockform::{fourier_extract, CoefficientTable, MockFormSession, SessionConfig, Target, DEFAULT_Y0};
use kleinian::newforms::{fetch_orbit, load_orbit, NewformOrbit};
use kleinian::numerics::float_to_string;
use kleinian::par::Execution;
use kleinian::periods::{compute_period_data, BasisMode, HomologyFixture};
use kleinian::theta::Characteristic;
use kleinian::Error;
use serde_json::json;
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "kleinian", version, about = "Kleinian mock modular forms for weight-2 newform orbits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Period lattice, symplectic basis, Omega and P.
    Periods(Common),
    /// Fourier coefficients of the mock modular form.
    Coeffs {
        #[command(flatten)]
        common: Common,
        /// Largest exponent n to extract.
        #[arg(long, default_value_t = 20)]
        nmax: usize,
        /// `scalar`, `component K` (1-based) or `al Q`.
        #[arg(long, num_args = 1..=2, default_values_t = vec!["scalar".to_string()])]
        target: Vec<String>,
        /// Height of the sampling horocycle.
        #[arg(long, default_value_t = DEFAULT_Y0)]
        y0: f64,
        /// Theta characteristic as "a1,..;b1,..".
        #[arg(long = "char")]
        characteristic: Option<String>,
    },
    /// Invariance, quasi-periodicity, xi_0 and Laplacian checks.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long = "char")]
        characteristic: Option<String>,
        /// Seed for the random sample points.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct Common {
    /// Bundled label (27.2.a.a, 23.2.a.a, 256.2.a.e), orbit JSON path, or an LMFDB label with --fetch.
    label: String,
    #[arg(long, default_value_t = 40)]
    digits: u32,
    #[arg(long, value_enum)]
    basis: Option<Basis>,
    /// Download the orbit from the LMFDB.
    #[arg(long)]
    fetch: bool,
    /// Number of coefficients to request with --fetch.
    #[arg(long, default_value_t = 4000)]
    fetch_terms: usize,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the output to a file instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Run without the thread pool.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Basis {
    Auto,
    Fixture,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

/// Exit status with the message to print on stderr.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, e: &Error) -> Self {
        Failure { code, message: format!("{}: {e}", e.kind()) }
    }
}

impl Common {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn orbit(&self) -> Result<NewformOrbit, Error> {
        if self.fetch {
            fetch_orbit(&self.label, self.fetch_terms)
        } else {
            load_orbit(&self.label)
        }
    }

    /// Fixture basis when a homology fixture exists, auto otherwise.
    fn basis_mode(&self, orbit: &NewformOrbit) -> BasisMode {
        match self.basis {
            Some(Basis::Auto) => BasisMode::Auto,
            Some(Basis::Fixture) => BasisMode::Fixture,
            None if HomologyFixture::bundled(&orbit.label).is_some() => BasisMode::Fixture,
            None => BasisMode::Auto,
        }
    }

    fn session(&self, orbit: &NewformOrbit, ch: Option<&str>) -> Result<MockFormSession, Error> {
        let mut cfg = SessionConfig::new(self.digits);
        cfg.basis = self.basis_mode(orbit);
        cfg.execution = self.execution();
        cfg.characteristic = ch.map(Characteristic::parse).transpose()?;
        MockFormSession::build(orbit, &cfg)
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        let io = |e: std::io::Error| Failure::new(2, &Error::Io(e));
        match &self.out {
            Some(p) => std::fs::write(p, text).map_err(io),
            None => std::io::stdout().write_all(text.as_bytes()).map_err(io),
        }
    }
}

fn matrix_text(name: &str, m: &kleinian::numerics::CMatrix, digits: usize) -> String {
    let mut s = format!("{name} =\n");
    for i in 0..m.rows() {
        let row: Vec<String> = m
            .row(i)
            .iter()
            .map(|z| format!("{} {}i", float_to_string(&z.re, digits), float_to_string(&z.im, digits)))
            .collect();
        s.push_str(&format!("  [{}]\n", row.join(", ")));
    }
    s
}

fn cmd_periods(c: &Common) -> Result<(), Failure> {
    let err2 = |e: Error| Failure::new(2, &e);
    let orbit = c.orbit().map_err(err2)?;
    let ctx = kleinian::numerics::PrecisionContext::new(c.digits).map_err(err2)?;
    let embedded = orbit.embed(&ctx).map_err(err2)?;
    let mode = c.basis_mode(&orbit);
    let fixture = HomologyFixture::bundled(&orbit.label);
    if mode == BasisMode::Fixture && fixture.is_none() {
        return Err(err2(Error::InvalidArgument(format!("no homology fixture for {}", orbit.label))));
    }
    let pd = compute_period_data(&embedded, mode, fixture.as_ref(), &ctx, c.execution()).map_err(err2)?;
    let shown = (c.digits as usize).min(30);
    let text = match c.format {
        Format::Json => serde_json::to_string_pretty(&pd.to_json_value(&orbit.label, c.digits as usize)).expect("json") + "\n",
        Format::Table => {
            let mut s = format!(
                "{}  genus {}  basis {}  elementary divisors {:?}\n",
                orbit.label, pd.genus, pd.basis_mode, pd.elementary_divisors
            );
            s += &matrix_text("omega", &pd.omega, shown);
            s += &matrix_text("omega'", &pd.omega_prime, shown);
            s += &matrix_text("Omega", &pd.big_omega, shown);
            s += &matrix_text("P", &pd.p_matrix, shown);
            s
        }
    };
    c.emit(&text)
}

fn parse_target(t: &[String], genus: usize) -> Result<(Target, bool), Error> {
    let bad = || Error::InvalidArgument(format!("unknown target {:?}", t.join(" ")));
    let arg = |i: usize| -> Result<u64, Error> { t.get(i).and_then(|s| s.parse().ok()).ok_or_else(bad) };
    match t.first().map(String::as_str) {
        Some("scalar") if t.len() == 1 => Ok((Target::Scalar, false)),
        Some("component") => {
            let k = arg(1)? as usize;
            if k == 0 || k > genus {
                return Err(Error::InvalidArgument(format!("component {k} outside 1..={genus}")));
            }
            Ok((Target::Normalized(k - 1), false))
        }
        Some("al") => Ok((Target::AlSum { q: arg(1)?, component: 0 }, true)),
        _ => Err(bad()),
    }
}

fn extraction_failure(e: Error) -> Failure {
    let hint = match e {
        Error::PoleOnHorocycle(_) => "; retry with a larger --y0",
        Error::InconsistentExtraction(_) => "; retry with a larger --y0 or more --digits",
        _ => "",
    };
    let code = if hint.is_empty() { 2 } else { 3 };
    let mut f = Failure::new(code, &e);
    f.message.push_str(hint);
    f
}

fn cmd_coeffs(c: &Common, nmax: usize, target: &[String], y0: f64, ch: Option<&str>) -> Result<(), Failure> {
    let err2 = |e: Error| Failure::new(2, &e);
    let orbit = c.orbit().map_err(err2)?;
    let s = c.session(&orbit, ch).map_err(err2)?;
    let (t, al) = parse_target(target, s.genus()).map_err(err2)?;
    let tables: Vec<CoefficientTable> = if let Target::AlSum { q, .. } = t {
        (0..s.genus())
            .map(|k| fourier_extract(&s, Target::AlSum { q, component: k }, nmax, y0))
            .collect::<Result<_, _>>()
            .map_err(extraction_failure)?
    } else {
        vec![fourier_extract(&s, t, nmax, y0).map_err(extraction_failure)?]
    };
    let shown = (c.digits as usize).min(20);
    let text = match (c.format, al) {
        (Format::Json, false) => tables[0].to_json() + "\n",
        (Format::Json, true) => {
            let v: Vec<serde_json::Value> = tables
                .iter()
                .map(|tb| json!({"table": tb.to_json_value(), "scale": scale(tb), "ratios": ratios(tb)}))
                .collect();
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        (Format::Table, false) => tables[0].to_text(shown),
        (Format::Table, true) => {
            let mut out = String::new();
            for tb in &tables {
                out += &tb.to_text(shown);
                let r: Vec<String> = ratios(tb).iter().map(|x| format!("{x:.6}")).collect();
                out += &format!("# scale {:.7}  ratios c_n/c_-1: {}\n", scale(tb), r.join(", "));
            }
            out
        }
    };
    c.emit(&text)
}

fn scale(tb: &CoefficientTable) -> f64 {
    tb.value(-1).map(|z| z.re.to_f64()).unwrap_or(f64::NAN)
}

/// c_n / c_{-1} for n >= 0.
fn ratios(tb: &CoefficientTable) -> Vec<f64> {
    let lead = scale(tb);
    tb.entries.iter().filter(|e| e.n >= 0).map(|e| e.value.re.to_f64() / lead).collect()
}

fn cmd_verify(c: &Common, ch: Option<&str>, seed: u64) -> Result<(), Failure> {
    let err4 = |e: Error| Failure::new(4, &e);
    let orbit = c.orbit().map_err(err4)?;
    let s = c.session(&orbit, ch).map_err(err4)?;
    let report = verify(&s, seed, c.execution()).map_err(err4)?;
    let text = match c.format {
        Format::Json => serde_json::to_string_pretty(&report.to_json_value()).expect("json") + "\n",
        Format::Table => report.to_text(),
    };
    c.emit(&text)?;
    match report.first_failure() {
        Some(f) => Err(Failure {
            code: 4,
            message: format!("check failed: {} (residual {:.3e}, tolerance {:.0e})", f.name, f.residual, f.tolerance),
        }),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Periods(c) => cmd_periods(c),
        Command::Coeffs { common, nmax, target, y0, characteristic } => {
            cmd_coeffs(common, *nmax, target, *y0, characteristic.as_deref())
        }
        Command::Verify { common, characteristic, seed } => cmd_verify(common, characteristic.as_deref(), *seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

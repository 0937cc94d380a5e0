use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::json;

use skforms::arith::cohen_h;
use skforms::arthur::{selberg_sums, sign_changes, SpecJson};
use skforms::bessel::bessel_table;
use skforms::cache::{qseries_to_string, read_siegel, write_siegel};
use skforms::cli::{dk_rows, exit_status, run_all, run_suite, suite_names, Config, Context, VerificationReport};
use skforms::heckeop::{apply_tp, eigenvalue, nonlift20, radial_check};
use skforms::jacobi::cusp_form_10_12;
use skforms::maass::{siegel_eisenstein2, sk_lift, SiegelExpansion};
use skforms::qseries::{eisenstein, newform_onedim, ONE_DIMENSIONAL_WEIGHTS};
use skforms::quad::{class_representatives, decompose, HalfIntMatrix};
use skforms::{Error, Result};

macro_rules! outln {
    ($($arg:tt)*) => { writeln!(std::io::stdout(), $($arg)*)? };
}

macro_rules! out {
    ($($arg:tt)*) => { write!(std::io::stdout(), $($arg)*)? };
}

/// Exact computations with degree-two Siegel modular forms: Saito–Kurokawa
/// lifts, Hecke operators, Bessel ratios and verification suites.
///
/// Exit status: 0 success, 2 verification failure, 3 precision exhausted,
/// 4 bad input.
#[derive(Parser, Debug)]
#[command(name = "skforms", version)]
struct Cli {
    /// JSON run configuration (see `run-all --help` for the fields).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for cached expansions.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV.
    #[arg(long, global = true)]
    csv: bool,
    /// Accepted for compatibility; nothing here draws random numbers.
    #[arg(long, global = true)]
    seedless: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coefficients of the level one newform (or Eisenstein series) of a weight.
    Elliptic {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        precision: usize,
        /// Dump the normalized Eisenstein series instead of the newform.
        #[arg(long)]
        eisenstein: bool,
        /// Write a qseries-v1 cache file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Table of Cohen numbers H(r, N) as `N,num,den`.
    Cohen {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        n_max: u64,
    },
    /// Coefficients C(D) of the index-one Jacobi cusp form of weight 10 or 12.
    Jacobi {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        max_d: u64,
    },
    /// Build the lift (k = 10, 12) or Siegel Eisenstein series (k = 4, 6).
    Lift {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        detmax4: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Look up a(T) in a cached expansion.
    Coeff {
        #[arg(long = "in")]
        input: PathBuf,
        /// n,r,m
        #[arg(long, value_parser = parse_matrix)]
        matrix: HalfIntMatrix,
    },
    /// Binary quadratic form utilities.
    Quad {
        #[command(subcommand)]
        command: QuadCommand,
    },
    /// Apply T(p) to a cached expansion.
    Hecke {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        p: u64,
        /// Fail unless the form is an eigenform and print its eigenvalue.
        #[arg(long)]
        expect_eigen: bool,
        /// Write the image as a siegel-v1 file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The non-lift Hecke eigenform of weight 20.
    Nonlift20 {
        /// Prime for the radial check a(pT0) = eta(p) a(T0).
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 144)]
        detmax4: u64,
    },
    /// Bessel ratios of a lift against the IIb bound, for the first class of
    /// discriminant `disc`.
    Bessel {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        lmax: u32,
        #[arg(long)]
        mmax: u32,
    },
    /// Das–Kohnen ratio table of a lift.
    DkTable {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        detmax4: u64,
    },
    /// Scans over primes.
    Scan {
        #[command(subcommand)]
        command: ScanCommand,
    },
    /// Run one verification suite.
    Verify {
        #[arg(value_enum)]
        suite: SuiteName,
    },
    /// Run every suite and write reports.
    ///
    /// Configuration fields (JSON, all optional) and defaults: weights [10, 12],
    /// detmax4 8836, pmax 47, xmax 10000, skkey_detmax4 800, hecke_detmax4
    /// 3600, nonlift_detmax4 144, witt_nmax 8, dk_detmax4 800, cap_pmax 1000,
    /// output_dir none. An empty file means all defaults.
    RunAll {
        /// Output directory; overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum QuadCommand {
    /// Content, conductor, fundamental discriminant and class representative.
    Decompose {
        #[arg(long)]
        n: i64,
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
        #[arg(long)]
        m: i64,
    },
}

#[derive(Subcommand, Debug)]
enum ScanCommand {
    /// Signs and partial sums of λ(p) or a_R(p) along p ≡ residue (mod modulus).
    Signs {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 1)]
        modulus: u64,
        #[arg(long, default_value_t = 0)]
        residue: u64,
        #[arg(long, default_value_t = 10_000)]
        xmax: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteName {
    Arith,
    Radial,
    Skkey,
    Witt,
    Hecke,
    Nonlift20,
    Bessel,
    Dk,
    Sign,
    Selberg,
    Cap,
    Combo,
}

fn parse_matrix(s: &str) -> std::result::Result<HalfIntMatrix, String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match v[..] {
        [n, r, m] => Ok(HalfIntMatrix::new(n, r, m)),
        _ => Err("expected n,r,m".into()),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Csv,
    Json,
}

fn rat_pair(x: &BigRational) -> (String, String) {
    (x.numer().to_string(), x.denom().to_string())
}

fn print_rational_table(format: Format, key: &str, rows: impl Iterator<Item = (String, BigRational)>) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match format {
        Format::Csv => {
            writeln!(out, "{key},num,den")?;
            for (k, v) in rows {
                let (n, d) = rat_pair(&v);
                writeln!(out, "{k},{n},{d}")?;
            }
        }
        Format::Json => {
            let rows: Vec<_> = rows.map(|(k, v)| json!({ key: k, "value": v.to_string() })).collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?;
        }
    }
    Ok(())
}

fn build_expansion(weight: u32, detmax4: u64) -> Result<SiegelExpansion> {
    match weight {
        10 | 12 => sk_lift(&cusp_form_10_12(weight, detmax4)?, detmax4),
        4 | 6 => Ok(siegel_eisenstein2(weight, detmax4)?.expansion),
        _ => Err(Error::InvalidArgument(format!("no construction for weight {weight}; use 4, 6, 10 or 12"))),
    }
}

/// Loads a cached lift of at least `detmax4`, or builds and caches one.
fn lift_with_cache(cache_dir: Option<&Path>, weight: u32, detmax4: u64) -> Result<SiegelExpansion> {
    let Some(dir) = cache_dir else {
        return build_expansion(weight, detmax4);
    };
    let path = dir.join(skforms::cli::lift_cache_name(weight, detmax4));
    if path.exists() {
        return read_siegel(&path);
    }
    std::fs::create_dir_all(dir)?;
    let f = build_expansion(weight, detmax4)?;
    write_siegel(&path, &f)?;
    Ok(f)
}

fn load_config(cli: &Cli) -> Result<Config> {
    match &cli.config {
        Some(path) => Config::from_file(path),
        None => Ok(Config::default()),
    }
}

fn print_reports(reports: &[VerificationReport], format: Format, cache_log: &[String]) -> Result<()> {
    for line in cache_log {
        eprintln!("{line}");
    }
    let mut out = std::io::stdout().lock();
    if format == Format::Json {
        writeln!(out, "{}", serde_json::to_string_pretty(reports)?)?;
    } else {
        writeln!(out, "suite,cases,failures,exit_code")?;
        for r in reports {
            writeln!(out, "{},{},{},{}", r.suite, r.cases, r.failures, r.exit_code)?;
        }
    }
    for r in reports {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        eprintln!("{status} {} ({} cases, {} ms)", r.suite, r.cases, r.runtime_ms);
        if let Some(e) = &r.error {
            eprintln!("  error: {e}");
        }
        for d in &r.details {
            eprintln!("  {}: expected {}, got {}", d.case, d.expected, d.got);
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<i32> {
    let format = if cli.json { Format::Json } else { Format::Csv };
    let cache_dir = cli.cache_dir.as_deref();
    match &cli.command {
        Command::Elliptic { weight, precision, eisenstein: eis, out } => {
            let series = if *eis {
                eisenstein(*weight, *precision)?
            } else if ONE_DIMENSIONAL_WEIGHTS.contains(weight) {
                newform_onedim(*weight, *precision)?.series().clone()
            } else {
                return Err(Error::InvalidArgument(format!(
                    "weight {weight} has no unique rational newform; supported: {ONE_DIMENSIONAL_WEIGHTS:?}"
                )));
            };
            if let Some(path) = out {
                std::fs::write(path, qseries_to_string(*weight, &series))?;
            }
            print_rational_table(format, "n", series.coeffs().iter().enumerate().map(|(n, c)| (n.to_string(), c.clone())))?;
        }
        Command::Cohen { r, n_max } => {
            print_rational_table(format, "N", (0..=*n_max).map(|n| (n.to_string(), cohen_h(*r, n))))?;
        }
        Command::Jacobi { weight, max_d } => {
            let phi = cusp_form_10_12(*weight, *max_d)?;
            print_rational_table(format, "D", phi.coeffs().iter().enumerate().map(|(d, c)| (d.to_string(), c.clone())))?;
        }
        Command::Lift { weight, detmax4, out } => {
            let f = build_expansion(*weight, *detmax4)?;
            write_siegel(out, &f)?;
            eprintln!("wrote {} coefficients to {}", f.coeffs().len(), out.display());
        }
        Command::Coeff { input, matrix } => {
            let f = read_siegel(input)?;
            let a = f.coeff(matrix)?;
            if format == Format::Json {
                outln!("{}", json!({ "matrix": matrix, "value": a.to_string() }));
            } else {
                outln!("{a}");
            }
        }
        Command::Quad { command: QuadCommand::Decompose { n, r, m } } => {
            let dec = decompose(&HalfIntMatrix::new(*n, *r, *m))?;
            outln!(
                "{}",
                json!({ "L": dec.content, "M": dec.conductor, "d": dec.d, "class_rep": dec.class_rep })
            );
        }
        Command::Hecke { input, p, expect_eigen, out } => {
            let f = read_siegel(input)?;
            if *expect_eigen {
                let eta = eigenvalue(&f, *p)?;
                outln!("{}", if format == Format::Json { json!({ "p": p, "eta": eta.to_string() }).to_string() } else { eta.to_string() });
            }
            if let Some(path) = out {
                write_siegel(path, &apply_tp(&f, *p)?)?;
            } else if !*expect_eigen {
                let image = apply_tp(&f, *p)?;
                out!("{}", skforms::cache::siegel_to_string(&image));
            }
        }
        Command::Nonlift20 { p, detmax4 } => {
            let r = nonlift20(*detmax4)?;
            let radial = match *p {
                3 => r.radial.clone(),
                2 => radial_check(&r.expansion, 2, &r.eta2)?,
                p => radial_check(&r.expansion, p, &eigenvalue(&r.expansion, p)?)?,
            };
            let first: Vec<_> = r
                .expansion
                .region()
                .into_iter()
                .take(10)
                .map(|t| Ok(json!({ "matrix": t, "value": r.expansion.coeff(&t)?.to_string() })))
                .collect::<Result<_>>()?;
            let report = json!({
                "eta2": r.eta2.to_string(),
                "eta3": r.eta3.to_string(),
                "first_coeffs": first,
                "radial_check": if radial.pass { "pass" } else { "fail" },
                "radial": radial,
                "commute": r.commute,
            });
            outln!("{}", serde_json::to_string_pretty(&report)?);
            if !radial.pass || !r.commute {
                return Ok(2);
            }
        }
        Command::Bessel { weight, p, disc, lmax, mmax } => {
            let s = *class_representatives(*disc)?
                .first()
                .ok_or_else(|| Error::InvalidArgument(format!("no forms of discriminant {disc}")))?;
            let detmax4 = s.det4() as u64 * p.pow(2 * (lmax + mmax));
            let f = lift_with_cache(cache_dir, *weight, detmax4)?;
            let rows = bessel_table(&f, &s, *p, *lmax, *mmax)?;
            if format == Format::Json {
                let rows: Vec<_> = rows
                    .iter()
                    .map(|r| json!({"l": r.ell, "m": r.m, "ratio": r.ratio.to_string(), "bound_sq": r.bound_sq.to_string(), "pass": r.pass}))
                    .collect();
                outln!("{}", serde_json::to_string_pretty(&json!({ "S": s, "rows": rows }))?);
            } else {
                outln!("l,m,ratio_num,ratio_den,bound_sq_num,bound_sq_den,pass");
                for r in &rows {
                    outln!(
                        "{},{},{},{},{},{},{}",
                        r.ell,
                        r.m,
                        r.ratio.numer(),
                        r.ratio.denom(),
                        r.bound_sq.numer(),
                        r.bound_sq.denom(),
                        r.pass
                    );
                }
            }
            if !rows.iter().all(|r| r.pass) {
                return Ok(2);
            }
        }
        Command::DkTable { weight, detmax4 } => {
            let f = lift_with_cache(cache_dir, *weight, *detmax4)?;
            outln!("n,r,m,det4,L,M,d,a_num,a_den,ratio_dk,ratio_refined");
            for r in dk_rows(&f, *detmax4)? {
                outln!(
                    "{},{},{},{},{},{},{},{},{},{:.6e},{:.6e}",
                    r.t.n,
                    r.t.r,
                    r.t.m,
                    r.t.det4(),
                    r.content,
                    r.conductor,
                    r.d,
                    r.a.numer(),
                    r.a.denom(),
                    r.ratio_dk,
                    r.ratio_refined
                );
            }
        }
        Command::Scan { command: ScanCommand::Signs { spec, modulus, residue, xmax } } => {
            let spec: SpecJson = serde_json::from_str(&std::fs::read_to_string(spec)?)?;
            let target = spec.resolve(*xmax as usize)?;
            let stream = target.stream(*xmax)?;
            let scan = sign_changes(&stream, *residue, *modulus)?;
            let grid: Vec<u64> = [100, 1000, 10_000, 100_000].into_iter().filter(|&x| x <= *xmax).collect();
            let sums = selberg_sums(&stream, *residue, *modulus, 1.0, &grid)?;
            if format == Format::Json {
                outln!("{}", serde_json::to_string_pretty(&json!({ "scan": scan, "sums": sums }))?);
            } else {
                outln!("p,value,sign");
                for (p, v) in stream.iter().filter(|(p, _)| p % modulus == residue % modulus) {
                    outln!("{p},{v:.12e},{}", if *v > 0.0 { 1 } else if *v < 0.0 { -1 } else { 0 });
                }
                eprintln!(
                    "{} primes, {} positive, {} negative, {} sign changes",
                    scan.primes, scan.positive, scan.negative, scan.changes
                );
            }
        }
        Command::Verify { suite } => {
            let name = format!("{suite:?}").to_lowercase();
            debug_assert!(suite_names().contains(&name.as_str()));
            let ctx = Context::prepare(load_config(cli)?, cache_dir)?;
            let (report, _) = run_suite(&ctx, &name)?;
            print_reports(std::slice::from_ref(&report), format, &ctx.cache_log)?;
            return Ok(report.exit_code);
        }
        Command::RunAll { out } => {
            let mut config = load_config(cli)?;
            if let Some(dir) = out {
                config.output_dir = Some(dir.clone());
            }
            let ctx = Context::prepare(config, cache_dir)?;
            let reports = run_all(&ctx)?;
            print_reports(&reports, format, &ctx.cache_log)?;
            return Ok(exit_status(&reports));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        // A closed pipe downstream (`| head`) is not an error.
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

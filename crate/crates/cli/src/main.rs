//! `oscilla`: evaluate finite Fourier transforms, tabulate and verify their
//! zeros, and sweep the beta-parameter atlas.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use oscilla::atlas::{
    beta_transform, classify_beta_params, kuttner_predict, parse_grid, predict, predict_from_shape, predict_tag,
    steinerberger_predict, steinerberger_signs, sweep, write_csv, write_jsonl, AtlasRecord, RegionTag, SignVerdict,
};
use oscilla::hypergeom::SeriesKind;
use oscilla::zeros::{
    fmt17, scan_and_refine, sigma_roots, verify_pair, write_zero_csv, Prediction, Status, GRID_PER_PI,
};
use oscilla::{eval, Density, Family, TransformKind, DEFAULT_TOL};
use serde_json::json;

const EXIT_FAIL: u8 = 2;
const EXIT_INDETERMINATE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "oscilla",
    version,
    about = "Finite Fourier transforms of densities on (0,1) and their zeros"
)]
struct Cli {
    /// Absolute tolerance; overrides OSCILLA_TOL (default 1e-10).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print one transform value and its error estimate.
    Eval {
        /// Density spec `family:p1,p2,...`, e.g. `beta:0.5,2`.
        #[arg(long)]
        density: String,
        /// cosine, sine, d_cosine, d_sine, cosine_reflected or sine_reflected.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        x: f64,
    },
    /// Tabulate the positive zeros up to (kmax + 1)π as CSV.
    Zeros {
        #[arg(long)]
        density: String,
        #[arg(long)]
        kind: String,
        #[arg(long)]
        kmax: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check U and V against a predicted zero pattern.
    Verify {
        #[arg(long)]
        density: String,
        /// `auto`, `shape`, or a region tag such as `Pc_star` (beta only).
        #[arg(long, default_value = "auto")]
        prediction: String,
        #[arg(long)]
        kmax: u32,
    },
    /// Verify every cell of an (α, β) grid; writes JSON lines.
    Sweep {
        /// LO:HI:STEP
        #[arg(long)]
        alpha: String,
        /// LO:HI:STEP
        #[arg(long)]
        beta: String,
        #[arg(long)]
        kmax: u32,
        #[arg(long)]
        out: PathBuf,
        /// Also write the flattened CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Worker threads (default: available cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print σ_k, the positive roots of tan x = x.
    Sigma {
        #[arg(long)]
        kmax: u32,
    },
    /// Print a_k = S_β((k - 1/2)π) with its sign.
    Steinerberger {
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long)]
        kmax: u32,
    },
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Usage(String),
    Compute(String),
}

impl From<oscilla::Error> for Failure {
    fn from(e: oscilla::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn tolerance(flag: Option<f64>) -> Result<f64, Failure> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var("OSCILLA_TOL") {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("OSCILLA_TOL = `{s}` is not a number")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    oscilla::transform::check_tol(tol).map_err(usage)?;
    Ok(tol)
}

fn density(spec: &str) -> Result<Density, Failure> {
    Density::from_str(spec).map_err(usage)
}

fn kind(s: &str) -> Result<TransformKind, Failure> {
    TransformKind::from_str(s).map_err(usage)
}

fn positive_k(k: u32) -> Result<u32, Failure> {
    if k == 0 {
        return Err(Failure::Usage("--kmax must be at least 1".into()));
    }
    Ok(k)
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let tol = tolerance(cli.tol)?;
    match cli.command {
        Command::Eval {
            density: spec,
            kind: k,
            x,
        } => {
            let d = density(&spec)?;
            let k = kind(&k)?;
            if !x.is_finite() || x < 0.0 {
                return Err(Failure::Usage(format!("--x {x} must be finite and nonnegative")));
            }
            let r = eval(&d, k, x, tol)?;
            let mut out = output(None)?;
            writeln!(out, "density,kind,x,value,abs_error_estimate,method")?;
            writeln!(
                out,
                "\"{}\",{},{},{},{},{}",
                d.label(),
                k,
                fmt17(x),
                fmt17(r.value),
                fmt17(r.abs_error_estimate),
                r.method.tag()
            )?;
            out.flush()?;
            Ok(0)
        }
        Command::Zeros {
            density: spec,
            kind: k,
            kmax,
            out,
        } => {
            let d = density(&spec)?;
            let k = kind(&k)?;
            let kmax = positive_k(kmax)?;
            let hi = (kmax as f64 + 1.0) * std::f64::consts::PI;
            let lo = 0.5 * std::f64::consts::PI / GRID_PER_PI as f64;
            let points = GRID_PER_PI * (kmax as usize + 1);
            let f = |x: f64| eval(&d, k, x, tol).map(|r| r.value);
            let records = scan_and_refine(&f, lo, hi, points, tol)?;
            let mut w = output(out.as_ref())?;
            write_zero_csv(&mut w, d.label(), k, &records)?;
            w.flush()?;
            Ok(0)
        }
        Command::Verify {
            density: spec,
            prediction,
            kmax,
        } => verify(&spec, &prediction, positive_k(kmax)?, tol),
        Command::Sweep {
            alpha,
            beta,
            kmax,
            out,
            csv,
            jobs,
        } => {
            let alphas = parse_grid(&alpha).map_err(usage)?;
            let betas = parse_grid(&beta).map_err(usage)?;
            if let Some(v) = alphas.iter().chain(&betas).find(|v| **v <= 0.0) {
                return Err(Failure::Usage(format!("grid value {v} must be positive")));
            }
            let kmax = positive_k(kmax)?;
            let mut builder = rayon::ThreadPoolBuilder::new();
            if let Some(j) = jobs {
                if j == 0 {
                    return Err(Failure::Usage("--jobs must be at least 1".into()));
                }
                builder = builder.num_threads(j);
            }
            let pool = builder.build().map_err(|e| Failure::Compute(e.to_string()))?;
            run_sweep(&pool, &alphas, &betas, kmax, tol, &out, csv.as_ref())
        }
        Command::Sigma { kmax } => {
            let kmax = positive_k(kmax)?;
            let mut out = output(None)?;
            writeln!(out, "k,sigma")?;
            for (k, s) in sigma_roots(kmax).iter().enumerate() {
                writeln!(out, "{},{}", k + 1, fmt17(*s))?;
            }
            out.flush()?;
            Ok(0)
        }
        Command::Steinerberger { beta, kmax } => {
            if !(beta > -1.0) || !beta.is_finite() {
                return Err(Failure::Usage(format!("--beta {beta} must exceed -1")));
            }
            let kmax = positive_k(kmax)?;
            let terms = steinerberger_signs(beta, kmax, tol)?;
            let mut out = output(None)?;
            writeln!(out, "k,x,a_k,sign,expected")?;
            let mut mismatch = false;
            for t in &terms {
                let expected = steinerberger_predict(beta, t.k)?;
                if let Some(e) = expected {
                    mismatch |= t.sign != SignVerdict::Indeterminate && t.sign != e;
                }
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    t.k,
                    fmt17(t.x),
                    fmt17(t.value),
                    t.sign.symbol(),
                    expected.map_or('?', |e| e.symbol())
                )?;
            }
            out.flush()?;
            Ok(if mismatch { EXIT_FAIL } else { 0 })
        }
    }
}

/// Predictions for `(U, V)` and a note on where they came from.
fn resolve_prediction(d: &Density, name: &str, k_max: u32) -> Result<(Prediction, Prediction, String), Failure> {
    let p = d.params();
    let from_shape = |note: &str| {
        let (u, v) = predict_from_shape(d.shape(), k_max);
        (u, v, note.to_string())
    };
    match name {
        "shape" => Ok(from_shape("shape")),
        "auto" => match d.family() {
            Family::Beta if !d.is_reflected() => match predict(&classify_beta_params(p[0], p[1])?, k_max) {
                Ok((u, v)) => Ok((u, v, "region".into())),
                Err(oscilla::Error::NoPrediction(_)) => Ok(from_shape("shape")),
                Err(e) => Err(e.into()),
            },
            Family::Kuttner => {
                let (u, v, _) = from_shape("");
                let u = kuttner_predict(p[0], p[1], k_max).unwrap_or(u);
                Ok((u, v, "kuttner".into()))
            }
            _ => Ok(from_shape("shape")),
        },
        tag => {
            let tag = RegionTag::from_str(tag).map_err(usage)?;
            if d.family() != Family::Beta || d.is_reflected() {
                return Err(Failure::Usage(format!("prediction `{tag}` needs a beta density")));
            }
            let (u, v) = predict_tag(tag, p[0], p[1], k_max)?;
            Ok((u, v, "region".into()))
        }
    }
}

fn verify(spec: &str, name: &str, k_max: u32, tol: f64) -> Result<u8, Failure> {
    let d = density(spec)?;
    let (pu, pv, source) = resolve_prediction(&d, name, k_max)?;
    let mut out = output(None)?;
    if pu.is_empty() && pv.is_empty() {
        let report = json!({
            "density": d.label(),
            "prediction": source,
            "status": "no_prediction",
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable"))?;
        out.flush()?;
        return Ok(EXIT_INDETERMINATE);
    }
    // Beta densities use the series inside its regime; both paths agree far
    // below tol.
    let beta = (d.family() == Family::Beta && !d.is_reflected()).then(|| (d.params()[0], d.params()[1]));
    let u = |x: f64| match beta {
        Some((a, b)) => beta_transform(a, b, SeriesKind::Cosine, x, tol),
        None => eval(&d, TransformKind::Cosine, x, tol).map(|r| r.value),
    };
    let v = |x: f64| match beta {
        Some((a, b)) => beta_transform(a, b, SeriesKind::Sine, x, tol),
        None => eval(&d, TransformKind::Sine, x, tol).map(|r| r.value),
    };
    let (ru, rv) = verify_pair(&u, &pu, &v, &pv, tol, GRID_PER_PI)?;
    let status = match (ru.status(), rv.status()) {
        (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
        (Status::Indeterminate, _) | (_, Status::Indeterminate) => Status::Indeterminate,
        _ => Status::Pass,
    };
    let report = json!({
        "density": d.label(),
        "prediction": source,
        "k_max": k_max,
        "tol": tol,
        "status": status,
        "cosine": { "rules": pu.rules, "report": ru },
        "sine": { "rules": pv.rules, "report": rv },
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable"))?;
    out.flush()?;
    Ok(match status {
        Status::Pass => 0,
        Status::Fail => EXIT_FAIL,
        Status::Indeterminate => EXIT_INDETERMINATE,
    })
}

/// One α row at a time, so finished rows are on disk if the run stops.
fn run_sweep(
    pool: &rayon::ThreadPool,
    alphas: &[f64],
    betas: &[f64],
    k_max: u32,
    tol: f64,
    out: &PathBuf,
    csv: Option<&PathBuf>,
) -> Result<u8, Failure> {
    let mut w = BufWriter::new(File::create(out)?);
    let mut all: Vec<AtlasRecord> = Vec::with_capacity(alphas.len() * betas.len());
    for &a in alphas {
        let row = pool.install(|| sweep(&[a], betas, k_max, tol))?;
        write_jsonl(&mut w, &row)?;
        w.flush()?;
        all.extend(row);
    }
    if let Some(path) = csv {
        let mut c = BufWriter::new(File::create(path)?);
        write_csv(&mut c, &all)?;
        c.flush()?;
    }
    let count = |s: &str| all.iter().filter(|r| r.status == s).count();
    let (fail, error, indet) = (count("fail"), count("error"), count("indeterminate"));
    eprintln!(
        "{} cells: {} pass, {} fail, {} indeterminate, {} unclassified, {} error",
        all.len(),
        count("pass"),
        fail,
        indet,
        count("unclassified"),
        error
    );
    Ok(if fail > 0 {
        EXIT_FAIL
    } else if error > 0 {
        1
    } else if indet > 0 {
        EXIT_INDETERMINATE
    } else {
        0
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nRun `oscilla --help` for usage.");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use romanoff_lab::lacunary::{LacunaryParams, LacunarySet};
use romanoff_lab::report::{
    emit_summary, gaps_csv, lacunary_listing, load_reports, parse_count, run_experiment,
    windows_csv, write_atomic, ExperimentManifest,
};
use romanoff_lab::romanoff::{self, RomanoffConvention};
use romanoff_lab::{primes, singular, window, Error, Result};

/// Worker-count override for the rayon pool.
#[cfg(feature = "parallel")]
const THREADS_ENV: &str = "ROMANOFF_LAB_THREADS";

fn count(s: &str) -> std::result::Result<u64, String> {
    parse_count(s).map_err(|e| e.to_string())
}

#[derive(Parser)]
#[command(
    name = "romanoff-lab",
    version,
    about = "Prime sumset and Romanoff experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the primes of [lo, hi), one per line
    Sieve {
        #[arg(long, value_parser = count)]
        lo: u64,
        #[arg(long, value_parser = count)]
        hi: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count primes up to x, optionally in a residue class
    Pi {
        #[arg(long, value_parser = count)]
        x: u64,
        #[arg(long = "mod", value_parser = count, requires = "res")]
        modulus: Option<u64>,
        #[arg(long, value_parser = count, requires = "modulus")]
        res: Option<u64>,
    },
    /// Enumerate the lacunary set in [1, 2X]
    Lacunary {
        #[arg(long, value_delimiter = ',', default_value = "2,2")]
        r: Vec<f64>,
        #[arg(long = "X", value_parser = count)]
        scale: u64,
        #[arg(long, default_value = "auto")]
        lambda: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Window statistics R, Q, S over sampled windows
    Scan {
        #[arg(long = "X", value_parser = count)]
        scale: u64,
        #[arg(long)]
        theta: f64,
        #[arg(long, value_parser = count)]
        samples: u64,
        #[arg(long, value_parser = count)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "2,2")]
        r: Vec<f64>,
        #[arg(long, default_value = "auto")]
        lambda: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Deviation of short-interval prime counts from y/ln t, as JSON quantiles
    PrimeDev {
        #[arg(long = "X", value_parser = count)]
        scale: u64,
        #[arg(long, value_parser = count)]
        y: u64,
        #[arg(long, value_parser = count, default_value = "1000")]
        samples: u64,
        #[arg(long, value_parser = count, default_value = "0")]
        seed: u64,
    },
    /// Prime-pair singular series at one shift
    Singular {
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
    },
    /// Average singular series over differences of the lacunary set
    SingularAvg {
        #[arg(long, value_delimiter = ',', default_value = "2,2")]
        r: Vec<f64>,
        #[arg(long = "X", value_parser = count)]
        scale: u64,
        #[arg(long, default_value = "auto")]
        lambda: String,
    },
    /// Prime pairs (m, m + delta) in (y, y + h] against the sieve prediction
    Pairs {
        #[arg(long, value_parser = count)]
        y: u64,
        #[arg(long, value_parser = count)]
        h: u64,
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
    },
    /// Largest Romanoff multiplicity over multiples of a smooth modulus
    Hunt {
        #[arg(long = "X", value_parser = count)]
        scale: u64,
        #[arg(long, value_parser = count)]
        window: u64,
        #[arg(long)]
        prime_bound: f64,
        #[arg(long, value_delimiter = ',', value_parser = count)]
        exclude: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        k_min: u32,
    },
    /// Fraction of windows holding a multiple of d with large multiplicity
    Proportion {
        #[arg(long = "X", value_parser = count)]
        scale: u64,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        prime_bound: f64,
        #[arg(long, value_parser = count)]
        threshold: u64,
        #[arg(long, value_parser = count, default_value = "500")]
        samples: u64,
        #[arg(long, value_parser = count, default_value = "0")]
        seed: u64,
        #[arg(long, value_delimiter = ',', value_parser = count)]
        exclude: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        k_min: u32,
    },
    /// Gaps between odd numbers of the form p + 2^k
    Gaps {
        #[arg(long, value_parser = count)]
        limit: u64,
        #[arg(long, default_value_t = 1)]
        k_min: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Admissible shift set -2^(iL), L = lcm of p - 1 over p <= r
    Admissible {
        #[arg(long, value_parser = count)]
        r: u64,
        #[arg(long, value_parser = count)]
        count: u64,
    },
    /// Run an experiment manifest
    Run {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Tabulate every report.json under a directory
    Summarize {
        #[arg(long)]
        dir: PathBuf,
    },
}

fn params(r: Vec<f64>, lambda: &str) -> Result<LacunaryParams> {
    Ok(match lambda.trim() {
        "auto" => LacunaryParams::new(r)?,
        v => {
            let l = v.parse().map_err(|_| {
                Error::Argument(format!("lambda `{v}` is neither `auto` nor a number"))
            })?;
            LacunaryParams::with_lambda(r, l)?
        }
    })
}

fn emit(out: Option<&PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, body.as_bytes()),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| Error::Io {
                path: "<stdout>".into(),
                source: e,
            }),
    }
}

fn json(value: &impl serde::Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn usize_of(v: u64) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::Argument(format!("{v} does not fit in usize")))
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Sieve { lo, hi, out } => {
            if lo >= hi {
                return Err(Error::Argument(format!("need lo < hi, got {lo} >= {hi}")));
            }
            let mut body = String::new();
            for p in primes::primes_in(lo.saturating_sub(1), hi - 1)? {
                body.push_str(&format!("{p}\n"));
            }
            emit(out.as_ref(), &body)
        }
        Command::Pi { x, modulus, res } => {
            let n = match (modulus, res) {
                (Some(k), Some(l)) => primes::count_primes_in_ap(0, x, k, l)?,
                _ => primes::count_primes_in(0, x)?,
            };
            println!("{n}");
            Ok(())
        }
        Command::Lacunary {
            r,
            scale,
            lambda,
            out,
        } => {
            let set = LacunarySet::generate(params(r, &lambda)?, scale)?;
            emit(out.as_ref(), &lacunary_listing(&set))
        }
        Command::Scan {
            scale,
            theta,
            samples,
            seed,
            r,
            lambda,
            out,
        } => {
            let config = window::ScanConfig::new(scale, theta, usize_of(samples)?, seed)?;
            let set = LacunarySet::generate(params(r, &lambda)?, scale)?;
            let res = window::scan(&config, &set);
            eprint!("{}", json(&res.summary)?);
            emit(out.as_ref(), &windows_csv(&res.records))
        }
        Command::PrimeDev {
            scale,
            y,
            samples,
            seed,
        } => {
            let d = window::prime_window_deviation(scale, y, usize_of(samples)?, seed)?;
            emit(None, &json(&d)?)
        }
        Command::Singular { delta } => {
            let v = singular::singular_series(delta)?;
            emit(None, &json(&v)?)
        }
        Command::SingularAvg { r, scale, lambda } => {
            let set = LacunarySet::generate(params(r, &lambda)?, scale)?;
            emit(None, &json(&singular::average_over_differences(&set)?)?)
        }
        Command::Pairs { y, h, delta } => emit(
            None,
            &json(&singular::pair_count_vs_prediction(y, h, delta)?)?,
        ),
        Command::Hunt {
            scale,
            window,
            prime_bound,
            exclude,
            k_min,
        } => {
            let d = romanoff::build_modulus(prime_bound, &exclude)?;
            let outcome = romanoff::hunt_large_multiplicity(
                scale,
                window,
                &d,
                RomanoffConvention::new(k_min)?,
            )?;
            emit(
                None,
                &json(&serde_json::json!({ "modulus": d, "outcome": outcome }))?,
            )
        }
        Command::Proportion {
            scale,
            theta,
            prime_bound,
            threshold,
            samples,
            seed,
            exclude,
            k_min,
        } => {
            let d = romanoff::build_modulus(prime_bound, &exclude)?;
            let rep = romanoff::positive_proportion_scan(
                scale,
                theta,
                &d,
                threshold,
                usize_of(samples)?,
                seed,
                RomanoffConvention::new(k_min)?,
            )?;
            emit(None, &json(&rep)?)
        }
        Command::Gaps { limit, k_min, out } => {
            let seq =
                romanoff::enumerate_representable_odds(limit, RomanoffConvention::new(k_min)?)?;
            let stats = seq.gap_statistics()?;
            eprintln!(
                "max gap {} at s_m = {}; {} non-representable odd numbers",
                stats.max_gap,
                stats.argmax,
                seq.non_representable.len()
            );
            emit(out.as_ref(), &gaps_csv(&stats))
        }
        Command::Admissible { r, count } => emit(
            None,
            &json(&romanoff::admissible_shift_set(r, usize_of(count)?)?)?,
        ),
        Command::Run { manifest } => {
            let m = ExperimentManifest::from_file(&manifest)?;
            let report = run_experiment(&m)?;
            eprintln!(
                "{} finished in {:.3} s",
                m.name,
                report.duration.as_secs_f64()
            );
            emit(None, &emit_summary(std::slice::from_ref(&report))?.table)
        }
        Command::Summarize { dir } => {
            let reports = load_reports(&dir)?;
            let summary = emit_summary(&reports)?;
            write_atomic(&dir.join("summary.txt"), summary.table.as_bytes())?;
            write_atomic(&dir.join("summary.json"), summary.json.as_bytes())?;
            emit(None, &summary.table)
        }
    }
}

fn configure_threads() {
    #[cfg(feature = "parallel")]
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // only fails if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

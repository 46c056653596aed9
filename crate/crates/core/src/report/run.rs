use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::manifest::{ExperimentKind, ExperimentManifest};
use super::output::{gaps_csv, windows_csv, write_atomic, SCHEMA_PREFIX};
use crate::error::{Error, Result};
use crate::lacunary::{LacunaryParams, LacunarySet};
use crate::romanoff::{self, HuntOutcome, RomanoffConvention};
use crate::singular::average_over_differences;
use crate::stats::Summary;
use crate::window::{prime_window_deviation, scan, ScanConfig};

pub const REPORT_FILE: &str = "report.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricValue {
    Int(i64),
    Real(f64),
    Text(String),
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricValue::Int(v) => write!(f, "{v}"),
            MetricValue::Real(v) => write!(f, "{v:.6}"),
            MetricValue::Text(v) => f.write_str(v),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: MetricValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub manifest: ExperimentManifest,
    /// `sha256("blob <len>\0" ++ canonical manifest text)`, hex.
    pub input_hash: String,
    pub metrics: Vec<Metric>,
    /// Artifact file names, relative to the output directory.
    pub artifacts: Vec<String>,
    /// Wall-clock time; kept out of `report.json` so reruns are byte-identical.
    #[serde(skip)]
    pub duration: Duration,
}

impl RunReport {
    pub fn metric(&self, name: &str) -> Option<&MetricValue> {
        self.metrics
            .iter()
            .find(|m| m.name == name)
            .map(|m| &m.value)
    }
}

fn content_hash(text: &str) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", text.len()).as_bytes());
    h.update(text.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Default)]
struct Metrics(Vec<Metric>);

impl Metrics {
    fn int(&mut self, name: &str, v: impl TryInto<i64>) {
        let v = v.try_into().unwrap_or(i64::MAX);
        self.0.push(Metric {
            name: name.into(),
            value: MetricValue::Int(v),
        });
    }

    fn real(&mut self, name: &str, v: f64) {
        self.0.push(Metric {
            name: name.into(),
            value: MetricValue::Real(v),
        });
    }

    fn text(&mut self, name: &str, v: impl Into<String>) {
        self.0.push(Metric {
            name: name.into(),
            value: MetricValue::Text(v.into()),
        });
    }

    fn summary(&mut self, prefix: &str, s: &Summary) {
        self.real(&format!("{prefix}_min"), s.min);
        self.real(&format!("{prefix}_median"), s.median);
        self.real(&format!("{prefix}_mean"), s.mean);
        self.real(&format!("{prefix}_max"), s.max);
        self.real(&format!("{prefix}_std"), s.std_dev);
    }
}

struct Artifacts<'a> {
    manifest: &'a ExperimentManifest,
    names: Vec<String>,
}

impl Artifacts<'_> {
    fn write(&mut self, name: &str, body: &str) -> Result<()> {
        write_atomic(&self.manifest.out_dir.join(name), body.as_bytes())?;
        self.names.push(name.to_string());
        Ok(())
    }
}

fn lacunary_set(m: &ExperimentManifest, scale: u64) -> Result<LacunarySet> {
    let r = m.f64_list_or("r", &[2.0, 2.0])?;
    let params = match m.raw("lambda").map(str::trim) {
        None | Some("auto") => LacunaryParams::new(r)?,
        Some(_) => LacunaryParams::with_lambda(r, m.require_f64("lambda")?)?,
    };
    LacunarySet::generate(params, scale)
}

fn convention(m: &ExperimentManifest) -> Result<RomanoffConvention> {
    let k = m.u64_or("k_min", 1)?;
    RomanoffConvention::new(u32::try_from(k).unwrap_or(u32::MAX))
}

fn modulus(m: &ExperimentManifest) -> Result<romanoff::SmoothModulus> {
    let excluded = match m.raw("exclude") {
        Some(_) => m.u64_list("exclude")?,
        None => Vec::new(),
    };
    romanoff::build_modulus(m.require_f64("prime_bound")?, &excluded)
}

fn usize_of(v: u64) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::arg(format!("{v} does not fit in usize")))
}

/// Runs the manifest's experiment and writes its artifacts and `report.json`.
pub fn run_experiment(manifest: &ExperimentManifest) -> Result<RunReport> {
    let start = Instant::now();
    let mut out = Metrics::default();
    let mut files = Artifacts {
        manifest,
        names: Vec::new(),
    };
    let m = manifest;

    match m.kind {
        ExperimentKind::Scan => {
            let scale = m.require_u64("X")?;
            let config = ScanConfig::new(
                scale,
                m.require_f64("theta")?,
                usize_of(m.require_u64("samples")?)?,
                m.require_u64("seed")?,
            )?;
            let set = lacunary_set(m, scale)?;
            let res = scan(&config, &set);
            files.write("windows.csv", &windows_csv(&res.records))?;
            out.int("windows", res.records.len());
            out.int("h", config.h());
            out.int("set_size", set.len());
            out.summary("R_over_h", &res.summary.r_over_h);
            out.summary("Q_over_h", &res.summary.q_over_h);
            out.summary("S_over_h", &res.summary.s_over_h);
            out.real("cs_guard_fraction", res.summary.cs_guard_fraction);
            out.int(
                "inconsistent_records",
                res.records.iter().filter(|r| !r.is_consistent()).count(),
            );
        }
        ExperimentKind::SingularAvg => {
            let scale = m.require_u64("X")?;
            let set = lacunary_set(m, scale)?;
            let avg = average_over_differences(&set)?;
            files.write("singular_avg.json", &serde_json::to_string_pretty(&avg)?)?;
            out.int("set_size", set.len());
            out.int("pairs", avg.pairs);
            out.real("total", avg.total);
            out.real("normalized", avg.normalized);
            out.real("divisor_sum_aggregate", avg.divisor_sum_aggregate);
        }
        ExperimentKind::PrimeDev => {
            let d = prime_window_deviation(
                m.require_u64("X")?,
                m.require_u64("y")?,
                usize_of(m.require_u64("samples")?)?,
                m.require_u64("seed")?,
            )?;
            files.write("prime_dev.json", &serde_json::to_string_pretty(&d)?)?;
            out.int("samples", d.samples);
            out.real("p50", d.p50);
            out.real("p90", d.p90);
            out.real("p99", d.p99);
            out.real("max", d.max);
            out.real("exceptional_fraction", d.exceptional_fraction);
        }
        ExperimentKind::Hunt => {
            let d = modulus(m)?;
            let conv = convention(m)?;
            let outcome = romanoff::hunt_large_multiplicity(
                m.require_u64("X")?,
                m.require_u64("window")?,
                &d,
                conv,
            )?;
            files.write("hunt.json", &serde_json::to_string_pretty(&outcome)?)?;
            out.int("d", d.d);
            out.real("d_over_phi", d.ratio);
            match outcome {
                HuntOutcome::Found(h) => {
                    out.int("n", h.n);
                    out.int("multiplicity", h.multiplicity);
                    out.real("window_average", h.window_average);
                    out.int("multiples", h.multiples);
                    out.int("recheck", romanoff::romanoff_rep(h.n, conv));
                }
                HuntOutcome::NoMultiple => out.text("outcome", "no multiple of d in window"),
            }
        }
        ExperimentKind::Proportion => {
            let d = modulus(m)?;
            let rep = romanoff::positive_proportion_scan(
                m.require_u64("X")?,
                m.require_f64("theta")?,
                &d,
                m.require_u64("threshold")?,
                usize_of(m.require_u64("samples")?)?,
                m.require_u64("seed")?,
                convention(m)?,
            )?;
            files.write("proportion.json", &serde_json::to_string_pretty(&rep)?)?;
            out.int("d", d.d);
            out.int("h", rep.h);
            out.int("hits", rep.hits);
            out.real("fraction", rep.fraction);
            out.summary("S_d", &rep.window_sums);
        }
        ExperimentKind::Gaps => {
            let seq =
                romanoff::enumerate_representable_odds(m.require_u64("limit")?, convention(m)?)?;
            let stats = seq.gap_statistics()?;
            files.write("gaps.csv", &gaps_csv(&stats))?;
            let mut listing = format!("{SCHEMA_PREFIX}/non-representable/v1\nn\n");
            for n in &seq.non_representable {
                listing.push_str(&format!("{n}\n"));
            }
            files.write("non_representable.csv", &listing)?;
            out.int("representable", seq.values.len());
            out.int("non_representable", seq.non_representable.len());
            out.int("max_gap", stats.max_gap);
            out.int("argmax", stats.argmax);
            out.real(
                "max_normalized_gap",
                stats.rows.iter().map(|r| r.normalized).fold(0.0, f64::max),
            );
        }
        ExperimentKind::LacunaryCount => {
            let scales = m.u64_list("X")?;
            if scales.is_empty() {
                return Err(Error::arg("key `X` lists no scales"));
            }
            let mut csv = format!("{SCHEMA_PREFIX}/lacunary-count/v1\nX,count,count_over_log2X\n");
            let mut ratios = Vec::new();
            for &x in &scales {
                let set = lacunary_set(m, x)?;
                let ratio = set.len() as f64 / (x as f64).log2();
                csv.push_str(&format!("{x},{},{ratio}\n", set.len()));
                out.int(&format!("count_X{x}"), set.len());
                ratios.push(ratio);
            }
            files.write("lacunary_counts.csv", &csv)?;
            let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| {
                (lo.min(r), hi.max(r))
            });
            out.real("ratio_spread", hi / lo);
        }
    }

    let report = RunReport {
        manifest: manifest.clone(),
        input_hash: content_hash(&manifest.canonical_text()),
        metrics: out.0,
        artifacts: files.names,
        duration: start.elapsed(),
    };
    let mut body = serde_json::to_string_pretty(&report)?;
    body.push('\n');
    write_atomic(&manifest.out_dir.join(REPORT_FILE), body.as_bytes())?;
    Ok(report)
}

impl RunReport {
    /// Metric rows keyed by name, for table rendering.
    pub(crate) fn metric_map(&self) -> BTreeMap<&str, &MetricValue> {
        self.metrics
            .iter()
            .map(|m| (m.name.as_str(), &m.value))
            .collect()
    }
}

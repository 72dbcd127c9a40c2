//! Reproducible experiments: oracle validation, component sweeps, cut
//! distributions, connectivity of uniform matchings and asymptotic tables.
//!
//! Every table row starts with the provenance columns `n, m, seed, method`.
//! Files contain no timing information, so identical configurations produce
//! identical bytes.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::analytics::{component_summary, diagram_stats, is_monolithic, DiagramStats,
    EmpiricalDistribution};
use crate::asymptotics::{asymptotic_t, bounds_t, cut_law, euler_log, jacobi_sides};
use crate::error::{Error, Result};
use crate::exact::brute::{brute_force_row, connected_table, BRUTE_ROW_CAP};
use crate::exact::{catalan, component_identity_report, connected_count_exact, crossing_row,
    ln_big, max_crossings, total_diagrams, touchard_riordan, COMPONENT_IDENTITY_CAP};
use crate::sampler::{random_matching, sample, stream_rng, Method, SamplerConfig, Tilt};
use crate::table::dp_count;

/// Default per-cell wall-clock budget.
pub const DEFAULT_CELL_BUDGET: Duration = Duration::from_secs(600);
pub const DEFAULT_REPLICATES: usize = 100;

/// How `m` is derived from `n`; results are floored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MRule {
    Absolute(usize),
    /// `c * n`
    Linear(f64),
    /// `c * n * ln n`, natural log.
    NLogN(f64),
}

impl MRule {
    pub fn resolve(&self, n: usize) -> usize {
        // The small offset keeps exact products such as (1/14) * 14k from
        // flooring one below.
        let floor = |v: f64| (v + 1e-9).floor().max(0.0) as usize;
        match *self {
            MRule::Absolute(m) => m,
            MRule::Linear(c) => floor(c * n as f64),
            MRule::NLogN(c) => floor(c * n as f64 * (n as f64).ln()),
        }
    }
}

impl FromStr for MRule {
    type Err = Error;

    /// Accepts `100`, `n`, `0.5*n`, `n/14`, `0.1*nlogn`, `nlogn/10`.
    fn from_str(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Config(format!("cannot parse m rule {text:?}"));
        if let Ok(m) = s.parse::<usize>() {
            return Ok(MRule::Absolute(m));
        }
        let (coef, var) = if let Some((head, tail)) = s.split_once('*') {
            (head.parse::<f64>().map_err(|_| bad())?, tail.to_string())
        } else if let Some((head, tail)) = s.split_once('/') {
            let d = tail.parse::<f64>().map_err(|_| bad())?;
            (1.0 / d, head.to_string())
        } else {
            (1.0, s.clone())
        };
        if !(coef > 0.0 && coef.is_finite()) {
            return Err(Error::Config(format!("m rule coefficient must be positive in {text:?}")));
        }
        match var.as_str() {
            "n" => Ok(MRule::Linear(coef)),
            "nlogn" | "nlnn" | "n*ln(n)" | "n*log(n)" => Ok(MRule::NLogN(coef)),
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for MRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MRule::Absolute(m) => write!(f, "{m}"),
            MRule::Linear(c) => write!(f, "{c}*n"),
            MRule::NLogN(c) => write!(f, "{c}*nlogn"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" | "jsonl" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub n_list: Vec<usize>,
    pub m_rules: Vec<MRule>,
    pub replicates: usize,
    pub seed: u64,
    pub method: Method,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub mcmc_burn_in: Option<u64>,
    pub mcmc_thin: Option<u64>,
    pub tilt: Tilt,
    pub cell_budget_secs: u64,
}

impl ExperimentConfig {
    pub fn new(experiment: &str) -> Self {
        ExperimentConfig {
            experiment: experiment.to_string(),
            n_list: Vec::new(),
            m_rules: vec![MRule::Linear(1.0)],
            replicates: DEFAULT_REPLICATES,
            seed: 0,
            method: Method::Exact,
            out: None,
            format: Format::Csv,
            mcmc_burn_in: None,
            mcmc_thin: None,
            tilt: Tilt::Auto,
            cell_budget_secs: DEFAULT_CELL_BUDGET.as_secs(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.n_list.is_empty() {
            return Err(Error::Config("empty n list".into()));
        }
        if self.n_list.contains(&0) {
            return Err(Error::Config("n must be positive".into()));
        }
        if self.m_rules.is_empty() {
            return Err(Error::Config("empty m rule list".into()));
        }
        self.sampler().validate()
    }

    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig {
            seed: self.seed,
            method: self.method,
            mcmc_burn_in: self.mcmc_burn_in,
            mcmc_thin: self.mcmc_thin,
            tilt: self.tilt,
            ..SamplerConfig::default()
        }
    }

    /// Applies `key = value` lines; `#` starts a comment. Unknown keys are an
    /// error.
    pub fn apply_flat(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Config(format!("bad value {v:?} for {key}")))
        }
        match key {
            "experiment" => self.experiment = value.to_string(),
            "n" => {
                self.n_list = value
                    .split(',')
                    .map(|s| num::<usize>(key, s.trim()))
                    .collect::<Result<_>>()?
            }
            "m" => {
                self.m_rules = value
                    .split(',')
                    .map(|s| s.trim().parse())
                    .collect::<Result<_>>()?
            }
            "replicates" => self.replicates = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "method" => self.method = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            "burn_in" => self.mcmc_burn_in = Some(num(key, value)?),
            "thin" => self.mcmc_thin = Some(num(key, value)?),
            "tilt" => {
                self.tilt = if value == "auto" { Tilt::Auto } else { Tilt::Fixed(num(key, value)?) }
            }
            "cell_budget_secs" => self.cell_budget_secs = num(key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }
}

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Missing,
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Float(v) if v.is_finite() => format!("{v}"),
            Value::Float(v) => v.to_string(),
            Value::Text(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
            Value::Missing => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Int(v) => Some(v as f64),
            Value::Float(v) => Some(v),
            _ => None,
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Int(v) => s.serialize_i64(*v),
            Value::Float(v) if v.is_finite() => s.serialize_f64(*v),
            Value::Text(t) => s.serialize_str(t),
            Value::Bool(b) => s.serialize_bool(*b),
            _ => s.serialize_none(),
        }
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}
impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}
impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}
impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}
impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}
impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}
impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Missing, Into::into)
    }
}

/// Rows of named cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

struct JsonRow<'a>(&'a [String], &'a [Value]);

impl Serialize for JsonRow<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of one column, in row order.
    pub fn values(&self, name: &str) -> Vec<&Value> {
        let i = self.column(name).expect("known column");
        self.rows.iter().map(|r| &r[i]).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Value::render))?;
        }
        w.flush()?;
        Ok(())
    }

    /// JSON lines, keys in column order.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for row in &self.rows {
            serde_json::to_writer(&mut out, &JsonRow(&self.columns, row))?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_jsonl(out),
        }
    }

    pub fn to_bytes(&self, format: Format) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write(format, &mut buf)?;
        Ok(buf)
    }
}

/// Outcome of one experiment run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub table: Table,
    pub wall_time: Duration,
    pub version: &'static str,
    pub seed: u64,
}

impl RunRecord {
    fn new(config: &ExperimentConfig, table: Table, started: Instant) -> Self {
        RunRecord {
            config: config.clone(),
            table,
            wall_time: started.elapsed(),
            version: env!("CARGO_PKG_VERSION"),
            seed: config.seed,
        }
    }

    /// Writes the table to `config.out`, or to `fallback` when unset.
    pub fn write_output<W: Write>(&self, fallback: W) -> Result<()> {
        match &self.config.out {
            Some(path) => {
                let file = std::fs::File::create(path)?;
                self.table.write(self.config.format, std::io::BufWriter::new(file))
            }
            None => self.table.write(self.config.format, fallback),
        }
    }
}

fn provenance(n: usize, m: impl Into<Value>, seed: u64, method: &str) -> Vec<Value> {
    vec![n.into(), m.into(), seed.into(), method.into()]
}

const PROVENANCE: [&str; 4] = ["n", "m", "seed", "method"];

fn table_with(extra: &[&str]) -> Table {
    let mut cols: Vec<&str> = PROVENANCE.to_vec();
    cols.extend_from_slice(extra);
    Table::new(&cols)
}

/// Per-diagram statistics for one `(n, m)` cell, or the reason it was
/// skipped.
fn cell_stats(
    n: usize,
    m: usize,
    cfg: &ExperimentConfig,
) -> std::result::Result<Vec<DiagramStats>, String> {
    let started = Instant::now();
    let batch = sample(n, m, cfg.replicates, &cfg.sampler()).map_err(|e| e.to_string())?;
    let stats: Vec<DiagramStats> = batch.diagrams.par_iter().map(diagram_stats).collect();
    if started.elapsed() > Duration::from_secs(cfg.cell_budget_secs) {
        return Err(format!(
            "exceeded the {} s cell budget",
            cfg.cell_budget_secs
        ));
    }
    Ok(stats)
}

fn cells(cfg: &ExperimentConfig) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for &n in &cfg.n_list {
        for rule in &cfg.m_rules {
            out.push((n, rule.resolve(n)));
        }
    }
    out
}

/// Nearest-rank quantile of a sorted slice.
pub fn quantile(sorted: &[usize], q: f64) -> usize {
    if sorted.is_empty() {
        return 0;
    }
    let rank = (q * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

/// Largest-component statistics per `(n, m)` cell.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<RunRecord> {
    cfg.validate()?;
    let started = Instant::now();
    let mut table = table_with(&[
        "status",
        "samples",
        "mean_chord_fraction",
        "mean_crossing_fraction",
        "mean_largest",
        "p95_largest",
        "max_largest",
        "log_envelope",
        "fraction_within_envelope",
        "mean_isolated",
    ]);
    for (n, m) in cells(cfg) {
        let mut row = provenance(n, m, cfg.seed, cfg.method.name());
        match cell_stats(n, m, cfg) {
            Err(reason) => {
                row.push(format!("skipped: {reason}").into());
                row.extend(std::iter::repeat(Value::Missing).take(9));
            }
            Ok(stats) => {
                let k = stats.len() as f64;
                let mut largest: Vec<usize> = stats.iter().map(|s| s.largest_nu).collect();
                largest.sort_unstable();
                let envelope = 10.0 * (n as f64).ln();
                let within = largest.iter().filter(|&&v| v as f64 <= envelope).count();
                let chord = stats.iter().map(|s| s.largest_nu as f64 / n as f64).sum::<f64>() / k;
                let crossing = (m > 0).then(|| {
                    stats.iter().map(|s| s.largest_mu as f64 / m as f64).sum::<f64>() / k
                });
                let mean_largest = largest.iter().sum::<usize>() as f64 / k;
                let isolated = stats.iter().map(|s| s.isolated as f64).sum::<f64>() / k;
                row.extend([
                    "ok".into(),
                    stats.len().into(),
                    chord.into(),
                    crossing.into(),
                    mean_largest.into(),
                    quantile(&largest, 0.95).into(),
                    largest.last().copied().unwrap_or(0).into(),
                    envelope.into(),
                    (within as f64 / k).into(),
                    isolated.into(),
                ]);
            }
        }
        table.push(row);
    }
    Ok(RunRecord::new(cfg, table, started))
}

/// Cut-count histogram against the limiting law, one row per count value.
pub fn run_cutdist(cfg: &ExperimentConfig) -> Result<RunRecord> {
    cfg.validate()?;
    let started = Instant::now();
    let mut table =
        table_with(&["status", "samples", "q", "p", "tv_distance", "j", "empirical", "theoretical"]);
    for (n, m) in cells(cfg) {
        let base = provenance(n, m, cfg.seed, cfg.method.name());
        let stats = match cell_stats(n, m, cfg) {
            Ok(s) => s,
            Err(reason) => {
                let mut row = base;
                row.push(format!("skipped: {reason}").into());
                row.extend(std::iter::repeat(Value::Missing).take(7));
                table.push(row);
                continue;
            }
        };
        let q = m as f64 / (m + n) as f64;
        let law = cut_law(q)?;
        let emp: EmpiricalDistribution = stats.iter().map(|s| s.cuts).collect();
        let tv = emp.tv_distance(|j| law.pmf(j))?;
        let top = emp.max_value().unwrap_or(0);
        for j in 0..=top {
            let mut row = base.clone();
            row.extend([
                "ok".into(),
                stats.len().into(),
                q.into(),
                law.p.into(),
                tv.into(),
                j.into(),
                emp.frequency(j).into(),
                law.pmf(j).into(),
            ]);
            table.push(row);
        }
    }
    Ok(RunRecord::new(cfg, table, started))
}

/// Connectivity of uniform matchings (no crossing constraint); one row per
/// isolated-chord count.
pub fn run_connectivity(cfg: &ExperimentConfig) -> Result<RunRecord> {
    cfg.validate()?;
    let started = Instant::now();
    let mut table = table_with(&[
        "samples",
        "connected_fraction",
        "monolithic_fraction",
        "isolated_mean",
        "k",
        "isolated_frequency",
        "poisson_pmf",
    ]);
    for &n in &cfg.n_list {
        let draws: Vec<(bool, bool, usize)> = (0..cfg.replicates as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(cfg.seed, i);
                let s = component_summary(&random_matching(n, &mut rng));
                (s.is_connected(), is_monolithic(&s), s.isolated)
            })
            .collect();
        let k = draws.len() as f64;
        let connected = draws.iter().filter(|d| d.0).count() as f64 / k;
        let monolithic = draws.iter().filter(|d| d.1).count() as f64 / k;
        let isolated: EmpiricalDistribution = draws.iter().map(|d| d.2).collect();
        let mut poisson = (-1.0f64).exp();
        for j in 0..=isolated.max_value().unwrap_or(0) {
            let mut row = provenance(n, "any", cfg.seed, "uniform");
            row.extend([
                draws.len().into(),
                connected.into(),
                monolithic.into(),
                isolated.mean().into(),
                j.into(),
                isolated.frequency(j).into(),
                poisson.into(),
            ]);
            table.push(row);
            poisson /= (j + 1) as f64;
        }
    }
    Ok(RunRecord::new(cfg, table, started))
}

/// Exact and asymptotic `ln T(n, m)` side by side, with the bounds and the
/// two series residuals at `q = m / (m + n)`.
pub fn run_asym_table(cfg: &ExperimentConfig) -> Result<RunRecord> {
    cfg.validate()?;
    let started = Instant::now();
    let mut table = table_with(&[
        "q",
        "exact_log",
        "asymptotic_log",
        "ratio",
        "advisory",
        "lower_log",
        "upper_log",
        "jacobi_residual",
        "freiman_residual",
    ]);
    for (n, m) in cells(cfg) {
        let q = m as f64 / (m + n) as f64;
        let exact = if m <= max_crossings(n) { ln_big(&touchard_riordan(n, m)) } else { f64::NEG_INFINITY };
        let asym = asymptotic_t(n, m, 1)?;
        let bounds = bounds_t(n, m)?;
        let (lhs, rhs) = jacobi_sides(q)?;
        let freiman = if q > 0.0 {
            let (e, f) = euler_log(q)?;
            Some((e - f).abs())
        } else {
            None
        };
        let mut row = provenance(n, m, cfg.seed, "formula");
        row.extend([
            q.into(),
            exact.into(),
            asym.ln_value.into(),
            (exact - asym.ln_value).exp().into(),
            asym.advisory.into(),
            bounds.lower_log.into(),
            bounds.upper_log.into(),
            (lhs - rhs).abs().into(),
            freiman.into(),
        ]);
        table.push(row);
    }
    Ok(RunRecord::new(cfg, table, started))
}

/// Options for [`run_validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidateOptions {
    pub max_n: usize,
    /// Adds one to a single DP value to check that mismatches are caught.
    pub inject_fault: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { max_n: 7, inject_fault: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidateReport {
    pub checks: Vec<(String, bool)>,
    pub failure: Option<String>,
    pub rows: usize,
}

impl ValidateReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn summary(&self) -> String {
        match &self.failure {
            None => format!("PASS, 3 algorithms agree on {} rows", self.rows),
            Some(f) => format!("FAIL, {f}"),
        }
    }
}

/// Cross-checks brute force, the closed form and the DP row by row, then
/// row sums, connected counts and the component identity.
pub fn run_validate(opts: ValidateOptions) -> Result<ValidateReport> {
    let max_n = opts.max_n.min(BRUTE_ROW_CAP);
    let mut report = ValidateReport { checks: Vec::new(), failure: None, rows: 0 };
    fn fail(report: &mut ValidateReport, what: String) {
        if report.failure.is_none() {
            report.failure = Some(what.clone());
        }
        report.checks.push((what, false));
    }
    for n in 1..=max_n {
        let brute = brute_force_row(n)?;
        let mut ok = true;
        for m in 0..=max_crossings(n) {
            let riordan = touchard_riordan(n, m);
            let mut dp = dp_count(n, m)?.0;
            if opts.inject_fault && n == max_n && m == 1 {
                dp += 1u32;
            }
            let b = brute.get(m);
            if b != riordan || b != dp {
                fail(
                    &mut report,
                    format!("mismatch at (n, m) = ({n}, {m}): brute {b}, closed form {riordan}, dp {dp}"),
                );
                ok = false;
            }
        }
        if ok {
            report.rows += 1;
        }
        report.checks.push((format!("row n = {n}"), ok));
        let row = crossing_row(n);
        let sums = row.total() == total_diagrams(n)
            && row.get(0) == catalan(n)
            && row.get(max_crossings(n)) == BigUint::from(1u32);
        if !sums {
            fail(&mut report, format!("row invariants fail at n = {n}"));
        } else {
            report.checks.push((format!("row sums n = {n}"), true));
        }
    }
    let connected_max = max_n.min(7);
    let brute_conn = connected_table(connected_max)?;
    for nu in 1..=connected_max {
        let tree = connected_count_exact(nu, nu - 1)?;
        if tree != brute_conn[nu][nu - 1] {
            fail(&mut report, format!("tree count mismatch at nu = {nu}"));
        }
        if nu >= 3 && nu <= 6 {
            let uni = connected_count_exact(nu, nu)?;
            if uni != brute_conn[nu][nu] {
                fail(&mut report, format!("unicyclic count mismatch at nu = {nu}"));
            }
        }
    }
    report.checks.push((format!("connected counts nu <= {connected_max}"), report.failure.is_none()));
    let identity = component_identity_report(max_n.min(COMPONENT_IDENTITY_CAP))?;
    if let Some((n, m, _, _)) = identity.mismatch {
        fail(&mut report, format!("component identity fails at (n, m) = ({n}, {m})"));
    } else {
        report.checks.push(("component identity".into(), true));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_rules() {
        let r: MRule = "100".parse().unwrap();
        assert_eq!(r.resolve(7), 100);
        let r: MRule = "n/14".parse().unwrap();
        assert_eq!(r.resolve(1000), 71);
        assert_eq!(r.resolve(1400), 100);
        let r: MRule = "0.1*nlogn".parse().unwrap();
        assert_eq!(r.resolve(400), (0.1 * 400.0 * 400f64.ln()).floor() as usize);
        let r: MRule = "n".parse().unwrap();
        assert_eq!(r.resolve(33), 33);
        assert!("-1*n".parse::<MRule>().is_err());
        assert!("2*k".parse::<MRule>().is_err());
    }

    #[test]
    fn flat_config() {
        let mut c = ExperimentConfig::new("sweep");
        c.apply_flat("# comment\nn = 10, 20\nm = n/14, 3\nreplicates = 5\nseed=9\nformat = json\n")
            .unwrap();
        assert_eq!(c.n_list, vec![10, 20]);
        assert_eq!(c.m_rules.len(), 2);
        assert_eq!(c.replicates, 5);
        assert_eq!(c.format, Format::Json);
        assert!(c.apply_flat("bogus = 1").is_err());
        assert!(c.apply_flat("replicates = 0").is_ok());
        assert!(c.validate().is_err());
    }

    #[test]
    fn validate_passes_and_catches_faults() {
        let r = run_validate(ValidateOptions::default()).unwrap();
        assert_eq!(r.summary(), "PASS, 3 algorithms agree on 7 rows");
        let r = run_validate(ValidateOptions { max_n: 5, inject_fault: false }).unwrap();
        assert!(r.passed() && r.rows == 5);
        let r = run_validate(ValidateOptions { max_n: 5, inject_fault: true }).unwrap();
        assert!(!r.passed());
        assert!(r.summary().contains("(n, m) = (5, 1)"));
    }

    #[test]
    fn trivial_sweep_cell() {
        let mut c = ExperimentConfig::new("sweep");
        c.n_list = vec![1];
        c.m_rules = vec![MRule::Absolute(0)];
        c.replicates = 3;
        let rec = run_sweep(&c).unwrap();
        assert_eq!(rec.table.values("max_largest"), vec![&Value::Int(1)]);
        assert_eq!(rec.table.values("mean_crossing_fraction"), vec![&Value::Missing]);
    }

    #[test]
    fn single_sample_cutdist() {
        let mut c = ExperimentConfig::new("cutdist");
        c.n_list = vec![20];
        c.m_rules = vec![MRule::Absolute(10)];
        c.replicates = 1;
        let rec = run_cutdist(&c).unwrap();
        let tv = rec.table.values("tv_distance")[0].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&tv));
    }

    #[test]
    fn asym_table_zero_column() {
        let mut c = ExperimentConfig::new("asym");
        c.n_list = vec![12];
        c.m_rules = vec![MRule::Absolute(0)];
        let rec = run_asym_table(&c).unwrap();
        let e = rec.table.values("exact_log")[0].as_f64().unwrap();
        let a = rec.table.values("asymptotic_log")[0].as_f64().unwrap();
        assert!((e - a).abs() < 1e-9);
        assert!((e - 208012f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn outputs_are_deterministic() {
        let mut c = ExperimentConfig::new("sweep");
        c.n_list = vec![30, 40];
        c.m_rules = vec!["n".parse().unwrap()];
        c.replicates = 8;
        c.seed = 5;
        let a = run_sweep(&c).unwrap().table.to_bytes(Format::Csv).unwrap();
        let b = run_sweep(&c).unwrap().table.to_bytes(Format::Csv).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("n,m,seed,method,status,"));
    }
}

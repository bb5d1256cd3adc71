//! Command-line plumbing for the `eisenrest` binary: configuration,
//! output records, grid parsing, sweep serialization, and the command
//! implementations.
//!
//! Every command produces an [`OutputRecord`] (schema version "1",
//! shipped in `schema/output_record.schema.json`) that serializes
//! losslessly, plus an exit status: 0 on success, 1 on computation
//! errors (with a machine-readable `error` token in the record), 2 on
//! flag or configuration errors.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use eisenrest_core::arithmetic::bq;
use eisenrest_core::eisenstein::{eval_star, EisensteinParams};
use eisenrest_core::experiments::{
    find_sign_change, run_check_suite, sweep_with_threads, thread_count, CheckSuite, SweepRow,
};
use eisenrest_core::restriction::{i_psi, main_term, TestFunction};

/// Exact sweep column header, fixed by the output contract.
pub const SWEEP_HEADER: &str = "x,T,a,q,theta,bq,I_psi,main_term,ratio,quad_err";

/// Errors surfaced by the CLI layer, split by exit status.
#[derive(Debug)]
pub enum CliError {
    /// Malformed flags, grids, or configuration: exit 2.
    Flag(String),
    /// A computation error from the numerics: exit 1.
    Compute(eisenrest_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Flag(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Flag(msg) => write!(f, "{msg}"),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Output formats.  `text` and `json` shape the record printed to
/// stdout; `csv` and `jsonl` shape the sweep's row file (a sweep using
/// `text`/`json` writes CSV rows, the default).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
    Jsonl,
}

impl Format {
    pub fn parse(name: &str) -> Result<Format, CliError> {
        match name {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(CliError::Flag(format!(
                "unknown format {other:?} (expected text, json, csv, or jsonl)"
            ))),
        }
    }
}

/// Configuration file contents (JSON, loaded from `--config PATH`).
/// Every field is optional; command-line flags override file values.
/// Unknown keys are a hard error.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Fallback spectral parameter when a command omits `--T`.
    #[serde(rename = "T_default")]
    pub t_default: Option<f64>,
    /// Evaluation tolerance, in `[1e-12, 1e-3]`.
    pub tol: Option<f64>,
    /// Segment bottom (default 1).
    pub alpha: Option<f64>,
    /// Segment top (default 3).
    pub beta: Option<f64>,
    /// Base quadrature node count (default 512).
    pub quad_points: Option<usize>,
    /// Exponent `e` in the denominator cap rule `Q = T^e` (default 1/4).
    pub q_exponent: Option<f64>,
    /// Sweep worker count (the `EISENREST_THREADS` variable bounds it).
    pub thread_count: Option<usize>,
    /// Default output format token.
    pub format: Option<String>,
}

impl Config {
    /// Load and validate a config file.
    pub fn load(path: &Path) -> Result<Config, CliError> {
        let raw = fs::read_to_string(path)
            .map_err(|e| CliError::Flag(format!("cannot read config {}: {e}", path.display())))?;
        let config: Config = serde_json::from_str(&raw)
            .map_err(|e| CliError::Flag(format!("invalid config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    /// Check every present field against the domain its consumer
    /// declares, so bad configuration fails before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Flag(format!("invalid config: {msg}")));
        if let Some(t) = self.t_default {
            if !t.is_finite() || !(1.0..=1e3).contains(&t) {
                return bad(format!("T_default = {t} outside [1, 1e3]"));
            }
        }
        if let Some(tol) = self.tol {
            if !tol.is_finite() || !(1e-12..=1e-3).contains(&tol) {
                return bad(format!("tol = {tol} outside [1e-12, 1e-3]"));
            }
        }
        if let Some(alpha) = self.alpha {
            if !alpha.is_finite() || alpha < 1e-3 {
                return bad(format!("alpha = {alpha} below 1e-3"));
            }
        }
        if let Some(beta) = self.beta {
            let floor = self.alpha.unwrap_or(1e-3);
            if !beta.is_finite() || beta <= floor {
                return bad(format!("beta = {beta} not above alpha"));
            }
        }
        if self.quad_points == Some(0) {
            return bad("quad_points = 0".into());
        }
        if let Some(e) = self.q_exponent {
            if !e.is_finite() || e <= 0.0 || e > 1.0 {
                return bad(format!("q_exponent = {e} outside (0, 1]"));
            }
        }
        if self.thread_count == Some(0) {
            return bad("thread_count = 0".into());
        }
        if let Some(ref name) = self.format {
            Format::parse(name).map_err(|e| CliError::Flag(format!("invalid config: {e}")))?;
        }
        Ok(())
    }
}

/// One record per command invocation.  The schema is stable: version
/// "1", command token, an echo of the resolved inputs, a results
/// object, a residuals object (numeric error estimates only), and an
/// optional machine-readable error token.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputRecord {
    pub schema_version: String,
    pub command: String,
    pub inputs: Map<String, Value>,
    pub results: Map<String, Value>,
    pub residuals: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl OutputRecord {
    pub fn new(command: &str, inputs: Map<String, Value>) -> OutputRecord {
        OutputRecord {
            schema_version: "1".to_string(),
            command: command.to_string(),
            inputs,
            results: Map::new(),
            residuals: Map::new(),
            error: None,
        }
    }
}

/// Insert a float, refusing the non-finite values JSON cannot carry.
fn put(map: &mut Map<String, Value>, key: &str, value: f64) {
    if value.is_finite() {
        map.insert(key.to_string(), Value::from(value));
    } else {
        map.insert(key.to_string(), Value::Null);
    }
}

/// Parse a `lo:hi:step` grid: inclusive of `lo`, then `lo + k*step`
/// while the value stays below `hi + step/2` — the half-step guard
/// keeps an endpoint that lands on the grid despite rounding drift.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Flag(format!(
            "grid {spec:?} must be lo:hi:step"
        )));
    }
    let mut nums = [0.0f64; 3];
    for (slot, part) in nums.iter_mut().zip(&parts) {
        *slot = part.parse().map_err(|_| {
            CliError::Flag(format!("grid {spec:?}: {part:?} is not a number"))
        })?;
    }
    let [lo, hi, step] = nums;
    if !lo.is_finite() || !hi.is_finite() || !step.is_finite() || step <= 0.0 {
        return Err(CliError::Flag(format!(
            "grid {spec:?} needs finite bounds and step > 0"
        )));
    }
    if hi < lo {
        return Err(CliError::Flag(format!("grid {spec:?} is empty (hi < lo)")));
    }
    let count = ((hi - lo) / step).round() + 1.0;
    if count > 1e6 {
        return Err(CliError::Flag(format!(
            "grid {spec:?} would have {count:.0} points (cap 1e6)"
        )));
    }
    let mut values = Vec::new();
    let mut k = 0u64;
    loop {
        let v = lo + k as f64 * step;
        if v >= hi + 0.5 * step {
            break;
        }
        values.push(v);
        k += 1;
    }
    Ok(values)
}

/// Format a float at 17 significant digits ('.' decimal separator),
/// enough to reproduce the binary value exactly.
pub fn fmt_sig17(v: f64) -> String {
    format!("{v:.16e}")
}

/// RFC-4180-style quoting: wrap in double quotes (doubling any inner
/// quote) only when the field contains a comma, quote, or newline.
pub fn csv_field(raw: &str) -> String {
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') || raw.contains('\r') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

/// One CSV data line for a sweep row.  Failed rows carry the error
/// token in the `quad_err` column and leave uncomputed columns empty.
pub fn sweep_row_csv(row: &SweepRow) -> String {
    let num = |v: f64| if v.is_nan() { String::new() } else { fmt_sig17(v) };
    let mut fields: Vec<String> = vec![fmt_sig17(row.x), fmt_sig17(row.t)];
    if row.theta.is_nan() {
        fields.extend([String::new(), String::new(), String::new()]);
    } else {
        fields.push(row.a.to_string());
        fields.push(row.q.to_string());
        fields.push(fmt_sig17(row.theta));
    }
    fields.push(num(row.bq_value));
    fields.push(num(row.i_value));
    fields.push(num(row.main_value));
    fields.push(num(row.ratio));
    fields.push(match row.error {
        Some(token) => token.to_string(),
        None => num(row.quad_err),
    });
    let quoted: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
    quoted.join(",")
}

/// One JSON-lines object for a sweep row: same keys as the CSV header,
/// `null` for uncomputed fields, plus an `error` token when present.
pub fn sweep_row_jsonl(row: &SweepRow) -> String {
    let mut obj = Map::new();
    put(&mut obj, "x", row.x);
    put(&mut obj, "T", row.t);
    if row.theta.is_nan() {
        obj.insert("a".into(), Value::Null);
        obj.insert("q".into(), Value::Null);
        obj.insert("theta".into(), Value::Null);
    } else {
        obj.insert("a".into(), Value::from(row.a));
        obj.insert("q".into(), Value::from(row.q));
        put(&mut obj, "theta", row.theta);
    }
    put(&mut obj, "bq", row.bq_value);
    put(&mut obj, "I_psi", row.i_value);
    put(&mut obj, "main_term", row.main_value);
    put(&mut obj, "ratio", row.ratio);
    put(&mut obj, "quad_err", row.quad_err);
    if let Some(token) = row.error {
        obj.insert("error".into(), Value::from(token));
    }
    Value::Object(obj).to_string()
}

/// Resolved per-invocation settings (defaults, then config file, then
/// flags; the caller applies flag overrides before construction).
#[derive(Debug, Clone)]
pub struct Settings {
    pub tol: f64,
    pub alpha: f64,
    pub beta: f64,
    pub quad_points: usize,
    pub q_exponent: f64,
    pub t_default: Option<f64>,
    pub config_threads: Option<usize>,
    pub format: Format,
}

impl Default for Settings {
    fn default() -> Settings {
        Settings {
            tol: 1e-9,
            alpha: 1.0,
            beta: 3.0,
            quad_points: 512,
            q_exponent: 0.25,
            t_default: None,
            config_threads: None,
            format: Format::Text,
        }
    }
}

impl Settings {
    /// Layer a validated config file over the defaults.
    pub fn from_config(config: &Config) -> Result<Settings, CliError> {
        let mut s = Settings::default();
        if let Some(t) = config.t_default {
            s.t_default = Some(t);
        }
        if let Some(tol) = config.tol {
            s.tol = tol;
        }
        if let Some(alpha) = config.alpha {
            s.alpha = alpha;
        }
        if let Some(beta) = config.beta {
            s.beta = beta;
        }
        if let Some(n) = config.quad_points {
            s.quad_points = n;
        }
        if let Some(e) = config.q_exponent {
            s.q_exponent = e;
        }
        if let Some(n) = config.thread_count {
            s.config_threads = Some(n);
        }
        if let Some(ref name) = config.format {
            s.format = Format::parse(name)?;
        }
        Ok(s)
    }

    /// Test function for the resolved segment.
    pub fn test_function(&self) -> Result<TestFunction, CliError> {
        let mut tf = TestFunction::bump(self.alpha, self.beta).map_err(CliError::Compute)?;
        tf.quad_points = self.quad_points;
        Ok(tf)
    }

    /// Denominator cap `Q = T^e` unless overridden.
    pub fn q_cap(&self, t: f64, explicit: Option<f64>) -> f64 {
        explicit.unwrap_or_else(|| t.powf(self.q_exponent))
    }

    /// Worker count: the `EISENREST_THREADS` variable bounds whatever
    /// the config asks for; absence of both means 1.
    pub fn threads(&self) -> Result<usize, CliError> {
        let env = thread_count().map_err(|e| CliError::Flag(e.to_string()))?;
        Ok(match self.config_threads {
            Some(n) if std::env::var("EISENREST_THREADS").is_ok() => n.min(env),
            Some(n) => n,
            None => env,
        })
    }
}

/// Wrap a computation's maps into a record, mapping a failure to the
/// machine-readable error token plus exit status 1.
fn finish<F>(mut record: OutputRecord, body: F) -> (OutputRecord, i32)
where
    F: FnOnce(&mut OutputRecord) -> eisenrest_core::Result<()>,
{
    match body(&mut record) {
        Ok(()) => (record, 0),
        Err(e) => {
            record.error = Some(e.token().to_string());
            record
                .results
                .insert("error_detail".into(), Value::from(e.to_string()));
            (record, 1)
        }
    }
}

/// `eval --x --y --T`: one point value of the completed series.
pub fn cmd_eval(x: f64, y: f64, t: f64, settings: &Settings) -> (OutputRecord, i32) {
    let mut inputs = Map::new();
    put(&mut inputs, "x", x);
    put(&mut inputs, "y", y);
    put(&mut inputs, "T", t);
    put(&mut inputs, "tol", settings.tol);
    let record = OutputRecord::new("eval", inputs);
    let tol = settings.tol;
    finish(record, |record| {
        let params = EisensteinParams::with_tol(t, tol)?;
        let eval = eval_star(x, y, &params)?;
        put(&mut record.results, "value", eval.value);
        record
            .results
            .insert("terms_used".into(), Value::from(eval.terms_used));
        put(&mut record.residuals, "tail_bound", eval.tail_bound);
        Ok(())
    })
}

/// `restrict --x --T`: restricted mass along the configured segment.
pub fn cmd_restrict(x: f64, t: f64, settings: &Settings) -> Result<(OutputRecord, i32), CliError> {
    let tf = settings.test_function()?;
    let mut inputs = Map::new();
    put(&mut inputs, "x", x);
    put(&mut inputs, "T", t);
    put(&mut inputs, "alpha", tf.alpha);
    put(&mut inputs, "beta", tf.beta);
    inputs.insert("quad_points".into(), Value::from(tf.quad_points as u64));
    put(&mut inputs, "tol", settings.tol);
    let record = OutputRecord::new("restrict", inputs);
    let tol = settings.tol;
    Ok(finish(record, |record| {
        let params = EisensteinParams::with_tol(t, tol)?;
        let mass = i_psi(x, &tf, &params)?;
        put(&mut record.results, "value", mass.value);
        put(&mut record.residuals, "quad_error_est", mass.quad_error_est);
        put(
            &mut record.residuals,
            "eisenstein_tail_max",
            mass.eisenstein_tail_max,
        );
        Ok(())
    }))
}

/// `main-term --x --T`: expected mass with the arithmetic correction.
pub fn cmd_main_term(
    x: f64,
    t: f64,
    q_cap: Option<f64>,
    settings: &Settings,
) -> Result<(OutputRecord, i32), CliError> {
    let tf = settings.test_function()?;
    let q_cap = settings.q_cap(t, q_cap);
    let mut inputs = Map::new();
    put(&mut inputs, "x", x);
    put(&mut inputs, "T", t);
    put(&mut inputs, "Q", q_cap);
    put(&mut inputs, "alpha", tf.alpha);
    put(&mut inputs, "beta", tf.beta);
    let record = OutputRecord::new("main-term", inputs);
    Ok(finish(record, |record| {
        let term = main_term(x, t, &tf, q_cap)?;
        put(&mut record.results, "value", term.value);
        put(&mut record.results, "bq", term.bq_value);
        record
            .results
            .insert("a".into(), Value::from(term.approx.a));
        record
            .results
            .insert("q".into(), Value::from(term.approx.q));
        put(&mut record.results, "theta", term.approx.theta);
        Ok(())
    }))
}

/// `compare --x --T`: one sweep row (restricted mass, main term, ratio).
pub fn cmd_compare(
    x: f64,
    t: f64,
    q_cap: Option<f64>,
    settings: &Settings,
) -> Result<(OutputRecord, i32), CliError> {
    let tf = settings.test_function()?;
    let q_cap = settings.q_cap(t, q_cap);
    let mut inputs = Map::new();
    put(&mut inputs, "x", x);
    put(&mut inputs, "T", t);
    put(&mut inputs, "Q", q_cap);
    put(&mut inputs, "alpha", tf.alpha);
    put(&mut inputs, "beta", tf.beta);
    put(&mut inputs, "tol", settings.tol);
    let mut record = OutputRecord::new("compare", inputs);
    let rows = sweep_with_threads(&[x], &[t], &tf, |_| q_cap, settings.tol, 1, |_| {})
        .map_err(CliError::Compute)?;
    let row = &rows[0];
    put(&mut record.results, "x", row.x);
    put(&mut record.results, "T", row.t);
    if !row.theta.is_nan() {
        record.results.insert("a".into(), Value::from(row.a));
        record.results.insert("q".into(), Value::from(row.q));
    } else {
        record.results.insert("a".into(), Value::Null);
        record.results.insert("q".into(), Value::Null);
    }
    put(&mut record.results, "theta", row.theta);
    put(&mut record.results, "bq", row.bq_value);
    put(&mut record.results, "I_psi", row.i_value);
    put(&mut record.results, "main_term", row.main_value);
    put(&mut record.results, "ratio", row.ratio);
    put(&mut record.residuals, "quad_err", row.quad_err);
    if let Some(token) = row.error {
        record.error = Some(token.to_string());
        return Ok((record, 1));
    }
    Ok((record, 0))
}

/// `signchange --x --T`: bracket sign changes on the segment.
pub fn cmd_signchange(
    x: f64,
    t: f64,
    resolution: f64,
    settings: &Settings,
) -> Result<(OutputRecord, i32), CliError> {
    let mut inputs = Map::new();
    put(&mut inputs, "x", x);
    put(&mut inputs, "T", t);
    put(&mut inputs, "alpha", settings.alpha);
    put(&mut inputs, "beta", settings.beta);
    put(&mut inputs, "resolution", resolution);
    put(&mut inputs, "tol", settings.tol);
    let record = OutputRecord::new("signchange", inputs);
    let (alpha, beta, tol) = (settings.alpha, settings.beta, settings.tol);
    Ok(finish(record, |record| {
        let params = EisensteinParams::with_tol(t, tol)?;
        let report = find_sign_change(x, alpha, beta, resolution, &params)?;
        let brackets: Vec<Value> = report
            .brackets
            .iter()
            .map(|b| {
                let mut obj = Map::new();
                put(&mut obj, "y_lo", b.y_lo);
                put(&mut obj, "y_hi", b.y_hi);
                put(&mut obj, "value_lo", b.value_lo);
                put(&mut obj, "value_hi", b.value_hi);
                Value::Object(obj)
            })
            .collect();
        record
            .results
            .insert("brackets".into(), Value::Array(brackets));
        record.results.insert(
            "bracket_count".into(),
            Value::from(report.brackets.len() as u64),
        );
        record
            .results
            .insert("evaluations".into(), Value::from(report.evaluations));
        Ok(())
    }))
}

/// `bq --q --T [--s]`: one arithmetic factor value.
pub fn cmd_bq(q: u64, t: f64, s: f64) -> (OutputRecord, i32) {
    let mut inputs = Map::new();
    inputs.insert("q".into(), Value::from(q));
    put(&mut inputs, "T", t);
    put(&mut inputs, "s", s);
    let record = OutputRecord::new("bq", inputs);
    finish(record, |record| {
        let value = bq(q, t, s)?;
        put(&mut record.results, "value", value);
        Ok(())
    })
}

/// `check --suite NAME`: run an invariant suite; exit 1 iff it fails.
pub fn cmd_check(suite_name: &str) -> Result<(OutputRecord, i32), CliError> {
    let suite = CheckSuite::parse(suite_name).ok_or_else(|| {
        CliError::Flag(format!(
            "unknown suite {suite_name:?} (expected mellin, parseval, modular, bessel_identity, bq, diagonal, or all)"
        ))
    })?;
    let mut inputs = Map::new();
    inputs.insert("suite".into(), Value::from(suite_name));
    let mut record = OutputRecord::new("check", inputs);
    let report = run_check_suite(suite);
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| {
            let mut obj = Map::new();
            obj.insert("name".into(), Value::from(c.name));
            put(&mut obj, "residual", c.residual);
            put(&mut obj, "threshold", c.threshold);
            obj.insert("pass".into(), Value::from(c.pass));
            Value::Object(obj)
        })
        .collect();
    record.results.insert("checks".into(), Value::Array(checks));
    record
        .results
        .insert("pass".into(), Value::from(report.pass));
    record.results.insert(
        "notes".into(),
        Value::Array(report.notes.iter().map(|n| Value::from(n.as_str())).collect()),
    );
    for c in &report.checks {
        if c.residual.is_finite() {
            put(&mut record.residuals, c.name, c.residual);
        }
    }
    Ok((record, if report.pass { 0 } else { 1 }))
}

/// Everything `sweep` needs beyond the shared settings.
#[derive(Debug, Clone)]
pub struct SweepArgs {
    pub x_grid: String,
    pub t_grid: String,
    pub out: String,
}

/// `sweep --x-grid --T-grid --out`: stream the comparison table to a
/// CSV or JSON-lines file.  Per-row failures leave their token in the
/// row and do not stop the sweep or fail the command.
pub fn cmd_sweep(args: &SweepArgs, settings: &Settings) -> Result<(OutputRecord, i32), CliError> {
    let x_grid = parse_grid(&args.x_grid)?;
    let t_grid = parse_grid(&args.t_grid)?;
    let tf = settings.test_function()?;
    let threads = settings.threads()?;
    let jsonl = settings.format == Format::Jsonl;
    let mut inputs = Map::new();
    inputs.insert("x_grid".into(), Value::from(args.x_grid.as_str()));
    inputs.insert("T_grid".into(), Value::from(args.t_grid.as_str()));
    inputs.insert("out".into(), Value::from(args.out.as_str()));
    inputs.insert(
        "format".into(),
        Value::from(if jsonl { "jsonl" } else { "csv" }),
    );
    put(&mut inputs, "alpha", tf.alpha);
    put(&mut inputs, "beta", tf.beta);
    put(&mut inputs, "q_exponent", settings.q_exponent);
    put(&mut inputs, "tol", settings.tol);
    inputs.insert("threads".into(), Value::from(threads as u64));
    let mut record = OutputRecord::new("sweep", inputs);
    let mut body = String::new();
    if !jsonl {
        body.push_str(SWEEP_HEADER);
        body.push('\n');
    }
    let q_exponent = settings.q_exponent;
    let rows = sweep_with_threads(
        &x_grid,
        &t_grid,
        &tf,
        |t| t.powf(q_exponent),
        settings.tol,
        threads,
        |row| {
            body.push_str(&if jsonl {
                sweep_row_jsonl(row)
            } else {
                sweep_row_csv(row)
            });
            body.push('\n');
        },
    )
    .map_err(CliError::Compute)?;
    fs::write(&args.out, body).map_err(|e| {
        CliError::Compute(eisenrest_core::Error::Domain {
            op: "sweep",
            detail: format!("cannot write {}: {e}", args.out),
        })
    })?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    record
        .results
        .insert("rows".into(), Value::from(rows.len() as u64));
    record
        .results
        .insert("failed".into(), Value::from(failed as u64));
    record
        .results
        .insert("out".into(), Value::from(args.out.as_str()));
    Ok((record, 0))
}

/// Render a record for stdout in the chosen format.
pub fn render(record: &OutputRecord, format: Format) -> String {
    match format {
        Format::Json => {
            let mut text =
                serde_json::to_string_pretty(record).expect("record serialization cannot fail");
            text.push('\n');
            text
        }
        _ => render_text(record),
    }
}

/// Human-readable rendering: one `key = value` line per result and
/// residual.  `check` gets PASS/FAIL lines and its notes; `signchange`
/// gets one line per bracket.
pub fn render_text(record: &OutputRecord) -> String {
    let mut out = String::new();
    match record.command.as_str() {
        "check" => {
            for check in record.results["checks"].as_array().into_iter().flatten() {
                let name = check["name"].as_str().unwrap_or("?");
                let pass = check["pass"].as_bool().unwrap_or(false);
                let residual = check["residual"]
                    .as_f64()
                    .map(|r| format!("{r:.3e}"))
                    .unwrap_or_else(|| "unavailable".to_string());
                let threshold = check["threshold"].as_f64().unwrap_or(f64::NAN);
                out.push_str(&format!(
                    "{} {name}: residual {residual} (threshold {threshold:.1e})\n",
                    if pass { "PASS" } else { "FAIL" },
                ));
            }
            for note in record.results["notes"].as_array().into_iter().flatten() {
                out.push_str(&format!("note: {}\n", note.as_str().unwrap_or("")));
            }
            let pass = record.results["pass"].as_bool().unwrap_or(false);
            out.push_str(&format!(
                "overall: {}\n",
                if pass { "PASS" } else { "FAIL" }
            ));
        }
        "signchange" => {
            for b in record.results["brackets"].as_array().into_iter().flatten() {
                out.push_str(&format!(
                    "sign change in [{}, {}]: value {} -> {}\n",
                    b["y_lo"], b["y_hi"], b["value_lo"], b["value_hi"]
                ));
            }
            out.push_str(&format!(
                "bracket_count = {}\nevaluations = {}\n",
                record.results["bracket_count"], record.results["evaluations"]
            ));
        }
        _ => {
            for (key, value) in &record.results {
                out.push_str(&format!("{key} = {value}\n"));
            }
            for (key, value) in &record.residuals {
                out.push_str(&format!("{key} = {value}\n"));
            }
        }
    }
    if let Some(ref token) = record.error {
        out.push_str(&format!("error = {token}\n"));
    }
    out
}

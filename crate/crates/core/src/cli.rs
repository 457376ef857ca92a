//! Command-line front end: `select`, `verify`, `montecarlo`, `quantile`.
//!
//! Exit codes: 0 success, 1 usage or invalid parameters, 2 data errors,
//! 3 failed equivalence verification. Floating-point output carries 17
//! significant digits.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::ser::{Error as _, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::ci_tests::{umpu_detail, verify_equivalence, EdgeDecision, Method, TestConfig};
use crate::distributions::{beta_sym_quantile, std_normal_quantile, NullCorrLaw};
use crate::error::Error;
use crate::estimators::{sample_covariance, Dataset};
use crate::graph::{edge_pairs, select_graph, ConcentrationGraph, Correction};
use crate::simulate::{equivalence_sweep, estimate_power, estimate_size, MethodRate, MonteCarloReport, PrecisionSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "concgraph",
    version,
    about = "Concentration graph selection by pairwise conditional-independence tests"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test every pair of variables in a CSV file and print the estimated graph.
    Select(SelectArgs),
    /// Check numerically that the UMPU and partial-correlation tests coincide.
    Verify(VerifyArgs),
    /// Estimate size or power by simulation.
    Montecarlo(MonteCarloArgs),
    /// Print critical values of the exact and Fisher tests.
    Quantile(QuantileArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Umpu,
    PartialCorr,
    Fisher,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Umpu => Method::Umpu,
            MethodArg::PartialCorr => Method::PartialCorr,
            MethodArg::Fisher => Method::Fisher,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CorrectionArg {
    None,
    Bonferroni,
    Holm,
}

impl From<CorrectionArg> for Correction {
    fn from(c: CorrectionArg) -> Self {
        match c {
            CorrectionArg::None => Correction::None,
            CorrectionArg::Bonferroni => Correction::Bonferroni,
            CorrectionArg::Holm => Correction::Holm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Tsv,
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let a: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if a > 0.0 && a < 1.0 {
        Ok(a)
    } else {
        Err(format!("alpha must lie strictly between 0 and 1, got {a}"))
    }
}

fn parse_edge(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected I,J, got {s:?}"))?;
    let i = a.trim().parse().map_err(|_| format!("bad index {a:?}"))?;
    let j = b.trim().parse().map_err(|_| format!("bad index {b:?}"))?;
    Ok((i, j))
}

#[derive(Debug, Args)]
struct SelectArgs {
    /// CSV file: header row of variable names, one observation per row.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "0.05", value_parser = parse_alpha)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "umpu")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "none")]
    correction: CorrectionArg,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Check every edge of this dataset instead of random instances.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Number of random instances.
    #[arg(long, default_value = "10000")]
    reps: u32,
    #[arg(long, default_value = "1")]
    seed: u64,
    /// Level for single-dataset mode; random instances draw their own.
    #[arg(long, default_value = "0.05", value_parser = parse_alpha)]
    alpha: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Negate the UMPU statistic before checking (negative control).
    #[arg(long, hide = true)]
    inject_sign_flip: bool,
}

#[derive(Debug, Args)]
struct MonteCarloArgs {
    /// Number of variables N.
    #[arg(long, default_value = "5")]
    dim: usize,
    /// Observations per replication.
    #[arg(long, default_value = "25")]
    n: usize,
    #[arg(long, default_value = "0.05", value_parser = parse_alpha)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "umpu")]
    method: MethodArg,
    #[arg(long, default_value = "10000")]
    reps: u32,
    #[arg(long, default_value = "1")]
    seed: u64,
    /// True partial correlation on the probed edge; 0 estimates size.
    #[arg(long, default_value = "0", allow_negative_numbers = true)]
    rho: f64,
    /// Probed edge as I,J (0-based).
    #[arg(long, default_value = "0,1", value_parser = parse_edge)]
    edge: (usize, usize),
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct QuantileArgs {
    #[arg(long, default_value = "0.05", value_parser = parse_alpha)]
    alpha: f64,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    /// Direct Be(m, m) quantile: probability.
    #[arg(long, requires = "shape")]
    prob: Option<f64>,
    /// Direct Be(m, m) quantile: shape m.
    #[arg(long, requires = "prob")]
    shape: Option<f64>,
}

/// A failure with its exit status.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DATA,
            message: message.into(),
        }
    }
}

/// Runs the CLI and returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Select(a) => cmd_select(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Montecarlo(a) => cmd_montecarlo(a, stdout),
        Command::Quantile(a) => cmd_quantile(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let mut f =
                File::create(path).map_err(|e| Failure::usage(format!("cannot create {}: {e}", path.display())))?;
            f.write_all(text.as_bytes())
                .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(format!("cannot write output: {e}"))),
    }
}

/// Reads a dataset: header row of names, comma-separated numeric rows, no missing values.
pub fn read_csv(path: &Path) -> Result<Dataset, String> {
    let file = File::open(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    read_csv_from(file)
}

pub fn read_csv_from<R: io::Read>(reader: R) -> Result<Dataset, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let names: Vec<String> = rdr
        .headers()
        .map_err(|e| format!("cannot read header: {e}"))?
        .iter()
        .map(str::to_string)
        .collect();
    if names.is_empty() || names.iter().all(String::is_empty) {
        return Err("empty header row".into());
    }
    let mut values = Vec::new();
    for (t, record) in rdr.records().enumerate() {
        let row = t + 1;
        let record = record.map_err(|e| format!("row {row}: {e}"))?;
        for (col, field) in record.iter().enumerate() {
            let name = &names[col];
            if field.is_empty() {
                return Err(format!("row {row}, column {} ({name}): missing value", col + 1));
            }
            let v: f64 = field
                .parse()
                .map_err(|_| format!("row {row}, column {} ({name}): non-numeric cell {field:?}", col + 1))?;
            if !v.is_finite() {
                return Err(format!(
                    "row {row}, column {} ({name}): non-finite value {field:?}",
                    col + 1
                ));
            }
            values.push(v);
        }
    }
    Dataset::new(names, values).map_err(|e| e.to_string())
}

/// Writes a dataset in the format [`read_csv`] accepts, with round-trip float formatting.
pub fn write_csv(d: &Dataset) -> String {
    let mut s = d.names().join(",");
    s.push('\n');
    for t in 0..d.n() {
        let row: Vec<String> = d.row(t).iter().map(|v| format!("{v:?}")).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn sig17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    RawValue::from_string(fmt17(*x)).map_err(S::Error::custom)?.serialize(s)
}

fn sig17_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => sig17(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Serialize)]
struct DecisionOut {
    i: usize,
    j: usize,
    #[serde(serialize_with = "sig17")]
    statistic: f64,
    #[serde(serialize_with = "sig17")]
    lower: f64,
    #[serde(serialize_with = "sig17")]
    upper: f64,
    #[serde(serialize_with = "sig17")]
    p_value: f64,
    #[serde(serialize_with = "sig17")]
    level: f64,
    reject: bool,
}

impl From<&EdgeDecision> for DecisionOut {
    fn from(d: &EdgeDecision) -> Self {
        Self {
            i: d.i,
            j: d.j,
            statistic: d.statistic,
            lower: d.lower,
            upper: d.upper,
            p_value: d.p_value,
            level: d.level,
            reject: d.reject,
        }
    }
}

#[derive(Serialize)]
struct EdgeOut<'a> {
    i: usize,
    j: usize,
    source: &'a str,
    target: &'a str,
}

#[derive(Serialize)]
struct GraphOut<'a> {
    n: usize,
    #[serde(rename = "N")]
    dim: usize,
    #[serde(serialize_with = "sig17")]
    alpha: f64,
    method: Method,
    correction: Correction,
    p_value_kind: &'static str,
    names: &'a [String],
    edges: Vec<EdgeOut<'a>>,
    decisions: Vec<DecisionOut>,
}

pub fn graph_to_json(g: &ConcentrationGraph) -> String {
    let out = GraphOut {
        n: g.n,
        dim: g.dim(),
        alpha: g.alpha,
        method: g.method,
        correction: g.correction,
        p_value_kind: if g.method.is_exact() { "exact" } else { "asymptotic" },
        names: &g.names,
        edges: g
            .edges
            .iter()
            .map(|&(i, j)| EdgeOut {
                i,
                j,
                source: &g.names[i],
                target: &g.names[j],
            })
            .collect(),
        decisions: g.decisions.iter().map(DecisionOut::from).collect(),
    };
    let mut s = serde_json::to_string_pretty(&out).expect("graph serializes");
    s.push('\n');
    s
}

fn dot_id(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn graph_to_dot(g: &ConcentrationGraph) -> String {
    let mut s = String::from("graph concentration {\n");
    for name in &g.names {
        let _ = writeln!(s, "  {};", dot_id(name));
    }
    for d in g.decisions.iter().filter(|d| d.reject) {
        let _ = writeln!(
            s,
            "  {} -- {} [statistic=\"{}\", p_value=\"{}\"];",
            dot_id(&g.names[d.i]),
            dot_id(&g.names[d.j]),
            fmt17(d.statistic),
            fmt17(d.p_value)
        );
    }
    s.push_str("}\n");
    s
}

pub fn graph_to_tsv(g: &ConcentrationGraph) -> String {
    let mut s = String::from("i\tj\tsource\ttarget\tstatistic\tlower\tupper\tp_value\tlevel\treject\n");
    for d in &g.decisions {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            d.i,
            d.j,
            g.names[d.i],
            g.names[d.j],
            fmt17(d.statistic),
            fmt17(d.lower),
            fmt17(d.upper),
            fmt17(d.p_value),
            fmt17(d.level),
            d.reject
        );
    }
    s
}

fn cmd_select(a: SelectArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let d = read_csv(&a.input).map_err(Failure::data)?;
    let cfg = TestConfig::new(a.alpha, a.method.into()).map_err(|e| Failure::usage(e.to_string()))?;
    let g = select_graph(&d, cfg, a.correction.into()).map_err(|e| Failure::data(e.to_string()))?;
    let text = match a.format {
        Format::Json => graph_to_json(&g),
        Format::Dot => graph_to_dot(&g),
        Format::Tsv => graph_to_tsv(&g),
    };
    emit(&a.out, &text, stdout)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SweepOut {
    instances: usize,
    edges_checked: usize,
    decision_disagreements: usize,
    raw_form_disagreements: usize,
    #[serde(serialize_with = "sig17")]
    max_statistic_gap: f64,
    #[serde(serialize_with = "sig17")]
    max_threshold_gap: f64,
    seed: u64,
    passed: bool,
}

fn cmd_verify(a: VerifyArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    if let Some(path) = &a.input {
        return verify_dataset(path, &a, stdout);
    }
    if a.reps == 0 {
        return Err(Failure::usage("--reps must be positive"));
    }
    let sum =
        equivalence_sweep(a.reps as usize, a.seed, a.inject_sign_flip).map_err(|e| Failure::usage(e.to_string()))?;
    let out = SweepOut {
        instances: sum.instances,
        edges_checked: sum.edges_checked,
        decision_disagreements: sum.decision_disagreements,
        raw_form_disagreements: sum.raw_form_disagreements,
        max_statistic_gap: sum.max_statistic_gap,
        max_threshold_gap: sum.max_threshold_gap,
        seed: sum.seed,
        passed: sum.passed,
    };
    let mut text = serde_json::to_string_pretty(&out).expect("summary serializes");
    text.push('\n');
    emit(&a.out, &text, stdout)?;
    Ok(if sum.passed { EXIT_OK } else { EXIT_VERIFY })
}

/// Side-by-side UMPU and partial-correlation quantities for every edge of one dataset.
fn verify_dataset(path: &Path, a: &VerifyArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let d = read_csv(path).map_err(Failure::data)?;
    NullCorrLaw::new(d.n(), d.dim()).map_err(|e| Failure::data(e.to_string()))?;
    let s = sample_covariance(&d);
    let mut text = String::from(
        "i\tj\tsource\ttarget\tt_umpu\tr_partial\tgap\tlower_2q_minus_1\tupper_1_minus_2q\tc_partial\ts_ij\traw_lower\traw_upper\treject_umpu\treject_partial\n",
    );
    let mut all_pass = true;
    for (i, j) in edge_pairs(d.dim()) {
        let fail = |e: Error| Failure::data(e.to_string());
        let mut v = verify_equivalence(&s, i, j, d.n(), a.alpha).map_err(fail)?;
        if a.inject_sign_flip {
            v = v.with_flipped_umpu_sign();
        }
        let detail = umpu_detail(&s, i, j, d.n(), a.alpha).map_err(fail)?;
        all_pass &= v.passes();
        let _ = writeln!(
            text,
            "{i}\t{j}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            d.names()[i],
            d.names()[j],
            fmt17(v.umpu_statistic),
            fmt17(v.partial_statistic),
            fmt17(v.signed_gap),
            fmt17(v.umpu.lower),
            fmt17(v.umpu.upper),
            fmt17(v.partial.upper),
            fmt17(detail.s_ij),
            fmt17(detail.raw_lower),
            fmt17(detail.raw_upper),
            v.umpu.reject,
            v.partial.reject
        );
    }
    emit(&a.out, &text, stdout)?;
    Ok(if all_pass { EXIT_OK } else { EXIT_VERIFY })
}

#[derive(Serialize)]
struct RateOut {
    method: Method,
    rejections: u64,
    #[serde(serialize_with = "sig17")]
    rejection_rate: f64,
    #[serde(serialize_with = "sig17")]
    std_error: f64,
}

impl From<&MethodRate> for RateOut {
    fn from(r: &MethodRate) -> Self {
        Self {
            method: r.method,
            rejections: r.rejections,
            rejection_rate: r.rejection_rate,
            std_error: r.std_error,
        }
    }
}

#[derive(Serialize)]
struct ReportOut {
    kind: crate::simulate::ReportKind,
    #[serde(rename = "N")]
    dim: usize,
    n: usize,
    #[serde(serialize_with = "sig17")]
    alpha: f64,
    edge: [usize; 2],
    #[serde(serialize_with = "sig17")]
    partial_correlation: f64,
    method: Method,
    replications: usize,
    seed: u64,
    #[serde(serialize_with = "sig17")]
    rejection_rate: f64,
    #[serde(serialize_with = "sig17")]
    std_error: f64,
    methods: Vec<RateOut>,
    #[serde(serialize_with = "sig17_opt")]
    ks_statistic: Option<f64>,
    #[serde(serialize_with = "sig17_opt", skip_serializing_if = "Option::is_none")]
    size: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    null_methods: Option<Vec<RateOut>>,
}

pub fn report_to_json(r: &MonteCarloReport) -> String {
    let out = ReportOut {
        kind: r.kind,
        dim: r.dim,
        n: r.n,
        alpha: r.alpha,
        edge: [r.edge.0, r.edge.1],
        partial_correlation: r.partial_correlation,
        method: r.method,
        replications: r.replications,
        seed: r.seed,
        rejection_rate: r.rejection_rate,
        std_error: r.std_error,
        methods: r.methods.iter().map(RateOut::from).collect(),
        ks_statistic: r.ks_statistic,
        size: r.null_rejection_rate,
        null_methods: r.null_methods.as_ref().map(|v| v.iter().map(RateOut::from).collect()),
    };
    let mut s = serde_json::to_string_pretty(&out).expect("report serializes");
    s.push('\n');
    s
}

fn cmd_montecarlo(a: MonteCarloArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let usage = |e: Error| Failure::usage(e.to_string());
    let (i, j) = a.edge;
    let method: Method = a.method.into();
    let report = if a.rho == 0.0 {
        if i >= a.dim || j >= a.dim || i == j {
            return Err(Failure::usage(format!(
                "edge ({i}, {j}) invalid for {} variables",
                a.dim
            )));
        }
        let spec = PrecisionSpec::identity(a.dim);
        estimate_size(&spec, a.edge, a.n, a.alpha, method, a.reps as usize, a.seed).map_err(usage)?
    } else {
        let spec = PrecisionSpec::single_edge(a.dim, i, j, a.rho).map_err(usage)?;
        estimate_power(&spec, a.edge, a.n, a.alpha, method, a.reps as usize, a.seed).map_err(usage)?
    };
    emit(&a.out, &report_to_json(&report), stdout)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct QuantileOut {
    #[serde(serialize_with = "sig17")]
    alpha: f64,
    n: usize,
    #[serde(rename = "N")]
    dim: usize,
    #[serde(serialize_with = "sig17")]
    shape: f64,
    /// `alpha/2` quantile of Be(m, m).
    #[serde(serialize_with = "sig17")]
    q: f64,
    #[serde(serialize_with = "sig17")]
    lower: f64,
    #[serde(serialize_with = "sig17")]
    upper: f64,
    /// Exact critical value of |r|.
    #[serde(serialize_with = "sig17")]
    c: f64,
    /// `1 - alpha/2` standard normal quantile for the Fisher test.
    #[serde(serialize_with = "sig17")]
    normal_critical: f64,
}

#[derive(Serialize)]
struct BetaQuantileOut {
    #[serde(serialize_with = "sig17")]
    prob: f64,
    #[serde(serialize_with = "sig17")]
    shape: f64,
    #[serde(serialize_with = "sig17")]
    quantile: f64,
}

fn cmd_quantile(a: QuantileArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let usage = |e: Error| Failure::usage(e.to_string());
    let text = if let (Some(prob), Some(shape)) = (a.prob, a.shape) {
        let quantile = beta_sym_quantile(prob, shape).map_err(usage)?;
        serde_json::to_string_pretty(&BetaQuantileOut { prob, shape, quantile })
    } else {
        let (Some(n), Some(dim)) = (a.n, a.dim) else {
            return Err(Failure::usage("quantile needs --n and --dim, or --prob and --shape"));
        };
        let law = NullCorrLaw::new(n, dim).map_err(usage)?;
        let q = beta_sym_quantile(0.5 * a.alpha, law.shape()).map_err(usage)?;
        serde_json::to_string_pretty(&QuantileOut {
            alpha: a.alpha,
            n,
            dim,
            shape: law.shape(),
            q,
            lower: 2.0 * q - 1.0,
            upper: 1.0 - 2.0 * q,
            c: law.critical_value(a.alpha).map_err(usage)?,
            normal_critical: std_normal_quantile(1.0 - 0.5 * a.alpha).map_err(usage)?,
        })
    }
    .expect("quantiles serialize");
    emit(&None, &(text + "\n"), stdout)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_errors_name_row_and_column() {
        let err = read_csv_from("a,b\n1,2\n3,x\n".as_bytes()).unwrap_err();
        assert!(err.contains("row 2") && err.contains("column 2"), "{err}");
        let err = read_csv_from("a,b\n1,2\n3,\n".as_bytes()).unwrap_err();
        assert!(err.contains("missing"), "{err}");
        let err = read_csv_from("a,b\n1,2\n3,4,5\n".as_bytes()).unwrap_err();
        assert!(err.contains("row 2"), "{err}");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let d = Dataset::new(
            vec!["u".into(), "v".into()],
            vec![0.1, -2.5e-17, 1.0 / 3.0, 12345.678901234567, -0.0, 7.0],
        )
        .unwrap();
        let back = read_csv_from(write_csv(&d).as_bytes()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(0.05), "5.0000000000000003e-2");
        assert_eq!(fmt17(1.0), "1.0000000000000000e0");
        assert_eq!(fmt17(f64::NAN), "null");
        let s = fmt17(std::f64::consts::PI);
        assert_eq!(s.parse::<f64>().unwrap(), std::f64::consts::PI);
    }

    #[test]
    fn alpha_parser_bounds() {
        assert!(parse_alpha("0.05").is_ok());
        assert!(parse_alpha("0").is_err());
        assert!(parse_alpha("1").is_err());
        assert!(parse_alpha("abc").is_err());
        assert_eq!(parse_edge("2, 3"), Ok((2, 3)));
        assert!(parse_edge("2").is_err());
    }
}

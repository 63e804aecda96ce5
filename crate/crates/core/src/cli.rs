//! Command-line front end: the JSON map format, flag parsing, and the
//! experiment dispatcher behind the `pamlab` binary.
//!
//! A map document looks like
//!
//! ```json
//! {
//!   "domain": ["0/1", "1/1"],
//!   "pieces": [
//!     { "interval": ["0/1", "1/2"], "a": "2/1", "b": "0/1" },
//!     { "interval": ["1/2", "1/1"], "a": "2/1", "b": "-1/1" }
//!   ],
//!   "deterministic": true,
//!   "label": "doubling"
//! }
//! ```

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::beta::{build_beta_pam, digit_stream, tds01_decide, BetaSystem, TdsAnswer, Variant};
use crate::error::{Error, Result};
use crate::exactnum::{format_rational, m_weight, parse_rational, to_f64, Rational};
use crate::pam::{iterate_orbit, structure_report, AffinePiece, Interval, OrbitVerdict, PamMap};
use crate::reach::{coeff_matrix_and_signs, decide_auto, working_basis};
use crate::seqlab::{
    alpha_partial, dyadic_star_discrepancy, dynamic_hit_frequency, mahler_sequence, theorem5_scan, DynamicInterval,
    Generator, Schedule, DEFAULT_MAHLER_CAP,
};
use crate::transfer::{density_extrema, histogram, iterate_transfer, uniform_bins, StepDensity};

pub const EXIT_DEFINITE: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;
pub const EXIT_INVALID: i32 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub interval: [String; 2],
    pub a: String,
    pub b: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PamSpecFile {
    pub domain: [String; 2],
    pub pieces: Vec<PieceSpec>,
    #[serde(default = "default_true")]
    pub deterministic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

fn default_true() -> bool {
    true
}

impl From<&PamMap> for PamSpecFile {
    fn from(map: &PamMap) -> Self {
        let pair = |iv: &Interval| [format_rational(iv.left()), format_rational(iv.right())];
        PamSpecFile {
            domain: pair(&map.domain),
            pieces: map
                .pieces
                .iter()
                .map(|p| PieceSpec { interval: pair(&p.domain), a: format_rational(&p.a), b: format_rational(&p.b) })
                .collect(),
            deterministic: map.deterministic,
            label: map.label.clone(),
        }
    }
}

fn syntax(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Syntax { location: location.into(), message: message.into() }
}

fn field_rational(text: &str, location: &str) -> Result<Rational> {
    parse_rational(text).map_err(|_| syntax(location, format!("{text:?} is not a rational")))
}

fn field_interval(pair: &[String; 2], location: &str) -> Result<Interval> {
    let l = field_rational(&pair[0], location)?;
    let r = field_rational(&pair[1], location)?;
    if l >= r {
        return Err(syntax(location, format!("interval [{}, {}) is empty", pair[0], pair[1])));
    }
    Ok(Interval::new(l, r).expect("checked above"))
}

/// Parses a map document without validating the map itself.
pub fn parse_pam_unchecked(text: &str) -> Result<PamMap> {
    let spec: PamSpecFile = serde_json::from_str(text)
        .map_err(|e| syntax(format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
    let domain = field_interval(&spec.domain, "domain")?;
    let pieces = spec
        .pieces
        .iter()
        .enumerate()
        .map(|(i, p)| {
            Ok(AffinePiece::new(
                field_interval(&p.interval, &format!("pieces[{i}].interval"))?,
                field_rational(&p.a, &format!("pieces[{i}].a"))?,
                field_rational(&p.b, &format!("pieces[{i}].b"))?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut map = PamMap::new(domain, pieces, spec.deterministic);
    map.label = spec.label;
    Ok(map)
}

/// Parses and validates a map document.
pub fn parse_pam_file(text: &str) -> Result<PamMap> {
    let map = parse_pam_unchecked(text)?;
    let report = map.validate();
    if !report.is_valid() {
        return Err(Error::ValidationFailed(report));
    }
    Ok(map)
}

pub fn print_pam(map: &PamMap) -> String {
    serde_json::to_string_pretty(&PamSpecFile::from(map)).expect("plain data serializes")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Orbit,
    Reach,
    BetaBuild,
    BetaDigits,
    Tds,
    Density,
    Theorem5,
    Mahler,
    Hitfreq,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum GeneratorKind {
    #[default]
    NTheta,
    Pam,
    Beta,
    Mahler,
}

fn parse_variant(s: &str) -> Result<Variant> {
    s.parse()
}

/// `"l,r"`.
pub fn parse_interval(s: &str) -> Result<Interval> {
    let (l, r) = s
        .split_once(',')
        .ok_or_else(|| Error::InvalidArgument(format!("interval {s:?} must look like l,r")))?;
    Interval::new(parse_rational(l.trim())?, parse_rational(r.trim())?)
}

/// `const:K`, `n-1`, `n`, or `list:k1,k2,...`.
pub fn parse_schedule(s: &str) -> Result<Schedule> {
    let bad = || Error::InvalidArgument(format!("unknown schedule {s:?}"));
    match s {
        "n" => Ok(Schedule::N),
        "n-1" => Ok(Schedule::NMinusOne),
        _ => {
            if let Some(k) = s.strip_prefix("const:") {
                return k.parse().map(Schedule::Constant).map_err(|_| bad());
            }
            if let Some(list) = s.strip_prefix("list:") {
                let ks = list.split(',').map(|k| k.trim().parse()).collect::<std::result::Result<Vec<u32>, _>>();
                return ks.map(Schedule::Custom).map_err(|_| bad());
            }
            Err(bad())
        }
    }
}

#[derive(Clone, Debug, clap::Args)]
pub struct ExperimentConfig {
    /// Map document (JSON).
    #[arg(long)]
    pub pam: Option<PathBuf>,
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub x: Option<Rational>,
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub y: Option<Rational>,
    /// Orbit step cap.
    #[arg(long, default_value_t = 10_000)]
    pub cap: usize,
    /// Digit depth for beta-expansions.
    #[arg(long, default_value_t = 64)]
    pub depth: usize,
    #[arg(long, value_parser = parse_rational)]
    pub beta: Option<Rational>,
    #[arg(long, value_parser = parse_variant, default_value = "greedy")]
    pub variant: Variant,
    /// Extra primes for weight reports, e.g. 2,3,5.
    #[arg(long, value_delimiter = ',')]
    pub basis: Option<Vec<u64>>,
    #[arg(long, value_parser = parse_rational)]
    pub kmin: Option<Rational>,
    #[arg(long, value_parser = parse_rational)]
    pub kmax: Option<Rational>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Sequence length or scan range.
    #[arg(long)]
    pub n: Option<u64>,
    /// Truncation index for theorem5.
    #[arg(long, default_value_t = 4)]
    pub index: u32,
    /// Transfer-operator steps.
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long, default_value_t = 10_000)]
    pub merge_cap: usize,
    /// Histogram bins (mahler writes `<out>.hist.<ext>` when set).
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, value_enum, default_value_t = GeneratorKind::NTheta)]
    pub generator: GeneratorKind,
    #[arg(long, value_parser = parse_rational)]
    pub theta: Option<Rational>,
    /// Base interval `l,r` for hitfreq.
    #[arg(long, value_parser = parse_interval)]
    pub interval: Option<Interval>,
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    #[arg(long, value_parser = parse_schedule, default_value = "n")]
    pub schedule: Schedule,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Cli::parse_from(["pamlab", "validate"]).config
    }
}

#[derive(Debug, Parser)]
#[command(name = "pamlab", version, about = "Exact experiments on piecewise affine maps")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    #[command(flatten)]
    pub config: ExperimentConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Definite,
    Unknown,
    Invalid,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(headers: &[&str]) -> Self {
        Table { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self, summary: &[String]) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.headers.iter().cloned().zip(r.iter().map(|c| json!(c))).collect()))
            .collect();
        json!({ "summary": summary, "rows": rows })
    }

    pub fn write(&self, path: &Path, format: Format, summary: &[String]) -> Result<()> {
        let file = fs::File::create(path)?;
        match format {
            Format::Csv => self.write_csv(file),
            Format::Json => Ok(serde_json::to_writer_pretty(file, &self.to_json(summary))?),
        }
    }
}

/// What a command printed and decided.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub status: Status,
    pub lines: Vec<String>,
    pub table: Table,
    /// Extra artifacts beyond `--out`, already written.
    pub written: Vec<PathBuf>,
}

impl Report {
    fn new(status: Status, lines: Vec<String>, table: Table) -> Self {
        Report { status, lines, table, written: Vec::new() }
    }
}

pub fn exit_code(result: &Result<Report>) -> i32 {
    match result {
        Ok(r) => match r.status {
            Status::Definite => EXIT_DEFINITE,
            Status::Unknown => EXIT_UNKNOWN,
            Status::Invalid => EXIT_INVALID,
        },
        Err(Error::ValidationFailed(_)) => EXIT_INVALID,
        Err(Error::MissingArgument(_)) => EXIT_USAGE,
        Err(_) => EXIT_ERROR,
    }
}

fn need<'a, T>(v: &'a Option<T>, flag: &'static str) -> Result<&'a T> {
    v.as_ref().ok_or(Error::MissingArgument(flag))
}

fn load_map(cfg: &ExperimentConfig) -> Result<PamMap> {
    parse_pam_file(&fs::read_to_string(need(&cfg.pam, "pam")?)?)
}

fn exact_and_decimal(x: &Rational) -> [String; 2] {
    [format_rational(x), to_f64(x).to_string()]
}

/// Runs one command and writes its table to `--out` when given.
pub fn run_experiment(command: Command, cfg: &ExperimentConfig) -> Result<Report> {
    let report = match command {
        Command::Validate => cmd_validate(cfg)?,
        Command::Orbit => cmd_orbit(cfg)?,
        Command::Reach => cmd_reach(cfg)?,
        Command::BetaBuild => cmd_beta_build(cfg)?,
        Command::BetaDigits => cmd_beta_digits(cfg)?,
        Command::Tds => cmd_tds(cfg)?,
        Command::Density => cmd_density(cfg)?,
        Command::Theorem5 => cmd_theorem5(cfg)?,
        Command::Mahler => cmd_mahler(cfg)?,
        Command::Hitfreq => cmd_hitfreq(cfg)?,
    };
    if let Some(path) = &cfg.out {
        report.table.write(path, cfg.format, &report.lines)?;
    }
    Ok(report)
}

fn cmd_validate(cfg: &ExperimentConfig) -> Result<Report> {
    let map = parse_pam_unchecked(&fs::read_to_string(need(&cfg.pam, "pam")?)?)?;
    let report = map.validate();
    let mut table = Table::new(&["violation"]);
    for v in &report.violations {
        table.push([v.to_string()]);
    }
    let s = structure_report(&map);
    let opt = |b: Option<bool>| b.map_or("n/a".to_string(), |b| b.to_string());
    let lines = vec![
        format!("pieces: {}", map.pieces.len()),
        format!("validation: {report}"),
        format!("injective: {}", s.injective),
        format!("complete: {}", opt(s.complete)),
        format!("continuous on circle: {}", opt(s.continuous_on_circle)),
        format!("degree: {}", s.degree.map_or("n/a".to_string(), |d| d.to_string())),
    ];
    let status = if report.is_valid() { Status::Definite } else { Status::Invalid };
    Ok(Report::new(status, lines, table))
}

fn cmd_orbit(cfg: &ExperimentConfig) -> Result<Report> {
    let map = load_map(cfg)?;
    let rec = iterate_orbit(&map, need(&cfg.x, "x")?, cfg.cap, cfg.y.as_ref())?;
    let mut table = Table::new(&["step", "point", "point_decimal", "piece"]);
    for (i, x) in rec.points.iter().enumerate() {
        let [p, d] = exact_and_decimal(x);
        let piece = rec.piece_trace.get(i).map_or(String::new(), |k| k.to_string());
        table.push([i.to_string(), p, d, piece]);
    }
    let status = match rec.verdict {
        OrbitVerdict::CapExceeded => Status::Unknown,
        _ => Status::Definite,
    };
    let lines = vec![format!("verdict: {}", rec.verdict), format!("points: {}", rec.points.len())];
    Ok(Report::new(status, lines, table))
}

fn cmd_reach(cfg: &ExperimentConfig) -> Result<Report> {
    let map = load_map(cfg)?;
    let (x, y) = (need(&cfg.x, "x")?, need(&cfg.y, "y")?);
    let density = match (&cfg.kmin, &cfg.kmax) {
        (Some(a), Some(b)) => Some((a, b)),
        (None, None) => None,
        (None, _) => return Err(Error::MissingArgument("kmin")),
        (_, None) => return Err(Error::MissingArgument("kmax")),
    };
    let verdict = decide_auto(&map, x, y, cfg.cap, density)?;
    let mut lines = vec![
        format!("decider: {}", verdict.decider),
        format!("outcome: {}", verdict.outcome),
        format!("conditional: {}", verdict.conditional),
    ];
    if let Some(t) = verdict.threshold {
        lines.push(format!("weight threshold: {t}"));
    }
    let mut basis = working_basis(&map, x, y)?;
    if let Some(extra) = &cfg.basis {
        basis = basis.union(extra)?;
    }
    if let Ok((matrix, signs)) = coeff_matrix_and_signs(&map, &basis) {
        lines.push(format!("basis: {}", matrix.basis));
        lines.push(format!("slope weights: {:?} (single-signed rows: {signs})", matrix.entries));
    }
    for (name, v) in [("x", x), ("y", y)] {
        lines.push(format!("weight of {name}: {:?}", m_weight(v, &basis).ok()));
    }
    let mut table = Table::new(&["step", "point", "point_decimal"]);
    for (i, p) in verdict.certificate.points.iter().enumerate() {
        let [e, d] = exact_and_decimal(p);
        table.push([i.to_string(), e, d]);
    }
    let status = if verdict.outcome.is_definite() { Status::Definite } else { Status::Unknown };
    Ok(Report::new(status, lines, table))
}

fn beta_system(cfg: &ExperimentConfig) -> Result<BetaSystem> {
    BetaSystem::new(need(&cfg.beta, "beta")?.clone())
}

fn cmd_beta_build(cfg: &ExperimentConfig) -> Result<Report> {
    let map = build_beta_pam(need(&cfg.beta, "beta")?, cfg.variant)?;
    let mut table = Table::new(&["digit", "left", "right", "a", "b"]);
    for (d, p) in map.pieces.iter().enumerate() {
        table.push([
            d.to_string(),
            format_rational(p.domain.left()),
            format_rational(p.domain.right()),
            format_rational(&p.a),
            format_rational(&p.b),
        ]);
    }
    let lines = vec![print_pam(&map)];
    Ok(Report::new(Status::Definite, lines, table))
}

fn cmd_beta_digits(cfg: &ExperimentConfig) -> Result<Report> {
    let system = beta_system(cfg)?;
    let seq = digit_stream(&system, cfg.variant, need(&cfg.x, "x")?, cfg.depth)?;
    let mut table = Table::new(&["index", "digit", "point", "point_decimal"]);
    for (i, d) in seq.digits.iter().enumerate() {
        let [p, dec] = exact_and_decimal(&seq.orbit[i]);
        table.push([i.to_string(), d.to_string(), p, dec]);
    }
    let period = seq.periodic_suffix.map_or("none".to_string(), |(s, t)| format!("start {s}, period {t}"));
    let lines = vec![format!("digits: {seq}"), format!("periodic: {period}")];
    Ok(Report::new(Status::Definite, lines, table))
}

fn cmd_tds(cfg: &ExperimentConfig) -> Result<Report> {
    let answer = tds01_decide(need(&cfg.beta, "beta")?, need(&cfg.x, "x")?, cfg.depth)?;
    let mut table = Table::new(&["answer", "detail"]);
    let (status, detail) = match &answer {
        TdsAnswer::Yes(w) => (Status::Definite, format!("witness {w}")),
        TdsAnswer::No { step, digit } => (Status::Definite, format!("greedy digit {digit} at position {step}")),
        TdsAnswer::Unknown => (Status::Unknown, format!("no verdict within depth {}", cfg.depth)),
    };
    let head = match answer {
        TdsAnswer::Yes(_) => "Yes",
        TdsAnswer::No { .. } => "No",
        TdsAnswer::Unknown => "Unknown",
    };
    table.push([head.to_string(), detail.clone()]);
    Ok(Report::new(status, vec![head.to_string(), detail], table))
}

fn cmd_density(cfg: &ExperimentConfig) -> Result<Report> {
    let map = match (&cfg.pam, &cfg.beta) {
        (Some(_), _) => load_map(cfg)?,
        (None, Some(b)) => build_beta_pam(b, cfg.variant)?,
        (None, None) => return Err(Error::MissingArgument("pam")),
    };
    let phi0 = StepDensity::uniform(&map.domain);
    let run = iterate_transfer(&map, &phi0, cfg.steps, cfg.merge_cap)?;
    let (kmin, kmax) = density_extrema(&run.phi);
    let l1: Vec<String> = run.l1.iter().map(format_rational).collect();
    let lines = vec![
        format!("steps: {}{}", run.steps_done, if run.stopped_early { " (stopped at merge cap)" } else { "" }),
        format!("breakpoints: {}", run.phi.breakpoints().len()),
        format!("mass: {}", format_rational(&run.phi.mass())),
        format!("l1 distances: {}", l1.join(" ")),
        format!("kmin: {}  kmax: {}", format_rational(&kmin), format_rational(&kmax)),
    ];
    let mut table = Table::new(&["left", "right", "value", "value_decimal"]);
    for (l, r, v) in run.phi.gaps() {
        let [e, d] = exact_and_decimal(v);
        table.push([format_rational(l), format_rational(r), e, d]);
    }
    Ok(Report::new(Status::Definite, lines, table))
}

fn cmd_theorem5(cfg: &ExperimentConfig) -> Result<Report> {
    let (_, deltas) = alpha_partial(cfg.index)?;
    let n_max = cfg.n.unwrap_or(*deltas.last().unwrap());
    let rows = theorem5_scan(n_max, cfg.index)?;
    let passed = rows.iter().filter(|r| r.passes).count();
    let mut table = Table::new(&["n", "value", "value_decimal", "passes"]);
    for r in &rows {
        let [e, d] = exact_and_decimal(&r.value.to_rational());
        table.push([r.n.to_string(), e, d, r.passes.to_string()]);
    }
    let lines = vec![
        format!("deltas: {deltas:?}"),
        format!("passed: {passed}/{}", rows.len()),
    ];
    Ok(Report::new(Status::Definite, lines, table))
}

fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    path.with_file_name(format!("{stem}.{tag}{ext}"))
}

fn cmd_mahler(cfg: &ExperimentConfig) -> Result<Report> {
    let n = cfg.n.unwrap_or(100);
    if n > DEFAULT_MAHLER_CAP {
        return Err(Error::CapExceeded { n, cap: DEFAULT_MAHLER_CAP });
    }
    let seq = mahler_sequence(n)?;
    let mut table = Table::new(&["n", "value", "value_decimal"]);
    for (i, x) in seq.iter().enumerate() {
        let [e, d] = exact_and_decimal(x);
        table.push([(i + 1).to_string(), e, d]);
    }
    let mut lines = vec![
        format!("terms: {n}"),
        format!("dyadic star discrepancy (level 6): {:.6}", to_f64(&dyadic_star_discrepancy(&seq, 6))),
    ];
    let mut written = Vec::new();
    if let Some(bins) = cfg.bins {
        let hist = histogram(&seq, &uniform_bins(&Interval::unit(), bins.max(1)));
        let counts: Vec<String> = hist.counts.iter().map(u64::to_string).collect();
        lines.push(format!("histogram: {}", counts.join(" ")));
        if let Some(out) = &cfg.out {
            let path = sibling(out, "hist");
            let file = fs::File::create(&path)?;
            match cfg.format {
                Format::Csv => hist.write_csv(file)?,
                Format::Json => {
                    let freqs: Vec<String> = hist.frequencies().iter().map(format_rational).collect();
                    serde_json::to_writer_pretty(file, &json!({ "counts": hist.counts, "frequencies": freqs }))?
                }
            }
            written.push(path);
        }
    }
    let mut report = Report::new(Status::Definite, lines, table);
    report.written = written;
    Ok(report)
}

fn cmd_hitfreq(cfg: &ExperimentConfig) -> Result<Report> {
    let n = cfg.n.unwrap_or(1000) as usize;
    let generator = match cfg.generator {
        GeneratorKind::NTheta => Generator::FracMultiple(need(&cfg.theta, "theta")?.clone()),
        GeneratorKind::Pam => Generator::PamOrbit { map: load_map(cfg)?, x0: need(&cfg.x, "x")?.clone() },
        GeneratorKind::Beta => Generator::BetaOrbit {
            system: beta_system(cfg)?,
            variant: cfg.variant,
            x0: need(&cfg.x, "x")?.clone(),
        },
        GeneratorKind::Mahler => Generator::Mahler,
    };
    let base = need(&cfg.interval, "interval")?.clone();
    let di = DynamicInterval::new(base, cfg.p, cfg.schedule.clone())?;
    let xs = generator.take(n)?;
    let hit = dynamic_hit_frequency(&xs, &di, n)?;
    let mut table = Table::new(&["generator", "schedule", "n", "f_dynamic", "f_static_on_shifted"]);
    table.push([
        generator.name().to_string(),
        di.schedule().to_string(),
        hit.n.to_string(),
        hit.f_dynamic.to_string(),
        hit.f_static_on_shifted.to_string(),
    ]);
    let lines = vec![
        format!("F_dynamic: {}", hit.f_dynamic),
        format!("F_static_on_shifted: {}", hit.f_static_on_shifted),
        format!("equal: {}", hit.consistent()),
    ];
    Ok(Report::new(Status::Definite, lines, table))
}

/// Entry point for the binary. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_DEFINITE };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    let result = run_experiment(cli.command, &cli.config);
    match &result {
        Ok(report) => {
            for line in &report.lines {
                let _ = writeln!(stdout, "{line}");
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
        }
    }
    exit_code(&result)
}

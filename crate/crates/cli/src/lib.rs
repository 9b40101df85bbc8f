//! `isetlab` command line. [`run`] parses arguments, does the work and
//! returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | bad arguments, parameters or input files |
//! | 2 | enumeration refused by the vertex budget |
//! | 3 | a verdict that should hold came out false |

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use isetlab_core::constructions::{build_a_t, build_full_level, build_sunflower, build_triangle};
use isetlab_core::count::{
    count_i_at, count_i_sunflower, ekr_bound, sunflower_chain_check, sunflower_chain_forms,
};
use isetlab_core::harness::{
    audit_proof_inequalities, enumerate_maximal_families, extremal_report, DEFAULT_BUDGET,
};
use isetlab_core::threshold::{
    epsilon_of, f_min, fit_regime_exponent, parse_k_range, threshold_verdict, DEFAULT_WINDOW,
};
use isetlab_core::transversal::{addable_member, generator_profile, is_saturated};
use isetlab_core::{Error, Family, RegimeKind, ReportOptions, Subset, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_FALSIFIED: i32 = 3;

/// Environment variable overriding the clique vertex budget of `verify`.
pub const BUDGET_ENV: &str = "ISETLAB_BUDGET";

#[derive(Parser, Debug)]
#[command(
    name = "isetlab",
    version,
    about = "Distinct intersections of t-intersecting families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum ConstructKind {
    /// `{A : |A ∩ [t+2]| >= t+1}`
    At,
    /// every k-set containing the core
    Sunflower,
    /// all (t+1)-subsets of [t+2]
    Triangle,
    /// all k-subsets of [n]
    Level,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build one of the standard families.
    Construct {
        #[arg(value_enum)]
        kind: ConstructKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        /// Sunflower core, e.g. `1,2`. Defaults to `1..=t`.
        #[arg(long, value_delimiter = ',')]
        core: Option<Vec<usize>>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Closed-form counts for A_t and complete sunflowers.
    Count {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        t: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Generators, covering number and levels of a family file.
    Transversal {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        t: usize,
        /// Defaults to the common member size.
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Threshold inequality at one n, least n, or growth across k.
    Threshold {
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        t: Option<u64>,
        #[arg(long, conflicts_with_all = ["scan", "regime"])]
        n: Option<u64>,
        #[arg(long, conflicts_with = "regime")]
        scan: bool,
        /// `const[:T]`, `power:E` or `linear:C` (E, C may be `p/q`).
        #[arg(long, requires = "k_range")]
        regime: Option<String>,
        /// `A..B`, inclusive.
        #[arg(long)]
        k_range: Option<String>,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Enumerate maximal families and audit each one.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        /// Also report the number of families up to relabelling (n <= 8).
        #[arg(long)]
        orbits: bool,
        /// Skip the per-family audits.
        #[arg(long)]
        no_audit: bool,
        /// Write every maximal family to this file, one JSON object per line.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Audit one saturated family from a file.
    Audit {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        t: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

#[derive(Serialize)]
struct Envelope<P: Serialize, R: Serialize> {
    schema: &'static str,
    command: &'static str,
    params: P,
    result: R,
}

/// Rendered output plus whether every checked verdict held.
struct Rendered {
    body: String,
    verdicts_hold: bool,
}

fn json<P: Serialize, R: Serialize>(
    command: &'static str,
    params: P,
    result: R,
) -> CliResult<String> {
    let env = Envelope {
        schema: SCHEMA_VERSION,
        command,
        params,
        result,
    };
    let mut text = serde_json::to_string_pretty(&env).map_err(|e| usage(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn csv_text<R: Serialize>(rows: impl IntoIterator<Item = R>) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| usage(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| usage(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| usage(e.to_string()))
}

fn set_text(s: &Subset) -> String {
    s.elements()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn read_family(path: &Path) -> CliResult<Family> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Family::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn need<T>(value: Option<T>, flag: &str, what: &str) -> CliResult<T> {
    value.ok_or_else(|| usage(format!("{what} needs --{flag}")))
}

// ---- construct -------------------------------------------------------------

#[derive(Serialize)]
struct ConstructParams {
    kind: ConstructKind,
    n: usize,
    k: usize,
    t: Option<usize>,
    core: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct ConstructResult {
    size: usize,
    family: Family,
}

#[derive(Serialize)]
struct SetRow {
    set: String,
}

fn construct(
    kind: ConstructKind,
    n: usize,
    k: Option<usize>,
    t: Option<usize>,
    core: Option<Vec<usize>>,
    format: Format,
) -> CliResult<Rendered> {
    let (family, params) = match kind {
        ConstructKind::At => {
            let (k, t) = (need(k, "k", "at")?, need(t, "t", "at")?);
            (
                build_a_t(n, k, t)?,
                ConstructParams {
                    kind,
                    n,
                    k,
                    t: Some(t),
                    core: None,
                },
            )
        }
        ConstructKind::Sunflower => {
            let k = need(k, "k", "sunflower")?;
            let core = match (core, t) {
                (Some(c), _) => c,
                (None, Some(t)) => (1..=t).collect(),
                (None, None) => return Err(usage("sunflower needs --core or --t")),
            };
            if t.is_some_and(|t| t != core.len()) {
                return Err(usage("--t must equal the core size"));
            }
            let c = Subset::from_elements(n, core.iter().copied())?;
            let core = c.to_vec();
            (
                build_sunflower(n, k, &c)?,
                ConstructParams {
                    kind,
                    n,
                    k,
                    t: Some(core.len()),
                    core: Some(core),
                },
            )
        }
        ConstructKind::Triangle => {
            let t = need(t, "t", "triangle")?;
            if k.is_some_and(|k| k != t + 1) {
                return Err(usage("triangle members have size t+1"));
            }
            (
                build_triangle(n, t)?,
                ConstructParams {
                    kind,
                    n,
                    k: t + 1,
                    t: Some(t),
                    core: None,
                },
            )
        }
        ConstructKind::Level => {
            let k = need(k, "k", "level")?;
            (
                build_full_level(n, k)?,
                ConstructParams {
                    kind,
                    n,
                    k,
                    t: None,
                    core: None,
                },
            )
        }
    };
    let body = match format {
        Format::Json => json(
            "construct",
            params,
            ConstructResult {
                size: family.len(),
                family,
            },
        )?,
        Format::Csv => csv_text(family.iter().map(|s| SetRow { set: set_text(s) }))?,
    };
    Ok(Rendered {
        body,
        verdicts_hold: true,
    })
}

// ---- count -------------------------------------------------------------------

#[derive(Serialize)]
struct Nkt<N> {
    n: N,
    k: N,
    t: N,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct CountResult {
    /// Absent outside `k >= t+1`, `n >= 2k-t`.
    count_I_At: Option<String>,
    count_I_sunflower: String,
    ekr_bound: String,
    /// The four equal forms of the sunflower count; absent below `n = t+2`.
    sunflower_chain: Option<Vec<String>>,
    sunflower_chain_ok: Option<bool>,
    sunflower_below_At: Option<bool>,
}

#[derive(Serialize)]
struct KeyValue {
    quantity: &'static str,
    value: String,
}

fn count(n: u64, k: u64, t: u64, format: Format) -> CliResult<Rendered> {
    let sunflower = count_i_sunflower(n, k, t)?;
    let ekr = ekr_bound(n, k, t)?;
    let at = count_i_at(n, k, t).ok();
    let forms = sunflower_chain_forms(n, k, t).ok();
    let chain_ok = sunflower_chain_check(n, k, t).ok();
    let below = at.as_ref().map(|a| &sunflower < a);
    let result = CountResult {
        count_I_At: at.as_ref().map(ToString::to_string),
        count_I_sunflower: sunflower.to_string(),
        ekr_bound: ekr.to_string(),
        sunflower_chain: forms.map(|f| f.iter().map(ToString::to_string).collect()),
        sunflower_chain_ok: chain_ok,
        sunflower_below_At: below,
    };
    let verdicts_hold = chain_ok != Some(false) && below != Some(false);
    let body = match format {
        Format::Json => json("count", Nkt { n, k, t }, &result)?,
        Format::Csv => {
            let opt = |v: &Option<String>| v.clone().unwrap_or_default();
            let opt_bool = |v: Option<bool>| v.map(|b| b.to_string()).unwrap_or_default();
            csv_text([
                KeyValue {
                    quantity: "count_I_At",
                    value: opt(&result.count_I_At),
                },
                KeyValue {
                    quantity: "count_I_sunflower",
                    value: result.count_I_sunflower.clone(),
                },
                KeyValue {
                    quantity: "ekr_bound",
                    value: result.ekr_bound.clone(),
                },
                KeyValue {
                    quantity: "sunflower_chain_ok",
                    value: opt_bool(result.sunflower_chain_ok),
                },
                KeyValue {
                    quantity: "sunflower_below_At",
                    value: opt_bool(result.sunflower_below_At),
                },
            ])?
        }
    };
    Ok(Rendered {
        body,
        verdicts_hold,
    })
}

// ---- transversal -------------------------------------------------------------

#[derive(Serialize)]
struct TransversalParams {
    family: String,
    t: usize,
    k: usize,
}

#[derive(Serialize)]
struct LevelRow {
    level: usize,
    generators: usize,
}

#[derive(Serialize)]
struct TransversalResult {
    saturated: bool,
    addable: Option<Vec<usize>>,
    s: Option<usize>,
    tau: Option<usize>,
    alpha: Option<usize>,
    complete_sunflower: bool,
    levels: Vec<LevelRow>,
    generators: Family,
}

fn transversal(path: &Path, t: usize, k: Option<usize>, format: Format) -> CliResult<Rendered> {
    let fam = read_family(path)?;
    let k = match k {
        Some(k) => k,
        None => fam
            .uniform_size()
            .ok_or_else(|| usage("family is empty or not uniform; pass --k"))?,
    };
    let profile = generator_profile(&fam, t, k)?;
    let levels: Vec<LevelRow> = profile
        .levels
        .iter()
        .map(|(&level, f)| LevelRow {
            level,
            generators: f.len(),
        })
        .collect();
    let body = match format {
        Format::Json => json(
            "transversal",
            TransversalParams {
                family: path.display().to_string(),
                t,
                k,
            },
            TransversalResult {
                saturated: is_saturated(&fam, t, k)?,
                addable: addable_member(&fam, t, k)?.map(|s| s.to_vec()),
                s: profile.s,
                tau: profile.tau,
                alpha: profile.alpha,
                complete_sunflower: profile.is_complete_sunflower(),
                levels,
                generators: profile.generators.clone(),
            },
        )?,
        Format::Csv => csv_text(levels)?,
    };
    Ok(Rendered {
        body,
        verdicts_hold: true,
    })
}

// ---- threshold ---------------------------------------------------------------

#[derive(Serialize)]
struct ScanResult {
    f_min: u64,
    window: u64,
    epsilon: Option<String>,
}

#[derive(Serialize)]
struct ScanRow {
    k: u64,
    t: u64,
    f_min: u64,
    epsilon: String,
}

#[derive(Serialize)]
struct VerdictRow {
    n: u64,
    k: u64,
    t: u64,
    lhs: String,
    rhs: String,
    holds: bool,
}

#[derive(Serialize)]
struct RegimeParams<'a> {
    regime: &'a str,
    k_range: &'a str,
    window: u64,
}

#[derive(Serialize)]
struct RegimeRow {
    k: u64,
    t: String,
    f_min: String,
    expected_exponent: String,
    local_exponent: String,
}

fn join_f64(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(";")
}

#[allow(clippy::too_many_arguments)]
fn threshold(
    k: Option<u64>,
    t: Option<u64>,
    n: Option<u64>,
    scan: bool,
    regime: Option<String>,
    k_range: Option<String>,
    window: u64,
    format: Format,
) -> CliResult<Rendered> {
    if window == 0 {
        return Err(usage("--window must be positive"));
    }
    if let Some(text) = regime {
        let range = k_range.ok_or_else(|| usage("--regime needs --k-range"))?;
        let ks = parse_k_range(&range)?;
        let kind = RegimeKind::parse(&text, t.unwrap_or(1))?;
        if let RegimeKind::ConstantT(t) = kind {
            if let Some(&k) = ks.iter().find(|&&k| k < t + 3) {
                return Err(usage(format!(
                    "constant t = {t} needs every k >= t+3, got k={k}"
                )));
            }
        }
        let fit = fit_regime_exponent(kind, &ks, window);
        let body = match format {
            Format::Json => json(
                "threshold",
                RegimeParams {
                    regime: &text,
                    k_range: &range,
                    window,
                },
                &fit,
            )?,
            Format::Csv => {
                let rows = fit.points.iter().map(|p| RegimeRow {
                    k: p.k,
                    t: p.t.map(|t| t.to_string()).unwrap_or_default(),
                    f_min: p.f_min.map(|f| f.to_string()).unwrap_or_default(),
                    expected_exponent: join_f64(&p.expected),
                    local_exponent: fit
                        .local_exponents
                        .iter()
                        .find(|e| e.k_to == p.k)
                        .map(|e| format!("{}", e.value))
                        .unwrap_or_default(),
                });
                csv_text(rows)?
            }
        };
        return Ok(Rendered {
            body,
            verdicts_hold: true,
        });
    }
    let (k, t) = (need(k, "k", "threshold")?, need(t, "t", "threshold")?);
    if let Some(n) = n {
        let v = threshold_verdict(n, k, t)?;
        let body = match format {
            Format::Json => json("threshold", Nkt { n, k, t }, &v)?,
            Format::Csv => csv_text([VerdictRow {
                n,
                k,
                t,
                lhs: v.lhs.to_string(),
                rhs: v.rhs.to_string(),
                holds: v.holds,
            }])?,
        };
        return Ok(Rendered {
            body,
            verdicts_hold: true,
        });
    }
    if !scan {
        return Err(usage("threshold needs one of --n, --scan or --regime"));
    }
    let f = f_min(k, t, window)?;
    let epsilon = epsilon_of(k, t).ok().map(|e| e.to_string());
    let body = match format {
        Format::Json => {
            #[derive(Serialize)]
            struct P {
                k: u64,
                t: u64,
                window: u64,
            }
            json(
                "threshold",
                P { k, t, window },
                ScanResult {
                    f_min: f,
                    window,
                    epsilon,
                },
            )?
        }
        Format::Csv => csv_text([ScanRow {
            k,
            t,
            f_min: f,
            epsilon: epsilon.unwrap_or_default(),
        }])?,
    };
    Ok(Rendered {
        body,
        verdicts_hold: true,
    })
}

// ---- verify / audit ------------------------------------------------------------

#[derive(Serialize)]
struct VerifyParams {
    n: usize,
    k: usize,
    t: usize,
    budget: u128,
}

#[derive(Serialize)]
struct AuditRow {
    family_id: usize,
    size: usize,
    distinct_intersections: usize,
    generators: usize,
    s: String,
    tau: String,
    alpha: String,
    all_hold: bool,
}

fn opt_text<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn budget_from_env() -> CliResult<u128> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{BUDGET_ENV}={v:?} is not a non-negative integer"))),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_BUDGET),
        Err(e) => Err(usage(format!("{BUDGET_ENV}: {e}"))),
    }
}

/// The generator and bound audits are only claimed for `n >= 2k - t`.
fn audits_claimed(n: usize, k: usize, t: usize) -> bool {
    n + t >= 2 * k
}

#[allow(clippy::too_many_arguments)]
fn verify(
    n: usize,
    k: usize,
    t: usize,
    orbits: bool,
    no_audit: bool,
    dump: Option<&Path>,
    format: Format,
) -> CliResult<Rendered> {
    let budget = budget_from_env()?;
    let opts = ReportOptions {
        budget,
        audit: !no_audit,
        orbits,
        ..ReportOptions::default()
    };
    let report = extremal_report(n, k, t, opts)?;
    if let Some(path) = dump {
        let fams = enumerate_maximal_families(n, k, t, budget)?;
        let mut text = String::new();
        for f in &fams {
            text.push_str(&serde_json::to_string(f).map_err(|e| usage(e.to_string()))?);
            text.push('\n');
        }
        fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    let verdicts_hold = report.all_audits_hold || !audits_claimed(n, k, t);
    let body = match format {
        Format::Json => json("verify", VerifyParams { n, k, t, budget }, &report)?,
        Format::Csv => csv_text(report.per_family_audits.iter().map(|a| AuditRow {
            family_id: a.family_id,
            size: a.size,
            distinct_intersections: a.distinct_intersections,
            generators: a.generators,
            s: opt_text(a.s),
            tau: opt_text(a.tau),
            alpha: opt_text(a.alpha),
            all_hold: a.all_hold(),
        }))?,
    };
    Ok(Rendered {
        body,
        verdicts_hold,
    })
}

#[derive(Serialize)]
struct AuditParams {
    family: String,
    n: usize,
    k: usize,
    t: usize,
}

fn audit(path: &Path, t: usize, format: Format) -> CliResult<Rendered> {
    let fam = read_family(path)?;
    let k = fam
        .uniform_size()
        .ok_or_else(|| usage("family is empty or not uniform"))?;
    let n = fam.universe();
    let record = audit_proof_inequalities(&fam, t)?;
    let verdicts_hold = record.all_hold() || !audits_claimed(n, k, t);
    let body = match format {
        Format::Json => json(
            "audit",
            AuditParams {
                family: path.display().to_string(),
                n,
                k,
                t,
            },
            &record,
        )?,
        Format::Csv => csv_text([AuditRow {
            family_id: record.family_id,
            size: record.size,
            distinct_intersections: record.distinct_intersections,
            generators: record.generators,
            s: opt_text(record.s),
            tau: opt_text(record.tau),
            alpha: opt_text(record.alpha),
            all_hold: record.all_hold(),
        }])?,
    };
    Ok(Rendered {
        body,
        verdicts_hold,
    })
}

// ---- entry point ---------------------------------------------------------------

fn dispatch(command: Command) -> CliResult<(Rendered, OutputArgs)> {
    Ok(match command {
        Command::Construct {
            kind,
            n,
            k,
            t,
            core,
            out,
        } => (construct(kind, n, k, t, core, out.format)?, out),
        Command::Count { n, k, t, out } => (count(n, k, t, out.format)?, out),
        Command::Transversal { family, t, k, out } => {
            (transversal(&family, t, k, out.format)?, out)
        }
        Command::Threshold {
            k,
            t,
            n,
            scan,
            regime,
            k_range,
            window,
            out,
        } => (
            threshold(k, t, n, scan, regime, k_range, window, out.format)?,
            out,
        ),
        Command::Verify {
            n,
            k,
            t,
            orbits,
            no_audit,
            dump,
            out,
        } => (
            verify(n, k, t, orbits, no_audit, dump.as_deref(), out.format)?,
            out,
        ),
        Command::Audit { family, t, out } => (audit(&family, t, out.format)?, out),
    })
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (rendered, out) = match dispatch(cli.command) {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg} (raise {BUDGET_ENV} to allow it)");
            return EXIT_BUDGET;
        }
    };
    let written = match &out.output {
        Some(path) => {
            fs::write(path, &rendered.body).map_err(|e| format!("{}: {e}", path.display()))
        }
        None => std::io::stdout()
            .lock()
            .write_all(rendered.body.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    if rendered.verdicts_hold {
        EXIT_OK
    } else {
        eprintln!("error: a verdict that should hold is false; see output");
        EXIT_FALSIFIED
    }
}

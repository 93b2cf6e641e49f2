//! `segtool`: command-line front end for segkit.
//!
//! Output is built in memory and written only once a command has fully
//! succeeded, so a failing command never leaves partial output behind.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 I/O error,
//! 3 degenerate statistic.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use segkit::agreement::{boundary_strengths, majority_opinion, percent_agreement, ClassAgreement};
use segkit::corpus::{AnnotationMatrix, BoundarySet, FicCoding, Narrative};
use segkit::eval::{
    confusion, evaluate_humans, metrics, target_set, EvalMetrics, HumanTarget, TargetMode,
};
use segkit::par::Execution;
use segkit::report::{self, fmt2, fmt_ratio, Batch, BatchItem};
use segkit::segmenters::{
    cue_segment, normalize_to_sites, np_segment, pause_segment, CueLexicon, TraceStep,
};
use segkit::significance::{
    cochran_q_with, null_calibration, CalibrationOptions, CochranResult, DfConvention,
};
use segkit::stats::to_f64;
use segkit::Ratio;
use serde::Deserialize;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "segtool", version, about = "Discourse segmentation agreement and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Machine-readable JSON output.
    #[arg(long, global = true, conflicts_with = "tsv")]
    json: bool,

    /// Tab-separated tables, numbers to two decimals.
    #[arg(long, global = true)]
    tsv: bool,

    /// Seed for Monte-Carlo calibration.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Cue lexicon file, one word per line.
    #[arg(long, global = true, value_name = "PATH")]
    cues: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Percent agreement with the majority opinion.
    Agree(Inputs),
    /// Sites grouped by how many subjects marked them.
    Strengths(Inputs),
    /// Cochran's Q over the sites of an annotation matrix.
    Cochran(CochranArgs),
    /// Run one segmenter over a transcript.
    Segment(SegmentArgs),
    /// Score a segmenter (or the subjects) against human boundaries.
    Eval(EvalArgs),
    /// Agreement and evaluation tables over a batch of narratives.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct Inputs {
    #[arg(long, value_name = "FILE")]
    narrative: PathBuf,
    #[arg(long, value_name = "FILE")]
    annotations: PathBuf,
}

#[derive(Debug, Args)]
struct CochranArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Break Q down by boundary strength.
    #[arg(long)]
    partition: bool,
    /// Give each component n_t − 1 degrees of freedom instead of n_t.
    #[arg(long, requires = "partition")]
    df_minus_one: bool,
    /// Monte-Carlo null trials (at least 1000).
    #[arg(long, value_name = "TRIALS")]
    calibrate: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Np,
    Cue,
    Pause,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalMethod {
    Np,
    Cue,
    Pause,
    Humans,
}

#[derive(Debug, Args)]
struct SegmentArgs {
    #[arg(long, value_enum)]
    method: Algorithm,
    #[arg(long, value_name = "FILE")]
    narrative: PathBuf,
    /// FIC/NP coding, required for `--method np`.
    #[arg(long, value_name = "FILE")]
    coding: Option<PathBuf>,
    /// Include the per-FIC decision trace (NP only).
    #[arg(long)]
    trace: bool,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long, value_enum)]
    method: EvalMethod,
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, value_name = "FILE")]
    coding: Option<PathBuf>,
    /// Target: sites marked by at least T subjects (default: majority).
    #[arg(long, value_name = "T", conflicts_with = "exact")]
    threshold: Option<u32>,
    /// Target: sites marked by exactly T subjects.
    #[arg(long, value_name = "T")]
    exact: Option<u32>,
    /// Score each subject against the other subjects only.
    #[arg(long)]
    leave_one_out: bool,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Batch manifest (JSON).
    #[arg(long, value_name = "FILE")]
    batch: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Tsv,
}

/// A failed command: exit code plus the message for stderr.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<segkit::Error> for Failure {
    fn from(e: segkit::Error) -> Self {
        let code = match e {
            segkit::Error::Io { .. } => EXIT_IO,
            segkit::Error::Degenerate(_) => EXIT_DEGENERATE,
            _ => EXIT_VALIDATION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_VALIDATION,
        message: message.into(),
    }
}

type Outcome<T> = Result<T, Failure>;

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_VALIDATION
                }
            };
        }
    };
    match execute(&cli) {
        Ok(output) => match stdout.write_all(output.as_bytes()) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(stderr, "segtool: writing output: {e}");
                EXIT_IO
            }
        },
        Err(f) => {
            let _ = writeln!(stderr, "segtool: {}", f.message);
            f.code
        }
    }
}

fn format_of(cli: &Cli, default: Format) -> Format {
    if cli.json {
        Format::Json
    } else if cli.tsv {
        Format::Tsv
    } else {
        default
    }
}

fn execute(cli: &Cli) -> Outcome<String> {
    match &cli.command {
        Command::Agree(a) => agree(a, format_of(cli, Format::Json)),
        Command::Strengths(a) => strengths(a, format_of(cli, Format::Json)),
        Command::Cochran(a) => cochran(a, cli.seed, format_of(cli, Format::Json)),
        Command::Segment(a) => segment(a, &lexicon(cli.cues.as_deref())?, format_of(cli, Format::Json)),
        Command::Eval(a) => eval(a, &lexicon(cli.cues.as_deref())?, format_of(cli, Format::Json)),
        Command::Report(a) => batch_report(a, cli),
    }
}

fn read(path: &Path) -> Outcome<Vec<u8>> {
    fs::read(path).map_err(|source| {
        segkit::Error::Io {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}

fn with_path<T>(path: &Path, r: segkit::Result<T>) -> Outcome<T> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn load_narrative(path: &Path) -> Outcome<Narrative> {
    with_path(path, Narrative::from_json(&read(path)?))
}

fn load_annotations(path: &Path, n: &Narrative) -> Outcome<AnnotationMatrix> {
    with_path(path, AnnotationMatrix::from_json(&read(path)?, n))
}

fn load_coding(path: &Path, n: &Narrative) -> Outcome<FicCoding> {
    with_path(path, FicCoding::from_json(&read(path)?, n))
}

fn load_inputs(i: &Inputs) -> Outcome<(Narrative, AnnotationMatrix)> {
    let n = load_narrative(&i.narrative)?;
    let m = load_annotations(&i.annotations, &n)?;
    Ok((n, m))
}

fn lexicon(path: Option<&Path>) -> Outcome<CueLexicon> {
    match path {
        None => Ok(CueLexicon::default()),
        Some(p) => {
            let bytes = read(p)?;
            let text = String::from_utf8(bytes)
                .map_err(|_| invalid(format!("{}: not UTF-8", p.display())))?;
            with_path(p, CueLexicon::parse(&text, p.display().to_string()))
        }
    }
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn ratio_json(r: Option<Ratio>) -> Value {
    r.map_or(Value::Null, |r| json!(to_f64(&r)))
}

fn ratio_text(r: Option<Ratio>) -> Value {
    r.map_or(Value::Null, |r| json!(format!("{}/{}", r.numer(), r.denom())))
}

fn class_json(sites: usize, c: &ClassAgreement) -> Value {
    json!({
        "sites": sites,
        "observed": c.observed,
        "possible": c.possible,
        "percent": ratio_json(c.percent()),
        "exact": ratio_text(c.percent()),
    })
}

fn site_labels(n: &Narrative, sites: impl IntoIterator<Item = usize>) -> Vec<String> {
    sites
        .into_iter()
        .map(|k| n.site_label(k).expect("site within narrative"))
        .collect()
}

fn agree(a: &Inputs, format: Format) -> Outcome<String> {
    let (n, m) = load_inputs(a)?;
    let r = percent_agreement(&m);
    let opinion = majority_opinion(&m);
    Ok(match format {
        Format::Tsv => format!(
            "{}\n{}\n",
            report::AGREEMENT_HEADER,
            report::agreement_tsv_row(&r)
        ),
        Format::Json => to_json(&json!({
            "narrative_id": r.narrative_id,
            "subjects": r.subjects,
            "sites": r.sites,
            "majority_threshold": opinion.threshold,
            "majority_boundaries": site_labels(&n, opinion.boundary_sites()),
            "total": class_json(r.sites, &r.total),
            "boundary": class_json(r.boundary_sites, &r.boundary),
            "non_boundary": class_json(r.non_boundary_sites(), &r.non_boundary),
        })),
    })
}

fn strengths(a: &Inputs, format: Format) -> Outcome<String> {
    let (n, m) = load_inputs(a)?;
    let s = boundary_strengths(&m);
    let levels = 0..=s.subjects() as u32;
    let none: BoundarySet = {
        let marked = s.cumulative(1);
        BoundarySet::new(n.id(), n.site_count(), (0..n.site_count()).filter(|k| !marked.contains(*k)))?
    };
    let exact = |t: u32| if t == 0 { none.clone() } else { s.exact(t) };
    Ok(match format {
        Format::Tsv => {
            let mut out = String::from("strength\tsites\tcumulative\tlabels\n");
            for t in levels {
                let e = exact(t);
                let cum = if t == 0 { n.site_count() } else { s.cumulative(t).len() };
                let _ = writeln!(out, "{t}\t{}\t{cum}\t{}", e.len(), e.labels(&n).join(" "));
            }
            out
        }
        Format::Json => {
            let rows: Vec<Value> = levels
                .map(|t| {
                    let e = exact(t);
                    json!({
                        "strength": t,
                        "sites": e.labels(&n),
                        "cumulative": if t == 0 { n.site_count() } else { s.cumulative(t).len() },
                    })
                })
                .collect();
            to_json(&json!({
                "narrative_id": n.id(),
                "subjects": s.subjects(),
                "validated": s.validated().labels(&n),
                "strengths": rows,
            }))
        }
    })
}

fn cochran(a: &CochranArgs, seed: u64, format: Format) -> Outcome<String> {
    let (_, m) = load_inputs(&a.inputs)?;
    let convention = if a.df_minus_one {
        DfConvention::ClassSizeMinusOne
    } else {
        DfConvention::ClassSize
    };
    let r: CochranResult = cochran_q_with(&m, convention)?;
    let calibration = a
        .calibrate
        .map(|trials| {
            let u: Vec<usize> = m.row_totals().iter().map(|&x| x as usize).collect();
            null_calibration(
                m.subjects(),
                &u,
                m.sites(),
                Some(r.q),
                CalibrationOptions::new(trials, seed),
            )
        })
        .transpose()?;
    Ok(match format {
        Format::Json => {
            let mut v = json!({
                "narrative_id": m.narrative_id(),
                "q": r.q,
                "df": r.df,
                "p": r.p,
                "sum_squares": r.sum_squares,
                "denominator": r.denominator,
            });
            if a.partition {
                v["df_convention"] = json!(convention);
                v["components"] = json!(r.components);
            }
            if let Some(c) = &calibration {
                v["calibration"] = json!(c);
            }
            to_json(&v)
        }
        Format::Tsv => {
            let mut out = String::from("narrative\tq\tdf\tp\n");
            let _ = writeln!(out, "{}\t{:.2}\t{}\t{}", m.narrative_id(), r.q, r.df, fmt_p(r.p));
            if a.partition {
                out.push_str("\nstrength\tsites\tq\tdf\tp\n");
                for c in &r.components {
                    let p = c.p.map_or("NA".to_string(), fmt_p);
                    let _ = writeln!(out, "{}\t{}\t{:.2}\t{}\t{p}", c.strength, c.site_count, c.q, c.df);
                }
            }
            if let Some(c) = &calibration {
                out.push_str("\ntrials\tseed\tdegenerate\trejection_rate_05\tempirical_p\n");
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}",
                    c.trials,
                    c.seed,
                    c.degenerate,
                    c.rejection_rate_05.map_or("NA".to_string(), |x| format!("{x:.4}")),
                    c.empirical_p.map_or("NA".to_string(), fmt_p),
                );
                out.push_str("\nlevel\tempirical\tchi_square\n");
                for q in &c.quantiles {
                    let _ = writeln!(out, "{}\t{:.2}\t{:.2}", q.level, q.empirical, q.chi_square);
                }
            }
            out
        }
    })
}

/// p-values span many orders of magnitude; two decimals would hide them.
fn fmt_p(p: f64) -> String {
    format!("{p:.3e}")
}

fn predict(
    method: Algorithm,
    n: &Narrative,
    coding: Option<&Path>,
    lexicon: &CueLexicon,
) -> Outcome<(BoundarySet, Vec<TraceStep>)> {
    Ok(match method {
        Algorithm::Cue => (cue_segment(n, lexicon), Vec::new()),
        Algorithm::Pause => (pause_segment(n), Vec::new()),
        Algorithm::Np => {
            let path = coding.ok_or_else(|| invalid("--method np needs --coding"))?;
            let c = load_coding(path, n)?;
            let seg = np_segment(&c);
            (normalize_to_sites(&seg.boundaries, &c)?.sites, seg.trace)
        }
    })
}

fn method_name(m: Algorithm) -> &'static str {
    match m {
        Algorithm::Np => "np",
        Algorithm::Cue => "cue",
        Algorithm::Pause => "pause",
    }
}

fn segment(a: &SegmentArgs, lexicon: &CueLexicon, format: Format) -> Outcome<String> {
    if a.trace && a.method != Algorithm::Np {
        return Err(invalid("--trace is only available for --method np"));
    }
    let n = load_narrative(&a.narrative)?;
    let (sites, trace) = predict(a.method, &n, a.coding.as_deref(), lexicon)?;
    Ok(match format {
        Format::Json => {
            let mut v = json!({
                "narrative_id": n.id(),
                "method": method_name(a.method),
                "site_count": sites.site_count(),
                "sites": sites.labels(&n),
                "site_indices": sites.sites(),
            });
            if a.trace {
                v["trace"] = Value::Array(
                    trace
                        .iter()
                        .map(|s| {
                            json!({
                                "fic": s.fic,
                                "checks": s.checks.iter().map(|(t, ok)| json!({"test": t.to_string(), "linked": ok})).collect::<Vec<_>>(),
                                "boundary": s.boundary,
                                "segment": s.segment,
                            })
                        })
                        .collect(),
                );
            }
            to_json(&v)
        }
        Format::Tsv => {
            let mut out = String::from("site\tlabel\n");
            for (k, label) in sites.sites().iter().zip(sites.labels(&n)) {
                let _ = writeln!(out, "{k}\t{label}");
            }
            if a.trace {
                out.push_str("\nfic\tchecks\tdecision\tsegment\n");
                for s in &trace {
                    out.push_str(&s.to_tsv());
                    out.push('\n');
                }
            }
            out
        }
    })
}

fn metrics_json(m: &EvalMetrics) -> Value {
    json!({
        "recall": ratio_json(m.recall),
        "precision": ratio_json(m.precision),
        "fallout": ratio_json(m.fallout),
        "error": ratio_json(m.error),
    })
}

const EVAL_HEADER: &str = "method\ttarget\trecall\tprecision\tfallout\terror";

fn eval(a: &EvalArgs, lexicon: &CueLexicon, format: Format) -> Outcome<String> {
    let (n, m) = load_inputs(&a.inputs)?;
    let subjects = m.subjects() as u32;
    let mode = match (a.threshold, a.exact) {
        (Some(t), _) => TargetMode::Threshold(t),
        (_, Some(t)) => TargetMode::Exact(t),
        _ => TargetMode::majority(m.subjects()),
    };
    let t = match mode {
        TargetMode::Threshold(t) | TargetMode::Exact(t) => t,
    };
    if t == 0 || t > subjects {
        return Err(invalid(format!("target strength {t} outside 1..={subjects}")));
    }
    let target = target_set(&m, mode);

    if a.method == EvalMethod::Humans {
        let how = if a.leave_one_out {
            HumanTarget::LeaveOneOut
        } else {
            HumanTarget::Panel
        };
        let h = evaluate_humans(&m, mode, how);
        return Ok(match format {
            Format::Json => to_json(&json!({
                "narrative_id": n.id(),
                "method": "humans",
                "target": mode.to_string(),
                "reference": how,
                "subjects": h.subjects.iter().map(|s| json!({
                    "subject": s.subject,
                    "counts": s.counts,
                    "metrics": metrics_json(&s.metrics),
                })).collect::<Vec<_>>(),
                "summary": h.summary,
            })),
            Format::Tsv => {
                let mut out = String::from("subject\ttarget\trecall\tprecision\tfallout\terror\n");
                for s in &h.subjects {
                    let _ = writeln!(out, "{}\t{}\t{}", s.subject, mode, metrics_tsv(&s.metrics));
                }
                let sm = &h.summary;
                let _ = writeln!(
                    out,
                    "mean\t{mode}\t{}\t{}\t{}\t{}",
                    fmt2(sm.recall.mean),
                    fmt2(sm.precision.mean),
                    fmt2(sm.fallout.mean),
                    fmt2(sm.error.mean)
                );
                out
            }
        });
    }
    if a.leave_one_out {
        return Err(invalid("--leave-one-out applies to --method humans only"));
    }
    let algorithm = match a.method {
        EvalMethod::Np => Algorithm::Np,
        EvalMethod::Cue => Algorithm::Cue,
        EvalMethod::Pause => Algorithm::Pause,
        EvalMethod::Humans => unreachable!(),
    };
    let (pred, _) = predict(algorithm, &n, a.coding.as_deref(), lexicon)?;
    let cc = confusion(&pred, &target, m.sites())?;
    let mt = metrics(cc);
    Ok(match format {
        Format::Json => to_json(&json!({
            "narrative_id": n.id(),
            "method": method_name(algorithm),
            "target": mode.to_string(),
            "predicted": pred.labels(&n),
            "target_sites": target.labels(&n),
            "counts": cc,
            "metrics": metrics_json(&mt),
        })),
        Format::Tsv => format!(
            "{EVAL_HEADER}\n{}\t{mode}\t{}\n",
            method_name(algorithm),
            metrics_tsv(&mt)
        ),
    })
}

fn metrics_tsv(m: &EvalMetrics) -> String {
    format!(
        "{}\t{}\t{}\t{}",
        fmt_ratio(m.recall),
        fmt_ratio(m.precision),
        fmt_ratio(m.fallout),
        fmt_ratio(m.error)
    )
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    narratives: Vec<ManifestEntry>,
    #[serde(default)]
    cues: Option<PathBuf>,
    #[serde(default)]
    format: Option<Format>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestEntry {
    narrative: PathBuf,
    annotations: PathBuf,
    #[serde(default)]
    coding: Option<PathBuf>,
}

fn batch_report(a: &ReportArgs, cli: &Cli) -> Outcome<String> {
    let bytes = read(&a.batch)?;
    let manifest: Manifest = serde_json::from_slice(&bytes)
        .map_err(|e| invalid(format!("{}: manifest: {e}", a.batch.display())))?;
    if manifest.narratives.is_empty() {
        return Err(invalid(format!("{}: manifest lists no narratives", a.batch.display())));
    }
    let base = a.batch.parent().unwrap_or(Path::new("."));
    let resolve = |p: &Path| base.join(p);

    let cues = cli.cues.clone().or_else(|| manifest.cues.as_deref().map(resolve));
    let lex = lexicon(cues.as_deref())?;
    let mut items = Vec::with_capacity(manifest.narratives.len());
    for e in &manifest.narratives {
        let n = load_narrative(&resolve(&e.narrative))?;
        let m = load_annotations(&resolve(&e.annotations), &n)?;
        let c = e.coding.as_deref().map(|p| load_coding(&resolve(p), &n)).transpose()?;
        items.push(BatchItem::new(n, m, c)?);
    }
    let batch = Batch::new(items, lex)?;
    let r = report::report(&batch, Execution::default())?;

    let default = manifest.format.unwrap_or(Format::Tsv);
    let text = match format_of(cli, default) {
        Format::Tsv => r.to_tsv(),
        Format::Json => {
            let mut s = r.to_json();
            s.push('\n');
            s
        }
    };
    match &a.out {
        None => Ok(text),
        Some(path) => {
            fs::write(path, text).map_err(|source| {
                Failure::from(segkit::Error::Io {
                    path: path.clone(),
                    source,
                })
            })?;
            Ok(String::new())
        }
    }
}

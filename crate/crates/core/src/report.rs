//! Batch reports: agreement per narrative, mean scores per method at the
//! majority threshold, and recall/precision broken down by exact boundary
//! strength. Rendered as TSV (two decimals, `NA` for undefined) or JSON
//! (full precision, `null` for undefined).

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::agreement::{self, percent_agreement, AgreementReport, AgreementSummary};
use crate::corpus::{AnnotationMatrix, BoundarySet, FicCoding, Narrative};
use crate::error::{Error, Result};
use crate::eval::{
    evaluate_algorithm, evaluate_humans, HumanTarget, MetricSummary, TargetMode,
};
use crate::par::{self, Execution};
use crate::segmenters::{cue_segment, normalize_to_sites, np_segment, pause_segment, CueLexicon};
use crate::stats::{self, Summary};
use crate::Ratio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Np,
    Cue,
    Pause,
    Humans,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Np, Method::Cue, Method::Pause, Method::Humans];
    pub const ALGORITHMS: [Method; 3] = [Method::Np, Method::Cue, Method::Pause];

    pub fn label(self) -> &'static str {
        match self {
            Method::Np => "NP",
            Method::Cue => "Cue",
            Method::Pause => "Pause",
            Method::Humans => "Humans",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone)]
pub struct BatchItem {
    pub narrative: Narrative,
    pub annotations: AnnotationMatrix,
    pub coding: Option<FicCoding>,
}

impl BatchItem {
    pub fn new(
        narrative: Narrative,
        annotations: AnnotationMatrix,
        coding: Option<FicCoding>,
    ) -> Result<Self> {
        let id = narrative.id();
        if annotations.narrative_id() != id || annotations.sites() != narrative.site_count() {
            return Err(Error::schema(
                id,
                format!(
                    "mixed site universes: narrative has {} sites, annotations {:?} have {}",
                    narrative.site_count(),
                    annotations.narrative_id(),
                    annotations.sites()
                ),
            ));
        }
        if let Some(c) = &coding {
            if c.narrative_id() != id || c.site_count() != narrative.site_count() {
                return Err(Error::schema(id, "coding belongs to a different narrative"));
            }
        }
        Ok(Self {
            narrative,
            annotations,
            coding,
        })
    }

    /// Site-level boundaries proposed by an algorithm. `None` for the NP
    /// method without a coding, and for `Humans`.
    pub fn predict(&self, method: Method, lexicon: &CueLexicon) -> Option<BoundarySet> {
        match method {
            Method::Np => {
                let coding = self.coding.as_ref()?;
                let seg = np_segment(coding);
                Some(
                    normalize_to_sites(&seg.boundaries, coding)
                        .expect("NP boundaries are adjacent pairs of the coding")
                        .sites,
                )
            }
            Method::Cue => Some(cue_segment(&self.narrative, lexicon)),
            Method::Pause => Some(pause_segment(&self.narrative)),
            Method::Humans => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Batch {
    items: Vec<BatchItem>,
    lexicon: CueLexicon,
}

impl Batch {
    pub fn new(items: Vec<BatchItem>, lexicon: CueLexicon) -> Result<Self> {
        let mut seen = HashSet::new();
        for item in &items {
            if !seen.insert(item.narrative.id().to_string()) {
                return Err(Error::schema(
                    "batch",
                    format!("duplicate narrative id {:?}", item.narrative.id()),
                ));
            }
        }
        Ok(Self { items, lexicon })
    }

    pub fn items(&self) -> &[BatchItem] {
        &self.items
    }

    pub fn lexicon(&self) -> &CueLexicon {
        &self.lexicon
    }
}

/// Mean scores for one method at the majority threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodRow {
    pub method: Method,
    /// Narratives (algorithms) or subject-narrative pairs (humans) scored.
    pub observations: usize,
    pub scores: MetricSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrengthRow {
    pub method: Method,
    /// Indexed by strength `1..=levels`.
    pub recall: Vec<Summary>,
    pub precision: Vec<Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrengthTable {
    pub levels: u32,
    /// Mean number of sites of each exact strength per narrative.
    pub sites: Vec<Summary>,
    pub rows: Vec<StrengthRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub agreement: Vec<AgreementReport>,
    pub agreement_summary: AgreementSummary,
    pub methods: Vec<MethodRow>,
    pub strengths: StrengthTable,
}

struct NarrativeScores {
    agreement: AgreementReport,
    // per method: validated metrics (algorithms: one, humans: per subject)
    validated: Vec<(Method, Vec<crate::eval::EvalMetrics>)>,
    // per method, per strength level: metrics
    by_strength: Vec<(Method, Vec<Vec<crate::eval::EvalMetrics>>)>,
    strength_counts: Vec<usize>,
}

fn score_item(item: &BatchItem, lexicon: &CueLexicon, levels: u32) -> Result<NarrativeScores> {
    let m = &item.annotations;
    let majority = TargetMode::majority(m.subjects());
    let mut validated = Vec::new();
    let mut by_strength = Vec::new();
    for method in Method::ALL {
        let (v, s) = if method == Method::Humans {
            let v = evaluate_humans(m, majority, HumanTarget::Panel)
                .subjects
                .into_iter()
                .map(|s| s.metrics)
                .collect();
            let s = (1..=levels)
                .map(|t| {
                    evaluate_humans(m, TargetMode::Exact(t), HumanTarget::Panel)
                        .subjects
                        .into_iter()
                        .map(|s| s.metrics)
                        .collect()
                })
                .collect();
            (v, s)
        } else {
            match item.predict(method, lexicon) {
                Some(pred) => {
                    let v = vec![evaluate_algorithm(&pred, m, majority)?];
                    let s = (1..=levels)
                        .map(|t| Ok(vec![evaluate_algorithm(&pred, m, TargetMode::Exact(t))?]))
                        .collect::<Result<_>>()?;
                    (v, s)
                }
                None => (Vec::new(), vec![Vec::new(); levels as usize]),
            }
        };
        validated.push((method, v));
        by_strength.push((method, s));
    }
    let strengths = agreement::boundary_strengths(m);
    let strength_counts = (1..=levels).map(|t| strengths.exact(t).len()).collect();
    Ok(NarrativeScores {
        agreement: percent_agreement(m),
        validated,
        by_strength,
        strength_counts,
    })
}

/// Builds the full report. Narratives are scored in parallel when enabled;
/// rows always follow batch order.
pub fn report(batch: &Batch, exec: Execution) -> Result<Report> {
    let levels = batch
        .items
        .iter()
        .map(|i| i.annotations.subjects() as u32)
        .max()
        .unwrap_or(0);
    let scored = par::map_slice(exec, &batch.items, |item| {
        score_item(item, &batch.lexicon, levels)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let agreement: Vec<AgreementReport> = scored.iter().map(|s| s.agreement.clone()).collect();
    let agreement_summary = agreement::summarize(&agreement);

    let methods = Method::ALL
        .iter()
        .enumerate()
        .map(|(k, &method)| {
            let all: Vec<_> = scored.iter().flat_map(|s| s.validated[k].1.iter()).collect();
            MethodRow {
                method,
                observations: all.len(),
                scores: MetricSummary::of(all.iter().copied()),
            }
        })
        .collect();

    let sites = (0..levels as usize)
        .map(|t| {
            stats::summarize(
                scored
                    .iter()
                    .map(|s| Some(Ratio::from_integer(s.strength_counts[t] as u64))),
            )
        })
        .collect();
    let rows = Method::ALL
        .iter()
        .enumerate()
        .map(|(k, &method)| {
            let level = |t: usize, f: fn(&crate::eval::EvalMetrics) -> Option<Ratio>| {
                stats::summarize(
                    scored
                        .iter()
                        .flat_map(|s| s.by_strength[k].1[t].iter())
                        .map(f),
                )
            };
            StrengthRow {
                method,
                recall: (0..levels as usize).map(|t| level(t, |m| m.recall)).collect(),
                precision: (0..levels as usize).map(|t| level(t, |m| m.precision)).collect(),
            }
        })
        .collect();

    Ok(Report {
        agreement,
        agreement_summary,
        methods,
        strengths: StrengthTable {
            levels,
            sites,
            rows,
        },
    })
}

/// Two-decimal rendering; `NA` for undefined.
pub fn fmt2(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.2}"),
        None => "NA".to_string(),
    }
}

pub fn fmt_ratio(r: Option<Ratio>) -> String {
    fmt2(r.as_ref().map(stats::to_f64))
}

pub const AGREEMENT_HEADER: &str = "narrative\tsites\tagreement\tboundary_sites\tboundary_observed\tboundary_possible\tboundary_agreement\tnonboundary_sites\tnonboundary_observed\tnonboundary_possible\tnonboundary_agreement";

pub fn agreement_tsv_row(r: &AgreementReport) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        r.narrative_id,
        r.sites,
        fmt_ratio(r.total.percent()),
        r.boundary_sites,
        r.boundary.observed,
        r.boundary.possible,
        fmt_ratio(r.boundary.percent()),
        r.non_boundary_sites(),
        r.non_boundary.observed,
        r.non_boundary.possible,
        fmt_ratio(r.non_boundary.percent()),
    )
}

impl Report {
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str("# agreement with the majority opinion\n");
        out.push_str(AGREEMENT_HEADER);
        out.push('\n');
        for r in &self.agreement {
            out.push_str(&agreement_tsv_row(r));
            out.push('\n');
        }
        let s = &self.agreement_summary;
        let mean_sites = stats::mean_variance(
            &self.agreement.iter().map(|r| r.sites as f64).collect::<Vec<_>>(),
        )
        .0;
        let _ = writeln!(
            out,
            "mean\t{}\t{}\t\t\t\t{}\t\t\t\t{}",
            fmt2(mean_sites),
            fmt2(s.total.mean),
            fmt2(s.boundary.mean),
            fmt2(s.non_boundary.mean)
        );
        // Variances are small; four decimals keep them visible.
        let fmt4 = |v: Option<f64>| v.map_or("NA".to_string(), |x| format!("{x:.4}"));
        let _ = writeln!(
            out,
            "variance (population)\t\t{}\t\t\t\t{}\t\t\t\t{}",
            fmt4(s.total.variance),
            fmt4(s.boundary.variance),
            fmt4(s.non_boundary.variance)
        );

        out.push_str("\n# mean scores against majority boundaries\n");
        out.push_str("method\trecall\tprecision\tfallout\terror\trecall_var\tprecision_var\tfallout_var\terror_var\tn\n");
        for row in &self.methods {
            let sc = &row.scores;
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                row.method,
                fmt2(sc.recall.mean),
                fmt2(sc.precision.mean),
                fmt2(sc.fallout.mean),
                fmt2(sc.error.mean),
                fmt4(sc.recall.variance),
                fmt4(sc.precision.variance),
                fmt4(sc.fallout.variance),
                fmt4(sc.error.variance),
                row.observations
            );
        }

        out.push_str("\n# recall and precision by boundary strength\n");
        let st = &self.strengths;
        out.push_str("row");
        for t in 1..=st.levels {
            let _ = write!(out, "\tT={t}");
        }
        out.push('\n');
        out.push('N');
        for s in &st.sites {
            let _ = write!(out, "\t{}", fmt2(s.mean));
        }
        out.push('\n');
        for row in &st.rows {
            for (name, cells) in [("recall", &row.recall), ("precision", &row.precision)] {
                let _ = write!(out, "{} {name}", row.method);
                for s in cells.iter() {
                    let _ = write!(out, "\t{}", fmt2(s.mean));
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

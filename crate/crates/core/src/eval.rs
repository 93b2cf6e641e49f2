//! Information-retrieval scoring of proposed boundaries against the
//! subjects' boundaries.
//!
//! ```text
//!                      subjects
//!                  boundary  non-boundary
//! algorithm  yes      a          b
//!            no       c          d
//! ```
//!
//! recall = a/(a+c), precision = a/(a+b), fallout = b/(b+d),
//! error = (b+c)/(a+b+c+d). A score whose denominator is zero is NA.

use std::fmt;

use serde::Serialize;

use crate::agreement::{boundary_strengths, majority_threshold};
use crate::corpus::{AnnotationMatrix, BoundarySet};
use crate::error::{Error, Result};
use crate::stats::{summarize, Summary};
use crate::{ratio, Ratio};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConfusionCounts {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }
}

impl std::ops::Add for ConfusionCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            a: self.a + o.a,
            b: self.b + o.b,
            c: self.c + o.c,
            d: self.d + o.d,
        }
    }
}

pub fn confusion(
    predicted: &BoundarySet,
    target: &BoundarySet,
    sites: usize,
) -> Result<ConfusionCounts> {
    for (name, set) in [("predicted", predicted), ("target", target)] {
        if let Some(&k) = set.sites().range(sites..).next() {
            return Err(Error::schema(
                name,
                format!("site index {k} out of range for {sites} sites"),
            ));
        }
    }
    let a = predicted.sites().intersection(target.sites()).count() as u64;
    let b = predicted.len() as u64 - a;
    let c = target.len() as u64 - a;
    Ok(ConfusionCounts {
        a,
        b,
        c,
        d: sites as u64 - a - b - c,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EvalMetrics {
    #[serde(with = "crate::ratio_serde")]
    pub recall: Option<Ratio>,
    #[serde(with = "crate::ratio_serde")]
    pub precision: Option<Ratio>,
    #[serde(with = "crate::ratio_serde")]
    pub fallout: Option<Ratio>,
    #[serde(with = "crate::ratio_serde")]
    pub error: Option<Ratio>,
}

pub fn metrics(cc: ConfusionCounts) -> EvalMetrics {
    let ConfusionCounts { a, b, c, d } = cc;
    EvalMetrics {
        recall: ratio(a, a + c),
        precision: ratio(a, a + b),
        fallout: ratio(b, b + d),
        error: ratio(b + c, a + b + c + d),
    }
}

/// Which subject boundaries an evaluation compares against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "strength")]
pub enum TargetMode {
    /// Sites marked by at least `t` subjects.
    Threshold(u32),
    /// Sites marked by exactly `t` subjects.
    Exact(u32),
}

impl TargetMode {
    /// Threshold at the panel's majority, 4 of 7.
    pub fn majority(subjects: usize) -> Self {
        TargetMode::Threshold(majority_threshold(subjects))
    }
}

impl fmt::Display for TargetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetMode::Threshold(t) => write!(f, "T>={t}"),
            TargetMode::Exact(t) => write!(f, "T={t}"),
        }
    }
}

pub fn target_set(m: &AnnotationMatrix, mode: TargetMode) -> BoundarySet {
    let strengths = boundary_strengths(m);
    match mode {
        TargetMode::Threshold(t) => strengths.cumulative(t),
        TargetMode::Exact(t) => strengths.exact(t),
    }
}

fn check_universe(predicted: &BoundarySet, m: &AnnotationMatrix) -> Result<()> {
    if predicted.site_count() != m.sites() {
        return Err(Error::schema(
            "predicted",
            format!(
                "prediction covers {} sites, annotations {}",
                predicted.site_count(),
                m.sites()
            ),
        ));
    }
    Ok(())
}

pub fn evaluate_algorithm_counts(
    predicted: &BoundarySet,
    m: &AnnotationMatrix,
    mode: TargetMode,
) -> Result<ConfusionCounts> {
    check_universe(predicted, m)?;
    confusion(predicted, &target_set(m, mode), m.sites())
}

pub fn evaluate_algorithm(
    predicted: &BoundarySet,
    m: &AnnotationMatrix,
    mode: TargetMode,
) -> Result<EvalMetrics> {
    evaluate_algorithm_counts(predicted, m, mode).map(metrics)
}

/// Mean and population variance of each score over a set of evaluations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSummary {
    pub recall: Summary,
    pub precision: Summary,
    pub fallout: Summary,
    pub error: Summary,
}

impl MetricSummary {
    pub fn of<'a>(items: impl IntoIterator<Item = &'a EvalMetrics> + Clone) -> Self {
        let pick = |f: fn(&EvalMetrics) -> Option<Ratio>| summarize(items.clone().into_iter().map(f));
        Self {
            recall: pick(|m| m.recall),
            precision: pick(|m| m.precision),
            fallout: pick(|m| m.fallout),
            error: pick(|m| m.error),
        }
    }
}

/// How the target is derived when scoring an individual subject.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HumanTarget {
    /// The full panel, including the subject being scored.
    #[default]
    Panel,
    /// The panel without the subject being scored.
    LeaveOneOut,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubjectScore {
    pub subject: String,
    pub counts: ConfusionCounts,
    pub metrics: EvalMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HumanEvaluation {
    pub narrative_id: String,
    pub mode: TargetMode,
    pub subjects: Vec<SubjectScore>,
    pub summary: MetricSummary,
}

fn subject_set(m: &AnnotationMatrix, subject: usize) -> BoundarySet {
    let sites = m
        .row(subject)
        .iter()
        .enumerate()
        .filter_map(|(k, &c)| c.then_some(k));
    BoundarySet::new(m.narrative_id(), m.sites(), sites).expect("row within universe")
}

fn leave_one_out_target(m: &AnnotationMatrix, subject: usize, mode: TargetMode) -> BoundarySet {
    let sites = m
        .col_totals()
        .iter()
        .zip(m.row(subject))
        .enumerate()
        .filter(|(_, (&t, &own))| {
            let others = t - u32::from(own);
            match mode {
                TargetMode::Threshold(th) => others >= th,
                TargetMode::Exact(e) => others == e,
            }
        })
        .map(|(k, _)| k);
    BoundarySet::new(m.narrative_id(), m.sites(), sites).expect("column within universe")
}

/// Scores every subject's own boundaries as if they were an algorithm.
pub fn evaluate_humans(
    m: &AnnotationMatrix,
    mode: TargetMode,
    target: HumanTarget,
) -> HumanEvaluation {
    let panel = target_set(m, mode);
    let subjects: Vec<SubjectScore> = (0..m.subjects())
        .map(|s| {
            let own = subject_set(m, s);
            let reference = match target {
                HumanTarget::Panel => panel.clone(),
                HumanTarget::LeaveOneOut => leave_one_out_target(m, s, mode),
            };
            let counts = confusion(&own, &reference, m.sites()).expect("same universe");
            SubjectScore {
                subject: m.subject_ids()[s].clone(),
                counts,
                metrics: metrics(counts),
            }
        })
        .collect();
    let summary = MetricSummary::of(subjects.iter().map(|s| &s.metrics));
    HumanEvaluation {
        narrative_id: m.narrative_id().to_string(),
        mode,
        subjects,
        summary,
    }
}

/// Scores broken down by boundary strength for one prediction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrengthReport {
    /// `(t, metrics against sites with exactly t subjects)` for t = 1..=i.
    pub exact: Vec<(u32, EvalMetrics)>,
    /// Metrics against the majority threshold.
    pub validated: EvalMetrics,
}

pub fn strength_report(predicted: &BoundarySet, m: &AnnotationMatrix) -> Result<StrengthReport> {
    check_universe(predicted, m)?;
    let exact = (1..=m.subjects() as u32)
        .map(|t| Ok((t, evaluate_algorithm(predicted, m, TargetMode::Exact(t))?)))
        .collect::<Result<_>>()?;
    Ok(StrengthReport {
        exact,
        validated: evaluate_algorithm(predicted, m, TargetMode::majority(m.subjects()))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(sites: &[usize], n: usize) -> BoundarySet {
        BoundarySet::new("n", n, sites.iter().copied()).unwrap()
    }

    fn cc(a: u64, b: u64, c: u64, d: u64) -> ConfusionCounts {
        ConfusionCounts { a, b, c, d }
    }

    #[test]
    fn confusion_examples() {
        assert_eq!(confusion(&set(&[2, 9], 11), &set(&[2, 9], 11), 11).unwrap(), cc(2, 0, 0, 9));
        assert_eq!(confusion(&set(&[], 11), &set(&[2, 9], 11), 11).unwrap(), cc(0, 0, 2, 9));
        // Site by site: 0 b, 2 a, 5 b, 9 c, seven others d.
        assert_eq!(
            confusion(&set(&[0, 2, 5], 11), &set(&[2, 9], 11), 11).unwrap(),
            cc(1, 2, 1, 7)
        );
        assert!(confusion(&set(&[12], 13), &set(&[], 11), 11).is_err());
    }

    #[test]
    fn metric_examples() {
        let m = metrics(cc(1, 0, 0, 10));
        assert_eq!(m.recall, Some(Ratio::from_integer(1)));
        assert_eq!(m.precision, Some(Ratio::from_integer(1)));
        assert_eq!(m.fallout, Some(Ratio::from_integer(0)));
        assert_eq!(m.error, Some(Ratio::from_integer(0)));

        let m = metrics(cc(2, 3, 1, 94));
        assert_eq!(m.recall, Some(Ratio::new(2, 3)));
        assert_eq!(m.precision, Some(Ratio::new(2, 5)));
        assert_eq!(m.fallout, Some(Ratio::new(3, 97)));
        assert_eq!(m.error, Some(Ratio::new(1, 25)));

        let m = metrics(cc(0, 0, 0, 5));
        assert_eq!((m.recall, m.precision), (None, None));
    }

    fn excerpt() -> AnnotationMatrix {
        let cols = [6u32, 0, 0, 1, 1, 2, 0, 0, 1, 0, 7];
        let rows: Vec<Vec<u8>> = (0..7)
            .map(|i| cols.iter().map(|&t| u8::from(i < t)).collect())
            .collect();
        AnnotationMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn exact_match_scores_perfectly() {
        let m = excerpt();
        let r = evaluate_algorithm(&set(&[0, 10], 11), &m, TargetMode::Threshold(4)).unwrap();
        assert_eq!(r.recall, Some(Ratio::from_integer(1)));
        assert_eq!(r.precision, Some(Ratio::from_integer(1)));
    }

    #[test]
    fn empty_exact_class_has_na_recall() {
        let m = excerpt();
        let r = evaluate_algorithm(&set(&[0], 11), &m, TargetMode::Exact(3)).unwrap();
        assert_eq!(r.recall, None);
        assert!(evaluate_algorithm(&set(&[0], 12), &m, TargetMode::Exact(3)).is_err());
    }

    #[test]
    fn humans() {
        let m = excerpt();
        let h = evaluate_humans(&m, TargetMode::Threshold(4), HumanTarget::Panel);
        // Rows 0..6 all mark site 10; rows 0..5 mark site 0.
        assert_eq!(h.subjects[0].metrics.recall, Some(Ratio::from_integer(1)));
        assert_eq!(h.subjects[6].metrics.recall, Some(Ratio::new(1, 2)));
        assert_eq!(h.summary.recall.exact_mean, Some(Ratio::new(13, 14)));

        let all = AnnotationMatrix::from_rows(&[vec![1; 5], vec![1, 0, 0, 0, 0], vec![1, 1, 0, 0, 0]])
            .unwrap();
        let h = evaluate_humans(&all, TargetMode::Threshold(2), HumanTarget::Panel);
        assert_eq!(h.subjects[0].metrics.recall, Some(Ratio::from_integer(1)));
        assert_eq!(h.subjects[0].metrics.precision, Some(Ratio::new(2, 5)));
    }

    #[test]
    fn leave_one_out_excludes_self() {
        // Site 0 marked by subjects 0 and 1 only; threshold 2 of the others.
        let m = AnnotationMatrix::from_rows(&[vec![1, 0], vec![1, 0], vec![0, 0]]).unwrap();
        let h = evaluate_humans(&m, TargetMode::Threshold(2), HumanTarget::LeaveOneOut);
        assert_eq!(h.subjects[0].counts, cc(0, 1, 0, 1));
        assert_eq!(h.subjects[2].counts, cc(0, 0, 1, 1));
    }

    #[test]
    fn strength_breakdown() {
        let m = excerpt();
        let r = strength_report(&set(&[0, 3, 10], 11), &m).unwrap();
        assert_eq!(r.exact.len(), 7);
        assert_eq!(r.exact[0].1.recall, Some(Ratio::new(1, 3)));
        assert_eq!(r.exact[2].1.recall, None);
        assert_eq!(r.exact[6].1.recall, Some(Ratio::from_integer(1)));
        assert_eq!(r.validated.recall, Some(Ratio::from_integer(1)));
    }
}

//! Majority opinion, percent agreement and boundary strength.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::corpus::{AnnotationMatrix, BoundarySet};
use crate::stats::{self, Summary};
use crate::{ratio, Ratio};

/// Smallest column total that constitutes a majority: `ceil((i + 1) / 2)`,
/// i.e. 4 of 7.
pub fn majority_threshold(subjects: usize) -> u32 {
    (subjects / 2 + 1) as u32
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MajorityOpinion {
    pub threshold: u32,
    pub boundary: Vec<bool>,
}

impl MajorityOpinion {
    pub fn boundary_sites(&self) -> impl Iterator<Item = usize> + '_ {
        self.boundary
            .iter()
            .enumerate()
            .filter_map(|(k, &b)| b.then_some(k))
    }
}

pub fn majority_opinion(m: &AnnotationMatrix) -> MajorityOpinion {
    let threshold = majority_threshold(m.subjects());
    MajorityOpinion {
        threshold,
        boundary: m.col_totals().iter().map(|&t| t >= threshold).collect(),
    }
}

/// Observed versus possible agreements with the majority for one class of
/// sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ClassAgreement {
    pub observed: u64,
    pub possible: u64,
}

impl ClassAgreement {
    /// `None` when the class has no sites.
    pub fn percent(&self) -> Option<Ratio> {
        ratio(self.observed, self.possible)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgreementReport {
    pub narrative_id: String,
    pub subjects: usize,
    pub sites: usize,
    pub boundary_sites: usize,
    pub total: ClassAgreement,
    pub boundary: ClassAgreement,
    pub non_boundary: ClassAgreement,
}

impl AgreementReport {
    pub fn non_boundary_sites(&self) -> usize {
        self.sites - self.boundary_sites
    }
}

pub fn percent_agreement(m: &AnnotationMatrix) -> AgreementReport {
    let majority = majority_opinion(m);
    let subjects = m.subjects() as u64;
    let mut boundary = ClassAgreement::default();
    let mut non_boundary = ClassAgreement::default();
    for (&t, &is_boundary) in m.col_totals().iter().zip(&majority.boundary) {
        let t = u64::from(t);
        if is_boundary {
            boundary.observed += t;
            boundary.possible += subjects;
        } else {
            non_boundary.observed += subjects - t;
            non_boundary.possible += subjects;
        }
    }
    AgreementReport {
        narrative_id: m.narrative_id().to_string(),
        subjects: m.subjects(),
        sites: m.sites(),
        boundary_sites: majority.boundary.iter().filter(|&&b| b).count(),
        total: ClassAgreement {
            observed: boundary.observed + non_boundary.observed,
            possible: boundary.possible + non_boundary.possible,
        },
        boundary,
        non_boundary,
    }
}

/// Sites grouped by how many subjects marked them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryStrengths {
    narrative_id: String,
    sites: usize,
    // exact[t] = sites with T_j == t, for t in 0..=subjects
    exact: Vec<BTreeSet<usize>>,
}

impl BoundaryStrengths {
    pub fn subjects(&self) -> usize {
        self.exact.len() - 1
    }

    fn to_set(&self, sites: BTreeSet<usize>) -> BoundarySet {
        BoundarySet::new(self.narrative_id.clone(), self.sites, sites)
            .expect("strength classes stay within the site universe")
    }

    /// Sites marked by exactly `t` subjects.
    pub fn exact(&self, t: u32) -> BoundarySet {
        let sites = self.exact.get(t as usize).cloned().unwrap_or_default();
        self.to_set(sites)
    }

    /// Sites marked by at least `t` subjects.
    pub fn cumulative(&self, t: u32) -> BoundarySet {
        let sites = self
            .exact
            .iter()
            .skip(t as usize)
            .flatten()
            .copied()
            .collect();
        self.to_set(sites)
    }

    /// The statistically validated (majority) boundaries.
    pub fn validated(&self) -> BoundarySet {
        self.cumulative(majority_threshold(self.subjects()))
    }
}

pub fn boundary_strengths(m: &AnnotationMatrix) -> BoundaryStrengths {
    let mut exact = vec![BTreeSet::new(); m.subjects() + 1];
    for (k, &t) in m.col_totals().iter().enumerate() {
        exact[t as usize].insert(k);
    }
    BoundaryStrengths {
        narrative_id: m.narrative_id().to_string(),
        sites: m.sites(),
        exact,
    }
}

/// Unweighted mean and population variance of the three percentages across
/// narratives. Narratives where a class is empty are skipped for that class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementSummary {
    pub narratives: usize,
    pub total: Summary,
    pub boundary: Summary,
    pub non_boundary: Summary,
}

pub fn summarize(reports: &[AgreementReport]) -> AgreementSummary {
    let collect = |f: &dyn Fn(&AgreementReport) -> Option<Ratio>| {
        stats::summarize(reports.iter().map(f))
    };
    AgreementSummary {
        narratives: reports.len(),
        total: collect(&|r| r.total.percent()),
        boundary: collect(&|r| r.boundary.percent()),
        non_boundary: collect(&|r| r.non_boundary.percent()),
    }
}

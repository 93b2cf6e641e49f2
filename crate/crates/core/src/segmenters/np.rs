//! Referential noun-phrase segmentation.
//!
//! Each clause after the first is tested against the running context, in
//! order:
//!
//! 1. an NP index also occurs in the previous clause (coreferential link);
//! 2. an index one inferential relation away from this clause's NPs occurs
//!    in the previous clause (inferential link);
//! 3. a third-person definite pronoun's index occurs anywhere in the
//!    current segment.
//!
//! The first test that succeeds continues the segment and adds the clause's
//! indices to it. If all three fail a boundary is placed before the clause
//! and the segment restarts from the clause's own indices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::corpus::{BoundarySet, FicCoding, SiteLink};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkTest {
    Coreferential,
    Inferential,
    PronounToSegment,
}

impl LinkTest {
    pub const CASCADE: [LinkTest; 3] = [
        LinkTest::Coreferential,
        LinkTest::Inferential,
        LinkTest::PronounToSegment,
    ];

    pub fn number(self) -> u8 {
        match self {
            LinkTest::Coreferential => 1,
            LinkTest::Inferential => 2,
            LinkTest::PronounToSegment => 3,
        }
    }
}

impl fmt::Display for LinkTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "test{}", self.number())
    }
}

/// What happened at one clause.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub fic: u32,
    /// Tests evaluated, in cascade order, with their outcome.
    pub checks: Vec<(LinkTest, bool)>,
    pub boundary: bool,
    /// Segment context (CD_S) after this clause.
    pub segment: BTreeSet<u32>,
}

impl TraceStep {
    /// The test that continued the segment, if any.
    pub fn fired(&self) -> Option<LinkTest> {
        self.checks.iter().find(|(_, ok)| *ok).map(|(t, _)| *t)
    }

    /// `fic  test1=no,test2=yes  continue  {1,2}`
    pub fn to_tsv(&self) -> String {
        let checks: Vec<String> = self
            .checks
            .iter()
            .map(|(t, ok)| format!("{t}={}", if *ok { "yes" } else { "no" }))
            .collect();
        let segment: Vec<String> = self.segment.iter().map(u32::to_string).collect();
        format!(
            "{}\t{}\t{}\t{{{}}}",
            self.fic,
            checks.join(","),
            if self.boundary { "boundary" } else { "continue" },
            segment.join(",")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NpSegmentation {
    /// Clause-level boundaries `(FIC_{n-1}, FIC_n)`.
    pub boundaries: BTreeSet<(u32, u32)>,
    pub trace: Vec<TraceStep>,
}

pub fn np_segment(coding: &FicCoding) -> NpSegmentation {
    // Relations are links between entities; either end reaches the other.
    let mut related: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    for np in coding.fics().iter().flat_map(|f| &f.nps) {
        for r in &np.inferential {
            related.entry(r.source).or_default().insert(r.target);
            related.entry(r.target).or_default().insert(r.source);
        }
    }

    let domains: Vec<BTreeSet<u32>> = coding
        .fics()
        .iter()
        .map(|f| f.nps.iter().map(|np| np.referent).collect())
        .collect();

    let mut boundaries = BTreeSet::new();
    let mut trace = Vec::with_capacity(domains.len().saturating_sub(1));
    let Some(first) = domains.first() else {
        return NpSegmentation { boundaries, trace };
    };
    let mut segment = first.clone();

    for (k, fic) in coding.fics().iter().enumerate().skip(1) {
        let current = &domains[k];
        let previous = &domains[k - 1];
        let mut checks = Vec::with_capacity(3);

        let mut linked = !current.is_disjoint(previous);
        checks.push((LinkTest::Coreferential, linked));
        if !linked {
            let inferred: BTreeSet<u32> = current
                .iter()
                .filter_map(|r| related.get(r))
                .flatten()
                .copied()
                .collect();
            linked = !inferred.is_disjoint(previous);
            checks.push((LinkTest::Inferential, linked));
        }
        if !linked {
            linked = fic
                .nps
                .iter()
                .any(|np| np.pronoun3 && segment.contains(&np.referent));
            checks.push((LinkTest::PronounToSegment, linked));
        }

        if linked {
            segment.extend(current.iter().copied());
        } else {
            boundaries.insert((coding.fics()[k - 1].index, fic.index));
            segment = current.clone();
        }
        trace.push(TraceStep {
            fic: fic.index,
            checks,
            boundary: !linked,
            segment: segment.clone(),
        });
    }
    NpSegmentation { boundaries, trace }
}

/// Site-level boundaries after reducing clause boundaries to prosodic sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub sites: BoundarySet,
    /// Clause boundaries that landed on an already-occupied site.
    pub merged: usize,
    /// Clause boundaries inside the final phrase, which has no following site.
    pub dropped: usize,
}

/// Maps clause boundaries onto prosodic boundary sites. A boundary between
/// two clauses of the same phrase is assigned to the site that closes that
/// phrase; several boundaries at one site count once.
pub fn normalize_to_sites(
    boundaries: &BTreeSet<(u32, u32)>,
    coding: &FicCoding,
) -> Result<Normalized> {
    let site_count = coding.site_count();
    let mut sites = BTreeSet::new();
    let mut merged = 0;
    let mut dropped = 0;
    for &(left, right) in boundaries {
        let link = (right == left.wrapping_add(1))
            .then(|| coding.site_link(left))
            .flatten()
            .ok_or_else(|| {
                Error::schema(
                    "boundaries",
                    format!("({left},{right}) is not an adjacent FIC pair of the coding"),
                )
            })?;
        let site = match link {
            SiteLink::Site(s) => Some(s),
            SiteLink::IntraPhrase { phrase } => (phrase < site_count).then_some(phrase),
        };
        match site {
            Some(s) => {
                if !sites.insert(s) {
                    merged += 1;
                }
            }
            None => dropped += 1,
        }
    }
    Ok(Normalized {
        sites: BoundarySet::new(coding.narrative_id(), site_count, sites)?,
        merged,
        dropped,
    })
}

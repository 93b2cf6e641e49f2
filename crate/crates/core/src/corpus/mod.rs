//! Transcripts, annotator matrices and FIC/NP codings.
//!
//! Boundary sites are indexed from 0: site `k` sits between phrase `k` and
//! phrase `k + 1` of the narrative. Everything downstream joins on these
//! indices; reports translate them back to `s.p→s.p` labels.

mod annotations;
mod coding;
mod narrative;

use std::collections::BTreeSet;
use std::io::Read;

pub use annotations::AnnotationMatrix;
pub use coding::{Fic, FicCoding, InferentialRelation, ReferentialNp, RelationTag, SiteLink};
pub use narrative::{Narrative, Pause, PhraseId, ProsodicPhrase};

use crate::error::{Error, Result};

pub fn load_narrative(source: impl Read) -> Result<Narrative> {
    Narrative::from_reader(source)
}

pub fn load_annotations(source: impl Read, narrative: &Narrative) -> Result<AnnotationMatrix> {
    AnnotationMatrix::from_reader(source, narrative)
}

pub fn load_fic_coding(source: impl Read, narrative: &Narrative) -> Result<FicCoding> {
    FicCoding::from_reader(source, narrative)
}

/// A set of boundary-site indices over a fixed site universe.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BoundarySet {
    narrative_id: String,
    site_count: usize,
    sites: BTreeSet<usize>,
}

impl BoundarySet {
    pub fn new(
        narrative_id: impl Into<String>,
        site_count: usize,
        sites: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let sites: BTreeSet<usize> = sites.into_iter().collect();
        if let Some(&bad) = sites.range(site_count..).next() {
            return Err(Error::schema(
                "sites",
                format!("site index {bad} out of range for {site_count} sites"),
            ));
        }
        Ok(Self {
            narrative_id: narrative_id.into(),
            site_count,
            sites,
        })
    }

    pub fn empty(narrative_id: impl Into<String>, site_count: usize) -> Self {
        Self {
            narrative_id: narrative_id.into(),
            site_count,
            sites: BTreeSet::new(),
        }
    }

    pub fn narrative_id(&self) -> &str {
        &self.narrative_id
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    pub fn sites(&self) -> &BTreeSet<usize> {
        &self.sites
    }

    pub fn contains(&self, site: usize) -> bool {
        self.sites.contains(&site)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Site labels (`3.3→4.1`) in site order.
    pub fn labels(&self, narrative: &Narrative) -> Vec<String> {
        self.sites
            .iter()
            .filter_map(|&k| narrative.site_label(k))
            .collect()
    }
}

//! Discourse segmentation toolkit.
//!
//! Loads transcripts and annotator boundary matrices, measures agreement
//! with the majority opinion, tests it with Cochran's Q, runs three
//! single-cue segmenters (referential noun phrases, cue words, pauses) and
//! scores them against the statistically validated human boundaries.

pub mod agreement;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod par;
pub mod report;
pub mod segmenters;
pub mod significance;
pub mod stats;

pub use error::{Error, Result};

/// Exact non-negative ratio used for every agreement and evaluation score.
pub type Ratio = num_rational::Ratio<u64>;

/// `num / den`, or `None` (NA) when `den` is zero.
pub fn ratio(num: u64, den: u64) -> Option<Ratio> {
    (den != 0).then(|| Ratio::new(num, den))
}

pub(crate) mod ratio_serde {
    use serde::Serializer;

    use crate::Ratio;

    pub fn serialize<S: Serializer>(r: &Option<Ratio>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_f64(crate::stats::to_f64(r)),
            None => s.serialize_none(),
        }
    }
}

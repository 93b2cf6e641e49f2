//! The three boundary-proposing algorithms: referential noun phrases, cue
//! words and pauses.

mod cue;
mod np;
mod pause;

pub use cue::{cue_segment, first_lexical_token, normalize_token, CueLexicon};
pub use np::{np_segment, normalize_to_sites, LinkTest, Normalized, NpSegmentation, TraceStep};
pub use pause::pause_segment;

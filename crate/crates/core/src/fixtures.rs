//! Bundled example inputs.
//!
//! - `excerpt`: a twelve-phrase narrative excerpt (eleven sites) with a
//!   seven-subject matrix whose column totals are (6,0,0,1,1,2,0,0,1,0,7).
//!   The individual rows are a reconstruction consistent with those
//!   totals; only the totals are known. The FIC coding is likewise a
//!   reconstruction that reproduces the excerpt's NP boundaries.
//! - `part_whole`: one clause coded with an inferential part/whole link.
//! - `shared_phrase`: two clauses sharing one prosodic phrase.
//! - `synthetic4`: four one-phrase clauses that exercise each link test.

use crate::corpus::{AnnotationMatrix, FicCoding, Narrative};

pub const EXCERPT_NARRATIVE: &str = include_str!("../fixtures/excerpt.json");
pub const EXCERPT_ANNOTATIONS: &str = include_str!("../fixtures/excerpt-annotations.json");
pub const EXCERPT_CODING: &str = include_str!("../fixtures/excerpt-coding.json");
pub const PART_WHOLE_NARRATIVE: &str = include_str!("../fixtures/part-whole.json");
pub const PART_WHOLE_CODING: &str = include_str!("../fixtures/part-whole-coding.json");
pub const SHARED_PHRASE_NARRATIVE: &str = include_str!("../fixtures/shared-phrase.json");
pub const SHARED_PHRASE_CODING: &str = include_str!("../fixtures/shared-phrase-coding.json");
pub const SYNTHETIC4_NARRATIVE: &str = include_str!("../fixtures/synthetic4.json");
pub const SYNTHETIC4_CODING: &str = include_str!("../fixtures/synthetic4-coding.json");

fn narrative(src: &str) -> Narrative {
    Narrative::from_json(src.as_bytes()).expect("bundled narrative is valid")
}

fn coding(src: &str, n: &Narrative) -> FicCoding {
    FicCoding::from_json(src.as_bytes(), n).expect("bundled coding is valid")
}

pub fn excerpt() -> (Narrative, AnnotationMatrix, FicCoding) {
    let n = narrative(EXCERPT_NARRATIVE);
    let m = AnnotationMatrix::from_json(EXCERPT_ANNOTATIONS.as_bytes(), &n)
        .expect("bundled annotations are valid");
    let c = coding(EXCERPT_CODING, &n);
    (n, m, c)
}

pub fn part_whole() -> (Narrative, FicCoding) {
    let n = narrative(PART_WHOLE_NARRATIVE);
    let c = coding(PART_WHOLE_CODING, &n);
    (n, c)
}

pub fn shared_phrase() -> (Narrative, FicCoding) {
    let n = narrative(SHARED_PHRASE_NARRATIVE);
    let c = coding(SHARED_PHRASE_CODING, &n);
    (n, c)
}

pub fn synthetic4() -> (Narrative, FicCoding) {
    let n = narrative(SYNTHETIC4_NARRATIVE);
    let c = coding(SYNTHETIC4_CODING, &n);
    (n, c)
}

use crate::corpus::{BoundarySet, Narrative};

/// Sites whose following phrase is preceded by a pause. Only presence
/// matters; durations are ignored.
pub fn pause_segment(narrative: &Narrative) -> BoundarySet {
    let sites = narrative
        .phrases()
        .windows(2)
        .enumerate()
        .filter(|(_, pair)| pair[1].pause_before.is_some_and(|p| p.is_present()))
        .map(|(k, _)| k);
    BoundarySet::new(narrative.id(), narrative.site_count(), sites)
        .expect("sites come from the narrative")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Pause, ProsodicPhrase};

    fn phrase(id: &str, pause: Option<f64>) -> ProsodicPhrase {
        ProsodicPhrase {
            id: id.parse().unwrap(),
            text: vec!["so".into()],
            pause_before: pause.map(|seconds| Pause { seconds, truncated: false }),
            sentence_final: false,
        }
    }

    #[test]
    fn no_pauses() {
        let n = Narrative::new("n", vec![phrase("1.1", None), phrase("1.2", None)]).unwrap();
        assert!(pause_segment(&n).is_empty());
    }

    #[test]
    fn first_phrase_pause_has_no_site() {
        let n = Narrative::new(
            "n",
            vec![phrase("1.1", Some(1.0)), phrase("1.2", None), phrase("1.3", Some(0.2))],
        )
        .unwrap();
        assert_eq!(pause_segment(&n).sites().iter().copied().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn zero_length_pause_is_absent() {
        let n = Narrative::new("n", vec![phrase("1.1", None), phrase("1.2", Some(0.0))]).unwrap();
        assert!(pause_segment(&n).is_empty());
    }
}

//! Near-duplicate removal by Jaccard overlap of character 5-gram shingles.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::normalize::RawDocument;

pub const SHINGLE_CHARS: usize = 5;
pub const DEFAULT_DEDUPE_THRESHOLD: f64 = 0.95;

/// Distinct character shingles of `text`. A text shorter than one shingle
/// is its own single shingle; the empty text has none.
pub fn shingles(text: &str) -> HashSet<&str> {
    let bounds: Vec<usize> = text
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(text.len()))
        .collect();
    let n_chars = bounds.len() - 1;
    if n_chars == 0 {
        return HashSet::new();
    }
    if n_chars < SHINGLE_CHARS {
        return HashSet::from([text]);
    }
    (0..=n_chars - SHINGLE_CHARS)
        .map(|i| &text[bounds[i]..bounds[i + SHINGLE_CHARS]])
        .collect()
}

/// |A ∩ B| / |A ∪ B|; two empty sets are identical (1.0).
pub fn jaccard(a: &HashSet<&str>, b: &HashSet<&str>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let inter = small.iter().filter(|s| large.contains(*s)).count();
    inter as f64 / (a.len() + b.len() - inter) as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemovedPair {
    pub kept_id: String,
    pub removed_id: String,
    pub jaccard: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DedupeResult {
    /// Survivors in id order.
    pub kept: Vec<RawDocument>,
    /// Every pair at or above the threshold, earlier id first.
    pub removed: Vec<RemovedPair>,
}

/// For every pair whose shingle overlap reaches `threshold`, drops the
/// document with the larger id.
pub fn dedupe(docs: &[RawDocument], threshold: f64) -> Result<DedupeResult> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::Validation(format!(
            "dedupe threshold must be in [0, 1], got {threshold}"
        )));
    }
    if let Some(first) = docs.first() {
        if let Some(other) = docs.iter().find(|d| d.lang != first.lang) {
            return Err(Error::LanguageMismatch {
                expected: first.lang.clone(),
                found: other.lang.clone(),
            });
        }
    }
    let mut order: Vec<&RawDocument> = docs.iter().collect();
    order.sort_by(|a, b| a.id.cmp(&b.id));
    let sets: Vec<HashSet<&str>> = order.iter().map(|d| shingles(&d.text)).collect();

    let removed: Vec<RemovedPair> = (0..order.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let sets = &sets;
            let order = &order;
            (i + 1..order.len()).filter_map(move |j| {
                let jac = jaccard(&sets[i], &sets[j]);
                (jac >= threshold).then(|| RemovedPair {
                    kept_id: order[i].id.clone(),
                    removed_id: order[j].id.clone(),
                    jaccard: jac,
                })
            })
        })
        .collect();

    let gone: HashSet<&str> = removed.iter().map(|p| p.removed_id.as_str()).collect();
    let kept = order
        .into_iter()
        .filter(|d| !gone.contains(d.id.as_str()))
        .cloned()
        .collect();
    Ok(DedupeResult { kept, removed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(id: &str, text: &str) -> RawDocument {
        RawDocument::new(id, "en", text)
    }

    #[test]
    fn shingle_edges() {
        assert!(shingles("").is_empty());
        assert_eq!(shingles("abc"), HashSet::from(["abc"]));
        assert_eq!(shingles("abcde"), HashSet::from(["abcde"]));
        assert_eq!(shingles("abcdef"), HashSet::from(["abcde", "bcdef"]));
        assert_eq!(shingles("ñañañaña").len(), 2);
    }

    #[test]
    fn identical_documents() {
        let docs = [
            raw("b", "the same text here"),
            raw("a", "the same text here"),
        ];
        let r = dedupe(&docs, 0.95).unwrap();
        assert_eq!(r.kept.len(), 1);
        assert_eq!(r.kept[0].id, "a");
        assert_eq!(
            r.removed,
            [RemovedPair {
                kept_id: "a".into(),
                removed_id: "b".into(),
                jaccard: 1.0
            }]
        );
    }

    #[test]
    fn disjoint_documents_kept() {
        let docs = [raw("a", "aaaaaaaaaa"), raw("b", "bbbbbbbbbb")];
        let r = dedupe(&docs, 0.95).unwrap();
        assert_eq!(r.kept.len(), 2);
        assert!(r.removed.is_empty());
    }

    #[test]
    fn chains_remove_every_later_member() {
        // a~b and b~c at threshold 0.5, a and c less similar.
        let docs = [
            raw("a", "0123456789abcdef"),
            raw("b", "456789abcdefghij"),
            raw("c", "89abcdefghijklmn"),
        ];
        let sa = shingles(&docs[0].text);
        let sc = shingles(&docs[2].text);
        assert!(jaccard(&sa, &sc) < 0.5);
        let r = dedupe(&docs, 0.5).unwrap();
        let kept: Vec<_> = r.kept.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(kept, ["a"]);
        assert_eq!(r.removed.len(), 2);
    }

    #[test]
    fn mixed_languages_rejected() {
        let docs = [raw("a", "x"), RawDocument::new("b", "es", "x")];
        assert!(matches!(
            dedupe(&docs, 0.95),
            Err(Error::LanguageMismatch { .. })
        ));
        assert!(dedupe(&[], 2.0).is_err());
    }
}

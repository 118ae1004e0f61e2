//! Ranked descriptor assignment: cosine between a document's lemma counts and
//! every associate profile, keeping the top K.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::normalize::NormalizedDocument;
use crate::profile::ProfileSet;
use crate::thesaurus::DescriptorCode;

pub const DEFAULT_TOP_K: usize = 100;

/// Sparse descriptor representation of one document, in rank order.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorVector {
    pub doc_id: String,
    pub lang: String,
    entries: Vec<(DescriptorCode, f64)>,
}

impl DescriptorVector {
    /// Ranks `entries` by descending score, ties by ascending code.
    pub fn new(
        doc_id: impl Into<String>,
        lang: impl Into<String>,
        mut entries: Vec<(DescriptorCode, f64)>,
    ) -> Result<Self> {
        if let Some((code, s)) = entries.iter().find(|(_, s)| !(*s > 0.0 && *s <= 1.0)) {
            return Err(Error::Validation(format!(
                "descriptor {code}: score {s} outside (0, 1]"
            )));
        }
        let mut codes: Vec<_> = entries.iter().map(|e| e.0).collect();
        codes.sort_unstable();
        if let Some(w) = codes.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Validation(format!(
                "descriptor {} listed twice",
                w[0]
            )));
        }
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        Ok(DescriptorVector {
            doc_id: doc_id.into(),
            lang: lang.into(),
            entries,
        })
    }

    pub fn empty(doc_id: impl Into<String>, lang: impl Into<String>) -> Self {
        DescriptorVector {
            doc_id: doc_id.into(),
            lang: lang.into(),
            entries: Vec::new(),
        }
    }

    /// `(code, score)` pairs, best first.
    pub fn entries(&self) -> &[(DescriptorCode, f64)] {
        &self.entries
    }

    pub fn score(&self, code: DescriptorCode) -> Option<f64> {
        self.entries.iter().find(|e| e.0 == code).map(|e| e.1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn truncated(&self, k: usize) -> Self {
        DescriptorVector {
            doc_id: self.doc_id.clone(),
            lang: self.lang.clone(),
            entries: self.entries[..k.min(self.entries.len())].to_vec(),
        }
    }
}

/// A profile set indexed by lemma, for assigning many documents.
pub struct Assigner<'a> {
    profiles: &'a ProfileSet,
    codes: Vec<DescriptorCode>,
    norms: Vec<f64>,
    postings: HashMap<&'a str, Vec<(u32, f64)>>,
}

impl<'a> Assigner<'a> {
    pub fn new(profiles: &'a ProfileSet) -> Self {
        let mut codes = Vec::with_capacity(profiles.len());
        let mut norms = Vec::with_capacity(profiles.len());
        let mut postings: HashMap<&str, Vec<(u32, f64)>> = HashMap::new();
        for (idx, p) in profiles.profiles().enumerate() {
            codes.push(p.descriptor());
            norms.push(p.norm());
            for (lemma, w) in p.associates() {
                postings
                    .entry(lemma.as_str())
                    .or_default()
                    .push((idx as u32, *w));
            }
        }
        Assigner {
            profiles,
            codes,
            norms,
            postings,
        }
    }

    pub fn profiles(&self) -> &ProfileSet {
        self.profiles
    }

    pub fn assign(&self, doc: &NormalizedDocument, k: usize) -> Result<DescriptorVector> {
        if doc.lang != self.profiles.lang() {
            return Err(Error::LanguageMismatch {
                expected: self.profiles.lang().to_string(),
                found: doc.lang.clone(),
            });
        }
        if k == 0 {
            return Err(Error::Validation("k must be positive".into()));
        }
        let doc_norm = doc
            .lemma_freq
            .values()
            .map(|&c| f64::from(c) * f64::from(c))
            .sum::<f64>()
            .sqrt();
        if doc_norm == 0.0 {
            return Ok(DescriptorVector::empty(&doc.id, &doc.lang));
        }

        let mut dots = vec![0.0f64; self.codes.len()];
        for (lemma, &count) in &doc.lemma_freq {
            if let Some(list) = self.postings.get(lemma.as_str()) {
                for &(idx, w) in list {
                    dots[idx as usize] += f64::from(count) * w;
                }
            }
        }

        let mut scored: Vec<(DescriptorCode, f64)> = dots
            .iter()
            .enumerate()
            .filter(|(_, &dot)| dot > 0.0)
            .map(|(i, &dot)| (self.codes[i], (dot / (doc_norm * self.norms[i])).min(1.0)))
            .filter(|(_, s)| *s > 0.0)
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(DescriptorVector {
            doc_id: doc.id.clone(),
            lang: doc.lang.clone(),
            entries: scored,
        })
    }
}

/// Assigns the `k` best descriptors to one document.
///
/// A document without any lemma gets an empty vector rather than an error.
pub fn assign(
    doc: &NormalizedDocument,
    profiles: &ProfileSet,
    k: usize,
) -> Result<DescriptorVector> {
    Assigner::new(profiles).assign(doc, k)
}

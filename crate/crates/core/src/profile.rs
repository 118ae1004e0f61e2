//! Associate-profile training.
//!
//! For every descriptor, the documents manually indexed with it form a subset
//! whose lemma frequencies are compared with the rest of the training corpus.
//! Lemmas that are significantly over-represented in the subset (G² above a
//! threshold, positive association, present in enough subset documents) are
//! kept as associates, weighted by `G² × idf`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{read_to_string, write_string, Error, Result};
use crate::normalize::NormalizedDocument;
use crate::thesaurus::{DescriptorCode, Thesaurus};

/// 2×2 token counts for one lemma against one descriptor subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ContingencyTable {
    /// The lemma inside the subset.
    pub k11: u64,
    /// Other tokens inside the subset.
    pub k12: u64,
    /// The lemma outside the subset.
    pub k21: u64,
    /// Other tokens outside the subset.
    pub k22: u64,
}

impl ContingencyTable {
    pub fn new(k11: u64, k12: u64, k21: u64, k22: u64) -> Self {
        ContingencyTable { k11, k12, k21, k22 }
    }

    pub fn total(&self) -> u64 {
        self.k11 + self.k12 + self.k21 + self.k22
    }

    /// Lemma rate inside the subset strictly exceeds its expectation under
    /// independence.
    pub fn is_positive_association(&self) -> bool {
        // k11 / (k11 + k12) > (k11 + k21) / N, cross-multiplied.
        let subset = u128::from(self.k11 + self.k12);
        let lemma = u128::from(self.k11 + self.k21);
        u128::from(self.k11) * u128::from(self.total()) > subset * lemma
    }
}

/// Dunning's log-likelihood ratio statistic G² = 2 Σ O ln(O/E).
///
/// Cells with O = 0 contribute nothing. Tables with an empty row or column
/// are independent by definition and score 0.
pub fn log_likelihood(t: &ContingencyTable) -> f64 {
    let n = t.total() as f64;
    let rows = [(t.k11 + t.k12) as f64, (t.k21 + t.k22) as f64];
    let cols = [(t.k11 + t.k21) as f64, (t.k12 + t.k22) as f64];
    if rows.contains(&0.0) || cols.contains(&0.0) {
        return 0.0;
    }
    let cells = [
        (t.k11 as f64, rows[0], cols[0]),
        (t.k12 as f64, rows[0], cols[1]),
        (t.k21 as f64, rows[1], cols[0]),
        (t.k22 as f64, rows[1], cols[1]),
    ];
    let sum: f64 = cells
        .iter()
        .filter(|(o, _, _)| *o > 0.0)
        .map(|&(o, r, c)| o * (o * n / (r * c)).ln())
        .sum();
    (2.0 * sum).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdfVariant {
    /// ln(N / df)
    LogNOverDf,
    /// ln(N / (df + 1)) + 1
    #[default]
    LogNOverDfPlusOne,
}

/// Corpus-wide statistics shared by every descriptor.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorpusStats {
    pub n_docs: u64,
    pub doc_freq: BTreeMap<String, u64>,
}

impl CorpusStats {
    pub fn from_documents(docs: &[NormalizedDocument]) -> Self {
        let mut doc_freq = BTreeMap::new();
        for d in docs {
            for lemma in d.lemma_freq.keys() {
                *doc_freq.entry(lemma.clone()).or_insert(0) += 1;
            }
        }
        CorpusStats {
            n_docs: docs.len() as u64,
            doc_freq,
        }
    }
}

pub fn idf(lemma: &str, stats: &CorpusStats, variant: IdfVariant) -> Result<f64> {
    let n = stats.n_docs as f64;
    let df = stats.doc_freq.get(lemma).copied().unwrap_or(0);
    match variant {
        IdfVariant::LogNOverDf if df == 0 => Err(Error::UndefinedIdf(lemma.to_string())),
        IdfVariant::LogNOverDf => Ok((n / df as f64).ln()),
        IdfVariant::LogNOverDfPlusOne => Ok((n / (df as f64 + 1.0)).ln() + 1.0),
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct TrainingConfig {
    /// A lemma must occur in at least this many subset documents.
    pub min_doc_freq: u32,
    /// Minimum G² for a candidate associate. 3.84 is χ²₁ at p = 0.05.
    pub g2_threshold: f64,
    pub max_associates: usize,
    pub idf_variant: IdfVariant,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            min_doc_freq: 2,
            g2_threshold: 3.84,
            max_associates: 300,
            idf_variant: IdfVariant::LogNOverDfPlusOne,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_doc_freq == 0 {
            return Err(Error::Validation("min_doc_freq must be at least 1".into()));
        }
        if self.max_associates == 0 {
            return Err(Error::Validation(
                "max_associates must be at least 1".into(),
            ));
        }
        if !(self.g2_threshold.is_finite() && self.g2_threshold >= 0.0) {
            return Err(Error::Validation(
                "g2_threshold must be finite and >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Ranked associates of one descriptor in one language.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociateProfile {
    descriptor: DescriptorCode,
    lang: String,
    associates: Vec<(String, f64)>,
    norm: f64,
}

impl AssociateProfile {
    /// Sorts `associates` by descending weight (ties: lemma ascending).
    pub fn new(
        descriptor: DescriptorCode,
        lang: impl Into<String>,
        mut associates: Vec<(String, f64)>,
    ) -> Result<Self> {
        if let Some((lemma, w)) = associates
            .iter()
            .find(|(_, w)| !(w.is_finite() && *w > 0.0))
        {
            return Err(Error::Validation(format!(
                "descriptor {descriptor}: associate {lemma:?} has non-positive weight {w}"
            )));
        }
        let mut seen = std::collections::HashSet::with_capacity(associates.len());
        if let Some((lemma, _)) = associates.iter().find(|(l, _)| !seen.insert(l.as_str())) {
            return Err(Error::Validation(format!(
                "descriptor {descriptor}: duplicate associate {lemma:?}"
            )));
        }
        associates.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let norm = associates.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        Ok(AssociateProfile {
            descriptor,
            lang: lang.into(),
            associates,
            norm,
        })
    }

    pub fn descriptor(&self) -> DescriptorCode {
        self.descriptor
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }

    pub fn associates(&self) -> &[(String, f64)] {
        &self.associates
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.associates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.associates.is_empty()
    }
}

/// Trained classifier for one language.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSet {
    lang: String,
    profiles: BTreeMap<DescriptorCode, AssociateProfile>,
    config: TrainingConfig,
    stats: CorpusStats,
}

impl ProfileSet {
    pub fn new(
        lang: impl Into<String>,
        profiles: impl IntoIterator<Item = AssociateProfile>,
        config: TrainingConfig,
        stats: CorpusStats,
    ) -> Result<Self> {
        let lang = lang.into();
        let mut map = BTreeMap::new();
        for p in profiles {
            if p.lang != lang {
                return Err(Error::LanguageMismatch {
                    expected: lang,
                    found: p.lang,
                });
            }
            let code = p.descriptor;
            if map.insert(code, p).is_some() {
                return Err(Error::Validation(format!(
                    "duplicate profile for descriptor {code}"
                )));
            }
        }
        Ok(ProfileSet {
            lang,
            profiles: map,
            config,
            stats,
        })
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }

    pub fn get(&self, code: DescriptorCode) -> Option<&AssociateProfile> {
        self.profiles.get(&code)
    }

    /// Profiles in ascending descriptor order.
    pub fn profiles(&self) -> impl Iterator<Item = &AssociateProfile> {
        self.profiles.values()
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn config(&self) -> &TrainingConfig {
        &self.config
    }

    /// Statistics of the training corpus. After [`ProfileSet::load`] only
    /// `n_docs` is known.
    pub fn stats(&self) -> &CorpusStats {
        &self.stats
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("PROFILESET {} {}\n", self.lang, self.stats.n_docs);
        for p in self.profiles.values() {
            writeln!(out, "P {}", p.descriptor).unwrap();
            for (lemma, w) in &p.associates {
                writeln!(out, "A {lemma} {w:.6}").unwrap();
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing PROFILESET header"))?;
        let (lang, n_docs) = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["PROFILESET", lang, n] => (
                lang.to_string(),
                n.parse::<u64>()
                    .map_err(|_| Error::parse(1, format!("invalid document count {n:?}")))?,
            ),
            _ => return Err(Error::parse(1, "expected `PROFILESET <lang> <N_docs>`")),
        };

        let mut profiles = Vec::new();
        let mut current: Option<(DescriptorCode, Vec<(String, f64)>)> = None;
        let finish = |cur: Option<(DescriptorCode, Vec<(String, f64)>)>,
                      out: &mut Vec<AssociateProfile>|
         -> Result<()> {
            if let Some((code, assoc)) = cur {
                let before = assoc.clone();
                let p = AssociateProfile::new(code, lang.clone(), assoc)?;
                if p.associates != before {
                    return Err(Error::Validation(format!(
                        "descriptor {code}: associates not in rank order"
                    )));
                }
                out.push(p);
            }
            Ok(())
        };
        for (line_no, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[..] {
                ["P", code] => {
                    finish(current.take(), &mut profiles)?;
                    let code: DescriptorCode =
                        code.parse().map_err(|e: String| Error::parse(line_no, e))?;
                    current = Some((code, Vec::new()));
                }
                ["A", lemma, weight] => {
                    let (_, assoc) = current
                        .as_mut()
                        .ok_or_else(|| Error::parse(line_no, "associate before any `P` line"))?;
                    let w: f64 = weight
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("invalid weight {weight:?}")))?;
                    assoc.push((lemma.to_string(), w));
                }
                _ => return Err(Error::parse(line_no, format!("unexpected line {line:?}"))),
            }
        }
        finish(current.take(), &mut profiles)?;

        let mut sorted = profiles.iter().map(|p| p.descriptor);
        if let Some(prev) = sorted.next() {
            let mut prev = prev;
            for code in sorted {
                if code <= prev {
                    return Err(Error::Validation(format!(
                        "profile for descriptor {code} out of order or duplicated"
                    )));
                }
                prev = code;
            }
        }

        ProfileSet::new(
            lang,
            profiles,
            TrainingConfig::default(),
            CorpusStats {
                n_docs,
                doc_freq: BTreeMap::new(),
            },
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&read_to_string(path.as_ref())?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_string(path.as_ref(), &self.to_text())
    }
}

fn check_corpus(corpus: &[NormalizedDocument]) -> Result<&str> {
    let first = corpus.first().ok_or(Error::EmptyCorpus)?;
    if let Some(other) = corpus.iter().find(|d| d.lang != first.lang) {
        return Err(Error::LanguageMismatch {
            expected: first.lang.clone(),
            found: other.lang.clone(),
        });
    }
    Ok(&first.lang)
}

/// Counts one lemma against the subset of documents labelled `descriptor`.
pub fn build_contingency(
    lemma: &str,
    descriptor: DescriptorCode,
    corpus: &[NormalizedDocument],
) -> Result<ContingencyTable> {
    check_corpus(corpus)?;
    let mut t = ContingencyTable::default();
    let mut subset_docs = 0usize;
    for d in corpus {
        let count = u64::from(d.lemma_freq.get(lemma).copied().unwrap_or(0));
        let others = d.total_lemmas() - count;
        if d.manual_descriptors.contains(&descriptor) {
            subset_docs += 1;
            t.k11 += count;
            t.k12 += others;
        } else {
            t.k21 += count;
            t.k22 += others;
        }
    }
    if subset_docs == 0 {
        return Err(Error::EmptySubset(descriptor));
    }
    Ok(t)
}

struct GlobalCounts<'a> {
    lemma_tokens: HashMap<&'a str, u64>,
    total_tokens: u64,
}

/// Trains one profile per descriptor that has at least one training document.
pub fn train_profiles(
    corpus: &[NormalizedDocument],
    thesaurus: &Thesaurus,
    config: &TrainingConfig,
) -> Result<ProfileSet> {
    config.validate()?;
    let lang = check_corpus(corpus)?.to_string();
    for d in corpus {
        if let Some(code) = d
            .manual_descriptors
            .iter()
            .find(|c| !thesaurus.contains(**c))
        {
            return Err(Error::Validation(format!(
                "document {}: descriptor {code} is not in the thesaurus",
                d.id
            )));
        }
    }

    let stats = CorpusStats::from_documents(corpus);
    let mut global = GlobalCounts {
        lemma_tokens: HashMap::new(),
        total_tokens: 0,
    };
    for d in corpus {
        for (lemma, &c) in &d.lemma_freq {
            *global.lemma_tokens.entry(lemma.as_str()).or_insert(0) += u64::from(c);
            global.total_tokens += u64::from(c);
        }
    }

    let codes: Vec<DescriptorCode> = thesaurus.codes().collect();
    let trained: Vec<Option<AssociateProfile>> = codes
        .par_iter()
        .map(|&code| train_one(code, &lang, corpus, &global, &stats, config))
        .collect::<Result<_>>()?;

    let profiles: Vec<AssociateProfile> = trained.into_iter().flatten().collect();
    if profiles.is_empty() {
        return Err(Error::NoTrainableDescriptor);
    }
    ProfileSet::new(lang, profiles, config.clone(), stats)
}

fn train_one(
    code: DescriptorCode,
    lang: &str,
    corpus: &[NormalizedDocument],
    global: &GlobalCounts<'_>,
    stats: &CorpusStats,
    config: &TrainingConfig,
) -> Result<Option<AssociateProfile>> {
    // lemma -> (tokens in subset, subset documents containing it)
    let mut subset: HashMap<&str, (u64, u32)> = HashMap::new();
    let mut subset_tokens = 0u64;
    let mut subset_docs = 0usize;
    for d in corpus
        .iter()
        .filter(|d| d.manual_descriptors.contains(&code))
    {
        subset_docs += 1;
        for (lemma, &c) in &d.lemma_freq {
            let e = subset.entry(lemma.as_str()).or_insert((0, 0));
            e.0 += u64::from(c);
            e.1 += 1;
            subset_tokens += u64::from(c);
        }
    }
    if subset_docs == 0 {
        return Ok(None);
    }

    let mut associates = Vec::new();
    for (lemma, (in_subset, docs)) in subset {
        if docs < config.min_doc_freq {
            continue;
        }
        let everywhere = global.lemma_tokens[lemma];
        let table = ContingencyTable::new(
            in_subset,
            subset_tokens - in_subset,
            everywhere - in_subset,
            global.total_tokens - subset_tokens - (everywhere - in_subset),
        );
        if !table.is_positive_association() {
            continue;
        }
        let g2 = log_likelihood(&table);
        if g2 < config.g2_threshold {
            continue;
        }
        let weight = g2 * idf(lemma, stats, config.idf_variant)?;
        if weight > 0.0 {
            associates.push((lemma.to_string(), weight));
        }
    }
    associates.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    associates.truncate(config.max_associates);
    AssociateProfile::new(code, lang, associates).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    use crate::thesaurus::Descriptor;

    fn code(n: u32) -> DescriptorCode {
        DescriptorCode::new(n).unwrap()
    }

    fn doc(id: &str, lemmas: &[(&str, u32)], labels: &[u32]) -> NormalizedDocument {
        let lemma_freq: BTreeMap<String, u32> =
            lemmas.iter().map(|&(l, c)| (l.to_string(), c)).collect();
        let total = lemma_freq.values().sum::<u32>() as usize;
        NormalizedDocument {
            id: id.into(),
            lang: "en".into(),
            lemma_freq,
            char_length: total * 6,
            token_count: total,
            manual_descriptors: labels.iter().map(|&c| code(c)).collect(),
        }
    }

    fn thesaurus(n: u32) -> Thesaurus {
        let ds = (1..=n)
            .map(|i| Descriptor::new(code(i), 1, 1).with_label("en", &format!("D{i}")))
            .collect();
        Thesaurus::new(vec!["en".into()], ds).unwrap()
    }

    /// Straight evaluation of 2 Σ O ln(O/E), expected counts from integer
    /// marginal products.
    fn g2_oracle(k: [u64; 4]) -> f64 {
        let n = k.iter().sum::<u64>() as f64;
        let r = [k[0] + k[1], k[2] + k[3]];
        let c = [k[0] + k[2], k[1] + k[3]];
        if r.contains(&0) || c.contains(&0) {
            return 0.0;
        }
        let mut s = 0.0;
        for (i, &o) in k.iter().enumerate() {
            if o == 0 {
                continue;
            }
            let e = (r[i / 2] * c[i % 2]) as f64 / n;
            s += o as f64 * (o as f64 / e).ln();
        }
        2.0 * s
    }

    #[test]
    fn contingency_by_direct_counting() {
        let corpus = vec![
            doc("a", &[("l", 3), ("x", 2)], &[1]),
            doc("b", &[("l", 3), ("y", 2)], &[1]),
            doc("c", &[("l", 1), ("z", 9)], &[2]),
            doc("d", &[("l", 1), ("w", 9)], &[2]),
        ];
        let t = build_contingency("l", code(1), &corpus).unwrap();
        assert_eq!(t, ContingencyTable::new(6, 4, 2, 18));
        let absent = build_contingency("nowhere", code(1), &corpus).unwrap();
        assert_eq!((absent.k11, absent.k21), (0, 0));
        assert!(matches!(
            build_contingency("l", code(3), &corpus),
            Err(Error::EmptySubset(c)) if c == code(3)
        ));
        assert!(matches!(
            build_contingency("l", code(1), &[]),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn g2_examples() {
        assert_eq!(log_likelihood(&ContingencyTable::new(5, 5, 5, 5)), 0.0);
        // (10,0,0,10): each nonzero cell has E = 5, so G² = 2·(2·10·ln 2) = 40 ln 2.
        let perfect = log_likelihood(&ContingencyTable::new(10, 0, 0, 10));
        assert!((perfect - 40.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!((perfect - g2_oracle([10, 0, 0, 10])).abs() < 1e-9);
        let t = log_likelihood(&ContingencyTable::new(6, 4, 2, 18));
        assert!((t - g2_oracle([6, 4, 2, 18])).abs() < 1e-9);
        // Frozen from the oracle: 2·(6 ln(6·30/(10·8)) + 4 ln(4·30/(10·22))
        //                      + 2 ln(2·30/(20·8)) + 18 ln(18·30/(20·22))).
        assert!((t - 8.331_358_009_242_994).abs() < 1e-9, "{t}");
    }

    #[test]
    fn g2_degenerate_tables() {
        assert_eq!(log_likelihood(&ContingencyTable::new(0, 0, 3, 4)), 0.0);
        assert_eq!(log_likelihood(&ContingencyTable::new(3, 0, 4, 0)), 0.0);
        assert_eq!(log_likelihood(&ContingencyTable::default()), 0.0);
    }

    #[test]
    fn idf_examples() {
        let stats = CorpusStats {
            n_docs: 100,
            doc_freq: BTreeMap::from([("all".to_string(), 100), ("one".to_string(), 1)]),
        };
        assert_eq!(idf("all", &stats, IdfVariant::LogNOverDf).unwrap(), 0.0);
        assert!((idf("one", &stats, IdfVariant::LogNOverDf).unwrap() - 4.605_170_186).abs() < 1e-9);
        assert!(matches!(
            idf("none", &stats, IdfVariant::LogNOverDf),
            Err(Error::UndefinedIdf(_))
        ));
        let small = CorpusStats {
            n_docs: 8,
            doc_freq: BTreeMap::from([("x".to_string(), 2)]),
        };
        let v = idf("x", &small, IdfVariant::LogNOverDfPlusOne).unwrap();
        assert!((v - ((8.0f64 / 3.0).ln() + 1.0)).abs() < 1e-12);
        assert!((v - 1.980_829_253).abs() < 1e-9);
    }

    #[test]
    fn exclusive_lemma_ranks_first() {
        let mut corpus = Vec::new();
        for i in 0..4 {
            corpus.push(doc(
                &format!("s{i}"),
                &[("hazmat", 2), ("common", 5), ("tank", 1)],
                &[1],
            ));
        }
        for i in 0..8 {
            corpus.push(doc(
                &format!("o{i}"),
                &[("common", 5), ("tank", 1), ("fish", 2)],
                &[2],
            ));
        }
        let config = TrainingConfig {
            g2_threshold: 0.0,
            ..TrainingConfig::default()
        };
        let set = train_profiles(&corpus, &thesaurus(3), &config).unwrap();
        let p = set.get(code(1)).unwrap();
        assert_eq!(p.associates()[0].0, "hazmat");
        // Descriptor 3 has no documents.
        assert!(set.get(code(3)).is_none());
        assert_eq!(set.len(), 2);
        // "common" and "tank" are under-represented in subset 1 relative to the corpus.
        assert!(p
            .associates()
            .iter()
            .all(|(l, _)| l != "common" && l != "tank"));
    }

    #[test]
    fn no_trainable_descriptor() {
        let corpus = vec![doc("a", &[("x", 1)], &[])];
        assert!(matches!(
            train_profiles(&corpus, &thesaurus(2), &TrainingConfig::default()),
            Err(Error::NoTrainableDescriptor)
        ));
    }

    #[test]
    fn unknown_label_is_rejected() {
        let corpus = vec![doc("a", &[("x", 1)], &[9])];
        assert!(matches!(
            train_profiles(&corpus, &thesaurus(2), &TrainingConfig::default()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn profile_file_round_trip() {
        let p1 = AssociateProfile::new(
            code(3),
            "en",
            vec![("transport".into(), 13.0), ("dangerous_goods".into(), 33.0)],
        )
        .unwrap();
        let p2 = AssociateProfile::new(code(1), "en", vec![("tank".into(), 1.25)]).unwrap();
        let set = ProfileSet::new(
            "en",
            [p1, p2],
            TrainingConfig::default(),
            CorpusStats {
                n_docs: 12,
                doc_freq: BTreeMap::new(),
            },
        )
        .unwrap();
        let text = set.to_text();
        assert_eq!(
            text,
            "PROFILESET en 12\nP 1\nA tank 1.250000\nP 3\nA dangerous_goods 33.000000\nA transport 13.000000\n"
        );
        let back = ProfileSet::parse(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(
            back.get(code(3)).unwrap().associates()[0].0,
            "dangerous_goods"
        );
    }

    #[test]
    fn profile_file_errors() {
        assert!(matches!(
            ProfileSet::parse(""),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            ProfileSet::parse("PROFILESET en 3\nA x 1.0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            ProfileSet::parse("PROFILESET en 3\nP 1\nA x 1.0\nA y 2.0\n"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            ProfileSet::parse("PROFILESET en 3\nP 1\nA x 0.000000\n"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            ProfileSet::parse("PROFILESET en 3\nP 2\nP 1\n"),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn profile_norm_is_cached_euclidean() {
        let p = AssociateProfile::new(code(1), "en", vec![("a".into(), 3.0), ("b".into(), 4.0)])
            .unwrap();
        assert!((p.norm() - 5.0).abs() < 1e-12);
        let labels: BTreeSet<_> = p.associates().iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels, BTreeSet::from(["a", "b"]));
    }
}

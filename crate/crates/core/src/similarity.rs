//! Document-to-document similarity over descriptor vectors.
//!
//! The final score of a candidate is its cosine with the query, optionally
//! multiplied by a Gaussian length factor on the character-length ratio and,
//! for candidates in the query's own language, by a same-language bias.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::assign::DescriptorVector;
use crate::corpus::ParallelCorpus;
use crate::error::{read_to_string, write_string, Error, Result};
use crate::normalize::NormalizedDocument;
use crate::thesaurus::DescriptorCode;

pub const DEFAULT_SAME_LANGUAGE_BIAS: f64 = 0.83;
pub const DEFAULT_THRESHOLD: f64 = 0.70;
/// Spread assumed for same-language length ratios when no entry is configured.
pub const DEFAULT_SAME_LANGUAGE_SIGMA: f64 = 0.1;
pub const MIN_SIGMA: f64 = 1e-6;

/// Code-sorted copy of a descriptor vector with its Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
struct SparseVector {
    codes: Vec<DescriptorCode>,
    values: Vec<f64>,
    norm_sq: f64,
}

impl SparseVector {
    fn from_vector(v: &DescriptorVector) -> Self {
        let mut entries = v.entries().to_vec();
        entries.sort_by_key(|e| e.0);
        let norm_sq = entries.iter().map(|e| e.1 * e.1).sum();
        SparseVector {
            codes: entries.iter().map(|e| e.0).collect(),
            values: entries.iter().map(|e| e.1).collect(),
            norm_sq,
        }
    }

    fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j, mut dot) = (0, 0, 0.0);
        while i < self.codes.len() && j < other.codes.len() {
            match self.codes[i].cmp(&other.codes[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    dot += self.values[i] * other.values[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        dot
    }

    fn cosine(&self, other: &SparseVector) -> f64 {
        if self.norm_sq == 0.0 || other.norm_sq == 0.0 {
            return 0.0;
        }
        (self.dot(other) / (self.norm_sq * other.norm_sq).sqrt()).clamp(0.0, 1.0)
    }
}

/// Cosine over the union of both vectors' descriptors; 0 if either is empty.
pub fn cosine(a: &DescriptorVector, b: &DescriptorVector) -> f64 {
    SparseVector::from_vector(a).cosine(&SparseVector::from_vector(b))
}

/// Mean and standard deviation of `len(tgt) / len(src)` for one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthStats {
    pub mu: f64,
    pub sigma: f64,
}

impl LengthStats {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0 && sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Validation(format!(
                "length statistics need mu > 0 and sigma > 0, got mu={mu} sigma={sigma}"
            )));
        }
        Ok(LengthStats { mu, sigma })
    }

    /// exp(-½((r - mu) / sigma)²)
    pub fn factor(&self, ratio: f64) -> f64 {
        let z = (ratio - self.mu) / self.sigma;
        (-0.5 * z * z).exp()
    }
}

/// Length-ratio statistics per ordered language pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthModel {
    pairs: BTreeMap<(String, String), LengthStats>,
    same_language_sigma: f64,
}

impl Default for LengthModel {
    fn default() -> Self {
        LengthModel {
            pairs: BTreeMap::new(),
            same_language_sigma: DEFAULT_SAME_LANGUAGE_SIGMA,
        }
    }
}

impl LengthModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_same_language_sigma(mut self, sigma: f64) -> Result<Self> {
        LengthStats::new(1.0, sigma)?;
        self.same_language_sigma = sigma;
        Ok(self)
    }

    /// Both directions of a parallel corpus, plus a same-language entry for
    /// each side: mu = 1 with the spread of the cross-language ratio.
    pub fn from_parallel(corpus: &ParallelCorpus) -> Result<Self> {
        let lengths: Vec<(usize, usize)> = corpus
            .pairs
            .iter()
            .map(|p| (p.src.text.chars().count(), p.tgt.text.chars().count()))
            .collect();
        let forward = estimate_length_stats(lengths.iter().copied())?;
        let backward = estimate_length_stats(lengths.iter().map(|&(s, t)| (t, s)))?;
        let (sl, tl) = (corpus.src_lang.as_str(), corpus.tgt_lang.as_str());
        let mut model = LengthModel::new();
        model.insert(sl, tl, forward);
        model.insert(tl, sl, backward);
        model.insert(sl, sl, LengthStats::new(1.0, forward.sigma)?);
        model.insert(tl, tl, LengthStats::new(1.0, backward.sigma)?);
        Ok(model)
    }

    pub fn insert(&mut self, src: &str, tgt: &str, stats: LengthStats) {
        self.pairs.insert((src.to_string(), tgt.to_string()), stats);
    }

    /// Explicit entry, or mu = 1 for a language compared with itself.
    pub fn get(&self, src: &str, tgt: &str) -> Result<LengthStats> {
        if let Some(s) = self.pairs.get(&(src.to_string(), tgt.to_string())) {
            return Ok(*s);
        }
        if src == tgt {
            return Ok(LengthStats {
                mu: 1.0,
                sigma: self.same_language_sigma,
            });
        }
        Err(Error::MissingLanguagePair {
            src: src.to_string(),
            tgt: tgt.to_string(),
        })
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, LengthStats)> {
        self.pairs
            .iter()
            .map(|((s, t), stats)| (s.as_str(), t.as_str(), *stats))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for ((s, t), stats) in &self.pairs {
            writeln!(out, "PAIR {s} {t} {} {}", stats.mu, stats.sigma).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut model = LengthModel::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let ["PAIR", src, tgt, mu, sigma] = fields[..] else {
                return Err(Error::parse(
                    i + 1,
                    "expected `PAIR <src> <tgt> <mu> <sigma>`",
                ));
            };
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::parse(i + 1, format!("invalid number {s:?}")))
            };
            let stats = LengthStats::new(num(mu)?, num(sigma)?)?;
            if model
                .pairs
                .insert((src.to_string(), tgt.to_string()), stats)
                .is_some()
            {
                return Err(Error::Validation(format!(
                    "duplicate length entry {src}->{tgt}"
                )));
            }
        }
        Ok(model)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&read_to_string(path.as_ref())?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_string(path.as_ref(), &self.to_text())
    }
}

/// Gaussian penalty on the length ratio `tgt_len / src_len`, in (0, 1].
pub fn length_factor(
    src_len: usize,
    tgt_len: usize,
    src_lang: &str,
    tgt_lang: &str,
    model: &LengthModel,
) -> Result<f64> {
    if src_len == 0 {
        return Err(Error::Degenerate("source document has zero length".into()));
    }
    let stats = model.get(src_lang, tgt_lang)?;
    Ok(stats.factor(tgt_len as f64 / src_len as f64))
}

/// How candidates are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreMode {
    /// Cosine, with the optional length factor and bias.
    #[default]
    Semantic,
    /// Length factor alone; the cosine is reported but ignored.
    LengthOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityOptions {
    pub use_length_factor: bool,
    /// Multiplier in (0, 1] for candidates sharing the query's language.
    pub same_language_bias: f64,
    pub threshold: f64,
    pub top_k: usize,
    pub mode: ScoreMode,
}

impl Default for SimilarityOptions {
    fn default() -> Self {
        SimilarityOptions {
            use_length_factor: true,
            same_language_bias: DEFAULT_SAME_LANGUAGE_BIAS,
            threshold: DEFAULT_THRESHOLD,
            top_k: 10,
            mode: ScoreMode::Semantic,
        }
    }
}

impl SimilarityOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.same_language_bias > 0.0 && self.same_language_bias <= 1.0) {
            return Err(Error::Validation(format!(
                "same-language bias must be in (0, 1], got {}",
                self.same_language_bias
            )));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Validation(format!(
                "threshold must be in [0, 1], got {}",
                self.threshold
            )));
        }
        if self.top_k == 0 {
            return Err(Error::Validation("top_k must be positive".into()));
        }
        Ok(())
    }
}

/// A descriptor vector prepared for repeated comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchDoc {
    pub vector: DescriptorVector,
    pub char_length: usize,
    sparse: SparseVector,
}

impl SearchDoc {
    pub fn new(vector: DescriptorVector, char_length: usize) -> Self {
        let sparse = SparseVector::from_vector(&vector);
        SearchDoc {
            vector,
            char_length,
            sparse,
        }
    }

    pub fn id(&self) -> &str {
        &self.vector.doc_id
    }

    pub fn lang(&self) -> &str {
        &self.vector.lang
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub raw_cosine: f64,
    pub length_factor: f64,
    pub final_score: f64,
}

/// Scores one candidate against a query.
pub fn similarity(
    query: &SearchDoc,
    cand: &SearchDoc,
    opts: &SimilarityOptions,
    model: &LengthModel,
) -> Result<Score> {
    let raw_cosine = query.sparse.cosine(&cand.sparse);
    let length_factor = if opts.use_length_factor || opts.mode == ScoreMode::LengthOnly {
        length_factor(
            query.char_length,
            cand.char_length,
            query.lang(),
            cand.lang(),
            model,
        )?
    } else {
        1.0
    };
    let mut final_score = match opts.mode {
        ScoreMode::Semantic => raw_cosine * length_factor,
        ScoreMode::LengthOnly => length_factor,
    };
    if cand.lang() == query.lang() {
        final_score *= opts.same_language_bias;
    }
    Ok(Score {
        raw_cosine,
        length_factor,
        final_score,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedMatch {
    pub candidate_id: String,
    pub candidate_lang: String,
    pub raw_cosine: f64,
    pub length_factor: f64,
    pub final_score: f64,
    /// 1-based.
    pub rank: usize,
}

/// Scores every candidate except the query itself and returns the best
/// `opts.top_k`, highest score first (ties: candidate id ascending).
pub fn find_most_similar(
    query: &SearchDoc,
    candidates: &[SearchDoc],
    opts: &SimilarityOptions,
    model: &LengthModel,
) -> Result<Vec<RankedMatch>> {
    opts.validate()?;
    let mut scored: Vec<(&SearchDoc, Score)> = candidates
        .par_iter()
        .filter(|c| c.id() != query.id())
        .map(|c| similarity(query, c, opts, model).map(|s| (c, s)))
        .collect::<Result<_>>()?;
    if scored.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    scored.sort_by(|a, b| {
        b.1.final_score
            .total_cmp(&a.1.final_score)
            .then_with(|| a.0.id().cmp(b.0.id()))
    });
    scored.truncate(opts.top_k);
    Ok(scored
        .into_iter()
        .enumerate()
        .map(|(i, (c, s))| RankedMatch {
            candidate_id: c.id().to_string(),
            candidate_lang: c.lang().to_string(),
            raw_cosine: s.raw_cosine,
            length_factor: s.length_factor,
            final_score: s.final_score,
            rank: i + 1,
        })
        .collect())
}

/// The best match if it reaches `opts.threshold`.
pub fn detect_translation(
    query: &SearchDoc,
    candidates: &[SearchDoc],
    opts: &SimilarityOptions,
    model: &LengthModel,
) -> Result<Option<RankedMatch>> {
    let best = find_most_similar(
        query,
        candidates,
        &SimilarityOptions {
            top_k: 1,
            ..opts.clone()
        },
        model,
    )?
    .into_iter()
    .next();
    Ok(best.filter(|m| m.final_score >= opts.threshold))
}

/// Sample mean and standard deviation (n - 1) of `tgt / src` length ratios.
/// Sigma is floored at [`MIN_SIGMA`].
pub fn estimate_length_stats(
    lengths: impl IntoIterator<Item = (usize, usize)>,
) -> Result<LengthStats> {
    let ratios: Vec<f64> = lengths
        .into_iter()
        .map(|(src, tgt)| {
            if src == 0 {
                Err(Error::Degenerate("source document has zero length".into()))
            } else {
                Ok(tgt as f64 / src as f64)
            }
        })
        .collect::<Result<_>>()?;
    if ratios.len() < 2 {
        return Err(Error::InsufficientPairs(ratios.len()));
    }
    let n = ratios.len() as f64;
    let mu = ratios.iter().sum::<f64>() / n;
    let var = ratios.iter().map(|r| (r - mu) * (r - mu)).sum::<f64>() / (n - 1.0);
    LengthStats::new(mu, var.sqrt().max(MIN_SIGMA))
}

/// Estimates the length statistics of a set of translation pairs and
/// returns them with the pair's `(src_lang, tgt_lang)`.
pub fn estimate_length_model(
    pairs: &[(&NormalizedDocument, &NormalizedDocument)],
) -> Result<(String, String, LengthStats)> {
    let Some((first_src, first_tgt)) = pairs.first() else {
        return Err(Error::InsufficientPairs(0));
    };
    for (s, t) in pairs {
        for (doc, lang) in [(s, &first_src.lang), (t, &first_tgt.lang)] {
            if &doc.lang != lang {
                return Err(Error::LanguageMismatch {
                    expected: lang.clone(),
                    found: doc.lang.clone(),
                });
            }
        }
    }
    let stats = estimate_length_stats(pairs.iter().map(|(s, t)| (s.char_length, t.char_length)))?;
    Ok((first_src.lang.clone(), first_tgt.lang.clone(), stats))
}

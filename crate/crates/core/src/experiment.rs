//! Translation-recognition experiments over a prepared benchmark.
//!
//! A [`Benchmark`] holds descriptor vectors for one or more test sets of
//! translation pairs, together with the length model estimated on the
//! training pairs. [`run_experiment`] searches for each query's translation
//! in the candidate space chosen by an [`ExperimentMode`] and reports where
//! the true translation ranked.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::assign::{Assigner, DEFAULT_TOP_K};
use crate::corpus::ParallelCorpus;
use crate::error::{Error, Result};
use crate::normalize::{normalize, LanguageResources, NormalizedDocument, RawDocument};
use crate::profile::{train_profiles, ProfileSet, TrainingConfig};
use crate::similarity::{
    find_most_similar, LengthModel, ScoreMode, SearchDoc, SimilarityOptions,
    DEFAULT_SAME_LANGUAGE_BIAS, DEFAULT_THRESHOLD,
};
use crate::synthetic::SyntheticCorpus;
use crate::thesaurus::Thesaurus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentMode {
    /// Source queries, target-language candidates.
    T1ES,
    /// Target queries, source-language candidates.
    T1SE,
    /// As T1ES, ranked by the length factor alone.
    T1ESLF,
    /// Two test sets merged into one query set and one candidate space.
    T3,
    /// Source queries over all source and target documents, no bias.
    BIL,
    /// As BIL with the same-language bias.
    BILW,
    /// BIL on a random half of the pairs.
    TH1B,
    /// BILW on a random half of the pairs.
    TH1BW,
}

impl ExperimentMode {
    pub const ALL: [ExperimentMode; 8] = [
        ExperimentMode::T1ES,
        ExperimentMode::T1SE,
        ExperimentMode::T1ESLF,
        ExperimentMode::T3,
        ExperimentMode::BIL,
        ExperimentMode::BILW,
        ExperimentMode::TH1B,
        ExperimentMode::TH1BW,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentMode::T1ES => "T1ES",
            ExperimentMode::T1SE => "T1SE",
            ExperimentMode::T1ESLF => "T1ESLF",
            ExperimentMode::T3 => "T3",
            ExperimentMode::BIL => "BIL",
            ExperimentMode::BILW => "BILW",
            ExperimentMode::TH1B => "TH1B",
            ExperimentMode::TH1BW => "TH1BW",
        }
    }
}

impl fmt::Display for ExperimentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentMode {
    type Err = Error;

    /// Case-insensitive; dashes and underscores are ignored, so `t1-es-bw`
    /// and `Th1-ES-B` are accepted too.
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .collect::<String>()
            .to_ascii_uppercase();
        let mode = match key.as_str() {
            "T1ES" => ExperimentMode::T1ES,
            "T1SE" => ExperimentMode::T1SE,
            "T1ESLF" => ExperimentMode::T1ESLF,
            "T3" => ExperimentMode::T3,
            "BIL" | "T1ESB" => ExperimentMode::BIL,
            "BILW" | "T1ESBW" => ExperimentMode::BILW,
            "TH1B" | "TH1ESB" => ExperimentMode::TH1B,
            "TH1BW" | "TH1ESBW" => ExperimentMode::TH1BW,
            _ => return Err(Error::Validation(format!("unknown experiment mode {s:?}"))),
        };
        Ok(mode)
    }
}

/// One translation pair with both sides assigned.
#[derive(Debug, Clone, PartialEq)]
pub struct TestPair {
    pub id: String,
    pub src: SearchDoc,
    pub tgt: SearchDoc,
}

/// Profiles, length model and assigned test sets.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub src_lang: String,
    pub tgt_lang: String,
    pub src_resources: LanguageResources,
    pub tgt_resources: LanguageResources,
    pub src_profiles: ProfileSet,
    pub tgt_profiles: ProfileSet,
    pub length_model: LengthModel,
    /// The primary test set first; T3 needs a second one.
    pub test_sets: Vec<Vec<TestPair>>,
    train_ids: HashSet<String>,
}

fn normalize_side<'a>(
    docs: impl Iterator<Item = &'a RawDocument>,
    res: &LanguageResources,
) -> Result<Vec<NormalizedDocument>> {
    let docs: Vec<&RawDocument> = docs.collect();
    docs.par_iter().map(|d| normalize(d, res)).collect()
}

impl Benchmark {
    /// Trains profiles for both languages on `train`, estimates the length
    /// model from its pairs, and assigns the documents of `test`.
    pub fn prepare(
        thesaurus: &Thesaurus,
        src_resources: &LanguageResources,
        tgt_resources: &LanguageResources,
        train: &ParallelCorpus,
        test: &ParallelCorpus,
        config: &TrainingConfig,
    ) -> Result<Self> {
        let (sl, tl) = (train.src_lang.as_str(), train.tgt_lang.as_str());
        for (res, lang) in [(src_resources, sl), (tgt_resources, tl)] {
            if res.lang() != lang {
                return Err(Error::LanguageMismatch {
                    expected: lang.to_string(),
                    found: res.lang().to_string(),
                });
            }
        }
        if train.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let src_train = normalize_side(train.sources(), src_resources)?;
        let tgt_train = normalize_side(train.targets(), tgt_resources)?;
        let src_profiles = train_profiles(&src_train, thesaurus, config)?;
        let tgt_profiles = train_profiles(&tgt_train, thesaurus, config)?;

        let length_model = LengthModel::from_parallel(train)?;

        let train_ids = train
            .sources()
            .chain(train.targets())
            .map(|d| d.id.clone())
            .collect();
        let mut bench = Benchmark {
            src_lang: sl.to_string(),
            tgt_lang: tl.to_string(),
            src_resources: src_resources.clone(),
            tgt_resources: tgt_resources.clone(),
            src_profiles,
            tgt_profiles,
            length_model,
            test_sets: Vec::new(),
            train_ids,
        };
        bench.add_test_set(test)?;
        Ok(bench)
    }

    /// Builds a benchmark from a generated corpus, including the second
    /// test set needed by T3.
    pub fn from_synthetic(corpus: &SyntheticCorpus, config: &TrainingConfig) -> Result<Self> {
        let mut bench = Self::prepare(
            &corpus.thesaurus,
            &corpus.src_resources,
            &corpus.tgt_resources,
            &corpus.train,
            &corpus.test,
            config,
        )?;
        bench.add_test_set(&corpus.second_test_set()?)?;
        Ok(bench)
    }

    /// Builds a benchmark from a directory laid out like a saved synthetic
    /// corpus: `thesaurus.txt`, `resources/<lang>/`, `train/`, `test/` and
    /// optionally `test2/`.
    pub fn load_dir(dir: impl AsRef<Path>, config: &TrainingConfig) -> Result<Self> {
        let dir = dir.as_ref();
        let thesaurus = Thesaurus::load(dir.join("thesaurus.txt"))?;
        let train = ParallelCorpus::load(dir.join("train"))?;
        let test = ParallelCorpus::load(dir.join("test"))?;
        let res = |lang: &str| LanguageResources::load_dir(dir.join("resources").join(lang), lang);
        let mut bench = Self::prepare(
            &thesaurus,
            &res(&train.src_lang)?,
            &res(&train.tgt_lang)?,
            &train,
            &test,
            config,
        )?;
        let second = dir.join("test2");
        if second.is_dir() {
            bench.add_test_set(&ParallelCorpus::load(second)?)?;
        }
        Ok(bench)
    }

    /// Assigns a further test set. Its documents must not occur in the
    /// training corpus or in an earlier test set.
    pub fn add_test_set(&mut self, test: &ParallelCorpus) -> Result<()> {
        if test.src_lang != self.src_lang || test.tgt_lang != self.tgt_lang {
            return Err(Error::LanguageMismatch {
                expected: format!("{}->{}", self.src_lang, self.tgt_lang),
                found: format!("{}->{}", test.src_lang, test.tgt_lang),
            });
        }
        if test.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let seen: HashSet<&str> = self
            .test_sets
            .iter()
            .flatten()
            .flat_map(|p| [p.src.id(), p.tgt.id()])
            .collect();
        if let Some(d) = test
            .sources()
            .chain(test.targets())
            .find(|d| self.train_ids.contains(&d.id) || seen.contains(d.id.as_str()))
        {
            return Err(Error::Validation(format!(
                "test document {:?} also occurs in training or another test set",
                d.id
            )));
        }
        let src = self.assign_side(test.sources(), &self.src_resources, &self.src_profiles)?;
        let tgt = self.assign_side(test.targets(), &self.tgt_resources, &self.tgt_profiles)?;
        let pairs = test
            .pairs
            .iter()
            .zip(src.into_iter().zip(tgt))
            .map(|(p, (src, tgt))| TestPair {
                id: p.id.clone(),
                src,
                tgt,
            })
            .collect();
        self.test_sets.push(pairs);
        Ok(())
    }

    fn assign_side<'a>(
        &self,
        docs: impl Iterator<Item = &'a RawDocument>,
        res: &LanguageResources,
        profiles: &ProfileSet,
    ) -> Result<Vec<SearchDoc>> {
        let normalized = normalize_side(docs, res)?;
        let assigner = Assigner::new(profiles);
        normalized
            .par_iter()
            .map(|d| {
                Ok(SearchDoc::new(
                    assigner.assign(d, DEFAULT_TOP_K)?,
                    d.char_length,
                ))
            })
            .collect()
    }

    pub fn primary(&self) -> &[TestPair] {
        &self.test_sets[0]
    }

    /// Mean and sample standard deviation of the raw cosine between the
    /// two sides of each primary test pair.
    pub fn pair_similarity(&self) -> (f64, f64) {
        let sims: Vec<f64> = self
            .primary()
            .iter()
            .map(|p| crate::similarity::cosine(&p.src.vector, &p.tgt.vector))
            .collect();
        let n = sims.len() as f64;
        let mean = sims.iter().sum::<f64>() / n;
        let var = if sims.len() > 1 {
            sims.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        (mean, var.sqrt())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOptions {
    /// Same-language bias for the bias-on bilingual modes.
    pub bias: f64,
    pub threshold: f64,
    /// Seed for the half-set selection of the TH1 modes.
    pub seed: u64,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            bias: DEFAULT_SAME_LANGUAGE_BIAS,
            threshold: DEFAULT_THRESHOLD,
            seed: 1,
        }
    }
}

/// Where the true translation of one query ended up.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryOutcome {
    pub query_id: String,
    pub true_id: String,
    /// 1-based rank of the true translation in the full ranking.
    pub true_rank: usize,
    pub true_score: f64,
    /// Score of the rank-1 candidate.
    pub best_score: f64,
}

impl QueryOutcome {
    pub fn is_hit(&self) -> bool {
        self.true_rank == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthFactorUse {
    Off,
    On,
    /// Ranking by the length factor alone.
    Only,
}

impl LengthFactorUse {
    pub fn name(self) -> &'static str {
        match self {
            LengthFactorUse::Off => "off",
            LengthFactorUse::On => "on",
            LengthFactorUse::Only => "only",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRow {
    pub length_factor: LengthFactorUse,
    pub queries: usize,
    pub precision_at_1: f64,
    pub precision_at_3: f64,
    pub rank_histogram: BTreeMap<usize, usize>,
    pub recall_at_threshold: f64,
    pub noise_at_threshold: f64,
    pub outcomes: Vec<QueryOutcome>,
}

impl EvaluationRow {
    pub fn from_outcomes(
        length_factor: LengthFactorUse,
        outcomes: Vec<QueryOutcome>,
        threshold: f64,
    ) -> Self {
        let n = outcomes.len();
        let frac = |count: usize| if n == 0 { 0.0 } else { count as f64 / n as f64 };
        let mut rank_histogram = BTreeMap::new();
        for o in &outcomes {
            *rank_histogram.entry(o.true_rank).or_insert(0) += 1;
        }
        let (recall, noise) = recall_and_noise(&outcomes, threshold);
        EvaluationRow {
            length_factor,
            queries: n,
            precision_at_1: frac(outcomes.iter().filter(|o| o.true_rank == 1).count()),
            precision_at_3: frac(outcomes.iter().filter(|o| o.true_rank <= 3).count()),
            rank_histogram,
            recall_at_threshold: recall,
            noise_at_threshold: noise,
            outcomes,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub mode: ExperimentMode,
    pub threshold: f64,
    pub rows: Vec<EvaluationRow>,
}

pub const REPORT_HEADER: &str = "mode\tlength_factor\tqueries\tprecision_at_1\tprecision_at_3\trecall_at_threshold\tnoise_at_threshold\tthreshold\trank_histogram";

impl EvaluationReport {
    pub fn row(&self, lf: LengthFactorUse) -> Option<&EvaluationRow> {
        self.rows.iter().find(|r| r.length_factor == lf)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("{REPORT_HEADER}\n");
        self.write_rows(&mut out);
        out
    }

    /// Rows without the header, for concatenating several reports.
    pub fn write_rows(&self, out: &mut String) {
        for r in &self.rows {
            let hist = r
                .rank_histogram
                .iter()
                .map(|(rank, count)| format!("{rank}:{count}"))
                .collect::<Vec<_>>()
                .join(",");
            writeln!(
                out,
                "{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.2}\t{hist}",
                self.mode,
                r.length_factor.name(),
                r.queries,
                r.precision_at_1,
                r.precision_at_3,
                r.recall_at_threshold,
                r.noise_at_threshold,
                self.threshold,
            )
            .unwrap();
        }
    }
}

/// Ranks all candidates for each query and records the true translation's
/// position.
pub fn evaluate_queries(
    queries: &[(&SearchDoc, &str)],
    candidates: &[SearchDoc],
    opts: &SimilarityOptions,
    model: &LengthModel,
) -> Result<Vec<QueryOutcome>> {
    let opts = SimilarityOptions {
        top_k: candidates.len().max(1),
        ..opts.clone()
    };
    queries
        .par_iter()
        .map(|&(query, true_id)| {
            let ranking = find_most_similar(query, candidates, &opts, model)?;
            let truth = ranking
                .iter()
                .find(|m| m.candidate_id == true_id)
                .ok_or_else(|| Error::ModeMismatch {
                    mode: "query".into(),
                    reason: format!(
                        "translation {true_id:?} of {:?} is not a candidate",
                        query.id()
                    ),
                })?;
            Ok(QueryOutcome {
                query_id: query.id().to_string(),
                true_id: true_id.to_string(),
                true_rank: truth.rank,
                true_score: truth.final_score,
                best_score: ranking[0].final_score,
            })
        })
        .collect()
}

fn mismatch(mode: ExperimentMode, reason: &str) -> Error {
    Error::ModeMismatch {
        mode: mode.name().to_string(),
        reason: reason.to_string(),
    }
}

pub fn run_experiment(
    mode: ExperimentMode,
    bench: &Benchmark,
    opts: &ExperimentOptions,
) -> Result<EvaluationReport> {
    let primary = bench
        .test_sets
        .first()
        .ok_or_else(|| mismatch(mode, "no test set"))?;
    let chosen: Vec<&TestPair> = match mode {
        ExperimentMode::T3 => {
            if bench.test_sets.len() < 2 {
                return Err(mismatch(mode, "needs a second test set"));
            }
            bench.test_sets[..2].iter().flatten().collect()
        }
        ExperimentMode::TH1B | ExperimentMode::TH1BW => {
            if primary.len() < 2 {
                return Err(mismatch(mode, "needs at least two pairs"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let mut picked = index::sample(&mut rng, primary.len(), primary.len() / 2).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| &primary[i]).collect()
        }
        _ => primary.iter().collect(),
    };

    let reverse = mode == ExperimentMode::T1SE;
    let bilingual = matches!(
        mode,
        ExperimentMode::BIL | ExperimentMode::BILW | ExperimentMode::TH1B | ExperimentMode::TH1BW
    );
    let queries: Vec<(&SearchDoc, &str)> = chosen
        .iter()
        .map(|p| {
            if reverse {
                (&p.tgt, p.src.id())
            } else {
                (&p.src, p.tgt.id())
            }
        })
        .collect();
    let mut candidates: Vec<SearchDoc> = chosen
        .iter()
        .map(|p| {
            if reverse {
                p.src.clone()
            } else {
                p.tgt.clone()
            }
        })
        .collect();
    if bilingual {
        candidates.extend(chosen.iter().map(|p| p.src.clone()));
    }

    let bias = match mode {
        ExperimentMode::BILW | ExperimentMode::TH1BW => opts.bias,
        _ => 1.0,
    };
    let base = SimilarityOptions {
        use_length_factor: false,
        same_language_bias: bias,
        threshold: opts.threshold,
        top_k: 1,
        mode: ScoreMode::Semantic,
    };
    base.validate()?;

    let settings: &[LengthFactorUse] = if mode == ExperimentMode::T1ESLF {
        &[LengthFactorUse::Only]
    } else {
        &[LengthFactorUse::Off, LengthFactorUse::On]
    };
    let rows = settings
        .iter()
        .map(|&lf| {
            let sim = SimilarityOptions {
                use_length_factor: lf == LengthFactorUse::On,
                mode: if lf == LengthFactorUse::Only {
                    ScoreMode::LengthOnly
                } else {
                    ScoreMode::Semantic
                },
                ..base.clone()
            };
            let outcomes = evaluate_queries(&queries, &candidates, &sim, &bench.length_model)?;
            Ok(EvaluationRow::from_outcomes(lf, outcomes, opts.threshold))
        })
        .collect::<Result<_>>()?;
    Ok(EvaluationReport {
        mode,
        threshold: opts.threshold,
        rows,
    })
}

/// Fraction of queries whose translation ranks first with a score of at
/// least `threshold`, and fraction whose rank-1 candidate is not the
/// translation yet reaches `threshold`.
pub fn recall_and_noise(outcomes: &[QueryOutcome], threshold: f64) -> (f64, f64) {
    if outcomes.is_empty() {
        return (0.0, 0.0);
    }
    let n = outcomes.len() as f64;
    let recalled = outcomes
        .iter()
        .filter(|o| o.is_hit() && o.true_score >= threshold)
        .count();
    let noisy = outcomes
        .iter()
        .filter(|o| !o.is_hit() && o.best_score >= threshold)
        .count();
    (recalled as f64 / n, noisy as f64 / n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub threshold: f64,
    pub recall: f64,
    pub noise: f64,
}

pub const SWEEP_HEADER: &str = "threshold\trecall\tnoise";

/// Recall and noise at every threshold 0.00, 0.01, ..., 1.00.
pub fn sweep_threshold(outcomes: &[QueryOutcome]) -> Result<Vec<SweepRow>> {
    if outcomes.is_empty() {
        return Err(Error::Validation(
            "threshold sweep needs at least one query".into(),
        ));
    }
    Ok((0..=100)
        .map(|i| {
            let threshold = i as f64 / 100.0;
            let (recall, noise) = recall_and_noise(outcomes, threshold);
            SweepRow {
                threshold,
                recall,
                noise,
            }
        })
        .collect())
}

pub fn sweep_to_tsv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        writeln!(out, "{:.2}\t{:.6}\t{:.6}", r.threshold, r.recall, r.noise).unwrap();
    }
    out
}

/// Highest grid threshold whose recall is at least `min_recall`.
pub fn threshold_for_recall(rows: &[SweepRow], min_recall: f64) -> Option<SweepRow> {
    rows.iter().rev().find(|r| r.recall >= min_recall).copied()
}

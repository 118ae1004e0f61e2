//! Cross-lingual document similarity through a shared descriptor space.
//!
//! Documents in any language are normalized to lemma counts, mapped onto a
//! ranked vector of thesaurus descriptors by trained associate profiles, and
//! compared by cosine with an optional length-ratio penalty and a
//! same-language bias correction.

pub mod assign;
pub mod corpus;
pub mod dedupe;
pub mod error;
pub mod experiment;
pub mod normalize;
pub mod profile;
pub mod similarity;
pub mod synthetic;
pub mod thesaurus;

pub use assign::{assign, Assigner, DescriptorVector, DEFAULT_TOP_K};
pub use corpus::{DocPair, ParallelCorpus};
pub use dedupe::{dedupe, DedupeResult, RemovedPair};
pub use error::{Error, Result};
pub use experiment::{
    run_experiment, sweep_threshold, Benchmark, EvaluationReport, ExperimentMode, ExperimentOptions,
};
pub use normalize::{normalize, tokenize, LanguageResources, NormalizedDocument, RawDocument};
pub use profile::{
    build_contingency, idf, log_likelihood, train_profiles, AssociateProfile, ContingencyTable,
    CorpusStats, IdfVariant, ProfileSet, TrainingConfig,
};
pub use similarity::{
    cosine, detect_translation, estimate_length_model, find_most_similar, length_factor,
    similarity, LengthModel, LengthStats, RankedMatch, ScoreMode, SearchDoc, SimilarityOptions,
};
pub use synthetic::{generate_synthetic, SyntheticCorpus, SyntheticSpec};
pub use thesaurus::{Descriptor, DescriptorCode, Thesaurus};

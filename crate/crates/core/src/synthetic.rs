//! Seeded generator of bilingual corpora with known translation pairs.
//!
//! Two invented languages share a hidden lemma-by-lemma correspondence. Each
//! descriptor owns a weighted set of topic lemmas; a document picks one to
//! four descriptors, mixes their distributions, and adds background tokens.
//! A document's translation re-expresses the same lemma draw through the
//! correspondence, with some paraphrasing and a few systematic alternative
//! renderings, and is padded with function words until its character length
//! matches a drawn ratio. Most ratios are Gaussian and tight; a few pairs are
//! far longer on the target side, and the mix averages to
//! `target_length_inflation`. Some documents are edited variants of earlier
//! ones, which gives every corpus the same-language near relatives that real
//! document collections have.

use std::collections::HashSet;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, LogNormal, Normal};

use crate::corpus::{DocPair, ParallelCorpus};
use crate::error::{read_to_string, write_string, Error, Result};
use crate::normalize::{LanguageResources, RawDocument};
use crate::thesaurus::{Descriptor, DescriptorCode, Thesaurus};

/// Seed offset of the second test set, used by the T3 experiment.
const SECOND_SET_SEED_OFFSET: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub src_lang: String,
    pub tgt_lang: String,
    pub n_descriptors: usize,
    /// Training pairs; each language gets this many documents.
    pub n_train_docs: usize,
    pub n_test_pairs: usize,
    pub vocab_size_per_lang: usize,
    pub lemmas_per_descriptor: usize,
    /// Content tokens per source document, log-normally distributed.
    pub doc_length_mean: f64,
    pub doc_length_std: f64,
    pub min_descriptors_per_doc: usize,
    pub max_descriptors_per_doc: usize,
    /// Unlabelled topics each document touches in passing.
    pub incidental_topics: usize,
    /// Share of a document's topical tokens that go to incidental topics.
    pub incidental_share: f64,
    /// Mean of `chars(tgt) / chars(src)`.
    pub target_length_inflation: f64,
    /// Spread of that ratio for ordinary pairs.
    pub length_ratio_std: f64,
    /// Fraction of pairs whose ratio is pushed up by `length_outlier_shift`,
    /// such as translations carrying an extra annex.
    pub length_outlier_rate: f64,
    pub length_outlier_shift: f64,
    /// Fraction of content tokens drawn from the background vocabulary.
    pub noise_rate: f64,
    /// Probability that a translated token is re-drawn from the document's
    /// topic mixture instead of carried over.
    pub paraphrase_rate: f64,
    /// Fraction of topic lemmas that are always translated by an
    /// alternative, a lemma of a sister descriptor in the same field.
    pub translation_drift: f64,
    /// Fraction of documents that are edited copies of an earlier original.
    pub variant_rate: f64,
    /// Fraction of tokens re-drawn in such a copy.
    pub variant_edit_rate: f64,
    /// Typical relative length change of a copy. A copy is an extended or an
    /// abridged version, scaled by `1 + c` or `1 / (1 + c)` where `c` is
    /// uniform in half to one and a half times this value.
    pub variant_length_change: f64,
    /// Standard deviation of the log-scale change a copy applies to each
    /// descriptor's share of its mixture.
    pub variant_mixture_shift: f64,

    /// Fraction of lemmas that are two-word compounds.
    pub compound_rate: f64,
    /// Probability of writing an inflected surface form.
    pub inflection_rate: f64,
    /// Function words inserted per source content token.
    pub stopword_rate: f64,
    pub rng_seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            src_lang: "en".into(),
            tgt_lang: "es".into(),
            n_descriptors: 30,
            n_train_docs: 300,
            n_test_pairs: 100,
            vocab_size_per_lang: 2000,
            lemmas_per_descriptor: 40,
            doc_length_mean: 300.0,
            doc_length_std: 20.0,
            min_descriptors_per_doc: 1,
            max_descriptors_per_doc: 4,
            incidental_topics: 6,
            incidental_share: 0.55,
            target_length_inflation: 1.135,
            length_ratio_std: 0.05,
            length_outlier_rate: 0.02,
            length_outlier_shift: 1.3,
            noise_rate: 0.3,
            paraphrase_rate: 0.05,
            translation_drift: 0.3,
            variant_rate: 0.3,
            variant_edit_rate: 0.25,
            variant_length_change: 0.3,
            variant_mixture_shift: 0.5,
            compound_rate: 0.1,
            inflection_rate: 0.3,
            stopword_rate: 0.35,
            rng_seed: 2,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if self.src_lang.is_empty() || self.tgt_lang.is_empty() || self.src_lang == self.tgt_lang {
            return fail("languages must be nonempty and distinct");
        }
        if self.n_descriptors == 0 || self.n_train_docs == 0 || self.n_test_pairs == 0 {
            return fail("descriptor, training and test counts must be positive");
        }
        if self.lemmas_per_descriptor == 0 {
            return fail("lemmas_per_descriptor must be positive");
        }
        if self.vocab_size_per_lang < self.lemmas_per_descriptor + 10 {
            return fail("vocabulary too small for the topic lemmas and a background");
        }
        if self.min_descriptors_per_doc == 0
            || self.max_descriptors_per_doc < self.min_descriptors_per_doc
            || self.max_descriptors_per_doc > self.n_descriptors
        {
            return fail(
                "need 1 <= min_descriptors_per_doc <= max_descriptors_per_doc <= n_descriptors",
            );
        }
        if !(self.doc_length_mean >= 1.0 && self.doc_length_std >= 0.0) {
            return fail("doc_length_mean must be >= 1 and doc_length_std >= 0");
        }
        if !(self.target_length_inflation > 0.0
            && self.length_ratio_std >= 0.0
            && self.length_outlier_shift >= 0.0)
        {
            return fail("target_length_inflation must be positive and ratio spreads >= 0");
        }
        if self.target_length_inflation - self.length_outlier_rate * self.length_outlier_shift
            <= 0.3
        {
            return fail("length outliers leave no room for ordinary pairs");
        }
        if !(0.0..1.0).contains(&self.noise_rate) {
            return fail("noise_rate must be in [0, 1)");
        }
        let probabilities = [
            self.incidental_share,
            self.length_outlier_rate,
            self.paraphrase_rate,
            self.translation_drift,
            self.variant_rate,
            self.variant_edit_rate,
            self.compound_rate,
            self.inflection_rate,
        ];
        if probabilities.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return fail("rates and shares must lie in [0, 1]");
        }

        if !(self.variant_length_change >= 0.0 && self.variant_length_change.is_finite()) {
            return fail("variant_length_change must be >= 0");
        }
        if !(self.variant_mixture_shift >= 0.0 && self.variant_mixture_shift.is_finite()) {
            return fail("variant_mixture_shift must be >= 0");
        }
        if !(self.stopword_rate >= 0.0 && self.stopword_rate.is_finite()) {
            return fail("stopword_rate must be >= 0");
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: SyntheticSpec =
            toml::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&read_to_string(path.as_ref())?)
    }
}

const EN_ONSETS: &[&str] = &[
    "b", "c", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "br", "cr",
    "st", "tr", "pl", "gr", "sh", "th",
];
const EN_NUCLEI: &[&str] = &["a", "e", "i", "o", "u", "ea", "ou", "ai"];
const EN_CODAS: &[&str] = &["", "", "n", "r", "s", "t", "l", "nd", "ck"];
const ES_ONSETS: &[&str] = &[
    "b", "c", "d", "f", "g", "j", "l", "m", "n", "ñ", "p", "r", "s", "t", "v", "ch", "ll", "qu",
    "br", "pr", "tr",
];
const ES_NUCLEI: &[&str] = &["a", "e", "i", "o", "u", "ia", "ue", "io"];
const ES_CODAS: &[&str] = &["", "", "", "n", "s", "r", "l"];

struct Phonology {
    onsets: &'static [&'static str],
    nuclei: &'static [&'static str],
    codas: &'static [&'static str],
    /// Suffix for inflected forms, after a word ending in a vowel / consonant.
    plural: (&'static str, &'static str),
}

const EN: Phonology = Phonology {
    onsets: EN_ONSETS,
    nuclei: EN_NUCLEI,
    codas: EN_CODAS,
    plural: ("s", "es"),
};
const ES: Phonology = Phonology {
    onsets: ES_ONSETS,
    nuclei: ES_NUCLEI,
    codas: ES_CODAS,
    plural: ("s", "es"),
};

impl Phonology {
    fn syllable(&self, rng: &mut ChaCha8Rng, coda: bool) -> String {
        let mut s = String::new();
        s.push_str(self.onsets[rng.random_range(0..self.onsets.len())]);
        s.push_str(self.nuclei[rng.random_range(0..self.nuclei.len())]);
        if coda {
            s.push_str(self.codas[rng.random_range(0..self.codas.len())]);
        }
        s
    }

    fn word(&self, rng: &mut ChaCha8Rng, syllables: usize) -> String {
        (0..syllables)
            .map(|i| self.syllable(rng, i + 1 == syllables))
            .collect()
    }

    fn inflect(&self, word: &str) -> String {
        let vowel_end = word.ends_with(['a', 'e', 'i', 'o', 'u']);
        format!(
            "{word}{}",
            if vowel_end {
                self.plural.0
            } else {
                self.plural.1
            }
        )
    }
}

/// Surface inventory of one invented language.
#[derive(Debug, Clone)]
struct Vocabulary {
    /// Words of each lemma: one word, or two for a compound.
    lemmas: Vec<Vec<String>>,
    /// Inflected form of single-word lemmas.
    inflected: Vec<Option<String>>,
    stopwords: Vec<String>,
}

impl Vocabulary {
    fn generate(phon: &Phonology, size: usize, compound_rate: f64, rng: &mut ChaCha8Rng) -> Self {
        let mut taken: HashSet<String> = HashSet::new();
        let fresh = |rng: &mut ChaCha8Rng, taken: &mut HashSet<String>, min_syl: usize| loop {
            let syl = rng.random_range(min_syl..=min_syl + 1);
            let w = phon.word(rng, syl);
            let inf = phon.inflect(&w);
            if !taken.contains(&w) && !taken.contains(&inf) {
                taken.insert(w.clone());
                taken.insert(inf);
                break w;
            }
        };

        let mut stopwords = Vec::new();
        while stopwords.len() < 30 {
            let w = phon.word(rng, 1);
            if w.chars().count() <= 4 && taken.insert(w.clone()) {
                taken.insert(phon.inflect(&w));
                stopwords.push(w);
            }
        }

        let mut lemmas = Vec::with_capacity(size);
        let mut inflected = Vec::with_capacity(size);
        for _ in 0..size {
            if rng.random_bool(compound_rate) {
                let a = fresh(rng, &mut taken, 2);
                let b = fresh(rng, &mut taken, 2);
                lemmas.push(vec![a, b]);
                inflected.push(None);
            } else {
                let w = fresh(rng, &mut taken, 2);
                inflected.push(Some(phon.inflect(&w)));
                lemmas.push(vec![w]);
            }
        }
        Vocabulary {
            lemmas,
            inflected,
            stopwords,
        }
    }

    fn resources(&self, lang: &str) -> Result<LanguageResources> {
        let lexicon = self
            .lemmas
            .iter()
            .zip(&self.inflected)
            .filter_map(|(l, inf)| inf.as_ref().map(|i| (i.clone(), l[0].clone())));
        let compounds = self.lemmas.iter().filter(|l| l.len() > 1).cloned();
        LanguageResources::new(lang, self.stopwords.iter().cloned(), lexicon, compounds)
    }

    fn push_surface(&self, idx: usize, inflect: bool, out: &mut Vec<String>) {
        match &self.inflected[idx] {
            Some(inf) if inflect => out.push(inf.clone()),
            _ => out.extend(self.lemmas[idx].iter().cloned()),
        }
    }
}

#[derive(Debug, Clone)]
struct Topic {
    lemmas: Vec<usize>,
    weights: WeightedIndex<f64>,
}

/// A source document before rendering: its topics, mixture and lemma draw.
#[derive(Debug, Clone)]
struct Draw {
    /// Manual labels first, then incidental topics.
    topics: Vec<usize>,
    n_labels: usize,
    shares: Vec<f64>,
    mixture: WeightedIndex<f64>,
    tokens: Vec<usize>,
}

#[derive(Debug, Clone)]
struct World {
    spec: SyntheticSpec,
    src: Vocabulary,
    tgt: Vocabulary,
    topics: Vec<Topic>,
    background: Vec<usize>,
    background_weights: WeightedIndex<f64>,
    /// Translation of each lemma index (itself unless it drifts).
    alternative: Vec<usize>,
    codes: Vec<DescriptorCode>,
}

fn zipf_weights(n: usize, exponent: f64) -> WeightedIndex<f64> {
    WeightedIndex::new((1..=n).map(|r| 1.0 / (r as f64).powf(exponent))).expect("n > 0")
}

impl World {
    fn build(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Self {
        let v = spec.vocab_size_per_lang;
        let src = Vocabulary::generate(&EN, v, spec.compound_rate, rng);
        let tgt = Vocabulary::generate(&ES, v, spec.compound_rate, rng);

        // Topic lemmas come from a pool covering three quarters of the
        // vocabulary, so descriptors overlap somewhat; the rest is background.
        let pool = (v * 3 / 4)
            .min(spec.n_descriptors * spec.lemmas_per_descriptor)
            .max(spec.lemmas_per_descriptor);
        let topics: Vec<Topic> = (0..spec.n_descriptors)
            .map(|_| Topic {
                lemmas: index::sample(rng, pool, spec.lemmas_per_descriptor).into_vec(),
                weights: zipf_weights(spec.lemmas_per_descriptor, 0.8),
            })
            .collect();
        let background: Vec<usize> = (pool..v).collect();
        let background_weights = zipf_weights(background.len(), 1.0);

        // Alternative renderings point into one sister descriptor from the
        // same group of five, so drift blurs neighbouring concepts.
        let mut alternative: Vec<usize> = (0..v).collect();
        for (t, topic) in topics.iter().enumerate() {
            let head = t - t % 5;
            let group = (head + 5).min(spec.n_descriptors) - head;
            if group < 2 {
                continue;
            }
            let sister = head + (t - head + rng.random_range(1..group)) % group;
            let other = &topics[sister].lemmas;
            for &lemma in &topic.lemmas {
                if rng.random_bool(spec.translation_drift) {
                    alternative[lemma] = other[rng.random_range(0..other.len())];
                }
            }
        }

        let codes = (0..spec.n_descriptors)
            .map(|i| DescriptorCode::new(1000 + i as u32).expect("positive"))
            .collect();
        World {
            spec: spec.clone(),
            src,
            tgt,
            topics,
            background,
            background_weights,
            alternative,
            codes,
        }
    }

    fn thesaurus(&self) -> Result<Thesaurus> {
        let (sl, tl) = (&self.spec.src_lang, &self.spec.tgt_lang);
        let label = |vocab: &Vocabulary, topic: &Topic| {
            let mut top: Vec<usize> = topic.lemmas.iter().take(2).copied().collect();
            top.dedup();
            top.iter()
                .map(|&i| vocab.lemmas[i].join(" ").to_uppercase())
                .collect::<Vec<_>>()
                .join(" / ")
        };
        let mut descriptors: Vec<Descriptor> = self
            .topics
            .iter()
            .enumerate()
            .map(|(i, topic)| {
                Descriptor::new(self.codes[i], (i / 5) as u32 + 1, (i / 2) as u32 + 1)
                    .with_label(sl, &label(&self.src, topic))
                    .with_label(tl, &label(&self.tgt, topic))
            })
            .collect();
        // Each group of five hangs under its first member.
        for i in 0..descriptors.len() {
            let head = i - i % 5;
            if head != i {
                let (head_code, code) = (self.codes[head], self.codes[i]);
                descriptors[i].broader.insert(head_code);
                descriptors[head].narrower.insert(code);
            }
        }
        Thesaurus::new(vec![sl.clone(), tl.clone()], descriptors)
    }

    /// Log-normal with the configured mean and standard deviation.
    fn doc_length(&self, rng: &mut ChaCha8Rng) -> usize {
        let (mean, std) = (self.spec.doc_length_mean, self.spec.doc_length_std);
        let s2 = (1.0 + (std / mean).powi(2)).ln();
        let law = LogNormal::new(mean.ln() - s2 / 2.0, s2.sqrt()).expect("validated spec");
        law.sample(rng).round().max(10.0) as usize
    }

    fn draw_token(
        &self,
        topics: &[usize],
        mixture: &WeightedIndex<f64>,
        rng: &mut ChaCha8Rng,
    ) -> usize {
        if rng.random_bool(self.spec.noise_rate) {
            self.background[self.background_weights.sample(rng)]
        } else {
            let topic = &self.topics[topics[mixture.sample(rng)]];
            topic.lemmas[topic.weights.sample(rng)]
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Draw {
        let k =
            rng.random_range(self.spec.min_descriptors_per_doc..=self.spec.max_descriptors_per_doc);
        let extra = self.spec.incidental_topics.min(self.spec.n_descriptors - k);
        let topics = index::sample(rng, self.spec.n_descriptors, k + extra).into_vec();
        let mut exp = |n: usize, total: f64| {
            let raw: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1) + 1e-3).collect();
            let sum: f64 = raw.iter().sum();
            raw.into_iter().map(move |w| w / sum * total)
        };
        let incidental = if extra > 0 {
            self.spec.incidental_share
        } else {
            0.0
        };
        let mut shares: Vec<f64> = exp(k, 1.0 - incidental).collect();
        shares.extend(exp(extra, incidental));
        let mixture = WeightedIndex::new(&shares).expect("positive shares");
        let n = self.doc_length(rng);
        let tokens = (0..n)
            .map(|_| self.draw_token(&topics, &mixture, rng))
            .collect();
        Draw {
            topics,
            n_labels: k,
            shares,
            mixture,
            tokens,
        }
    }

    fn variant_of(&self, base: &Draw, rng: &mut ChaCha8Rng) -> Draw {
        // Shift the emphasis among the base's descriptors, then redraw the
        // edited tokens from the shifted mixture.
        let shift = Normal::new(0.0, self.spec.variant_mixture_shift).expect("validated spec");
        let shares: Vec<f64> = base
            .shares
            .iter()
            .map(|w| w * shift.sample(rng).exp())
            .collect();
        let mixture = WeightedIndex::new(&shares).expect("positive shares");
        let mut tokens: Vec<usize> = base
            .tokens
            .iter()
            .map(|&t| {
                if rng.random_bool(self.spec.variant_edit_rate) {
                    self.draw_token(&base.topics, &mixture, rng)
                } else {
                    t
                }
            })
            .collect();
        let change = 1.0 + self.spec.variant_length_change * rng.random_range(0.5..1.5);
        let scale = if rng.random_bool(0.5) {
            change
        } else {
            1.0 / change
        };
        let n = (scale * tokens.len() as f64).round().max(10.0) as usize;
        if n < tokens.len() {
            tokens.truncate(n);
        }
        while tokens.len() < n {
            tokens.push(self.draw_token(&base.topics, &mixture, rng));
        }
        Draw {
            topics: base.topics.clone(),
            n_labels: base.n_labels,
            shares,
            mixture,
            tokens,
        }
    }

    fn translate(&self, draw: &Draw, rng: &mut ChaCha8Rng) -> Vec<usize> {
        draw.tokens
            .iter()
            .map(|&t| {
                let t = if rng.random_bool(self.spec.paraphrase_rate) {
                    self.draw_token(&draw.topics, &draw.mixture, rng)
                } else {
                    t
                };
                self.alternative[t]
            })
            .collect()
    }

    fn surface_words(
        &self,
        vocab: &Vocabulary,
        tokens: &[usize],
        stop_rate: f64,
        rng: &mut ChaCha8Rng,
    ) -> Vec<String> {
        let mut words = Vec::with_capacity(tokens.len() * 2);
        for &t in tokens {
            if stop_rate > 0.0 && rng.random_bool(stop_rate.min(1.0)) {
                words.push(vocab.stopwords[rng.random_range(0..vocab.stopwords.len())].clone());
            }
            let inflect = rng.random_bool(self.spec.inflection_rate);
            vocab.push_surface(t, inflect, &mut words);
        }
        words
    }

    fn pair(&self, id: &str, draw: &Draw, rng: &mut ChaCha8Rng) -> DocPair {
        let (sl, tl) = (&self.spec.src_lang, &self.spec.tgt_lang);
        let labels: Vec<DescriptorCode> = draw.topics[..draw.n_labels]
            .iter()
            .map(|&i| self.codes[i])
            .collect();
        let sentence = rng.random_range(8..=16);

        let src_words = self.surface_words(&self.src, &draw.tokens, self.spec.stopword_rate, rng);
        let src_text = render(&src_words, sentence);

        let tgt_tokens = self.translate(draw, rng);
        let mut tgt_words = self.surface_words(&self.tgt, &tgt_tokens, 0.0, rng);
        // Ordinary pairs sit below the inflation so that outliers bring the
        // overall mean back to it.
        let mut mean = self.spec.target_length_inflation
            - self.spec.length_outlier_rate * self.spec.length_outlier_shift;
        if rng.random_bool(self.spec.length_outlier_rate) {
            mean += self.spec.length_outlier_shift;
        }
        let ratio = Normal::new(mean, self.spec.length_ratio_std)
            .expect("validated spec")
            .sample(rng)
            .max(0.3);
        let wanted = (ratio * src_text.chars().count() as f64).round() as usize;
        let mut len = rendered_len(&tgt_words, sentence);
        while len < wanted {
            let stop = self.tgt.stopwords[rng.random_range(0..self.tgt.stopwords.len())].clone();
            let at = rng.random_range(0..=tgt_words.len());
            tgt_words.insert(at, stop);
            len = rendered_len(&tgt_words, sentence);
        }
        let tgt_text = render(&tgt_words, sentence);

        DocPair {
            id: id.to_string(),
            src: RawDocument::new(format!("{id}.{sl}"), sl.clone(), src_text)
                .with_descriptors(labels.iter().copied()),
            tgt: RawDocument::new(format!("{id}.{tl}"), tl.clone(), tgt_text)
                .with_descriptors(labels),
        }
    }

    /// Pairs plus `(variant, original)` pair ids for every edited copy.
    fn corpus(
        &self,
        prefix: &str,
        n: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<(ParallelCorpus, Vec<(String, String)>)> {
        let mut draws: Vec<Draw> = Vec::with_capacity(n);
        let mut pairs: Vec<DocPair> = Vec::with_capacity(n);
        let mut variants = Vec::new();
        let mut originals: Vec<usize> = Vec::new();
        for i in 0..n {
            let id = format!("{prefix}{:04}", i + 1);
            let draw = if !originals.is_empty() && rng.random_bool(self.spec.variant_rate) {
                let base = originals[rng.random_range(0..originals.len())];
                variants.push((id.clone(), pairs[base].id.clone()));
                self.variant_of(&draws[base], rng)
            } else {
                originals.push(i);
                self.draw(rng)
            };
            pairs.push(self.pair(&id, &draw, rng));
            draws.push(draw);
        }
        let corpus = ParallelCorpus::new(&self.spec.src_lang, &self.spec.tgt_lang, pairs)?;
        Ok((corpus, variants))
    }
}

/// Characters of `render(words, sentence)` without building it.
fn rendered_len(words: &[String], sentence: usize) -> usize {
    if words.is_empty() {
        return 0;
    }
    let chars: usize = words.iter().map(|w| w.chars().count()).sum();
    let sentences = words.len().div_ceil(sentence);
    chars + (words.len() - 1) + sentences
}

/// Space-separated sentences of `sentence` words, capitalized, each ending
/// with a period.
fn render(words: &[String], sentence: usize) -> String {
    let mut out = String::new();
    for (i, chunk) in words.chunks(sentence).enumerate() {
        if i > 0 {
            out.push(' ');
        }
        for (j, w) in chunk.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            if j == 0 {
                let mut cs = w.chars();
                if let Some(c) = cs.next() {
                    out.extend(c.to_uppercase());
                    out.push_str(cs.as_str());
                }
            } else {
                out.push_str(w);
            }
        }
        out.push('.');
    }
    out
}

/// Everything produced by [`generate_synthetic`].
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub spec: SyntheticSpec,
    pub thesaurus: Thesaurus,
    pub src_resources: LanguageResources,
    pub tgt_resources: LanguageResources,
    pub train: ParallelCorpus,
    pub test: ParallelCorpus,
    /// `(variant, original)` pair ids of the edited copies in `test`.
    pub test_variants: Vec<(String, String)>,
    world: World,
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticCorpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let world = World::build(spec, &mut rng);
    let thesaurus = world.thesaurus()?;
    let src_resources = world.src.resources(&spec.src_lang)?;
    let tgt_resources = world.tgt.resources(&spec.tgt_lang)?;
    let (train, _) = world.corpus("tr", spec.n_train_docs, &mut rng)?;
    let (test, test_variants) = world.corpus("t1-", spec.n_test_pairs, &mut rng)?;
    Ok(SyntheticCorpus {
        spec: spec.clone(),
        thesaurus,
        src_resources,
        tgt_resources,
        train,
        test,
        test_variants,
        world,
    })
}

impl SyntheticCorpus {
    /// Another test set from the same languages and topics, drawn from an
    /// independent seed. Ids start with `prefix`.
    pub fn sample_test_set(&self, prefix: &str, n: usize, seed: u64) -> Result<ParallelCorpus> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(self.world.corpus(prefix, n, &mut rng)?.0)
    }

    /// The second test set of the benchmark, ids prefixed `t2-`.
    pub fn second_test_set(&self) -> Result<ParallelCorpus> {
        self.sample_test_set(
            "t2-",
            self.spec.n_test_pairs,
            self.spec.rng_seed.wrapping_add(SECOND_SET_SEED_OFFSET),
        )
    }

    /// Writes `spec.toml`, `thesaurus.txt`, `resources/<lang>/`, `train/`,
    /// `test/` and `test2/` under `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        write_string(&dir.join("spec.toml"), &self.spec.to_toml())?;
        self.thesaurus.save(dir.join("thesaurus.txt"))?;
        self.src_resources
            .save_dir(dir.join("resources").join(&self.spec.src_lang))?;
        self.tgt_resources
            .save_dir(dir.join("resources").join(&self.spec.tgt_lang))?;
        self.train.save(dir.join("train"))?;
        self.test.save(dir.join("test"))?;
        self.second_test_set()?.save(dir.join("test2"))
    }
}

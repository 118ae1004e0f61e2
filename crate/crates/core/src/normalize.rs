//! Raw text to lemma frequencies: tokenize, lemmatize by lexicon lookup,
//! join multiword compounds, drop stopwords, count.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use crate::error::{read_to_string, write_string, Error, Result};
use crate::thesaurus::DescriptorCode;

/// Joins the members of a recognised compound lemma.
pub const COMPOUND_JOINER: char = '_';

/// Splits text into maximal runs of alphanumeric characters, lowercased.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Per-language lexical resources. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageResources {
    lang: String,
    stopwords: BTreeSet<String>,
    lexicon: BTreeMap<String, String>,
    compounds: BTreeSet<Vec<String>>,
    max_compound_len: usize,
}

impl LanguageResources {
    pub fn new(
        lang: impl Into<String>,
        stopwords: impl IntoIterator<Item = String>,
        lexicon: impl IntoIterator<Item = (String, String)>,
        compounds: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<Self> {
        let lang = lang.into();
        let stopwords: BTreeSet<String> = stopwords.into_iter().collect();
        let lexicon: BTreeMap<String, String> = lexicon.into_iter().collect();
        let compounds: BTreeSet<Vec<String>> = compounds.into_iter().collect();

        for word in &stopwords {
            if let Some(lemma) = lexicon.get(word) {
                if lemma != word {
                    return Err(Error::Validation(format!(
                        "{lang}: stopword {word:?} is not a lemma (lexicon maps it to {lemma:?})"
                    )));
                }
            }
        }
        for compound in &compounds {
            if compound.len() < 2 {
                return Err(Error::Validation(format!(
                    "{lang}: compound {compound:?} has fewer than two members"
                )));
            }
            if compound.iter().all(|m| stopwords.contains(m)) {
                return Err(Error::Validation(format!(
                    "{lang}: compound {compound:?} consists only of stopwords"
                )));
            }
        }
        let max_compound_len = compounds.iter().map(Vec::len).max().unwrap_or(0);

        Ok(LanguageResources {
            lang,
            stopwords,
            lexicon,
            compounds,
            max_compound_len,
        })
    }

    /// Resources that do nothing beyond tokenizing and counting.
    pub fn empty(lang: impl Into<String>) -> Self {
        LanguageResources::new(lang, [], [], []).expect("empty resources are valid")
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    pub fn is_stopword(&self, lemma: &str) -> bool {
        self.stopwords.contains(lemma)
    }

    pub fn lemmatize<'a>(&'a self, token: &'a str) -> &'a str {
        self.lexicon.get(token).map_or(token, String::as_str)
    }

    pub fn compounds(&self) -> &BTreeSet<Vec<String>> {
        &self.compounds
    }

    /// Reads `stopwords.txt`, `lexicon.tsv` and `compounds.txt` from `dir`.
    pub fn load_dir(dir: impl AsRef<Path>, lang: &str) -> Result<Self> {
        let dir = dir.as_ref();
        let stopwords = parse_stopwords(&read_to_string(&dir.join("stopwords.txt"))?);
        let lexicon = parse_lexicon(&read_to_string(&dir.join("lexicon.tsv"))?)?;
        let compounds = parse_compounds(&read_to_string(&dir.join("compounds.txt"))?);
        LanguageResources::new(lang, stopwords, lexicon, compounds)
    }

    pub fn save_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        let mut stop = String::new();
        for w in &self.stopwords {
            stop.push_str(w);
            stop.push('\n');
        }
        let mut lex = String::new();
        for (surface, lemma) in &self.lexicon {
            lex.push_str(&format!("{surface}\t{lemma}\n"));
        }
        let mut comp = String::new();
        for c in &self.compounds {
            comp.push_str(&c.join(" "));
            comp.push('\n');
        }
        write_string(&dir.join("stopwords.txt"), &stop)?;
        write_string(&dir.join("lexicon.tsv"), &lex)?;
        write_string(&dir.join("compounds.txt"), &comp)
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_stopwords(text: &str) -> Vec<String> {
    content_lines(text).map(|(_, l)| l.to_lowercase()).collect()
}

fn parse_lexicon(text: &str) -> Result<Vec<(String, String)>> {
    content_lines(text)
        .map(|(line, l)| {
            let (surface, lemma) = l
                .split_once('\t')
                .ok_or_else(|| Error::parse(line, "expected `surface<TAB>lemma`"))?;
            let (surface, lemma) = (surface.trim(), lemma.trim());
            if surface.is_empty() || lemma.is_empty() {
                return Err(Error::parse(line, "empty lexicon field"));
            }
            Ok((surface.to_lowercase(), lemma.to_lowercase()))
        })
        .collect()
}

fn parse_compounds(text: &str) -> Vec<Vec<String>> {
    content_lines(text)
        .map(|(_, l)| l.split_whitespace().map(str::to_lowercase).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub id: String,
    pub lang: String,
    pub text: String,
    pub manual_descriptors: Option<BTreeSet<DescriptorCode>>,
}

impl RawDocument {
    pub fn new(id: impl Into<String>, lang: impl Into<String>, text: impl Into<String>) -> Self {
        RawDocument {
            id: id.into(),
            lang: lang.into(),
            text: text.into(),
            manual_descriptors: None,
        }
    }

    pub fn with_descriptors(mut self, codes: impl IntoIterator<Item = DescriptorCode>) -> Self {
        self.manual_descriptors = Some(codes.into_iter().collect());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedDocument {
    pub id: String,
    pub lang: String,
    pub lemma_freq: BTreeMap<String, u32>,
    /// Characters in the raw text, before any processing.
    pub char_length: usize,
    /// Surface tokens before compound joining and stopword removal.
    pub token_count: usize,
    pub manual_descriptors: BTreeSet<DescriptorCode>,
}

impl NormalizedDocument {
    pub fn total_lemmas(&self) -> u64 {
        self.lemma_freq.values().map(|&c| u64::from(c)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.lemma_freq.is_empty()
    }
}

pub fn normalize(doc: &RawDocument, res: &LanguageResources) -> Result<NormalizedDocument> {
    if doc.lang != res.lang {
        return Err(Error::LanguageMismatch {
            expected: res.lang.clone(),
            found: doc.lang.clone(),
        });
    }
    let tokens = tokenize(&doc.text);
    let lemmas: Vec<&str> = tokens.iter().map(|t| res.lemmatize(t)).collect();

    let mut lemma_freq = BTreeMap::new();
    for lemma in join_compounds(&lemmas, res) {
        if !res.is_stopword(&lemma) {
            *lemma_freq.entry(lemma).or_insert(0) += 1;
        }
    }

    Ok(NormalizedDocument {
        id: doc.id.clone(),
        lang: doc.lang.clone(),
        lemma_freq,
        char_length: doc.text.chars().count(),
        token_count: tokens.len(),
        manual_descriptors: doc.manual_descriptors.clone().unwrap_or_default(),
    })
}

/// Greedy longest match, left to right.
fn join_compounds(lemmas: &[&str], res: &LanguageResources) -> Vec<String> {
    let mut out = Vec::with_capacity(lemmas.len());
    let mut probe: Vec<String> = Vec::with_capacity(res.max_compound_len);
    let mut i = 0;
    'outer: while i < lemmas.len() {
        let longest = res.max_compound_len.min(lemmas.len() - i);
        for len in (2..=longest).rev() {
            probe.clear();
            probe.extend(lemmas[i..i + len].iter().map(|s| s.to_string()));
            if res.compounds.contains(&probe) {
                out.push(probe.join(&COMPOUND_JOINER.to_string()));
                i += len;
                continue 'outer;
            }
        }
        out.push(lemmas[i].to_string());
        i += 1;
    }
    out
}

/// Normalizes many documents in parallel, one resource set per language.
pub fn normalize_all(
    docs: &[RawDocument],
    resources: &HashMap<String, LanguageResources>,
) -> Result<Vec<NormalizedDocument>> {
    use rayon::prelude::*;
    docs.par_iter()
        .map(|d| {
            let res = resources
                .get(&d.lang)
                .ok_or_else(|| Error::UnknownLanguage(d.lang.clone()))?;
            normalize(d, res)
        })
        .collect()
}

/// Lemma keys of a document, for diagnostics and tests.
pub fn lemma_keys(doc: &NormalizedDocument) -> HashSet<&str> {
    doc.lemma_freq.keys().map(String::as_str).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn tokenize_examples() {
        assert!(tokenize("").is_empty());
        assert_eq!(
            tokenize("Carriage of dangerous goods."),
            ["carriage", "of", "dangerous", "goods"]
        );
        // '-' is neither letter nor digit, so it splits the run.
        assert_eq!(tokenize("ADR-2003 tank"), ["adr", "2003", "tank"]);
        assert_eq!(tokenize("  Ñandú,ÉTÉ!! x2 "), ["ñandú", "été", "x2"]);
    }

    #[test]
    fn compounds_and_stopwords() {
        let res = LanguageResources::new(
            "en",
            words("of"),
            [],
            [words("dangerous goods"), words("by road")],
        )
        .unwrap();
        let doc = RawDocument::new("d1", "en", "transport of dangerous goods by road");
        let n = normalize(&doc, &res).unwrap();
        let expected: BTreeMap<String, u32> =
            [("transport", 1), ("dangerous_goods", 1), ("by_road", 1)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect();
        assert_eq!(n.lemma_freq, expected);
        assert_eq!(n.token_count, 6);
        assert_eq!(n.char_length, 36);
    }

    #[test]
    fn empty_text() {
        let n = normalize(
            &RawDocument::new("e", "en", ""),
            &LanguageResources::empty("en"),
        )
        .unwrap();
        assert!(n.lemma_freq.is_empty());
        assert_eq!((n.char_length, n.token_count), (0, 0));
    }

    #[test]
    fn lexicon_is_applied() {
        let res = LanguageResources::new("en", [], [("goods".into(), "good".into())], []).unwrap();
        let n = normalize(&RawDocument::new("g", "en", "goods goods"), &res).unwrap();
        assert_eq!(n.lemma_freq, BTreeMap::from([("good".to_string(), 2)]));
        assert_eq!(n.token_count, 2);
    }

    #[test]
    fn compounds_match_after_lemmatization() {
        let res = LanguageResources::new(
            "en",
            [],
            [("goods".into(), "good".into())],
            [words("dangerous good")],
        )
        .unwrap();
        let n = normalize(&RawDocument::new("g", "en", "Dangerous Goods"), &res).unwrap();
        assert_eq!(
            n.lemma_freq,
            BTreeMap::from([("dangerous_good".to_string(), 1)])
        );
    }

    #[test]
    fn longest_compound_wins() {
        let res = LanguageResources::new(
            "en",
            [],
            [],
            [words("nuclear fuel"), words("nuclear fuel cycle")],
        )
        .unwrap();
        let n = normalize(
            &RawDocument::new("n", "en", "nuclear fuel cycle and nuclear fuel"),
            &res,
        )
        .unwrap();
        assert_eq!(n.lemma_freq["nuclear_fuel_cycle"], 1);
        assert_eq!(n.lemma_freq["nuclear_fuel"], 1);
        assert!(!n.lemma_freq.contains_key("nuclear"));
        assert!(!n.lemma_freq.contains_key("fuel"));
    }

    #[test]
    fn language_mismatch() {
        let err = normalize(
            &RawDocument::new("x", "es", "hola"),
            &LanguageResources::empty("en"),
        )
        .unwrap_err();
        assert!(matches!(err, Error::LanguageMismatch { .. }));
    }

    #[test]
    fn resource_validation() {
        assert!(LanguageResources::new("en", words("of the"), [], [words("of the")]).is_err());
        assert!(LanguageResources::new("en", [], [], [words("solo")]).is_err());
        assert!(
            LanguageResources::new("en", words("was"), [("was".into(), "be".into())], []).is_err()
        );
    }

    #[test]
    fn resource_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let res = LanguageResources::new(
            "en",
            words("of the"),
            [("goods".into(), "good".into())],
            [words("by road")],
        )
        .unwrap();
        res.save_dir(dir.path()).unwrap();
        assert_eq!(LanguageResources::load_dir(dir.path(), "en").unwrap(), res);
    }

    #[test]
    fn malformed_lexicon_line() {
        let err = parse_lexicon("a\tb\nbroken line\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}

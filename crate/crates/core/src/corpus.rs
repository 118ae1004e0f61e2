//! Corpus manifests and parallel corpora on disk.
//!
//! A manifest lists one document per line:
//! `id<TAB>lang<TAB>path<TAB>codes`, where `codes` is a comma-separated list
//! of descriptor codes (possibly empty) and `path` is relative to the
//! manifest's directory. A parallel corpus directory holds `manifest.tsv`,
//! `pairs.tsv` (`pair_id<TAB>src_id<TAB>tgt_id`) and the document files.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{read_to_string, write_string, Error, Result};
use crate::normalize::RawDocument;
use crate::thesaurus::DescriptorCode;

pub const MANIFEST_FILE: &str = "manifest.tsv";
pub const PAIRS_FILE: &str = "pairs.tsv";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: String,
    pub lang: String,
    pub path: PathBuf,
    pub descriptors: Option<BTreeSet<DescriptorCode>>,
}

pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<ManifestEntry>> {
    let mut entries = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let (id, lang, path, codes) = match fields[..] {
            [id, lang, path] => (id, lang, path, ""),
            [id, lang, path, codes] => (id, lang, path, codes),
            _ => {
                return Err(Error::parse(
                    line_no,
                    "expected `id<TAB>lang<TAB>path<TAB>descriptor-codes`",
                ))
            }
        };
        if id.is_empty() || lang.is_empty() || path.is_empty() {
            return Err(Error::parse(line_no, "empty id, language or path"));
        }
        if !ids.insert(id) {
            return Err(Error::Validation(format!("duplicate document id {id:?}")));
        }
        let codes = codes.trim();
        let descriptors = if codes.is_empty() {
            None
        } else {
            Some(
                codes
                    .split(',')
                    .map(|c| c.trim().parse::<DescriptorCode>())
                    .collect::<std::result::Result<BTreeSet<_>, _>>()
                    .map_err(|e| Error::parse(line_no, e))?,
            )
        };
        entries.push(ManifestEntry {
            id: id.to_string(),
            lang: lang.to_string(),
            path: base.join(path),
            descriptors,
        });
    }
    Ok(entries)
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or(Path::new(""));
    parse_manifest(&read_to_string(path)?, base)
}

/// Reads every document listed in a manifest.
pub fn load_corpus(manifest: impl AsRef<Path>) -> Result<Vec<RawDocument>> {
    read_manifest(manifest)?
        .into_iter()
        .map(|e| {
            Ok(RawDocument {
                text: read_to_string(&e.path)?,
                id: e.id,
                lang: e.lang,
                manual_descriptors: e.descriptors,
            })
        })
        .collect()
}

fn doc_file_name(id: &str) -> String {
    let safe: String = id
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '.' || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("docs/{safe}.txt")
}

/// Writes documents under `dir/docs/` and a manifest at `dir/manifest.tsv`.
pub fn write_corpus(dir: impl AsRef<Path>, docs: &[RawDocument]) -> Result<PathBuf> {
    let dir = dir.as_ref();
    let mut manifest = String::new();
    let mut names = HashSet::new();
    for d in docs {
        let rel = doc_file_name(&d.id);
        if !names.insert(rel.clone()) {
            return Err(Error::Validation(format!(
                "document id {:?} collides on disk",
                d.id
            )));
        }
        write_string(&dir.join(&rel), &d.text)?;
        let codes = d
            .manual_descriptors
            .iter()
            .flatten()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",");
        writeln!(manifest, "{}\t{}\t{rel}\t{codes}", d.id, d.lang).unwrap();
    }
    let path = dir.join(MANIFEST_FILE);
    write_string(&path, &manifest)?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocPair {
    pub id: String,
    pub src: RawDocument,
    pub tgt: RawDocument,
}

/// Documents paired with their translations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelCorpus {
    pub src_lang: String,
    pub tgt_lang: String,
    pub pairs: Vec<DocPair>,
}

impl ParallelCorpus {
    pub fn new(src_lang: &str, tgt_lang: &str, pairs: Vec<DocPair>) -> Result<Self> {
        let mut pair_ids = HashSet::new();
        let mut doc_ids = HashSet::new();
        for p in &pairs {
            if !pair_ids.insert(p.id.as_str()) {
                return Err(Error::Validation(format!("duplicate pair id {:?}", p.id)));
            }
            for (doc, lang) in [(&p.src, src_lang), (&p.tgt, tgt_lang)] {
                if doc.lang != lang {
                    return Err(Error::LanguageMismatch {
                        expected: lang.to_string(),
                        found: doc.lang.clone(),
                    });
                }
                if !doc_ids.insert(doc.id.as_str()) {
                    return Err(Error::Validation(format!(
                        "duplicate document id {:?}",
                        doc.id
                    )));
                }
            }
        }
        Ok(ParallelCorpus {
            src_lang: src_lang.to_string(),
            tgt_lang: tgt_lang.to_string(),
            pairs,
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn sources(&self) -> impl Iterator<Item = &RawDocument> {
        self.pairs.iter().map(|p| &p.src)
    }

    pub fn targets(&self) -> impl Iterator<Item = &RawDocument> {
        self.pairs.iter().map(|p| &p.tgt)
    }

    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        let docs: Vec<RawDocument> = self
            .pairs
            .iter()
            .flat_map(|p| [p.src.clone(), p.tgt.clone()])
            .collect();
        write_corpus(dir, &docs)?;
        let mut pairs = String::new();
        for p in &self.pairs {
            writeln!(pairs, "{}\t{}\t{}", p.id, p.src.id, p.tgt.id).unwrap();
        }
        write_string(&dir.join(PAIRS_FILE), &pairs)
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let mut docs: HashMap<String, RawDocument> = load_corpus(dir.join(MANIFEST_FILE))?
            .into_iter()
            .map(|d| (d.id.clone(), d))
            .collect();
        let text = read_to_string(&dir.join(PAIRS_FILE))?;
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let [id, src, tgt] = line.split('\t').collect::<Vec<_>>()[..] else {
                return Err(Error::parse(
                    i + 1,
                    "expected `pair_id<TAB>src_id<TAB>tgt_id`",
                ));
            };
            let mut take = |doc_id: &str| {
                docs.remove(doc_id).ok_or_else(|| {
                    Error::Validation(format!("pair {id}: document {doc_id:?} missing or reused"))
                })
            };
            let src = take(src)?;
            let tgt = take(tgt)?;
            pairs.push(DocPair {
                id: id.to_string(),
                src,
                tgt,
            });
        }
        let first = pairs.first().ok_or(Error::EmptyCorpus)?;
        let (src_lang, tgt_lang) = (first.src.lang.clone(), first.tgt.lang.clone());
        ParallelCorpus::new(&src_lang, &tgt_lang, pairs)
    }
}

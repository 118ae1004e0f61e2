//! Multilingual thesaurus: the shared, language-independent descriptor space.
//!
//! Every descriptor has a numeric code and exactly one label per configured
//! language. Broader/narrower/related links are validated on load and kept
//! for callers, but the similarity layer only ever looks at codes.
//!
//! File format (UTF-8, line oriented):
//!
//! ```text
//! # comment
//! LANGS en es
//!
//! D 100 4 41
//! L en TRANSPORT OF DANGEROUS GOODS
//! L es TRANSPORTE DE MERCANCÍAS PELIGROSAS
//! BT 101
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{read_to_string, write_string, Error, Result};

/// Positive numeric identifier of a descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DescriptorCode(u32);

impl DescriptorCode {
    /// Returns `None` for zero.
    pub fn new(code: u32) -> Option<Self> {
        (code > 0).then_some(DescriptorCode(code))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for DescriptorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for DescriptorCode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let n: u32 = s
            .parse()
            .map_err(|_| format!("invalid descriptor code {s:?}"))?;
        DescriptorCode::new(n).ok_or_else(|| "descriptor code must be positive".to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Descriptor {
    pub code: DescriptorCode,
    pub field_id: u32,
    pub microthesaurus_id: u32,
    pub labels: BTreeMap<String, String>,
    pub broader: BTreeSet<DescriptorCode>,
    pub narrower: BTreeSet<DescriptorCode>,
    pub related: BTreeSet<DescriptorCode>,
}

impl Descriptor {
    pub fn new(code: DescriptorCode, field_id: u32, microthesaurus_id: u32) -> Self {
        Descriptor {
            code,
            field_id,
            microthesaurus_id,
            labels: BTreeMap::new(),
            broader: BTreeSet::new(),
            narrower: BTreeSet::new(),
            related: BTreeSet::new(),
        }
    }

    pub fn with_label(mut self, lang: &str, label: &str) -> Self {
        self.labels.insert(lang.to_string(), label.to_string());
        self
    }
}

/// A validated thesaurus. Immutable once constructed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thesaurus {
    languages: Vec<String>,
    descriptors: BTreeMap<DescriptorCode, Descriptor>,
}

impl Thesaurus {
    /// Builds and validates a thesaurus.
    pub fn new(languages: Vec<String>, descriptors: Vec<Descriptor>) -> Result<Self> {
        if languages.is_empty() {
            return Err(Error::Validation("no languages configured".into()));
        }
        let mut seen_langs = BTreeSet::new();
        for lang in &languages {
            if lang.is_empty() || lang.chars().any(char::is_whitespace) {
                return Err(Error::Validation(format!("invalid language code {lang:?}")));
            }
            if !seen_langs.insert(lang.as_str()) {
                return Err(Error::Validation(format!("duplicate language {lang}")));
            }
        }

        let mut map = BTreeMap::new();
        for d in descriptors {
            let code = d.code;
            if map.insert(code, d).is_some() {
                return Err(Error::Validation(format!(
                    "duplicate descriptor code {code}"
                )));
            }
        }

        let thesaurus = Thesaurus {
            languages,
            descriptors: map,
        };
        thesaurus.validate()?;
        Ok(thesaurus)
    }

    fn validate(&self) -> Result<()> {
        for (code, d) in &self.descriptors {
            for lang in &self.languages {
                match d.labels.get(lang) {
                    None => {
                        return Err(Error::Validation(format!(
                            "descriptor {code}: missing label for language {lang}"
                        )))
                    }
                    Some(label) if label.trim().is_empty() || label.contains('\n') => {
                        return Err(Error::Validation(format!(
                            "descriptor {code}: invalid label for language {lang}"
                        )))
                    }
                    Some(_) => {}
                }
            }
            if let Some(extra) = d.labels.keys().find(|l| !self.languages.contains(l)) {
                return Err(Error::Validation(format!(
                    "descriptor {code}: label for unconfigured language {extra}"
                )));
            }

            let relations = [
                ("broader", &d.broader),
                ("narrower", &d.narrower),
                ("related", &d.related),
            ];
            for (kind, targets) in relations {
                for target in targets {
                    if target == code {
                        return Err(Error::Validation(format!(
                            "descriptor {code} is its own {kind} term"
                        )));
                    }
                    let Some(other) = self.descriptors.get(target) else {
                        return Err(Error::Validation(format!(
                            "descriptor {code}: {kind} {code}->{target} does not exist"
                        )));
                    };
                    let inverse = match kind {
                        "broader" => &other.narrower,
                        "narrower" => &other.broader,
                        _ => &other.related,
                    };
                    if !inverse.contains(code) {
                        return Err(Error::Validation(format!(
                            "descriptor {code}: {kind} {code}->{target} has no inverse link"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn languages(&self) -> &[String] {
        &self.languages
    }

    pub fn has_language(&self, lang: &str) -> bool {
        self.languages.iter().any(|l| l == lang)
    }

    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }

    pub fn get(&self, code: DescriptorCode) -> Option<&Descriptor> {
        self.descriptors.get(&code)
    }

    pub fn contains(&self, code: DescriptorCode) -> bool {
        self.descriptors.contains_key(&code)
    }

    /// Descriptors in ascending code order.
    pub fn iter(&self) -> impl Iterator<Item = &Descriptor> {
        self.descriptors.values()
    }

    pub fn codes(&self) -> impl Iterator<Item = DescriptorCode> + '_ {
        self.descriptors.keys().copied()
    }

    pub fn label_of(&self, code: DescriptorCode, lang: &str) -> Result<&str> {
        if !self.has_language(lang) {
            return Err(Error::UnknownLanguage(lang.to_string()));
        }
        let d = self.get(code).ok_or(Error::UnknownCode(code))?;
        // Validation guarantees totality over configured languages.
        Ok(d.labels[lang].as_str())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&read_to_string(path.as_ref())?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_string(path.as_ref(), &self.to_text())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut languages: Option<Vec<String>> = None;
        let mut descriptors = Vec::new();
        let mut current: Option<Descriptor> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            let trimmed = line.trim_start();
            if trimmed.starts_with('#') {
                continue;
            }
            if trimmed.is_empty() {
                descriptors.extend(current.take());
                continue;
            }
            let (tag, rest) = trimmed
                .split_once(char::is_whitespace)
                .unwrap_or((trimmed, ""));
            let rest = rest.trim();
            match tag {
                "LANGS" => {
                    if languages.is_some() {
                        return Err(Error::parse(line_no, "duplicate LANGS header"));
                    }
                    let langs: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                    if langs.is_empty() {
                        return Err(Error::parse(line_no, "LANGS header lists no languages"));
                    }
                    languages = Some(langs);
                }
                "D" => {
                    if languages.is_none() {
                        return Err(Error::parse(
                            line_no,
                            "descriptor record before LANGS header",
                        ));
                    }
                    descriptors.extend(current.take());
                    let fields: Vec<&str> = rest.split_whitespace().collect();
                    let [code, field, micro] = fields[..] else {
                        return Err(Error::parse(
                            line_no,
                            "expected `D <code> <field_id> <microthesaurus_id>`",
                        ));
                    };
                    let code: DescriptorCode =
                        code.parse().map_err(|e: String| Error::parse(line_no, e))?;
                    let field = field.parse().map_err(|_| {
                        Error::parse(line_no, format!("invalid field id {field:?}"))
                    })?;
                    let micro = micro.parse().map_err(|_| {
                        Error::parse(line_no, format!("invalid microthesaurus id {micro:?}"))
                    })?;
                    current = Some(Descriptor::new(code, field, micro));
                }
                "L" => {
                    let d = current.as_mut().ok_or_else(|| {
                        Error::parse(line_no, "label outside a descriptor record")
                    })?;
                    let (lang, label) = rest
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| Error::parse(line_no, "expected `L <lang> <label>`"))?;
                    let label = label.trim();
                    if d.labels
                        .insert(lang.to_string(), label.to_string())
                        .is_some()
                    {
                        return Err(Error::Validation(format!(
                            "descriptor {}: duplicate label for language {lang}",
                            d.code
                        )));
                    }
                }
                "BT" | "NT" | "RT" => {
                    let d = current.as_mut().ok_or_else(|| {
                        Error::parse(line_no, format!("{tag} outside a descriptor record"))
                    })?;
                    let target: DescriptorCode =
                        rest.parse().map_err(|e: String| Error::parse(line_no, e))?;
                    let set = match tag {
                        "BT" => &mut d.broader,
                        "NT" => &mut d.narrower,
                        _ => &mut d.related,
                    };
                    set.insert(target);
                }
                other => {
                    return Err(Error::parse(
                        line_no,
                        format!("unknown record tag {other:?}"),
                    ))
                }
            }
        }
        descriptors.extend(current.take());

        let languages = languages.ok_or_else(|| Error::parse(1, "missing LANGS header"))?;
        Thesaurus::new(languages, descriptors)
    }

    /// Canonical serialization; `parse(to_text())` reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut out = format!("LANGS {}\n", self.languages.join(" "));
        for d in self.descriptors.values() {
            out.push('\n');
            out.push_str(&format!(
                "D {} {} {}\n",
                d.code, d.field_id, d.microthesaurus_id
            ));
            for lang in &self.languages {
                out.push_str(&format!("L {lang} {}\n", d.labels[lang]));
            }
            for (tag, set) in [("BT", &d.broader), ("NT", &d.narrower), ("RT", &d.related)] {
                for target in set {
                    out.push_str(&format!("{tag} {target}\n"));
                }
            }
        }
        out
    }
}

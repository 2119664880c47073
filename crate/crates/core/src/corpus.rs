//! Canonical record model and the line-delimited `.neg.jsonl` format.
//!
//! Each line holds one [`NegationRecord`]: one sentence paired with one
//! negation instance. A sentence with several cues appears once per cue.
//! A sentence without negation is kept as a single record whose
//! `cue_indices` is empty, so corpus-level totals survive the round trip.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::tokenize::tokenize_surfaces;

pub const CANONICAL_EXTENSION: &str = ".neg.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    De,
    Fr,
    It,
    En,
}

impl Lang {
    pub const ALL: [Lang; 4] = [Lang::De, Lang::Fr, Lang::It, Lang::En];

    pub fn code(self) -> &'static str {
        match self {
            Lang::De => "de",
            Lang::Fr => "fr",
            Lang::It => "it",
            Lang::En => "en",
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Lang {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "de" => Ok(Lang::De),
            "fr" => Ok(Lang::Fr),
            "it" => Ok(Lang::It),
            "en" => Ok(Lang::En),
            other => Err(Error::argument(format!(
                "unknown language `{other}` (expected de, fr, it or en)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
    Validation,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Test, Split::Validation];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
            Split::Validation => "validation",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            "validation" => Ok(Split::Validation),
            other => Err(Error::argument(format!(
                "unknown split `{other}` (expected train, test or validation)"
            ))),
        }
    }
}

/// One sentence paired with at most one negation instance.
///
/// Field order is the serialization order of the canonical format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NegationRecord {
    pub doc_id: String,
    pub sent_id: String,
    pub lang: Lang,
    pub source: String,
    pub tokens: Vec<String>,
    pub cue_indices: Vec<usize>,
    pub scope_indices: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pred_scope_indices: Option<Vec<usize>>,
}

/// Join key of a record: `(doc_id, sent_id, cue_indices)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RecordKey {
    pub doc_id: String,
    pub sent_id: String,
    pub cue_indices: Vec<usize>,
}

impl fmt::Display for RecordKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{:?}", self.doc_id, self.sent_id, self.cue_indices)
    }
}

impl NegationRecord {
    /// A record for a sentence that carries no negation instance.
    pub fn sentence(
        doc_id: impl Into<String>,
        sent_id: impl Into<String>,
        lang: Lang,
        source: impl Into<String>,
        tokens: Vec<String>,
    ) -> Self {
        NegationRecord {
            doc_id: doc_id.into(),
            sent_id: sent_id.into(),
            lang,
            source: source.into(),
            tokens,
            cue_indices: Vec::new(),
            scope_indices: Vec::new(),
            split: None,
            pred_scope_indices: None,
        }
    }

    pub fn is_negation(&self) -> bool {
        !self.cue_indices.is_empty()
    }

    pub fn key(&self) -> RecordKey {
        RecordKey {
            doc_id: self.doc_id.clone(),
            sent_id: self.sent_id.clone(),
            cue_indices: self.cue_indices.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::validation(self.key().to_string(), msg));
        if self.doc_id.is_empty() {
            return fail("empty doc_id".into());
        }
        if self.sent_id.is_empty() {
            return fail("empty sent_id".into());
        }
        if let Some(i) = self.tokens.iter().position(String::is_empty) {
            return fail(format!("token {i} is empty"));
        }
        let n = self.tokens.len();
        check_index_set("cue_indices", &self.cue_indices, n).or_else(fail)?;
        check_index_set("scope_indices", &self.scope_indices, n).or_else(fail)?;
        if let Some(pred) = &self.pred_scope_indices {
            check_index_set("pred_scope_indices", pred, n).or_else(fail)?;
        }
        if !self.is_negation() {
            if !self.scope_indices.is_empty() {
                return fail("scope_indices without cue_indices".into());
            }
            if self
                .pred_scope_indices
                .as_ref()
                .is_some_and(|p| !p.is_empty())
            {
                return fail("pred_scope_indices without cue_indices".into());
            }
            return Ok(());
        }
        if intersects(&self.cue_indices, &self.scope_indices) {
            return fail("cue/scope overlap".into());
        }
        if let Some(pred) = &self.pred_scope_indices {
            if intersects(&self.cue_indices, pred) {
                return fail("cue/predicted scope overlap".into());
            }
        }
        Ok(())
    }
}

fn check_index_set(field: &str, indices: &[usize], len: usize) -> std::result::Result<(), String> {
    if let Some(&bad) = indices.iter().find(|&&i| i >= len) {
        return Err(format!(
            "{field}: index {bad} out of range for {len} tokens"
        ));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("{field}: indices must be strictly increasing"));
    }
    Ok(())
}

/// Both slices sorted ascending.
pub(crate) fn intersects(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => return true,
        }
    }
    false
}

/// Compare identifiers so that embedded numbers sort numerically
/// (`s2` < `s10`). Falls back to byte order to stay total.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn runs(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let mut prev_digit = None;
        for (i, c) in s.char_indices() {
            let d = c.is_ascii_digit();
            if prev_digit.is_some_and(|p| p != d) {
                out.push((prev_digit.unwrap(), &s[start..i]));
                start = i;
            }
            prev_digit = Some(d);
        }
        if let Some(d) = prev_digit {
            out.push((d, &s[start..]));
        }
        out
    }

    let (ra, rb) = (runs(a), runs(b));
    for (x, y) in ra.iter().zip(rb.iter()) {
        let ord = match (x, y) {
            ((true, dx), (true, dy)) => {
                let tx = dx.trim_start_matches('0');
                let ty = dy.trim_start_matches('0');
                tx.len().cmp(&ty.len()).then_with(|| tx.cmp(ty))
            }
            ((_, sx), (_, sy)) => sx.cmp(sy),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    ra.len().cmp(&rb.len()).then_with(|| a.cmp(b))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub sent_ids: Vec<String>,
}

/// A view of one distinct sentence and all of its records.
#[derive(Debug, Clone, Copy)]
pub struct Sentence<'a> {
    pub doc_id: &'a str,
    pub sent_id: &'a str,
    pub lang: Lang,
    pub source: &'a str,
    pub tokens: &'a [String],
    pub records: &'a [NegationRecord],
}

impl Sentence<'_> {
    pub fn is_negated(&self) -> bool {
        self.records.iter().any(NegationRecord::is_negation)
    }
}

/// A validated, canonically ordered set of records.
///
/// Records are ordered by document, then sentence (both in
/// [`natural_cmp`] order), then `cue_indices` lexicographically. Two
/// corpora built from the same records in any order compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    records: Vec<NegationRecord>,
    documents: Vec<Document>,
}

fn record_order(a: &NegationRecord, b: &NegationRecord) -> Ordering {
    natural_cmp(&a.doc_id, &b.doc_id)
        .then_with(|| natural_cmp(&a.sent_id, &b.sent_id))
        .then_with(|| a.cue_indices.cmp(&b.cue_indices))
}

fn same_sentence(a: &NegationRecord, b: &NegationRecord) -> bool {
    a.doc_id == b.doc_id && a.sent_id == b.sent_id
}

impl Corpus {
    pub fn new(mut records: Vec<NegationRecord>) -> Result<Self> {
        for r in &records {
            r.validate()?;
        }
        records.sort_by(record_order);

        let mut documents: Vec<Document> = Vec::new();
        for group in records.chunk_by(same_sentence) {
            let first = &group[0];
            let key = first.key().to_string();
            for pair in group.windows(2) {
                if pair[0].cue_indices == pair[1].cue_indices {
                    return Err(Error::validation(
                        key,
                        "duplicate (doc_id, sent_id, cue_indices)",
                    ));
                }
            }
            for r in &group[1..] {
                if r.tokens != first.tokens {
                    return Err(Error::consistency(
                        r.key().to_string(),
                        "token sequence differs from other records of the same sentence",
                    ));
                }
                if r.lang != first.lang || r.source != first.source {
                    return Err(Error::consistency(
                        r.key().to_string(),
                        "lang/source differs from other records of the same sentence",
                    ));
                }
            }
            if group.len() > 1 && !first.is_negation() {
                return Err(Error::validation(
                    key,
                    "sentence has both a negation-free record and negation records",
                ));
            }
            match documents.last_mut() {
                Some(doc) if doc.doc_id == first.doc_id => doc.sent_ids.push(first.sent_id.clone()),
                _ => documents.push(Document {
                    doc_id: first.doc_id.clone(),
                    sent_ids: vec![first.sent_id.clone()],
                }),
            }
        }
        Ok(Corpus { records, documents })
    }

    pub fn empty() -> Self {
        Corpus::default()
    }

    pub fn records(&self) -> &[NegationRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<NegationRecord> {
        self.records
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn sentences(&self) -> impl Iterator<Item = Sentence<'_>> {
        self.records.chunk_by(same_sentence).map(|group| {
            let r = &group[0];
            Sentence {
                doc_id: &r.doc_id,
                sent_id: &r.sent_id,
                lang: r.lang,
                source: &r.source,
                tokens: &r.tokens,
                records: group,
            }
        })
    }

    /// Sentences of one document, in corpus order.
    pub fn document_sentences<'a>(
        &'a self,
        doc_id: &'a str,
    ) -> impl Iterator<Item = Sentence<'a>> + 'a {
        self.sentences().filter(move |s| s.doc_id == doc_id)
    }

    pub fn languages(&self) -> BTreeSet<Lang> {
        self.records.iter().map(|r| r.lang).collect()
    }

    /// Keep only the listed documents.
    pub fn retain_documents<S: AsRef<str>>(self, keep: &[S]) -> Self {
        let keep: BTreeSet<&str> = keep.iter().map(AsRef::as_ref).collect();
        let records = self
            .records
            .into_iter()
            .filter(|r| keep.contains(r.doc_id.as_str()))
            .collect();
        Corpus::new(records).expect("subset of a valid corpus is valid")
    }

    /// Apply `f` to every record and revalidate.
    pub fn try_map_records<F>(self, mut f: F) -> Result<Self>
    where
        F: FnMut(NegationRecord) -> Result<NegationRecord>,
    {
        let records = self
            .records
            .into_iter()
            .map(&mut f)
            .collect::<Result<Vec<_>>>()?;
        Corpus::new(records)
    }
}

/// Read a `.neg.jsonl` stream. Blank lines are skipped.
pub fn read_canonical<R: BufRead>(reader: R) -> Result<Corpus> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim_end_matches('\r');
        if text.trim().is_empty() {
            continue;
        }
        records.push(parse_line(text, i + 1)?);
    }
    Corpus::new(records)
}

pub fn read_canonical_str(text: &str) -> Result<Corpus> {
    read_canonical(text.as_bytes())
}

/// Read raw sentences as `doc_id<TAB>sent_id<TAB>text` lines and tokenize
/// them into negation-free records.
pub fn read_sentence_table<R: BufRead>(reader: R, lang: Lang, source: &str) -> Result<Corpus> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim_end_matches('\r');
        if text.trim().is_empty() {
            continue;
        }
        let mut cols = text.splitn(3, '\t');
        let (Some(doc_id), Some(sent_id), Some(sentence)) = (cols.next(), cols.next(), cols.next())
        else {
            return Err(Error::format(
                i + 1,
                "columns",
                "expected doc_id, sent_id and sentence text",
            ));
        };
        let tokens = tokenize_surfaces(sentence);
        if tokens.is_empty() {
            return Err(Error::format(i + 1, "sentence", "no tokens"));
        }
        records.push(NegationRecord::sentence(
            doc_id, sent_id, lang, source, tokens,
        ));
    }
    Corpus::new(records)
}

const FIELDS: [&str; 9] = [
    "doc_id",
    "sent_id",
    "lang",
    "source",
    "tokens",
    "cue_indices",
    "scope_indices",
    "split",
    "pred_scope_indices",
];

fn parse_line(text: &str, line: usize) -> Result<NegationRecord> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::format(line, "(record)", format!("invalid JSON: {e}")))?;
    let Value::Object(mut obj) = value else {
        return Err(Error::format(line, "(record)", "expected a JSON object"));
    };
    if let Some(unknown) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
        return Err(Error::format(line, unknown.clone(), "unknown field"));
    }

    let doc_id = take_string(&mut obj, "doc_id", line)?;
    let sent_id = take_string(&mut obj, "sent_id", line)?;
    let lang = take_string(&mut obj, "lang", line)?
        .parse()
        .map_err(|e: Error| Error::format(line, "lang", e.to_string()))?;
    let source = take_string(&mut obj, "source", line)?;
    let tokens = match take(&mut obj, "tokens", line)? {
        Value::Array(items) => items
            .into_iter()
            .map(|v| match v {
                Value::String(s) => Ok(s),
                _ => Err(Error::format(
                    line,
                    "tokens",
                    "expected an array of strings",
                )),
            })
            .collect::<Result<Vec<_>>>()?,
        _ => {
            return Err(Error::format(
                line,
                "tokens",
                "expected an array of strings",
            ))
        }
    };
    let cue_indices = indices(take(&mut obj, "cue_indices", line)?, "cue_indices", line)?;
    let scope_indices = indices(
        take(&mut obj, "scope_indices", line)?,
        "scope_indices",
        line,
    )?;
    let split = match obj.remove("split") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(
            s.parse()
                .map_err(|e: Error| Error::format(line, "split", e.to_string()))?,
        ),
        Some(_) => return Err(Error::format(line, "split", "expected a string")),
    };
    let pred_scope_indices = match obj.remove("pred_scope_indices") {
        None | Some(Value::Null) => None,
        Some(v) => Some(indices(v, "pred_scope_indices", line)?),
    };

    Ok(NegationRecord {
        doc_id,
        sent_id,
        lang,
        source,
        tokens,
        cue_indices,
        scope_indices,
        split,
        pred_scope_indices,
    })
}

fn take(obj: &mut Map<String, Value>, field: &str, line: usize) -> Result<Value> {
    obj.remove(field)
        .ok_or_else(|| Error::format(line, field, "missing"))
}

fn take_string(obj: &mut Map<String, Value>, field: &str, line: usize) -> Result<String> {
    match take(obj, field, line)? {
        Value::String(s) => Ok(s),
        _ => Err(Error::format(line, field, "expected a string")),
    }
}

fn indices(value: Value, field: &str, line: usize) -> Result<Vec<usize>> {
    let Value::Array(items) = value else {
        return Err(Error::format(line, field, "expected an array of integers"));
    };
    items
        .into_iter()
        .map(|v| {
            v.as_u64()
                .and_then(|n| usize::try_from(n).ok())
                .ok_or_else(|| Error::format(line, field, "expected non-negative integers"))
        })
        .collect()
}

pub fn write_canonical<W: Write>(corpus: &Corpus, mut out: W) -> Result<()> {
    for record in corpus.records() {
        serde_json::to_writer(&mut out, record).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_canonical_string(corpus: &Corpus) -> String {
    let mut buf = Vec::new();
    write_canonical(corpus, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

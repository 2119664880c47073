//! Token-level scope evaluation.
//!
//! Predictions are joined to gold instances on `(doc_id, sent_id,
//! cue_indices)`. Per-instance confusions over scope-token sets are summed
//! before precision, recall and F1 are computed (micro averaging). Runs
//! with different seeds are summarized as mean and sample standard
//! deviation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::corpus::{Corpus, Lang, NegationRecord, RecordKey};
use crate::error::{Error, Result};
use crate::report::{
    self, fmt2, hundredths_to_f64, percent_hundredths, ratio_hundredths, OutputFormat,
};

/// Token counts. Additive over instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl std::ops::Add for Confusion {
    type Output = Confusion;

    fn add(self, o: Confusion) -> Confusion {
        Confusion {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
        }
    }
}

impl std::ops::AddAssign for Confusion {
    fn add_assign(&mut self, o: Confusion) {
        *self = *self + o;
    }
}

impl std::iter::Sum for Confusion {
    fn sum<I: Iterator<Item = Confusion>>(iter: I) -> Confusion {
        iter.fold(Confusion::default(), |a, b| a + b)
    }
}

impl Confusion {
    /// Zero denominators give 0, except that an all-zero confusion is a
    /// perfect score.
    pub fn precision(&self) -> f64 {
        match self.tp + self.fp {
            0 if self.fn_ == 0 => 1.0,
            0 => 0.0,
            d => self.tp as f64 / d as f64,
        }
    }

    pub fn recall(&self) -> f64 {
        match self.tp + self.fn_ {
            0 if self.fp == 0 => 1.0,
            0 => 0.0,
            d => self.tp as f64 / d as f64,
        }
    }

    pub fn f1(&self) -> f64 {
        f1_from(self.precision(), self.recall())
    }
}

pub fn f1_from(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

/// Confusion of two sorted index sets.
pub fn confusion(gold: &[usize], pred: &[usize]) -> Confusion {
    let (mut i, mut j) = (0, 0);
    let mut c = Confusion::default();
    while i < gold.len() && j < pred.len() {
        match gold[i].cmp(&pred[j]) {
            std::cmp::Ordering::Equal => {
                c.tp += 1;
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => {
                c.fn_ += 1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                c.fp += 1;
                j += 1;
            }
        }
    }
    c.fn_ += (gold.len() - i) as u64;
    c.fp += (pred.len() - j) as u64;
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalMode {
    /// Every gold instance must have a prediction.
    #[default]
    Strict,
    /// Missing predictions count as empty scopes.
    Lenient,
}

impl FromStr for EvalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(EvalMode::Strict),
            "lenient" => Ok(EvalMode::Lenient),
            other => Err(Error::argument(format!(
                "unknown mode `{other}` (expected strict or lenient)"
            ))),
        }
    }
}

/// A dataset is one `(source, lang)` pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DatasetKey {
    pub source: String,
    pub lang: Lang,
}

impl DatasetKey {
    pub fn of(r: &NegationRecord) -> Self {
        DatasetKey {
            source: r.source.clone(),
            lang: r.lang,
        }
    }
}

impl fmt::Display for DatasetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.source, self.lang)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub confusion: Confusion,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub instance_count: usize,
}

impl Scores {
    pub fn from_confusion(confusion: Confusion, instance_count: usize) -> Self {
        Scores {
            confusion,
            precision: confusion.precision(),
            recall: confusion.recall(),
            f1: confusion.f1(),
            instance_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub datasets: Vec<(DatasetKey, Scores)>,
    pub overall: Scores,
}

/// A gold instance and its predicted scope (`None` when missing in
/// lenient mode).
struct Joined<'a> {
    gold: &'a NegationRecord,
    pred: Option<&'a [usize]>,
}

fn join<'a>(gold: &'a Corpus, pred: &'a Corpus, mode: EvalMode) -> Result<Vec<Joined<'a>>> {
    let gold_index: BTreeMap<RecordKey, &NegationRecord> = gold
        .records()
        .iter()
        .filter(|r| r.is_negation())
        .map(|r| (r.key(), r))
        .collect();

    let mut predictions: BTreeMap<RecordKey, &[usize]> = BTreeMap::new();
    for p in pred.records().iter().filter(|r| r.is_negation()) {
        let key = p.key();
        let Some(g) = gold_index.get(&key) else {
            return Err(Error::consistency(
                key.to_string(),
                "prediction has no gold instance",
            ));
        };
        if g.tokens != p.tokens {
            return Err(Error::consistency(
                key.to_string(),
                "prediction tokens differ from gold tokens",
            ));
        }
        let Some(scope) = p.pred_scope_indices.as_deref() else {
            return Err(Error::validation(
                key.to_string(),
                "prediction record lacks pred_scope_indices",
            ));
        };
        predictions.insert(key, scope);
    }

    gold.records()
        .iter()
        .filter(|r| r.is_negation())
        .map(|g| {
            let key = g.key();
            match (predictions.get(&key), mode) {
                (Some(p), _) => Ok(Joined {
                    gold: g,
                    pred: Some(*p),
                }),
                (None, EvalMode::Lenient) => Ok(Joined {
                    gold: g,
                    pred: None,
                }),
                (None, EvalMode::Strict) => Err(Error::consistency(
                    key.to_string(),
                    "gold instance has no prediction (strict mode)",
                )),
            }
        })
        .collect()
}

/// Micro-averaged token-level scores, per dataset and overall.
pub fn evaluate_run(gold: &Corpus, pred: &Corpus, mode: EvalMode) -> Result<EvalReport> {
    let joined = join(gold, pred, mode)?;
    let mut per: BTreeMap<DatasetKey, (Confusion, usize)> = BTreeMap::new();
    for j in &joined {
        let c = confusion(&j.gold.scope_indices, j.pred.unwrap_or(&[]));
        let e = per.entry(DatasetKey::of(j.gold)).or_default();
        e.0 += c;
        e.1 += 1;
    }
    let overall_c: Confusion = per.values().map(|e| e.0).sum();
    let overall = Scores::from_confusion(overall_c, joined.len());
    let datasets = per
        .into_iter()
        .map(|(k, (c, n))| (k, Scores::from_confusion(c, n)))
        .collect();
    Ok(EvalReport { datasets, overall })
}

fn pct(x: f64) -> String {
    fmt2(100.0 * x)
}

pub fn render_eval(report: &EvalReport, format: OutputFormat) -> String {
    let header = [
        "dataset",
        "instances",
        "tp",
        "fp",
        "fn",
        "precision",
        "recall",
        "f1",
    ];
    let row = |label: String, s: &Scores| {
        vec![
            label,
            s.instance_count.to_string(),
            s.confusion.tp.to_string(),
            s.confusion.fp.to_string(),
            s.confusion.fn_.to_string(),
            pct(s.precision),
            pct(s.recall),
            pct(s.f1),
        ]
    };
    let mut rows: Vec<Vec<String>> = report
        .datasets
        .iter()
        .map(|(k, s)| row(k.to_string(), s))
        .collect();
    rows.push(row("all".to_string(), &report.overall));
    report::render(format, &header, &rows)
}

/// Mean and sample standard deviation of per-run F1 values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunAggregate {
    pub mean_f1: f64,
    pub std_f1: f64,
    pub run_count: usize,
}

impl RunAggregate {
    /// Percent with two decimals, e.g. `85.00±7.07`.
    pub fn display(&self) -> String {
        format!("{}±{}", pct(self.mean_f1), pct(self.std_f1))
    }
}

pub fn aggregate_runs(f1_values: &[f64]) -> Result<RunAggregate> {
    let n = f1_values.len();
    if n < 2 {
        return Err(Error::argument(format!(
            "need at least 2 runs for a standard deviation, got {n}"
        )));
    }
    if let Some(bad) = f1_values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::argument(format!("F1 value {bad} outside [0, 1]")));
    }
    // Shift by the first value so identical runs give exactly zero spread.
    let shift = f1_values[0];
    let mean_dev = f1_values.iter().map(|v| v - shift).sum::<f64>() / n as f64;
    let sq: f64 = f1_values
        .iter()
        .map(|v| {
            let d = v - shift - mean_dev;
            d * d
        })
        .sum();
    Ok(RunAggregate {
        mean_f1: shift + mean_dev,
        std_f1: (sq / (n - 1) as f64).sqrt(),
        run_count: n,
    })
}

/// Aggregate several runs against the same gold data, per dataset and
/// overall. Label `all` is the overall row.
pub fn aggregate_reports(reports: &[EvalReport]) -> Result<Vec<(String, RunAggregate)>> {
    let mut by_label: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in reports {
        for (k, s) in &r.datasets {
            by_label.entry(k.to_string()).or_default().push(s.f1);
        }
    }
    let mut out = Vec::new();
    for (label, values) in by_label {
        if values.len() != reports.len() {
            return Err(Error::argument(format!(
                "dataset {label} missing from some runs"
            )));
        }
        out.push((label, aggregate_runs(&values)?));
    }
    let overall: Vec<f64> = reports.iter().map(|r| r.overall.f1).collect();
    out.push(("all".to_string(), aggregate_runs(&overall)?));
    Ok(out)
}

pub fn render_aggregates(rows: &[(String, RunAggregate)], format: OutputFormat) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|(label, a)| match format {
            OutputFormat::Tsv => vec![
                label.clone(),
                a.run_count.to_string(),
                pct(a.mean_f1),
                pct(a.std_f1),
            ],
            OutputFormat::Table => vec![label.clone(), a.run_count.to_string(), a.display()],
        })
        .collect();
    match format {
        OutputFormat::Tsv => {
            report::render(format, &["dataset", "runs", "mean_f1", "std_f1"], &body)
        }
        OutputFormat::Table => report::render(format, &["dataset", "runs", "f1"], &body),
    }
}

/// How the share of scope tokens is averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScopeRatio {
    /// Scope tokens over all tokens, pooled across instances.
    #[default]
    Pooled,
    /// Mean of the per-instance ratios.
    PerInstance,
}

impl FromStr for ScopeRatio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pooled" => Ok(ScopeRatio::Pooled),
            "per-instance" => Ok(ScopeRatio::PerInstance),
            other => Err(Error::argument(format!(
                "unknown scope ratio `{other}` (expected pooled or per-instance)"
            ))),
        }
    }
}

/// Pairs of (scope size, sentence length), one per instance.
fn scope_fraction(pairs: &[(usize, usize)], mode: ScopeRatio) -> f64 {
    match mode {
        ScopeRatio::Pooled => {
            let scope: usize = pairs.iter().map(|p| p.0).sum();
            let total: usize = pairs.iter().map(|p| p.1).sum();
            if total == 0 {
                0.0
            } else {
                scope as f64 / total as f64
            }
        }
        ScopeRatio::PerInstance => {
            let ratios: Vec<f64> = pairs
                .iter()
                .filter(|p| p.1 > 0)
                .map(|p| p.0 as f64 / p.1 as f64)
                .collect();
            if ratios.is_empty() {
                0.0
            } else {
                ratios.iter().sum::<f64>() / ratios.len() as f64
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    /// `None` for the whole-corpus row.
    pub dataset: Option<DatasetKey>,
    pub total_sentences: usize,
    pub negated_sentences: usize,
    /// Rounded half up to two decimals.
    pub pct_negated: f64,
    pub total_tokens: usize,
    /// Rounded half up to two decimals.
    pub mean_tokens_per_sentence: f64,
    pub negation_instances: usize,
    pub scope_tokens: usize,
    pub instance_tokens: usize,
    /// Rounded half up to two decimals.
    pub pct_scope_tokens: f64,
}

#[derive(Default)]
struct StatsAcc {
    sentences: usize,
    negated: usize,
    tokens: usize,
    instances: Vec<(usize, usize)>,
}

impl StatsAcc {
    fn finish(self, dataset: Option<DatasetKey>, mode: ScopeRatio) -> CorpusStats {
        let scope_tokens: usize = self.instances.iter().map(|p| p.0).sum();
        let instance_tokens: usize = self.instances.iter().map(|p| p.1).sum();
        let pct_scope_tokens = match mode {
            ScopeRatio::Pooled => hundredths_to_f64(percent_hundredths(
                scope_tokens as u64,
                instance_tokens as u64,
            )),
            ScopeRatio::PerInstance => {
                report::round2(100.0 * scope_fraction(&self.instances, mode))
            }
        };
        CorpusStats {
            dataset,
            total_sentences: self.sentences,
            negated_sentences: self.negated,
            pct_negated: hundredths_to_f64(percent_hundredths(
                self.negated as u64,
                self.sentences as u64,
            )),
            total_tokens: self.tokens,
            mean_tokens_per_sentence: hundredths_to_f64(ratio_hundredths(
                self.tokens as u64,
                self.sentences as u64,
            )),
            negation_instances: self.instances.len(),
            scope_tokens,
            instance_tokens,
            pct_scope_tokens,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsReport {
    pub datasets: Vec<CorpusStats>,
    pub total: CorpusStats,
}

/// Sentence, negation and scope statistics per `(source, lang)`.
///
/// A sentence is negated when it has at least one record with cues.
/// Sentence lengths count each distinct sentence once; scope shares count
/// every negation instance, so duplicated sentences contribute once per cue.
pub fn corpus_stats(corpus: &Corpus, mode: ScopeRatio) -> StatsReport {
    let mut per: BTreeMap<DatasetKey, StatsAcc> = BTreeMap::new();
    let mut total = StatsAcc::default();
    for s in corpus.sentences() {
        let key = DatasetKey {
            source: s.source.to_string(),
            lang: s.lang,
        };
        let acc = per.entry(key).or_default();
        for acc in [acc, &mut total] {
            acc.sentences += 1;
            acc.tokens += s.tokens.len();
            if s.is_negated() {
                acc.negated += 1;
            }
            acc.instances.extend(
                s.records
                    .iter()
                    .filter(|r| r.is_negation())
                    .map(|r| (r.scope_indices.len(), r.tokens.len())),
            );
        }
    }
    StatsReport {
        datasets: per
            .into_iter()
            .map(|(k, a)| a.finish(Some(k), mode))
            .collect(),
        total: total.finish(None, mode),
    }
}

pub fn render_stats(report: &StatsReport, format: OutputFormat) -> String {
    let header = [
        "dataset",
        "total",
        "negated",
        "pct_negated",
        "mean_tokens",
        "instances",
        "pct_scope",
    ];
    let row = |s: &CorpusStats| {
        vec![
            s.dataset
                .as_ref()
                .map_or("all".to_string(), |k| k.to_string()),
            s.total_sentences.to_string(),
            s.negated_sentences.to_string(),
            fmt2(s.pct_negated),
            fmt2(s.mean_tokens_per_sentence),
            s.negation_instances.to_string(),
            fmt2(s.pct_scope_tokens),
        ]
    };
    let mut rows: Vec<Vec<String>> = report.datasets.iter().map(row).collect();
    rows.push(row(&report.total));
    report::render(format, &header, &rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScopeLengthReport {
    /// Gold scope share of tokens, in `[0, 1]`.
    pub actual_ratio: f64,
    /// Predicted scope share of tokens, in `[0, 1]`.
    pub predicted_ratio: f64,
    pub instance_count: usize,
}

/// Compare gold and predicted scope lengths over strictly joined instances.
pub fn scope_length_report(
    gold: &Corpus,
    pred: &Corpus,
    mode: ScopeRatio,
) -> Result<ScopeLengthReport> {
    let joined = join(gold, pred, EvalMode::Strict)?;
    let actual: Vec<(usize, usize)> = joined
        .iter()
        .map(|j| (j.gold.scope_indices.len(), j.gold.tokens.len()))
        .collect();
    let predicted: Vec<(usize, usize)> = joined
        .iter()
        .map(|j| (j.pred.map_or(0, <[usize]>::len), j.gold.tokens.len()))
        .collect();
    Ok(ScopeLengthReport {
        actual_ratio: scope_fraction(&actual, mode),
        predicted_ratio: scope_fraction(&predicted, mode),
        instance_count: joined.len(),
    })
}

pub fn render_scope_length(r: &ScopeLengthReport, format: OutputFormat) -> String {
    report::render(
        format,
        &["instances", "actual_pct", "predicted_pct"],
        &[vec![
            r.instance_count.to_string(),
            pct(r.actual_ratio),
            pct(r.predicted_ratio),
        ]],
    )
}

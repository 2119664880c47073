//! Parser-free scope baseline driven by the annotation guidelines.
//!
//! The scope of a cue is its clause window: everything between the nearest
//! hard boundaries (`; : . ! ?`) on either side, with commas treated as
//! soft so that subordinate clauses stay inside. From that window the
//! resolver removes parenthesized citations, the cue itself, leading
//! conjunctions and edge punctuation.
//!
//! Scopes interrupted by a contrasting phrase are out of reach: the
//! window is contiguous apart from parentheticals and cue tokens.

use std::collections::HashSet;
use std::io::BufRead;
use std::ops::RangeInclusive;

use crate::corpus::{Corpus, Lang};
use crate::error::{Error, Result};
use crate::lexicon::fold;

const BOUNDARIES: &str = include_str!("../data/resolver/boundaries.txt");
const CONJ_DE: &str = include_str!("../data/resolver/conjunctions-de.txt");
const CONJ_FR: &str = include_str!("../data/resolver/conjunctions-fr.txt");
const CONJ_IT: &str = include_str!("../data/resolver/conjunctions-it.txt");
const CONJ_EN: &str = include_str!("../data/resolver/conjunctions-en.txt");

/// Boundary tokens and window-initial conjunctions for one language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolverConfig {
    hard_boundaries: HashSet<String>,
    conjunctions: HashSet<String>,
}

/// Read a one-token-per-line list in lexicon file syntax.
fn read_word_list<R: BufRead>(reader: R) -> Result<HashSet<String>> {
    let mut words = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim_end_matches('\r');
        if text.trim().is_empty() || text.starts_with('#') {
            continue;
        }
        if text.contains(char::is_whitespace) {
            return Err(Error::format(i + 1, "token", "one token per line expected"));
        }
        words.insert(text.to_string());
    }
    Ok(words)
}

impl ResolverConfig {
    pub fn builtin(lang: Lang) -> Self {
        let conj = match lang {
            Lang::De => CONJ_DE,
            Lang::Fr => CONJ_FR,
            Lang::It => CONJ_IT,
            Lang::En => CONJ_EN,
        };
        ResolverConfig::from_lists(BOUNDARIES.as_bytes(), conj.as_bytes())
            .expect("builtin resolver lists parse")
    }

    pub fn from_lists<B: BufRead, C: BufRead>(boundaries: B, conjunctions: C) -> Result<Self> {
        Ok(ResolverConfig {
            hard_boundaries: read_word_list(boundaries)?,
            conjunctions: read_word_list(conjunctions)?
                .iter()
                .map(|w| fold(w))
                .collect(),
        })
    }

    pub fn is_hard_boundary(&self, token: &str) -> bool {
        self.hard_boundaries.contains(token)
    }

    pub fn is_conjunction(&self, token: &str) -> bool {
        self.conjunctions.contains(&fold(token))
    }
}

/// A token made only of punctuation marks.
pub fn is_punctuation(token: &str) -> bool {
    !token.is_empty()
        && token
            .chars()
            .all(|c| c.is_ascii_punctuation() || "«»„“”‘’‹›–—…¿¡".contains(c))
}

/// Balanced `(` … `)` ranges, parentheses included. Nested groups merge
/// into the outermost range; an unclosed `(` runs to the last token; a
/// stray `)` is ignored.
pub fn find_parentheticals<S: AsRef<str>>(tokens: &[S]) -> Vec<RangeInclusive<usize>> {
    let mut ranges = Vec::new();
    let mut depth = 0usize;
    let mut open = 0;
    for (i, t) in tokens.iter().enumerate() {
        match t.as_ref() {
            "(" => {
                if depth == 0 {
                    open = i;
                }
                depth += 1;
            }
            ")" if depth > 0 => {
                depth -= 1;
                if depth == 0 {
                    ranges.push(open..=i);
                }
            }
            _ => {}
        }
    }
    if depth > 0 {
        ranges.push(open..=tokens.len() - 1);
    }
    ranges
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseWindow {
    pub left: usize,
    /// Inclusive.
    pub right: usize,
    /// Parentheticals inside the window that do not hold the cue.
    pub excluded_spans: Vec<RangeInclusive<usize>>,
}

impl ClauseWindow {
    pub fn contains(&self, i: usize) -> bool {
        (self.left..=self.right).contains(&i)
    }

    pub fn is_excluded(&self, i: usize) -> bool {
        self.excluded_spans.iter().any(|r| r.contains(&i))
    }
}

fn check_cues(len: usize, cues: &[usize]) -> Result<()> {
    if cues.is_empty() {
        return Err(Error::argument("no cue indices"));
    }
    if let Some(&bad) = cues.iter().find(|&&c| c >= len) {
        return Err(Error::argument(format!(
            "cue index {bad} out of range for {len} tokens"
        )));
    }
    if cues.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::argument("cue indices must be strictly increasing"));
    }
    Ok(())
}

/// The hard-boundary window around the cue. Boundaries inside
/// parentheticals do not count. A cue that sits inside a parenthetical
/// gets a window clipped to that parenthetical's interior.
pub fn clause_window<S: AsRef<str>>(
    tokens: &[S],
    cues: &[usize],
    config: &ResolverConfig,
) -> Result<ClauseWindow> {
    check_cues(tokens.len(), cues)?;
    let (first, last) = (cues[0], cues[cues.len() - 1]);
    let parens = find_parentheticals(tokens);
    let host = parens.iter().find(|r| r.contains(&first)).cloned();

    let (lo, hi) = match &host {
        Some(r) => {
            let lo = (*r.start() + 1).min(first);
            let hi = if tokens[*r.end()].as_ref() == ")" {
                *r.end() - 1
            } else {
                *r.end()
            };
            (lo, hi.max(last))
        }
        None => (0, tokens.len() - 1),
    };
    let inner: Vec<&RangeInclusive<usize>> = parens
        .iter()
        .filter(|r| Some(*r) != host.as_ref())
        .collect();
    let is_boundary = |j: usize| {
        config.is_hard_boundary(tokens[j].as_ref()) && !inner.iter().any(|r| r.contains(&j))
    };

    let left = (lo..first)
        .rev()
        .find(|&j| is_boundary(j))
        .map_or(lo, |j| j + 1);
    let right = (last + 1..=hi)
        .find(|&j| is_boundary(j))
        .map_or(hi, |j| j - 1);
    let excluded_spans = inner
        .into_iter()
        .filter(|r| *r.start() <= right && *r.end() >= left)
        .map(|r| (*r.start()).max(left)..=(*r.end()).min(right))
        .collect();
    Ok(ClauseWindow {
        left,
        right,
        excluded_spans,
    })
}

pub fn resolve_scope<S: AsRef<str>>(
    tokens: &[S],
    cues: &[usize],
    lang: Lang,
) -> Result<Vec<usize>> {
    resolve_scope_with(tokens, cues, &ResolverConfig::builtin(lang))
}

pub fn resolve_scope_with<S: AsRef<str>>(
    tokens: &[S],
    cues: &[usize],
    config: &ResolverConfig,
) -> Result<Vec<usize>> {
    let window = clause_window(tokens, cues, config)?;
    let tok = |i: usize| tokens[i].as_ref();

    let mut scope: Vec<usize> = (window.left..=window.right)
        .filter(|&i| !window.is_excluded(i) && cues.binary_search(&i).is_err())
        .collect();

    let first_cue = cues[0];
    let mut start = 0;
    while start < scope.len() {
        let i = scope[start];
        let leading_conj = i < first_cue && config.is_conjunction(tok(i));
        if is_punctuation(tok(i)) || leading_conj {
            start += 1;
        } else {
            break;
        }
    }
    let mut end = scope.len();
    while end > start && is_punctuation(tok(scope[end - 1])) {
        end -= 1;
    }
    scope.truncate(end);
    scope.drain(..start);

    // Edges are now content tokens, so any comma left has scope on both
    // sides. Hard boundaries can only remain between the cue parts.
    scope.retain(|&i| !config.is_hard_boundary(tok(i)));
    Ok(scope)
}

/// Fill `pred_scope_indices` for every negation record. `lang` overrides
/// the record language when given. Gold scopes are left alone.
pub fn resolve_corpus(corpus: Corpus, lang: Option<Lang>) -> Result<Corpus> {
    let configs: Vec<(Lang, ResolverConfig)> = Lang::ALL
        .iter()
        .map(|&l| (l, ResolverConfig::builtin(l)))
        .collect();
    corpus.try_map_records(|mut r| {
        if r.is_negation() {
            let l = lang.unwrap_or(r.lang);
            let config = &configs.iter().find(|(cl, _)| *cl == l).unwrap().1;
            let pred = resolve_scope_with(&r.tokens, &r.cue_indices, config)
                .map_err(|e| Error::validation(r.key().to_string(), e.to_string()))?;
            r.pred_scope_indices = Some(pred);
        }
        Ok(r)
    })
}

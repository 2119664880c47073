//! Reference tokenizer for pre-split sentences.
//!
//! Input is NFC-normalized, split on whitespace, and leading/trailing
//! punctuation is peeled off each chunk as single-character tokens.
//! Punctuation inside a chunk is never split, so dates (`06.02.2017`),
//! inline citations (`i.S.d`) and decimal numbers stay whole.
//!
//! A trailing period directly after a word character is kept on the word
//! (`vgl.`, `Abs.`, `2.`) unless it is the last character of the sentence.
//! Sentences arrive pre-split, so any other period is an abbreviation or
//! ordinal marker rather than a sentence terminator.

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

/// Characters detached from chunk edges.
pub const EDGE_PUNCTUATION: &[char] = &[
    '.', ',', ';', ':', '!', '?', '(', ')', '"', '«', '»', '„', '“',
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Offset in Unicode scalar values into the NFC-normalized sentence.
    pub char_start: usize,
    /// Exclusive end offset, same unit as `char_start`.
    pub char_end: usize,
}

/// NFC-normalize `text`. Token offsets refer to this form.
pub fn normalize(text: &str) -> String {
    text.nfc().collect()
}

fn is_edge_punct(c: char) -> bool {
    EDGE_PUNCTUATION.contains(&c)
}

pub fn tokenize(sentence: &str) -> Vec<Token> {
    let chars: Vec<char> = normalize(sentence).chars().collect();
    let last_visible = chars.iter().rposition(|c| !c.is_whitespace());

    let mut tokens = Vec::new();
    let mut push = |start: usize, end: usize| {
        tokens.push(Token {
            surface: chars[start..end].iter().collect(),
            char_start: start,
            char_end: end,
        })
    };

    let mut pos = 0;
    while pos < chars.len() {
        if chars[pos].is_whitespace() {
            pos += 1;
            continue;
        }
        let chunk_end = chars[pos..]
            .iter()
            .position(|c| c.is_whitespace())
            .map_or(chars.len(), |off| pos + off);

        let mut start = pos;
        while start < chunk_end && is_edge_punct(chars[start]) {
            push(start, start + 1);
            start += 1;
        }

        let mut end = chunk_end;
        while end > start && is_edge_punct(chars[end - 1]) {
            let at = end - 1;
            let abbreviation_dot = chars[at] == '.'
                && at > start
                && !is_edge_punct(chars[at - 1])
                && Some(at) != last_visible;
            if abbreviation_dot {
                break;
            }
            end -= 1;
        }

        if end > start {
            push(start, end);
        }
        for at in end..chunk_end {
            push(at, at + 1);
        }
        pos = chunk_end;
    }
    tokens
}

/// Tokenize and keep only the surfaces.
pub fn tokenize_surfaces(sentence: &str) -> Vec<String> {
    tokenize(sentence).into_iter().map(|t| t.surface).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(s: &str) -> Vec<String> {
        tokenize_surfaces(s)
    }

    #[test]
    fn empty_and_blank() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  \t \n").is_empty());
    }

    #[test]
    fn date_and_parenthetical_citation() {
        let toks = surfaces(
            "Seit dem 06.02.2017 ist der Kläger im Handelsregister nicht mehr als Geschäftsführer eingetragen (vgl. Anlage K9).",
        );
        assert_eq!(toks[2], "06.02.2017");
        let tail: Vec<&str> = toks[toks.len() - 7..].iter().map(String::as_str).collect();
        assert_eq!(tail, ["eingetragen", "(", "vgl.", "Anlage", "K9", ")", "."]);
    }

    #[test]
    fn french_trailing_semicolon() {
        let toks = surfaces("E._ ne disposait d'aucune autonomie budgétaire;");
        assert_eq!(
            toks,
            [
                "E._",
                "ne",
                "disposait",
                "d'aucune",
                "autonomie",
                "budgétaire",
                ";"
            ]
        );
    }

    #[test]
    fn abbreviation_periods() {
        let toks = surfaces("Abs. 2Satz 2 KSchG usw.).");
        assert_eq!(toks, ["Abs.", "2Satz", "2", "KSchG", "usw.", ")", "."]);
        assert_eq!(surfaces("Abs.,"), ["Abs.", ","]);
        assert_eq!(surfaces("vgl."), ["vgl", "."]);
        assert_eq!(surfaces("Abs., x"), ["Abs.", ",", "x"]);
        assert_eq!(surfaces("a ... b"), ["a", ".", ".", ".", "b"]);
    }

    #[test]
    fn quotes_and_guillemets() {
        assert_eq!(
            surfaces("«non» „nicht“"),
            ["«", "non", "»", "„", "nicht", "“"]
        );
    }

    #[test]
    fn nfc_normalization() {
        // "Kla" + combining diaeresis + "ger"
        let decomposed = "Kla\u{0308}ger";
        let toks = tokenize(decomposed);
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].surface, "Kläger");
        assert_eq!(toks[0].char_end, 6);
    }
}

//! Transcript corpus files: repeating `REF:` / `HYP:` line pairs.

use std::fs;
use std::path::Path;

use super::{align, join, tokenize, AlignedPair, CorpusError};

/// Parses corpus text. Blank lines and `#` comments are ignored.
pub fn parse_corpus(text: &str) -> Result<Vec<AlignedPair>, CorpusError> {
    let mut pairs = Vec::new();
    let mut pending: Option<(usize, String)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("REF:") {
            if let Some((ref_line, _)) = pending {
                return Err(CorpusError::Parse {
                    line: ref_line,
                    message: "REF line has no HYP partner".into(),
                });
            }
            pending = Some((line_no, rest.to_string()));
        } else if let Some(rest) = line.strip_prefix("HYP:") {
            let Some((_, reference)) = pending.take() else {
                return Err(CorpusError::Parse {
                    line: line_no,
                    message: "HYP line without a preceding REF line".into(),
                });
            };
            pairs.push(align(&tokenize(&reference), &tokenize(rest)));
        } else {
            return Err(CorpusError::Parse {
                line: line_no,
                message: format!("expected a REF: or HYP: record, found {line:?}"),
            });
        }
    }
    if let Some((ref_line, _)) = pending {
        return Err(CorpusError::Parse {
            line: ref_line,
            message: "REF line has no HYP partner".into(),
        });
    }
    Ok(pairs)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<AlignedPair>, CorpusError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| CorpusError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_corpus(&text)
}

/// Renders pairs back into the corpus file format.
pub fn write_corpus(pairs: &[AlignedPair]) -> String {
    let mut out = String::new();
    for p in pairs {
        out.push_str("REF: ");
        out.push_str(&join(&p.reference));
        out.push_str("\nHYP: ");
        out.push_str(&join(&p.hypothesis));
        out.push('\n');
    }
    out
}

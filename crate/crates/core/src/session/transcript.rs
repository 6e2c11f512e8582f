use std::path::Path;

use super::SessionError;
use crate::corpus::{tokenize, Token};

/// One user turn and, optionally, what was really said.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptTurn {
    pub text: String,
    pub reference: Option<Vec<Token>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    pub turns: Vec<TranscriptTurn>,
}

impl Transcript {
    pub fn load(path: &Path) -> Result<Self, SessionError> {
        let text = std::fs::read_to_string(path).map_err(|source| SessionError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        parse_transcript(&text)
    }

    pub fn has_references(&self) -> bool {
        self.turns.iter().any(|t| t.reference.is_some())
    }
}

/// Parses a transcript: `U:` lines are user turns, a `REF:` line gives the
/// reference for the turn above it, `S:` lines and `#` comments are skipped.
pub fn parse_transcript(text: &str) -> Result<Transcript, SessionError> {
    let mut turns: Vec<TranscriptTurn> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: &str| SessionError::Transcript {
            line: i + 1,
            message: message.to_string(),
        };
        let (tag, rest) = line.split_once(':').ok_or_else(|| bad("expected U:, REF: or S:"))?;
        match tag.trim() {
            "U" => turns.push(TranscriptTurn {
                text: rest.trim().to_string(),
                reference: None,
            }),
            "REF" => {
                let turn = turns.last_mut().ok_or_else(|| bad("REF before any U line"))?;
                if turn.reference.is_some() {
                    return Err(bad("second REF for one turn"));
                }
                turn.reference = Some(tokenize(rest));
            }
            "S" => {}
            other => return Err(bad(&format!("unknown tag {other:?}"))),
        }
    }
    Ok(Transcript { turns })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_turns_and_references() {
        let t = parse_transcript("# c\nU: go via Buffalo\nREF: UH GO VIA BUFFALO\nS: Yes.\nU: done\n").unwrap();
        assert_eq!(t.turns.len(), 2);
        assert_eq!(t.turns[0].reference.as_ref().unwrap().len(), 4);
        assert!(t.turns[1].reference.is_none());
        assert!(parse_transcript("REF: X").is_err());
        assert!(parse_transcript("Q: X").is_err());
        assert!(parse_transcript("U: a\nREF: a\nREF: b").is_err());
    }
}

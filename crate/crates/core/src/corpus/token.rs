use std::fmt;

use serde::{Deserialize, Serialize};

/// A normalized transcript word.
///
/// Tokens are uppercase and carry no whitespace. Punctuation is stripped
/// except apostrophes and underscores, so `I'M` and recognizer compounds such
/// as `B_X` or `I_NEED` survive as single tokens.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Token(String);

impl Token {
    /// Normalizes `raw`; returns `None` when nothing survives normalization.
    pub fn new(raw: &str) -> Option<Token> {
        let text = normalize(raw);
        if text.is_empty() {
            None
        } else {
            Some(Token(text))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl PartialEq<str> for Token {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for Token {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

impl TryFrom<String> for Token {
    type Error = String;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Token::new(&value).ok_or_else(|| format!("{value:?} normalizes to an empty token"))
    }
}

impl From<Token> for String {
    fn from(value: Token) -> Self {
        value.0
    }
}

/// Uppercases and strips every character that is not alphanumeric, an
/// apostrophe or an underscore. Idempotent.
pub fn normalize(raw: &str) -> String {
    raw.chars()
        .flat_map(char::to_uppercase)
        .filter(|c| c.is_alphanumeric() || *c == '\'' || *c == '_')
        .collect()
}

/// Splits on whitespace and normalizes each piece, dropping pieces that
/// normalize to nothing (stray punctuation).
pub fn tokenize(text: &str) -> Vec<Token> {
    text.split_whitespace().filter_map(Token::new).collect()
}

/// Joins tokens with single spaces.
pub fn join(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(t.as_str());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Speaker {
    User,
    System,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Channel {
    Speech,
    Keyboard,
}

impl std::str::FromStr for Channel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "speech" => Ok(Channel::Speech),
            "keyboard" => Ok(Channel::Keyboard),
            other => Err(format!(
                "unknown channel {other:?} (expected speech or keyboard)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub tokens: Vec<Token>,
    pub speaker: Speaker,
    pub channel: Channel,
}

impl Utterance {
    pub fn user(tokens: Vec<Token>, channel: Channel) -> Self {
        Utterance {
            tokens,
            speaker: Speaker::User,
            channel,
        }
    }

    /// The designated empty utterance; the only one allowed to carry no tokens.
    pub fn empty(speaker: Speaker, channel: Channel) -> Self {
        Utterance {
            tokens: Vec::new(),
            speaker,
            channel,
        }
    }

    pub fn parse(text: &str, speaker: Speaker, channel: Channel) -> Self {
        Utterance {
            tokens: tokenize(text),
            speaker,
            channel,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn text(&self) -> String {
        join(&self.tokens)
    }
}

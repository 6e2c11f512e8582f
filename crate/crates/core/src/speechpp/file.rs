//! Versioned plain-text model files. Probabilities are written with nine
//! significant digits and read back verbatim, so save/load/save reproduces
//! the same text. Settings are written in shortest round-trip form.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use super::channel::{ChannelConfig, ChannelModel, Emission};
use super::{BigramLm, ModelError};
use crate::corpus::Token;

const LM_HEADER: &str = "#speechpp-lm v1";
const CHANNEL_HEADER: &str = "#speechpp-channel v1";

fn num(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn write_lm(lm: &BigramLm) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{LM_HEADER}");
    let _ = writeln!(out, "discount {}", num(lm.discount));
    let _ = writeln!(out, "unk {}", num(lm.unk));
    for (w, p) in &lm.unigram {
        let _ = writeln!(out, "unigram {w} {}", num(*p));
    }
    for (h, a) in &lm.backoff {
        let _ = writeln!(out, "backoff {h} {}", num(*a));
    }
    let sorted: BTreeMap<&String, &BTreeMap<String, f64>> = lm.bigram.iter().collect();
    for (h, followers) in sorted {
        for (w, p) in followers {
            let _ = writeln!(out, "bigram {h} {w} {}", num(*p));
        }
    }
    out
}

pub fn write_channel(cm: &ChannelModel) -> String {
    let mut out = String::new();
    let c = cm.config();
    let _ = writeln!(out, "{CHANNEL_HEADER}");
    let _ = writeln!(out, "smoothing {}", c.smoothing);
    let _ = writeln!(out, "floor {}", c.self_floor);
    let _ = writeln!(out, "unk_penalty {}", c.unk_penalty);
    let _ = writeln!(out, "fertility {}", c.fertility);
    for (src, dist) in &cm.table {
        for (e, p) in dist {
            match e {
                Emission::One(o) => {
                    let _ = writeln!(out, "one {src} {o} {}", num(*p));
                }
                Emission::Two(a, b) => {
                    let _ = writeln!(out, "two {src} {a} {b} {}", num(*p));
                }
            }
        }
    }
    out
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, header: &str) -> Result<Self, ModelError> {
        let mut iter = text.lines().enumerate();
        match iter.next() {
            Some((_, first)) if first.trim() == header => Ok(Lines { iter }),
            _ => Err(ModelError::Parse {
                line: 1,
                message: format!("expected header '{header}'"),
            }),
        }
    }
}

impl<'a> Iterator for Lines<'a> {
    type Item = (usize, Vec<&'a str>);
    fn next(&mut self) -> Option<Self::Item> {
        for (i, line) in self.iter.by_ref() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if !fields.is_empty() {
                return Some((i + 1, fields));
            }
        }
        None
    }
}

fn bad(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_num(line: usize, s: &str) -> Result<f64, ModelError> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| bad(line, format!("'{s}' is not a number")))
}

fn parse_prob(line: usize, s: &str) -> Result<f64, ModelError> {
    let p = parse_num(line, s)?;
    if p > 0.0 && p <= 1.0 {
        Ok(p)
    } else {
        Err(bad(line, format!("probability {s} outside (0, 1]")))
    }
}

fn parse_token(line: usize, s: &str) -> Result<Token, ModelError> {
    Token::new(s)
        .filter(|t| t.as_str() == s)
        .ok_or_else(|| bad(line, format!("'{s}' is not a normalized token")))
}

pub fn read_lm(text: &str) -> Result<BigramLm, ModelError> {
    let mut discount = None;
    let mut unk = None;
    let mut unigram = BTreeMap::new();
    let mut backoff = BTreeMap::new();
    let mut bigram: HashMap<String, BTreeMap<String, f64>> = HashMap::new();
    for (line, f) in Lines::new(text, LM_HEADER)? {
        match (f[0], f.len()) {
            ("discount", 2) => discount = Some(parse_num(line, f[1])?),
            ("unk", 2) => unk = Some(parse_prob(line, f[1])?),
            ("unigram", 3) => {
                unigram.insert(f[1].to_string(), parse_prob(line, f[2])?);
            }
            ("backoff", 3) => {
                backoff.insert(f[1].to_string(), parse_num(line, f[2])?);
            }
            ("bigram", 4) => {
                bigram
                    .entry(f[1].to_string())
                    .or_default()
                    .insert(f[2].to_string(), parse_prob(line, f[3])?);
            }
            _ => return Err(bad(line, format!("unrecognized entry '{}'", f.join(" ")))),
        }
    }
    let discount = discount.ok_or_else(|| bad(1, "missing discount"))?;
    if !(discount > 0.0 && discount < 1.0) {
        return Err(ModelError::InvalidParameter(format!(
            "discount {discount} must lie in (0, 1)"
        )));
    }
    Ok(BigramLm {
        discount,
        unigram,
        unk: unk.ok_or_else(|| bad(1, "missing unk"))?,
        backoff,
        bigram,
    })
}

pub fn read_channel(text: &str) -> Result<ChannelModel, ModelError> {
    let mut config = ChannelConfig::default();
    let mut table: BTreeMap<Token, BTreeMap<Emission, f64>> = BTreeMap::new();
    for (line, f) in Lines::new(text, CHANNEL_HEADER)? {
        match (f[0], f.len()) {
            ("smoothing", 2) => config.smoothing = parse_num(line, f[1])?,
            ("floor", 2) => config.self_floor = parse_num(line, f[1])?,
            ("unk_penalty", 2) => config.unk_penalty = parse_num(line, f[1])?,
            ("fertility", 2) => {
                config.fertility = f[1]
                    .parse()
                    .map_err(|_| bad(line, format!("'{}' is not true or false", f[1])))?
            }
            ("one", 4) => {
                let e = Emission::One(parse_token(line, f[2])?);
                table
                    .entry(parse_token(line, f[1])?)
                    .or_default()
                    .insert(e, parse_prob(line, f[3])?);
            }
            ("two", 5) => {
                let e = Emission::Two(parse_token(line, f[2])?, parse_token(line, f[3])?);
                table
                    .entry(parse_token(line, f[1])?)
                    .or_default()
                    .insert(e, parse_prob(line, f[4])?);
            }
            _ => return Err(bad(line, format!("unrecognized entry '{}'", f.join(" ")))),
        }
    }
    Ok(ChannelModel::from_table(config, table))
}

fn read_file(path: &Path) -> Result<String, ModelError> {
    std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_lm(path: impl AsRef<Path>) -> Result<BigramLm, ModelError> {
    read_lm(&read_file(path.as_ref())?)
}

pub fn load_channel(path: impl AsRef<Path>) -> Result<ChannelModel, ModelError> {
    read_channel(&read_file(path.as_ref())?)
}

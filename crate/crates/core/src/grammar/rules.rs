//! Grammar and lexicon loaded from the line-oriented `.grm` format:
//!
//! ```text
//! syn  S NP VP ...                  closed syntactic inventory
//! sem  CITY ENGINE ...              closed semantic inventory
//! slot origin dest via ...          frame slots rules may touch
//! lex  NEW YORK => N/CITY name=NEW_YORK
//! rule PP/TO -> P/TO NP/CITY : dest=@2.city
//! rule ACT/@2 -> DM/* ACT/* : +@2 [0.9]
//! fragment TO BOSTON
//! ```
//!
//! Right-hand items are `SYN/SEM`, `SYN/*` or a quoted word, optionally
//! constrained with `{slot=value,slot,!slot}`. Directives after `:` build the
//! parent frame: `+@i` merges child i, `s=@i.k` copies child slot k,
//! `s+=@i.k` appends it, `s=VALUE` sets a constant. A bracketed number at the
//! end is the rule weight (default 1).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Frame, GrammarError, Value};
use crate::corpus::{tokenize, Token};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Category {
    pub syn: String,
    pub sem: String,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.syn, self.sem)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    Equals(String, String),
    Present(String),
    Absent(String),
}

impl Constraint {
    pub fn holds(&self, frame: &Frame) -> bool {
        match self {
            Constraint::Equals(slot, v) => frame.atom(slot) == Some(v.as_str()),
            Constraint::Present(slot) => frame.has(slot),
            Constraint::Absent(slot) => !frame.has(slot),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Cat {
        syn: String,
        /// `None` matches any semantic category.
        sem: Option<String>,
        constraints: Vec<Constraint>,
    },
    Literal(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LhsSem {
    Fixed(String),
    /// Take the semantic category of the i-th child (0-based).
    Copy(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Directive {
    Merge(usize),
    Copy { slot: String, child: usize, key: String },
    Append { slot: String, child: usize, key: String },
    Const { slot: String, value: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub lhs_syn: String,
    pub lhs_sem: LhsSem,
    pub rhs: Vec<Item>,
    pub directives: Vec<Directive>,
    pub weight: f64,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexEntry {
    pub words: Vec<String>,
    pub category: Category,
    pub features: Frame,
}

/// Illocutionary force. TELL is the root; every other act refines it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ActType {
    Tell,
    Confirm,
    Acknowledge,
    Reject,
    Suggest,
    Request,
    Check,
    Question,
}

impl ActType {
    pub const ALL: [ActType; 8] = [
        ActType::Tell,
        ActType::Confirm,
        ActType::Acknowledge,
        ActType::Reject,
        ActType::Suggest,
        ActType::Request,
        ActType::Check,
        ActType::Question,
    ];

    pub fn parent(self) -> Option<ActType> {
        match self {
            ActType::Tell => None,
            _ => Some(ActType::Tell),
        }
    }

    /// True if `self` is `other` or one of its descendants.
    pub fn is_a(self, other: ActType) -> bool {
        self == other || self.parent().is_some_and(|p| p.is_a(other))
    }

    pub fn allows_empty_content(self) -> bool {
        matches!(
            self,
            ActType::Tell | ActType::Confirm | ActType::Acknowledge | ActType::Reject
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ActType::Tell => "TELL",
            ActType::Confirm => "CONFIRM",
            ActType::Acknowledge => "ACKNOWLEDGE",
            ActType::Reject => "REJECT",
            ActType::Suggest => "SUGGEST",
            ActType::Request => "REQUEST",
            ActType::Check => "CHECK",
            ActType::Question => "QUESTION",
        }
    }
}

impl fmt::Display for ActType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ActType::ALL
            .iter()
            .copied()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown act type '{s}'"))
    }
}

/// The syntactic category whose constituents are speech acts.
pub const ACT_SYN: &str = "ACT";
/// Category given to words the lexicon does not know.
pub const UNKNOWN_SYN: &str = "UNKNOWN";

#[derive(Debug, Clone)]
pub struct Grammar {
    pub syn: BTreeSet<String>,
    pub sem: BTreeSet<String>,
    pub slots: BTreeSet<String>,
    /// Lexical entries keyed by their first word.
    pub lexicon: HashMap<String, Vec<LexEntry>>,
    pub rules: Vec<Rule>,
    pub fragments: Vec<Vec<Token>>,
}

fn err(line: usize, message: impl Into<String>) -> GrammarError {
    GrammarError {
        line,
        message: message.into(),
    }
}

impl Grammar {
    pub fn parse(text: &str) -> Result<Grammar, GrammarError> {
        let mut g = Grammar {
            syn: BTreeSet::new(),
            sem: BTreeSet::new(),
            slots: BTreeSet::new(),
            lexicon: HashMap::new(),
            rules: Vec::new(),
            fragments: Vec::new(),
        };
        g.syn.insert(UNKNOWN_SYN.to_string());
        g.sem.insert(UNKNOWN_SYN.to_string());
        g.slots.insert("word".to_string());
        for act in ActType::ALL {
            g.sem.insert(act.name().to_string());
        }

        // inventories first so declarations may follow their use
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        for &(_, line) in &lines {
            let mut words = line.split_whitespace();
            let target = match words.next() {
                Some("syn") => &mut g.syn,
                Some("sem") => &mut g.sem,
                Some("slot") => &mut g.slots,
                _ => continue,
            };
            target.extend(words.map(str::to_string));
        }
        for &(n, line) in &lines {
            let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            match keyword {
                "syn" | "sem" | "slot" => {}
                "lex" => g.parse_lex(n, rest)?,
                "rule" => {
                    let rule = g.parse_rule(n, rest)?;
                    g.rules.push(rule);
                }
                "fragment" => {
                    let toks = tokenize(rest);
                    if toks.is_empty() {
                        return Err(err(n, "empty fragment"));
                    }
                    g.fragments.push(toks);
                }
                other => return Err(err(n, format!("unknown keyword '{other}'"))),
            }
        }
        g.check_unary_cycles()?;
        Ok(g)
    }

    fn category(&self, n: usize, text: &str) -> Result<(String, Option<String>), GrammarError> {
        let (syn, sem) = text
            .split_once('/')
            .ok_or_else(|| err(n, format!("'{text}' is not SYN/SEM")))?;
        if !self.syn.contains(syn) {
            return Err(err(n, format!("undeclared syntactic category '{syn}'")));
        }
        if sem == "*" {
            return Ok((syn.to_string(), None));
        }
        if !self.sem.contains(sem) {
            return Err(err(n, format!("undeclared semantic category '{sem}'")));
        }
        Ok((syn.to_string(), Some(sem.to_string())))
    }

    fn slot(&self, n: usize, slot: &str) -> Result<String, GrammarError> {
        if self.slots.contains(slot) {
            Ok(slot.to_string())
        } else {
            Err(err(n, format!("undeclared slot '{slot}'")))
        }
    }

    fn parse_lex(&mut self, n: usize, rest: &str) -> Result<(), GrammarError> {
        let (words, cat) = rest
            .split_once("=>")
            .ok_or_else(|| err(n, "lexical entry needs '=>'"))?;
        let words: Vec<String> = words.split_whitespace().map(str::to_string).collect();
        if words.is_empty() {
            return Err(err(n, "lexical entry has no words"));
        }
        for w in &words {
            if Token::new(w).map(|t| t.as_str() != w).unwrap_or(true) {
                return Err(err(n, format!("'{w}' is not a normalized token")));
            }
        }
        let mut parts = cat.split_whitespace();
        let cat = parts.next().ok_or_else(|| err(n, "lexical entry needs a category"))?;
        let (syn, sem) = self.category(n, cat)?;
        let sem = sem.ok_or_else(|| err(n, "lexical categories need a semantic category"))?;
        let mut features = Frame::new();
        for f in parts {
            let (k, v) = f
                .split_once('=')
                .ok_or_else(|| err(n, format!("feature '{f}' is not slot=value")))?;
            features.set(&self.slot(n, k)?, Value::Atom(v.to_string()));
        }
        self.lexicon.entry(words[0].clone()).or_default().push(LexEntry {
            words,
            category: Category { syn, sem },
            features,
        });
        Ok(())
    }

    fn parse_rule(&self, n: usize, rest: &str) -> Result<Rule, GrammarError> {
        let (lhs, body) = rest
            .split_once("->")
            .ok_or_else(|| err(n, "rule needs '->'"))?;
        let (rhs_text, tail) = body.split_once(':').unwrap_or((body, ""));
        let (mut tail, mut weight) = (tail.trim().to_string(), 1.0);
        let mut rhs_text = rhs_text.trim().to_string();
        // weight may trail either the directives or the right-hand side
        for text in [&mut tail, &mut rhs_text] {
            if let Some(open) = text.rfind('[') {
                if text.ends_with(']') {
                    weight = text[open + 1..text.len() - 1]
                        .trim()
                        .parse::<f64>()
                        .map_err(|_| err(n, "weight is not a number"))?;
                    if !(weight > 0.0 && weight.is_finite()) {
                        return Err(err(n, "weight must be positive"));
                    }
                    text.truncate(open);
                }
            }
        }

        let lhs = lhs.trim();
        let (lhs_syn, lhs_sem_text) = lhs
            .split_once('/')
            .ok_or_else(|| err(n, format!("'{lhs}' is not SYN/SEM")))?;
        if !self.syn.contains(lhs_syn) {
            return Err(err(n, format!("undeclared syntactic category '{lhs_syn}'")));
        }

        let mut rhs = Vec::new();
        for item in rhs_text.split_whitespace() {
            if let Some(word) = item.strip_prefix('"') {
                let word = word
                    .strip_suffix('"')
                    .ok_or_else(|| err(n, format!("unterminated literal {item}")))?;
                rhs.push(Item::Literal(word.to_string()));
                continue;
            }
            let (cat, constraints) = match item.split_once('{') {
                Some((cat, c)) => {
                    let c = c
                        .strip_suffix('}')
                        .ok_or_else(|| err(n, format!("unterminated constraint in {item}")))?;
                    (cat, c)
                }
                None => (item, ""),
            };
            let (syn, sem) = self.category(n, cat)?;
            let mut cs = Vec::new();
            for c in constraints.split(',').map(str::trim).filter(|c| !c.is_empty()) {
                cs.push(if let Some(slot) = c.strip_prefix('!') {
                    Constraint::Absent(self.slot(n, slot)?)
                } else if let Some((k, v)) = c.split_once('=') {
                    Constraint::Equals(self.slot(n, k)?, v.to_string())
                } else {
                    Constraint::Present(self.slot(n, c)?)
                });
            }
            rhs.push(Item::Cat {
                syn,
                sem,
                constraints: cs,
            });
        }
        if rhs.is_empty() {
            return Err(err(n, "rule has an empty right-hand side"));
        }

        let child = |text: &str| -> Result<usize, GrammarError> {
            let i: usize = text
                .strip_prefix('@')
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| err(n, format!("'{text}' is not a child reference @i")))?;
            if i == 0 || i > rhs.len() {
                return Err(err(n, format!("child @{i} out of range")));
            }
            if matches!(rhs[i - 1], Item::Literal(_)) {
                return Err(err(n, format!("child @{i} is a literal")));
            }
            Ok(i - 1)
        };

        let lhs_sem = if lhs_sem_text.starts_with('@') {
            LhsSem::Copy(child(lhs_sem_text)?)
        } else if self.sem.contains(lhs_sem_text) {
            LhsSem::Fixed(lhs_sem_text.to_string())
        } else {
            return Err(err(n, format!("undeclared semantic category '{lhs_sem_text}'")));
        };

        let mut directives = Vec::new();
        for d in tail.split_whitespace() {
            if let Some(c) = d.strip_prefix('+') {
                directives.push(Directive::Merge(child(c)?));
            } else if let Some((slot, src)) = d.split_once("+=") {
                let (c, key) = src
                    .split_once('.')
                    .ok_or_else(|| err(n, format!("'{src}' is not @i.slot")))?;
                directives.push(Directive::Append {
                    slot: self.slot(n, slot)?,
                    child: child(c)?,
                    key: self.slot(n, key)?,
                });
            } else if let Some((slot, src)) = d.split_once('=') {
                let slot = self.slot(n, slot)?;
                if src.starts_with('@') {
                    let (c, key) = src
                        .split_once('.')
                        .ok_or_else(|| err(n, format!("'{src}' is not @i.slot")))?;
                    directives.push(Directive::Copy {
                        slot,
                        child: child(c)?,
                        key: self.slot(n, key)?,
                    });
                } else {
                    directives.push(Directive::Const {
                        slot,
                        value: src.to_string(),
                    });
                }
            } else {
                return Err(err(n, format!("unrecognized directive '{d}'")));
            }
        }

        Ok(Rule {
            lhs_syn: lhs_syn.to_string(),
            lhs_sem,
            rhs,
            directives,
            weight,
            line: n,
        })
    }

    /// Unary rules over categories must not loop, or closure would not end.
    fn check_unary_cycles(&self) -> Result<(), GrammarError> {
        let unary: Vec<&Rule> = self
            .rules
            .iter()
            .filter(|r| r.rhs.len() == 1 && matches!(r.rhs[0], Item::Cat { .. }))
            .collect();
        // edge i -> j when rule j can consume what rule i builds
        let feeds = |a: &Rule, b: &Rule| -> bool {
            let Item::Cat { syn, sem, .. } = &b.rhs[0] else {
                return false;
            };
            if *syn != a.lhs_syn {
                return false;
            }
            match (&a.lhs_sem, sem) {
                (_, None) | (LhsSem::Copy(_), _) => true,
                (LhsSem::Fixed(x), Some(y)) => x == y,
            }
        };
        let n = unary.len();
        let mut state = vec![0u8; n];
        fn visit(
            i: usize,
            unary: &[&Rule],
            state: &mut [u8],
            feeds: &dyn Fn(&Rule, &Rule) -> bool,
        ) -> Option<usize> {
            state[i] = 1;
            for j in 0..unary.len() {
                if feeds(unary[i], unary[j]) {
                    if state[j] == 1 {
                        return Some(unary[j].line);
                    }
                    if state[j] == 0 {
                        if let Some(l) = visit(j, unary, state, feeds) {
                            return Some(l);
                        }
                    }
                }
            }
            state[i] = 2;
            None
        }
        for i in 0..n {
            if state[i] == 0 {
                if let Some(line) = visit(i, &unary, &mut state, &feeds) {
                    return Err(err(line, "unary rules form a cycle"));
                }
            }
        }
        Ok(())
    }

    /// Lexical entries that match the tokens starting at `pos`.
    pub fn lookup<'a>(&'a self, tokens: &'a [Token], pos: usize) -> impl Iterator<Item = &'a LexEntry> + 'a {
        self.lexicon
            .get(tokens[pos].as_str())
            .into_iter()
            .flatten()
            .filter(move |e| {
                pos + e.words.len() <= tokens.len()
                    && e.words
                        .iter()
                        .zip(&tokens[pos..])
                        .all(|(w, t)| w == t.as_str())
            })
    }

    /// True if some entry consists of exactly this one word.
    pub fn knows_word(&self, word: &str) -> bool {
        self.lexicon
            .get(word)
            .is_some_and(|es| es.iter().any(|e| e.words.len() == 1))
    }

    /// Every city the lexicon names, keyed by its `name` feature.
    pub fn lexical_values(&self, syn: &str, sem: &str, slot: &str) -> BTreeMap<String, Vec<String>> {
        let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for entries in self.lexicon.values() {
            for e in entries {
                if e.category.syn == syn && e.category.sem == sem {
                    if let Some(v) = e.features.atom(slot) {
                        out.entry(v.to_string()).or_default().push(e.words.join(" "));
                    }
                }
            }
        }
        out
    }
}

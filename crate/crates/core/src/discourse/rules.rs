use std::collections::BTreeSet;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::DiscourseError;
use crate::grammar::ActType;

pub const FIXTURE_RULES: &str = include_str!("../../data/discourse_rules.toml");

/// What an act's grounded content amounts to, most specific kind first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContentKind {
    Garbled,
    Done,
    Clear,
    Route,
    Engine,
    Empty,
    /// The act covers no words at all.
    Nothing,
}

impl FromStr for ContentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "garbled" => ContentKind::Garbled,
            "done" => ContentKind::Done,
            "clear" => ContentKind::Clear,
            "route" => ContentKind::Route,
            "engine" => ContentKind::Engine,
            "empty" => ContentKind::Empty,
            "nothing" => ContentKind::Nothing,
            other => return Err(format!("unknown content kind {other:?}")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopPattern {
    #[default]
    Any,
    Empty,
    Proposal,
    Clarification,
    Goal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OthersPattern {
    #[default]
    Any,
    None,
    Some,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    Accept,
    Reject,
    Close,
    ClearRoute,
    Answer,
    Solve,
    Focus,
    Ignore,
    Acknowledge,
    Clarify,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    priority: u32,
    name: String,
    #[serde(default)]
    acts: Vec<String>,
    #[serde(default)]
    content: Vec<String>,
    #[serde(default)]
    top: TopPattern,
    #[serde(default)]
    others: OthersPattern,
    action: Action,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRules {
    rule: Vec<RawRule>,
}

/// A prioritized pattern-action rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbalRule {
    pub priority: u32,
    pub name: String,
    /// `None` matches every act type.
    pub acts: Option<BTreeSet<ActType>>,
    /// `None` matches every content kind.
    pub content: Option<BTreeSet<ContentKind>>,
    pub top: TopPattern,
    pub others: OthersPattern,
    pub action: Action,
}

impl VerbalRule {
    pub fn is_catch_all(&self) -> bool {
        self.acts.is_none() && self.content.is_none() && self.top == TopPattern::Any && self.others == OthersPattern::Any
    }
}

/// Rules sorted by priority.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<VerbalRule>,
}

impl RuleSet {
    pub fn fixture() -> Self {
        RuleSet::parse(FIXTURE_RULES).expect("fixture rules are valid")
    }

    pub fn load(path: &Path) -> Result<Self, DiscourseError> {
        let text = std::fs::read_to_string(path).map_err(|source| DiscourseError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        RuleSet::parse(&text)
    }

    /// Parses and validates: priorities unique, patterns known, and the
    /// last rule a catch-all.
    pub fn parse(text: &str) -> Result<Self, DiscourseError> {
        let raw: RawRules = toml::from_str(text).map_err(|e| DiscourseError::RuleFile(e.to_string()))?;
        let mut rules = Vec::new();
        let mut seen = BTreeSet::new();
        for r in raw.rule {
            let bad = |message: String| DiscourseError::Rule {
                name: r.name.clone(),
                message,
            };
            if !seen.insert(r.priority) {
                return Err(bad(format!("priority {} is used twice", r.priority)));
            }
            let acts = if r.acts.is_empty() || r.acts.iter().any(|a| a.eq_ignore_ascii_case("ANY")) {
                None
            } else {
                Some(
                    r.acts
                        .iter()
                        .map(|a| ActType::from_str(a).map_err(|_| bad(format!("unknown act type {a:?}"))))
                        .collect::<Result<BTreeSet<_>, _>>()?,
                )
            };
            let content = if r.content.is_empty() || r.content.iter().any(|c| c.eq_ignore_ascii_case("any")) {
                None
            } else {
                Some(
                    r.content
                        .iter()
                        .map(|c| {
                            c.parse::<ContentKind>()
                                .map_err(|_| bad(format!("unknown content kind {c:?}")))
                        })
                        .collect::<Result<BTreeSet<_>, _>>()?,
                )
            };
            rules.push(VerbalRule {
                priority: r.priority,
                name: r.name,
                acts,
                content,
                top: r.top,
                others: r.others,
                action: r.action,
            });
        }
        rules.sort_by_key(|r| r.priority);
        match rules.last() {
            Some(last) if last.is_catch_all() => {}
            Some(last) => {
                return Err(DiscourseError::Rule {
                    name: last.name.clone(),
                    message: "the lowest-priority rule must match everything".into(),
                })
            }
            None => return Err(DiscourseError::RuleFile("no rules".into())),
        }
        if let Some(r) = rules[..rules.len() - 1].iter().find(|r| r.is_catch_all()) {
            return Err(DiscourseError::Rule {
                name: r.name.clone(),
                message: "a catch-all before the last rule hides everything after it".into(),
            });
        }
        Ok(RuleSet { rules })
    }

    pub fn rules(&self) -> &[VerbalRule] {
        &self.rules
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_ends_with_catch_all() {
        let set = RuleSet::fixture();
        assert!(set.rules().last().unwrap().is_catch_all());
        assert!(set.rules().windows(2).all(|w| w[0].priority < w[1].priority));
    }

    #[test]
    fn rejects_duplicate_priorities_and_missing_catch_all() {
        let dup = "[[rule]]\npriority = 1\nname = \"a\"\naction = \"ignore\"\nacts = [\"TELL\"]\n\
                   [[rule]]\npriority = 1\nname = \"b\"\naction = \"clarify\"";
        assert!(matches!(RuleSet::parse(dup), Err(DiscourseError::Rule { .. })));
        let no_catch = "[[rule]]\npriority = 1\nname = \"a\"\nacts = [\"TELL\"]\naction = \"ignore\"";
        assert!(matches!(RuleSet::parse(no_catch), Err(DiscourseError::Rule { .. })));
        let bad_act = "[[rule]]\npriority = 1\nname = \"a\"\nacts = [\"SING\"]\naction = \"ignore\"";
        assert!(RuleSet::parse(bad_act).is_err());
        let bad_action = "[[rule]]\npriority = 1\nname = \"a\"\naction = \"dance\"";
        assert!(matches!(RuleSet::parse(bad_action), Err(DiscourseError::RuleFile(_))));
    }
}

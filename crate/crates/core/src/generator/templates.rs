use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::GeneratorError;

pub const FIXTURE_TEMPLATES: &str = include_str!("../../data/templates.toml");

/// Object classes that have a description rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectClass {
    City,
    Engine,
    Route,
    Goal,
    Number,
    Text,
    /// A nested acknowledgement drawn from the ACKNOWLEDGE variants.
    Ack,
}

use ObjectClass::*;

/// Act forms and the slots each may use.
const FORMS: &[(&str, &[(&str, ObjectClass)])] = &[
    ("ACKNOWLEDGE", &[]),
    ("PROPOSE-ROUTE", &[("engine", Engine), ("route", Route), ("from", City), ("to", City), ("ack", Ack)]),
    ("PROPOSE-PARTIAL", &[("engine", Engine), ("route", Route), ("from", City), ("to", City), ("ack", Ack)]),
    ("CLARIFY-ROUTE", &[("engine", Engine), ("from", City), ("to", City)]),
    ("CLARIFY-DEST", &[("engine", Engine)]),
    ("CLARIFY", &[]),
    ("QUIP", &[]),
    ("ANNOUNCE-CONGESTION", &[("cities", City), ("hours", Number), ("reason", Text)]),
    ("ROUTES-CROSS", &[("engine", Engine), ("cities", City), ("hours", Number)]),
    ("NO-PATH", &[("engine", Engine), ("from", City), ("to", City)]),
    ("NO-ENGINE-AT", &[("city", City)]),
    ("NO-ENGINE", &[]),
    ("CLEAR-ROUTE", &[("engine", Engine), ("ack", Ack)]),
    ("GOALS-UNMET", &[("goals", Goal)]),
    ("CLOSE", &[]),
];

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Template {
    pub variants: Vec<String>,
}

/// Templates keyed by act form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Templates {
    forms: BTreeMap<String, Template>,
}

impl Templates {
    pub fn fixture() -> Self {
        let t = Templates::parse(FIXTURE_TEMPLATES).expect("fixture templates are valid");
        t.check_total().expect("fixture templates cover every form");
        t
    }

    pub fn load(path: &Path) -> Result<Self, GeneratorError> {
        let text = std::fs::read_to_string(path).map_err(|source| GeneratorError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Templates::parse(&text)
    }

    /// Parses and validates a template file. Forms must be known and every
    /// slot must be one the form provides. Missing forms are allowed here;
    /// see [`Templates::check_total`].
    pub fn parse(text: &str) -> Result<Self, GeneratorError> {
        let forms: BTreeMap<String, Template> =
            toml::from_str(text).map_err(|e| GeneratorError::Format(e.to_string()))?;
        for (kind, template) in &forms {
            let invalid = |message: String| GeneratorError::Invalid {
                kind: kind.clone(),
                message,
            };
            let allowed = Templates::slots_of(kind).ok_or_else(|| invalid("unknown act form".into()))?;
            if template.variants.is_empty() {
                return Err(invalid("no variants".into()));
            }
            for v in &template.variants {
                for piece in pieces(v) {
                    if let Piece::Slot(name) = piece {
                        let lower = name.to_ascii_lowercase();
                        if !allowed.iter().any(|(s, _)| *s == lower) {
                            return Err(invalid(format!("slot {{{name}}} is not provided by this form")));
                        }
                    }
                }
                if v.matches('{').count() != v.matches('}').count() {
                    return Err(invalid(format!("unbalanced braces in {v:?}")));
                }
            }
        }
        Ok(Templates { forms })
    }

    /// Fails on the first act form without a template.
    pub fn check_total(&self) -> Result<(), GeneratorError> {
        match Templates::forms().find(|f| !self.forms.contains_key(*f)) {
            Some(f) => Err(GeneratorError::Missing(f.to_string())),
            None => Ok(()),
        }
    }

    pub fn get(&self, form: &str) -> Option<&Template> {
        self.forms.get(form)
    }

    pub fn forms() -> impl Iterator<Item = &'static str> {
        FORMS.iter().map(|(f, _)| *f)
    }

    pub fn slots_of(form: &str) -> Option<&'static [(&'static str, ObjectClass)]> {
        FORMS.iter().find(|(f, _)| *f == form).map(|(_, s)| *s)
    }
}

pub(super) enum Piece<'a> {
    Text(&'a str),
    Slot(&'a str),
}

pub(super) fn pieces(pattern: &str) -> Vec<Piece<'_>> {
    let mut out = Vec::new();
    let mut rest = pattern;
    while let Some(open) = rest.find('{') {
        let Some(len) = rest[open..].find('}') else {
            break;
        };
        if open > 0 {
            out.push(Piece::Text(&rest[..open]));
        }
        out.push(Piece::Slot(&rest[open + 1..open + len]));
        rest = &rest[open + len + 1..];
    }
    if !rest.is_empty() {
        out.push(Piece::Text(rest));
    }
    out
}

/// "A", "A and B", "A, B and C".
pub fn describe_list(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

/// Spells small counts as words, larger ones as digits.
pub fn number_words(n: u32) -> String {
    const WORDS: [&str; 21] = [
        "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
        "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty",
    ];
    WORDS.get(n as usize).map(|w| w.to_string()).unwrap_or_else(|| n.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_is_total() {
        Templates::fixture();
    }

    #[test]
    fn rejects_unknown_forms_and_slots() {
        assert!(matches!(
            Templates::parse("[SING]\nvariants = [\"la\"]"),
            Err(GeneratorError::Invalid { .. })
        ));
        assert!(matches!(
            Templates::parse("[CLARIFY-DEST]\nvariants = [\"{route}\"]"),
            Err(GeneratorError::Invalid { .. })
        ));
        assert!(matches!(
            Templates::parse("[CLOSE]\nvariants = []"),
            Err(GeneratorError::Invalid { .. })
        ));
        let partial = Templates::parse("[CLOSE]\nvariants = [\"Bye.\"]").unwrap();
        assert!(matches!(partial.check_total(), Err(GeneratorError::Missing(_))));
    }

    #[test]
    fn lists_and_numbers() {
        let l = |v: &[&str]| describe_list(&v.iter().map(|s| s.to_string()).collect::<Vec<_>>());
        assert_eq!(l(&["Scranton"]), "Scranton");
        assert_eq!(l(&["Scranton", "Baltimore"]), "Scranton and Baltimore");
        assert_eq!(l(&["A", "B", "C"]), "A, B and C");
        assert_eq!(number_words(5), "five");
        assert_eq!(number_words(35), "35");
    }
}

//! Template realization of system speech acts into text and display
//! commands.

mod templates;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Speaker;
use crate::solver::World;

pub use templates::{describe_list, number_words, ObjectClass, Template, Templates, FIXTURE_TEMPLATES};

#[derive(Debug, thiserror::Error)]
pub enum GeneratorError {
    #[error("template file: {0}")]
    Format(String),
    #[error("template {kind}: {message}")]
    Invalid { kind: String, message: String },
    #[error("no template for {0}")]
    Missing(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
}

/// A system speech act, planned by discourse and realized here.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING-KEBAB-CASE")]
pub enum SystemAct {
    Acknowledge,
    ProposeRoute {
        engine: String,
        route: Vec<String>,
        complete: bool,
    },
    ClarifyRoute {
        engine: String,
        from: String,
        to: String,
    },
    ClarifyDest {
        engine: String,
    },
    /// The catch-all response; `quip` picks the error-quip variant set.
    Clarify {
        quip: bool,
    },
    AnnounceCongestion {
        cities: Vec<String>,
        hours: u32,
        reason: String,
    },
    RoutesCross {
        engine: String,
        cities: Vec<String>,
        hours: u32,
    },
    NoPath {
        engine: String,
        from: String,
        to: String,
    },
    NoEngine {
        city: Option<String>,
    },
    ClearRoute {
        engine: String,
    },
    GoalsUnmet {
        cities: Vec<String>,
    },
    Close,
}

impl SystemAct {
    /// Template key for this act's form.
    pub fn form(&self) -> &'static str {
        match self {
            SystemAct::Acknowledge => "ACKNOWLEDGE",
            SystemAct::ProposeRoute { complete: true, .. } => "PROPOSE-ROUTE",
            SystemAct::ProposeRoute { complete: false, .. } => "PROPOSE-PARTIAL",
            SystemAct::ClarifyRoute { .. } => "CLARIFY-ROUTE",
            SystemAct::ClarifyDest { .. } => "CLARIFY-DEST",
            SystemAct::Clarify { quip: false } => "CLARIFY",
            SystemAct::Clarify { quip: true } => "QUIP",
            SystemAct::AnnounceCongestion { .. } => "ANNOUNCE-CONGESTION",
            SystemAct::RoutesCross { .. } => "ROUTES-CROSS",
            SystemAct::NoPath { .. } => "NO-PATH",
            SystemAct::NoEngine { city: Some(_) } => "NO-ENGINE-AT",
            SystemAct::NoEngine { city: None } => "NO-ENGINE",
            SystemAct::ClearRoute { .. } => "CLEAR-ROUTE",
            SystemAct::GoalsUnmet { .. } => "GOALS-UNMET",
            SystemAct::Close => "CLOSE",
        }
    }

    pub fn is_clarification(&self) -> bool {
        matches!(self, SystemAct::Clarify { .. })
    }

    /// Slot values of the act, tagged with their object class.
    fn slots(&self) -> Vec<(&'static str, Filler)> {
        use Filler::*;
        match self {
            SystemAct::Acknowledge | SystemAct::Clarify { .. } | SystemAct::Close => vec![],
            SystemAct::ProposeRoute { engine, route, .. } => vec![
                ("engine", Engine(engine.clone())),
                ("route", Route(route.clone())),
                ("from", City(route.first().cloned().unwrap_or_default())),
                ("to", City(route.last().cloned().unwrap_or_default())),
            ],
            SystemAct::ClarifyRoute { engine, from, to } | SystemAct::NoPath { engine, from, to } => vec![
                ("engine", Engine(engine.clone())),
                ("from", City(from.clone())),
                ("to", City(to.clone())),
            ],
            SystemAct::ClarifyDest { engine } | SystemAct::ClearRoute { engine } => {
                vec![("engine", Engine(engine.clone()))]
            }
            SystemAct::AnnounceCongestion { cities, hours, reason } => vec![
                ("cities", Cities(cities.clone())),
                ("hours", Number(*hours)),
                ("reason", Text(reason.clone())),
            ],
            SystemAct::RoutesCross { engine, cities, hours } => vec![
                ("engine", Engine(engine.clone())),
                ("cities", Cities(cities.clone())),
                ("hours", Number(*hours)),
            ],
            SystemAct::NoEngine { city } => city.iter().map(|c| ("city", City(c.clone()))).collect(),
            SystemAct::GoalsUnmet { cities } => vec![("goals", Goal(cities.clone()))],
        }
    }
}

#[derive(Debug, Clone)]
enum Filler {
    City(String),
    Cities(Vec<String>),
    Engine(String),
    Route(Vec<String>),
    Goal(Vec<String>),
    Number(u32),
    Text(String),
}

impl Filler {
    fn class(&self) -> ObjectClass {
        match self {
            Filler::City(_) | Filler::Cities(_) => ObjectClass::City,
            Filler::Engine(_) => ObjectClass::Engine,
            Filler::Route(_) => ObjectClass::Route,
            Filler::Goal(_) => ObjectClass::Goal,
            Filler::Number(_) => ObjectClass::Number,
            Filler::Text(_) => ObjectClass::Text,
        }
    }
}

/// Commands that drive the map display.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DisplayCommand {
    ShowMap { map: String },
    ShowRoute { engine: String, path: Vec<String> },
    ClearRoute { engine: String },
    MarkCongestion { city: String, hours: u32 },
    HighlightCity { city: String },
    Utterance { speaker: Speaker, text: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Realization {
    pub text: String,
    pub commands: Vec<DisplayCommand>,
}

/// Realizes system acts with a validated template set.
#[derive(Debug, Clone)]
pub struct Generator {
    templates: Templates,
}

impl Generator {
    pub fn new(templates: Templates) -> Self {
        Generator { templates }
    }

    pub fn fixture() -> Self {
        Generator::new(Templates::fixture())
    }

    pub fn templates(&self) -> &Templates {
        &self.templates
    }

    pub fn realize<R: Rng + ?Sized>(&self, act: &SystemAct, world: &World, rng: &mut R) -> Realization {
        let text = match self.templates.get(act.form()) {
            Some(t) => self.fill(t, act, world, rng),
            None => {
                log::warn!("no template for {}; using the generic realization", act.form());
                generic(act, world)
            }
        };
        Realization {
            text,
            commands: commands(act),
        }
    }

    /// Realizes a whole response, joining the texts in order.
    pub fn realize_all<R: Rng + ?Sized>(&self, acts: &[SystemAct], world: &World, rng: &mut R) -> Realization {
        let mut out = Realization {
            text: String::new(),
            commands: Vec::new(),
        };
        for act in acts {
            let r = self.realize(act, world, rng);
            if !r.text.is_empty() {
                if !out.text.is_empty() {
                    out.text.push(' ');
                }
                out.text.push_str(&r.text);
            }
            out.commands.extend(r.commands);
        }
        out
    }

    fn fill<R: Rng + ?Sized>(&self, template: &Template, act: &SystemAct, world: &World, rng: &mut R) -> String {
        let variant = &template.variants[rng.random_range(0..template.variants.len())];
        let slots = act.slots();
        let mut out = String::new();
        for piece in templates::pieces(variant) {
            match piece {
                templates::Piece::Text(t) => out.push_str(t),
                templates::Piece::Slot(name) => {
                    let lower = name.to_ascii_lowercase();
                    let text = if lower == "ack" {
                        self.ack(world, rng)
                    } else {
                        match slots.iter().find(|(s, _)| *s == lower) {
                            Some((_, filler)) => describe(filler, world),
                            None => String::new(),
                        }
                    };
                    if name.starts_with(|c: char| c.is_ascii_uppercase()) {
                        out.push_str(&capitalize(&text));
                    } else {
                        out.push_str(&text);
                    }
                }
            }
        }
        out.trim().to_string()
    }

    fn ack<R: Rng + ?Sized>(&self, world: &World, rng: &mut R) -> String {
        match self.templates.get(SystemAct::Acknowledge.form()) {
            Some(t) => self.fill(t, &SystemAct::Acknowledge, world, rng),
            None => "Okay.".to_string(),
        }
    }
}

/// The description rule for each object class.
fn describe(filler: &Filler, world: &World) -> String {
    let city = |c: &str| world.map.display_name(c);
    match filler {
        Filler::City(c) => city(c),
        Filler::Cities(cs) | Filler::Goal(cs) => describe_list(&cs.iter().map(|c| city(c)).collect::<Vec<_>>()),
        Filler::Engine(e) => match world.engine(e) {
            Some(engine) => format!("the engine at {}", city(&engine.home)),
            None => format!("engine {e}"),
        },
        Filler::Route(path) => match path.as_slice() {
            [] => String::new(),
            [only] => format!("to {}", city(only)),
            [a, b] => format!("from {} to {}", city(a), city(b)),
            [a, mid @ .., b] => format!(
                "from {} through {} to {}",
                city(a),
                describe_list(&mid.iter().map(|c| city(c)).collect::<Vec<_>>()),
                city(b)
            ),
        },
        Filler::Number(n) => number_words(*n),
        Filler::Text(t) => t.clone(),
    }
}

fn generic(act: &SystemAct, world: &World) -> String {
    let parts: Vec<String> = act
        .slots()
        .iter()
        .filter(|(_, f)| f.class() != ObjectClass::Text)
        .map(|(_, f)| describe(f, world))
        .collect();
    if parts.is_empty() {
        "Okay.".to_string()
    } else {
        format!("Okay: {}.", parts.join(", "))
    }
}

fn commands(act: &SystemAct) -> Vec<DisplayCommand> {
    match act {
        SystemAct::ProposeRoute { engine, route, .. } => vec![DisplayCommand::ShowRoute {
            engine: engine.clone(),
            path: route.clone(),
        }],
        SystemAct::ClearRoute { engine } => vec![DisplayCommand::ClearRoute { engine: engine.clone() }],
        SystemAct::AnnounceCongestion { cities, hours, .. } => cities
            .iter()
            .map(|c| DisplayCommand::MarkCongestion {
                city: c.clone(),
                hours: *hours,
            })
            .collect(),
        SystemAct::RoutesCross { cities, .. } => cities
            .iter()
            .map(|c| DisplayCommand::HighlightCity { city: c.clone() })
            .collect(),
        SystemAct::NoEngine { city: Some(c) } => vec![DisplayCommand::HighlightCity { city: c.clone() }],
        _ => Vec::new(),
    }
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

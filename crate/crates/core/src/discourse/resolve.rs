use serde::Serialize;

use super::{ContentKind, DiscourseState};
use crate::grammar::{ActType, SpeechAct};
use crate::solver::{ProblemState, Request, World};

/// Annotation prefix for references that could not be grounded.
pub const UNRESOLVED: &str = "UNRESOLVED";

/// Act content grounded to engine and city ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Content {
    pub engine: Option<String>,
    pub origin: Option<String>,
    pub dest: Option<String>,
    pub via: Vec<String>,
    pub avoid: Vec<String>,
    pub clear: bool,
    pub done: bool,
    pub garbled: bool,
}

impl Content {
    pub fn has_route(&self) -> bool {
        self.origin.is_some() || self.dest.is_some() || !self.via.is_empty() || !self.avoid.is_empty()
    }

    pub fn request(&self) -> Request {
        Request {
            engine: self.engine.clone(),
            origin: self.origin.clone(),
            dest: self.dest.clone(),
            via: self.via.clone(),
            avoid: self.avoid.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolvedAct {
    pub act_type: ActType,
    /// The force the parser assigned, before any refinement.
    pub parsed_type: ActType,
    pub content: Content,
    pub kind: ContentKind,
    /// One `UNRESOLVED slot=value` note per reference left ungrounded.
    pub unresolved: Vec<String>,
    pub start: usize,
    pub end: usize,
}

/// Grounds the act's noun phrases and refines its force.
///
/// Force only moves up in specificity: a TELL carrying route content is
/// taken as a SUGGEST. Acts are never merged.
pub fn resolve_references(act: &SpeechAct, state: &DiscourseState, ps: &ProblemState, world: &World) -> ResolvedAct {
    let frame = &act.content;
    let mut unresolved = Vec::new();
    let mut note = |slot: &str, value: &str| unresolved.push(format!("{UNRESOLVED} {slot}={value}"));
    let mut city = |slot: &str, value: Option<&str>| -> Option<String> {
        let v = value?;
        if world.map.contains(v) {
            Some(v.to_string())
        } else {
            note(slot, v);
            None
        }
    };

    let mut content = Content {
        origin: city("origin", frame.atom("origin")),
        dest: city("dest", frame.atom("dest")),
        clear: frame.has("clear"),
        done: frame.has("done"),
        garbled: act.is_garbled(),
        ..Content::default()
    };
    for c in frame.list("via") {
        if let Some(c) = city("via", Some(&c)) {
            content.via.push(c);
        }
    }
    for c in frame.list("avoid") {
        if let Some(c) = city("avoid", Some(&c)) {
            content.avoid.push(c);
        }
    }

    let recent = || {
        state
            .recent()
            .into_iter()
            .chain(ps.focus.as_deref())
            .find(|id| world.engine(id).is_some())
            .map(str::to_string)
    };
    if let Some(at) = frame.atom("engine_at") {
        match engine_at(world, at) {
            Some(e) => content.engine = Some(e),
            None if world.map.contains(at) => {
                // lets the solver report that nothing stands there
                content.origin.get_or_insert_with(|| at.to_string());
            }
            None => note("engine_at", at),
        }
    } else if let Some(r) = frame.atom("route_of") {
        let found = if r == "CURRENT" {
            state.focus().map(str::to_string).or_else(|| ps.focus.clone())
        } else {
            engine_at(world, r)
        };
        match found {
            Some(e) => content.engine = Some(e),
            None => note("route_of", r),
        }
    } else if frame.atom("engine") == Some("LAST") {
        let idle: Vec<&str> = world
            .engines
            .iter()
            .filter(|e| e.route.is_none() && ps.goal(&e.id).is_none())
            .map(|e| e.id.as_str())
            .collect();
        match idle.as_slice() {
            [only] => content.engine = Some(only.to_string()),
            _ => match recent() {
                Some(e) => content.engine = Some(e),
                None => note("engine", "LAST"),
            },
        }
    }

    let kind = if act.start == act.end {
        ContentKind::Nothing
    } else if content.garbled {
        ContentKind::Garbled
    } else if content.done {
        ContentKind::Done
    } else if content.clear {
        ContentKind::Clear
    } else if content.has_route() {
        ContentKind::Route
    } else if content.engine.is_some() {
        ContentKind::Engine
    } else {
        ContentKind::Empty
    };
    let act_type = match (act.act_type, kind) {
        (ActType::Tell, ContentKind::Route) => ActType::Suggest,
        (t, _) => t,
    };
    ResolvedAct {
        act_type,
        parsed_type: act.act_type,
        content,
        kind,
        unresolved,
        start: act.start,
        end: act.end,
    }
}

/// The engine standing at `city`, else the one that started there.
fn engine_at(world: &World, city: &str) -> Option<String> {
    world
        .engines
        .iter()
        .find(|e| e.current() == city)
        .or_else(|| world.engines.iter().find(|e| e.home == city))
        .map(|e| e.id.clone())
}

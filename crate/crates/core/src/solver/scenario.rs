use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{CongestionEvent, Engine, RouteMap, SolverError, World};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnginePlacement {
    pub id: String,
    pub home: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub goals: Vec<String>,
    #[serde(rename = "engine")]
    pub engines: Vec<EnginePlacement>,
    #[serde(rename = "event", default)]
    pub events: Vec<CongestionEvent>,
}

const BUILTIN: &[(&str, &str)] = &[
    ("trains95", include_str!("../../data/scenarios/trains95.toml")),
    ("keyboard", include_str!("../../data/scenarios/keyboard.toml")),
];

impl Scenario {
    pub fn builtin_names() -> Vec<&'static str> {
        BUILTIN.iter().map(|(n, _)| *n).collect()
    }

    pub fn builtin(name: &str) -> Option<Scenario> {
        BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| Scenario::parse(text).expect("bundled scenario is valid"))
    }

    pub fn parse(text: &str) -> Result<Scenario, SolverError> {
        toml::from_str(text).map_err(|e| SolverError::Format(e.to_string()))
    }

    /// Checks the scenario against a map: known cities, unique engines, no
    /// more goals than engines.
    pub fn validate(&self, map: &RouteMap) -> Result<(), SolverError> {
        let invalid = |m: String| Err(SolverError::InvalidScenario(m));
        if self.engines.is_empty() {
            return invalid("no engines".into());
        }
        let mut ids = BTreeSet::new();
        for e in &self.engines {
            if !ids.insert(&e.id) {
                return invalid(format!("duplicate engine {}", e.id));
            }
            map.check(&e.home)?;
        }
        let goals: BTreeSet<&String> = self.goals.iter().collect();
        if goals.len() != self.goals.len() {
            return invalid("duplicate goal city".into());
        }
        if self.goals.len() > self.engines.len() {
            return invalid(format!(
                "{} goals but only {} engines",
                self.goals.len(),
                self.engines.len()
            ));
        }
        for g in &self.goals {
            map.check(g)?;
        }
        for ev in &self.events {
            for c in &ev.cities {
                map.check(c)?;
            }
        }
        Ok(())
    }

    pub fn world(&self, map: Arc<RouteMap>) -> Result<World, SolverError> {
        self.validate(&map)?;
        Ok(World {
            map,
            engines: self
                .engines
                .iter()
                .map(|e| Engine {
                    id: e.id.clone(),
                    home: e.home.clone(),
                    route: None,
                })
                .collect(),
            goals: self.goals.clone(),
            congested: BTreeMap::new(),
        })
    }

    pub fn events_at(&self, turn: usize) -> impl Iterator<Item = &CongestionEvent> {
        self.events.iter().filter(move |e| e.turn == turn)
    }
}

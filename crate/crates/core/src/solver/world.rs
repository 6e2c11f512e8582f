use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{RouteMap, SolverError};

/// Extra hours for every city a route shares with another assigned route.
pub const CROSS_PENALTY_HOURS: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Engine {
    pub id: String,
    pub home: String,
    /// Assigned route, starting at `home` or at an earlier route's end.
    pub route: Option<Vec<String>>,
}

impl Engine {
    /// Where the engine is, taking its assigned route as travelled.
    pub fn current(&self) -> &str {
        self.route
            .as_ref()
            .and_then(|r| r.last())
            .map(String::as_str)
            .unwrap_or(&self.home)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongestionEvent {
    /// User turn (0-based) before whose interpretation the event fires.
    pub turn: usize,
    pub cities: Vec<String>,
    pub hours: u32,
    #[serde(default)]
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Score {
    pub hours: u32,
    /// False when some goal city has no engine; the hours are then partial.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct World {
    #[serde(skip)]
    pub map: Arc<RouteMap>,
    pub engines: Vec<Engine>,
    pub goals: Vec<String>,
    pub congested: BTreeMap<String, u32>,
}

impl World {
    pub fn engine(&self, id: &str) -> Option<&Engine> {
        self.engines.iter().find(|e| e.id == id)
    }

    pub fn engine_mut(&mut self, id: &str) -> Option<&mut Engine> {
        self.engines.iter_mut().find(|e| e.id == id)
    }

    pub fn engines_at(&self, city: &str) -> Vec<&Engine> {
        self.engines.iter().filter(|e| e.current() == city).collect()
    }

    /// Assigns a route; a single-city route means no route.
    pub fn assign(&mut self, engine: &str, route: Vec<String>) -> Result<(), SolverError> {
        for w in route.windows(2) {
            if self.map.hours(&w[0], &w[1]).is_none() {
                return Err(SolverError::InvalidRoute(format!("{} and {} are not adjacent", w[0], w[1])));
            }
        }
        let e = self
            .engine_mut(engine)
            .ok_or_else(|| SolverError::UnknownEngine(engine.to_string()))?;
        e.route = (route.len() > 1).then_some(route);
        Ok(())
    }

    pub fn clear_route(&mut self, engine: &str) -> Result<(), SolverError> {
        self.assign(engine, Vec::new())
    }

    /// Cities on this engine's route that also lie on another assigned route.
    pub fn crossings(&self, engine: &str) -> BTreeSet<String> {
        let Some(route) = self.engine(engine).and_then(|e| e.route.as_ref()) else {
            return BTreeSet::new();
        };
        let others: BTreeSet<&String> = self
            .engines
            .iter()
            .filter(|e| e.id != engine)
            .filter_map(|e| e.route.as_ref())
            .flatten()
            .collect();
        route.iter().filter(|c| others.contains(c)).cloned().collect()
    }

    /// Track hours plus congestion at every city on the path (endpoints
    /// included) plus the crossing penalty per shared city.
    pub fn route_hours(&self, engine: &str) -> u32 {
        let Some(route) = self.engine(engine).and_then(|e| e.route.as_ref()) else {
            return 0;
        };
        let base = self.map.path_hours(route).unwrap_or(0);
        let congestion: u32 = route.iter().filter_map(|c| self.congested.get(c)).sum();
        base + congestion + CROSS_PENALTY_HOURS * self.crossings(engine).len() as u32
    }

    pub fn goals_met(&self) -> bool {
        self.goals
            .iter()
            .all(|g| self.engines.iter().any(|e| e.current() == g))
    }

    pub fn unmet_goals(&self) -> Vec<String> {
        self.goals
            .iter()
            .filter(|g| !self.engines.iter().any(|e| e.current() == g.as_str()))
            .cloned()
            .collect()
    }

    pub fn score(&self) -> Score {
        Score {
            hours: self.engines.iter().map(|e| self.route_hours(&e.id)).sum(),
            complete: self.goals_met(),
        }
    }

    /// Sets the congestion of each event city; applying twice is harmless.
    pub fn apply_event(&mut self, event: &CongestionEvent) -> Result<(), SolverError> {
        for c in &event.cities {
            self.map.check(c)?;
        }
        for c in &event.cities {
            self.congested.insert(c.clone(), event.hours);
        }
        Ok(())
    }
}

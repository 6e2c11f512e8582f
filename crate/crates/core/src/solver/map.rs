use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::SolverError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct City {
    pub id: String,
    pub name: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Track {
    pub a: String,
    pub b: String,
    #[serde(default = "one_hour")]
    pub hours: u32,
}

fn one_hour() -> u32 {
    1
}

#[derive(Deserialize)]
struct MapFile {
    name: String,
    city: Vec<City>,
    track: Vec<Track>,
}

/// Cities and undirected tracks. Immutable once loaded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteMap {
    pub name: String,
    pub cities: BTreeMap<String, City>,
    pub tracks: Vec<Track>,
    #[serde(skip)]
    adjacency: BTreeMap<String, BTreeMap<String, u32>>,
}

/// The map shipped with the crate.
pub const FIXTURE_MAP: &str = include_str!("../../data/map.toml");

impl RouteMap {
    pub fn fixture() -> RouteMap {
        RouteMap::parse(FIXTURE_MAP).expect("bundled map is valid")
    }

    pub fn parse(text: &str) -> Result<RouteMap, SolverError> {
        let file: MapFile = toml::from_str(text).map_err(|e| SolverError::Format(e.to_string()))?;
        RouteMap::new(file.name, file.city, file.track)
    }

    /// Validates and indexes a map: ids unique, tracks between distinct
    /// known cities with positive hours, no duplicate tracks, connected.
    pub fn new(name: String, cities: Vec<City>, tracks: Vec<Track>) -> Result<RouteMap, SolverError> {
        let invalid = |m: String| Err(SolverError::InvalidMap(m));
        let mut by_id = BTreeMap::new();
        for c in cities {
            if by_id.contains_key(&c.id) {
                return invalid(format!("duplicate city {}", c.id));
            }
            by_id.insert(c.id.clone(), c);
        }
        if by_id.is_empty() {
            return invalid("no cities".into());
        }
        let mut adjacency: BTreeMap<String, BTreeMap<String, u32>> =
            by_id.keys().map(|k| (k.clone(), BTreeMap::new())).collect();
        for t in &tracks {
            for end in [&t.a, &t.b] {
                if !by_id.contains_key(end) {
                    return invalid(format!("track to unknown city {end}"));
                }
            }
            if t.a == t.b {
                return invalid(format!("track from {} to itself", t.a));
            }
            if t.hours == 0 {
                return invalid(format!("track {}-{} takes no time", t.a, t.b));
            }
            if adjacency[&t.a].contains_key(&t.b) {
                return invalid(format!("duplicate track {}-{}", t.a, t.b));
            }
            adjacency.get_mut(&t.a).unwrap().insert(t.b.clone(), t.hours);
            adjacency.get_mut(&t.b).unwrap().insert(t.a.clone(), t.hours);
        }
        let map = RouteMap {
            name,
            cities: by_id,
            tracks,
            adjacency,
        };
        let first = map.cities.keys().next().unwrap();
        if map.reachable(first, &BTreeSet::new()).len() != map.cities.len() {
            return invalid("track graph is not connected".into());
        }
        Ok(map)
    }

    pub fn contains(&self, city: &str) -> bool {
        self.cities.contains_key(city)
    }

    pub fn check(&self, city: &str) -> Result<(), SolverError> {
        if self.contains(city) {
            Ok(())
        } else {
            Err(SolverError::UnknownCity(city.to_string()))
        }
    }

    pub fn neighbors(&self, city: &str) -> impl Iterator<Item = (&str, u32)> + '_ {
        self.adjacency
            .get(city)
            .into_iter()
            .flatten()
            .map(|(c, h)| (c.as_str(), *h))
    }

    pub fn hours(&self, a: &str, b: &str) -> Option<u32> {
        self.adjacency.get(a)?.get(b).copied()
    }

    /// Sum of track hours along `path`; `None` if two consecutive cities are
    /// not joined by a track.
    pub fn path_hours(&self, path: &[String]) -> Option<u32> {
        path.windows(2).map(|w| self.hours(&w[0], &w[1])).sum()
    }

    /// Cities reachable from `from` without entering `avoid`.
    pub fn reachable(&self, from: &str, avoid: &BTreeSet<String>) -> BTreeSet<String> {
        let mut seen = BTreeSet::from([from.to_string()]);
        let mut queue = VecDeque::from([from.to_string()]);
        while let Some(c) = queue.pop_front() {
            for (n, _) in self.neighbors(&c) {
                if !avoid.contains(n) && seen.insert(n.to_string()) {
                    queue.push_back(n.to_string());
                }
            }
        }
        seen
    }

    pub fn display_name(&self, city: &str) -> String {
        self.cities
            .get(city)
            .map(|c| c.name.clone())
            .unwrap_or_else(|| city.to_string())
    }
}

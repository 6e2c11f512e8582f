//! The deliberately weak route planner: legs of at most four hops, chosen
//! uniformly at random among every admissible acyclic path.

use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use super::RouteMap;

pub const MAX_LEG_HOPS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Route {
    pub path: Vec<String>,
}

impl Route {
    pub fn hops(&self) -> usize {
        self.path.len().saturating_sub(1)
    }

    pub fn from(&self) -> &str {
        &self.path[0]
    }

    pub fn to(&self) -> &str {
        self.path.last().expect("routes are never empty")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    /// Every route needs a leg longer than the planner will search. `partial`
    /// reaches the furthest via city that could be reached, if any.
    #[error("no route within {MAX_LEG_HOPS} hops per leg")]
    TooLong { partial: Option<Vec<String>> },
    #[error("no path at all")]
    NoPath,
    #[error("unknown city {0}")]
    UnknownCity(String),
}

/// Every acyclic path of at most `max_hops` hops from `from` to `to` that
/// stays out of `avoid`, in lexicographic order.
pub fn paths_within(
    map: &RouteMap,
    from: &str,
    to: &str,
    max_hops: usize,
    avoid: &BTreeSet<String>,
) -> Vec<Vec<String>> {
    fn walk(
        map: &RouteMap,
        to: &str,
        max_hops: usize,
        avoid: &BTreeSet<String>,
        path: &mut Vec<String>,
        out: &mut Vec<Vec<String>>,
    ) {
        let here = path.last().unwrap().clone();
        if here == to {
            out.push(path.clone());
            return;
        }
        if path.len() > max_hops {
            return;
        }
        for (next, _) in map.neighbors(&here) {
            if avoid.contains(next) && next != to || path.iter().any(|c| c == next) {
                continue;
            }
            path.push(next.to_string());
            walk(map, to, max_hops, avoid, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    walk(map, to, max_hops, avoid, &mut vec![from.to_string()], &mut out);
    out.sort();
    out
}

/// Concatenations of legs through `stops`, each leg within the hop limit and
/// the whole route acyclic.
fn concatenations(map: &RouteMap, stops: &[String], avoid: &BTreeSet<String>) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut route = vec![stops[0].clone()];
    fn extend(
        map: &RouteMap,
        stops: &[String],
        avoid: &BTreeSet<String>,
        route: &mut Vec<String>,
        out: &mut Vec<Vec<String>>,
    ) {
        if stops.len() == 1 {
            out.push(route.clone());
            return;
        }
        let next = &stops[1];
        if route.contains(next) {
            return;
        }
        let mut blocked = avoid.clone();
        blocked.extend(route.iter().cloned());
        blocked.extend(stops[2..].iter().cloned());
        for leg in paths_within(map, &stops[0], next, MAX_LEG_HOPS, &blocked) {
            let len = route.len();
            route.extend(leg.into_iter().skip(1));
            extend(map, &stops[1..], avoid, route, out);
            route.truncate(len);
        }
    }
    extend(map, stops, avoid, &mut route, &mut out);
    out.sort();
    out
}

fn stops(from: &str, to: &str, via: &[String]) -> Vec<String> {
    let mut stops = vec![from.to_string()];
    for v in via {
        if v != from && v != to && !stops.contains(v) {
            stops.push(v.clone());
        }
    }
    stops.push(to.to_string());
    stops
}

/// Every route the planner may return for this query.
pub fn admissible_routes(
    map: &RouteMap,
    from: &str,
    to: &str,
    via: &[String],
    avoid: &BTreeSet<String>,
) -> Vec<Vec<String>> {
    if from == to && via.is_empty() {
        return vec![vec![from.to_string()]];
    }
    let stops = stops(from, to, via);
    let avoid = without(avoid, &stops);
    concatenations(map, &stops, &avoid)
}

fn without(avoid: &BTreeSet<String>, keep: &[String]) -> BTreeSet<String> {
    avoid.iter().filter(|c| !keep.contains(c)).cloned().collect()
}

/// Plans a route from `from` to `to` through `via` in order, avoiding
/// `avoid` (the query's own stops are never avoided). Picks uniformly among
/// all admissible routes.
pub fn plan_route<R: Rng + ?Sized>(
    map: &RouteMap,
    from: &str,
    to: &str,
    via: &[String],
    avoid: &BTreeSet<String>,
    rng: &mut R,
) -> Result<Route, PlanError> {
    for c in [from, to].into_iter().chain(via.iter().map(String::as_str)) {
        if !map.contains(c) {
            return Err(PlanError::UnknownCity(c.to_string()));
        }
    }
    let routes = admissible_routes(map, from, to, via, avoid);
    if !routes.is_empty() {
        let pick = rng.random_range(0..routes.len());
        return Ok(Route {
            path: routes[pick].clone(),
        });
    }
    let stops = stops(from, to, via);
    let avoid = without(avoid, &stops);
    if !map.reachable(from, &avoid).contains(to) {
        return Err(PlanError::NoPath);
    }
    // the longest prefix of stops that can still be reached
    for k in (1..stops.len() - 1).rev() {
        let prefixes = concatenations(map, &stops[..=k], &avoid);
        if !prefixes.is_empty() {
            let pick = rng.random_range(0..prefixes.len());
            return Err(PlanError::TooLong {
                partial: Some(prefixes[pick].clone()),
            });
        }
    }
    Err(PlanError::TooLong { partial: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn none() -> BTreeSet<String> {
        BTreeSet::new()
    }

    #[test]
    fn same_city_is_a_zero_hop_route() {
        let map = RouteMap::fixture();
        let r = plan_route(&map, "BOSTON", "BOSTON", &[], &none(), &mut rng(1)).unwrap();
        assert_eq!(r.path, vec!["BOSTON"]);
        assert_eq!(r.hops(), 0);
        assert_eq!(map.path_hours(&r.path), Some(0));
    }

    #[test]
    fn detroit_to_washington_is_too_long() {
        let map = RouteMap::fixture();
        let e = plan_route(&map, "DETROIT", "WASHINGTON", &[], &none(), &mut rng(1)).unwrap_err();
        assert_eq!(e, PlanError::TooLong { partial: None });
    }

    #[test]
    fn via_cities_are_visited_in_order() {
        let map = RouteMap::fixture();
        let via = vec!["TOLEDO".to_string(), "PITTSBURGH".to_string()];
        for seed in 0..50 {
            let r = plan_route(&map, "DETROIT", "WASHINGTON", &via, &none(), &mut rng(seed)).unwrap();
            let t = r.path.iter().position(|c| c == "TOLEDO").unwrap();
            let p = r.path.iter().position(|c| c == "PITTSBURGH").unwrap();
            assert!(t < p);
            assert_eq!(r.from(), "DETROIT");
            assert_eq!(r.to(), "WASHINGTON");
        }
    }

    #[test]
    fn unreachable_via_leg_gives_a_partial_route() {
        let map = RouteMap::fixture();
        let via = vec!["MONTREAL".to_string()];
        let e = plan_route(&map, "TORONTO", "WASHINGTON", &via, &none(), &mut rng(3)).unwrap_err();
        assert_eq!(
            e,
            PlanError::TooLong {
                partial: Some(vec!["TORONTO".into(), "MONTREAL".into()])
            }
        );
    }

    #[test]
    fn walled_off_destination_has_no_path() {
        let map = RouteMap::fixture();
        let avoid: BTreeSet<String> = ["CHICAGO".to_string()].into();
        let e = plan_route(&map, "DETROIT", "MILWAUKEE", &[], &avoid, &mut rng(1)).unwrap_err();
        assert_eq!(e, PlanError::NoPath);
        let e = plan_route(&map, "DETROIT", "NOWHERE", &[], &none(), &mut rng(1)).unwrap_err();
        assert_eq!(e, PlanError::UnknownCity("NOWHERE".into()));
    }

    #[test]
    fn avoided_cities_stay_off_the_route() {
        let map = RouteMap::fixture();
        let avoid: BTreeSet<String> = ["SCRANTON".to_string(), "BALTIMORE".to_string()].into();
        for seed in 0..50 {
            let r = plan_route(&map, "PITTSBURGH", "WASHINGTON", &[], &avoid, &mut rng(seed)).unwrap();
            assert!(r.path.iter().all(|c| !avoid.contains(c)));
        }
    }
}

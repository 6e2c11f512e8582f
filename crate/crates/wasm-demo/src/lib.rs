//! Browser demo: parse an utterance, post-correct recognizer output and
//! plan a route on the bundled map.

use std::cell::OnceCell;
use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use trains_core::corpus::{join, tokenize};
use trains_core::grammar::Grammar;
use trains_core::solver::{plan_route, PlanError, RouteMap};
use trains_core::speechpp::fixture::fixture_corrector;
use trains_core::speechpp::PostCorrector;
use wasm_bindgen::prelude::*;

thread_local! {
    static GRAMMAR: OnceCell<Grammar> = const { OnceCell::new() };
    static MAP: OnceCell<RouteMap> = const { OnceCell::new() };
    static CORRECTOR: OnceCell<PostCorrector> = const { OnceCell::new() };
}

fn with_map<T>(f: impl FnOnce(&RouteMap) -> T) -> T {
    MAP.with(|m| f(m.get_or_init(RouteMap::fixture)))
}

/// Cities and tracks of the bundled map, as JSON.
#[wasm_bindgen]
pub fn map_json() -> String {
    with_map(|m| serde_json::to_string(m).expect("map serializes"))
}

/// Speech acts found in `text`, as JSON.
#[wasm_bindgen]
pub fn parse(text: &str) -> String {
    GRAMMAR.with(|g| {
        let seq = g.get_or_init(Grammar::fixture).interpret(&tokenize(text));
        serde_json::to_string(&seq).expect("acts serialize")
    })
}

/// Recognizer output rewritten by the post-corrector. The models are
/// trained on first use.
#[wasm_bindgen]
pub fn correct(text: &str) -> String {
    CORRECTOR.with(|c| {
        let c = c.get_or_init(fixture_corrector);
        match c.correct(&tokenize(text)) {
            Ok(out) => join(&out.tokens),
            Err(e) => format!("error: {e}"),
        }
    })
}

fn city_id(map: &RouteMap, name: &str) -> Result<String, String> {
    let wanted = name.trim().to_uppercase().replace(' ', "_");
    if map.contains(&wanted) {
        return Ok(wanted);
    }
    map.cities
        .values()
        .find(|c| c.name.eq_ignore_ascii_case(name.trim()))
        .map(|c| c.id.clone())
        .ok_or_else(|| format!("unknown city {name:?}"))
}

/// Plans a route; `via` is a comma-separated list. Returns JSON with either
/// `path` and `hours` or `error` (and a `partial` path when one exists).
#[wasm_bindgen]
pub fn plan(from: &str, to: &str, via: &str, seed: u64) -> String {
    with_map(|map| {
        let ids = || -> Result<(String, String, Vec<String>), String> {
            let via = via
                .split(',')
                .filter(|v| !v.trim().is_empty())
                .map(|v| city_id(map, v))
                .collect::<Result<_, _>>()?;
            Ok((city_id(map, from)?, city_id(map, to)?, via))
        };
        let (from, to, via) = match ids() {
            Ok(x) => x,
            Err(e) => return json!({ "error": e }).to_string(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match plan_route(map, &from, &to, &via, &BTreeSet::new(), &mut rng) {
            Ok(r) => json!({ "path": r.path, "hours": map.path_hours(&r.path) }).to_string(),
            Err(PlanError::TooLong { partial }) => {
                json!({ "error": PlanError::TooLong { partial: None }.to_string(), "partial": partial }).to_string()
            }
            Err(e) => json!({ "error": e.to_string() }).to_string(),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn city_names_resolve_case_insensitively() {
        with_map(|m| {
            assert_eq!(city_id(m, "new york").unwrap(), "NEW_YORK");
            assert!(city_id(m, "Atlantis").is_err());
        });
    }
}

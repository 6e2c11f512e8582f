use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trains_core::solver::{
    admissible_routes, paths_within, plan_route, Branch, Outcome, PlanError, ProblemState, Request,
    RouteMap, Scenario, World, MAX_LEG_HOPS,
};

fn map() -> &'static RouteMap {
    static M: std::sync::OnceLock<RouteMap> = std::sync::OnceLock::new();
    M.get_or_init(RouteMap::fixture)
}

fn s(c: &str) -> String {
    c.to_string()
}

/// Layer-by-layer enumeration of simple paths, independent of the planner's
/// depth-first search.
fn oracle_paths(from: &str, to: &str, max_hops: usize, avoid: &BTreeSet<String>) -> Vec<Vec<String>> {
    let mut found = Vec::new();
    let mut layer = vec![vec![s(from)]];
    for _ in 0..max_hops {
        let mut next = Vec::new();
        for p in layer {
            if p.last().unwrap() == to {
                found.push(p);
                continue;
            }
            for t in &map().tracks {
                let last = p.last().unwrap();
                let n = if &t.a == last {
                    &t.b
                } else if &t.b == last {
                    &t.a
                } else {
                    continue;
                };
                if !p.contains(n) && (n == to || !avoid.contains(n)) {
                    let mut q = p.clone();
                    q.push(n.clone());
                    next.push(q);
                }
            }
        }
        layer = next;
    }
    found.extend(layer.into_iter().filter(|p| p.last().unwrap() == to));
    found.sort();
    found.dedup();
    found
}

fn shortest_hops(from: &str, to: &str) -> Option<usize> {
    (0..map().cities.len()).find(|&k| !oracle_paths(from, to, k, &BTreeSet::new()).is_empty())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn leg_enumeration_matches_the_oracle_for_every_pair() {
    let none = BTreeSet::new();
    let cities: Vec<&String> = map().cities.keys().collect();
    for a in &cities {
        for b in &cities {
            let got = paths_within(map(), a, b, MAX_LEG_HOPS, &none);
            assert_eq!(got, oracle_paths(a, b, MAX_LEG_HOPS, &none), "{a} -> {b}");
            assert!(got.iter().all(|p| p.len() - 1 <= MAX_LEG_HOPS));
        }
    }
}

#[test]
fn avoided_enumeration_matches_the_oracle() {
    let avoid: BTreeSet<String> = [s("SCRANTON"), s("BALTIMORE"), s("TORONTO")].into();
    for (a, b) in [("PITTSBURGH", "WASHINGTON"), ("DETROIT", "BUFFALO"), ("ALBANY", "PHILADELPHIA")] {
        assert_eq!(paths_within(map(), a, b, MAX_LEG_HOPS, &avoid), oracle_paths(a, b, MAX_LEG_HOPS, &avoid));
    }
}

#[test]
fn fixture_map_reproduces_the_planner_failures() {
    for (a, b) in [("DETROIT", "WASHINGTON"), ("MONTREAL", "LEXINGTON"), ("ALBANY", "MILWAUKEE")] {
        assert_eq!(shortest_hops(a, b), Some(5), "{a} -> {b}");
        assert!(oracle_paths(a, b, MAX_LEG_HOPS, &BTreeSet::new()).is_empty());
        assert_eq!(
            plan_route(map(), a, b, &[], &BTreeSet::new(), &mut rng(0)),
            Err(PlanError::TooLong { partial: None })
        );
    }
}

#[test]
fn albany_to_milwaukee_via_buffalo_has_both_variants() {
    let routes = admissible_routes(map(), "ALBANY", "MILWAUKEE", &[s("BUFFALO")], &BTreeSet::new());
    let through = |c: &str| routes.iter().any(|r| r.iter().any(|x| x == c));
    assert!(through("TORONTO"));
    assert!(through("SYRACUSE"));
}

#[test]
fn selection_is_uniform_over_admissible_routes() {
    let (from, to) = ("PITTSBURGH", "WASHINGTON");
    let none = BTreeSet::new();
    let routes = oracle_paths(from, to, MAX_LEG_HOPS, &none);
    let k = routes.len();
    assert!(k >= 3, "query should have several routes, has {k}");
    let n = 10_000u64;
    let mut counts = vec![0u64; k];
    for seed in 0..n {
        let r = plan_route(map(), from, to, &[], &none, &mut rng(seed)).unwrap();
        counts[routes.iter().position(|p| *p == r.path).unwrap()] += 1;
    }
    let p = 1.0 / k as f64;
    let sigma = (n as f64 * p * (1.0 - p)).sqrt();
    for c in counts {
        assert!((c as f64 - n as f64 * p).abs() <= 3.0 * sigma, "count {c} of {n} for k={k}");
    }
}

#[test]
fn same_seed_same_route() {
    let via = [s("TOLEDO"), s("PITTSBURGH")];
    let none = BTreeSet::new();
    for seed in 0..20 {
        assert_eq!(
            plan_route(map(), "DETROIT", "WASHINGTON", &via, &none, &mut rng(seed)),
            plan_route(map(), "DETROIT", "WASHINGTON", &via, &none, &mut rng(seed))
        );
    }
}

fn city() -> impl Strategy<Value = String> {
    let names: Vec<String> = map().cities.keys().cloned().collect();
    prop::sample::select(names)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn returned_routes_are_sound(from in city(), to in city(), via in prop::collection::vec(city(), 0..3), seed in 0u64..1000) {
        match plan_route(map(), &from, &to, &via, &BTreeSet::new(), &mut rng(seed)) {
            Ok(r) => {
                prop_assert_eq!(r.from(), from.as_str());
                prop_assert_eq!(r.to(), to.as_str());
                let unique: BTreeSet<&String> = r.path.iter().collect();
                prop_assert_eq!(unique.len(), r.path.len());
                prop_assert!(map().path_hours(&r.path).is_some());
                // via cities appear in the requested order
                let mut last = 0;
                for v in via.iter().filter(|v| **v != from && **v != to) {
                    let at = r.path.iter().position(|c| c == v);
                    prop_assert!(at.is_some());
                    prop_assert!(at.unwrap() >= last);
                    last = at.unwrap();
                }
                if via.is_empty() {
                    prop_assert!(r.hops() <= MAX_LEG_HOPS);
                }
            }
            Err(PlanError::TooLong { partial }) => {
                if via.is_empty() {
                    prop_assert!(oracle_paths(&from, &to, MAX_LEG_HOPS, &BTreeSet::new()).is_empty());
                }
                if let Some(p) = partial {
                    prop_assert_eq!(p[0].as_str(), from.as_str());
                    prop_assert!(map().path_hours(&p).is_some());
                }
            }
            Err(e) => prop_assert!(false, "unexpected {:?}", e),
        }
    }

    #[test]
    fn score_is_the_sum_of_route_hours(seed in 0u64..500) {
        let mut w = trains95();
        let mut r = rng(seed);
        for (e, from, to) in [("E1", "DETROIT", "CHICAGO"), ("E2", "MONTREAL", "ALBANY"), ("E3", "ALBANY", "SCRANTON")] {
            let route = plan_route(map(), from, to, &[], &BTreeSet::new(), &mut r).unwrap();
            w.assign(e, route.path).unwrap();
        }
        let total: u32 = w.engines.iter().map(|e| w.route_hours(&e.id)).sum();
        prop_assert_eq!(w.score().hours, total);
    }
}

fn trains95() -> World {
    Scenario::builtin("trains95")
        .unwrap()
        .world(Arc::new(RouteMap::fixture()))
        .unwrap()
}

fn req(origin: Option<&str>, dest: Option<&str>, via: &[&str]) -> Request {
    Request {
        engine: None,
        origin: origin.map(s),
        dest: dest.map(s),
        via: via.iter().map(|c| s(c)).collect(),
        avoid: Vec::new(),
    }
}

#[test]
fn repeated_request_from_a_left_origin_is_a_correction_avoiding_delays() {
    let scenario = Scenario::builtin("trains95").unwrap();
    for seed in 0..40 {
        let mut world = trains95();
        let mut ps = ProblemState::default();
        let mut r = rng(seed);
        let first = ps.incorporate(&req(Some("DETROIT"), Some("WASHINGTON"), &[]), &mut world, &mut r);
        assert_eq!(first.branch, Branch::NewGoal);
        assert!(matches!(first.outcome, Outcome::NeedRoute { .. }));
        let second = ps.incorporate(&req(None, None, &["TOLEDO", "PITTSBURGH"]), &mut world, &mut r);
        assert!(matches!(second.outcome, Outcome::Proposed { complete: true, .. }));
        for ev in scenario.events_at(1) {
            world.apply_event(ev).unwrap();
        }
        let third = ps.incorporate(&req(Some("DETROIT"), Some("WASHINGTON"), &[]), &mut world, &mut r);
        assert_eq!(third.branch, Branch::Correction);
        let Outcome::Proposed { route, complete: true, .. } = third.outcome else {
            panic!("seed {seed}: {third:?}");
        };
        assert_eq!(route.first().unwrap(), "DETROIT");
        assert_eq!(route.last().unwrap(), "WASHINGTON");
        assert!(!route.iter().any(|c| c == "SCRANTON" || c == "BALTIMORE"), "{route:?}");
    }
}

#[test]
fn via_fragment_constrains_the_open_goal() {
    let mut world = trains95();
    let mut ps = ProblemState::default();
    let mut r = rng(9);
    let mut albany = req(Some("ALBANY"), Some("MILWAUKEE"), &[]);
    albany.engine = Some(s("E3"));
    let first = ps.incorporate(&albany, &mut world, &mut r);
    assert_eq!(first.branch, Branch::NewGoal);
    let via = ps.incorporate(&req(None, None, &["BUFFALO"]), &mut world, &mut r);
    assert_eq!(via.branch, Branch::Extension);
    let Outcome::Proposed { engine, route, .. } = via.outcome else {
        panic!("{via:?}");
    };
    assert_eq!(engine, "E3");
    assert!(route.contains(&s("BUFFALO")));
}

#[test]
fn destination_fragment_extends_the_focused_route() {
    let mut world = trains95();
    let mut ps = ProblemState::default();
    let mut r = rng(2);
    ps.incorporate(&req(Some("DETROIT"), Some("TOLEDO"), &[]), &mut world, &mut r);
    ps.accept("E1", &world);
    let ext = ps.incorporate(&req(None, Some("CINCINNATI"), &[]), &mut world, &mut r);
    assert_eq!(ext.branch, Branch::Extension);
    let route = world.engine("E1").unwrap().route.clone().unwrap();
    assert_eq!(route.first().unwrap(), "DETROIT");
    assert_eq!(route.last().unwrap(), "CINCINNATI");
    assert!(route.contains(&s("TOLEDO")));
}

#[test]
fn other_engine_at_origin_takes_the_focus() {
    let mut world = trains95();
    let mut ps = ProblemState::default();
    let mut r = rng(4);
    ps.incorporate(&req(Some("DETROIT"), Some("TOLEDO"), &[]), &mut world, &mut r);
    let shift = ps.incorporate(&req(Some("MONTREAL"), Some("BURLINGTON"), &[]), &mut world, &mut r);
    assert_eq!(shift.branch, Branch::FocusShift);
    assert_eq!(ps.focus.as_deref(), Some("E2"));
}

#[test]
fn origin_without_engine_asks_for_clarification() {
    let mut world = trains95();
    let mut ps = ProblemState::default();
    let res = ps.incorporate(&req(Some("ATLANTA"), Some("CHARLOTTE"), &[]), &mut world, &mut rng(1));
    assert_eq!(res.branch, Branch::Clarify);
    assert_eq!(res.outcome, Outcome::NoEngine { city: Some(s("ATLANTA")) });
}

#[test]
fn partial_route_then_acceptance_moves_the_leg_start() {
    let mut world = Scenario::builtin("keyboard")
        .unwrap()
        .world(Arc::new(RouteMap::fixture()))
        .unwrap();
    let mut ps = ProblemState::default();
    let mut r = rng(5);
    let first = ps.incorporate(&req(Some("TORONTO"), Some("WASHINGTON"), &[]), &mut world, &mut r);
    assert!(matches!(first.outcome, Outcome::NeedRoute { .. }));
    let part = ps.incorporate(&req(None, None, &["MONTREAL"]), &mut world, &mut r);
    assert!(matches!(part.outcome, Outcome::Proposed { complete: false, .. }), "{part:?}");
    assert_eq!(ps.accept("E2", &world), Some(false));
    assert_eq!(ps.goal("E2").unwrap().leg_start, "MONTREAL");
    let rest = ps.incorporate(&req(None, None, &["ALBANY"]), &mut world, &mut r);
    let Outcome::Proposed { route, complete: true, .. } = rest.outcome else {
        panic!("{rest:?}");
    };
    assert_eq!(&route[..2], &[s("TORONTO"), s("MONTREAL")]);
    assert!(ps.reject("E2", &mut world));
    assert_eq!(world.engine("E2").unwrap().route.as_deref(), Some(&[s("TORONTO"), s("MONTREAL")][..]));
}

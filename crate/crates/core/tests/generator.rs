use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trains_core::corpus::tokenize;
use trains_core::generator::{DisplayCommand, Generator, SystemAct, Templates};
use trains_core::grammar::Grammar;
use trains_core::solver::{admissible_routes, RouteMap, Scenario, World};

fn world() -> World {
    Scenario::builtin("trains95")
        .unwrap()
        .world(Arc::new(RouteMap::fixture()))
        .unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn clarify_route_reproduces_the_dialogue_line() {
    let g = Generator::fixture();
    let act = SystemAct::ClarifyRoute {
        engine: "E1".into(),
        from: "DETROIT".into(),
        to: "WASHINGTON".into(),
    };
    let texts: BTreeSet<String> = (0..200).map(|s| g.realize(&act, &world(), &mut rng(s)).text).collect();
    let expected: BTreeSet<String> = [
        "What route would you like to get from Detroit to Washington?",
        "I need help choosing a route from Detroit to Washington.",
        "Tell me a route to use to get from Detroit to Washington, please.",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    assert_eq!(texts, expected);
}

#[test]
fn acknowledgement_is_deterministic_and_uniform() {
    let g = Generator::fixture();
    let w = world();
    let variants = &g.templates().get("ACKNOWLEDGE").unwrap().variants;
    assert!(["Okay.", "Yep.", "Yeah.", "OK."].iter().all(|v| variants.iter().any(|x| x == v)));
    let n = 10_000u64;
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for seed in 0..n {
        let a = g.realize(&SystemAct::Acknowledge, &w, &mut rng(seed)).text;
        let b = g.realize(&SystemAct::Acknowledge, &w, &mut rng(seed)).text;
        assert_eq!(a, b);
        *counts.entry(a).or_default() += 1;
    }
    assert_eq!(counts.len(), variants.len());
    let k = variants.len() as f64;
    let mean = n as f64 / k;
    let sd = (n as f64 * (1.0 / k) * (1.0 - 1.0 / k)).sqrt();
    for (v, c) in counts {
        assert!((c as f64 - mean).abs() < 4.0 * sd, "{v}: {c}");
    }
}

#[test]
fn proposal_shows_the_route() {
    let g = Generator::fixture();
    let route: Vec<String> = ["DETROIT", "TOLEDO", "PITTSBURGH", "SCRANTON", "BALTIMORE", "WASHINGTON"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let act = SystemAct::ProposeRoute {
        engine: "E1".into(),
        route: route.clone(),
        complete: true,
    };
    let r = g.realize(&act, &world(), &mut rng(0));
    assert_eq!(
        r.commands,
        vec![DisplayCommand::ShowRoute {
            engine: "E1".into(),
            path: route
        }]
    );
    assert!(r.text.contains("the engine at Detroit") || r.text.contains("The engine at Detroit"));
    assert!(r.text.contains("through Toledo, Pittsburgh, Scranton and Baltimore to Washington"));
    let partial = SystemAct::ProposeRoute {
        engine: "E2".into(),
        route: vec!["TORONTO".into(), "MONTREAL".into()],
        complete: false,
    };
    let r = g.realize(&partial, &world(), &mut rng(0));
    assert!(r.text.ends_with("from Montreal to Montreal. Is this OK?") || r.text.ends_with("Is this OK?"));
}

#[test]
fn congestion_marks_each_city() {
    let g = Generator::fixture();
    let act = SystemAct::AnnounceCongestion {
        cities: vec!["SCRANTON".into(), "BALTIMORE".into()],
        hours: 5,
        reason: "localized heavy winds".into(),
    };
    let r = g.realize(&act, &world(), &mut rng(4));
    assert!(r.text.contains("Scranton and Baltimore"));
    assert!(r.text.contains("five hours"));
    assert_eq!(
        r.commands,
        vec![
            DisplayCommand::MarkCongestion {
                city: "SCRANTON".into(),
                hours: 5
            },
            DisplayCommand::MarkCongestion {
                city: "BALTIMORE".into(),
                hours: 5
            },
        ]
    );
}

#[test]
fn routes_cross_highlights_and_reads_like_the_transcript() {
    let g = Generator::fixture();
    let act = SystemAct::RoutesCross {
        engine: "E3".into(),
        cities: vec!["BALTIMORE".into()],
        hours: 5,
    };
    let r = g.realize(&act, &world(), &mut rng(0));
    assert_eq!(
        r.text,
        "But, your routes cross at Baltimore. Trains will take an additional five hours to move through the crossed cities."
    );
    assert_eq!(r.commands, vec![DisplayCommand::HighlightCity { city: "BALTIMORE".into() }]);
}

#[test]
fn clear_route_emits_the_command() {
    let r = Generator::fixture().realize(&SystemAct::ClearRoute { engine: "E3".into() }, &world(), &mut rng(0));
    assert_eq!(r.commands, vec![DisplayCommand::ClearRoute { engine: "E3".into() }]);
    assert!(!r.text.is_empty());
}

#[test]
fn quips_come_from_the_quip_set() {
    let g = Generator::fixture();
    let quips = &g.templates().get("QUIP").unwrap().variants;
    assert!(quips.iter().any(|q| q == "Hey, its the programming."));
    for seed in 0..20 {
        let t = g.realize(&SystemAct::Clarify { quip: true }, &world(), &mut rng(seed)).text;
        assert!(quips.contains(&t));
    }
}

#[test]
fn missing_template_falls_back_to_a_generic_line() {
    let partial = Templates::parse("[ACKNOWLEDGE]\nvariants = [\"Okay.\"]").unwrap();
    let g = Generator::new(partial);
    let act = SystemAct::NoPath {
        engine: "E1".into(),
        from: "DETROIT".into(),
        to: "BOSTON".into(),
    };
    let r = g.realize(&act, &world(), &mut rng(0));
    assert!(r.text.contains("Detroit") && r.text.contains("Boston"), "{}", r.text);
}

#[test]
fn every_system_act_form_has_a_template() {
    let g = Generator::fixture();
    let acts = [
        SystemAct::Acknowledge,
        SystemAct::ProposeRoute {
            engine: "E1".into(),
            route: vec!["DETROIT".into(), "TOLEDO".into()],
            complete: true,
        },
        SystemAct::ProposeRoute {
            engine: "E1".into(),
            route: vec!["DETROIT".into(), "TOLEDO".into()],
            complete: false,
        },
        SystemAct::ClarifyRoute {
            engine: "E1".into(),
            from: "DETROIT".into(),
            to: "WASHINGTON".into(),
        },
        SystemAct::ClarifyDest { engine: "E3".into() },
        SystemAct::Clarify { quip: false },
        SystemAct::Clarify { quip: true },
        SystemAct::AnnounceCongestion {
            cities: vec!["NEW_YORK".into()],
            hours: 5,
            reason: "unusually heavy traffic".into(),
        },
        SystemAct::RoutesCross {
            engine: "E1".into(),
            cities: vec!["TOLEDO".into()],
            hours: 5,
        },
        SystemAct::NoPath {
            engine: "E1".into(),
            from: "DETROIT".into(),
            to: "BOSTON".into(),
        },
        SystemAct::NoEngine {
            city: Some("BOSTON".into()),
        },
        SystemAct::NoEngine { city: None },
        SystemAct::ClearRoute { engine: "E1".into() },
        SystemAct::GoalsUnmet {
            cities: vec!["MILWAUKEE".into()],
        },
        SystemAct::Close,
    ];
    let forms: BTreeSet<&str> = acts.iter().map(SystemAct::form).collect();
    assert_eq!(forms, Templates::forms().collect());
    for a in &acts {
        assert!(g.templates().get(a.form()).is_some(), "{}", a.form());
        let t = g.realize(a, &world(), &mut rng(1)).text;
        assert!(!t.is_empty() && !t.contains('{'), "{t}");
    }
    let t = g.realize(&acts[10], &world(), &mut rng(1)).text;
    assert!(t.contains("Boston"));
    let t = g.realize(&acts[7], &world(), &mut rng(1)).text;
    assert!(t.contains("New York"));
}

fn grammar() -> &'static Grammar {
    static G: std::sync::OnceLock<Grammar> = std::sync::OnceLock::new();
    G.get_or_init(Grammar::fixture)
}

fn all_routes() -> &'static Vec<Vec<String>> {
    static R: std::sync::OnceLock<Vec<Vec<String>>> = std::sync::OnceLock::new();
    R.get_or_init(|| {
        let map = RouteMap::fixture();
        let mut out = Vec::new();
        for (from, to) in [
            ("DETROIT", "WASHINGTON"),
            ("ALBANY", "NEW_YORK"),
            ("TORONTO", "MONTREAL"),
            ("CHARLOTTE", "LEXINGTON"),
            ("BOSTON", "PHILADELPHIA"),
        ] {
            let via: &[String] = if from == "DETROIT" { &["PITTSBURGH".to_string()] } else { &[] };
            out.extend(admissible_routes(&map, from, to, via, &BTreeSet::new()));
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn proposals_parse_back_to_their_cities(i in 0usize..10_000, seed in 0u64..1000, complete in any::<bool>()) {
        let routes = all_routes();
        let route = routes[i % routes.len()].clone();
        let engine = match route[0].as_str() {
            "DETROIT" => "E1",
            "MONTREAL" => "E2",
            "ALBANY" => "E3",
            _ => "E1",
        };
        let act = SystemAct::ProposeRoute { engine: engine.into(), route: route.clone(), complete };
        let text = Generator::fixture().realize(&act, &world(), &mut rng(seed)).text;
        let acts = grammar().interpret(&tokenize(&text));
        let mentioned = acts.acts.iter().find(|a| a.content.has("dest")).map(|a| {
            let c = &a.content;
            let mut cities: Vec<String> = c.atom("origin").into_iter().map(String::from).collect();
            cities.extend(c.list("via"));
            cities.extend(c.atom("dest").map(String::from));
            cities
        });
        prop_assert_eq!(mentioned, Some(route), "{}", text);
    }
}

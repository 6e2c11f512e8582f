use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use trains_core::corpus::{Channel, Speaker};
use trains_core::generator::{DisplayCommand, SystemAct};
use trains_core::session::{parse_transcript, replay, Completeness, Resources, Session, SessionError, Transcript};
use trains_core::solver::{RouteMap, Scenario};
use trains_core::speechpp::fixture::{fixture_corpus, fixture_corrector, train_corrector};
use trains_core::speechpp::ChannelConfig;

const TRAINS95_REF: &str = include_str!("../data/transcripts/trains95_ref.txt");
const TRAINS95_SPEECH: &str = include_str!("../data/transcripts/trains95_speech.txt");
const KEYBOARD: &str = include_str!("../data/transcripts/keyboard.txt");

fn speech_resources() -> &'static Resources {
    static R: OnceLock<Resources> = OnceLock::new();
    R.get_or_init(|| Resources::fixture().with_corrector(fixture_corrector()))
}

fn session(scenario: &str, seed: u64) -> Session {
    Session::new("t", Scenario::builtin(scenario).unwrap(), seed, Resources::fixture()).unwrap()
}

fn transcript(text: &str) -> Transcript {
    parse_transcript(text).unwrap()
}

#[test]
fn initial_commands_show_the_map_first() {
    let s = session("trains95", 1);
    let cmds = s.initial_commands();
    assert!(matches!(cmds.first(), Some(DisplayCommand::ShowMap { .. })));
}

#[test]
fn keyboard_opening_is_acknowledged_with_a_route() {
    let mut s = session("keyboard", 1);
    let out = s.turn("Let's take the train in Charlotte to Lexington", Channel::Keyboard);
    let record = &s.turn_log()[0];
    assert_eq!(record.corrected_text, None);
    assert!(matches!(record.responses[0], SystemAct::ProposeRoute { ref engine, .. } if engine == "E1"));
    let show = out.display_commands.iter().find_map(|c| match c {
        DisplayCommand::ShowRoute { engine, path } => Some((engine.clone(), path.clone())),
        _ => None,
    });
    let (engine, path) = show.expect("a SHOW_ROUTE command");
    assert_eq!(engine, "E1");
    assert_eq!(path.first().map(String::as_str), Some("CHARLOTTE"));
    assert_eq!(path.last().map(String::as_str), Some("LEXINGTON"));
    assert!(out.response_text.contains("The engine at Charlotte"));
    assert_eq!(
        out.display_commands[0],
        DisplayCommand::Utterance {
            speaker: Speaker::User,
            text: "Let's take the train in Charlotte to Lexington".into()
        }
    );
}

#[test]
fn speech_turn_is_corrected_before_parsing() {
    let mut s = Session::new("t", Scenario::builtin("trains95").unwrap(), 1, speech_resources().clone()).unwrap();
    for t in transcript(TRAINS95_SPEECH).turns.iter().take(10) {
        s.turn(&t.text, Channel::Speech);
    }
    s.turn("GO B_X SYRACUSE AT BUFFALO", Channel::Speech);
    let last = s.turn_log().last().unwrap();
    assert_eq!(last.corrected_text.as_deref(), Some("GO VIA SYRACUSE VIA BUFFALO"));
    let route = s.world.engine("E3").unwrap().route.clone().unwrap();
    assert!(route.contains(&"SYRACUSE".to_string()) && route.contains(&"BUFFALO".to_string()));
    assert!(last
        .display_commands
        .iter()
        .any(|c| matches!(c, DisplayCommand::ShowRoute { engine, .. } if engine == "E3")));
}

#[test]
fn done_closes_a_solved_session() {
    let (report, s) = replay(
        &Scenario::builtin("trains95").unwrap(),
        &transcript(TRAINS95_REF),
        Channel::Keyboard,
        1,
        &Resources::fixture(),
    )
    .unwrap();
    assert!(s.is_complete());
    assert!(report.goals_met);
    let closing = s.turn_log().iter().position(|t| t.responses.contains(&SystemAct::Close)).unwrap();
    assert_eq!(report.turns_to_completion, closing + 1);
}

#[test]
fn done_with_unmet_goals_lists_them() {
    let mut s = session("trains95", 1);
    s.turn("I'm done", Channel::Keyboard);
    let r = &s.turn_log()[0].responses;
    assert_eq!(
        r,
        &vec![SystemAct::GoalsUnmet {
            cities: vec!["MILWAUKEE".into(), "LEXINGTON".into(), "WASHINGTON".into()]
        }]
    );
    assert!(!s.is_complete());
}

#[test]
fn empty_transcript_reports_incomplete() {
    let (report, s) = replay(
        &Scenario::builtin("trains95").unwrap(),
        &Transcript::default(),
        Channel::Keyboard,
        1,
        &Resources::fixture(),
    )
    .unwrap();
    assert_eq!(s.turn_log().len(), 0);
    assert_eq!(report.turns_to_completion, 0);
    assert!(!report.goals_met);
    assert_eq!(report.solution_hours.marker, Completeness::Incomplete);
    assert_eq!(report.solution_hours.to_string(), "INCOMPLETE (0 h so far)");
    assert_eq!(report.wer, None);
}

#[test]
fn replays_are_deterministic_per_seed() {
    let run = |seed| {
        let (report, s) = replay(
            &Scenario::builtin("keyboard").unwrap(),
            &transcript(KEYBOARD),
            Channel::Keyboard,
            seed,
            &Resources::fixture(),
        )
        .unwrap();
        let hashes: Vec<String> = s.turn_log().iter().map(|t| t.snapshot_hash.clone()).collect();
        let texts: Vec<String> = s.turn_log().iter().map(|t| t.response_text.clone()).collect();
        (report, hashes, texts)
    };
    for seed in [1, 2, 3] {
        assert_eq!(run(seed), run(seed));
    }
}

#[test]
fn snapshot_hash_tracks_state() {
    let mut a = session("trains95", 5);
    let b = session("trains95", 5);
    assert_eq!(a.snapshot_hash(), b.snapshot_hash());
    assert_eq!(a.snapshot_hash().len(), 64);
    a.turn("Let's take the train from Detroit to Washington via Toledo", Channel::Keyboard);
    assert_ne!(a.snapshot_hash(), b.snapshot_hash());
    assert_eq!(a.turn_log()[0].snapshot_hash, a.snapshot_hash());
}

#[test]
fn replay_rejects_cities_missing_from_the_map() {
    let map = RouteMap::parse(
        r#"
name = "tiny"
[[city]]
id = "AVON"
name = "Avon"
x = 0
y = 0
[[city]]
id = "BATH"
name = "Bath"
x = 10
y = 0
[[track]]
a = "AVON"
b = "BATH"
"#,
    )
    .unwrap();
    let scenario = Scenario::parse(
        r#"
name = "tiny"
goals = ["BATH"]
[[engine]]
id = "E1"
home = "AVON"
"#,
    )
    .unwrap();
    let resources = Resources {
        map: Arc::new(map),
        ..Resources::fixture()
    };
    let t = transcript("U: okay\nU: let's go from Detroit to Washington\n");
    match replay(&scenario, &t, Channel::Keyboard, 1, &resources) {
        Err(SessionError::Mismatch { turn, message }) => {
            assert_eq!(turn, 2);
            assert!(message.contains("DETROIT"), "{message}");
        }
        other => panic!("expected a mismatch, got {other:?}"),
    }
}

#[test]
fn keyboard_turns_bypass_the_corrector() {
    let mut s = Session::new("t", Scenario::builtin("trains95").unwrap(), 1, speech_resources().clone()).unwrap();
    s.turn("LET'S GO P_M TO TRY", Channel::Keyboard);
    assert_eq!(s.turn_log()[0].corrected_text, None);
    s.turn("LET'S GO P_M TO TRY", Channel::Speech);
    assert!(s.turn_log()[1].corrected_text.as_deref().unwrap().contains("DETROIT"));
}

#[test]
fn failing_corrector_rolls_back_and_clarifies() {
    let broken = train_corrector(&fixture_corpus()[..200], 0.5, ChannelConfig::default(), 0).unwrap();
    let mut s = Session::new(
        "t",
        Scenario::builtin("trains95").unwrap(),
        1,
        Resources::fixture().with_corrector(broken),
    )
    .unwrap();
    let before = s.snapshot_hash();
    let out = s.turn("OKAY LET'S TAKE THE TRAIN FROM DETROIT TO WASHINGTON", Channel::Speech);
    assert!(!out.response_text.is_empty());
    assert_eq!(s.turn_log()[0].responses, vec![SystemAct::Clarify { quip: false }]);
    // the event due at this turn is rolled back with everything else
    assert_eq!(s.snapshot_hash(), before);
    let out = s.turn("let's take the train from Detroit to Washington", Channel::Keyboard);
    assert!(!out.response_text.is_empty());
    assert!(s.turn_log()[1].responses.iter().any(|r| !r.is_clarification()));
}

#[test]
fn speech_replay_reports_wer_against_references() {
    let (report, _) = replay(
        &Scenario::builtin("trains95").unwrap(),
        &transcript(TRAINS95_SPEECH),
        Channel::Speech,
        1,
        speech_resources(),
    )
    .unwrap();
    let wer = report.wer.unwrap();
    assert!((0.26..0.32).contains(&wer), "{wer}");
    assert!(report.goals_met);
}

fn word() -> impl Strategy<Value = String> {
    prop_oneof![
        prop::sample::select(vec![
            "okay", "no", "let's", "take", "the", "train", "from", "to", "via", "through", "Detroit", "Washington",
            "Albany", "Boston", "engine", "at", "go", "done", "I'm", "clear", "route", "last", "yes", "Montreal",
        ])
        .prop_map(String::from),
        "[a-z']{1,8}",
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sessions_stay_live(turns in prop::collection::vec(prop::collection::vec(word(), 0..10), 1..12), seed in 0u64..100) {
        let mut s = session("trains95", seed);
        for words in turns {
            let out = s.turn(&words.join(" "), Channel::Keyboard);
            prop_assert!(!out.response_text.is_empty());
            prop_assert!(s.discourse.stack().iter().all(|f| f.is_well_formed()));
        }
    }
}

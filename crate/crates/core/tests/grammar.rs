use proptest::prelude::*;
use trains_core::corpus::{tokenize, Token};
use trains_core::grammar::{
    brute_force_acts, confidence, ActSequence, extract_acts, parse_chart, ActType, Frame, Grammar, SpeechAct,
};

fn grammar() -> &'static Grammar {
    static G: std::sync::OnceLock<Grammar> = std::sync::OnceLock::new();
    G.get_or_init(Grammar::fixture)
}

const WORDS: &[&str] = &[
    "OKAY", "YES", "NO", "NOW", "UH", "LET'S", "TAKE", "GO", "MOVE", "THE", "LAST", "TRAIN",
    "ENGINE", "AT", "IN", "FROM", "TO", "VIA", "THROUGH", "AND", "DETROIT", "ALBANY", "BOSTON",
    "NEW", "YORK", "WASHINGTON", "I", "WE", "CAN", "DONE", "I'M", "THAT'S", "GOOD", "INSTEAD",
    "AROUND", "SOUTH", "CONTAIN", "IS", "B_X", "SEND", "CLEAR", "BOSTON'S", "ROUTE", "NEEDS",
];

fn utterance(max: usize) -> impl Strategy<Value = Vec<Token>> {
    prop::collection::vec(prop::sample::select(WORDS), 0..=max)
        .prop_map(|ws| ws.iter().map(|w| Token::new(w).unwrap()).collect())
}

#[test]
fn okay_is_confirm_and_acknowledge() {
    let chart = parse_chart(&tokenize("OKAY"), grammar());
    for sem in ["CONFIRM", "ACKNOWLEDGE"] {
        assert!(chart
            .iter()
            .any(|c| c.category.syn == "ACT" && c.category.sem == sem && (c.start, c.end) == (0, 1)));
    }
}

#[test]
fn thats_good_is_confirm() {
    let chart = parse_chart(&tokenize("THAT'S GOOD"), grammar());
    assert!(chart
        .iter()
        .any(|c| c.category.sem == "CONFIRM" && (c.start, c.end) == (0, 2)));
}

#[test]
fn empty_input_gives_empty_chart() {
    assert!(parse_chart(&[], grammar()).is_empty());
    let seq = grammar().interpret(&[]);
    assert_eq!(seq.confidence, 0.0);
}

#[test]
fn unknown_words_get_unknown_constituents() {
    let chart = parse_chart(&tokenize("CONTAIN"), grammar());
    assert!(chart
        .iter()
        .any(|c| c.category.syn == "UNKNOWN" && c.frame.atom("word") == Some("CONTAIN")));
}

#[test]
fn garbled_albany_request_has_three_acts() {
    let toks = tokenize("OKAY NOW I TAKE THE LAST TRAIN IN GO FROM ALBANY TO IS");
    let seq = grammar().interpret(&toks);
    assert_eq!(
        seq.act_types(),
        vec![ActType::Confirm, ActType::Tell, ActType::Request]
    );
    assert_eq!(seq.skipped, vec![11, 12]);
    assert_eq!(seq.acts[1].content.atom("engine"), Some("LAST"));
    assert_eq!(seq.acts[2].content.atom("origin"), Some("ALBANY"));
    assert!(seq.confidence < 1.0);
}

#[test]
fn send_contain_splits_into_three_acts() {
    let toks = tokenize("OKAY LET'S SEND CONTAIN FROM DETROIT TO WASHINGTON");
    let seq = grammar().interpret(&toks);
    assert_eq!(
        seq.act_types(),
        vec![ActType::Confirm, ActType::Tell, ActType::Tell]
    );
    assert!(seq.acts[1].is_garbled());
    let route = &seq.acts[2].content;
    assert_eq!(route.atom("origin"), Some("DETROIT"));
    assert_eq!(route.atom("dest"), Some("WASHINGTON"));
}

#[test]
fn all_unknown_input_is_a_contentless_tell() {
    let seq = grammar().interpret(&tokenize("FOO BAR BAZ"));
    assert_eq!(seq.acts.len(), 1);
    assert_eq!(seq.acts[0].act_type, ActType::Tell);
    assert!(seq.acts[0].content.is_empty());
    assert!(seq.confidence < 1.0);
    assert_eq!(seq.skipped, vec![0, 1, 2]);
}

#[test]
fn transcript_lines_parse_to_the_intended_content() {
    let cases: &[(&str, &[ActType], &str)] = &[
        (
            "No. Let's take the train from Detroit to Washington via Cincinnati.",
            &[ActType::Reject, ActType::Suggest],
            "[dest=WASHINGTON engine=THE origin=DETROIT via=(CINCINNATI)]",
        ),
        (
            "Okay Now let's take the last train and go from Albany to Milwaukee.",
            &[ActType::Confirm, ActType::Suggest],
            "[dest=MILWAUKEE engine=LAST origin=ALBANY]",
        ),
        (
            "The engine at Albany needs to go to Milwaukee.",
            &[ActType::Tell],
            "[dest=MILWAUKEE engine_at=ALBANY]",
        ),
        ("GO VIA SYRACUSE VIA BUFFALO", &[ActType::Request], "[via=(SYRACUSE BUFFALO)]"),
        ("Go via Syracuse and Buffalo.", &[ActType::Request], "[via=(SYRACUSE BUFFALO)]"),
        (
            "Can we go through Atlanta instead?",
            &[ActType::Request],
            "[via=(ATLANTA)]",
        ),
        (
            "from Montreal, let's take the train south through Burlington and Albany.",
            &[ActType::Suggest],
            "[engine=THE origin=MONTREAL via=(BURLINGTON ALBANY)]",
        ),
        ("let's go around New York instead.", &[ActType::Suggest], "[avoid=(NEW_YORK)]"),
        ("How about going through Albany.", &[ActType::Suggest], "[via=(ALBANY)]"),
        (
            "Let's clear Boston's current route.",
            &[ActType::Suggest],
            "[clear=yes route_of=BOSTON]",
        ),
        ("I think we are done.", &[ActType::Tell], "[done=yes]"),
        ("That's good. I'm done.", &[ActType::Confirm, ActType::Tell], "[done=yes]"),
    ];
    for (text, types, last) in cases {
        let seq = grammar().interpret(&tokenize(text));
        assert_eq!(seq.act_types(), *types, "{text}");
        assert_eq!(seq.acts.last().unwrap().content.to_string(), *last, "{text}");
        assert!(seq.skipped.is_empty(), "{text}");
    }
}

#[test]
fn unparseable_opening_is_garbled() {
    let seq = grammar().interpret(&tokenize("Let's redo the route for Boston."));
    assert_eq!(seq.acts.len(), 1);
    assert!(seq.acts[0].is_garbled());
}

#[test]
fn every_listed_fragment_yields_an_act() {
    let g = grammar();
    assert!(!g.fragments.is_empty());
    for frag in &g.fragments {
        let seq = g.interpret(frag);
        assert!(
            seq.acts.iter().any(|a| a.end > a.start),
            "fragment {frag:?} produced no act"
        );
    }
}

#[test]
fn fixture_grammar_has_the_expected_size() {
    let g = grammar();
    let lex: usize = g.lexicon.values().map(Vec::len).sum();
    assert!(g.rules.len() >= 55, "{} rules", g.rules.len());
    assert!(lex >= 130, "{lex} lexical entries");
}

fn act(act_type: ActType, start: usize, end: usize, content: Frame) -> SpeechAct {
    SpeechAct {
        act_type,
        content,
        start,
        end,
        score: 1.0,
        confidence: 1.0,
    }
}

#[test]
fn confidence_examples() {
    let mut route = Frame::new();
    route.unify_atom("dest", "BOSTON");
    assert_eq!(confidence(&[act(ActType::Suggest, 0, 4, route.clone())], 4), 1.0);
    let c = confidence(&[act(ActType::Suggest, 0, 8, route.clone())], 10);
    assert!((c - 0.8).abs() < 1e-12);
    assert_eq!(confidence(&[act(ActType::Suggest, 0, 0, route)], 0), 0.0);
    let bare = confidence(&[act(ActType::Tell, 0, 3, Frame::new())], 3);
    let confirm = confidence(&[act(ActType::Confirm, 0, 3, Frame::new())], 3);
    assert!(bare < confirm);
}

#[test]
fn act_content_respects_the_hierarchy() {
    for text in ["OKAY LET'S GO", "GO", "CAN WE", "HOW ABOUT", "LET'S CLEAR"] {
        for a in grammar().interpret(&tokenize(text)).acts {
            assert!(a.act_type.is_a(ActType::Tell));
            assert!(!a.content.is_empty() || a.act_type.allows_empty_content(), "{text}");
        }
    }
}

fn real_acts(seq: &ActSequence) -> usize {
    seq.acts.iter().filter(|a| a.end > a.start).count()
}

/// Acts plus skipped tokens, the primary extraction objective.
fn cost(seq: &ActSequence) -> usize {
    real_acts(seq) + seq.skipped.len()
}

#[test]
fn deleting_an_interior_skipped_token_can_join_fragments() {
    // the act count may grow: a stray word can separate a preposition from its city
    let with = grammar().interpret(&tokenize("OKAY FROM SOUTH DETROIT"));
    let without = grammar().interpret(&tokenize("OKAY FROM DETROIT"));
    assert_eq!(with.skipped, vec![1, 2, 3]);
    assert_eq!((real_acts(&with), real_acts(&without)), (1, 2));
    assert!(cost(&without) < cost(&with));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn extraction_matches_brute_force(toks in utterance(8)) {
        let chart = parse_chart(&toks, grammar());
        prop_assert_eq!(extract_acts(&chart, &toks), brute_force_acts(&chart, &toks));
    }

    #[test]
    fn parsing_is_deterministic(toks in utterance(12)) {
        prop_assert_eq!(grammar().interpret(&toks), grammar().interpret(&toks));
    }

    #[test]
    fn spans_are_ordered_and_disjoint(toks in utterance(12)) {
        let seq = grammar().interpret(&toks);
        for w in seq.acts.windows(2) {
            prop_assert!(w[0].end <= w[1].start);
        }
        prop_assert_eq!(seq.covered.len() + seq.skipped.len(), toks.len());
        prop_assert!((0.0..=1.0).contains(&seq.confidence));
    }

    #[test]
    fn deleting_a_skipped_token_never_raises_the_cost(toks in utterance(10)) {
        let g = grammar();
        let seq = g.interpret(&toks);
        for &i in &seq.skipped {
            let mut shorter = toks.clone();
            shorter.remove(i);
            let after = g.interpret(&shorter);
            prop_assert!(cost(&after) < cost(&seq), "removing {} from {:?}", i, toks);
        }
    }

    #[test]
    fn deleting_a_skipped_edge_token_keeps_the_acts(toks in utterance(10)) {
        let g = grammar();
        let seq = g.interpret(&toks);
        let n = toks.len();
        for i in [0, n.saturating_sub(1)] {
            if n == 0 || !seq.skipped.contains(&i) {
                continue;
            }
            let mut shorter = toks.clone();
            shorter.remove(i);
            let after = g.interpret(&shorter);
            prop_assert_eq!(real_acts(&after), real_acts(&seq));
        }
    }

    #[test]
    fn more_unaccounted_tokens_lower_confidence(n in 1usize..20, skipped in 0usize..19) {
        prop_assume!(skipped < n);
        let mut f = Frame::new();
        f.unify_atom("dest", "BOSTON");
        let acts = [act(ActType::Suggest, 0, n - skipped, f.clone())];
        let fewer = confidence(&acts, n);
        let more = confidence(&acts, n + 1);
        prop_assert!(more < fewer);
    }
}

//! Template-driven generator of in-domain user utterances.

use rand::Rng;

use super::{tokenize, Channel, Utterance};

pub const CITY_NAMES: &[&str] = &[
    "DETROIT",
    "TOLEDO",
    "PITTSBURGH",
    "CINCINNATI",
    "WASHINGTON",
    "SCRANTON",
    "BALTIMORE",
    "MONTREAL",
    "BURLINGTON",
    "ALBANY",
    "LEXINGTON",
    "MILWAUKEE",
    "BUFFALO",
    "SYRACUSE",
    "TORONTO",
    "BOSTON",
    "NEW YORK",
    "PHILADELPHIA",
    "CHARLOTTE",
    "ATLANTA",
    "CHICAGO",
    "CHARLESTON",
];

/// `{C}` is replaced by a random city.
const TEMPLATES: &[&str] = &[
    "OKAY LET'S TAKE THE TRAIN FROM {C} TO {C}",
    "LET'S TAKE THE TRAIN FROM {C} TO {C}",
    "NOW LET'S TAKE THE TRAIN FROM {C} TO {C}",
    "OKAY NOW LET'S TAKE THE TRAIN FROM {C} TO {C}",
    "NO LET'S TAKE THE TRAIN FROM {C} TO {C} VIA {C}",
    "LET'S TAKE THE TRAIN FROM {C} TO {C} VIA {C}",
    "TAKE THE TRAIN FROM {C} TO {C} VIA {C}",
    "GO FROM {C} TO {C} VIA {C}",
    "LET'S GO FROM {C} VIA {C} TO {C}",
    "LET'S GO VIA {C} AND {C}",
    "LET'S GO VIA {C}",
    "GO VIA {C} AND {C}",
    "GO VIA {C}",
    "UH GO VIA {C}",
    "YES NOW LET'S GO TO {C}",
    "NOW LET'S GO TO {C}",
    "OKAY NOW LET'S TAKE THE LAST TRAIN AND GO FROM {C} TO {C}",
    "THE ENGINE AT {C} NEEDS TO GO TO {C}",
    "THE TRAIN AT {C} NEEDS TO GO TO {C} VIA {C}",
    "LET'S MOVE THE TRAIN IN {C} TO {C}",
    "LET'S MOVE FROM {C} TO {C}",
    "CAN WE GO THROUGH {C} INSTEAD",
    "HOW ABOUT GOING THROUGH {C}",
    "LET'S GO AROUND {C} INSTEAD",
    "FROM {C} TO {C}",
    "GO FROM {C} TO {C}",
    "SEND THE ENGINE AT {C} TO {C}",
    "THAT'S GOOD I'M DONE",
    "I'M DONE",
    "OKAY THAT THAT'S OKAY NOW",
    "THAT'S OKAY",
    "OKAY",
    "YES",
    "NO",
    "THAT'S GOOD",
];

/// Draws `n` utterances from the domain templates.
pub fn domain_utterances<R: Rng>(n: usize, rng: &mut R) -> Vec<Utterance> {
    (0..n)
        .map(|_| {
            let template = TEMPLATES[rng.random_range(0..TEMPLATES.len())];
            let mut text = String::new();
            for (i, piece) in template.split("{C}").enumerate() {
                if i > 0 {
                    text.push_str(CITY_NAMES[rng.random_range(0..CITY_NAMES.len())]);
                }
                text.push_str(piece);
            }
            Utterance::user(tokenize(&text), Channel::Speech)
        })
        .collect()
}

/// The distinct words the templates can produce.
pub fn domain_vocabulary() -> Vec<super::Token> {
    let mut words: Vec<super::Token> = TEMPLATES
        .iter()
        .flat_map(|t| tokenize(&t.replace("{C}", " ")))
        .chain(CITY_NAMES.iter().flat_map(|c| tokenize(c)))
        .collect();
    words.sort();
    words.dedup();
    words
}

//! Sessions: the turn pipeline from user text to response text and display
//! commands, the turn log, transcript replay and evaluation.

mod transcript;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::corpus::{align, tokenize, wer, Channel, Speaker, Token};
use crate::discourse::{resolve_references, DiscourseState, Reasoner, ResolvedAct, RuleFiring, UNRESOLVED};
use crate::generator::{DisplayCommand, Generator, SystemAct};
use crate::grammar::Grammar;
use crate::solver::{ProblemState, PsResult, RouteMap, Scenario, SolverError, World};
use crate::speechpp::PostCorrector;

pub use transcript::{parse_transcript, Transcript, TranscriptTurn};

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("transcript line {line}: {message}")]
    Transcript { line: usize, message: String },
    #[error("turn {turn}: {message}")]
    Mismatch { turn: usize, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
}

/// Immutable artifacts shared by every session.
#[derive(Debug, Clone)]
pub struct Resources {
    pub map: Arc<RouteMap>,
    pub grammar: Arc<Grammar>,
    pub reasoner: Arc<Reasoner>,
    pub generator: Arc<Generator>,
    /// Needed only for the speech channel.
    pub corrector: Option<Arc<PostCorrector>>,
}

impl Resources {
    /// The bundled map, grammar, rules and templates, without a corrector.
    pub fn fixture() -> Self {
        Resources {
            map: Arc::new(RouteMap::fixture()),
            grammar: Arc::new(Grammar::fixture()),
            reasoner: Arc::new(Reasoner::fixture()),
            generator: Arc::new(Generator::fixture()),
            corrector: None,
        }
    }

    pub fn with_corrector(mut self, corrector: PostCorrector) -> Self {
        self.corrector = Some(Arc::new(corrector));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TurnRecord {
    pub index: usize,
    pub channel: Channel,
    pub user_text: String,
    /// Post-corrector output; absent on the keyboard channel.
    pub corrected_text: Option<String>,
    pub acts: Vec<ResolvedAct>,
    pub firings: Vec<RuleFiring>,
    pub outcomes: Vec<PsResult>,
    pub responses: Vec<SystemAct>,
    pub response_text: String,
    pub display_commands: Vec<DisplayCommand>,
    pub snapshot_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TurnOutput {
    pub response_text: String,
    pub display_commands: Vec<DisplayCommand>,
}

/// Total route hours. When some goal city lacks a train the figure is
/// marked INCOMPLETE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SolutionHours {
    pub hours: u32,
    pub marker: Completeness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Completeness {
    Complete,
    Incomplete,
}

impl std::fmt::Display for SolutionHours {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.marker {
            Completeness::Complete => write!(f, "{} h", self.hours),
            Completeness::Incomplete => write!(f, "INCOMPLETE ({} h so far)", self.hours),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    /// Turns until the user closed the dialogue, else all turns run.
    pub turns_to_completion: usize,
    pub solution_hours: SolutionHours,
    pub goals_met: bool,
    pub wer: Option<f64>,
}

/// A live dialogue over one scenario.
#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub scenario: Scenario,
    pub seed: u64,
    pub world: World,
    pub problem: ProblemState,
    pub discourse: DiscourseState,
    turn_log: Vec<TurnRecord>,
    rng: ChaCha8Rng,
    resources: Resources,
}

/// Everything a client needs to draw the current scene.
#[derive(Debug, Clone, Serialize)]
pub struct SessionState<'a> {
    pub id: &'a str,
    pub scenario: &'a str,
    pub seed: u64,
    pub map: &'a RouteMap,
    pub world: &'a World,
    pub score_hours: u32,
    pub goals_met: bool,
    pub complete: bool,
    pub turns: usize,
    pub snapshot_hash: String,
}

impl Session {
    pub fn new(id: impl Into<String>, scenario: Scenario, seed: u64, resources: Resources) -> Result<Self, SessionError> {
        let world = scenario.world(resources.map.clone())?;
        Ok(Session {
            id: id.into(),
            scenario,
            seed,
            world,
            problem: ProblemState::default(),
            discourse: DiscourseState::new(),
            turn_log: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            resources,
        })
    }

    pub fn turn_log(&self) -> &[TurnRecord] {
        &self.turn_log
    }

    pub fn is_complete(&self) -> bool {
        self.discourse.complete
    }

    /// Commands that draw the initial scene.
    pub fn initial_commands(&self) -> Vec<DisplayCommand> {
        let mut out = vec![DisplayCommand::ShowMap {
            map: self.world.map.name.clone(),
        }];
        for (city, hours) in &self.world.congested {
            out.push(DisplayCommand::MarkCongestion {
                city: city.clone(),
                hours: *hours,
            });
        }
        for e in &self.world.engines {
            if let Some(path) = &e.route {
                out.push(DisplayCommand::ShowRoute {
                    engine: e.id.clone(),
                    path: path.clone(),
                });
            }
        }
        out
    }

    /// Hash of the canonical serialization of world, plan and discourse.
    pub fn snapshot_hash(&self) -> String {
        #[derive(Serialize)]
        struct Snapshot<'a> {
            world: &'a World,
            problem: &'a ProblemState,
            discourse: &'a DiscourseState,
        }
        let json = serde_json::to_vec(&Snapshot {
            world: &self.world,
            problem: &self.problem,
            discourse: &self.discourse,
        })
        .expect("session state serializes");
        hex::encode(Sha256::digest(&json))
    }

    pub fn state(&self) -> SessionState<'_> {
        let score = self.world.score();
        SessionState {
            id: &self.id,
            scenario: &self.scenario.name,
            seed: self.seed,
            map: &self.resources.map,
            world: &self.world,
            score_hours: score.hours,
            goals_met: score.complete,
            complete: self.discourse.complete,
            turns: self.turn_log.len(),
            snapshot_hash: self.snapshot_hash(),
        }
    }

    /// Runs one user turn through the pipeline. Never fails: an internal
    /// failure rolls the turn back and answers with a clarification.
    pub fn turn(&mut self, text: &str, channel: Channel) -> TurnOutput {
        let saved = (
            self.world.clone(),
            self.problem.clone(),
            self.discourse.clone(),
            self.rng.clone(),
        );
        let attempt = catch_unwind(AssertUnwindSafe(|| self.run_turn(text, channel)));
        let failure = match attempt {
            Ok(Ok(record)) => Ok(record),
            Ok(Err(message)) => Err(message),
            Err(_) => Err("internal failure".to_string()),
        };
        let record = failure.unwrap_or_else(|message| {
            log::warn!("session {} turn {}: {message}", self.id, self.turn_log.len());
            (self.world, self.problem, self.discourse, self.rng) = saved;
            self.failed_turn(text, channel)
        });
        let out = TurnOutput {
            response_text: record.response_text.clone(),
            display_commands: record.display_commands.clone(),
        };
        self.turn_log.push(record);
        out
    }

    fn failed_turn(&mut self, text: &str, channel: Channel) -> TurnRecord {
        let act = SystemAct::Clarify { quip: false };
        let r = self
            .resources
            .generator
            .realize(&act, &self.world, &mut self.rng);
        TurnRecord {
            index: self.turn_log.len(),
            channel,
            user_text: text.to_string(),
            corrected_text: None,
            acts: Vec::new(),
            firings: Vec::new(),
            outcomes: Vec::new(),
            responses: vec![act],
            display_commands: utterances(text, &r.text),
            response_text: r.text,
            snapshot_hash: self.snapshot_hash(),
        }
    }

    fn run_turn(&mut self, text: &str, channel: Channel) -> Result<TurnRecord, String> {
        let index = self.turn_log.len();
        let mut announcements = Vec::new();
        let events: Vec<_> = self.scenario.events_at(index).cloned().collect();
        for event in events {
            self.world.apply_event(&event).map_err(|e| e.to_string())?;
            announcements.push(SystemAct::AnnounceCongestion {
                cities: event.cities.clone(),
                hours: event.hours,
                reason: event.reason.clone(),
            });
        }

        let raw = tokenize(text);
        let (tokens, corrected_text) = match channel {
            Channel::Keyboard => (raw, None),
            Channel::Speech => match &self.resources.corrector {
                Some(c) => {
                    let fixed = c.correct(&raw).map_err(|e| e.to_string())?.tokens;
                    let t = crate::corpus::join(&fixed);
                    (fixed, Some(t))
                }
                None => {
                    log::warn!("speech turn without a post-corrector; parsing the raw input");
                    (raw, None)
                }
            },
        };

        let parsed = self.resources.grammar.interpret(&tokens);
        let acts: Vec<ResolvedAct> = parsed
            .acts
            .iter()
            .map(|a| resolve_references(a, &self.discourse, &self.problem, &self.world))
            .collect();

        let before: Vec<Option<Vec<String>>> = self.world.engines.iter().map(|e| e.route.clone()).collect();
        let interp = self.resources.reasoner.interpret(
            &acts,
            &mut self.discourse,
            &mut self.problem,
            &mut self.world,
            &mut self.rng,
        );
        let mut responses = announcements;
        responses.extend(interp.responses);
        let realized = self
            .resources
            .generator
            .realize_all(&responses, &self.world, &mut self.rng);

        let mut commands = utterances(text, &realized.text);
        commands.extend(realized.commands);
        // routes changed without a proposal (rejections, corrections)
        for (e, old) in self.world.engines.iter().zip(before) {
            let shown = commands.iter().any(|c| match c {
                DisplayCommand::ShowRoute { engine, .. } | DisplayCommand::ClearRoute { engine } => *engine == e.id,
                _ => false,
            });
            if e.route != old && !shown {
                commands.push(match &e.route {
                    Some(path) => DisplayCommand::ShowRoute {
                        engine: e.id.clone(),
                        path: path.clone(),
                    },
                    None => DisplayCommand::ClearRoute { engine: e.id.clone() },
                });
            }
        }

        Ok(TurnRecord {
            index,
            channel,
            user_text: text.to_string(),
            corrected_text,
            acts,
            firings: interp.firings,
            outcomes: interp.outcomes,
            responses,
            response_text: realized.text,
            display_commands: commands,
            snapshot_hash: self.snapshot_hash(),
        })
    }

    pub fn report(&self, references: &[Option<Vec<Token>>]) -> EvalReport {
        let score = self.world.score();
        let turns = self.completion_turn().unwrap_or(self.turn_log.len());
        let pairs: Vec<_> = self
            .turn_log
            .iter()
            .zip(references)
            .filter_map(|(t, r)| r.as_ref().map(|r| align(r, &tokenize(&t.user_text))))
            .collect();
        EvalReport {
            turns_to_completion: turns,
            solution_hours: SolutionHours {
                hours: score.hours,
                marker: if score.complete {
                    Completeness::Complete
                } else {
                    Completeness::Incomplete
                },
            },
            goals_met: score.complete,
            wer: wer(&pairs).ok().map(|r| r.rate),
        }
    }

    fn completion_turn(&self) -> Option<usize> {
        if !self.discourse.complete {
            return None;
        }
        self.turn_log
            .iter()
            .position(|t| t.responses.contains(&SystemAct::Close))
            .map(|i| i + 1)
    }
}

fn utterances(user: &str, system: &str) -> Vec<DisplayCommand> {
    vec![
        DisplayCommand::Utterance {
            speaker: Speaker::User,
            text: user.to_string(),
        },
        DisplayCommand::Utterance {
            speaker: Speaker::System,
            text: system.to_string(),
        },
    ]
}

/// Runs a transcript on a fresh session and evaluates the result.
///
/// Fails on the first turn that names a city the scenario's map lacks.
pub fn replay(
    scenario: &Scenario,
    transcript: &Transcript,
    channel: Channel,
    seed: u64,
    resources: &Resources,
) -> Result<(EvalReport, Session), SessionError> {
    let mut session = Session::new(format!("replay-{}", scenario.name), scenario.clone(), seed, resources.clone())?;
    for (i, turn) in transcript.turns.iter().enumerate() {
        session.turn(&turn.text, channel);
        let last = session.turn_log.last().expect("turn was logged");
        if let Some(note) = last
            .acts
            .iter()
            .flat_map(|a| &a.unresolved)
            .find(|n| n.starts_with(UNRESOLVED) && !n.contains("engine="))
        {
            return Err(SessionError::Mismatch {
                turn: i + 1,
                message: format!("{note} is not on map {}", resources.map.name),
            });
        }
    }
    let refs: Vec<Option<Vec<Token>>> = transcript.turns.iter().map(|t| t.reference.clone()).collect();
    Ok((session.report(&refs), session))
}

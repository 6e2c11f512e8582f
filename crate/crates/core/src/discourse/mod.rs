//! Discourse state, reference resolution and the verbal reasoner that turns
//! act sequences into problem-solving steps and system responses.

mod interpret;
mod resolve;
mod rules;

use serde::Serialize;

use crate::generator::SystemAct;

pub use interpret::{Interpretation, Reasoner, RuleFiring};
pub use resolve::{resolve_references, Content, ResolvedAct, UNRESOLVED};
pub use rules::{Action, ContentKind, OthersPattern, RuleSet, TopPattern, VerbalRule, FIXTURE_RULES};

#[derive(Debug, thiserror::Error)]
pub enum DiscourseError {
    #[error("pop on an empty discourse stack")]
    EmptyStack,
    #[error("rule file: {0}")]
    RuleFile(String),
    #[error("rule {name}: {message}")]
    Rule { name: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
}

/// A question the system is waiting on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Question {
    Route { engine: String, from: String, to: String },
    Destination { engine: String },
}

/// The goal that opened a segment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SegmentGoal {
    /// The whole task: get trains to every goal city.
    Task,
    Move { engine: String },
    Clarify { question: Question },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum PsStatus {
    Open,
    Achieved,
    Failed,
    AwaitingClarification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscourseFrame {
    pub goal: SegmentGoal,
    focus: Option<String>,
    history: Vec<String>,
    pub status: PsStatus,
    /// A route proposal in this segment awaits the user's answer.
    pub proposal: bool,
}

impl DiscourseFrame {
    pub fn new(goal: SegmentGoal) -> Self {
        let status = match goal {
            SegmentGoal::Clarify { .. } => PsStatus::AwaitingClarification,
            _ => PsStatus::Open,
        };
        let mut frame = DiscourseFrame {
            goal,
            focus: None,
            history: Vec::new(),
            status,
            proposal: false,
        };
        if let Some(e) = frame.engine().map(str::to_string) {
            frame.attend(&e);
        }
        frame
    }

    /// The engine this segment is about, if any.
    pub fn engine(&self) -> Option<&str> {
        match &self.goal {
            SegmentGoal::Task => None,
            SegmentGoal::Move { engine } => Some(engine),
            SegmentGoal::Clarify {
                question: Question::Route { engine, .. } | Question::Destination { engine },
            } => Some(engine),
        }
    }

    pub fn focus(&self) -> Option<&str> {
        self.focus.as_deref()
    }

    pub fn history(&self) -> &[String] {
        &self.history
    }

    /// Makes `entity` the focus, moving it to the head of the history.
    pub fn attend(&mut self, entity: &str) {
        self.history.retain(|h| h != entity);
        self.history.insert(0, entity.to_string());
        self.focus = Some(entity.to_string());
    }

    pub fn is_well_formed(&self) -> bool {
        match &self.focus {
            Some(f) => self.history.first() == Some(f),
            None => true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DiscourseState {
    stack: Vec<DiscourseFrame>,
    pub last_system_act: Option<SystemAct>,
    /// Consecutive turns answered by the catch-all.
    pub clarify_streak: u32,
    /// The user closed the dialogue with every goal met.
    pub complete: bool,
}

impl DiscourseState {
    pub fn new() -> Self {
        DiscourseState::default()
    }

    pub fn push_segment(&mut self, frame: DiscourseFrame) {
        debug_assert!(frame.is_well_formed());
        self.stack.push(frame);
    }

    pub fn pop_segment(&mut self) -> Result<DiscourseFrame, DiscourseError> {
        self.stack.pop().ok_or(DiscourseError::EmptyStack)
    }

    pub fn stack(&self) -> &[DiscourseFrame] {
        &self.stack
    }

    pub fn depth(&self) -> usize {
        self.stack.len()
    }

    pub fn top(&self) -> Option<&DiscourseFrame> {
        self.stack.last()
    }

    pub fn top_mut(&mut self) -> Option<&mut DiscourseFrame> {
        self.stack.last_mut()
    }

    pub fn pending_clarification(&self) -> Option<&Question> {
        match &self.top()?.goal {
            SegmentGoal::Clarify { question } => Some(question),
            _ => None,
        }
    }

    /// Focus of the innermost segment that has one.
    pub fn focus(&self) -> Option<&str> {
        self.stack.iter().rev().find_map(|f| f.focus())
    }

    /// Entities by recency of mention, innermost segment first.
    pub fn recent(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for frame in self.stack.iter().rev() {
            for h in frame.history() {
                if !out.contains(&h.as_str()) {
                    out.push(h);
                }
            }
        }
        out
    }
}

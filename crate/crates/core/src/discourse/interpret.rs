use rand::Rng;
use serde::Serialize;

use super::{
    Action, ContentKind, DiscourseFrame, DiscourseState, OthersPattern, PsStatus, Question, ResolvedAct, RuleSet,
    SegmentGoal, TopPattern, VerbalRule,
};
use crate::generator::SystemAct;
use crate::solver::{Outcome, ProblemState, PsResult, Request, World, CROSS_PENALTY_HOURS};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleFiring {
    /// Index of the act in the turn.
    pub act: usize,
    pub rule: String,
    pub priority: u32,
    pub action: Action,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Interpretation {
    pub responses: Vec<SystemAct>,
    pub requests: Vec<Request>,
    pub outcomes: Vec<PsResult>,
    pub firings: Vec<RuleFiring>,
}

/// Applies the prioritized rules to a turn's resolved acts.
#[derive(Debug, Clone)]
pub struct Reasoner {
    rules: RuleSet,
}

impl Reasoner {
    pub fn new(rules: RuleSet) -> Self {
        Reasoner { rules }
    }

    pub fn fixture() -> Self {
        Reasoner::new(RuleSet::fixture())
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    /// The first rule, by priority, matching act `i` of `acts`.
    pub fn matching_rule(&self, acts: &[ResolvedAct], i: usize, state: &DiscourseState) -> &VerbalRule {
        let act = &acts[i];
        let others = acts
            .iter()
            .enumerate()
            .any(|(j, a)| j != i && matches!(a.kind, ContentKind::Route | ContentKind::Engine | ContentKind::Clear | ContentKind::Done));
        let top = state.top();
        self.rules
            .rules()
            .iter()
            .find(|r| {
                r.acts.as_ref().is_none_or(|s| s.contains(&act.act_type))
                    && r.content.as_ref().is_none_or(|s| s.contains(&act.kind))
                    && match r.top {
                        TopPattern::Any => true,
                        TopPattern::Empty => top.is_none(),
                        TopPattern::Proposal => top.is_some_and(|f| f.proposal),
                        TopPattern::Clarification => state.pending_clarification().is_some(),
                        TopPattern::Goal => top.is_some_and(|f| matches!(f.goal, SegmentGoal::Move { .. })),
                    }
                    && match r.others {
                        OthersPattern::Any => true,
                        OthersPattern::None => !others,
                        OthersPattern::Some => others,
                    }
            })
            .expect("rule sets end with a catch-all")
    }

    /// Interprets one turn. Each act fires its first matching rule in turn
    /// order; the catch-all only answers when no specific rule fired.
    pub fn interpret<R: Rng + ?Sized>(
        &self,
        acts: &[ResolvedAct],
        state: &mut DiscourseState,
        ps: &mut ProblemState,
        world: &mut World,
        rng: &mut R,
    ) -> Interpretation {
        let mut out = Interpretation::default();
        let mut specific = false;
        let mut specific_responses = Vec::new();
        for i in 0..acts.len() {
            let rule = self.matching_rule(acts, i, state);
            out.firings.push(RuleFiring {
                act: i,
                rule: rule.name.clone(),
                priority: rule.priority,
                action: rule.action,
            });
            if rule.is_catch_all() {
                continue;
            }
            specific = true;
            let mut step = Step {
                state: &mut *state,
                ps: &mut *ps,
                world: &mut *world,
                out: &mut out,
            };
            let responses = step.run(rule.action, &acts[i], rng);
            specific_responses.extend(responses);
        }

        let responses = if specific {
            state.clarify_streak = 0;
            if specific_responses.iter().any(|r| *r != SystemAct::Acknowledge) {
                specific_responses.retain(|r| *r != SystemAct::Acknowledge);
            }
            specific_responses.dedup();
            if specific_responses.is_empty() {
                vec![SystemAct::Acknowledge]
            } else {
                specific_responses
            }
        } else {
            let quip = state.clarify_streak >= 2;
            state.clarify_streak += 1;
            vec![SystemAct::Clarify { quip }]
        };
        state.last_system_act = responses.last().cloned();
        out.responses = responses;
        out
    }
}

struct Step<'a> {
    state: &'a mut DiscourseState,
    ps: &'a mut ProblemState,
    world: &'a mut World,
    out: &'a mut Interpretation,
}

impl Step<'_> {
    fn run<R: Rng + ?Sized>(&mut self, action: Action, act: &ResolvedAct, rng: &mut R) -> Vec<SystemAct> {
        match action {
            Action::Ignore => vec![],
            Action::Acknowledge => vec![SystemAct::Acknowledge],
            Action::Clarify => vec![SystemAct::Clarify { quip: false }],
            Action::Accept => self.accept(),
            Action::Reject => self.reject(),
            Action::Close => self.close(),
            Action::ClearRoute => self.clear(act),
            Action::Answer => {
                if self.state.pending_clarification().is_some() {
                    let _ = self.state.pop_segment();
                }
                self.solve(act.content.request(), rng)
            }
            Action::Solve => self.solve(act.content.request(), rng),
            Action::Focus => {
                if let Some(e) = &act.content.engine {
                    self.ps.focus = Some(e.clone());
                    self.ensure_task();
                    if let Some(top) = self.state.top_mut() {
                        top.attend(e);
                    }
                }
                vec![]
            }
        }
    }

    fn proposal_engine(&self) -> Option<String> {
        self.state.top().filter(|f| f.proposal).and_then(|f| f.engine()).map(str::to_string)
    }

    fn accept(&mut self) -> Vec<SystemAct> {
        let Some(engine) = self.proposal_engine() else {
            return vec![SystemAct::Acknowledge];
        };
        if let Some(top) = self.state.top_mut() {
            top.proposal = false;
        }
        match self.ps.accept(&engine, self.world) {
            Some(true) => {
                if let Some(top) = self.state.top_mut() {
                    top.status = PsStatus::Achieved;
                }
                let _ = self.state.pop_segment();
                vec![SystemAct::Acknowledge]
            }
            // a partial route is settled; the user steers the rest
            Some(false) | None => vec![SystemAct::Acknowledge],
        }
    }

    fn reject(&mut self) -> Vec<SystemAct> {
        if let Some(engine) = self.proposal_engine() {
            self.ps.reject(&engine, self.world);
            if let Some(top) = self.state.top_mut() {
                top.proposal = false;
            }
        }
        vec![SystemAct::Acknowledge]
    }

    fn close(&mut self) -> Vec<SystemAct> {
        if self.world.goals_met() {
            while self.state.pop_segment().is_ok() {}
            self.state.complete = true;
            vec![SystemAct::Close]
        } else {
            vec![SystemAct::GoalsUnmet {
                cities: self.world.unmet_goals(),
            }]
        }
    }

    fn clear(&mut self, act: &ResolvedAct) -> Vec<SystemAct> {
        let engine = act
            .content
            .engine
            .clone()
            .or_else(|| self.state.focus().map(str::to_string))
            .or_else(|| self.ps.focus.clone());
        let Some(engine) = engine.filter(|e| self.world.engine(e).is_some()) else {
            return vec![SystemAct::NoEngine { city: None }];
        };
        self.ps.clear(&engine, self.world);
        while self.state.top().is_some_and(|f| f.engine() == Some(engine.as_str())) {
            let _ = self.state.pop_segment();
        }
        vec![SystemAct::ClearRoute { engine }]
    }

    fn ensure_task(&mut self) {
        if self.state.depth() == 0 {
            self.state.push_segment(DiscourseFrame::new(SegmentGoal::Task));
        }
    }

    /// Makes the segment for `engine` current: reuses an open one, popping
    /// what lies above it, or pushes a new one.
    fn enter_goal(&mut self, engine: &str) {
        self.ensure_task();
        let is_goal = |f: &DiscourseFrame| f.goal == SegmentGoal::Move { engine: engine.to_string() };
        if self.state.stack().iter().any(is_goal) {
            while !self.state.top().is_some_and(is_goal) {
                let _ = self.state.pop_segment();
            }
        } else {
            self.state.push_segment(DiscourseFrame::new(SegmentGoal::Move {
                engine: engine.to_string(),
            }));
        }
        if let Some(top) = self.state.top_mut() {
            top.attend(engine);
        }
    }

    fn solve<R: Rng + ?Sized>(&mut self, req: Request, rng: &mut R) -> Vec<SystemAct> {
        let result = self.ps.incorporate(&req, self.world, rng);
        self.out.requests.push(req);
        self.out.outcomes.push(result.clone());
        match result.outcome {
            Outcome::Proposed { engine, route, complete } => {
                self.enter_goal(&engine);
                if let Some(top) = self.state.top_mut() {
                    top.proposal = true;
                    top.status = PsStatus::Open;
                }
                let mut acts = vec![SystemAct::ProposeRoute {
                    engine: engine.clone(),
                    route,
                    complete,
                }];
                let crossed = self.world.crossings(&engine);
                if !crossed.is_empty() {
                    acts.push(SystemAct::RoutesCross {
                        engine,
                        cities: crossed.into_iter().collect(),
                        hours: CROSS_PENALTY_HOURS,
                    });
                }
                acts
            }
            Outcome::NeedRoute { engine, from, to } => {
                self.enter_goal(&engine);
                if let Some(top) = self.state.top_mut() {
                    top.proposal = false;
                }
                self.state.push_segment(DiscourseFrame::new(SegmentGoal::Clarify {
                    question: Question::Route {
                        engine: engine.clone(),
                        from: from.clone(),
                        to: to.clone(),
                    },
                }));
                vec![SystemAct::ClarifyRoute { engine, from, to }]
            }
            Outcome::NeedDestination { engine } => {
                self.enter_goal(&engine);
                self.state.push_segment(DiscourseFrame::new(SegmentGoal::Clarify {
                    question: Question::Destination { engine: engine.clone() },
                }));
                vec![SystemAct::ClarifyDest { engine }]
            }
            Outcome::NoPath { engine, from, to } => {
                self.enter_goal(&engine);
                if let Some(top) = self.state.top_mut() {
                    top.status = PsStatus::Failed;
                    top.proposal = false;
                }
                vec![SystemAct::NoPath { engine, from, to }]
            }
            Outcome::NoEngine { city } => vec![SystemAct::NoEngine { city }],
            Outcome::AlreadyThere { engine } => {
                self.enter_goal(&engine);
                vec![SystemAct::Acknowledge]
            }
        }
    }
}

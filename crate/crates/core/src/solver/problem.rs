//! Problem solving: decides whether a grounded request extends, corrects or
//! starts a plan, and keeps the per-engine goals the planner works towards.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::Serialize;

use super::planner::{plan_route, PlanError};
use super::World;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GoalStatus {
    /// No route proposed yet, or the last proposal was rejected.
    Planning,
    Proposed { complete: bool },
    Accepted,
}

/// What one engine is being routed towards.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Goal {
    pub engine: String,
    /// Settled route cities before `leg_start`.
    pub prefix: Vec<String>,
    pub leg_start: String,
    pub dest: String,
    pub via: Vec<String>,
    pub avoid: BTreeSet<String>,
    pub status: GoalStatus,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ProblemState {
    pub goals: BTreeMap<String, Goal>,
    pub focus: Option<String>,
}

/// Grounded route content of one speech act.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Request {
    /// Engine named explicitly; `None` leaves the choice to the rules.
    pub engine: Option<String>,
    pub origin: Option<String>,
    pub dest: Option<String>,
    pub via: Vec<String>,
    pub avoid: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Extension,
    FocusShift,
    Correction,
    NewGoal,
    Clarify,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Proposed {
        engine: String,
        route: Vec<String>,
        complete: bool,
    },
    /// The planner needs an intermediate city.
    NeedRoute { engine: String, from: String, to: String },
    NoPath { engine: String, from: String, to: String },
    /// No engine fits; `city` is the origin that had none.
    NoEngine { city: Option<String> },
    NeedDestination { engine: String },
    AlreadyThere { engine: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsResult {
    pub branch: Branch,
    pub outcome: Outcome,
}

type Selector = fn(&Request, &ProblemState, &World) -> Option<String>;

/// A problem-solving rule: the first rule, by priority, whose selector picks
/// an engine decides the branch.
pub struct PsRule {
    pub priority: u32,
    pub branch: Branch,
    select: Selector,
}

fn subject<'a>(req: &'a Request, state: &'a ProblemState) -> Option<&'a String> {
    req.engine.as_ref().or(state.focus.as_ref())
}

fn extension(req: &Request, state: &ProblemState, world: &World) -> Option<String> {
    let e = world.engine(subject(req, state)?)?;
    let planned = e.route.is_some() || state.goals.contains_key(&e.id);
    match &req.origin {
        Some(o) => (e.current() == o && e.route.is_some()).then(|| e.id.clone()),
        None => planned.then(|| e.id.clone()),
    }
}

fn focus_shift(req: &Request, state: &ProblemState, world: &World) -> Option<String> {
    let (o, f) = (req.origin.as_ref()?, state.focus.as_ref()?);
    if req.engine.is_some() {
        return None;
    }
    world.engines_at(o).into_iter().find(|e| &e.id != f).map(|e| e.id.clone())
}

fn correction(req: &Request, state: &ProblemState, world: &World) -> Option<String> {
    let o = req.origin.as_ref()?;
    let e = world.engine(subject(req, state)?)?;
    let on_route = e.route.as_ref().is_some_and(|r| r.contains(o));
    (on_route && e.current() != o).then(|| e.id.clone())
}

fn new_goal(req: &Request, state: &ProblemState, world: &World) -> Option<String> {
    match (&req.origin, subject(req, state)) {
        (Some(o), Some(id)) => world
            .engine(id)
            .filter(|e| e.current() == o)
            .map(|e| e.id.clone()),
        (Some(o), None) => world.engines_at(o).first().map(|e| e.id.clone()),
        (None, Some(id)) => world.engine(id).map(|e| e.id.clone()),
        (None, None) => None,
    }
}

fn anything(_: &Request, _: &ProblemState, _: &World) -> Option<String> {
    None
}

pub const PS_RULES: [PsRule; 5] = [
    PsRule {
        priority: 10,
        branch: Branch::Extension,
        select: extension,
    },
    PsRule {
        priority: 20,
        branch: Branch::FocusShift,
        select: focus_shift,
    },
    PsRule {
        priority: 30,
        branch: Branch::Correction,
        select: correction,
    },
    PsRule {
        priority: 40,
        branch: Branch::NewGoal,
        select: new_goal,
    },
    PsRule {
        priority: 1000,
        branch: Branch::Clarify,
        select: anything,
    },
];

/// Picks the branch and the engine it applies to.
pub fn choose_branch(req: &Request, state: &ProblemState, world: &World) -> (Branch, Option<String>) {
    for rule in &PS_RULES {
        if let Some(engine) = (rule.select)(req, state, world) {
            return (rule.branch, Some(engine));
        }
    }
    (Branch::Clarify, None)
}

impl ProblemState {
    pub fn goal(&self, engine: &str) -> Option<&Goal> {
        self.goals.get(engine)
    }

    /// The focused engine's goal if it carries an unanswered proposal.
    pub fn pending_proposal(&self) -> Option<&Goal> {
        let g = self.goals.get(self.focus.as_ref()?)?;
        matches!(g.status, GoalStatus::Proposed { .. }).then_some(g)
    }

    /// Fits `req` into the plan, updating goals, routes and focus.
    pub fn incorporate<R: Rng + ?Sized>(&mut self, req: &Request, world: &mut World, rng: &mut R) -> PsResult {
        let (branch, engine) = choose_branch(req, self, world);
        let Some(engine) = engine else {
            return PsResult {
                branch,
                outcome: Outcome::NoEngine {
                    city: req.origin.clone(),
                },
            };
        };
        self.focus = Some(engine.clone());
        let outcome = match branch {
            Branch::Correction => self.correct(&engine, req, world, rng),
            _ => self.extend(&engine, req, world, rng),
        };
        PsResult { branch, outcome }
    }

    fn correct<R: Rng + ?Sized>(&mut self, engine: &str, req: &Request, world: &mut World, rng: &mut R) -> Outcome {
        let origin = req.origin.clone().expect("corrections name an origin");
        let route = world.engine(engine).and_then(|e| e.route.clone()).unwrap_or_default();
        let cut = route.iter().position(|c| *c == origin).unwrap_or(0);
        let prefix = route[..cut].to_vec();
        let old = self.goals.get(engine);
        let Some(dest) = req.dest.clone().or_else(|| old.map(|g| g.dest.clone())) else {
            return Outcome::NeedDestination {
                engine: engine.to_string(),
            };
        };
        let via = if req.via.is_empty() {
            old.map(|g| g.via.clone()).unwrap_or_default()
        } else {
            req.via.clone()
        };
        let via = via.into_iter().filter(|c| !prefix.contains(c) && *c != origin).collect();
        let mut avoid: BTreeSet<String> = old.map(|g| g.avoid.clone()).unwrap_or_default();
        avoid.extend(req.avoid.iter().cloned());
        let mut goal = Goal {
            engine: engine.to_string(),
            prefix,
            leg_start: origin,
            dest,
            via,
            avoid,
            status: GoalStatus::Planning,
        };
        // a correction that adds nothing new is taken as a wish to dodge the delays
        let congested: BTreeSet<String> = world.congested.keys().cloned().collect();
        let mut outcome = plan_goal(&mut goal, &congested, world, rng);
        if !congested.is_empty() && !matches!(outcome, Outcome::Proposed { complete: true, .. }) {
            outcome = plan_goal(&mut goal, &BTreeSet::new(), world, rng);
        }
        self.goals.insert(engine.to_string(), goal);
        outcome
    }

    fn extend<R: Rng + ?Sized>(&mut self, engine: &str, req: &Request, world: &mut World, rng: &mut R) -> Outcome {
        let e = world.engine(engine).expect("rules only pick known engines").clone();
        let current = e.current().to_string();
        let open = self
            .goals
            .get(engine)
            .filter(|g| g.status != GoalStatus::Accepted)
            .cloned();
        let constraining = !req.via.is_empty() || !req.avoid.is_empty();

        if req.dest.as_deref() == Some(current.as_str()) && !constraining {
            return Outcome::AlreadyThere {
                engine: engine.to_string(),
            };
        }

        // constrain or redirect the goal still being planned
        let reuse = match (&req.origin, &open) {
            (Some(o), Some(g)) => *o == g.leg_start && (req.dest.is_none() || constraining),
            (None, Some(_)) => true,
            (None, None) => constraining && req.dest.is_none() && self.goals.contains_key(engine),
            (Some(_), None) => false,
        };
        if reuse {
            let mut goal = open.or_else(|| self.goals.get(engine).cloned()).unwrap();
            if let Some(d) = &req.dest {
                goal.dest = d.clone();
            }
            if !req.via.is_empty() {
                goal.via = req.via.clone();
            }
            goal.avoid.extend(req.avoid.iter().cloned());
            let outcome = plan_goal(&mut goal, &BTreeSet::new(), world, rng);
            self.goals.insert(engine.to_string(), goal);
            return outcome;
        }

        let Some(dest) = req.dest.clone() else {
            return Outcome::NeedDestination {
                engine: engine.to_string(),
            };
        };
        let mut prefix = e.route.clone().unwrap_or_default();
        prefix.pop();
        let mut goal = Goal {
            engine: engine.to_string(),
            prefix,
            leg_start: current,
            dest,
            via: req.via.clone(),
            avoid: req.avoid.iter().cloned().collect(),
            status: GoalStatus::Planning,
        };
        let outcome = plan_goal(&mut goal, &BTreeSet::new(), world, rng);
        self.goals.insert(engine.to_string(), goal);
        outcome
    }

    /// Accepts the pending proposal for `engine`. A partial route becomes the
    /// settled start of the goal. Returns whether the goal is now complete.
    pub fn accept(&mut self, engine: &str, world: &World) -> Option<bool> {
        let goal = self.goals.get_mut(engine)?;
        let GoalStatus::Proposed { complete } = goal.status else {
            return None;
        };
        if complete {
            goal.status = GoalStatus::Accepted;
        } else {
            let route = world.engine(engine)?.route.clone().unwrap_or_default();
            if let Some((last, before)) = route.split_last() {
                goal.prefix = before.to_vec();
                goal.leg_start = last.clone();
                goal.via.retain(|c| !route.contains(c));
            }
            goal.status = GoalStatus::Planning;
        }
        Some(complete)
    }

    /// Withdraws the pending proposal for `engine`, keeping the goal.
    pub fn reject(&mut self, engine: &str, world: &mut World) -> bool {
        let Some(goal) = self.goals.get_mut(engine) else {
            return false;
        };
        if !matches!(goal.status, GoalStatus::Proposed { .. }) {
            return false;
        }
        let mut settled = goal.prefix.clone();
        settled.push(goal.leg_start.clone());
        goal.status = GoalStatus::Planning;
        world.assign(engine, settled).is_ok()
    }

    /// Drops the engine's route and goal.
    pub fn clear(&mut self, engine: &str, world: &mut World) -> bool {
        self.goals.remove(engine);
        world.clear_route(engine).is_ok()
    }
}

fn plan_goal<R: Rng + ?Sized>(goal: &mut Goal, extra_avoid: &BTreeSet<String>, world: &mut World, rng: &mut R) -> Outcome {
    let mut avoid = goal.avoid.clone();
    avoid.extend(extra_avoid.iter().cloned());
    avoid.extend(goal.prefix.iter().cloned());
    let engine = goal.engine.clone();
    let settled = |tail: &[String]| {
        let mut r = goal.prefix.clone();
        r.extend_from_slice(tail);
        r
    };
    let planned = plan_route(&world.map.clone(), &goal.leg_start, &goal.dest, &goal.via, &avoid, rng);
    match planned {
        Ok(route) => {
            let full = settled(&route.path);
            let _ = world.assign(&engine, full.clone());
            goal.status = GoalStatus::Proposed { complete: true };
            Outcome::Proposed {
                engine,
                route: full,
                complete: true,
            }
        }
        Err(PlanError::TooLong { partial: Some(p) }) => {
            let full = settled(&p);
            let _ = world.assign(&engine, full.clone());
            goal.status = GoalStatus::Proposed { complete: false };
            Outcome::Proposed {
                engine,
                route: full,
                complete: false,
            }
        }
        Err(e) => {
            let _ = world.assign(&engine, settled(std::slice::from_ref(&goal.leg_start)));
            goal.status = GoalStatus::Planning;
            let (from, to) = (goal.leg_start.clone(), goal.dest.clone());
            match e {
                PlanError::TooLong { .. } => Outcome::NeedRoute { engine, from, to },
                _ => Outcome::NoPath { engine, from, to },
            }
        }
    }
}

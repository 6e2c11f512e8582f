//! World state, the route planner and the problem-solving rules.

mod map;
pub mod planner;
mod problem;
mod scenario;
mod world;

use thiserror::Error;

pub use map::{City, RouteMap, Track, FIXTURE_MAP};
pub use planner::{admissible_routes, paths_within, plan_route, PlanError, Route, MAX_LEG_HOPS};
pub use problem::{
    choose_branch, Branch, Goal, GoalStatus, Outcome, ProblemState, PsResult, PsRule, Request,
    PS_RULES,
};
pub use scenario::{EnginePlacement, Scenario};
pub use world::{CongestionEvent, Engine, Score, World, CROSS_PENALTY_HOURS};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("malformed file: {0}")]
    Format(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("unknown city {0}")]
    UnknownCity(String),
    #[error("unknown engine {0}")]
    UnknownEngine(String),
    #[error("invalid route: {0}")]
    InvalidRoute(String),
}

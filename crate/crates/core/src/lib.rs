pub mod corpus;
pub mod discourse;
pub mod generator;
pub mod grammar;
pub mod session;
pub mod solver;
pub mod speechpp;

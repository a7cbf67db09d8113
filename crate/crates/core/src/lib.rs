//! Graph-guided evaluation harness for customer-service dialogue agents.
//!
//! Scenario packs declare classification fields, system variables, actions,
//! and a decision graph that formalizes a Standard Operating Procedure.
//! The harness enumerates every valid decision path, synthesizes covering
//! test cases, drives multi-turn user/service/judge dialogues, derives
//! deterministic ground truth by replaying the graph, and scores agents on
//! two axes: logical compliance and chat quality.

pub mod agents;
pub mod coverage;
pub mod eval;
pub mod graph;
pub mod orchestrator;
pub mod par;
pub mod report;
pub mod scenario;

//! Inspectable record of one evaluation.

use super::Strategy;
use serde::{Deserialize, Serialize};

/// How many times each reasoner operation ran.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallCounts {
    pub identify: u64,
    pub reframe: u64,
    pub knows: u64,
    pub update: u64,
    pub answer: u64,
    pub filter: u64,
}

impl CallCounts {
    pub fn total(&self) -> u64 {
        self.identify + self.reframe + self.knows + self.update + self.answer + self.filter
    }
}

/// One awareness judgment inside a pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionTrace {
    /// Statement index within the pass input story.
    pub index: usize,
    pub statement: String,
    pub known: bool,
    pub basis: String,
}

/// One perspective simulation: the story filtered through one agent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassTrace {
    pub agent: String,
    /// The question after this agent's belief layer was removed.
    pub reframed_question: String,
    /// Indices (within the pass input) of statements the agent knows.
    pub kept_indices: Vec<usize>,
    pub decisions: Vec<DecisionTrace>,
    /// World text before any statement, then after each statement.
    pub world_snapshots: Vec<String>,
}

/// Everything observable about one evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub record_id: String,
    pub strategy: Strategy,
    pub passes: Vec<PassTrace>,
    /// Perspective-filtered story text, for the one-shot filtering strategy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filtered_story: Option<Vec<String>>,
    pub final_answer: char,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationale: Option<String>,
    pub calls: CallCounts,
}

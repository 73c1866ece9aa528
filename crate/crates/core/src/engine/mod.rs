//! The simulation engine and the reasoner interface it drives.
//!
//! The engine is backend-agnostic: every judgment it needs (whose viewpoint
//! a question asks about, how to shorten the question, whether an agent
//! witnessed a statement, how a statement changes the world, and how to
//! answer a factual question) is delegated to a [`Reasoner`]. Backends only
//! answer local questions; the recursion lives here.

mod run;
mod trace;

pub use run::{decompose_tom, evaluate, run_baseline, simulate_pass, Outcome};
pub use trace::{CallCounts, DecisionTrace, PassTrace, SimulationTrace};

use crate::model::{AgentId, ChoiceSet, ChunkUnit, ModelError, Question, Statement, Story};
use crate::world::{WorldParseError, WorldState};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Whose eyes a story is being read through.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Perspective {
    /// The omniscient reader: nothing is filtered.
    Narrator,
    Agent(AgentId),
}

impl fmt::Display for Perspective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Perspective::Narrator => f.write_str(crate::model::NARRATOR),
            Perspective::Agent(a) => f.write_str(a.as_str()),
        }
    }
}

/// One awareness judgment: did the agent witness the statement, and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Awareness {
    pub known: bool,
    /// Short provenance note for traces: a rule name or a model response.
    pub basis: String,
}

impl Awareness {
    pub fn new(known: bool, basis: impl Into<String>) -> Self {
        Awareness {
            known,
            basis: basis.into(),
        }
    }
}

/// A chosen option label plus any free-text justification the backend gave.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Answer {
    pub label: char,
    pub rationale: Option<String>,
}

/// How a final answer should be produced.
#[derive(Debug, Clone, Copy)]
pub enum AnswerMode<'a> {
    /// Answer the fully reduced question from the last simulated viewpoint.
    Simulation {
        perspective: &'a Perspective,
        simulated: &'a [AgentId],
    },
    /// Answer from a perspective-filtered story without reduction.
    SimTom { agent: &'a AgentId },
    /// Answer the original question directly, label only.
    Direct,
    /// Answer the original question directly, reasoning aloud first.
    ChainOfThought,
}

/// Answering strategies the harness can compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "mc")]
    ZeroShotMc,
    #[serde(rename = "cot")]
    ChainOfThought,
    #[serde(rename = "simtom")]
    SimTom,
    #[serde(rename = "decompose")]
    Decompose,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::ZeroShotMc,
        Strategy::ChainOfThought,
        Strategy::SimTom,
        Strategy::Decompose,
    ];

    pub fn parse(s: &str) -> Option<Strategy> {
        match s {
            "mc" => Some(Strategy::ZeroShotMc),
            "cot" => Some(Strategy::ChainOfThought),
            "simtom" => Some(Strategy::SimTom),
            "decompose" => Some(Strategy::Decompose),
            _ => None,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::ZeroShotMc => "mc",
            Strategy::ChainOfThought => "cot",
            Strategy::SimTom => "simtom",
            Strategy::Decompose => "decompose",
        })
    }
}

/// Engine-level settings for one evaluation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub strategy: Strategy,
    /// Re-chunk stories at this granularity; `None` keeps record chunking.
    pub chunk_unit: Option<ChunkUnit>,
    /// Upper bound on simulation passes before giving up.
    pub max_passes: usize,
    /// Rule text injected into answering prompts, overriding any per-record
    /// preamble.
    pub preamble: Option<String>,
}

impl RunConfig {
    pub fn new(strategy: Strategy) -> Self {
        RunConfig {
            strategy,
            chunk_unit: None,
            max_passes: 8,
            preamble: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ReasonerError {
    #[error("asked to reframe for {expected} but the question starts with {got}")]
    AgentMismatch { expected: String, got: String },
    #[error("this backend cannot process stories of this kind")]
    UnsupportedStoryKind,
    #[error("this backend cannot process questions of this form")]
    UnsupportedQuestion,
    #[error("no placement of {object:?} survives in the filtered story")]
    NoObservation { object: String },
    #[error("believed container {container:?} is not among the choices")]
    LabelNotFound { container: String },
    #[error("simulation did not terminate within {limit} passes")]
    PassLimitExceeded { limit: usize },
    #[error("no option label found in response {response:?}")]
    UnparseableAnswer { response: String },
    #[error("response {response:?} names no agent from the story")]
    InvalidAgentName { response: String },
    #[error("response {response:?} is not a yes/no judgment")]
    UnparseableBoolean { response: String },
    #[error("malformed response: {what}")]
    MalformedResponse { what: String },
    #[error("prompt placeholder {{{name}}} has no binding")]
    UnboundPlaceholder { name: String },
    #[error("chat endpoint returned status {status}: {body}")]
    Http { status: u16, body: String },
    #[error("chat request timed out or could not connect: {0}")]
    Transport(String),
    #[error("environment variable {var} is not set (required for API access)")]
    AuthMissing { var: String },
    #[error(transparent)]
    World(#[from] WorldParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for ReasonerError {
    fn from(e: std::io::Error) -> Self {
        ReasonerError::Io(e.to_string())
    }
}

/// The five simulation judgments plus the two direct-answer operations the
/// baseline strategies need. Implementations must be usable from worker
/// threads.
pub trait Reasoner: Send + Sync {
    /// Whose viewpoint does the question ask about? `Narrator` when the
    /// question is factual.
    fn identify_agent(&self, question: &Question, story: &Story)
        -> Result<Perspective, ReasonerError>;

    /// Removes the outermost belief layer, which must belong to `agent`.
    fn reframe(&self, agent: &AgentId, question: &Question) -> Result<Question, ReasonerError>;

    /// Did `agent` witness `statement`, given the story so far as the agent
    /// knows it and everyone's current whereabouts?
    fn knows(
        &self,
        agent: &AgentId,
        statement: &Statement,
        prior: &Story,
        world: &WorldState,
    ) -> Result<Awareness, ReasonerError>;

    /// Applies one statement's movement effect to the world.
    fn update_world(
        &self,
        world: &WorldState,
        statement: &Statement,
    ) -> Result<WorldState, ReasonerError>;

    /// Picks an option label for the question over the given story.
    fn answer(
        &self,
        story: &Story,
        question: &Question,
        choices: &ChoiceSet,
        rules: Option<&str>,
        mode: AnswerMode<'_>,
    ) -> Result<Answer, ReasonerError>;

    /// One-shot story filtering from an agent's perspective.
    fn filter_story(&self, agent: &AgentId, story: &Story) -> Result<Story, ReasonerError>;
}

/// Finds the option label in a free-form response: the last standalone
/// capital letter within the label range. Letters embedded in words do not
/// count.
pub fn extract_label(response: &str, choices: &ChoiceSet) -> Result<char, ReasonerError> {
    let is_word = |c: char| c.is_alphanumeric() || c == '_';
    let chars: Vec<char> = response.chars().collect();
    for (i, &ch) in chars.iter().enumerate().rev() {
        if !choices.contains_label(ch) {
            continue;
        }
        let before_ok = i == 0 || !is_word(chars[i - 1]);
        let after_ok = i + 1 == chars.len() || !is_word(chars[i + 1]);
        if before_ok && after_ok {
            return Ok(ch);
        }
    }
    Err(ReasonerError::UnparseableAnswer {
        response: response.to_string(),
    })
}

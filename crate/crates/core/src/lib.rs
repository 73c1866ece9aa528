//! Recursive perspective simulation for theory-of-mind question answering.
//!
//! The engine answers nested belief questions ("Where does A think B thinks
//! the X is?") by peeling one agent off the question at a time and replaying
//! the story as that agent experienced it: statements the agent could not
//! have witnessed are dropped, a running world state tracks who is in which
//! room, and the process recurses on the filtered story until the question
//! is factual. The final filtered story is then answered directly.
//!
//! Two interchangeable backends drive the per-statement judgments: a
//! deterministic rule-based reasoner ([`symbolic::SymbolicReasoner`]) and a
//! chat-completion client ([`llm::LlmReasoner`]). A synthetic story
//! generator with an independent belief oracle ([`oracle`]) provides
//! labelled data for exercising both, and [`harness`] runs strategy
//! comparisons over record files.

pub mod engine;
pub mod fixtures;
pub mod harness;
pub mod llm;
pub mod model;
pub mod oracle;
pub mod preprocess;
pub mod symbolic;
pub mod world;

pub use engine::{
    evaluate, extract_label, Answer, AnswerMode, Awareness, CallCounts, DecisionTrace, Outcome,
    PassTrace, Perspective, Reasoner, ReasonerError, RunConfig, SimulationTrace, Strategy,
};
pub use model::{
    parse_question, render_question, AgentId, Category, Choice, ChoiceSet, ChunkUnit,
    FactualQuery, ModelError, ParsedEvent, Question, QuestionRecord, Statement, Story, StoryKind,
};
pub use world::{WorldState, UNKNOWN_LOCATION};

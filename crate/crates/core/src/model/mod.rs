//! Shared domain types: agents, statements, stories, questions, and the
//! JSON-lines record format consumed by the harness.

mod event;
mod question;
mod records;
mod segment;

pub use event::{parse_dialogue_turn, parse_story_events};
pub use question::{parse_question, render_question};
pub use records::{load_records, save_records};
pub use segment::{segment_chunks, ChunkUnit};

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Name reserved for the omniscient viewpoint; never a valid [`AgentId`].
pub const NARRATOR: &str = "Narrator";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("agent name must be non-empty and not the reserved narrator name")]
    InvalidAgentName,
    #[error("question does not match the belief-question template: {0}")]
    TemplateMismatch(String),
    #[error("choice labels must be consecutive letters starting at A, 2 to 15 options")]
    InvalidChoiceSet,
    #[error("record {id}: {reason}")]
    InvariantViolation { id: String, reason: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for ModelError {
    fn from(e: std::io::Error) -> Self {
        ModelError::Io(e.to_string())
    }
}

/// A story character. Non-empty and never the narrator sentinel.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(String);

impl AgentId {
    pub fn new(name: impl Into<String>) -> Result<Self, ModelError> {
        let name = name.into();
        if name.is_empty() || name == NARRATOR {
            return Err(ModelError::InvalidAgentName);
        }
        Ok(AgentId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Structured reading of a template story statement. Statements that match
/// no template stay unparsed and are treated as ambiguous by the rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParsedEvent {
    /// One or more agents walk into a location.
    Enter {
        agents: Vec<AgentId>,
        location: String,
    },
    /// An agent leaves a location (announced to everyone present).
    Exit { agent: AgentId, location: String },
    /// An agent stays put; position is unchanged.
    Stay { agent: AgentId, location: String },
    /// The object is observed inside a container.
    ObjectAt { object: String, container: String },
    /// An agent moves the object into a container.
    Move {
        agent: AgentId,
        object: String,
        container: String,
    },
    /// A private message naming the object's container.
    PrivateComm {
        speaker: AgentId,
        listener: AgentId,
        object: String,
        container: String,
    },
    /// A public announcement naming the object's container.
    PublicClaim {
        speaker: AgentId,
        object: String,
        container: String,
    },
    /// Static layout fact: a container sits in a location.
    ContainerIn { container: String, location: String },
    /// Irrelevant colour: an agent notices or likes something.
    Distractor { agent: AgentId },
    /// One turn of a conversation transcript.
    DialogueTurn { speaker: AgentId, text: String },
}

/// One chunk of a story: the raw text plus its structured reading, if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub index: usize,
    pub raw: String,
    pub parsed: Option<ParsedEvent>,
}

impl Statement {
    pub fn new(index: usize, raw: impl Into<String>, parsed: Option<ParsedEvent>) -> Self {
        Statement {
            index,
            raw: raw.into(),
            parsed,
        }
    }
}

/// Which family of surface text a story uses. Controls event parsing,
/// default chunking, and prompt selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StoryKind {
    #[serde(rename = "hitom")]
    HiTomTemplate,
    #[serde(rename = "fantom")]
    FantomDialogue,
    #[serde(rename = "free")]
    FreeText,
}

impl StoryKind {
    pub fn default_chunk_unit(self) -> ChunkUnit {
        match self {
            StoryKind::HiTomTemplate | StoryKind::FreeText => ChunkUnit::Sentence,
            StoryKind::FantomDialogue => ChunkUnit::DialogueTurn,
        }
    }
}

impl fmt::Display for StoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StoryKind::HiTomTemplate => "hitom",
            StoryKind::FantomDialogue => "fantom",
            StoryKind::FreeText => "free",
        })
    }
}

/// An ordered sequence of statements plus optional rule text shown to
/// answering prompts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Story {
    pub chunks: Vec<Statement>,
    pub kind: StoryKind,
    pub preamble: Option<String>,
}

impl Story {
    /// Builds a story from pre-split chunks, reindexing them 0..n.
    pub fn new(kind: StoryKind, mut chunks: Vec<Statement>) -> Self {
        for (i, c) in chunks.iter_mut().enumerate() {
            c.index = i;
        }
        Story {
            chunks,
            kind,
            preamble: None,
        }
    }

    /// Builds a story from chunk texts, attaching parsed events per kind.
    pub fn from_texts<S: AsRef<str>>(kind: StoryKind, texts: &[S]) -> Self {
        let raws: Vec<String> = texts.iter().map(|t| t.as_ref().to_string()).collect();
        let parsed: Vec<Option<ParsedEvent>> = match kind {
            StoryKind::HiTomTemplate => parse_story_events(&raws),
            StoryKind::FantomDialogue => raws.iter().map(|r| parse_dialogue_turn(r)).collect(),
            StoryKind::FreeText => vec![None; raws.len()],
        };
        let chunks = raws
            .into_iter()
            .zip(parsed)
            .enumerate()
            .map(|(i, (raw, p))| Statement::new(i, raw, p))
            .collect();
        Story {
            chunks,
            kind,
            preamble: None,
        }
    }

    pub fn with_preamble(mut self, preamble: Option<String>) -> Self {
        self.preamble = preamble;
        self
    }

    /// Full story text, one chunk per line.
    pub fn text(&self) -> String {
        let raws: Vec<&str> = self.chunks.iter().map(|c| c.raw.as_str()).collect();
        raws.join("\n")
    }

    /// Agents mentioned by parsed events, in order of first appearance.
    pub fn cast(&self) -> Vec<AgentId> {
        let mut seen = Vec::new();
        let mut push = |a: &AgentId| {
            if !seen.contains(a) {
                seen.push(a.clone());
            }
        };
        for c in &self.chunks {
            match &c.parsed {
                Some(ParsedEvent::Enter { agents, .. }) => agents.iter().for_each(&mut push),
                Some(ParsedEvent::Exit { agent, .. })
                | Some(ParsedEvent::Stay { agent, .. })
                | Some(ParsedEvent::Move { agent, .. })
                | Some(ParsedEvent::Distractor { agent }) => push(agent),
                Some(ParsedEvent::PrivateComm {
                    speaker, listener, ..
                }) => {
                    push(speaker);
                    push(listener);
                }
                Some(ParsedEvent::PublicClaim { speaker, .. })
                | Some(ParsedEvent::DialogueTurn { speaker, .. }) => push(speaker),
                _ => {}
            }
        }
        seen
    }

    /// True if any chunk text contains the given name as a whole word.
    pub fn mentions(&self, name: &str) -> bool {
        let is_word = |c: char| c.is_alphanumeric() || c == '_';
        self.chunks.iter().any(|c| {
            c.raw.match_indices(name).any(|(at, _)| {
                let before_ok = c.raw[..at].chars().next_back().map_or(true, |ch| !is_word(ch));
                let after_ok = c.raw[at + name.len()..]
                    .chars()
                    .next()
                    .map_or(true, |ch| !is_word(ch));
                before_ok && after_ok
            })
        })
    }
}

/// The factual core left after stripping every belief layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactualQuery {
    /// "Where is the object?" for template stories.
    WhereIs { object: String },
    /// Opaque question text answered as-is (dialogue and free-text stories).
    RawBinary { text: String },
}

/// A question with its belief chain, outermost agent first. An empty chain
/// means the question is factual (narrator viewpoint).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub raw: String,
    pub chain: Vec<AgentId>,
    pub core: FactualQuery,
}

impl Question {
    /// Wraps question text that is never decomposed structurally.
    pub fn opaque(text: impl Into<String>) -> Self {
        let text = text.into();
        Question {
            raw: text.clone(),
            chain: Vec::new(),
            core: FactualQuery::RawBinary { text },
        }
    }

    /// Nesting depth: number of belief layers around the core.
    pub fn order(&self) -> usize {
        self.chain.len()
    }
}

/// A labelled answer option.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Choice {
    pub label: char,
    pub text: String,
}

/// Between 2 and 15 options labelled with consecutive letters from 'A'.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiceSet {
    options: Vec<Choice>,
}

impl ChoiceSet {
    pub fn new(options: Vec<Choice>) -> Result<Self, ModelError> {
        if options.len() < 2 || options.len() > 15 {
            return Err(ModelError::InvalidChoiceSet);
        }
        for (i, c) in options.iter().enumerate() {
            if c.label != (b'A' + i as u8) as char {
                return Err(ModelError::InvalidChoiceSet);
            }
        }
        Ok(ChoiceSet { options })
    }

    /// Assigns labels A.. to the given option texts.
    pub fn from_texts<S: Into<String>>(texts: Vec<S>) -> Result<Self, ModelError> {
        let options = texts
            .into_iter()
            .enumerate()
            .map(|(i, t)| Choice {
                label: (b'A' + i as u8) as char,
                text: t.into(),
            })
            .collect();
        ChoiceSet::new(options)
    }

    pub fn options(&self) -> &[Choice] {
        &self.options
    }

    pub fn len(&self) -> usize {
        self.options.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last_label(&self) -> char {
        (b'A' + (self.options.len() - 1) as u8) as char
    }

    pub fn contains_label(&self, label: char) -> bool {
        label >= 'A' && label <= self.last_label()
    }

    pub fn text_for(&self, label: char) -> Option<&str> {
        self.options
            .iter()
            .find(|c| c.label == label)
            .map(|c| c.text.as_str())
    }

    pub fn label_for(&self, text: &str) -> Option<char> {
        self.options
            .iter()
            .find(|c| c.text == text)
            .map(|c| c.label)
    }

    /// Inline rendering: "A. first, B. second, ...".
    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .options
            .iter()
            .map(|c| format!("{}. {}", c.label, c.text))
            .collect();
        parts.join(", ")
    }
}

/// Benchmark slice a record belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "tell")]
    Tell,
    #[serde(rename = "no_tell")]
    NoTell,
    #[serde(rename = "fantom_short")]
    FantomShort,
    #[serde(rename = "fantom_long")]
    FantomLong,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Tell => "tell",
            Category::NoTell => "no_tell",
            Category::FantomShort => "fantom_short",
            Category::FantomLong => "fantom_long",
        })
    }
}

/// One evaluable item: a story, a question over it, options, and metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionRecord {
    pub id: String,
    pub story: Story,
    pub question: Question,
    pub choices: ChoiceSet,
    pub gold_label: Option<char>,
    pub order: usize,
    pub category: Category,
}

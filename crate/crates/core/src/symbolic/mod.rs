//! Deterministic rule-based reasoner for template stories.
//!
//! Implements every simulation judgment with closed-form rules, so engine
//! behaviour can be tested end to end without a language model. Only the
//! room-and-container template grammar is supported; other story kinds are
//! rejected rather than half-understood.

pub mod rules;

use crate::engine::{
    Answer, AnswerMode, Awareness, Perspective, Reasoner, ReasonerError,
};
use crate::model::{AgentId, ChoiceSet, FactualQuery, Question, Statement, Story, StoryKind};
use crate::world::{self, WorldState};
use rules::BeliefSource;

#[derive(Debug, Clone, Copy, Default)]
pub struct SymbolicReasoner;

impl SymbolicReasoner {
    pub fn new() -> Self {
        SymbolicReasoner
    }
}

fn guard_template(story: &Story) -> Result<(), ReasonerError> {
    if story.kind == StoryKind::HiTomTemplate {
        Ok(())
    } else {
        Err(ReasonerError::UnsupportedStoryKind)
    }
}

fn answer_from_belief(
    story: &Story,
    object: &str,
    perspective: &Perspective,
    choices: &ChoiceSet,
) -> Result<Answer, ReasonerError> {
    let resolved = rules::resolve_belief(&story.chunks, object, perspective).ok_or_else(|| {
        ReasonerError::NoObservation {
            object: object.to_string(),
        }
    })?;
    let (container, source) = resolved;
    let label = choices
        .label_for(&container)
        .ok_or_else(|| ReasonerError::LabelNotFound {
            container: container.clone(),
        })?;
    let rationale = match source {
        BeliefSource::Observation => format!(
            "{perspective} last knew the {object} to be in the {container}, and no later claim was trusted"
        ),
        BeliefSource::TrustedClaim { speaker, position } => format!(
            "{perspective} trusts the claim by {speaker} (statement {position}) placing the {object} in the {container}"
        ),
    };
    Ok(Answer {
        label,
        rationale: Some(rationale),
    })
}

impl Reasoner for SymbolicReasoner {
    fn identify_agent(
        &self,
        question: &Question,
        story: &Story,
    ) -> Result<Perspective, ReasonerError> {
        guard_template(story)?;
        Ok(match question.chain.first() {
            Some(agent) => Perspective::Agent(agent.clone()),
            None => Perspective::Narrator,
        })
    }

    fn reframe(&self, agent: &AgentId, question: &Question) -> Result<Question, ReasonerError> {
        match question.chain.split_first() {
            Some((head, rest)) if head == agent => {
                Ok(Question::from_parts(rest.to_vec(), question.core.clone()))
            }
            Some((head, _)) => Err(ReasonerError::AgentMismatch {
                expected: agent.to_string(),
                got: head.to_string(),
            }),
            None => Err(ReasonerError::AgentMismatch {
                expected: agent.to_string(),
                got: "a factual question".to_string(),
            }),
        }
    }

    fn knows(
        &self,
        agent: &AgentId,
        statement: &Statement,
        prior: &Story,
        world: &WorldState,
    ) -> Result<Awareness, ReasonerError> {
        guard_template(prior)?;
        Ok(rules::knows(agent, statement, &prior.chunks, world))
    }

    fn update_world(
        &self,
        world: &WorldState,
        statement: &Statement,
    ) -> Result<WorldState, ReasonerError> {
        Ok(world::apply_event(world, statement))
    }

    fn answer(
        &self,
        story: &Story,
        question: &Question,
        choices: &ChoiceSet,
        _rules: Option<&str>,
        mode: AnswerMode<'_>,
    ) -> Result<Answer, ReasonerError> {
        guard_template(story)?;
        let object = match &question.core {
            FactualQuery::WhereIs { object } => object,
            FactualQuery::RawBinary { .. } => return Err(ReasonerError::UnsupportedQuestion),
        };
        let perspective = match mode {
            AnswerMode::Simulation { perspective, .. } => perspective.clone(),
            AnswerMode::SimTom { agent } => Perspective::Agent(agent.clone()),
            AnswerMode::Direct | AnswerMode::ChainOfThought => Perspective::Narrator,
        };
        answer_from_belief(story, object, &perspective, choices)
    }

    fn filter_story(&self, agent: &AgentId, story: &Story) -> Result<Story, ReasonerError> {
        guard_template(story)?;
        let mut world = world::setup_world(story);
        let mut kept = Story {
            chunks: Vec::new(),
            kind: story.kind,
            preamble: story.preamble.clone(),
        };
        for chunk in &story.chunks {
            let awareness = rules::knows(agent, chunk, &kept.chunks, &world);
            if awareness.known {
                let reindexed =
                    Statement::new(kept.chunks.len(), chunk.raw.clone(), chunk.parsed.clone());
                kept.chunks.push(reindexed);
            }
            world = world::apply_event(&world, chunk);
        }
        Ok(kept)
    }
}

//! The recursive simulation loop and the baseline strategies.

use super::trace::{CallCounts, DecisionTrace, PassTrace, SimulationTrace};
use super::{Answer, AnswerMode, Perspective, Reasoner, ReasonerError, RunConfig, Strategy};
use crate::model::{segment_chunks, AgentId, Question, QuestionRecord, Statement, Story};
use crate::world;

/// An evaluation's answer plus its full trace.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub answer: Answer,
    pub trace: SimulationTrace,
}

/// Replays a story as one agent experienced it. Every statement receives an
/// awareness judgment against the world as it stood before that statement,
/// and the world then advances whether or not the statement was kept.
pub fn simulate_pass(
    agent: &AgentId,
    story: &Story,
    reframed_question: &Question,
    reasoner: &dyn Reasoner,
    calls: &mut CallCounts,
) -> Result<(Story, PassTrace), ReasonerError> {
    let mut world = world::setup_world(story);
    let mut kept = Story {
        chunks: Vec::new(),
        kind: story.kind,
        preamble: story.preamble.clone(),
    };
    let mut kept_indices = Vec::new();
    let mut decisions = Vec::new();
    let mut snapshots = vec![world.to_string()];

    for chunk in &story.chunks {
        calls.knows += 1;
        let awareness = reasoner.knows(agent, chunk, &kept, &world)?;
        decisions.push(DecisionTrace {
            index: chunk.index,
            statement: chunk.raw.clone(),
            known: awareness.known,
            basis: awareness.basis,
        });
        if awareness.known {
            kept_indices.push(chunk.index);
            let reindexed = Statement::new(kept.chunks.len(), chunk.raw.clone(), chunk.parsed.clone());
            kept.chunks.push(reindexed);
        }
        calls.update += 1;
        world = reasoner.update_world(&world, chunk)?;
        snapshots.push(world.to_string());
    }

    let pass = PassTrace {
        agent: agent.to_string(),
        reframed_question: reframed_question.raw.clone(),
        kept_indices,
        decisions,
        world_snapshots: snapshots,
    };
    Ok((kept, pass))
}

/// Recursive perspective simulation: peel the outermost agent off the
/// question, filter the story through that agent's eyes, and repeat until
/// the question is factual; then answer over the final filtered story.
pub fn decompose_tom(
    record: &QuestionRecord,
    story: &Story,
    reasoner: &dyn Reasoner,
    cfg: &RunConfig,
    rules: Option<&str>,
) -> Result<Outcome, ReasonerError> {
    let mut calls = CallCounts::default();
    let mut story = story.clone();
    let mut question = record.question.clone();
    let mut simulated: Vec<AgentId> = Vec::new();
    let mut passes: Vec<PassTrace> = Vec::new();

    calls.identify += 1;
    let mut perspective = reasoner.identify_agent(&question, &story)?;
    while let Perspective::Agent(agent) = perspective {
        if passes.len() >= cfg.max_passes {
            return Err(ReasonerError::PassLimitExceeded {
                limit: cfg.max_passes,
            });
        }
        calls.reframe += 1;
        question = reasoner.reframe(&agent, &question)?;
        let (filtered, pass) = simulate_pass(&agent, &story, &question, reasoner, &mut calls)?;
        story = filtered;
        passes.push(pass);
        simulated.push(agent);
        calls.identify += 1;
        perspective = reasoner.identify_agent(&question, &story)?;
    }

    let viewpoint = match simulated.last() {
        Some(agent) => Perspective::Agent(agent.clone()),
        None => Perspective::Narrator,
    };
    calls.answer += 1;
    let answer = reasoner.answer(
        &story,
        &question,
        &record.choices,
        rules,
        AnswerMode::Simulation {
            perspective: &viewpoint,
            simulated: &simulated,
        },
    )?;

    let trace = SimulationTrace {
        record_id: record.id.clone(),
        strategy: Strategy::Decompose,
        passes,
        filtered_story: None,
        final_answer: answer.label,
        rationale: answer.rationale.clone(),
        calls,
    };
    Ok(Outcome { answer, trace })
}

/// Picks the agent a perspective-taking baseline should simulate without
/// spending a reasoner call: the question's outermost agent, or the first
/// cast member named in the question text.
fn structural_agent(question: &Question, story: &Story) -> Option<AgentId> {
    if let Some(agent) = question.chain.first() {
        return Some(agent.clone());
    }
    let cast = story.cast();
    for word in question.raw.split(|c: char| !(c.is_alphanumeric() || c == '_')) {
        if let Some(found) = cast.iter().find(|a| a.as_str() == word) {
            return Some(found.clone());
        }
    }
    None
}

/// Runs one of the non-recursive strategies.
pub fn run_baseline(
    record: &QuestionRecord,
    story: &Story,
    reasoner: &dyn Reasoner,
    strategy: Strategy,
    rules: Option<&str>,
) -> Result<Outcome, ReasonerError> {
    let mut calls = CallCounts::default();
    let mut filtered_story = None;
    let answer = match strategy {
        Strategy::ZeroShotMc => {
            calls.answer += 1;
            reasoner.answer(story, &record.question, &record.choices, rules, AnswerMode::Direct)?
        }
        Strategy::ChainOfThought => {
            calls.answer += 1;
            reasoner.answer(
                story,
                &record.question,
                &record.choices,
                rules,
                AnswerMode::ChainOfThought,
            )?
        }
        Strategy::SimTom => match structural_agent(&record.question, story) {
            Some(agent) => {
                calls.filter += 1;
                let filtered = reasoner.filter_story(&agent, story)?;
                filtered_story = Some(filtered.chunks.iter().map(|c| c.raw.clone()).collect());
                calls.answer += 1;
                reasoner.answer(
                    &filtered,
                    &record.question,
                    &record.choices,
                    rules,
                    AnswerMode::SimTom { agent: &agent },
                )?
            }
            None => {
                calls.answer += 1;
                reasoner.answer(story, &record.question, &record.choices, rules, AnswerMode::Direct)?
            }
        },
        Strategy::Decompose => {
            return decompose_tom(record, story, reasoner, &RunConfig::new(strategy), rules)
        }
    };

    let trace = SimulationTrace {
        record_id: record.id.clone(),
        strategy,
        passes: Vec::new(),
        filtered_story,
        final_answer: answer.label,
        rationale: answer.rationale.clone(),
        calls,
    };
    Ok(Outcome { answer, trace })
}

fn rechunk(story: &Story, unit: crate::model::ChunkUnit) -> Story {
    let chunks = segment_chunks(&story.text(), unit);
    let texts: Vec<String> = chunks.into_iter().map(|c| c.raw).collect();
    Story::from_texts(story.kind, &texts).with_preamble(story.preamble.clone())
}

/// Evaluates one record under the configured strategy.
pub fn evaluate(
    record: &QuestionRecord,
    reasoner: &dyn Reasoner,
    cfg: &RunConfig,
) -> Result<Outcome, ReasonerError> {
    let story = match cfg.chunk_unit {
        Some(unit) => rechunk(&record.story, unit),
        None => record.story.clone(),
    };
    let rules = cfg
        .preamble
        .as_deref()
        .or(record.story.preamble.as_deref());
    match cfg.strategy {
        Strategy::Decompose => decompose_tom(record, &story, reasoner, cfg, rules),
        other => run_baseline(record, &story, reasoner, other, rules),
    }
}

//! Ground-truth nested beliefs for template stories.
//!
//! [`belief_oracle`] computes, in one forward sweep, what every agent chain
//! up to a given depth believes about the object's location. For each chain
//! prefix it tracks which statements survive the chain's composed
//! perspective filters, using the same witnessing and trust rules as the
//! rule-based reasoner but none of its recursive machinery. The engine
//! reaches the same beliefs through repeated story filtering; agreement
//! between the two routes is the system's core correctness check.

mod generate;

pub use generate::{
    generate_story, generate_suite, write_suite, Deception, GenError, GenSpec, SuiteSpec,
};

use crate::model::{AgentId, ParsedEvent, Statement, Story};
use crate::symbolic::rules;
use crate::world::{self, WorldState};
use std::collections::HashMap;

/// What each agent chain believes about the tracked object.
#[derive(Debug, Clone, Default)]
pub struct BeliefState {
    object: Option<String>,
    true_container: Option<String>,
    beliefs: HashMap<Vec<AgentId>, String>,
}

impl BeliefState {
    /// The object whose location is tracked.
    pub fn object(&self) -> Option<&str> {
        self.object.as_deref()
    }

    /// Where the object actually is.
    pub fn true_container(&self) -> Option<&str> {
        self.true_container.as_deref()
    }

    /// Where the chain believes the object is. The empty chain is the
    /// narrator and returns the true container.
    pub fn belief_of(&self, chain: &[AgentId]) -> Option<&str> {
        if chain.is_empty() {
            return self.true_container();
        }
        self.beliefs.get(chain).map(|s| s.as_str())
    }

    pub fn chains(&self) -> impl Iterator<Item = (&[AgentId], &str)> {
        self.beliefs.iter().map(|(c, b)| (c.as_slice(), b.as_str()))
    }
}

/// Sighting and claim history for one chain, recorded as the sweep runs.
/// Positions index into the chain's surviving-statement list.
#[derive(Debug, Default)]
struct ChainRecord {
    last_obs: Option<(usize, String)>,
    claims: Vec<(usize, AgentId, String)>,
}

fn placement_of(statement: &Statement) -> Option<(&str, &str)> {
    match &statement.parsed {
        Some(ParsedEvent::ObjectAt { object, container })
        | Some(ParsedEvent::Move {
            object, container, ..
        }) => Some((object, container)),
        _ => None,
    }
}

fn claim_of(statement: &Statement) -> Option<(&AgentId, &str, &str)> {
    match &statement.parsed {
        Some(ParsedEvent::PublicClaim {
            speaker,
            object,
            container,
        })
        | Some(ParsedEvent::PrivateComm {
            speaker,
            object,
            container,
            ..
        }) => Some((speaker, object, container)),
        _ => None,
    }
}

/// Computes beliefs for every ordered chain of distinct cast members up to
/// `order` layers deep, plus the narrator's ground truth.
///
/// For each chain prefix the sweep keeps the statements that survive the
/// composed perspective filters: a statement survives `chain + [a]` when it
/// survives `chain` and agent `a` witnesses it, judged against the worlds
/// those filtered histories imply. Placements and claims are recorded per
/// chain as they arrive; trust is settled at the end.
pub fn belief_oracle(story: &Story, order: usize) -> BeliefState {
    let cast = story.cast();
    let tracked: Option<String> = story
        .chunks
        .iter()
        .find_map(|s| placement_of(s).map(|(o, _)| o.to_string()));

    // Chain prefixes in breadth-first order, so a prefix always appears
    // after its parent.
    let mut prefixes: Vec<Vec<AgentId>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<AgentId>> = vec![Vec::new()];
    for _ in 0..order {
        let mut next = Vec::new();
        for p in &frontier {
            for a in &cast {
                if !p.contains(a) {
                    let mut q = p.clone();
                    q.push(a.clone());
                    next.push(q);
                }
            }
        }
        prefixes.extend(next.iter().cloned());
        frontier = next;
    }

    let mut priors: HashMap<Vec<AgentId>, Vec<Statement>> = HashMap::new();
    let mut worlds: HashMap<Vec<AgentId>, WorldState> = HashMap::new();
    let mut records: HashMap<Vec<AgentId>, ChainRecord> = HashMap::new();
    let initial_world = world::setup_world(story);
    for p in &prefixes {
        priors.insert(p.clone(), Vec::new());
        if p.len() < order {
            worlds.insert(p.clone(), initial_world.clone());
        }
        if !p.is_empty() {
            records.insert(p.clone(), ChainRecord::default());
        }
    }

    let mut state = BeliefState {
        object: tracked.clone(),
        ..BeliefState::default()
    };

    for chunk in &story.chunks {
        let mut survive: HashMap<&[AgentId], bool> = HashMap::new();
        for p in &prefixes {
            let ok = match p.split_last() {
                None => true,
                Some((agent, parent)) => {
                    survive[parent]
                        && rules::knows(agent, chunk, &priors[p], &worlds[parent]).known
                }
            };
            survive.insert(p.as_slice(), ok);
        }

        if let Some((object, container)) = placement_of(chunk) {
            if tracked.as_deref() == Some(object) {
                state.true_container = Some(container.to_string());
                for p in &prefixes {
                    if !p.is_empty() && survive[p.as_slice()] {
                        let position = priors[p].len();
                        records.get_mut(p).expect("chain record").last_obs =
                            Some((position, container.to_string()));
                    }
                }
            }
        }
        if let Some((speaker, object, container)) = claim_of(chunk) {
            if tracked.as_deref() == Some(object) {
                for p in &prefixes {
                    if !p.is_empty() && survive[p.as_slice()] {
                        let position = priors[p].len();
                        records.get_mut(p).expect("chain record").claims.push((
                            position,
                            speaker.clone(),
                            container.to_string(),
                        ));
                    }
                }
            }
        }

        for p in &prefixes {
            if !survive[p.as_slice()] {
                continue;
            }
            let prior = priors.get_mut(p).expect("prior");
            prior.push(Statement::new(prior.len(), chunk.raw.clone(), chunk.parsed.clone()));
            if let Some(w) = worlds.get_mut(p) {
                *w = world::apply_event(w, chunk);
            }
        }
    }

    if tracked.is_none() {
        return state;
    }
    for chain in prefixes.iter().filter(|p| !p.is_empty()) {
        let agent = chain.last().expect("non-empty chain");
        let prior = &priors[chain];
        let record = &records[chain];
        let baseline = record
            .last_obs
            .as_ref()
            .map(|(pos, c)| (*pos, c.as_str()));
        let candidates: Vec<&(usize, AgentId, String)> = record
            .claims
            .iter()
            .filter(|(pos, _, _)| baseline.is_none_or(|(b, _)| *pos > b))
            .filter(|(_, speaker, _)| speaker != agent)
            .collect();
        let room = rules::resolve_trust_room(
            prior,
            baseline,
            candidates.first().map(|(_, _, c)| c.as_str()),
        );
        let log = rules::ExitLog::from_statements(prior);
        let trusted = candidates
            .iter()
            .rfind(|(_, speaker, _)| rules::exited_later(&log, speaker, agent, room.as_deref()));
        let belief = trusted
            .map(|(_, _, c)| c.clone())
            .or_else(|| baseline.map(|(_, c)| c.to_string()));
        if let Some(container) = belief {
            state.beliefs.insert(chain.clone(), container);
        }
    }
    state
}

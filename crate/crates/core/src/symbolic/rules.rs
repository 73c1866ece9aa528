//! Witnessing and trust rules over template statements.
//!
//! These predicates are the single source of truth for what an agent knows
//! and whose claims they trust. The rule-based reasoner applies them inside
//! the recursive simulation; the belief oracle applies the same predicates
//! in a forward sweep. The two disagree only if one of the surrounding
//! algorithms is wrong, which is exactly what the agreement tests check.

use crate::engine::{Awareness, Perspective};
use crate::model::{AgentId, ParsedEvent, Statement};
use crate::world::{WorldState, UNKNOWN_LOCATION};

/// Basis note for statements outside the template grammar.
pub const AMBIGUOUS_DEFAULT: &str = "ambiguous statement defaults to known";

fn same_location(world: &WorldState, agent: &AgentId, event_location: &str) -> bool {
    event_location != UNKNOWN_LOCATION && world.location_of(agent) == event_location
}

fn placed(world: &WorldState, judge: &AgentId, room: Option<&str>) -> Awareness {
    match room {
        None => Awareness::new(true, AMBIGUOUS_DEFAULT),
        Some(r) if same_location(world, judge, r) => Awareness::new(true, "same location"),
        Some(_) => Awareness::new(false, "different location"),
    }
}

/// Did `agent` witness `statement`? `prior` is the story so far as the
/// agent knows it and `world` holds everyone's position before the
/// statement takes effect.
///
/// Rules, in order of precedence: unparsed statements default to known;
/// layout facts are common knowledge; an agent always knows its own
/// actions; exits are announced to everyone; public claims reach everyone;
/// private messages reach only their two participants; everything else
/// requires being in the room where it happens.
pub fn knows(
    agent: &AgentId,
    statement: &Statement,
    prior: &[Statement],
    world: &WorldState,
) -> Awareness {
    let event = match &statement.parsed {
        None => return Awareness::new(true, AMBIGUOUS_DEFAULT),
        Some(e) => e,
    };
    match event {
        ParsedEvent::ContainerIn { .. } => Awareness::new(true, "layout fact"),
        ParsedEvent::Enter { agents, location } => {
            if agents.contains(agent) {
                Awareness::new(true, "own action")
            } else if same_location(world, agent, location) {
                Awareness::new(true, "same location")
            } else {
                Awareness::new(false, "different location")
            }
        }
        ParsedEvent::Exit { agent: actor, .. } => {
            if actor == agent {
                Awareness::new(true, "own action")
            } else {
                Awareness::new(true, "exit announced to everyone")
            }
        }
        ParsedEvent::Stay {
            agent: actor,
            location,
        } => {
            if actor == agent {
                Awareness::new(true, "own action")
            } else if same_location(world, agent, location) {
                Awareness::new(true, "same location")
            } else {
                Awareness::new(false, "different location")
            }
        }
        ParsedEvent::ObjectAt { container, .. } => {
            let room = container_room(prior, container).or_else(|| scene_before(prior, prior.len()));
            placed(world, agent, room)
        }
        ParsedEvent::Move {
            agent: actor,
            container,
            ..
        } => {
            if actor == agent {
                return Awareness::new(true, "own action");
            }
            let actor_location = world.location_of(actor);
            let room = if actor_location != UNKNOWN_LOCATION {
                Some(actor_location)
            } else {
                container_room(prior, container).or_else(|| scene_before(prior, prior.len()))
            };
            placed(world, agent, room)
        }
        ParsedEvent::PrivateComm {
            speaker, listener, ..
        } => {
            if speaker == agent {
                Awareness::new(true, "own action")
            } else if listener == agent {
                Awareness::new(true, "addressed privately")
            } else {
                Awareness::new(false, "private message excludes others")
            }
        }
        ParsedEvent::PublicClaim { speaker, .. } => {
            if speaker == agent {
                Awareness::new(true, "own action")
            } else {
                Awareness::new(true, "public announcement")
            }
        }
        ParsedEvent::Distractor { agent: actor } => {
            if actor == agent {
                Awareness::new(true, "own action")
            } else {
                let room = world.location_of(actor);
                if room != UNKNOWN_LOCATION && same_location(world, agent, room) {
                    Awareness::new(true, "same location")
                } else {
                    Awareness::new(false, "different location")
                }
            }
        }
        ParsedEvent::DialogueTurn { speaker, .. } => {
            if speaker == agent {
                return Awareness::new(true, "own action");
            }
            let room = world.location_of(speaker);
            if room != UNKNOWN_LOCATION && same_location(world, agent, room) {
                Awareness::new(true, "same conversation")
            } else {
                Awareness::new(false, "not in the conversation")
            }
        }
    }
}

/// Room assigned to a container by the first explicit layout statement.
pub fn container_room<'a>(statements: &'a [Statement], container: &str) -> Option<&'a str> {
    statements.iter().find_map(|s| match &s.parsed {
        Some(ParsedEvent::ContainerIn {
            container: c,
            location,
        }) if c == container => Some(location.as_str()),
        _ => None,
    })
}

/// Location of the last scene-setting entry strictly before `position`.
pub fn scene_before(statements: &[Statement], position: usize) -> Option<&str> {
    statements[..position.min(statements.len())]
        .iter()
        .rev()
        .find_map(|s| match &s.parsed {
            Some(ParsedEvent::Enter { location, .. }) => Some(location.as_str()),
            _ => None,
        })
}

/// Position and container of the last sighting or move of `object`.
pub fn last_placement<'a>(
    statements: &'a [Statement],
    object: &str,
) -> Option<(usize, &'a str)> {
    statements.iter().enumerate().rev().find_map(|(i, s)| match &s.parsed {
        Some(ParsedEvent::ObjectAt {
            object: o,
            container,
        })
        | Some(ParsedEvent::Move {
            object: o,
            container,
            ..
        }) if o == object => Some((i, container.as_str())),
        _ => None,
    })
}

/// A spoken statement about where the object is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim<'a> {
    pub position: usize,
    pub speaker: &'a AgentId,
    pub container: &'a str,
}

/// All claims about `object`, in story order.
pub fn claims_for<'a>(statements: &'a [Statement], object: &str) -> Vec<Claim<'a>> {
    statements
        .iter()
        .enumerate()
        .filter_map(|(i, s)| match &s.parsed {
            Some(ParsedEvent::PublicClaim {
                speaker,
                object: o,
                container,
            })
            | Some(ParsedEvent::PrivateComm {
                speaker,
                object: o,
                container,
                ..
            }) if o == object => Some(Claim {
                position: i,
                speaker,
                container,
            }),
            _ => None,
        })
        .collect()
}

/// Record of when each agent last left each room.
#[derive(Debug, Clone, Default)]
pub struct ExitLog {
    exits: Vec<(AgentId, String, usize)>,
}

impl ExitLog {
    pub fn from_statements(statements: &[Statement]) -> Self {
        let exits = statements
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match &s.parsed {
                Some(ParsedEvent::Exit { agent, location }) => {
                    Some((agent.clone(), location.clone(), i))
                }
                _ => None,
            })
            .collect();
        ExitLog { exits }
    }

    pub fn last_exit_from(&self, agent: &AgentId, room: &str) -> Option<usize> {
        self.exits
            .iter()
            .filter(|(a, r, _)| a == agent && r == room)
            .map(|(_, _, i)| *i)
            .max()
    }

    pub fn last_exit(&self, agent: &AgentId) -> Option<usize> {
        self.exits
            .iter()
            .filter(|(a, _, _)| a == agent)
            .map(|(_, _, i)| *i)
            .max()
    }
}

/// Trust rule: a claimant is credible to a perspective agent only if the
/// claimant left the relevant room later, and so carries fresher knowledge.
/// An agent who never left ranks later than every exit.
pub fn exited_later(
    log: &ExitLog,
    claimant: &AgentId,
    perspective: &AgentId,
    room: Option<&str>,
) -> bool {
    let rank = |a: &AgentId| -> u64 {
        let exit = match room {
            Some(r) => log.last_exit_from(a, r),
            None => log.last_exit(a),
        };
        exit.map(|i| i as u64).unwrap_or(u64::MAX)
    };
    rank(claimant) > rank(perspective)
}

/// The room whose exit order decides trust: where the believed container
/// sits, falling back to the scene of the baseline observation.
pub fn resolve_trust_room(
    statements: &[Statement],
    baseline: Option<(usize, &str)>,
    fallback_container: Option<&str>,
) -> Option<String> {
    match baseline {
        Some((position, container)) => container_room(statements, container)
            .or_else(|| scene_before(statements, position))
            .map(String::from),
        None => fallback_container
            .and_then(|c| container_room(statements, c))
            .map(String::from),
    }
}

/// Outcome of belief resolution: what the perspective holds and why.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BeliefSource {
    Observation,
    TrustedClaim { speaker: AgentId, position: usize },
}

/// Resolves what `perspective` believes about `object` over a story already
/// filtered to that perspective's knowledge. The last observed placement is
/// the baseline; a later claim overrides it only when the claimant passes
/// the trust rule. The narrator ignores claims entirely.
pub fn resolve_belief(
    statements: &[Statement],
    object: &str,
    perspective: &Perspective,
) -> Option<(String, BeliefSource)> {
    let baseline = last_placement(statements, object);
    let agent = match perspective {
        Perspective::Narrator => {
            return baseline.map(|(_, c)| (c.to_string(), BeliefSource::Observation))
        }
        Perspective::Agent(a) => a,
    };
    let claims = claims_for(statements, object);
    let after = baseline.map(|(p, _)| p);
    let candidates: Vec<&Claim<'_>> = claims
        .iter()
        .filter(|c| after.is_none_or(|p| c.position > p))
        .filter(|c| c.speaker != agent)
        .collect();
    let room = resolve_trust_room(
        statements,
        baseline,
        candidates.first().map(|c| c.container),
    );
    let log = ExitLog::from_statements(statements);
    let trusted = candidates
        .iter()
        .rfind(|c| exited_later(&log, c.speaker, agent, room.as_deref()));
    match (trusted, baseline) {
        (Some(c), _) => Some((
            c.container.to_string(),
            BeliefSource::TrustedClaim {
                speaker: c.speaker.clone(),
                position: c.position,
            },
        )),
        (None, Some((_, c))) => Some((c.to_string(), BeliefSource::Observation)),
        (None, None) => None,
    }
}

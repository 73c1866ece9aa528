//! Agent position tracking.
//!
//! A world state maps each location to the agents currently inside it. The
//! pseudo-location `Unknown` is always present and holds every agent whose
//! position is not established; an agent is never in two locations at once.
//! Only agent movement changes the state. Object positions are deliberately
//! not modelled here: belief resolution reads them from filtered stories.

use crate::model::{AgentId, ParsedEvent, Statement, Story, StoryKind};
use crate::preprocess;
use indexmap::IndexMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Pseudo-location for agents whose position is not established.
pub const UNKNOWN_LOCATION: &str = "Unknown";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WorldParseError {
    #[error("world entry {0:?} is not of the form `location:[a, b]`")]
    MalformedEntry(String),
    #[error("agent {0} appears in more than one location")]
    DuplicateAgent(String),
    #[error("invalid agent name in world text")]
    InvalidAgent,
}

/// Ordered map from location to the agents inside it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WorldState {
    locations: IndexMap<String, Vec<AgentId>>,
}

impl WorldState {
    /// Empty world: just the `Unknown` bucket.
    pub fn new() -> Self {
        let mut locations = IndexMap::new();
        locations.insert(UNKNOWN_LOCATION.to_string(), Vec::new());
        WorldState { locations }
    }

    /// Registers a location, keeping `Unknown` last.
    pub fn ensure_location(&mut self, name: &str) {
        if self.locations.contains_key(name) {
            return;
        }
        let unknown = self
            .locations
            .shift_remove(UNKNOWN_LOCATION)
            .unwrap_or_default();
        self.locations.insert(name.to_string(), Vec::new());
        self.locations.insert(UNKNOWN_LOCATION.to_string(), unknown);
    }

    /// Moves an agent into a location, removing it from wherever it was.
    pub fn place(&mut self, agent: &AgentId, location: &str) {
        self.ensure_location(location);
        for members in self.locations.values_mut() {
            members.retain(|a| a != agent);
        }
        self.locations
            .get_mut(location)
            .expect("location registered")
            .push(agent.clone());
    }

    /// The location currently holding the agent, or `Unknown`.
    pub fn location_of(&self, agent: &AgentId) -> &str {
        self.locations
            .iter()
            .find(|(_, members)| members.contains(agent))
            .map(|(loc, _)| loc.as_str())
            .unwrap_or(UNKNOWN_LOCATION)
    }

    pub fn locations(&self) -> impl Iterator<Item = (&str, &[AgentId])> {
        self.locations
            .iter()
            .map(|(l, m)| (l.as_str(), m.as_slice()))
    }

    /// Checks that every known agent sits in exactly one location.
    pub fn one_location_each(&self) -> bool {
        let mut seen: Vec<&AgentId> = Vec::new();
        for members in self.locations.values() {
            for a in members {
                if seen.contains(&a) {
                    return false;
                }
                seen.push(a);
            }
        }
        true
    }
}

impl fmt::Display for WorldState {
    /// Textual form consumed by prompts: `study:[Emma, Liam], Unknown:[]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (loc, members) in &self.locations {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            let names: Vec<&str> = members.iter().map(|a| a.as_str()).collect();
            write!(f, "{loc}:[{}]", names.join(", "))?;
        }
        Ok(())
    }
}

impl FromStr for WorldState {
    type Err = WorldParseError;

    /// Parses the textual form back into a state. The `Unknown` bucket is
    /// restored even if the text omits it.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut world = WorldState::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let (loc, after) = rest
                .split_once(":[")
                .ok_or_else(|| WorldParseError::MalformedEntry(rest.to_string()))?;
            let (members, after) = after
                .split_once(']')
                .ok_or_else(|| WorldParseError::MalformedEntry(rest.to_string()))?;
            let loc = loc.trim().trim_start_matches(',').trim();
            if loc.is_empty() {
                return Err(WorldParseError::MalformedEntry(rest.to_string()));
            }
            world.ensure_location(loc);
            for name in members.split(',') {
                let name = name.trim();
                if name.is_empty() {
                    continue;
                }
                let agent = AgentId::new(name).map_err(|_| WorldParseError::InvalidAgent)?;
                if world.location_of(&agent) != UNKNOWN_LOCATION
                    || world.locations[UNKNOWN_LOCATION].contains(&agent)
                {
                    return Err(WorldParseError::DuplicateAgent(name.to_string()));
                }
                world.place(&agent, loc);
            }
            rest = after.trim_start().trim_start_matches(',').trim_start();
        }
        Ok(world)
    }
}

/// Initial world for a story: every mentioned location registered, every
/// cast member in `Unknown`. Dialogue stories instead start with the
/// initial participants in conversation.
pub fn setup_world(story: &Story) -> WorldState {
    if story.kind == StoryKind::FantomDialogue {
        if let Ok(w) = preprocess::init_fantom_world(story) {
            return w;
        }
        return WorldState::new();
    }
    let mut world = WorldState::new();
    for c in &story.chunks {
        match &c.parsed {
            Some(ParsedEvent::Enter { location, .. })
            | Some(ParsedEvent::Exit { location, .. })
            | Some(ParsedEvent::Stay { location, .. })
            | Some(ParsedEvent::ContainerIn { location, .. }) => world.ensure_location(location),
            _ => {}
        }
    }
    for agent in story.cast() {
        world.place(&agent, UNKNOWN_LOCATION);
    }
    world
}

/// Applies one statement to a world state. Enters move agents into the
/// room, exits move them to `Unknown`, everything else leaves positions
/// untouched.
pub fn apply_event(world: &WorldState, statement: &Statement) -> WorldState {
    let mut next = world.clone();
    match &statement.parsed {
        Some(ParsedEvent::Enter { agents, location }) => {
            for a in agents {
                next.place(a, location);
            }
        }
        Some(ParsedEvent::Exit { agent, .. }) => {
            next.place(agent, UNKNOWN_LOCATION);
        }
        _ => {}
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ParsedEvent;
    use proptest::prelude::*;

    fn a(name: &str) -> AgentId {
        AgentId::new(name).unwrap()
    }

    fn stmt(parsed: ParsedEvent) -> Statement {
        Statement::new(0, "", Some(parsed))
    }

    #[test]
    fn new_world_has_only_the_unknown_bucket() {
        let w = WorldState::new();
        assert_eq!(w.to_string(), "Unknown:[]");
    }

    #[test]
    fn enter_moves_agents_and_exit_sends_to_unknown() {
        let mut w = WorldState::new();
        w.ensure_location("study");
        w.place(&a("Emma"), UNKNOWN_LOCATION);
        let w = apply_event(
            &w,
            &stmt(ParsedEvent::Enter {
                agents: vec![a("Emma")],
                location: "study".into(),
            }),
        );
        assert_eq!(w.location_of(&a("Emma")), "study");
        assert_eq!(w.to_string(), "study:[Emma], Unknown:[]");
        let w = apply_event(
            &w,
            &stmt(ParsedEvent::Exit {
                agent: a("Emma"),
                location: "study".into(),
            }),
        );
        assert_eq!(w.location_of(&a("Emma")), UNKNOWN_LOCATION);
        assert!(w.one_location_each());
    }

    #[test]
    fn non_movement_statements_leave_the_world_unchanged() {
        let mut w = WorldState::new();
        w.ensure_location("study");
        w.place(&a("Emma"), "study");
        let before = w.to_string();
        for ev in [
            ParsedEvent::Move {
                agent: a("Emma"),
                object: "tomato".into(),
                container: "red_container".into(),
            },
            ParsedEvent::ObjectAt {
                object: "tomato".into(),
                container: "red_container".into(),
            },
            ParsedEvent::PublicClaim {
                speaker: a("Emma"),
                object: "tomato".into(),
                container: "red_container".into(),
            },
            ParsedEvent::Stay {
                agent: a("Emma"),
                location: "study".into(),
            },
            ParsedEvent::Distractor { agent: a("Emma") },
        ] {
            assert_eq!(apply_event(&w, &stmt(ev)).to_string(), before);
        }
        let unparsed = Statement::new(0, "something odd happened", None);
        assert_eq!(apply_event(&w, &unparsed).to_string(), before);
    }

    #[test]
    fn setup_world_registers_rooms_and_parks_cast_in_unknown() {
        let story = Story::from_texts(
            StoryKind::HiTomTemplate,
            &[
                "Emma and Liam entered the study.",
                "The red_container is in the study.",
                "Liam exited the study.",
                "Liam entered the waiting_room.",
            ],
        );
        let w = setup_world(&story);
        assert_eq!(w.to_string(), "study:[], waiting_room:[], Unknown:[Emma, Liam]");
    }

    #[test]
    fn display_and_parse_round_trip() {
        let mut w = WorldState::new();
        w.ensure_location("study");
        w.ensure_location("waiting_room");
        w.place(&a("Emma"), "study");
        w.place(&a("Liam"), "study");
        w.place(&a("Sara"), UNKNOWN_LOCATION);
        let text = w.to_string();
        assert_eq!(text, "study:[Emma, Liam], waiting_room:[], Unknown:[Sara]");
        let parsed: WorldState = text.parse().unwrap();
        assert_eq!(parsed.to_string(), text);
        assert_eq!(parsed, w);
    }

    #[test]
    fn parse_restores_missing_unknown_bucket() {
        let w: WorldState = "study:[Emma]".parse().unwrap();
        assert_eq!(w.to_string(), "study:[Emma], Unknown:[]");
    }

    #[test]
    fn parse_rejects_duplicated_agents_and_malformed_text() {
        assert_eq!(
            "study:[Emma], hall:[Emma]".parse::<WorldState>(),
            Err(WorldParseError::DuplicateAgent("Emma".into()))
        );
        assert!(matches!(
            "study Emma".parse::<WorldState>(),
            Err(WorldParseError::MalformedEntry(_))
        ));
        assert!("".parse::<WorldState>().is_ok());
    }

    fn arb_event() -> impl Strategy<Value = ParsedEvent> {
        let name = prop_oneof![
            Just("Emma".to_string()),
            Just("Liam".to_string()),
            Just("Sara".to_string()),
            Just("Nathan".to_string()),
        ];
        let room = prop_oneof![Just("study".to_string()), Just("hall".to_string())];
        prop_oneof![
            (proptest::collection::vec(name.clone(), 1..3), room.clone()).prop_map(
                |(names, location)| {
                    let mut agents: Vec<AgentId> = Vec::new();
                    for n in names {
                        let a = AgentId::new(n).unwrap();
                        if !agents.contains(&a) {
                            agents.push(a);
                        }
                    }
                    ParsedEvent::Enter { agents, location }
                }
            ),
            (name.clone(), room.clone()).prop_map(|(n, location)| ParsedEvent::Exit {
                agent: AgentId::new(n).unwrap(),
                location,
            }),
            (name, room).prop_map(|(n, location)| ParsedEvent::Stay {
                agent: AgentId::new(n).unwrap(),
                location,
            }),
        ]
    }

    proptest! {
        #[test]
        fn replay_preserves_invariant_and_round_trips(
            events in proptest::collection::vec(arb_event(), 0..24)
        ) {
            let mut w = WorldState::new();
            for (i, ev) in events.into_iter().enumerate() {
                w = apply_event(&w, &Statement::new(i, "", Some(ev)));
                prop_assert!(w.one_location_each());
                let text = w.to_string();
                let reparsed: WorldState = text.parse().unwrap();
                prop_assert_eq!(reparsed.to_string(), text);
            }
        }
    }
}

//! Story normalisation before simulation.
//!
//! Template stories leave container locations implicit: a statement places
//! beans in a suitcase without saying which room the suitcase is in.
//! [`disambiguate_hitom`] recovers a container-to-room map by replaying the
//! story and prepends one explicit layout line per implicit container.
//! Dialogue stories carry no entry markers for the opening participants, so
//! [`init_fantom_world`] seeds the world with everyone already talking.

use crate::model::{AgentId, ParsedEvent, Story, StoryKind};
use crate::world::WorldState;
use indexmap::IndexMap;
use std::collections::{HashMap, HashSet};
use thiserror::Error;

/// Location name for participants of an ongoing conversation.
pub const IN_CONVERSATION: &str = "in-conversation";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PreprocessError {
    #[error("cannot resolve a room for container {container:?}")]
    UnresolvableContainer { container: String },
    #[error("story contains no dialogue turns")]
    EmptyConversation,
}

/// Container-to-room assignments recovered from a story replay.
///
/// A container's room is fixed by, in order of authority: an explicit
/// layout statement, the room the object was last placed in (for moves and
/// claims), or the room the current scene is set in (for sightings).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContainerMap {
    rooms: IndexMap<String, String>,
    declared: HashSet<String>,
}

impl ContainerMap {
    pub fn from_story(story: &Story) -> Result<Self, PreprocessError> {
        let mut map = ContainerMap::default();
        let mut scene: Option<String> = None;
        let mut object_room: HashMap<String, String> = HashMap::new();
        for chunk in &story.chunks {
            match &chunk.parsed {
                Some(ParsedEvent::Enter { location, .. }) => scene = Some(location.clone()),
                Some(ParsedEvent::ContainerIn {
                    container,
                    location,
                }) => {
                    map.rooms.insert(container.clone(), location.clone());
                    map.declared.insert(container.clone());
                }
                Some(ParsedEvent::ObjectAt { object, container }) => {
                    let room = map
                        .rooms
                        .get(container)
                        .cloned()
                        .or_else(|| scene.clone())
                        .ok_or_else(|| PreprocessError::UnresolvableContainer {
                            container: container.clone(),
                        })?;
                    map.rooms.entry(container.clone()).or_insert(room.clone());
                    object_room.insert(object.clone(), room);
                }
                Some(ParsedEvent::Move {
                    object, container, ..
                }) => {
                    let room = map
                        .rooms
                        .get(container)
                        .cloned()
                        .or_else(|| object_room.get(object).cloned())
                        .or_else(|| scene.clone())
                        .ok_or_else(|| PreprocessError::UnresolvableContainer {
                            container: container.clone(),
                        })?;
                    map.rooms.entry(container.clone()).or_insert(room.clone());
                    object_room.insert(object.clone(), room);
                }
                Some(ParsedEvent::PrivateComm {
                    object, container, ..
                })
                | Some(ParsedEvent::PublicClaim {
                    object, container, ..
                }) => {
                    let room = map
                        .rooms
                        .get(container)
                        .cloned()
                        .or_else(|| object_room.get(object).cloned())
                        .or_else(|| scene.clone())
                        .ok_or_else(|| PreprocessError::UnresolvableContainer {
                            container: container.clone(),
                        })?;
                    map.rooms.entry(container.clone()).or_insert(room);
                }
                _ => {}
            }
        }
        Ok(map)
    }

    pub fn room_of(&self, container: &str) -> Option<&str> {
        self.rooms.get(container).map(|s| s.as_str())
    }

    /// Containers never pinned by an explicit layout statement, in order of
    /// first reference.
    pub fn implicit(&self) -> impl Iterator<Item = (&str, &str)> {
        self.rooms
            .iter()
            .filter(|(c, _)| !self.declared.contains(*c))
            .map(|(c, r)| (c.as_str(), r.as_str()))
    }
}

/// Prepends one "The {container} is in the {room}." line per container the
/// story references without an explicit layout statement. Idempotent, and a
/// no-op for non-template stories.
pub fn disambiguate_hitom(story: &Story) -> Result<Story, PreprocessError> {
    if story.kind != StoryKind::HiTomTemplate {
        return Ok(story.clone());
    }
    let map = ContainerMap::from_story(story)?;
    let mut texts: Vec<String> = map
        .implicit()
        .map(|(c, r)| format!("The {c} is in the {r}."))
        .collect();
    if texts.is_empty() {
        return Ok(story.clone());
    }
    texts.extend(story.chunks.iter().map(|c| c.raw.clone()));
    Ok(Story::from_texts(story.kind, &texts).with_preamble(story.preamble.clone()))
}

fn announces_arrival(text: &str) -> bool {
    let lower = text.to_lowercase();
    ["i'm back", "i am back", "just joined", "just got here", "joining you"]
        .iter()
        .any(|p| lower.contains(p))
}

/// Initial world for a dialogue story: every speaker whose first turn is
/// ordinary speech starts in conversation. A speaker whose first turn
/// announces an arrival joined late and is left out.
pub fn init_fantom_world(story: &Story) -> Result<WorldState, PreprocessError> {
    let mut initial: Vec<AgentId> = Vec::new();
    let mut seen: Vec<AgentId> = Vec::new();
    for chunk in &story.chunks {
        if let Some(ParsedEvent::DialogueTurn { speaker, text }) = &chunk.parsed {
            if seen.contains(speaker) {
                continue;
            }
            seen.push(speaker.clone());
            if !announces_arrival(text) {
                initial.push(speaker.clone());
            }
        }
    }
    if seen.is_empty() {
        return Err(PreprocessError::EmptyConversation);
    }
    let mut world = WorldState::new();
    world.ensure_location(IN_CONVERSATION);
    for a in &initial {
        world.place(a, IN_CONVERSATION);
    }
    Ok(world)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn disambiguation_prepends_layout_lines_in_first_reference_order() {
        let story = fixtures::nested_room_story();
        let fixed = disambiguate_hitom(&story).unwrap();
        assert_eq!(fixed.chunks.len(), story.chunks.len() + 3);
        let raws: Vec<&str> = fixed.chunks[..3].iter().map(|c| c.raw.as_str()).collect();
        assert_eq!(
            raws,
            vec![
                "The red_container is in the study.",
                "The green_drawer is in the study.",
                "The blue_bottle is in the study.",
            ]
        );
        for (i, c) in fixed.chunks.iter().enumerate() {
            assert_eq!(c.index, i);
        }
        assert!(matches!(
            fixed.chunks[0].parsed,
            Some(ParsedEvent::ContainerIn { .. })
        ));
    }

    #[test]
    fn disambiguation_is_idempotent() {
        let story = fixtures::nested_room_story();
        let once = disambiguate_hitom(&story).unwrap();
        let twice = disambiguate_hitom(&once).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn claim_containers_resolve_to_the_objects_room_not_the_scene() {
        let story = fixtures::nested_room_story();
        let map = ContainerMap::from_story(&story).unwrap();
        assert_eq!(map.room_of("blue_bottle"), Some("study"));
        assert_eq!(map.room_of("green_drawer"), Some("study"));
        assert_eq!(map.room_of("red_container"), Some("study"));
    }

    #[test]
    fn declared_containers_are_not_duplicated() {
        let story = Story::from_texts(
            StoryKind::HiTomTemplate,
            &[
                "Bob entered the living room.",
                "The suitcase is in the living room.",
                "The beans are in the suitcase.",
            ],
        );
        let fixed = disambiguate_hitom(&story).unwrap();
        assert_eq!(fixed, story);
    }

    #[test]
    fn unresolvable_container_is_an_error() {
        let story = Story::from_texts(StoryKind::HiTomTemplate, &["The beans are in the suitcase."]);
        assert_eq!(
            disambiguate_hitom(&story),
            Err(PreprocessError::UnresolvableContainer {
                container: "suitcase".into()
            })
        );
    }

    #[test]
    fn initial_conversation_holds_every_opening_speaker() {
        let story = fixtures::dialogue_story();
        let world = init_fantom_world(&story).unwrap();
        assert_eq!(
            world.to_string(),
            "in-conversation:[Gianna, Sara, Javier], Unknown:[]"
        );
    }

    #[test]
    fn late_joiners_are_not_initial_participants() {
        let story = Story::from_texts(
            StoryKind::FantomDialogue,
            &[
                "Sara: Shall we start?",
                "Javier: Ready when you are.",
                "Gianna: Hi all, just joined. What are we doing?",
            ],
        );
        let world = init_fantom_world(&story).unwrap();
        assert_eq!(world.to_string(), "in-conversation:[Sara, Javier], Unknown:[]");
    }

    #[test]
    fn single_speaker_monologue_still_initialises() {
        let story = Story::from_texts(StoryKind::FantomDialogue, &["Sara: Talking to myself."]);
        let world = init_fantom_world(&story).unwrap();
        assert_eq!(world.to_string(), "in-conversation:[Sara], Unknown:[]");
    }

    #[test]
    fn story_without_turns_is_an_empty_conversation() {
        let story = Story::from_texts(StoryKind::FantomDialogue, &["no speakers here"]);
        assert_eq!(
            init_fantom_world(&story),
            Err(PreprocessError::EmptyConversation)
        );
    }
}

//! Template statement parsing for room-and-container stories.
//!
//! Parsing is two-pass: movement statements fix the set of room names, and
//! only then are "The X is in the Y." statements split into layout facts
//! (Y is a room) versus object placements (Y is a container).

use super::{AgentId, ParsedEvent};
use regex::Regex;
use std::sync::LazyLock;

static ORDINAL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\d+\.\s*").unwrap());
static ENTER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(.+?) entered the (.+)\.$").unwrap());
static EXIT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(\S+) exited the (.+)\.$").unwrap());
static STAY: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(\S+) made no movements and stayed in the (.+) for \d+ minutes?\.$").unwrap()
});
static MOVE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\S+) moved the (.+?) to the (.+)\.$").unwrap());
static PRIVATE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(\S+) privately told (\S+) that the (.+?) is in the (.+)\.$").unwrap()
});
static PUBLIC: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(\S+) publicly claimed that the (.+?) is in the (.+)\.$").unwrap()
});
static PLACEMENT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^The (.+?) (?:is|are) in the (.+)\.$").unwrap());
static DISTRACTOR: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(\S+) (?:saw|likes|dislikes|loves|hates) (?:a|an|the) .+\.$").unwrap()
});
static SPEAKER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^([A-Z][A-Za-z'_-]*):\s*(.*)$").unwrap());

fn strip_ordinal(raw: &str) -> &str {
    let raw = raw.trim();
    match ORDINAL.find(raw) {
        Some(m) => &raw[m.end()..],
        None => raw,
    }
}

/// "Emma", "Emma and Liam", or "Emma, Liam and Sara". Multi-word segments
/// disqualify the whole list.
fn parse_name_list(text: &str) -> Option<Vec<AgentId>> {
    let (head, tail) = match text.rsplit_once(" and ") {
        Some((h, t)) => (h, Some(t)),
        None => (text, None),
    };
    let mut names: Vec<&str> = head.split(", ").collect();
    if let Some(t) = tail {
        names.push(t);
    }
    let mut agents = Vec::with_capacity(names.len());
    for n in names {
        if !n.chars().next().is_some_and(|c| c.is_uppercase()) {
            return None;
        }
        if !n.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'' || c == '-') {
            return None;
        }
        agents.push(AgentId::new(n).ok()?);
    }
    if agents.is_empty() {
        None
    } else {
        Some(agents)
    }
}

fn agent(name: &str) -> Option<AgentId> {
    AgentId::new(name).ok()
}

/// First pass: everything except "The X is in the Y." disambiguation.
/// Returns the event (placement statements come back as `ObjectAt` with the
/// room/container question unresolved) and any room name the statement fixes.
fn parse_movement(text: &str) -> (Option<ParsedEvent>, Option<String>) {
    if let Some(c) = EXIT.captures(text) {
        if let Some(a) = agent(&c[1]) {
            let location = c[2].to_string();
            return (
                Some(ParsedEvent::Exit {
                    agent: a,
                    location: location.clone(),
                }),
                Some(location),
            );
        }
    }
    if let Some(c) = STAY.captures(text) {
        if let Some(a) = agent(&c[1]) {
            let location = c[2].to_string();
            return (
                Some(ParsedEvent::Stay {
                    agent: a,
                    location: location.clone(),
                }),
                Some(location),
            );
        }
    }
    if let Some(c) = ENTER.captures(text) {
        if let Some(agents) = parse_name_list(&c[1]) {
            let location = c[2].to_string();
            return (
                Some(ParsedEvent::Enter {
                    agents,
                    location: location.clone(),
                }),
                Some(location),
            );
        }
    }
    if let Some(c) = MOVE.captures(text) {
        if let Some(a) = agent(&c[1]) {
            return (
                Some(ParsedEvent::Move {
                    agent: a,
                    object: c[2].to_string(),
                    container: c[3].to_string(),
                }),
                None,
            );
        }
    }
    if let Some(c) = PRIVATE.captures(text) {
        if let (Some(s), Some(l)) = (agent(&c[1]), agent(&c[2])) {
            return (
                Some(ParsedEvent::PrivateComm {
                    speaker: s,
                    listener: l,
                    object: c[3].to_string(),
                    container: c[4].to_string(),
                }),
                None,
            );
        }
    }
    if let Some(c) = PUBLIC.captures(text) {
        if let Some(s) = agent(&c[1]) {
            return (
                Some(ParsedEvent::PublicClaim {
                    speaker: s,
                    object: c[2].to_string(),
                    container: c[3].to_string(),
                }),
                None,
            );
        }
    }
    if let Some(c) = DISTRACTOR.captures(text) {
        if let Some(a) = agent(&c[1]) {
            return (Some(ParsedEvent::Distractor { agent: a }), None);
        }
    }
    (None, None)
}

/// Parses a whole template story. Placement statements are classified
/// against the rooms named anywhere in the story, so a layout fact reads the
/// same regardless of where it appears.
pub fn parse_story_events(raws: &[String]) -> Vec<Option<ParsedEvent>> {
    let texts: Vec<&str> = raws.iter().map(|r| strip_ordinal(r)).collect();
    let mut rooms: Vec<String> = Vec::new();
    let mut first: Vec<Option<ParsedEvent>> = Vec::with_capacity(texts.len());
    for t in &texts {
        let (ev, room) = parse_movement(t);
        if let Some(r) = room {
            if !rooms.contains(&r) {
                rooms.push(r);
            }
        }
        first.push(ev);
    }
    texts
        .iter()
        .zip(first)
        .map(|(t, ev)| {
            if ev.is_some() {
                return ev;
            }
            if let Some(c) = PLACEMENT.captures(t) {
                let x = c[1].to_string();
                let y = c[2].to_string();
                if rooms.contains(&y) {
                    return Some(ParsedEvent::ContainerIn {
                        container: x,
                        location: y,
                    });
                }
                return Some(ParsedEvent::ObjectAt {
                    object: x,
                    container: y,
                });
            }
            None
        })
        .collect()
}

/// Parses one conversation chunk of the form "Speaker: text". Multi-line
/// chunks keep their full text; only the header line names the speaker.
pub fn parse_dialogue_turn(raw: &str) -> Option<ParsedEvent> {
    let trimmed = raw.trim_start();
    let (first, rest) = match trimmed.split_once('\n') {
        Some((f, r)) => (f, Some(r)),
        None => (trimmed, None),
    };
    let c = SPEAKER.captures(first)?;
    let speaker = agent(&c[1])?;
    let mut text = c[2].to_string();
    if let Some(r) = rest {
        text.push('\n');
        text.push_str(r);
    }
    Some(ParsedEvent::DialogueTurn { speaker, text })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn owned(texts: &[&str]) -> Vec<String> {
        texts.iter().map(|t| t.to_string()).collect()
    }

    fn a(name: &str) -> AgentId {
        AgentId::new(name).unwrap()
    }

    #[test]
    fn parses_enter_with_name_list_and_ordinal() {
        let events = parse_story_events(&owned(&[
            "1. Emma, Hannah, Liam, Nathan and Carter entered the study.",
        ]));
        assert_eq!(
            events[0],
            Some(ParsedEvent::Enter {
                agents: vec![a("Emma"), a("Hannah"), a("Liam"), a("Nathan"), a("Carter")],
                location: "study".into(),
            })
        );
    }

    #[test]
    fn parses_exit_stay_and_move() {
        let events = parse_story_events(&owned(&[
            "Emma, Liam and Sara entered the study.",
            "Liam made no movements and stayed in the study for 1 minute.",
            "Emma moved the tomato to the green_drawer.",
            "Emma exited the study.",
        ]));
        assert_eq!(
            events[1],
            Some(ParsedEvent::Stay {
                agent: a("Liam"),
                location: "study".into(),
            })
        );
        assert_eq!(
            events[2],
            Some(ParsedEvent::Move {
                agent: a("Emma"),
                object: "tomato".into(),
                container: "green_drawer".into(),
            })
        );
        assert_eq!(
            events[3],
            Some(ParsedEvent::Exit {
                agent: a("Emma"),
                location: "study".into(),
            })
        );
    }

    #[test]
    fn placement_splits_on_known_rooms() {
        let events = parse_story_events(&owned(&[
            "Emma entered the living room.",
            "The suitcase is in the living room.",
            "The beans are in the suitcase.",
        ]));
        assert_eq!(
            events[1],
            Some(ParsedEvent::ContainerIn {
                container: "suitcase".into(),
                location: "living room".into(),
            })
        );
        assert_eq!(
            events[2],
            Some(ParsedEvent::ObjectAt {
                object: "beans".into(),
                container: "suitcase".into(),
            })
        );
    }

    #[test]
    fn room_mentioned_later_still_classifies_early_placement() {
        let events = parse_story_events(&owned(&[
            "The suitcase is in the living room.",
            "Emma entered the living room.",
        ]));
        assert_eq!(
            events[0],
            Some(ParsedEvent::ContainerIn {
                container: "suitcase".into(),
                location: "living room".into(),
            })
        );
    }

    #[test]
    fn parses_claims_and_private_messages() {
        let events = parse_story_events(&owned(&[
            "Nathan publicly claimed that the tomato is in the blue_bottle.",
            "Carter privately told Emma that the tomato is in the green_drawer.",
        ]));
        assert_eq!(
            events[0],
            Some(ParsedEvent::PublicClaim {
                speaker: a("Nathan"),
                object: "tomato".into(),
                container: "blue_bottle".into(),
            })
        );
        assert_eq!(
            events[1],
            Some(ParsedEvent::PrivateComm {
                speaker: a("Carter"),
                listener: a("Emma"),
                object: "tomato".into(),
                container: "green_drawer".into(),
            })
        );
    }

    #[test]
    fn parses_distractors_by_verb() {
        let events = parse_story_events(&owned(&[
            "Carter dislikes the banana.",
            "Emma saw a cat.",
            "Liam lost the key.",
        ]));
        assert_eq!(events[0], Some(ParsedEvent::Distractor { agent: a("Carter") }));
        assert_eq!(events[1], Some(ParsedEvent::Distractor { agent: a("Emma") }));
        assert_eq!(events[2], None);
    }

    #[test]
    fn non_template_text_stays_unparsed() {
        let events = parse_story_events(&owned(&[
            "The cat entered the garden.",
            "Suddenly, everything changed.",
        ]));
        assert_eq!(events, vec![None, None]);
    }

    #[test]
    fn dialogue_turn_captures_speaker_and_text() {
        assert_eq!(
            parse_dialogue_turn("Gianna: I've been learning the guitar."),
            Some(ParsedEvent::DialogueTurn {
                speaker: a("Gianna"),
                text: "I've been learning the guitar.".into(),
            })
        );
        assert_eq!(parse_dialogue_turn("no speaker header here"), None);
    }

    #[test]
    fn multi_line_dialogue_turn_keeps_continuation() {
        let parsed = parse_dialogue_turn("Sara: First line.\nSecond line.");
        match parsed {
            Some(ParsedEvent::DialogueTurn { speaker, text }) => {
                assert_eq!(speaker, a("Sara"));
                assert_eq!(text, "First line.\nSecond line.");
            }
            other => panic!("unexpected: {other:?}"),
        }
    }
}

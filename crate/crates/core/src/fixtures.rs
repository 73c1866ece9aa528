//! Small canonical stories used by tests, benchmarks, and documentation
//! examples.

use crate::model::{ChoiceSet, Story, StoryKind};

/// A five-agent room story with a moved object, a false public claim, and a
/// corrective private message. Exercises every template statement form.
pub fn nested_room_story_lines() -> Vec<String> {
    [
        "Emma, Hannah, Liam, Nathan and Carter entered the study.",
        "Emma saw a cat.",
        "The tomato is in the red_container.",
        "Emma made no movements and stayed in the study for 1 minute.",
        "Emma exited the study.",
        "Hannah made no movements and stayed in the study for 1 minute.",
        "Hannah exited the study.",
        "Carter dislikes the banana.",
        "Liam moved the tomato to the green_drawer.",
        "Liam exited the study.",
        "Nathan made no movements and stayed in the study for 1 minute.",
        "Nathan exited the study.",
        "Carter made no movements and stayed in the study for 1 minute.",
        "Carter exited the study.",
        "Emma, Hannah, Liam, Nathan and Carter entered the waiting_room.",
        "Nathan publicly claimed that the tomato is in the blue_bottle.",
        "Carter privately told Emma that the tomato is in the green_drawer.",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

pub fn nested_room_story() -> Story {
    Story::from_texts(StoryKind::HiTomTemplate, &nested_room_story_lines())
}

/// The deepest question askable over [`nested_room_story`].
pub fn nested_room_question() -> &'static str {
    "Where does Carter think Hannah thinks Liam thinks Emma thinks the tomato is?"
}

/// Fifteen container options for [`nested_room_story`] questions.
pub fn nested_room_choices() -> ChoiceSet {
    ChoiceSet::from_texts(vec![
        "blue_bathtub",
        "red_drawer",
        "green_bathtub",
        "green_envelope",
        "blue_cupboard",
        "green_box",
        "blue_drawer",
        "green_pantry",
        "green_cupboard",
        "blue_treasure_chest",
        "red_bottle",
        "red_container",
        "green_bucket",
        "green_drawer",
        "blue_bottle",
    ])
    .expect("15 labelled options")
}

/// A three-speaker conversation in which Gianna leaves and later returns,
/// so the middle turns are unknown to her.
pub fn dialogue_story_lines() -> Vec<String> {
    [
        "Gianna: I taught my parrot three new words this week.",
        "Sara: That is adorable. My cat ignores every command I give her.",
        "Javier: Dogs are easier, Bruno finally sits on cue.",
        "Gianna: I have to step out for a meeting, talk soon!",
        "Sara: See you later, Gianna.",
        "Javier: Catch you later, Gianna.",
        "Sara: So Javier, how long did the sit training take?",
        "Javier: About a month of short sessions every evening.",
        "Gianna: Hey everyone, I'm back. What did I miss?",
        "Sara: We were comparing training routines.",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

pub fn dialogue_story() -> Story {
    Story::from_texts(StoryKind::FantomDialogue, &dialogue_story_lines())
}

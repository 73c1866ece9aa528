//! Seeded synthetic story generation.
//!
//! Stories follow the room-and-container template exactly, so the parser,
//! the rule-based reasoner, and the belief oracle all read them without
//! ambiguity: a group enters a room, the object is seen in a container,
//! agents move it or stand around, everyone leaves one by one, and (in the
//! deceptive variant) the group regroups and trades claims about the
//! object. Gold labels come from the belief oracle.

use super::belief_oracle;
use crate::model::{
    AgentId, Category, ChoiceSet, FactualQuery, ParsedEvent, Question, QuestionRecord, Story,
    StoryKind,
};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use thiserror::Error;

const AGENT_POOL: [&str; 20] = [
    "Emma", "Hannah", "Liam", "Nathan", "Carter", "Ava", "Sophie", "Sam", "Brad", "Alexis",
    "Raj", "Cody", "Mia", "Noah", "Isla", "Owen", "Priya", "Tara", "Hugo", "Wren",
];

const ROOM_POOL: [&str; 10] = [
    "study",
    "waiting_room",
    "kitchen",
    "lounge",
    "basement",
    "porch",
    "playroom",
    "garden",
    "hall",
    "workshop",
];

const COLORS: [&str; 5] = ["red", "green", "blue", "yellow", "purple"];
const CONTAINER_NOUNS: [&str; 9] = [
    "container",
    "drawer",
    "bottle",
    "bathtub",
    "envelope",
    "cupboard",
    "box",
    "pantry",
    "bucket",
];

const OBJECT_POOL: [&str; 10] = [
    "tomato", "apple", "melon", "jam", "ladder", "notebook", "pencil", "scarf", "coin", "violin",
];

const DISTRACTIONS: [&str; 6] = [
    "saw a cat",
    "saw a spider",
    "likes the painting",
    "dislikes the banana",
    "loves the piano",
    "hates the rain",
];

/// Whether the story's final phase contains claims about the object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Deception {
    /// A public claim and a private message close the story.
    Tell,
    /// No claims: beliefs rest on observation alone.
    NoTell,
}

impl Deception {
    pub fn category(self) -> Category {
        match self {
            Deception::Tell => Category::Tell,
            Deception::NoTell => Category::NoTell,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Deception::Tell => "tell",
            Deception::NoTell => "no_tell",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("infeasible generation spec: {reason}")]
    InfeasibleSpec { reason: String },
    #[error("io: {0}")]
    Io(String),
}

/// Shape of one generated story.
#[derive(Debug, Clone)]
pub struct GenSpec {
    pub num_agents: usize,
    pub num_rooms: usize,
    pub num_containers_per_room: usize,
    pub num_moves: usize,
    /// Belief nesting depth of the question.
    pub order: usize,
    pub deception: Deception,
    /// Probability of an irrelevant statement before each departure.
    pub distractor_rate: f64,
    pub seed: u64,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            num_agents: 5,
            num_rooms: 2,
            num_containers_per_room: 4,
            num_moves: 2,
            order: 2,
            deception: Deception::Tell,
            distractor_rate: 0.25,
            seed: 0,
        }
    }
}

impl GenSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        let fail = |reason: &str| {
            Err(GenError::InfeasibleSpec {
                reason: reason.to_string(),
            })
        };
        if !(2..=8).contains(&self.num_agents) {
            return fail("num_agents must be between 2 and 8");
        }
        if !(1..=4).contains(&self.num_rooms) {
            return fail("num_rooms must be between 1 and 4");
        }
        if !(2..=6).contains(&self.num_containers_per_room) {
            return fail("num_containers_per_room must be between 2 and 6");
        }
        if self.num_rooms * self.num_containers_per_room > 15 {
            return fail("total containers exceed the 15 available option labels");
        }
        if self.num_moves > 6 {
            return fail("num_moves must be at most 6");
        }
        if self.order > 4 {
            return fail("order must be at most 4");
        }
        if self.order > self.num_agents {
            return fail("order cannot exceed num_agents: chains use distinct agents");
        }
        if !(0.0..=1.0).contains(&self.distractor_rate) {
            return fail("distractor_rate must be within 0..=1");
        }
        Ok(())
    }
}

fn name_list(agents: &[AgentId]) -> String {
    let names: Vec<&str> = agents.iter().map(|a| a.as_str()).collect();
    match names.as_slice() {
        [] => String::new(),
        [one] => (*one).to_string(),
        [head @ .., last] => format!("{} and {last}", head.join(", ")),
    }
}

fn event_text(event: &ParsedEvent, flavour: Option<&str>) -> String {
    match event {
        ParsedEvent::Enter { agents, location } => {
            format!("{} entered the {location}.", name_list(agents))
        }
        ParsedEvent::Exit { agent, location } => format!("{agent} exited the {location}."),
        ParsedEvent::Stay { agent, location } => {
            format!("{agent} made no movements and stayed in the {location} for 1 minute.")
        }
        ParsedEvent::ObjectAt { object, container } => {
            format!("The {object} is in the {container}.")
        }
        ParsedEvent::Move {
            agent,
            object,
            container,
        } => format!("{agent} moved the {object} to the {container}."),
        ParsedEvent::PrivateComm {
            speaker,
            listener,
            object,
            container,
        } => format!("{speaker} privately told {listener} that the {object} is in the {container}."),
        ParsedEvent::PublicClaim {
            speaker,
            object,
            container,
        } => format!("{speaker} publicly claimed that the {object} is in the {container}."),
        ParsedEvent::ContainerIn {
            container,
            location,
        } => format!("The {container} is in the {location}."),
        ParsedEvent::Distractor { agent } => {
            format!("{agent} {}.", flavour.expect("distractor flavour"))
        }
        ParsedEvent::DialogueTurn { speaker, text } => format!("{speaker}: {text}"),
    }
}

fn pick_distinct<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str], n: usize) -> Vec<&'a str> {
    let mut indices: Vec<usize> = (0..pool.len()).collect();
    indices.shuffle(rng);
    indices.into_iter().take(n).map(|i| pool[i]).collect()
}

/// Generates one record. The same spec always yields the same record, and
/// the emitted text re-parses to exactly the events the generator chose.
pub fn generate_story(id: &str, spec: &GenSpec) -> Result<QuestionRecord, GenError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let agents: Vec<AgentId> = pick_distinct(&mut rng, &AGENT_POOL, spec.num_agents)
        .into_iter()
        .map(|n| AgentId::new(n).expect("pool names are valid"))
        .collect();
    let rooms: Vec<&str> = pick_distinct(&mut rng, &ROOM_POOL, spec.num_rooms);
    let container_pool: Vec<String> = COLORS
        .iter()
        .flat_map(|c| CONTAINER_NOUNS.iter().map(move |n| format!("{c}_{n}")))
        .collect();
    let container_refs: Vec<&str> = container_pool.iter().map(|s| s.as_str()).collect();
    let total_containers = spec.num_rooms * spec.num_containers_per_room;
    let picked = pick_distinct(&mut rng, &container_refs, total_containers);
    let by_room: Vec<&[&str]> = picked.chunks(spec.num_containers_per_room).collect();
    let home_containers = by_room[0];
    let object = *OBJECT_POOL.choose(&mut rng).expect("object pool");

    let mut events: Vec<(ParsedEvent, Option<&str>)> = Vec::new();
    events.push((
        ParsedEvent::Enter {
            agents: agents.clone(),
            location: rooms[0].to_string(),
        },
        None,
    ));
    let mut current = *home_containers.choose(&mut rng).expect("containers");
    events.push((
        ParsedEvent::ObjectAt {
            object: object.to_string(),
            container: current.to_string(),
        },
        None,
    ));

    let mut exit_order = agents.clone();
    exit_order.shuffle(&mut rng);
    let mut move_turns = vec![0usize; spec.num_moves];
    for t in &mut move_turns {
        *t = rng.random_range(0..spec.num_agents);
    }
    move_turns.sort_unstable();

    for (turn, leaver) in exit_order.iter().enumerate() {
        let mut leaver_moved = false;
        for _ in move_turns.iter().filter(|t| **t == turn) {
            let present = &exit_order[turn..];
            let mover = present.choose(&mut rng).expect("someone present").clone();
            let target = *home_containers
                .iter()
                .copied()
                .filter(|c| *c != current)
                .collect::<Vec<_>>()
                .choose(&mut rng)
                .expect("alternative container");
            leaver_moved = leaver_moved || &mover == leaver;
            current = target;
            events.push((
                ParsedEvent::Move {
                    agent: mover,
                    object: object.to_string(),
                    container: target.to_string(),
                },
                None,
            ));
        }
        if rng.random_bool(spec.distractor_rate) {
            let present = &exit_order[turn..];
            let watcher = present.choose(&mut rng).expect("someone present").clone();
            let flavour = *DISTRACTIONS.choose(&mut rng).expect("flavour");
            events.push((ParsedEvent::Distractor { agent: watcher }, Some(flavour)));
        }
        if !leaver_moved {
            events.push((
                ParsedEvent::Stay {
                    agent: leaver.clone(),
                    location: rooms[0].to_string(),
                },
                None,
            ));
        }
        events.push((
            ParsedEvent::Exit {
                agent: leaver.clone(),
                location: rooms[0].to_string(),
            },
            None,
        ));
    }

    if spec.num_rooms >= 2 {
        events.push((
            ParsedEvent::Enter {
                agents: agents.clone(),
                location: rooms[1].to_string(),
            },
            None,
        ));
    }

    if spec.deception == Deception::Tell {
        let speaker = agents.choose(&mut rng).expect("agents").clone();
        let claimed = *home_containers.choose(&mut rng).expect("containers");
        events.push((
            ParsedEvent::PublicClaim {
                speaker,
                object: object.to_string(),
                container: claimed.to_string(),
            },
            None,
        ));
        let speaker = agents.choose(&mut rng).expect("agents").clone();
        let listener = agents
            .iter()
            .filter(|a| **a != speaker)
            .collect::<Vec<_>>()
            .choose(&mut rng)
            .map(|a| (*a).clone())
            .expect("second participant");
        let claimed = *home_containers.choose(&mut rng).expect("containers");
        events.push((
            ParsedEvent::PrivateComm {
                speaker,
                listener,
                object: object.to_string(),
                container: claimed.to_string(),
            },
            None,
        ));
    }

    let texts: Vec<String> = events
        .iter()
        .map(|(e, flavour)| event_text(e, *flavour))
        .collect();
    let story = Story::from_texts(StoryKind::HiTomTemplate, &texts);

    let mut chain = agents.clone();
    chain.shuffle(&mut rng);
    chain.truncate(spec.order);
    let question = Question::from_parts(
        chain.clone(),
        FactualQuery::WhereIs {
            object: object.to_string(),
        },
    );

    let mut option_texts: Vec<String> = picked.iter().map(|c| c.to_string()).collect();
    for c in &container_refs {
        if option_texts.len() >= 15 {
            break;
        }
        if !option_texts.iter().any(|o| o == c) {
            option_texts.push((*c).to_string());
        }
    }
    option_texts.shuffle(&mut rng);
    let choices = ChoiceSet::from_texts(option_texts).expect("15 options");

    let beliefs = belief_oracle(&story, spec.order);
    let believed = beliefs
        .belief_of(&chain)
        .ok_or_else(|| GenError::InfeasibleSpec {
            reason: format!("no belief resolvable for chain {chain:?}"),
        })?;
    let gold = choices
        .label_for(believed)
        .ok_or_else(|| GenError::InfeasibleSpec {
            reason: format!("believed container {believed:?} missing from options"),
        })?;

    Ok(QuestionRecord {
        id: id.to_string(),
        story,
        question,
        choices,
        gold_label: Some(gold),
        order: spec.order,
        category: spec.deception.category(),
    })
}

/// Shape of a generated evaluation suite: a full grid of order and
/// deception cells.
#[derive(Debug, Clone)]
pub struct SuiteSpec {
    pub per_cell: usize,
    pub orders: Vec<usize>,
    pub deceptions: Vec<Deception>,
    pub num_agents: usize,
    pub num_rooms: usize,
    pub num_containers_per_room: usize,
    pub num_moves: usize,
    pub distractor_rate: f64,
    pub seed: u64,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        SuiteSpec {
            per_cell: 20,
            orders: vec![0, 1, 2, 3, 4],
            deceptions: vec![Deception::Tell, Deception::NoTell],
            num_agents: 5,
            num_rooms: 2,
            num_containers_per_room: 4,
            num_moves: 2,
            distractor_rate: 0.25,
            seed: 0,
        }
    }
}

/// Generates `per_cell` records for every (order, deception) cell. Record
/// seeds derive from the suite seed, so the suite is reproducible and cells
/// do not share stories.
pub fn generate_suite(suite: &SuiteSpec) -> Result<Vec<QuestionRecord>, GenError> {
    let mut seeder = ChaCha8Rng::seed_from_u64(suite.seed);
    let mut records = Vec::new();
    for deception in &suite.deceptions {
        for &order in &suite.orders {
            for i in 0..suite.per_cell {
                let spec = GenSpec {
                    num_agents: suite.num_agents,
                    num_rooms: suite.num_rooms,
                    num_containers_per_room: suite.num_containers_per_room,
                    num_moves: suite.num_moves,
                    order,
                    deception: *deception,
                    distractor_rate: suite.distractor_rate,
                    seed: seeder.random(),
                };
                let id = format!("{}-o{order}-{i:04}", deception.label());
                records.push(generate_story(&id, &spec)?);
            }
        }
    }
    Ok(records)
}

/// Generates a suite and writes it as JSON lines.
pub fn write_suite(path: &Path, suite: &SuiteSpec) -> Result<Vec<QuestionRecord>, GenError> {
    let records = generate_suite(suite)?;
    crate::model::save_records(path, &records).map_err(|e| GenError::Io(e.to_string()))?;
    Ok(records)
}

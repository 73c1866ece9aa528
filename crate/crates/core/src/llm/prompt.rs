//! The prompt catalog and its placeholder substitution.
//!
//! Every chat call in the crate renders one of these templates. Rendering
//! is byte-stable, so cache keys and the golden snapshot tests are too.

use crate::engine::ReasonerError;
use std::collections::BTreeMap;
use std::sync::LazyLock;

/// One template per distinct chat task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PromptId {
    AgentId,
    Reframe,
    KnowsHiTom,
    KnowsFantom,
    UpdateHiTom,
    UpdateFantom,
    AnswerHiTom,
    AnswerFantom,
    SimTomFilter,
    SimTomAnswer,
    ZeroShotMc,
    ChainOfThought,
}

impl PromptId {
    pub const ALL: [PromptId; 12] = [
        PromptId::AgentId,
        PromptId::Reframe,
        PromptId::KnowsHiTom,
        PromptId::KnowsFantom,
        PromptId::UpdateHiTom,
        PromptId::UpdateFantom,
        PromptId::AnswerHiTom,
        PromptId::AnswerFantom,
        PromptId::SimTomFilter,
        PromptId::SimTomAnswer,
        PromptId::ZeroShotMc,
        PromptId::ChainOfThought,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PromptId::AgentId => "agent_id",
            PromptId::Reframe => "reframe",
            PromptId::KnowsHiTom => "knows_hitom",
            PromptId::KnowsFantom => "knows_fantom",
            PromptId::UpdateHiTom => "update_hitom",
            PromptId::UpdateFantom => "update_fantom",
            PromptId::AnswerHiTom => "answer_hitom",
            PromptId::AnswerFantom => "answer_fantom",
            PromptId::SimTomFilter => "simtom_filter",
            PromptId::SimTomAnswer => "simtom_answer",
            PromptId::ZeroShotMc => "zero_shot_mc",
            PromptId::ChainOfThought => "chain_of_thought",
        }
    }

    pub fn template(self) -> &'static str {
        match self {
            PromptId::AgentId => AGENT_ID,
            PromptId::Reframe => REFRAME,
            PromptId::KnowsHiTom => KNOWS_HITOM,
            PromptId::KnowsFantom => KNOWS_FANTOM,
            PromptId::UpdateHiTom => UPDATE_HITOM,
            PromptId::UpdateFantom => UPDATE_FANTOM,
            PromptId::AnswerHiTom => ANSWER_HITOM,
            PromptId::AnswerFantom => ANSWER_FANTOM,
            PromptId::SimTomFilter => SIMTOM_FILTER,
            PromptId::SimTomAnswer => SIMTOM_ANSWER,
            PromptId::ZeroShotMc => ZERO_SHOT_MC,
            PromptId::ChainOfThought => CHAIN_OF_THOUGHT,
        }
    }
}

static PLACEHOLDER: LazyLock<regex::Regex> =
    LazyLock::new(|| regex::Regex::new(r"\{([a-z_]+)\}").expect("placeholder pattern"));

/// Substitutes `{name}` placeholders in a template. Every placeholder in
/// the text must have a binding; unused bindings are fine.
pub fn render(template: &str, bindings: &BTreeMap<&str, String>) -> Result<String, ReasonerError> {
    let mut out = String::with_capacity(template.len());
    let mut cursor = 0;
    for caps in PLACEHOLDER.captures_iter(template) {
        let whole = caps.get(0).expect("match");
        let name = caps.get(1).expect("group").as_str();
        let value = bindings
            .get(name)
            .ok_or_else(|| ReasonerError::UnboundPlaceholder {
                name: name.to_string(),
            })?;
        out.push_str(&template[cursor..whole.start()]);
        out.push_str(value);
        cursor = whole.end();
    }
    out.push_str(&template[cursor..]);
    Ok(out)
}

/// Renders a template as the single user message of a chat payload.
pub fn render_prompt(
    id: PromptId,
    bindings: &BTreeMap<&str, String>,
) -> Result<String, ReasonerError> {
    render(id.template(), bindings)
}

const AGENT_ID: &str = "\
Based on the given question, which agent's belief or perspective do we want to find first? Use the given rules to name the agent:

Rules:
- If the question does not mention the name of any agents, the answer should be Narrator.
- Otherwise, output the primary agent's name. (Pronouns such as you/I/we/they/us aren't agent names and should not be outputted)

Examples:

Question: Where does Alex think Raj looks for the jam?
Agent Name: Alex

Question: Where do I think Sam thinks the ladder is?
Agent Name: Sam

Question: Where does Ava think Sophie thinks Sam thinks Brad thinks the cookie is?
Agent Name: Ava

Question: Where is the ladder?
Agent Name: Narrator

Question: Where do they think the ladder is?
Agent Name: Narrator

Task:
Question: {question}
Agent Name:";

const REFRAME: &str = "\
Reframe the question's perspective as if it was being asked directly to {agent} by framing another agent as the subject of the question. Don't mention {agent}'s name or use pronouns referring to them, instead make the question direct by removing their perspective. If there are no agents that can be made the subject, make it a direct question (Example: Where is X?) Only use 'you' when it's necessary and there are no other agents that can be framed as the subject. Output just the question and nothing else.

Examples:

Question: Where does {agent} think Alex will look for the chocolate?
New Question: Where will Alex look for the chocolate?

Question: Where does {agent} find the apple?
New Question: Where is the apple?

Question: Where does {agent} think Brandon thinks Cody thinks the banana is?
New Question: Where does Brandon think Cody thinks the banana is?

Task:
Question: {question}
New Question:";

const KNOWS_HITOM: &str = "\
This is a given story: {story}
The story is sequential with each statement happening after the previous one (if the statement is an event). This is the next statement in the story: Statement: {part}. Your task is to indicate whether {agent} knows about the statement happening, using the following rules:

Rules:
- The agent {agent} knows of any statement that mentions their own actions.
- The agent {agent} knows of a statement if the statement happens in the same location as them.
- The agent {agent} knows of statements that indicate another agent leaving a location.
- The agent {agent} does NOT know of a statement if they have left the location where the event occurs or are not in the same location as the agent involved in the statement.
- The agent {agent} only knows of a private communication if they are involved in it.
- The agent {agent} is aware of all public communications.
- If a statement can be interpreted ambiguously, then say yes.

This is the current world state, holding every agent's location:
World State: {glob_world_model}

Answer with Yes or No.
Answer:";

const KNOWS_FANTOM: &str = "\
This is a given conversation: {story}
The story is sequential with each dialogue happening after the previous one. This is the next dialogue in the story: Dialogue: {part}. Your task is to indicate whether {agent} knows about the dialogue, using the following rules:

Rules:
- The agent {agent} knows a dialogue if they are in the same location or conversation.
- The agent {agent} knows all dialogues they say themselves.
- If {agent}'s location is unclear or not provided, assume they know of the dialogue.

This is the current world state, holding every agent's location:
World State: {glob_world_model}

Answer with Yes or No.
Answer:";

const UPDATE_HITOM: &str = "\
This is the current world state, that holds the current world location of all the agents:
World State: {glob_world_model}. Please update it relevantly (if needed) after the given statement: {part}.

Follow the rules in completing the task:
- No updates are needed if an agent does not enter or exit a location in the given statement.
- An agent exits a location only when mentioned in the given statement. In that case, add the agent to the location \"Unknown\" and remove them from their original location.
- In case an update isn't needed return the given world state. Only update the state for agents and not objects.
- Ensure that no agent is in 2 locations, and only in the correct location.

Use the square brackets appropriately to indicate the agents inside a location. Only return the world state in the given format and no other text.
Answer: World State:";

const UPDATE_FANTOM: &str = "\
This is the current world state, that holds the current world location of all the agents:
World State: {glob_world_model}. Please update it relevantly (if needed) after the given dialogue: {part}.

Follow the rules in completing the task:
- No updates are needed if an agent does not enter or exit the conversation in the given statement.
- An agent exits/enters a conversation only when they mention leaving/entering themselves in the given dialogue.
- The agent does not exit a location themselves if they only indicate someone else may be leaving.
- In case an update isn't needed return the given world state.
- Ensure that no agent is in 2 locations, and only in the correct location.

Use the square brackets appropriately to indicate the agents inside a location. Only return the world state in the given format and no other text.
Answer: World State:";

const ANSWER_HITOM: &str = "\
You are {agent}. Here is a story: {story}. Answer the following question about it shortly by using the following rules to guide your reasoning. Think step by step and then give your answer after Answer:

Question: {question}, Choices: {choices},

Rules:
{rules}
- All the given statements occur in sequence, with later statements occurring after earlier statements.
- Public and private communications can influence beliefs of agents but don't change the results of prior events that have been observed.
- Note that every agent tends to lie. What an agent A tells others doesn't affect A's actual belief.
- An agent tends to trust an agent that exited the room later than himself.

Answer the question by thoroughly considering all statements. Choose one of the choices from the given options to return your answer. Return the associated letter label of your choice (from A,B,C,D,E,F,G,H,I,J,K,L,M,N,O) alongside your choice.";

const ANSWER_FANTOM: &str = "\
You are {agent}. Here is a conversation between individuals who have just met from the perspective of the given agents:

{agents}
{story}
Answer the following question about it shortly by using the given rules to guide your reasoning.

Question: {question}, Choices: {choices},

Rules:
- You don't know dialogues said before you enter a room, or after you exit a room (but you may re-enter and become aware again).
- You don't know the answer to the question if you don't see a reference to it in the story you know.

Choose one of the choices from the given options to return your answer. Return the associated letter label of your choice (from A,B) alongside your choice.";

const SIMTOM_FILTER: &str = "\
The following is a sequence of events: {story}

Which of these events does {agent} know about? {agent} knows about an event if they saw it happen, did it themselves, were told about it, or heard it announced. Keep the statements {agent} knows about, in their original order and wording, and drop the rest. Output the retained statements, one per line, and nothing else.";

const SIMTOM_ANSWER: &str = "\
You are {agent}. Here is what you have seen and heard: {story}

Answer the following question based only on these events.

Question: {question}, Choices: {choices}

Choose one of the choices from the given options to return your answer. Return the associated letter label of your choice alongside your choice.";

const ZERO_SHOT_MC: &str = "\
Here is a story: {story}

Question: {question}, Choices: {choices}

Choose one of the choices from the given options to return your answer. Return only the associated letter label of your choice.";

const CHAIN_OF_THOUGHT: &str = "\
Here is a story: {story}

Question: {question}, Choices: {choices}

Let's think step by step. Reason through the story first, then give your final answer after Answer:. Choose one of the choices from the given options and return the associated letter label of your choice alongside your choice.";

//! Reasoner backed by a chat-completion endpoint.
//!
//! Every judgment is a single-shot prompt from the catalog in [`prompt`],
//! completed through a caching, rate-limited client. Responses pass
//! through validators; a failed validation retries once with the
//! constraint restated (a changed prompt, so a fresh cache key), then
//! surfaces a typed error. World-state updates are the exception: after
//! the retry they fall back to the previous state rather than failing the
//! whole simulation.

mod cache;
mod client;
mod prompt;

pub use cache::ResponseCache;
pub use client::{ChatClient, ChatMessage, LlmConfig};
pub use prompt::{render_prompt, PromptId};

use crate::engine::{
    Answer, AnswerMode, Awareness, Perspective, Reasoner, ReasonerError, extract_label,
};
use crate::model::{parse_question, AgentId, ChoiceSet, Question, Statement, Story, StoryKind,
    ParsedEvent, NARRATOR};
use crate::world::WorldState;
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

pub struct LlmReasoner {
    client: ChatClient,
}

type Bindings = BTreeMap<&'static str, String>;

impl LlmReasoner {
    pub fn new(cfg: LlmConfig, cache_dir: &Path) -> Result<Self, ReasonerError> {
        Ok(LlmReasoner {
            client: ChatClient::new(cfg, cache_dir)?,
        })
    }

    pub fn client(&self) -> &ChatClient {
        &self.client
    }

    fn ask(&self, prompt: &str) -> Result<String, ReasonerError> {
        self.client.complete(&[ChatMessage::user(prompt)])
    }
}

/// First whole-word occurrence of a candidate name in the response, by
/// position. `Narrator` competes like any name.
fn match_agent(response: &str, story: &Story) -> Option<Perspective> {
    let trimmed = response.trim();
    let mut candidates: Vec<String> = vec![NARRATOR.to_string()];
    candidates.extend(story.cast().into_iter().map(|a| a.as_str().to_string()));
    for name in &candidates {
        if trimmed.eq_ignore_ascii_case(name) {
            return Some(to_perspective(name));
        }
    }
    let is_word = |c: char| c.is_alphanumeric() || c == '_';
    let mut best: Option<(usize, &String)> = None;
    for name in &candidates {
        let mut from = 0;
        while let Some(at) = response[from..].find(name.as_str()) {
            let start = from + at;
            let end = start + name.len();
            let left_ok = start == 0 || !response[..start].chars().next_back().is_some_and(is_word);
            let right_ok = !response[end..].chars().next().is_some_and(is_word);
            if left_ok && right_ok {
                if best.is_none_or(|(b, _)| start < b) {
                    best = Some((start, name));
                }
                break;
            }
            from = end;
        }
    }
    best.map(|(_, name)| to_perspective(name))
}

fn to_perspective(name: &str) -> Perspective {
    if name == NARRATOR {
        Perspective::Narrator
    } else {
        Perspective::Agent(AgentId::new(name).expect("cast names are valid"))
    }
}

/// Leading yes/no token, case-insensitive, punctuation ignored.
fn parse_yes_no(response: &str) -> Option<bool> {
    let token: String = response
        .trim_start()
        .chars()
        .take_while(|c| c.is_alphabetic())
        .collect();
    match token.to_ascii_lowercase().as_str() {
        "yes" => Some(true),
        "no" => Some(false),
        _ => None,
    }
}

/// First non-empty line, with any `New Question:` style lead-in removed.
fn cleaned_line(response: &str, lead_in: &str) -> String {
    let line = response
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .unwrap_or("");
    let line = line
        .strip_prefix(lead_in)
        .map(str::trim_start)
        .unwrap_or(line);
    line.to_string()
}

fn parse_world_reply(response: &str) -> Result<WorldState, ReasonerError> {
    let text = cleaned_line(response, "World State:");
    Ok(WorldState::from_str(&text)?)
}

fn mentions_as_word(text: &str, name: &str) -> bool {
    let is_word = |c: char| c.is_alphanumeric() || c == '_';
    let mut from = 0;
    while let Some(at) = text[from..].find(name) {
        let start = from + at;
        let end = start + name.len();
        let left_ok = start == 0 || !text[..start].chars().next_back().is_some_and(is_word);
        let right_ok = !text[end..].chars().next().is_some_and(is_word);
        if left_ok && right_ok {
            return true;
        }
        from = end;
    }
    false
}

impl Reasoner for LlmReasoner {
    fn identify_agent(
        &self,
        question: &Question,
        story: &Story,
    ) -> Result<Perspective, ReasonerError> {
        let mut bindings = Bindings::new();
        bindings.insert("question", question.raw.clone());
        let prompt = render_prompt(PromptId::AgentId, &bindings)?;
        let reply = self.ask(&prompt)?;
        if let Some(p) = match_agent(&reply, story) {
            return Ok(p);
        }
        let retry = format!(
            "{prompt}\n\nYour previous reply {reply:?} was not a valid agent name. \
             Reply with exactly one word: Narrator, or the name of an agent from the question."
        );
        let reply = self.ask(&retry)?;
        match_agent(&reply, story).ok_or(ReasonerError::InvalidAgentName { response: reply })
    }

    fn reframe(&self, agent: &AgentId, question: &Question) -> Result<Question, ReasonerError> {
        let mut bindings = Bindings::new();
        bindings.insert("agent", agent.as_str().to_string());
        bindings.insert("question", question.raw.clone());
        let prompt = render_prompt(PromptId::Reframe, &bindings)?;
        let reply = self.ask(&prompt)?;
        let mut text = cleaned_line(&reply, "New Question:");
        if text.is_empty() || mentions_as_word(&text, agent.as_str()) {
            let retry = format!(
                "{prompt}\n\nYour previous reply {reply:?} was not acceptable. Output one \
                 question that does not mention {agent} at all."
            );
            let reply = self.ask(&retry)?;
            text = cleaned_line(&reply, "New Question:");
            if text.is_empty() || mentions_as_word(&text, agent.as_str()) {
                return Err(ReasonerError::MalformedResponse {
                    what: format!("reframed question still mentions {agent}: {reply:?}"),
                });
            }
        }
        Ok(parse_question(&text).unwrap_or_else(|_| Question::opaque(text)))
    }

    fn knows(
        &self,
        agent: &AgentId,
        statement: &Statement,
        prior: &Story,
        world: &WorldState,
    ) -> Result<Awareness, ReasonerError> {
        let id = match prior.kind {
            StoryKind::FantomDialogue => PromptId::KnowsFantom,
            _ => PromptId::KnowsHiTom,
        };
        let mut bindings = Bindings::new();
        bindings.insert("story", prior.text());
        bindings.insert("part", statement.raw.clone());
        bindings.insert("agent", agent.as_str().to_string());
        bindings.insert("glob_world_model", world.to_string());
        let prompt = render_prompt(id, &bindings)?;
        let reply = self.ask(&prompt)?;
        if let Some(known) = parse_yes_no(&reply) {
            return Ok(Awareness::new(known, reply.trim()));
        }
        let retry = format!("{prompt}\n\nAnswer strictly with Yes or No as the first word.");
        let reply = self.ask(&retry)?;
        match parse_yes_no(&reply) {
            Some(known) => Ok(Awareness::new(known, reply.trim())),
            None => Err(ReasonerError::UnparseableBoolean { response: reply }),
        }
    }

    fn update_world(
        &self,
        world: &WorldState,
        statement: &Statement,
    ) -> Result<WorldState, ReasonerError> {
        let id = match statement.parsed {
            Some(ParsedEvent::DialogueTurn { .. }) => PromptId::UpdateFantom,
            _ => PromptId::UpdateHiTom,
        };
        let mut bindings = Bindings::new();
        bindings.insert("glob_world_model", world.to_string());
        bindings.insert("part", statement.raw.clone());
        let prompt = render_prompt(id, &bindings)?;
        let reply = self.ask(&prompt)?;
        let violation = match parse_world_reply(&reply) {
            Ok(next) => return Ok(next),
            Err(e) => e,
        };
        let retry = format!(
            "{prompt}\n\nYour previous reply {reply:?} was invalid: {violation}. Return only \
             the world state, formatted like: location:[Name, Name], Unknown:[]"
        );
        let reply = self.ask(&retry)?;
        Ok(parse_world_reply(&reply).unwrap_or_else(|_| world.clone()))
    }

    fn answer(
        &self,
        story: &Story,
        question: &Question,
        choices: &ChoiceSet,
        rules: Option<&str>,
        mode: AnswerMode<'_>,
    ) -> Result<Answer, ReasonerError> {
        let mut bindings = Bindings::new();
        bindings.insert("story", story.text());
        bindings.insert("question", question.raw.clone());
        bindings.insert("choices", choices.render());
        bindings.insert("rules", rules.unwrap_or("").to_string());
        let template = match mode {
            AnswerMode::Simulation {
                perspective,
                simulated,
            } => {
                let id = match story.kind {
                    StoryKind::FantomDialogue => PromptId::AnswerFantom,
                    _ => PromptId::AnswerHiTom,
                };
                let names: Vec<&str> = simulated.iter().map(|a| a.as_str()).collect();
                bindings.insert("agents", names.join(", "));
                match perspective {
                    Perspective::Agent(a) => {
                        bindings.insert("agent", a.as_str().to_string());
                        id.template().to_string()
                    }
                    Perspective::Narrator => {
                        id.template().replacen("You are {agent}. ", "", 1)
                    }
                }
            }
            AnswerMode::SimTom { agent } => {
                bindings.insert("agent", agent.as_str().to_string());
                PromptId::SimTomAnswer.template().to_string()
            }
            AnswerMode::Direct => PromptId::ZeroShotMc.template().to_string(),
            AnswerMode::ChainOfThought => PromptId::ChainOfThought.template().to_string(),
        };
        let prompt = prompt::render(&template, &bindings)?;
        let reply = self.ask(&prompt)?;
        match extract_label(&reply, choices) {
            Ok(label) => Ok(Answer {
                label,
                rationale: Some(reply),
            }),
            Err(_) => {
                let retry = format!(
                    "{prompt}\n\nYour previous reply {reply:?} did not name an option. Return \
                     only the letter label of your chosen option."
                );
                let reply = self.ask(&retry)?;
                let label = extract_label(&reply, choices)?;
                Ok(Answer {
                    label,
                    rationale: Some(reply),
                })
            }
        }
    }

    fn filter_story(&self, agent: &AgentId, story: &Story) -> Result<Story, ReasonerError> {
        let mut bindings = Bindings::new();
        bindings.insert("story", story.text());
        bindings.insert("agent", agent.as_str().to_string());
        let prompt = render_prompt(PromptId::SimTomFilter, &bindings)?;
        let reply = self.ask(&prompt)?;
        let lines: Vec<&str> = reply
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let mut filtered = Story::from_texts(story.kind, &lines);
        filtered.preamble = story.preamble.clone();
        Ok(filtered)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn agent_matching_normalizes_verbose_replies() {
        let story = fixtures::nested_room_story();
        assert_eq!(
            match_agent("The agent is Emma.", &story),
            Some(Perspective::Agent(AgentId::new("Emma").unwrap()))
        );
        assert_eq!(
            match_agent("narrator", &story),
            Some(Perspective::Narrator)
        );
        assert_eq!(
            match_agent("I believe Hannah, not Liam.", &story),
            Some(Perspective::Agent(AgentId::new("Hannah").unwrap()))
        );
        assert_eq!(match_agent("Bob", &story), None);
        assert_eq!(match_agent("Emmaline", &story), None);
    }

    #[test]
    fn yes_no_parsing_reads_the_leading_token() {
        assert_eq!(parse_yes_no("Yes, her own action."), Some(true));
        assert_eq!(parse_yes_no("  no."), Some(false));
        assert_eq!(parse_yes_no("Nothing is certain."), None);
        assert_eq!(parse_yes_no("It depends."), None);
    }

    #[test]
    fn world_replies_tolerate_the_lead_in() {
        let w = parse_world_reply("World State: study:[Emma], Unknown:[]").unwrap();
        assert_eq!(w.to_string(), "study:[Emma], Unknown:[]");
        let w = parse_world_reply("study:[Emma], Unknown:[]").unwrap();
        assert_eq!(w.to_string(), "study:[Emma], Unknown:[]");
        assert!(parse_world_reply("the state is unchanged").is_err());
    }

    #[test]
    fn reframe_cleanup_strips_the_lead_in() {
        assert_eq!(
            cleaned_line("New Question: Where is the jam?\nextra", "New Question:"),
            "Where is the jam?"
        );
        assert_eq!(
            cleaned_line("\n  Where is the jam?", "New Question:"),
            "Where is the jam?"
        );
    }
}

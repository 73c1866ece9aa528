//! Splitting raw story text into statements.

use super::{parse_dialogue_turn, Statement};

/// Granularity of one simulation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum ChunkUnit {
    #[serde(rename = "sentence")]
    Sentence,
    #[serde(rename = "line")]
    Line,
    #[serde(rename = "turn")]
    DialogueTurn,
}

impl std::fmt::Display for ChunkUnit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ChunkUnit::Sentence => "sentence",
            ChunkUnit::Line => "line",
            ChunkUnit::DialogueTurn => "turn",
        })
    }
}

fn split_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut buf = String::new();
    let mut terminated = false;
    for ch in text.chars() {
        if terminated && ch.is_whitespace() {
            let s = buf.trim().to_string();
            if !s.is_empty() {
                out.push(s);
            }
            buf.clear();
            terminated = false;
            continue;
        }
        buf.push(ch);
        terminated = matches!(ch, '.' | '?' | '!');
    }
    let s = buf.trim().to_string();
    if !s.is_empty() {
        out.push(s);
    }
    out
}

fn split_lines(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty())
        .collect()
}

fn split_turns(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let starts_turn = parse_dialogue_turn(trimmed).is_some();
        match out.last_mut() {
            Some(turn) if !starts_turn => {
                turn.push('\n');
                turn.push_str(trimmed);
            }
            _ => out.push(trimmed.to_string()),
        }
    }
    out
}

/// Splits text into indexed statements at the given granularity. Events are
/// attached only for dialogue turns; template stories parse events at story
/// construction, where cross-statement room context is available.
pub fn segment_chunks(text: &str, unit: ChunkUnit) -> Vec<Statement> {
    let pieces = match unit {
        ChunkUnit::Sentence => split_sentences(text),
        ChunkUnit::Line => split_lines(text),
        ChunkUnit::DialogueTurn => split_turns(text),
    };
    pieces
        .into_iter()
        .enumerate()
        .map(|(i, raw)| {
            let parsed = match unit {
                ChunkUnit::DialogueTurn => parse_dialogue_turn(&raw),
                _ => None,
            };
            Statement::new(i, raw, parsed)
        })
        .collect()
}

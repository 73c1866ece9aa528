//! JSON-lines record files: one question per line.

use super::{
    parse_question, Category, Choice, ChoiceSet, ModelError, Question, QuestionRecord, Story,
    StoryKind,
};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Serialize, Deserialize)]
struct RawRecord {
    id: String,
    story: Vec<String>,
    story_kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preamble: Option<String>,
    question: String,
    choices: Vec<RawChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gold: Option<String>,
    order: usize,
    category: String,
}

#[derive(Serialize, Deserialize)]
struct RawChoice {
    label: String,
    text: String,
}

fn violation(id: &str, reason: impl Into<String>) -> ModelError {
    ModelError::InvariantViolation {
        id: id.to_string(),
        reason: reason.into(),
    }
}

fn parse_kind(id: &str, s: &str) -> Result<StoryKind, ModelError> {
    match s {
        "hitom" => Ok(StoryKind::HiTomTemplate),
        "fantom" => Ok(StoryKind::FantomDialogue),
        "free" => Ok(StoryKind::FreeText),
        other => Err(violation(id, format!("unknown story_kind {other:?}"))),
    }
}

fn parse_category(id: &str, s: &str) -> Result<Category, ModelError> {
    match s {
        "tell" => Ok(Category::Tell),
        "no_tell" => Ok(Category::NoTell),
        "fantom_short" => Ok(Category::FantomShort),
        "fantom_long" => Ok(Category::FantomLong),
        other => Err(violation(id, format!("unknown category {other:?}"))),
    }
}

fn from_raw(raw: RawRecord) -> Result<QuestionRecord, ModelError> {
    let id = raw.id;
    let kind = parse_kind(&id, &raw.story_kind)?;
    let category = parse_category(&id, &raw.category)?;
    let story = Story::from_texts(kind, &raw.story).with_preamble(raw.preamble);

    let question = match kind {
        StoryKind::HiTomTemplate => parse_question(&raw.question)
            .map_err(|e| violation(&id, format!("question: {e}")))?,
        _ => Question::opaque(raw.question),
    };
    if kind == StoryKind::HiTomTemplate && question.order() != raw.order {
        return Err(violation(
            &id,
            format!(
                "order field is {} but the question nests {} beliefs",
                raw.order,
                question.order()
            ),
        ));
    }

    let mut options = Vec::with_capacity(raw.choices.len());
    for c in raw.choices {
        let mut chars = c.label.chars();
        let label = match (chars.next(), chars.next()) {
            (Some(l), None) => l,
            _ => return Err(violation(&id, format!("choice label {:?}", c.label))),
        };
        options.push(Choice {
            label,
            text: c.text,
        });
    }
    let choices =
        ChoiceSet::new(options).map_err(|e| violation(&id, format!("choices: {e}")))?;

    let gold_label = match raw.gold {
        None => None,
        Some(g) => {
            let mut chars = g.chars();
            let label = match (chars.next(), chars.next()) {
                (Some(l), None) => l,
                _ => return Err(violation(&id, format!("gold label {g:?}"))),
            };
            if !choices.contains_label(label) {
                return Err(violation(
                    &id,
                    format!("gold label {label:?} outside A..{}", choices.last_label()),
                ));
            }
            Some(label)
        }
    };

    Ok(QuestionRecord {
        id,
        story,
        question,
        choices,
        gold_label,
        order: raw.order,
        category,
    })
}

fn to_raw(r: &QuestionRecord) -> RawRecord {
    RawRecord {
        id: r.id.clone(),
        story: r.story.chunks.iter().map(|c| c.raw.clone()).collect(),
        story_kind: r.story.kind.to_string(),
        preamble: r.story.preamble.clone(),
        question: r.question.raw.clone(),
        choices: r
            .choices
            .options()
            .iter()
            .map(|c| RawChoice {
                label: c.label.to_string(),
                text: c.text.clone(),
            })
            .collect(),
        gold: r.gold_label.map(|l| l.to_string()),
        order: r.order,
        category: r.category.to_string(),
    }
}

/// Loads a JSON-lines record file, validating every record.
pub fn load_records(path: &Path) -> Result<Vec<QuestionRecord>, ModelError> {
    let content = std::fs::read_to_string(path)?;
    parse_records(&content)
}

/// Parses JSON-lines record content. Blank lines are skipped.
pub fn parse_records(content: &str) -> Result<Vec<QuestionRecord>, ModelError> {
    let mut out = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(line).map_err(|e| ModelError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(from_raw(raw)?);
    }
    Ok(out)
}

/// Writes records as JSON lines. Inverse of [`load_records`] up to field
/// normalisation; output is byte-stable for a given input.
pub fn save_records(path: &Path, records: &[QuestionRecord]) -> Result<(), ModelError> {
    let mut buf = String::new();
    for r in records {
        let raw = to_raw(r);
        buf.push_str(&serde_json::to_string(&raw).expect("record serializes"));
        buf.push('\n');
    }
    std::fs::write(path, buf)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FactualQuery;

    fn sample_line() -> String {
        concat!(
            r#"{"id":"t-1","story":["Emma entered the study.","The tomato is in the red_container.","Emma exited the study."],"#,
            r#""story_kind":"hitom","question":"Where is the tomato really?","#,
            r#""choices":[{"label":"A","text":"red_container"},{"label":"B","text":"green_drawer"}],"#,
            r#""gold":"A","order":0,"category":"no_tell"}"#
        )
        .to_string()
    }

    #[test]
    fn loads_template_records_with_parsed_questions() {
        let records = parse_records(&sample_line()).unwrap();
        assert_eq!(records.len(), 1);
        let r = &records[0];
        assert_eq!(r.id, "t-1");
        assert_eq!(r.story.kind, StoryKind::HiTomTemplate);
        assert_eq!(r.story.chunks.len(), 3);
        assert!(r.story.chunks[0].parsed.is_some());
        assert_eq!(
            r.question.core,
            FactualQuery::WhereIs {
                object: "tomato".into()
            }
        );
        assert_eq!(r.gold_label, Some('A'));
    }

    #[test]
    fn rejects_gold_outside_label_range() {
        let line = sample_line().replace(r#""gold":"A""#, r#""gold":"Q""#);
        let err = parse_records(&line).unwrap_err();
        assert!(
            matches!(err, ModelError::InvariantViolation { ref id, .. } if id == "t-1"),
            "{err}"
        );
    }

    #[test]
    fn rejects_order_chain_mismatch() {
        let line = sample_line().replace(r#""order":0"#, r#""order":2"#);
        let err = parse_records(&line).unwrap_err();
        assert!(matches!(err, ModelError::InvariantViolation { .. }), "{err}");
    }

    #[test]
    fn rejects_malformed_json_with_line_number() {
        let content = format!("{}\nnot json\n", sample_line());
        let err = parse_records(&content).unwrap_err();
        assert!(matches!(err, ModelError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn fantom_questions_stay_opaque() {
        let line = sample_line()
            .replace(r#""story_kind":"hitom""#, r#""story_kind":"fantom""#)
            .replace(
                r#""question":"Where is the tomato really?""#,
                r#""question":"Does Sara know what Gianna learned?""#,
            )
            .replace(r#""category":"no_tell""#, r#""category":"fantom_short""#);
        let records = parse_records(&line).unwrap();
        assert!(matches!(
            records[0].question.core,
            FactualQuery::RawBinary { .. }
        ));
        assert_eq!(records[0].order, 0);
    }

    #[test]
    fn save_then_load_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");
        let records = parse_records(&sample_line()).unwrap();
        save_records(&path, &records).unwrap();
        let reloaded = load_records(&path).unwrap();
        assert_eq!(records, reloaded);
        let bytes_a = std::fs::read(&path).unwrap();
        save_records(&path, &reloaded).unwrap();
        let bytes_b = std::fs::read(&path).unwrap();
        assert_eq!(bytes_a, bytes_b);
    }

    #[test]
    fn empty_content_yields_no_records() {
        assert!(parse_records("\n\n").unwrap().is_empty());
    }
}

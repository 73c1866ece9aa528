//! Human-readable trace dumps with divergence flagging.
//!
//! A wrong awareness judgment at pass n corrupts every later pass, so the
//! inspector replays the deterministic witnessing rules over each recorded
//! decision and flags any disagreement, marking downstream passes tainted.

use super::HarnessError;
use crate::engine::SimulationTrace;
use crate::model::{AgentId, QuestionRecord, Statement, Story};
use crate::symbolic::rules;
use crate::world::WorldState;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

/// Renders a persisted trace with per-decision annotations.
pub fn trace_inspect(trace_path: &Path, record: &QuestionRecord) -> Result<String, HarnessError> {
    let text = fs::read_to_string(trace_path).map_err(|e| HarnessError::MissingTrace {
        path: trace_path.display().to_string(),
        message: e.to_string(),
    })?;
    let trace: SimulationTrace =
        serde_json::from_str(&text).map_err(|e| HarnessError::MissingTrace {
            path: trace_path.display().to_string(),
            message: e.to_string(),
        })?;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "record {} | strategy {} | answered {}{}",
        trace.record_id,
        trace.strategy,
        trace.final_answer,
        match record.gold_label {
            Some(g) if g == trace.final_answer => " (matches gold)".to_string(),
            Some(g) => format!(" (gold is {g})"),
            None => String::new(),
        }
    );

    let mut divergences = 0usize;
    let mut tainted = false;
    for (i, pass) in trace.passes.iter().enumerate() {
        let _ = writeln!(
            out,
            "\npass {}: simulating {} | question now: {}",
            i + 1,
            pass.agent,
            pass.reframed_question
        );
        if tainted {
            let _ = writeln!(out, "  input tainted by an earlier divergence");
        }
        let agent = AgentId::new(&pass.agent).ok();
        let texts: Vec<&str> = pass.decisions.iter().map(|d| d.statement.as_str()).collect();
        let rebuilt = Story::from_texts(record.story.kind, &texts);
        let mut kept: Vec<Statement> = Vec::new();
        for (j, decision) in pass.decisions.iter().enumerate() {
            let mark = if decision.known { "keep" } else { "drop" };
            let _ = writeln!(
                out,
                "  {mark} #{:<3} {}  [{}]",
                decision.index, decision.statement, decision.basis
            );
            let statement = &rebuilt.chunks[j];
            let verdict = agent.as_ref().and_then(|a| {
                let world = WorldState::from_str(pass.world_snapshots.get(j)?).ok()?;
                Some(rules::knows(a, statement, &kept, &world))
            });
            if let Some(v) = verdict {
                if v.known != decision.known {
                    divergences += 1;
                    tainted = true;
                    let rule_says = if v.known { "known" } else { "not known" };
                    let _ = writeln!(
                        out,
                        "       ^ diverges: witnessing rules say {rule_says} ({})",
                        v.basis
                    );
                }
            }
            if decision.known {
                kept.push(Statement::new(
                    kept.len(),
                    statement.raw.clone(),
                    statement.parsed.clone(),
                ));
            }
        }
    }

    if let Some(filtered) = &trace.filtered_story {
        let _ = writeln!(out, "\nperspective-filtered story ({} lines):", filtered.len());
        for line in filtered {
            let _ = writeln!(out, "  {line}");
        }
    }
    if let Some(rationale) = &trace.rationale {
        let _ = writeln!(out, "\nrationale: {rationale}");
    }
    let _ = writeln!(out, "\ncalls: {}", trace.calls.total());
    let _ = writeln!(out, "divergences from witnessing rules: {divergences}");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{evaluate, RunConfig, Strategy};
    use crate::fixtures;
    use crate::model::{Category, Question};
    use crate::preprocess::disambiguate_hitom;
    use crate::symbolic::SymbolicReasoner;

    fn fixture_record() -> QuestionRecord {
        let story = disambiguate_hitom(&fixtures::nested_room_story()).unwrap();
        QuestionRecord {
            id: "fixture".to_string(),
            story,
            question: Question::from_parts(
                vec![AgentId::new("Emma").unwrap()],
                crate::model::FactualQuery::WhereIs {
                    object: "tomato".to_string(),
                },
            ),
            choices: fixtures::nested_room_choices(),
            gold_label: Some('N'),
            order: 1,
            category: Category::Tell,
        }
    }

    #[test]
    fn symbolic_traces_show_zero_divergences() {
        let record = fixture_record();
        let outcome = evaluate(
            &record,
            &SymbolicReasoner::new(),
            &RunConfig::new(Strategy::Decompose),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.json");
        fs::write(&path, serde_json::to_string_pretty(&outcome.trace).unwrap()).unwrap();
        let dump = trace_inspect(&path, &record).unwrap();
        assert!(dump.contains("divergences from witnessing rules: 0"), "{dump}");
        assert!(dump.contains("simulating Emma"));
        assert!(dump.contains("(matches gold)"));
        assert!(dump.contains("drop #"), "some statement must be dropped");
    }

    #[test]
    fn doctored_decisions_are_flagged() {
        let record = fixture_record();
        let outcome = evaluate(
            &record,
            &SymbolicReasoner::new(),
            &RunConfig::new(Strategy::Decompose),
        )
        .unwrap();
        let mut trace = outcome.trace;
        let flipped = &mut trace.passes[0].decisions[5];
        flipped.known = !flipped.known;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.json");
        fs::write(&path, serde_json::to_string_pretty(&trace).unwrap()).unwrap();
        let dump = trace_inspect(&path, &record).unwrap();
        assert!(dump.contains("diverges: witnessing rules say"), "{dump}");
        assert!(!dump.contains("divergences from witnessing rules: 0"));
    }

    #[test]
    fn missing_traces_error_cleanly() {
        let record = fixture_record();
        let err = trace_inspect(Path::new("/nonexistent/trace.json"), &record).unwrap_err();
        assert!(matches!(err, HarnessError::MissingTrace { .. }));
    }
}

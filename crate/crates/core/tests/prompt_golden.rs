//! Snapshot tests pinning every rendered prompt byte-for-byte.
//!
//! Run with UPDATE_GOLDEN=1 to rewrite the snapshots after an intentional
//! template change.

use decompose_tom::llm::{render_prompt, PromptId};
use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

fn canonical_bindings() -> BTreeMap<&'static str, String> {
    let mut b = BTreeMap::new();
    b.insert(
        "question",
        "Where does Carter think Hannah thinks Liam thinks Emma thinks the tomato is?".to_string(),
    );
    b.insert("agent", "Emma".to_string());
    b.insert(
        "story",
        "Emma entered the study.\nThe tomato is in the red_container.\nEmma exited the study."
            .to_string(),
    );
    b.insert("part", "Emma exited the study.".to_string());
    b.insert(
        "glob_world_model",
        "study:[Hannah, Liam, Nathan, Carter], Unknown:[Emma]".to_string(),
    );
    b.insert(
        "choices",
        "A. red_container, B. green_drawer, C. blue_bottle".to_string(),
    );
    b.insert("agents", "Carter, Hannah, Liam, Emma".to_string());
    b.insert(
        "rules",
        "- Agents in the same room see each other's actions.".to_string(),
    );
    b
}

fn golden_path(id: PromptId) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{}.txt", id.name()))
}

#[test]
fn rendered_prompts_match_the_checked_in_snapshots() {
    let bindings = canonical_bindings();
    let update = std::env::var("UPDATE_GOLDEN").is_ok();
    let mut mismatches = Vec::new();
    for id in PromptId::ALL {
        let rendered = render_prompt(id, &bindings).expect("render");
        let path = golden_path(id);
        if update {
            fs::create_dir_all(path.parent().unwrap()).unwrap();
            fs::write(&path, &rendered).unwrap();
            continue;
        }
        let expected = fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("missing snapshot {}: {e}", path.display()));
        if rendered != expected {
            mismatches.push(id.name());
        }
    }
    assert!(
        mismatches.is_empty(),
        "prompts drifted from snapshots: {mismatches:?}"
    );
}

#[test]
fn snapshots_exist_for_every_template() {
    if std::env::var("UPDATE_GOLDEN").is_ok() {
        return;
    }
    for id in PromptId::ALL {
        assert!(golden_path(id).exists(), "no snapshot for {}", id.name());
    }
}

//! Parsing and rendering of nested belief questions.
//!
//! The template grammar covers "Where is the X really?", arbitrarily nested
//! "Where does A think B thinks ... the X is?", and the look-for variant
//! "Where will A look for the X?" (the looker counts as a belief layer).
//! First- and second-person subjects (I, you, we, they, us) address the
//! reader rather than a character and are dropped from the chain.

use super::{AgentId, FactualQuery, ModelError, Question};

const PRONOUNS: [&str; 5] = ["i", "you", "we", "they", "us"];

fn mismatch(raw: &str) -> ModelError {
    ModelError::TemplateMismatch(raw.to_string())
}

fn is_pronoun(tok: &str) -> bool {
    PRONOUNS.iter().any(|p| tok.eq_ignore_ascii_case(p))
}

fn push_subject(chain: &mut Vec<AgentId>, tok: &str, raw: &str) -> Result<(), ModelError> {
    if is_pronoun(tok) {
        return Ok(());
    }
    if !tok.chars().next().is_some_and(|c| c.is_uppercase()) {
        return Err(mismatch(raw));
    }
    chain.push(AgentId::new(tok).map_err(|_| mismatch(raw))?);
    Ok(())
}

fn take<'a>(toks: &[&'a str], i: &mut usize) -> Option<&'a str> {
    let t = toks.get(*i).copied();
    if t.is_some() {
        *i += 1;
    }
    t
}

fn finish(raw: &str, chain: Vec<AgentId>, object: String) -> Result<Question, ModelError> {
    if object.is_empty() {
        return Err(mismatch(raw));
    }
    Ok(Question {
        raw: raw.trim().to_string(),
        chain,
        core: FactualQuery::WhereIs { object },
    })
}

fn parse_look_for(
    toks: &[&str],
    i: &mut usize,
    raw: &str,
    chain: Vec<AgentId>,
) -> Result<Question, ModelError> {
    if take(toks, i) != Some("look") || take(toks, i) != Some("for") || take(toks, i) != Some("the")
    {
        return Err(mismatch(raw));
    }
    finish(raw, chain, toks[*i..].join(" "))
}

/// Parses a template belief question into its chain and factual core.
pub fn parse_question(raw: &str) -> Result<Question, ModelError> {
    let body = raw.trim();
    let body = body.strip_suffix('?').unwrap_or(body);
    let toks: Vec<&str> = body.split_whitespace().collect();
    let mut i = 0;
    let mut chain: Vec<AgentId> = Vec::new();

    if take(&toks, &mut i) != Some("Where") {
        return Err(mismatch(raw));
    }
    match take(&toks, &mut i) {
        Some("is") => {
            if take(&toks, &mut i) != Some("the") {
                return Err(mismatch(raw));
            }
            let mut obj = toks[i..].to_vec();
            if obj.last() == Some(&"really") {
                obj.pop();
            }
            finish(raw, chain, obj.join(" "))
        }
        Some("will") => {
            let subject = take(&toks, &mut i).ok_or_else(|| mismatch(raw))?;
            push_subject(&mut chain, subject, raw)?;
            parse_look_for(&toks, &mut i, raw, chain)
        }
        Some("does") | Some("do") => loop {
            let subject = take(&toks, &mut i).ok_or_else(|| mismatch(raw))?;
            match toks.get(i).copied() {
                Some("think") | Some("thinks") => {
                    i += 1;
                    push_subject(&mut chain, subject, raw)?;
                    if toks.get(i) == Some(&"that") {
                        i += 1;
                    }
                }
                Some("will") => {
                    i += 1;
                    push_subject(&mut chain, subject, raw)?;
                    return parse_look_for(&toks, &mut i, raw, chain);
                }
                _ => return Err(mismatch(raw)),
            }
            if toks.get(i) == Some(&"the") {
                i += 1;
                let rest = &toks[i..];
                let object = match rest {
                    [.., "really", "is"] | [.., "is", "really"] => rest[..rest.len() - 2].join(" "),
                    [.., "is"] => rest[..rest.len() - 1].join(" "),
                    _ => return Err(mismatch(raw)),
                };
                return finish(raw, chain, object);
            }
        },
        _ => Err(mismatch(raw)),
    }
}

/// Canonical surface form for a chain over a factual core. Inverse of
/// [`parse_question`] on canonical questions.
pub fn render_question(chain: &[AgentId], core: &FactualQuery) -> String {
    match core {
        FactualQuery::RawBinary { text } => text.clone(),
        FactualQuery::WhereIs { object } => {
            if chain.is_empty() {
                return format!("Where is the {object} really?");
            }
            let mut out = format!("Where does {} think", chain[0]);
            for a in &chain[1..] {
                out.push_str(&format!(" {a} thinks"));
            }
            out.push_str(&format!(" the {object} is?"));
            out
        }
    }
}

impl Question {
    /// Builds a question whose raw text is the canonical rendering.
    pub fn from_parts(chain: Vec<AgentId>, core: FactualQuery) -> Self {
        let raw = render_question(&chain, &core);
        Question { raw, chain, core }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(name: &str) -> AgentId {
        AgentId::new(name).unwrap()
    }

    #[test]
    fn parses_factual_form_with_and_without_really() {
        for raw in ["Where is the tomato really?", "Where is the tomato?"] {
            let q = parse_question(raw).unwrap();
            assert!(q.chain.is_empty(), "{raw}");
            assert_eq!(
                q.core,
                FactualQuery::WhereIs {
                    object: "tomato".into()
                }
            );
        }
    }

    #[test]
    fn parses_nested_chain_outermost_first() {
        let q = parse_question(
            "Where does Carter think Hannah thinks Liam thinks Emma thinks the tomato is?",
        )
        .unwrap();
        assert_eq!(q.chain, vec![a("Carter"), a("Hannah"), a("Liam"), a("Emma")]);
        assert_eq!(q.order(), 4);
        assert_eq!(
            q.core,
            FactualQuery::WhereIs {
                object: "tomato".into()
            }
        );
    }

    #[test]
    fn look_for_subject_joins_the_chain() {
        let q = parse_question("Where will Emma look for the tomato?").unwrap();
        assert_eq!(q.chain, vec![a("Emma")]);
        let q = parse_question("Where does Hannah think Emma will look for the tomato?").unwrap();
        assert_eq!(q.chain, vec![a("Hannah"), a("Emma")]);
    }

    #[test]
    fn pronoun_subjects_are_dropped_from_the_chain() {
        let q = parse_question("Where do you think the jam is?").unwrap();
        assert!(q.chain.is_empty());
        let q = parse_question("Where do you think Emma thinks the jam is?").unwrap();
        assert_eq!(q.chain, vec![a("Emma")]);
    }

    #[test]
    fn tolerates_that_after_think() {
        let q = parse_question("Where does Emma think that Liam thinks the jam is?").unwrap();
        assert_eq!(q.chain, vec![a("Emma"), a("Liam")]);
    }

    #[test]
    fn rejects_non_template_questions() {
        for raw in [
            "What does Emma believe?",
            "Where does Emma wonder the jam is?",
            "Where does think the jam is?",
            "",
        ] {
            assert!(
                matches!(parse_question(raw), Err(ModelError::TemplateMismatch(_))),
                "{raw:?}"
            );
        }
    }

    #[test]
    fn renders_factual_and_nested_forms() {
        let core = FactualQuery::WhereIs {
            object: "tomato".into(),
        };
        assert_eq!(render_question(&[], &core), "Where is the tomato really?");
        assert_eq!(
            render_question(&[a("Hannah"), a("Liam"), a("Emma")], &core),
            "Where does Hannah think Liam thinks Emma thinks the tomato is?"
        );
    }

    proptest! {
        #[test]
        fn canonical_questions_round_trip(
            chain in proptest::collection::vec(
                "[A-Z][a-z]{2,8}".prop_filter("not a pronoun", |n| {
                    !["You", "They", "We", "Us"].contains(&n.as_str())
                }),
                0..5,
            ),
            object in "[a-z]{3}[a-z_]{0,7}",
        ) {
            let chain: Vec<AgentId> = chain.into_iter().map(|n| AgentId::new(n).unwrap()).collect();
            let core = FactualQuery::WhereIs { object };
            let raw = render_question(&chain, &core);
            let parsed = parse_question(&raw).unwrap();
            prop_assert_eq!(parsed.chain, chain);
            prop_assert_eq!(parsed.core, core);
        }
    }
}

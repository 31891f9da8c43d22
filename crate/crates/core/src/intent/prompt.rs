use serde::{Deserialize, Serialize};

use super::{IntentError, IntentQuery, ToolCatalog};

/// System/user wording of the intent prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PromptTemplate {
    pub system: String,
    /// Appended verbatim to the user turn.
    pub instruction: String,
}

impl Default for PromptTemplate {
    fn default() -> Self {
        Self {
            system: "You are the perception module of a robot that hands tools to a human coworker. \
                     From the request and the image of the receiving hand, decide which tool the \
                     person needs and whether the receiving hand is a left or a right hand."
                .into(),
            instruction: "Answer with exactly one line that follows this template and nothing else: \
                          Pass the <tool name> to <left|right> hand of human"
                .into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatPrompt {
    pub system: String,
    pub user: String,
}

impl ChatPrompt {
    /// Both turns as one string, for logging or single-turn endpoints.
    pub fn render(&self) -> String {
        format!("[system]\n{}\n\n[user]\n{}\n", self.system, self.user)
    }
}

/// Assembles the prompt: system role, the catalog (one name per line), the
/// request text, and the output-template instruction.
pub fn build_prompt(
    query: &IntentQuery,
    catalog: &ToolCatalog,
    template: &PromptTemplate,
) -> Result<ChatPrompt, IntentError> {
    query.validate()?;
    let mut user = String::from("Available tools:\n");
    for name in catalog.names() {
        user.push_str("- ");
        user.push_str(name);
        user.push('\n');
    }
    user.push_str("\nRequest: ");
    user.push_str(query.text.trim());
    user.push('\n');
    if query.image.is_some() {
        user.push_str("An image of the receiving hand is attached.\n");
    }
    user.push('\n');
    user.push_str(&template.instruction);
    Ok(ChatPrompt { system: template.system.clone(), user })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intent::{IntentError, ToolEntry};

    fn listed(prompt: &ChatPrompt) -> Vec<&str> {
        prompt.user.lines().filter_map(|l| l.strip_prefix("- ")).collect()
    }

    #[test]
    fn prompt_lists_catalog_and_instruction() {
        let entry = |n: &str| ToolEntry { name: n.into(), synonyms: vec![], use_cases: vec![] };
        let cat = ToolCatalog::new(vec![entry("knife"), entry("scissors")]).unwrap();
        let tpl = PromptTemplate::default();
        let p = build_prompt(&IntentQuery::text("I need a knife"), &cat, &tpl).unwrap();
        assert_eq!(listed(&p), ["knife", "scissors"]);
        assert!(p.user.contains(&tpl.instruction));
        assert!(p.render().contains("scissors"));
        let again = build_prompt(&IntentQuery::text("I need a knife"), &cat, &tpl).unwrap();
        assert_eq!(p.render(), again.render());
        assert!(matches!(build_prompt(&IntentQuery::text(""), &cat, &tpl), Err(IntentError::EmptyText)));
    }

    #[test]
    fn listing_covers_fixture_catalog_once_each() {
        let cat = ToolCatalog::fixture();
        let p = build_prompt(&IntentQuery::text("help"), &cat, &PromptTemplate::default()).unwrap();
        let names: Vec<&str> = cat.names().collect();
        assert_eq!(listed(&p), names);
    }
}

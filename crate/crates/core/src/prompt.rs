//! Chat prompt assembly and the whitespace token estimate.

use serde::Serialize;

use crate::{Error, Result};

const INSTRUCTION: &str =
    "You are a friendly chatbot who responds to the user's question by looking into context.";

/// A filtered prompt next to its rank-matched original.
/// `context_token_estimate` counts whitespace tokens of the filtered prompt.
#[derive(Debug, Clone, Serialize)]
pub struct PromptBundle {
    pub filtered_prompt: String,
    pub original_prompt: String,
    pub question: String,
    pub context_token_estimate: usize,
}

impl PromptBundle {
    pub fn assemble(
        filtered_docs: &[String],
        original_docs: &[String],
        question: &str,
    ) -> Result<PromptBundle> {
        let filtered_prompt = build_prompt(filtered_docs, question)?;
        let original_prompt = build_prompt(original_docs, question)?;
        let context_token_estimate = whitespace_token_count(&filtered_prompt);
        Ok(PromptBundle {
            filtered_prompt,
            original_prompt,
            question: question.to_string(),
            context_token_estimate,
        })
    }
}

/// Renders the fixed template: one instruction line, the documents joined
/// by single newlines under "Context:", then the question, with three
/// "</s>" terminators and no trailing newline.
pub fn build_prompt(docs: &[String], question: &str) -> Result<String> {
    if question.is_empty() {
        return Err(Error::Config("question must not be empty".into()));
    }
    if docs.is_empty() {
        log::warn!("building a prompt with an empty context");
    }
    Ok(format!(
        "{INSTRUCTION}</s>\nContext:\n{}\n</s>\nQuestion: {question}</s>",
        docs.join("\n")
    ))
}

/// Crude context-size estimate: the number of whitespace-separated tokens.
pub fn whitespace_token_count(text: &str) -> usize {
    text.split_whitespace().count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn two_docs_render_the_frozen_template() {
        let got = build_prompt(&docs(&["A", "B"]), "Q?").unwrap();
        let want = "You are a friendly chatbot who responds to the user's question \
                    by looking into context.</s>\nContext:\nA\nB\n</s>\nQuestion: Q?</s>";
        assert_eq!(got, want);
    }

    #[test]
    fn output_has_exactly_three_terminators() {
        let got = build_prompt(&docs(&["alpha", "beta", "gamma"]), "why?").unwrap();
        assert_eq!(got.matches("</s>").count(), 3);
        assert!(!got.ends_with('\n'));
    }

    #[test]
    fn empty_context_keeps_the_section_structure() {
        let got = build_prompt(&[], "why?").unwrap();
        assert!(got.contains("Context:\n\n</s>"));
        assert_eq!(got.matches("</s>").count(), 3);
    }

    #[test]
    fn empty_question_is_rejected() {
        assert!(build_prompt(&docs(&["A"]), "").is_err());
    }

    #[test]
    fn question_appears_verbatim_exactly_once() {
        let question = "what is the boiling point of lead?";
        let got = build_prompt(&docs(&["some text", "more text"]), question).unwrap();
        assert_eq!(got.matches(question).count(), 1);
    }

    #[test]
    fn identical_inputs_give_identical_bytes() {
        let d = docs(&["x", "y"]);
        assert_eq!(
            build_prompt(&d, "q?").unwrap(),
            build_prompt(&d, "q?").unwrap()
        );
    }

    #[test]
    fn token_count_splits_on_any_whitespace() {
        assert_eq!(whitespace_token_count("a b\tc\nd"), 4);
        assert_eq!(whitespace_token_count(""), 0);
        assert_eq!(whitespace_token_count("   "), 0);
        assert_eq!(whitespace_token_count("one"), 1);
    }

    #[test]
    fn filtering_never_grows_the_token_estimate() {
        let original = docs(&["alpha beta", "gamma delta", "epsilon"]);
        let filtered = docs(&["alpha beta", "epsilon"]);
        let bundle = PromptBundle::assemble(&filtered, &original, "q?").unwrap();
        assert_eq!(
            bundle.context_token_estimate,
            whitespace_token_count(&bundle.filtered_prompt)
        );
        assert!(
            whitespace_token_count(&bundle.filtered_prompt)
                <= whitespace_token_count(&bundle.original_prompt)
        );
    }
}

use super::EvalTask;
use crate::store::Schema;

pub const PROMPT_INTRO: &str = "You write plausibility checks for identity documents in the check language \
described below. Reply with one complete check in a fenced code block.";

const GRAMMAR: &str = r#"Grammar:
  check "name" {
      require <expr> else not_applicable("message");   # relevance guards, first
      let <name> = <expr>;                              # bindings
      for <index>, <item> in <expr> { <map>[<key>] = <value>; }
      return (<bool>, <map>);                           # exactly once, last
  }
Expressions: literals (null, true, false, integers, reals, "strings", [lists]),
  date(y, m, d), map(), and or not, == != < <= > >= in, + - * /, field access a.b,
  indexing a[i], builtins len abs format year month day number linear_fit.
Queries: Collection.filter(path op value, ...), .exclude(...), .get(...), .count(),
  .first(), .all(); ops == != < <= > >= in iexact isnull; paths use dots.
The variable `document` is the document under test.
Outcomes print as triggered=<bool> details={...} or not_applicable="message"."#;

/// The fixed system prompt: grammar summary followed by the store schema.
pub fn language_card() -> String {
    format!("{PROMPT_INTRO}\n\n{GRAMMAR}\n\nSchema:\n{}", Schema.describe())
}

/// System and user prompt for a task. Examples are appended as
/// `input: ... → output: ...` lines; the block is omitted when there are none.
pub fn build_prompt(task: &EvalTask) -> (String, String) {
    let mut user = task.description.trim().to_string();
    if !task.examples.is_empty() {
        user.push_str("\n\nExamples:");
        for ex in &task.examples {
            user.push_str(&format!("\ninput: {} → output: {}", ex.input, ex.output));
        }
    }
    (language_card(), user)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::TaskExample;

    fn task(examples: Vec<TaskExample>) -> EvalTask {
        EvalTask {
            id: "t1".into(),
            level: "Low".into(),
            description: "For German driving licenses issued between March 2000 and March 2010, the material must be plastic.".into(),
            reference_code: String::new(),
            test_documents: vec![],
            reference_outputs: vec![],
            examples,
        }
    }

    #[test]
    fn description_and_examples() {
        let (system, user) = build_prompt(&task(vec![TaskExample {
            input: r#"{"id":1}"#.into(),
            output: "triggered=false details={}".into(),
        }]));
        assert!(system.contains("Documents("));
        assert!(user.contains("For German driving licenses issued between March 2000 and March 2010, the material must be plastic."));
        assert!(user.ends_with("\nExamples:\ninput: {\"id\":1} → output: triggered=false details={}"));
    }

    #[test]
    fn no_examples_no_block_and_deterministic() {
        let t = task(vec![]);
        let (_, user) = build_prompt(&t);
        assert!(!user.contains("Examples"));
        assert_eq!(build_prompt(&t), build_prompt(&t.clone()));
    }
}

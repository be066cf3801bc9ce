use std::fmt;

use indexmap::IndexMap;

/// Result of running a check on one document.
///
/// `guards` holds the `guard_i` entries logged by relaxed guards; it is kept
/// apart from the body's detail map so the two can be compared separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Triggered {
        flag: bool,
        details: IndexMap<String, String>,
        guards: IndexMap<String, String>,
    },
    NotApplicable {
        message: String,
    },
    RuntimeError {
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExecMode {
    Exact,
    Relaxed,
}

impl CheckOutcome {
    pub fn triggered(flag: bool, details: IndexMap<String, String>) -> Self {
        CheckOutcome::Triggered {
            flag,
            details,
            guards: IndexMap::new(),
        }
    }

    pub fn runtime_error(message: impl Into<String>) -> Self {
        CheckOutcome::RuntimeError {
            message: message.into(),
        }
    }

    /// The same outcome with logged guard entries dropped.
    pub fn without_guards(&self) -> Self {
        match self {
            CheckOutcome::Triggered { flag, details, .. } => {
                CheckOutcome::triggered(*flag, details.clone())
            }
            other => other.clone(),
        }
    }

    /// Guard entries first, then body entries; a body key replaces a guard
    /// entry of the same name in place.
    pub fn merged_details(&self) -> Option<IndexMap<String, String>> {
        match self {
            CheckOutcome::Triggered {
                details, guards, ..
            } => {
                let mut merged = guards.clone();
                merged.extend(details.iter().map(|(k, v)| (k.clone(), v.clone())));
                Some(merged)
            }
            _ => None,
        }
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

/// Canonical single-line rendering that metrics compare.
pub fn format_outcome(outcome: &CheckOutcome) -> String {
    match outcome {
        CheckOutcome::Triggered { flag, .. } => {
            let merged = outcome.merged_details().unwrap_or_default();
            let details = serde_json::to_string(&merged).expect("maps serialize");
            format!("triggered={flag} details={details}")
        }
        CheckOutcome::NotApplicable { message } => format!("not_applicable={}", json_string(message)),
        CheckOutcome::RuntimeError { message } => format!("error={}", json_string(message)),
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_outcome(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        let details = IndexMap::from([("Material 0".to_string(), "Kunststoff".to_string())]);
        assert_eq!(
            format_outcome(&CheckOutcome::triggered(false, details)),
            r#"triggered=false details={"Material 0":"Kunststoff"}"#
        );
        assert_eq!(
            format_outcome(&CheckOutcome::NotApplicable { message: "m".into() }),
            r#"not_applicable="m""#
        );
        assert_eq!(format_outcome(&CheckOutcome::runtime_error("m")), r#"error="m""#);
        assert_eq!(
            format_outcome(&CheckOutcome::runtime_error("a \"b\"\n")),
            r#"error="a \"b\"\n""#
        );
    }

    #[test]
    fn guards_render_first() {
        let outcome = CheckOutcome::Triggered {
            flag: true,
            details: IndexMap::from([("k".to_string(), "v".to_string()), ("guard_1".to_string(), "body".to_string())]),
            guards: IndexMap::from([("guard_0".to_string(), "a".to_string()), ("guard_1".to_string(), "b".to_string())]),
        };
        assert_eq!(
            format_outcome(&outcome),
            r#"triggered=true details={"guard_0":"a","guard_1":"body","k":"v"}"#
        );
        assert_eq!(
            format_outcome(&outcome.without_guards()),
            r#"triggered=true details={"k":"v","guard_1":"body"}"#
        );
    }
}

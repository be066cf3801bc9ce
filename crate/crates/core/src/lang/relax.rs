use std::sync::LazyLock;

use regex::Regex;

static GUARD: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\belse(\s+)not_applicable(\s*)\(").expect("valid pattern"));

/// Rewrites every `else not_applicable(` into `else log_not_applicable(`,
/// leaving all other bytes untouched. Works on any text, parseable or not.
pub fn relax_guards(text: &str) -> String {
    GUARD
        .replace_all(text, "else${1}log_not_applicable${2}(")
        .into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rewrites_each_guard() {
        let src = "require document.example == \"example\"\n    else not_applicable(\"Given document is not relevant for this check.\");";
        let out = relax_guards(src);
        assert_eq!(
            out,
            "require document.example == \"example\"\n    else log_not_applicable(\"Given document is not relevant for this check.\");"
        );
        let three = "a else not_applicable(\"x\"); b else  not_applicable (\"y\"); c else\nnot_applicable(\"z\");";
        assert_eq!(relax_guards(three).matches("log_not_applicable").count(), 3);
    }

    #[test]
    fn identity_without_guards_and_idempotent() {
        let s = "check \"c\" { return (true, map()); } # not_applicable(";
        assert_eq!(relax_guards(s), s);
        let once = relax_guards("x else not_applicable(\"m\")");
        assert_eq!(relax_guards(&once), once);
    }
}

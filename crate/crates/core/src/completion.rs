/// Pulls check source out of a model completion: the body of the first
/// fenced code block when there is one, otherwise the completion unchanged.
pub fn extract_code(completion: &str) -> String {
    let Some(start) = completion.find("```") else {
        return completion.to_string();
    };
    let after = &completion[start + 3..];
    // Skip an info string such as `pcl` on the opening fence line.
    let body = match after.find('\n') {
        Some(nl) => &after[nl + 1..],
        None => return completion.to_string(),
    };
    match body.find("```") {
        // The newline before the closing fence belongs to the fence line.
        Some(end) => {
            let code = &body[..end];
            code.strip_suffix('\n')
                .map_or(code, |c| c.strip_suffix('\r').unwrap_or(c))
                .to_string()
        }
        None => body.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fenced_and_plain() {
        assert_eq!(extract_code("check \"c\" {}"), "check \"c\" {}");
        assert_eq!(extract_code("Here:\n```pcl\ncheck \"c\" {}\n```\nDone"), "check \"c\" {}");
        assert_eq!(extract_code("```\na\n\n```"), "a\n");
        assert_eq!(extract_code("```\na\n"), "a\n");
        assert_eq!(extract_code("x ```"), "x ```");
    }
}

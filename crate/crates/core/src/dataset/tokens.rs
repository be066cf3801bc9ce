use std::fmt;
use std::io::Write;
use std::process::{Command, Stdio};
use std::str::FromStr;

use super::DatasetError;

/// Environment variable naming the command used by the `external` counter.
/// The command reads text on stdin and prints a token count.
pub const TOKENIZER_CMD_ENV: &str = "PLAUSCHECK_TOKENIZER_CMD";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenCounter {
    /// Word runs, with every punctuation character counted on its own.
    ApproxWords,
    /// UTF-8 length divided by four, rounded up.
    BytesDiv4,
    /// A shell command fed the text on stdin.
    External(String),
}

impl TokenCounter {
    pub fn id(&self) -> &'static str {
        match self {
            TokenCounter::ApproxWords => "approx-words",
            TokenCounter::BytesDiv4 => "bytes-div-4",
            TokenCounter::External(_) => "external",
        }
    }
}

impl fmt::Display for TokenCounter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TokenCounter {
    type Err = DatasetError;

    /// `external` takes its command from the environment; `external:CMD`
    /// names it inline.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "approx-words" => Ok(TokenCounter::ApproxWords),
            "bytes-div-4" => Ok(TokenCounter::BytesDiv4),
            "external" => std::env::var(TOKENIZER_CMD_ENV)
                .map(TokenCounter::External)
                .map_err(|_| DatasetError::Counter(format!("`external` counter needs {TOKENIZER_CMD_ENV}"))),
            other => match other.strip_prefix("external:") {
                Some(cmd) if !cmd.is_empty() => Ok(TokenCounter::External(cmd.to_string())),
                _ => Err(DatasetError::UnknownCounter(other.to_string())),
            },
        }
    }
}

fn approx_words(text: &str) -> usize {
    let mut count = 0;
    let mut in_word = false;
    for c in text.chars() {
        if c.is_whitespace() {
            in_word = false;
        } else if c.is_alphanumeric() || c == '_' {
            if !in_word {
                count += 1;
                in_word = true;
            }
        } else {
            count += 1;
            in_word = false;
        }
    }
    count
}

fn external(cmd: &str, text: &str) -> Result<usize, DatasetError> {
    let fail = |m: String| DatasetError::Counter(format!("`{cmd}`: {m}"));
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(cmd)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::inherit())
        .spawn()
        .map_err(|e| fail(e.to_string()))?;
    child
        .stdin
        .take()
        .expect("piped stdin")
        .write_all(text.as_bytes())
        .map_err(|e| fail(e.to_string()))?;
    let out = child.wait_with_output().map_err(|e| fail(e.to_string()))?;
    if !out.status.success() {
        return Err(fail(format!("exited with {}", out.status)));
    }
    String::from_utf8_lossy(&out.stdout)
        .trim()
        .parse()
        .map_err(|_| fail("did not print a count".into()))
}

pub fn count_tokens(text: &str, counter: &TokenCounter) -> Result<usize, DatasetError> {
    if text.is_empty() {
        return Ok(0);
    }
    Ok(match counter {
        TokenCounter::ApproxWords => approx_words(text),
        TokenCounter::BytesDiv4 => text.len().div_ceil(4),
        TokenCounter::External(cmd) => external(cmd, text)?,
    })
}

use plauscheck_llm::{Backend, GenerationRequest};

use super::chunk::Chunk;
use super::records::InstructionRecord;
use super::DatasetError;
use crate::par::parallel_map;

pub const INSTRUCT_SYSTEM_PROMPT: &str = "You write instructions for a code dataset. Given a code block from the \
project, reply with one sentence describing the task the code solves, phrased as a request, for example \
\"Generate code for the project, that retrieves and prints all barcodes.\" If the code needs specific input \
data, add a second line starting with \"Input:\" that describes it.";

pub fn instruct_prompt(chunk: &Chunk) -> (String, String) {
    (
        INSTRUCT_SYSTEM_PROMPT.to_string(),
        format!("Code block from {}:\n\n{}", chunk.source, chunk.text),
    )
}

/// Splits a completion into the instruction and an optional `Input:` line.
pub fn parse_instruction(completion: &str) -> (String, Option<String>) {
    let mut instruction = Vec::new();
    let mut input = None;
    for line in completion.lines() {
        match line.trim_start().strip_prefix("Input:") {
            Some(rest) if input.is_none() => input = Some(rest.trim().to_string()),
            _ if input.is_none() => instruction.push(line),
            _ => {}
        }
    }
    let instruction = instruction.join("\n").trim().to_string();
    (instruction, input.filter(|s| !s.is_empty()))
}

/// One record per chunk, in chunk order; backend calls run on up to
/// `parallel` threads.
pub fn build_instruction_records(
    chunks: &[Chunk],
    backend: &dyn Backend,
    parallel: usize,
) -> Result<Vec<InstructionRecord>, DatasetError> {
    let results = parallel_map(chunks, parallel, |_, chunk| {
        let (system, user) = instruct_prompt(chunk);
        let request = GenerationRequest::new(system, user).with_correlation_id(chunk.id as u64);
        let response = backend.generate(&request).map_err(|source| DatasetError::Backend {
            chunk_id: chunk.id,
            source,
        })?;
        let completion = response.completions.into_iter().next().unwrap_or_default();
        let (instruction, input) = parse_instruction(&completion);
        if instruction.is_empty() {
            return Err(DatasetError::InvalidInput(format!(
                "backend returned an empty instruction for chunk {}",
                chunk.id
            )));
        }
        Ok(InstructionRecord {
            instruction,
            input,
            output: chunk.text.clone(),
        })
    });
    results.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instruction_parsing() {
        assert_eq!(parse_instruction("  Do it.\n"), ("Do it.".to_string(), None));
        assert_eq!(
            parse_instruction("Do it.\nInput: a document id\nnoise"),
            ("Do it.".to_string(), Some("a document id".to_string()))
        );
        assert_eq!(parse_instruction("Do it.\nInput:   "), ("Do it.".to_string(), None));
    }
}

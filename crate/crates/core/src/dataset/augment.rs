use plauscheck_llm::{Backend, GenerationRequest};

use super::DatasetError;
use crate::completion::extract_code;
use crate::lang::{validate_static, CheckSource};
use crate::store::Schema;

/// Backend attempts per requested check before the slot is given up.
pub const MAX_ATTEMPTS: usize = 5;

pub const AUGMENT_SYSTEM_PROMPT: &str = "You write plausibility checks in the check language. Reply with a \
single complete check and nothing else.";

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AugmentReport {
    pub checks: Vec<CheckSource>,
    /// Slots for which every attempt produced an invalid check.
    pub skipped: Vec<usize>,
    pub rejected: usize,
}

pub fn augment_prompt(seed: &CheckSource, slot: usize, attempt: usize) -> (String, String) {
    (
        AUGMENT_SYSTEM_PROMPT.to_string(),
        format!(
            "Write a new plausibility check that is similar to the following one but tests a different \
             document property. Variant {slot}, attempt {attempt}.\n\n{}",
            seed.text
        ),
    )
}

/// Produces up to `n` new checks modelled on `seeds`. Each slot is retried
/// until the output parses and validates, at most [`MAX_ATTEMPTS`] times.
pub fn augment_checks(
    seeds: &[CheckSource],
    n: usize,
    backend: &dyn Backend,
    schema: &Schema,
) -> Result<AugmentReport, DatasetError> {
    let mut report = AugmentReport::default();
    if n == 0 {
        return Ok(report);
    }
    if seeds.is_empty() {
        return Err(DatasetError::InvalidInput("augmentation needs at least one seed check".into()));
    }
    for slot in 0..n {
        let seed = &seeds[slot % seeds.len()];
        let mut accepted = None;
        for attempt in 0..MAX_ATTEMPTS {
            let (system, user) = augment_prompt(seed, slot, attempt);
            let request = GenerationRequest::new(system, user).with_correlation_id(slot as u64);
            let response = backend.generate(&request).map_err(|source| DatasetError::Backend {
                chunk_id: slot,
                source,
            })?;
            let text = extract_code(response.completions.first().map_or("", String::as_str));
            let candidate = CheckSource::new("", text);
            match candidate.parse().and_then(|ast| validate_static(&ast, schema).map(|_| ast)) {
                Ok(ast) => {
                    accepted = Some(CheckSource::new(ast.name, candidate.text));
                    break;
                }
                Err(e) => {
                    log::debug!("slot {slot} attempt {attempt} rejected: {e}");
                    report.rejected += 1;
                }
            }
        }
        match accepted {
            Some(check) => report.checks.push(check),
            None => {
                log::warn!("augmentation slot {slot} skipped after {MAX_ATTEMPTS} invalid outputs");
                report.skipped.push(slot);
            }
        }
    }
    Ok(report)
}

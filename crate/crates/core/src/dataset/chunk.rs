//! Token-bounded corpus chunking.
//!
//! A file is cut into units: a unit starts at a column-0 line that follows
//! a blank line, and trailing blank lines stay with the unit before them.
//! Units are packed greedily; a unit that cannot fit on its own is split at
//! line boundaries, and a single over-long line at character boundaries.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::tokens::{count_tokens, TokenCounter};
use super::DatasetError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub id: usize,
    pub source: String,
    pub start_line: usize,
    pub end_line: usize,
    pub token_count: usize,
    #[serde(skip)]
    pub text: String,
}

/// The manifest line for a chunk (text omitted).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkManifestEntry {
    pub id: usize,
    pub source: String,
    pub start_line: usize,
    pub end_line: usize,
    pub token_count: usize,
}

impl Chunk {
    pub fn manifest_entry(&self) -> ChunkManifestEntry {
        ChunkManifestEntry {
            id: self.id,
            source: self.source.clone(),
            start_line: self.start_line,
            end_line: self.end_line,
            token_count: self.token_count,
        }
    }
}

/// A run of source text with the 1-based line range it covers.
#[derive(Debug, Clone)]
struct Piece<'a> {
    text: &'a str,
    start_line: usize,
    end_line: usize,
}

fn is_blank(line: &str) -> bool {
    line.trim().is_empty()
}

/// Lines including their terminators, so concatenation is lossless.
fn lines(text: &str) -> Vec<&str> {
    text.split_inclusive('\n').collect()
}

fn units(text: &str) -> Vec<Piece<'_>> {
    let lines = lines(text);
    let mut out = Vec::new();
    let mut start = 0;
    let mut offset = 0;
    let mut unit_offset = 0;
    for (i, line) in lines.iter().enumerate() {
        let starts_unit = i > 0
            && is_blank(lines[i - 1])
            && line.chars().next().is_some_and(|c| !c.is_whitespace());
        if starts_unit {
            out.push(Piece {
                text: &text[unit_offset..offset],
                start_line: start + 1,
                end_line: i,
            });
            start = i;
            unit_offset = offset;
        }
        offset += line.len();
    }
    if !lines.is_empty() {
        out.push(Piece {
            text: &text[unit_offset..],
            start_line: start + 1,
            end_line: lines.len(),
        });
    }
    out
}

struct Packer<'a, 'c> {
    source: &'a str,
    max: usize,
    counter: &'c TokenCounter,
    text: &'a str,
    out: Vec<(usize, usize, usize, usize, usize)>,
    cur: Option<(usize, usize, usize, usize)>,
}

impl<'a> Packer<'a, '_> {
    fn count(&self, s: &str) -> Result<usize, DatasetError> {
        count_tokens(s, self.counter)
    }

    fn offset_of(&self, piece: &str) -> usize {
        piece.as_ptr() as usize - self.text.as_ptr() as usize
    }

    fn flush(&mut self) -> Result<(), DatasetError> {
        if let Some((from, to, start_line, end_line)) = self.cur.take() {
            let tokens = self.count(&self.text[from..to])?;
            self.out.push((from, to, start_line, end_line, tokens));
        }
        Ok(())
    }

    /// Appends `piece` to the open chunk when the result still fits.
    fn try_extend(&mut self, piece: &Piece<'a>) -> Result<bool, DatasetError> {
        let from = self.offset_of(piece.text);
        let to = from + piece.text.len();
        let candidate = match self.cur {
            Some((f, _, s, _)) => (f, to, s, piece.end_line),
            None => (from, to, piece.start_line, piece.end_line),
        };
        if self.count(&self.text[candidate.0..candidate.1])? <= self.max {
            self.cur = Some(candidate);
            return Ok(true);
        }
        Ok(false)
    }

    fn push(&mut self, piece: Piece<'a>, level: u8) -> Result<(), DatasetError> {
        if self.try_extend(&piece)? {
            return Ok(());
        }
        self.flush()?;
        if self.try_extend(&piece)? {
            return Ok(());
        }
        match level {
            0 => {
                for (line_no, line) in (piece.start_line..).zip(lines(piece.text)) {
                    self.push(
                        Piece {
                            text: line,
                            start_line: line_no,
                            end_line: line_no,
                        },
                        1,
                    )?;
                }
                Ok(())
            }
            _ => self.split_chars(piece),
        }
    }

    /// Longest-prefix splitting of a single line; token counts never shrink
    /// as a prefix grows, so a binary search finds each cut.
    fn split_chars(&mut self, piece: Piece<'a>) -> Result<(), DatasetError> {
        let mut rest = piece.text;
        while !rest.is_empty() {
            let bounds: Vec<usize> = rest
                .char_indices()
                .map(|(i, _)| i)
                .skip(1)
                .chain(std::iter::once(rest.len()))
                .collect();
            let (mut lo, mut hi) = (0usize, bounds.len());
            while lo < hi {
                let mid = (lo + hi).div_ceil(2);
                if self.count(&rest[..bounds[mid - 1]])? <= self.max {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            if lo == 0 {
                return Err(DatasetError::ChunkTooSmall {
                    file: self.source.to_string(),
                    line: piece.start_line,
                    max_tokens: self.max,
                });
            }
            let cut = bounds[lo - 1];
            let from = self.offset_of(rest);
            self.out.push((
                from,
                from + cut,
                piece.start_line,
                piece.end_line,
                self.count(&rest[..cut])?,
            ));
            rest = &rest[cut..];
        }
        Ok(())
    }
}

/// Chunks one in-memory file. Ids continue from `next_id`.
pub fn segment_text(
    source: &str,
    text: &str,
    max_tokens: usize,
    counter: &TokenCounter,
    next_id: &mut usize,
) -> Result<Vec<Chunk>, DatasetError> {
    if max_tokens == 0 {
        return Err(DatasetError::InvalidInput("max_tokens must be at least 1".into()));
    }
    let mut packer = Packer {
        source,
        max: max_tokens,
        counter,
        text,
        out: Vec::new(),
        cur: None,
    };
    for unit in units(text) {
        packer.push(unit, 0)?;
    }
    packer.flush()?;
    Ok(packer
        .out
        .into_iter()
        .map(|(from, to, start_line, end_line, token_count)| {
            let id = *next_id;
            *next_id += 1;
            Chunk {
                id,
                source: source.to_string(),
                start_line,
                end_line,
                token_count,
                text: text[from..to].to_string(),
            }
        })
        .collect())
}

/// Chunks every file in order, numbering chunks sequentially across files.
pub fn segment_corpus(
    files: &[PathBuf],
    max_tokens: usize,
    counter: &TokenCounter,
) -> Result<Vec<Chunk>, DatasetError> {
    let mut next_id = 0;
    let mut out = Vec::new();
    for path in files {
        let text = read(path)?;
        out.extend(segment_text(
            &path.display().to_string(),
            &text,
            max_tokens,
            counter,
            &mut next_id,
        )?);
    }
    Ok(out)
}

fn read(path: &Path) -> Result<String, DatasetError> {
    std::fs::read_to_string(path).map_err(|e| DatasetError::io(path, e))
}

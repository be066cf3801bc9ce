use std::cmp::Ordering;
use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{EvalMode, HarnessError, TaskResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
    JsonLines,
}

impl FromStr for ReportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "json-lines" | "jsonl" => Ok(ReportFormat::JsonLines),
            _ => Err(HarnessError::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub model: String,
    pub level: String,
    pub mode: EvalMode,
    #[serde(rename = "SR")]
    pub sr: u32,
    #[serde(rename = "OM")]
    pub om: u32,
    #[serde(rename = "CM")]
    pub cm: u32,
    /// Mean observed pass@k over the level's tasks.
    pub pass_at_k: f64,
    /// Observed pass@k per task, in task-id order.
    pub grid: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportTable {
    pub k: u32,
    pub rows: Vec<ReportRow>,
}

impl ReportTable {
    pub fn new(k: u32) -> Self {
        Self { k, rows: Vec::new() }
    }

    fn grid_width(&self) -> usize {
        self.rows.iter().map(|r| r.grid.len()).max().unwrap_or(0)
    }
}

/// Orders ids like `t2` before `t10` by comparing digit runs numerically.
fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn pieces(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    let (pa, pb) = (pieces(a), pieces(b));
    for (x, y) in pa.iter().zip(&pb) {
        let ord = match (x, y) {
            ((true, dx), (true, dy)) => {
                let (tx, ty) = (dx.trim_start_matches('0'), dy.trim_start_matches('0'));
                tx.len().cmp(&ty.len()).then(tx.cmp(ty))
            }
            ((_, sx), (_, sy)) => sx.cmp(sy),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    pa.len().cmp(&pb.len()).then(a.cmp(b))
}

fn mean_half_up(values: &[u32]) -> u32 {
    let sum: u64 = values.iter().map(|&v| u64::from(v)).sum();
    let n = values.len() as u64;
    ((2 * sum + n) / (2 * n)) as u32
}

/// Groups task results into rows keyed by model, level and mode. Levels keep
/// the order in which they first appear among the id-sorted tasks.
pub fn aggregate(results: &[TaskResult], k: u32) -> Result<ReportTable, HarnessError> {
    if results.is_empty() {
        return Err(HarnessError::EmptyInput);
    }
    let mut sorted: Vec<&TaskResult> = results.iter().collect();
    sorted.sort_by(|a, b| natural_cmp(&a.task_id, &b.task_id));
    let mut groups: Vec<(&str, &str)> = Vec::new();
    for r in &sorted {
        let key = (r.model.as_str(), r.level.as_str());
        if !groups.contains(&key) {
            groups.push(key);
        }
    }
    let mut table = ReportTable::new(k);
    for (model, level) in groups {
        let tasks: Vec<&TaskResult> = sorted
            .iter()
            .copied()
            .filter(|r| r.model == model && r.level == level)
            .collect();
        for mode in [EvalMode::Exact, EvalMode::Regex] {
            let rows: Vec<_> = tasks.iter().filter_map(|t| t.mode(mode)).collect();
            if rows.is_empty() {
                continue;
            }
            let pick = |f: fn(&super::ModeResult) -> u32| rows.iter().map(|m| f(m)).collect::<Vec<_>>();
            let grid: Vec<u8> = rows.iter().map(|m| m.pass_at_k).collect();
            let passed: u64 = grid.iter().map(|&g| u64::from(g)).sum();
            let mean = BigRational::new(passed.into(), (grid.len() as u64).into());
            table.rows.push(ReportRow {
                model: model.to_string(),
                level: level.to_string(),
                mode,
                sr: mean_half_up(&pick(|m| m.sr)),
                om: mean_half_up(&pick(|m| m.om)),
                cm: mean_half_up(&pick(|m| m.cm)),
                pass_at_k: if mean.is_zero() { 0.0 } else { mean.to_f64().unwrap_or(0.0) },
                grid,
            });
        }
    }
    Ok(table)
}

fn header(table: &ReportTable) -> Vec<String> {
    let mut cols: Vec<String> = ["model", "level", "mode", "SR", "OM", "CM"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.push(format!("pass@{}", table.k));
    cols.extend((1..=table.grid_width()).map(|i| format!("T{i}")));
    cols
}

fn cells(row: &ReportRow, width: usize) -> Vec<String> {
    let mut out = vec![
        row.model.clone(),
        row.level.clone(),
        row.mode.to_string(),
        row.sr.to_string(),
        row.om.to_string(),
        row.cm.to_string(),
        row.pass_at_k.to_string(),
    ];
    out.extend((0..width).map(|i| row.grid.get(i).map_or(String::new(), u8::to_string)));
    out
}

pub fn render_report(table: &ReportTable, format: ReportFormat) -> String {
    let width = table.grid_width();
    match format {
        ReportFormat::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            writer.write_record(header(table)).expect("in-memory write");
            for row in &table.rows {
                writer.write_record(cells(row, width)).expect("in-memory write");
            }
            String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 cells")
        }
        ReportFormat::Markdown => {
            let head = header(table);
            let mut out = format!("| {} |\n", head.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(head.len()));
            let mut last: Option<(&str, &str)> = None;
            for row in &table.rows {
                let mut c = cells(row, width);
                let key = (row.model.as_str(), row.level.as_str());
                if last.is_some_and(|(m, _)| m == key.0) {
                    c[0].clear();
                    if last.is_some_and(|l| l == key) {
                        c[1].clear();
                    }
                }
                last = Some(key);
                let _ = writeln!(out, "| {} |", c.join(" | "));
            }
            out
        }
        ReportFormat::JsonLines => {
            let mut out = String::new();
            for row in &table.rows {
                let mut value = serde_json::to_value(row).expect("rows serialize");
                value["k"] = table.k.into();
                let _ = writeln!(out, "{value}");
            }
            out
        }
    }
}

/// Reads back a table written by [`render_report`] in CSV form.
pub fn parse_csv_report(text: &str) -> Result<ReportTable, HarnessError> {
    let bad = |m: String| HarnessError::MalformedReport(m);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let k = headers
        .get(6)
        .and_then(|h| h.strip_prefix("pass@"))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad("missing pass@k column".into()))?;
    let mut table = ReportTable::new(k);
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| record.get(i).ok_or_else(|| bad(format!("missing column {i}")));
        let int = |i: usize| -> Result<u32, HarnessError> {
            field(i)?.parse().map_err(|_| bad(format!("column {i} is not an integer")))
        };
        let mut grid = Vec::new();
        for cell in record.iter().skip(7).take_while(|c| !c.is_empty()) {
            grid.push(cell.parse().map_err(|_| bad(format!("grid cell {cell:?}")))?);
        }
        table.rows.push(ReportRow {
            model: field(0)?.to_string(),
            level: field(1)?.to_string(),
            mode: field(2)?.parse().map_err(bad)?,
            sr: int(3)?,
            om: int(4)?,
            cm: int(5)?,
            pass_at_k: field(6)?.parse().map_err(|_| bad("pass@k is not a number".into()))?,
            grid,
        });
    }
    Ok(table)
}

/// Reads back a table written by [`render_report`] in JSON-lines form.
/// `k` applies when the input has no rows to take it from.
pub fn parse_jsonl_report(text: &str, k: u32) -> Result<ReportTable, HarnessError> {
    #[derive(Deserialize)]
    struct Line {
        #[serde(flatten)]
        row: ReportRow,
        k: u32,
    }
    let mut table = ReportTable::new(k);
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let parsed: Line = serde_json::from_str(line).map_err(|e| HarnessError::MalformedReport(e.to_string()))?;
        table.k = parsed.k;
        table.rows.push(parsed.row);
    }
    Ok(table)
}

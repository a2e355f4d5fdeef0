//! Evaluation-file ingestion: comma-separated UTF-8 text with a mandatory
//! header naming exactly the columns {y, f1, f2} in any order.

use std::fs;
use std::path::Path;

/// Parsed evaluation input.
#[derive(Debug)]
pub struct EvaluationInput {
    pub y: Vec<f64>,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
}

pub const MIN_ROWS: usize = 10;

pub fn read_evaluation_file(path: &Path) -> Result<EvaluationInput, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_evaluation_csv(&text)
}

pub fn parse_evaluation_csv(text: &str) -> Result<EvaluationInput, String> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or("empty file")?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    if names.len() != 3 {
        return Err(format!(
            "header must name exactly the columns y, f1, f2; got {} columns",
            names.len()
        ));
    }
    let mut col = [usize::MAX; 3]; // positions of y, f1, f2
    for (pos, name) in names.iter().enumerate() {
        let slot = match *name {
            "y" => 0,
            "f1" => 1,
            "f2" => 2,
            other => return Err(format!("unexpected column {other:?}; expected y, f1, f2")),
        };
        if col[slot] != usize::MAX {
            return Err(format!("duplicate column {name:?}"));
        }
        col[slot] = pos;
    }

    let mut y = Vec::new();
    let mut f1 = Vec::new();
    let mut f2 = Vec::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(format!(
                "line {}: expected 3 fields, got {}",
                line_no + 1,
                fields.len()
            ));
        }
        let mut parsed = [0.0f64; 3];
        for slot in 0..3 {
            let raw = fields[col[slot]];
            let name = ["y", "f1", "f2"][slot];
            let v: f64 = raw.parse().map_err(|_| {
                format!("line {}, column {name}: {raw:?} is not a number", line_no + 1)
            })?;
            if !v.is_finite() {
                return Err(format!(
                    "line {}, column {name}: value {v} is not finite",
                    line_no + 1
                ));
            }
            parsed[slot] = v;
        }
        y.push(parsed[0]);
        f1.push(parsed[1]);
        f2.push(parsed[2]);
    }
    if y.len() < MIN_ROWS {
        return Err(format!(
            "need at least {MIN_ROWS} data rows to run any test, got {}",
            y.len()
        ));
    }
    Ok(EvaluationInput { y, f1, f2 })
}

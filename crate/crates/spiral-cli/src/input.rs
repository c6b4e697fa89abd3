//! Problem ingestion: CSV rows `t,x,y` or a JSON object.

use serde::Deserialize;
use spiral_spline::{Error, InterpolationProblem, Vec2};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    Json,
}

impl InputFormat {
    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "csv" => Some(InputFormat::Csv),
            "json" => Some(InputFormat::Json),
            _ => None,
        }
    }

    /// Guess from a file extension; CSV when unknown.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => InputFormat::Json,
            _ => InputFormat::Csv,
        }
    }
}

#[derive(Deserialize)]
struct JsonProblem {
    times: Vec<f64>,
    points: Vec<[f64; 2]>,
}

/// Parse problem text. CSV rows are `t,x,y` with an optional header line,
/// UTF-8, LF or CRLF endings; JSON is `{"times": [...], "points": [[x,y], ...]}`.
pub fn parse_problem(text: &str, format: InputFormat) -> CliResult<InterpolationProblem> {
    let (times, points) = match format {
        InputFormat::Csv => parse_csv(text)?,
        InputFormat::Json => {
            let parsed: JsonProblem = serde_json::from_str(text)
                .map_err(|e| CliError::Parse(format!("invalid JSON: {e}")))?;
            (
                parsed.times,
                parsed
                    .points
                    .iter()
                    .map(|&[x, y]| Vec2::new(x, y))
                    .collect(),
            )
        }
    };
    InterpolationProblem::new(times, points).map_err(|e| match e {
        Error::NonMonotoneTimes { index } => CliError::Parse(format!(
            "times must be strictly increasing (row {})",
            index + 1
        )),
        Error::CountMismatch { times, points } => CliError::Parse(format!(
            "need matching times and points, at least 3 each (got {times} times, {points} points)"
        )),
        other => CliError::Parse(other.to_string()),
    })
}

fn parse_csv(text: &str) -> CliResult<(Vec<f64>, Vec<Vec2>)> {
    let mut times = Vec::new();
    let mut points = Vec::new();
    let mut saw_data = false;
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(CliError::Parse(format!(
                "line {}: expected 3 fields `t,x,y`, got {}",
                line_no + 1,
                fields.len()
            )));
        }
        let parsed: Vec<Option<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
        if parsed.iter().any(Option::is_none) {
            // a non-numeric first row is a header; anywhere else it is an error
            if !saw_data && times.is_empty() {
                continue;
            }
            let field = parsed.iter().position(Option::is_none).unwrap();
            return Err(CliError::Parse(format!(
                "line {}: field {} (`{}`) is not a number",
                line_no + 1,
                field + 1,
                fields[field]
            )));
        }
        saw_data = true;
        times.push(parsed[0].unwrap());
        points.push(Vec2::new(parsed[1].unwrap(), parsed[2].unwrap()));
    }
    Ok((times, points))
}

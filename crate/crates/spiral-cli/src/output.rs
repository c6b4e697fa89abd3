//! File emitters and the stdout table.
//!
//! JSON numbers are written with 17 significant digits (bit round-trip for
//! doubles); the human-facing table and summary use 4 significant digits.
//! Identical requests produce byte-identical files: nothing time- or
//! thread-dependent is written.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use spiral_spline::{
    eval_curve, eval_tilde_curve, AngleSpline, InterpolationProblem, QuadratureConfig, Vec2,
};

use crate::report::{BranchRow, RunReport};
use crate::request::{Mode, RunRequest};
use crate::CliResult;

/// 17 significant digits, round-trip exact.
pub fn full(x: f64) -> String {
    format!("{x:.16e}")
}

/// 4 significant digits for tables.
pub fn sig4(x: f64) -> String {
    if x == 0.0 {
        return "0.000".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-2..=3).contains(&magnitude) {
        return format!("{x:.3e}");
    }
    let decimals = (3 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn file_stem(row: &BranchRow, total: usize) -> String {
    let width = total.max(2).ilog10() as usize + 1;
    format!("branch_{:0width$}_{}", row.index, row.sigma.compact())
}

fn stage_json(spline: &AngleSpline, energy: f64, indent: &str) -> String {
    let mut out = String::from("{\n");
    let _ = write!(out, "{indent}  \"coefficients\": [");
    for (i, seg) in spline.segments().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(
            out,
            "[{}, {}, {}, {}]",
            full(seg.a),
            full(seg.b),
            full(seg.c),
            full(seg.d)
        );
    }
    out.push_str("],\n");
    if let Some(ext) = spline.extension() {
        let _ = writeln!(out, "{indent}  \"family\": \"{}\",", ext.family.tag());
        let _ = write!(out, "{indent}  \"params\": [");
        for (i, block) in ext.params.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push('[');
            for (j, p) in block.iter().enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                out.push_str(&full(*p));
            }
            out.push(']');
        }
        out.push_str("],\n");
    }
    let _ = write!(out, "{indent}  \"energy\": {}\n{indent}}}", full(energy));
    out
}

/// Per-branch JSON: knots, per-stage coefficients and energies, residual.
pub fn branch_json(row: &BranchRow, mode: Mode) -> String {
    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"branch_index\": {},", row.index);
    let _ = writeln!(
        out,
        "  \"sigma\": [{}],",
        row.sigma
            .entries()
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    let _ = writeln!(out, "  \"mode\": \"{}\",", mode.name());
    let result = row.result.as_ref().expect("only emitted with a result");
    let _ = writeln!(
        out,
        "  \"knots\": [{}],",
        result
            .estimate
            .knots()
            .iter()
            .map(|&k| full(k))
            .collect::<Vec<_>>()
            .join(", ")
    );
    let _ = writeln!(
        out,
        "  \"estimate\": {},",
        stage_json(&result.estimate, result.estimate_energy, "  ")
    );
    match (&result.refined, result.refined_energy) {
        (Some(spline), Some(energy)) => {
            let _ = writeln!(out, "  \"refined\": {},", stage_json(spline, energy, "  "));
        }
        _ => out.push_str("  \"refined\": null,\n"),
    }
    match (&result.optimized, result.optimized_energy) {
        (Some(spline), Some(energy)) => {
            let _ = writeln!(
                out,
                "  \"optimized\": {},",
                stage_json(spline, energy, "  ")
            );
        }
        _ => out.push_str("  \"optimized\": null,\n"),
    }
    let _ = writeln!(out, "  \"residual\": {},", full(result.residual));
    let _ = writeln!(out, "  \"iterations\": {},", result.iterations);
    let _ = writeln!(out, "  \"converged\": {},", result.converged);
    match &row.error {
        Some(e) => {
            let _ = writeln!(out, "  \"error\": {}", serde_json::to_string(e).unwrap());
        }
        None => out.push_str("  \"error\": null\n"),
    }
    out.push_str("}\n");
    out
}

/// Sampled curve and its re-anchored variant, `sample_count` points per
/// segment (knots repeated between segments, which makes the re-anchored
/// jumps visible in the data).
pub fn branch_csv(
    row: &BranchRow,
    problem: &InterpolationProblem,
    sample_count: usize,
    quad: &QuadratureConfig,
) -> String {
    let result = row.result.as_ref().expect("only emitted with a result");
    let spline = result.selected_spline();
    let start = problem.waypoints()[0];
    let mut out = String::from("t,x,y,x_tilde,y_tilde\n");
    let lengths = spline.lengths();
    let knots = spline.knots();
    for j in 0..spline.n() {
        for i in 0..sample_count {
            let s = lengths[j] * i as f64 / (sample_count - 1) as f64;
            // stay inside the owning segment at interior knots
            let t = if i + 1 == sample_count && j + 1 < spline.n() {
                (knots[j] + s) - lengths[j] * 1e-12
            } else {
                knots[j] + s
            };
            let y = eval_curve(spline, start, t, quad).unwrap();
            let ty = eval_tilde_curve(spline, problem, t, quad).unwrap();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                full(knots[j] + s),
                full(y.x),
                full(y.y),
                full(ty.x),
                full(ty.y)
            );
        }
    }
    out
}

/// Minimal SVG: one polyline per segment of the re-anchored curve plus
/// waypoint markers.
pub fn branch_svg(
    row: &BranchRow,
    problem: &InterpolationProblem,
    sample_count: usize,
    quad: &QuadratureConfig,
) -> String {
    let result = row.result.as_ref().expect("only emitted with a result");
    let spline = result.selected_spline();
    let lengths = spline.lengths();
    let knots = spline.knots();

    let mut segments: Vec<Vec<Vec2>> = Vec::new();
    for j in 0..spline.n() {
        let mut pts = Vec::with_capacity(sample_count);
        for i in 0..sample_count {
            let s = lengths[j] * i as f64 / (sample_count - 1) as f64;
            let t = if i + 1 == sample_count && j + 1 < spline.n() {
                (knots[j] + s) - lengths[j] * 1e-12
            } else {
                knots[j] + s
            };
            pts.push(eval_tilde_curve(spline, problem, t, quad).unwrap());
        }
        segments.push(pts);
    }

    let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in segments.iter().flatten().chain(problem.waypoints()) {
        min.x = min.x.min(p.x);
        min.y = min.y.min(p.y);
        max.x = max.x.max(p.x);
        max.y = max.y.max(p.y);
    }
    let span_x = (max.x - min.x).max(1e-9);
    let span_y = (max.y - min.y).max(1e-9);
    let (width, height) = (800.0, 600.0);
    let scale = ((width * 0.9) / span_x).min((height * 0.9) / span_y);
    let to_px = |p: Vec2| {
        let x = (p.x - min.x - span_x / 2.0) * scale + width / 2.0;
        let y = height / 2.0 - (p.y - min.y - span_y / 2.0) * scale;
        (x, y)
    };

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    );
    for pts in &segments {
        out.push_str("  <polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"");
        for (i, p) in pts.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let (x, y) = to_px(*p);
            let _ = write!(out, "{x:.2},{y:.2}");
        }
        out.push_str("\"/>\n");
    }
    for w in problem.waypoints() {
        let (x, y) = to_px(*w);
        let _ = writeln!(
            out,
            "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"crimson\"/>"
        );
    }
    out.push_str("</svg>\n");
    out
}

fn csv_quote(text: &str) -> String {
    if text.contains(',') || text.contains('"') {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// Summary table, one row per branch, successes and failures alike.
pub fn summary_csv(report: &RunReport) -> String {
    let mut out = String::from(
        "branch_index,sigma,estimate_energy,refined_energy,optimized_energy,residual,iterations,converged,error\n",
    );
    for row in &report.rows {
        let (est, refined, optimized, residual, iterations, converged) = match &row.result {
            Some(r) => (
                sig4(r.estimate_energy),
                r.refined_energy.map(sig4).unwrap_or_default(),
                r.optimized_energy.map(sig4).unwrap_or_default(),
                format!("{:.3e}", r.residual),
                r.iterations.to_string(),
                r.converged.to_string(),
            ),
            None => Default::default(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.index,
            row.sigma.compact(),
            est,
            refined,
            optimized,
            residual,
            iterations,
            converged,
            csv_quote(row.error.as_deref().unwrap_or(""))
        );
    }
    out
}

/// Ranking table for stdout.
pub fn human_table(report: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>6}  {:<12} {:>10} {:>10} {:>10} {:>10}  status",
        "branch", "sigma", "estimate", "refined", "optimized", "residual"
    );
    for row in &report.rows {
        let (est, refined, optimized, residual) = match &row.result {
            Some(r) => (
                sig4(r.estimate_energy),
                r.refined_energy.map(sig4).unwrap_or_else(|| "-".into()),
                r.optimized_energy.map(sig4).unwrap_or_else(|| "-".into()),
                format!("{:.1e}", r.residual),
            ),
            None => ("-".into(), "-".into(), "-".into(), "-".into()),
        };
        let status = match &row.error {
            Some(e) => e.as_str(),
            None => "ok",
        };
        let _ = writeln!(
            out,
            "{:>6}  {:<12} {:>10} {:>10} {:>10} {:>10}  {}",
            row.index,
            row.sigma.compact(),
            est,
            refined,
            optimized,
            residual,
            status
        );
    }
    out
}

/// Write everything the request asks for; returns the created paths.
pub fn emit_outputs(report: &RunReport, request: &RunRequest) -> CliResult<Vec<PathBuf>> {
    let Some(dir) = &request.out_dir else {
        return Ok(Vec::new());
    };
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    written.push(write_file(dir, "summary.csv", &summary_csv(report))?);
    let total = report.rows.len();
    for row in &report.rows {
        if row.result.is_none() {
            continue; // nothing to emit; the summary row records the failure
        }
        let stem = file_stem(row, total);
        written.push(write_file(
            dir,
            &format!("{stem}.json"),
            &branch_json(row, request.mode),
        )?);
        written.push(write_file(
            dir,
            &format!("{stem}.csv"),
            &branch_csv(row, &request.problem, request.sample_count, &request.quad),
        )?);
        if request.svg {
            written.push(write_file(
                dir,
                &format!("{stem}.svg"),
                &branch_svg(row, &request.problem, request.sample_count, &request.quad),
            )?);
        }
    }
    Ok(written)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

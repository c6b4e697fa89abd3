//! Pipeline orchestration and the run report.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use spiral_spline::{
    estimate_branch, optimize_branch, refine_branch, validate, BranchResult, ChordData,
    ConstantFamily, QuarticFamily, SignVector, ValidationConfig,
};
use std::sync::Arc;

use crate::request::{BranchSelector, Mode, RunRequest};
use crate::{CliError, CliResult};

/// One branch in the report. `result` holds whatever stages completed;
/// `error` records the first stage that failed, so a branch with a good
/// estimate but no exact interpolant keeps its estimate data.
#[derive(Debug)]
pub struct BranchRow {
    pub index: usize,
    pub sigma: SignVector,
    pub result: Option<BranchResult>,
    pub error: Option<String>,
}

impl BranchRow {
    /// Did every stage the mode asks for complete?
    pub fn succeeded(&self, mode: Mode) -> bool {
        match (&self.result, mode) {
            (Some(_), Mode::Estimate) => self.error.is_none(),
            (Some(r), Mode::Refine) => r.refined.is_some(),
            (Some(r), Mode::Optimize) => r.optimized.is_some(),
            (None, _) => false,
        }
    }

    /// Energy of the furthest-processed spline, when any stage succeeded.
    pub fn energy(&self) -> Option<f64> {
        self.result.as_ref().map(|r| r.selected_energy())
    }
}

#[derive(Debug)]
pub struct RunReport {
    pub mode: Mode,
    /// Successes sorted by ascending energy, then failures by index.
    pub rows: Vec<BranchRow>,
    pub success_count: usize,
    pub timings: Vec<(&'static str, Duration)>,
}

fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(text) = std::env::var("SPIRAL_SPLINE_THREADS") {
        let threads: usize = text.parse().map_err(|_| {
            CliError::Request(format!(
                "SPIRAL_SPLINE_THREADS=`{text}` is not a thread count"
            ))
        })?;
        if threads >= 1 {
            builder = builder.num_threads(threads);
        }
    }
    builder
        .build()
        .map_err(|e| CliError::Request(format!("could not build worker pool: {e}")))
}

fn selected_sigmas(request: &RunRequest, chord: &ChordData) -> Vec<SignVector> {
    let n = request.problem.n();
    match &request.selector {
        BranchSelector::All => SignVector::enumerate(n).collect(),
        BranchSelector::Explicit(list) => list.clone(),
        BranchSelector::TopK(k) => {
            // rank every branch by its estimate energy, keep the k lowest
            let quad = request.quad;
            let mut ranked: Vec<(f64, SignVector)> = SignVector::enumerate(n)
                .filter_map(|sigma| {
                    estimate_branch(&request.problem, chord, sigma.clone(), &quad)
                        .ok()
                        .map(|b| (b.estimate_energy, sigma))
                })
                .collect();
            ranked.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            ranked.into_iter().take(*k).map(|(_, s)| s).collect()
        }
    }
}

/// Execute the pipeline the request describes.
pub fn run(request: &RunRequest) -> CliResult<RunReport> {
    request.validate()?;
    let mut timings = Vec::new();

    let t = Instant::now();
    let chord =
        validate(&request.problem, &ValidationConfig::default()).map_err(CliError::Validation)?;
    timings.push(("validate", t.elapsed()));

    let pool = thread_pool()?;
    let sigmas = selected_sigmas(request, &chord);

    let t = Instant::now();
    let mut rows: Vec<BranchRow> = pool.install(|| {
        sigmas
            .par_iter()
            .map(|sigma| {
                let index = sigma.branch_index();
                match estimate_branch(&request.problem, &chord, sigma.clone(), &request.quad) {
                    Ok(result) => BranchRow {
                        index,
                        sigma: sigma.clone(),
                        result: Some(result),
                        error: None,
                    },
                    Err(e) => BranchRow {
                        index,
                        sigma: sigma.clone(),
                        result: None,
                        error: Some(format!("estimate: {e}")),
                    },
                }
            })
            .collect()
    });
    timings.push(("estimate", t.elapsed()));

    if matches!(request.mode, Mode::Refine | Mode::Optimize) {
        let t = Instant::now();
        pool.install(|| {
            rows.par_iter_mut().for_each(|row| {
                if let (Some(result), None) = (row.result.as_mut(), row.error.as_ref()) {
                    if let Err(e) =
                        refine_branch(result, &request.problem, &request.quad, &request.solver)
                    {
                        row.error = Some(format!("refine: {e}"));
                    }
                }
            });
        });
        timings.push(("refine", t.elapsed()));
    }

    if matches!(request.mode, Mode::Optimize) {
        let family: Arc<dyn QuarticFamily> = Arc::new(ConstantFamily);
        let t = Instant::now();
        pool.install(|| {
            rows.par_iter_mut().for_each(|row| {
                if let (Some(result), None) = (row.result.as_mut(), row.error.as_ref()) {
                    if let Err(e) = optimize_branch(
                        result,
                        &request.problem,
                        &family,
                        &request.quad,
                        &request.solver,
                    ) {
                        row.error = Some(format!("optimize: {e}"));
                    }
                }
            });
        });
        timings.push(("optimize", t.elapsed()));
    }

    let mode = request.mode;
    rows.sort_by(|a, b| match (a.succeeded(mode), b.succeeded(mode)) {
        (true, false) => std::cmp::Ordering::Less,
        (false, true) => std::cmp::Ordering::Greater,
        (false, false) => a.index.cmp(&b.index),
        (true, true) => a
            .energy()
            .partial_cmp(&b.energy())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.index.cmp(&b.index)),
    });
    let success_count = rows.iter().filter(|r| r.succeeded(mode)).count();
    Ok(RunReport {
        mode,
        rows,
        success_count,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use spiral_spline::{InterpolationProblem, QuadratureConfig, SolverConfig, Vec2};

    fn request(mode: Mode, selector: BranchSelector) -> RunRequest {
        let problem = InterpolationProblem::new(
            vec![0.0, 0.5, 1.1],
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(0.48, 0.12),
                Vec2::new(1.0, 0.0),
            ],
        )
        .unwrap();
        RunRequest {
            problem,
            mode,
            selector,
            quad: QuadratureConfig::default(),
            solver: SolverConfig::default(),
            sample_count: 8,
            out_dir: None,
            svg: false,
        }
    }

    #[test]
    fn estimate_run_ranks_all_branches() {
        let report = run(&request(Mode::Estimate, BranchSelector::All)).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert_eq!(report.success_count, 4);
        let energies: Vec<f64> = report.rows.iter().map(|r| r.energy().unwrap()).collect();
        assert!(energies.windows(2).all(|w| w[0] <= w[1]), "{energies:?}");
        // lowest-energy branch first
        assert_eq!(report.rows[0].sigma.entries(), &[1, -1]);
    }

    #[test]
    fn refine_keeps_unrefinable_branches_as_failures() {
        let report = run(&request(Mode::Refine, BranchSelector::All)).unwrap();
        assert_eq!(report.rows.len(), 4);
        // two branches have exact interpolants at this spacing, two do not
        assert_eq!(report.success_count, 2);
        let failed: Vec<_> = report
            .rows
            .iter()
            .filter(|r| !r.succeeded(Mode::Refine))
            .collect();
        assert_eq!(failed.len(), 2);
        for row in failed {
            assert!(row.error.as_deref().unwrap().starts_with("refine:"));
            // the estimate data is retained
            assert!(row.result.is_some());
        }
    }

    #[test]
    fn top_k_selector_keeps_lowest_energy_branches() {
        let report = run(&request(Mode::Estimate, BranchSelector::TopK(2))).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.rows[0].sigma.entries(), &[1, -1]);
        assert_eq!(report.rows[1].sigma.entries(), &[-1, -1]);
    }

    #[test]
    fn validation_failure_is_global() {
        let mut req = request(Mode::Estimate, BranchSelector::All);
        req.problem = InterpolationProblem::new(
            vec![0.0, 1.0, 2.0],
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(2.0, 0.0),
            ],
        )
        .unwrap();
        let err = run(&req).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}

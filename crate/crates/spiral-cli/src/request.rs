//! Run configuration assembled from the command line.

use std::path::PathBuf;

use spiral_spline::{InterpolationProblem, QuadratureConfig, SignVector, SolverConfig};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Estimate,
    Refine,
    Optimize,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Estimate => "estimate",
            Mode::Refine => "refine",
            Mode::Optimize => "optimize",
        }
    }
}

#[derive(Debug, Clone)]
pub enum BranchSelector {
    /// Every one of the 2^n branches.
    All,
    /// An explicit list of sign vectors.
    Explicit(Vec<SignVector>),
    /// The k branches with the lowest estimate energy.
    TopK(usize),
}

/// Guard against accidental 2^n explosions with `--all`.
pub const MAX_SEGMENTS_FOR_ALL: usize = 16;

#[derive(Debug, Clone)]
pub struct RunRequest {
    pub problem: InterpolationProblem,
    pub mode: Mode,
    pub selector: BranchSelector,
    pub quad: QuadratureConfig,
    pub solver: SolverConfig,
    /// Curve samples per segment in the CSV output.
    pub sample_count: usize,
    pub out_dir: Option<PathBuf>,
    pub svg: bool,
}

impl RunRequest {
    pub fn validate(&self) -> CliResult<()> {
        if self.sample_count < 2 {
            return Err(CliError::Request(format!(
                "--samples must be at least 2 (got {})",
                self.sample_count
            )));
        }
        if self.quad.simpson_subintervals < 4
            || !self.quad.simpson_subintervals.is_multiple_of(2)
            || self.quad.max_subintervals < self.quad.simpson_subintervals
        {
            return Err(CliError::Request(format!(
                "--simpson must be an even count >= 4 within the cap (got {})",
                self.quad.simpson_subintervals
            )));
        }
        if self.solver.residual_tol <= 0.0 {
            return Err(CliError::Request("--tol must be positive".into()));
        }
        let n = self.problem.n();
        match &self.selector {
            BranchSelector::All if n > MAX_SEGMENTS_FOR_ALL => Err(CliError::Request(format!(
                "--all with {n} segments means 2^{n} branches; pick --sigma or --top-k instead"
            ))),
            BranchSelector::Explicit(list) => {
                if list.is_empty() {
                    return Err(CliError::Request("no sign vectors given".into()));
                }
                for sigma in list {
                    if sigma.len() != n {
                        return Err(CliError::Request(format!(
                            "sign vector {sigma} has {} entries but the problem has {n} segments",
                            sigma.len()
                        )));
                    }
                }
                Ok(())
            }
            BranchSelector::TopK(0) => Err(CliError::Request("--top-k must be positive".into())),
            _ => Ok(()),
        }
    }
}

/// Parse one sign vector written either as `+-+` or as `1,-1,1`.
pub fn parse_sigma(text: &str) -> CliResult<SignVector> {
    let entries: Vec<i8> = if text.contains(',') {
        text.split(',')
            .map(|tok| match tok.trim() {
                "1" | "+1" => Ok(1),
                "-1" => Ok(-1),
                other => Err(CliError::Request(format!(
                    "bad sign `{other}` in --sigma (want 1 or -1)"
                ))),
            })
            .collect::<CliResult<_>>()?
    } else {
        text.chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(CliError::Request(format!(
                    "bad character `{other}` in --sigma (want + or -)"
                ))),
            })
            .collect::<CliResult<_>>()?
    };
    SignVector::new(entries).ok_or_else(|| CliError::Request("empty --sigma".into()))
}

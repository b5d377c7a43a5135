//! Projected-gradient optimization driver.
//!
//! Each outer step updates the state for the current control, the adjoint for
//! the new state, and projects the adjoint onto the admissible controls. The
//! loop starts from a small direct solve that is zero-padded to the target
//! truncation. On convergence the state and adjoint are solved to full inner
//! tolerance for the accepted control.

mod control;
mod fixed_point;

pub use control::{project_control, relative_change, ControlFunction};
pub use fixed_point::{fixed_point_solve, FixedPointOutcome};

use std::time::Instant;

use nalgebra::{DMatrix, DVector, LU};
use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};
use crate::frac::ExponentPair;
use crate::operators::{Mode, OperatorSet, RhsAssembler, Side};
use crate::problem::ProblemSpec;

/// Tolerance of the direct bootstrap run.
const BOOTSTRAP_TOL: f64 = 1e-10;

/// How the fast mode updates state and adjoint inside one outer step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterScheme {
    /// One preconditioned fixed-point sweep per system, sharing the outer index.
    #[default]
    Coupled,
    /// Each system solved to `inner_tol` before the control update.
    Nested,
}

impl std::str::FromStr for OuterScheme {
    type Err = FracError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coupled" => Ok(OuterScheme::Coupled),
            "nested" => Ok(OuterScheme::Nested),
            other => Err(FracError::InvalidArgument(format!("unknown outer scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub n: usize,
    pub mode: Mode,
    /// Relative residual target of each inner solve.
    pub inner_tol: f64,
    pub inner_max: usize,
    /// Relative change of the control that ends the outer loop.
    pub outer_tol: f64,
    pub outer_max: usize,
    pub bootstrap_n: usize,
    #[serde(default)]
    pub scheme: OuterScheme,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n: 64,
            mode: Mode::Fast,
            inner_tol: 1e-14,
            inner_max: 400,
            outer_tol: 1e-12,
            outer_max: 5000,
            bootstrap_n: 8,
            scheme: OuterScheme::Coupled,
        }
    }
}

impl SolverConfig {
    pub fn with_n(n: usize, mode: Mode) -> Self {
        Self {
            n,
            mode,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.inner_tol, self.outer_tol].iter().all(|t| *t > 0.0);
        if !positive || self.inner_max == 0 || self.outer_max == 0 {
            return Err(FracError::InvalidArgument(
                "tolerances and iteration limits must be positive".into(),
            ));
        }
        if self.bootstrap_n == 0 || self.bootstrap_n > self.n {
            return Err(FracError::InvalidArgument(format!(
                "bootstrap size {} must lie in 1..={}",
                self.bootstrap_n, self.n
            )));
        }
        Ok(())
    }
}

/// Per-run counters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub outer_iterations: usize,
    /// `(state, adjoint)` fixed-point sweeps per outer step; zero in direct mode.
    pub inner_iterations: Vec<(usize, usize)>,
    /// Relative control change per outer step.
    pub outer_history: Vec<f64>,
    /// Largest final inner residual of any solve.
    pub worst_inner_residual: f64,
    /// Inner solves that stopped at their rounding floor before `inner_tol`.
    pub unconverged_inner: usize,
    pub bootstrap_iterations: usize,
    pub seconds: f64,
    /// Set when advection is switched off.
    pub diagnostic: bool,
}

/// Discrete optimal state, adjoint and control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalTriple {
    pub pair: ExponentPair,
    /// State coefficients in `ω^{σ,σ*} Q_n^{σ,σ*}`.
    pub state: Vec<f64>,
    /// Adjoint coefficients in `ω^{σ*,σ} Q_n^{σ*,σ}`.
    pub adjoint: Vec<f64>,
    pub control: ControlFunction,
    pub stats: SolveStats,
}

/// Dense LU factorizations of `A` and `B`.
pub struct DirectSolver {
    lu: [LU<f64, nalgebra::Dyn, nalgebra::Dyn>; 2],
}

impl DirectSolver {
    pub fn new(ops: &OperatorSet) -> Result<Self> {
        let factor = |side| -> Result<LU<f64, nalgebra::Dyn, nalgebra::Dyn>> {
            let m: DMatrix<f64> = ops
                .system_matrix(side)
                .ok_or_else(|| FracError::InvalidArgument("direct solves need dense operators".into()))?;
            Ok(m.lu())
        };
        Ok(Self {
            lu: [factor(Side::State)?, factor(Side::Adjoint)?],
        })
    }

    pub fn solve(&self, side: Side, rhs: &[f64]) -> Result<Vec<f64>> {
        let lu = match side {
            Side::State => &self.lu[0],
            Side::Adjoint => &self.lu[1],
        };
        lu.solve(&DVector::from_column_slice(rhs))
            .map(|v| v.as_slice().to_vec())
            .ok_or_else(|| FracError::Singular(format!("{side:?} system matrix is singular")))
    }
}

/// `(S − λ1 D + λ2 M) U = F` by dense factorization.
pub fn direct_solve_state(ops: &OperatorSet, rhs: &[f64]) -> Result<Vec<f64>> {
    DirectSolver::new(ops)?.solve(Side::State, rhs)
}

/// `(S + λ1 D̂ + λ2 Mᵀ) Z = G` by dense factorization.
pub fn direct_solve_adjoint(ops: &OperatorSet, rhs: &[f64]) -> Result<Vec<f64>> {
    DirectSolver::new(ops)?.solve(Side::Adjoint, rhs)
}

enum Engine<'a> {
    Direct(DirectSolver),
    Fast {
        ops: &'a OperatorSet,
        tol: f64,
        max: usize,
        scheme: OuterScheme,
    },
}

struct InnerResult {
    x: Vec<f64>,
    iterations: usize,
    residual: f64,
    converged: bool,
}

impl Engine<'_> {
    /// The update used inside the outer loop.
    fn step(&self, side: Side, rhs: &[f64], warm: &[f64]) -> Result<InnerResult> {
        match self {
            Engine::Fast {
                ops,
                scheme: OuterScheme::Coupled,
                ..
            } => {
                let ax = ops.apply(side, warm)?;
                let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
                let dx = ops.preconditioner(side).solve(&r)?;
                Ok(InnerResult {
                    x: warm.iter().zip(&dx).map(|(x, d)| x + d).collect(),
                    iterations: 1,
                    residual: 0.0,
                    converged: true,
                })
            }
            _ => self.solve(side, rhs, warm),
        }
    }

    /// A solve to full accuracy.
    fn solve(&self, side: Side, rhs: &[f64], warm: &[f64]) -> Result<InnerResult> {
        match self {
            Engine::Direct(d) => Ok(InnerResult {
                x: d.solve(side, rhs)?,
                iterations: 0,
                residual: 0.0,
                converged: true,
            }),
            Engine::Fast { ops, tol, max, .. } => {
                let out = fixed_point_solve(|x| ops.apply(side, x), ops.preconditioner(side), rhs, warm, *tol, *max)?;
                Ok(InnerResult {
                    x: out.x,
                    iterations: out.iterations,
                    residual: out.residual,
                    converged: out.converged,
                })
            }
        }
    }
}

struct LoopState {
    state: Vec<f64>,
    adjoint: Vec<f64>,
    control: ControlFunction,
}

struct LoopSettings {
    tol: f64,
    max: usize,
}

fn outer_loop(
    spec: &ProblemSpec,
    pair: ExponentPair,
    engine: &Engine<'_>,
    rhs: &RhsAssembler,
    mut st: LoopState,
    settings: LoopSettings,
    stats: &mut SolveStats,
) -> Result<LoopState> {
    let record = |r: &InnerResult, stats: &mut SolveStats| {
        stats.worst_inner_residual = stats.worst_inner_residual.max(r.residual);
        if !r.converged {
            stats.unconverged_inner += 1;
        }
    };
    let mut last = f64::INFINITY;
    for it in 1..=settings.max {
        let f = rhs.state_rhs(&st.control)?;
        let u = engine.step(Side::State, &f, &st.state)?;
        record(&u, stats);
        let g = rhs.adjoint_rhs(&u.x)?;
        let z = engine.step(Side::Adjoint, &g, &st.adjoint)?;
        record(&z, stats);
        let q_new = project_control(&z.x, pair, spec.gamma)?;
        last = relative_change(&st.control.coefficient_vector(), &q_new.coefficient_vector());
        if !last.is_finite() {
            return Err(FracError::Diverged {
                iterations: it,
                residual: last,
                best: stats.outer_history.iter().copied().fold(f64::INFINITY, f64::min),
            });
        }
        stats.inner_iterations.push((u.iterations, z.iterations));
        stats.outer_history.push(last);
        stats.outer_iterations = it;
        st = LoopState {
            state: u.x,
            adjoint: z.x,
            control: q_new,
        };
        if last <= settings.tol {
            // Bring the state and adjoint in line with the accepted control.
            let f = rhs.state_rhs(&st.control)?;
            let u = engine.solve(Side::State, &f, &st.state)?;
            record(&u, stats);
            let g = rhs.adjoint_rhs(&u.x)?;
            let z = engine.solve(Side::Adjoint, &g, &st.adjoint)?;
            record(&z, stats);
            st.state = u.x;
            st.adjoint = z.x;
            return Ok(st);
        }
    }
    Err(FracError::OuterNotConverged {
        max_iterations: settings.max,
        last_error: last,
    })
}

fn pad(v: &[f64], len: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    out.resize(len, 0.0);
    out
}

/// Initial guess: the full loop at the bootstrap size with dense solves.
fn bootstrap(spec: &ProblemSpec, pair: ExponentPair, config: &SolverConfig) -> Result<(LoopState, SolveStats)> {
    let nb = config.bootstrap_n;
    let ops = OperatorSet::assemble_dense(nb, pair, spec.lambda1, spec.lambda2)?;
    let rhs = RhsAssembler::new(spec, pair, nb, Mode::Direct)?;
    let engine = Engine::Direct(DirectSolver::new(&ops)?);
    let start = LoopState {
        state: vec![0.0; nb + 1],
        adjoint: vec![0.0; nb + 1],
        control: ControlFunction::zero(pair, nb, spec.gamma)?,
    };
    let mut stats = SolveStats::default();
    let tol = if nb == config.n { config.outer_tol } else { BOOTSTRAP_TOL };
    let st = outer_loop(
        spec,
        pair,
        &engine,
        &rhs,
        start,
        LoopSettings {
            tol,
            max: config.outer_max,
        },
        &mut stats,
    )?;
    Ok((st, stats))
}

/// Assemble and solve at `config.n`.
pub fn optimize(spec: &ProblemSpec, config: &SolverConfig) -> Result<OptimalTriple> {
    let pair = spec.validate()?;
    config.validate()?;
    let ops = OperatorSet::assemble(config.n, pair, spec.lambda1, spec.lambda2, config.mode)?;
    let rhs = RhsAssembler::new(spec, pair, config.n, config.mode)?;
    optimize_with(spec, config, pair, &ops, &rhs)
}

fn triple(pair: ExponentPair, st: LoopState, stats: SolveStats) -> OptimalTriple {
    OptimalTriple {
        pair,
        state: st.state,
        adjoint: st.adjoint,
        control: st.control,
        stats,
    }
}

/// Solve with prebuilt operators, timing only the optimization itself.
pub fn optimize_with(
    spec: &ProblemSpec,
    config: &SolverConfig,
    pair: ExponentPair,
    ops: &OperatorSet,
    rhs: &RhsAssembler,
) -> Result<OptimalTriple> {
    config.validate()?;
    if ops.n != config.n || rhs.len() != config.n + 1 {
        return Err(FracError::SizeMismatch {
            expected: config.n + 1,
            got: ops.n + 1,
        });
    }
    let started = Instant::now();
    let diagnostic = spec.is_diagnostic();
    let (boot, boot_stats) = bootstrap(spec, pair, config)?;
    if config.n == config.bootstrap_n {
        // The bootstrap already is the requested run.
        let stats = SolveStats {
            seconds: started.elapsed().as_secs_f64(),
            diagnostic,
            ..boot_stats
        };
        return Ok(triple(pair, boot, stats));
    }
    let n1 = config.n + 1;
    let mut stats = SolveStats {
        bootstrap_iterations: boot_stats.outer_iterations,
        diagnostic,
        ..SolveStats::default()
    };
    let engine = match config.mode {
        Mode::Direct => Engine::Direct(DirectSolver::new(ops)?),
        Mode::Fast => Engine::Fast {
            ops,
            tol: config.inner_tol,
            max: config.inner_max,
            scheme: config.scheme,
        },
    };
    let start = LoopState {
        state: pad(&boot.state, n1),
        adjoint: pad(&boot.adjoint, n1),
        control: project_control(&pad(&boot.adjoint, n1), pair, spec.gamma)?,
    };
    let st = outer_loop(
        spec,
        pair,
        &engine,
        rhs,
        start,
        LoopSettings {
            tol: config.outer_tol,
            max: config.outer_max,
        },
        &mut stats,
    )?;
    stats.seconds = started.elapsed().as_secs_f64();
    Ok(triple(pair, st, stats))
}

#[cfg(test)]
mod tests;

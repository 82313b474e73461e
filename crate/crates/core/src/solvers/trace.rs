use std::fmt;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::lovasz::EpsilonBox;
use crate::oracle::{BasePoint, SetFunctionOracle};
use crate::prox::ProxResult;
use crate::scalar::Scalar;
use crate::set::{negative_part_sum, Subset};

use super::config::SolverConfig;
use super::decomposition::Decomposition;
use super::dual::DualState;
use super::rounding::{round_to_set, RoundedSet};

/// One row of a solver trace, written after every outer iteration (and once
/// before the first).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord<T> {
    pub iter: usize,
    /// Cumulative discrete-oracle calls, all summands.
    pub sfmd_total: u64,
    pub sfmd_per_summand: Vec<u64>,
    /// Cumulative prox (constrained TV) solves.
    pub sfmc_total: u64,
    /// Gap of the best set against the best certificate so far.
    pub discrete_gap: T,
    pub best_value: T,
    /// Box half-width used in this iteration (0 for the initial row).
    pub epsilon: T,
    pub wall_ms: f64,
}

/// Final answer of a solver run.
#[derive(Debug, Clone)]
pub struct SolveOutcome<T> {
    pub best: Subset,
    pub best_value: T,
    /// `u ∈ B(F)` with the largest `u_-(V)` seen.
    pub certificate: BasePoint<T>,
    pub gap: T,
    /// The gap reached the tolerance before the iteration budget ran out.
    pub certified: bool,
    pub trace: Vec<TraceRecord<T>>,
    pub state: DualState<T>,
}

/// A solver failure, with the trace recorded up to that point.
#[derive(Debug)]
pub struct SolveError<T> {
    pub error: Error,
    pub trace: Vec<TraceRecord<T>>,
}

impl<T> fmt::Display for SolveError<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (after {} trace rows)", self.error, self.trace.len())
    }
}

impl<T: fmt::Debug> std::error::Error for SolveError<T> {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl<T> From<SolveError<T>> for Error {
    fn from(e: SolveError<T>) -> Self {
        e.error
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// Exact block maximization against the other current blocks.
    Plain,
    /// Block maximization against an extrapolated point.
    Extrapolated,
    /// Projection inside a reflection step.
    Projection,
}

/// Emitted after every prox solve of a dual step.
pub struct StepEvent<'a, T> {
    pub iter: usize,
    pub summand: usize,
    pub kind: StepKind,
    pub epsilon: EpsilonBox<T>,
    /// Dual blocks before and after the step (empty for projections).
    pub before: &'a [Vec<T>],
    pub after: &'a [Vec<T>],
    pub prox: &'a ProxResult<T>,
}

/// Emitted after every outer iteration, before the stopping test.
pub struct IterateEvent<'a, T> {
    pub iter: usize,
    pub epsilon: EpsilonBox<T>,
    pub w: &'a [T],
    pub t_cert: &'a [BasePoint<T>],
    /// `Σ_i t_i`.
    pub u: &'a BasePoint<T>,
    /// Rounding of this iterate alone (not best-so-far).
    pub rounded: &'a RoundedSet<T>,
    pub record: &'a TraceRecord<T>,
}

/// Instrumentation hooks; every method defaults to doing nothing.
pub trait Observer<T> {
    fn on_step(&mut self, _event: &StepEvent<'_, T>) {}

    fn on_iterate(&mut self, _event: &IterateEvent<'_, T>) {}
}

pub struct NoObserver;

impl<T> Observer<T> for NoObserver {}

/// Counters, best-so-far pair and trace shared by the solvers.
pub(crate) struct Tracker<T> {
    sfmd: Vec<u64>,
    sfmc: u64,
    best: Option<(Subset, T)>,
    best_cert: Option<BasePoint<T>>,
    best_lower: T,
    gap_tolerance: Option<T>,
    start: Option<Instant>,
    pub trace: Vec<TraceRecord<T>>,
}

impl<T: Scalar> Tracker<T> {
    pub fn new(r: usize, cfg: &SolverConfig<T>) -> Self {
        Tracker {
            sfmd: vec![0; r],
            sfmc: 0,
            best: None,
            best_cert: None,
            best_lower: T::neg_infinity(),
            gap_tolerance: cfg.gap_tolerance,
            start: cfg.record_wall_time.then(Instant::now),
            trace: Vec::new(),
        }
    }

    pub fn count(&mut self, summand: usize, prox: &ProxResult<T>) {
        self.sfmd[summand] += prox.sfmd_calls as u64;
        self.sfmc += 1;
    }

    pub fn fail(&mut self, error: Error) -> SolveError<T> {
        SolveError { error, trace: std::mem::take(&mut self.trace) }
    }

    /// Rounds `w`, updates the best pair, appends a trace row and reports
    /// whether the gap is within tolerance.
    pub fn record<F: SetFunctionOracle<T>>(
        &mut self,
        d: &Decomposition<T, F>,
        iter: usize,
        bx: &EpsilonBox<T>,
        w: &[T],
        t_cert: &[BasePoint<T>],
        observer: &mut dyn Observer<T>,
    ) -> Result<bool> {
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical(format!("non-finite primal iterate at iteration {iter}")));
        }
        let u = BasePoint::sum(t_cert, d.ground_size());
        let rounded = round_to_set(d, w, &u)?;
        if self.best.as_ref().is_none_or(|(_, v)| rounded.value < *v) {
            self.best = Some((rounded.set.clone(), rounded.value));
        }
        let lower = negative_part_sum(&u.s);
        if !lower.is_finite() {
            return Err(Error::Numerical(format!("non-finite certificate at iteration {iter}")));
        }
        if lower > self.best_lower || self.best_cert.is_none() {
            self.best_lower = lower;
            self.best_cert = Some(u.clone());
        }
        let best_value = self.best.as_ref().map(|(_, v)| *v).unwrap_or_else(T::zero);
        let gap = best_value - self.best_lower;
        let record = TraceRecord {
            iter,
            sfmd_total: self.sfmd.iter().sum(),
            sfmd_per_summand: self.sfmd.clone(),
            sfmc_total: self.sfmc,
            discrete_gap: gap,
            best_value,
            epsilon: if iter == 0 { T::zero() } else { bx.epsilon() },
            wall_ms: self.start.map_or(0.0, |s| s.elapsed().as_secs_f64() * 1e3),
        };
        observer.on_iterate(&IterateEvent { iter, epsilon: *bx, w, t_cert, u: &u, rounded: &rounded, record: &record });
        self.trace.push(record);
        let tol = self.gap_tolerance.unwrap_or_else(|| T::lit(1e-6) * (T::one() + best_value.abs()));
        Ok(gap <= tol)
    }

    pub fn finish(mut self, certified: bool, state: DualState<T>) -> SolveOutcome<T> {
        let (best, best_value) = self.best.take().expect("at least one trace row");
        let certificate = self.best_cert.take().expect("at least one trace row");
        let gap = best_value - self.best_lower;
        SolveOutcome { best, best_value, certificate, gap, certified, trace: self.trace, state }
    }
}

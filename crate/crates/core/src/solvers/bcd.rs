use crate::error::Result;
use crate::lovasz::EpsilonBox;
use crate::oracle::SetFunctionOracle;
use crate::scalar::Scalar;

use super::config::{epsilon_schedule, Momentum, SolverConfig};
use super::decomposition::Decomposition;
use super::dual::{bcd_step, others, prox_step, DualState};
use super::trace::{Observer, SolveError, SolveOutcome, StepEvent, StepKind, Tracker};

/// `β = (t - 1) / (t + 2)`.
pub fn momentum<T: Scalar>(t: usize) -> T {
    let t = T::from_usize_lossy(t);
    (t - T::one()) / (t + T::lit(2.0))
}

pub(crate) fn box_at<T: Scalar, F: SetFunctionOracle<T>>(
    d: &Decomposition<T, F>,
    cfg: &SolverConfig<T>,
    delta: T,
    t: usize,
) -> Result<EpsilonBox<T>> {
    let c = cfg.proportionality_for(d.ground_size());
    EpsilonBox::new(epsilon_schedule(cfg.epsilon_mode, delta, t, c))
}

/// Block coordinate ascent sweeping the summands in ascending order.
pub fn solve_bcd<T: Scalar, F: SetFunctionOracle<T>>(
    d: &Decomposition<T, F>,
    cfg: &SolverConfig<T>,
    observer: &mut dyn Observer<T>,
) -> std::result::Result<SolveOutcome<T>, SolveError<T>> {
    let mut tracker = Tracker::new(d.len(), cfg);
    match run_bcd(d, cfg, observer, &mut tracker) {
        Ok((certified, state)) => Ok(tracker.finish(certified, state)),
        Err(e) => Err(tracker.fail(e)),
    }
}

fn run_bcd<T: Scalar, F: SetFunctionOracle<T>>(
    d: &Decomposition<T, F>,
    cfg: &SolverConfig<T>,
    observer: &mut dyn Observer<T>,
    tracker: &mut Tracker<T>,
) -> Result<(bool, DualState<T>)> {
    cfg.validate(d.len())?;
    let delta = d.delta();
    let mut state = DualState::initial(d)?;
    if tracker.record(d, 0, &box_at(d, cfg, delta, 1)?, &state.w, &state.t_cert, observer)? {
        return Ok((true, state));
    }
    for k in 1..=cfg.max_outer_iters {
        let bx = box_at(d, cfg, delta, k)?;
        for i in 0..d.len() {
            let before = state.s.clone();
            let prox = bcd_step(d, &mut state, i, &bx)?;
            tracker.count(i, &prox);
            observer.on_step(&StepEvent {
                iter: k,
                summand: i,
                kind: StepKind::Plain,
                epsilon: bx,
                before: &before,
                after: &state.s,
                prox: &prox,
            });
        }
        if !state.is_finite() {
            return Err(crate::Error::Numerical(format!("non-finite dual iterate at iteration {k}")));
        }
        if tracker.record(d, k, &bx, &state.w, &state.t_cert, observer)? {
            return Ok((true, state));
        }
    }
    Ok((false, state))
}

/// Two-block ascent with FISTA extrapolation of the second block.
///
/// Each iteration maximizes block 1 against the extrapolated block 2, then
/// block 2 against the new block 1, then extrapolates
/// `t_2 = s_2 + β (s_2 - s_2^prev)`. With `β = 0` this is exactly
/// [`solve_bcd`].
pub fn solve_accelerated<T: Scalar, F: SetFunctionOracle<T>>(
    d: &Decomposition<T, F>,
    cfg: &SolverConfig<T>,
    observer: &mut dyn Observer<T>,
) -> std::result::Result<SolveOutcome<T>, SolveError<T>> {
    let mut tracker = Tracker::new(d.len(), cfg);
    match run_accelerated(d, cfg, observer, &mut tracker) {
        Ok((certified, state)) => Ok(tracker.finish(certified, state)),
        Err(e) => Err(tracker.fail(e)),
    }
}

fn run_accelerated<T: Scalar, F: SetFunctionOracle<T>>(
    d: &Decomposition<T, F>,
    cfg: &SolverConfig<T>,
    observer: &mut dyn Observer<T>,
    tracker: &mut Tracker<T>,
) -> Result<(bool, DualState<T>)> {
    let cfg_checked =
        super::config::SolverConfig { algorithm: super::config::Algorithm::AcceleratedBcd, ..cfg.clone() };
    cfg_checked.validate(d.len())?;
    let delta = d.delta();
    let mut state = DualState::initial(d)?;
    if tracker.record(d, 0, &box_at(d, cfg, delta, 1)?, &state.w, &state.t_cert, observer)? {
        return Ok((true, state));
    }
    let mut extrapolated = state.s[1].clone();
    let mut moved = false;
    for k in 1..=cfg.max_outer_iters {
        let bx = box_at(d, cfg, delta, k)?;

        let before = state.s.clone();
        let z = others(&[state.s[0].clone(), extrapolated.clone()], 0);
        let (s0, prox) = prox_step(d.summand(0), &z, &bx)?;
        state.s[0] = s0;
        state.t_cert[0] = prox.s.clone();
        state.recompute_w();
        tracker.count(0, &prox);
        observer.on_step(&StepEvent {
            iter: k,
            summand: 0,
            kind: if moved { StepKind::Extrapolated } else { StepKind::Plain },
            epsilon: bx,
            before: &before,
            after: &state.s,
            prox: &prox,
        });

        let before = state.s.clone();
        let prev = state.s[1].clone();
        let prox = bcd_step(d, &mut state, 1, &bx)?;
        tracker.count(1, &prox);
        observer.on_step(&StepEvent {
            iter: k,
            summand: 1,
            kind: StepKind::Plain,
            epsilon: bx,
            before: &before,
            after: &state.s,
            prox: &prox,
        });

        let beta = match cfg.momentum {
            Momentum::Fista => momentum::<T>(k),
            Momentum::Zero => T::zero(),
        };
        if beta == T::zero() {
            extrapolated = state.s[1].clone();
            moved = false;
        } else {
            extrapolated = state.s[1].iter().zip(&prev).map(|(&a, &b)| a + beta * (a - b)).collect();
            moved = true;
        }
        state.momentum_prev = Some(prev);

        if !state.is_finite() || extrapolated.iter().any(|x| !x.is_finite()) {
            return Err(crate::Error::Numerical(format!("non-finite dual iterate at iteration {k}")));
        }
        if tracker.record(d, k, &bx, &state.w, &state.t_cert, observer)? {
            return Ok((true, state));
        }
    }
    Ok((false, state))
}

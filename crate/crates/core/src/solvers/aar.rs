use crate::error::Result;
use crate::lovasz::EpsilonBox;
use crate::oracle::SetFunctionOracle;
use crate::prox::{constrained_tv, ProxResult};
use crate::scalar::Scalar;

use super::config::SolverConfig;
use super::decomposition::Decomposition;
use super::dual::DualState;
use super::trace::{Observer, SolveError, SolveOutcome, StepEvent, StepKind, Tracker};

/// Averaged alternating reflections on the distance problem between
/// `A = B(F_1)` and `B = -B(F_2)`: `z ← ½ z + ½ R_A(R_B(z))`.
///
/// Projections come from unconstrained prox solves:
/// `Π_A(z) = z - prox_{f_1}(z)` and `Π_B(z) = z + prox_{f_2}(-z)`.
/// The primal point is recovered as `b = Π_B(z)`, `a = Π_A(b)`,
/// `w = b - a`, with certificates `t_1 = a` and `t_2 = -b`.
pub fn solve_aar<T: Scalar, F: SetFunctionOracle<T>>(
    d: &Decomposition<T, F>,
    cfg: &SolverConfig<T>,
    observer: &mut dyn Observer<T>,
) -> std::result::Result<SolveOutcome<T>, SolveError<T>> {
    let mut tracker = Tracker::new(d.len(), cfg);
    match run(d, cfg, observer, &mut tracker) {
        Ok((certified, state)) => Ok(tracker.finish(certified, state)),
        Err(e) => Err(tracker.fail(e)),
    }
}

struct Projector<'a, T, F> {
    d: &'a Decomposition<T, F>,
    iter: usize,
}

impl<T: Scalar, F: SetFunctionOracle<T>> Projector<'_, T, F> {
    fn solve(
        &self,
        summand: usize,
        t: &[T],
        tracker: &mut Tracker<T>,
        observer: &mut dyn Observer<T>,
    ) -> Result<ProxResult<T>> {
        let bx = EpsilonBox::infinite();
        let prox = constrained_tv(self.d.summand(summand), t, &bx)?;
        tracker.count(summand, &prox);
        observer.on_step(&StepEvent {
            iter: self.iter,
            summand,
            kind: StepKind::Projection,
            epsilon: bx,
            before: &[],
            after: &[],
            prox: &prox,
        });
        Ok(prox)
    }

    /// Projection onto `B(F_1)`; also returns the certificate.
    fn onto_a(
        &self,
        z: &[T],
        tracker: &mut Tracker<T>,
        observer: &mut dyn Observer<T>,
    ) -> Result<(Vec<T>, ProxResult<T>)> {
        let prox = self.solve(0, z, tracker, observer)?;
        Ok((z.iter().zip(&prox.w).map(|(&a, &b)| a - b).collect(), prox))
    }

    /// Projection onto `-B(F_2)`.
    fn onto_b(
        &self,
        z: &[T],
        tracker: &mut Tracker<T>,
        observer: &mut dyn Observer<T>,
    ) -> Result<(Vec<T>, ProxResult<T>)> {
        let neg: Vec<T> = z.iter().map(|&x| -x).collect();
        let prox = self.solve(1, &neg, tracker, observer)?;
        Ok((z.iter().zip(&prox.w).map(|(&a, &b)| a + b).collect(), prox))
    }
}

fn reflect<T: Scalar>(p: &[T], z: &[T]) -> Vec<T> {
    p.iter().zip(z).map(|(&p, &z)| p + p - z).collect()
}

fn run<T: Scalar, F: SetFunctionOracle<T>>(
    d: &Decomposition<T, F>,
    cfg: &SolverConfig<T>,
    observer: &mut dyn Observer<T>,
    tracker: &mut Tracker<T>,
) -> Result<(bool, DualState<T>)> {
    let cfg_checked = SolverConfig { algorithm: super::config::Algorithm::Aar, ..cfg.clone() };
    cfg_checked.validate(d.len())?;
    let bx = EpsilonBox::infinite();
    let n = d.ground_size();
    let mut state = DualState::initial(d)?;
    if tracker.record(d, 0, &bx, &state.w, &state.t_cert, observer)? {
        return Ok((true, state));
    }
    if cfg.max_outer_iters == 0 {
        return Ok((false, state));
    }
    let mut z = vec![T::zero(); n];
    let mut proj = Projector { d, iter: 1 };
    let (mut pb, _) = proj.onto_b(&z, tracker, observer)?;
    let half = T::lit(0.5);
    for k in 1..=cfg.max_outer_iters {
        proj.iter = k;
        let rb = reflect(&pb, &z);
        let (pa, _) = proj.onto_a(&rb, tracker, observer)?;
        let ra = reflect(&pa, &rb);
        z = z.iter().zip(&ra).map(|(&a, &b)| half * a + half * b).collect();
        if z.iter().any(|x| !x.is_finite()) {
            return Err(crate::Error::Numerical(format!("non-finite AAR iterate at iteration {k}")));
        }

        let (b, prox_b) = proj.onto_b(&z, tracker, observer)?;
        let (a, prox_a) = proj.onto_a(&b, tracker, observer)?;
        state.s[0] = a;
        state.s[1] = b.iter().map(|&x| -x).collect();
        state.t_cert[0] = prox_a.s;
        state.t_cert[1] = prox_b.s;
        state.recompute_w();
        pb = b;
        if tracker.record(d, k, &bx, &state.w, &state.t_cert, observer)? {
            return Ok((true, state));
        }
    }
    Ok((false, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::CutFunction;
    use crate::solvers::{Algorithm, EpsilonMode, NoObserver};

    fn cfg() -> SolverConfig<f64> {
        SolverConfig { algorithm: Algorithm::Aar, epsilon_mode: EpsilonMode::Infinite, ..Default::default() }
    }

    #[test]
    fn identical_modular_summands() {
        let m = vec![0.5, -1.0, 2.0];
        let d: Decomposition<f64> =
            Decomposition::new(vec![CutFunction::modular(m.clone()).unwrap(), CutFunction::modular(m).unwrap()])
                .unwrap();
        let out = solve_aar(&d, &cfg(), &mut NoObserver).unwrap();
        assert!(out.trace.len() <= 3);
        assert_eq!(out.best.indices(), vec![1]);
        assert_eq!(out.gap, 0.0);
    }

    #[test]
    fn chain_plus_modular() {
        let d = Decomposition::new(vec![CutFunction::chain(&[1.0]), CutFunction::modular(vec![1.0, -1.0]).unwrap()])
            .unwrap();
        let out = solve_aar(&d, &cfg(), &mut NoObserver).unwrap();
        assert!(out.certified);
        assert_eq!(out.best_value, 0.0);
    }

    #[test]
    fn rejects_finite_box() {
        let d = Decomposition::new(vec![CutFunction::chain(&[1.0]), CutFunction::modular(vec![1.0, -1.0]).unwrap()])
            .unwrap();
        let bad = SolverConfig { epsilon_mode: EpsilonMode::ConstDelta, ..cfg() };
        assert!(solve_aar(&d, &bad, &mut NoObserver).is_err());
    }
}

use std::marker::PhantomData;

use crate::cut::CutFunction;
use crate::error::{Error, Result};
use crate::oracle::SetFunctionOracle;
use crate::scalar::Scalar;
use crate::set::Subset;

/// `F = Σ_i F_i` over a shared ground set.
#[derive(Debug, Clone)]
pub struct Decomposition<T, F = CutFunction<T>> {
    summands: Vec<F>,
    n: usize,
    _scalar: PhantomData<T>,
}

impl<T: Scalar, F: SetFunctionOracle<T>> Decomposition<T, F> {
    pub fn new(summands: Vec<F>) -> Result<Self> {
        if summands.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a decomposition needs at least 2 summands, got {}",
                summands.len()
            )));
        }
        let n = summands[0].ground_size();
        for (i, f) in summands.iter().enumerate() {
            if f.ground_size() != n {
                return Err(Error::InvalidArgument(format!(
                    "summand {i} has ground size {}, expected {n}",
                    f.ground_size()
                )));
            }
        }
        Ok(Decomposition { summands, n, _scalar: PhantomData })
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn summands(&self) -> &[F] {
        &self.summands
    }

    pub fn summand(&self, i: usize) -> &F {
        &self.summands[i]
    }

    pub fn into_summands(self) -> Vec<F> {
        self.summands
    }

    pub fn eval(&self, set: &Subset) -> T {
        self.summands.iter().map(|f| f.eval(set)).sum()
    }

    pub fn prefix_values(&self, order: &[usize]) -> Vec<T> {
        let mut out = vec![T::zero(); order.len() + 1];
        for f in &self.summands {
            for (acc, v) in out.iter_mut().zip(f.prefix_values(order)) {
                *acc = *acc + v;
            }
        }
        out
    }

    /// `Δ² = r Σ_i Δ_i²`.
    pub fn delta_squared(&self) -> T {
        let r = T::from_usize_lossy(self.len());
        r * self.summands.iter().map(|f| super::config::diameter_squared(f)).sum::<T>()
    }

    pub fn delta(&self) -> T {
        self.delta_squared().sqrt()
    }
}

/// The sum viewed as one set function, for evaluation-only helpers such as
/// the brute-force checks.
impl<T: Scalar, F: SetFunctionOracle<T>> SetFunctionOracle<T> for Decomposition<T, F> {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, set: &Subset) -> T {
        Decomposition::eval(self, set)
    }

    fn prefix_values(&self, order: &[usize]) -> Vec<T> {
        Decomposition::prefix_values(self, order)
    }

    fn minimize(&self, _u: &[T]) -> Result<crate::oracle::DiscreteMinimum<T>> {
        Err(Error::InvalidArgument(
            "the summed function has no direct minimization oracle; minimize it with a solver".into(),
        ))
    }

    fn restrict(&self, anchor: &Subset, domain: &Subset) -> Result<Self> {
        let summands = self.summands.iter().map(|f| f.restrict(anchor, domain)).collect::<Result<Vec<_>>>()?;
        let n = domain.len();
        Ok(Decomposition { summands, n, _scalar: PhantomData })
    }

    fn boundary_terms(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.n];
        for f in &self.summands {
            for (acc, v) in out.iter_mut().zip(f.boundary_terms()) {
                *acc = *acc + v;
            }
        }
        out
    }

    fn name(&self) -> &str {
        "decomposition"
    }
}

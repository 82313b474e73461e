//! The set-function interface consumed by every algorithm in the crate.

use crate::error::Result;
use crate::scalar::Scalar;
use crate::set::Subset;

/// Where a base-polytope point came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Read off a maximum flow.
    Flow,
    /// Greedy algorithm on an ordering.
    Greedy,
    /// Stitched together from several certificates (prox assembly, sums over
    /// summands).
    Assembled,
}

/// A vector claimed to lie in the base polytope `B(F)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasePoint<T> {
    pub s: Vec<T>,
    pub source: Provenance,
}

impl<T: Scalar> BasePoint<T> {
    pub fn new(s: Vec<T>, source: Provenance) -> Self {
        BasePoint { s, source }
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Coordinate-wise sum; base polytopes are closed under addition.
    pub fn sum<'a>(points: impl IntoIterator<Item = &'a BasePoint<T>>, n: usize) -> BasePoint<T> {
        let mut s = vec![T::zero(); n];
        for p in points {
            for (acc, &x) in s.iter_mut().zip(&p.s) {
                *acc = *acc + x;
            }
        }
        BasePoint { s, source: Provenance::Assembled }
    }
}

/// Answer of a discrete minimization oracle for `min_A F(A) - u(A)`.
#[derive(Debug, Clone)]
pub struct DiscreteMinimum<T> {
    /// Inclusion-minimal minimizer.
    pub set: Subset,
    /// `F(set) - u(set)`, with every constant folded back in.
    pub value: T,
    /// `s` in `B(F)` with `(s - u)_-(V) = value`.
    pub certificate: BasePoint<T>,
}

/// A normalized submodular function with a discrete minimization oracle.
///
/// Implementations must be callable from several threads at once.
pub trait SetFunctionOracle<T: Scalar>: Send + Sync {
    fn ground_size(&self) -> usize;

    /// `F(set)`; `F(empty) = 0`.
    fn eval(&self, set: &Subset) -> T;

    /// `out[k] = F({order[0], .., order[k-1]})`, length `order.len() + 1`.
    fn prefix_values(&self, order: &[usize]) -> Vec<T> {
        let n = self.ground_size();
        let mut set = Subset::empty(n);
        let mut out = Vec::with_capacity(order.len() + 1);
        out.push(self.eval(&set));
        for &j in order {
            set.insert(j);
            out.push(self.eval(&set));
        }
        out
    }

    /// Discrete minimization of `F(A) - u(A)` with a dual certificate.
    fn minimize(&self, u: &[T]) -> Result<DiscreteMinimum<T>>;

    /// The function `G(B) = F(anchor ∪ B) - F(anchor)` on the elements of
    /// `domain`, re-indexed in increasing order. `anchor` and `domain` must
    /// be disjoint; elements outside both are forced out of every set.
    fn restrict(&self, anchor: &Subset, domain: &Subset) -> Result<Self>
    where
        Self: Sized;

    /// `F({j}) + F(V ∖ {j}) - F(V)` for every `j`.
    fn boundary_terms(&self) -> Vec<T> {
        let n = self.ground_size();
        let full = Subset::full(n);
        let total = self.eval(&full);
        (0..n)
            .map(|j| {
                let mut single = Subset::empty(n);
                single.insert(j);
                let mut rest = full.clone();
                rest.remove(j);
                self.eval(&single) + self.eval(&rest) - total
            })
            .collect()
    }

    fn name(&self) -> &str {
        "set-function"
    }
}

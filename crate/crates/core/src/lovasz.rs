//! Lovász extension, the box regularizer and its conjugate, duality gaps.

use crate::error::{check_len, Error, Result};
use crate::oracle::{BasePoint, Provenance, SetFunctionOracle};
use crate::scalar::Scalar;
use crate::set::{dot, negative_part_sum, Subset};

/// Half-width of the box `[-ε, ε]` on which the quadratic regularizer is
/// finite. An infinite width selects the plain quadratic `w²/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonBox<T> {
    epsilon: T,
}

impl<T: Scalar> EpsilonBox<T> {
    pub fn new(epsilon: T) -> Result<Self> {
        if epsilon.is_nan() || epsilon < T::zero() {
            return Err(Error::InvalidArgument(format!("box half-width must be nonnegative, got {epsilon}")));
        }
        Ok(EpsilonBox { epsilon })
    }

    pub fn infinite() -> Self {
        EpsilonBox { epsilon: T::infinity() }
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn is_infinite(&self) -> bool {
        self.epsilon.is_infinite()
    }

    pub fn clamp(&self, w: T) -> T {
        w.max(-self.epsilon).min(self.epsilon)
    }
}

/// `ψ(w) = w²/2` on the box, `+∞` outside.
pub fn psi<T: Scalar>(w: T, bx: &EpsilonBox<T>) -> T {
    if w.abs() <= bx.epsilon {
        w * w / T::lit(2.0)
    } else {
        T::infinity()
    }
}

/// Fenchel conjugate of [`psi`]: quadratic on the box, linear (Huber) outside.
pub fn psi_conj<T: Scalar>(s: T, bx: &EpsilonBox<T>) -> T {
    let eps = bx.epsilon;
    if s.abs() <= eps {
        s * s / T::lit(2.0)
    } else {
        eps * s.abs() - eps * eps / T::lit(2.0)
    }
}

/// Order of the greedy algorithm: decreasing `w`, ascending index among ties.
pub fn greedy_order<T: Scalar>(w: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[b].partial_cmp(&w[a]).unwrap_or(std::cmp::Ordering::Equal));
    order
}

/// Greedy algorithm: returns the Lovász extension `f(w)` and the maximizer of
/// `wᵀs` over `B(F)`.
pub fn greedy_lovasz<T: Scalar, F: SetFunctionOracle<T> + ?Sized>(f: &F, w: &[T]) -> Result<(T, BasePoint<T>)> {
    check_len(f.ground_size(), w.len())?;
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("greedy weights must be finite".into()));
    }
    let order = greedy_order(w);
    let prefix = f.prefix_values(&order);
    let mut s = vec![T::zero(); w.len()];
    for (k, &j) in order.iter().enumerate() {
        s[j] = prefix[k + 1] - prefix[k];
    }
    let value = dot(w, &s);
    Ok((value, BasePoint::new(s, Provenance::Greedy)))
}

/// Lovász extension value only.
pub fn lovasz<T: Scalar, F: SetFunctionOracle<T> + ?Sized>(f: &F, w: &[T]) -> Result<T> {
    greedy_lovasz(f, w).map(|(v, _)| v)
}

/// `F(A) - s_-(V)`; nonnegative whenever `s` is in `B(F)`.
pub fn discrete_gap<T: Scalar, F: SetFunctionOracle<T> + ?Sized>(f: &F, set: &Subset, s: &BasePoint<T>) -> T {
    f.eval(set) - negative_part_sum(&s.s)
}

/// `f(w) - tᵀw + Σ ψ(w_j)`, the objective of the constrained TV problem.
pub fn prox_objective<T: Scalar, F: SetFunctionOracle<T> + ?Sized>(
    f: &F,
    t: &[T],
    bx: &EpsilonBox<T>,
    w: &[T],
) -> Result<T> {
    check_len(w.len(), t.len())?;
    let penalty: T = w.iter().map(|&x| psi(x, bx)).sum();
    if penalty.is_infinite() {
        return Ok(T::infinity());
    }
    Ok(lovasz(f, w)? - dot(t, w) + penalty)
}

/// Dual objective `-Σ ψ*(t_j - s_j)` paired with [`prox_objective`].
pub fn prox_dual_objective<T: Scalar>(t: &[T], bx: &EpsilonBox<T>, s: &[T]) -> T {
    -t.iter().zip(s).map(|(&tj, &sj)| psi_conj(tj - sj, bx)).sum::<T>()
}

//! Exhaustive reference routines for small ground sets. Used by tests and by
//! certificate checks; none of them call a minimization oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, Error, Result};
use crate::lovasz::{greedy_lovasz, prox_objective, EpsilonBox};
use crate::oracle::SetFunctionOracle;
use crate::scalar::{nearly_equal, Scalar};
use crate::set::{dot, modular_value, Subset};

pub const MAX_ENUMERATION: usize = 24;
pub const EXHAUSTIVE_CHECK_LIMIT: usize = 12;
pub const SAMPLED_CHECK_SUBSETS: usize = 1000;

fn guard(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::TooLarge { n, limit })
    } else {
        Ok(())
    }
}

/// All `2^n` values `F(A)`, indexed by mask.
pub fn value_table<T: Scalar, F: SetFunctionOracle<T> + ?Sized>(f: &F) -> Result<Vec<T>> {
    let n = f.ground_size();
    guard(n, MAX_ENUMERATION)?;
    Ok((0..1u64 << n).map(|mask| f.eval(&Subset::from_mask(n, mask))).collect())
}

/// Exact minimizer of `F(A) - u(A)` by enumeration.
///
/// Ties go to the smaller cardinality, then to the smaller mask (bit `j` is
/// element `j`).
pub fn brute_force_sfm<T: Scalar, F: SetFunctionOracle<T> + ?Sized>(f: &F, u: &[T]) -> Result<(Subset, T)> {
    let n = f.ground_size();
    guard(n, MAX_ENUMERATION)?;
    check_len(n, u.len())?;
    let mut best: Option<(u64, T, u32)> = None;
    for mask in 0..1u64 << n {
        let set = Subset::from_mask(n, mask);
        let value = f.eval(&set) - modular_value(u, &set);
        let card = mask.count_ones();
        let better = match best {
            None => true,
            Some((_, bv, bc)) => {
                if nearly_equal(value, bv) {
                    card < bc
                } else {
                    value < bv
                }
            }
        };
        if better {
            best = Some((mask, value, card));
        }
    }
    let (mask, value, _) = best.expect("at least the empty set");
    Ok((Subset::from_mask(n, mask), value))
}

/// Checks `F(A) + F(B) >= F(A ∪ B) + F(A ∩ B)` through the equivalent
/// diminishing-returns condition on pairs of added elements.
pub fn is_submodular<T: Scalar, F: SetFunctionOracle<T> + ?Sized>(f: &F, tol: T) -> Result<bool> {
    let n = f.ground_size();
    guard(n, 20)?;
    let table = value_table(f)?;
    for mask in 0..1usize << n {
        for i in 0..n {
            if mask >> i & 1 == 1 {
                continue;
            }
            for j in i + 1..n {
                if mask >> j & 1 == 1 {
                    continue;
                }
                let lhs = table[mask | 1 << i] + table[mask | 1 << j];
                let rhs = table[mask | 1 << i | 1 << j] + table[mask];
                if lhs < rhs - tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Outcome of testing `s ∈ B(F)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseCheck<T> {
    /// Number of violated constraints, counting `s(V) = F(V)` as one.
    pub violations: usize,
    pub subsets_checked: usize,
    /// Largest `s(A) - F(A)` seen (or `|s(V) - F(V)|` if larger).
    pub worst_excess: T,
}

impl<T: Scalar> BaseCheck<T> {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Tests base-polytope membership: exhaustively for `n <= 12`, otherwise on
/// `SAMPLED_CHECK_SUBSETS` random subsets drawn from a fixed seed.
pub fn check_base_point<T: Scalar, F: SetFunctionOracle<T> + ?Sized>(f: &F, s: &[T], tol: T) -> BaseCheck<T> {
    let n = f.ground_size();
    let mut check = BaseCheck { violations: 0, subsets_checked: 0, worst_excess: T::neg_infinity() };
    if s.len() != n {
        check.violations = 1;
        check.worst_excess = T::infinity();
        return check;
    }
    let full = Subset::full(n);
    let total_excess = (modular_value(s, &full) - f.eval(&full)).abs();
    check.worst_excess = total_excess;
    if total_excess > tol || total_excess.is_nan() {
        check.violations += 1;
    }
    let test = |set: &Subset, check: &mut BaseCheck<T>| {
        let excess = modular_value(s, set) - f.eval(set);
        check.subsets_checked += 1;
        check.worst_excess = check.worst_excess.max(excess);
        if excess > tol || excess.is_nan() {
            check.violations += 1;
        }
    };
    if n <= EXHAUSTIVE_CHECK_LIMIT {
        for mask in 0..1u64 << n {
            test(&Subset::from_mask(n, mask), &mut check);
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_ba5e);
        for _ in 0..SAMPLED_CHECK_SUBSETS {
            let p: f64 = rng.gen();
            let set = Subset::from_members((0..n).map(|_| rng.gen::<f64>() < p).collect());
            test(&set, &mut check);
        }
    }
    check
}

/// Projection of `y` onto nonincreasing sequences (pool adjacent violators).
pub fn isotonic_nonincreasing<T: Scalar>(y: &[T]) -> Vec<T> {
    // blocks of (sum, count)
    let mut blocks: Vec<(T, usize)> = Vec::with_capacity(y.len());
    for &v in y {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (s1, c1) = blocks[blocks.len() - 1];
            let (s0, c0) = blocks[blocks.len() - 2];
            if s0 / T::from_usize_lossy(c0) < s1 / T::from_usize_lossy(c1) {
                blocks.pop();
                let last = blocks.len() - 1;
                blocks[last] = (s0 + s1, c0 + c1);
            } else {
                break;
            }
        }
    }
    blocks.iter().flat_map(|&(s, c)| std::iter::repeat_n(s / T::from_usize_lossy(c), c)).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// Exact minimizer of `f(w) - tᵀw + Σ ψ(w_j)` by enumerating the `n!` cones
/// on which the Lovász extension is linear.
///
/// On the cone of an ordering `σ`, `f(w) = s_σᵀw` with `s_σ` the greedy
/// vector, so the problem is a box-constrained isotonic regression of
/// `t - s_σ`, solved by clamping the unconstrained isotonic fit.
pub fn cone_enumeration_prox<T: Scalar, F: SetFunctionOracle<T> + ?Sized>(
    f: &F,
    t: &[T],
    bx: &EpsilonBox<T>,
) -> Result<Vec<T>> {
    let n = f.ground_size();
    guard(n, 7)?;
    check_len(n, t.len())?;
    let mut best: Option<(T, Vec<T>)> = None;
    for order in permutations(n) {
        let prefix = f.prefix_values(&order);
        let y: Vec<T> = order.iter().enumerate().map(|(k, &j)| t[j] - (prefix[k + 1] - prefix[k])).collect();
        let fit = isotonic_nonincreasing(&y);
        let mut w = vec![T::zero(); n];
        for (k, &j) in order.iter().enumerate() {
            w[j] = if bx.is_infinite() { fit[k] } else { bx.clamp(fit[k]) };
        }
        let value = prox_objective(f, t, bx, &w)?;
        if best.as_ref().is_none_or(|(bv, _)| value < *bv) {
            best = Some((value, w));
        }
    }
    Ok(best.expect("at least one ordering").1)
}

fn grid_axis<T: Scalar>(bx: &EpsilonBox<T>, resolution: T) -> Vec<T> {
    let eps = bx.epsilon();
    let steps = (T::lit(2.0) * eps / resolution).round().to_usize().unwrap_or(0);
    (0..=steps).map(|k| (-eps + T::from_usize_lossy(k) * resolution).min(eps)).collect()
}

/// Grid oracle for the constrained TV problem (`n <= 3`).
///
/// Returns the minimizer of the objective over the grid
/// `{-ε, -ε + h, .., ε}^n` (`h = resolution`). The continuous minimizer is
/// located first by cone enumeration, then the grid is searched exhaustively
/// within two cells of it in every coordinate, which contains the grid
/// point nearest the optimum; the result is within `h √n` of the optimum.
pub fn brute_force_prox<T: Scalar, F: SetFunctionOracle<T> + ?Sized>(
    f: &F,
    t: &[T],
    bx: &EpsilonBox<T>,
    resolution: T,
) -> Result<Vec<T>> {
    let n = f.ground_size();
    guard(n, 3)?;
    check_len(n, t.len())?;
    if bx.is_infinite() || !(bx.epsilon() > T::zero()) {
        return Err(Error::InvalidArgument("grid oracle needs a finite positive box".into()));
    }
    if !(resolution > T::zero()) || resolution > T::lit(1e-2) {
        return Err(Error::InvalidArgument(format!("grid resolution must be in (0, 1e-2], got {resolution}")));
    }
    let exact = cone_enumeration_prox(f, t, bx)?;
    let eps = bx.epsilon();
    let axes: Vec<Vec<T>> = exact
        .iter()
        .map(|&x| {
            let k = ((x + eps) / resolution).round().to_i64().unwrap_or(0);
            (k - 2..=k + 2)
                .filter_map(|c| {
                    let v = -eps + T::from_i64(c)? * resolution;
                    (v >= -eps - resolution * T::lit(1e-9) && v <= eps + resolution * T::lit(1e-9))
                        .then(|| v.max(-eps).min(eps))
                })
                .collect()
        })
        .collect();
    best_on_product(f, t, &axes)
}

/// Fully exhaustive grid search over `{-ε, .., ε}^n`; at most `max_points`
/// grid points are allowed.
pub fn grid_search_prox<T: Scalar, F: SetFunctionOracle<T> + ?Sized>(
    f: &F,
    t: &[T],
    bx: &EpsilonBox<T>,
    resolution: T,
    max_points: usize,
) -> Result<Vec<T>> {
    let n = f.ground_size();
    check_len(n, t.len())?;
    let axis = grid_axis(bx, resolution);
    let points = axis.len().checked_pow(n as u32).unwrap_or(usize::MAX);
    if points > max_points {
        return Err(Error::TooLarge { n: points, limit: max_points });
    }
    best_on_product(f, t, &vec![axis; n])
}

fn best_on_product<T: Scalar, F: SetFunctionOracle<T> + ?Sized>(f: &F, t: &[T], axes: &[Vec<T>]) -> Result<Vec<T>> {
    let n = axes.len();
    let mut idx = vec![0usize; n];
    let mut best: Option<(T, Vec<T>)> = None;
    if axes.iter().any(|a| a.is_empty()) {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    loop {
        let w: Vec<T> = idx.iter().zip(axes).map(|(&i, a)| a[i]).collect();
        let (fw, _) = greedy_lovasz(f, &w)?;
        let value = fw - dot(t, &w) + w.iter().map(|&x| x * x).sum::<T>() / T::lit(2.0);
        if best.as_ref().is_none_or(|(bv, _)| value < *bv) {
            best = Some((value, w));
        }
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }
    Ok(best.expect("nonempty grid").1)
}

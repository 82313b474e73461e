//! Proximal oracles built from discrete minimization calls only.
//!
//! [`divide_and_conquer`] solves the unconstrained problem
//! `min_w f(w) - tᵀw + ½‖w‖²` by splitting on level sets.
//! [`constrained_tv`] adds the box `[-ε, ε]`: two oracle calls fix every
//! coordinate that sits on the boundary of the box, and only the remaining
//! elements go through divide-and-conquer.

use crate::error::{check_len, Error, Result};
use crate::lovasz::{prox_dual_objective, prox_objective, EpsilonBox};
use crate::oracle::{BasePoint, DiscreteMinimum, Provenance, SetFunctionOracle};
use crate::scalar::Scalar;
use crate::set::Subset;

/// Subproblems at least this large are split across threads.
const PARALLEL_SPLIT: usize = 1024;

/// `G(B) = F(A₊ ∪ B) - F(A₊)` on a domain `U` disjoint from `A₊`; every
/// element outside `A₊ ∪ U` is forced out.
#[derive(Debug, Clone)]
pub struct RestrictedFunction<F> {
    function: F,
    anchor: Subset,
    domain: Subset,
    domain_indices: Vec<usize>,
}

impl<F> RestrictedFunction<F> {
    /// Elements of `A₊`, as parent indices.
    pub fn anchor(&self) -> &Subset {
        &self.anchor
    }

    /// `U`, as parent indices.
    pub fn domain(&self) -> &Subset {
        &self.domain
    }

    /// Parent index of each local element.
    pub fn parent_indices(&self) -> &[usize] {
        &self.domain_indices
    }

    pub fn inner(&self) -> &F {
        &self.function
    }

    /// Lifts a local subset to the parent ground set (without the anchor).
    pub fn lift(&self, local: &Subset) -> Subset {
        let mut out = Subset::empty(self.anchor.ground_size());
        for k in local.iter() {
            out.insert(self.domain_indices[k]);
        }
        out
    }
}

/// Builds the restriction used for the interior of the box: domain
/// `A₋ ∖ A₊`, with `A₊` forced in and `V ∖ A₋` forced out.
pub fn restrict_contract<T: Scalar, F: SetFunctionOracle<T>>(
    f: &F,
    a_plus: &Subset,
    a_minus: &Subset,
) -> Result<RestrictedFunction<F>> {
    check_len(f.ground_size(), a_plus.ground_size())?;
    check_len(f.ground_size(), a_minus.ground_size())?;
    if !a_plus.is_subset_of(a_minus) {
        return Err(Error::InvalidArgument("A+ must be contained in A-".into()));
    }
    let domain = a_minus.difference(a_plus);
    Ok(RestrictedFunction {
        function: f.restrict(a_plus, &domain)?,
        anchor: a_plus.clone(),
        domain_indices: domain.indices(),
        domain,
    })
}

impl<T: Scalar, F: SetFunctionOracle<T>> SetFunctionOracle<T> for RestrictedFunction<F> {
    fn ground_size(&self) -> usize {
        self.domain_indices.len()
    }

    fn eval(&self, set: &Subset) -> T {
        self.function.eval(set)
    }

    fn prefix_values(&self, order: &[usize]) -> Vec<T> {
        self.function.prefix_values(order)
    }

    fn minimize(&self, u: &[T]) -> Result<DiscreteMinimum<T>> {
        self.function.minimize(u)
    }

    fn restrict(&self, anchor: &Subset, domain: &Subset) -> Result<Self> {
        let function = self.function.restrict(anchor, domain)?;
        let mut parent_anchor = self.anchor.clone();
        for k in anchor.iter() {
            parent_anchor.insert(self.domain_indices[k]);
        }
        let parent_domain = self.lift(domain);
        Ok(RestrictedFunction {
            function,
            anchor: parent_anchor,
            domain_indices: parent_domain.indices(),
            domain: parent_domain,
        })
    }

    fn boundary_terms(&self) -> Vec<T> {
        self.function.boundary_terms()
    }

    fn name(&self) -> &str {
        self.function.name()
    }
}

/// Primal/dual output of an unconstrained prox solve.
#[derive(Debug, Clone)]
pub struct DivideConquer<T> {
    pub w: Vec<T>,
    pub s: BasePoint<T>,
    pub sfmd_calls: usize,
}

/// Minimizes `g(w) - tᵀw + ½‖w‖²` for a normalized submodular `G`.
///
/// At each node the candidate constant level is `γ = (t(U) - G(U)) / |U|`.
/// If `B = argmin G(B) - t(B) + γ|B|` is empty or all of `U`, the solution
/// on `U` is the constant `γ`; otherwise `B` (restriction) and `U ∖ B`
/// (contraction) are solved independently. Each oracle call either closes a
/// level or splits `U` strictly, so the depth never exceeds `|U|`.
pub fn divide_and_conquer<T: Scalar, G: SetFunctionOracle<T>>(g: &G, t: &[T]) -> Result<DivideConquer<T>> {
    check_len(g.ground_size(), t.len())?;
    let limit = g.ground_size();
    split(g, t, 0, limit)
}

fn split<T: Scalar, G: SetFunctionOracle<T>>(g: &G, t: &[T], depth: usize, limit: usize) -> Result<DivideConquer<T>> {
    let m = g.ground_size();
    if m == 0 {
        return Ok(DivideConquer {
            w: Vec::new(),
            s: BasePoint::new(Vec::new(), Provenance::Assembled),
            sfmd_calls: 0,
        });
    }
    if depth > limit {
        return Err(Error::Consistency(format!("divide-and-conquer depth {depth} exceeds ground size {limit}")));
    }
    let full = g.eval(&Subset::full(m));
    let gamma = (t.iter().copied().sum::<T>() - full) / T::from_usize_lossy(m);
    if !gamma.is_finite() {
        return Err(Error::Numerical("non-finite level in divide-and-conquer".into()));
    }
    let shifted: Vec<T> = t.iter().map(|&x| x - gamma).collect();
    let sol = g.minimize(&shifted)?;
    if sol.set.is_empty() || sol.set.is_full() {
        return Ok(DivideConquer { w: vec![gamma; m], s: sol.certificate, sfmd_calls: 1 });
    }

    let upper = sol.set;
    let lower = upper.complement();
    let g_upper = g.restrict(&Subset::empty(m), &upper)?;
    let g_lower = g.restrict(&upper, &lower)?;
    let t_upper: Vec<T> = upper.iter().map(|j| t[j]).collect();
    let t_lower: Vec<T> = lower.iter().map(|j| t[j]).collect();

    let (a, b) = if m >= PARALLEL_SPLIT {
        rayon::join(|| split(&g_upper, &t_upper, depth + 1, limit), || split(&g_lower, &t_lower, depth + 1, limit))
    } else {
        (split(&g_upper, &t_upper, depth + 1, limit), split(&g_lower, &t_lower, depth + 1, limit))
    };
    let (a, b) = (a?, b?);

    let mut w = vec![T::zero(); m];
    let mut s = vec![T::zero(); m];
    for (k, j) in upper.iter().enumerate() {
        w[j] = a.w[k];
        s[j] = a.s.s[k];
    }
    for (k, j) in lower.iter().enumerate() {
        w[j] = b.w[k];
        s[j] = b.s.s[k];
    }
    Ok(DivideConquer { w, s: BasePoint::new(s, Provenance::Assembled), sfmd_calls: 1 + a.sfmd_calls + b.sfmd_calls })
}

/// Output of [`constrained_tv`].
#[derive(Debug, Clone)]
pub struct ProxResult<T> {
    pub w: Vec<T>,
    pub s: BasePoint<T>,
    pub sfmd_calls: usize,
    /// `f(w) - tᵀw + Σ ψ(w_j)`.
    pub primal_value: T,
    /// `-Σ ψ*(t_j - s_j)`.
    pub dual_value: T,
    /// Elements at `+ε` (empty for an infinite box).
    pub a_plus: Subset,
    /// Complement of the elements at `-ε` (everything for an infinite box).
    pub a_minus: Subset,
}

/// Solves `min_w f(w) - tᵀw + Σ ψ(w_j)` with `ψ` the box-restricted
/// quadratic, returning an optimal primal/dual pair.
///
/// `A₊` (the inclusion-minimal minimizer of `F(A) - t(A) + ε|A|`) gets
/// `w = +ε` and `A₋` (that of `F(A) - t(A) - ε|A|`) bounds the elements
/// not at `-ε`. The flow certificates of the two calls are copied on those
/// regions, and `U = A₋ ∖ A₊` is handed to [`divide_and_conquer`] on the
/// restricted function. When `U` is empty this costs exactly two oracle
/// calls. An infinite box skips the two boundary calls.
pub fn constrained_tv<T: Scalar, F: SetFunctionOracle<T>>(f: &F, t: &[T], bx: &EpsilonBox<T>) -> Result<ProxResult<T>> {
    let n = f.ground_size();
    check_len(n, t.len())?;
    if t.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("non-finite prox input".into()));
    }

    let (w, s, calls, a_plus, a_minus) = if bx.is_infinite() {
        let r = divide_and_conquer(f, t)?;
        (r.w, r.s.s, r.sfmd_calls, Subset::empty(n), Subset::full(n))
    } else {
        let eps = bx.epsilon();
        if !(eps > T::zero()) {
            return Err(Error::InvalidArgument(format!("box half-width must be positive, got {eps}")));
        }
        let plus = f.minimize(&t.iter().map(|&x| x - eps).collect::<Vec<_>>())?;
        let minus = f.minimize(&t.iter().map(|&x| x + eps).collect::<Vec<_>>())?;
        if !plus.set.is_subset_of(&minus.set) {
            return Err(Error::Consistency(format!(
                "boundary minimizers are not nested: A+ = {:?}, A- = {:?}",
                plus.set, minus.set
            )));
        }
        let mut w = vec![T::zero(); n];
        let mut s = vec![T::zero(); n];
        for j in 0..n {
            if plus.set.contains(j) {
                w[j] = eps;
                s[j] = plus.certificate.s[j];
            } else if !minus.set.contains(j) {
                w[j] = -eps;
                s[j] = minus.certificate.s[j];
            }
        }
        let mut calls = 2;
        let interior = minus.set.difference(&plus.set);
        if !interior.is_empty() {
            let g = restrict_contract(f, &plus.set, &minus.set)?;
            let t_u: Vec<T> = g.parent_indices().iter().map(|&j| t[j]).collect();
            let r = divide_and_conquer(&g, &t_u)?;
            calls += r.sfmd_calls;
            let slack = T::feasibility_tol() * (T::one() + eps);
            for (k, &j) in g.parent_indices().iter().enumerate() {
                let v = r.w[k];
                if v > eps + slack || v < -eps - slack {
                    return Err(Error::Consistency(format!("interior prox value {v} outside [-{eps}, {eps}]")));
                }
                w[j] = bx.clamp(v);
                s[j] = r.s.s[k];
            }
        }
        (w, s, calls, plus.set, minus.set)
    };

    let primal_value = prox_objective(f, t, bx, &w)?;
    let dual_value = prox_dual_objective(t, bx, &s);
    let scale = T::one() + primal_value.abs() + dual_value.abs();
    if !(primal_value - dual_value <= T::duality_tol() * scale * T::lit(10.0))
        || !(dual_value - primal_value <= T::duality_tol() * scale * T::lit(10.0))
    {
        return Err(Error::Consistency(format!(
            "prox certificate does not close the duality gap: primal {primal_value}, dual {dual_value}"
        )));
    }
    let total: T = s.iter().copied().sum();
    let fv = f.eval(&Subset::full(n));
    if (total - fv).abs() > T::feasibility_tol() * (T::one() + fv.abs() + T::from_usize_lossy(n)) {
        return Err(Error::Consistency(format!("certificate sums to {total}, F(V) = {fv}")));
    }

    Ok(ProxResult {
        w,
        s: BasePoint::new(s, Provenance::Assembled),
        sfmd_calls: calls,
        primal_value,
        dual_value,
        a_plus,
        a_minus,
    })
}

/// Number of distinct values of `w`, merging values within `1e-10`.
pub fn distinct_levels<T: Scalar>(w: &[T]) -> usize {
    let mut v: Vec<T> = w.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let tol = T::lit(1e-10);
    let mut count = 0;
    let mut last: Option<T> = None;
    for x in v {
        if last.is_none_or(|l| x - l > tol) {
            count += 1;
            last = Some(x);
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brute::{brute_force_prox, check_base_point, is_submodular};
    use crate::cut::CutFunction;
    use crate::lovasz::prox_dual_objective;

    fn chain2() -> CutFunction<f64> {
        CutFunction::chain(&[1.0])
    }

    #[test]
    fn boundary_only_solve() {
        let f = chain2();
        let bx = EpsilonBox::new(0.25).unwrap();
        let r = constrained_tv(&f, &[2.0, -2.0], &bx).unwrap();
        assert_eq!(r.w, vec![0.25, -0.25]);
        assert_eq!(r.s.s, vec![1.0, -1.0]);
        assert_eq!(r.sfmd_calls, 2);
        assert!((r.primal_value + 0.4375).abs() < 1e-12);
        assert!((prox_dual_objective(&[2.0, -2.0], &bx, &r.s.s) + 0.4375).abs() < 1e-12);
        let grid = brute_force_prox(&f, &[2.0, -2.0], &bx, 1e-3).unwrap();
        assert!((grid[0] - 0.25).abs() < 1e-9 && (grid[1] + 0.25).abs() < 1e-9);
    }

    #[test]
    fn zero_input() {
        let f = chain2();
        let bx = EpsilonBox::new(0.25).unwrap();
        let r = constrained_tv(&f, &[0.0, 0.0], &bx).unwrap();
        assert!(r.a_plus.is_empty());
        assert!(r.a_minus.is_full());
        assert_eq!(r.w, vec![0.0, 0.0]);
        assert_eq!(r.sfmd_calls, 3);
    }

    #[test]
    fn modular_function_clamps() {
        let m: Vec<f64> = vec![0.3, -0.1, 0.05, -2.0];
        let f = CutFunction::modular(m.clone()).unwrap();
        let t: [f64; 4] = [0.0, 0.4, -0.2, 1.0];
        let bx = EpsilonBox::new(0.25).unwrap();
        let r = constrained_tv(&f, &t, &bx).unwrap();
        for j in 0..4 {
            assert!((r.w[j] - (t[j] - m[j]).clamp(-0.25, 0.25)).abs() < 1e-12);
        }
    }

    #[test]
    fn dnc_examples() {
        let f = chain2();
        let r = divide_and_conquer(&f, &[2.0, -2.0]).unwrap();
        assert_eq!(r.w, vec![1.0, -1.0]);
        assert!(r.sfmd_calls <= 3);
        for c in [-1.3, 0.0, 0.7] {
            let r = divide_and_conquer(&f, &[c, c]).unwrap();
            assert_eq!(r.w, vec![c, c]);
            assert_eq!(r.sfmd_calls, 1);
        }
        let single = CutFunction::modular(vec![0.0]).unwrap();
        let r = divide_and_conquer(&single, &[0.7]).unwrap();
        assert_eq!(r.w, vec![0.7]);
    }

    #[test]
    fn restriction_examples() {
        let f: CutFunction<f64> = CutFunction::chain(&[1.0, 1.0]);
        let a_plus = Subset::from_indices(3, &[0]).unwrap();
        let g = restrict_contract(&f, &a_plus, &Subset::full(3)).unwrap();
        assert_eq!(g.parent_indices(), &[1, 2]);
        assert_eq!(g.eval(&Subset::empty(2)), 0.0);
        assert_eq!(g.eval(&Subset::from_indices(2, &[0]).unwrap()), 0.0);
        assert_eq!(g.eval(&Subset::full(2)), -1.0);
        assert!(is_submodular(&g, 1e-12).unwrap());

        let g = restrict_contract(&f, &a_plus, &a_plus).unwrap();
        assert_eq!(g.ground_size(), 0);

        let g = restrict_contract(&f, &Subset::empty(3), &Subset::full(3)).unwrap();
        for mask in 0..8 {
            let s = Subset::from_mask(3, mask);
            assert_eq!(g.eval(&s), f.eval(&s));
        }

        let bad = restrict_contract(&f, &Subset::full(3), &a_plus);
        assert!(matches!(bad, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn nested_restriction_tracks_parent_indices() {
        let f: CutFunction<f64> = CutFunction::chain(&[1.0, 2.0, 3.0, 4.0]);
        let g = restrict_contract(&f, &Subset::from_indices(5, &[0]).unwrap(), &Subset::full(5)).unwrap();
        // inside g (elements 1..4), force local 0 (= parent 1) in, keep local 2,3
        let h =
            g.restrict(&Subset::from_indices(4, &[0]).unwrap(), &Subset::from_indices(4, &[2, 3]).unwrap()).unwrap();
        assert_eq!(h.anchor().indices(), vec![0, 1]);
        assert_eq!(h.parent_indices(), &[3, 4]);
        let anchor = Subset::from_indices(5, &[0, 1]).unwrap();
        for mask in 0..4u64 {
            let local = Subset::from_mask(2, mask);
            let lifted = h.lift(&local).union(&anchor);
            assert_eq!(h.eval(&local), f.eval(&lifted) - f.eval(&anchor));
        }
    }

    #[test]
    fn dnc_certificate_is_feasible() {
        let f = CutFunction::undirected(
            4,
            &[(0, 1, 1.0), (1, 2, 0.5), (2, 3, 2.0), (0, 3, 0.25)],
            vec![0.1, -0.4, 0.3, 0.0],
        )
        .unwrap();
        let t: [f64; 4] = [0.9, -0.3, 0.2, -1.1];
        let r = divide_and_conquer(&f, &t).unwrap();
        assert!(check_base_point(&f, &r.s.s, 1e-9).passed());
        for j in 0..4 {
            assert!((r.s.s[j] - (t[j] - r.w[j])).abs() < 1e-9);
        }
        assert!(r.sfmd_calls <= 2 * distinct_levels(&r.w));
    }
}

use crate::error::{check_len, Error, Result};
use crate::lovasz::{greedy_lovasz, EpsilonBox};
use crate::oracle::{BasePoint, SetFunctionOracle};
use crate::prox::{constrained_tv, ProxResult};
use crate::scalar::Scalar;
use crate::set::Subset;

use super::decomposition::Decomposition;

/// Dual iterate `(s_1, .., s_r)` together with the latest certificates
/// `t_i ∈ B(F_i)` and the primal point `w = -Σ s_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualState<T> {
    pub s: Vec<Vec<T>>,
    pub t_cert: Vec<BasePoint<T>>,
    pub w: Vec<T>,
    /// Previous value of the extrapolated block (accelerated solver only).
    pub momentum_prev: Option<Vec<T>>,
}

impl<T: Scalar> DualState<T> {
    /// `s = 0`, `w = 0`, certificates from the greedy algorithm at `w = 0`.
    pub fn initial<F: SetFunctionOracle<T>>(d: &Decomposition<T, F>) -> Result<Self> {
        let n = d.ground_size();
        let zero = vec![T::zero(); n];
        let t_cert =
            d.summands().iter().map(|f| greedy_lovasz(f, &zero).map(|(_, s)| s)).collect::<Result<Vec<_>>>()?;
        Ok(DualState { s: vec![zero.clone(); d.len()], t_cert, w: zero, momentum_prev: None })
    }

    pub fn recompute_w(&mut self) {
        let n = self.w.len();
        let mut w = vec![T::zero(); n];
        for s in &self.s {
            for (acc, &x) in w.iter_mut().zip(s) {
                *acc = *acc + x;
            }
        }
        for x in &mut w {
            *x = -*x;
        }
        self.w = w;
    }

    /// `Σ_i t_i`, a point of `B(F)`.
    pub fn certificate_sum(&self) -> BasePoint<T> {
        BasePoint::sum(&self.t_cert, self.w.len())
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.s.iter().flatten().chain(&self.w).all(|x| x.is_finite())
    }
}

/// `-Σ_{j≠i} s_j`, summed in ascending `j`.
pub(crate) fn others<T: Scalar>(s: &[Vec<T>], i: usize) -> Vec<T> {
    let n = s[0].len();
    let mut z = vec![T::zero(); n];
    for (j, sj) in s.iter().enumerate() {
        if j == i {
            continue;
        }
        for (acc, &x) in z.iter_mut().zip(sj) {
            *acc = *acc + x;
        }
    }
    for x in &mut z {
        *x = -*x;
    }
    z
}

/// `argmax_s -g_i*(s) - ½‖s - z‖² = z - prox_{g_i}(z)`.
pub(crate) fn prox_step<T: Scalar, F: SetFunctionOracle<T>>(
    f: &F,
    z: &[T],
    bx: &EpsilonBox<T>,
) -> Result<(Vec<T>, ProxResult<T>)> {
    let prox = constrained_tv(f, z, bx)?;
    let s = z.iter().zip(&prox.w).map(|(&a, &b)| a - b).collect();
    Ok((s, prox))
}

/// Exact maximization over block `i`: `s_i ← z - prox_{g_i}(z)` with
/// `z = -Σ_{j≠i} s_j`. Updates `t_i` and `w`; returns the prox solve.
pub fn bcd_step<T: Scalar, F: SetFunctionOracle<T>>(
    d: &Decomposition<T, F>,
    state: &mut DualState<T>,
    i: usize,
    bx: &EpsilonBox<T>,
) -> Result<ProxResult<T>> {
    if i >= d.len() {
        return Err(Error::InvalidArgument(format!("summand index {i} out of range for {} summands", d.len())));
    }
    check_len(d.len(), state.s.len())?;
    let z = others(&state.s, i);
    let (s_new, prox) = prox_step(d.summand(i), &z, bx)?;
    state.s[i] = s_new;
    state.t_cert[i] = prox.s.clone();
    state.recompute_w();
    Ok(prox)
}

/// `g*(s)` for `g` the Lovász extension of `F` restricted to the box:
/// `ε` times the ℓ1 distance from `s` to `B(F)`, which equals
/// `ε [F(V) - s(V) - 2 min_A (F(A) - s(A))]`. For an infinite box this is
/// the indicator of `B(F)` (0 or `+∞`). Costs one oracle call.
pub fn conjugate_value<T: Scalar, F: SetFunctionOracle<T> + ?Sized>(f: &F, s: &[T], bx: &EpsilonBox<T>) -> Result<T> {
    let n = f.ground_size();
    check_len(n, s.len())?;
    let fv = f.eval(&Subset::full(n));
    let sv: T = s.iter().copied().sum();
    let min = f.minimize(s)?.value.min(T::zero());
    if bx.is_infinite() {
        let tol = T::feasibility_tol() * (T::one() + fv.abs() + s.iter().map(|x| x.abs()).sum::<T>());
        return Ok(if min >= -tol && (fv - sv).abs() <= tol { T::zero() } else { T::infinity() });
    }
    Ok(bx.epsilon() * (fv - sv - min - min))
}

/// `-Σ_i g_i*(s_i) - ½‖Σ_i s_i‖²`.
pub fn dual_objective<T: Scalar, F: SetFunctionOracle<T>>(
    d: &Decomposition<T, F>,
    s: &[Vec<T>],
    bx: &EpsilonBox<T>,
) -> Result<T> {
    check_len(d.len(), s.len())?;
    let mut total = vec![T::zero(); d.ground_size()];
    let mut conj = T::zero();
    for (f, si) in d.summands().iter().zip(s) {
        conj = conj + conjugate_value(f, si, bx)?;
        for (acc, &x) in total.iter_mut().zip(si) {
            *acc = *acc + x;
        }
    }
    let sq: T = total.iter().map(|&x| x * x).sum();
    Ok(-conj - sq / T::lit(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::CutFunction;

    fn fixture() -> Decomposition<f64> {
        Decomposition::new(vec![CutFunction::chain(&[1.0]), CutFunction::modular(vec![1.0, -1.0]).unwrap()]).unwrap()
    }

    #[test]
    fn step_examples() {
        let d = fixture();
        let bx = EpsilonBox::new(0.25).unwrap();
        let mut st = DualState::initial(&d).unwrap();
        bcd_step(&d, &mut st, 0, &bx).unwrap();
        assert_eq!(st.s[0], vec![0.0, 0.0]);
        bcd_step(&d, &mut st, 1, &bx).unwrap();
        assert_eq!(st.s[1], vec![0.25, -0.25]);
        assert_eq!(st.w, vec![-0.25, 0.25]);
    }

    #[test]
    fn fixed_point_at_optimum() {
        let d = fixture();
        let bx = EpsilonBox::new(0.25).unwrap();
        let mut st = DualState::initial(&d).unwrap();
        for _ in 0..200 {
            bcd_step(&d, &mut st, 0, &bx).unwrap();
            bcd_step(&d, &mut st, 1, &bx).unwrap();
        }
        let before = st.clone();
        bcd_step(&d, &mut st, 0, &bx).unwrap();
        bcd_step(&d, &mut st, 1, &bx).unwrap();
        for (a, b) in before.s.iter().flatten().zip(st.s.iter().flatten()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn conjugate_is_scaled_l1_distance() {
        // B(F) of the 2-chain is the segment {(a, -a) : |a| <= 1}
        let f: CutFunction<f64> = CutFunction::chain(&[1.0]);
        let bx = EpsilonBox::new(0.5).unwrap();
        assert_eq!(conjugate_value(&f, &[0.5, -0.5], &bx).unwrap(), 0.0);
        assert!((conjugate_value(&f, &[2.0, -2.0], &bx).unwrap() - 0.5 * 2.0).abs() < 1e-12);
        assert!((conjugate_value(&f, &[0.3, 0.0], &bx).unwrap() - 0.5 * 0.3).abs() < 1e-12);
        let inf = EpsilonBox::infinite();
        assert_eq!(conjugate_value(&f, &[0.5, -0.5], &inf).unwrap(), 0.0);
        assert!(conjugate_value(&f, &[2.0, -2.0], &inf).unwrap().is_infinite());
    }

    #[test]
    fn dual_never_decreases_on_fixture() {
        let d = fixture();
        let bx = EpsilonBox::new(0.25).unwrap();
        let mut st = DualState::initial(&d).unwrap();
        let mut last = dual_objective(&d, &st.s, &bx).unwrap();
        for k in 0..20 {
            bcd_step(&d, &mut st, k % 2, &bx).unwrap();
            let now = dual_objective(&d, &st.s, &bx).unwrap();
            assert!(now >= last - 1e-12);
            last = now;
        }
    }
}

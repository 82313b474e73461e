use crate::error::{check_len, Result};
use crate::lovasz::greedy_order;
use crate::oracle::{BasePoint, SetFunctionOracle};
use crate::scalar::Scalar;
use crate::set::{negative_part_sum, Subset};

use super::decomposition::Decomposition;

/// Best suplevel set of a primal point and its certified gap.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundedSet<T> {
    pub set: Subset,
    /// `F(set)`.
    pub value: T,
    /// `F(set) - u_-(V)`.
    pub gap: T,
}

/// Evaluates `F` on `∅` and on every suplevel set `{w ≥ α}`, `α` ranging
/// over the distinct values of `w`, and keeps the smallest value (ties go to
/// the smaller set).
pub fn round_to_set<T: Scalar, F: SetFunctionOracle<T>>(
    d: &Decomposition<T, F>,
    w: &[T],
    u: &BasePoint<T>,
) -> Result<RoundedSet<T>> {
    let n = d.ground_size();
    check_len(n, w.len())?;
    check_len(n, u.len())?;
    let order = greedy_order(w);
    let prefix = d.prefix_values(&order);
    let mut best_k = 0;
    let mut best = prefix[0];
    for k in 1..=n {
        let boundary = k == n || w[order[k]] < w[order[k - 1]];
        if boundary && prefix[k] < best {
            best = prefix[k];
            best_k = k;
        }
    }
    let set = Subset::from_indices(n, &order[..best_k])?;
    Ok(RoundedSet { set, value: best, gap: best - negative_part_sum(&u.s) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::CutFunction;
    use crate::oracle::Provenance;

    #[test]
    fn chain_examples() {
        let d = Decomposition::new(vec![CutFunction::chain(&[1.0]), CutFunction::modular(vec![0.0, 0.0]).unwrap()])
            .unwrap();
        let u = BasePoint::new(vec![0.0, 0.0], Provenance::Assembled);
        let r = round_to_set(&d, &[0.25, -0.25], &u).unwrap();
        assert!(r.set.is_empty());
        assert_eq!(r.gap, 0.0);
        let r = round_to_set(&d, &[0.1, 0.1], &u).unwrap();
        assert!(r.set.is_empty());
    }

    #[test]
    fn indicator_shaped_point() {
        let d = Decomposition::new(vec![CutFunction::chain(&[1.0]), CutFunction::modular(vec![-2.0, 1.5]).unwrap()])
            .unwrap();
        let u = BasePoint::new(vec![-1.0, 0.5], Provenance::Assembled);
        let r = round_to_set(&d, &[0.25, -0.25], &u).unwrap();
        assert_eq!(r.set.indices(), vec![0]);
        assert_eq!(r.value, -1.0);
        assert_eq!(r.gap, 0.0);
    }

    #[test]
    fn constant_point_only_tests_empty_and_full() {
        let d = Decomposition::new(vec![
            CutFunction::chain(&[1.0, 1.0]),
            CutFunction::modular(vec![-1.0, 5.0, -1.0]).unwrap(),
        ])
        .unwrap();
        let u = BasePoint::new(vec![0.0; 3], Provenance::Assembled);
        // {0} and {0, 2} would be better but are not suplevel sets of a constant
        let r = round_to_set(&d, &[0.3; 3], &u).unwrap();
        assert!(r.set.is_empty());
        assert_eq!(r.value, 0.0);
    }
}

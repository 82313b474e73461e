//! Subsets of a ground set `{0, .., n-1}` and modular vectors over it.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Membership bitmap over a ground set of fixed size.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Subset {
    members: Vec<bool>,
}

impl Subset {
    pub fn empty(n: usize) -> Self {
        Subset { members: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        Subset { members: vec![true; n] }
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut set = Subset::empty(n);
        for &i in indices {
            if i >= n {
                return Err(Error::InvalidArgument(format!("element {i} outside ground set of {n}")));
            }
            set.members[i] = true;
        }
        Ok(set)
    }

    pub fn from_members(members: Vec<bool>) -> Self {
        Subset { members }
    }

    /// Bit `j` of `mask` is membership of element `j`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Subset { members: (0..n).map(|j| mask >> j & 1 == 1).collect() }
    }

    pub fn ground_size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.members[j]
    }

    pub fn insert(&mut self, j: usize) {
        self.members[j] = true;
    }

    pub fn remove(&mut self, j: usize) {
        self.members[j] = false;
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&b| b)
    }

    pub fn is_full(&self) -> bool {
        self.members.iter().all(|&b| b)
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j)
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.members.iter().zip(&other.members).all(|(&a, &b)| !a || b)
    }

    pub fn is_disjoint(&self, other: &Subset) -> bool {
        self.members.iter().zip(&other.members).all(|(&a, &b)| !(a && b))
    }

    pub fn union(&self, other: &Subset) -> Subset {
        Subset { members: self.members.iter().zip(&other.members).map(|(&a, &b)| a || b).collect() }
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        Subset { members: self.members.iter().zip(&other.members).map(|(&a, &b)| a && b).collect() }
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        Subset { members: self.members.iter().zip(&other.members).map(|(&a, &b)| a && !b).collect() }
    }

    pub fn complement(&self) -> Subset {
        Subset { members: self.members.iter().map(|&a| !a).collect() }
    }

    /// Mask representation; only meaningful for ground sets of at most 64.
    pub fn to_mask(&self) -> u64 {
        self.iter().fold(0u64, |m, j| m | 1 << j)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// `u(A) = sum of u_j over j in A`.
pub fn modular_value<T: Scalar>(u: &[T], set: &Subset) -> T {
    set.iter().map(|j| u[j]).sum()
}

/// `s_-(V) = sum_j min(s_j, 0)`.
pub fn negative_part_sum<T: Scalar>(s: &[T]) -> T {
    s.iter().map(|&x| x.min(T::zero())).sum()
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = Subset::from_indices(4, &[0, 2]).unwrap();
        let b = Subset::from_indices(4, &[2, 3]).unwrap();
        assert_eq!(a.union(&b).indices(), vec![0, 2, 3]);
        assert_eq!(a.intersection(&b).indices(), vec![2]);
        assert_eq!(a.difference(&b).indices(), vec![0]);
        assert_eq!(a.complement().indices(), vec![1, 3]);
        assert!(Subset::empty(4).is_subset_of(&a));
        assert!(!a.is_subset_of(&b));
        assert_eq!(Subset::from_mask(4, a.to_mask()), a);
        assert!(Subset::from_indices(4, &[4]).is_err());
    }

    #[test]
    fn modular_sums() {
        let u = [0.5, -0.3, 2.0];
        let a = Subset::from_indices(3, &[0, 1]).unwrap();
        assert!((modular_value(&u, &a) - 0.2f64).abs() < 1e-15);
        assert_eq!(negative_part_sum(&u), -0.3);
    }
}

//! Finite abelian groups presented as products of cyclic groups.
//!
//! Elements are addressed by a flat index in `[0, N)` using row-major
//! mixed-radix order: the last factor varies fastest. Hot loops work on flat
//! indices through [`Group::add_flat`] and friends; [`GroupElem`] carries the
//! coordinates as well for user-facing code.

mod enumerate;
mod set;
mod subgroup;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

pub use enumerate::{enumerate_subgroups, enumerate_subgroups_with, EnumerationLimits};
pub use set::{symmetric_difference, GroupSet};
pub use subgroup::{quotient_map, subgroup_closure, Coset, QuotientMap, Subgroup};

/// Largest group order accepted by [`make_group`].
pub const DEFAULT_ORDER_CAP: usize = 1 << 20;

/// A finite abelian group `Z_{n_1} x ... x Z_{n_k}`.
///
/// Cloning is cheap; the moduli are shared.
#[derive(Clone)]
pub struct Group {
    moduli: Arc<[usize]>,
    strides: Arc<[usize]>,
    order: usize,
    // every modulus is 1 or 2, so flat addition is XOR
    binary: bool,
}

impl Group {
    /// Builds a group under [`DEFAULT_ORDER_CAP`].
    pub fn new(moduli: &[usize]) -> Result<Group> {
        Group::with_order_cap(moduli, DEFAULT_ORDER_CAP)
    }

    pub fn with_order_cap(moduli: &[usize], cap: usize) -> Result<Group> {
        if moduli.is_empty() {
            return Err(Error::NoFactors);
        }
        let mut order: u128 = 1;
        for (position, &n) in moduli.iter().enumerate() {
            if n == 0 {
                return Err(Error::InvalidModulus { position, value: 0 });
            }
            order = order.saturating_mul(n as u128);
        }
        if order > cap as u128 {
            return Err(Error::OrderCapExceeded { order, cap });
        }
        let mut strides = vec![1usize; moduli.len()];
        for i in (0..moduli.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * moduli[i + 1];
        }
        Ok(Group {
            moduli: moduli.into(),
            strides: strides.into(),
            order: order as usize,
            binary: moduli.iter().all(|&n| n <= 2),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn moduli(&self) -> &[usize] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Product of `k` copies of `Z_n`.
    pub fn power(n: usize, k: usize) -> Result<Group> {
        Group::new(&vec![n; k])
    }

    pub fn coords_of(&self, flat: usize) -> Vec<usize> {
        assert!(flat < self.order, "flat index {flat} out of range");
        self.moduli
            .iter()
            .zip(self.strides.iter())
            .map(|(&n, &s)| (flat / s) % n)
            .collect()
    }

    pub fn flat_of(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: coords.len(),
            });
        }
        let mut flat = 0;
        for (axis, ((&c, &n), &s)) in coords
            .iter()
            .zip(self.moduli.iter())
            .zip(self.strides.iter())
            .enumerate()
        {
            if c >= n {
                return Err(Error::CoordinateOutOfRange {
                    axis,
                    value: c as i128,
                    modulus: n,
                });
            }
            flat += c * s;
        }
        Ok(flat)
    }

    pub fn elem(&self, coords: &[usize]) -> Result<GroupElem> {
        let flat = self.flat_of(coords)?;
        Ok(GroupElem {
            flat,
            coords: coords.to_vec(),
        })
    }

    /// Panics if `flat >= order`.
    pub fn element(&self, flat: usize) -> GroupElem {
        GroupElem {
            flat,
            coords: self.coords_of(flat),
        }
    }

    pub fn zero(&self) -> GroupElem {
        self.element(0)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElem> + '_ {
        (0..self.order).map(move |i| self.element(i))
    }

    pub fn contains(&self, a: &GroupElem) -> bool {
        a.coords.len() == self.rank()
            && a.coords.iter().zip(self.moduli.iter()).all(|(&c, &n)| c < n)
            && self.flat_of(&a.coords).map_or(false, |f| f == a.flat)
    }

    fn check(&self, a: &GroupElem) -> Result<()> {
        if a.coords.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: a.coords.len(),
            });
        }
        if !self.contains(a) {
            return Err(Error::GroupMismatch {
                left: self.to_string(),
                right: format!("element ({a})"),
            });
        }
        Ok(())
    }

    pub fn add(&self, a: &GroupElem, b: &GroupElem) -> Result<GroupElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.element(self.add_flat(a.flat, b.flat)))
    }

    pub fn neg(&self, a: &GroupElem) -> Result<GroupElem> {
        self.check(a)?;
        Ok(self.element(self.neg_flat(a.flat)))
    }

    pub fn sub(&self, a: &GroupElem, b: &GroupElem) -> Result<GroupElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.element(self.sub_flat(a.flat, b.flat)))
    }

    #[inline]
    pub fn add_flat(&self, a: usize, b: usize) -> usize {
        if self.binary {
            return a ^ b;
        }
        let (mut x, mut y, mut out) = (a, b, 0);
        for (&n, &s) in self.moduli.iter().zip(self.strides.iter()).rev() {
            let d = x % n + y % n;
            let d = if d >= n { d - n } else { d };
            out += d * s;
            x /= n;
            y /= n;
        }
        out
    }

    #[inline]
    pub fn neg_flat(&self, a: usize) -> usize {
        if self.binary {
            return a;
        }
        let (mut x, mut out) = (a, 0);
        for (&n, &s) in self.moduli.iter().zip(self.strides.iter()).rev() {
            let d = x % n;
            let d = if d == 0 { 0 } else { n - d };
            out += d * s;
            x /= n;
        }
        out
    }

    #[inline]
    pub fn sub_flat(&self, a: usize, b: usize) -> usize {
        self.add_flat(a, self.neg_flat(b))
    }

    /// `k * a` by doubling.
    pub fn mul_flat(&self, mut k: usize, a: usize) -> usize {
        let (mut acc, mut base) = (0, a);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_flat(acc, base);
            }
            base = self.add_flat(base, base);
            k >>= 1;
        }
        acc
    }

    pub(crate) fn require_same(&self, other: &Group) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GroupMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

/// Builds a group from possibly signed moduli, rejecting non-positive ones.
pub fn make_group(moduli: &[i64]) -> Result<Group> {
    let mut out = Vec::with_capacity(moduli.len());
    for (position, &m) in moduli.iter().enumerate() {
        if m < 1 {
            return Err(Error::InvalidModulus {
                position,
                value: m as i128,
            });
        }
        out.push(usize::try_from(m).map_err(|_| Error::OrderCapExceeded {
            order: m as u128,
            cap: DEFAULT_ORDER_CAP,
        })?);
    }
    Group::new(&out)
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.moduli, &other.moduli) || self.moduli == other.moduli
    }
}

impl Eq for Group {}

impl Hash for Group {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.moduli.hash(state);
    }
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({self})")
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.moduli.iter().map(|n| n.to_string()).collect();
        f.write_str(&parts.join("x"))
    }
}

/// An element of a [`Group`], carried both as flat index and coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElem {
    flat: usize,
    coords: Vec<usize>,
}

impl GroupElem {
    pub fn flat(&self) -> usize {
        self.flat
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

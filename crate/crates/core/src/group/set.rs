use std::cmp::Ordering;
use std::fmt;

use fixedbitset::FixedBitSet;

use super::{Group, GroupElem};
use crate::error::Result;
#[cfg(test)]
use crate::error::Error;

/// A subset of a finite group, stored as a dense membership mask over flat
/// indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupSet {
    group: Group,
    members: FixedBitSet,
    size: usize,
}

impl GroupSet {
    pub fn empty(group: &Group) -> GroupSet {
        GroupSet {
            group: group.clone(),
            members: FixedBitSet::with_capacity(group.order()),
            size: 0,
        }
    }

    pub fn full(group: &Group) -> GroupSet {
        let mut members = FixedBitSet::with_capacity(group.order());
        members.insert_range(..);
        GroupSet {
            group: group.clone(),
            members,
            size: group.order(),
        }
    }

    /// Panics on an index outside the group.
    pub fn from_flats<I: IntoIterator<Item = usize>>(group: &Group, flats: I) -> GroupSet {
        let mut set = GroupSet::empty(group);
        for f in flats {
            set.insert(f);
        }
        set
    }

    pub fn from_elements<'a, I>(group: &Group, elems: I) -> Result<GroupSet>
    where
        I: IntoIterator<Item = &'a GroupElem>,
    {
        let mut set = GroupSet::empty(group);
        for e in elems {
            group.check(e)?;
            set.insert(e.flat());
        }
        Ok(set)
    }

    pub(crate) fn from_mask(group: &Group, members: FixedBitSet) -> GroupSet {
        debug_assert_eq!(members.len(), group.order());
        let size = members.count_ones(..);
        GroupSet {
            group: group.clone(),
            members,
            size,
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn mask(&self) -> &FixedBitSet {
        &self.members
    }

    #[inline]
    pub fn contains(&self, flat: usize) -> bool {
        self.members.contains(flat)
    }

    pub fn contains_elem(&self, e: &GroupElem) -> bool {
        self.group.contains(e) && self.members.contains(e.flat())
    }

    /// Returns whether the element was newly added.
    pub fn insert(&mut self, flat: usize) -> bool {
        assert!(flat < self.group.order(), "flat index {flat} out of range");
        let fresh = !self.members.put(flat);
        if fresh {
            self.size += 1;
        }
        fresh
    }

    /// Returns whether the element was present.
    pub fn remove(&mut self, flat: usize) -> bool {
        let present = flat < self.group.order() && self.members.contains(flat);
        if present {
            self.members.set(flat, false);
            self.size -= 1;
        }
        present
    }

    /// Member flat indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.members.ones().collect()
    }

    pub fn elements(&self) -> Vec<GroupElem> {
        self.iter().map(|f| self.group.element(f)).collect()
    }

    pub fn min_flat(&self) -> Option<usize> {
        self.members.minimum()
    }

    pub fn union(&self, other: &GroupSet) -> Result<GroupSet> {
        self.group.require_same(&other.group)?;
        let mut m = self.members.clone();
        m.union_with(&other.members);
        Ok(GroupSet::from_mask(&self.group, m))
    }

    pub fn intersection(&self, other: &GroupSet) -> Result<GroupSet> {
        self.group.require_same(&other.group)?;
        let mut m = self.members.clone();
        m.intersect_with(&other.members);
        Ok(GroupSet::from_mask(&self.group, m))
    }

    pub fn difference(&self, other: &GroupSet) -> Result<GroupSet> {
        self.group.require_same(&other.group)?;
        let mut m = self.members.clone();
        m.difference_with(&other.members);
        Ok(GroupSet::from_mask(&self.group, m))
    }

    pub fn symmetric_difference(&self, other: &GroupSet) -> Result<GroupSet> {
        self.group.require_same(&other.group)?;
        let mut m = self.members.clone();
        m.symmetric_difference_with(&other.members);
        Ok(GroupSet::from_mask(&self.group, m))
    }

    /// `|self Δ other|` without materializing the set.
    pub fn symmetric_difference_len(&self, other: &GroupSet) -> Result<usize> {
        self.group.require_same(&other.group)?;
        Ok(self.members.symmetric_difference_count(&other.members))
    }

    pub fn intersection_len(&self, other: &GroupSet) -> Result<usize> {
        self.group.require_same(&other.group)?;
        Ok(self.members.intersection_count(&other.members))
    }

    pub fn is_subset(&self, other: &GroupSet) -> bool {
        self.group == other.group && self.members.is_subset(&other.members)
    }

    pub fn complement(&self) -> GroupSet {
        let mut m = self.members.clone();
        m.toggle_range(..);
        GroupSet::from_mask(&self.group, m)
    }

    /// `self + {x}`.
    pub fn translate(&self, x: usize) -> GroupSet {
        GroupSet::from_flats(&self.group, self.iter().map(|a| self.group.add_flat(a, x)))
    }
}

/// `(a \ b) ∪ (b \ a)`.
pub fn symmetric_difference(a: &GroupSet, b: &GroupSet) -> Result<GroupSet> {
    a.symmetric_difference(b)
}

impl PartialOrd for GroupSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by group, then size, then the ascending member lists
/// lexicographically.
impl Ord for GroupSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.group
            .moduli()
            .cmp(other.group.moduli())
            .then(self.size.cmp(&other.size))
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl fmt::Debug for GroupSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSet[{}]{{", self.group)?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if i == 16 {
                write!(f, "... ({} total)", self.size)?;
                break;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

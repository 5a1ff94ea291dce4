use std::collections::VecDeque;
use std::fmt;

use super::{Group, GroupElem, GroupSet};
use crate::error::{Error, Result};

/// A subgroup `H ≤ G`. Closure is verified on construction.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    members: GroupSet,
}

impl Subgroup {
    /// Checks that `set` contains zero and is closed under addition and
    /// negation.
    pub fn from_set(set: GroupSet) -> Result<Subgroup> {
        let g = set.group().clone();
        if !set.contains(0) {
            return Err(Error::NotASubgroup("does not contain zero".into()));
        }
        let elems = set.to_vec();
        for &a in &elems {
            if !set.contains(g.neg_flat(a)) {
                return Err(Error::NotASubgroup(format!(
                    "missing the inverse of {}",
                    g.element(a)
                )));
            }
            for &b in &elems {
                if !set.contains(g.add_flat(a, b)) {
                    return Err(Error::NotASubgroup(format!(
                        "{} + {} is missing",
                        g.element(a),
                        g.element(b)
                    )));
                }
            }
        }
        Ok(Subgroup { members: set })
    }

    /// Caller guarantees closure; checked in debug builds for small sets.
    pub(crate) fn from_closed(set: GroupSet) -> Subgroup {
        #[cfg(debug_assertions)]
        if set.len() <= 64 {
            let checked = Subgroup::from_set(set.clone());
            debug_assert!(checked.is_ok(), "{:?}", checked.err());
        }
        Subgroup { members: set }
    }

    pub fn trivial(group: &Group) -> Subgroup {
        Subgroup {
            members: GroupSet::from_flats(group, [0]),
        }
    }

    pub fn full(group: &Group) -> Subgroup {
        Subgroup {
            members: GroupSet::full(group),
        }
    }

    pub fn group(&self) -> &Group {
        self.members.group()
    }

    pub fn members(&self) -> &GroupSet {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    /// `N / |H|`.
    pub fn index(&self) -> usize {
        self.group().order() / self.order()
    }

    pub fn contains(&self, flat: usize) -> bool {
        self.members.contains(flat)
    }

    /// The coset `H + {x}`, canonicalized to its minimal flat index.
    pub fn coset_of(&self, x: usize) -> Coset {
        let g = self.group();
        let rep = self
            .members
            .iter()
            .map(|h| g.add_flat(x, h))
            .min()
            .expect("subgroup is non-empty");
        Coset {
            subgroup: self.clone(),
            rep,
        }
    }

    /// A generating set built greedily: repeatedly take the smallest member
    /// outside the span so far.
    pub fn generators(&self) -> Vec<GroupElem> {
        let g = self.group();
        let mut span = Subgroup::trivial(g);
        let mut gens = Vec::new();
        while span.order() < self.order() {
            let next = self
                .members
                .iter()
                .find(|&h| !span.contains(h))
                .expect("span is a proper subgroup");
            gens.push(next);
            span = join_element(&span, next);
        }
        gens.into_iter().map(|f| g.element(f)).collect()
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(order {}, {:?})", self.order(), self.members)
    }
}

/// `<H, x>`, built as the union of the cosets `H + kx` for `k` below the
/// order of `x` modulo `H`.
pub(crate) fn join_element(h: &Subgroup, x: usize) -> Subgroup {
    let g = h.group();
    let base = h.members.to_vec();
    let mut out = h.members.clone();
    let mut step = x;
    while !h.contains(step) {
        for &b in &base {
            out.insert(g.add_flat(b, step));
        }
        step = g.add_flat(step, x);
    }
    Subgroup { members: out }
}

/// Smallest subgroup containing `generators`, by breadth-first closure under
/// adding each generator.
pub fn subgroup_closure(group: &Group, generators: &[GroupElem]) -> Result<Subgroup> {
    for x in generators {
        group.check(x)?;
    }
    let gens: Vec<usize> = generators.iter().map(|x| x.flat()).collect();
    let mut set = GroupSet::from_flats(group, [0]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for &s in &gens {
            let y = group.add_flat(x, s);
            if set.insert(y) {
                queue.push_back(y);
            }
        }
    }
    Ok(Subgroup::from_closed(set))
}

/// A coset `H + {rep}` with `rep` the minimal flat index in the coset.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coset {
    subgroup: Subgroup,
    rep: usize,
}

impl Coset {
    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn rep(&self) -> GroupElem {
        self.subgroup.group().element(self.rep)
    }

    pub fn rep_flat(&self) -> usize {
        self.rep
    }

    pub fn members(&self) -> GroupSet {
        self.subgroup.members.translate(self.rep)
    }

    pub fn contains(&self, flat: usize) -> bool {
        let g = self.subgroup.group();
        self.subgroup.contains(g.sub_flat(flat, self.rep))
    }
}

impl fmt::Debug for Coset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coset(H of order {} + {})", self.subgroup.order(), self.rep())
    }
}

/// The projection `G -> G/H`.
///
/// Each flat index is labelled by the canonical representative of its coset;
/// `fibers` lists the distinct representatives in ascending order.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    subgroup: Subgroup,
    label: Vec<usize>,
    fiber_index: Vec<usize>,
    fibers: Vec<usize>,
}

impl QuotientMap {
    pub fn group(&self) -> &Group {
        self.subgroup.group()
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    /// Canonical representative of the coset containing `flat`.
    pub fn label(&self, flat: usize) -> usize {
        self.label[flat]
    }

    pub fn labels(&self) -> &[usize] {
        &self.label
    }

    /// Position of the coset containing `flat` within [`QuotientMap::fibers`].
    pub fn fiber_of(&self, flat: usize) -> usize {
        self.fiber_index[flat]
    }

    pub fn fibers(&self) -> &[usize] {
        &self.fibers
    }

    pub fn num_fibers(&self) -> usize {
        self.fibers.len()
    }

    pub fn coset(&self, fiber: usize) -> Coset {
        Coset {
            subgroup: self.subgroup.clone(),
            rep: self.fibers[fiber],
        }
    }
}

pub fn quotient_map(group: &Group, h: &Subgroup) -> Result<QuotientMap> {
    group.require_same(h.group())?;
    let n = group.order();
    let members = h.members.to_vec();
    let mut label = vec![usize::MAX; n];
    let mut fiber_index = vec![usize::MAX; n];
    let mut fibers = Vec::with_capacity(h.index());
    for g in 0..n {
        if label[g] != usize::MAX {
            continue;
        }
        // g is the smallest unlabelled index, hence the minimum of its coset
        let id = fibers.len();
        fibers.push(g);
        for &m in &members {
            let x = group.add_flat(g, m);
            label[x] = g;
            fiber_index[x] = id;
        }
    }
    Ok(QuotientMap {
        subgroup: h.clone(),
        label,
        fiber_index,
        fibers,
    })
}

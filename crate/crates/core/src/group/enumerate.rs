//! Exhaustive subgroup enumeration.
//!
//! Groups whose non-trivial factors are all `Z_p` for one prime `p` are
//! enumerated directly as row-reduced echelon bases over `F_p`. Every other
//! group goes through the general route: collect all cyclic subgroups, then
//! close the family under joins with cyclic subgroups, deduplicating by
//! membership mask.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;

use super::subgroup::join_element;
use super::{Group, GroupSet, Subgroup};
use crate::error::{Error, Result};

/// Caps guarding exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationLimits {
    /// Largest group order that is enumerated at all.
    pub order_cap: usize,
    /// Largest number of subgroups materialized.
    pub subgroup_cap: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits {
            order_cap: 4096,
            subgroup_cap: 500_000,
        }
    }
}

/// All subgroups under the default limits, sorted by `(|H|, membership)`.
pub fn enumerate_subgroups(group: &Group) -> Result<Vec<Subgroup>> {
    enumerate_subgroups_with(group, EnumerationLimits::default())
}

pub fn enumerate_subgroups_with(group: &Group, limits: EnumerationLimits) -> Result<Vec<Subgroup>> {
    if group.order() > limits.order_cap {
        return Err(Error::EnumerationCapExceeded {
            order: group.order(),
            cap: limits.order_cap,
        });
    }
    let mut out = match elementary_prime(group) {
        Some((p, axes)) => {
            let count = count_subspaces(p, axes.len());
            if count > limits.subgroup_cap as u128 {
                return Err(Error::SubgroupCountExceeded {
                    cap: limits.subgroup_cap,
                });
            }
            echelon_subgroups(group, p, &axes)
        }
        None => join_closure(group, limits.subgroup_cap)?,
    };
    out.sort();
    Ok(out)
}

/// `Some((p, axes))` when every factor with modulus > 1 is `Z_p`.
fn elementary_prime(group: &Group) -> Option<(usize, Vec<usize>)> {
    let axes: Vec<usize> = (0..group.rank()).filter(|&i| group.moduli()[i] > 1).collect();
    let p = match axes.first() {
        None => return Some((2, axes)),
        Some(&i) => group.moduli()[i],
    };
    let is_prime = (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0);
    (is_prime && axes.iter().all(|&i| group.moduli()[i] == p)).then_some((p, axes))
}

/// Number of subspaces of `F_p^n`: the sum of Gaussian binomials.
pub(crate) fn count_subspaces(p: usize, n: usize) -> u128 {
    let p = p as u128;
    let mut total: u128 = 0;
    for k in 0..=n {
        // [n k]_p = prod_{i<k} (p^{n-i} - 1) / (p^{i+1} - 1), exact at each step
        let mut g: u128 = 1;
        for i in 0..k {
            let num = p.saturating_pow((n - i) as u32).saturating_sub(1);
            let den = p.saturating_pow((i + 1) as u32) - 1;
            g = g.saturating_mul(num) / den;
        }
        total = total.saturating_add(g);
    }
    total
}

fn echelon_subgroups(group: &Group, p: usize, axes: &[usize]) -> Vec<Subgroup> {
    let n = axes.len();
    let unit: Vec<usize> = axes.iter().map(|&a| group.strides()[a]).collect();
    let mut out = Vec::new();
    for k in 0..=n {
        for pivots in combinations(n, k) {
            let is_pivot = {
                let mut v = vec![false; n];
                for &c in &pivots {
                    v[c] = true;
                }
                v
            };
            // free cells per row: columns right of the pivot that are not pivots
            let free: Vec<Vec<usize>> = pivots
                .iter()
                .map(|&c| ((c + 1)..n).filter(|&j| !is_pivot[j]).collect())
                .collect();
            let total_free: usize = free.iter().map(Vec::len).sum();
            let mut digits = vec![0usize; total_free];
            loop {
                let mut rows = Vec::with_capacity(k);
                let mut d = 0;
                for (r, &c) in pivots.iter().enumerate() {
                    let mut flat = unit[c];
                    for &j in &free[r] {
                        flat += digits[d] * unit[j];
                        d += 1;
                    }
                    rows.push(flat);
                }
                out.push(span(group, p, &rows));
                if !increment(&mut digits, p) {
                    break;
                }
            }
        }
    }
    out
}

fn span(group: &Group, p: usize, rows: &[usize]) -> Subgroup {
    let mut elems = vec![0usize];
    for &r in rows {
        let len = elems.len();
        let mut step = r;
        for _ in 1..p {
            for i in 0..len {
                elems.push(group.add_flat(elems[i], step));
            }
            step = group.add_flat(step, r);
        }
    }
    Subgroup::from_closed(GroupSet::from_flats(group, elems))
}

fn increment(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn join_closure(group: &Group, cap: usize) -> Result<Vec<Subgroup>> {
    let trivial = Subgroup::trivial(group);
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    let mut all = vec![trivial.clone()];
    seen.insert(trivial.members().mask().clone());

    let mut cyclic_gens = Vec::new();
    for x in 1..group.order() {
        let c = join_element(&trivial, x);
        if seen.insert(c.members().mask().clone()) {
            cyclic_gens.push(x);
            all.push(c);
        }
    }
    if all.len() > cap {
        return Err(Error::SubgroupCountExceeded { cap });
    }

    let mut i = 1;
    while i < all.len() {
        let h = all[i].clone();
        for &x in &cyclic_gens {
            if h.contains(x) {
                continue;
            }
            let j = join_element(&h, x);
            if seen.insert(j.members().mask().clone()) {
                all.push(j);
                if all.len() > cap {
                    return Err(Error::SubgroupCountExceeded { cap });
                }
            }
        }
        i += 1;
    }
    Ok(all)
}

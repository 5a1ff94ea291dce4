//! Seeded perturbed-subgroup families: `H ∖ T`, `H ∪ T` and combinations.
//!
//! Generator contract: a [`SeededRng`] is ChaCha8 seeded through
//! `SeedableRng::seed_from_u64`, with the stream selected by
//! [`SeededRng::with_stream`]; [`SeededRng::below`] draws by rejection on
//! `next_u64`. The same seed and stream give the same instances within a
//! major release.

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{quotient_map, Group, GroupSet, Subgroup};

#[derive(Debug, Clone)]
pub struct SeededRng(ChaCha8Rng);

impl SeededRng {
    pub fn new(seed: u64) -> SeededRng {
        SeededRng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Independent stream `stream` under the same seed.
    pub fn with_stream(seed: u64, stream: u64) -> SeededRng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SeededRng(rng)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `0..n`. Panics when `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        let n = n as u64;
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.0.next_u64();
            if x < zone {
                return (x % n) as usize;
            }
        }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// `k` distinct entries of `pool`, in draw order.
    pub fn choose(&mut self, pool: &[usize], k: usize) -> Vec<usize> {
        let mut pool = pool.to_vec();
        let k = k.min(pool.len());
        for i in 0..k {
            let j = i + self.below(pool.len() - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }

    /// A uniformly random subset of `g` of exact size `k`.
    pub fn subset(&mut self, g: &Group, k: usize) -> GroupSet {
        let all: Vec<usize> = (0..g.order()).collect();
        GroupSet::from_flats(g, self.choose(&all, k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `H ∖ T` with `T ⊆ H`.
    Delete,
    /// `H ∪ T` with `T` spread over the cosets of `H` other than `H`.
    Add,
    /// `(H ∖ T1) ∪ T2` with `|T1| = |T2| = t`.
    Mixed,
    /// Random deletion and insertion counts in `0..=t`, insertions anywhere
    /// outside `H`.
    Random,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Delete, Family::Add, Family::Mixed, Family::Random];

    pub fn name(self) -> &'static str {
        match self {
            Family::Delete => "delete",
            Family::Add => "add",
            Family::Mixed => "mixed",
            Family::Random => "random",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// Where inserted elements go.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Cycle through the cosets other than `H` in a random order, so that
    /// the first `[G:H] - 1` insertions land in distinct cosets.
    DistinctCosets,
    /// Uniformly among elements outside `H`.
    Anywhere,
}

/// One perturbed subgroup.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub base: Subgroup,
    pub deleted: Vec<usize>,
    pub added: Vec<usize>,
    pub set: GroupSet,
}

impl Instance {
    pub fn group(&self) -> &Group {
        self.base.group()
    }

    /// `eps |H| / (|T1| + 2 |T2|)`: tends to 1 as `|T| / |H|` shrinks when the
    /// insertions sit in distinct cosets. `None` for the unperturbed subgroup.
    pub fn eps_ratio(&self, eps: f64) -> Option<f64> {
        let weight = self.deleted.len() + 2 * self.added.len();
        (weight > 0).then(|| eps * self.base.order() as f64 / weight as f64)
    }
}

/// Deletes `deletions` random members of `base` and inserts `additions`
/// random non-members.
pub fn perturb(
    base: &Subgroup,
    deletions: usize,
    additions: usize,
    placement: Placement,
    rng: &mut SeededRng,
) -> Result<Instance> {
    let g = base.group();
    if deletions > base.order() {
        return Err(Error::InvalidParameter(format!(
            "cannot delete {deletions} elements from a subgroup of order {}",
            base.order()
        )));
    }
    let outside = g.order() - base.order();
    if additions > outside {
        return Err(Error::InvalidParameter(format!(
            "cannot add {additions} elements outside a subgroup with {outside} non-members"
        )));
    }
    let deleted = rng.choose(&base.members().to_vec(), deletions);
    let added = match placement {
        Placement::Anywhere => {
            let pool: Vec<usize> = (0..g.order()).filter(|&x| !base.contains(x)).collect();
            rng.choose(&pool, additions)
        }
        Placement::DistinctCosets => {
            let q = quotient_map(g, base)?;
            let reps: Vec<usize> = q.fibers()[1..].to_vec();
            let order = rng.choose(&reps, reps.len());
            let members = base.members().to_vec();
            let mut used = GroupSet::empty(g);
            let mut added = Vec::with_capacity(additions);
            for i in 0..additions {
                let rep = order[i % order.len()];
                // the coset still has a free element: at most i / |order| < |H| are used
                loop {
                    let x = g.add_flat(rep, members[rng.below(members.len())]);
                    if used.insert(x) {
                        added.push(x);
                        break;
                    }
                }
            }
            added
        }
    };
    let mut set = base.members().clone();
    for &x in &deleted {
        set.remove(x);
    }
    for &x in &added {
        set.insert(x);
    }
    Ok(Instance {
        base: base.clone(),
        deleted,
        added,
        set,
    })
}

/// `Z_p^(n + codim)` with `H` the elements whose first `codim` coordinates
/// vanish, i.e. the flat indices below `p^n`.
pub fn embedded_power(p: usize, n: usize, codim: usize) -> Result<(Group, Subgroup)> {
    let g = Group::power(p, n + codim)?;
    let h = GroupSet::from_flats(&g, 0..g.order() / p.pow(codim as u32));
    Ok((g, Subgroup::from_set(h)?))
}

/// Parameters of one family member over `Z_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyParams {
    pub family: Family,
    pub p: usize,
    pub n: usize,
    pub t: usize,
    /// Extra factors beyond `H` for families that insert elements.
    pub codim: usize,
}

impl FamilyParams {
    pub fn new(family: Family, p: usize, n: usize, t: usize) -> FamilyParams {
        FamilyParams {
            family,
            p,
            n,
            t,
            codim: 2,
        }
    }
}

/// Draws one instance: `delete` lives in `Z_p^n = H`, the others in
/// `Z_p^(n + codim)` around the embedded `Z_p^n`.
pub fn generate(params: &FamilyParams, rng: &mut SeededRng) -> Result<Instance> {
    let FamilyParams {
        family, p, n, t, codim, ..
    } = *params;
    let codim = if family == Family::Delete { 0 } else { codim };
    let (_, h) = embedded_power(p, n, codim)?;
    match family {
        Family::Delete => perturb(&h, t, 0, Placement::Anywhere, rng),
        Family::Add => perturb(&h, 0, t, Placement::DistinctCosets, rng),
        Family::Mixed => perturb(&h, t, t, Placement::DistinctCosets, rng),
        Family::Random => {
            let d = rng.below(t + 1);
            let a = rng.below(t + 1);
            perturb(&h, d, a, Placement::Anywhere, rng)
        }
    }
}

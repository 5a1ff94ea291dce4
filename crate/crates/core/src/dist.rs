//! Exact finite distributions over a [`Group`].
//!
//! Masses are integer numerators over one common denominator, kept in lowest
//! terms. Only entropy is evaluated in floating point (natural log, with
//! `0 log 0 = 0`).

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{Group, GroupSet, QuotientMap};
use crate::rational::Rational;
use crate::transform::{cyclic_convolution, rounding_residual};

/// Groups smaller than this always use the direct double loop.
pub const TRANSFORM_MIN_ORDER: usize = 256;

/// Transform results further than this from an integer are rejected and
/// recomputed directly.
pub const TRANSFORM_RESIDUAL_LIMIT: f64 = 1e-6;

/// Largest product of denominators handed to the floating-point transform.
const TRANSFORM_MAX_MASS: u128 = 1 << 53;

/// A probability distribution on a finite group with exact rational masses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dist {
    group: Group,
    numerators: Vec<u128>,
    denominator: u128,
}

impl Dist {
    /// Validates that the numerators sum to the denominator.
    pub fn new(group: &Group, numerators: Vec<u128>, denominator: u128) -> Result<Dist> {
        if numerators.len() != group.order() {
            return Err(Error::InvalidDistribution(format!(
                "{} numerators for a group of order {}",
                numerators.len(),
                group.order()
            )));
        }
        if denominator == 0 {
            return Err(Error::InvalidDistribution("zero denominator".into()));
        }
        let sum = numerators
            .iter()
            .try_fold(0u128, |acc, &x| acc.checked_add(x))
            .ok_or(Error::Overflow)?;
        if sum != denominator {
            return Err(Error::InvalidDistribution(format!(
                "numerators sum to {sum}, denominator is {denominator}"
            )));
        }
        Ok(Dist::reduced(group, numerators, denominator))
    }

    /// Normalizes non-negative integer weights.
    pub fn from_weights(group: &Group, weights: Vec<u128>) -> Result<Dist> {
        let sum = weights
            .iter()
            .try_fold(0u128, |acc, &x| acc.checked_add(x))
            .ok_or(Error::Overflow)?;
        Dist::new(group, weights, sum)
    }

    pub fn point_mass(group: &Group, flat: usize) -> Dist {
        let mut numerators = vec![0; group.order()];
        numerators[flat] = 1;
        Dist {
            group: group.clone(),
            numerators,
            denominator: 1,
        }
    }

    fn reduced(group: &Group, mut numerators: Vec<u128>, mut denominator: u128) -> Dist {
        let g = numerators
            .iter()
            .filter(|&&x| x > 0)
            .fold(denominator, |acc, &x| acc.gcd(&x));
        if g > 1 {
            for x in numerators.iter_mut() {
                *x /= g;
            }
            denominator /= g;
        }
        Dist {
            group: group.clone(),
            numerators,
            denominator,
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn numerators(&self) -> &[u128] {
        &self.numerators
    }

    pub fn denominator(&self) -> u128 {
        self.denominator
    }

    pub fn mass(&self, flat: usize) -> Rational {
        Rational::new(self.numerators[flat], self.denominator)
    }

    pub fn prob(&self, flat: usize) -> f64 {
        self.numerators[flat] as f64 / self.denominator as f64
    }

    pub fn support(&self) -> GroupSet {
        GroupSet::from_flats(
            &self.group,
            self.numerators
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, _)| i),
        )
    }

    pub fn support_len(&self) -> usize {
        self.numerators.iter().filter(|&&x| x > 0).count()
    }

    pub fn entropy(&self) -> f64 {
        entropy_of(self.numerators.iter().copied(), self.denominator)
    }

    fn sparse(&self) -> Vec<(usize, u128)> {
        self.numerators
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0)
            .map(|(i, &x)| (i, x))
            .collect()
    }
}

/// `{"group": "2x2", "denominator": d, "numerators": {"index": count, ..}}`
/// with zero entries omitted.
impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let sparse: BTreeMap<usize, u128> = self.sparse().into_iter().collect();
        let mut s = serializer.serialize_struct("Dist", 3)?;
        s.serialize_field("group", &self.group.to_string())?;
        s.serialize_field("denominator", &self.denominator)?;
        s.serialize_field("numerators", &sparse)?;
        s.end()
    }
}

/// `U_A`: mass `1/|A|` on each member of `a`.
pub fn uniform_on(a: &GroupSet) -> Result<Dist> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut numerators = vec![0u128; a.group().order()];
    for x in a.iter() {
        numerators[x] = 1;
    }
    Ok(Dist {
        group: a.group().clone(),
        numerators,
        denominator: a.len() as u128,
    })
}

/// Shannon entropy in nats.
pub fn entropy(d: &Dist) -> f64 {
    d.entropy()
}

/// Entropy of the masses `n_i / den`, evaluated as
/// `log den - (Σ n_i log n_i) / den` so that uniform masses give `log` of the
/// support size exactly.
pub(crate) fn entropy_of<I: IntoIterator<Item = u128>>(numerators: I, den: u128) -> f64 {
    let weighted: f64 = numerators
        .into_iter()
        .filter(|&n| n > 1)
        .map(|n| {
            let n = n as f64;
            n * n.ln()
        })
        .sum();
    let den = den as f64;
    (den.ln() - weighted / den).max(0.0)
}

/// `-p log p - (1-p) log(1-p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let term = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    Ok(term(p) + term(1.0 - p))
}

/// Ordered-pair sum counts `r(z) = #{(a, b) ∈ A × B : a + b = z}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumCounts {
    group: Group,
    counts: Vec<u64>,
    total: u64,
}

impl SumCounts {
    /// Wraps raw counts; `total` is their sum.
    pub fn from_counts(group: &Group, counts: Vec<u64>) -> Result<SumCounts> {
        if counts.len() != group.order() {
            return Err(Error::DimensionMismatch {
                expected: group.order(),
                found: counts.len(),
            });
        }
        let total = counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or(Error::Overflow)?;
        Ok(SumCounts {
            group: group.clone(),
            counts,
            total,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, flat: usize) -> u64 {
        self.counts[flat]
    }

    /// `|A| · |B|`.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// The support of the counts, i.e. the sumset `A + B`.
    pub fn sumset(&self) -> GroupSet {
        GroupSet::from_flats(
            &self.group,
            self.counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, _)| i),
        )
    }

    /// Distribution of `U_A + U_B`.
    pub fn to_dist(&self) -> Dist {
        Dist::reduced(
            &self.group,
            self.counts.iter().map(|&c| c as u128).collect(),
            self.total as u128,
        )
    }
}

fn check_pair(a: &GroupSet, b: &GroupSet) -> Result<()> {
    a.group().require_same(b.group())?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(())
}

/// Sum counts of `a` and `b`; the transform path is used from
/// [`TRANSFORM_MIN_ORDER`] upward and falls back to the direct loop when its
/// result fails validation.
pub fn sum_counts(a: &GroupSet, b: &GroupSet) -> Result<SumCounts> {
    check_pair(a, b)?;
    if a.group().order() >= TRANSFORM_MIN_ORDER {
        let (counts, residual) = sum_counts_transform(a, b)?;
        if residual < TRANSFORM_RESIDUAL_LIMIT && counts.counts.iter().sum::<u64>() == counts.total {
            return Ok(counts);
        }
    }
    sum_counts_naive(a, b)
}

/// Double loop over the members.
pub fn sum_counts_naive(a: &GroupSet, b: &GroupSet) -> Result<SumCounts> {
    check_pair(a, b)?;
    let g = a.group();
    let mut counts = vec![0u64; g.order()];
    let bs = b.to_vec();
    for x in a.iter() {
        for &y in &bs {
            counts[g.add_flat(x, y)] += 1;
        }
    }
    Ok(SumCounts {
        group: g.clone(),
        counts,
        total: (a.len() * b.len()) as u64,
    })
}

/// Per-axis DFT route. Returns the rounded counts and the largest distance
/// of an unrounded value from its integer.
pub fn sum_counts_transform(a: &GroupSet, b: &GroupSet) -> Result<(SumCounts, f64)> {
    check_pair(a, b)?;
    let g = a.group();
    let indicator = |s: &GroupSet| {
        let mut v = vec![0.0; g.order()];
        for x in s.iter() {
            v[x] = 1.0;
        }
        v
    };
    let raw = cyclic_convolution(g, &indicator(a), &indicator(b));
    let residual = rounding_residual(&raw);
    let counts = raw.iter().map(|v| v.round().max(0.0) as u64).collect();
    Ok((
        SumCounts {
            group: g.clone(),
            counts,
            total: (a.len() * b.len()) as u64,
        },
        residual,
    ))
}

/// Distribution of `X + Y` for independent `X ~ d1`, `Y ~ d2`.
pub fn convolve(d1: &Dist, d2: &Dist) -> Result<Dist> {
    d1.group.require_same(&d2.group)?;
    let g = &d1.group;
    let den = d1
        .denominator
        .checked_mul(d2.denominator)
        .ok_or(Error::Overflow)?;
    let s1 = d1.sparse();
    let s2 = d2.sparse();
    if g.order() >= TRANSFORM_MIN_ORDER
        && den <= TRANSFORM_MAX_MASS
        && s1.len().saturating_mul(s2.len()) > g.order()
    {
        let a: Vec<f64> = d1.numerators.iter().map(|&x| x as f64).collect();
        let b: Vec<f64> = d2.numerators.iter().map(|&x| x as f64).collect();
        let raw = cyclic_convolution(g, &a, &b);
        if rounding_residual(&raw) < TRANSFORM_RESIDUAL_LIMIT {
            let nums: Vec<u128> = raw.iter().map(|v| v.round().max(0.0) as u128).collect();
            if nums.iter().sum::<u128>() == den {
                return Ok(Dist::reduced(g, nums, den));
            }
        }
    }
    let mut nums = vec![0u128; g.order()];
    for &(x, p) in &s1 {
        for &(y, q) in &s2 {
            nums[g.add_flat(x, y)] += p * q;
        }
    }
    Ok(Dist::reduced(g, nums, den))
}

/// The conditional decomposition of `H(X)` along a set `U` and its
/// complement `V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitEntropy {
    pub p_u: f64,
    pub p_v: f64,
    /// `H(X | X ∈ U)`, zero when `P(X ∈ U) = 0`.
    pub ent_u: f64,
    /// `H(X | X ∉ U)`, zero when `P(X ∉ U) = 0`.
    pub ent_v: f64,
    /// `p_u ent_u + p_v ent_v + h(p_v)`.
    pub total: f64,
}

pub fn split_entropy(d: &Dist, u: &GroupSet) -> Result<SplitEntropy> {
    d.group.require_same(u.group())?;
    let (mut inside, mut outside) = (Vec::new(), Vec::new());
    for (i, &x) in d.numerators.iter().enumerate() {
        if x == 0 {
            continue;
        }
        if u.contains(i) {
            inside.push(x);
        } else {
            outside.push(x);
        }
    }
    let mass_u: u128 = inside.iter().sum();
    let mass_v: u128 = outside.iter().sum();
    let den = d.denominator as f64;
    let p_u = mass_u as f64 / den;
    let p_v = mass_v as f64 / den;
    let ent_u = if mass_u > 0 { entropy_of(inside, mass_u) } else { 0.0 };
    let ent_v = if mass_v > 0 { entropy_of(outside, mass_v) } else { 0.0 };
    let total = p_u * ent_u + p_v * ent_v + binary_entropy(p_v.clamp(0.0, 1.0))?;
    Ok(SplitEntropy {
        p_u,
        p_v,
        ent_u,
        ent_v,
        total,
    })
}

/// A distribution on the cosets of a subgroup, indexed like
/// [`QuotientMap::fibers`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberDist {
    /// Canonical representative of each fiber, ascending.
    pub fibers: Vec<usize>,
    pub numerators: Vec<u128>,
    pub denominator: u128,
}

impl FiberDist {
    pub fn mass(&self, fiber: usize) -> Rational {
        Rational::new(self.numerators[fiber], self.denominator)
    }

    pub fn entropy(&self) -> f64 {
        entropy_of(self.numerators.iter().copied(), self.denominator)
    }

    /// The heaviest fiber, ties going to the smallest representative.
    pub fn dominant(&self) -> usize {
        let mut best = 0;
        for (i, &x) in self.numerators.iter().enumerate() {
            if x > self.numerators[best] {
                best = i;
            }
        }
        best
    }
}

/// The marginal of `d` on `G/H`: `E(b) = Σ_{label(g) = b} d(g)`.
pub fn pushforward(d: &Dist, q: &QuotientMap) -> Result<FiberDist> {
    d.group.require_same(q.group())?;
    let mut numerators = vec![0u128; q.num_fibers()];
    for (g, &x) in d.numerators.iter().enumerate() {
        numerators[q.fiber_of(g)] += x;
    }
    let div = numerators
        .iter()
        .filter(|&&x| x > 0)
        .fold(d.denominator, |acc, &x| acc.gcd(&x));
    Ok(FiberDist {
        fibers: q.fibers().to_vec(),
        numerators: numerators.into_iter().map(|x| x / div).collect(),
        denominator: d.denominator / div,
    })
}

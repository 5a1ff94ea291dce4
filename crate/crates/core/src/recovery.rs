//! Coset recovery: choose the subgroup `H` closest to `U_A` in entropic Ruzsa
//! distance, take the coset of `H` carrying most of `A`, and compare its
//! symmetric difference with `A` against the bounds.
//!
//! The subgroup search is exhaustive over a candidate list (by default every
//! subgroup of the ambient group). Bound violations are reported in the
//! result, never raised.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use fixedbitset::FixedBitSet;

use crate::dist::{entropy_of, pushforward, sum_counts, uniform_on, FiberDist};
use crate::error::{Error, Result};
use crate::group::{
    enumerate_subgroups_with, quotient_map, Coset, EnumerationLimits, GroupElem, GroupSet,
    QuotientMap, Subgroup,
};
use crate::measures::{entropy_gap_bound, epsilon_from_counts, ruzsa_dist, Verdict};
use crate::rational::Rational;

/// Distance threshold below which the coset lemma applies.
pub const ALPHA_LIMIT: f64 = 0.1;
/// Slack on the coset and end-to-end bounds.
pub const BOUND_TOLERANCE: f64 = 1e-9;
/// Distances closer than this count as tied during subgroup selection.
pub const ALPHA_TIE: f64 = 1e-12;
/// Multiplier in `|A Δ (H+x)| / |H| <= C eps log(|A| / eps)`.
pub const MAIN_CONSTANT: f64 = 240.0;

/// Knobs for [`recover`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryConfig {
    /// Stand-in for the unknown constant gating the subgroup black box; only
    /// labels `delta_h <= gamma` in the result.
    pub gamma: f64,
    /// Stand-in for the unknown constant gating the main bound; only labels
    /// `main_bound <= theta` in the result.
    pub theta: f64,
    pub limits: EnumerationLimits,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        RecoveryConfig {
            gamma: 0.01,
            theta: 0.01,
            limits: EnumerationLimits::default(),
        }
    }
}

/// Marginal of `U_A` on `G/H`.
fn marginal(a: &GroupSet, q: &QuotientMap) -> Result<FiberDist> {
    pushforward(&uniform_on(a)?, q)
}

/// `|A ∩ (H + x)|` for each coset of `h` meeting `A`.
fn hit_counts(a: &GroupSet, h: &[usize]) -> Vec<u128> {
    let g = a.group();
    let mut seen = FixedBitSet::with_capacity(g.order());
    let mut counts = Vec::new();
    for x in a.iter() {
        if seen.contains(x) {
            continue;
        }
        let mut c = 0;
        for &m in h {
            let y = g.add_flat(x, m);
            seen.insert(y);
            c += a.contains(y) as u128;
        }
        counts.push(c);
    }
    counts
}

/// `d(U_A, U_H)` through the coset marginal `E` of `U_A`:
/// `U_A + U_H` is uniform on each coset of `H`, so its entropy is
/// `log |H| + H(E)`.
pub fn coset_alpha(a: &GroupSet, h: &Subgroup) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    a.group().require_same(h.group())?;
    Ok(alpha_from_counts(&hit_counts(a, &h.members().to_vec()), a.len(), h.order()))
}

fn alpha_from_counts(counts: &[u128], set_size: usize, order: usize) -> f64 {
    let log_h = (order as f64).ln();
    let marginal = entropy_of(counts.iter().copied(), set_size as u128);
    (log_h + marginal - ((set_size as f64).ln() + log_h) / 2.0).max(0.0)
}

fn sorted_positions(candidates: &[Subgroup]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..candidates.len()).collect();
    if !candidates.windows(2).all(|w| w[0] <= w[1]) {
        idx.sort_by(|&x, &y| candidates[x].cmp(&candidates[y]));
    }
    idx
}

/// The candidate minimizing `d(U_A, U_H)`; ties go to the smaller subgroup,
/// then to the smaller membership mask.
pub fn best_subgroup(a: &GroupSet, candidates: &[Subgroup]) -> Result<(Subgroup, f64)> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut best: Option<(usize, f64)> = None;
    for i in sorted_positions(candidates) {
        let alpha = coset_alpha(a, &candidates[i])?;
        match best {
            Some((_, b)) if alpha >= b - ALPHA_TIE => {}
            _ => best = Some((i, alpha)),
        }
    }
    let (i, alpha) = best.expect("candidates are non-empty");
    Ok((candidates[i].clone(), alpha))
}

/// The coset of `h` carrying the largest share of `A`, and the mass of `U_A`
/// outside it.
pub fn best_coset_for(a: &GroupSet, h: &Subgroup) -> Result<(Coset, Rational)> {
    let q = quotient_map(a.group(), h)?;
    let e = marginal(a, &q)?;
    let top = e.dominant();
    Ok((q.coset(top), e.mass(top).complement()))
}

/// Minimum of `|A Δ (H + x)|` over all cosets of `h`, scanning every coset
/// of `G` and counting `|A ∩ (H + x)|` member by member. Ties go to the
/// smallest representative.
fn best_coset_direct(a: &GroupSet, h: &Subgroup) -> (usize, usize) {
    let g = a.group();
    let members = h.members().to_vec();
    let mut covered = FixedBitSet::with_capacity(g.order());
    let mut best = (usize::MAX, 0);
    for rep in 0..g.order() {
        if covered.contains(rep) {
            continue;
        }
        let mut inter = 0;
        for &m in &members {
            let y = g.add_flat(rep, m);
            covered.insert(y);
            inter += a.contains(y) as usize;
        }
        let d = a.len() + members.len() - 2 * inter;
        if d < best.0 {
            best = (d, rep);
        }
    }
    best
}

/// Exhaustive minimum of `|A Δ (H + x)|` over every subgroup and coset of
/// the ambient group.
pub fn brute_force_best_coset(a: &GroupSet) -> Result<(Coset, usize)> {
    let all = enumerate_subgroups_with(a.group(), EnumerationLimits::default())?;
    brute_force_best_coset_among(a, &all)
}

/// As [`brute_force_best_coset`] over an explicit subgroup list.
pub fn brute_force_best_coset_among(a: &GroupSet, subgroups: &[Subgroup]) -> Result<(Coset, usize)> {
    if subgroups.is_empty() {
        return Err(Error::NoCandidates);
    }
    let mut best: Option<(usize, usize, usize)> = None;
    for i in sorted_positions(subgroups) {
        let h = &subgroups[i];
        a.group().require_same(h.group())?;
        let (d, rep) = best_coset_direct(a, h);
        if best.map_or(true, |(b, _, _)| d < b) {
            best = Some((d, i, rep));
        }
    }
    let (d, i, rep) = best.expect("subgroups are non-empty");
    Ok((subgroups[i].coset_of(rep), d))
}

/// The coset lemma on one `(A, H)` pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma32Check {
    pub alpha: f64,
    /// Minimum over the cosets of `H`.
    pub symdiff: usize,
    pub holds: Verdict,
}

pub fn lemma32_check(a: &GroupSet, h: &Subgroup) -> Result<Lemma32Check> {
    a.group().require_same(h.group())?;
    let alpha = ruzsa_dist(&uniform_on(a)?, &uniform_on(h.members())?)?;
    let (symdiff, _) = best_coset_direct(a, h);
    let holds = if alpha < ALPHA_LIMIT {
        Verdict::from_bool(
            symdiff as f64 <= 10.0 * alpha * h.order() as f64 + BOUND_TOLERANCE,
        )
    } else {
        Verdict::NotApplicable
    };
    Ok(Lemma32Check {
        alpha,
        symdiff,
        holds,
    })
}

/// `C eps log(|A| / eps)`, zero at `eps = 0`.
pub fn main_bound(eps: Rational, set_size: usize) -> f64 {
    MAIN_CONSTANT / 2.0 * entropy_gap_bound(eps, set_size)
}

/// Everything the pipeline produces for one set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryResult {
    pub group: String,
    pub set_size: usize,
    pub epsilon: Rational,
    #[serde(rename = "delta_H")]
    pub delta_h: f64,
    pub subgroup: Subgroup,
    pub coset_rep: GroupElem,
    /// `d(U_A, U_H)` for the chosen subgroup.
    pub alpha: f64,
    /// Mass of `U_A` outside the chosen coset.
    pub tail_mass: Rational,
    pub symdiff: usize,
    /// `symdiff / |H|`.
    pub ratio: f64,
    /// `10 alpha`.
    pub lemma32_bound: f64,
    pub main_bound: f64,
    pub holds_32: Verdict,
    pub holds_main: Verdict,
    /// Exhaustive optimum over all cosets of all subgroups, when the ambient
    /// group could be enumerated.
    pub brute_force_symdiff: Option<usize>,
    /// `delta_H <= gamma`.
    pub gamma_regime: bool,
    /// `main_bound <= theta`.
    pub theta_regime: bool,
}

impl RecoveryResult {
    pub const CSV_HEADER: [&'static str; 12] = [
        "group",
        "|A|",
        "eps",
        "alpha",
        "|H|",
        "coset_rep",
        "symdiff",
        "ratio",
        "lemma32_bound",
        "main_bound",
        "holds_32",
        "holds_main",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.group.clone(),
            self.set_size.to_string(),
            self.epsilon.to_string(),
            self.alpha.to_string(),
            self.subgroup.order().to_string(),
            self.coset_rep.to_string(),
            self.symdiff.to_string(),
            self.ratio.to_string(),
            self.lemma32_bound.to_string(),
            self.main_bound.to_string(),
            self.holds_32.to_string(),
            self.holds_main.to_string(),
        ]
    }
}

/// Runs the pipeline over `candidates`, or over every subgroup when `None`.
pub fn recover(
    a: &GroupSet,
    candidates: Option<&[Subgroup]>,
    config: &RecoveryConfig,
) -> Result<RecoveryResult> {
    match candidates {
        None => {
            let all = enumerate_subgroups_with(a.group(), config.limits)?;
            recover_with(a, &all, Some(&all), config)
        }
        Some(c) => {
            let all = enumerate_subgroups_with(a.group(), config.limits).ok();
            recover_with(a, c, all.as_deref(), config)
        }
    }
}

/// Runs the pipeline over `candidates`; `oracle`, when given, is the full
/// subgroup list used for the brute-force comparison.
pub fn recover_with(
    a: &GroupSet,
    candidates: &[Subgroup],
    oracle: Option<&[Subgroup]>,
    config: &RecoveryConfig,
) -> Result<RecoveryResult> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let k = a.len();
    let r = sum_counts(a, a)?;
    let epsilon = epsilon_from_counts(&r, k).value;
    let delta_h = r.to_dist().entropy() - (k as f64).ln();

    let (subgroup, alpha) = best_subgroup(a, candidates)?;
    let (coset, tail_mass) = best_coset_for(a, &subgroup)?;
    let symdiff = a
        .symmetric_difference_len(&coset.members())
        .expect("same group");
    let order = subgroup.order() as f64;
    let ratio = symdiff as f64 / order;
    let lemma32_bound = 10.0 * alpha;
    let main = main_bound(epsilon, k);

    let holds_32 = if alpha < ALPHA_LIMIT {
        Verdict::from_bool(ratio <= lemma32_bound + BOUND_TOLERANCE)
    } else {
        Verdict::NotApplicable
    };
    let holds_main = if epsilon.below_exp_minus_two() {
        Verdict::from_bool(ratio <= main + BOUND_TOLERANCE)
    } else {
        Verdict::NotApplicable
    };
    let brute_force_symdiff = match oracle {
        Some(all) if !all.is_empty() => Some(brute_force_best_coset_among(a, all)?.1),
        _ => None,
    };

    Ok(RecoveryResult {
        group: a.group().to_string(),
        set_size: k,
        epsilon,
        delta_h,
        coset_rep: coset.rep(),
        subgroup,
        alpha,
        tail_mass,
        symdiff,
        ratio,
        lemma32_bound,
        main_bound: main,
        holds_32,
        holds_main,
        brute_force_symdiff,
        gamma_regime: delta_h <= config.gamma,
        theta_regime: main <= config.theta,
    })
}

/// `{"order": |H|, "index": [G:H], "generators": ["1,0", ..]}`.
impl Serialize for Subgroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let gens: Vec<String> = self.generators().iter().map(|g| g.to_string()).collect();
        let mut s = serializer.serialize_struct("Subgroup", 3)?;
        s.serialize_field("order", &self.order())?;
        s.serialize_field("index", &self.index())?;
        s.serialize_field("generators", &gens)?;
        s.end()
    }
}

/// Comma-separated coordinates, as in set files.
impl Serialize for GroupElem {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

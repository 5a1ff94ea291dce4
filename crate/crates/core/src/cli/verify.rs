//! Randomized invariant suites behind `verify`.
//!
//! Each suite draws its instances from its own seeded stream, so adding a
//! suite never changes the instances of another. Implementations under test
//! are pluggable through [`Implementations`], which lets a deliberately
//! broken routine be fed in to confirm that the matching suite notices.

use std::collections::HashMap;

use serde::Serialize;

use crate::dist::{
    convolve, split_entropy, sum_counts_naive, sum_counts_transform, uniform_on, Dist, SumCounts,
};
use crate::error::Result;
use crate::families::{perturb, Placement, SeededRng};
use crate::group::{enumerate_subgroups, Group, GroupSet, Subgroup};
use crate::measures::{
    additive_energy, delta_h, epsilon_min, lemma31_bound, ruzsa_dist, Verdict,
};
use crate::rational::Rational;
use crate::recovery::{best_coset_for, lemma32_check, recover, RecoveryConfig, BOUND_TOLERANCE};

use super::RunConfig;

pub const DEFAULT_TRIALS: usize = 100;
/// Equality slack for entropy identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;
/// Slack for entropy inequalities.
pub const INEQUALITY_TOLERANCE: f64 = 1e-9;
/// Draws per instance before a suite gives up on meeting its hypothesis.
const MAX_ATTEMPTS: usize = 50;

pub type SumCountsFn = fn(&GroupSet, &GroupSet) -> Result<SumCounts>;
pub type EpsilonFn = fn(&GroupSet) -> Result<Rational>;

/// The routines whose agreement the equivalence suites check.
#[derive(Clone, Copy)]
pub struct Implementations {
    pub fast_sum_counts: SumCountsFn,
    pub reference_sum_counts: SumCountsFn,
    pub epsilon: EpsilonFn,
    pub reference_epsilon: EpsilonFn,
}

fn transform_counts(a: &GroupSet, b: &GroupSet) -> Result<SumCounts> {
    sum_counts_transform(a, b).map(|(r, _)| r)
}

fn top_k_epsilon(a: &GroupSet) -> Result<Rational> {
    epsilon_min(a).map(|e| e.value)
}

impl Default for Implementations {
    fn default() -> Self {
        Implementations {
            fast_sum_counts: transform_counts,
            reference_sum_counts: sum_counts_naive,
            epsilon: top_k_epsilon,
            reference_epsilon: exhaustive_epsilon,
        }
    }
}

/// `1 - max_U P(a + a' ∈ U) ` over every `U` of size `|A|`, by listing all
/// such `U`. Only sensible for tiny groups.
pub fn exhaustive_epsilon(a: &GroupSet) -> Result<Rational> {
    let g = a.group();
    let n = g.order();
    let k = a.len();
    let mut r = vec![0u64; n];
    for x in a.iter() {
        for y in a.iter() {
            r[g.add_flat(x, y)] += 1;
        }
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best = 0u64;
    loop {
        best = best.max(idx.iter().map(|&i| r[i]).sum());
        // next k-combination of 0..n in lexicographic order
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            break;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    let total = (k * k) as u128;
    Ok(Rational::new(total - best as u128, total))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    /// Instances that met the suite's hypothesis and were checked.
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
    /// Draws discarded because the hypothesis did not hold.
    pub skipped: usize,
    pub first_counterexample: Option<String>,
}

impl SuiteReport {
    pub const CSV_HEADER: [&'static str; 6] =
        ["suite", "instances", "passed", "failed", "skipped", "counterexample"];

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.name.to_string(),
            self.instances.to_string(),
            self.passed.to_string(),
            self.failed.to_string(),
            self.skipped.to_string(),
            self.first_counterexample.clone().unwrap_or_default(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.passed
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.name == name)
    }
}

enum Outcome {
    Pass,
    Fail(String),
    /// Hypothesis not met; draw again.
    Skip,
}

fn check(ok: bool, message: impl FnOnce() -> String) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail(message())
    }
}

fn run_suite<F>(name: &'static str, stream: u64, config: &RunConfig, mut f: F) -> SuiteReport
where
    F: FnMut(&mut SeededRng) -> Result<Outcome>,
{
    let mut rng = SeededRng::with_stream(config.seed, stream);
    let mut report = SuiteReport {
        name,
        instances: 0,
        passed: 0,
        failed: 0,
        skipped: 0,
        first_counterexample: None,
    };
    for _ in 0..config.trials {
        for _ in 0..MAX_ATTEMPTS {
            let outcome = f(&mut rng).unwrap_or_else(|e| Outcome::Fail(format!("error: {e}")));
            match outcome {
                Outcome::Skip => {
                    report.skipped += 1;
                    continue;
                }
                Outcome::Pass => report.passed += 1,
                Outcome::Fail(msg) => {
                    report.failed += 1;
                    report.first_counterexample.get_or_insert(msg);
                }
            }
            report.instances += 1;
            break;
        }
    }
    report
}

const SMALL_GROUPS: &[&[usize]] = &[
    &[2, 2, 2],
    &[2, 4],
    &[8],
    &[3, 3],
    &[6],
    &[2, 6],
    &[4, 4],
    &[2, 2, 2, 2],
    &[3, 6],
    &[5, 5],
    &[2, 2, 2, 2, 2, 2],
    &[4, 4, 4],
    &[3, 3, 3],
];

const TINY_GROUPS: &[&[usize]] = &[&[2, 2], &[4], &[5], &[6], &[2, 2, 2], &[2, 4], &[8], &[3, 3], &[10], &[2, 6], &[12]];

/// Orders at which the transform path is taken.
const LARGE_GROUPS: &[&[usize]] = &[&[16, 16], &[2, 2, 2, 2, 2, 2, 2, 2], &[5, 5, 11], &[4, 8, 8], &[32, 32], &[3, 9, 27]];

fn pick_group(rng: &mut SeededRng, list: &[&[usize]]) -> Group {
    Group::new(list[rng.below(list.len())]).expect("fixed groups are valid")
}

fn random_set(rng: &mut SeededRng, g: &Group, max: usize) -> GroupSet {
    let k = 1 + rng.below(max.min(g.order()));
    rng.subset(g, k)
}

fn random_dist(rng: &mut SeededRng, g: &Group) -> Result<Dist> {
    let support = random_set(rng, g, g.order());
    let mut w = vec![0u128; g.order()];
    for x in support.iter() {
        w[x] = 1 + rng.below(20) as u128;
    }
    Dist::from_weights(g, w)
}

fn show(set: &GroupSet) -> String {
    let v = set.to_vec();
    if v.len() <= 24 {
        format!("{v:?}")
    } else {
        format!("{:?}.. ({} elements)", &v[..24], v.len())
    }
}

/// Subgroup lists per group, enumerated once.
#[derive(Default)]
struct SubgroupCache(HashMap<Vec<usize>, Vec<Subgroup>>);

impl SubgroupCache {
    fn get(&mut self, g: &Group) -> Result<&[Subgroup]> {
        if !self.0.contains_key(g.moduli()) {
            self.0.insert(g.moduli().to_vec(), enumerate_subgroups(g)?);
        }
        Ok(&self.0[g.moduli()])
    }

    fn random(&mut self, rng: &mut SeededRng, g: &Group, min_order: usize) -> Result<Subgroup> {
        let all: Vec<&Subgroup> = self.get(g)?.iter().filter(|h| h.order() >= min_order).collect();
        Ok(all[rng.below(all.len())].clone())
    }
}

/// A random perturbation of a random coset of a random subgroup of order at
/// least `min_order`.
fn perturbed_coset(
    rng: &mut SeededRng,
    cache: &mut SubgroupCache,
    g: &Group,
    min_order: usize,
) -> Result<(Subgroup, GroupSet)> {
    let h = cache.random(rng, g, min_order)?;
    let max_del = (h.order() / 8).max(1);
    let max_add = (h.order() / 8).min(g.order() - h.order());
    let del = rng.below(max_del + 1);
    let add = if max_add == 0 { 0 } else { rng.below(max_add + 1) };
    let inst = perturb(&h, del.min(h.order() - 1), add, Placement::Anywhere, rng)?;
    let shift = rng.below(g.order());
    Ok((h, inst.set.translate(shift)))
}

fn group_laws(rng: &mut SeededRng) -> Result<Outcome> {
    let g = pick_group(rng, SMALL_GROUPS);
    let n = g.order();
    let (a, b, c) = (rng.below(n), rng.below(n), rng.below(n));
    let ok = g.add_flat(g.add_flat(a, b), c) == g.add_flat(a, g.add_flat(b, c))
        && g.add_flat(a, b) == g.add_flat(b, a)
        && g.add_flat(a, 0) == a
        && g.add_flat(a, g.neg_flat(a)) == 0
        && g.add(&g.element(a), &g.element(b))?.flat() == g.add_flat(a, b);
    Ok(check(ok, || format!("group {g}, elements {a}, {b}, {c}")))
}

fn entropy_bounds(rng: &mut SeededRng) -> Result<Outcome> {
    let g = pick_group(rng, SMALL_GROUPS);
    let x = random_dist(rng, &g)?;
    let y = random_dist(rng, &g)?;
    let (hx, hy) = (x.entropy(), y.entropy());
    let hs = convolve(&x, &y)?.entropy();
    let tol = INEQUALITY_TOLERANCE;
    let ok = hx >= 0.0
        && hx <= (x.support_len() as f64).ln() + tol
        && hs >= hx.max(hy) - tol
        && hs <= hx + hy + tol;
    Ok(check(ok, || {
        format!("group {g}: H(X)={hx}, H(Y)={hy}, H(X+Y)={hs}, X={}, Y={}", show(&x.support()), show(&y.support()))
    }))
}

fn split_identity(rng: &mut SeededRng) -> Result<Outcome> {
    let g = pick_group(rng, SMALL_GROUPS);
    let x = random_dist(rng, &g)?;
    let size = rng.below(g.order() + 1);
    let u = rng.subset(&g, size);
    let s = split_entropy(&x, &u)?;
    let h = x.entropy();
    Ok(check((s.total - h).abs() <= IDENTITY_TOLERANCE, || {
        format!("group {g}: H(X)={h}, split total {}, U={}", s.total, show(&u))
    }))
}

fn ruzsa_suite(rng: &mut SeededRng, cache: &mut SubgroupCache) -> Result<Outcome> {
    let g = pick_group(rng, SMALL_GROUPS);
    let a = random_set(rng, &g, g.order());
    let b = random_set(rng, &g, g.order());
    let (ua, ub) = (uniform_on(&a)?, uniform_on(&b)?);
    let dab = ruzsa_dist(&ua, &ub)?;
    let dba = ruzsa_dist(&ub, &ua)?;
    let h = cache.random(rng, &g, 1)?;
    let c1 = h.coset_of(rng.below(g.order())).members();
    let c2 = h.coset_of(rng.below(g.order())).members();
    let dc = ruzsa_dist(&uniform_on(&c1)?, &uniform_on(&c2)?)?;
    let ok = dab >= -INEQUALITY_TOLERANCE
        && (dab - dba).abs() <= IDENTITY_TOLERANCE
        && dc.abs() <= IDENTITY_TOLERANCE;
    Ok(check(ok, || {
        format!("group {g}: d(A,B)={dab}, d(B,A)={dba}, coset distance {dc}; A={}, B={}", show(&a), show(&b))
    }))
}

fn gap_and_energy(rng: &mut SeededRng, cache: &mut SubgroupCache) -> Result<Outcome> {
    let g = pick_group(rng, SMALL_GROUPS);
    let h = cache.random(rng, &g, 1)?;
    let coset = h.coset_of(rng.below(g.order())).members();
    let a = random_set(rng, &g, g.order());
    let k = a.len() as u128;
    let gap_coset = delta_h(&coset)?;
    let gap = delta_h(&a)?;
    let energy = additive_energy(&a)?;
    let ok = gap_coset == 0.0
        && gap >= -INEQUALITY_TOLERANCE
        && energy >= k * k
        && energy <= k * k * k
        && additive_energy(&coset)? == (h.order() as u128).pow(3);
    Ok(check(ok, || {
        format!("group {g}: gap on coset of order {} is {gap_coset}; A={} gap {gap} energy {energy}", h.order(), show(&a))
    }))
}

const LEMMA31_GROUPS: &[&[usize]] = &[&[2, 2, 2, 2, 2, 2], &[4, 4], &[3, 3, 3, 3], &[2, 2, 2, 2, 2, 2, 2, 2]];

fn lemma31_suite(rng: &mut SeededRng, cache: &mut SubgroupCache) -> Result<Outcome> {
    let g = pick_group(rng, LEMMA31_GROUPS);
    let min_order = (g.order() / 4).max(4);
    let (_, a) = perturbed_coset(rng, cache, &g, min_order)?;
    let c = lemma31_bound(&a)?;
    Ok(match c.holds {
        Verdict::NotApplicable => Outcome::Skip,
        v => check(v == Verdict::Holds, || {
            format!("group {g}: eps={}, delta_H={}, bound={}, A={}", c.eps, c.delta_h, c.bound, show(&a))
        }),
    })
}

const LEMMA32_GROUPS: &[&[usize]] = &[&[2, 2, 2, 2, 2, 2], &[4, 4, 4], &[3, 3, 3], &[8, 8], &[2, 4, 8]];

fn lemma32_suite(rng: &mut SeededRng, cache: &mut SubgroupCache) -> Result<Outcome> {
    let g = pick_group(rng, LEMMA32_GROUPS);
    let (h, a) = perturbed_coset(rng, cache, &g, 8)?;
    let c = lemma32_check(&a, &h)?;
    if c.holds == Verdict::NotApplicable {
        return Ok(Outcome::Skip);
    }
    let (coset, _) = best_coset_for(&a, &h)?;
    let dominant = a.symmetric_difference_len(&coset.members())?;
    let bound = 10.0 * c.alpha * h.order() as f64 + BOUND_TOLERANCE;
    Ok(check(c.holds == Verdict::Holds && dominant as f64 <= bound, || {
        format!(
            "group {g}, |H|={}: alpha={}, best symdiff {}, dominant symdiff {dominant}, A={}",
            h.order(),
            c.alpha,
            c.symdiff,
            show(&a)
        )
    }))
}

const RECOVERY_GROUPS: &[&[usize]] = &[&[2, 2, 2, 2], &[2, 2, 2, 2, 2], &[4, 4], &[2, 4, 4], &[3, 3, 3], &[2, 2, 2, 2, 2, 2], &[6, 6]];

fn recovery_suite(
    rng: &mut SeededRng,
    cache: &mut SubgroupCache,
    rc: &RecoveryConfig,
) -> Result<Outcome> {
    let g = pick_group(rng, RECOVERY_GROUPS);
    let (_, a) = perturbed_coset(rng, cache, &g, 4)?;
    let all = cache.get(&g)?;
    let r = recover(&a, Some(all), rc)?;
    let order = r.subgroup.order() as f64;
    let alpha = r.alpha;
    let mut problems = Vec::new();
    if r.brute_force_symdiff.map_or(true, |b| r.symdiff < b) {
        problems.push("symdiff below the brute-force optimum".to_string());
    }
    let shrink = order * (1.0 - (-2.0 * alpha).exp());
    if order - a.len() as f64 > shrink + BOUND_TOLERANCE || shrink > 2.0 * alpha * order + BOUND_TOLERANCE {
        problems.push(format!("size chain fails: |H|={order}, |A|={}", a.len()));
    }
    if alpha <= 0.1 {
        let cap = 2.0 * alpha / std::f64::consts::LN_2;
        let outside = a.len() - a.intersection_len(&r.subgroup.coset_of(r.coset_rep.flat()).members())?;
        if r.tail_mass.to_f64() > cap + BOUND_TOLERANCE
            || outside as f64 > cap * a.len() as f64 + BOUND_TOLERANCE
        {
            problems.push(format!("tail {} above {cap}", r.tail_mass));
        }
    }
    if r.holds_32.is_failure() {
        problems.push("coset bound fails".into());
    }
    if r.holds_main.is_failure() {
        problems.push("end-to-end bound fails".into());
    }
    Ok(check(problems.is_empty(), || {
        format!(
            "group {g}, A={}: alpha={alpha}, eps={}, |H|={order}, symdiff={}, ratio={}, main bound={}: {}",
            show(&a),
            r.epsilon,
            r.symdiff,
            r.ratio,
            r.main_bound,
            problems.join("; ")
        )
    }))
}

fn epsilon_oracle(rng: &mut SeededRng, impls: &Implementations) -> Result<Outcome> {
    let g = pick_group(rng, TINY_GROUPS);
    let a = random_set(rng, &g, g.order());
    let fast = (impls.epsilon)(&a)?;
    let slow = (impls.reference_epsilon)(&a)?;
    Ok(check(fast == slow, || {
        format!("group {g}, A={}: top-k {fast}, exhaustive {slow}", show(&a))
    }))
}

fn transform_suite(rng: &mut SeededRng, impls: &Implementations) -> Result<Outcome> {
    let g = pick_group(rng, LARGE_GROUPS);
    let n = g.order();
    let a = random_set(rng, &g, n);
    let b = random_set(rng, &g, n);
    let fast = (impls.fast_sum_counts)(&a, &b)?;
    let slow = (impls.reference_sum_counts)(&a, &b)?;
    let first_diff = (0..n).find(|&z| fast.counts()[z] != slow.counts()[z]);
    Ok(check(first_diff.is_none(), || {
        let z = first_diff.expect("differs");
        format!(
            "group {g}, |A|={}, |B|={}: r({z}) is {} by transform, {} directly; A={}, B={}",
            a.len(),
            b.len(),
            fast.counts()[z],
            slow.counts()[z],
            show(&a),
            show(&b)
        )
    }))
}

/// Runs every suite with the given implementations.
pub fn run_suites(config: &RunConfig, impls: &Implementations) -> VerifyReport {
    let mut cache = SubgroupCache::default();
    let rc = config.recovery_config();
    let suites = vec![
        run_suite("group_laws", 1, config, group_laws),
        run_suite("entropy_bounds", 2, config, entropy_bounds),
        run_suite("split_entropy", 3, config, split_identity),
        run_suite("ruzsa_distance", 4, config, |r| ruzsa_suite(r, &mut cache)),
        run_suite("gap_and_energy", 5, config, |r| gap_and_energy(r, &mut cache)),
        run_suite("lemma31", 6, config, |r| lemma31_suite(r, &mut cache)),
        run_suite("lemma32", 7, config, |r| lemma32_suite(r, &mut cache)),
        run_suite("recovery", 8, config, |r| recovery_suite(r, &mut cache, &rc)),
        run_suite("epsilon_oracle", 9, config, |r| epsilon_oracle(r, impls)),
        run_suite("transform", 10, config, |r| transform_suite(r, impls)),
    ];
    let passed = suites.iter().all(|s| s.failed == 0 && s.instances > 0);
    VerifyReport {
        seed: config.seed,
        trials: config.trials,
        passed,
        suites,
    }
}

pub fn cmd_verify(config: &RunConfig) -> VerifyReport {
    run_suites(config, &Implementations::default())
}

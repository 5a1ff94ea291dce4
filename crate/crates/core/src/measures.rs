//! Scalar measures of additive structure for a finite set `A`: the minimal
//! distributional epsilon, the entropy gap, the entropic Ruzsa distance and
//! additive energy.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::dist::{convolve, sum_counts, Dist, SumCounts};
use crate::error::{Error, Result};
use crate::group::GroupSet;
use crate::rational::Rational;

/// Slack allowed when comparing an entropy gap to its bound.
pub const LEMMA31_TOLERANCE: f64 = 1e-9;

/// Outcome of checking an inequality whose hypothesis may not hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Fails,
    NotApplicable,
}

impl Verdict {
    pub fn from_bool(holds: bool) -> Verdict {
        if holds {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn is_failure(self) -> bool {
        self == Verdict::Fails
    }

    pub fn is_applicable(self) -> bool {
        self != Verdict::NotApplicable
    }
}

/// Displays as `true`, `false` or `na`.
impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "true",
            Verdict::Fails => "false",
            Verdict::NotApplicable => "na",
        })
    }
}

/// Serializes as a JSON boolean, or `null` when not applicable.
impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Verdict::Holds => serializer.serialize_bool(true),
            Verdict::Fails => serializer.serialize_bool(false),
            Verdict::NotApplicable => serializer.serialize_none(),
        }
    }
}

/// The smallest epsilon for which `A` is a distributional epsilon-approximate
/// group, together with a set `U` attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonMin {
    pub value: Rational,
    pub witness: GroupSet,
}

/// Picks the `|A|` heaviest values of the self-sum counts (ties to the lower
/// flat index); any `U` of size `|A|` captures at most that much.
pub fn epsilon_min(a: &GroupSet) -> Result<EpsilonMin> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(epsilon_from_counts(&sum_counts(a, a)?, a.len()))
}

pub(crate) fn epsilon_from_counts(r: &SumCounts, k: usize) -> EpsilonMin {
    let counts = r.counts();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_unstable_by(|&x, &y| counts[y].cmp(&counts[x]).then(x.cmp(&y)));
    let top = &order[..k.min(order.len())];
    let captured: u64 = top.iter().map(|&z| counts[z]).sum();
    let total = r.total();
    EpsilonMin {
        value: Rational::new((total - captured) as u128, total as u128),
        witness: GroupSet::from_flats(r.group(), top.iter().copied()),
    }
}

/// Whether `A` is a distributional `eps`-approximate group.
pub fn is_distributional_approx(a: &GroupSet, eps: Rational) -> Result<bool> {
    if eps > Rational::one() {
        return Err(Error::InvalidEpsilon(eps.to_string()));
    }
    Ok(epsilon_min(a)?.value <= eps)
}

/// `H(U_A + U_A) - H(U_A)`.
pub fn delta_h(a: &GroupSet) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(delta_h_from_counts(&sum_counts(a, a)?, a.len()))
}

fn delta_h_from_counts(r: &SumCounts, k: usize) -> f64 {
    r.to_dist().entropy() - (k as f64).ln()
}

/// Entropic Ruzsa distance `H(X' + Y') - (H(X) + H(Y)) / 2` for independent
/// copies.
pub fn ruzsa_dist(x: &Dist, y: &Dist) -> Result<f64> {
    let sum = convolve(x, y)?;
    Ok(sum.entropy() - (x.entropy() + y.entropy()) / 2.0)
}

/// Number of quadruples in `A^4` with `a + b = a' + b'`.
pub fn additive_energy(a: &GroupSet) -> Result<u128> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(energy_from_counts(&sum_counts(a, a)?))
}

fn energy_from_counts(r: &SumCounts) -> u128 {
    r.counts().iter().map(|&c| (c as u128) * (c as u128)).sum()
}

/// `2 eps log(|A| / eps)`, read as zero at `eps = 0`.
pub fn entropy_gap_bound(eps: Rational, set_size: usize) -> f64 {
    if eps.is_zero() {
        return 0.0;
    }
    let e = eps.to_f64();
    2.0 * e * (set_size as f64 / e).ln()
}

/// The entropy-gap bound for small epsilon, checked on one set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma31Check {
    pub eps: Rational,
    pub delta_h: f64,
    pub bound: f64,
    pub holds: Verdict,
}

pub fn lemma31_bound(a: &GroupSet) -> Result<Lemma31Check> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let r = sum_counts(a, a)?;
    let eps = epsilon_from_counts(&r, a.len()).value;
    let delta_h = delta_h_from_counts(&r, a.len());
    let bound = entropy_gap_bound(eps, a.len());
    let holds = if eps.below_exp_minus_two() {
        Verdict::from_bool(delta_h <= bound + LEMMA31_TOLERANCE)
    } else {
        Verdict::NotApplicable
    };
    Ok(Lemma31Check {
        eps,
        delta_h,
        bound,
        holds,
    })
}

/// All measures of one set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub group: String,
    pub set_size: usize,
    pub epsilon_min: Rational,
    #[serde(rename = "delta_H")]
    pub delta_h: f64,
    pub energy: u128,
    pub energy_ratio: Rational,
}

impl MeasureReport {
    pub const CSV_HEADER: [&'static str; 7] = [
        "group",
        "|A|",
        "eps_num",
        "eps_den",
        "delta_H",
        "energy",
        "energy_ratio",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.group.clone(),
            self.set_size.to_string(),
            self.epsilon_min.num().to_string(),
            self.epsilon_min.den().to_string(),
            self.delta_h.to_string(),
            self.energy.to_string(),
            self.energy_ratio.to_string(),
        ]
    }
}

pub fn measure_report(a: &GroupSet) -> Result<MeasureReport> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let r = sum_counts(a, a)?;
    let k = a.len();
    let energy = energy_from_counts(&r);
    Ok(MeasureReport {
        group: a.group().to_string(),
        set_size: k,
        epsilon_min: epsilon_from_counts(&r, k).value,
        delta_h: delta_h_from_counts(&r, k),
        energy,
        energy_ratio: Rational::new(energy, (k as u128).pow(3)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::uniform_on;
    use crate::group::{enumerate_subgroups, Group};
    use approx::assert_abs_diff_eq;

    fn minus_one(n: usize, t: usize) -> GroupSet {
        let g = Group::power(2, n).unwrap();
        let mut a = GroupSet::full(&g);
        a.remove(t);
        a
    }

    #[test]
    fn epsilon_examples() {
        let g = Group::new(&[4, 2]).unwrap();
        for h in enumerate_subgroups(&g).unwrap() {
            assert_eq!(epsilon_min(h.members()).unwrap().value, Rational::zero());
        }
        let e = epsilon_min(&minus_one(3, 5)).unwrap();
        assert_eq!(e.value, Rational::new(6, 49));
        assert_eq!(e.witness.len(), 7);
        assert!(e.witness.contains(0));
        assert_eq!(epsilon_min(&GroupSet::empty(&g)), Err(Error::EmptySet));
    }

    #[test]
    fn approx_group_predicate() {
        let a = minus_one(3, 1);
        assert!(!is_distributional_approx(&a, Rational::new(1, 10)).unwrap());
        assert!(is_distributional_approx(&a, Rational::new(6, 49)).unwrap());
        assert!(is_distributional_approx(&a, Rational::one()).unwrap());
        assert!(is_distributional_approx(&a, Rational::new(11, 10)).is_err());
        let g = Group::new(&[9]).unwrap();
        let h = GroupSet::from_flats(&g, [0, 3, 6]);
        assert!(is_distributional_approx(&h, Rational::zero()).unwrap());
    }

    #[test]
    fn delta_h_examples() {
        let g = Group::new(&[4]).unwrap();
        let a = GroupSet::from_flats(&g, [0, 1]);
        // sums: 0 once, 1 twice, 2 once
        let expect = -(0.25f64 * 0.25f64.ln() * 2.0 + 0.5 * 0.5f64.ln()) - 2f64.ln();
        assert_abs_diff_eq!(delta_h(&a).unwrap(), expect, epsilon = 1e-15);
        assert_abs_diff_eq!(delta_h(&a).unwrap(), 0.5 * 2f64.ln(), epsilon = 1e-12);

        let g = Group::new(&[3, 6]).unwrap();
        for h in enumerate_subgroups(&g).unwrap() {
            for x in [0, 4, 11] {
                assert_eq!(delta_h(&h.coset_of(x).members()).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn ruzsa_examples() {
        let g = Group::new(&[2, 4]).unwrap();
        for h in enumerate_subgroups(&g).unwrap() {
            let uh = uniform_on(h.members()).unwrap();
            assert_eq!(ruzsa_dist(&uh, &uh).unwrap(), 0.0);
            for x in 0..8 {
                let c = uniform_on(&h.coset_of(x).members()).unwrap();
                assert!(ruzsa_dist(&uh, &c).unwrap().abs() < 1e-12);
            }
        }
        let a = GroupSet::from_flats(&g, [0, 1, 3]);
        let ua = uniform_on(&a).unwrap();
        assert_eq!(ruzsa_dist(&ua, &ua).unwrap(), delta_h(&a).unwrap());
        assert!(delta_h(&a).unwrap() > 0.0);
    }

    #[test]
    fn energy_examples() {
        let g = Group::new(&[4]).unwrap();
        assert_eq!(additive_energy(&GroupSet::from_flats(&g, [3])).unwrap(), 1);
        assert_eq!(additive_energy(&GroupSet::from_flats(&g, [0, 1])).unwrap(), 6);
        let v = Group::power(2, 4).unwrap();
        for h in enumerate_subgroups(&v).unwrap() {
            assert_eq!(additive_energy(h.members()).unwrap(), (h.order() as u128).pow(3));
        }
    }

    #[test]
    fn lemma31_examples() {
        let g = Group::power(2, 3).unwrap();
        let c = lemma31_bound(&GroupSet::full(&g)).unwrap();
        assert_eq!((c.eps, c.delta_h, c.bound, c.holds), (Rational::zero(), 0.0, 0.0, Verdict::Holds));

        let a = minus_one(6, 17);
        let c = lemma31_bound(&a).unwrap();
        assert_eq!(c.eps, Rational::new(62, 3969));
        let eps = 62.0 / 3969.0;
        assert_abs_diff_eq!(c.bound, 2.0 * eps * (63.0 / eps as f64).ln(), epsilon = 1e-14);
        assert_eq!(c.holds, Verdict::Holds);
        assert!(c.delta_h > 0.0 && c.delta_h <= c.bound);

        // {0, 1} in Z_4 has eps = 1/4 > e^-2
        let z4 = Group::new(&[4]).unwrap();
        assert_eq!(
            lemma31_bound(&GroupSet::from_flats(&z4, [0, 1])).unwrap().holds,
            Verdict::NotApplicable
        );
    }

    #[test]
    fn report_fields() {
        let g = Group::power(2, 3).unwrap();
        let r = measure_report(&minus_one(3, 2)).unwrap();
        assert_eq!(r.set_size, 7);
        assert_eq!(r.epsilon_min, Rational::new(6, 49));
        // 7^2 + 7 * 6^2
        assert_eq!(r.energy, 301);
        assert_eq!(r.energy_ratio, Rational::new(301, 343));
        assert_eq!(r.csv_record()[..4], ["2x2x2", "7", "6", "49"]);
        let full = measure_report(&GroupSet::full(&g)).unwrap();
        assert_eq!(full.delta_h, 0.0);
        let json = serde_json::to_value(&full).unwrap();
        assert_eq!(json["epsilon_min"]["num"], 0);
        assert_eq!(json["delta_H"], 0.0);
    }

    #[test]
    fn verdict_rendering() {
        assert_eq!(Verdict::Holds.to_string(), "true");
        assert_eq!(Verdict::NotApplicable.to_string(), "na");
        assert_eq!(serde_json::to_string(&Verdict::Fails).unwrap(), "false");
        assert_eq!(serde_json::to_string(&Verdict::NotApplicable).unwrap(), "null");
    }
}

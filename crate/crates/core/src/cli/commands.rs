use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::parse::{parse_candidates, parse_group_spec, parse_set};
use super::{RunConfig, GROUP_ORDER_CAP};
use crate::error::{Error, Result};
use crate::families::{generate, Family, FamilyParams, SeededRng};
use crate::group::{enumerate_subgroups_with, Group, GroupSet, Subgroup};
use crate::measures::{measure_report, MeasureReport};
use crate::rational::Rational;
use crate::recovery::{recover, recover_with, RecoveryResult};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))
}

fn load_group(config: &RunConfig) -> Result<Group> {
    let spec = config
        .group_spec
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("--group is required".into()))?;
    parse_group_spec(spec, GROUP_ORDER_CAP)
}

fn load_set(config: &RunConfig, group: &Group) -> Result<GroupSet> {
    let path = config
        .input_path
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("--set is required".into()))?;
    let set = parse_set(group, &read(path)?)?;
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(set)
}

pub fn cmd_analyze(config: &RunConfig) -> Result<MeasureReport> {
    let g = load_group(config)?;
    measure_report(&load_set(config, &g)?)
}

pub fn cmd_recover(config: &RunConfig) -> Result<RecoveryResult> {
    let g = load_group(config)?;
    let a = load_set(config, &g)?;
    let candidates = match &config.candidates_path {
        Some(p) => Some(parse_candidates(&g, &read(p)?)?),
        None => None,
    };
    recover(&a, candidates.as_deref(), &config.recovery_config())
}

pub const SWEEP_HEADER: [&str; 24] = [
    "family",
    "p",
    "n",
    "t",
    "trial",
    "group",
    "|H|",
    "|A|",
    "deleted",
    "added",
    "eps",
    "eps_ratio",
    "delta_H",
    "candidates",
    "alpha",
    "rec_|H|",
    "coset_rep",
    "symdiff",
    "ratio",
    "lemma32_bound",
    "main_bound",
    "holds_32",
    "holds_main",
    "brute_force_symdiff",
];

/// One sweep instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub family: Family,
    pub p: usize,
    pub n: usize,
    pub t: usize,
    pub trial: usize,
    pub base_order: usize,
    pub deleted: usize,
    pub added: usize,
    /// `eps |H| / (deleted + 2 added)`.
    pub eps_ratio: Option<f64>,
    /// `all` when every subgroup was searched, `family` when only the
    /// trivial, base and full subgroups were.
    pub candidates: &'static str,
    pub recovery: RecoveryResult,
}

impl SweepRow {
    pub fn epsilon(&self) -> Rational {
        self.recovery.epsilon
    }

    pub fn csv_record(&self) -> Vec<String> {
        let r = &self.recovery;
        vec![
            self.family.to_string(),
            self.p.to_string(),
            self.n.to_string(),
            self.t.to_string(),
            self.trial.to_string(),
            r.group.clone(),
            self.base_order.to_string(),
            r.set_size.to_string(),
            self.deleted.to_string(),
            self.added.to_string(),
            r.epsilon.to_string(),
            self.eps_ratio.map(|x| x.to_string()).unwrap_or_default(),
            r.delta_h.to_string(),
            self.candidates.to_string(),
            r.alpha.to_string(),
            r.subgroup.order().to_string(),
            r.coset_rep.to_string(),
            r.symdiff.to_string(),
            r.ratio.to_string(),
            r.lemma32_bound.to_string(),
            r.main_bound.to_string(),
            r.holds_32.to_string(),
            r.holds_main.to_string(),
            r.brute_force_symdiff
                .map(|x| x.to_string())
                .unwrap_or_default(),
        ]
    }
}

/// Stream id for one instance, so each row is reproducible on its own.
fn stream_id(n: usize, t: usize, trial: usize) -> u64 {
    ((n as u64) << 48) ^ ((t as u64) << 32) ^ trial as u64
}

/// Every instance of `family` over the configured ranges, in `(n, t, trial)`
/// order.
pub fn cmd_sweep(config: &RunConfig) -> Result<Vec<SweepRow>> {
    let family: Family = config
        .family
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("--family is required".into()))?
        .parse()?;
    let rc = config.recovery_config();
    let mut all_subgroups: HashMap<Vec<usize>, Option<Vec<Subgroup>>> = HashMap::new();
    let mut rows = Vec::new();
    for &n in &config.n_range {
        for &t in &config.t_range {
            let params = FamilyParams::new(family, config.base, n, t);
            for trial in 0..config.trials {
                let mut rng = SeededRng::with_stream(config.seed, stream_id(n, t, trial));
                let inst = generate(&params, &mut rng)?;
                let g = inst.group();
                let all = all_subgroups
                    .entry(g.moduli().to_vec())
                    .or_insert_with(|| enumerate_subgroups_with(g, rc.limits).ok());
                let (recovery, candidates) = match all {
                    Some(all) => (recover_with(&inst.set, all, Some(all), &rc)?, "all"),
                    None => {
                        let fam = family_candidates(&inst.base);
                        (recover_with(&inst.set, &fam, Some(&fam), &rc)?, "family")
                    }
                };
                rows.push(SweepRow {
                    family,
                    p: config.base,
                    n,
                    t,
                    trial,
                    base_order: inst.base.order(),
                    deleted: inst.deleted.len(),
                    added: inst.added.len(),
                    eps_ratio: inst.eps_ratio(recovery.epsilon.to_f64()),
                    candidates,
                    recovery,
                });
            }
        }
    }
    Ok(rows)
}

/// Trivial, base and full subgroups, for groups too large to enumerate.
pub fn family_candidates(base: &Subgroup) -> Vec<Subgroup> {
    let g = base.group();
    let mut c = vec![Subgroup::trivial(g), base.clone(), Subgroup::full(g)];
    c.sort();
    c.dedup();
    c
}


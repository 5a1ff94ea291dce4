//! Text formats accepted on the command line.
//!
//! * group spec: moduli joined by `x`, e.g. `2x2x2` or `4x6`;
//! * set file: one element per line as comma- or space-separated
//!   coordinates;
//! * candidate file: one subgroup per line, given by generators separated
//!   by `;` (coordinates inside a generator separated by `,`).
//!
//! In files, blank lines and text after `#` are ignored. Errors carry the
//! 1-based line number.

use crate::error::{Error, Result};
use crate::group::{subgroup_closure, Group, GroupElem, GroupSet, Subgroup};

/// Parses `n1xn2x...` under the given order cap.
pub fn parse_group_spec(spec: &str, order_cap: usize) -> Result<Group> {
    let bad = |message: String| Error::GroupSpec {
        spec: spec.to_string(),
        message,
    };
    let trimmed = spec.trim();
    if trimmed.is_empty() {
        return Err(bad("empty".into()));
    }
    let moduli = trimmed
        .split(['x', 'X'])
        .enumerate()
        .map(|(i, tok)| {
            let tok = tok.trim();
            let m: usize = tok
                .parse()
                .map_err(|_| bad(format!("factor {} ({tok:?}) is not a positive integer", i + 1)))?;
            if m == 0 {
                return Err(bad(format!("factor {} is zero", i + 1)));
            }
            Ok(m)
        })
        .collect::<Result<Vec<usize>>>()?;
    Group::with_order_cap(&moduli, order_cap)
}

/// Strips a trailing `#` comment.
fn content(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_coords(text: &str, seps: &[char], line: usize) -> Result<Vec<i128>> {
    text.split(seps)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<i128>().map_err(|_| Error::Parse {
                line,
                message: format!("{t:?} is not an integer coordinate"),
            })
        })
        .collect()
}

fn element_at(group: &Group, coords: &[i128], line: usize) -> Result<GroupElem> {
    let at_line = |e: Error| Error::Parse {
        line,
        message: e.to_string(),
    };
    if coords.len() != group.rank() {
        return Err(at_line(Error::DimensionMismatch {
            expected: group.rank(),
            found: coords.len(),
        }));
    }
    let mut checked = Vec::with_capacity(coords.len());
    for (axis, (&c, &m)) in coords.iter().zip(group.moduli()).enumerate() {
        if c < 0 || c >= m as i128 {
            return Err(at_line(Error::CoordinateOutOfRange {
                axis,
                value: c,
                modulus: m,
            }));
        }
        checked.push(c as usize);
    }
    group.elem(&checked).map_err(at_line)
}

/// Parses a set file. Duplicate elements are rejected.
pub fn parse_set(group: &Group, text: &str) -> Result<GroupSet> {
    let mut set = GroupSet::empty(group);
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = content(raw);
        if body.is_empty() {
            continue;
        }
        let coords = parse_coords(body, &[',', ' ', '\t'], line)?;
        let x = element_at(group, &coords, line)?;
        if !set.insert(x.flat()) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate element {x}"),
            });
        }
    }
    Ok(set)
}

/// Parses a candidate file into the subgroups generated on each line.
pub fn parse_candidates(group: &Group, text: &str) -> Result<Vec<Subgroup>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = content(raw);
        if body.is_empty() {
            continue;
        }
        let gens = body
            .split(';')
            .map(str::trim)
            .filter(|g| !g.is_empty())
            .map(|g| {
                let coords = parse_coords(g, &[',', ' ', '\t'], line)?;
                element_at(group, &coords, line)
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(subgroup_closure(group, &gens)?);
    }
    if out.is_empty() {
        return Err(Error::NoCandidates);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Parses `a`, `a..b` (inclusive) or a comma-separated list of either.
pub fn parse_range(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidParameter(format!("bad range {text:?}"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: usize = lo.trim().parse().map_err(|_| bad())?;
            let hi: usize = hi.trim().parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    Ok(out)
}

/// Renders a set in the set-file format.
pub fn format_set(set: &GroupSet) -> String {
    set.elements().iter().map(|x| format!("{x}\n")).collect()
}

//! Brute-force verifier: a literal transcription of the three goodness
//! conditions as triple loops, sharing the report types but none of the
//! traversal machinery of [`crate::verify`]. Its whole purpose is to be an
//! independent oracle for the fast verifier, so it stays single-threaded,
//! uncapped, and free of bit-vector shortcuts.

use crate::construct::EdgeColoring;
use crate::mandate::{ColorTriple, Label, MandatorySet};
use crate::verify::{
    ConditionReport, MissingColorFailure, NeedFailure, TripleFailure, VerificationReport,
    VerifyError, VerifyStats,
};
use std::collections::BTreeMap;
use std::time::Instant;
use thiserror::Error;

/// Guard against the cubic loops; the oracle is for small instances only.
pub const MAX_ORACLE_VERTICES: usize = 2000;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{0} vertices exceed the oracle guard of {MAX_ORACLE_VERTICES}")]
    TooLarge(usize),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// Verdicts for all three conditions by exhaustive enumeration. Failure
/// lists are complete (never truncated) and ordered exactly as the fast
/// verifier orders them.
pub fn naive_verify(
    c: &EdgeColoring,
    m: &MandatorySet,
) -> Result<VerificationReport, OracleError> {
    let n = c.vertex_count();
    if n > MAX_ORACLE_VERTICES {
        return Err(OracleError::TooLarge(n));
    }
    let col2man: Vec<Label> = c
        .labels()
        .iter()
        .map(|name| {
            m.label_id(name)
                .ok_or_else(|| VerifyError::LabelNotInMandate(name.clone()))
        })
        .collect::<Result<_, _>>()?;
    let start = Instant::now();
    let to_mandate = |l: Label| col2man[l.0 as usize];

    let mut cond1 = Vec::new();
    let mut cond2 = Vec::new();
    let mut cond3 = Vec::new();
    let mut need_checks = 0u64;

    for x in 0..n {
        for y in 0..n {
            if y == x {
                continue;
            }
            let c1 = to_mandate(c.color(x, y));
            // condition (1): every need of the edge's color has a witness
            for need in m.needs_of(c1) {
                need_checks += 1;
                let witnessed = (0..n).any(|z| {
                    z != x
                        && z != y
                        && to_mandate(c.color(x, z)) == need.1
                        && to_mandate(c.color(y, z)) == need.2
                });
                if !witnessed {
                    cond1.push(NeedFailure {
                        x,
                        y,
                        need: [
                            m.label_name(need.0).to_string(),
                            m.label_name(need.1).to_string(),
                            m.label_name(need.2).to_string(),
                        ],
                    });
                }
            }
            // condition (2): only mandated triples occur
            for z in 0..n {
                if z == x || z == y {
                    continue;
                }
                let t = ColorTriple(
                    c1,
                    to_mandate(c.color(x, z)),
                    to_mandate(c.color(y, z)),
                );
                if !m.contains(t) {
                    cond2.push(TripleFailure {
                        x,
                        y,
                        z,
                        triple: [
                            c.label_name(c.color(x, y)).to_string(),
                            c.label_name(c.color(x, z)).to_string(),
                            c.label_name(c.color(y, z)).to_string(),
                        ],
                    });
                }
            }
        }
    }

    // condition (3): every label of the mandatory set at every vertex
    for x in 0..n {
        for ml in 0..m.label_count() {
            let present = (0..n)
                .any(|y| y != x && to_mandate(c.color(x, y)) == Label(ml as u8));
            if !present {
                cond3.push(MissingColorFailure {
                    x,
                    label: m.labels()[ml].clone(),
                });
            }
        }
    }

    let mut edge_counts = BTreeMap::new();
    for name in m.labels() {
        edge_counts.insert(name.clone(), 0u64);
    }
    for x in 0..n {
        for y in (x + 1)..n {
            let name = m.label_name(to_mandate(c.color(x, y)));
            *edge_counts.get_mut(name).unwrap() += 1;
        }
    }

    let orientation_note = if m.is_swap23_closed() {
        None
    } else {
        Some(
            "mandatory set is not closed under swapping the last two coordinates; \
             needs are oriented as c2 = c(x,z), c3 = c(y,z) on each ordered pair (x, y)"
                .to_string(),
        )
    };

    Ok(VerificationReport {
        stats: VerifyStats {
            vertex_count: n,
            edge_counts,
            need_checks,
            condition1_failures: cond1.len() as u64,
            condition2_failures: cond2.len() as u64,
            condition3_failures: cond3.len() as u64,
            wall_ms: start.elapsed().as_millis(),
        },
        condition1: ConditionReport {
            pass: cond1.is_empty(),
            failures: cond1,
            truncated: false,
        },
        condition2: ConditionReport {
            pass: cond2.is_empty(),
            failures: cond2,
            truncated: false,
        },
        condition3: ConditionReport {
            pass: cond3.is_empty(),
            failures: cond3,
            truncated: false,
        },
        orientation_note,
    })
}

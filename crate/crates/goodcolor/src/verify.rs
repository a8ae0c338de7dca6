//! The bit-row verifier for the three goodness conditions, plus the
//! relation-composition atom check.
//!
//! For every ordered pair (x, y) and every need (c1, c2, c3) of the edge's
//! color c1, a witness is any z with c(xz) = c2 and c(yz) = c3; the witness
//! set is the intersection of two precomputed neighbor rows. Condition (2)
//! falls out of the same loop: the union of all witness sets plus {x, y}
//! must cover the vertex set, and any uncovered z realizes a forbidden
//! triple. Condition (3) is checked directly even when implied.
//!
//! Work is partitioned into fixed vertex ranges independent of the thread
//! count; per-range results are merged in range order, so reports are
//! bitwise deterministic.

use crate::bitrow::{tail_mask, words_for, BitRow};
use crate::construct::EdgeColoring;
use crate::mandate::{Label, MandatorySet, Need};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::time::Instant;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("coloring label {0:?} does not appear in the mandatory set")]
    LabelNotInMandate(String),
    #[error("edge ({x}, {y}) is colored {actual:?} but the need expects {expected:?}")]
    NeedColorMismatch {
        x: usize,
        y: usize,
        actual: String,
        expected: String,
    },
}

// ============================================================================
// Color rows
// ============================================================================

/// Per-label neighbor rows: bit u of `row(l, v)` is set iff c(u, v) = l.
/// For every vertex the rows over all labels partition the other vertices.
pub struct ColorRows {
    n: usize,
    words: usize,
    labels: Vec<String>,
    // layout: [vertex][label][word], so one vertex's rows are contiguous
    bits: Vec<u64>,
}

impl ColorRows {
    /// Materializes the rows in one parallel pass over all ordered pairs.
    pub fn build(c: &EdgeColoring) -> ColorRows {
        let n = c.vertex_count();
        let label_count = c.labels().len();
        let words = words_for(n);
        let mut bits = vec![0u64; n * label_count * words];
        bits.par_chunks_mut(label_count * words)
            .enumerate()
            .for_each(|(v, chunk)| {
                for u in 0..n {
                    if u == v {
                        continue;
                    }
                    let l = c.color(v, u).0 as usize;
                    chunk[l * words + u / 64] |= 1u64 << (u % 64);
                }
            });
        ColorRows {
            n,
            words,
            labels: c.labels().to_vec(),
            bits,
        }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    fn raw(&self, l: u8, v: usize) -> &[u64] {
        let base = (v * self.labels.len() + l as usize) * self.words;
        &self.bits[base..base + self.words]
    }

    /// The neighbor row of `v` in color `l`, as an owned bit vector.
    pub fn row(&self, l: Label, v: usize) -> BitRow {
        BitRow::from_words(self.n, self.raw(l.0, v).to_vec())
    }

    /// Number of neighbors of `v` colored `l`.
    pub fn degree(&self, l: Label, v: usize) -> usize {
        self.raw(l.0, v).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// The color of edge (x, y) recovered from the rows.
    pub fn color_of(&self, x: usize, y: usize) -> Option<Label> {
        if x == y || x >= self.n || y >= self.n {
            return None;
        }
        (0..self.labels.len() as u8)
            .find(|&l| self.raw(l, x)[y / 64] >> (y % 64) & 1 == 1)
            .map(Label)
    }
}

/// Materializes the per-label neighbor rows of a coloring.
pub fn color_rows(c: &EdgeColoring) -> ColorRows {
    ColorRows::build(c)
}

/// The witness set of a need on the ordered pair (x, y): all z with
/// c(xz) = c2 and c(yz) = c3. Rejects a need whose first coordinate is not
/// the edge's color. x and y are never members.
pub fn witness_set(
    rows: &ColorRows,
    x: usize,
    y: usize,
    need: Need,
) -> Result<BitRow, VerifyError> {
    let actual = rows.color_of(x, y).expect("distinct in-range vertices");
    if actual != need.0 {
        return Err(VerifyError::NeedColorMismatch {
            x,
            y,
            actual: rows.labels[actual.0 as usize].clone(),
            expected: rows.labels[need.0 .0 as usize].clone(),
        });
    }
    let mut words: Vec<u64> = rows
        .raw(need.1 .0, x)
        .iter()
        .zip(rows.raw(need.2 .0, y))
        .map(|(a, b)| a & b)
        .collect();
    // x and y are excluded by construction (no self-loops and the edge color
    // differs from at most one of c2, c3); clear anyway per the contract.
    words[x / 64] &= !(1u64 << (x % 64));
    words[y / 64] &= !(1u64 << (y % 64));
    Ok(BitRow::from_words(rows.n, words))
}

// ============================================================================
// Reports
// ============================================================================

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NeedFailure {
    pub x: usize,
    pub y: usize,
    pub need: [String; 3],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripleFailure {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub triple: [String; 3],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MissingColorFailure {
    pub x: usize,
    pub label: String,
}

/// Verdict plus a capped, canonically ordered failure list. The verdict and
/// the total count are exact regardless of the cap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport<T> {
    pub pass: bool,
    pub failures: Vec<T>,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyStats {
    pub vertex_count: usize,
    pub edge_counts: BTreeMap<String, u64>,
    pub need_checks: u64,
    pub condition1_failures: u64,
    pub condition2_failures: u64,
    pub condition3_failures: u64,
    /// Not serialized: reports must be byte-identical across runs.
    #[serde(skip)]
    pub wall_ms: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub condition1: ConditionReport<NeedFailure>,
    pub condition2: ConditionReport<TripleFailure>,
    pub condition3: ConditionReport<MissingColorFailure>,
    pub stats: VerifyStats,
    /// Set when the mandatory set distinguishes witness orientations (is not
    /// closed under swapping the last two coordinates).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation_note: Option<String>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.condition1.pass && self.condition2.pass && self.condition3.pass
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// 0 means: use the ambient rayon pool.
    pub threads: usize,
    /// Per-condition bound on stored failures; verdicts and counts stay exact.
    pub failure_cap: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            threads: 0,
            failure_cap: 100,
        }
    }
}

impl VerifyOptions {
    pub fn uncapped() -> Self {
        VerifyOptions {
            threads: 0,
            failure_cap: usize::MAX,
        }
    }
}

// ============================================================================
// verify_good
// ============================================================================

struct NeedPlan {
    c2: Option<u8>, // coloring label ids; None when the mandate label never
    c3: Option<u8>, // occurs in the coloring, making the witness set empty
    names: [String; 3],
}

#[derive(Default)]
struct ChunkOutcome {
    need_checks: u64,
    cond1_count: u64,
    cond2_count: u64,
    cond1: Vec<NeedFailure>,
    cond2: Vec<TripleFailure>,
}

/// Size of the fixed work unit; chosen independently of the thread count so
/// that merged results do not depend on parallelism.
const VERTEX_CHUNK: usize = 64;

/// Checks all three goodness conditions of a coloring against a mandatory
/// set. Both orientations of every unordered edge are verified; failures are
/// data, not errors. The labels of the coloring must all appear in the
/// mandatory set.
pub fn verify_good(
    c: &EdgeColoring,
    m: &MandatorySet,
    opts: &VerifyOptions,
) -> Result<VerificationReport, VerifyError> {
    let col2man: Vec<u8> = c
        .labels()
        .iter()
        .map(|name| {
            m.label_id(name)
                .map(|l| l.0)
                .ok_or_else(|| VerifyError::LabelNotInMandate(name.clone()))
        })
        .collect::<Result<_, _>>()?;
    if opts.threads == 0 {
        Ok(run_verify(c, m, &col2man, opts.failure_cap))
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .expect("thread pool");
        Ok(pool.install(|| run_verify(c, m, &col2man, opts.failure_cap)))
    }
}

fn run_verify(
    c: &EdgeColoring,
    m: &MandatorySet,
    col2man: &[u8],
    cap: usize,
) -> VerificationReport {
    let start = Instant::now();
    let n = c.vertex_count();
    let words = words_for(n);
    let rows = ColorRows::build(c);

    let man2col: Vec<Option<u8>> = (0..m.label_count())
        .map(|ml| col2man.iter().position(|&cm| cm as usize == ml).map(|i| i as u8))
        .collect();

    // Needs of each coloring label, translated into coloring ids up front.
    let plans: Vec<Vec<NeedPlan>> = (0..c.labels().len())
        .map(|cl| {
            m.needs_of(Label(col2man[cl]))
                .into_iter()
                .map(|need| NeedPlan {
                    c2: man2col[need.1 .0 as usize],
                    c3: man2col[need.2 .0 as usize],
                    names: [
                        m.label_name(need.0).to_string(),
                        m.label_name(need.1).to_string(),
                        m.label_name(need.2).to_string(),
                    ],
                })
                .collect()
        })
        .collect();

    let chunk_count = n.div_ceil(VERTEX_CHUNK);
    let outcomes: Vec<ChunkOutcome> = (0..chunk_count)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * VERTEX_CHUNK;
            let hi = (lo + VERTEX_CHUNK).min(n);
            let mut out = ChunkOutcome::default();
            let mut covered = vec![0u64; words];
            for x in lo..hi {
                for y in 0..n {
                    if y == x {
                        continue;
                    }
                    let cxy = c.color(x, y);
                    let plan = &plans[cxy.0 as usize];
                    out.need_checks += plan.len() as u64;

                    covered.fill(0);
                    covered[x / 64] |= 1u64 << (x % 64);
                    covered[y / 64] |= 1u64 << (y % 64);
                    for need in plan {
                        let mut any = 0u64;
                        if let (Some(c2), Some(c3)) = (need.c2, need.c3) {
                            let rx = rows.raw(c2, x);
                            let ry = rows.raw(c3, y);
                            for ((cw, a), b) in covered.iter_mut().zip(rx).zip(ry) {
                                let t = a & b;
                                *cw |= t;
                                any |= t;
                            }
                        }
                        if any == 0 {
                            out.cond1_count += 1;
                            if out.cond1.len() < cap {
                                out.cond1.push(NeedFailure {
                                    x,
                                    y,
                                    need: need.names.clone(),
                                });
                            }
                        }
                    }

                    // Condition (2): every z outside the union realizes a
                    // triple that the mandatory set forbids.
                    for (wi, &cw) in covered.iter().enumerate() {
                        let full = if wi + 1 == words { tail_mask(n) } else { u64::MAX };
                        let mut missing = !cw & full;
                        while missing != 0 {
                            let z = wi * 64 + missing.trailing_zeros() as usize;
                            missing &= missing - 1;
                            out.cond2_count += 1;
                            if out.cond2.len() < cap {
                                out.cond2.push(TripleFailure {
                                    x,
                                    y,
                                    z,
                                    triple: [
                                        c.label_name(cxy).to_string(),
                                        c.label_name(c.color(x, z)).to_string(),
                                        c.label_name(c.color(y, z)).to_string(),
                                    ],
                                });
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();

    let mut cond1_count = 0u64;
    let mut cond2_count = 0u64;
    let mut need_checks = 0u64;
    let mut cond1 = Vec::new();
    let mut cond2 = Vec::new();
    for out in outcomes {
        cond1_count += out.cond1_count;
        cond2_count += out.cond2_count;
        need_checks += out.need_checks;
        cond1.extend(out.cond1.into_iter().take(cap.saturating_sub(cond1.len())));
        cond2.extend(out.cond2.into_iter().take(cap.saturating_sub(cond2.len())));
    }

    // Condition (3): every mandate label at every vertex.
    let mut cond3_count = 0u64;
    let mut cond3 = Vec::new();
    for x in 0..n {
        for (ml, mapped) in man2col.iter().enumerate() {
            let present = mapped.map(|cl| rows.degree(Label(cl), x) > 0).unwrap_or(false);
            if !present {
                cond3_count += 1;
                if cond3.len() < cap {
                    cond3.push(MissingColorFailure {
                        x,
                        label: m.labels()[ml].clone(),
                    });
                }
            }
        }
    }

    let mut edge_counts = BTreeMap::new();
    for (ml, mapped) in man2col.iter().enumerate() {
        let total: u64 = match mapped {
            Some(cl) => (0..n).map(|v| rows.degree(Label(*cl), v) as u64).sum::<u64>() / 2,
            None => 0,
        };
        edge_counts.insert(m.labels()[ml].clone(), total);
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

    VerificationReport {
        condition1: ConditionReport {
            pass: cond1_count == 0,
            truncated: cond1_count > cond1.len() as u64,
            failures: cond1,
        },
        condition2: ConditionReport {
            pass: cond2_count == 0,
            truncated: cond2_count > cond2.len() as u64,
            failures: cond2,
        },
        condition3: ConditionReport {
            pass: cond3_count == 0,
            truncated: cond3_count > cond3.len() as u64,
            failures: cond3,
        },
        stats: VerifyStats {
            vertex_count: n,
            edge_counts,
            need_checks,
            condition1_failures: cond1_count,
            condition2_failures: cond2_count,
            condition3_failures: cond3_count,
            wall_ms: start.elapsed().as_millis(),
        },
        orientation_note,
    }
}

// ============================================================================
// Atom property
// ============================================================================

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomStatus {
    /// Some pair is witnessed and all pairs of that color are.
    Holds,
    /// The composition misses the color entirely.
    Vacuous,
    /// Some pairs of the color are witnessed and some are not.
    Violated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtomEntry {
    pub alpha: String,
    pub beta: String,
    pub gamma: String,
    pub gamma_pairs: u64,
    pub witnessed_pairs: u64,
    pub status: AtomStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtomViolation {
    pub alpha: String,
    pub beta: String,
    pub gamma: String,
    pub x: usize,
    pub z: usize,
}

/// Result of the composition check: for every ordered label triple
/// (alpha, beta, gamma), if any gamma-pair extends to an alpha-beta path
/// then all gamma-pairs must.
#[derive(Clone, Debug, Serialize)]
pub struct AtomReport {
    pub pass: bool,
    pub entries: Vec<AtomEntry>,
    pub violations: Vec<AtomViolation>,
    pub truncated: bool,
    #[serde(skip)]
    pub wall_ms: u128,
}

/// Checks that the color relations behave as atoms under composition:
/// (R_alpha o R_beta) meeting R_gamma nonemptily forces R_gamma inside the
/// composition. A pair (x, z) has an alpha-beta path iff the alpha-row of x
/// intersects the beta-row of z, the same orientation as [`witness_set`].
pub fn check_atom_property(c: &EdgeColoring, opts: &VerifyOptions) -> AtomReport {
    if opts.threads == 0 {
        run_atoms(c, opts.failure_cap)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .expect("thread pool");
        pool.install(|| run_atoms(c, opts.failure_cap))
    }
}

fn run_atoms(c: &EdgeColoring, cap: usize) -> AtomReport {
    let start = Instant::now();
    let n = c.vertex_count();
    let rows = ColorRows::build(c);
    let lc = c.labels().len();
    let cube = lc * lc * lc;

    let chunk_count = n.div_ceil(VERTEX_CHUNK);
    let witnessed: Vec<u64> = (0..chunk_count)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * VERTEX_CHUNK;
            let hi = (lo + VERTEX_CHUNK).min(n);
            let mut counts = vec![0u64; cube];
            for x in lo..hi {
                for z in 0..n {
                    if z == x {
                        continue;
                    }
                    let gamma = c.color(x, z).0 as usize;
                    for alpha in 0..lc {
                        let rx = rows.raw(alpha as u8, x);
                        for beta in 0..lc {
                            let rz = rows.raw(beta as u8, z);
                            let hit = rx.iter().zip(rz).any(|(a, b)| a & b != 0);
                            if hit {
                                counts[(alpha * lc + beta) * lc + gamma] += 1;
                            }
                        }
                    }
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; cube],
            |mut acc, chunk| {
                for (a, b) in acc.iter_mut().zip(chunk) {
                    *a += b;
                }
                acc
            },
        );

    let gamma_pairs: Vec<u64> = (0..lc)
        .map(|l| (0..n).map(|v| rows.degree(Label(l as u8), v) as u64).sum())
        .collect();

    let mut entries = Vec::with_capacity(cube);
    let mut violated = Vec::new();
    for alpha in 0..lc {
        for beta in 0..lc {
            for gamma in 0..lc {
                let w = witnessed[(alpha * lc + beta) * lc + gamma];
                let total = gamma_pairs[gamma];
                let status = if w == 0 {
                    AtomStatus::Vacuous
                } else if w == total {
                    AtomStatus::Holds
                } else {
                    AtomStatus::Violated
                };
                if status == AtomStatus::Violated {
                    violated.push((alpha as u8, beta as u8, gamma as u8));
                }
                entries.push(AtomEntry {
                    alpha: c.labels()[alpha].clone(),
                    beta: c.labels()[beta].clone(),
                    gamma: c.labels()[gamma].clone(),
                    gamma_pairs: total,
                    witnessed_pairs: w,
                    status,
                });
            }
        }
    }

    // Second pass only when something went wrong: collect example pairs.
    let mut violations = Vec::new();
    let mut violation_count = 0u64;
    if !violated.is_empty() {
        'outer: for x in 0..n {
            for z in 0..n {
                if z == x {
                    continue;
                }
                let gamma = c.color(x, z).0;
                for &(alpha, beta, vg) in &violated {
                    if vg != gamma {
                        continue;
                    }
                    let rx = rows.raw(alpha, x);
                    let rz = rows.raw(beta, z);
                    if !rx.iter().zip(rz).any(|(a, b)| a & b != 0) {
                        violation_count += 1;
                        if violations.len() < cap {
                            violations.push(AtomViolation {
                                alpha: c.labels()[alpha as usize].clone(),
                                beta: c.labels()[beta as usize].clone(),
                                gamma: c.labels()[vg as usize].clone(),
                                x,
                                z,
                            });
                        } else {
                            break 'outer;
                        }
                    }
                }
            }
        }
    }

    AtomReport {
        pass: violated.is_empty(),
        entries,
        truncated: violation_count > violations.len() as u64,
        violations,
        wall_ms: start.elapsed().as_millis(),
    }
}

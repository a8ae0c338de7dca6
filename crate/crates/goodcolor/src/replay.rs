//! Case-by-case replay of the goodness argument for the 3432-vertex
//! coloring.
//!
//! Every ordered vertex pair is brought into canonical position — X maps to
//! {1..7} and Y overlaps it in its last j elements — and each need of the
//! edge is then checked against a small *candidate family* of 7-subsets
//! fixed per (j, need). The families encode the constructive witnesses of
//! the case analysis: once a splitting graph has no monochromatic K4, K4,3,
//! or K5,2, each family is guaranteed to contain a witness, no matter how
//! the splitting graph otherwise looks. Replaying therefore re-derives
//! condition (1) from the splitting-graph properties alone instead of
//! trusting the verifier's row intersections.
//!
//! Candidates are mapped back through the inverse permutation before their
//! colors are evaluated: colors always live in original coordinates, because
//! the splitting graph is a fixed labeled graph and the coloring is not
//! invariant under relabeling.

use crate::construct::{base_color, subset_color, ConstructError, EdgeColoring, BLUE0, BLUE1, RED};
use crate::mandate::{ColorTriple, Label, Need};
use crate::points::{intersection_size, vertex_index, PointSet};
use crate::splitgraph::SplittingGraph;
use crate::verify::VerifyOptions;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::OnceLock;
use std::time::Instant;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("expected two distinct 7-subsets of [1, 14]")]
    BadVertices,
    #[error("need ({0}, {1}, {2}) does not arise for a {3}-overlap edge")]
    NeedNotApplicable(String, String, String, u32),
    #[error("coloring must be the 3432-vertex subset coloring with labels r, b0, b1")]
    NotSubsetColoring,
    #[error("coloring disagrees with the splitting graph on pair ({x}, {y})")]
    ColoringMismatch { x: usize, y: usize },
    #[error(transparent)]
    Construct(#[from] ConstructError),
}

// ============================================================================
// Canonical position
// ============================================================================

/// The permutation of [14] that sends an edge (X, Y) to canonical position:
/// X \ Y (ascending) to 1..7-j, X ∩ Y to 8-j..7, Y \ X to 8..14-j, and the
/// remaining points to 15-j..14.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalMap {
    j: u32,
    forward: [u8; 14],
    inverse: [u8; 14],
}

pub fn canonical_map(x: PointSet, y: PointSet) -> Result<CanonicalMap, ReplayError> {
    if x.len() != 7 || y.len() != 7 || !x.fits_ground(14) || !y.fits_ground(14) || x == y {
        return Err(ReplayError::BadVertices);
    }
    let j = intersection_size(x, y);
    let mut forward = [0u8; 14];
    let mut inverse = [0u8; 14];
    let mut next = 1u8;
    let groups = [
        x.difference(y),
        x.intersection(y),
        y.difference(x),
        PointSet::range(1, 14).difference(x.union(y)),
    ];
    for group in groups {
        for p in group.points() {
            forward[(p - 1) as usize] = next;
            inverse[(next - 1) as usize] = p as u8;
            next += 1;
        }
    }
    debug_assert_eq!(next, 15);
    Ok(CanonicalMap { j, forward, inverse })
}

impl CanonicalMap {
    #[inline]
    pub fn overlap(&self) -> u32 {
        self.j
    }

    #[inline]
    pub fn to_canonical(&self, p: u32) -> u32 {
        self.forward[(p - 1) as usize] as u32
    }

    #[inline]
    pub fn from_canonical(&self, q: u32) -> u32 {
        self.inverse[(q - 1) as usize] as u32
    }

    pub fn image(&self, s: PointSet) -> PointSet {
        PointSet::from_points(s.points().map(|p| self.to_canonical(p)))
    }

    pub fn preimage(&self, s: PointSet) -> PointSet {
        PointSet::from_points(s.points().map(|q| self.from_canonical(q)))
    }

    #[inline]
    fn preimage_mask(&self, canonical: u64) -> u64 {
        let mut rem = canonical;
        let mut out = 0u64;
        while rem != 0 {
            let q = rem.trailing_zeros() as usize;
            rem &= rem - 1;
            out |= 1u64 << (self.inverse[q] - 1);
        }
        out
    }
}

/// The spine-and-wings partition of X ∪ Y in canonical coordinates: the
/// spine is the shared part, the wings are the private parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpineWings {
    pub wing_x: PointSet,
    pub spine: PointSet,
    pub wing_y: PointSet,
}

impl SpineWings {
    pub fn for_overlap(j: u32) -> SpineWings {
        assert!(j <= 6, "overlap of distinct 7-subsets is at most 6");
        SpineWings {
            wing_x: PointSet::range(1, 7 - j),
            spine: PointSet::from_points(8 - j..=7),
            wing_y: PointSet::range(8, 14 - j),
        }
    }
}

// ============================================================================
// Candidate families
// ============================================================================

/// One block of a candidate pattern: a fixed part or a choose-t-from-S part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    Fixed(PointSet),
    Choose { count: u32, from: PointSet },
}

/// A single pattern like {1,2,3,[8,9,10,11]_2}: the union of the fixed
/// blocks plus the indicated number of points from each choose block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selector {
    blocks: Vec<Block>,
}

impl Selector {
    fn new(blocks: Vec<Block>) -> Selector {
        let total: u32 = blocks
            .iter()
            .map(|b| match b {
                Block::Fixed(s) => s.len(),
                Block::Choose { count, .. } => *count,
            })
            .sum();
        debug_assert_eq!(total, 7, "candidate patterns describe 7-sets");
        Selector { blocks }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    fn enumerate_into(&self, out: &mut Vec<PointSet>) {
        fn rec(blocks: &[Block], acc: PointSet, out: &mut Vec<PointSet>) {
            match blocks.split_first() {
                None => out.push(acc),
                Some((Block::Fixed(s), rest)) => rec(rest, acc.union(*s), out),
                Some((Block::Choose { count, from }, rest)) => {
                    // ascending-mask enumeration of the subsets of `from`
                    let positions: Vec<u32> = from.points().collect();
                    let k = *count as usize;
                    let mut idx: Vec<usize> = (0..k).collect();
                    loop {
                        let chosen =
                            PointSet::from_points(idx.iter().map(|&i| positions[i]));
                        rec(rest, acc.union(chosen), out);
                        // next combination in lexicographic index order
                        let mut i = k;
                        loop {
                            if i == 0 {
                                return;
                            }
                            i -= 1;
                            if idx[i] < positions.len() - (k - i) {
                                idx[i] += 1;
                                for t in (i + 1)..k {
                                    idx[t] = idx[t - 1] + 1;
                                }
                                break;
                            }
                        }
                    }
                }
            }
        }
        rec(&self.blocks, PointSet::EMPTY, out);
    }
}

/// A union of selectors in canonical coordinates; the candidate pool for one
/// (overlap, need) pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateFamily {
    overlap: u32,
    need: Need,
    selectors: Vec<Selector>,
}

impl CandidateFamily {
    pub fn overlap(&self) -> u32 {
        self.overlap
    }

    pub fn need(&self) -> Need {
        self.need
    }

    pub fn selectors(&self) -> &[Selector] {
        &self.selectors
    }

    /// All member 7-sets in canonical coordinates, deterministic order,
    /// duplicates removed keeping the first occurrence.
    pub fn members(&self) -> Vec<PointSet> {
        let mut out = Vec::new();
        for sel in &self.selectors {
            sel.enumerate_into(&mut out);
        }
        let mut seen = std::collections::HashSet::new();
        out.retain(|s| seen.insert(*s));
        out
    }

    pub fn len(&self) -> usize {
        self.members().len()
    }

    pub fn is_empty(&self) -> bool {
        self.selectors.is_empty()
    }
}

fn fixed(points: &[u32]) -> Selector {
    Selector::new(vec![Block::Fixed(PointSet::from_points(points.iter().copied()))])
}

fn sel(blocks: Vec<Block>) -> Selector {
    Selector::new(blocks)
}

fn bfix(points: &[u32]) -> Block {
    Block::Fixed(PointSet::from_points(points.iter().copied()))
}

fn bchoose(count: u32, points: &[u32]) -> Block {
    Block::Choose {
        count,
        from: PointSet::from_points(points.iter().copied()),
    }
}

/// Edge color forced by the overlap, when the overlap forces one.
fn edge_color_for_overlap(j: u32) -> Option<Label> {
    match j {
        0 => Some(BLUE0),
        1 => Some(BLUE1),
        2 => None, // either blue shade, decided by the splitting graph
        _ => Some(RED),
    }
}

/// The candidate selectors for overlap j and need coordinates (c2, c3), in
/// canonical position. Returns None for needs that cannot arise.
fn selectors_for(j: u32, c2: Label, c3: Label) -> Option<Vec<Selector>> {
    let key = (c2, c3);
    let list = match j {
        0 => match key {
            (RED, RED) => vec![fixed(&[5, 6, 7, 8, 9, 10, 14])],
            (RED, BLUE0) | (RED, BLUE1) => {
                vec![sel(vec![bfix(&[1, 2, 3, 4, 5]), bchoose(2, &[8, 9, 10, 11])])]
            }
            (BLUE0, RED) | (BLUE1, RED) => {
                vec![sel(vec![bchoose(2, &[1, 2, 3, 4]), bfix(&[8, 9, 10, 11, 12])])]
            }
            _ => return None,
        },
        1 => match key {
            (RED, RED) => vec![fixed(&[5, 6, 7, 8, 9, 10, 14])],
            (RED, BLUE0) => vec![fixed(&[1, 2, 3, 4, 5, 6, 14])],
            (RED, BLUE1) => vec![fixed(&[1, 2, 3, 4, 5, 6, 8])],
            (BLUE0, RED) => vec![fixed(&[8, 9, 10, 11, 12, 13, 14])],
            (BLUE1, RED) => vec![fixed(&[6, 8, 9, 10, 11, 12, 13])],
            _ => return None,
        },
        2 => match key {
            (RED, RED) => vec![fixed(&[5, 6, 7, 8, 9, 10, 14])],
            (RED, BLUE0) => vec![fixed(&[1, 2, 3, 4, 5, 13, 14])],
            (RED, BLUE1) => vec![fixed(&[1, 2, 3, 4, 5, 8, 14])],
            (BLUE0, RED) => vec![fixed(&[8, 9, 10, 11, 12, 13, 14])],
            (BLUE1, RED) => vec![fixed(&[7, 8, 9, 10, 11, 12, 13])],
            _ => return None,
        },
        3 => match key {
            // both wings hold a non-monochromatic K4 of the splitting graph
            (BLUE0 | BLUE1, BLUE0 | BLUE1) => vec![sel(vec![
                bchoose(2, &[1, 2, 3, 4]),
                bchoose(2, &[8, 9, 10, 11]),
                bfix(&[12, 13, 14]),
            ])],
            (RED, BLUE0) | (RED, BLUE1) => vec![
                sel(vec![bfix(&[1, 2, 3]), bchoose(2, &[8, 9, 10, 11]), bfix(&[13, 14])]),
                sel(vec![bfix(&[1, 2, 3]), bchoose(2, &[8, 9, 10, 11]), bfix(&[12, 13])]),
            ],
            (BLUE0, RED) | (BLUE1, RED) => vec![
                sel(vec![bchoose(2, &[1, 2, 3, 4]), bfix(&[9, 10, 11, 13, 14])]),
                sel(vec![bchoose(2, &[1, 2, 3, 4]), bfix(&[8, 9, 10, 12, 13])]),
            ],
            (RED, RED) => vec![fixed(&[5, 6, 7, 8, 9, 10, 14])],
            _ => return None,
        },
        4 => match key {
            (RED, RED) => vec![fixed(&[5, 6, 7, 8, 9, 10, 14])],
            (RED, BLUE0) => vec![fixed(&[1, 2, 3, 11, 12, 13, 14])],
            (RED, BLUE1) => vec![fixed(&[1, 2, 3, 10, 11, 12, 13])],
            (BLUE0, RED) => vec![fixed(&[8, 9, 10, 11, 12, 13, 14])],
            (BLUE1, RED) => vec![sel(vec![
                bchoose(1, &[1, 2, 3]),
                bfix(&[8, 9, 10]),
                bchoose(3, &[11, 12, 13, 14]),
            ])],
            // two exclusive routes: both wings non-monochromatic (pairs from
            // each wing), or one wing plus the spine bridging to the other
            (BLUE0 | BLUE1, BLUE0 | BLUE1) => vec![
                sel(vec![
                    bchoose(2, &[1, 2, 3]),
                    bchoose(2, &[8, 9, 10]),
                    bchoose(3, &[11, 12, 13, 14]),
                ]),
                sel(vec![
                    bchoose(1, &[1, 2, 3]),
                    bchoose(1, &[4, 5, 6, 7]),
                    bchoose(1, &[8, 9, 10]),
                    bfix(&[11, 12, 13, 14]),
                ]),
            ],
            _ => return None,
        },
        5 => match key {
            (RED, RED) => vec![fixed(&[5, 6, 7, 8, 9, 10, 14])],
            (RED, BLUE0) | (RED, BLUE1) => vec![sel(vec![
                bfix(&[1, 2]),
                bchoose(2, &[3, 4, 5, 6]),
                bfix(&[12, 13, 14]),
            ])],
            (BLUE0, RED) | (BLUE1, RED) => vec![sel(vec![
                bchoose(2, &[3, 4, 5, 6]),
                bfix(&[8, 9, 12, 13, 14]),
            ])],
            // homogeneous: a spine pair is a 2-intersection with both X and Y
            (BLUE0, BLUE0) | (BLUE1, BLUE1) => vec![sel(vec![
                bchoose(2, &[3, 4, 5, 6]),
                bfix(&[10, 11, 12, 13, 14]),
            ])],
            // heterogeneous: one fixed witness per shading of the wing edges
            // 1-2 and 8-9, plus the K5,2 route through the spine
            (BLUE0, BLUE1) => vec![
                fixed(&[1, 2, 8, 11, 12, 13, 14]),
                fixed(&[8, 9, 10, 11, 12, 13, 14]),
                fixed(&[1, 2, 8, 9, 12, 13, 14]),
                sel(vec![
                    bchoose(1, &[1, 2]),
                    bchoose(1, &[3, 4, 5, 6, 7]),
                    bfix(&[10, 11, 12, 13, 14]),
                ]),
            ],
            (BLUE1, BLUE0) => vec![
                fixed(&[1, 8, 9, 11, 12, 13, 14]),
                fixed(&[1, 2, 10, 11, 12, 13, 14]),
                fixed(&[1, 2, 8, 9, 12, 13, 14]),
                sel(vec![
                    bchoose(1, &[3, 4, 5, 6, 7]),
                    bchoose(1, &[8, 9]),
                    bfix(&[10, 11, 12, 13, 14]),
                ]),
            ],
            _ => return None,
        },
        6 => match key {
            (RED, RED) => vec![fixed(&[5, 6, 7, 8, 9, 10, 14])],
            (BLUE1, BLUE0) => vec![fixed(&[1, 9, 10, 11, 12, 13, 14])],
            (BLUE0, BLUE1) => vec![fixed(&[8, 9, 10, 11, 12, 13, 14])],
            (BLUE0, BLUE0) | (BLUE1, BLUE1) => vec![sel(vec![
                bchoose(2, &[2, 3, 4, 5]),
                bfix(&[10, 11, 12, 13, 14]),
            ])],
            (RED, BLUE0) | (RED, BLUE1) => vec![sel(vec![
                bfix(&[1]),
                bchoose(2, &[2, 3, 4, 5]),
                bfix(&[11, 12, 13, 14]),
            ])],
            (BLUE0, RED) | (BLUE1, RED) => vec![sel(vec![
                bchoose(2, &[2, 3, 4, 5]),
                bfix(&[8, 11, 12, 13, 14]),
            ])],
            _ => return None,
        },
        _ => return None,
    };
    Some(list)
}

/// The candidate family for a need of a j-overlap edge in canonical
/// coordinates. The need's first coordinate must match the color such an
/// edge carries (for j = 2 either blue shade is accepted; the families
/// coincide).
pub fn candidate_family(j: u32, need: Need) -> Result<CandidateFamily, ReplayError> {
    let not_applicable = || {
        ReplayError::NeedNotApplicable(
            label_name(need.0).to_string(),
            label_name(need.1).to_string(),
            label_name(need.2).to_string(),
            j,
        )
    };
    if j > 6 {
        return Err(not_applicable());
    }
    match edge_color_for_overlap(j) {
        Some(c1) if need.0 != c1 => return Err(not_applicable()),
        None if need.0 != BLUE0 && need.0 != BLUE1 => return Err(not_applicable()),
        _ => {}
    }
    let selectors = selectors_for(j, need.1, need.2).ok_or_else(not_applicable)?;
    Ok(CandidateFamily {
        overlap: j,
        need,
        selectors,
    })
}

fn label_name(l: Label) -> &'static str {
    match l {
        RED => "r",
        BLUE0 => "b0",
        BLUE1 => "b1",
        _ => "?",
    }
}

/// Needs of an edge colored c1 in the red/blue two-shade family, in the
/// canonical (c2, c3) order.
fn needs_of_color(c1: Label) -> &'static [Need] {
    const fn t(a: Label, b: Label, c: Label) -> Need {
        ColorTriple(a, b, c)
    }
    static RED_NEEDS: [Need; 9] = [
        t(RED, RED, RED),
        t(RED, RED, BLUE0),
        t(RED, RED, BLUE1),
        t(RED, BLUE0, RED),
        t(RED, BLUE0, BLUE0),
        t(RED, BLUE0, BLUE1),
        t(RED, BLUE1, RED),
        t(RED, BLUE1, BLUE0),
        t(RED, BLUE1, BLUE1),
    ];
    static B0_NEEDS: [Need; 5] = [
        t(BLUE0, RED, RED),
        t(BLUE0, RED, BLUE0),
        t(BLUE0, RED, BLUE1),
        t(BLUE0, BLUE0, RED),
        t(BLUE0, BLUE1, RED),
    ];
    static B1_NEEDS: [Need; 5] = [
        t(BLUE1, RED, RED),
        t(BLUE1, RED, BLUE0),
        t(BLUE1, RED, BLUE1),
        t(BLUE1, BLUE0, RED),
        t(BLUE1, BLUE1, RED),
    ];
    match c1 {
        RED => &RED_NEEDS,
        BLUE0 => &B0_NEEDS,
        BLUE1 => &B1_NEEDS,
        _ => unreachable!("two-shade colorings have three labels"),
    }
}

/// Precomputed canonical candidate masks per (overlap, (c2, c3)).
fn family_masks() -> &'static [[Vec<u64>; 9]; 7] {
    static TABLE: OnceLock<[[Vec<u64>; 9]; 7]> = OnceLock::new();
    TABLE.get_or_init(|| {
        std::array::from_fn(|j| {
            std::array::from_fn(|key| {
                let (c2, c3) = (Label((key / 3) as u8), Label((key % 3) as u8));
                match selectors_for(j as u32, c2, c3) {
                    None => Vec::new(),
                    Some(selectors) => {
                        let fam = CandidateFamily {
                            overlap: j as u32,
                            need: ColorTriple(RED, c2, c3), // first slot unused here
                            selectors,
                        };
                        fam.members().iter().map(|s| s.mask()).collect()
                    }
                }
            })
        })
    })
}

// ============================================================================
// Replay
// ============================================================================

/// Outcome of one need of one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeedOutcome {
    pub need: Need,
    /// First family member (in original coordinates) realizing the need.
    pub witness: Option<PointSet>,
    pub family_size: u32,
}

/// Replays one ordered edge: canonicalizes, then scans each need's
/// candidate family for a witness, evaluating true colors in original
/// coordinates. The coloring must agree with the splitting graph.
pub fn replay_edge(
    c: &EdgeColoring,
    g: &SplittingGraph,
    x: PointSet,
    y: PointSet,
) -> Result<Vec<NeedOutcome>, ReplayError> {
    let map = canonical_map(x, y)?;
    let c1 = base_color(x, y, g)?;
    if c.vertex_count() == 3432 {
        let xi = vertex_index(x, 14, 7).expect("validated above").0 as usize;
        let yi = vertex_index(y, 14, 7).expect("validated above").0 as usize;
        if c.color(xi, yi) != c1 {
            return Err(ReplayError::ColoringMismatch { x: xi, y: yi });
        }
    }

    let masks = family_masks();
    let mut out = Vec::new();
    for &need in needs_of_color(c1) {
        let key = (need.1 .0 * 3 + need.2 .0) as usize;
        let family = &masks[map.overlap() as usize][key];
        debug_assert!(!family.is_empty(), "every arising need has a family");
        let mut witness = None;
        for &zc in family {
            let z = PointSet::from_mask(map.preimage_mask(zc));
            if base_color(x, z, g)? == need.1 && base_color(y, z, g)? == need.2 {
                witness = Some(z);
                break;
            }
        }
        out.push(NeedOutcome {
            need,
            witness,
            family_size: family.len() as u32,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplayFailure {
    pub x: usize,
    pub y: usize,
    pub j: u32,
    pub need: [String; 3],
    pub family_size: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OverlapStats {
    pub overlap: u32,
    pub ordered_pairs: u64,
    pub needs_checked: u64,
    pub failures: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplayReport {
    pub pass: bool,
    pub per_overlap: Vec<OverlapStats>,
    pub failures: Vec<ReplayFailure>,
    pub truncated: bool,
    #[serde(skip)]
    pub wall_ms: u128,
}

#[derive(Default)]
struct ChunkOutcome {
    per_overlap: [OverlapStats; 7],
    failures: Vec<ReplayFailure>,
    failure_count: u64,
}

const VERTEX_CHUNK: usize = 64;

/// Replays every ordered pair of the full subset coloring. The coloring
/// must be the one induced by the given splitting graph; any disagreement
/// is an error, not a failure.
pub fn replay_all(
    c: &EdgeColoring,
    g: &SplittingGraph,
    opts: &VerifyOptions,
) -> Result<ReplayReport, ReplayError> {
    if opts.threads == 0 {
        run_replay(c, g, opts.failure_cap)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .expect("thread pool");
        pool.install(|| run_replay(c, g, opts.failure_cap))
    }
}

fn run_replay(
    c: &EdgeColoring,
    g: &SplittingGraph,
    cap: usize,
) -> Result<ReplayReport, ReplayError> {
    let start = Instant::now();
    let sets = c.vertex_sets().ok_or(ReplayError::NotSubsetColoring)?;
    if c.vertex_count() != 3432 || c.labels() != ["r", "b0", "b1"] {
        return Err(ReplayError::NotSubsetColoring);
    }
    for p in 1..=14 {
        if !g.retains(p) {
            return Err(ReplayError::Construct(ConstructError::MissingPoint(p)));
        }
    }
    let masks: Vec<u64> = sets.iter().map(|s| s.mask()).collect();
    let mut gs_b0 = [0u64; 14];
    for (i, row) in gs_b0.iter_mut().enumerate() {
        *row = g.b0_neighbors(i as u32 + 1) & ((1u64 << 14) - 1);
    }
    let n = c.vertex_count();
    let family = family_masks();

    let chunk_count = n.div_ceil(VERTEX_CHUNK);
    let outcomes: Vec<Result<ChunkOutcome, ReplayError>> = (0..chunk_count)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * VERTEX_CHUNK;
            let hi = (lo + VERTEX_CHUNK).min(n);
            let mut out = ChunkOutcome::default();
            for (j, st) in out.per_overlap.iter_mut().enumerate() {
                st.overlap = j as u32;
            }
            for x in lo..hi {
                let xm = masks[x];
                for y in 0..n {
                    if y == x {
                        continue;
                    }
                    let ym = masks[y];
                    let j = (xm & ym).count_ones();
                    let c1 = subset_color(xm, ym, &gs_b0);
                    if c.color(x, y) != c1 {
                        return Err(ReplayError::ColoringMismatch { x, y });
                    }
                    let map = canonical_map(sets[x], sets[y]).expect("distinct 7-subsets");
                    let stats = &mut out.per_overlap[j as usize];
                    stats.ordered_pairs += 1;
                    for &need in needs_of_color(c1) {
                        stats.needs_checked += 1;
                        let key = (need.1 .0 * 3 + need.2 .0) as usize;
                        let candidates = &family[j as usize][key];
                        let mut witnessed = false;
                        for &zc in candidates {
                            let zm = map.preimage_mask(zc);
                            if subset_color(xm, zm, &gs_b0) == need.1
                                && subset_color(ym, zm, &gs_b0) == need.2
                            {
                                witnessed = true;
                                break;
                            }
                        }
                        if !witnessed {
                            stats.failures += 1;
                            out.failure_count += 1;
                            if out.failures.len() < cap {
                                out.failures.push(ReplayFailure {
                                    x,
                                    y,
                                    j,
                                    need: [
                                        label_name(need.0).to_string(),
                                        label_name(need.1).to_string(),
                                        label_name(need.2).to_string(),
                                    ],
                                    family_size: candidates.len() as u32,
                                });
                            }
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect();

    let mut per_overlap: Vec<OverlapStats> = (0..7)
        .map(|j| OverlapStats {
            overlap: j as u32,
            ..OverlapStats::default()
        })
        .collect();
    let mut failures = Vec::new();
    let mut failure_count = 0u64;
    for outcome in outcomes {
        let out = outcome?;
        for (agg, part) in per_overlap.iter_mut().zip(out.per_overlap) {
            agg.ordered_pairs += part.ordered_pairs;
            agg.needs_checked += part.needs_checked;
            agg.failures += part.failures;
        }
        failure_count += out.failure_count;
        failures.extend(
            out.failures
                .into_iter()
                .take(cap.saturating_sub(failures.len())),
        );
    }

    Ok(ReplayReport {
        pass: failure_count == 0,
        per_overlap,
        truncated: failure_count > failures.len() as u64,
        failures,
        wall_ms: start.elapsed().as_millis(),
    })
}

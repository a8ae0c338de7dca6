//! Ground points, fixed-width point sets, and the canonical k-subset vertex
//! order with O(m) combinatorial ranking.
//!
//! Points are labeled 1..=m (m <= 64) and stored as single-word bitmasks with
//! point `p` at bit `p-1`. The vertices of the big graph are the k-subsets of
//! `[m]` listed in ascending bitmask-value order; that order is the canonical
//! vertex order everywhere in this crate.

use std::fmt;
use thiserror::Error;

/// Largest supported ground set; a [`PointSet`] must fit one machine word.
pub const MAX_GROUND_POINTS: u32 = 64;

/// Precomputed binomial coefficients for n <= 64. Every entry fits a u64
/// (the largest is C(64,32) ~ 1.8e18).
static BINOMIAL: [[u64; 65]; 65] = {
    let mut table = [[0u64; 65]; 65];
    let mut n = 0usize;
    while n < 65 {
        table[n][0] = 1;
        let mut k = 1usize;
        while k <= n {
            table[n][k] = table[n - 1][k - 1] + if k < n { table[n - 1][k] } else { 0 };
            k += 1;
        }
        n += 1;
    }
    table
};

/// Returns `C(n, k)` for n <= 64, and 0 when k > n.
#[inline]
pub const fn binomial(n: u32, k: u32) -> u64 {
    if n > 64 || k > n {
        return 0;
    }
    BINOMIAL[n as usize][k as usize]
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PointError {
    #[error("ground set size {m} exceeds the supported maximum of {MAX_GROUND_POINTS}")]
    GroundTooLarge { m: u32 },
    #[error("subset size {k} exceeds ground set size {m}")]
    SubsetLargerThanGround { k: u32, m: u32 },
    #[error("expected a {k}-subset, got a set of {got} points")]
    WrongCardinality { k: u32, got: u32 },
    #[error("set contains points outside the ground set [1, {m}]")]
    PointOutOfRange { m: u32 },
    #[error("vertex index {index} out of range; there are {count} vertices")]
    IndexOutOfRange { index: u64, count: u64 },
}

/// A subset of the ground points `1..=m`, point `p` stored at bit `p-1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PointSet {
    mask: u64,
}

impl PointSet {
    pub const EMPTY: PointSet = PointSet { mask: 0 };

    #[inline]
    pub const fn from_mask(mask: u64) -> Self {
        PointSet { mask }
    }

    /// Builds a set from 1-based point labels.
    ///
    /// Panics if a point is outside `1..=64`; ground-set membership is the
    /// caller's contract.
    pub fn from_points<I: IntoIterator<Item = u32>>(points: I) -> Self {
        let mut mask = 0u64;
        for p in points {
            assert!(
                (1..=MAX_GROUND_POINTS).contains(&p),
                "point {p} outside 1..=64"
            );
            mask |= 1u64 << (p - 1);
        }
        PointSet { mask }
    }

    /// Consecutive points `lo..=hi`, inclusive.
    pub fn range(lo: u32, hi: u32) -> Self {
        Self::from_points(lo..=hi)
    }

    #[inline]
    pub const fn mask(self) -> u64 {
        self.mask
    }

    #[inline]
    pub const fn len(self) -> u32 {
        self.mask.count_ones()
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.mask == 0
    }

    #[inline]
    pub const fn contains(self, p: u32) -> bool {
        p >= 1 && p <= 64 && (self.mask >> (p - 1)) & 1 == 1
    }

    #[inline]
    pub const fn with(self, p: u32) -> Self {
        PointSet {
            mask: self.mask | 1u64 << (p - 1),
        }
    }

    #[inline]
    pub const fn intersection(self, other: PointSet) -> PointSet {
        PointSet {
            mask: self.mask & other.mask,
        }
    }

    #[inline]
    pub const fn union(self, other: PointSet) -> PointSet {
        PointSet {
            mask: self.mask | other.mask,
        }
    }

    #[inline]
    pub const fn difference(self, other: PointSet) -> PointSet {
        PointSet {
            mask: self.mask & !other.mask,
        }
    }

    /// True when every bit lies within the first `m` positions.
    #[inline]
    pub const fn fits_ground(self, m: u32) -> bool {
        if m >= 64 {
            true
        } else {
            self.mask >> m == 0
        }
    }

    /// Iterates the 1-based point labels in ascending order.
    pub fn points(self) -> impl Iterator<Item = u32> {
        let mut mask = self.mask;
        std::iter::from_fn(move || {
            if mask == 0 {
                None
            } else {
                let p = mask.trailing_zeros() + 1;
                mask &= mask - 1;
                Some(p)
            }
        })
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.points().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Returns `|X ∩ Y|`.
#[inline]
pub fn intersection_size(x: PointSet, y: PointSet) -> u32 {
    (x.mask & y.mask).count_ones()
}

/// Position of a vertex in the canonical (ascending-mask) k-subset order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexIndex(pub u64);

fn check_params(m: u32, k: u32) -> Result<(), PointError> {
    if m > MAX_GROUND_POINTS {
        return Err(PointError::GroundTooLarge { m });
    }
    if k > m {
        return Err(PointError::SubsetLargerThanGround { k, m });
    }
    Ok(())
}

/// All `C(m, k)` k-subsets of `[m]` in strictly ascending bitmask-value order.
pub fn enumerate_vertices(m: u32, k: u32) -> Result<Vec<PointSet>, PointError> {
    check_params(m, k)?;
    let count = binomial(m, k);
    let mut out = Vec::with_capacity(count as usize);
    if k == 0 {
        out.push(PointSet::EMPTY);
        return Ok(out);
    }
    // Gosper's hack walks the k-subsets in exactly ascending mask order.
    let mut mask = (1u64 << k) - 1;
    for _ in 0..count {
        out.push(PointSet::from_mask(mask));
        let low = mask & mask.wrapping_neg();
        let ripple = mask.wrapping_add(low);
        mask = ripple | (((mask ^ ripple) >> 2) / low);
    }
    Ok(out)
}

/// Rank of `x` in `enumerate_vertices(m, k)`, computed in O(m) without
/// touching the list: ascending-mask order is colexicographic order on the
/// sorted elements, so the rank is the sum of `C(e_i, i+1)` over the 0-based
/// elements `e_0 < e_1 < ...`.
pub fn vertex_index(x: PointSet, m: u32, k: u32) -> Result<VertexIndex, PointError> {
    check_params(m, k)?;
    if x.len() != k {
        return Err(PointError::WrongCardinality { k, got: x.len() });
    }
    if !x.fits_ground(m) {
        return Err(PointError::PointOutOfRange { m });
    }
    let mut rank = 0u64;
    for (i, p) in x.points().enumerate() {
        rank += binomial(p - 1, i as u32 + 1);
    }
    Ok(VertexIndex(rank))
}

/// Inverse of [`vertex_index`]: the k-subset at a given canonical position.
pub fn vertex_at(index: VertexIndex, m: u32, k: u32) -> Result<PointSet, PointError> {
    check_params(m, k)?;
    let count = binomial(m, k);
    if index.0 >= count {
        return Err(PointError::IndexOutOfRange {
            index: index.0,
            count,
        });
    }
    let mut rest = index.0;
    let mut mask = 0u64;
    let mut upper = m; // elements are chosen strictly below this 0-based bound
    for i in (1..=k).rev() {
        // Largest 0-based element e < upper with C(e, i) <= rest.
        let mut e = upper - 1;
        while binomial(e, i) > rest {
            e -= 1;
        }
        rest -= binomial(e, i);
        mask |= 1u64 << e;
        upper = e;
    }
    Ok(PointSet::from_mask(mask))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(14, 7), 3432);
        assert_eq!(binomial(17, 4), 2380);
        assert_eq!(binomial(7, 3), 35);
        assert_eq!(binomial(5, 6), 0);
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534);
    }

    #[test]
    fn intersection_size_examples() {
        let x = PointSet::range(1, 7);
        let y = PointSet::range(8, 14);
        assert_eq!(intersection_size(x, y), 0);
        assert_eq!(intersection_size(x, x), 7);
        let z = PointSet::from_points([5, 6, 7, 8, 9, 10, 11]);
        assert_eq!(intersection_size(x, z), 3);
    }

    #[test]
    fn enumeration_order_and_extremes() {
        let vs = enumerate_vertices(14, 7).unwrap();
        assert_eq!(vs.len(), 3432);
        assert_eq!(vs[0], PointSet::range(1, 7));
        assert_eq!(vs[3431], PointSet::range(8, 14));
        assert!(vs.windows(2).all(|w| w[0].mask() < w[1].mask()));
        assert!(vs.iter().all(|v| v.len() == 7));
    }

    #[test]
    fn enumeration_edge_cases() {
        assert_eq!(enumerate_vertices(5, 0).unwrap(), vec![PointSet::EMPTY]);
        assert_eq!(
            enumerate_vertices(3, 3).unwrap(),
            vec![PointSet::range(1, 3)]
        );
        assert!(matches!(
            enumerate_vertices(4, 5),
            Err(PointError::SubsetLargerThanGround { .. })
        ));
        assert!(matches!(
            enumerate_vertices(65, 2),
            Err(PointError::GroundTooLarge { .. })
        ));
    }

    #[test]
    fn ranking_matches_enumeration_exhaustively() {
        for (m, k) in [(6, 3), (9, 4), (10, 1), (5, 5)] {
            let vs = enumerate_vertices(m, k).unwrap();
            for (i, &v) in vs.iter().enumerate() {
                assert_eq!(vertex_index(v, m, k).unwrap(), VertexIndex(i as u64));
                assert_eq!(vertex_at(VertexIndex(i as u64), m, k).unwrap(), v);
            }
        }
    }

    #[test]
    fn ranking_endpoints_for_main_parameters() {
        assert_eq!(
            vertex_index(PointSet::range(1, 7), 14, 7).unwrap(),
            VertexIndex(0)
        );
        assert_eq!(
            vertex_index(PointSet::range(8, 14), 14, 7).unwrap(),
            VertexIndex(3431)
        );
    }

    #[test]
    fn ranking_rejects_wrong_cardinality_and_range() {
        assert!(matches!(
            vertex_index(PointSet::range(1, 6), 14, 7),
            Err(PointError::WrongCardinality { .. })
        ));
        assert!(matches!(
            vertex_index(PointSet::from_points([1, 2, 15]), 14, 3),
            Err(PointError::PointOutOfRange { .. })
        ));
        assert!(matches!(
            vertex_at(VertexIndex(3432), 14, 7),
            Err(PointError::IndexOutOfRange { .. })
        ));
    }

    proptest! {
        #[test]
        fn rank_unrank_roundtrip(m in 1u32..=20, seed in any::<u64>()) {
            let k = (seed % (m as u64 + 1)) as u32;
            let count = binomial(m, k);
            let index = VertexIndex(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) % count);
            let set = vertex_at(index, m, k).unwrap();
            prop_assert_eq!(set.len(), k);
            prop_assert!(set.fits_ground(m));
            prop_assert_eq!(vertex_index(set, m, k).unwrap(), index);
        }

        #[test]
        fn intersection_size_is_symmetric_and_bounded(a in any::<u64>(), b in any::<u64>()) {
            let x = PointSet::from_mask(a);
            let y = PointSet::from_mask(b);
            prop_assert_eq!(intersection_size(x, y), intersection_size(y, x));
            prop_assert!(intersection_size(x, y) <= x.len().min(y.len()));
        }
    }
}

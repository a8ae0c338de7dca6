//! Edge colorings of complete graphs.
//!
//! The main construction colors the complete graph on all 7-subsets of a
//! 14-point ground set by intersection size: disjoint pairs are b0, 1-point
//! intersections b1, 3-and-higher intersections red, and 2-point
//! intersections take the shade of the corresponding splitting-graph edge.
//! Cyclic difference colorings and affine-plane colorings round out the
//! small-case zoo.

use crate::mandate::Label;
use crate::points::{enumerate_vertices, PointSet};
use crate::splitgraph::{BlueShade, SplittingGraph, SplittingError};
use thiserror::Error;

/// Label ids of the intersection-rule colorings.
pub const RED: Label = Label(0);
pub const BLUE0: Label = Label(1);
pub const BLUE1: Label = Label(2);

pub fn m2_label_names() -> Vec<String> {
    vec!["r".into(), "b0".into(), "b1".into()]
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("edge endpoints must be distinct vertices")]
    SameVertex,
    #[error("expected 7-subsets of [1, 14]")]
    NotASubsetVertex,
    #[error("splitting graph must retain points 1..=14, missing {0}")]
    MissingPoint(u32),
    #[error("splitting graph error: {0}")]
    Splitting(#[from] SplittingError),
    #[error("modulus {0} is too small")]
    ModulusTooSmall(u32),
    #[error("residue {residue} outside [1, {max}]")]
    ResidueOutOfRange { residue: u32, max: u32 },
    #[error("residue {0} assigned to more than one class")]
    OverlappingClasses(u32),
    #[error("residue {0} not covered by any class")]
    UncoveredResidue(u32),
    #[error("class {name:?} is not symmetric: contains {d} but not {complement}")]
    AsymmetricClass { name: String, d: u32, complement: u32 },
    #[error("duplicate class label {0:?}")]
    DuplicateClassLabel(String),
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("too many labels: {0} (a coloring stores label ids in 4 bits at most 16 on disk)")]
    TooManyLabels(usize),
    #[error("edge color id {0} out of range for the label list")]
    ColorOutOfRange(u8),
    #[error("explicit color table has wrong length: expected {expected}, got {got}")]
    WrongTableLength { expected: usize, got: usize },
}

enum Repr {
    /// One byte per unordered edge, (u, v) with u < v ordered
    /// lexicographically by (u, v).
    Explicit { colors: Vec<u8> },
    /// Intersection rule over 7-subsets of [14] with a splitting graph for
    /// the 2-edges. Stores vertex masks and the b0 adjacency rows of the
    /// splitting graph; colors are computed on demand.
    SubsetIntersection { masks: Vec<u64>, gs_b0: [u64; 14] },
    /// color(x, y) = class of (y - x) mod modulus; classes are symmetric so
    /// the direction does not matter.
    CyclicDifference { class_of: Vec<u8> },
    /// Points of the affine plane of prime order q; the color of an edge is
    /// the parallel class of the line through its endpoints. Slope s gets
    /// label id s, the vertical class gets label id q.
    AffinePlane { q: u32, inverse: Vec<u32> },
}

/// A total symmetric edge coloring of a complete graph on `n` vertices.
/// Immutable after construction; color queries are pure.
pub struct EdgeColoring {
    n: usize,
    labels: Vec<String>,
    repr: Repr,
    vertex_sets: Option<Vec<PointSet>>,
}

/// Index of edge (u, v), u < v, in the lexicographic-by-(u, v) edge order.
#[inline]
pub fn edge_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v && v < n);
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

impl EdgeColoring {
    pub fn from_explicit(
        labels: Vec<String>,
        n: usize,
        colors: Vec<u8>,
    ) -> Result<Self, ConstructError> {
        if labels.is_empty() || labels.len() > 255 {
            return Err(ConstructError::TooManyLabels(labels.len()));
        }
        let expected = n * n.saturating_sub(1) / 2;
        if colors.len() != expected {
            return Err(ConstructError::WrongTableLength {
                expected,
                got: colors.len(),
            });
        }
        if let Some(&bad) = colors.iter().find(|&&c| c as usize >= labels.len()) {
            return Err(ConstructError::ColorOutOfRange(bad));
        }
        Ok(EdgeColoring {
            n,
            labels,
            repr: Repr::Explicit { colors },
            vertex_sets: None,
        })
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_id(&self, name: &str) -> Option<Label> {
        self.labels
            .iter()
            .position(|l| l == name)
            .map(|i| Label(i as u8))
    }

    pub fn label_name(&self, l: Label) -> &str {
        &self.labels[l.0 as usize]
    }

    /// Point-set metadata per vertex, present for subset-intersection
    /// colorings.
    pub fn vertex_sets(&self) -> Option<&[PointSet]> {
        self.vertex_sets.as_deref()
    }

    /// The color of the edge between two distinct vertices.
    pub fn color(&self, u: usize, v: usize) -> Label {
        debug_assert!(u != v && u < self.n && v < self.n);
        match &self.repr {
            Repr::Explicit { colors } => {
                let (a, b) = if u < v { (u, v) } else { (v, u) };
                Label(colors[edge_index(self.n, a, b)])
            }
            Repr::SubsetIntersection { masks, gs_b0 } => {
                subset_color(masks[u], masks[v], gs_b0)
            }
            Repr::CyclicDifference { class_of } => {
                let m = self.n;
                let d = (v + m - u) % m;
                Label(class_of[d])
            }
            Repr::AffinePlane { q, inverse } => {
                let q = *q as usize;
                let (a, b) = (u / q, u % q);
                let (c, d) = (v / q, v % q);
                if a == c {
                    Label(q as u8)
                } else {
                    let dx = (c + q - a) % q;
                    let dy = (d + q - b) % q;
                    let slope = dy * inverse[dx] as usize % q;
                    Label(slope as u8)
                }
            }
        }
    }
}

#[inline]
pub(crate) fn subset_color(xm: u64, ym: u64, gs_b0: &[u64; 14]) -> Label {
    let common = xm & ym;
    match common.count_ones() {
        0 => BLUE0,
        1 => BLUE1,
        2 => {
            let p = common.trailing_zeros() as usize; // 0-based
            let q = 63 - common.leading_zeros();
            if gs_b0[p] >> q & 1 == 1 {
                BLUE0
            } else {
                BLUE1
            }
        }
        _ => RED,
    }
}

/// What decides the color of an edge whose endpoint sets share j points:
/// a fixed label, or the splitting-graph edge on the shared pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SizeRule {
    Fixed(Label),
    ConsultSplitting,
}

/// A label per intersection size, total on 0..=k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionRule {
    by_size: Vec<SizeRule>,
}

impl IntersectionRule {
    /// The rule of the main construction on 7-subsets: disjoint pairs b0,
    /// 1-point intersections b1, 2-point intersections per the splitting
    /// graph, everything larger red.
    pub fn standard() -> IntersectionRule {
        let mut by_size = vec![
            SizeRule::Fixed(BLUE0),
            SizeRule::Fixed(BLUE1),
            SizeRule::ConsultSplitting,
        ];
        by_size.resize(8, SizeRule::Fixed(RED));
        IntersectionRule { by_size }
    }

    pub fn by_size(&self) -> &[SizeRule] {
        &self.by_size
    }

    /// Evaluates the rule on two distinct sets. A consult entry requires the
    /// intersection to be a point pair, which is the splitting graph's edge.
    pub fn apply(
        &self,
        x: PointSet,
        y: PointSet,
        g: &SplittingGraph,
    ) -> Result<Label, ConstructError> {
        if x == y {
            return Err(ConstructError::SameVertex);
        }
        let common = x.intersection(y);
        match self.by_size[common.len() as usize] {
            SizeRule::Fixed(l) => Ok(l),
            SizeRule::ConsultSplitting => {
                debug_assert_eq!(common.len(), 2, "consult entries sit at size 2");
                let mut pts = common.points();
                let (p, q) = (pts.next().unwrap(), pts.next().unwrap());
                match g.edge_color(p, q)? {
                    BlueShade::B0 => Ok(BLUE0),
                    BlueShade::B1 => Ok(BLUE1),
                }
            }
        }
    }
}

/// The intersection-size rule for two distinct 7-subsets of [14], with the
/// splitting graph deciding 2-point intersections.
pub fn base_color(
    x: PointSet,
    y: PointSet,
    g: &SplittingGraph,
) -> Result<Label, ConstructError> {
    if x.len() != 7 || y.len() != 7 || !x.fits_ground(14) || !y.fits_ground(14) {
        return Err(ConstructError::NotASubsetVertex);
    }
    IntersectionRule::standard().apply(x, y, g)
}

/// The full 3432-vertex coloring over the canonical vertex order, with
/// point-set metadata retained. The splitting graph must retain points
/// 1..=14; extra retained points are simply never consulted.
pub fn build_m2_coloring(g: &SplittingGraph) -> Result<EdgeColoring, ConstructError> {
    for p in 1..=14 {
        if !g.retains(p) {
            return Err(ConstructError::MissingPoint(p));
        }
    }
    let sets = enumerate_vertices(14, 7).expect("14 choose 7 enumerates");
    let masks: Vec<u64> = sets.iter().map(|s| s.mask()).collect();
    let mut gs_b0 = [0u64; 14];
    for (i, row) in gs_b0.iter_mut().enumerate() {
        // restrict the splitting rows to the first 14 points
        *row = g.b0_neighbors(i as u32 + 1) & ((1u64 << 14) - 1);
    }
    Ok(EdgeColoring {
        n: sets.len(),
        labels: m2_label_names(),
        repr: Repr::SubsetIntersection { masks, gs_b0 },
        vertex_sets: Some(sets),
    })
}

/// A coloring of K_modulus whose vertices are residues and whose edge colors
/// depend only on the difference class. Classes must partition the nonzero
/// residues and each be closed under negation.
pub fn build_cyclic_coloring(
    modulus: u32,
    classes: &[(String, Vec<u32>)],
) -> Result<EdgeColoring, ConstructError> {
    if modulus < 2 {
        return Err(ConstructError::ModulusTooSmall(modulus));
    }
    if classes.len() > 255 {
        return Err(ConstructError::TooManyLabels(classes.len()));
    }
    let mut labels = Vec::with_capacity(classes.len());
    let mut class_of = vec![u8::MAX; modulus as usize];
    for (id, (name, diffs)) in classes.iter().enumerate() {
        if labels.contains(name) {
            return Err(ConstructError::DuplicateClassLabel(name.clone()));
        }
        labels.push(name.clone());
        for &d in diffs {
            if d == 0 || d >= modulus {
                return Err(ConstructError::ResidueOutOfRange {
                    residue: d,
                    max: modulus - 1,
                });
            }
            if class_of[d as usize] != u8::MAX {
                return Err(ConstructError::OverlappingClasses(d));
            }
            class_of[d as usize] = id as u8;
        }
    }
    for d in 1..modulus {
        if class_of[d as usize] == u8::MAX {
            return Err(ConstructError::UncoveredResidue(d));
        }
        if class_of[d as usize] != class_of[(modulus - d) as usize] {
            return Err(ConstructError::AsymmetricClass {
                name: labels[class_of[d as usize] as usize].clone(),
                d,
                complement: modulus - d,
            });
        }
    }
    Ok(EdgeColoring {
        n: modulus as usize,
        labels,
        repr: Repr::CyclicDifference { class_of },
        vertex_sets: None,
    })
}

fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// K_{q^2} on the points of the affine plane of prime order q, colored by
/// the parallel class of the line through each pair: q slope classes plus
/// one vertical class, labeled r1..r{q+1}.
pub fn build_affine_coloring(q: u32) -> Result<EdgeColoring, ConstructError> {
    if !is_prime(q) {
        return Err(ConstructError::NotPrime(q));
    }
    let mut inverse = vec![0u32; q as usize];
    for a in 1..q {
        for b in 1..q {
            if a * b % q == 1 {
                inverse[a as usize] = b;
            }
        }
    }
    let labels = (1..=q + 1).map(|i| format!("r{i}")).collect();
    Ok(EdgeColoring {
        n: (q * q) as usize,
        labels,
        repr: Repr::AffinePlane { q, inverse },
        vertex_sets: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splitgraph::{build_cyclic_splitting, quadratic_residue_k17, QR17_CLASS0};
    use proptest::prelude::*;

    fn residue_gs() -> SplittingGraph {
        build_cyclic_splitting(17, &QR17_CLASS0, &[15, 16, 17]).unwrap()
    }

    #[test]
    fn base_color_worked_example() {
        let g = residue_gs();
        let x = PointSet::range(1, 7);
        let y = PointSet::range(2, 8);
        let z = PointSet::range(7, 13);
        assert_eq!(base_color(x, y, &g).unwrap(), RED); // overlap 6
        assert_eq!(base_color(x, z, &g).unwrap(), BLUE1); // overlap 1
        assert_eq!(base_color(y, z, &g).unwrap(), BLUE0); // overlap {7,8}, diff 1
        assert_eq!(base_color(x, x, &g), Err(ConstructError::SameVertex));
    }

    #[test]
    fn standard_rule_shape() {
        let rule = IntersectionRule::standard();
        assert_eq!(rule.by_size().len(), 8); // total on 0..=7
        assert_eq!(rule.by_size()[0], SizeRule::Fixed(BLUE0));
        assert_eq!(rule.by_size()[1], SizeRule::Fixed(BLUE1));
        assert_eq!(rule.by_size()[2], SizeRule::ConsultSplitting);
        assert!(rule.by_size()[3..]
            .iter()
            .all(|r| *r == SizeRule::Fixed(RED)));
    }

    #[test]
    fn m2_coloring_basic_shape() {
        let c = build_m2_coloring(&residue_gs()).unwrap();
        assert_eq!(c.vertex_count(), 3432);
        assert_eq!(c.labels(), &["r", "b0", "b1"]);
        assert!(c.vertex_sets().is_some());
        // the full K17 graph works too: the extra points are never consulted
        assert!(build_m2_coloring(&quadratic_residue_k17()).is_ok());
        let too_small = quadratic_residue_k17().without_points(&[3]).unwrap();
        assert!(matches!(
            build_m2_coloring(&too_small),
            Err(ConstructError::MissingPoint(3))
        ));
    }

    #[test]
    fn m2_degrees_at_a_vertex() {
        let g = residue_gs();
        let c = build_m2_coloring(&g).unwrap();
        // red degree 2940 and combined blue degree 491 at vertex 0
        let mut red = 0;
        let mut blue = 0;
        for v in 1..c.vertex_count() {
            match c.color(0, v) {
                RED => red += 1,
                _ => blue += 1,
            }
        }
        assert_eq!(red, 2940);
        assert_eq!(blue, 491);
    }

    #[test]
    fn m2_colors_match_base_color_on_sample() {
        let g = residue_gs();
        let c = build_m2_coloring(&g).unwrap();
        let sets = c.vertex_sets().unwrap().to_vec();
        let mut u = 7usize;
        while u < 3432 {
            let mut v = 1usize;
            while v < 3432 {
                if u != v {
                    assert_eq!(c.color(u, v), base_color(sets[u], sets[v], &g).unwrap());
                }
                v += 149;
            }
            u += 101;
        }
    }

    #[test]
    fn no_blue_triangle_on_random_triples() {
        let c = build_m2_coloring(&residue_gs()).unwrap();
        let n = c.vertex_count();
        let mut state = 0x243f_6a88_85a3_08d3u64;
        for _ in 0..3000 {
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 33) as usize % n
            };
            let (x, y, z) = (next(), next(), next());
            if x == y || y == z || x == z {
                continue;
            }
            let all_blue = c.color(x, y) != RED && c.color(y, z) != RED && c.color(x, z) != RED;
            assert!(!all_blue, "blue triangle at ({x},{y},{z})");
        }
    }

    #[test]
    fn base_color_invariant_under_simultaneous_relabeling() {
        // permute [14], apply to X, Y, and the splitting graph alike
        let g = residue_gs();
        let perm: [u32; 14] = [3, 7, 1, 12, 5, 14, 2, 9, 11, 4, 13, 8, 10, 6];
        let mut edges = Vec::new();
        for p in 1..=14u32 {
            for q in (p + 1)..=14 {
                if g.edge_color(p, q).unwrap() == BlueShade::B0 {
                    edges.push((perm[(p - 1) as usize], perm[(q - 1) as usize]));
                }
            }
        }
        let pg = SplittingGraph::from_b0_edges(14, &edges).unwrap();
        let apply = |s: PointSet| PointSet::from_points(s.points().map(|p| perm[(p - 1) as usize]));
        let vs = enumerate_vertices(14, 7).unwrap();
        let mut i = 0usize;
        while i < vs.len() {
            let (x, y) = (vs[i], vs[(i * 7 + 13) % vs.len()]);
            if x != y {
                assert_eq!(
                    base_color(x, y, &g).unwrap(),
                    base_color(apply(x), apply(y), &pg).unwrap()
                );
            }
            i += 37;
        }
    }

    #[test]
    fn cyclic_pentagon() {
        let c = build_cyclic_coloring(
            5,
            &[("r".into(), vec![1, 4]), ("b0".into(), vec![2, 3])],
        )
        .unwrap();
        assert_eq!(c.vertex_count(), 5);
        assert_eq!(c.color(0, 1), Label(0));
        assert_eq!(c.color(0, 2), Label(1));
        // translation invariance
        for x in 0..5 {
            for y in 0..5 {
                if x != y {
                    assert_eq!(c.color(x, y), c.color((x + 1) % 5, (y + 1) % 5));
                }
            }
        }
    }

    #[test]
    fn cyclic_k17_as_coloring() {
        let c1: Vec<u32> = (1..17).filter(|d| !QR17_CLASS0.contains(d)).collect();
        let c = build_cyclic_coloring(
            17,
            &[("b0".into(), QR17_CLASS0.to_vec()), ("b1".into(), c1)],
        )
        .unwrap();
        assert_eq!(c.vertex_count(), 17);
        // edge (7,8) => difference 1 => b0, matching the splitting graph
        assert_eq!(c.color(6, 7), Label(0));
    }

    #[test]
    fn cyclic_rejects_bad_classes() {
        assert!(matches!(
            build_cyclic_coloring(5, &[("r".into(), vec![1, 4])]),
            Err(ConstructError::UncoveredResidue(2))
        ));
        assert!(matches!(
            build_cyclic_coloring(
                5,
                &[("r".into(), vec![1, 2]), ("b".into(), vec![3, 4])]
            ),
            Err(ConstructError::AsymmetricClass { .. })
        ));
        assert!(matches!(
            build_cyclic_coloring(
                5,
                &[("r".into(), vec![1, 4]), ("b".into(), vec![2, 3, 4])]
            ),
            Err(ConstructError::OverlappingClasses(4))
        ));
    }

    #[test]
    fn affine_plane_of_order_three() {
        let c = build_affine_coloring(3).unwrap();
        assert_eq!(c.vertex_count(), 9);
        assert_eq!(c.labels().len(), 4);
        // each color class is a disjoint union of 3 triangles: every vertex
        // sees exactly q - 1 = 2 neighbors in each class, 9 edges per class
        let mut per_class = [0usize; 4];
        for u in 0..9 {
            let mut deg = [0usize; 4];
            for v in 0..9 {
                if u != v {
                    deg[c.color(u, v).0 as usize] += 1;
                }
            }
            assert_eq!(deg, [2, 2, 2, 2]);
            for (k, d) in deg.iter().enumerate() {
                per_class[k] += d;
            }
        }
        assert_eq!(per_class, [18, 18, 18, 18]); // 9 edges each, double counted
    }

    #[test]
    fn affine_plane_of_order_two_is_three_matchings() {
        let c = build_affine_coloring(2).unwrap();
        assert_eq!(c.vertex_count(), 4);
        assert_eq!(c.labels().len(), 3);
        for u in 0..4 {
            for l in 0..3u8 {
                let deg = (0..4).filter(|&v| v != u && c.color(u, v) == Label(l)).count();
                assert_eq!(deg, 1, "class {l} is not a perfect matching at {u}");
            }
        }
    }

    /// The blue class of a cyclic coloring is triangle-free exactly when its
    /// difference set is sum-free.
    #[test]
    fn cyclic_blue_triangle_freeness_is_sum_freeness() {
        use crate::search::{is_sum_free, DifferenceSet};
        let mut state = 0x9e37_79b9u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as u32
        };
        for _ in 0..40 {
            let m = 5 + next() % 26;
            let mut blue = Vec::new();
            for d in 1..=m / 2 {
                if next() % 3 == 0 {
                    blue.push(d);
                    if m - d != d {
                        blue.push(m - d);
                    }
                }
            }
            let red: Vec<u32> = (1..m).filter(|d| !blue.contains(d)).collect();
            if blue.is_empty() || red.is_empty() {
                continue;
            }
            let c = build_cyclic_coloring(
                m,
                &[("r".into(), red), ("b".into(), blue.clone())],
            )
            .unwrap();
            let n = c.vertex_count();
            let mut triangle = false;
            'scan: for x in 0..n {
                for y in (x + 1)..n {
                    if c.color(x, y) != Label(1) {
                        continue;
                    }
                    for z in (y + 1)..n {
                        if c.color(x, z) == Label(1) && c.color(y, z) == Label(1) {
                            triangle = true;
                            break 'scan;
                        }
                    }
                }
            }
            let sum_free = is_sum_free(&DifferenceSet::new(m, &blue).unwrap());
            assert_eq!(sum_free, !triangle, "modulus {m} blue {blue:?}");
        }
    }

    #[test]
    fn affine_rejects_non_prime() {
        assert!(matches!(build_affine_coloring(4), Err(ConstructError::NotPrime(4))));
        assert!(matches!(build_affine_coloring(1), Err(ConstructError::NotPrime(1))));
    }

    proptest! {
        #[test]
        fn affine_degree_law(q in prop::sample::select(vec![2u32, 3, 5, 7])) {
            let c = build_affine_coloring(q).unwrap();
            let n = c.vertex_count();
            for u in 0..n.min(8) {
                for l in 0..c.labels().len() as u8 {
                    let deg = (0..n).filter(|&v| v != u && c.color(u, v) == Label(l)).count();
                    prop_assert_eq!(deg, (q - 1) as usize);
                }
            }
        }
    }
}

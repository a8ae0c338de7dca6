//! Two-shaded complete graphs on ground points.
//!
//! A splitting graph decides the blue shade of the big graph's 2-edges. The
//! construction only works when neither shade contains a K4, a K4,3, or a
//! K5,2; [`SplittingGraph::validate`] checks exactly those three properties
//! by exhaustive search (a few hundred thousand subsets at most — fast, and
//! trivially an oracle).

use crate::points::MAX_GROUND_POINTS;
use serde::Serialize;
use thiserror::Error;

/// One of the two blue shades.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum BlueShade {
    B0,
    B1,
}

impl BlueShade {
    pub const BOTH: [BlueShade; 2] = [BlueShade::B0, BlueShade::B1];

    pub fn name(self) -> &'static str {
        match self {
            BlueShade::B0 => "b0",
            BlueShade::B1 => "b1",
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SplittingError {
    #[error("modulus {0} is too small")]
    ModulusTooSmall(u32),
    #[error("point count {0} exceeds the supported maximum of {MAX_GROUND_POINTS}")]
    TooManyPoints(u32),
    #[error("residue {residue} outside [1, {max}]")]
    ResidueOutOfRange { residue: u32, max: u32 },
    #[error("difference class is not symmetric: contains {d} but not {complement}")]
    AsymmetricClass { d: u32, complement: u32 },
    #[error("point {p} outside [1, {max}]")]
    PointOutOfRange { p: u32, max: u32 },
    #[error("edge endpoints must be distinct, got ({p}, {p})")]
    SelfEdge { p: u32 },
    #[error("point {0} is not retained in this graph")]
    NotRetained(u32),
}

/// How a cyclic splitting graph was built: edge (p, q) is b0 exactly when
/// (q - p) mod `modulus` lies in `class0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicDescriptor {
    pub modulus: u32,
    pub class0: Vec<u32>,
    pub deleted: Vec<u32>,
}

/// A complete graph on a retained subset of points `1..=point_count`, every
/// edge colored b0 or b1. Deleted points keep their original labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingGraph {
    points: Vec<u32>,
    retained: u64,
    // b0 adjacency mask per point (index p-1, bit q-1); b1 is the complement
    // within the retained points.
    b0_adj: Vec<u64>,
    provenance: Option<CyclicDescriptor>,
}

/// Builds the cyclic two-shading of the complete graph on `[1..=modulus]`
/// minus `deletions`: edge (p, q) is b0 iff (q - p) mod modulus is in
/// `class0`, which must be closed under negation.
pub fn build_cyclic_splitting(
    modulus: u32,
    class0: &[u32],
    deletions: &[u32],
) -> Result<SplittingGraph, SplittingError> {
    if modulus < 2 {
        return Err(SplittingError::ModulusTooSmall(modulus));
    }
    if modulus > MAX_GROUND_POINTS {
        return Err(SplittingError::TooManyPoints(modulus));
    }
    let mut in_class = vec![false; modulus as usize];
    for &d in class0 {
        if d == 0 || d >= modulus {
            return Err(SplittingError::ResidueOutOfRange {
                residue: d,
                max: modulus - 1,
            });
        }
        in_class[d as usize] = true;
    }
    for d in 1..modulus {
        if in_class[d as usize] && !in_class[(modulus - d) as usize] {
            return Err(SplittingError::AsymmetricClass {
                d,
                complement: modulus - d,
            });
        }
    }
    let mut deleted_sorted: Vec<u32> = deletions.to_vec();
    deleted_sorted.sort_unstable();
    deleted_sorted.dedup();
    for &p in &deleted_sorted {
        if p == 0 || p > modulus {
            return Err(SplittingError::PointOutOfRange { p, max: modulus });
        }
    }

    let mut retained = 0u64;
    for p in 1..=modulus {
        if !deleted_sorted.contains(&p) {
            retained |= 1u64 << (p - 1);
        }
    }
    let mut b0_adj = vec![0u64; modulus as usize];
    for p in 1..=modulus {
        if retained >> (p - 1) & 1 == 0 {
            continue;
        }
        for q in 1..=modulus {
            if q == p || retained >> (q - 1) & 1 == 0 {
                continue;
            }
            let diff = (q + modulus - p) % modulus;
            if in_class[diff as usize] {
                b0_adj[(p - 1) as usize] |= 1u64 << (q - 1);
            }
        }
    }
    let points = (1..=modulus).filter(|p| retained >> (p - 1) & 1 == 1).collect();
    Ok(SplittingGraph {
        points,
        retained,
        b0_adj,
        provenance: Some(CyclicDescriptor {
            modulus,
            class0: {
                let mut c: Vec<u32> = class0.to_vec();
                c.sort_unstable();
                c.dedup();
                c
            },
            deleted: deleted_sorted,
        }),
    })
}

/// The quadratic-residue two-shading of K17: b0 differences
/// {1,2,4,8,9,13,15,16}. Both shades are K4-, K4,3-, and K5,2-free, so any
/// induced subgraph works as a splitting graph for the main construction.
pub fn quadratic_residue_k17() -> SplittingGraph {
    build_cyclic_splitting(17, &QR17_CLASS0, &[]).expect("constant class is well-formed")
}

/// b0 difference class of [`quadratic_residue_k17`].
pub const QR17_CLASS0: [u32; 8] = [1, 2, 4, 8, 9, 13, 15, 16];

impl SplittingGraph {
    /// Complete graph on `[1..=point_count]` with the listed edges b0 and
    /// every other edge b1.
    pub fn from_b0_edges(
        point_count: u32,
        b0_edges: &[(u32, u32)],
    ) -> Result<Self, SplittingError> {
        if point_count < 1 {
            return Err(SplittingError::ModulusTooSmall(point_count));
        }
        if point_count > MAX_GROUND_POINTS {
            return Err(SplittingError::TooManyPoints(point_count));
        }
        let mut b0_adj = vec![0u64; point_count as usize];
        for &(p, q) in b0_edges {
            for e in [p, q] {
                if e == 0 || e > point_count {
                    return Err(SplittingError::PointOutOfRange {
                        p: e,
                        max: point_count,
                    });
                }
            }
            if p == q {
                return Err(SplittingError::SelfEdge { p });
            }
            b0_adj[(p - 1) as usize] |= 1u64 << (q - 1);
            b0_adj[(q - 1) as usize] |= 1u64 << (p - 1);
        }
        let retained = if point_count == 64 {
            u64::MAX
        } else {
            (1u64 << point_count) - 1
        };
        Ok(SplittingGraph {
            points: (1..=point_count).collect(),
            retained,
            b0_adj,
            provenance: None,
        })
    }

    /// Retained points in ascending order, with their original labels.
    pub fn points(&self) -> &[u32] {
        &self.points
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn retains(&self, p: u32) -> bool {
        (1..=64).contains(&p) && self.retained >> (p - 1) & 1 == 1
    }

    pub fn provenance(&self) -> Option<&CyclicDescriptor> {
        self.provenance.as_ref()
    }

    /// The stored symmetric color of the edge between two retained points.
    pub fn edge_color(&self, p: u32, q: u32) -> Result<BlueShade, SplittingError> {
        if p == q {
            return Err(SplittingError::SelfEdge { p });
        }
        for e in [p, q] {
            if !self.retains(e) {
                return Err(SplittingError::NotRetained(e));
            }
        }
        if self.b0_adj[(p - 1) as usize] >> (q - 1) & 1 == 1 {
            Ok(BlueShade::B0)
        } else {
            Ok(BlueShade::B1)
        }
    }

    /// b0 adjacency mask of a retained point (bit q-1 set iff edge (p,q) is
    /// b0). Used by the coloring construction for O(1) 2-edge lookups.
    #[inline]
    pub fn b0_neighbors(&self, p: u32) -> u64 {
        self.b0_adj[(p - 1) as usize]
    }

    #[inline]
    fn shade_neighbors(&self, shade: BlueShade, p: u32) -> u64 {
        let b0 = self.b0_adj[(p - 1) as usize];
        match shade {
            BlueShade::B0 => b0,
            BlueShade::B1 => (self.retained & !(1u64 << (p - 1))) & !b0,
        }
    }

    /// The induced subgraph after deleting the listed points (which must be
    /// retained). Remaining points keep their labels.
    pub fn without_points(&self, points: &[u32]) -> Result<SplittingGraph, SplittingError> {
        let mut g = self.clone();
        for &p in points {
            if !g.retains(p) {
                return Err(SplittingError::NotRetained(p));
            }
            g.retained &= !(1u64 << (p - 1));
            g.b0_adj[(p - 1) as usize] = 0;
            for row in g.b0_adj.iter_mut() {
                *row &= !(1u64 << (p - 1));
            }
        }
        g.points.retain(|&p| g.retained >> (p - 1) & 1 == 1);
        if let Some(desc) = g.provenance.as_mut() {
            desc.deleted.extend_from_slice(points);
            desc.deleted.sort_unstable();
            desc.deleted.dedup();
        }
        Ok(g)
    }

    /// First k-subset (in ascending point order) whose induced edges all
    /// have the given shade, if any. Exhaustive.
    pub fn find_mono_clique(&self, k: u32, shade: BlueShade) -> Option<Vec<u32>> {
        assert!(k >= 1, "clique size must be at least 1");
        let mut chosen = Vec::with_capacity(k as usize);
        self.clique_search(k as usize, 0, self.retained, shade, &mut chosen)
            .then_some(chosen)
    }

    fn clique_search(
        &self,
        k: usize,
        from: usize,
        candidates: u64,
        shade: BlueShade,
        chosen: &mut Vec<u32>,
    ) -> bool {
        if chosen.len() == k {
            return true;
        }
        for (i, &p) in self.points.iter().enumerate().skip(from) {
            if candidates >> (p - 1) & 1 == 0 {
                continue;
            }
            chosen.push(p);
            let narrowed = candidates & self.shade_neighbors(shade, p);
            if self.clique_search(k, i + 1, narrowed, shade, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    /// First disjoint pair (A, B) with |A| = a, |B| = b and every cross edge
    /// of the given shade, if any. A is enumerated in ascending subset
    /// order, then B as the smallest b common shade-neighbors of A.
    pub fn find_mono_biclique(
        &self,
        a: u32,
        b: u32,
        shade: BlueShade,
    ) -> Option<(Vec<u32>, Vec<u32>)> {
        assert!(a >= b && b >= 1, "part sizes must satisfy a >= b >= 1");
        assert!(
            (a + b) as usize <= self.points.len(),
            "parts exceed the point count"
        );
        let mut side_a = Vec::with_capacity(a as usize);
        let mut found = None;
        self.biclique_search(a as usize, b as usize, 0, self.retained, shade, &mut side_a, &mut found);
        found
    }

    #[allow(clippy::too_many_arguments)]
    fn biclique_search(
        &self,
        a: usize,
        b: usize,
        from: usize,
        common: u64,
        shade: BlueShade,
        side_a: &mut Vec<u32>,
        found: &mut Option<(Vec<u32>, Vec<u32>)>,
    ) {
        if found.is_some() {
            return;
        }
        if side_a.len() == a {
            // common holds all points whose cross edges to side_a are the
            // right shade; any b of them (minus side_a itself) complete a
            // biclique. Cross edges only: colors inside the parts are free.
            let mut avail = common;
            for &p in side_a.iter() {
                avail &= !(1u64 << (p - 1));
            }
            if avail.count_ones() as usize >= b {
                let mut side_b = Vec::with_capacity(b);
                while side_b.len() < b {
                    let p = avail.trailing_zeros() + 1;
                    avail &= avail - 1;
                    side_b.push(p);
                }
                *found = Some((side_a.clone(), side_b));
            }
            return;
        }
        for (i, &p) in self.points.iter().enumerate().skip(from) {
            side_a.push(p);
            self.biclique_search(
                a,
                b,
                i + 1,
                common & self.shade_neighbors(shade, p),
                shade,
                side_a,
                found,
            );
            side_a.pop();
            if found.is_some() {
                return;
            }
        }
    }

    /// Runs the three monochromatic-subgraph searches for both shades and
    /// aggregates the verdict.
    pub fn validate(&self) -> SplittingReport {
        let mut report = SplittingReport {
            pass: true,
            mono_k4: None,
            mono_k43: None,
            mono_k52: None,
        };
        let n = self.points.len() as u32;
        for shade in BlueShade::BOTH {
            if report.mono_k4.is_none() && n >= 4 {
                if let Some(points) = self.find_mono_clique(4, shade) {
                    report.mono_k4 = Some(CliqueWitness {
                        shade: shade.name().into(),
                        points,
                    });
                }
            }
            if report.mono_k43.is_none() && n >= 7 {
                if let Some((side_a, side_b)) = self.find_mono_biclique(4, 3, shade) {
                    report.mono_k43 = Some(BicliqueWitness {
                        shade: shade.name().into(),
                        side_a,
                        side_b,
                    });
                }
            }
            if report.mono_k52.is_none() && n >= 7 {
                if let Some((side_a, side_b)) = self.find_mono_biclique(5, 2, shade) {
                    report.mono_k52 = Some(BicliqueWitness {
                        shade: shade.name().into(),
                        side_a,
                        side_b,
                    });
                }
            }
        }
        report.pass =
            report.mono_k4.is_none() && report.mono_k43.is_none() && report.mono_k52.is_none();
        report
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliqueWitness {
    pub shade: String,
    pub points: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BicliqueWitness {
    pub shade: String,
    pub side_a: Vec<u32>,
    pub side_b: Vec<u32>,
}

/// Verdict of [`SplittingGraph::validate`]; passes iff all three witnesses
/// are absent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplittingReport {
    pub pass: bool,
    pub mono_k4: Option<CliqueWitness>,
    pub mono_k43: Option<BicliqueWitness>,
    pub mono_k52: Option<BicliqueWitness>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cyclic_build_and_edge_colors() {
        let g = quadratic_residue_k17();
        assert_eq!(g.point_count(), 17);
        // difference 1 is in class0, difference 3 is not
        assert_eq!(g.edge_color(7, 8).unwrap(), BlueShade::B0);
        assert_eq!(g.edge_color(1, 4).unwrap(), BlueShade::B1);
        // symmetry of the stored map
        for p in 1..=17u32 {
            for q in (p + 1)..=17 {
                assert_eq!(g.edge_color(p, q).unwrap(), g.edge_color(q, p).unwrap());
            }
        }
        assert!(matches!(
            g.edge_color(3, 3),
            Err(SplittingError::SelfEdge { p: 3 })
        ));
    }

    #[test]
    fn asymmetric_class_rejected() {
        assert_eq!(
            build_cyclic_splitting(17, &[1], &[]),
            Err(SplittingError::AsymmetricClass { d: 1, complement: 16 })
        );
    }

    #[test]
    fn deletions_keep_labels() {
        let g = build_cyclic_splitting(17, &QR17_CLASS0, &[15, 16, 17]).unwrap();
        assert_eq!(g.point_count(), 14);
        assert_eq!(g.points(), (1..=14).collect::<Vec<_>>());
        assert!(g.retains(8) && !g.retains(15));
        assert_eq!(g.edge_color(7, 8).unwrap(), BlueShade::B0);
        assert!(matches!(
            g.edge_color(7, 15),
            Err(SplittingError::NotRetained(15))
        ));
        // same graph via post-hoc deletion
        let h = quadratic_residue_k17().without_points(&[15, 16, 17]).unwrap();
        assert_eq!(g.points(), h.points());
        for p in 1..=14u32 {
            for q in (p + 1)..=14 {
                assert_eq!(g.edge_color(p, q).unwrap(), h.edge_color(p, q).unwrap());
            }
        }
    }

    #[test]
    fn mono_clique_search() {
        let g = quadratic_residue_k17();
        // {1,2,3}: differences 1, 1, 2 all in class0
        assert_eq!(g.find_mono_clique(3, BlueShade::B0), Some(vec![1, 2, 3]));
        assert_eq!(g.find_mono_clique(4, BlueShade::B0), None);
        assert_eq!(g.find_mono_clique(4, BlueShade::B1), None);
        // vacuous size-1 clique
        assert_eq!(g.find_mono_clique(1, BlueShade::B0), Some(vec![1]));
    }

    #[test]
    fn clique_absence_is_monotone_in_size() {
        let g = quadratic_residue_k17();
        for shade in BlueShade::BOTH {
            let mut absent = false;
            for k in 1..=17 {
                let hit = g.find_mono_clique(k, shade).is_some();
                if absent {
                    assert!(!hit, "clique of size {k} after absence at a smaller size");
                }
                absent = absent || !hit;
            }
        }
    }

    #[test]
    fn mono_biclique_search() {
        let g = quadratic_residue_k17();
        for shade in BlueShade::BOTH {
            assert_eq!(g.find_mono_biclique(4, 3, shade), None);
            assert_eq!(g.find_mono_biclique(5, 2, shade), None);
        }
        let single = SplittingGraph::from_b0_edges(2, &[(1, 2)]).unwrap();
        assert_eq!(
            single.find_mono_biclique(1, 1, BlueShade::B0),
            Some((vec![1], vec![2]))
        );
        assert_eq!(single.find_mono_biclique(1, 1, BlueShade::B1), None);
    }

    #[test]
    fn validate_passes_on_residue_graph_and_deletion() {
        assert!(quadratic_residue_k17().validate().pass);
        let g = build_cyclic_splitting(17, &QR17_CLASS0, &[15, 16, 17]).unwrap();
        assert!(g.validate().pass);
    }

    #[test]
    fn validate_fails_on_monochromatic_graph() {
        // all-b0 K7: edges (p, q) for every pair
        let mut edges = Vec::new();
        for p in 1..=7u32 {
            for q in (p + 1)..=7 {
                edges.push((p, q));
            }
        }
        let g = SplittingGraph::from_b0_edges(7, &edges).unwrap();
        let report = g.validate();
        assert!(!report.pass);
        assert_eq!(
            report.mono_k4,
            Some(CliqueWitness {
                shade: "b0".into(),
                points: vec![1, 2, 3, 4],
            })
        );
    }

    #[test]
    fn translation_invariance_before_deletion() {
        let g = quadratic_residue_k17();
        for p in 1..=17u32 {
            for q in 1..=17u32 {
                if p == q {
                    continue;
                }
                let (tp, tq) = (p % 17 + 1, q % 17 + 1);
                assert_eq!(
                    g.edge_color(p, q).unwrap(),
                    g.edge_color(tp, tq).unwrap(),
                    "translation broke at ({p},{q})"
                );
            }
        }
    }

    proptest! {
        /// Induced subgraphs of a passing graph pass as well.
        #[test]
        fn validate_is_monotone_under_deletion(mask in 0u32..(1 << 17)) {
            let dels: Vec<u32> = (1..=17u32).filter(|p| mask >> (p - 1) & 1 == 1).collect();
            prop_assume!(dels.len() <= 10);
            let g = quadratic_residue_k17().without_points(&dels).unwrap();
            if g.point_count() >= 7 {
                prop_assert!(g.validate().pass);
            }
        }
    }
}

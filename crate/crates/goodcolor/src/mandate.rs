//! Label sets and mandatory triple sets.
//!
//! A mandatory set over a label set L is a subset of L^3: the ordered
//! triangle color-triples that are allowed to occur — and, on the first
//! coordinate's edges, are *required* to occur. Two families are built in:
//! the red/blue family (every triple containing red) and the family of
//! constant-or-all-distinct triples.

use thiserror::Error;

/// Dense label id in `[0, |L|)`; names live in the owning [`MandatorySet`]
/// or coloring.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Label(pub u8);

/// An ordered color triple; no symmetry is assumed.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ColorTriple(pub Label, pub Label, pub Label);

/// A triple whose first coordinate is fixed to an edge's color: for an edge
/// colored `c1`, every `(c1, c2, c3)` in the mandatory set is a *need* of
/// that edge, satisfied by a vertex `z` with `c(xz) = c2` and `c(yz) = c3`.
pub type Need = ColorTriple;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MandateError {
    #[error("a mandatory-set family needs at least one label")]
    EmptyFamily,
    #[error("too many labels: {0} (ids must stay dense in a u8)")]
    TooManyLabels(usize),
    #[error("duplicate label name {0:?}")]
    DuplicateLabel(String),
    #[error("unknown label name {0:?}")]
    UnknownLabel(String),
    #[error("triple references label id {0} outside the label set")]
    LabelOutOfRange(u8),
}

/// A label set together with a total membership predicate on ordered triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MandatorySet {
    labels: Vec<String>,
    member: Vec<bool>, // |L|^3 entries, index (c1*|L| + c2)*|L| + c3
}

impl MandatorySet {
    fn with_predicate<F: Fn(u8, u8, u8) -> bool>(
        labels: Vec<String>,
        pred: F,
    ) -> Result<Self, MandateError> {
        if labels.is_empty() {
            return Err(MandateError::EmptyFamily);
        }
        if labels.len() > u8::MAX as usize {
            return Err(MandateError::TooManyLabels(labels.len()));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &labels {
            if !seen.insert(name.as_str()) {
                return Err(MandateError::DuplicateLabel(name.clone()));
            }
        }
        let l = labels.len();
        let mut member = vec![false; l * l * l];
        for c1 in 0..l as u8 {
            for c2 in 0..l as u8 {
                for c3 in 0..l as u8 {
                    if pred(c1, c2, c3) {
                        member[(c1 as usize * l + c2 as usize) * l + c3 as usize] = true;
                    }
                }
            }
        }
        Ok(MandatorySet { labels, member })
    }

    /// The family with labels `r, b0, .., b{n-1}` whose members are exactly
    /// the triples containing `r` — all of L^3 minus the all-blue cube.
    pub fn mn(n: u32) -> Result<Self, MandateError> {
        if n == 0 {
            return Err(MandateError::EmptyFamily);
        }
        let mut labels = vec!["r".to_string()];
        labels.extend((0..n).map(|i| format!("b{i}")));
        Self::with_predicate(labels, |c1, c2, c3| c1 == 0 || c2 == 0 || c3 == 0)
    }

    /// The family with labels `r1, .., r{l}` whose members are the constant
    /// triples and the all-distinct triples.
    pub fn lyndon(l: u32) -> Result<Self, MandateError> {
        if l == 0 {
            return Err(MandateError::EmptyFamily);
        }
        let labels = (1..=l).map(|i| format!("r{i}")).collect();
        Self::with_predicate(labels, |c1, c2, c3| {
            let constant = c1 == c2 && c2 == c3;
            let distinct = c1 != c2 && c2 != c3 && c1 != c3;
            constant || distinct
        })
    }

    /// An arbitrary mandatory set given as an explicit triple list. No
    /// closure of any kind is assumed.
    pub fn from_triples(
        labels: Vec<String>,
        triples: &[ColorTriple],
    ) -> Result<Self, MandateError> {
        let l = labels.len();
        for t in triples {
            for id in [t.0 .0, t.1 .0, t.2 .0] {
                if id as usize >= l {
                    return Err(MandateError::LabelOutOfRange(id));
                }
            }
        }
        let set: std::collections::HashSet<ColorTriple> = triples.iter().copied().collect();
        Self::with_predicate(labels, |c1, c2, c3| {
            set.contains(&ColorTriple(Label(c1), Label(c2), Label(c3)))
        })
    }

    /// Same as [`from_triples`](Self::from_triples) with label names.
    pub fn from_named_triples(
        labels: Vec<String>,
        triples: &[[String; 3]],
    ) -> Result<Self, MandateError> {
        let resolve = |name: &String| -> Result<Label, MandateError> {
            labels
                .iter()
                .position(|l| l == name)
                .map(|i| Label(i as u8))
                .ok_or_else(|| MandateError::UnknownLabel(name.clone()))
        };
        let mut resolved = Vec::with_capacity(triples.len());
        for t in triples {
            resolved.push(ColorTriple(resolve(&t[0])?, resolve(&t[1])?, resolve(&t[2])?));
        }
        Self::from_triples(labels, &resolved)
    }

    #[inline]
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn label_count(&self) -> usize {
        self.labels.len()
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

    /// Number of member triples.
    pub fn len(&self) -> usize {
        self.member.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.member.iter().all(|&b| !b)
    }

    #[inline]
    pub fn contains(&self, t: ColorTriple) -> bool {
        let l = self.labels.len();
        debug_assert!((t.0 .0 as usize) < l && (t.1 .0 as usize) < l && (t.2 .0 as usize) < l);
        self.member[(t.0 .0 as usize * l + t.1 .0 as usize) * l + t.2 .0 as usize]
    }

    /// All `(c1, j, k)` members with the given first coordinate, ordered
    /// lexicographically by `(j, k)` ids. This order is the canonical need
    /// order in every report.
    pub fn needs_of(&self, c1: Label) -> Vec<Need> {
        let l = self.labels.len() as u8;
        let mut out = Vec::new();
        for c2 in 0..l {
            for c3 in 0..l {
                let t = ColorTriple(c1, Label(c2), Label(c3));
                if self.contains(t) {
                    out.push(t);
                }
            }
        }
        out
    }

    /// Whether membership is invariant under swapping the last two
    /// coordinates. When it is not, the two ways of orienting a witness
    /// (`c2 = c(xz)` versus `c2 = c(yz)`) genuinely differ and reports say so.
    pub fn is_swap23_closed(&self) -> bool {
        let l = self.labels.len() as u8;
        for c1 in 0..l {
            for c2 in 0..l {
                for c3 in 0..l {
                    let a = ColorTriple(Label(c1), Label(c2), Label(c3));
                    let b = ColorTriple(Label(c1), Label(c3), Label(c2));
                    if self.contains(a) != self.contains(b) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Whether membership is invariant under all six coordinate permutations.
    pub fn is_permutation_closed(&self) -> bool {
        let l = self.labels.len() as u8;
        for c1 in 0..l {
            for c2 in 0..l {
                for c3 in 0..l {
                    let base = self.contains(ColorTriple(Label(c1), Label(c2), Label(c3)));
                    let perms = [
                        (c1, c3, c2),
                        (c2, c1, c3),
                        (c2, c3, c1),
                        (c3, c1, c2),
                        (c3, c2, c1),
                    ];
                    for (a, b, c) in perms {
                        if self.contains(ColorTriple(Label(a), Label(b), Label(c))) != base {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lbl(m: &MandatorySet, name: &str) -> Label {
        m.label_id(name).unwrap()
    }

    #[test]
    fn mn_sizes() {
        assert_eq!(MandatorySet::mn(2).unwrap().len(), 19); // 3^3 - 2^3
        assert_eq!(MandatorySet::mn(1).unwrap().len(), 7); // 2^3 - 1^3
        assert!(matches!(MandatorySet::mn(0), Err(MandateError::EmptyFamily)));
    }

    #[test]
    fn mn2_membership() {
        let m = MandatorySet::mn(2).unwrap();
        let (r, b0, b1) = (lbl(&m, "r"), lbl(&m, "b0"), lbl(&m, "b1"));
        assert!(!m.contains(ColorTriple(b0, b0, b0)));
        assert!(!m.contains(ColorTriple(b1, b0, b0)));
        assert!(m.contains(ColorTriple(r, b1, b0)));
        assert!(m.contains(ColorTriple(b0, r, b1)));
    }

    #[test]
    fn lyndon_sizes_and_membership() {
        let m4 = MandatorySet::lyndon(4).unwrap();
        assert_eq!(m4.len(), 28); // 4 constant + 4*3*2 distinct
        let (r1, r2) = (lbl(&m4, "r1"), lbl(&m4, "r2"));
        assert!(!m4.contains(ColorTriple(r1, r1, r2)));
        assert!(m4.contains(ColorTriple(r1, r1, r1)));

        let m1 = MandatorySet::lyndon(1).unwrap();
        assert_eq!(m1.len(), 1);
        assert!(m1.contains(ColorTriple(Label(0), Label(0), Label(0))));
        assert!(matches!(
            MandatorySet::lyndon(0),
            Err(MandateError::EmptyFamily)
        ));
    }

    #[test]
    fn needs_counts_and_order() {
        let m = MandatorySet::mn(2).unwrap();
        let (r, b0, b1) = (lbl(&m, "r"), lbl(&m, "b0"), lbl(&m, "b1"));
        assert_eq!(m.needs_of(r).len(), 9);
        let needs = m.needs_of(b0);
        assert_eq!(
            needs,
            vec![
                ColorTriple(b0, r, r),
                ColorTriple(b0, r, b0),
                ColorTriple(b0, r, b1),
                ColorTriple(b0, b0, r),
                ColorTriple(b0, b1, r),
            ]
        );
        // lexicographic by (c2, c3) ids
        assert!(needs.windows(2).all(|w| (w[0].1, w[0].2) < (w[1].1, w[1].2)));

        let m1 = MandatorySet::mn(1).unwrap();
        assert_eq!(m1.needs_of(lbl(&m1, "b0")).len(), 3);
    }

    #[test]
    fn needs_sum_equals_size() {
        for m in [
            MandatorySet::mn(2).unwrap(),
            MandatorySet::mn(3).unwrap(),
            MandatorySet::lyndon(4).unwrap(),
        ] {
            let total: usize = (0..m.label_count() as u8)
                .map(|c1| m.needs_of(Label(c1)).len())
                .sum();
            assert_eq!(total, m.len());
        }
    }

    #[test]
    fn explicit_triples_agree_with_list() {
        let labels = vec!["r".to_string(), "b".to_string()];
        let triples = vec![
            ColorTriple(Label(0), Label(0), Label(0)),
            ColorTriple(Label(0), Label(1), Label(0)),
        ];
        let m = MandatorySet::from_triples(labels, &triples).unwrap();
        assert_eq!(m.len(), 2);
        for t in &triples {
            assert!(m.contains(*t));
        }
        assert!(!m.contains(ColorTriple(Label(1), Label(0), Label(0))));
        assert!(!m.is_swap23_closed()); // (r,b,r) in, (r,r,b) out
    }

    #[test]
    fn named_triples_resolve_and_reject() {
        let labels = vec!["r".to_string(), "b0".to_string()];
        let m = MandatorySet::from_named_triples(
            labels.clone(),
            &[["r".into(), "b0".into(), "r".into()]],
        )
        .unwrap();
        assert_eq!(m.len(), 1);
        assert!(matches!(
            MandatorySet::from_named_triples(labels, &[["r".into(), "x".into(), "r".into()]]),
            Err(MandateError::UnknownLabel(_))
        ));
    }

    proptest! {
        #[test]
        fn builtin_families_are_permutation_closed(n in 1u32..6) {
            prop_assert!(MandatorySet::mn(n).unwrap().is_permutation_closed());
            prop_assert!(MandatorySet::lyndon(n).unwrap().is_permutation_closed());
        }
    }
}

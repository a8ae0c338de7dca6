//! Cyclic colorings whose blue class is a sum-free difference set, and a
//! budgeted, seeded search for a split of that class into two shades under
//! which every need is still witnessed.
//!
//! A sum-free symmetric difference set yields a triangle-free blue graph, so
//! condition (2) survives any split; what the search optimizes is the number
//! of unmet (ordered pair, need) checks — the *deficiency* — of condition
//! (1). The search unit is the negation orbit {d, m-d}: shades must stay
//! closed under negation to color undirected edges consistently.

use crate::construct::build_cyclic_coloring;
use crate::mandate::MandatorySet;
use crate::verify::{verify_good, VerifyOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("modulus {0} is too small")]
    ModulusTooSmall(u32),
    #[error("residue {residue} outside [1, {max}]")]
    ResidueOutOfRange { residue: u32, max: u32 },
    #[error("difference set is not symmetric: contains {d} but not {complement}")]
    Asymmetric { d: u32, complement: u32 },
    #[error("moduli differ: {0} versus {1}")]
    ModulusMismatch(u32, u32),
    #[error("blue and red classes do not partition the nonzero residues (residue {0})")]
    NotPartition(u32),
    #[error("blue difference set is not sum-free ({a} + {b} = {c})")]
    NotSumFree { a: u32, b: u32, c: u32 },
    #[error("search budget must be at least 1")]
    ZeroBudget,
}

/// A set of nonzero residues mod `modulus`, closed under negation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceSet {
    modulus: u32,
    diffs: Vec<u32>, // sorted, deduplicated
}

impl DifferenceSet {
    pub fn new(modulus: u32, diffs: &[u32]) -> Result<Self, SearchError> {
        if modulus < 2 {
            return Err(SearchError::ModulusTooSmall(modulus));
        }
        let mut sorted: Vec<u32> = diffs.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &d in &sorted {
            if d == 0 || d >= modulus {
                return Err(SearchError::ResidueOutOfRange {
                    residue: d,
                    max: modulus - 1,
                });
            }
            if !sorted.contains(&(modulus - d)) {
                return Err(SearchError::Asymmetric {
                    d,
                    complement: modulus - d,
                });
            }
        }
        Ok(DifferenceSet {
            modulus,
            diffs: sorted,
        })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn diffs(&self) -> &[u32] {
        &self.diffs
    }

    pub fn len(&self) -> usize {
        self.diffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diffs.is_empty()
    }

    /// Negation orbits {d, m-d} in ascending order of representative.
    pub fn orbits(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        for &d in &self.diffs {
            if d <= self.modulus - d {
                let mut orbit = vec![d];
                if self.modulus - d != d {
                    orbit.push(self.modulus - d);
                }
                out.push(orbit);
            }
        }
        out
    }
}

/// True iff no two members (repetition allowed) sum to a member mod m;
/// equivalently, the cyclic graph on the set is triangle-free.
pub fn is_sum_free(d: &DifferenceSet) -> bool {
    first_sum_violation(d).is_none()
}

fn first_sum_violation(d: &DifferenceSet) -> Option<(u32, u32, u32)> {
    let m = d.modulus;
    let member: Vec<bool> = {
        let mut v = vec![false; m as usize];
        for &x in &d.diffs {
            v[x as usize] = true;
        }
        v
    };
    for &a in &d.diffs {
        for &b in &d.diffs {
            let c = (a + b) % m;
            if member[c as usize] {
                return Some((a, b, c));
            }
        }
    }
    None
}

/// One split of the blue class, with its condition-(1) failure count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitCandidate {
    pub b0: DifferenceSet,
    pub b1: DifferenceSet,
    pub deficiency: u64,
}

/// One accepted improvement during the search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub step: u64,
    pub deficiency: u64,
    pub b0: Vec<u32>,
    pub b1: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitSearchOutcome {
    /// The blue class has fewer than two negation orbits, so no split with
    /// two nonempty symmetric shades exists.
    NoSymmetricSplit,
    /// A zero-deficiency split: the induced coloring meets every need.
    Found(SplitCandidate),
    /// Budget exhausted; the best candidate seen.
    Exhausted(SplitCandidate),
}

#[derive(Clone, Debug)]
pub struct SplitSearch {
    pub outcome: SplitSearchOutcome,
    pub trace: Vec<TraceStep>,
    pub evaluations: u64,
}

/// Seeded hill-climbing with restarts over symmetric bipartitions of the
/// blue difference set, minimizing the number of unmet needs of the induced
/// red/b0/b1 cyclic coloring. Deterministic for a fixed (budget, seed).
pub fn search_split(
    blue: &DifferenceSet,
    red: &DifferenceSet,
    budget: u64,
    seed: u64,
) -> Result<SplitSearch, SearchError> {
    if budget == 0 {
        return Err(SearchError::ZeroBudget);
    }
    if blue.modulus != red.modulus {
        return Err(SearchError::ModulusMismatch(blue.modulus, red.modulus));
    }
    let m = blue.modulus;
    let mut seen = vec![0u8; m as usize];
    for &d in &blue.diffs {
        seen[d as usize] += 1;
    }
    for &d in &red.diffs {
        seen[d as usize] += 1;
    }
    if let Some(d) = (1..m).find(|&d| seen[d as usize] != 1) {
        return Err(SearchError::NotPartition(d));
    }
    if let Some((a, b, c)) = first_sum_violation(blue) {
        return Err(SearchError::NotSumFree { a, b, c });
    }

    let orbits = blue.orbits();
    if orbits.len() < 2 {
        return Ok(SplitSearch {
            outcome: SplitSearchOutcome::NoSymmetricSplit,
            trace: Vec::new(),
            evaluations: 0,
        });
    }

    let mandate = MandatorySet::mn(2).expect("two blue shades");
    let evaluate = |assignment: &[bool]| -> SplitCandidate {
        let mut d0 = Vec::new();
        let mut d1 = Vec::new();
        for (orbit, &to_b1) in orbits.iter().zip(assignment) {
            if to_b1 {
                d1.extend_from_slice(orbit);
            } else {
                d0.extend_from_slice(orbit);
            }
        }
        let c = build_cyclic_coloring(
            m,
            &[
                ("r".into(), red.diffs.clone()),
                ("b0".into(), d0.clone()),
                ("b1".into(), d1.clone()),
            ],
        )
        .expect("orbit split keeps classes symmetric");
        let report = verify_good(
            &c,
            &mandate,
            &VerifyOptions {
                threads: 0,
                failure_cap: 0,
            },
        )
        .expect("labels match the mandate");
        // a sum-free blue class admits no blue triangle, however it is split
        assert!(
            report.condition2.pass,
            "blue triangle in a sum-free class split"
        );
        SplitCandidate {
            b0: DifferenceSet::new(m, &d0).expect("orbits are symmetric"),
            b1: DifferenceSet::new(m, &d1).expect("orbits are symmetric"),
            deficiency: report.stats.condition1_failures,
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = orbits.len();
    let mut evaluations = 0u64;
    let mut trace = Vec::new();
    let mut best: Option<SplitCandidate> = None;

    'search: while evaluations < budget {
        // random restart with both shades nonempty
        let mut assignment: Vec<bool> = (0..k).map(|_| rng.random_bool(0.5)).collect();
        if assignment.iter().all(|&b| b) || assignment.iter().all(|&b| !b) {
            let i = rng.random_range(0..k);
            assignment[i] = !assignment[i];
        }
        let mut current = evaluate(&assignment);
        evaluations += 1;
        let mut improved_best = best
            .as_ref()
            .map(|b| current.deficiency < b.deficiency)
            .unwrap_or(true);
        if improved_best {
            trace.push(TraceStep {
                step: evaluations,
                deficiency: current.deficiency,
                b0: current.b0.diffs.clone(),
                b1: current.b1.diffs.clone(),
            });
            best = Some(current.clone());
            if current.deficiency == 0 {
                break 'search;
            }
        }

        // first-improvement hill climbing over single orbit flips
        loop {
            let mut moved = false;
            for i in 0..k {
                if evaluations >= budget {
                    break 'search;
                }
                assignment[i] = !assignment[i];
                if assignment.iter().all(|&b| b) || assignment.iter().all(|&b| !b) {
                    assignment[i] = !assignment[i];
                    continue;
                }
                let candidate = evaluate(&assignment);
                evaluations += 1;
                if candidate.deficiency < current.deficiency {
                    current = candidate;
                    moved = true;
                    improved_best = best
                        .as_ref()
                        .map(|b| current.deficiency < b.deficiency)
                        .unwrap_or(true);
                    if improved_best {
                        trace.push(TraceStep {
                            step: evaluations,
                            deficiency: current.deficiency,
                            b0: current.b0.diffs.clone(),
                            b1: current.b1.diffs.clone(),
                        });
                        best = Some(current.clone());
                        if current.deficiency == 0 {
                            break 'search;
                        }
                    }
                } else {
                    assignment[i] = !assignment[i]; // undo
                }
            }
            if !moved {
                break; // local optimum; restart
            }
        }
    }

    let best = best.expect("at least one evaluation happened");
    let outcome = if best.deficiency == 0 {
        SplitSearchOutcome::Found(best)
    } else {
        SplitSearchOutcome::Exhausted(best)
    };
    Ok(SplitSearch {
        outcome,
        trace,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::naive_verify;
    use rand::RngCore;

    #[test]
    fn sum_free_examples() {
        assert!(is_sum_free(&DifferenceSet::new(5, &[2, 3]).unwrap()));
        assert!(!is_sum_free(&DifferenceSet::new(17, &[1, 2, 15, 16]).unwrap()));
        assert!(is_sum_free(&DifferenceSet::new(7, &[]).unwrap()));
    }

    #[test]
    fn difference_set_validation() {
        assert!(matches!(
            DifferenceSet::new(10, &[3]),
            Err(SearchError::Asymmetric { d: 3, complement: 7 })
        ));
        assert!(matches!(
            DifferenceSet::new(10, &[0]),
            Err(SearchError::ResidueOutOfRange { .. })
        ));
        // the self-negating residue m/2 is fine on its own
        assert!(DifferenceSet::new(10, &[5]).is_ok());
    }

    #[test]
    fn orbit_decomposition() {
        let d = DifferenceSet::new(12, &[2, 5, 6, 7, 10]).unwrap();
        assert_eq!(d.orbits(), vec![vec![2, 10], vec![5, 7], vec![6]]);
    }

    /// Sum-freeness is exactly triangle-freeness of the cyclic blue graph.
    #[test]
    fn sum_free_matches_triangle_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let m = 3 + (rng.next_u32() % 198); // up to 200
            let mut diffs = Vec::new();
            for d in 1..=m / 2 {
                if rng.random_bool(0.25) {
                    diffs.push(d);
                    if m - d != d {
                        diffs.push(m - d);
                    }
                }
            }
            let set = DifferenceSet::new(m, &diffs).unwrap();
            let member = {
                let mut v = vec![false; m as usize];
                for &d in set.diffs() {
                    v[d as usize] = true;
                }
                v
            };
            let mut triangle = false;
            'scan: for a in 0..m as usize {
                for b in (a + 1)..m as usize {
                    if !member[(b - a) % m as usize] {
                        continue;
                    }
                    for c in (b + 1)..m as usize {
                        if member[(c - b) % m as usize] && member[(c - a) % m as usize] {
                            triangle = true;
                            break 'scan;
                        }
                    }
                }
            }
            assert_eq!(is_sum_free(&set), !triangle, "modulus {m} diffs {diffs:?}");
        }
    }

    #[test]
    fn single_orbit_has_no_symmetric_split() {
        let blue = DifferenceSet::new(5, &[2, 3]).unwrap();
        let red = DifferenceSet::new(5, &[1, 4]).unwrap();
        let result = search_split(&blue, &red, 100, 1).unwrap();
        assert_eq!(result.outcome, SplitSearchOutcome::NoSymmetricSplit);
        assert!(result.trace.is_empty());
    }

    #[test]
    fn invalid_inputs_rejected() {
        let blue = DifferenceSet::new(13, &[5, 6, 7, 8]).unwrap();
        let red = DifferenceSet::new(13, &[1, 2, 3, 4, 9, 10, 11, 12]).unwrap();
        assert!(matches!(
            search_split(&blue, &red, 0, 1),
            Err(SearchError::ZeroBudget)
        ));
        let not_partition = DifferenceSet::new(13, &[1, 2, 11, 12]).unwrap();
        assert!(matches!(
            search_split(&blue, &not_partition, 10, 1),
            Err(SearchError::NotPartition(_))
        ));
        let not_sum_free = DifferenceSet::new(13, &[1, 2, 3, 10, 11, 12]).unwrap();
        let rest = DifferenceSet::new(13, &[4, 5, 6, 7, 8, 9]).unwrap();
        assert!(matches!(
            search_split(&not_sum_free, &rest, 10, 1),
            Err(SearchError::NotSumFree { .. })
        ));
    }

    #[test]
    fn search_is_deterministic_per_seed() {
        let blue = DifferenceSet::new(13, &[5, 6, 7, 8]).unwrap();
        let red = DifferenceSet::new(13, &[1, 2, 3, 4, 9, 10, 11, 12]).unwrap();
        let a = search_split(&blue, &red, 40, 9).unwrap();
        let b = search_split(&blue, &red, 40, 9).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.evaluations, b.evaluations);
        assert_eq!(a.outcome, b.outcome);
        let other = search_split(&blue, &red, 40, 10).unwrap();
        // different seed may explore differently, but outcomes stay valid
        match (&a.outcome, &other.outcome) {
            (
                SplitSearchOutcome::Exhausted(x) | SplitSearchOutcome::Found(x),
                SplitSearchOutcome::Exhausted(y) | SplitSearchOutcome::Found(y),
            ) => {
                // both partition the blue set
                for cand in [x, y] {
                    let mut all: Vec<u32> =
                        cand.b0.diffs().iter().chain(cand.b1.diffs()).copied().collect();
                    all.sort_unstable();
                    assert_eq!(all, blue.diffs());
                }
            }
            _ => panic!("expected evaluated candidates"),
        }
    }

    /// The search's deficiency is the same count an independent verifier
    /// derives on the induced coloring.
    #[test]
    fn deficiency_matches_oracle_counts() {
        let blue = DifferenceSet::new(21, &[8, 9, 12, 13]).unwrap();
        let red_diffs: Vec<u32> = (1..21).filter(|d| !blue.diffs().contains(d)).collect();
        let red = DifferenceSet::new(21, &red_diffs).unwrap();
        assert!(is_sum_free(&blue));
        let result = search_split(&blue, &red, 12, 3).unwrap();
        let cand = match &result.outcome {
            SplitSearchOutcome::Found(c) | SplitSearchOutcome::Exhausted(c) => c,
            SplitSearchOutcome::NoSymmetricSplit => panic!("two orbits exist"),
        };
        let coloring = build_cyclic_coloring(
            21,
            &[
                ("r".into(), red.diffs().to_vec()),
                ("b0".into(), cand.b0.diffs().to_vec()),
                ("b1".into(), cand.b1.diffs().to_vec()),
            ],
        )
        .unwrap();
        let report = naive_verify(&coloring, &MandatorySet::mn(2).unwrap()).unwrap();
        assert_eq!(report.stats.condition1_failures, cand.deficiency);
        assert!(report.condition2.pass, "split broke triangle-freeness");
    }
}

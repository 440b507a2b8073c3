//! Minimum set cover: instances, an exact branch-and-bound solver and the
//! greedy approximation.
//!
//! Elements and set indices are 0-based here. Reports render them 1-based.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest universe the exact solver accepts unless told otherwise.
pub const DEFAULT_EXACT_LIMIT: usize = 30;

/// Hard ceiling imposed by the 64-bit element masks.
pub const MAX_EXACT_LIMIT: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetCoverInstance {
    universe_size: usize,
    sets: Vec<Vec<usize>>,
}

impl SetCoverInstance {
    /// Universe is `0..universe_size`. Each set is sorted and deduplicated.
    /// Fails unless every set lies in the universe and their union is the
    /// whole universe.
    pub fn new(universe_size: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut covered = vec![false; universe_size];
        let mut normalized = Vec::with_capacity(sets.len());
        for (i, mut set) in sets.into_iter().enumerate() {
            set.sort_unstable();
            set.dedup();
            if let Some(&e) = set.iter().find(|&&e| e >= universe_size) {
                return Err(Error::InvalidInstance(format!(
                    "set {i} contains element {e} outside a universe of {universe_size}"
                )));
            }
            for &e in &set {
                covered[e] = true;
            }
            normalized.push(set);
        }
        if let Some(e) = covered.iter().position(|&c| !c) {
            return Err(Error::InvalidInstance(format!("element {e} is in no set")));
        }
        Ok(Self {
            universe_size,
            sets: normalized,
        })
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn is_cover(&self, indices: &[usize]) -> Result<bool> {
        let mut covered = vec![false; self.universe_size];
        for &i in indices {
            let set = self.sets.get(i).ok_or(Error::IndexOutOfRange {
                index: i,
                len: self.sets.len(),
            })?;
            for &e in set {
                covered[e] = true;
            }
        }
        Ok(covered.into_iter().all(|c| c))
    }

    fn masks(&self) -> Vec<u64> {
        self.sets
            .iter()
            .map(|s| s.iter().fold(0u64, |m, &e| m | (1 << e)))
            .collect()
    }

    fn full_mask(&self) -> u64 {
        if self.universe_size == 64 {
            u64::MAX
        } else {
            (1u64 << self.universe_size) - 1
        }
    }

    /// Exact minimum cover with [`DEFAULT_EXACT_LIMIT`].
    pub fn solve_exact(&self) -> Result<CoverSolution> {
        self.solve_exact_with_limit(DEFAULT_EXACT_LIMIT)
    }

    /// Minimum-cardinality cover; among those, the lexicographically
    /// smallest sorted index list.
    ///
    /// The optimum size is found on the family with dominated sets removed.
    /// The returned indices are then reconstructed on the original family,
    /// trying indices in increasing order and keeping the first one whose
    /// remainder still admits a cover within budget.
    pub fn solve_exact_with_limit(&self, limit: usize) -> Result<CoverSolution> {
        let limit = limit.min(MAX_EXACT_LIMIT);
        if self.universe_size > limit {
            return Err(Error::TooLarge {
                size: self.universe_size,
                limit,
            });
        }
        let full = self.full_mask();
        if full == 0 {
            return Ok(CoverSolution {
                indices: Vec::new(),
                exact: true,
            });
        }
        let masks = self.masks();
        let upper = self.solve_greedy().indices.len() as u32;

        let reduced: Vec<u64> = undominated(&masks).into_iter().map(|i| masks[i]).collect();
        let optimum = CoverSearch::new(&reduced)
            .min_cover(full, 0, upper)
            .expect("greedy bound admits a cover");

        let mut search = CoverSearch::new(&masks);
        let mut chosen = Vec::with_capacity(optimum as usize);
        let mut remaining = full;
        let mut start = 0;
        for budget in (1..=optimum).rev() {
            let pick = (start..masks.len())
                .find(|&i| {
                    masks[i] & remaining != 0
                        && search.min_cover(remaining & !masks[i], i + 1, budget - 1).is_some()
                })
                .expect("an optimal cover extends the current prefix");
            chosen.push(pick);
            remaining &= !masks[pick];
            start = pick + 1;
        }
        debug_assert_eq!(remaining, 0);
        Ok(CoverSolution {
            indices: chosen,
            exact: true,
        })
    }

    /// Repeatedly takes the set covering the most uncovered elements, lowest
    /// index first on ties.
    pub fn solve_greedy(&self) -> CoverSolution {
        let mut covered = vec![false; self.universe_size];
        let mut left = self.universe_size;
        let mut chosen = Vec::new();
        while left > 0 {
            let (best, gain) = self
                .sets
                .iter()
                .enumerate()
                .map(|(i, s)| (i, s.iter().filter(|&&e| !covered[e]).count()))
                .fold((0, 0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            debug_assert!(gain > 0, "instance invariant guarantees progress");
            for &e in &self.sets[best] {
                covered[e] = true;
            }
            left -= gain;
            chosen.push(best);
        }
        chosen.sort_unstable();
        CoverSolution {
            indices: chosen,
            exact: false,
        }
    }
}

/// Indices of sets not contained in another set. Among identical sets the
/// lowest index survives; empty sets never survive.
fn undominated(masks: &[u64]) -> Vec<usize> {
    (0..masks.len())
        .filter(|&i| {
            masks[i] != 0
                && !masks.iter().enumerate().any(|(j, &mj)| {
                    j != i && masks[i] & !mj == 0 && (masks[i] != mj || j < i)
                })
        })
        .collect()
}

#[derive(Clone, Copy, Debug)]
enum Bound {
    Exact(u32),
    AtLeast(u32),
}

/// Memoized branch and bound over `(uncovered mask, first allowed set)`.
struct CoverSearch<'a> {
    masks: &'a [u64],
    memo: HashMap<(u64, usize), Bound>,
}

impl<'a> CoverSearch<'a> {
    fn new(masks: &'a [u64]) -> Self {
        Self {
            masks,
            memo: HashMap::new(),
        }
    }

    /// Size of the smallest cover of `uncovered` using sets `start..`, if it
    /// is at most `cap`.
    fn min_cover(&mut self, uncovered: u64, start: usize, cap: u32) -> Option<u32> {
        if uncovered == 0 {
            return Some(0);
        }
        if cap == 0 {
            return None;
        }
        let key = (uncovered, start);
        match self.memo.get(&key) {
            Some(Bound::Exact(v)) => return (*v <= cap).then_some(*v),
            Some(Bound::AtLeast(v)) if *v > cap => return None,
            _ => {}
        }

        let allowed = &self.masks[start.min(self.masks.len())..];
        let widest = allowed.iter().map(|m| (m & uncovered).count_ones()).max().unwrap_or(0);
        if widest == 0 {
            self.memo.insert(key, Bound::AtLeast(u32::MAX));
            return None;
        }
        let lower = uncovered.count_ones().div_ceil(widest);
        if lower > cap {
            self.record_lower(key, lower);
            return None;
        }

        // Branch on the uncovered element with the fewest candidate sets.
        let mut element = 0;
        let mut fewest = usize::MAX;
        let mut bits = uncovered;
        while bits != 0 {
            let e = bits.trailing_zeros();
            bits &= bits - 1;
            let count = allowed.iter().filter(|m| *m & (1 << e) != 0).count();
            if count < fewest {
                fewest = count;
                element = e;
            }
        }
        if fewest == 0 {
            self.memo.insert(key, Bound::AtLeast(u32::MAX));
            return None;
        }
        let mut candidates: Vec<u64> = allowed.iter().copied().filter(|m| m & (1 << element) != 0).collect();
        candidates.sort_by_key(|m| std::cmp::Reverse((m & uncovered).count_ones()));

        let mut best: Option<u32> = None;
        for m in candidates {
            let child_cap = match best {
                Some(b) if b <= 1 => break,
                Some(b) => b - 2,
                None => cap - 1,
            };
            if let Some(v) = self.min_cover(uncovered & !m, start, child_cap) {
                best = Some(v + 1);
            }
        }
        match best {
            Some(b) => {
                self.memo.insert(key, Bound::Exact(b));
                Some(b)
            }
            None => {
                self.record_lower(key, cap + 1);
                None
            }
        }
    }

    fn record_lower(&mut self, key: (u64, usize), lower: u32) {
        let entry = self.memo.entry(key).or_insert(Bound::AtLeast(0));
        if let Bound::AtLeast(v) = entry {
            *v = (*v).max(lower);
        }
    }
}

/// A cover given as sorted 0-based set indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverSolution {
    pub indices: Vec<usize>,
    pub exact: bool,
}

impl CoverSolution {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// The worked-example family, 0-based.
    fn eq7_instance() -> SetCoverInstance {
        SetCoverInstance::new(5, vec![vec![0, 4], vec![0, 3], vec![1, 4], vec![2, 4], vec![0, 1]]).unwrap()
    }

    fn brute_force(inst: &SetCoverInstance) -> Vec<usize> {
        let n = inst.num_sets();
        for k in 0..=n {
            let mut combo: Vec<usize> = (0..k).collect();
            loop {
                if inst.is_cover(&combo).unwrap() {
                    return combo;
                }
                // next k-combination in lexicographic order
                let mut i = k;
                while i > 0 && combo[i - 1] == n - k + i - 1 {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                combo[i - 1] += 1;
                for j in i..k {
                    combo[j] = combo[j - 1] + 1;
                }
            }
        }
        unreachable!("union of all sets is the universe")
    }

    #[test]
    fn is_cover_examples() {
        let inst = eq7_instance();
        assert!(inst.is_cover(&[1, 2, 3]).unwrap());
        assert!(!inst.is_cover(&[0, 1]).unwrap());
        assert!(inst.is_cover(&[0, 1, 2, 3, 4]).unwrap());
        assert!(matches!(inst.is_cover(&[5]), Err(Error::IndexOutOfRange { index: 5, len: 5 })));
    }

    #[test]
    fn exact_examples() {
        let sol = eq7_instance().solve_exact().unwrap();
        assert_eq!(sol.indices, vec![1, 2, 3]);
        assert!(sol.exact);

        let single = SetCoverInstance::new(1, vec![vec![0]]).unwrap();
        assert_eq!(single.solve_exact().unwrap().indices, vec![0]);

        let singletons = SetCoverInstance::new(6, (0..6).map(|i| vec![i]).collect()).unwrap();
        assert_eq!(singletons.solve_exact().unwrap().indices, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn greedy_examples() {
        let sol = eq7_instance().solve_greedy();
        assert_eq!(sol.indices, vec![0, 1, 2, 3]);
        assert!(!sol.exact);

        let one = SetCoverInstance::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(one.solve_greedy().indices, vec![0]);

        let singletons = SetCoverInstance::new(4, (0..4).map(|i| vec![i]).collect()).unwrap();
        assert_eq!(singletons.solve_greedy().indices, singletons.solve_exact().unwrap().indices);
    }

    #[test]
    fn lexicographic_choice_survives_dominance_reduction() {
        // {0} is dominated by {0,1}, yet {0},{1,2} is the lexicographically
        // first optimal cover.
        let inst = SetCoverInstance::new(3, vec![vec![0], vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        assert_eq!(inst.solve_exact().unwrap().indices, vec![0, 2]);
    }

    #[test]
    fn limit_and_invalid_instances() {
        let big = SetCoverInstance::new(31, (0..31).map(|i| vec![i]).collect()).unwrap();
        assert!(matches!(big.solve_exact(), Err(Error::TooLarge { size: 31, limit: 30 })));
        assert_eq!(big.solve_exact_with_limit(40).unwrap().len(), 31);
        assert!(SetCoverInstance::new(3, vec![vec![0, 1]]).is_err());
        assert!(SetCoverInstance::new(2, vec![vec![0, 2]]).is_err());
    }

    fn instances() -> impl Strategy<Value = SetCoverInstance> {
        (1usize..=12, 1usize..=10).prop_flat_map(|(m, n)| {
            proptest::collection::vec(proptest::collection::vec(0..m, 0..=m), n).prop_map(move |mut sets| {
                // patch uncovered elements into pseudo-random sets
                let mut covered = vec![false; m];
                sets.iter().flatten().for_each(|&e| covered[e] = true);
                for e in (0..m).filter(|&e| !covered[e]) {
                    let k = (e * 7 + 3) % sets.len();
                    sets[k].push(e);
                }
                SetCoverInstance::new(m, sets).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn exact_matches_exhaustive_enumeration(inst in instances()) {
            let exact = inst.solve_exact().unwrap();
            prop_assert!(inst.is_cover(&exact.indices).unwrap());
            prop_assert_eq!(&exact.indices, &brute_force(&inst));
        }

        #[test]
        fn greedy_is_a_cover_no_smaller_than_exact(inst in instances()) {
            let greedy = inst.solve_greedy();
            let exact = inst.solve_exact().unwrap();
            prop_assert!(inst.is_cover(&greedy.indices).unwrap());
            prop_assert!(greedy.len() >= exact.len());
            let bound = (1.0 + (inst.universe_size() as f64).ln()) * exact.len() as f64;
            prop_assert!(greedy.len() as f64 <= bound + 1e-9);
            prop_assert_eq!(greedy, inst.solve_greedy());
        }
    }
}

//! Exact max-min k-partition over non-negative integers.
//!
//! The optimum is found by raising a target `T` one step past the best known
//! minimum and asking whether every cell can reach `T`. The decision search
//! places goods largest-first, only into cells still below `T`, skips cells
//! whose current sums coincide, prunes when the remaining value cannot close the
//! total deficit, and memoizes failed `(next good, open sums)` states.

use std::collections::HashSet;
use std::hash::Hash;
use std::ops::{Add, Sub};

use num_traits::{One, Zero};

/// Integer weight usable by the search. Implemented for `u128` and `BigInt`.
pub(crate) trait Weight:
    Clone + Ord + Hash + Zero + One + for<'a> Add<&'a Self, Output = Self> + for<'a> Sub<&'a Self, Output = Self>
{
    fn div_usize(&self, k: usize) -> Self;
}

impl Weight for u128 {
    fn div_usize(&self, k: usize) -> Self {
        self / k as u128
    }
}

impl Weight for num_bigint::BigInt {
    fn div_usize(&self, k: usize) -> Self {
        self / num_bigint::BigInt::from(k)
    }
}

const MEMO_LIMIT: usize = 4_000_000;

/// Returns the maximal minimum cell sum and a cell index per good.
pub(crate) fn max_min_partition<W: Weight>(values: &[W], parts: usize) -> (W, Vec<usize>) {
    assert!(parts >= 1);
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].cmp(&values[a]).then(a.cmp(&b)));
    let sorted: Vec<W> = order.iter().map(|&g| values[g].clone()).collect();

    let total = sorted.iter().fold(W::zero(), |acc, v| acc + v);
    let upper = total.div_usize(parts);

    let (mut best, mut assign) = greedy(&sorted, parts);
    while best < upper {
        let target = best.clone() + &W::one();
        match Decision::new(&sorted, parts, target).solve() {
            Some(found) => {
                best = min_cell(&sorted, &found, parts);
                assign = found;
            }
            None => break,
        }
    }

    let mut by_good = vec![0; values.len()];
    for (pos, &g) in order.iter().enumerate() {
        by_good[g] = assign[pos];
    }
    (best, by_good)
}

fn min_cell<W: Weight>(sorted: &[W], assign: &[usize], parts: usize) -> W {
    let mut sums = vec![W::zero(); parts];
    for (v, &c) in sorted.iter().zip(assign) {
        sums[c] = sums[c].clone() + v;
    }
    sums.into_iter().min().expect("parts >= 1")
}

/// Largest-first into the currently poorest cell.
fn greedy<W: Weight>(sorted: &[W], parts: usize) -> (W, Vec<usize>) {
    let mut sums = vec![W::zero(); parts];
    let mut assign = Vec::with_capacity(sorted.len());
    for v in sorted {
        let c = (0..parts).min_by(|&a, &b| sums[a].cmp(&sums[b])).expect("parts >= 1");
        sums[c] = sums[c].clone() + v;
        assign.push(c);
    }
    (sums.into_iter().min().expect("parts >= 1"), assign)
}

struct Decision<'a, W> {
    goods: &'a [W],
    /// `suffix[i]` = sum of `goods[i..]`
    suffix: Vec<W>,
    target: W,
    sums: Vec<W>,
    assign: Vec<usize>,
    failed: HashSet<(usize, Vec<W>)>,
}

impl<'a, W: Weight> Decision<'a, W> {
    fn new(goods: &'a [W], parts: usize, target: W) -> Self {
        let mut suffix = vec![W::zero(); goods.len() + 1];
        for i in (0..goods.len()).rev() {
            suffix[i] = suffix[i + 1].clone() + &goods[i];
        }
        Decision {
            goods,
            suffix,
            target,
            sums: vec![W::zero(); parts],
            assign: vec![0; goods.len()],
            failed: HashSet::new(),
        }
    }

    fn solve(mut self) -> Option<Vec<usize>> {
        if self.dfs(0) {
            Some(self.assign)
        } else {
            None
        }
    }

    fn open_key(&self) -> Vec<W> {
        let mut open: Vec<W> = self.sums.iter().filter(|s| **s < self.target).cloned().collect();
        open.sort();
        open
    }

    fn dfs(&mut self, idx: usize) -> bool {
        let open: Vec<usize> = (0..self.sums.len()).filter(|&c| self.sums[c] < self.target).collect();
        if open.is_empty() {
            for a in &mut self.assign[idx..] {
                *a = 0;
            }
            return true;
        }
        if self.goods.len() - idx < open.len() {
            return false;
        }
        let deficit = open
            .iter()
            .fold(W::zero(), |acc, &c| acc + &(self.target.clone() - &self.sums[c]));
        if deficit > self.suffix[idx] {
            return false;
        }
        let key = (idx, self.open_key());
        if self.failed.contains(&key) {
            return false;
        }

        let good = self.goods[idx].clone();
        if good.is_zero() {
            // A worthless good changes no sum; any placement is as good as another.
            self.assign[idx] = open[0];
            if self.dfs(idx + 1) {
                return true;
            }
        } else {
            let mut tried: Vec<&W> = Vec::with_capacity(open.len());
            let snapshot = self.sums.clone();
            for &c in &open {
                if tried.contains(&&snapshot[c]) {
                    continue;
                }
                tried.push(&snapshot[c]);
                self.sums[c] = snapshot[c].clone() + &good;
                self.assign[idx] = c;
                if self.dfs(idx + 1) {
                    return true;
                }
                self.sums[c] = snapshot[c].clone();
            }
        }

        if self.failed.len() < MEMO_LIMIT {
            self.failed.insert(key);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(values: &[u128], parts: usize) -> u128 {
        let m = values.len();
        let mut best = 0;
        let mut assign = vec![0usize; m];
        loop {
            let mut sums = vec![0u128; parts];
            for (g, &c) in assign.iter().enumerate() {
                sums[c] += values[g];
            }
            best = best.max(*sums.iter().min().unwrap());
            let mut i = 0;
            while i < m {
                assign[i] += 1;
                if assign[i] < parts {
                    break;
                }
                assign[i] = 0;
                i += 1;
            }
            if i == m {
                return best;
            }
        }
    }

    #[test]
    fn small_cases_match_brute_force() {
        let cases: &[(&[u128], usize)] = &[
            (&[7, 5, 4, 3, 2], 2),
            (&[7, 5, 4, 3, 2], 3),
            (&[1, 1, 1], 2),
            (&[1, 1, 1], 4),
            (&[], 2),
            (&[0, 0, 5], 2),
            (&[9, 8, 7, 6, 5, 4, 3], 3),
            (&[10, 1, 1, 1], 2),
        ];
        for &(values, parts) in cases {
            let (best, assign) = max_min_partition(values, parts);
            assert_eq!(best, brute(values, parts), "{values:?} into {parts}");
            assert_eq!(min_cell(values, &assign, parts), best);
        }
    }

    #[test]
    fn bigint_path_agrees() {
        use num_bigint::BigInt;
        let values: Vec<BigInt> = [13u32, 11, 9, 8, 5, 2].iter().map(|&x| BigInt::from(x)).collect();
        let (best, _) = max_min_partition(&values, 3);
        assert_eq!(best, BigInt::from(brute(&[13, 11, 9, 8, 5, 2], 3)));
    }
}

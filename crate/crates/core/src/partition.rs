//! Set partitions as restricted growth strings, and falling factorials.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;

/// Iterates over the partitions of `{0, .., n-1}` into at most `max_blocks`
/// blocks.
///
/// Each partition is yielded as a restricted growth string `a` where
/// `a[0] = 0` and `a[i] <= 1 + max(a[..i])`; elements with equal labels share
/// a block. Partitions come out in lexicographic order of that string.
#[derive(Debug, Clone)]
pub struct SetPartitions {
    labels: Vec<usize>,
    max_blocks: usize,
    started: bool,
    done: bool,
}

impl SetPartitions {
    pub fn new(n: usize) -> Self {
        Self::with_max_blocks(n, n.max(1))
    }

    pub fn with_max_blocks(n: usize, max_blocks: usize) -> Self {
        SetPartitions { labels: vec![0; n], max_blocks, started: false, done: max_blocks == 0 && n > 0 }
    }

    fn advance(&mut self) -> bool {
        let n = self.labels.len();
        // prefix_max[i] = max(labels[..i])
        let mut prefix_max = vec![0usize; n];
        for i in 1..n {
            prefix_max[i] = prefix_max[i - 1].max(self.labels[i - 1]);
        }
        for i in (1..n).rev() {
            let limit = (prefix_max[i] + 1).min(self.max_blocks - 1);
            if self.labels[i] < limit {
                self.labels[i] += 1;
                for l in &mut self.labels[i + 1..] {
                    *l = 0;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for SetPartitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        Some(self.labels.clone())
    }
}

/// Groups a restricted growth string into its blocks.
pub fn blocks_of(labels: &[usize]) -> Vec<Vec<usize>> {
    let count = labels.iter().map(|&l| l + 1).max().unwrap_or(0);
    let mut out = vec![Vec::new(); count];
    for (i, &l) in labels.iter().enumerate() {
        out[l].push(i);
    }
    out
}

/// `n (n-1) ... (n-k+1)`; zero when `k > n`.
pub fn falling_factorial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
    }
    acc
}

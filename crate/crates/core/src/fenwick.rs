//! Binary indexed tree over `i64` counts.

#[derive(Debug, Clone)]
pub struct Fenwick {
    tree: Vec<i64>,
}

impl Fenwick {
    pub fn new(len: usize) -> Self {
        Fenwick { tree: vec![0; len + 1] }
    }

    fn len(&self) -> usize {
        self.tree.len() - 1
    }

    pub fn add(&mut self, idx: usize, delta: i64) {
        let mut i = idx + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over `[0, end)`.
    pub fn prefix(&self, end: usize) -> i64 {
        let mut i = end.min(self.len());
        let mut acc = 0;
        while i > 0 {
            acc += self.tree[i];
            i &= i - 1;
        }
        acc
    }

    /// Sum over `[lo, hi)`.
    #[cfg(test)]
    pub fn range(&self, lo: usize, hi: usize) -> i64 {
        if hi <= lo {
            0
        } else {
            self.prefix(hi) - self.prefix(lo)
        }
    }

    /// Smallest index `i` with `prefix(i + 1) >= k`, for `k >= 1` and
    /// nonnegative entries. Returns `None` if the total is below `k`.
    pub fn find_kth(&self, mut k: i64) -> Option<usize> {
        let n = self.len();
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] < k {
                pos = next;
                k -= self.tree[next];
            }
            step >>= 1;
        }
        if pos < n {
            Some(pos)
        } else {
            None
        }
    }
}

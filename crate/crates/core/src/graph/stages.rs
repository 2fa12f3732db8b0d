use std::ops::RangeInclusive;

use crate::error::{Error, Result};

// s > (3/2)^i  <=>  2^i * s > 3^i, kept in integers to avoid rounding at the edges.
fn above(i: u32, s: usize) -> bool {
    (1u128 << i) * s as u128 > 3u128.pow(i)
}

/// Stage index of arrival label `s >= 1`: 0 for the first two nodes, otherwise
/// the `i` with `(3/2)^i < s <= (3/2)^(i+1)`.
pub fn stage_of(s: usize) -> usize {
    assert!(s >= 1, "arrival labels start at 1");
    if s <= 2 {
        return 0;
    }
    let mut i = 1u32;
    while above(i + 1, s) {
        i += 1;
    }
    i as usize
}

/// The geometric partition `S_0, ..., S_r` of `1..=n`, `r = ceil(log_{3/2} n)`.
/// Some stages are empty (`S_1` always is).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StagePartition {
    n: usize,
    stages: Vec<RangeInclusive<usize>>,
}

impl StagePartition {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut r = 0u32;
        // smallest r with (3/2)^r >= n
        while (1u128 << r) * (n as u128) > 3u128.pow(r) {
            r += 1;
        }
        let mut stages = vec![1..=n.min(2)];
        for i in 1..=r {
            let lo = (3u128.pow(i) / (1u128 << i)) as usize + 1;
            let hi = (3u128.pow(i + 1) / (1u128 << (i + 1))) as usize;
            stages.push(lo.max(3)..=hi.min(n));
        }
        StagePartition { n, stages }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stages `r + 1`.
    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn members(&self, stage: usize) -> RangeInclusive<usize> {
        self.stages[stage].clone()
    }

    pub fn stage_of(&self, s: usize) -> Result<usize> {
        if s == 0 || s > self.n {
            return Err(Error::NodeOutOfRange { node: s, n: self.n });
        }
        Ok(stage_of(s))
    }
}

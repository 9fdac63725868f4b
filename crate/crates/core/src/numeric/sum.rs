//! Deterministic reductions.
//!
//! Every sum over sites or trials goes through a fixed binary tree so that the
//! result does not depend on how work was split across threads.

const LEAF: usize = 8;

/// Pairwise (tree) reduction of `items` with a fixed split order.
pub fn pairwise_reduce<T, F>(items: &[T], zero: T, add: F) -> T
where
    T: Copy,
    F: Fn(T, T) -> T + Copy,
{
    if items.len() <= LEAF {
        return items.iter().fold(zero, |acc, &x| add(acc, x));
    }
    let mid = items.len() / 2;
    add(
        pairwise_reduce(&items[..mid], zero, add),
        pairwise_reduce(&items[mid..], zero, add),
    )
}

pub fn pairwise_sum(items: &[f64]) -> f64 {
    pairwise_reduce(items, 0.0, |a, b| a + b)
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

//! Weighted index sampling.
//!
//! [`sample_linear`] is a one-shot scan used when the weights change
//! completely between draws (rewiring). [`SumTree`] supports O(log n) weight
//! updates and draws, which is what network growth needs. Both consume one
//! `f64` from the generator when the total weight is positive and one
//! `usize` range draw for the uniform fallback.

use rand::Rng;

/// Draw `i` with probability `weights[i] / Σ weights`.
///
/// Falls back to a uniform draw over all indices when the total weight is
/// zero (or not finite). Panics on an empty slice.
pub fn sample_linear<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    assert!(!weights.is_empty(), "cannot sample from an empty weight list");
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return rng.random_range(0..weights.len());
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = i;
            if target < acc {
                return i;
            }
        }
    }
    // rounding left `target` at or past the accumulated sum
    last_positive
}

/// Complete binary tree of partial sums over a fixed number of leaves.
///
/// Internal nodes are recomputed from their children on every update, so a
/// leaf set to zero contributes exactly zero and is never drawn.
#[derive(Clone, Debug)]
pub struct SumTree {
    leaves: usize,
    nodes: Vec<f64>,
}

impl SumTree {
    pub fn new(len: usize) -> Self {
        let leaves = len.max(1).next_power_of_two();
        SumTree {
            leaves,
            nodes: vec![0.0; 2 * leaves],
        }
    }

    pub fn total(&self) -> f64 {
        self.nodes[1]
    }

    pub fn get(&self, i: usize) -> f64 {
        self.nodes[self.leaves + i]
    }

    pub fn set(&mut self, i: usize, weight: f64) {
        debug_assert!(weight >= 0.0);
        let mut node = self.leaves + i;
        self.nodes[node] = weight;
        while node > 1 {
            node /= 2;
            self.nodes[node] = self.nodes[2 * node] + self.nodes[2 * node + 1];
        }
    }

    /// Weighted draw; `None` when the total weight is zero.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        let total = self.total();
        if total.is_nan() || total <= 0.0 {
            return None;
        }
        let mut target = rng.random::<f64>() * total;
        let mut node = 1;
        while node < self.leaves {
            let left = self.nodes[2 * node];
            let right = self.nodes[2 * node + 1];
            if right <= 0.0 || (target < left && left > 0.0) {
                node *= 2;
            } else {
                target -= left;
                node = 2 * node + 1;
            }
        }
        Some(node - self.leaves)
    }
}

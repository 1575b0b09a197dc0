//! Dyadic boxes and the subdivision driver behind the covering oracle.

use num_bigint::BigInt;

use crate::rational::{pow2, Rational};

/// Product of dyadic intervals `[lo_i 2^-level_i, (lo_i + 1) 2^-level_i]`.
/// Coordinates past `lo.len()` are unconstrained by the box; spaces give
/// them meaning (Euclidean boxes always carry every axis, Hilbert-cube boxes
/// leave the tail at `[0, 1]`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicBox {
    pub lo: Vec<i64>,
    pub level: Vec<i32>,
}

impl DyadicBox {
    pub fn uniform(lo: Vec<i64>, level: i32) -> Self {
        let level = vec![level; lo.len()];
        DyadicBox { lo, level }
    }

    pub fn axes(&self) -> usize {
        self.lo.len()
    }

    pub fn interval(&self, i: usize) -> (Rational, Rational) {
        let scale = pow2(-(self.level[i] as i64));
        let lo = Rational::from_integer(BigInt::from(self.lo[i])) * &scale;
        let hi = &lo + &scale;
        (lo, hi)
    }

    pub fn interval_f64(&self, i: usize) -> (f64, f64) {
        let scale = 2f64.powi(-self.level[i]);
        let lo = self.lo[i] as f64 * scale;
        (lo, lo + scale)
    }

    pub fn side_f64(&self, i: usize) -> f64 {
        2f64.powi(-self.level[i])
    }

    /// Halve axis `i`.
    pub fn halves(&self, i: usize) -> [DyadicBox; 2] {
        let mut a = self.clone();
        a.level[i] += 1;
        a.lo[i] *= 2;
        let mut b = a.clone();
        b.lo[i] += 1;
        [a, b]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoxClass {
    Discard,
    Accept,
    Split,
}

#[derive(Clone, Debug)]
pub enum SubdivOutcome {
    /// Every box was discarded or accepted.
    Resolved { boxes: usize, depth: u32 },
    /// A box still needed splitting at the depth limit.
    Exhausted { boxes: usize },
}

/// Depth-first subdivision. Stops at the first box that would need to be
/// split beyond `max_depth`, so negative answers come back quickly.
pub fn subdivide(
    roots: Vec<DyadicBox>,
    max_depth: u32,
    mut split: impl FnMut(&DyadicBox) -> Vec<DyadicBox>,
    mut classify: impl FnMut(&DyadicBox) -> BoxClass,
) -> SubdivOutcome {
    let mut stack: Vec<(DyadicBox, u32)> = roots.into_iter().rev().map(|b| (b, 0)).collect();
    let mut boxes = 0usize;
    let mut deepest = 0u32;
    while let Some((b, depth)) = stack.pop() {
        boxes += 1;
        deepest = deepest.max(depth);
        match classify(&b) {
            BoxClass::Discard | BoxClass::Accept => {}
            BoxClass::Split => {
                if depth >= max_depth {
                    return SubdivOutcome::Exhausted { boxes };
                }
                for c in split(&b).into_iter().rev() {
                    stack.push((c, depth + 1));
                }
            }
        }
    }
    SubdivOutcome::Resolved { boxes, depth: deepest }
}

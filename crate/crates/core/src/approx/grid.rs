//! The cubical chains `D^m` on `Iⁿ` and `G^m` on `∂Iⁿ`.
//!
//! `D^m(a) = Π [a_i / (m + 1), (a_i + 1) / (m + 1)]`. For a boundary index
//! `a`, `G^m(a) = D^m(a) ∩ ∂Iⁿ` is the union of the facets of `D^m(a)` that
//! lie on `∂Iⁿ`: one for every `i` with `a_i = 0` (on `x_i = 0`) or
//! `a_i = m` (on `x_i = 1`).

use crate::error::{Error, Result};
use crate::rational::Rational;

/// `D^m(a)` as exact intervals.
pub fn cell_box(m: usize, a: &[usize]) -> Vec<(Rational, Rational)> {
    let d = (m + 1) as i64;
    a.iter()
        .map(|&i| (Rational::new((i as i64).into(), d.into()), Rational::new((i as i64 + 1).into(), d.into())))
        .collect()
}

/// `D^m(a)` in floating point.
pub fn cell_box_f64(m: usize, a: &[usize]) -> Vec<(f64, f64)> {
    let d = (m + 1) as f64;
    a.iter().map(|&i| (i as f64 / d, (i + 1) as f64 / d)).collect()
}

/// One facet of `G^m(a)`: the cell box with coordinate `axis` pinned to
/// `0.0` or `1.0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub axis: usize,
    pub side: u8,
    pub bounds: Vec<(f64, f64)>,
}

/// Facets making up `G^m(a)`; empty for interior indices.
pub fn boundary_facets(m: usize, a: &[usize]) -> Result<Vec<Facet>> {
    if m == 0 {
        return Err(Error::Candidate("grid side m = 0 has no interior/boundary split".into()));
    }
    let full = cell_box_f64(m, a);
    let mut out = Vec::new();
    for (axis, &ai) in a.iter().enumerate() {
        for (side, hit, pin) in [(0u8, ai == 0, 0.0), (1u8, ai == m, 1.0)] {
            if hit {
                let mut bounds = full.clone();
                bounds[axis] = (pin, pin);
                out.push(Facet { axis, side, bounds });
            }
        }
    }
    Ok(out)
}

/// Euclidean mesh of `D^m`: the cube diagonal `sqrt(n) / (m + 1)`.
pub fn grid_mesh(n: usize, m: usize) -> f64 {
    (n as f64).sqrt() / (m + 1) as f64
}

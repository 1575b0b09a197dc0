//! Floating-point realizations of the homeomorphisms `f`, used only to seed
//! candidate chains.
//!
//! Sphere samplers take points of `∂Iⁿ`, cell samplers points of `Iⁿ`. The
//! round shapes use the equiangular cube map: on the cube face where
//! `|v_j| = 1` the remaining coordinates are warped by `tan(π v_i / 4)`, then
//! the result is normalized, so each edge of `∂I²` lands on a quarter of the
//! circle.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::effsets::SetSpec;
use crate::error::{Error, Result};
use crate::rational::{serde_rational, serde_rational_vec, to_f64, Rational};

pub trait Sampler: Send + Sync {
    /// `n`, the dimension of the parameter cube.
    fn domain_dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn eval(&self, u: &[f64]) -> Vec<f64>;
}

/// Unit direction of `v ∈ [-1, 1]ⁿ` through the equiangular cube map.
/// Returns the sup norm of `v` alongside.
fn cube_direction(v: &[f64]) -> (Vec<f64>, f64) {
    let (j, s) =
        v.iter().enumerate().fold((0, 0.0f64), |(bj, bs), (i, &x)| if x.abs() > bs { (i, x.abs()) } else { (bj, bs) });
    if s == 0.0 {
        let mut e = vec![0.0; v.len()];
        e[0] = 1.0;
        return (e, 0.0);
    }
    let mut w: Vec<f64> =
        v.iter().enumerate().map(|(i, &x)| if i == j { x.signum() } else { (FRAC_PI_4 * x / s).tan() }).collect();
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    w.iter_mut().for_each(|x| *x /= norm);
    (w, s)
}

fn centered(u: &[f64]) -> Vec<f64> {
    u.iter().map(|&x| 2.0 * x - 1.0).collect()
}

/// JSON description of a sampler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplerSpec {
    /// `∂Iⁿ → {|x - c| = R}`.
    Sphere {
        #[serde(with = "serde_rational_vec")]
        center: Vec<Rational>,
        #[serde(with = "serde_rational")]
        radius: Rational,
    },
    /// `Iⁿ → {|x - c| <= R}`, radial in the sup norm.
    Disk {
        #[serde(with = "serde_rational_vec")]
        center: Vec<Rational>,
        #[serde(with = "serde_rational")]
        radius: Rational,
    },
    /// `∂I² → ` the ellipse, the circle map stretched by `(a, b)`.
    Ellipse {
        #[serde(with = "serde_rational_vec")]
        center: Vec<Rational>,
        #[serde(with = "serde_rational")]
        a: Rational,
        #[serde(with = "serde_rational")]
        b: Rational,
    },
    /// `Iⁿ → lo + side · u`.
    Square {
        #[serde(with = "serde_rational_vec")]
        lo: Vec<Rational>,
        #[serde(with = "serde_rational")]
        side: Rational,
    },
    /// A base sampler with a perturbation of the given size added, for
    /// soundness tests.
    Corrupted { base: Box<SamplerSpec>, amplitude: f64, seed: u64, mode: Corruption },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corruption {
    /// A smooth wobble.
    Smooth,
    /// Independent pseudo-random offsets per input point.
    Noise,
}

impl SamplerSpec {
    /// The sampler realizing the builtin homeomorphism for a shape.
    pub fn for_set(set: &SetSpec) -> Result<SamplerSpec> {
        Ok(match set {
            SetSpec::Circle { center, radius } | SetSpec::Sphere2 { center, radius } => {
                SamplerSpec::Sphere { center: center.clone(), radius: radius.clone() }
            }
            SetSpec::Disk { center, radius } => SamplerSpec::Disk { center: center.clone(), radius: radius.clone() },
            SetSpec::Ellipse { center, a, b } => {
                SamplerSpec::Ellipse { center: center.clone(), a: a.clone(), b: b.clone() }
            }
            SetSpec::SquareCell { lo, side } => SamplerSpec::Square { lo: lo.clone(), side: side.clone() },
            other => return Err(Error::UnknownShape(format!("no builtin sampler for {}", other.shape_name()))),
        })
    }

    pub fn build(&self) -> Result<Box<dyn Sampler>> {
        let f = |v: &[Rational]| v.iter().map(to_f64).collect::<Vec<f64>>();
        Ok(match self {
            SamplerSpec::Sphere { center, radius } => {
                if center.len() < 2 {
                    return Err(Error::Dimension { min: 2, got: center.len() });
                }
                Box::new(RoundSampler { center: f(center), scale: vec![to_f64(radius); center.len()], solid: false })
            }
            SamplerSpec::Disk { center, radius } => {
                if center.is_empty() {
                    return Err(Error::Dimension { min: 1, got: 0 });
                }
                Box::new(RoundSampler { center: f(center), scale: vec![to_f64(radius); center.len()], solid: true })
            }
            SamplerSpec::Ellipse { center, a, b } => {
                if center.len() != 2 {
                    return Err(Error::PointArity { expected: 2, got: center.len() });
                }
                Box::new(RoundSampler { center: f(center), scale: vec![to_f64(a), to_f64(b)], solid: false })
            }
            SamplerSpec::Square { lo, side } => Box::new(SquareSampler { lo: f(lo), side: to_f64(side) }),
            SamplerSpec::Corrupted { base, amplitude, seed, mode } => {
                Box::new(Corrupted { base: base.build()?, amplitude: *amplitude, seed: *seed, mode: *mode })
            }
        })
    }
}

struct RoundSampler {
    center: Vec<f64>,
    scale: Vec<f64>,
    solid: bool,
}

impl Sampler for RoundSampler {
    fn domain_dim(&self) -> usize {
        self.center.len()
    }

    fn ambient_dim(&self) -> usize {
        self.center.len()
    }

    fn eval(&self, u: &[f64]) -> Vec<f64> {
        let (dir, s) = cube_direction(&centered(u));
        let t = if self.solid { s } else { 1.0 };
        dir.iter().zip(&self.center).zip(&self.scale).map(|((d, c), a)| c + a * t * d).collect()
    }
}

struct SquareSampler {
    lo: Vec<f64>,
    side: f64,
}

impl Sampler for SquareSampler {
    fn domain_dim(&self) -> usize {
        self.lo.len()
    }

    fn ambient_dim(&self) -> usize {
        self.lo.len()
    }

    fn eval(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.lo).map(|(x, l)| l + self.side * x).collect()
    }
}

struct Corrupted {
    base: Box<dyn Sampler>,
    amplitude: f64,
    seed: u64,
    mode: Corruption,
}

fn mix(mut x: u64) -> u64 {
    x ^= x >> 33;
    x = x.wrapping_mul(0xff51_afd7_ed55_8ccd);
    x ^= x >> 33;
    x = x.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    x ^ (x >> 33)
}

impl Sampler for Corrupted {
    fn domain_dim(&self) -> usize {
        self.base.domain_dim()
    }

    fn ambient_dim(&self) -> usize {
        self.base.ambient_dim()
    }

    fn eval(&self, u: &[f64]) -> Vec<f64> {
        let mut y = self.base.eval(u);
        let phase = (mix(self.seed) % 1024) as f64 / 1024.0 * std::f64::consts::TAU;
        let mut h = mix(self.seed ^ 0x9e37_79b9_7f4a_7c15);
        for x in u {
            h = mix(h ^ x.to_bits());
        }
        let d = y.len();
        for (i, yi) in y.iter_mut().enumerate() {
            let off = match self.mode {
                Corruption::Smooth => {
                    let arg: f64 = u.iter().enumerate().map(|(j, x)| (3 + i + 2 * j) as f64 * x).sum();
                    (std::f64::consts::TAU * arg + phase + i as f64).sin()
                }
                Corruption::Noise => {
                    let r = mix(h.wrapping_add(i as u64));
                    (r >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
                }
            };
            *yi += self.amplitude * off / (d as f64).sqrt();
        }
        y
    }
}

//! Rational points and balls.

use std::fmt;
use std::hash::{Hash, Hasher};

use num_traits::Signed;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{dyadic, format_rational, parse_rational, to_f64, Rational};

/// A point with rational coordinates and a cached `f64` shadow used by the
/// float filters. Hilbert-cube points store their finite nonzero prefix.
#[derive(Clone)]
pub struct Point {
    coords: Vec<Rational>,
    approx: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<Rational>) -> Self {
        let approx = coords.iter().map(to_f64).collect();
        Point { coords, approx }
    }

    /// Coordinates rounded to the nearest multiple of `2^-bits`.
    pub fn from_f64(x: &[f64], bits: u32) -> Self {
        Point::new(x.iter().map(|&v| dyadic(v, bits)).collect())
    }

    pub fn origin(n: usize) -> Self {
        Point::new(vec![Rational::default(); n])
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn approx(&self) -> &[f64] {
        &self.approx
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Coordinate `i`, zero past the stored prefix.
    pub fn coord(&self, i: usize) -> Rational {
        self.coords.get(i).cloned().unwrap_or_default()
    }

    pub fn coord_f64(&self, i: usize) -> f64 {
        self.approx.get(i).copied().unwrap_or(0.0)
    }

    /// Drop trailing zero coordinates.
    pub fn trimmed(&self) -> Point {
        let mut coords = self.coords.clone();
        while coords.last().is_some_and(|c| c == &Rational::default()) {
            coords.pop();
        }
        Point::new(coords)
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}

impl Eq for Point {}

impl Hash for Point {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::rational::serde_rational_vec::serialize(&self.coords, s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        crate::rational::serde_rational_vec::deserialize(d).map(Point::new)
    }
}

/// Rational ball with positive radius. Whether it is read as open or closed
/// is up to the caller.
#[derive(Clone)]
pub struct Ball {
    center: Point,
    radius: Rational,
    radius_f: f64,
}

impl Ball {
    pub fn new(center: Point, radius: Rational) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::NonPositive(format_rational(&radius)));
        }
        let radius_f = to_f64(&radius);
        Ok(Ball { center, radius, radius_f })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> &Rational {
        &self.radius
    }

    pub fn radius_f64(&self) -> f64 {
        self.radius_f
    }
}

impl PartialEq for Ball {
    fn eq(&self, other: &Self) -> bool {
        self.radius == other.radius && self.center == other.center
    }
}

impl Eq for Ball {}

impl Hash for Ball {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.center.hash(state);
        self.radius.hash(state);
    }
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B({:?}, {})", self.center, format_rational(&self.radius))
    }
}

#[derive(Serialize, Deserialize)]
struct BallRepr {
    center: Point,
    radius: String,
}

impl Serialize for Ball {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BallRepr { center: self.center.clone(), radius: format_rational(&self.radius) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ball {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = BallRepr::deserialize(d)?;
        let radius = parse_rational(&repr.radius).map_err(serde::de::Error::custom)?;
        Ball::new(repr.center, radius).map_err(serde::de::Error::custom)
    }
}

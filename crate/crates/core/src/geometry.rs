//! Points in R^n (n <= 3), the parallel/orthogonal decomposition, the
//! Gaussian distance, the Gaussian density, and the two Lipschitz moduli.
//!
//! The distance is the one-dimensional metric
//! `d(a,b) = |∫_a^b dξ/(1+|ξ|)| = |Φ(a) − Φ(b)|` with
//! `Φ(ξ) = sgn(ξ)·ln(1+|ξ|)`, applied along the line spanned by `x` in
//! several dimensions. The sign convention is `sgn 0 = +1` throughout.

use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Maximum supported dimension. Quadrature cost grows geometrically with
/// the dimension and nothing downstream needs more than 3.
pub const MAX_DIM: usize = 3;

/// A point of R^n with n in {1, 2, 3}. Coordinates are finite.
///
/// Serializes as the bare coordinate array.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(deserializer)?;
        Point::new(coords).map_err(serde::de::Error::custom)
    }
}

impl Point {
    /// Builds a point, rejecting empty, oversized or non-finite input.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::InvalidParameter {
                name: "dimension",
                value: coords.len() as f64,
                constraint: "n must be 1, 2 or 3",
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                context: "Point coordinates",
            });
        }
        Ok(Self { coords })
    }

    /// One-dimensional point.
    pub fn scalar(x: f64) -> Result<Self> {
        Self::new(vec![x])
    }

    /// The origin of R^n.
    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn get(&self, i: usize) -> f64 {
        self.coords[i]
    }

    /// Euclidean norm |x|.
    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Squared Euclidean norm |x|^2.
    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    /// Inner product, assuming equal dimension.
    pub fn dot(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// |x - y|.
    pub fn dist(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    fn check_same_dim(&self, other: &Point) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }
}

/// Decomposition of `y` relative to `x`: `y = y_par + y_perp` with `y_par`
/// parallel and `y_perp` orthogonal to `x`, plus the sign of <x,y>.
///
/// Degenerate convention: if `x = 0` or `n = 1`, then `y_par = y` and
/// `y_perp = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelSplit {
    pub y_par: Point,
    pub y_perp: Point,
    /// sgn <x,y> with sgn 0 = +1.
    pub sign: f64,
}

/// Sign with the convention sgn 0 = +1, used throughout.
pub fn sgn(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Splits `y` into components parallel and orthogonal to `x`.
pub fn decompose(x: &Point, y: &Point) -> Result<ParallelSplit> {
    x.check_same_dim(y)?;
    let n = x.dim();
    let ip = x.dot(y);
    let sign = sgn(ip);
    let x_norm_sq = x.norm_sq();
    if n == 1 || x_norm_sq == 0.0 {
        return Ok(ParallelSplit {
            y_par: y.clone(),
            y_perp: Point::zero(n)?,
            sign,
        });
    }
    let scale = ip / x_norm_sq;
    let y_par: Vec<f64> = x.coords.iter().map(|c| scale * c).collect();
    let y_perp: Vec<f64> = y
        .coords
        .iter()
        .zip(&y_par)
        .map(|(yc, pc)| yc - pc)
        .collect();
    Ok(ParallelSplit {
        y_par: Point::new(y_par)?,
        y_perp: Point::new(y_perp)?,
        sign,
    })
}

/// Antiderivative Φ(ξ) = sgn(ξ)·ln(1+|ξ|) of 1/(1+|ξ|).
fn phi(v: f64) -> f64 {
    if v < 0.0 {
        -(1.0 - v).ln()
    } else {
        (1.0 + v).ln()
    }
}

/// One-dimensional Gaussian distance |∫_a^b dξ/(1+|ξ|)|, by closed form.
pub fn gauss_dist_1d(a: f64, b: f64) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite {
            context: "gauss_dist_1d arguments",
        });
    }
    Ok((phi(a) - phi(b)).abs())
}

/// Gaussian distance on the line spanned by `x`:
/// `d(x, y_x) = |ln(1+|x|) − sgn<x,y>·ln(1+|y_x|)|`.
pub fn gauss_dist_par(x: &Point, y: &Point) -> Result<f64> {
    let split = decompose(x, y)?;
    gauss_dist_1d(x.norm(), split.sign * split.y_par.norm())
}

/// Which modulus variant to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModulusKind {
    /// Unbounded (global) variant: min{|x−y|^α, d(x,y_x)^{α/2} + |y'_x|^α}.
    Gglip,
    /// Bounded variant: additionally capped at 1.
    Glip,
}

fn pow_alpha(base: f64, alpha: f64) -> f64 {
    // |x-y|^alpha via exp(alpha ln), with the zero base short-circuited.
    if base == 0.0 {
        0.0
    } else {
        (alpha * base.ln()).exp()
    }
}

/// The Lipschitz-type modulus of continuity at the pair (x, y).
pub fn modulus(kind: ModulusKind, alpha: f64, x: &Point, y: &Point) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            constraint: "alpha must lie in (0,1)",
        });
    }
    let split = decompose(x, y)?;
    let euclid_term = pow_alpha(x.dist(y), alpha);
    let d = gauss_dist_1d(x.norm(), split.sign * split.y_par.norm())?;
    let mixed_term = pow_alpha(d, alpha / 2.0) + pow_alpha(split.y_perp.norm(), alpha);
    let gglip = euclid_term.min(mixed_term);
    Ok(match kind {
        ModulusKind::Gglip => gglip,
        ModulusKind::Glip => gglip.min(1.0),
    })
}

/// Density of the Gaussian measure: π^{−n/2} e^{−|x|²}.
pub fn gaussian_density(x: &Point) -> f64 {
    let n = x.dim() as f64;
    (-x.norm_sq() - n / 2.0 * std::f64::consts::PI.ln()).exp()
}

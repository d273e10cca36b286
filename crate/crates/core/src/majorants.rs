//! Closed-form evaluation of the majorant kernels K1, K2, K̃3, K4 and
//! empirical certification of the kernel inequalities they majorize.
//!
//! `exp*` denotes exp(−cX) for a configurable decay constant c; the
//! theory only guarantees some c > 0, so a small default keeps the
//! right-hand sides weakest and the certified ratios most meaningful.

use crate::error::{Error, Result};
use crate::geometry::{decompose, Point};
use crate::kernels::{poisson_kernel, poisson_kernel_dt, poisson_kernel_dx, KernelPoint};
use crate::quad::QuadratureSpec;
use crate::sampler::{grid_point, halton_point, to_linear, to_log};
use crate::transform::{poisson_integral_dt, FieldKind, ScalarField};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

const E: f64 = std::f64::consts::E;

/// Concrete decay constant c behind the exp*(−X) = exp(−cX) shorthand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpStarConfig {
    c: f64,
}

impl Default for ExpStarConfig {
    fn default() -> Self {
        Self { c: 0.05 }
    }
}

impl ExpStarConfig {
    pub fn new(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter {
                name: "c",
                value: c,
                constraint: "exp* constant must be finite and positive",
            });
        }
        Ok(Self { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

/// Which certified inequality a certificate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundId {
    /// P_t + |t ∂_t P_t| + |t ∂_{x_i} P_t| <= C (K1 + K2 + K̃3 + K4)
    #[serde(rename = "PROP21")]
    Prop21,
    /// |∂_t P_t| <= C P_{t/2} / t
    #[serde(rename = "LEMMA31")]
    Lemma31,
    /// |∂_{x_i} P_t| <= C (1 + t^{−4−n}) P_{t/2} for |x| < R
    #[serde(rename = "LEMMA32A")]
    Lemma32A,
    /// |∂_{x_i} P_t| <= C t^{−1/2} e^{−|y|²} (ln(e+|y|))^{−3/4}, |x| < R, t > 1
    #[serde(rename = "LEMMA32B")]
    Lemma32B,
    /// P_t <= C e^{−|y|²} / √(ln(e+|y|)) for |x| <= R, t in [1/2, 2]
    #[serde(rename = "LOCAL_UNIFORM")]
    LocalUniform,
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BoundId::Prop21 => "PROP21",
            BoundId::Lemma31 => "LEMMA31",
            BoundId::Lemma32A => "LEMMA32A",
            BoundId::Lemma32B => "LEMMA32B",
            BoundId::LocalUniform => "LOCAL_UNIFORM",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PROP21" => Ok(BoundId::Prop21),
            "LEMMA31" => Ok(BoundId::Lemma31),
            "LEMMA32A" => Ok(BoundId::Lemma32A),
            "LEMMA32B" => Ok(BoundId::Lemma32B),
            "LOCAL_UNIFORM" => Ok(BoundId::LocalUniform),
            _ => Err(Error::InvalidParameter {
                name: "bound_id",
                value: f64::NAN,
                constraint: "one of PROP21, LEMMA31, LEMMA32A, LEMMA32B, LOCAL_UNIFORM",
            }),
        }
    }
}

/// exp*(−num/den) with the den = 0 limit: 0 for positive numerators,
/// 1 when the numerator also vanishes.
fn exp_star_quotient(c: f64, num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num > 0.0 {
            0.0
        } else {
            1.0
        }
    } else {
        (-c * num / den).exp()
    }
}

/// The four majorant kernels at one (t, x, y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MajorantTerms {
    pub k1: f64,
    pub k2: f64,
    pub k3_tilde: f64,
    pub k4: f64,
}

impl MajorantTerms {
    pub fn sum(&self) -> f64 {
        self.k1 + self.k2 + self.k3_tilde + self.k4
    }
}

/// Evaluates K1, K2, K̃3, K4 in closed form. Indicator supports are
/// honored exactly; out-of-support terms are 0.
pub fn majorant_terms(t: f64, x: &Point, y: &Point, cfg: &ExpStarConfig) -> Result<MajorantTerms> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            constraint: "t must be finite and positive",
        });
    }
    let split = decompose(x, y)?;
    let c = cfg.c;
    let n = x.dim() as f64;
    let x_norm = x.norm();
    let y_par_norm = split.y_par.norm();
    let y_perp_sq = split.y_perp.norm_sq();
    let inner_positive = x.dot(y) > 0.0;

    let dist_sq = x.dist(y).powi(2);
    let k1 = t * (t * t + dist_sq).powf(-(n + 1.0) / 2.0) * (-c * t * (1.0 + x_norm)).exp();

    let k2 = if x_norm > 1.0
        && inner_positive
        && x_norm / 2.0 <= y_par_norm
        && y_par_norm < x_norm
    {
        let par_gap = x.dist(&split.y_par);
        t / x_norm
            * (t * t + par_gap / x_norm + y_perp_sq).powf(-(n + 2.0) / 2.0)
            * exp_star_quotient(c, (t * t + y_perp_sq) * x_norm, par_gap)
    } else {
        0.0
    };

    let k3_tilde = (t / (E + x_norm).ln().sqrt()).min(1.0) * (-c * y.norm_sq()).exp();

    let k4 = if inner_positive && 1.0 < y_par_norm && y_par_norm < x_norm / 2.0 {
        // On this support ln(|x|/|y_x|) > ln 2, so no regularization is needed.
        let log_quot = (x_norm / y_par_norm).ln();
        t / y_par_norm
            * log_quot.powf(-1.5)
            * (-c * t * t / log_quot).exp()
            * (-c * y_perp_sq).exp()
    } else {
        0.0
    };

    Ok(MajorantTerms { k1, k2, k3_tilde, k4 })
}

/// How certification samples are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplerMode {
    /// Halton sequence starting at the given index offset.
    Halton { skip: u64 },
    /// Row-major midpoint lattice, sized to cover the requested samples.
    Grid,
}

/// Deterministic sample-domain specification: log-uniform in t, linear in
/// the x and y boxes. `restrict_radius` is the R of the |x| < R bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub mode: SamplerMode,
    pub dim: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub x_radius: f64,
    pub y_radius: f64,
    pub restrict_radius: f64,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        Self {
            mode: SamplerMode::Halton { skip: 0 },
            dim: 1,
            t_min: 1e-2,
            t_max: 1e2,
            x_radius: 6.0,
            y_radius: 6.0,
            restrict_radius: 2.0,
        }
    }
}

impl SamplerSpec {
    fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim > crate::geometry::MAX_DIM {
            return Err(Error::InvalidParameter {
                name: "dim",
                value: self.dim as f64,
                constraint: "n must be 1, 2 or 3",
            });
        }
        if !(self.t_min > 0.0 && self.t_min < self.t_max) {
            return Err(Error::DegenerateSampler {
                reason: "need 0 < t_min < t_max",
            });
        }
        if !(self.x_radius > 0.0 && self.y_radius > 0.0 && self.restrict_radius > 0.0) {
            return Err(Error::DegenerateSampler {
                reason: "sample radii must be positive",
            });
        }
        Ok(())
    }

    /// The effective (t-range, x half-width, y half-width) for a bound.
    /// Boxes are inscribed in the requested balls, so norm constraints
    /// hold for every sample in any dimension.
    fn domain_for(&self, bound: BoundId) -> Result<(f64, f64, f64, f64)> {
        let sqrt_n = (self.dim as f64).sqrt();
        let mut t_lo = self.t_min;
        let mut t_hi = self.t_max;
        let mut x_half = self.x_radius / sqrt_n;
        let y_half = self.y_radius / sqrt_n;
        match bound {
            BoundId::Prop21 | BoundId::Lemma31 => {}
            BoundId::Lemma32A => {
                x_half = x_half.min(self.restrict_radius * (1.0 - 1e-12) / sqrt_n);
            }
            BoundId::Lemma32B => {
                x_half = x_half.min(self.restrict_radius * (1.0 - 1e-12) / sqrt_n);
                t_lo = t_lo.max(1.0 + 1e-9);
            }
            BoundId::LocalUniform => {
                x_half = x_half.min(self.restrict_radius / sqrt_n);
                t_lo = t_lo.max(0.5);
                t_hi = t_hi.min(2.0);
            }
        }
        if !(t_lo < t_hi) {
            return Err(Error::DegenerateSampler {
                reason: "empty t-range after bound restrictions",
            });
        }
        Ok((t_lo, t_hi, x_half, y_half))
    }

    fn sample(&self, index: u64, total: u64, bound: BoundId) -> Result<(f64, Point, Point)> {
        let dims = 1 + 2 * self.dim;
        let unit = match self.mode {
            SamplerMode::Halton { skip } => halton_point(skip + index, dims),
            SamplerMode::Grid => {
                let per_axis = (total as f64).powf(1.0 / dims as f64).ceil().max(2.0) as u64;
                grid_point(index, per_axis, dims)
            }
        };
        let (t_lo, t_hi, x_half, y_half) = self.domain_for(bound)?;
        let t = to_log(unit[0], t_lo, t_hi);
        let x: Vec<f64> = (0..self.dim)
            .map(|i| to_linear(unit[1 + i], -x_half, x_half))
            .collect();
        let y: Vec<f64> = (0..self.dim)
            .map(|i| to_linear(unit[1 + self.dim + i], -y_half, y_half))
            .collect();
        Ok((t, Point::new(x)?, Point::new(y)?))
    }
}

/// Argmax location of a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Argmax {
    pub t: f64,
    pub x: Point,
    pub y: Point,
}

/// Empirical record of max LHS/RHS over a deterministic sample.
///
/// Serializes to the canonical JSON object
/// `{bound_id, c, n_samples, max_ratio, argmax:{t,x,y}, skipped, stable}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub bound_id: BoundId,
    #[serde(rename = "c")]
    pub c_used: f64,
    pub n_samples: usize,
    pub max_ratio: f64,
    pub argmax: Argmax,
    pub skipped: usize,
    pub stable: bool,
}

impl Certificate {
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serialization cannot fail")
    }
}

/// A sample's index, its LHS/RHS ratio (None when skipped), and location.
type SampleOutcome = (usize, Option<f64>, (f64, Point, Point));

/// LHS/RHS for one bound at one sample point. `Ok(None)` marks a sample
/// skipped because its kernel quadrature failed.
fn lhs_rhs(
    bound: BoundId,
    t: f64,
    x: &Point,
    y: &Point,
    cfg: &ExpStarConfig,
    q: &QuadratureSpec,
) -> Result<Option<(f64, f64)>> {
    let n = x.dim();
    let kp = KernelPoint::new(t, x.clone(), y.clone())?;
    let half = KernelPoint::new(t / 2.0, x.clone(), y.clone())?;

    let max_dx = |kp: &KernelPoint| -> Result<f64> {
        let mut m: f64 = 0.0;
        for i in 0..n {
            m = m.max(poisson_kernel_dx(i, kp, q)?.abs());
        }
        Ok(m)
    };

    let pair = match bound {
        BoundId::Prop21 => {
            let p = poisson_kernel(&kp, q);
            let dt = poisson_kernel_dt(&kp, q);
            let dx = max_dx(&kp);
            match (p, dt, dx) {
                (Ok(p), Ok(dt), Ok(dx)) => {
                    let terms = majorant_terms(t, x, y, cfg)?;
                    assert!(
                        terms.k2 * terms.k4 == 0.0,
                        "K2 and K4 supports must be disjoint"
                    );
                    Some((p + t * dt.abs() + t * dx, terms.sum()))
                }
                _ => None,
            }
        }
        BoundId::Lemma31 => {
            match (poisson_kernel_dt(&kp, q), poisson_kernel(&half, q)) {
                (Ok(dt), Ok(ph)) => Some((dt.abs(), ph / t)),
                _ => None,
            }
        }
        BoundId::Lemma32A => match (max_dx(&kp), poisson_kernel(&half, q)) {
            (Ok(dx), Ok(ph)) => {
                let rhs = (1.0 + t.powf(-4.0 - n as f64)) * ph;
                Some((dx, rhs))
            }
            _ => None,
        },
        BoundId::Lemma32B => match max_dx(&kp) {
            Ok(dx) => {
                let rhs =
                    t.powf(-0.5) * (-y.norm_sq()).exp() * (E + y.norm()).ln().powf(-0.75);
                Some((dx, rhs))
            }
            Err(_) => None,
        },
        BoundId::LocalUniform => match poisson_kernel(&kp, q) {
            Ok(p) => {
                let rhs = (-y.norm_sq()).exp() / (E + y.norm()).ln().sqrt();
                Some((p, rhs))
            }
            Err(_) => None,
        },
    };

    match pair {
        None => Ok(None),
        Some((lhs, rhs)) => {
            if rhs == 0.0 && lhs > 0.0 {
                return Err(Error::MajorantViolation {
                    bound: match bound {
                        BoundId::Prop21 => "PROP21",
                        BoundId::Lemma31 => "LEMMA31",
                        BoundId::Lemma32A => "LEMMA32A",
                        BoundId::Lemma32B => "LEMMA32B",
                        BoundId::LocalUniform => "LOCAL_UNIFORM",
                    },
                    lhs,
                    t,
                    x: x.coords().to_vec(),
                    y: y.coords().to_vec(),
                });
            }
            let ratio = if rhs == 0.0 { 0.0 } else { lhs / rhs };
            Ok(Some((ratio, rhs)))
        }
    }
}

fn lex_less(a: &(f64, Point, Point), b: &(f64, Point, Point)) -> bool {
    if a.0 != b.0 {
        return a.0 < b.0;
    }
    for (ca, cb) in a.1.coords().iter().zip(b.1.coords()) {
        if ca != cb {
            return ca < cb;
        }
    }
    for (ca, cb) in a.2.coords().iter().zip(b.2.coords()) {
        if ca != cb {
            return ca < cb;
        }
    }
    false
}

/// Certifies one bound over `2 * n_samples` deterministic samples: the
/// recorded `max_ratio` covers all of them, and `stable` reports whether
/// doubling from the first `n_samples` moved the maximum by more than 10%.
///
/// Alongside PROP21 the zero-mean identity ∫ ∂_t P_t(x,·) = 0 is checked
/// at the first few sampled (t, x).
pub fn certify(
    bound: BoundId,
    sampler: &SamplerSpec,
    n_samples: usize,
    cfg: &ExpStarConfig,
    q: &QuadratureSpec,
) -> Result<Certificate> {
    if n_samples < 100 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            value: n_samples as f64,
            constraint: "need at least 100 samples",
        });
    }
    sampler.validate()?;
    sampler.domain_for(bound)?;

    let total = 2 * n_samples;
    let evaluations: Vec<SampleOutcome> = (0..total)
        .into_par_iter()
        .map(|i| -> Result<SampleOutcome> {
            let (t, x, y) = sampler.sample(i as u64, total as u64, bound)?;
            let outcome = lhs_rhs(bound, t, &x, &y, cfg, q)?;
            Ok((i, outcome.map(|(r, _)| r), (t, x, y)))
        })
        .collect::<Result<Vec<_>>>()?;

    // Fixed-order reduction: max with lexicographic (t, x, y) tie-break.
    let mut skipped = 0usize;
    let mut max_half = 0.0f64;
    let mut best: Option<(f64, (f64, Point, Point))> = None;
    for (i, ratio, point) in &evaluations {
        match ratio {
            None => skipped += 1,
            Some(r) => {
                let better = match &best {
                    None => true,
                    Some((cur, cur_pt)) => *r > *cur || (*r == *cur && lex_less(point, cur_pt)),
                };
                if better {
                    best = Some((*r, point.clone()));
                }
            }
        }
        if *i + 1 == n_samples {
            max_half = best.as_ref().map(|(r, _)| *r).unwrap_or(0.0);
        }
    }

    if skipped * 100 > total {
        return Err(Error::TooManySkips { skipped, total });
    }
    let (max_ratio, arg) = best.ok_or(Error::DegenerateSampler {
        reason: "all samples were skipped",
    })?;

    if bound == BoundId::Prop21 {
        let const_one = ScalarField::new(FieldKind::Const(1.0), sampler.dim)?;
        for (_, _, (t, x, _)) in evaluations.iter().take(4) {
            let residual = poisson_integral_dt(&const_one, *t, x, q)?;
            if residual.abs() > 1e-6 {
                return Err(Error::MajorantViolation {
                    bound: "ZERO_MEAN",
                    lhs: residual.abs(),
                    t: *t,
                    x: x.coords().to_vec(),
                    y: vec![],
                });
            }
        }
    }

    let stable = if max_half == 0.0 {
        max_ratio == 0.0
    } else {
        max_ratio <= 1.10 * max_half
    };

    Ok(Certificate {
        bound_id: bound,
        c_used: cfg.c,
        n_samples,
        max_ratio,
        argmax: Argmax {
            t: arg.0,
            x: arg.1,
            y: arg.2,
        },
        skipped,
        stable,
    })
}

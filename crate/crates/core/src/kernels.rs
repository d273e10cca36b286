//! The Mehler kernel in closed form, and the Ornstein-Uhlenbeck Poisson
//! kernel with its t- and x-derivatives via adaptive quadrature of the
//! subordination integral
//!
//! ```text
//! P_t(x,y) = (2 π^{(n+1)/2})^{-1} ∫_0^∞ t s^{-3/2} e^{-t²/(4s)}
//!            (1-e^{-2s})^{-n/2} exp(-|y-e^{-s}x|²/(1-e^{-2s})) ds,
//! ```
//!
//! evaluated after the substitution v = ln s, which makes the integrand
//! smooth on the line with a double-exponential left tail and an e^{-v/2}
//! right tail. Derivatives are taken under the integral sign; finite
//! differences exist only as test oracles.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::quad::{integrate_segmented, QuadratureSpec};

/// Minimum allowed t² + |x−y|²; closer to the diagonal the subordination
/// quadrature is not reliable and evaluation is refused.
pub const NEAR_DIAGONAL_FLOOR: f64 = 1e-12;

/// A (t, x, y) evaluation point for the Poisson kernel, t > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelPoint {
    t: f64,
    x: Point,
    y: Point,
}

impl KernelPoint {
    pub fn new(t: f64, x: Point, y: Point) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidParameter {
                name: "t",
                value: t,
                constraint: "t must be finite and positive",
            });
        }
        if x.dim() != y.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                got: y.dim(),
            });
        }
        Ok(Self { t, x, y })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn x(&self) -> &Point {
        &self.x
    }

    pub fn y(&self) -> &Point {
        &self.y
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }
}

/// Mehler kernel M_r(x,y) = (1−r²)^{−n/2} exp(−|y−rx|²/(1−r²)), closed form.
pub fn mehler(r: f64, x: &Point, y: &Point) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            constraint: "r must lie in (0,1)",
        });
    }
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    let n = x.dim() as f64;
    let onem = 1.0 - r * r;
    let dist_sq: f64 = x
        .coords()
        .iter()
        .zip(y.coords())
        .map(|(xi, yi)| (yi - r * xi) * (yi - r * xi))
        .sum();
    Ok((-n / 2.0 * onem.ln() - dist_sq / onem).exp())
}

/// Which integrand to evaluate under the subordination integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum KernelMode {
    Value,
    Dt,
    Dx(usize),
    DtDx(usize),
}

impl KernelMode {
    fn has_dt_factor(self) -> bool {
        matches!(self, KernelMode::Dt | KernelMode::DtDx(_))
    }

    fn dx_axis(self) -> Option<usize> {
        match self {
            KernelMode::Dx(i) | KernelMode::DtDx(i) => Some(i),
            _ => None,
        }
    }
}

/// Integrand in the v = ln s variable. All exponents are accumulated in
/// log space and exponentiated once; the sign-carrying polynomial factors
/// multiply afterwards.
fn integrand(mode: KernelMode, t: f64, x: &[f64], y: &[f64], n: usize, v: f64) -> f64 {
    let s = v.exp();
    let onem = -(-2.0 * s).exp_m1(); // 1 - e^{-2s}, stable for small s
    let es = (-s).exp();
    let mut dist_sq = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        let d = yi - es * xi;
        dist_sq += d * d;
    }
    let exponent = -0.5 * v - t * t / (4.0 * s) - (n as f64) / 2.0 * onem.ln() - dist_sq / onem;

    let mut factor = if mode.has_dt_factor() {
        1.0 - t * t / (2.0 * s)
    } else {
        t
    };
    if let Some(i) = mode.dx_axis() {
        factor *= es * (y[i] - es * x[i]) / onem;
    }
    factor * exponent.exp()
}

/// Log-magnitude of the value-mode integrand at one v, used to probe the
/// overall suppression scale of a kernel evaluation.
fn log_magnitude(t: f64, x: &[f64], y: &[f64], n: usize, v: f64) -> f64 {
    let s = v.exp();
    let onem = -(-2.0 * s).exp_m1();
    let es = (-s).exp();
    let mut dist_sq = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        let d = yi - es * xi;
        dist_sq += d * d;
    }
    t.ln() - 0.5 * v - t * t / (4.0 * s) - (n as f64) / 2.0 * onem.ln() - dist_sq / onem
}

/// Locations in v = ln s where the subordination integrand can carry a
/// narrow hump: the near-diagonal bump driven by e^{−(t²/4 + |x−y|²/2)/s},
/// and — for y with a positive projection shorter than x — the Mehler
/// tangency at e^{−s}|x| = <y, x/|x|>, which narrows like 1/(s|y_x|) and
/// is invisible to wide initial panels.
fn feature_points(t: f64, x: &Point, y: &Point, n: usize) -> Vec<f64> {
    let mut features = Vec::with_capacity(10);

    let s_bump = (t * t / 4.0 + x.dist(y).powi(2) / 2.0) * 2.0 / (n as f64 + 1.0);
    if s_bump > 0.0 {
        let v = s_bump.ln();
        features.extend_from_slice(&[v - 1.0, v, v + 1.0]);
    }

    let x_norm = x.norm();
    if x_norm > 0.0 {
        let proj = x.dot(y) / x_norm;
        if proj > 0.0 && proj < x_norm {
            let s_tan = (x_norm / proj).ln();
            let v_tan = s_tan.ln();
            let onem = -(-2.0 * s_tan).exp_m1();
            let width = (onem.sqrt() / (s_tan * proj)).clamp(0.01, 0.3);
            features.extend_from_slice(&[
                v_tan - 1.0,
                v_tan - width,
                v_tan,
                v_tan + width,
                v_tan + 1.0,
            ]);
        }
    }
    features
}

/// Truncation window [v_lo, v_hi] for the subordination integral in
/// v = ln s, clamped by the configured s_cut limits, plus the probed
/// log-magnitude of the integrand's bulk and its location.
///
/// The right tail of every integrand is bounded by a multiple of
/// e^{−v/2}; the left tail, written in w = t²/(4s), by a multiple of
/// w^p e^{−w}. Both cut points push the tail integrals below a small
/// fraction of abs_tol *relative to the bulk scale*: for far (x, y)
/// pairs the whole kernel is exponentially suppressed and the budget is
/// extended by the probed suppression, so truncation stays provably
/// below the achievable relative accuracy.
fn window(t: f64, x: &Point, y: &Point, n: usize, q: &QuadratureSpec) -> (f64, f64, f64, f64) {
    let size = 1.0 + x.norm() + y.norm();
    let base_budget = (16.0 / q.abs_tol()).ln() + size.ln();

    let cuts = |log_budget: f64| -> (f64, f64) {
        let v_hi =
            2.0 * (log_budget + (1.0 + t + t * t).ln() + n as f64 * std::f64::consts::LN_2);
        let p = (n as f64 + 3.0) / 2.0 + 1.0;
        let log_a = log_budget
            + (n as f64 + 3.0) * t.ln().abs()
            + (n as f64 + 3.0) * std::f64::consts::LN_2 * 2.0;
        let mut w = log_a.max(8.0);
        for _ in 0..4 {
            w = log_a + p * w.ln() + (1.0 + 2.0 * w).ln();
        }
        let v_lo = 2.0 * t.ln() - (4.0 * w).ln();
        (v_lo, v_hi)
    };

    // The bulk always lies inside the absolute-budget window; probe its
    // log-magnitude there, on a uniform scan plus the analytic feature
    // locations.
    let (v_lo0, v_hi0) = cuts(base_budget);
    let probes = 48;
    let mut bulk_log = f64::NEG_INFINITY;
    let mut bulk_v = 0.5 * (v_lo0 + v_hi0);
    let mut consider = |v: f64| {
        let m = log_magnitude(t, x.coords(), y.coords(), n, v);
        if m > bulk_log {
            bulk_log = m;
            bulk_v = v;
        }
    };
    for j in 0..=probes {
        consider(v_lo0 + (v_hi0 - v_lo0) * j as f64 / probes as f64);
    }
    for v in feature_points(t, x, y, n) {
        if v > v_lo0 && v < v_hi0 {
            consider(v);
        }
    }
    let suppression = (-bulk_log).clamp(0.0, 600.0);

    let (v_lo, v_hi) = if suppression > 0.0 {
        cuts(base_budget + suppression)
    } else {
        (v_lo0, v_hi0)
    };
    (
        v_lo.max(q.s_cut_low()),
        v_hi.min(q.s_cut_high()),
        bulk_log.min(0.0),
        bulk_v,
    )
}

fn eval(mode: KernelMode, p: &KernelPoint, q: &QuadratureSpec) -> Result<f64> {
    let scale2 = p.t * p.t + p.x.dist(&p.y).powi(2);
    if scale2 < NEAR_DIAGONAL_FLOOR {
        return Err(Error::NearDiagonal {
            scale2,
            floor: NEAR_DIAGONAL_FLOOR,
        });
    }
    if let Some(i) = mode.dx_axis() {
        if i >= p.dim() {
            return Err(Error::InvalidParameter {
                name: "axis",
                value: i as f64,
                constraint: "axis index must be below the dimension",
            });
        }
    }

    let n = p.dim();
    let (v_lo, v_hi, bulk_log, bulk_v) = window(p.t, &p.x, &p.y, n, q);
    let prefactor = match mode {
        KernelMode::Value | KernelMode::Dt => {
            0.5 * std::f64::consts::PI.powf(-(n as f64 + 1.0) / 2.0)
        }
        KernelMode::Dx(_) | KernelMode::DtDx(_) => {
            std::f64::consts::PI.powf(-(n as f64 + 1.0) / 2.0)
        }
    };

    // Resolve strongly suppressed kernels to relative accuracy: drop the
    // absolute floor to the bulk scale and let roundoff set the noise
    // floor for sign-cancelling derivative integrands.
    let q_eff = q.with_scaled_abs_tol(bulk_log.exp());
    let noise_rel = 64.0 * f64::EPSILON;

    let mut breakpoints = feature_points(p.t, &p.x, &p.y, n);
    breakpoints.extend_from_slice(&[bulk_v - 1.0, bulk_v, bulk_v + 1.0]);

    let t = p.t;
    let xc = p.x.coords();
    let yc = p.y.coords();
    match integrate_segmented(
        |v| integrand(mode, t, xc, yc, n, v),
        v_lo,
        v_hi,
        &breakpoints,
        &q_eff,
        noise_rel,
    ) {
        Ok(raw) => Ok(prefactor * raw),
        Err(Error::ConvergenceFailure {
            estimate,
            achieved,
            target,
        }) => Err(Error::ConvergenceFailure {
            estimate: prefactor * estimate,
            achieved: prefactor * achieved,
            target: prefactor * target,
        }),
        Err(e) => Err(e),
    }
}

/// P_t(x,y) by quadrature of the subordination integral; strictly positive.
pub fn poisson_kernel(p: &KernelPoint, q: &QuadratureSpec) -> Result<f64> {
    eval(KernelMode::Value, p, q)
}

/// ∂_t P_t(x,y), differentiated under the integral sign.
pub fn poisson_kernel_dt(p: &KernelPoint, q: &QuadratureSpec) -> Result<f64> {
    eval(KernelMode::Dt, p, q)
}

/// ∂_{x_i} P_t(x,y) for the 0-based axis `i`.
pub fn poisson_kernel_dx(i: usize, p: &KernelPoint, q: &QuadratureSpec) -> Result<f64> {
    eval(KernelMode::Dx(i), p, q)
}

/// Mixed derivative ∂_t ∂_{x_i} P_t(x,y), used by the semigroup
/// commutation identity.
pub fn poisson_kernel_dt_dx(i: usize, p: &KernelPoint, q: &QuadratureSpec) -> Result<f64> {
    eval(KernelMode::DtDx(i), p, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{gaussian_envelope_radius, integrate};

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    fn kp(t: f64, x: &[f64], y: &[f64]) -> KernelPoint {
        KernelPoint::new(t, pt(x), pt(y)).unwrap()
    }

    #[test]
    fn mehler_at_origin() {
        let v = mehler(0.5, &pt(&[0.0]), &pt(&[0.0])).unwrap();
        assert!((v - 2.0 / 3.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mehler_gaussian_symmetry() {
        let lhs = mehler(0.3, &pt(&[1.0]), &pt(&[2.0])).unwrap() * (-1.0f64).exp();
        let rhs = mehler(0.3, &pt(&[2.0]), &pt(&[1.0])).unwrap() * (-4.0f64).exp();
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs());
    }

    #[test]
    fn mehler_normalized_in_y() {
        let q = QuadratureSpec::default();
        let r = 0.7;
        let x = pt(&[1.5]);
        let radius = gaussian_envelope_radius(1.5, 0.0, q.abs_tol());
        let v = integrate(
            |y| mehler(r, &x, &pt(&[y])).unwrap(),
            -radius,
            radius,
            &q,
        )
        .unwrap();
        let mass = v / std::f64::consts::PI.sqrt();
        assert!((mass - 1.0).abs() < 1e-10, "mass = {mass}");
    }

    #[test]
    fn mehler_rejects_bad_r() {
        for r in [0.0, 1.0, -0.2, 1.4] {
            assert!(mehler(r, &pt(&[0.0]), &pt(&[0.0])).is_err());
        }
    }

    // Golden value for P_1(0,0), n = 1: fixed 10^6-node composite Simpson
    // rule on v = ln s over [-40, 40], computed independently of the
    // adaptive path (see tests/common). The tolerance absorbs both the
    // adaptive quadrature budget and the 9.3e-10 relative tail bias of the
    // golden discretization's fixed window.
    const GOLDEN_P1_00: f64 = 0.7076311064263655;

    #[test]
    fn golden_value_at_origin() {
        let q = QuadratureSpec::default();
        let v = poisson_kernel(&kp(1.0, &[0.0], &[0.0]), &q).unwrap();
        assert!(
            (v - GOLDEN_P1_00).abs() <= 2e-8 * GOLDEN_P1_00,
            "P_1(0,0) = {v}"
        );
    }

    #[test]
    fn reference_values_offset_point() {
        // High-precision references at (t=1, x=0.5, y=1.2), n=1.
        let q = QuadratureSpec::default();
        let p = kp(1.0, &[0.5], &[1.2]);
        let v = poisson_kernel(&p, &q).unwrap();
        assert!((v - 0.1550909806857349).abs() < 3e-9 * v, "P = {v}");
        let dt = poisson_kernel_dt(&p, &q).unwrap();
        assert!((dt - 0.0232597431497977).abs() < 1e-8, "dtP = {dt}");
        let dx = poisson_kernel_dx(0, &p, &q).unwrap();
        assert!((dx - 0.2094018622417486).abs() < 1e-8, "dxP = {dx}");
    }

    #[test]
    fn euclidean_limit_small_t() {
        // Locally the generator is -(1/2)Δ, so for t → 0 the kernel
        // approaches the classical Poisson kernel of e^{-t√(-Δ/2)}:
        // √2 t / (π (t² + 2 d²)).
        let q = QuadratureSpec::default();
        let t = 1e-3;
        let d: f64 = 0.0005;
        let v = poisson_kernel(&kp(t, &[0.1], &[0.1005]), &q).unwrap();
        let classical = (2.0f64).sqrt() * t / (std::f64::consts::PI * (t * t + 2.0 * d * d));
        assert!(
            ((v - classical) / classical).abs() < 0.01,
            "v = {v}, classical = {classical}"
        );
    }

    #[test]
    fn dx_vanishes_at_origin_pair() {
        let q = QuadratureSpec::default();
        for t in [0.3, 1.0, 4.0] {
            let v = poisson_kernel_dx(0, &kp(t, &[0.0], &[0.0]), &q).unwrap();
            assert!(v.abs() < 1e-14, "t = {t}, v = {v}");
        }
    }

    #[test]
    fn near_diagonal_refused() {
        let q = QuadratureSpec::default();
        let err = poisson_kernel(&kp(1e-7, &[0.1], &[0.1]), &q).unwrap_err();
        assert!(matches!(err, Error::NearDiagonal { .. }));
    }

    #[test]
    fn invalid_axis_rejected() {
        let q = QuadratureSpec::default();
        let err = poisson_kernel_dx(1, &kp(1.0, &[0.0], &[0.0]), &q).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { .. }));
    }

    #[test]
    fn kernel_point_validation() {
        assert!(KernelPoint::new(0.0, pt(&[0.0]), pt(&[0.0])).is_err());
        assert!(KernelPoint::new(-1.0, pt(&[0.0]), pt(&[0.0])).is_err());
        assert!(KernelPoint::new(f64::NAN, pt(&[0.0]), pt(&[0.0])).is_err());
        assert!(KernelPoint::new(1.0, pt(&[0.0]), pt(&[0.0, 1.0])).is_err());
    }

    #[test]
    fn positivity_across_scales() {
        let q = QuadratureSpec::default();
        for t in [0.01, 0.1, 1.0, 10.0, 100.0] {
            for (x, y) in [([0.0], [0.0]), ([2.0], [-3.0]), ([-5.0], [5.0])] {
                let v = poisson_kernel(&kp(t, &x, &y), &q).unwrap();
                assert!(v > 0.0, "t = {t}, x = {x:?}, y = {y:?}, v = {v}");
            }
        }
    }

    #[test]
    fn window_doubling_is_negligible() {
        // The analytic truncation window must already capture the mass:
        // widening it by 10 on each side changes nothing above abs_tol.
        let q = QuadratureSpec::default();
        for (t, x, y) in [(0.05, 3.0, -2.0), (1.0, 0.5, 1.2), (50.0, -4.0, 1.0)] {
            let xp = pt(&[x]);
            let yp = pt(&[y]);
            let (v_lo, v_hi, _, _) = window(t, &xp, &yp, 1, &q);
            let base = integrate(
                |v| integrand(KernelMode::Value, t, xp.coords(), yp.coords(), 1, v),
                v_lo,
                v_hi,
                &q,
            )
            .unwrap();
            let wide = integrate(
                |v| integrand(KernelMode::Value, t, xp.coords(), yp.coords(), 1, v),
                v_lo - 10.0,
                (v_hi + 10.0).min(q.s_cut_high()),
                &q,
            )
            .unwrap();
            assert!(
                (base - wide).abs() < 10.0 * q.abs_tol() + 1e-9 * base.abs(),
                "t = {t}: window leak {}",
                (base - wide).abs()
            );
        }
    }

    #[test]
    fn far_field_values_resolved_to_relative_accuracy() {
        // Strongly suppressed kernels (magnitudes below the absolute
        // floor) must still come out to relative accuracy; references
        // from 30-digit quadrature.
        let q = QuadratureSpec::default();
        let cases = [
            (poisson_kernel(&kp(3.0, &[1.5], &[5.9]), &q).unwrap(), 8.886312112560627e-16),
            (poisson_kernel_dx(0, &kp(3.0, &[1.5], &[5.9]), &q).unwrap(), 1.337334877397451e-15),
            (poisson_kernel_dx(0, &kp(10.0, &[-1.0], &[6.0]), &q).unwrap(), 5.970423579400374e-20),
            (poisson_kernel(&kp(0.05, &[4.0], &[-4.0]), &q).unwrap(), 9.167545429728611e-10),
        ];
        for (got, expect) in cases {
            assert!(
                ((got - expect) / expect).abs() < 1e-7,
                "got {got}, expect {expect}"
            );
        }
    }

    #[test]
    fn dt_to_half_time_ratio_is_finite() {
        // |∂_t P_t| t / P_{t/2} at (t=2, x=1, y=-1); reference 0.8681585948.
        let q = QuadratureSpec::default();
        let num = poisson_kernel_dt(&kp(2.0, &[1.0], &[-1.0]), &q).unwrap().abs() * 2.0;
        let den = poisson_kernel(&kp(1.0, &[1.0], &[-1.0]), &q).unwrap();
        let ratio = num / den;
        assert!(ratio.is_finite());
        assert!((ratio - 0.868158594800182).abs() < 1e-5, "ratio = {ratio}");
    }
}

//! Adaptive Gauss-Kronrod quadrature and the tolerance/truncation
//! configuration shared by every integral in the crate.

use crate::error::{Error, Result};

/// Tolerances, truncation clamps and subdivision limits for quadrature.
///
/// `s_cut_low` / `s_cut_high` clamp the subordination integral in the
/// transformed variable v = ln s. The per-evaluation analytic window is
/// intersected with `[s_cut_low, s_cut_high]`; the defaults are wide
/// enough that the clamp is inactive for every t in [1e-6, 1e4].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
    s_cut_low: f64,
    s_cut_high: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-14,
            max_subdivisions: 200,
            s_cut_low: -80.0,
            s_cut_high: 120.0,
        }
    }
}

impl QuadratureSpec {
    pub fn new(
        rel_tol: f64,
        abs_tol: f64,
        max_subdivisions: usize,
        s_cut_low: f64,
        s_cut_high: f64,
    ) -> Result<Self> {
        if !(abs_tol > 0.0 && abs_tol <= rel_tol && rel_tol < 1.0) {
            return Err(Error::InvalidParameter {
                name: "abs_tol/rel_tol",
                value: rel_tol,
                constraint: "need 0 < abs_tol <= rel_tol < 1",
            });
        }
        if max_subdivisions == 0 {
            return Err(Error::InvalidParameter {
                name: "max_subdivisions",
                value: 0.0,
                constraint: "must be positive",
            });
        }
        if !(s_cut_low < s_cut_high) || !s_cut_low.is_finite() || !s_cut_high.is_finite() {
            return Err(Error::InvalidParameter {
                name: "s_cut_low/s_cut_high",
                value: s_cut_low,
                constraint: "need finite s_cut_low < s_cut_high",
            });
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
            s_cut_low,
            s_cut_high,
        })
    }

    /// Replaces the tolerances, keeping the truncation clamps.
    pub fn with_tolerances(&self, rel_tol: f64, abs_tol: f64) -> Result<Self> {
        Self::new(
            rel_tol,
            abs_tol,
            self.max_subdivisions,
            self.s_cut_low,
            self.s_cut_high,
        )
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn max_subdivisions(&self) -> usize {
        self.max_subdivisions
    }

    pub fn s_cut_low(&self) -> f64 {
        self.s_cut_low
    }

    pub fn s_cut_high(&self) -> f64 {
        self.s_cut_high
    }

    /// Shrinks the absolute floor by `scale` (<= 1) so that strongly
    /// suppressed integrands are still resolved to rel_tol. Used by the
    /// kernel evaluator after it has probed the integrand's magnitude.
    pub(crate) fn with_scaled_abs_tol(&self, scale: f64) -> Self {
        Self {
            abs_tol: (self.abs_tol * scale).max(1e-300),
            ..self.clone()
        }
    }
}

// 15-point Kronrod abscissae on [-1,1] (positive half) and the embedded
// 7-point Gauss weights, QUADPACK values.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// One Gauss-Kronrod 15/7 panel: returns (kronrod value, error estimate,
/// integral of |f|).
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut res_kronrod = f_center * WGK[7];
    let mut res_gauss = f_center * WG[3];
    let mut res_abs = res_kronrod.abs();

    let mut fv = [0.0f64; 14];
    for j in 0..7 {
        let abscissa = half * XGK[j];
        let f1 = f(center - abscissa);
        let f2 = f(center + abscissa);
        fv[j] = f1;
        fv[j + 7] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[j + 7] - mean).abs());
    }

    let err = ((res_kronrod - res_gauss) * half).abs();
    res_abs *= half.abs();
    res_asc *= half.abs();

    // QUADPACK error rescaling: sharpen the raw Gauss/Kronrod difference
    // and floor it at the roundoff level of the computed integral.
    let mut scaled_err = err;
    if res_asc != 0.0 && err != 0.0 {
        scaled_err = res_asc * 1.0f64.min((200.0 * err / res_asc).powf(1.5));
    }
    let round_floor = 50.0 * f64::EPSILON * res_abs;
    if round_floor > scaled_err {
        scaled_err = round_floor;
    }

    (res_kronrod * half, scaled_err, res_abs)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    res_abs: f64,
}

/// Integrates `f` over `[a, b]` by adaptive bisection of 15-point
/// Gauss-Kronrod panels, splitting the worst panel first, until the summed
/// error estimate is below `max(abs_tol, rel_tol * |integral|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, q: &QuadratureSpec) -> Result<f64> {
    integrate_noisy(f, a, b, q, 0.0)
}

/// Adaptive quadrature for integrands that are themselves produced by
/// quadrature (P_t f, semigroup compositions). `noise_rel` is the relative
/// accuracy of each integrand evaluation; the summed error estimate is
/// additionally accepted once it reaches `noise_rel * ∫|f|`, the noise
/// floor below which subdividing cannot improve the result. This is what
/// makes near-cancelling integrals (zero-mean identities) resolvable.
pub fn integrate_noisy<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    q: &QuadratureSpec,
    noise_rel: f64,
) -> Result<f64> {
    integrate_segmented(f, a, b, &[], q, noise_rel)
}

/// Like [`integrate_noisy`] but with interior breakpoints seeding the
/// initial panel set. Callers that know where narrow features sit (the
/// kernel evaluator's subordination humps) pass them here so the first
/// error estimates already see them; points outside (a, b) are ignored.
pub fn integrate_segmented<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    q: &QuadratureSpec,
    noise_rel: f64,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NonFinite {
            context: "integration bounds",
        });
    }
    if a == b {
        return Ok(0.0);
    }
    // Normalize orientation so the bisection loop always sees a < b.
    let (a, b, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|v| v.is_finite() && *v > a && *v < b)
        .collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    cuts.insert(0, a);
    cuts.push(b);

    let mut panels = Vec::with_capacity(cuts.len().max(8));
    let mut total_value = 0.0;
    let mut total_error = 0.0;
    let mut total_res_abs = 0.0;
    for pair in cuts.windows(2) {
        let (v0, e0, r0) = qk15(&f, pair[0], pair[1]);
        if !v0.is_finite() {
            return Err(Error::NonFinite {
                context: "integrand evaluation",
            });
        }
        panels.push(Panel {
            a: pair[0],
            b: pair[1],
            value: v0,
            error: e0,
            res_abs: r0,
        });
        total_value += v0;
        total_error += e0;
        total_res_abs += r0;
    }

    let target = |value: f64, res_abs: f64| -> f64 {
        q.abs_tol
            .max(q.rel_tol * value.abs())
            .max(noise_rel * res_abs)
    };

    for _ in 0..q.max_subdivisions {
        if total_error <= target(total_value, total_res_abs) {
            return Ok(sign * total_value);
        }

        // Split the panel with the largest error estimate.
        let (worst_idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap())
            .expect("panel list never empty");
        let worst = panels.swap_remove(worst_idx);
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine precision; keep the panel and
            // accept whatever error remains on it.
            panels.push(Panel {
                error: 0.0,
                ..worst
            });
            total_error -= worst.error;
            continue;
        }
        let (vl, el, rl) = qk15(&f, worst.a, mid);
        let (vr, er, rr) = qk15(&f, mid, worst.b);
        if !(vl.is_finite() && vr.is_finite()) {
            return Err(Error::NonFinite {
                context: "integrand evaluation",
            });
        }
        total_value += vl + vr - worst.value;
        total_error += el + er - worst.error;
        total_res_abs += rl + rr - worst.res_abs;
        panels.push(Panel {
            a: worst.a,
            b: mid,
            value: vl,
            error: el,
            res_abs: rl,
        });
        panels.push(Panel {
            a: mid,
            b: worst.b,
            value: vr,
            error: er,
            res_abs: rr,
        });
    }

    let final_target = target(total_value, total_res_abs);
    if total_error <= final_target {
        Ok(sign * total_value)
    } else {
        Err(Error::ConvergenceFailure {
            estimate: sign * total_value,
            achieved: total_error,
            target: final_target,
        })
    }
}

/// Radius beyond which `e^{−(1−β)|y|²}` times a mild polynomial is below
/// `abs_tol`, for integrands dominated by a Gaussian envelope centred
/// within `|y| <= center`. `growth_beta` accounts for integrands carrying
/// an `e^{β|y|²}` factor (0 for none).
pub fn gaussian_envelope_radius(center: f64, growth_beta: f64, abs_tol: f64) -> f64 {
    let decay = (1.0 - growth_beta).max(0.25);
    center.abs().max(1.0) + (abs_tol.recip().ln() / decay).sqrt() + 4.0
}

/// Integrates `f` over the box `[-radius, radius]^dim` by nesting the
/// one-dimensional adaptive driver, one axis at a time. Levels above the
/// innermost run with the noise floor of the level below them.
///
/// Inner-level quadrature failures surface as NaN and poison the final
/// error check rather than panicking across the closure boundary.
pub fn integrate_box<F: Fn(&[f64]) -> f64 + Sync>(
    f: F,
    dim: usize,
    radius: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    fn recurse<F: Fn(&[f64]) -> f64>(
        f: &F,
        fixed: &[f64],
        dim: usize,
        radius: f64,
        q: &QuadratureSpec,
    ) -> Result<f64> {
        if fixed.len() + 1 == dim {
            let g = |y: f64| {
                let mut coords = fixed.to_vec();
                coords.push(y);
                f(&coords)
            };
            integrate(g, -radius, radius, q)
        } else {
            let g = |y: f64| {
                let mut inner = fixed.to_vec();
                inner.push(y);
                recurse(f, &inner, dim, radius, q).unwrap_or(f64::NAN)
            };
            integrate_noisy(g, -radius, radius, q, q.rel_tol)
        }
    }
    let value = recurse(&f, &[], dim, radius, q)?;
    if !value.is_finite() {
        return Err(Error::NonFinite {
            context: "nested box quadrature",
        });
    }
    Ok(value)
}

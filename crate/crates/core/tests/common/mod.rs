//! Independent oracles shared by the integration suites. Everything here
//! re-derives its values from the defining formulas without touching the
//! adaptive quadrature path it is used to check.

/// Golden reference for P_1(0,0) in one dimension: the frozen output of
/// [`simpson_p1_00`], a fixed 10^6-node composite Simpson rule on
/// v = ln s over [-40, 40].
pub const GOLDEN_P1_00: f64 = 0.7076311064263655;

/// Composite-Simpson discretization of the subordination integral at
/// t = 1, x = y = 0, n = 1, deliberately different from the adaptive
/// Gauss-Kronrod path (fixed nodes, fixed window, 100x resolution).
pub fn simpson_p1_00() -> f64 {
    let n_intervals = 1_000_000usize;
    let (a, b) = (-40.0f64, 40.0f64);
    let h = (b - a) / n_intervals as f64;
    let f = |v: f64| -> f64 {
        let s = v.exp();
        let onem = -(-2.0 * s).exp_m1();
        (-0.5 * v).exp() * (-1.0 / (4.0 * s)).exp() / onem.sqrt()
    };
    let mut sum = f(a) + f(b);
    for i in 1..n_intervals {
        let v = a + h * i as f64;
        sum += if i % 2 == 1 { 4.0 * f(v) } else { 2.0 * f(v) };
    }
    sum * h / 3.0 / (2.0 * std::f64::consts::PI)
}

//! Deterministic low-discrepancy sampling for certification sweeps.
//!
//! Halton points (radical-inverse in coprime prime bases) are addressable
//! by index, so parallel consumers can evaluate any sample without shared
//! state and reductions stay reproducible across thread counts.

const PRIMES: [u64; 7] = [2, 3, 5, 7, 11, 13, 17];

/// Radical inverse of `n` in the given base, in [0, 1).
fn radical_inverse(mut n: u64, base: u64) -> f64 {
    let mut result = 0.0;
    let mut denom = 1.0 / base as f64;
    while n > 0 {
        result += (n % base) as f64 * denom;
        n /= base;
        denom /= base as f64;
    }
    result
}

/// The `index`-th Halton point in `dims` dimensions (supports dims <= 7).
/// Index 0 maps to sequence element 1 so the degenerate all-zero point is
/// never produced.
pub fn halton_point(index: u64, dims: usize) -> Vec<f64> {
    assert!(dims <= PRIMES.len(), "halton sampler supports up to 7 dims");
    (0..dims)
        .map(|d| radical_inverse(index + 1, PRIMES[d]))
        .collect()
}

/// Maps a unit-interval coordinate to [lo, hi] linearly.
pub fn to_linear(u: f64, lo: f64, hi: f64) -> f64 {
    lo + u * (hi - lo)
}

/// Maps a unit-interval coordinate to [lo, hi] log-uniformly (lo, hi > 0).
pub fn to_log(u: f64, lo: f64, hi: f64) -> f64 {
    (lo.ln() + u * (hi.ln() - lo.ln())).exp()
}

/// Row-major lattice point `index` of a `per_axis^dims` grid on [0,1]^dims,
/// with nodes at cell midpoints.
pub fn grid_point(index: u64, per_axis: u64, dims: usize) -> Vec<f64> {
    let mut rem = index;
    let mut coords = Vec::with_capacity(dims);
    for _ in 0..dims {
        let k = rem % per_axis;
        rem /= per_axis;
        coords.push((k as f64 + 0.5) / per_axis as f64);
    }
    coords
}

//! Shared sampling helpers for the integration suites.

use bellman_mt::{ExponentParams, OmegaPoint};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random point of the solver domain with `O(1)` coordinates.
pub fn sample_omega(rng: &mut ChaCha8Rng, p: f64) -> OmegaPoint {
    let x1: f64 = rng.gen_range(-2.0..2.0);
    let x2: f64 = rng.gen_range(-2.0..2.0);
    let x3 = x1.abs().powf(p) + rng.gen_range(0.0..4.0);
    OmegaPoint::new(x1, x2, x3)
}

/// Random admissible zigzag triple `x = alpha x+ + (1-alpha) x-` with
/// `|dx1| = |dx2|` and both endpoints in the domain.
pub fn sample_zigzag_triple(
    rng: &mut ChaCha8Rng,
    params: &ExponentParams,
) -> Option<(OmegaPoint, OmegaPoint, OmegaPoint, f64)> {
    let p = params.p();
    let xm = sample_omega(rng, p);
    let d: f64 = rng.gen_range(0.0..0.5);
    let s: f64 = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let e: f64 = rng.gen_range(-0.5..0.5);
    let xp = OmegaPoint::new(xm.x1 + d, xm.x2 + s * d, xm.x3 + e);
    if !xp.is_in_domain(params) {
        return None;
    }
    let alpha: f64 = rng.gen_range(0.05..0.95);
    let x = OmegaPoint::new(
        alpha * xp.x1 + (1.0 - alpha) * xm.x1,
        alpha * xp.x2 + (1.0 - alpha) * xm.x2,
        alpha * xp.x3 + (1.0 - alpha) * xm.x3,
    );
    Some((x, xp, xm, alpha))
}

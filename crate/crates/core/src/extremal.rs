//! The self-similar extremal pair whose `p`-averages attain the Bellman
//! value on the plane `x1 = 0` (for p >= 2) or `x2 = 0` (for p < 2, with
//! the roles of `f` and `g` exchanged).
//!
//! The infinite recursion is unrolled for finitely many levels and the
//! innermost interval is filled with the constant pair carrying the
//! limiting means. Because the recursion's breakpoints are not dyadic,
//! the pair lives on a list of segments, not on a dyadic grid, and all
//! averages are computed segment-exactly.

use crate::error::{Error, Result};
use crate::solver::OmegaPoint;
use crate::special::ExponentParams;

/// Mass below which the recursion tail is replaced by its constant fill.
const TAIL_CUTOFF: f64 = 9.094947017729282e-13; // 2^-40

/// `exp` arguments above this would push segment values out of f64 range.
const VALUE_EXP_CAP: f64 = 690.0;

/// One constancy interval of a segment pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub len: f64,
    pub f: f64,
    pub g: f64,
}

/// A pair of step functions on `[0,1]` over a common non-uniform
/// partition.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPair {
    pub segments: Vec<Segment>,
}

impl SegmentPair {
    pub fn mean_f(&self) -> f64 {
        kahan_sum(self.segments.iter().map(|s| s.len * s.f))
    }

    pub fn mean_g(&self) -> f64 {
        kahan_sum(self.segments.iter().map(|s| s.len * s.g))
    }

    /// `<|g|^p>`, with per-segment contributions computed in the log
    /// domain (late-level values grow like `gamma^j` while their measure
    /// shrinks faster, and `|g|^p` alone can overflow f64).
    pub fn abs_p_mean_g(&self, p: f64) -> f64 {
        kahan_sum(self.segments.iter().map(|s| {
            if s.g == 0.0 || s.len == 0.0 {
                0.0
            } else {
                (s.len.ln() + p * s.g.abs().ln()).exp()
            }
        }))
    }

    pub fn abs_p_mean_f(&self, p: f64) -> f64 {
        kahan_sum(self.segments.iter().map(|s| {
            if s.f == 0.0 || s.len == 0.0 {
                0.0
            } else {
                (s.len.ln() + p * s.f.abs().ln()).exp()
            }
        }))
    }

    pub fn total_length(&self) -> f64 {
        kahan_sum(self.segments.iter().map(|s| s.len))
    }
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Constants of one truncated extremal run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalSequenceParams {
    /// The nonzero prescribed mean (of `g` for p >= 2, of `f` for p < 2).
    pub x2: f64,
    pub x3: f64,
    pub eps: f64,
    /// Tail value of the +-c function at the current `eps`.
    pub c: f64,
    pub d_minus: f64,
    pub d_plus: f64,
    pub gamma: f64,
    /// The `eps -> 0` limit of `c`; first coordinate of the boundary end
    /// of the extremal chord through the target point.
    pub c0: f64,
    pub depth_cap: u32,
    /// Levels actually unrolled.
    pub levels: u32,
    /// Untruncated mass fraction `((1-2 eps) gamma^p)^levels` left in the
    /// innermost interval.
    pub tail_mass: f64,
    /// Bound on the truncation error of `<|g|^p>`.
    pub trunc_error_bound: f64,
}

/// Output of [`extremal_sequence`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalRun {
    pub pair: SegmentPair,
    pub params: ExtremalSequenceParams,
    /// `x3 (x2 - c0)^p / c0^p` (mirrored for p < 2): the limit of
    /// `<|g|^p>` as `eps -> 0`, equal to the Bellman value at the target.
    pub predicted_limit: f64,
    /// `<|g|^p>` of the truncated pair.
    pub achieved: f64,
    /// The averages the truncated pair actually realizes (its `x3`
    /// coordinate is `x3 (1 - tail_mass)`).
    pub point: OmegaPoint,
}

fn bisect_increasing(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Root of `c0^p = (1 - p c0 / x2) x3` in `(0, x2/p)`.
fn limit_constant_standard(x2: f64, x3: f64, p: f64) -> f64 {
    bisect_increasing(0.0, x2 / p, |c| c.powf(p) - (1.0 - p * c / x2) * x3)
}

/// Root of `(a - c0)^p = (1 - p c0 / a) x3` in `(0, a/p)` (the p < 2,
/// roles-exchanged variant at the point `(a, 0, x3)`).
fn limit_constant_swapped(a: f64, x3: f64, p: f64) -> f64 {
    bisect_increasing(0.0, a / p, |c| (a - c).powf(p) - (1.0 - p * c / a) * x3)
}

/// Builds the truncated extremal pair at `(0, x2, x3)` (p >= 2) or
/// `(x2, 0, x3)` with `f` and `g` exchanged (p < 2).
///
/// The recursion depth is the smallest `K` with
/// `((1-2 eps) gamma^p)^K < 2^-40`, capped by `depth_cap` (and by f64
/// range for the level values); the innermost interval gets the constant
/// pair carrying the limiting means, so the means of `f` and `g` are
/// reproduced exactly and only the `x3`-coordinate is truncated, by the
/// reported `tail_mass` fraction.
pub fn extremal_sequence(
    x2: f64,
    x3: f64,
    eps: f64,
    params: &ExponentParams,
    depth_cap: u32,
) -> Result<ExtremalRun> {
    let p = params.p();
    if !(x2 > 0.0 && x3 > 0.0) || !x2.is_finite() || !x3.is_finite() {
        return Err(Error::Domain(format!(
            "extremal sequence needs x2 > 0 and x3 > 0, got ({x2}, {x3})"
        )));
    }
    if !(eps > 0.0 && eps < 0.25) {
        return Err(Error::Domain(format!(
            "eps must lie in (0, 1/4), got {eps}"
        )));
    }
    let swapped = p < 2.0;
    if swapped && x3 <= x2.powf(p) {
        return Err(Error::Domain(format!(
            "the p < 2 construction needs an interior point: x3 > x2^p, got x3 = {x3}"
        )));
    }
    if depth_cap == 0 {
        return Err(Error::Domain("depth_cap must be at least 1".into()));
    }

    // gamma as a function of the tail value c, from the prescribed mean:
    // eps (d- + d+) = (1 - (1-2 eps) gamma) x2 with the zigzag-consistent
    // d's below collapses to gamma = 1 + 2 eps c / ((1-eps) x2)
    let gamma_of = |c: f64| 1.0 + 2.0 * eps / (1.0 - eps) * (c / x2);
    let d_of = |c: f64| {
        let gamma = gamma_of(c);
        (gamma * x2 - c, gamma * x2 - c * (1.0 + eps) / (1.0 - eps))
    };

    // residual of the <|f|^p> = x3 constraint
    let rho = |c: f64| -> f64 {
        let gamma = gamma_of(c);
        let body = (1.0 - 2.0 * eps) * gamma.powf(p) * x3;
        if swapped {
            let (d_minus, d_plus) = d_of(c);
            eps * (d_minus.abs().powf(p) + d_plus.abs().powf(p)) + body - x3
        } else {
            2.0 * eps * c.powf(p) + body - x3
        }
    };

    // walk to a sign change, then bisect; rho(0) < 0 at interior points
    let c = {
        if rho(0.0) >= 0.0 {
            return Err(Error::Convergence {
                what: "extremal constant c",
                residual: rho(0.0),
                iterations: 0,
            });
        }
        let step = x2 / 64.0;
        let mut hi = step;
        let mut found = false;
        for _ in 0..4096 {
            if rho(hi) >= 0.0 {
                found = true;
                break;
            }
            hi += step;
        }
        if !found {
            return Err(Error::Convergence {
                what: "extremal constant c",
                residual: rho(hi),
                iterations: 4096,
            });
        }
        bisect_increasing(hi - step, hi, rho)
    };

    let gamma = gamma_of(c);
    let (d_minus, d_plus) = d_of(c);
    let c0 = if swapped {
        limit_constant_swapped(x2, x3, p)
    } else {
        limit_constant_standard(x2, x3, p)
    };

    // truncation depth: mass ratio q per level, value growth gamma per level
    let q = (1.0 - 2.0 * eps) * gamma.powf(p);
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Convergence {
            what: "extremal mass ratio",
            residual: q,
            iterations: 0,
        });
    }
    let k_tail = (TAIL_CUTOFF.ln() / q.ln()).ceil() as u32;
    // keep both the level values (gamma^K) and the segment lengths
    // ((1-2 eps)^K) inside normal f64 range
    let k_value = (VALUE_EXP_CAP / gamma.ln().max(f64::MIN_POSITIVE)) as u32;
    let k_len = (VALUE_EXP_CAP / -(1.0 - 2.0 * eps).ln()) as u32;
    let levels = k_tail
        .max(1)
        .min(depth_cap)
        .min(k_value.max(1))
        .min(k_len.max(1));

    // assemble the segments: level j holds two intervals of length
    // eps (1-2 eps)^j with values scaled by gamma^j
    let (f_left, g_left, f_right, g_right) = if swapped {
        (d_minus, -c, d_plus, c)
    } else {
        (-c, d_minus, c, d_plus)
    };
    let n = levels as usize;
    let mut segments = Vec::with_capacity(2 * n + 1);
    let mut block_start = 0.0f64;
    let mut block_len = 1.0f64;
    let mut scale = 1.0f64;
    let mut rights = Vec::with_capacity(n);
    for _ in 0..n {
        let piece = eps * block_len;
        segments.push(Segment {
            start: block_start,
            len: piece,
            f: scale * f_left,
            g: scale * g_left,
        });
        rights.push(Segment {
            start: block_start + block_len - piece,
            len: piece,
            f: scale * f_right,
            g: scale * g_right,
        });
        block_start += piece;
        block_len *= 1.0 - 2.0 * eps;
        scale *= gamma;
    }
    // innermost fill: the limiting means (0, gamma^K x2), roles mirrored
    let core = Segment {
        start: block_start,
        len: block_len,
        f: if swapped { scale * x2 } else { 0.0 },
        g: if swapped { 0.0 } else { scale * x2 },
    };
    segments.push(core);
    segments.extend(rights.into_iter().rev());

    // averages via the geometric recurrence (stable and overflow-safe)
    let mut q_pow = 1.0f64;
    let mut sum_g = 0.0f64;
    let mut carry = 0.0f64;
    let level_g = if swapped {
        2.0 * eps * c.abs().powf(p)
    } else {
        eps * (d_minus.abs().powf(p) + d_plus.abs().powf(p))
    };
    for _ in 0..n {
        let y = level_g * q_pow - carry;
        let t = sum_g + y;
        carry = (t - sum_g) - y;
        sum_g = t;
        q_pow *= q;
    }
    let tail_mass = q_pow;
    let core_g = if swapped { 0.0 } else { tail_mass * x2.powf(p) };
    let achieved = sum_g + core_g;

    let predicted_limit = if swapped {
        x3 * (c0 / (x2 - c0)).powf(p)
    } else {
        x3 * ((x2 - c0) / c0).powf(p)
    };

    // the constant fill carries f = gamma^K x2 in swapped mode, so it
    // returns q^K x2^p of the truncated f-mass
    let x3_actual = if swapped {
        x3 * (1.0 - tail_mass) + tail_mass * x2.powf(p)
    } else {
        x3 * (1.0 - tail_mass)
    };
    let point = if swapped {
        OmegaPoint::new(x2, 0.0, x3_actual)
    } else {
        OmegaPoint::new(0.0, x2, x3_actual)
    };

    let biggest = d_minus.abs().max(d_plus.abs()).max(c.abs()).max(x2);
    Ok(ExtremalRun {
        pair: SegmentPair { segments },
        params: ExtremalSequenceParams {
            x2,
            x3,
            eps,
            c,
            d_minus,
            d_plus,
            gamma,
            c0,
            depth_cap,
            levels,
            tail_mass,
            trunc_error_bound: tail_mass * (biggest.powf(p) + predicted_limit),
        },
        predicted_limit,
        achieved,
        point,
    })
}

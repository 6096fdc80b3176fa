//! The coordinate change between the solver domain and the symmetrized
//! domain `Xi`, extremal-trajectory chords of the degenerate-Hessian
//! cases, the rejected implicit candidates, the per-case `Phi(omega)`
//! identities, and finite-difference Hessian verification of the solver's
//! output.
//!
//! Case labels follow the four chord geometries: `3_2` / `4_2` chords run
//! in planes of constant `y1` and end on `y2 = y1` / `y2 = -y1`; `3_1` /
//! `4_1` chords run in planes of constant `y2` and are the candidates the
//! sign analysis rejects; case `2` chords are vertical.

use crate::error::{Error, Result};
use crate::solver::{bellman_max, bellman_min, OmegaPoint, Which};
use crate::special::{pow_pos, ExponentParams};

/// A point of `Xi = { y : y3 >= 0, |y1 - y2|^p <= y3 }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiPoint {
    pub y1: f64,
    pub y2: f64,
    pub y3: f64,
}

impl XiPoint {
    pub fn new(y1: f64, y2: f64, y3: f64) -> Self {
        XiPoint { y1, y2, y3 }
    }

    pub fn is_in_domain(&self, params: &ExponentParams) -> bool {
        self.y3 >= 0.0
            && pow_pos((self.y1 - self.y2).abs(), params.p()) <= self.y3 + 1e-12 * self.y3.max(1.0)
    }

    /// Membership in the reduced domain `Xi_+`: `y1 >= 0`,
    /// `-y1 <= y2 <= y1`.
    pub fn is_in_reduced_domain(&self, params: &ExponentParams) -> bool {
        self.y1 >= 0.0 && self.y2.abs() <= self.y1 && self.is_in_domain(params)
    }
}

/// `y1 = (x2+x1)/2, y2 = (x2-x1)/2, y3 = x3`.
pub fn to_xi(x: &OmegaPoint) -> XiPoint {
    XiPoint::new(0.5 * (x.x2 + x.x1), 0.5 * (x.x2 - x.x1), x.x3)
}

/// Inverse of [`to_xi`]: `x1 = y1-y2, x2 = y1+y2, x3 = y3`.
pub fn to_omega(y: &XiPoint) -> OmegaPoint {
    OmegaPoint::new(y.y1 - y.y2, y.y1 + y.y2, y.y3)
}

/// The five chord geometries of the case analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseId {
    /// Vertical chords (parallel to the `y3` axis); the linear-branch
    /// closed form in the solver covers these.
    C2Vertical,
    /// Ends on `y2 = y1`, degenerate `(y1,y3)` block. Rejected.
    C31,
    /// Ends on `y2 = -y1`, degenerate `(y1,y3)` block. Rejected.
    C41,
    /// Ends on `y2 = y1`, degenerate `(y2,y3)` block. Gives `B_max` for
    /// p > 2 and `B_min` for p < 2.
    C32,
    /// Ends on `y2 = -y1`, degenerate `(y2,y3)` block. Gives `B_min` for
    /// p > 2 and `B_max` for p < 2.
    C42,
}

impl CaseId {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseId::C2Vertical => "c2_vertical",
            CaseId::C31 => "c3_1",
            CaseId::C41 => "c4_1",
            CaseId::C32 => "c3_2",
            CaseId::C42 => "c4_2",
        }
    }
}

/// An extremal-trajectory chord through a point of `Xi_+`.
///
/// `u` is the boundary-end `y2`-coordinate for cases `3_2`/`4_2` (the end
/// `U = (y1, u, (y1-u)^p)` lies on the parabola), `v` the boundary-end
/// `y1`-coordinate for `3_1`/`4_1`, and `w` the `y3`-coordinate of the end
/// on the symmetry plane. Vertical chords carry none of them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryChord {
    pub case_id: CaseId,
    pub omega: f64,
    pub u: Option<f64>,
    pub v: Option<f64>,
    pub w: Option<f64>,
}

/// `G(z1, z2) = (z1+z2)^(p-1) [z1 - (p-1) z2]` on the half-plane
/// `z1 + z2 >= 0`.
fn g_half_plane(z1: f64, z2: f64, p: f64) -> f64 {
    pow_pos(z1 + z2, p - 1.0) * (z1 - (p - 1.0) * z2)
}

/// Increasing/decreasing 1D bracketed bisection, 200 halvings.
fn bisect(mut lo: f64, mut hi: f64, increasing: bool, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let below = f(mid) < 0.0;
        if below == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn sector_check(y: &XiPoint, params: &ExponentParams, case_id: CaseId) -> Result<()> {
    let p = params.p();
    if !y.is_in_reduced_domain(params) {
        return Err(Error::Sector("point not in the reduced domain"));
    }
    // the symmetry-plane ends y2 = +-y1 are included (the chord through
    // such a point is the one it terminates); the gluing planes are not
    let ok = match case_id {
        CaseId::C2Vertical => true,
        CaseId::C32 => y.y1 > 0.0 && y.y2 > (p - 2.0) / p * y.y1 && y.y2 <= y.y1,
        CaseId::C42 => y.y1 > 0.0 && y.y2 >= -y.y1 && y.y2 < (2.0 - p) / p * y.y1,
        CaseId::C31 => y.y2 > 0.0 && y.y1 > y.y2,
        CaseId::C41 => y.y2 < 0.0 && y.y1 > -y.y2,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Sector(case_id.as_str()))
    }
}

/// Solves the case equation at `y` and returns `omega` (cases `3_2`,
/// `4_2`, `3_1`; case `4_1` may legitimately have no root).
fn case_omega(y: &XiPoint, params: &ExponentParams, case_id: CaseId) -> Result<f64> {
    let p = params.p();
    let (x1, x2) = (y.y1 - y.y2, y.y1 + y.y2);
    match case_id {
        CaseId::C32 => {
            // (w+1)^(p-1) (w-p+1) = G(x2, x1)/y3, root above p-1
            let target = g_half_plane(x2, x1, p) / y.y3;
            let mut hi = p; // > p-1
            while g_half_plane(hi, 1.0, p) < target {
                hi *= 2.0;
            }
            Ok(bisect(p - 1.0, hi, true, |w| {
                g_half_plane(w, 1.0, p) - target
            }))
        }
        CaseId::C42 => {
            // (w+1)^(p-1) (1-(p-1)w) = G(x1, x2)/y3, root in (0, p'-1)
            let target = g_half_plane(x1, x2, p) / y.y3;
            Ok(bisect(0.0, params.p_conj() - 1.0, false, |w| {
                g_half_plane(1.0, w, p) - target
            }))
        }
        CaseId::C31 => {
            // (w-1)^(p-1) (w+p-1) = G(x2, -x1)/y3, root above 1
            let target = g_half_plane(x2, -x1, p) / y.y3;
            let mut hi = 2.0;
            while g_half_plane(hi, -1.0, p) < target {
                hi *= 2.0;
            }
            Ok(bisect(1.0, hi, true, |w| g_half_plane(w, -1.0, p) - target))
        }
        CaseId::C41 => {
            // (1-w)^(p-1) (1+(p-1)w) = G(x1, -x2)/y3 on (0, 1); the left
            // side decreases from 1 to 0, so targets >= 1 have no root.
            let target = g_half_plane(x1, -x2, p) / y.y3;
            if target >= 1.0 {
                return Err(Error::NoRoot("case 4_1 equation"));
            }
            Ok(bisect(0.0, 1.0, false, |w| {
                g_half_plane(1.0, -w, p) - target
            }))
        }
        CaseId::C2Vertical => Err(Error::Sector("vertical chords carry no omega")),
    }
}

/// The extremal chord of `case_id` through `y`.
///
/// For `3_2`/`4_2` the boundary end is `U = (y1, u, (y1-u)^p)` with
/// `u = (omega-1)/(omega+1) y1`; for `3_1`/`4_1` it is
/// `V = (v, y2, (v-y2)^p)` with `v = (omega+1)/(omega-1) y2`. The other
/// end sits on the symmetry plane at height `w`.
pub fn chord(y: &XiPoint, params: &ExponentParams, case_id: CaseId) -> Result<TrajectoryChord> {
    sector_check(y, params, case_id)?;
    if case_id == CaseId::C2Vertical {
        return Ok(TrajectoryChord {
            case_id,
            omega: f64::NAN,
            u: None,
            v: None,
            w: None,
        });
    }
    let p = params.p();
    let omega = case_omega(y, params, case_id)?;
    match case_id {
        CaseId::C32 | CaseId::C42 => {
            let u = (omega - 1.0) / (omega + 1.0) * y.y1;
            let u3 = pow_pos((y.y1 - u).abs(), p);
            // extend U -> y to the symmetry plane y2 = +-y1
            let plane = if case_id == CaseId::C32 { y.y1 } else { -y.y1 };
            let tau = (plane - u) / (y.y2 - u);
            let w = u3 + tau * (y.y3 - u3);
            Ok(TrajectoryChord {
                case_id,
                omega,
                u: Some(u),
                v: None,
                w: Some(w),
            })
        }
        CaseId::C31 | CaseId::C41 => {
            let v = (omega + 1.0) / (omega - 1.0) * y.y2;
            let v3 = pow_pos((v - y.y2).abs(), p);
            let plane = y.y2.abs();
            let tau = (plane - v) / (y.y1 - v);
            let w = v3 + tau * (y.y3 - v3);
            Ok(TrajectoryChord {
                case_id,
                omega,
                u: None,
                v: Some(v),
                w: Some(w),
            })
        }
        CaseId::C2Vertical => unreachable!(),
    }
}

/// Candidate value `M(y) = omega^p y3` of the rejected cases `3_1`/`4_1`.
///
/// The candidate exists wherever the case equation has a root (for `4_1`
/// it may not; that is reported as [`Error::NoRoot`], not a failure). Its
/// `(y2,y3)` Hessian minor is strictly negative at generic points, which
/// is exactly why the case analysis rejects it.
pub fn rejected_case_solution(
    y: &XiPoint,
    params: &ExponentParams,
    case_id: CaseId,
) -> Result<f64> {
    match case_id {
        CaseId::C31 | CaseId::C41 => {
            sector_check(y, params, case_id)?;
            let omega = case_omega(y, params, case_id)?;
            Ok(pow_pos(omega, params.p()) * y.y3)
        }
        _ => Err(Error::Domain(format!(
            "rejected_case_solution handles cases 3_1/4_1 only, got {}",
            case_id.as_str()
        ))),
    }
}

/// `Phi`, its first two derivatives and the closed form of
/// `(p-1) Phi' - omega Phi''` for one chord case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiCase {
    pub phi: f64,
    pub dphi: f64,
    pub d2phi: f64,
    /// `(p-1) Phi' - omega Phi''`; its sign is `-sign(p-2)` in all cases.
    pub identity_rhs: f64,
}

/// Per-case `Phi(omega)` and the bracket identity of the sign analysis.
///
/// Valid ranges: `omega > 1` for `3_1`, `0 < omega < 1` for `4_1`,
/// `omega > 0` for `3_2` and `4_2`.
pub fn phi_case(case_id: CaseId, omega: f64, params: &ExponentParams) -> Result<PhiCase> {
    let p = params.p();
    let range_ok = match case_id {
        CaseId::C31 => omega > 1.0,
        CaseId::C41 => omega > 0.0 && omega < 1.0,
        CaseId::C32 | CaseId::C42 => omega > 0.0,
        CaseId::C2Vertical => false,
    };
    if !range_ok || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "omega = {omega} outside the valid range of case {}",
            case_id.as_str()
        )));
    }
    let c = p * (p - 1.0) * (p - 2.0);
    Ok(match case_id {
        CaseId::C31 => {
            let s = omega - 1.0;
            PhiCase {
                phi: pow_pos(s, p - 1.0) * (omega + p - 1.0),
                dphi: p * pow_pos(s, p - 2.0) * (omega + p - 2.0),
                d2phi: p * (p - 1.0) * pow_pos(s, p - 3.0) * (omega + p - 3.0),
                identity_rhs: -c * pow_pos(s, p - 3.0),
            }
        }
        CaseId::C41 => {
            let s = 1.0 - omega;
            PhiCase {
                phi: pow_pos(s, p - 1.0) * (1.0 + (p - 1.0) * omega),
                dphi: -p * (p - 1.0) * omega * pow_pos(s, p - 2.0),
                d2phi: -p * (p - 1.0) * pow_pos(s, p - 3.0) * (1.0 - (p - 1.0) * omega),
                identity_rhs: -c * omega * pow_pos(s, p - 3.0),
            }
        }
        CaseId::C32 => {
            let s = omega + 1.0;
            PhiCase {
                phi: pow_pos(s, p - 1.0) * (omega - p + 1.0),
                dphi: p * pow_pos(s, p - 2.0) * (omega - p + 2.0),
                d2phi: p * (p - 1.0) * pow_pos(s, p - 3.0) * (omega - p + 3.0),
                identity_rhs: -c * pow_pos(s, p - 3.0),
            }
        }
        CaseId::C42 => {
            let s = omega + 1.0;
            PhiCase {
                phi: pow_pos(s, p - 1.0) * (1.0 - (p - 1.0) * omega),
                dphi: -p * (p - 1.0) * omega * pow_pos(s, p - 2.0),
                d2phi: -p * (p - 1.0) * pow_pos(s, p - 3.0) * (1.0 + (p - 1.0) * omega),
                identity_rhs: -c * omega * pow_pos(s, p - 3.0),
            }
        }
        CaseId::C2Vertical => unreachable!(),
    })
}

/// Finite-difference Hessian data of `M(y) = B(x(y))` at one point.
///
/// Minors are Richardson-extrapolated from steps `h` and `h/2`; the raw
/// pairs are kept so callers can watch the `O(h^2)` truncation decay of
/// the degenerate minor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianReport {
    /// `M11 M33 - M13^2`, extrapolated.
    pub d1: f64,
    /// `M22 M33 - M23^2`, extrapolated.
    pub d2: f64,
    pub m11: f64,
    pub m22: f64,
    pub m33: f64,
    pub m13: f64,
    pub m23: f64,
    pub d1_coarse: f64,
    pub d1_fine: f64,
    pub d2_coarse: f64,
    pub d2_fine: f64,
    pub step: f64,
}

#[allow(clippy::type_complexity)]
fn raw_minors(
    y: &XiPoint,
    h: f64,
    eval: &dyn Fn(f64, f64, f64) -> f64,
) -> (f64, f64, f64, f64, f64, f64, f64) {
    let m = |d1: f64, d2: f64, d3: f64| eval(y.y1 + d1, y.y2 + d2, y.y3 + d3);
    let c = m(0.0, 0.0, 0.0);
    let hh = h * h;
    let m11 = (m(h, 0.0, 0.0) - 2.0 * c + m(-h, 0.0, 0.0)) / hh;
    let m22 = (m(0.0, h, 0.0) - 2.0 * c + m(0.0, -h, 0.0)) / hh;
    let m33 = (m(0.0, 0.0, h) - 2.0 * c + m(0.0, 0.0, -h)) / hh;
    let m13 = (m(h, 0.0, h) - m(h, 0.0, -h) - m(-h, 0.0, h) + m(-h, 0.0, -h)) / (4.0 * hh);
    let m23 = (m(0.0, h, h) - m(0.0, h, -h) - m(0.0, -h, h) + m(0.0, -h, -h)) / (4.0 * hh);
    (
        m11 * m33 - m13 * m13,
        m22 * m33 - m23 * m23,
        m11,
        m22,
        m33,
        m13,
        m23,
    )
}

fn hessian_from_eval(y: &XiPoint, h: f64, eval: &dyn Fn(f64, f64, f64) -> f64) -> HessianReport {
    let (d1c, d2c, _, _, _, _, _) = raw_minors(y, h, eval);
    let (d1f, d2f, m11, m22, m33, m13, m23) = raw_minors(y, 0.5 * h, eval);
    HessianReport {
        d1: (4.0 * d1f - d1c) / 3.0,
        d2: (4.0 * d2f - d2c) / 3.0,
        m11,
        m22,
        m33,
        m13,
        m23,
        d1_coarse: d1c,
        d1_fine: d1f,
        d2_coarse: d2c,
        d2_fine: d2f,
        step: h,
    }
}

/// Central finite-difference Hessian minors of the Bellman solution in
/// the `y` coordinates, at the default step `h = 1e-4 (1 + |y|)`.
///
/// The point must be strictly interior and at distance at least `10 h`
/// from the non-smoothness sets (the planes `x1 = 0`, `x2 = 0`, the
/// branch cone, and the boundary `x3 = |x1|^p`); otherwise
/// [`Error::StepSize`] is returned.
pub fn hessian_check(
    x: &OmegaPoint,
    params: &ExponentParams,
    which: Which,
) -> Result<HessianReport> {
    hessian_check_with_step(x, params, which, 1e-4)
}

/// [`hessian_check`] with an explicit relative step factor (the absolute
/// step is `factor * (1 + |y|)`). Larger steps keep the `O(h^2)`
/// truncation of the degenerate minor above the solver's rounding floor,
/// which is what the Richardson-decay diagnostics need.
pub fn hessian_check_with_step(
    x: &OmegaPoint,
    params: &ExponentParams,
    which: Which,
    step_factor: f64,
) -> Result<HessianReport> {
    let p = params.p();
    let ps = params.p_star();
    let y = to_xi(x);
    let h = step_factor * (1.0 + (y.y1 * y.y1 + y.y2 * y.y2 + y.y3 * y.y3).sqrt());
    let margin = 10.0 * h;

    let (a1, a2) = (x.x1.abs(), x.x2.abs());
    if a1 <= margin || a2 <= margin {
        return Err(Error::StepSize(format!(
            "point within {margin:e} of the planes x1 = 0 or x2 = 0"
        )));
    }
    if x.x3 - pow_pos(a1 + margin, p) <= margin {
        return Err(Error::StepSize(format!(
            "point within {margin:e} of the boundary x3 = |x1|^p"
        )));
    }
    let cone_dist = match which {
        Which::Max => (a2 - (ps - 1.0) * a1).abs(),
        Which::Min => (a1 - (ps - 1.0) * a2).abs(),
    };
    if cone_dist <= margin * (1.0 + (ps - 1.0)) {
        return Err(Error::StepSize(format!(
            "point within {margin:e} of the gluing cone"
        )));
    }

    let eval = move |y1: f64, y2: f64, y3: f64| -> f64 {
        let pt = to_omega(&XiPoint::new(y1, y2, y3));
        match which {
            Which::Max => {
                bellman_max(&pt, params)
                    .expect("stencil point in domain")
                    .value
            }
            Which::Min => {
                bellman_min(&pt, params)
                    .expect("stencil point in domain")
                    .value
            }
        }
    };
    Ok(hessian_from_eval(&y, h, &eval))
}

/// Finite-difference Hessian of a rejected-case candidate at `y`.
pub fn hessian_check_rejected(
    y: &XiPoint,
    params: &ExponentParams,
    case_id: CaseId,
) -> Result<HessianReport> {
    let h = 1e-4 * (1.0 + (y.y1 * y.y1 + y.y2 * y.y2 + y.y3 * y.y3).sqrt());
    // make sure the whole stencil stays inside the case sector
    for (d1, d2, d3) in [
        (h, 0.0, h),
        (-h, 0.0, -h),
        (0.0, h, h),
        (0.0, -h, -h),
        (0.0, 0.0, 0.0),
    ] {
        let shifted = XiPoint::new(y.y1 + d1, y.y2 + d2, y.y3 + d3);
        sector_check(&shifted, params, case_id)?;
        rejected_case_solution(&shifted, params, case_id)?;
    }
    let eval = move |y1: f64, y2: f64, y3: f64| -> f64 {
        rejected_case_solution(&XiPoint::new(y1, y2, y3), params, case_id)
            .expect("stencil point solvable")
    };
    Ok(hessian_from_eval(y, h, &eval))
}

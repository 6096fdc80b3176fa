//! Closed-form evaluation of the named scalar functions: exponent
//! constants, the implicit-equation kernel `f_p` and its partials, the
//! gluing function `g_p`, Burkholder's `u_p`, the obstacle `h_c`, the
//! counterexample weight `lambda_p`, and the reduced functions
//! `phi_max` / `phi_min`.
//!
//! Everything here is pure and stateless; binary64 throughout.

use crate::error::{Error, Result};

/// The exponent `p` together with its derived constants.
///
/// `p_conj = p/(p-1)`, `p_star = max(p, p_conj)` and
/// `beta = (p_star - 1)^p`, the sharp constant of the martingale
/// transform inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentParams {
    p: f64,
    p_conj: f64,
    p_star: f64,
    beta: f64,
}

impl ExponentParams {
    /// Builds the constant pack for an exponent `1 < p < inf`.
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::Domain(format!(
                "exponent must satisfy 1 < p < inf, got {p}"
            )));
        }
        let p_conj = p / (p - 1.0);
        let p_star = p.max(p_conj);
        Ok(ExponentParams {
            p,
            p_conj,
            p_star,
            beta: (p_star - 1.0).powf(p),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Conjugate exponent `p' = p/(p-1)`.
    pub fn p_conj(&self) -> f64 {
        self.p_conj
    }

    /// `p* = max(p, p')`.
    pub fn p_star(&self) -> f64 {
        self.p_star
    }

    /// Sharp constant `beta = (p* - 1)^p`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Scalar coefficient `p (1 - 1/p*)^(p-1)` of the product branch,
    /// chosen so that `f_p` is C^1 across its cone.
    pub fn chord_coeff(&self) -> f64 {
        self.p * (1.0 - 1.0 / self.p_star).powf(self.p - 1.0)
    }

    /// True when the product branch of `f_p` occupies the side
    /// `z1 >= (p*-1) z2` of the cone. This holds for p >= 2; for p < 2 the
    /// two branch regions trade places (the chord solutions of the
    /// degenerate-Hessian equation live on the other side of the cone, and
    /// the opposite assignment breaks zigzag concavity of the solutions).
    pub(crate) fn chord_on_upper_side(&self) -> bool {
        self.p >= 2.0
    }
}

/// Free-function form of [`ExponentParams::new`].
pub fn exponent_params(p: f64) -> Result<ExponentParams> {
    ExponentParams::new(p)
}

/// A point of the reduced two-variable plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub x1: f64,
    pub x2: f64,
}

impl PlanePoint {
    pub fn new(x1: f64, x2: f64) -> Self {
        PlanePoint { x1, x2 }
    }
}

/// `b^e` for `b >= 0`, with `0^e = 0` for positive exponents.
#[inline]
pub(crate) fn pow_pos(base: f64, e: f64) -> f64 {
    debug_assert!(base >= 0.0, "pow_pos requires a nonnegative base");
    if base == 0.0 {
        0.0
    } else {
        base.powf(e)
    }
}

fn check_quadrant(z1: f64, z2: f64) -> Result<()> {
    if !(z1.is_finite() && z2.is_finite()) || z1 < 0.0 || z2 < 0.0 {
        return Err(Error::Domain(format!(
            "arguments must lie in the closed quadrant, got ({z1}, {z2})"
        )));
    }
    Ok(())
}

/// Power-difference branch of `f_p`: `z1^p - (p*-1)^p z2^p`.
pub(crate) fn f_p_power_branch(z1: f64, z2: f64, params: &ExponentParams) -> f64 {
    pow_pos(z1, params.p) - params.beta * pow_pos(z2, params.p)
}

/// Product branch of `f_p`:
/// `p (1-1/p*)^(p-1) (z1+z2)^(p-1) [z1 - (p*-1) z2]`.
pub(crate) fn f_p_chord_branch(z1: f64, z2: f64, params: &ExponentParams) -> f64 {
    params.chord_coeff() * pow_pos(z1 + z2, params.p - 1.0) * (z1 - (params.p_star - 1.0) * z2)
}

#[inline]
pub(crate) fn f_p_raw(z1: f64, z2: f64, params: &ExponentParams) -> f64 {
    let upper = z1 >= (params.p_star - 1.0) * z2;
    if upper == params.chord_on_upper_side() {
        f_p_chord_branch(z1, z2, params)
    } else {
        f_p_power_branch(z1, z2, params)
    }
}

/// The two-branch kernel of the implicit Bellman equations, extended by
/// continuity to the closed quadrant.
///
/// Both branches vanish on the cone `z1 = (p*-1) z2` and the gluing is
/// C^1. `f_p` is strictly increasing in `z1` and strictly decreasing in
/// `z2`, which is what makes the implicit equations uniquely solvable.
pub fn f_p(z1: f64, z2: f64, params: &ExponentParams) -> Result<f64> {
    check_quadrant(z1, z2)?;
    Ok(f_p_raw(z1, z2, params))
}

#[inline]
pub(crate) fn f_p_partials_raw(z1: f64, z2: f64, params: &ExponentParams) -> (f64, f64) {
    if z1 == 0.0 && z2 == 0.0 {
        return (0.0, 0.0);
    }
    let p = params.p;
    let ps = params.p_star;
    let upper = z1 >= (ps - 1.0) * z2;
    if upper == params.chord_on_upper_side() {
        let k = params.chord_coeff();
        let s = pow_pos(z1 + z2, p - 2.0);
        (
            k * s * (p * z1 - ((p - 1.0) * (ps - 1.0) - 1.0) * z2),
            -k * s * ((ps - p) * z1 + p * (ps - 1.0) * z2),
        )
    } else {
        (
            p * pow_pos(z1, p - 1.0),
            -params.beta * p * pow_pos(z2, p - 1.0),
        )
    }
}

/// First partial derivatives of [`f_p`].
///
/// Continuous across the cone and at the origin, where both vanish;
/// positive in `z1` and negative in `z2` away from the axes.
pub fn f_p_partials(z1: f64, z2: f64, params: &ExponentParams) -> Result<(f64, f64)> {
    check_quadrant(z1, z2)?;
    Ok(f_p_partials_raw(z1, z2, params))
}

pub(crate) fn g_p_power_branch(z1: f64, z2: f64, params: &ExponentParams) -> f64 {
    let p = params.p;
    pow_pos(z1, p) - (p - 1.0).powf(p) * pow_pos(z2, p)
}

pub(crate) fn g_p_chord_branch(z1: f64, z2: f64, params: &ExponentParams) -> f64 {
    let p = params.p;
    pow_pos(z1 + z2, p - 1.0) * (z1 - (p - 1.0) * z2)
}

#[inline]
pub(crate) fn g_p_raw(z1: f64, z2: f64, params: &ExponentParams) -> f64 {
    if z1 <= (params.p - 1.0) * z2 {
        g_p_power_branch(z1, z2, params)
    } else {
        g_p_chord_branch(z1, z2, params)
    }
}

/// The glued case function on the quadrant, with its break on the cone
/// `z1 = (p-1) z2` (note: `p`, not `p*`).
///
/// Both branches vanish on the break, so `g_p` is continuous there; unlike
/// `f_p` it carries no extra scalar coefficients and is not C^1 (the
/// one-sided `z1`-slopes differ by the factor `(p-1)^(p-1)` vs `p^(p-2)`).
pub fn g_p(z1: f64, z2: f64, params: &ExponentParams) -> Result<f64> {
    check_quadrant(z1, z2)?;
    Ok(g_p_raw(z1, z2, params))
}

/// Burkholder's function
/// `u_p(x) = p (1-1/p*)^(p-1) (|x1|+|x2|)^(p-1) (|x2| - (p*-1)|x1|)`.
pub fn u_p(pt: PlanePoint, params: &ExponentParams) -> f64 {
    let a = pt.x1.abs();
    let b = pt.x2.abs();
    params.chord_coeff() * pow_pos(a + b, params.p - 1.0) * (b - (params.p_star - 1.0) * a)
}

/// The obstacle `h_c(x) = |x2|^p - c |x1|^p`, `c > 0`.
///
/// `c = beta` gives `h_max`, `c = 1/beta` gives `h_min`.
pub fn h_c(pt: PlanePoint, c: f64, params: &ExponentParams) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Domain(format!("h_c needs c > 0, got {c}")));
    }
    Ok(pow_pos(pt.x2.abs(), params.p) - c * pow_pos(pt.x1.abs(), params.p))
}

/// Weight of the two-scale counterexample perturbation:
///
/// `lambda_p(a) = (1/8)[(1+2a)^p + (1-2a)^p] + 3/4 - (1/2)[(1+a)^p + (1-a)^p]`.
///
/// The 1/2 on the last bracket makes `lambda_2 = lambda_3 = 0` identically
/// and matches the Taylor head `p(p-1)(p-2)(p-3) a^4 / 8`; see the module
/// tests for the simulator identity that pins this form down.
pub fn lambda_p(alpha: f64, params: &ExponentParams) -> Result<f64> {
    if !alpha.is_finite() || !(0.0..0.5).contains(&alpha) {
        return Err(Error::Domain(format!(
            "lambda_p needs 0 <= alpha < 1/2, got {alpha}"
        )));
    }
    let p = params.p;
    Ok(
        0.125 * ((1.0 + 2.0 * alpha).powf(p) + (1.0 - 2.0 * alpha).powf(p)) + 0.75
            - 0.5 * ((1.0 + alpha).powf(p) + (1.0 - alpha).powf(p)),
    )
}

/// Reduced Bellman function of the upper problem:
/// `phi_max(x1, x2) = f_p(|x2|, |x1|)`.
///
/// It is the least zigzag-concave majorant of `h_max` and coincides with
/// `u_p` exactly on the product-branch side of the cone
/// (`|x2| >= (p*-1)|x1|` for p >= 2, the mirrored region for p < 2).
pub fn phi_max(pt: PlanePoint, params: &ExponentParams) -> f64 {
    f_p_raw(pt.x2.abs(), pt.x1.abs(), params)
}

/// Reduced Bellman function of the lower problem:
/// `phi_min(x1, x2) = -beta^{-1} f_p(|x1|, |x2|)`, the greatest
/// zigzag-convex minorant of `h_min`.
pub fn phi_min(pt: PlanePoint, params: &ExponentParams) -> f64 {
    -f_p_raw(pt.x1.abs(), pt.x2.abs(), params) / params.beta
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: f64) -> ExponentParams {
        ExponentParams::new(p).unwrap()
    }

    #[test]
    fn exponent_params_examples() {
        let e = params(2.0);
        assert_eq!(e.p_conj(), 2.0);
        assert_eq!(e.p_star(), 2.0);
        assert_eq!(e.beta(), 1.0);

        let e = params(4.0);
        assert!((e.p_conj() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(e.p_star(), 4.0);
        assert!((e.beta() - 81.0).abs() < 1e-12);

        let e = params(4.0 / 3.0);
        assert!((e.p_conj() - 4.0).abs() < 1e-14);
        assert!((e.p_star() - 4.0).abs() < 1e-14);
        assert!((e.beta() - 3f64.powf(4.0 / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn exponent_params_rejects_bad_p() {
        assert!(ExponentParams::new(1.0).is_err());
        assert!(ExponentParams::new(0.5).is_err());
        assert!(ExponentParams::new(f64::NAN).is_err());
        assert!(ExponentParams::new(f64::INFINITY).is_err());
    }

    #[test]
    fn conjugate_identity() {
        for &p in &[1.1, 4.0 / 3.0, 1.5, 2.0, 2.5, 3.0, 8.0, 40.0] {
            let e = params(p);
            assert!((1.0 / e.p() + 1.0 / e.p_conj() - 1.0).abs() <= 1e-14);
            assert!(e.p_star() >= 2.0);
            assert!(e.beta() >= 1.0);
        }
        assert_eq!(params(2.0).p_star(), 2.0);
        assert_eq!(params(2.0).beta(), 1.0);
    }

    #[test]
    fn f_p_examples() {
        let e2 = params(2.0);
        assert!((f_p(3.0, 1.0, &e2).unwrap() - 8.0).abs() < 1e-14);

        // both branches vanish on the cone
        for &p in &[1.3, 1.5, 2.0, 2.5, 3.0, 4.0] {
            let e = params(p);
            for &z in &[0.1, 1.0, 7.5] {
                let v = f_p((e.p_star() - 1.0) * z, z, &e).unwrap();
                assert!(v.abs() < 1e-10 * z.powf(p).max(1.0), "p={p} z={z} v={v}");
            }
        }

        // p=3: f(1,0) lies on the product branch
        let e3 = params(3.0);
        assert!((f_p(1.0, 0.0, &e3).unwrap() - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn f_p_rejects_negative() {
        let e = params(3.0);
        assert!(f_p(-1.0, 1.0, &e).is_err());
        assert!(f_p(1.0, -1.0, &e).is_err());
        assert!(f_p_partials(-1.0, 0.0, &e).is_err());
        assert!(g_p(-1.0, 0.0, &e).is_err());
    }

    #[test]
    fn f_p_partials_examples() {
        let e2 = params(2.0);
        assert_eq!(f_p_partials(0.0, 0.0, &e2).unwrap(), (0.0, 0.0));
        let (d1, d2) = f_p_partials(3.0, 1.0, &e2).unwrap();
        assert!((d1 - 6.0).abs() < 1e-14);
        assert!((d2 + 2.0).abs() < 1e-14);

        // one-sided formulas agree on the cone (C^1 gluing), p = 3 at (2, 1)
        let e3 = params(3.0);
        let k = e3.chord_coeff();
        let power = (3.0 * 2f64.powi(2), -8.0 * 3.0);
        let chord = (
            k * 3.0 * (3.0 * 2.0 - 3.0),
            -k * 3.0 * (0.0 + 3.0 * 2.0 * 1.0),
        );
        assert!((power.0 - chord.0).abs() < 1e-12);
        assert!((power.1 - chord.1).abs() < 1e-12);

        // and both match central differences of f_p
        let h = 1e-6;
        let fd1 = (f_p_raw(2.0 + h, 1.0, &e3) - f_p_raw(2.0 - h, 1.0, &e3)) / (2.0 * h);
        let fd2 = (f_p_raw(2.0, 1.0 + h, &e3) - f_p_raw(2.0, 1.0 - h, &e3)) / (2.0 * h);
        assert!((fd1 - 12.0).abs() < 1e-5);
        assert!((fd2 + 24.0).abs() < 1e-4);
    }

    #[test]
    fn g_p_examples() {
        // both branches vanish on the break z1 = (p-1) z2
        for &p in &[1.5, 2.0, 3.0, 4.0] {
            let e = params(p);
            for &z in &[0.2, 1.0, 3.0] {
                assert!(g_p((p - 1.0) * z, z, &e).unwrap().abs() < 1e-12 * z.powf(p).max(1.0));
            }
        }
        // p=3, product branch: (w+1)^2 (w-2) for w >= 2
        let e3 = params(3.0);
        for &w in &[2.0, 2.5, 4.0] {
            assert!((g_p(w, 1.0, &e3).unwrap() - (w + 1.0).powi(2) * (w - 2.0)).abs() < 1e-12);
        }
        // p=2 at (3,1): both branches give 8
        let e2 = params(2.0);
        assert!((g_p_power_branch(3.0, 1.0, &e2) - 8.0).abs() < 1e-14);
        assert!((g_p_chord_branch(3.0, 1.0, &e2) - 8.0).abs() < 1e-14);
    }

    #[test]
    fn g_p_is_not_c1_at_the_break() {
        // the one-sided z1-slopes differ by p(p-1)^(p-1) vs p^(p-1)
        let e3 = params(3.0);
        let h = 1e-7;
        let left = (g_p_raw(2.0, 1.0, &e3) - g_p_raw(2.0 - h, 1.0, &e3)) / h;
        let right = (g_p_raw(2.0 + h, 1.0, &e3) - g_p_raw(2.0, 1.0, &e3)) / h;
        assert!((left - 12.0).abs() < 1e-4, "left slope {left}");
        assert!((right - 9.0).abs() < 1e-4, "right slope {right}");
    }

    #[test]
    fn u_p_examples() {
        let e3 = params(3.0);
        // vanishes where |x2| = (p*-1)|x1|
        assert!(u_p(PlanePoint::new(0.5, 1.0), &e3).abs() < 1e-15);
        assert!((u_p(PlanePoint::new(0.0, 1.0), &e3) - 4.0 / 3.0).abs() < 1e-15);
        // p=2 reduces to x2^2 - x1^2
        let e2 = params(2.0);
        assert!((u_p(PlanePoint::new(3.0, 5.0), &e2) - 16.0).abs() < 1e-12);
        // sign-flip symmetry
        for &(a, b) in &[(0.7, 1.9), (1.2, 0.3)] {
            let v = u_p(PlanePoint::new(a, b), &e3);
            assert_eq!(v, u_p(PlanePoint::new(-a, b), &e3));
            assert_eq!(v, u_p(PlanePoint::new(a, -b), &e3));
        }
    }

    #[test]
    fn h_c_examples() {
        let e3 = params(3.0);
        assert_eq!(h_c(PlanePoint::new(0.0, 0.0), 8.0, &e3).unwrap(), 0.0);
        assert!((h_c(PlanePoint::new(1.0, 2.0), 8.0, &e3).unwrap()).abs() < 1e-14);
        assert!(h_c(PlanePoint::new(1.0, 2.0), 0.0, &e3).is_err());
        assert!(h_c(PlanePoint::new(1.0, 2.0), -1.0, &e3).is_err());
        let e2 = params(2.0);
        assert!((h_c(PlanePoint::new(3.0, 1.0), 1.0, &e2).unwrap() + 8.0).abs() < 1e-14);
    }

    #[test]
    fn lambda_p_examples() {
        let e3 = params(3.0);
        let e2 = params(2.0);
        for i in 0..50 {
            let a = 0.4999 * (i as f64) / 49.0;
            assert!(lambda_p(a, &e3).unwrap().abs() < 1e-15, "lambda_3({a})");
            assert!(lambda_p(a, &e2).unwrap().abs() < 1e-15, "lambda_2({a})");
        }
        // Taylor head: p(p-1)(p-2)(p-3)/8 = 3 at p = 4 (lambda_4 is exactly
        // 3 a^4; the slack covers cancellation in the evaluated form)
        let e4 = params(4.0);
        let a = 1e-3;
        let lam = lambda_p(a, &e4).unwrap();
        assert!((lam - 3.0 * a.powi(4)).abs() < 1e-15, "lam={lam:e}");
        assert!(lambda_p(0.5, &e4).is_err());
        assert!(lambda_p(-0.01, &e4).is_err());
    }

    #[test]
    fn lambda_sign_law() {
        // sign(lambda_p) = sign((p-2)(p-3)) for small alpha
        for &p in &[1.5, 2.5, 3.5, 4.0] {
            let e = params(p);
            let expected = ((p - 2.0) * (p - 3.0)).signum();
            for &a in &[0.01, 0.03, 0.05] {
                let lam = lambda_p(a, &e).unwrap();
                assert_eq!(lam.signum(), expected, "p={p} a={a} lam={lam:e}");
            }
        }
    }

    #[test]
    fn phi_examples() {
        let e2 = params(2.0);
        let pt = PlanePoint::new(0.6, 1.7);
        let want = 1.7f64.powi(2) - 0.6f64.powi(2);
        assert!((phi_max(pt, &e2) - want).abs() < 1e-14);
        assert!((phi_min(pt, &e2) - want).abs() < 1e-14);

        let e3 = params(3.0);
        // on the cone |x2| = (p*-1)|x1| the majorant vanishes
        assert!(phi_max(PlanePoint::new(0.5, 1.0), &e3).abs() < 1e-14);
        // p=3 at (1, 0): power branch of f_3(0, 1)
        assert!((phi_max(PlanePoint::new(1.0, 0.0), &e3) + 8.0).abs() < 1e-13);
    }
}

//! Grid-based computation of least zigzag-concave majorants and greatest
//! zigzag-convex minorants on a square box, independent of every closed
//! form, together with the critical-constant search.
//!
//! Zigzag concavity is concavity along both diagonal line families
//! `x2 - x1 = const` and `x2 + x1 = const`; the envelope is the fixed
//! point of alternating 1D concave-hull sweeps over those lines, with the
//! boundary ring pinned to the chosen data. Sweeps only raise nodes
//! (lower them, for the minorant) and stay bounded by any pinned-boundary
//! interpolant, so the iteration converges monotonically.

use crate::error::{Error, Result};
use crate::special::{u_p, ExponentParams, PlanePoint};

/// Default convergence tolerance factor of the sweep driver.
pub const SWEEP_TOL: f64 = 1e-10;

/// Growth (relative, between consecutive ladder boxes) above which a
/// candidate constant is classified subcritical.
pub const GROWTH_THRESHOLD: f64 = 0.01;

/// Half-width of the dead band around the growth threshold; growth this
/// close to the threshold is reported as unclassifiable.
pub const GROWTH_DEAD_BAND: f64 = 1e-6;

/// A rectangular sample of a function on `[-L, L]^2` with an odd number
/// of nodes per axis, so the origin and the axes lie on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    half_width: f64,
    n: usize,
    values: Vec<f64>,
}

impl GridField {
    /// Samples `f` on the grid. `n` must be odd and at least 33.
    pub fn from_fn(half_width: f64, n: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::Domain(format!(
                "box half-width must be positive, got {half_width}"
            )));
        }
        if n < 33 || n % 2 == 0 {
            return Err(Error::Domain(format!(
                "grid size must be odd and >= 33, got {n}"
            )));
        }
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            let x1 = coord_of(half_width, n, i);
            for j in 0..n {
                let v = f(x1, coord_of(half_width, n, j));
                if !v.is_finite() {
                    return Err(Error::Domain(format!(
                        "sampler returned a non-finite value at ({x1}, {})",
                        coord_of(half_width, n, j)
                    )));
                }
                values.push(v);
            }
        }
        Ok(GridField {
            half_width,
            n,
            values,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    pub fn coord(&self, index: usize) -> f64 {
        coord_of(self.half_width, self.n, index)
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.n + j] = v;
    }

    /// Value at the grid node nearest to `(x1, x2)`; `None` outside the box.
    pub fn at_point(&self, x1: f64, x2: f64) -> Option<f64> {
        let l = self.half_width;
        if x1.abs() > l || x2.abs() > l {
            return None;
        }
        let i = ((x1 + l) / self.step()).round() as usize;
        let j = ((x2 + l) / self.step()).round() as usize;
        Some(self.value(i.min(self.n - 1), j.min(self.n - 1)))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.n - 1 || j == self.n - 1
    }
}

fn coord_of(half_width: f64, n: usize, index: usize) -> f64 {
    -half_width + 2.0 * half_width * index as f64 / (n - 1) as f64
}

/// One of the two diagonal grid-line families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalDirection {
    /// Lines of direction `(1, 1)`.
    Plus,
    /// Lines of direction `(1, -1)`.
    Minus,
}

/// Boundary handling of the fixed-point driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Pin the boundary ring to Burkholder's `u_p` (the `c`-scaled analog
    /// for general obstacles), a known zigzag-concave majorant.
    PinUp,
    /// Pin to the known closed form of the envelope (validation mode).
    PinClosedForm,
    /// Keep the boundary at the sampled obstacle values. The box-local
    /// envelope then underestimates near the boundary, which is exactly
    /// the behavior the critical-constant ladder classifies.
    PinSamples,
}

/// Replaces each value with the least concave majorant of its line
/// (`upper = true`) or the greatest convex minorant (`upper = false`).
/// The samples are equally spaced, so indices serve as abscissae. The
/// interpolation uses the symmetric weighted form, which is invariant
/// under traversal reversal.
fn hull_line(values: &mut [f64], upper: bool) -> f64 {
    let m = values.len();
    if m < 3 {
        return 0.0;
    }
    let sign = if upper { 1.0 } else { -1.0 };
    let v: Vec<f64> = values.iter().map(|&x| sign * x).collect();
    let mut hull: Vec<usize> = Vec::with_capacity(m);
    hull.push(0);
    for k in 1..m {
        while hull.len() >= 2 {
            let i = hull[hull.len() - 2];
            let j = hull[hull.len() - 1];
            // pop j when it lies on or below the chord i..k
            if (v[j] - v[i]) * (k - j) as f64 <= (v[k] - v[j]) * (j - i) as f64 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let mut change: f64 = 0.0;
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b > a + 1 {
            let inv = 1.0 / (b - a) as f64;
            for k in (a + 1)..b {
                let hv = ((b - k) as f64 * v[a] + (k - a) as f64 * v[b]) * inv;
                if hv > v[k] {
                    change = change.max(hv - v[k]);
                    values[k] = sign * hv;
                }
            }
        }
    }
    change
}

fn for_each_line(
    field: &mut GridField,
    direction: DiagonalDirection,
    mut per_line: impl FnMut(&mut Vec<(usize, usize)>, &mut Vec<f64>),
) {
    let n = field.n;
    let mut index = Vec::with_capacity(n);
    let mut line = Vec::with_capacity(n);
    match direction {
        DiagonalDirection::Plus => {
            for d in -(n as isize - 1)..=(n as isize - 1) {
                index.clear();
                line.clear();
                let i0 = d.max(0) as usize;
                let j0 = (-d).max(0) as usize;
                let m = n - d.unsigned_abs();
                for k in 0..m {
                    index.push((i0 + k, j0 + k));
                    line.push(field.value(i0 + k, j0 + k));
                }
                per_line(&mut index, &mut line);
                for (&(i, j), &v) in index.iter().zip(line.iter()) {
                    field.set(i, j, v);
                }
            }
        }
        DiagonalDirection::Minus => {
            for s in 0..(2 * n - 1) {
                index.clear();
                line.clear();
                let i0 = s.saturating_sub(n - 1);
                let j0 = s.min(n - 1);
                let m = j0 - i0 + 1;
                for k in 0..m {
                    index.push((i0 + k, j0 - k));
                    line.push(field.value(i0 + k, j0 - k));
                }
                per_line(&mut index, &mut line);
                for (&(i, j), &v) in index.iter().zip(line.iter()) {
                    field.set(i, j, v);
                }
            }
        }
    }
}

/// One hull sweep along every line of the chosen diagonal family, all
/// nodes free. Output dominates the input pointwise (is dominated, for
/// the minorant direction) and is concave (convex) along that family.
pub fn diagonal_concavify(field: &GridField, direction: DiagonalDirection) -> GridField {
    let mut out = field.clone();
    for_each_line(&mut out, direction, |_, line| {
        hull_line(line, true);
    });
    out
}

/// Convex mirror of [`diagonal_concavify`].
pub fn diagonal_convexify(field: &GridField, direction: DiagonalDirection) -> GridField {
    let mut out = field.clone();
    for_each_line(&mut out, direction, |_, line| {
        hull_line(line, false);
    });
    out
}

/// A converged envelope together with sweep diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeResult {
    pub field: GridField,
    pub sweeps: u32,
    pub residual: f64,
}

fn pin_values(
    sampler: &dyn Fn(f64, f64) -> f64,
    pin: Option<&dyn Fn(f64, f64) -> f64>,
    x1: f64,
    x2: f64,
) -> f64 {
    match pin {
        Some(f) => f(x1, x2),
        None => sampler(x1, x2),
    }
}

fn run_envelope(
    sampler: &dyn Fn(f64, f64) -> f64,
    pin: Option<&dyn Fn(f64, f64) -> f64>,
    half_width: f64,
    n: usize,
    max_sweeps: u32,
    tol: f64,
    upper: bool,
) -> Result<EnvelopeResult> {
    let mut field = GridField::from_fn(half_width, n, sampler)?;
    for i in 0..n {
        for j in 0..n {
            if field.is_boundary(i, j) {
                let v = pin_values(sampler, pin, field.coord(i), field.coord(j));
                if !v.is_finite() {
                    return Err(Error::Domain("non-finite boundary pin value".into()));
                }
                field.set(i, j, v);
            }
        }
    }
    let scale = field.values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));

    // When data and pins share the reflection symmetries, keep the iterates
    // exactly symmetric: the alternating sweep order itself is not
    // flip-equivariant at finite iteration count.
    let symmetric = {
        let n1 = field.n - 1;
        let mut sym = true;
        'outer: for i in 0..field.n {
            for j in 0..field.n {
                let v = field.value(i, j);
                if v != field.value(n1 - i, j) || v != field.value(i, n1 - j) {
                    sym = false;
                    break 'outer;
                }
            }
        }
        sym
    };

    let mut sweeps = 0u32;
    let mut residual = f64::INFINITY;
    while sweeps < max_sweeps {
        let before = field.values.clone();
        for direction in [DiagonalDirection::Plus, DiagonalDirection::Minus] {
            for_each_line(&mut field, direction, |index, line| {
                let _ = hull_line(line, upper);
                // restore pinned nodes
                for (pos, &(i, j)) in index.iter().enumerate() {
                    if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
                        line[pos] = before[i * n + j];
                    }
                }
            });
        }
        if symmetric {
            let n1 = n - 1;
            for i in 0..n {
                for j in 0..n {
                    let orbit = [
                        field.value(i, j),
                        field.value(n1 - i, j),
                        field.value(i, n1 - j),
                        field.value(n1 - i, n1 - j),
                    ];
                    let m = orbit
                        .into_iter()
                        .reduce(|a, b| if upper { a.max(b) } else { a.min(b) })
                        .unwrap();
                    field.set(i, j, m);
                }
            }
        }
        sweeps += 1;
        residual = field
            .values
            .iter()
            .zip(before.iter())
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        if residual < tol * scale {
            return Ok(EnvelopeResult {
                field,
                sweeps,
                residual,
            });
        }
    }
    Err(Error::SweepLimit { sweeps, residual })
}

/// Least zigzag-concave majorant of the sampled obstacle on the box,
/// with the boundary ring pinned to `pin` (or to the samples themselves
/// when `pin` is `None`).
pub fn least_zigzag_majorant(
    sampler: &dyn Fn(f64, f64) -> f64,
    pin: Option<&dyn Fn(f64, f64) -> f64>,
    half_width: f64,
    n: usize,
    max_sweeps: u32,
    tol: f64,
) -> Result<EnvelopeResult> {
    run_envelope(sampler, pin, half_width, n, max_sweeps, tol, true)
}

/// Greatest zigzag-convex minorant; mirror of [`least_zigzag_majorant`].
pub fn greatest_zigzag_minorant(
    sampler: &dyn Fn(f64, f64) -> f64,
    pin: Option<&dyn Fn(f64, f64) -> f64>,
    half_width: f64,
    n: usize,
    max_sweeps: u32,
    tol: f64,
) -> Result<EnvelopeResult> {
    run_envelope(sampler, pin, half_width, n, max_sweeps, tol, false)
}

/// The `c`-scaled majorant analog of `u_p`: `u_p((c/beta)^(1/p) x1, x2)`
/// dominates `h_c` everywhere.
pub fn u_p_scaled(c: f64, params: &ExponentParams) -> impl Fn(f64, f64) -> f64 + '_ {
    let s = (c / params.beta()).powf(1.0 / params.p());
    move |x1: f64, x2: f64| u_p(PlanePoint::new(s * x1, x2), params)
}

/// The growth statistic of the critical-constant search: the largest
/// relative increase of the h-pinned box envelope of `h_c` at
/// `test_point` between consecutive ladder boxes. Above-threshold growth
/// marks `c` subcritical (no global majorant exists, so box envelopes
/// diverge as the box grows).
pub fn ladder_growth(
    params: &ExponentParams,
    c: f64,
    box_ladder: &[(f64, usize)],
    test_point: PlanePoint,
) -> Result<f64> {
    let p = params.p();
    let sampler = move |x1: f64, x2: f64| x2.abs().powf(p) - c * x1.abs().powf(p);
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut prev: Option<f64> = None;
    for &(l, n) in box_ladder {
        let env = least_zigzag_majorant(&sampler, None, l, n, 100_000, SWEEP_TOL)?;
        let v = env
            .field
            .at_point(test_point.x1, test_point.x2)
            .ok_or_else(|| Error::Domain("test point outside a ladder box".into()))?;
        if let Some(pv) = prev {
            worst = worst.max((v - pv) / pv.abs().max(1.0));
        }
        prev = Some(v);
    }
    Ok(worst)
}

/// Smallest `c` admitting a zigzag-concave majorant of
/// `h_c = |x2|^p - c |x1|^p`, located by bisection on [`ladder_growth`].
/// Expected result: `beta`.
pub fn critical_constant(
    params: &ExponentParams,
    box_ladder: &[(f64, usize)],
    test_point: PlanePoint,
    tol_c: f64,
) -> Result<f64> {
    if box_ladder.len() < 2 {
        return Err(Error::Domain(
            "the box ladder needs at least two boxes".into(),
        ));
    }
    for pair in box_ladder.windows(2) {
        if pair[1].0 < 2.0 * pair[0].0 * (1.0 - 1e-12) {
            return Err(Error::Domain(
                "consecutive ladder boxes must grow by a factor >= 2".into(),
            ));
        }
    }
    if !(tol_c > 0.0) {
        return Err(Error::Domain(format!(
            "tol_c must be positive, got {tol_c}"
        )));
    }
    let smallest = box_ladder[0].0;
    if test_point.x1.abs() > smallest || test_point.x2.abs() > smallest {
        return Err(Error::Domain(
            "the test point must lie inside the smallest ladder box".into(),
        ));
    }

    let growth_of = |c: f64| ladder_growth(params, c, box_ladder, test_point);

    let mut lo = 0.25 * params.beta();
    let mut hi = 2.0 * params.beta();
    let mut last = (lo + hi) * 0.5;
    let mut last_growth = 0.0;
    while hi - lo > tol_c {
        let mid = 0.5 * (lo + hi);
        let growth = growth_of(mid)?;
        if growth > GROWTH_THRESHOLD {
            lo = mid;
        } else {
            hi = mid;
        }
        last = mid;
        last_growth = growth;
    }
    if (last_growth - GROWTH_THRESHOLD).abs() < GROWTH_DEAD_BAND {
        return Err(Error::AmbiguousClassification {
            c: last,
            growth: last_growth,
        });
    }
    Ok(0.5 * (lo + hi))
}

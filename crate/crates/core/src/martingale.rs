//! Dyadic step functions on `[0,1]`, their Haar analysis, admissible
//! pairs, seeded random martingale transforms, and the two-scale
//! counterexample pairs of the chord-rejection argument.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rng::seeded_rng;
use crate::solver::OmegaPoint;
use crate::special::ExponentParams;

/// Relative tolerance of the admissibility test.
pub const ADMISSIBILITY_TOL: f64 = 1e-12;

/// A function constant on each dyadic interval of generation `depth`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    depth: u32,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(depth: u32, values: Vec<f64>) -> Result<Self> {
        if values.len() != 1usize << depth {
            return Err(Error::Domain(format!(
                "depth {depth} needs {} values, got {}",
                1usize << depth,
                values.len()
            )));
        }
        Ok(StepFunction { depth, values })
    }

    pub fn constant(depth: u32, value: f64) -> Self {
        StepFunction {
            depth,
            values: vec![value; 1 << depth],
        }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `<|f|^p>` over `[0,1]`.
    pub fn abs_p_mean(&self, p: f64) -> f64 {
        self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>() / self.values.len() as f64
    }

    /// `<f^2>`, used by the Parseval check.
    pub fn square_mean(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64
    }
}

/// Haar coefficients indexed by (generation, position); generation `l`
/// holds the `2^l` coefficients of the intervals of length `2^-l`.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarDecomposition {
    pub mean: f64,
    pub levels: Vec<Vec<f64>>,
}

impl HaarDecomposition {
    /// Iterates `(generation, index, coefficient)` in breadth-first order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, usize, f64)> + '_ {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(l, cs)| cs.iter().enumerate().map(move |(k, &c)| (l as u32, k, c)))
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.levels
            .iter()
            .map(|cs| cs.iter().map(|c| c * c).sum::<f64>())
            .sum()
    }
}

/// Decomposes `f` into its mean and Haar coefficients
/// `c_I = (f, h_I) = sqrt(|I|) (avg_left - avg_right) / 2` for the
/// normalized Haar functions (positive on the left half).
pub fn haar_analysis(f: &StepFunction) -> HaarDecomposition {
    let mut means = f.values.clone();
    let mut levels: Vec<Vec<f64>> = Vec::with_capacity(f.depth as usize);
    for level in (0..f.depth).rev() {
        let sqrt_len = ((1u64 << level) as f64).recip().sqrt(); // sqrt(|I|)
        let mut coeffs = Vec::with_capacity(1 << level);
        let mut parent = Vec::with_capacity(1 << level);
        for k in 0..(1usize << level) {
            let left = means[2 * k];
            let right = means[2 * k + 1];
            parent.push(0.5 * (left + right));
            coeffs.push(0.5 * sqrt_len * (left - right));
        }
        levels.push(coeffs);
        means = parent;
    }
    levels.reverse();
    HaarDecomposition {
        mean: means[0],
        levels,
    }
}

/// Rebuilds the step function `mean + sum c_I h_I` at the given depth.
pub fn haar_synthesis(decomposition: &HaarDecomposition, depth: u32) -> Result<StepFunction> {
    if decomposition.levels.len() != depth as usize {
        return Err(Error::Domain(format!(
            "decomposition has {} levels, expected {depth}",
            decomposition.levels.len()
        )));
    }
    let mut means = vec![decomposition.mean];
    for (level, coeffs) in decomposition.levels.iter().enumerate() {
        let inv_sqrt_len = ((1u64 << level) as f64).sqrt(); // 1/sqrt(|I|)
        let mut next = Vec::with_capacity(means.len() * 2);
        for (k, &m) in means.iter().enumerate() {
            let d = coeffs[k] * inv_sqrt_len;
            next.push(m + d);
            next.push(m - d);
        }
        means = next;
    }
    StepFunction::new(depth, means)
}

/// A pair of step functions of equal depth; admissibility (equal absolute
/// Haar coefficients) is checked separately by [`admissibility_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct MartingalePair {
    pub f: StepFunction,
    pub g: StepFunction,
}

impl MartingalePair {
    pub fn new(f: StepFunction, g: StepFunction) -> Result<Self> {
        if f.depth != g.depth {
            return Err(Error::DepthMismatch {
                left: f.depth,
                right: g.depth,
            });
        }
        Ok(MartingalePair { f, g })
    }

    /// The averages `(<f>, <g>, <|f|^p>)` realized by the pair.
    pub fn point(&self, params: &ExponentParams) -> OmegaPoint {
        OmegaPoint::new(self.f.mean(), self.g.mean(), self.f.abs_p_mean(params.p()))
    }
}

/// Checks `||c_I(f)| - |c_I(g)|| <= tol * scale` over all dyadic `I` and
/// returns the largest violation.
pub fn admissibility_check(pair: &MartingalePair) -> Result<(bool, f64)> {
    if pair.f.depth != pair.g.depth {
        return Err(Error::DepthMismatch {
            left: pair.f.depth,
            right: pair.g.depth,
        });
    }
    let cf = haar_analysis(&pair.f);
    let cg = haar_analysis(&pair.g);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for ((_, _, a), (_, _, b)) in cf.iter().zip(cg.iter()) {
        worst = worst.max((a.abs() - b.abs()).abs());
        scale = scale.max(a.abs()).max(b.abs());
    }
    Ok((worst <= ADMISSIBILITY_TOL * scale, worst))
}

/// Builds the martingale transform of `f` with signs drawn from the
/// seeded generator, one draw per Haar coefficient in breadth-first
/// interval order; `g` keeps the mean of `f`. Deterministic given `seed`.
pub fn random_transform(f: &StepFunction, seed: u64) -> MartingalePair {
    let mut rng = seeded_rng(seed);
    let mut dec = haar_analysis(f);
    for level in dec.levels.iter_mut() {
        for c in level.iter_mut() {
            if rng.gen::<bool>() {
                *c = -*c;
            }
        }
    }
    let g = haar_synthesis(&dec, f.depth).expect("matching depth");
    MartingalePair { f: f.clone(), g }
}

/// Random step function: i.i.d. values uniform on `[-1, 1]`, then shifted
/// to the requested mean.
pub fn random_step_function(depth: u32, mean: f64, rng: &mut ChaCha8Rng) -> StepFunction {
    let n = 1usize << depth;
    let mut values: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let m = values.iter().sum::<f64>() / n as f64;
    for v in values.iter_mut() {
        *v += mean - m;
    }
    StepFunction { depth, values }
}

/// The three counterexample constructions of the chord-rejection proof.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropositionKind {
    /// `(x1 + a phi, x2 + a psi)` with `psi = phi - h_I`.
    PsiStandard,
    /// `(x1 + a psi, x2 + a phi)`: the perturbation moves to `f`.
    RolesSwapped,
    /// `(x1 + a phi, x2 + a psi3)` with `psi3 = phi + h_{I+}/sqrt(2)`,
    /// the modification that handles p = 3.
    P3Variant,
}

/// Values on the eight dyadic cells of generation 3.
const H_I: [f64; 8] = [1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0];
/// `phi_{1/8}`: same distribution as `h_I`, but `(phi, h_I) = 1/2`.
const PHI: [f64; 8] = [1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0, 1.0];
/// `psi = phi - h_I`.
const PSI: [f64; 8] = [0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, 2.0];
/// `psi3 = phi + h_{I+}/sqrt(2)`.
const PSI3: [f64; 8] = [1.0, 1.0, 1.0, -1.0, 0.0, 0.0, -2.0, 0.0];

fn shifted(base: f64, amplitude: f64, profile: &[f64; 8]) -> StepFunction {
    StepFunction {
        depth: 3,
        values: profile.iter().map(|&v| base + amplitude * v).collect(),
    }
}

/// The one-step chord pair `(x1 + a h_I, x2 + a h_I)` together with its
/// equal-averages perturbation.
///
/// Requires `x1 - 2a > 0` and `x2 - 2a > 0` (the perturbed profiles reach
/// amplitude `2a`, and the average identities need the arguments to stay
/// positive). Both returned pairs are admissible, `<|f~|^p> = <|f|^p>`
/// for the standard kind (equal distribution), and the average difference
/// identities of the counterexample argument hold exactly.
pub fn proposition_pair(
    kind: PropositionKind,
    x1: f64,
    x2: f64,
    a: f64,
    _params: &ExponentParams,
) -> Result<(MartingalePair, MartingalePair)> {
    if !(a > 0.0) || !a.is_finite() || x1 - 2.0 * a <= 0.0 || x2 - 2.0 * a <= 0.0 || a >= x2 {
        return Err(Error::Domain(format!(
            "need 0 < a with x1 - 2a > 0, x2 - 2a > 0, a < x2; got x1={x1}, x2={x2}, a={a}"
        )));
    }
    let base = MartingalePair {
        f: shifted(x1, a, &H_I),
        g: shifted(x2, a, &H_I),
    };
    let perturbed = match kind {
        PropositionKind::PsiStandard => MartingalePair {
            f: shifted(x1, a, &PHI),
            g: shifted(x2, a, &PSI),
        },
        PropositionKind::RolesSwapped => MartingalePair {
            f: shifted(x1, a, &PSI),
            g: shifted(x2, a, &PHI),
        },
        PropositionKind::P3Variant => MartingalePair {
            f: shifted(x1, a, &PHI),
            g: shifted(x2, a, &PSI3),
        },
    };
    Ok((base, perturbed))
}

//! Bernoulli entropy, the scalar constrained variational problem and the
//! κ-parameterized error envelopes around it.
//!
//! For edge-only constraints and nonnegative higher-order parameters (or star
//! motifs) the limiting conditional normalization constant is
//!
//! ```text
//! sup_{|x-e| ≤ t} φ(x),   φ(x) = Σ_i ζ_i x^{e(H_i)} − ½ I(x),
//! I(x) = x log x + (1−x) log(1−x).
//! ```
//!
//! `φ` is generally not concave, so the optimizer never relies on a single
//! stationary point: it brackets every sign change of `φ'` on a fixed grid,
//! refines each by bisection, and compares against the window endpoints.
//!
//! Logarithms are natural throughout. The constants `c` and `C` of the
//! envelopes depend on the motifs and on `e` in an unspecified way; they are
//! caller inputs (default 1.0) and the envelopes are indicative only.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ModelSpec;
use crate::graph::pair_count;
use crate::motif_poly::EdgeVars;

/// Cells in the sign grid of `φ'`.
pub const SIGN_GRID_CELLS: usize = 1024;

/// Edge-density window `|e(G) − e| ≤ t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstraintSpec {
    pub e: f64,
    pub t: f64,
}

impl ConstraintSpec {
    pub fn new(e: f64, t: f64) -> Result<Self> {
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::Parameter(format!(
                "target density e = {e} must lie in (0,1)"
            )));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Parameter(format!(
                "window half-width t = {t} must be positive"
            )));
        }
        Ok(Self { e, t })
    }

    pub fn lo(&self) -> f64 {
        self.e - self.t
    }

    pub fn hi(&self) -> f64 {
        self.e + self.t
    }

    /// Rescaled width `t' = 2Nt/(N−1)` under which the constraint reads
    /// `|T₁(x) − N²e| ≤ t'·C(N,2)`.
    pub fn t_prime(&self, n: usize) -> Result<f64> {
        if n < 2 {
            return Err(Error::Parameter("t' needs N ≥ 2".into()));
        }
        Ok(2.0 * n as f64 * self.t / (n as f64 - 1.0))
    }

    /// Whether a density lies in the window. Comparisons carry a 1e-12
    /// absolute slack so that densities landing exactly on `e ± t` count as
    /// inside regardless of rounding in `e ± t`.
    pub fn contains(&self, density: f64) -> bool {
        (density - self.e).abs() <= self.t + WINDOW_SLACK
    }
}

pub(crate) const WINDOW_SLACK: f64 = 1e-12;

/// Maximizer of the scalar problem over the clamped window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VariationalSolution {
    pub argmax_x: f64,
    pub value: f64,
    /// True when the maximizer sits on an endpoint imposed by the constraint
    /// (`e − t > 0` or `e + t < 1`).
    pub boundary_active: bool,
    pub window_lo: f64,
    pub window_hi: f64,
}

/// Interval `[lower, upper]` that the finite-N constant is predicted to lie in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Envelope {
    pub lower: f64,
    pub upper: f64,
}

impl Envelope {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

#[inline]
fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `I(x) = x log x + (1−x) log(1−x)` with `0·log 0 = 0`; range `[−log 2, 0]`.
pub fn entropy_scalar(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            what: "entropy (must lie in [0,1])",
            value: x,
        });
    }
    Ok(entropy_unchecked(x))
}

#[inline]
pub(crate) fn entropy_unchecked(x: f64) -> f64 {
    xlogx(x) + xlogx(1.0 - x)
}

/// `I(x) = Σ_{i<j} I(x_ij)` over the free coordinates.
pub fn entropy_vector(x: &EdgeVars) -> f64 {
    x.values().iter().map(|&v| entropy_unchecked(v)).sum()
}

/// Parameters of the scalar objective: `ζ_i` and the edge counts `e(H_i)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalarModel {
    pub zetas: Vec<f64>,
    pub edge_counts: Vec<u32>,
}

impl ScalarModel {
    pub fn new(zetas: Vec<f64>, edge_counts: Vec<u32>) -> Result<Self> {
        if zetas.len() != edge_counts.len() || zetas.is_empty() {
            return Err(Error::Parameter(
                "need one edge count per parameter and at least one term".into(),
            ));
        }
        if zetas.iter().any(|z| !z.is_finite()) {
            return Err(Error::Parameter("parameters must be finite".into()));
        }
        Ok(Self { zetas, edge_counts })
    }

    pub fn from_model(model: &ModelSpec) -> Self {
        Self {
            zetas: model.zetas().to_vec(),
            edge_counts: model
                .motifs()
                .iter()
                .map(|m| m.edge_count() as u32)
                .collect(),
        }
    }

    /// `φ(x) = Σ ζ_i x^{e(H_i)} − ½ I(x)`.
    pub fn objective(&self, x: f64) -> f64 {
        self.energy(x) - 0.5 * entropy_unchecked(x)
    }

    fn energy(&self, x: f64) -> f64 {
        self.zetas
            .iter()
            .zip(&self.edge_counts)
            .map(|(z, &m)| z * x.powi(m as i32))
            .sum()
    }

    /// `φ'(x) = Σ ζ_i m_i x^{m_i−1} − ½ log(x/(1−x))`, infinite at 0 and 1.
    pub fn derivative(&self, x: f64) -> f64 {
        let drift: f64 = self
            .zetas
            .iter()
            .zip(&self.edge_counts)
            .filter(|(_, &m)| m > 0)
            .map(|(z, &m)| z * m as f64 * x.powi(m as i32 - 1))
            .sum();
        if x <= 0.0 {
            return f64::INFINITY;
        }
        if x >= 1.0 {
            return f64::NEG_INFINITY;
        }
        drift - 0.5 * (x.ln() - (1.0 - x).ln())
    }
}

/// Global maximum of `φ` over `[max(0, e−t), min(1, e+t)]`.
pub fn solve_constrained_scalar(
    model: &ScalarModel,
    e: f64,
    t: f64,
) -> Result<VariationalSolution> {
    if !e.is_finite() || !t.is_finite() || t < 0.0 {
        return Err(Error::Parameter(format!("bad window e = {e}, t = {t}")));
    }
    let lo = (e - t).max(0.0);
    let hi = (e + t).min(1.0);
    if lo > hi {
        return Err(Error::infeasible(e - t, e + t));
    }
    let finish = |x: f64| VariationalSolution {
        argmax_x: x,
        value: model.objective(x),
        boundary_active: (x == lo && e - t > 0.0) || (x == hi && e + t < 1.0),
        window_lo: lo,
        window_hi: hi,
    };

    if model.zetas.iter().all(|&z| z == 0.0) {
        // −½I is maximized at 1/2
        return Ok(finish(0.5f64.clamp(lo, hi)));
    }

    let mut candidates = vec![lo, hi, 0.5f64.clamp(lo, hi)];
    if hi > lo {
        let width = hi - lo;
        let grid: Vec<f64> = (0..=SIGN_GRID_CELLS)
            .map(|i| {
                if i == SIGN_GRID_CELLS {
                    hi
                } else {
                    lo + width * i as f64 / SIGN_GRID_CELLS as f64
                }
            })
            .collect();
        let slopes: Vec<f64> = grid.iter().map(|&x| model.derivative(x)).collect();
        for c in 0..SIGN_GRID_CELLS {
            let (a, b) = (grid[c], grid[c + 1]);
            let (fa, fb) = (slopes[c], slopes[c + 1]);
            if fa == 0.0 {
                candidates.push(a);
            }
            if fa.signum() != fb.signum() && fa != 0.0 && fb != 0.0 {
                candidates.push(bisect_root(|x| model.derivative(x), a, b, fa));
            }
        }
    }
    let best = candidates
        .into_iter()
        .map(|x| (x, model.objective(x)))
        .fold((f64::NAN, f64::NEG_INFINITY), |acc, (x, v)| {
            if v > acc.1 {
                (x, v)
            } else {
                acc
            }
        });
    if !best.1.is_finite() {
        return Err(Error::Numerical(
            "objective is not finite on the window".into(),
        ));
    }
    Ok(finish(best.0))
}

/// Bisection on a sign change of `f` over `[a, b]`, `f(a) = fa`.
fn bisect_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// `log(1 + log B / log N)`-style factor shared by both envelopes.
fn size_factor(b: f64, n: f64) -> f64 {
    1.0 + b.ln() / n.ln()
}

fn check_envelope_inputs(b: f64, n: usize, kappa: f64, c: f64, big_c: f64) -> Result<()> {
    if !(kappa > 8.0) {
        return Err(Error::Parameter(format!("κ = {kappa} must exceed 8")));
    }
    if !(c > 0.0 && big_c > 0.0) {
        return Err(Error::Parameter(
            "envelope constants must be positive".into(),
        ));
    }
    if !(b >= 1.0) {
        return Err(Error::Parameter(format!("B = {b} must be at least 1")));
    }
    if n < 2 {
        return Err(Error::Parameter("envelopes need N ≥ 2".into()));
    }
    Ok(())
}

/// Envelope around the scalar supremum:
///
/// ```text
/// [sup − cBN^{−1/κ},
///  sup + CB^{8/5}N^{(8−κ)/(5κ)}(log N)^{1/5}(1 + log B/log N) + CB²N^{−1/κ}]
/// ```
pub fn special_envelope(
    sup_value: f64,
    b: f64,
    n: usize,
    kappa: f64,
    c: f64,
    big_c: f64,
) -> Result<Envelope> {
    check_envelope_inputs(b, n, kappa, c, big_c)?;
    let nf = n as f64;
    let lower = sup_value - c * b * nf.powf(-1.0 / kappa);
    let upper = sup_value
        + big_c
            * b.powf(1.6)
            * nf.powf((8.0 - kappa) / (5.0 * kappa))
            * nf.ln().powf(0.2)
            * size_factor(b, nf)
        + big_c * b * b * nf.powf(-1.0 / kappa);
    Ok(Envelope { lower, upper })
}

/// Envelope from the windowed suprema over `[0,1]^n`:
///
/// ```text
/// [shrunken − CBN^{−1/2},
///  enlarged + CB^{8/5}N^{(8−κ)/(5κ)}(log N)^{1/5}(1 + log B/log N) + CB²N^{(2−κ)/(2κ)}]
/// ```
pub fn general_envelope(
    shrunken_sup: f64,
    enlarged_sup: f64,
    b: f64,
    n: usize,
    kappa: f64,
    big_c: f64,
) -> Result<Envelope> {
    check_envelope_inputs(b, n, kappa, 1.0, big_c)?;
    let nf = n as f64;
    let lower = shrunken_sup - big_c * b * nf.powf(-0.5);
    let upper = enlarged_sup
        + big_c
            * b.powf(1.6)
            * nf.powf((8.0 - kappa) / (5.0 * kappa))
            * nf.ln().powf(0.2)
            * size_factor(b, nf)
        + big_c * b * b * nf.powf((2.0 - kappa) / (2.0 * kappa));
    Ok(Envelope { lower, upper })
}

/// Suprema over the shrunken and enlarged windows via the constant-graphon
/// reduction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeneralWindowSups {
    /// `(c/2)·n^{−1/(2κ)}`, `n = C(N,2)`.
    pub adjustment: f64,
    pub shrunken: VariationalSolution,
    pub enlarged: VariationalSolution,
}

/// Scalar suprema over `|x − e| ≤ t ∓ (c/2)n^{−1/(2κ)}`.
///
/// The reduction to constant `x` is valid when `ζ_i ≥ 0` for every `i ≥ 2`
/// or when every `H_i`, `i ≥ 2`, is a star; otherwise the model is rejected.
pub fn general_window_sups(model: &ModelSpec, kappa: f64, c: f64) -> Result<GeneralWindowSups> {
    if !(kappa > 8.0) {
        return Err(Error::Parameter(format!("κ = {kappa} must exceed 8")));
    }
    if !(c >= 0.0) {
        return Err(Error::Parameter("c must be nonnegative".into()));
    }
    let constraint = model
        .constraint()
        .ok_or_else(|| Error::Parameter("windowed suprema need a constraint".into()))?;
    let higher = model.motifs().iter().zip(model.zetas()).skip(1);
    let nonnegative = higher.clone().all(|(_, &z)| z >= 0.0);
    let stars = higher.clone().all(|(m, _)| m.is_star_like());
    if !nonnegative && !stars {
        return Err(Error::UnsupportedModel(
            "negative higher-order parameters with non-star motifs: the windowed supremum is \
             not reducible to constant graphons"
                .into(),
        ));
    }
    let n_pairs = pair_count(model.n()) as f64;
    let adjustment = 0.5 * c * n_pairs.powf(-1.0 / (2.0 * kappa));
    let inner = constraint.t - adjustment;
    if inner < 0.0 {
        return Err(Error::infeasible(
            constraint.e - inner,
            constraint.e + inner,
        ));
    }
    let scalar = ScalarModel::from_model(model);
    Ok(GeneralWindowSups {
        adjustment,
        shrunken: solve_constrained_scalar(&scalar, constraint.e, inner)?,
        enlarged: solve_constrained_scalar(&scalar, constraint.e, constraint.t + adjustment)?,
    })
}

/// Iterated natural logarithm: 0 for `x ≤ 1`, else `1 + log*(log x)`.
pub fn log_star(x: f64) -> u32 {
    let mut count = 0;
    let mut v = x;
    while v > 1.0 {
        v = v.ln();
        count += 1;
    }
    count
}

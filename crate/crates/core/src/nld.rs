//! Nonlinear large deviations for generic functions on the hypercube.
//!
//! For `f, h : [0,1]^n → ℝ` the conditional constant is
//!
//! ```text
//! F^c = log Σ_{x ∈ {0,1}^n : |h(x)| ≤ tn} e^{f(x)}
//! ```
//!
//! and it is compared with `sup (f − I)` over a shrunken or enlarged window
//! in `[0,1]^n`. The error terms depend on the supremum norms of `f`, `h`
//! and their first and second partial derivatives, collected in a
//! [`SupNormProfile`].
//!
//! Each bound pairs with its own window: the upper bound uses
//! `|h| ≤ (t+δ)n`, the lower bound `|h| ≤ (t−δ₀)n`. Reports carry both
//! windows explicitly.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ModelSpec;
use crate::graph::pair_count;
use crate::motif_poly::t_derivative_bounds;
use crate::numerics::LogSumExp;
use crate::variational::{entropy_unchecked, WINDOW_SLACK};

/// Largest hypercube dimension for brute-force sums.
pub const MAX_BRUTE_DIMENSION: usize = 22;

/// Largest dimension for [`grid_sup`].
pub const MAX_GRID_DIMENSION: usize = 4;

const LN2: f64 = std::f64::consts::LN_2;

/// `C²` cutoff: `−1` below `−1`, `0` above `0`, and
/// `10(x+1)³ − 15(x+1)⁴ + 6(x+1)⁵ − 1` in between.
pub fn cutoff_g(x: f64) -> f64 {
    cutoff_g_derivatives(x).0
}

/// `(g, g', g'')` at `x`. `|g'| ≤ 2` and `|g''| ≤ 6` everywhere.
pub fn cutoff_g_derivatives(x: f64) -> (f64, f64, f64) {
    if x <= -1.0 {
        return (-1.0, 0.0, 0.0);
    }
    if x >= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let y = x + 1.0;
    let y2 = y * y;
    let g = y2 * y * (10.0 - 15.0 * y + 6.0 * y2) - 1.0;
    let d1 = 30.0 * y2 * (1.0 - y) * (1.0 - y);
    let d2 = 60.0 * y * (1.0 - y) * (1.0 - 2.0 * y);
    (g, d1, d2)
}

/// `K·g((t − |x|)/δ)`: zero on `|x| ≤ t`, `−K` beyond `t + δ`.
///
/// Expects `K > 0`, `δ > 0`, `t ≥ 0`.
pub fn cutoff_psi(x: f64, k: f64, t: f64, delta: f64) -> f64 {
    debug_assert!(k > 0.0 && delta > 0.0 && t >= 0.0);
    k * cutoff_g((t - x.abs()) / delta)
}

/// Per-coordinate bounds on first derivatives.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coords {
    /// The same bound for every coordinate.
    Uniform(f64),
    Explicit(Vec<f64>),
}

impl Coords {
    fn at(&self, i: usize) -> f64 {
        match self {
            Coords::Uniform(v) => *v,
            Coords::Explicit(v) => v[i],
        }
    }

    fn values(&self) -> Vec<f64> {
        match self {
            Coords::Uniform(v) => vec![*v],
            Coords::Explicit(v) => v.clone(),
        }
    }
}

/// Bounds on second derivatives.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairs {
    /// Full symmetric `n × n` matrix.
    Dense(Vec<Vec<f64>>),
    /// Coordinates are the pairs of an `N`-vertex graph and the bound depends
    /// only on how two pairs meet: equal, sharing one vertex, or disjoint.
    GraphClasses {
        n_vertices: usize,
        same: f64,
        overlap: f64,
        disjoint: f64,
    },
}

/// `‖f‖`, `‖∂_i f‖` and `‖∂_ij f‖` for one function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionNorms {
    pub sup: f64,
    pub grad: Coords,
    pub hess: Pairs,
}

impl FunctionNorms {
    pub fn zero(n: usize) -> Self {
        Self {
            sup: 0.0,
            grad: Coords::Uniform(0.0),
            hess: Pairs::Dense(vec![vec![0.0; n]; n]),
        }
    }
}

/// Supremum norms of the weight `f` and the constraint function `h`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupNormProfile {
    n: usize,
    f: FunctionNorms,
    h: FunctionNorms,
}

/// One class of coordinate pairs `(i, j)` sharing the same bounds.
#[derive(Clone, Copy, Debug)]
struct PairClass {
    count: f64,
    diagonal: bool,
    b_i: f64,
    b_j: f64,
    beta_i: f64,
    beta_j: f64,
    c: f64,
    gamma: f64,
}

impl SupNormProfile {
    pub fn new(n: usize, f: FunctionNorms, h: FunctionNorms) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension(
                "profile dimension must be positive".into(),
            ));
        }
        for (name, norms) in [("f", &f), ("h", &h)] {
            check_norms(name, n, norms)?;
        }
        let graph = |p: &Pairs| matches!(p, Pairs::GraphClasses { .. });
        if graph(&f.hess) != graph(&h.hess) {
            return Err(Error::Dimension(
                "f and h must use the same second-derivative layout".into(),
            ));
        }
        if let (
            Pairs::GraphClasses { n_vertices: a, .. },
            Pairs::GraphClasses { n_vertices: b, .. },
        ) = (&f.hess, &h.hess)
        {
            if a != b {
                return Err(Error::Dimension(
                    "f and h disagree on the vertex count".into(),
                ));
            }
        }
        Ok(Self { n, f, h })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f(&self) -> &FunctionNorms {
        &self.f
    }

    pub fn h(&self) -> &FunctionNorms {
        &self.h
    }

    fn classes(&self) -> Vec<PairClass> {
        match (&self.f.hess, &self.h.hess) {
            (Pairs::Dense(c), Pairs::Dense(g)) => {
                let mut out = Vec::with_capacity(self.n * self.n);
                for i in 0..self.n {
                    for j in 0..self.n {
                        out.push(PairClass {
                            count: 1.0,
                            diagonal: i == j,
                            b_i: self.f.grad.at(i),
                            b_j: self.f.grad.at(j),
                            beta_i: self.h.grad.at(i),
                            beta_j: self.h.grad.at(j),
                            c: c[i][j],
                            gamma: g[i][j],
                        });
                    }
                }
                out
            }
            (
                Pairs::GraphClasses {
                    n_vertices,
                    same,
                    overlap,
                    disjoint,
                },
                Pairs::GraphClasses {
                    same: g_same,
                    overlap: g_overlap,
                    disjoint: g_disjoint,
                    ..
                },
            ) => {
                let n = self.n as f64;
                let rest = n_vertices.saturating_sub(2);
                let b = self.f.grad.at(0);
                let beta = self.h.grad.at(0);
                let class = |count: f64, diagonal, c, gamma| PairClass {
                    count,
                    diagonal,
                    b_i: b,
                    b_j: b,
                    beta_i: beta,
                    beta_j: beta,
                    c,
                    gamma,
                };
                vec![
                    class(n, true, *same, *g_same),
                    class(n * 2.0 * rest as f64, false, *overlap, *g_overlap),
                    class(n * pair_count(rest) as f64, false, *disjoint, *g_disjoint),
                ]
            }
            _ => unreachable!("layouts are checked at construction"),
        }
    }
}

fn check_norms(name: &str, n: usize, norms: &FunctionNorms) -> Result<()> {
    let bad = |v: f64| !(v.is_finite() && v >= 0.0);
    if bad(norms.sup) {
        return Err(Error::Parameter(format!(
            "‖{name}‖ must be finite and nonnegative"
        )));
    }
    match &norms.grad {
        Coords::Uniform(v) if bad(*v) => {
            return Err(Error::Parameter(format!(
                "gradient bounds of {name} must be nonnegative"
            )))
        }
        Coords::Explicit(v) if v.len() != n => {
            return Err(Error::Dimension(format!(
                "{name} has {} gradient bounds for dimension {n}",
                v.len()
            )))
        }
        Coords::Explicit(v) if v.iter().any(|&x| bad(x)) => {
            return Err(Error::Parameter(format!(
                "gradient bounds of {name} must be nonnegative"
            )))
        }
        _ => {}
    }
    match &norms.hess {
        Pairs::Dense(m) => {
            if m.len() != n || m.iter().any(|r| r.len() != n) {
                return Err(Error::Dimension(format!(
                    "{name} needs an {n}×{n} Hessian bound"
                )));
            }
            for (i, row) in m.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    if bad(v) {
                        return Err(Error::Parameter(format!(
                            "Hessian bounds of {name} must be nonnegative"
                        )));
                    }
                    if v != m[j][i] {
                        return Err(Error::Parameter(format!(
                            "Hessian bounds of {name} must be symmetric"
                        )));
                    }
                }
            }
        }
        Pairs::GraphClasses {
            n_vertices,
            same,
            overlap,
            disjoint,
        } => {
            if pair_count(*n_vertices) != n {
                return Err(Error::Dimension(format!(
                    "{n_vertices} vertices give {} pairs, not {n}",
                    pair_count(*n_vertices)
                )));
            }
            if !matches!(norms.grad, Coords::Uniform(_)) {
                return Err(Error::Dimension(format!(
                    "graph-class Hessian bounds of {name} need uniform gradient bounds"
                )));
            }
            if [*same, *overlap, *disjoint].into_iter().any(bad) {
                return Err(Error::Parameter(format!(
                    "Hessian bounds of {name} must be nonnegative"
                )));
            }
        }
    }
    Ok(())
}

/// Windows each bound refers to, in units of `n`: the constraint is
/// `|h(x)| ≤ window · n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Windows {
    pub t: f64,
    /// `t + δ`, for the upper bound.
    pub upper: f64,
    /// `t − δ₀`, for the lower bound; negative means the lower bound is
    /// vacuous.
    pub lower: f64,
}

/// Constants of the conditional bounds that need no `δ`, `ε` or coverings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Main1Constants {
    /// `log 2 + 2a/n`
    pub k: f64,
    /// `a + nK`
    pub l: f64,
    pub delta0: f64,
    pub eps0: f64,
    pub eta0: f64,
}

/// `K`, `l`, `δ₀`, `ε₀`, `η₀` for a profile.
pub fn main1_constants(profile: &SupNormProfile) -> Main1Constants {
    let n = profile.n as f64;
    let a = profile.f.sup;
    let alpha = profile.h.sup;
    let k = LN2 + 2.0 * a / n;
    let mut delta_sum = 0.0;
    let mut eta_sum = 0.0;
    for cl in profile.classes().iter().filter(|c| c.diagonal) {
        delta_sum += cl.count * (alpha * cl.gamma + cl.beta_i * cl.beta_i);
        eta_sum += cl.count * (a * cl.c + cl.b_i * cl.b_i);
    }
    let root6 = 6f64.sqrt();
    Main1Constants {
        k,
        l: a + n * k,
        delta0: root6 / n * delta_sum.sqrt(),
        eps0: 2.0 * (6.0 / n).sqrt(),
        eta0: root6 / n * eta_sum.sqrt(),
    }
}

/// All terms of the upper and lower bounds on `F^c`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Main1Report {
    pub n: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub k: f64,
    pub l: f64,
    /// `b_i + 2Kβ_i/δ`
    pub m: Coords,
    /// `c_ij + 2Kγ_ij/δ + 6Kβ_iβ_j/(nδ²)`
    pub n_matrix: Pairs,
    pub complexity_term: f64,
    pub smoothness_term: f64,
    pub delta0: f64,
    pub eps0: f64,
    pub eta0: f64,
    pub log_card_f: f64,
    pub log_card_h: f64,
    pub windows: Windows,
}

impl Main1Report {
    /// `sup + complexity + smoothness`; `sup` must be taken over the window
    /// `windows.upper`. Depends on covering cardinalities with unspecified
    /// constants, so it is indicative rather than rigorous.
    pub fn upper_bound(&self, sup_over_upper_window: f64) -> f64 {
        sup_over_upper_window + self.complexity_term + self.smoothness_term
    }

    /// `sup − ε₀n − η₀n − log 2`; `sup` must be taken over `windows.lower`.
    pub fn lower_bound(&self, sup_over_lower_window: f64) -> f64 {
        let n = self.n as f64;
        sup_over_lower_window - self.eps0 * n - self.eta0 * n - LN2
    }
}

/// Upper and lower bound terms on `F^c` for window `t`, smoothing width `δ`
/// and covering scale `ε`.
///
/// `log_card_f` and `log_card_h` are `log|D_f(ε/3)|` and
/// `log|D_h(δε/(6K))|`, supplied by the caller.
pub fn main1_terms(
    profile: &SupNormProfile,
    t: f64,
    delta: f64,
    epsilon: f64,
    log_card_f: f64,
    log_card_h: f64,
) -> Result<Main1Report> {
    if !(delta > 0.0 && epsilon > 0.0) {
        return Err(Error::Parameter("δ and ε must be positive".into()));
    }
    if !t.is_finite() {
        return Err(Error::Parameter("t must be finite".into()));
    }
    let consts = main1_constants(profile);
    let n = profile.n as f64;
    let (k, l) = (consts.k, consts.l);
    let m_of = |b: f64, beta: f64| b + 2.0 * k * beta / delta;
    let n_of = |c: f64, gamma: f64, bi: f64, bj: f64| {
        c + 2.0 * k * gamma / delta + 6.0 * k * bi * bj / (n * delta * delta)
    };

    let classes = profile.classes();
    let mut sum_m2 = 0.0;
    let mut sum_beta2 = 0.0;
    let mut diag_sum = 0.0;
    let mut diag_n2 = 0.0;
    let mut diag_n = 0.0;
    let mut cross = 0.0;
    for cl in &classes {
        let m_i = m_of(cl.b_i, cl.beta_i);
        let m_j = m_of(cl.b_j, cl.beta_j);
        let n_ij = n_of(cl.c, cl.gamma, cl.beta_i, cl.beta_j);
        cross += cl.count * (l * n_ij * n_ij + m_i * m_j * n_ij + 4.0 * m_i * n_ij);
        if cl.diagonal {
            sum_m2 += cl.count * m_i * m_i;
            sum_beta2 += cl.count * cl.beta_i * cl.beta_i;
            diag_sum += cl.count * (l * n_ij + m_i * m_i);
            diag_n2 += cl.count * n_ij * n_ij;
            diag_n += cl.count * n_ij;
        }
    }
    if sum_beta2 == 0.0 {
        return Err(Error::DegenerateProfile(
            "all gradient bounds of h vanish, so log(12K(Σβ²/n)^{1/2}/(δε)) = −∞".into(),
        ));
    }
    let complexity_term = 0.25 * (n * sum_m2).sqrt() * epsilon
        + 3.0 * n * epsilon
        + (12.0 * k * (sum_beta2 / n).sqrt() / (delta * epsilon)).ln()
        + log_card_f
        + log_card_h;
    let smoothness_term = 4.0 * (diag_sum + 0.25 * cross).sqrt()
        + 0.25 * sum_m2.sqrt() * diag_n2.sqrt()
        + 3.0 * diag_n
        + LN2;

    let m = match (&profile.f.grad, &profile.h.grad) {
        (Coords::Uniform(b), Coords::Uniform(beta)) => Coords::Uniform(m_of(*b, *beta)),
        (fg, hg) => Coords::Explicit((0..profile.n).map(|i| m_of(fg.at(i), hg.at(i))).collect()),
    };
    let n_matrix = match (&profile.f.hess, &profile.h.hess) {
        (Pairs::Dense(c), Pairs::Dense(g)) => Pairs::Dense(
            (0..profile.n)
                .map(|i| {
                    (0..profile.n)
                        .map(|j| n_of(c[i][j], g[i][j], profile.h.grad.at(i), profile.h.grad.at(j)))
                        .collect()
                })
                .collect(),
        ),
        (
            Pairs::GraphClasses {
                n_vertices,
                same,
                overlap,
                disjoint,
            },
            Pairs::GraphClasses {
                same: gs,
                overlap: go,
                disjoint: gd,
                ..
            },
        ) => {
            let beta = profile.h.grad.at(0);
            Pairs::GraphClasses {
                n_vertices: *n_vertices,
                same: n_of(*same, *gs, beta, beta),
                overlap: n_of(*overlap, *go, beta, beta),
                disjoint: n_of(*disjoint, *gd, beta, beta),
            }
        }
        _ => unreachable!("layouts are checked at construction"),
    };

    let report = Main1Report {
        n: profile.n,
        delta,
        epsilon,
        k,
        l,
        m,
        n_matrix,
        complexity_term,
        smoothness_term,
        delta0: consts.delta0,
        eps0: consts.eps0,
        eta0: consts.eta0,
        log_card_f,
        log_card_h,
        windows: Windows {
            t,
            upper: t + delta,
            lower: t - consts.delta0,
        },
    };
    if !(report.complexity_term.is_finite() && report.smoothness_term.is_finite()) {
        return Err(Error::Numerical("bound terms are not finite".into()));
    }
    Ok(report)
}

/// `constrained_sup − ε₀n − η₀n − log 2`, where `constrained_sup` is the
/// supremum of `f − I` over `|h| ≤ (t − δ₀)n`.
pub fn main1_lower_bound(profile: &SupNormProfile, constrained_sup: f64) -> f64 {
    let c = main1_constants(profile);
    let n = profile.n as f64;
    constrained_sup - c.eps0 * n - c.eta0 * n - LN2
}

/// Bound terms for the unconstrained constant `F`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cd1Report {
    pub complexity_term: f64,
    pub smoothness_term: f64,
    /// `½ Σ c_ii`, subtracted from the supremum in the lower bound.
    pub lower_slack: f64,
}

/// Terms of the unconstrained bounds for `F = log Σ e^{f}` using only the
/// norms of `f` in `profile`; `log_card` is `log|D(ε)|`.
pub fn cd1_terms(profile: &SupNormProfile, epsilon: f64, log_card: f64) -> Result<Cd1Report> {
    if !(epsilon > 0.0) {
        return Err(Error::Parameter("ε must be positive".into()));
    }
    let n = profile.n as f64;
    let a = profile.f.sup;
    let mut sum_b2 = 0.0;
    let mut diag_sum = 0.0;
    let mut diag_c2 = 0.0;
    let mut diag_c = 0.0;
    let mut cross = 0.0;
    for cl in profile.classes() {
        cross += cl.count * (a * cl.c * cl.c + cl.b_i * cl.b_j * cl.c + 4.0 * cl.b_i * cl.c);
        if cl.diagonal {
            sum_b2 += cl.count * cl.b_i * cl.b_i;
            diag_sum += cl.count * (a * cl.c + cl.b_i * cl.b_i);
            diag_c2 += cl.count * cl.c * cl.c;
            diag_c += cl.count * cl.c;
        }
    }
    Ok(Cd1Report {
        complexity_term: 0.25 * (n * sum_b2).sqrt() * epsilon + 3.0 * n * epsilon + log_card,
        smoothness_term: 4.0 * (diag_sum + 0.25 * cross).sqrt()
            + 0.25 * sum_b2.sqrt() * diag_c2.sqrt()
            + 3.0 * diag_c
            + LN2,
        lower_slack: 0.5 * diag_c,
    })
}

/// Profile of `f = Σ ζ_i T_i` and `h = T_1 − N²e` on the `C(N,2)` edge
/// coordinates, from the closed-form derivative bounds of each `T_i`.
///
/// `T_1` is linear with slope 2, so `β = 2`, `γ = 0` and
/// `α = max(N²e, |N(N−1) − N²e|)` are exact.
pub fn ergm_profile(model: &ModelSpec) -> Result<SupNormProfile> {
    let window = model
        .constraint()
        .ok_or_else(|| Error::Parameter("the constraint function needs a target density".into()))?;
    let nv = model.n();
    if nv < 2 {
        return Err(Error::Dimension("graph profiles need N ≥ 2".into()));
    }
    let mut f = FunctionNorms {
        sup: 0.0,
        grad: Coords::Uniform(0.0),
        hess: Pairs::GraphClasses {
            n_vertices: nv,
            same: 0.0,
            overlap: 0.0,
            disjoint: 0.0,
        },
    };
    let mut b = 0.0;
    let (mut same, mut overlap, mut disjoint) = (0.0, 0.0, 0.0);
    for (motif, zeta) in model.motifs().iter().zip(model.zetas()) {
        let bounds = t_derivative_bounds(motif, nv, 1.0, 1.0)?;
        let z = zeta.abs();
        f.sup += z * bounds.sup_t;
        b += z * bounds.sup_grad;
        same += z * bounds.sup_hess_overlap;
        overlap += z * bounds.sup_hess_overlap;
        disjoint += z * bounds.sup_hess_disjoint;
    }
    f.grad = Coords::Uniform(b);
    f.hess = Pairs::GraphClasses {
        n_vertices: nv,
        same,
        overlap,
        disjoint,
    };
    let n2 = (nv * nv) as f64;
    let target = n2 * window.e;
    let h = FunctionNorms {
        sup: target.max((n2 - nv as f64 - target).abs()),
        grad: Coords::Uniform(2.0),
        hess: Pairs::GraphClasses {
            n_vertices: nv,
            same: 0.0,
            overlap: 0.0,
            disjoint: 0.0,
        },
    };
    SupNormProfile::new(pair_count(nv), f, h)
}

/// Upper bound on `log|D_f(scale)|` for `f = Σ ζ_i T_i`, built as a product
/// over motifs of coverings at scale `scale/(|ζ_i| s)`.
pub fn ergm_log_card_f(
    model: &ModelSpec,
    scale: f64,
    covering_c: f64,
    covering_big_c: f64,
) -> Result<f64> {
    let s = model.motifs().len() as f64;
    let mut total = 0.0;
    for (motif, zeta) in model.motifs().iter().zip(model.zetas()) {
        if *zeta != 0.0 {
            let bounds = t_derivative_bounds(motif, model.n(), covering_c, covering_big_c)?;
            total += bounds.covering_log_cardinality(scale / (zeta.abs() * s));
        }
    }
    Ok(total)
}

/// Upper bound on `log|D_h(scale)|` for `h = T_1 − N²e`.
pub fn ergm_log_card_h(
    model: &ModelSpec,
    scale: f64,
    covering_c: f64,
    covering_big_c: f64,
) -> Result<f64> {
    let edge = t_derivative_bounds(&model.motifs()[0], model.n(), covering_c, covering_big_c)?;
    Ok(edge.covering_log_cardinality(scale))
}

/// `(log|D_f(ε/3)|, log|D_h(δε/(6K))|)`, the covering terms of the
/// conditional upper bound.
pub fn ergm_log_cards(
    model: &ModelSpec,
    k: f64,
    delta: f64,
    epsilon: f64,
    covering_c: f64,
    covering_big_c: f64,
) -> Result<(f64, f64)> {
    Ok((
        ergm_log_card_f(model, epsilon / 3.0, covering_c, covering_big_c)?,
        ergm_log_card_h(
            model,
            delta * epsilon / (6.0 * k),
            covering_c,
            covering_big_c,
        )?,
    ))
}

fn check_brute(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Dimension(
            "hypercube dimension must be positive".into(),
        ));
    }
    if n > MAX_BRUTE_DIMENSION {
        return Err(Error::Size {
            what: "hypercube dimension",
            value: n,
            max: MAX_BRUTE_DIMENSION,
        });
    }
    Ok(())
}

fn corner_sum<F>(n: usize, f: F) -> Result<LogSumExp>
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    check_brute(n)?;
    let split = n.min(6);
    let low = n - split;
    let chunks: Vec<LogSumExp> = (0..1u64 << split)
        .into_par_iter()
        .map(|hi| {
            let mut acc = LogSumExp::new();
            let mut x = vec![0.0; n];
            for b in 0..split {
                x[low + b] = (hi >> b & 1) as f64;
            }
            for lo in 0..1u64 << low {
                for (b, xb) in x.iter_mut().enumerate().take(low) {
                    *xb = (lo >> b & 1) as f64;
                }
                if let Some(v) = f(&x) {
                    acc.add(v);
                }
            }
            acc
        })
        .collect();
    let mut total = LogSumExp::new();
    for c in &chunks {
        total.merge(c);
    }
    Ok(total)
}

/// `log Σ_{x ∈ {0,1}^n} e^{f(x)}` by direct summation.
pub fn brute_f<F>(n: usize, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    finish(corner_sum(n, |x| Some(f(x)))?)
}

/// `log Σ_{x ∈ {0,1}^n : |h(x)| ≤ tn} e^{f(x)}` by direct summation.
pub fn brute_fc<F, H>(n: usize, f: F, h: H, t: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
    H: Fn(&[f64]) -> f64 + Sync,
{
    let bound = t * n as f64;
    let acc = corner_sum(n, |x| (h(x).abs() <= bound + WINDOW_SLACK).then(|| f(x)))?;
    if acc.is_empty() {
        return Err(Error::infeasible(-bound, bound));
    }
    finish(acc)
}

fn finish(acc: LogSumExp) -> Result<f64> {
    let v = acc.value();
    if v.is_nan() || v == f64::INFINITY {
        return Err(Error::Numerical("log-sum-exp is not finite".into()));
    }
    Ok(v)
}

/// Maximum of `f − I` over the grid `{0, 1/r, …, 1}^n` restricted to
/// `|h(x)| ≤ window·n`. A lower bound on the true supremum.
pub fn grid_sup<F, H>(n: usize, f: F, h: H, window: f64, resolution: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
    H: Fn(&[f64]) -> f64 + Sync,
{
    if n == 0 {
        return Err(Error::Dimension("grid dimension must be positive".into()));
    }
    if n > MAX_GRID_DIMENSION {
        return Err(Error::Size {
            what: "grid dimension",
            value: n,
            max: MAX_GRID_DIMENSION,
        });
    }
    if resolution < 2 {
        return Err(Error::Parameter(
            "grid resolution must be at least 2".into(),
        ));
    }
    let bound = window * n as f64;
    let side = resolution + 1;
    let total = side.pow(n as u32);
    let best = (0..side)
        .into_par_iter()
        .map(|first| {
            let mut x = vec![0.0; n];
            x[0] = first as f64 / resolution as f64;
            let mut best = f64::NEG_INFINITY;
            for idx in 0..total / side {
                let mut rem = idx;
                for xi in x.iter_mut().skip(1) {
                    *xi = (rem % side) as f64 / resolution as f64;
                    rem /= side;
                }
                if h(&x).abs() <= bound + WINDOW_SLACK {
                    let entropy: f64 = x.iter().map(|&v| entropy_unchecked(v)).sum();
                    best = best.max(f(&x) - entropy);
                }
            }
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return Err(Error::infeasible(-bound, bound));
    }
    Ok(best)
}

/// Multilinear polynomial `Σ_S c_S Π_{i∈S} x_i` on `[0,1]^n`, with
/// coefficients indexed by subset bitmask.
///
/// Multilinear functions and all their partial derivatives attain their
/// extreme values at corners, so [`Multilinear::norms`] is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct Multilinear {
    n: usize,
    coeffs: Vec<f64>,
}

impl Multilinear {
    pub fn new(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        if n == 0 || n > 16 {
            return Err(Error::Dimension(format!(
                "multilinear dimension {n} not in 1..=16"
            )));
        }
        if coeffs.len() != 1 << n {
            return Err(Error::Dimension(format!(
                "{} coefficients for dimension {n}, expected {}",
                coeffs.len(),
                1usize << n
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parameter("coefficients must be finite".into()));
        }
        Ok(Self { n, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(mask, c)| {
                c * (0..self.n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| x[i])
                    .product::<f64>()
            })
            .sum()
    }

    /// `∂f/∂x_i`, still a multilinear polynomial in `n` variables.
    pub fn partial(&self, i: usize) -> Self {
        let mut coeffs = vec![0.0; self.coeffs.len()];
        for (mask, c) in self.coeffs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                coeffs[mask & !(1 << i)] += c;
            }
        }
        Self { n: self.n, coeffs }
    }

    /// `max |f|` over `[0,1]^n`.
    pub fn sup_norm(&self) -> f64 {
        let mut x = vec![0.0; self.n];
        (0..1usize << self.n)
            .map(|corner| {
                for (b, xb) in x.iter_mut().enumerate() {
                    *xb = (corner >> b & 1) as f64;
                }
                self.eval(&x).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Exact supremum norms of the function and its first two derivatives.
    pub fn norms(&self) -> FunctionNorms {
        let grads: Vec<Self> = (0..self.n).map(|i| self.partial(i)).collect();
        let hess = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        if i == j {
                            0.0
                        } else {
                            grads[i].partial(j).sup_norm()
                        }
                    })
                    .collect()
            })
            .collect();
        FunctionNorms {
            sup: self.sup_norm(),
            grad: Coords::Explicit(grads.iter().map(Self::sup_norm).collect()),
            hess: Pairs::Dense(hess),
        }
    }
}

impl Coords {
    /// All bounds as a vector (one entry when uniform).
    pub fn to_vec(&self) -> Vec<f64> {
        self.values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variational::ConstraintSpec;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn zero_profile(n: usize) -> SupNormProfile {
        SupNormProfile::new(n, FunctionNorms::zero(n), FunctionNorms::zero(n)).unwrap()
    }

    #[test]
    fn cutoff_examples_and_derivative_bounds() {
        assert_eq!(cutoff_g(-1.0), -1.0);
        assert_eq!(cutoff_g(-3.0), -1.0);
        assert_eq!(cutoff_g(0.0), 0.0);
        assert_eq!(cutoff_g(2.0), 0.0);
        assert_relative_eq!(cutoff_g(-0.5), -0.5, epsilon = 1e-15);
        let mut prev = -1.0;
        for i in 0..=10_000 {
            let x = -1.5 + 2.0 * i as f64 / 10_000.0;
            let (g, d1, d2) = cutoff_g_derivatives(x);
            assert!(d1.abs() <= 2.0 && d2.abs() <= 6.0, "x = {x}");
            assert!(g >= prev - 1e-15);
            prev = g;
            if x > -0.99 && x < -0.01 {
                let h = 1e-6;
                let fd = (cutoff_g(x + h) - cutoff_g(x - h)) / (2.0 * h);
                assert!((fd - d1).abs() < 1e-6);
                let fd2 =
                    (cutoff_g_derivatives(x + h).1 - cutoff_g_derivatives(x - h).1) / (2.0 * h);
                assert!((fd2 - d2).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn cutoff_psi_examples() {
        assert_eq!(cutoff_psi(0.0, 3.0, 0.2, 0.1), 0.0);
        assert_eq!(cutoff_psi(0.2, 3.0, 0.2, 0.1), 0.0);
        assert_relative_eq!(cutoff_psi(-0.3, 3.0, 0.2, 0.1), -3.0, epsilon = 1e-12);
        assert_relative_eq!(cutoff_psi(0.25, 1.0, 0.2, 0.1), -0.5, epsilon = 1e-12);
    }

    #[test]
    fn main1_constant_examples() {
        let c = main1_constants(&zero_profile(6));
        assert_eq!(c.k, LN2);
        assert_relative_eq!(c.eps0, 2.0, epsilon = 1e-15);
        assert_eq!(c.delta0, 0.0);
        assert_eq!(c.eta0, 0.0);
        assert!(matches!(
            main1_terms(&zero_profile(6), 0.1, 1.0, 1.0, 0.0, 0.0),
            Err(Error::DegenerateProfile(_))
        ));

        let mut c_mat = vec![vec![0.0; 6]; 6];
        for (i, row) in c_mat.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let f = FunctionNorms {
            sup: 1.0,
            grad: Coords::Uniform(0.0),
            hess: Pairs::Dense(c_mat),
        };
        let p = SupNormProfile::new(6, f, FunctionNorms::zero(6)).unwrap();
        assert_relative_eq!(main1_constants(&p).eta0, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn main1_complexity_example() {
        let h = FunctionNorms {
            sup: 0.0,
            grad: Coords::Uniform(1.0),
            hess: Pairs::Dense(vec![vec![0.0]]),
        };
        let p = SupNormProfile::new(1, FunctionNorms::zero(1), h).unwrap();
        let r = main1_terms(&p, 0.5, 1.0, 1.0, 0.0, 0.0).unwrap();
        let expect = 0.25 * 2.0 * LN2 + 3.0 + (12.0 * LN2).ln();
        assert_relative_eq!(r.complexity_term, expect, epsilon = 1e-12);
        // the quoted 5.464972 is off in the sixth decimal; the formula gives 5.4649673
        assert_relative_eq!(r.complexity_term, 5.464967, epsilon = 1e-6);
        assert_eq!(r.windows.upper, 1.5);
        assert_relative_eq!(r.windows.lower, 0.5 - 6f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn lower_bound_examples() {
        assert_relative_eq!(
            main1_lower_bound(&zero_profile(6), 0.0),
            -12.0 - LN2,
            epsilon = 1e-12
        );
        let with_a = |a: f64| {
            let f = FunctionNorms {
                sup: a,
                grad: Coords::Uniform(0.5),
                hess: Pairs::Dense(vec![vec![0.3; 4]; 4]),
            };
            main1_lower_bound(
                &SupNormProfile::new(4, f, FunctionNorms::zero(4)).unwrap(),
                1.0,
            )
        };
        assert!(with_a(2.0) <= with_a(1.0));
    }

    #[test]
    fn profile_validation() {
        let bad = FunctionNorms {
            sup: 1.0,
            grad: Coords::Explicit(vec![1.0]),
            hess: Pairs::Dense(vec![vec![0.0; 2]; 2]),
        };
        assert!(SupNormProfile::new(2, bad, FunctionNorms::zero(2)).is_err());
        let asym = FunctionNorms {
            sup: 1.0,
            grad: Coords::Uniform(1.0),
            hess: Pairs::Dense(vec![vec![0.0, 1.0], vec![0.0, 0.0]]),
        };
        assert!(SupNormProfile::new(2, asym, FunctionNorms::zero(2)).is_err());
        assert!(matches!(
            SupNormProfile::new(0, FunctionNorms::zero(0), FunctionNorms::zero(0)),
            Err(Error::Dimension(_))
        ));
    }

    /// Graph classes must agree with the dense expansion of the same bounds.
    #[test]
    fn graph_classes_match_dense_expansion() {
        let model = ModelSpec::edge_triangle(5, 0.4, -0.8)
            .unwrap()
            .with_constraint(ConstraintSpec::new(0.4, 0.1).unwrap());
        let classes = ergm_profile(&model).unwrap();
        let n = pair_count(5);
        let ps = crate::graph::pairs(5);
        let dense_of = |norms: &FunctionNorms| {
            let Pairs::GraphClasses {
                same,
                overlap,
                disjoint,
                ..
            } = norms.hess
            else {
                unreachable!()
            };
            let m = (0..n)
                .map(|p| {
                    (0..n)
                        .map(|q| {
                            let (a, b) = (ps[p], ps[q]);
                            if p == q {
                                same
                            } else if a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1 {
                                overlap
                            } else {
                                disjoint
                            }
                        })
                        .collect()
                })
                .collect();
            FunctionNorms {
                sup: norms.sup,
                grad: Coords::Explicit(vec![norms.grad.at(0); n]),
                hess: Pairs::Dense(m),
            }
        };
        let dense = SupNormProfile::new(n, dense_of(classes.f()), dense_of(classes.h())).unwrap();
        let a = main1_terms(&classes, 0.1, 0.3, 0.2, 1.0, 2.0).unwrap();
        let b = main1_terms(&dense, 0.1, 0.3, 0.2, 1.0, 2.0).unwrap();
        assert_relative_eq!(a.complexity_term, b.complexity_term, max_relative = 1e-12);
        assert_relative_eq!(a.smoothness_term, b.smoothness_term, max_relative = 1e-12);
        assert_relative_eq!(a.delta0, b.delta0, max_relative = 1e-12);
        assert_relative_eq!(a.eta0, b.eta0, max_relative = 1e-12);
        let ca = cd1_terms(&classes, 0.2, 1.0).unwrap();
        let cb = cd1_terms(&dense, 0.2, 1.0).unwrap();
        assert_relative_eq!(ca.smoothness_term, cb.smoothness_term, max_relative = 1e-12);
        assert_relative_eq!(ca.lower_slack, cb.lower_slack, max_relative = 1e-12);
    }

    #[test]
    fn ergm_profile_values() {
        let model = ModelSpec::edge_only(10, 1.5)
            .unwrap()
            .with_constraint(ConstraintSpec::new(0.3, 0.05).unwrap());
        let p = ergm_profile(&model).unwrap();
        assert_eq!(p.f().sup, 150.0);
        assert_eq!(p.f().grad, Coords::Uniform(3.0));
        assert_eq!(p.h().sup, 60.0);
        let c = main1_constants(&p);
        // δ₀ = √6/n · (4n)^{1/2}
        assert_relative_eq!(c.delta0, 6f64.sqrt() * 2.0 / 45f64.sqrt(), epsilon = 1e-14);
        assert!(ergm_profile(&model.without_constraint()).is_err());
    }

    #[test]
    fn brute_examples() {
        assert_relative_eq!(brute_f(2, |_| 0.0).unwrap(), 4f64.ln(), epsilon = 1e-15);
        let lin = |x: &[f64]| x[0] + x[1];
        let two_log = 2.0 * (1.0 + 1f64.exp()).ln();
        assert_relative_eq!(brute_f(2, lin).unwrap(), two_log, epsilon = 1e-14);
        assert_relative_eq!(brute_f(2, lin).unwrap(), 2.626523, epsilon = 1e-6);
        assert_relative_eq!(
            brute_f(5, |_| 1.7).unwrap(),
            1.7 + 5.0 * LN2,
            epsilon = 1e-14
        );

        let h = |x: &[f64]| x[0] + x[1] - 1.0;
        assert_relative_eq!(
            brute_fc(2, lin, h, 0.4).unwrap(),
            1.0 + LN2,
            epsilon = 1e-14
        );
        assert_relative_eq!(brute_fc(2, lin, h, 0.4).unwrap(), 1.693147, epsilon = 1e-6);
        assert_eq!(brute_fc(2, lin, h, 10.0).unwrap(), brute_f(2, lin).unwrap());
        assert_eq!(
            brute_fc(2, lin, |_| 0.0, 0.01).unwrap(),
            brute_f(2, lin).unwrap()
        );
        assert!(matches!(
            brute_fc(2, lin, |_| 5.0, 0.1),
            Err(Error::Infeasible { .. })
        ));
        assert!(matches!(brute_f(23, |_| 0.0), Err(Error::Size { .. })));
        let big = brute_f(18, |x: &[f64]| 40.0 * x.iter().sum::<f64>()).unwrap();
        assert_relative_eq!(big, 18.0 * (1.0 + 40f64.exp()).ln(), max_relative = 1e-13);
    }

    #[test]
    fn grid_examples() {
        assert_relative_eq!(
            grid_sup(1, |_| 0.0, |_| 0.0, 0.0, 4).unwrap(),
            LN2,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            grid_sup(2, |_| 0.0, |_| 0.0, 0.0, 10).unwrap(),
            2.0 * LN2,
            epsilon = 1e-15
        );
        assert!(grid_sup(1, |_| 0.0, |_| 1.0, 0.5, 4).is_err());
        assert!(grid_sup(5, |_| 0.0, |_| 0.0, 1.0, 4).is_err());
        assert!(grid_sup(1, |_| 0.0, |_| 0.0, 1.0, 1).is_err());
        let f = |x: &[f64]| 1.3 * x[0] - 0.7 * x[0] * x[1];
        let h = |x: &[f64]| x[0] + x[1] - 0.9;
        let mut prev = f64::NEG_INFINITY;
        for r in [3, 6, 12, 24, 48] {
            let v = grid_sup(2, f, h, 0.2, r).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn multilinear_norms() {
        let f = Multilinear::new(2, vec![0.5, 1.0, -2.0, 3.0]).unwrap();
        assert_relative_eq!(f.eval(&[0.5, 0.5]), 0.5 + 0.5 - 1.0 + 0.75);
        let d0 = f.partial(0);
        assert_eq!(d0.coeffs(), &[1.0, 0.0, 3.0, 0.0]);
        let norms = f.norms();
        // corners: 0.5, 1.5, -1.5, 2.5
        assert_eq!(norms.sup, 2.5);
        assert_eq!(norms.grad, Coords::Explicit(vec![4.0, 2.0]));
        assert_eq!(
            norms.hess,
            Pairs::Dense(vec![vec![0.0, 3.0], vec![3.0, 0.0]])
        );
        assert!(Multilinear::new(2, vec![0.0; 3]).is_err());
    }

    fn random_ml(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Multilinear {
        Multilinear::new(
            n,
            (0..1 << n)
                .map(|_| rng.random_range(-scale..scale))
                .collect(),
        )
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn constrained_sum_is_sandwiched_and_monotone(seed in any::<u64>(), n in 1usize..=12, t in 0.0f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = |x: &[f64]| x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + 0.3 * x[0] * x[n - 1];
            let h = |x: &[f64]| x.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
            let full = brute_f(n, f).unwrap();
            let small = brute_fc(n, f, h, t);
            let large = brute_fc(n, f, h, t + 0.2);
            if let Ok(s) = small {
                prop_assert!(s <= full + 1e-12);
                prop_assert!(s <= large.clone().unwrap() + 1e-12);
            }
            if let Ok(l) = large {
                prop_assert!(l <= full + 1e-12);
            }
        }

        #[test]
        fn shrinking_delta_never_decreases_m_or_n(seed in any::<u64>(), n in 1usize..=3, d in 0.05f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_ml(&mut rng, n, 1.0);
            let h = random_ml(&mut rng, n, 1.0);
            let p = SupNormProfile::new(n, f.norms(), h.norms()).unwrap();
            if let (Ok(wide), Ok(narrow)) = (main1_terms(&p, 0.5, d, 0.3, 0.0, 0.0), main1_terms(&p, 0.5, d / 2.0, 0.3, 0.0, 0.0)) {
                let (Coords::Explicit(mw), Coords::Explicit(mn)) = (&wide.m, &narrow.m) else { unreachable!() };
                for (a, b) in mw.iter().zip(mn) {
                    prop_assert!(b >= a);
                }
                let (Pairs::Dense(nw), Pairs::Dense(nn)) = (&wide.n_matrix, &narrow.n_matrix) else { unreachable!() };
                for (ra, rb) in nw.iter().zip(nn) {
                    for (a, b) in ra.iter().zip(rb) {
                        prop_assert!(b >= a);
                    }
                }
            }
        }
    }
}

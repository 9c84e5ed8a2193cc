//! The homomorphism polynomial
//!
//! ```text
//! T(x) = N^{-(k-2)} Σ_{q ∈ [N]^k} Π_{{l,l'} ∈ E(H)} x_{q_l q_l'}
//! ```
//!
//! on symmetric edge-weight matrices `x ∈ [0,1]^{C(N,2)}`, together with its
//! exact first and second partial derivatives with respect to the free
//! coordinates `x_{ij}`, `i < j`, and the closed-form supremum-norm bounds
//!
//! ```text
//! ‖T‖ ≤ N²,  ‖∂T/∂x_ij‖ ≤ 2m,
//! ‖∂²T/∂x_ij∂x_i'j'‖ ≤ 4m(m-1)/N   if |{i,j,i',j'}| ∈ {2,3},
//!                     ≤ 4m(m-1)/N²  if |{i,j,i',j'}| = 4.
//! ```
//!
//! For a 0/1 matrix `T(x)/N²` is the homomorphism density of the graph
//! whose edges are the ones-entries.
//!
//! `T` is multilinear in the free coordinates only for motifs in which two
//! edges sharing a vertex always close a triangle (the edge, complete graphs).
//! For stars and paths a map may fold two motif edges onto the same pair,
//! so `T` has higher-degree terms such as `x_ij²`; the derivative routines
//! account for that multiplicity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{pair_count, pair_index, GraphMotif, MotifKind, SimpleGraph};

/// Largest motif order accepted by the polynomial routines.
pub const MAX_POLY_MOTIF_VERTICES: usize = 6;

/// Symmetric edge-weight matrix with zero diagonal, stored by free
/// coordinate in lexicographic pair order.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeVars {
    n: usize,
    values: Vec<f64>,
}

impl EdgeVars {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n < 1 {
            return Err(Error::Parameter("N must be positive".into()));
        }
        if values.len() != pair_count(n) {
            return Err(Error::Dimension(format!(
                "expected {} free coordinates for N = {n}, got {}",
                pair_count(n),
                values.len()
            )));
        }
        if let Some(&bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain {
                what: "edge variable (must lie in [0,1])",
                value: bad,
            });
        }
        Ok(Self { n, values })
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(n, vec![value; pair_count(n)])
    }

    /// The 0/1 indicator matrix of a graph.
    pub fn from_graph(g: &SimpleGraph) -> Self {
        let n = g.vertex_count();
        let mut values = vec![0.0; pair_count(n)];
        for (i, j) in g.edges() {
            values[pair_index(n, i, j)] = 1.0;
        }
        Self { n, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Free coordinates in lexicographic pair order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `x_ij` with `x_ji = x_ij` and `x_ii = 0`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.values[pair_index(self.n, i, j)],
            std::cmp::Ordering::Greater => self.values[pair_index(self.n, j, i)],
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if i == j || i >= self.n || j >= self.n {
            return Err(Error::Parameter(format!(
                "({i}, {j}) is not a free coordinate"
            )));
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Domain {
                what: "edge variable (must lie in [0,1])",
                value,
            });
        }
        let idx = pair_index(self.n, i.min(j), i.max(j));
        self.values[idx] = value;
        Ok(())
    }

    fn dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        let mut idx = 0;
        for i in 0..n {
            for j in i + 1..n {
                m[i * n + j] = self.values[idx];
                m[j * n + i] = self.values[idx];
                idx += 1;
            }
        }
        m
    }
}

fn check_motif(h: &GraphMotif) -> Result<()> {
    if h.vertex_count() < 2 {
        return Err(Error::Motif(
            "the polynomial needs a motif with k ≥ 2".into(),
        ));
    }
    if h.vertex_count() > MAX_POLY_MOTIF_VERTICES {
        return Err(Error::Size {
            what: "motif vertex count",
            value: h.vertex_count(),
            max: MAX_POLY_MOTIF_VERTICES,
        });
    }
    Ok(())
}

fn check_pair(n: usize, (i, j): (usize, usize)) -> Result<()> {
    if i >= j || j >= n {
        return Err(Error::Parameter(format!(
            "({i}, {j}) is not an ordered pair i < j < {n}"
        )));
    }
    Ok(())
}

#[inline]
fn norm(h: &GraphMotif, n: usize) -> f64 {
    (n as f64).powi(h.vertex_count() as i32 - 2)
}

/// `T(x)`.
pub fn t_eval(h: &GraphMotif, x: &EdgeVars) -> Result<f64> {
    check_motif(h)?;
    let n = x.n;
    let nf = n as f64;
    Ok(match h.kind() {
        MotifKind::Edge => 2.0 * x.values.iter().sum::<f64>(),
        MotifKind::Star(p) => {
            let mat = x.dense();
            let total: f64 = (0..n)
                .map(|c| mat[c * n..(c + 1) * n].iter().sum::<f64>().powi(p as i32))
                .sum();
            total / nf.powi(p as i32 - 1)
        }
        MotifKind::Triangle => {
            let mat = x.dense();
            let mut total = 0.0;
            for a in 0..n {
                for b in 0..n {
                    let ab = mat[a * n + b];
                    if ab == 0.0 {
                        continue;
                    }
                    let row_a = &mat[a * n..(a + 1) * n];
                    let row_b = &mat[b * n..(b + 1) * n];
                    total += ab * row_a.iter().zip(row_b).map(|(u, v)| u * v).sum::<f64>();
                }
            }
            total / nf
        }
        MotifKind::Other => t_eval_generic(h, x)?,
    })
}

/// `∂T/∂x_ij` for the free coordinate `i < j`.
pub fn t_grad(h: &GraphMotif, x: &EdgeVars, pair: (usize, usize)) -> Result<f64> {
    check_motif(h)?;
    check_pair(x.n, pair)?;
    let n = x.n;
    let (i, j) = pair;
    Ok(match h.kind() {
        MotifKind::Edge => 2.0,
        MotifKind::Star(p) => {
            let r = |c: usize| (0..n).map(|u| x.get(c, u)).sum::<f64>();
            p as f64 * (r(i).powi(p as i32 - 1) + r(j).powi(p as i32 - 1))
                / (n as f64).powi(p as i32 - 1)
        }
        MotifKind::Triangle => {
            6.0 * (0..n).map(|c| x.get(i, c) * x.get(j, c)).sum::<f64>() / n as f64
        }
        MotifKind::Other => t_grad_generic(h, x, pair)?,
    })
}

/// `∂²T/∂x_ij ∂x_i'j'` for free coordinates `i < j`, `i' < j'`.
pub fn t_hess(
    h: &GraphMotif,
    x: &EdgeVars,
    first: (usize, usize),
    second: (usize, usize),
) -> Result<f64> {
    check_motif(h)?;
    check_pair(x.n, first)?;
    check_pair(x.n, second)?;
    let n = x.n;
    Ok(match h.kind() {
        MotifKind::Edge => 0.0,
        MotifKind::Star(p) => {
            let shared = shared_vertices(first, second);
            let r = |c: usize| (0..n).map(|u| x.get(c, u)).sum::<f64>();
            let s: f64 = shared.iter().map(|&c| r(c).powi(p as i32 - 2)).sum();
            (p * (p - 1)) as f64 * s / (n as f64).powi(p as i32 - 1)
        }
        MotifKind::Triangle => {
            let shared = shared_vertices(first, second);
            if shared.len() == 1 {
                let c = shared[0];
                let other = |(a, b): (usize, usize)| if a == c { b } else { a };
                6.0 * x.get(other(first), other(second)) / n as f64
            } else {
                0.0
            }
        }
        MotifKind::Other => t_hess_generic(h, x, first, second)?,
    })
}

fn shared_vertices(p: (usize, usize), q: (usize, usize)) -> Vec<usize> {
    [p.0, p.1]
        .into_iter()
        .filter(|v| *v == q.0 || *v == q.1)
        .collect()
}

/// Brute-force enumeration of the terms of `T` over all `q ∈ [N]^k`.
///
/// For each surviving map, `visit` receives the product of the factors that
/// do not land on a target pair and the multiplicity with which motif edges
/// land on each target pair.
struct TermWalker<'a> {
    n: usize,
    mat: Vec<f64>,
    back: Vec<Vec<usize>>,
    targets: &'a [(usize, usize)],
}

impl<'a> TermWalker<'a> {
    fn new(h: &GraphMotif, x: &EdgeVars, targets: &'a [(usize, usize)]) -> Self {
        let k = h.vertex_count();
        let mut back = vec![Vec::new(); k];
        for &(a, b) in h.edges() {
            back[a.max(b)].push(a.min(b));
        }
        Self {
            n: x.n,
            mat: x.dense(),
            back,
            targets,
        }
    }

    fn walk(&self, visit: &mut dyn FnMut(f64, &[u32])) {
        let k = self.back.len();
        let mut images = vec![0usize; k];
        let mut mult = vec![0u32; self.targets.len()];
        self.rec(0, &mut images, 1.0, &mut mult, visit);
    }

    fn rec(
        &self,
        pos: usize,
        images: &mut [usize],
        prod: f64,
        mult: &mut [u32],
        visit: &mut dyn FnMut(f64, &[u32]),
    ) {
        if pos == images.len() {
            visit(prod, mult);
            return;
        }
        'image: for v in 0..self.n {
            images[pos] = v;
            let mut p = prod;
            let mut added = [usize::MAX; 8];
            let mut n_added = 0;
            for &b in &self.back[pos] {
                let u = images[b];
                if u == v {
                    for &slot in &added[..n_added] {
                        mult[slot] -= 1;
                    }
                    continue 'image;
                }
                let key = (u.min(v), u.max(v));
                if let Some(slot) = self.targets.iter().position(|&t| t == key) {
                    mult[slot] += 1;
                    added[n_added] = slot;
                    n_added += 1;
                } else {
                    p *= self.mat[u * self.n + v];
                }
            }
            if p != 0.0 {
                self.rec(pos + 1, images, p, mult, visit);
            }
            for &slot in &added[..n_added] {
                mult[slot] -= 1;
            }
        }
    }
}

/// `T(x)` by direct summation over all vertex maps.
pub fn t_eval_generic(h: &GraphMotif, x: &EdgeVars) -> Result<f64> {
    check_motif(h)?;
    let mut total = 0.0;
    TermWalker::new(h, x, &[]).walk(&mut |p, _| total += p);
    Ok(total / norm(h, x.n))
}

/// `∂T/∂x_ij` by direct summation over all vertex maps.
pub fn t_grad_generic(h: &GraphMotif, x: &EdgeVars, pair: (usize, usize)) -> Result<f64> {
    check_motif(h)?;
    check_pair(x.n, pair)?;
    let xv = x.get(pair.0, pair.1);
    let targets = [pair];
    let mut total = 0.0;
    TermWalker::new(h, x, &targets).walk(&mut |p, mult| {
        let r = mult[0];
        if r > 0 {
            total += r as f64 * xv.powi(r as i32 - 1) * p;
        }
    });
    Ok(total / norm(h, x.n))
}

/// `∂²T/∂x_ij ∂x_i'j'` by direct summation over all vertex maps.
pub fn t_hess_generic(
    h: &GraphMotif,
    x: &EdgeVars,
    first: (usize, usize),
    second: (usize, usize),
) -> Result<f64> {
    check_motif(h)?;
    check_pair(x.n, first)?;
    check_pair(x.n, second)?;
    let mut total = 0.0;
    if first == second {
        let xv = x.get(first.0, first.1);
        let targets = [first];
        TermWalker::new(h, x, &targets).walk(&mut |p, mult| {
            let r = mult[0];
            if r > 1 {
                total += (r * (r - 1)) as f64 * xv.powi(r as i32 - 2) * p;
            }
        });
    } else {
        let x1 = x.get(first.0, first.1);
        let x2 = x.get(second.0, second.1);
        let targets = [first, second];
        TermWalker::new(h, x, &targets).walk(&mut |p, mult| {
            let (r1, r2) = (mult[0], mult[1]);
            if r1 > 0 && r2 > 0 {
                total += (r1 * r2) as f64 * x1.powi(r1 as i32 - 1) * x2.powi(r2 as i32 - 1) * p;
            }
        });
    }
    Ok(total / norm(h, x.n))
}

/// Closed-form supremum-norm bounds for `T` and the covering-number bound
/// for its gradient range.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TDerivativeBounds {
    pub motif: String,
    pub motif_vertices: usize,
    pub motif_edges: usize,
    pub n_vertices: usize,
    /// `‖T‖ ≤ N²`
    pub sup_t: f64,
    /// `‖∂T/∂x_ij‖ ≤ 2m`
    pub sup_grad: f64,
    /// `4m(m-1)/N`, pairs sharing a vertex (or equal)
    pub sup_hess_overlap: f64,
    /// `4m(m-1)/N²`, vertex-disjoint pairs
    pub sup_hess_disjoint: f64,
    pub covering_c: f64,
    pub covering_big_c: f64,
}

impl TDerivativeBounds {
    /// Upper bound on `log |D_T(ε)|`:
    /// `(c m⁴k⁴N/ε⁴) · log(C m⁴k⁴/ε⁴)`.
    ///
    /// `c` and `C` are unspecified universal constants supplied by the
    /// caller; the value is a functional form, not a rigorous number.
    pub fn covering_log_cardinality(&self, eps: f64) -> f64 {
        let mk4 = ((self.motif_edges * self.motif_vertices) as f64).powi(4);
        let e4 = eps.powi(4);
        self.covering_c * mk4 * self.n_vertices as f64 / e4 * (self.covering_big_c * mk4 / e4).ln()
    }

    /// The second-derivative bound that applies to the pair of coordinates.
    pub fn hess_bound(&self, first: (usize, usize), second: (usize, usize)) -> f64 {
        let mut vs = vec![first.0, first.1, second.0, second.1];
        vs.sort_unstable();
        vs.dedup();
        if vs.len() == 4 {
            self.sup_hess_disjoint
        } else {
            self.sup_hess_overlap
        }
    }
}

/// Bounds for motif `h` on `N` vertices with covering constants `(c, C)`.
pub fn t_derivative_bounds(
    h: &GraphMotif,
    n: usize,
    covering_c: f64,
    covering_big_c: f64,
) -> Result<TDerivativeBounds> {
    if !(covering_c > 0.0 && covering_big_c > 0.0) {
        return Err(Error::Parameter(
            "covering constants must be positive".into(),
        ));
    }
    if n == 0 {
        return Err(Error::Parameter("N must be positive".into()));
    }
    let m = h.edge_count() as f64;
    let nf = n as f64;
    Ok(TDerivativeBounds {
        motif: h.label(),
        motif_vertices: h.vertex_count(),
        motif_edges: h.edge_count(),
        n_vertices: n,
        sup_t: nf * nf,
        sup_grad: 2.0 * m,
        sup_hess_overlap: 4.0 * m * (m - 1.0) / nf,
        sup_hess_disjoint: 4.0 * m * (m - 1.0) / (nf * nf),
        covering_c,
        covering_big_c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{hom_density, pairs};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn k3_indicator() -> EdgeVars {
        EdgeVars::from_graph(&SimpleGraph::complete(3).unwrap())
    }

    #[test]
    fn edge_vars_validation() {
        assert!(EdgeVars::new(3, vec![0.5; 2]).is_err());
        assert!(EdgeVars::new(3, vec![0.5, 1.5, 0.0]).is_err());
        let mut x = EdgeVars::constant(4, 0.25).unwrap();
        x.set(3, 1, 0.75).unwrap();
        assert_eq!(x.get(1, 3), 0.75);
        assert_eq!(x.get(2, 2), 0.0);
        assert!(x.set(1, 1, 0.5).is_err());
        assert!(x.set(0, 1, -0.1).is_err());
    }

    #[test]
    fn t_eval_examples() {
        let half = EdgeVars::constant(3, 0.5).unwrap();
        assert_relative_eq!(t_eval(&GraphMotif::edge(), &half).unwrap(), 3.0);
        assert_relative_eq!(
            t_eval(&GraphMotif::triangle(), &k3_indicator()).unwrap(),
            2.0
        );
        let zero = EdgeVars::constant(5, 0.0).unwrap();
        for h in [
            GraphMotif::edge(),
            GraphMotif::triangle(),
            GraphMotif::star(3).unwrap(),
        ] {
            assert_eq!(t_eval(&h, &zero).unwrap(), 0.0);
        }
        let single = GraphMotif::new(1, []).unwrap();
        assert!(t_eval(&single, &half).is_err());
    }

    #[test]
    fn t_grad_examples() {
        let half = EdgeVars::constant(3, 0.5).unwrap();
        for n in [2, 5, 8] {
            let x = EdgeVars::constant(n, 0.3).unwrap();
            assert_eq!(t_grad(&GraphMotif::edge(), &x, (0, 1)).unwrap(), 2.0);
        }
        // 2·x13·x23 at x ≡ 1/2
        assert_relative_eq!(t_grad(&GraphMotif::triangle(), &half, (0, 1)).unwrap(), 0.5);
        let zero = EdgeVars::constant(4, 0.0).unwrap();
        for h in [
            GraphMotif::triangle(),
            GraphMotif::star(2).unwrap(),
            GraphMotif::path(3).unwrap(),
        ] {
            assert_eq!(t_grad(&h, &zero, (1, 3)).unwrap(), 0.0);
        }
        assert!(t_grad(&GraphMotif::edge(), &half, (1, 0)).is_err());
    }

    #[test]
    fn t_hess_examples() {
        let x = EdgeVars::constant(5, 0.4).unwrap();
        assert_eq!(
            t_hess(&GraphMotif::edge(), &x, (0, 1), (2, 3)).unwrap(),
            0.0
        );
        let ones = k3_indicator();
        assert_relative_eq!(
            t_hess(&GraphMotif::triangle(), &ones, (0, 1), (0, 2)).unwrap(),
            2.0
        );
        assert_eq!(
            t_hess(&GraphMotif::triangle(), &ones, (0, 1), (0, 1)).unwrap(),
            0.0
        );
    }

    #[test]
    fn derivative_bounds_examples() {
        let b = t_derivative_bounds(&GraphMotif::edge(), 10, 1.0, 1.0).unwrap();
        assert_eq!(b.sup_grad, 2.0);
        assert_eq!((b.sup_hess_overlap, b.sup_hess_disjoint), (0.0, 0.0));
        let b = t_derivative_bounds(&GraphMotif::triangle(), 10, 1.0, 1.0).unwrap();
        assert_eq!(b.sup_grad, 6.0);
        assert_relative_eq!(b.sup_hess_overlap, 2.4);
        assert_relative_eq!(b.sup_hess_disjoint, 0.24);
        assert_eq!(b.hess_bound((0, 1), (2, 3)), b.sup_hess_disjoint);
        assert_eq!(b.hess_bound((0, 1), (1, 3)), b.sup_hess_overlap);
        assert_eq!(b.hess_bound((0, 1), (0, 1)), b.sup_hess_overlap);
        let b = t_derivative_bounds(&GraphMotif::star(3).unwrap(), 5, 1.0, 1.0).unwrap();
        assert_eq!(b.sup_t, 25.0);
        assert!(t_derivative_bounds(&GraphMotif::edge(), 5, 0.0, 1.0).is_err());
    }

    #[test]
    fn covering_bound_functional_form() {
        let b = t_derivative_bounds(&GraphMotif::triangle(), 20, 2.0, 3.0).unwrap();
        let eps: f64 = 0.5;
        let mk4 = (3.0f64 * 3.0).powi(4);
        let expected = 2.0 * mk4 * 20.0 / eps.powi(4) * (3.0 * mk4 / eps.powi(4)).ln();
        assert_relative_eq!(b.covering_log_cardinality(eps), expected);
        // linear in N
        let b40 = t_derivative_bounds(&GraphMotif::triangle(), 40, 2.0, 3.0).unwrap();
        assert_relative_eq!(b40.covering_log_cardinality(eps), 2.0 * expected);
    }

    #[test]
    fn fast_paths_agree_with_direct_summation() {
        let motifs = [
            GraphMotif::edge(),
            GraphMotif::triangle(),
            GraphMotif::star(2).unwrap(),
            GraphMotif::star(3).unwrap(),
        ];
        let n = 5;
        let vals: Vec<f64> = (0..pair_count(n))
            .map(|i| (i as f64 * 0.731).sin() * 0.5 + 0.5)
            .collect();
        let x = EdgeVars::new(n, vals).unwrap();
        let ps = pairs(n);
        for h in &motifs {
            assert_relative_eq!(
                t_eval(h, &x).unwrap(),
                t_eval_generic(h, &x).unwrap(),
                max_relative = 1e-12
            );
            for &p in &ps {
                assert_relative_eq!(
                    t_grad(h, &x, p).unwrap(),
                    t_grad_generic(h, &x, p).unwrap(),
                    max_relative = 1e-12,
                    epsilon = 1e-14
                );
                for &q in &ps {
                    assert_relative_eq!(
                        t_hess(h, &x, p, q).unwrap(),
                        t_hess_generic(h, &x, p, q).unwrap(),
                        max_relative = 1e-12,
                        epsilon = 1e-14
                    );
                }
            }
        }
    }

    #[test]
    fn two_star_is_quadratic_in_each_coordinate() {
        // folded maps contribute x_ij², so T is not affine in x_ij
        let h = GraphMotif::star(2).unwrap();
        let mut x = EdgeVars::constant(4, 0.3).unwrap();
        let at = |x: &mut EdgeVars, v: f64| {
            x.set(0, 2, v).unwrap();
            t_eval(&h, x).unwrap()
        };
        let (t0, t1, th) = (at(&mut x, 0.0), at(&mut x, 1.0), at(&mut x, 0.5));
        assert!((th - 0.5 * (t0 + t1)).abs() > 1e-6);
        x.set(0, 2, 0.0).unwrap();
        let g0 = t_grad(&h, &x, (0, 2)).unwrap();
        let h0 = t_hess(&h, &x, (0, 2), (0, 2)).unwrap();
        for lam in [0.25, 0.5, 0.9] {
            assert_relative_eq!(
                at(&mut x, lam),
                t0 + lam * g0 + 0.5 * lam * lam * h0,
                max_relative = 1e-12
            );
        }
    }

    fn edge_vars_strategy(n: usize) -> impl Strategy<Value = EdgeVars> {
        proptest::collection::vec(0.0f64..=1.0, pair_count(n))
            .prop_map(move |v| EdgeVars::new(n, v).unwrap())
    }

    proptest! {
        #[test]
        fn multilinear_for_edge_and_triangle(
            x in (3usize..=7).prop_flat_map(edge_vars_strategy),
            lam in 0.0f64..=1.0,
            pick in 0usize..1000,
        ) {
            let n = x.n();
            let (i, j) = pairs(n)[pick % pair_count(n)];
            for h in [GraphMotif::edge(), GraphMotif::triangle()] {
                let mut y = x.clone();
                y.set(i, j, 0.0).unwrap();
                let t0 = t_eval(&h, &y).unwrap();
                y.set(i, j, 1.0).unwrap();
                let t1 = t_eval(&h, &y).unwrap();
                y.set(i, j, lam).unwrap();
                let tl = t_eval(&h, &y).unwrap();
                prop_assert!((tl - ((1.0 - lam) * t0 + lam * t1)).abs() <= 1e-10 * (1.0 + t1.abs()));
            }
        }

        #[test]
        fn indicator_matrices_reproduce_hom_density(bits in 0u64..(1 << 15)) {
            let g = SimpleGraph::from_pair_bits(6, bits).unwrap();
            let x = EdgeVars::from_graph(&g);
            for h in [GraphMotif::edge(), GraphMotif::triangle(), GraphMotif::star(2).unwrap(), GraphMotif::path(3).unwrap()] {
                let t = t_eval(&h, &x).unwrap() / 36.0;
                prop_assert!((t - hom_density(&h, &g)).abs() <= 1e-15);
            }
        }
    }
}

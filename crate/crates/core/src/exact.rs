//! Exact normalization constants of (constrained) exponential random graphs
//! by enumerating every labeled graph on `N ≤ 8` vertices.
//!
//! A single Gray-code pass accumulates, per edge count `k`, the log partition
//! sum `log Σ_{|E(G)|=k} exp(N² Σ ζ_i t(H_i,G))` together with weighted motif
//! densities. Any edge-density window is then a union of these buckets, so
//! `ψ`, `ψ^{e,ζ}_{N,t}` and expectations for every window come from one pass.
//!
//! Edge density is `e(G) = t(K₂, G) = 2|E(G)|/N²` throughout, not
//! `|E(G)|/C(N,2)`; the two differ by a factor `(N−1)/N`, which shifts which
//! edge counts fall inside a window.
//!
//! The graph space is split into `2^8` sub-cubes by the top pair bits. Each
//! sub-cube is walked independently (in parallel when a thread pool is
//! available) and results are merged in sub-cube order, so values are
//! bit-identical for any number of worker threads.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{
    check_enumeration_size, hom_count, pair_count, pairs, GraphMotif, HomTracker, SimpleGraph,
};
use crate::numerics::CompensatedSum;
use crate::variational::ConstraintSpec;

/// Default size gate for exact computations.
pub const DEFAULT_EXACT_MAX_N: usize = 8;

/// Environment variable overriding the exact-mode size gate.
pub const MAX_N_ENV: &str = "CERGM_MAX_N";

const SUBCUBE_BITS: usize = 8;

/// An `s`-parameter exponential random graph model on `N` vertices,
/// optionally conditioned on an edge-density window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelSpec {
    n: usize,
    motifs: Vec<GraphMotif>,
    zetas: Vec<f64>,
    constraint: Option<ConstraintSpec>,
}

impl ModelSpec {
    /// `motifs[0]` must be the single edge.
    pub fn new(n: usize, motifs: Vec<GraphMotif>, zetas: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("N must be positive".into()));
        }
        if motifs.is_empty() {
            return Err(Error::Parameter("a model needs at least one motif".into()));
        }
        if !motifs[0].is_single_edge() {
            return Err(Error::Motif(
                "the first motif must be the single edge".into(),
            ));
        }
        if motifs.len() != zetas.len() {
            return Err(Error::Parameter(format!(
                "{} motifs but {} parameters",
                motifs.len(),
                zetas.len()
            )));
        }
        if zetas.iter().any(|z| !z.is_finite()) {
            return Err(Error::Parameter("parameters must be finite".into()));
        }
        Ok(Self {
            n,
            motifs,
            zetas,
            constraint: None,
        })
    }

    pub fn edge_only(n: usize, zeta: f64) -> Result<Self> {
        Self::new(n, vec![GraphMotif::edge()], vec![zeta])
    }

    pub fn edge_triangle(n: usize, zeta_edge: f64, zeta_triangle: f64) -> Result<Self> {
        Self::new(
            n,
            vec![GraphMotif::edge(), GraphMotif::triangle()],
            vec![zeta_edge, zeta_triangle],
        )
    }

    pub fn with_constraint(mut self, constraint: ConstraintSpec) -> Self {
        self.constraint = Some(constraint);
        self
    }

    pub fn without_constraint(&self) -> Self {
        let mut m = self.clone();
        m.constraint = None;
        m
    }

    /// Same motifs and window, new parameters.
    pub fn with_zetas(&self, zetas: Vec<f64>) -> Result<Self> {
        let mut m = Self::new(self.n, self.motifs.clone(), zetas)?;
        m.constraint = self.constraint;
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_pairs(&self) -> usize {
        pair_count(self.n)
    }

    pub fn motifs(&self) -> &[GraphMotif] {
        &self.motifs
    }

    pub fn zetas(&self) -> &[f64] {
        &self.zetas
    }

    pub fn constraint(&self) -> Option<&ConstraintSpec> {
        self.constraint.as_ref()
    }

    /// `B = 1 + Σ|ζ_i|`.
    pub fn b(&self) -> f64 {
        1.0 + self.zetas.iter().map(|z| z.abs()).sum::<f64>()
    }

    /// `N^{2−k_i}`: converts a homomorphism count into `N²·t(H_i, G)`.
    pub(crate) fn energy_scales(&self) -> Vec<f64> {
        self.motifs
            .iter()
            .map(|m| (self.n as f64).powi(2 - m.vertex_count() as i32))
            .collect()
    }

    /// `N² Σ ζ_i t(H_i, G)`.
    pub fn energy(&self, g: &SimpleGraph) -> f64 {
        self.energy_scales()
            .iter()
            .zip(&self.motifs)
            .zip(&self.zetas)
            .map(|((s, m), z)| z * s * hom_count(m, g) as f64)
            .sum()
    }
}

/// Edge counts `k` whose density `2k/N²` lies in the window.
pub fn feasible_edge_counts(n: usize, window: &ConstraintSpec) -> Vec<usize> {
    let n2 = (n * n) as f64;
    (0..=pair_count(n))
        .filter(|&k| window.contains(2.0 * k as f64 / n2))
        .collect()
}

/// Infeasibility error naming the achievable density closest to `e`.
pub fn window_error(n: usize, window: &ConstraintSpec) -> Error {
    let n2 = (n * n) as f64;
    let nearest = (0..=pair_count(n))
        .map(|k| 2.0 * k as f64 / n2)
        .min_by(|a, b| (a - window.e).abs().total_cmp(&(b - window.e).abs()));
    Error::Infeasible {
        lo: window.lo(),
        hi: window.hi(),
        nearest,
    }
}

fn require_feasible(n: usize, window: &ConstraintSpec) -> Result<Vec<usize>> {
    let ks = feasible_edge_counts(n, window);
    if ks.is_empty() {
        Err(window_error(n, window))
    } else {
        Ok(ks)
    }
}

pub type ProgressFn = dyn Fn(usize, usize) + Send + Sync;

/// Size gate and progress reporting for exact enumeration.
#[derive(Clone)]
pub struct ExactOptions {
    /// Largest `N` accepted; `N = 8` (2^28 graphs) must be enabled
    /// explicitly.
    pub max_n: usize,
    /// Called as `(finished_subcubes, total_subcubes)`.
    pub progress: Option<Arc<ProgressFn>>,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            max_n: DEFAULT_EXACT_MAX_N,
            progress: None,
        }
    }
}

impl std::fmt::Debug for ExactOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExactOptions")
            .field("max_n", &self.max_n)
            .field("progress", &self.progress.is_some())
            .finish()
    }
}

impl ExactOptions {
    pub fn with_max_n(max_n: usize) -> Self {
        Self {
            max_n,
            ..Self::default()
        }
    }

    /// Default options with the gate taken from `CERGM_MAX_N` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_N_ENV) {
            Ok(v) => {
                let max_n = v.trim().parse().map_err(|_| {
                    Error::Parameter(format!("{MAX_N_ENV}={v:?} is not a positive integer"))
                })?;
                Ok(Self::with_max_n(max_n))
            }
            Err(_) => Ok(Self::default()),
        }
    }
}

/// Log-weight and weighted statistics of all graphs with one edge count.
#[derive(Clone, Debug)]
struct Bucket {
    graphs: u64,
    shift: f64,
    weight: CompensatedSum,
    stats: Vec<CompensatedSum>,
}

impl Bucket {
    fn new(n_stats: usize) -> Self {
        Self {
            graphs: 0,
            shift: f64::NEG_INFINITY,
            weight: CompensatedSum::new(),
            stats: vec![CompensatedSum::new(); n_stats],
        }
    }

    #[inline]
    fn add(&mut self, log_weight: f64, densities: &[f64]) {
        self.graphs += 1;
        if log_weight > self.shift {
            if self.shift.is_finite() {
                let f = (self.shift - log_weight).exp();
                self.rescale(f);
            }
            self.shift = log_weight;
        }
        let w = (log_weight - self.shift).exp();
        self.weight.add(w);
        for (s, &d) in self.stats.iter_mut().zip(densities) {
            s.add(w * d);
        }
    }

    fn rescale(&mut self, f: f64) {
        self.weight.scale(f);
        for s in &mut self.stats {
            s.scale(f);
        }
    }

    fn merge(&mut self, other: &Bucket) {
        self.graphs += other.graphs;
        if !other.shift.is_finite() {
            return;
        }
        let mut incoming = other.clone();
        if other.shift > self.shift {
            if self.shift.is_finite() {
                self.rescale((self.shift - other.shift).exp());
            }
            self.shift = other.shift;
        } else {
            incoming.rescale((other.shift - self.shift).exp());
        }
        self.weight.merge(&incoming.weight);
        for (s, o) in self.stats.iter_mut().zip(&incoming.stats) {
            s.merge(o);
        }
    }

    fn log_weight(&self) -> f64 {
        if self.shift.is_finite() {
            self.shift + self.weight.value().ln()
        } else {
            f64::NEG_INFINITY
        }
    }
}

/// Per-edge-count summary of a full enumeration.
#[derive(Clone, Debug)]
pub struct ExactTable {
    n: usize,
    zetas: Vec<f64>,
    observed: Vec<GraphMotif>,
    model_motifs: usize,
    buckets: Vec<Bucket>,
}

/// Graph counts reported alongside exact results.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GraphCounts {
    pub total: u64,
    pub in_window: u64,
}

impl ExactTable {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Model motifs followed by any extra observed motifs.
    pub fn observed(&self) -> &[GraphMotif] {
        &self.observed
    }

    fn selected(&self, window: Option<&ConstraintSpec>) -> Result<Vec<usize>> {
        match window {
            None => Ok((0..self.buckets.len()).collect()),
            Some(w) => require_feasible(self.n, w),
        }
    }

    /// `log Σ exp(N² Σ ζ_i t(H_i, G))` over graphs in the window (all graphs
    /// when `window` is `None`).
    pub fn log_partition(&self, window: Option<&ConstraintSpec>) -> Result<f64> {
        let ks = self.selected(window)?;
        let shift = ks
            .iter()
            .map(|&k| self.buckets[k].shift)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut total = CompensatedSum::new();
        for &k in &ks {
            let b = &self.buckets[k];
            if b.shift.is_finite() {
                total.add(b.weight.value() * (b.shift - shift).exp());
            }
        }
        let value = shift + total.value().ln();
        if !value.is_finite() {
            return Err(Error::Numerical("log partition sum is not finite".into()));
        }
        Ok(value)
    }

    /// `N^{-2} log Z` over the window.
    pub fn psi(&self, window: Option<&ConstraintSpec>) -> Result<f64> {
        Ok(self.log_partition(window)? / (self.n * self.n) as f64)
    }

    /// `E[t(H_j, G)]` for observed motif `j` under the (conditional) measure.
    pub fn expectation(&self, j: usize, window: Option<&ConstraintSpec>) -> Result<f64> {
        if j >= self.observed.len() {
            return Err(Error::Parameter(format!("no observed motif {j}")));
        }
        let ks = self.selected(window)?;
        let shift = ks
            .iter()
            .map(|&k| self.buckets[k].shift)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut num = CompensatedSum::new();
        let mut den = CompensatedSum::new();
        for &k in &ks {
            let b = &self.buckets[k];
            if b.shift.is_finite() {
                let f = (b.shift - shift).exp();
                num.add(b.stats[j].value() * f);
                den.add(b.weight.value() * f);
            }
        }
        Ok(num.value() / den.value())
    }

    pub fn counts(&self, window: Option<&ConstraintSpec>) -> GraphCounts {
        let total = self.buckets.iter().map(|b| b.graphs).sum();
        let in_window = match window {
            None => total,
            Some(w) => feasible_edge_counts(self.n, w)
                .iter()
                .map(|&k| self.buckets[k].graphs)
                .sum(),
        };
        GraphCounts { total, in_window }
    }

    /// Log partition sum restricted to graphs with exactly `k` edges.
    pub fn bucket_log_weight(&self, k: usize) -> f64 {
        self.buckets
            .get(k)
            .map_or(f64::NEG_INFINITY, Bucket::log_weight)
    }

    /// Probability of `g` under the measure conditioned on `window`
    /// (unconditioned when `None`).
    pub fn prob_mass(&self, g: &SimpleGraph, window: Option<&ConstraintSpec>) -> Result<f64> {
        if g.vertex_count() != self.n {
            return Err(Error::Parameter(
                "graph order does not match the table".into(),
            ));
        }
        if let Some(w) = window {
            let density = 2.0 * g.edge_count() as f64 / (self.n * self.n) as f64;
            if !w.contains(density) {
                require_feasible(self.n, w)?;
                return Ok(0.0);
            }
        }
        let nf = self.n as f64;
        let energy: f64 = self.observed[..self.model_motifs]
            .iter()
            .zip(&self.zetas)
            .map(|(m, z)| z * nf.powi(2 - m.vertex_count() as i32) * hom_count(m, g) as f64)
            .sum();
        Ok((energy - self.log_partition(window)?).exp())
    }
}

/// Enumerates all graphs of `model` (ignoring its window) and tabulates log
/// weights and the densities of the model motifs plus `extra`.
pub fn enumerate_exact(
    model: &ModelSpec,
    extra: &[GraphMotif],
    opts: &ExactOptions,
) -> Result<ExactTable> {
    let n = model.n();
    check_enumeration_size(n, opts.max_n)?;
    let mut observed = model.motifs().to_vec();
    observed.extend_from_slice(extra);
    let n_pairs = pair_count(n);
    let fixed = n_pairs.min(SUBCUBE_BITS);
    let free = n_pairs - fixed;
    let total_chunks = 1usize << fixed;
    let done = AtomicUsize::new(0);

    let walk = |prefix: usize| -> Result<Vec<Bucket>> {
        let out = walk_chunk(model, &observed, fixed, free, prefix as u64)?;
        let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(p) = &opts.progress {
            p(finished, total_chunks);
        }
        Ok(out)
    };
    let chunks: Vec<Vec<Bucket>> = (0..total_chunks)
        .into_par_iter()
        .map(walk)
        .collect::<Result<_>>()?;

    let mut buckets = vec![Bucket::new(observed.len()); n_pairs + 1];
    for chunk in &chunks {
        for (acc, b) in buckets.iter_mut().zip(chunk) {
            acc.merge(b);
        }
    }
    Ok(ExactTable {
        n,
        zetas: model.zetas().to_vec(),
        observed,
        model_motifs: model.motifs().len(),
        buckets,
    })
}

fn walk_chunk(
    model: &ModelSpec,
    observed: &[GraphMotif],
    fixed: usize,
    free: usize,
    prefix: u64,
) -> Result<Vec<Bucket>> {
    let n = model.n();
    let all_pairs = pairs(n);
    let mut g = SimpleGraph::empty(n)?;
    for b in 0..fixed {
        if prefix >> b & 1 == 1 {
            let (i, j) = all_pairs[free + b];
            g.set_edge(i, j, true);
        }
    }
    let s = model.motifs().len();
    let mut tracker = HomTracker::new(observed, &g);
    let scales = model.energy_scales();
    let zetas = model.zetas();
    let nf = n as f64;
    let density_scales: Vec<f64> = observed
        .iter()
        .map(|m| nf.powi(-(m.vertex_count() as i32)))
        .collect();
    let mut densities = vec![0.0; observed.len()];
    let mut buckets = vec![Bucket::new(observed.len()); all_pairs.len() + 1];

    let mut record = |tracker: &HomTracker, densities: &mut [f64]| -> Result<()> {
        let counts = tracker.counts();
        let mut energy = 0.0;
        for i in 0..s {
            energy += zetas[i] * scales[i] * counts[i] as f64;
        }
        if !energy.is_finite() {
            return Err(Error::Numerical("graph energy is not finite".into()));
        }
        for (d, (&c, &sc)) in densities.iter_mut().zip(counts.iter().zip(&density_scales)) {
            *d = c as f64 * sc;
        }
        // counts[0] is hom(K₂, G) = 2|E(G)|
        let k = (counts[0] / 2) as usize;
        buckets[k].add(energy, densities);
        Ok(())
    };

    record(&tracker, &mut densities)?;
    for step in 1..(1u64 << free) {
        let (i, j) = all_pairs[step.trailing_zeros() as usize];
        tracker.toggle(&mut g, i, j);
        record(&tracker, &mut densities)?;
    }
    Ok(buckets)
}

/// `ψ_N^ζ = N^{-2} log Σ_G exp(N² Σ ζ_i t(H_i, G))`, ignoring any window on
/// the model.
pub fn psi_exact(model: &ModelSpec, opts: &ExactOptions) -> Result<f64> {
    enumerate_exact(model, &[], opts)?.psi(None)
}

/// `ψ^{e,ζ}_{N,t}`: the same sum restricted to `|e(G) − e| ≤ t`.
pub fn psi_cond_exact(model: &ModelSpec, opts: &ExactOptions) -> Result<f64> {
    let window = model
        .constraint()
        .ok_or_else(|| Error::Parameter("conditional constant needs a constraint".into()))?;
    require_feasible(model.n(), window)?;
    enumerate_exact(model, &[], opts)?.psi(Some(window))
}

/// Conditional probability of `g` (unconditional when the model has no
/// window).
pub fn cond_prob_mass(model: &ModelSpec, g: &SimpleGraph, opts: &ExactOptions) -> Result<f64> {
    if let Some(w) = model.constraint() {
        require_feasible(model.n(), w)?;
    }
    enumerate_exact(model, &[], opts)?.prob_mass(g, model.constraint())
}

/// `E[t(H, G)]` under the model's (conditional) measure.
pub fn expectation_exact(model: &ModelSpec, h: &GraphMotif, opts: &ExactOptions) -> Result<f64> {
    if let Some(w) = model.constraint() {
        require_feasible(model.n(), w)?;
    }
    let table = enumerate_exact(model, std::slice::from_ref(h), opts)?;
    table.expectation(model.motifs().len(), model.constraint())
}

fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().unwrap_or(f64::INFINITY).ln()
    } else {
        let shift = bits - 64;
        let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// `ψ^{e,0}_{N,t} = N^{-2} log Σ_{k: |2k/N² − e| ≤ t} C(n, k)` with the sum
/// of binomials taken in exact integer arithmetic.
pub fn truncated_binomial_psi(n: usize, window: &ConstraintSpec) -> Result<f64> {
    if n == 0 {
        return Err(Error::Parameter("N must be positive".into()));
    }
    Ok(ln_biguint(&truncated_binomial_count(n, window)?) / (n * n) as f64)
}

/// Number of graphs on `n` vertices whose edge density lies in the window.
pub fn truncated_binomial_count(n: usize, window: &ConstraintSpec) -> Result<BigUint> {
    let ks = require_feasible(n, window)?;
    let n_pairs = pair_count(n);
    let mut total = BigUint::default();
    let mut binom = BigUint::one();
    for k in 0..=n_pairs {
        if ks.binary_search(&k).is_ok() {
            total += &binom;
        }
        binom = binom * (n_pairs - k) / (k + 1);
    }
    Ok(total)
}

/// Exact law of the edge count at `ζ = 0` restricted to the window:
/// `P(k) ∝ C(n, k)`. Returned as `(k, probability)` pairs.
pub fn truncated_binomial_pmf(n: usize, window: &ConstraintSpec) -> Result<Vec<(usize, f64)>> {
    let ks = require_feasible(n, window)?;
    let n_pairs = pair_count(n);
    let log_binom = |k: usize| -> f64 {
        (1..=k)
            .map(|i| ((n_pairs - k + i) as f64).ln() - (i as f64).ln())
            .sum()
    };
    let logs: Vec<f64> = ks.iter().map(|&k| log_binom(k)).collect();
    let norm = crate::numerics::log_sum_exp(&logs);
    Ok(ks
        .iter()
        .zip(&logs)
        .map(|(&k, &l)| (k, (l - norm).exp()))
        .collect())
}

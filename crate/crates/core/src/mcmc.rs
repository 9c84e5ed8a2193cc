//! Metropolis sampling of the window-conditioned measure and
//! thermodynamic-integration estimates of `ψ^{e,ζ}_{N,t}`.
//!
//! Two symmetric proposals are mixed: toggling a uniformly chosen pair
//! (moves the edge count by one) and swapping a uniformly chosen edge with a
//! uniformly chosen non-edge (keeps the edge count). Toggles that would leave
//! the window are rejected and counted separately. A sweep is `C(N,2)`
//! proposals.
//!
//! Since `∂ψ/∂ζ_i = E[t(H_i, G)]` under the conditional measure,
//!
//! ```text
//! ψ^{e,ζ} = ψ^{e,0} + ∫₀¹ Σ_i ζ_i E_{uζ}[t(H_i, G)] du,
//! ```
//!
//! with `ψ^{e,0}` the exact truncated-binomial value. The integral uses
//! Gauss–Legendre quadrature with one chain per node.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{feasible_edge_counts, truncated_binomial_psi, window_error, ModelSpec};
use crate::graph::{pair_count, pairs, HomTracker, SimpleGraph};
use crate::numerics::gauss_legendre;
use crate::variational::ConstraintSpec;

/// Sampler settings. One sweep is `C(N,2)` proposals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainConfig {
    pub seed: u64,
    pub sweeps: u64,
    pub burn_in: u64,
    /// Record every `thin`-th sweep after burn-in.
    pub thin: u64,
    /// Probability of proposing a swap rather than a toggle.
    pub move_mix: f64,
    /// Stream of the seeded generator; parallel chains use distinct streams.
    pub stream: u64,
    pub record_trace: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            sweeps: 10_000,
            burn_in: 1_000,
            thin: 1,
            move_mix: 0.5,
            stream: 0,
            record_trace: false,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sweeps <= self.burn_in {
            return Err(Error::ChainConfig(format!(
                "sweeps ({}) must exceed burn_in ({})",
                self.sweeps, self.burn_in
            )));
        }
        if self.thin == 0 {
            return Err(Error::ChainConfig("thin must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.move_mix) {
            return Err(Error::ChainConfig(format!(
                "move_mix = {} must lie in [0, 1]",
                self.move_mix
            )));
        }
        Ok(())
    }

    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// One recorded sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub sweep: u64,
    pub edge_count: usize,
    pub densities: Vec<f64>,
    /// Fractions over the proposals of this sweep.
    pub accept_rate: f64,
    pub window_reject_rate: f64,
}

/// Summary of one chain after burn-in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainStats {
    pub motifs: Vec<String>,
    pub samples: u64,
    /// Mean of `t(H_i, G)` per model motif.
    pub means: Vec<f64>,
    /// Batch-means standard errors.
    pub std_errors: Vec<f64>,
    /// Split-chain potential scale reduction per motif.
    pub split_rhat: Vec<f64>,
    /// Sample counts by edge count.
    pub edge_histogram: BTreeMap<usize, u64>,
    /// Fraction of samples containing each pair, in lexicographic order.
    pub edge_marginals: Vec<f64>,
    /// Fraction of all proposals accepted.
    pub accept_rate: f64,
    /// Fraction of all proposals rejected for leaving the window.
    pub window_reject_rate: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceRow>,
    #[serde(skip)]
    values: Vec<Vec<f64>>,
}

impl ChainStats {
    /// Mean and batch-means standard error of `Σ_i w_i t(H_i, G)`.
    pub fn combination(&self, weights: &[f64]) -> (f64, f64) {
        let series: Vec<f64> = (0..self.samples as usize)
            .map(|k| self.values.iter().zip(weights).map(|(v, w)| w * v[k]).sum())
            .collect();
        batch_means(&series)
    }
}

/// Mean and batch-means standard error with `⌊√m⌋` batches of equal size.
pub fn batch_means(xs: &[f64]) -> (f64, f64) {
    let m = xs.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / m as f64;
    let size = (m as f64).sqrt().floor() as usize;
    let batches = m / size.max(1);
    if batches < 2 {
        return (mean, f64::NAN);
    }
    let used = &xs[m - batches * size..];
    let batch_means: Vec<f64> = used
        .chunks(size)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let bm = batch_means.iter().sum::<f64>() / batches as f64;
    let var = batch_means.iter().map(|x| (x - bm).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (mean, (var / batches as f64).sqrt())
}

/// Potential scale reduction from the two halves of one chain; 1 when both
/// halves are constant.
pub fn split_rhat(xs: &[f64]) -> f64 {
    let half = xs.len() / 2;
    if half < 2 {
        return f64::NAN;
    }
    let parts = [&xs[..half], &xs[xs.len() - half..]];
    let n = half as f64;
    let stats: Vec<(f64, f64)> = parts
        .iter()
        .map(|p| {
            let mean = p.iter().sum::<f64>() / n;
            let var = p.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (mean, var)
        })
        .collect();
    let w = (stats[0].1 + stats[1].1) / 2.0;
    let grand = (stats[0].0 + stats[1].0) / 2.0;
    let b = n * stats.iter().map(|s| (s.0 - grand).powi(2)).sum::<f64>();
    if w == 0.0 {
        return if b == 0.0 { 1.0 } else { f64::INFINITY };
    }
    let var_hat = (n - 1.0) / n * w + b / n;
    (var_hat / w).sqrt()
}

/// Present and absent pairs with O(1) removal and uniform choice.
struct EdgeSets {
    present: Vec<usize>,
    absent: Vec<usize>,
    /// Position of each pair in its list.
    slot: Vec<usize>,
}

impl EdgeSets {
    fn new(bits: &[bool]) -> Self {
        let mut present = Vec::new();
        let mut absent = Vec::new();
        let mut slot = vec![0; bits.len()];
        for (p, &b) in bits.iter().enumerate() {
            let list = if b { &mut present } else { &mut absent };
            slot[p] = list.len();
            list.push(p);
        }
        Self {
            present,
            absent,
            slot,
        }
    }

    fn flip(&mut self, p: usize, now_present: bool) {
        let (from, to) = if now_present {
            (&mut self.absent, &mut self.present)
        } else {
            (&mut self.present, &mut self.absent)
        };
        let at = self.slot[p];
        let last = *from.last().expect("pair is in its list");
        from.swap_remove(at);
        if last != p {
            self.slot[last] = at;
        }
        self.slot[p] = to.len();
        to.push(p);
    }
}

struct Chain<'a> {
    model: &'a ModelSpec,
    window: &'a ConstraintSpec,
    all_pairs: Vec<(usize, usize)>,
    g: SimpleGraph,
    tracker: HomTracker,
    sets: EdgeSets,
    scales: Vec<f64>,
    deltas: Vec<i128>,
    second: Vec<i128>,
    n2: f64,
}

enum Outcome {
    Accepted,
    Rejected,
    OutsideWindow,
}

impl Chain<'_> {
    fn edge_count(&self) -> usize {
        self.sets.present.len()
    }

    fn energy_change(&self, deltas: &[i128]) -> f64 {
        self.model
            .zetas()
            .iter()
            .zip(&self.scales)
            .zip(deltas)
            .map(|((z, s), &d)| z * s * d as f64)
            .sum()
    }

    fn toggle_move(&mut self, rng: &mut ChaCha8Rng) -> Outcome {
        let p = rng.random_range(0..self.all_pairs.len());
        let (u, v) = self.all_pairs[p];
        let adding = !self.g.has_edge(u, v);
        let k = if adding {
            self.edge_count() + 1
        } else {
            self.edge_count() - 1
        };
        if !self.window.contains(2.0 * k as f64 / self.n2) {
            return Outcome::OutsideWindow;
        }
        self.tracker
            .toggle_deltas(&mut self.g, u, v, &mut self.deltas);
        let log_ratio = self.energy_change(&self.deltas);
        if metropolis(rng, log_ratio) {
            self.tracker.apply_toggle(&mut self.g, u, v, &self.deltas);
            self.sets.flip(p, adding);
            Outcome::Accepted
        } else {
            Outcome::Rejected
        }
    }

    fn swap_move(&mut self, rng: &mut ChaCha8Rng) -> Outcome {
        if self.sets.present.is_empty() || self.sets.absent.is_empty() {
            return Outcome::Rejected;
        }
        let out = self.sets.present[rng.random_range(0..self.sets.present.len())];
        let inn = self.sets.absent[rng.random_range(0..self.sets.absent.len())];
        let (a, b) = self.all_pairs[out];
        let (c, d) = self.all_pairs[inn];
        self.tracker
            .toggle_deltas(&mut self.g, a, b, &mut self.deltas);
        self.tracker.apply_toggle(&mut self.g, a, b, &self.deltas);
        self.tracker
            .toggle_deltas(&mut self.g, c, d, &mut self.second);
        let log_ratio = self.energy_change(&self.deltas) + self.energy_change(&self.second);
        if metropolis(rng, log_ratio) {
            self.tracker.apply_toggle(&mut self.g, c, d, &self.second);
            self.sets.flip(out, false);
            self.sets.flip(inn, true);
            Outcome::Accepted
        } else {
            let undo: Vec<i128> = self.deltas.iter().map(|d| -d).collect();
            self.tracker.apply_toggle(&mut self.g, a, b, &undo);
            Outcome::Rejected
        }
    }
}

#[inline]
fn metropolis(rng: &mut ChaCha8Rng, log_ratio: f64) -> bool {
    log_ratio >= 0.0 || rng.random::<f64>() < log_ratio.exp()
}

/// Edge count of the initial state: `round(eN²/2)` moved to the nearest
/// edge count inside the window.
pub fn initial_edge_count(n: usize, window: &ConstraintSpec) -> Result<usize> {
    let feasible = feasible_edge_counts(n, window);
    let target = (window.e * (n * n) as f64 / 2.0).round() as i64;
    feasible
        .iter()
        .copied()
        .min_by_key(|&k| ((k as i64 - target).abs(), k))
        .ok_or_else(|| window_error(n, window))
}

/// Runs one Metropolis chain on the window-conditioned measure of `model`.
pub fn run_chain(model: &ModelSpec, cfg: &ChainConfig) -> Result<ChainStats> {
    cfg.validate()?;
    let window = model
        .constraint()
        .ok_or_else(|| Error::Parameter("sampling needs a constraint window".into()))?;
    let n = model.n();
    if n < 2 {
        return Err(Error::Parameter("sampling needs N ≥ 2".into()));
    }
    let feasible = feasible_edge_counts(n, window);
    if feasible.is_empty() {
        return Err(window_error(n, window));
    }
    if cfg.move_mix == 0.0 && feasible.len() == 1 {
        return Err(Error::ChainConfig(
            "the window admits a single edge count, so toggles alone cannot move; use move_mix > 0"
                .into(),
        ));
    }
    if cfg.move_mix == 1.0 && feasible.len() > 1 {
        return Err(Error::ChainConfig(
            "swaps never change the edge count, so move_mix = 1 cannot reach the whole window"
                .into(),
        ));
    }

    let all_pairs = pairs(n);
    let k0 = initial_edge_count(n, window)?;
    let bits: Vec<bool> = (0..all_pairs.len()).map(|p| p < k0).collect();
    let g = SimpleGraph::from_edges(n, all_pairs[..k0].iter().copied())?;
    let s = model.motifs().len();
    let mut chain = Chain {
        model,
        window,
        tracker: HomTracker::new(model.motifs(), &g),
        g,
        sets: EdgeSets::new(&bits),
        scales: model.energy_scales(),
        deltas: vec![0; s],
        second: vec![0; s],
        n2: (n * n) as f64,
        all_pairs,
    };
    let density_scales: Vec<f64> = model
        .motifs()
        .iter()
        .map(|m| (n as f64).powi(-(m.vertex_count() as i32)))
        .collect();

    let mut rng = cfg.rng();
    let proposals_per_sweep = pair_count(n) as u64;
    let mut values = vec![Vec::new(); s];
    let mut histogram = BTreeMap::new();
    let mut marginals = vec![0u64; chain.all_pairs.len()];
    let mut trace = Vec::new();
    let (mut accepted, mut outside, mut total) = (0u64, 0u64, 0u64);

    for sweep in 1..=cfg.sweeps {
        let (mut sweep_acc, mut sweep_out) = (0u64, 0u64);
        for _ in 0..proposals_per_sweep {
            let outcome = if rng.random::<f64>() < cfg.move_mix {
                chain.swap_move(&mut rng)
            } else {
                chain.toggle_move(&mut rng)
            };
            match outcome {
                Outcome::Accepted => sweep_acc += 1,
                Outcome::OutsideWindow => sweep_out += 1,
                Outcome::Rejected => {}
            }
        }
        let k = chain.edge_count();
        assert!(
            window.contains(2.0 * k as f64 / chain.n2),
            "chain left the window at sweep {sweep}"
        );
        if sweep > cfg.burn_in {
            accepted += sweep_acc;
            outside += sweep_out;
            total += proposals_per_sweep;
            if (sweep - cfg.burn_in).is_multiple_of(cfg.thin) {
                let densities: Vec<f64> = chain
                    .tracker
                    .counts()
                    .iter()
                    .zip(&density_scales)
                    .map(|(&c, &sc)| c as f64 * sc)
                    .collect();
                for (series, &d) in values.iter_mut().zip(&densities) {
                    series.push(d);
                }
                *histogram.entry(k).or_insert(0) += 1;
                for &p in &chain.sets.present {
                    marginals[p] += 1;
                }
                if cfg.record_trace {
                    trace.push(TraceRow {
                        sweep,
                        edge_count: k,
                        densities,
                        accept_rate: sweep_acc as f64 / proposals_per_sweep as f64,
                        window_reject_rate: sweep_out as f64 / proposals_per_sweep as f64,
                    });
                }
            }
        }
    }

    let samples = values[0].len() as u64;
    let (means, std_errors) = values.iter().map(|v| batch_means(v)).unzip();
    Ok(ChainStats {
        motifs: model.motifs().iter().map(|m| m.label()).collect(),
        samples,
        means,
        std_errors,
        split_rhat: values.iter().map(|v| split_rhat(v)).collect(),
        edge_histogram: histogram,
        edge_marginals: marginals
            .iter()
            .map(|&c| c as f64 / samples.max(1) as f64)
            .collect(),
        accept_rate: accepted as f64 / total.max(1) as f64,
        window_reject_rate: outside as f64 / total.max(1) as f64,
        trace,
        values,
    })
}

/// Quadrature node of a thermodynamic-integration run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TiNode {
    /// Position on the path `u ↦ uζ`, in `(0, 1)`.
    pub u: f64,
    pub weight: f64,
    /// `Σ_i ζ_i E_{uζ}[t(H_i, G)]`
    pub integrand: f64,
    pub std_error: f64,
    pub split_rhat: f64,
}

/// Thermodynamic-integration estimate of `ψ^{e,ζ}_{N,t}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TiEstimate {
    pub psi_estimate: f64,
    /// Exact `ψ^{e,0}_{N,t}`.
    pub zero_point: f64,
    pub quadrature_nodes: usize,
    pub std_error: f64,
    pub nodes: Vec<TiNode>,
}

/// Estimates `ψ^{e,ζ}_{N,t}` by integrating `Σ ζ_i E[t(H_i)]` from `0` to
/// `ζ`. Node `j` runs on stream `cfg.stream + j`; results do not depend on
/// the number of worker threads.
pub fn thermo_integrate(model: &ModelSpec, cfg: &ChainConfig, nodes: usize) -> Result<TiEstimate> {
    cfg.validate()?;
    if nodes < 2 {
        return Err(Error::Parameter(
            "thermodynamic integration needs at least 2 nodes".into(),
        ));
    }
    let window = model
        .constraint()
        .ok_or_else(|| Error::Parameter("integration needs a constraint window".into()))?;
    let zero_point = truncated_binomial_psi(model.n(), window)?;
    let rule: Vec<(f64, f64)> = gauss_legendre(nodes)
        .into_iter()
        .map(|(z, w)| ((z + 1.0) / 2.0, w / 2.0))
        .collect();

    if model.zetas().iter().all(|&z| z == 0.0) {
        return Ok(TiEstimate {
            psi_estimate: zero_point,
            zero_point,
            quadrature_nodes: nodes,
            std_error: 0.0,
            nodes: rule
                .iter()
                .map(|&(u, weight)| TiNode {
                    u,
                    weight,
                    integrand: 0.0,
                    std_error: 0.0,
                    split_rhat: 1.0,
                })
                .collect(),
        });
    }

    let zetas = model.zetas().to_vec();
    let node_results: Vec<TiNode> = rule
        .par_iter()
        .enumerate()
        .map(|(j, &(u, weight))| {
            let scaled = model.with_zetas(zetas.iter().map(|z| u * z).collect())?;
            let node_cfg = ChainConfig {
                stream: cfg.stream + j as u64,
                record_trace: false,
                ..*cfg
            };
            let stats = run_chain(&scaled, &node_cfg)?;
            let (integrand, std_error) = stats.combination(&zetas);
            let series: Vec<f64> = (0..stats.samples as usize)
                .map(|k| stats.values.iter().zip(&zetas).map(|(v, z)| z * v[k]).sum())
                .collect();
            Ok(TiNode {
                u,
                weight,
                integrand,
                std_error,
                split_rhat: split_rhat(&series),
            })
        })
        .collect::<Result<_>>()?;

    let integral: f64 = node_results.iter().map(|n| n.weight * n.integrand).sum();
    let variance: f64 = node_results
        .iter()
        .map(|n| (n.weight * n.std_error).powi(2))
        .sum();
    let psi_estimate = zero_point + integral;
    if !psi_estimate.is_finite() {
        return Err(Error::Numerical(
            "integration estimate is not finite".into(),
        ));
    }
    Ok(TiEstimate {
        psi_estimate,
        zero_point,
        quadrature_nodes: nodes,
        std_error: variance.sqrt(),
        nodes: node_results,
    })
}

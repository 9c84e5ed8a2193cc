//! Finite simple graphs, motifs, homomorphism counts and exhaustive
//! enumeration of labeled graphs.
//!
//! Vertices are 0-indexed everywhere in the library. Edge lists coming from
//! the outside world (JSON motif descriptions, CLI configs) are 1-indexed and
//! converted by [`GraphMotif::from_one_based_edges`].

use std::fmt;

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};

/// Largest graph order representable by the bit-row adjacency.
pub const MAX_GRAPH_VERTICES: usize = 64;

/// Largest motif order accepted by [`GraphMotif::new`].
pub const MAX_MOTIF_VERTICES: usize = 12;

/// Default size gate for [`enumerate_graphs`].
pub const DEFAULT_MAX_ENUMERATION_VERTICES: usize = 8;

/// Hard ceiling for enumeration: `C(N,2)` must fit the 64-bit Gray counter.
pub const HARD_MAX_ENUMERATION_VERTICES: usize = 11;

/// Number of vertex pairs `C(N,2)`.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Lexicographic index of the pair `(i, j)`, `i < j < n`.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// All pairs `(i, j)` with `i < j < n`, in lexicographic order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(pair_count(n));
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

/// Structural shape of a motif, used to select incremental counting paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotifKind {
    Edge,
    Triangle,
    /// Star with `p ≥ 2` leaves.
    Star(u32),
    Other,
}

/// A fixed finite simple graph `H` (loop-free, no multi-edges).
#[derive(Clone)]
pub struct GraphMotif {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    name: Option<String>,
    kind: MotifKind,
    plan: HomPlan,
}

impl GraphMotif {
    pub fn new(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::Motif("a motif needs at least one vertex".into()));
        }
        if vertex_count > MAX_MOTIF_VERTICES {
            return Err(Error::Size {
                what: "motif vertex count",
                value: vertex_count,
                max: MAX_MOTIF_VERTICES,
            });
        }
        let mut normalized = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::Motif(format!("loop at vertex {a}")));
            }
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::Motif(format!(
                    "edge ({a}, {b}) has an endpoint outside 0..{vertex_count}"
                )));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        let before = normalized.len();
        normalized.dedup();
        if normalized.len() != before {
            return Err(Error::Motif("duplicate edge".into()));
        }
        let kind = classify(vertex_count, &normalized);
        let plan = HomPlan::new(vertex_count, &normalized);
        Ok(Self {
            vertex_count,
            edges: normalized,
            name: None,
            kind,
            plan,
        })
    }

    /// The single edge `K₂`.
    pub fn edge() -> Self {
        Self::new(2, [(0, 1)]).unwrap().named("edge")
    }

    pub fn triangle() -> Self {
        Self::new(3, [(0, 1), (1, 2), (0, 2)])
            .unwrap()
            .named("triangle")
    }

    /// Star with `p` leaves around vertex 0. `star(1)` is the edge.
    pub fn star(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::Motif("a star needs at least one leaf".into()));
        }
        Ok(Self::new(p + 1, (1..=p).map(|leaf| (0, leaf)))?.named(&format!("star{p}")))
    }

    /// Path with `p` edges on `p + 1` vertices.
    pub fn path(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::Motif("a path needs at least one edge".into()));
        }
        Ok(Self::new(p + 1, (0..p).map(|v| (v, v + 1)))?.named(&format!("path{p}")))
    }

    /// Canonical names: `edge`, `triangle`, `starP` / `P-star`, `pathP`.
    pub fn from_name(name: &str) -> Result<Self> {
        let lower = name.trim().to_ascii_lowercase();
        let parse_count = |digits: &str| -> Result<usize> {
            digits
                .parse::<usize>()
                .map_err(|_| Error::Motif(format!("unknown motif name {name:?}")))
        };
        match lower.as_str() {
            "edge" => Ok(Self::edge()),
            "triangle" => Ok(Self::triangle()),
            _ => {
                if let Some(rest) = lower.strip_prefix("star") {
                    Self::star(parse_count(rest)?)
                } else if let Some(rest) = lower.strip_suffix("-star") {
                    Self::star(parse_count(rest)?)
                } else if let Some(rest) = lower.strip_prefix("path") {
                    Self::path(parse_count(rest)?)
                } else {
                    Err(Error::Motif(format!("unknown motif name {name:?}")))
                }
            }
        }
    }

    /// Builds a motif from 1-indexed edges; the vertex count is the largest
    /// endpoint.
    pub fn from_one_based_edges(edges: &[[usize; 2]]) -> Result<Self> {
        if edges.iter().flatten().any(|&v| v == 0) {
            return Err(Error::Motif("edge lists are 1-indexed".into()));
        }
        let k = edges.iter().flatten().copied().max().unwrap_or(0);
        Self::new(k, edges.iter().map(|[a, b]| (a - 1, b - 1)))
    }

    /// Parses either a canonical name or a JSON edge list such as
    /// `[[1,2],[2,3]]`.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.starts_with('[') {
            let edges: Vec<[usize; 2]> = serde_json::from_str(trimmed)
                .map_err(|e| Error::Motif(format!("bad edge list {trimmed:?}: {e}")))?;
            Self::from_one_based_edges(&edges)
        } else {
            Self::from_name(trimmed)
        }
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    /// `k = |V(H)|`.
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// `m = |E(H)|`.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn kind(&self) -> MotifKind {
        self.kind
    }

    pub fn is_single_edge(&self) -> bool {
        self.kind == MotifKind::Edge
    }

    /// Edge or star: the cases where the constant-graphon reduction holds for
    /// parameters of either sign.
    pub fn is_star_like(&self) -> bool {
        matches!(self.kind, MotifKind::Edge | MotifKind::Star(_))
    }

    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => {
                let list: Vec<String> = self
                    .edges
                    .iter()
                    .map(|(a, b)| format!("[{},{}]", a + 1, b + 1))
                    .collect();
                format!("[{}]", list.join(","))
            }
        }
    }
}

impl PartialEq for GraphMotif {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.edges == other.edges
    }
}

impl fmt::Debug for GraphMotif {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphMotif")
            .field("name", &self.name)
            .field("vertex_count", &self.vertex_count)
            .field("edges", &self.edges)
            .finish()
    }
}

impl Serialize for GraphMotif {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let one_based: Vec<[usize; 2]> = self.edges.iter().map(|&(a, b)| [a + 1, b + 1]).collect();
        let mut s = serializer.serialize_struct("GraphMotif", 3)?;
        s.serialize_field("name", &self.label())?;
        s.serialize_field("vertex_count", &self.vertex_count)?;
        s.serialize_field("edges", &one_based)?;
        s.end()
    }
}

fn classify(k: usize, edges: &[(usize, usize)]) -> MotifKind {
    let mut degree = vec![0usize; k];
    for &(a, b) in edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    if degree.contains(&0) {
        return MotifKind::Other;
    }
    let m = edges.len();
    if k == 2 && m == 1 {
        return MotifKind::Edge;
    }
    if k == 3 && m == 3 {
        return MotifKind::Triangle;
    }
    if k == m + 1 && degree.contains(&m) {
        return MotifKind::Star(m as u32);
    }
    MotifKind::Other
}

/// Vertex ordering for backtracking homomorphism counts: each vertex is
/// placed after as many of its neighbours as possible so candidate sets are
/// intersections of already-fixed neighbourhoods.
#[derive(Clone, Debug)]
struct HomPlan {
    order: Vec<usize>,
    /// For each position, positions of earlier neighbours.
    back: Vec<Vec<usize>>,
}

impl HomPlan {
    fn new(k: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); k];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut placed = vec![false; k];
        let mut order = Vec::with_capacity(k);
        while order.len() < k {
            let next = (0..k)
                .filter(|&v| !placed[v])
                .max_by_key(|&v| {
                    let linked = adj[v].iter().filter(|&&u| placed[u]).count();
                    (linked, adj[v].len(), std::cmp::Reverse(v))
                })
                .unwrap();
            placed[next] = true;
            order.push(next);
        }
        let position: Vec<usize> = {
            let mut p = vec![0; k];
            for (i, &v) in order.iter().enumerate() {
                p[v] = i;
            }
            p
        };
        let back = order
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                adj[v]
                    .iter()
                    .map(|&u| position[u])
                    .filter(|&p| p < i)
                    .collect()
            })
            .collect();
        Self { order, back }
    }
}

/// Simple graph on `N ≤ 64` labeled vertices stored as adjacency bit rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    n: usize,
    rows: Vec<u64>,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_GRAPH_VERTICES {
            return Err(Error::Size {
                what: "graph vertex count",
                value: n,
                max: MAX_GRAPH_VERTICES,
            });
        }
        Ok(Self {
            n,
            rows: vec![0; n],
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for (i, j) in pairs(n) {
            g.set_edge(i, j, true);
        }
        Ok(g)
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(Error::Parameter(format!(
                    "edge ({a}, {b}) is not a valid pair on {n} vertices"
                )));
            }
            g.set_edge(a, b, true);
        }
        Ok(g)
    }

    /// Graph whose edge set is the bit pattern `bits` over the lexicographic
    /// pair order.
    pub fn from_pair_bits(n: usize, bits: u64) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for (idx, (i, j)) in pairs(n).into_iter().enumerate() {
            if idx < 64 && bits >> idx & 1 == 1 {
                g.set_edge(i, j, true);
            }
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    #[inline]
    pub fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        debug_assert!(i != j);
        if present {
            self.rows[i] |= 1 << j;
            self.rows[j] |= 1 << i;
        } else {
            self.rows[i] &= !(1 << j);
            self.rows[j] &= !(1 << i);
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize, j: usize) {
        debug_assert!(i != j);
        self.rows[i] ^= 1 << j;
        self.rows[j] ^= 1 << i;
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> u64 {
        self.rows[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> u32 {
        self.rows[v].count_ones()
    }

    #[inline]
    pub fn common_neighbors(&self, u: usize, v: usize) -> u32 {
        (self.rows[u] & self.rows[v]).count_ones()
    }

    pub fn edge_count(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            (i + 1..self.n).filter_map(move |j| self.has_edge(i, j).then_some((i, j)))
        })
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::Parameter("permutation length mismatch".into()));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || seen[p] {
                return Err(Error::Parameter("not a permutation".into()));
            }
            seen[p] = true;
        }
        Self::from_edges(self.n, self.edges().map(|(a, b)| (perm[a], perm[b])))
    }

    #[inline]
    fn all_mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }
}

impl fmt::Debug for SimpleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimpleGraph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// `|hom(H, G)|`: vertex maps `V(H) → V(G)` sending every edge of `H` to an
/// edge of `G`. Maps need not be injective.
pub fn hom_count(h: &GraphMotif, g: &SimpleGraph) -> u128 {
    let mut images = vec![0usize; h.vertex_count];
    hom_rec(&h.plan, g, 0, &mut images, g.all_mask())
}

fn hom_rec(plan: &HomPlan, g: &SimpleGraph, pos: usize, images: &mut [usize], all: u64) -> u128 {
    let mut candidates = all;
    for &b in &plan.back[pos] {
        candidates &= g.rows[images[b]];
    }
    if pos + 1 == plan.order.len() {
        return candidates.count_ones() as u128;
    }
    let mut total = 0u128;
    let mut rest = candidates;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        images[pos] = v;
        total += hom_rec(plan, g, pos + 1, images, all);
    }
    total
}

/// Homomorphism density `t(H, G) = |hom(H,G)| / N^{|V(H)|}`.
pub fn hom_density(h: &GraphMotif, g: &SimpleGraph) -> f64 {
    hom_count(h, g) as f64 / (g.n as f64).powi(h.vertex_count as i32)
}

/// Edge density in the homomorphism convention, `2·|E(G)|/N²`.
///
/// This is `t(K₂, G)`, not `|E(G)|/C(N,2)`.
pub fn edge_density(g: &SimpleGraph) -> f64 {
    (2 * g.edge_count()) as f64 / (g.n as f64).powi(2)
}

/// Exhaustive Gray-code walk over all `2^{C(N,2)}` labeled graphs.
///
/// Each item carries the current graph and the edge toggled to reach it
/// (`None` for the initial empty graph).
pub struct GrayWalk {
    pairs: Vec<(usize, usize)>,
    graph: SimpleGraph,
    step: u64,
    total: u64,
}

impl Iterator for GrayWalk {
    type Item = (SimpleGraph, Option<(usize, usize)>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.step >= self.total {
            return None;
        }
        let toggled = if self.step == 0 {
            None
        } else {
            let (i, j) = self.pairs[self.step.trailing_zeros() as usize];
            self.graph.toggle(i, j);
            Some((i, j))
        };
        self.step += 1;
        Some((self.graph.clone(), toggled))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.step) as usize;
        (left, Some(left))
    }
}

/// All graphs on `n` vertices in Gray-code order, gated at
/// [`DEFAULT_MAX_ENUMERATION_VERTICES`].
pub fn enumerate_graphs(n: usize) -> Result<GrayWalk> {
    enumerate_graphs_with_limit(n, DEFAULT_MAX_ENUMERATION_VERTICES)
}

pub fn enumerate_graphs_with_limit(n: usize, max_n: usize) -> Result<GrayWalk> {
    check_enumeration_size(n, max_n)?;
    let pairs = pairs(n);
    Ok(GrayWalk {
        total: 1u64 << pairs.len(),
        pairs,
        graph: SimpleGraph::empty(n)?,
        step: 0,
    })
}

pub(crate) fn check_enumeration_size(n: usize, max_n: usize) -> Result<()> {
    let max = max_n.min(HARD_MAX_ENUMERATION_VERTICES);
    if n > max {
        return Err(Error::Size {
            what: "exact enumeration graph order",
            value: n,
            max,
        });
    }
    if n == 0 {
        return Err(Error::Parameter("graph order must be positive".into()));
    }
    Ok(())
}

/// Gray-code walk over one sub-cube: the highest `fixed_bits` pair indices are
/// pinned to the bits of `prefix`, the remaining low pairs are walked.
///
/// `visit` receives the graph and the toggled edge (`None` on the first,
/// freshly built graph of the sub-cube). Sub-cubes for all prefixes partition
/// the full graph space.
pub fn walk_subcube<F>(n: usize, fixed_bits: u32, prefix: u64, mut visit: F) -> Result<()>
where
    F: FnMut(&SimpleGraph, Option<(usize, usize)>),
{
    let all_pairs = pairs(n);
    let n_pairs = all_pairs.len() as u32;
    if fixed_bits > n_pairs || n_pairs > 63 {
        return Err(Error::Parameter(format!(
            "cannot fix {fixed_bits} of {n_pairs} pair bits"
        )));
    }
    let free = n_pairs - fixed_bits;
    let mut g = SimpleGraph::empty(n)?;
    for b in 0..fixed_bits {
        if prefix >> b & 1 == 1 {
            let (i, j) = all_pairs[(free + b) as usize];
            g.set_edge(i, j, true);
        }
    }
    visit(&g, None);
    for step in 1..(1u64 << free) {
        let (i, j) = all_pairs[step.trailing_zeros() as usize];
        g.toggle(i, j);
        visit(&g, Some((i, j)));
    }
    Ok(())
}

#[derive(Clone, Debug)]
enum Tracked {
    Edge,
    Triangle,
    Star(u32),
    Generic(GraphMotif),
}

/// Homomorphism counts for a fixed list of motifs, maintained under single
/// edge toggles. Edge, triangle and star counts update in O(1) word
/// operations; other motifs are recounted from scratch.
#[derive(Clone, Debug)]
pub struct HomTracker {
    tracked: Vec<Tracked>,
    counts: Vec<u128>,
}

impl HomTracker {
    pub fn new(motifs: &[GraphMotif], g: &SimpleGraph) -> Self {
        let tracked = motifs
            .iter()
            .map(|m| match m.kind() {
                MotifKind::Edge => Tracked::Edge,
                MotifKind::Triangle => Tracked::Triangle,
                MotifKind::Star(p) => Tracked::Star(p),
                MotifKind::Other => Tracked::Generic(m.clone()),
            })
            .collect();
        let counts = motifs.iter().map(|m| hom_count(m, g)).collect();
        Self { tracked, counts }
    }

    pub fn counts(&self) -> &[u128] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Toggles `(u, v)` in `g` and updates all counts.
    pub fn toggle(&mut self, g: &mut SimpleGraph, u: usize, v: usize) {
        let adding = !g.has_edge(u, v);
        for (slot, t) in self.tracked.iter().enumerate() {
            if let Some(d) = fast_delta(t, g, u, v, adding) {
                self.counts[slot] = apply_delta(self.counts[slot], d);
            }
        }
        g.toggle(u, v);
        for (slot, t) in self.tracked.iter().enumerate() {
            if let Tracked::Generic(m) = t {
                self.counts[slot] = hom_count(m, g);
            }
        }
    }

    /// Count changes a toggle of `(u, v)` would cause. `g` is restored before
    /// returning.
    pub fn toggle_deltas(&self, g: &mut SimpleGraph, u: usize, v: usize, out: &mut [i128]) {
        let adding = !g.has_edge(u, v);
        let mut needs_recount = false;
        for (slot, t) in self.tracked.iter().enumerate() {
            match fast_delta(t, g, u, v, adding) {
                Some(d) => out[slot] = d,
                None => needs_recount = true,
            }
        }
        if needs_recount {
            g.toggle(u, v);
            for (slot, t) in self.tracked.iter().enumerate() {
                if let Tracked::Generic(m) = t {
                    out[slot] = hom_count(m, g) as i128 - self.counts[slot] as i128;
                }
            }
            g.toggle(u, v);
        }
    }

    /// Toggles `(u, v)` using deltas previously obtained from
    /// [`HomTracker::toggle_deltas`] on the same state.
    pub fn apply_toggle(&mut self, g: &mut SimpleGraph, u: usize, v: usize, deltas: &[i128]) {
        g.toggle(u, v);
        for (c, &d) in self.counts.iter_mut().zip(deltas) {
            *c = apply_delta(*c, d);
        }
    }
}

#[inline]
fn apply_delta(count: u128, delta: i128) -> u128 {
    (count as i128 + delta) as u128
}

#[inline]
fn fast_delta(t: &Tracked, g: &SimpleGraph, u: usize, v: usize, adding: bool) -> Option<i128> {
    let sign = if adding { 1 } else { -1 };
    match *t {
        Tracked::Edge => Some(2 * sign),
        Tracked::Triangle => Some(6 * sign * g.common_neighbors(u, v) as i128),
        Tracked::Star(p) => {
            let step = |d: u32| -> i128 {
                let d = d as i128;
                if adding {
                    (d + 1).pow(p) - d.pow(p)
                } else {
                    d.pow(p) - (d - 1).pow(p)
                }
            };
            Some(sign * (step(g.degree(u)) + step(g.degree(v))))
        }
        Tracked::Generic(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Brute-force homomorphism count over all N^k vertex maps.
    fn brute_hom(h: &GraphMotif, g: &SimpleGraph) -> u128 {
        let n = g.vertex_count();
        let k = h.vertex_count();
        let mut total = 0;
        let mut map = vec![0usize; k];
        loop {
            if h.edges().iter().all(|&(a, b)| g.has_edge(map[a], map[b])) {
                total += 1;
            }
            let mut pos = 0;
            loop {
                if pos == k {
                    return total;
                }
                map[pos] += 1;
                if map[pos] < n {
                    break;
                }
                map[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn pair_index_matches_lexicographic_list() {
        for n in 1..10 {
            for (idx, (i, j)) in pairs(n).into_iter().enumerate() {
                assert_eq!(pair_index(n, i, j), idx);
            }
            assert_eq!(pairs(n).len(), pair_count(n));
        }
    }

    #[test]
    fn motif_validation() {
        assert!(GraphMotif::new(2, [(0, 0)]).is_err());
        assert!(GraphMotif::new(2, [(0, 1), (1, 0)]).is_err());
        assert!(GraphMotif::new(2, [(0, 2)]).is_err());
        assert!(GraphMotif::new(0, []).is_err());
        assert!(GraphMotif::from_name("hexagon").is_err());
        assert_eq!(GraphMotif::edge().kind(), MotifKind::Edge);
        assert_eq!(GraphMotif::triangle().kind(), MotifKind::Triangle);
        assert_eq!(GraphMotif::star(3).unwrap().kind(), MotifKind::Star(3));
        assert_eq!(GraphMotif::path(2).unwrap().kind(), MotifKind::Star(2));
        assert_eq!(GraphMotif::path(3).unwrap().kind(), MotifKind::Other);
        assert_eq!(GraphMotif::star(1).unwrap().kind(), MotifKind::Edge);
    }

    #[test]
    fn motif_parsing() {
        assert_eq!(GraphMotif::parse("edge").unwrap(), GraphMotif::edge());
        assert_eq!(
            GraphMotif::parse("Triangle").unwrap(),
            GraphMotif::triangle()
        );
        assert_eq!(
            GraphMotif::parse("star3").unwrap(),
            GraphMotif::star(3).unwrap()
        );
        assert_eq!(
            GraphMotif::parse("2-star").unwrap(),
            GraphMotif::star(2).unwrap()
        );
        assert_eq!(
            GraphMotif::parse("path3").unwrap(),
            GraphMotif::path(3).unwrap()
        );
        let tri = GraphMotif::parse("[[1,2],[2,3],[3,1]]").unwrap();
        assert_eq!(tri, GraphMotif::triangle());
        assert!(GraphMotif::parse("[[0,1]]").is_err());
        assert!(GraphMotif::parse("[[1,2],[2,1]]").is_err());
        assert!(GraphMotif::parse("[[1,2").is_err());
    }

    #[test]
    fn hom_count_examples() {
        let k3 = SimpleGraph::complete(3).unwrap();
        assert_eq!(hom_count(&GraphMotif::edge(), &k3), 6);
        assert_eq!(hom_count(&GraphMotif::triangle(), &k3), 6);
        let empty = SimpleGraph::empty(5).unwrap();
        for h in [
            GraphMotif::edge(),
            GraphMotif::triangle(),
            GraphMotif::path(3).unwrap(),
        ] {
            assert_eq!(hom_count(&h, &empty), 0);
        }
    }

    #[test]
    fn hom_density_examples() {
        let k3 = SimpleGraph::complete(3).unwrap();
        assert_eq!(hom_density(&GraphMotif::edge(), &k3), 6.0 / 9.0);
        assert_eq!(hom_density(&GraphMotif::triangle(), &k3), 6.0 / 27.0);
        let empty = SimpleGraph::empty(4).unwrap();
        assert_eq!(hom_density(&GraphMotif::edge(), &empty), 0.0);
    }

    #[test]
    fn edge_density_examples() {
        let k3 = SimpleGraph::complete(3).unwrap();
        assert_eq!(edge_density(&k3), hom_density(&GraphMotif::edge(), &k3));
        assert_eq!(edge_density(&SimpleGraph::empty(6).unwrap()), 0.0);
        let one = SimpleGraph::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(edge_density(&one), 2.0 / 9.0);
    }

    #[test]
    fn isolated_motif_vertex_multiplies_by_n() {
        let h = GraphMotif::new(3, [(0, 1)]).unwrap();
        let g = SimpleGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(hom_count(&h, &g), 4 * 4);
        assert_eq!(hom_count(&h, &g), brute_hom(&h, &g));
    }

    #[test]
    fn hom_count_matches_brute_force_on_small_graphs() {
        let motifs = [
            GraphMotif::edge(),
            GraphMotif::triangle(),
            GraphMotif::star(2).unwrap(),
            GraphMotif::star(3).unwrap(),
            GraphMotif::path(3).unwrap(),
            GraphMotif::parse("[[1,2],[2,3],[3,4],[4,1]]").unwrap(),
        ];
        for bits in [0u64, 1, 0b101101, 0b1111111111, 0x3ff, 0x2a5] {
            let g = SimpleGraph::from_pair_bits(5, bits).unwrap();
            for h in &motifs {
                assert_eq!(hom_count(h, &g), brute_hom(h, &g), "{h:?} {g:?}");
            }
        }
    }

    #[test]
    fn two_star_closed_form() {
        let star = GraphMotif::star(2).unwrap();
        for n in 1..=5 {
            for (g, _) in enumerate_graphs(n).unwrap() {
                let by_degree: u128 = (0..n).map(|v| (g.degree(v) as u128).pow(2)).sum();
                assert_eq!(hom_count(&star, &g), by_degree);
            }
        }
    }

    #[test]
    fn enumeration_counts_and_gray_property() {
        assert_eq!(enumerate_graphs(3).unwrap().count(), 8);
        assert_eq!(enumerate_graphs(1).unwrap().count(), 1);
        for n in 1..=4 {
            let mut seen = HashSet::new();
            let mut prev: Option<SimpleGraph> = None;
            for (g, toggled) in enumerate_graphs(n).unwrap() {
                if let Some(p) = &prev {
                    let (i, j) = toggled.unwrap();
                    let mut q = p.clone();
                    q.toggle(i, j);
                    assert_eq!(q, g);
                } else {
                    assert!(toggled.is_none());
                }
                assert!(seen.insert(g.clone()));
                prev = Some(g);
            }
            assert_eq!(seen.len(), 1 << pair_count(n));
        }
        assert!(enumerate_graphs(9).is_err());
        assert!(enumerate_graphs_with_limit(9, 9).is_ok());
    }

    #[test]
    fn subcubes_partition_the_graph_space() {
        let n = 4;
        let mut seen = HashSet::new();
        for prefix in 0..8u64 {
            let mut prev: Option<SimpleGraph> = None;
            walk_subcube(n, 3, prefix, |g, toggled| {
                if let (Some(p), Some((i, j))) = (&prev, toggled) {
                    let mut q = p.clone();
                    q.toggle(i, j);
                    assert_eq!(&q, g);
                }
                assert!(seen.insert(g.clone()));
                prev = Some(g.clone());
            })
            .unwrap();
        }
        assert_eq!(seen.len(), 64);
    }

    #[test]
    fn tracker_matches_recount_along_walk() {
        let motifs = [
            GraphMotif::edge(),
            GraphMotif::triangle(),
            GraphMotif::star(2).unwrap(),
            GraphMotif::star(3).unwrap(),
            GraphMotif::path(3).unwrap(),
        ];
        let n = 5;
        let mut g = SimpleGraph::empty(n).unwrap();
        let mut tracker = HomTracker::new(&motifs, &g);
        let mut deltas = vec![0i128; motifs.len()];
        for (idx, (i, j)) in pairs(n).into_iter().cycle().take(200).enumerate() {
            let (i, j) = if idx % 3 == 0 { (j, i) } else { (i, j) };
            tracker.toggle_deltas(&mut g, i, j, &mut deltas);
            let before: Vec<u128> = tracker.counts().to_vec();
            tracker.toggle(&mut g, i, j);
            for (slot, h) in motifs.iter().enumerate() {
                assert_eq!(tracker.counts()[slot], hom_count(h, &g));
                assert_eq!(
                    before[slot] as i128 + deltas[slot],
                    tracker.counts()[slot] as i128
                );
            }
        }
    }
}

//! Weighted undirected graphs, Laplacians, switching signals, and the
//! connectivity predicates that select which convergence theorem applies.

use std::collections::VecDeque;

use thiserror::Error;

use crate::numerics::{sym_eigen, DenseMatrix, NumericsError};
use crate::problem::LinearEquationProblem;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid switching signal: {0}")]
    InvalidSignal(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Undirected edge between 1-based nodes `i < j` with weight `w > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Simple undirected weighted graph on nodes `1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Build from `(i, j, w)` triples with 1-based node indices.
    pub fn new(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self, NetworkError> {
        if n == 0 {
            return Err(NetworkError::InvalidGraph("empty node set".into()));
        }
        let mut normalized: Vec<Edge> = Vec::with_capacity(edges.len());
        for &(a, b, w) in edges {
            if a == b {
                return Err(NetworkError::InvalidGraph(format!("self-loop at node {a}")));
            }
            if a == 0 || b == 0 || a > n || b > n {
                return Err(NetworkError::InvalidGraph(format!(
                    "edge ({a},{b}) outside node range 1..={n}"
                )));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(NetworkError::InvalidGraph(format!(
                    "edge ({a},{b}) has non-positive weight {w}"
                )));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if normalized.iter().any(|e| e.i == i && e.j == j) {
                return Err(NetworkError::InvalidGraph(format!("duplicate edge ({i},{j})")));
            }
            normalized.push(Edge { i, j, w });
        }
        normalized.sort_by(|a, b| (a.i, a.j).cmp(&(b.i, b.j)));
        Ok(WeightedGraph {
            n,
            edges: normalized,
        })
    }

    /// Unit-weight path `1-2-...-n`.
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i, i + 1, 1.0)).collect();
        WeightedGraph::new(n, &edges).unwrap()
    }

    /// Unit-weight star with the given 1-based center.
    pub fn star(n: usize, center: usize) -> Self {
        let edges: Vec<_> = (1..=n)
            .filter(|&i| i != center)
            .map(|i| (center, i, 1.0))
            .collect();
        WeightedGraph::new(n, &edges).unwrap()
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `L = D − A` with weighted adjacency `A` and degree matrix `D`.
    pub fn laplacian(&self) -> DenseMatrix {
        let mut l = DenseMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            let (i, j) = (e.i - 1, e.j - 1);
            l.add_to(i, i, e.w);
            l.add_to(j, j, e.w);
            l.add_to(i, j, -e.w);
            l.add_to(j, i, -e.w);
        }
        l
    }

    /// Second-smallest Laplacian eigenvalue; positive iff connected.
    pub fn algebraic_connectivity(&self) -> Result<f64, NetworkError> {
        if self.n == 1 {
            return Ok(f64::INFINITY);
        }
        Ok(sym_eigen(&self.laplacian())?.second_smallest())
    }

    /// Breadth-first reachability of all nodes from node 1.
    pub fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.n + 1];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        let mut seen = vec![false; self.n + 1];
        let mut queue = VecDeque::from([1usize]);
        seen[1] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    /// Union of edge sets, keeping the maximum weight on conflicts.
    fn union_with(&self, other: &WeightedGraph) -> WeightedGraph {
        let mut edges = self.edges.clone();
        for e in &other.edges {
            if let Some(existing) = edges.iter_mut().find(|x| x.i == e.i && x.j == e.j) {
                existing.w = existing.w.max(e.w);
            } else {
                edges.push(*e);
            }
        }
        edges.sort_by(|a, b| (a.i, a.j).cmp(&(b.i, b.j)));
        WeightedGraph {
            n: self.n,
            edges,
        }
    }

    /// Largest Laplacian eigenvalue (used for integrator stability bounds).
    pub fn laplacian_max_eigenvalue(&self) -> Result<f64, NetworkError> {
        Ok(*sym_eigen(&self.laplacian())?
            .eigenvalues
            .last()
            .expect("non-empty spectrum"))
    }
}

/// Piecewise-constant schedule of graphs over time. A fixed graph is the
/// one-segment periodic signal. Switch instants are right-continuous: the new
/// graph applies at the switch time.
#[derive(Debug, Clone)]
pub struct SwitchingSignal {
    graphs: Vec<WeightedGraph>,
    /// `(graph index, duration)` pairs; durations strictly positive.
    segments: Vec<(usize, f64)>,
    periodic: bool,
    /// Segment start offsets followed by the period, i.e. `boundaries[k]` is
    /// the start time of segment `k` within one period.
    boundaries: Vec<f64>,
    period: f64,
}

impl SwitchingSignal {
    pub fn new(
        graphs: Vec<WeightedGraph>,
        segments: Vec<(usize, f64)>,
        periodic: bool,
    ) -> Result<Self, NetworkError> {
        if graphs.is_empty() {
            return Err(NetworkError::InvalidSignal("no graphs".into()));
        }
        if segments.is_empty() {
            return Err(NetworkError::InvalidSignal("no segments".into()));
        }
        let n = graphs[0].node_count();
        if graphs.iter().any(|g| g.node_count() != n) {
            return Err(NetworkError::InvalidSignal(
                "graphs must share one node set".into(),
            ));
        }
        let mut boundaries = Vec::with_capacity(segments.len());
        let mut acc = 0.0;
        for &(gi, dur) in &segments {
            if gi >= graphs.len() {
                return Err(NetworkError::InvalidSignal(format!(
                    "segment references graph index {gi} of {}",
                    graphs.len()
                )));
            }
            if !(dur > 0.0) || !dur.is_finite() {
                return Err(NetworkError::InvalidSignal(format!(
                    "non-positive segment duration {dur}"
                )));
            }
            boundaries.push(acc);
            acc += dur;
        }
        Ok(SwitchingSignal {
            graphs,
            segments,
            periodic,
            boundaries,
            period: acc,
        })
    }

    pub fn fixed(graph: WeightedGraph) -> Self {
        SwitchingSignal::new(vec![graph], vec![(0, 1.0)], true).unwrap()
    }

    pub fn node_count(&self) -> usize {
        self.graphs[0].node_count()
    }

    pub fn graphs(&self) -> &[WeightedGraph] {
        &self.graphs
    }

    pub fn segments(&self) -> &[(usize, f64)] {
        &self.segments
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    /// Total duration of one pass over the segments.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Minimum segment duration (dwell-time floor).
    pub fn dwell_floor(&self) -> f64 {
        self.segments
            .iter()
            .map(|&(_, d)| d)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_switching(&self) -> bool {
        self.segments.len() > 1
    }

    /// Graph indices actually referenced by segments.
    pub fn referenced_graphs(&self) -> Vec<usize> {
        let mut seen = vec![false; self.graphs.len()];
        for &(gi, _) in &self.segments {
            seen[gi] = true;
        }
        (0..self.graphs.len()).filter(|&i| seen[i]).collect()
    }

    /// Index of the segment active at time `t` (right-continuous), plus the
    /// local offset of `t` past that segment's start.
    fn segment_at(&self, t: f64) -> (usize, f64) {
        debug_assert!(t >= 0.0);
        let local = if self.periodic {
            let r = t % self.period;
            // guard against r == period from floating-point wrap
            if r >= self.period {
                0.0
            } else {
                r
            }
        } else if t >= self.period {
            // past the end of a non-periodic schedule the last graph persists
            return (
                self.segments.len() - 1,
                t - self.boundaries[self.segments.len() - 1],
            );
        } else {
            t
        };
        let mut k = match self
            .boundaries
            .binary_search_by(|b| b.partial_cmp(&local).unwrap())
        {
            Ok(exact) => exact,
            Err(ins) => ins - 1,
        };
        if k >= self.segments.len() {
            k = self.segments.len() - 1;
        }
        (k, local - self.boundaries[k])
    }

    pub fn graph_at(&self, t: f64) -> &WeightedGraph {
        let (k, _) = self.segment_at(t);
        &self.graphs[self.segments[k].0]
    }

    /// Next switch instant strictly after `t`, or `None` for one-segment
    /// non-periodic signals past their end.
    pub fn next_switch_after(&self, t: f64) -> Option<f64> {
        if self.segments.len() == 1 && !self.periodic {
            return None;
        }
        if self.segments.len() == 1 {
            // periodic one-segment signal never actually changes graph
            return None;
        }
        if !self.periodic && t >= self.period {
            return None;
        }
        let (k, offset) = self.segment_at(t);
        let remaining = self.segments[k].1 - offset;
        Some(t + remaining)
    }

    /// Joint graph over `[t1, t2)`: union of all edge sets active in the
    /// window, keeping the maximum weight per edge.
    pub fn joint_graph(&self, t1: f64, t2: f64) -> Result<WeightedGraph, NetworkError> {
        if !(t1 >= 0.0 && t1 < t2) {
            return Err(NetworkError::InvalidSignal(format!(
                "bad window [{t1}, {t2})"
            )));
        }
        let mut joint = WeightedGraph {
            n: self.node_count(),
            edges: Vec::new(),
        };
        let mut t = t1;
        loop {
            let (k, _) = self.segment_at(t);
            joint = joint.union_with(&self.graphs[self.segments[k].0]);
            match self.next_switch_after(t) {
                Some(s) if s < t2 => t = s,
                _ => break,
            }
            // once every graph is merged there is nothing left to add
            if joint.edges.len()
                >= self
                    .referenced_graphs()
                    .iter()
                    .map(|&gi| self.graphs[gi].edges.len())
                    .sum()
            {
                break;
            }
        }
        Ok(joint)
    }

    /// True iff the joint graph over every window `[t, t+T)` is connected.
    /// For periodic signals it suffices to slide the window start over the
    /// segment boundaries of one period.
    pub fn is_uniformly_jointly_connected(&self, window: f64) -> Result<bool, NetworkError> {
        if !(window > 0.0) {
            return Err(NetworkError::InvalidSignal("window must be positive".into()));
        }
        if !self.periodic {
            return Err(NetworkError::InvalidSignal(
                "joint-connectivity check requires a periodic signal".into(),
            ));
        }
        for &b in &self.boundaries {
            if !self.joint_graph(b, b + window)?.is_connected() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Classification against the hypotheses of the three convergence
    /// theorems.
    pub fn classify_scenario(&self) -> Result<ScenarioClass, NetworkError> {
        if self.segments.len() == 1 {
            return Ok(if self.graphs[self.segments[0].0].is_connected() {
                ScenarioClass::FixedConnected
            } else {
                ScenarioClass::Unsupported
            });
        }
        let all_connected = self
            .referenced_graphs()
            .iter()
            .all(|&gi| self.graphs[gi].is_connected());
        if all_connected {
            return Ok(ScenarioClass::SwitchingAllConnected);
        }
        if self.periodic {
            for k in 1..=self.segments.len() {
                let window = k as f64 * self.period;
                if self.is_uniformly_jointly_connected(window)? {
                    return Ok(ScenarioClass::UniformlyJointlyConnected { window });
                }
            }
        }
        Ok(ScenarioClass::Unsupported)
    }

    /// Spectral floors over the referenced graphs: the minimum algebraic
    /// connectivity `σ₂*`, and the minimum smallest eigenvalue `σ_m*` of
    /// `L⊗I_m + H̃`. Diagnostic only.
    pub fn spectral_floors(
        &self,
        problem: &LinearEquationProblem,
    ) -> Result<(f64, f64), NetworkError> {
        let m = problem.unknown_dim();
        let n = self.node_count();
        let mut sigma2_star = f64::INFINITY;
        let mut sigmam_star = f64::INFINITY;
        for &gi in &self.referenced_graphs() {
            let g = &self.graphs[gi];
            sigma2_star = sigma2_star.min(g.algebraic_connectivity()?);
            let l = g.laplacian();
            let mut p = DenseMatrix::zeros(n * m, n * m);
            for bi in 0..n {
                for bj in 0..n {
                    let lij = l.get(bi, bj);
                    if lij != 0.0 {
                        for d in 0..m {
                            p.add_to(bi * m + d, bj * m + d, lij);
                        }
                    }
                }
                let hi = problem.matrix().row(bi);
                for a in 0..m {
                    for b in 0..m {
                        p.add_to(bi * m + a, bi * m + b, hi[a] * hi[b]);
                    }
                }
            }
            sigmam_star = sigmam_star.min(sym_eigen(&p)?.smallest());
        }
        Ok((sigma2_star, sigmam_star))
    }
}

/// Which convergence theorem covers a switching signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioClass {
    FixedConnected,
    SwitchingAllConnected,
    UniformlyJointlyConnected { window: f64 },
    Unsupported,
}

impl ScenarioClass {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioClass::FixedConnected => "fixed-connected",
            ScenarioClass::SwitchingAllConnected => "switching-all-connected",
            ScenarioClass::UniformlyJointlyConnected { .. } => "uniformly-jointly-connected",
            ScenarioClass::Unsupported => "unsupported",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::norm;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn g3() -> WeightedGraph {
        WeightedGraph::new(5, &[(1, 2, 1.0), (2, 3, 1.0)]).unwrap()
    }

    fn g4() -> WeightedGraph {
        WeightedGraph::new(5, &[(3, 4, 1.0), (4, 5, 1.0), (5, 1, 1.0)]).unwrap()
    }

    fn example3_signal() -> SwitchingSignal {
        SwitchingSignal::new(
            vec![WeightedGraph::path(5), WeightedGraph::star(5, 3)],
            vec![(0, 0.1), (1, 0.1)],
            true,
        )
        .unwrap()
    }

    fn example4_signal() -> SwitchingSignal {
        SwitchingSignal::new(vec![g3(), g4()], vec![(0, 0.1), (1, 0.1)], true).unwrap()
    }

    #[test]
    fn laplacian_single_edge() {
        let g = WeightedGraph::new(2, &[(1, 2, 1.0)]).unwrap();
        let l = g.laplacian();
        assert_eq!(
            (l.get(0, 0), l.get(0, 1), l.get(1, 0), l.get(1, 1)),
            (1.0, -1.0, -1.0, 1.0)
        );
    }

    #[test]
    fn laplacian_path4() {
        let l = WeightedGraph::path(4).laplacian();
        let expected = [
            [1.0, -1.0, 0.0, 0.0],
            [-1.0, 2.0, -1.0, 0.0],
            [0.0, -1.0, 2.0, -1.0],
            [0.0, 0.0, -1.0, 1.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(l.get(i, j), expected[i][j]);
            }
        }
    }

    #[test]
    fn laplacian_empty_graph_is_zero() {
        let l = WeightedGraph::new(3, &[]).unwrap().laplacian();
        assert_eq!(l.frobenius_norm(), 0.0);
    }

    #[test]
    fn laplacian_row_sums_and_psd() {
        let g = WeightedGraph::new(
            5,
            &[(1, 2, 0.5), (2, 3, 2.0), (3, 4, 1.0), (4, 5, 3.0), (1, 5, 0.1)],
        )
        .unwrap();
        let l = g.laplacian();
        let ones = vec![1.0; 5];
        let l1 = l.matvec(&ones).unwrap();
        assert!(norm(&l1) <= 1e-12);
        let eig = sym_eigen(&l).unwrap();
        assert!(eig.smallest() >= -1e-10);
    }

    #[test]
    fn algebraic_connectivity_values() {
        let g = WeightedGraph::new(2, &[(1, 2, 1.0)]).unwrap();
        assert!((g.algebraic_connectivity().unwrap() - 2.0).abs() < 1e-12);

        // path-graph spectrum 2(1 − cos(kπ/4))
        let path = WeightedGraph::path(4);
        let expected = 2.0 * (1.0 - (std::f64::consts::PI / 4.0).cos());
        assert!((path.algebraic_connectivity().unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.5858).abs() < 1e-4);

        let disconnected = WeightedGraph::new(4, &[(1, 2, 1.0), (3, 4, 1.0)]).unwrap();
        assert!(disconnected.algebraic_connectivity().unwrap().abs() < 1e-12);
    }

    #[test]
    fn connectivity_bfs() {
        assert!(WeightedGraph::path(4).is_connected());
        assert!(!WeightedGraph::new(3, &[]).unwrap().is_connected());
        assert!(!g3().is_connected());
        assert!(!g4().is_connected());
    }

    #[test]
    fn bfs_agrees_with_fiedler_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let n = rng.gen_range(2..=10usize);
            let mut edges = Vec::new();
            for i in 1..=n {
                for j in (i + 1)..=n {
                    if rng.gen_bool(0.3) {
                        edges.push((i, j, rng.gen_range(0.1..3.0)));
                    }
                }
            }
            let g = WeightedGraph::new(n, &edges).unwrap();
            let fiedler = g.algebraic_connectivity().unwrap();
            assert_eq!(g.is_connected(), fiedler > 1e-9, "n={n} edges={edges:?}");
        }
    }

    #[test]
    fn graph_rejects_bad_edges() {
        assert!(WeightedGraph::new(3, &[(1, 1, 1.0)]).is_err());
        assert!(WeightedGraph::new(3, &[(1, 4, 1.0)]).is_err());
        assert!(WeightedGraph::new(3, &[(1, 2, 0.0)]).is_err());
        assert!(WeightedGraph::new(3, &[(1, 2, 1.0), (2, 1, 2.0)]).is_err());
    }

    #[test]
    fn graph_at_schedule() {
        let s = example3_signal();
        assert_eq!(s.graph_at(0.05), &WeightedGraph::path(5));
        assert_eq!(s.graph_at(0.15), &WeightedGraph::star(5, 3));
        // right-continuity at the switch instant
        assert_eq!(s.graph_at(0.1), &WeightedGraph::star(5, 3));
        assert_eq!(s.graph_at(0.2), &WeightedGraph::path(5));
        // periodicity
        assert_eq!(s.graph_at(0.05), s.graph_at(0.05 + 0.2));
        assert_eq!(s.graph_at(0.15), s.graph_at(0.15 + 12.0 * 0.2));

        let fixed = SwitchingSignal::fixed(WeightedGraph::path(3));
        assert_eq!(fixed.graph_at(0.0), &WeightedGraph::path(3));
        assert_eq!(fixed.graph_at(1234.5), &WeightedGraph::path(3));
    }

    #[test]
    fn joint_graph_unions() {
        let s = example4_signal();
        let joint = s.joint_graph(0.0, 0.2).unwrap();
        assert!(joint.is_connected());
        assert_eq!(joint.edges().len(), 5);

        // window inside one segment
        let inside = s.joint_graph(0.01, 0.05).unwrap();
        assert_eq!(inside, g3());

        // two disjoint single-edge graphs alternating
        let a = WeightedGraph::new(4, &[(1, 2, 1.0)]).unwrap();
        let b = WeightedGraph::new(4, &[(3, 4, 2.0)]).unwrap();
        let alt = SwitchingSignal::new(vec![a, b], vec![(0, 1.0), (1, 1.0)], true).unwrap();
        assert_eq!(alt.joint_graph(0.0, 2.0).unwrap().edges().len(), 2);
    }

    #[test]
    fn joint_graph_monotone() {
        let s = example4_signal();
        for (a, b, c) in [(0.0, 0.05, 0.15), (0.05, 0.1, 0.3), (0.12, 0.19, 0.45)] {
            let small = s.joint_graph(a, b).unwrap();
            let big = s.joint_graph(a, c).unwrap();
            for e in small.edges() {
                assert!(big.edges().iter().any(|x| x.i == e.i && x.j == e.j));
            }
        }
    }

    #[test]
    fn joint_graph_max_weight_on_conflict() {
        let a = WeightedGraph::new(2, &[(1, 2, 1.0)]).unwrap();
        let b = WeightedGraph::new(2, &[(1, 2, 3.0)]).unwrap();
        let s = SwitchingSignal::new(vec![a, b], vec![(0, 1.0), (1, 1.0)], true).unwrap();
        let joint = s.joint_graph(0.0, 2.0).unwrap();
        assert_eq!(joint.edges()[0].w, 3.0);
    }

    #[test]
    fn uniformly_jointly_connected_windows() {
        let s = example4_signal();
        assert!(s.is_uniformly_jointly_connected(0.2).unwrap());
        assert!(!s.is_uniformly_jointly_connected(0.05).unwrap());
        let all_connected = example3_signal();
        assert!(all_connected.is_uniformly_jointly_connected(0.07).unwrap());
    }

    #[test]
    fn scenario_classification() {
        let fixed = SwitchingSignal::fixed(WeightedGraph::path(4));
        assert_eq!(
            fixed.classify_scenario().unwrap(),
            ScenarioClass::FixedConnected
        );

        assert_eq!(
            example3_signal().classify_scenario().unwrap(),
            ScenarioClass::SwitchingAllConnected
        );

        match example4_signal().classify_scenario().unwrap() {
            ScenarioClass::UniformlyJointlyConnected { window } => {
                assert!((window - 0.2).abs() < 1e-12);
            }
            other => panic!("expected jointly connected, got {other:?}"),
        }

        // two graphs that never jointly connect node 5
        let a = WeightedGraph::new(5, &[(1, 2, 1.0)]).unwrap();
        let b = WeightedGraph::new(5, &[(2, 3, 1.0), (3, 4, 1.0)]).unwrap();
        let s = SwitchingSignal::new(vec![a, b], vec![(0, 0.1), (1, 0.1)], true).unwrap();
        assert_eq!(s.classify_scenario().unwrap(), ScenarioClass::Unsupported);
    }

    #[test]
    fn spectral_floor_positive_for_full_rank() {
        let p = LinearEquationProblem::from_rows(
            &[
                vec![1.0, 1.0],
                vec![1.0, 2.3],
                vec![-0.5, 0.8],
                vec![0.8, 0.2],
            ],
            vec![1.0, 3.0, 2.0, -1.0],
        )
        .unwrap();
        let s = SwitchingSignal::fixed(WeightedGraph::path(4));
        let (s2, sm) = s.spectral_floors(&p).unwrap();
        assert!(s2 > 0.58 && s2 < 0.59);
        assert!(sm > 0.0, "full-rank H forces positive definiteness, got {sm}");
    }

    #[test]
    fn spectral_floor_reported_for_rank_deficient() {
        let c = [2.0, 1.0, 1.5, -0.75, 0.5];
        let p = LinearEquationProblem::from_rows(
            &c.iter().map(|ci| vec![2.0 * ci, -ci]).collect::<Vec<_>>(),
            vec![1.0, 3.0, 2.0, 3.0, -2.0],
        )
        .unwrap();
        let (s2, sm) = example3_signal().spectral_floors(&p).unwrap();
        assert!(s2 > 0.0);
        // rank-deficient H: L⊗I + H̃ may be only semidefinite
        assert!(sm >= -1e-9);
    }

    #[test]
    fn dwell_floor_and_period() {
        let s = example3_signal();
        assert!((s.period() - 0.2).abs() < 1e-15);
        assert!((s.dwell_floor() - 0.1).abs() < 1e-15);
    }
}

//! Extreme cycle means of the block graph and the critical subgraphs that
//! attain them.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::error::Result;
use crate::perron::{log_spectral_radius, Dense};
use crate::potential::{PeriodicOrbit, Potential};
use crate::sft::{Sft, Word};
use crate::thermo::Transfer;

/// Which end of the rotation interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Max,
    Min,
}

/// `[alpha_min, alpha_max]` with cycles attaining both ends.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationInterval {
    pub alpha_min: f64,
    pub alpha_max: f64,
    #[serde(serialize_with = "as_string")]
    pub argmin_cycle: PeriodicOrbit,
    #[serde(serialize_with = "as_string")]
    pub argmax_cycle: PeriodicOrbit,
}

fn as_string<S: serde::Serializer>(o: &PeriodicOrbit, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&o.to_string())
}

impl RotationInterval {
    pub fn width(&self) -> f64 {
        self.alpha_max - self.alpha_min
    }

    pub fn is_degenerate(&self) -> bool {
        let scale = 1.0 + self.alpha_min.abs().max(self.alpha_max.abs());
        self.width() <= 1e-12 * scale
    }

    pub fn contains(&self, alpha: f64) -> bool {
        (self.alpha_min..=self.alpha_max).contains(&alpha)
    }
}

/// Weighted block graph of a potential.
pub(crate) struct CycleGraph {
    pub vertices: Vec<Word>,
    pub edges: Vec<(usize, usize, f64)>,
}

impl CycleGraph {
    pub fn new(phi: &Potential) -> Result<Self> {
        let tr = Transfer::new(phi)?;
        let values = phi.values();
        Ok(CycleGraph {
            vertices: tr.vertices().to_vec(),
            edges: tr.edges().map(|(a, b, i)| (a, b, values[i])).collect(),
        })
    }

    fn oriented(&self, side: Side) -> Vec<(usize, usize, f64)> {
        match side {
            Side::Max => self.edges.clone(),
            Side::Min => self.edges.iter().map(|&(a, b, w)| (a, b, -w)).collect(),
        }
    }

    /// Critical edges for the requested side, as indices into `edges`.
    pub fn critical(&self, side: Side) -> Vec<usize> {
        let edges = self.oriented(side);
        let n = self.vertices.len();
        let lambda = karp(n, &edges);
        let reduced: Vec<f64> = edges.iter().map(|e| e.2 - lambda).collect();
        // longest-path potentials; no positive cycles up to rounding
        let mut pi = vec![0.0f64; n];
        for _ in 0..n {
            let mut changed = false;
            for (k, &(a, b, _)) in edges.iter().enumerate() {
                let cand = pi[a] + reduced[k];
                if cand > pi[b] {
                    pi[b] = cand;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let wmax = edges.iter().map(|e| e.2.abs()).fold(0.0, f64::max);
        let tol = 1e-9 * (1.0 + wmax);
        let tight: Vec<usize> = (0..edges.len())
            .filter(|&k| {
                let (a, b, _) = edges[k];
                reduced[k] + pi[a] - pi[b] >= -tol
            })
            .collect();
        let mut g = DiGraph::<(), ()>::with_capacity(n, tight.len());
        for _ in 0..n {
            g.add_node(());
        }
        for &k in &tight {
            g.add_edge(NodeIndex::new(edges[k].0), NodeIndex::new(edges[k].1), ());
        }
        let mut component = vec![usize::MAX; n];
        for (c, scc) in tarjan_scc(&g).into_iter().enumerate() {
            for v in scc {
                component[v.index()] = c;
            }
        }
        tight
            .into_iter()
            .filter(|&k| {
                let (a, b, _) = edges[k];
                component[a] == component[b]
            })
            .collect()
    }

    /// Shortest cycle made of the given edges, as the symbol word read off
    /// the first symbol of each vertex. Ties go to the lowest start vertex.
    pub fn shortest_cycle(&self, edge_ids: &[usize]) -> Option<Word> {
        let n = self.vertices.len();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &k in edge_ids {
            succ[self.edges[k].0].push(self.edges[k].1);
        }
        let mut best: Option<Vec<usize>> = None;
        for start in 0..n {
            if succ[start].is_empty() {
                continue;
            }
            // BFS for the shortest return to `start`
            let mut parent = vec![usize::MAX; n];
            let mut queue = std::collections::VecDeque::new();
            let mut found = None;
            for &b in &succ[start] {
                if b == start {
                    found = Some(start);
                    break;
                }
                if parent[b] == usize::MAX {
                    parent[b] = start;
                    queue.push_back(b);
                }
            }
            while found.is_none() {
                let Some(v) = queue.pop_front() else { break };
                for &b in &succ[v] {
                    if b == start {
                        found = Some(v);
                        break;
                    }
                    if parent[b] == usize::MAX && b != start {
                        parent[b] = v;
                        queue.push_back(b);
                    }
                }
            }
            let Some(last) = found else { continue };
            let mut cycle = vec![last];
            let mut v = last;
            while v != start {
                v = parent[v];
                cycle.push(v);
            }
            cycle.reverse();
            if cycle.len() > 1 && cycle[0] == cycle[cycle.len() - 1] {
                cycle.pop();
            }
            if best.as_ref().is_none_or(|b| cycle.len() < b.len()) {
                best = Some(cycle);
            }
        }
        best.map(|cycle| {
            Word::new(
                cycle
                    .iter()
                    .map(|&v| self.vertices[v].symbols()[0])
                    .collect(),
            )
        })
    }

    /// `log` spectral radius of the 0/1 adjacency of the given edges.
    pub fn entropy_of(&self, edge_ids: &[usize]) -> f64 {
        let mut m = Dense::zeros(self.vertices.len());
        for &k in edge_ids {
            m.set(self.edges[k].0, self.edges[k].1, 1.0);
        }
        log_spectral_radius(&m).max(0.0)
    }
}

/// Karp's maximum cycle mean for a strongly connected graph.
pub(crate) fn karp(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
    let mut d = vec![vec![f64::NEG_INFINITY; n]; n + 1];
    d[0][0] = 0.0;
    for k in 1..=n {
        let (prev, cur) = d.split_at_mut(k);
        let (prev, cur) = (&prev[k - 1], &mut cur[0]);
        for &(a, b, w) in edges {
            if prev[a] > f64::NEG_INFINITY {
                let cand = prev[a] + w;
                if cand > cur[b] {
                    cur[b] = cand;
                }
            }
        }
    }
    let mut best = f64::NEG_INFINITY;
    for v in 0..n {
        if d[n][v] == f64::NEG_INFINITY {
            continue;
        }
        let mut worst = f64::INFINITY;
        for k in 0..n {
            if d[k][v] > f64::NEG_INFINITY {
                worst = worst.min((d[n][v] - d[k][v]) / (n - k) as f64);
            }
        }
        best = best.max(worst);
    }
    best
}

fn witness(graph: &CycleGraph, side: Side) -> PeriodicOrbit {
    let crit = graph.critical(side);
    let word = graph
        .shortest_cycle(&crit)
        .expect("a strongly connected graph has a critical cycle");
    PeriodicOrbit::new(word.canonical_rotation()).expect("a simple vertex cycle is primitive")
}

/// Rotation interval of a locally constant potential. Both ends are the
/// Birkhoff averages of explicit optimal cycles.
pub fn rotation_set(sft: &Sft, phi: &Potential) -> Result<RotationInterval> {
    crate::thermo::check_sft(sft, phi)?;
    let graph = CycleGraph::new(phi)?;
    let argmax_cycle = witness(&graph, Side::Max);
    let argmin_cycle = witness(&graph, Side::Min);
    Ok(RotationInterval {
        alpha_min: phi.birkhoff_average(&argmin_cycle)?,
        alpha_max: phi.birkhoff_average(&argmax_cycle)?,
        argmin_cycle,
        argmax_cycle,
    })
}

/// Topological entropy of the subgraph of edges lying on extreme-mean
/// cycles, which is the spectrum value at that end of the rotation set.
pub fn critical_subgraph_entropy(sft: &Sft, phi: &Potential, side: Side) -> Result<f64> {
    crate::thermo::check_sft(sft, phi)?;
    let graph = CycleGraph::new(phi)?;
    Ok(graph.entropy_of(&graph.critical(side)))
}

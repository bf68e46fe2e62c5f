//! Minimum-weight perfect matching decoder over a detection graph with a
//! single boundary node.

mod blossom;
mod graph;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

pub use blossom::max_weight_matching;
pub use graph::{edge_weight, GraphEdge, MatchingGraph};

use crate::error::{Error, Result};

/// Weights are compared as integers after scaling by this factor.
const QUANTUM: f64 = 1e9;

#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// `(event, partner)` with `partner == None` for a boundary match, listed
    /// once per pair with `event < partner`.
    pub pairs: Vec<(usize, Option<usize>)>,
    pub weight: f64,
    /// Predicted logical flip: parity of the masks along every matched path.
    pub flip: bool,
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Decoder for one graph, holding reusable scratch space.
#[derive(Debug, Clone)]
pub struct Decoder<'g> {
    graph: &'g MatchingGraph,
    boundary_dist: Vec<f64>,
    boundary_parity: Vec<bool>,
    dist: Vec<f64>,
    parity: Vec<bool>,
    touched: Vec<usize>,
    slot: Vec<usize>,
}

impl<'g> Decoder<'g> {
    pub fn new(graph: &'g MatchingGraph) -> Self {
        let n = graph.num_detectors() + 1;
        let mut d = Self {
            graph,
            boundary_dist: Vec::new(),
            boundary_parity: Vec::new(),
            dist: vec![f64::INFINITY; n],
            parity: vec![false; n],
            touched: Vec::new(),
            slot: vec![usize::MAX; n],
        };
        d.dijkstra(graph.boundary(), f64::INFINITY, true);
        d.boundary_dist = d.dist.clone();
        d.boundary_parity = d.parity.clone();
        d.reset();
        d
    }

    pub fn graph(&self) -> &MatchingGraph {
        self.graph
    }

    /// Distance from `node` to the boundary.
    pub fn boundary_distance(&self, node: usize) -> f64 {
        self.boundary_dist[node]
    }

    fn reset(&mut self) {
        for &n in &self.touched {
            self.dist[n] = f64::INFINITY;
            self.parity[n] = false;
        }
        self.touched.clear();
    }

    /// Shortest paths from `src` up to `radius`. The boundary is only passed
    /// through when `through_boundary` is set (or is the source).
    fn dijkstra(&mut self, src: usize, radius: f64, through_boundary: bool) {
        let boundary = self.graph.boundary();
        let mut heap = BinaryHeap::new();
        self.dist[src] = 0.0;
        self.touched.push(src);
        heap.push(Entry { dist: 0.0, node: src });
        while let Some(Entry { dist, node }) = heap.pop() {
            if dist > self.dist[node] {
                continue;
            }
            if dist > radius {
                break;
            }
            if node == boundary && node != src && !through_boundary {
                continue;
            }
            let par = self.parity[node];
            for e in &self.graph.adj[node] {
                let nd = dist + e.weight;
                if nd < self.dist[e.to] {
                    if self.dist[e.to].is_infinite() {
                        self.touched.push(e.to);
                    }
                    self.dist[e.to] = nd;
                    self.parity[e.to] = par ^ e.mask;
                    heap.push(Entry { dist: nd, node: e.to });
                }
            }
        }
    }

    /// Matches `events` (detector nodes) pairwise or to the boundary with
    /// minimum total path weight.
    pub fn decode(&mut self, events: &[usize]) -> Result<Matching> {
        let n = events.len();
        if n == 0 {
            return Ok(Matching {
                pairs: Vec::new(),
                weight: 0.0,
                flip: false,
            });
        }
        for (i, &e) in events.iter().enumerate() {
            if e >= self.graph.num_detectors() {
                return Err(Error::Decoder(format!("event node {e} out of range")));
            }
            if self.slot[e] != usize::MAX {
                self.clear_slots(&events[..i]);
                return Err(Error::Decoder(format!("duplicate event node {e}")));
            }
            self.slot[e] = i;
        }
        let db: Vec<f64> = events.iter().map(|&e| self.boundary_dist[e]).collect();
        let max_db = db
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max);

        // Boundary option per event, and candidate pairs (i < j) that beat
        // sending both events to the boundary.
        let to_boundary: Vec<Option<(f64, bool)>> = (0..n)
            .map(|i| db[i].is_finite().then(|| (db[i], self.boundary_parity[events[i]])))
            .collect();
        let mut pair_edges: Vec<(usize, usize, f64, bool)> = Vec::new();
        for i in 0..n.saturating_sub(1) {
            let radius = if db[i].is_finite() {
                db[i] + max_db
            } else {
                f64::INFINITY
            };
            self.dijkstra(events[i], radius, false);
            for j in i + 1..n {
                let d = self.dist[events[j]];
                if d.is_finite() && !(d >= db[i] + db[j]) {
                    pair_edges.push((i, j, d, self.parity[events[j]]));
                }
            }
            self.reset();
        }
        self.clear_slots(events);

        // Components of the candidate-pair graph are independent problems.
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(i, j, _, _) in &pair_edges {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut comp_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            let r = find(&mut parent, i);
            members[r].push(i);
        }
        for (k, &(i, _, _, _)) in pair_edges.iter().enumerate() {
            let r = find(&mut parent, i);
            comp_edges[r].push(k);
        }

        let mut partner: Vec<Option<usize>> = vec![None; n];
        for r in 0..n {
            let m = &members[r];
            if m.is_empty() {
                continue;
            }
            if m.len() == 1 {
                if to_boundary[m[0]].is_none() {
                    return Err(Error::Decoder(format!(
                        "event at node {} cannot be matched",
                        events[m[0]]
                    )));
                }
                continue;
            }
            if m.len() == 2 {
                // The single candidate pair beats two boundary matches.
                partner[m[0]] = Some(m[1]);
                partner[m[1]] = Some(m[0]);
                continue;
            }
            self.solve_component(m, &comp_edges[r], &pair_edges, &to_boundary, &mut partner)
                .map_err(|_| {
                    Error::Decoder(format!(
                        "no perfect matching for events at nodes {:?}",
                        m.iter().map(|&i| events[i]).collect::<Vec<_>>()
                    ))
                })?;
        }

        let mut pairs = Vec::with_capacity(n);
        let mut weight = 0.0;
        let mut flip = false;
        for i in 0..n {
            match partner[i] {
                Some(j) if j > i => {
                    let &(_, _, w, par) = pair_edges
                        .iter()
                        .find(|e| (e.0, e.1) == (i, j))
                        .expect("matched pair is a candidate edge");
                    weight += w;
                    flip ^= par;
                    pairs.push((events[i], Some(events[j])));
                }
                Some(_) => {}
                None => {
                    let (w, par) = to_boundary[i].expect("boundary match has a path");
                    weight += w;
                    flip ^= par;
                    pairs.push((events[i], None));
                }
            }
        }
        Ok(Matching {
            pairs,
            weight,
            flip,
        })
    }

    /// Exact matching of one component: events `0..k` plus one boundary copy
    /// per event at `k..2k`. Boundary copies are joined wherever their events
    /// are, so unused copies can always pair up.
    fn solve_component(
        &self,
        members: &[usize],
        edge_ids: &[usize],
        pair_edges: &[(usize, usize, f64, bool)],
        to_boundary: &[Option<(f64, bool)>],
        partner: &mut [Option<usize>],
    ) -> std::result::Result<(), ()> {
        let k = members.len();
        let local = |i: usize| members.binary_search(&i).expect("member of component");
        let quant = |w: f64| (w * QUANTUM).round() as i64;
        let mut edges: Vec<(usize, usize, i64)> = Vec::with_capacity(2 * edge_ids.len() + k);
        for &e in edge_ids {
            let (i, j, w, _) = pair_edges[e];
            let (a, b) = (local(i), local(j));
            edges.push((a, b, quant(w)));
            edges.push((k + a, k + b, 0));
        }
        for (a, &i) in members.iter().enumerate() {
            if let Some((w, _)) = to_boundary[i] {
                edges.push((a, k + a, quant(w)));
            }
        }
        let big = edges.iter().map(|e| e.2).max().unwrap_or(0) + 1;
        for e in &mut edges {
            e.2 = big - e.2;
        }
        let mate = max_weight_matching(2 * k, &edges, true);
        if mate.iter().any(Option::is_none) {
            return Err(());
        }
        for a in 0..k {
            let m = mate[a].unwrap();
            if m < k {
                partner[members[a]] = Some(members[m]);
            } else if m != k + a {
                return Err(());
            }
        }
        Ok(())
    }

    fn clear_slots(&mut self, events: &[usize]) {
        for &e in events {
            self.slot[e] = usize::MAX;
        }
    }
}

/// One-off decode; prefer [`Decoder`] when decoding many syndromes.
pub fn min_weight_perfect_matching(graph: &MatchingGraph, events: &[usize]) -> Result<Matching> {
    Decoder::new(graph).decode(events)
}

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::error_model::Sector;
use crate::surface_sim::faults::SingleFault;
use crate::surface_sim::frame::SimRates;

/// Edge weight of a mechanism with total probability `p`.
pub fn edge_weight(p: f64) -> f64 {
    (-p.max(1e-300).ln()).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphEdge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
    /// Whether the mechanism behind this edge flips the logical operator.
    pub mask: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Adj {
    pub to: usize,
    pub weight: f64,
    pub mask: bool,
}

/// Weighted detection graph. Nodes `0..num_detectors` are detectors; node
/// `num_detectors` is the single boundary node.
#[derive(Debug, Clone)]
pub struct MatchingGraph {
    num_detectors: usize,
    stabs_per_layer: usize,
    edges: Vec<GraphEdge>,
    pub(crate) adj: Vec<Vec<Adj>>,
}

impl MatchingGraph {
    /// Graph over `num_detectors` detectors plus a boundary node at index
    /// `num_detectors`. Parallel edges are kept as given.
    pub fn from_edges(num_detectors: usize, edges: Vec<GraphEdge>) -> Result<Self> {
        Self::with_layers(num_detectors, num_detectors.max(1), edges)
    }

    fn with_layers(num_detectors: usize, stabs_per_layer: usize, edges: Vec<GraphEdge>) -> Result<Self> {
        let mut adj = vec![Vec::new(); num_detectors + 1];
        for e in &edges {
            if e.a > num_detectors || e.b > num_detectors || e.a == e.b {
                return Err(Error::InvalidArgument(format!(
                    "bad edge {}-{} in graph of {num_detectors} detectors",
                    e.a, e.b
                )));
            }
            if !(e.weight >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "edge {}-{} has weight {}",
                    e.a, e.b, e.weight
                )));
            }
            adj[e.a].push(Adj {
                to: e.b,
                weight: e.weight,
                mask: e.mask,
            });
            adj[e.b].push(Adj {
                to: e.a,
                weight: e.weight,
                mask: e.mask,
            });
        }
        Ok(Self {
            num_detectors,
            stabs_per_layer,
            edges,
            adj,
        })
    }

    /// Space-time graph of `rounds` noisy rounds plus the noiseless readout
    /// round, built by translating every single-round fault over time.
    ///
    /// Mechanisms landing on the same node pair are merged: probabilities add
    /// and the logical mask follows the most likely contributor.
    pub fn build(
        faults: &[SingleFault],
        num_stabs: usize,
        rates: &SimRates,
        sector: Sector,
        rounds: usize,
    ) -> Result<Self> {
        let layers = rounds + 1;
        let num_detectors = layers * num_stabs;
        let boundary = num_detectors;
        // (a, b) -> (total p, best p, mask of best)
        let mut merged: BTreeMap<(usize, usize), (f64, f64, bool)> = BTreeMap::new();
        for f in faults {
            let p = f.probability(rates);
            if p <= 0.0 {
                continue;
            }
            let ev = f.events(sector);
            if ev.len() > 2 {
                return Err(Error::Decoder(format!(
                    "fault {:?} produces {} events in one sector",
                    f.kind,
                    ev.len()
                )));
            }
            if ev.is_empty() {
                if f.flips(sector) {
                    return Err(Error::Decoder(format!(
                        "fault {:?} flips the logical without detection",
                        f.kind
                    )));
                }
                continue;
            }
            for t in 0..rounds {
                let node = |e: &crate::surface_sim::faults::RelativeEvent| (t + e.dt) * num_stabs + e.stab;
                let a = node(&ev[0]);
                let b = ev.get(1).map_or(boundary, node);
                let key = (a.min(b), a.max(b));
                let entry = merged.entry(key).or_insert((0.0, 0.0, false));
                entry.0 += p;
                if p > entry.1 {
                    entry.1 = p;
                    entry.2 = f.flips(sector);
                }
            }
        }
        let edges = merged
            .into_iter()
            .map(|((a, b), (p, _, mask))| GraphEdge {
                a,
                b,
                weight: edge_weight(p),
                mask,
            })
            .collect();
        Self::with_layers(num_detectors, num_stabs, edges)
    }

    pub fn num_detectors(&self) -> usize {
        self.num_detectors
    }

    pub fn boundary(&self) -> usize {
        self.num_detectors
    }

    /// Node index of stabilizer `stab` in round `round`.
    pub fn node(&self, stab: usize, round: usize) -> usize {
        round * self.stabs_per_layer + stab
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    /// Writes the edge list as `nodeA,nodeB,weight,mask` CSV.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["nodeA", "nodeB", "weight", "mask"])?;
        for e in &self.edges {
            w.write_record([
                e.a.to_string(),
                e.b.to_string(),
                format!("{:.6}", e.weight),
                u8::from(e.mask).to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<graph>", e))?;
        Ok(())
    }
}

//! Time-evolving random graphs: the preferential-attachment family and the
//! copy model, generated in arrival order.
//!
//! Nodes are labelled `1..=n` by arrival. The first `m + 1` nodes form a
//! clique; every later node `v` issues exactly `m` edge slots `(u, v, j)` with
//! `u < v` and `j` in `1..=m`.

mod io;
mod multigraph;
mod stages;
mod triples;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};

pub use io::{load_graph, read_graph, save_graph, write_graph};
pub use multigraph::Multigraph;
pub(crate) use multigraph::Csr;
pub use stages::{stage_of, StagePartition};
pub use triples::{sort_triples, OrientedTriple, TripleOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Model {
    PaIndependent,
    PaSequential,
    PaConditional,
    CmIndependent,
    CmConditioned,
}

impl Model {
    pub const ALL: [Model; 5] = [
        Model::PaIndependent,
        Model::PaSequential,
        Model::PaConditional,
        Model::CmIndependent,
        Model::CmConditioned,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::PaIndependent => "PA_INDEPENDENT",
            Model::PaSequential => "PA_SEQUENTIAL",
            Model::PaConditional => "PA_CONDITIONAL",
            Model::CmIndependent => "CM_INDEPENDENT",
            Model::CmConditioned => "CM_CONDITIONED",
        }
    }

    pub fn is_preferential(self) -> bool {
        matches!(self, Model::PaIndependent | Model::PaSequential | Model::PaConditional)
    }

    /// Models that never place two slots of one node on the same target.
    pub fn is_simple(self) -> bool {
        matches!(self, Model::PaConditional | Model::CmConditioned)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Model::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown model {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub model: Model,
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(model: Model, n: usize, m: usize, p: f64, seed: u64) -> Self {
        GenConfig { model, n, m, p, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::Config(format!("m must be >= 1, got {}", self.m)));
        }
        if self.n < self.m + 2 {
            return Err(Error::Config(format!(
                "n must be >= m + 2 = {}, got {}",
                self.m + 2,
                self.n
            )));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Config(format!("p must lie in [0, 1], got {}", self.p)));
        }
        if self.n > u32::MAX as usize {
            return Err(Error::Config(format!("n = {} exceeds the u32 node range", self.n)));
        }
        Ok(())
    }

    pub fn clique_size(&self) -> usize {
        self.m + 1
    }
}

/// An arrival-ordered multigraph with per-node outgoing edge slots.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolvingGraph {
    config: GenConfig,
    // slot (v, j) for v > m + 1 lives at (v - m - 2) * m + (j - 1)
    targets: Vec<u32>,
}

impl EvolvingGraph {
    pub(crate) fn from_parts(config: GenConfig, targets: Vec<u32>) -> Result<Self> {
        config.validate()?;
        let expected = (config.n - config.m - 1) * config.m;
        if targets.len() != expected {
            return Err(Error::Config(format!(
                "expected {expected} edge slots, got {}",
                targets.len()
            )));
        }
        let g = EvolvingGraph { config, targets };
        for v in g.first_arrival()..=g.n() {
            let slots = g.out_targets(v);
            for &u in slots {
                if u == 0 || u as usize >= v {
                    return Err(Error::Config(format!("slot target {u} of node {v} is not earlier")));
                }
            }
            if config.model.is_simple() && has_duplicate(slots) {
                return Err(Error::Config(format!(
                    "node {v} repeats a target under {}",
                    config.model
                )));
            }
        }
        Ok(g)
    }

    pub fn config(&self) -> &GenConfig {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn m(&self) -> usize {
        self.config.m
    }

    pub fn model(&self) -> Model {
        self.config.model
    }

    pub fn clique_size(&self) -> usize {
        self.config.m + 1
    }

    /// First node that issues slots rather than belonging to the clique.
    pub fn first_arrival(&self) -> usize {
        self.config.m + 2
    }

    pub fn is_clique_node(&self, v: usize) -> bool {
        (1..=self.clique_size()).contains(&v)
    }

    /// Targets of `v`'s slots `1..=m`, in slot order. Empty for clique nodes.
    pub fn out_targets(&self, v: usize) -> &[u32] {
        if v < self.first_arrival() || v > self.n() {
            return &[];
        }
        let m = self.m();
        let start = (v - self.first_arrival()) * m;
        &self.targets[start..start + m]
    }

    /// The `i`-th (0-based) outgoing neighbour used when `z` serves as a
    /// copy-model prototype. Clique nodes list their clique neighbours in
    /// ascending order.
    pub fn prototype_slot(&self, z: usize, i: usize) -> usize {
        if self.is_clique_node(z) {
            clique_slot(z, i)
        } else {
            self.out_targets(z)[i] as usize
        }
    }

    pub fn clique_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let c = self.clique_size();
        (1..=c).flat_map(move |u| (u + 1..=c).map(move |v| (u, v)))
    }

    /// All non-clique slots as oriented triples, in arrival-time order.
    pub fn triples(&self) -> Vec<OrientedTriple> {
        (self.first_arrival()..=self.n())
            .flat_map(|v| {
                self.out_targets(v)
                    .iter()
                    .enumerate()
                    .map(move |(j, &u)| OrientedTriple::new(u as usize, v, j + 1))
            })
            .collect()
    }

    /// Every edge (clique plus slots), each listed once as `(smaller, larger)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let slots = (self.first_arrival()..=self.n())
            .flat_map(move |v| self.out_targets(v).iter().map(move |&u| (u as usize, v)));
        self.clique_edges().chain(slots)
    }

    pub fn edge_count(&self) -> usize {
        let c = self.clique_size();
        c * (c - 1) / 2 + self.targets.len()
    }

    /// Degrees with multiplicity, indexed by node (entry 0 unused).
    pub fn degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.n() + 1];
        deg[1..=self.clique_size()].fill(self.m() as u64);
        for v in self.first_arrival()..=self.n() {
            deg[v] += self.m() as u64;
            for &u in self.out_targets(v) {
                deg[u as usize] += 1;
            }
        }
        deg
    }

    pub fn to_multigraph(&self) -> Multigraph {
        Multigraph::from_edges(self.n(), self.edges()).expect("evolving graph edges are in range")
    }
}

fn clique_slot(z: usize, i: usize) -> usize {
    if i + 1 < z {
        i + 1
    } else {
        i + 2
    }
}

fn has_duplicate(slots: &[u32]) -> bool {
    slots.iter().enumerate().any(|(i, u)| slots[..i].contains(u))
}

/// Generates one graph; the result depends only on `cfg`.
pub fn generate(cfg: &GenConfig) -> Result<EvolvingGraph> {
    cfg.validate()?;
    let mut rng = rng::stream(cfg.seed);
    generate_with(cfg, &mut rng)
}

pub fn generate_with(cfg: &GenConfig, rng: &mut StreamRng) -> Result<EvolvingGraph> {
    cfg.validate()?;
    let targets = if cfg.model.is_preferential() {
        preferential(cfg, rng)
    } else {
        copying(cfg, rng)
    };
    debug_assert_eq!(targets.len(), (cfg.n - cfg.m - 1) * cfg.m);
    Ok(EvolvingGraph { config: *cfg, targets })
}

fn preferential(cfg: &GenConfig, rng: &mut StreamRng) -> Vec<u32> {
    let GenConfig { model, n, m, p, .. } = *cfg;
    let clique = m + 1;
    let mut targets = Vec::with_capacity((n - clique) * m);
    // One entry per edge endpoint: a uniform pick from it is a degree-weighted node.
    let mut endpoints: Vec<u32> = Vec::with_capacity(clique * m + 2 * m * (n - clique));
    for c in 1..=clique as u32 {
        endpoints.extend(std::iter::repeat_n(c, m));
    }

    let draw = |rng: &mut StreamRng, endpoints: &[u32], weighted_len: usize, v: usize| -> u32 {
        if rng.random_bool(p) {
            endpoints[rng.random_range(0..weighted_len)]
        } else {
            rng.random_range(1..v as u32)
        }
    };

    for v in clique + 1..=n {
        let before = endpoints.len();
        let start = targets.len();
        match model {
            Model::PaIndependent => {
                for _ in 0..m {
                    let u = draw(rng, &endpoints, before, v);
                    targets.push(u);
                }
            }
            Model::PaSequential => {
                // Earlier slots of v already count toward their targets' weight.
                for _ in 0..m {
                    let u = draw(rng, &endpoints, endpoints.len(), v);
                    targets.push(u);
                    endpoints.push(u);
                }
            }
            Model::PaConditional => {
                for _ in 0..m {
                    let u = loop {
                        let u = draw(rng, &endpoints, before, v);
                        if !targets[start..].contains(&u) {
                            break u;
                        }
                    };
                    targets.push(u);
                }
            }
            Model::CmIndependent | Model::CmConditioned => unreachable!(),
        }
        if model != Model::PaSequential {
            endpoints.extend_from_slice(&targets[start..]);
        }
        endpoints.extend(std::iter::repeat_n(v as u32, m));
        debug_assert!(targets[start..].iter().all(|&u| (u as usize) < v));
    }
    targets
}

fn copying(cfg: &GenConfig, rng: &mut StreamRng) -> Vec<u32> {
    let GenConfig { model, n, m, p, .. } = *cfg;
    let clique = m + 1;
    let mut targets: Vec<u32> = Vec::with_capacity((n - clique) * m);
    let slot_of = |targets: &[u32], z: usize, i: usize| -> u32 {
        if z <= clique {
            clique_slot(z, i) as u32
        } else {
            targets[(z - clique - 1) * m + i]
        }
    };

    for v in clique + 1..=n {
        let z = rng.random_range(1..v);
        let start = targets.len();
        for i in 0..m {
            let copy = rng.random_bool(p);
            let u = match model {
                Model::CmIndependent => {
                    if copy {
                        slot_of(&targets, z, i)
                    } else {
                        rng.random_range(1..v as u32)
                    }
                }
                Model::CmConditioned => {
                    let copied = if copy {
                        (0..m)
                            .map(|r| slot_of(&targets, z, (i + r) % m))
                            .find(|u| !targets[start..].contains(u))
                    } else {
                        None
                    };
                    match copied {
                        Some(u) => u,
                        None => loop {
                            let u = rng.random_range(1..v as u32);
                            if !targets[start..].contains(&u) {
                                break u;
                            }
                        },
                    }
                }
                _ => unreachable!(),
            };
            targets.push(u);
        }
    }
    targets
}

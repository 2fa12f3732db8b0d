//! Synchronous k-complex contagion.
//!
//! Round 0 infects the seeds. In round `r + 1` every uninfected node with at
//! least `k` infected neighbours at the end of round `r` becomes infected, all
//! at once. The process stops when a round adds nobody or `max_rounds` is hit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Csr, EvolvingGraph, Multigraph};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContagionConfig {
    pub k: usize,
    pub seeds: Vec<usize>,
    /// Count parallel edges as separate exposures.
    pub count_multiplicity: bool,
    /// Defaults to the node count.
    pub max_rounds: Option<usize>,
}

impl ContagionConfig {
    pub fn new(k: usize, seeds: Vec<usize>) -> Self {
        ContagionConfig { k, seeds, count_multiplicity: false, max_rounds: None }
    }

    /// Seeds are the `k` oldest nodes.
    pub fn oldest(k: usize) -> Self {
        ContagionConfig::new(k, (1..=k).collect())
    }

    pub fn with_multiplicity(mut self, yes: bool) -> Self {
        self.count_multiplicity = yes;
        self
    }

    pub fn with_max_rounds(mut self, rounds: usize) -> Self {
        self.max_rounds = Some(rounds);
        self
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be >= 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::EmptySeeds);
        }
        if let Some(&bad) = self.seeds.iter().find(|&&s| s == 0 || s > n) {
            return Err(Error::NodeOutOfRange { node: bad, n });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContagionSummary {
    pub infected_count: usize,
    pub rounds_to_fixation: usize,
    pub fully_infected: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContagionResult {
    // indexed by node; entry 0 unused
    rounds: Vec<Option<u32>>,
    pub rounds_to_fixation: usize,
    pub infected_count: usize,
    pub fully_infected: bool,
}

impl ContagionResult {
    pub fn n(&self) -> usize {
        self.rounds.len() - 1
    }

    /// Round in which `node` was infected (0 for seeds).
    pub fn round(&self, node: usize) -> Option<usize> {
        self.rounds.get(node).copied().flatten().map(|r| r as usize)
    }

    pub fn is_infected(&self, node: usize) -> bool {
        self.round(node).is_some()
    }

    /// `(node, round)` for every infected node, by node label.
    pub fn infection_rounds(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rounds
            .iter()
            .enumerate()
            .filter_map(|(v, r)| r.map(|r| (v, r as usize)))
    }

    pub fn newly_infected(&self, round: usize) -> Vec<usize> {
        self.infection_rounds().filter(|&(_, r)| r == round).map(|(v, _)| v).collect()
    }

    pub fn infected_subset_of(&self, other: &ContagionResult) -> bool {
        self.n() == other.n() && self.infection_rounds().all(|(v, _)| other.is_infected(v))
    }

    pub fn summary(&self) -> ContagionSummary {
        ContagionSummary {
            infected_count: self.infected_count,
            rounds_to_fixation: self.rounds_to_fixation,
            fully_infected: self.fully_infected,
        }
    }
}

/// Runs the contagion on an undirected multigraph.
pub fn run(g: &Multigraph, cfg: &ContagionConfig) -> Result<ContagionResult> {
    cfg.check(g.n())?;
    Ok(spread(g.csr(), cfg, !cfg.count_multiplicity))
}

pub fn run_on_graph(g: &EvolvingGraph, cfg: &ContagionConfig) -> Result<ContagionResult> {
    run(&g.to_multigraph(), cfg)
}

/// The pruned directed process: every node follows only its first `k` slots
/// (a clique node follows its `k` smallest predecessors) and is infected once
/// `k` of the nodes it follows are. It can only be slower than [`run`].
pub fn run_directed_pruned(g: &EvolvingGraph, cfg: &ContagionConfig) -> Result<ContagionResult> {
    cfg.check(g.n())?;
    let k = cfg.k;
    if k > g.m() {
        return Err(Error::PrunedThreshold { k, m: g.m() });
    }
    let mut arcs: Vec<(u32, u32)> = Vec::with_capacity(g.n() * k);
    let mut followed: Vec<u32> = Vec::with_capacity(k);
    for v in 2..=g.n() {
        followed.clear();
        if g.is_clique_node(v) {
            followed.extend(1..=(v - 1).min(k) as u32);
        } else {
            followed.extend_from_slice(&g.out_targets(v)[..k]);
        }
        if !cfg.count_multiplicity {
            followed.sort_unstable();
            followed.dedup();
        }
        arcs.extend(followed.iter().map(|&u| (u, v as u32)));
    }
    let followers = Csr::from_arcs(g.n(), &arcs);
    Ok(spread(&followers, cfg, false))
}

fn spread(influence: &Csr, cfg: &ContagionConfig, distinct: bool) -> ContagionResult {
    let n = influence.n();
    let k = cfg.k as u32;
    let max_rounds = cfg.max_rounds.unwrap_or(n);
    let mut rounds: Vec<Option<u32>> = vec![None; n + 1];
    let mut exposures = vec![0u32; n + 1];

    let mut frontier: Vec<usize> = Vec::with_capacity(cfg.seeds.len());
    for &s in &cfg.seeds {
        if rounds[s].is_none() {
            rounds[s] = Some(0);
            frontier.push(s);
        }
    }
    let mut infected = frontier.len();
    let mut round = 0usize;
    let mut next = Vec::new();

    while round < max_rounds && !frontier.is_empty() {
        next.clear();
        for &x in &frontier {
            let row = influence.row(x);
            for (i, &y) in row.iter().enumerate() {
                if distinct && i > 0 && row[i - 1] == y {
                    continue;
                }
                let y = y as usize;
                if rounds[y].is_none() {
                    exposures[y] += 1;
                    if exposures[y] == k {
                        next.push(y);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        round += 1;
        for &y in &next {
            rounds[y] = Some(round as u32);
        }
        infected += next.len();
        std::mem::swap(&mut frontier, &mut next);
    }

    ContagionResult {
        rounds,
        rounds_to_fixation: round,
        infected_count: infected,
        fully_infected: infected == n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GenConfig, Model};
    use proptest::prelude::*;
    use std::collections::VecDeque;

    #[test]
    fn clique_with_k_seeds_falls_in_one_round() {
        for (size, k) in [(3, 2), (5, 2), (5, 4), (8, 3)] {
            let g = Multigraph::complete(size);
            let r = run(&g, &ContagionConfig::new(k, (size - k + 1..=size).collect())).unwrap();
            assert!(r.fully_infected);
            assert_eq!(r.rounds_to_fixation, 1);
        }
    }

    #[test]
    fn simple_contagion_on_path() {
        let r = run(&Multigraph::path(7), &ContagionConfig::new(1, vec![1])).unwrap();
        assert!(r.fully_infected);
        assert_eq!(r.rounds_to_fixation, 6);
        assert_eq!(r.round(4), Some(3));
    }

    #[test]
    fn threshold_unreachable_on_path() {
        let r = run(&Multigraph::path(3), &ContagionConfig::new(2, vec![1, 2])).unwrap();
        assert_eq!(r.infected_count, 2);
        assert!(!r.fully_infected);
        assert_eq!(r.rounds_to_fixation, 0);
    }

    #[test]
    fn errors() {
        let g = Multigraph::path(3);
        assert!(matches!(run(&g, &ContagionConfig::new(1, vec![])), Err(Error::EmptySeeds)));
        assert!(matches!(
            run(&g, &ContagionConfig::new(1, vec![4])),
            Err(Error::NodeOutOfRange { node: 4, n: 3 })
        ));
        assert!(run(&g, &ContagionConfig::new(0, vec![1])).is_err());
    }

    #[test]
    fn multiplicity_counts_parallel_edges() {
        // 3 is joined to 1 twice.
        let g = Multigraph::from_edges(3, [(1, 2), (1, 3), (1, 3)]).unwrap();
        let distinct = run(&g, &ContagionConfig::new(2, vec![1])).unwrap();
        assert!(!distinct.is_infected(3));
        let multi = run(&g, &ContagionConfig::new(2, vec![1]).with_multiplicity(true)).unwrap();
        assert_eq!(multi.round(3), Some(1));
    }

    #[test]
    fn max_rounds_caps_the_run() {
        let r = run(&Multigraph::path(10), &ContagionConfig::new(1, vec![1]).with_max_rounds(3)).unwrap();
        assert_eq!(r.rounds_to_fixation, 3);
        assert_eq!(r.infected_count, 4);
    }

    #[test]
    fn pruned_ignores_slots_beyond_k_and_parallel_slots() {
        // m = 2, n = 4: clique {1,2,3}; node 4 aims both slots at node 1.
        let cfg = GenConfig::new(Model::PaIndependent, 4, 2, 1.0, 0);
        let g = EvolvingGraph::from_parts(cfg, vec![1, 1]).unwrap();
        let c = ContagionConfig::new(2, vec![1, 2]);
        let pruned = run_directed_pruned(&g, &c).unwrap();
        assert_eq!(pruned.round(3), Some(1));
        assert!(!pruned.is_infected(4));
        let counted = run_directed_pruned(&g, &c.clone().with_multiplicity(true)).unwrap();
        assert_eq!(counted.round(4), Some(1));
        assert!(!run_on_graph(&g, &c).unwrap().is_infected(4));
    }

    #[test]
    fn pruned_needs_k_at_most_m() {
        let g = generate(&GenConfig::new(Model::PaIndependent, 20, 2, 1.0, 1)).unwrap();
        assert!(matches!(
            run_directed_pruned(&g, &ContagionConfig::oldest(3)),
            Err(Error::PrunedThreshold { k: 3, m: 2 })
        ));
    }

    #[test]
    fn pruned_is_dominated_on_pa_graph() {
        let g = generate(&GenConfig::new(Model::PaIndependent, 1 << 12, 2, 1.0, 8)).unwrap();
        let c = ContagionConfig::oldest(2);
        let full = run_on_graph(&g, &c).unwrap();
        let pruned = run_directed_pruned(&g, &c).unwrap();
        assert!(pruned.infected_subset_of(&full));
        for (v, r) in pruned.infection_rounds() {
            assert!(r >= full.round(v).unwrap());
        }
        let multi = c.clone().with_multiplicity(true);
        let full_all = run_on_graph(&g, &multi).unwrap();
        let pruned_all = run_directed_pruned(&g, &multi).unwrap();
        assert!(pruned_all.fully_infected && full_all.fully_infected);
        assert!(pruned_all.rounds_to_fixation >= full_all.rounds_to_fixation);
    }

    fn bfs_layers(g: &Multigraph, seeds: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; g.n() + 1];
        let mut queue = VecDeque::new();
        for &s in seeds {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(x) = queue.pop_front() {
            for &y in g.neighbors(x) {
                let y = y as usize;
                if dist[y].is_none() {
                    dist[y] = Some(dist[x].unwrap() + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    fn random_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (2usize..40).prop_flat_map(|n| {
            (Just(n), proptest::collection::vec((1..=n, 1..=n), 0..3 * n))
        })
    }

    proptest! {
        #[test]
        fn k_one_is_bfs((n, edges) in random_graph(), seeds in proptest::collection::vec(any::<prop::sample::Index>(), 1..4)) {
            let g = Multigraph::from_edges(n, edges).unwrap();
            let seeds: Vec<usize> = seeds.iter().map(|i| i.index(n) + 1).collect();
            let r = run(&g, &ContagionConfig::new(1, seeds.clone())).unwrap();
            let layers = bfs_layers(&g, &seeds);
            for (v, &layer) in layers.iter().enumerate().skip(1) {
                prop_assert_eq!(r.round(v), layer);
            }
        }

        #[test]
        fn larger_seed_sets_never_hurt(
            (n, edges) in random_graph(),
            k in 1usize..4,
            seeds in proptest::collection::vec(any::<prop::sample::Index>(), 1..6),
            extra in proptest::collection::vec(any::<prop::sample::Index>(), 1..6),
            multi in any::<bool>(),
        ) {
            let g = Multigraph::from_edges(n, edges).unwrap();
            let small: Vec<usize> = seeds.iter().map(|i| i.index(n) + 1).collect();
            let mut big = small.clone();
            big.extend(extra.iter().map(|i| i.index(n) + 1));
            let a = run(&g, &ContagionConfig::new(k, small).with_multiplicity(multi)).unwrap();
            let b = run(&g, &ContagionConfig::new(k, big).with_multiplicity(multi)).unwrap();
            prop_assert!(b.infected_count >= a.infected_count);
            for (v, r) in a.infection_rounds() {
                prop_assert!(b.round(v).unwrap() <= r);
            }
        }

        #[test]
        fn rounds_respect_the_threshold_rule(
            (n, edges) in random_graph(),
            k in 1usize..4,
            seeds in proptest::collection::vec(any::<prop::sample::Index>(), 1..8),
        ) {
            let g = Multigraph::from_edges(n, edges).unwrap();
            let seeds: Vec<usize> = seeds.iter().map(|i| i.index(n) + 1).collect();
            let r = run(&g, &ContagionConfig::new(k, seeds.clone())).unwrap();
            let max = r.infection_rounds().map(|(_, t)| t).max().unwrap();
            prop_assert_eq!(r.rounds_to_fixation, max);
            for v in 1..=n {
                let by = |limit: usize| g.distinct_neighbors(v).filter(|&y| r.round(y).is_some_and(|t| t <= limit)).count();
                match r.round(v) {
                    Some(0) => prop_assert!(seeds.contains(&v)),
                    Some(t) => {
                        prop_assert!(by(t - 1) >= k);
                        if t >= 2 { prop_assert!(by(t - 2) < k); }
                    }
                    None => prop_assert!(by(n) < k),
                }
            }
        }

        #[test]
        fn deterministic((n, edges) in random_graph(), k in 1usize..3) {
            let g = Multigraph::from_edges(n, edges).unwrap();
            let c = ContagionConfig::new(k, vec![1, n]);
            prop_assert_eq!(run(&g, &c).unwrap(), run(&g, &c).unwrap());
        }
    }
}

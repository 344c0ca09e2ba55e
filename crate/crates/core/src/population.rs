//! Breadth-first crawling and collision-counting population estimation.
//!
//! The estimator draws `r` independent samples in which every node is picked
//! with probability proportional to its degree. Nodes that turn up in more than
//! one sample are collisions; their rate, together with the degree sums of the
//! samples, gives the size of the graph.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::dataset::{SocialGraph, UserId};
use crate::error::{Error, Result};
use crate::rng;

/// FIFO breadth-first crawl from `start`, visiting at most `budget` users.
///
/// Each user's neighbors are shuffled once with a stream derived from
/// `rng_seed` before being queued, so the crawl is reproducible.
pub fn bfs_sample(graph: &SocialGraph, start: &UserId, budget: usize, rng_seed: u64) -> Result<Vec<UserId>> {
    if !graph.contains_user(start) {
        return Err(Error::UnknownUser(start.to_string()));
    }
    if budget == 0 {
        return Err(Error::Domain("BFS budget must be at least 1".into()));
    }
    let mut rng = rng::stream(rng_seed, "bfs", 0);
    let mut seen: HashSet<&UserId> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let mut order = Vec::with_capacity(budget);
    while let Some(u) = queue.pop_front() {
        order.push(u.clone());
        if order.len() == budget {
            break;
        }
        let mut next: Vec<&UserId> = graph.neighbors(u).filter(|v| !seen.contains(v)).collect();
        next.shuffle(&mut rng);
        for v in next {
            seen.insert(v);
            queue.push_back(v);
        }
    }
    Ok(order)
}

/// One degree-weighted sample: the distinct users drawn, with their degrees.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub draws: usize,
    pub nodes: BTreeMap<UserId, usize>,
}

impl Sample {
    /// Build a sample from an explicit node set (degrees looked up in `graph`).
    pub fn from_nodes<'a>(graph: &SocialGraph, nodes: impl IntoIterator<Item = &'a UserId>) -> Result<Sample> {
        let mut map = BTreeMap::new();
        let mut draws = 0;
        for u in nodes {
            if !graph.contains_user(u) {
                return Err(Error::UnknownUser(u.to_string()));
            }
            draws += 1;
            map.insert(u.clone(), graph.degree(u));
        }
        Ok(Sample { draws, nodes: map })
    }

    /// D′: sum of the degrees of the sampled users.
    pub fn degree_sum(&self) -> f64 {
        self.nodes.values().map(|&d| d as f64).sum()
    }

    /// Sum of the inverse degrees of the sampled users.
    pub fn inverse_degree_sum(&self) -> f64 {
        self.nodes.values().filter(|&&d| d > 0).map(|&d| 1.0 / d as f64).sum()
    }
}

/// Degree-proportional node sampler over a fixed graph.
pub struct DegreeSampler<'g> {
    graph: &'g SocialGraph,
    users: Vec<&'g UserId>,
    weights: WeightedIndex<usize>,
}

impl<'g> DegreeSampler<'g> {
    pub fn new(graph: &'g SocialGraph) -> Result<Self> {
        let users: Vec<&UserId> = graph.users().collect();
        let degrees: Vec<usize> = users.iter().map(|u| graph.degree(u)).collect();
        let weights = WeightedIndex::new(&degrees)
            .map_err(|_| Error::Domain("degree-weighted sampling needs a graph with at least one edge".into()))?;
        Ok(DegreeSampler { graph, users, weights })
    }

    /// Draw `sample_size` users with replacement, keeping the distinct ones.
    pub fn sample<R: Rng>(&self, sample_size: usize, rng: &mut R) -> Result<Sample> {
        if sample_size == 0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        let mut nodes = BTreeMap::new();
        for _ in 0..sample_size {
            let u = self.users[self.weights.sample(rng)];
            nodes.insert(u.clone(), self.graph.degree(u));
        }
        Ok(Sample { draws: sample_size, nodes })
    }
}

pub fn degree_weighted_sample(graph: &SocialGraph, sample_size: usize, rng_seed: u64) -> Result<Sample> {
    DegreeSampler::new(graph)?.sample(sample_size, &mut rng::stream(rng_seed, "population", 0))
}

/// `r` independent samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRun {
    pub samples: Vec<Sample>,
}

impl SampleRun {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Domain(format!("need at least 2 samples, got {}", samples.len())));
        }
        Ok(SampleRun { samples })
    }

    /// Draw `r` samples; sample `i` uses its own stream derived from `(rng_seed, i)`.
    pub fn draw(graph: &SocialGraph, r: usize, sample_size: usize, rng_seed: u64) -> Result<Self> {
        let sampler = DegreeSampler::new(graph)?;
        let samples = (0..r)
            .map(|i| sampler.sample(sample_size, &mut rng::stream(rng_seed, "population", i as u64)))
            .collect::<Result<Vec<_>>>()?;
        SampleRun::new(samples)
    }

    pub fn r(&self) -> usize {
        self.samples.len()
    }

    pub fn pair_count(&self) -> usize {
        self.r() * (self.r() - 1) / 2
    }

    /// I: users shared between two samples, summed over all sample pairs.
    pub fn collisions(&self) -> usize {
        let mut occurrences: BTreeMap<&UserId, usize> = BTreeMap::new();
        for s in &self.samples {
            for u in s.nodes.keys() {
                *occurrences.entry(u).or_default() += 1;
            }
        }
        occurrences.values().map(|&c| c * (c - 1) / 2).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationEstimate {
    pub r: usize,
    pub collisions: usize,
    pub mean_collisions: f64,
    pub mean_degree_sum: f64,
    pub mean_inverse_degree_sum: f64,
    pub estimate: f64,
}

/// Collision-counting estimate of the number of nodes.
///
/// `n̂ = E[D′] · E[D′⁻¹] / E[I]`, where the expectations are means over the
/// samples (degree sums) and over the sample pairs (shared users). Each pair of
/// samples of `m` draws offers `m²` ordered draw pairs, so no factor ½ applies.
pub fn estimate_population(run: &SampleRun) -> Result<PopulationEstimate> {
    let collisions = run.collisions();
    if collisions == 0 {
        return Err(Error::InsufficientCollisions);
    }
    let r = run.r() as f64;
    let mean_degree_sum = run.samples.iter().map(Sample::degree_sum).sum::<f64>() / r;
    let mean_inverse_degree_sum = run.samples.iter().map(Sample::inverse_degree_sum).sum::<f64>() / r;
    let mean_collisions = collisions as f64 / run.pair_count() as f64;
    Ok(PopulationEstimate {
        r: run.r(),
        collisions,
        mean_collisions,
        mean_degree_sum,
        mean_inverse_degree_sum,
        estimate: mean_degree_sum * mean_inverse_degree_sum / mean_collisions,
    })
}

/// Checks used by tests: no duplicates and every non-start user adjacent to an earlier one.
pub fn is_valid_bfs_order(graph: &SocialGraph, order: &[UserId]) -> bool {
    let mut earlier: BTreeSet<&UserId> = BTreeSet::new();
    for (i, u) in order.iter().enumerate() {
        if earlier.contains(u) {
            return false;
        }
        if i > 0 && !graph.neighbors(u).any(|v| earlier.contains(v)) {
            return false;
        }
        earlier.insert(u);
    }
    true
}

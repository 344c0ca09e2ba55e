//! Pairwise social and mobility metrics: checkin similarity, average
//! positions and distances, friendship-vs-distance curves and a kNN friendship
//! classifier over (distance, similarity) features.

use std::collections::{HashSet, VecDeque};

use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use crate::dataset::{Checkin, SocialGraph, UserId};
use crate::error::{Error, Result};
use crate::geo::{haversine_distance, GeoPoint};
use crate::rng;

/// Tolerances under which two checkins of different users count as the same event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchWindow {
    time_epsilon_s: f64,
    space_epsilon_km: f64,
}

impl Default for MatchWindow {
    fn default() -> Self {
        MatchWindow {
            time_epsilon_s: 3600.0,
            space_epsilon_km: 0.1,
        }
    }
}

impl MatchWindow {
    pub fn new(time_epsilon_s: f64, space_epsilon_km: f64) -> Result<Self> {
        if !(time_epsilon_s > 0.0 && space_epsilon_km > 0.0) {
            return Err(Error::Domain(format!(
                "match window must be strictly positive, got {time_epsilon_s} s / {space_epsilon_km} km"
            )));
        }
        Ok(MatchWindow {
            time_epsilon_s,
            space_epsilon_km,
        })
    }

    pub fn time_epsilon_s(&self) -> f64 {
        self.time_epsilon_s
    }

    pub fn space_epsilon_km(&self) -> f64 {
        self.space_epsilon_km
    }

    pub fn matches(&self, a: &Checkin, b: &Checkin) -> bool {
        ((a.timestamp - b.timestamp).abs() as f64) <= self.time_epsilon_s
            && haversine_distance(a.point, b.point) <= self.space_epsilon_km
    }
}

/// Size of a maximum one-to-one matching between `a` and `b` under `window`.
///
/// Both lists must be sorted by timestamp. Candidate partners are found by
/// binary search on time; the matching itself uses BFS augmenting paths.
pub fn matched_checkins(a: &[Checkin], b: &[Checkin], window: &MatchWindow) -> usize {
    let eps = window.time_epsilon_s.floor() as i64;
    let candidates: Vec<Vec<usize>> = a
        .iter()
        .map(|ca| {
            let lo = b.partition_point(|cb| cb.timestamp < ca.timestamp.saturating_sub(eps));
            let hi = b.partition_point(|cb| cb.timestamp <= ca.timestamp.saturating_add(eps));
            (lo..hi).filter(|&j| window.matches(ca, &b[j])).collect()
        })
        .collect();

    let mut match_of_b: Vec<Option<usize>> = vec![None; b.len()];
    let mut match_of_a: Vec<Option<usize>> = vec![None; a.len()];
    let mut size = 0;
    for start in 0..a.len() {
        if candidates[start].is_empty() {
            continue;
        }
        // BFS over alternating paths from `start`; parent links let us flip the path.
        let mut parent_b: Vec<Option<usize>> = vec![None; b.len()];
        let mut visited_b = vec![false; b.len()];
        let mut queue = VecDeque::from([start]);
        let mut free_b = None;
        'search: while let Some(u) = queue.pop_front() {
            for &v in &candidates[u] {
                if visited_b[v] {
                    continue;
                }
                visited_b[v] = true;
                parent_b[v] = Some(u);
                match match_of_b[v] {
                    None => {
                        free_b = Some(v);
                        break 'search;
                    }
                    Some(next) => queue.push_back(next),
                }
            }
        }
        let Some(mut v) = free_b else { continue };
        loop {
            let u = parent_b[v].expect("on path");
            let prev = match_of_a[u];
            match_of_a[u] = Some(v);
            match_of_b[v] = Some(u);
            match prev {
                Some(pv) if u != start => v = pv,
                _ => break,
            }
        }
        size += 1;
    }
    size
}

/// |C_a ∩ C_b| / |C_a ∪ C_b| over raw checkin lists; `None` when both are empty.
pub fn similarity_of(a: &[Checkin], b: &[Checkin], window: &MatchWindow) -> Option<f64> {
    if a.is_empty() && b.is_empty() {
        return None;
    }
    let inter = matched_checkins(a, b, window);
    let union = a.len() + b.len() - inter;
    Some(inter as f64 / union as f64)
}

pub fn checkin_similarity(graph: &SocialGraph, a: &UserId, b: &UserId, window: &MatchWindow) -> Result<Option<f64>> {
    known(graph, a)?;
    known(graph, b)?;
    Ok(similarity_of(graph.checkins(a), graph.checkins(b), window))
}

fn known(graph: &SocialGraph, u: &UserId) -> Result<()> {
    if graph.contains_user(u) {
        Ok(())
    } else {
        Err(Error::UnknownUser(u.to_string()))
    }
}

/// Arithmetic mean of latitudes and longitudes. Longitudes are averaged
/// naively, so users straddling the antimeridian land near lng 0.
pub fn mean_position(checkins: &[Checkin]) -> Result<GeoPoint> {
    if checkins.is_empty() {
        return Err(Error::Domain("average position of a user without checkins".into()));
    }
    let k = checkins.len() as f64;
    let lat = checkins.iter().map(|c| c.point.lat()).sum::<f64>() / k;
    let lng = checkins.iter().map(|c| c.point.lng()).sum::<f64>() / k;
    GeoPoint::new(lat, lng)
}

pub fn average_position(graph: &SocialGraph, u: &UserId) -> Result<GeoPoint> {
    known(graph, u)?;
    mean_position(graph.checkins(u)).map_err(|_| Error::Domain(format!("user {u} has no checkins")))
}

/// Haversine distance between the two users' average positions, in km.
pub fn average_pair_distance(graph: &SocialGraph, a: &UserId, b: &UserId) -> Result<f64> {
    Ok(haversine_distance(average_position(graph, a)?, average_position(graph, b)?))
}

/// Largest distance from a user's average position to any of their checkins.
pub fn checkin_span_km(checkins: &[Checkin]) -> Result<f64> {
    let center = mean_position(checkins)?;
    Ok(checkins
        .iter()
        .map(|c| haversine_distance(center, c.point))
        .fold(0.0, f64::max))
}

/// Which users take part in pair analytics. Users need at least one checkin;
/// with `max_span_km` set, users whose checkins spread further than that from
/// their average position are dropped too.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EligibilityFilter {
    pub max_span_km: Option<f64>,
}

impl EligibilityFilter {
    pub fn admits(&self, graph: &SocialGraph, u: &UserId) -> bool {
        let list = graph.checkins(u);
        if list.is_empty() {
            return false;
        }
        match self.max_span_km {
            None => true,
            Some(max) => checkin_span_km(list).is_ok_and(|s| s <= max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairFeatures {
    pub user_a: UserId,
    pub user_b: UserId,
    pub checkin_similarity: f64,
    pub avg_distance_km: f64,
    pub is_friend: bool,
}

pub fn pair_features(graph: &SocialGraph, a: &UserId, b: &UserId, window: &MatchWindow) -> Result<PairFeatures> {
    if a == b {
        return Err(Error::Domain(format!("pair features need two distinct users, got {a} twice")));
    }
    let avg_distance_km = average_pair_distance(graph, a, b)?;
    let checkin_similarity = checkin_similarity(graph, a, b, window)?.unwrap_or(0.0);
    Ok(PairFeatures {
        user_a: a.clone(),
        user_b: b.clone(),
        checkin_similarity,
        avg_distance_km,
        is_friend: graph.are_friends(a, b),
    })
}

/// Randomly chosen friend and non-friend pairs among eligible users.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSample {
    pub friends: Vec<(UserId, UserId)>,
    pub strangers: Vec<(UserId, UserId)>,
}

/// Draw `pair_count` distinct friend pairs (uniform over eligible edges) and
/// `pair_count` distinct non-friend pairs (uniform over eligible user pairs,
/// rejecting edges).
pub fn sample_pairs(graph: &SocialGraph, pair_count: usize, filter: &EligibilityFilter, rng_seed: u64) -> Result<PairSample> {
    let eligible: Vec<&UserId> = graph.users().filter(|u| filter.admits(graph, u)).collect();
    let admitted: HashSet<&UserId> = eligible.iter().copied().collect();
    let edges: Vec<(&UserId, &UserId)> = graph
        .edges()
        .filter(|(a, b)| admitted.contains(a) && admitted.contains(b))
        .collect();
    if edges.len() < pair_count {
        return Err(Error::InsufficientPairs {
            class: "friend",
            needed: pair_count,
            available: edges.len(),
        });
    }
    let n = eligible.len();
    let all_pairs = n * n.saturating_sub(1) / 2;
    let non_edges = all_pairs - edges.len();
    if non_edges < pair_count {
        return Err(Error::InsufficientPairs {
            class: "non-friend",
            needed: pair_count,
            available: non_edges,
        });
    }

    let mut rng = rng::stream(rng_seed, "friend-pairs", 0);
    let friends = index::sample(&mut rng, edges.len(), pair_count)
        .into_iter()
        .map(|i| (edges[i].0.clone(), edges[i].1.clone()))
        .collect();

    let mut rng = rng::stream(rng_seed, "stranger-pairs", 0);
    let strangers = if pair_count * 2 > non_edges {
        let pool: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !graph.are_friends(eligible[i], eligible[j]))
            .collect();
        index::sample(&mut rng, pool.len(), pair_count)
            .into_iter()
            .map(|k| (eligible[pool[k].0].clone(), eligible[pool[k].1].clone()))
            .collect()
    } else {
        let mut chosen = HashSet::new();
        let mut out = Vec::with_capacity(pair_count);
        while out.len() < pair_count {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            let (i, j) = (i.min(j), i.max(j));
            if i == j || graph.are_friends(eligible[i], eligible[j]) || !chosen.insert((i, j)) {
                continue;
            }
            out.push((eligible[i].clone(), eligible[j].clone()));
        }
        out
    };
    Ok(PairSample { friends, strangers })
}

/// Per-class histograms of pair distances, each normalized to sum to 1 over
/// the pairs that fall inside the bins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceCurve {
    pub bin_edges: Vec<f64>,
    pub friend_fraction: Vec<f64>,
    pub nonfriend_fraction: Vec<f64>,
    pub friend_outside: usize,
    pub nonfriend_outside: usize,
}

fn validate_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 || edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("bin edges must be ≥ 2 finite, strictly increasing values".into()));
    }
    Ok(())
}

/// Bin index for `value`; bins are half-open except the last, which includes its upper edge.
fn bin_of(edges: &[f64], value: f64) -> Option<usize> {
    let last = *edges.last()?;
    if value < edges[0] || value > last || value.is_nan() {
        return None;
    }
    let i = edges.partition_point(|&e| e <= value);
    Some((i - 1).min(edges.len() - 2))
}

fn histogram(edges: &[f64], values: &[f64], class: &'static str) -> Result<(Vec<f64>, usize)> {
    let mut counts = vec![0usize; edges.len() - 1];
    let mut outside = 0;
    for &v in values {
        match bin_of(edges, v) {
            Some(i) => counts[i] += 1,
            None => outside += 1,
        }
    }
    let inside: usize = counts.iter().sum();
    if inside == 0 {
        return Err(Error::InsufficientPairs {
            class,
            needed: 1,
            available: 0,
        });
    }
    Ok((counts.into_iter().map(|c| c as f64 / inside as f64).collect(), outside))
}

impl DistanceCurve {
    pub fn from_distances(bin_edges: &[f64], friend_km: &[f64], nonfriend_km: &[f64]) -> Result<Self> {
        validate_edges(bin_edges)?;
        let (friend_fraction, friend_outside) = histogram(bin_edges, friend_km, "friend")?;
        let (nonfriend_fraction, nonfriend_outside) = histogram(bin_edges, nonfriend_km, "non-friend")?;
        Ok(DistanceCurve {
            bin_edges: bin_edges.to_vec(),
            friend_fraction,
            nonfriend_fraction,
            friend_outside,
            nonfriend_outside,
        })
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Least-squares slope of `ln(friend fraction)` against bin center (per km),
    /// over bins with non-zero friend mass.
    pub fn friend_decay_rate(&self) -> Option<f64> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .bin_centers()
            .into_iter()
            .zip(&self.friend_fraction)
            .filter(|(_, &f)| f > 0.0)
            .map(|(x, &f)| (x, f.ln()))
            .unzip();
        least_squares_slope(&xs, &ys)
    }
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Friend and non-friend pair distances plus the binned curve.
#[derive(Debug, Clone, PartialEq)]
pub struct FriendshipDistance {
    pub pairs: PairSample,
    pub friend_km: Vec<f64>,
    pub nonfriend_km: Vec<f64>,
    pub curve: DistanceCurve,
}

pub fn friendship_distance_curve(
    graph: &SocialGraph,
    pair_count: usize,
    bin_edges: &[f64],
    filter: &EligibilityFilter,
    rng_seed: u64,
) -> Result<FriendshipDistance> {
    validate_edges(bin_edges)?;
    let pairs = sample_pairs(graph, pair_count, filter, rng_seed)?;
    let dist = |ps: &[(UserId, UserId)]| {
        ps.iter()
            .map(|(a, b)| average_pair_distance(graph, a, b))
            .collect::<Result<Vec<f64>>>()
    };
    let friend_km = dist(&pairs.friends)?;
    let nonfriend_km = dist(&pairs.strangers)?;
    let curve = DistanceCurve::from_distances(bin_edges, &friend_km, &nonfriend_km)?;
    Ok(FriendshipDistance {
        pairs,
        friend_km,
        nonfriend_km,
        curve,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KnnPrediction {
    pub is_friend: bool,
    /// Share of the k neighbors labelled friend.
    pub friend_vote_ratio: f64,
}

/// k-nearest-neighbor friendship classifier over z-scored
/// (average distance, checkin similarity) features.
#[derive(Debug, Clone)]
pub struct KnnClassifier {
    k: usize,
    mean: [f64; 2],
    sd: [Option<f64>; 2],
    points: Vec<[f64; 2]>,
    labels: Vec<bool>,
}

impl KnnClassifier {
    pub fn fit(training: &[PairFeatures], k: usize) -> Result<Self> {
        if training.is_empty() {
            return Err(Error::Domain("kNN training set is empty".into()));
        }
        if k == 0 || k > training.len() {
            return Err(Error::Domain(format!("k = {k} must lie in [1, {}]", training.len())));
        }
        let raw: Vec<[f64; 2]> = training.iter().map(|p| [p.avg_distance_km, p.checkin_similarity]).collect();
        let n = raw.len() as f64;
        let mut mean = [0.0; 2];
        let mut sd = [None; 2];
        for (f, name) in ["average distance", "checkin similarity"].iter().enumerate() {
            mean[f] = raw.iter().map(|r| r[f]).sum::<f64>() / n;
            let var = raw.iter().map(|r| (r[f] - mean[f]).powi(2)).sum::<f64>() / n;
            if var > 0.0 {
                sd[f] = Some(var.sqrt());
            } else {
                log::warn!("kNN feature `{name}` has zero variance; its z-score is fixed at 0");
            }
        }
        let mut clf = KnnClassifier {
            k,
            mean,
            sd,
            points: Vec::new(),
            labels: training.iter().map(|p| p.is_friend).collect(),
        };
        clf.points = raw.iter().map(|r| clf.standardize(*r)).collect();
        Ok(clf)
    }

    fn standardize(&self, r: [f64; 2]) -> [f64; 2] {
        let z = |f: usize| self.sd[f].map_or(0.0, |s| (r[f] - self.mean[f]) / s);
        [z(0), z(1)]
    }

    /// Majority vote of the `k` nearest training pairs; a tied vote goes to non-friend.
    pub fn predict(&self, avg_distance_km: f64, checkin_similarity: f64) -> KnnPrediction {
        let q = self.standardize([avg_distance_km, checkin_similarity]);
        let mut order: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2), i))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let friends = order[..self.k].iter().filter(|(_, i)| self.labels[*i]).count();
        KnnPrediction {
            is_friend: 2 * friends > self.k,
            friend_vote_ratio: friends as f64 / self.k as f64,
        }
    }
}

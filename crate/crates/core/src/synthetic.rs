//! Seeded synthetic corpora for validation runs and demos.

use rand::Rng;

use crate::dataset::{Checkin, SocialGraph, UserId};
use crate::error::Result;
use crate::geo::{haversine_distance, GeoPoint, EARTH_RADIUS_KM};
use crate::rng;

/// Erdős–Rényi G(n, p) graph with users named `0..n`.
pub fn erdos_renyi(n: usize, p: f64, rng_seed: u64) -> SocialGraph {
    let mut rng = rng::stream(rng_seed, "erdos-renyi", 0);
    let ids: Vec<UserId> = (0..n).map(|i| UserId::new(i.to_string())).collect();
    let mut g = SocialGraph::new();
    for id in &ids {
        g.add_user(id.clone());
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(p) {
                g.add_edge(ids[i].clone(), ids[j].clone());
            }
        }
    }
    g
}

/// `n` users with one checkin each, spread uniformly around the equator, where
/// a pair at distance `d` km is friends with probability `exp(-d / decay_km)`.
///
/// On a full great circle the pair-distance density is flat, so the friend
/// pair distances follow the decay law exactly.
pub fn distance_decay_graph(n: usize, decay_km: f64, rng_seed: u64) -> SocialGraph {
    let mut rng = rng::stream(rng_seed, "distance-decay", 0);
    let users: Vec<(UserId, GeoPoint)> = (0..n)
        .map(|i| {
            let lng = rng.gen_range(-180.0..180.0);
            (UserId::new(format!("u{i}")), GeoPoint::new(0.0, lng).expect("on the equator"))
        })
        .collect();
    let mut g = SocialGraph::new();
    g.extend_checkins(users.iter().map(|(u, p)| Checkin {
        user: u.clone(),
        timestamp: 0,
        point: *p,
        location_id: None,
    }));
    for i in 0..n {
        for j in (i + 1)..n {
            let d = haversine_distance(users[i].1, users[j].1);
            if rng.gen_bool((-d / decay_km).exp()) {
                g.add_edge(users[i].0.clone(), users[j].0.clone());
            }
        }
    }
    g
}

/// Offset `origin` by `(east_m, north_m)` meters on a locally flat Earth.
pub fn offset_meters(origin: GeoPoint, east_m: f64, north_m: f64) -> Result<GeoPoint> {
    let m_per_deg = EARTH_RADIUS_KM * 1000.0 * std::f64::consts::PI / 180.0;
    let lat = origin.lat() + north_m / m_per_deg;
    let lng = origin.lng() + east_m / (m_per_deg * origin.lat().to_radians().cos());
    GeoPoint::new(lat, lng)
}

/// A group of friends whose checkins cluster around a few hotspots.
#[derive(Debug, Clone)]
pub struct HotspotScenario {
    pub centers: Vec<GeoPoint>,
    pub radius_m: f64,
    pub venues_per_hotspot: usize,
    pub users: usize,
    pub checkins_per_user: usize,
    /// Probability that the next checkin stays in the current hotspot.
    pub stay_probability: f64,
}

impl HotspotScenario {
    /// Three hotspots of radius 100 m about 1.5 km apart; consecutive checkins
    /// stay in the same hotspot 90% of the time.
    pub fn three_hotspots(users: usize) -> Self {
        let base = GeoPoint::new(30.2672, -97.7431).expect("valid");
        HotspotScenario {
            centers: vec![
                base,
                offset_meters(base, 1500.0, 0.0).expect("valid"),
                offset_meters(base, 750.0, 1300.0).expect("valid"),
            ],
            radius_m: 100.0,
            venues_per_hotspot: 4,
            users,
            checkins_per_user: 60,
            stay_probability: 0.9,
        }
    }

    /// Users `0..users`, with user `0` befriending everyone else.
    pub fn generate(&self, rng_seed: u64) -> Result<SocialGraph> {
        let mut rng = rng::stream(rng_seed, "hotspots", 0);
        let mut venues: Vec<Vec<(String, GeoPoint)>> = Vec::new();
        for (h, center) in self.centers.iter().enumerate() {
            let mut vs = Vec::new();
            for v in 0..self.venues_per_hotspot {
                let r = self.radius_m * rng.gen::<f64>().sqrt();
                let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                vs.push((format!("h{h}v{v}"), offset_meters(*center, r * theta.cos(), r * theta.sin())?));
            }
            venues.push(vs);
        }
        let mut g = SocialGraph::new();
        let mut checkins = Vec::new();
        for u in 0..self.users {
            let user = UserId::new(u.to_string());
            g.add_user(user.clone());
            if u > 0 {
                g.add_edge(UserId::new("0"), user.clone());
            }
            let mut hotspot = rng.gen_range(0..self.centers.len());
            let mut t: i64 = 1_300_000_000 + rng.gen_range(0..86_400);
            for _ in 0..self.checkins_per_user {
                let (id, point) = &venues[hotspot][rng.gen_range(0..self.venues_per_hotspot)];
                checkins.push(Checkin {
                    user: user.clone(),
                    timestamp: t,
                    point: *point,
                    location_id: Some(id.clone()),
                });
                t += rng.gen_range(1_800..14_400);
                if self.centers.len() > 1 && !rng.gen_bool(self.stay_probability) {
                    let jump = rng.gen_range(1..self.centers.len());
                    hotspot = (hotspot + jump) % self.centers.len();
                }
            }
        }
        g.extend_checkins(checkins);
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_mean_degree() {
        let g = erdos_renyi(1000, 10.0 / 999.0, 1);
        let mean = 2.0 * g.edge_count() as f64 / 1000.0;
        assert!((mean - 10.0).abs() < 0.5, "{mean}");
    }

    #[test]
    fn hotspot_checkins_stay_near_centers() {
        let s = HotspotScenario::three_hotspots(15);
        let g = s.generate(3).unwrap();
        assert_eq!(g.user_count(), 15);
        assert_eq!(g.degree(&"0".into()), 14);
        for u in g.users() {
            for c in g.checkins(u) {
                let near = s.centers.iter().map(|h| haversine_distance(*h, c.point)).fold(f64::MAX, f64::min);
                assert!(near <= 0.1 + 1e-6, "{near}");
            }
        }
    }

    #[test]
    fn decay_graph_is_local() {
        let g = distance_decay_graph(300, 200.0, 4);
        assert!(g.edge_count() > 0);
        for (a, b) in g.edges() {
            let pa = g.checkins(a)[0].point;
            let pb = g.checkins(b)[0].point;
            assert!(haversine_distance(pa, pb) < 5000.0);
        }
    }
}

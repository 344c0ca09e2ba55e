use serde::{Deserialize, Serialize};

use super::matrix::SquareMatrix;
use crate::error::{Error, Result};
use crate::geo::{haversine_distance, GeoPoint};

pub const STOCHASTIC_TOLERANCE: f64 = 1e-9;

/// Pairwise great-circle distances in meters.
pub fn build_distance_matrix(points: &[GeoPoint]) -> SquareMatrix<f64> {
    let k = points.len();
    let mut d = SquareMatrix::filled(k, 0.0);
    for m in 0..k {
        for n in (m + 1)..k {
            let meters = 1000.0 * haversine_distance(points[m], points[n]);
            d.set(m, n, meters);
            d.set(n, m, meters);
        }
    }
    d
}

fn check_sequence(seq: &[usize], k: usize) -> Result<()> {
    if seq.is_empty() {
        return Err(Error::Domain("state sequence is empty".into()));
    }
    if let Some(&s) = seq.iter().find(|&&s| s >= k) {
        return Err(Error::Domain(format!("state index {s} out of range for {k} states")));
    }
    Ok(())
}

/// Raw affinity: the number of times state `n` directly follows state `m`,
/// divided by the number of occurrences of `m` in the whole sequence.
///
/// The row of the last state visited is sub-stochastic; see
/// [`patch_absorbing_states`].
pub fn build_affinity_matrix(seq: &[usize], k: usize) -> Result<SquareMatrix<f64>> {
    check_sequence(seq, k)?;
    let mut counts = SquareMatrix::filled(k, 0u64);
    let mut occurrences = vec![0u64; k];
    for &s in seq {
        occurrences[s] += 1;
    }
    for w in seq.windows(2) {
        let c = *counts.get(w[0], w[1]);
        counts.set(w[0], w[1], c + 1);
    }
    let mut a = SquareMatrix::filled(k, 0.0);
    for m in 0..k {
        if occurrences[m] == 0 {
            continue;
        }
        for n in 0..k {
            a.set(m, n, *counts.get(m, n) as f64 / occurrences[m] as f64);
        }
    }
    Ok(a)
}

/// Make every row sum to one by spreading its missing mass uniformly over all
/// states. A zero row becomes uniform.
pub fn patch_absorbing_states(raw: &SquareMatrix<f64>) -> Result<SquareMatrix<f64>> {
    let k = raw.n();
    let mut a = raw.clone();
    for m in 0..k {
        let row = raw.row(m);
        if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Contract(format!("affinity entry {v} in row {m} is not a probability")));
        }
        let s: f64 = row.iter().sum();
        if s > 1.0 + STOCHASTIC_TOLERANCE {
            return Err(Error::Contract(format!("affinity row {m} sums to {s} > 1")));
        }
        if s < 1.0 {
            let share = (1.0 - s) / k as f64;
            for n in 0..k {
                a.set(m, n, row[n] + share);
            }
        }
    }
    Ok(a)
}

pub fn is_row_stochastic(a: &SquareMatrix<f64>) -> bool {
    a.rows().all(|row| {
        row.iter().all(|v| (0.0..=1.0).contains(v)) && (row.iter().sum::<f64>() - 1.0).abs() <= STOCHASTIC_TOLERANCE
    })
}

/// Mean elapsed seconds over the observed consecutive transitions `m → n`.
/// Unobserved off-diagonal transitions are `None`; the diagonal is zero.
pub fn build_temporal_matrix(seq: &[usize], timestamps: &[i64], k: usize) -> Result<SquareMatrix<Option<f64>>> {
    check_sequence(seq, k)?;
    if timestamps.len() != seq.len() {
        return Err(Error::Domain(format!(
            "{} timestamps for a sequence of {} states",
            timestamps.len(),
            seq.len()
        )));
    }
    let mut sums = SquareMatrix::filled(k, (0.0, 0u64));
    for i in 1..seq.len() {
        let gap = timestamps[i] - timestamps[i - 1];
        if gap < 0 {
            return Err(Error::Data(format!("checkins out of order at position {i} (gap {gap} s)")));
        }
        let (m, n) = (seq[i - 1], seq[i]);
        let (total, count) = *sums.get(m, n);
        sums.set(m, n, (total + gap as f64, count + 1));
    }
    let mut t = SquareMatrix::filled(k, None);
    for m in 0..k {
        for n in 0..k {
            let (total, count) = *sums.get(m, n);
            if m == n {
                t.set(m, n, Some(0.0));
            } else if count > 0 {
                t.set(m, n, Some(total / count as f64));
            }
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageStats {
    /// Largest distance between two states, meters.
    pub rho_m: f64,
    /// Mean distance over unordered state pairs; absent for a single state.
    pub avg_travel_m: Option<f64>,
    /// Area of the circle of diameter `rho_m`, square meters.
    pub max_coverage_area_m2: f64,
}

pub fn coverage_stats(d: &SquareMatrix<f64>) -> CoverageStats {
    let k = d.n();
    let rho_m = d.rows().flatten().copied().fold(0.0, f64::max);
    let avg_travel_m = (k > 1).then(|| {
        let sum: f64 = (0..k).flat_map(|m| ((m + 1)..k).map(move |n| (m, n))).map(|(m, n)| *d.get(m, n)).sum();
        2.0 * sum / (k * (k - 1)) as f64
    });
    CoverageStats {
        rho_m,
        avg_travel_m,
        max_coverage_area_m2: std::f64::consts::PI * (rho_m / 2.0).powi(2),
    }
}

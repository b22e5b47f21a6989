//! Lloyd's k-means over descriptor coefficients with seeded k-means++
//! initialization.
//!
//! The assignment step runs in parallel; every reduction (centroid sums,
//! inertia) is a sequential pass in point order, so results do not depend
//! on the thread schedule.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::descriptors::DescriptorModel;
use crate::error::{Error, Result};
use crate::provenance::Provenance;
use crate::serial;

pub const DEFAULT_K: usize = 100;
pub const DEFAULT_MAX_ITER: usize = 300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(serialize_with = "serial::rows_full")]
    pub centroids: Vec<Vec<f64>>,
    #[serde(serialize_with = "serial::f64_full")]
    pub inertia: f64,
    pub seed: u64,
    pub descriptor_ref: String,
    pub assignments: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    /// Inertia after each assignment step, starting with the initial one.
    #[serde(serialize_with = "serial::vec_full")]
    pub inertia_history: Vec<f64>,
    #[serde(default)]
    pub provenance: Provenance,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest centroid; ties go to the smallest index.
fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = sq_dist(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn assign(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>) {
    points.par_iter().map(|p| nearest(p, centroids)).unzip()
}

fn validate(points: &[Vec<f64>], k: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::InvalidParams("K must be positive".into()));
    }
    if k > points.len() {
        return Err(Error::TooFewPoints {
            needed: k,
            have: points.len(),
        });
    }
    let dim = points[0].len();
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("coefficients must be finite".into()));
        }
    }
    Ok(dim)
}

/// k-means++ seeding: first center uniform, then proportional to the
/// squared distance to the nearest chosen center.
pub fn kmeans_plus_plus(points: &[Vec<f64>], k: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    validate(points, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = vec![rng.random_range(0..points.len())];
    let mut d2: Vec<f64> = points
        .iter()
        .map(|p| sq_dist(p, &points[chosen[0]]))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if d > 0.0 && acc > target {
                    pick = Some(i);
                    break;
                }
            }
            // Rounding can leave `target` past the final partial sum.
            pick.unwrap_or_else(|| d2.iter().rposition(|&d| d > 0.0).unwrap())
        } else {
            // Fewer distinct points than clusters.
            (0..points.len()).find(|i| !chosen.contains(i)).unwrap()
        };
        chosen.push(next);
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, &points[next]));
        }
    }
    Ok(chosen.into_iter().map(|i| points[i].clone()).collect())
}

/// Seeded k-means++ followed by Lloyd iterations.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, max_iter: usize) -> Result<ClusterModel> {
    let init = kmeans_plus_plus(points, k, seed)?;
    let mut model = kmeans_from(points, init, max_iter)?;
    model.seed = seed;
    Ok(model)
}

/// Lloyd iterations from explicit initial centroids. Stops once the
/// assignment is stable or after `max_iter` updates. A cluster that loses
/// all its points is moved onto the point farthest from its own centroid.
pub fn kmeans_from(
    points: &[Vec<f64>],
    init: Vec<Vec<f64>>,
    max_iter: usize,
) -> Result<ClusterModel> {
    let k = init.len();
    let dim = validate(points, k)?;
    if let Some(c) = init.iter().find(|c| c.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: c.len(),
        });
    }

    let mut centroids = init;
    let (mut assignments, d2) = assign(points, &centroids);
    let mut history = vec![d2.iter().sum::<f64>()];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iter {
        iterations += 1;
        centroids = update_centroids(points, &assignments, &centroids, dim);
        let (next, d2) = assign(points, &centroids);
        history.push(d2.iter().sum());
        if next == assignments {
            converged = true;
            break;
        }
        assignments = next;
    }

    let inertia = points
        .iter()
        .zip(&assignments)
        .map(|(p, &a)| sq_dist(p, &centroids[a]))
        .sum();
    Ok(ClusterModel {
        k,
        m: dim,
        centroids,
        inertia,
        seed: 0,
        descriptor_ref: String::new(),
        assignments,
        iterations,
        converged,
        inertia_history: history,
        provenance: Provenance::default(),
    })
}

fn update_centroids(
    points: &[Vec<f64>],
    assignments: &[usize],
    old: &[Vec<f64>],
    dim: usize,
) -> Vec<Vec<f64>> {
    let k = old.len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &a) in points.iter().zip(assignments) {
        counts[a] += 1;
        for (s, v) in sums[a].iter_mut().zip(p) {
            *s += v;
        }
    }
    let mut centroids: Vec<Vec<f64>> = sums
        .into_iter()
        .zip(&counts)
        .map(|(s, &c)| {
            if c == 0 {
                s
            } else {
                s.into_iter().map(|v| v / c as f64).collect()
            }
        })
        .collect();

    let empty: Vec<usize> = (0..k).filter(|&j| counts[j] == 0).collect();
    if !empty.is_empty() {
        let mut far: Vec<(usize, f64)> = points
            .iter()
            .zip(assignments)
            .enumerate()
            .map(|(i, (p, &a))| (i, sq_dist(p, &centroids[a])))
            .collect();
        far.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        for (slot, (i, _)) in empty.into_iter().zip(far) {
            centroids[slot] = points[i].clone();
        }
    }
    centroids
}

/// Index of the centroid closest to `coeffs`, smallest index on ties.
pub fn nearest_centroid(coeffs: &[f64], model: &ClusterModel) -> Result<usize> {
    if coeffs.len() != model.m {
        return Err(Error::DimensionMismatch {
            expected: model.m,
            found: coeffs.len(),
        });
    }
    Ok(nearest(coeffs, &model.centroids).0)
}

/// Decodes every centroid into an `N`-ray contour.
pub fn centroid_contours(
    model: &ClusterModel,
    descriptor: &DescriptorModel,
) -> Result<Vec<Vec<f64>>> {
    if descriptor.m() != model.m {
        return Err(Error::DimensionMismatch {
            expected: descriptor.m(),
            found: model.m,
        });
    }
    model
        .centroids
        .iter()
        .map(|c| descriptor.decode(c))
        .collect()
}

impl ClusterModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serial::to_json(self)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<ClusterModel> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Squared distances recomputed from scratch.
    pub fn recompute_inertia(&self, points: &[Vec<f64>]) -> f64 {
        points
            .iter()
            .zip(&self.assignments)
            .map(|(p, &a)| sq_dist(p, &self.centroids[a]))
            .sum()
    }
}

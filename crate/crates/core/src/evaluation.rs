//! Boundary precision/recall/F between point sets, F-vs-M curves and their
//! normalized area, and the nearest-centroid clustering protocol.
//!
//! Two boundary points match when they are within the tolerance; precision
//! and recall come from a maximum-cardinality bipartite matching, so each
//! point is used at most once.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{nearest_centroid, ClusterModel};
use crate::contour::StarContour;
use crate::descriptors::{DescriptorKind, DescriptorModel};
use crate::eigenbasis::{ContourMatrix, Spectrum};
use crate::error::{Error, Result};
use crate::geometry::{BBox, Point};
use crate::provenance::Provenance;
use crate::serial;

pub const DEFAULT_TOL_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FScore {
    #[serde(serialize_with = "serial::f64_full")]
    pub precision: f64,
    #[serde(serialize_with = "serial::f64_full")]
    pub recall: f64,
    #[serde(serialize_with = "serial::f64_full")]
    pub f: f64,
    #[serde(serialize_with = "serial::f64_full")]
    pub tolerance_px: f64,
    pub matched: usize,
}

impl FScore {
    pub fn from_counts(matched: usize, n_pred: usize, n_gt: usize, tolerance_px: f64) -> FScore {
        let precision = matched as f64 / n_pred as f64;
        let recall = matched as f64 / n_gt as f64;
        FScore {
            precision,
            recall,
            f: harmonic_mean(precision, recall),
            tolerance_px,
            matched,
        }
    }
}

pub fn harmonic_mean(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

/// How the matching distance is chosen for a ground-truth boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "value")]
pub enum ToleranceRule {
    /// Fraction of the ground-truth bounding-box diagonal.
    DiagonalFraction(f64),
    /// Fixed distance in pixels.
    Pixels(f64),
}

impl Default for ToleranceRule {
    fn default() -> Self {
        ToleranceRule::DiagonalFraction(DEFAULT_TOL_FRACTION)
    }
}

impl ToleranceRule {
    pub fn resolve(&self, gt: &[Point]) -> f64 {
        match *self {
            ToleranceRule::Pixels(px) => px,
            ToleranceRule::DiagonalFraction(frac) => {
                frac * BBox::of_points(gt).map_or(0.0, |b| b.diagonal())
            }
        }
    }

    /// Parses `diag:0.01`, `px:2` or a bare number (pixels).
    pub fn parse(s: &str) -> Result<ToleranceRule> {
        let bad = || {
            Error::Config(format!(
                "invalid tolerance rule '{s}' (use diag:<fraction> or px:<pixels>)"
            ))
        };
        let (kind, value) = s.split_once(':').unwrap_or(("px", s));
        let value: f64 = value.trim().parse().map_err(|_| bad())?;
        if !(value > 0.0 && value.is_finite()) {
            return Err(bad());
        }
        match kind.trim() {
            "diag" => Ok(ToleranceRule::DiagonalFraction(value)),
            "px" => Ok(ToleranceRule::Pixels(value)),
            _ => Err(bad()),
        }
    }
}

/// Neighbor lists `adj[i]` = ground-truth indices within `tol` of `pred[i]`,
/// found through a uniform grid with cell size `tol`.
fn neighbors(pred: &[Point], gt: &[Point], tol: f64) -> Vec<Vec<usize>> {
    let cell = |p: &Point| ((p.x / tol).floor() as i64, (p.y / tol).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (j, q) in gt.iter().enumerate() {
        grid.entry(cell(q)).or_default().push(j);
    }
    pred.iter()
        .map(|p| {
            let (cx, cy) = cell(p);
            let mut adj = Vec::new();
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(js) = grid.get(&(cx + dx, cy + dy)) {
                        adj.extend(js.iter().copied().filter(|&j| p.distance(&gt[j]) <= tol));
                    }
                }
            }
            adj.sort_unstable();
            adj
        })
        .collect()
}

/// Hopcroft–Karp maximum matching on a left-to-right adjacency list.
pub fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> usize {
    const NIL: usize = usize::MAX;
    let n_left = adj.len();
    let mut match_l = vec![NIL; n_left];
    let mut match_r = vec![NIL; n_right];
    let mut dist = vec![0usize; n_left];
    let mut matched = 0;

    loop {
        // BFS layers from free left vertices.
        let mut queue = std::collections::VecDeque::new();
        for u in 0..n_left {
            if match_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == NIL {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        // DFS along layers, iterative to stay safe on long paths.
        let mut next_edge = vec![0usize; n_left];
        for root in 0..n_left {
            if match_l[root] != NIL {
                continue;
            }
            let mut stack = vec![root];
            while let Some(&u) = stack.last() {
                if next_edge[u] == adj[u].len() {
                    dist[u] = usize::MAX;
                    stack.pop();
                    continue;
                }
                let v = adj[u][next_edge[u]];
                next_edge[u] += 1;
                let w = match_r[v];
                if w == NIL {
                    // Augment along the stack.
                    let mut v = v;
                    for &x in stack.iter().rev() {
                        let prev = match_l[x];
                        match_l[x] = v;
                        match_r[v] = x;
                        v = prev;
                    }
                    matched += 1;
                    break;
                } else if dist[w] == dist[u] + 1 {
                    stack.push(w);
                }
            }
        }
    }
    matched
}

/// Size of a maximum matching between points within `tol` of each other.
pub fn matching_cardinality(pred: &[Point], gt: &[Point], tol: f64) -> usize {
    hopcroft_karp(&neighbors(pred, gt, tol), gt.len())
}

/// Boundary P/R/F between two point sets at a fixed tolerance.
pub fn boundary_fscore_points(pred: &[Point], gt: &[Point], tol_px: f64) -> Result<FScore> {
    if pred.is_empty() || gt.is_empty() {
        return Err(Error::EmptyContour);
    }
    if !(tol_px > 0.0 && tol_px.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "tolerance must be positive, got {tol_px}"
        )));
    }
    let matched = matching_cardinality(pred, gt, tol_px);
    Ok(FScore::from_counts(matched, pred.len(), gt.len(), tol_px))
}

/// Boundary P/R/F between two star contours, each sampled at its vertices.
pub fn boundary_fscore(pred: &StarContour, gt: &StarContour, tol_px: f64) -> Result<FScore> {
    boundary_fscore_points(&pred.vertices(), &gt.vertices(), tol_px)
}

/// Trapezoidal area under an F-vs-M curve, normalized by the M range, x100.
pub fn auc_f(curve: &[(usize, f64)]) -> Result<f64> {
    if curve.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            have: curve.len(),
        });
    }
    if curve.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidParams(
            "curve M values must be strictly increasing".into(),
        ));
    }
    let area: f64 = curve
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) as f64 * (w[0].1 + w[1].1) / 2.0)
        .sum();
    let span = (curve[curve.len() - 1].0 - curve[0].0) as f64;
    Ok(100.0 * area / span)
}

/// Which boundary the reconstructions are scored against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundTruth {
    /// The N-ray star-convex conversion of the annotation.
    #[default]
    StarContour,
    /// The annotation polygon itself, resampled by arc length.
    RawPolygon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(serialize_with = "serial::f64_full")]
    pub mean_precision: f64,
    #[serde(serialize_with = "serial::f64_full")]
    pub mean_recall: f64,
    #[serde(serialize_with = "serial::f64_full")]
    pub mean_f: f64,
    pub per_instance: Vec<FScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveGap {
    #[serde(rename = "M")]
    pub m: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub descriptor: DescriptorKind,
    #[serde(rename = "N")]
    pub n: usize,
    pub tolerance: ToleranceRule,
    pub ground_truth: GroundTruth,
    pub curve: Vec<CurvePoint>,
    pub gaps: Vec<CurveGap>,
    #[serde(serialize_with = "serial::f64_full")]
    pub auc_f: f64,
}

impl EvalReport {
    pub fn curve_pairs(&self) -> Vec<(usize, f64)> {
        self.curve.iter().map(|p| (p.m, p.mean_f)).collect()
    }

    pub fn mean_f_at(&self, m: usize) -> Option<f64> {
        self.curve.iter().find(|p| p.m == m).map(|p| p.mean_f)
    }

    /// `M,mean_f` rows for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("M,mean_f\n");
        for p in &self.curve {
            let _ = writeln!(out, "{},{}", p.m, serial::fmt_f64(p.mean_f));
        }
        out
    }
}

/// Reference point sets for evaluation, one per contour.
pub fn star_references(contours: &[StarContour]) -> Vec<Vec<Point>> {
    contours.iter().map(StarContour::vertices).collect()
}

/// Builds a descriptor of the given kind and dimension. Eigencontours are
/// truncated from a precomputed spectrum of the training matrix.
fn descriptor_for(
    kind: DescriptorKind,
    n: usize,
    m: usize,
    spectrum: Option<&Spectrum>,
) -> Result<DescriptorModel> {
    match kind {
        DescriptorKind::Eigencontour => {
            let spectrum = spectrum.expect("spectrum computed for eigencontours");
            let mut basis = spectrum.basis(m)?;
            basis.angle0 = 0.0;
            Ok(DescriptorModel::Eigencontour(basis))
        }
        DescriptorKind::CentroidalSubsample => DescriptorModel::centroidal(n, m),
        DescriptorKind::Chebyshev => DescriptorModel::chebyshev(n, m),
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Scores `decode(encode(r))` against each reference.
pub fn evaluate_descriptor(
    descriptor: &DescriptorModel,
    contours: &[StarContour],
    references: &[Vec<Point>],
    rule: ToleranceRule,
) -> Result<Vec<FScore>> {
    if contours.len() != references.len() {
        return Err(Error::DimensionMismatch {
            expected: contours.len(),
            found: references.len(),
        });
    }
    contours
        .par_iter()
        .zip(references.par_iter())
        .map(|(c, gt)| {
            let rec = c.with_radii(descriptor.reconstruct(c.radii())?)?;
            boundary_fscore_points(&rec.vertices(), gt, rule.resolve(gt))
        })
        .collect()
}

/// F-vs-M curve for one descriptor family. Eigencontours are fitted on
/// `train`; every descriptor is scored on `eval` against `references`
/// (pass [`star_references`] of `eval` for the default ground truth).
/// Failures at a particular M are recorded as gaps.
pub fn f_curve(
    train: &[StarContour],
    eval: &[StarContour],
    references: &[Vec<Point>],
    kind: DescriptorKind,
    m_values: &[usize],
    rule: ToleranceRule,
    ground_truth: GroundTruth,
) -> Result<EvalReport> {
    let n = eval
        .first()
        .or(train.first())
        .map(StarContour::n)
        .ok_or(Error::EmptyContour)?;
    let spectrum = match kind {
        DescriptorKind::Eigencontour => {
            let cols: Vec<Vec<f64>> = train.iter().map(|c| c.radii().to_vec()).collect();
            Some(Spectrum::of(&ContourMatrix::from_columns(&cols)?))
        }
        _ => None,
    };

    let mut curve = Vec::new();
    let mut gaps = Vec::new();
    for &m in m_values {
        let scored = descriptor_for(kind, n, m, spectrum.as_ref())
            .and_then(|d| evaluate_descriptor(&d, eval, references, rule));
        match scored {
            Ok(per_instance) => curve.push(CurvePoint {
                m,
                mean_precision: mean(per_instance.iter().map(|s| s.precision)),
                mean_recall: mean(per_instance.iter().map(|s| s.recall)),
                mean_f: mean(per_instance.iter().map(|s| s.f)),
                per_instance,
            }),
            Err(e) => {
                log::warn!("{kind} at M = {m}: {e}");
                gaps.push(CurveGap {
                    m,
                    error: e.to_string(),
                })
            }
        }
    }
    let pairs: Vec<(usize, f64)> = curve.iter().map(|p| (p.m, p.mean_f)).collect();
    let auc = match pairs.len() {
        0 => 0.0,
        1 => 100.0 * pairs[0].1,
        _ => auc_f(&pairs)?,
    };
    Ok(EvalReport {
        descriptor: kind,
        n,
        tolerance: rule,
        ground_truth,
        curve,
        gaps,
        auc_f: auc,
    })
}

/// Nearest-centroid matching quality of a cluster model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEval {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(serialize_with = "serial::f64_full")]
    pub mean_precision: f64,
    #[serde(serialize_with = "serial::f64_full")]
    pub mean_recall: f64,
    #[serde(serialize_with = "serial::f64_full")]
    pub mean_f: f64,
    pub per_instance: Vec<FScore>,
}

/// For each contour: encode, pick the nearest centroid, decode that
/// centroid around the contour's own center, and score it against the
/// reference.
pub fn clustering_fscore(
    contours: &[StarContour],
    references: &[Vec<Point>],
    model: &ClusterModel,
    descriptor: &DescriptorModel,
    rule: ToleranceRule,
) -> Result<ClusterEval> {
    if descriptor.m() != model.m {
        return Err(Error::DimensionMismatch {
            expected: descriptor.m(),
            found: model.m,
        });
    }
    if contours.len() != references.len() {
        return Err(Error::DimensionMismatch {
            expected: contours.len(),
            found: references.len(),
        });
    }
    let decoded: Vec<Vec<f64>> = model
        .centroids
        .iter()
        .map(|c| descriptor.decode(c))
        .collect::<Result<_>>()?;
    let per_instance: Vec<FScore> = contours
        .par_iter()
        .zip(references.par_iter())
        .map(|(c, gt)| {
            let code = descriptor.encode(c.radii())?;
            let j = nearest_centroid(&code, model)?;
            let pattern = c.with_radii(decoded[j].clone())?;
            boundary_fscore_points(&pattern.vertices(), gt, rule.resolve(gt))
        })
        .collect::<Result<_>>()?;
    Ok(ClusterEval {
        k: model.k,
        m: model.m,
        mean_precision: mean(per_instance.iter().map(|s| s.precision)),
        mean_recall: mean(per_instance.iter().map(|s| s.recall)),
        mean_f: mean(per_instance.iter().map(|s| s.f)),
        per_instance,
    })
}

/// Everything one `eval` run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSuite {
    pub reports: Vec<EvalReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clustering: Vec<(DescriptorKind, ClusterEval)>,
    pub provenance: Provenance,
}

impl EvalSuite {
    pub fn report(&self, kind: DescriptorKind) -> Option<&EvalReport> {
        self.reports.iter().find(|r| r.descriptor == kind)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serial::to_json(self)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }
}

/// `n` points spaced uniformly by arc length along each closed ring, split
/// across rings in proportion to their perimeter.
pub fn resample_rings(rings: &[Vec<Point>], n: usize) -> Vec<Point> {
    let perimeter = |ring: &[Point]| -> f64 {
        (0..ring.len())
            .map(|i| ring[i].distance(&ring[(i + 1) % ring.len()]))
            .sum()
    };
    let lengths: Vec<f64> = rings.iter().map(|r| perimeter(r)).collect();
    let total: f64 = lengths.iter().sum();
    if total <= 0.0 || n == 0 {
        return rings.iter().flatten().copied().collect();
    }
    let mut out = Vec::with_capacity(n);
    for (ring, len) in rings.iter().zip(&lengths) {
        let count = ((n as f64) * len / total).round().max(1.0) as usize;
        let step = len / count as f64;
        let mut seg = 0;
        let mut seg_start = 0.0;
        for k in 0..count {
            let s = k as f64 * step;
            loop {
                let a = ring[seg];
                let b = ring[(seg + 1) % ring.len()];
                let l = a.distance(&b);
                if s <= seg_start + l || seg + 1 == ring.len() {
                    let t = if l > 0.0 {
                        ((s - seg_start) / l).clamp(0.0, 1.0)
                    } else {
                        0.0
                    };
                    out.push(Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
                    break;
                }
                seg_start += l;
                seg += 1;
            }
        }
    }
    out
}
